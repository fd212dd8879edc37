use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use iontrap::algorithms::{
    bell_state, finish_teleport, measure, protocol_spec, teleport, teleport_prepare, verify_uchi_inverse, Branch,
    ProtocolOptions, DEFAULT_SEED,
};
use iontrap::gates::{CompileOptions, GateCompiler, GateSpec};
use iontrap::quantum::{HilbertSpec, Marginal, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Rotation matrix written out element by element.
fn rotation(k: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (s, co) = ((k * PI / 2.0).sin(), (k * PI / 2.0).cos());
    let minus_i = c(0.0, -1.0);
    [
        [c(co, 0.0), minus_i * c((-phi).cos(), (-phi).sin()) * s],
        [minus_i * c(phi.cos(), phi.sin()) * s, c(co, 0.0)],
    ]
}

fn unit_pair() -> impl Strategy<Value = (Complex64, Complex64)> {
    (prop::array::uniform4(-1.0f64..1.0)).prop_filter_map("nonzero", |v| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (n > 1e-3).then(|| (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n)))
    })
}

fn register_fidelity(psi: &StateVector, want: &[Complex64]) -> f64 {
    psi.register_amplitudes().iter().zip(want).map(|(x, y)| y.conj() * x).sum::<Complex64>().norm_sqr()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pulse_rotation_matches_matrix(k in -2.0f64..2.0, phi in 0.0f64..2.0 * PI, (a, b) in unit_pair()) {
        let gc = GateCompiler::new(HilbertSpec::new(1, 2, 1, 2), CompileOptions::default()).unwrap();
        let psi = StateVector::from_register(*gc.spec(), &[a, b]).unwrap();
        let out = gc.apply(&GateSpec::Rotation { ion: 0, k, phi }, &psi).unwrap();
        let r = rotation(k, phi);
        let want = [r[0][0] * a + r[0][1] * b, r[1][0] * a + r[1][1] * b];
        let got = out.register_amplitudes();
        prop_assert!((got[0] - want[0]).norm() < 1e-10 && (got[1] - want[1]).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn cnot_on_superpositions(amps in prop::array::uniform8(-1.0f64..1.0)) {
        let n = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(n > 1e-3);
        let reg: Vec<Complex64> = (0..4).map(|i| c(amps[2 * i] / n, amps[2 * i + 1] / n)).collect();
        let gc = GateCompiler::new(protocol_spec(2, 3), CompileOptions::default()).unwrap();
        let psi = StateVector::from_register(*gc.spec(), &reg).unwrap();
        let out = gc.apply(&GateSpec::Cnot { control: 0, target: 1 }, &psi).unwrap();
        let want = [reg[0], reg[1], reg[3], reg[2]];
        prop_assert!(register_fidelity(&out, &want) > 1.0 - 1e-8);
    }

    #[test]
    fn teleport_every_branch((a, b) in unit_pair()) {
        let opts = ProtocolOptions::default();
        let gc = GateCompiler::new(protocol_spec(3, opts.fock_cutoff), opts.compile).unwrap();
        let prepared = teleport_prepare(&gc, a, b).unwrap();
        let h = 0.5;
        // −½|00⟩(a,b) + ½|01⟩(b,a) + ½|10⟩(−a,b) + ½|11⟩(−b,a)
        let shown = [-a * h, -b * h, b * h, a * h, -a * h, b * h, -b * h, a * h];
        for (x, y) in prepared.register_amplitudes().iter().zip(shown) {
            prop_assert!((x - y).norm() < 1e-8);
        }
        for bits in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let report = finish_teleport(&gc, &prepared, a, b, Branch::Forced(bits)).unwrap();
            prop_assert!(report.fidelity > 1.0 - 1e-8, "{bits:?}: {}", report.fidelity);
            prop_assert_eq!(report.measurement.probabilities.len(), 4);
            for p in &report.measurement.probabilities {
                prop_assert!((p - 0.25).abs() < 1e-8);
            }
            prop_assert!(verify_uchi_inverse(&report).unwrap());
        }
    }
}

#[test]
fn control_z_leaves_minus_one_one() {
    let gc = GateCompiler::new(protocol_spec(2, 3), CompileOptions::default()).unwrap();
    let seq = gc.compile_cz(0, 1).unwrap();
    let psi = StateVector::qubits(*gc.spec(), &[1, 1]).unwrap();
    let out = gc.run(&seq, &psi).unwrap();
    assert!((psi.inner(&out).unwrap() - c(-1.0, 0.0)).norm() < 1e-8);
}

#[test]
fn bell_states_from_pulses() {
    let s = FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    let p = c(s, 0.0);
    let table = [
        ((0, 0), [p, z, z, p]),
        ((0, 1), [z, p, p, z]),
        ((1, 0), [p, z, z, -p]),
        ((1, 1), [z, p, -p, z]),
    ];
    for ((x, y), want) in table {
        let psi = bell_state(x, y, &ProtocolOptions::default()).unwrap();
        assert!(register_fidelity(&psi, &want) > 1.0 - 1e-8, "β{x}{y}");
    }
}

#[test]
fn hadamard_on_ground_is_plus() {
    let gc = GateCompiler::new(HilbertSpec::new(1, 2, 1, 1), CompileOptions::default()).unwrap();
    let out = gc.apply(&GateSpec::H { ion: 0 }, &StateVector::qubits(*gc.spec(), &[0]).unwrap()).unwrap();
    assert!(register_fidelity(&out, &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]) > 1.0 - 1e-12);
    // X·R(1/2, π/2) up to global phase
    let rot = rotation(0.5, FRAC_PI_2);
    let want = [rot[1][0], rot[0][0]];
    assert!(register_fidelity(&out, &want) > 1.0 - 1e-12);
}

#[test]
fn measurement_frequencies_follow_born_rule() {
    let spec = HilbertSpec::new(1, 2, 0, 1);
    let plus = StateVector::from_register(spec, &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
    let zeros = (0..10_000u64).filter(|&seed| measure(&plus, &[0], seed).unwrap().0.outcomes[0] == 0).count();
    let freq = zeros as f64 / 10_000.0;
    assert!((freq - 0.5).abs() < 0.02, "{freq}");
}

#[test]
fn same_seed_same_report() {
    let opts = ProtocolOptions::default();
    let a = c(0.6, 0.0);
    let b = c(0.0, 0.8);
    let first = teleport(a, b, DEFAULT_SEED, &opts).unwrap();
    let second = teleport(a, b, DEFAULT_SEED, &opts).unwrap();
    assert_eq!(first, second);
    let collapsed = first.measured_populations;
    let outcomes = &first.measurement.outcomes;
    for i in 0..2 {
        assert!((collapsed[i] - outcomes[i] as f64).abs() < 1e-12);
    }
}

#[test]
fn measured_qubits_collapse() {
    let spec = HilbertSpec::new(2, 2, 0, 1);
    let h = 0.5;
    let psi = StateVector::from_register(spec, &[c(h, 0.0), c(h, 0.0), c(0.0, h), c(-h, 0.0)]).unwrap();
    let (record, state) = measure(&psi, &[1], 7).unwrap();
    let p1 = state.populations(Marginal::Qubit(1)).unwrap()[1];
    assert_eq!(p1, record.outcomes[0] as f64);
}
