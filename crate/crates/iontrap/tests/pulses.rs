use iontrap::chain::ChainModes;
use iontrap::quantum::{
    fidelity, flopping_scan, HilbertSpec, Level, Marginal, PulseKind, PulseSpec, Simulator, StateVector,
};
use proptest::prelude::*;

fn single_ion(n_max: usize) -> Simulator {
    Simulator::new(HilbertSpec::new(1, 2, 1, n_max), ChainModes::single_ion()).unwrap()
}

fn excited(psi: &StateVector) -> f64 {
    psi.populations(Marginal::Qubit(0)).unwrap()[1]
}

#[test]
fn flopping_frequencies_for_low_fock_states() {
    let (rabi, eta) = (0.2, 0.1);
    for n in 0..=2 {
        for kind in [PulseKind::Carrier, PulseKind::RedSideband, PulseKind::BlueSideband] {
            let scan = flopping_scan(kind, n, rabi, eta, 5, 4.0, 400).unwrap();
            let want = match kind {
                PulseKind::Carrier => rabi,
                PulseKind::RedSideband => rabi * eta * (n as f64).sqrt(),
                _ => rabi * eta * ((n + 1) as f64).sqrt(),
            };
            match scan.measured {
                Some(got) => assert!((got / want - 1.0).abs() < 1e-4, "{kind:?} n={n}: {got} vs {want}"),
                None => assert!(want == 0.0 && scan.max_excited < 1e-20),
            }
        }
    }
}

#[test]
fn red_sideband_matches_two_level_closed_form() {
    let sim = single_ion(4);
    let (rabi, eta) = (0.3, 0.07);
    for n in 1..=3 {
        let psi = StateVector::basis(*sim.spec(), &[Level::Ground], &[n]).unwrap();
        let w = rabi * eta * (n as f64).sqrt();
        for t in [0.3, 17.0, 150.0, 401.5] {
            let out = sim.evolve(&psi, &PulseSpec::red_sideband(0, rabi, eta, 0.4, t)).unwrap();
            let want = (w * t / 2.0).sin().powi(2);
            assert!((excited(&out) - want).abs() < 1e-10);
            let moved = out.amplitude(&[Level::Excited], &[n - 1]).unwrap().norm_sqr();
            assert!((moved - want).abs() < 1e-10);
        }
    }
}

#[test]
fn sideband_result_independent_of_cutoff() {
    let pulse = PulseSpec::blue_sideband(0, 0.25, 0.1, 1.1, 90.0);
    let small = single_ion(3);
    let large = single_ion(5);
    let a = small.evolve(&StateVector::basis(*small.spec(), &[Level::Ground], &[1]).unwrap(), &pulse).unwrap();
    let b = large.evolve(&StateVector::basis(*large.spec(), &[Level::Ground], &[1]).unwrap(), &pulse).unwrap();
    for (n, (x, y)) in a
        .populations(Marginal::Mode(0))
        .unwrap()
        .iter()
        .zip(b.populations(Marginal::Mode(0)).unwrap())
        .enumerate()
    {
        assert!((x - y).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn lamb_dicke_full_converges_in_cutoff() {
    let pulse = PulseSpec { kind: PulseKind::LambDickeFull, lamb_dicke: 0.1, ..PulseSpec::carrier(0, 0.1, 0.0, 20.0) };
    let run = |n_max| {
        let sim = single_ion(n_max);
        let out = sim.evolve(&StateVector::basis(*sim.spec(), &[Level::Ground], &[0]).unwrap(), &pulse).unwrap();
        excited(&out)
    };
    let (base, more) = (run(3), run(5));
    assert!((base - more).abs() < 1e-8, "{base} vs {more}");
}

#[test]
fn stepped_route_agrees_with_exact_frame() {
    let sim = single_ion(4);
    let psi = StateVector::basis(*sim.spec(), &[Level::Ground], &[1]).unwrap();
    let pulse = PulseSpec { kind: PulseKind::LambDickeFull, lamb_dicke: 0.1, ..PulseSpec::carrier(0, 0.2, 0.7, 12.0) };
    let exact = sim.evolve(&psi, &pulse).unwrap();
    let stepped = sim.evolve_stepped(&psi, &pulse, None).unwrap();
    assert!(fidelity(&exact, &stepped).unwrap() > 1.0 - 1e-6);

    let detuned = PulseSpec::red_sideband(0, 0.2, 0.1, 0.3, 40.0).with_detuning(-1.02);
    let exact = sim.evolve(&psi, &detuned).unwrap();
    let stepped = sim.evolve_stepped(&psi, &detuned, None).unwrap();
    assert!(fidelity(&exact, &stepped).unwrap() > 1.0 - 1e-6);
}

#[test]
fn cirac_zoller_moves_one_excitation_into_com() {
    let modes = ChainModes::for_chain(2, 1.0).unwrap();
    let sim = Simulator::new(HilbertSpec::new(2, 3, 1, 2), modes).unwrap();
    let psi = StateVector::basis(*sim.spec(), &[Level::Ground, Level::Excited], &[0]).unwrap();
    let (rabi, eta) = (0.1, 0.1);
    let t = std::f64::consts::PI * 2f64.sqrt() / (rabi * eta);
    let pulse = PulseSpec::cirac_zoller(1, Default::default(), rabi, eta, 0.0, t);
    let out = sim.evolve(&psi, &pulse).unwrap();
    let moved = out.amplitude(&[Level::Ground, Level::Ground], &[1]).unwrap().norm_sqr();
    assert!((moved - 1.0).abs() < 1e-10);
}

fn random_state(spec: HilbertSpec, re: &[f64], im: &[f64]) -> StateVector {
    let amps = re.iter().zip(im).map(|(&r, &i)| num_complex::Complex64::new(r, i)).collect();
    StateVector::normalized(spec, amps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_hermitian_at_any_time(t in 0.0f64..1e3, phi in 0.0f64..6.3, kind in 0usize..4) {
        let kind = [PulseKind::Carrier, PulseKind::RedSideband, PulseKind::BlueSideband, PulseKind::LambDickeFull][kind];
        let sim = single_ion(3);
        let pulse = PulseSpec { kind, lamb_dicke: 0.1, ..PulseSpec::carrier(0, 0.3, phi, 1.0) };
        let h = sim.hamiltonian(&pulse).unwrap();
        prop_assert!(h.at(t).hermiticity_deviation() < 1e-14);
    }

    #[test]
    fn multimode_hamiltonian_hermitian(t in 0.0f64..1e3, ion in 0usize..3) {
        let sim = Simulator::new(HilbertSpec::new(3, 2, 3, 2), ChainModes::for_chain(3, 1.0).unwrap()).unwrap();
        let h = sim.hamiltonian(&PulseSpec::multimode(ion, 0.1, 0.1, 0.3, 1.0)).unwrap();
        prop_assert!(h.at(t).hermiticity_deviation() < 1e-14);
    }

    #[test]
    fn evolution_preserves_norm(
        re in prop::collection::vec(-1.0f64..1.0, 8),
        im in prop::collection::vec(-1.0f64..1.0, 8),
        t in 0.0f64..200.0,
    ) {
        let sim = single_ion(3);
        let psi = random_state(*sim.spec(), &re, &im);
        let pulse = PulseSpec { kind: PulseKind::LambDickeFull, lamb_dicke: 0.1, ..PulseSpec::carrier(0, 0.2, 0.1, t) };
        let out = sim.evolve(&psi, &pulse).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn carrier_rate_independent_of_fock(n in 0usize..4, t in 0.0f64..50.0) {
        let sim = single_ion(3);
        let psi = StateVector::basis(*sim.spec(), &[Level::Ground], &[n]).unwrap();
        let out = sim.evolve(&psi, &PulseSpec::carrier(0, 0.2, 0.0, t)).unwrap();
        prop_assert!((excited(&out) - (0.1 * t).sin().powi(2)).abs() < 1e-10);
    }
}

#[test]
fn leakage_unchanged_when_cutoff_raised_by_two() {
    use iontrap::chain::ChainConfig;
    use iontrap::quantum::{com_pi_time, leakage_experiment};
    let cfg = ChainConfig::new(3, 0.1, 0.05 * 3f64.sqrt() / 0.1);
    let t = com_pi_time(&cfg);
    let low = leakage_experiment(&cfg, t, 3).unwrap();
    let high = leakage_experiment(&cfg, t, 5).unwrap();
    for (a, b) in low.per_ion.iter().zip(&high.per_ion) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}
