use iontrap::chain::{
    cz_leakage_bound, force_residual, hessian_matrix, sigma_sum, solve_equilibrium, ChainConfig, ChainModes,
    LEAKAGE_BOUND_PREFACTOR,
};
use proptest::prelude::*;

/// Damped fixed-point relaxation `u ← u - λ F(u)` from an evenly spaced start.
/// Slow but shares nothing with the Newton solver.
fn relaxed_equilibrium(n: usize) -> Vec<f64> {
    let mut u: Vec<f64> = (0..n).map(|i| i as f64 - (n as f64 - 1.0) / 2.0).collect();
    for _ in 0..200_000 {
        let f = force_residual(&u);
        let worst = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if worst < 1e-14 {
            break;
        }
        for (x, fx) in u.iter_mut().zip(&f) {
            *x -= 0.05 * fx;
        }
    }
    u
}

#[test]
fn three_ion_equilibrium_matches_relaxation() {
    let eq = solve_equilibrium(3).unwrap();
    let oracle = relaxed_equilibrium(3);
    for (a, b) in eq.u.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-10, "{:?} vs {:?}", eq.u, oracle);
    }
    // force balance on the outer ion: s = 1/s² + 1/(2s)²
    let s = 1.25f64.cbrt();
    assert!((eq.u[2] - s).abs() < 1e-12);
    assert!(eq.u[1].abs() < 1e-14);
}

#[test]
fn larger_chains_match_relaxation() {
    for n in [4, 6, 9] {
        let eq = solve_equilibrium(n).unwrap();
        let oracle = relaxed_equilibrium(n);
        let worst = eq.u.iter().zip(&oracle).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(worst < 1e-9, "N={n}: {worst:e}");
    }
}

#[test]
fn two_ion_positions() {
    let eq = solve_equilibrium(2).unwrap();
    let x = 2f64.powf(-2.0 / 3.0);
    assert!((eq.u[0] + x).abs() < 1e-10 && (eq.u[1] - x).abs() < 1e-10);
}

#[test]
fn mode_invariants_up_to_ten() {
    for n in 1..=10 {
        let eq = solve_equilibrium(n).unwrap();
        assert!(eq.residual_norm < 1e-10);
        assert!(eq.u.iter().sum::<f64>().abs() < 1e-10);
        for i in 0..n {
            assert!((eq.u[i] + eq.u[n - 1 - i]).abs() < 1e-10);
        }

        let a = hessian_matrix(&eq).unwrap();
        assert!(a.symmetry_deviation() < 1e-12);
        for i in 0..n {
            let row: f64 = (0..n).map(|j| a.get(i, j)).sum();
            assert!((row - 1.0).abs() < 1e-10, "A·1 = 1 fails at N={n}");
        }

        let modes = ChainModes::for_chain(n, 1.0).unwrap();
        assert!((modes.eigenvalues[0] - 1.0).abs() < 1e-8);
        let inv = 1.0 / (n as f64).sqrt();
        for b in &modes.eigenvectors[0] {
            assert!((b - inv).abs() < 1e-10);
        }
        for s in &modes.couplings[0] {
            assert!((s - 1.0).abs() < 1e-10);
        }
        if n >= 2 {
            assert!((modes.eigenvalues[1] - 3.0).abs() < 1e-8);
            assert!((modes.mode_frequencies[1] / modes.mode_frequencies[0] - 3f64.sqrt()).abs() < 1e-8);
            let norm = eq.u.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (b, u) in modes.eigenvectors[1].iter().zip(&eq.u) {
                assert!((b - u / norm).abs() < 1e-8);
            }
        }
        for p in 0..n {
            for q in 0..n {
                let dot: f64 = modes.eigenvectors[p].iter().zip(&modes.eigenvectors[q]).map(|(x, y)| x * y).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
        for m in 0..n {
            let total: f64 = (0..n).map(|p| modes.eigenvectors[p][m].powi(2)).sum();
            assert!((total - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn two_ion_breathing_mode_sign() {
    let modes = ChainModes::for_chain(2, 1.0).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!((modes.eigenvectors[1][0] + s).abs() < 1e-12);
    assert!((modes.eigenvectors[1][1] - s).abs() < 1e-12);
}

#[test]
fn sigma_sum_grows_toward_limit() {
    let sigmas: Vec<f64> = (2..=30).map(|n| sigma_sum(n).unwrap()).collect();
    // only the breathing mode for N = 2: 4 / (√3 · 4)
    assert!((sigmas[0] - 1.0 / 3f64.sqrt()).abs() < 1e-10);
    for w in sigmas.windows(2) {
        assert!(w[1] >= w[0]);
    }
    let last = *sigmas.last().unwrap();
    assert!((0.70..=0.83).contains(&last), "Σ(30) = {last}");
}

#[test]
fn bound_example() {
    let b = cz_leakage_bound(&ChainConfig::new(3, 0.05, 1.0)).unwrap();
    let want = 1.69 * (0.05f64 / 3f64.sqrt()).powi(2);
    assert!((b.loose - want).abs() < 1e-15);
    assert!(b.tight <= b.loose);
}

proptest! {
    #[test]
    fn loose_bound_is_prefactor_times_ratio(n in 1usize..12, eta in 1e-3f64..0.3, omega in 1e-3f64..2.0) {
        let cfg = ChainConfig::new(n, eta, omega);
        let b = cz_leakage_bound(&cfg).unwrap();
        let ratio = (omega * eta / (n as f64).sqrt()).powi(2);
        prop_assert!((b.ratio - ratio).abs() <= 1e-14 * ratio);
        prop_assert!((b.loose - LEAKAGE_BOUND_PREFACTOR * ratio).abs() <= 1e-14 * ratio);
        prop_assert!(b.tight <= b.loose);
    }

    #[test]
    fn mode_frequencies_scale_with_trap(n in 2usize..8, nu in 0.1f64..10.0) {
        let unit = ChainModes::for_chain(n, 1.0).unwrap();
        let scaled = ChainModes::for_chain(n, nu).unwrap();
        for (a, b) in unit.mode_frequencies.iter().zip(&scaled.mode_frequencies) {
            prop_assert!((a * nu - b).abs() < 1e-10 * b);
        }
        prop_assert_eq!(&unit.eigenvectors, &scaled.eigenvectors);
    }
}
