use std::f64::consts::PI;

use metroq::equivalence::effective_sequential_ops;
use metroq::random::{
    haar_unitary, random_channel, random_density_matrix, random_matrix, random_state,
    rng_from_seed,
};
use metroq::states::{pm_basis, Generator};
use metroq::strategy::strategy_probability;
use metroq::*;
use proptest::prelude::*;
use rand::Rng;

fn outer_sum(parts: &[(f64, ComplexVector)], d: usize) -> ComplexMatrix {
    parts.iter().fold(ComplexMatrix::zeros(d, d), |acc, (p, v)| {
        &acc + &ComplexMatrix::projector(v).scale(C64::new(*p, 0.0))
    })
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    m.hermitian_eigenvalues().unwrap()[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn vec_identity_holds(seed in any::<u64>(), d in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let (a, b, c) = (
            random_matrix(&mut rng, d),
            random_matrix(&mut rng, d),
            random_matrix(&mut rng, d),
        );
        prop_assert!(vec_identity_residual(&a, &b, &c).unwrap() < 1e-12);
    }

    #[test]
    fn vec_unvec_roundtrip(seed in any::<u64>(), d in 1usize..=8) {
        let mut rng = rng_from_seed(seed);
        let c = random_matrix(&mut rng, d);
        let v = vec(&c).unwrap();
        prop_assert_eq!(&unvec(&v, d).unwrap(), &c);
        prop_assert_eq!(vec(&unvec(&v, d).unwrap()).unwrap(), v);
    }

    #[test]
    fn projections_reconstruct_partial_trace(
        seed in any::<u64>(),
        dims in prop::collection::vec(2usize..=3, 2..=3),
        k_raw in 0usize..3,
    ) {
        let k = k_raw % dims.len();
        let mut rng = rng_from_seed(seed);
        let total: usize = dims.iter().product();
        let psi = random_state(&mut rng, total);
        let basis = haar_unitary(&mut rng, dims[k]);
        let mut parts = Vec::new();
        let mut total_p = 0.0;
        for col in 0..dims[k] {
            let e = ComplexVector::new((0..dims[k]).map(|r| basis[(r, col)]).collect()).unwrap();
            let proj = project_subsystem(&psi, &dims, k, &e).unwrap();
            total_p += proj.probability;
            if let Some(c) = proj.conditional {
                parts.push((proj.probability, c));
            }
        }
        prop_assert!((total_p - 1.0).abs() < 1e-12);
        let keep: Vec<usize> = (0..dims.len()).filter(|&j| j != k).collect();
        let rho = ComplexMatrix::projector(&psi);
        let reduced = partial_trace(&rho, &dims, &keep).unwrap();
        let rebuilt = outer_sum(&parts, total / dims[k]);
        prop_assert!(reduced.max_abs_diff(&rebuilt).unwrap() < 1e-10);
    }

    #[test]
    fn partial_trace_keeps_trace_and_hermiticity(seed in any::<u64>(), keep_first in any::<bool>()) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_matrix(&mut rng, 6);
        let keep = if keep_first { [0] } else { [1] };
        let r = partial_trace(&rho, &[2, 3], &keep).unwrap();
        prop_assert!((r.trace().re - 1.0).abs() < 1e-12);
        prop_assert_eq!(&r, &r.adjoint());
    }

    #[test]
    fn u_phi_group_law(a in -10.0f64..10.0, b in -10.0f64..10.0, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let eig: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let h = Generator::new(eig).unwrap();
        let lhs = u_phi(&h, a).matmul(&u_phi(&h, b)).unwrap();
        prop_assert!(lhs.max_abs_diff(&u_phi(&h, a + b)).unwrap() < 1e-12);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(seed in any::<u64>(), k in 1usize..=4, which in 0usize..2) {
        let mut rng = rng_from_seed(seed);
        let ch = random_channel(&mut rng, 2, k);
        prop_assert!(ch.completeness_residual() < 1e-12);
        let rho = random_density_matrix(&mut rng, 4);
        let out = apply_channel(&rho, &ch, &[2, 2], which).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(min_eigenvalue(&out.hermitian_part().unwrap()) > -1e-10);
    }

    #[test]
    fn named_channels_are_complete(p in 0.0f64..=1.0) {
        for ch in [
            KrausChannel::dephasing(p).unwrap(),
            KrausChannel::bit_phase_flip(p).unwrap(),
            KrausChannel::amplitude_damping(p).unwrap(),
        ] {
            prop_assert!(ch.completeness_residual() < 1e-12);
        }
    }

    // holds for arbitrary operator families, not only channels
    #[test]
    fn two_probe_noise_identity(seed in any::<u64>(), d in 2usize..=3, ka in 1usize..=4, kb in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let a: Vec<_> = (0..ka).map(|_| random_matrix(&mut rng, d)).collect();
        let b: Vec<_> = (0..kb).map(|_| random_matrix(&mut rng, d)).collect();
        prop_assert!(effective_sequential_ops(&a, &b).unwrap().identity_residual < 1e-12);
    }

    #[test]
    fn trace_preservation_tracks_unitality(seed in any::<u64>(), ka in 1usize..=4, kb in 1usize..=4) {
        let mut rng = rng_from_seed(seed);
        let cha = random_channel(&mut rng, 2, ka);
        // a random unitary mixture is unital
        let chb = if seed % 2 == 0 {
            random_channel(&mut rng, 2, kb)
        } else {
            let w: Vec<f64> = (0..kb).map(|_| rng.random_range(0.1..1.0)).collect();
            let s: f64 = w.iter().sum();
            KrausChannel::new(
                w.iter()
                    .map(|x| haar_unitary(&mut rng, 2).scale(C64::new((x / s).sqrt(), 0.0)))
                    .collect(),
            )
            .unwrap()
        };
        let red = effective_sequential_channel(&cha, &chb).unwrap();
        prop_assert_eq!(red.is_trace_preserving, chb.is_unital());
    }

    #[test]
    fn ghz_evolution_matches_closed_form(n in 1usize..=12, phi in -PI..PI, lambda in -PI..PI) {
        let out = evolve_parallel_entangled(&Generator::qubit(), phi, n, lambda).unwrap();
        let expected = ghz_state(n, n as f64 * phi + lambda).unwrap();
        prop_assert!(fidelity_up_to_phase(&out, &expected).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn ghz_qfi_any_lambda(n in 1usize..=12, lambda in -PI..PI) {
        let h = Generator::qubit().total(n).unwrap();
        let f = qfi_pure(&ghz_state(n, lambda).unwrap(), &h).unwrap();
        prop_assert!((f - (n * n) as f64).abs() < 1e-10);
    }
}

#[test]
fn corr_states_have_maximally_mixed_marginals() {
    let half = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
    for basis in [CorrelationBasis::Computational, CorrelationBasis::Hadamard] {
        let rho = classical_corr_state(basis);
        for keep in [0, 1] {
            let m = partial_trace(&rho, &[2, 2], &[keep]).unwrap();
            assert!(m.max_abs_diff(&half).unwrap() < 1e-12);
        }
    }
}

#[test]
fn sequential_and_entangled_fringes_coincide() {
    for n in 1..=10 {
        let seq = StrategySpec::simple(StrategyKind::Sequential, n).unwrap();
        let ent = StrategySpec::simple(StrategyKind::EntangledParallel, n).unwrap();
        for i in 0..100 {
            let phi = 2.0 * PI * i as f64 / 100.0;
            let d = strategy_probability(&seq, phi).unwrap() - strategy_probability(&ent, phi).unwrap();
            assert!(d.abs() < 1e-12, "n = {n}, φ = {phi}");
        }
    }
}

#[test]
fn useful_entanglement_is_the_diagonal_phase_family() {
    let mut rng = rng_from_seed(0x5EED);
    let h = Generator::qubit();
    let (mut accepted, mut rejected) = (0, 0);
    for i in 0..500 {
        let e = if i % 2 == 0 {
            haar_unitary(&mut rng, 2)
        } else {
            let (a, b) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            ComplexMatrix::from_diagonal(&[C64::from_polar(1.0, a), C64::from_polar(1.0, b)])
        };
        let off = e[(0, 1)].norm().max(e[(1, 0)].norm());
        let balanced = (e[(0, 0)].norm() - e[(1, 1)].norm()).abs() < 1e-10;
        let expected = off < 1e-10 && balanced;
        let got = useful_entanglement_check(&e, &h).unwrap();
        assert_eq!(got.is_useful, expected, "case {i}: {e:?}");
        if got.is_useful {
            let lambda = (e[(1, 1)] / e[(0, 0)]).arg();
            let diff = metroq::equivalence::wrap_phase(got.lambda_hat.unwrap() - lambda);
            assert!(diff.abs() < 1e-10);
            accepted += 1;
        } else {
            assert!(got.lambda_hat.is_none());
            rejected += 1;
        }
    }
    assert!(accepted > 200 && rejected > 200);
}

#[test]
fn rmse_shrinks_with_nu() {
    for kind in [StrategyKind::Sequential, StrategyKind::EntangledParallel] {
        let spec = StrategySpec::simple(kind, 1).unwrap();
        let rmse: Vec<f64> = [100u64, 1_000, 10_000]
            .iter()
            .map(|&nu| {
                let cfg = ExperimentConfig::new(spec.clone(), vec![1, 2, 4], nu, 200, 99);
                scaling_experiment(&cfg).unwrap().rows[1].empirical_rmse
            })
            .collect();
        assert!(rmse[0] > rmse[1] && rmse[1] > rmse[2], "{rmse:?}");
    }
}

#[test]
fn scaling_is_deterministic() {
    let spec = StrategySpec::simple(StrategyKind::EntangledParallel, 1).unwrap();
    let cfg = ExperimentConfig::new(spec, vec![1, 2, 4, 8], 500, 50, 7);
    assert_eq!(scaling_experiment(&cfg).unwrap(), scaling_experiment(&cfg).unwrap());
    let other = ExperimentConfig { seed: 8, ..cfg.clone() };
    assert_ne!(scaling_experiment(&cfg).unwrap(), scaling_experiment(&other).unwrap());
}

#[test]
fn pm_basis_is_orthonormal() {
    let [p, m] = pm_basis();
    assert!((p.inner(&m).unwrap()).norm() < 1e-15);
    assert!((p.norm() - 1.0).abs() < 1e-15 && (m.norm() - 1.0).abs() < 1e-15);
}
