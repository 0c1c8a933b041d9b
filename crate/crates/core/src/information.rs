//! Fisher information and Cramér–Rao precision bounds.

use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, ZERO_PROBABILITY};
use crate::states::{ghz_state, phased_plus, product_state, Generator, StrategyKind, StrategySpec};

/// Cramér–Rao bound `1/√(ν F)` for one strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionBound {
    pub strategy: &'static str,
    pub n: usize,
    pub nu: u64,
    /// Fisher information per repetition.
    pub fisher_info: f64,
    pub bound: f64,
}

/// `4 (<H²> - <H>²)` for a pure state under the diagonal generator `h_total`.
pub fn qfi_pure(psi: &ComplexVector, h_total: &Generator) -> Result<f64> {
    if psi.dim() != h_total.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} with generator of dim {}",
            psi.dim(),
            h_total.dim()
        )));
    }
    let norm2 = psi.norm().powi(2);
    if norm2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let (m1, m2) = psi
        .entries()
        .iter()
        .zip(h_total.eigenvalues())
        .fold((0.0, 0.0), |(m1, m2), (a, &e)| {
            let w = a.norm_sqr() / norm2;
            (m1 + w * e, m2 + w * e * e)
        });
    Ok((4.0 * (m2 - m1 * m1)).max(0.0))
}

/// Classical Fisher information `(dp/dφ)² / (p(1-p))` of a binary outcome.
pub fn binary_fisher(p: f64, q: f64, dp: f64) -> Result<f64> {
    // floating-point residue of an exact 0 or 1 is treated as deterministic
    if !(p > ZERO_PROBABILITY && q > ZERO_PROBABILITY) {
        return Err(Error::Undefined(format!(
            "Fisher information of a deterministic outcome (p = {p})"
        )));
    }
    Ok(dp * dp / (p * q))
}

/// Fisher information of the coincidence outcome `p(φ) = cos²(nφ/2)`.
pub fn cfi_binary(n: usize, phi: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let x = n as f64 * phi / 2.0;
    let (s, c) = x.sin_cos();
    // q = 1 - p evaluated directly, dp/dφ = -(n/2) sin(nφ)
    let dp = -(n as f64) * s * c;
    binary_fisher(c * c, s * s, dp)
}

/// Cramér–Rao bound per strategy, computed from the probe state's QFI.
pub fn crb(strategy: &StrategySpec, nu: u64) -> Result<PrecisionBound> {
    if nu == 0 {
        return Err(Error::OutOfRange("nu must be at least 1".into()));
    }
    let n = strategy.n_probes();
    let h = strategy.generator().qubit_restriction();
    let lambda = strategy.lambda();
    let fisher_info = match strategy.kind() {
        // one probe carrying the N-fold generator
        StrategyKind::Sequential => qfi_pure(&phased_plus(lambda), &h.scaled(n as f64)?)?,
        StrategyKind::ClassicalParallel => {
            qfi_pure(&product_state(&phased_plus(lambda), n)?, &h.total(n)?)?
        }
        // W†U'V† = e^{iφH}, so the generalized strategy shares the GHZ bound
        StrategyKind::EntangledParallel | StrategyKind::GeneralizedEntangled { .. } => {
            qfi_pure(&ghz_state(n, lambda)?, &h.total(n)?)?
        }
    };
    if fisher_info.is_nan() || fisher_info <= 0.0 {
        return Err(Error::Undefined("probe state carries no Fisher information".into()));
    }
    Ok(PrecisionBound {
        strategy: strategy.tag(),
        n,
        nu,
        fisher_info,
        bound: 1.0 / (nu as f64 * fisher_info).sqrt(),
    })
}

/// Entangled-strategy frequency bound under dephasing rate `gamma` and
/// interrogation time `t`: `e^{nγt} / (n t √ν)`.
pub fn frequency_bound_dephasing(n: usize, gamma: f64, t: f64, nu: u64) -> Result<f64> {
    check_noise_args(n, gamma, nu)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("interrogation time {t} must be positive")));
    }
    let n = n as f64;
    Ok((n * gamma * t).exp() / (n * t * (nu as f64).sqrt()))
}

/// Phase bound at fixed interrogation time under the same dephasing:
/// entangled `e^{nγt}/(n√ν)`, classical `e^{γt}/√(nν)`.
pub fn phase_bound_dephasing(n: usize, gamma: f64, t: f64, nu: u64, entangled: bool) -> Result<f64> {
    check_noise_args(n, gamma, nu)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange(format!("interrogation time {t} must be non-negative")));
    }
    let (nf, nuf) = (n as f64, nu as f64);
    Ok(if entangled {
        (nf * gamma * t).exp() / (nf * nuf.sqrt())
    } else {
        (gamma * t).exp() / (nf * nuf).sqrt()
    })
}

fn check_noise_args(n: usize, gamma: f64, nu: u64) -> Result<()> {
    if n == 0 || nu == 0 {
        return Err(Error::OutOfRange("n and nu must be at least 1".into()));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::OutOfRange(format!("dephasing rate {gamma} must be non-negative")));
    }
    Ok(())
}

/// Minimizer of [`frequency_bound_dephasing`] over the interrogation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyOptimum {
    pub t_star: f64,
    pub bound_star: f64,
}

const GOLDEN_RTOL: f64 = 1e-9;
const GOLDEN_MAX_ITERS: usize = 500;

/// Golden-section search for the optimal interrogation time on
/// `(0, 10/(nγ)]`. The closed form is `t* = 1/(nγ)`, `bound* = eγ/√ν`.
pub fn optimal_frequency_bound(n: usize, gamma: f64, nu: u64) -> Result<FrequencyOptimum> {
    check_noise_args(n, gamma, nu)?;
    if gamma == 0.0 {
        return Err(Error::OutOfRange("dephasing rate must be positive".into()));
    }
    let upper = 10.0 / (n as f64 * gamma);
    // log of the bound is convex in t, which keeps the search well conditioned
    let objective = |t: f64| {
        frequency_bound_dephasing(n, gamma, t, nu)
            .map(f64::ln)
            .unwrap_or(f64::INFINITY)
    };
    let t_star = golden_section(objective, upper * 1e-12, upper)?;
    if t_star >= upper * (1.0 - 1e-6) {
        return Err(Error::NoConvergence(format!(
            "minimum at the search boundary t = {t_star}"
        )));
    }
    Ok(FrequencyOptimum {
        t_star,
        bound_star: frequency_bound_dephasing(n, gamma, t_star, nu)?,
    })
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_MAX_ITERS {
        if (b - a).abs() <= GOLDEN_RTOL * (c.abs() + d.abs()) / 2.0 {
            return Ok((a + b) / 2.0);
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    Err(Error::NoConvergence(format!(
        "golden-section bracket [{a}, {b}] after {GOLDEN_MAX_ITERS} iterations"
    )))
}

/// Sampling-time ratio of the sequential to the parallel strategy.
pub fn time_advantage(n: usize) -> f64 {
    n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::plus;
    use std::f64::consts::{E, PI};

    #[test]
    fn qfi_examples() {
        let h = Generator::qubit();
        for n in 1..=6 {
            let total = h.total(n).unwrap();
            let ghz = qfi_pure(&ghz_state(n, 0.3).unwrap(), &total).unwrap();
            assert!((ghz - (n * n) as f64).abs() < 1e-12);
            let prod = qfi_pure(&product_state(&plus(), n).unwrap(), &total).unwrap();
            assert!((prod - n as f64).abs() < 1e-12);
            let eig = qfi_pure(&ComplexVector::basis(1 << n, 0), &total).unwrap();
            assert_eq!(eig, 0.0);
        }
    }

    #[test]
    fn cfi_examples() {
        assert!((cfi_binary(1, PI / 2.0).unwrap() - 1.0).abs() < 1e-12);
        for k in 1..20 {
            let phi = k as f64 * (PI / 8.0) / 20.0;
            assert!((cfi_binary(8, phi).unwrap() - 64.0).abs() < 1e-9);
        }
        assert!(matches!(cfi_binary(2, 0.0), Err(Error::Undefined(_))));
        assert!(matches!(cfi_binary(2, PI), Err(Error::Undefined(_))));
    }

    #[test]
    fn crb_examples() {
        let ent = StrategySpec::simple(StrategyKind::EntangledParallel, 4).unwrap();
        assert!((crb(&ent, 100).unwrap().bound - 0.025).abs() < 1e-12);
        let cls = StrategySpec::simple(StrategyKind::ClassicalParallel, 4).unwrap();
        assert!((crb(&cls, 100).unwrap().bound - 0.05).abs() < 1e-12);
        let seq = StrategySpec::simple(StrategyKind::Sequential, 4).unwrap();
        assert!((crb(&seq, 100).unwrap().bound - 0.025).abs() < 1e-12);

        let b1: Vec<f64> = [
            StrategyKind::Sequential,
            StrategyKind::ClassicalParallel,
            StrategyKind::EntangledParallel,
        ]
        .into_iter()
        .map(|k| crb(&StrategySpec::simple(k, 1).unwrap(), 50).unwrap().bound)
        .collect();
        assert!(b1.iter().all(|b| (b - b1[0]).abs() < 1e-15));
    }

    #[test]
    fn crb_scales_with_generator_gap() {
        let h = Generator::new(vec![-1.0, 0.2, 1.0]).unwrap();
        let s = StrategySpec::new(StrategyKind::EntangledParallel, 3, h, 0.0).unwrap();
        let b = crb(&s, 1).unwrap();
        assert!((b.fisher_info - 36.0).abs() < 1e-12);
    }

    #[test]
    fn frequency_bound_examples() {
        assert!((frequency_bound_dephasing(1, 1.0, 1.0, 1).unwrap() - E).abs() < 1e-12);
        assert!((frequency_bound_dephasing(2, 1.0, 0.5, 1).unwrap() - E).abs() < 1e-12);
        let noiseless = frequency_bound_dephasing(3, 1e-9, 0.5, 4).unwrap();
        assert!((noiseless - 1.0 / (3.0 * 0.5 * 2.0)).abs() < 1e-8);
        assert!(frequency_bound_dephasing(1, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn optimal_frequency_examples() {
        let o1 = optimal_frequency_bound(1, 1.0, 1).unwrap();
        assert!((o1.t_star - 1.0).abs() < 1e-6);
        assert!((o1.bound_star / E - 1.0).abs() < 1e-6);
        let o8 = optimal_frequency_bound(8, 1.0, 1).unwrap();
        assert!((o8.t_star / 0.125 - 1.0).abs() < 1e-6);
        assert!((o8.bound_star / E - 1.0).abs() < 1e-6);
        assert!(optimal_frequency_bound(1, 0.0, 1).is_err());
    }

    #[test]
    fn phase_bound_keeps_advantage_at_short_times() {
        for n in [2usize, 4, 8] {
            let ent = phase_bound_dephasing(n, 1.0, 1e-6, 1, true).unwrap();
            let cls = phase_bound_dephasing(n, 1.0, 1e-6, 1, false).unwrap();
            assert!((cls / ent / (n as f64).sqrt() - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn time_advantage_is_n() {
        assert_eq!(time_advantage(1), 1.0);
        assert_eq!(time_advantage(16), 16.0);
    }
}
