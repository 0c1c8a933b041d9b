//! Kraus-form noise channels and their structural predicates.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Layout, C64, PREDICATE_TOL, ZERO};
use crate::states::{sigma_x, sigma_y, sigma_z};

/// A trace-preserving channel given by its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validates that the operators share one square dimension and satisfy
    /// `Σ A†A = I` within tolerance.
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let d = kraus_dim(&ops)?;
        let residual = completeness_residual(&ops);
        if residual > PREDICATE_TOL {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators on dim {d} are not trace preserving (residual {residual:.3e})"
            )));
        }
        Ok(Self { ops })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            ops: vec![ComplexMatrix::identity(d)],
        }
    }

    /// `{√(1-p) I, √p σ_z}`.
    pub fn dephasing(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self {
            ops: vec![
                ComplexMatrix::identity(2).scale(re((1.0 - p).sqrt())),
                sigma_z().scale(re(p.sqrt())),
            ],
        })
    }

    /// `{√(1-p) σ_x, √p σ_y}`.
    pub fn bit_phase_flip(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        Ok(Self {
            ops: vec![
                sigma_x().scale(re((1.0 - p).sqrt())),
                sigma_y().scale(re(p.sqrt())),
            ],
        })
    }

    /// `{diag(1, √(1-g)), √g |0><1|}`.
    pub fn amplitude_damping(g: f64) -> Result<Self> {
        check_probability("g", g)?;
        let k0 = ComplexMatrix::from_diagonal(&[re(1.0), re((1.0 - g).sqrt())]);
        let k1 = ComplexMatrix::new(2, 2, vec![ZERO, re(g.sqrt()), ZERO, ZERO]).expect("2x2");
        Ok(Self { ops: vec![k0, k1] })
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    /// `‖Σ A†A - I‖_max`.
    pub fn completeness_residual(&self) -> f64 {
        completeness_residual(&self.ops)
    }

    /// `‖Σ A A† - I‖_max`.
    pub fn unitality_residual(&self) -> f64 {
        unitality_residual(&self.ops)
    }

    pub fn is_unital(&self) -> bool {
        self.unitality_residual() < PREDICATE_TOL
    }

    /// Every Kraus operator is individually diagonal or anti-diagonal.
    pub fn is_diag_or_antidiag(&self) -> bool {
        self.ops
            .iter()
            .all(|a| a.is_diagonal() || a.is_antidiagonal())
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("{name} = {p} is outside [0, 1]")));
    }
    Ok(())
}

pub(crate) fn kraus_dim(ops: &[ComplexMatrix]) -> Result<usize> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidChannel("at least one Kraus operator is required".into()))?;
    let d = first.dim()?;
    if ops.iter().any(|a| a.rows() != d || a.cols() != d) {
        return Err(Error::InvalidChannel(
            "Kraus operators must all be square of the same dimension".into(),
        ));
    }
    Ok(d)
}

fn sum_products(ops: &[ComplexMatrix], f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    let d = ops[0].rows();
    ops.iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, a| &acc + &f(a))
}

pub(crate) fn completeness_residual(ops: &[ComplexMatrix]) -> f64 {
    let d = ops[0].rows();
    sum_products(ops, |a| &a.adjoint() * a)
        .max_abs_diff(&ComplexMatrix::identity(d))
        .unwrap_or(f64::INFINITY)
}

pub(crate) fn unitality_residual(ops: &[ComplexMatrix]) -> f64 {
    let d = ops[0].rows();
    sum_products(ops, |a| a * &a.adjoint())
        .max_abs_diff(&ComplexMatrix::identity(d))
        .unwrap_or(f64::INFINITY)
}

/// `(I ⊗ … ⊗ op ⊗ … ⊗ I) · m` with `op` on subsystem `k`.
fn left_local(m: &ComplexMatrix, layout: &Layout, k: usize, op: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let dk = op.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        let row_digit = layout.digit(r, k);
        for s in 0..dk {
            let a = op[(row_digit, s)];
            if a == ZERO {
                continue;
            }
            let src = layout.with_digit(r, k, s);
            for c in 0..n {
                out[(r, c)] += a * m[(src, c)];
            }
        }
    }
    out
}

/// `Σ_j (…⊗A_j⊗…) ρ (…⊗A_j⊗…)†` with the channel on subsystem `k`.
pub fn apply_channel(
    rho: &ComplexMatrix,
    ch: &KrausChannel,
    dims: &[usize],
    k: usize,
) -> Result<ComplexMatrix> {
    let layout = Layout::new(dims)?;
    let dk = layout.check_subsystem(k)?;
    if rho.dim()? != layout.total() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on register {dims:?}",
            rho.rows(),
            rho.cols()
        )));
    }
    if ch.dim() != dk {
        return Err(Error::DimensionMismatch(format!(
            "channel of dim {} on subsystem of dim {dk}",
            ch.dim()
        )));
    }
    let n = layout.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for a in &ch.ops {
        // (A ρ A†) = (A (A ρ)†)†
        let left = left_local(rho, &layout, k, a);
        let both = left_local(&left.adjoint(), &layout, k, a).adjoint();
        out = &out + &both;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ComplexVector};
    use crate::states::plus;

    #[test]
    fn constructors_are_complete() {
        for p in [0.0, 0.1, 0.25, 0.5, 0.9, 1.0] {
            for ch in [
                KrausChannel::dephasing(p).unwrap(),
                KrausChannel::bit_phase_flip(p).unwrap(),
                KrausChannel::amplitude_damping(p).unwrap(),
            ] {
                assert!(ch.completeness_residual() < 1e-12);
                KrausChannel::new(ch.kraus_ops().to_vec()).unwrap();
            }
        }
    }

    #[test]
    fn parameter_range_checked() {
        assert!(KrausChannel::dephasing(-0.1).is_err());
        assert!(KrausChannel::bit_phase_flip(1.5).is_err());
        assert!(KrausChannel::amplitude_damping(f64::NAN).is_err());
    }

    #[test]
    fn non_trace_preserving_rejected() {
        let ops = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)];
        assert!(matches!(KrausChannel::new(ops), Err(Error::InvalidChannel(_))));
        assert!(KrausChannel::new(vec![]).is_err());
        let mixed = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)];
        assert!(KrausChannel::new(mixed).is_err());
    }

    #[test]
    fn dephasing_zero_is_identity_channel() {
        let ch = KrausChannel::dephasing(0.0).unwrap();
        let mut rng = crate::random::rng_from_seed(5);
        let rho = crate::random::random_density_matrix(&mut rng, 2);
        let out = apply_channel(&rho, &ch, &[2], 0).unwrap();
        assert!(out.max_abs_diff(&rho).unwrap() < 1e-15);
    }

    #[test]
    fn structure_flags() {
        let deph = KrausChannel::dephasing(0.25).unwrap();
        assert!(deph.is_unital() && deph.is_diag_or_antidiag());
        let bpf = KrausChannel::bit_phase_flip(0.3).unwrap();
        assert!(bpf.is_unital() && bpf.is_diag_or_antidiag());
        // √g|0><1| is itself anti-diagonal
        let ad = KrausChannel::amplitude_damping(0.3).unwrap();
        assert!(!ad.is_unital() && ad.is_diag_or_antidiag());
    }

    #[test]
    fn amplitude_damping_unitality_defect() {
        // Σ A A† = diag(1 + g, 1 - g)
        let ad = KrausChannel::amplitude_damping(0.3).unwrap();
        let s = sum_products(ad.kraus_ops(), |a| a * &a.adjoint());
        let expected = ComplexMatrix::from_diagonal(&[re(1.3), re(0.7)]);
        assert!(s.max_abs_diff(&expected).unwrap() < 1e-15);
        assert!((ad.unitality_residual() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn full_dephasing_of_plus() {
        let rho = ComplexMatrix::projector(&plus());
        let out = apply_channel(&rho, &KrausChannel::dephasing(0.5).unwrap(), &[2], 0).unwrap();
        let half = ComplexMatrix::identity(2).scale(re(0.5));
        assert!(out.max_abs_diff(&half).unwrap() < 1e-15);
    }

    #[test]
    fn dephasing_leaves_pointer_state() {
        let rho = ComplexMatrix::projector(&ComplexVector::basis(2, 0));
        for p in [0.0, 0.3, 1.0] {
            let out = apply_channel(&rho, &KrausChannel::dephasing(p).unwrap(), &[2], 0).unwrap();
            assert!(out.max_abs_diff(&rho).unwrap() < 1e-15);
        }
    }

    #[test]
    fn local_application_matches_kron_embedding() {
        let mut rng = crate::random::rng_from_seed(11);
        let rho = crate::random::random_density_matrix(&mut rng, 8);
        let ch = KrausChannel::amplitude_damping(0.4).unwrap();
        let out = apply_channel(&rho, &ch, &[2, 2, 2], 1).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let expected = ch.kraus_ops().iter().fold(ComplexMatrix::zeros(8, 8), |acc, a| {
            let big = kron(&kron(&i2, a), &i2);
            &acc + &(&(&big * &rho) * &big.adjoint())
        });
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = ComplexMatrix::identity(4).scale(re(0.25));
        let ch = KrausChannel::identity(3);
        assert!(apply_channel(&rho, &ch, &[2, 2], 0).is_err());
        assert!(apply_channel(&rho, &KrausChannel::identity(2), &[2, 3], 0).is_err());
        assert!(apply_channel(&rho, &KrausChannel::identity(2), &[2, 2], 2).is_err());
    }
}
