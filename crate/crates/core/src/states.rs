//! Generators, phase unitaries and probe states.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{phase, ComplexMatrix, ComplexVector, C64, ONE, ZERO};

/// Largest register (in qubits) the dense constructors will build.
pub const MAX_QUBITS: usize = 20;

/// Hermitian generator `H`, stored as its diagonal in the eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    eigenvalues: Vec<f64>,
    min_index: usize,
    max_index: usize,
}

impl Generator {
    /// Picks the first minimal and first maximal eigenvalue as the
    /// designated extremal eigenstates.
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.len() < 2 {
            return Err(Error::InvalidGenerator(
                "at least two eigenvalues are required".into(),
            ));
        }
        if eigenvalues.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidGenerator("eigenvalues must be finite".into()));
        }
        let mut min_index = 0;
        let mut max_index = 0;
        for (i, &e) in eigenvalues.iter().enumerate() {
            if e < eigenvalues[min_index] {
                min_index = i;
            }
            if e > eigenvalues[max_index] {
                max_index = i;
            }
        }
        Self::with_extremes(eigenvalues, min_index, max_index)
    }

    pub fn with_extremes(eigenvalues: Vec<f64>, min_index: usize, max_index: usize) -> Result<Self> {
        let n = eigenvalues.len();
        if min_index >= n || max_index >= n {
            return Err(Error::InvalidGenerator(format!(
                "extremal indices ({min_index}, {max_index}) out of range for {n} eigenvalues"
            )));
        }
        let (lo, hi) = (eigenvalues[min_index], eigenvalues[max_index]);
        if eigenvalues.iter().any(|&e| e < lo || e > hi) {
            return Err(Error::InvalidGenerator(
                "designated indices are not the extremal eigenvalues".into(),
            ));
        }
        if min_index == max_index || hi <= lo {
            return Err(Error::InvalidGenerator(
                "generator has no spread between its extremal eigenvalues".into(),
            ));
        }
        Ok(Self {
            eigenvalues,
            min_index,
            max_index,
        })
    }

    /// `H = diag(0, 1)`.
    pub fn qubit() -> Self {
        Self {
            eigenvalues: vec![0.0, 1.0],
            min_index: 0,
            max_index: 1,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_index(&self) -> usize {
        self.min_index
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// `λ_max - λ_min`.
    pub fn gap(&self) -> f64 {
        self.eigenvalues[self.max_index] - self.eigenvalues[self.min_index]
    }

    /// The two-level generator on `span{|min>, |max>}`.
    pub fn qubit_restriction(&self) -> Self {
        Self {
            eigenvalues: vec![
                self.eigenvalues[self.min_index],
                self.eigenvalues[self.max_index],
            ],
            min_index: 0,
            max_index: 1,
        }
    }

    /// `c · H`, for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::OutOfRange(format!("generator scale {c} must be positive")));
        }
        Ok(Self {
            eigenvalues: self.eigenvalues.iter().map(|e| e * c).collect(),
            ..self.clone()
        })
    }

    /// `Σ_j H^{(j)}` acting on `n` copies of the probe.
    pub fn total(&self, n: usize) -> Result<Self> {
        let d = self.dim();
        check_register(d, n)?;
        let mut eig = vec![0.0];
        for _ in 0..n {
            eig = eig
                .iter()
                .flat_map(|&acc| self.eigenvalues.iter().map(move |&e| acc + e))
                .collect();
        }
        let all_index = |i: usize| (0..n).fold(0, |acc, _| acc * d + i);
        Ok(Self {
            eigenvalues: eig,
            min_index: all_index(self.min_index),
            max_index: all_index(self.max_index),
        })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let diag: Vec<C64> = self.eigenvalues.iter().map(|&e| C64::new(e, 0.0)).collect();
        ComplexMatrix::from_diagonal(&diag)
    }
}

impl Default for Generator {
    fn default() -> Self {
        Self::qubit()
    }
}

pub(crate) fn check_register(d: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange("probe count must be at least 1".into()));
    }
    let bits = (d as f64).log2() * n as f64;
    if bits > MAX_QUBITS as f64 + 1e-9 {
        return Err(Error::OutOfRange(format!(
            "register of {n} probes of dim {d} exceeds the {MAX_QUBITS}-qubit dense limit"
        )));
    }
    Ok(())
}

/// `U_φ = e^{iφH}`, diagonal in the eigenbasis of `h`.
pub fn u_phi(h: &Generator, phi: f64) -> ComplexMatrix {
    let diag: Vec<C64> = h.eigenvalues.iter().map(|&e| phase(phi * e)).collect();
    ComplexMatrix::from_diagonal(&diag)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2")
}

pub fn sigma_y() -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    ComplexMatrix::new(2, 2, vec![ZERO, -i, i, ZERO]).expect("2x2")
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[ONE, -ONE])
}

/// `(|0> + e^{iλ}|1>)/√2`.
pub fn phased_plus(lambda: f64) -> ComplexVector {
    ComplexVector::new(vec![
        C64::new(FRAC_1_SQRT_2, 0.0),
        phase(lambda) * FRAC_1_SQRT_2,
    ])
    .expect("dim 2")
}

pub fn plus() -> ComplexVector {
    phased_plus(0.0)
}

pub fn minus() -> ComplexVector {
    phased_plus(std::f64::consts::PI)
}

/// The `{|+>, |->}` basis, in that order.
pub fn pm_basis() -> [ComplexVector; 2] {
    [plus(), minus()]
}

/// `(|0>^⊗n + e^{iλ}|1>^⊗n)/√2` on `n` qubits.
pub fn ghz_state(n: usize, lambda: f64) -> Result<ComplexVector> {
    check_register(2, n)?;
    let dim = 1usize << n;
    let mut data = vec![ZERO; dim];
    data[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    data[dim - 1] += phase(lambda) * FRAC_1_SQRT_2;
    ComplexVector::new(data)
}

/// `|ψ>^⊗n`.
pub fn product_state(psi: &ComplexVector, n: usize) -> Result<ComplexVector> {
    check_register(psi.dim(), n)?;
    Ok((1..n).fold(psi.clone(), |acc, _| acc.kron(psi)))
}

/// Basis in which a classically correlated two-probe state is correlated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorrelationBasis {
    /// `(|00><00| + |11><11|)/2`
    Computational,
    /// `(|++><++| + |--><--|)/2`
    Hadamard,
}

impl CorrelationBasis {
    pub fn states(self) -> [ComplexVector; 2] {
        match self {
            Self::Computational => [ComplexVector::basis(2, 0), ComplexVector::basis(2, 1)],
            Self::Hadamard => pm_basis(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Computational => "computational",
            Self::Hadamard => "hadamard",
        }
    }
}

/// Equal mixture of the two perfectly correlated product states in `basis`.
pub fn classical_corr_state(basis: CorrelationBasis) -> ComplexMatrix {
    let [a, b] = basis.states();
    let aa = ComplexMatrix::projector(&a.kron(&a));
    let bb = ComplexMatrix::projector(&b.kron(&b));
    (&aa + &bb).scale(C64::new(0.5, 0.0))
}

/// The estimation strategies being compared.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategyKind {
    /// One probe through `N` boxes.
    Sequential,
    /// `N` unentangled probes, one box each, results pooled.
    ClassicalParallel,
    /// `N` probes in a GHZ state, one box each.
    EntangledParallel,
    /// Entangled strategy for boxes `W e^{iφH} V`, corrected by `W†·V†`.
    GeneralizedEntangled { w: ComplexMatrix, v: ComplexMatrix },
}

impl StrategyKind {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Sequential => "sequential",
            Self::ClassicalParallel => "classical",
            Self::EntangledParallel => "entangled",
            Self::GeneralizedEntangled { .. } => "generalized",
        }
    }

    /// Stable small integer used in seed derivation.
    pub(crate) fn ordinal(&self) -> u64 {
        match self {
            Self::Sequential => 0,
            Self::ClassicalParallel => 1,
            Self::EntangledParallel => 2,
            Self::GeneralizedEntangled { .. } => 3,
        }
    }
}

/// One strategy instance: kind, probe count, generator and GHZ phase.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategySpec {
    kind: StrategyKind,
    n_probes: usize,
    generator: Generator,
    lambda: f64,
}

impl StrategySpec {
    pub fn new(kind: StrategyKind, n_probes: usize, generator: Generator, lambda: f64) -> Result<Self> {
        if n_probes == 0 {
            return Err(Error::OutOfRange("n_probes must be at least 1".into()));
        }
        if let StrategyKind::GeneralizedEntangled { w, v } = &kind {
            for (name, m) in [("W", w), ("V", v)] {
                if m.rows() != 2 || m.cols() != 2 || !m.is_unitary() {
                    return Err(Error::NotUnitary(format!("{name} must be a 2x2 unitary")));
                }
            }
        }
        Ok(Self {
            kind,
            n_probes,
            generator,
            lambda,
        })
    }

    /// Qubit generator, `λ = 0`.
    pub fn simple(kind: StrategyKind, n_probes: usize) -> Result<Self> {
        Self::new(kind, n_probes, Generator::qubit(), 0.0)
    }

    pub fn with_probes(&self, n_probes: usize) -> Result<Self> {
        Self::new(self.kind.clone(), n_probes, self.generator.clone(), self.lambda)
    }

    pub fn kind(&self) -> &StrategyKind {
        &self.kind
    }

    pub fn n_probes(&self) -> usize {
        self.n_probes
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tag(&self) -> &'static str {
        self.kind.tag()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity_up_to_phase, partial_trace, vec};
    use std::f64::consts::PI;

    #[test]
    fn generator_validation() {
        assert!(Generator::new(vec![1.0]).is_err());
        assert!(Generator::new(vec![2.0, 2.0]).is_err());
        assert!(Generator::with_extremes(vec![0.0, 1.0, 2.0], 0, 1).is_err());
        let g = Generator::new(vec![0.5, -1.0, 3.0]).unwrap();
        assert_eq!((g.min_index(), g.max_index()), (1, 2));
        assert_eq!(g.gap(), 4.0);
        assert_eq!(g.qubit_restriction().eigenvalues(), &[-1.0, 3.0]);
    }

    #[test]
    fn total_generator_sums_eigenvalues() {
        let t = Generator::qubit().total(3).unwrap();
        assert_eq!(t.eigenvalues(), &[0.0, 1.0, 1.0, 2.0, 1.0, 2.0, 2.0, 3.0]);
        assert_eq!((t.min_index(), t.max_index()), (0, 7));
        assert!(Generator::qubit().total(0).is_err());
        assert!(Generator::qubit().total(MAX_QUBITS + 1).is_err());
    }

    #[test]
    fn u_phi_examples() {
        let h = Generator::qubit();
        assert_eq!(u_phi(&h, 0.0), ComplexMatrix::identity(2));
        let half = u_phi(&h, PI);
        assert!(half.max_abs_diff(&sigma_z()).unwrap() < 1e-15);
        assert!(u_phi(&h, 0.3).is_unitary());
    }

    #[test]
    fn u_phi_power_on_plus() {
        let h = Generator::qubit();
        let (phi, n) = (0.41, 7);
        let out = u_phi(&h, phi).pow(n).unwrap().apply(&plus()).unwrap();
        let expected = phased_plus(n as f64 * phi);
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn affine_shift_only_changes_global_phase() {
        let h = Generator::qubit();
        let shifted = Generator::new(vec![2.5, 3.5]).unwrap();
        let phi = 0.77;
        let a = u_phi(&h, phi).apply(&plus()).unwrap();
        let b = u_phi(&shifted, phi).apply(&plus()).unwrap();
        assert!((fidelity_up_to_phase(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!(a.max_abs_diff(&b).unwrap() > 0.1);
    }

    #[test]
    fn ghz_examples() {
        assert!(ghz_state(1, 0.0).unwrap().max_abs_diff(&plus()).unwrap() < 1e-15);
        let bell = vec(&ComplexMatrix::identity(2)).unwrap().normalized().unwrap();
        assert!(ghz_state(2, 0.0).unwrap().max_abs_diff(&bell).unwrap() < 1e-15);
        let g3 = ghz_state(3, PI).unwrap();
        assert!((g3[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g3[7].re + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(ghz_state(0, 0.0).is_err());
    }

    #[test]
    fn classical_corr_spectral_decomposition() {
        // computational = ½|Φ_I><Φ_I| + ½|Φ_Z><Φ_Z|, hadamard likewise with σ_x
        for (basis, partner) in [
            (CorrelationBasis::Computational, sigma_z()),
            (CorrelationBasis::Hadamard, sigma_x()),
        ] {
            let rho = classical_corr_state(basis);
            let a = vec(&ComplexMatrix::identity(2)).unwrap().normalized().unwrap();
            let b = vec(&partner).unwrap().normalized().unwrap();
            let mix = (&ComplexMatrix::projector(&a) + &ComplexMatrix::projector(&b))
                .scale(C64::new(0.5, 0.0));
            assert!(rho.max_abs_diff(&mix).unwrap() < 1e-15, "{basis:?}");
            assert!((rho.trace().re - 1.0).abs() < 1e-15);
            assert!((rho.purity() - 0.5).abs() < 1e-15);
            let ev = rho.hermitian_eigenvalues().unwrap();
            assert_eq!(ev.iter().filter(|&&e| e > 1e-12).count(), 2);
        }
    }

    #[test]
    fn classical_corr_marginals_are_maximally_mixed() {
        let half = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
        for basis in [CorrelationBasis::Computational, CorrelationBasis::Hadamard] {
            let rho = classical_corr_state(basis);
            for k in 0..2 {
                let red = partial_trace(&rho, &[2, 2], &[k]).unwrap();
                assert!(red.max_abs_diff(&half).unwrap() < 1e-15);
            }
        }
    }

    #[test]
    fn strategy_spec_validation() {
        assert!(StrategySpec::simple(StrategyKind::Sequential, 0).is_err());
        let bad = StrategyKind::GeneralizedEntangled {
            w: ComplexMatrix::identity(2).scale(C64::new(2.0, 0.0)),
            v: ComplexMatrix::identity(2),
        };
        assert!(matches!(StrategySpec::simple(bad, 2), Err(Error::NotUnitary(_))));
        let ok = StrategyKind::GeneralizedEntangled {
            w: ComplexMatrix::identity(2),
            v: sigma_x(),
        };
        assert_eq!(StrategySpec::simple(ok, 3).unwrap().tag(), "generalized");
    }
}
