//! Parallel-to-sequential conversion of entangled estimation strategies.
//!
//! The N-probe GHZ strategy is reduced to a single probe by measuring probes
//! `2..N` in the `{|+>, |->}` basis. Every branch of that measurement is
//! enumerated and the conditional state of probe 1 is compared, up to global
//! phase, with the state a single probe would reach by passing through all
//! the boxes in sequence.

use std::f64::consts::PI;

use crate::channel::{kraus_dim, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{
    apply_product, fidelity_up_to_phase, kron, partial_inner, trace_distance, vec,
    ComplexMatrix, ComplexVector, C64, PREDICATE_TOL, ZERO_PROBABILITY,
};
use crate::states::{
    classical_corr_state, ghz_state, minus, phased_plus, plus, pm_basis, u_phi, CorrelationBasis,
    Generator,
};
use crate::strategy::corrected_box;

/// Fidelity deficit accepted as "equal up to global phase".
pub const FIDELITY_TOL: f64 = 1e-12;
/// Allowed deviation of a branch probability from uniform.
pub const BRANCH_PROB_TOL: f64 = 1e-10;

/// One branch of the `±` measurement cascade on probes `2..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    /// Outcomes on probes 2, 3, ..., N, e.g. `"+-+"`.
    pub outcome: String,
    pub probability: f64,
    /// Fidelity of probe 1's conditional state with the sequential reference.
    pub fidelity: f64,
}

impl BranchRecord {
    /// Number of `-` outcomes modulo 2.
    pub fn parity(&self) -> usize {
        self.outcome.chars().filter(|&c| c == '-').count() % 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConversionCertificate {
    pub n_probes: usize,
    pub branches: Vec<BranchRecord>,
    pub min_fidelity: f64,
    /// Largest `|p_branch - 2^{-(N-1)}|`.
    pub max_prob_error: f64,
}

impl ConversionCertificate {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn passes(&self) -> bool {
        self.passes_with(FIDELITY_TOL, BRANCH_PROB_TOL)
    }

    pub fn passes_with(&self, fidelity_tol: f64, prob_tol: f64) -> bool {
        1.0 - self.min_fidelity <= fidelity_tol && self.max_prob_error <= prob_tol
    }
}

/// Measures qubits `2..n` of `state` in the `±` basis, branch by branch, and
/// compares probe 1 with `reference(parity)`.
fn measurement_cascade(
    state: &ComplexVector,
    n: usize,
    reference: impl Fn(usize) -> Result<ComplexVector>,
) -> Result<ConversionCertificate> {
    if state.dim() != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "state of dim {} is not an {n}-qubit register",
            state.dim()
        )));
    }
    let refs = [reference(0)?, reference(1)?];
    let expected = 0.5f64.powi(n as i32 - 1);
    let mut branches = Vec::with_capacity(1 << (n - 1));
    let mut outcomes = Vec::with_capacity(n);
    descend(state.clone(), n, &mut outcomes, &refs, &mut branches)?;

    let min_fidelity = branches.iter().map(|b| b.fidelity).fold(1.0, f64::min);
    let max_prob_error = branches
        .iter()
        .map(|b| (b.probability - expected).abs())
        .fold(0.0, f64::max);
    Ok(ConversionCertificate {
        n_probes: n,
        branches,
        min_fidelity,
        max_prob_error,
    })
}

// `residual` is the unnormalized state of the first `remaining` qubits;
// outcomes are pushed for the last qubit first.
fn descend(
    residual: ComplexVector,
    remaining: usize,
    outcomes: &mut Vec<char>,
    refs: &[ComplexVector; 2],
    out: &mut Vec<BranchRecord>,
) -> Result<()> {
    if remaining == 1 {
        let probability = residual.norm().powi(2);
        let outcome: String = outcomes.iter().rev().collect();
        let parity = outcome.chars().filter(|&c| c == '-').count() % 2;
        let fidelity = if probability > ZERO_PROBABILITY {
            fidelity_up_to_phase(&residual, &refs[parity])?
        } else {
            0.0
        };
        out.push(BranchRecord {
            outcome,
            probability,
            fidelity,
        });
        return Ok(());
    }
    let dims = vec![2; remaining];
    for (sign, basis_vec) in ['+', '-'].into_iter().zip(pm_basis()) {
        let next = partial_inner(&residual, &dims, remaining - 1, &basis_vec)?;
        outcomes.push(sign);
        descend(next, remaining - 1, outcomes, refs, out)?;
        outcomes.pop();
    }
    Ok(())
}

/// `(U_φ ⊗ U_φ')|𝟙>/√2`, probe 2 measured in `±`, certified against
/// `U_φ U_φ' |±>`.
pub fn convert_n2(h: &Generator, phi: f64, phi_prime: f64) -> Result<ConversionCertificate> {
    let hq = h.qubit_restriction();
    let (u, u_prime) = (u_phi(&hq, phi), u_phi(&hq, phi_prime));
    let bell = vec(&ComplexMatrix::identity(2))?.normalized()?;
    let state = apply_product(&bell, &[u.clone(), u_prime.clone()])?;
    let seq = u.matmul(&u_prime)?;
    measurement_cascade(&state, 2, |parity| {
        seq.apply(&if parity == 0 { plus() } else { minus() })
    })
}

/// `⊗_j U_{φ_j}` on the GHZ state with phase `lambda`, probes `2..N`
/// measured in `±`, certified against `e^{i(Σφ_j)H}(|0> ± e^{iλ}|1>)/√2`.
pub fn convert_general_n(h: &Generator, phis: &[f64], lambda: f64) -> Result<ConversionCertificate> {
    let n = phis.len();
    if n < 2 {
        return Err(Error::OutOfRange(format!(
            "conversion needs at least 2 probes, got {n}"
        )));
    }
    let hq = h.qubit_restriction();
    let boxes: Vec<ComplexMatrix> = phis.iter().map(|&p| u_phi(&hq, p)).collect();
    let state = apply_product(&ghz_state(n, lambda)?, &boxes)?;
    let total = u_phi(&hq, phis.iter().sum());
    measurement_cascade(&state, n, |parity| {
        total.apply(&phased_plus(lambda + PI * parity as f64))
    })
}

/// Restriction of `U_a ⊗ U_b` to `span{|00>, |11>}`, with the largest
/// amplitude it sends outside that subspace.
pub fn pair_restriction(ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    if ua.rows() != 2 || ub.rows() != 2 || !ua.is_square() || !ub.is_square() {
        return Err(Error::DimensionMismatch("pair restriction needs 2x2 factors".into()));
    }
    let big = kron(ua, ub);
    let keep = [0usize, 3];
    let mut restricted = ComplexMatrix::zeros(2, 2);
    for (a, &r) in keep.iter().enumerate() {
        for (b, &c) in keep.iter().enumerate() {
            restricted[(a, b)] = big[(r, c)];
        }
    }
    let leakage = [1usize, 2]
        .iter()
        .flat_map(|&r| keep.iter().map(move |&c| (r, c)))
        .map(|(r, c)| big[(r, c)].norm())
        .fold(0.0, f64::max);
    Ok((restricted, leakage))
}

/// Outcome of the classical-correlation counterexample.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleResult {
    /// Probe-1 state averaged over the mixture and the `±` outcomes on probe 2.
    pub averaged: ComplexMatrix,
    /// Trace distance to the same computation at `φ = 0`.
    pub phi_dependence: f64,
    /// Trace distance to `I/2`.
    pub distance_to_mixed: f64,
}

fn averaged_probe_one(basis: CorrelationBasis, h: &Generator, phi: f64) -> Result<ComplexMatrix> {
    let u = u_phi(h, phi);
    let mut avg = ComplexMatrix::zeros(2, 2);
    // classical_corr_state(basis) = ½|aa><aa| + ½|bb><bb|
    for s in basis.states() {
        let evolved = apply_product(&s.kron(&s), &[u.clone(), u.clone()])?;
        for outcome in pm_basis() {
            let cond = partial_inner(&evolved, &[2, 2], 1, &outcome)?;
            avg = &avg + &ComplexMatrix::projector(&cond).scale(C64::new(0.5, 0.0));
        }
    }
    Ok(avg)
}

/// Evolves the classically correlated pair by `U_φ ⊗ U_φ`, measures probe 2
/// in `±`, and averages probe 1 over outcomes and mixture components.
pub fn counterexample(basis: CorrelationBasis, phi: f64) -> Result<CounterexampleResult> {
    let h = Generator::qubit();
    let averaged = averaged_probe_one(basis, &h, phi)?;
    let reference = averaged_probe_one(basis, &h, 0.0)?;
    let mixed = ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0));
    Ok(CounterexampleResult {
        phi_dependence: trace_distance(&averaged, &reference)?,
        distance_to_mixed: trace_distance(&averaged, &mixed)?,
        averaged,
    })
}

/// The evolved classically correlated two-probe density matrix.
pub fn evolved_corr_state(basis: CorrelationBasis, phi: f64) -> ComplexMatrix {
    let u = u_phi(&Generator::qubit(), phi);
    let uu = kron(&u, &u);
    &(&uu * &classical_corr_state(basis)) * &uu.adjoint()
}

/// Fisher information about `φ` when the mixture label is kept: outcomes are
/// (component, probe-1 result, probe-2 result), each probe measured in `±`.
/// Derivatives are exact, from `d/dφ U_φ = iH U_φ`.
pub fn unaveraged_counterexample_fisher(basis: CorrelationBasis, phi: f64) -> Result<f64> {
    let h = Generator::qubit();
    let u = u_phi(&h, phi);
    let du = &ComplexMatrix::from_diagonal(&[C64::new(0.0, 0.0), C64::new(0.0, 1.0)]) * &u;
    let components = basis.states();
    let weight = 1.0 / components.len() as f64;
    let mut fisher = 0.0;
    for s in &components {
        let pair = s.kron(s);
        let psi = apply_product(&pair, &[u.clone(), u.clone()])?;
        // d/dφ (U ⊗ U) = (dU ⊗ U) + (U ⊗ dU)
        let d1 = apply_product(&pair, &[du.clone(), u.clone()])?;
        let d2 = apply_product(&pair, &[u.clone(), du.clone()])?;
        for a in pm_basis() {
            for b in pm_basis() {
                let ab = a.kron(&b);
                let amp = ab.inner(&psi)?;
                let damp = ab.inner(&d1)? + ab.inner(&d2)?;
                let p = weight * amp.norm_sqr();
                let dp = weight * 2.0 * (amp.conj() * damp).re;
                if p > ZERO_PROBABILITY {
                    fisher += dp * dp / p;
                }
            }
        }
    }
    Ok(fisher)
}

/// Fisher information of a `±` measurement on the averaged probe-1 state,
/// by central differences.
pub fn averaged_counterexample_fisher(basis: CorrelationBasis, phi: f64) -> Result<f64> {
    const STEP: f64 = 1e-5;
    let probs = |x: f64| -> Result<Vec<f64>> {
        let avg = counterexample(basis, x)?.averaged;
        pm_basis()
            .iter()
            .map(|s| Ok(s.inner(&avg.apply(s)?)?.re.max(0.0)))
            .collect()
    };
    let (p0, pp, pm) = (probs(phi)?, probs(phi + STEP)?, probs(phi - STEP)?);
    Ok(p0
        .iter()
        .zip(pp.iter().zip(&pm))
        .filter(|(p, _)| **p > ZERO_PROBABILITY)
        .map(|(p, (a, b))| ((a - b) / (2.0 * STEP)).powi(2) / p)
        .sum())
}

/// Fisher information of `n` unentangled probes with one box each.
pub fn classical_parallel_fisher(n: usize, phi: f64) -> Result<f64> {
    Ok(n as f64 * crate::information::cfi_binary(1, phi)?)
}

/// Kraus family `{A_k B_jᵀ}` acting on probe 1 alone.
#[derive(Debug, Clone, PartialEq)]
pub struct SequentialReduction {
    pub kraus_ops: Vec<ComplexMatrix>,
    /// Max-abs residual between both sides of the two-probe channel identity.
    pub identity_residual: f64,
    pub completeness_residual: f64,
    pub is_trace_preserving: bool,
}

impl SequentialReduction {
    pub fn channel(&self) -> Result<KrausChannel> {
        KrausChannel::new(self.kraus_ops.clone())
    }
}

/// Rewrites the channel pair `(A ⊗ B)` acting on `|𝟙>` as the single-probe
/// family `{A_k B_jᵀ}` and checks
/// `Σ (A_k⊗B_j)|𝟙><𝟙|(A_k⊗B_j)† = Σ (A_kB_jᵀ⊗I)|𝟙><𝟙|(A_kB_jᵀ⊗I)†`.
pub fn effective_sequential_channel(cha: &KrausChannel, chb: &KrausChannel) -> Result<SequentialReduction> {
    effective_sequential_ops(cha.kraus_ops(), chb.kraus_ops())
}

/// As [`effective_sequential_channel`] for arbitrary operator families.
pub fn effective_sequential_ops(a_ops: &[ComplexMatrix], b_ops: &[ComplexMatrix]) -> Result<SequentialReduction> {
    let d = kraus_dim(a_ops)?;
    if kraus_dim(b_ops)? != d {
        return Err(Error::DimensionMismatch(format!(
            "channels of dims {d} and {}",
            b_ops[0].rows()
        )));
    }
    let id = ComplexMatrix::identity(d);
    let ket = vec(&id)?;
    let mut lhs = ComplexMatrix::zeros(d * d, d * d);
    let mut rhs = ComplexMatrix::zeros(d * d, d * d);
    let mut kraus_ops = Vec::with_capacity(a_ops.len() * b_ops.len());
    for a in a_ops {
        for b in b_ops {
            let l = kron(a, b).apply(&ket)?;
            lhs = &lhs + &ComplexMatrix::projector(&l);
            let k = a.matmul(&b.transpose())?;
            let r = kron(&k, &id).apply(&ket)?;
            rhs = &rhs + &ComplexMatrix::projector(&r);
            kraus_ops.push(k);
        }
    }
    let completeness_residual = crate::channel::completeness_residual(&kraus_ops);
    Ok(SequentialReduction {
        identity_residual: lhs.max_abs_diff(&rhs)?,
        is_trace_preserving: completeness_residual < PREDICATE_TOL,
        completeness_residual,
        kraus_ops,
    })
}

/// Whether every `A_k ⊗ B_j` is diagonal or anti-diagonal, which keeps
/// `span{|00>, |11>}` invariant for the N-probe induction.
pub fn noisy_conversion_valid_beyond_n2(cha: &KrausChannel, chb: &KrausChannel) -> Result<bool> {
    if cha.dim() != chb.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channels of dims {} and {}",
            cha.dim(),
            chb.dim()
        )));
    }
    Ok(cha.kraus_ops().iter().all(|a| {
        chb.kraus_ops().iter().all(|b| {
            let ab = kron(a, b);
            ab.is_diagonal() || ab.is_antidiagonal()
        })
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsefulEntanglement {
    pub is_useful: bool,
    /// Relative phase of `|Ψ_2> = |00> + e^{iλ}|11>`, in `(-π, π]`.
    pub lambda_hat: Option<f64>,
}

const USEFUL_GRID: usize = 50;

/// Tests whether the two-probe state `|E>` reduces to a sequential strategy,
/// i.e. `e^{iφH} E e^{iφH}|±> ∝ e^{2iφH}(|0> ± e^{iλ}|1>)` for one fixed `λ`
/// at every grid point.
pub fn useful_entanglement_check(e: &ComplexMatrix, h: &Generator) -> Result<UsefulEntanglement> {
    if e.rows() != 2 || e.cols() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "expected a 2x2 operator, got {}x{}",
            e.rows(),
            e.cols()
        )));
    }
    let not_useful = UsefulEntanglement {
        is_useful: false,
        lambda_hat: None,
    };
    let smax = e.singular_values()[0];
    if smax.is_nan() || smax <= 0.0 {
        return Ok(not_useful);
    }
    let e = e.scale(C64::new(1.0 / smax, 0.0));
    let hq = h.qubit_restriction();

    // Undo the sequential evolution; what remains must be |0> ± e^{iλ}|1>.
    let residual = |phi: f64, sign: &ComplexVector| -> Result<ComplexVector> {
        let u = u_phi(&hq, phi);
        let v = u.matmul(&e)?.matmul(&u)?.apply(sign)?;
        u_phi(&hq, -2.0 * phi).apply(&v)
    };

    let first = residual(0.0, &plus())?;
    if first[0].norm() < PREDICATE_TOL || first[1].norm() < PREDICATE_TOL {
        return Ok(not_useful);
    }
    let lambda = wrap_phase((first[1] / first[0]).arg());

    for i in 0..USEFUL_GRID {
        let phi = PI * i as f64 / (USEFUL_GRID - 1) as f64;
        for (k, sign) in pm_basis().iter().enumerate() {
            let w = residual(phi, sign)?;
            let target = phased_plus(lambda + PI * k as f64);
            if !equal_up_to_phase(&w, &target)? {
                return Ok(not_useful);
            }
        }
    }
    Ok(UsefulEntanglement {
        is_useful: true,
        lambda_hat: Some(lambda),
    })
}

fn equal_up_to_phase(w: &ComplexVector, target: &ComplexVector) -> Result<bool> {
    if w.norm() < PREDICATE_TOL {
        return Ok(false);
    }
    let w = w.normalized()?;
    let overlap = w.inner(target)?;
    if overlap.norm() < PREDICATE_TOL {
        return Ok(false);
    }
    let aligned = w.scale(overlap / overlap.norm());
    Ok(aligned.max_abs_diff(target)? < PREDICATE_TOL)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

fn check_twists(w: &ComplexMatrix, v: &ComplexMatrix) -> Result<()> {
    for (name, m) in [("W", w), ("V", v)] {
        if m.rows() != 2 || m.cols() != 2 || !m.is_unitary() {
            return Err(Error::NotUnitary(format!("{name} must be a 2x2 unitary")));
        }
    }
    Ok(())
}

/// Entangled strategy for boxes `U'_φ = W e^{iφH} V`: each probe passes
/// through `W† U'_φ V†`, and the cascade is certified against
/// `(W† U'_φ V†)^n |±>`.
pub fn generalized_strategy_certificate(
    w: &ComplexMatrix,
    v: &ComplexMatrix,
    h: &Generator,
    phi: f64,
    n: usize,
) -> Result<ConversionCertificate> {
    check_twists(w, v)?;
    let boxed = corrected_box(w, v, h, phi)?;
    let state = apply_product(&ghz_state(n, 0.0)?, &vec![boxed.clone(); n])?;
    let seq = boxed.pow(n)?;
    measurement_cascade(&state, n, |parity| {
        seq.apply(&if parity == 0 { plus() } else { minus() })
    })
}

fn iteration_sensitivity(op_at: impl Fn(f64) -> Result<ComplexMatrix>, n: usize) -> Result<f64> {
    let start = plus();
    let at_zero = op_at(0.0)?.pow(n)?.apply(&start)?;
    let mut worst: f64 = 0.0;
    for i in 0..USEFUL_GRID {
        let phi = 2.0 * PI * i as f64 / USEFUL_GRID as f64;
        let out = op_at(phi)?.pow(n)?.apply(&start)?;
        worst = worst.max(1.0 - fidelity_up_to_phase(&out, &at_zero)?);
    }
    Ok(worst)
}

/// Largest infidelity, over a grid of `φ`, between `U'^n_φ|+>` and
/// `U'^n_0|+>`; zero when naive iteration of the box is blind to `φ`.
pub fn naive_iteration_sensitivity(w: &ComplexMatrix, v: &ComplexMatrix, h: &Generator, n: usize) -> Result<f64> {
    check_twists(w, v)?;
    let hq = h.qubit_restriction();
    iteration_sensitivity(|phi| w.matmul(&u_phi(&hq, phi))?.matmul(v), n)
}

/// Same measure for the corrected box `W† U'_φ V†`.
pub fn corrected_iteration_sensitivity(w: &ComplexMatrix, v: &ComplexMatrix, h: &Generator, n: usize) -> Result<f64> {
    check_twists(w, v)?;
    iteration_sensitivity(|phi| corrected_box(w, v, h, phi), n)
}
