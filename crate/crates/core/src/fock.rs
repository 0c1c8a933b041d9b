//! Bosonic probes in the occupation-number basis: single-mode N0 states,
//! two-mode NOON states, and their correspondence with the qubit GHZ
//! picture.
//!
//! Two-mode states live in the fixed-total-photon subspace `n_a + n_b = N`,
//! indexed by `n_a`. The two-mode generator `a†a - b†b` has eigenvalue gap
//! `2N` on the NOON pair, twice the gap of `N` qubits under `diag(0, 1)`, so
//! a NOON fringe at `φ` matches the qubit fringe at `2φ`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{phase, ComplexVector, C64, ZERO};
use crate::states::{ghz_state, plus, Generator};
use crate::strategy::{coincidence_probability, evolve_parallel_entangled, evolve_sequential};

/// Largest photon number handled by the equivalence certificates.
pub const MAX_PHOTONS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockModes {
    /// One mode, occupations `0..=cutoff`.
    Single { cutoff: usize },
    /// Two modes with `n_a + n_b = total`, indexed by `n_a`.
    Two { total: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    modes: FockModes,
    amplitudes: Vec<C64>,
}

impl FockVector {
    pub fn new(modes: FockModes, amplitudes: Vec<C64>) -> Result<Self> {
        let expected = match modes {
            FockModes::Single { cutoff } => cutoff + 1,
            FockModes::Two { total } => total + 1,
        };
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {modes:?}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            modes,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn modes(&self) -> FockModes {
        self.modes
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Amplitude of `|k>` (single mode) or `|k, N-k>` (two modes).
    pub fn amplitude(&self, k: usize) -> C64 {
        self.amplitudes.get(k).copied().unwrap_or(ZERO)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.modes, other.modes
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// `(|∅> + |n>)/√2` with cutoff `n`.
pub fn n0_state(n: usize) -> Result<FockVector> {
    n0_state_with_cutoff(n, n)
}

pub fn n0_state_with_cutoff(n: usize, cutoff: usize) -> Result<FockVector> {
    if n == 0 || cutoff < n {
        return Err(Error::OutOfRange(format!(
            "N0 state needs 1 <= n <= cutoff, got n = {n}, cutoff = {cutoff}"
        )));
    }
    let mut amps = vec![ZERO; cutoff + 1];
    amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[n] = C64::new(FRAC_1_SQRT_2, 0.0);
    FockVector::new(FockModes::Single { cutoff }, amps)
}

/// `e^{iφ a†a}`.
pub fn evolve_single_mode(state: &FockVector, phi: f64) -> Result<FockVector> {
    let FockModes::Single { .. } = state.modes else {
        return Err(Error::DimensionMismatch("single-mode evolution of a two-mode state".into()));
    };
    Ok(FockVector {
        modes: state.modes,
        amplitudes: state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, &a)| a * phase(k as f64 * phi))
            .collect(),
    })
}

/// `(|n,∅> + |∅,n>)/√2`.
pub fn noon_state(n: usize) -> Result<FockVector> {
    if n == 0 {
        return Err(Error::OutOfRange("NOON state needs n >= 1".into()));
    }
    let mut amps = vec![ZERO; n + 1];
    amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[n] = C64::new(FRAC_1_SQRT_2, 0.0);
    FockVector::new(FockModes::Two { total: n }, amps)
}

/// `e^{iφ(a†a - b†b)}`: `|k, N-k>` picks up `e^{i(2k-N)φ}`.
pub fn evolve_two_mode(state: &FockVector, phi: f64) -> Result<FockVector> {
    let FockModes::Two { total } = state.modes else {
        return Err(Error::DimensionMismatch("two-mode evolution of a single-mode state".into()));
    };
    Ok(FockVector {
        modes: state.modes,
        amplitudes: state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, &a)| a * phase((2.0 * k as f64 - total as f64) * phi))
            .collect(),
    })
}

/// `<NOON| e^{iφ(a†a - b†b)} |NOON> = cos(nφ)`, real by symmetry.
pub fn noon_fringe_amplitude(n: usize, phi: f64) -> Result<f64> {
    let s = noon_state(n)?;
    Ok(s.inner(&evolve_two_mode(&s, phi)?)?.re)
}

/// Coincidence probability of the NOON state, `cos²(nφ)`.
pub fn noon_fringe(n: usize, phi: f64) -> Result<f64> {
    let s = noon_state(n)?;
    Ok(s.inner(&evolve_two_mode(&s, phi)?)?.norm_sqr())
}

/// Coincidence probability of the N0 state, `cos²(nφ/2)`.
pub fn n0_fringe(n: usize, phi: f64) -> Result<f64> {
    let s = n0_state(n)?;
    Ok(s.inner(&evolve_single_mode(&s, phi)?)?.norm_sqr())
}

/// Zeros of the NOON fringe in `(0, π)`, located by bisection of the signed
/// amplitude on the brackets `[kπ/n, (k+1)π/n]`.
pub fn noon_fringe_zeros(n: usize) -> Result<Vec<f64>> {
    let f = |x: f64| noon_fringe_amplitude(n, x);
    (0..n)
        .map(|k| {
            let mut lo = PI * k as f64 / n as f64;
            let mut hi = PI * (k + 1) as f64 / n as f64;
            let mut f_lo = f(lo)?;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if hi - lo < 1e-15 {
                    break;
                }
                let f_mid = f(mid)?;
                if f_mid == 0.0 {
                    return Ok(mid);
                }
                if (f_mid > 0.0) == (f_lo > 0.0) {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        })
        .collect()
}

/// Which Fock picture the qubit GHZ subspace is mapped to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrizedPicture {
    /// `|0>^n ↔ |∅>`, `|1>^n ↔ |n>`.
    SingleMode,
    /// `|0>^n ↔ |∅,n>`, `|1>^n ↔ |n,∅>`; each mode symmetrized separately.
    TwoMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    QubitToFock,
    FockToQubit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pub from: String,
    pub to: String,
}

/// Identification of the extremal qubit product states with Fock states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetrizationMap {
    n: usize,
    picture: SymmetrizedPicture,
}

impl SymmetrizationMap {
    pub fn new(n: usize, picture: SymmetrizedPicture) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("photon number must be at least 1".into()));
        }
        crate::states::check_register(2, n)?;
        Ok(Self { n, picture })
    }

    fn modes(&self) -> FockModes {
        match self.picture {
            SymmetrizedPicture::SingleMode => FockModes::Single { cutoff: self.n },
            SymmetrizedPicture::TwoMode => FockModes::Two { total: self.n },
        }
    }

    /// Fock indices of the images of `|0>^n` and `|1>^n`.
    fn fock_indices(&self) -> [usize; 2] {
        // single mode: occupation; two modes: n_a
        [0, self.n]
    }

    fn labels(&self) -> [(String, String); 2] {
        let n = self.n;
        let fock = match self.picture {
            SymmetrizedPicture::SingleMode => ["|∅>".to_string(), format!("|{n}>")],
            SymmetrizedPicture::TwoMode => [format!("|∅,{n}>"), format!("|{n},∅>")],
        };
        let [f0, f1] = fock;
        [(format!("|0>^{n}"), f0), (format!("|1>^{n}"), f1)]
    }

    pub fn table(&self, direction: Direction) -> Vec<Correspondence> {
        self.labels()
            .into_iter()
            .map(|(q, f)| match direction {
                Direction::QubitToFock => Correspondence { from: q, to: f },
                Direction::FockToQubit => Correspondence { from: f, to: q },
            })
            .collect()
    }

    /// Maps a qubit state supported on `span{|0>^n, |1>^n}` to Fock space.
    pub fn to_fock(&self, psi: &ComplexVector) -> Result<FockVector> {
        let dim = 1usize << self.n;
        if psi.dim() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {dim}-dim qubit register, got {}",
                psi.dim()
            )));
        }
        let outside = psi
            .entries()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 0 && *i != dim - 1)
            .map(|(_, a)| a.norm())
            .fold(0.0, f64::max);
        if outside > 1e-12 {
            return Err(Error::OutOfRange(format!(
                "state has weight {outside:.3e} outside span{{|0>^n, |1>^n}}"
            )));
        }
        let [i0, i1] = self.fock_indices();
        let mut amps = vec![ZERO; self.n + 1];
        amps[i0] = psi[0];
        amps[i1] = psi[dim - 1];
        FockVector::new(self.modes(), amps)
    }

    /// Inverse of [`Self::to_fock`] on the two extremal Fock states.
    pub fn to_qubits(&self, state: &FockVector) -> Result<ComplexVector> {
        if state.modes != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} is not in the {:?} picture",
                state.modes, self.picture
            )));
        }
        let [i0, i1] = self.fock_indices();
        let outside = state
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != i0 && *i != i1)
            .map(|(_, a)| a.norm())
            .fold(0.0, f64::max);
        if outside > 1e-12 {
            return Err(Error::OutOfRange(format!(
                "state has weight {outside:.3e} outside the extremal Fock states"
            )));
        }
        let dim = 1usize << self.n;
        let mut data = vec![ZERO; dim];
        data[0] = state.amplitudes[i0];
        data[dim - 1] = state.amplitudes[i1];
        ComplexVector::new(data)
    }
}

/// Largest fringe deviations over a 100-point grid of `φ ∈ [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoonCertificate {
    pub n: usize,
    /// NOON at `φ` vs entangled qubits at `2φ`.
    pub noon_vs_qubit: f64,
    /// NOON at `φ` vs one probe through `n` boxes at `2φ`.
    pub noon_vs_multipass: f64,
    /// N0 at `φ` vs entangled qubits at `φ`.
    pub n0_vs_ghz: f64,
}

impl NoonCertificate {
    pub fn max_deviation(&self) -> f64 {
        self.noon_vs_qubit.max(self.noon_vs_multipass).max(self.n0_vs_ghz)
    }
}

const FRINGE_GRID: usize = 100;

pub fn noon_equivalence_certificate(n: usize) -> Result<NoonCertificate> {
    if n == 0 || n > MAX_PHOTONS {
        return Err(Error::OutOfRange(format!(
            "photon number must be in 1..={MAX_PHOTONS}, got {n}"
        )));
    }
    let h = Generator::qubit();
    let ghz = ghz_state(n, 0.0)?;
    let mut cert = NoonCertificate {
        n,
        noon_vs_qubit: 0.0,
        noon_vs_multipass: 0.0,
        n0_vs_ghz: 0.0,
    };
    for i in 0..FRINGE_GRID {
        let phi = PI * i as f64 / (FRINGE_GRID - 1) as f64;
        let noon = noon_fringe(n, phi)?;
        let qubit = coincidence_probability(&evolve_parallel_entangled(&h, 2.0 * phi, n, 0.0)?, &ghz)?;
        let multipass =
            coincidence_probability(&evolve_sequential(&h, 2.0 * phi, n, &plus())?, &plus())?;
        let ghz_at_phi = coincidence_probability(&evolve_parallel_entangled(&h, phi, n, 0.0)?, &ghz)?;
        cert.noon_vs_qubit = cert.noon_vs_qubit.max((noon - qubit).abs());
        cert.noon_vs_multipass = cert.noon_vs_multipass.max((noon - multipass).abs());
        cert.n0_vs_ghz = cert.n0_vs_ghz.max((n0_fringe(n, phi)? - ghz_at_phi).abs());
    }
    Ok(cert)
}
