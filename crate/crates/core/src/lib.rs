//! Simulation and numerical verification of entanglement-assisted quantum
//! metrology.
//!
//! The crate executes the construction that turns a parallel strategy with
//! GHZ-entangled probes into a sequential strategy with a single probe, and
//! checks each step numerically:
//!
//! * [`linalg`]: dense complex matrices, `vec`/`unvec`, partial traces and
//!   subsystem projections.
//! * [`states`] and [`channel`]: generators, probe states and Kraus channels.
//! * [`strategy`]: the sequential, classical and entangled strategies, and
//!   seeded Monte Carlo phase estimation.
//! * [`equivalence`]: conversion certificates, the classical-correlation
//!   counterexamples, the noise-map reduction and generalized boxes.
//! * [`information`]: Fisher information and Cramér–Rao bounds.
//! * [`fock`]: N0 and NOON states of indistinguishable bosonic probes.
//!
//! ```
//! use metroq::{convert_general_n, Generator};
//!
//! let cert = convert_general_n(&Generator::qubit(), &[0.3, 1.1, -0.4, 2.0], 0.0)?;
//! assert_eq!(cert.branches.len(), 8);
//! assert!(cert.passes());
//! # Ok::<(), metroq::Error>(())
//! ```

pub mod channel;
pub mod equivalence;
pub mod error;
pub mod fock;
pub mod information;
pub mod linalg;
pub mod random;
pub mod states;
pub mod strategy;

pub use channel::{apply_channel, KrausChannel};
pub use equivalence::{
    convert_general_n, convert_n2, counterexample, effective_sequential_channel,
    generalized_strategy_certificate, noisy_conversion_valid_beyond_n2,
    unaveraged_counterexample_fisher, useful_entanglement_check, BranchRecord,
    ConversionCertificate, CounterexampleResult, SequentialReduction, UsefulEntanglement,
};
pub use error::{Error, Result};
pub use fock::{
    n0_state, noon_equivalence_certificate, noon_state, FockVector, NoonCertificate,
    SymmetrizationMap,
};
pub use information::{
    cfi_binary, crb, frequency_bound_dephasing, optimal_frequency_bound, qfi_pure,
    time_advantage, FrequencyOptimum, PrecisionBound,
};
pub use linalg::{
    fidelity_up_to_phase, kron, partial_trace, project_subsystem, trace_distance, unvec, vec,
    vec_identity_residual, ComplexMatrix, ComplexVector, Projection, C64,
};
pub use states::{
    classical_corr_state, ghz_state, u_phi, CorrelationBasis, Generator, StrategyKind,
    StrategySpec,
};
pub use strategy::{
    coincidence_probability, estimate_phase, evolve_parallel_entangled, evolve_sequential,
    run_trials, scaling_experiment, ExperimentConfig, ScalingReport, ScalingRow, TrialRecord,
};
