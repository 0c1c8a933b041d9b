use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use metroq::equivalence::{
    classical_parallel_fisher, naive_iteration_sensitivity, wrap_phase, BRANCH_PROB_TOL,
    FIDELITY_TOL,
};
use metroq::fock::noon_fringe_zeros;
use metroq::random::{derive_seed, haar_unitary, random_matrix, rng_from_seed};
use metroq::states::{plus, product_state, sigma_x};
use metroq::*;
use rand::Rng;
use serde_json::json;

use crate::report::Record;
use crate::CliError;

type CliResult<T> = std::result::Result<T, CliError>;

/// Native thresholds are scaled by `tolerance / DEFAULT_TOLERANCE`.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

fn infidelity(cert: &ConversionCertificate) -> f64 {
    (1.0 - cert.min_fidelity).max(0.0)
}

fn sub_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    rng_from_seed(derive_seed(seed, &[stream]))
}

pub fn verify(n_max: usize, tolerance: f64, seed: u64) -> CliResult<Vec<Record>> {
    let scale = tolerance / DEFAULT_TOLERANCE;
    let h = Generator::qubit();
    let mut out = Vec::new();

    let mut rng = sub_rng(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let d = rng.random_range(2..=8);
        let (a, b, c) = (
            random_matrix(&mut rng, d),
            random_matrix(&mut rng, d),
            random_matrix(&mut rng, d),
        );
        worst = worst.max(vec_identity_residual(&a, &b, &c)?);
    }
    out.push(Record::bounded("vec_identity", worst, 1e-12 * scale).with("triples", 50));

    let mut rng = sub_rng(seed, 2);
    let (mut prob_err, mut infid): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let cert = convert_n2(&h, rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI))?;
        prob_err = prob_err.max(cert.max_prob_error);
        infid = infid.max(infidelity(&cert));
    }
    out.push(
        Record::new(
            "convert_n2",
            prob_err <= 1e-12 * scale && infid <= FIDELITY_TOL * scale,
        )
        .with("max_prob_error", prob_err)
        .with("min_fidelity", 1.0 - infid),
    );

    let mut rng = sub_rng(seed, 3);
    for n in 2..=n_max {
        let (mut prob_err, mut infid): (f64, f64) = (0.0, 0.0);
        for _ in 0..5 {
            let phis: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            let cert = convert_general_n(&h, &phis, rng.random_range(0.0..2.0 * PI))?;
            prob_err = prob_err.max(cert.max_prob_error);
            infid = infid.max(infidelity(&cert));
        }
        out.push(
            Record::new(
                format!("convert_general_n/{n}"),
                prob_err <= BRANCH_PROB_TOL * scale && infid <= FIDELITY_TOL * scale,
            )
            .with("branches", 1u64 << (n - 1))
            .with("max_prob_error", prob_err)
            .with("min_fidelity", 1.0 - infid),
        );
    }

    for basis in [CorrelationBasis::Computational, CorrelationBasis::Hadamard] {
        let (mut to_mixed, mut drift): (f64, f64) = (0.0, 0.0);
        for i in 0..50 {
            let r = counterexample(basis, 2.0 * PI * i as f64 / 50.0)?;
            to_mixed = to_mixed.max(r.distance_to_mixed);
            drift = drift.max(r.phi_dependence);
        }
        out.push(
            Record::bounded(
                format!("counterexample/{}", basis.name()),
                to_mixed.max(drift),
                1e-12 * scale,
            )
            .with("distance_to_mixed", to_mixed)
            .with("phi_dependence", drift),
        );
    }

    let mut gap: f64 = 0.0;
    for i in 0..50 {
        let phi = 2.0 * PI * (i as f64 + 0.5) / 50.0;
        gap = gap.max(
            (unaveraged_counterexample_fisher(CorrelationBasis::Hadamard, phi)?
                - classical_parallel_fisher(2, phi)?)
            .abs(),
        );
    }
    out.push(Record::bounded("recorded_mixture_fisher", gap, 1e-9 * scale));

    let mut rng = sub_rng(seed, 4);
    let (mut misclassified, mut lambda_err) = (0u64, 0.0f64);
    for i in 0..100 {
        let (e, useful, lambda) = if i % 2 == 0 {
            (haar_unitary(&mut rng, 2), false, 0.0)
        } else {
            let (a, l) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI));
            let diag = [C64::from_polar(1.0, a), C64::from_polar(1.0, a + l)];
            (ComplexMatrix::from_diagonal(&diag), true, l)
        };
        let got = useful_entanglement_check(&e, &h)?;
        if got.is_useful != useful {
            misclassified += 1;
        } else if let Some(l) = got.lambda_hat {
            lambda_err = lambda_err.max(wrap_phase(l - lambda).abs());
        }
    }
    out.push(
        Record::new(
            "useful_entanglement",
            misclassified == 0 && lambda_err <= 1e-10 * scale,
        )
        .with("misclassified", misclassified)
        .with("max_lambda_error", lambda_err),
    );

    let mut rng = sub_rng(seed, 5);
    let mut infid: f64 = 0.0;
    for n in 1..=n_max.min(6) {
        for trial in 0..5 {
            let w = haar_unitary(&mut rng, 2);
            let v = if trial == 0 { sigma_x() } else { haar_unitary(&mut rng, 2) };
            let cert = generalized_strategy_certificate(&w, &v, &h, rng.random_range(0.0..2.0 * PI), n)?;
            infid = infid.max(infidelity(&cert));
        }
    }
    let blind = naive_iteration_sensitivity(&ComplexMatrix::identity(2), &sigma_x(), &h, 2)?;
    out.push(
        Record::new(
            "generalized_strategy",
            infid <= FIDELITY_TOL * scale && blind <= 1e-12 * scale,
        )
        .with("min_fidelity", 1.0 - infid)
        .with("naive_sigma_x_sensitivity", blind),
    );
    Ok(out)
}

pub struct ScalingOutput {
    pub records: Vec<Record>,
    pub csv: String,
}

pub const CSV_HEADER: &str = "strategy,N,nu,rounds,empirical_rmse,crb,seed";

/// Accepted deviation of a fitted slope from its expected value.
const SLOPE_WINDOW: f64 = 0.15;

pub fn scaling(
    kinds: &[StrategyKind],
    n_values: &[usize],
    nu: u64,
    rounds: usize,
    seed: u64,
) -> CliResult<ScalingOutput> {
    let mut csv = format!("{CSV_HEADER}\n");
    let mut records = Vec::new();
    for kind in kinds {
        let spec = StrategySpec::simple(kind.clone(), 1)?;
        let report = scaling_experiment(&ExperimentConfig::new(spec, n_values.to_vec(), nu, rounds, seed))?;
        for row in &report.rows {
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                row.strategy, row.n, row.nu, row.rounds, row.empirical_rmse, row.crb, seed
            )
            .expect("writing to a String");
            records.push(
                Record::info(format!("rmse/{}/{}", row.strategy, row.n))
                    .with("phi_true", row.phi_true)
                    .with("empirical_rmse", row.empirical_rmse)
                    .with("rmse_stderr", row.rmse_stderr)
                    .with("crb", row.crb)
                    .with("time_advantage", row.time_advantage),
            );
        }
        let expected = match kind {
            StrategyKind::ClassicalParallel => -0.5,
            _ => -1.0,
        };
        records.push(
            Record::new(
                format!("slope/{}", report.strategy),
                (report.fitted_slope - expected).abs() <= SLOPE_WINDOW,
            )
            .with("fitted_slope", report.fitted_slope)
            .with("slope_stderr", report.slope_stderr)
            .with("expected", expected),
        );
    }
    Ok(ScalingOutput { records, csv })
}

pub fn noise(channel: &KrausChannel, name: &str) -> CliResult<Vec<Record>> {
    let red = effective_sequential_channel(channel, channel)?;
    let unital = channel.is_unital();
    Ok(vec![
        Record::info(format!("channel/{name}"))
            .with("kraus_ops", channel.kraus_ops().len())
            .with("unital", unital)
            .with("diag_or_antidiag", channel.is_diag_or_antidiag())
            .with("valid_beyond_n2", noisy_conversion_valid_beyond_n2(channel, channel)?),
        Record::bounded("noise_identity_residual", red.identity_residual, 1e-12),
        Record::new("trace_preserving_iff_unital", red.is_trace_preserving == unital)
            .with("trace_preserving", red.is_trace_preserving)
            .with("completeness_residual", red.completeness_residual),
    ])
}

pub fn frequency(gamma: f64, n_values: &[usize], nu: u64) -> CliResult<Vec<Record>> {
    let closed_form = std::f64::consts::E * gamma / (nu as f64).sqrt();
    let mut out = Vec::new();
    let mut bounds = Vec::new();
    for &n in n_values {
        let opt = optimal_frequency_bound(n, gamma, nu)?;
        bounds.push(opt.bound_star);
        out.push(
            Record::bounded(
                format!("optimum/{n}"),
                (opt.bound_star / closed_form - 1.0).abs(),
                1e-6,
            )
            .with("t_star", opt.t_star)
            .with("bound_star", opt.bound_star)
            .with("closed_form", closed_form),
        );
    }
    let lo = bounds.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = bounds.iter().cloned().fold(0.0, f64::max);
    out.push(Record::bounded("n_independence", (hi - lo) / lo, 1e-6));
    Ok(out)
}

pub fn noon(n: usize) -> CliResult<Vec<Record>> {
    let cert = noon_equivalence_certificate(n)?;
    let zero_err = noon_fringe_zeros(n)?
        .iter()
        .enumerate()
        .map(|(k, z)| (z - PI * (2 * k + 1) as f64 / (2 * n) as f64).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        Record::bounded("fringe_equivalence", cert.max_deviation(), 1e-12)
            .with("noon_vs_qubit", cert.noon_vs_qubit)
            .with("noon_vs_multipass", cert.noon_vs_multipass)
            .with("n0_vs_ghz", cert.n0_vs_ghz),
        Record::bounded("fringe_zeros", zero_err, 1e-9).with("zeros", n),
    ])
}

pub fn fisher(n_values: &[usize], nu: u64) -> CliResult<Vec<Record>> {
    let h = Generator::qubit();
    let mut out = Vec::new();
    for &n in n_values {
        let nf = n as f64;
        let total = h.total(n)?;
        let qfi_ghz = qfi_pure(&ghz_state(n, 0.0)?, &total)?;
        let qfi_product = qfi_pure(&product_state(&plus(), n)?, &total)?;
        let cfi = cfi_binary(n, PI / (2.0 * nf))?;
        let crb_of = |kind| -> CliResult<f64> {
            Ok(crb(&StrategySpec::simple(kind, n)?, nu)?.bound)
        };
        let err = (qfi_ghz - nf * nf)
            .abs()
            .max((qfi_product - nf).abs())
            .max((cfi - nf * nf).abs());
        out.push(
            Record::bounded(format!("fisher/{n}"), err, 1e-9)
                .with("qfi_entangled", qfi_ghz)
                .with("qfi_product", qfi_product)
                .with("cfi", cfi)
                .with("crb_sequential", crb_of(StrategyKind::Sequential)?)
                .with("crb_entangled", crb_of(StrategyKind::EntangledParallel)?)
                .with("crb_classical", crb_of(StrategyKind::ClassicalParallel)?),
        );
    }
    Ok(out)
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn config_echo(pairs: &[(&str, serde_json::Value)]) -> serde_json::Value {
    let mut m = serde_json::Map::new();
    for (k, v) in pairs {
        m.insert((*k).to_string(), v.clone());
    }
    json!(m)
}
