//! Rate sweep: Kolmogorov distance per n, log-log fit, slope assertion.
//! Exact enumeration when the atom budget allows, Monte Carlo otherwise
//! (recorded per row), with a signal-to-noise guard on the fit.

use cltlab_core::kolmogorov::{
    exact_distance, mc_distance, normal_cdf, weighted_sum_law, KolmogorovError, KolmogorovEstimate,
    Method,
};

use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, write_file, CsvTable};
use crate::ratefit::{fit_rate, FitError, RateFit};
use crate::scenario::{standard_metadata, RunError, RunSummary};

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Exact => "exact",
        Method::MonteCarlo => "monte_carlo",
    }
}

/// Slope acceptance window: explicit config wins, otherwise the defaults
/// for the two named coefficient families.
fn slope_window(config: &ExperimentConfig) -> (Option<f64>, Option<f64>) {
    if config.slope_min.is_some() || config.slope_max.is_some() {
        return (config.slope_min, config.slope_max);
    }
    if config.theta.is_uniform() {
        (Some(-0.6), Some(-0.4))
    } else if config.theta.is_theta0() {
        (None, Some(-0.8))
    } else {
        (None, None)
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunSummary, RunError> {
    if config.ns.len() < 3 {
        return Err(RunError::Config(crate::config::ConfigError::Invalid(
            "rate scenario needs at least 3 n values to fit".into(),
        )));
    }
    let law = config.law.resolve()?;
    let mut summary = RunSummary::default();
    let mut estimates: Vec<(usize, KolmogorovEstimate)> = Vec::new();

    for &n in &config.ns {
        let theta = config.theta.resolve(n)?;
        let est = match exact_distance(&theta, &law, config.budget) {
            Ok(e) => e,
            Err(KolmogorovError::BudgetExceeded { .. }) => {
                mc_distance(&theta, &law, config.mc_samples, config.alpha, config.seed)?
            }
            Err(other) => return Err(other.into()),
        };
        if config.export_cdf && est.method == Method::Exact {
            let file = export_cdf(config, n, &law)?;
            summary.files.push(file);
        }
        estimates.push((n, est));
    }

    // signal-to-noise guard: refuse to fit through noise-dominated points
    for (n, est) in &estimates {
        if est.method == Method::MonteCarlo && est.confidence_radius > 0.25 * est.value {
            return Err(RunError::Budget(format!(
                "confidence radius {} exceeds a quarter of the distance {} at n = {n}; \
                 raise mc_samples (or the atom budget, to enable exact mode)",
                fmt_f64(est.confidence_radius),
                fmt_f64(est.value)
            )));
        }
    }

    let points: Vec<(usize, f64)> = estimates.iter().map(|(n, e)| (*n, e.value)).collect();
    let fit = fit_rate(&points).map_err(|e| match e {
        FitError::NonPositiveDistance { n, distance } => RunError::Assertion(format!(
            "cannot fit a rate through distance {distance} at n = {n}"
        )),
        other => RunError::Internal(other.to_string()),
    })?;

    let mut table = CsvTable::new(&["n", "distance", "method", "confidence_radius", "samples"]);
    for (n, est) in &estimates {
        table.row(&[
            n.to_string(),
            fmt_f64(est.value),
            method_name(est.method).to_string(),
            fmt_f64(est.confidence_radius),
            est.sample_count.to_string(),
        ]);
    }
    standard_metadata(&mut table, config);
    table.meta("fit_slope", fmt_f64(fit.slope));
    table.meta("fit_intercept", fmt_f64(fit.intercept));
    table.meta("fit_r_squared", fmt_f64(fit.r_squared));
    summary
        .files
        .push(write_file(&config.out, "rate.csv", &table.render())?);
    summary.files.push(write_file(
        &config.out,
        "rate_fit.json",
        &format!("{}\n", serde_json::to_string_pretty(&fit).unwrap()),
    )?);

    summary.lines.push(format!(
        "rate: {} points, slope {} (r^2 {})",
        points.len(),
        fmt_f64(fit.slope),
        fmt_f64(fit.r_squared)
    ));

    assert_slope(&fit, config)?;
    Ok(summary)
}

fn assert_slope(fit: &RateFit, config: &ExperimentConfig) -> Result<(), RunError> {
    let (lo, hi) = slope_window(config);
    if let Some(lo) = lo {
        if fit.slope < lo {
            return Err(RunError::Assertion(format!(
                "fitted slope {} below window minimum {lo}",
                fmt_f64(fit.slope)
            )));
        }
    }
    if let Some(hi) = hi {
        if fit.slope > hi {
            return Err(RunError::Assertion(format!(
                "fitted slope {} above window maximum {hi}",
                fmt_f64(fit.slope)
            )));
        }
    }
    Ok(())
}

/// Export the exact CDF table (t, F, Phi, gap) for one n.
fn export_cdf(
    config: &ExperimentConfig,
    n: usize,
    law: &cltlab_core::laws::DiscreteLaw,
) -> Result<std::path::PathBuf, RunError> {
    let theta = config.theta.resolve(n)?;
    let sum_law = weighted_sum_law(&theta, law, config.budget)?;
    let mut table = CsvTable::new(&["t", "F", "Phi", "gap"]);
    let mut cdf = cltlab_core::sum::NeumaierSum::new();
    for atom in sum_law.atoms() {
        cdf.add(atom.weight);
        let phi = normal_cdf(atom.value);
        table.row(&[
            fmt_f64(atom.value),
            fmt_f64(cdf.value()),
            fmt_f64(phi),
            fmt_f64(cdf.value() - phi),
        ]);
    }
    standard_metadata(&mut table, config);
    Ok(write_file(
        &config.out,
        &format!("cdf_n{n}.csv"),
        &table.render(),
    )?)
}
