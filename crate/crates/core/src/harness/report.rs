//! Report serialization.

use serde::Serialize;

use super::experiment::ExperimentReport;
use super::HarnessError;

pub fn to_json<T: Serialize>(value: &T) -> Result<String, HarnessError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Report(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    algorithm: &'a str,
    class: &'a str,
    ordering: &'a str,
    k: usize,
    n: usize,
    l: usize,
    beta: f64,
    trials: usize,
    successes: usize,
    rate: f64,
    bound: f64,
    sigma: f64,
    threshold: f64,
    passed: bool,
    l_below_k: bool,
    seed: u64,
}

/// One summary row per report (per-trial seeds and timings are left out).
pub fn to_csv(reports: &[ExperimentReport]) -> Result<String, HarnessError> {
    let err = |e: csv::Error| HarnessError::Report(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(CsvRow {
            algorithm: &r.algorithm,
            class: r.spec.class.as_str(),
            ordering: &r.ordering,
            k: r.k,
            n: r.n,
            l: r.l,
            beta: r.beta,
            trials: r.trials,
            successes: r.successes,
            rate: r.rate,
            bound: r.bound,
            sigma: r.sigma,
            threshold: r.threshold,
            passed: r.passed,
            l_below_k: r.l_below_k,
            seed: r.spec.seed,
        })
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Report(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Report(e.to_string()))
}
