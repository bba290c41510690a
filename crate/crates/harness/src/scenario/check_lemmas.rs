//! Check-lemmas scenario: run the theorem-oracle suite, print one line per
//! check, fail the run if any check fails.

use crate::checks;
use crate::config::ExperimentConfig;
use crate::output::{write_file, CsvTable};
use crate::scenario::{standard_metadata, RunError, RunSummary};

pub fn run(config: &ExperimentConfig) -> Result<RunSummary, RunError> {
    let results = checks::run_all(config.seed);

    let mut summary = RunSummary::default();
    let mut table = CsvTable::new(&["check", "passed", "detail"]);
    let mut failures = Vec::new();

    for r in &results {
        table.row(&[
            r.name.to_string(),
            r.passed.to_string(),
            // commas in details would break the three-column layout
            r.detail.replace(',', ";"),
        ]);
        summary.lines.push(format!(
            "[{}] {}: {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        ));
        if !r.passed {
            failures.push(r.name);
        }
    }

    standard_metadata(&mut table, config);
    summary.files.push(write_file(
        &config.out,
        "check_lemmas.csv",
        &table.render(),
    )?);

    if !failures.is_empty() {
        return Err(RunError::Assertion(format!(
            "{} check(s) failed: {}",
            failures.len(),
            failures.join(", ")
        )));
    }
    Ok(summary)
}
