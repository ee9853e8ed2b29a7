//! Run the benchmark cases of a table and compare against the references.

use std::path::Path;

use rayon::prelude::*;

use crate::case::{run_case, CaseResult};
use crate::error::Result;
use crate::laminate::ShearModel;
use crate::postproc::{fmt_f64, write_csv_records};
use crate::reference::{table_cases, BenchCase, ReferenceEntry};

pub const REPORT_HEADER: [&str; 10] = [
    "case_id",
    "quantity",
    "source",
    "computed",
    "reference",
    "relative_error",
    "tolerance",
    "magnitude_only",
    "pass",
    "error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub entry: ReferenceEntry,
    /// `None` when the case failed to run.
    pub computed: Option<f64>,
    pub error: Option<String>,
}

impl ReportRow {
    pub fn relative_error(&self) -> Option<f64> {
        self.computed.map(|c| self.entry.relative_error(c))
    }

    pub fn passed(&self) -> bool {
        self.computed.is_some_and(|c| self.entry.passes(c))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub rows: Vec<ReportRow>,
    /// Per-case results in case order; failed cases are absent.
    pub results: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(ReportRow::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.passed())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let e = &r.entry;
                vec![
                    e.case_id.clone(),
                    e.quantity.clone(),
                    e.source.clone(),
                    r.computed.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(e.value),
                    r.relative_error().map(fmt_f64).unwrap_or_default(),
                    fmt_f64(e.tolerance),
                    e.magnitude_only.to_string(),
                    r.passed().to_string(),
                    r.error.clone().unwrap_or_default(),
                ]
            })
            .collect();
        write_csv_records(path, &REPORT_HEADER, &rows)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions<'a> {
    /// Restrict to one shear model.
    pub model: Option<ShearModel>,
    /// Directory for `report.csv`.
    pub out: Option<&'a Path>,
    pub parallel: bool,
}

/// Run every case of `table` (a table id or `"all"`).
pub fn run_suite(table: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let cases: Vec<BenchCase> = table_cases(table)?
        .into_iter()
        .filter(|c| opts.model.is_none_or(|m| c.config.shear_model == m))
        .collect();
    let run = |c: &BenchCase| run_case(&c.config, None);
    let outcomes: Vec<Result<CaseResult>> = if opts.parallel {
        cases.par_iter().map(run).collect()
    } else {
        cases.iter().map(run).collect()
    };

    let mut report = SuiteReport {
        rows: Vec::new(),
        results: Vec::new(),
    };
    for (case, outcome) in cases.into_iter().zip(outcomes) {
        match outcome {
            Ok(result) => {
                for entry in case.references {
                    let computed = result.get(&entry.quantity);
                    let error = computed
                        .is_none()
                        .then(|| format!("quantity `{}` not produced", entry.quantity));
                    report.rows.push(ReportRow { entry, computed, error });
                }
                report.results.push(result);
            }
            Err(err) => {
                let msg = err.to_string();
                report.rows.extend(case.references.into_iter().map(|entry| ReportRow {
                    entry,
                    computed: None,
                    error: Some(msg.clone()),
                }));
            }
        }
    }
    if let Some(dir) = opts.out {
        report.write_csv(&dir.join("report.csv"))?;
    }
    Ok(report)
}
