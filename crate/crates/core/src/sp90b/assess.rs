use serde::{Deserialize, Serialize};

use super::chi_square::{chi_square_tests, ChiSquareOutcome};
use super::dataset::{Dataset, RestartMatrix, RESTART_SIDE, SEQUENTIAL_SAMPLES};
use super::mcv::{min_entropy, McvEstimate};
use super::permutation::{
    permutation_test_suite, PermutationConfig, PermutationTestOutcome, DEFAULT_PERMUTATIONS,
};
use super::restart::{restart_tests, RestartOutcome};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssessmentConfig {
    pub permutations: usize,
    pub seed: u64,
    /// Reject non-conforming dataset sizes instead of flagging them.
    pub strict: bool,
    /// Also run the IID tests on the restart rows and columns.
    pub restart_iid: bool,
}

impl Default for AssessmentConfig {
    fn default() -> Self {
        Self {
            permutations: DEFAULT_PERMUTATIONS,
            seed: 0,
            strict: false,
            restart_iid: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IidResult {
    pub verdict: bool,
    pub permutation_tests: Vec<PermutationTestOutcome>,
    pub chi_square_tests: Vec<ChiSquareOutcome>,
}

impl IidResult {
    fn run(data: &Dataset, config: &PermutationConfig) -> Result<Self> {
        let permutation_tests = permutation_test_suite(data, config)?;
        let chi_square_tests = chi_square_tests(data)?;
        let verdict =
            permutation_tests.iter().all(|o| o.pass) && chi_square_tests.iter().all(|o| o.pass);
        Ok(Self {
            verdict,
            permutation_tests,
            chi_square_tests,
        })
    }

    /// Names of the failing statistics.
    pub fn failures(&self) -> Vec<&str> {
        self.permutation_tests
            .iter()
            .filter(|o| !o.pass)
            .map(|o| o.statistic_name.as_str())
            .chain(
                self.chi_square_tests
                    .iter()
                    .filter(|o| !o.pass)
                    .map(|o| o.name.as_str()),
            )
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSection {
    pub rows: usize,
    pub cols: usize,
    pub tests: RestartOutcome,
    pub iid_rows: Option<IidResult>,
    pub iid_columns: Option<IidResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub schema_version: u32,
    pub n: u8,
    pub samples: u64,
    pub seed: u64,
    pub permutations: usize,
    pub iid_verdict: bool,
    pub iid: IidResult,
    pub mcv_symbol: McvEstimate,
    pub mcv_bitstring: McvEstimate,
    /// Bits per symbol.
    pub h_symbol: f64,
    /// Bits per bit.
    pub h_bitstring: f64,
    /// Lowest estimate over all stages; absent when the IID verdict is false.
    pub min_entropy: Option<f64>,
    /// The sequential dataset has no sanity check.
    pub sequential_sanity_check: String,
    pub restart: Option<RestartSection>,
    pub status: String,
    pub conformant: bool,
    pub conformance_flags: Vec<String>,
}

impl AssessmentReport {
    /// True when every IID test passed and the restart checks, if run, passed.
    pub fn passed(&self) -> bool {
        self.iid_verdict
            && self
                .restart
                .as_ref()
                .map_or(true, |r| r.tests.sanity_pass && r.tests.validation_pass)
    }
}

fn conformance_flags(
    data: &Dataset,
    matrix: Option<&RestartMatrix>,
    config: &AssessmentConfig,
) -> Vec<String> {
    let mut flags = Vec::new();
    if data.len() < SEQUENTIAL_SAMPLES {
        flags.push(format!(
            "non-conformant: {} sequential samples, standard requires {SEQUENTIAL_SAMPLES}",
            data.len()
        ));
    }
    if config.permutations < DEFAULT_PERMUTATIONS {
        flags.push(format!(
            "non-conformant: {} permutations, standard requires {DEFAULT_PERMUTATIONS}",
            config.permutations
        ));
    }
    match matrix {
        Some(m) if !m.is_conformant() => flags.push(format!(
            "non-conformant: restart matrix is {}x{}, standard requires {RESTART_SIDE}x{RESTART_SIDE}",
            m.rows, m.cols
        )),
        None => flags.push("non-conformant: no restart matrix supplied".into()),
        _ => {}
    }
    flags
}

/// Full IID-track assessment of a sequential dataset and optional restart matrix.
pub fn assess(
    data: &Dataset,
    matrix: Option<&RestartMatrix>,
    config: &AssessmentConfig,
) -> Result<AssessmentReport> {
    if let Some(m) = matrix {
        m.validate()?;
        if m.n != data.n {
            return Err(Error::param(format!(
                "restart matrix has {}-bit symbols but the dataset has {}",
                m.n, data.n
            )));
        }
    }
    let flags = conformance_flags(data, matrix, config);
    if config.strict && !flags.is_empty() {
        return Err(Error::Validation(flags.join("; ")));
    }
    let perm = PermutationConfig {
        permutations: config.permutations,
        seed: config.seed,
    };
    let iid = IidResult::run(data, &perm)?;
    let sequential = min_entropy(data)?;

    let restart = match matrix {
        Some(m) => {
            let tests = restart_tests(m, sequential.min_entropy)?;
            let (iid_rows, iid_columns) = if config.restart_iid {
                (
                    Some(IidResult::run(&m.row_major(), &perm)?),
                    Some(IidResult::run(&m.column_major(), &perm)?),
                )
            } else {
                (None, None)
            };
            Some(RestartSection {
                rows: m.rows,
                cols: m.cols,
                tests,
                iid_rows,
                iid_columns,
            })
        }
        None => None,
    };

    let restart_iid_ok = restart.as_ref().map_or(true, |r| {
        r.iid_rows.as_ref().map_or(true, |i| i.verdict)
            && r.iid_columns.as_ref().map_or(true, |i| i.verdict)
    });
    let iid_verdict = iid.verdict && restart_iid_ok;
    let min_entropy = iid_verdict.then(|| {
        restart.as_ref().map_or(sequential.min_entropy, |r| {
            r.tests.min_entropy.min(sequential.min_entropy)
        })
    });
    let status = if !iid_verdict {
        "assessment incomplete"
    } else if restart.as_ref().is_some_and(|r| !r.tests.sanity_pass) {
        "restart sanity check failed"
    } else if restart.as_ref().is_some_and(|r| !r.tests.validation_pass) {
        "restart validation failed"
    } else {
        "complete"
    };

    Ok(AssessmentReport {
        schema_version: REPORT_SCHEMA_VERSION,
        n: data.n,
        samples: data.len() as u64,
        seed: config.seed,
        permutations: config.permutations,
        iid_verdict,
        iid,
        mcv_symbol: sequential.symbol,
        mcv_bitstring: sequential.bitstring,
        h_symbol: sequential.h_symbol,
        h_bitstring: sequential.h_bitstring,
        min_entropy,
        sequential_sanity_check: "NA".into(),
        restart,
        status: status.into(),
        conformant: flags.is_empty(),
        conformance_flags: flags,
    })
}
