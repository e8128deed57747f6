//! Simulator-to-report composition.
//!
//! Long symbol streams are produced segment by segment: each segment is an
//! independent simulation of `device.duration` seconds with a seed derived
//! from the base seed and the segment index, so memory stays bounded by one
//! segment's trace.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::device::{simulate_trace, DeviceParams};
use crate::extraction::{extract, ExtractionParams, ResolvedExtraction, SymbolStream};
use crate::formats::{write_json, write_restart, write_stream};
use crate::manifest::RunManifest;
use crate::sp90b::{assess, AssessmentConfig, AssessmentReport, Dataset, RestartMatrix};
use crate::stats::{stats_report, StatsReport};
use crate::{Error, Result};

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;
const SEGMENT_BATCH: usize = 8;
/// Segments tolerated without a single symbol before giving up.
const MAX_BARREN_SEGMENTS: u64 = 64;

/// Seed of segment `index` under base seed `seed`.
pub fn segment_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index.wrapping_mul(SEED_STRIDE))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub segments: u64,
    pub samples: u64,
    pub events: u64,
    pub dropped_blocks: u64,
    pub empty_blocks: u64,
    /// Settings resolved on the first segment.
    pub extraction: ResolvedExtraction,
}

fn run_segment(
    device: &DeviceParams,
    extraction: &ExtractionParams,
    index: u64,
) -> Result<(SymbolStream, ResolvedExtraction, u64)> {
    let params = DeviceParams {
        seed: segment_seed(device.seed, index),
        ..device.clone()
    };
    let trace = simulate_trace(&params)?;
    let (stream, resolved) = extract(&trace, extraction)?;
    Ok((stream, resolved, trace.len() as u64))
}

/// Simulates and extracts segments until `target` symbols are collected;
/// the stream is truncated to exactly `target`.
pub fn simulate_symbols(
    device: &DeviceParams,
    extraction: &ExtractionParams,
    target: usize,
) -> Result<(SymbolStream, SimulationSummary)> {
    device.validate()?;
    let mut symbols = Vec::with_capacity(target);
    let mut summary: Option<SimulationSummary> = None;
    let mut next = 0u64;
    while symbols.len() < target {
        let batch: Vec<_> = (next..next + SEGMENT_BATCH as u64)
            .into_par_iter()
            .map(|i| run_segment(device, extraction, i))
            .collect::<Result<_>>()?;
        next += SEGMENT_BATCH as u64;
        for (stream, resolved, samples) in batch {
            if symbols.len() >= target {
                break;
            }
            let s = summary.get_or_insert_with(|| SimulationSummary {
                segments: 0,
                samples: 0,
                events: 0,
                dropped_blocks: 0,
                empty_blocks: 0,
                extraction: resolved.clone(),
            });
            s.segments += 1;
            s.samples += samples;
            s.events += resolved.events as u64;
            s.dropped_blocks += stream.dropped_blocks;
            s.empty_blocks += stream.empty_blocks;
            symbols.extend_from_slice(&stream.symbols);
        }
        if symbols.is_empty() && next >= MAX_BARREN_SEGMENTS {
            return Err(Error::Estimation(format!(
                "no symbols extracted from {next} simulated segments; check rates and extraction settings"
            )));
        }
    }
    symbols.truncate(target);
    let summary = summary.expect("at least one segment ran");
    let mut stream = SymbolStream::new(extraction.n, symbols)?;
    stream.dropped_blocks = summary.dropped_blocks;
    stream.empty_blocks = summary.empty_blocks;
    Ok((stream, summary))
}

/// One row per simulated restart: each row is a fresh simulation whose seed
/// is derived from the base seed and the row index.
pub fn simulate_restart_matrix(
    device: &DeviceParams,
    extraction: &ExtractionParams,
    rows: usize,
    cols: usize,
) -> Result<RestartMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::param(
            "restart matrix needs at least one row and column",
        ));
    }
    let base = segment_seed(device.seed, u64::MAX);
    let data: Vec<Vec<u16>> = (0..rows as u64)
        .into_par_iter()
        .map(|r| {
            let params = DeviceParams {
                seed: segment_seed(base, r),
                ..device.clone()
            };
            simulate_symbols(&params, extraction, cols).map(|(s, _)| s.symbols)
        })
        .collect::<Result<_>>()?;
    RestartMatrix::new(rows, cols, extraction.n, data.concat())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub device: DeviceParams,
    pub extraction: ExtractionParams,
    /// Sequential symbols to collect.
    pub symbols: usize,
    pub assessment: AssessmentConfig,
    /// Restart matrix dimensions; zero rows skips the restart stage.
    pub restart_rows: usize,
    pub restart_cols: usize,
    /// Block length of the ones-count histogram.
    pub block_len: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            device: DeviceParams::default(),
            extraction: ExtractionParams::default(),
            symbols: 100_000,
            assessment: AssessmentConfig {
                permutations: 1000,
                ..AssessmentConfig::default()
            },
            restart_rows: 0,
            restart_cols: 0,
            block_len: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub stream: SymbolStream,
    pub summary: SimulationSummary,
    pub stats: StatsReport,
    pub report: AssessmentReport,
    pub files: Vec<PathBuf>,
}

/// Simulate, extract, characterise and assess, writing every artifact
/// and a manifest into `workdir`.
pub fn run_pipeline(config: &PipelineConfig, workdir: &Path) -> Result<PipelineOutcome> {
    let (stream, summary) = simulate_symbols(&config.device, &config.extraction, config.symbols)?;
    let matrix = if config.restart_rows > 0 {
        Some(simulate_restart_matrix(
            &config.device,
            &config.extraction,
            config.restart_rows,
            config.restart_cols,
        )?)
    } else {
        None
    };
    let stats = stats_report(&stream, config.block_len)?;
    let dataset = Dataset::from_stream(&stream);
    let report = assess(&dataset, matrix.as_ref(), &config.assessment)?;

    let mut files = Vec::new();
    let stream_path = workdir.join("stream.bin");
    write_stream(&stream_path, &stream)?;
    files.push(stream_path.clone());
    files.push(crate::formats::sidecar_path(&stream_path));
    if let Some(m) = &matrix {
        let p = workdir.join("restart.bin");
        write_restart(&p, m)?;
        files.push(p.clone());
        files.push(crate::formats::sidecar_path(&p));
    }
    let summary_path = workdir.join("simulation.json");
    write_json(&summary_path, &summary)?;
    files.push(summary_path);
    let stats_path = workdir.join("stats.json");
    write_json(&stats_path, &stats)?;
    files.push(stats_path);
    let report_path = workdir.join("report.json");
    write_json(&report_path, &report)?;
    files.push(report_path);

    let manifest_path = workdir.join("manifest.json");
    RunManifest::new("pipeline", serde_json::to_value(config)?).write(
        &manifest_path,
        &[],
        &files,
    )?;
    files.push(manifest_path);
    Ok(PipelineOutcome {
        stream,
        summary,
        stats,
        report,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_device(seed: u64) -> DeviceParams {
        DeviceParams {
            duration: 2e-3,
            seed,
            ..DeviceParams::default()
        }
    }

    #[test]
    fn exact_symbol_count_and_determinism() {
        let ex = ExtractionParams::default();
        let (a, sa) = simulate_symbols(&quick_device(1), &ex, 500).unwrap();
        let (b, _) = simulate_symbols(&quick_device(1), &ex, 500).unwrap();
        assert_eq!(a.symbols.len(), 500);
        assert_eq!(a, b);
        assert!(sa.segments > 1);
        let (c, _) = simulate_symbols(&quick_device(2), &ex, 500).unwrap();
        assert_ne!(a.symbols, c.symbols);
    }

    #[test]
    fn silent_device_reports_error() {
        let dev = DeviceParams {
            capture_rate_base: 0.0,
            release_rate_base: 0.0,
            noise_sigma: 0.0,
            duration: 1e-4,
            ..DeviceParams::default()
        };
        assert!(matches!(
            simulate_symbols(&dev, &ExtractionParams::default(), 10),
            Err(Error::Estimation(_))
        ));
    }

    #[test]
    fn restart_rows_differ() {
        let m =
            simulate_restart_matrix(&quick_device(3), &ExtractionParams::default(), 3, 50).unwrap();
        assert_eq!(m.data.len(), 150);
        assert_ne!(m.row(0), m.row(1));
    }
}
