//! JSON Schemas (draft 2020-12) for every JSON artifact the tool writes.

pub const ASSESSMENT_REPORT: &str = include_str!("../schemas/assessment-report.schema.json");
pub const HEALTH_REPORT: &str = include_str!("../schemas/health-report.schema.json");
pub const STATS_REPORT: &str = include_str!("../schemas/stats-report.schema.json");
pub const CHAOS_REPORT: &str = include_str!("../schemas/chaos-report.schema.json");
pub const MANIFEST: &str = include_str!("../schemas/manifest.schema.json");
pub const SIMULATION_SUMMARY: &str = include_str!("../schemas/simulation-summary.schema.json");
pub const WALK_REPORT: &str = include_str!("../schemas/walk-report.schema.json");
pub const PAGERANK_REPORT: &str = include_str!("../schemas/pagerank-report.schema.json");
pub const MINCUT_REPORT: &str = include_str!("../schemas/mincut-report.schema.json");
pub const STREAM_SIDECAR: &str = include_str!("../schemas/stream-sidecar.schema.json");
pub const RESTART_SIDECAR: &str = include_str!("../schemas/restart-sidecar.schema.json");

/// Every schema keyed by file name.
pub const ALL: [(&str, &str); 11] = [
    ("assessment-report.schema.json", ASSESSMENT_REPORT),
    ("health-report.schema.json", HEALTH_REPORT),
    ("stats-report.schema.json", STATS_REPORT),
    ("chaos-report.schema.json", CHAOS_REPORT),
    ("manifest.schema.json", MANIFEST),
    ("simulation-summary.schema.json", SIMULATION_SUMMARY),
    ("walk-report.schema.json", WALK_REPORT),
    ("pagerank-report.schema.json", PAGERANK_REPORT),
    ("mincut-report.schema.json", MINCUT_REPORT),
    ("stream-sidecar.schema.json", STREAM_SIDECAR),
    ("restart-sidecar.schema.json", RESTART_SIDECAR),
];
