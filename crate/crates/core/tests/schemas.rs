mod common;

use common::{assert_valid, is_valid};
use entropy_forge::apps::{default_iterations, generate_graph, karger_min_cut, RandomSource};
use entropy_forge::chaos::{log_grid, lorenz_series, CorrDimCurve, LorenzConfig};
use entropy_forge::extraction::SymbolStream;
use entropy_forge::manifest::RunManifest;
use entropy_forge::schemas;
use entropy_forge::sp90b::{assess, AssessmentConfig, Dataset, HealthMonitor, RestartMatrix};
use entropy_forge::stats::stats_report;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn symbols(len: usize, seed: u64, n: u8) -> Vec<u16> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| (rng.next_u32() & ((1 << n) - 1)) as u16)
        .collect()
}

#[test]
fn every_schema_compiles_and_declares_draft_2020_12() {
    for (name, text) in schemas::ALL {
        let v: Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(
            v["$schema"], "https://json-schema.org/draft/2020-12/schema",
            "{name}"
        );
        jsonschema::validator_for(&v).unwrap_or_else(|e| panic!("{name}: {e}"));
        let on_disk =
            std::fs::read_to_string(format!("{}/schemas/{name}", env!("CARGO_MANIFEST_DIR")))
                .unwrap();
        assert_eq!(on_disk, text);
    }
}

#[test]
fn assessment_reports_validate() {
    let cfg = AssessmentConfig {
        permutations: 200,
        seed: 9,
        ..Default::default()
    };
    for n in [1u8, 4, 8] {
        let d = Dataset::new(symbols(8_000, u64::from(n), n), n).unwrap();
        let m = RestartMatrix::new(30, 40, n, symbols(1_200, 100 + u64::from(n), n)).unwrap();
        let with = serde_json::to_value(assess(&d, Some(&m), &cfg).unwrap()).unwrap();
        assert_valid(schemas::ASSESSMENT_REPORT, &with);
        let without = serde_json::to_value(assess(&d, None, &cfg).unwrap()).unwrap();
        assert_valid(schemas::ASSESSMENT_REPORT, &without);
    }
    // A failing, non-IID report is still valid.
    let ramp: Vec<u16> = (0..8_000u32).map(|i| (i / 40) as u16 & 0xff).collect();
    let r =
        serde_json::to_value(assess(&Dataset::new(ramp, 8).unwrap(), None, &cfg).unwrap()).unwrap();
    assert_eq!(r["iid_verdict"], false);
    assert_valid(schemas::ASSESSMENT_REPORT, &r);
}

#[test]
fn schemas_reject_malformed_reports() {
    let cfg = AssessmentConfig {
        permutations: 200,
        ..Default::default()
    };
    let d = Dataset::new(symbols(5_000, 1, 8), 8).unwrap();
    let good = serde_json::to_value(assess(&d, None, &cfg).unwrap()).unwrap();
    assert!(is_valid(schemas::ASSESSMENT_REPORT, &good));

    let mut extra = good.clone();
    extra["unexpected"] = json!(1);
    assert!(!is_valid(schemas::ASSESSMENT_REPORT, &extra));
    let mut missing = good.clone();
    missing.as_object_mut().unwrap().remove("min_entropy");
    assert!(!is_valid(schemas::ASSESSMENT_REPORT, &missing));
    let mut version = good.clone();
    version["schema_version"] = json!(2);
    assert!(!is_valid(schemas::ASSESSMENT_REPORT, &version));
    let mut short = good;
    short["iid"]["permutation_tests"]
        .as_array_mut()
        .unwrap()
        .pop();
    assert!(!is_valid(schemas::ASSESSMENT_REPORT, &short));

    let bad_digest = json!({
        "schema_version": 1, "tool": "entropy-forge", "version": "0.1.0", "subcommand": "x",
        "parameters": {}, "inputs": [],
        "outputs": [{"path": "a", "sha256": "XYZ", "bytes": 1}],
        "wall_time_seconds": null
    });
    assert!(!is_valid(schemas::MANIFEST, &bad_digest));
}

#[test]
fn health_and_stats_reports_validate() {
    let s = symbols(20_000, 4, 8);
    let mut m = HealthMonitor::new(7.0, 512, 1.0 / 1_048_576.0).unwrap();
    m.feed_all(&s);
    m.feed_all(&[3; 20]);
    let report = serde_json::to_value(m.report()).unwrap();
    assert_valid(schemas::HEALTH_REPORT, &report);
    assert!(!report["repetition_alarms"].as_array().unwrap().is_empty());

    for n in [1u8, 8, 12] {
        let stream = SymbolStream::new(n, symbols(3_000, 8, n)).unwrap();
        assert_valid(
            schemas::STATS_REPORT,
            &serde_json::to_value(stats_report(&stream, 100).unwrap()).unwrap(),
        );
    }
}

#[test]
fn chaos_curve_validates_inside_report() {
    let x = lorenz_series(3000, 0.01, [1.0, 1.0, 1.0], &LorenzConfig::default()).unwrap();
    let curve = CorrDimCurve::compute(&x, &[1, 2, 3], 1, &log_grid(0.5, 10.0, 12), 10).unwrap();
    let report = json!({
        "schema_version": 1, "source": "lorenz", "samples": x.len(), "lag": 1, "theiler": 10,
        "corrdim": curve, "k2": null, "k2_max_min_ratio": null
    });
    assert_valid(schemas::CHAOS_REPORT, &report);
}

#[test]
fn manifest_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.txt");
    std::fs::write(&out, b"hello").unwrap();
    let g = generate_graph(6, 0.6, 1).unwrap();
    let mut src = RandomSource::chacha(1, 10_000);
    let k = karger_min_cut(&g, &mut src, default_iterations(6)).unwrap();
    let m = RunManifest::new("apps mincut", json!({ "best": k.best }))
        .write(&dir.path().join("m.json"), &[], &[out])
        .unwrap();
    let v = serde_json::to_value(&m).unwrap();
    assert_valid(schemas::MANIFEST, &v);
    assert_eq!(v["outputs"][0]["path"], "out.txt");
    assert_eq!(v["outputs"][0]["bytes"], 5);
}
