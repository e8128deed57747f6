use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::*;
use crate::apps::{
    brute_force_min_cut, default_iterations, generate_graph, generate_web, karger_min_cut,
    l1_distance, mean_squared_displacement, pagerank_power, pagerank_walk, random_walk_3d, ranking,
    rbo, RandomSource, DEFAULT_WALK_STEPS, DEFAULT_WEB_NODES, MAX_BRUTE_FORCE_NODES,
};
use crate::chaos::{
    embed, k2_estimate, log_grid, lorenz_series, recurrence_matrix, CorrDimCurve, K2Curve,
    LorenzConfig, DEFAULT_LORENZ_DT,
};
use crate::device::{simulate_trace, DeviceParams};
use crate::extraction::{extract, ExtractionParams};
use crate::formats::{
    read_graph, read_json, read_restart, read_stream, read_trace, read_web, sidecar_path,
    write_csv, write_file, write_graph, write_json, write_stream, write_trace, write_web,
};
use crate::manifest::{manifest_path, RunManifest};
use crate::pipeline::{run_pipeline, PipelineConfig};
use crate::sp90b::{
    assess, AssessmentConfig, Dataset, HealthMonitor, BINARY_WINDOW, DEFAULT_WINDOW,
};
use crate::stats::{difference_series, grayscale_map, lag_pairs, stats_report};
use crate::Result;

pub(super) enum Status {
    Success,
    AssessmentFailed(String),
}

pub(super) fn dispatch(command: Command) -> Result<Status> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Extract(a) => extract_cmd(a),
        Command::Analyze(AnalyzeCommand::Stats(a)) => analyze_stats(a),
        Command::Analyze(AnalyzeCommand::Chaos(a)) => analyze_chaos(a),
        Command::Sp90b(Sp90bCommand::Assess(a)) => sp90b_assess(a),
        Command::Sp90b(Sp90bCommand::Health(a)) => sp90b_health(a),
        Command::Apps(AppsCommand::Walk(a)) => apps_walk(a),
        Command::Apps(AppsCommand::Pagerank(a)) => apps_pagerank(a),
        Command::Apps(AppsCommand::Mincut(a)) => apps_mincut(a),
        Command::Pipeline(a) => pipeline(a),
    }
}

struct Run {
    subcommand: &'static str,
    started: Option<Instant>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

impl Run {
    fn new(subcommand: &'static str, common: &Common) -> Self {
        Self {
            subcommand,
            started: common.timing.then(Instant::now),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn input(&mut self, path: &Path) {
        self.inputs.push(path.to_path_buf());
        let side = sidecar_path(path);
        if side.exists() {
            self.inputs.push(side);
        }
    }

    fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Writes `<primary>.manifest.json`, where primary is the first output.
    fn finish(self, parameters: impl Serialize) -> Result<()> {
        let primary = self
            .outputs
            .first()
            .expect("every command writes an output")
            .clone();
        let mut m = RunManifest::new(self.subcommand, serde_json::to_value(parameters)?);
        m.wall_time_seconds = self.started.map(|t| t.elapsed().as_secs_f64());
        m.write(&manifest_path(&primary), &self.inputs, &self.outputs)?;
        Ok(())
    }
}

fn simulate(a: SimulateArgs) -> Result<Status> {
    let mut run = Run::new("simulate", &a.common);
    let mut params: DeviceParams = match &a.params {
        Some(p) => {
            run.input(p);
            read_json(p)?
        }
        None => DeviceParams::default(),
    };
    if let Some(seed) = a.seed {
        params.seed = seed;
    }
    if let Some(d) = a.duration {
        params.duration = d;
    }
    let trace = simulate_trace(&params)?;
    write_trace(&a.out, &trace)?;
    run.output(&a.out);
    println!("wrote {} samples to {}", trace.len(), a.out.display());
    run.finish(&params)?;
    Ok(Status::Success)
}

fn extract_cmd(a: ExtractArgs) -> Result<Status> {
    let mut run = Run::new("extract", &a.common);
    let mut params: ExtractionParams = match &a.params {
        Some(p) => {
            run.input(p);
            read_json(p)?
        }
        None => ExtractionParams::default(),
    };
    if let Some(n) = a.n {
        params.n = n;
    }
    params.bin_width = a.bin_width.or(params.bin_width);
    params.cutoff = a.cutoff.or(params.cutoff);
    params.threshold = a.threshold.or(params.threshold);
    params.dead_time = a.dead_time.or(params.dead_time);

    run.input(&a.input);
    let trace = read_trace(&a.input)?;
    let (stream, resolved) = extract(&trace, &params)?;
    write_stream(&a.out, &stream)?;
    run.output(&a.out);
    run.output(&sidecar_path(&a.out));
    println!(
        "{} events -> {} symbols ({} blocks dropped)",
        resolved.events,
        stream.len(),
        stream.dropped_blocks
    );
    run.finish(json!({ "requested": params, "resolved": resolved }))?;
    Ok(Status::Success)
}

fn analyze_stats(a: StatsArgs) -> Result<Status> {
    let mut run = Run::new("analyze stats", &a.common);
    run.input(&a.input);
    let stream = read_stream(&a.input)?;
    let report = stats_report(&stream, a.block_len)?;
    write_json(&a.report, &report)?;
    run.output(&a.report);
    if let Some(p) = &a.pgm {
        write_file(p, &grayscale_map(&stream, a.rows, a.cols)?.to_pgm())?;
        run.output(p);
    }
    if let Some(p) = &a.lag_csv {
        let pairs = lag_pairs(&stream, a.lag)?;
        write_csv(
            p,
            &["x_t", "x_t_lag"],
            pairs.iter().map(|(x, y)| [x.to_string(), y.to_string()]),
        )?;
        run.output(p);
    }
    if let Some(p) = &a.diff_csv {
        let diffs = difference_series(&stream)?;
        write_csv(p, &["difference"], diffs.iter().map(|d| [d.to_string()]))?;
        run.output(p);
    }
    println!(
        "H_S = {:.6} bits/symbol ({:.6} bits/bit) over {} symbols",
        report.entropy.shannon_bits_per_symbol, report.entropy.shannon_bits_per_bit, report.symbols
    );
    run.finish(json!({
        "block_len": a.block_len,
        "rows": a.rows,
        "cols": a.cols,
        "lag": a.lag,
    }))?;
    Ok(Status::Success)
}

#[derive(Serialize)]
struct ChaosReport {
    schema_version: u32,
    source: String,
    samples: usize,
    lag: usize,
    theiler: usize,
    corrdim: Option<CorrDimCurve>,
    k2: Option<K2Curve>,
    k2_max_min_ratio: Option<f64>,
}

fn analyze_chaos(a: ChaosArgs) -> Result<Status> {
    let mut run = Run::new("analyze chaos", &a.common);
    let (series, source) = match &a.input {
        Some(p) => {
            run.input(p);
            let stream = read_stream(p)?;
            let take = a.samples.min(stream.len());
            let s: Vec<f64> = stream.symbols[..take]
                .iter()
                .map(|&v| f64::from(v))
                .collect();
            (s, p.display().to_string())
        }
        None => {
            let stride = a.lorenz_stride.max(1);
            let x = lorenz_series(
                a.samples * stride,
                DEFAULT_LORENZ_DT,
                [1.0, 1.0, 1.0],
                &LorenzConfig::default(),
            )?;
            (
                x.into_iter().step_by(stride).collect(),
                "lorenz".to_string(),
            )
        }
    };
    let (do_k2, do_corrdim) = if a.k2 || a.corrdim {
        (a.k2, a.corrdim)
    } else {
        (true, true)
    };

    let corrdim = if do_corrdim {
        let dims: Vec<usize> = (1..=a.dmax).collect();
        let grid = log_grid(a.r_min, a.r_max, a.r_count);
        Some(CorrDimCurve::compute(
            &series, &dims, a.lag, &grid, a.theiler,
        )?)
    } else {
        None
    };
    let k2 = if do_k2 {
        let mut eps = log_grid(a.eps_min, a.eps_max, a.eps_count);
        eps.reverse();
        Some(k2_estimate(
            &series,
            a.k2_dmin..=a.k2_dmax,
            &eps,
            a.lag,
            a.theiler,
        )?)
    } else {
        None
    };
    let report = ChaosReport {
        schema_version: 1,
        source,
        samples: series.len(),
        lag: a.lag,
        theiler: a.theiler,
        k2_max_min_ratio: k2.as_ref().and_then(K2Curve::max_min_ratio),
        corrdim,
        k2,
    };
    write_json(&a.report, &report)?;
    run.output(&a.report);
    if let (Some(p), Some(c)) = (&a.corrdim_csv, &report.corrdim) {
        let rows = c
            .dims
            .iter()
            .zip(&c.nus)
            .zip(&c.fit_ranges)
            .map(|((d, nu), (lo, hi))| {
                [
                    d.to_string(),
                    nu.to_string(),
                    lo.to_string(),
                    hi.to_string(),
                ]
            });
        write_csv(p, &["d", "nu", "r_low", "r_high"], rows)?;
        run.output(p);
    }
    if let (Some(p), Some(k)) = (&a.k2_csv, &report.k2) {
        let rows = k
            .epsilons
            .iter()
            .zip(&k.k2_values)
            .map(|(e, v)| [e.to_string(), v.map_or(String::new(), |v| v.to_string())]);
        write_csv(p, &["epsilon", "k2_nats_per_sample"], rows)?;
        run.output(p);
    }
    if let (Some(p), Some(eps)) = (&a.recurrence_csv, a.eps) {
        let emb = embed(&series, a.dmax.min(2).max(1), a.lag)?;
        let pairs = recurrence_matrix(&emb, eps)?;
        write_csv(
            p,
            &["i", "j"],
            pairs.iter().map(|(i, j)| [i.to_string(), j.to_string()]),
        )?;
        run.output(p);
    }
    if let Some(c) = &report.corrdim {
        println!(
            "nu(d): {:?}",
            c.nus
                .iter()
                .map(|v| (v * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>()
        );
    }
    if let Some(r) = report.k2_max_min_ratio {
        println!("K2 max/min ratio: {r:.3}");
    }
    run.finish(json!({
        "samples": a.samples,
        "lag": a.lag,
        "theiler": a.theiler,
        "dmax": a.dmax,
        "r_grid": [a.r_min, a.r_max, a.r_count],
        "eps_grid": [a.eps_max, a.eps_min, a.eps_count],
        "k2_dims": [a.k2_dmin, a.k2_dmax],
        "lorenz": a.lorenz,
        "lorenz_stride": a.lorenz_stride,
    }))?;
    Ok(Status::Success)
}

fn sp90b_assess(a: AssessArgs) -> Result<Status> {
    let mut run = Run::new("sp90b assess", &a.common);
    run.input(&a.input);
    let stream = read_stream(&a.input)?;
    let matrix = match &a.restart {
        Some(p) => {
            run.input(p);
            Some(read_restart(p)?)
        }
        None => None,
    };
    let config = AssessmentConfig {
        permutations: a.permutations,
        seed: a.seed,
        strict: a.strict,
        restart_iid: !a.no_restart_iid,
    };
    let report = assess(&Dataset::from_stream(&stream), matrix.as_ref(), &config)?;
    write_json(&a.out, &report)?;
    run.output(&a.out);
    match report.min_entropy {
        Some(h) => println!(
            "min-entropy {h:.4} bits per {}-bit symbol ({})",
            report.n, report.status
        ),
        None => println!("IID verdict false: {}", report.status),
    }
    run.finish(&config)?;
    Ok(if report.passed() {
        Status::Success
    } else {
        let mut why = report.iid.failures().join(", ");
        if why.is_empty() {
            why = report.status.clone();
        }
        Status::AssessmentFailed(why)
    })
}

fn sp90b_health(a: HealthArgs) -> Result<Status> {
    let mut run = Run::new("sp90b health", &a.common);
    run.input(&a.input);
    let stream = read_stream(&a.input)?;
    let window = a.window.unwrap_or(if stream.n == 1 {
        BINARY_WINDOW
    } else {
        DEFAULT_WINDOW
    });
    let mut monitor = HealthMonitor::new(a.hmin, window, a.alpha)?;
    monitor.feed_all(&stream.symbols);
    let report = monitor.report();
    println!(
        "repetition count: cutoff {}, {} alarms; adaptive proportion: cutoff {}, {} alarms",
        report.repetition_cutoff,
        report.repetition_alarms.len(),
        report.proportion_cutoff,
        report.proportion_alarms.len()
    );
    if let Some(p) = &a.out {
        write_json(p, &report)?;
        run.output(p);
        run.finish(json!({ "hmin": a.hmin, "alpha": a.alpha, "window": window }))?;
    }
    let alarms = report.repetition_alarms.len() + report.proportion_alarms.len();
    Ok(if alarms == 0 {
        Status::Success
    } else {
        Status::AssessmentFailed(format!("{alarms} health-test alarms"))
    })
}

fn apps_walk(a: WalkArgs) -> Result<Status> {
    let mut run = Run::new("apps walk", &a.common);
    run.input(&a.stream);
    let mut src = RandomSource::from_stream(&read_stream(&a.stream)?);
    let walks = (0..a.walks)
        .map(|_| random_walk_3d(&mut src, a.steps))
        .collect::<Result<Vec<_>>>()?;
    let rows = walks.iter().enumerate().flat_map(|(w, path)| {
        path.iter().enumerate().map(move |(s, p)| {
            [
                w.to_string(),
                s.to_string(),
                p[0].to_string(),
                p[1].to_string(),
                p[2].to_string(),
            ]
        })
    });
    write_csv(&a.out, &["walk", "step", "x", "y", "z"], rows)?;
    run.output(&a.out);
    let msd = mean_squared_displacement(&walks);
    if let Some(p) = &a.report {
        write_json(
            p,
            &json!({
                "walks": a.walks,
                "steps": a.steps,
                "mean_squared_displacement": msd,
                "bits_consumed": src.consumed(),
            }),
        )?;
        run.output(p);
    }
    println!("mean squared displacement {msd:.3} after {} steps", a.steps);
    run.finish(json!({ "walks": a.walks, "steps": a.steps }))?;
    Ok(Status::Success)
}

fn apps_pagerank(a: PagerankArgs) -> Result<Status> {
    let mut run = Run::new("apps pagerank", &a.common);
    let web = match &a.web {
        Some(p) => {
            run.input(p);
            read_web(p)?
        }
        None => generate_web(a.nodes, a.edge_prob, a.web_seed)?,
    };
    run.input(&a.stream);
    let mut src = RandomSource::from_stream(&read_stream(&a.stream)?);
    let power = pagerank_power(&web, a.damping, a.tol)?;
    let walk = pagerank_walk(&web, &mut src, a.steps, a.damping)?;
    let l1 = l1_distance(&power, &walk);
    let similarity = rbo(&ranking(&power), &ranking(&walk), a.rbo_p)?;
    // Web size and walk length are tool choices, not published settings.
    let mut tool_defaults = Vec::new();
    if a.web.is_none() && a.nodes == DEFAULT_WEB_NODES {
        tool_defaults.push("nodes");
    }
    if a.steps == DEFAULT_WALK_STEPS {
        tool_defaults.push("steps");
    }
    write_json(
        &a.out,
        &json!({
            "nodes": web.nodes,
            "edges": web.edges.len(),
            "steps": a.steps,
            "damping": a.damping,
            "power_iteration": power,
            "random_walk": walk,
            "l1_distance": l1,
            "rbo": similarity,
            "rbo_persistence": a.rbo_p,
            "bits_consumed": src.consumed(),
            "tool_defaults": tool_defaults,
        }),
    )?;
    run.output(&a.out);
    if let Some(p) = &a.save_web {
        write_web(p, &web)?;
        run.output(p);
    }
    println!("L1 distance {l1:.4}, RBO {similarity:.4}");
    run.finish(json!({
        "web": a.web.as_ref().map(|p| p.display().to_string()),
        "nodes": a.nodes,
        "edge_prob": a.edge_prob,
        "web_seed": a.web_seed,
        "steps": a.steps,
        "damping": a.damping,
        "tol": a.tol,
        "rbo_p": a.rbo_p,
    }))?;
    Ok(Status::Success)
}

fn apps_mincut(a: MincutArgs) -> Result<Status> {
    let mut run = Run::new("apps mincut", &a.common);
    let graph = match &a.graph {
        Some(p) => {
            run.input(p);
            read_graph(p)?
        }
        None => generate_graph(a.nodes, a.edge_prob, a.graph_seed)?,
    };
    run.input(&a.stream);
    let mut src = RandomSource::from_stream(&read_stream(&a.stream)?);
    let iterations = a
        .iterations
        .unwrap_or_else(|| default_iterations(graph.nodes));
    let result = karger_min_cut(&graph, &mut src, iterations)?;
    let exact = (graph.nodes <= MAX_BRUTE_FORCE_NODES)
        .then(|| brute_force_min_cut(&graph))
        .transpose()?;
    let rows = result
        .cuts
        .iter()
        .zip(&result.trace)
        .enumerate()
        .map(|(i, (c, m))| [(i + 1).to_string(), c.to_string(), m.to_string()]);
    write_csv(&a.out, &["iteration", "cut", "running_min"], rows)?;
    run.output(&a.out);
    if let Some(p) = &a.report {
        write_json(
            p,
            &json!({
                "nodes": graph.nodes,
                "edges": graph.edges.len(),
                "iterations": iterations,
                "best": result.best,
                "exact": exact,
                "bits_consumed": src.consumed(),
            }),
        )?;
        run.output(p);
    }
    if let Some(p) = &a.save_graph {
        write_graph(p, &graph)?;
        run.output(p);
    }
    match exact {
        Some(e) => println!(
            "min cut {} after {iterations} runs (exact {e})",
            result.best
        ),
        None => println!("min cut {} after {iterations} runs", result.best),
    }
    run.finish(json!({
        "graph": a.graph.as_ref().map(|p| p.display().to_string()),
        "nodes": a.nodes,
        "edge_prob": a.edge_prob,
        "graph_seed": a.graph_seed,
        "iterations": iterations,
    }))?;
    Ok(Status::Success)
}

fn pipeline(a: PipelineArgs) -> Result<Status> {
    let mut config: PipelineConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = a.seed {
        config.device.seed = seed;
        config.assessment.seed = seed;
    }
    if let Some(s) = a.symbols {
        config.symbols = s;
    }
    if let Some(p) = a.permutations {
        config.assessment.permutations = p;
    }
    if let Some(r) = a.restart_rows {
        config.restart_rows = r;
    }
    if let Some(c) = a.restart_cols {
        config.restart_cols = c;
    }
    if config.restart_rows > 0 && config.restart_cols == 0 {
        config.restart_cols = config.restart_rows;
    }
    let outcome = run_pipeline(&config, &a.workdir)?;
    let report = &outcome.report;
    println!(
        "{} symbols, H_S {:.4} bits/symbol, IID {}, min-entropy {}",
        outcome.stream.len(),
        outcome.stats.entropy.shannon_bits_per_symbol,
        report.iid_verdict,
        report
            .min_entropy
            .map_or("n/a".to_string(), |h| format!("{h:.4}"))
    );
    println!("artifacts in {}", a.workdir.display());
    Ok(if report.passed() {
        Status::Success
    } else {
        Status::AssessmentFailed(report.status.clone())
    })
}
