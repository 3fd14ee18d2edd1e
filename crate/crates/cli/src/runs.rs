//! Subcommands that run or fit simulations: simulate, sweep and fit.

use crate::config::load_sweep_config;
use crate::output::{num, runtime, usage, write_csv, write_json, Failure, Outcome, RunManifest};
use crate::{FitArgs, SimulateArgs, SweepArgs};
use serde_json::json;
use std::io::BufWriter;
use tricomi_core::lifespan::{self, analyze, read_records_csv, write_report};
use tricomi_core::solver::{run_until_blowup, sample_data, GridSpec, Profile, SimConfig, SpectralGrid};

pub fn simulate(args: &SimulateArgs) -> Outcome {
    let mut manifest = RunManifest::start("simulate", args);
    let spec = GridSpec { dim: args.dim, n: args.n, half_width: args.half_width };
    let grid = SpectralGrid::new(spec).map_err(usage)?;
    let cfg = SimConfig {
        m: args.m,
        p: args.p,
        cfl: args.cfl,
        v_threshold: args.threshold,
        t_max: args.t_max,
        trace_stride: args.trace_stride,
        snapshot_dt: args.snapshot_dt,
        nonlinear: !args.linear,
        ..SimConfig::default()
    };
    cfg.validate(&grid).map_err(usage)?;
    let data =
        sample_data(&grid, Profile { amp_f: args.amp_f, amp_g: args.amp_g }, args.epsilon, args.m).map_err(usage)?;
    let (record, trace) = run_until_blowup(&grid, &data, &cfg).map_err(runtime)?;

    if let Some(path) = &args.out {
        let rows: Vec<Vec<String>> = trace
            .rows
            .iter()
            .map(|r| vec![num(r.t), num(r.max_v), num(r.max_u), num(r.support_radius), num(r.dt)])
            .collect();
        write_csv(Some(path), &["t", "max_v", "max_u", "support_radius", "dt"], &rows, &manifest.config_hash)?;
    }
    if let Some(path) = &args.trace_json {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(BufWriter::new(file), &trace)?;
    }
    let scheme = json!({
        "name": "rk4-pseudospectral",
        "dealias": cfg.dealias,
        "cfl": cfg.cfl,
        "reaction_cfl": cfg.reaction_cfl,
        "nonlinear": cfg.nonlinear,
    });
    let payload = json!({
        "status": record.status,
        "T_eps": record.t_eps,
        "grid": spec,
        "scheme": scheme,
        "config_hash": manifest.config_hash,
        "record": record,
    });
    write_json(None, &manifest.wrap("result", &payload)?)
}

pub fn sweep(args: &SweepArgs) -> Outcome {
    let mut cfg = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            load_sweep_config(&text).map_err(usage)?
        }
        None => lifespan::SweepConfig::default(),
    };
    if let Some(eps) = &args.epsilons {
        cfg.epsilons = eps.clone();
    }
    if let Some(k) = args.parallelism {
        cfg.parallelism = k;
    }
    cfg.validate().map_err(usage)?;
    let mut manifest = RunManifest::start("sweep", &cfg);
    let params = lifespan::exponents(cfg.grid.dim, cfg.sim.m, cfg.sim.p).map_err(usage)?;
    let records = lifespan::sweep(&cfg).map_err(runtime)?;
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!("sweep: run at eps = {} failed: {}", r.epsilon, r.error.as_deref().unwrap_or(""));
    }
    let summary = match &args.out_dir {
        Some(dir) => {
            let (summary, paths) = write_report(dir, &records, &params, &cfg).map_err(runtime)?;
            let value = manifest.wrap("files", &json!({ "records": paths.csv, "summary": paths.json }))?;
            write_json(Some(&dir.join("manifest.json")), &value)?;
            summary
        }
        None => lifespan::summarize(&records, &params, &cfg),
    };
    write_json(None, &manifest.wrap("summary", &summary)?)
}

pub fn fit(args: &FitArgs) -> Outcome {
    let mut manifest = RunManifest::start("fit", args);
    let params = lifespan::exponents(args.n, args.m, args.p).map_err(usage)?;
    let records = read_records_csv(&args.records).map_err(|e| usage(format!("{}: {e}", args.records.display())))?;
    let thresholds: Vec<f64> =
        records.first().map(|r| r.crossings.iter().map(|c| c.threshold).collect()).unwrap_or_default();
    let analysis = analyze(&records, &params, &thresholds);
    write_json(None, &manifest.wrap("analysis", &analysis)?)?;
    match &analysis.fit_reason {
        Some(reason) => Err(Failure::Check(reason.clone())),
        None => Ok(()),
    }
}
