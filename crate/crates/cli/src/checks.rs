//! Checks on stored runs: verify-weakform and check-inequality.

use crate::output::{num, parse_grid, runtime, usage, write_csv, write_json, Failure, Outcome, RunManifest};
use crate::{InequalityArgs, TraceArgs, WeakformArgs};
use serde::Serialize;
use std::io::BufReader;
use tricomi_core::blowup::{check_key_inequality, BlowupError, TestFunction};
use tricomi_core::solver::{weak_residual, Trace};

fn load_trace(args: &TraceArgs) -> Result<Trace, Failure> {
    let file =
        std::fs::File::open(&args.trace).map_err(|e| usage(format!("cannot open {}: {e}", args.trace.display())))?;
    let trace: Trace = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| usage(format!("{} is not a stored trace: {e}", args.trace.display())))?;
    let mismatch = |what: &str, flag: String, stored: String| {
        usage(format!("--{what} {flag} disagrees with the trace, which has {what} = {stored}"))
    };
    if let Some(m) = args.m.filter(|&m| m != trace.config.m) {
        return Err(mismatch("m", m.to_string(), trace.config.m.to_string()));
    }
    if let Some(p) = args.p.filter(|&p| p != trace.config.p) {
        return Err(mismatch("p", p.to_string(), trace.config.p.to_string()));
    }
    if let Some(n) = args.n.filter(|&n| n != trace.grid.dim) {
        return Err(mismatch("n", n.to_string(), trace.grid.dim.to_string()));
    }
    if trace.snapshots.is_empty() {
        return Err(usage("the trace stores no snapshots; rerun simulate with --snapshot-dt"));
    }
    Ok(trace)
}

#[derive(Serialize)]
struct WeakRow {
    scale: f64,
    t_end: f64,
    lhs: f64,
    rhs: f64,
    residual: f64,
    relative: f64,
    pass: bool,
}

pub fn verify_weakform(args: &WeakformArgs) -> Outcome {
    let mut manifest = RunManifest::start("verify-weakform", args);
    let trace = load_trace(&args.trace)?;
    let scales = parse_grid(&args.trace.m_grid).map_err(usage)?;
    let (m, p, dim) = (trace.config.m, trace.config.p, trace.grid.dim);
    let last = trace.snapshots.last().map(|s| s.t).unwrap_or(0.0);
    let mut rows = Vec::new();
    for &scale in &scales {
        let test = TestFunction::new(m, p, scale, dim).map_err(usage)?;
        // the test function vanishes from t = scale on; integrate up to the
        // first stored time there
        let t_end = trace
            .snapshots
            .iter()
            .map(|s| s.t)
            .find(|&t| t >= scale * (1.0 - 1e-12))
            .ok_or_else(|| usage(format!("scale {scale} lies beyond the last snapshot at t = {last}")))?;
        let w = weak_residual(&trace, &test, t_end).map_err(runtime)?;
        let relative = w.relative();
        rows.push(WeakRow {
            scale,
            t_end,
            lhs: w.lhs,
            rhs: w.rhs,
            residual: w.residual,
            relative,
            pass: relative <= args.tol,
        });
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.scale),
                num(r.t_end),
                num(r.lhs),
                num(r.rhs),
                num(r.residual),
                num(r.relative),
                r.pass.to_string(),
            ]
        })
        .collect();
    if let Some(path) = &args.trace.csv {
        write_csv(
            Some(path),
            &["M", "t_end", "lhs", "rhs", "residual", "relative", "pass"],
            &table,
            &manifest.config_hash,
        )?;
    }
    let failed: Vec<f64> = rows.iter().filter(|r| !r.pass).map(|r| r.scale).collect();
    write_json(None, &manifest.wrap("rows", &rows)?)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("weak form: relative residual above {:e} at M = {failed:?}", args.tol)))
    }
}

pub fn check_inequality(args: &InequalityArgs) -> Outcome {
    let mut manifest = RunManifest::start("check-inequality", args);
    if !(args.constant > 0.0 && args.constant.is_finite()) {
        return Err(usage("--constant must be positive"));
    }
    let trace = load_trace(&args.trace)?;
    let scales = parse_grid(&args.trace.m_grid).map_err(usage)?;
    let report = check_key_inequality(&trace, &scales).map_err(|e| match e {
        BlowupError::ScaleOutOfRange { .. }
        | BlowupError::BadScale(_)
        | BlowupError::BadSeries(_)
        | BlowupError::UnsupportedDim(_) => usage(e),
        other => runtime(other),
    })?;
    let table: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                num(r.scale),
                num(r.y),
                num(r.y_prime),
                num(r.lhs),
                num(r.rhs),
                num(r.margin),
                num(r.quad_err),
                (args.constant * r.lhs >= r.rhs).to_string(),
            ]
        })
        .collect();
    if let Some(path) = &args.trace.csv {
        write_csv(
            Some(path),
            &["M", "y", "y_prime", "lhs", "rhs", "margin", "quad_err", "holds"],
            &table,
            &manifest.config_hash,
        )?;
    }
    let failing: Vec<f64> = report.rows.iter().filter(|r| args.constant * r.lhs < r.rhs).map(|r| r.scale).collect();
    write_json(None, &manifest.wrap("report", &report)?)?;
    if let Some(k) = report.implied_constant {
        eprintln!("blowup: smallest constant K with K * lhs >= rhs on every scale: {k}");
    }
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("blowup: {} * lhs < rhs at M = {failing:?}", args.constant)))
    }
}
