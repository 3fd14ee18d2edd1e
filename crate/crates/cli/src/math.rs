//! Subcommands that only evaluate functions: exponents, specfun-selftest,
//! lambda and symbols.

use crate::output::{num, runtime, usage, write_csv, write_json, Failure, Outcome, RunManifest};
use crate::{ExponentsArgs, LambdaArgs, LambdaCheck, SelftestArgs, SymbolCheck, SymbolsArgs};
use num_complex::Complex64;
use tricomi_core::aux_ode::{origin_constant, AuxOde, PowerSeries};
use tricomi_core::lifespan::{self, Regime};
use tricomi_core::propagator::{ModeSymbols, Propagator};
use tricomi_core::specfun::{selftest::run_selftest, SpecFunConfig};
use tricomi_core::symbol_bounds::{symbol_bound_check, BoundGrid, SymbolKind};

fn show(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => num(v),
        Some(_) => "inf".into(),
        None => "none".into(),
    }
}

pub fn exponents(args: &ExponentsArgs) -> Outcome {
    let mut manifest = RunManifest::start("exponents", args);
    let e = lifespan::exponents(args.n, args.m, args.p).map_err(usage)?;
    if args.json {
        return write_json(None, &manifest.wrap("params", &e)?);
    }
    let regime = match e.regime {
        Regime::Subcritical => "subcritical",
        Regime::Critical => "critical",
        Regime::Supercritical => "supercritical",
    };
    let table = [
        ("n", e.n.to_string()),
        ("m", num(e.m)),
        ("p", num(e.p)),
        ("mu", num(e.mu)),
        ("p_T", show(Some(e.p_t))),
        ("gamma_T", num(e.gamma_t)),
        ("p_G", show(Some(e.p_g))),
        ("a(m)", num(e.a_m)),
        ("regime", regime.into()),
        ("upper_exponent", show(e.upper_exponent)),
        ("lower_exponent_1d", show(e.lower_exponent_1d)),
        ("predicted_slope", show(e.predicted_slope())),
    ];
    for (k, v) in table {
        println!("{k} = {v}");
    }
    if e.regime == Regime::Critical {
        eprintln!("note: p = p_T; the lifespan bound is exponential in eps^-(p-1), not a power law");
    }
    Ok(())
}

pub fn specfun_selftest(args: &SelftestArgs) -> Outcome {
    let manifest = RunManifest::start("specfun-selftest", args);
    let rows = run_selftest(&SpecFunConfig::DEFAULT).map_err(runtime)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.identity.to_string(),
                num(r.nu_or_a),
                num(r.z),
                num(r.lhs),
                num(r.rhs),
                num(r.rel_err),
                r.pass.to_string(),
            ]
        })
        .collect();
    write_csv(
        args.out.as_deref(),
        &["identity", "nu_or_a", "z", "lhs", "rhs", "rel_err", "pass"],
        &table,
        &manifest.config_hash,
    )?;
    let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("specfun: {} failed at nu/a = {}, z = {}: rel_err {:e}", r.identity, r.nu_or_a, r.z, r.rel_err);
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("specfun: {} of {} identities failed", failed.len(), rows.len())))
    }
}

/// Collects pass/fail lines and turns any failure into a check failure.
struct Verdicts {
    module: &'static str,
    failed: Vec<String>,
}

impl Verdicts {
    fn new(module: &'static str) -> Self {
        Verdicts { module, failed: Vec::new() }
    }

    fn record(&mut self, name: &str, worst: f64, tol: f64) {
        let pass = worst <= tol;
        eprintln!(
            "{}: check {name}: {} (worst {worst:e}, tolerance {tol:e})",
            self.module,
            if pass { "pass" } else { "FAIL" }
        );
        if !pass {
            self.failed.push(name.to_string());
        }
    }

    fn finish(self) -> Outcome {
        if self.failed.is_empty() {
            Ok(())
        } else {
            Err(Failure::Check(format!("{}: failed checks: {}", self.module, self.failed.join(", "))))
        }
    }
}

fn log_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64)).collect()
}

pub fn lambda(args: &LambdaArgs) -> Outcome {
    let manifest = RunManifest::start("lambda", args);
    if !(args.t_min > 0.0 && args.t_max > args.t_min && args.points >= 2) {
        return Err(usage("lambda: need 0 < t-min < t-max and at least 2 points"));
    }
    let aux = AuxOde::new(args.m).map_err(usage)?;
    let m = args.m;
    let series = if args.check.contains(&LambdaCheck::Series) {
        if m.fract() != 0.0 || m > 2.0 {
            return Err(usage(format!("lambda: the series check needs integer m <= 2, got {m}")));
        }
        Some(PowerSeries::decaying(m).map_err(runtime)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    let (mut worst_res, mut worst_wr) = (0.0_f64, 0.0_f64);
    for t in log_points(args.t_min, args.t_max, args.points) {
        let (y, yp) = aux.decaying(t).map_err(runtime)?;
        let residual = aux.residual(t).map_err(runtime)?;
        let wr = (aux.wronskian(t).map_err(runtime)? / aux.wronskian_exact(t) - 1.0).abs();
        worst_res = worst_res.max(residual);
        worst_wr = worst_wr.max(wr);
        rows.push(vec![num(t), num(y), num(yp), num(residual), num(wr)]);
    }
    write_csv(
        args.out.as_deref(),
        &["t", "lambda", "lambda_prime", "residual", "wronskian_err"],
        &rows,
        &manifest.config_hash,
    )?;

    let mut v = Verdicts::new("lambda");
    for check in &args.check {
        match check {
            LambdaCheck::Ode => v.record("ode", worst_res, 1e-8),
            LambdaCheck::Wronskian => v.record("wronskian", worst_wr, 1e-9),
            LambdaCheck::Limits => {
                let t: f64 = 1e-6;
                let mu = aux.mu();
                let (c_plus, c_minus) =
                    (origin_constant(m, mu).map_err(runtime)?, origin_constant(m, -mu).map_err(runtime)?);
                let value = (aux.value(t).map_err(runtime)? - c_plus).abs() / c_plus;
                let slope = (aux.deriv(t).map_err(runtime)? / t.powf(2.0 * m) + c_minus).abs() / c_minus;
                v.record("limits/value", value, 1e-4);
                v.record("limits/derivative", slope, 1e-3);
            }
            LambdaCheck::Asymptotics => {
                let t = args.t_max;
                let profile = aux.large_time_profile(t);
                let value = (aux.value(t).map_err(runtime)? / profile - 1.0).abs();
                let slope = (aux.deriv(t).map_err(runtime)? / (-profile * t.powf(m)) - 1.0).abs();
                v.record("asymptotics", value.max(slope), 5.0 * t.powf(-(m + 1.0)));
            }
            LambdaCheck::Series => {
                let series = series.as_ref().expect("series built above");
                let mut worst = 0.0_f64;
                for k in 1..=50 {
                    let t = k as f64 / 50.0;
                    let exact = aux.value(t).map_err(runtime)?;
                    worst = worst.max((series.eval(t) - exact).abs() / exact.abs());
                }
                v.record("series", worst, 1e-8);
            }
        }
    }
    v.finish()
}

fn component(kind: SymbolKind, sym: &ModeSymbols) -> Complex64 {
    match kind {
        SymbolKind::V1 => sym.v1,
        SymbolKind::V2 => sym.v2,
        SymbolKind::DtV1 => sym.dv1,
        SymbolKind::DtV2 => sym.dv2,
        _ => unreachable!("kernel kinds are built from two times"),
    }
}

/// Error of the fundamental pair against direct integration of the mode
/// equation, relative to the WKB envelope so zeros do not blow it up.
fn oracle_error(prop: &Propagator, t: f64, r: f64) -> Result<f64, Failure> {
    let s = prop.symbols(t, r).map_err(runtime)?;
    let o = prop.mode_oracle(r, t, 1e-12).map_err(runtime)?;
    let omega = (t.powf(prop.m()) * r).max(f64::MIN_POSITIVE);
    let pair = |y: Complex64, yp: Complex64, oy: f64, oyp: f64| {
        let amp = (oy * oy + (oyp / omega).powi(2)).sqrt();
        ((y - oy).norm() / amp).max((yp - oyp).norm() / (amp * omega))
    };
    Ok(pair(s.v1, s.dv1, o[0], o[2]).max(pair(s.v2, s.dv2, o[1], o[3])))
}

fn wave_forms(t: f64, r: f64) -> ModeSymbols {
    let (s, c) = (t * r).sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    ModeSymbols { v1: re(c), v2: re(s / r), dv1: re(-r * s), dv2: re(c) }
}

fn kernel_component(kind: SymbolKind, at_t: &ModeSymbols, at_s: &ModeSymbols) -> Complex64 {
    match kind {
        SymbolKind::W1 => at_t.v1 * at_s.v2,
        SymbolKind::W2 => at_t.v2 * at_s.v1,
        SymbolKind::DtW1 => at_t.dv1 * at_s.v2,
        SymbolKind::DtW2 => at_t.dv2 * at_s.v1,
        other => component(other, at_t),
    }
}

pub fn symbols(args: &SymbolsArgs) -> Outcome {
    let manifest = RunManifest::start("symbols", args);
    let prop = Propagator::new(args.m).map_err(usage)?;
    if !(args.t > 0.0 && args.r_max > 0.0 && args.points >= 1) {
        return Err(usage("symbols: need t > 0, r-max > 0 and at least one point"));
    }
    if args.check == SymbolCheck::Bounds {
        return bounds(args, &prop, &manifest);
    }
    let kind: SymbolKind = match &args.kind {
        Some(k) => k.parse().map_err(usage)?,
        None if args.s.is_some() => SymbolKind::W1,
        None => SymbolKind::V1,
    };
    let s = match (kind.is_kernel(), args.s) {
        (true, Some(s)) if s > 0.0 && s <= args.t => Some(s),
        (true, _) => return Err(usage(format!("symbols: kernel {kind} needs 0 < s <= t"))),
        (false, Some(_)) => return Err(usage(format!("symbols: --s only applies to kernels, not {kind}"))),
        (false, None) => None,
    };
    if args.check == SymbolCheck::WaveLimit && args.m != 0.0 {
        return Err(usage("symbols: the wave-limit check needs m = 0"));
    }
    let times: Vec<f64> = std::iter::once(args.t).chain(s).collect();
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for k in 1..=args.points {
        let r = args.r_max * k as f64 / args.points as f64;
        let at_t = prop.symbols(args.t, r).map_err(runtime)?;
        let at_s = match s {
            Some(s) => prop.symbols(s, r).map_err(runtime)?,
            None => at_t,
        };
        let value = kernel_component(kind, &at_t, &at_s);
        let residual = match args.check {
            SymbolCheck::Ode => {
                times.iter().map(|&t| oracle_error(&prop, t, r)).try_fold(0.0_f64, |a, e| e.map(|e| a.max(e)))?
            }
            SymbolCheck::Wronskian => (at_t.wronskian() - 1.0).norm().max((at_s.wronskian() - 1.0).norm()),
            SymbolCheck::WaveLimit => {
                let exact = kernel_component(kind, &wave_forms(args.t, r), &wave_forms(s.unwrap_or(args.t), r));
                (value - exact).norm()
            }
            SymbolCheck::Bounds => unreachable!("handled above"),
        };
        worst = worst.max(residual);
        rows.push(vec![num(r), num(value.re), num(value.im), num(residual)]);
    }
    write_csv(args.out.as_deref(), &["r", "re", "im", "residual"], &rows, &manifest.config_hash)?;
    let mut v = Verdicts::new("symbols");
    match args.check {
        SymbolCheck::Ode => v.record("ode", worst, 1e-6),
        SymbolCheck::Wronskian => v.record("wronskian", worst, 1e-9),
        SymbolCheck::WaveLimit => v.record("wave-limit", worst, 1e-12),
        SymbolCheck::Bounds => {}
    }
    v.finish()
}

/// Bound constants for every kind at its admissible endpoints, on a grid and
/// its refinement; they must be finite and move less than 10%.
fn bounds(args: &SymbolsArgs, prop: &Propagator, manifest: &RunManifest) -> Outcome {
    if !(args.t > 0.1 && args.r_max > 0.1) {
        return Err(usage("symbols: the bounds check needs t > 0.1 and r-max > 0.1"));
    }
    let coarse = BoundGrid::log_spaced((0.1, args.t), (0.1, args.r_max), 21, 81);
    let fine = coarse.refined();
    let mu = tricomi_core::aux_ode::mu_of(args.m);
    let kinds: Vec<SymbolKind> = match &args.kind {
        Some(k) => vec![k.parse().map_err(usage)?],
        None => SymbolKind::ALL.to_vec(),
    };
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for kind in kinds {
        for sigma in kind.endpoint_sigmas(mu) {
            let a = symbol_bound_check(prop, kind, sigma, &coarse, None).map_err(runtime)?;
            let b = symbol_bound_check(prop, kind, sigma, &fine, None).map_err(runtime)?;
            let change = if a.constant.is_finite() && b.constant.is_finite() {
                (b.constant - a.constant).abs() / a.constant
            } else {
                f64::INFINITY
            };
            worst = worst.max(change);
            rows.push(vec![kind.name().to_string(), num(sigma), num(a.constant), num(b.constant), num(change)]);
        }
    }
    write_csv(
        args.out.as_deref(),
        &["kind", "sigma", "constant", "refined_constant", "relative_change"],
        &rows,
        &manifest.config_hash,
    )?;
    let mut v = Verdicts::new("symbols");
    v.record("bounds", worst, 0.1);
    v.finish()
}
