use num_complex::Complex64;
use tricomi_core::propagator::{Propagator, PropagatorError};
use tricomi_core::symbol_bounds::{symbol_bound_check, BoundGrid, FrequencyWindow, SymbolKind};

const ORACLE_TOL: f64 = 1e-12;

/// Relative error of a pair (y, y') against the WKB envelope, which stays
/// positive through the zeros of either component.
fn envelope_errors(y: Complex64, yp: Complex64, oy: f64, oyp: f64, omega: f64) -> (f64, f64) {
    let amp = (oy * oy + (oyp / omega).powi(2)).sqrt();
    ((y - oy).norm() / amp, (yp - oyp).norm() / (amp * omega))
}

#[test]
fn symbols_match_mode_integration() {
    let mut worst = 0.0_f64;
    for m in [0.5, 1.0, 2.0] {
        let p = Propagator::new(m).unwrap();
        for r in [0.5, 1.0, 2.0, 5.0, 20.0] {
            for t in [0.3, 1.0, 3.0] {
                let s = p.symbols(t, r).unwrap();
                let o = p.mode_oracle(r, t, ORACLE_TOL).unwrap();
                let omega = t.powf(m) * r;
                let (e1, e3) = envelope_errors(s.v1, s.dv1, o[0], o[2], omega);
                let (e2, e4) = envelope_errors(s.v2, s.dv2, o[1], o[3], omega);
                let e = e1.max(e2).max(e3).max(e4);
                assert!(s.v1.im.abs() + s.v2.im.abs() + s.dv1.im.abs() + s.dv2.im.abs() < 1e-10);
                assert!(e < 1e-6, "m={m} r={r} t={t}: {e:e}");
                worst = worst.max(e);
            }
        }
    }
    assert!(worst < 1e-6);
}

#[test]
fn spot_values_against_oracle() {
    let p = Propagator::new(1.0).unwrap();
    let s = p.symbols(1.0, 2.0).unwrap();
    let o = p.mode_oracle(2.0, 1.0, ORACLE_TOL).unwrap();
    assert!((s.v1.re - o[0]).abs() < 1e-7 && (s.v2.re - o[1]).abs() < 1e-7);
    let s = p.symbols(1.5, 2.0).unwrap();
    let o = p.mode_oracle(2.0, 1.5, ORACLE_TOL).unwrap();
    assert!((s.v1.re - o[0]).abs() < 1e-6 && (s.v2.re - o[1]).abs() < 1e-6);
}

#[test]
fn wave_limit_is_exact() {
    let p = Propagator::new(0.0).unwrap();
    for r in [0.5, 1.0, 2.0, 5.0, 20.0] {
        for t in [0.3, 1.0, 3.0] {
            let s = p.symbols(t, r).unwrap();
            assert!((s.v1.re - (t * r).cos()).abs() < 1e-12);
            assert!((s.v2.re - (t * r).sin() / r).abs() < 1e-12);
            assert!((s.dv1.re + r * (t * r).sin()).abs() < 1e-12);
            assert!((s.dv2.re - (t * r).cos()).abs() < 1e-12);
        }
    }
}

#[test]
fn oracle_reproduces_wave_solutions() {
    let p = Propagator::new(0.0).unwrap();
    let tol = 1e-10;
    for (r, t) in [(1.0, 2.0), (3.0, 1.7), (0.2, 5.0)] {
        let o = p.mode_oracle(r, t, tol).unwrap();
        assert!((o[0] - (r * t).cos()).abs() < 10.0 * tol);
        assert!((o[1] - (r * t).sin() / r).abs() < 10.0 * tol * (1.0 / r).max(1.0));
    }
}

#[test]
fn oracle_wronskian_is_one() {
    let tol = 1e-10;
    for m in [0.5, 1.0, 2.0] {
        let p = Propagator::new(m).unwrap();
        for t in [0.2, 0.9, 1.6, 2.5] {
            let o = p.mode_oracle(3.0, t, tol).unwrap();
            let w = o[0] * o[3] - o[1] * o[2];
            assert!((w - 1.0).abs() < 100.0 * tol, "m={m} t={t}: {w}");
        }
    }
}

#[test]
fn wronskian_is_one_everywhere() {
    for m in [0.0, 1e-6, 0.25, 0.5, 1.0, 2.0, 3.0] {
        let p = Propagator::new(m).unwrap();
        for t in [0.0, 0.01, 0.3, 1.0, 2.0, 3.0] {
            for r in [0.0, 0.01, 0.5, 1.0, 5.0, 20.0, 100.0] {
                let w = p.symbols(t, r).unwrap().wronskian();
                assert!((w - 1.0).norm() < 1e-9, "m={m} t={t} r={r}: {w}");
            }
        }
    }
}

#[test]
fn time_derivatives_match_central_differences() {
    let cases = [(1.0, 1.3, 1.0), (0.5, 0.7, 4.0), (2.0, 1.1, 2.0), (1.0, 2.5, 10.0)];
    for (m, t, r) in cases {
        let p = Propagator::new(m).unwrap();
        let h = 1e-5 * f64::max(1.0, t);
        let (a, b) = (p.symbols(t + h, r).unwrap(), p.symbols(t - h, r).unwrap());
        let s = p.symbols(t, r).unwrap();
        let fd1 = (a.v1 - b.v1) / (2.0 * h);
        let fd2 = (a.v2 - b.v2) / (2.0 * h);
        let scale = f64::max(1.0, (t.powf(m) * r).powi(2));
        assert!((fd1 - s.dv1).norm() < 1e-6 * scale, "m={m} t={t} r={r}");
        assert!((fd2 - s.dv2).norm() < 1e-6 * scale, "m={m} t={t} r={r}");
    }
}

#[test]
fn second_differences_solve_the_mode_equation() {
    for m in [0.5, 1.0, 2.0] {
        let p = Propagator::new(m).unwrap();
        for t in [0.4, 1.0, 2.0] {
            for r in [0.5, 2.0, 8.0] {
                let h = 1e-3 * f64::max(1.0, t);
                let (a, c, b) = (p.symbols(t + h, r).unwrap(), p.symbols(t, r).unwrap(), p.symbols(t - h, r).unwrap());
                let k = t.powf(2.0 * m) * r * r;
                let scale = f64::max(1.0, k);
                let res1 = (a.v1 - 2.0 * c.v1 + b.v1) / (h * h) + k * c.v1;
                let res2 = (a.v2 - 2.0 * c.v2 + b.v2) / (h * h) + k * c.v2;
                assert!(res1.norm() < 1e-5 * scale * scale, "V1 m={m} t={t} r={r}: {}", res1.norm());
                assert!(res2.norm() < 1e-5 * scale * scale, "V2 m={m} t={t} r={r}: {}", res2.norm());
            }
        }
    }
}

#[test]
fn small_order_approaches_wave_forms() {
    let p = Propagator::new(1e-6).unwrap();
    let w = Propagator::new(0.0).unwrap();
    for t in [0.3, 1.0, 3.0] {
        for r in [0.5, 2.0, 5.0] {
            let (a, b) = (p.symbols(t, r).unwrap(), w.symbols(t, r).unwrap());
            for (x, y) in [(a.v1, b.v1), (a.v2, b.v2), (a.dv1, b.dv1), (a.dv2, b.dv2)] {
                assert!((x - y).norm() < 1e-4, "t={t} r={r}");
            }
        }
    }
}

#[test]
fn initial_conditions_hold_for_every_frequency() {
    for m in [0.0, 0.5, 1.0, 2.0] {
        let p = Propagator::new(m).unwrap();
        for r in [0.0, 0.1, 1.0, 50.0] {
            let s = p.symbols(0.0, r).unwrap();
            assert_eq!((s.v1.re, s.v2.re, s.dv1.re, s.dv2.re), (1.0, 0.0, 0.0, 1.0));
            let s = p.symbols(1e-9, r).unwrap();
            assert!((s.v1 - 1.0).norm() < 1e-12 && (s.dv2 - 1.0).norm() < 1e-12);
        }
    }
}

#[test]
fn kernel_derivative_near_diagonal_is_the_wronskian() {
    let p = Propagator::new(1.0).unwrap();
    let s = 0.5;
    let k = p.kernel(s, s + 1e-6, 1.0).unwrap();
    assert!((k.duhamel_dt() - 1.0).norm() < 1e-5);
    let k = p.kernel(1.5, 1.5 + 1e-6, 1.0).unwrap();
    assert!((k.duhamel_dt() - 1.0).norm() < 1e-5);
}

#[test]
fn kernel_derivative_matches_differences() {
    let p = Propagator::new(1.0).unwrap();
    let (s, t, r) = (0.4, 1.2, 3.0);
    let h = 1e-5;
    let a = p.kernel(s, t + h, r).unwrap();
    let b = p.kernel(s, t - h, r).unwrap();
    let k = p.kernel(s, t, r).unwrap();
    assert!(((a.w1 - b.w1) / (2.0 * h) - k.dw1).norm() < 1e-6 * 10.0);
    assert!(((a.w2 - b.w2) / (2.0 * h) - k.dw2).norm() < 1e-6 * 10.0);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(matches!(Propagator::new(-0.5), Err(PropagatorError::BadOrder(_))));
    let p = Propagator::new(1.0).unwrap();
    assert!(p.symbols(-1.0, 1.0).is_err());
    assert!(p.symbols(1.0, f64::NAN).is_err());
    let grid = BoundGrid::log_spaced((0.1, 1.0), (0.1, 1.0), 3, 3);
    let err = symbol_bound_check(&p, SymbolKind::V1, 0.5, &grid, None).unwrap_err();
    assert!(matches!(err, PropagatorError::InadmissibleSigma { .. }));
    let empty = BoundGrid { t: vec![], s: vec![], r: vec![1.0] };
    assert!(symbol_bound_check(&p, SymbolKind::V1, 0.0, &empty, None).is_err());
}

fn base_grid() -> BoundGrid {
    BoundGrid::log_spaced((0.1, 10.0), (0.1, 100.0), 41, 161)
}

#[test]
fn wave_cosine_bound_is_one() {
    let p = Propagator::new(0.0).unwrap();
    let rep = symbol_bound_check(&p, SymbolKind::V1, 0.0, &base_grid(), None).unwrap();
    assert!(rep.constant <= 1.0 + 1e-15 && rep.constant > 0.99);
}

#[test]
fn bound_constants_are_finite_and_refinement_stable() {
    let coarse = base_grid();
    let fine = coarse.refined();
    for m in [0.5, 1.0, 2.0] {
        let p = Propagator::new(m).unwrap();
        let mu = m / (2.0 * (m + 1.0));
        for kind in SymbolKind::ALL {
            for sigma in kind.endpoint_sigmas(mu) {
                let a = symbol_bound_check(&p, kind, sigma, &coarse, None).unwrap();
                let b = symbol_bound_check(&p, kind, sigma, &fine, None).unwrap();
                assert!(a.constant.is_finite() && a.constant > 0.0);
                let rel = (b.constant - a.constant).abs() / a.constant;
                assert!(rel < 0.1, "m={m} {kind} sigma={sigma}: {} -> {}", a.constant, b.constant);
            }
        }
    }
}

#[test]
fn kernel_weight_is_bounded() {
    // r |W1| (ts)^{m/2} is the sigma = -1 kernel weight.
    let p = Propagator::new(1.0).unwrap();
    let grid = base_grid();
    let rep = symbol_bound_check(&p, SymbolKind::W1, -1.0, &grid, None).unwrap();
    let (t, s, r) = rep.worst;
    let direct = r * p.kernel(s, t, r).unwrap().w1.norm() * (t * s).sqrt();
    assert!((direct - rep.constant).abs() < 1e-12 * rep.constant.max(1.0));
    assert!(rep.constant < 10.0);
}

#[test]
fn windowed_constants_do_not_exceed_the_full_one() {
    let p = Propagator::new(1.0).unwrap();
    let grid = BoundGrid::log_spaced((0.1, 10.0), (0.1, 100.0), 21, 81);
    let full = symbol_bound_check(&p, SymbolKind::DtW1, 0.0, &grid, None).unwrap().constant;
    for w in [FrequencyWindow::Low, FrequencyWindow::Middle, FrequencyWindow::High] {
        let part = symbol_bound_check(&p, SymbolKind::DtW1, 0.0, &grid, Some(w)).unwrap().constant;
        assert!(part <= full * (1.0 + 1e-12));
    }
}
