use tricomi_core::aux_ode::{data_weight, origin_constant, AuxOde, PowerSeries};

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

#[test]
fn closed_form_satisfies_the_ode() {
    for m in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let aux = AuxOde::new(m).unwrap();
        for t in log_grid(0.01, 10.0, 60) {
            let r = aux.residual(t).unwrap();
            assert!(r <= 1e-8, "m={m} t={t} residual={r}");
        }
    }
}

#[test]
fn wronskian_on_the_acceptance_grid() {
    for m in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let aux = AuxOde::new(m).unwrap();
        for t in log_grid(0.01, 10.0, 40) {
            let w = aux.wronskian(t).unwrap();
            let exact = aux.wronskian_exact(t);
            assert!((w - exact).abs() <= 1e-9 * exact, "m={m} t={t}");
        }
    }
}

#[test]
fn integrator_reproduces_cosh_for_the_wave_case() {
    let aux = AuxOde::new(0.0).unwrap();
    let tol = 1e-10;
    let (y, yp) = aux.integrate(0.1, 0.1f64.cosh(), 0.1f64.sinh(), 1.0, tol).unwrap();
    assert!((y - 1f64.cosh()).abs() <= 10.0 * tol * 1f64.cosh());
    assert!((yp - 1f64.sinh()).abs() <= 10.0 * tol * 1f64.cosh());
}

#[test]
fn integrator_tracks_closed_forms_for_m_one() {
    let aux = AuxOde::new(1.0).unwrap();
    let tol = 1e-10;
    for growing in [false, true] {
        let sol = |t| {
            if growing {
                aux.growing(t).unwrap()
            } else {
                aux.decaying(t).unwrap()
            }
        };
        let (y0, yp0) = sol(0.1);
        let (y, _) = aux.integrate(0.1, y0, yp0, 2.0, tol).unwrap();
        let (exact, _) = sol(2.0);
        let err = (y - exact).abs() / exact.abs();
        assert!(err <= 100.0 * tol, "growing={growing} err={err}");
    }
}

#[test]
fn integrator_is_linear_in_the_data() {
    let aux = AuxOde::new(1.5).unwrap();
    let (a, ap) = aux.integrate(0.2, 0.7, -0.3, 3.0, 1e-10).unwrap();
    let (b, bp) = aux.integrate(0.2, 1.4, -0.6, 3.0, 1e-10).unwrap();
    assert!((b - 2.0 * a).abs() <= 1e-12 * b.abs());
    assert!((bp - 2.0 * ap).abs() <= 1e-12 * bp.abs());
}

#[test]
fn integrator_agrees_with_series_started_solution() {
    let aux = AuxOde::new(1.0).unwrap();
    let series = PowerSeries::decaying(1.0).unwrap();
    let t0 = 0.05;
    let h = 1e-6;
    let y0 = series.eval(t0);
    let yp0 = (series.eval(t0 + h) - series.eval(t0 - h)) / (2.0 * h);
    for t in [0.5, 1.0, 2.0] {
        let (y, _) = aux.integrate(t0, y0, yp0, t, 1e-11).unwrap();
        let exact = aux.value(t).unwrap();
        assert!((y - exact).abs() <= 1e-7 * exact, "t={t}");
    }
}

#[test]
fn limits_at_the_origin() {
    for m in [0.5, 1.0, 2.0] {
        let aux = AuxOde::new(m).unwrap();
        let mu = aux.mu();
        let c_plus = origin_constant(m, mu).unwrap();
        let c_minus = origin_constant(m, -mu).unwrap();
        let t: f64 = 1e-6;
        assert!((aux.value(t).unwrap() - c_plus).abs() <= 1e-4 * c_plus, "m={m}");
        let ratio = aux.deriv(t).unwrap() / t.powf(2.0 * m);
        assert!((ratio + c_minus).abs() <= 1e-3 * c_minus, "m={m} ratio={ratio}");
    }
}

#[test]
fn large_time_asymptotics() {
    for m in [0.0, 0.5, 1.0, 2.0] {
        let aux = AuxOde::new(m).unwrap();
        let t: f64 = 10.0;
        let ratio = aux.value(t).unwrap() / aux.large_time_profile(t);
        assert!((ratio - 1.0).abs() <= 5.0 * t.powf(-(m + 1.0)), "m={m} ratio={ratio}");
        let dratio = aux.deriv(t).unwrap() / (-aux.large_time_profile(t) * t.powf(m));
        assert!((dratio - 1.0).abs() <= 5.0 * t.powf(-(m + 1.0)), "m={m} dratio={dratio}");
    }
}

#[test]
fn data_weight_is_ratio_of_origin_constants() {
    for m in [0.0, 0.25, 1.0, 2.0, 7.5] {
        let mu = m / (2.0 * (m + 1.0));
        let ratio = origin_constant(m, mu).unwrap() / origin_constant(m, -mu).unwrap();
        assert!((data_weight(m).unwrap() - ratio).abs() <= 1e-12 * ratio);
    }
}

#[test]
fn series_matches_bessel_form_on_unit_interval() {
    for m in [0.0, 1.0, 2.0] {
        for series in [
            PowerSeries::decaying(m).unwrap(),
            PowerSeries::growing(m).unwrap(),
            PowerSeries::new(m, 0.3, -1.2).unwrap(),
        ] {
            for i in 1..=50 {
                let t = i as f64 / 50.0;
                let a = series.eval(t);
                let b = series.bessel_form(t).unwrap();
                assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-300), "m={m} t={t} {a} {b}");
            }
        }
    }
}

#[test]
fn decaying_series_equals_closed_form() {
    for m in [0.0, 1.0, 2.0] {
        let aux = AuxOde::new(m).unwrap();
        let series = PowerSeries::decaying(m).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let exact = aux.value(t).unwrap();
            assert!((series.eval(t) - exact).abs() <= 1e-10 * exact, "m={m} t={t}");
        }
    }
}

#[test]
fn series_coefficients_match_gamma_closed_form() {
    for m in [0.0, 1.0, 2.0, 4.0] {
        let s = PowerSeries::new(m, 1.3, -0.4).unwrap();
        for h in 0..60 {
            s.coeff(h).unwrap();
        }
    }
    let s = PowerSeries::new(1.0, 1.0, 0.0).unwrap();
    let (cm, _) = s.bessel_constants().unwrap();
    let expected = tricomi_core::specfun::gamma(0.25).unwrap() * 4f64.powf(-0.75);
    assert!((cm - expected).abs() < 1e-15 * expected);
}

#[test]
fn growing_solution_satisfies_the_ode() {
    use tricomi_core::specfun::{bessel_i, bessel_i_prime};
    // t^(m+1/2) I_nu(z) with z = t^(m+1)/(m+1), differentiated through I'
    for m in [0.0, 0.5, 1.0, 2.0] {
        let aux = AuxOde::new(m).unwrap();
        let nu = 0.5 + aux.mu();
        for t in log_grid(0.05, 10.0, 50) {
            let z = tricomi_core::aux_ode::phase(m, t);
            let (y, yp) = aux.growing(t).unwrap();
            let low = nu - 1.0;
            let ypp = (2.0 * m + 0.5) * t.powf(2.0 * m - 0.5) * bessel_i(low, z).unwrap()
                + t.powf(3.0 * m + 0.5) * bessel_i_prime(low, z).unwrap();
            let w = t.powf(2.0 * m);
            let res = (ypp - 2.0 * m / t * yp - w * y).abs() / (ypp.abs() + w * y.abs());
            assert!(res <= 1e-8, "m={m} t={t} residual={res}");
        }
    }
}

#[test]
fn sign_properties() {
    for m in [0.0, 0.5, 1.0, 2.0] {
        let aux = AuxOde::new(m).unwrap();
        for t in log_grid(0.05, 10.0, 50) {
            let (y, yp) = aux.decaying(t).unwrap();
            assert!(y > 0.0 && yp < 0.0, "m={m} t={t}");
        }
    }
}

#[test]
fn asymptotic_ratios_approach_one_monotonically() {
    for m in [0.5, 1.0] {
        let aux = AuxOde::new(m).unwrap();
        let ts: Vec<f64> = (0..=60).map(|k| 5.0 + 0.25 * k as f64).collect();
        let value: Vec<f64> = ts.iter().map(|&t| aux.value(t).unwrap() / aux.large_time_profile(t)).collect();
        let slope: Vec<f64> =
            ts.iter().map(|&t| aux.deriv(t).unwrap() / (-aux.large_time_profile(t) * t.powf(m))).collect();
        for w in value.windows(2) {
            assert!(w[1] <= w[0] && w[1] >= 1.0, "m={m}: value ratio {w:?}");
        }
        for w in slope.windows(2) {
            assert!(w[1] >= w[0] && w[1] <= 1.0, "m={m}: slope ratio {w:?}");
        }
        assert!((value[60] - 1.0).abs() < 5.0 * 20f64.powf(-(m + 1.0)));
    }
}

#[test]
fn wronskian_spot_values() {
    assert!((AuxOde::new(1.0).unwrap().wronskian(1.0).unwrap() - 2.0).abs() < 1e-12);
    assert!((AuxOde::new(0.5).unwrap().wronskian(2.0).unwrap() - 3.0).abs() < 3e-12);
    for t in [0.3, 1.0, 4.0] {
        assert!((AuxOde::new(0.0).unwrap().wronskian(t).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn wave_case_values() {
    let aux = AuxOde::new(0.0).unwrap();
    let c = (std::f64::consts::PI / 2.0).sqrt();
    assert!((aux.value(0.0).unwrap() - 1.2533141373).abs() < 1e-10);
    assert!((aux.value(1.0).unwrap() - 0.4610685044).abs() < 1e-10);
    for t in [0.5, 1.0, 2.0] {
        assert!((aux.value(t).unwrap() - c * (-t).exp()).abs() < 1e-14);
    }
    let (g, _) = aux.growing(1.0).unwrap();
    assert!((g - 0.9376748882).abs() < 1e-10);
}

#[test]
fn origin_constant_spot_values() {
    let root_half_pi = (std::f64::consts::PI / 2.0).sqrt();
    assert!((origin_constant(0.0, 0.0).unwrap() - root_half_pi).abs() < 1e-15);
    let gamma_three_quarters = 1.225_416_702_465_177_6;
    let expect = 2f64.sqrt() * gamma_three_quarters;
    assert!((origin_constant(1.0, 0.25).unwrap() - expect).abs() < 1e-14 * expect);
}

#[test]
fn partial_sums_of_the_series() {
    let cosh = PowerSeries::new(0.0, 1.0, 0.0).unwrap();
    assert!((cosh.partial_sum(0.5, 10) - 1.1276259652).abs() < 1e-10);
    assert!((cosh.partial_sum(0.5, 10) - 0.5f64.cosh()).abs() < 1e-15);

    let s = PowerSeries::new(1.0, 1.0, 0.0).unwrap();
    assert_eq!(s.coeff(4).unwrap(), 0.25);
    assert_eq!(s.coeff(1).unwrap(), 0.0);
    let oracle = s.bessel_form(0.8).unwrap();
    assert!((s.partial_sum(0.8, 40) - oracle).abs() < 1e-9 * oracle.abs());
}

#[test]
fn coefficient_vanishing_pattern() {
    for m in [0.0, 1.0, 2.0, 3.0] {
        let s = PowerSeries::new(m, 0.7, 1.9).unwrap();
        let period = 2 * m as usize + 2;
        for h in 0..=20 * period {
            let c = s.coeff(h).unwrap();
            let r = h % period;
            if r != 0 && r != period - 1 {
                assert_eq!(c, 0.0, "m={m} h={h}");
            } else {
                assert!(c != 0.0 || c.abs() < f64::MIN_POSITIVE);
            }
        }
    }
}
