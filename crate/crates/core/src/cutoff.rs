//! Smooth transition functions.
//!
//! The step is `e^{-1/(1-x)} / (e^{-1/(1-x)} + e^{-1/x})`, written as the
//! logistic `1 / (1 + e^{g(x)})` with `g(x) = 1/(1-x) - 1/x` so that neither
//! exponential underflows near the ends.

fn exponent(x: f64) -> (f64, f64, f64) {
    let (a, b) = (1.0 / x, 1.0 / (1.0 - x));
    (b - a, a * a + b * b, 2.0 * (b * b * b - a * a * a))
}

fn logistic(g: f64) -> f64 {
    if g > 0.0 {
        let e = (-g).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + g.exp())
    }
}

/// C^∞ step: 1 for `x <= 0`, 0 for `x >= 1`, strictly decreasing between.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    logistic(exponent(x).0)
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_deriv(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let (g, g1, _) = exponent(x);
    let s = logistic(g);
    -s * (1.0 - s) * g1
}

/// Second derivative of [`smooth_step`].
pub fn smooth_step_second(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let (g, g1, g2) = exponent(x);
    let s = logistic(g);
    let q = s * (1.0 - s);
    // s' = -q g', q' = s'(1 - 2s)
    -q * g2 + q * g1 * g1 * (1.0 - 2.0 * s)
}
