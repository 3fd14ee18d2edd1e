use super::{Result, SpecFunError};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Taylor coefficients of 1/Gamma(1 + x) about x = 0.
const RGAMMA1P: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_9,
    -0.042_002_635_034_095_24,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_34,
    -0.009_621_971_527_876_974,
    0.007_218_943_246_663_1,
    -0.001_165_167_591_859_065,
    -0.000_215_241_674_114_951,
    0.000_128_050_282_388_116_2,
    -2.013_485_478_078_824e-5,
    -1.250_493_482_142_670_7e-6,
    1.133_027_231_981_696e-6,
    -2.056_338_416_977_607e-7,
    6.116_095_104_481_416e-9,
    5.002_007_644_469_223e-9,
    -1.181_274_570_487_02e-9,
    1.043_426_711_691_100_5e-10,
    7.782_263_439_905_071e-12,
    -3.696_805_618_642_206e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_507e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_260_8e-15,
    -1.181_259_301_697_458_8e-16,
    1.186_692_254_751_600_3e-18,
];

/// sin(pi x) with exact argument reduction, so zeros at the integers are exact.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn lanczos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // split the power so that t^(x+1/2) e^-t does not overflow before ~171
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc
}

pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(SpecFunError::Invalid("Gamma of NaN".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(SpecFunError::Pole(x));
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * lanczos(1.0 - x)))
    } else {
        Ok(lanczos(x))
    }
}

/// 1/Gamma(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        sin_pi(x) * lanczos(1.0 - x) / PI
    } else {
        1.0 / lanczos(x)
    }
}

/// Temme's auxiliary functions for |mu| <= 1/2:
/// `gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu)`, `gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2`,
/// together with `1/G(1+mu)` and `1/G(1-mu)`.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let x2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    // even powers feed gam2, odd powers feed gam1
    for j in (0..RGAMMA1P.len()).rev() {
        if j % 2 == 0 {
            even = even * x2 + RGAMMA1P[j];
        } else {
            odd = odd * x2 + RGAMMA1P[j];
        }
    }
    let gam1 = -odd;
    let gam2 = even;
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_integer_values() {
        let sqrt_pi = PI.sqrt();
        assert!((gamma(0.5).unwrap() / sqrt_pi - 1.0).abs() < 1e-14);
        assert!((gamma(-0.5).unwrap() / (-2.0 * sqrt_pi) - 1.0).abs() < 1e-14);
        assert!((gamma(1.5).unwrap() / (0.5 * sqrt_pi) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn factorials() {
        let mut f = 1.0_f64;
        for n in 1..30 {
            let g = gamma(n as f64).unwrap();
            assert!((g / f - 1.0).abs() < 1e-13, "n = {n}");
            f *= n as f64;
        }
    }

    #[test]
    fn poles_are_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert_eq!(gamma(x), Err(SpecFunError::Pole(x)));
            assert_eq!(rgamma(x), 0.0);
        }
    }

    #[test]
    fn sin_pi_is_exact_at_integers() {
        for k in -5..=5 {
            assert_eq!(sin_pi(k as f64), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-2.5) + 1.0).abs() < 1e-16);
    }

    #[test]
    fn temme_gammas_match_direct_reciprocals() {
        for mu in [-0.5, -0.3, -0.01, 0.2, 0.5] {
            let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
            let rp = rgamma(1.0 + mu);
            let rm = rgamma(1.0 - mu);
            assert!((gampl - rp).abs() < 1e-15, "{mu}");
            assert!((gammi - rm).abs() < 1e-15, "{mu}");
            assert!((gam2 - 0.5 * (rm + rp)).abs() < 1e-15);
            assert!((gam1 - (rm - rp) / (2.0 * mu)).abs() < 1e-13);
        }
        let (gam1, _, _, _) = temme_gammas(0.0);
        assert!((gam1 + 0.577_215_664_901_532_9).abs() < 1e-16);
    }
}
