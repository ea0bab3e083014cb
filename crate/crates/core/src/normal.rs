//! Univariate and bivariate standard normal distribution functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Φ(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Φ⁻¹(p) for p in (0,1).
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("quantile needs p in (0,1), got {p}")));
    }
    let x = wichura_as241(p);
    // one Halley step against Φ brings the round trip to ~1 ulp
    let e = std_normal_cdf(x) - p;
    let u = e / std_normal_pdf(x);
    Ok(x - u / (1.0 + 0.5 * x * u))
}

fn poly(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Wichura's AS241 (PPND16) rational approximations.
fn wichura_as241(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_5,
        1.331_416_678_917_843_8e2,
        1.971_590_950_306_551_3e3,
        1.373_169_376_550_946e4,
        4.592_195_393_154_987e4,
        6.726_577_092_700_87e4,
        3.343_057_558_358_813e4,
        2.509_080_928_730_122_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091e1,
        6.871_870_074_920_579e2,
        5.394_196_021_424_751e3,
        2.121_379_430_158_659_7e4,
        3.930_789_580_009_271e4,
        2.872_908_573_572_194_3e4,
        5.226_495_278_852_545e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_546,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        2.417_807_251_774_506e-1,
        2.272_384_498_926_918_4e-2,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        6.897_673_349_851e-1,
        1.481_039_764_274_800_8e-1,
        1.519_866_656_361_645_7e-2,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_9e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        2.965_605_718_285_048_7e-1,
        2.653_218_952_657_612_4e-2,
        1.242_660_947_388_078_4e-3,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_88e-1,
        1.369_298_809_227_358e-1,
        1.487_536_129_085_061_5e-2,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_7e-15,
    ];
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

// Gauss-Legendre abscissae (negative half) and weights for 6, 12 and 20 points.
const GL6: [(f64, f64); 3] = [
    (0.171_324_492_379_170_5, -0.932_469_514_203_152_2),
    (0.360_761_573_048_138_4, -0.661_209_386_466_264_7),
    (0.467_913_934_572_690_4, -0.238_619_186_083_197),
];
const GL12: [(f64, f64); 6] = [
    (0.047_175_336_386_511_77, -0.981_560_634_246_719_1),
    (0.106_939_325_995_318_3, -0.904_117_256_370_475),
    (0.160_078_328_543_346_4, -0.769_902_674_194_305),
    (0.203_167_426_723_065_9, -0.587_317_954_286_617_1),
    (0.233_492_536_538_354_7, -0.367_831_498_998_180_2),
    (0.249_147_045_813_402_9, -0.125_233_408_511_469_2),
];
const GL20: [(f64, f64); 10] = [
    (0.017_614_007_139_152_12, -0.993_128_599_185_094_9),
    (0.040_601_429_800_386_94, -0.963_971_927_277_913_8),
    (0.062_672_048_334_109_06, -0.912_234_428_251_326),
    (0.083_276_741_576_704_75, -0.839_116_971_822_218_8),
    (0.101_930_119_817_240_4, -0.746_331_906_460_150_8),
    (0.118_194_531_961_518_4, -0.636_053_680_726_515),
    (0.131_688_638_449_176_6, -0.510_867_001_950_827_1),
    (0.142_096_109_318_382_1, -0.373_706_088_715_419_6),
    (0.149_172_986_472_603_7, -0.227_785_851_141_645_1),
    (0.152_753_387_130_725_9, -0.076_526_521_133_497_33),
];

/// `P(X > h, Y > k)` for a standard bivariate normal with correlation
/// `r >= 0` (Drezner–Wesolowsky single-integral form with Genz's
/// refinements for `r` close to 1).
fn upper_orthant(h: f64, k: f64, r: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&r));
    let quad: &[(f64, f64)] = if r < 0.3 {
        &GL6
    } else if r < 0.75 {
        &GL12
    } else {
        &GL20
    };
    let hk = h * k;
    if r <= 0.925 {
        let mut bvn = 0.0;
        if r > 0.0 {
            let hs = (h * h + k * k) / 2.0;
            let asr = 0.5 * r.asin();
            for &(w, x) in quad {
                for sign in [-1.0, 1.0] {
                    let sn = (asr * (sign * x + 1.0)).sin();
                    bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            bvn *= asr / (2.0 * PI);
        }
        return bvn + std_normal_cdf(-h) * std_normal_cdf(-k);
    }

    let mut bvn = 0.0;
    if r < 1.0 {
        let a_s = (1.0 - r) * (1.0 + r);
        let mut a = a_s.sqrt();
        let b_s = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        let asr = -0.5 * (b_s / a_s + hk);
        if asr > -100.0 {
            bvn = a * asr.exp() * (1.0 - c * (b_s - a_s) * (1.0 - d * b_s / 5.0) / 3.0 + c * d * a_s * a_s / 5.0);
        }
        if -hk < 100.0 {
            let b = b_s.sqrt();
            bvn -= (-0.5 * hk).exp()
                * (2.0 * PI).sqrt()
                * std_normal_cdf(-b / a)
                * b
                * (1.0 - c * b_s * (1.0 - d * b_s / 5.0) / 3.0);
        }
        a /= 2.0;
        for &(w, x) in quad {
            for sign in [-1.0, 1.0] {
                let xs = (a * (sign * x + 1.0)).powi(2);
                let rs = (1.0 - xs).sqrt();
                let asr = -0.5 * (b_s / xs + hk);
                if asr > -100.0 {
                    bvn += a
                        * w
                        * asr.exp()
                        * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs - (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn /= -2.0 * PI;
    }
    bvn + std_normal_cdf(-h.max(k))
}

/// `Φ₂(h, k; r) = P(X <= h, Y <= k)` for a standard bivariate normal with
/// correlation `r` in [-1, 1].
pub fn bivariate_normal_cdf(h: f64, k: f64, r: f64) -> f64 {
    if h == f64::NEG_INFINITY || k == f64::NEG_INFINITY {
        return 0.0;
    }
    if h == f64::INFINITY {
        return std_normal_cdf(k);
    }
    if k == f64::INFINITY {
        return std_normal_cdf(h);
    }
    let p = if r >= 0.0 {
        upper_orthant(-h, -k, r)
    } else {
        std_normal_cdf(h) - upper_orthant(-h, k, -r)
    };
    p.clamp(0.0, 1.0)
}

/// Standard bivariate normal density.
pub fn bivariate_normal_pdf(x: f64, y: f64, r: f64) -> f64 {
    let s = 1.0 - r * r;
    (-(x * x - 2.0 * r * x * y + y * y) / (2.0 * s)).exp() / (2.0 * PI * s.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Φ₂(h,k;r) = ∫_{-∞}^{h} φ(x) Φ((k - r x)/√(1-r²)) dx,
    /// by composite Simpson on a truncated range.
    fn conditional_quadrature(h: f64, k: f64, r: f64) -> f64 {
        let lo = -12.0_f64;
        let n = 200_000;
        let step = (h - lo) / n as f64;
        let s = (1.0 - r * r).sqrt();
        let f = |x: f64| std_normal_pdf(x) * std_normal_cdf((k - r * x) / s);
        let mut acc = f(lo) + f(h);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + step * i as f64);
        }
        acc * step / 3.0
    }

    #[test]
    fn cdf_and_quantile_fixed_points() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
    }

    #[test]
    fn quantile_round_trip() {
        let mut p = 1e-10;
        while p < 1.0 - 1e-10 {
            let back = std_normal_cdf(std_normal_quantile(p).unwrap());
            assert!((back - p).abs() <= 1e-12, "p={p} back={back}");
            p = if p < 0.01 { p * 1.7 } else { p + 0.0037 };
        }
        let p = 1.0 - 1e-10;
        assert!((std_normal_cdf(std_normal_quantile(p).unwrap()) - p).abs() <= 1e-12);
    }

    #[test]
    fn median_orthant_formula() {
        for r in [-0.9_f64, -0.5, 0.0, 0.3, 0.5, 0.8, 0.95, 0.99] {
            let expected = 0.25 + r.asin() / (2.0 * PI);
            let got = bivariate_normal_cdf(0.0, 0.0, r);
            assert!((got - expected).abs() < 1e-14, "r={r}: {got} vs {expected}");
        }
    }

    #[test]
    fn agrees_with_conditional_quadrature() {
        for &(h, k, r) in &[
            (0.3, -0.7, 0.5),
            (-1.2, 0.4, -0.5),
            (1.5, 1.1, 0.95),
            (-0.4, -2.0, -0.97),
            (0.0, 1.0, 0.2),
            (-2.5, -2.5, 0.5),
        ] {
            let a = bivariate_normal_cdf(h, k, r);
            let b = conditional_quadrature(h, k, r);
            assert!((a - b).abs() < 1e-10, "({h},{k},{r}): {a} vs {b}");
        }
    }

    #[test]
    fn marginal_limits() {
        assert!((bivariate_normal_cdf(0.7, 40.0, 0.5) - std_normal_cdf(0.7)).abs() < 1e-15);
        assert_eq!(bivariate_normal_cdf(f64::NEG_INFINITY, 0.3, 0.5), 0.0);
    }
}
