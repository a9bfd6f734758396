//! Scalar special functions for the Gaussian family: standard normal
//! pdf/cdf/tail, a tail-accurate quantile, and the bivariate normal cdf.
//!
//! The quantile is Wichura's PPND16 rational approximation (algorithm
//! AS 241), accurate to full double precision down to probabilities of
//! order `e^-700`. The bivariate cdf is Genz's Gauss-Legendre scheme with
//! absolute error below 5e-16.

#![allow(clippy::excessive_precision)] // published coefficient tables

pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Standard normal density.
#[inline]
pub fn norm_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

/// Standard normal cdf `Φ(z)`.
#[inline]
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal survival `1 - Φ(z)`, accurate in the upper tail.
#[inline]
pub fn norm_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// `log(1 - Φ(z))` without underflow for large `z`.
///
/// Uses `erfc` while it is representable and switches to the asymptotic
/// expansion `Φ̄(z) ~ φ(z)/z (1 - 1/z² + 3/z⁴ - 15/z⁶)` beyond that.
pub fn norm_log_sf(z: f64) -> f64 {
    if z < 36.0 {
        norm_sf(z).ln()
    } else {
        let zi = 1.0 / (z * z);
        let series = 1.0 - zi * (1.0 - 3.0 * zi * (1.0 - 5.0 * zi));
        -0.5 * z * z - (z * SQRT_2PI).ln() + series.ln()
    }
}

/// Standard normal quantile `Φ⁻¹(p)` (AS 241, PPND16).
pub fn norm_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1), got {p}");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * central_ratio(r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let z = tail_quantile_from_small(r);
    if q < 0.0 {
        -z
    } else {
        z
    }
}

/// Upper-tail quantile: the `z` with `1 - Φ(z) = q`, exact for tiny `q`.
///
/// Equivalent to `norm_quantile(1 - q)` but does not lose `q` to rounding
/// when `q` is below machine epsilon.
pub fn norm_quantile_upper(q: f64) -> f64 {
    assert!(q > 0.0 && q < 1.0, "upper quantile needs q in (0,1), got {q}");
    if q > 0.075 {
        // central region: 1 - q is exact here
        return norm_quantile(1.0 - q);
    }
    tail_quantile_from_small(q)
}

/// Horner evaluation; coefficients in ascending order.
#[inline]
fn horner(t: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn central_ratio(r: f64) -> f64 {
    // |Φ⁻¹(p)| / (p - 0.5) for |p - 0.5| <= 0.425, r = 0.180625 - (p - 0.5)^2
    let num = horner(
        r,
        &[
            3.387_132_872_796_366_5,
            1.331_416_678_917_843_8e2,
            1.971_590_950_306_551_3e3,
            1.373_169_376_550_946_1e4,
            4.592_195_393_154_987e4,
            6.726_577_092_700_87e4,
            3.343_057_558_358_812_8e4,
            2.509_080_928_730_122_7e3,
        ],
    );
    let den = horner(
        r,
        &[
            1.0,
            4.231_333_070_160_091e1,
            6.871_870_074_920_579e2,
            5.394_196_021_424_751e3,
            2.121_379_430_158_659_7e4,
            3.930_789_580_009_271e4,
            2.872_908_573_572_194_3e4,
            5.226_495_278_852_545_5e3,
        ],
    );
    num / den
}

fn tail_quantile_from_small(r: f64) -> f64 {
    // positive quantile for small tail probability r
    let s = (-r.ln()).sqrt();
    if s <= 5.0 {
        let t = s - 1.6;
        horner(
            t,
            &[
                1.423_437_110_749_683_5,
                4.630_337_846_156_546,
                5.769_497_221_460_691,
                3.647_848_324_763_204_5,
                1.270_458_252_452_368_4,
                2.417_807_251_774_506e-1,
                2.272_384_498_926_918_4e-2,
                7.745_450_142_783_414e-4,
            ],
        ) / horner(
            t,
            &[
                1.0,
                2.053_191_626_637_759,
                1.676_384_830_183_803_8,
                6.897_673_349_851e-1,
                1.481_039_764_274_8e-1,
                1.519_866_656_361_645_7e-2,
                5.475_938_084_995_345e-4,
                1.050_750_071_644_416_9e-9,
            ],
        )
    } else {
        let t = s - 5.0;
        horner(
            t,
            &[
                6.657_904_643_501_103,
                5.463_784_911_164_114,
                1.784_826_539_917_291_3,
                2.965_605_718_285_048_9e-1,
                2.653_218_952_657_612_4e-2,
                1.242_660_947_388_078_4e-3,
                2.711_555_568_743_487_6e-5,
                2.010_334_399_292_288_1e-7,
            ],
        ) / horner(
            t,
            &[
                1.0,
                5.998_322_065_558_88e-1,
                1.369_298_809_227_358e-1,
                1.487_536_129_085_061_5e-2,
                7.868_691_311_456_133e-4,
                1.846_318_317_510_054_8e-5,
                1.421_511_758_316_446e-7,
                2.044_263_103_389_939_7e-15,
            ],
        )
    }
}

/// Bivariate standard normal cdf `P(X ≤ h, Y ≤ k)` with correlation `rho`.
pub fn bvn_cdf(h: f64, k: f64, rho: f64) -> f64 {
    // Genz computes the upper-quadrant probability.
    bvn_upper(-h, -k, rho).clamp(0.0, 1.0)
}

/// Bivariate standard normal survival `P(X > h, Y > k)` with correlation `rho`.
pub fn bvn_sf(h: f64, k: f64, rho: f64) -> f64 {
    bvn_upper(h, k, rho).clamp(0.0, 1.0)
}

// Gauss-Legendre abscissae/weights on [-1, 1]; 6-, 12- and 20-point rules.
const GL6: [(f64, f64); 3] = [
    (0.171_324_492_379_170_5e0, -0.932_469_514_203_152_2e0),
    (0.360_761_573_048_138_4e0, -0.661_209_386_466_264_7e0),
    (0.467_913_934_572_690_4e0, -0.238_619_186_083_197_0e0),
];
const GL12: [(f64, f64); 6] = [
    (0.047_175_336_386_511_83e0, -0.981_560_634_246_719_1e0),
    (0.106_939_325_995_318_4e0, -0.904_117_256_370_475_0e0),
    (0.160_078_328_543_346_4e0, -0.769_902_674_194_305_0e0),
    (0.203_167_426_723_065_9e0, -0.587_317_954_286_617_1e0),
    (0.233_492_536_538_354_7e0, -0.367_831_498_998_180_2e0),
    (0.249_147_045_813_402_9e0, -0.125_233_408_511_469_2e0),
];
const GL20: [(f64, f64); 10] = [
    (0.017_614_007_139_152_12e0, -0.993_128_599_185_094_9e0),
    (0.040_601_429_800_386_94e0, -0.963_971_927_277_913_8e0),
    (0.062_672_048_334_109_06e0, -0.912_234_428_251_325_9e0),
    (0.083_276_741_576_704_75e0, -0.839_116_971_822_218_8e0),
    (0.101_930_119_817_240_4e0, -0.746_331_906_460_150_8e0),
    (0.118_194_531_961_518_4e0, -0.636_053_680_726_515_0e0),
    (0.131_688_638_449_176_6e0, -0.510_867_001_950_827_1e0),
    (0.142_096_109_318_382_0e0, -0.373_706_088_715_419_6e0),
    (0.149_172_986_472_603_7e0, -0.227_785_851_141_645_1e0),
    (0.152_753_387_130_725_8e0, -0.076_526_521_133_497_33e0),
];

/// `P(X > dh, Y > dk)` for standard bivariate normal with correlation `r`.
fn bvn_upper(dh: f64, dk: f64, r: f64) -> f64 {
    let rule: &[(f64, f64)] = if r.abs() < 0.3 {
        &GL6
    } else if r.abs() < 0.75 {
        &GL12
    } else {
        &GL20
    };
    let h = dh;
    let mut k = dk;
    let mut hk = h * k;
    let mut bvn = 0.0;
    let twopi = 2.0 * std::f64::consts::PI;

    if r.abs() < 0.925 {
        if r.abs() > 0.0 {
            let hs = (h * h + k * k) / 2.0;
            let asr = r.asin();
            for &(w, x) in rule {
                for is in [-1.0, 1.0] {
                    let sn = (asr * (is * x + 1.0) / 2.0).sin();
                    bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            bvn = bvn * asr / (2.0 * twopi);
        }
        bvn + norm_sf(h) * norm_sf(k)
    } else {
        if r < 0.0 {
            k = -k;
            hk = -hk;
        }
        if r.abs() < 1.0 {
            let a2 = (1.0 - r) * (1.0 + r);
            let mut a = a2.sqrt();
            let bs = (h - k) * (h - k);
            let c = (4.0 - hk) / 8.0;
            let d = (12.0 - hk) / 16.0;
            let asr = -(bs / a2 + hk) / 2.0;
            if asr > -100.0 {
                bvn = a * asr.exp() * (1.0 - c * (bs - a2) * (1.0 - d * bs / 5.0) / 3.0
                    + c * d * a2 * a2 / 5.0);
            }
            if -hk < 100.0 {
                let b = bs.sqrt();
                let sp = SQRT_2PI * norm_sf(b / a);
                bvn -= (-hk / 2.0).exp() * sp * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
            }
            a /= 2.0;
            for &(w, x) in rule {
                for is in [-1.0, 1.0] {
                    let xs = (a * (is * x + 1.0)) * (a * (is * x + 1.0));
                    let rs = (1.0 - xs).sqrt();
                    let asr = -(bs / xs + hk) / 2.0;
                    if asr > -100.0 {
                        let sp = 1.0 + c * xs * (1.0 + d * xs);
                        let ep = (-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs;
                        bvn += a * w * asr.exp() * (ep - sp);
                    }
                }
            }
            bvn = -bvn / twopi;
        }
        if r > 0.0 {
            bvn + norm_sf(h.max(k))
        } else {
            bvn = -bvn;
            if k > h {
                if h < 0.0 {
                    bvn += norm_cdf(k) - norm_cdf(h);
                } else {
                    bvn += norm_sf(h) - norm_sf(k);
                }
            }
            bvn
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normal_cdf_matches_reference() {
        // reference values from 30-digit arithmetic
        assert_abs_diff_eq!(norm_cdf(0.0), 0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(norm_sf(1.0), 0.158_655_253_931_457_05, epsilon = 1e-16);
        assert_abs_diff_eq!(
            norm_sf(5.0),
            2.866_515_718_791_939_6e-7,
            epsilon = 1e-21
        );
        assert_abs_diff_eq!(norm_pdf(0.0), 1.0 / SQRT_2PI, epsilon = 1e-16);
    }

    #[test]
    fn log_sf_matches_reference() {
        let cases = [
            (1.0, -1.841_021_645_009_263_5),
            (5.0, -15.064_998_393_988_726),
            (10.0, -53.231_285_150_512_47),
            (20.0, -203.917_155_371_097_26),
            (37.0, -689.030_585_576_890_6),
            (50.0, -1_254.831_361_139_419_9),
            (100.0, -5_005.524_208_694_205),
            (-3.0, -1.350_809_964_748_193_8e-3),
        ];
        for (z, want) in cases {
            let got = norm_log_sf(z);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "log_sf({z}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn quantile_matches_reference() {
        let cases = [
            (0.25, -0.674_489_750_196_081_7),
            (0.975, 1.959_963_984_540_054_2),
            (1e-5, -4.264_890_793_922_824_6),
            (1e-10, -6.361_340_902_404_056),
        ];
        for (p, want) in cases {
            let got = norm_quantile(p);
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "quantile({p}) = {got}, want {want}"
            );
        }
        assert_abs_diff_eq!(norm_quantile(0.5), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn upper_quantile_handles_extreme_tails() {
        let cases = [
            (0.25, 0.674_489_750_196_081_7),
            (0.025, 1.959_963_984_540_054_2),
            ((-20.0f64).exp(), 5.879_209_356_485_336),
            (1e-50, 14.933_337_534_788_489),
            (1e-100, 21.273_453_560_965_324),
            (1e-300, 37.047_096_299_361_2),
            ((-700.0f64).exp(), 37.295_079_632_647_417),
        ];
        for (q, want) in cases {
            let got = norm_quantile_upper(q);
            assert!(
                ((got - want) / want).abs() < 1e-9,
                "upper_quantile({q}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9] {
            let z = norm_quantile(p);
            assert_abs_diff_eq!(norm_cdf(z), p, epsilon = 1e-12);
        }
        for &q in &[1e-300, 1e-100, 1e-12, 0.2, 0.6] {
            let z = norm_quantile_upper(q);
            let back = norm_log_sf(z);
            assert!(
                (back - q.ln()).abs() < 1e-8 * q.ln().abs().max(1.0),
                "round trip q={q}: log sf {back} vs {}",
                q.ln()
            );
        }
    }

    #[test]
    fn bvn_matches_reference() {
        // 30-digit quadrature references
        let cases = [
            (0.0, 0.0, 0.5, 1.0 / 3.0),
            (0.0, 0.0, -0.5, 1.0 / 6.0),
            (1.0, 1.0, 0.5, 0.745_203_586_846_749_7),
            (1.0, -1.0, 0.3, 0.148_338_209_057_422_45),
            (-1.0, -1.0, 0.8, 0.097_636_519_081_557_81),
            (2.0, 1.0, 0.9, 0.841_096_187_036_774_5),
            (-2.0, 3.0, 0.6, 0.022_750_131_297_286_947),
            (0.5, 0.5, 0.99, 0.671_586_868_358_572_2),
            (3.0, 3.0, 0.95, 0.998_109_367_283_175_7),
            (-3.0, -3.0, -0.2, 1.307_504_430_869_197_6e-7),
            (1.5, 0.3, 0.0, 0.576_630_489_440_448_9),
            (5.0, 5.0, 0.5, 0.999_999_427_521_564_9),
            (-5.0, 1.0, 0.7, 2.866_515_718_600_958_3e-7),
            (2.5, -1.5, -0.85, 0.060_958_157_913_464_09),
        ];
        for (h, k, r, want) in cases {
            let got = bvn_cdf(h, k, r);
            assert!(
                (got - want).abs() < 5e-15,
                "bvn({h},{k},{r}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn bvn_degenerate_correlations() {
        // rho -> 1: P(X<=h, Y<=k) -> Phi(min(h,k)); rho -> -1: max(Phi(h)+Phi(k)-1, 0)
        assert_abs_diff_eq!(bvn_cdf(0.7, 1.3, 0.999_999), norm_cdf(0.7), epsilon = 1e-4);
        assert_abs_diff_eq!(
            bvn_cdf(0.5, 0.5, -0.999_999),
            2.0 * norm_cdf(0.5) - 1.0,
            epsilon = 1e-4
        );
    }

    #[test]
    fn bvn_symmetry_and_marginals() {
        for &(h, k, r) in &[(0.3, -0.8, 0.6), (1.7, 0.2, -0.4), (-1.1, 2.2, 0.85)] {
            assert_abs_diff_eq!(bvn_cdf(h, k, r), bvn_cdf(k, h, r), epsilon = 1e-15);
            // sending one argument to +inf recovers the marginal
            assert_abs_diff_eq!(bvn_cdf(h, 40.0, r), norm_cdf(h), epsilon = 1e-14);
        }
    }
}
