//! Small shared numeric helpers: rank-based order statistics and the
//! standard normal quantile function.

/// Order statistic of `sorted` at probability `p` by the rank rule
/// `ceil(p * m)` (1-indexed, clamped to the sample range).
///
/// This is the convention used for every ensemble summary in this crate:
/// bootstrap confidence limits, quartiles of coefficient draws, and
/// per-cell interquartile ranges of replicate maps.
pub fn rank_quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "rank_quantile_sorted on empty slice");
    assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    let m = sorted.len();
    let rank = (p * m as f64).ceil() as usize;
    sorted[rank.clamp(1, m) - 1]
}

/// Like [`rank_quantile_sorted`] but sorts a scratch copy first.
pub fn rank_quantile(values: &[f64], p: f64) -> f64 {
    let mut scratch = values.to_vec();
    scratch.sort_by(|a, b| a.total_cmp(b));
    rank_quantile_sorted(&scratch, p)
}

/// Sample mean.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
pub fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Quantile function of the standard normal distribution.
///
/// Wichura's PPND16 rational approximations, accurate to ~1e-16 over the
/// open unit interval. Returns +/- infinity at the endpoints.
pub fn normal_quantile(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_812_8e4) * r
            + 6.726_577_092_700_87e4)
            * r
            + 4.592_195_393_154_987e4)
            * r
            + 1.373_169_376_550_946e4)
            * r
            + 1.971_590_950_306_551_3e3)
            * r
            + 1.331_416_678_917_843_8e2)
            * r
            + 3.387_132_872_796_366_5;
        let den = ((((((5.226_495_278_852_545_5e3 * r + 2.872_908_573_572_194_3e4) * r
            + 3.930_789_580_009_271e4)
            * r
            + 2.121_379_430_158_659_7e4)
            * r
            + 5.394_196_021_424_751e3)
            * r
            + 6.871_870_074_920_579e2)
            * r
            + 4.231_333_070_160_091e1)
            * r
            + 1.0;
        return q * num / den;
    }

    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 1.519_866_656_361_645_7e-2)
            * r
            + 1.481_039_764_274_800_8e-1)
            * r
            + 6.897_673_349_851e-1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_758_8)
            * r
            + 1.0;
        num / den
    } else {
        let r = r - 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_8e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 1.487_536_129_085_061_5e-2)
            * r
            + 1.369_298_809_227_358e-1)
            * r
            + 5.998_322_065_558_88e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_quantile_reference_values() {
        assert_eq!(normal_quantile(0.5), 0.0);
        assert_relative_eq!(normal_quantile(0.975), 1.959963984540054, max_relative = 1e-14);
        assert_relative_eq!(normal_quantile(0.025), -1.959963984540054, max_relative = 1e-14);
        assert_relative_eq!(normal_quantile(0.05), -1.6448536269514729, max_relative = 1e-14);
        assert_relative_eq!(
            normal_quantile(0.8413447460685429),
            1.0,
            max_relative = 1e-12
        );
        // Deep tail (exercises the r > 5 branch).
        assert_relative_eq!(normal_quantile(1e-12), -7.034483825301131, max_relative = 1e-12);
    }

    #[test]
    fn normal_quantile_symmetry() {
        for &p in &[0.01, 0.1, 0.3, 0.49, 0.0001, 1e-9] {
            assert_relative_eq!(
                normal_quantile(p),
                -normal_quantile(1.0 - p),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn rank_quantile_examples() {
        let v: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(rank_quantile(&v, 0.25), 25.0);
        assert_eq!(rank_quantile(&v, 0.75), 75.0);
        assert_eq!(rank_quantile(&v, 0.025), 3.0);
        assert_eq!(rank_quantile(&v, 0.975), 98.0);
        assert_eq!(rank_quantile(&v, 1.0), 100.0);
        // Tiny p clamps to the smallest observation.
        assert_eq!(rank_quantile(&v, 0.0001), 1.0);
    }

    #[test]
    fn sd_of_constant_is_zero() {
        assert_eq!(sample_sd(&[4.0, 4.0, 4.0]), 0.0);
    }
}
