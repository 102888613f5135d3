mod common;

use approx::assert_relative_eq;
use iarma_core::special::{chi2_sf, gamma_p, normal_cdf, normal_quantile, normal_sf};
use iarma_core::{acf, ljung_box, qq_data};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};
use statrs::function::gamma::gamma_lr;

fn white_noise<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

#[test]
fn normal_functions_match_statrs() {
    let z = Normal::new(0.0, 1.0).unwrap();
    for i in 1..2000 {
        let p = i as f64 / 2000.0;
        assert_relative_eq!(normal_quantile(p), z.inverse_cdf(p), epsilon = 1e-9, max_relative = 1e-9);
    }
    for p in [1e-12, 1e-8, 1e-5, 1.0 - 1e-8] {
        assert_relative_eq!(normal_quantile(p), z.inverse_cdf(p), max_relative = 1e-8);
    }
    // statrs is itself accurate to about 1e-10 in the tails
    for i in -80..=80 {
        let x = i as f64 / 10.0;
        assert_relative_eq!(normal_cdf(x), z.cdf(x), epsilon = 1e-15, max_relative = 1e-9);
        assert_relative_eq!(normal_sf(x), z.sf(x), epsilon = 1e-300, max_relative = 1e-9);
    }
}

#[test]
fn high_precision_reference_values() {
    // 40-digit arbitrary-precision evaluations
    let cdf = [
        (-8.0, 6.2209605742717841235e-16),
        (-6.0, 9.865876450376981407e-10),
        (-4.2, 1.3345749015906327883e-5),
        (-2.0, 0.0227501319481792072),
        (0.5, 0.69146246127401310364),
        (3.0, 0.99865010196836990547),
    ];
    for (x, v) in cdf {
        assert_relative_eq!(normal_cdf(x), v, max_relative = 1e-13);
        assert_relative_eq!(normal_sf(-x), v, max_relative = 1e-13);
    }
    let quantiles = [
        (1e-12, -7.0344838253011319298),
        (1e-6, -4.7534243088228989482),
        (0.025, -1.9599639845400542355),
        (0.9, 1.281551565544600467),
    ];
    for (p, q) in quantiles {
        assert_relative_eq!(normal_quantile(p), q, max_relative = 1e-14);
    }
    let chi2 = [
        (50.0, 10.0, 2.6690834249044956397e-7),
        (200.0, 100.0, 1.1784500720979422446e-8),
        (0.01, 1.0, 0.92034432544594203624),
    ];
    for (x, df, v) in chi2 {
        assert_relative_eq!(chi2_sf(x, df), v, max_relative = 1e-12);
    }
}

#[test]
fn chi_square_matches_statrs() {
    for df in [1.0, 2.0, 3.0, 8.0, 10.0, 28.5, 100.0] {
        let dist = ChiSquared::new(df).unwrap();
        for i in 1..=200 {
            let x = i as f64 * df / 40.0;
            let expected = dist.sf(x);
            let got = chi2_sf(x, df);
            assert_relative_eq!(got, expected, epsilon = 1e-14, max_relative = 1e-9);
        }
    }
    for (a, x) in [(0.5, 0.1), (3.0, 2.5), (20.0, 25.0), (50.0, 10.0)] {
        assert_relative_eq!(gamma_p(a, x), gamma_lr(a, x), epsilon = 1e-14, max_relative = 1e-10);
    }
}

#[test]
fn white_noise_acf_stays_in_band() {
    let mut rng = common::rng(41);
    let (mut outside, mut total) = (0usize, 0usize);
    for _ in 0..200 {
        let x = white_noise(&mut rng, 1000);
        let est = acf(&x, 20).unwrap();
        outside += est.outside_band();
        total += est.max_lag();
    }
    let rate = outside as f64 / total as f64;
    // nominal 5%; binomial se over 4000 lags is about 0.0034
    assert!((rate - 0.05).abs() < 0.012, "rate {rate}");
}

#[test]
fn ljung_box_has_nominal_size() {
    let mut rng = common::rng(42);
    let rejections = (0..2000)
        .filter(|_| {
            let x = white_noise(&mut rng, 500);
            !ljung_box(&x, 10, 0).unwrap()[9].passes(0.05)
        })
        .count();
    let rate = rejections as f64 / 2000.0;
    assert!((0.035..=0.065).contains(&rate), "rate {rate}");
}

#[test]
fn ljung_box_rejects_correlated_series() {
    let mut rng = common::rng(43);
    let e = white_noise(&mut rng, 501);
    let x: Vec<f64> = e.windows(2).map(|w| w[1] + 0.5 * w[0]).collect();
    let lb = ljung_box(&x, 10, 0).unwrap();
    assert!(lb[9].p_value.unwrap() < 1e-6);
}

#[test]
fn qq_slope_is_one_for_normal_data() {
    let mut rng = common::rng(44);
    let x = white_noise(&mut rng, 2000);
    let qq = qq_data(&x).unwrap();
    let n = qq.len() as f64;
    let (mx, my) = (
        qq.iter().map(|p| p.0).sum::<f64>() / n,
        qq.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let sxy: f64 = qq.iter().map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = qq.iter().map(|(a, _)| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    assert!(qq.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1));
}
