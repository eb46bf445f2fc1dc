mod common;

use approx::assert_abs_diff_eq;
use clc_core::analysis::special::student_t_two_tailed;
use clc_core::analysis::{correlate_consistency, linear_regression, pearson, SimilarityTable};
use clc_core::ConsistencyMatrix;
use common::lang;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Textbook raw-sum formula.
fn oracle_r(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}

/// Γ(k/2) for positive integer k.
fn gamma_half(k: u32) -> f64 {
    let (mut g, mut z) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while z < k as f64 / 2.0 - 1e-9 {
        g *= z;
        z += 1.0;
    }
    g
}

/// Two-tailed tail mass of Student's t by Simpson's rule on the density.
fn oracle_p(t: f64, dof: u32) -> f64 {
    let nu = dof as f64;
    let c = gamma_half(dof + 1) / ((nu * std::f64::consts::PI).sqrt() * gamma_half(dof));
    let pdf = |x: f64| c * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0);
    let steps = 200_000;
    let h = t.abs() / steps as f64;
    let mut s = pdf(0.0) + pdf(t.abs());
    for i in 1..steps {
        s += pdf(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    1.0 - 2.0 * s * h / 3.0
}

#[test]
fn pearson_against_raw_sums_on_random_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..100 {
        let n = rng.gen_range(3..60);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| rng.gen_range(-1.0..1.0) * 3.0 + v * rng.gen_range(-1.0..1.0))
            .collect();
        let got = pearson(&x, &y).unwrap();
        assert_abs_diff_eq!(got.r, oracle_r(&x, &y), epsilon = 1e-9);
        assert_eq!(got.n, n);
    }
}

#[test]
fn p_value_against_density_quadrature() {
    for &(r, n) in &[(0.6f64, 20u32), (0.8, 5), (0.3, 12), (-0.45, 30), (0.05, 8)] {
        let dof = n - 2;
        let t = r * (dof as f64 / (1.0 - r * r)).sqrt();
        assert_abs_diff_eq!(
            student_t_two_tailed(t, dof as f64),
            oracle_p(t, dof),
            epsilon = 1e-9
        );
    }
}

#[test]
fn p_value_for_constructed_sample_with_r_0_6() {
    // y = 0.6·x̂ + 0.8·ẑ with x̂, ẑ centered, unit and orthogonal gives r = 0.6 exactly
    let n = 20;
    let center = |v: Vec<f64>| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.into_iter().map(|a| a - m).collect::<Vec<_>>()
    };
    let unit = |v: Vec<f64>| {
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / norm).collect::<Vec<_>>()
    };
    let x = unit(center((0..n).map(|i| i as f64).collect()));
    let z0 = center((0..n).map(|i| ((i * 7) % 11) as f64).collect());
    let proj: f64 = z0.iter().zip(&x).map(|(a, b)| a * b).sum();
    let z = unit(z0.iter().zip(&x).map(|(a, b)| a - proj * b).collect());
    let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 0.6 * a + 0.8 * b).collect();
    let c = pearson(&x, &y).unwrap();
    assert_abs_diff_eq!(c.r, 0.6, epsilon = 1e-12);
    let t = 0.6 * (18.0f64 / 0.64).sqrt();
    assert_abs_diff_eq!(c.p_value, oracle_p(t, 18), epsilon = 1e-6);
}

#[test]
fn regression_against_normal_equations() {
    let x = [1.0, 2.0, 4.0, 5.0, 7.0];
    let y = [1.5, 2.9, 4.2, 6.8, 7.1];
    // [n Σx; Σx Σx²] [b; m] = [Σy; Σxy] by Cramer's rule
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sy: f64 = y.iter().sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let intercept = (sy * sxx - sx * sxy) / det;
    let slope = (n * sxy - sx * sy) / det;
    let fit = linear_regression(&x, &y).unwrap();
    assert_abs_diff_eq!(fit.slope, slope, epsilon = 1e-9);
    assert_abs_diff_eq!(fit.intercept, intercept, epsilon = 1e-9);
    assert_abs_diff_eq!(fit.r_squared, oracle_r(&x, &y).powi(2), epsilon = 1e-9);
}

proptest! {
    #[test]
    fn pearson_symmetric_and_affine_invariant(
        xy in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40),
        a in 0.1f64..10.0,
        b in -50.0f64..50.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        prop_assume!(oracle_r(&x, &x).is_finite() && oracle_r(&y, &y).is_finite());
        let (Ok(r), Ok(rt)) = (pearson(&x, &y), pearson(&y, &x)) else { return Ok(()) };
        prop_assert!((r.r - rt.r).abs() < 1e-12);
        let moved: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let flipped: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((pearson(&moved, &y).unwrap().r - r.r).abs() < 1e-9);
        prop_assert!((pearson(&flipped, &y).unwrap().r + r.r).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn regression_residuals_orthogonal(
        xy in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..40),
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let Ok(fit) = linear_regression(&x, &y) else { return Ok(()) };
        let resid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - fit.slope * a - fit.intercept).collect();
        let dot: f64 = resid.iter().zip(&x).map(|(r, a)| r * a).sum();
        prop_assert!(dot.abs() <= 1e-9 * x.len() as f64);
        prop_assert!(resid.iter().sum::<f64>().abs() <= 1e-9 * x.len() as f64);
    }
}

const LANGS: [&str; 4] = ["en", "de", "pl", "ja"];
const PAIRS: [((usize, usize), f64, f64); 6] = [
    ((0, 1), 0.62, 0.71),
    ((0, 2), 0.41, 0.14),
    ((0, 3), 0.22, 0.05),
    ((1, 2), 0.55, 0.14),
    ((1, 3), 0.19, 0.02),
    ((2, 3), 0.28, 0.03),
];

fn matrix(
    order: &[usize],
    value: impl Fn(f64, f64) -> f64,
) -> (ConsistencyMatrix, SimilarityTable) {
    let n = order.len();
    let mut values = vec![Some(1.0); n * n];
    let mut table = SimilarityTable::new("genetic");
    for &((a, b), m, s) in &PAIRS {
        let (i, j) = (
            order.iter().position(|&k| k == a).unwrap(),
            order.iter().position(|&k| k == b).unwrap(),
        );
        values[i * n + j] = Some(m);
        values[j * n + i] = Some(m);
        table
            .insert(&lang(LANGS[a]), &lang(LANGS[b]), value(m, s))
            .unwrap();
    }
    let m = ConsistencyMatrix {
        languages: order.iter().map(|&k| lang(LANGS[k])).collect(),
        values,
        metric_name: "rankc".into(),
        scheme: None,
        model_id: "toy".into(),
    };
    (m, table)
}

#[test]
fn correlate_four_language_fixture() {
    let (m, t) = matrix(&[0, 1, 2, 3], |_, s| s);
    let got = correlate_consistency(&m, &t).unwrap();
    let xs: Vec<f64> = PAIRS.iter().map(|p| p.2).collect();
    let ys: Vec<f64> = PAIRS.iter().map(|p| p.1).collect();
    assert_eq!(got.n, 6);
    assert_abs_diff_eq!(got.r, oracle_r(&xs, &ys), epsilon = 1e-9);
    for order in [[3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]] {
        let (m2, _) = matrix(&order, |_, s| s);
        let again = correlate_consistency(&m2, &t).unwrap();
        assert_abs_diff_eq!(again.r, got.r, epsilon = 1e-12);
        assert_abs_diff_eq!(again.p_value, got.p_value, epsilon = 1e-12);
    }
}

#[test]
fn correlate_agreement_and_anti_agreement() {
    let (m, same) = matrix(&[0, 1, 2, 3], |m, _| m);
    assert_abs_diff_eq!(
        correlate_consistency(&m, &same).unwrap().r,
        1.0,
        epsilon = 1e-12
    );
    let (m, anti) = matrix(&[0, 1, 2, 3], |m, _| 1.0 - m);
    assert_abs_diff_eq!(
        correlate_consistency(&m, &anti).unwrap().r,
        -1.0,
        epsilon = 1e-12
    );
}

#[test]
fn correlate_skips_missing_pairs_and_needs_three() {
    let (m, _) = matrix(&[0, 1, 2, 3], |_, s| s);
    let mut t = SimilarityTable::new("geographic");
    t.insert(&lang("en"), &lang("de"), 0.9).unwrap();
    t.insert(&lang("pl"), &lang("de"), 1.0).unwrap();
    assert!(correlate_consistency(&m, &t).is_err());
    t.insert(&lang("ja"), &lang("en"), 0.1).unwrap();
    assert_eq!(correlate_consistency(&m, &t).unwrap().n, 3);
}
