//! Dense-network numerics with hand-derived gradients. Everything is `f64`.

mod adam;
mod dense;
mod gradcheck;
mod matrix;

pub use adam::{AdamConfig, AdamState};
pub use dense::DenseLayer;
pub use gradcheck::{finite_diff_gradcheck, relative_error, sample_coordinates, MIN_GRADCHECK_COORDS};
pub use matrix::Matrix;

/// Lower bound applied to the target probability before taking its log.
pub const PROB_FLOOR: f64 = 1e-12;

pub fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// Max-shifted softmax.
pub fn softmax(z: &[f64]) -> Vec<f64> {
    assert!(!z.is_empty(), "softmax of an empty vector");
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

pub fn cross_entropy(p: &[f64], label: usize) -> f64 {
    assert!(label < p.len(), "label {label} out of range for {} classes", p.len());
    -p[label].max(PROB_FLOOR).ln()
}

/// Index of the largest entry; the lowest index wins ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// `(-sum p ln p) / ln K` with `0 ln 0 = 0`. A single class has entropy 0.
pub fn normalized_entropy(p: &[f64]) -> f64 {
    if p.len() < 2 {
        return 0.0;
    }
    let h: f64 = p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum();
    (h / (p.len() as f64).ln()).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn relu_examples() {
        assert_eq!(relu(&[-1.0, 0.0, 2.0]), vec![0.0, 0.0, 2.0]);
        assert_eq!(relu(&[-3.0, -0.5]), vec![0.0, 0.0]);
        assert_eq!(relu(&[0.0, 4.5]), vec![0.0, 4.5]);
    }

    #[test]
    fn softmax_examples() {
        assert_eq!(softmax(&[0.0, 0.0]), vec![0.5, 0.5]);
        for c in [-7.0, 0.0, 123.4] {
            assert_eq!(softmax(&[c; 4]), vec![0.25; 4]);
        }
        let p = softmax(&[1000.0, 0.0]);
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1] < 1e-300 && p[1] >= 0.0);
    }

    #[test]
    fn cross_entropy_examples() {
        assert!((cross_entropy(&[0.25; 4], 2) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(cross_entropy(&[0.0, 1.0], 1), 0.0);
        assert_eq!(cross_entropy(&[1.0, 1e-20], 1), -(1e-12f64).ln());
    }

    #[test]
    fn entropy_bounds() {
        assert!((normalized_entropy(&[1.0 / 26.0; 26]) - 1.0).abs() < 1e-12);
        assert_eq!(normalized_entropy(&[1.0, 0.0, 0.0]), 0.0);
        assert_eq!(normalized_entropy(&[1.0]), 0.0);
    }

    #[test]
    fn argmax_ties_pick_first() {
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
    }

    proptest! {
        #[test]
        fn softmax_sums_to_one_and_is_shift_invariant(
            z in prop::collection::vec(-50.0f64..50.0, 1..20),
            shift in -100.0f64..100.0,
        ) {
            let p = softmax(&z);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let shifted: Vec<f64> = z.iter().map(|v| v + shift).collect();
            let q = softmax(&shifted);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn cross_entropy_nonnegative(z in prop::collection::vec(-30.0f64..30.0, 2..10), l in 0usize..10) {
            let p = softmax(&z);
            prop_assert!(cross_entropy(&p, l % p.len()) >= 0.0);
        }
    }
}
