use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Coordinates checked when a parameter vector is larger than this.
pub const MIN_GRADCHECK_COORDS: usize = 200;

/// `|a - n| / max(|a| + |n|, 1e-8)`
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-8)
}

/// Picks `max(count, MIN_GRADCHECK_COORDS)` distinct indices out of `n`, or
/// all of them when there are fewer. Sorted.
pub fn sample_coordinates(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let count = count.max(MIN_GRADCHECK_COORDS);
    if n <= count {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, n, count).into_vec();
    idx.sort_unstable();
    idx
}

/// Compares `analytic[i]` against the central difference
/// `(L(theta + eps e_i) - L(theta - eps e_i)) / (2 eps)` for each `i` in
/// `coords` and returns the largest relative error.
pub fn finite_diff_gradcheck<F>(
    params: &[f64],
    analytic: &[f64],
    coords: &[usize],
    eps: f64,
    mut loss: F,
) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(eps > 0.0, "gradcheck step must be positive");
    assert_eq!(params.len(), analytic.len(), "gradient length mismatch");
    let mut theta = params.to_vec();
    let mut worst = 0.0f64;
    for &i in coords {
        let original = theta[i];
        theta[i] = original + eps;
        let plus = loss(&theta);
        theta[i] = original - eps;
        let minus = loss(&theta);
        theta[i] = original;
        let numeric = (plus - minus) / (2.0 * eps);
        worst = worst.max(relative_error(analytic[i], numeric));
    }
    worst
}
