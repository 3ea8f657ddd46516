//! Small numeric helpers shared across modules.

use crate::scalar::Real;

/// k-th element of the van der Corput sequence in base 2 (zero-indexed,
/// so `van_der_corput(0) == 0`). Successive prefixes are nested, which
/// makes sup-norm estimates over these points monotone in the sample
/// count.
pub fn van_der_corput(mut k: u64) -> f64 {
    let mut r = 0.0f64;
    let mut denom = 1.0f64;
    while k > 0 {
        denom *= 2.0;
        r += (k & 1) as f64 / denom;
        k >>= 1;
    }
    r
}

/// First `n` van der Corput points mapped affinely into `[lo, hi]`.
pub fn low_discrepancy_points<F: Real>(lo: F, hi: F, n: usize) -> Vec<F> {
    let w = hi - lo;
    (0..n as u64)
        .map(|k| lo + w * F::of(van_der_corput(k)))
        .collect()
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `n` equally spaced points including both endpoints (`n >= 2`), or the
/// single midpoint for `n < 2` on a degenerate request.
pub fn linspace<F: Real>(lo: F, hi: F, n: usize) -> Vec<F> {
    if n < 2 {
        return vec![(lo + hi) / F::of(2.0)];
    }
    let step = (hi - lo) / F::of((n - 1) as f64);
    // The rounded step can land the last point one ulp off `hi`; both
    // endpoints are pinned because callers anchor cells on them.
    let mut out: Vec<F> = (0..n).map(|i| lo + step * F::of(i as f64)).collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

/// Deduplicate a sorted slice in place with an absolute tolerance.
pub fn dedup_sorted<F: Real>(xs: &mut Vec<F>, tol: F) {
    xs.dedup_by(|a, b| (*a - *b).abs() <= tol);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn van_der_corput_prefix() {
        let want = [0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(van_der_corput(k as u64), *w);
        }
    }

    #[test]
    fn gcd_table() {
        let cases = [(12, 18, 6), (7, 13, 1), (0, 5, 5), (48, 36, 12)];
        for (a, b, g) in cases {
            assert_eq!(gcd(a, b), g);
            assert_eq!(gcd(b, a), g);
        }
    }

    #[test]
    fn linspace_endpoints() {
        let xs = linspace(0.0f64, 1.0, 5);
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
