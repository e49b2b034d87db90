//! Distribution of a sum of independent Bernoulli variables modulo `l`, and
//! the roots-of-unity bound on its distance from uniform.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParityParams {
    /// Success probability, `0 < p < 1`.
    pub p: f64,
    /// Number of variables.
    pub n: usize,
    /// Modulus, `>= 2`.
    pub l: usize,
    /// Residue of interest, `0 <= h < l`.
    pub h: usize,
}

impl ParityParams {
    pub fn new(p: f64, n: usize, l: usize, h: usize) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("p = {p} must lie in (0, 1)")));
        }
        if l < 2 {
            return Err(Error::invalid(format!("modulus l = {l} must be >= 2")));
        }
        if h >= l {
            return Err(Error::invalid(format!("residue h = {h} must be < l = {l}")));
        }
        Ok(Self { p, n, l, h })
    }

    /// Accepts `p` as `numerator / denominator`.
    pub fn from_ratio(num: u64, den: u64, n: usize, l: usize, h: usize) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("zero denominator"));
        }
        Self::new(num as f64 / den as f64, n, l, h)
    }

    pub fn q(&self) -> f64 {
        1.0 - self.p
    }
}

/// `P[Σ x_i ≡ r (mod l)]` for `r = 0..l`, by dynamic programming over the
/// variables.
pub fn mod_distribution(params: &ParityParams) -> Vec<f64> {
    let (p, q, l) = (params.p, params.q(), params.l);
    let mut dist = vec![0.0; l];
    dist[0] = 1.0;
    let mut next = vec![0.0; l];
    for _ in 0..params.n {
        for r in 0..l {
            next[r] = q * dist[r] + p * dist[(r + l - 1) % l];
        }
        std::mem::swap(&mut dist, &mut next);
    }
    dist
}

/// `(1 - 2pq(1 - cos(2π/l)))^{n/2}`.
pub fn parity_bound(params: &ParityParams) -> f64 {
    let base = 1.0 - 2.0 * params.p * params.q() * (1.0 - (2.0 * PI / params.l as f64).cos());
    // cos(π) rounds to exactly -1, but guard the l = 2, p = 1/2 corner anyway
    base.max(0.0).powf(params.n as f64 / 2.0)
}

/// `|P[Σ x_i ≡ h] - 1/l|` from the exact distribution.
pub fn deviation(params: &ParityParams) -> f64 {
    (mod_distribution(params)[params.h] - 1.0 / params.l as f64).abs()
}

/// `α_c = 1 - (1 - cos(2π/c))/2` for odd `c >= 3`.
pub fn alpha_c(c: u64) -> Result<f64> {
    if c < 3 || c.is_multiple_of(2) {
        return Err(Error::invalid(format!("c = {c} must be odd and >= 3")));
    }
    Ok(1.0 - (1.0 - (2.0 * PI / c as f64).cos()) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct sum over all 2^n outcomes.
    fn enumerate(params: &ParityParams) -> Vec<f64> {
        let mut out = vec![0.0; params.l];
        for mask in 0u32..1 << params.n {
            let ones = mask.count_ones() as i32;
            let w = params.p.powi(ones) * params.q().powi(params.n as i32 - ones);
            out[ones as usize % params.l] += w;
        }
        out
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn distribution_examples() {
        let d = mod_distribution(&ParityParams::new(0.5, 2, 3, 0).unwrap());
        for (x, y) in d.iter().zip([0.25, 0.5, 0.25]) {
            assert!(close(*x, y, 1e-15));
        }
        let d = mod_distribution(&ParityParams::new(0.5, 3, 2, 0).unwrap());
        assert!(close(d[0], 0.5, 1e-15) && close(d[1], 0.5, 1e-15));
        let d = mod_distribution(&ParityParams::from_ratio(2, 3, 3, 2, 0).unwrap());
        assert!(close(d[0], 13.0 / 27.0, 1e-15) && close(d[1], 14.0 / 27.0, 1e-15));
    }

    #[test]
    fn bound_examples() {
        let p = ParityParams::new(0.5, 2, 3, 0).unwrap();
        assert!(close(parity_bound(&p), 0.25, 1e-15));
        assert!(close(deviation(&p), 1.0 / 12.0, 1e-15));

        let p = ParityParams::new(0.5, 3, 2, 0).unwrap();
        assert_eq!(parity_bound(&p), 0.0);
        assert!(deviation(&p) < 1e-15);

        let p = ParityParams::from_ratio(2, 3, 3, 2, 0).unwrap();
        assert!(close(parity_bound(&p), 1.0 / 27.0, 1e-15));
        assert!(close(deviation(&p), 1.0 / 54.0, 1e-15));
    }

    #[test]
    fn alpha_examples() {
        assert!(close(alpha_c(3).unwrap(), 0.25, 1e-15));
        let a5 = alpha_c(5).unwrap();
        assert!(close(
            a5,
            1.0 - (1.0 - 72f64.to_radians().cos()) / 2.0,
            1e-15
        ));
        assert!(close(a5, 0.654_508_5, 1e-7));
        let a7 = alpha_c(7).unwrap();
        assert!(a5 < a7 && a7 < 1.0);
        assert!(alpha_c(4).is_err());
        assert!(alpha_c(1).is_err());
    }

    #[test]
    fn invalid_params() {
        assert!(ParityParams::new(0.0, 3, 3, 0).is_err());
        assert!(ParityParams::new(1.0, 3, 3, 0).is_err());
        assert!(ParityParams::new(0.5, 3, 1, 0).is_err());
        assert!(ParityParams::new(0.5, 3, 3, 3).is_err());
    }

    #[test]
    fn matches_enumeration() {
        for l in 2..=8 {
            for n in 0..=12 {
                for p in [0.3, 0.5, l as f64 / (l as f64 + 1.0)] {
                    let params = ParityParams::new(p, n, l, 0).unwrap();
                    let dp = mod_distribution(&params);
                    let brute = enumerate(&params);
                    for (a, b) in dp.iter().zip(&brute) {
                        assert!(close(*a, *b, 1e-12), "l={l} n={n} p={p}");
                    }
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn deviation_within_bound(p in 0.01f64..0.99, n in 0usize..60, l in 2usize..10, h_seed in 0usize..100) {
            let params = ParityParams::new(p, n, l, h_seed % l).unwrap();
            let d = mod_distribution(&params);
            proptest::prop_assert!(d.iter().all(|&x| x >= 0.0));
            proptest::prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            proptest::prop_assert!(deviation(&params) <= parity_bound(&params) + 1e-12);
            let more = ParityParams { n: n + 1, ..params };
            proptest::prop_assert!(parity_bound(&more) <= parity_bound(&params));
        }
    }
}
