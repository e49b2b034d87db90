//! Tower functions, construction parameters, and closed-form bound
//! calculators.
//!
//! Every real-valued bound here is the asymptotic form with its `o(1)`
//! corrections set to zero ([`ASYMPTOTIC_NOTE`]). They are meant for reports
//! next to measured quantities and are never asserted as guarantees.

use std::collections::BTreeMap;
use std::f64::consts::{E, LN_2};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};

/// Label attached to every bound calculator result.
pub const ASYMPTOTIC_NOTE: &str = "asymptotic form, constants dropped";

/// Exponents whose power of two we are still willing to materialize when
/// tightening a bit-length lower bound.
const MAX_MATERIALIZED_EXPONENT: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerKind {
    /// `tw_1(x) = x`, `tw_{i+1}(x) = 2^{tw_i(x)}`.
    Standard,
    /// `tw̄_1(x) = 2x`, `tw̄_{i+1}(x) = 2^{tw̄_i(x)/2}`.
    Sqrt2,
}

impl std::str::FromStr for TowerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(TowerKind::Standard),
            "sqrt2" => Ok(TowerKind::Sqrt2),
            other => Err(Error::invalid(format!("unknown tower kind {other:?}"))),
        }
    }
}

/// Result of a tower evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TowerValue {
    Exact(BigUint),
    /// The value's bit length exceeds the limit. `min_bits` is a lower bound
    /// on the bit length of the requested value.
    ExceedsLimit {
        min_bits: BigUint,
    },
}

impl TowerValue {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            TowerValue::Exact(v) => Some(v),
            TowerValue::ExceedsLimit { .. } => None,
        }
    }
}

/// Evaluate `tw_height(x)` or `tw̄_height(x)`.
///
/// Returns the exact value when its bit length is at most `bit_limit`,
/// otherwise [`TowerValue::ExceedsLimit`] carrying a lower bound on the bit
/// length.
pub fn tower(kind: TowerKind, height: u32, x: u64, bit_limit: u64) -> Result<TowerValue> {
    if height == 0 || x == 0 {
        return Err(Error::invalid("tower needs height >= 1 and x >= 1"));
    }
    let mut value = match kind {
        TowerKind::Standard => BigUint::from(x),
        TowerKind::Sqrt2 => BigUint::from(x) * 2u32,
    };
    if value.bits() > bit_limit {
        return Ok(TowerValue::ExceedsLimit {
            min_bits: BigUint::from(value.bits()),
        });
    }
    for level in 1..height {
        let exponent = match kind {
            TowerKind::Standard => value.clone(),
            TowerKind::Sqrt2 => &value >> 1u32,
        };
        // bits(2^e) = e + 1
        let bits = &exponent + 1u32;
        if bits > BigUint::from(bit_limit) {
            let min_bits = extend_bit_bound(kind, bits, height - level - 1);
            return Ok(TowerValue::ExceedsLimit { min_bits });
        }
        let e = exponent.to_u64().expect("exponent below bit limit");
        value = BigUint::one() << e;
    }
    Ok(TowerValue::Exact(value))
}

/// Given `bits(t) >= b` for the current level, push the lower bound up by
/// `remaining` more levels while the numbers stay materializable.
fn extend_bit_bound(kind: TowerKind, mut b: BigUint, remaining: u32) -> BigUint {
    for _ in 0..remaining {
        // t >= 2^(b-1), so the next exponent is >= 2^(b-1) (or 2^(b-2) for sqrt2)
        let shift = match kind {
            TowerKind::Standard => &b - 1u32,
            TowerKind::Sqrt2 => &b - 2u32,
        };
        match shift.to_u64() {
            Some(s) if s <= MAX_MATERIALIZED_EXPONENT => b = (BigUint::one() << s) + 1u32,
            _ => break,
        }
    }
    b
}

/// Exact check of `tw̄_i(2x) >= 4 tw_i(x)` for `1 <= i <= 4`, `x >= 2`.
///
/// For `i >= 2` both sides are powers of two, so the comparison is done on
/// exponents: `tw̄_{i-1}(2x)/2 >= tw_{i-1}(x) + 2`.
pub fn tower_domination_check(i: u32, x: u64) -> Result<bool> {
    if x < 2 {
        return Err(Error::invalid("domination check needs x >= 2"));
    }
    if i == 0 {
        return Err(Error::invalid("domination check needs i >= 1"));
    }
    if i > 4 {
        return Err(Error::Range(format!(
            "tower height {i} > 4 is outside the exactly representable range"
        )));
    }
    const LIMIT: u64 = 1 << 26;
    let x2 = x
        .checked_mul(2)
        .ok_or_else(|| Error::Range("2x overflows".into()))?;
    if i == 1 {
        return Ok(BigUint::from(x2) * 2u32 >= BigUint::from(x) * 4u32);
    }
    let lhs = tower(TowerKind::Sqrt2, i - 1, x2, LIMIT)?;
    let rhs = tower(TowerKind::Standard, i - 1, x, LIMIT)?;
    match (lhs.exact(), rhs.exact()) {
        (Some(a), Some(b)) => Ok((a >> 1u32) >= b + 2u32),
        _ => Err(Error::Range(format!(
            "tw_{}({x}) is too large to compare exactly",
            i - 1
        ))),
    }
}

/// Parameters of the sliding-window construction: `k = n(2l-1)`,
/// `m = 2ln`, `p_win = k - l + 1` windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamsA {
    pub k: usize,
    pub l: usize,
    pub n: usize,
    pub m: usize,
    pub p_win: usize,
}

impl ParamsA {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if l == 0 || k == 0 {
            return Err(Error::invalid("k and l must be positive"));
        }
        if !k.is_multiple_of(2 * l - 1) {
            return Err(Error::invalid(format!(
                "k = {k} is not divisible by 2l-1 = {}",
                2 * l - 1
            )));
        }
        if k < l {
            return Err(Error::invalid("k must be at least l"));
        }
        let n = k / (2 * l - 1);
        Ok(Self {
            k,
            l,
            n,
            m: 2 * l * n,
            p_win: k - l + 1,
        })
    }

    pub fn from_blocks(n: usize, l: usize) -> Result<Self> {
        Self::new(n * (2 * l).saturating_sub(1), l)
    }
}

/// Parameters of the block-sum construction: `n = k/l`, `m = n(l+1)`,
/// colors modulo an odd `c >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParamsB {
    pub k: usize,
    pub l: usize,
    pub c: u64,
    pub n: usize,
    pub m: usize,
}

impl ParamsB {
    pub fn new(k: usize, l: usize, c: u64) -> Result<Self> {
        if l == 0 || k == 0 {
            return Err(Error::invalid("k and l must be positive"));
        }
        if !k.is_multiple_of(l) {
            return Err(Error::invalid(format!(
                "k = {k} is not divisible by l = {l}"
            )));
        }
        if c < 3 || c.is_multiple_of(2) {
            return Err(Error::invalid(format!("c = {c} must be odd and >= 3")));
        }
        let n = k / l;
        Ok(Self {
            k,
            l,
            c,
            n,
            m: n * (l + 1),
        })
    }

    pub fn from_blocks(n: usize, l: usize, c: u64) -> Result<Self> {
        Self::new(n * l, l, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    /// `exp(-n/(8e))`: probability that fewer than `n/2e` intervals are hit.
    ChernoffHit,
    /// `84^k exp(-2 δ² 2^{k/12l})`, feasible when `< 1`.
    UnionBound,
    /// `k / (20 log2(5k))`, the largest admissible `l` (exclusive).
    LBound,
    /// `2 exp(-l^δ / 8)`.
    AzumaHit,
    /// `2 exp(-l^δ / 8)`, uncovered fraction for block cubes.
    CoverFractionB,
    /// `84^p`, bound on the number of cube images.
    ImageCount,
    /// `2/e (n/l² - l^δ)`, lower estimate of the expected hit count (block variant).
    HitMeanLowerB,
    /// `2/e (n/l² - l^δ + l^{1+δ})`, upper estimate of the expected hit count.
    HitMeanUpperB,
}

impl BoundName {
    pub const ALL: [BoundName; 8] = [
        BoundName::ChernoffHit,
        BoundName::UnionBound,
        BoundName::LBound,
        BoundName::AzumaHit,
        BoundName::CoverFractionB,
        BoundName::ImageCount,
        BoundName::HitMeanLowerB,
        BoundName::HitMeanUpperB,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::ChernoffHit => "chernoff_hit",
            BoundName::UnionBound => "union_bound",
            BoundName::LBound => "l_bound",
            BoundName::AzumaHit => "azuma_hit",
            BoundName::CoverFractionB => "cover_fraction_B",
            BoundName::ImageCount => "image_count",
            BoundName::HitMeanLowerB => "hit_mean_lower_B",
            BoundName::HitMeanUpperB => "hit_mean_upper_B",
        }
    }
}

impl std::str::FromStr for BoundName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown bound {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub name: &'static str,
    pub value: f64,
    /// Natural log of `value`, when that is the better-conditioned quantity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln_value: Option<f64>,
    /// `union_bound`: value < 1. `l_bound`: the supplied `l` is below the bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
    pub note: &'static str,
}

fn param(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    let v = *params
        .get(key)
        .ok_or_else(|| Error::invalid(format!("missing parameter {key:?}")))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(format!(
            "parameter {key} = {v} must be positive"
        )));
    }
    Ok(v)
}

/// Evaluate a named closed-form bound. Recognized parameter keys: `n`, `k`,
/// `l`, `p`, and `delta` (alias `δ`).
pub fn bound_calculators(name: BoundName, params: &BTreeMap<String, f64>) -> Result<BoundValue> {
    let mut params = params.clone();
    if let Some(d) = params.remove("δ") {
        params.insert("delta".into(), d);
    }
    let plain = |value: f64| BoundValue {
        name: name.as_str(),
        value,
        ln_value: None,
        feasible: None,
        note: ASYMPTOTIC_NOTE,
    };
    Ok(match name {
        BoundName::ChernoffHit => {
            let n = param(&params, "n")?;
            plain((-n / (8.0 * E)).exp())
        }
        BoundName::UnionBound => {
            let k = param(&params, "k")?;
            let l = param(&params, "l")?;
            let delta = param(&params, "delta")?;
            // ln value = k ln 84 - 2 δ² 2^{k/12l}, with the power taken in log2 space
            let decay = (2.0 * delta * delta).log2() + k / (12.0 * l);
            let ln_value = k * 84f64.ln() - decay.exp2();
            BoundValue {
                ln_value: Some(ln_value),
                feasible: Some(ln_value < 0.0),
                ..plain(ln_value.exp())
            }
        }
        BoundName::LBound => {
            let k = param(&params, "k")?;
            let bound = k / (20.0 * (5.0 * k).log2());
            BoundValue {
                feasible: params.get("l").map(|&l| l < bound),
                ..plain(bound)
            }
        }
        BoundName::AzumaHit | BoundName::CoverFractionB => {
            let l = param(&params, "l")?;
            let delta = param(&params, "delta")?;
            plain(2.0 * (-l.powf(delta) / 8.0).exp())
        }
        BoundName::ImageCount => {
            let p = param(&params, "p")?;
            let ln_value = p * 84f64.ln();
            BoundValue {
                ln_value: Some(ln_value),
                ..plain(84f64.powf(p))
            }
        }
        BoundName::HitMeanLowerB | BoundName::HitMeanUpperB => {
            let n = param(&params, "n")?;
            let l = param(&params, "l")?;
            let delta = param(&params, "delta")?;
            let mut inner = n / (l * l) - l.powf(delta);
            if name == BoundName::HitMeanUpperB {
                inner += l.powf(1.0 + delta);
            }
            plain(2.0 / E * inner)
        }
    })
}

/// `δ = 2^{-k/60l}`, the discrepancy target used with the union bound.
pub fn union_delta(k: f64, l: f64) -> f64 {
    (-k / (60.0 * l) * LN_2).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn tower_examples() {
        let v = tower(TowerKind::Standard, 4, 2, 1_000_000).unwrap();
        assert_eq!(v, TowerValue::Exact(BigUint::from(65536u32)));
        let v = tower(TowerKind::Sqrt2, 3, 4, 1_000_000).unwrap();
        assert_eq!(v, TowerValue::Exact(BigUint::from(256u32)));
        match tower(TowerKind::Standard, 6, 2, 64).unwrap() {
            TowerValue::ExceedsLimit { min_bits } => {
                assert!(min_bits > BigUint::from(1u32 << 16), "{min_bits}")
            }
            v => panic!("expected marker, got {v:?}"),
        }
    }

    #[test]
    fn tower_first_levels() {
        assert_eq!(
            tower(TowerKind::Standard, 1, 7, 64).unwrap().exact(),
            Some(&BigUint::from(7u32))
        );
        assert_eq!(
            tower(TowerKind::Sqrt2, 1, 7, 64).unwrap().exact(),
            Some(&BigUint::from(14u32))
        );
        let t5 = tower(TowerKind::Standard, 5, 2, 70_000).unwrap();
        assert_eq!(t5.exact().unwrap().bits(), 65537);
        let s4 = tower(TowerKind::Sqrt2, 4, 4, 1000).unwrap();
        assert_eq!(s4.exact(), Some(&(BigUint::one() << 128u32)));
    }

    #[test]
    fn tower_rejects_zero() {
        assert!(matches!(
            tower(TowerKind::Standard, 0, 2, 64),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            tower(TowerKind::Sqrt2, 2, 0, 64),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn tower_recurrences() {
        for x in 1..6u64 {
            for i in 1..4u32 {
                let a = tower(TowerKind::Standard, i, x, 4096).unwrap();
                let b = tower(TowerKind::Standard, i + 1, x, 1 << 20).unwrap();
                if let (Some(a), Some(b)) = (a.exact(), b.exact()) {
                    assert_eq!(*b, BigUint::one() << a.to_u64().unwrap());
                }
                let s = tower(TowerKind::Sqrt2, i, x, 1 << 20).unwrap();
                if let Some(s) = s.exact() {
                    assert_eq!(s % 2u32, BigUint::from(0u32), "tw̄_{i}({x}) odd");
                }
            }
        }
    }

    #[test]
    fn domination() {
        assert!(tower_domination_check(1, 2).unwrap());
        assert!(tower_domination_check(3, 2).unwrap());
        assert!(tower_domination_check(4, 2).unwrap());
        for x in 2..5 {
            for i in 1..=3 {
                assert!(tower_domination_check(i, x).unwrap());
            }
        }
        assert!(matches!(tower_domination_check(5, 2), Err(Error::Range(_))));
        assert!(matches!(
            tower_domination_check(4, 40),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn params_a() {
        let p = ParamsA::new(6, 2).unwrap();
        assert_eq!((p.n, p.m, p.p_win), (2, 8, 5));
        let p = ParamsA::new(50, 3).unwrap();
        assert_eq!((p.n, p.m, p.p_win), (10, 60, 48));
        assert!(ParamsA::new(7, 2).is_err());
        for l in 1..8 {
            for n in 1..10 {
                let p = ParamsA::from_blocks(n, l).unwrap();
                assert_eq!(p.m * (2 * l - 1), 2 * l * p.k);
                if p.k >= 2 {
                    assert!(p.p_win >= p.n);
                }
            }
        }
    }

    #[test]
    fn params_b() {
        let p = ParamsB::new(24, 6, 3).unwrap();
        assert_eq!((p.n, p.m), (4, 28));
        assert_eq!(p.m - p.k, p.n);
        assert!(ParamsB::new(24, 5, 3).is_err());
        assert!(ParamsB::new(24, 6, 4).is_err());
        assert!(ParamsB::new(24, 6, 1).is_err());
    }

    #[test]
    fn calculator_examples() {
        let v = bound_calculators(BoundName::ChernoffHit, &params(&[("n", 20.0)])).unwrap();
        assert!((v.value - 0.398_6).abs() < 1e-4, "{}", v.value);
        assert_eq!(v.note, ASYMPTOTIC_NOTE);

        let v = bound_calculators(BoundName::ImageCount, &params(&[("p", 5.0)])).unwrap();
        assert_eq!(v.value, 4_182_119_424.0);

        let delta = union_delta(1200.0, 4.0);
        assert!((delta - 1.0 / 32.0).abs() < 1e-15);
        let v = bound_calculators(
            BoundName::UnionBound,
            &params(&[("k", 1200.0), ("l", 4.0), ("δ", delta)]),
        )
        .unwrap();
        let expect = -65536.0 + 1200.0 * 84f64.ln();
        assert!((v.ln_value.unwrap() - expect).abs() < 1e-9);
        assert_eq!(v.feasible, Some(true));
    }

    #[test]
    fn missing_parameter() {
        let err = bound_calculators(BoundName::UnionBound, &params(&[("k", 10.0)])).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn l_bound_implies_union_feasible() {
        for k in (60..4000).step_by(37) {
            for l in 1..40 {
                let (kf, lf) = (k as f64, l as f64);
                let lb =
                    bound_calculators(BoundName::LBound, &params(&[("k", kf), ("l", lf)])).unwrap();
                if lb.feasible == Some(true) {
                    let u = bound_calculators(
                        BoundName::UnionBound,
                        &params(&[("k", kf), ("l", lf), ("delta", union_delta(kf, lf))]),
                    )
                    .unwrap();
                    assert_eq!(u.feasible, Some(true), "k={k} l={l}");
                }
            }
        }
    }
}
