//! Colorings of k-sets built on a shift-graph pipeline `κ`.
//!
//! * `γ'(X) = Σ κ(X_i) mod c` over the `n = k/l` disjoint consecutive blocks
//!   `X_i` of `X`.
//! * `γ(X) = ψ(φ(X))` where `φ(X)` is the vector of `κ` colors of the
//!   `k - l + 1` sliding windows and `ψ` is a seeded hash to `±1`.
//!
//! `ψ` (identifier [`PSI_ALGORITHM`]): start from
//! `state = seed ^ (len · 0x9E3779B97F4A7C15)`; for each vector entry `e`
//! (a `u64` color id) set `state = splitmix64(state ^ e)`; the sign is `+1`
//! when the low bit of the final state is 0 and `-1` otherwise.

use serde::Serialize;

use crate::cubes::{Cube, Variant};
use crate::error::{Error, Result};
use crate::shift_graph::ColoringPipeline;

/// Stable identifier of the `ψ` hash.
pub const PSI_ALGORITHM: &str = "psi-splitmix64-v1";

/// `φ(X)`: colors of the windows `{x_j, …, x_{j+l-1}}`, `j = 1..=k-l+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WindowVector {
    pub colors: Vec<u64>,
}

/// Colors of the `n = k/l` disjoint blocks of `X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BlockVector {
    pub colors: Vec<u64>,
}

fn check_set(x: &[u64], kappa: &ColoringPipeline) -> Result<()> {
    let l = kappa.l();
    if x.len() < l {
        return Err(Error::invalid(format!(
            "|X| = {} is smaller than l = {l}",
            x.len()
        )));
    }
    if x[0] == 0 || *x.last().unwrap() > kappa.universe() {
        return Err(Error::invalid(format!(
            "X must lie in [1, {}]",
            kappa.universe()
        )));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("X must be strictly increasing"));
    }
    Ok(())
}

/// Raw window colors of `X`.
pub fn window_colors(x: &[u64], kappa: &ColoringPipeline) -> Result<Vec<u64>> {
    check_set(x, kappa)?;
    Ok(x.windows(kappa.l()).map(|w| kappa.color_of(w)).collect())
}

/// Raw block colors of `X`; `|X|` must be a multiple of `l`.
pub fn block_colors(x: &[u64], kappa: &ColoringPipeline) -> Result<Vec<u64>> {
    check_set(x, kappa)?;
    let l = kappa.l();
    if !x.len().is_multiple_of(l) {
        return Err(Error::invalid(format!(
            "|X| = {} is not divisible by l = {l}",
            x.len()
        )));
    }
    Ok(x.chunks(l).map(|b| kappa.color_of(b)).collect())
}

pub fn window_vector(x: &[u64], kappa: &ColoringPipeline) -> Result<WindowVector> {
    window_colors(x, kappa).map(|colors| WindowVector { colors })
}

pub fn block_vector(x: &[u64], kappa: &ColoringPipeline) -> Result<BlockVector> {
    block_colors(x, kappa).map(|colors| BlockVector { colors })
}

fn check_modulus(c: u64) -> Result<()> {
    if c < 3 || c.is_multiple_of(2) {
        return Err(Error::invalid(format!("c = {c} must be odd and >= 3")));
    }
    Ok(())
}

fn check_three_color(kappa: &ColoringPipeline) -> Result<()> {
    if !kappa.is_three_color() {
        return Err(Error::Unsupported(format!(
            "γ' needs a three-color pipeline; this one ends with {} colors",
            kappa.color_counts().last().copied().unwrap_or(0)
        )));
    }
    Ok(())
}

/// `γ'(X)` from a block color vector.
pub fn gamma_from_blocks(blocks: &[u64], c: u64) -> u64 {
    blocks.iter().fold(0, |acc, &b| (acc + b) % c)
}

/// `γ'(X) = Σ κ(X_i) mod c`.
pub fn gamma_explicit(x: &[u64], kappa: &ColoringPipeline, c: u64) -> Result<u64> {
    check_modulus(c)?;
    check_three_color(kappa)?;
    Ok(gamma_from_blocks(&block_colors(x, kappa)?, c))
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `ψ(v) ∈ {-1, +1}`.
pub fn psi(colors: &[u64], seed: u64) -> i8 {
    let mut state = seed ^ (colors.len() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    for &e in colors {
        state = splitmix64(state ^ e);
    }
    if state & 1 == 0 {
        1
    } else {
        -1
    }
}

/// `γ(X) = ψ(φ(X))`.
pub fn gamma_randomized(x: &[u64], kappa: &ColoringPipeline, seed: u64) -> Result<i8> {
    Ok(psi(&window_colors(x, kappa)?, seed))
}

/// A coloring of k-sets with colors `0..num_colors()`.
pub trait KSetColoring: Sync {
    fn num_colors(&self) -> usize;

    fn color(&self, x: &[u64]) -> Result<usize>;

    /// Two-color colorings whose color 0 stands for `+1` and color 1 for `-1`.
    fn is_signed(&self) -> bool {
        false
    }
}

/// `γ'` as a [`KSetColoring`].
pub struct ExplicitColoring<'a> {
    kappa: &'a ColoringPipeline,
    c: u64,
}

impl<'a> ExplicitColoring<'a> {
    pub fn new(kappa: &'a ColoringPipeline, c: u64) -> Result<Self> {
        check_modulus(c)?;
        check_three_color(kappa)?;
        Ok(Self { kappa, c })
    }
}

impl KSetColoring for ExplicitColoring<'_> {
    fn num_colors(&self) -> usize {
        self.c as usize
    }

    fn color(&self, x: &[u64]) -> Result<usize> {
        Ok(gamma_from_blocks(&block_colors(x, self.kappa)?, self.c) as usize)
    }
}

/// `γ = ψ∘φ` as a [`KSetColoring`]: `+1 -> 0`, `-1 -> 1`.
pub struct RandomizedColoring<'a> {
    kappa: &'a ColoringPipeline,
    seed: u64,
}

impl<'a> RandomizedColoring<'a> {
    pub fn new(kappa: &'a ColoringPipeline, seed: u64) -> Self {
        Self { kappa, seed }
    }
}

impl KSetColoring for RandomizedColoring<'_> {
    fn num_colors(&self) -> usize {
        2
    }

    fn color(&self, x: &[u64]) -> Result<usize> {
        Ok(usize::from(gamma_randomized(x, self.kappa, self.seed)? < 0))
    }

    fn is_signed(&self) -> bool {
        true
    }
}

/// Any closure as a [`KSetColoring`].
pub struct FnColoring<F> {
    colors: usize,
    signed: bool,
    f: F,
}

impl<F: Fn(&[u64]) -> usize + Sync> FnColoring<F> {
    pub fn new(colors: usize, f: F) -> Self {
        Self {
            colors,
            signed: false,
            f,
        }
    }

    /// Mark a two-color closure as `+1 / -1`.
    pub fn signed(mut self) -> Self {
        self.signed = self.colors == 2;
        self
    }
}

impl<F: Fn(&[u64]) -> usize + Sync> KSetColoring for FnColoring<F> {
    fn num_colors(&self) -> usize {
        self.colors
    }

    fn color(&self, x: &[u64]) -> Result<usize> {
        let c = (self.f)(x);
        if c >= self.colors {
            return Err(Error::invalid(format!(
                "closure returned color {c} of {}",
                self.colors
            )));
        }
        Ok(c)
    }

    fn is_signed(&self) -> bool {
        self.signed
    }
}

/// `γ'` on a variant-B cube written as `base + Σ gaps[t] ξ_t (mod c)`,
/// `ξ ∈ {0,1}^d`, with `ξ_t = 1` selecting `S_j \ {min}` in the `t`-th
/// interval of `J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineModel {
    pub c: u64,
    pub base: u64,
    pub gaps: Vec<u64>,
}

impl AffineModel {
    pub fn new(cube: &Cube, kappa: &ColoringPipeline, c: u64) -> Result<Self> {
        check_modulus(c)?;
        check_three_color(kappa)?;
        if cube.variant() != Variant::B {
            return Err(Error::invalid("the affine model needs a variant B cube"));
        }
        let options = cube.options();
        let low = cube.member(&options, 0);
        let base = gamma_from_blocks(&block_colors(&low, kappa)?, c);
        let gaps = options
            .iter()
            .map(|[lo, hi]| (kappa.color_of(hi) + c - kappa.color_of(lo)) % c)
            .collect();
        Ok(Self { c, base, gaps })
    }

    /// Counts of each residue over all `2^d` choices of `ξ`, by DP.
    pub fn histogram(&self) -> Vec<u64> {
        let c = self.c as usize;
        let mut h = vec![0u64; c];
        h[self.base as usize] = 1;
        for &g in &self.gaps {
            let mut next = h.clone();
            for (r, &cnt) in h.iter().enumerate() {
                next[(r + g as usize) % c] += cnt;
            }
            h = next;
        }
        h
    }
}

/// Exact `γ'` color counts over all members of a variant-B cube.
///
/// Members are visited in Gray-code order; only the block that changes is
/// recolored, so no member set is materialized.
pub fn cube_gamma_histogram(cube: &Cube, kappa: &ColoringPipeline, c: u64) -> Result<Vec<u64>> {
    check_modulus(c)?;
    check_three_color(kappa)?;
    if cube.variant() != Variant::B {
        return Err(Error::invalid("γ' cube histograms need a variant B cube"));
    }
    let d = cube.dimension();
    if d > 40 {
        return Err(Error::Budget {
            what: format!("members of a cube of dimension {d}"),
            required: format!("2^{d}"),
            budget: 1 << 40,
        });
    }
    let options = cube.options();
    let pair_colors: Vec<[u64; 2]> = options
        .iter()
        .map(|[lo, hi]| [kappa.color_of(lo), kappa.color_of(hi)])
        .collect();
    let low = cube.member(&options, 0);
    let mut sum = gamma_from_blocks(&block_colors(&low, kappa)?, c);
    let mut state = vec![0usize; d];
    let mut hist = vec![0u64; c as usize];
    hist[sum as usize] += 1;
    for i in 1u64..1 << d {
        let t = i.trailing_zeros() as usize;
        let [a, b] = pair_colors[t];
        let (from, to) = if state[t] == 0 { (a, b) } else { (b, a) };
        state[t] ^= 1;
        sum = (sum + c - from % c + to) % c;
        hist[sum as usize] += 1;
    }
    Ok(hist)
}
