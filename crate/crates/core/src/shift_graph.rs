//! Shift graphs `Sh(N, l)` and an explicit layered coloring of them.
//!
//! The vertices of `Sh(N, h)` are the `h`-subsets of `[N]`; `{x1..xh}` and
//! `{x2..x(h+1)}` are adjacent. A block `{x1..x(h+1)}` is at the same time a
//! vertex of `Sh(N, h+1)` and the edge (prefix, suffix) of `Sh(N, h)`, so a
//! coloring of level `h+1` can be computed from the level-`h` colors of the
//! block's prefix and suffix. [`ColoringPipeline`] stacks such steps:
//!
//! | step     | level-(h+1) color of a block                                   |
//! |----------|----------------------------------------------------------------|
//! | base     | `x - 1` (level 1 only)                                         |
//! | ordered  | index of the highest bit where `x-1` and `y-1` differ (level 2) |
//! | delta    | `2i + bit_i(prefix)`, `i` = lowest bit where the colors differ  |
//! | subset   | colors read as `s`-subsets of `[2s]`; `min(prefix \ suffix)`    |
//! | k4       | 4 colors at level `h-1` read as a walk `a,b,c` in `K4`          |
//!
//! All color ids are 0-based. The k4 step works on labels `id + 1 ∈ {1..4}`
//! and returns `b` if `b != 4`, otherwise the least of `{1,2,3} \ {a, c}`.

use std::collections::{BTreeSet, VecDeque};

use dashmap::DashMap;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sorted_set::SortedSet;
use crate::subsets::{self, SubsetSampler};

/// Work unit for parallel verification; part of the determinism contract.
const CHUNK: u64 = 1 << 14;

/// `true` iff `b = (a \ {min a}) ∪ {y}` for some `y > max a`.
pub fn is_shift_edge(a: &SortedSet, b: &SortedSet) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "shift edge needs equal sizes, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (a, b) = (a.as_slice(), b.as_slice());
    let l = a.len();
    Ok(a[1..] == b[..l - 1] && b[l - 1] > a[l - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Base,
    Ordered,
    Delta,
    Subset {
        half: u32,
    },
    K4,
    /// Every block gets color 0. Only used to exercise the verifier.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelInfo {
    pub level: usize,
    #[serde(flatten)]
    pub step: StepKind,
    /// Upper bound on the number of color ids at this level.
    pub colors: u64,
}

/// Layered coloring of `Sh(N, h)` for every `h <= l`.
#[derive(Debug)]
pub struct ColoringPipeline {
    n: u64,
    l: usize,
    levels: Vec<LevelInfo>,
    three_color: bool,
    /// For subset levels: bitmask of the `s`-subset of `[2s]` for each color id.
    subset_tables: Vec<Vec<u64>>,
    memo: Option<DashMap<Box<[u64]>, u64>>,
}

/// Number of bits needed to write the ids `0..count`.
fn id_bits(count: u64) -> u32 {
    if count <= 1 {
        1
    } else {
        64 - (count - 1).leading_zeros()
    }
}

/// Least `s >= 1` with `C(2s, s) >= count`.
fn subset_half(count: u64) -> u32 {
    let mut s = 1u32;
    while subsets::binomial(2 * s as u64, s as u64) < BigUint::from(count) {
        s += 1;
    }
    s
}

/// Bitmasks of the `s`-subsets of `[2s]` in lexicographic order, first `count`.
fn subset_table(half: u32, count: u64) -> Vec<u64> {
    let width = 2 * half as usize;
    let mut idx: Vec<usize> = (0..half as usize).collect();
    let mut out = Vec::with_capacity(count as usize);
    loop {
        out.push(idx.iter().fold(0u64, |m, &i| m | 1 << i));
        if out.len() as u64 == count || !subsets::next_combination(&mut idx, width) {
            break;
        }
    }
    out
}

/// Delta step: `2i + bit_i(prefix)` with `i` the lowest differing bit.
#[inline]
pub fn delta_step(prefix: u64, suffix: u64) -> u64 {
    debug_assert_ne!(prefix, suffix);
    let i = (prefix ^ suffix).trailing_zeros() as u64;
    2 * i + ((prefix >> i) & 1)
}

/// Ordered step on a 2-block `{x < y}`: highest bit where `x-1`, `y-1` differ.
#[inline]
pub fn ordered_step(x: u64, y: u64) -> u64 {
    debug_assert!(x < y);
    63 - ((x - 1) ^ (y - 1)).leading_zeros() as u64
}

/// Subset step on subset bitmasks: 0-based least element of `prefix \ suffix`.
#[inline]
pub fn subset_step(prefix_mask: u64, suffix_mask: u64) -> u64 {
    let diff = prefix_mask & !suffix_mask;
    debug_assert_ne!(diff, 0);
    diff.trailing_zeros() as u64
}

/// 3-coloring of walks `a -> b -> c` in `K4` (labels 1..=4, `a != b != c`).
#[inline]
pub fn k4_step(a: u8, b: u8, c: u8) -> u8 {
    if b != 4 {
        b
    } else {
        (1..=3)
            .find(|&d| d != a && d != c)
            .expect("two labels cannot cover {1,2,3}")
    }
}

impl ColoringPipeline {
    /// The three-color pipeline for `Sh(N, l)`, `l >= 3`.
    ///
    /// Level 2 uses the ordered step, levels `3..l` the subset step, and level
    /// `l` the k4 step applied to the level-`(l-2)` colors, which therefore
    /// must number at most 4.
    pub fn build(n: u64, l: usize) -> Result<Self> {
        if l < 3 {
            return Err(Error::Unsupported(format!(
                "the three-color pipeline needs l >= 3 (got {l}); use ColoringPipeline::delta_only"
            )));
        }
        if n < l as u64 {
            return Err(Error::invalid(format!("N = {n} must be at least l = {l}")));
        }
        let mut levels = vec![LevelInfo {
            level: 1,
            step: StepKind::Base,
            colors: n,
        }];
        let mut subset_tables = vec![Vec::new()];
        for level in 2..l {
            let prev = levels[level - 2].colors;
            let (step, colors, table) = if level == 2 {
                (StepKind::Ordered, id_bits(n) as u64, Vec::new())
            } else {
                let half = subset_half(prev);
                (
                    StepKind::Subset { half },
                    2 * half as u64,
                    subset_table(half, prev),
                )
            };
            levels.push(LevelInfo {
                level,
                step,
                colors,
            });
            subset_tables.push(table);
        }
        if levels[l - 3].colors > 4 {
            return Err(Error::TowerBound {
                n,
                l,
                max_bits: max_admissible_bits(l),
            });
        }
        levels.push(LevelInfo {
            level: l,
            step: StepKind::K4,
            colors: 3,
        });
        subset_tables.push(Vec::new());
        Ok(Self {
            n,
            l,
            levels,
            three_color: true,
            subset_tables,
            memo: None,
        })
    }

    /// Fallback for any `l >= 1`: base then delta steps only. Not a
    /// three-coloring; color counts follow `2 * bits(previous)`.
    pub fn delta_only(n: u64, l: usize) -> Result<Self> {
        if l == 0 || n < l as u64 {
            return Err(Error::invalid(format!(
                "need 1 <= l <= N, got l = {l}, N = {n}"
            )));
        }
        let mut levels = vec![LevelInfo {
            level: 1,
            step: StepKind::Base,
            colors: n,
        }];
        for level in 2..=l {
            let prev = levels[level - 2].colors;
            levels.push(LevelInfo {
                level,
                step: StepKind::Delta,
                colors: 2 * id_bits(prev) as u64,
            });
        }
        Ok(Self {
            n,
            l,
            subset_tables: vec![Vec::new(); l],
            levels,
            three_color: false,
            memo: None,
        })
    }

    /// Enable the shared `(block) -> color` cache.
    pub fn with_memo(mut self) -> Self {
        self.memo = Some(DashMap::new());
        self
    }

    /// Replace the top level by a constant coloring (verifier sanity checks).
    pub fn with_constant_top_level(mut self) -> Self {
        let top = self.levels.last_mut().unwrap();
        top.step = StepKind::Constant;
        top.colors = 1;
        if let Some(m) = &self.memo {
            m.clear();
        }
        self
    }

    pub fn universe(&self) -> u64 {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn levels(&self) -> &[LevelInfo] {
        &self.levels
    }

    pub fn color_counts(&self) -> Vec<u64> {
        self.levels.iter().map(|s| s.colors).collect()
    }

    /// `true` for pipelines built by [`ColoringPipeline::build`].
    pub fn is_three_color(&self) -> bool {
        self.three_color && self.levels.last().map(|s| s.step) == Some(StepKind::K4)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.as_ref().map_or(0, |m| m.len())
    }

    /// Color of a block of size `h <= l` at level `h`.
    pub fn color(&self, block: &SortedSet) -> Result<u64> {
        let b = block.as_slice();
        if b.len() > self.l {
            return Err(Error::invalid(format!(
                "block of size {} exceeds the pipeline's {} levels",
                b.len(),
                self.l
            )));
        }
        if block.max() > self.n {
            return Err(Error::invalid(format!(
                "block {block} is outside [1, {}]",
                self.n
            )));
        }
        Ok(self.color_of(b))
    }

    /// Unchecked variant of [`color`](Self::color) for validated callers:
    /// `block` is non-empty, strictly increasing, inside `[1, N]`, `len <= l`.
    pub fn color_of(&self, block: &[u64]) -> u64 {
        if let Some(memo) = &self.memo {
            if let Some(c) = memo.get(block) {
                return *c;
            }
            let c = self.compute(block);
            memo.insert(block.into(), c);
            c
        } else {
            self.compute(block)
        }
    }

    /// Triangle evaluation: row `h-1` holds the level-`h` colors of all
    /// length-`h` windows of `block`.
    fn compute(&self, block: &[u64]) -> u64 {
        let size = block.len();
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(size);
        rows.push(block.iter().map(|&x| x - 1).collect());
        for h in 2..=size {
            let level = self.levels[h - 1];
            let row: Vec<u64> = (0..=size - h)
                .map(|i| match level.step {
                    StepKind::Base => unreachable!("base is level 1"),
                    StepKind::Ordered => ordered_step(block[i], block[i + 1]),
                    StepKind::Delta => delta_step(rows[h - 2][i], rows[h - 2][i + 1]),
                    StepKind::Subset { .. } => {
                        let table = &self.subset_tables[h - 1];
                        subset_step(
                            table[rows[h - 2][i] as usize],
                            table[rows[h - 2][i + 1] as usize],
                        )
                    }
                    StepKind::K4 => {
                        let below = &rows[h - 3];
                        let label = |c: u64| c as u8 + 1;
                        (k4_step(label(below[i]), label(below[i + 1]), label(below[i + 2])) - 1)
                            as u64
                    }
                    StepKind::Constant => 0,
                })
                .collect();
            rows.push(row);
        }
        rows[size - 1][0]
    }
}

/// Bit length of the largest `N` admitted by [`ColoringPipeline::build`],
/// in decimal. The level-`(l-2)` colors must number at most 4; each subset
/// level tolerates `C(M, M/2)` colors below a level of `M`, and the ordered
/// level tolerates `N <= 2^M`.
pub fn max_admissible_bits(l: usize) -> String {
    if l < 3 {
        return "0".into();
    }
    if l == 3 {
        return "3".into(); // N <= 4
    }
    let mut m = BigUint::from(4u32);
    for _ in 0..l - 4 {
        let Some(mm) = m.to_u64() else {
            return format!("more than {m}");
        };
        if mm > 1 << 20 {
            return format!("more than {m}");
        }
        m = subsets::binomial(mm, mm / 2);
    }
    (m + 1u32).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Exhaustive,
    Sampled,
}

impl std::str::FromStr for VerifyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(VerifyMode::Exhaustive),
            "sampled" => Ok(VerifyMode::Sampled),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub edges_checked: u64,
    pub violations: u64,
    /// Distinct top-level colors seen on the checked vertices.
    pub colors_seen: Vec<u64>,
    /// Lexicographically first violating witness, if any.
    pub first_violation: Option<Vec<u64>>,
}

#[derive(Default)]
struct Tally {
    checked: u64,
    violations: u64,
    colors: BTreeSet<u64>,
    first: Option<Vec<u64>>,
}

impl Tally {
    fn check(&mut self, pipeline: &ColoringPipeline, witness: &[u64]) {
        let l = pipeline.l;
        let a = pipeline.color_of(&witness[..l]);
        let b = pipeline.color_of(&witness[1..]);
        self.checked += 1;
        self.colors.insert(a);
        self.colors.insert(b);
        if a == b {
            self.violations += 1;
            if self.first.is_none() {
                self.first = Some(witness.to_vec());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.violations += other.violations;
        self.colors.extend(other.colors);
        self.first = match (self.first, other.first) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }
}

/// Check that the top-level coloring is proper on shift edges.
///
/// Exhaustive mode walks every `(l+1)`-subset witness and needs
/// `C(N, l+1) <= budget`. Sampled mode checks `budget` uniform witnesses;
/// sample `j` comes from chunk `j / 2^14`, whose generator is ChaCha8 seeded
/// with `seed` on stream `chunk`, so results do not depend on thread count.
pub fn verify_proper(
    pipeline: &ColoringPipeline,
    mode: VerifyMode,
    budget: u64,
    seed: u64,
) -> Result<VerifyReport> {
    let n = pipeline.n;
    let width = pipeline.l + 1;
    if (width as u64) > n {
        return Ok(VerifyReport {
            edges_checked: 0,
            violations: 0,
            colors_seen: Vec::new(),
            first_violation: None,
        });
    }
    let tally = match mode {
        VerifyMode::Exhaustive => {
            let total = subsets::checked_count(n, width as u64, budget, "shift-edge witnesses")?;
            let chunks = total.div_ceil(CHUNK);
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let start = c * CHUNK;
                    let count = CHUNK.min(total - start);
                    let mut t = Tally::default();
                    let mut buf = vec![0u64; width];
                    subsets::for_each_in_rank_range(n as usize, width, start, count, |idx| {
                        for (dst, &i) in buf.iter_mut().zip(idx) {
                            *dst = i as u64 + 1;
                        }
                        t.check(pipeline, &buf);
                        Ok(())
                    })?;
                    Ok(t)
                })
                .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?
        }
        VerifyMode::Sampled => {
            let sampler = SubsetSampler::new(n, width)?;
            let chunks = budget.div_ceil(CHUNK);
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c);
                    let count = CHUNK.min(budget - c * CHUNK);
                    let mut t = Tally::default();
                    for _ in 0..count {
                        let w = sampler.sample(&mut rng);
                        t.check(pipeline, &w);
                    }
                    t
                })
                .reduce(Tally::default, Tally::merge)
        }
    };
    Ok(VerifyReport {
        edges_checked: tally.checked,
        violations: tally.violations,
        colors_seen: tally.colors.into_iter().collect(),
        first_violation: tally.first,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OddCycleReport {
    pub vertices: u64,
    pub edges: u64,
    pub non_bipartite: bool,
}

/// Attempt a breadth-first 2-coloring of the undirected `Sh(N, l)`.
/// `non_bipartite` is `true` iff an odd cycle exists.
pub fn odd_cycle_check(n: u64, l: usize, budget: u64) -> Result<OddCycleReport> {
    if l == 0 || (l as u64) > n {
        return Err(Error::invalid(format!(
            "need 1 <= l <= N, got l = {l}, N = {n}"
        )));
    }
    let total = subsets::checked_count(n, l as u64, budget, "shift-graph vertices")?;
    let nu = n as usize;
    // binom[a][b] for a <= n, b <= l, to rank vertices quickly
    let mut binom = vec![vec![0u64; l + 1]; nu + 1];
    for a in 0..=nu {
        binom[a][0] = 1;
        for b in 1..=l.min(a) {
            binom[a][b] = binom[a - 1][b - 1] + if b < a { binom[a - 1][b] } else { 0 };
        }
    }
    let rank = |set: &[u64]| -> usize {
        let mut r = total - 1;
        for (i, &c) in set.iter().enumerate() {
            r -= binom[nu - c as usize][l - i];
        }
        r as usize
    };
    let unrank =
        |r: usize| -> Vec<u64> { subsets::unrank(n, l, &BigUint::from(r)).expect("rank in range") };

    let mut side = vec![u8::MAX; total as usize];
    let mut edges = 0u64;
    let mut odd = false;
    let mut queue = VecDeque::new();
    let mut nb = vec![0u64; l];
    for start in 0..total as usize {
        if side[start] != u8::MAX {
            continue;
        }
        side[start] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let set = unrank(v);
            let mut visit = |w: usize, side: &mut Vec<u8>, queue: &mut VecDeque<usize>| {
                if side[w] == u8::MAX {
                    side[w] = side[v] ^ 1;
                    queue.push_back(w);
                } else if side[w] == side[v] {
                    odd = true;
                }
            };
            // out-neighbors {x2..xl, y}, y > xl
            nb[..l - 1].copy_from_slice(&set[1..]);
            for y in set[l - 1] + 1..=n {
                nb[l - 1] = y;
                edges += 1;
                visit(rank(&nb), &mut side, &mut queue);
            }
            // in-neighbors {y, x1..x(l-1)}, y < x1
            nb[1..].copy_from_slice(&set[..l - 1]);
            for y in 1..set[0] {
                nb[0] = y;
                visit(rank(&nb), &mut side, &mut queue);
            }
        }
    }
    Ok(OddCycleReport {
        vertices: total,
        edges,
        non_bipartite: odd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64], n: u64) -> SortedSet {
        SortedSet::new(v.to_vec(), n).unwrap()
    }

    #[test]
    fn shift_edge_examples() {
        assert!(is_shift_edge(&set(&[1, 3, 5], 9), &set(&[3, 5, 9], 9)).unwrap());
        assert!(!is_shift_edge(&set(&[1, 3, 5], 9), &set(&[3, 4, 5], 9)).unwrap());
        assert!(!is_shift_edge(&set(&[1, 3, 5], 9), &set(&[1, 3, 5], 9)).unwrap());
        assert!(is_shift_edge(&set(&[1, 3], 9), &set(&[3, 5, 9], 9)).is_err());
    }

    #[test]
    fn step_examples() {
        assert_eq!(delta_step(0b011, 0b010), 1);
        assert_eq!(k4_step(1, 4, 3), 2);
        assert_eq!(k4_step(2, 3, 1), 3);
        assert_eq!(ordered_step(1, 2), 0);
        assert_eq!(ordered_step(4, 5), 2);
    }

    #[test]
    fn delta_step_is_proper_on_paths() {
        for u in 0..16 {
            for v in 0..16 {
                for w in 0..16 {
                    if u != v && v != w {
                        assert_ne!(delta_step(u, v), delta_step(v, w), "{u} {v} {w}");
                    }
                }
            }
        }
    }

    #[test]
    fn k4_step_is_proper_on_walks() {
        for a in 1..=4u8 {
            for b in 1..=4 {
                for c in 1..=4 {
                    for d in 1..=4 {
                        if a != b && b != c && c != d {
                            let x = k4_step(a, b, c);
                            assert!((1..=3).contains(&x));
                            assert_ne!(x, k4_step(b, c, d));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subset_step_is_proper_on_paths() {
        for half in 1..=3u32 {
            let full = subsets::binomial(2 * half as u64, half as u64)
                .to_u64()
                .unwrap();
            let table = subset_table(half, full);
            assert_eq!(table.len() as u64, full);
            for &u in &table {
                for &v in &table {
                    for &w in &table {
                        if u != v && v != w {
                            let (a, b) = (subset_step(u, v), subset_step(v, w));
                            assert!(a < 2 * half as u64);
                            assert_ne!(a, b);
                        }
                    }
                }
            }
        }
        // ids 0..6 are the 2-subsets of {1,2,3,4} in lexicographic order
        let t = subset_table(2, 6);
        assert_eq!(t, vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
    }

    #[test]
    fn pipeline_color_counts() {
        assert_eq!(
            ColoringPipeline::build(16, 5).unwrap().color_counts(),
            vec![16, 4, 4, 4, 3]
        );
        assert_eq!(
            ColoringPipeline::build(64, 6).unwrap().color_counts(),
            vec![64, 6, 4, 4, 4, 3]
        );
        assert_eq!(
            ColoringPipeline::build(256, 6).unwrap().color_counts(),
            vec![256, 8, 6, 4, 4, 3]
        );
        assert_eq!(
            ColoringPipeline::build(8, 4).unwrap().color_counts(),
            vec![8, 3, 4, 3]
        );
        assert_eq!(
            ColoringPipeline::build(4, 3).unwrap().color_counts(),
            vec![4, 2, 3]
        );
        assert_eq!(
            ColoringPipeline::delta_only(8, 2).unwrap().color_counts(),
            vec![8, 6]
        );
        assert_eq!(
            ColoringPipeline::delta_only(12, 3).unwrap().color_counts(),
            vec![12, 8, 6]
        );
    }

    #[test]
    fn pipeline_admissibility_edges() {
        assert!(ColoringPipeline::build(16, 4).is_ok());
        assert!(ColoringPipeline::build(17, 4).is_err());
        assert!(ColoringPipeline::build(64, 5).is_ok());
        assert!(ColoringPipeline::build(65, 5).is_err());
        assert!(ColoringPipeline::build(1 << 20, 6).is_ok());
        assert!(ColoringPipeline::build((1 << 20) + 1, 6).is_err());
        assert!(ColoringPipeline::build(u64::MAX, 7).is_ok());
        match ColoringPipeline::build(1_000_000_000, 5) {
            Err(Error::TowerBound { max_bits, .. }) => assert_eq!(max_bits, "7"),
            other => panic!("{other:?}"),
        }
        assert_eq!(max_admissible_bits(4), "5");
        assert_eq!(max_admissible_bits(6), "21");
        assert_eq!(max_admissible_bits(7), "184757");
        assert!(matches!(
            ColoringPipeline::build(10, 2),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            ColoringPipeline::build(3, 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn base_color_and_block_checks() {
        let p = ColoringPipeline::build(16, 5).unwrap();
        assert_eq!(p.color(&set(&[7], 16)).unwrap(), 6);
        assert!(p.color(&set(&[1, 2, 3, 4, 5, 6], 16)).is_err());
        assert!(p.color(&set(&[1, 17], 20)).is_err());
    }

    #[test]
    fn exhaustive_properness_small() {
        for (n, l) in [(16, 5), (8, 4), (16, 4), (4, 3), (20, 5)] {
            let p = ColoringPipeline::build(n, l).unwrap();
            let r = verify_proper(&p, VerifyMode::Exhaustive, 1_000_000, 0).unwrap();
            assert_eq!(r.violations, 0, "({n},{l})");
            assert!(r.colors_seen.len() <= 3);
        }
        let r = verify_proper(
            &ColoringPipeline::build(16, 5).unwrap(),
            VerifyMode::Exhaustive,
            1_000_000,
            0,
        )
        .unwrap();
        assert_eq!(r.edges_checked, 8008);
    }

    #[test]
    fn every_level_is_proper() {
        // lower levels of a pipeline must be proper colorings too
        let p = ColoringPipeline::build(64, 6).unwrap();
        let n = 14u64;
        for h in 1..=6usize {
            let mut idx: Vec<usize> = (0..=h).collect();
            loop {
                let w: Vec<u64> = idx.iter().map(|&i| i as u64 + 1).collect();
                let (a, b) = (p.color_of(&w[..h]), p.color_of(&w[1..]));
                assert_ne!(a, b, "level {h} witness {w:?}");
                assert!(a < p.levels()[h - 1].colors);
                if !subsets::next_combination(&mut idx, n as usize) {
                    break;
                }
            }
        }
    }

    #[test]
    fn delta_only_is_proper() {
        for (n, l) in [(8, 2), (12, 3), (10, 4)] {
            let p = ColoringPipeline::delta_only(n, l).unwrap();
            let r = verify_proper(&p, VerifyMode::Exhaustive, 1_000_000, 0).unwrap();
            assert_eq!(r.violations, 0);
            assert!(r.colors_seen.iter().all(|&c| c < p.levels()[l - 1].colors));
        }
    }

    #[test]
    fn mutation_is_caught() {
        let p = ColoringPipeline::build(16, 5)
            .unwrap()
            .with_constant_top_level();
        let r = verify_proper(&p, VerifyMode::Exhaustive, 1_000_000, 0).unwrap();
        assert!(r.violations > 0);
        assert_eq!(r.first_violation, Some(vec![1, 2, 3, 4, 5, 6]));
    }

    #[test]
    fn budget_error() {
        let p = ColoringPipeline::build(256, 6).unwrap();
        assert!(matches!(
            verify_proper(&p, VerifyMode::Exhaustive, 1000, 0),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn sampled_is_deterministic() {
        let p = ColoringPipeline::build(256, 6).unwrap();
        let a = verify_proper(&p, VerifyMode::Sampled, 50_000, 42).unwrap();
        let b = verify_proper(&p, VerifyMode::Sampled, 50_000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edges_checked, 50_000);
        assert_eq!(a.violations, 0);
    }

    #[test]
    fn memo_does_not_change_colors() {
        let plain = ColoringPipeline::build(64, 6).unwrap();
        let memo = ColoringPipeline::build(64, 6).unwrap().with_memo();
        let sampler = SubsetSampler::new(64, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let b = sampler.sample(&mut rng);
            let c = plain.color_of(&b);
            assert_eq!(c, memo.color_of(&b));
            assert_eq!(c, memo.color_of(&b));
        }
        assert!(memo.memo_len() > 0);
    }

    #[test]
    fn odd_cycles() {
        assert!(odd_cycle_check(5, 2, 10_000).unwrap().non_bipartite);
        assert!(odd_cycle_check(7, 3, 10_000).unwrap().non_bipartite);
        assert!(!odd_cycle_check(4, 3, 10_000).unwrap().non_bipartite);
        assert!(!odd_cycle_check(3, 2, 10_000).unwrap().non_bipartite);
        assert!(!odd_cycle_check(4, 2, 10_000).unwrap().non_bipartite);
        assert!(matches!(
            odd_cycle_check(30, 10, 1000),
            Err(Error::Budget { .. })
        ));
    }
}
