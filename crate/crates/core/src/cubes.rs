//! Interval partitions of a ground set, cubes of k-sets, and the cube-image
//! code.
//!
//! Variant A splits `S` (`|S| = 2ln`) into `n` intervals of length `2l`; a
//! k-set properly hits an interval when it misses exactly one of its
//! elements. A cube `C(J, R)` fixes everything outside the intervals in `J`
//! and lets each member pick one of two elements `a_h`, `a_{h+l}` in every
//! interval of `J`.
//!
//! Variant B splits `S` (`|S| = (l+1)n`) into `n` intervals of length `l+1`;
//! proper hitting additionally needs the number of elements before the
//! interval to be `≡ h (mod l)`, and the intersection must be the interval
//! minus its minimum or minus its maximum. Cubes `C'(J, R)` choose between
//! those two in every interval of `J`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::colorings;
use crate::error::{Error, Result};
use crate::shift_graph::ColoringPipeline;
use crate::sorted_set::SortedSet;

/// Largest cube dimension that is enumerated member by member.
pub const MAX_ENUM_DIM: usize = 24;

/// Argument substituted for a missing nearest `B`-neighbor in `f_i`.
pub const DEFAULT_ARG: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Variant {
    A,
    B,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Variant::A),
            "B" | "b" => Ok(Variant::B),
            other => Err(Error::invalid(format!("unknown variant {other:?}"))),
        }
    }
}

/// `S` cut into `n` consecutive intervals of equal length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalPartition {
    ground: Vec<u64>,
    variant: Variant,
    l: usize,
    n: usize,
    len: usize,
}

impl IntervalPartition {
    /// Interval length is `2l` for variant A and `l + 1` for variant B; `|S|`
    /// must be a positive multiple of it.
    pub fn new(ground: &SortedSet, variant: Variant, l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::invalid("l must be positive"));
        }
        let len = match variant {
            Variant::A => 2 * l,
            Variant::B => l + 1,
        };
        let m = ground.len();
        if !m.is_multiple_of(len) {
            return Err(Error::invalid(format!(
                "|S| = {m} is not a multiple of the interval length {len}"
            )));
        }
        Ok(Self {
            ground: ground.as_slice().to_vec(),
            variant,
            l,
            n: m / len,
            len,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn interval_len(&self) -> usize {
        self.len
    }

    pub fn ground(&self) -> &[u64] {
        &self.ground
    }

    /// Size of the k-sets this partition is meant for.
    pub fn k(&self) -> usize {
        match self.variant {
            Variant::A => self.n * (2 * self.l - 1),
            Variant::B => self.n * self.l,
        }
    }

    /// Interval `S_i`, 1-based.
    pub fn interval(&self, i: usize) -> Result<&[u64]> {
        if i == 0 || i > self.n {
            return Err(Error::invalid(format!(
                "interval index {i} outside 1..={}",
                self.n
            )));
        }
        Ok(&self.ground[(i - 1) * self.len..i * self.len])
    }

    /// 0-based positions of `x` inside `S`.
    pub fn positions(&self, x: &[u64]) -> Result<Vec<usize>> {
        x.iter()
            .map(|e| {
                self.ground
                    .binary_search(e)
                    .map_err(|_| Error::invalid(format!("element {e} is not in the ground set")))
            })
            .collect()
    }

    /// `|X ∩ S_i|` for every interval, from sorted positions.
    fn counts(&self, pos: &[usize]) -> Vec<usize> {
        let mut c = vec![0; self.n];
        for &p in pos {
            c[p / self.len] += 1;
        }
        c
    }
}

fn check_variant(part: &IntervalPartition, v: Variant) -> Result<()> {
    if part.variant != v {
        return Err(Error::invalid(format!(
            "operation needs a variant {v:?} partition"
        )));
    }
    Ok(())
}

/// `|X ∩ S_i| = 2l - 1`.
pub fn properly_hits_a(x: &[u64], part: &IntervalPartition, i: usize) -> Result<bool> {
    check_variant(part, Variant::A)?;
    part.interval(i)?;
    let pos = part.positions(x)?;
    Ok(part.counts(&pos)[i - 1] == 2 * part.l - 1)
}

/// Prefix count `≡ h (mod l)` and `X ∩ S_i ∈ {S_i \ {max}, S_i \ {min}}`.
pub fn properly_hits_b(x: &[u64], part: &IntervalPartition, i: usize, h: usize) -> Result<bool> {
    check_variant(part, Variant::B)?;
    part.interval(i)?;
    if h >= part.l {
        return Err(Error::invalid(format!("h = {h} must be < l = {}", part.l)));
    }
    let pos = part.positions(x)?;
    Ok(hits_b(part, &pos, i - 1, h))
}

/// Variant-B test on 0-based interval `i` from sorted positions.
fn hits_b(part: &IntervalPartition, pos: &[usize], i: usize, h: usize) -> bool {
    let (lo, hi) = (i * part.len, (i + 1) * part.len);
    let before = pos.partition_point(|&p| p < lo);
    let end = pos.partition_point(|&p| p < hi);
    if before % part.l != h || end - before != part.l {
        return false;
    }
    // l of the l+1 positions are present: contiguous run missing an end
    let (first, last) = (pos[before], pos[end - 1]);
    last - first == part.l - 1 && (first == lo || last == hi - 1)
}

/// 0-based indices of the intervals properly hit (h = 0 for variant B).
fn hit_indices(part: &IntervalPartition, pos: &[usize]) -> Vec<usize> {
    match part.variant {
        Variant::A => part
            .counts(pos)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 2 * part.l - 1)
            .map(|(i, _)| i)
            .collect(),
        Variant::B => (0..part.n).filter(|&i| hits_b(part, pos, i, 0)).collect(),
    }
}

/// Number of intervals properly hit by `X`.
pub fn count_hits(x: &[u64], part: &IntervalPartition) -> Result<usize> {
    let pos = part.positions(x)?;
    Ok(hit_indices(part, &pos).len())
}

/// `Z(X)` from positions, without validation; `pos` must be sorted.
pub(crate) fn count_hits_positions(part: &IntervalPartition, pos: &[usize]) -> usize {
    hit_indices(part, pos).len()
}

/// A cube `C(J, R)` (variant A) or `C'(J, R)` (variant B).
#[derive(Debug, Clone, Serialize)]
pub struct Cube {
    #[serde(skip)]
    partition: Arc<IntervalPartition>,
    /// 1-based interval indices, increasing, non-empty.
    j: Vec<usize>,
    /// Frozen part, sorted.
    r: Vec<u64>,
}

impl PartialEq for Cube {
    fn eq(&self, other: &Self) -> bool {
        self.j == other.j && self.r == other.r && self.partition == other.partition
    }
}

impl Eq for Cube {}

impl Cube {
    /// Validate the cube invariants and build it.
    pub fn new(partition: Arc<IntervalPartition>, j: Vec<usize>, r: Vec<u64>) -> Result<Self> {
        let part = &*partition;
        if j.is_empty() {
            return Err(Error::invalid("cube index set J must be non-empty"));
        }
        if j.windows(2).any(|w| w[0] >= w[1]) || j[0] == 0 || *j.last().unwrap() > part.n {
            return Err(Error::invalid("J must be increasing within 1..=n"));
        }
        if r.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("R must be strictly increasing"));
        }
        let pos = part.positions(&r)?;
        let counts = part.counts(&pos);
        let l = part.l;
        match part.variant {
            Variant::A => {
                for &i in &j {
                    if counts[i - 1] != 2 * l - 2 {
                        return Err(Error::invalid(format!(
                            "|R ∩ S_{i}| = {} but must be 2l-2 = {}",
                            counts[i - 1],
                            2 * l - 2
                        )));
                    }
                    let missing = Self::missing_in(part, &pos, i - 1);
                    if missing[1] - missing[0] != l {
                        return Err(Error::invalid(format!(
                            "missing elements of R in S_{i} are not at index distance l"
                        )));
                    }
                }
                if r.len() + j.len() != part.k() {
                    return Err(Error::invalid("|R| + |J| must equal k"));
                }
            }
            Variant::B => {
                let mut prefix = 0;
                let mut next = 0;
                for (i, &c) in counts.iter().enumerate() {
                    if next < j.len() && j[next] == i + 1 {
                        if c != 0 {
                            return Err(Error::invalid(format!("R ∩ S_{} must be empty", i + 1)));
                        }
                        if prefix % l != 0 {
                            return Err(Error::invalid(format!(
                                "|R ∩ (S_1 ∪ … ∪ S_{})| = {prefix} is not ≡ 0 mod l",
                                i
                            )));
                        }
                        next += 1;
                    }
                    prefix += c;
                }
                if r.len() + l * j.len() != part.k() {
                    return Err(Error::invalid("|R| + l|J| must equal k"));
                }
            }
        }
        Ok(Self { partition, j, r })
    }

    /// 0-based offsets (within the interval) of the interval elements missing
    /// from `pos`.
    fn missing_in(part: &IntervalPartition, pos: &[usize], i: usize) -> Vec<usize> {
        let lo = i * part.len;
        let present: BTreeSet<usize> = pos
            .iter()
            .filter(|&&p| p >= lo && p < lo + part.len)
            .map(|&p| p - lo)
            .collect();
        (0..part.len).filter(|o| !present.contains(o)).collect()
    }

    pub fn partition(&self) -> &Arc<IntervalPartition> {
        &self.partition
    }

    pub fn variant(&self) -> Variant {
        self.partition.variant
    }

    pub fn j(&self) -> &[usize] {
        &self.j
    }

    pub fn r(&self) -> &[u64] {
        &self.r
    }

    pub fn dimension(&self) -> usize {
        self.j.len()
    }

    /// `(J, R)`; identifies the cube within its partition.
    pub fn key(&self) -> (Vec<usize>, Vec<u64>) {
        (self.j.clone(), self.r.clone())
    }

    /// For each `i ∈ J`, the two alternative contents of `X ∩ S_i` beyond
    /// `R`, lexicographically smaller first.
    pub fn options(&self) -> Vec<[Vec<u64>; 2]> {
        let part = &*self.partition;
        let pos = part.positions(&self.r).expect("validated");
        self.j
            .iter()
            .map(|&i| {
                let s = part.interval(i).expect("validated");
                match part.variant {
                    Variant::A => {
                        let m = Self::missing_in(part, &pos, i - 1);
                        [vec![s[m[0]]], vec![s[m[1]]]]
                    }
                    Variant::B => [s[..part.l].to_vec(), s[1..].to_vec()],
                }
            })
            .collect()
    }

    /// Member selected by `mask`: bit `d-1-t` picks the second option in the
    /// `t`-th interval of `J`, so increasing masks are lexicographic order.
    pub fn member(&self, options: &[[Vec<u64>; 2]], mask: u64) -> Vec<u64> {
        let d = self.j.len();
        let mut x = self.r.clone();
        for (t, opt) in options.iter().enumerate() {
            let pick = (mask >> (d - 1 - t)) & 1;
            x.extend_from_slice(&opt[pick as usize]);
        }
        x.sort_unstable();
        x
    }
}

/// The unique maximal cube containing `X`, or `None` when `X` properly hits
/// no interval.
pub fn maximal_cube(x: &[u64], part: &Arc<IntervalPartition>) -> Result<Option<Cube>> {
    if x.len() != part.k() {
        return Err(Error::invalid(format!(
            "|X| = {} but k = {}",
            x.len(),
            part.k()
        )));
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("X must be strictly increasing"));
    }
    let pos = part.positions(x)?;
    let hits = hit_indices(part, &pos);
    if hits.is_empty() {
        return Ok(None);
    }
    let l = part.l;
    let mut r = Vec::with_capacity(x.len());
    let mut next = 0;
    for i in 0..part.n {
        let s = &part.ground[i * part.len..(i + 1) * part.len];
        let lo = i * part.len;
        let is_hit = next < hits.len() && hits[next] == i;
        if !is_hit {
            r.extend(
                pos.iter()
                    .filter(|&&p| p >= lo && p < lo + part.len)
                    .map(|&p| part.ground[p]),
            );
            continue;
        }
        next += 1;
        if part.variant == Variant::A {
            // a_j is the missing element (0-based offset j); drop its partner at distance l
            let j = Cube::missing_in(part, &pos, i)[0];
            let (a, b) = if j < l { (j, j + l) } else { (j - l, j) };
            r.extend(
                s.iter()
                    .enumerate()
                    .filter(|(o, _)| *o != a && *o != b)
                    .map(|(_, &e)| e),
            );
        }
    }
    let j: Vec<usize> = hits.iter().map(|i| i + 1).collect();
    Cube::new(Arc::clone(part), j, r).map(Some)
}

fn check_enum_dim(cube: &Cube) -> Result<()> {
    if cube.dimension() > MAX_ENUM_DIM {
        return Err(Error::Budget {
            what: format!("members of a cube of dimension {}", cube.dimension()),
            required: format!("2^{}", cube.dimension()),
            budget: 1 << MAX_ENUM_DIM,
        });
    }
    Ok(())
}

/// All `2^d` members, in lexicographic order.
pub fn enumerate_cube(cube: &Cube) -> Result<Vec<Vec<u64>>> {
    check_enum_dim(cube)?;
    let options = cube.options();
    Ok((0..1u64 << cube.dimension())
        .map(|m| cube.member(&options, m))
        .collect())
}

/// Main-projection indices of a cube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MainProjections {
    /// `(i, j(i))` for `i ∈ J`: the 1-based window (variant A) or block
    /// (variant B) index lying in `S_i` that tells the members apart.
    pub map: Vec<(usize, usize)>,
    /// `B = { j(i) }`, increasing.
    pub b_set: Vec<usize>,
}

/// Compute `j(i)` for every `i ∈ J` and confirm it is the same for all
/// members of the cube.
///
/// Variant A: the window `Π_j(X)` lies inside `S_i` and contains exactly one
/// of the two optional elements. Variant B: the block `X_j` equals `X ∩ S_i`.
pub fn main_projections(cube: &Cube) -> Result<MainProjections> {
    check_enum_dim(cube)?;
    let part = &*cube.partition;
    let l = part.l;
    let options = cube.options();
    let r_pos = part.positions(&cube.r)?;
    let mut map = Vec::with_capacity(cube.j.len());
    for (t, &i) in cube.j.iter().enumerate() {
        let lo = (i - 1) * part.len;
        // members add one (A) or l (B) elements to R in each earlier J interval
        let per_j = match part.variant {
            Variant::A => 1,
            Variant::B => l,
        };
        let earlier_j = cube.j[..t].len();
        let prefix = r_pos.partition_point(|&p| p < lo) + per_j * earlier_j;
        let j = match part.variant {
            Variant::A => {
                let h = Cube::missing_in(part, &r_pos, i - 1)[0] + 1;
                prefix + h
            }
            Variant::B => prefix / l + 1,
        };
        map.push((i, j));
    }

    let s_of = |i: usize| part.interval(i).expect("validated");
    for mask in 0..1u64 << cube.dimension() {
        let x = cube.member(&options, mask);
        for (t, &(i, j)) in map.iter().enumerate() {
            let s = s_of(i);
            let found: Vec<usize> = match part.variant {
                Variant::A => {
                    // Π_j(X) must be {a_h..a_{h+l-1}} or {a_{h+1}..a_{h+l}}
                    let h = s
                        .iter()
                        .position(|e| *e == options[t][0][0])
                        .expect("option in S_i");
                    let (low, high) = (&s[h..h + l], &s[h + 1..h + l + 1]);
                    (1..=x.len() + 1 - l)
                        .filter(|&w| {
                            let win = &x[w - 1..w - 1 + l];
                            win == low || win == high
                        })
                        .collect()
                }
                Variant::B => {
                    let inter: Vec<u64> = x.iter().copied().filter(|e| s.contains(e)).collect();
                    (1..=x.len() / l)
                        .filter(|&q| x[(q - 1) * l..q * l] == inter[..])
                        .collect()
                }
            };
            if found != [j] {
                return Err(Error::consistency(format!(
                    "main projection in S_{i} is not unique or moved: expected {j}, \
                     found {found:?} for member {x:?}"
                )));
            }
        }
    }
    let mut b_set: Vec<usize> = map.iter().map(|&(_, j)| j).collect();
    b_set.sort_unstable();
    Ok(MainProjections { map, b_set })
}

/// The coordinate vector a cube member maps to: window colors (variant A)
/// or block colors (variant B).
fn image_vector(cube: &Cube, kappa: &ColoringPipeline, x: &[u64]) -> Result<Vec<u64>> {
    match cube.variant() {
        Variant::A => colorings::window_colors(x, kappa),
        Variant::B => colorings::block_colors(x, kappa),
    }
}

/// Image of the cube under the coordinate map, as a set.
pub fn cube_image(cube: &Cube, kappa: &ColoringPipeline) -> Result<BTreeSet<Vec<u64>>> {
    enumerate_cube(cube)?
        .iter()
        .map(|x| image_vector(cube, kappa, x))
        .collect()
}

/// Code `(B, σ, {f_i})` determining a cube's image.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CubeImageCode {
    /// Length of the coordinate vectors.
    pub len: usize,
    /// 1-based coordinates, increasing.
    pub b: Vec<usize>,
    /// The two colors seen at each coordinate of `b`, smaller first.
    pub sigma: Vec<[u64; 2]>,
    /// For each coordinate outside `b`: (left neighbor color, right neighbor
    /// color) -> color, with [`DEFAULT_ARG`] for a missing neighbor.
    pub f_table: BTreeMap<usize, BTreeMap<(u64, u64), u64>>,
}

/// Nearest `b` entries strictly left and right of coordinate `i`, as indices
/// into `b`.
fn neighbors(b: &[usize], i: usize) -> (Option<usize>, Option<usize>) {
    let at = b.partition_point(|&j| j < i);
    (at.checked_sub(1), (at < b.len()).then_some(at))
}

/// Build the code of a cube's image by enumerating its members.
///
/// Fails with an internal-consistency error if two members share their
/// colors on `B` (injectivity), a `B` coordinate does not take exactly two
/// colors, or a coordinate outside `B` is not a function of its nearest `B`
/// neighbors.
pub fn encode_image(cube: &Cube, kappa: &ColoringPipeline) -> Result<CubeImageCode> {
    if kappa.l() != cube.partition.l {
        return Err(Error::invalid(format!(
            "pipeline has {} levels but the cube uses l = {}",
            kappa.l(),
            cube.partition.l
        )));
    }
    let proj = main_projections(cube)?;
    let b = proj.b_set;
    let vectors: Vec<Vec<u64>> = enumerate_cube(cube)?
        .iter()
        .map(|x| image_vector(cube, kappa, x))
        .collect::<Result<_>>()?;
    let len = vectors[0].len();

    let restricted: BTreeSet<Vec<u64>> = vectors
        .iter()
        .map(|v| b.iter().map(|&j| v[j - 1]).collect())
        .collect();
    if restricted.len() != vectors.len() {
        return Err(Error::consistency(format!(
            "coordinate map restricted to B = {b:?} is not injective on the cube ({} of {} patterns)",
            restricted.len(),
            vectors.len()
        )));
    }

    let mut sigma = Vec::with_capacity(b.len());
    for &j in &b {
        let seen: BTreeSet<u64> = vectors.iter().map(|v| v[j - 1]).collect();
        let pair: Vec<u64> = seen.into_iter().collect();
        if pair.len() != 2 {
            return Err(Error::consistency(format!(
                "coordinate {j} takes {} colors on the cube, expected 2",
                pair.len()
            )));
        }
        sigma.push([pair[0], pair[1]]);
    }

    let mut f_table = BTreeMap::new();
    for i in (1..=len).filter(|i| b.binary_search(i).is_err()) {
        let (left, right) = neighbors(&b, i);
        let mut f = BTreeMap::new();
        for v in &vectors {
            let key = (
                left.map_or(DEFAULT_ARG, |t| v[b[t] - 1]),
                right.map_or(DEFAULT_ARG, |t| v[b[t] - 1]),
            );
            if let Some(prev) = f.insert(key, v[i - 1]) {
                if prev != v[i - 1] {
                    return Err(Error::consistency(format!(
                        "color at coordinate {i} is not determined by its B-neighbors {key:?}"
                    )));
                }
            }
        }
        f_table.insert(i, f);
    }
    Ok(CubeImageCode {
        len,
        b,
        sigma,
        f_table,
    })
}

/// The set of coordinate vectors a code describes.
pub fn decode_image(code: &CubeImageCode, p_win: usize) -> Result<BTreeSet<Vec<u64>>> {
    let d = code.b.len();
    if d == 0 {
        return Err(Error::MalformedCode("B must be non-empty".into()));
    }
    if d != code.sigma.len() {
        return Err(Error::MalformedCode("|B| differs from |σ|".into()));
    }
    if d > MAX_ENUM_DIM {
        return Err(Error::Budget {
            what: "decoded image".into(),
            required: format!("2^{d}"),
            budget: 1 << MAX_ENUM_DIM,
        });
    }
    if code.len != p_win
        || code.b.windows(2).any(|w| w[0] >= w[1])
        || code.b[0] == 0
        || code.b[d - 1] > p_win
    {
        return Err(Error::MalformedCode(format!(
            "B = {:?} is not an increasing subset of 1..={p_win}",
            code.b
        )));
    }
    let mut out = BTreeSet::new();
    for mask in 0..1u64 << d {
        let mut v = vec![0u64; p_win];
        for (t, &j) in code.b.iter().enumerate() {
            v[j - 1] = code.sigma[t][((mask >> (d - 1 - t)) & 1) as usize];
        }
        for i in (1..=p_win).filter(|i| code.b.binary_search(i).is_err()) {
            let (left, right) = neighbors(&code.b, i);
            let key = (
                left.map_or(DEFAULT_ARG, |t| v[code.b[t] - 1]),
                right.map_or(DEFAULT_ARG, |t| v[code.b[t] - 1]),
            );
            v[i - 1] = *code
                .f_table
                .get(&i)
                .and_then(|f| f.get(&key))
                .ok_or_else(|| Error::MalformedCode(format!("f_{i} is undefined at {key:?}")))?;
        }
        out.insert(v);
    }
    Ok(out)
}

/// Outcome of [`codec_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodecSweep {
    pub sets: u64,
    pub uncovered: u64,
    pub cubes: usize,
    pub max_dimension: usize,
    /// Cubes whose decoded code equals their image.
    pub roundtrips: usize,
    pub distinct_codes: usize,
    /// Length of the coordinate vectors.
    pub coordinates: usize,
    /// `ln 84^coordinates`.
    pub ln_code_bound: f64,
    pub within_bound: bool,
}

/// Encode and decode the image of every maximal cube of `C(S, k)`.
///
/// Fails with an internal-consistency error when a decoded code differs from
/// the cube's image, or when encoding detects a broken invariant.
pub fn codec_sweep(
    part: &Arc<IntervalPartition>,
    kappa: &ColoringPipeline,
    budget: u64,
) -> Result<CodecSweep> {
    let m = part.ground.len();
    let k = part.k();
    let sets = crate::subsets::checked_count(m as u64, k as u64, budget, "k-subsets of S")?;
    let mut found: BTreeMap<(Vec<usize>, Vec<u64>), Cube> = BTreeMap::new();
    let mut uncovered = 0;
    let mut x = vec![0u64; k];
    crate::subsets::for_each_in_rank_range(m, k, 0, sets, |idx| {
        for (dst, &i) in x.iter_mut().zip(idx) {
            *dst = part.ground[i];
        }
        match maximal_cube(&x, part)? {
            Some(c) => {
                found.entry(c.key()).or_insert(c);
            }
            None => uncovered += 1,
        }
        Ok(())
    })?;
    let mut codes = BTreeSet::new();
    let mut coordinates = 0;
    for cube in found.values() {
        let code = encode_image(cube, kappa)?;
        let decoded = decode_image(&code, code.len)?;
        if decoded != cube_image(cube, kappa)? {
            return Err(Error::consistency(format!(
                "decoded image differs for cube J = {:?}",
                cube.j
            )));
        }
        coordinates = code.len;
        codes.insert(code);
    }
    let ln_code_bound = coordinates as f64 * 84f64.ln();
    Ok(CodecSweep {
        sets,
        uncovered,
        cubes: found.len(),
        max_dimension: found.values().map(Cube::dimension).max().unwrap_or(0),
        roundtrips: found.len(),
        distinct_codes: codes.len(),
        coordinates,
        ln_code_bound,
        within_bound: (codes.len() as f64).ln() <= ln_code_bound,
    })
}

/// A random valid variant-B cube of dimension `d`.
///
/// `J` is a uniform `d`-subset of `[n]`. Every other interval starts with
/// `l` elements of `R`; then `shuffles` moves of one unit between two
/// non-`J` intervals with no `J` index between them vary the sizes without
/// touching any prefix count seen by `J`. Each `R ∩ S_i` is a uniform subset
/// of its size.
pub fn sample_cube_b<R: Rng>(
    part: &Arc<IntervalPartition>,
    d: usize,
    shuffles: usize,
    rng: &mut R,
) -> Result<Cube> {
    check_variant(part, Variant::B)?;
    let (n, l) = (part.n, part.l);
    if d == 0 || d > n {
        return Err(Error::invalid(format!("dimension {d} outside 1..={n}")));
    }
    let mut idx: Vec<usize> = (1..=n).collect();
    idx.shuffle(rng);
    let mut j: Vec<usize> = idx[..d].to_vec();
    j.sort_unstable();

    let in_j = |i: usize| j.binary_search(&i).is_ok();
    let mut sizes: Vec<usize> = (1..=n).map(|i| if in_j(i) { 0 } else { l }).collect();
    // runs of consecutive non-J intervals
    let mut runs: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    for i in 1..=n {
        if in_j(i) {
            if !cur.is_empty() {
                runs.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(i);
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    let runs: Vec<Vec<usize>> = runs.into_iter().filter(|r| r.len() >= 2).collect();
    if !runs.is_empty() {
        for _ in 0..shuffles {
            let run = &runs[rng.gen_range(0..runs.len())];
            let a = run[rng.gen_range(0..run.len())];
            let b = run[rng.gen_range(0..run.len())];
            if a != b && sizes[a - 1] < l + 1 && sizes[b - 1] > 0 {
                sizes[a - 1] += 1;
                sizes[b - 1] -= 1;
            }
        }
    }
    let mut r = Vec::with_capacity(l * (n - d));
    for i in 1..=n {
        let s = part.interval(i)?;
        let mut pick: Vec<u64> = s.choose_multiple(rng, sizes[i - 1]).copied().collect();
        r.append(&mut pick);
    }
    r.sort_unstable();
    Cube::new(Arc::clone(part), j, r)
}
