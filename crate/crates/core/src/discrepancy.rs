//! Relative discrepancy of a k-set coloring, exact and Monte Carlo, plus
//! cube-cover accounting, worst ground-set scans and hit-count statistics.
//!
//! All parallel work is cut into fixed chunks of [`CHUNK`] items. Monte
//! Carlo chunk `c` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream
//! `c`, and per-chunk counts are summed as integers, so every report is
//! independent of the number of worker threads.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::colorings::KSetColoring;
use crate::cubes::{self, IntervalPartition, Variant};
use crate::error::{Error, Result};
use crate::sorted_set::SortedSet;
use crate::subsets::{self, SubsetSampler};

/// Work unit for parallel enumeration and sampling.
pub const CHUNK: u64 = 1 << 14;

/// Default cap on enumerated sets.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Confidence level of Monte Carlo radii.
pub const CONFIDENCE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo { seed: u64, samples: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub color_counts: Vec<u64>,
    pub total: u64,
    pub frequencies: Vec<f64>,
    /// `max_i |freq_i - 1/|C||`.
    pub deviation: f64,
    pub method: Method,
    /// 0 for exact reports; two-sided Hoeffding radius at 99% otherwise.
    pub confidence_radius: f64,
    /// `#(+1) - #(-1)` for signed two-color colorings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signed_sum: Option<i64>,
}

impl DiscrepancyReport {
    pub fn from_counts(counts: Vec<u64>, method: Method, signed: bool) -> Self {
        let total: u64 = counts.iter().sum();
        let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        let confidence_radius = match method {
            Method::Exact => 0.0,
            Method::MonteCarlo { samples, .. } => hoeffding_radius(counts.len(), samples),
        };
        let signed_sum = (signed && counts.len() == 2).then(|| counts[0] as i64 - counts[1] as i64);
        Self {
            deviation: deviation_from_counts(&counts),
            color_counts: counts,
            total,
            frequencies,
            method,
            confidence_radius,
            signed_sum,
        }
    }
}

/// `max_i |counts_i / total - 1/|C||`; 0 for an empty family.
pub fn deviation_from_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let uniform = 1.0 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 / total as f64 - uniform).abs())
        .fold(0.0, f64::max)
}

/// `sqrt(ln(2|C| / 0.01) / (2 samples))`, simultaneous over all colors.
pub fn hoeffding_radius(colors: usize, samples: u64) -> f64 {
    ((2.0 * colors as f64 / (1.0 - CONFIDENCE)).ln() / (2.0 * samples as f64)).sqrt()
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

fn check_k(s: &SortedSet, k: usize) -> Result<()> {
    if k == 0 || k > s.len() {
        return Err(Error::invalid(format!(
            "k = {k} must lie in 1..=|S| = {}",
            s.len()
        )));
    }
    Ok(())
}

/// Chunked parallel fold over all k-subsets of `S` in lexicographic order.
fn fold_subsets<T, F, R>(
    s: &SortedSet,
    k: usize,
    total: u64,
    init: impl Fn() -> T + Sync,
    visit: F,
    reduce: R,
) -> Result<T>
where
    T: Send,
    F: Fn(&mut T, &[u64]) -> Result<()> + Sync,
    R: Fn(T, T) -> T + Sync + Send,
{
    let elems = s.as_slice();
    let m = elems.len();
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let count = CHUNK.min(total - start);
            let mut acc = init();
            let mut x = vec![0u64; k];
            subsets::for_each_in_rank_range(m, k, start, count, |idx| {
                for (dst, &i) in x.iter_mut().zip(idx) {
                    *dst = elems[i];
                }
                visit(&mut acc, &x)
            })?;
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(init(), reduce))
}

/// Exact discrepancy over `C(S, k)`.
pub fn exact_discrepancy(
    coloring: &dyn KSetColoring,
    s: &SortedSet,
    k: usize,
    budget: u64,
) -> Result<DiscrepancyReport> {
    check_k(s, k)?;
    let total = subsets::checked_count(s.len() as u64, k as u64, budget, "k-subsets of S")?;
    let colors = coloring.num_colors();
    let counts = fold_subsets(
        s,
        k,
        total,
        || vec![0u64; colors],
        |acc, x| {
            acc[coloring.color(x)?] += 1;
            Ok(())
        },
        add_counts,
    )?;
    Ok(DiscrepancyReport::from_counts(
        counts,
        Method::Exact,
        coloring.is_signed(),
    ))
}

/// Exact discrepancy over an explicit family of k-sets.
pub fn family_discrepancy(
    coloring: &dyn KSetColoring,
    family: &[Vec<u64>],
) -> Result<DiscrepancyReport> {
    let mut counts = vec![0u64; coloring.num_colors()];
    for x in family {
        counts[coloring.color(x)?] += 1;
    }
    Ok(DiscrepancyReport::from_counts(
        counts,
        Method::Exact,
        coloring.is_signed(),
    ))
}

/// Runs `draw` for `samples` draws split over seeded chunk streams.
fn sample_chunks<T, F, R>(
    samples: u64,
    seed: u64,
    init: impl Fn() -> T + Sync,
    draw: F,
    reduce: R,
) -> Result<T>
where
    T: Send,
    F: Fn(&mut T, &mut ChaCha8Rng) -> Result<()> + Sync,
    R: Fn(T, T) -> T + Sync + Send,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut acc = init();
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                draw(&mut acc, &mut rng)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(init(), reduce))
}

/// Monte Carlo discrepancy from `samples` uniform k-subsets of `S`.
pub fn mc_discrepancy(
    coloring: &dyn KSetColoring,
    s: &SortedSet,
    k: usize,
    samples: u64,
    seed: u64,
) -> Result<DiscrepancyReport> {
    check_k(s, k)?;
    if samples == 0 {
        return Err(Error::invalid("samples must be at least 1"));
    }
    let sampler = SubsetSampler::new(s.len() as u64, k)?;
    let elems = s.as_slice();
    let colors = coloring.num_colors();
    let counts = sample_chunks(
        samples,
        seed,
        || vec![0u64; colors],
        |acc, rng| {
            let x: Vec<u64> = sampler
                .sample(rng)
                .into_iter()
                .map(|i| elems[i as usize - 1])
                .collect();
            acc[coloring.color(&x)?] += 1;
            Ok(())
        },
        add_counts,
    )?;
    Ok(DiscrepancyReport::from_counts(
        counts,
        Method::MonteCarlo { seed, samples },
        coloring.is_signed(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeDeviation {
    /// 1-based interval indices of the cube.
    pub j: Vec<usize>,
    pub dimension: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverReport {
    pub variant: Variant,
    pub l: usize,
    pub k: usize,
    pub total: u64,
    pub cubes: usize,
    pub covered_fraction: f64,
    pub uncovered_fraction: f64,
    pub dim_threshold: usize,
    /// Sets lying in maximal cubes of dimension below the threshold.
    pub small_cube_fraction: f64,
    /// Max deviation over cubes of dimension `>= dim_threshold` (0 if none).
    pub large_cube_deviation: f64,
    /// `large_cube_deviation + uncovered_fraction + small_cube_fraction`.
    pub composition_bound: f64,
    pub overall_exact_deviation: f64,
    /// Cubes in `(J, R)` order.
    pub per_cube: Vec<CubeDeviation>,
}

/// Partition `C(S, k)` into maximal cubes plus the sets hitting no interval,
/// and check the composed bound on the overall deviation.
///
/// `S` is cut into intervals of the given variant and `l`; `k` follows from
/// the partition. Fails with an internal-consistency error if a maximal cube
/// does not receive exactly `2^d` sets or the overall deviation exceeds the
/// composition bound.
pub fn cube_cover_report(
    s: &SortedSet,
    variant: Variant,
    l: usize,
    coloring: &dyn KSetColoring,
    dim_threshold: usize,
    budget: u64,
) -> Result<CoverReport> {
    let part = Arc::new(IntervalPartition::new(s, variant, l)?);
    let k = part.k();
    check_k(s, k)?;
    let total = subsets::checked_count(s.len() as u64, k as u64, budget, "k-subsets of S")?;
    let colors = coloring.num_colors();

    type Groups = HashMap<(Vec<usize>, Vec<u64>), Vec<u64>>;
    let (groups, uncovered) = fold_subsets(
        s,
        k,
        total,
        || (Groups::new(), vec![0u64; colors]),
        |(groups, uncovered), x| {
            let color = coloring.color(x)?;
            match cubes::maximal_cube(x, &part)? {
                Some(cube) => {
                    groups.entry(cube.key()).or_insert_with(|| vec![0; colors])[color] += 1
                }
                None => uncovered[color] += 1,
            }
            Ok(())
        },
        |(mut ga, ua), (gb, ub)| {
            for (key, counts) in gb {
                let e = ga.entry(key).or_insert_with(|| vec![0; colors]);
                for (a, b) in e.iter_mut().zip(counts) {
                    *a += b;
                }
            }
            (ga, add_counts(ua, ub))
        },
    )?;
    let groups: BTreeMap<_, _> = groups.into_iter().collect();

    let mut overall = uncovered.clone();
    let uncovered_sets: u64 = uncovered.iter().sum();
    let mut small_sets = 0u64;
    let mut large_dev = 0.0f64;
    let mut per_cube = Vec::with_capacity(groups.len());
    for ((j, _), counts) in &groups {
        let d = j.len();
        let size: u64 = counts.iter().sum();
        if size != 1 << d {
            return Err(Error::consistency(format!(
                "maximal cube J = {j:?} received {size} sets, expected 2^{d}"
            )));
        }
        let dev = deviation_from_counts(counts);
        if d >= dim_threshold {
            large_dev = large_dev.max(dev);
        } else {
            small_sets += size;
        }
        for (a, &b) in overall.iter_mut().zip(counts) {
            *a += b;
        }
        per_cube.push(CubeDeviation {
            j: j.clone(),
            dimension: d,
            deviation: dev,
        });
    }
    let t = total as f64;
    let uncovered_fraction = uncovered_sets as f64 / t;
    let small_cube_fraction = small_sets as f64 / t;
    let composition_bound = large_dev + uncovered_fraction + small_cube_fraction;
    let overall_exact_deviation = deviation_from_counts(&overall);
    if overall_exact_deviation > composition_bound + 1e-12 {
        return Err(Error::consistency(format!(
            "overall deviation {overall_exact_deviation} exceeds composition bound {composition_bound}"
        )));
    }
    Ok(CoverReport {
        variant,
        l,
        k,
        total,
        cubes: groups.len(),
        covered_fraction: 1.0 - uncovered_fraction,
        uncovered_fraction,
        dim_threshold,
        small_cube_fraction,
        large_cube_deviation: large_dev,
        composition_bound,
        overall_exact_deviation,
        per_cube,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Exhaustive,
    Sampled,
}

impl std::str::FromStr for ScanMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(ScanMode::Exhaustive),
            "sampled" => Ok(ScanMode::Sampled),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstSetReport {
    pub mode: ScanMode,
    pub sets_scanned: u64,
    pub max_deviation: f64,
    pub argmax: Vec<u64>,
    /// Report of the coloring on `argmax`.
    pub argmax_report: DiscrepancyReport,
}

/// Options of [`worst_set_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    /// Ground-set universe `[N]`.
    pub universe: u64,
    /// Size of the scanned ground sets.
    pub m: usize,
    pub k: usize,
    pub mode: ScanMode,
    /// Number of ground sets drawn in sampled mode.
    pub set_samples: u64,
    /// Monte Carlo samples per ground set when `C(m, k) > budget`.
    pub mc_samples: u64,
    pub seed: u64,
    pub budget: u64,
}

/// Largest deviation of `coloring` over ground sets `S ⊆ [N]` of size `m`.
///
/// Exhaustive mode visits every `S` in lexicographic order; sampled mode
/// draws `set_samples` uniform sets from stream `u64::MAX` of the seed.
/// Per-set reports are exact when `C(m, k) <= budget`, else Monte Carlo with
/// seed `seed + 1 + index`. Ties keep the first maximum.
pub fn worst_set_scan(coloring: &dyn KSetColoring, cfg: &ScanConfig) -> Result<WorstSetReport> {
    worst_set_scan_with(coloring, cfg, |_, _| Ok(()))
}

/// [`worst_set_scan`] calling `on_set` with each ground set and its report
/// in scan order.
pub fn worst_set_scan_with<F>(
    coloring: &dyn KSetColoring,
    cfg: &ScanConfig,
    mut on_set: F,
) -> Result<WorstSetReport>
where
    F: FnMut(&[u64], &DiscrepancyReport) -> Result<()>,
{
    let ScanConfig {
        universe,
        m,
        k,
        mode,
        set_samples,
        mc_samples,
        seed,
        budget,
    } = *cfg;
    if m == 0 || m as u64 > universe || k == 0 || k > m {
        return Err(Error::invalid(format!(
            "need 1 <= k <= m <= N, got k = {k}, m = {m}, N = {universe}"
        )));
    }
    let exact = subsets::binomial_u128(m as u64, k as u64).is_some_and(|c| c <= budget as u128);
    let eval = |s: &SortedSet, index: u64| -> Result<DiscrepancyReport> {
        if exact {
            exact_discrepancy(coloring, s, k, budget)
        } else {
            mc_discrepancy(
                coloring,
                s,
                k,
                mc_samples,
                seed.wrapping_add(1).wrapping_add(index),
            )
        }
    };
    let mut best: Option<(f64, SortedSet, DiscrepancyReport)> = None;
    let mut consider = |s: SortedSet, index: u64| -> Result<()> {
        let report = eval(&s, index)?;
        on_set(s.as_slice(), &report)?;
        if best.as_ref().is_none_or(|(d, _, _)| report.deviation > *d) {
            best = Some((report.deviation, s, report));
        }
        Ok(())
    };
    let scanned = match mode {
        ScanMode::Exhaustive => {
            let count =
                subsets::checked_count(universe, m as u64, budget, "ground sets of size m")?;
            let n = usize::try_from(universe).map_err(|_| Error::invalid("N too large"))?;
            let mut index = 0;
            subsets::for_each_in_rank_range(n, m, 0, count, |idx| {
                let s = SortedSet::new(idx.iter().map(|&i| i as u64 + 1).collect(), universe)?;
                consider(s, index)?;
                index += 1;
                Ok(())
            })?;
            count
        }
        ScanMode::Sampled => {
            if set_samples == 0 {
                return Err(Error::invalid("set_samples must be at least 1"));
            }
            let sampler = SubsetSampler::new(universe, m)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            for index in 0..set_samples {
                consider(SortedSet::new(sampler.sample(&mut rng), universe)?, index)?;
            }
            set_samples
        }
    };
    let (max_deviation, argmax, argmax_report) = best.expect("at least one set scanned");
    Ok(WorstSetReport {
        mode,
        sets_scanned: scanned,
        max_deviation,
        argmax: argmax.into_vec(),
        argmax_report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitStatistics {
    pub variant: Variant,
    pub l: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub samples: u64,
    pub seed: u64,
    pub mean: f64,
    /// `histogram[z]` = number of samples with `Z = z`.
    pub histogram: Vec<u64>,
    /// `n / (2e)`.
    pub threshold: f64,
    /// Empirical `P[Z < n/(2e)]`.
    pub fraction_below_threshold: f64,
    /// `exp(-n/(8e))`, an asymptotic reference value.
    pub reference_bound: f64,
}

/// Distribution of the number `Z` of properly hit intervals over uniform
/// k-subsets of `S = [m]`.
pub fn hit_statistics(
    variant: Variant,
    l: usize,
    n: usize,
    samples: u64,
    seed: u64,
) -> Result<HitStatistics> {
    if samples == 0 || n == 0 {
        return Err(Error::invalid("samples and n must be positive"));
    }
    let len = match variant {
        Variant::A => 2 * l,
        Variant::B => l + 1,
    };
    let m = len * n;
    let part = IntervalPartition::new(&SortedSet::interval(m as u64), variant, l)?;
    let k = part.k();
    let sampler = SubsetSampler::new(m as u64, k)?;
    let histogram = sample_chunks(
        samples,
        seed,
        || vec![0u64; n + 1],
        |hist, rng| {
            let pos: Vec<usize> = sampler
                .sample(rng)
                .into_iter()
                .map(|x| x as usize - 1)
                .collect();
            hist[cubes::count_hits_positions(&part, &pos)] += 1;
            Ok(())
        },
        add_counts,
    )?;
    let threshold = n as f64 / (2.0 * std::f64::consts::E);
    let weighted: u64 = histogram
        .iter()
        .enumerate()
        .map(|(z, &c)| z as u64 * c)
        .sum();
    let below: u64 = histogram
        .iter()
        .enumerate()
        .filter(|(z, _)| (*z as f64) < threshold)
        .map(|(_, &c)| c)
        .sum();
    Ok(HitStatistics {
        variant,
        l,
        n,
        k,
        m,
        samples,
        seed,
        mean: weighted as f64 / samples as f64,
        histogram,
        threshold,
        fraction_below_threshold: below as f64 / samples as f64,
        reference_bound: (-(n as f64) / (8.0 * std::f64::consts::E)).exp(),
    })
}
