use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use shiftdisc::colorings::{self, ExplicitColoring, KSetColoring, RandomizedColoring};
use shiftdisc::cubes::{self, IntervalPartition, Variant};
use shiftdisc::discrepancy::{self, ScanConfig, ScanMode};
use shiftdisc::parity::{self, ParityParams};
use shiftdisc::shift_graph::{self, VerifyMode};
use shiftdisc::towers::{self, BoundName, TowerKind, TowerValue};
use shiftdisc::{ColoringPipeline, Error, Result, SortedSet};

use crate::args::*;

/// A command's result and, when it has one, its flat table.
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidArgument(format!("serialization: {e}")))
}

fn plain(result: Value) -> Outcome {
    Outcome {
        result,
        table: None,
    }
}

fn parse_set(text: &str, universe: u64) -> Result<SortedSet> {
    let elems = text
        .split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::InvalidArgument(format!("bad set element {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    SortedSet::new(elems, universe)
}

fn parse_probability(text: &str) -> Result<(f64, Option<(u64, u64)>)> {
    let bad = || Error::InvalidArgument(format!("cannot read probability {text:?}"));
    match text.split_once('/') {
        Some((a, b)) => {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok((a as f64 / b as f64, Some((a, b))))
        }
        None => Ok((text.trim().parse().map_err(|_| bad())?, None)),
    }
}

fn variant(v: VariantArg) -> Variant {
    match v {
        VariantArg::A => Variant::A,
        VariantArg::B => Variant::B,
    }
}

fn build_pipeline(kind: PipelineKind, n: u64, l: usize) -> Result<ColoringPipeline> {
    match kind {
        PipelineKind::Three => ColoringPipeline::build(n, l),
        PipelineKind::Delta => ColoringPipeline::delta_only(n, l),
        PipelineKind::Auto if l >= 3 => ColoringPipeline::build(n, l),
        PipelineKind::Auto => ColoringPipeline::delta_only(n, l),
    }
}

fn pipeline(args: &PipelineArgs) -> Result<ColoringPipeline> {
    build_pipeline(args.pipeline, args.n, args.l)
}

fn coloring<'a>(
    args: &ColoringArgs,
    kappa: &'a ColoringPipeline,
) -> Result<Box<dyn KSetColoring + 'a>> {
    Ok(match args.coloring {
        ColoringKind::Explicit => Box::new(ExplicitColoring::new(kappa, args.c)?),
        ColoringKind::Randomized => Box::new(RandomizedColoring::new(kappa, args.psi_seed)),
    })
}

fn ground(args: &GroundArgs, universe: u64) -> Result<SortedSet> {
    match (&args.set, args.m) {
        (Some(s), _) => parse_set(s, universe),
        (None, Some(m)) if m >= 1 && m <= universe => Ok(SortedSet::interval(m)),
        (None, Some(m)) => Err(Error::InvalidArgument(format!(
            "m = {m} must lie in 1..={universe}"
        ))),
        (None, None) => Ok(SortedSet::interval(universe)),
    }
}

fn report_table(r: &discrepancy::DiscrepancyReport) -> Table {
    let mut t = Table::new(&["color", "count", "frequency"]);
    for (i, (c, f)) in r.color_counts.iter().zip(&r.frequencies).enumerate() {
        t.push(vec![i.to_string(), c.to_string(), f.to_string()]);
    }
    t
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<Outcome> {
    match cmd {
        Command::Towers(a) => cmd_towers(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::ShiftColor(a) => {
            let kappa = pipeline(&a.pipeline)?;
            let block = parse_set(&a.set, a.pipeline.n)?;
            let color = kappa.color(&block)?;
            Ok(plain(json!({
                "block": block,
                "color": color,
                "color_counts": kappa.color_counts(),
                "three_color": kappa.is_three_color(),
            })))
        }
        Command::ShiftVerify(a) => {
            let kappa = pipeline(&a.pipeline)?;
            let mode = match a.mode {
                Mode::Exhaustive => VerifyMode::Exhaustive,
                Mode::Sampled => VerifyMode::Sampled,
            };
            let report = shift_graph::verify_proper(&kappa, mode, a.budget, a.seed)?;
            let mut v = to_value(&report)?;
            v["color_counts"] = to_value(kappa.color_counts())?;
            v["three_color"] = json!(kappa.is_three_color());
            Ok(plain(v))
        }
        Command::OddCycle(a) => Ok(plain(to_value(shift_graph::odd_cycle_check(
            a.n, a.l, a.budget,
        )?)?)),
        Command::Parity(a) => cmd_parity(a),
        Command::CubeStats(a) => {
            let stats =
                discrepancy::hit_statistics(variant(a.variant), a.l, a.n, a.samples, a.seed)?;
            let mut t = Table::new(&["z", "count"]);
            for (z, c) in stats.histogram.iter().enumerate() {
                t.push(vec![z.to_string(), c.to_string()]);
            }
            Ok(Outcome {
                result: to_value(&stats)?,
                table: Some(t),
            })
        }
        Command::CodecRoundtrip(a) => {
            let len = match a.variant {
                VariantArg::A => 2 * a.l,
                VariantArg::B => a.l + 1,
            };
            let m = (len * a.n) as u64;
            let part = Arc::new(IntervalPartition::new(
                &SortedSet::interval(m),
                variant(a.variant),
                a.l,
            )?);
            let kappa = build_pipeline(a.pipeline, m, a.l)?;
            Ok(plain(to_value(cubes::codec_sweep(
                &part, &kappa, a.budget,
            )?)?))
        }
        Command::Color(a) => {
            let kappa = pipeline(&a.pipeline)?;
            let x = parse_set(&a.set, a.pipeline.n)?;
            let xs = x.as_slice();
            let result = match a.coloring.coloring {
                ColoringKind::Explicit => json!({
                    "coloring": "explicit",
                    "value": colorings::gamma_explicit(xs, &kappa, a.coloring.c)?,
                    "block_vector": colorings::block_colors(xs, &kappa)?,
                }),
                ColoringKind::Randomized => json!({
                    "coloring": "randomized",
                    "value": colorings::gamma_randomized(xs, &kappa, a.coloring.psi_seed)?,
                    "window_vector": colorings::window_colors(xs, &kappa)?,
                    "psi": colorings::PSI_ALGORITHM,
                }),
            };
            Ok(plain(result))
        }
        Command::DiscExact(a) => {
            let kappa = pipeline(&a.pipeline)?;
            let col = coloring(&a.coloring, &kappa)?;
            let s = ground(&a.ground, a.pipeline.n)?;
            let r = discrepancy::exact_discrepancy(col.as_ref(), &s, a.k, a.budget)?;
            Ok(Outcome {
                table: Some(report_table(&r)),
                result: to_value(&r)?,
            })
        }
        Command::DiscMc(a) => {
            let kappa = pipeline(&a.pipeline)?;
            let col = coloring(&a.coloring, &kappa)?;
            let s = ground(&a.ground, a.pipeline.n)?;
            let r = discrepancy::mc_discrepancy(col.as_ref(), &s, a.k, a.samples, a.seed)?;
            Ok(Outcome {
                table: Some(report_table(&r)),
                result: to_value(&r)?,
            })
        }
        Command::CoverReport(a) => {
            let kappa = pipeline(&a.pipeline)?;
            let col = coloring(&a.coloring, &kappa)?;
            let s = ground(&a.ground, a.pipeline.n)?;
            let r = discrepancy::cube_cover_report(
                &s,
                variant(a.variant),
                a.pipeline.l,
                col.as_ref(),
                a.dim_threshold,
                a.budget,
            )?;
            let mut t = Table::new(&["j", "dimension", "deviation"]);
            for c in &r.per_cube {
                let j: Vec<String> = c.j.iter().map(|x| x.to_string()).collect();
                t.push(vec![
                    j.join(" "),
                    c.dimension.to_string(),
                    c.deviation.to_string(),
                ]);
            }
            Ok(Outcome {
                result: to_value(&r)?,
                table: Some(t),
            })
        }
        Command::WorstSet(a) => cmd_worst_set(a, out),
    }
}

fn cmd_towers(a: &TowersArgs) -> Result<Outcome> {
    let kind = match a.kind {
        Kind::Standard => TowerKind::Standard,
        Kind::Sqrt2 => TowerKind::Sqrt2,
    };
    let mut result = match towers::tower(kind, a.height, a.x, a.bit_limit)? {
        TowerValue::Exact(v) => {
            json!({ "value": v.to_string(), "exceeds_limit": false, "bits": v.bits() })
        }
        TowerValue::ExceedsLimit { min_bits } => {
            json!({ "value": null, "exceeds_limit": true, "min_bits": min_bits.to_string() })
        }
    };
    if a.domination {
        result["domination"] = json!(towers::tower_domination_check(a.height, a.x)?);
    }
    Ok(plain(result))
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Outcome> {
    let params: BTreeMap<String, f64> = [
        ("n", a.n),
        ("k", a.k),
        ("l", a.l),
        ("p", a.p),
        ("delta", a.delta),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
    .collect();
    let values = if a.names.is_empty() {
        BoundName::ALL
            .into_iter()
            .filter_map(|b| towers::bound_calculators(b, &params).ok())
            .collect::<Vec<_>>()
    } else {
        a.names
            .iter()
            .map(|n| towers::bound_calculators(n.parse()?, &params))
            .collect::<Result<Vec<_>>>()?
    };
    let mut t = Table::new(&["name", "value", "ln_value", "feasible"]);
    for v in &values {
        t.push(vec![
            v.name.to_string(),
            v.value.to_string(),
            v.ln_value.map(|x| x.to_string()).unwrap_or_default(),
            v.feasible.map(|x| x.to_string()).unwrap_or_default(),
        ]);
    }
    Ok(Outcome {
        result: json!({ "bounds": values }),
        table: Some(t),
    })
}

fn cmd_parity(a: &ParityArgs) -> Result<Outcome> {
    let (p, ratio) = parse_probability(&a.p)?;
    let make = |h| match ratio {
        Some((num, den)) => ParityParams::from_ratio(num, den, a.n, a.l, h),
        None => ParityParams::new(p, a.n, a.l, h),
    };
    let base = make(a.h.unwrap_or(0))?;
    let dist = parity::mod_distribution(&base);
    let bound = parity::parity_bound(&base);
    let uniform = 1.0 / a.l as f64;
    let row = |h: usize| json!({ "h": h, "probability": dist[h], "uniform": uniform, "deviation": (dist[h] - uniform).abs(), "bound": bound });
    let mut t = Table::new(&["h", "probability", "uniform", "deviation", "bound"]);
    for (h, &q) in dist.iter().enumerate() {
        t.push(vec![
            h.to_string(),
            q.to_string(),
            uniform.to_string(),
            (q - uniform).abs().to_string(),
            bound.to_string(),
        ]);
    }
    let result = match a.h {
        Some(h) => {
            let mut r = row(h);
            r["distribution"] = json!(dist);
            r
        }
        None => json!({ "distribution": dist, "rows": (0..a.l).map(row).collect::<Vec<_>>() }),
    };
    Ok(Outcome {
        result,
        table: Some(t),
    })
}

fn cmd_worst_set(a: &WorstSetArgs, out: &mut dyn Write) -> Result<Outcome> {
    let kappa = pipeline(&a.pipeline)?;
    let col = coloring(&a.coloring, &kappa)?;
    let cfg = ScanConfig {
        universe: a.pipeline.n,
        m: a.m,
        k: a.k,
        mode: match a.mode {
            Mode::Exhaustive => ScanMode::Exhaustive,
            Mode::Sampled => ScanMode::Sampled,
        },
        set_samples: a.set_samples,
        mc_samples: a.mc_samples,
        seed: a.seed,
        budget: a.budget,
    };
    let report = discrepancy::worst_set_scan_with(col.as_ref(), &cfg, |s, r| {
        if a.ndjson {
            let line = json!({ "set": s, "deviation": r.deviation, "method": r.method });
            writeln!(out, "{line}").map_err(|e| Error::InvalidArgument(format!("output: {e}")))?;
        }
        Ok(())
    })?;
    Ok(plain(to_value(&report)?))
}
