//! Dispatch from an [`ExperimentConfig`] to the library.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use super::config::{CheckKind, Command, ExperimentConfig, ModeName};
use crate::control::{check_bounded, ControlFunction, ControlJson};
use crate::sampling::GridSpec;
use crate::corpus::{self, Controls};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::metric::{AbsDiff, Euclidean, Metric, Point};
use crate::multimap::{
    check_ab_contraction, check_ab_mapping, check_hausdorff_contraction, Domain, MapJson, MultivaluedMap,
};
use crate::solver::{
    classify_limit_case, iterate, trace_invariants, trace_to_jsonl, validate_preconditions, verify_fixed_point,
    TheoremMode,
};
use crate::summability::{bound_check, summability_rows, summability_verdict, write_csv, Criterion};

pub const SCHEMA: &str = "v1";

/// Exit status and rendered output of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    /// 0 holds/converged, 1 violated/failed.
    pub code: i32,
    pub report: Value,
    /// Human-readable lines for the terminal.
    pub text: String,
    /// Summability CSV when no `csv` path was configured.
    pub csv: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ControlsFile {
    alpha: ControlJson,
    beta: ControlJson,
    #[serde(default)]
    gamma: Option<ControlJson>,
    #[serde(default)]
    k: Option<ControlJson>,
}

struct Target {
    map: MultivaluedMap,
    controls: Option<Controls>,
    modes: Vec<TheoremMode>,
    start_range: Option<(f64, f64)>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &str) -> Result<T> {
    let raw = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&raw)?)
}

fn load_target(cfg: &ExperimentConfig) -> Result<Target> {
    let source = cfg
        .map_source
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("missing map source".into()))?;
    let mut target = if let Some(label) = source.strip_prefix("corpus:") {
        let e = corpus::entry(label)?;
        Target {
            map: e.map,
            controls: Some(e.controls),
            modes: e.modes,
            start_range: Some(e.start_range),
        }
    } else {
        let json: MapJson = read_json(source)?;
        Target {
            map: MultivaluedMap::from_json(json)?,
            controls: None,
            modes: Vec::new(),
            start_range: None,
        }
    };
    if let Some(path) = &cfg.controls_source {
        let file: ControlsFile = read_json(path)?;
        let conv = |j: ControlJson| ControlFunction::try_from(j);
        target.controls = Some(Controls {
            alpha: conv(file.alpha)?,
            beta: conv(file.beta)?,
            gamma: file.gamma.map(conv).transpose()?,
            p: None,
            k: file.k.map(conv).transpose()?,
        });
        target.modes.clear();
    }
    Ok(target)
}

fn controls(t: &Target) -> Result<&Controls> {
    t.controls
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("map file given without controls".into()))
}

fn metric_for(map: &MultivaluedMap) -> Box<dyn Metric> {
    if map.domain().dim() == 1 {
        Box::new(AbsDiff)
    } else {
        Box::new(Euclidean)
    }
}

/// Finite bounds of the domain, or `sample_range` on unbounded axes.
fn bounds(domain: &Domain, cfg: &ExperimentConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    match domain {
        Domain::Box { lo, hi } => Ok((
            lo.iter().map(|v| if v.is_finite() { *v } else { cfg.sample_range.0 }).collect(),
            hi.iter().map(|v| if v.is_finite() { *v } else { cfg.sample_range.1 }).collect(),
        )),
        Domain::Points { .. } => Err(Error::InvalidParameter("point-list domain has no bounds".into())),
    }
}

fn sample(map: &MultivaluedMap, cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Vec<Point>> {
    if let Domain::Points { points } = map.domain() {
        return Ok(points.clone());
    }
    if !(cfg.sample_step > 0.0) {
        return Err(Error::InvalidParameter("sample_step must be positive".into()));
    }
    let (lo, hi) = bounds(map.domain(), cfg)?;
    let span = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max);
    let per_axis = (span / cfg.sample_step).round() as usize + 1;
    if per_axis.pow(lo.len() as u32) > 5_000_000 {
        return Err(Error::InvalidParameter("sample grid too large".into()));
    }
    let mut pts = Domain::Box { lo: lo.clone(), hi: hi.clone() }.grid(per_axis)?;
    for _ in 0..cfg.random_points {
        pts.push(random_point(&lo, &hi, rng)?);
    }
    Ok(pts)
}

fn random_point(lo: &[f64], hi: &[f64], rng: &mut ChaCha8Rng) -> Result<Point> {
    Point::new(lo.iter().zip(hi).map(|(l, h)| if h > l { rng.gen_range(*l..=*h) } else { *l }).collect())
}

fn envelope(cfg: &ExperimentConfig, result: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "result": result,
    })
}

fn verdict_code(holds: bool) -> i32 {
    if holds {
        0
    } else {
        1
    }
}

fn check_map(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let t = load_target(cfg)?;
    let c = controls(&t)?;
    let m = metric_for(&t.map);
    let report = match cfg.check {
        CheckKind::AbMapping => check_ab_mapping(&t.map, &c.alpha, &c.beta, m.as_ref(), &sample(&t.map, cfg, rng)?)?,
        CheckKind::AbContraction => {
            check_ab_contraction(&t.map, &c.alpha, &c.beta, m.as_ref(), &sample(&t.map, cfg, rng)?)?
        }
        CheckKind::Hausdorff => {
            let k = c
                .k
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("hausdorff check needs a k control".into()))?;
            let pairs = match t.map.domain() {
                Domain::Points { points } => (0..cfg.pairs)
                    .map(|_| {
                        let i = rng.gen_range(0..points.len());
                        let j = rng.gen_range(0..points.len());
                        (points[i].clone(), points[j].clone())
                    })
                    .collect::<Vec<_>>(),
                domain => {
                    let (lo, hi) = bounds(domain, cfg)?;
                    (0..cfg.pairs)
                        .map(|_| Ok((random_point(&lo, &hi, rng)?, random_point(&lo, &hi, rng)?)))
                        .collect::<Result<Vec<_>>>()?
                }
            };
            check_hausdorff_contraction(&t.map, k, m.as_ref(), &pairs)?
        }
    };
    let text = format!(
        "{} {:?}: {} ({} violations)\n",
        report.map,
        report.kind,
        if report.holds() { "holds_on_sample" } else { "violated" },
        report.violations
    );
    Ok(Outcome {
        code: verdict_code(report.holds()),
        report: envelope(cfg, serde_json::to_value(&report)?),
        text,
        csv: None,
    })
}

fn run_iterate(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let t = load_target(cfg)?;
    let c = controls(&t)?;
    let m = metric_for(&t.map);
    let mut starts = cfg.x0.clone();
    if cfg.starts > 0 {
        let (lo, hi) = match t.start_range {
            Some(r) => r,
            None => {
                let (lo, hi) = bounds(t.map.domain(), cfg)?;
                (lo[0], hi[0])
            }
        };
        starts.extend((0..cfg.starts).map(|_| rng.gen_range(lo..=hi)));
    }
    if starts.is_empty() {
        return Err(Error::InvalidParameter("no starting point: give x0 or starts".into()));
    }
    let (_, c_sup) = check_bounded(&c.alpha, &GridSpec::default())?;
    let mut traces = Vec::new();
    let mut all_converged = true;
    let mut text = String::new();
    let mut jsonl = String::new();
    for x0 in starts {
        let x0 = Point::new(vec![x0])?;
        let trace = iterate(&t.map, &x0, &c.alpha, &c.beta, m.as_ref(), cfg.stop)?;
        let case = classify_limit_case(&trace);
        let invariants = trace_invariants(&trace, c_sup);
        let fixed = verify_fixed_point(&t.map, &trace.final_point, m.as_ref(), cfg.stop.eps_fp)?;
        all_converged &= trace.converged() && fixed;
        text.push_str(&format!(
            "x0 = {:?}: {:?} after {} steps, x = {:?}, d_F = {:.3e}\n",
            trace.x0,
            trace.stop_reason,
            trace.len(),
            trace.final_point,
            trace.final_d_f
        ));
        jsonl.push_str(&trace_to_jsonl(&trace, case.as_ref().ok().copied())?);
        traces.push(json!({
            "x0": trace.x0,
            "steps": trace.len(),
            "stop_reason": trace.stop_reason,
            "final_point": trace.final_point,
            "final_d_F": trace.final_d_f,
            "delta_est": trace.delta_est,
            "nabla_est": trace.nabla_est,
            "case": case.as_ref().ok(),
            "case_error": case.as_ref().err().map(ToString::to_string),
            "invariants": invariants.verdict,
            "fixed_point": fixed,
        }));
    }
    if let Some(path) = &cfg.trace {
        write_file(path, &jsonl)?;
    }
    Ok(Outcome {
        code: verdict_code(all_converged),
        report: envelope(cfg, json!({ "map": t.map.label(), "C_sup_alpha": c_sup, "traces": traces })),
        text,
        csv: None,
    })
}

fn resolve_modes(cfg: &ExperimentConfig, t: &Target) -> Result<Vec<TheoremMode>> {
    let Some(name) = cfg.mode else {
        if t.modes.is_empty() {
            return Err(Error::InvalidParameter("no theorem mode declared; pass --mode".into()));
        }
        return Ok(t.modes.clone());
    };
    if let Some(m) = t.modes.iter().find(|m| m.name() == format!("{name:?}")) {
        if cfg.c.is_none() && cfg.p.is_none() {
            return Ok(vec![m.clone()]);
        }
    }
    let c = controls(t)?;
    let (alpha, beta) = (c.alpha.clone(), c.beta.clone());
    Ok(vec![match name {
        ModeName::T14 => TheoremMode::T14 {
            alpha,
            beta,
            gamma: c
                .gamma
                .clone()
                .ok_or_else(|| Error::InvalidParameter("T14 needs a gamma control".into()))?,
        },
        ModeName::T15 => TheoremMode::T15 { alpha, beta },
        ModeName::T16 => {
            let (cc, p) = cfg
                .c
                .zip(cfg.p)
                .ok_or_else(|| Error::InvalidParameter("T16 needs C and p".into()))?;
            TheoremMode::T16 {
                alpha,
                beta,
                c: cc,
                p,
                neighborhood: Interval::open_closed(0.0, cc.powf(-1.0 / p).min(1.0)),
            }
        }
    }])
}

fn verify_theorem(cfg: &ExperimentConfig) -> Result<Outcome> {
    let t = load_target(cfg)?;
    let modes = resolve_modes(cfg, &t)?;
    let grid = GridSpec::default();
    let mut reports = Vec::new();
    let mut all = true;
    let mut text = String::new();
    for mode in &modes {
        let r = validate_preconditions(mode, &grid)?;
        all &= r.holds();
        text.push_str(&format!("{} {}: {}\n", t.map.label(), r.mode, if r.holds() { "holds_on_sample" } else { "violated" }));
        for c in &r.checks {
            text.push_str(&format!("  {}: {:?}\n", c.hypothesis, c.verdict));
        }
        reports.push(serde_json::to_value(&r)?);
    }
    Ok(Outcome {
        code: verdict_code(all),
        report: envelope(cfg, json!({ "map": t.map.label(), "preconditions": reports })),
        text,
        csv: None,
    })
}

fn summability(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (c, p) = cfg
        .c
        .zip(cfg.p)
        .ok_or_else(|| Error::InvalidParameter("summability needs C and p".into()))?;
    let (report, seq) = bound_check(c, p, cfg.t0, cfg.n)?;
    let verdict = summability_verdict(&seq, Criterion::TailRatio)?;
    let rows = summability_rows(&seq, c, p);
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    let csv = String::from_utf8(csv).expect("csv output is utf-8");
    let text = format!(
        "bound_check: {} ({} terms), summability: {:?}\n",
        if report.holds() { "holds_on_sample" } else { "violated" },
        seq.len(),
        verdict.evidence
    );
    let csv = match &cfg.csv {
        Some(path) => {
            write_file(path, &csv)?;
            None
        }
        None => Some(csv),
    };
    Ok(Outcome {
        code: verdict_code(report.holds()),
        report: envelope(
            cfg,
            json!({
                "bound_check": report,
                "verdict": verdict,
                "terms": seq.len(),
                "truncated_at": seq.truncated_at,
                "partial_sum": seq.partial_sums.last(),
            }),
        ),
        text,
        csv,
    })
}

fn example_ciric(cfg: &ExperimentConfig) -> Result<Outcome> {
    let claims = [corpus::verify_claim_1()?, corpus::verify_claim_2()?, corpus::verify_claim_3()?];
    let mut text = String::new();
    for c in &claims {
        text.push_str(&c.to_text());
    }
    for c in &claims {
        text.push_str(&format!("{}: {}\n", c.claim, if c.holds() { "holds" } else { "violated" }));
    }
    let all = claims.iter().all(|c| c.holds());
    Ok(Outcome {
        code: verdict_code(all),
        report: envelope(cfg, serde_json::to_value(&claims)?),
        text,
        csv: None,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

/// Runs one experiment and writes its report to `cfg.output` when set.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let outcome = match cfg.command {
        Command::CheckMap => check_map(cfg, &mut rng)?,
        Command::Iterate => run_iterate(cfg, &mut rng)?,
        Command::VerifyTheorem => verify_theorem(cfg)?,
        Command::Summability => summability(cfg)?,
        Command::ExampleCiric => example_ciric(cfg)?,
    };
    if let Some(path) = &cfg.output {
        write_file(path, &(serde_json::to_string_pretty(&outcome.report)? + "\n"))?;
    }
    Ok(outcome)
}
