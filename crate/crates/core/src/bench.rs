//! Accuracy and latency evaluation against a Monte Carlo reference.

use std::io::Write;

use serde::Serialize;

use crate::checker::{Checker, CheckerConfig, Scheme};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::scenario::Scenario;
use crate::sigma::SchemeTag;

/// Default Monte Carlo sample count for reference probabilities.
pub const DEFAULT_GT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundTruth {
    pub p: f64,
    /// Binomial standard error `sqrt(p (1 - p) / n)`.
    pub std_error: f64,
}

/// Monte Carlo reference for every ego pair of `scenario`, in pair order.
pub fn ground_truth(scenario: &Scenario, n: usize, seed: u64) -> Result<Vec<GroundTruth>> {
    ground_truth_with(scenario, n, seed, Execution::Sequential)
}

pub fn ground_truth_with(
    scenario: &Scenario,
    n: usize,
    seed: u64,
    execution: Execution,
) -> Result<Vec<GroundTruth>> {
    let cfg = CheckerConfig::default().with_scheme(Scheme::MonteCarlo { n, seed });
    let checker = Checker::new(cfg)?.with_execution(execution);
    scenario
        .ego_pairs()
        .into_iter()
        .map(|(i, j)| {
            let r = checker.check_agents(&scenario.agents[i], &scenario.agents[j])?;
            let p = r.p_collision_final;
            Ok(GroundTruth {
                p,
                std_error: (p * (1.0 - p) / n as f64).sqrt(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub scenario_id: String,
    /// Name of the non-ego agent.
    pub other: String,
    pub scheme: SchemeTag,
    pub sigma_max: f64,
    pub w_min: f64,
    pub d_max: f64,
    pub p_est: f64,
    pub p_gt: f64,
    pub abs_error: f64,
    pub runtime_s: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Percentiles {
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub p99: f64,
}

/// Nearest-rank percentile (`0 < q <= 100`) of an ascending slice.
pub fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty list");
    let rank = ((q / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl Percentiles {
    /// `None` for an empty list.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Self {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            median: nearest_rank(&v, 50.0),
            p95: nearest_rank(&v, 95.0),
            p99: nearest_rank(&v, 99.0),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub records: usize,
    pub runtime_s: Option<Percentiles>,
    /// Over records whose reference probability is nonzero.
    pub abs_error: Option<Percentiles>,
    pub zero_gt_excluded: usize,
}

impl Summary {
    pub fn of(records: &[EvalRecord]) -> Self {
        let runtimes: Vec<f64> = records.iter().map(|r| r.runtime_s).collect();
        let errors: Vec<f64> = records
            .iter()
            .filter(|r| r.p_gt > 0.0)
            .map(|r| r.abs_error)
            .collect();
        Self {
            records: records.len(),
            runtime_s: Percentiles::of(&runtimes),
            abs_error: Percentiles::of(&errors),
            zero_gt_excluded: records.len() - errors.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub records: Vec<EvalRecord>,
    /// Scenarios that could not be evaluated, with the reason.
    pub failures: Vec<(String, String)>,
    pub summary: Summary,
}

/// Reference probabilities for a batch of scenarios, computed on `execution`.
pub fn ground_truths(
    scenarios: &[Scenario],
    n: usize,
    seed: u64,
    execution: Execution,
) -> Vec<Result<Vec<GroundTruth>>> {
    execution.map(scenarios, |s| ground_truth(s, n, seed))
}

/// Runs `cfg` on every ego pair of every scenario and compares against a
/// Monte Carlo reference with `gt_n` samples.
pub fn evaluate(scenarios: &[Scenario], cfg: &CheckerConfig, gt_n: usize, seed: u64) -> Result<Evaluation> {
    if scenarios.is_empty() {
        return Err(Error::InvalidParams("no scenarios to evaluate".into()));
    }
    let gts = ground_truths(scenarios, gt_n, seed, Execution::best_available());
    evaluate_against(scenarios, &gts, cfg, 1)
}

/// Like [`evaluate`] with precomputed references. Each check is timed
/// `repetitions` times sequentially and the median time is kept.
pub fn evaluate_against(
    scenarios: &[Scenario],
    gts: &[Result<Vec<GroundTruth>>],
    cfg: &CheckerConfig,
    repetitions: usize,
) -> Result<Evaluation> {
    assert_eq!(scenarios.len(), gts.len());
    let checker = Checker::new(*cfg)?;
    let reps = repetitions.max(1);
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (s, gt) in scenarios.iter().zip(gts) {
        let gt = match gt {
            Ok(g) => g,
            Err(e) => {
                failures.push((s.id.clone(), e.to_string()));
                continue;
            }
        };
        for ((i, j), g) in s.ego_pairs().into_iter().zip(gt) {
            let (a, b) = (&s.agents[i], &s.agents[j]);
            let mut times = Vec::with_capacity(reps);
            let mut last = None;
            for _ in 0..reps {
                match checker.check_agents(a, b) {
                    Ok(r) => {
                        times.push(r.elapsed.as_secs_f64());
                        last = Some(r);
                    }
                    Err(e) => {
                        failures.push((s.id.clone(), e.to_string()));
                        break;
                    }
                }
            }
            let Some(r) = last.filter(|_| times.len() == reps) else {
                continue;
            };
            times.sort_by(f64::total_cmp);
            records.push(EvalRecord {
                scenario_id: s.id.clone(),
                other: b.name.clone(),
                scheme: cfg.scheme.tag(),
                sigma_max: cfg.sigma_max,
                w_min: cfg.w_min,
                d_max: cfg.d_max,
                p_est: r.p_collision_final,
                p_gt: g.p,
                abs_error: (r.p_collision_final - g.p).abs(),
                runtime_s: nearest_rank(&times, 50.0),
                samples: r.samples_evaluated,
            });
        }
    }
    let summary = Summary::of(&records);
    Ok(Evaluation {
        records,
        failures,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub sigma_max: Vec<f64>,
    pub w_min: Vec<f64>,
    pub d_max: Vec<f64>,
    pub repetitions: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            sigma_max: vec![2.5, 3.0, 3.4, 3.8, 4.2],
            w_min: vec![0.0, 0.001, 0.005, 0.01, 0.02],
            d_max: vec![0.5, 1.0, 1.625, 2.5],
            repetitions: 3,
        }
    }
}

impl GridSpec {
    pub fn cells(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for &s in &self.sigma_max {
            for &w in &self.w_min {
                for &d in &self.d_max {
                    out.push((s, w, d));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub sigma_max: f64,
    pub w_min: f64,
    pub d_max: f64,
    pub p95_runtime_s: f64,
    pub summary: Summary,
    /// Not dominated in both P95 runtime and median error by another cell.
    pub pareto: bool,
}

/// Flags the points not dominated by any other point, minimizing both
/// coordinates.
pub fn pareto_front(points: &[(f64, f64)]) -> Vec<bool> {
    points
        .iter()
        .map(|&(a, b)| {
            !points
                .iter()
                .any(|&(c, d)| c <= a && d <= b && (c < a || d < b))
        })
        .collect()
}

/// Evaluates every cell of `grid` with the adaptive scheme. References are
/// computed once. Rows are sorted by P95 runtime.
pub fn grid_search(
    scenarios: &[Scenario],
    grid: &GridSpec,
    base: &CheckerConfig,
    gt_n: usize,
    seed: u64,
) -> Result<Vec<GridRow>> {
    if grid.sigma_max.is_empty() || grid.w_min.is_empty() || grid.d_max.is_empty() {
        return Err(Error::InvalidParams("every grid axis needs at least one value".into()));
    }
    if scenarios.is_empty() {
        return Err(Error::InvalidParams("no scenarios to evaluate".into()));
    }
    let gts = ground_truths(scenarios, gt_n, seed, Execution::best_available());
    let mut rows = Vec::new();
    for (sigma_max, w_min, d_max) in grid.cells() {
        let cfg = CheckerConfig {
            sigma_max,
            w_min,
            d_max,
            scheme: Scheme::Adaptive,
            ..*base
        };
        let eval = evaluate_against(scenarios, &gts, &cfg, grid.repetitions)?;
        rows.push(GridRow {
            sigma_max,
            w_min,
            d_max,
            p95_runtime_s: eval.summary.runtime_s.map_or(f64::NAN, |p| p.p95),
            summary: eval.summary,
            pareto: false,
        });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let err = r.summary.abs_error.map_or(f64::INFINITY, |e| e.median);
            (r.p95_runtime_s, err)
        })
        .collect();
    for (row, on) in rows.iter_mut().zip(pareto_front(&points)) {
        row.pareto = on;
    }
    rows.sort_by(|a, b| a.p95_runtime_s.total_cmp(&b.p95_runtime_s));
    Ok(rows)
}

/// Final probability of the default adaptive checker next to the same
/// checker started at full depth, per ego pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseComparison {
    pub scenario_id: String,
    pub other: String,
    pub p_adaptive: f64,
    pub p_dense: f64,
    pub abs_diff: f64,
}

pub fn compare_dense(scenarios: &[Scenario], cfg: &CheckerConfig) -> Result<Vec<DenseComparison>> {
    let adaptive = Checker::new(CheckerConfig { scheme: Scheme::Adaptive, ..*cfg })?;
    let dense = adaptive.clone().with_initial_orders(cfg.p_max, cfg.p_max);
    let mut out = Vec::new();
    for s in scenarios {
        for (i, j) in s.ego_pairs() {
            let (a, b) = (&s.agents[i], &s.agents[j]);
            let pa = adaptive.check_agents(a, b)?.p_collision_final;
            let pd = dense.check_agents(a, b)?.p_collision_final;
            out.push(DenseComparison {
                scenario_id: s.id.clone(),
                other: b.name.clone(),
                p_adaptive: pa,
                p_dense: pd,
                abs_diff: (pa - pd).abs(),
            });
        }
    }
    Ok(out)
}

/// Columns: scenario_id, other, p_adaptive, p_dense, abs_diff.
pub fn write_dense_csv<W: Write>(out: W, rows: &[DenseComparison]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RecordRow<'a> {
    scenario_id: &'a str,
    scheme: &'static str,
    sigma_max: f64,
    w_min: f64,
    d_max: f64,
    p_est: f64,
    p_gt: f64,
    abs_error: f64,
    runtime_s: f64,
    samples: u64,
}

/// Columns: scenario_id, scheme, sigma_max, w_min, d_max, p_est, p_gt,
/// abs_error, runtime_s, samples.
pub fn write_records_csv<W: Write>(out: W, records: &[EvalRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(RecordRow {
            scenario_id: &r.scenario_id,
            scheme: r.scheme.as_str(),
            sigma_max: r.sigma_max,
            w_min: r.w_min,
            d_max: r.d_max,
            p_est: r.p_est,
            p_gt: r.p_gt,
            abs_error: r.abs_error,
            runtime_s: r.runtime_s,
            samples: r.samples,
        })?;
    }
    if records.is_empty() {
        w.write_record([
            "scenario_id", "scheme", "sigma_max", "w_min", "d_max", "p_est", "p_gt", "abs_error",
            "runtime_s", "samples",
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per statistic (mean, median, p95, p99) with runtime and error
/// columns; error cells are empty when every reference was zero.
pub fn write_summary_csv<W: Write>(out: W, summary: &Summary) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["statistic", "runtime_s", "abs_error"])?;
    let pick = |p: Option<Percentiles>, f: fn(&Percentiles) -> f64| {
        p.map(|p| f(&p).to_string()).unwrap_or_default()
    };
    type Stat = (&'static str, fn(&Percentiles) -> f64);
    let stats: [Stat; 4] = [
        ("mean", |p| p.mean),
        ("median", |p| p.median),
        ("p95", |p| p.p95),
        ("p99", |p| p.p99),
    ];
    for (name, f) in stats {
        w.write_record([name.to_string(), pick(summary.runtime_s, f), pick(summary.abs_error, f)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct GridCsvRow {
    sigma_max: f64,
    w_min: f64,
    d_max: f64,
    p95_runtime_s: f64,
    median_runtime_s: Option<f64>,
    mean_error: Option<f64>,
    median_error: Option<f64>,
    p95_error: Option<f64>,
    records: usize,
    pareto: bool,
}

pub fn write_grid_csv<W: Write>(out: W, rows: &[GridRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(GridCsvRow {
            sigma_max: r.sigma_max,
            w_min: r.w_min,
            d_max: r.d_max,
            p95_runtime_s: r.p95_runtime_s,
            median_runtime_s: r.summary.runtime_s.map(|p| p.median),
            mean_error: r.summary.abs_error.map(|p| p.mean),
            median_error: r.summary.abs_error.map(|p| p.median),
            p95_error: r.summary.abs_error.map(|p| p.p95),
            records: r.summary.records,
            pareto: r.pareto,
        })?;
    }
    w.flush()?;
    Ok(())
}
