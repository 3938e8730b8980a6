//! Batch execution and CSV / JSON emission.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mtqite_core::mtqite::{run_mtqite_observed, run_qite_baseline_observed, Algorithm, RunRecord};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::setup::{prepare, Derived, Setup};
use crate::ExperimentError;

/// Displayed infidelities never go below this floor.
pub const INFIDELITY_FLOOR: f64 = 1e-16;

pub const CSV_HEADER: [&str; 13] = [
    "run_id",
    "algorithm",
    "model",
    "step",
    "dts",
    "energy",
    "exact_energy",
    "infidelity",
    "rotations",
    "linear_paulis",
    "scan_paulis",
    "scan_paulis_unkeyed",
    "wall_time_s",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub run_id: usize,
    pub algorithm: Algorithm,
    pub model: String,
    pub step: usize,
    pub dts: Vec<f64>,
    pub energy: f64,
    pub exact_energy: f64,
    pub infidelity: f64,
    pub rotations: usize,
    pub linear_paulis: usize,
    pub scan_paulis: usize,
    pub scan_paulis_unkeyed: usize,
    pub wall_time_s: f64,
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl ResultRow {
    pub fn fields(&self) -> Vec<String> {
        vec![
            self.run_id.to_string(),
            self.algorithm.name().to_string(),
            self.model.clone(),
            self.step.to_string(),
            self.dts.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(";"),
            fmt_f64(self.energy),
            fmt_f64(self.exact_energy),
            fmt_f64(self.infidelity),
            self.rotations.to_string(),
            self.linear_paulis.to_string(),
            self.scan_paulis.to_string(),
            self.scan_paulis_unkeyed.to_string(),
            format!("{:.6}", self.wall_time_s),
        ]
    }
}

/// One algorithm run on one initial state.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub run_id: usize,
    pub record: RunRecord,
    /// Seconds elapsed when each step finished (step 0 is 0).
    pub wall_times: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    /// Smallest value in the batch.
    pub best: f64,
}

impl Stats {
    /// Population statistics, accumulated in input order.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
            best: values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub runs: usize,
    pub steps: usize,
    pub final_infidelity: Stats,
    pub final_energy: Stats,
    pub final_energy_error: Stats,
    pub rotations: Stats,
    pub linear_paulis: Stats,
    pub scan_paulis: Stats,
    pub scan_paulis_unkeyed: Stats,
    /// Baseline QITE: the step size of each reported run.
    pub best_dt: Vec<Option<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InvariantReport {
    /// MT-QITE steps whose energy rose by more than 1e-12 (only checked when
    /// the grid contains 0).
    pub monotonicity_violations: usize,
    /// MT-QITE steps whose selected energy exceeded the equal-dt minimum.
    pub diagonal_violations: usize,
    pub max_sector_deviation: Option<f64>,
    pub max_transport_deviation: Option<f64>,
    pub transported_steps: usize,
    pub excluded_grid_points: usize,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.monotonicity_violations == 0 && self.diagonal_violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub model: String,
    pub seed: u64,
    pub derived: Derived,
    pub mtqite: Option<AlgorithmSummary>,
    pub qite: Option<AlgorithmSummary>,
    pub invariants: InvariantReport,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub outcomes: Vec<RunOutcome>,
    pub summary: Summary,
}

impl ExperimentOutput {
    pub fn outcomes_for(&self, algorithm: Algorithm) -> impl Iterator<Item = &RunOutcome> + '_ {
        self.outcomes.iter().filter(move |o| o.record.algorithm == algorithm)
    }
}

/// Tolerance of the per-step energy monotonicity check.
pub const MONOTONICITY_TOL: f64 = 1e-12;

fn rows_for(outcome: &RunOutcome, model: &str, offset: f64, exact: f64) -> Vec<ResultRow> {
    outcome
        .record
        .steps
        .iter()
        .zip(&outcome.wall_times)
        .map(|(s, &t)| ResultRow {
            run_id: outcome.run_id,
            algorithm: outcome.record.algorithm,
            model: model.to_string(),
            step: s.step,
            dts: s.dts.clone(),
            energy: s.energy + offset,
            exact_energy: exact,
            infidelity: s.infidelity.map_or(f64::NAN, |f| f.max(INFIDELITY_FLOOR)),
            rotations: s.rotations,
            linear_paulis: s.linear_ledger,
            scan_paulis: s.scan_ledger,
            scan_paulis_unkeyed: s.scan_ledger_unkeyed,
            wall_time_s: t,
        })
        .collect()
}

/// Batch statistics over the final row of every run of `algorithm`.
pub fn summarize(rows: &[ResultRow], algorithm: Algorithm, best_dt: Vec<Option<f64>>) -> Option<AlgorithmSummary> {
    let mut finals: Vec<&ResultRow> = Vec::new();
    for r in rows.iter().filter(|r| r.algorithm == algorithm) {
        match finals.last_mut() {
            Some(last) if last.run_id == r.run_id => {
                if r.step > last.step {
                    *last = r;
                }
            }
            _ => finals.push(r),
        }
    }
    if finals.is_empty() {
        return None;
    }
    let col = |f: &dyn Fn(&ResultRow) -> f64| Stats::of(&finals.iter().map(|r| f(r)).collect::<Vec<_>>());
    Some(AlgorithmSummary {
        runs: finals.len(),
        steps: finals[0].step,
        final_infidelity: col(&|r| r.infidelity),
        final_energy: col(&|r| r.energy),
        final_energy_error: col(&|r| (r.energy - r.exact_energy).abs()),
        rotations: col(&|r| r.rotations as f64),
        linear_paulis: col(&|r| r.linear_paulis as f64),
        scan_paulis: col(&|r| r.scan_paulis as f64),
        scan_paulis_unkeyed: col(&|r| r.scan_paulis_unkeyed as f64),
        best_dt,
    })
}

fn invariants(setup: &Setup, outcomes: &[RunOutcome]) -> InvariantReport {
    let mut rep = InvariantReport::default();
    let fold = |acc: Option<f64>, v: Option<f64>| match (acc, v) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    for o in outcomes {
        let steps = &o.record.steps;
        for s in steps {
            rep.max_sector_deviation = fold(rep.max_sector_deviation, s.sector_deviation);
        }
        if o.record.algorithm != Algorithm::MtQite {
            continue;
        }
        for w in steps.windows(2) {
            if setup.grid.includes_zero() && w[1].energy > w[0].energy + MONOTONICITY_TOL {
                rep.monotonicity_violations += 1;
            }
        }
        for s in &steps[1..] {
            if let Some(d) = s.diagonal_energy {
                if s.energy > d + MONOTONICITY_TOL {
                    rep.diagonal_violations += 1;
                }
            }
            rep.max_transport_deviation = fold(rep.max_transport_deviation, s.transport_deviation);
            rep.transported_steps += s.transported.len();
            rep.excluded_grid_points += s.excluded.len();
        }
    }
    rep
}

fn timed<F>(f: F) -> Result<(RunRecord, Vec<f64>), ExperimentError>
where
    F: FnOnce(&mut dyn FnMut(usize)) -> mtqite_core::Result<RunRecord>,
{
    let start = Instant::now();
    let mut times = Vec::new();
    let record = f(&mut |_| times.push(start.elapsed().as_secs_f64()))?;
    Ok((record, times))
}

pub fn run_setup(cfg: &ExperimentConfig, setup: &Setup) -> Result<ExperimentOutput, ExperimentError> {
    let algo = cfg.algorithm;
    let results: Vec<Result<Vec<RunOutcome>, ExperimentError>> = setup
        .states
        .par_iter()
        .enumerate()
        .map(|(i, state)| {
            let mut out = Vec::new();
            if algo.runs_mtqite() {
                let (record, wall_times) = timed(|obs| {
                    run_mtqite_observed(&setup.problem, state, &setup.grid, cfg.trotter_steps, &setup.options, obs)
                })?;
                out.push(RunOutcome {
                    run_id: i,
                    record,
                    wall_times,
                });
            }
            if algo.runs_qite() {
                let (record, wall_times) = timed(|obs| {
                    run_qite_baseline_observed(&setup.problem, state, &setup.grid, cfg.qite_steps(), &setup.options, obs)
                })?;
                out.push(RunOutcome {
                    run_id: i,
                    record,
                    wall_times,
                });
            }
            Ok(out)
        })
        .collect();
    let mut outcomes = Vec::new();
    let mut failure = None;
    for r in results {
        match r {
            Ok(o) => outcomes.extend(o),
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }
    outcomes.sort_by_key(|o| (o.record.algorithm == Algorithm::Qite, o.run_id));
    let model = setup.model.tag.clone();
    let exact = setup.model.exact_energy();
    let offset = setup.model.energy_offset;
    let rows: Vec<ResultRow> = outcomes.iter().flat_map(|o| rows_for(o, &model, offset, exact)).collect();
    let best_dts = outcomes
        .iter()
        .filter(|o| o.record.algorithm == Algorithm::Qite)
        .map(|o| o.record.best_dt)
        .collect();
    let summary = Summary {
        name: cfg.name.clone(),
        model,
        seed: cfg.seed,
        derived: Derived::from_setup(setup),
        mtqite: summarize(&rows, Algorithm::MtQite, Vec::new()),
        qite: summarize(&rows, Algorithm::Qite, best_dts),
        invariants: invariants(setup, &outcomes),
    };
    let output = ExperimentOutput {
        rows,
        outcomes,
        summary,
    };
    match failure {
        None => Ok(output),
        Some(e) => Err(ExperimentError::Partial {
            output: Box::new(output),
            source: Box::new(e),
        }),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    let setup = prepare(cfg)?;
    run_setup(cfg, &setup)
}

/// RFC 4180 CSV with a fixed header; `extra` columns are prepended to every row.
pub fn write_csv(
    path: &Path,
    rows: &[ResultRow],
    extra_header: &[&str],
    extra: &dyn Fn(&ResultRow) -> Vec<String>,
) -> Result<(), ExperimentError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let header: Vec<&str> = extra_header.iter().copied().chain(CSV_HEADER).collect();
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut fields = extra(r);
        fields.extend(r.fields());
        w.write_record(&fields).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> ExperimentError {
    ExperimentError::Io(std::io::Error::other(e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ExperimentError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| ExperimentError::Io(e.into()))?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn write_outputs(cfg: &ExperimentConfig, out: &ExperimentOutput) -> Result<(PathBuf, PathBuf), ExperimentError> {
    let (csv_path, json_path) = (cfg.csv_path(), cfg.json_path());
    write_csv(&csv_path, &out.rows, &[], &|_| Vec::new())?;
    write_json(&json_path, &out.summary)?;
    Ok((csv_path, json_path))
}
