//! Drivers behind the command-line tool: time series of the measures,
//! oracle validation, scenario sweeps and a per-block debug dump.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::amplitudes::{characteristic_coefficients, AnalyticSolver, BlockSolution, FieldBlock};
use crate::config::{scenario_label, RunConfig};
use crate::error::Result;
use crate::linalg::ZERO;
use crate::measures::{measure, MeasureSample};
use crate::model::ModelParams;
use crate::oracle::{integrate, max_deviation, BlockDynamics, INITIAL_STEP};
use crate::state::{Evolution, StateConvention};

/// Largest block label checked by [`run_validate`].
pub const VALIDATION_MAX_BLOCK: i64 = 25;
/// Deviation above which validation fails.
pub const VALIDATION_TOL: f64 = 1e-6;

pub const SERIES_HEADER: &str = "tau,entropy,concurrence,negativity,norm_error";

/// Thread pool capped by the `CAVITY_THREADS` environment variable.
pub fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var("CAVITY_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

/// Measures at every scaled time `taus` (with `t = τ/λ`).
pub fn simulate_params(params: &ModelParams, convention: StateConvention, taus: &[f64]) -> Result<Vec<MeasureSample>> {
    let evolution = Evolution::new(params, convention)?;
    let lambda = params.atom_coupling[0];
    taus.par_iter().map(|&tau| measure(&evolution.assemble(tau / lambda), tau)).collect()
}

pub fn run_simulate(cfg: &RunConfig) -> Result<Vec<MeasureSample>> {
    simulate_params(&cfg.params, cfg.convention, &cfg.tau_grid())
}

fn write_row<W: Write>(w: &mut W, prefix: &str, s: &MeasureSample) -> std::io::Result<()> {
    writeln!(w, "{prefix}{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.tau, s.entropy, s.concurrence, s.negativity, s.norm_error)
}

pub fn write_series<W: Write>(mut w: W, samples: &[MeasureSample]) -> std::io::Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for s in samples {
        write_row(&mut w, "", s)?;
    }
    Ok(())
}

/// Outcome of comparing one block with the integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockReport {
    pub n1: i64,
    pub n2: i64,
    pub max_deviation: f64,
    pub norm_drift: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub blocks: Vec<BlockReport>,
    pub max_deviation: f64,
    /// Largest relative gap between linear-solve and closed-form weights.
    pub closed_form_max_discrepancy: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= VALIDATION_TOL
    }

    pub fn summary(&self) -> String {
        format!("max_deviation={:e} blocks={}", self.max_deviation, self.blocks.len())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "block_n1,block_n2,max_deviation,norm_drift")?;
        for b in &self.blocks {
            writeln!(w, "{},{},{:.16e},{:.16e}", b.n1, b.n2, b.max_deviation, b.norm_drift)?;
        }
        Ok(())
    }
}

/// Hook that alters a block solution before it is compared; used to check
/// that validation catches corrupted closed forms.
pub type Tamper = dyn Fn(&mut BlockSolution) + Sync;

/// Compares every block with labels in `[−2, max_block]` (skipping empty
/// border blocks) against the integrator on the time grid `times`, which
/// must start at 0. Each block starts from `(cos β/2, 0, 0, sin β/2)`
/// restricted to the kets that exist in it.
pub fn validate_blocks(params: &ModelParams, times: &[f64], max_block: i64, tamper: Option<&Tamper>) -> Result<ValidationReport> {
    let solver = AnalyticSolver::new(params)?;
    let labels: Vec<(i64, i64)> = (-2..=max_block).flat_map(|a| (-2..=max_block).map(move |b| (a, b))).collect();
    let h0 = INITIAL_STEP / params.atom_coupling[0];
    let (s, c) = (0.5 * params.beta).sin_cos();
    let results: Vec<Option<(BlockReport, f64)>> = labels
        .par_iter()
        .map(|&(n1, n2)| -> Result<Option<(BlockReport, f64)>> {
            let mut block = solver.field_block(n1, n2)?;
            if block == FieldBlock::Empty {
                return Ok(None);
            }
            let mut discrepancy = 0.0;
            if let FieldBlock::Regular(sol) = &mut block {
                if let Some(f) = tamper {
                    f(sol);
                }
                discrepancy = sol.closed_form_discrepancy;
            }
            let dynamics = BlockDynamics::new(params, n1, n2);
            let exists = dynamics.exists();
            let a0 = if exists[0] { C64::new(c, 0.0) } else { ZERO };
            let d0 = if exists[3] { C64::new(s, 0.0) } else { ZERO };
            let traj = integrate(&dynamics, [a0, ZERO, ZERO, d0], times, h0).map_err(|e| e.in_block(n1, n2))?;
            let expected: Vec<_> = times.iter().map(|&t| block.amplitudes_from(t, a0, d0)).collect();
            let dev = max_deviation(&expected, &traj).map_err(|e| e.in_block(n1, n2))?;
            let report = BlockReport { n1, n2, max_deviation: dev, norm_drift: traj.norm_drift() };
            Ok(Some((report, discrepancy)))
        })
        .collect::<Result<_>>()?;
    let mut blocks = Vec::new();
    let mut worst = 0.0f64;
    let mut discrepancy = 0.0f64;
    for (r, d) in results.into_iter().flatten() {
        // NaN deviations must fail validation rather than vanish in max().
        worst = if r.max_deviation.is_nan() { f64::INFINITY } else { worst.max(r.max_deviation) };
        discrepancy = discrepancy.max(d);
        blocks.push(r);
    }
    Ok(ValidationReport { blocks, max_deviation: worst, closed_form_max_discrepancy: discrepancy })
}

/// Physical times `[0, τ₀/λ, …]` for the configured grid, with 0 prepended
/// when the grid starts later.
pub fn validation_times(cfg: &RunConfig) -> Vec<f64> {
    let lambda = cfg.lambda();
    let mut times: Vec<f64> = cfg.tau_grid().iter().map(|tau| tau / lambda).collect();
    if times[0] > 0.0 {
        times.insert(0, 0.0);
    }
    times
}

pub fn run_validate(cfg: &RunConfig, tamper: Option<&Tamper>) -> Result<ValidationReport> {
    validate_blocks(&cfg.params, &validation_times(cfg), VALIDATION_MAX_BLOCK, tamper)
}

/// One time series per scenario, in scenario order.
pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<(String, Vec<MeasureSample>)>> {
    let taus = cfg.tau_grid();
    cfg.scenarios()
        .iter()
        .map(|&(chi, delta)| {
            let params = cfg.scenario_params(chi, delta);
            Ok((scenario_label(chi, delta), simulate_params(&params, cfg.convention, &taus)?))
        })
        .collect()
}

pub fn write_sweep<W: Write>(mut w: W, series: &[(String, Vec<MeasureSample>)]) -> std::io::Result<()> {
    writeln!(w, "scenario,{SERIES_HEADER}")?;
    for (label, samples) in series {
        for s in samples {
            write_row(&mut w, &format!("{label},"), s)?;
        }
    }
    Ok(())
}

/// Window statistics of one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub max_entropy: f64,
    pub mean_entropy: f64,
    pub max_concurrence: f64,
    pub max_negativity: f64,
}

pub fn summarize(series: &[(String, Vec<MeasureSample>)]) -> Vec<ScenarioSummary> {
    series
        .iter()
        .map(|(label, s)| ScenarioSummary {
            scenario: label.clone(),
            max_entropy: s.iter().map(|x| x.entropy).fold(f64::NEG_INFINITY, f64::max),
            mean_entropy: s.iter().map(|x| x.entropy).sum::<f64>() / s.len() as f64,
            max_concurrence: s.iter().map(|x| x.concurrence).fold(f64::NEG_INFINITY, f64::max),
            max_negativity: s.iter().map(|x| x.negativity).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect()
}

pub fn write_summary<W: Write>(mut w: W, rows: &[ScenarioSummary]) -> std::io::Result<()> {
    writeln!(w, "scenario,max_entropy,mean_entropy,max_concurrence,max_negativity")?;
    for r in rows {
        writeln!(w, "{},{:.16e},{:.16e},{:.16e},{:.16e}", r.scenario, r.max_entropy, r.mean_entropy, r.max_concurrence, r.max_negativity)?;
    }
    Ok(())
}

/// `key=value` dump of everything that defines block `(n₁, n₂)`.
pub fn roots_report(params: &ModelParams, n1: usize, n2: usize) -> Result<String> {
    let sol = AnalyticSolver::new(params)?.block(n1, n2)?;
    let c = sol.coeffs;
    let x = characteristic_coefficients(&c, sol.delta);
    let mut out = String::new();
    let mut line = |k: &str, v: f64| writeln!(out, "{k}={v:.16e}").expect("string write");
    line("f1", c.f1);
    line("f2", c.f2);
    for (k, v) in c.v.iter().enumerate() {
        line(&format!("V{}", k + 1), *v);
    }
    line("delta", sol.delta);
    line("x1", x.x1);
    line("x2", x.x2);
    line("x3", x.x3);
    for (k, mu) in sol.roots.roots.iter().enumerate() {
        line(&format!("mu{}", k + 1), *mu);
    }
    for (k, b) in sol.weights.iter().enumerate() {
        line(&format!("b{}", k + 1), *b);
    }
    line("closed_form_discrepancy", sol.closed_form_discrepancy);
    Ok(format!("n1={n1}\nn2={n2}\n{out}"))
}

/// Rejects validation reports above [`VALIDATION_TOL`] with an error that
/// maps to exit status 4 in the command-line tool.
pub fn check_report(report: &ValidationReport) -> std::result::Result<(), String> {
    if report.passed() {
        Ok(())
    } else {
        Err(format!("validation failed: {} exceeds {VALIDATION_TOL:e}", report.summary()))
    }
}
