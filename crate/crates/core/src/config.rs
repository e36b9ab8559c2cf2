//! `key = value` run configuration.
//!
//! Blank lines and everything after `#` are ignored. Keys are
//! case-sensitive:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `omega1`, `omega2` | atomic transition frequencies | resonant with the rotated modes, shifted by `delta` |
//! | `Omega1`, `Omega2` | bare mode frequencies | 10, 12 |
//! | `lambda12` | mode–mode converter coupling | 0.5 |
//! | `lambda` | atom–field coupling of both atoms | 1 |
//! | `chi` | Kerr strength in units of `lambda` | 0 |
//! | `delta` | detuning in units of `lambda` (instead of `omega1`/`omega2`) | 0 |
//! | `beta` | atomic superposition angle, in `[0, π]` | 0 |
//! | `alpha1_sq`, `alpha2_sq` | mean photon numbers of the coherent fields | 10 |
//! | `n_max` | Fock truncation per mode | 40 |
//! | `tail_tol` | allowed coherent-state mass beyond `n_max` | 1e-8 |
//! | `tau_start`, `tau_end`, `tau_steps` | scaled-time grid `τ = λt` | 0, 30, 600 |
//! | `sweep` | scenarios `chi:delta, chi:delta, …` (units of `lambda`) | `0:0, 0:5, 0.4:0, 0.4:5` |
//! | `initial_state` | `product` or `ansatz` | `product` |
//!
//! The sweep default is a choice of this tool: two Kerr strengths and two
//! detunings that show the qualitative effect of each.

use std::collections::HashMap;
use std::path::PathBuf;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::state::StateConvention;

/// Scenario grid used by `sweep` when the configuration does not set one.
pub const DEFAULT_SWEEP: [(f64, f64); 4] = [(0.0, 0.0), (0.0, 5.0), (0.4, 0.0), (0.4, 5.0)];

const KEYS: [&str; 18] = [
    "omega1", "omega2", "Omega1", "Omega2", "lambda12", "lambda", "chi", "delta", "beta", "alpha1_sq", "alpha2_sq", "n_max", "tail_tol",
    "tau_start", "tau_end", "tau_steps", "sweep", "initial_state",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub tau_start: f64,
    pub tau_end: f64,
    /// Number of intervals; the grid has `tau_steps + 1` points.
    pub tau_steps: usize,
    /// `(χ/λ, Δ/λ)` pairs.
    pub sweep: Option<Vec<(f64, f64)>>,
    pub convention: StateConvention,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn lambda(&self) -> f64 {
        self.params.atom_coupling[0]
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        let span = self.tau_end - self.tau_start;
        (0..=self.tau_steps).map(|k| self.tau_start + span * k as f64 / self.tau_steps as f64).collect()
    }

    /// Scenarios to run in a sweep.
    pub fn scenarios(&self) -> Vec<(f64, f64)> {
        self.sweep.clone().unwrap_or_else(|| DEFAULT_SWEEP.to_vec())
    }

    /// Parameters of one sweep scenario: Kerr strength `chi·λ` and both
    /// atoms detuned by `delta·λ`.
    pub fn scenario_params(&self, chi: f64, delta: f64) -> ModelParams {
        let lambda = self.lambda();
        ModelParams { kerr: chi * lambda, ..self.params.clone() }.with_detuning(delta * lambda)
    }
}

/// Label of a scenario in CSV output, e.g. `0.4/5`.
pub fn scenario_label(chi: f64, delta: f64) -> String {
    format!("{chi}/{delta}")
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    let x: f64 = v.parse().map_err(|_| Error::config(line, format!("{key}: cannot parse '{v}' as a number")))?;
    if !x.is_finite() {
        return Err(Error::config(line, format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_sweep(line: usize, v: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (c, d) = item
            .split_once(':')
            .ok_or_else(|| Error::config(line, format!("sweep: expected chi:delta, got '{item}'")))?;
        out.push((parse_f64(line, "sweep", c.trim())?, parse_f64(line, "sweep", d.trim())?));
    }
    if out.is_empty() {
        return Err(Error::config(line, "sweep: the scenario list is empty"));
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut seen: HashMap<&str, (usize, &str)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| Error::config(line, format!("expected key=value, got '{content}'")))?;
        let (k, v) = (k.trim(), v.trim());
        let key = KEYS.iter().find(|&&known| known == k).ok_or_else(|| Error::config(line, format!("unknown key '{k}'")))?;
        if let Some((first, _)) = seen.insert(key, (line, v)) {
            return Err(Error::config(line, format!("duplicate key '{k}' (first set on line {first})")));
        }
    }

    let num = |key: &str, default: f64| -> Result<(f64, usize)> {
        match seen.get(key) {
            Some(&(line, v)) => Ok((parse_f64(line, key, v)?, line)),
            None => Ok((default, 0)),
        }
    };
    let positive = |key: &str, default: f64| -> Result<f64> {
        let (x, line) = num(key, default)?;
        if x <= 0.0 {
            return Err(Error::config(line, format!("{key} = {x} must be positive")));
        }
        Ok(x)
    };
    let non_negative = |key: &str, default: f64| -> Result<f64> {
        let (x, line) = num(key, default)?;
        if x < 0.0 {
            return Err(Error::config(line, format!("{key} = {x} must not be negative")));
        }
        Ok(x)
    };
    let count = |key: &str, default: usize, min: usize| -> Result<usize> {
        match seen.get(key) {
            Some(&(line, v)) => {
                let n: usize = v.parse().map_err(|_| Error::config(line, format!("{key}: cannot parse '{v}' as a count")))?;
                if n < min {
                    return Err(Error::config(line, format!("{key} = {n} must be at least {min}")));
                }
                Ok(n)
            }
            None => Ok(default),
        }
    };

    let lambda = positive("lambda", 1.0)?;
    let (chi, _) = num("chi", 0.0)?;
    let (beta, beta_line) = num("beta", 0.0)?;
    if !(0.0..=std::f64::consts::PI).contains(&beta) {
        return Err(Error::config(beta_line, format!("beta = {beta} is outside [0, pi]")));
    }
    let alpha = [non_negative("alpha1_sq", 10.0)?.sqrt(), non_negative("alpha2_sq", 10.0)?.sqrt()];
    let n_max = count("n_max", 40, 1)?;
    let tail_tol = positive("tail_tol", 1e-8)?;
    let (mode1, _) = num("Omega1", 10.0)?;
    let (mode2, _) = num("Omega2", 12.0)?;
    let (mode_coupling, _) = num("lambda12", 0.5)?;

    let mut params = ModelParams {
        atom_freq: [0.0; 2],
        mode_freq: [mode1, mode2],
        mode_coupling,
        atom_coupling: [lambda; 2],
        kerr: chi * lambda,
        beta,
        alpha: alpha.map(|a| C64::new(a, 0.0)),
        n_max,
        tail_tol,
    };
    let (delta, delta_line) = num("delta", 0.0)?;
    let split = params.frame().mode_splitting();
    for (j, key) in ["omega1", "omega2"].iter().enumerate() {
        params.atom_freq[j] = match seen.get(key) {
            Some(&(line, v)) => {
                if delta_line != 0 {
                    return Err(Error::config(line.max(delta_line), format!("{key} and delta cannot both be set")));
                }
                parse_f64(line, key, v)?
            }
            None => split + delta * lambda,
        };
    }

    let tau_start = non_negative("tau_start", 0.0)?;
    let start_line = seen.get("tau_start").map_or(0, |e| e.0);
    let (tau_end, end_line) = num("tau_end", 30.0)?;
    if !(tau_end > tau_start) {
        return Err(Error::config(end_line.max(start_line), format!("tau_end = {tau_end} must exceed tau_start = {tau_start}")));
    }
    let tau_steps = count("tau_steps", 600, 2)?;
    let sweep = seen.get("sweep").map(|&(line, v)| parse_sweep(line, v)).transpose()?;
    let convention = match seen.get("initial_state") {
        Some(&(line, v)) => v.parse().map_err(|e: String| Error::config(line, e))?,
        None => StateConvention::Product,
    };

    params.validate().map_err(|e| Error::config(0, e.to_string()))?;
    Ok(RunConfig { params, tau_start, tau_end, tau_steps, sweep, convention, output_path: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(e: Error) -> usize {
        match e {
            Error::Config { line, .. } => line,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c.params.atom_coupling, [1.0, 1.0]);
        assert_eq!(c.params.beta, 0.0);
        assert!((c.params.alpha[0].norm_sqr() - 10.0).abs() < 1e-12);
        assert_eq!(c.params.n_max, 40);
        assert_eq!(c.params.tail_tol, 1e-8);
        assert_eq!((c.tau_start, c.tau_end, c.tau_steps), (0.0, 30.0, 600));
        assert_eq!(c.tau_grid().len(), 601);
        assert_eq!(c.convention, StateConvention::Product);
        assert!(c.sweep.is_none());
        assert_eq!(c.scenarios(), DEFAULT_SWEEP.to_vec());
        let d = c.params.frame().detuning;
        assert!(d[0].abs() < 1e-12 && d[1].abs() < 1e-12);
        assert_eq!(c.params, ModelParams::default());
    }

    #[test]
    fn beta_out_of_range() {
        assert_eq!(line_of(parse_config("# comment\nbeta=4.0").unwrap_err()), 2);
    }

    #[test]
    fn chi_and_tau_end() {
        let c = parse_config("chi=0.4\ntau_end=30").unwrap();
        assert_eq!(c.params.kerr, 0.4);
        assert_eq!(c.tau_end, 30.0);
        assert_eq!(c.params.n_max, 40);
    }

    #[test]
    fn ratios_scale_with_lambda() {
        let c = parse_config("lambda = 2\nchi = 0.4\ndelta = 5  # detuned").unwrap();
        assert_eq!(c.params.kerr, 0.8);
        assert!((c.params.frame().detuning[0] - 10.0).abs() < 1e-12);
        let p = c.scenario_params(0.1, -1.0);
        assert!((p.kerr - 0.2).abs() < 1e-15);
        assert!((p.frame().detuning[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_frequencies() {
        let c = parse_config("Omega1=5\nOmega2=3\nlambda12=1\nomega1=2\nomega2=2.5").unwrap();
        let f = c.params.frame();
        assert!((f.detuning[0] - (2.0 - f.mode_splitting())).abs() < 1e-12);
        assert!(parse_config("omega1=2\ndelta=1").is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(line_of(parse_config("chi=0.1\nfoo=1").unwrap_err()), 2);
        assert_eq!(line_of(parse_config("\n\nchi=abc").unwrap_err()), 3);
        assert_eq!(line_of(parse_config("chi=1\nchi=2").unwrap_err()), 2);
        assert_eq!(line_of(parse_config("n_max=0").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("tau_steps=1").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("tau_start=5\ntau_end=4").unwrap_err()), 2);
        assert_eq!(line_of(parse_config("lambda=-1").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("no equals sign").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("sweep=").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("initial_state=mixed").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("Chi=1").unwrap_err()), 1);
    }

    #[test]
    fn sweep_and_convention() {
        let c = parse_config("sweep = 0:0, 0.4:5\ninitial_state = ansatz").unwrap();
        assert_eq!(c.sweep, Some(vec![(0.0, 0.0), (0.4, 5.0)]));
        assert_eq!(c.convention, StateConvention::Ansatz);
        assert_eq!(scenario_label(0.4, 5.0), "0.4/5");
    }
}
