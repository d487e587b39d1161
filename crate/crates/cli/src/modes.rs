//! Per-mode decay slopes for several methods on one diagonal operator.

use std::io::Write;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use specmom_core::analysis::{modal_decay_run, ModalDecayReport};
use specmom_core::solvers::SolveOutcome;
use specmom_core::{Method, SolverConfig, SparseMatrix};

use crate::output::real;
use crate::run::DEFAULT_M;

/// `NAME` or `NAME:M`, e.g. `lanczos:16`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodChoice {
    pub method: Method,
    pub m: Option<usize>,
    pub beta: Option<f64>,
}

impl MethodChoice {
    pub fn label(&self) -> String {
        match (self.method.uses_m(), self.method.uses_beta()) {
            (true, _) => format!("{}-{}", self.method, self.m.unwrap_or(DEFAULT_M)),
            (_, true) => format!("{}-{}", self.method, self.beta.unwrap_or(0.0)),
            _ => self.method.to_string(),
        }
    }
}

impl FromStr for MethodChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let method: Method = name.parse()?;
        let mut choice = MethodChoice { method, m: None, beta: None };
        match param {
            None if method.uses_beta() => bail!("{name} needs a beta, e.g. {name}:261632.25"),
            None => {}
            Some(p) if method.uses_m() => {
                choice.m = Some(p.parse().map_err(|e| anyhow!("bad m in {s:?}: {e}"))?)
            }
            Some(p) if method.uses_beta() => {
                choice.beta = Some(crate::run::parse_real(p).map_err(|e| anyhow!("bad beta in {s:?}: {e}"))?)
            }
            Some(_) => bail!("{name} takes no parameter"),
        }
        Ok(choice)
    }
}

/// 0-based index of the largest-magnitude diagonal entry.
pub fn dominant_index(a: &SparseMatrix) -> Option<usize> {
    let d = a.diagonal()?;
    d.iter()
        .enumerate()
        .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .map(|(j, _)| j)
}

pub struct ModesRun {
    pub label: String,
    pub report: ModalDecayReport,
    pub outcome: SolveOutcome,
}

pub fn run_modes(
    a: &SparseMatrix,
    v0: &[f64],
    choices: &[MethodChoice],
    base: &SolverConfig,
    burn_in: usize,
) -> Result<Vec<ModesRun>> {
    if !a.is_diagonal() {
        bail!("modal decay needs a diagonal matrix");
    }
    choices
        .iter()
        .map(|c| {
            let cfg = SolverConfig {
                m: c.m.unwrap_or(DEFAULT_M),
                beta: c.beta.unwrap_or(0.0),
                ..base.clone()
            };
            let (report, outcome) = modal_decay_run(a, v0, c.method, &cfg, burn_in)?;
            Ok(ModesRun { label: c.label(), report, outcome })
        })
        .collect()
}

/// `lambda_ratio,slope_<label>,...`, one row per subdominant mode.
pub fn write_slopes<W: Write>(runs: &[ModesRun], mut w: W) -> Result<()> {
    let Some(first) = runs.first() else {
        bail!("no methods given");
    };
    write!(w, "lambda_ratio")?;
    for r in runs {
        write!(w, ",slope_{}", r.label)?;
    }
    writeln!(w)?;
    for (j, ratio) in first.report.eigenvalue_ratio.iter().enumerate() {
        write!(w, "{}", real(*ratio))?;
        for r in runs {
            write!(w, ",{}", real(r.report.slope[j]))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// `method,matvec,mode,value` with `value = |x_j| / |x_dom|` for the
/// requested 1-based mode indices; `dom` is the 0-based dominant index.
pub fn write_traces<W: Write>(runs: &[ModesRun], modes: &[usize], dom: usize, mut w: W) -> Result<()> {
    writeln!(w, "method,matvec,mode,value")?;
    for r in runs {
        for snap in &r.outcome.modes {
            let c = &snap.coefficients;
            let d = c.get(dom).copied().unwrap_or(f64::NAN);
            for &j in modes {
                if j == 0 || j > c.len() {
                    bail!("mode {j} outside 1..={}", c.len());
                }
                writeln!(w, "{},{},{},{}", r.label, snap.matvecs, j, real(c[j - 1] / d))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use specmom_core::make_diag_descending;

    #[test]
    fn parse_choices() {
        let c: MethodChoice = "lanczos:16".parse().unwrap();
        assert_eq!((c.method, c.m), (Method::Lanczos, Some(16)));
        assert_eq!(c.label(), "lanczos-16");
        assert!("power:3".parse::<MethodChoice>().is_err());
        assert!("momentum-static".parse::<MethodChoice>().is_err());
        let c: MethodChoice = "momentum-static:1/4".parse().unwrap();
        assert_eq!(c.beta, Some(0.25));
    }

    #[test]
    fn slopes_csv_has_one_row_per_subdominant_mode() {
        let a = make_diag_descending(6).unwrap();
        let cfg = SolverConfig { max_matvecs: 40, ..Default::default() };
        let choices = ["power".parse().unwrap(), "lanczos:3".parse().unwrap()];
        let runs = run_modes(&a, &[1.0; 6], &choices, &cfg, 0).unwrap();
        let mut buf = Vec::new();
        write_slopes(&runs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert_eq!(text.lines().next().unwrap(), "lambda_ratio,slope_power,slope_lanczos-3");
    }
}
