//! CSV and JSON writers. Reals are printed with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use specmom_core::solvers::SolveOutcome;

pub fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// `matvec,residual,nu`, one row per residual check.
pub fn write_history<W: Write>(out: &SolveOutcome, mut w: W) -> Result<()> {
    writeln!(w, "matvec,residual,nu")?;
    for p in &out.residuals {
        writeln!(w, "{},{},{}", p.matvecs, real(p.residual), real(p.nu))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub method: &'a str,
    pub matrix: String,
    pub n: usize,
    pub status: &'a str,
    pub matvecs_used: usize,
    pub nu1: f64,
    pub nu2: Option<f64>,
    pub final_residual: Option<f64>,
    pub best_residual: f64,
    pub residual_mode: &'a str,
    pub tol: f64,
    pub matvec_accounting: &'a str,
    pub warnings: &'a [String],
}

pub const ACCOUNTING: &str =
    "every product with A counts once; the restart residual product A*x1 is reused as the first product of the next stage";

pub fn write_json<W: Write, T: Serialize>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
