//! Crossover tables for the two diagonal test families.

use std::io::Write;

use anyhow::{bail, Result};
use specmom_core::matrix::make_diag_indefinite;
use specmom_core::rates::{m_cr_approx, m_cr_solve};
use specmom_core::{make_diag_descending, Error, SpectrumGaps};

use crate::output::real;

pub const EXAMPLE1_SIZES: [usize; 8] = [128, 256, 512, 1024, 2048, 4096, 8192, 16384];
pub const EXAMPLE2_SIZES: [usize; 5] = [128, 256, 512, 1024, 2048];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    /// `diag(n, ..., 1)`
    Descending,
    /// `diag(n, ..., -n/2)`
    Indefinite,
}

impl Example {
    pub fn from_number(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Example::Descending),
            2 => Ok(Example::Indefinite),
            _ => bail!("example must be 1 or 2, got {k}"),
        }
    }

    pub fn default_sizes(self) -> &'static [usize] {
        match self {
            Example::Descending => &EXAMPLE1_SIZES,
            Example::Indefinite => &EXAMPLE2_SIZES,
        }
    }

    pub fn gaps(self, n: usize) -> Result<SpectrumGaps> {
        let a = match self {
            Example::Descending => make_diag_descending(n)?,
            Example::Indefinite => make_diag_indefinite(n)?,
        };
        let diag = a.diagonal().expect("generators are diagonal");
        Ok(SpectrumGaps::from_eigenvalues(&diag)?)
    }
}

/// Chebyshev degree used on the momentum side of the crossover equation.
pub fn cheb_degree(n: usize) -> usize {
    if n <= 4096 {
        199
    } else {
        349
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub n: usize,
    pub eps: f64,
    pub eps_l: f64,
    /// `None` when the gaps admit no finite crossover.
    pub m_cr_approx: Option<usize>,
    pub m_cr_solved: Option<usize>,
}

pub fn table_rows(example: Example, sizes: &[usize]) -> Result<Vec<TableRow>> {
    sizes
        .iter()
        .map(|&n| {
            let g = example.gaps(n)?;
            Ok(TableRow {
                n,
                eps: g.eps,
                eps_l: g.eps_l,
                m_cr_approx: no_crossover_as_none(m_cr_approx(g.eps, g.eps_l))?,
                m_cr_solved: no_crossover_as_none(m_cr_solve(g.eps, g.eps_l, cheb_degree(n)))?,
            })
        })
        .collect()
}

fn no_crossover_as_none(r: specmom_core::Result<usize>) -> Result<Option<usize>> {
    match r {
        Ok(m) => Ok(Some(m)),
        Err(Error::NoCrossover(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// `n,eps,m_cr_approx,m_cr_solved`; `none` marks a missing crossover.
pub fn write_table<W: Write>(rows: &[TableRow], mut w: W) -> Result<()> {
    let cell = |m: Option<usize>| m.map_or_else(|| "none".to_string(), |m| m.to_string());
    writeln!(w, "n,eps,m_cr_approx,m_cr_solved")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.n, real(r.eps), cell(r.m_cr_approx), cell(r.m_cr_solved))?;
    }
    w.flush()?;
    Ok(())
}
