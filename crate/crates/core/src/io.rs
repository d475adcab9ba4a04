//! File formats: JSON matrices, Hamiltonian path documents and CSV
//! trajectory dumps.
//!
//! A matrix document is `{"rows": r, "cols": c, "re": [...], "im": [...]}`
//! with row-major real and imaginary parts. `serde_json` writes the
//! shortest decimal that round-trips, so re-reading a written matrix gives
//! bit-identical values.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{HamiltonianPath, LiftedTrajectory};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat};
use crate::operator::{DensityOperator, Tolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixFile { rows, cols, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let len = self.rows * self.cols;
        if self.re.len() != len || self.im.len() != len {
            return Err(Error::Format(format!(
                "{}x{} matrix needs {len} re and im entries, got {} and {}",
                self.rows,
                self.cols,
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            c(self.re[k], self.im[k])
        }))
    }
}

/// Either a single matrix (constant Hamiltonian) or a piecewise-constant
/// path `{"breakpoints": [...], "hamiltonians": [matrix, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianFile {
    Constant(MatrixFile),
    Piecewise {
        breakpoints: Vec<f64>,
        hamiltonians: Vec<MatrixFile>,
    },
}

impl HamiltonianFile {
    pub fn from_path(h: &HamiltonianPath) -> Self {
        match h {
            HamiltonianPath::Constant(m) => HamiltonianFile::Constant(MatrixFile::from_matrix(m)),
            HamiltonianPath::PiecewiseConstant {
                breakpoints,
                hamiltonians,
            } => HamiltonianFile::Piecewise {
                breakpoints: breakpoints.clone(),
                hamiltonians: hamiltonians.iter().map(MatrixFile::from_matrix).collect(),
            },
        }
    }

    pub fn to_path(&self, tol: &Tolerances) -> Result<HamiltonianPath> {
        match self {
            HamiltonianFile::Constant(m) => HamiltonianPath::constant(&m.to_matrix()?, tol),
            HamiltonianFile::Piecewise {
                breakpoints,
                hamiltonians,
            } => {
                let hams = hamiltonians
                    .iter()
                    .map(MatrixFile::to_matrix)
                    .collect::<Result<Vec<_>>>()?;
                HamiltonianPath::piecewise(breakpoints.clone(), &hams, tol)
            }
        }
    }
}

pub fn matrix_to_json(m: &CMat) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_matrix(m)).expect("matrix serializes")
}

pub fn matrix_from_json(s: &str) -> Result<CMat> {
    serde_json::from_str::<MatrixFile>(s)?.to_matrix()
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CMat> {
    let text = std::fs::read_to_string(path)?;
    matrix_from_json(&text)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &CMat) -> Result<()> {
    std::fs::write(path, matrix_to_json(m) + "\n")?;
    Ok(())
}

pub fn read_hamiltonian(path: impl AsRef<Path>, tol: &Tolerances) -> Result<HamiltonianPath> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str::<HamiltonianFile>(&text)?.to_path(tol)
}

pub fn write_hamiltonian(path: impl AsRef<Path>, h: &HamiltonianPath) -> Result<()> {
    let text = serde_json::to_string_pretty(&HamiltonianFile::from_path(h))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_density(path: impl AsRef<Path>, tol: &Tolerances) -> Result<DensityOperator> {
    crate::operator::validate_density(&read_matrix(path)?, tol)
}

/// Fixed 17-significant-digit formatting used in CSV output.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_matrix_header(header: &mut Vec<String>, name: &str, rows: usize, cols: usize) {
    for i in 0..rows {
        for j in 0..cols {
            header.push(format!("{name}_{i}_{j}_re"));
            header.push(format!("{name}_{i}_{j}_im"));
        }
    }
}

fn push_matrix_row(row: &mut String, m: &CMat) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let _ = write!(row, ",{},{}", fmt_f64(m[(i, j)].re), fmt_f64(m[(i, j)].im));
        }
    }
}

/// Trajectory dump: `t`, then `ρ(t)` entries (re/im interleaved, row-major),
/// then optionally `V(t)` entries, then optionally the horizontality
/// residual of the interval starting at `t` (empty on the last row).
pub fn trajectory_csv(
    traj: &LiftedTrajectory,
    include_gauge: bool,
    residuals: Option<&[f64]>,
) -> String {
    let n = traj.raw_points()[0].nrows();
    let k = traj.spectrum().rank();
    let mut header = vec!["t".to_string()];
    push_matrix_header(&mut header, "rho", n, n);
    if include_gauge {
        push_matrix_header(&mut header, "V", k, k);
    }
    if residuals.is_some() {
        header.push("residual".to_string());
    }
    let mut out = header.join(",");
    out.push('\n');
    let densities = traj.densities();
    for (i, t) in traj.grid().times().iter().enumerate() {
        let mut row = fmt_f64(*t);
        push_matrix_row(&mut row, densities[i].matrix());
        if include_gauge {
            push_matrix_row(&mut row, traj.gauge_factor(i));
        }
        if let Some(r) = residuals {
            row.push(',');
            if let Some(v) = r.get(i) {
                row.push_str(&fmt_f64(*v));
            }
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}
