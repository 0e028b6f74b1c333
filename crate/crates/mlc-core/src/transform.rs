//! Per-frame SVD projection of the residual block for energy compaction,
//! wrapped in an integer correction stage that makes the transform exactly
//! invertible: the stream carries the rounded projected coefficients plus
//! the integer error of projecting them back.

use half::f16;
use nalgebra::DMatrix;

use crate::block::round_half_away;
use crate::error::{Error, Result};
use crate::predictor::ResidualBlock;
use crate::solver::quantize_value;

/// Quantized right singular vectors of a frame's residual matrix: a C x C
/// matrix of binary16 values, row-major. Orthonormal up to quantization.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix {
    dim: usize,
    entries: Vec<f16>,
}

impl ProjectionMatrix {
    /// Quantizes a row-major C x C matrix of doubles.
    pub fn from_rows(dim: usize, entries: &[f64]) -> Result<ProjectionMatrix> {
        if entries.len() != dim * dim {
            return Err(Error::shape(format!(
                "projection matrix needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(ProjectionMatrix {
            dim,
            entries: entries.iter().map(|&v| quantize_value(v)).collect(),
        })
    }

    pub(crate) fn from_raw(dim: usize, entries: Vec<f16>) -> Result<ProjectionMatrix> {
        if entries.len() != dim * dim {
            return Err(Error::stream("projection matrix size mismatch"));
        }
        if entries.iter().any(|h| !h.is_finite()) {
            return Err(Error::stream("non-finite projection matrix entry"));
        }
        Ok(ProjectionMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f16] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f16 {
        self.entries[row * self.dim + col]
    }

    /// Exact binary16 -> double expansion, row-major.
    pub fn dequantized(&self) -> Vec<f64> {
        self.entries.iter().map(|&h| f64::from(h)).collect()
    }
}

/// Fits the projection to a residual block: right singular vectors of the
/// N x C residual matrix, columns in descending singular-value order, each
/// column's largest-magnitude entry made positive (ties: lowest row index),
/// then quantized. Frames shorter than C are zero-padded for the
/// factorization; that changes nothing about the row space.
pub fn fit_projection(residuals: &ResidualBlock) -> Result<ProjectionMatrix> {
    let c = residuals.channels();
    if c < 2 {
        return Err(Error::config(
            "projection needs at least two channels; code the frame direct",
        ));
    }
    if residuals.is_empty() {
        return Err(Error::Empty("projection of an empty residual block"));
    }
    let rows = residuals.len().max(c);
    let m = DMatrix::from_fn(rows, c, |t, ch| {
        if t < residuals.len() {
            f64::from(residuals.get(ch, t))
        } else {
            0.0
        }
    });
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("v requested");
    // Q[i][j] = V[i][j] = v_t[j][i], sign-fixed per column.
    let mut q = vec![0.0f64; c * c];
    for j in 0..c {
        let mut pivot = 0;
        for i in 1..c {
            if v_t[(j, i)].abs() > v_t[(j, pivot)].abs() {
                pivot = i;
            }
        }
        let flip = v_t[(j, pivot)] < 0.0;
        for i in 0..c {
            let v = v_t[(j, i)];
            q[i * c + j] = if flip { -v } else { v };
        }
    }
    ProjectionMatrix::from_rows(c, &q)
}

/// One entry of the back-projection `round(T(t) * Q^T)`: shared verbatim by
/// the forward correction stage and the inverse, so the two always agree.
#[inline]
fn back_project_entry(t_row: &[f64], q: &[f64], dim: usize, i: usize) -> i32 {
    let mut acc = 0.0f64;
    for j in 0..dim {
        acc += t_row[j] * q[i * dim + j];
    }
    round_half_away(acc)
}

fn check_dims(residuals: &ResidualBlock, q: &ProjectionMatrix) -> Result<()> {
    if residuals.channels() != q.dim() {
        return Err(Error::shape(format!(
            "residual block has {} channels, projection is {}x{}",
            residuals.channels(),
            q.dim(),
            q.dim()
        )));
    }
    Ok(())
}

/// Projects residuals: per time step, `T(t) = round(e(t) * Q)` and the
/// integer correction `Corr(t) = e(t) - round(T(t) * Q^T)`. Both outputs
/// together losslessly represent `e` for any finite `Q`.
pub fn forward_project(
    residuals: &ResidualBlock,
    q: &ProjectionMatrix,
) -> Result<(ResidualBlock, ResidualBlock)> {
    check_dims(residuals, q)?;
    let c = q.dim();
    let n = residuals.len();
    let qd = q.dequantized();
    let mut transformed = ResidualBlock::new(c, n);
    let mut correction = ResidualBlock::new(c, n);
    let mut e_row = vec![0.0f64; c];
    let mut t_row = vec![0.0f64; c];
    for t in 0..n {
        for i in 0..c {
            e_row[i] = f64::from(residuals.get(i, t));
        }
        for j in 0..c {
            let mut acc = 0.0f64;
            for i in 0..c {
                acc += e_row[i] * qd[i * c + j];
            }
            let tj = round_half_away(acc);
            transformed.set(j, t, tj);
            t_row[j] = f64::from(tj);
        }
        for i in 0..c {
            let back = back_project_entry(&t_row, &qd, c, i);
            correction.set(i, t, residuals.get(i, t).wrapping_sub(back));
        }
    }
    Ok((transformed, correction))
}

/// Exact inverse of [`forward_project`]:
/// `e(t) = round(T(t) * Q^T) + Corr(t)`.
pub fn inverse_project(
    transformed: &ResidualBlock,
    correction: &ResidualBlock,
    q: &ProjectionMatrix,
) -> Result<ResidualBlock> {
    check_dims(transformed, q)?;
    check_dims(correction, q)?;
    if transformed.len() != correction.len() {
        return Err(Error::shape(format!(
            "transformed length {} != correction length {}",
            transformed.len(),
            correction.len()
        )));
    }
    let c = q.dim();
    let n = transformed.len();
    let qd = q.dequantized();
    let mut out = ResidualBlock::new(c, n);
    let mut t_row = vec![0.0f64; c];
    for t in 0..n {
        for j in 0..c {
            t_row[j] = f64::from(transformed.get(j, t));
        }
        for i in 0..c {
            let back = back_project_entry(&t_row, &qd, c, i);
            out.set(i, t, back.wrapping_add(correction.get(i, t)));
        }
    }
    Ok(out)
}
