//! Canonical correlation between two blocks of variables.
//!
//! Both blocks are mean-centered, their covariance blocks get a small ridge on
//! the diagonal (constant bit columns are common), and the canonical
//! correlations are the singular values of the whitened cross-covariance
//! `Lx^-1 Sxy Ly^-T`, where `L` are Cholesky factors. Any whitening gives the
//! same singular values; Cholesky is the cheapest at a few hundred columns.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use super::LabError;

/// Ridge added to both covariance diagonals.
pub const RIDGE: f64 = 1e-8;

/// Extra rows required beyond the widest block.
pub const MIN_EXTRA_SAMPLES: usize = 10;

fn centered(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut column in out.column_iter_mut() {
        let mean = column.mean();
        column.add_scalar_mut(-mean);
    }
    out
}

fn validate(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<(), LabError> {
    if x.nrows() != y.nrows() {
        return Err(LabError::RowMismatch {
            x: x.nrows(),
            y: y.nrows(),
        });
    }
    if x.ncols() == 0 || y.ncols() == 0 {
        return Err(LabError::EmptyBlock);
    }
    let needed = x.ncols().max(y.ncols()) + MIN_EXTRA_SAMPLES;
    if x.nrows() <= needed {
        return Err(LabError::InsufficientSamples {
            samples: x.nrows(),
            needed: needed + 1,
        });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(LabError::NonFinite);
    }
    Ok(())
}

/// All canonical correlations, largest first, each clamped to `[0, 1]`.
pub fn canonical_correlations(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<Vec<f64>, LabError> {
    validate(x, y)?;
    let scale = 1.0 / (x.nrows() - 1) as f64;
    let xc = centered(x);
    let yc = centered(y);

    // An explicit transpose lets the product go through the blocked gemm
    // kernel, which is an order of magnitude faster than `tr_mul` here.
    let xt = xc.transpose();
    let yt = yc.transpose();
    let mut sxx = (&xt * &xc) * scale;
    let mut syy = (&yt * &yc) * scale;
    let sxy = (&xt * &yc) * scale;
    for i in 0..sxx.nrows() {
        sxx[(i, i)] += RIDGE;
    }
    for i in 0..syy.nrows() {
        syy[(i, i)] += RIDGE;
    }

    let lx = sxx.cholesky().ok_or(LabError::NotPositiveDefinite)?;
    let ly = syy.cholesky().ok_or(LabError::NotPositiveDefinite)?;
    // a = Lx^-1 Sxy, then whitened^T = Ly^-1 a^T.
    let a = lx
        .l()
        .solve_lower_triangular(&sxy)
        .ok_or(LabError::NotPositiveDefinite)?;
    let whitened_t = ly
        .l()
        .solve_lower_triangular(&a.transpose())
        .ok_or(LabError::NotPositiveDefinite)?;

    // Squared singular values from the smaller Gram matrix.
    let gram = if whitened_t.ncols() <= whitened_t.nrows() {
        whitened_t.tr_mul(&whitened_t)
    } else {
        &whitened_t * whitened_t.transpose()
    };
    let mut values: Vec<f64> = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .map(|&ev| libm::sqrt(ev.max(0.0)).min(1.0))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Largest canonical correlation between the columns of `x` and `y`.
pub fn cca_first_correlation(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<f64, LabError> {
    canonical_correlations(x, y).map(|values| values[0])
}
