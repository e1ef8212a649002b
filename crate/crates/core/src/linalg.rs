//! Small dense solvers for regression and Hessian work. Dimensions here are
//! tiny (tens at most), so Gaussian elimination is plenty.

use crate::error::{Error, Result};

/// Solves A x = b by Gauss-Jordan with partial pivoting. A is row-major n x n.
pub(crate) fn solve(a: &[Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() < 1e-12 {
            return Err(Error::SingularMatrix);
        }
        m.swap(col, piv);
        let d = m[col][col];
        for j in col..=n {
            m[col][j] /= d;
        }
        for row in 0..n {
            if row != col && m[row][col] != 0.0 {
                let f = m[row][col];
                for j in col..=n {
                    m[row][j] -= f * m[col][j];
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n]).collect())
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
/// Returns None when the matrix is not positive-definite.
pub(crate) fn cholesky_inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // invert L, then A^-1 = L^-T L^-1
    let mut linv = vec![vec![0.0; n]; n];
    for i in 0..n {
        linv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            let mut s = 0.0;
            for k in j..i {
                s -= l[i][k] * linv[k][j];
            }
            linv[i][j] = s / l[i][i];
        }
    }
    let mut inv = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = 0.0;
            for k in i..n {
                s += linv[k][i] * linv[k][j];
            }
            inv[i][j] = s;
            inv[j][i] = s;
        }
    }
    Some(inv)
}

/// OLS of y on columns of x (observations in rows). Returns coefficients and
/// their standard errors.
pub(crate) fn ols(x: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = y.len();
    let k = x[0].len();
    if n <= k {
        return Err(Error::InsufficientData { got: n, need: k + 1 });
    }
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in 0..=i {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[j][i] = xtx[i][j];
        }
    }
    let beta = solve(&xtx, &xty)?;
    let mut rss = 0.0;
    for (row, &yi) in x.iter().zip(y) {
        let fit: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
        rss += (yi - fit) * (yi - fit);
    }
    let s2 = rss / (n - k) as f64;
    let inv = cholesky_inverse(&xtx).ok_or(Error::SingularMatrix)?;
    let se = (0..k).map(|i| (s2 * inv[i][i]).sqrt()).collect();
    Ok((beta, se))
}
