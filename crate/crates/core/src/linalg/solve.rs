//! Linear system solvers for the closed-form feature update.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::SymOp;

/// Dense LU with partial pivoting, solving A X = B for all columns of B.
pub fn lu_solve(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "lu_solve: A is {}x{}, B has {} rows",
            n,
            a.ncols(),
            b.nrows()
        )));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut pivot = col;
        let mut best = lu[[col, col]].abs();
        for r in (col + 1)..n {
            let v = lu[[r, col]].abs();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Err(Error::NumericalDegeneracy(format!(
                "singular system at column {col}"
            )));
        }
        if pivot != col {
            perm.swap(pivot, col);
            for c in 0..n {
                let tmp = lu[[col, c]];
                lu[[col, c]] = lu[[pivot, c]];
                lu[[pivot, c]] = tmp;
            }
            for c in 0..x.ncols() {
                let tmp = x[[col, c]];
                x[[col, c]] = x[[pivot, c]];
                x[[pivot, c]] = tmp;
            }
        }
        let inv = 1.0 / lu[[col, col]];
        for r in (col + 1)..n {
            let factor = lu[[r, col]] * inv;
            lu[[r, col]] = factor;
            if factor != 0.0 {
                for c in (col + 1)..n {
                    let delta = factor * lu[[col, c]];
                    lu[[r, c]] -= delta;
                }
                for c in 0..x.ncols() {
                    let delta = factor * x[[col, c]];
                    x[[r, c]] -= delta;
                }
            }
        }
    }
    // back substitution
    for c in 0..x.ncols() {
        for r in (0..n).rev() {
            let mut acc = x[[r, c]];
            for k in (r + 1)..n {
                acc -= lu[[r, k]] * x[[k, c]];
            }
            x[[r, c]] = acc / lu[[r, r]];
        }
    }
    Ok(x)
}

/// Conjugate gradient for a symmetric positive definite operator,
/// column by column. Converges to `tol` relative residual.
pub fn cg_solve<O: SymOp + ?Sized>(
    op: &O,
    b: &Array2<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Array2<f64>> {
    let n = op.dim();
    if b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "cg_solve: operator dim {n}, rhs has {} rows",
            b.nrows()
        )));
    }
    let mut x = Array2::zeros((n, b.ncols()));
    let mut ap = vec![0.0; n];
    for c in 0..b.ncols() {
        let bcol: Vec<f64> = (0..n).map(|r| b[[r, c]]).collect();
        let bnorm = norm(&bcol);
        if bnorm == 0.0 {
            continue;
        }
        let mut xc = vec![0.0; n];
        let mut r = bcol.clone();
        let mut p = r.clone();
        let mut rs = dot(&r, &r);
        for _ in 0..max_iter {
            op.apply(&p, &mut ap);
            let denom = dot(&p, &ap);
            if denom <= 0.0 {
                return Err(Error::NumericalDegeneracy(
                    "cg_solve: operator not positive definite".into(),
                ));
            }
            let alpha = rs / denom;
            for i in 0..n {
                xc[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rs_new = dot(&r, &r);
            let beta = rs_new / rs;
            rs = rs_new;
            if rs_new.sqrt() <= tol * bnorm {
                break;
            }
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        if rs.sqrt() > tol * bnorm * 10.0 {
            return Err(Error::EigenNoConvergence {
                iterations: max_iter,
                best_residual: rs.sqrt() / bnorm,
            });
        }
        for i in 0..n {
            x[[i, c]] = xc[i];
        }
    }
    Ok(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
