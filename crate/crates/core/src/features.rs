//! Dense node feature matrices and their normalizations, plus the PCA
//! front-end that turns raw attributes into initial features.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormState {
    Raw,
    /// Every nonzero row has unit L2 norm.
    RowUnit,
    /// Every row is mean-centered then L2-normalized, so pairwise dot
    /// products lie in [−1, 1]. Zero-variance rows become zero rows.
    Pcc,
}

#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub data: Array2<f64>,
    pub norm_state: NormState,
}

impl FeatureMatrix {
    pub fn raw(data: Array2<f64>) -> Self {
        FeatureMatrix {
            data,
            norm_state: NormState::Raw,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }
}

/// L2-normalize each row; zero rows stay zero.
pub fn row_normalize(data: &Array2<f64>) -> Array2<f64> {
    let mut out = data.clone();
    for mut row in out.rows_mut() {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|v| v / norm);
        }
    }
    out
}

/// Mean-center then L2-normalize each row. Returns the normalized matrix
/// and the indices of zero-variance rows that were zeroed out (callers
/// surface these as warnings).
pub fn pcc_normalize(features: &FeatureMatrix) -> (FeatureMatrix, Vec<usize>) {
    let mut out = features.data.clone();
    let mut zeroed = Vec::new();
    let d = out.ncols() as f64;
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        let mean = row.iter().sum::<f64>() / d;
        row.mapv_inplace(|v| v - mean);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|v| v / norm);
        } else {
            row.fill(0.0);
            zeroed.push(i);
        }
    }
    (
        FeatureMatrix {
            data: out,
            norm_state: NormState::Pcc,
        },
        zeroed,
    )
}

/// Principal-component projection of raw attributes onto their top-d
/// directions. The attribute matrix is column-centered; the eigenproblem is
/// posed on whichever Gram matrix (N×N or D×D) is smaller. Component signs
/// are fixed so the largest-magnitude loading is positive.
pub fn reduce_attributes(attrs: &Array2<f64>, d: usize) -> Result<FeatureMatrix> {
    let n = attrs.nrows();
    let big_d = attrs.ncols();
    if d == 0 || d > n.min(big_d) {
        return Err(Error::Parameter(format!(
            "target dimension {d} out of range [1, min({n}, {big_d})]"
        )));
    }
    let mut centered = attrs.clone();
    for c in 0..big_d {
        let mean = centered.column(c).sum() / n as f64;
        centered.column_mut(c).mapv_inplace(|v| v - mean);
    }
    let scores = if big_d <= n {
        // covariance route: XᶜᵀXᶜ, project onto top-d eigenvectors
        let cov = centered.t().dot(&centered);
        let eig = sym_eigen(&cov)?;
        let mut components = Array2::zeros((big_d, d));
        for j in 0..d {
            let src = big_d - 1 - j; // ascending order → take from the top
            for r in 0..big_d {
                components[[r, j]] = eig.vectors[[r, src]];
            }
        }
        fix_column_signs(&mut components);
        centered.dot(&components)
    } else {
        // Gram route: XᶜXᶜᵀ, scores are scaled eigenvectors
        let gram = centered.dot(&centered.t());
        let eig = sym_eigen(&gram)?;
        let mut scores = Array2::zeros((n, d));
        for j in 0..d {
            let src = n - 1 - j;
            let scale = eig.values[src].max(0.0).sqrt();
            for r in 0..n {
                scores[[r, j]] = eig.vectors[[r, src]] * scale;
            }
        }
        fix_column_signs(&mut scores);
        scores
    };
    Ok(FeatureMatrix::raw(scores))
}

fn fix_column_signs(m: &mut Array2<f64>) {
    for j in 0..m.ncols() {
        let mut best = 0usize;
        let mut best_abs = 0.0;
        for r in 0..m.nrows() {
            let a = m[[r, j]].abs();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if m[[best, j]] < 0.0 {
            for r in 0..m.nrows() {
                m[[r, j]] = -m[[r, j]];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn pcc_hand_example() {
        let f = FeatureMatrix::raw(array![[1.0, 2.0, 3.0]]);
        let (out, zeroed) = pcc_normalize(&f);
        assert!(zeroed.is_empty());
        let want = 1.0 / 2f64.sqrt();
        assert!((out.data[[0, 0]] + want).abs() < 1e-12);
        assert!(out.data[[0, 1]].abs() < 1e-12);
        assert!((out.data[[0, 2]] - want).abs() < 1e-12);
    }

    #[test]
    fn pcc_idempotent() {
        let f = FeatureMatrix::raw(array![[0.3, -1.2, 4.0], [2.0, 2.0, -0.5]]);
        let (once, _) = pcc_normalize(&f);
        let (twice, _) = pcc_normalize(&once);
        for (a, b) in once.data.iter().zip(twice.data.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn pcc_zero_variance_row() {
        let f = FeatureMatrix::raw(array![[5.0, 5.0, 5.0], [1.0, 0.0, 0.0]]);
        let (out, zeroed) = pcc_normalize(&f);
        assert_eq!(zeroed, vec![0]);
        assert!(out.data.row(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn pcc_dot_products_bounded() {
        let mut rng = crate::rng::seeded(4);
        let mut data = Array2::zeros((10, 6));
        for v in data.iter_mut() {
            *v = crate::rng::gaussian(&mut rng);
        }
        let (out, _) = pcc_normalize(&FeatureMatrix::raw(data));
        for i in 0..10 {
            for j in 0..10 {
                let dot: f64 = out.data.row(i).dot(&out.data.row(j));
                assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&dot));
            }
        }
    }

    #[test]
    fn pca_full_rank_reconstruction() {
        // d = D: projection onto a complete basis loses nothing
        let mut rng = crate::rng::seeded(13);
        let mut attrs = Array2::zeros((9, 4));
        for v in attrs.iter_mut() {
            *v = crate::rng::gaussian(&mut rng);
        }
        let reduced = reduce_attributes(&attrs, 4).unwrap();
        // compare total variance of the scores to the centered input
        let mut centered = attrs.clone();
        for c in 0..4 {
            let mean = centered.column(c).sum() / 9.0;
            centered.column_mut(c).mapv_inplace(|v| v - mean);
        }
        let total_in: f64 = centered.iter().map(|v| v * v).sum();
        let total_out: f64 = reduced.data.iter().map(|v| v * v).sum();
        assert!((total_in - total_out).abs() < 1e-8 * total_in.max(1.0));
    }

    #[test]
    fn pca_rank_one_single_component() {
        let base = array![[1.0], [2.0], [3.0], [4.0]];
        let dirs = array![[0.5, -1.0, 2.0]];
        let attrs = base.dot(&dirs);
        let reduced = reduce_attributes(&attrs, 1).unwrap();
        let mut centered = attrs.clone();
        for c in 0..3 {
            let mean = centered.column(c).sum() / 4.0;
            centered.column_mut(c).mapv_inplace(|v| v - mean);
        }
        let total_in: f64 = centered.iter().map(|v| v * v).sum();
        let total_out: f64 = reduced.data.iter().map(|v| v * v).sum();
        assert!((total_in - total_out).abs() < 1e-9 * total_in);
    }

    #[test]
    fn pca_dimension_validation() {
        let attrs = Array2::zeros((5, 3));
        assert!(reduce_attributes(&attrs, 0).is_err());
        assert!(reduce_attributes(&attrs, 4).is_err());
    }

    #[test]
    fn pca_variances_non_increasing() {
        let mut rng = crate::rng::seeded(99);
        let mut attrs = Array2::zeros((20, 10));
        for v in attrs.iter_mut() {
            *v = crate::rng::gaussian(&mut rng);
        }
        let reduced = reduce_attributes(&attrs, 5).unwrap();
        let vars: Vec<f64> = (0..5)
            .map(|j| reduced.data.column(j).iter().map(|v| v * v).sum())
            .collect();
        for w in vars.windows(2) {
            assert!(w[0] >= w[1] - 1e-9);
        }
    }

    #[test]
    fn row_normalize_keeps_zero_rows() {
        let m = row_normalize(&array![[0.0, 0.0], [3.0, 4.0]]);
        assert_eq!(m[[0, 0]], 0.0);
        assert!((m[[1, 0]] - 0.6).abs() < 1e-12);
        assert!((m[[1, 1]] - 0.8).abs() < 1e-12);
    }
}
