//! Householder QR, used to draw uniformly distributed orthogonal matrices.

use ndarray::Array2;

/// Q factor of a square matrix with the sign convention diag(R) > 0.
/// QR of a standard Gaussian matrix under this convention is Haar-uniform
/// over the orthogonal group.
pub fn qr_orthogonal(w: &Array2<f64>) -> Array2<f64> {
    let n = w.nrows();
    assert_eq!(n, w.ncols(), "qr_orthogonal expects a square matrix");
    let mut r: Array2<f64> = w.clone();
    let mut q: Array2<f64> = Array2::eye(n);
    let mut v = vec![0.0; n];
    for k in 0..n {
        let mut norm_sq = 0.0;
        for i in k..n {
            norm_sq += r[[i, k]] * r[[i, k]];
        }
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[[k, k]] >= 0.0 { -norm } else { norm };
        for i in 0..k {
            v[i] = 0.0;
        }
        v[k] = r[[k, k]] - alpha;
        for i in (k + 1)..n {
            v[i] = r[[i, k]];
        }
        let vtv: f64 = v[k..].iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            continue;
        }
        // r ← (I − 2vvᵀ/vᵀv) r ; q ← q (I − 2vvᵀ/vᵀv)
        for c in k..n {
            let mut dot = 0.0;
            for i in k..n {
                dot += v[i] * r[[i, c]];
            }
            let scale = 2.0 * dot / vtv;
            for i in k..n {
                let delta = scale * v[i];
                r[[i, c]] -= delta;
            }
        }
        for row in 0..n {
            let mut dot = 0.0;
            for i in k..n {
                dot += q[[row, i]] * v[i];
            }
            let scale = 2.0 * dot / vtv;
            for i in k..n {
                let delta = scale * v[i];
                q[[row, i]] -= delta;
            }
        }
    }
    // sign-fix so diag(R) ≥ 0
    for k in 0..n {
        if r[[k, k]] < 0.0 {
            for row in 0..n {
                q[[row, k]] = -q[[row, k]];
            }
        }
    }
    q
}
