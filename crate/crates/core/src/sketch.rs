//! CountSketch compression of normalized incidence matrices.
//!
//! Ẽ = Ê·Rᵀ where R ∈ {−1, 0, +1}^{m×M} has one nonzero per column: row
//! h(col) with a Rademacher sign s(col). ‖HᵀẼ‖²_F then estimates
//! ‖HᵀÊ‖²_F, i.e. the Dirichlet-energy trace, at cost independent of M.

use ndarray::Array2;

use crate::error::Result;
use crate::graph::RelationViews;
use crate::rng;
use crate::sparse::CsrMatrix;

/// Per-relation sketched incidence matrices plus the precomputed
/// squared Frobenius norms of the normalized adjacencies.
#[derive(Debug, Clone)]
pub struct SketchPack {
    pub sketched: Vec<CsrMatrix>,
    pub fro_sq: Vec<f64>,
}

impl SketchPack {
    /// Sketch every relation. `dims` carries one target dimension per
    /// relation (callers expand a scalar m beforehand).
    pub fn build(views: &[RelationViews], dims: &[usize], seed: u64) -> Result<SketchPack> {
        assert_eq!(views.len(), dims.len());
        let sketched = views
            .iter()
            .zip(dims)
            .enumerate()
            .map(|(r, (v, &m))| count_sketch(&v.incidence, m, seed, r))
            .collect::<Result<_>>()?;
        Ok(SketchPack {
            sketched,
            fro_sq: views.iter().map(|v| v.fro_sq).collect(),
        })
    }
}

/// Sketch with the default hash/sign streams: bucket and sign of column c
/// are derived from (seed, relation index, c) through a splitmix-style mix,
/// so results are identical across platforms.
pub fn count_sketch(
    incidence: &CsrMatrix,
    m: usize,
    seed: u64,
    relation_idx: usize,
) -> Result<CsrMatrix> {
    count_sketch_with(incidence, m, |col| {
        let bucket = rng::derive_seed(seed, 0xc5 ^ relation_idx as u64, col as u64) % m as u64;
        let sign_bit = rng::derive_seed(seed, 0x51f7 ^ relation_idx as u64, col as u64) & 1;
        (bucket as usize, if sign_bit == 1 { 1.0 } else { -1.0 })
    })
}

/// Sketch with an explicit column → (bucket, sign) map. Test hook: the
/// identity map with sign +1 makes the sketch a column permutation.
pub fn count_sketch_with(
    incidence: &CsrMatrix,
    m: usize,
    map: impl Fn(usize) -> (usize, f64),
) -> Result<CsrMatrix> {
    let n = incidence.nrows();
    let cols = incidence.ncols();
    let assignment: Vec<(usize, f64)> = (0..cols).map(&map).collect();
    let mut triplets = Vec::with_capacity(2 * cols);
    for row in 0..n {
        for (col, value) in incidence.row(row) {
            let (bucket, sign) = assignment[col];
            triplets.push((row, bucket, sign * value));
        }
    }
    CsrMatrix::from_triplets(n, m, triplets)
}

/// ‖HᵀẼ‖²_F, the sketched estimate of trace(Hᵀ(I − Â)H).
pub fn sketched_trace(h: &Array2<f64>, sketched: &CsrMatrix) -> f64 {
    let g = sketched.transpose_mul_dense(h);
    g.iter().map(|v| v * v).sum()
}
