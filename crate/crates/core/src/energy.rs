//! Dirichlet-energy functionals and spectral-mixing diagnostics.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::RelationViews;
use crate::linalg::sym_eigen;
use crate::sparse::CsrMatrix;
use crate::stage1::RelationWeights;

/// Default ceiling for the dense full-spectrum path of [`ome`].
pub const OME_DENSE_CAP: usize = 4096;

/// Dirichlet energy of H over one relation, summing each undirected edge
/// once: Σ_{(i,j)∈E} ‖Hᵢ/√dᵢ − Hⱼ/√dⱼ‖². Computed as ‖HᵀÊ‖²_F through the
/// normalized incidence columns, which is the same sum edge by edge.
pub fn dirichlet_energy(h: &Array2<f64>, views: &RelationViews) -> Result<f64> {
    let n = views.norm_adj.nrows();
    if h.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "feature matrix has {} rows, graph has {n} nodes",
            h.nrows()
        )));
    }
    // (ÊᵀH) is M×d; its squared Frobenius norm accumulates one term per edge.
    let g = views.incidence.transpose_mul_dense(h);
    Ok(g.iter().map(|v| v * v).sum())
}

/// Trace form of the same quantity: trace(Hᵀ(I − Â)H) with the identity
/// block restricted to nodes of positive degree (ÊÊᵀ = I_supp − Â; isolated
/// nodes contribute no energy). Kept as a separate route for identity
/// checks; agrees with [`dirichlet_energy`] to rounding.
pub fn dirichlet_energy_trace(h: &Array2<f64>, views: &RelationViews) -> Result<f64> {
    let n = views.norm_adj.nrows();
    if h.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "feature matrix has {} rows, graph has {n} nodes",
            h.nrows()
        )));
    }
    let ah = views.norm_adj.mul_dense(h);
    let mut acc = 0.0;
    for (i, (hrow, arow)) in h.rows().into_iter().zip(ah.rows()).enumerate() {
        if views.degree[i] > 0.0 {
            for (hv, av) in hrow.iter().zip(arow.iter()) {
                acc += hv * hv - hv * av;
            }
        }
    }
    Ok(acc)
}

/// Multi-relational Dirichlet energy Σ_r ω_r · D(H, A⁽ʳ⁾).
pub fn mrde(h: &Array2<f64>, views: &[RelationViews], weights: &RelationWeights) -> Result<f64> {
    if views.len() != weights.omega().len() {
        return Err(Error::Parameter(format!(
            "{} relations but {} weights",
            views.len(),
            weights.omega().len()
        )));
    }
    let mut acc = 0.0;
    for (v, &w) in views.iter().zip(weights.omega()) {
        acc += w * dirichlet_energy(h, v)?;
    }
    Ok(acc)
}

/// Stage-I objective decomposition at one iterate.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub per_relation: Vec<f64>,
    pub mrde: f64,
    pub fit: f64,
    pub reg: f64,
    pub alpha: f64,
    pub beta: f64,
    pub total: f64,
}

pub fn energy_report(
    h: &Array2<f64>,
    x: &Array2<f64>,
    views: &[RelationViews],
    weights: &RelationWeights,
    alpha: f64,
    beta: f64,
) -> Result<EnergyReport> {
    let per_relation: Vec<f64> = views
        .iter()
        .map(|v| dirichlet_energy(h, v))
        .collect::<Result<_>>()?;
    let mrde = per_relation
        .iter()
        .zip(weights.omega())
        .map(|(e, w)| e * w)
        .sum();
    let fit = h.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
    let reg = views
        .iter()
        .zip(weights.omega())
        .map(|(v, w)| w * v.fro_sq)
        .sum();
    let total = fit + alpha * mrde + beta * reg;
    Ok(EnergyReport {
        per_relation,
        mrde,
        fit,
        reg,
        alpha,
        beta,
        total,
    })
}

/// (ℓ₁, ℓ₂)-order maximum eigengap of a normalized adjacency:
/// μ = max_i |λ_iˡ¹ − λ_iˡ²| over the full spectrum, which also equals
/// ‖Âˡ² − Âˡ¹‖₂. Dense full eigendecomposition, capped at `cap` nodes.
pub fn ome(norm_adj: &CsrMatrix, l1: u32, l2: u32, cap: usize) -> Result<f64> {
    let n = norm_adj.nrows();
    if n > cap {
        return Err(Error::DenseCap {
            n,
            cap,
            hint: "sample a subgraph or raise the cap for this diagnostic".into(),
        });
    }
    if l1 == l2 {
        return Ok(0.0);
    }
    let eig = sym_eigen(&norm_adj.to_dense())?;
    Ok(eig
        .values
        .iter()
        .map(|&lam| (lam.powi(l1 as i32) - lam.powi(l2 as i32)).abs())
        .fold(0.0, f64::max))
}

/// max_{ℓ≥1} μ_{L,L+ℓ} from an explicit spectrum. Sweeps ℓ up to
/// `sweep` and closes the tail with the ℓ→∞ limit |λ|ᴸ per eigenvalue.
pub fn max_ome_from_spectrum(eigenvalues: &[f64], hops: u32, sweep: u32) -> f64 {
    let mut best: f64 = 0.0;
    for &lam in eigenvalues {
        let base = lam.powi(hops as i32);
        best = best.max(base.abs());
        for ell in 1..=sweep {
            best = best.max((base - lam.powi((hops + ell) as i32)).abs());
        }
    }
    best
}
