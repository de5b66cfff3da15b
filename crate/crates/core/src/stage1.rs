//! Stage I feature construction: alternating optimization of the feature
//! matrix H and the relation-type weights ω.
//!
//! Two interchangeable paths share the loop. The exact path solves the
//! closed-form linear system for H and uses exact energy traces for the
//! weight update; the fast path replaces the solve with a truncated Neumann
//! propagation and the traces with CountSketch estimates.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::energy::{dirichlet_energy, energy_report, EnergyReport};
use crate::error::{Error, Result};
use crate::features::{row_normalize, FeatureMatrix, NormState};
use crate::graph::RelationViews;
use crate::linalg::{cg_solve, lu_solve, SymOp};
use crate::sketch::{sketched_trace, SketchPack};
use crate::sparse::CsrMatrix;

/// N above which the closed-form H update switches from a dense LU solve
/// to conjugate gradient on the same SPD system.
pub const EXACT_DENSE_CAP: usize = 4096;

const SIMPLEX_TOL: f64 = 1e-9;

/// Simplex-constrained relation-type weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationWeights {
    omega: Vec<f64>,
}

impl RelationWeights {
    pub fn uniform(r: usize) -> Self {
        RelationWeights {
            omega: vec![1.0 / r as f64; r],
        }
    }

    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::Parameter("weights must be non-empty".into()));
        }
        if omega.iter().any(|&w| w < -SIMPLEX_TOL) {
            return Err(Error::Parameter("weights must be non-negative".into()));
        }
        let sum: f64 = omega.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Parameter(format!(
                "weights must sum to 1 (got {sum})"
            )));
        }
        Ok(RelationWeights { omega })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// Sketch dimension: one m for every relation or a per-relation list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SketchDim {
    Scalar(usize),
    PerRelation(Vec<usize>),
}

impl SketchDim {
    pub fn expand(&self, relations: usize) -> Result<Vec<usize>> {
        let dims = match self {
            SketchDim::Scalar(m) => vec![*m; relations],
            SketchDim::PerRelation(v) => v.clone(),
        };
        if dims.len() != relations {
            return Err(Error::Parameter(format!(
                "{} sketch dimensions for {relations} relations",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Parameter("sketch dimension must be ≥ 1".into()));
        }
        Ok(dims)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stage1Config {
    pub alpha: f64,
    pub beta: f64,
    /// Neumann truncation order L.
    pub hops: usize,
    pub sketch_dim: SketchDim,
    pub max_iters: usize,
    /// Relative Frobenius change of H below which the loop stops.
    pub h_tol: f64,
    pub seed: u64,
}

impl Default for Stage1Config {
    fn default() -> Self {
        Stage1Config {
            alpha: 4.0,
            beta: 2.5,
            hops: 5,
            sketch_dim: SketchDim::Scalar(16),
            max_iters: 10,
            h_tol: 1e-4,
            seed: 0,
        }
    }
}

impl Stage1Config {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 0.0 {
            return Err(Error::Parameter("alpha must be ≥ 0".into()));
        }
        if self.beta < 0.0 {
            return Err(Error::Parameter("beta must be ≥ 0".into()));
        }
        if self.hops == 0 {
            return Err(Error::Parameter("hop count L must be ≥ 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage1Mode {
    Exact,
    Fast,
}

/// Unified normalized adjacency Â = Σ_r ω_r Â⁽ʳ⁾.
pub fn unify_adjacency(views: &[RelationViews], weights: &RelationWeights) -> Result<CsrMatrix> {
    if views.len() != weights.len() {
        return Err(Error::Parameter(format!(
            "{} relations but {} weights",
            views.len(),
            weights.len()
        )));
    }
    let mats: Vec<&CsrMatrix> = views.iter().map(|v| &v.norm_adj).collect();
    CsrMatrix::weighted_sum(&mats, weights.omega())
}

struct ShiftedSystem<'a> {
    a_hat: &'a CsrMatrix,
    alpha: f64,
}

impl SymOp for ShiftedSystem<'_> {
    fn dim(&self) -> usize {
        self.a_hat.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.a_hat.spmv(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = (1.0 + self.alpha) * xi - self.alpha * *yi;
        }
    }
}

/// Closed-form H update: solve ((1+α)I − αÂ) H = X, which equals
/// 1/(1+α) · (I − α/(1+α)·Â)⁻¹ X. Dense LU up to [`EXACT_DENSE_CAP`]
/// nodes, conjugate gradient beyond. α = 0 returns X unchanged.
pub fn exact_h(x: &Array2<f64>, a_hat: &CsrMatrix, alpha: f64) -> Result<Array2<f64>> {
    exact_h_capped(x, a_hat, alpha, EXACT_DENSE_CAP)
}

pub fn exact_h_capped(
    x: &Array2<f64>,
    a_hat: &CsrMatrix,
    alpha: f64,
    dense_cap: usize,
) -> Result<Array2<f64>> {
    let n = a_hat.nrows();
    if x.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "X has {} rows, Â is {n}x{n}",
            x.nrows()
        )));
    }
    if alpha == 0.0 {
        return Ok(x.clone());
    }
    if n <= dense_cap {
        let mut system = a_hat.to_dense();
        system.mapv_inplace(|v| -alpha * v);
        for i in 0..n {
            system[[i, i]] += 1.0 + alpha;
        }
        lu_solve(&system, x)
    } else {
        let op = ShiftedSystem { a_hat, alpha };
        cg_solve(&op, x, 1e-10, 20 * ((n as f64).sqrt() as usize + 50))
    }
}

/// Truncated Neumann propagation:
/// H = 1/(1+α) Σ_{ℓ=0}^{L} (α/(1+α))^ℓ Âˡ X + (α/(1+α))^{L+1} Âᴸ X,
/// built from L sparse mat-mat products.
pub fn approx_h(x: &Array2<f64>, a_hat: &CsrMatrix, alpha: f64, hops: usize) -> Array2<f64> {
    assert!(hops >= 1, "hop count must be ≥ 1");
    if alpha == 0.0 {
        return x.clone();
    }
    let ratio = alpha / (1.0 + alpha);
    let mut term = x.mapv(|v| v / (1.0 + alpha));
    let mut h = term.clone();
    for _ in 0..hops {
        term = a_hat.mul_dense(&term);
        term.mapv_inplace(|v| v * ratio);
        h += &term;
    }
    // close the tail: all orders beyond L estimated by Âᴸ X
    h.scaled_add(alpha, &term);
    h
}

/// RTW update ω_r = c_r⁻² / Σ_s c_s⁻² with
/// c_r = β‖Â⁽ʳ⁾‖²_F + α·trace(Hᵀ(I − Â⁽ʳ⁾)H). The trace is exact through
/// the incidence form when no sketch is given, and the CountSketch estimate
/// otherwise. Relations with c_r = 0 absorb the whole weight (split evenly
/// when several degenerate at once).
pub fn update_weights(
    h: &Array2<f64>,
    views: &[RelationViews],
    sketch: Option<&SketchPack>,
    alpha: f64,
    beta: f64,
) -> Result<RelationWeights> {
    let costs = weight_costs(h, views, sketch, alpha, beta)?;
    let zero_set: Vec<usize> = costs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 0.0)
        .map(|(i, _)| i)
        .collect();
    let omega = if zero_set.is_empty() {
        let inv_sq: Vec<f64> = costs.iter().map(|c| 1.0 / (c * c)).collect();
        let denom: f64 = inv_sq.iter().sum();
        inv_sq.into_iter().map(|v| v / denom).collect()
    } else {
        let share = 1.0 / zero_set.len() as f64;
        let mut omega = vec![0.0; costs.len()];
        for i in zero_set {
            omega[i] = share;
        }
        omega
    };
    RelationWeights::new(omega)
}

/// The per-relation costs c_r entering the weight update.
pub fn weight_costs(
    h: &Array2<f64>,
    views: &[RelationViews],
    sketch: Option<&SketchPack>,
    alpha: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    if let Some(s) = sketch {
        if s.sketched.len() != views.len() {
            return Err(Error::Parameter(format!(
                "sketch pack covers {} relations, graph has {}",
                s.sketched.len(),
                views.len()
            )));
        }
    }
    views
        .iter()
        .enumerate()
        .map(|(r, v)| {
            let trace = match sketch {
                Some(s) => sketched_trace(h, &s.sketched[r]),
                None => dirichlet_energy(h, v)?,
            };
            Ok(beta * v.fro_sq + alpha * trace)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Stage1Output {
    /// Row-normalized final features.
    pub features: FeatureMatrix,
    pub weights: RelationWeights,
    pub trace: Vec<EnergyReport>,
    pub iterations: usize,
}

/// Alternating optimization (both modes): start from uniform ω, then repeat
/// unify → H update → row-normalize → ω update until the relative Frobenius
/// change of H drops below `h_tol` or `max_iters` passes.
pub fn run_stage1(
    views: &[RelationViews],
    initial: &FeatureMatrix,
    cfg: &Stage1Config,
    mode: Stage1Mode,
) -> Result<Stage1Output> {
    cfg.validate()?;
    if views.is_empty() {
        return Err(Error::Parameter(
            "stage 1 needs at least one relation".into(),
        ));
    }
    let x = &initial.data;
    let n = views[0].norm_adj.nrows();
    if x.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial features have {} rows, graph has {n} nodes",
            x.nrows()
        )));
    }
    let sketch = match mode {
        Stage1Mode::Fast => {
            let dims = cfg.sketch_dim.expand(views.len())?;
            Some(SketchPack::build(views, &dims, cfg.seed)?)
        }
        Stage1Mode::Exact => None,
    };

    let mut weights = RelationWeights::uniform(views.len());
    let mut h_prev: Option<Array2<f64>> = None;
    let mut trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..cfg.max_iters {
        iterations += 1;
        let a_hat = unify_adjacency(views, &weights)?;
        let h_raw = match mode {
            Stage1Mode::Exact => exact_h(x, &a_hat, cfg.alpha)?,
            Stage1Mode::Fast => approx_h(x, &a_hat, cfg.alpha, cfg.hops),
        };
        let h = row_normalize(&h_raw);
        weights = update_weights(&h, views, sketch.as_ref(), cfg.alpha, cfg.beta)?;
        trace.push(energy_report(&h, x, views, &weights, cfg.alpha, cfg.beta)?);

        let converged = match &h_prev {
            Some(prev) => {
                let prev_norm: f64 = prev.iter().map(|v| v * v).sum::<f64>().sqrt();
                let diff: f64 = prev
                    .iter()
                    .zip(h.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                prev_norm > 0.0 && diff / prev_norm < cfg.h_tol
            }
            None => false,
        };
        h_prev = Some(h);
        if converged {
            break;
        }
    }

    Ok(Stage1Output {
        features: FeatureMatrix {
            data: h_prev.expect("at least one iteration ran"),
            norm_state: NormState::RowUnit,
        },
        weights,
        trace,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_views, MultiRelGraph, Relation};
    use ndarray::array;

    fn fig3_style_graph() -> Vec<RelationViews> {
        let g = MultiRelGraph::new(
            6,
            vec![
                Relation::new("a", vec![(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)], 6)
                    .unwrap(),
                Relation::new("b", vec![(0, 3), (1, 4), (2, 5)], 6).unwrap(),
            ],
            None,
            None,
        )
        .unwrap();
        build_views(&g)
    }

    #[test]
    fn unify_single_relation_is_identity() {
        let views = fig3_style_graph();
        let unified = unify_adjacency(&views[..1], &RelationWeights::uniform(1)).unwrap();
        assert_eq!(unified, views[0].norm_adj);
    }

    #[test]
    fn unify_identical_relations_is_fixed_point() {
        let views = fig3_style_graph();
        let twice = vec![views[0].clone(), views[0].clone()];
        let unified = unify_adjacency(&twice, &RelationWeights::uniform(2)).unwrap();
        assert!(unified.max_abs_diff(&views[0].norm_adj) < 1e-15);
    }

    #[test]
    fn unify_matches_dense_sum() {
        let views = fig3_style_graph();
        let w = RelationWeights::new(vec![0.8, 0.2]).unwrap();
        let unified = unify_adjacency(&views, &w).unwrap();
        let dense = views[0].norm_adj.to_dense() * 0.8 + &(views[1].norm_adj.to_dense() * 0.2);
        for i in 0..6 {
            for j in 0..6 {
                assert!((unified.get(i, j) - dense[[i, j]]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_h_alpha_zero_is_identity() {
        let views = fig3_style_graph();
        let x = array![[1.0], [2.0], [3.0], [4.0], [5.0], [6.0]];
        let h = exact_h(&x, &views[0].norm_adj, 0.0).unwrap();
        assert_eq!(h, x);
    }

    #[test]
    fn exact_h_edgeless_diagonal_system() {
        let a = CsrMatrix::zeros(3, 3);
        let x = array![[3.0], [0.0], [-6.0]];
        let h = exact_h(&x, &a, 2.0).unwrap();
        for (hv, xv) in h.iter().zip(x.iter()) {
            assert!((hv - xv / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_h_k2_pinned_solve() {
        // (2I − Â)H = X on K2 with X = [1, 0]ᵀ gives H = [2/3, 1/3]ᵀ
        let a = CsrMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let x = array![[1.0], [0.0]];
        let h = exact_h(&x, &a, 1.0).unwrap();
        assert!((h[[0, 0]] - 2.0 / 3.0).abs() < 1e-12);
        assert!((h[[1, 0]] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_h_residual_contract() {
        let views = fig3_style_graph();
        let a_hat = unify_adjacency(&views, &RelationWeights::uniform(2)).unwrap();
        let mut rng = crate::rng::seeded(5);
        let mut x = Array2::zeros((6, 3));
        for v in x.iter_mut() {
            *v = crate::rng::gaussian(&mut rng);
        }
        let alpha = 4.0;
        let h = exact_h(&x, &a_hat, alpha).unwrap();
        let ah = a_hat.mul_dense(&h);
        let mut resid = 0.0;
        let mut xnorm = 0.0;
        for ((hv, av), xv) in h.iter().zip(ah.iter()).zip(x.iter()) {
            let r = (1.0 + alpha) * hv - alpha * av - xv;
            resid += r * r;
            xnorm += xv * xv;
        }
        assert!(resid.sqrt() <= 1e-8 * xnorm.sqrt());
    }

    #[test]
    fn cg_fallback_matches_dense_path() {
        let views = fig3_style_graph();
        let a_hat = unify_adjacency(&views, &RelationWeights::uniform(2)).unwrap();
        let mut rng = crate::rng::seeded(21);
        let mut x = Array2::zeros((6, 2));
        for v in x.iter_mut() {
            *v = crate::rng::gaussian(&mut rng);
        }
        let dense = exact_h_capped(&x, &a_hat, 3.0, 4096).unwrap();
        let iterative = exact_h_capped(&x, &a_hat, 3.0, 0).unwrap();
        for (a, b) in dense.iter().zip(iterative.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn approx_h_alpha_zero_and_edgeless() {
        let x = array![[1.0, -2.0], [0.5, 0.0]];
        let zero = CsrMatrix::zeros(2, 2);
        assert_eq!(approx_h(&x, &zero, 0.0, 5), x);
        let h = approx_h(&x, &zero, 3.0, 4);
        for (hv, xv) in h.iter().zip(x.iter()) {
            assert!((hv - xv / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn approx_h_converges_to_exact_with_depth() {
        let views = fig3_style_graph();
        let a_hat = unify_adjacency(&views, &RelationWeights::uniform(2)).unwrap();
        let mut rng = crate::rng::seeded(2);
        let mut x = Array2::zeros((6, 2));
        for v in x.iter_mut() {
            *v = crate::rng::gaussian(&mut rng);
        }
        let exact = exact_h(&x, &a_hat, 4.0).unwrap();
        let shallow = approx_h(&x, &a_hat, 4.0, 2);
        let deep = approx_h(&x, &a_hat, 4.0, 60);
        let err = |h: &Array2<f64>| -> f64 {
            h.iter()
                .zip(exact.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        };
        assert!(err(&deep) < err(&shallow));
        assert!(err(&deep) < 1e-8);
    }

    #[test]
    fn weights_single_relation() {
        let views = fig3_style_graph();
        let h = Array2::ones((6, 2));
        let w = update_weights(&h, &views[..1], None, 1.0, 1.0).unwrap();
        assert_eq!(w.omega(), &[1.0]);
    }

    #[test]
    fn weights_identical_relations_split_evenly() {
        let views = fig3_style_graph();
        let twice = vec![views[0].clone(), views[0].clone()];
        let mut rng = crate::rng::seeded(7);
        let mut h = Array2::zeros((6, 2));
        for v in h.iter_mut() {
            *v = crate::rng::gaussian(&mut rng);
        }
        let w = update_weights(&h, &twice, None, 2.0, 1.0).unwrap();
        assert!((w.omega()[0] - 0.5).abs() < 1e-12);
        assert!((w.omega()[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weights_formula_direct_evaluation() {
        // c = (2, 1) → ω = (1/4, 1) / (5/4) = (0.2, 0.8)
        let inv_sq = [0.25f64, 1.0];
        let denom: f64 = inv_sq.iter().sum();
        assert!((inv_sq[0] / denom - 0.2).abs() < 1e-15);
        assert!((inv_sq[1] / denom - 0.8).abs() < 1e-15);
        // and through the public path: costs (2, 1) arise from β=1,
        // fro_sq contributions alone when H is constant on each component.
        let g = MultiRelGraph::new(
            2,
            vec![
                Relation::new("a", vec![(0, 1)], 2).unwrap(),
                Relation::new("b", vec![(0, 1)], 2).unwrap(),
            ],
            None,
            None,
        )
        .unwrap();
        let views = build_views(&g);
        let h = Array2::ones((2, 1));
        // (β=1, α=0.. not allowed to be zero in config, but fine here)
        let costs = weight_costs(&h, &views, None, 0.0, 1.0).unwrap();
        assert_eq!(costs, vec![2.0, 2.0]);
    }

    #[test]
    fn degenerate_zero_cost_takes_all_weight() {
        let g = MultiRelGraph::new(
            3,
            vec![
                Relation::new("edgeless", vec![], 3).unwrap(),
                Relation::new("edge", vec![(0, 1)], 3).unwrap(),
            ],
            None,
            None,
        )
        .unwrap();
        let views = build_views(&g);
        let h = array![[1.0], [0.0], [2.0]];
        // β = 0 so the edgeless relation has c = 0
        let w = update_weights(&h, &views, None, 1.0, 0.0).unwrap();
        assert_eq!(w.omega(), &[1.0, 0.0]);
    }

    #[test]
    fn stage1_converges_on_disjoint_cliques() {
        use crate::synth::{synth_mrg, SynthConfig};
        let g = synth_mrg(&SynthConfig {
            clusters: 2,
            nodes_per_cluster: 8,
            relations: 1,
            p_in: 1.0,
            p_out: vec![0.0],
            attr_dim: 4,
            attr_sep: 8.0,
            seed: 11,
        })
        .unwrap();
        let views = build_views(&g);
        let x = crate::features::reduce_attributes(g.attributes().unwrap(), 3).unwrap();
        let cfg = Stage1Config {
            alpha: 8.0,
            ..Stage1Config::default()
        };
        let out = run_stage1(&views, &x, &cfg, Stage1Mode::Exact).unwrap();
        let h = &out.features.data;
        let labels = g.labels().unwrap();
        for i in 0..16 {
            for j in (i + 1)..16 {
                if labels[i] == labels[j] {
                    let cos: f64 = h.row(i).dot(&h.row(j));
                    assert!(cos >= 0.99, "within-clique cosine {cos} at ({i}, {j})");
                }
            }
        }
        assert!(out.iterations <= 10);
        assert_eq!(out.trace.len(), out.iterations);
    }

    #[test]
    fn stage1_fast_matches_exact_with_oracle_sketch() {
        use crate::synth::{synth_mrg, SynthConfig};
        let g = synth_mrg(&SynthConfig {
            clusters: 2,
            nodes_per_cluster: 25,
            relations: 2,
            p_in: 0.4,
            p_out: vec![0.1, 0.1],
            attr_dim: 6,
            attr_sep: 5.0,
            seed: 23,
        })
        .unwrap();
        let views = build_views(&g);
        let x = crate::features::reduce_attributes(g.attributes().unwrap(), 4).unwrap();
        let cfg = Stage1Config {
            hops: 40,
            ..Stage1Config::default()
        };
        let exact = run_stage1(&views, &x, &cfg, Stage1Mode::Exact).unwrap();
        // oracle sketching: m = M with the identity hook permutes columns,
        // so the fast path differs from exact only in the H update.
        let dims: Vec<usize> = views.iter().map(|v| v.incidence.ncols()).collect();
        let sketched: Vec<CsrMatrix> = views
            .iter()
            .zip(&dims)
            .map(|(v, &m)| crate::sketch::count_sketch_with(&v.incidence, m, |c| (c, 1.0)).unwrap())
            .collect();
        let pack = SketchPack {
            sketched,
            fro_sq: views.iter().map(|v| v.fro_sq).collect(),
        };
        // replicate the fast loop with the oracle pack
        let mut weights = RelationWeights::uniform(views.len());
        let mut h_final = None;
        for _ in 0..cfg.max_iters {
            let a_hat = unify_adjacency(&views, &weights).unwrap();
            let h = row_normalize(&approx_h(&x.data, &a_hat, cfg.alpha, cfg.hops));
            weights = update_weights(&h, &views, Some(&pack), cfg.alpha, cfg.beta).unwrap();
            h_final = Some(h);
        }
        let h_fast = h_final.unwrap();
        let h_exact = &exact.features.data;
        let num: f64 = h_fast
            .iter()
            .zip(h_exact.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let den: f64 = h_exact.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(num / den < 1e-4, "relative gap {}", num / den);
    }

    #[test]
    fn weights_stay_on_simplex_each_iteration() {
        use crate::synth::{synth_mrg, SynthConfig};
        let g = synth_mrg(&SynthConfig {
            clusters: 3,
            nodes_per_cluster: 6,
            relations: 3,
            p_in: 0.5,
            p_out: vec![0.1, 0.3, 0.5],
            attr_dim: 4,
            attr_sep: 3.0,
            seed: 31,
        })
        .unwrap();
        let views = build_views(&g);
        let x = crate::features::reduce_attributes(g.attributes().unwrap(), 3).unwrap();
        let out = run_stage1(&views, &x, &Stage1Config::default(), Stage1Mode::Fast).unwrap();
        let sum: f64 = out.weights.omega().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!(out.weights.omega().iter().all(|&w| w >= 0.0));
    }
}
