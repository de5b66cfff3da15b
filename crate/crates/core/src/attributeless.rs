//! Stage I replacement for attribute-less graphs.
//!
//! With no attributes the fitting term drops out and the feature update
//! becomes a trace maximization under an orthogonality constraint, solved
//! by the top-d eigenvectors of the unified normalized adjacency. The
//! relation-weight update is shared with the attributed path; the cost of
//! relation r keeps the β‖Â⁽ʳ⁾‖²_F + trace form with no separate α knob.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::features::{row_normalize, FeatureMatrix, NormState};
use crate::graph::RelationViews;
use crate::linalg::top_eigenpairs;
use crate::rng;
use crate::sketch::SketchPack;
use crate::stage1::{
    unify_adjacency, update_weights, RelationWeights, Stage1Config, Stage1Mode, Stage1Output,
};

/// Alternating loop: unify Â with the current ω, take its top-d
/// eigenvectors as H (columns orthonormal, signs fixed so the
/// largest-magnitude entry of each column is positive), row-normalize,
/// update ω, repeat until H stabilizes.
pub fn run_stage1_na(
    views: &[RelationViews],
    feat_dim: usize,
    cfg: &Stage1Config,
    mode: Stage1Mode,
) -> Result<Stage1Output> {
    cfg.validate()?;
    if views.is_empty() {
        return Err(Error::Parameter(
            "stage 1 needs at least one relation".into(),
        ));
    }
    let n = views[0].norm_adj.nrows();
    if feat_dim == 0 || feat_dim > n {
        return Err(Error::Parameter(format!(
            "feature dimension {feat_dim} out of range [1, {n}]"
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
    let mut iterations = 0;

    for it in 0..cfg.max_iters {
        iterations += 1;
        let a_hat = unify_adjacency(views, &weights)?;
        let eig = top_eigenpairs(
            &a_hat,
            feat_dim,
            1e-8,
            rng::derive_seed(cfg.seed, 0x4e41, it as u64),
        )?;
        let mut h_orth = eig.vectors;
        fix_column_signs(&mut h_orth);
        let h = row_normalize(&h_orth);
        // no α for this objective: c_r = β‖Â⁽ʳ⁾‖²_F + trace term
        weights = update_weights(&h, views, sketch.as_ref(), 1.0, cfg.beta)?;

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
        trace: Vec::new(),
        iterations,
    })
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
