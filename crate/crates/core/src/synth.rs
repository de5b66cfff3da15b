//! Synthetic planted-partition generators for desk-scale evaluation.

use ndarray::Array2;
use rand::RngExt;

use crate::error::{Error, Result};
use crate::graph::{MultiRelGraph, Relation};
use crate::rng;

/// Planted multi-relational graph: K equal clusters, one edge set per
/// relation with within-cluster probability `p_in` and between-cluster
/// probability `p_out[r]`, Gaussian attribute blobs whose centers sit
/// `attr_sep` apart, and ground-truth labels.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub clusters: usize,
    pub nodes_per_cluster: usize,
    pub relations: usize,
    pub p_in: f64,
    pub p_out: Vec<f64>,
    /// Attribute dimension; 0 generates an attribute-less graph.
    pub attr_dim: usize,
    pub attr_sep: f64,
    pub seed: u64,
}

pub fn synth_mrg(cfg: &SynthConfig) -> Result<MultiRelGraph> {
    if cfg.clusters == 0 || cfg.nodes_per_cluster == 0 {
        return Err(Error::Parameter(
            "clusters and cluster size must be ≥ 1".into(),
        ));
    }
    if cfg.relations == 0 || cfg.p_out.len() != cfg.relations {
        return Err(Error::Parameter(format!(
            "need one p_out per relation: got {} for R = {}",
            cfg.p_out.len(),
            cfg.relations
        )));
    }
    for &p in std::iter::once(&cfg.p_in).chain(cfg.p_out.iter()) {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Parameter(format!(
                "edge probability {p} outside [0, 1]"
            )));
        }
    }
    let n = cfg.clusters * cfg.nodes_per_cluster;
    let labels: Vec<usize> = (0..n).map(|i| i / cfg.nodes_per_cluster).collect();

    let mut relations = Vec::with_capacity(cfg.relations);
    for r in 0..cfg.relations {
        let mut rng = rng::seeded(rng::derive_seed(cfg.seed, 0x5edce5, r as u64));
        let p_out = cfg.p_out[r];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                let p = if labels[u] == labels[v] {
                    cfg.p_in
                } else {
                    p_out
                };
                if p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p) {
                    edges.push((u, v));
                }
            }
        }
        relations.push(Relation::new(format!("rel{r}"), edges, n)?);
    }

    let attributes = if cfg.attr_dim > 0 {
        let mut rng = rng::seeded(rng::derive_seed(cfg.seed, 0xa77b, 0));
        let centers = blob_centers(cfg.clusters, cfg.attr_dim, cfg.attr_sep, &mut rng);
        let mut attrs = Array2::zeros((n, cfg.attr_dim));
        for i in 0..n {
            let c = &centers[labels[i]];
            for j in 0..cfg.attr_dim {
                attrs[[i, j]] = c[j] + rng::gaussian(&mut rng);
            }
        }
        Some(attrs)
    } else {
        None
    };

    MultiRelGraph::new(n, relations, attributes, Some(labels))
}

/// Cluster centers with pairwise distance `sep`. With enough dimensions the
/// centers sit on scaled coordinate axes (exact pairwise distance); in the
/// low-dimensional fallback they are random directions of norm sep/√2.
fn blob_centers<R: RngExt>(k: usize, d: usize, sep: f64, rng: &mut R) -> Vec<Vec<f64>> {
    let scale = sep / 2f64.sqrt();
    if d >= k {
        (0..k)
            .map(|c| {
                let mut center = vec![0.0; d];
                center[c] = scale;
                center
            })
            .collect()
    } else {
        (0..k)
            .map(|_| {
                let mut dir = rng::gaussian_vec(rng, d);
                let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                for v in &mut dir {
                    *v *= scale / norm;
                }
                dir
            })
            .collect()
    }
}
