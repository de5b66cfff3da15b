//! Multi-relational graph data model and per-relation matrix views.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// One typed undirected edge set. Edges are stored once, canonicalized
/// with u < v, sorted; construction rejects self-loops and duplicates.
#[derive(Debug, Clone)]
pub struct Relation {
    pub name: String,
    edges: Vec<(usize, usize)>,
}

impl Relation {
    pub fn new(
        name: impl Into<String>,
        edges: Vec<(usize, usize)>,
        n_nodes: usize,
    ) -> Result<Self> {
        let mut canon = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == v {
                return Err(Error::Data(format!("self-loop edge ({u}, {v}) rejected")));
            }
            if u >= n_nodes || v >= n_nodes {
                return Err(Error::Data(format!(
                    "edge ({u}, {v}) references node out of range [0, {n_nodes})"
                )));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            let dup = canon.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
            return Err(Error::Data(format!(
                "duplicate edge ({}, {}) rejected",
                dup.0, dup.1
            )));
        }
        Ok(Relation {
            name: name.into(),
            edges: canon,
        })
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical (u, v) pairs with u < v, ascending.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// An attributed (or attribute-less) multi-relational graph: one node set,
/// R typed edge sets, optional raw attributes, optional ground-truth labels.
#[derive(Debug, Clone)]
pub struct MultiRelGraph {
    n_nodes: usize,
    relations: Vec<Relation>,
    attributes: Option<Array2<f64>>,
    labels: Option<Vec<usize>>,
}

impl MultiRelGraph {
    pub fn new(
        n_nodes: usize,
        relations: Vec<Relation>,
        attributes: Option<Array2<f64>>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        if relations.is_empty() {
            return Err(Error::Parameter("graph needs at least one relation".into()));
        }
        if let Some(attrs) = &attributes {
            if attrs.nrows() != n_nodes {
                return Err(Error::Data(format!(
                    "attribute matrix has {} rows, expected {n_nodes}",
                    attrs.nrows()
                )));
            }
        }
        if let Some(l) = &labels {
            if l.len() != n_nodes {
                return Err(Error::Data(format!(
                    "label vector has {} entries, expected {n_nodes}",
                    l.len()
                )));
            }
        }
        Ok(MultiRelGraph {
            n_nodes,
            relations,
            attributes,
            labels,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn total_edges(&self) -> usize {
        self.relations.iter().map(|r| r.n_edges()).sum()
    }

    pub fn attributes(&self) -> Option<&Array2<f64>> {
        self.attributes.as_ref()
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn drop_attributes(&mut self) {
        self.attributes = None;
    }

    /// Graph with the union of both graphs' relations (same node set).
    /// Used to assemble mixed synthetic instances relation by relation.
    pub fn merged_relations(&self, other: &MultiRelGraph) -> Result<MultiRelGraph> {
        if self.n_nodes != other.n_nodes {
            return Err(Error::Parameter(
                "merged_relations requires identical node counts".into(),
            ));
        }
        let mut relations = self.relations.clone();
        for (i, r) in other.relations.iter().enumerate() {
            let mut r = r.clone();
            if relations.iter().any(|existing| existing.name == r.name) {
                r.name = format!("{}_{}", r.name, relations.len() + i);
            }
            relations.push(r);
        }
        MultiRelGraph::new(
            self.n_nodes,
            relations,
            self.attributes.clone(),
            self.labels.clone(),
        )
    }
}

/// Matrix views of one relation: degrees, the symmetrically normalized
/// adjacency Â = D^{-1/2} A D^{-1/2}, the degree-normalized oriented
/// incidence Ê = D^{-1/2} E, and ‖Â‖²_F.
///
/// Isolated nodes use the convention d^{-1/2} = 0, so their rows are all
/// zero in both Â and Ê.
#[derive(Debug, Clone)]
pub struct RelationViews {
    pub degree: Vec<f64>,
    pub norm_adj: CsrMatrix,
    pub incidence: CsrMatrix,
    pub fro_sq: f64,
}

/// Build all per-relation views. Pure: identical inputs give identical
/// outputs, including entry order.
pub fn build_views(graph: &MultiRelGraph) -> Vec<RelationViews> {
    let n = graph.n_nodes();
    graph
        .relations()
        .iter()
        .map(|rel| {
            let mut degree = vec![0.0f64; n];
            for &(u, v) in rel.edges() {
                degree[u] += 1.0;
                degree[v] += 1.0;
            }
            let inv_sqrt: Vec<f64> = degree
                .iter()
                .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
                .collect();
            let mut adj_triplets = Vec::with_capacity(2 * rel.n_edges());
            let mut inc_triplets = Vec::with_capacity(2 * rel.n_edges());
            let mut fro_sq = 0.0;
            for (e, &(u, v)) in rel.edges().iter().enumerate() {
                let w = inv_sqrt[u] * inv_sqrt[v];
                adj_triplets.push((u, v, w));
                adj_triplets.push((v, u, w));
                fro_sq += 2.0 * w * w;
                inc_triplets.push((u, e, inv_sqrt[u]));
                inc_triplets.push((v, e, -inv_sqrt[v]));
            }
            let norm_adj = CsrMatrix::from_triplets(n, n, adj_triplets)
                .expect("edge endpoints validated at construction");
            let incidence = CsrMatrix::from_triplets(n, rel.n_edges(), inc_triplets)
                .expect("edge endpoints validated at construction");
            RelationViews {
                degree,
                norm_adj,
                incidence,
                fro_sq,
            }
        })
        .collect()
}
