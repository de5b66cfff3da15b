//! Shared test oracles, independent of the library's solver code paths.
//!
//! The eigensolver here is a plain cyclic Jacobi rotation sweep; metric
//! oracles are brute-force enumerations. Slow and simple on purpose.

#![allow(dead_code)]

use ndarray::Array2;
use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use demm_core::{build_views, MultiRelGraph, Relation, RelationViews};

/// Full eigendecomposition by cyclic Jacobi rotations.
/// Returns (eigenvalues ascending, eigenvectors as columns).
pub fn jacobi_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(n);
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * m[[p, q]]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, col]] = v[[r, src]];
        }
    }
    (values, vectors)
}

/// Spectral norm of a symmetric matrix via the Jacobi spectrum.
pub fn jacobi_spectral_norm(a: &Array2<f64>) -> f64 {
    let (values, _) = jacobi_eigen(a);
    values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}

pub fn dense_mat_power(a: &Array2<f64>, p: u32) -> Array2<f64> {
    let n = a.nrows();
    let mut out = Array2::eye(n);
    for _ in 0..p {
        out = out.dot(a);
    }
    out
}

/// Random Erdős–Rényi-ish relation on n nodes.
pub fn random_relation(n: usize, p: f64, rng: &mut ChaCha8Rng, name: &str) -> Relation {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Relation::new(name, edges, n).unwrap()
}

pub fn random_graph(n: usize, relations: usize, p: f64, seed: u64) -> MultiRelGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rels: Vec<Relation> = (0..relations)
        .map(|r| random_relation(n, p, &mut rng, &format!("r{r}")))
        .collect();
    MultiRelGraph::new(n, rels, None, None).unwrap()
}

pub fn random_views(n: usize, relations: usize, p: f64, seed: u64) -> Vec<RelationViews> {
    build_views(&random_graph(n, relations, p, seed))
}

pub fn random_dense(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Array2::zeros((rows, cols));
    for v in m.iter_mut() {
        *v = gaussian(&mut rng);
    }
    m
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
    }
}

/// Random point on the probability simplex (uniform Dirichlet(1,...,1)).
pub fn random_simplex(r: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..r)
        .map(|_| -(rng.random::<f64>().max(1e-12)).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// ACC by exhaustive search over all injections of predicted cluster ids
/// into truth cluster ids (feasible for ≤ 5 distinct labels per side).
pub fn brute_force_acc(pred: &[usize], truth: &[usize]) -> f64 {
    let mut pred_ids: Vec<usize> = pred.to_vec();
    pred_ids.sort_unstable();
    pred_ids.dedup();
    let mut truth_ids: Vec<usize> = truth.to_vec();
    truth_ids.sort_unstable();
    truth_ids.dedup();
    // pad so every predicted id can map somewhere distinct
    let k = pred_ids.len().max(truth_ids.len());
    let mut targets: Vec<Option<usize>> = truth_ids.iter().copied().map(Some).collect();
    while targets.len() < k {
        targets.push(None);
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0usize;
    permute(&mut perm, 0, &mut |p| {
        let mut matched = 0usize;
        for (i, &pr) in pred.iter().enumerate() {
            let pi = pred_ids.iter().position(|&x| x == pr).unwrap();
            if let Some(t) = targets[p[pi]] {
                if truth[i] == t {
                    matched += 1;
                }
            }
        }
        if matched > best {
            best = matched;
        }
    });
    best as f64 / pred.len() as f64
}

fn permute(perm: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == perm.len() {
        visit(perm);
        return;
    }
    for i in at..perm.len() {
        perm.swap(at, i);
        permute(perm, at + 1, visit);
        perm.swap(at, i);
    }
}

/// NMI straight from the contingency counts with no shared helper code.
pub fn brute_force_nmi(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len() as f64;
    let cells = cross_counts(pred, truth);
    let (pa, pb) = marginals(&cells);
    let h = |sizes: &std::collections::HashMap<usize, usize>| -> f64 {
        sizes
            .values()
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let ha = h(&pa);
    let hb = h(&pb);
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for (&(a, b), &c) in &cells {
        let pj = c as f64 / n;
        mi += pj * (pj / ((pa[&a] as f64 / n) * (pb[&b] as f64 / n))).ln();
    }
    (mi / (ha * hb).sqrt()).clamp(0.0, 1.0)
}

/// ARI by direct enumeration of all C(N,2) point pairs.
pub fn brute_force_ari(pred: &[usize], truth: &[usize]) -> f64 {
    let n = pred.len();
    let mut both = 0.0;
    let mut pred_same = 0.0;
    let mut truth_same = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = pred[i] == pred[j];
            let t = truth[i] == truth[j];
            if p {
                pred_same += 1.0;
            }
            if t {
                truth_same += 1.0;
            }
            if p && t {
                both += 1.0;
            }
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    let expected = pred_same * truth_same / total;
    let max_index = 0.5 * (pred_same + truth_same);
    if (max_index - expected).abs() < 1e-300 {
        return 1.0;
    }
    (both - expected) / (max_index - expected)
}

fn cross_counts(
    pred: &[usize],
    truth: &[usize],
) -> std::collections::HashMap<(usize, usize), usize> {
    let mut cells = std::collections::HashMap::new();
    for (&p, &t) in pred.iter().zip(truth) {
        *cells.entry((p, t)).or_insert(0) += 1;
    }
    cells
}

fn marginals(
    cells: &std::collections::HashMap<(usize, usize), usize>,
) -> (
    std::collections::HashMap<usize, usize>,
    std::collections::HashMap<usize, usize>,
) {
    let mut pa = std::collections::HashMap::new();
    let mut pb = std::collections::HashMap::new();
    for (&(a, b), &c) in cells {
        *pa.entry(a).or_insert(0) += c;
        *pb.entry(b).or_insert(0) += c;
    }
    (pa, pb)
}

/// All partitions of {0..n} into exactly k non-empty blocks, as label
/// vectors with block ids in first-appearance order.
pub fn partitions_into_k(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(labels: &mut Vec<usize>, at: usize, used: usize, k: usize, out: &mut Vec<Vec<usize>>) {
        let n = labels.len();
        if at == n {
            if used == k {
                out.push(labels.clone());
            }
            return;
        }
        // prune: remaining slots must be able to reach k blocks
        if used + (n - at) < k {
            return;
        }
        for b in 0..=used.min(k - 1) {
            labels[at] = b;
            let new_used = used.max(b + 1);
            rec(labels, at + 1, new_used, k, out);
        }
    }
    rec(&mut labels, 0, 0, k, &mut out);
    out
}

/// Spearman rank correlation of two equal-length slices.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = ranks(a);
    let rb = ranks(b);
    pearson(&ra, &rb)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].partial_cmp(&v[j]).unwrap());
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &p in &idx[i..=j] {
            out[p] = avg;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}
