//! Clustering quality against ground truth: ACC (Hungarian-matched
//! accuracy), NMI and ARI. Natural logarithms throughout; the base cancels
//! in the NMI ratio anyway.

use std::collections::HashMap;

use crate::error::{Error, Result};

fn check_lengths(pred: &[usize], truth: &[usize]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::Parameter(format!(
            "prediction has {} labels, truth has {}",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::Parameter("empty label vectors".into()));
    }
    Ok(())
}

/// Dense relabeling to 0..k, plus the confusion matrix of two labelings.
fn contingency(pred: &[usize], truth: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>, Vec<usize>) {
    let mut pred_ids: HashMap<usize, usize> = HashMap::new();
    let mut truth_ids: HashMap<usize, usize> = HashMap::new();
    for &p in pred {
        let next = pred_ids.len();
        pred_ids.entry(p).or_insert(next);
    }
    for &t in truth {
        let next = truth_ids.len();
        truth_ids.entry(t).or_insert(next);
    }
    let kp = pred_ids.len();
    let kt = truth_ids.len();
    let mut table = vec![vec![0usize; kt]; kp];
    let mut pred_sizes = vec![0usize; kp];
    let mut truth_sizes = vec![0usize; kt];
    for (&p, &t) in pred.iter().zip(truth) {
        let pi = pred_ids[&p];
        let ti = truth_ids[&t];
        table[pi][ti] += 1;
        pred_sizes[pi] += 1;
        truth_sizes[ti] += 1;
    }
    (table, pred_sizes, truth_sizes)
}

/// Label-matched accuracy: the best one-to-one relabeling of predicted
/// clusters onto truth clusters (Hungarian assignment on the padded
/// confusion matrix), divided by N.
pub fn acc(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(pred, truth)?;
    let (table, _, _) = contingency(pred, truth);
    let k = table.len().max(table[0].len());
    // maximize matched count == minimize (max − count)
    let max_entry = table
        .iter()
        .flat_map(|r| r.iter())
        .copied()
        .max()
        .unwrap_or(0) as i64;
    let mut cost = vec![vec![0i64; k]; k];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let v = table.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0) as i64;
            *c = max_entry - v;
        }
    }
    let assignment = hungarian_min(&cost);
    let mut matched = 0usize;
    for (i, &j) in assignment.iter().enumerate() {
        matched += table.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0);
    }
    Ok(matched as f64 / pred.len() as f64)
}

/// Normalized mutual information with geometric-mean normalization:
/// I(pred; truth) / √(H(pred)·H(truth)). Degenerate partitions with zero
/// entropy give 0, except two identical single-cluster partitions → 1.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(pred, truth)?;
    let n = pred.len() as f64;
    let (table, pred_sizes, truth_sizes) = contingency(pred, truth);
    let h_pred = entropy(&pred_sizes, n);
    let h_truth = entropy(&truth_sizes, n);
    if h_pred == 0.0 && h_truth == 0.0 {
        // both trivial single-cluster partitions are identical by definition
        return Ok(1.0);
    }
    if h_pred == 0.0 || h_truth == 0.0 {
        return Ok(0.0);
    }
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &nij) in row.iter().enumerate() {
            if nij > 0 {
                let nij = nij as f64;
                mi += (nij / n) * ((n * nij) / (pred_sizes[i] as f64 * truth_sizes[j] as f64)).ln();
            }
        }
    }
    Ok((mi / (h_pred * h_truth).sqrt()).clamp(0.0, 1.0))
}

fn entropy(sizes: &[usize], n: f64) -> f64 {
    sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Adjusted Rand index by pair counting:
/// (Σ C(n_ij,2) − E) / (½(Σ C(a_i,2) + Σ C(b_j,2)) − E)
/// with E = Σ C(a_i,2)·Σ C(b_j,2)/C(N,2).
pub fn ari(pred: &[usize], truth: &[usize]) -> Result<f64> {
    check_lengths(pred, truth)?;
    if pred.len() < 2 {
        return Err(Error::Parameter("ARI needs at least two points".into()));
    }
    let (table, pred_sizes, truth_sizes) = contingency(pred, truth);
    let choose2 = |x: usize| -> f64 { (x as f64) * (x as f64 - 1.0) / 2.0 };
    let sum_ij: f64 = table
        .iter()
        .flat_map(|r| r.iter())
        .map(|&v| choose2(v))
        .sum();
    let sum_a: f64 = pred_sizes.iter().map(|&v| choose2(v)).sum();
    let sum_b: f64 = truth_sizes.iter().map(|&v| choose2(v)).sum();
    let total = choose2(pred.len());
    let expected = sum_a * sum_b / total;
    let max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected).abs() < 1e-300 {
        // both partitions trivial (all-singletons vs all-singletons, or a
        // single cluster on both sides): identical structure → 1
        return Ok(1.0);
    }
    Ok((sum_ij - expected) / (max_index - expected))
}

/// Hungarian algorithm (Jonker-style potentials) minimizing total cost of a
/// square matrix; returns column assigned to each row.
fn hungarian_min(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    // potentials and matching, 1-based internally
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1]; // p[j] = row matched to column j
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}
