//! k-means++ seeded Lloyd iterations with restarts.

use ndarray::Array2;
use rand::RngExt;

use crate::error::{Error, Result};
use crate::rng;
use crate::stage2::ClusterResult;

/// Run k-means with `restarts` independent k-means++ initializations and
/// return the restart with the lowest within-cluster sum of squares (ties
/// broken by restart index, so parallel and sequential schedules agree).
///
/// An empty cluster during Lloyd is reseeded to the point farthest from its
/// current center.
pub fn kmeans(
    points: &Array2<f64>,
    k: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<ClusterResult> {
    let n = points.nrows();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!(
            "k = {k} out of range for {n} points"
        )));
    }
    if restarts == 0 || iters == 0 {
        return Err(Error::Parameter("restarts and iters must be ≥ 1".into()));
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for r in 0..restarts {
        let run_seed = rng::derive_seed(seed, 0x6b6d, r as u64);
        let (objective, assignment) = lloyd_once(points, k, iters, run_seed);
        let better = match &best {
            Some((obj, _)) => objective < *obj,
            None => true,
        };
        if better {
            best = Some((objective, assignment));
        }
    }
    let (objective, assignment) = best.expect("restarts >= 1");
    let mut sizes = vec![0usize; k];
    for &a in &assignment {
        sizes[a] += 1;
    }
    Ok(ClusterResult {
        assignment,
        sizes,
        objective,
        method: "kmeans".to_string(),
        elapsed_secs: 0.0,
    })
}

fn lloyd_once(points: &Array2<f64>, k: usize, iters: usize, seed: u64) -> (f64, Vec<usize>) {
    let n = points.nrows();
    let d = points.ncols();
    let mut rng = rng::seeded(seed);

    // k-means++ seeding
    let mut centers = Array2::zeros((k, d));
    let first = rng.random_range(0..n);
    centers.row_mut(0).assign(&points.row(first));
    let mut dist_sq = vec![0.0; n];
    for i in 0..n {
        dist_sq[i] = sq_dist(points, i, &centers, 0);
    }
    for c in 1..k {
        let total: f64 = dist_sq.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in dist_sq.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.row_mut(c).assign(&points.row(pick));
        for i in 0..n {
            let dnew = sq_dist(points, i, &centers, c);
            if dnew < dist_sq[i] {
                dist_sq[i] = dnew;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for _ in 0..iters {
        // assign: nearest center, lowest index wins ties
        let mut changed = false;
        for i in 0..n {
            let mut best_c = 0;
            let mut best_d = sq_dist(points, i, &centers, 0);
            for c in 1..k {
                let d = sq_dist(points, i, &centers, c);
                if d < best_d {
                    best_d = d;
                    best_c = c;
                }
            }
            if assignment[i] != best_c {
                assignment[i] = best_c;
                changed = true;
            }
        }
        // update
        let mut counts = vec![0usize; k];
        let mut sums = Array2::<f64>::zeros((k, d));
        for i in 0..n {
            counts[assignment[i]] += 1;
            let mut row = sums.row_mut(assignment[i]);
            let p = points.row(i);
            for j in 0..d {
                row[j] += p[j];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                for j in 0..d {
                    centers[[c, j]] = sums[[c, j]] * inv;
                }
            } else {
                // empty cluster: reseed to the point farthest from its center
                let mut far_i = 0;
                let mut far_d = -1.0;
                for i in 0..n {
                    let d = sq_dist(points, i, &centers, assignment[i]);
                    if d > far_d {
                        far_d = d;
                        far_i = i;
                    }
                }
                centers.row_mut(c).assign(&points.row(far_i));
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // final assignment pass and objective
    let mut objective = 0.0;
    for i in 0..n {
        let mut best_c = 0;
        let mut best_d = sq_dist(points, i, &centers, 0);
        for c in 1..k {
            let d = sq_dist(points, i, &centers, c);
            if d < best_d {
                best_d = d;
                best_c = c;
            }
        }
        assignment[i] = best_c;
        objective += best_d;
    }
    (objective, assignment)
}

fn sq_dist(points: &Array2<f64>, i: usize, centers: &Array2<f64>, c: usize) -> f64 {
    let p = points.row(i);
    let q = centers.row(c);
    let mut acc = 0.0;
    for j in 0..p.len() {
        let d = p[j] - q[j];
        acc += d * d;
    }
    acc
}
