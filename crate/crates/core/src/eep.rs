//! External equitable partitions (EEPs), quotient graphs and their exact
//! dynamical coarse-graining.
//!
//! A partition is externally equitable when every node's total edge weight
//! into each *other* cell depends only on the node's own cell. For such a
//! partition with indicator matrix C the Laplacian satisfies L C = C L_pi
//! with the quotient Laplacian L_pi = C+ L C, and consensus dynamics started
//! cell-synchronized stays cell-synchronized for all times.

use crate::dynamics::{trajectory_from_parts, Trajectory, TrajectoryKind};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::graph::Graph;
use crate::partition::Partition;
use crate::real::Real;
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

/// Default equitability tolerance.
pub const DEFAULT_EEP_TOL: f64 = 1e-9;

/// Result of an external-equitability check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EepReport {
    pub is_eep: bool,
    /// Largest spread, within any cell, of the per-node edge weight into some
    /// other cell.
    pub max_violation: f64,
    /// Worst offender as a `(node, cell)` pair: the node whose weight into
    /// `cell` deviates most from its own cell's common value.
    pub witness: Option<(usize, usize)>,
}

/// Per-node total edge weight into every cell (own cell included).
fn cell_weight_sums<T: Real>(g: &Graph<T>, p: &Partition) -> Vec<Vec<T>> {
    let n = g.n();
    let k = p.k();
    let a = g.adjacency();
    let mut sums = vec![vec![T::zero(); k]; n];
    for v in 0..n {
        for u in 0..n {
            let w = a[(v, u)];
            if w != T::zero() {
                sums[v][p.cell_of(u)] += w;
            }
        }
    }
    sums
}

/// Checks external equitability: within each cell, the per-node weights into
/// every other cell may vary by at most `tol`.
pub fn check_eep<T: Real>(g: &Graph<T>, p: &Partition, tol: T) -> Result<EepReport> {
    if p.n() != g.n() {
        return Err(Error::PartitionMismatch {
            expected: g.n(),
            got: p.n(),
        });
    }
    let sums = cell_weight_sums(g, p);
    let cells = p.cells();
    let mut max_violation = T::zero();
    let mut witness = None;
    for (i, members) in cells.iter().enumerate() {
        for j in 0..p.k() {
            if i == j {
                continue;
            }
            let mut lo = T::cast(f64::INFINITY);
            let mut hi = -T::cast(f64::INFINITY);
            for &v in members {
                lo = lo.min(sums[v][j]);
                hi = hi.max(sums[v][j]);
            }
            let spread = hi - lo;
            if spread > max_violation {
                max_violation = spread;
                // the node farthest from the cell's mean value
                let mean =
                    members.iter().map(|&v| sums[v][j]).sum::<T>() / T::from_count(members.len());
                let worst = members
                    .iter()
                    .copied()
                    .max_by(|&a, &b| {
                        (sums[a][j] - mean)
                            .abs()
                            .partial_cmp(&(sums[b][j] - mean).abs())
                            .unwrap()
                    })
                    .unwrap();
                witness = Some((worst, j));
            }
        }
    }
    Ok(EepReport {
        is_eep: max_violation <= tol,
        max_violation: max_violation.as_f64(),
        witness,
    })
}

/// Quotient graph induced by an EEP: k x k Laplacian L_pi = C+ L C,
/// asymmetric in general, rows summing to zero.
#[derive(Debug, Clone)]
pub struct QuotientGraph<T: Real = f64> {
    l_pi: DMatrix<T>,
    cells: Partition,
    parent_n: usize,
}

impl<T: Real> QuotientGraph<T> {
    pub fn k(&self) -> usize {
        self.cells.k()
    }

    pub fn laplacian(&self) -> &DMatrix<T> {
        &self.l_pi
    }

    pub fn cells(&self) -> &Partition {
        &self.cells
    }

    pub fn parent_n(&self) -> usize {
        self.parent_n
    }
}

/// Builds the quotient Laplacian, gating on [`check_eep`] at `tol`.
///
/// Signed weights are handled through the row-sum Laplacian diag(A 1) - A,
/// which coincides with the combinatorial Laplacian on unsigned graphs.
pub fn quotient_laplacian_with_tol<T: Real>(
    g: &Graph<T>,
    p: &Partition,
    tol: T,
) -> Result<QuotientGraph<T>> {
    let report = check_eep(g, p, tol)?;
    if !report.is_eep {
        return Err(Error::NotAnEep(report));
    }
    let l = g.laplacian_unchecked();
    let c = p.indicator_matrix::<T>();
    let cp = p.cell_averaging::<T>();
    let l_pi = cp * l * c;
    Ok(QuotientGraph {
        l_pi,
        cells: p.clone(),
        parent_n: g.n(),
    })
}

/// [`quotient_laplacian_with_tol`] at the default tolerance.
pub fn quotient_laplacian<T: Real>(g: &Graph<T>, p: &Partition) -> Result<QuotientGraph<T>> {
    quotient_laplacian_with_tol(g, p, T::cast(DEFAULT_EEP_TOL))
}

/// Coarsest equitable refinement of the seed (all-in-one when absent).
///
/// Nodes within a cell are split by their quantized vector of edge weights
/// into every current cell until the partition is stable. Splitting keys are
/// compared exactly when all weights are integral, otherwise after
/// quantization at the default tolerance. The fixed point satisfies
/// [`check_eep`] and refines the seed.
pub fn coarsest_eep<T: Real>(g: &Graph<T>, seed: Option<&Partition>) -> Partition {
    let n = g.n();
    let mut p = match seed {
        Some(s) => s.canonical(),
        None => Partition::all_in_one(n),
    };
    let integral = g
        .edges()
        .iter()
        .all(|e| (e.weight - e.weight.round()) == T::zero());
    let quantum = if integral {
        T::one()
    } else {
        T::cast(DEFAULT_EEP_TOL)
    };

    loop {
        let sums = cell_weight_sums(g, &p);
        let keys: Vec<Vec<i64>> = (0..n)
            .map(|v| {
                sums[v]
                    .iter()
                    .map(|&s| (s / quantum).round().as_f64() as i64)
                    .collect()
            })
            .collect();

        let mut changed = false;
        let mut labels = vec![(0usize, 0usize); n];
        for (cell, members) in p.cells().iter().enumerate() {
            let mut groups: BTreeMap<&Vec<i64>, usize> = BTreeMap::new();
            for &v in members {
                let next = groups.len();
                let sub = *groups.entry(&keys[v]).or_insert(next);
                labels[v] = (cell, sub);
            }
            if groups.len() > 1 {
                changed = true;
            }
        }
        if !changed {
            return p;
        }
        p = Partition::from_labels(&labels).expect("refinement preserves coverage");
    }
}

/// Quotient consensus dy/dt = -L_pi y through the dense (generally
/// asymmetric) matrix exponential.
pub fn quotient_consensus<T: Real>(
    q: &QuotientGraph<T>,
    y0: &DVector<T>,
    times: &[T],
) -> Result<Trajectory<T>> {
    if times.is_empty() {
        return Err(Error::TimeGrid("empty time grid".into()));
    }
    let k = q.k();
    let mut states = DMatrix::zeros(times.len(), k);
    for (row, &t) in times.iter().enumerate() {
        let propagator = expm(&(q.laplacian() * (-t)));
        let y = propagator * y0;
        states.row_mut(row).copy_from(&y.transpose());
    }
    Ok(trajectory_from_parts(
        times.to_vec(),
        states,
        TrajectoryKind::Consensus,
    ))
}

/// Full consensus driven by the cell-consistent input u = C v; with a
/// cell-synchronized start the within-cell states stay identical.
pub fn eep_input_invariance<T: Real>(
    g: &Graph<T>,
    p: &Partition,
    v: &DVector<T>,
    x0: &DVector<T>,
    times: &[T],
) -> Result<Trajectory<T>> {
    let report = check_eep(g, p, T::cast(DEFAULT_EEP_TOL))?;
    if !report.is_eep {
        return Err(Error::NotAnEep(report));
    }
    let c = p.indicator_matrix::<T>();
    let u = crate::dynamics::InputSpec::constant(&c * v)?;
    crate::dynamics::simulate_consensus(g, x0, times, &u)
}

/// Largest within-cell spread over all samples of a trajectory.
pub fn within_cell_spread<T: Real>(traj: &Trajectory<T>, p: &Partition) -> T {
    let cells = p.cells();
    let mut worst = T::zero();
    for row in 0..traj.len() {
        for members in &cells {
            let mut lo = T::cast(f64::INFINITY);
            let mut hi = -T::cast(f64::INFINITY);
            for &v in members {
                let x = traj.states()[(row, v)];
                lo = lo.min(x);
                hi = hi.max(x);
            }
            worst = worst.max(hi - lo);
        }
    }
    worst
}
