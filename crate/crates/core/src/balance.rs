//! Structural balance on signed graphs: detection via spanning-tree
//! two-coloring, switching (gauge) transformations, the polarized limit of
//! signed consensus, and the structural dynamics dX/dt = X X'.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::real::Real;
use nalgebra::{DMatrix, DVector};
use std::collections::VecDeque;

/// Outcome of a structural-balance check.
///
/// `sigma` holds the +-1 polarization assigned by tree coloring, canonicalized
/// so the lowest-index node gets +1 (the global sign is arbitrary).
/// `frustrated_edges` lists the edges whose sign is inconsistent with that
/// coloring; the graph is balanced iff the list is empty.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BalanceResult {
    pub balanced: bool,
    pub sigma: Vec<i8>,
    pub frustrated_edges: Vec<(usize, usize)>,
}

/// Spanning-tree two-coloring: crossing a positive edge keeps the sign,
/// a negative edge flips it; balance holds iff every non-tree edge agrees.
pub fn check_balance<T: Real>(g: &Graph<T>) -> Result<BalanceResult> {
    if !g.is_connected() {
        return Err(Error::Disconnected {
            op: "check_balance",
        });
    }
    let n = g.n();
    let a = g.adjacency();
    let mut sigma = vec![0i8; n];
    sigma[0] = 1;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for u in 0..n {
            let w = a[(v, u)];
            if w != T::zero() && sigma[u] == 0 {
                sigma[u] = if w < T::zero() { -sigma[v] } else { sigma[v] };
                queue.push_back(u);
            }
        }
    }

    let mut frustrated = Vec::new();
    for e in g.edges() {
        let expected = if e.weight < T::zero() { -1 } else { 1 };
        if sigma[e.i] * sigma[e.j] != expected {
            frustrated.push((e.i, e.j));
        }
    }
    Ok(BalanceResult {
        balanced: frustrated.is_empty(),
        sigma,
        frustrated_edges: frustrated,
    })
}

/// Switching (gauge) transformation: A'_ij = sigma_i A_ij sigma_j.
/// An involution; applied with its own polarization it renders a balanced
/// graph all-positive.
pub fn switch<T: Real>(g: &Graph<T>, sigma: &[i8]) -> Result<Graph<T>> {
    if sigma.len() != g.n() {
        return Err(Error::SigmaMismatch {
            expected: g.n(),
            got: sigma.len(),
        });
    }
    let sign = |s: i8| if s < 0 { -T::one() } else { T::one() };
    let edges = g
        .edges()
        .iter()
        .map(|e| (e.i, e.j, sign(sigma[e.i]) * e.weight * sign(sigma[e.j])))
        .collect();
    Graph::new(g.node_names().to_vec(), edges)
}

/// Asymptotic state of signed consensus on a balanced graph:
/// (sigma' x0 / n) sigma. Unbalanced graphs are rejected distinctly since
/// their limit is the zero vector.
pub fn signed_consensus_limit<T: Real>(g: &Graph<T>, x0: &DVector<T>) -> Result<DVector<T>> {
    let result = check_balance(g)?;
    if !result.balanced {
        return Err(Error::Unbalanced);
    }
    let n = g.n();
    let sigma = DVector::from_fn(n, |i, _| {
        if result.sigma[i] < 0 {
            -T::one()
        } else {
            T::one()
        }
    });
    let mean = sigma.dot(x0) / T::from_count(n);
    Ok(sigma * mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum TraagStop {
    Converged,
    BlowUp,
    MaxTime,
}

/// Integration record of the structural dynamics dX/dt = X X'.
#[derive(Debug, Clone)]
pub struct TraagResult<T: Real = f64> {
    pub times: Vec<T>,
    pub norm_history: Vec<T>,
    /// X / ||X||_F at the stopping time; unit Frobenius norm.
    pub final_normalized: DMatrix<T>,
    pub sign_pattern: DMatrix<i8>,
    pub stopped_reason: TraagStop,
}

fn frobenius<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

fn rk4_step<T: Real>(x: &DMatrix<T>, h: T) -> DMatrix<T> {
    let deriv = |m: &DMatrix<T>| m * m.transpose();
    let half = T::cast(0.5);
    let two = T::cast(2.0);
    let sixth = T::cast(1.0 / 6.0);
    let k1 = deriv(x);
    let k2 = deriv(&(x + &k1 * (h * half)));
    let k3 = deriv(&(x + &k2 * (h * half)));
    let k4 = deriv(&(x + &k3 * h));
    x + (k1 + k2 * two + k3 * two + k4) * (h * sixth)
}

/// Integrates dX/dt = X X' from a symmetric X0 by RK4, halving the step
/// whenever the Frobenius norm would grow more than 10% in one step.
///
/// Stops when the norm reaches `norm_cap` (finite-time blow-up, the expected
/// generic outcome), when the normalized matrix stops moving, or at `t_max`.
pub fn simulate_traag<T: Real>(
    x0: &DMatrix<T>,
    dt: T,
    t_max: T,
    norm_cap: T,
) -> Result<TraagResult<T>> {
    let n = x0.nrows();
    if n != x0.ncols() || (x0 - x0.transpose()).amax() > T::cast(1e-12) * x0.amax().max(T::one())
    {
        return Err(Error::AsymmetricOpinions);
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::AsymmetricOpinions);
    }

    let mut x = x0.clone();
    let mut t = T::zero();
    let mut h = dt;
    let mut times = vec![t];
    let mut norm = frobenius(&x);
    let mut norm_history = vec![norm];
    let mut normalized = &x / norm.max(T::cast(1e-300));
    let growth_cap = T::cast(1.1);
    let converge_tol = T::cast(1e-10);

    let stopped_reason = loop {
        if norm >= norm_cap {
            break TraagStop::BlowUp;
        }
        if t >= t_max {
            break TraagStop::MaxTime;
        }
        let step = h.min(t_max - t);
        let candidate = rk4_step(&x, step);
        let cand_norm = frobenius(&candidate);
        if cand_norm > growth_cap * norm && step > T::cast(1e-14) {
            h = step / T::cast(2.0);
            continue;
        }

        x = candidate;
        t += step;
        norm = cand_norm;
        times.push(t);
        norm_history.push(norm);
        let new_normalized = &x / norm.max(T::cast(1e-300));
        let drift = frobenius(&(&new_normalized - &normalized));
        normalized = new_normalized;
        if drift < converge_tol {
            break TraagStop::Converged;
        }
        if norm >= norm_cap {
            break TraagStop::BlowUp;
        }
    };

    let sign_pattern = DMatrix::from_fn(n, n, |i, j| {
        if normalized[(i, j)] < T::zero() {
            -1i8
        } else {
            1i8
        }
    });
    Ok(TraagResult {
        times,
        norm_history,
        final_normalized: normalized,
        sign_pattern,
        stopped_reason,
    })
}

/// Complete signed graph whose weights are the +-1 off-diagonal entries of a
/// sign pattern; used to test the balance of a converged opinion matrix.
pub fn sign_pattern_graph<T: Real>(pattern: &DMatrix<i8>) -> Result<Graph<T>> {
    let n = pattern.nrows();
    let names = (0..n).map(|i| i.to_string()).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = if pattern[(i, j)] < 0 {
                -T::one()
            } else {
                T::one()
            };
            edges.push((i, j, w));
        }
    }
    Graph::new(names, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_edge_list;

    #[test]
    fn all_positive_graph_is_balanced() {
        let g: Graph = parse_edge_list("a b\nb c\na c\n").unwrap();
        let r = check_balance(&g).unwrap();
        assert!(r.balanced);
        assert_eq!(r.sigma, vec![1, 1, 1]);
        assert!(r.frustrated_edges.is_empty());
    }

    #[test]
    fn two_hostile_cliques_are_balanced() {
        let g: Graph = parse_edge_list(
            "a b 1\nx y 1\na x -1\na y -1\nb x -1\nb y -1\n",
        )
        .unwrap();
        let r = check_balance(&g).unwrap();
        assert!(r.balanced);
        assert_eq!(r.sigma[0], 1);
        assert_eq!(r.sigma[1], 1);
        assert_eq!(r.sigma[2], -1);
        assert_eq!(r.sigma[3], -1);
    }

    #[test]
    fn frustrated_triangle_detected() {
        let g: Graph = parse_edge_list("a b 1\nb c 1\na c -1\n").unwrap();
        let r = check_balance(&g).unwrap();
        assert!(!r.balanced);
        assert_eq!(r.frustrated_edges.len(), 1);
    }

    #[test]
    fn switch_is_involution_and_identity_on_ones() {
        let g: Graph = parse_edge_list("a b 1\nb c -2\na c 0.5\n").unwrap();
        let ones = vec![1i8; 3];
        let same = switch(&g, &ones).unwrap();
        assert_eq!(same.adjacency(), g.adjacency());

        let sigma = vec![1i8, -1, 1];
        let twice = switch(&switch(&g, &sigma).unwrap(), &sigma).unwrap();
        assert_eq!(twice.adjacency(), g.adjacency());
    }

    #[test]
    fn switching_balanced_graph_makes_it_positive() {
        let g: Graph = parse_edge_list(
            "a b 1\nx y 1\na x -1\na y -1\nb x -1\nb y -1\n",
        )
        .unwrap();
        let r = check_balance(&g).unwrap();
        let switched = switch(&g, &r.sigma).unwrap();
        assert!(!switched.is_signed());
    }

    #[test]
    fn unbalanced_stays_signed_under_all_switchings() {
        let g: Graph = parse_edge_list("a b 1\nb c 1\na c -1\n").unwrap();
        for bits in 0..8u8 {
            let sigma: Vec<i8> = (0..3)
                .map(|i| if bits >> i & 1 == 1 { -1 } else { 1 })
                .collect();
            assert!(switch(&g, &sigma).unwrap().is_signed());
        }
    }

    #[test]
    fn polarized_limit_two_nodes() {
        let g: Graph = parse_edge_list("a b -1\n").unwrap();
        let x0 = DVector::from_vec(vec![1.0, 0.0]);
        let limit = signed_consensus_limit(&g, &x0).unwrap();
        assert!((limit[0] - 0.5).abs() < 1e-12);
        assert!((limit[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn positive_graph_limit_is_the_mean() {
        let g: Graph = parse_edge_list("a b\nb c\n").unwrap();
        let x0 = DVector::from_vec(vec![3.0, 0.0, 0.0]);
        let limit = signed_consensus_limit(&g, &x0).unwrap();
        for i in 0..3 {
            assert!((limit[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unbalanced_limit_signals_distinctly() {
        let g: Graph = parse_edge_list("a b 1\nb c 1\na c -1\n").unwrap();
        let x0 = DVector::from_vec(vec![1.0, 1.0, 1.0]);
        assert!(matches!(
            signed_consensus_limit(&g, &x0),
            Err(Error::Unbalanced)
        ));
    }

    #[test]
    fn traag_negative_identity_converges() {
        // X0 = -I evolves as x(t) I with dx/dt = x^2, x(0) = -1: the
        // normalized matrix never moves, the norm decays.
        let x0 = DMatrix::from_diagonal(&DVector::from_element(4, -1.0));
        let r = simulate_traag(&x0, 1e-3, 50.0, 1e12).unwrap();
        assert_eq!(r.stopped_reason, TraagStop::Converged);
        let expected = &x0 / 2.0; // -I / ||I||_F with n = 4
        assert!((&r.final_normalized - expected).amax() < 1e-9);
        assert!(r.norm_history.last().unwrap() <= &2.0);
    }

    #[test]
    fn traag_rank_one_start_stays_on_ray() {
        let v = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let x0 = &v * v.transpose();
        let r = simulate_traag(&x0, 1e-3, 10.0, 1e6).unwrap();
        let vvt_unit = &x0 / (x0.iter().map(|x| x * x).sum::<f64>()).sqrt();
        assert!((&r.final_normalized - &vvt_unit).amax() < 1e-6);
        // the normalized matrix is a fixed point on this ray, so the run
        // reports convergence rather than riding the norm to the cap
        assert_eq!(r.stopped_reason, TraagStop::Converged);
        // unit Frobenius norm
        let fro = r
            .final_normalized
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        assert!((fro - 1.0).abs() < 1e-9);
    }

    #[test]
    fn traag_rejects_asymmetric_start() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(
            simulate_traag(&m, 1e-3, 1.0, 1e6),
            Err(Error::AsymmetricOpinions)
        ));
    }
}
