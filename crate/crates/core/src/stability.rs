//! Markov Stability partition quality functions: clustered autocovariance,
//! trace / correlation / min-diagonal scores, lumped Markov chains and
//! alpha-partition checks.
//!
//! The underlying process is the unbiased random walk, either in continuous
//! time (heat kernel of the normalized Laplacian) or in discrete time
//! (powers of D^{-1} A), with stationary distribution pi = d/2w.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::real::Real;
use crate::spectral::{decompose, Spectrum};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Mode {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Variant {
    Trace,
    Corr,
    Min,
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "trace" => Ok(Variant::Trace),
            "corr" => Ok(Variant::Corr),
            "min" => Ok(Variant::Min),
            other => Err(format!("unknown variant {other:?} (trace|corr|min)")),
        }
    }
}

/// Random-walk transition family P(t) on a fixed graph.
#[derive(Debug, Clone)]
pub struct TransitionFamily<T: Real = f64> {
    mode: Mode,
    graph: Graph<T>,
    pi: DVector<T>,
    d_sqrt: DVector<T>,
    /// Spectrum of L_N, driving the continuous-time kernel.
    spectrum: Option<Spectrum<T>>,
    /// One-step matrix D^{-1} A for the discrete chain.
    step: Option<DMatrix<T>>,
}

impl<T: Real> TransitionFamily<T> {
    pub fn continuous(g: &Graph<T>) -> Result<Self> {
        let (pi, d_sqrt) = walk_measures(g)?;
        let spectrum = decompose(&g.normalized_laplacian()?)?;
        Ok(TransitionFamily {
            mode: Mode::Continuous,
            graph: g.clone(),
            pi,
            d_sqrt,
            spectrum: Some(spectrum),
            step: None,
        })
    }

    pub fn discrete(g: &Graph<T>) -> Result<Self> {
        let (pi, d_sqrt) = walk_measures(g)?;
        let d = g.degrees();
        let a = g.adjacency();
        let n = g.n();
        let step = DMatrix::from_fn(n, n, |i, j| a[(i, j)] / d[i]);
        Ok(TransitionFamily {
            mode: Mode::Discrete,
            graph: g.clone(),
            pi,
            d_sqrt,
            spectrum: None,
            step: Some(step),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn graph(&self) -> &Graph<T> {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    /// Stationary distribution pi = d / 2w.
    pub fn stationary(&self) -> &DVector<T> {
        &self.pi
    }

    /// Spectrum of the normalized Laplacian (continuous mode only).
    pub fn spectrum(&self) -> Option<&Spectrum<T>> {
        self.spectrum.as_ref()
    }

    fn validate_time(&self, t: T) -> Result<u64> {
        if t < T::zero() {
            return Err(Error::NegativeTime(t.as_f64()));
        }
        match self.mode {
            Mode::Continuous => Ok(0),
            Mode::Discrete => {
                let rounded = t.round();
                if (t - rounded).abs() > T::cast(1e-9) {
                    return Err(Error::NonIntegerTime(t.as_f64()));
                }
                Ok(rounded.as_f64() as u64)
            }
        }
    }

    /// Row-stochastic transition matrix P(t): the heat kernel
    /// D^{-1/2} exp(-t L_N) D^{1/2} in continuous mode, the matrix power
    /// (D^{-1} A)^t in discrete mode (integer t).
    pub fn transition_matrix(&self, t: T) -> Result<DMatrix<T>> {
        let power = self.validate_time(t)?;
        match self.mode {
            Mode::Continuous => {
                let kernel = self.spectrum.as_ref().unwrap().heat_kernel(t);
                let n = self.n();
                Ok(DMatrix::from_fn(n, n, |i, j| {
                    kernel[(i, j)] * self.d_sqrt[j] / self.d_sqrt[i]
                }))
            }
            Mode::Discrete => Ok(matrix_power(self.step.as_ref().unwrap(), power)),
        }
    }

    /// Stationary autocovariance Pi P(t) - pi pi', symmetrized.
    pub fn autocovariance(&self, t: T) -> Result<DMatrix<T>> {
        let n = self.n();
        let m = match self.mode {
            Mode::Continuous => {
                // Pi P(t) = D^{1/2} exp(-t L_N) D^{1/2} / 2w, symmetric by
                // construction
                let kernel = self.spectrum.as_ref().unwrap().heat_kernel(t);
                let two_w: T = self.d_sqrt.iter().map(|x| *x * *x).sum();
                DMatrix::from_fn(n, n, |i, j| {
                    kernel[(i, j)] * self.d_sqrt[i] * self.d_sqrt[j] / two_w
                })
            }
            Mode::Discrete => {
                let p = self.transition_matrix(t)?;
                DMatrix::from_fn(n, n, |i, j| self.pi[i] * p[(i, j)])
            }
        };
        let mut cov = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let sym = (m[(i, j)] + m[(j, i)]) / T::cast(2.0);
                cov[(i, j)] = sym - self.pi[i] * self.pi[j];
            }
        }
        Ok(cov)
    }

    /// Autocovariance normalized by Bernoulli standard deviations:
    /// S^{-1/2} (Pi P(t) - pi pi') S^{-1/2} with S = Pi (I - Pi).
    pub fn corr_autocovariance(&self, t: T) -> Result<DMatrix<T>> {
        let cov = self.autocovariance(t)?;
        let n = self.n();
        let floor = T::cast(1e-15);
        let inv_sd = DVector::from_fn(n, |i, _| {
            let var = (self.pi[i] * (T::one() - self.pi[i])).max(floor);
            T::one() / var.sqrt()
        });
        Ok(DMatrix::from_fn(n, n, |i, j| {
            cov[(i, j)] * inv_sd[i] * inv_sd[j]
        }))
    }
}

fn walk_measures<T: Real>(g: &Graph<T>) -> Result<(DVector<T>, DVector<T>)> {
    if g.is_signed() {
        return Err(Error::SignedGraph {
            op: "transition_family",
        });
    }
    let d = g.degrees();
    for (i, &x) in d.iter().enumerate() {
        if x <= T::zero() {
            return Err(Error::ZeroDegree(g.node_names()[i].clone()));
        }
    }
    let two_w = d.sum();
    let pi = &d / two_w;
    let d_sqrt = d.map(|x| x.sqrt());
    Ok((pi, d_sqrt))
}

fn matrix_power<T: Real>(base: &DMatrix<T>, mut power: u64) -> DMatrix<T> {
    let n = base.nrows();
    let mut result = DMatrix::identity(n, n);
    let mut square = base.clone();
    while power > 0 {
        if power & 1 == 1 {
            result = &result * &square;
        }
        square = &square * &square;
        power >>= 1;
    }
    result
}

/// Score of a partition at Markov time `t` together with the clustered
/// autocovariance it was read from.
#[derive(Debug, Clone)]
pub struct StabilityScore<T: Real = f64> {
    pub t: T,
    pub r: T,
    /// k x k clustered autocovariance R(t, C).
    pub clustered: DMatrix<T>,
    pub variant: Variant,
}

fn check_partition<T: Real>(f: &TransitionFamily<T>, p: &Partition) -> Result<()> {
    if p.n() != f.n() {
        return Err(Error::PartitionMismatch {
            expected: f.n(),
            got: p.n(),
        });
    }
    Ok(())
}

/// Clustered autocovariance R(t, C) = C' (Pi P(t) - pi pi') C.
pub fn clustered_autocovariance<T: Real>(
    f: &TransitionFamily<T>,
    p: &Partition,
    t: T,
) -> Result<DMatrix<T>> {
    check_partition(f, p)?;
    let cov = f.autocovariance(t)?;
    let c = p.indicator_matrix::<T>();
    Ok(c.transpose() * cov * c)
}

/// Markov Stability r(t, C) = trace R(t, C).
pub fn markov_stability<T: Real>(
    f: &TransitionFamily<T>,
    p: &Partition,
    t: T,
) -> Result<StabilityScore<T>> {
    let clustered = clustered_autocovariance(f, p, t)?;
    Ok(StabilityScore {
        t,
        r: clustered.trace(),
        clustered,
        variant: Variant::Trace,
    })
}

/// Correlation variant: trace C' S^{-1/2} (Pi P(t) - pi pi') S^{-1/2} C.
pub fn correlation_stability<T: Real>(
    f: &TransitionFamily<T>,
    p: &Partition,
    t: T,
) -> Result<StabilityScore<T>> {
    check_partition(f, p)?;
    let cov = f.corr_autocovariance(t)?;
    let c = p.indicator_matrix::<T>();
    let clustered = c.transpose() * cov * c;
    Ok(StabilityScore {
        t,
        r: clustered.trace(),
        clustered,
        variant: Variant::Corr,
    })
}

/// Weakest-cell variant: min over the diagonal of (C' Pi C)^{-1} R(t, C).
pub fn r_min<T: Real>(
    f: &TransitionFamily<T>,
    p: &Partition,
    t: T,
) -> Result<StabilityScore<T>> {
    let clustered = clustered_autocovariance(f, p, t)?;
    let masses = cell_masses(f, p);
    let r = (0..p.k())
        .map(|i| clustered[(i, i)] / masses[i])
        .fold(T::cast(f64::INFINITY), |acc, x| acc.min(x));
    Ok(StabilityScore {
        t,
        r,
        clustered,
        variant: Variant::Min,
    })
}

/// Aggregated stationary masses pi_l = C' pi.
pub fn cell_masses<T: Real>(f: &TransitionFamily<T>, p: &Partition) -> DVector<T> {
    let mut masses = DVector::zeros(p.k());
    for (node, &cell) in p.assignments().iter().enumerate() {
        masses[cell] += f.stationary()[node];
    }
    masses
}

/// Lumped Markov chain U = diag(pi C)^{-1} C' Pi D^{-1} A C over the cells
/// of a partition; row-stochastic with stationary distribution pi_l = pi C.
pub fn lumped_markov<T: Real>(f: &TransitionFamily<T>, p: &Partition) -> Result<DMatrix<T>> {
    if f.mode != Mode::Discrete {
        return Err(Error::DiscreteOnly {
            op: "lumped_markov",
        });
    }
    check_partition(f, p)?;
    let step = f.step.as_ref().unwrap();
    let n = f.n();
    let k = p.k();
    let masses = cell_masses(f, p);
    let mut u = DMatrix::zeros(k, k);
    for i in 0..n {
        let ci = p.cell_of(i);
        for j in 0..n {
            u[(ci, p.cell_of(j))] += f.pi[i] * step[(i, j)];
        }
    }
    for row in 0..k {
        for col in 0..k {
            u[(row, col)] /= masses[row];
        }
    }
    Ok(u)
}

/// Alpha-partition report: per-cell retained flow U_ii, the pass verdict for
/// the requested alpha, and the r_min(1, C) guarantee check.
#[derive(Debug, Clone)]
pub struct AlphaReport<T: Real = f64> {
    pub passes: bool,
    /// Diagonal of the lumped chain, per cell.
    pub retained: Vec<T>,
    /// beta_1 = r_min(1, C).
    pub beta1: T,
    /// U_ii >= beta_1 + pi_{l,i} for every cell (holds identically).
    pub implication_holds: bool,
}

/// Checks min_i U_ii >= alpha and the lower bound implied by r_min(1, C).
pub fn alpha_check<T: Real>(
    f: &TransitionFamily<T>,
    p: &Partition,
    alpha: T,
) -> Result<AlphaReport<T>> {
    if alpha < T::zero() || alpha > T::one() {
        return Err(Error::InvalidAlpha(alpha.as_f64()));
    }
    let u = lumped_markov(f, p)?;
    let retained: Vec<T> = (0..p.k()).map(|i| u[(i, i)]).collect();
    // 1e-12 slack absorbs roundoff in cells with exact retention
    let slack = T::cast(1e-12);
    let passes = retained.iter().all(|&x| x + slack >= alpha);
    let beta1 = r_min(f, p, T::one())?.r;
    let masses = cell_masses(f, p);
    let implication_holds = (0..p.k()).all(|i| retained[i] + slack >= beta1 + masses[i]);
    Ok(AlphaReport {
        passes,
        retained,
        beta1,
        implication_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_edge_list;

    fn path3() -> Graph {
        parse_edge_list("a b\nb c\n").unwrap()
    }

    fn path4() -> Graph {
        // two edges joined by a bridge
        parse_edge_list("a b\nb c\nc d\n").unwrap()
    }

    #[test]
    fn transition_at_zero_is_identity() {
        let g = path3();
        for f in [
            TransitionFamily::continuous(&g).unwrap(),
            TransitionFamily::discrete(&g).unwrap(),
        ] {
            let p0 = f.transition_matrix(0.0).unwrap();
            assert!((&p0 - DMatrix::<f64>::identity(3, 3)).amax() < 1e-12);
        }
    }

    #[test]
    fn continuous_rows_reach_stationary() {
        let g: Graph = crate::datasets::karate();
        let f = TransitionFamily::continuous(&g).unwrap();
        let lambda2 = f.spectrum().unwrap().eigenvalue(1);
        let p = f.transition_matrix(50.0 / lambda2).unwrap();
        for i in 0..g.n() {
            for j in 0..g.n() {
                assert!((p[(i, j)] - f.stationary()[j]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn discrete_power_matches_hand_square() {
        let g = path3();
        let f = TransitionFamily::discrete(&g).unwrap();
        // D^{-1}A rows: a -> b; b -> (a+c)/2; c -> b
        let step = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 0.5, 0.0, 0.5, 0.0, 1.0, 0.0],
        );
        let squared = &step * &step;
        let p2 = f.transition_matrix(2.0).unwrap();
        assert!((&p2 - &squared).amax() < 1e-14);
        assert!(matches!(
            f.transition_matrix(1.5),
            Err(Error::NonIntegerTime(_))
        ));
        assert!(matches!(
            f.transition_matrix(-1.0),
            Err(Error::NegativeTime(_))
        ));
    }

    #[test]
    fn rows_stay_stochastic() {
        let g: Graph = crate::datasets::karate();
        for (f, t) in [
            (TransitionFamily::continuous(&g).unwrap(), 2.7),
            (TransitionFamily::discrete(&g).unwrap(), 3.0),
        ] {
            let p = f.transition_matrix(t).unwrap();
            for i in 0..g.n() {
                assert!((p.row(i).sum() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn all_in_one_scores_zero() {
        let g = path4();
        let p = Partition::all_in_one(4);
        for f in [
            TransitionFamily::continuous(&g).unwrap(),
            TransitionFamily::discrete(&g).unwrap(),
        ] {
            let t = if f.mode() == Mode::Continuous { 0.7 } else { 1.0 };
            let score = markov_stability(&f, &p, t).unwrap();
            assert!(score.r.abs() < 1e-12);
            assert!(score.clustered.amax() < 1e-12);
            let min = r_min(&f, &p, t).unwrap();
            assert!(min.r.abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_variant_decays_to_zero() {
        // the Bernoulli normalization makes the all-in-one score nonzero at
        // finite times (unlike the trace variant, whose matrix annihilates
        // the ones vector); the whole family still decays to zero
        let g = path4();
        let f = TransitionFamily::continuous(&g).unwrap();
        let p = Partition::all_in_one(4);
        let lambda2 = f.spectrum().unwrap().eigenvalue(1);
        let late = correlation_stability(&f, &p, 50.0 / lambda2).unwrap();
        assert!(late.r.abs() < 1e-8);
        let split = Partition::new(vec![0, 0, 1, 1]).unwrap();
        let late_split = correlation_stability(&f, &split, 50.0 / lambda2).unwrap();
        assert!(late_split.r.abs() < 1e-8);
    }

    #[test]
    fn singleton_partition_at_zero() {
        let g = path4();
        let f = TransitionFamily::continuous(&g).unwrap();
        let p = Partition::singletons(4);
        let score = markov_stability(&f, &p, 0.0).unwrap();
        let pi = f.stationary();
        // R(0) = Pi - pi pi'
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { pi[i] - pi[i] * pi[i] } else { -pi[i] * pi[j] };
                assert!((score.clustered[(i, j)] - expected).abs() < 1e-12);
            }
        }
        let expected_r = 1.0 - pi.iter().map(|x| x * x).sum::<f64>();
        assert!((score.r - expected_r).abs() < 1e-12);
    }

    #[test]
    fn two_cliques_r_min_closed_form() {
        let g: Graph = parse_edge_list("a b\nb c\na c\nx y\ny z\nz w\nw x\nx z\n")
            .unwrap();
        // two disconnected groups: a triangle and a denser 4-cycle-with-chord
        let p = Partition::new(vec![0, 0, 0, 1, 1, 1, 1]).unwrap();
        let f = TransitionFamily::discrete(&g).unwrap();
        let masses = cell_masses(&f, &p);
        let max_mass = masses.iter().fold(0.0f64, |a, &b| a.max(b));
        for t in [1.0, 2.0, 5.0] {
            let score = r_min(&f, &p, t).unwrap();
            assert!(
                (score.r - (1.0 - max_mass)).abs() < 1e-12,
                "t={t}: {} vs {}",
                score.r,
                1.0 - max_mass
            );
        }
    }

    #[test]
    fn lumped_chain_examples() {
        let g = path4();
        let f = TransitionFamily::discrete(&g).unwrap();

        let singles = Partition::singletons(4);
        let u = lumped_markov(&f, &singles).unwrap();
        let step = f.transition_matrix(1.0).unwrap();
        assert!((&u - &step).amax() < 1e-12);

        let whole = Partition::all_in_one(4);
        let u1 = lumped_markov(&f, &whole).unwrap();
        assert!((u1[(0, 0)] - 1.0).abs() < 1e-12);

        let split = Partition::new(vec![0, 0, 1, 1]).unwrap();
        let u2 = lumped_markov(&f, &split).unwrap();
        let expected =
            DMatrix::from_row_slice(2, 2, &[2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert!((&u2 - &expected).amax() < 1e-12);

        // stationarity of the lumped chain: pi_l U = pi_l
        let masses = cell_masses(&f, &split);
        let lhs = u2.transpose() * &masses;
        assert!((&lhs - &masses).amax() < 1e-10);

        let cont = TransitionFamily::continuous(&g).unwrap();
        assert!(matches!(
            lumped_markov(&cont, &split),
            Err(Error::DiscreteOnly { .. })
        ));
    }

    #[test]
    fn alpha_check_on_disconnected_cliques() {
        let g: Graph = parse_edge_list("a b\nb c\na c\nx y\ny z\nx z\n").unwrap();
        let p = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let f = TransitionFamily::discrete(&g).unwrap();
        let report = alpha_check(&f, &p, 1.0).unwrap();
        assert!(report.passes);
        for &u in &report.retained {
            assert!((u - 1.0).abs() < 1e-12);
        }
        assert!(report.implication_holds);
        assert!(matches!(
            alpha_check(&f, &p, 1.5),
            Err(Error::InvalidAlpha(_))
        ));
    }

    #[test]
    fn relabeling_cells_permutes_but_preserves_scores() {
        let g: Graph = crate::datasets::karate();
        let f = TransitionFamily::continuous(&g).unwrap();
        let p = crate::datasets::karate_factions();
        let swapped =
            Partition::new(p.assignments().iter().map(|&c| 1 - c).collect()).unwrap();
        for make in [markov_stability, correlation_stability, r_min] {
            let a = make(&f, &p, 1.3).unwrap();
            let b = make(&f, &swapped, 1.3).unwrap();
            assert!((a.r - b.r).abs() < 1e-12);
        }
    }

    #[test]
    fn merging_two_cells_changes_trace_by_off_diagonal_mass() {
        let g: Graph = crate::datasets::karate();
        let f = TransitionFamily::continuous(&g).unwrap();
        let p = Partition::new(
            (0..34).map(|i| i % 3).collect::<Vec<_>>(),
        )
        .unwrap();
        let t = 0.8;
        let score = markov_stability(&f, &p, t).unwrap();
        let merged = p.merge_cells(0, 2);
        let merged_score = markov_stability(&f, &merged, t).unwrap();
        let predicted = score.r + 2.0 * score.clustered[(0, 2)];
        assert!((merged_score.r - predicted).abs() < 1e-12);
    }

    #[test]
    fn signed_or_isolated_graphs_rejected() {
        let signed: Graph = parse_edge_list("a b -1\n").unwrap();
        assert!(matches!(
            TransitionFamily::<f64>::continuous(&signed),
            Err(Error::SignedGraph { .. })
        ));
        let isolated: Graph = parse_edge_list("a\nb c\n").unwrap();
        assert!(matches!(
            TransitionFamily::<f64>::discrete(&isolated),
            Err(Error::ZeroDegree(_))
        ));
    }
}
