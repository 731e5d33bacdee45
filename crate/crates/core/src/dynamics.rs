//! Simulation of consensus, diffusion and signed consensus on a fixed graph.
//!
//! Propagators are evaluated through the symmetric eigendecomposition of the
//! relevant Laplacian, which is exact up to eigensolver accuracy and needs no
//! step-size tuning. A fixed-step RK4 integrator is provided as an
//! independent reference for validating the spectral route.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::real::Real;
use crate::spectral::{decompose, Spectrum};
use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    Consensus,
    Walk,
    Signed,
}

/// Sampled states of a simulated dynamics: one row per sample time.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Real = f64> {
    times: Vec<T>,
    states: DMatrix<T>,
    kind: TrajectoryKind,
}

impl<T: Real> Trajectory<T> {
    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &DMatrix<T> {
        &self.states
    }

    pub fn kind(&self) -> TrajectoryKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state_at(&self, sample: usize) -> DVector<T> {
        self.states.row(sample).transpose()
    }

    pub fn final_state(&self) -> DVector<T> {
        self.state_at(self.len() - 1)
    }
}

/// Constant exogenous input vector; zero when absent.
#[derive(Debug, Clone)]
pub struct InputSpec<T: Real = f64> {
    u: DVector<T>,
}

impl<T: Real> InputSpec<T> {
    pub fn zero(n: usize) -> Self {
        InputSpec {
            u: DVector::zeros(n),
        }
    }

    pub fn constant(u: DVector<T>) -> Result<Self> {
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution(
                "input entries must be finite".into(),
            ));
        }
        Ok(InputSpec { u })
    }

    /// Zero everywhere except the listed `(node, value)` entries.
    pub fn from_entries(n: usize, entries: &[(usize, T)]) -> Result<Self> {
        let mut u = DVector::zeros(n);
        for &(i, v) in entries {
            u[i] = v;
        }
        InputSpec::constant(u)
    }

    pub fn vector(&self) -> &DVector<T> {
        &self.u
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().all(|x| *x == T::zero())
    }
}

fn validate_times<T: Real>(times: &[T]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::TimeGrid("empty time grid".into()));
    }
    if times[0] < T::zero() {
        return Err(Error::TimeGrid("sample times must be non-negative".into()));
    }
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::TimeGrid(format!(
                "times must be strictly increasing ({} then {})",
                w[0].as_f64(),
                w[1].as_f64()
            )));
        }
    }
    Ok(())
}

/// phi(lambda, t) = (1 - e^{-lambda t}) / lambda, the integrated decay factor,
/// with phi(0, t) = t. A series branch avoids cancellation for |lambda t| small.
fn phi<T: Real>(lambda: T, t: T) -> T {
    let x = lambda * t;
    if x.abs() < T::cast(1e-6) {
        // t (1 - x/2 + x^2/6 - x^3/24)
        let half = T::cast(0.5);
        let sixth = T::cast(1.0 / 6.0);
        let tf = T::cast(1.0 / 24.0);
        t * (T::one() - x * half + x * x * sixth - x * x * x * tf)
    } else {
        (T::one() - (-x).exp()) / lambda
    }
}

fn spectral_consensus_rows<T: Real>(
    spectrum: &Spectrum<T>,
    x0: &DVector<T>,
    u: &DVector<T>,
    times: &[T],
) -> DMatrix<T> {
    let n = spectrum.n();
    let vt = spectrum.eigenvectors().transpose();
    let a = &vt * x0;
    let b = &vt * u;
    let mut states = DMatrix::zeros(times.len(), n);
    for (row, &t) in times.iter().enumerate() {
        let coeff = DVector::from_fn(n, |i, _| {
            let lam = spectrum.eigenvalue(i);
            a[i] * (-lam * t).exp() + b[i] * phi(lam, t)
        });
        let x = spectrum.eigenvectors() * coeff;
        states.row_mut(row).copy_from(&x.transpose());
    }
    states
}

/// Consensus dynamics dx/dt = -L x + u evaluated spectrally.
pub fn simulate_consensus<T: Real>(
    g: &Graph<T>,
    x0: &DVector<T>,
    times: &[T],
    input: &InputSpec<T>,
) -> Result<Trajectory<T>> {
    if !g.is_connected() {
        return Err(Error::Disconnected {
            op: "simulate_consensus",
        });
    }
    validate_times(times)?;
    let l = g.combinatorial_laplacian()?;
    let spectrum = decompose(&l)?;
    let states = spectral_consensus_rows(&spectrum, x0, input.vector(), times);
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        kind: TrajectoryKind::Consensus,
    })
}

/// Unbiased random walk dp'/dt = -p' L_RW, computed through the symmetrized
/// propagator exp(-t L_N) conjugated by D^{1/2}.
pub fn simulate_random_walk<T: Real>(
    g: &Graph<T>,
    p0: &DVector<T>,
    times: &[T],
) -> Result<Trajectory<T>> {
    if g.is_signed() {
        return Err(Error::SignedGraph {
            op: "simulate_random_walk",
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected {
            op: "simulate_random_walk",
        });
    }
    validate_times(times)?;
    let tol = T::cast(1e-9);
    if p0.iter().any(|x| *x < -T::cast(1e-12)) || (p0.sum() - T::one()).abs() > tol {
        return Err(Error::InvalidDistribution(
            "p0 must be non-negative and sum to 1".into(),
        ));
    }

    let spectrum = decompose(&g.normalized_laplacian()?)?;
    let d = g.degrees();
    let d_sqrt = d.map(|x| x.sqrt());
    let n = g.n();
    // q0 = V' D^{-1/2} p0; p(t) = D^{1/2} V e^{-lambda t} q0
    let weighted = DVector::from_fn(n, |i, _| p0[i] / d_sqrt[i]);
    let q0 = spectrum.eigenvectors().transpose() * weighted;
    let mut states = DMatrix::zeros(times.len(), n);
    for (row, &t) in times.iter().enumerate() {
        let coeff = DVector::from_fn(n, |i, _| q0[i] * (-spectrum.eigenvalue(i) * t).exp());
        let p = spectrum.eigenvectors() * coeff;
        for col in 0..n {
            states[(row, col)] = p[col] * d_sqrt[col];
        }
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        kind: TrajectoryKind::Walk,
    })
}

/// Signed consensus dx/dt = -L_S x via the spectrum of the signed Laplacian.
pub fn simulate_signed_consensus<T: Real>(
    g: &Graph<T>,
    x0: &DVector<T>,
    times: &[T],
) -> Result<Trajectory<T>> {
    if !g.is_connected() {
        return Err(Error::Disconnected {
            op: "simulate_signed_consensus",
        });
    }
    validate_times(times)?;
    let spectrum = decompose(&g.signed_laplacian())?;
    let zero = DVector::zeros(g.n());
    let states = spectral_consensus_rows(&spectrum, x0, &zero, times);
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        kind: TrajectoryKind::Signed,
    })
}

/// Fixed-step RK4 integration of dx/dt = M x + u, sampling at `times`.
///
/// The step is capped at `0.1 / max_row_sum(|M|)`, a Gershgorin bound on the
/// spectral radius, so the reference stays independent of the eigensolver.
pub fn integrate_linear<T: Real>(
    m: &DMatrix<T>,
    x0: &DVector<T>,
    times: &[T],
    u: &DVector<T>,
    dt: Option<T>,
) -> Result<DMatrix<T>> {
    validate_times(times)?;
    let n = m.nrows();
    let radius_bound = (0..n)
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<T>())
        .fold(T::zero(), |acc: T, x| acc.max(x));
    let h_max = T::cast(0.1) / radius_bound.max(T::cast(1e-12));
    let h_target = match dt {
        Some(h) => {
            if h > h_max || h <= T::zero() {
                return Err(Error::StepSize {
                    dt: h.as_f64(),
                    max: h_max.as_f64(),
                });
            }
            h
        }
        None => h_max,
    };

    let deriv = |x: &DVector<T>| m * x + u;
    let mut x = x0.clone();
    let mut t_prev = T::zero();
    let mut states = DMatrix::zeros(times.len(), n);
    for (row, &t_next) in times.iter().enumerate() {
        let span = t_next - t_prev;
        if span > T::zero() {
            let steps = (span / h_target).as_f64().ceil().max(1.0) as usize;
            let h = span / T::from_count(steps);
            let half = T::cast(0.5);
            let sixth = T::cast(1.0 / 6.0);
            let two = T::cast(2.0);
            for _ in 0..steps {
                let k1 = deriv(&x);
                let k2 = deriv(&(&x + &k1 * (h * half)));
                let k3 = deriv(&(&x + &k2 * (h * half)));
                let k4 = deriv(&(&x + &k3 * h));
                x += (k1 + k2 * two + k3 * two + k4) * (h * sixth);
            }
        }
        states.row_mut(row).copy_from(&x.transpose());
        t_prev = t_next;
    }
    Ok(states)
}

/// RK4 reference for the consensus equation dx/dt = -L x + u.
pub fn integrate_reference<T: Real>(
    g: &Graph<T>,
    x0: &DVector<T>,
    times: &[T],
    input: &InputSpec<T>,
    dt: Option<T>,
) -> Result<Trajectory<T>> {
    let l = g.combinatorial_laplacian()?;
    let states = integrate_linear(&(-l), x0, times, input.vector(), dt)?;
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        kind: TrajectoryKind::Consensus,
    })
}

pub(crate) fn trajectory_from_parts<T: Real>(
    times: Vec<T>,
    states: DMatrix<T>,
    kind: TrajectoryKind,
) -> Trajectory<T> {
    Trajectory {
        times,
        states,
        kind,
    }
}

/// Logarithmic sample grid covering `[1e-2 / lambda_max, 10 / lambda_2]`.
pub fn log_time_grid<T: Real>(lambda_max: T, lambda_2: T, points_per_decade: usize) -> Vec<T> {
    let lo = (T::cast(1e-2) / lambda_max).as_f64().log10();
    let hi = (T::cast(10.0) / lambda_2).as_f64().log10();
    let decades = (hi - lo).max(0.0);
    let count = ((decades * points_per_decade as f64).ceil() as usize).max(2);
    log_grid(lo, hi, count)
}

/// `count` log-spaced points between `10^lo_exp` and `10^hi_exp`.
pub fn log_grid<T: Real>(lo_exp: f64, hi_exp: f64, count: usize) -> Vec<T> {
    let count = count.max(2);
    (0..count)
        .map(|i| {
            let frac = i as f64 / (count - 1) as f64;
            T::cast(10f64.powf(lo_exp + frac * (hi_exp - lo_exp)))
        })
        .collect()
}
