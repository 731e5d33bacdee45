//! Dense symmetric eigendecomposition, time-scale extraction and
//! partition/subspace alignment diagnostics.
//!
//! The solver is the classic two-stage dense algorithm: Householder reduction
//! to tridiagonal form followed by the implicitly shifted QL iteration, with
//! accumulated orthogonal transformations (EISPACK tred2/tql2 lineage).
//! Deterministic output order and eigenvector signs make it suitable for
//! golden tests.

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::real::Real;
use nalgebra::{DMatrix, DVector};

const MAX_QL_ITERATIONS: usize = 64;

/// Eigendecomposition of a symmetric operator: eigenvalues ascending, column
/// `i` of `eigenvectors` paired with `eigenvalues[i]`, orthonormal basis.
#[derive(Debug, Clone)]
pub struct Spectrum<T: Real = f64> {
    eigenvalues: DVector<T>,
    eigenvectors: DMatrix<T>,
    scale: T,
}

impl<T: Real> Spectrum<T> {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &DVector<T> {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, i: usize) -> T {
        self.eigenvalues[i]
    }

    pub fn eigenvectors(&self) -> &DMatrix<T> {
        &self.eigenvectors
    }

    /// V diag(lambda) V'.
    pub fn reconstruct(&self) -> DMatrix<T> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (i, mut col) in scaled.column_iter_mut().enumerate() {
            col *= self.eigenvalues[i];
        }
        scaled * v.transpose()
    }

    /// Threshold below which an eigenvalue counts as zero:
    /// 1e-12 * n * max |entry| of the decomposed operator.
    pub fn zero_threshold(&self) -> T {
        T::cast(1e-12) * T::from_count(self.n()) * self.scale.max(T::one())
    }

    /// Multiplicity of the zero eigenvalue under [`Self::zero_threshold`].
    pub fn zero_multiplicity(&self) -> usize {
        let tol = self.zero_threshold();
        self.eigenvalues.iter().filter(|l| l.abs() <= tol).count()
    }

    /// Smallest eigenvalue above the zero threshold, if any.
    pub fn smallest_nonzero(&self) -> Option<T> {
        let tol = self.zero_threshold();
        self.eigenvalues.iter().copied().find(|l| *l > tol)
    }

    /// Applies exp(-M t) to `x` through the spectral basis.
    pub fn propagate(&self, x: &DVector<T>, t: T) -> DVector<T> {
        let coeffs = self.eigenvectors.transpose() * x;
        let damped = DVector::from_fn(self.n(), |i, _| {
            coeffs[i] * (-self.eigenvalues[i] * t).exp()
        });
        &self.eigenvectors * damped
    }

    /// Dense heat kernel exp(-M t) = V exp(-Lambda t) V'.
    pub fn heat_kernel(&self, t: T) -> DMatrix<T> {
        let mut scaled = self.eigenvectors.clone();
        for (i, mut col) in scaled.column_iter_mut().enumerate() {
            col *= (-self.eigenvalues[i] * t).exp();
        }
        scaled * self.eigenvectors.transpose()
    }
}

/// Decomposes a symmetric matrix; rejects asymmetric input.
///
/// Sign convention: the first component of each eigenvector whose magnitude
/// exceeds sqrt(machine epsilon) times the max component is made positive.
pub fn decompose<T: Real>(m: &DMatrix<T>) -> Result<Spectrum<T>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "decompose requires a square matrix");
    let mut asym = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    let tol = T::cast(1e-10).max(T::default_epsilon() * T::cast(100.0));
    if asym > tol {
        return Err(Error::NotSymmetric(asym.as_f64()));
    }

    let scale = m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let mut v = m.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    sort_ascending(&mut v, &mut d);
    fix_signs(&mut v);

    Ok(Spectrum {
        eigenvalues: DVector::from_vec(d),
        eigenvectors: v,
        scale,
    })
}

fn hypot<T: Real>(a: T, b: T) -> T {
    let a = a.abs();
    let b = b.abs();
    if a > b {
        let r = b / a;
        a * (T::one() + r * r).sqrt()
    } else if b > T::zero() {
        let r = a / b;
        b * (T::one() + r * r).sqrt()
    } else {
        T::zero()
    }
}

/// Householder reduction of the symmetric matrix in `v` to tridiagonal form;
/// on exit `d` holds the diagonal, `e` the subdiagonal, and `v` the
/// accumulated orthogonal transformation.
fn tred2<T: Real>(v: &mut DMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }

    for i in (1..n).rev() {
        // scale to avoid under/overflow
        let mut scale = T::zero();
        let mut h = T::zero();
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            // generate the Householder vector
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = T::zero();
            }

            // apply the similarity transformation to the remaining columns
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let delta = f * e[k] + g * d[k];
                    v[(k, j)] -= delta;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..(n - 1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let delta = g * d[k];
                    v[(k, j)] -= delta;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// Implicitly shifted QL iteration on the tridiagonal form, accumulating the
/// rotations into `v`.
fn tql2<T: Real>(v: &mut DMatrix<T>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::default_epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::EigenFailed(MAX_QL_ITERATIONS));
                }

                // implicit shift
                let mut g = d[l];
                let two = T::cast(2.0);
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = hypot(p, T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // implicit QL sweep
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    for k in 0..n {
                        h = v[(k, i + 1)];
                        v[(k, i + 1)] = s * v[(k, i)] + c * h;
                        v[(k, i)] = c * v[(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

fn sort_ascending<T: Real>(v: &mut DMatrix<T>, d: &mut [T]) {
    let n = d.len();
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in (i + 1)..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            v.swap_columns(i, k);
        }
    }
}

fn fix_signs<T: Real>(v: &mut DMatrix<T>) {
    let thresh_factor = T::default_epsilon().sqrt();
    for mut col in v.column_iter_mut() {
        let max = col.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
        let thresh = thresh_factor * max;
        for i in 0..col.len() {
            if col[i].abs() > thresh {
                if col[i] < T::zero() {
                    col.neg_mut();
                }
                break;
            }
        }
    }
}

/// Characteristic time scales and the dominant spectral gap of a PSD operator.
#[derive(Debug, Clone)]
pub struct TimescaleReport<T: Real = f64> {
    /// tau_i = 1 / lambda_i (infinite on the kernel), non-increasing.
    pub timescales: Vec<T>,
    /// One-based index k maximizing the relative gap lambda_{k+1}/lambda_k,
    /// i.e. the number of slow modes.
    pub gap_index: usize,
    /// lambda_{k+1}/lambda_k at the gap (infinite when lambda_k sits in the
    /// kernel and lambda_{k+1} does not).
    pub gap_ratio: T,
}

/// Scans eigenvalue ratios `lambda_{i+1}/lambda_i` for one-based `i` in
/// `2..=k_max`. An eigenvalue below 1e-12 is treated as zero: a ratio out of
/// the kernel counts as infinite, and ratios inside the kernel are skipped.
/// Ties break toward smaller `i`.
pub fn timescale_report<T: Real>(s: &Spectrum<T>, k_max: usize) -> Result<TimescaleReport<T>> {
    let n = s.n();
    let zero_tol = T::cast(1e-12);
    let lam = s.eigenvalues();

    let timescales: Vec<T> = lam
        .iter()
        .map(|&l| {
            if l < zero_tol {
                T::cast(f64::INFINITY)
            } else {
                T::one() / l
            }
        })
        .collect();

    let top = k_max.min(n - 1).max(1);
    let mut best: Option<(usize, T)> = None;
    for i in 2..=top {
        let lo = lam[i - 1];
        let hi = lam[i];
        let ratio = if lo < zero_tol {
            if hi < zero_tol {
                continue;
            }
            T::cast(f64::INFINITY)
        } else {
            hi / lo
        };
        if best.map_or(true, |(_, b)| ratio > b) {
            best = Some((i, ratio));
        }
    }
    match best {
        Some((gap_index, gap_ratio)) => Ok(TimescaleReport {
            timescales,
            gap_index,
            gap_ratio,
        }),
        None => Err(Error::AllZeroEigenvalues),
    }
}

/// Largest principal angle (radians) between the span of the partition
/// indicator vectors and the span of the `k` leading eigenvectors.
///
/// Indicator columns are orthogonal, so normalizing them gives an orthonormal
/// basis Q_C directly; the principal cosines are the singular values of
/// V_k' Q_C, obtained here from the symmetric eigenvalues of its Gram matrix.
pub fn subspace_alignment<T: Real>(s: &Spectrum<T>, p: &Partition, k: usize) -> Result<T> {
    if k != p.k() {
        return Err(Error::KMismatch {
            expected: k,
            got: p.k(),
        });
    }
    if p.n() != s.n() {
        return Err(Error::PartitionMismatch {
            expected: s.n(),
            got: p.n(),
        });
    }
    let mut q = p.indicator_matrix::<T>();
    for (j, size) in p.cell_sizes().iter().enumerate() {
        let norm = T::from_count(*size).sqrt();
        for i in 0..p.n() {
            q[(i, j)] /= norm;
        }
    }
    let vk = s.eigenvectors().columns(0, k);
    let w = vk.transpose() * q;
    let gram = w.transpose() * &w;
    let gram_spectrum = decompose(&gram)?;
    let min_cos_sq = gram_spectrum.eigenvalue(0).max(T::zero());
    let sigma_min = min_cos_sq.sqrt().min(T::one());
    Ok(sigma_min.acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_edge_list;

    #[test]
    fn two_node_edge() {
        let g: crate::Graph = parse_edge_list("a b\n").unwrap();
        let s = decompose(&g.combinatorial_laplacian().unwrap()).unwrap();
        assert!((s.eigenvalue(0) - 0.0).abs() < 1e-12);
        assert!((s.eigenvalue(1) - 2.0).abs() < 1e-12);
        // kernel vector proportional to the ones vector
        let v0 = s.eigenvectors().column(0);
        assert!((v0[0] - v0[1]).abs() < 1e-12);
        assert!(v0[0] > 0.0);
    }

    #[test]
    fn disconnected_zero_multiplicity() {
        let g: crate::Graph = parse_edge_list("a b\nc d\n").unwrap();
        let s = decompose(&g.combinatorial_laplacian().unwrap()).unwrap();
        assert_eq!(s.zero_multiplicity(), 2);
    }

    #[test]
    fn star_normalized_spectrum() {
        // K_{1,3}: normalized Laplacian spectrum {0, 1, 1, 2}
        let g: crate::Graph = parse_edge_list("c a\nc b\nc d\n").unwrap();
        let s = decompose(&g.normalized_laplacian().unwrap()).unwrap();
        let expected = [0.0, 1.0, 1.0, 2.0];
        for (i, &l) in expected.iter().enumerate() {
            assert!((s.eigenvalue(i) - l).abs() < 1e-10, "lambda_{i}");
        }
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let g: crate::Graph = crate::datasets::karate();
        let l = g.combinatorial_laplacian().unwrap();
        let s = decompose(&l).unwrap();
        let err = (&l - s.reconstruct()).amax();
        assert!(err <= 1e-8 * l.amax(), "reconstruction error {err}");
        let vtv = s.eigenvectors().transpose() * s.eigenvectors();
        let id_err = (&vtv - DMatrix::<f64>::identity(34, 34)).amax();
        assert!(id_err < 1e-8, "orthonormality error {id_err}");
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(decompose(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn complete_graph_has_flat_ratios() {
        let mut text = String::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                text.push_str(&format!("n{i} n{j}\n"));
            }
        }
        let g: crate::Graph = parse_edge_list(&text).unwrap();
        let s = decompose(&g.combinatorial_laplacian().unwrap()).unwrap();
        let report = timescale_report(&s, 4).unwrap();
        assert_eq!(report.gap_index, 2);
        assert!((report.gap_ratio - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_cliques_gap_after_kernel() {
        let g: crate::Graph =
            parse_edge_list("a b\nb c\na c\nx y\ny z\nx z\n").unwrap();
        let s = decompose(&g.combinatorial_laplacian().unwrap()).unwrap();
        let report = timescale_report(&s, 5).unwrap();
        assert_eq!(report.gap_index, 2);
        assert!(report.gap_ratio.is_infinite());
        assert!(report.timescales[0].is_infinite());
        assert!(report.timescales[1].is_infinite());
        assert!(!report.timescales[2].is_infinite());
    }

    #[test]
    fn alignment_zero_for_component_indicators() {
        let g: crate::Graph =
            parse_edge_list("a b\nb c\na c\nx y\ny z\nx z\n").unwrap();
        let s = decompose(&g.combinatorial_laplacian().unwrap()).unwrap();
        let p = Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let angle = subspace_alignment(&s, &p, 2).unwrap();
        assert!(angle < 1e-8, "angle {angle}");
    }

    #[test]
    fn alignment_invariant_under_relabeling() {
        let g: crate::Graph = crate::datasets::karate();
        let s = decompose(&g.combinatorial_laplacian().unwrap()).unwrap();
        let p = crate::datasets::karate_factions();
        let swapped =
            Partition::new(p.assignments().iter().map(|&c| 1 - c).collect()).unwrap();
        let a = subspace_alignment(&s, &p, 2).unwrap();
        let b = subspace_alignment(&s, &swapped, 2).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn kernel_vector_of_normalized_laplacian() {
        let g: crate::Graph = crate::datasets::karate();
        let s = decompose(&g.normalized_laplacian().unwrap()).unwrap();
        // v1 proportional to D^{1/2} 1
        let d = g.degrees();
        let mut expected = DVector::from_fn(g.n(), |i, _| d[i].sqrt());
        expected /= expected.norm();
        let v0 = s.eigenvectors().column(0);
        let dot = v0.dot(&expected).abs();
        assert!((dot - 1.0).abs() < 1e-8);
    }
}
