//! Dense matrix exponential by scaling-and-squaring with a Padé(13)
//! approximant, the propagator used for asymmetric quotient Laplacians.

use crate::real::Real;
use nalgebra::DMatrix;

// Padé(13) coefficients (Higham 2005 lineage).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn one_norm<T: Real>(a: &DMatrix<T>) -> T {
    let mut best = T::zero();
    for col in a.column_iter() {
        let sum: T = col.iter().map(|x| x.abs()).sum();
        best = best.max(sum);
    }
    best
}

/// exp(A) for a square real matrix.
pub fn expm<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }

    let norm = one_norm(a).as_f64();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = T::cast(0.5f64.powi(squarings as i32));
    let a_scaled = a * scale;

    let b: Vec<T> = PADE13.iter().map(|&c| T::cast(c)).collect();
    let id = DMatrix::<T>::identity(n, n);
    let a2 = &a_scaled * &a_scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a_scaled * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];

    let denom = &v - &u;
    let numer = &v + &u;
    let mut x = denom
        .lu()
        .solve(&numer)
        .expect("Pade denominator is nonsingular for a scaled matrix");

    for _ in 0..squarings {
        x = &x * &x;
    }
    x
}
