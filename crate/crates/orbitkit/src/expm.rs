//! Dense matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant.

use nalgebra::DMatrix;

use crate::{real, Real};

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

/// Largest 1-norm for which the degree-13 approximant alone meets double
/// precision; above it the argument is halved until it fits.
const THETA13: f64 = 5.371920351148152;

fn one_norm<T: Real>(m: &DMatrix<T>) -> T {
    let mut worst = T::zero();
    for j in 0..m.ncols() {
        let mut s = T::zero();
        for i in 0..m.nrows() {
            s += m[(i, j)].abs();
        }
        if s > worst {
            worst = s;
        }
    }
    worst
}

/// `exp(A)` for a square matrix. The zero matrix maps to the identity
/// exactly.
pub fn expm<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix exponential needs a square matrix");
    let norm = one_norm(a);
    if norm == T::zero() {
        return DMatrix::identity(n, n);
    }

    let theta: T = real(THETA13);
    let squarings = if norm > theta {
        let ratio = (norm / theta).to_f64().unwrap_or(f64::INFINITY);
        ratio.log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = T::from_f64((squarings as f64).exp2()).expect("power of two fits the scalar type");
    let a = a / scale;

    let b: Vec<T> = PADE13.iter().map(|&v| real(v)).collect();
    let ident = DMatrix::<T>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];

    let numerator = &v + &u;
    let denominator = &v - &u;
    let mut result = denominator
        .lu()
        .solve(&numerator)
        .expect("Pade denominator of the scaled matrix is nonsingular");

    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_matrix_gives_exact_identity() {
        let z = DMatrix::<f64>::zeros(4, 4);
        assert_eq!(expm(&z), DMatrix::identity(4, 4));
    }

    #[test]
    fn diagonal_matrix_exponentiates_entrywise() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5]));
        let e = expm(&d);
        for (i, &lam) in [1.0f64, -2.0, 0.5].iter().enumerate() {
            assert_relative_eq!(e[(i, i)], lam.exp(), max_relative = 1e-14);
        }
    }

    #[test]
    fn rotation_generator_gives_rotation_matrix() {
        let theta = 1.234_f64;
        let g = DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
        let e = expm(&g);
        assert_relative_eq!(e[(0, 0)], theta.cos(), epsilon = 1e-14);
        assert_relative_eq!(e[(1, 0)], theta.sin(), epsilon = 1e-14);
    }

    #[test]
    fn large_norm_triggers_squaring_and_stays_accurate() {
        // Nilpotent: exp is the exact cubic polynomial in the matrix.
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 40.0, 10.0, 0.0, 0.0, 25.0, 0.0, 0.0, 0.0]);
        let e = expm(&m);
        let expected = DMatrix::identity(3, 3) + &m + (&m * &m) * 0.5;
        assert_relative_eq!(e, expected, max_relative = 1e-12);
    }

    #[test]
    fn inverse_matches_negated_argument() {
        let m = DMatrix::from_row_slice(3, 3, &[
            0.2, -1.5, 0.7,
            0.3, 0.1, -0.9,
            -0.4, 0.8, 0.05,
        ]);
        let prod = expm(&m) * expm(&(-&m));
        assert_relative_eq!(prod, DMatrix::identity(3, 3), epsilon = 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let g = DMatrix::<f32>::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let e = expm(&g);
        assert!((e[(0, 0)] - 1.0f32.cos()).abs() < 1e-6);
    }
}
