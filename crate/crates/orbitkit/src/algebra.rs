//! Real Lie algebras given by structure constants: brackets, adjoint
//! operators, Jacobi residuals, Killing forms, and adjoint one-parameter
//! groups.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expm;
use crate::products::ScalarProduct;
use crate::{real, Real};

/// Coordinate vector of an algebra element in the basis of its owning
/// [`LieAlgebra`].
pub type Element<T> = DVector<T>;

/// Matrix of `ad_w = [w, .]` in the algebra basis: `M * u = [w, u]`.
pub type AdMatrix<T> = DMatrix<T>;

/// Matrix of `Ad(exp(t v))` acting on the algebra, together with the
/// generator and time that produced it.
///
/// At `t = 0` the matrix is the identity, and for all `x`, `y` it satisfies
/// the homomorphism identity `Ad(exp(tv))[x,y] = [Ad(exp(tv))x, Ad(exp(tv))y]`
/// up to roundoff.
#[derive(Clone, Debug)]
pub struct AdjointMatrix<T: Real> {
    pub matrix: DMatrix<T>,
    pub generator: Element<T>,
    pub time: T,
}

/// A finite-dimensional real Lie algebra described by structure constants
/// `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
///
/// Antisymmetry `c[i][j][k] = -c[j][i][k]` is enforced exactly at
/// construction; the Jacobi identity is checked to a tolerance (default
/// `1e-10`) unless explicitly disabled for deliberately broken test tables.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra<T: Real> {
    name: Option<String>,
    dim: usize,
    basis_labels: Vec<String>,
    c: Vec<Vec<Vec<T>>>,
}

impl<T: Real> LieAlgebra<T> {
    /// Builds an algebra, enforcing exact antisymmetry and a Jacobi residual
    /// of at most `1e-10`.
    pub fn new(
        name: Option<&str>,
        basis_labels: Vec<String>,
        structure_constants: Vec<Vec<Vec<T>>>,
    ) -> Result<Self> {
        Self::with_jacobi_tolerance(
            name,
            basis_labels,
            structure_constants,
            Some(real(1e-10)),
        )
    }

    /// Builds an algebra with an explicit Jacobi tolerance; `None` skips the
    /// Jacobi check so tests can construct deliberately inconsistent tables.
    /// Antisymmetry is enforced unconditionally.
    pub fn with_jacobi_tolerance(
        name: Option<&str>,
        basis_labels: Vec<String>,
        structure_constants: Vec<Vec<Vec<T>>>,
        jacobi_tol: Option<T>,
    ) -> Result<Self> {
        let n = basis_labels.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if structure_constants.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: structure_constants.len() });
        }
        for plane in &structure_constants {
            if plane.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: plane.len() });
            }
            for row in plane {
                if row.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: row.len() });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let sum = structure_constants[i][j][k] + structure_constants[j][i][k];
                    if sum != T::zero() {
                        return Err(Error::Antisymmetry { i, j, k });
                    }
                }
            }
        }
        let alg = LieAlgebra {
            name: name.map(str::to_owned),
            dim: n,
            basis_labels,
            c: structure_constants,
        };
        if let Some(tol) = jacobi_tol {
            let residual = alg.jacobi_residual();
            if residual > tol {
                return Err(Error::JacobiViolation {
                    residual: residual.to_f64().unwrap_or(f64::NAN),
                    tol: tol.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn structure_constants(&self) -> &Vec<Vec<Vec<T>>> {
        &self.c
    }

    /// Single structure constant `c[i][j][k]`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> T {
        self.c[i][j][k]
    }

    /// Basis element `e_i` as a coordinate vector.
    pub fn basis_element(&self, i: usize) -> Element<T> {
        let mut e = Element::zeros(self.dim);
        e[i] = T::one();
        e
    }

    fn check_element(&self, x: &Element<T>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    /// Lie bracket `[x, y]`.
    ///
    /// Accumulated over index pairs `i < j` as `(x_i y_j - x_j y_i) c[i][j][.]`,
    /// which makes `bracket(x, x) = 0` and `bracket(x, y) = -bracket(y, x)`
    /// exact in floating point, not merely up to roundoff.
    pub fn bracket(&self, x: &Element<T>, y: &Element<T>) -> Result<Element<T>> {
        self.check_element(x)?;
        self.check_element(y)?;
        let n = self.dim;
        let mut out = Element::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let s = x[i] * y[j] - x[j] * y[i];
                if s != T::zero() {
                    let row = &self.c[i][j];
                    for k in 0..n {
                        out[k] += s * row[k];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad_w`; column `u` equals `bracket(w, e_u)` bit for bit.
    pub fn ad(&self, w: &Element<T>) -> Result<AdMatrix<T>> {
        self.check_element(w)?;
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for u in 0..n {
            let col = self.bracket(w, &self.basis_element(u))?;
            m.set_column(u, &col);
        }
        Ok(m)
    }

    /// Maximum over basis triples of the norm of
    /// `[e_k, [e_i, e_j]] - [[e_k, e_i], e_j] - [e_i, [e_k, e_j]]`.
    ///
    /// Triples with a repeated index vanish exactly (the bracket is exactly
    /// antisymmetric) and distinct triples agree up to permutation sign, so
    /// scanning `i < j < k` is exhaustive.
    pub fn jacobi_residual(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        let mut term = vec![T::zero(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for t in term.iter_mut() {
                        *t = T::zero();
                    }
                    for m in 0..n {
                        // [e_k, [e_i, e_j]] = sum_m c[i][j][m] [e_k, e_m]
                        let cij = self.c[i][j][m];
                        // [[e_k, e_i], e_j] = sum_m c[k][i][m] [e_m, e_j]
                        let cki = self.c[k][i][m];
                        // [e_i, [e_k, e_j]] = sum_m c[k][j][m] [e_i, e_m]
                        let ckj = self.c[k][j][m];
                        for (l, t) in term.iter_mut().enumerate() {
                            *t += cij * self.c[k][m][l] - cki * self.c[m][j][l]
                                - ckj * self.c[i][m][l];
                        }
                    }
                    let mut norm_sq = T::zero();
                    for t in &term {
                        norm_sq += *t * *t;
                    }
                    let norm = norm_sq.sqrt();
                    if norm > worst {
                        worst = norm;
                    }
                }
            }
        }
        worst
    }

    /// Killing form with the sign convention `K(u, v) = -tr(ad_u ad_v)`,
    /// assembled from the contraction `K_ij = -sum_{a,b} c[i][a][b] c[j][b][a]`.
    ///
    /// The Gram matrix is computed on `i <= j` and mirrored, so it is
    /// symmetric exactly. Degenerate Killing forms (abelian or nilpotent
    /// algebras) are flagged, not rejected.
    pub fn killing_form(&self) -> Result<ScalarProduct<T>> {
        let n = self.dim;
        let mut k = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = T::zero();
                for a in 0..n {
                    for b in 0..n {
                        acc += self.c[i][a][b] * self.c[j][b][a];
                    }
                }
                k[(i, j)] = -acc;
                k[(j, i)] = -acc;
            }
        }
        ScalarProduct::from_gram(self, k)
    }

    /// `Ad(exp(t v))` computed as the matrix exponential of `t * ad_v`.
    pub fn adjoint_of_exp(&self, v: &Element<T>, t: T) -> Result<AdjointMatrix<T>> {
        let m = self.ad(v)? * t;
        Ok(AdjointMatrix {
            matrix: expm::expm(&m),
            generator: v.clone(),
            time: t,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn su2() -> LieAlgebra<f64> {
        catalog::load("su2").unwrap()
    }

    fn elem(coords: &[f64]) -> Element<f64> {
        Element::from_column_slice(coords)
    }

    #[test]
    fn su2_bracket_matches_cross_product_table() {
        let alg = su2();
        let e1 = alg.basis_element(0);
        let e2 = alg.basis_element(1);
        let out = alg.bracket(&e1, &e2).unwrap();
        assert_eq!(out, alg.basis_element(2));
    }

    #[test]
    fn bracket_of_element_with_itself_is_exactly_zero() {
        let alg = catalog::load::<f64>("su3").unwrap();
        let x = elem(&[0.3, -1.7, 2.9, 0.04, -5.5, 1.25, -0.8, 3.125]);
        let out = alg.bracket(&x, &x).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sl2r_bracket_h_e_is_2e() {
        let alg = catalog::load::<f64>("sl2r").unwrap();
        let h = alg.basis_element(0);
        let e = alg.basis_element(1);
        let out = alg.bracket(&h, &e).unwrap();
        assert_eq!(out, elem(&[0.0, 2.0, 0.0]));
    }

    #[test]
    fn ad_su2_e3_is_rotation_generator() {
        let alg = su2();
        let m = alg.ad(&alg.basis_element(2)).unwrap();
        // e1 -> e2, e2 -> -e1, e3 -> 0
        let expected = DMatrix::from_row_slice(3, 3, &[
            0.0, -1.0, 0.0,
            1.0, 0.0, 0.0,
            0.0, 0.0, 0.0,
        ]);
        assert_eq!(m, expected);
    }

    #[test]
    fn ad_of_zero_is_zero() {
        let alg = su2();
        let m = alg.ad(&elem(&[0.0; 3])).unwrap();
        assert!(m.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn heisenberg_ad_x_sends_y_to_z() {
        let alg = catalog::load::<f64>("heisenberg3").unwrap();
        let m = alg.ad(&alg.basis_element(0)).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[
            0.0, 0.0, 0.0,
            0.0, 0.0, 0.0,
            0.0, 1.0, 0.0,
        ]);
        assert_eq!(m, expected);
    }

    #[test]
    fn catalog_jacobi_residuals_are_tiny() {
        for name in ["su2", "su3", "sl2r", "sl2c_real", "heisenberg3"] {
            let alg = catalog::load::<f64>(name).unwrap();
            assert!(alg.jacobi_residual() <= 1e-12, "{name}");
        }
    }

    #[test]
    fn corrupted_table_fails_jacobi() {
        // su(2) with a spurious extra constant c[0][1][0] = 1, i.e.
        // [e1,e2] = e1 + e3. The cyclic Jacobi sum at (e1,e2,e3) is -e2.
        let alg = su2();
        let mut c = alg.structure_constants().clone();
        c[0][1][0] = 1.0;
        c[1][0][0] = -1.0;
        let labels = alg.basis_labels().to_vec();
        let broken =
            LieAlgebra::with_jacobi_tolerance(Some("broken"), labels.clone(), c.clone(), None)
                .unwrap();
        assert!(broken.jacobi_residual() > 0.5);
        assert!(matches!(
            LieAlgebra::new(Some("broken"), labels, c),
            Err(Error::JacobiViolation { .. })
        ));
    }

    #[test]
    fn asymmetric_table_is_rejected() {
        let mut c = vec![vec![vec![0.0; 2]; 2]; 2];
        c[0][1][0] = 1.0;
        c[1][0][0] = 1.0; // should be -1
        let err = LieAlgebra::new(Some("bad"), vec!["a".into(), "b".into()], c).unwrap_err();
        assert!(matches!(err, Error::Antisymmetry { .. }));
    }

    #[test]
    fn killing_su2_is_twice_identity() {
        let alg = su2();
        let k = alg.killing_form().unwrap();
        let expected = DMatrix::from_diagonal_element(3, 3, 2.0);
        assert_eq!(k.gram(), &expected);
    }

    #[test]
    fn killing_abelian_is_zero_and_degenerate() {
        let alg = catalog::load::<f64>("abelian(3)").unwrap();
        let k = alg.killing_form().unwrap();
        assert!(k.gram().iter().all(|&v| v == 0.0));
        assert!(k.is_degenerate());
    }

    #[test]
    fn killing_sl2r_matches_contraction_oracle() {
        let alg = catalog::load::<f64>("sl2r").unwrap();
        let k = alg.killing_form().unwrap();
        let g = k.gram();
        assert_relative_eq!(g[(0, 0)], -8.0, max_relative = 1e-14);
        assert_relative_eq!(g[(1, 2)], -4.0, max_relative = 1e-14);
        for &(i, j) in &[(0, 1), (0, 2), (1, 1), (2, 2)] {
            assert_eq!(g[(i, j)], 0.0, "entry ({i},{j})");
        }
    }

    #[test]
    fn adjoint_of_exp_su2_quarter_turn() {
        let alg = su2();
        let a = alg
            .adjoint_of_exp(&alg.basis_element(2), std::f64::consts::FRAC_PI_2)
            .unwrap();
        let image_of_e1 = &a.matrix * alg.basis_element(0);
        assert_relative_eq!(
            image_of_e1,
            alg.basis_element(1),
            epsilon = 1e-12
        );
    }

    #[test]
    fn adjoint_of_exp_at_time_zero_is_identity() {
        let alg = catalog::load::<f64>("sl2r").unwrap();
        let a = alg.adjoint_of_exp(&elem(&[0.4, -1.0, 2.0]), 0.0).unwrap();
        assert_eq!(a.matrix, DMatrix::identity(3, 3));
    }

    #[test]
    fn adjoint_of_exp_fixes_its_generator() {
        let alg = catalog::load::<f64>("su3").unwrap();
        let v = elem(&[0.3, -0.4, 0.9, 0.1, -1.2, 0.5, 0.7, -0.2]);
        let a = alg.adjoint_of_exp(&v, 0.83).unwrap();
        assert_relative_eq!(&a.matrix * &v, v, epsilon = 1e-12);
    }

    #[test]
    fn adjoint_of_exp_is_bracket_homomorphism() {
        let alg = catalog::load::<f64>("su3").unwrap();
        let v = elem(&[0.2, 0.1, -0.7, 0.4, 0.9, -0.3, 0.6, -0.5]);
        let x = elem(&[1.0, -0.2, 0.3, 0.0, 0.5, -0.8, 0.1, 0.9]);
        let y = elem(&[-0.4, 0.7, 0.2, -0.6, 0.3, 1.1, -0.9, 0.05]);
        let a = alg.adjoint_of_exp(&v, 0.61).unwrap();
        let lhs = &a.matrix * alg.bracket(&x, &y).unwrap();
        let rhs = alg
            .bracket(&(&a.matrix * &x), &(&a.matrix * &y))
            .unwrap();
        assert!((lhs - rhs).norm() <= 1e-8);
    }

    #[test]
    fn adjoint_of_exp_conjugates_ad() {
        let alg = catalog::load::<f64>("sl2c_real").unwrap();
        let v = elem(&[0.1, -0.3, 0.2, 0.5, -0.1, 0.4]);
        let w = elem(&[0.7, 0.2, -0.9, 0.3, 1.0, -0.4]);
        let a = alg.adjoint_of_exp(&v, 0.47).unwrap();
        let a_inv = alg.adjoint_of_exp(&v, -0.47).unwrap();
        let lhs = alg.ad(&(&a.matrix * &w)).unwrap();
        let rhs = &a.matrix * alg.ad(&w).unwrap() * &a_inv.matrix;
        assert!((lhs - rhs).amax() <= 1e-8);
    }

    proptest! {
        #[test]
        fn bracket_is_bilinear_and_antisymmetric(
            xs in proptest::collection::vec(-10.0f64..10.0, 8),
            ys in proptest::collection::vec(-10.0f64..10.0, 8),
            a in -5.0f64..5.0,
        ) {
            let alg = catalog::load::<f64>("su3").unwrap();
            let x = Element::from_vec(xs);
            let y = Element::from_vec(ys);
            let anti = alg.bracket(&x, &y).unwrap() + alg.bracket(&y, &x).unwrap();
            prop_assert!(anti.norm() == 0.0);
            let lhs = alg.bracket(&(&x * a), &y).unwrap();
            let rhs = alg.bracket(&x, &y).unwrap() * a;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + x.norm() * y.norm()));
        }

        #[test]
        fn ad_is_a_homomorphism(
            xs in proptest::collection::vec(-3.0f64..3.0, 8),
            ys in proptest::collection::vec(-3.0f64..3.0, 8),
        ) {
            let alg = catalog::load::<f64>("su3").unwrap();
            let x = Element::from_vec(xs);
            let y = Element::from_vec(ys);
            let ad_x = alg.ad(&x).unwrap();
            let ad_y = alg.ad(&y).unwrap();
            let commutator = &ad_x * &ad_y - &ad_y * &ad_x;
            let direct = alg.ad(&alg.bracket(&x, &y).unwrap()).unwrap();
            prop_assert!((commutator - direct).amax() <= 1e-10 * (1.0 + x.norm() * y.norm()));
        }
    }
}
