//! Scalar products on a Lie algebra: Gram-matrix wrappers, the musical
//! isomorphisms, invariance diagnostics, and Monte-Carlo averaging over the
//! adjoint group when a Haar sampler exists.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Element, LieAlgebra};
use crate::error::{Error, Result};
use crate::{real, Real};

/// Coordinates of a covector in the dual basis.
pub type DualVector<T> = DVector<T>;

/// A symmetric bilinear form on an algebra, stored as its Gram matrix in the
/// algebra basis. Symmetry is exact by construction; degeneracy is detected
/// once and remembered so the flat map stays usable while the sharp map is
/// refused.
#[derive(Clone, Debug)]
pub struct ScalarProduct<T: Real> {
    gram: DMatrix<T>,
    degenerate: bool,
}

impl<T: Real> ScalarProduct<T> {
    /// Wraps a Gram matrix after checking its dimensions against the algebra
    /// and its symmetry entry for entry.
    pub fn from_gram(alg: &LieAlgebra<T>, gram: DMatrix<T>) -> Result<Self> {
        let n = alg.dim();
        if gram.nrows() != n || gram.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gram.nrows().max(gram.ncols()),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if gram[(i, j)] != gram[(j, i)] {
                    return Err(Error::AsymmetricGram { i, j });
                }
            }
        }
        let degenerate = detect_degenerate(&gram);
        Ok(ScalarProduct { gram, degenerate })
    }

    pub fn gram(&self) -> &DMatrix<T> {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// `<x, y>`.
    pub fn pair(&self, x: &Element<T>, y: &Element<T>) -> Result<T> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        Ok((x.transpose() * &self.gram * y)[(0, 0)])
    }

    /// Flat map `v -> <v, .>`; defined for every product, degenerate or not.
    pub fn musical_b(&self, v: &Element<T>) -> Result<DualVector<T>> {
        self.check_dim(v.len())?;
        Ok(&self.gram * v)
    }

    /// Sharp map, the inverse of [`Self::musical_b`]; refused when the
    /// product is degenerate.
    pub fn musical_sharp(&self, alpha: &DualVector<T>) -> Result<Element<T>> {
        self.check_dim(alpha.len())?;
        if self.degenerate {
            return Err(Error::DegenerateProduct);
        }
        self.gram
            .clone()
            .lu()
            .solve(alpha)
            .ok_or(Error::DegenerateProduct)
    }
}

/// A Gram matrix counts as degenerate when the determinant of its
/// largest-singular-value normalization is negligible; normalizing first
/// keeps the test meaningful for any dimension and scale.
fn detect_degenerate<T: Real>(gram: &DMatrix<T>) -> bool {
    let sigma_max = gram.clone().svd(false, false).singular_values[0];
    if sigma_max == T::zero() {
        return true;
    }
    let det = (gram / sigma_max).determinant().abs();
    let thresh = real::<T>(1e-12).max(T::default_epsilon() * real(100.0));
    det < thresh
}

/// Worst violation, over basis triples, of the compatibility identity
/// `<[z, x], y> + <x, [z, y]> = 0`. Zero (up to roundoff) exactly when the
/// product is invariant under the adjoint action.
pub fn invariance_residual<T: Real>(alg: &LieAlgebra<T>, product: &ScalarProduct<T>) -> Result<T> {
    if product.dim() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            got: product.dim(),
        });
    }
    let mut worst = T::zero();
    for i in 0..alg.dim() {
        let m = product.gram() * alg.ad(&alg.basis_element(i))?;
        let sym = &m + m.transpose();
        let amax = sym.amax();
        if amax > worst {
            worst = amax;
        }
    }
    Ok(worst)
}

/// Norm of `b([v, w]) - ad*_v b(w)` where `ad*_v = -(ad_v)^T` is the
/// coadjoint action. Vanishes for all `v`, `w` exactly when the flat map
/// intertwines the adjoint and coadjoint representations.
pub fn b_equivariance_residual<T: Real>(
    alg: &LieAlgebra<T>,
    product: &ScalarProduct<T>,
    v: &Element<T>,
    w: &Element<T>,
) -> Result<T> {
    let lhs = product.musical_b(&alg.bracket(v, w)?)?;
    let rhs = -(alg.ad(v)?.transpose() * product.musical_b(w)?);
    Ok((lhs - rhs).norm())
}

/// Draws from the Haar measure of a compact group acting on the algebra by
/// automorphisms. Only the compact catalog algebras have one; the abelian
/// family gets the trivial group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HaarSampler {
    /// Adjoint action of U(2) on the traceless anti-Hermitian 2x2 matrices.
    Su2Adjoint,
    /// Rotation matrices acting on the standard basis of so(3).
    So3Rotation,
    /// Adjoint action of U(3) in the Gell-Mann basis.
    Su3Adjoint,
    /// The trivial group; every sample is the identity.
    IdentityOnly { dim: usize },
}

impl HaarSampler {
    /// Picks the sampler for an algebra, keyed on its catalog name and
    /// verified against the catalog structure constants so a renamed or
    /// edited table cannot silently get the wrong measure. Algebras whose
    /// adjoint group is not compact have no Haar probability measure and are
    /// refused.
    pub fn for_algebra<T: Real>(alg: &LieAlgebra<T>) -> Result<Self> {
        let is_abelian = alg
            .structure_constants()
            .iter()
            .flatten()
            .flatten()
            .all(|&v| v == T::zero());
        if is_abelian {
            return Ok(HaarSampler::IdentityOnly { dim: alg.dim() });
        }
        let name = alg.name().unwrap_or("unnamed");
        let sampler = match name {
            "su2" => HaarSampler::Su2Adjoint,
            "so3" => HaarSampler::So3Rotation,
            "su3" => HaarSampler::Su3Adjoint,
            _ => return Err(Error::NoSamplerAvailable(name.to_string())),
        };
        let reference = crate::catalog::load::<T>(name)?;
        if alg.dim() != reference.dim() {
            return Err(Error::NoSamplerAvailable(name.to_string()));
        }
        let tol = real::<T>(1e-12).max(T::default_epsilon() * real(8.0));
        let n = alg.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = alg.structure_constant(i, j, k) - reference.structure_constant(i, j, k);
                    if d.abs() > tol {
                        return Err(Error::NoSamplerAvailable(name.to_string()));
                    }
                }
            }
        }
        Ok(sampler)
    }

    /// Dimension of the matrices this sampler produces.
    pub fn dim(&self) -> usize {
        match self {
            HaarSampler::Su2Adjoint | HaarSampler::So3Rotation => 3,
            HaarSampler::Su3Adjoint => 8,
            HaarSampler::IdentityOnly { dim } => *dim,
        }
    }

    /// One automorphism matrix, Haar-distributed over the group.
    pub fn sample<T: Real, R: Rng + ?Sized>(&self, rng: &mut R) -> DMatrix<T> {
        match self {
            HaarSampler::Su2Adjoint => adjoint_from_unitary(haar_unitary(2, rng), &pauli_basis()),
            HaarSampler::So3Rotation => random_rotation(rng),
            HaarSampler::Su3Adjoint => {
                adjoint_from_unitary(haar_unitary(3, rng), &gell_mann_basis())
            }
            HaarSampler::IdentityOnly { dim } => DMatrix::identity(*dim, *dim),
        }
    }
}

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    // Sampling in f64 regardless of T keeps the stream identical across
    // scalar types for a given seed.
    real(rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of the R diagonal pushed into Q.
fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex<T>> {
    let mut g = DMatrix::<Complex<T>>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re: T = gaussian(rng);
            let im: T = gaussian(rng);
            g[(i, j)] = Complex::new(re, im);
        }
    }
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let modulus = d.modulus();
        let phase = if modulus == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            d / Complex::new(modulus, T::zero())
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Anti-Hermitian basis `T_a` with `tr(T_a T_b) = -delta_ab / 2`, matching
/// the su2 catalog table `[T_a, T_b] = eps_abc T_c`.
fn pauli_basis<T: Real>() -> Vec<DMatrix<Complex<T>>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mh = Complex::new(T::zero(), -real::<T>(0.5)); // -i/2
    let ph = Complex::new(T::zero(), real::<T>(0.5)); // +i/2
    let mr = Complex::new(-real::<T>(0.5), T::zero());
    let pr = Complex::new(real::<T>(0.5), T::zero());
    vec![
        // -(i/2) sigma_x
        DMatrix::from_row_slice(2, 2, &[zero, mh, mh, zero]),
        // -(i/2) sigma_y
        DMatrix::from_row_slice(2, 2, &[zero, mr, pr, zero]),
        // -(i/2) sigma_z
        DMatrix::from_row_slice(2, 2, &[mh, zero, zero, ph]),
    ]
}

/// Anti-Hermitian Gell-Mann basis with the same normalization as
/// [`pauli_basis`], matching the su3 catalog constants.
fn gell_mann_basis<T: Real>() -> Vec<DMatrix<Complex<T>>> {
    let o = T::zero();
    let l = T::one();
    let s = l / real::<T>(3.0).sqrt();
    let c = |re: T, im: T| Complex::new(re, im);
    let z = c(o, o);
    let lambdas: Vec<DMatrix<Complex<T>>> = vec![
        DMatrix::from_row_slice(3, 3, &[z, c(l, o), z, c(l, o), z, z, z, z, z]),
        DMatrix::from_row_slice(3, 3, &[z, c(o, -l), z, c(o, l), z, z, z, z, z]),
        DMatrix::from_row_slice(3, 3, &[c(l, o), z, z, z, c(-l, o), z, z, z, z]),
        DMatrix::from_row_slice(3, 3, &[z, z, c(l, o), z, z, z, c(l, o), z, z]),
        DMatrix::from_row_slice(3, 3, &[z, z, c(o, -l), z, z, z, c(o, l), z, z]),
        DMatrix::from_row_slice(3, 3, &[z, z, z, z, z, c(l, o), z, c(l, o), z]),
        DMatrix::from_row_slice(3, 3, &[z, z, z, z, z, c(o, -l), z, c(o, l), z]),
        DMatrix::from_row_slice(3, 3, &[c(s, o), z, z, z, c(s, o), z, z, z, c(-s - s, o)]),
    ];
    let minus_i_half = c(o, -real::<T>(0.5));
    lambdas.into_iter().map(|m| m * minus_i_half).collect()
}

/// Matrix of `X -> U X U*` in the given anti-Hermitian basis. With
/// `tr(T_a T_b) = -delta_ab / 2` the coefficients come out of the trace
/// pairing as `R_ba = -2 Re tr(U T_a U* T_b)`.
fn adjoint_from_unitary<T: Real>(
    u: DMatrix<Complex<T>>,
    basis: &[DMatrix<Complex<T>>],
) -> DMatrix<T> {
    let n = basis.len();
    let u_adj = u.adjoint();
    let mut out = DMatrix::zeros(n, n);
    for (a, t_a) in basis.iter().enumerate() {
        let conjugated = &u * t_a * &u_adj;
        for (b, t_b) in basis.iter().enumerate() {
            let prod = &conjugated * t_b;
            let mut tr = T::zero();
            for i in 0..prod.nrows() {
                tr += prod[(i, i)].re;
            }
            out[(b, a)] = -(tr + tr);
        }
    }
    out
}

/// Uniform rotation from a uniform unit quaternion.
fn random_rotation<T: Real, R: Rng + ?Sized>(rng: &mut R) -> DMatrix<T> {
    let two = real::<T>(2.0);
    let (mut w, mut x, mut y, mut z): (T, T, T, T) = (
        gaussian(rng),
        gaussian(rng),
        gaussian(rng),
        gaussian(rng),
    );
    let norm = (w * w + x * x + y * y + z * z).sqrt();
    // Four independent gaussians are almost surely nonzero; the guard keeps
    // the map total.
    if norm == T::zero() {
        return DMatrix::identity(3, 3);
    }
    w /= norm;
    x /= norm;
    y /= norm;
    z /= norm;
    let mut m = DMatrix::zeros(3, 3);
    m[(0, 0)] = T::one() - two * (y * y + z * z);
    m[(0, 1)] = two * (x * y - w * z);
    m[(0, 2)] = two * (x * z + w * y);
    m[(1, 0)] = two * (x * y + w * z);
    m[(1, 1)] = T::one() - two * (x * x + z * z);
    m[(1, 2)] = two * (y * z - w * x);
    m[(2, 0)] = two * (x * z - w * y);
    m[(2, 1)] = two * (y * z + w * x);
    m[(2, 2)] = T::one() - two * (x * x + y * y);
    m
}

/// Monte-Carlo average `(1/N) sum_k A_k^T P A_k` of the pullbacks of a
/// product under Haar samples.
///
/// Sample `k` is drawn from an independent stream `k` of a counter-based
/// generator seeded with `seed`, and the sum runs in stream order, so the
/// result is a deterministic function of `(algebra, product, n_samples,
/// seed)`. The accumulated matrix is symmetrized by mirroring before it is
/// wrapped, keeping the result exactly symmetric; with the trivial sampler
/// and one sample the input Gram matrix is reproduced bit for bit.
pub fn haar_average<T: Real>(
    alg: &LieAlgebra<T>,
    product: &ScalarProduct<T>,
    n_samples: usize,
    seed: u64,
) -> Result<ScalarProduct<T>> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "averaging needs at least one sample".into(),
        ));
    }
    if product.dim() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            got: product.dim(),
        });
    }
    let sampler = HaarSampler::for_algebra(alg)?;
    let n = alg.dim();
    let mut acc = DMatrix::<T>::zeros(n, n);
    for k in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let a = sampler.sample::<T, _>(&mut rng);
        acc += a.transpose() * product.gram() * a;
    }
    let weight = T::one() / real::<T>(n_samples as f64);
    let mut avg = acc * weight;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (avg[(i, j)] + avg[(j, i)]) * real::<T>(0.5);
            avg[(i, j)] = s;
            avg[(j, i)] = s;
        }
    }
    ScalarProduct::from_gram(alg, avg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use approx::assert_relative_eq;

    fn su2() -> LieAlgebra<f64> {
        catalog::load("su2").unwrap()
    }

    fn euclidean(alg: &LieAlgebra<f64>) -> ScalarProduct<f64> {
        ScalarProduct::from_gram(alg, DMatrix::identity(alg.dim(), alg.dim())).unwrap()
    }

    #[test]
    fn asymmetric_grams_are_rejected_with_indices() {
        let alg = su2();
        let mut g = DMatrix::identity(3, 3);
        g[(0, 2)] = 1.0;
        match ScalarProduct::from_gram(&alg, g) {
            Err(Error::AsymmetricGram { i: 0, j: 2 }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn wrong_sized_grams_are_rejected() {
        let alg = su2();
        let g = DMatrix::identity(2, 2);
        assert!(matches!(
            ScalarProduct::from_gram(&alg, g),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn killing_pairing_on_su2() {
        let alg = su2();
        let k = alg.killing_form().unwrap();
        let e1 = alg.basis_element(0);
        assert_eq!(k.pair(&e1, &e1).unwrap(), 2.0);
        assert_eq!(k.pair(&e1, &alg.basis_element(1)).unwrap(), 0.0);
    }

    #[test]
    fn flat_and_sharp_are_mutually_inverse() {
        let alg = su2();
        let k = alg.killing_form().unwrap();
        let v = Element::from_vec(vec![0.3, -1.2, 0.8]);
        let alpha = k.musical_b(&v).unwrap();
        assert_eq!(alpha, Element::from_vec(vec![0.6, -2.4, 1.6]));
        let back = k.musical_sharp(&alpha).unwrap();
        assert_relative_eq!(back, v, epsilon = 1e-14);
    }

    #[test]
    fn degenerate_products_refuse_sharp_but_allow_flat() {
        let alg = catalog::load::<f64>("heisenberg3").unwrap();
        let k = alg.killing_form().unwrap();
        assert!(k.is_degenerate());
        let v = alg.basis_element(0);
        assert!(k.musical_b(&v).is_ok());
        assert!(matches!(
            k.musical_sharp(&v),
            Err(Error::DegenerateProduct)
        ));
    }

    #[test]
    fn killing_forms_of_catalog_algebras_are_invariant() {
        for name in ["su2", "su3", "sl2r", "sl2c_real"] {
            let alg = catalog::load::<f64>(name).unwrap();
            let k = alg.killing_form().unwrap();
            let r = invariance_residual(&alg, &k).unwrap();
            assert!(r <= 1e-12, "{name}: {r}");
        }
    }

    #[test]
    fn euclidean_product_on_sl2r_is_not_invariant() {
        let alg = catalog::load::<f64>("sl2r").unwrap();
        let r = invariance_residual(&alg, &euclidean(&alg)).unwrap();
        // <[h,e],e> + <e,[h,e]> = 2 + 2
        assert_eq!(r, 4.0);
    }

    #[test]
    fn flat_equivariance_residual_detects_non_invariance() {
        let alg = catalog::load::<f64>("sl2r").unwrap();
        let p = euclidean(&alg);
        let h = alg.basis_element(0);
        let e = alg.basis_element(1);
        assert_eq!(b_equivariance_residual(&alg, &p, &h, &e).unwrap(), 4.0);
        let k = alg.killing_form().unwrap();
        assert!(b_equivariance_residual(&alg, &k, &h, &e).unwrap() <= 1e-12);
    }

    #[test]
    fn sampler_selection_follows_compactness() {
        assert_eq!(
            HaarSampler::for_algebra(&su2()).unwrap(),
            HaarSampler::Su2Adjoint
        );
        assert_eq!(
            HaarSampler::for_algebra(&catalog::load::<f64>("so3").unwrap()).unwrap(),
            HaarSampler::So3Rotation
        );
        assert_eq!(
            HaarSampler::for_algebra(&catalog::load::<f64>("abelian(4)").unwrap()).unwrap(),
            HaarSampler::IdentityOnly { dim: 4 }
        );
        for name in ["sl2r", "heisenberg3", "sl2c_real"] {
            let alg = catalog::load::<f64>(name).unwrap();
            assert!(matches!(
                HaarSampler::for_algebra(&alg),
                Err(Error::NoSamplerAvailable(_))
            ));
        }
    }

    #[test]
    fn renamed_tables_do_not_get_a_sampler() {
        let alg = catalog::load::<f64>("sl2r").unwrap();
        let renamed = LieAlgebra::<f64>::new(
            Some("su2"),
            alg.basis_labels().to_vec(),
            alg.structure_constants().clone(),
        )
        .unwrap();
        assert!(matches!(
            HaarSampler::for_algebra(&renamed),
            Err(Error::NoSamplerAvailable(_))
        ));
    }

    #[test]
    fn samples_are_automorphisms_preserving_the_killing_form() {
        for name in ["su2", "so3", "su3"] {
            let alg = catalog::load::<f64>(name).unwrap();
            let sampler = HaarSampler::for_algebra(&alg).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..5 {
                let a = sampler.sample::<f64, _>(&mut rng);
                let x = Element::from_fn(alg.dim(), |i, _| 0.1 * (i as f64 + 1.0));
                let y = Element::from_fn(alg.dim(), |i, _| ((i * i) as f64).sin());
                let lhs = alg.bracket(&(&a * &x), &(&a * &y)).unwrap();
                let rhs = &a * alg.bracket(&x, &y).unwrap();
                assert!((lhs - rhs).norm() <= 1e-10, "{name}: bracket not preserved");
                let gram_pull = a.transpose() * alg.killing_form().unwrap().gram().clone() * &a;
                let diff = (gram_pull - alg.killing_form().unwrap().gram()).amax();
                assert!(diff <= 1e-10, "{name}: Killing form moved by {diff}");
            }
        }
    }

    #[test]
    fn averaging_is_deterministic_in_the_seed() {
        let alg = su2();
        let p0 = ScalarProduct::from_gram(
            &alg,
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0])),
        )
        .unwrap();
        let a = haar_average(&alg, &p0, 64, 5).unwrap();
        let b = haar_average(&alg, &p0, 64, 5).unwrap();
        assert_eq!(a.gram(), b.gram());
        let c = haar_average(&alg, &p0, 64, 6).unwrap();
        assert_ne!(a.gram(), c.gram());
    }

    #[test]
    fn averaging_converges_to_the_invariant_product() {
        // E[A^T P A] over SO(3) is (tr P / 3) I, here 2 I.
        for name in ["su2", "so3"] {
            let alg = catalog::load::<f64>(name).unwrap();
            let p0 = ScalarProduct::from_gram(
                &alg,
                DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0])),
            )
            .unwrap();
            let avg = haar_average(&alg, &p0, 4000, 9).unwrap();
            let diff = (avg.gram() - DMatrix::from_diagonal_element(3, 3, 2.0)).amax();
            assert!(diff <= 0.15, "{name}: off by {diff}");
            let r = invariance_residual(&alg, &avg).unwrap();
            assert!(r <= 0.3, "{name}: residual {r}");
        }
    }

    #[test]
    fn averaging_fixes_invariant_products() {
        let alg = su2();
        let k = alg.killing_form().unwrap();
        let avg = haar_average(&alg, &k, 32, 3).unwrap();
        let diff = (avg.gram() - k.gram()).amax();
        assert!(diff <= 1e-12);
    }

    #[test]
    fn trivial_sampler_reproduces_the_input_bitwise() {
        let alg = catalog::load::<f64>("abelian(3)").unwrap();
        let g = DMatrix::from_row_slice(3, 3, &[1.5, 0.25, 0.0, 0.25, 2.0, -0.5, 0.0, -0.5, 0.125]);
        let p0 = ScalarProduct::from_gram(&alg, g.clone()).unwrap();
        let avg = haar_average(&alg, &p0, 1, 123).unwrap();
        assert_eq!(avg.gram(), &g);
    }

    #[test]
    fn zero_samples_is_an_argument_error() {
        let alg = su2();
        let k = alg.killing_form().unwrap();
        assert!(matches!(
            haar_average(&alg, &k, 0, 0),
            Err(Error::InvalidArgument(_))
        ));
    }
}
