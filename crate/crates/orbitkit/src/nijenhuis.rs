//! Integrability diagnostics: the coordinate Nijenhuis tensor of a
//! (1,1)-tensor field on flat space, and the closed-form orbit variant
//! that must vanish for the canonical complex structure.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{Element, LieAlgebra};
use crate::error::{Error, Result};
use crate::orbit::ComplexStructure;
use crate::spectral::SpectralDecomposition;
use crate::{real, Real};

/// A matrix-valued field on a flat vector space, optionally with an exact
/// directional derivative. Without one, derivatives come from central
/// differences with step `fd_step * (1 + |p|)` along the normalized
/// direction.
pub struct TensorField<T: Real> {
    dim: usize,
    evaluate: Box<dyn Fn(&DVector<T>) -> DMatrix<T> + Send + Sync>,
    derivative: Option<Box<dyn Fn(&DVector<T>, &DVector<T>) -> DMatrix<T> + Send + Sync>>,
    fd_step: T,
}

impl<T: Real> std::fmt::Debug for TensorField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TensorField")
            .field("dim", &self.dim)
            .field("exact_derivative", &self.derivative.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl<T: Real> TensorField<T> {
    pub fn new(dim: usize, evaluate: impl Fn(&DVector<T>) -> DMatrix<T> + Send + Sync + 'static) -> Self {
        TensorField {
            dim,
            evaluate: Box::new(evaluate),
            derivative: None,
            fd_step: real(1e-5),
        }
    }

    /// Attach an exact directional derivative `(p, direction) -> dA_p(direction)`.
    pub fn with_derivative(
        mut self,
        derivative: impl Fn(&DVector<T>, &DVector<T>) -> DMatrix<T> + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Box::new(derivative));
        self
    }

    pub fn with_fd_step(mut self, fd_step: T) -> Self {
        self.fd_step = fd_step;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_exact_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn evaluate(&self, p: &DVector<T>) -> DMatrix<T> {
        (self.evaluate)(p)
    }

    /// `dA_p(x)`, the derivative of the field at `p` along `x`.
    pub fn directional_derivative(&self, p: &DVector<T>, x: &DVector<T>) -> DMatrix<T> {
        if let Some(exact) = &self.derivative {
            return exact(p, x);
        }
        let norm_x = x.norm();
        if norm_x == T::zero() {
            return DMatrix::zeros(self.dim, self.dim);
        }
        let h = self.fd_step * (T::one() + p.norm());
        let dir = x / norm_x;
        let plus = (self.evaluate)(&(p + &dir * h));
        let minus = (self.evaluate)(&(p - &dir * h));
        (plus - minus) * (norm_x / (h + h))
    }
}

fn check_flat_dims<T: Real>(field: &TensorField<T>, vectors: [&DVector<T>; 3]) -> Result<()> {
    for v in vectors {
        if v.len() != field.dim {
            return Err(Error::DimensionMismatch { expected: field.dim, got: v.len() });
        }
    }
    Ok(())
}

/// The Nijenhuis tensor of the field at `p` on the pair `(x, y)`:
///
/// ```text
/// N_A(x, y) = A (dA(x) y - dA(y) x) - (dA(A x) y - dA(A y) x)
/// ```
///
/// Identically zero for constant fields, and for any field squaring to
/// minus the identity on a two-dimensional space.
pub fn nijenhuis_flat<T: Real>(
    field: &TensorField<T>,
    p: &DVector<T>,
    x: &DVector<T>,
    y: &DVector<T>,
) -> Result<DVector<T>> {
    check_flat_dims(field, [p, x, y])?;
    let a = field.evaluate(p);
    if a.nrows() != field.dim || a.ncols() != field.dim {
        return Err(Error::DimensionMismatch { expected: field.dim, got: a.nrows().max(a.ncols()) });
    }
    let da_x = field.directional_derivative(p, x);
    let da_y = field.directional_derivative(p, y);
    let inner = &da_x * y - &da_y * x;
    let da_ax = field.directional_derivative(p, &(&a * x));
    let da_ay = field.directional_derivative(p, &(&a * y));
    let outer = &da_ax * y - &da_ay * x;
    Ok(a * inner - outer)
}

/// Index of the frequency block containing `coords`, with the leaked mass
/// outside it. Coordinates are taken in the adapted basis `[kernel | blocks]`.
fn dominant_block<T: Real>(
    decomp: &SpectralDecomposition<T>,
    coords: &DVector<T>,
) -> (usize, T) {
    let kdim = decomp.kernel_dim();
    let mut best = 0;
    let mut best_mass = T::zero();
    let mut offset = kdim;
    for (b, block) in decomp.blocks().iter().enumerate() {
        let mass = coords.rows(offset, block.dim()).norm();
        if mass > best_mass {
            best_mass = mass;
            best = b;
        }
        offset += block.dim();
    }
    let total = coords.norm();
    let leak_sq = (total * total - best_mass * best_mass).max(T::zero());
    (best, leak_sq.sqrt())
}

/// The orbit Nijenhuis tensor on block vectors `u` and `v`, grouped as
///
/// ```text
/// (lambda + mu) ( J([u,v] - [Ju, Jv]) - [Ju, v] - [u, Jv] )
/// ```
///
/// where `lambda` and `mu` are the frequencies of the blocks containing
/// `u` and `v`. The two brackets inside `J` may individually stick out of
/// the tangent space when `lambda = mu`, but their difference never does,
/// so `J` is applied only to the grouped difference; a kernel component
/// there means the decomposition itself is numerically broken and is
/// reported as an error rather than projected away.
pub fn nijenhuis_orbit<T: Real>(
    alg: &LieAlgebra<T>,
    decomp: &SpectralDecomposition<T>,
    j: &ComplexStructure<T>,
    u: &Element<T>,
    v: &Element<T>,
) -> Result<Element<T>> {
    let n = alg.dim();
    if decomp.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: decomp.dim() });
    }
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.len().max(v.len()) });
    }
    if j.basepoint != *decomp.basepoint() || j.image_basis != decomp.image_basis() {
        return Err(Error::BasisMismatch);
    }
    if u.norm() == T::zero() || v.norm() == T::zero() {
        return Ok(Element::zeros(n));
    }
    let tol = decomp.tol();

    let basis = decomp.basis_matrix();
    let lu = basis.lu();
    let mut frequencies = [T::zero(); 2];
    for (slot, vector) in [u, v].into_iter().enumerate() {
        let coords = lu.solve(vector).ok_or(Error::EigenFailure)?;
        let (block, leak) = dominant_block(decomp, &coords);
        if leak > tol * (T::one() + coords.norm()) {
            return Err(Error::BlockMembershipViolation {
                mass: leak.to_f64().unwrap_or(f64::NAN),
            });
        }
        frequencies[slot] = decomp.blocks()[block].mu;
    }

    let ju = j.apply(u, tol)?;
    let jv = j.apply(v, tol)?;
    let grouped = alg.bracket(u, v)? - alg.bracket(&ju, &jv)?;

    let (kernel_proj, _) = decomp.oblique_projectors()?;
    let kernel_mass = (&kernel_proj * &grouped).norm();
    if kernel_mass > tol * (T::one() + grouped.norm()) {
        return Err(Error::ImageEscape {
            mass: kernel_mass.to_f64().unwrap_or(f64::NAN),
        });
    }

    let j_grouped = j.apply(&grouped, tol)?;
    let rest = alg.bracket(&ju, v)? + alg.bracket(u, &jv)?;
    Ok((j_grouped - rest) * (frequencies[0] + frequencies[1]))
}
