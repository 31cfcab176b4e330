//! Geometry on adjoint orbits of skew elements: the canonical complex
//! structure, the transgression two-forms, the induced metric with its
//! signature, and the residuals that certify the whole package.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, LieAlgebra};
use crate::error::{Error, Result};
use crate::products::{invariance_residual, ScalarProduct};
use crate::spectral::{self, SkewClassification, SpectralDecomposition};
use crate::{real, Real};

/// The complex structure of an orbit at one basepoint, expressed in the
/// image basis of a spectral decomposition: block-diagonal, one rotation
/// per frequency block, squaring to minus the identity.
#[derive(Clone, Debug)]
pub struct ComplexStructure<T: Real> {
    pub basepoint: Element<T>,
    /// Columns span the orbit tangent space (the image of `ad_w`).
    pub image_basis: DMatrix<T>,
    /// Matrix of `J` in the coordinates of `image_basis`.
    pub matrix: DMatrix<T>,
}

impl<T: Real> ComplexStructure<T> {
    pub fn image_dim(&self) -> usize {
        self.image_basis.ncols()
    }

    /// Coordinates of `x` in the image basis; rejects vectors with a
    /// component outside the tangent space larger than `tol` relative to
    /// `1 + |x|`.
    pub fn coords(&self, x: &Element<T>, tol: T) -> Result<DVector<T>> {
        if x.len() != self.image_basis.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.image_basis.nrows(),
                got: x.len(),
            });
        }
        let c = lstsq(&self.image_basis, &DMatrix::from_column_slice(x.len(), 1, x.as_slice()));
        let residual = (&self.image_basis * &c
            - DMatrix::from_column_slice(x.len(), 1, x.as_slice()))
        .norm();
        if residual > tol * (T::one() + x.norm()) {
            return Err(Error::ImageEscape {
                mass: residual.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(c.column(0).into())
    }

    /// Element with the given image-basis coordinates.
    pub fn from_coords(&self, c: &DVector<T>) -> Element<T> {
        &self.image_basis * c
    }

    /// `J x` for a tangent vector `x`.
    pub fn apply(&self, x: &Element<T>, tol: T) -> Result<Element<T>> {
        let c = self.coords(x, tol)?;
        Ok(self.from_coords(&(&self.matrix * c)))
    }

    /// `|J^2 + 1|` in the max norm.
    pub fn j_squared_residual(&self) -> T {
        let n = self.matrix.nrows();
        (&self.matrix * &self.matrix + DMatrix::identity(n, n)).amax()
    }
}

/// A two-form on the orbit tangent space, tabulated against fundamental
/// vector fields whose values at the basepoint are the image-basis columns.
#[derive(Clone, Debug)]
pub struct TwoFormMatrix<T: Real> {
    pub basepoint: Element<T>,
    /// The tangent vectors the form is tabulated on (image-basis columns).
    pub tangent_basis: DMatrix<T>,
    /// Column `a` generates the fundamental field with value
    /// `tangent_basis` column `a` at the basepoint.
    pub generators: DMatrix<T>,
    /// Antisymmetric matrix of form values; exactly `-transpose`.
    pub matrix: DMatrix<T>,
    pub tol: T,
}

/// Counts of positive, negative, and near-zero eigenvalues of a symmetric
/// Gram matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// The orbit metric `g = omega(., J .)` in the shared image basis, with its
/// signature and the asymmetry of the raw product before symmetrization.
#[derive(Clone, Debug)]
pub struct MetricGram<T: Real> {
    pub basepoint: Element<T>,
    pub tangent_basis: DMatrix<T>,
    pub matrix: DMatrix<T>,
    pub signature: Signature,
    pub asymmetry: T,
    pub tol: T,
}

/// A candidate equivariant map `s` from the algebra to itself, used to
/// build transgression forms. The first three kinds carry their exact
/// differential; black boxes fall back to central finite differences for
/// diagnostics only.
pub struct EquivariantMap<T: Real> {
    kind: MapKind<T>,
}

enum MapKind<T: Real> {
    Identity,
    Scaled(T),
    Linear(DMatrix<T>),
    BlackBox {
        f: Box<dyn Fn(&Element<T>) -> Element<T> + Send + Sync>,
        fd_step: T,
    },
}

impl<T: Real> std::fmt::Debug for EquivariantMap<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            MapKind::Identity => write!(f, "EquivariantMap::Identity"),
            MapKind::Scaled(c) => write!(f, "EquivariantMap::Scaled({c:?})"),
            MapKind::Linear(_) => write!(f, "EquivariantMap::Linear(..)"),
            MapKind::BlackBox { .. } => write!(f, "EquivariantMap::BlackBox(..)"),
        }
    }
}

impl<T: Real> EquivariantMap<T> {
    pub fn identity() -> Self {
        EquivariantMap { kind: MapKind::Identity }
    }

    pub fn scaled(c: T) -> Self {
        EquivariantMap { kind: MapKind::Scaled(c) }
    }

    /// A linear map; it is equivariant precisely when the matrix commutes
    /// with every adjoint operator, which the residual checks pointwise.
    pub fn linear(matrix: DMatrix<T>) -> Self {
        EquivariantMap { kind: MapKind::Linear(matrix) }
    }

    /// An opaque callback with a finite-difference step for its
    /// differential (default `1e-6`, scaled by `1 + |w|` at each point).
    pub fn black_box(
        f: impl Fn(&Element<T>) -> Element<T> + Send + Sync + 'static,
        fd_step: Option<T>,
    ) -> Self {
        EquivariantMap {
            kind: MapKind::BlackBox {
                f: Box::new(f),
                fd_step: fd_step.unwrap_or_else(|| real(1e-6)),
            },
        }
    }

    /// Whether the differential is exact rather than finite-difference.
    pub fn has_exact_linearization(&self) -> bool {
        !matches!(self.kind, MapKind::BlackBox { .. })
    }

    /// Whether `s(w)` is exactly a scalar multiple of `w`.
    pub(crate) fn scale_of(&self) -> Option<T> {
        match &self.kind {
            MapKind::Identity => Some(T::one()),
            MapKind::Scaled(c) => Some(*c),
            _ => None,
        }
    }

    pub fn eval(&self, w: &Element<T>) -> Element<T> {
        match &self.kind {
            MapKind::Identity => w.clone(),
            MapKind::Scaled(c) => w * *c,
            MapKind::Linear(m) => m * w,
            MapKind::BlackBox { f, .. } => f(w),
        }
    }

    /// Differential `ds_w(u)`.
    pub fn differential(&self, w: &Element<T>, u: &Element<T>) -> Element<T> {
        match &self.kind {
            MapKind::Identity => u.clone(),
            MapKind::Scaled(c) => u * *c,
            MapKind::Linear(m) => m * u,
            MapKind::BlackBox { f, fd_step } => {
                let norm_u = u.norm();
                if norm_u == T::zero() {
                    return Element::zeros(w.len());
                }
                let h = *fd_step * (T::one() + w.norm());
                let dir = u / norm_u;
                let plus = f(&(w + &dir * h));
                let minus = f(&(w - &dir * h));
                (plus - minus) * (norm_u / (h + h))
            }
        }
    }

    /// Worst violation, over basis directions `u`, of the pointwise
    /// equivariance identity `ds_w([u, w]) = [u, s(w)]`.
    pub fn equivariance_residual(&self, alg: &LieAlgebra<T>, w: &Element<T>) -> Result<T> {
        let s_w = self.eval(w);
        if s_w.len() != alg.dim() || w.len() != alg.dim() {
            return Err(Error::DimensionMismatch {
                expected: alg.dim(),
                got: s_w.len().max(w.len()),
            });
        }
        let mut worst = T::zero();
        for i in 0..alg.dim() {
            let u = alg.basis_element(i);
            let lhs = self.differential(w, &alg.bracket(&u, w)?);
            let rhs = alg.bracket(&u, &s_w)?;
            let r = (lhs - rhs).norm();
            if r > worst {
                worst = r;
            }
        }
        Ok(worst)
    }
}

/// Value at `w` of the fundamental vector field of `v`: `[v, w]`.
pub fn fundamental_vector<T: Real>(
    alg: &LieAlgebra<T>,
    v: &Element<T>,
    w: &Element<T>,
) -> Result<Element<T>> {
    alg.bracket(v, w)
}

/// Least-squares solve `A X = B` through the SVD.
fn lstsq<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    if a.ncols() == 0 {
        return DMatrix::zeros(0, b.ncols());
    }
    a.clone()
        .svd(true, true)
        .solve(b, T::default_epsilon().sqrt())
        .expect("SVD least squares with computed factors cannot fail")
}

/// The canonical complex structure of the decomposition: `(1/mu) ad_w` on
/// each frequency block, assembled block-diagonally in the image basis.
pub fn canonical_j<T: Real>(decomp: &SpectralDecomposition<T>) -> Result<ComplexStructure<T>> {
    let m = decomp.ad_matrix();
    let dim = decomp.image_dim();
    let mut matrix = DMatrix::zeros(dim, dim);
    let mut offset = 0;
    for block in decomp.blocks() {
        let d = block.dim();
        let rotated = (m * &block.basis) / block.mu;
        let coords = lstsq(&block.basis, &rotated);
        matrix.view_mut((offset, offset), (d, d)).copy_from(&coords);
        offset += d;
    }
    Ok(ComplexStructure {
        basepoint: decomp.basepoint().clone(),
        image_basis: decomp.image_basis(),
        matrix,
    })
}

/// The same structure as an operator on the whole algebra, zero on the
/// kernel: `sum_b (1/mu_b) ad_w P_b` with the oblique block projectors.
pub fn canonical_j_full<T: Real>(decomp: &SpectralDecomposition<T>) -> Result<DMatrix<T>> {
    let n = decomp.dim();
    let m = decomp.ad_matrix();
    let (_, block_projs) = decomp.oblique_projectors()?;
    let mut j = DMatrix::zeros(n, n);
    for (block, proj) in decomp.blocks().iter().zip(&block_projs) {
        j += (m * proj) / block.mu;
    }
    Ok(j)
}

fn ensure_invariant_product<T: Real>(
    alg: &LieAlgebra<T>,
    p: &ScalarProduct<T>,
    tol: T,
) -> Result<()> {
    let r = invariance_residual(alg, p)?;
    if r > tol * (T::one() + p.gram().amax()) {
        return Err(Error::InvalidArgument(format!(
            "scalar product is not invariant under the adjoint action (residual {:e})",
            r.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

fn ensure_equivariant<T: Real>(
    alg: &LieAlgebra<T>,
    s: &EquivariantMap<T>,
    w: &Element<T>,
    tol: T,
) -> Result<()> {
    let r = s.equivariance_residual(alg, w)?;
    let scale = T::one() + w.norm() + s.eval(w).norm();
    if r > tol * scale {
        return Err(Error::NonEquivariantMap {
            residual: r.to_f64().unwrap_or(f64::NAN),
            tol: (tol * scale).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Transgression form value `omega_{s,w}(X_u, X_v) = <s(w), [u, v]>`.
///
/// Requires an invariant product and a map equivariant at `w` to the given
/// tolerance; linearity in `s(w)` and antisymmetry in `(u, v)` then hold by
/// construction.
pub fn omega_s<T: Real>(
    alg: &LieAlgebra<T>,
    p: &ScalarProduct<T>,
    s: &EquivariantMap<T>,
    w: &Element<T>,
    u: &Element<T>,
    v: &Element<T>,
    tol: T,
) -> Result<T> {
    ensure_invariant_product(alg, p, tol)?;
    ensure_equivariant(alg, s, w, tol)?;
    p.pair(&s.eval(w), &alg.bracket(u, v)?)
}

/// Assembles the transgression form over the orbit tangent basis.
///
/// Generator `u_a` is the minimum-norm preimage with fundamental vector
/// equal to image-basis column `a`; the choice does not matter because the
/// form only sees the fundamental vectors. The matrix is filled on the
/// upper triangle and mirrored, so antisymmetry is exact. A rank deficit at
/// the relative threshold (including the empty tangent space of an abelian
/// orbit and the zero form of a zero map) is reported as degeneracy.
pub fn two_form_matrix<T: Real>(
    alg: &LieAlgebra<T>,
    p: &ScalarProduct<T>,
    s: &EquivariantMap<T>,
    decomp: &SpectralDecomposition<T>,
) -> Result<TwoFormMatrix<T>> {
    let tol = decomp.tol();
    let w = decomp.basepoint();
    ensure_invariant_product(alg, p, tol)?;
    ensure_equivariant(alg, s, w, tol)?;

    let dim = decomp.image_dim();
    if dim == 0 {
        return Err(Error::DegenerateForm { sigma_min: 0.0 });
    }
    let tangent_basis = decomp.image_basis();
    // X_u(w) = [u, w] = -ad_w u, so the preimage of column b solves
    // ad_w u = -b.
    let generators = lstsq(decomp.ad_matrix(), &(-&tangent_basis));

    let s_w = s.eval(w);
    let mut matrix = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        let u_a: Element<T> = generators.column(a).into();
        for b in (a + 1)..dim {
            let u_b: Element<T> = generators.column(b).into();
            let value = p.pair(&s_w, &alg.bracket(&u_a, &u_b)?)?;
            matrix[(a, b)] = value;
            matrix[(b, a)] = -value;
        }
    }

    let svd = matrix.clone().svd(false, false);
    let sigma_max = svd.singular_values[0];
    let sigma_min = svd.singular_values[svd.singular_values.len() - 1];
    if sigma_max == T::zero() || sigma_min <= tol * sigma_max {
        return Err(Error::DegenerateForm {
            sigma_min: sigma_min.to_f64().unwrap_or(f64::NAN),
        });
    }

    Ok(TwoFormMatrix {
        basepoint: w.clone(),
        tangent_basis,
        generators,
        matrix,
        tol,
    })
}

fn ensure_shared_basis<T: Real>(omega: &TwoFormMatrix<T>, j: &ComplexStructure<T>) -> Result<()> {
    if omega.basepoint != j.basepoint || omega.tangent_basis != j.image_basis {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// The orbit metric `g = omega(., J .)`, i.e. `Omega J` in the shared
/// basis, symmetrized by mirroring; the signature counts eigenvalues with
/// `|lambda| < tol * |g|` as zero.
pub fn kaehler_metric<T: Real>(
    omega: &TwoFormMatrix<T>,
    j: &ComplexStructure<T>,
) -> Result<MetricGram<T>> {
    ensure_shared_basis(omega, j)?;
    let raw = &omega.matrix * &j.matrix;
    let asymmetry = (&raw - raw.transpose()).amax();
    let mut g = raw;
    let dim = g.nrows();
    for a in 0..dim {
        for b in (a + 1)..dim {
            let v = (g[(a, b)] + g[(b, a)]) * real::<T>(0.5);
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    let eigenvalues = g.clone().symmetric_eigen().eigenvalues;
    let scale = eigenvalues.amax();
    let zero_thresh = omega.tol * scale;
    let mut signature = Signature { positive: 0, negative: 0, zero: 0 };
    for &lambda in eigenvalues.iter() {
        if lambda.abs() < zero_thresh || scale == T::zero() {
            signature.zero += 1;
        } else if lambda > T::zero() {
            signature.positive += 1;
        } else {
            signature.negative += 1;
        }
    }
    Ok(MetricGram {
        basepoint: omega.basepoint.clone(),
        tangent_basis: omega.tangent_basis.clone(),
        matrix: g,
        signature,
        asymmetry,
        tol: omega.tol,
    })
}

/// `|J^T Omega J - Omega|` in the max norm: zero exactly when the form is
/// invariant under the complex structure.
pub fn compatibility_residual<T: Real>(
    omega: &TwoFormMatrix<T>,
    j: &ComplexStructure<T>,
) -> Result<T> {
    ensure_shared_basis(omega, j)?;
    Ok((j.matrix.transpose() * &omega.matrix * &j.matrix - &omega.matrix).amax())
}

/// Exterior derivative of the transgression form on three fundamental
/// fields, evaluated at `w` through the invariant-pairing expansion
///
/// ```text
/// <[u, s(w)], [v, q]> - <[v, s(w)], [u, q]> + <[q, s(w)], [u, v]>
///   + <s(w), [[u, v], q]> - <s(w), [[u, q], v]> + <s(w), [[v, q], u]>
/// ```
///
/// with the bracket convention `[X_u, X_v] = -X_{[u,v]}` for the linear
/// fields `w -> [u, w]`. Vanishes (to roundoff) for every equivariant `s`
/// with an exact linearization; black boxes are refused since a
/// finite-difference derivative would drown the residual.
#[allow(clippy::too_many_arguments)]
pub fn d_omega_s_residual<T: Real>(
    alg: &LieAlgebra<T>,
    p: &ScalarProduct<T>,
    s: &EquivariantMap<T>,
    w: &Element<T>,
    u: &Element<T>,
    v: &Element<T>,
    q: &Element<T>,
    tol: T,
) -> Result<T> {
    if !s.has_exact_linearization() {
        return Err(Error::NoLinearization);
    }
    ensure_invariant_product(alg, p, tol)?;
    ensure_equivariant(alg, s, w, tol)?;
    let s_w = s.eval(w);
    let uv = alg.bracket(u, v)?;
    let uq = alg.bracket(u, q)?;
    let vq = alg.bracket(v, q)?;
    let total = p.pair(&alg.bracket(u, &s_w)?, &vq)?
        - p.pair(&alg.bracket(v, &s_w)?, &uq)?
        + p.pair(&alg.bracket(q, &s_w)?, &uv)?
        + p.pair(&s_w, &alg.bracket(&uv, q)?)?
        - p.pair(&s_w, &alg.bracket(&uq, v)?)?
        + p.pair(&s_w, &alg.bracket(&vq, u)?)?;
    Ok(total.abs())
}

/// How far conjugation by `Ad(exp(t v))` fails to transport the complex
/// structure: compares `J` at `w' = A w` with `A J_w A^{-1}` as operators
/// on the tangent space at `w'`, both restricted and co-restricted there.
pub fn j_conjugation_residual<T: Real>(
    alg: &LieAlgebra<T>,
    w: &Element<T>,
    v: &Element<T>,
    t: T,
    tol: T,
) -> Result<T> {
    let a = alg.adjoint_of_exp(v, t)?.matrix;
    let a_inv = alg.adjoint_of_exp(v, -t)?.matrix;
    let w_moved = &a * w;

    let decomp_moved = spectral::decompose(alg, &w_moved, tol)?;
    let j_at_moved = canonical_j_full(&decomp_moved)?;
    let decomp = spectral::decompose(alg, w, tol)?;
    let j_transported = &a * canonical_j_full(&decomp)? * &a_inv;

    let (kernel_proj, _) = decomp_moved.oblique_projectors()?;
    let n = alg.dim();
    let image_proj = DMatrix::identity(n, n) - kernel_proj;
    let difference = &image_proj * (j_at_moved - j_transported) * decomp_moved.image_basis();
    Ok(difference.amax())
}

/// `|ad_w s(w)| / (1 + |s(w)|)`: distance of `s(w)` from the stabilizer
/// algebra of `w`. For the identity and scalings this is zero exactly,
/// since `[w, c w] = c [w, w]` and the bracket of an element with itself
/// vanishes identically by the pairwise evaluation.
pub fn kernel_membership_residual<T: Real>(
    alg: &LieAlgebra<T>,
    s: &EquivariantMap<T>,
    w: &Element<T>,
) -> Result<T> {
    if let Some(c) = s.scale_of() {
        let self_bracket = alg.bracket(w, w)?.norm();
        let s_w_norm = (w * c).norm();
        return Ok(c.abs() * self_bracket / (T::one() + s_w_norm));
    }
    let s_w = s.eval(w);
    Ok(alg.bracket(w, &s_w)?.norm() / (T::one() + s_w.norm()))
}

/// Everything the toolkit can certify about the orbit through `w`: the
/// classification, the splitting summary, the assembled `J`, `omega`, `g`,
/// the signature, and a table of named residuals. Construction never
/// fails; when a stage cannot proceed its error is recorded in `failure`
/// and the later fields stay empty.
#[derive(Debug)]
pub struct OrbitStructureReport<T: Real> {
    pub basepoint: Element<T>,
    pub tol: T,
    pub classification: Option<SkewClassification<T>>,
    /// `(mu, block dimension)` pairs, ascending in `mu`.
    pub block_summary: Vec<(T, usize)>,
    pub kernel_dim: Option<usize>,
    pub complex_structure: Option<ComplexStructure<T>>,
    pub two_form: Option<TwoFormMatrix<T>>,
    pub metric: Option<MetricGram<T>>,
    pub residuals: BTreeMap<String, T>,
    pub is_kaehler: bool,
    pub failure: Option<String>,
}

/// Residual of the transport identity `X_{J u}(w) = J X_u(w)` over the
/// image basis: the commutator of `ad_w` with the full-space `J`, applied
/// to the tangent basis.
fn eigenvector_transport_residual<T: Real>(
    decomp: &SpectralDecomposition<T>,
    j_full: &DMatrix<T>,
) -> T {
    let m = decomp.ad_matrix();
    ((m * j_full - j_full * m) * decomp.image_basis()).amax()
}

fn block_ranges<T: Real>(decomp: &SpectralDecomposition<T>) -> Vec<(usize, usize)> {
    let mut ranges = Vec::with_capacity(decomp.blocks().len());
    let mut offset = 0;
    for b in decomp.blocks() {
        ranges.push((offset, b.dim()));
        offset += b.dim();
    }
    ranges
}

fn record<T: Real>(report: &mut OrbitStructureReport<T>, key: &str, value: T) {
    report.residuals.insert(key.to_string(), value);
}

fn build_report<T: Real>(
    alg: &LieAlgebra<T>,
    p: &ScalarProduct<T>,
    s: &EquivariantMap<T>,
    w: &Element<T>,
    tol: T,
    report: &mut OrbitStructureReport<T>,
) -> Result<()> {
    let classification = spectral::classify_skew(alg, w, tol)?;
    let verdict = classification.verdict.clone();
    let skew = classification.is_skew();
    report.classification = Some(classification);
    record(report, "equivariance", s.equivariance_residual(alg, w)?);
    record(report, "kernel_membership", kernel_membership_residual(alg, s, w)?);
    if !skew {
        return Err(Error::NotSkewSymmetric { verdict: verdict.to_string() });
    }

    let decomp = spectral::decompose(alg, w, tol)?;
    report.kernel_dim = Some(decomp.kernel_dim());
    report.block_summary = decomp.blocks().iter().map(|b| (b.mu, b.dim())).collect();

    let j = canonical_j(&decomp)?;
    record(report, "j_squared_plus_identity", j.j_squared_residual());
    let j_full = canonical_j_full(&decomp)?;
    record(
        report,
        "eigenvector_transport",
        eigenvector_transport_residual(&decomp, &j_full),
    );
    report.complex_structure = Some(j);

    // Bracket containment: cross-block brackets must avoid the kernel.
    let (kernel_proj, _) = decomp.oblique_projectors()?;
    let mut containment = T::zero();
    let blocks = decomp.blocks();
    for (bi, block_a) in blocks.iter().enumerate() {
        for block_b in blocks.iter().skip(bi + 1) {
            for a in 0..block_a.dim() {
                for b in 0..block_b.dim() {
                    let u: Element<T> = block_a.basis.column(a).into();
                    let v: Element<T> = block_b.basis.column(b).into();
                    let leak = (&kernel_proj * alg.bracket(&u, &v)?).norm();
                    if leak > containment {
                        containment = leak;
                    }
                }
            }
        }
    }
    record(report, "bracket_containment", containment);

    let omega = two_form_matrix(alg, p, s, &decomp)?;
    let svd = omega.matrix.clone().svd(false, false);
    record(
        report,
        "omega_smallest_singular_value",
        svd.singular_values[svd.singular_values.len() - 1],
    );

    let (compat, metric) = {
        let j_ref = report.complex_structure.as_ref().expect("stored above");
        (compatibility_residual(&omega, j_ref)?, kaehler_metric(&omega, j_ref)?)
    };
    record(report, "compatibility", compat);
    record(report, "metric_asymmetry", metric.asymmetry);

    // Cross-block entries of g must vanish; within a block, mu * g must
    // reproduce the restricted Gram of the ambient product.
    let ranges = block_ranges(&decomp);
    let mut orthogonality = T::zero();
    let mut scaling = T::zero();
    for (i, &(off_a, dim_a)) in ranges.iter().enumerate() {
        for &(off_b, dim_b) in ranges.iter().skip(i + 1) {
            let cross = metric.matrix.view((off_a, off_b), (dim_a, dim_b)).amax();
            if cross > orthogonality {
                orthogonality = cross;
            }
        }
        let block = &decomp.blocks()[i];
        let restricted = block.basis.transpose() * p.gram() * &block.basis;
        let scaled =
            DMatrix::from(metric.matrix.view((off_a, off_a), (dim_a, dim_a))) * block.mu;
        let r = (scaled - restricted).amax();
        if r > scaling {
            scaling = r;
        }
    }
    record(report, "block_orthogonality", orthogonality);
    record(report, "block_scaling", scaling);

    report.two_form = Some(omega);
    report.metric = Some(metric);

    // Closedness over basis triples (all of them in small dimensions,
    // a fixed random sample above).
    if s.has_exact_linearization() {
        let n = alg.dim();
        let mut worst = T::zero();
        let mut check = |i: usize, jx: usize, k: usize| -> Result<()> {
            let r = d_omega_s_residual(
                alg,
                p,
                s,
                w,
                &alg.basis_element(i),
                &alg.basis_element(jx),
                &alg.basis_element(k),
                tol,
            )?;
            if r > worst {
                worst = r;
            }
            Ok(())
        };
        if n <= 12 {
            for i in 0..n {
                for jx in (i + 1)..n {
                    for k in (jx + 1)..n {
                        check(i, jx, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..200 {
                let i = rng.random_range(0..n);
                let jx = rng.random_range(0..n);
                let k = rng.random_range(0..n);
                check(i, jx, k)?;
            }
        }
        record(report, "d_omega_s_max", worst);
    }

    // Transport of J along one-parameter subgroups in every basis
    // direction.
    let mut conjugation = T::zero();
    for i in 0..alg.dim() {
        let r = j_conjugation_residual(alg, w, &alg.basis_element(i), real(0.7), tol)?;
        if r > conjugation {
            conjugation = r;
        }
    }
    record(report, "conjugation", conjugation);

    let signature = report.metric.as_ref().expect("stored above").signature;
    report.is_kaehler = signature.negative == 0 && signature.zero == 0;
    Ok(())
}

/// Runs the full verification pipeline at `w`, capturing any failure
/// instead of propagating it.
pub fn orbit_report<T: Real>(
    alg: &LieAlgebra<T>,
    p: &ScalarProduct<T>,
    s: &EquivariantMap<T>,
    w: &Element<T>,
    tol: T,
) -> OrbitStructureReport<T> {
    let mut report = OrbitStructureReport {
        basepoint: w.clone(),
        tol,
        classification: None,
        block_summary: Vec::new(),
        kernel_dim: None,
        complex_structure: None,
        two_form: None,
        metric: None,
        residuals: BTreeMap::new(),
        is_kaehler: false,
        failure: None,
    };
    if let Err(e) = build_report(alg, p, s, w, tol, &mut report) {
        report.failure = Some(e.to_string());
        report.is_kaehler = false;
    }
    report
}
