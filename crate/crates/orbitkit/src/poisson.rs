//! The canonical linear Poisson structure on the dual space: the bracket
//! of observables, the musical map of the bivector, coadjoint fundamental
//! fields, the orbit two-form on dual points, and Jacobi diagnostics.

use nalgebra::DMatrix;

use crate::algebra::{Element, LieAlgebra};
use crate::error::{Error, Result};
use crate::products::DualVector;
use crate::{real, Real};

/// An observable on the dual space. Linear observables `F_v(a) = a(v)`
/// carry their exact constant gradient; black boxes are differentiated by
/// central differences with the declared step, scaled by `1 + |a|`.
pub struct PoissonFunction<T: Real> {
    kind: FnKind<T>,
}

enum FnKind<T: Real> {
    Linear(Element<T>),
    BlackBox {
        f: Box<dyn Fn(&DualVector<T>) -> T + Send + Sync>,
        fd_step: T,
    },
}

impl<T: Real> std::fmt::Debug for PoissonFunction<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.kind {
            FnKind::Linear(v) => write!(f, "PoissonFunction::Linear({v:?})"),
            FnKind::BlackBox { .. } => write!(f, "PoissonFunction::BlackBox(..)"),
        }
    }
}

impl<T: Real> PoissonFunction<T> {
    /// The coordinate pairing `a -> a(v)`.
    pub fn linear(v: Element<T>) -> Self {
        PoissonFunction { kind: FnKind::Linear(v) }
    }

    /// An opaque observable with a finite-difference step for its gradient
    /// (default `1e-6`).
    pub fn black_box(
        f: impl Fn(&DualVector<T>) -> T + Send + Sync + 'static,
        fd_step: Option<T>,
    ) -> Self {
        PoissonFunction {
            kind: FnKind::BlackBox {
                f: Box::new(f),
                fd_step: fd_step.unwrap_or_else(|| real(1e-6)),
            },
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, FnKind::Linear(_))
    }

    pub fn eval(&self, alpha: &DualVector<T>) -> T {
        match &self.kind {
            FnKind::Linear(v) => alpha.dot(v),
            FnKind::BlackBox { f, .. } => f(alpha),
        }
    }

    /// Gradient in the algebra, exact for linear observables.
    pub fn gradient(&self, alpha: &DualVector<T>) -> Element<T> {
        match &self.kind {
            FnKind::Linear(v) => v.clone(),
            FnKind::BlackBox { f, fd_step } => {
                let n = alpha.len();
                let h = *fd_step * (T::one() + alpha.norm());
                let mut grad = Element::zeros(n);
                for i in 0..n {
                    let mut plus = alpha.clone();
                    plus[i] += h;
                    let mut minus = alpha.clone();
                    minus[i] -= h;
                    grad[i] = (f(&plus) - f(&minus)) / (h + h);
                }
                grad
            }
        }
    }
}

fn check_dual<T: Real>(alg: &LieAlgebra<T>, alpha: &DualVector<T>) -> Result<()> {
    if alpha.len() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), got: alpha.len() });
    }
    Ok(())
}

/// The Poisson bracket `{F, G}(a) = a([dF_a, dG_a])`.
pub fn lie_poisson<T: Real>(
    alg: &LieAlgebra<T>,
    f: &PoissonFunction<T>,
    g: &PoissonFunction<T>,
    alpha: &DualVector<T>,
) -> Result<T> {
    check_dual(alg, alpha)?;
    let df = f.gradient(alpha);
    let dg = g.gradient(alpha);
    Ok(alpha.dot(&alg.bracket(&df, &dg)?))
}

/// Musical map of the bivector: the covector `u -> a([v, u])`, i.e. the
/// pullback of `a` through `ad_v`.
pub fn poisson_sharp<T: Real>(
    alg: &LieAlgebra<T>,
    alpha: &DualVector<T>,
    v: &Element<T>,
) -> Result<DualVector<T>> {
    check_dual(alg, alpha)?;
    Ok(alg.ad(v)?.transpose() * alpha)
}

/// Coadjoint fundamental field `-a \circ ad_v`, the infinitesimal motion
/// of `a` along the coadjoint action of `v`.
pub fn coadjoint_fundamental<T: Real>(
    alg: &LieAlgebra<T>,
    v: &Element<T>,
    alpha: &DualVector<T>,
) -> Result<DualVector<T>> {
    Ok(-poisson_sharp(alg, alpha, v)?)
}

/// The orbit two-form on fundamental fields at a dual point: `a([v, w])`.
pub fn kks<T: Real>(
    alg: &LieAlgebra<T>,
    alpha: &DualVector<T>,
    v: &Element<T>,
    w: &Element<T>,
) -> Result<T> {
    check_dual(alg, alpha)?;
    Ok(alpha.dot(&alg.bracket(v, w)?))
}

/// Cyclic Jacobi defect of the bracket on three linear observables,
/// reduced symbolically: the inner bracket of pairings is again a pairing,
/// so the sum equals `a` applied to the Lie Jacobi sum and no finite
/// differences are involved.
pub fn jacobi_poisson_residual<T: Real>(
    alg: &LieAlgebra<T>,
    v: &Element<T>,
    w: &Element<T>,
    q: &Element<T>,
    alpha: &DualVector<T>,
) -> Result<T> {
    check_dual(alg, alpha)?;
    let cyclic = alg.bracket(&alg.bracket(v, w)?, q)?
        + alg.bracket(&alg.bracket(q, v)?, w)?
        + alg.bracket(&alg.bracket(w, q)?, v)?;
    Ok(alpha.dot(&cyclic).abs())
}

fn span_projector<T: Real>(columns: &DMatrix<T>) -> (DMatrix<T>, usize) {
    let n = columns.nrows();
    let svd = columns.clone().svd(true, false);
    let u = svd.u.as_ref().expect("requested left singular vectors");
    let sigma_max = svd.singular_values[0];
    let thresh = sigma_max * real::<T>(1e-12).max(real::<T>(n as f64) * T::default_epsilon());
    let rank = if sigma_max == T::zero() {
        0
    } else {
        svd.singular_values.iter().filter(|&&s| s > thresh).count()
    };
    let u_r = u.columns(0, rank);
    (&u_r * u_r.transpose(), rank)
}

fn sharp_columns<T: Real>(alg: &LieAlgebra<T>, alpha: &DualVector<T>) -> Result<DMatrix<T>> {
    let n = alg.dim();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        s.set_column(i, &poisson_sharp(alg, alpha, &alg.basis_element(i))?);
    }
    Ok(s)
}

/// How far the image of the musical map and the span of the coadjoint
/// fundamental fields fail to coincide at `alpha` (both directions), plus
/// the worst mismatch between the orbit two-form and the bracket of the
/// corresponding linear observables on basis pairs. Identically zero up to
/// roundoff: the leaf tangent space is the same subspace described twice.
pub fn leaf_tangent_residual<T: Real>(alg: &LieAlgebra<T>, alpha: &DualVector<T>) -> Result<T> {
    check_dual(alg, alpha)?;
    let n = alg.dim();
    let sharp = sharp_columns(alg, alpha)?;
    let fundamental = -&sharp;
    let (proj_sharp, _) = span_projector(&sharp);
    let (proj_fund, _) = span_projector(&fundamental);

    let mut worst = T::zero();
    for i in 0..n {
        let x: DualVector<T> = fundamental.column(i).into();
        let d = (&x - &proj_sharp * &x).norm();
        if d > worst {
            worst = d;
        }
        let y: DualVector<T> = sharp.column(i).into();
        let d = (&y - &proj_fund * &y).norm();
        if d > worst {
            worst = d;
        }
    }

    for i in 0..n {
        let fi = PoissonFunction::linear(alg.basis_element(i));
        for j in (i + 1)..n {
            let fj = PoissonFunction::linear(alg.basis_element(j));
            let lhs = kks(alg, alpha, &alg.basis_element(i), &alg.basis_element(j))?;
            let rhs = lie_poisson(alg, &fi, &fj, alpha)?;
            let d = (lhs - rhs).abs();
            if d > worst {
                worst = d;
            }
        }
    }
    Ok(worst)
}

/// Dimension of the leaf tangent space at `alpha`: the rank of the map
/// `v -> a([v, .])`.
pub fn leaf_span_rank<T: Real>(alg: &LieAlgebra<T>, alpha: &DualVector<T>) -> Result<usize> {
    check_dual(alg, alpha)?;
    let (_, rank) = span_projector(&sharp_columns(alg, alpha)?);
    Ok(rank)
}
