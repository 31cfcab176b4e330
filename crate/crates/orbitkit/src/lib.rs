//! Numerical toolkit for the canonical geometric structures carried by
//! adjoint and coadjoint orbits of finite-dimensional real Lie algebras.
//!
//! The library represents a Lie algebra by its structure constants and builds,
//! for a skew-symmetric element `w` (one whose adjoint operator is
//! diagonalizable over the complex numbers with purely imaginary spectrum):
//!
//! * the kernel/image splitting of `ad_w` together with the real eigenblocks
//!   `E_mu` attached to the eigenvalue pairs `(i*mu, -i*mu)` ([`spectral`]),
//! * the canonical complex structure `J = (1/mu) ad_w` on each block
//!   ([`orbit`]),
//! * the orbit two-forms `omega_s(X_u, X_v) = <s(w), [u,v]>` for equivariant
//!   maps `s`, the induced metric `g = omega(., J.)`, its signature, and the
//!   full set of compatibility/closedness residuals ([`orbit`]),
//! * Ad-invariant scalar products, including Killing forms and Haar-averaged
//!   products on the compact catalog algebras ([`products`]),
//! * the Lie-Poisson bracket and the Kirillov-Kostant-Souriau pairing on the
//!   dual space ([`poisson`]),
//! * Nijenhuis-tensor integrability checks, both as a coordinate formula for
//!   matrix-valued fields and in the closed orbit form ([`nijenhuis`]).
//!
//! Everything is dense linear algebra on small matrices (`n <= 64`), generic
//! over the scalar type through the [`Real`] trait; `f64` is the intended
//! production scalar and concrete aliases for it (plus `f32`) live at the
//! crate root.

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod expm;
pub mod io;
pub mod jsonfmt;
pub mod nijenhuis;
pub mod orbit;
pub mod poisson;
pub mod products;
pub mod spectral;
pub mod verify;

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Scalar types the library is generic over: `f64` and `f32` qualify.
///
/// The bound combines nalgebra's field operations with conversions from/to
/// `f64` so tolerances and catalog constants can be stated once as double
/// literals.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {}
impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive {}

/// Converts an `f64` literal into the working scalar type.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite literal must convert to the scalar type")
}

/// Default numerical tolerance used wherever a caller does not override it.
pub const DEFAULT_TOL: f64 = 1e-9;

pub type LieAlgebra64 = algebra::LieAlgebra<f64>;
pub type Element64 = algebra::Element<f64>;
pub type AdjointMatrix64 = algebra::AdjointMatrix<f64>;
pub type SkewClassification64 = spectral::SkewClassification<f64>;
pub type SpectralDecomposition64 = spectral::SpectralDecomposition<f64>;
pub type ScalarProduct64 = products::ScalarProduct<f64>;
pub type DualVector64 = products::DualVector<f64>;
pub type ComplexStructure64 = orbit::ComplexStructure<f64>;
pub type EquivariantMap64 = orbit::EquivariantMap<f64>;
pub type TwoFormMatrix64 = orbit::TwoFormMatrix<f64>;
pub type MetricGram64 = orbit::MetricGram<f64>;
pub type OrbitStructureReport64 = orbit::OrbitStructureReport<f64>;

pub type LieAlgebra32 = algebra::LieAlgebra<f32>;
pub type Element32 = algebra::Element<f32>;
pub type ScalarProduct32 = products::ScalarProduct<f32>;
pub type SpectralDecomposition32 = spectral::SpectralDecomposition<f32>;
