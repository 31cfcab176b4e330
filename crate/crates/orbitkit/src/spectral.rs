//! Spectral analysis of adjoint operators: classifying elements by the
//! spectrum of `ad_w` and splitting the algebra into the kernel and the
//! rotating two-dimensional-eigenvalue blocks of a skew element.

use nalgebra::{Complex, DMatrix, DVector};

use crate::algebra::{Element, LieAlgebra};
use crate::error::{Error, Result};
use crate::{real, Real};

/// Outcome of classifying one operator.
///
/// `SkewSymmetric` means diagonalizable over the complex numbers with purely
/// imaginary spectrum, i.e. skew-symmetric with respect to some inner
/// product; only such operators admit the block decomposition.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<T: Real> {
    SkewSymmetric,
    NonDiagonalizable,
    OffAxisEigenvalue(Complex<T>),
}

impl<T: Real> std::fmt::Display for Verdict<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::SkewSymmetric => write!(f, "SkewSymmetric"),
            Verdict::NonDiagonalizable => write!(f, "NonDiagonalizable"),
            Verdict::OffAxisEigenvalue(z) => {
                let re = z.re.to_f64().unwrap_or(f64::NAN);
                let im = z.im.to_f64().unwrap_or(f64::NAN);
                write!(f, "OffAxisEigenvalue({re:e} {im:+e}i)")
            }
        }
    }
}

/// Verdict plus the full eigenvalue list (sorted by real part, then
/// imaginary part) and the tolerance that produced it.
#[derive(Clone, Debug)]
pub struct SkewClassification<T: Real> {
    pub verdict: Verdict<T>,
    pub eigenvalues: Vec<Complex<T>>,
    pub tol: T,
}

impl<T: Real> SkewClassification<T> {
    pub fn is_skew(&self) -> bool {
        matches!(self.verdict, Verdict::SkewSymmetric)
    }
}

/// One rotating block: an orthonormal basis (columns) of the real invariant
/// subspace belonging to the eigenvalue pair `(i mu, -i mu)`, `mu > 0`.
#[derive(Clone, Debug)]
pub struct Block<T: Real> {
    pub mu: T,
    pub basis: DMatrix<T>,
}

impl<T: Real> Block<T> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Splitting of the algebra under a skew element `w`: the kernel of `ad_w`
/// plus one block per eigenvalue magnitude, sorted by increasing `mu`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    basepoint: Element<T>,
    ad_matrix: DMatrix<T>,
    kernel_basis: DMatrix<T>,
    blocks: Vec<Block<T>>,
    tol: T,
}

impl<T: Real> SpectralDecomposition<T> {
    /// Assembles a decomposition from externally computed parts, validating
    /// dimensions, block invariance under `ad_w`, and the rotation identity
    /// `(ad_w / mu)^2 = -1` on each block.
    pub fn from_parts(
        alg: &LieAlgebra<T>,
        basepoint: Element<T>,
        kernel_basis: DMatrix<T>,
        mut blocks: Vec<Block<T>>,
        tol: T,
    ) -> Result<Self> {
        let n = alg.dim();
        if basepoint.len() != n || kernel_basis.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: basepoint.len().max(kernel_basis.nrows()),
            });
        }
        let mut total = kernel_basis.ncols();
        for b in &blocks {
            if b.basis.nrows() != n {
                return Err(Error::DimensionMismatch { expected: n, got: b.basis.nrows() });
            }
            if b.basis.ncols() == 0 || b.basis.ncols() % 2 != 0 {
                return Err(Error::InvalidArgument(
                    "block bases must have a positive even number of columns".into(),
                ));
            }
            if !(b.mu > T::zero()) {
                return Err(Error::InvalidArgument(
                    "block frequencies must be positive".into(),
                ));
            }
            total += b.basis.ncols();
        }
        if total != n {
            return Err(Error::DimensionMismatch { expected: n, got: total });
        }
        let m = alg.ad(&basepoint)?;
        let scale = T::one() + spectral_norm(&m);
        let slack = real::<T>(100.0);
        if kernel_basis.ncols() > 0 {
            let r = (&m * &kernel_basis).amax();
            if r > tol * scale * slack {
                return Err(Error::InvalidArgument(
                    "kernel columns are not annihilated by the adjoint operator".into(),
                ));
            }
        }
        for b in &blocks {
            let mb = &m * &b.basis;
            // Invariance: ad_w B must stay inside span B.
            let coords = lstsq(&b.basis, &mb);
            let invariance = (&mb - &b.basis * coords).amax();
            // Rotation: (ad_w / mu)^2 + 1 must vanish on the block.
            let rot = (&m * &mb / (b.mu * b.mu) + &b.basis).amax();
            if invariance > tol * scale * slack || rot > tol * scale * slack {
                return Err(Error::InvalidArgument(
                    "block basis is not a rotating invariant subspace of the adjoint operator"
                        .into(),
                ));
            }
        }
        blocks.sort_by(|a, b| a.mu.partial_cmp(&b.mu).expect("block frequencies are finite"));
        Ok(SpectralDecomposition { basepoint, ad_matrix: m, kernel_basis, blocks, tol })
    }

    pub fn basepoint(&self) -> &Element<T> {
        &self.basepoint
    }

    /// Matrix of `ad_w` at the basepoint, kept so downstream constructions
    /// need only the decomposition.
    pub fn ad_matrix(&self) -> &DMatrix<T> {
        &self.ad_matrix
    }

    pub fn kernel_basis(&self) -> &DMatrix<T> {
        &self.kernel_basis
    }

    pub fn blocks(&self) -> &[Block<T>] {
        &self.blocks
    }

    pub fn tol(&self) -> T {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.kernel_basis.nrows()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.ncols()
    }

    pub fn image_dim(&self) -> usize {
        self.blocks.iter().map(Block::dim).sum()
    }

    /// Columns of all block bases side by side, spanning the image of
    /// `ad_w`.
    pub fn image_basis(&self) -> DMatrix<T> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, self.image_dim());
        let mut offset = 0;
        for b in &self.blocks {
            out.view_mut((0, offset), (n, b.dim())).copy_from(&b.basis);
            offset += b.dim();
        }
        out
    }

    /// Kernel basis followed by the block bases: a full basis of the
    /// algebra adapted to the splitting.
    pub fn basis_matrix(&self) -> DMatrix<T> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        out.view_mut((0, 0), (n, self.kernel_dim()))
            .copy_from(&self.kernel_basis);
        out.view_mut((0, self.kernel_dim()), (n, self.image_dim()))
            .copy_from(&self.image_basis());
        out
    }

    /// Projectors onto the kernel and onto each block along the others.
    ///
    /// The splitting is a direct sum but not Euclidean-orthogonal in
    /// general (the blocks of a split algebra lean), so the projectors are
    /// the oblique ones induced by the adapted basis.
    pub fn oblique_projectors(&self) -> Result<(DMatrix<T>, Vec<DMatrix<T>>)> {
        let s = self.basis_matrix();
        let s_inv = s.clone().try_inverse().ok_or(Error::EigenFailure)?;
        let n = self.dim();
        let k = self.kernel_dim();
        let kernel_proj = if k > 0 {
            DMatrix::from(s.view((0, 0), (n, k))) * DMatrix::from(s_inv.view((0, 0), (k, n)))
        } else {
            DMatrix::zeros(n, n)
        };
        let mut block_projs = Vec::with_capacity(self.blocks.len());
        let mut offset = k;
        for b in &self.blocks {
            let d = b.dim();
            let p = DMatrix::from(s.view((0, offset), (n, d)))
                * DMatrix::from(s_inv.view((offset, 0), (d, n)));
            block_projs.push(p);
            offset += d;
        }
        Ok((kernel_proj, block_projs))
    }
}

/// Least-squares coefficients `C` minimizing `|B C - Y|` via SVD.
fn lstsq<T: Real>(b: &DMatrix<T>, y: &DMatrix<T>) -> DMatrix<T> {
    b.clone()
        .svd(true, true)
        .solve(y, T::default_epsilon().sqrt())
        .expect("SVD least squares with computed factors cannot fail")
}

pub(crate) fn spectral_norm<T: Real>(m: &DMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone().svd(false, false).singular_values[0]
}

pub(crate) fn complexify<T: Real>(m: &DMatrix<T>) -> DMatrix<Complex<T>> {
    m.map(|v| Complex::new(v, T::zero()))
}

/// Eigenvalues via the real Schur form.
fn schur_eigenvalues<T: Real>(m: &DMatrix<T>) -> Result<Vec<Complex<T>>> {
    let schur = m
        .clone()
        .try_schur(T::default_epsilon(), 100_000)
        .ok_or(Error::EigenFailure)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Orthonormal basis of the (complex) null space at threshold `thresh`.
fn complex_null_basis<T: Real>(
    m: &DMatrix<Complex<T>>,
    thresh: T,
) -> Vec<DVector<Complex<T>>> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut out = Vec::new();
    for (idx, sigma) in svd.singular_values.iter().enumerate() {
        if *sigma <= thresh {
            out.push(v_t.row(idx).adjoint());
        }
    }
    out
}

/// Greedy clustering of eigenvalues sorted by (re, im): each value joins the
/// nearest existing cluster when it lies within `ctol` of that cluster's
/// running mean.
///
/// Matching against every cluster, not just the previous one, matters for
/// multiple eigenvalues of non-normal matrices: their tiny real-part jitter
/// scatters the lexicographic order, so conjugate copies of the same value
/// need not be adjacent after sorting.
fn cluster_eigenvalues<T: Real>(
    eigenvalues: &[Complex<T>],
    ctol: T,
) -> Vec<(Complex<T>, usize)> {
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("eigenvalues of a finite matrix are finite")
    });
    let mut clusters: Vec<(Complex<T>, usize)> = Vec::new();
    for &z in &sorted {
        let mut nearest: Option<(usize, T)> = None;
        for (idx, (mean, _)) in clusters.iter().enumerate() {
            let d = ((z.re - mean.re) * (z.re - mean.re)
                + (z.im - mean.im) * (z.im - mean.im))
                .sqrt();
            if nearest.map_or(true, |(_, best)| d < best) {
                nearest = Some((idx, d));
            }
        }
        match nearest {
            Some((idx, d)) if d <= ctol => {
                let (mean, count) = &mut clusters[idx];
                let c = real::<T>(*count as f64);
                let c1 = c + T::one();
                *mean = Complex::new(
                    (mean.re * c + z.re) / c1,
                    (mean.im * c + z.im) / c1,
                );
                *count += 1;
            }
            _ => clusters.push((z, 1)),
        }
    }
    clusters
}

/// Classifies a square operator by its spectrum: skew (imaginary and
/// diagonalizable), non-diagonalizable, or off the imaginary axis.
///
/// Off-axis wins over non-diagonalizable when both apply, and the reported
/// eigenvalue is the worst offender: largest `|Re|`, ties broken toward
/// positive real part, then larger imaginary part.
pub fn classify_operator<T: Real>(m: &DMatrix<T>, tol: T) -> Result<SkewClassification<T>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    let mut eigenvalues = schur_eigenvalues(m)?;
    eigenvalues.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("eigenvalues of a finite matrix are finite")
    });
    let max_mod = eigenvalues
        .iter()
        .map(|z| (z.re * z.re + z.im * z.im).sqrt())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    let ctol = tol * (T::one() + max_mod);
    let clusters = cluster_eigenvalues(&eigenvalues, ctol);

    let mut worst: Option<Complex<T>> = None;
    for &(center, _) in &clusters {
        if center.re.abs() > ctol {
            let better = match worst {
                None => true,
                Some(w) => {
                    (center.re.abs(), center.re, center.im) > (w.re.abs(), w.re, w.im)
                }
            };
            if better {
                worst = Some(center);
            }
        }
    }
    if let Some(z) = worst {
        return Ok(SkewClassification { verdict: Verdict::OffAxisEigenvalue(z), eigenvalues, tol });
    }

    let mc = complexify(m);
    let rank_thresh = tol * spectral_norm(m);
    for &(center, count) in &clusters {
        if count < 2 {
            continue;
        }
        let shifted = &mc
            - DMatrix::<Complex<T>>::identity(m.nrows(), m.ncols())
                * Complex::new(center.re, center.im);
        let rank = shifted
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > rank_thresh)
            .count();
        let geometric = m.nrows() - rank;
        if geometric < count {
            return Ok(SkewClassification {
                verdict: Verdict::NonDiagonalizable,
                eigenvalues,
                tol,
            });
        }
    }

    Ok(SkewClassification { verdict: Verdict::SkewSymmetric, eigenvalues, tol })
}

/// Classifies the adjoint operator of `w`.
pub fn classify_skew<T: Real>(
    alg: &LieAlgebra<T>,
    w: &Element<T>,
    tol: T,
) -> Result<SkewClassification<T>> {
    classify_operator(&alg.ad(w)?, tol)
}

/// Kernel/block splitting of the algebra under a skew element.
///
/// Refuses non-skew elements with the offending verdict. Blocks carry
/// orthonormal real bases obtained from the complex eigenvectors of each
/// positive-frequency cluster; the kernel basis comes from the singular
/// value decomposition of `ad_w`.
pub fn decompose<T: Real>(
    alg: &LieAlgebra<T>,
    w: &Element<T>,
    tol: T,
) -> Result<SpectralDecomposition<T>> {
    let classification = classify_skew(alg, w, tol)?;
    if !classification.is_skew() {
        return Err(Error::NotSkewSymmetric {
            verdict: classification.verdict.to_string(),
        });
    }
    let m = alg.ad(w)?;
    let n = alg.dim();
    let sigma_max = spectral_norm(&m);
    let null_thresh = tol * sigma_max;

    // Kernel from the real SVD: right singular vectors of negligible
    // singular values.
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let kernel_cols: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= null_thresh)
        .map(|(i, _)| i)
        .collect();
    let mut kernel_basis = DMatrix::zeros(n, kernel_cols.len());
    for (out_idx, &row_idx) in kernel_cols.iter().enumerate() {
        kernel_basis.set_column(out_idx, &v_t.row(row_idx).transpose());
    }

    let max_mod = classification
        .eigenvalues
        .iter()
        .map(|z| (z.re * z.re + z.im * z.im).sqrt())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    let ctol = tol * (T::one() + max_mod);
    let clusters = cluster_eigenvalues(&classification.eigenvalues, ctol);

    let mc = complexify(&m);
    let mut blocks = Vec::new();
    for &(center, count) in &clusters {
        if center.im <= ctol {
            continue; // kernel cluster or the mirror image of a block
        }
        let mu = center.im;
        let shifted =
            &mc - DMatrix::<Complex<T>>::identity(n, n) * Complex::new(T::zero(), mu);
        let eigenvectors = complex_null_basis(&shifted, tol * sigma_max);
        if eigenvectors.len() != count {
            return Err(Error::EigenFailure);
        }
        let mut candidates = DMatrix::zeros(n, 2 * count);
        for (j, z) in eigenvectors.iter().enumerate() {
            for i in 0..n {
                candidates[(i, 2 * j)] = z[i].re;
                candidates[(i, 2 * j + 1)] = z[i].im;
            }
        }
        // The real and imaginary parts span the real invariant subspace;
        // an SVD turns them into an orthonormal basis of it.
        let cand_svd = candidates.svd(true, false);
        let u = cand_svd.u.as_ref().expect("requested left singular vectors");
        let span_thresh = cand_svd.singular_values[0] * T::default_epsilon().sqrt();
        let keep: Vec<usize> = cand_svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > span_thresh)
            .map(|(i, _)| i)
            .collect();
        if keep.len() != 2 * count {
            return Err(Error::EigenFailure);
        }
        let mut basis = DMatrix::zeros(n, 2 * count);
        for (out_idx, &col) in keep.iter().enumerate() {
            basis.set_column(out_idx, &u.column(col));
        }
        blocks.push(Block { mu, basis });
    }

    blocks.sort_by(|a, b| a.mu.partial_cmp(&b.mu).expect("block frequencies are finite"));
    let total: usize = kernel_basis.ncols() + blocks.iter().map(Block::dim).sum::<usize>();
    if total != n {
        return Err(Error::EigenFailure);
    }
    Ok(SpectralDecomposition {
        basepoint: w.clone(),
        ad_matrix: m,
        kernel_basis,
        blocks,
        tol,
    })
}
