//! Haar-measure Monte Carlo over the compact groups acting on the orbit,
//! orbital-measure convolution samples, empirical spherical transforms, and
//! validation of the product formula against the kernel module.
//!
//! Sampling uses the full unitary groups U(p) × U(q) rather than the
//! determinant-constrained subgroup: both act transitively on the same
//! orbit, and the invariant probability measure on a compact-group orbit is
//! unique, so the projected laws coincide. `sample_orbit_sum_constrained`
//! exists to check exactly that claim.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::kernels::{KernelError, SphericalKernel};
use crate::seed::{fnv1a64, stream_seed};
use crate::spaces::{aiii_datum, rank1_datum, CartanLabel, OrbitPoint, RootDatum, SpaceError};

type C64 = Complex64;

#[derive(Debug, Error)]
pub enum McError {
    #[error("unsupported space for orbit sampling: {0}")]
    UnsupportedSpace(String),
    #[error("matrix dimension {0} exceeds the supported 64")]
    DimensionTooLarge(usize),
    #[error("factor with {got} coordinates does not fit rank {want}")]
    FactorDimension { got: usize, want: usize },
    #[error("empirical transforms need at least {min} draws, got {got}")]
    BudgetTooSmall { got: u32, min: u32 },
    #[error("calibration residual {resid:.2} sigma at lambda = {lambda:?}")]
    CalibrationFailed { lambda: Vec<f64>, resid: f64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Spaces with an implemented orbit sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum McSpace {
    /// The rank-one AI space: orbits are circles in the plane.
    RankOneAi,
    /// SU(p,q)-type: X is a p×q complex matrix, K acts by X ↦ u X v†.
    Aiii { p: u32, q: u32 },
}

impl McSpace {
    pub fn datum(&self) -> RootDatum {
        match *self {
            McSpace::RankOneAi => rank1_datum(CartanLabel::AI, None).expect("static row"),
            McSpace::Aiii { p, q } => aiii_datum(p, q).expect("validated parameters"),
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            McSpace::RankOneAi => 1,
            McSpace::Aiii { p, .. } => p as usize,
        }
    }

    fn validate(&self) -> Result<(), McError> {
        match *self {
            McSpace::RankOneAi => Ok(()),
            McSpace::Aiii { p, q } => {
                if (1..=3).contains(&p) && q >= p && q <= 8 {
                    Ok(())
                } else {
                    Err(McError::UnsupportedSpace(format!("AIII(p={p},q={q})")))
                }
            }
        }
    }

    pub fn id(&self) -> String {
        match *self {
            McSpace::RankOneAi => "AI".to_string(),
            McSpace::Aiii { p, q } => format!("AIII(p={p},q={q})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Small complex matrices
// ---------------------------------------------------------------------------

/// Dense column-major complex matrix, sized for compact-group sampling.
#[derive(Clone, Debug)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i + j * self.rows]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i + j * self.rows] = v;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Conjugate transpose times self, entry (i, j) = column_i† column_j.
    #[cfg(test)]
    fn gram(&self) -> CMatrix {
        let mut g = CMatrix::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in 0..self.cols {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..self.rows {
                    acc += self.at(k, i).conj() * self.at(k, j);
                }
                g.set(i, j, acc);
            }
        }
        g
    }

    /// Determinant by Gaussian elimination with partial pivoting (n ≤ 64).
    pub fn det(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = C64::new(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| {
                    m.at(a, col)
                        .norm_sqr()
                        .partial_cmp(&m.at(b, col).norm_sqr())
                        .unwrap()
                })
                .unwrap();
            if pivot != col {
                for j in 0..n {
                    let tmp = m.at(col, j);
                    m.set(col, j, m.at(pivot, j));
                    m.set(pivot, j, tmp);
                }
                det = -det;
            }
            let p = m.at(col, col);
            if p.norm_sqr() == 0.0 {
                return C64::new(0.0, 0.0);
            }
            det *= p;
            for row in (col + 1)..n {
                let factor = m.at(row, col) / p;
                for j in col..n {
                    let v = m.at(row, j) - factor * m.at(col, j);
                    m.set(row, j, v);
                }
            }
        }
        det
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn haar_from_rng(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            m.set(i, j, C64::new(gauss(rng) * inv_sqrt2, gauss(rng) * inv_sqrt2));
        }
    }
    // Modified Gram-Schmidt, two passes. The positive-real diagonal of R
    // makes the factorization canonical, which is what renders the
    // distribution left- and right-invariant.
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let mut proj = C64::new(0.0, 0.0);
                for k in 0..n {
                    proj += m.at(k, i).conj() * m.at(k, j);
                }
                for k in 0..n {
                    let v = m.at(k, j) - proj * m.at(k, i);
                    m.set(k, j, v);
                }
            }
        }
        let norm: f64 = (0..n).map(|k| m.at(k, j).norm_sqr()).sum::<f64>().sqrt();
        for k in 0..n {
            let v = m.at(k, j) / norm;
            m.set(k, j, v);
        }
    }
    m
}

/// A Haar-distributed n×n unitary matrix (n ≤ 64), deterministic in `seed`.
pub fn haar_unitary(n: usize, seed: u64) -> Result<CMatrix, McError> {
    if n == 0 || n > 64 {
        return Err(McError::DimensionTooLarge(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(haar_from_rng(n, &mut rng))
}

// ---------------------------------------------------------------------------
// Hermitian eigenvalues (p ≤ 3) for singular values
// ---------------------------------------------------------------------------

/// Eigenvalues (descending) of a p×p Hermitian Gram matrix, p ≤ 3.
fn hermitian_eigenvalues(g: &CMatrix) -> Vec<f64> {
    match g.rows() {
        1 => vec![g.at(0, 0).re],
        2 => {
            let (a, d) = (g.at(0, 0).re, g.at(1, 1).re);
            let off = g.at(0, 1).norm_sqr();
            let mid = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + off).sqrt();
            vec![mid + disc, mid - disc]
        }
        3 => {
            let q = (g.at(0, 0).re + g.at(1, 1).re + g.at(2, 2).re) / 3.0;
            let p1 = g.at(0, 1).norm_sqr() + g.at(0, 2).norm_sqr() + g.at(1, 2).norm_sqr();
            let dd = |i: usize| g.at(i, i).re - q;
            let p2 = dd(0) * dd(0) + dd(1) * dd(1) + dd(2) * dd(2) + 2.0 * p1;
            if p2 <= 0.0 {
                return vec![q, q, q];
            }
            let p = (p2 / 6.0).sqrt();
            // B = (G − qI)/p; det(B) is real for Hermitian G.
            let mut b = g.clone();
            for i in 0..3 {
                b.set(i, i, b.at(i, i) - C64::new(q, 0.0));
            }
            for v in b.data.iter_mut() {
                *v /= p;
            }
            let r = (b.det().re / 2.0).clamp(-1.0, 1.0);
            let phi = r.acos() / 3.0;
            let e1 = q + 2.0 * p * phi.cos();
            let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3 * 2.0).cos();
            let e2 = 3.0 * q - e1 - e3;
            let mut eigs = vec![e1, e2, e3];
            eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
            eigs
        }
        _ => unreachable!("rank above 3"),
    }
}

/// Singular values (descending) of the p×q sample matrix.
fn singular_values(y: &CMatrix) -> Vec<f64> {
    let p = y.rows();
    let q = y.cols();
    let mut gram = CMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..q {
                acc += y.at(i, c) * y.at(j, c).conj();
            }
            gram.set(i, j, acc);
        }
    }
    hermitian_eigenvalues(&gram)
        .into_iter()
        .map(|e| e.max(0.0).sqrt())
        .collect()
}

// ---------------------------------------------------------------------------
// Orbit sampling
// ---------------------------------------------------------------------------

/// Monte Carlo draws of Ad(k_1)H_1 + … + Ad(k_m)H_m.
///
/// Per draw we keep both the chamber projection (singular values / orbit
/// radius) and the diagonal pairing coordinates the spherical transform
/// integrates against.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitSampleSet {
    pub space: McSpace,
    pub factors: Vec<Vec<f64>>,
    pub seed: u64,
    pub n: u32,
    p: usize,
    chamber: Vec<f64>,
    pairing: Vec<f64>,
}

impl OrbitSampleSet {
    pub fn chamber_row(&self, i: usize) -> &[f64] {
        &self.chamber[i * self.p..(i + 1) * self.p]
    }

    pub fn pairing_row(&self, i: usize) -> &[f64] {
        &self.pairing[i * self.p..(i + 1) * self.p]
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

fn sample_orbit_sum_impl(
    space: McSpace,
    factors: &[OrbitPoint],
    n: u32,
    seed: u64,
    constrained: bool,
) -> Result<OrbitSampleSet, McError> {
    space.validate()?;
    let p = space.rank();
    for f in factors {
        if f.dim() != p {
            return Err(McError::FactorDimension {
                got: f.dim(),
                want: p,
            });
        }
    }
    let base = seed ^ fnv1a64(space.id().as_bytes()) ^ fnv1a64(&[factors.len() as u8]);
    let mut chamber = Vec::with_capacity(n as usize * p);
    let mut pairing = Vec::with_capacity(n as usize * p);
    match space {
        McSpace::RankOneAi => {
            for draw in 0..n {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(base, 0, draw as u64));
                let (mut yx, mut yy) = (0.0, 0.0);
                for f in factors {
                    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                    yx += f.coords()[0] * theta.cos();
                    yy += f.coords()[0] * theta.sin();
                }
                chamber.push((yx * yx + yy * yy).sqrt());
                pairing.push(yx);
            }
        }
        McSpace::Aiii { p, q } => {
            let (p, q) = (p as usize, q as usize);
            for draw in 0..n {
                let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(base, 1, draw as u64));
                let mut y = CMatrix::zeros(p, q);
                for f in factors {
                    let mut u = haar_from_rng(p, &mut rng);
                    let v = haar_from_rng(q, &mut rng);
                    if constrained {
                        // Rotate one column of u so det(u)det(v) = 1; this
                        // maps Haar on U(p)×U(q) onto Haar on S(U(p)×U(q)).
                        let z = u.det() * v.det();
                        let w = z.conj() / z.norm();
                        for k in 0..p {
                            let val = u.at(k, 0) * w;
                            u.set(k, 0, val);
                        }
                    }
                    // Y += u · diag(f) · v†
                    for a in 0..p {
                        for c in 0..q {
                            let mut acc = C64::new(0.0, 0.0);
                            for (b, &d) in f.coords().iter().enumerate() {
                                acc += u.at(a, b) * d * v.at(c, b).conj();
                            }
                            let val = y.at(a, c) + acc;
                            y.set(a, c, val);
                        }
                    }
                }
                chamber.extend(singular_values(&y));
                for j in 0..p {
                    pairing.push(y.at(j, j).re);
                }
            }
        }
    }
    Ok(OrbitSampleSet {
        space,
        factors: factors.iter().map(|f| f.coords().to_vec()).collect(),
        seed,
        n,
        p,
        chamber,
        pairing,
    })
}

/// Samples Σ_i Ad(k_i)H_i with independent Haar factors.
pub fn sample_orbit_sum(
    space: McSpace,
    factors: &[OrbitPoint],
    n: u32,
    seed: u64,
) -> Result<OrbitSampleSet, McError> {
    sample_orbit_sum_impl(space, factors, n, seed, false)
}

/// Same, sampling from the determinant-constrained subgroup S(U(p)×U(q)).
/// Projected laws must agree with `sample_orbit_sum`; kept as the check of
/// the larger-group sampling shortcut.
pub fn sample_orbit_sum_constrained(
    space: McSpace,
    factors: &[OrbitPoint],
    n: u32,
    seed: u64,
) -> Result<OrbitSampleSet, McError> {
    sample_orbit_sum_impl(space, factors, n, seed, true)
}

// ---------------------------------------------------------------------------
// Empirical spherical transforms
// ---------------------------------------------------------------------------

/// Frequency scale mapping coordinate λ onto the inner-product pairing.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CalibrationScale {
    pub s: f64,
    /// Worst per-point residual of the fit, in standard errors.
    pub fit_residual: f64,
}

impl CalibrationScale {
    /// The identity scale (exact for the plane pairing of the AI sampler).
    pub fn identity() -> Self {
        Self {
            s: 1.0,
            fit_residual: 0.0,
        }
    }
}

/// A complex sample mean with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TransformEstimate {
    pub re: f64,
    pub im: f64,
    pub stderr: f64,
    pub flagged: bool,
}

const MIN_TRANSFORM_DRAWS: u32 = 10_000;

/// Sample mean of exp(i·s·⟨Λ, Y⟩) over the draws.
pub fn empirical_transform(
    set: &OrbitSampleSet,
    scale: CalibrationScale,
    lam: &[f64],
) -> Result<TransformEstimate, McError> {
    if set.n < MIN_TRANSFORM_DRAWS {
        return Err(McError::BudgetTooSmall {
            got: set.n,
            min: MIN_TRANSFORM_DRAWS,
        });
    }
    let n = set.len();
    let (mut sc, mut ss, mut sc2, mut ss2) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let row = set.pairing_row(i);
        let phase: f64 = scale.s * lam.iter().zip(row).map(|(l, y)| l * y).sum::<f64>();
        let (sin, cos) = phase.sin_cos();
        sc += cos;
        ss += sin;
        sc2 += cos * cos;
        ss2 += sin * sin;
    }
    let nf = n as f64;
    let re = sc / nf;
    let im = ss / nf;
    let var_re = ((sc2 - sc * sc / nf) / (nf - 1.0)).max(0.0);
    let var_im = ((ss2 - ss * ss / nf) / (nf - 1.0)).max(0.0);
    let stderr = ((var_re + var_im) / nf).sqrt();
    let modulus = (re * re + im * im).sqrt();
    Ok(TransformEstimate {
        re,
        im,
        stderr,
        flagged: stderr > 0.1 * modulus.max(1e-300),
    })
}

/// Fits the frequency scale against an explicit kernel model: s minimizes
/// Σ_j (mean_i cos(s·⟨λ_j, Y_i⟩) − ψ(λ_j))². The scale sits in the
/// empirical phase, so rescaling the samples rescales s reciprocally.
pub fn calibrate_scale_with(
    set: &OrbitSampleSet,
    kernel: &SphericalKernel,
    grid: &[Vec<f64>],
) -> Result<CalibrationScale, McError> {
    assert!(grid.len() >= 8, "calibration grids hold at least 8 points");
    if set.n < MIN_TRANSFORM_DRAWS {
        return Err(McError::BudgetTooSmall {
            got: set.n,
            min: MIN_TRANSFORM_DRAWS,
        });
    }
    let n = set.len();
    // Pairings ⟨λ_j, Y_i⟩ once; the s-sweep then only pays for cosines.
    let pairings: Vec<Vec<f64>> = grid
        .iter()
        .map(|lam| {
            (0..n)
                .map(|i| {
                    lam.iter()
                        .zip(set.pairing_row(i))
                        .map(|(l, y)| l * y)
                        .sum::<f64>()
                })
                .collect()
        })
        .collect();
    let models: Vec<f64> = grid.iter().map(|lam| kernel.eval(lam)).collect();
    let sse = |s: f64| -> f64 {
        pairings
            .iter()
            .zip(&models)
            .map(|(pair, model)| {
                let mean = pair.iter().map(|&ph| (s * ph).cos()).sum::<f64>() / n as f64;
                (mean - model).powi(2)
            })
            .sum()
    };
    // Coarse bracket then golden-section refinement.
    let mut best_s = 1.0;
    let mut best = f64::INFINITY;
    let mut s = 0.2;
    while s <= 5.0 {
        let v = sse(s);
        if v < best {
            best = v;
            best_s = s;
        }
        s += 0.05;
    }
    let (mut lo, mut hi) = (best_s - 0.05, best_s + 0.05);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..50 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if sse(m1) < sse(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let s_star = 0.5 * (lo + hi);
    let scale = CalibrationScale {
        s: s_star,
        fit_residual: 0.0,
    };
    let mut worst = 0.0_f64;
    let mut worst_lam = None;
    for (lam, model) in grid.iter().zip(&models) {
        let est = empirical_transform(set, scale, lam)?;
        let resid = (est.re - model).abs() / est.stderr.max(1e-300);
        if resid > worst {
            worst = resid;
            worst_lam = Some(lam.clone());
        }
    }
    if worst > 3.0 {
        return Err(McError::CalibrationFailed {
            lambda: worst_lam.unwrap_or_default(),
            resid: worst,
        });
    }
    Ok(CalibrationScale {
        s: s_star,
        fit_residual: worst,
    })
}

/// Fits the frequency scale from a fresh k = 1 sample of `x` against the
/// normalized kernel of `x`.
pub fn calibrate_scale(
    space: McSpace,
    x: &OrbitPoint,
    grid: &[Vec<f64>],
    n: u32,
    seed: u64,
) -> Result<CalibrationScale, McError> {
    let set = sample_orbit_sum(space, std::slice::from_ref(x), n, seed)?;
    let datum = space.datum();
    let kernel = SphericalKernel::for_point(&datum, x)?;
    calibrate_scale_with(&set, &kernel, grid)
}

/// One grid row of a product-formula validation.
#[derive(Clone, Debug, Serialize)]
pub struct PfRow {
    pub lambda: Vec<f64>,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub stderr: f64,
    pub predicted: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductFormulaReport {
    pub space: McSpace,
    pub factors: Vec<Vec<f64>>,
    pub scale: CalibrationScale,
    pub n: u32,
    pub rows: Vec<PfRow>,
    pub all_pass: bool,
}

/// Checks the transform of the convolution sample against the product of
/// per-factor kernels at every grid point (3σ gate on both components).
pub fn validate_product_formula(
    space: McSpace,
    factors: &[OrbitPoint],
    grid: &[Vec<f64>],
    scale: CalibrationScale,
    n: u32,
    seed: u64,
) -> Result<ProductFormulaReport, McError> {
    let set = sample_orbit_sum(space, factors, n, seed)?;
    let datum = space.datum();
    let kernels: Vec<SphericalKernel> = factors
        .iter()
        .map(|f| SphericalKernel::for_point(&datum, f))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut all_pass = true;
    for lam in grid {
        // The calibrated scale is carried by the empirical phase; the
        // kernel side stays in plain λ coordinates.
        let est = empirical_transform(&set, scale, lam)?;
        let predicted: f64 = kernels.iter().map(|k| k.eval(lam)).product();
        let tol = 3.0 * est.stderr;
        let pass = (est.re - predicted).abs() <= tol && est.im.abs() <= tol;
        all_pass &= pass;
        rows.push(PfRow {
            lambda: lam.clone(),
            empirical_re: est.re,
            empirical_im: est.im,
            stderr: est.stderr,
            predicted,
            pass,
        });
    }
    Ok(ProductFormulaReport {
        space,
        factors: factors.iter().map(|f| f.coords().to_vec()).collect(),
        scale,
        n,
        rows,
        all_pass,
    })
}
