//! Decides convergence vs divergence of the chamber integrals
//! ∫_W φ_k(λ, X) dλ by stratified Monte Carlo over dyadic annuli, fits
//! growth exponents, evaluates the analytic per-region exponent predictions,
//! runs the explicit divergence lower-bound constructions, and scans for the
//! minimal square-integrability power.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::kernels::{IntegrandSpec, KernelError, PhiEvaluator, TypeDKernel};
use crate::quad::gl16_panels;
use crate::seed::{fnv1a64, stream_seed};
use crate::spaces::{l1_power_lookup, ChamberPoint, ChamberRegion, PointClass, SpaceError};

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("need at least 6 dyadic levels, got {0}")]
    TooFewLevels(u32),
    #[error("k_max must lie in 1..=8, got {0}")]
    KMaxOutOfRange(u32),
    #[error("no exponent prediction for region {region:?} at a {class:?} point (rank {rank})")]
    UnsupportedRegion {
        region: ChamberRegion,
        class: PointClass,
        rank: u32,
    },
    #[error("eta must lie in (0, pi/4), got {0}")]
    BadEta(f64),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Budget and seed for a growth scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanConfig {
    /// Innermost ball radius; annuli double from here.
    pub r0: f64,
    /// Number of dyadic doublings (R_max = r0·2^levels).
    pub levels: u32,
    pub samples_per_annulus: u32,
    pub seed: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            r0: 16.0,
            levels: 9,
            samples_per_annulus: 200_000,
            seed: 0,
        }
    }
}

const STRATA: usize = 64;
/// Increment ratio below which the tail is geometric (convergent).
const RATIO_CONVERGENT: f64 = 0.8;
/// Increment ratio window for ∝ ln R growth.
const RATIO_LOG: (f64, f64) = (0.9, 1.1);
/// Increment ratio above which growth is polynomial.
const RATIO_POLY: f64 = 1.2;

/// One dyadic level of a growth scan.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AnnulusRow {
    pub radius: f64,
    pub partial: f64,
    pub partial_stderr: f64,
    pub increment: f64,
    pub increment_stderr: f64,
    /// Set when the budget was too small for this level (stderr > 25%).
    pub flagged: bool,
}

/// Growth classification of the partial integrals.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(tag = "kind")]
pub enum Classification {
    Convergent { limit_estimate: f64 },
    LogDivergent { slope: f64, ci95: f64 },
    PolyDivergent { exponent: f64, ci95: f64 },
    Ambiguous,
}

impl Classification {
    pub fn is_convergent(&self) -> bool {
        matches!(self, Classification::Convergent { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(
            self,
            Classification::LogDivergent { .. } | Classification::PolyDivergent { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::Convergent { .. } => "Convergent",
            Classification::LogDivergent { .. } => "LogDivergent",
            Classification::PolyDivergent { .. } => "PolyDivergent",
            Classification::Ambiguous => "Ambiguous",
        }
    }
}

/// The analytic exponent prediction for one region of the chamber.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(tag = "kind")]
pub enum ExponentPrediction {
    /// φ ≲ λ1^{−e} on the region.
    Radial { e: f64 },
    /// φ ≲ λ2^{−e2} λ1^{−e1} on the region.
    Anisotropic { e1: f64, e2: f64 },
}

impl ExponentPrediction {
    /// Sufficiency test: does the predicted bound integrate over the region?
    /// (Radial: e > chamber dimension in polar form; anisotropic: the λ1
    /// power must beat 2 with the λ2 integral finite.)
    pub fn implies_convergence(&self, p: u32) -> bool {
        match *self {
            ExponentPrediction::Radial { e } => e > p as f64,
            ExponentPrediction::Anisotropic { e1, e2 } => e1 >= 2.0 && e2 > 1.0,
        }
    }
}

/// Partial integrals over nested balls with a growth classification.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<AnnulusRow>,
    pub classification: Classification,
    pub predicted_exponents: BTreeMap<String, ExponentPrediction>,
    /// Min radial prediction across regions, when all regions have one.
    pub predicted_exponent: Option<f64>,
}

fn spec_base_seed(spec: &IntegrandSpec, seed: u64) -> u64 {
    seed ^ fnv1a64(spec.cache_key().as_bytes())
}

struct Stratum {
    vol: f64,
    rho: (f64, f64),
    theta: (f64, f64), // angular bin for p = 2; unused otherwise
}

/// Angular bin edges on (0, π/4), geometrically graded into both walls so
/// the strip λ2 ≤ c and the near-diagonal band keep dedicated strata at
/// every radius.
fn theta_edges() -> Vec<f64> {
    let eighth = std::f64::consts::FRAC_PI_8;
    let gamma = 0.35_f64;
    let mut edges = Vec::with_capacity(17);
    edges.push(0.0);
    for j in 1..8 {
        edges.push(eighth * gamma.powi(8 - j));
    }
    edges.push(eighth);
    for j in (1..8).rev() {
        edges.push(2.0 * eighth - eighth * gamma.powi(8 - j));
    }
    edges.push(2.0 * eighth);
    edges
}

fn build_strata(p: usize, r_lo: f64, r_hi: f64) -> Vec<Stratum> {
    let radial = |bins: usize| -> Vec<f64> {
        if r_lo <= 0.0 {
            // ball: one tiny inner stratum plus geometric shells
            let inner = r_hi * 2f64.powi(-40);
            let mut edges = vec![0.0, inner];
            let ratio = (r_hi / inner).powf(1.0 / (bins as f64 - 1.0));
            for i in 1..bins {
                edges.push(inner * ratio.powi(i as i32));
            }
            *edges.last_mut().unwrap() = r_hi;
            edges
        } else {
            let ratio = (r_hi / r_lo).powf(1.0 / bins as f64);
            let mut edges: Vec<f64> = (0..=bins).map(|i| r_lo * ratio.powi(i as i32)).collect();
            edges[0] = r_lo;
            *edges.last_mut().unwrap() = r_hi;
            edges
        }
    };
    match p {
        1 => radial(STRATA)
            .windows(2)
            .map(|w| Stratum {
                vol: w[1] - w[0],
                rho: (w[0], w[1]),
                theta: (0.0, 0.0),
            })
            .collect(),
        2 => {
            let rho_edges = radial(4);
            let th = theta_edges();
            let mut strata = Vec::with_capacity(STRATA);
            for w in rho_edges.windows(2) {
                for t in th.windows(2) {
                    strata.push(Stratum {
                        vol: 0.5 * (w[1] * w[1] - w[0] * w[0]) * (t[1] - t[0]),
                        rho: (w[0], w[1]),
                        theta: (t[0], t[1]),
                    });
                }
            }
            strata
        }
        3 => {
            let omega = std::f64::consts::PI / 12.0; // chamber patch of S²
            radial(STRATA)
                .windows(2)
                .map(|w| Stratum {
                    vol: omega * (w[1].powi(3) - w[0].powi(3)) / 3.0,
                    rho: (w[0], w[1]),
                    theta: (0.0, 0.0),
                })
                .collect()
        }
        _ => unreachable!("rank above 3"),
    }
}

fn sample_point(p: usize, stratum: &Stratum, rng: &mut ChaCha8Rng, coords: &mut Vec<f64>) {
    coords.clear();
    let (ra, rb) = stratum.rho;
    match p {
        1 => {
            coords.push(ra + (rb - ra) * rng.gen::<f64>());
        }
        2 => {
            let rho = (ra * ra + (rb * rb - ra * ra) * rng.gen::<f64>()).sqrt();
            let (ta, tb) = stratum.theta;
            let theta = ta + (tb - ta) * rng.gen::<f64>();
            coords.push(rho * theta.cos());
            coords.push(rho * theta.sin());
        }
        3 => {
            let rho = (ra.powi(3) + (rb.powi(3) - ra.powi(3)) * rng.gen::<f64>()).cbrt();
            // abs-sorted isotropic Gaussian direction = uniform on the
            // chamber patch, by signed-permutation symmetry.
            let mut dir = [gauss(rng).abs(), gauss(rng).abs(), gauss(rng).abs()];
            dir.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let norm = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
            if norm == 0.0 {
                coords.extend_from_slice(&[rho, 0.0, 0.0]);
                return;
            }
            for d in dir {
                coords.push(rho * d / norm);
            }
        }
        _ => unreachable!(),
    }
}

/// Box-Muller standard normal.
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn integrate_region(
    eval: &PhiEvaluator,
    p: usize,
    r_lo: f64,
    r_hi: f64,
    samples: u32,
    base_seed: u64,
    level: u64,
) -> (f64, f64) {
    let strata = build_strata(p, r_lo, r_hi);
    let per_stratum = (samples as usize / strata.len()).max(2);
    let mut estimate = 0.0;
    let mut variance = 0.0;
    let mut coords = Vec::with_capacity(3);
    for (si, stratum) in strata.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(base_seed, level, si as u64));
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..per_stratum {
            sample_point(p, stratum, &mut rng, &mut coords);
            let degenerate =
                coords.windows(2).any(|w| w[0] <= w[1]) || *coords.last().unwrap() <= 0.0;
            let phi = if degenerate {
                0.0
            } else {
                eval.phi(&ChamberPoint::new_unchecked(coords.clone()))
            };
            sum += phi;
            sum_sq += phi * phi;
        }
        let n = per_stratum as f64;
        let mean = sum / n;
        let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
        estimate += stratum.vol * mean;
        variance += stratum.vol * stratum.vol * var / n;
    }
    (estimate, variance.sqrt())
}

/// Stratified 1D estimate of ∫_{r_lo}^{r_hi} f dλ with standard error;
/// the sampler-calibration hook (known antiderivatives go here).
pub fn integrate_fn_1d<F: Fn(f64) -> f64>(
    f: F,
    r_lo: f64,
    r_hi: f64,
    samples: u32,
    seed: u64,
) -> (f64, f64) {
    let strata = build_strata(1, r_lo, r_hi);
    let per = (samples as usize / strata.len()).max(2);
    let mut estimate = 0.0;
    let mut variance = 0.0;
    for (si, stratum) in strata.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, 0, si as u64));
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..per {
            let x = stratum.rho.0 + (stratum.rho.1 - stratum.rho.0) * rng.gen::<f64>();
            let v = f(x);
            sum += v;
            sum_sq += v * v;
        }
        let n = per as f64;
        let mean = sum / n;
        let var = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
        estimate += stratum.vol * mean;
        variance += stratum.vol * stratum.vol * var / n;
    }
    (estimate, variance.sqrt())
}

/// Unbiased stratified Monte Carlo estimate of ∫ φ_k over W ∩ {r_lo ≤ |λ| ≤ r_hi}.
///
/// Deterministic given the seed: stratum streams derive from
/// (seed, spec identity, annulus, stratum index).
pub fn integrate_annulus(
    spec: &IntegrandSpec,
    r_lo: f64,
    r_hi: f64,
    samples: u32,
    seed: u64,
) -> Result<(f64, f64), ScanError> {
    let eval = spec.evaluator()?;
    let level = fnv1a64(&r_lo.to_bits().to_le_bytes()) ^ fnv1a64(&r_hi.to_bits().to_le_bytes());
    Ok(integrate_region(
        &eval,
        spec.rank() as usize,
        r_lo,
        r_hi,
        samples,
        spec_base_seed(spec, seed),
        level,
    ))
}

fn classify(rows: &[AnnulusRow]) -> Classification {
    let n = rows.len();
    if n < 5 {
        return Classification::Ambiguous;
    }
    let total = rows.last().unwrap().partial.abs();
    let tiny = 1e-14 * total.max(1e-300);
    // Ratios over the last up-to-5 increments (4 ratios).
    let window = n.min(5);
    let incs: Vec<f64> = rows[n - window..].iter().map(|r| r.increment).collect();
    if incs.iter().all(|&d| d.abs() <= tiny) {
        return Classification::Convergent {
            limit_estimate: rows.last().unwrap().partial,
        };
    }
    let ratios: Vec<f64> = incs
        .windows(2)
        .map(|w| if w[0].abs() <= tiny { 0.0 } else { w[1] / w[0] })
        .collect();
    if ratios.iter().all(|&q| q <= RATIO_CONVERGENT) {
        let q = ratios.last().copied().unwrap_or(0.0).clamp(0.0, RATIO_CONVERGENT);
        let tail = rows.last().unwrap().increment * q / (1.0 - q);
        return Classification::Convergent {
            limit_estimate: rows.last().unwrap().partial + tail,
        };
    }
    if ratios.iter().all(|&q| q >= RATIO_LOG.0 && q <= RATIO_LOG.1) {
        // I(R) ≈ a + slope·ln R over the last window.
        let points: Vec<(f64, f64, f64)> = rows[n - window..]
            .iter()
            .map(|r| (r.radius.ln(), r.partial, r.partial_stderr))
            .collect();
        let (slope, sigma) = weighted_slope(&points);
        return Classification::LogDivergent {
            slope,
            ci95: 1.96 * sigma,
        };
    }
    if ratios.iter().all(|&q| q >= RATIO_POLY) {
        // ln Δ_m ≈ const + s·(m ln 2).
        let points: Vec<(f64, f64, f64)> = rows[n - window..]
            .iter()
            .enumerate()
            .map(|(i, r)| {
                (
                    i as f64 * std::f64::consts::LN_2,
                    r.increment.max(1e-300).ln(),
                    (r.increment_stderr / r.increment.max(1e-300)).min(1.0),
                )
            })
            .collect();
        let (s, sigma) = weighted_slope(&points);
        return Classification::PolyDivergent {
            exponent: s,
            ci95: 1.96 * sigma,
        };
    }
    Classification::Ambiguous
}

/// Least-squares slope of y on x with per-point standard errors; returns
/// (slope, stderr of slope).
fn weighted_slope(points: &[(f64, f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let x_mean = points.iter().map(|p| p.0).sum::<f64>() / n;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - x_mean).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - x_mean) * (p.1 - y_mean))
        .sum();
    let slope = sxy / sxx;
    let var: f64 = points
        .iter()
        .map(|p| ((p.0 - x_mean) * p.2).powi(2))
        .sum::<f64>()
        / (sxx * sxx);
    (slope, var.sqrt())
}

/// The analytic upper-bound exponent of the integrand on a region, as a
/// pure formula in (k, r); rank p selects the decomposition.
pub fn predicted_exponent(
    p: u32,
    region: ChamberRegion,
    class: PointClass,
    k: u32,
    r: u32,
) -> Result<ExponentPrediction, ScanError> {
    let (k, r) = (k as f64, r as f64);
    let radial = |e: f64| Ok(ExponentPrediction::Radial { e });
    match (p, class, region.coarse()) {
        (2, PointClass::Regular, ChamberRegion::W1) => radial((2.0 * r + 1.0) * (k - 1.0) + 2.0 * k - 2.0),
        (2, PointClass::Regular, ChamberRegion::W2) => radial((k - 2.0) * (1.0 + 2.0 * r) + 4.0 * k - 4.0),
        (2, PointClass::TypeD, ChamberRegion::W1) => radial((2.0 * r + 1.0) * (2.0 * k - 2.0) - 2.0),
        (2, PointClass::TypeD, ChamberRegion::W2) => match region {
            ChamberRegion::W21 => radial((2.0 * r + 1.0) * (k - 1.0) + 2.0 * k - 2.0),
            ChamberRegion::W22 => radial((k - 1.0) * (1.0 + 2.0 * r) + 2.0 * k - 4.0),
            _ => Err(ScanError::UnsupportedRegion {
                region,
                class,
                rank: p,
            }),
        },
        (2, PointClass::TypeA, ChamberRegion::W1) => radial((k - 2.0) * (2.0 * r + 1.0) + 2.0 * k - 2.0),
        (2, PointClass::TypeA, ChamberRegion::W2) => match region {
            ChamberRegion::W21 => Ok(ExponentPrediction::Anisotropic {
                e1: 4.0 * k - 5.0 - 2.0 * r,
                e2: (2.0 * r + 1.0) * (k - 1.0),
            }),
            // the strip estimate: φ ≈ C/λ1^{4k−5−2r} on λ2 ≤ c
            ChamberRegion::W22 => radial(4.0 * k - 5.0 - 2.0 * r),
            _ => Err(ScanError::UnsupportedRegion {
                region,
                class,
                rank: p,
            }),
        },
        (3, PointClass::Regular, ChamberRegion::W1) => {
            radial(3.0 * (1.0 + 2.0 * r) * (k - 1.0) + 6.0 * k - 6.0)
        }
        (3, PointClass::Regular, ChamberRegion::W2) => {
            radial((1.0 + 2.0 * r) * (2.0 * k - 3.0) + 8.0 * k - 8.0)
        }
        (3, PointClass::Regular, ChamberRegion::W3) => {
            radial((1.0 + 2.0 * r) * (k - 1.0) + 8.0 * k - 8.0)
        }
        _ => Err(ScanError::UnsupportedRegion {
            region,
            class,
            rank: p,
        }),
    }
}

fn region_predictions(spec: &IntegrandSpec) -> BTreeMap<String, ExponentPrediction> {
    let mut map = BTreeMap::new();
    let p = spec.rank();
    let k = spec.k();
    let r = spec.r();
    let class = spec.point().class();
    if p == 1 {
        // Tail bound |ψ|^{2k} λ^{2ν+1} ≲ λ^{−(2ν+1)(k−1)}.
        let nu = spec.datum().bessel_order().nu();
        map.insert(
            "tail".to_string(),
            ExponentPrediction::Radial {
                e: (2.0 * nu + 1.0) * (k as f64 - 1.0),
            },
        );
        return map;
    }
    let regions: &[ChamberRegion] = match (p, class) {
        (2, PointClass::Regular) => &[ChamberRegion::W1, ChamberRegion::W2],
        (2, PointClass::TypeD) => &[ChamberRegion::W1, ChamberRegion::W21, ChamberRegion::W22],
        (2, PointClass::TypeA) => &[ChamberRegion::W1, ChamberRegion::W21, ChamberRegion::W22],
        (3, PointClass::Regular) => &[ChamberRegion::W1, ChamberRegion::W2, ChamberRegion::W3],
        _ => &[],
    };
    for &region in regions {
        if let Ok(pred) = predicted_exponent(p, region, class, k, r) {
            map.insert(format!("{region:?}"), pred);
        }
    }
    map
}

/// Partial integrals over nested dyadic balls, with classification.
pub fn growth_scan(spec: &IntegrandSpec, config: &ScanConfig) -> Result<GrowthReport, ScanError> {
    if config.levels < 6 {
        return Err(ScanError::TooFewLevels(config.levels));
    }
    let eval = spec.evaluator()?;
    let p = spec.rank() as usize;
    let base = spec_base_seed(spec, config.seed);
    let mut rows: Vec<AnnulusRow> = Vec::with_capacity(config.levels as usize + 1);
    let mut partial = 0.0;
    let mut var_sum = 0.0;
    for level in 0..=config.levels {
        let (r_lo, r_hi) = if level == 0 {
            (0.0, config.r0)
        } else {
            (
                config.r0 * 2f64.powi(level as i32 - 1),
                config.r0 * 2f64.powi(level as i32),
            )
        };
        let (inc, stderr) =
            integrate_region(&eval, p, r_lo, r_hi, config.samples_per_annulus, base, level as u64);
        partial += inc;
        var_sum += stderr * stderr;
        rows.push(AnnulusRow {
            radius: r_hi,
            partial,
            partial_stderr: var_sum.sqrt(),
            increment: inc,
            increment_stderr: stderr,
            flagged: stderr > 0.25 * inc.abs().max(1e-300),
        });
    }
    let classification = classify(&rows);
    let predicted_exponents = region_predictions(spec);
    let predicted_exponent = predicted_exponents
        .values()
        .map(|pred| match *pred {
            ExponentPrediction::Radial { e } => Some(e),
            ExponentPrediction::Anisotropic { .. } => None,
        })
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.into_iter().fold(f64::INFINITY, f64::min));
    Ok(GrowthReport {
        rows,
        classification,
        predicted_exponents,
        predicted_exponent,
    })
}

/// Do the region predictions alone already imply convergence?
pub fn predictions_imply_convergence(spec: &IntegrandSpec) -> bool {
    let preds = region_predictions(spec);
    !preds.is_empty()
        && preds
            .values()
            .all(|pred| pred.implies_convergence(spec.rank()))
}

/// Per-power verdict assembled from the L¹ lookup and the growth scan.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub space: String,
    pub point: Vec<f64>,
    pub class: PointClass,
    pub k: u32,
    pub in_l1: bool,
    pub in_l2: Option<bool>,
    /// None when the scan was Ambiguous.
    pub dichotomy_holds_at_k: Option<bool>,
    pub classification: Classification,
}

/// Result of scanning powers k = 1..=k_max.
#[derive(Clone, Debug, Serialize)]
pub struct MinKReport {
    pub verdicts: Vec<Verdict>,
    pub minimal_k: Option<u32>,
    pub l1_power: u32,
    /// AND over scanned powers; None if any was Ambiguous.
    pub dichotomy_holds: Option<bool>,
}

/// Scans convolution powers for the minimal k with a convergent chamber
/// integral, recording the dichotomy flag at each power.
pub fn min_k_scan(
    template: &IntegrandSpec,
    k_max: u32,
    config: &ScanConfig,
) -> Result<MinKReport, ScanError> {
    if k_max == 0 || k_max > 8 {
        return Err(ScanError::KMaxOutOfRange(k_max));
    }
    let l1_power = l1_power_lookup(template.datum(), template.point())?;
    let mut verdicts = Vec::new();
    let mut minimal_k = None;
    let mut all_resolved = true;
    let mut holds = true;
    for k in 1..=k_max {
        let spec = template.with_k(k)?;
        let report = growth_scan(&spec, config)?;
        let in_l1 = k >= l1_power;
        let in_l2 = match report.classification {
            Classification::Convergent { .. } => Some(true),
            Classification::Ambiguous => None,
            _ => Some(false),
        };
        let holds_at_k = in_l2.map(|l2| !(in_l1 && !l2));
        match holds_at_k {
            Some(h) => holds &= h,
            None => all_resolved = false,
        }
        if minimal_k.is_none() && in_l2 == Some(true) {
            minimal_k = Some(k);
        }
        verdicts.push(Verdict {
            space: spec.datum().id(),
            point: spec.point().coords().to_vec(),
            class: spec.point().class(),
            k,
            in_l1,
            in_l2,
            dichotomy_holds_at_k: holds_at_k,
            classification: report.classification,
        });
    }
    Ok(MinKReport {
        verdicts,
        minimal_k,
        l1_power,
        dichotomy_holds: if all_resolved { Some(holds) } else { None },
    })
}

// ---------------------------------------------------------------------------
// Deterministic panel-quadrature oracle
// ---------------------------------------------------------------------------

/// ∫_0^{r_max} φ_k dλ for a rank-one spec by composite Gauss-Legendre with
/// panel length ≤ π/(4k·t) (resolves the fastest oscillation).
pub fn quad_partial_rank1(spec: &IntegrandSpec, r_max: f64) -> Result<f64, ScanError> {
    let eval = spec.evaluator()?;
    let t = spec.point().coords()[0].max(1e-12);
    let panel = std::f64::consts::PI / (4.0 * spec.k() as f64 * t);
    let panels = (r_max / panel).ceil() as usize;
    Ok(gl16_panels(0.0, r_max, panels, |lam| {
        if lam <= 0.0 {
            0.0
        } else {
            eval.phi(&ChamberPoint::new_unchecked(vec![lam]))
        }
    }))
}

/// ∫ over an axis-aligned rectangle (a1,b1)×(a2,b2) ⊂ W of φ_k, tensor
/// Gauss-Legendre with oscillation-resolving panels.
pub fn quad_over_rectangle(
    spec: &IntegrandSpec,
    lam1: (f64, f64),
    lam2: (f64, f64),
) -> Result<f64, ScanError> {
    let eval = spec.evaluator()?;
    let x_max = spec
        .point()
        .coords()
        .iter()
        .cloned()
        .fold(1e-12, f64::max);
    let panel = std::f64::consts::PI / (4.0 * spec.k() as f64 * x_max);
    let n1 = ((lam1.1 - lam1.0) / panel).ceil() as usize;
    let n2 = ((lam2.1 - lam2.0) / panel).ceil() as usize;
    Ok(gl16_panels(lam1.0, lam1.1, n1, |l1| {
        gl16_panels(lam2.0, lam2.1.min(l1), n2, |l2| {
            if l2 <= 0.0 || l2 >= l1 {
                0.0
            } else {
                eval.phi(&ChamberPoint::new_unchecked(vec![l1, l2]))
            }
        })
    }))
}

// ---------------------------------------------------------------------------
// Divergence lower bounds
// ---------------------------------------------------------------------------

/// Rank-one ν = 0, k = 2 lower-bound construction: on each interval
/// tλ ∈ [mπ, mπ + π/2] the phase keeps cos⁴ ≥ 1/4, so the tail integral
/// dominates a harmonic series.
#[derive(Clone, Debug, Serialize)]
pub struct Rank1LowerBound {
    pub t: f64,
    /// λ-intervals of the construction.
    pub intervals: Vec<(f64, f64)>,
    pub per_interval: Vec<f64>,
    pub partials: Vec<f64>,
}

/// Asymptotic-remainder margin for J0: |J0(s)| ≥ √(2/(πs))(|cos χ| − m0(s)).
fn margin_j0(s: f64) -> f64 {
    1.0 / (8.0 * s) + 9.0 / (128.0 * s * s) + 75.0 / (1024.0 * s * s * s)
}

/// Same for J1 (order-one Hankel coefficients).
fn margin_j1(s: f64) -> f64 {
    3.0 / (8.0 * s) + 15.0 / (128.0 * s * s) + 105.0 / (1024.0 * s * s * s)
}

pub fn lower_bound_rank1(t: f64, n: u32) -> Rank1LowerBound {
    assert!(t > 0.0 && n >= 1);
    let mut intervals = Vec::with_capacity(n as usize);
    let mut per_interval = Vec::with_capacity(n as usize);
    let mut partials = Vec::with_capacity(n as usize);
    let mut acc = 0.0;
    for m in 1..=n {
        let s_lo = m as f64 * std::f64::consts::PI;
        let lam_lo = s_lo / t;
        let lam_hi = (2.0 * m as f64 + 1.0) * std::f64::consts::FRAC_PI_2 / t;
        // |cos χ| ≥ 1/√2 on the interval; subtract the Hankel remainder at
        // the interval's smallest argument.
        let amp = (0.5_f64.sqrt() - margin_j0(s_lo)).max(0.0);
        let bound = 4.0 / (std::f64::consts::PI.powi(2) * t * t)
            * amp.powi(4)
            * ((2.0 * m as f64 + 1.0) / (2.0 * m as f64)).ln();
        acc += bound;
        intervals.push((lam_lo, lam_hi));
        per_interval.push(bound);
        partials.push(acc);
    }
    Rank1LowerBound {
        t,
        intervals,
        per_interval,
        partials,
    }
}

/// Type-D (r = 0, k = 2) rectangle construction: pairwise-disjoint boxes
/// I_n inside the chamber where the phase alignment makes the kernel
/// determinant large; each contributes at least a fixed positive amount, so
/// partial sums grow linearly.
#[derive(Clone, Debug, Serialize)]
pub struct RectangleLowerBound {
    pub x: f64,
    pub eta: f64,
    /// (λ1_lo, λ1_hi, λ2_lo, λ2_hi) per rectangle.
    pub rectangles: Vec<(f64, f64, f64, f64)>,
    pub per_rectangle: Vec<f64>,
    pub partials: Vec<f64>,
    /// Normalizer applied so the bound compares against the library's
    /// normalized integrand φ.
    pub kernel_normalizer: f64,
}

pub fn lower_bound_type_d_rectangles(
    x: f64,
    eta: f64,
    n: u32,
) -> Result<RectangleLowerBound, ScanError> {
    if !(eta > 0.0 && eta < std::f64::consts::FRAC_PI_4) {
        return Err(ScanError::BadEta(eta));
    }
    assert!(x > 0.0 && n >= 1);
    let pi = std::f64::consts::PI;
    // φ here is |K_D|^{2k}(λ1²−λ2²)²λ1λ2 with K_D normalized by its λ→0
    // limit; the paper's raw determinant bound is divided by the same
    // normalizer to the 2k-th power (k = 2).
    let normalizer = TypeDKernel::new(0, x).zero_limit().powi(4);
    let mut rectangles = Vec::with_capacity(n as usize);
    let mut per_rectangle = Vec::with_capacity(n as usize);
    let mut partials = Vec::with_capacity(n as usize);
    let mut acc = 0.0;
    for m in 1..=n {
        let c1 = ((m as f64 + 1.0) * pi + 0.75 * pi) / x;
        let c2 = (m as f64 * pi + 0.25 * pi) / x;
        let half = eta / x;
        let (l1_lo, l1_hi) = (c1 - half, c1 + half);
        let (l2_lo, l2_hi) = (c2 - half, c2 + half);
        // Phase windows: |cos(xλ1 − 3π/4)| ≥ cos η and |cos(xλ2 − π/4)| ≥
        // cos η, while the crossed phases are ≤ sin η.
        let m1_hi = margin_j1(x * l1_lo);
        let m0_lo = margin_j0(x * l2_lo);
        let big = ((l1_lo / l2_hi).sqrt()) * (eta.cos() - m1_hi).max(0.0) * (eta.cos() - m0_lo).max(0.0);
        let small = ((l2_hi / l1_lo).sqrt())
            * (eta.sin() + margin_j1(x * l2_lo))
            * (eta.sin() + margin_j0(x * l1_lo));
        let det_lower = (2.0 / (pi * x)) * (big - small).max(0.0);
        // Worst-case measure factors over the rectangle.
        let lam_prod_min = l1_lo * l2_lo;
        let gap_max = (l1_hi * l1_hi - l2_lo * l2_lo).powi(2);
        let area = (2.0 * half) * (2.0 * half);
        let bound = area * det_lower.powi(4) * lam_prod_min / gap_max / normalizer;
        acc += bound;
        rectangles.push((l1_lo, l1_hi, l2_lo, l2_hi));
        per_rectangle.push(bound);
        partials.push(acc);
    }
    Ok(RectangleLowerBound {
        x,
        eta,
        rectangles,
        per_rectangle,
        partials,
        kernel_normalizer: normalizer,
    })
}

// ---------------------------------------------------------------------------
// Strip scans (type-A singular points)
// ---------------------------------------------------------------------------

/// Dyadic slab integrals over the strip S = [λ1_0, ∞) × [eps, c], with a
/// log-log fit of the slab mean density against λ1.
#[derive(Clone, Debug, Serialize)]
pub struct StripScan {
    pub rows: Vec<StripRow>,
    pub classification: Classification,
    /// Fitted e with mean density ∝ λ1^{−e}, and its 95% half-width.
    pub fitted_decay: f64,
    pub fitted_decay_ci95: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StripRow {
    pub lam1_lo: f64,
    pub lam1_hi: f64,
    pub integral: f64,
    pub stderr: f64,
    /// integral / slab width: the λ1 density profile.
    pub mean_density: f64,
}

pub fn strip_scan(
    spec: &IntegrandSpec,
    eps: f64,
    c: f64,
    lam1_start: f64,
    levels: u32,
    samples_per_level: u32,
    seed: u64,
) -> Result<StripScan, ScanError> {
    if spec.rank() != 2 {
        return Err(ScanError::UnsupportedRegion {
            region: ChamberRegion::W22,
            class: spec.point().class(),
            rank: spec.rank(),
        });
    }
    let eval = spec.evaluator()?;
    let base = spec_base_seed(spec, seed ^ 0x5ca1_ab1e);
    let mut rows = Vec::with_capacity(levels as usize);
    for level in 0..levels {
        let lo = lam1_start * 2f64.powi(level as i32);
        let hi = 2.0 * lo;
        // 32 λ1 sub-strata per slab; λ2 uniform on [eps, c].
        let strata = 32;
        let mut integral = 0.0;
        let mut variance = 0.0;
        let per = (samples_per_level as usize / strata).max(2);
        for si in 0..strata {
            let a = lo + (hi - lo) * si as f64 / strata as f64;
            let b = lo + (hi - lo) * (si + 1) as f64 / strata as f64;
            let vol = (b - a) * (c - eps);
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(base, level as u64, si as u64));
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..per {
                let l1 = a + (b - a) * rng.gen::<f64>();
                let l2 = eps + (c - eps) * rng.gen::<f64>();
                let phi = eval.phi(&ChamberPoint::new_unchecked(vec![l1, l2]));
                sum += phi;
                sum_sq += phi * phi;
            }
            let nf = per as f64;
            let mean = sum / nf;
            let var = ((sum_sq - sum * sum / nf) / (nf - 1.0)).max(0.0);
            integral += vol * mean;
            variance += vol * vol * var / nf;
        }
        rows.push(StripRow {
            lam1_lo: lo,
            lam1_hi: hi,
            integral,
            stderr: variance.sqrt(),
            mean_density: integral / (hi - lo),
        });
    }
    // Classification over cumulative slab sums.
    let mut partial = 0.0;
    let mut var_acc = 0.0;
    let pseudo: Vec<AnnulusRow> = rows
        .iter()
        .map(|r| {
            partial += r.integral;
            var_acc += r.stderr * r.stderr;
            AnnulusRow {
                radius: r.lam1_hi,
                partial,
                partial_stderr: var_acc.sqrt(),
                increment: r.integral,
                increment_stderr: r.stderr,
                flagged: r.stderr > 0.25 * r.integral.abs().max(1e-300),
            }
        })
        .collect();
    let classification = classify(&pseudo);
    let points: Vec<(f64, f64, f64)> = rows
        .iter()
        .map(|r| {
            let mid = (r.lam1_lo * r.lam1_hi).sqrt();
            (
                mid.ln(),
                r.mean_density.max(1e-300).ln(),
                (r.stderr / r.integral.abs().max(1e-300)).min(1.0),
            )
        })
        .collect();
    let (slope, sigma) = weighted_slope(&points);
    Ok(StripScan {
        rows,
        classification,
        fitted_decay: -slope,
        fitted_decay_ci95: 1.96 * sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::IntegrandSpec;
    use crate::spaces::{aiii_datum, classify_point, rank1_datum, CartanLabel};

    fn small_config(samples: u32) -> ScanConfig {
        ScanConfig {
            samples_per_annulus: samples,
            ..ScanConfig::default()
        }
    }

    fn ai_spec(k: u32, t: f64) -> IntegrandSpec {
        let datum = rank1_datum(CartanLabel::AI, None).unwrap();
        let point = classify_point(&[t]).unwrap();
        IntegrandSpec::new(datum, point, k).unwrap()
    }

    fn rows_from_increments(incs: &[f64]) -> Vec<AnnulusRow> {
        let mut partial = 0.0;
        incs.iter()
            .enumerate()
            .map(|(i, &inc)| {
                partial += inc;
                AnnulusRow {
                    radius: 16.0 * 2f64.powi(i as i32),
                    partial,
                    partial_stderr: 1e-6,
                    increment: inc,
                    increment_stderr: 1e-6,
                    flagged: false,
                }
            })
            .collect()
    }

    #[test]
    fn classifier_arms() {
        // geometric tail -> Convergent with a finite extrapolation
        let geo: Vec<f64> = (0..10).map(|i| 0.5f64.powi(i)).collect();
        match classify(&rows_from_increments(&geo)) {
            Classification::Convergent { limit_estimate } => {
                assert!((limit_estimate - 2.0).abs() < 1e-3)
            }
            other => panic!("{other:?}"),
        }
        // flat increments -> LogDivergent with slope increment/ln 2
        let flat = vec![0.7; 10];
        match classify(&rows_from_increments(&flat)) {
            Classification::LogDivergent { slope, .. } => {
                assert!((slope - 0.7 / std::f64::consts::LN_2).abs() < 1e-6)
            }
            other => panic!("{other:?}"),
        }
        // doubling increments -> PolyDivergent with exponent 1
        let doubling: Vec<f64> = (0..10).map(|i| 2f64.powi(i)).collect();
        match classify(&rows_from_increments(&doubling)) {
            Classification::PolyDivergent { exponent, .. } => {
                assert!((exponent - 1.0).abs() < 1e-6)
            }
            other => panic!("{other:?}"),
        }
        // straddling ratios -> Ambiguous, reported explicitly
        let mixed = vec![1.0, 0.5, 1.0, 2.0, 0.4, 1.7, 0.6, 1.2, 0.9, 1.05];
        assert_eq!(classify(&rows_from_increments(&mixed)), Classification::Ambiguous);
        // vanished increments -> Convergent at the reached partial
        let dead = vec![1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!(classify(&rows_from_increments(&dead)).is_convergent());
    }

    #[test]
    fn sampler_calibration_on_known_antiderivatives() {
        // ∫_1^R dλ/λ = ln R and ∫_1^R λ^{−2} dλ = 1 − 1/R, within 3σ.
        for &r in &[64.0, 1024.0, 8192.0] {
            let (log_est, log_sigma) = integrate_fn_1d(|x| 1.0 / x, 1.0, r, 20_000, 5);
            assert!(
                (log_est - r.ln()).abs() <= 3.0 * log_sigma.max(1e-12),
                "R={r}: {log_est} vs {}",
                r.ln()
            );
            let (sq_est, sq_sigma) = integrate_fn_1d(|x| x.powi(-2), 1.0, r, 20_000, 6);
            let expect = 1.0 - 1.0 / r;
            assert!(
                (sq_est - expect).abs() <= 3.0 * sq_sigma.max(1e-12),
                "R={r}: {sq_est} vs {expect}"
            );
        }
    }

    #[test]
    fn calibration_integrand_log() {
        // Stratified estimate over [0, R] of the rank-1 ν=0 k=2 integrand
        // matches deterministic panel quadrature within 3σ at every level.
        let spec = ai_spec(2, 1.0);
        let mut r = 16.0;
        while r <= 4096.0 {
            let (mc, sigma) = integrate_annulus(&spec, 0.0, r, 40_000, 7).unwrap();
            let quad = quad_partial_rank1(&spec, r).unwrap();
            assert!(
                (mc - quad).abs() <= 3.0 * sigma.max(1e-9),
                "R={r}: mc={mc} quad={quad} sigma={sigma}"
            );
            r *= 4.0;
        }
    }

    #[test]
    fn annulus_estimates_are_deterministic() {
        let spec = ai_spec(2, 1.0);
        let a = integrate_annulus(&spec, 16.0, 32.0, 10_000, 42).unwrap();
        let b = integrate_annulus(&spec, 16.0, 32.0, 10_000, 42).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
        let c = integrate_annulus(&spec, 16.0, 32.0, 10_000, 43).unwrap();
        assert_ne!(a.0.to_bits(), c.0.to_bits());
    }

    #[test]
    fn rank1_nu0_k3_converges_and_k2_log_diverges() {
        let config = small_config(60_000);
        let report3 = growth_scan(&ai_spec(3, 1.0), &config).unwrap();
        assert!(
            report3.classification.is_convergent(),
            "{:?}",
            report3.classification
        );

        let report2 = growth_scan(&ai_spec(2, 1.0), &config).unwrap();
        match report2.classification {
            Classification::LogDivergent { slope, .. } => {
                let expect = 3.0 / (2.0 * std::f64::consts::PI.powi(2));
                assert!(
                    (slope - expect).abs() < 0.05 * expect,
                    "slope {slope} vs {expect}"
                );
            }
            other => panic!("expected LogDivergent, got {other:?}"),
        }
    }

    #[test]
    fn partials_are_monotone() {
        let report = growth_scan(&ai_spec(2, 1.0), &small_config(20_000)).unwrap();
        for w in report.rows.windows(2) {
            assert!(w[1].partial >= w[0].partial);
        }
    }

    #[test]
    fn predicted_exponent_examples() {
        let e = predicted_exponent(2, ChamberRegion::W1, PointClass::Regular, 2, 1).unwrap();
        assert_eq!(e, ExponentPrediction::Radial { e: 5.0 });
        let e = predicted_exponent(2, ChamberRegion::W22, PointClass::TypeA, 2, 1).unwrap();
        assert_eq!(e, ExponentPrediction::Radial { e: 1.0 });
        let e = predicted_exponent(2, ChamberRegion::W1, PointClass::TypeD, 2, 1).unwrap();
        assert_eq!(e, ExponentPrediction::Radial { e: 4.0 });
        assert!(predicted_exponent(3, ChamberRegion::W1, PointClass::TypeD, 2, 1).is_err());
    }

    #[test]
    fn prediction_consistency_on_regular_cases() {
        // Wherever every regional exponent clears the polar test, the scan
        // must come back Convergent (sufficiency direction only).
        let config = small_config(40_000);
        for (p, q, k) in [(2u32, 3u32, 2u32), (2, 4, 2), (2, 2, 3)] {
            let datum = aiii_datum(p, q).unwrap();
            let point = classify_point(&[2.0, 1.0]).unwrap();
            let spec = IntegrandSpec::new(datum, point, k).unwrap();
            if predictions_imply_convergence(&spec) {
                let report = growth_scan(&spec, &config).unwrap();
                assert!(
                    report.classification.is_convergent(),
                    "p={p} q={q} k={k}: {:?}",
                    report.classification
                );
            }
        }
    }

    #[test]
    fn min_k_scan_rank1_ai() {
        let report = min_k_scan(&ai_spec(1, 1.0), 3, &small_config(60_000)).unwrap();
        assert_eq!(report.minimal_k, Some(3));
        assert_eq!(report.l1_power, 2);
        // k = 2 is absolutely continuous but not square-integrable.
        let v2 = &report.verdicts[1];
        assert!(v2.in_l1 && v2.in_l2 == Some(false));
        assert_eq!(report.dichotomy_holds, Some(false));
    }

    #[test]
    fn lower_bound_rank1_harmonic_growth() {
        let lb = lower_bound_rank1(1.0, 100);
        // Monotone partial sums.
        for w in lb.partials.windows(2) {
            assert!(w[1] >= w[0]);
        }
        // Harmonic-sum shape: LB(100)/LB(10) ≈ (ln 100 + γ)/(ln 10 + γ).
        let gamma = 0.577_215_664_901_532_9;
        let expect = (100f64.ln() + gamma) / (10f64.ln() + gamma);
        let got = lb.partials[99] / lb.partials[9];
        assert!(
            (got - expect).abs() < 0.1 * expect,
            "ratio {got} vs {expect}"
        );
    }

    #[test]
    fn lower_bound_rank1_dominated_by_integral() {
        let t = 1.0;
        let lb = lower_bound_rank1(t, 40);
        let spec = ai_spec(2, t);
        let r_n = lb.intervals.last().unwrap().1;
        let quad = quad_partial_rank1(&spec, r_n).unwrap();
        assert!(
            quad >= *lb.partials.last().unwrap(),
            "integral {quad} vs bound {}",
            lb.partials.last().unwrap()
        );
    }

    #[test]
    fn rectangles_land_inside_chamber_and_are_disjoint() {
        let lb = lower_bound_type_d_rectangles(1.0, std::f64::consts::PI / 8.0, 50).unwrap();
        for r in &lb.rectangles {
            assert!(r.2 > 0.0 && r.3 < r.0, "rectangle {r:?} outside chamber");
        }
        for w in lb.rectangles.windows(2) {
            assert!(w[0].1 < w[1].0 && w[0].3 < w[1].2, "overlap {w:?}");
        }
    }

    #[test]
    fn rectangle_bounds_approach_positive_constant() {
        let lb = lower_bound_type_d_rectangles(1.0, std::f64::consts::PI / 8.0, 60).unwrap();
        let tail: Vec<f64> = lb.per_rectangle[40..].to_vec();
        let first = tail[0];
        assert!(first > 0.0);
        for b in &tail {
            assert!((b / first - 1.0).abs() < 0.25, "not settling: {b} vs {first}");
        }
    }

    #[test]
    fn rectangle_bound_dominated_by_quadrature() {
        // Direct quadrature of φ over ∪ I_n must beat the analytic bound.
        let x = 1.0;
        let eta = std::f64::consts::PI / 8.0;
        let n = 50;
        let lb = lower_bound_type_d_rectangles(x, eta, n).unwrap();
        let datum = aiii_datum(2, 2).unwrap();
        let point = classify_point(&[x, x]).unwrap();
        let spec = IntegrandSpec::new(datum, point, 2).unwrap();
        let mut quad_total = 0.0;
        for rect in &lb.rectangles {
            quad_total += quad_over_rectangle(&spec, (rect.0, rect.1), (rect.2, rect.3)).unwrap();
        }
        let analytic = *lb.partials.last().unwrap();
        assert!(
            quad_total >= analytic,
            "quadrature {quad_total} must dominate the analytic bound {analytic}"
        );
    }

    #[test]
    fn strip_scan_type_a_q3_log_divergent() {
        let datum = aiii_datum(2, 3).unwrap();
        let point = classify_point(&[1.0, 0.0]).unwrap();
        let spec = IntegrandSpec::new(datum, point, 2).unwrap();
        let scan = strip_scan(&spec, 0.5, 4.0, 100.0, 7, 40_000, 5).unwrap();
        // mean density ∝ 1/λ1 (exponent 4k−5−2r = 1) within 0.05.
        assert!(
            (scan.fitted_decay - 1.0).abs() < 0.05,
            "decay {}",
            scan.fitted_decay
        );
        assert!(
            matches!(scan.classification, Classification::LogDivergent { .. }),
            "{:?}",
            scan.classification
        );
    }
}
