//! Spherical-function kernels and the dichotomy integrands φ_k.
//!
//! The rank-p kernel is det[f_r(x_i λ_j)] / (V(x²) V(λ²)) with
//! V(a) = ∏_{i<j}(a_i − a_j). Writing f_r(x λ) = g_r(x²λ²) turns the matrix
//! into rows of one smooth function sampled at products a_i b_j, so the
//! λ-side Vandermonde divides out exactly through Newton divided differences.
//! Near-coincident nodes switch to derivative form (confluent limits), which
//! keeps every wall of the Weyl chamber a removable singularity instead of a
//! 0/0 quotient. Singular orbit points use the same machinery on their
//! lower-dimensional kernels.
//!
//! All kernels here are normalized to 1 at λ = 0; the normalization constant
//! is computed as the fully confluent limit of the same divided-difference
//! code, never from a closed form.

use crate::spaces::{ChamberPoint, OrbitPoint, PointClass, RootDatum, SpaceError};
use crate::specfun::{self, gamma::gamma, BesselOrder};
use thiserror::Error;

const EPS: f64 = f64::EPSILON;

/// Node separation (relative, in the g-argument scale) below which divided
/// differences switch to derivative evaluation. Balances the 1/gap roundoff
/// amplification of the quotient against the series truncation of the
/// derivative form.
const CONFLUENCE_REL: f64 = 1e-4;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("power k must be >= 1")]
    BadPower,
    #[error("point of class {class:?} with {point_dim} coordinates does not fit a rank-{rank} space")]
    PointSpaceMismatch {
        class: PointClass,
        point_dim: usize,
        rank: u32,
    },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    SpecFun(#[from] specfun::SpecFunError),
}

/// A kernel evaluation plus the estimated relative error contributed by
/// divided-difference cancellation.
#[derive(Clone, Copy, Debug)]
pub struct KernelValue {
    pub value: f64,
    pub conditioning: f64,
}

/// First divided difference of g_r over (t1, t2), with an error estimate.
fn g_dd1(r: u32, t1: f64, t2: f64) -> (f64, f64) {
    let gap = t1 - t2;
    let scale = t1.abs().max(t2.abs()).max(1.0);
    if gap.abs() <= CONFLUENCE_REL * scale {
        let mid = 0.5 * (t1 + t2);
        // g' = −g_{r+1}/2, g''' = −g_{r+3}/8; midpoint expansion has no
        // second-order term, leaving an O(gap⁴) residual.
        let d1 = -0.5 * specfun::g_r(r + 1, mid);
        let d3 = -0.125 * specfun::g_r(r + 3, mid);
        let value = d1 + d3 * gap * gap / 24.0;
        (value, 8.0 * EPS * d1.abs().max(1e-300))
    } else {
        let ga = specfun::g_r(r, t1);
        let gb = specfun::g_r(r, t2);
        let value = (ga - gb) / gap;
        let err = 2.0 * EPS * (ga.abs() + gb.abs()) / gap.abs();
        (value, err)
    }
}

/// Second divided difference of g_r over descending (t1, t2, t3).
fn g_dd2(r: u32, t1: f64, t2: f64, t3: f64) -> (f64, f64) {
    let spread = t1 - t3;
    let scale = t1.abs().max(t3.abs()).max(1.0);
    if spread.abs() <= CONFLUENCE_REL * scale {
        let mu = (t1 + t2 + t3) / 3.0;
        // g'' = g_{r+2}/4, g'''' = g_{r+4}/16; centroid kills the odd term.
        let d2 = 0.25 * specfun::g_r(r + 2, mu);
        let d4 = specfun::g_r(r + 4, mu) / 16.0;
        let p2 = (t1 - mu).powi(2) + (t2 - mu).powi(2) + (t3 - mu).powi(2);
        let value = 0.5 * d2 + d4 * p2 / 48.0;
        (value, 8.0 * EPS * d2.abs().max(1e-300))
    } else {
        let (d12, e12) = g_dd1(r, t1, t2);
        let (d23, e23) = g_dd1(r, t2, t3);
        let value = (d12 - d23) / spread;
        let err = (e12 + e23 + EPS * (d12.abs() + d23.abs())) / spread.abs();
        (value, err)
    }
}

/// V(a) = ∏_{i<j}(a_i − a_j); positive for descending input.
fn vandermonde(a: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            v *= a[i] - a[j];
        }
    }
    v
}

/// det and propagated error for p ≤ 3, by cofactor expansion.
fn det_with_err(c: &[[f64; 3]], e: &[[f64; 3]], p: usize) -> (f64, f64) {
    match p {
        1 => (c[0][0], e[0][0]),
        2 => {
            let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
            let err = e[0][0] * c[1][1].abs()
                + e[1][1] * c[0][0].abs()
                + e[0][1] * c[1][0].abs()
                + e[1][0] * c[0][1].abs()
                + 2.0 * EPS * (c[0][0] * c[1][1]).abs().max((c[0][1] * c[1][0]).abs());
            (det, err)
        }
        3 => {
            let minor = |i: usize, j: usize| -> f64 {
                let rows: [usize; 2] = match i {
                    0 => [1, 2],
                    1 => [0, 2],
                    _ => [0, 1],
                };
                let cols: [usize; 2] = match j {
                    0 => [1, 2],
                    1 => [0, 2],
                    _ => [0, 1],
                };
                c[rows[0]][cols[0]] * c[rows[1]][cols[1]] - c[rows[0]][cols[1]] * c[rows[1]][cols[0]]
            };
            let det =
                c[0][0] * minor(0, 0) - c[0][1] * minor(0, 1) + c[0][2] * minor(0, 2);
            let mut err = 0.0;
            let mut magnitude = 0.0_f64;
            for i in 0..3 {
                for j in 0..3 {
                    let m = minor(i, j);
                    err += e[i][j] * m.abs();
                    magnitude = magnitude.max((c[i][j] * m).abs());
                }
            }
            (det, err + 8.0 * EPS * magnitude)
        }
        _ => unreachable!("rank above 3"),
    }
}

/// Prepared rank-p regular kernel: evaluates
/// det[g_r(a_i b_j)] / (V(a) V(b)) stably and normalized to 1 at λ = 0.
#[derive(Clone, Debug)]
pub struct RegularKernel {
    r: u32,
    a: Vec<f64>,
    v_a: f64,
    norm: f64,
}

impl RegularKernel {
    pub fn new(r: u32, x: &[f64]) -> Self {
        let a: Vec<f64> = x.iter().map(|&xi| xi * xi).collect();
        let v_a = vandermonde(&a);
        let mut kernel = Self {
            r,
            a,
            v_a,
            norm: 1.0,
        };
        kernel.norm = kernel.eval_raw_b(&vec![0.0; x.len()]).value;
        kernel
    }

    /// The λ → 0 confluent limit of the raw kernel (the normalizer).
    pub fn zero_limit(&self) -> f64 {
        self.norm
    }

    fn eval_raw_b(&self, b: &[f64]) -> KernelValue {
        let p = self.a.len();
        let mut c = [[0.0_f64; 3]; 3];
        let mut e = [[0.0_f64; 3]; 3];
        for (i, &ai) in self.a.iter().enumerate() {
            let x: Vec<f64> = b.iter().map(|&bj| ai * bj).collect();
            c[i][0] = specfun::g_r(self.r, x[0]);
            e[i][0] = EPS * c[i][0].abs();
            if p >= 2 {
                let (d, de) = g_dd1(self.r, x[0], x[1]);
                c[i][1] = ai * d;
                e[i][1] = ai * de;
            }
            if p >= 3 {
                let (d, de) = g_dd2(self.r, x[0], x[1], x[2]);
                c[i][2] = ai * ai * d;
                e[i][2] = ai * ai * de;
            }
        }
        let (det, det_err) = det_with_err(&c, &e, p);
        // det[h_i(b_j)] = (−1)^{p(p−1)/2} det[c] V(b); the V(b) cancels.
        let sign = if (p * (p - 1) / 2) % 2 == 1 { -1.0 } else { 1.0 };
        let value = sign * det / self.v_a;
        KernelValue {
            value,
            conditioning: det_err / det.abs().max(1e-300),
        }
    }

    /// Normalized kernel at λ (descending chamber coordinates).
    pub fn eval(&self, lam: &[f64]) -> KernelValue {
        let b: Vec<f64> = lam.iter().map(|&l| l * l).collect();
        let raw = self.eval_raw_b(&b);
        KernelValue {
            value: raw.value / self.norm,
            conditioning: raw.conditioning,
        }
    }
}

/// Prepared type-D kernel
/// det[[λ1 f_r'(xλ1), λ2 f_r'(xλ2)], [f_r(xλ1), f_r(xλ2)]] / (λ1²−λ2²),
/// normalized to 1 at λ = 0.
#[derive(Clone, Debug)]
pub struct TypeDKernel {
    r: u32,
    x: f64,
    norm: f64,
}

impl TypeDKernel {
    pub fn new(r: u32, x: f64) -> Self {
        assert!(x > 0.0, "type-D kernels need x > 0");
        // K(0) = U'(0)·V(0) with U(b) = −x·b·g_{r+1}(x²b), V(b) = g_r(x²b).
        let norm = -x * specfun::g_r(r + 1, 0.0) * specfun::g_r(r, 0.0);
        Self { r, x, norm }
    }

    pub fn zero_limit(&self) -> f64 {
        self.norm
    }

    /// Unnormalized value; stable through the diagonal λ1 = λ2.
    pub fn eval_raw(&self, lam: &[f64]) -> KernelValue {
        let (b1, b2) = (lam[0] * lam[0], lam[1] * lam[1]);
        let a = self.x * self.x;
        let (x1, x2) = (a * b1, a * b2);
        let g1 = specfun::g_r(self.r + 1, x1);
        let g2 = specfun::g_r(self.r + 1, x2);
        let v2 = specfun::g_r(self.r, x2);
        let u2 = -self.x * b2 * g2;
        // Divided differences of U(b) = −x·b·g_{r+1}(x²b) and V(b) = g_r(x²b).
        let (dg1, eg1) = g_dd1(self.r + 1, x1, x2);
        let u_dd = -self.x * (g1 + b2 * a * dg1);
        let u_dd_err = self.x * (EPS * g1.abs() + b2 * a * eg1);
        let (dv, ev) = g_dd1(self.r, x1, x2);
        let v_dd = a * dv;
        let v_dd_err = a * ev;
        let value = u_dd * v2 - v_dd * u2;
        let err = u_dd_err * v2.abs()
            + v_dd_err * u2.abs()
            + EPS * ((u_dd * v2).abs() + (v_dd * u2).abs()) * 2.0;
        KernelValue {
            value,
            conditioning: err / value.abs().max(1e-300),
        }
    }

    pub fn eval(&self, lam: &[f64]) -> KernelValue {
        let raw = self.eval_raw(lam);
        KernelValue {
            value: raw.value / self.norm,
            conditioning: raw.conditioning,
        }
    }
}

/// Prepared type-A kernel (f_r(xλ1) − f_r(xλ2)) / (λ1² − λ2²), normalized
/// to 1 at λ = 0.
#[derive(Clone, Debug)]
pub struct TypeAKernel {
    r: u32,
    x: f64,
    norm: f64,
}

impl TypeAKernel {
    pub fn new(r: u32, x: f64) -> Self {
        assert!(x > 0.0, "type-A kernels need x > 0");
        let a = x * x;
        // limit of x²·g_r'(x²b) at b = 0
        let norm = -0.5 * a * specfun::g_r(r + 1, 0.0);
        Self { r, x, norm }
    }

    pub fn zero_limit(&self) -> f64 {
        self.norm
    }

    pub fn eval_raw(&self, lam: &[f64]) -> f64 {
        let a = self.x * self.x;
        let (d, _) = g_dd1(self.r, a * lam[0] * lam[0], a * lam[1] * lam[1]);
        a * d
    }

    pub fn eval(&self, lam: &[f64]) -> f64 {
        self.eval_raw(lam) / self.norm
    }
}

/// Prepared rank-one kernel 2^ν Γ(ν+1) f_ν(tλ); equals 1 at λ = 0.
#[derive(Clone, Debug)]
pub struct RankOneKernel {
    nu: f64,
    t: f64,
    norm: f64,
}

impl RankOneKernel {
    pub fn new(order: BesselOrder, t: f64) -> Self {
        assert!(t > 0.0, "rank-one kernels need t > 0");
        let nu = order.nu();
        let norm = 2f64.powf(nu) * gamma(nu + 1.0);
        Self { nu, t, norm }
    }

    pub fn eval(&self, lam: f64) -> f64 {
        self.norm * specfun::f_nu(self.nu, self.t * lam).expect("validated order and argument")
    }
}

/// Normalized spherical function ψ(λ, X) for a single orbit point, with the
/// evaluation strategy chosen by the point class.
#[derive(Clone, Debug)]
pub enum SphericalKernel {
    RankOne(RankOneKernel),
    Regular(RegularKernel),
    TypeD(TypeDKernel),
    TypeA(TypeAKernel),
    /// The zero orbit: ψ ≡ 1.
    Constant,
}

impl SphericalKernel {
    pub fn for_point(datum: &RootDatum, point: &OrbitPoint) -> Result<Self, KernelError> {
        if point.dim() != datum.rank as usize {
            return Err(KernelError::PointSpaceMismatch {
                class: point.class(),
                point_dim: point.dim(),
                rank: datum.rank,
            });
        }
        let r = datum.r();
        Ok(match point.class() {
            PointClass::Zero => SphericalKernel::Constant,
            PointClass::Regular if datum.rank == 1 => SphericalKernel::RankOne(
                RankOneKernel::new(datum.bessel_order(), point.coords()[0]),
            ),
            PointClass::Regular => SphericalKernel::Regular(RegularKernel::new(r, point.coords())),
            PointClass::TypeD => SphericalKernel::TypeD(TypeDKernel::new(r, point.coords()[0])),
            PointClass::TypeA => SphericalKernel::TypeA(TypeAKernel::new(r, point.coords()[0])),
        })
    }

    pub fn eval(&self, lam: &[f64]) -> f64 {
        match self {
            SphericalKernel::RankOne(k) => k.eval(lam[0]),
            SphericalKernel::Regular(k) => k.eval(lam).value,
            SphericalKernel::TypeD(k) => k.eval(lam).value,
            SphericalKernel::TypeA(k) => k.eval(lam),
            SphericalKernel::Constant => 1.0,
        }
    }
}

/// ψ(λ, X) normalized so ψ(0) = 1, dispatched on the point class.
pub fn spherical_normalized(
    datum: &RootDatum,
    point: &OrbitPoint,
    lam: &ChamberPoint,
) -> Result<f64, KernelError> {
    Ok(SphericalKernel::for_point(datum, point)?.eval(lam.coords()))
}

/// Everything needed to evaluate the dichotomy integrand φ_k(λ, X).
#[derive(Clone, Debug)]
pub struct IntegrandSpec {
    datum: RootDatum,
    point: OrbitPoint,
    k: u32,
}

impl IntegrandSpec {
    pub fn new(datum: RootDatum, point: OrbitPoint, k: u32) -> Result<Self, KernelError> {
        if k == 0 {
            return Err(KernelError::BadPower);
        }
        if point.dim() != datum.rank as usize {
            return Err(KernelError::PointSpaceMismatch {
                class: point.class(),
                point_dim: point.dim(),
                rank: datum.rank,
            });
        }
        Ok(Self { datum, point, k })
    }

    pub fn datum(&self) -> &RootDatum {
        &self.datum
    }

    pub fn point(&self) -> &OrbitPoint {
        &self.point
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn with_k(&self, k: u32) -> Result<Self, KernelError> {
        Self::new(self.datum.clone(), self.point.clone(), k)
    }

    pub fn r(&self) -> u32 {
        self.datum.r()
    }

    pub fn rank(&self) -> u32 {
        self.datum.rank
    }

    /// Stable identifier feeding the deterministic seed derivation.
    pub fn cache_key(&self) -> String {
        format!(
            "{}|X={:?}|k={}",
            self.datum.id(),
            self.point.coords(),
            self.k
        )
    }

    /// Prepares the kernel once for repeated φ evaluation.
    pub fn evaluator(&self) -> Result<PhiEvaluator, KernelError> {
        Ok(PhiEvaluator {
            kernel: SphericalKernel::for_point(&self.datum, &self.point)?,
            datum: self.datum.clone(),
            two_k: 2 * self.k as i32,
        })
    }
}

/// Prepared φ_k evaluator: φ_k(λ) = |ψ(λ)|^{2k} · δ(λ).
///
/// This matches the chamber integrand whose finiteness decides L²
/// membership; factors depending only on X are dropped, so verdicts and
/// growth exponents are unchanged while values stay scale-free.
#[derive(Clone, Debug)]
pub struct PhiEvaluator {
    kernel: SphericalKernel,
    datum: RootDatum,
    two_k: i32,
}

impl PhiEvaluator {
    pub fn phi(&self, lam: &ChamberPoint) -> f64 {
        let psi = self.kernel.eval(lam.coords());
        psi.abs().powi(self.two_k) * self.datum.plancherel_density(lam)
    }

    pub fn kernel(&self) -> &SphericalKernel {
        &self.kernel
    }
}

/// φ_k(λ, X), dispatching on the point class; nonnegative, finite on walls.
pub fn integrand_phi(spec: &IntegrandSpec, lam: &ChamberPoint) -> Result<f64, KernelError> {
    Ok(spec.evaluator()?.phi(lam))
}

/// Rank-one kernel ψ_ν(tλ) = 2^ν Γ(ν+1) (tλ)^{−ν} J_ν(tλ), normalized to 1
/// at λ = 0.
pub fn kernel_rank1(order: BesselOrder, t: f64, lam: f64) -> f64 {
    RankOneKernel::new(order, t).eval(lam)
}

/// Normalized regular determinant kernel (p = X.dim() ≤ 3).
pub fn kernel_regular(r: u32, x: &OrbitPoint, lam: &ChamberPoint) -> Result<KernelValue, KernelError> {
    if x.class() != PointClass::Regular {
        return Err(KernelError::PointSpaceMismatch {
            class: x.class(),
            point_dim: x.dim(),
            rank: x.dim() as u32,
        });
    }
    Ok(RegularKernel::new(r, x.coords()).eval(lam.coords()))
}

/// Unnormalized type-D kernel at equal coordinates x.
pub fn kernel_type_d(r: u32, x: f64, lam: &ChamberPoint) -> KernelValue {
    TypeDKernel::new(r, x).eval_raw(lam.coords())
}

/// Unnormalized type-A kernel at axis coordinate x.
pub fn kernel_type_a(r: u32, x: f64, lam: &ChamberPoint) -> f64 {
    TypeAKernel::new(r, x).eval_raw(lam.coords())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{aiii_datum, classify_point, rank1_datum, CartanLabel};

    fn close(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol * b.abs().max(1e-300),
            "{a} vs {b} (rel {:.3e})",
            (a - b).abs() / b.abs().max(1e-300)
        );
    }

    const J0_1: f64 = 0.765_197_686_557_966_6;
    const J1_1: f64 = 0.440_050_585_744_933_5;
    const J0_PI: f64 = -0.304_242_177_644_093_86;
    const J0_HALF_PI: f64 = 0.472_001_215_768_234_77;

    #[test]
    fn rank1_examples() {
        let nu0 = BesselOrder::new(0.0).unwrap();
        close(kernel_rank1(nu0, 1.0, 0.0), 1.0, 1e-14);
        close(kernel_rank1(nu0, 1.0, 1.0), J0_1, 1e-11);
        let nu1 = BesselOrder::new(1.0).unwrap();
        close(kernel_rank1(nu1, 1.0, 1.0), 2.0 * J1_1, 1e-11);
    }

    #[test]
    fn p1_determinant_reduces_to_rank1() {
        // AIII with p = 1: the 1×1 determinant kernel must equal the
        // rank-one kernel of order ν = q − 1 to 1e-9 across a grid.
        for q in 2..=5u32 {
            let nu = BesselOrder::new((q - 1) as f64).unwrap();
            let x = classify_point(&[1.3]).unwrap();
            let kernel = RegularKernel::new(q - 1, x.coords());
            for i in 1..=50 {
                let lam = 0.2 * i as f64;
                let det_form = kernel.eval(&[lam]).value;
                let rank1 = kernel_rank1(nu, 1.3, lam);
                close(det_form, rank1, 1e-9);
            }
        }
    }

    #[test]
    fn regular_matches_naive_far_from_walls() {
        let x = classify_point(&[2.0, 1.0]).unwrap();
        for r in 0..4u32 {
            let kernel = RegularKernel::new(r, x.coords());
            for &(l1, l2) in &[(3.0, 1.0), (7.5, 2.2), (12.0, 5.0)] {
                let stable = kernel.eval(&[l1, l2]).value * kernel.zero_limit();
                let (a1, a2) = (4.0, 1.0);
                let (b1, b2) = (l1 * l1, l2 * l2);
                let naive = (specfun::g_r(r, a1 * b1) * specfun::g_r(r, a2 * b2)
                    - specfun::g_r(r, a1 * b2) * specfun::g_r(r, a2 * b1))
                    / ((a1 - a2) * (b1 - b2));
                close(stable, naive, 1e-10);
            }
        }
    }

    #[test]
    fn regular_p3_matches_naive() {
        let x = classify_point(&[3.0, 2.0, 1.0]).unwrap();
        let kernel = RegularKernel::new(1, x.coords());
        let lam = [4.0, 2.5, 1.0];
        let stable = kernel.eval(&lam).value * kernel.zero_limit();
        let a: Vec<f64> = x.coords().iter().map(|v| v * v).collect();
        let b: Vec<f64> = lam.iter().map(|v| v * v).collect();
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = specfun::g_r(1, a[i] * b[j]);
            }
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        let naive = det / (vandermonde(&a) * vandermonde(&b));
        close(stable, naive, 1e-9);
    }

    #[test]
    fn regular_confluent_matches_near_wall() {
        // Stable value just off the wall vs the exact-wall confluent limit.
        let x = classify_point(&[2.0, 1.0]).unwrap();
        let kernel = RegularKernel::new(1, x.coords());
        let off_wall = kernel.eval(&[2.0 + 1e-9, 2.0]).value;
        let on_wall = kernel.eval(&[2.0, 2.0]).value;
        close(off_wall, on_wall, 1e-6);

        // Naive-quotient oracle, parameterized by the b-gap, down to where
        // the quotient itself is still trustworthy (rel. error ~ ε/gap).
        // Spans both sides of the confluence threshold.
        let naive_at_b = |gap_b: f64| {
            let (b1, b2) = (4.0 + gap_b, 4.0_f64);
            let (a1, a2) = (4.0, 1.0);
            (specfun::g_r(1, a1 * b1) * specfun::g_r(1, a2 * b2)
                - specfun::g_r(1, a1 * b2) * specfun::g_r(1, a2 * b1))
                / ((a1 - a2) * (b1 - b2))
        };
        for &gap_b in &[1e-2_f64, 1e-3, 1e-4, 1e-5, 1e-6] {
            let l1 = (4.0 + gap_b).sqrt();
            let stable = kernel.eval(&[l1, 2.0]).value * kernel.zero_limit();
            let naive = naive_at_b(gap_b);
            close(stable, naive, 1e-8);
        }
    }

    #[test]
    fn normalized_kernel_tends_to_one_at_zero() {
        for (r, coords) in [(0u32, vec![2.0, 1.0]), (2, vec![3.0, 0.5]), (1, vec![3.0, 2.0, 1.0])] {
            let x = classify_point(&coords).unwrap();
            let kernel = RegularKernel::new(r, x.coords());
            let lam: Vec<f64> = (0..coords.len()).map(|i| 1e-6 * (coords.len() - i) as f64).collect();
            close(kernel.eval(&lam).value, 1.0, 1e-8);
        }
    }

    #[test]
    fn type_d_specfun_identity() {
        // r = 0, x = 1, λ = (3,1): the f_0' = −J_1 route vs the raw kernel.
        let x = 1.0;
        let lam = [3.0, 1.0];
        let k = TypeDKernel::new(0, x).eval_raw(&lam);
        let j0 = |s: f64| specfun::f_r(0, s);
        let j1 = |s: f64| -specfun::f_r_prime(0, s);
        let direct = (lam[0] * (-j1(lam[0])) * j0(lam[1]) - lam[1] * (-j1(lam[1])) * j0(lam[0]))
            / (lam[0] * lam[0] - lam[1] * lam[1]);
        close(k.value, direct, 1e-10);
    }

    #[test]
    fn type_d_confluent_diagonal_is_finite() {
        let k = TypeDKernel::new(1, 2.0);
        let v = k.eval_raw(&[5.0, 5.0]);
        assert!(v.value.is_finite());
        // One-sided continuity onto the diagonal.
        let off = k.eval_raw(&[5.0 + 1e-8, 5.0]);
        close(off.value, v.value, 1e-6);
    }

    #[test]
    fn type_d_matches_x_confluent_regular_limit() {
        // K_D should equal lim_{x2→x1} regular kernel up to one constant.
        // The x2 → x1 limit is taken by quadratic Richardson over exactly
        // halving gaps (error O(gap³)).
        let r = 1u32;
        let x = 1.5;
        let d = TypeDKernel::new(r, x);
        let limit = |lam: &[f64]| {
            let at = |h: f64| {
                let reg = RegularKernel::new(r, &[x, x * (1.0 - h)]);
                reg.eval(lam).value * reg.zero_limit()
            };
            let h = 1e-4;
            let (k1, k2, k3) = (at(h), at(0.5 * h), at(0.25 * h));
            let r1 = 2.0 * k2 - k1;
            let r2 = 2.0 * k3 - k2;
            (4.0 * r2 - r1) / 3.0
        };
        let lam0 = [2.0, 1.0];
        let c = limit(&lam0) / d.eval_raw(&lam0).value;
        let grid: Vec<[f64; 2]> = (1..=30)
            .map(|i| {
                let l1 = 0.4 * i as f64 + 1.0;
                [l1, 0.5 * l1]
            })
            .collect();
        let lhs: Vec<f64> = grid.iter().map(|lam| limit(lam)).collect();
        let scale = lhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for (lam, &l) in grid.iter().zip(&lhs) {
            let rhs = c * d.eval_raw(lam).value;
            assert!(
                (l - rhs).abs() <= 1e-6 * scale,
                "λ={lam:?}: {l} vs {rhs} (scale {scale})"
            );
        }
    }

    #[test]
    fn type_a_examples() {
        // r = 0, x = 1, λ = (π, π/2).
        let k = TypeAKernel::new(0, 1.0);
        let pi = std::f64::consts::PI;
        let expect = (J0_PI - J0_HALF_PI) / (pi * pi - pi * pi / 4.0);
        close(k.eval_raw(&[pi, pi / 2.0]), expect, 1e-10);

        // λ2 → λ1 tends to x² g_r'(x²λ1²).
        let ka = TypeAKernel::new(2, 1.3);
        let l1 = 2.0;
        let limit = 1.3 * 1.3 * specfun::g_r_deriv(2, 1.3 * 1.3 * l1 * l1, 1);
        close(ka.eval_raw(&[l1, l1]), limit, 1e-10);

        // Equal f_r values give a zero kernel: bisect J0(b) = J0(2) on [5.5, 7].
        let target = specfun::f_r(0, 2.0);
        let (mut lo, mut hi) = (5.5, 7.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if specfun::f_r(0, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let b = 0.5 * (lo + hi);
        let v = k.eval_raw(&[b, 2.0]);
        assert!(v.abs() < 1e-12, "kernel at equal f values: {v}");
    }

    #[test]
    fn integrand_examples() {
        // Rank-1, ν = 0, k = 2, t = 1, λ = 5: J0(5)^4 · 5.
        let ai = rank1_datum(CartanLabel::AI, None).unwrap();
        let point = classify_point(&[1.0]).unwrap();
        let spec = IntegrandSpec::new(ai, point, 2).unwrap();
        let lam = ChamberPoint::new(vec![5.0]).unwrap();
        let j0_5: f64 = -0.177_596_771_314_338_3;
        close(
            integrand_phi(&spec, &lam).unwrap(),
            j0_5.powi(4) * 5.0,
            1e-9,
        );
    }

    #[test]
    fn integrand_finite_on_wall_approach() {
        let datum = aiii_datum(2, 3).unwrap();
        let x = classify_point(&[2.0, 1.0]).unwrap();
        let spec = IntegrandSpec::new(datum, x, 2).unwrap();
        let eval = spec.evaluator().unwrap();
        let mut prev = None;
        for &eps in &[1e-3, 1e-6, 1e-9, 1e-12] {
            let lam = ChamberPoint::new_unchecked(vec![20.0 + eps, 20.0]);
            let phi = eval.phi(&lam);
            assert!(phi.is_finite() && phi >= 0.0);
            if let Some(p) = prev {
                // The wall is a zero of φ (the density vanishes), approached
                // smoothly: values shrink with the gap.
                assert!(phi <= p);
            }
            prev = Some(phi);
        }
    }

    #[test]
    fn integrand_symmetric_under_coordinate_swap() {
        let datum = aiii_datum(2, 4).unwrap();
        let x = classify_point(&[2.0, 1.0]).unwrap();
        let spec = IntegrandSpec::new(datum, x, 2).unwrap();
        let eval = spec.evaluator().unwrap();
        let lam = ChamberPoint::new(vec![9.0, 4.0]).unwrap();
        // Sorting is the caller's job for raw slices; ChamberPoint enforces
        // order, so evaluate the kernel directly on the swap.
        let psi_sorted = eval.kernel().eval(&[9.0, 4.0]);
        let psi_swapped = eval.kernel().eval(&[4.0, 9.0]);
        close(psi_swapped, psi_sorted, 1e-10);
        let _ = eval.phi(&lam);
    }

    #[test]
    fn kernel_symmetric_in_x_coordinates() {
        // Row swap flips both det[c] and V(a): the kernel is unchanged.
        let sorted = RegularKernel::new(1, &[2.0, 1.0]);
        let swapped = RegularKernel::new(1, &[1.0, 2.0]);
        for &(l1, l2) in &[(3.0, 1.0), (8.0, 7.9), (20.0, 4.0)] {
            close(swapped.eval(&[l1, l2]).value, sorted.eval(&[l1, l2]).value, 1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        let datum = aiii_datum(2, 3).unwrap();
        let x = classify_point(&[2.0, 1.0]).unwrap();
        assert!(matches!(
            IntegrandSpec::new(datum.clone(), x.clone(), 0),
            Err(KernelError::BadPower)
        ));
        let wrong_dim = classify_point(&[2.0]).unwrap();
        assert!(IntegrandSpec::new(datum, wrong_dim, 2).is_err());
    }
}

