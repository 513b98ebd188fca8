//! Prepackaged verdict experiments: every headline claim the library can
//! check numerically, expressed as a table of pass/fail rows with pinned
//! tolerances. The acceptance suite asserts these rows; the command-line
//! front end prints them. Open experiments return rows with `pass: None` —
//! data is reported but no verdict is asserted.

use serde::Serialize;

use crate::dichotomy::{
    growth_scan, lower_bound_rank1, lower_bound_type_d_rectangles, min_k_scan, quad_over_rectangle,
    quad_partial_rank1, strip_scan, Classification, ScanConfig, ScanError, StripScan,
};
use crate::kernels::{IntegrandSpec, RankOneKernel, RegularKernel, TypeDKernel};
use crate::haarmc::{
    calibrate_scale, validate_product_formula, McError,
    McSpace,
};
use crate::spaces::{aiii_datum, classify_point, rank1_datum, CartanLabel, OrbitPoint};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Kernel(#[from] crate::kernels::KernelError),
    #[error(transparent)]
    Space(#[from] crate::spaces::SpaceError),
}

/// One verified claim.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub id: String,
    pub statement: String,
    pub observed: String,
    /// None marks an open experiment (reported, not asserted).
    pub pass: Option<bool>,
}

fn row(id: &str, statement: &str, observed: String, pass: bool) -> CheckRow {
    CheckRow {
        id: id.to_string(),
        statement: statement.to_string(),
        observed,
        pass: Some(pass),
    }
}

/// Budgets for the experiment tables.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub scan: ScanConfig,
    pub mc_draws: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            scan: ScanConfig::default(),
            mc_draws: 100_000,
        }
    }
}

fn point(coords: &[f64]) -> OrbitPoint {
    classify_point(coords).expect("experiment points are valid")
}

/// Slope from an ordinary least-squares line fit, plus R².
fn linear_fit_r2(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ym).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

// ---------------------------------------------------------------------------
// Rank-one family table
// ---------------------------------------------------------------------------

/// The rank-one families exercised by the verdict table.
pub fn rank1_family_list() -> Vec<(CartanLabel, Option<u32>)> {
    vec![
        (CartanLabel::AI, None),
        (CartanLabel::AII, None),
        (CartanLabel::AIII, Some(2)),
        (CartanLabel::AIII, Some(3)),
        (CartanLabel::AIII, Some(5)),
        (CartanLabel::BDI, Some(3)),
        (CartanLabel::BDI, Some(4)),
        (CartanLabel::CII, Some(2)),
        (CartanLabel::FII, None),
    ]
}

/// Minimal square-integrability power per rank-one family: 3 when the
/// kernel order ν is zero (the AI case), 2 otherwise; the dichotomy fails
/// exactly in the ν = 0 case.
pub fn rank1_family_table(budget: &Budget) -> Result<Vec<CheckRow>, ExperimentError> {
    let mut rows = Vec::new();
    for (label, q) in rank1_family_list() {
        let datum = rank1_datum(label, q)?;
        let nu = datum.bessel_order().nu();
        let expected_min_k = if nu == 0.0 { 3 } else { 2 };
        let expected_holds = nu > 0.0;
        let spec = IntegrandSpec::new(datum.clone(), point(&[1.0]), 1)?;
        let report = min_k_scan(&spec, 3, &budget.scan)?;
        let pass = report.minimal_k == Some(expected_min_k)
            && report.dichotomy_holds == Some(expected_holds);
        rows.push(row(
            &format!("rank1/{}", datum.id()),
            &format!(
                "minimal k = {expected_min_k}, dichotomy {}",
                if expected_holds { "holds" } else { "fails" }
            ),
            format!(
                "minimal k = {:?}, dichotomy_holds = {:?} (nu = {nu})",
                report.minimal_k, report.dichotomy_holds
            ),
            pass,
        ));
    }
    Ok(rows)
}

/// Quantitative ν = 0 divergence: the k = 2 scan is log-divergent with
/// slope 3/(2π²t²) per ln R within 5%, and the interval lower bounds stay
/// below the truncated integrals.
pub fn rank1_nu0_quantitative(ts: &[f64], budget: &Budget) -> Result<Vec<CheckRow>, ExperimentError> {
    let datum = rank1_datum(CartanLabel::AI, None)?;
    let mut rows = Vec::new();
    for &t in ts {
        let spec = IntegrandSpec::new(datum.clone(), point(&[t]), 2)?;
        let report = growth_scan(&spec, &budget.scan)?;
        let expect = 3.0 / (2.0 * std::f64::consts::PI.powi(2) * t * t);
        let (observed, pass) = match report.classification {
            Classification::LogDivergent { slope, .. } => (
                format!("LogDivergent slope {slope:.5} (expect {expect:.5})"),
                (slope - expect).abs() <= 0.05 * expect,
            ),
            other => (format!("{other:?}"), false),
        };
        rows.push(row(
            &format!("rank1-nu0/t={t}"),
            "k = 2 log-divergent with slope 3/(2pi^2 t^2) within 5%",
            observed,
            pass,
        ));

        let lb = lower_bound_rank1(t, 40);
        let r_n = lb.intervals.last().unwrap().1;
        let integral = quad_partial_rank1(&spec, r_n)?;
        let bound = *lb.partials.last().unwrap();
        rows.push(row(
            &format!("rank1-nu0/domination t={t}"),
            "interval lower bounds dominated by truncated integrals",
            format!("I({r_n:.1}) = {integral:.4} >= LB = {bound:.4}"),
            integral >= bound,
        ));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Rank-two regular points
// ---------------------------------------------------------------------------

/// Regular X = (2,1), k = 2 chamber integrals converge for each q; the
/// minimal power is 2 and the dichotomy holds.
pub fn regular_p2_table(qs: &[u32], budget: &Budget) -> Result<Vec<CheckRow>, ExperimentError> {
    let mut rows = Vec::new();
    for &q in qs {
        let spec = IntegrandSpec::new(aiii_datum(2, q)?, point(&[2.0, 1.0]), 2)?;
        let report = growth_scan(&spec, &budget.scan)?;
        rows.push(row(
            &format!("regular-p2/q={q}"),
            "k = 2 convergent (increment ratios <= 0.8 over the last levels)",
            format!("{:?}", report.classification),
            report.classification.is_convergent(),
        ));
    }
    let template = IntegrandSpec::new(aiii_datum(2, 3)?, point(&[2.0, 1.0]), 1)?;
    let scan = min_k_scan(&template, 3, &budget.scan)?;
    rows.push(row(
        "regular-p2/min-k q=3",
        "minimal k = 2, dichotomy holds",
        format!(
            "minimal k = {:?}, holds = {:?}",
            scan.minimal_k, scan.dichotomy_holds
        ),
        scan.minimal_k == Some(2) && scan.dichotomy_holds == Some(true),
    ));
    Ok(rows)
}

/// Regular X = (3,2,1) in rank three, k = 2 convergent for each q.
pub fn regular_p3_table(qs: &[u32], budget: &Budget) -> Result<Vec<CheckRow>, ExperimentError> {
    let mut rows = Vec::new();
    for &q in qs {
        let spec = IntegrandSpec::new(aiii_datum(3, q)?, point(&[3.0, 2.0, 1.0]), 2)?;
        let report = growth_scan(&spec, &budget.scan)?;
        rows.push(row(
            &format!("regular-p3/q={q}"),
            "k = 2 convergent",
            format!("{:?}", report.classification),
            report.classification.is_convergent(),
        ));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Type-D singular points
// ---------------------------------------------------------------------------

/// Type-D verdicts: q = 2 diverges at k = 2 (with the rectangle bound
/// growing linearly and dominated by quadrature), q = 3 converges; the
/// dichotomy fails at q = 2 and holds at q = 3.
pub fn type_d_table(budget: &Budget) -> Result<Vec<CheckRow>, ExperimentError> {
    let mut rows = Vec::new();
    let x = 1.0;

    let spec_q2 = IntegrandSpec::new(aiii_datum(2, 2)?, point(&[x, x]), 2)?;
    let report_q2 = growth_scan(&spec_q2, &budget.scan)?;
    rows.push(row(
        "type-d/q=2 k=2",
        "divergent",
        format!("{:?}", report_q2.classification),
        report_q2.classification.is_divergent(),
    ));

    let eta = std::f64::consts::PI / 8.0;
    let lb = lower_bound_type_d_rectangles(x, eta, 50)?;
    let ns: Vec<f64> = (10..=50).map(|n| n as f64).collect();
    let sums: Vec<f64> = (10..=50).map(|n| lb.partials[n - 1]).collect();
    let (slope, r2) = linear_fit_r2(&ns, &sums);
    rows.push(row(
        "type-d/rectangles linear",
        "lower-bound partial sums grow linearly (R^2 >= 0.99 on N in [10,50])",
        format!("slope {slope:.3e}, R^2 = {r2:.5}"),
        r2 >= 0.99 && slope > 0.0,
    ));

    let mut quad_total = 0.0;
    for rect in &lb.rectangles {
        quad_total += quad_over_rectangle(&spec_q2, (rect.0, rect.1), (rect.2, rect.3))?;
    }
    let analytic = *lb.partials.last().unwrap();
    rows.push(row(
        "type-d/rectangles dominated",
        "quadrature over the union of rectangles >= analytic bound",
        format!("quad {quad_total:.4e} vs bound {analytic:.4e}"),
        quad_total >= analytic,
    ));

    let spec_q3 = IntegrandSpec::new(aiii_datum(2, 3)?, point(&[x, x]), 2)?;
    let report_q3 = growth_scan(&spec_q3, &budget.scan)?;
    rows.push(row(
        "type-d/q=3 k=2",
        "convergent",
        format!("{:?}", report_q3.classification),
        report_q3.classification.is_convergent(),
    ));

    for (q, expected_holds) in [(2u32, false), (3u32, true)] {
        let template = IntegrandSpec::new(aiii_datum(2, q)?, point(&[x, x]), 1)?;
        let scan = min_k_scan(&template, 3, &budget.scan)?;
        rows.push(row(
            &format!("type-d/dichotomy q={q}"),
            if expected_holds { "dichotomy holds" } else { "dichotomy fails" },
            format!(
                "holds = {:?}, minimal k = {:?}",
                scan.dichotomy_holds, scan.minimal_k
            ),
            scan.dichotomy_holds == Some(expected_holds),
        ));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Type-A singular points
// ---------------------------------------------------------------------------

/// Strip geometry shared by the type-A experiments.
pub const STRIP_EPS: f64 = 0.5;
pub const STRIP_C: f64 = 4.0;
pub const STRIP_START: f64 = 100.0;

fn strip(spec: &IntegrandSpec, levels: u32, budget: &Budget) -> Result<StripScan, ScanError> {
    strip_scan(
        spec,
        STRIP_EPS,
        STRIP_C,
        STRIP_START,
        levels,
        budget.scan.samples_per_annulus / 2,
        budget.scan.seed,
    )
}

/// Type-A verdicts across q: the strip decay matches 4k−5−2r, the growth
/// class follows, minimal k = max(3, ceil(3/4 + q/2)), and the dichotomy
/// fails at every q ≥ 3.
pub fn type_a_table(budget: &Budget) -> Result<Vec<CheckRow>, ExperimentError> {
    let mut rows = Vec::new();
    let x = 1.0;

    // q = 3, k = 2: strip density ∝ 1/λ1, log-divergent growth.
    let spec_q3 = IntegrandSpec::new(aiii_datum(2, 3)?, point(&[x, 0.0]), 2)?;
    let scan_q3 = strip(&spec_q3, 7, budget)?;
    rows.push(row(
        "type-a/q=3 strip",
        "strip decay exponent 1 within 0.05, log-divergent on S",
        format!(
            "decay {:.4} +- {:.4}, {:?}",
            scan_q3.fitted_decay, scan_q3.fitted_decay_ci95, scan_q3.classification
        ),
        (scan_q3.fitted_decay - 1.0).abs() <= 0.05
            && matches!(scan_q3.classification, Classification::LogDivergent { .. }),
    ));

    // q = 4, k = 2: the strip exponent 4k−5−2r = −1 means the slab density
    // grows ∝ λ1, so slab sums grow ∝ R²: polynomially divergent with
    // partial-growth exponent 1 − (−1) = 2.
    let spec_q4 = IntegrandSpec::new(aiii_datum(2, 4)?, point(&[x, 0.0]), 2)?;
    let scan_q4 = strip(&spec_q4, 7, budget)?;
    let growth_ok = match scan_q4.classification {
        Classification::PolyDivergent { exponent, .. } => (exponent - 2.0).abs() <= 0.2,
        _ => false,
    };
    rows.push(row(
        "type-a/q=4 strip",
        "strip decay exponent -1 within 0.1 (density grows like λ1), poly-divergent with partial growth R^2",
        format!(
            "decay {:.4} +- {:.4}, {:?}",
            scan_q4.fitted_decay, scan_q4.fitted_decay_ci95, scan_q4.classification
        ),
        (scan_q4.fitted_decay + 1.0).abs() <= 0.1 && growth_ok,
    ));

    // q = 4, k = 3 converges over the whole chamber.
    let spec_q4_k3 = IntegrandSpec::new(aiii_datum(2, 4)?, point(&[x, 0.0]), 3)?;
    let report = growth_scan(&spec_q4_k3, &budget.scan)?;
    rows.push(row(
        "type-a/q=4 k=3",
        "convergent",
        format!("{:?}", report.classification),
        report.classification.is_convergent(),
    ));

    // Minimal k per q, and failure of the dichotomy at k = 2.
    for q in 3..=6u32 {
        let expected = 3u32.max((0.75 + q as f64 / 2.0).ceil() as u32);
        let template = IntegrandSpec::new(aiii_datum(2, q)?, point(&[x, 0.0]), 1)?;
        let scan = min_k_scan(&template, 5, &budget.scan)?;
        let pass = scan.minimal_k == Some(expected) && scan.dichotomy_holds == Some(false);
        rows.push(row(
            &format!("type-a/min-k q={q}"),
            &format!("minimal k = {expected}, dichotomy fails"),
            format!(
                "minimal k = {:?}, holds = {:?}",
                scan.minimal_k, scan.dichotomy_holds
            ),
            pass,
        ));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Kernel consistency
// ---------------------------------------------------------------------------

/// Double-double arithmetic for the extended-precision naive oracle.
mod dd {
    #[derive(Clone, Copy, Debug)]
    pub struct Dd {
        pub hi: f64,
        pub lo: f64,
    }

    impl Dd {
        pub fn from(x: f64) -> Self {
            Dd { hi: x, lo: 0.0 }
        }

        pub fn to_f64(self) -> f64 {
            self.hi + self.lo
        }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    pub fn add(a: Dd, b: Dd) -> Dd {
        let s = two_sum(a.hi, b.hi);
        let lo = s.lo + a.lo + b.lo;
        let t = two_sum(s.hi, lo);
        Dd { hi: t.hi, lo: t.lo }
    }

    pub fn sub(a: Dd, b: Dd) -> Dd {
        add(a, Dd { hi: -b.hi, lo: -b.lo })
    }

    pub fn mul(a: Dd, b: Dd) -> Dd {
        let p = two_prod(a.hi, b.hi);
        let lo = p.lo + a.hi * b.lo + a.lo * b.hi;
        let t = two_sum(p.hi, lo);
        Dd { hi: t.hi, lo: t.lo }
    }

    pub fn div_f64(a: Dd, d: f64) -> Dd {
        let q1 = a.hi / d;
        let r = sub(a, two_prod(q1, d));
        let q2 = (r.hi + r.lo) / d;
        let t = two_sum(q1, q2);
        Dd { hi: t.hi, lo: t.lo }
    }

    pub fn div(a: Dd, b: Dd) -> Dd {
        let q1 = a.hi / b.hi;
        let r = sub(a, mul(Dd::from(q1), b));
        let q2 = (r.hi + r.lo) / b.hi;
        let t = two_sum(q1, q2);
        Dd { hi: t.hi, lo: t.lo }
    }

    /// g_r series in double-double; rated for |t| ≤ 150.
    pub fn g_series(r: u32, t: Dd) -> Dd {
        let mut term = Dd::from(1.0);
        for i in 1..=r {
            term = div_f64(term, 2.0 * i as f64);
        }
        let mut sum = term;
        for l in 0..300u32 {
            term = mul(term, t);
            term = div_f64(term, -4.0 * (l as f64 + 1.0) * (l as f64 + 1.0 + r as f64));
            sum = add(sum, term);
            if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) && l > 4 {
                break;
            }
        }
        sum
    }
}

/// Naive determinant kernel in double-double arithmetic; the
/// extended-precision oracle for near-wall stability checks (rank two).
pub fn naive_kernel_dd(r: u32, x: &[f64], lam: &[f64]) -> f64 {
    use dd::{div, div_f64, g_series, mul, sub, Dd};
    assert_eq!(x.len(), 2);
    let a: Vec<Dd> = x.iter().map(|&v| mul(Dd::from(v), Dd::from(v))).collect();
    let b: Vec<Dd> = lam.iter().map(|&v| mul(Dd::from(v), Dd::from(v))).collect();
    let g = |i: usize, j: usize| g_series(r, mul(a[i], b[j]));
    let det = sub(mul(g(0, 0), g(1, 1)), mul(g(0, 1), g(1, 0)));
    let va = sub(a[0], a[1]);
    let vb = sub(b[0], b[1]);
    let k = div(div(det, va), vb);
    // normalize by the λ→0 limit g_r(0)·g_r'(0) = −(1/(2^r r!))·(1/2^{r+2}(r+1)!)
    let gr0 = g_series(r, Dd::from(0.0));
    let gp0 = div_f64(g_series(r + 1, Dd::from(0.0)), -2.0);
    div(k, mul(gr0, gp0)).to_f64()
}

/// Kernel-consistency checks: the 1×1 determinant kernel against the
/// rank-one kernel, the type-D kernel against the x-confluent limit of the
/// regular kernel, and near-wall stability against the double-double naive
/// quotient.
pub fn kernel_consistency_table() -> Result<Vec<CheckRow>, ExperimentError> {
    let mut rows = Vec::new();

    // p = 1 reduction, 50 points, 1e-9.
    let mut worst = 0.0_f64;
    for q in 2..=5u32 {
        let nu = crate::specfun::BesselOrder::new((q - 1) as f64).unwrap();
        let rank1 = RankOneKernel::new(nu, 1.3);
        let det = RegularKernel::new(q - 1, &[1.3]);
        for i in 1..=50 {
            let lam = 0.2 * i as f64;
            let a = det.eval(&[lam]).value;
            let b = rank1.eval(lam);
            worst = worst.max((a - b).abs() / b.abs().max(1e-12));
        }
    }
    rows.push(row(
        "kernel/p1-reduction",
        "1x1 determinant kernel == rank-one kernel (rel 1e-9, 50 points)",
        format!("worst rel diff {worst:.2e}"),
        worst <= 1e-9,
    ));

    // Type-D vs x-confluent limit of the regular kernel, one fitted
    // constant, 30 points, 1e-6 of the kernel scale.
    let r = 1u32;
    let x = 1.5;
    let d_kernel = TypeDKernel::new(r, x);
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
    let c = limit(&lam0) / d_kernel.eval_raw(&lam0).value;
    let grid: Vec<[f64; 2]> = (1..=30)
        .map(|i| {
            let l1 = 0.4 * i as f64 + 1.0;
            [l1, 0.5 * l1]
        })
        .collect();
    let lhs: Vec<f64> = grid.iter().map(|lam| limit(lam)).collect();
    let scale = lhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut worst_d = 0.0_f64;
    for (lam, &l) in grid.iter().zip(&lhs) {
        let rhs = c * d_kernel.eval_raw(lam).value;
        worst_d = worst_d.max((l - rhs).abs() / scale);
    }
    rows.push(row(
        "kernel/type-d-confluent",
        "type-D kernel == x-confluent regular limit up to one constant (1e-6, 30 points)",
        format!("worst scaled diff {worst_d:.2e}"),
        worst_d <= 1e-6,
    ));

    // Near-wall stability: stable evaluation vs the double-double naive
    // quotient for 100 pseudo-random near-wall λ with gaps 1e-6..1e-9.
    let kernel = RegularKernel::new(1, &[2.0, 1.0]);
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        state = crate::seed::splitmix64(state);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut worst_wall = 0.0_f64;
    for _ in 0..100 {
        let l2 = 1.0 + 3.5 * next();
        let gap = 10f64.powf(-6.0 - 3.0 * next());
        let l1 = l2 + gap;
        let stable = kernel.eval(&[l1, l2]).value;
        let naive = naive_kernel_dd(1, &[2.0, 1.0], &[l1, l2]);
        worst_wall = worst_wall.max((stable - naive).abs() / naive.abs().max(1e-12));
    }
    rows.push(row(
        "kernel/near-wall",
        "stable kernel within 1e-6 of extended-precision naive evaluation (gaps 1e-6..1e-9)",
        format!("worst rel diff {worst_wall:.2e}"),
        worst_wall <= 1e-6,
    ));
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Product-formula validation
// ---------------------------------------------------------------------------

/// Product-formula checks: AI powers up to 3 and the rank-two space with
/// q = 3 at k = 2 with equal and mixed factors; every grid point within 3σ.
pub fn product_formula_table(budget: &Budget) -> Result<Vec<CheckRow>, ExperimentError> {
    let mut rows = Vec::new();
    let n = budget.mc_draws;

    // AI: identity calibration, factors of radius 1, k = 1..3.
    let grid1: Vec<Vec<f64>> = (1..=20).map(|i| vec![0.45 * i as f64]).collect();
    let t = point(&[1.0]);
    let cal = calibrate_scale(McSpace::RankOneAi, &t, &grid1, n, budget.scan.seed ^ 0xA1)?;
    for k in 1..=3u32 {
        let factors = vec![t.clone(); k as usize];
        let report = validate_product_formula(
            McSpace::RankOneAi,
            &factors,
            &grid1,
            cal,
            n,
            budget.scan.seed ^ (0xB0 + k as u64),
        )?;
        let failed: Vec<String> = report
            .rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("{:?}", r.lambda))
            .collect();
        rows.push(row(
            &format!("product/AI k={k}"),
            "empirical transform == J0^k at 20 grid points within 3 sigma",
            if failed.is_empty() {
                format!("all {} points pass (s = {:.4})", report.rows.len(), cal.s)
            } else {
                format!("failing lambdas: {failed:?}")
            },
            report.all_pass,
        ));
    }

    // Rank-two q = 3: calibrate on X = (2,1), then equal and mixed factors.
    let space = McSpace::Aiii { p: 2, q: 3 };
    let x_reg = point(&[2.0, 1.0]);
    let grid2: Vec<Vec<f64>> = (0..16)
        .map(|i| {
            let l1 = 0.35 + 0.30 * i as f64;
            vec![l1, 0.45 * l1]
        })
        .collect();
    let cal2 = calibrate_scale(space, &x_reg, &grid2, n, budget.scan.seed ^ 0xC1)?;
    rows.push(row(
        "product/AIII calibration",
        "a positive frequency scale fits with residuals < 3 sigma",
        format!("s = {:.5}, max residual {:.2} sigma", cal2.s, cal2.fit_residual),
        cal2.s > 0.0,
    ));
    let cases: Vec<(&str, Vec<OrbitPoint>)> = vec![
        ("equal", vec![x_reg.clone(), x_reg.clone()]),
        ("mixed", vec![x_reg.clone(), point(&[1.0, 0.0])]),
    ];
    for (name, factors) in cases {
        let report = validate_product_formula(
            space,
            &factors,
            &grid2,
            cal2,
            n,
            budget.scan.seed ^ fnv_tag(name),
        )?;
        let worst = report
            .rows
            .iter()
            .map(|r| (r.empirical_re - r.predicted).abs() / r.stderr.max(1e-300))
            .fold(0.0_f64, f64::max);
        rows.push(row(
            &format!("product/AIII {name}"),
            "empirical transform == product of kernels at 16 grid points within 3 sigma",
            format!("worst deviation {worst:.2} sigma"),
            report.all_pass,
        ));
    }
    Ok(rows)
}

fn fnv_tag(s: &str) -> u64 {
    crate::seed::fnv1a64(s.as_bytes())
}

// ---------------------------------------------------------------------------
// Open experiments
// ---------------------------------------------------------------------------

/// Open experiments: runs complete and data is emitted, but no verdict is
/// asserted. Covers the undecided type-A q = 2, k = 2 case and the
/// borderline type-D q = 2, k = 3 bound.
pub fn open_experiments(budget: &Budget) -> Result<Vec<CheckRow>, ExperimentError> {
    let mut rows = Vec::new();

    // Type-A q = 2 (r = 0), k = 2, extended levels, raw growth only.
    let spec_a = IntegrandSpec::new(aiii_datum(2, 2)?, point(&[1.0, 0.0]), 2)?;
    let mut extended = budget.scan;
    extended.levels = budget.scan.levels + 2;
    let report_a = growth_scan(&spec_a, &extended)?;
    let strip_a = strip(&spec_a, 9, budget)?;
    let finite = report_a
        .rows
        .iter()
        .all(|r| r.partial.is_finite() && r.partial >= 0.0);
    rows.push(CheckRow {
        id: "open/type-a q=2 k=2".into(),
        statement: "undecided case: raw growth data only".into(),
        observed: format!(
            "chamber: {:?}; strip decay {:.4} +- {:.4}; data {}",
            report_a.classification,
            strip_a.fitted_decay,
            strip_a.fitted_decay_ci95,
            if finite { "complete" } else { "incomplete" }
        ),
        pass: None,
    });

    // Type-D q = 2 (r = 0), k = 3: the W1 bound exponent is borderline.
    let spec_d = IntegrandSpec::new(aiii_datum(2, 2)?, point(&[1.0, 1.0]), 3)?;
    let report_d = growth_scan(&spec_d, &extended)?;
    rows.push(CheckRow {
        id: "open/type-d q=2 k=3".into(),
        statement: "borderline bound: raw growth data only".into(),
        observed: format!("chamber: {:?}", report_d.classification),
        pass: None,
    });
    Ok(rows)
}

/// The full verdict table, one section per headline claim.
pub fn reproduce_all(budget: &Budget) -> Result<Vec<(String, Vec<CheckRow>)>, ExperimentError> {
    Ok(vec![
        ("rank-one family table".to_string(), rank1_family_table(budget)?),
        (
            "rank-one nu=0 quantitative divergence".to_string(),
            rank1_nu0_quantitative(&[0.7, 1.0, 1.3], budget)?,
        ),
        (
            "rank-two regular points".to_string(),
            regular_p2_table(&[2, 3, 4], budget)?,
        ),
        ("type-D singular points".to_string(), type_d_table(budget)?),
        ("type-A singular points".to_string(), type_a_table(budget)?),
        (
            "rank-three regular points".to_string(),
            regular_p3_table(&[3, 4], budget)?,
        ),
        ("kernel consistency".to_string(), kernel_consistency_table()?),
        ("product formula".to_string(), product_formula_table(budget)?),
        ("open experiments".to_string(), open_experiments(budget)?),
    ])
}
