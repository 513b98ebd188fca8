//! Shared oracles for the integration suites. Everything here is an
//! independent evaluation route: ascending series with compensated
//! summation, closed-form half-integer Bessel functions, and a small
//! double-double layer for extended-precision naive kernel quotients.

#![allow(dead_code)]

/// Kahan-summed ascending series for J_ν; trustworthy for s ≤ 10 where the
/// largest term stays small enough that cancellation is below 1e-12.
pub fn series_oracle_j(nu: f64, s: f64) -> f64 {
    if s == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let mut term = (nu * (0.5 * s).ln() - ln_gamma_oracle(nu + 1.0)).exp();
    let mut sum = term;
    let mut comp = 0.0;
    let q = 0.25 * s * s;
    for l in 0..60 {
        let lf = l as f64;
        term = -term * q / ((lf + 1.0) * (nu + lf + 1.0));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Stirling-series log-gamma, independent of the library's Lanczos fit.
pub fn ln_gamma_oracle(x: f64) -> f64 {
    // push the argument above 10 with the recurrence, then Stirling
    let mut shift = 0.0;
    let mut z = x;
    while z < 10.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let zi = 1.0 / z;
    let zi2 = zi * zi;
    let series = zi / 12.0 - zi * zi2 / 360.0 + zi * zi2 * zi2 / 1260.0
        - zi * zi2 * zi2 * zi2 / 1680.0;
    shift + 0.5 * ((2.0 * std::f64::consts::PI).ln() - z.ln()) + z * (z.ln() - 1.0) + series
}

/// Closed form J_{1/2}(s) = √(2/(πs)) sin s.
pub fn closed_form_j_half(s: f64) -> f64 {
    (2.0 / (std::f64::consts::PI * s)).sqrt() * s.sin()
}

/// Closed form J_{3/2}(s) = √(2/(πs)) (sin s / s − cos s).
pub fn closed_form_j_three_halves(s: f64) -> f64 {
    (2.0 / (std::f64::consts::PI * s)).sqrt() * (s.sin() / s - s.cos())
}

// ---------------------------------------------------------------------------
// Double-double arithmetic (test-side copy, independent of the library's)
// ---------------------------------------------------------------------------

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
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

pub fn dd_add(a: Dd, b: Dd) -> Dd {
    let s = two_sum(a.hi, b.hi);
    let t = two_sum(s.hi, s.lo + a.lo + b.lo);
    Dd { hi: t.hi, lo: t.lo }
}

pub fn dd_sub(a: Dd, b: Dd) -> Dd {
    dd_add(a, Dd { hi: -b.hi, lo: -b.lo })
}

pub fn dd_mul(a: Dd, b: Dd) -> Dd {
    let p = two_prod(a.hi, b.hi);
    let t = two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
    Dd { hi: t.hi, lo: t.lo }
}

pub fn dd_div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi / b.hi;
    let r = dd_sub(a, dd_mul(Dd::from(q1), b));
    let q2 = (r.hi + r.lo) / b.hi;
    let t = two_sum(q1, q2);
    Dd { hi: t.hi, lo: t.lo }
}

pub fn dd_div_f64(a: Dd, d: f64) -> Dd {
    let q1 = a.hi / d;
    let r = dd_sub(a, two_prod(q1, d));
    let q2 = (r.hi + r.lo) / d;
    let t = two_sum(q1, q2);
    Dd { hi: t.hi, lo: t.lo }
}

/// g_r series in double-double: Σ (−1)^l t^l / (2^{2l+r} l! (r+l)!).
pub fn dd_g_series(r: u32, t: Dd) -> Dd {
    let mut term = Dd::from(1.0);
    for i in 1..=r {
        term = dd_div_f64(term, 2.0 * i as f64);
    }
    let mut sum = term;
    for l in 0..300u32 {
        term = dd_mul(term, t);
        term = dd_div_f64(term, -4.0 * (l as f64 + 1.0) * (l as f64 + 1.0 + r as f64));
        sum = dd_add(sum, term);
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) && l > 4 {
            break;
        }
    }
    sum
}

/// Naive rank-two determinant kernel quotient in double-double arithmetic,
/// normalized by its λ → 0 limit. The extended-precision reference for
/// near-wall stability comparisons; valid while |x λ| ≤ 12 (series range).
pub fn dd_naive_regular_kernel(r: u32, x: &[f64], lam: &[f64]) -> f64 {
    assert_eq!(x.len(), 2);
    let a: Vec<Dd> = x.iter().map(|&v| two_prod(v, v)).collect();
    let b: Vec<Dd> = lam.iter().map(|&v| two_prod(v, v)).collect();
    let g = |i: usize, j: usize| dd_g_series(r, dd_mul(a[i], b[j]));
    let det = dd_sub(dd_mul(g(0, 0), g(1, 1)), dd_mul(g(0, 1), g(1, 0)));
    let k = dd_div(dd_div(det, dd_sub(a[0], a[1])), dd_sub(b[0], b[1]));
    let gr0 = dd_g_series(r, Dd::from(0.0));
    let gp0 = dd_div_f64(dd_g_series(r + 1, Dd::from(0.0)), -2.0);
    dd_div(k, dd_mul(gr0, gp0)).to_f64()
}

/// Deterministic uniform variates for test grids.
pub struct TestRng(pub u64);

impl TestRng {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let z = self.0 ^ (self.0 >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    }
}
