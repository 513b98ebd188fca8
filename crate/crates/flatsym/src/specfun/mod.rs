//! Bessel functions of the first kind, the normalized kernels
//! f_r(s) = J_r(s)/s^r and their even-variable form g_r, derivatives, and
//! asymptotic envelope bounds.
//!
//! The f/g family is what the determinant kernels are built from: g_r is an
//! entire function with g_r(t²) = f_r(t), so every wall limit that shows up
//! later (divided differences, confluent nodes) can be taken through g_r
//! series derivatives instead of numerically cancelling quotients. The
//! derivative ladder used throughout:
//!
//!   g_r'  = −g_{r+1}/2,       g_r''  = g_{r+2}/4,
//!   f_r'(s) = −s f_{r+1}(s),  f_r''(s) = s² f_{r+2}(s) − f_{r+1}(s).

pub(crate) mod bessel;
pub(crate) mod gamma;

use thiserror::Error;

/// Errors from the special-function layer.
#[derive(Debug, Error, PartialEq)]
pub enum SpecFunError {
    #[error("bessel order {0} outside the supported range [0, 50]")]
    UnsupportedOrder(f64),
    #[error("argument must be finite and nonnegative, got {0}")]
    InvalidArgument(f64),
    #[error("envelope of {quantity:?}: |q(s)|·s^{exponent} still growing at s = {at}")]
    EnvelopeViolation {
        quantity: EnvelopeQuantity,
        exponent: f64,
        at: f64,
    },
    #[error("envelope grid must be ascending, start at s >= 10, and hold >= 8 points")]
    BadEnvelopeGrid,
}

/// A real Bessel order ν ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self, SpecFunError> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(SpecFunError::UnsupportedOrder(nu));
        }
        Ok(Self { nu })
    }

    pub fn nu(self) -> f64 {
        self.nu
    }
}

/// J_ν(s) for ν ∈ [0, 50], s ≥ 0.
pub fn bessel_j(order: BesselOrder, s: f64) -> Result<f64, SpecFunError> {
    if order.nu > 50.0 {
        return Err(SpecFunError::UnsupportedOrder(order.nu));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(SpecFunError::InvalidArgument(s));
    }
    Ok(bessel::bessel_j_dispatch(order.nu, s))
}

/// The even series g_r(t) = Σ (−1)^l t^l / (2^{2l+r} l! (r+l)!), summed
/// directly. Rated for t ≤ 144; converges for every real t (all-positive
/// terms for t < 0, so no cancellation there).
pub(crate) fn g_series(r: u32, t: f64) -> f64 {
    // Leading coefficient 1/(2^r r!), by repeated division while exact.
    let mut term = if r <= 30 {
        (1..=r).fold(1.0_f64, |acc, i| acc / (2.0 * i as f64))
    } else {
        (-gamma::ln_gamma(r as f64 + 1.0) - r as f64 * std::f64::consts::LN_2).exp()
    };
    let mut sum = term;
    let mut comp = 0.0_f64;
    let mut l = 0usize;
    while l < 2000 {
        let lf = l as f64;
        term = -term * t / (4.0 * (lf + 1.0) * (lf + 1.0 + r as f64));
        let y = term - comp;
        let t_new = sum + y;
        comp = (t_new - sum) - y;
        sum = t_new;
        l += 1;
        if term.abs() < f64::EPSILON * sum.abs().max(1e-300) && l > 4 {
            break;
        }
    }
    sum
}

/// g_r(t); equals f_r(√t) for t ≥ 0 and continues f_r evenly for t < 0.
pub fn g_r(r: u32, t: f64) -> f64 {
    if t > 144.0 {
        let s = t.sqrt();
        bessel::bessel_jn_int(r, s) / s.powi(r as i32)
    } else {
        g_series(r, t)
    }
}

/// First or second derivative of g_r, through the ladder
/// g_r' = −g_{r+1}/2 and g_r'' = g_{r+2}/4.
pub fn g_r_deriv(r: u32, t: f64, order: u8) -> f64 {
    match order {
        1 => -0.5 * g_r(r + 1, t),
        2 => 0.25 * g_r(r + 2, t),
        _ => panic!("g_r_deriv supports derivative orders 1 and 2"),
    }
}

/// f_r(s) = J_r(s)/s^r, analytic at s = 0 (series evaluation, no division).
pub fn f_r(r: u32, s: f64) -> f64 {
    if s * s <= 144.0 {
        g_series(r, s * s)
    } else {
        bessel::bessel_jn_int(r, s) / s.powi(r as i32)
    }
}

/// f_r'(s) = −s f_{r+1}(s).
pub fn f_r_prime(r: u32, s: f64) -> f64 {
    -s * f_r(r + 1, s)
}

/// f_r''(s) = s² f_{r+2}(s) − f_{r+1}(s).
pub fn f_r_second(r: u32, s: f64) -> f64 {
    s * s * f_r(r + 2, s) - f_r(r + 1, s)
}

/// f_ν(s) = J_ν(s)/s^ν for real order ν ≥ 0 (rank-one kernels take
/// half-integer orders here).
pub fn f_nu(nu: f64, s: f64) -> Result<f64, SpecFunError> {
    if !nu.is_finite() || nu < 0.0 || nu > 50.0 {
        return Err(SpecFunError::UnsupportedOrder(nu));
    }
    if !s.is_finite() || s < 0.0 {
        return Err(SpecFunError::InvalidArgument(s));
    }
    if s <= 12.0 {
        // Direct series for J_ν(s)/s^ν; first term 2^{−ν}/Γ(ν+1).
        let mut term = (-nu * std::f64::consts::LN_2 - gamma::ln_gamma(nu + 1.0)).exp();
        let mut sum = term;
        let mut comp = 0.0_f64;
        let q = 0.25 * s * s;
        for l in 0..200usize {
            let lf = l as f64;
            term = -term * q / ((lf + 1.0) * (nu + lf + 1.0));
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            if term.abs() < f64::EPSILON * sum.abs().max(1e-300) && l > 4 {
                break;
            }
        }
        Ok(sum)
    } else {
        Ok(bessel::bessel_j_dispatch(nu, s) / (nu * s.ln()).exp())
    }
}

/// Integral-representation evaluation of J_ν(s) on Gauss-Legendre panels:
/// an independent quadrature route, kept public for cross-branch agreement
/// checks.
pub fn quadrep_reference(nu: f64, s: f64) -> f64 {
    bessel::quadrep_jnu(nu, s)
}

/// Which member of the f_r family an envelope bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeQuantity {
    Fr,
    FrPrime,
    FrSecond,
}

impl EnvelopeQuantity {
    fn eval(self, r: u32, s: f64) -> f64 {
        match self {
            EnvelopeQuantity::Fr => f_r(r, s),
            EnvelopeQuantity::FrPrime => f_r_prime(r, s),
            EnvelopeQuantity::FrSecond => f_r_second(r, s),
        }
    }
}

/// An empirical decay bound |q(s)| ≤ constant · s^{−exponent} for s ≥ valid_from.
#[derive(Clone, Copy, Debug)]
pub struct EnvelopeBound {
    pub constant: f64,
    pub exponent: f64,
    pub valid_from: f64,
}

/// Smallest constant C with |q(s)| ≤ C·s^{−(r+1/2)} across the grid.
///
/// All three family members share the decay power r + 1/2. A grid whose
/// rescaled maxima keep growing toward the far end means the claimed decay
/// power is wrong, and is reported as a violation.
pub fn envelope_check(
    quantity: EnvelopeQuantity,
    r: u32,
    s_grid: &[f64],
) -> Result<EnvelopeBound, SpecFunError> {
    if s_grid.len() < 8 || s_grid[0] < 10.0 || s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpecFunError::BadEnvelopeGrid);
    }
    let exponent = r as f64 + 0.5;
    let rescaled: Vec<f64> = s_grid
        .iter()
        .map(|&s| quantity.eval(r, s).abs() * s.powf(exponent))
        .collect();
    let constant = rescaled.iter().cloned().fold(0.0, f64::max);
    // Quarter-block maxima must not increase monotonically along the grid.
    let blocks: Vec<f64> = rescaled
        .chunks(rescaled.len().div_ceil(4))
        .map(|c| c.iter().cloned().fold(0.0, f64::max))
        .collect();
    if blocks.len() == 4 && blocks.windows(2).all(|w| w[1] > w[0] * 1.0001) {
        return Err(SpecFunError::EnvelopeViolation {
            quantity,
            exponent,
            at: *s_grid.last().unwrap(),
        });
    }
    Ok(EnvelopeBound {
        constant,
        exponent,
        valid_from: s_grid[0],
    })
}

/// Linear grid dense enough to resolve Bessel oscillation peaks (step ≤ π/16).
pub fn envelope_grid(lo: f64, hi: f64) -> Vec<f64> {
    let step = std::f64::consts::PI / 16.0;
    let n = ((hi - lo) / step).ceil() as usize + 1;
    (0..n).map(|i| lo + i as f64 * step).take_while(|&s| s <= hi).collect()
}
