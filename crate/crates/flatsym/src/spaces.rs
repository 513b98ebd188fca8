//! Root-system data for the supported flat symmetric spaces, Plancherel
//! densities, Weyl-chamber geometry, and orbit-point classification.
//!
//! Two data tables drive everything downstream. The rank-one table lists the
//! irreducible rank-one spaces with their restricted-root multiplicities
//! (m_α, m_{2α}); the Bessel order of the rank-one kernel is
//! ν = (m_α + m_{2α} − 1)/2. The rank-p table covers SU(p,q)-type spaces,
//! root system C_p when q = p and BC_p when q > p, with multiplicities
//! (m0, m1, m2) = (2, 2(q−p), 1) and determinant-kernel order r = q − p.

use crate::specfun::BesselOrder;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("unknown space label {0}")]
    UnknownLabel(String),
    #[error("parameter q = {q} out of range for {label:?}")]
    ParameterOutOfRange { label: CartanLabel, q: u32 },
    #[error("rank p = {0} unsupported (expected 1, 2, or 3)")]
    UnsupportedRank(u32),
    #[error("orbit coordinates must be nonnegative, got {0}")]
    NegativeCoordinate(f64),
    #[error("orbit coordinates must be finite, got {0}")]
    NonFiniteCoordinate(f64),
    #[error("point classification defined only for rank <= 2 singular points")]
    UnsupportedSingularPoint,
    #[error("chamber coordinates must be strictly descending and positive")]
    NotInChamber,
    #[error("the zero point carries a point mass; no absolute-continuity power")]
    ZeroPoint,
}

/// Cartan classification label of the symmetric space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CartanLabel {
    AI,
    AII,
    AIII,
    BDI,
    CII,
    FII,
}

impl std::str::FromStr for CartanLabel {
    type Err = SpaceError;
    fn from_str(s: &str) -> Result<Self, SpaceError> {
        match s.to_ascii_uppercase().as_str() {
            "AI" => Ok(Self::AI),
            "AII" => Ok(Self::AII),
            "AIII" => Ok(Self::AIII),
            "BDI" => Ok(Self::BDI),
            "CII" => Ok(Self::CII),
            "FII" => Ok(Self::FII),
            other => Err(SpaceError::UnknownLabel(other.to_string())),
        }
    }
}

/// Restricted root system of the space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootFamily {
    A1,
    BC1,
    C(u32),
    BC(u32),
}

/// Root-system kind, for the absolute-continuity power rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootKind {
    A,
    B,
    C,
    D,
    BC,
}

/// A space's restricted root data: rank, multiplicities, and derived orders.
///
/// `m0` is the multiplicity of the roots α_i ± α_j (zero in rank one), `m1`
/// of the short roots α_k, `m2` of the long roots 2α_k.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootDatum {
    pub cartan: CartanLabel,
    pub family: RootFamily,
    pub rank: u32,
    pub q: Option<u32>,
    pub m0: u32,
    pub m1: u32,
    pub m2: u32,
}

/// Rank-one table row for `label`, with `q` where the family is parametric.
///
/// BDI with q = 2 is the same space as AI and is returned as such.
pub fn rank1_datum(label: CartanLabel, q: Option<u32>) -> Result<RootDatum, SpaceError> {
    let datum = match label {
        CartanLabel::AI => RootDatum {
            cartan: CartanLabel::AI,
            family: RootFamily::A1,
            rank: 1,
            q: None,
            m0: 0,
            m1: 1,
            m2: 0,
        },
        CartanLabel::AII => RootDatum {
            cartan: CartanLabel::AII,
            family: RootFamily::A1,
            rank: 1,
            q: None,
            m0: 0,
            m1: 4,
            m2: 0,
        },
        CartanLabel::AIII => {
            let q = require_q(label, q, 2)?;
            RootDatum {
                cartan: CartanLabel::AIII,
                family: RootFamily::BC1,
                rank: 1,
                q: Some(q),
                m0: 0,
                m1: 2 * (q - 1),
                m2: 1,
            }
        }
        CartanLabel::BDI => {
            let q = require_q(label, q, 2)?;
            if q == 2 {
                // SO₀(1,2)/SO(2) is isomorphic to the AI space.
                return rank1_datum(CartanLabel::AI, None);
            }
            RootDatum {
                cartan: CartanLabel::BDI,
                family: RootFamily::A1,
                rank: 1,
                q: Some(q),
                m0: 0,
                m1: q - 1,
                m2: 0,
            }
        }
        CartanLabel::CII => {
            let q = require_q(label, q, 2)?;
            RootDatum {
                cartan: CartanLabel::CII,
                family: RootFamily::BC1,
                rank: 1,
                q: Some(q),
                m0: 0,
                m1: 4 * (q - 1),
                m2: 3,
            }
        }
        CartanLabel::FII => RootDatum {
            cartan: CartanLabel::FII,
            family: RootFamily::BC1,
            rank: 1,
            q: None,
            m0: 0,
            m1: 8,
            m2: 7,
        },
    };
    Ok(datum)
}

fn require_q(label: CartanLabel, q: Option<u32>, min: u32) -> Result<u32, SpaceError> {
    match q {
        Some(q) if q >= min => Ok(q),
        Some(q) => Err(SpaceError::ParameterOutOfRange { label, q }),
        None => Err(SpaceError::ParameterOutOfRange { label, q: 0 }),
    }
}

/// Rank-p datum for the SU(p,q)-type space, p ∈ {1, 2, 3}, q ≥ p.
pub fn aiii_datum(p: u32, q: u32) -> Result<RootDatum, SpaceError> {
    if !(1..=3).contains(&p) {
        return Err(SpaceError::UnsupportedRank(p));
    }
    if q < p || (p == 1 && q < 2) {
        return Err(SpaceError::ParameterOutOfRange {
            label: CartanLabel::AIII,
            q,
        });
    }
    let family = if q == p {
        if p == 1 {
            RootFamily::C(1)
        } else {
            RootFamily::C(p)
        }
    } else if p == 1 {
        RootFamily::BC1
    } else {
        RootFamily::BC(p)
    };
    Ok(RootDatum {
        cartan: CartanLabel::AIII,
        family,
        rank: p,
        q: Some(q),
        m0: if p >= 2 { 2 } else { 0 },
        m1: 2 * (q - p),
        m2: 1,
    })
}

impl RootDatum {
    /// Bessel order of the kernel: ν = (m1 + m2 − 1)/2 in rank one, the
    /// integer r = q − p for the rank-p determinant kernel.
    pub fn bessel_order(&self) -> BesselOrder {
        let nu = if self.rank == 1 {
            (self.m1 as f64 + self.m2 as f64 - 1.0) / 2.0
        } else {
            self.r() as f64
        };
        BesselOrder::new(nu).expect("table orders are nonnegative")
    }

    /// r = q − p for the SU(p,q) family.
    pub fn r(&self) -> u32 {
        match (self.cartan, self.q) {
            (CartanLabel::AIII, Some(q)) => q - self.rank,
            _ => 0,
        }
    }

    pub fn root_kind(&self) -> RootKind {
        match self.family {
            RootFamily::A1 => RootKind::A,
            RootFamily::BC1 | RootFamily::BC(_) => RootKind::BC,
            RootFamily::C(_) => RootKind::C,
        }
    }

    /// Short human-readable identifier, e.g. `AI`, `AIII(p=2,q=3)`.
    pub fn id(&self) -> String {
        match (self.cartan, self.q) {
            (CartanLabel::AIII, Some(q)) if self.rank > 1 => {
                format!("AIII(p={},q={q})", self.rank)
            }
            (label, Some(q)) => format!("{label:?}(q={q})"),
            (label, None) => format!("{label:?}"),
        }
    }

    /// Plancherel density δ(λ) = ∏_{i<j}(λ_i²−λ_j²)^{m0} · ∏_k λ_k^{m1+m2},
    /// with the overall constant fixed to 1.
    pub fn plancherel_density(&self, lam: &ChamberPoint) -> f64 {
        let coords = lam.coords();
        debug_assert_eq!(coords.len(), self.rank as usize);
        let mut density = 1.0;
        for i in 0..coords.len() {
            for j in (i + 1)..coords.len() {
                let gap = coords[i] * coords[i] - coords[j] * coords[j];
                density *= gap.abs().powi(self.m0 as i32);
            }
        }
        let axis_power = (self.m1 + self.m2) as i32;
        for &c in coords {
            density *= c.powi(axis_power);
        }
        density
    }
}

/// Power k with μ_H^{∗k} ∈ L¹ from the root-system rule:
/// rank + 1 for type A_n and D_3, rank otherwise (rank ≥ 2).
pub fn absolute_continuity_power(kind: RootKind, rank: u32) -> u32 {
    match kind {
        RootKind::A => rank + 1,
        RootKind::D if rank == 3 => rank + 1,
        _ => rank,
    }
}

/// Minimal k with μ_H^{∗k} absolutely continuous: 2 at regular points, the
/// root-system rule at singular nonzero points.
pub fn l1_power_lookup(datum: &RootDatum, point: &OrbitPoint) -> Result<u32, SpaceError> {
    match point.class() {
        PointClass::Zero => Err(SpaceError::ZeroPoint),
        PointClass::Regular => Ok(2),
        PointClass::TypeD | PointClass::TypeA => {
            Ok(absolute_continuity_power(datum.root_kind(), datum.rank))
        }
    }
}

/// A spectral parameter λ in the open Weyl chamber λ_1 > … > λ_p > 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ChamberPoint {
    coords: Vec<f64>,
}

impl ChamberPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, SpaceError> {
        if coords.is_empty()
            || coords.windows(2).any(|w| w[0] <= w[1])
            || *coords.last().unwrap() <= 0.0
            || coords.iter().any(|c| !c.is_finite())
        {
            return Err(SpaceError::NotInChamber);
        }
        Ok(Self { coords })
    }

    /// Skips the chamber check; for interior use on pre-sorted samples.
    pub(crate) fn new_unchecked(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Orbit-representative classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PointClass {
    Regular,
    TypeD,
    TypeA,
    Zero,
}

/// A point X in the closed Weyl chamber with its singularity class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitPoint {
    coords: Vec<f64>,
    class: PointClass,
}

/// Relative snapping tolerance for deciding coordinate equality.
const SNAP_REL: f64 = 1e-12;

/// Classifies a coordinate vector: sorts descending, snaps near-equal and
/// near-zero coordinates, then assigns Regular / TypeD / TypeA / Zero.
///
/// TypeD (equal positive coordinates) and TypeA (one positive, one zero) are
/// rank-two classes; other singular configurations are rejected.
pub fn classify_point(coords: &[f64]) -> Result<OrbitPoint, SpaceError> {
    if let Some(&bad) = coords.iter().find(|c| !c.is_finite()) {
        return Err(SpaceError::NonFiniteCoordinate(bad));
    }
    let mut sorted = coords.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite coordinates"));
    let scale = sorted.first().copied().unwrap_or(0.0).abs().max(1.0);
    for c in sorted.iter_mut() {
        if c.abs() <= SNAP_REL * scale {
            *c = 0.0;
        }
    }
    if let Some(&c) = sorted.iter().find(|&&c| c < 0.0) {
        return Err(SpaceError::NegativeCoordinate(c));
    }
    // Snap near-equal neighbours to their mean.
    let mut i = 0;
    while i + 1 < sorted.len() {
        if sorted[i] - sorted[i + 1] <= SNAP_REL * sorted[i].max(1.0) {
            let mean = 0.5 * (sorted[i] + sorted[i + 1]);
            sorted[i] = mean;
            sorted[i + 1] = mean;
        }
        i += 1;
    }
    let p = sorted.len();
    let all_zero = sorted.iter().all(|&c| c == 0.0);
    let strictly_regular =
        sorted.windows(2).all(|w| w[0] > w[1]) && *sorted.last().unwrap() > 0.0;
    let class = if all_zero {
        PointClass::Zero
    } else if strictly_regular {
        PointClass::Regular
    } else if p == 2 && sorted[0] == sorted[1] && sorted[0] > 0.0 {
        PointClass::TypeD
    } else if p == 2 && sorted[0] > 0.0 && sorted[1] == 0.0 {
        PointClass::TypeA
    } else {
        return Err(SpaceError::UnsupportedSingularPoint);
    };
    Ok(OrbitPoint {
        coords: sorted,
        class,
    })
}

impl OrbitPoint {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn class(&self) -> PointClass {
        self.class
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Smallest strictly positive coordinate.
    pub fn min_positive(&self) -> Option<f64> {
        self.coords
            .iter()
            .copied()
            .filter(|&c| c > 0.0)
            .fold(None, |acc, c| Some(acc.map_or(c, |a: f64| a.min(c))))
    }
}

/// Region tags from the chamber decomposition used by the tail estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ChamberRegion {
    Ball,
    W1,
    W2,
    W21,
    W22,
    W3,
    W31,
    W32,
}

impl ChamberRegion {
    /// Collapses the subdivided tags onto their parents.
    pub fn coarse(self) -> ChamberRegion {
        match self {
            ChamberRegion::W21 | ChamberRegion::W22 => ChamberRegion::W2,
            ChamberRegion::W31 | ChamberRegion::W32 => ChamberRegion::W3,
            other => other,
        }
    }
}

/// Tags λ by the chamber decomposition.
///
/// Rank two: the ball, then W1 (λ2 ≥ λ1/2) and the split W2 = W21 ∪ W22 at
/// λ2 = c. Rank three: the ball, W1 (λ3 ≥ λ1/2), W2 (λ2 ≥ λ1/2 > λ3), and
/// the split W3 = W31 ∪ W32 at λ3 = c.
pub fn chamber_region(lam: &ChamberPoint, ball_radius: f64, c: f64) -> ChamberRegion {
    let coords = lam.coords();
    if lam.norm() <= ball_radius {
        return ChamberRegion::Ball;
    }
    match coords.len() {
        1 => ChamberRegion::W1,
        2 => {
            if coords[1] >= 0.5 * coords[0] {
                ChamberRegion::W1
            } else if coords[1] > c {
                ChamberRegion::W21
            } else {
                ChamberRegion::W22
            }
        }
        3 => {
            if coords[2] >= 0.5 * coords[0] {
                ChamberRegion::W1
            } else if coords[1] >= 0.5 * coords[0] {
                ChamberRegion::W2
            } else if coords[2] > c {
                ChamberRegion::W31
            } else {
                ChamberRegion::W32
            }
        }
        _ => unreachable!("ranks above 3 are not constructed"),
    }
}

/// Default truncation-ball radius: 8·max(1, 1/min_i x_i), large enough that
/// the asymptotic envelopes are in force outside it.
pub fn default_ball_radius(point: &OrbitPoint) -> f64 {
    let min_pos = point.min_positive().unwrap_or(1.0);
    8.0 * (1.0_f64).max(1.0 / min_pos)
}

/// Default wall offset c for the W22 / W32 split.
pub const DEFAULT_WALL_OFFSET: f64 = 4.0;

/// The embedded root-data table: every rank-one family (parametric families
/// instantiated for q = 2..=8) and the rank-2/3 SU(p,q) rows for q ≤ 8.
pub fn root_data_table() -> Vec<RootDatum> {
    let mut rows = vec![
        rank1_datum(CartanLabel::AI, None).unwrap(),
        rank1_datum(CartanLabel::AII, None).unwrap(),
        rank1_datum(CartanLabel::FII, None).unwrap(),
    ];
    for q in 2..=8 {
        rows.push(rank1_datum(CartanLabel::AIII, Some(q)).unwrap());
        rows.push(rank1_datum(CartanLabel::CII, Some(q)).unwrap());
        if q >= 3 {
            rows.push(rank1_datum(CartanLabel::BDI, Some(q)).unwrap());
        }
    }
    for p in 2..=3 {
        for q in p..=8 {
            rows.push(aiii_datum(p, q).unwrap());
        }
    }
    rows
}

/// The root-data table as UTF-8 JSON, one object per row.
pub fn root_data_json() -> String {
    serde_json::to_string_pretty(&root_data_table()).expect("table serializes")
}
