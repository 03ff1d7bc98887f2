//! Type reduction and defuzzification of interval type-2 fuzzy numbers.
//!
//! Four reductions are provided: the Karnik-Mendel centroid, the Wu-Mendel
//! uncertainty bounds, the Nie-Tan closed form and the geometric centroid of
//! the footprint polygon. The first three work on a uniform grid over the
//! support; the geometric centroid is exact.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{DiscretizedFou, IntervalType2, Triangular};

/// Centroid interval `[left, right]` of a type-reduced set together with its
/// midpoint, the defuzzified value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentroidInterval {
    pub left: f64,
    pub right: f64,
    pub defuzzified: f64,
}

impl CentroidInterval {
    fn new(left: f64, right: f64) -> Self {
        Self {
            left,
            right,
            defuzzified: (left + right) / 2.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x <= self.right
    }
}

/// Type-reduction method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Reduction {
    #[serde(rename = "km")]
    KarnikMendel,
    #[serde(rename = "ub")]
    UncertaintyBounds,
    #[serde(rename = "nt")]
    NieTan,
    #[serde(rename = "gc")]
    GeometricCentroid,
    #[serde(rename = "t1-centroid")]
    T1Centroid,
}

impl Reduction {
    pub const IT2_METHODS: [Reduction; 4] = [
        Reduction::KarnikMendel,
        Reduction::UncertaintyBounds,
        Reduction::NieTan,
        Reduction::GeometricCentroid,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Reduction::KarnikMendel => "km",
            Reduction::UncertaintyBounds => "ub",
            Reduction::NieTan => "nt",
            Reduction::GeometricCentroid => "gc",
            Reduction::T1Centroid => "t1-centroid",
        }
    }

    /// Crisp value of `f` under this reduction. The type-1 centroid only
    /// applies to collapsed footprints, where it is the centroid of the
    /// common triangle.
    pub fn defuzzify(&self, f: &IntervalType2, grid: usize) -> Result<f64> {
        match self {
            Reduction::KarnikMendel => km_centroid(f, grid).map(|c| c.defuzzified),
            Reduction::UncertaintyBounds => uncertainty_bounds(f, grid).map(|c| c.defuzzified),
            Reduction::NieTan => nie_tan(f, grid),
            Reduction::GeometricCentroid => geometric_centroid(f),
            Reduction::T1Centroid => {
                if f.upper() == f.lower() {
                    Ok(t1_centroid(&f.upper()))
                } else {
                    Err(Error::InvalidParameter(format!(
                        "t1-centroid needs a type-1 reliability, got the interval type-2 number {f}"
                    )))
                }
            }
        }
    }

    /// Centroid interval for the methods that produce one.
    pub fn interval(&self, f: &IntervalType2, grid: usize) -> Result<Option<CentroidInterval>> {
        match self {
            Reduction::KarnikMendel => km_centroid(f, grid).map(Some),
            Reduction::UncertaintyBounds => uncertainty_bounds(f, grid).map(Some),
            _ => Ok(None),
        }
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "km" => Ok(Reduction::KarnikMendel),
            "ub" => Ok(Reduction::UncertaintyBounds),
            "nt" => Ok(Reduction::NieTan),
            "gc" => Ok(Reduction::GeometricCentroid),
            "t1-centroid" | "t1" => Ok(Reduction::T1Centroid),
            other => Err(Error::Parse(format!(
                "unknown reduction `{other}` (expected km, ub, nt, gc or t1-centroid)"
            ))),
        }
    }
}

/// Index `k` with `xs[k] <= y < xs[k + 1]`, clamped to `0..=n-2`.
fn switch_point(xs: &[f64], y: f64) -> usize {
    let above = xs.partition_point(|&x| x <= y);
    above.saturating_sub(1).min(xs.len() - 2)
}

fn weighted_mean(xs: &[f64], weight: impl Fn(usize) -> f64) -> Option<f64> {
    let (num, den) = xs
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(num, den), (i, &x)| {
            let w = weight(i);
            (num + x * w, den + w)
        });
    (den > 0.0).then(|| num / den)
}

/// One Karnik-Mendel endpoint. `left` selects the left endpoint, which
/// weights points up to the switch with upper grades and the rest with lower
/// grades; the right endpoint does the opposite.
fn km_endpoint(d: &DiscretizedFou, left: bool) -> Result<f64> {
    let n = d.len();
    let degenerate = || Error::DegenerateFou("all membership grades are zero");
    let mut y = weighted_mean(&d.xs, |i| (d.lower[i] + d.upper[i]) / 2.0).ok_or_else(degenerate)?;
    let mut k = switch_point(&d.xs, y);
    // Converges monotonically, so n + 1 rounds is a hard upper bound.
    for _ in 0..=n {
        y = weighted_mean(&d.xs, |i| match (i <= k, left) {
            (true, true) | (false, false) => d.upper[i],
            _ => d.lower[i],
        })
        .ok_or_else(degenerate)?;
        let next = switch_point(&d.xs, y);
        if next == k {
            return Ok(y);
        }
        k = next;
    }
    Err(Error::NoConvergence(n + 1))
}

/// Karnik-Mendel centroid interval on an `n`-point grid.
pub fn km_centroid(f: &IntervalType2, n: usize) -> Result<CentroidInterval> {
    let d = f.discretize(n)?;
    Ok(CentroidInterval::new(
        km_endpoint(&d, true)?,
        km_endpoint(&d, false)?,
    ))
}

/// Inner and outer bounds on the type-reduced set, as produced by the
/// uncertainty-bound approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSets {
    /// Centroid of the lower membership function.
    pub lower_centroid: f64,
    /// Centroid of the upper membership function.
    pub upper_centroid: f64,
    pub left_inner: f64,
    pub left_outer: f64,
    pub right_inner: f64,
    pub right_outer: f64,
}

impl BoundSets {
    pub fn compute(d: &DiscretizedFou) -> Result<Self> {
        let first = d.xs[0];
        let last = d.xs[d.len() - 1];
        let sum_lower: f64 = d.lower.iter().sum();
        let sum_upper: f64 = d.upper.iter().sum();
        if sum_lower <= 0.0 {
            return Err(Error::DegenerateFou("lower membership grades sum to zero"));
        }
        if sum_upper <= 0.0 {
            return Err(Error::DegenerateFou("upper membership grades sum to zero"));
        }
        let dot = |grades: &[f64], f: &dyn Fn(f64) -> f64| -> f64 {
            d.xs.iter().zip(grades).map(|(&x, &g)| f(x) * g).sum()
        };
        let lower_centroid = dot(&d.lower, &|x| x) / sum_lower;
        let upper_centroid = dot(&d.upper, &|x| x) / sum_upper;

        let left_inner = lower_centroid.min(upper_centroid);
        let right_inner = lower_centroid.max(upper_centroid);

        let spread: f64 = d.upper.iter().zip(&d.lower).map(|(u, l)| u - l).sum();
        let factor = spread / (sum_upper * sum_lower);

        let lower_from_left = dot(&d.lower, &|x| x - first);
        let upper_to_right = dot(&d.upper, &|x| last - x);
        let left_outer =
            left_inner - factor * harmonic_term(lower_from_left, upper_to_right);

        let upper_from_left = dot(&d.upper, &|x| x - first);
        let lower_to_right = dot(&d.lower, &|x| last - x);
        let right_outer =
            right_inner + factor * harmonic_term(upper_from_left, lower_to_right);

        Ok(Self {
            lower_centroid,
            upper_centroid,
            left_inner,
            left_outer,
            right_inner,
            right_outer,
        })
    }
}

/// `a * b / (a + b)`, taken as 0 when both vanish.
fn harmonic_term(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        a * b / (a + b)
    }
}

/// Uncertainty-bound approximation of the centroid interval: each endpoint
/// is the midpoint of its inner and outer bound.
pub fn uncertainty_bounds(f: &IntervalType2, n: usize) -> Result<CentroidInterval> {
    let b = BoundSets::compute(&f.discretize(n)?)?;
    Ok(CentroidInterval::new(
        (b.left_outer + b.left_inner) / 2.0,
        (b.right_inner + b.right_outer) / 2.0,
    ))
}

/// Nie-Tan defuzzified value: the centroid of the averaged grades.
pub fn nie_tan(f: &IntervalType2, n: usize) -> Result<f64> {
    let d = f.discretize(n)?;
    weighted_mean(&d.xs, |i| d.upper[i] + d.lower[i])
        .ok_or(Error::DegenerateFou("membership grades sum to zero"))
}

/// x-coordinate of the centroid of the footprint polygon: the upper triangle
/// traversed left to right, then the lower triangle right to left.
pub fn geometric_centroid(f: &IntervalType2) -> Result<f64> {
    let [ul, um, uu] = f.upper().params();
    let [ll, lm, lu] = f.lower().params();
    let vertices = [
        (ul, 0.0),
        (um, 1.0),
        (uu, 0.0),
        (lu, 0.0),
        (lm, 1.0),
        (ll, 0.0),
        (ul, 0.0),
    ];
    let (moment, twice_area) = vertices.windows(2).fold((0.0, 0.0), |(mx, a2), w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let cross = x0 * y1 - x1 * y0;
        (mx + (x0 + x1) * cross, a2 + cross)
    });
    let area = twice_area / 2.0;
    if area.abs() < 1e-12 {
        return Err(Error::DegeneratePolygon { area });
    }
    Ok(moment / (3.0 * twice_area))
}

/// Centroid `(l + m + u) / 3` of a triangular type-1 number.
pub fn t1_centroid(t: &Triangular) -> f64 {
    (t.left() + t.apex() + t.right()) / 3.0
}
