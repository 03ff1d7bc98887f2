//! Triangular type-1 and interval type-2 fuzzy numbers.
//!
//! An [`IntervalType2`] is a pair of triangles sharing an apex: the upper
//! membership function (UMF) and the lower membership function (LMF). The
//! region between them is the footprint of uncertainty; secondary grades are
//! identically one and are not stored.
//!
//! Both types print and parse in the tuple notation used by the configuration
//! files: `(l, m, u)` for a triangle and `((l, m, u), (l, m, u))` for an
//! interval type-2 number, upper triangle first.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default number of grid points used by the grid-based reductions.
pub const DEFAULT_GRID: usize = 2001;

/// Triangular membership function `(l, m, u)` with `l <= m <= u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangular {
    l: f64,
    m: f64,
    u: f64,
}

impl Triangular {
    pub fn new(l: f64, m: f64, u: f64) -> Result<Self> {
        if !(l.is_finite() && m.is_finite() && u.is_finite()) {
            return Err(Error::InvalidTriangle {
                l,
                m,
                u,
                reason: "parameters must be finite",
            });
        }
        if !(l <= m && m <= u) {
            return Err(Error::InvalidTriangle {
                l,
                m,
                u,
                reason: "expected l <= m <= u",
            });
        }
        Ok(Self { l, m, u })
    }

    /// Degenerate triangle concentrated on a single point.
    pub fn crisp(x: f64) -> Result<Self> {
        Self::new(x, x, x)
    }

    pub fn left(&self) -> f64 {
        self.l
    }

    pub fn apex(&self) -> f64 {
        self.m
    }

    pub fn right(&self) -> f64 {
        self.u
    }

    pub fn params(&self) -> [f64; 3] {
        [self.l, self.m, self.u]
    }

    /// Piecewise-linear membership grade; 1 at the apex, 0 outside `[l, u]`.
    pub fn membership(&self, x: f64) -> f64 {
        if x < self.l || x > self.u {
            0.0
        } else if x == self.m {
            1.0
        } else if x < self.m {
            (x - self.l) / (self.m - self.l)
        } else {
            (self.u - x) / (self.u - self.m)
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(f(self.l), f(self.m), f(self.u))
    }
}

impl fmt::Display for Triangular {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.l, self.m, self.u)
    }
}

impl FromStr for Triangular {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected `(l, m, u)`, got `{s}`")))?;
        let values = parse_numbers(inner, s)?;
        match values.as_slice() {
            &[l, m, u] => Self::new(l, m, u),
            _ => Err(Error::Parse(format!(
                "expected three numbers in `{s}`, found {}",
                values.len()
            ))),
        }
    }
}

fn parse_numbers(list: &str, original: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{tok}` in `{original}`")))
        })
        .collect()
}

/// Interval type-2 fuzzy number with triangular upper and lower membership
/// functions sharing a common apex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalType2 {
    upper: Triangular,
    lower: Triangular,
}

impl IntervalType2 {
    /// Builds the number, checking the shared apex and that the lower
    /// triangle sits inside the upper one.
    pub fn new(upper: Triangular, lower: Triangular) -> Result<Self> {
        if upper.m != lower.m {
            return Err(Error::InvalidIntervalType2(format!(
                "upper apex {} differs from lower apex {}",
                upper.m, lower.m
            )));
        }
        if upper.l > lower.l || lower.u > upper.u {
            return Err(Error::InvalidIntervalType2(format!(
                "lower triangle {lower} is not contained in upper triangle {upper}"
            )));
        }
        Ok(Self { upper, lower })
    }

    /// Number whose footprint has collapsed onto a single triangle.
    pub fn collapsed(t: Triangular) -> Self {
        Self { upper: t, lower: t }
    }

    pub fn from_params(upper: [f64; 3], lower: [f64; 3]) -> Result<Self> {
        Self::new(
            Triangular::new(upper[0], upper[1], upper[2])?,
            Triangular::new(lower[0], lower[1], lower[2])?,
        )
    }

    pub fn upper(&self) -> Triangular {
        self.upper
    }

    pub fn lower(&self) -> Triangular {
        self.lower
    }

    pub fn apex(&self) -> f64 {
        self.upper.m
    }

    /// Support of the number, i.e. the support of the upper triangle.
    pub fn support(&self) -> (f64, f64) {
        (self.upper.l, self.upper.u)
    }

    /// Returns `(lower grade, upper grade)` at `x`.
    pub fn membership_bounds(&self, x: f64) -> (f64, f64) {
        (self.lower.membership(x), self.upper.membership(x))
    }

    /// Componentwise product of the six parameters. Only defined for
    /// nonnegative operands.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if let Some(neg) = self
            .params()
            .into_iter()
            .chain(rhs.params())
            .find(|v| *v < 0.0)
        {
            return Err(Error::NegativeParameter(neg));
        }
        let mul = |a: Triangular, b: Triangular| Triangular::new(a.l * b.l, a.m * b.m, a.u * b.u);
        Self::new(mul(self.upper, rhs.upper)?, mul(self.lower, rhs.lower)?)
    }

    /// Multiplies every parameter by `r > 0`.
    pub fn scale(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::NonPositiveScale(r));
        }
        Self::new(self.upper.map(|v| v * r)?, self.lower.map(|v| v * r)?)
    }

    /// Divides every parameter by `r > 0`.
    pub fn divide(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::NonPositiveScale(r));
        }
        Self::new(self.upper.map(|v| v / r)?, self.lower.map(|v| v / r)?)
    }

    /// The six parameters, upper triangle first.
    pub fn params(&self) -> [f64; 6] {
        let [a, b, c] = self.upper.params();
        let [d, e, f] = self.lower.params();
        [a, b, c, d, e, f]
    }

    /// Samples both membership functions on `n` uniformly spaced points
    /// spanning the support, endpoints included.
    pub fn discretize(&self, n: usize) -> Result<DiscretizedFou> {
        if n < 3 {
            return Err(Error::GridTooSmall(n));
        }
        let (lo, hi) = self.support();
        if !(hi > lo) {
            return Err(Error::DegenerateFou("support has zero width"));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut xs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        xs[n - 1] = hi;
        let (lower, upper) = xs.iter().map(|&x| self.membership_bounds(x)).unzip();
        Ok(DiscretizedFou {
            xs,
            lower,
            upper,
        })
    }
}

impl Add for IntervalType2 {
    type Output = IntervalType2;

    fn add(self, rhs: Self) -> Self {
        let add = |a: Triangular, b: Triangular| Triangular {
            l: a.l + b.l,
            m: a.m + b.m,
            u: a.u + b.u,
        };
        IntervalType2 {
            upper: add(self.upper, rhs.upper),
            lower: add(self.lower, rhs.lower),
        }
    }
}

impl fmt::Display for IntervalType2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.upper, self.lower)
    }
}

impl FromStr for IntervalType2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("((")
            .and_then(|rest| rest.strip_suffix("))"))
            .ok_or_else(|| {
                Error::Parse(format!("expected `((l, m, u), (l, m, u))`, got `{s}`"))
            })?;
        let (upper, lower) = inner
            .split_once("),(")
            .ok_or_else(|| Error::Parse(format!("expected two triangles in `{s}`")))?;
        let upper = parse_numbers(upper, s)?;
        let lower = parse_numbers(lower, s)?;
        match (upper.as_slice(), lower.as_slice()) {
            (&[a, b, c], &[d, e, f]) => Self::from_params([a, b, c], [d, e, f]),
            _ => Err(Error::Parse(format!(
                "expected three numbers per triangle in `{s}`"
            ))),
        }
    }
}

serde_via_str!(Triangular);
serde_via_str!(IntervalType2);

/// Footprint of uncertainty sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedFou {
    pub xs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl DiscretizedFou {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}
