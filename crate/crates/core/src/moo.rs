//! Scalarizations of the reliability/cost trade-off and the distance to the
//! ideal point used to compare compromise solutions.
//!
//! Every method is anchored on a [`PayoffTable`]. A method is turned into a
//! [`Scorer`] once per payoff table; the scorer maps an objective pair to a
//! score, or to `None` when the method's own side constraints exclude it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Design, Evaluation};

/// A point in objective space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub reliability: f64,
    pub cost: f64,
}

impl Objectives {
    pub fn new(reliability: f64, cost: f64) -> Self {
        Self { reliability, cost }
    }

    /// True when `self` is at least as good in both objectives and strictly
    /// better in one.
    pub fn dominates(&self, other: &Objectives) -> bool {
        self.reliability >= other.reliability
            && self.cost <= other.cost
            && (self.reliability > other.reliability || self.cost < other.cost)
    }
}

impl From<&Evaluation> for Objectives {
    fn from(e: &Evaluation) -> Self {
        Self::new(e.reliability, e.cost)
    }
}

/// Individual optima, their cross-evaluations and the extremes of each
/// objective over the whole feasible region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffTable {
    pub r_max: f64,
    pub r_max_design: Design,
    /// Cost of the reliability-optimal design.
    pub c_at_r_max: f64,
    pub c_min: f64,
    pub c_min_design: Design,
    /// Reliability of the cost-optimal design.
    pub r_at_c_min: f64,
    /// Smallest reliability of any feasible design.
    pub r_floor: f64,
    /// Largest cost of any feasible design.
    pub c_ceiling: f64,
}

impl PayoffTable {
    pub fn ideal(&self) -> Objectives {
        Objectives::new(self.r_max, self.c_min)
    }

    /// Worst value of each objective among the individual optima.
    pub fn nadir(&self) -> Objectives {
        Objectives::new(self.r_at_c_min, self.c_at_r_max)
    }

    pub fn anchors(&self, source: AnchorSource) -> Anchors {
        let worst = match source {
            AnchorSource::Payoff => self.nadir(),
            AnchorSource::Region => Objectives::new(self.r_floor, self.c_ceiling),
        };
        Anchors {
            best: self.ideal(),
            worst,
        }
    }
}

/// Where the worst value of each objective is taken from when normalizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorSource {
    /// Cross-evaluations of the individual optima.
    Payoff,
    /// Extremes over every feasible design.
    Region,
}

impl FromStr for AnchorSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "payoff" => Ok(AnchorSource::Payoff),
            "region" => Ok(AnchorSource::Region),
            other => Err(Error::Parse(format!(
                "unknown anchor source `{other}` (expected payoff or region)"
            ))),
        }
    }
}

impl fmt::Display for AnchorSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnchorSource::Payoff => "payoff",
            AnchorSource::Region => "region",
        })
    }
}

/// Best and worst value of each objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anchors {
    pub best: Objectives,
    pub worst: Objectives,
}

impl Anchors {
    fn reliability_range(&self) -> Result<f64> {
        positive(
            "reliability",
            self.best.reliability - self.worst.reliability,
            "best and worst reliability coincide",
        )
    }

    fn cost_range(&self) -> Result<f64> {
        positive(
            "cost",
            self.worst.cost - self.best.cost,
            "best and worst cost coincide",
        )
    }
}

fn positive(objective: &'static str, value: f64, detail: &str) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::DegenerateObjective {
            objective,
            detail: format!("{detail} (normalizer {value})"),
        })
    }
}

/// Order of the Minkowski distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Norm {
    Finite(f64),
    Infinity,
}

impl Norm {
    fn combine(&self, a: f64, b: f64) -> f64 {
        match *self {
            Norm::Finite(1.0) => a + b,
            Norm::Finite(2.0) => a.hypot(b),
            Norm::Finite(p) => (a.powf(p) + b.powf(p)).powf(1.0 / p),
            Norm::Infinity => a.max(b),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Norm::Infinity);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("norm order `{s}` is not a number or `inf`")))?;
        if p.is_infinite() && p > 0.0 {
            Ok(Norm::Infinity)
        } else if p >= 1.0 {
            Ok(Norm::Finite(p))
        } else {
            Err(Error::InvalidParameter(format!(
                "norm order must be at least 1, got {p}"
            )))
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Finite(p) => write!(f, "{p}"),
            Norm::Infinity => f.write_str("inf"),
        }
    }
}

/// Denominators of the global-criterion distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlobalVariant {
    /// Divide each deviation by the objective's best-to-worst range.
    Range,
    /// Divide each deviation by the objective's ideal value.
    Ideal,
}

impl FromStr for GlobalVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "range" => Ok(GlobalVariant::Range),
            "ideal" => Ok(GlobalVariant::Ideal),
            other => Err(Error::Parse(format!(
                "unknown global-criterion variant `{other}` (expected range or ideal)"
            ))),
        }
    }
}

/// Minkowski distance from the ideal point, minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalCriterion {
    pub p: Norm,
    pub variant: GlobalVariant,
    pub anchors: AnchorSource,
}

impl Default for GlobalCriterion {
    fn default() -> Self {
        Self {
            p: Norm::Finite(2.0),
            variant: GlobalVariant::Range,
            anchors: AnchorSource::Region,
        }
    }
}

/// Weighted sum of range-normalized objectives, maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedSum {
    pub w_reliability: f64,
    pub w_cost: f64,
    pub anchors: AnchorSource,
}

impl WeightedSum {
    pub fn new(w_reliability: f64, w_cost: f64) -> Self {
        Self {
            w_reliability,
            w_cost,
            anchors: AnchorSource::Region,
        }
    }
}

impl Default for WeightedSum {
    fn default() -> Self {
        Self::new(0.5, 0.5)
    }
}

/// Weighted geometric mean of power-law desirabilities, maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Desirability {
    /// Exponent of the reliability desirability.
    pub k: f64,
    /// Exponent of the cost desirability.
    pub l: f64,
    pub w_reliability: f64,
    pub w_cost: f64,
    pub anchors: AnchorSource,
}

impl Desirability {
    pub fn new(k: f64, l: f64) -> Self {
        Self {
            k,
            l,
            w_reliability: 1.0,
            w_cost: 1.0,
            anchors: AnchorSource::Payoff,
        }
    }
}

impl Default for Desirability {
    fn default() -> Self {
        Self::new(1.0, 0.1)
    }
}

/// Smallest of the two linear memberships, maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FuzzyMaxMin {
    pub anchors: AnchorSource,
}

impl Default for FuzzyMaxMin {
    fn default() -> Self {
        Self {
            anchors: AnchorSource::Payoff,
        }
    }
}

/// How the decision maker wants an objective to move away from the current
/// solution. Levels are in the objective's own units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Classification {
    /// Improve as much as possible.
    Improve,
    /// Improve until the given level.
    Aspiration(f64),
    /// Keep at least the current value.
    Satisfactory,
    /// May worsen down to the given level.
    Bound(f64),
    /// May change freely.
    Free,
}

impl Classification {
    fn improves(&self) -> bool {
        matches!(self, Classification::Improve | Classification::Aspiration(_))
    }

    fn may_worsen(&self) -> bool {
        matches!(self, Classification::Bound(_) | Classification::Free)
    }
}

impl FromStr for Classification {
    type Err = Error;

    /// `improve`, `aspiration:<level>`, `satisfactory`, `bound:<level>` or
    /// `free`.
    fn from_str(s: &str) -> Result<Self> {
        let (tag, level) = match s.split_once(':') {
            Some((t, l)) => (t.trim(), Some(l.trim())),
            None => (s.trim(), None),
        };
        let level = |name: &str| -> Result<f64> {
            level
                .ok_or_else(|| Error::Parse(format!("`{name}` needs a level, as in `{name}:0.6`")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad level in `{s}`")))
        };
        match tag {
            "improve" => Ok(Classification::Improve),
            "aspiration" => Ok(Classification::Aspiration(level("aspiration")?)),
            "satisfactory" => Ok(Classification::Satisfactory),
            "bound" => Ok(Classification::Bound(level("bound")?)),
            "free" => Ok(Classification::Free),
            other => Err(Error::Parse(format!(
                "unknown classification `{other}` (expected improve, aspiration:<level>, \
                 satisfactory, bound:<level> or free)"
            ))),
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Improve => f.write_str("improve"),
            Classification::Aspiration(v) => write!(f, "aspiration:{v}"),
            Classification::Satisfactory => f.write_str("satisfactory"),
            Classification::Bound(v) => write!(f, "bound:{v}"),
            Classification::Free => f.write_str("free"),
        }
    }
}

/// Classification-based subproblem around a current Pareto optimal point,
/// minimized. Objectives are handled in minimization form, with
/// reliability negated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Nimbus {
    pub reliability: Classification,
    pub cost: Classification,
    /// Augmentation coefficient.
    pub rho: f64,
    /// Objectives of the solution being classified.
    pub current: Objectives,
}

impl Nimbus {
    pub const DEFAULT_RHO: f64 = 1e-4;

    /// Reliability free, cost improved, around `current`.
    pub fn around(current: Objectives) -> Self {
        Self {
            reliability: Classification::Free,
            cost: Classification::Improve,
            rho: Self::DEFAULT_RHO,
            current,
        }
    }

    pub fn check_classification(&self) -> Result<()> {
        let both = [self.reliability, self.cost];
        if both.iter().any(Classification::improves) && both.iter().any(Classification::may_worsen)
        {
            Ok(())
        } else {
            Err(Error::InfeasibleClassification)
        }
    }
}

/// A scalarization method with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Method {
    GlobalCriterion(GlobalCriterion),
    WeightedSum(WeightedSum),
    Desirability(Desirability),
    FuzzyMaxMin(FuzzyMaxMin),
    Nimbus(Nimbus),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Method {
    pub fn key(&self) -> &'static str {
        match self {
            Method::GlobalCriterion(_) => "global",
            Method::WeightedSum(_) => "weighted",
            Method::Desirability(_) => "desirability",
            Method::FuzzyMaxMin(_) => "fuzzy",
            Method::Nimbus(_) => "nimbus",
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            Method::GlobalCriterion(_) | Method::Nimbus(_) => Sense::Minimize,
            _ => Sense::Maximize,
        }
    }

    /// Validates parameters against `pt` and fixes the normalization.
    pub fn scorer(&self, pt: &PayoffTable) -> Result<Scorer> {
        let kind = match *self {
            Method::GlobalCriterion(g) => {
                let a = pt.anchors(g.anchors);
                let (den_r, den_c) = match g.variant {
                    GlobalVariant::Range => (a.reliability_range()?, a.cost_range()?),
                    GlobalVariant::Ideal => (
                        positive("reliability", a.best.reliability, "ideal reliability is zero")?,
                        positive("cost", a.best.cost, "ideal cost is zero")?,
                    ),
                };
                ScorerKind::Global {
                    p: g.p,
                    ideal: a.best,
                    den_r,
                    den_c,
                }
            }
            Method::WeightedSum(w) => {
                let ok = |x: f64| x.is_finite() && x >= 0.0;
                if !(ok(w.w_reliability) && ok(w.w_cost))
                    || (w.w_reliability + w.w_cost - 1.0).abs() > 1e-9
                {
                    return Err(Error::InvalidParameter(format!(
                        "weights must be nonnegative and sum to 1, got ({}, {})",
                        w.w_reliability, w.w_cost
                    )));
                }
                let a = pt.anchors(w.anchors);
                ScorerKind::Weighted {
                    w: (w.w_reliability, w.w_cost),
                    anchors: a,
                    den_r: a.reliability_range()?,
                    den_c: a.cost_range()?,
                }
            }
            Method::Desirability(d) => {
                for (name, x) in [("k", d.k), ("l", d.l)] {
                    if !(x.is_finite() && x > 0.0) {
                        return Err(Error::InvalidParameter(format!(
                            "desirability exponent {name} must be positive, got {x}"
                        )));
                    }
                }
                for (name, x) in [("reliability", d.w_reliability), ("cost", d.w_cost)] {
                    if !(1.0..=5.0).contains(&x) {
                        return Err(Error::InvalidParameter(format!(
                            "desirability weight for {name} must lie in [1, 5], got {x}"
                        )));
                    }
                }
                let a = pt.anchors(d.anchors);
                ScorerKind::Desirability {
                    spec: d,
                    anchors: a,
                    den_r: a.reliability_range()?,
                    den_c: a.cost_range()?,
                }
            }
            Method::FuzzyMaxMin(f) => {
                let a = pt.anchors(f.anchors);
                ScorerKind::MaxMin {
                    anchors: a,
                    den_r: a.reliability_range()?,
                    den_c: a.cost_range()?,
                }
            }
            Method::Nimbus(n) => {
                n.check_classification()?;
                if !(n.rho.is_finite() && n.rho > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "augmentation coefficient must be positive, got {}",
                        n.rho
                    )));
                }
                let a = pt.anchors(AnchorSource::Payoff);
                ScorerKind::Nimbus {
                    spec: n,
                    ideal: to_min(a.best),
                    den: [a.reliability_range()?, a.cost_range()?],
                }
            }
        };
        Ok(Scorer {
            sense: self.sense(),
            kind,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::GlobalCriterion(g) => {
                let v = match g.variant {
                    GlobalVariant::Range => "range",
                    GlobalVariant::Ideal => "ideal",
                };
                write!(f, "global criterion (p={}, {v}, {} anchors)", g.p, g.anchors)
            }
            Method::WeightedSum(w) => write!(
                f,
                "weighted sum (w=({}, {}), {} anchors)",
                w.w_reliability, w.w_cost, w.anchors
            ),
            Method::Desirability(d) => write!(
                f,
                "desirability (t1={}, t2={}, w=({}, {}), {} anchors)",
                d.k, d.l, d.w_reliability, d.w_cost, d.anchors
            ),
            Method::FuzzyMaxMin(m) => write!(f, "fuzzy max-min ({} anchors)", m.anchors),
            Method::Nimbus(n) => write!(
                f,
                "nimbus (reliability {}, cost {}, rho={})",
                n.reliability, n.cost, n.rho
            ),
        }
    }
}

/// Objectives in minimization form.
fn to_min(o: Objectives) -> [f64; 2] {
    [-o.reliability, o.cost]
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ScorerKind {
    Global {
        p: Norm,
        ideal: Objectives,
        den_r: f64,
        den_c: f64,
    },
    Weighted {
        w: (f64, f64),
        anchors: Anchors,
        den_r: f64,
        den_c: f64,
    },
    Desirability {
        spec: Desirability,
        anchors: Anchors,
        den_r: f64,
        den_c: f64,
    },
    MaxMin {
        anchors: Anchors,
        den_r: f64,
        den_c: f64,
    },
    Nimbus {
        spec: Nimbus,
        ideal: [f64; 2],
        den: [f64; 2],
    },
}

/// A method bound to a payoff table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scorer {
    pub sense: Sense,
    kind: ScorerKind,
}

impl Scorer {
    /// Score of `o`, or `None` when the method's side constraints exclude it.
    pub fn score(&self, o: Objectives) -> Option<f64> {
        match self.kind {
            ScorerKind::Global {
                p,
                ideal,
                den_r,
                den_c,
            } => Some(p.combine(
                ((ideal.reliability - o.reliability) / den_r).abs(),
                ((o.cost - ideal.cost) / den_c).abs(),
            )),
            ScorerKind::Weighted {
                w,
                anchors,
                den_r,
                den_c,
            } => Some(
                w.0 * (o.reliability - anchors.worst.reliability) / den_r
                    + w.1 * (anchors.worst.cost - o.cost) / den_c,
            ),
            ScorerKind::Desirability {
                spec,
                anchors,
                den_r,
                den_c,
            } => {
                let d = ((o.reliability - anchors.worst.reliability) / den_r)
                    .clamp(0.0, 1.0)
                    .powf(spec.k);
                let s = ((anchors.worst.cost - o.cost) / den_c)
                    .clamp(0.0, 1.0)
                    .powf(spec.l);
                if d == 0.0 || s == 0.0 {
                    return Some(0.0);
                }
                let total = spec.w_reliability + spec.w_cost;
                Some((d.powf(spec.w_reliability) * s.powf(spec.w_cost)).powf(1.0 / total))
            }
            ScorerKind::MaxMin {
                anchors,
                den_r,
                den_c,
            } => {
                let mu_r = ((o.reliability - anchors.worst.reliability) / den_r).clamp(0.0, 1.0);
                let mu_c = ((anchors.worst.cost - o.cost) / den_c).clamp(0.0, 1.0);
                Some(mu_r.min(mu_c))
            }
            ScorerKind::Nimbus { spec, ideal, den } => nimbus_score(&spec, ideal, den, o),
        }
    }
}

fn nimbus_score(spec: &Nimbus, ideal: [f64; 2], den: [f64; 2], o: Objectives) -> Option<f64> {
    let g = to_min(o);
    let current = to_min(spec.current);
    let mut max_term = f64::NEG_INFINITY;
    for (i, class) in [spec.reliability, spec.cost].into_iter().enumerate() {
        match class {
            Classification::Improve => {
                if g[i] > current[i] {
                    return None;
                }
                max_term = max_term.max((g[i] - ideal[i]) / den[i]);
            }
            Classification::Aspiration(level) => {
                if g[i] > current[i] {
                    return None;
                }
                let level = to_min_component(i, level);
                max_term = max_term.max((g[i] - level) / den[i]);
            }
            Classification::Satisfactory => {
                if g[i] > current[i] {
                    return None;
                }
            }
            Classification::Bound(level) => {
                if g[i] > to_min_component(i, level) {
                    return None;
                }
            }
            Classification::Free => {}
        }
    }
    let augmentation: f64 = (0..2).map(|i| g[i] / den[i]).sum();
    Some(max_term + spec.rho * augmentation)
}

fn to_min_component(i: usize, value: f64) -> f64 {
    if i == 0 {
        -value
    } else {
        value
    }
}

/// Normalization of the distance to the ideal point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvergenceNormalization {
    /// Relative deviations: divide by the ideal values.
    #[default]
    Ideal,
    /// Divide by the payoff-table ranges.
    Range,
}

impl FromStr for ConvergenceNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(ConvergenceNormalization::Ideal),
            "range" => Ok(ConvergenceNormalization::Range),
            other => Err(Error::Parse(format!(
                "unknown convergence normalization `{other}` (expected ideal or range)"
            ))),
        }
    }
}

impl fmt::Display for ConvergenceNormalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvergenceNormalization::Ideal => "ideal",
            ConvergenceNormalization::Range => "range",
        })
    }
}

/// Normalized Euclidean distance from `o` to `ideal`.
pub fn distance_to_ideal(
    o: Objectives,
    ideal: Objectives,
    nadir: Objectives,
    norm: ConvergenceNormalization,
) -> Result<f64> {
    let (den_r, den_c) = match norm {
        ConvergenceNormalization::Ideal => (
            positive("reliability", ideal.reliability, "ideal reliability is zero")?,
            positive("cost", ideal.cost, "ideal cost is zero")?,
        ),
        ConvergenceNormalization::Range => (
            positive(
                "reliability",
                ideal.reliability - nadir.reliability,
                "best and worst reliability coincide",
            )?,
            positive("cost", nadir.cost - ideal.cost, "best and worst cost coincide")?,
        ),
    };
    Ok(((ideal.reliability - o.reliability) / den_r).hypot((o.cost - ideal.cost) / den_c))
}

/// Normalized Euclidean distance from `o` to the ideal point of `pt`.
pub fn convergence_metric(
    o: Objectives,
    pt: &PayoffTable,
    norm: ConvergenceNormalization,
) -> Result<f64> {
    distance_to_ideal(o, pt.ideal(), pt.nadir(), norm)
}

/// Distances of reference solutions under both normalizations, with the
/// best-matching convention.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub expected: Vec<f64>,
    pub ideal: Vec<f64>,
    pub range: Vec<f64>,
    pub ideal_max_error: f64,
    pub range_max_error: f64,
    /// Convention whose largest error is within the tolerance, preferring
    /// the smaller error.
    pub matched: Option<ConvergenceNormalization>,
    pub tolerance: f64,
}

/// Recomputes the distances of `solutions` from `ideal` under both
/// normalizations and compares them with `expected`.
pub fn calibrate(
    solutions: &[Objectives],
    expected: &[f64],
    ideal: Objectives,
    nadir: Objectives,
    tolerance: f64,
) -> Result<Calibration> {
    if solutions.len() != expected.len() {
        return Err(Error::DimensionMismatch {
            expected: expected.len(),
            found: solutions.len(),
        });
    }
    let run = |norm| -> Result<Vec<f64>> {
        solutions
            .iter()
            .map(|&o| distance_to_ideal(o, ideal, nadir, norm))
            .collect()
    };
    let ideal_d = run(ConvergenceNormalization::Ideal)?;
    let range_d = run(ConvergenceNormalization::Range)?;
    let max_err = |d: &[f64]| {
        d.iter()
            .zip(expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let (ie, re) = (max_err(&ideal_d), max_err(&range_d));
    let matched = match (ie <= tolerance, re <= tolerance) {
        (true, true) if re < ie => Some(ConvergenceNormalization::Range),
        (true, _) => Some(ConvergenceNormalization::Ideal),
        (false, true) => Some(ConvergenceNormalization::Range),
        (false, false) => None,
    };
    Ok(Calibration {
        expected: expected.to_vec(),
        ideal: ideal_d,
        range: range_d,
        ideal_max_error: ie,
        range_max_error: re,
        matched,
        tolerance,
    })
}
