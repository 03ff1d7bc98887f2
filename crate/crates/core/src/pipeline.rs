//! End-to-end runs: defuzzify the configured reliabilities, build the payoff
//! table, solve the requested scalarizations and compare everything with
//! the reference results carried by the configuration.

use std::fmt;

use serde::Serialize;

use crate::config::{ProblemConfig, Profile, ReferenceSolution};
use crate::error::{Error, ErrorKind, Result};
use crate::fuzzy::DEFAULT_GRID;
use crate::model::{evaluate, Design, ProblemInstance};
use crate::moo::{
    calibrate, AnchorSource, Calibration, Classification, ConvergenceNormalization, Desirability,
    FuzzyMaxMin, GlobalCriterion, GlobalVariant, Method, Nimbus, Norm, Objectives, PayoffTable,
    WeightedSum,
};
use crate::reduction::{
    geometric_centroid, km_centroid, nie_tan, t1_centroid, uncertainty_bounds, Reduction,
};
use crate::solver::{
    build_payoff, optimize_scalarized, pareto_front, weighted_sweep, CompromiseSolution,
    FeasibleSet, SweepPoint, DEFAULT_BUDGET,
};

/// Agreement required between a published solution and a direct
/// evaluation of its design.
pub const RELIABILITY_TOLERANCE: f64 = 1e-4;
pub const COST_TOLERANCE: f64 = 0.05;
/// Agreement required between published and computed distances.
pub const DISTANCE_TOLERANCE: f64 = 1e-3;

/// Reference group holding the per-reduction method runs.
pub const METHODS_GROUP: &str = "methods";
/// Reference group holding the type-1 versus type-2 comparison.
pub const COMPARISON_GROUP: &str = "comparison";

/// Step of a run, reported with any failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Load,
    Defuzzify,
    Payoff,
    Solve,
    Report,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Load => "load",
            Stage::Defuzzify => "defuzzify",
            Stage::Payoff => "payoff",
            Stage::Solve => "solve",
            Stage::Report => "report",
        })
    }
}

/// An error together with the stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl StageError {
    pub fn kind(&self) -> ErrorKind {
        self.source.kind()
    }
}

pub trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

pub type StageResult<T> = std::result::Result<T, StageError>;

/// Which scalarizations to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Global,
    Weighted,
    Desirability,
    Fuzzy,
    Nimbus,
    All,
}

impl std::str::FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(MethodChoice::Global),
            "weighted" => Ok(MethodChoice::Weighted),
            "desirability" => Ok(MethodChoice::Desirability),
            "fuzzy" => Ok(MethodChoice::Fuzzy),
            "nimbus" => Ok(MethodChoice::Nimbus),
            "all" => Ok(MethodChoice::All),
            other => Err(Error::Parse(format!(
                "unknown method `{other}` (expected global, weighted, desirability, fuzzy, nimbus or all)"
            ))),
        }
    }
}

/// Parameters shared by the scalarizations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodParams {
    pub p: Norm,
    pub global_variant: GlobalVariant,
    pub global_anchors: AnchorSource,
    pub weights: (f64, f64),
    pub weighted_anchors: AnchorSource,
    /// Reliability exponents to run; more than one gives one row each.
    pub t1: Vec<f64>,
    pub t2: f64,
    pub desirability_weights: (f64, f64),
    pub desirability_anchors: AnchorSource,
    pub fuzzy_anchors: AnchorSource,
    pub nimbus_reliability: Classification,
    pub nimbus_cost: Classification,
    pub rho: f64,
}

impl Default for MethodParams {
    fn default() -> Self {
        let g = GlobalCriterion::default();
        let d = Desirability::default();
        Self {
            p: g.p,
            global_variant: g.variant,
            global_anchors: g.anchors,
            weights: (0.5, 0.5),
            weighted_anchors: WeightedSum::default().anchors,
            t1: vec![1.0, 0.5],
            t2: d.l,
            desirability_weights: (d.w_reliability, d.w_cost),
            desirability_anchors: d.anchors,
            fuzzy_anchors: FuzzyMaxMin::default().anchors,
            nimbus_reliability: Classification::Free,
            nimbus_cost: Classification::Improve,
            rho: Nimbus::DEFAULT_RHO,
        }
    }
}

impl MethodParams {
    fn global(&self) -> Method {
        Method::GlobalCriterion(GlobalCriterion {
            p: self.p,
            variant: self.global_variant,
            anchors: self.global_anchors,
        })
    }

    fn weighted(&self) -> Method {
        Method::WeightedSum(WeightedSum {
            w_reliability: self.weights.0,
            w_cost: self.weights.1,
            anchors: self.weighted_anchors,
        })
    }

    fn desirability(&self) -> Vec<Method> {
        self.t1
            .iter()
            .map(|&k| {
                Method::Desirability(Desirability {
                    k,
                    l: self.t2,
                    w_reliability: self.desirability_weights.0,
                    w_cost: self.desirability_weights.1,
                    anchors: self.desirability_anchors,
                })
            })
            .collect()
    }

    fn fuzzy(&self) -> Method {
        Method::FuzzyMaxMin(FuzzyMaxMin {
            anchors: self.fuzzy_anchors,
        })
    }

    fn nimbus(&self, current: Objectives) -> Method {
        Method::Nimbus(Nimbus {
            reliability: self.nimbus_reliability,
            cost: self.nimbus_cost,
            rho: self.rho,
            current,
        })
    }
}

/// Parameter string used to pair computed rows with reference rows.
pub fn method_params(m: &Method) -> String {
    match m {
        Method::GlobalCriterion(g) => format!("p={}", g.p),
        Method::WeightedSum(w) => format!("w={},{}", w.w_reliability, w.w_cost),
        Method::Desirability(d) => format!("t1={},t2={}", d.k, d.l),
        Method::FuzzyMaxMin(_) => String::new(),
        Method::Nimbus(n) => format!("reliability={},cost={}", n.reliability, n.cost),
    }
}

/// Everything a run needs besides the configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    pub reduction: Reduction,
    pub methods: MethodChoice,
    pub params: MethodParams,
    pub grid: usize,
    pub profile: Profile,
    pub budget: u64,
    pub convergence: ConvergenceNormalization,
    /// Use the published crisp values instead of recomputing them.
    pub reference_values: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            reduction: Reduction::KarnikMendel,
            methods: MethodChoice::All,
            params: MethodParams::default(),
            grid: DEFAULT_GRID,
            profile: Profile::Strict,
            budget: DEFAULT_BUDGET,
            convergence: ConvergenceNormalization::default(),
            reference_values: false,
        }
    }
}

/// One fuzzy reliability reduced by every method, next to the published
/// values where available.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefuzzRow {
    pub subsystem: usize,
    pub fuzzy: String,
    pub km_left: Option<f64>,
    pub km_right: Option<f64>,
    pub km: Option<f64>,
    pub ub_left: Option<f64>,
    pub ub_right: Option<f64>,
    pub ub: Option<f64>,
    pub nt: Option<f64>,
    pub gc: Option<f64>,
    pub t1_centroid: Option<f64>,
    pub ref_km_left: Option<f64>,
    pub ref_km_right: Option<f64>,
    pub ref_km: Option<f64>,
    pub ref_ub_left: Option<f64>,
    pub ref_ub_right: Option<f64>,
    pub ref_ub: Option<f64>,
    pub ref_nt: Option<f64>,
    pub ref_gc: Option<f64>,
}

impl DefuzzRow {
    fn empty(subsystem: usize, fuzzy: String) -> Self {
        Self {
            subsystem,
            fuzzy,
            km_left: None,
            km_right: None,
            km: None,
            ub_left: None,
            ub_right: None,
            ub: None,
            nt: None,
            gc: None,
            t1_centroid: None,
            ref_km_left: None,
            ref_km_right: None,
            ref_km: None,
            ref_ub_left: None,
            ref_ub_right: None,
            ref_ub: None,
            ref_nt: None,
            ref_gc: None,
        }
    }

    pub fn value(&self, r: Reduction) -> Option<f64> {
        match r {
            Reduction::KarnikMendel => self.km,
            Reduction::UncertaintyBounds => self.ub,
            Reduction::NieTan => self.nt,
            Reduction::GeometricCentroid => self.gc,
            Reduction::T1Centroid => self.t1_centroid,
        }
    }

    pub fn reference(&self, r: Reduction) -> Option<f64> {
        match r {
            Reduction::KarnikMendel => self.ref_km,
            Reduction::UncertaintyBounds => self.ref_ub,
            Reduction::NieTan => self.ref_nt,
            Reduction::GeometricCentroid => self.ref_gc,
            Reduction::T1Centroid => None,
        }
    }
}

/// Largest deviation from the published values, per quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefuzzDeviation {
    pub quantity: String,
    pub max_abs_delta: f64,
    pub worst_subsystem: usize,
}

/// Reduces every interval type-2 reliability by the four methods.
pub fn defuzzify_all(config: &ProblemConfig, grid: usize) -> Result<Vec<DefuzzRow>> {
    let refs = &config.reference;
    config
        .it2_reliabilities()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut row = DefuzzRow::empty(i + 1, f.to_string());
            let km = km_centroid(f, grid)?;
            (row.km_left, row.km_right, row.km) = (Some(km.left), Some(km.right), Some(km.defuzzified));
            let ub = uncertainty_bounds(f, grid)?;
            (row.ub_left, row.ub_right, row.ub) = (Some(ub.left), Some(ub.right), Some(ub.defuzzified));
            row.nt = Some(nie_tan(f, grid)?);
            row.gc = geometric_centroid(f).ok();
            if f.upper() == f.lower() {
                row.t1_centroid = Some(t1_centroid(&f.upper()));
            }
            let pick = |v: &[f64]| v.get(i).copied();
            row.ref_km = pick(&refs.defuzzified.km);
            row.ref_ub = pick(&refs.defuzzified.ub);
            row.ref_nt = pick(&refs.defuzzified.nt);
            row.ref_gc = pick(&refs.defuzzified.gc);
            if let Some([l, r]) = refs.intervals.km.get(i) {
                (row.ref_km_left, row.ref_km_right) = (Some(*l), Some(*r));
            }
            if let Some([l, r]) = refs.intervals.ub.get(i) {
                (row.ref_ub_left, row.ref_ub_right) = (Some(*l), Some(*r));
            }
            Ok(row)
        })
        .collect()
}

/// Largest deviation of each reduced quantity from its published value.
pub fn defuzz_deviations(rows: &[DefuzzRow]) -> Vec<DefuzzDeviation> {
    type Getter = fn(&DefuzzRow) -> (Option<f64>, Option<f64>);
    let quantities: [(&str, Getter); 8] = [
        ("km_left", |r| (r.km_left, r.ref_km_left)),
        ("km_right", |r| (r.km_right, r.ref_km_right)),
        ("km", |r| (r.km, r.ref_km)),
        ("ub_left", |r| (r.ub_left, r.ref_ub_left)),
        ("ub_right", |r| (r.ub_right, r.ref_ub_right)),
        ("ub", |r| (r.ub, r.ref_ub)),
        ("nt", |r| (r.nt, r.ref_nt)),
        ("gc", |r| (r.gc, r.ref_gc)),
    ];
    quantities
        .iter()
        .filter_map(|(name, get)| {
            rows.iter()
                .filter_map(|r| match get(r) {
                    (Some(a), Some(b)) => Some(((a - b).abs(), r.subsystem)),
                    _ => None,
                })
                .fold(None, |acc: Option<(f64, usize)>, x| match acc {
                    Some(a) if a.0 >= x.0 => Some(a),
                    _ => Some(x),
                })
                .map(|(max_abs_delta, worst_subsystem)| DefuzzDeviation {
                    quantity: name.to_string(),
                    max_abs_delta,
                    worst_subsystem,
                })
        })
        .collect()
}

/// Crisp reliabilities used by a run, and where they came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrispReliabilities {
    pub reduction: Reduction,
    /// `computed`, `reference` or `generated`.
    pub source: String,
    pub values: Vec<f64>,
}

fn crisp_reliabilities(
    config: &ProblemConfig,
    opts: &RunOptions,
    rows: &[DefuzzRow],
) -> Result<CrispReliabilities> {
    let r = opts.reduction;
    if r == Reduction::T1Centroid {
        let t1 = config.t1_reliabilities()?;
        let source = if config.has_given_t1() { "computed" } else { "generated" };
        return Ok(CrispReliabilities {
            reduction: r,
            source: source.into(),
            values: t1.iter().map(t1_centroid).collect(),
        });
    }
    if opts.reference_values {
        let values = config.reference.defuzzified.get(r).ok_or_else(|| {
            Error::Config(format!("no reference defuzzified values for {r}"))
        })?;
        if values.len() != config.len() {
            return Err(Error::DimensionMismatch {
                expected: config.len(),
                found: values.len(),
            });
        }
        return Ok(CrispReliabilities {
            reduction: r,
            source: "reference".into(),
            values: values.to_vec(),
        });
    }
    let values = match r {
        Reduction::GeometricCentroid => config
            .it2_reliabilities()
            .iter()
            .map(geometric_centroid)
            .collect::<Result<Vec<_>>>()?,
        _ => rows
            .iter()
            .map(|row| row.value(r).expect("grid reductions are always computed"))
            .collect(),
    };
    Ok(CrispReliabilities {
        reduction: r,
        source: "computed".into(),
        values,
    })
}

/// Individual optima next to the published ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffSection {
    pub table: PayoffTable,
    pub reference_r_max: Option<f64>,
    pub reference_c_min: Option<f64>,
    /// Computed optimum is at least every published compromise reliability.
    pub r_max_bounds_references: Option<bool>,
    /// Computed optimum is at most every published compromise cost.
    pub c_min_bounds_references: Option<bool>,
}

/// A computed compromise solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionRow {
    pub method: String,
    pub params: String,
    pub label: String,
    pub reliability: f64,
    pub cost: f64,
    pub design: Design,
    pub score: f64,
    pub ties: u64,
    pub convergence: Option<f64>,
    pub reference_reliability: Option<f64>,
    pub reference_cost: Option<f64>,
    pub reference_design: Option<Design>,
    /// Computed objectives agree with the published ones.
    pub matches_reference: Option<bool>,
}

/// Outcome of re-evaluating a published design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Consistency {
    /// The design reproduces the published objectives.
    Consistent,
    /// The design does not reproduce the published objectives.
    ReferenceInconsistent,
    /// The design cannot be checked, because its inputs are unknown.
    Unverifiable,
}

impl fmt::Display for Consistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Consistency::Consistent => "consistent",
            Consistency::ReferenceInconsistent => "reference-inconsistent",
            Consistency::Unverifiable => "unverifiable",
        })
    }
}

/// Direct re-evaluation of one published solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceCheck {
    pub group: String,
    pub method: String,
    pub params: String,
    pub reliability: f64,
    pub cost: f64,
    pub design: Design,
    /// Design with unpublished counts filled in by the best-matching value.
    pub resolved_design: Option<Design>,
    pub evaluated_reliability: Option<f64>,
    pub evaluated_cost: Option<f64>,
    pub feasible: Option<bool>,
    pub status: Consistency,
}

/// Re-evaluates a published design, filling unpublished counts with the
/// value that best reproduces the published objectives.
pub fn check_reference(inst: &ProblemInstance, s: &ReferenceSolution) -> Result<ReferenceCheck> {
    let caps: Vec<u32> = inst.subsystems().iter().map(|p| p.n_max).collect();
    if s.design.len() != inst.len() {
        return Err(Error::DimensionMismatch {
            expected: inst.len(),
            found: s.design.len(),
        });
    }
    let unknown: Vec<usize> = (0..inst.len()).filter(|&i| s.design.0[i] == 0).collect();
    let choices: u64 = unknown.iter().map(|&i| u64::from(caps[i])).product();
    let mut best: Option<(f64, Design, f64, f64, bool)> = None;
    for k in 0..choices {
        let mut d = s.design.clone();
        let mut rest = k;
        for &i in &unknown {
            d.0[i] = (rest % u64::from(caps[i])) as u32 + 1;
            rest /= u64::from(caps[i]);
        }
        let e = evaluate(inst, &d)?;
        let miss = ((e.reliability - s.reliability) / RELIABILITY_TOLERANCE)
            .abs()
            .max(((e.cost - s.cost) / COST_TOLERANCE).abs());
        if best.as_ref().map_or(true, |b| miss < b.0) {
            best = Some((miss, d, e.reliability, e.cost, e.feasible));
        }
    }
    let (miss, resolved, r, c, feasible) = best.expect("at least one completion");
    Ok(ReferenceCheck {
        group: s.group.clone(),
        method: s.method.clone(),
        params: s.params.clone(),
        reliability: s.reliability,
        cost: s.cost,
        design: s.design.clone(),
        resolved_design: (!unknown.is_empty()).then_some(resolved),
        evaluated_reliability: Some(r),
        evaluated_cost: Some(c),
        feasible: Some(feasible),
        status: if miss <= 1.0 {
            Consistency::Consistent
        } else {
            Consistency::ReferenceInconsistent
        },
    })
}

fn unverifiable(s: &ReferenceSolution) -> ReferenceCheck {
    ReferenceCheck {
        group: s.group.clone(),
        method: s.method.clone(),
        params: s.params.clone(),
        reliability: s.reliability,
        cost: s.cost,
        design: s.design.clone(),
        resolved_design: None,
        evaluated_reliability: None,
        evaluated_cost: None,
        feasible: None,
        status: Consistency::Unverifiable,
    }
}

/// Output of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub reduction: Reduction,
    pub profile: Profile,
    pub grid: usize,
    pub convergence_normalization: ConvergenceNormalization,
    pub reliabilities: CrispReliabilities,
    pub defuzzification: Vec<DefuzzRow>,
    pub defuzzification_deviations: Vec<DefuzzDeviation>,
    pub feasible_designs: usize,
    pub payoff: PayoffSection,
    pub solutions: Vec<SolutionRow>,
    pub reference_checks: Vec<ReferenceCheck>,
    pub calibration: Option<Calibration>,
}

/// A solved instance, kept for follow-up work such as front export.
pub struct Solved {
    pub instance: ProblemInstance,
    pub feasible: FeasibleSet,
    pub payoff: PayoffTable,
}

/// Loads, defuzzifies and enumerates; the common first half of every run.
pub fn prepare(
    config: &ProblemConfig,
    opts: &RunOptions,
) -> StageResult<(Vec<DefuzzRow>, CrispReliabilities, Solved)> {
    let rows = if opts.reduction == Reduction::T1Centroid {
        t1_rows(config).at(Stage::Defuzzify)?
    } else {
        defuzzify_all(config, opts.grid).at(Stage::Defuzzify)?
    };
    let crisp = crisp_reliabilities(config, opts, &rows).at(Stage::Defuzzify)?;
    let instance = config
        .instance(opts.profile, crisp.values.clone())
        .at(Stage::Load)?;
    let feasible = FeasibleSet::build(&instance, opts.budget).at(Stage::Payoff)?;
    let payoff = build_payoff(&feasible).at(Stage::Payoff)?;
    Ok((
        rows,
        crisp,
        Solved {
            instance,
            feasible,
            payoff,
        },
    ))
}

fn t1_rows(config: &ProblemConfig) -> Result<Vec<DefuzzRow>> {
    Ok(config
        .t1_reliabilities()?
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut row = DefuzzRow::empty(i + 1, t.to_string());
            row.t1_centroid = Some(t1_centroid(t));
            row
        })
        .collect())
}

/// Runs the requested methods on a solved instance. The weighted sum is
/// always solved first because it provides the current point classified by
/// the classification method.
pub fn solve_methods(
    solved: &Solved,
    opts: &RunOptions,
) -> StageResult<Vec<(Method, CompromiseSolution)>> {
    let p = &opts.params;
    let run = |m: &Method| {
        optimize_scalarized(&solved.feasible, m, &solved.payoff, opts.convergence).at(Stage::Solve)
    };
    let weighted = p.weighted();
    let ws = run(&weighted)?;
    let mut methods = Vec::new();
    let all = opts.methods == MethodChoice::All;
    if all || opts.methods == MethodChoice::Global {
        methods.push(p.global());
    }
    if all || opts.methods == MethodChoice::Weighted {
        methods.push(weighted);
    }
    if all || opts.methods == MethodChoice::Desirability {
        methods.extend(p.desirability());
    }
    if all || opts.methods == MethodChoice::Fuzzy {
        methods.push(p.fuzzy());
    }
    if all || opts.methods == MethodChoice::Nimbus {
        methods.push(p.nimbus(ws.objectives()));
    }
    methods
        .into_iter()
        .map(|m| {
            let sol = if m == weighted { ws.clone() } else { run(&m)? };
            Ok((m, sol))
        })
        .collect()
}

fn find_reference<'a>(
    refs: &'a [&'a ReferenceSolution],
    method: &Method,
) -> Option<&'a ReferenceSolution> {
    let params = method_params(method);
    refs.iter()
        .copied()
        .find(|r| r.method == method.key() && (r.params.is_empty() || r.params == params))
}

fn solution_row(
    method: &Method,
    sol: &CompromiseSolution,
    reference: Option<&ReferenceSolution>,
) -> SolutionRow {
    SolutionRow {
        method: method.key().to_string(),
        params: method_params(method),
        label: sol.method.clone(),
        reliability: sol.evaluation.reliability,
        cost: sol.evaluation.cost,
        design: sol.design.clone(),
        score: sol.score,
        ties: sol.ties,
        convergence: sol.convergence,
        reference_reliability: reference.map(|r| r.reliability),
        reference_cost: reference.map(|r| r.cost),
        reference_design: reference.map(|r| r.design.clone()),
        matches_reference: reference.map(|r| {
            (sol.evaluation.reliability - r.reliability).abs() <= RELIABILITY_TOLERANCE
                && (sol.evaluation.cost - r.cost).abs() <= COST_TOLERANCE
        }),
    }
}

fn reference_checks(
    config: &ProblemConfig,
    inst: &ProblemInstance,
    group: &str,
    reduction: Reduction,
    verifiable: bool,
) -> Result<Vec<ReferenceCheck>> {
    config
        .reference
        .solutions(group, reduction)
        .map(|s| {
            if verifiable {
                check_reference(inst, s)
            } else {
                Ok(unverifiable(s))
            }
        })
        .collect()
}

pub fn payoff_section(
    config: &ProblemConfig,
    reduction: Reduction,
    table: &PayoffTable,
    group: &str,
) -> PayoffSection {
    let refs: Vec<_> = config.reference.solutions(group, reduction).collect();
    let optima = config.reference.optima(reduction);
    let nonempty = !refs.is_empty();
    PayoffSection {
        table: table.clone(),
        reference_r_max: optima.map(|o| o.r_max),
        reference_c_min: optima.map(|o| o.c_min),
        r_max_bounds_references: nonempty
            .then(|| refs.iter().all(|r| table.r_max >= r.reliability)),
        c_min_bounds_references: nonempty.then(|| refs.iter().all(|r| table.c_min <= r.cost)),
    }
}

fn calibration(
    config: &ProblemConfig,
    reduction: Reduction,
    table: &PayoffTable,
) -> Result<Option<Calibration>> {
    let (points, expected): (Vec<_>, Vec<_>) = config
        .reference
        .solutions(METHODS_GROUP, reduction)
        .filter_map(|s| s.distance.map(|d| (Objectives::new(s.reliability, s.cost), d)))
        .unzip();
    if points.is_empty() {
        return Ok(None);
    }
    calibrate(&points, &expected, table.ideal(), table.nadir(), DISTANCE_TOLERANCE).map(Some)
}

/// Full run: defuzzification, payoff table, methods, reference checks.
pub fn run_pipeline(config: &ProblemConfig, opts: &RunOptions) -> StageResult<Report> {
    let (rows, crisp, solved) = prepare(config, opts)?;
    let solutions = solve_methods(&solved, opts)?;
    let r = opts.reduction;
    let refs: Vec<_> = config.reference.solutions(METHODS_GROUP, r).collect();
    let verifiable = r != Reduction::T1Centroid || config.has_given_t1();
    Ok(Report {
        reduction: r,
        profile: opts.profile,
        grid: opts.grid,
        convergence_normalization: opts.convergence,
        reliabilities: crisp,
        defuzzification_deviations: defuzz_deviations(&rows),
        defuzzification: rows,
        feasible_designs: solved.feasible.len(),
        payoff: payoff_section(config, r, &solved.payoff, METHODS_GROUP),
        solutions: solutions
            .iter()
            .map(|(m, s)| solution_row(m, s, find_reference(&refs, m)))
            .collect(),
        reference_checks: reference_checks(config, &solved.instance, METHODS_GROUP, r, verifiable)
            .at(Stage::Report)?,
        calibration: calibration(config, r, &solved.payoff).at(Stage::Report)?,
    })
}

/// One method solved with type-1 and with interval type-2 reliabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub method: String,
    pub params: String,
    pub it2: SolutionRow,
    pub t1: SolutionRow,
}

/// Side-by-side runs with type-1 and interval type-2 reliabilities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub it2_reduction: Reduction,
    /// `given` or `generated (seed N)`.
    pub t1_inputs: String,
    pub it2_reliabilities: CrispReliabilities,
    pub t1_reliabilities: CrispReliabilities,
    pub it2_payoff: PayoffSection,
    pub t1_payoff: PayoffSection,
    pub rows: Vec<ComparisonRow>,
    pub it2_reference_checks: Vec<ReferenceCheck>,
    pub t1_reference_checks: Vec<ReferenceCheck>,
}

/// Runs the methods twice, with interval type-2 reliabilities reduced by
/// `opts.reduction` and with type-1 reliabilities reduced by their centroid.
pub fn compare_t1_it2(config: &ProblemConfig, opts: &RunOptions) -> StageResult<Comparison> {
    let it2_opts = RunOptions {
        reduction: if opts.reduction == Reduction::T1Centroid {
            Reduction::KarnikMendel
        } else {
            opts.reduction
        },
        ..opts.clone()
    };
    let t1_opts = RunOptions {
        reduction: Reduction::T1Centroid,
        reference_values: false,
        ..opts.clone()
    };
    let (_, it2_crisp, it2) = prepare(config, &it2_opts)?;
    let (_, t1_crisp, t1) = prepare(config, &t1_opts)?;
    let it2_solutions = solve_methods(&it2, &it2_opts)?;
    let t1_solutions = solve_methods(&t1, &t1_opts)?;

    let it2_refs: Vec<_> = config
        .reference
        .solutions(COMPARISON_GROUP, it2_opts.reduction)
        .collect();
    let t1_refs: Vec<_> = config
        .reference
        .solutions(COMPARISON_GROUP, Reduction::T1Centroid)
        .collect();
    let rows = it2_solutions
        .iter()
        .zip(&t1_solutions)
        .map(|((m, a), (_, b))| ComparisonRow {
            method: m.key().to_string(),
            params: method_params(m),
            it2: solution_row(m, a, find_reference(&it2_refs, m)),
            t1: solution_row(m, b, find_reference(&t1_refs, m)),
        })
        .collect();

    let t1_inputs = match (config.has_given_t1(), config.generation()) {
        (true, _) => "given".to_string(),
        (false, Some(g)) => format!("generated (seed {})", g.seed),
        (false, None) => "generated".to_string(),
    };
    Ok(Comparison {
        it2_reduction: it2_opts.reduction,
        t1_inputs,
        it2_payoff: payoff_section(config, it2_opts.reduction, &it2.payoff, COMPARISON_GROUP),
        t1_payoff: payoff_section(config, Reduction::T1Centroid, &t1.payoff, COMPARISON_GROUP),
        it2_reliabilities: it2_crisp,
        t1_reliabilities: t1_crisp,
        rows,
        it2_reference_checks: reference_checks(
            config,
            &it2.instance,
            COMPARISON_GROUP,
            it2_opts.reduction,
            true,
        )
        .at(Stage::Report)?,
        t1_reference_checks: reference_checks(
            config,
            &t1.instance,
            COMPARISON_GROUP,
            Reduction::T1Centroid,
            config.has_given_t1(),
        )
        .at(Stage::Report)?,
    })
}

/// Exact front and the weighted-sum sweep over it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontExport {
    pub front: Vec<(Design, Objectives)>,
    pub sweep: Vec<SweepPoint>,
}

impl FrontExport {
    /// Sweep points that are not on the exact front.
    pub fn off_front(&self) -> impl Iterator<Item = &SweepPoint> {
        self.sweep.iter().filter(|s| !s.on_front)
    }
}

/// Number of weight steps in the sweep, giving `w_1 = 0, 0.05, …, 1`.
pub const SWEEP_STEPS: u32 = 20;

pub fn emit_pareto(config: &ProblemConfig, opts: &RunOptions) -> StageResult<FrontExport> {
    let (_, _, solved) = prepare(config, opts)?;
    let front = pareto_front(&solved.feasible).at(Stage::Solve)?;
    let template = WeightedSum {
        anchors: opts.params.weighted_anchors,
        ..WeightedSum::default()
    };
    let sweep = weighted_sweep(&solved.feasible, &solved.payoff, &front, SWEEP_STEPS, template)
        .at(Stage::Solve)?;
    Ok(FrontExport {
        front: front.members,
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_reference_checks_flag_known_misprints() {
        let config = ProblemConfig::bundled();
        let km = config.reference.defuzzified.km.clone();
        let inst = config.instance(Profile::Reproduce, km).unwrap();
        let checks: Vec<_> = config
            .reference
            .solutions(METHODS_GROUP, Reduction::KarnikMendel)
            .map(|s| check_reference(&inst, s).unwrap())
            .collect();
        let status: Vec<_> = checks.iter().map(|c| c.status).collect();
        use Consistency::*;
        assert_eq!(
            status,
            [
                Consistent,
                Consistent,
                ReferenceInconsistent,
                ReferenceInconsistent,
                ReferenceInconsistent,
                Consistent
            ]
        );
    }

    #[test]
    fn wildcard_counts_are_resolved() {
        let config = ProblemConfig::bundled();
        let gc = config.reference.defuzzified.gc.clone();
        let inst = config.instance(Profile::Reproduce, gc).unwrap();
        let s = config
            .reference
            .solutions(METHODS_GROUP, Reduction::GeometricCentroid)
            .find(|s| s.method == "fuzzy")
            .unwrap();
        let c = check_reference(&inst, s).unwrap();
        let resolved = c.resolved_design.unwrap();
        assert_ne!(resolved.0[4], 0);
    }

    #[test]
    fn method_params_pair_with_reference_rows() {
        let p = MethodParams::default();
        assert_eq!(method_params(&p.global()), "p=2");
        assert_eq!(method_params(&p.weighted()), "w=0.5,0.5");
        let d: Vec<_> = p.desirability().iter().map(method_params).collect();
        assert_eq!(d, ["t1=1,t2=0.1", "t1=0.5,t2=0.1"]);
    }

    #[test]
    fn stage_errors_keep_their_kind() {
        let e: Result<()> = Err(Error::EmptyFeasibleRegion);
        let s = e.at(Stage::Payoff).unwrap_err();
        assert_eq!(s.kind(), ErrorKind::Infeasible);
        assert!(s.to_string().starts_with("payoff stage failed"));
    }
}
