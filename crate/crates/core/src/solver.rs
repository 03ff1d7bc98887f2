//! Exhaustive search over the redundancy lattice.
//!
//! The lattice `1..=n_max_1 × … × 1..=n_max_m` is indexed in mixed radix
//! with the first subsystem most significant, so increasing index order is
//! lexicographic design order. Feasible points are collected once into a
//! [`FeasibleSet`]; every optimization is then a scan over that set, split
//! into contiguous chunks that are reduced in parallel and merged by
//! `(key, index)`, which makes results independent of the chunking.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    cost_term, evaluate, parallel_reliability, volume_term, weight_term, Design, Evaluation,
    ProblemInstance,
};
use crate::moo::{
    convergence_metric, ConvergenceNormalization, Method, Objectives, PayoffTable, Sense,
    WeightedSum,
};

/// Default cap on the number of lattice points.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

const CHUNK: u64 = 1 << 16;

/// The full redundancy lattice of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    caps: Vec<u32>,
    size: u64,
}

impl Lattice {
    pub fn new(inst: &ProblemInstance, budget: u64) -> Result<Self> {
        let caps: Vec<u32> = inst.subsystems().iter().map(|s| s.n_max).collect();
        let size: u128 = caps.iter().map(|&c| u128::from(c)).product();
        if size > u128::from(budget) {
            return Err(Error::BudgetExceeded { size, budget });
        }
        Ok(Self {
            caps,
            size: size as u64,
        })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    /// Design at a lattice index.
    pub fn design(&self, index: u64) -> Design {
        let mut counts = vec![0; self.caps.len()];
        self.decode(index, &mut counts);
        Design(counts)
    }

    /// Lattice index of `d`, if it lies on the lattice.
    pub fn index(&self, d: &Design) -> Option<u64> {
        if d.len() != self.caps.len() {
            return None;
        }
        d.counts()
            .iter()
            .zip(&self.caps)
            .try_fold(0u64, |acc, (&n, &cap)| {
                (1..=cap)
                    .contains(&n)
                    .then(|| acc * u64::from(cap) + u64::from(n - 1))
            })
    }

    fn decode(&self, mut index: u64, counts: &mut [u32]) {
        for (slot, &cap) in counts.iter_mut().zip(&self.caps).rev() {
            *slot = (index % u64::from(cap)) as u32 + 1;
            index /= u64::from(cap);
        }
    }

    /// Steps `counts` to the next design in lexicographic order.
    fn advance(&self, counts: &mut [u32]) {
        for (slot, &cap) in counts.iter_mut().zip(&self.caps).rev() {
            if *slot < cap {
                *slot += 1;
                return;
            }
            *slot = 1;
        }
    }
}

/// Every feasible design with its full evaluation, in lexicographic order.
pub fn enumerate_feasible(
    inst: &ProblemInstance,
    budget: u64,
) -> Result<impl Iterator<Item = (Design, Evaluation)> + '_> {
    let lattice = Lattice::new(inst, budget)?;
    Ok((0..lattice.size()).filter_map(move |i| {
        let d = lattice.design(i);
        let e = evaluate(inst, &d).expect("lattice designs match the instance");
        e.feasible.then_some((d, e))
    }))
}

/// Per-subsystem objective terms for every admissible count, computed with
/// the same functions and in the same order as [`evaluate`], so that totals
/// agree bit for bit.
struct Terms {
    reliability: Vec<Vec<f64>>,
    cost: Vec<Vec<f64>>,
    volume: Vec<Vec<f64>>,
    weight: Vec<Vec<f64>>,
}

impl Terms {
    fn new(inst: &ProblemInstance) -> Self {
        let table = |f: &dyn Fn(usize, u32) -> f64| -> Vec<Vec<f64>> {
            inst.subsystems()
                .iter()
                .enumerate()
                .map(|(i, s)| (1..=s.n_max).map(|n| f(i, n)).collect())
                .collect()
        };
        let r = inst.reliabilities();
        let s = inst.subsystems();
        Self {
            reliability: table(&|i, n| parallel_reliability(r[i], n)),
            cost: table(&|i, n| cost_term(inst.unit_cost(i), n)),
            volume: table(&|i, n| volume_term(s[i].v, n)),
            weight: table(&|i, n| weight_term(s[i].w, n)),
        }
    }
}

/// Objectives of one feasible lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasiblePoint {
    pub index: u64,
    pub reliability: f64,
    pub cost: f64,
}

impl FeasiblePoint {
    pub fn objectives(&self) -> Objectives {
        Objectives::new(self.reliability, self.cost)
    }
}

/// All feasible points of an instance, in lexicographic design order.
#[derive(Debug, Clone)]
pub struct FeasibleSet {
    inst: ProblemInstance,
    lattice: Lattice,
    points: Vec<FeasiblePoint>,
}

impl FeasibleSet {
    pub fn build(inst: &ProblemInstance, budget: u64) -> Result<Self> {
        Self::build_chunked(inst, budget, CHUNK)
    }

    /// Builds with a given chunk length; the result does not depend on it.
    pub fn build_chunked(inst: &ProblemInstance, budget: u64, chunk: u64) -> Result<Self> {
        let lattice = Lattice::new(inst, budget)?;
        let terms = Terms::new(inst);
        let chunk = chunk.max(1);
        let starts: Vec<u64> = (0..lattice.size()).step_by(chunk as usize).collect();
        let parts: Vec<Vec<FeasiblePoint>> = starts
            .into_par_iter()
            .map(|start| {
                let end = (start + chunk).min(lattice.size());
                scan_range(inst, &lattice, &terms, start, end)
            })
            .collect();
        Ok(Self {
            inst: inst.clone(),
            lattice,
            points: parts.concat(),
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.inst
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn points(&self) -> &[FeasiblePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn design(&self, p: &FeasiblePoint) -> Design {
        self.lattice.design(p.index)
    }

    fn nonempty(&self) -> Result<()> {
        if self.points.is_empty() {
            Err(Error::EmptyFeasibleRegion)
        } else {
            Ok(())
        }
    }

    /// Best point under `key` (smaller is better, ties to the smaller index)
    /// with the number of points sharing the best key.
    fn argmin_by<F>(&self, key: F) -> Option<Best>
    where
        F: Fn(&FeasiblePoint) -> Option<f64> + Sync,
    {
        self.points
            .par_chunks(CHUNK as usize)
            .map(|chunk| {
                chunk.iter().fold(None, |acc: Option<Best>, p| match key(p) {
                    Some(k) if !k.is_nan() => Best::merge(
                        acc,
                        Some(Best {
                            key: k,
                            index: p.index,
                            ties: 1,
                        }),
                    ),
                    _ => acc,
                })
            })
            .reduce(|| None, Best::merge)
    }

    fn solution(
        &self,
        label: String,
        best: Best,
        score: f64,
        convergence: Option<f64>,
    ) -> CompromiseSolution {
        let design = self.lattice.design(best.index);
        let evaluation = evaluate(&self.inst, &design).expect("lattice designs match the instance");
        CompromiseSolution {
            method: label,
            design,
            evaluation,
            score,
            ties: best.ties,
            convergence,
        }
    }
}

fn scan_range(
    inst: &ProblemInstance,
    lattice: &Lattice,
    terms: &Terms,
    start: u64,
    end: u64,
) -> Vec<FeasiblePoint> {
    let mut counts = vec![0u32; lattice.caps.len()];
    lattice.decode(start, &mut counts);
    let mut out = Vec::new();
    for index in start..end {
        let mut volume = 0.0;
        let mut weight = 0.0;
        for (i, &n) in counts.iter().enumerate() {
            let k = (n - 1) as usize;
            volume += terms.volume[i][k];
            weight += terms.weight[i][k];
        }
        if volume <= inst.volume_limit() && weight <= inst.weight_limit() {
            let mut reliability = 1.0;
            let mut cost = 0.0;
            for (i, &n) in counts.iter().enumerate() {
                let k = (n - 1) as usize;
                reliability *= terms.reliability[i][k];
                cost += terms.cost[i][k];
            }
            out.push(FeasiblePoint {
                index,
                reliability,
                cost,
            });
        }
        lattice.advance(&mut counts);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Best {
    key: f64,
    index: u64,
    ties: u64,
}

impl Best {
    /// Associative and commutative merge: smaller key wins, then smaller
    /// index; equal keys accumulate their tie counts.
    fn merge(a: Option<Best>, b: Option<Best>) -> Option<Best> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(if a.key < b.key {
                a
            } else if b.key < a.key {
                b
            } else {
                Best {
                    key: a.key,
                    index: a.index.min(b.index),
                    ties: a.ties + b.ties,
                }
            }),
        }
    }
}

/// A single objective to optimize on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Reliability,
    Cost,
}

/// An optimal design together with how it was found.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompromiseSolution {
    /// Method and parameters that produced the design.
    pub method: String,
    pub design: Design,
    /// Fresh evaluation of `design`.
    pub evaluation: Evaluation,
    pub score: f64,
    /// Number of feasible designs attaining the same score.
    pub ties: u64,
    /// Distance to the ideal point, when a payoff table was available.
    pub convergence: Option<f64>,
}

impl CompromiseSolution {
    pub fn objectives(&self) -> Objectives {
        Objectives::from(&self.evaluation)
    }
}

/// Certified optimum of one objective.
pub fn optimize_single(fs: &FeasibleSet, objective: Objective) -> Result<CompromiseSolution> {
    fs.nonempty()?;
    let best = match objective {
        Objective::Reliability => fs.argmin_by(|p| Some(-p.reliability)),
        Objective::Cost => fs.argmin_by(|p| Some(p.cost)),
    }
    .ok_or(Error::EmptyFeasibleRegion)?;
    let (label, score) = match objective {
        Objective::Reliability => ("maximum reliability", -best.key),
        Objective::Cost => ("minimum cost", best.key),
    };
    Ok(fs.solution(label.to_string(), best, score, None))
}

/// Individual optima, their cross-evaluations and the region extremes.
pub fn build_payoff(fs: &FeasibleSet) -> Result<PayoffTable> {
    let r_best = optimize_single(fs, Objective::Reliability)?;
    let c_best = optimize_single(fs, Objective::Cost)?;
    let r_floor = fs
        .argmin_by(|p| Some(p.reliability))
        .ok_or(Error::EmptyFeasibleRegion)?
        .key;
    let c_ceiling = -fs
        .argmin_by(|p| Some(-p.cost))
        .ok_or(Error::EmptyFeasibleRegion)?
        .key;
    Ok(PayoffTable {
        r_max: r_best.evaluation.reliability,
        c_at_r_max: r_best.evaluation.cost,
        r_max_design: r_best.design,
        c_min: c_best.evaluation.cost,
        r_at_c_min: c_best.evaluation.reliability,
        c_min_design: c_best.design,
        r_floor,
        c_ceiling,
    })
}

/// Exact optimum of a scalarization over the feasible set.
pub fn optimize_scalarized(
    fs: &FeasibleSet,
    method: &Method,
    pt: &PayoffTable,
    norm: ConvergenceNormalization,
) -> Result<CompromiseSolution> {
    fs.nonempty()?;
    let scorer = method.scorer(pt)?;
    let sign = match scorer.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let best = fs
        .argmin_by(|p| scorer.score(p.objectives()).map(|s| sign * s))
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "no feasible design satisfies the side constraints of {method}"
            ))
        })?;
    let mut sol = fs.solution(method.to_string(), best, sign * best.key, None);
    sol.convergence = Some(convergence_metric(sol.objectives(), pt, norm)?);
    Ok(sol)
}

/// Nondominated feasible designs, by ascending cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoFront {
    pub members: Vec<(Design, Objectives)>,
}

impl ParetoFront {
    pub fn contains(&self, d: &Design) -> bool {
        self.members.iter().any(|(m, _)| m == d)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Exact nondominated set of the feasible designs.
pub fn pareto_front(fs: &FeasibleSet) -> Result<ParetoFront> {
    fs.nonempty()?;
    let mut order: Vec<&FeasiblePoint> = fs.points.iter().collect();
    order.par_sort_unstable_by(|a, b| {
        a.cost
            .total_cmp(&b.cost)
            .then(b.reliability.total_cmp(&a.reliability))
            .then(a.index.cmp(&b.index))
    });
    let mut members = Vec::new();
    let mut best_cheaper = f64::NEG_INFINITY;
    for group in order.chunk_by(|a, b| a.cost == b.cost) {
        let top = group[0].reliability;
        if top > best_cheaper {
            for p in group.iter().take_while(|p| p.reliability == top) {
                members.push((fs.design(p), p.objectives()));
            }
            best_cheaper = top;
        }
    }
    Ok(ParetoFront { members })
}

/// True when no point dominates another, checked over all pairs.
pub fn is_dominance_free(points: &[Objectives]) -> bool {
    points
        .par_iter()
        .enumerate()
        .all(|(i, a)| points.iter().enumerate().all(|(j, b)| i == j || !a.dominates(b)))
}

/// A weighted-sum solution from a sweep of the reliability weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub w_reliability: f64,
    pub solution: CompromiseSolution,
    pub on_front: bool,
}

/// Weighted-sum optima for `w_1 = 0, 1/steps, …, 1`, each checked for
/// membership of `front`.
pub fn weighted_sweep(
    fs: &FeasibleSet,
    pt: &PayoffTable,
    front: &ParetoFront,
    steps: u32,
    template: WeightedSum,
) -> Result<Vec<SweepPoint>> {
    (0..=steps)
        .map(|k| {
            let w = f64::from(k) / f64::from(steps);
            let method = Method::WeightedSum(WeightedSum {
                w_reliability: w,
                w_cost: 1.0 - w,
                ..template
            });
            let solution = optimize_scalarized(fs, &method, pt, ConvergenceNormalization::default())?;
            let on_front = front.contains(&solution.design);
            Ok(SweepPoint {
                w_reliability: w,
                solution,
                on_front,
            })
        })
        .collect()
}
