//! Series-parallel system model: reliability, cost, volume and weight of a
//! redundancy allocation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-subsystem cost, volume and weight parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsystemParams {
    /// Cost scaling factor.
    pub alpha: f64,
    /// Cost shaping exponent.
    pub beta: f64,
    /// Volume of one component.
    pub v: f64,
    /// Weight of one component.
    pub w: f64,
    /// Largest admissible number of parallel components.
    pub n_max: u32,
    pub r_min: f64,
    pub r_max: f64,
}

impl SubsystemParams {
    pub fn new(alpha: f64, beta: f64, v: f64, w: f64, n_max: u32) -> Self {
        Self {
            alpha,
            beta,
            v,
            w,
            n_max,
            r_min: 1e-9,
            r_max: 1.0 - 1e-9,
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        let bad = |what: &str| {
            Err(Error::InvalidInstance(format!(
                "subsystem {}: {what}",
                index + 1
            )))
        };
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta), ("v", self.v), ("w", self.w)] {
            if !(value.is_finite() && value > 0.0) {
                return bad(&format!("{name} must be positive and finite, got {value}"));
            }
        }
        if self.n_max < 1 {
            return bad("n_max must be at least 1");
        }
        if !(0.0 < self.r_min && self.r_min <= self.r_max && self.r_max < 1.0) {
            return bad(&format!(
                "reliability bounds must satisfy 0 < r_min <= r_max < 1, got [{}, {}]",
                self.r_min, self.r_max
            ));
        }
        Ok(())
    }
}

/// A validated problem: subsystem parameters, resource limits, mission time
/// and one crisp reliability per subsystem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    subsystems: Vec<SubsystemParams>,
    volume_limit: f64,
    weight_limit: f64,
    mission_time: f64,
    reliabilities: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(
        subsystems: Vec<SubsystemParams>,
        volume_limit: f64,
        weight_limit: f64,
        mission_time: f64,
        reliabilities: Vec<f64>,
    ) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::InvalidInstance("no subsystems".into()));
        }
        for (i, s) in subsystems.iter().enumerate() {
            s.validate(i)?;
        }
        for (name, value) in [
            ("volume limit V", volume_limit),
            ("weight limit W", weight_limit),
            ("mission time T", mission_time),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        if reliabilities.len() != subsystems.len() {
            return Err(Error::DimensionMismatch {
                expected: subsystems.len(),
                found: reliabilities.len(),
            });
        }
        for &r in &reliabilities {
            if !(0.0 < r && r < 1.0) {
                return Err(Error::InvalidReliability(r));
            }
        }
        Ok(Self {
            subsystems,
            volume_limit,
            weight_limit,
            mission_time,
            reliabilities,
        })
    }

    /// Same instance with a different set of crisp reliabilities.
    pub fn with_reliabilities(&self, reliabilities: Vec<f64>) -> Result<Self> {
        Self::new(
            self.subsystems.clone(),
            self.volume_limit,
            self.weight_limit,
            self.mission_time,
            reliabilities,
        )
    }

    /// Same instance with every redundancy cap set to `n_max`.
    pub fn with_n_max(&self, n_max: u32) -> Result<Self> {
        let subsystems = self
            .subsystems
            .iter()
            .map(|s| SubsystemParams { n_max, ..s.clone() })
            .collect();
        Self::new(
            subsystems,
            self.volume_limit,
            self.weight_limit,
            self.mission_time,
            self.reliabilities.clone(),
        )
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn subsystems(&self) -> &[SubsystemParams] {
        &self.subsystems
    }

    pub fn reliabilities(&self) -> &[f64] {
        &self.reliabilities
    }

    pub fn volume_limit(&self) -> f64 {
        self.volume_limit
    }

    pub fn weight_limit(&self) -> f64 {
        self.weight_limit
    }

    pub fn mission_time(&self) -> f64 {
        self.mission_time
    }

    /// Cost of one component of subsystem `i` at its configured reliability.
    pub fn unit_cost(&self, i: usize) -> f64 {
        component_cost(self.reliabilities[i], &self.subsystems[i], self.mission_time)
            .expect("reliabilities are validated at construction")
    }
}

/// Redundancy counts, one per subsystem. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Design(pub Vec<u32>);

serde_via_str!(Design);

impl Design {
    pub fn uniform(m: usize, n: u32) -> Self {
        Design(vec![n; m])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Design {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("design entry `{}`: {e}", t.trim())))
            })
            .collect::<Result<Vec<_>>>()
            .map(Design)
    }
}

/// A breached constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    /// Total volume exceeds the limit by `excess`.
    Volume { excess: f64 },
    /// Total weight exceeds the limit by `excess`.
    Weight { excess: f64 },
    /// Redundancy count outside `1..=n_max`.
    Redundancy { subsystem: usize, n: u32, n_max: u32 },
    /// Component reliability outside its configured bounds.
    ReliabilityBound { subsystem: usize, r: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Volume { excess } => write!(f, "volume exceeds limit by {excess}"),
            Violation::Weight { excess } => write!(f, "weight exceeds limit by {excess}"),
            Violation::Redundancy { subsystem, n, n_max } => write!(
                f,
                "subsystem {} has {n} components, allowed 1..={n_max}",
                subsystem + 1
            ),
            Violation::ReliabilityBound { subsystem, r } => write!(
                f,
                "subsystem {} reliability {r} outside its bounds",
                subsystem + 1
            ),
        }
    }
}

/// Objectives and resource use of one design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub reliability: f64,
    pub cost: f64,
    pub volume: f64,
    pub weight: f64,
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Cost `alpha * (-t / ln r)^beta` of a component of reliability `r`.
pub fn component_cost(r: f64, p: &SubsystemParams, t: f64) -> Result<f64> {
    if !(0.0 < r && r < 1.0) {
        return Err(Error::InvalidReliability(r));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidInstance(format!(
            "mission time must be positive, got {t}"
        )));
    }
    Ok(p.alpha * (-t / r.ln()).powf(p.beta))
}

/// Reliability of `n` active parallel components of reliability `r`.
#[inline]
pub fn parallel_reliability(r: f64, n: u32) -> f64 {
    1.0 - (1.0 - r).powi(n as i32)
}

/// Cost of `n` parallel components including interconnecting hardware.
#[inline]
pub fn cost_term(unit_cost: f64, n: u32) -> f64 {
    let n = f64::from(n);
    unit_cost * (n + (n / 4.0).exp())
}

#[inline]
pub fn volume_term(v: f64, n: u32) -> f64 {
    let n = f64::from(n);
    v * n * n
}

#[inline]
pub fn weight_term(w: f64, n: u32) -> f64 {
    let n = f64::from(n);
    w * n * (n / 4.0).exp()
}

/// Objectives, resource use and feasibility of `d`.
pub fn evaluate(inst: &ProblemInstance, d: &Design) -> Result<Evaluation> {
    if d.len() != inst.len() {
        return Err(Error::DimensionMismatch {
            expected: inst.len(),
            found: d.len(),
        });
    }
    let mut reliability = 1.0;
    let mut cost = 0.0;
    let mut volume = 0.0;
    let mut weight = 0.0;
    for (i, (s, &n)) in inst.subsystems.iter().zip(d.counts()).enumerate() {
        reliability *= parallel_reliability(inst.reliabilities[i], n);
        cost += cost_term(inst.unit_cost(i), n);
        volume += volume_term(s.v, n);
        weight += weight_term(s.w, n);
    }
    let violations = violations(inst, d, volume, weight);
    Ok(Evaluation {
        reliability,
        cost,
        volume,
        weight,
        feasible: violations.is_empty(),
        violations,
    })
}

fn violations(inst: &ProblemInstance, d: &Design, volume: f64, weight: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if volume > inst.volume_limit {
        out.push(Violation::Volume {
            excess: volume - inst.volume_limit,
        });
    }
    if weight > inst.weight_limit {
        out.push(Violation::Weight {
            excess: weight - inst.weight_limit,
        });
    }
    for (i, (s, &n)) in inst.subsystems.iter().zip(d.counts()).enumerate() {
        if n < 1 || n > s.n_max {
            out.push(Violation::Redundancy {
                subsystem: i,
                n,
                n_max: s.n_max,
            });
        }
        let r = inst.reliabilities[i];
        if r < s.r_min || r > s.r_max {
            out.push(Violation::ReliabilityBound { subsystem: i, r });
        }
    }
    out
}

/// Feasibility of `d` with every breached constraint named.
pub fn check_feasible(inst: &ProblemInstance, d: &Design) -> Result<(bool, Vec<Violation>)> {
    let e = evaluate(inst, d)?;
    Ok((e.feasible, e.violations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALPHA_1E5: [f64; 10] = [
        0.611360, 4.032464, 3.578225, 3.654303, 1.163718, 2.966955, 2.045865, 2.649522, 1.982908,
        3.516724,
    ];
    const V: [f64; 10] = [4.0, 5.0, 3.0, 2.0, 3.0, 4.0, 1.0, 1.0, 4.0, 4.0];
    const W: [f64; 10] = [9.0, 7.0, 5.0, 9.0, 9.0, 10.0, 6.0, 5.0, 8.0, 6.0];
    const KM: [f64; 10] = [
        0.622208, 0.654486, 0.686690, 0.718584, 0.749997, 0.781410, 0.813304, 0.845507, 0.857470,
        0.877782,
    ];

    fn plant(n_max: u32) -> ProblemInstance {
        let subs = (0..10)
            .map(|i| SubsystemParams::new(ALPHA_1E5[i] * 1e-5, 1.5, V[i], W[i], n_max))
            .collect();
        ProblemInstance::new(subs, 289.0, 483.0, 1000.0, KM.to_vec()).unwrap()
    }

    fn design(s: &str) -> Design {
        s.parse().unwrap()
    }

    /// Straight transcription of the objective formulas, sharing no code with
    /// `evaluate`.
    fn naive(alpha: &[f64], beta: &[f64], v: &[f64], w: &[f64], r: &[f64], t: f64, n: &[u32]) -> [f64; 4] {
        let mut rs = 1.0;
        let mut cs = 0.0;
        let mut vs = 0.0;
        let mut ws = 0.0;
        for i in 0..n.len() {
            let ni = n[i] as f64;
            rs *= 1.0 - (1.0 - r[i]).powf(ni);
            let lambda = -r[i].ln() / t;
            cs += alpha[i] * (1.0 / lambda).powf(beta[i]) * (ni + (0.25 * ni).exp());
            vs += v[i] * ni.powi(2);
            ws += w[i] * (ni * (0.25 * ni).exp());
        }
        [rs, cs, vs, ws]
    }

    #[test]
    fn reference_compromise_rows() {
        let inst = plant(5);
        let e = evaluate(&inst, &design("(5,3,3,3,3,2,2,2,2,1)")).unwrap();
        assert!((e.reliability - 0.6846485).abs() < 1e-4, "{e:?}");
        assert!((e.cost - 286.5739).abs() < 0.05, "{e:?}");
        let e = evaluate(&inst, &design("(5,3,3,3,3,2,2,2,2,2)")).unwrap();
        assert!((e.reliability - 0.7683246).abs() < 1e-4, "{e:?}");
        assert!((e.cost - 318.8198).abs() < 0.05, "{e:?}");
    }

    #[test]
    fn all_threes_are_feasible() {
        let inst = plant(3);
        let e = evaluate(&inst, &Design::uniform(10, 3)).unwrap();
        assert_eq!(e.volume, 279.0);
        let expected_w = 3.0 * 0.75f64.exp() * W.iter().sum::<f64>();
        assert!((e.weight - expected_w).abs() < 1e-9);
        assert!(e.feasible);
        let (ok, v) = check_feasible(&inst, &Design::uniform(10, 1)).unwrap();
        assert!(ok && v.is_empty());
    }

    #[test]
    fn single_component() {
        let s = SubsystemParams::new(1e-5, 1.5, 4.0, 9.0, 3);
        let inst = ProblemInstance::new(vec![s], 289.0, 483.0, 1000.0, vec![0.9]).unwrap();
        let e = evaluate(&inst, &design("(1)")).unwrap();
        assert_eq!(e.reliability, 0.9);
        assert_eq!(e.volume, 4.0);
        assert_eq!(e.weight, 9.0 * 0.25f64.exp());
    }

    #[test]
    fn tight_volume_is_named() {
        let s = SubsystemParams::new(1e-5, 1.5, 4.0, 9.0, 3);
        let inst = ProblemInstance::new(vec![s], 1.0, 483.0, 1000.0, vec![0.9]).unwrap();
        let (ok, v) = check_feasible(&inst, &design("(1)")).unwrap();
        assert!(!ok);
        assert_eq!(v, vec![Violation::Volume { excess: 3.0 }]);

        let (ok, v) = check_feasible(&plant(3), &Design::uniform(10, 4)).unwrap();
        assert!(!ok);
        assert!(v.iter().any(|x| matches!(x, Violation::Redundancy { subsystem: 0, n: 4, .. })));
    }

    #[test]
    fn cost_domain_and_monotonicity() {
        let p = SubsystemParams::new(ALPHA_1E5[0] * 1e-5, 1.5, 1.0, 1.0, 3);
        let c = |r| component_cost(r, &p, 1000.0).unwrap();
        assert!(c(0.99) > c(0.9) && c(0.9) > c(0.5));
        assert!(component_cost(1.0, &p, 1000.0).is_err());
        assert!(component_cost(0.0, &p, 1000.0).is_err());
        let direct = 0.611360e-5 * (-1000.0 / 0.622208f64.ln()).powf(1.5);
        assert!((c(0.622208) - direct).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_instances() {
        let s = SubsystemParams::new(1e-5, 1.5, 4.0, 9.0, 3);
        assert!(ProblemInstance::new(vec![], 1.0, 1.0, 1.0, vec![]).is_err());
        assert!(ProblemInstance::new(vec![s.clone()], 1.0, 1.0, 1.0, vec![1.0]).is_err());
        assert!(ProblemInstance::new(vec![s.clone()], -1.0, 1.0, 1.0, vec![0.5]).is_err());
        assert!(ProblemInstance::new(vec![s.clone()], 1.0, 1.0, 1.0, vec![0.5, 0.5]).is_err());
        let bad = SubsystemParams { alpha: 0.0, ..s };
        assert!(ProblemInstance::new(vec![bad], 1.0, 1.0, 1.0, vec![0.5]).is_err());
        assert!(evaluate(&plant(3), &design("(1,2)")).is_err());
    }

    #[test]
    fn design_text_round_trip() {
        let d = design("(5,3,3,3,3,2,2,2,2,1)");
        assert_eq!(d.to_string(), "(5,3,3,3,3,2,2,2,2,1)");
        assert_eq!(design(" ( 1 , 2 ) "), Design(vec![1, 2]));
        assert!("(1,x)".parse::<Design>().is_err());
    }

    fn arb_instance() -> impl Strategy<Value = (ProblemInstance, Vec<[f64; 4]>, Vec<u32>)> {
        (1usize..8).prop_flat_map(|m| {
            (
                prop::collection::vec(
                    (1e-6..1e-4f64, 0.5..2.5f64, 0.5..10.0f64, 0.5..10.0f64, 0.01..0.99f64, 1u32..=6),
                    m,
                ),
                1.0..2000.0f64,
            )
        })
        .prop_map(|(rows, t)| {
            let subs: Vec<_> = rows
                .iter()
                .map(|&(a, b, v, w, _, n)| SubsystemParams::new(a, b, v, w, n))
                .collect();
            let params = rows.iter().map(|&(a, b, v, w, _, _)| [a, b, v, w]).collect();
            let rel = rows.iter().map(|r| r.4).collect();
            let n = rows.iter().map(|r| r.5).collect();
            let inst = ProblemInstance::new(subs, 1e3, 1e3, t, rel).unwrap();
            (inst, params, n)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn evaluate_matches_direct_transcription((inst, params, n) in arb_instance()) {
            let col = |k: usize| params.iter().map(|p| p[k]).collect::<Vec<_>>();
            let expected = naive(&col(0), &col(1), &col(2), &col(3), inst.reliabilities(), inst.mission_time(), &n);
            let e = evaluate(&inst, &Design(n.clone())).unwrap();
            for (got, want) in [e.reliability, e.cost, e.volume, e.weight].into_iter().zip(expected) {
                prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{} vs {}", got, want);
            }
            prop_assert!(0.0 < e.reliability && e.reliability < 1.0);
        }

        #[test]
        fn objectives_increase_with_redundancy((inst, _, n) in arb_instance(), pick in any::<prop::sample::Index>()) {
            let i = pick.index(n.len());
            let base = evaluate(&inst, &Design(n.clone())).unwrap();
            let mut more = n.clone();
            more[i] += 1;
            let up = evaluate(&inst, &Design(more)).unwrap();
            prop_assert!(up.reliability > base.reliability);
            prop_assert!(up.cost > base.cost);
            prop_assert!(up.volume > base.volume);
            prop_assert!(up.weight > base.weight);
        }

        #[test]
        fn objectives_increase_with_component_reliability(
            (inst, _, n) in arb_instance(), pick in any::<prop::sample::Index>(), bump in 0.001..0.009f64,
        ) {
            let i = pick.index(n.len());
            let mut r = inst.reliabilities().to_vec();
            r[i] += bump;
            let better = inst.with_reliabilities(r).unwrap();
            let d = Design(n);
            let a = evaluate(&inst, &d).unwrap();
            let b = evaluate(&better, &d).unwrap();
            prop_assert!(b.reliability > a.reliability);
            prop_assert!(b.cost > a.cost);
        }
    }
}
