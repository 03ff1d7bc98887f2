//! Problem configuration files.
//!
//! A configuration is a TOML or JSON document whose fields follow the usual
//! tabulation of the plant data: per-subsystem `alpha_scaled_1e5`, `beta`,
//! `v`, `w` and a fuzzy `reliability`, plus the limits `V`, `W` and the
//! mission time `T`. An optional `reference` section carries published
//! results for comparison.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{IntervalType2, Triangular};
use crate::generate::GenerationSpec;
use crate::model::{Design, ProblemInstance, SubsystemParams};
use crate::reduction::Reduction;

const BUNDLED: &str = include_str!("../data/pharma_plant.toml");

/// Redundancy cap selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Caps as stated for the problem, three components per subsystem.
    #[default]
    Strict,
    /// Caps wide enough to contain every published solution.
    Reproduce,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Profile::Strict),
            "reproduce" => Ok(Profile::Reproduce),
            other => Err(Error::Parse(format!(
                "unknown profile `{other}` (expected strict or reproduce)"
            ))),
        }
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Profile::Strict => "strict",
            Profile::Reproduce => "reproduce",
        })
    }
}

/// A cap shared by all subsystems or one per subsystem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Caps {
    Uniform(u32),
    PerSubsystem(Vec<u32>),
}

impl Caps {
    fn expand(&self, m: usize, profile: Profile) -> Result<Vec<u32>> {
        match self {
            Caps::Uniform(n) => Ok(vec![*n; m]),
            Caps::PerSubsystem(v) if v.len() == m => Ok(v.clone()),
            Caps::PerSubsystem(v) => Err(Error::Config(format!(
                "{profile} redundancy caps list {} entries for {m} subsystems",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Redundancy {
    #[serde(default = "strict_default")]
    pub strict: Caps,
    #[serde(default = "reproduce_default")]
    pub reproduce: Caps,
}

fn strict_default() -> Caps {
    Caps::Uniform(3)
}

fn reproduce_default() -> Caps {
    Caps::Uniform(5)
}

impl Default for Redundancy {
    fn default() -> Self {
        Self {
            strict: strict_default(),
            reproduce: reproduce_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerationSection {
    #[serde(default = "default_a")]
    a: f64,
    #[serde(default = "default_b")]
    b: f64,
    #[serde(default)]
    seed: u64,
    r: Vec<f64>,
}

fn default_a() -> f64 {
    GenerationSpec::DEFAULT_A
}

fn default_b() -> f64 {
    GenerationSpec::DEFAULT_B
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubsystemSection {
    alpha_scaled_1e5: f64,
    beta: f64,
    v: f64,
    w: f64,
    reliability: Option<IntervalType2>,
    t1_reliability: Option<Triangular>,
    r_min: Option<f64>,
    r_max: Option<f64>,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    V: f64,
    W: f64,
    T: f64,
    #[serde(default)]
    redundancy: Redundancy,
    generation: Option<GenerationSection>,
    subsystem: Vec<SubsystemSection>,
    #[serde(default)]
    reference: Reference,
}

/// Individual optima published for one reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceOptima {
    pub reduction: Reduction,
    pub r_max: f64,
    pub c_min: f64,
}

/// A published compromise solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSolution {
    /// Which published run the row belongs to.
    pub group: String,
    pub reduction: Reduction,
    /// Method key, as in [`crate::moo::Method::key`].
    pub method: String,
    /// Method parameters, as in [`crate::pipeline::method_params`].
    #[serde(default)]
    pub params: String,
    pub reliability: f64,
    pub cost: f64,
    /// Published counts; zero marks an unpublished entry.
    pub design: Design,
    pub distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceIntervals {
    #[serde(default)]
    pub km: Vec<[f64; 2]>,
    #[serde(default)]
    pub ub: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceDefuzzified {
    #[serde(default)]
    pub km: Vec<f64>,
    #[serde(default)]
    pub ub: Vec<f64>,
    #[serde(default)]
    pub nt: Vec<f64>,
    #[serde(default)]
    pub gc: Vec<f64>,
}

impl ReferenceDefuzzified {
    pub fn get(&self, r: Reduction) -> Option<&[f64]> {
        let v = match r {
            Reduction::KarnikMendel => &self.km,
            Reduction::UncertaintyBounds => &self.ub,
            Reduction::NieTan => &self.nt,
            Reduction::GeometricCentroid => &self.gc,
            Reduction::T1Centroid => return None,
        };
        (!v.is_empty()).then_some(v.as_slice())
    }
}

/// Published results shipped alongside a configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    #[serde(default)]
    pub defuzzified: ReferenceDefuzzified,
    #[serde(default)]
    pub intervals: ReferenceIntervals,
    #[serde(default)]
    pub optima: Vec<ReferenceOptima>,
    #[serde(default)]
    pub solutions: Vec<ReferenceSolution>,
}

impl Reference {
    pub fn optima(&self, r: Reduction) -> Option<&ReferenceOptima> {
        self.optima.iter().find(|o| o.reduction == r)
    }

    pub fn solutions<'a>(
        &'a self,
        group: &'a str,
        r: Reduction,
    ) -> impl Iterator<Item = &'a ReferenceSolution> + 'a {
        self.solutions
            .iter()
            .filter(move |s| s.group == group && s.reduction == r)
    }
}

/// A loaded and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    subsystems: Vec<SubsystemParams>,
    volume_limit: f64,
    weight_limit: f64,
    mission_time: f64,
    redundancy: Redundancy,
    it2: Vec<IntervalType2>,
    it2_generated: bool,
    t1: Option<Vec<Triangular>>,
    generation: Option<GenerationSpec>,
    pub reference: Reference,
}

impl ProblemConfig {
    /// The ten-stage plant shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED).expect("bundled configuration is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let m = raw.subsystem.len();
        if m == 0 {
            return Err(Error::Config("at least one [[subsystem]] is required".into()));
        }
        let generation = raw
            .generation
            .map(|g| GenerationSpec::new(g.a, g.b, g.seed, g.r))
            .transpose()?;

        let given: Vec<_> = raw.subsystem.iter().map(|s| s.reliability).collect();
        let it2_generated = given.iter().all(Option::is_none);
        let it2 = if given.iter().all(Option::is_some) {
            given.into_iter().flatten().collect()
        } else if given.iter().any(Option::is_some) {
            return Err(Error::Config(
                "either every subsystem or none may give a reliability".into(),
            ));
        } else {
            let g = generation.as_ref().ok_or_else(|| {
                Error::Config("no reliabilities given and no [generation] section".into())
            })?;
            g.generate_it2_set()?
        };
        if it2.len() != m {
            return Err(Error::Config(format!(
                "{} generated reliabilities for {m} subsystems",
                it2.len()
            )));
        }

        let given_t1: Vec<_> = raw.subsystem.iter().map(|s| s.t1_reliability).collect();
        let t1 = if given_t1.iter().all(Option::is_some) {
            Some(given_t1.into_iter().flatten().collect())
        } else if given_t1.iter().any(Option::is_some) {
            return Err(Error::Config(
                "either every subsystem or none may give a t1_reliability".into(),
            ));
        } else {
            None
        };

        let defaults = SubsystemParams::new(1.0, 1.0, 1.0, 1.0, 1);
        let strict = raw.redundancy.strict.expand(m, Profile::Strict)?;
        let subsystems = raw
            .subsystem
            .iter()
            .zip(strict)
            .map(|(s, n_max)| SubsystemParams {
                alpha: s.alpha_scaled_1e5 * 1e-5,
                beta: s.beta,
                v: s.v,
                w: s.w,
                n_max,
                r_min: s.r_min.unwrap_or(defaults.r_min),
                r_max: s.r_max.unwrap_or(defaults.r_max),
            })
            .collect();
        raw.redundancy.reproduce.expand(m, Profile::Reproduce)?;

        let config = Self {
            subsystems,
            volume_limit: raw.V,
            weight_limit: raw.W,
            mission_time: raw.T,
            redundancy: raw.redundancy,
            it2,
            it2_generated,
            t1,
            generation,
            reference: raw.reference,
        };
        // validates limits and parameters up front
        config.instance(Profile::Strict, vec![0.5; m])?;
        Ok(config)
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn it2_reliabilities(&self) -> &[IntervalType2] {
        &self.it2
    }

    /// Type-1 reliabilities: given in the file, or else generated from the
    /// `[generation]` section.
    pub fn t1_reliabilities(&self) -> Result<Vec<Triangular>> {
        if let Some(t1) = &self.t1 {
            return Ok(t1.clone());
        }
        let g = self.generation.as_ref().ok_or_else(|| {
            Error::Config("no t1_reliability values and no [generation] section".into())
        })?;
        let t1 = g.generate_t1_set()?;
        if t1.len() != self.len() {
            return Err(Error::Config(format!(
                "{} generated reliabilities for {} subsystems",
                t1.len(),
                self.len()
            )));
        }
        Ok(t1)
    }

    /// Whether the type-1 reliabilities come from the file.
    pub fn has_given_t1(&self) -> bool {
        self.t1.is_some()
    }

    pub fn generation(&self) -> Option<&GenerationSpec> {
        self.generation.as_ref()
    }

    /// The same configuration with another generation seed. Reliabilities
    /// read from the file are kept; generated ones are drawn again.
    pub fn with_seed(&self, seed: u64) -> Result<Self> {
        let mut g = self
            .generation
            .clone()
            .ok_or_else(|| Error::Config("a seed needs a [generation] section".into()))?;
        g.seed = seed;
        let mut next = self.clone();
        if self.it2_generated {
            next.it2 = g.generate_it2_set()?;
        }
        next.generation = Some(g);
        Ok(next)
    }

    /// Problem instance for a redundancy profile and crisp reliabilities.
    pub fn instance(&self, profile: Profile, reliabilities: Vec<f64>) -> Result<ProblemInstance> {
        let caps = match profile {
            Profile::Strict => &self.redundancy.strict,
            Profile::Reproduce => &self.redundancy.reproduce,
        }
        .expand(self.len(), profile)?;
        let subsystems = self
            .subsystems
            .iter()
            .zip(caps)
            .map(|(s, n_max)| SubsystemParams { n_max, ..s.clone() })
            .collect();
        ProblemInstance::new(
            subsystems,
            self.volume_limit,
            self.weight_limit,
            self.mission_time,
            reliabilities,
        )
    }
}
