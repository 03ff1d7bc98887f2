//! Fuzzy reliabilities grown around crisp point estimates.
//!
//! A crisp reliability `r` inside the support `[a, b]` is widened into a
//! triangular number by pulling each end a random fraction of the way
//! towards the support bound. The interval type-2 variant draws a second
//! pair of fractions to shrink the lower membership function inwards and a
//! third pair to push the upper one outwards.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{IntervalType2, Triangular};

/// Support bounds, random seed and crisp reliabilities for generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSpec {
    pub a: f64,
    pub b: f64,
    pub seed: u64,
    pub r_values: Vec<f64>,
}

impl GenerationSpec {
    pub const DEFAULT_A: f64 = 0.5;
    pub const DEFAULT_B: f64 = 1.0 - 1e-6;

    pub fn new(a: f64, b: f64, seed: u64, r_values: Vec<f64>) -> Result<Self> {
        let spec = Self {
            a,
            b,
            seed,
            r_values,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = (self.a, self.b);
        if !(a.is_finite() && b.is_finite() && 0.0 < a && a < b && b < 1.0) {
            return Err(Error::InvalidSupport { a, b });
        }
        for &r in &self.r_values {
            self.check(r)?;
        }
        Ok(())
    }

    fn check(&self, r: f64) -> Result<()> {
        if (self.a..=self.b).contains(&r) {
            Ok(())
        } else {
            Err(Error::OutsideSupport {
                value: r,
                a: self.a,
                b: self.b,
            })
        }
    }

    /// Deterministic stream of uniform draws on `[0, 1)` for this seed.
    pub fn stream(&self) -> impl FnMut() -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        move || rng.gen::<f64>()
    }

    /// Type-1 numbers for every crisp value, drawn from one seeded stream.
    pub fn generate_t1_set(&self) -> Result<Vec<Triangular>> {
        let mut draws = self.stream();
        self.r_values
            .iter()
            .map(|&r| generate_t1(r, self, &mut draws))
            .collect()
    }

    /// Interval type-2 numbers for every crisp value, drawn from one seeded
    /// stream.
    pub fn generate_it2_set(&self) -> Result<Vec<IntervalType2>> {
        let mut draws = self.stream();
        self.r_values
            .iter()
            .map(|&r| generate_it2(r, self, &mut draws))
            .collect()
    }
}

fn draw(draws: &mut impl FnMut() -> f64) -> Result<f64> {
    let d = draws();
    if (0.0..=1.0).contains(&d) {
        Ok(d)
    } else {
        Err(Error::InvalidDraw(d))
    }
}

/// Left and right ends of the type-1 number around `r`, two draws.
fn spread(r: f64, spec: &GenerationSpec, draws: &mut impl FnMut() -> f64) -> Result<(f64, f64)> {
    spec.check(r)?;
    let left = spec.a + (r - spec.a) * draw(draws)?;
    let right = spec.b - (spec.b - r) * draw(draws)?;
    Ok((left, right))
}

/// Triangular number `(r^l, r, r^u)` around `r`.
pub fn generate_t1(
    r: f64,
    spec: &GenerationSpec,
    draws: &mut impl FnMut() -> f64,
) -> Result<Triangular> {
    let (left, right) = spread(r, spec, draws)?;
    Triangular::new(left, r, right)
}

/// Interval type-2 number around `r`, six draws in order: the type-1 ends,
/// the lower membership ends, the upper membership ends.
pub fn generate_it2(
    r: f64,
    spec: &GenerationSpec,
    draws: &mut impl FnMut() -> f64,
) -> Result<IntervalType2> {
    let (left, right) = spread(r, spec, draws)?;
    let lower_left = left + (r - left) * draw(draws)?;
    let lower_right = right - (right - r) * draw(draws)?;
    let upper_left = left - (left - spec.a) * draw(draws)?;
    let upper_right = right + (spec.b - right) * draw(draws)?;
    IntervalType2::from_params(
        [upper_left, r, upper_right],
        [lower_left, r, lower_right],
    )
}
