use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GameError, Result};

/// A population `(f, g)` of the Byzantine-rational simplex scaled to `n`;
/// the honest count `h = n − f − g` is implied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimplexPoint {
    pub f: usize,
    pub g: usize,
    pub n: usize,
}

impl SimplexPoint {
    pub fn new(n: usize, f: usize, g: usize) -> Result<Self> {
        if f + g > n {
            return Err(GameError::InvalidPoint { f, g, n });
        }
        Ok(Self { f, g, n })
    }

    pub fn honest(&self) -> usize {
        self.n - self.f - self.g
    }

    /// All integer points of the simplex, f-major.
    pub fn all(n: usize) -> impl Iterator<Item = SimplexPoint> {
        (0..=n).flat_map(move |f| (0..=n - f).map(move |g| SimplexPoint { f, g, n }))
    }
}

impl fmt::Display for SimplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(f={}, g={})", self.f, self.g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// max(|Δf|, |Δg|)
    Infinity,
    /// Euclidean norm of (Δf, Δg, Δh) scaled by 1/√2, so that moving one
    /// agent between any two types is a unit step.
    TwoStar,
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "inf" | "infinity" | "max" => Ok(Norm::Infinity),
            "2*" | "two_star" | "two-star" | "2star" => Ok(Norm::TwoStar),
            other => Err(format!("unknown norm {other:?} (expected infinity or two_star)")),
        }
    }
}

pub fn norm_distance(a: SimplexPoint, b: SimplexPoint, which: Norm) -> Result<f64> {
    if a.n != b.n {
        return Err(GameError::MismatchedPlayers(a.n, b.n));
    }
    let df = a.f as f64 - b.f as f64;
    let dg = a.g as f64 - b.g as f64;
    Ok(match which {
        Norm::Infinity => df.abs().max(dg.abs()),
        // Δh = −(Δf + Δg)
        Norm::TwoStar => ((df * df + dg * dg + (df + dg) * (df + dg)) / 2.0).sqrt(),
    })
}
