use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::dag::ComputationDag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKind {
    /// Classic red-blue pebbling: a node is computed in one step from all its inputs.
    Rbp,
    /// Partial computing: inputs are aggregated one edge at a time.
    Prbp,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::Rbp => "rbp",
            GameKind::Prbp => "prbp",
        })
    }
}

/// How the per-compute cost is spread over PRBP partial compute steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComputeCostSplit {
    /// Every partial compute step costs the full `compute_cost`.
    #[default]
    PerEdge,
    /// A partial compute into `v` costs `compute_cost / deg_in(v)`.
    PerEdgeScaledByIndegree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub capacity: usize,
    pub kind: GameKind,
    #[serde(default)]
    pub sliding: bool,
    #[serde(default)]
    pub allow_clear: bool,
    #[serde(default)]
    pub no_deletion: bool,
    #[serde(
        default = "zero",
        serialize_with = "ser_ratio",
        deserialize_with = "de_ratio"
    )]
    pub compute_cost: Rational64,
    #[serde(default)]
    pub prbp_compute_cost_split: ComputeCostSplit,
}

fn zero() -> Rational64 {
    Rational64::from_integer(0)
}

pub(crate) fn ser_ratio<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub(crate) fn de_ratio<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
    let text = String::deserialize(d)?;
    parse_ratio(&text).map_err(serde::de::Error::custom)
}

/// Parses `"3"`, `"1/10"`, or a finite decimal such as `"0.25"`.
pub fn parse_ratio(text: &str) -> Result<Rational64, String> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n
            .trim()
            .parse()
            .map_err(|e| format!("bad numerator: {e}"))?;
        let d: i64 = d
            .trim()
            .parse()
            .map_err(|e| format!("bad denominator: {e}"))?;
        if d == 0 {
            return Err("zero denominator".into());
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.len() > 12 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(format!("unsupported decimal `{text}`"));
        }
        let scale = 10i64.pow(frac.len() as u32);
        let neg = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|e| format!("bad number: {e}"))?
        };
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().unwrap()
        };
        let mag = int.abs() * scale + frac;
        return Ok(Rational64::new(if neg { -mag } else { mag }, scale));
    }
    text.parse::<i64>()
        .map(Rational64::from_integer)
        .map_err(|e| format!("bad number `{text}`: {e}"))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("sliding pebbles are an RBP-only variant")]
    SlidingRequiresRbp,
    #[error("the clear rule is a PRBP-only variant")]
    ClearRequiresPrbp,
    #[error("compute cost must be non-negative")]
    NegativeComputeCost,
}

impl GameConfig {
    pub fn new(kind: GameKind, capacity: usize) -> Self {
        Self {
            capacity,
            kind,
            sliding: false,
            allow_clear: false,
            no_deletion: false,
            compute_cost: zero(),
            prbp_compute_cost_split: ComputeCostSplit::PerEdge,
        }
    }

    pub fn rbp(capacity: usize) -> Self {
        Self::new(GameKind::Rbp, capacity)
    }

    pub fn prbp(capacity: usize) -> Self {
        Self::new(GameKind::Prbp, capacity)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.capacity == 0 {
            return Err(ConfigError::ZeroCapacity);
        }
        if self.sliding && self.kind != GameKind::Rbp {
            return Err(ConfigError::SlidingRequiresRbp);
        }
        if self.allow_clear && self.kind != GameKind::Prbp {
            return Err(ConfigError::ClearRequiresPrbp);
        }
        if self.compute_cost < zero() {
            return Err(ConfigError::NegativeComputeCost);
        }
        Ok(())
    }

    /// Whether any valid pebbling can exist for `dag` under the capacity alone.
    ///
    /// RBP needs `Δ_in + 1` simultaneous red pebbles to compute the widest node;
    /// PRBP needs two whenever there is an edge at all.
    pub fn capacity_admits(&self, dag: &ComputationDag) -> bool {
        match self.kind {
            GameKind::Rbp if self.sliding => self.capacity >= dag.max_in_degree(),
            GameKind::Rbp => self.capacity > dag.max_in_degree(),
            GameKind::Prbp => self.capacity >= 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("0").unwrap(), Rational64::from_integer(0));
        assert_eq!(parse_ratio("1/10").unwrap(), Rational64::new(1, 10));
        assert_eq!(parse_ratio("0.25").unwrap(), Rational64::new(1, 4));
        assert_eq!(parse_ratio("-1.5").unwrap(), Rational64::new(-3, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("abc").is_err());
    }

    #[test]
    fn variant_flags_are_checked() {
        let mut c = GameConfig::prbp(3);
        c.sliding = true;
        assert_eq!(c.validate(), Err(ConfigError::SlidingRequiresRbp));
        let mut c = GameConfig::rbp(3);
        c.allow_clear = true;
        assert_eq!(c.validate(), Err(ConfigError::ClearRequiresPrbp));
        assert_eq!(
            GameConfig::rbp(0).validate(),
            Err(ConfigError::ZeroCapacity)
        );
    }

    #[test]
    fn config_serde_roundtrip() {
        let mut c = GameConfig::prbp(4);
        c.compute_cost = Rational64::new(1, 3);
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains(r#""compute_cost":"1/3""#));
        let back: GameConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        let minimal: GameConfig = serde_json::from_str(r#"{"capacity":2,"kind":"rbp"}"#).unwrap();
        assert_eq!(minimal, GameConfig::rbp(2));
    }
}
