//! JSON market files.
//!
//! ```json
//! {
//!   "atoms": [{"label": "up", "prob": "1/2"}, {"label": "down", "prob": "1/2"}],
//!   "generators": [["1", "-1"]],
//!   "mode": "subspace",
//!   "f": ["1", "1"],
//!   "truncation": {"kind": "eps", "eps": ["1/2", "1/4"]},
//!   "candidates": [["1", "-1"]]
//! }
//! ```
//!
//! `truncation` defaults to `{"kind": "unit_ball"}`; an Orlicz truncation is
//! `{"kind": "orlicz", "phi": {...}}` with the N-function's own encoding.
//! `candidates` are extra gains scored by witness-based suprema. Every number
//! is a `"p/q"` string. Unknown fields are rejected.

use serde::{Deserialize, Serialize};

use crate::cone::{ConeMode, MarketCone, TruncationSpec};
use crate::error::{Error, Result};
use crate::orlicz::{EpsSequence, NFunction};
use crate::prob::{FiniteProbSpace, RandomVariable, Rational};
use crate::serde_rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomEntry {
    pub label: String,
    #[serde(with = "serde_rational::one")]
    pub prob: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TruncationEntry {
    UnitBall,
    Eps {
        #[serde(with = "serde_rational::vec")]
        eps: Vec<Rational>,
    },
    Orlicz {
        phi: NFunction,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub atoms: Vec<AtomEntry>,
    #[serde(with = "serde_rational::matrix")]
    pub generators: Vec<Vec<Rational>>,
    pub mode: ConeMode,
    #[serde(with = "serde_rational::vec")]
    pub f: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationEntry>,
    #[serde(
        default,
        with = "serde_rational::matrix",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub candidates: Vec<Vec<Rational>>,
}

/// A validated market file.
#[derive(Debug, Clone)]
pub struct Market {
    pub cone: MarketCone,
    pub f: RandomVariable,
    pub truncation: TruncationSpec,
    pub candidates: Vec<RandomVariable>,
}

impl MarketFile {
    /// Parses JSON, reporting the failing field path with line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            Error::Format(format!("field `{path}`: {inner}"))
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_market(market: &Market) -> Self {
        let space = market.cone.space();
        let atoms = space
            .labels()
            .iter()
            .zip(space.probs())
            .map(|(label, prob)| AtomEntry {
                label: label.clone(),
                prob: prob.clone(),
            })
            .collect();
        let rows = |xs: &[RandomVariable]| xs.iter().map(|x| x.values().to_vec()).collect();
        let truncation = match &market.truncation {
            TruncationSpec::UnitBall => None,
            TruncationSpec::EpsSequence(eps) => Some(TruncationEntry::Eps {
                eps: eps.values().to_vec(),
            }),
            TruncationSpec::Orlicz(phi) => Some(TruncationEntry::Orlicz { phi: phi.clone() }),
        };
        MarketFile {
            atoms,
            generators: rows(market.cone.generators()),
            mode: market.cone.mode(),
            f: market.f.values().to_vec(),
            truncation,
            candidates: rows(&market.candidates),
        }
    }

    /// Re-validates every invariant of the space, cone and vectors.
    pub fn into_market(self) -> Result<Market> {
        let ctx = |field: &str| {
            let field = field.to_string();
            move |e: Error| Error::Format(format!("field `{field}`: {e}"))
        };
        let (labels, probs) = self.atoms.into_iter().map(|a| (a.label, a.prob)).unzip();
        let space = FiniteProbSpace::new(labels, probs).map_err(ctx("atoms"))?;
        let generators = self
            .generators
            .into_iter()
            .enumerate()
            .map(|(j, g)| RandomVariable::new(&space, g).map_err(ctx(&format!("generators[{j}]"))))
            .collect::<Result<Vec<_>>>()?;
        let cone = MarketCone::new(&space, generators, self.mode).map_err(ctx("generators"))?;
        let f = RandomVariable::new(&space, self.f).map_err(ctx("f"))?;
        let truncation = match self.truncation {
            None | Some(TruncationEntry::UnitBall) => TruncationSpec::UnitBall,
            Some(TruncationEntry::Eps { eps }) => {
                TruncationSpec::EpsSequence(EpsSequence::new(eps).map_err(ctx("truncation.eps"))?)
            }
            Some(TruncationEntry::Orlicz { phi }) => TruncationSpec::Orlicz(phi),
        };
        let candidates = self
            .candidates
            .into_iter()
            .enumerate()
            .map(|(j, x)| RandomVariable::new(&space, x).map_err(ctx(&format!("candidates[{j}]"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Market {
            cone,
            f,
            truncation,
            candidates,
        })
    }
}

/// Parses and validates in one step.
pub fn load_market(text: &str) -> Result<Market> {
    MarketFile::parse(text)?.into_market()
}
