//! Analysis reports in text and JSON form.
//!
//! Exact values print as `p/q`; scalars are followed by a 6-significant-digit
//! decimal.

use serde_json::{json, Value};

use crate::cone::NoArbitrage;
use crate::domination::{
    duality_check, find_dominating_density, sup_over_truncation, DominationReport, SupMethod,
    SupResult, SupValue, SweepReport,
};
use crate::error::Result;
use crate::market_file::Market;
use crate::markets::Example1Sequence;
use crate::prob::{approx, int, RandomVariable, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Dominated,
    NotDominated,
    Arbitrage,
}

impl Verdict {
    /// Exit status of `check`; input errors use 3.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Dominated => 0,
            Verdict::NotDominated => 1,
            Verdict::Arbitrage => 2,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Verdict::Dominated => "dominating density found",
            Verdict::NotDominated => "no dominating density",
            Verdict::Arbitrage => "arbitrage",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub atoms: usize,
    pub generators: usize,
    pub mode: &'static str,
    pub truncation: &'static str,
    pub no_arbitrage: NoArbitrage,
    pub truncated_sup: SupResult,
    pub domination: DominationReport,
    pub certificate_pairing: Option<Rational>,
    pub duality_consistent: bool,
}

pub const INPUT_ERROR_EXIT: i32 = 3;

/// Runs the no-arbitrage test, the truncated supremum, the floor LP and the
/// duality cross-check.
pub fn analyze(market: &Market) -> Result<CheckReport> {
    let cone = &market.cone;
    let no_arbitrage = cone.no_arbitrage_check()?;
    let truncated_sup = sup_over_truncation(cone, &market.f, &market.truncation, &market.candidates)?;
    let domination = find_dominating_density(cone, &market.f)?;
    let certificate_pairing = domination
        .certificate
        .as_ref()
        .map(|x| x.pairing(&market.f))
        .transpose()?;
    let duality_consistent = duality_check(cone, &market.f)?;
    Ok(CheckReport {
        atoms: cone.space().len(),
        generators: cone.generators().len(),
        mode: cone.mode().as_str(),
        truncation: market.truncation.kind(),
        no_arbitrage,
        truncated_sup,
        domination,
        certificate_pairing,
        duality_consistent,
    })
}

impl CheckReport {
    pub fn verdict(&self) -> Verdict {
        if !self.no_arbitrage.holds {
            Verdict::Arbitrage
        } else if self.domination.dominating_g.is_some() {
            Verdict::Dominated
        } else {
            Verdict::NotDominated
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<14}{v}\n"));
        line(
            "market",
            format!(
                "{} atoms, {} generators, mode {}",
                self.atoms, self.generators, self.mode
            ),
        );
        match (&self.no_arbitrage.holds, &self.no_arbitrage.witness) {
            (true, _) => line("no-arbitrage", "holds".into()),
            (false, Some(w)) => line("no-arbitrage", format!("fails, witness {}", vector(w))),
            (false, None) => line("no-arbitrage", "fails".into()),
        }
        line("sup C_1", sup_text(&self.domination.sup_c1));
        line(
            "sup V",
            format!(
                "{} ({}, {})",
                sup_text(&self.truncated_sup.value),
                self.truncation,
                method_name(self.truncated_sup.method)
            ),
        );
        if let Some(x) = &self.truncated_sup.maximizer {
            if !x.is_zero() {
                line("maximizer", vector(x));
            }
        }
        match &self.domination.dominating_g {
            Some(g) => line("g", vector(g)),
            None => line("g", "none".into()),
        }
        if let Some(v) = &self.domination.min_l1_norm {
            line("min ||g||_1", scalar(v));
        }
        if let (Some(x), Some(p)) = (&self.domination.certificate, &self.certificate_pairing) {
            line("certificate", format!("{} with <x, f> = {}", vector(x), scalar(p)));
        }
        line(
            "duality",
            if self.duality_consistent { "consistent" } else { "VIOLATED" }.into(),
        );
        line("verdict", self.verdict().describe().into());
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "atoms": self.atoms,
            "generators": self.generators,
            "mode": self.mode,
            "no_arbitrage": {
                "holds": self.no_arbitrage.holds,
                "witness": self.no_arbitrage.witness.as_ref().map(vector_json),
            },
            "sup_c1": sup_json(&self.domination.sup_c1),
            "sup_truncated": {
                "kind": self.truncation,
                "method": method_name(self.truncated_sup.method),
                "value": sup_json(&self.truncated_sup.value),
                "maximizer": self.truncated_sup.maximizer.as_ref().map(vector_json),
            },
            "dominating_g": self.domination.dominating_g.as_ref().map(vector_json),
            "min_l1_norm": self.domination.min_l1_norm.as_ref().map(scalar_json),
            "certificate": self.domination.certificate.as_ref().map(vector_json),
            "certificate_pairing": self.certificate_pairing.as_ref().map(scalar_json),
            "duality_consistent": self.duality_consistent,
            "verdict": self.verdict().describe(),
            "exit_code": self.verdict().exit_code(),
        })
    }
}

fn method_name(m: SupMethod) -> &'static str {
    match m {
        SupMethod::Lp => "lp",
        SupMethod::Witness => "witness",
    }
}

pub fn scalar(x: &Rational) -> String {
    format!("{x} ~ {}", approx(x))
}

fn sup_text(v: &SupValue) -> String {
    match v {
        SupValue::Finite(x) => scalar(x),
        SupValue::Unbounded => "unbounded".into(),
    }
}

pub fn vector(x: &RandomVariable) -> String {
    let parts: Vec<String> = x.values().iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

pub fn scalar_json(x: &Rational) -> Value {
    json!({ "exact": x.to_string(), "approx": approx(x) })
}

fn sup_json(v: &SupValue) -> Value {
    match v {
        SupValue::Finite(x) => scalar_json(x),
        SupValue::Unbounded => json!("unbounded"),
    }
}

fn vector_json(x: &RandomVariable) -> Value {
    json!(x.values().iter().map(|v| v.to_string()).collect::<Vec<_>>())
}

pub fn sweep_text(report: &SweepReport) -> String {
    let mut out = format!("{:>6}  {:<28}{}\n", "level", "sup", "min ||g||_1");
    for row in &report.rows {
        let l1 = row.min_l1_norm.as_ref().map_or("-".into(), scalar);
        out.push_str(&format!("{:>6}  {:<28}{}\n", row.level, sup_text(&row.sup), l1));
    }
    out.push_str(&format!(
        "diverging: {}\n",
        if report.diverging { "yes" } else { "no" }
    ));
    out
}

pub fn sweep_json(report: &SweepReport) -> Value {
    json!({
        "rows": report.rows.iter().map(|r| json!({
            "level": r.level,
            "sup": sup_json(&r.sup),
            "min_l1_norm": r.min_l1_norm.as_ref().map(scalar_json),
        })).collect::<Vec<_>>(),
        "diverging": report.diverging,
    })
}

/// One row per `x_n`: `eps_n`, `<x_n, 1>`, `n(1 - 2 eps_n)` and the tail
/// probabilities `P(x_n^- >= k)` for `k = 1..M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example1Row {
    pub n: usize,
    pub eps: Rational,
    pub pairing: Rational,
    pub formula: Rational,
    pub tails: Vec<Rational>,
}

pub fn example1_rows(seq: &Example1Sequence) -> Result<Vec<Example1Row>> {
    let one = RandomVariable::constant(&seq.space, int(1));
    let m = seq.xs.len();
    seq.xs
        .iter()
        .zip(&seq.eps)
        .enumerate()
        .map(|(i, (x, e))| {
            let n = i + 1;
            let nn = int(n as i64);
            let neg = x.negative_part();
            Ok(Example1Row {
                n,
                eps: e.clone(),
                pairing: x.pairing(&one)?,
                formula: &nn * (int(1) - int(2) * e),
                tails: (1..=m as i64).map(|k| neg.tail_probability(&int(k))).collect(),
            })
        })
        .collect()
}

pub fn example1_text(rows: &[Example1Row]) -> String {
    let mut out = format!(
        "{:>3}  {:<12}{:<28}{:<14}{}\n",
        "n", "eps_n", "<x_n, 1>", "n(1-2eps_n)", "P(x_n^- >= k), k = 1.."
    );
    for r in rows {
        let tails: Vec<String> = r.tails.iter().map(|t| t.to_string()).collect();
        out.push_str(&format!(
            "{:>3}  {:<12}{:<28}{:<14}{}\n",
            r.n,
            r.eps.to_string(),
            scalar(&r.pairing),
            r.formula.to_string(),
            tails.join(" ")
        ));
    }
    out
}

pub fn example1_json(rows: &[Example1Row]) -> Value {
    json!(rows
        .iter()
        .map(|r| json!({
            "n": r.n,
            "eps": r.eps.to_string(),
            "pairing": scalar_json(&r.pairing),
            "formula": r.formula.to_string(),
            "tails": r.tails.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        }))
        .collect::<Vec<_>>())
}
