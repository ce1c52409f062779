//! Does some `g >= f` lie in the polar of the trading cone?
//!
//! Two LPs answer the question from opposite sides. The *floor LP* searches
//! for `g` directly: `g >= f` and `<x_j, g> <= 0` for every generator (`= 0`
//! for a subspace, plus `g >= 0` when positives are subtracted). The *sup LP*
//! maximizes `<x, f>` over gains with `x >= -1`. In finite dimension one is
//! feasible exactly when the other is bounded, and their values satisfy
//! `sup = min E[g] - E[f]`. When no `g` exists, the Farkas vector of the floor
//! LP is turned into a gain `x >= 0` with `<x, f> = 1`, which makes the
//! supremum infinite.

use num_traits::{One, Signed, Zero};

pub use crate::cone::FloorSolution;
use crate::cone::{floor_lp, negative_part_in, ConeMode, MarketCone, TruncationSpec};
use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus, Relation};
use crate::markets::{self, DensityRule, FamilyKind, TruncatedFamily};
use crate::orlicz::EpsSequence;
use crate::prob::{RandomVariable, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SupValue {
    Finite(Rational),
    Unbounded,
}

impl SupValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            SupValue::Finite(v) => Some(v),
            SupValue::Unbounded => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, SupValue::Finite(_))
    }
}

impl std::fmt::Display for SupValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SupValue::Finite(v) => write!(f, "{v}"),
            SupValue::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// How a supremum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupMethod {
    /// Exact LP optimum over the whole truncated cone.
    Lp,
    /// Maximum over explicit candidate elements and witness sums; a lower
    /// bound for the true supremum.
    Witness,
}

#[derive(Debug, Clone)]
pub struct SupResult {
    pub value: SupValue,
    pub method: SupMethod,
    /// An element attaining the reported value.
    pub maximizer: Option<RandomVariable>,
    /// A gain `x >= 0` in `C` with `<x, f> > 0` when the value is unbounded.
    pub ray: Option<RandomVariable>,
}

#[derive(Debug, Clone)]
pub struct DominationReport {
    pub sup_c1: SupValue,
    pub dominating_g: Option<RandomVariable>,
    /// Minimal `sum_i p_i |g_i|` over feasible `g`.
    pub min_l1_norm: Option<Rational>,
    /// A gain in `C_1` with `<x, f> = 1` whose positive multiples all stay in
    /// `C_1`, present when no `g` exists.
    pub certificate: Option<RandomVariable>,
}

/// Generator counts up to which every 0/1 combination enters the witness pool.
pub const SUBSET_POOL_MAX_GENERATORS: usize = 12;

/// `sup <x, f>` over `x in C` whose negative part lies in the truncation.
///
/// The unit ball is solved exactly by LP. The ε-sequence set is not convex and
/// the Orlicz constraint is not linear, so those kinds are evaluated over a
/// pool of elements of `C`: the `C_1` maximizer, every 0/1 sum of generators
/// (all of them up to [`SUBSET_POOL_MAX_GENERATORS`] generators, otherwise
/// single generators and the sums of [`witness_sum`]), and the `candidates`
/// that lie in `C`. An unbounded `C_1` problem has a ray `r >= 0` in `C`; its
/// multiples lie in every truncation, so that case is exact for all kinds.
pub fn sup_over_truncation(
    cone: &MarketCone,
    f: &RandomVariable,
    trunc: &TruncationSpec,
    candidates: &[RandomVariable],
) -> Result<SupResult> {
    cone.check_space(f)?;
    for x in candidates {
        cone.check_space(x)?;
    }
    let ball = sup_unit_ball(cone, f)?;
    if matches!(trunc, TruncationSpec::UnitBall) || !ball.value.is_finite() {
        return Ok(ball);
    }
    let mut pool: Vec<RandomVariable> = ball.maximizer.into_iter().collect();
    pool.extend(generator_sums(cone, trunc)?);
    for x in candidates {
        if cone.contains(x)? {
            pool.push(x.clone());
        }
    }
    let mut best = RandomVariable::zero(cone.space());
    let mut best_value = Rational::zero();
    for x in pool {
        if !negative_part_in(trunc, &x) {
            continue;
        }
        let v = x.pairing(f)?;
        if v > best_value {
            best_value = v;
            best = x;
        }
    }
    Ok(SupResult {
        value: SupValue::Finite(best_value),
        method: SupMethod::Witness,
        maximizer: Some(best),
        ray: None,
    })
}

fn generator_sums(cone: &MarketCone, trunc: &TruncationSpec) -> Result<Vec<RandomVariable>> {
    let gens = cone.generators();
    if gens.len() <= SUBSET_POOL_MAX_GENERATORS {
        let mut sums = Vec::with_capacity((1 << gens.len()) - 1);
        for mask in 1usize..(1 << gens.len()) {
            let mut x = RandomVariable::zero(cone.space());
            for (j, g) in gens.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    x = x.add(g)?;
                }
            }
            sums.push(x);
        }
        return Ok(sums);
    }
    let mut sums = gens.to_vec();
    if let TruncationSpec::EpsSequence(eps) = trunc {
        for m in 2..=gens.len() {
            match witness_sum(cone, eps, m)? {
                Some(x) => sums.push(x),
                None => break,
            }
        }
    }
    Ok(sums)
}

fn sup_unit_ball(cone: &MarketCone, f: &RandomVariable) -> Result<SupResult> {
    let vars = cone.gain_vars();
    let n = vars.len();
    let mut lp = LinearProgram::new(n);
    vars.apply_bounds(cone, &mut lp);
    let mut objective = vec![Rational::zero(); n];
    for i in 0..cone.space().len() {
        let row = vars.atom_row(cone, i, n);
        let w = cone.space().prob(i) * f.value(i);
        if !w.is_zero() {
            for (o, a) in objective.iter_mut().zip(&row) {
                *o += &w * a;
            }
        }
        lp.add_constraint(row, Relation::Ge, -Rational::one())?;
    }
    lp.maximize(objective)?;
    let out = lp::solve(&lp)?;
    match out.status {
        LpStatus::Optimal => Ok(SupResult {
            value: SupValue::Finite(out.objective_value.clone().unwrap_or_default()),
            method: SupMethod::Lp,
            maximizer: out.primal.as_deref().map(|p| vars.gain(cone, p)),
            ray: None,
        }),
        LpStatus::Unbounded => Ok(SupResult {
            value: SupValue::Unbounded,
            method: SupMethod::Lp,
            maximizer: out.primal.as_deref().map(|p| vars.gain(cone, p)),
            ray: out.ray.as_deref().map(|r| vars.gain(cone, r)),
        }),
        LpStatus::Infeasible => Err(Error::Solver("x = 0 is always feasible".into())),
    }
}

/// Floor LP with objective `min E[g]`.
pub fn min_dominating_mass(cone: &MarketCone, f: &RandomVariable) -> Result<FloorSolution> {
    floor_lp(cone, f, false)
}

/// Searches for `g >= f` in the polar of `C` minimizing `||g||_1`, and also
/// reports the supremum over `C_1`.
pub fn find_dominating_density(cone: &MarketCone, f: &RandomVariable) -> Result<DominationReport> {
    let sup_c1 = sup_unit_ball(cone, f)?.value;
    let needs_abs = cone.mode() != ConeMode::ConeMinusPositives && !f.is_nonnegative();
    let report = match floor_lp(cone, f, needs_abs)? {
        FloorSolution::Feasible(g, value) => DominationReport {
            sup_c1,
            dominating_g: Some(g),
            min_l1_norm: Some(value),
            certificate: None,
        },
        FloorSolution::Infeasible(x) => DominationReport {
            sup_c1,
            dominating_g: None,
            min_l1_norm: None,
            certificate: Some(x),
        },
    };
    Ok(report)
}

/// `sup over C_1` finite exactly when a dominating `g` exists, each side
/// solved by its own LP.
pub fn duality_check(cone: &MarketCone, f: &RandomVariable) -> Result<bool> {
    let bounded = sup_unit_ball(cone, f)?.value.is_finite();
    let feasible = matches!(min_dominating_mass(cone, f)?, FloorSolution::Feasible(..));
    Ok(bounded == feasible)
}

/// `x_{n_1} + ... + x_{n_m}` for the lexicographically smallest index set
/// whose negative-part probabilities sum to at most `min(eps_1..eps_m)`.
/// Returns `None` when no such set exists or the sum falls outside the
/// ε-truncation.
pub fn witness_sum(cone: &MarketCone, eps: &EpsSequence, m: usize) -> Result<Option<RandomVariable>> {
    let gens = cone.generators();
    if m == 0 || m > gens.len() || eps.is_empty() {
        return Ok(None);
    }
    let budget = eps.values()[..m.min(eps.len())]
        .iter()
        .min()
        .cloned()
        .expect("nonempty");
    let weights: Vec<Rational> = gens
        .iter()
        .map(|g| {
            g.values()
                .iter()
                .zip(g.space().probs())
                .filter(|(v, _)| v.is_negative())
                .map(|(_, p)| p.clone())
                .sum()
        })
        .collect();
    let Some(indices) = lex_min_subset(&weights, m, &budget) else {
        return Ok(None);
    };
    let mut x = RandomVariable::zero(cone.space());
    for &j in &indices {
        x = x.add(&gens[j])?;
    }
    let trunc = TruncationSpec::EpsSequence(eps.clone());
    Ok(negative_part_in(&trunc, &x).then_some(x))
}

fn lex_min_subset(weights: &[Rational], m: usize, budget: &Rational) -> Option<Vec<usize>> {
    let n = weights.len();
    let smallest_after = |j: usize, count: usize| -> Option<Rational> {
        let mut rest: Vec<&Rational> = weights[j + 1..].iter().collect();
        if rest.len() < count {
            return None;
        }
        rest.sort();
        Some(rest.into_iter().take(count).sum())
    };
    let mut chosen = Vec::with_capacity(m);
    let mut remaining = budget.clone();
    let mut start = 0;
    for r in 0..m {
        let need = m - r - 1;
        let pick = (start..n).find(|&j| {
            smallest_after(j, need).is_some_and(|tail| &weights[j] + tail <= remaining)
        })?;
        remaining -= &weights[pick];
        chosen.push(pick);
        start = pick + 1;
    }
    Some(chosen)
}

/// A gain in every `C^{eps_k}` whose pairing with `f` exceeds `beta`, built
/// from `m = floor(beta) + 2` generators.
pub fn divergence_witness_eps(
    cone: &MarketCone,
    f: &RandomVariable,
    eps: &EpsSequence,
    beta: &Rational,
) -> Result<Option<RandomVariable>> {
    cone.check_space(f)?;
    let m = beta.floor().to_integer() + 2;
    let Ok(m) = usize::try_from(m) else {
        return Ok(None);
    };
    if m == 0 {
        return Ok(None);
    }
    let Some(x) = witness_sum(cone, eps, m)? else {
        return Ok(None);
    };
    Ok((x.pairing(f)? > *beta).then_some(x))
}

/// Which column of a sweep drives the divergence verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuantity {
    Sup,
    MinL1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub level: usize,
    pub sup: SupValue,
    pub min_l1_norm: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Strictly increasing across all levels and above the threshold at the
    /// last level. Heuristic: divergence is not decidable at finite levels.
    pub diverging: bool,
}

/// Builds each truncation level of `kind`, and reports the supremum over the
/// truncated cone and the minimal dominating `||g||_1`.
///
/// Example 2 uses `rule` (zero on the residual atom); example 3 its own floor.
/// Example 1 has no cone: its row reports `max <x_n, 1>` over the witnesses
/// `x_n` (with `eps_n = 2^-n`) whose negative part lies in `trunc`.
pub fn truncation_sweep(
    kind: FamilyKind,
    rule: &DensityRule,
    trunc: &TruncationSpec,
    levels: &[usize],
    watch: SweepQuantity,
    threshold: &Rational,
) -> Result<SweepReport> {
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("levels must be increasing".into()));
    }
    let rows = levels
        .iter()
        .map(|&level| sweep_row(TruncatedFamily::new(kind, level)?, rule, trunc))
        .collect::<Result<Vec<_>>>()?;
    let watched: Vec<Option<Rational>> = rows
        .iter()
        .map(|r| match watch {
            SweepQuantity::Sup => r.sup.finite().cloned(),
            SweepQuantity::MinL1 => r.min_l1_norm.clone(),
        })
        .collect();
    let increasing = watched.iter().all(Option::is_some)
        && watched.windows(2).all(|w| w[0] < w[1]);
    let above = watched
        .last()
        .and_then(|v| v.as_ref())
        .is_some_and(|v| v > threshold);
    Ok(SweepReport {
        rows,
        diverging: !watched.is_empty() && increasing && above,
    })
}

fn sweep_row(family: TruncatedFamily, rule: &DensityRule, trunc: &TruncationSpec) -> Result<SweepRow> {
    let level = family.level;
    let (cone, f) = match family.kind {
        FamilyKind::Example1 => {
            let seq = markets::build_example1(markets::dyadic_eps(level))?;
            let one = RandomVariable::constant(&seq.space, Rational::one());
            let mut best = Rational::zero();
            for x in &seq.xs {
                if negative_part_in(trunc, x) {
                    best = best.max(x.pairing(&one)?);
                }
            }
            return Ok(SweepRow {
                level,
                sup: SupValue::Finite(best),
                min_l1_norm: None,
            });
        }
        FamilyKind::Example2 => {
            let m = markets::build_example2(level)?;
            let f = m.density(rule, Rational::zero());
            (m.cone, f)
        }
        FamilyKind::Example3 => {
            let m = markets::build_example3(level)?;
            (m.cone, m.f)
        }
    };
    let sup = sup_over_truncation(&cone, &f, trunc, &[])?.value;
    let min_l1_norm = find_dominating_density(&cone, &f)?.min_l1_norm;
    Ok(SweepRow {
        level,
        sup,
        min_l1_norm,
    })
}
