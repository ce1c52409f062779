//! Finitely generated trading cones and their truncations by the size of the
//! negative part of a gain.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{self, LinearProgram, LpStatus, Relation};
use crate::orlicz::{self, EpsSequence, NFunction};
use crate::prob::{int, same_space, FiniteProbSpace, RandomVariable, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeMode {
    /// `sum lambda_j g_j` with `lambda >= 0`.
    Cone,
    /// `sum lambda_j g_j` with free `lambda`.
    Subspace,
    /// `sum lambda_j g_j - h` with `lambda, h >= 0`.
    ConeMinusPositives,
}

impl ConeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ConeMode::Cone => "cone",
            ConeMode::Subspace => "subspace",
            ConeMode::ConeMinusPositives => "cone_minus_positives",
        }
    }
}

impl std::str::FromStr for ConeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cone" => Ok(ConeMode::Cone),
            "subspace" => Ok(ConeMode::Subspace),
            "cone_minus_positives" => Ok(ConeMode::ConeMinusPositives),
            other => Err(Error::InvalidArgument(format!("unknown cone mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketCone {
    space: Arc<FiniteProbSpace>,
    generators: Vec<RandomVariable>,
    mode: ConeMode,
}

/// Which neighbourhood of zero bounds the negative part of a gain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TruncationSpec {
    /// `x^- <= 1` atomwise.
    UnitBall,
    /// `P(x^- >= k) <= eps_k` for `k = 1..K`; deeper levels are unconstrained.
    EpsSequence(EpsSequence),
    /// `||x^-||_phi <= 1`.
    Orlicz(NFunction),
}

impl TruncationSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TruncationSpec::UnitBall => "unit_ball",
            TruncationSpec::EpsSequence(_) => "eps",
            TruncationSpec::Orlicz(_) => "orlicz",
        }
    }
}

/// Result of the no-arbitrage LP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoArbitrage {
    pub holds: bool,
    /// `x in C`, `x >= 0`, `x != 0` when arbitrage exists.
    pub witness: Option<RandomVariable>,
}

impl MarketCone {
    pub fn new(
        space: &Arc<FiniteProbSpace>,
        generators: Vec<RandomVariable>,
        mode: ConeMode,
    ) -> Result<Self> {
        if generators.iter().any(|g| !same_space(g.space(), space)) {
            return Err(Error::SpaceMismatch);
        }
        Ok(Self {
            space: Arc::clone(space),
            generators,
            mode,
        })
    }

    pub fn space(&self) -> &Arc<FiniteProbSpace> {
        &self.space
    }

    pub fn generators(&self) -> &[RandomVariable] {
        &self.generators
    }

    pub fn mode(&self) -> ConeMode {
        self.mode
    }

    pub(crate) fn check_space(&self, x: &RandomVariable) -> Result<()> {
        if same_space(x.space(), &self.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub(crate) fn gain_vars(&self) -> GainVars {
        GainVars {
            offset: 0,
            gens: self.generators.len(),
            slack: if self.mode == ConeMode::ConeMinusPositives {
                self.space.len()
            } else {
                0
            },
        }
    }

    /// Whether `x` is representable per the cone's mode.
    pub fn contains(&self, x: &RandomVariable) -> Result<bool> {
        self.check_space(x)?;
        let vars = self.gain_vars();
        let mut lp = LinearProgram::new(vars.len());
        vars.apply_bounds(self, &mut lp);
        for i in 0..self.space.len() {
            lp.add_constraint(vars.atom_row(self, i, vars.len()), Relation::Eq, x.value(i).clone())?;
        }
        Ok(lp::solve(&lp)?.is_feasible())
    }

    /// No arbitrage holds exactly when some `g >= 1` lies in the polar; when
    /// none does, the Farkas vector is a nonzero gain `x >= 0`, reported
    /// scaled to `max x = 1`.
    pub fn no_arbitrage_check(&self) -> Result<NoArbitrage> {
        let one = RandomVariable::constant(&self.space, Rational::one());
        Ok(match floor_lp(self, &one, false)? {
            FloorSolution::Feasible(..) => NoArbitrage {
                holds: true,
                witness: None,
            },
            FloorSolution::Infeasible(x) => NoArbitrage {
                holds: false,
                witness: Some(x.scale(&x.max_value().recip())),
            },
        })
    }

    /// Whether `x^-` lies in the truncating neighbourhood. Membership of `x`
    /// in the cone itself is not checked here; see [`Self::contains`].
    pub fn membership_in_truncation(
        &self,
        trunc: &TruncationSpec,
        x: &RandomVariable,
    ) -> Result<bool> {
        self.check_space(x)?;
        Ok(negative_part_in(trunc, x))
    }

    /// Checks `C_V = C ∩ (V + X_+)` on each sample: the left side through
    /// [`Self::membership_in_truncation`], the right side by searching for a
    /// split `x = v + h` with `h >= 0`, `v in V` via LPs.
    pub fn verify_cv_identity(
        &self,
        trunc: &TruncationSpec,
        samples: &[RandomVariable],
    ) -> Result<bool> {
        for x in samples {
            self.check_space(x)?;
            let in_cone = self.contains(x)?;
            let lhs = in_cone && self.membership_in_truncation(trunc, x)?;
            let rhs = in_cone && decomposes(trunc, x)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn negative_part_in(trunc: &TruncationSpec, x: &RandomVariable) -> bool {
    let neg = x.negative_part();
    match trunc {
        TruncationSpec::UnitBall => neg.values().iter().all(|v| *v <= Rational::one()),
        TruncationSpec::EpsSequence(eps) => eps
            .values()
            .iter()
            .enumerate()
            .all(|(i, e)| neg.tail_probability(&int(i as i64 + 1)) <= *e),
        TruncationSpec::Orlicz(phi) => orlicz::in_unit_ball(&neg, phi),
    }
}

/// Result of the floor LP.
#[derive(Debug, Clone)]
pub enum FloorSolution {
    /// A `g` minimizing the objective and the optimal value.
    Feasible(RandomVariable, Rational),
    /// No `g` exists; the gain built from the Farkas vector.
    Infeasible(RandomVariable),
}

// Substituting `g = f + h` turns `g >= f` (and `g >= 0`) into bounds on `h`,
// leaving one row per generator. With `absolute`, each atom where `f < 0`
// gets a second column `a_i in [0, f_i^-]` of cost `-p_i`, so that
// `sum p |g|` is linear: the cheaper `a_i` fills up before `h_i` is used.
pub(crate) fn floor_lp(cone: &MarketCone, f: &RandomVariable, absolute: bool) -> Result<FloorSolution> {
    cone.check_space(f)?;
    let space = cone.space();
    let n = space.len();
    let gens = cone.generators();
    let cmp = cone.mode() == ConeMode::ConeMinusPositives;
    let split: Vec<usize> = if absolute {
        (0..n).filter(|&i| f.value(i).is_negative()).collect()
    } else {
        Vec::new()
    };
    let nv = n + split.len();
    let column_atom = |c: usize| if c < n { c } else { split[c - n] };

    let mut lp = LinearProgram::new(nv);
    let mut objective = vec![Rational::zero(); nv];
    for (c, cost) in objective.iter_mut().enumerate() {
        let i = column_atom(c);
        let f_minus = -f.value(i).clone().min(Rational::zero());
        if c < n {
            *cost = -space.prob(i).clone();
            if cmp {
                lp.set_bounds(c, Some(f_minus), None);
            }
        } else {
            *cost = space.prob(i).clone();
            lp.set_bounds(c, Some(Rational::zero()), Some(f_minus));
        }
    }
    let polar_rel = if cone.mode() == ConeMode::Subspace {
        Relation::Eq
    } else {
        Relation::Le
    };
    for g in gens {
        let row: Vec<Rational> = (0..nv)
            .map(|c| {
                let i = column_atom(c);
                space.prob(i) * g.value(i)
            })
            .collect();
        lp.add_constraint(row, polar_rel, -g.pairing(f)?)?;
    }
    lp.maximize(objective)?;
    let out = lp::solve(&lp)?;
    match out.status {
        LpStatus::Optimal => {
            let sol = out.primal.unwrap_or_default();
            let mut g = f.values().to_vec();
            for (c, v) in sol.iter().enumerate() {
                g[column_atom(c)] += v;
            }
            let g = RandomVariable::new(space, g)?;
            let value = if absolute { g.l1_norm() } else { g.expectation() };
            Ok(FloorSolution::Feasible(g, value))
        }
        LpStatus::Unbounded => Err(Error::Solver("floor LP is bounded below by E[f]".into())),
        LpStatus::Infeasible if absolute => floor_lp(cone, f, false),
        LpStatus::Infeasible => {
            // y . A >= 0 columnwise gives z = sum y_j x_j >= 0 and y . b = -1
            // gives <z, f> + sum p z f^- = 1 (the f^- term only with cmp).
            let y = out.farkas.map(|c| c.rows).unwrap_or_default();
            let mut z = vec![Rational::zero(); n];
            for (l, g) in y.iter().zip(gens) {
                for (zi, gi) in z.iter_mut().zip(g.values()) {
                    *zi += l * gi;
                }
            }
            if cmp {
                // drop mass where f < 0; the dropped part is a positive element
                for (zi, fi) in z.iter_mut().zip(f.values()) {
                    if fi.is_negative() {
                        *zi = Rational::zero();
                    }
                }
            }
            Ok(FloorSolution::Infeasible(RandomVariable::new(space, z)?))
        }
    }
}

/// Variable block `[lambda_1..lambda_J, h_1..h_n]` describing a gain in `C`,
/// placed at `offset` inside a larger LP.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GainVars {
    pub offset: usize,
    pub gens: usize,
    pub slack: usize,
}

impl GainVars {
    pub fn len(&self) -> usize {
        self.gens + self.slack
    }

    pub fn apply_bounds(&self, cone: &MarketCone, lp: &mut LinearProgram) {
        if cone.mode == ConeMode::Subspace {
            for j in 0..self.gens {
                lp.set_free(self.offset + j);
            }
        }
    }

    /// Coefficients of `x_i` over an LP with `total` variables.
    pub fn atom_row(&self, cone: &MarketCone, i: usize, total: usize) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); total];
        for (j, g) in cone.generators.iter().enumerate() {
            row[self.offset + j] = g.value(i).clone();
        }
        if self.slack > 0 {
            row[self.offset + self.gens + i] = -Rational::one();
        }
        row
    }

    pub fn gain(&self, cone: &MarketCone, sol: &[Rational]) -> RandomVariable {
        let n = cone.space.len();
        let mut values = vec![Rational::zero(); n];
        for (j, g) in cone.generators.iter().enumerate() {
            let l = &sol[self.offset + j];
            if l.is_zero() {
                continue;
            }
            for (v, gv) in values.iter_mut().zip(g.values()) {
                *v += l * gv;
            }
        }
        if self.slack > 0 {
            for (i, v) in values.iter_mut().enumerate() {
                *v -= &sol[self.offset + self.gens + i];
            }
        }
        RandomVariable::new(&cone.space, values).expect("layout matches space")
    }
}

/// Is there `h >= 0` with `x - h` in the neighbourhood `V`?
pub(crate) fn decomposes(trunc: &TruncationSpec, x: &RandomVariable) -> Result<bool> {
    match trunc {
        TruncationSpec::UnitBall => decomposes_unit_ball(x),
        TruncationSpec::EpsSequence(eps) => decomposes_eps(eps, x),
        TruncationSpec::Orlicz(phi) => decomposes_orlicz(phi, x),
    }
}

fn decomposes_unit_ball(x: &RandomVariable) -> Result<bool> {
    // vars h_i >= 0; -1 <= x_i - h_i <= 1
    let n = x.space().len();
    let mut lp = LinearProgram::new(n);
    for i in 0..n {
        let mut row = vec![Rational::zero(); n];
        row[i] = Rational::one();
        lp.add_constraint(row.clone(), Relation::Le, x.value(i) + Rational::one())?;
        lp.add_constraint(row, Relation::Ge, x.value(i) - Rational::one())?;
    }
    Ok(lp::solve(&lp)?.is_feasible())
}

/// Enumerates level patterns `l_i in 0..=K`: atom `i` is promised
/// `|v_i| < l_i + 1` (no promise when `l_i = K`). A pattern is admissible when
/// `sum_{l_i >= k} p_i <= eps_k` for every `k`; for each admissible pattern an
/// LP maximizes the margin `s` in `|x_i - h_i| <= l_i + 1 - s`, and a positive
/// margin exhibits the split.
fn decomposes_eps(eps: &EpsSequence, x: &RandomVariable) -> Result<bool> {
    let n = x.space().len();
    let k_max = eps.len();
    let mut pattern = vec![0usize; n];
    let mut mass = vec![Rational::zero(); k_max + 1];
    search_patterns(eps, x, 0, &mut pattern, &mut mass)
}

fn search_patterns(
    eps: &EpsSequence,
    x: &RandomVariable,
    atom: usize,
    pattern: &mut Vec<usize>,
    mass: &mut [Rational],
) -> Result<bool> {
    let n = x.space().len();
    let k_max = eps.len();
    if atom == n {
        return pattern_margin_positive(k_max, x, pattern);
    }
    let p = x.space().prob(atom).clone();
    for level in 0..=k_max {
        // level l adds p to the tail masses of k = 1..=l
        if level > 0 {
            mass[level] += &p;
        }
        let ok = (1..=level).all(|k| mass[k..].iter().sum::<Rational>() <= eps.values()[k - 1]);
        if ok {
            pattern[atom] = level;
            if search_patterns(eps, x, atom + 1, pattern, mass)? {
                return Ok(true);
            }
        }
        if level > 0 {
            mass[level] -= &p;
        }
    }
    Ok(false)
}

fn pattern_margin_positive(k_max: usize, x: &RandomVariable, pattern: &[usize]) -> Result<bool> {
    // vars h_0..h_{n-1} >= 0, s <= 1 (free below); maximize s
    let n = x.space().len();
    let s = n;
    let mut lp = LinearProgram::new(n + 1);
    lp.set_bounds(s, None, Some(Rational::one()));
    let mut obj = vec![Rational::zero(); n + 1];
    obj[s] = Rational::one();
    lp.maximize(obj)?;
    for (i, &level) in pattern.iter().enumerate() {
        if level == k_max {
            continue;
        }
        let cap = int(level as i64 + 1);
        // x_i - h_i + s <= cap  and  -x_i + h_i + s <= cap
        let mut a = vec![Rational::zero(); n + 1];
        a[i] = -Rational::one();
        a[s] = Rational::one();
        lp.add_constraint(a, Relation::Le, &cap - x.value(i))?;
        let mut b = vec![Rational::zero(); n + 1];
        b[i] = Rational::one();
        b[s] = Rational::one();
        lp.add_constraint(b, Relation::Le, &cap + x.value(i))?;
    }
    let out = lp::solve(&lp)?;
    Ok(out.objective_value.is_some_and(|v| v.is_positive()))
}

/// Kelley cutting planes for `min_{h >= 0} modular(x - h, phi, 1) <= 1`: the
/// N-function is replaced by the maximum of its body segments and tail
/// tangents, which bounds it from below, and tangents are added at the LP
/// optimum until the answer is certified either way.
fn decomposes_orlicz(phi: &NFunction, x: &RandomVariable) -> Result<bool> {
    const MAX_ROUNDS: usize = 64;
    let space = x.space();
    let n = space.len();
    let knots = phi.knots();
    let (t_last, v_last) = knots.last().cloned().expect("validated");
    let tangent = |t: &Rational| -> (Rational, Rational) {
        // phi(T) + phi'(T) (u - T) = slope * u + intercept
        let d = t - &t_last;
        let value = &v_last + phi.tail_slope() * &d + phi.tail_quad() * &d * &d;
        let slope = phi.tail_slope() + int(2) * phi.tail_quad() * &d;
        let intercept = value - &slope * t;
        (slope, intercept)
    };
    // affine minorants (slope, intercept) of phi
    let mut cuts: Vec<(Rational, Rational)> = knots
        .windows(2)
        .map(|w| {
            let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            let intercept = &w[0].1 - &slope * &w[0].0;
            (slope, intercept)
        })
        .collect();
    cuts.push(tangent(&t_last));
    for v in x.values() {
        if v.abs() > t_last {
            cuts.push(tangent(&v.abs()));
        }
    }

    let one = Rational::one();
    for _ in 0..MAX_ROUNDS {
        // vars: h (n, >= 0), u (n, >= 0), w (n, >= 0)
        let nv = 3 * n;
        let mut lp = LinearProgram::new(nv);
        let mut obj = vec![Rational::zero(); nv];
        for i in 0..n {
            obj[2 * n + i] = -space.prob(i).clone();
            // u_i + h_i >= x_i ; u_i - h_i >= -x_i
            let mut r = vec![Rational::zero(); nv];
            r[n + i] = one.clone();
            r[i] = one.clone();
            lp.add_constraint(r, Relation::Ge, x.value(i).clone())?;
            let mut r = vec![Rational::zero(); nv];
            r[n + i] = one.clone();
            r[i] = -one.clone();
            lp.add_constraint(r, Relation::Ge, -x.value(i))?;
            for (slope, intercept) in &cuts {
                // w_i - slope u_i >= intercept
                let mut r = vec![Rational::zero(); nv];
                r[2 * n + i] = one.clone();
                r[n + i] = -slope;
                lp.add_constraint(r, Relation::Ge, intercept.clone())?;
            }
        }
        lp.maximize(obj)?;
        let out = lp::solve(&lp)?;
        let (Some(sol), Some(value)) = (out.primal, out.objective_value) else {
            return Err(Error::Solver("Orlicz decomposition LP must be optimal".into()));
        };
        if -value > one {
            return Ok(false);
        }
        let v = RandomVariable::new(
            space,
            (0..n).map(|i| x.value(i) - &sol[i]).collect(),
        )?;
        if orlicz::in_unit_ball(&v, phi) {
            return Ok(true);
        }
        let before = cuts.len();
        for val in v.values() {
            let t = val.abs();
            if t > t_last {
                let c = tangent(&t);
                if !cuts.contains(&c) {
                    cuts.push(c);
                }
            }
        }
        if cuts.len() == before {
            return Err(Error::Solver("cutting planes stalled".into()));
        }
    }
    Err(Error::Solver("cutting planes did not converge".into()))
}
