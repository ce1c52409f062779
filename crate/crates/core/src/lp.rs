//! Exact rational linear programming.
//!
//! A dense two-phase tableau simplex with Bland's rule. Every outcome carries
//! a certificate that [`verify_outcome`] re-checks by direct substitution:
//! a feasible point for `Optimal`, a feasible point plus an improving ray for
//! `Unbounded`, and a Farkas multiplier vector for `Infeasible`.
//!
//! Tableaus are dumped at `trace` level under the `mfloor::lp` log target.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::prob::Rational;

const TRACE_TARGET: &str = "mfloor::lp";

static SOLVED: AtomicUsize = AtomicUsize::new(0);
static REJECTED: AtomicUsize = AtomicUsize::new(0);

/// Process-wide counts of `(solves, certificates rejected by verify_outcome)`.
pub fn audit_counts() -> (usize, usize) {
    (SOLVED.load(Ordering::Relaxed), REJECTED.load(Ordering::Relaxed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective . x` subject to row constraints and per-variable
/// bounds. Variables are nonnegative unless their bounds are changed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
    lower: Vec<Option<Rational>>,
    upper: Vec<Option<Rational>>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![Rational::zero(); num_vars],
            constraints: Vec::new(),
            lower: vec![Some(Rational::zero()); num_vars],
            upper: vec![None; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn lower_bounds(&self) -> &[Option<Rational>] {
        &self.lower
    }

    pub fn upper_bounds(&self) -> &[Option<Rational>] {
        &self.upper
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> Result<&mut Self> {
        self.check_len(objective.len())?;
        self.objective = objective;
        Ok(self)
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Result<&mut Self> {
        self.check_len(coeffs.len())?;
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(self)
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_free(&mut self, var: usize) {
        self.set_bounds(var, None, None);
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.num_vars() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.num_vars(),
                found: len,
            })
        }
    }

    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = x.iter().enumerate().all(|(j, v)| {
            self.lower[j].as_ref().is_none_or(|l| v >= l)
                && self.upper[j].as_ref().is_none_or(|u| v <= u)
        });
        bounds_ok
            && self
                .constraints
                .iter()
                .all(|c| c.relation.holds(&dot(&c.coeffs, x), &c.rhs))
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

/// Multipliers proving infeasibility.
///
/// Signs: `rows[i] >= 0` for `<=` rows, `<= 0` for `>=` rows, free for
/// equalities; `lower[j]`, `upper[j] >= 0` and zero when the bound is absent.
/// Certifies `sum_i rows[i] a_i - lower + upper = 0` and
/// `sum_i rows[i] b_i - lower . l + upper . u = -1`, so every feasible point
/// would satisfy `0 <= -1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub rows: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub primal: Option<Vec<Rational>>,
    pub objective_value: Option<Rational>,
    pub ray: Option<Vec<Rational>>,
    pub farkas: Option<FarkasCertificate>,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn is_feasible(&self) -> bool {
        self.status != LpStatus::Infeasible
    }
}

/// Solves `lp` and re-verifies the returned certificate before handing it out.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    for c in &lp.constraints {
        lp.check_len(c.coeffs.len())?;
    }
    if lp.lower.len() != lp.num_vars() || lp.upper.len() != lp.num_vars() {
        return Err(Error::Dimension {
            expected: lp.num_vars(),
            found: lp.lower.len().min(lp.upper.len()),
        });
    }
    let std = StandardForm::build(lp);
    let outcome = match std.run() {
        Phase::Optimal(z) => {
            let x = std.recover_point(&z);
            LpOutcome {
                status: LpStatus::Optimal,
                objective_value: Some(lp.objective_at(&x)),
                primal: Some(x),
                ray: None,
                farkas: None,
            }
        }
        Phase::Unbounded(z, dz) => LpOutcome {
            status: LpStatus::Unbounded,
            primal: Some(std.recover_point(&z)),
            objective_value: None,
            ray: Some(std.recover_direction(&dz)),
            farkas: None,
        },
        Phase::Infeasible => LpOutcome {
            status: LpStatus::Infeasible,
            primal: None,
            objective_value: None,
            ray: None,
            farkas: Some(farkas_certificate(lp)?),
        },
    };
    SOLVED.fetch_add(1, Ordering::Relaxed);
    if !verify_outcome(lp, &outcome) {
        REJECTED.fetch_add(1, Ordering::Relaxed);
        return Err(Error::Solver(format!(
            "{:?} certificate failed verification",
            outcome.status
        )));
    }
    Ok(outcome)
}

/// Re-checks every certificate identity of `out` against `lp` exactly.
pub fn verify_outcome(lp: &LinearProgram, out: &LpOutcome) -> bool {
    let n = lp.num_vars();
    match out.status {
        LpStatus::Optimal => match (&out.primal, &out.objective_value) {
            (Some(x), Some(v)) => lp.is_feasible_point(x) && lp.objective_at(x) == *v,
            _ => false,
        },
        LpStatus::Unbounded => {
            let (Some(x), Some(r)) = (&out.primal, &out.ray) else {
                return false;
            };
            if !lp.is_feasible_point(x) || r.len() != n {
                return false;
            }
            let bounds_ok = (0..n).all(|j| {
                (lp.lower[j].is_none() || !r[j].is_negative())
                    && (lp.upper[j].is_none() || !r[j].is_positive())
            });
            let rows_ok = lp
                .constraints
                .iter()
                .all(|c| c.relation.holds(&dot(&c.coeffs, r), &Rational::zero()));
            bounds_ok && rows_ok && lp.objective_at(r).is_positive()
        }
        LpStatus::Infeasible => {
            let Some(cert) = &out.farkas else {
                return false;
            };
            if cert.rows.len() != lp.constraints.len()
                || cert.lower.len() != n
                || cert.upper.len() != n
            {
                return false;
            }
            let signs_ok = lp.constraints.iter().zip(&cert.rows).all(|(c, y)| match c.relation {
                Relation::Le => !y.is_negative(),
                Relation::Ge => !y.is_positive(),
                Relation::Eq => true,
            });
            let bound_signs_ok = (0..n).all(|j| {
                !cert.lower[j].is_negative()
                    && !cert.upper[j].is_negative()
                    && (lp.lower[j].is_some() || cert.lower[j].is_zero())
                    && (lp.upper[j].is_some() || cert.upper[j].is_zero())
            });
            if !signs_ok || !bound_signs_ok {
                return false;
            }
            let combination_vanishes = (0..n).all(|j| {
                let s: Rational = lp
                    .constraints
                    .iter()
                    .zip(&cert.rows)
                    .map(|(c, y)| y * &c.coeffs[j])
                    .sum();
                (s - &cert.lower[j] + &cert.upper[j]).is_zero()
            });
            let mut rhs: Rational = lp
                .constraints
                .iter()
                .zip(&cert.rows)
                .map(|(c, y)| y * &c.rhs)
                .sum();
            for j in 0..n {
                if let Some(l) = &lp.lower[j] {
                    rhs -= &cert.lower[j] * l;
                }
                if let Some(u) = &lp.upper[j] {
                    rhs += &cert.upper[j] * u;
                }
            }
            combination_vanishes && rhs == -Rational::one()
        }
    }
}

/// Solves the alternative system for an infeasible `lp`.
fn farkas_certificate(lp: &LinearProgram) -> Result<FarkasCertificate> {
    let n = lp.num_vars();
    let m = lp.constraints.len();
    let lower_idx: Vec<usize> = (0..n).filter(|&j| lp.lower[j].is_some()).collect();
    let upper_idx: Vec<usize> = (0..n).filter(|&j| lp.upper[j].is_some()).collect();
    let nv = m + lower_idx.len() + upper_idx.len();

    let mut alt = LinearProgram::new(nv);
    for (i, c) in lp.constraints.iter().enumerate() {
        match c.relation {
            Relation::Le => {}
            Relation::Ge => alt.set_bounds(i, None, Some(Rational::zero())),
            Relation::Eq => alt.set_free(i),
        }
    }
    for j in 0..n {
        let mut row = vec![Rational::zero(); nv];
        for (i, c) in lp.constraints.iter().enumerate() {
            row[i] = c.coeffs[j].clone();
        }
        if let Some(k) = lower_idx.iter().position(|&v| v == j) {
            row[m + k] = -Rational::one();
        }
        if let Some(k) = upper_idx.iter().position(|&v| v == j) {
            row[m + lower_idx.len() + k] = Rational::one();
        }
        alt.add_constraint(row, Relation::Eq, Rational::zero())?;
    }
    let mut rhs_row = vec![Rational::zero(); nv];
    for (i, c) in lp.constraints.iter().enumerate() {
        rhs_row[i] = c.rhs.clone();
    }
    for (k, &j) in lower_idx.iter().enumerate() {
        rhs_row[m + k] = -lp.lower[j].clone().unwrap_or_default();
    }
    for (k, &j) in upper_idx.iter().enumerate() {
        rhs_row[m + lower_idx.len() + k] = lp.upper[j].clone().unwrap_or_default();
    }
    alt.add_constraint(rhs_row, Relation::Eq, -Rational::one())?;

    let std = StandardForm::build(&alt);
    let y = match std.run() {
        Phase::Optimal(z) => std.recover_point(&z),
        _ => {
            return Err(Error::Solver(
                "alternative system infeasible for an infeasible program".into(),
            ))
        }
    };
    let mut lower = vec![Rational::zero(); n];
    let mut upper = vec![Rational::zero(); n];
    for (k, &j) in lower_idx.iter().enumerate() {
        lower[j] = y[m + k].clone();
    }
    for (k, &j) in upper_idx.iter().enumerate() {
        upper[j] = y[m + lower_idx.len() + k].clone();
    }
    Ok(FarkasCertificate {
        rows: y[..m].to_vec(),
        lower,
        upper,
    })
}

/// How an original variable is expressed through nonnegative columns.
#[derive(Debug, Clone)]
enum VarMap {
    /// `x = l + z`
    Shift { col: usize, lower: Rational },
    /// `x = u - z`
    Mirror { col: usize, upper: Rational },
    /// `x = z+ - z-`
    Split { pos: usize, neg: usize },
}

enum Phase {
    Optimal(Vec<Rational>),
    Unbounded(Vec<Rational>, Vec<Rational>),
    Infeasible,
}

/// `maximize c.z  s.t.  rows,  z >= 0`.
struct StandardForm {
    cost: Vec<Rational>,
    rows: Vec<Constraint>,
    map: Vec<VarMap>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut map = Vec::with_capacity(lp.num_vars());
        let mut cols = 0usize;
        let mut bound_rows = Vec::new();
        for j in 0..lp.num_vars() {
            match (&lp.lower[j], &lp.upper[j]) {
                (Some(l), u) => {
                    map.push(VarMap::Shift {
                        col: cols,
                        lower: l.clone(),
                    });
                    if let Some(u) = u {
                        bound_rows.push((cols, u - l));
                    }
                    cols += 1;
                }
                (None, Some(u)) => {
                    map.push(VarMap::Mirror {
                        col: cols,
                        upper: u.clone(),
                    });
                    cols += 1;
                }
                (None, None) => {
                    map.push(VarMap::Split {
                        pos: cols,
                        neg: cols + 1,
                    });
                    cols += 2;
                }
            }
        }

        let mut cost = vec![Rational::zero(); cols];
        for (j, m) in map.iter().enumerate() {
            let c = &lp.objective[j];
            match m {
                VarMap::Shift { col, .. } => cost[*col] = c.clone(),
                VarMap::Mirror { col, .. } => cost[*col] = -c,
                VarMap::Split { pos, neg } => {
                    cost[*pos] = c.clone();
                    cost[*neg] = -c;
                }
            }
        }

        let mut rows = Vec::with_capacity(lp.constraints.len() + bound_rows.len());
        for c in &lp.constraints {
            let mut coeffs = vec![Rational::zero(); cols];
            let mut rhs = c.rhs.clone();
            for (j, m) in map.iter().enumerate() {
                let a = &c.coeffs[j];
                if a.is_zero() {
                    continue;
                }
                match m {
                    VarMap::Shift { col, lower } => {
                        coeffs[*col] = a.clone();
                        rhs -= a * lower;
                    }
                    VarMap::Mirror { col, upper } => {
                        coeffs[*col] = -a;
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[*pos] = a.clone();
                        coeffs[*neg] = -a;
                    }
                }
            }
            rows.push(Constraint {
                coeffs,
                relation: c.relation,
                rhs,
            });
        }
        for (col, width) in bound_rows {
            let mut coeffs = vec![Rational::zero(); cols];
            coeffs[col] = Rational::one();
            rows.push(Constraint {
                coeffs,
                relation: Relation::Le,
                rhs: width,
            });
        }
        Self { cost, rows, map }
    }

    fn recover_point(&self, z: &[Rational]) -> Vec<Rational> {
        self.map
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, lower } => lower + &z[*col],
                VarMap::Mirror { col, upper } => upper - &z[*col],
                VarMap::Split { pos, neg } => &z[*pos] - &z[*neg],
            })
            .collect()
    }

    fn recover_direction(&self, dz: &[Rational]) -> Vec<Rational> {
        self.map
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, .. } => dz[*col].clone(),
                VarMap::Mirror { col, .. } => -&dz[*col],
                VarMap::Split { pos, neg } => &dz[*pos] - &dz[*neg],
            })
            .collect()
    }

    fn run(&self) -> Phase {
        let n = self.cost.len();
        let m = self.rows.len();

        // Nonnegative right-hand sides; count auxiliary columns.
        let mut norm: Vec<Constraint> = self.rows.clone();
        for r in &mut norm {
            if r.rhs.is_negative() {
                r.coeffs.iter_mut().for_each(|a| *a = -&*a);
                r.rhs = -&r.rhs;
                r.relation = r.relation.flipped();
            }
        }
        let n_slack = norm.iter().filter(|r| r.relation != Relation::Eq).count();
        let n_art = norm.iter().filter(|r| r.relation != Relation::Le).count();
        let art_start = n + n_slack;
        let width = art_start + n_art;

        let mut tab = Tableau {
            rows: Vec::with_capacity(m),
            obj: vec![Rational::zero(); width + 1],
            basis: Vec::with_capacity(m),
            width,
        };
        let (mut s, mut a) = (n, art_start);
        for r in &norm {
            let mut row = vec![Rational::zero(); width + 1];
            row[..n].clone_from_slice(&r.coeffs);
            row[width] = r.rhs.clone();
            match r.relation {
                Relation::Le => {
                    row[s] = Rational::one();
                    tab.basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -Rational::one();
                    s += 1;
                    row[a] = Rational::one();
                    tab.basis.push(a);
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = Rational::one();
                    tab.basis.push(a);
                    a += 1;
                }
            }
            tab.rows.push(row);
        }

        if n_art > 0 {
            // Phase 1: maximize -sum(artificials).
            let mut cost1 = vec![Rational::zero(); width];
            for c in cost1.iter_mut().skip(art_start) {
                *c = -Rational::one();
            }
            tab.load_objective(&cost1);
            tab.trace("phase 1 start");
            if let Simplex::Unbounded(_) = tab.simplex(width) {
                unreachable!("phase 1 objective is bounded by zero");
            }
            if tab.obj[width].is_negative() {
                tab.trace("phase 1 infeasible");
                return Phase::Infeasible;
            }
            tab.expel_artificials(art_start);
        }

        let mut cost2 = vec![Rational::zero(); width];
        cost2[..n].clone_from_slice(&self.cost);
        tab.load_objective(&cost2);
        tab.trace("phase 2 start");
        match tab.simplex(art_start) {
            Simplex::Optimal => {
                tab.trace("optimal");
                Phase::Optimal(tab.basic_solution(n))
            }
            Simplex::Unbounded(col) => {
                tab.trace("unbounded");
                let mut dz = vec![Rational::zero(); n];
                if col < n {
                    dz[col] = Rational::one();
                }
                for (i, &b) in tab.basis.iter().enumerate() {
                    if b < n {
                        dz[b] = -&tab.rows[i][col];
                    }
                }
                Phase::Unbounded(tab.basic_solution(n), dz)
            }
        }
    }
}

enum Simplex {
    Optimal,
    Unbounded(usize),
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs `c_B B^-1 A - c`; the last entry is the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn load_objective(&mut self, cost: &[Rational]) {
        let w = self.width;
        let mut obj: Vec<Rational> = cost.iter().map(|c| -c).collect();
        obj.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=w {
                if !row[j].is_zero() {
                    obj[j] += cb * &row[j];
                }
            }
        }
        self.obj = obj;
    }

    /// Bland's rule over columns `< limit`.
    fn simplex(&mut self, limit: usize) -> Simplex {
        let w = self.width;
        loop {
            let Some(enter) = (0..limit).find(|&j| self.obj[j].is_negative()) else {
                return Simplex::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[w] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Simplex::Unbounded(enter),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for j in 0..=w {
                if !pivot_row[j].is_zero() {
                    row[j] -= &factor * &pivot_row[j];
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        if log::log_enabled!(target: TRACE_TARGET, log::Level::Trace) {
            self.trace(&format!("pivot row {r} col {c}"));
        }
    }

    /// Pivots zero-level artificials out of the basis, dropping redundant rows.
    fn expel_artificials(&mut self, art_start: usize) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < art_start {
                i += 1;
                continue;
            }
            match (0..art_start).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }

    fn basic_solution(&self, n: usize) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < n {
                z[b] = row[self.width].clone();
            }
        }
        z
    }

    fn trace(&self, label: &str) {
        if !log::log_enabled!(target: TRACE_TARGET, log::Level::Trace) {
            return;
        }
        let mut s = format!("{label}\n");
        for (row, b) in self.rows.iter().zip(&self.basis) {
            let _ = write!(s, "  x{b:<4}|");
            for v in row {
                let _ = write!(s, " {v:>7}");
            }
            s.push('\n');
        }
        let _ = write!(s, "  obj  |");
        for v in &self.obj {
            let _ = write!(s, " {v:>7}");
        }
        log::trace!(target: TRACE_TARGET, "{s}");
    }
}

impl std::fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms = |coeffs: &[Rational]| {
            let parts: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| format!("{c}*x{j}"))
                .collect();
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join(" + ")
            }
        };
        writeln!(f, "maximize {}", terms(&self.objective))?;
        for c in &self.constraints {
            writeln!(f, "  {} {} {}", terms(&c.coeffs), c.relation.symbol(), c.rhs)?;
        }
        for j in 0..self.num_vars() {
            let l = self.lower[j].as_ref().map_or("-inf".into(), |v| v.to_string());
            let u = self.upper[j].as_ref().map_or("+inf".into(), |v| v.to_string());
            writeln!(f, "  {l} <= x{j} <= {u}")?;
        }
        Ok(())
    }
}
