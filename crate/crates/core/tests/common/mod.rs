#![allow(dead_code)]

use std::sync::Arc;

use mfloor_core::cone::{ConeMode, MarketCone};
use mfloor_core::lp::Relation;
use mfloor_core::prob::{pow2, FiniteProbSpace, RandomVariable, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

/// Unique solution of the square system `a x = b`, or `None` if singular.
pub fn gauss_solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (entry, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *entry -= &factor * p;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

pub struct Row {
    pub coeffs: Vec<Rational>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Row {
    pub fn new(coeffs: Vec<Rational>, rel: Relation, rhs: Rational) -> Self {
        Row { coeffs, rel, rhs }
    }

    fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        match self.rel {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

fn combinations(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Minimum of `objective . x` over the vertices of `{x free : rows}`, found by
/// solving every square subsystem of rows taken as equalities. Only valid when
/// the minimum is attained at a vertex (bounded, pointed feasible set).
pub fn vertex_min(objective: &[Rational], rows: &[Row]) -> Option<(Rational, Vec<Rational>)> {
    let n = objective.len();
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    combinations(rows.len(), n, &mut |pick| {
        let a = pick.iter().map(|&i| rows[i].coeffs.clone()).collect();
        let b = pick.iter().map(|&i| rows[i].rhs.clone()).collect();
        let Some(x) = gauss_solve(a, b) else { return };
        if !rows.iter().all(|r| r.holds(&x)) {
            return;
        }
        let v: Rational = objective.iter().zip(&x).map(|(c, xi)| c * xi).sum();
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, x));
        }
    });
    best
}

/// Rows of the floor LP in `g`-space: `g >= f`, polar rows, and `g >= 0` for
/// cones minus positives.
pub fn floor_rows(cone: &MarketCone, f: &RandomVariable) -> Vec<Row> {
    let space = cone.space();
    let n = space.len();
    let unit = |i: usize| {
        let mut r = vec![Rational::zero(); n];
        r[i] = Rational::one();
        r
    };
    let mut rows: Vec<Row> = (0..n)
        .map(|i| Row::new(unit(i), Relation::Ge, f.value(i).clone()))
        .collect();
    let rel = if cone.mode() == ConeMode::Subspace {
        Relation::Eq
    } else {
        Relation::Le
    };
    for g in cone.generators() {
        let coeffs = (0..n).map(|i| space.prob(i) * g.value(i)).collect();
        rows.push(Row::new(coeffs, rel, Rational::zero()));
    }
    if cone.mode() == ConeMode::ConeMinusPositives {
        rows.extend((0..n).map(|i| Row::new(unit(i), Relation::Ge, Rational::zero())));
    }
    rows
}

/// Probabilities `2^-k` from random binary splits of the unit mass.
pub fn dyadic_space<R: Rng>(rng: &mut R, atoms: usize) -> Arc<FiniteProbSpace> {
    let mut depths = vec![0i64];
    while depths.len() < atoms {
        let i = rng.gen_range(0..depths.len());
        depths[i] += 1;
        let d = depths[i];
        depths.push(d);
    }
    depths.shuffle(rng);
    FiniteProbSpace::from_probs(depths.into_iter().map(|d| pow2(-d)).collect()).unwrap()
}

/// `k / 2^e` with `|k| <= max` and `e` in `0..=2`.
pub fn dyadic<R: Rng>(rng: &mut R, max: i64) -> Rational {
    Rational::from_integer(rng.gen_range(-max..=max).into()) * pow2(-rng.gen_range(0..=2))
}

pub fn dyadic_vector<R: Rng>(rng: &mut R, space: &Arc<FiniteProbSpace>, max: i64) -> RandomVariable {
    let values = (0..space.len()).map(|_| dyadic(rng, max)).collect();
    RandomVariable::new(space, values).unwrap()
}

pub fn random_market<R: Rng>(
    rng: &mut R,
    max_atoms: usize,
    max_gens: usize,
    mode: ConeMode,
) -> (MarketCone, RandomVariable) {
    let atoms = rng.gen_range(1..=max_atoms);
    let space = dyadic_space(rng, atoms);
    let gens = (0..rng.gen_range(0..=max_gens))
        .map(|_| dyadic_vector(rng, &space, 4))
        .collect();
    let cone = MarketCone::new(&space, gens, mode).unwrap();
    let f = dyadic_vector(rng, &space, 4);
    (cone, f)
}

pub const MODES: [ConeMode; 3] = [ConeMode::Cone, ConeMode::Subspace, ConeMode::ConeMinusPositives];

/// Random strictly positive eps sequence of length `1..=max_len` with dyadic entries.
pub fn random_eps<R: Rng>(rng: &mut R, max_len: usize) -> mfloor_core::orlicz::EpsSequence {
    let k = rng.gen_range(1..=max_len);
    let eps = (0..k).map(|_| Rational::new(rng.gen_range(1..=16).into(), 16.into())).collect();
    mfloor_core::orlicz::EpsSequence::new(eps).unwrap()
}

/// Random N-function: flat on `[0, t0]` with `t0 <= 1`, then `knots` convex segments.
pub fn random_nfunction<R: Rng>(rng: &mut R) -> mfloor_core::orlicz::NFunction {
    let q = |n: i64, d: i64| Rational::new(n.into(), d.into());
    let t0 = q(rng.gen_range(1..=4), 4);
    let mut pts = vec![(Rational::zero(), Rational::zero()), (t0.clone(), Rational::zero())];
    let (mut t, mut v, mut slope) = (t0, Rational::zero(), Rational::zero());
    for _ in 0..rng.gen_range(0..=3) {
        slope += q(rng.gen_range(1..=8), 4);
        let step = q(rng.gen_range(1..=4), 2);
        v += &slope * &step;
        t += step;
        pts.push((t.clone(), v.clone()));
    }
    let tail = &slope + q(rng.gen_range(0..=4), 2);
    mfloor_core::orlicz::NFunction::new(pts, tail, q(rng.gen_range(1..=4), 4)).unwrap()
}

/// Random step function on a random dyadic space with values `k / 4`, `|k| < 4 * bound`.
pub fn random_step<R: Rng>(rng: &mut R, max_atoms: usize, bound: i64) -> RandomVariable {
    let atoms = rng.gen_range(1..=max_atoms);
    let space = dyadic_space(rng, atoms);
    let values = (0..space.len())
        .map(|_| Rational::new(rng.gen_range(-4 * bound + 1..4 * bound).into(), 4.into()))
        .collect();
    RandomVariable::new(&space, values).unwrap()
}

/// `P(|x| >= k) <= eps_k` for `k = 1..K`.
pub fn in_eps_neighbourhoods(x: &RandomVariable, eps: &mfloor_core::orlicz::EpsSequence) -> bool {
    let ax = x.abs();
    eps.values()
        .iter()
        .enumerate()
        .all(|(i, e)| ax.tail_probability(&Rational::from_integer((i as i64 + 1).into())) <= *e)
}

/// Runs `trials` checks of the tail implication for `eps_to_nfunction`.
/// Returns how many accepted draws reach `|x| >= 1` somewhere, i.e. are not
/// trivially inside every neighbourhood.
pub fn tail_implication_trials(seed: u64, trials: usize) -> Result<usize, String> {
    use mfloor_core::orlicz::{eps_to_nfunction, modular};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut nontrivial) = (0, 0);
    while done < trials {
        let eps = random_eps(&mut rng, 5);
        let phi = eps_to_nfunction(&eps);
        let x = random_step(&mut rng, 8, eps.len() as i64 + 2);
        if modular(&x, &phi, &Rational::one()).unwrap() > Rational::one() {
            continue;
        }
        done += 1;
        if x.abs().max_value() >= Rational::one() {
            nontrivial += 1;
        }
        if !in_eps_neighbourhoods(&x, &eps) {
            return Err(format!("tail bound fails: eps {eps:?} x {x:?}"));
        }
    }
    Ok(nontrivial)
}

/// Runs `trials` checks of the modular bound for `nfunction_to_eps`.
/// Returns how many accepted draws reach `|x| >= 1` somewhere.
pub fn modular_bound_trials(seed: u64, trials: usize) -> Result<usize, String> {
    use mfloor_core::orlicz::{modular, modular_bound, nfunction_to_eps};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut done, mut nontrivial) = (0, 0);
    while done < trials {
        let phi = random_nfunction(&mut rng);
        let k = rng.gen_range(1..=5);
        let eps = nfunction_to_eps(&phi, k).unwrap();
        // levels past K are unconstrained, so stay below K + 1
        let x = random_step(&mut rng, 8, k as i64 + 1);
        if !in_eps_neighbourhoods(&x, &eps) {
            continue;
        }
        done += 1;
        if x.abs().max_value() >= Rational::one() {
            nontrivial += 1;
        }
        let m = modular(&x, &phi, &Rational::one()).unwrap();
        if m > modular_bound(&phi, k) {
            return Err(format!("modular {m} over bound: phi {phi:?} x {x:?}"));
        }
    }
    Ok(nontrivial)
}
