//! Finite truncations of the three counterexample markets.
//!
//! * [`build_example1`]: the witness sequence `x_n = n` off a shrinking window
//!   around `1/2` and `-n` on it, on a discretized `[0, 1]`. The cone of that
//!   example needs a purely finitely additive measure; only a point-mass
//!   stand-in is offered.
//! * [`build_example2`]: one risky asset on `N` pairs of states
//!   `(2n-1, 2n)`, traded with a portfolio fixed on each pair, plus a residual
//!   atom carrying the untruncated mass.
//! * [`build_example3`]: `N` assets `x_n = 2^n 1_{B_n} - 1_{A_n}` with
//!   events `A_n` (independent given `[0, 1/2]`) and disjoint intervals `B_n`.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cone::{ConeMode, MarketCone};
use crate::error::{Error, Result};
use crate::prob::{int, pow2, rat, AtomPartition, FiniteProbSpace, RandomVariable, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Example1,
    Example2,
    Example3,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(FamilyKind::Example1),
            "example2" => Ok(FamilyKind::Example2),
            "example3" => Ok(FamilyKind::Example3),
            other => Err(Error::InvalidArgument(format!("unknown example {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedFamily {
    pub kind: FamilyKind,
    pub level: usize,
}

impl TruncatedFamily {
    pub fn new(kind: FamilyKind, level: usize) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("truncation level must be >= 1".into()));
        }
        Ok(Self { kind, level })
    }
}

fn check_level(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("truncation level must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// A floor on the pair atoms of the two-state-per-pair market, indexed by
/// the state `k = 1..2N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DensityRule {
    /// `f = 1` on every state.
    Ones,
    /// `f(2n-1) = 1`, `f(2n) = 0`.
    OnesOdd,
    /// `f(2n-1) = 2^-n`, `f(2n) = 0`.
    GeometricOdd,
    /// Explicit values for states `1..=len`; missing states get zero.
    Table(Vec<Rational>),
}

impl DensityRule {
    pub fn value(&self, state: usize) -> Rational {
        let n = state.div_ceil(2) as i64;
        let odd = state % 2 == 1;
        match self {
            DensityRule::Ones => Rational::one(),
            DensityRule::OnesOdd if odd => Rational::one(),
            DensityRule::GeometricOdd if odd => pow2(-n),
            DensityRule::Table(v) => v.get(state - 1).cloned().unwrap_or_else(Rational::zero),
            _ => Rational::zero(),
        }
    }
}

impl FromStr for DensityRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ones" => Ok(DensityRule::Ones),
            "ones-odd" => Ok(DensityRule::OnesOdd),
            "geometric-odd" => Ok(DensityRule::GeometricOdd),
            other => Err(Error::InvalidArgument(format!(
                "unknown density rule {other:?} (expected ones, ones-odd, geometric-odd)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Example2Market {
    pub level: usize,
    pub space: Arc<FiniteProbSpace>,
    /// Pair blocks `{2n-1, 2n}` and the residual atom.
    pub partition: AtomPartition,
    pub cone: MarketCone,
    /// Price at time 1; the price at time 0 is zero.
    pub s1: RandomVariable,
}

impl Example2Market {
    /// Atom index (0-based) of state `k` (1-based); the residual atom is last.
    pub fn atom(&self, state: usize) -> usize {
        state - 1
    }

    pub fn residual_atom(&self) -> usize {
        2 * self.level
    }

    pub fn density(&self, rule: &DensityRule, residual: Rational) -> RandomVariable {
        let mut values: Vec<Rational> = (1..=2 * self.level).map(|k| rule.value(k)).collect();
        values.push(residual);
        RandomVariable::new(&self.space, values).expect("2N+1 values")
    }
}

pub fn build_example2(level: usize) -> Result<Example2Market> {
    check_level(level)?;
    let mut labels = Vec::with_capacity(2 * level + 1);
    let mut probs = Vec::with_capacity(2 * level + 1);
    for n in 1..=level {
        let p = pow2(-(n as i64) - 1);
        labels.push(format!("s{}", 2 * n - 1));
        labels.push(format!("s{}", 2 * n));
        probs.push(p.clone());
        probs.push(p);
    }
    labels.push("residual".into());
    probs.push(pow2(-(level as i64)));
    let space = FiniteProbSpace::new(labels, probs)?;

    let mut s1 = vec![Rational::zero(); 2 * level + 1];
    for n in 1..=level {
        s1[2 * n - 2] = Rational::one();
        s1[2 * n - 1] = -pow2(-(n as i64));
    }
    let s1 = RandomVariable::new(&space, s1)?;
    let generators = (1..=level)
        .map(|n| {
            let pair = [2 * n - 2, 2 * n - 1];
            let on_pair = RandomVariable::indicator(&space, |i| pair.contains(&i));
            s1.mul(&on_pair)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut blocks: Vec<Vec<usize>> = (1..=level).map(|n| vec![2 * n - 2, 2 * n - 1]).collect();
    blocks.push(vec![2 * level]);
    let partition = AtomPartition::new(2 * level + 1, blocks)?;
    let cone = MarketCone::new(&space, generators, ConeMode::Subspace)?;
    Ok(Example2Market {
        level,
        space,
        partition,
        cone,
        s1,
    })
}

/// `g(2n-1) = max{f(2n-1), 2^-n f(2n)}`, `g(2n) = 2^n g(2n-1)`, and `g = f`
/// on the residual atom.
pub fn example2_g(market: &Example2Market, f: &RandomVariable) -> Result<RandomVariable> {
    if !f.is_nonnegative() {
        return Err(Error::InvalidArgument("the explicit density needs f >= 0".into()));
    }
    let mut g = f.values().to_vec();
    for n in 1..=market.level {
        let (odd, even) = (2 * n - 2, 2 * n - 1);
        let scaled = f.value(even) * pow2(-(n as i64));
        let lo = f.value(odd).clone().max(scaled);
        g[even] = &lo * pow2(n as i64);
        g[odd] = lo;
    }
    RandomVariable::new(market.space(), g)
}

impl Example2Market {
    pub fn space(&self) -> &Arc<FiniteProbSpace> {
        &self.space
    }
}

#[derive(Debug, Clone)]
pub struct Example3Market {
    pub level: usize,
    pub space: Arc<FiniteProbSpace>,
    pub cone: MarketCone,
    pub f: RandomVariable,
    /// Atom indices making up `A_n`, for `n = 1..N`.
    pub a_sets: Vec<Vec<usize>>,
    /// Atom index of `B_n`, for `n = 1..N`.
    pub b_atoms: Vec<usize>,
}

/// Atoms, in order: the joint outcomes of `(xi_2..xi_N)` inside `[0, 1/2]`
/// (`xi_1 = 1` surely, so its zero-probability branch is omitted), then
/// `B_1..B_N`, then `(b_N, 5/6]`, then `(5/6, 1]`.
pub fn build_example3(level: usize) -> Result<Example3Market> {
    check_level(level)?;
    let n_events = level;
    // P(xi_n = 1) = 2^-(n-1)
    let mut labels = Vec::new();
    let mut probs = Vec::new();
    let mut membership: Vec<Vec<bool>> = Vec::new();
    let combos = 1usize << (n_events - 1);
    for mask in 0..combos {
        let mut p = rat(1, 2);
        let mut bits = vec![true];
        for n in 2..=n_events {
            let on = mask >> (n - 2) & 1 == 1;
            let q = pow2(-(n as i64 - 1));
            p *= if on { q } else { Rational::one() - q };
            bits.push(on);
        }
        let tag: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        labels.push(format!("A{tag}"));
        probs.push(p);
        membership.push(bits);
    }
    let a_count = labels.len();
    for n in 1..=level {
        labels.push(format!("B{n}"));
        probs.push(pow2(-2 * n as i64));
    }
    labels.push("gap".into());
    probs.push(pow2(-2 * level as i64) / int(3));
    labels.push("top".into());
    probs.push(rat(1, 6));
    let space = FiniteProbSpace::new(labels, probs)?;

    let a_sets: Vec<Vec<usize>> = (0..n_events)
        .map(|n| (0..a_count).filter(|&i| membership[i][n]).collect())
        .collect();
    let b_atoms: Vec<usize> = (0..level).map(|n| a_count + n).collect();
    let generators = (1..=level)
        .map(|n| {
            let mut v = vec![Rational::zero(); space.len()];
            v[b_atoms[n - 1]] = pow2(n as i64);
            for &i in &a_sets[n - 1] {
                v[i] = -Rational::one();
            }
            RandomVariable::new(&space, v)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut f = vec![Rational::one(); space.len()];
    for (n, &b) in b_atoms.iter().enumerate() {
        f[b] = pow2(n as i64 + 1);
    }
    f[a_count + level] = Rational::zero();
    let f = RandomVariable::new(&space, f)?;
    let cone = MarketCone::new(&space, generators, ConeMode::Subspace)?;
    Ok(Example3Market {
        level,
        space,
        cone,
        f,
        a_sets,
        b_atoms,
    })
}

#[derive(Debug, Clone)]
pub struct Example1Sequence {
    pub space: Arc<FiniteProbSpace>,
    pub eps: Vec<Rational>,
    /// `x_1..x_M`.
    pub xs: Vec<RandomVariable>,
}

impl Example1Sequence {
    /// The innermost window, inside every `|t - 1/2| < eps_n / 2`.
    pub fn mid_atom(&self) -> usize {
        self.eps.len()
    }

    /// Finite stand-in for the cone `{x : int x d(P + mu) <= 0}`: `mu` is
    /// replaced by a unit point mass on the innermost atom, so the cone is the
    /// half-space `{x : E[x] + x(mid) <= 0}`. It is generated by
    /// `+-(a_mid e_i - a_i e_mid)` minus the positive orthant, where `a` is the
    /// normal vector.
    pub fn point_mass_cone(&self) -> Result<MarketCone> {
        let n = self.space.len();
        let mid = self.mid_atom();
        let a: Vec<Rational> = (0..n)
            .map(|i| {
                let p = self.space.prob(i).clone();
                if i == mid {
                    p + Rational::one()
                } else {
                    p
                }
            })
            .collect();
        let mut gens = Vec::with_capacity(2 * (n - 1));
        for i in (0..n).filter(|&i| i != mid) {
            let mut v = vec![Rational::zero(); n];
            v[i] = a[mid].clone();
            v[mid] = -a[i].clone();
            let y = RandomVariable::new(&self.space, v)?;
            gens.push(y.neg());
            gens.push(y);
        }
        MarketCone::new(&self.space, gens, ConeMode::ConeMinusPositives)
    }
}

/// `eps` must be strictly decreasing with entries in `(0, 1)`. The atoms are
/// the `2M + 1` pieces of `[0, 1]` cut out by the windows
/// `|t - 1/2| < eps_n / 2`, ordered left to right.
pub fn build_example1(eps: Vec<Rational>) -> Result<Example1Sequence> {
    let m = eps.len();
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one eps".into()));
    }
    if eps.iter().any(|e| !e.is_positive() || *e >= Rational::one()) {
        return Err(Error::InvalidArgument("eps entries must lie in (0, 1)".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps must be strictly decreasing".into()));
    }
    let half = rat(1, 2);
    // depth d: the piece lies inside windows 1..=d (d = 0 is outside all)
    let mut pieces: Vec<(String, Rational, usize)> = Vec::with_capacity(2 * m + 1);
    pieces.push(("L0".into(), (Rational::one() - &eps[0]) * &half, 0));
    for d in 1..m {
        pieces.push((format!("L{d}"), (&eps[d - 1] - &eps[d]) * &half, d));
    }
    pieces.push(("mid".into(), eps[m - 1].clone(), m));
    for d in (1..m).rev() {
        pieces.push((format!("R{d}"), (&eps[d - 1] - &eps[d]) * &half, d));
    }
    pieces.push(("R0".into(), (Rational::one() - &eps[0]) * &half, 0));

    let depths: Vec<usize> = pieces.iter().map(|p| p.2).collect();
    let (labels, probs): (Vec<String>, Vec<Rational>) =
        pieces.into_iter().map(|(l, p, _)| (l, p)).unzip();
    let space = FiniteProbSpace::new(labels, probs)?;
    let xs = (1..=m)
        .map(|n| {
            let level = Rational::from_integer(BigInt::from(n));
            let values = depths
                .iter()
                .map(|&d| if d >= n { -&level } else { level.clone() })
                .collect();
            RandomVariable::new(&space, values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Example1Sequence { space, eps, xs })
}

/// `eps_n = 2^-n` for `n = 1..M`.
pub fn dyadic_eps(m: usize) -> Vec<Rational> {
    (1..=m as i64).map(|n| pow2(-n)).collect()
}
