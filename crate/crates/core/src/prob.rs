//! Finite atomic probability spaces and random variables on them.
//!
//! Everything here is exact: probabilities and values are arbitrary
//! precision rationals, and atom order fixes the vector layout of every
//! random variable built on a space.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::ParseRational(s.to_string()));
    }
    Rational::from_str(t).map_err(|_| Error::ParseRational(s.to_string()))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^e` for any sign of `e`.
pub fn pow2(e: i64) -> Rational {
    let m = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(m)
    } else {
        Rational::new(BigInt::one(), m)
    }
}

/// Decimal rendering with six significant digits.
pub fn approx(x: &Rational) -> String {
    let v = x.to_f64().unwrap_or(f64::NAN);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let digits = (5 - mag).max(0) as usize;
        format!("{v:.digits$}")
    } else {
        format!("{v:.5e}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteProbSpace {
    labels: Vec<String>,
    probs: Vec<Rational>,
}

impl FiniteProbSpace {
    pub fn new(labels: Vec<String>, probs: Vec<Rational>) -> Result<Arc<Self>> {
        if labels.len() != probs.len() {
            return Err(Error::Dimension {
                expected: labels.len(),
                found: probs.len(),
            });
        }
        if labels.is_empty() {
            return Err(Error::InvalidSpace("no atoms".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate atom label {l:?}")));
            }
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_positive()) {
            return Err(Error::InvalidSpace(format!(
                "atom {:?} has non-positive probability {p}",
                labels[i]
            )));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidSpace(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Arc::new(Self { labels, probs }))
    }

    /// Atoms labelled `w1..wn`.
    pub fn from_probs(probs: Vec<Rational>) -> Result<Arc<Self>> {
        let labels = (1..=probs.len()).map(|i| format!("w{i}")).collect();
        Self::new(labels, probs)
    }

    pub fn uniform(n: usize) -> Result<Arc<Self>> {
        let p = Rational::new(BigInt::one(), BigInt::from(n));
        Self::from_probs(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> &Rational {
        &self.probs[i]
    }
}

/// An element of L^\infty = L^1 on a finite space.
#[derive(Clone)]
pub struct RandomVariable {
    space: Arc<FiniteProbSpace>,
    values: Vec<Rational>,
}

impl fmt::Debug for RandomVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.values.iter().map(|v| v.to_string()))
            .finish()
    }
}

impl PartialEq for RandomVariable {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl Eq for RandomVariable {}

pub(crate) fn same_space(a: &Arc<FiniteProbSpace>, b: &Arc<FiniteProbSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl RandomVariable {
    pub fn new(space: &Arc<FiniteProbSpace>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Dimension {
                expected: space.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            space: Arc::clone(space),
            values,
        })
    }

    pub fn from_ints(space: &Arc<FiniteProbSpace>, values: &[i64]) -> Result<Self> {
        Self::new(space, values.iter().map(|&v| int(v)).collect())
    }

    pub fn constant(space: &Arc<FiniteProbSpace>, c: Rational) -> Self {
        Self {
            space: Arc::clone(space),
            values: vec![c; space.len()],
        }
    }

    pub fn zero(space: &Arc<FiniteProbSpace>) -> Self {
        Self::constant(space, Rational::zero())
    }

    /// Indicator of the atoms whose index satisfies `pred`.
    pub fn indicator(space: &Arc<FiniteProbSpace>, pred: impl Fn(usize) -> bool) -> Self {
        let values = (0..space.len())
            .map(|i| if pred(i) { Rational::one() } else { Rational::zero() })
            .collect();
        Self {
            space: Arc::clone(space),
            values,
        }
    }

    pub fn space(&self) -> &Arc<FiniteProbSpace> {
        &self.space
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Self {
        Self {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(f).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: Arc::clone(&self.space),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Atomwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|v| v * c)
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    pub fn expectation(&self) -> Rational {
        self.space
            .probs
            .iter()
            .zip(&self.values)
            .map(|(p, v)| p * v)
            .sum()
    }

    /// `<x, f> = sum_i p_i x_i f_i`.
    pub fn pairing(&self, f: &Self) -> Result<Rational> {
        self.check_same(f)?;
        Ok(self
            .space
            .probs
            .iter()
            .zip(self.values.iter().zip(&f.values))
            .map(|(p, (x, y))| p * x * y)
            .sum())
    }

    pub fn positive_part(&self) -> Self {
        self.map(|v| if v.is_positive() { v.clone() } else { Rational::zero() })
    }

    pub fn negative_part(&self) -> Self {
        self.map(|v| if v.is_negative() { -v } else { Rational::zero() })
    }

    /// `(x+, x-)` with `x = x+ - x-`.
    pub fn pos_neg_parts(&self) -> (Self, Self) {
        (self.positive_part(), self.negative_part())
    }

    pub fn conditional_expectation(&self, part: &AtomPartition) -> Result<Self> {
        if part.atom_count() != self.space.len() {
            return Err(Error::Dimension {
                expected: self.space.len(),
                found: part.atom_count(),
            });
        }
        let mut values = vec![Rational::zero(); self.values.len()];
        for block in part.blocks() {
            let mass: Rational = block.iter().map(|&i| &self.space.probs[i]).sum();
            let weighted: Rational = block
                .iter()
                .map(|&i| &self.space.probs[i] * &self.values[i])
                .sum();
            let avg = weighted / mass;
            for &i in block {
                values[i] = avg.clone();
            }
        }
        Ok(Self {
            space: Arc::clone(&self.space),
            values,
        })
    }

    /// `P(x >= k)`.
    pub fn tail_probability(&self, k: &Rational) -> Rational {
        self.space
            .probs
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| *v >= k)
            .map(|(p, _)| p.clone())
            .sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Atomwise `self >= other`.
    pub fn dominates(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.values.iter().zip(&other.values).all(|(a, b)| a >= b))
    }

    pub fn max_value(&self) -> Rational {
        self.values.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn min_value(&self) -> Rational {
        self.values.iter().min().cloned().unwrap_or_else(Rational::zero)
    }

    /// `sum_i p_i |x_i|`.
    pub fn l1_norm(&self) -> Rational {
        self.abs().expectation()
    }
}

/// A partition of the atom indices, i.e. a sub-sigma-algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomPartition {
    blocks: Vec<Vec<usize>>,
    atoms: usize,
}

impl AtomPartition {
    pub fn new(atoms: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; atoms];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidArgument("empty partition block".into()));
            }
            for &i in block {
                if i >= atoms {
                    return Err(Error::InvalidArgument(format!("atom index {i} out of range")));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidArgument(format!(
                        "atom {i} appears in two blocks"
                    )));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidArgument(format!("atom {i} is not covered")));
        }
        Ok(Self { blocks, atoms })
    }

    pub fn trivial(atoms: usize) -> Self {
        Self {
            blocks: vec![(0..atoms).collect()],
            atoms,
        }
    }

    pub fn singletons(atoms: usize) -> Self {
        Self {
            blocks: (0..atoms).map(|i| vec![i]).collect(),
            atoms,
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn atom_count(&self) -> usize {
        self.atoms
    }
}
