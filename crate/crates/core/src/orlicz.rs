//! N-functions, the Luxemburg norm, and the constructions that translate
//! between tail-probability sequences `(eps_k)` and N-functions.
//!
//! An [`NFunction`] is stored as a convex piecewise-linear body that is flat
//! on `[0, t0]`, followed by a quadratic tail. Both limit conditions
//! (`phi(t)/t -> 0` at zero and `-> infinity` at infinity) then hold by
//! construction and evaluation stays exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{int, rat, RandomVariable, Rational};
use crate::serde_rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NFunctionRepr", into = "NFunctionRepr")]
pub struct NFunction {
    knots: Vec<(Rational, Rational)>,
    tail_slope: Rational,
    tail_quad: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NFunctionRepr {
    #[serde(with = "serde_rational::pairs")]
    knots: Vec<(Rational, Rational)>,
    #[serde(with = "serde_rational::one")]
    tail_slope: Rational,
    #[serde(with = "serde_rational::one")]
    tail_quad: Rational,
}

impl TryFrom<NFunctionRepr> for NFunction {
    type Error = Error;

    fn try_from(r: NFunctionRepr) -> Result<Self> {
        NFunction::new(r.knots, r.tail_slope, r.tail_quad)
    }
}

impl From<NFunction> for NFunctionRepr {
    fn from(n: NFunction) -> Self {
        NFunctionRepr {
            knots: n.knots,
            tail_slope: n.tail_slope,
            tail_quad: n.tail_quad,
        }
    }
}

impl NFunction {
    /// `knots` must start `(0,0), (t0,0)` with `t0 > 0`; slopes must strictly
    /// increase; beyond the last knot `phi(t) = phi_last + s d + q d^2` with
    /// `d = t - t_last`, `s >= last slope` and `q > 0`.
    pub fn new(
        knots: Vec<(Rational, Rational)>,
        tail_slope: Rational,
        tail_quad: Rational,
    ) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidNFunction(m.to_string()));
        if knots.len() < 2 {
            return bad("need at least the knots (0,0) and (t0,0)");
        }
        if !knots[0].0.is_zero() || !knots[0].1.is_zero() {
            return bad("first knot must be (0,0)");
        }
        if !knots[1].0.is_positive() || !knots[1].1.is_zero() {
            return bad("second knot must be (t0,0) with t0 > 0");
        }
        let mut last_slope = Rational::zero();
        for (i, w) in knots.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return bad("knot abscissae must strictly increase");
            }
            let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            if i > 0 && slope <= last_slope {
                return bad("slopes must strictly increase");
            }
            last_slope = slope;
        }
        if tail_slope < last_slope {
            return bad("tail slope below the last segment slope");
        }
        if !tail_quad.is_positive() {
            return bad("tail curvature must be positive");
        }
        Ok(Self {
            knots,
            tail_slope,
            tail_quad,
        })
    }

    pub fn knots(&self) -> &[(Rational, Rational)] {
        &self.knots
    }

    pub fn tail_slope(&self) -> &Rational {
        &self.tail_slope
    }

    pub fn tail_quad(&self) -> &Rational {
        &self.tail_quad
    }

    /// `phi` vanishes on `[0, t0]`.
    pub fn initial_flat(&self) -> &Rational {
        &self.knots[1].0
    }

    pub fn evaluate(&self, t: &Rational) -> Result<Rational> {
        if t.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "N-function evaluated at negative {t}"
            )));
        }
        Ok(self.eval_nonneg(t))
    }

    fn eval_nonneg(&self, t: &Rational) -> Rational {
        if t <= self.initial_flat() {
            return Rational::zero();
        }
        let (tl, vl) = self.knots.last().expect("validated nonempty");
        if t >= tl {
            let d = t - tl;
            return vl + &self.tail_slope * &d + &self.tail_quad * &d * &d;
        }
        let k = self.knots.partition_point(|(x, _)| x <= t);
        let (x0, y0) = &self.knots[k - 1];
        let (x1, y1) = &self.knots[k];
        y0 + (y1 - y0) * (t - x0) / (x1 - x0)
    }
}

/// A finite positive sequence `eps_1..eps_K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsSequence(Vec<Rational>);

impl EpsSequence {
    pub fn new(eps: Vec<Rational>) -> Result<Self> {
        if let Some(e) = eps.iter().find(|e| !e.is_positive()) {
            return Err(Error::InvalidArgument(format!(
                "eps entries must be positive, got {e}"
            )));
        }
        Ok(Self(eps))
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `eps_k`, 1-based.
    pub fn get(&self, k: usize) -> Option<&Rational> {
        k.checked_sub(1).and_then(|i| self.0.get(i))
    }
}

/// `sum_i p_i phi(|x_i| / lambda)`.
pub fn modular(x: &RandomVariable, phi: &NFunction, lambda: &Rational) -> Result<Rational> {
    if !lambda.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "modular needs lambda > 0, got {lambda}"
        )));
    }
    Ok(x.space()
        .probs()
        .iter()
        .zip(x.values())
        .filter(|(_, v)| !v.is_zero())
        .map(|(p, v)| p * phi.eval_nonneg(&(v.abs() / lambda)))
        .sum())
}

/// Exact test of `||x||_phi <= 1`, i.e. `modular(x, phi, 1) <= 1`.
pub fn in_unit_ball(x: &RandomVariable, phi: &NFunction) -> bool {
    modular(x, phi, &Rational::one()).is_ok_and(|m| m <= Rational::one())
}

/// Interval containing the Luxemburg norm.
///
/// For `x != 0`: `modular(x, phi, hi) <= 1 < modular(x, phi, lo)`.
/// For `x = 0` both ends are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormBracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl NormBracket {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn scaled(&self, a: &Rational) -> Self {
        Self {
            lo: &self.lo * a,
            hi: &self.hi * a,
        }
    }
}

pub fn luxemburg_norm(x: &RandomVariable, phi: &NFunction, tol: &Rational) -> Result<NormBracket> {
    if !tol.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let top = x.abs().max_value();
    if top.is_zero() {
        return Ok(NormBracket {
            lo: Rational::zero(),
            hi: Rational::zero(),
        });
    }
    let one = Rational::one();
    let two = int(2);
    // |x| / hi <= t0 everywhere, so the modular vanishes at hi.
    let mut hi = &top / phi.initial_flat();
    let mut lo = &hi / &two;
    while modular(x, phi, &lo)? <= one {
        hi = lo.clone();
        lo /= &two;
    }
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        if modular(x, phi, &mid)? <= one {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(NormBracket { lo, hi })
}

/// An N-function with `phi(t) >= max_{i<=k} 1/eps_i` for `t >= k`.
///
/// Flat on `[0, 1/2]`, knots at the integers `1..K`: the value at `k` is the
/// larger of the staircase level `max_{i<=k} 1/eps_i` and the value forced by
/// convexity (continuing the previous segment). Collinear knots are merged
/// and the tail continues with the last slope plus unit curvature.
pub fn eps_to_nfunction(eps: &EpsSequence) -> NFunction {
    let mut points = vec![(Rational::zero(), Rational::zero()), (rat(1, 2), Rational::zero())];
    let mut level = Rational::zero();
    let mut slope = Rational::zero();
    for (i, e) in eps.values().iter().enumerate() {
        let k = int(i as i64 + 1);
        level = level.max(e.recip());
        let (pt, pv) = points.last().cloned().expect("nonempty");
        let continued = &pv + &slope * (&k - &pt);
        let v = level.clone().max(continued);
        slope = (&v - &pv) / (&k - &pt);
        points.push((k, v));
    }
    if eps.is_empty() {
        points.push((int(1), int(1)));
        slope = int(2);
    }
    NFunction::new(merge_collinear(points), slope, Rational::one())
        .expect("greedy construction is convex")
}

fn merge_collinear(points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let slope = |a: &(Rational, Rational), b: &(Rational, Rational)| (&b.1 - &a.1) / (&b.0 - &a.0);
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        if out.len() >= 3 {
            let n = out.len();
            if slope(&out[n - 2], &out[n - 1]) == slope(&out[n - 1], &p) {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

/// `eps_k = k^-2 / phi(k+1)` for `k = 1..K`.
pub fn nfunction_to_eps(phi: &NFunction, k_max: usize) -> Result<EpsSequence> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let eps = (1..=k_max)
        .map(|k| {
            let v = phi.eval_nonneg(&int(k as i64 + 1));
            if v.is_zero() {
                return Err(Error::InvalidArgument(format!(
                    "phi({}) = 0: initial flat too wide for k = {k}",
                    k + 1
                )));
            }
            let k2 = BigInt::from(k) * BigInt::from(k);
            Ok(Rational::from_integer(k2).recip() / v)
        })
        .collect::<Result<Vec<_>>>()?;
    EpsSequence::new(eps)
}

/// `phi(1) + sum_{k<=K} k^-2`, the modular bound for `x` in every `U_{eps_k}`.
pub fn modular_bound(phi: &NFunction, k_max: usize) -> Rational {
    let s: Rational = (1..=k_max as i64).map(|k| rat(1, k * k)).sum();
    phi.eval_nonneg(&Rational::one()) + s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::FiniteProbSpace;

    fn flat_then_linear() -> NFunction {
        // 0 on [0,1], slope 1 up to phi(2) = 1.
        NFunction::new(
            vec![(int(0), int(0)), (int(1), int(0)), (int(2), int(1))],
            int(1),
            int(1),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let z = || (int(0), int(0));
        assert!(NFunction::new(vec![z()], int(1), int(1)).is_err());
        assert!(NFunction::new(vec![z(), (int(0), int(0))], int(1), int(1)).is_err());
        assert!(NFunction::new(vec![z(), (int(1), int(0))], int(1), int(0)).is_err());
        // slopes 1 then 1: not strictly increasing
        assert!(NFunction::new(
            vec![z(), (int(1), int(0)), (int(2), int(1)), (int(3), int(2))],
            int(1),
            int(1)
        )
        .is_err());
        // tail slope below last slope
        assert!(NFunction::new(vec![z(), (int(1), int(0)), (int(2), int(3))], int(2), int(1)).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let phi = flat_then_linear();
        assert_eq!(phi.evaluate(&int(0)).unwrap(), int(0));
        assert_eq!(phi.evaluate(&rat(1, 2)).unwrap(), int(0));
        assert_eq!(phi.evaluate(&rat(3, 2)).unwrap(), rat(1, 2));
        // tail: 1 + 1*d + d^2 at d = 3/2
        assert_eq!(phi.evaluate(&rat(7, 2)).unwrap(), rat(19, 4));
        assert!(phi.evaluate(&int(-1)).is_err());
    }

    #[test]
    fn modular_examples() {
        let s = FiniteProbSpace::uniform(2).unwrap();
        let phi = NFunction::new(
            vec![(int(0), int(0)), (rat(1, 2), int(0)), (int(1), int(1))],
            int(2),
            int(1),
        )
        .unwrap();
        let x = RandomVariable::from_ints(&s, &[2, 2]).unwrap();
        assert_eq!(modular(&x, &phi, &int(2)).unwrap(), int(1));
        assert_eq!(modular(&RandomVariable::zero(&s), &phi, &int(1)).unwrap(), int(0));
        assert_eq!(modular(&x, &phi, &int(4)).unwrap(), int(0));
        assert!(modular(&x, &phi, &int(0)).is_err());
    }

    #[test]
    fn unit_ball_membership_for_constants() {
        let s = FiniteProbSpace::uniform(3).unwrap();
        let phi = flat_then_linear();
        for (c, inside) in [(rat(1, 1), true), (int(2), true), (rat(201, 100), false), (int(5), false)] {
            let x = RandomVariable::constant(&s, c);
            assert_eq!(in_unit_ball(&x, &phi), inside);
        }
    }

    #[test]
    fn luxemburg_bracket() {
        let s = FiniteProbSpace::uniform(2).unwrap();
        let phi = flat_then_linear();
        let x = RandomVariable::from_ints(&s, &[3, 3]).unwrap();
        let tol = rat(1, 1000);
        let b = luxemburg_norm(&x, &phi, &tol).unwrap();
        assert!(b.width() <= tol);
        assert!(modular(&x, &phi, &b.hi).unwrap() <= int(1));
        assert!(modular(&x, &phi, &b.lo).unwrap() > int(1));
        // phi(3/lambda) = 1 at lambda = 3/2.
        assert!(b.lo < rat(3, 2) && rat(3, 2) <= b.hi);

        let zero = luxemburg_norm(&RandomVariable::zero(&s), &phi, &tol).unwrap();
        assert_eq!(zero.hi, int(0));
        assert!(luxemburg_norm(&x, &phi, &int(0)).is_err());

        let b2 = luxemburg_norm(&x.scale(&int(2)), &phi, &(&tol * int(2))).unwrap();
        assert_eq!(b2, b.scaled(&int(2)));
    }

    #[test]
    fn eps_to_nfunction_examples() {
        let eps = EpsSequence::new(vec![rat(1, 2), rat(1, 4)]).unwrap();
        let phi = eps_to_nfunction(&eps);
        assert!(phi.evaluate(&int(1)).unwrap() >= int(2));
        assert!(phi.evaluate(&int(2)).unwrap() >= int(4));
        assert_eq!(phi.initial_flat(), &rat(1, 2));

        let ones = EpsSequence::new(vec![int(1); 5]).unwrap();
        let phi = eps_to_nfunction(&ones);
        for k in 1..=5 {
            assert!(phi.evaluate(&int(k)).unwrap() >= int(1));
        }
        assert!(EpsSequence::new(vec![int(1), int(0)]).is_err());
    }

    #[test]
    fn nfunction_to_eps_examples() {
        // phi(t) = t^2 beyond t = 1 via the tail (knots end at (1,0)).
        let phi = NFunction::new(vec![(int(0), int(0)), (int(1), int(0))], int(0), int(1)).unwrap();
        let eps = nfunction_to_eps(&phi, 3).unwrap();
        // phi(k+1) = k^2 here, so eps_k = k^-4.
        assert_eq!(eps.values(), &[int(1), rat(1, 16), rat(1, 81)]);
        assert_eq!(nfunction_to_eps(&phi, 1).unwrap().len(), 1);
        assert!(nfunction_to_eps(&phi, 0).is_err());

        let wide = NFunction::new(vec![(int(0), int(0)), (int(5), int(0))], int(0), int(1)).unwrap();
        assert!(nfunction_to_eps(&wide, 2).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let phi = flat_then_linear();
        let s = serde_json::to_string(&phi).unwrap();
        assert_eq!(
            s,
            r#"{"knots":[["0","0"],["1","0"],["2","1"]],"tail_slope":"1","tail_quad":"1"}"#
        );
        let back: NFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, phi);
        let bad = r#"{"knots":[["0","0"],["1","0"]],"tail_slope":"1","tail_quad":"0"}"#;
        assert!(serde_json::from_str::<NFunction>(bad).is_err());
        let extra = r#"{"knots":[["0","0"],["1","0"]],"tail_slope":"1","tail_quad":"1","x":1}"#;
        assert!(serde_json::from_str::<NFunction>(extra).is_err());
    }
}
