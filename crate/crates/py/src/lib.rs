//! Python bindings. Rationals cross the boundary as `fractions.Fraction`;
//! inputs may be `Fraction`, `int` or `"p/q"` strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use mfloor_core::cone::{ConeMode, MarketCone, TruncationSpec};
use mfloor_core::domination::{self, SupValue};
use mfloor_core::lp;
use mfloor_core::market_file::{load_market, Market, MarketFile};
use mfloor_core::markets::{self, DensityRule};
use mfloor_core::orlicz::{self, EpsSequence, NFunction};
use mfloor_core::prob::{parse_rational, FiniteProbSpace, RandomVariable, Rational};
use mfloor_core::report::{analyze, example1_rows};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<pyo3::types::PyFloat>() {
        return Err(value_error("floats are not accepted; pass a Fraction, int or \"p/q\" string"));
    }
    parse_rational(&obj.str()?.to_cow()?).map_err(value_error)
}

fn to_rationals(items: &Bound<'_, PyAny>) -> PyResult<Vec<Rational>> {
    items.try_iter()?.map(|x| to_rational(&x?)).collect()
}

fn fraction<'py>(py: Python<'py>, x: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((x.to_string(),))
}

fn fractions<'py>(py: Python<'py>, xs: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = xs.iter().map(|x| fraction(py, x)).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn optional_vector<'py>(py: Python<'py>, x: Option<&RandomVariable>) -> PyResult<Bound<'py, PyAny>> {
    match x {
        Some(v) => Ok(fractions(py, v.values())?.into_any()),
        None => Ok(py.None().into_bound(py)),
    }
}

fn optional_scalar<'py>(py: Python<'py>, x: Option<&Rational>) -> PyResult<Bound<'py, PyAny>> {
    match x {
        Some(v) => fraction(py, v),
        None => Ok(py.None().into_bound(py)),
    }
}

fn parse_phi(text: &str) -> PyResult<NFunction> {
    serde_json::from_str(text).map_err(value_error)
}

/// A finite market: probability space, trading cone and floor `f`.
#[pyclass(name = "Market", module = "mfloor", frozen)]
struct PyMarket {
    inner: Market,
}

#[pymethods]
impl PyMarket {
    /// `mode` is `cone`, `subspace` or `cone_minus_positives`.
    #[new]
    #[pyo3(signature = (probs, generators, f, mode = "cone", labels = None))]
    fn new(
        probs: &Bound<'_, PyAny>,
        generators: &Bound<'_, PyAny>,
        f: &Bound<'_, PyAny>,
        mode: &str,
        labels: Option<Vec<String>>,
    ) -> PyResult<Self> {
        let probs = to_rationals(probs)?;
        let labels = labels.unwrap_or_else(|| (0..probs.len()).map(|i| format!("w{i}")).collect());
        let space = FiniteProbSpace::new(labels, probs).map_err(value_error)?;
        let gens = generators
            .try_iter()?
            .map(|g| RandomVariable::new(&space, to_rationals(&g?)?).map_err(value_error))
            .collect::<PyResult<Vec<_>>>()?;
        let mode: ConeMode = mode.parse().map_err(value_error)?;
        let cone = MarketCone::new(&space, gens, mode).map_err(value_error)?;
        let f = RandomVariable::new(&space, to_rationals(f)?).map_err(value_error)?;
        Ok(Self {
            inner: Market {
                cone,
                f,
                truncation: TruncationSpec::UnitBall,
                candidates: Vec::new(),
            },
        })
    }

    /// Parses a market file.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: load_market(text).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        MarketFile::from_market(&self.inner).to_json()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.cone.space().labels().to_vec()
    }

    #[getter]
    fn probs<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, self.inner.cone.space().probs())
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.cone.mode().as_str()
    }

    #[getter]
    fn f<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, self.inner.f.values())
    }

    #[getter]
    fn generators<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let rows = self
            .inner
            .cone
            .generators()
            .iter()
            .map(|g| fractions(py, g.values()))
            .collect::<PyResult<Vec<_>>>()?;
        PyList::new(py, rows)
    }

    fn contains(&self, x: &Bound<'_, PyAny>) -> PyResult<bool> {
        let x = RandomVariable::new(self.inner.cone.space(), to_rationals(x)?).map_err(value_error)?;
        self.inner.cone.contains(&x).map_err(value_error)
    }

    /// `(holds, witness)`; the witness is `None` when no arbitrage exists.
    fn no_arbitrage<'py>(&self, py: Python<'py>) -> PyResult<(bool, Bound<'py, PyAny>)> {
        let na = self.inner.cone.no_arbitrage_check().map_err(value_error)?;
        Ok((na.holds, optional_vector(py, na.witness.as_ref())?))
    }

    /// Sup of `<x, f>` over gains whose negative part lies in the unit ball,
    /// in `P(x^- >= k) <= eps_k`, or in the Luxemburg ball of `phi` (JSON).
    /// `None` means unbounded.
    #[pyo3(signature = (eps = None, phi = None))]
    fn sup<'py>(
        &self,
        py: Python<'py>,
        eps: Option<&Bound<'_, PyAny>>,
        phi: Option<&str>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let trunc = match (eps, phi) {
            (None, None) => TruncationSpec::UnitBall,
            (Some(e), None) => TruncationSpec::EpsSequence(EpsSequence::new(to_rationals(e)?).map_err(value_error)?),
            (None, Some(p)) => TruncationSpec::Orlicz(parse_phi(p)?),
            (Some(_), Some(_)) => return Err(value_error("pass at most one of eps and phi")),
        };
        let m = &self.inner;
        let r = domination::sup_over_truncation(&m.cone, &m.f, &trunc, &m.candidates).map_err(value_error)?;
        match r.value {
            SupValue::Finite(v) => fraction(py, &v),
            SupValue::Unbounded => Ok(py.None().into_bound(py)),
        }
    }

    /// Keys: `g`, `min_l1_norm`, `sup_c1`, `certificate`.
    fn dominating_density<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = domination::find_dominating_density(&self.inner.cone, &self.inner.f).map_err(value_error)?;
        let d = PyDict::new(py);
        d.set_item("g", optional_vector(py, r.dominating_g.as_ref())?)?;
        d.set_item("min_l1_norm", optional_scalar(py, r.min_l1_norm.as_ref())?)?;
        d.set_item("sup_c1", optional_scalar(py, r.sup_c1.finite())?)?;
        d.set_item("certificate", optional_vector(py, r.certificate.as_ref())?)?;
        Ok(d)
    }

    fn duality_check(&self) -> PyResult<bool> {
        domination::duality_check(&self.inner.cone, &self.inner.f).map_err(value_error)
    }

    /// The `check` report and its exit code; `format` is `text` or `json`.
    #[pyo3(signature = (format = "text"))]
    fn report(&self, format: &str) -> PyResult<(String, i32)> {
        let r = analyze(&self.inner).map_err(value_error)?;
        let text = match format {
            "text" => r.to_text(),
            "json" => r.to_json().to_string(),
            other => return Err(value_error(format!("unknown format {other:?}"))),
        };
        Ok((text, r.verdict().exit_code()))
    }

    fn __repr__(&self) -> String {
        let c = &self.inner.cone;
        format!(
            "Market(atoms={}, generators={}, mode={:?})",
            c.space().len(),
            c.generators().len(),
            c.mode().as_str()
        )
    }
}

/// Two states per pair with `S_1 = (1, -2^-n)`; `rule` is `ones`,
/// `ones-odd` or `geometric-odd`.
#[pyfunction]
#[pyo3(signature = (level, rule = "ones-odd"))]
fn example2(level: usize, rule: &str) -> PyResult<PyMarket> {
    let m = markets::build_example2(level).map_err(value_error)?;
    let rule: DensityRule = rule.parse().map_err(value_error)?;
    let f = m.density(&rule, Rational::from_integer(0.into()));
    Ok(PyMarket {
        inner: Market {
            cone: m.cone,
            f,
            truncation: TruncationSpec::UnitBall,
            candidates: Vec::new(),
        },
    })
}

/// `N` assets `2^n 1_{B_n} - 1_{A_n}` with the floor `f`.
#[pyfunction]
fn example3(level: usize) -> PyResult<PyMarket> {
    let m = markets::build_example3(level).map_err(value_error)?;
    Ok(PyMarket {
        inner: Market {
            cone: m.cone,
            f: m.f,
            truncation: TruncationSpec::UnitBall,
            candidates: Vec::new(),
        },
    })
}

/// Rows `{n, eps, pairing, formula, tails}` for `eps_n = 2^-n`, `n = 1..level`.
#[pyfunction]
fn example1_table<'py>(py: Python<'py>, level: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let seq = markets::build_example1(markets::dyadic_eps(level)).map_err(value_error)?;
    example1_rows(&seq)
        .map_err(value_error)?
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("eps", fraction(py, &r.eps)?)?;
            d.set_item("pairing", fraction(py, &r.pairing)?)?;
            d.set_item("formula", fraction(py, &r.formula)?)?;
            d.set_item("tails", fractions(py, &r.tails)?)?;
            Ok(d)
        })
        .collect()
}

/// N-function (as JSON) with `phi(t) >= max_{i<=k} 1/eps_i` for `t >= k`.
#[pyfunction]
fn eps_to_phi(eps: &Bound<'_, PyAny>) -> PyResult<String> {
    let eps = EpsSequence::new(to_rationals(eps)?).map_err(value_error)?;
    serde_json::to_string(&orlicz::eps_to_nfunction(&eps)).map_err(value_error)
}

/// `eps_k = k^-2 / phi(k+1)` for `k = 1..k_max`.
#[pyfunction]
fn phi_to_eps<'py>(py: Python<'py>, phi: &str, k_max: usize) -> PyResult<Bound<'py, PyList>> {
    let eps = orlicz::nfunction_to_eps(&parse_phi(phi)?, k_max).map_err(value_error)?;
    fractions(py, eps.values())
}

#[pyfunction]
fn evaluate_phi<'py>(py: Python<'py>, phi: &str, t: &Bound<'_, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let v = parse_phi(phi)?.evaluate(&to_rational(t)?).map_err(value_error)?;
    fraction(py, &v)
}

/// Bracket `(lo, hi)` around the Luxemburg norm; uniform weights by default.
#[pyfunction]
#[pyo3(signature = (phi, values, probs = None, tol = None))]
fn luxemburg_norm<'py>(
    py: Python<'py>,
    phi: &str,
    values: &Bound<'_, PyAny>,
    probs: Option<&Bound<'_, PyAny>>,
    tol: Option<&Bound<'_, PyAny>>,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let values = to_rationals(values)?;
    let space = match probs {
        Some(p) => FiniteProbSpace::from_probs(to_rationals(p)?),
        None => FiniteProbSpace::uniform(values.len()),
    }
    .map_err(value_error)?;
    let x = RandomVariable::new(&space, values).map_err(value_error)?;
    let tol = match tol {
        Some(t) => to_rational(t)?,
        None => Rational::new(1.into(), 1000.into()),
    };
    let b = orlicz::luxemburg_norm(&x, &parse_phi(phi)?, &tol).map_err(value_error)?;
    Ok((fraction(py, &b.lo)?, fraction(py, &b.hi)?))
}

/// `(solved, rejected)` over every LP solved in this process.
#[pyfunction]
fn audit_counts() -> (usize, usize) {
    lp::audit_counts()
}

#[pymodule]
fn mfloor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMarket>()?;
    m.add_function(wrap_pyfunction!(example2, m)?)?;
    m.add_function(wrap_pyfunction!(example3, m)?)?;
    m.add_function(wrap_pyfunction!(example1_table, m)?)?;
    m.add_function(wrap_pyfunction!(eps_to_phi, m)?)?;
    m.add_function(wrap_pyfunction!(phi_to_eps, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_phi, m)?)?;
    m.add_function(wrap_pyfunction!(luxemburg_norm, m)?)?;
    m.add_function(wrap_pyfunction!(audit_counts, m)?)?;
    Ok(())
}
