//! Python bindings.
//!
//! Rationals cross the boundary as `fractions.Fraction` (ints and strings
//! such as `"7/2"` are accepted on input; floats are refused so that exact
//! results stay exact). Grid fields are nested lists indexed `[i1][i2]`.

use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyFloat, PyList};

use holoq::exact::{interpolate, LambdaPoly, LambdaRat, Rational};
use holoq::geometry::presets::preset_metric;
use holoq::geometry::{ConformalMetric, Field, GridGeometry, Primitive, StencilOrder, TorusChart};
use holoq::holographic::{holo_coeffs, q2, q4_direct, q4_holographic, NumericContext};
use holoq::hypergeom::{hyper_terminating, HyperSpec};
use holoq::report::QuantitiesReport;
use holoq::sphere::{c_n, SphereContext};
use holoq::suites::{self, HypergeomParams, NumericParams, SphereParams};

fn err(e: holoq::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<PyFloat>() {
        return Err(PyTypeError::new_err("floats are not exact; pass an int, a Fraction or a string like '7/2'"));
    }
    let s = obj.str()?.to_string();
    s.trim().parse().map_err(|_| PyValueError::new_err(format!("not a rational: {s:?}")))
}

fn to_rationals(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Rational>> {
    objs.iter().map(to_rational).collect()
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((r.to_string(),))
}

fn fractions<'py>(py: Python<'py>, rs: &[Rational]) -> PyResult<Vec<Bound<'py, PyAny>>> {
    rs.iter().map(|r| fraction(py, r)).collect()
}

fn json_value<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Polynomial in λ with exact rational coefficients, lowest degree first.
#[pyclass(name = "LambdaPoly", module = "holoq", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLambdaPoly(LambdaPoly);

#[pymethods]
impl PyLambdaPoly {
    #[new]
    fn new(coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        Ok(Self(LambdaPoly::new(to_rationals(&coeffs)?)))
    }

    /// The polynomial `λ`.
    #[staticmethod]
    fn lam() -> Self {
        Self(LambdaPoly::lambda())
    }

    fn coeffs<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        fractions(py, self.0.coeffs())
    }

    /// `None` for the zero polynomial.
    fn degree(&self) -> Option<usize> {
        self.0.degree()
    }

    fn eval<'py>(&self, py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.eval(&to_rational(x)?))
    }

    fn eval_float(&self, x: f64) -> f64 {
        self.0.eval_f64(x)
    }

    fn derivative(&self) -> Self {
        Self(self.0.derivative())
    }

    /// Distinct rational roots.
    fn roots<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let mut r = self.0.rational_roots();
        r.sort();
        fractions(py, &r)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("LambdaPoly({})", self.0)
    }
}

/// Rational function in λ, kept reduced with a monic denominator.
#[pyclass(name = "LambdaRat", module = "holoq", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyLambdaRat(LambdaRat);

#[pymethods]
impl PyLambdaRat {
    #[new]
    #[pyo3(signature = (numer, denom=None))]
    fn new(numer: Vec<Bound<'_, PyAny>>, denom: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let num = LambdaPoly::new(to_rationals(&numer)?);
        let den = match denom {
            Some(d) => LambdaPoly::new(to_rationals(&d)?),
            None => LambdaPoly::one(),
        };
        LambdaRat::new(num, den).map(Self).map_err(err)
    }

    #[staticmethod]
    fn lam() -> Self {
        Self(LambdaRat::lambda())
    }

    #[getter]
    fn numer(&self) -> PyLambdaPoly {
        PyLambdaPoly(self.0.numer().clone())
    }

    #[getter]
    fn denom(&self) -> PyLambdaPoly {
        PyLambdaPoly(self.0.denom().clone())
    }

    /// Exact value; raises `ValueError` at a pole.
    fn eval<'py>(&self, py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.eval(&to_rational(x)?).map_err(err)?)
    }

    fn eval_float(&self, x: f64) -> f64 {
        self.0.eval_f64(x)
    }

    fn poles<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        let mut p = self.0.poles();
        p.sort();
        fractions(py, &p)
    }

    fn derivative(&self) -> Self {
        Self(self.0.derivative())
    }

    fn is_polynomial(&self) -> bool {
        self.0.as_poly().is_some()
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    fn __truediv__(&self, other: &Self) -> PyResult<Self> {
        if other.0.is_zero() {
            return Err(pyo3::exceptions::PyZeroDivisionError::new_err("division by the zero function"));
        }
        Ok(Self(&self.0 / &other.0))
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("LambdaRat({})", self.0)
    }
}

/// Exact constant-curvature quantities on `Sⁿ`, or on an Einstein constant
/// mode with the given `J` (an extension beyond the round sphere).
#[pyclass(name = "SphereContext", module = "holoq", frozen)]
struct PySphere(SphereContext);

#[pymethods]
impl PySphere {
    #[new]
    #[pyo3(signature = (n, j=None))]
    fn new(n: i64, j: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        let ctx = match j {
            Some(j) => SphereContext::einstein(n, to_rational(j)?),
            None => SphereContext::new(n),
        };
        ctx.map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> i64 {
        self.0.n()
    }

    #[getter]
    fn j<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.j())
    }

    /// Holographic coefficient `v_{2N}`.
    fn v<'py>(&self, py: Python<'py>, big_n: usize) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.v(big_n))
    }

    /// `T_{2N}(λ)(1)`.
    fn t_on_one(&self, big_n: usize) -> PyLambdaRat {
        PyLambdaRat(self.0.t_on_one(big_n))
    }

    /// `P_{2N}(λ)(1)`.
    fn p_on_one(&self, big_n: usize) -> PyLambdaPoly {
        PyLambdaPoly(self.0.p_on_one(big_n))
    }

    fn sum_tstar_v(&self, big_n: usize) -> PyLambdaRat {
        PyLambdaRat(self.0.sum_tstar_v(big_n))
    }

    fn weighted_sum(&self, big_n: usize) -> PyLambdaRat {
        PyLambdaRat(self.0.weighted_sum(big_n))
    }

    /// The Q-curvature polynomial in λ.
    fn qres(&self, big_n: usize) -> PyResult<PyLambdaPoly> {
        self.0.qres(big_n).map(PyLambdaPoly).map_err(err)
    }

    fn v_poly(&self, big_n: usize) -> PyResult<PyLambdaPoly> {
        self.0.v_poly(big_n).map(PyLambdaPoly).map_err(err)
    }

    /// `Q_{2N}` from the operator families.
    fn q<'py>(&self, py: Python<'py>, big_n: usize) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.q(big_n).map_err(err)?)
    }

    fn q_closed<'py>(&self, py: Python<'py>, big_n: usize) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.q_closed(big_n))
    }

    /// Every exact check at order `N`, as a list of dicts.
    fn checks<'py>(&self, py: Python<'py>, big_n: usize) -> PyResult<Bound<'py, PyAny>> {
        let text = serde_json::to_string(&self.0.checks(big_n)).map_err(|e| PyValueError::new_err(e.to_string()))?;
        json_value(py, &text)
    }

    fn __repr__(&self) -> String {
        format!("SphereContext(n={}, j={})", self.0.n(), self.0.j())
    }
}

fn field_to_rows(f: &Field) -> Vec<Vec<f64>> {
    let (_, n2) = f.shape();
    f.values().chunks(n2).map(|r| r.to_vec()).collect()
}

fn rows_to_field(chart: &TorusChart, rows: Vec<Vec<f64>>) -> PyResult<Field> {
    let (n1, n2) = chart.shape();
    if rows.len() != n1 || rows.iter().any(|r| r.len() != n2) {
        return Err(PyValueError::new_err(format!("expected a {n1}×{n2} nested list")));
    }
    Field::from_vec(n1, n2, rows.concat()).map_err(err)
}

/// Conformally flat metric `e^{2φ}δ` on an `n`-torus whose conformal factor
/// depends on two coordinates, sampled on a square grid.
#[pyclass(name = "Geometry", module = "holoq", frozen)]
struct PyGeometry(NumericContext);

#[pymethods]
impl PyGeometry {
    /// Either a named preset (`flat`, `const`, `trig1`, `trig2`, `random`) or
    /// an explicit `phi` given as a `size × size` nested list.
    #[new]
    #[pyo3(signature = (n, size=64, preset="trig1", seed=7, phi=None, order=12))]
    fn new(n: usize, size: usize, preset: &str, seed: u64, phi: Option<Vec<Vec<f64>>>, order: usize) -> PyResult<Self> {
        let order = StencilOrder::try_from(order).map_err(err)?;
        let chart = TorusChart::square(n, size).map_err(err)?.with_order(order);
        let metric = match phi {
            Some(rows) => {
                let f = rows_to_field(&chart, rows)?;
                ConformalMetric::custom(chart, f).map_err(err)?
            }
            None => preset_metric(&chart, preset, seed).map_err(err)?,
        };
        Ok(Self(NumericContext::new(GridGeometry::new(metric))))
    }

    #[getter]
    fn n(&self) -> i64 {
        self.0.n()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.0.geom().chart().shape()
    }

    fn phi(&self) -> Vec<Vec<f64>> {
        field_to_rows(self.0.geom().metric().phi())
    }

    /// Schouten trace `J`.
    fn j(&self) -> Vec<Vec<f64>> {
        field_to_rows(self.0.geom().j())
    }

    /// `|P|²`.
    fn psq(&self) -> Vec<Vec<f64>> {
        field_to_rows(self.0.geom().psq())
    }

    fn q2(&self) -> Vec<Vec<f64>> {
        field_to_rows(&q2(self.0.geom()))
    }

    fn q4_direct(&self) -> Vec<Vec<f64>> {
        field_to_rows(&q4_direct(self.0.geom()))
    }

    /// `Q₄` from the holographic formula; needs `n ≥ 4`.
    fn q4_holographic(&self) -> PyResult<Vec<Vec<f64>>> {
        q4_holographic(&self.0).map(|f| field_to_rows(&f)).map_err(err)
    }

    /// Holographic coefficient `v_{2k}` for `k ≤ 2`.
    fn v(&self, k: usize) -> PyResult<Vec<Vec<f64>>> {
        let c = holo_coeffs(self.0.geom());
        c.v(k).map(field_to_rows).map_err(err)
    }

    fn laplacian(&self, f: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
        let g = self.0.geom();
        let f = rows_to_field(g.chart(), f)?;
        g.apply(Primitive::Lap, &f).map(|r| field_to_rows(&r)).map_err(err)
    }

    /// `∫ f h vol` with the grid quadrature.
    fn inner(&self, f: Vec<Vec<f64>>, h: Vec<Vec<f64>>) -> PyResult<f64> {
        let g = self.0.geom();
        let (f, h) = (rows_to_field(g.chart(), f)?, rows_to_field(g.chart(), h)?);
        g.inner(&f, &h).map_err(err)
    }
}

/// Suite result: checks plus metadata.
#[pyclass(name = "Report", module = "holoq", frozen)]
struct PyReport(QuantitiesReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> usize {
        self.0.passed()
    }

    #[getter]
    fn failed(&self) -> usize {
        self.0.failed()
    }

    fn all_passed(&self) -> bool {
        self.0.all_passed()
    }

    /// Every check as a dict.
    fn checks<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let text = serde_json::to_string(&self.0.checks).map_err(|e| PyValueError::new_err(e.to_string()))?;
        json_value(py, &text)
    }

    fn failures<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let out = PyList::empty(py);
        for c in self.0.checks.iter().filter(|c| !c.passed) {
            out.append(&c.id)?;
        }
        Ok(out)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn to_markdown(&self) -> String {
        self.0.to_markdown()
    }

    fn __len__(&self) -> usize {
        self.0.checks.len()
    }

    fn __repr__(&self) -> String {
        format!("Report({} checks, {} failed)", self.0.checks.len(), self.0.failed())
    }
}

/// `c_N` of the holographic formula.
#[pyfunction]
fn holographic_constant<'py>(py: Python<'py>, big_n: usize) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &c_n(big_n).map_err(err)?)
}

/// Exact value of a terminating `pFq(upper; lower; x)`.
#[pyfunction]
#[pyo3(signature = (upper, lower, x=None))]
fn hyper<'py>(
    py: Python<'py>,
    upper: Vec<Bound<'py, PyAny>>,
    lower: Vec<Bound<'py, PyAny>>,
    x: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let arg = match x {
        Some(x) => to_rational(x)?,
        None => Rational::from_integer(1.into()),
    };
    let spec = HyperSpec::new(to_rationals(&upper)?, to_rationals(&lower)?, arg);
    fraction(py, &hyper_terminating(&spec).map_err(err)?)
}

/// Lagrange interpolation through `(x, y)` pairs with distinct `x`.
#[pyfunction]
fn interpolate_exact(points: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>) -> PyResult<PyLambdaPoly> {
    let pts = points.iter().map(|(x, y)| Ok((to_rational(x)?, to_rational(y)?))).collect::<PyResult<Vec<_>>>()?;
    interpolate(&pts).map(PyLambdaPoly).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n_min=3, n_max=12, big_n_max=6))]
fn sphere_suite(py: Python<'_>, n_min: i64, n_max: i64, big_n_max: usize) -> PyResult<PyReport> {
    let p = SphereParams { n_min, n_max, big_n_max, einstein: Vec::new() };
    py.detach(|| suites::sphere_suite(&p)).map(PyReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (instances=200, seed=1))]
fn hypergeom_suite(py: Python<'_>, instances: usize, seed: u64) -> PyReport {
    let p = HypergeomParams { instances, seed, ..HypergeomParams::default() };
    PyReport(py.detach(|| suites::hypergeom_suite(&p)))
}

fn numeric_params(grid: usize, presets: Option<Vec<String>>, seed: u64) -> NumericParams {
    let mut p = NumericParams { grid, seed, ..NumericParams::default() };
    p.coarse_grid = Some(grid / 2).filter(|&c| c >= 16);
    if let Some(ps) = presets {
        p.presets = ps;
    }
    p
}

#[pyfunction]
#[pyo3(signature = (dims=vec![4, 6], grid=64, presets=None, seed=7))]
fn numeric_suite(py: Python<'_>, dims: Vec<usize>, grid: usize, presets: Option<Vec<String>>, seed: u64) -> PyResult<PyReport> {
    let p = NumericParams { dims, ..numeric_params(grid, presets, seed) };
    py.detach(|| suites::numeric_suite(&p)).map(PyReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (grid=64, presets=None, seed=7))]
fn critical_suite(py: Python<'_>, grid: usize, presets: Option<Vec<String>>, seed: u64) -> PyResult<PyReport> {
    let p = numeric_params(grid, presets, seed);
    py.detach(|| suites::critical_suite(&p)).map(PyReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (grid=64, presets=None, seed=7))]
fn conformal_suite(py: Python<'_>, grid: usize, presets: Option<Vec<String>>, seed: u64) -> PyResult<PyReport> {
    let p = numeric_params(grid, presets, seed);
    py.detach(|| suites::conformal_suite(&p)).map(PyReport).map_err(err)
}

#[pymodule]
#[pyo3(name = "holoq")]
fn holoq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLambdaPoly>()?;
    m.add_class::<PyLambdaRat>()?;
    m.add_class::<PySphere>()?;
    m.add_class::<PyGeometry>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(holographic_constant, m)?)?;
    m.add_function(wrap_pyfunction!(hyper, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate_exact, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_suite, m)?)?;
    m.add_function(wrap_pyfunction!(hypergeom_suite, m)?)?;
    m.add_function(wrap_pyfunction!(numeric_suite, m)?)?;
    m.add_function(wrap_pyfunction!(critical_suite, m)?)?;
    m.add_function(wrap_pyfunction!(conformal_suite, m)?)?;
    Ok(())
}
