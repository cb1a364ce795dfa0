//! Python bindings: groups, subsets and sumsets, Fourier transforms, Bohr
//! sets, Weyl averages, the counterexample parameters and a generic entry
//! point running any command-line subcommand.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sumsetlab::bohr::BohrSpec as CoreBohr;
use sumsetlab::config::ExperimentConfig;
use sumsetlab::counterexample::ExampleParameters;
use sumsetlab::frequency::Frequency;
use sumsetlab::hartman::HartmanSequence;
use sumsetlab::means::{mean_fourier_coefficient, Indicator, MeanApproximator};
use sumsetlab::rules::SetRule;
use sumsetlab::sumset as core_sumset;
use sumsetlab::{spectral, FiniteAbelianGroup, GroupFunction, GroupSubset, LabError};

create_exception!(sumsetlab, SumsetLabError, PyException);

fn err(e: LabError) -> PyErr {
    SumsetLabError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = LabError>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn from_json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A finite abelian group `Z_{n_1} x ... x Z_{n_k}`, written like `"Z2xZ6"`.
#[pyclass(frozen, name = "Group")]
struct Group(FiniteAbelianGroup);

#[pymethods]
impl Group {
    #[new]
    fn new(literal: &str) -> PyResult<Self> {
        Ok(Group(parse(literal)?))
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn orders(&self) -> Vec<usize> {
        self.0.orders().to_vec()
    }

    /// Coordinates of the element with flat index `i`.
    fn element(&self, i: usize) -> PyResult<Vec<usize>> {
        if i >= self.0.size() {
            return Err(err(LabError::Domain(format!("index {i} outside the group"))));
        }
        Ok(self.0.element_at(i).coords().to_vec())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Group('{}')", self.0)
    }
}

fn subset(g: &Group, literal: &str) -> PyResult<GroupSubset> {
    GroupSubset::parse(&g.0, literal).map_err(err)
}

fn function(g: &Group, values: Vec<Complex64>) -> PyResult<GroupFunction> {
    GroupFunction::new(g.0.clone(), values).map_err(err)
}

/// Normalized transform `fhat(chi) = |G|^{-1} sum_x f(x) conj(chi(x))`.
#[pyfunction]
fn dft(group: &Group, values: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    Ok(spectral::dft(&function(group, values)?).coefficients().to_vec())
}

/// `(f * g)(x) = |G|^{-1} sum_y f(y) g(x - y)`.
#[pyfunction]
fn convolve(group: &Group, f: Vec<Complex64>, g: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    let h = spectral::convolve(&function(group, f)?, &function(group, g)?).map_err(err)?;
    Ok(h.values().to_vec())
}

/// Flat indices of `A + B`; subsets are literals like `"{0,2,4}"`.
#[pyfunction]
fn sumset(group: &Group, a: &str, b: &str) -> PyResult<Vec<usize>> {
    Ok(core_sumset::sumset(&subset(group, a)?, &subset(group, b)?).map_err(err)?.indices())
}

/// Flat indices where `1_A * 1_B` is positive.
#[pyfunction]
fn steinhaus_level_set(group: &Group, a: &str, b: &str) -> PyResult<Vec<usize>> {
    let s = core_sumset::steinhaus_level_set(&subset(group, a)?, &subset(group, b)?).map_err(err)?;
    Ok(s.indices())
}

/// The stabilizer certificate of `A + B` as a dict.
#[pyfunction]
fn kneser_certificate<'py>(py: Python<'py>, group: &Group, a: &str, b: &str) -> PyResult<Bound<'py, PyAny>> {
    let cert = core_sumset::kneser_certificate(&subset(group, a)?, &subset(group, b)?).map_err(err)?;
    from_json(py, &sumsetlab::report::to_sorted_json(&cert).map_err(err)?)
}

/// Members of a set rule such as `"mod(6,1,3)"` in `[lo, hi]`.
#[pyfunction]
fn members(rule: &str, lo: i64, hi: i64) -> PyResult<Vec<i64>> {
    let bits = parse::<SetRule>(rule)?.materialize(lo, hi).map_err(err)?;
    Ok(bits.iter_ones().map(|i| lo + i as i64).collect())
}

/// A Bohr set `{x : ||theta_i x - theta_i c|| < eps}`, written like
/// `"bohr(theta=1/3,0.414;eps=0.1)"`.
#[pyclass(frozen, name = "BohrSpec")]
struct BohrSpec(CoreBohr);

#[pymethods]
impl BohrSpec {
    #[new]
    fn new(literal: &str) -> PyResult<Self> {
        Ok(BohrSpec(parse(literal)?))
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.0.eps()
    }

    fn contains(&self, x: i64) -> bool {
        self.0.contains(x)
    }

    /// `(floor(1/eps) + 1)^-d`.
    fn density_lower_bound(&self) -> f64 {
        self.0.density_lower_bound()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("BohrSpec('{}')", self.0)
    }
}

/// `N^{-1} sum_{n <= N} e(theta a_n)` for a sequence like `"pow(2.5)"`.
#[pyfunction]
fn weyl_average(seq: &str, theta: &str, n: u64) -> PyResult<Complex64> {
    let s: HartmanSequence = parse(seq)?;
    sumsetlab::hartman::weyl_average(&s, &parse::<Frequency>(theta)?, n).map_err(err)
}

/// Mean of `1_A(x) e(-theta x)` over `[0, depth - 1]`.
#[pyfunction]
fn mean_coefficient(rule: &str, theta: &str, depth: usize) -> PyResult<Complex64> {
    let f = Indicator::new(parse(rule)?);
    let m = MeanApproximator::folner(sumsetlab::density::FolnerFamily::Initial, depth).map_err(err)?;
    Ok(mean_fourier_coefficient(&f, &m, &parse(theta)?).map_err(err)?.value)
}

/// The sequences `(a_n, b_n)` of the block construction.
#[pyfunction]
#[pyo3(signature = (a1 = 10, policy = "b:19/10,a:3n", depth = 6))]
fn example_parameters(a1: u64, policy: &str, depth: usize) -> PyResult<(Vec<u64>, Vec<u64>)> {
    let p = ExampleParameters::build(a1, parse(policy)?, depth).map_err(err)?;
    Ok((p.a, p.b))
}

/// Runs a subcommand such as `"group kneser"` with flags given as a dict and
/// returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (command, params = None))]
fn run<'py>(py: Python<'py>, command: &str, params: Option<&Bound<'py, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    let mut c = ExperimentConfig::new(command);
    if let Some(p) = params {
        let text: String = py.import("json")?.call_method1("dumps", (p,))?.extract()?;
        c.merge_file(&text).map_err(err)?;
    }
    let report = py.detach(|| sumsetlab::commands::execute(&c)).map_err(err)?;
    from_json(py, &report.to_json().map_err(err)?)
}

#[pymodule]
#[pyo3(name = "sumsetlab")]
fn sumsetlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SumsetLabError", m.py().get_type::<SumsetLabError>())?;
    m.add("__version__", sumsetlab::report::VERSION)?;
    m.add_class::<Group>()?;
    m.add_class::<BohrSpec>()?;
    m.add_function(wrap_pyfunction!(dft, m)?)?;
    m.add_function(wrap_pyfunction!(convolve, m)?)?;
    m.add_function(wrap_pyfunction!(sumset, m)?)?;
    m.add_function(wrap_pyfunction!(steinhaus_level_set, m)?)?;
    m.add_function(wrap_pyfunction!(kneser_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(members, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_average, m)?)?;
    m.add_function(wrap_pyfunction!(mean_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(example_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
