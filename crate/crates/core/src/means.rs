//! Means on `Z` approximated by finite averages, and the Fourier analysis
//! they support: mean Fourier coefficients, trigonometric-polynomial
//! reconstructions, truncation, and the convolution expansion of two sets.
//!
//! Every finite-depth value carries a stability delta: the distance to the
//! same quantity at half the depth.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bits::Bitset;
use crate::density::{FolnerFamily, WindowSet};
use crate::error::{LabError, Result};
use crate::frequency::{unit, Frequency};
use crate::hartman::{hartman_generate, HartmanSequence};
use crate::rules::SetRule;

const SUM_CHUNK: usize = 1 << 14;

pub(crate) fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Adds in fixed chunks, chunk sums in order: independent of thread count.
pub(crate) fn chunked_sum(values: &[Complex64]) -> Complex64 {
    values
        .par_chunks(SUM_CHUNK)
        .map(|c| c.iter().sum::<Complex64>())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
}

/// A function `Z -> C` with a known sup bound.
pub trait BoundedFunction: Send + Sync {
    fn eval(&self, x: i64) -> Complex64;

    fn sup_bound(&self) -> f64;

    fn eval_range(&self, lo: i64, hi: i64) -> Vec<Complex64> {
        (lo..=hi).into_par_iter().map(|x| self.eval(x)).collect()
    }

    fn label(&self) -> String;
}

pub struct Constant(pub Complex64);

impl BoundedFunction for Constant {
    fn eval(&self, _: i64) -> Complex64 {
        self.0
    }

    fn sup_bound(&self) -> f64 {
        self.0.norm()
    }

    fn label(&self) -> String {
        format!("const({})", self.0)
    }
}

/// `1_A` for a set rule.
pub struct Indicator {
    rule: SetRule,
}

impl Indicator {
    pub fn new(rule: SetRule) -> Self {
        Indicator { rule }
    }

    pub fn rule(&self) -> &SetRule {
        &self.rule
    }
}

fn bits_to_values(b: &Bitset) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); b.len()];
    for i in b.iter_ones() {
        v[i] = Complex64::new(1.0, 0.0);
    }
    v
}

impl BoundedFunction for Indicator {
    fn eval(&self, x: i64) -> Complex64 {
        Complex64::new(if self.rule.contains(x) { 1.0 } else { 0.0 }, 0.0)
    }

    fn sup_bound(&self) -> f64 {
        1.0
    }

    fn eval_range(&self, lo: i64, hi: i64) -> Vec<Complex64> {
        match self.rule.materialize(lo, hi) {
            Ok(b) => bits_to_values(&b),
            Err(_) => (lo..=hi).map(|x| self.eval(x)).collect(),
        }
    }

    fn label(&self) -> String {
        format!("1[{}]", self.rule)
    }
}

/// `x -> e^{2 pi i theta x}`.
pub struct Character(pub Frequency);

impl BoundedFunction for Character {
    fn eval(&self, x: i64) -> Complex64 {
        self.0.character(x)
    }

    fn sup_bound(&self) -> f64 {
        1.0
    }

    fn label(&self) -> String {
        format!("e({} x)", self.0)
    }
}

/// `sum_j c_j e^{2 pi i theta_j x}`, tabulated over one period when every
/// frequency is rational with a modest common denominator.
#[derive(Clone, Debug)]
pub struct TrigPolynomial {
    terms: Vec<(Frequency, Complex64)>,
    period: Option<(u64, Vec<Complex64>)>,
}

pub const PERIOD_CACHE_LIMIT: u64 = 1 << 20;

impl TrigPolynomial {
    pub fn new(terms: Vec<(Frequency, Complex64)>) -> Self {
        let q = terms.iter().try_fold(1u64, |acc, (t, _)| {
            let d = t.period()?;
            let g = gcd(acc, d);
            (acc / g).checked_mul(d).filter(|&v| v <= PERIOD_CACHE_LIMIT)
        });
        let mut p = TrigPolynomial { terms, period: None };
        if let Some(q) = q {
            let table = (0..q as i64).into_par_iter().map(|x| p.direct(x)).collect();
            p.period = Some((q, table));
        }
        p
    }

    pub fn terms(&self) -> &[(Frequency, Complex64)] {
        &self.terms
    }

    pub fn period(&self) -> Option<u64> {
        self.period.as_ref().map(|(q, _)| *q)
    }

    fn direct(&self, x: i64) -> Complex64 {
        self.terms.iter().map(|(t, c)| c * t.character(x)).sum()
    }

    /// Mean value: the coefficient at the trivial frequency.
    pub fn mean(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|(t, _)| t.is_trivial())
            .map(|(_, c)| *c)
            .sum()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl std::str::FromStr for TrigPolynomial {
    type Err = LabError;

    /// `c@theta` terms separated by commas, e.g. `0.5@0,0.5@1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for t in s.split(',') {
            let (c, th) = t
                .split_once('@')
                .ok_or_else(|| LabError::parse(format!("term {t:?} is not coefficient@frequency")))?;
            let c: Complex64 = c
                .trim()
                .parse()
                .map_err(|_| LabError::parse(format!("bad coefficient {c:?}")))?;
            terms.push((th.trim().parse()?, c));
        }
        Ok(TrigPolynomial::new(terms))
    }
}

impl std::fmt::Display for TrigPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(t, c)| if c.im == 0.0 { format!("{}@{t}", c.re) } else { format!("{c}@{t}") })
            .collect();
        f.write_str(&parts.join(","))
    }
}

impl BoundedFunction for TrigPolynomial {
    fn eval(&self, x: i64) -> Complex64 {
        match &self.period {
            Some((q, table)) => table[x.rem_euclid(*q as i64) as usize],
            None => self.direct(x),
        }
    }

    fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).sum()
    }

    fn label(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|(t, c)| format!("{c}*e({t} x)")).collect();
        parts.join(" + ")
    }
}

/// `psi_alpha(z)`: `z` if `|z| < alpha`, else `alpha z / |z|`.
pub fn psi(z: Complex64, alpha: f64) -> Complex64 {
    let r = z.norm();
    if r < alpha {
        z
    } else {
        z * (alpha / r)
    }
}

pub struct Truncated<'a> {
    inner: &'a dyn BoundedFunction,
    alpha: f64,
}

impl BoundedFunction for Truncated<'_> {
    fn eval(&self, x: i64) -> Complex64 {
        psi(self.inner.eval(x), self.alpha)
    }

    fn sup_bound(&self) -> f64 {
        self.alpha.min(self.inner.sup_bound())
    }

    fn eval_range(&self, lo: i64, hi: i64) -> Vec<Complex64> {
        self.inner.eval_range(lo, hi).into_iter().map(|z| psi(z, self.alpha)).collect()
    }

    fn label(&self) -> String {
        format!("psi_{}({})", self.alpha, self.inner.label())
    }
}

/// `psi_alpha o f`.
pub fn truncate(f: &dyn BoundedFunction, alpha: f64) -> Result<Truncated<'_>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(LabError::domain(format!("truncation level must be positive, got {alpha}")));
    }
    Ok(Truncated { inner: f, alpha })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApproxKind {
    Folner(FolnerFamily),
    Hartman(#[serde(serialize_with = "ser_display")] HartmanSequence),
}

fn ser_display<S: Serializer, T: std::fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Uniform averages over `F_N` or over `a_1, ..., a_N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanApproximator {
    pub kind: ApproxKind,
    pub depth: usize,
}

impl MeanApproximator {
    pub fn folner(fam: FolnerFamily, depth: usize) -> Result<Self> {
        Self::check_depth(depth)?;
        Ok(MeanApproximator {
            kind: ApproxKind::Folner(fam),
            depth,
        })
    }

    pub fn hartman(seq: HartmanSequence, depth: usize) -> Result<Self> {
        Self::check_depth(depth)?;
        Ok(MeanApproximator {
            kind: ApproxKind::Hartman(seq),
            depth,
        })
    }

    fn check_depth(depth: usize) -> Result<()> {
        if depth == 0 {
            return Err(LabError::domain("approximator depth must be at least 1"));
        }
        Ok(())
    }

    pub fn at_depth(&self, depth: usize) -> MeanApproximator {
        MeanApproximator {
            kind: self.kind.clone(),
            depth: depth.max(1),
        }
    }

    /// The sample points at this depth, each with weight `1 / count`.
    pub fn sample(&self) -> Result<Sample> {
        match &self.kind {
            ApproxKind::Folner(fam) => {
                let (lo, hi) = fam.interval(self.depth)?;
                Ok(Sample::Interval(lo, hi))
            }
            ApproxKind::Hartman(seq) => Ok(Sample::Points(hartman_generate(seq, self.depth as u64)?)),
        }
    }
}

pub enum Sample {
    Interval(i64, i64),
    Points(Vec<i64>),
}

impl Sample {
    fn values(&self, f: &dyn BoundedFunction) -> (Vec<i64>, Vec<Complex64>) {
        match self {
            Sample::Interval(lo, hi) => ((*lo..=*hi).collect(), f.eval_range(*lo, *hi)),
            Sample::Points(p) => (p.clone(), p.par_iter().map(|&x| f.eval(x)).collect()),
        }
    }
}

/// A finite-depth value with its half-depth stability delta.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    pub delta: f64,
}

fn average_against(xs: &[i64], fx: &[Complex64], theta: &Frequency) -> Complex64 {
    let prods: Vec<Complex64> = xs
        .par_iter()
        .zip(fx.par_iter())
        .map(|(&x, v)| v * theta.character(x).conj())
        .collect();
    chunked_sum(&prods) / xs.len() as f64
}

/// `m(f e^{-2 pi i theta x})` at depth `N`, with delta against depth `N/2`.
pub fn mean_fourier_coefficient(f: &dyn BoundedFunction, m: &MeanApproximator, theta: &Frequency) -> Result<Estimate> {
    let mut out = mean_fourier_coefficients(f, m, std::slice::from_ref(theta))?;
    Ok(out.pop().unwrap())
}

/// Several coefficients over one evaluation of `f` per depth.
pub fn mean_fourier_coefficients(
    f: &dyn BoundedFunction,
    m: &MeanApproximator,
    thetas: &[Frequency],
) -> Result<Vec<Estimate>> {
    let (xs, fx) = m.sample()?.values(f);
    let (hxs, hfx) = m.at_depth(m.depth / 2).sample()?.values(f);
    Ok(thetas
        .iter()
        .map(|t| {
            let value = average_against(&xs, &fx, t);
            let half = average_against(&hxs, &hfx, t);
            Estimate {
                value,
                delta: (value - half).norm(),
            }
        })
        .collect())
}

/// `m(|f|^2)` at the approximator's depth.
pub fn mean_square(f: &dyn BoundedFunction, m: &MeanApproximator) -> Result<f64> {
    let (xs, fx) = m.sample()?.values(f);
    let sq: Vec<Complex64> = fx.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
    Ok(chunked_sum(&sq).re / xs.len() as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct BrnApproximation {
    #[serde(skip)]
    pub polynomial: TrigPolynomial,
    pub frequencies: Vec<Frequency>,
    pub coefficients: Vec<Estimate>,
    pub mean_square: f64,
    /// `m(|f|^2) - sum |coeff|^2`.
    pub bessel_residual: f64,
    pub tolerance: f64,
    /// A residual below `-tolerance`: the approximator is not behaving like an FS-mean.
    pub bessel_violation: bool,
}

impl BrnApproximation {
    pub fn eval(&self, x: i64) -> Complex64 {
        self.polynomial.eval(x)
    }
}

fn check_distinct(freqs: &[Frequency]) -> Result<()> {
    let mut seen: HashMap<u64, &Frequency> = HashMap::new();
    for f in freqs {
        if let Some(prev) = seen.insert(f.theta().to_bits(), f) {
            return Err(LabError::domain(format!("frequency {f} repeats {prev}")));
        }
    }
    Ok(())
}

/// `sum_j fhat(theta_j) e^{2 pi i theta_j x}` with the Bessel diagnostic.
pub fn brn_reconstruct(f: &dyn BoundedFunction, m: &MeanApproximator, freqs: &[Frequency]) -> Result<BrnApproximation> {
    check_distinct(freqs)?;
    let coefficients = mean_fourier_coefficients(f, m, freqs)?;
    let ms = mean_square(f, m)?;
    let energy: f64 = coefficients.iter().map(|c| c.value.norm_sqr()).sum();
    let max_delta = coefficients.iter().map(|c| c.delta).fold(0.0, f64::max);
    let tolerance = 1e-9 + 10.0 * max_delta;
    let residual = ms - energy;
    let polynomial = TrigPolynomial::new(freqs.iter().copied().zip(coefficients.iter().map(|c| c.value)).collect());
    Ok(BrnApproximation {
        polynomial,
        frequencies: freqs.to_vec(),
        coefficients,
        mean_square: ms,
        bessel_residual: residual,
        tolerance,
        bessel_violation: residual < -tolerance,
    })
}

/// `{j/q : 0 <= j < q}`.
pub fn rational_grid(q: u64) -> Vec<Frequency> {
    (0..q as i64).map(|j| Frequency::rational(j, q).unwrap()).collect()
}

/// `h = sum_j fhat^nu(theta_j) ghat^eta(theta_j) e^{2 pi i theta_j x}`.
#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionExpansion {
    #[serde(skip)]
    pub h: TrigPolynomial,
    pub frequencies: Vec<Frequency>,
    pub a_coefficients: Vec<Estimate>,
    pub b_coefficients: Vec<Estimate>,
}

pub fn convolution_expansion_on_z(
    a: &SetRule,
    b: &SetRule,
    nu: &MeanApproximator,
    eta: &MeanApproximator,
    freqs: &[Frequency],
) -> Result<ConvolutionExpansion> {
    check_distinct(freqs)?;
    let fa = mean_fourier_coefficients(&Indicator::new(a.clone()), nu, freqs)?;
    let gb = mean_fourier_coefficients(&Indicator::new(b.clone()), eta, freqs)?;
    let h = TrigPolynomial::new(
        freqs
            .iter()
            .zip(fa.iter().zip(&gb))
            .map(|(t, (x, y))| (*t, x.value * y.value))
            .collect(),
    );
    Ok(ConvolutionExpansion {
        h,
        frequencies: freqs.to_vec(),
        a_coefficients: fa,
        b_coefficients: gb,
    })
}

/// Half the least value of `Re h` above `floor` over one period.
pub fn half_min_positive(h: &TrigPolynomial, floor: f64) -> Option<f64> {
    let q = h.period()?;
    (0..q as i64)
        .map(|x| h.eval(x).re)
        .filter(|&v| v > floor)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
        .map(|v| v / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContainmentReport {
    pub window: (i64, i64),
    pub delta: f64,
    pub summand_radius: u64,
    /// `|{Re h >= delta}|` on the window.
    pub level_count: u64,
    /// `|{Re h >= delta} \ S|` where `S subset A + B` is the windowed sumset.
    pub outside_count: u64,
    pub defect: f64,
    pub max_imaginary: f64,
}

/// `(A cap [-R, R]) + (B cap [lo - R, hi + R])` on `[lo, hi]`: a subset of
/// `A + B` that equals it there whenever `A`'s relevant members lie in `[-R, R]`.
pub fn windowed_sumset(a: &SetRule, b: &SetRule, window: (i64, i64), radius: u64) -> Result<WindowSet> {
    let (lo, hi) = window;
    let r = radius as i64;
    let len = (hi - lo + 1) as usize;
    let a_bits = a.materialize(-r, r)?;
    let b_bits = b.materialize(lo - r, hi + r)?;
    let mut s = Bitset::new(len);
    for i in a_bits.iter_ones() {
        let x = i as i64 - r;
        // position p in s is lo + p = x + y with y at index p + r - x in b_bits
        s.union_with(&b_bits.slice((r - x) as usize, len));
    }
    WindowSet::from_bitset(lo, s)
}

/// Window density of `{Re h >= delta}` outside the windowed sumset.
pub fn containment_report(
    h: &TrigPolynomial,
    a: &SetRule,
    b: &SetRule,
    window: (i64, i64),
    delta: f64,
    radius: u64,
) -> Result<ContainmentReport> {
    let (lo, hi) = window;
    let s = windowed_sumset(a, b, window, radius)?;
    let values = h.eval_range(lo, hi);
    let (level, outside, max_im) = values
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let in_level = v.re >= delta;
            let out = in_level && !s.contains(lo + i as i64);
            (in_level as u64, out as u64, v.im.abs())
        })
        .reduce(|| (0, 0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1, x.2.max(y.2)));
    Ok(ContainmentReport {
        window,
        delta,
        summand_radius: radius,
        level_count: level,
        outside_count: outside,
        defect: outside as f64 / (hi - lo + 1) as f64,
        max_imaginary: max_im,
    })
}

/// Unit-modulus character value at a precomputed phase.
pub fn character_at_phase(p: f64) -> Complex64 {
    unit(p)
}
