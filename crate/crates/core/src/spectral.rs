//! Exact Fourier analysis on finite abelian groups.
//!
//! Haar measure is normalized counting measure, so
//! `f^(chi) = (1/|G|) sum_x f(x) conj(chi(x))`, `f = sum_chi f^(chi) chi`, and
//! `(f*g)(x) = (1/|G|) sum_t f(t) g(x - t)`.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::abelian::FiniteAbelianGroup;
use crate::bits::Bitset;
use crate::error::{LabError, Result};
use crate::oracle;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A complex-valued function on a finite abelian group, stored densely in
/// canonical element order.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction {
    group: FiniteAbelianGroup,
    values: Vec<Complex64>,
}

/// Fourier coefficients indexed by character.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    group: FiniteAbelianGroup,
    coefficients: Vec<Complex64>,
}

/// A discrete measure on the dual group: one nonnegative point mass per character.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    group: FiniteAbelianGroup,
    weights: Vec<f64>,
}

impl GroupFunction {
    pub fn new(group: FiniteAbelianGroup, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.size() {
            return Err(LabError::structural(format!(
                "{} values supplied for group {} of size {}",
                values.len(),
                group,
                group.size()
            )));
        }
        Ok(GroupFunction { group, values })
    }

    pub fn from_fn(group: &FiniteAbelianGroup, f: impl FnMut(usize) -> Complex64) -> Self {
        GroupFunction {
            group: group.clone(),
            values: (0..group.size()).map(f).collect(),
        }
    }

    pub fn from_real(group: &FiniteAbelianGroup, values: &[f64]) -> Result<Self> {
        Self::new(
            group.clone(),
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn constant(group: &FiniteAbelianGroup, c: Complex64) -> Self {
        Self::from_fn(group, |_| c)
    }

    pub fn indicator(group: &FiniteAbelianGroup, set: &Bitset) -> Result<Self> {
        if set.len() != group.size() {
            return Err(LabError::structural("indicator set length differs from group size"));
        }
        Ok(Self::from_fn(group, |x| {
            if set.contains(x) {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// Point mass `1_{x}` (not normalized).
    pub fn delta(group: &FiniteAbelianGroup, x: usize) -> Self {
        Self::from_fn(group, |y| if y == x { Complex64::new(1.0, 0.0) } else { ZERO })
    }

    pub fn character(group: &FiniteAbelianGroup, chi: usize) -> Self {
        Self::from_fn(group, |x| group.char_eval_index(chi, x))
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, x: usize) -> Complex64 {
        self.values[x]
    }

    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.group.size() as f64
    }

    /// Normalized inner product `(1/|G|) sum_x self(x) conj(other(x))`.
    pub fn inner(&self, other: &GroupFunction) -> Result<Complex64> {
        same_group(&self.group, &other.group)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum::<Complex64>()
            / self.group.size() as f64)
    }

    /// `x -> self(x - gamma)`.
    pub fn shifted(&self, gamma: usize) -> GroupFunction {
        GroupFunction::from_fn(&self.group, |x| self.values[self.group.sub_index(x, gamma)])
    }

    pub fn combine(&self, other: &GroupFunction, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        Ok(GroupFunction {
            group: self.group.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        GroupFunction {
            group: self.group.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sup_distance(&self, other: &GroupFunction) -> Result<f64> {
        same_group(&self.group, &other.group)?;
        Ok(sup_distance(&self.values, &other.values))
    }

    /// Writes CSV rows `index,re,im` with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_complex_csv(out, &self.values)
    }

    pub fn read_csv<R: BufRead>(group: &FiniteAbelianGroup, input: R) -> Result<Self> {
        Self::new(group.clone(), read_complex_csv(input, group.size())?)
    }
}

impl Spectrum {
    pub fn new(group: FiniteAbelianGroup, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != group.size() {
            return Err(LabError::structural("spectrum length differs from group size"));
        }
        Ok(Spectrum { group, coefficients })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, chi: usize) -> Complex64 {
        self.coefficients[chi]
    }

    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The spectral measure `chi -> |c(chi)|^2`.
    pub fn power_measure(&self) -> SpectralMeasure {
        SpectralMeasure {
            group: self.group.clone(),
            weights: self.coefficients.iter().map(|c| c.norm_sqr()).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_complex_csv(out, &self.coefficients)
    }

    pub fn read_csv<R: BufRead>(group: &FiniteAbelianGroup, input: R) -> Result<Self> {
        Self::new(group.clone(), read_complex_csv(input, group.size())?)
    }
}

impl SpectralMeasure {
    pub fn new(group: FiniteAbelianGroup, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != group.size() {
            return Err(LabError::structural("measure length differs from group size"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(LabError::domain(format!("spectral weight {w} is not a finite nonnegative number")));
        }
        Ok(SpectralMeasure { group, weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `gamma -> sum_chi sigma({chi}) chi(gamma)`, by explicit character sums.
    pub fn transform(&self) -> GroupFunction {
        let g = &self.group;
        GroupFunction::from_fn(g, |gamma| {
            self.weights
                .iter()
                .enumerate()
                .map(|(chi, &w)| g.char_eval_index(chi, gamma) * w)
                .sum()
        })
    }
}

fn same_group(a: &FiniteAbelianGroup, b: &FiniteAbelianGroup) -> Result<()> {
    if a != b {
        return Err(LabError::structural(format!("functions live on different groups {a} and {b}")));
    }
    Ok(())
}

pub(crate) fn sup_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

// --- transform ---------------------------------------------------------------

/// Twiddle table for a single cyclic axis of length `n`.
struct AxisPlan {
    n: usize,
    roots: Vec<Complex64>,
}

impl AxisPlan {
    fn new(n: usize) -> Self {
        let roots = (0..n)
            .map(|k| {
                if k == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::from_polar(1.0, -TAU * k as f64 / n as f64)
                }
            })
            .collect();
        AxisPlan { n, roots }
    }

    /// `exp(-+2 pi i t / m)` for a sub-length `m` dividing `n`.
    #[inline]
    fn root(&self, t: usize, m: usize, inverse: bool) -> Complex64 {
        let w = self.roots[(t % m) * (self.n / m)];
        if inverse {
            w.conj()
        } else {
            w
        }
    }

    /// Unnormalized DFT of `x` (length `m`, a divisor of `n`), recursing on
    /// the smallest prime factor and falling back to the naive sum on primes.
    fn transform(&self, x: &[Complex64], inverse: bool) -> Vec<Complex64> {
        let m = x.len();
        if m == 1 {
            return x.to_vec();
        }
        let p = smallest_prime_factor(m);
        if p == m {
            return (0..m)
                .map(|k| {
                    x.iter()
                        .enumerate()
                        .map(|(j, &v)| v * self.root(j * k, m, inverse))
                        .sum()
                })
                .collect();
        }
        let q = m / p;
        let subs: Vec<Vec<Complex64>> = (0..p)
            .map(|r| {
                let decimated: Vec<Complex64> = (0..q).map(|j| x[j * p + r]).collect();
                self.transform(&decimated, inverse)
            })
            .collect();
        let mut out = vec![ZERO; m];
        for s in 0..p {
            for k in 0..q {
                let kk = k + q * s;
                out[kk] = subs
                    .iter()
                    .enumerate()
                    .map(|(r, y)| y[k] * self.root(r * kk, m, inverse))
                    .sum();
            }
        }
        out
    }
}

fn smallest_prime_factor(n: usize) -> usize {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

/// Applies the 1-D transform along every cyclic axis.
fn transform_axes(group: &FiniteAbelianGroup, values: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let mut data = values.to_vec();
    let mut stride = 1;
    for &n in group.orders() {
        if n > 1 {
            let plan = AxisPlan::new(n);
            let block = stride * n;
            let mut line = vec![ZERO; n];
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[start + k * stride];
                    }
                    let out = plan.transform(&line, inverse);
                    for (k, v) in out.into_iter().enumerate() {
                        data[start + k * stride] = v;
                    }
                }
            }
        }
        stride *= n;
    }
    data
}

/// Fourier coefficients `f^(chi) = (1/|G|) sum_x f(x) conj(chi(x))`.
pub fn dft(f: &GroupFunction) -> Spectrum {
    let scale = 1.0 / f.group.size() as f64;
    let coefficients = transform_axes(&f.group, &f.values, false)
        .into_iter()
        .map(|c| c * scale)
        .collect();
    Spectrum {
        group: f.group.clone(),
        coefficients,
    }
}

/// Fourier inversion `f(x) = sum_chi f^(chi) chi(x)`.
pub fn inverse_dft(s: &Spectrum) -> GroupFunction {
    GroupFunction {
        group: s.group.clone(),
        values: transform_axes(&s.group, &s.coefficients, true),
    }
}

/// Normalized convolution through the transform: multiply spectra, invert.
pub fn convolve(f: &GroupFunction, g: &GroupFunction) -> Result<GroupFunction> {
    same_group(&f.group, &g.group)?;
    let (a, b) = (dft(f), dft(g));
    let product = Spectrum {
        group: f.group.clone(),
        coefficients: a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| x * y).collect(),
    };
    Ok(inverse_dft(&product))
}

// --- identity checks ---------------------------------------------------------

/// `sup_x |f*g(x) - sum_chi f^(chi) g^(chi) chi(x)|`, with the left side summed
/// directly over `t` and the right side summed over characters explicitly.
pub fn convolution_expansion_check(f: &GroupFunction, g: &GroupFunction) -> Result<f64> {
    same_group(&f.group, &g.group)?;
    let direct = oracle::convolve_direct(f, g)?;
    let (a, b) = (dft(f), dft(g));
    let group = &f.group;
    let expansion = GroupFunction::from_fn(group, |x| {
        (0..group.size())
            .map(|chi| a.coefficients[chi] * b.coefficients[chi] * group.char_eval_index(chi, x))
            .sum()
    });
    Ok(sup_distance(&direct.values, &expansion.values))
}

/// `|sum_chi f^(chi) conj(g^(chi)) - <f, g>|`.
pub fn parseval_check(f: &GroupFunction, g: &GroupFunction) -> Result<f64> {
    let spectral: Complex64 = dft(f)
        .coefficients
        .iter()
        .zip(&dft(g).coefficients)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok((spectral - f.inner(g)?).norm())
}

/// Matrix coefficient of the shift action, `gamma -> <v, U_gamma w>` with
/// `U_gamma w(x) = w(x - gamma)`.
pub fn matrix_coefficient(w: &GroupFunction, v: &GroupFunction) -> Result<GroupFunction> {
    same_group(&w.group, &v.group)?;
    let group = &w.group;
    let n = group.size() as f64;
    Ok(GroupFunction::from_fn(group, |gamma| {
        (0..group.size())
            .map(|x| v.values[x] * w.values[group.sub_index(x, gamma)].conj())
            .sum::<Complex64>()
            / n
    }))
}

/// `sup_gamma |phi_{w,w}(gamma) - sigma^(gamma)|` for `sigma = |w^|^2`.
pub fn bochner_check(w: &GroupFunction) -> f64 {
    let phi = matrix_coefficient(w, w).expect("same group");
    let sigma_hat = dft(w).power_measure().transform();
    sup_distance(&phi.values, &sigma_hat.values)
}

/// Polarization: `4 phi_{v,w}` against the four diagonal coefficients of
/// `v + w`, `v - w`, `v + iw`, `v - iw`.
pub fn polarization_check(v: &GroupFunction, w: &GroupFunction) -> Result<f64> {
    same_group(&v.group, &w.group)?;
    let i = Complex64::new(0.0, 1.0);
    let phi = matrix_coefficient(w, v)?;
    let diag = |c: Complex64| -> Result<GroupFunction> {
        let z = v.combine(w, |a, b| a + c * b)?;
        matrix_coefficient(&z, &z)
    };
    let (d1, d2, d3, d4) = (
        diag(Complex64::new(1.0, 0.0))?,
        diag(Complex64::new(-1.0, 0.0))?,
        diag(i)?,
        diag(-i)?,
    );
    Ok((0..v.group.size())
        .map(|g| {
            let rhs = d1.values[g] - d2.values[g] + i * d3.values[g] - i * d4.values[g];
            (phi.values[g] * 4.0 - rhs).norm()
        })
        .fold(0.0, f64::max))
}

// --- CSV -----------------------------------------------------------------------

fn write_complex_csv<W: Write>(mut out: W, values: &[Complex64]) -> Result<()> {
    writeln!(out, "index,re,im")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i},{},{}", v.re, v.im)?;
    }
    Ok(())
}

fn read_complex_csv<R: BufRead>(input: R, expected: usize) -> Result<Vec<Complex64>> {
    let mut values = vec![None; expected];
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(LabError::parse(format!("line {}: expected index,re,im", lineno + 1)));
        }
        let bad = |what: &str| LabError::parse(format!("line {}: bad {what}", lineno + 1));
        let idx: usize = fields[0].parse().map_err(|_| bad("index"))?;
        let re: f64 = fields[1].parse().map_err(|_| bad("real part"))?;
        let im: f64 = fields[2].parse().map_err(|_| bad("imaginary part"))?;
        let slot = values
            .get_mut(idx)
            .ok_or_else(|| LabError::structural(format!("index {idx} outside group of size {expected}")))?;
        *slot = Some(Complex64::new(re, im));
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| LabError::structural(format!("missing value for index {i}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z(s: &str) -> FiniteAbelianGroup {
        s.parse().unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_fn(g: &FiniteAbelianGroup, rng: &mut ChaCha8Rng) -> GroupFunction {
        GroupFunction::from_fn(g, |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn dft_matches_naive_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for lit in ["Z1", "Z7", "Z12", "Z2xZ3xZ5", "Z64", "Z4xZ9", "Z30", "Z49"] {
            let g = z(lit);
            let f = random_fn(&g, &mut rng);
            let fast = dft(&f);
            let slow = oracle::dft_direct(&f);
            assert!(sup_distance(fast.coefficients(), slow.coefficients()) < 1e-12, "{lit}");
            let back = inverse_dft(&fast);
            assert!(back.sup_distance(&f).unwrap() < 1e-9, "{lit}");
        }
    }

    #[test]
    fn dft_examples() {
        let g = z("Z8");
        let s = dft(&GroupFunction::delta(&g, 0));
        assert!(s.coefficients().iter().all(|v| (v - c(1.0 / 8.0)).norm() < 1e-15));

        let g = z("Z3xZ4");
        let s = dft(&GroupFunction::constant(&g, c(1.0)));
        for (chi, v) in s.coefficients().iter().enumerate() {
            let want = if chi == 0 { 1.0 } else { 0.0 };
            assert!((v - c(want)).norm() < 1e-12);
        }

        let g = z("Z4");
        let s = dft(&GroupFunction::character(&g, 1));
        for (chi, v) in s.coefficients().iter().enumerate() {
            let want = if chi == 1 { 1.0 } else { 0.0 };
            assert!((v - c(want)).norm() < 1e-12);
        }
    }

    #[test]
    fn convolution_examples() {
        let g = z("Z2");
        let f = GroupFunction::delta(&g, 0);
        let h = GroupFunction::delta(&g, 1);
        let conv = convolve(&f, &h).unwrap();
        assert!((conv.value(0) - c(0.0)).norm() < 1e-12);
        assert!((conv.value(1) - c(0.5)).norm() < 1e-12);

        // |G| delta_0 is the unit
        let g = z("Z3xZ5");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_fn(&g, &mut rng);
        let unit = GroupFunction::delta(&g, 0).scaled(c(15.0));
        assert!(convolve(&f, &unit).unwrap().sup_distance(&f).unwrap() < 1e-12);

        // 1_A * 1_B (x) = |A cap (x - B)| / |G|
        let g = z("Z10");
        let a = Bitset::from_indices(10, [0, 1, 4, 7]);
        let b = Bitset::from_indices(10, [2, 3, 9]);
        let conv = convolve(&GroupFunction::indicator(&g, &a).unwrap(), &GroupFunction::indicator(&g, &b).unwrap()).unwrap();
        for x in 0..10 {
            let count = (0..10).filter(|&t| a.contains(t) && b.contains(g.sub_index(x, t))).count();
            assert!((conv.value(x) - c(count as f64 / 10.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn group_mismatch_is_structural() {
        let f = GroupFunction::constant(&z("Z4"), c(1.0));
        let g = GroupFunction::constant(&z("Z2xZ2"), c(1.0));
        assert!(matches!(convolve(&f, &g), Err(LabError::Structural(_))));
        assert!(matches!(parseval_check(&f, &g), Err(LabError::Structural(_))));
        assert!(GroupFunction::new(z("Z4"), vec![c(1.0)]).is_err());
    }

    #[test]
    fn expansion_and_parseval_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = z("Z12");
        let (f, h) = (random_fn(&g, &mut rng), random_fn(&g, &mut rng));
        assert!(convolution_expansion_check(&f, &h).unwrap() <= 1e-9);
        let one = GroupFunction::constant(&g, c(1.0));
        assert!(convolution_expansion_check(&one, &one).unwrap() <= 1e-12);
        let (x1, x5) = (GroupFunction::character(&g, 1), GroupFunction::character(&g, 5));
        assert!(convolution_expansion_check(&x1, &x5).unwrap() <= 1e-12);
        assert!(convolve(&x1, &x5).unwrap().values().iter().all(|v| v.norm() < 1e-12));

        // Bessel with equality
        assert!(parseval_check(&f, &f).unwrap() <= 1e-9);
        let g8 = z("Z8");
        let a = GroupFunction::indicator(&g8, &Bitset::from_indices(8, [0, 1])).unwrap();
        assert!((dft(&a).energy() - 0.25).abs() < 1e-12);
        assert!((a.inner(&a).unwrap() - c(0.25)).norm() < 1e-12);
        assert!(parseval_check(&a, &a).unwrap() < 1e-12);
        assert!(parseval_check(&x1, &x5).unwrap() < 1e-12);
    }

    #[test]
    fn matrix_coefficient_examples() {
        let g = z("Z6");
        let chi = GroupFunction::character(&g, 2);
        let phi = matrix_coefficient(&chi, &chi).unwrap();
        // <chi, U_gamma chi> = chi(gamma) under <a,b> = mean of a conj(b)
        for gamma in 0..6 {
            assert!((phi.value(gamma) - g.char_eval_index(2, gamma)).norm() < 1e-12);
        }
        let one = GroupFunction::constant(&g, c(1.0));
        let phi = matrix_coefficient(&one, &one).unwrap();
        assert!(phi.values().iter().all(|v| (v - c(1.0)).norm() < 1e-12));

        let w = GroupFunction::delta(&g, 0);
        let phi = matrix_coefficient(&w, &w).unwrap();
        assert!((phi.value(0) - c(1.0 / 6.0)).norm() < 1e-12);
        assert!(bochner_check(&w) < 1e-12);
        let m = dft(&w).power_measure();
        assert!(m.weights().iter().all(|&x| (x - 1.0 / 36.0).abs() < 1e-15));

        let sm = dft(&one).power_measure();
        assert!((sm.weights()[0] - 1.0).abs() < 1e-12);
        assert!((sm.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bochner_and_polarization_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = z("Z9");
        for _ in 0..20 {
            let w = random_fn(&g, &mut rng);
            assert!(bochner_check(&w) <= 1e-9);
        }
        let g = z("Z2xZ5");
        for _ in 0..20 {
            let (v, w) = (random_fn(&g, &mut rng), random_fn(&g, &mut rng));
            assert!(polarization_check(&v, &w).unwrap() <= 1e-9);
        }
        let v = random_fn(&g, &mut rng);
        assert!(polarization_check(&v, &v).unwrap() <= 1e-9);
        let (a, b) = (GroupFunction::character(&g, 1), GroupFunction::character(&g, 3));
        let phi = matrix_coefficient(&b, &a).unwrap();
        assert!(phi.values().iter().all(|x| x.norm() < 1e-12));
        assert!(polarization_check(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn convolution_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for lit in ["Z16", "Z3xZ6", "Z2xZ2xZ5"] {
            let g = z(lit);
            let (f, h) = (random_fn(&g, &mut rng), random_fn(&g, &mut rng));
            let fh = convolve(&f, &h).unwrap();
            assert!(fh.sup_distance(&convolve(&h, &f).unwrap()).unwrap() < 1e-10);
            let (sf, sh, sfh) = (dft(&f), dft(&h), dft(&fh));
            for chi in 0..g.size() {
                assert!((sfh.coefficient(chi) - sf.coefficient(chi) * sh.coefficient(chi)).norm() < 1e-10);
            }
            assert!((fh.integral() - f.integral() * h.integral()).norm() < 1e-10);

            let unit: Vec<f64> = (0..g.size()).map(|_| rng.random_range(0.0..1.0)).collect();
            let u = GroupFunction::from_real(&g, &unit).unwrap();
            let energy = dft(&u).energy();
            let mean_sq = u.inner(&u).unwrap().re;
            assert!(energy <= mean_sq + 1e-12);
            assert!((energy - mean_sq).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_round_trip() {
        let g = z("Z2xZ3");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_fn(&g, &mut rng);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = GroupFunction::read_csv(&g, buf.as_slice()).unwrap();
        assert_eq!(back, f);
        let short = "index,re,im\n0,1,0\n";
        assert!(GroupFunction::read_csv(&g, short.as_bytes()).is_err());
    }
}
