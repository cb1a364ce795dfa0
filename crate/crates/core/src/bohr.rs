//! Bohr sets in `Z`: `{x : ||theta_j (x - center)|| < eps for every j}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitset;
use crate::density::{draw_probes, embed_probes, EmbeddabilityReport, ProbeMode, WindowSet};
use crate::error::{LabError, Result};
use crate::frequency::Frequency;
use crate::means::chunked_sum;
use crate::rules::{call_form, split_top, SetRule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BohrSpec {
    thetas: Vec<Frequency>,
    eps: f64,
    center: i64,
}

/// A point of the torus `T^d` with coordinates in `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        TorusPoint {
            coords: coords.into_iter().map(|c| c.rem_euclid(1.0)).collect(),
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `max_j min(x_j, 1 - x_j)`, in `[0, 1/2]`; zero for `d = 0`.
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|&c| c.min(1.0 - c)).fold(0.0, f64::max)
    }
}

impl BohrSpec {
    pub fn new(thetas: Vec<Frequency>, eps: f64, center: i64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(LabError::domain(format!("Bohr radius must lie in (0, 1/2], got {eps}")));
        }
        Ok(BohrSpec { thetas, eps, center })
    }

    pub fn rank(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[Frequency] {
        &self.thetas
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn center(&self) -> i64 {
        self.center
    }

    pub fn with_center(&self, center: i64) -> BohrSpec {
        BohrSpec { center, ..self.clone() }
    }

    pub fn with_eps(&self, eps: f64) -> Result<BohrSpec> {
        BohrSpec::new(self.thetas.clone(), eps, self.center)
    }

    /// `theta (x - center)` on the torus.
    pub fn image(&self, x: i64) -> TorusPoint {
        let y = x.wrapping_sub(self.center);
        TorusPoint {
            coords: self.thetas.iter().map(|t| t.phase(y)).collect(),
        }
    }

    /// Membership with margin `eps - ||theta (x - center)||`.
    pub fn membership(&self, x: i64) -> (bool, f64) {
        let margin = self.eps - self.image(x).norm();
        (margin > 0.0, margin)
    }

    pub fn contains(&self, x: i64) -> bool {
        let y = x.wrapping_sub(self.center);
        self.thetas.iter().all(|t| t.circle_norm(y) < self.eps)
    }

    /// Common period when every frequency is rational.
    pub fn period(&self) -> Option<u64> {
        self.thetas.iter().try_fold(1u64, |acc, t| {
            let q = t.period()?;
            let g = gcd(acc, q);
            (acc / g).checked_mul(q)
        })
    }

    /// `(floor(1/eps) + 1)^(-d)`.
    pub fn density_lower_bound(&self) -> f64 {
        let k = (1.0 / self.eps).floor() + 1.0;
        k.powi(-(self.rank() as i32))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FromStr for BohrSpec {
    type Err = LabError;

    /// `bohr(d=2; theta=0.5,1/3; eps=0.1; center=0)`; `center` defaults to 0.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = call_form(s)?;
        let args = match (name, args) {
            ("bohr", Some(a)) => a,
            _ => return Err(LabError::parse(format!("not a Bohr literal: {s:?}"))),
        };
        let (mut d, mut thetas, mut eps, mut center) = (None, None, None, 0i64);
        for field in split_top(args, ';') {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| LabError::parse(format!("Bohr field {field:?} is not key=value")))?;
            let v = v.trim();
            let bad = || LabError::parse(format!("bad Bohr field {field:?}"));
            match k.trim() {
                "d" => d = Some(v.parse::<usize>().map_err(|_| bad())?),
                "theta" => {
                    thetas = Some(if v.is_empty() {
                        Vec::new()
                    } else {
                        split_top(v, ',').iter().map(|t| t.parse()).collect::<Result<Vec<Frequency>>>()?
                    })
                }
                "eps" => eps = Some(v.parse::<f64>().map_err(|_| bad())?),
                "center" => center = v.parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            }
        }
        let thetas = thetas.unwrap_or_default();
        if let Some(d) = d {
            if d != thetas.len() {
                return Err(LabError::structural(format!("Bohr rank d={d} but {} frequencies given", thetas.len())));
            }
        }
        let eps = eps.ok_or_else(|| LabError::parse("Bohr literal needs eps"))?;
        BohrSpec::new(thetas, eps, center)
    }
}

impl fmt::Display for BohrSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let thetas: Vec<String> = self.thetas.iter().map(|t| t.to_string()).collect();
        write!(
            f,
            "bohr(d={}; theta={}; eps={}; center={})",
            self.rank(),
            thetas.join(","),
            self.eps,
            self.center
        )
    }
}

impl TryFrom<String> for BohrSpec {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BohrSpec> for String {
    fn from(b: BohrSpec) -> String {
        b.to_string()
    }
}

/// Exact membership over `[lo, hi]`.
pub fn bohr_window(spec: &BohrSpec, lo: i64, hi: i64) -> Result<WindowSet> {
    WindowSet::from_rule(&SetRule::Bohr(spec.clone()), lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityBoundReport {
    pub spec: BohrSpec,
    pub window: (i64, i64),
    pub members: u64,
    pub density: f64,
    pub bound: f64,
    /// Window length at least `(10 / eps)^d`.
    pub window_adequate: bool,
    /// `density < 0.9 * bound`.
    pub violation: bool,
}

pub fn bohr_density_bound_check(spec: &BohrSpec, lo: i64, hi: i64) -> Result<DensityBoundReport> {
    let w = bohr_window(spec, lo, hi)?;
    let bound = spec.density_lower_bound();
    let need = (10.0 / spec.eps()).powi(spec.rank() as i32);
    Ok(DensityBoundReport {
        spec: spec.clone(),
        window: (lo, hi),
        members: w.count_ones(),
        density: w.density(),
        bound,
        window_adequate: w.len() as f64 >= need,
        violation: w.density() < 0.9 * bound,
    })
}

/// Probes `F` drawn from the Bohr set on the target's window, each searched
/// for a translate `F + t` inside the target.
pub fn bohr_embeddability(spec: &BohrSpec, target: &WindowSet, k: usize, mode: ProbeMode) -> Result<EmbeddabilityReport> {
    let pool: Vec<i64> = bohr_window(spec, target.lo(), target.hi())?.members().collect();
    let probes = draw_probes(&pool, k, mode)?;
    Ok(embed_probes(probes, target, k))
}

/// Search parameters for [`piecewise_bohr_scan`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanProbe {
    /// Centers `0..centers` tried per frequency tuple (fewer for a shorter period).
    pub centers: u64,
    /// Run length `L`.
    pub run_len: u64,
    /// Number of top-coefficient grid frequencies kept.
    pub seeds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BohrCandidate {
    pub spec: BohrSpec,
    /// Fraction of the candidate's members in the best run that lie in the target.
    pub score: f64,
    /// `1 - score`: the containment defect.
    pub defect: f64,
    pub run: (i64, i64),
    pub members_in_run: u64,
    pub outside_in_run: u64,
}

/// `|m(1_A e(-theta x))|` over the window, for each grid frequency.
pub fn window_coefficients(target: &WindowSet, thetas: &[Frequency]) -> Vec<f64> {
    let members: Vec<i64> = target.members().collect();
    thetas
        .iter()
        .map(|t| {
            let vals: Vec<Complex64> = members.par_iter().map(|&x| t.character(x).conj()).collect();
            chunked_sum(&vals).norm() / target.len() as f64
        })
        .collect()
}

/// Run starts: stride `L/2`, plus the last full run.
fn run_starts(lo: i64, hi: i64, len: u64) -> Vec<i64> {
    let last = hi - len as i64 + 1;
    let step = (len / 2).max(1) as i64;
    let mut v: Vec<i64> = (0..).map(|j| lo + j * step).take_while(|&t| t <= last).collect();
    if v.last() != Some(&last) {
        v.push(last);
    }
    v
}

fn best_run(target: &WindowSet, bohr: &Bitset, starts: &[i64], len: u64) -> (f64, i64, u64, u64) {
    let mut outside = bohr.clone();
    outside.difference_with(target.bits());
    let mut best = (-1.0, starts[0], 0, 0);
    for &t in starts {
        let a = (t - target.lo()) as usize;
        let b = a + len as usize - 1;
        let m = bohr.count_range(a, b) as u64;
        let o = outside.count_range(a, b) as u64;
        let score = if m == 0 { 0.0 } else { (m - o) as f64 / m as f64 };
        if score > best.0 {
            best = (score, t, m, o);
        }
    }
    best
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    if n < r {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..r).rev().find(|&i| idx[i] < n - r + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Finite-scale search for Bohr sets `c + B` whose members in some run
/// `[t, t + L)` lie in the target.
///
/// Rank-0 is always a candidate. Frequencies come from `theta_grid`, keeping
/// the `seeds` nontrivial ones with the largest window coefficients of the
/// target. Each `(thetas, eps, center)` keeps its best run. Ranking: score
/// descending, then spec text.
pub fn piecewise_bohr_scan(
    target: &WindowSet,
    rank_cap: usize,
    eps_grid: &[f64],
    theta_grid: &[Frequency],
    probe: &ScanProbe,
) -> Result<Vec<BohrCandidate>> {
    if eps_grid.is_empty() || (rank_cap > 0 && theta_grid.is_empty()) {
        return Err(LabError::domain("piecewise Bohr scan needs nonempty eps and theta grids"));
    }
    if probe.run_len == 0 || probe.run_len > target.len() {
        return Err(LabError::domain(format!(
            "run length {} must lie in [1, {}]",
            probe.run_len,
            target.len()
        )));
    }
    for &e in eps_grid {
        BohrSpec::new(Vec::new(), e, 0)?;
    }
    let nontrivial: Vec<Frequency> = theta_grid.iter().filter(|t| !t.is_trivial()).copied().collect();
    let coeffs = window_coefficients(target, &nontrivial);
    let mut order: Vec<usize> = (0..nontrivial.len()).collect();
    order.sort_by(|&i, &j| {
        coeffs[j]
            .total_cmp(&coeffs[i])
            .then(nontrivial[i].theta().total_cmp(&nontrivial[j].theta()))
    });
    let seeds: Vec<Frequency> = order.into_iter().take(probe.seeds).map(|i| nontrivial[i]).collect();

    let (lo, hi) = (target.lo(), target.hi());
    let n = target.len() as usize;
    let starts = run_starts(lo, hi, probe.run_len);
    let max_eps = eps_grid.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();

    let trivial = BohrSpec::new(Vec::new(), max_eps, 0)?;
    let (score, t, m, o) = best_run(target, &Bitset::full(n), &starts, probe.run_len);
    out.push(candidate(trivial, score, t, probe.run_len, m, o));

    let centers = probe.centers.max(1) as i64;
    for r in 1..=rank_cap.min(seeds.len()) {
        for combo in combinations(seeds.len(), r) {
            let thetas: Vec<Frequency> = combo.iter().map(|&i| seeds[i]).collect();
            let base = BohrSpec::new(thetas.clone(), max_eps, 0)?;
            let c_count = base.period().map_or(centers, |q| centers.min(q as i64));
            // norm[i] = ||theta (lo - (c_count - 1) + i)||, so center c reads offset c_count - 1 - c
            let ext = n + c_count as usize - 1;
            let first = lo - (c_count - 1);
            let norms: Vec<f64> = (0..ext)
                .into_par_iter()
                .map(|i| {
                    let x = first + i as i64;
                    thetas.iter().map(|t| t.circle_norm(x)).fold(0.0, f64::max)
                })
                .collect();
            let found: Vec<BohrCandidate> = (0..c_count)
                .into_par_iter()
                .flat_map_iter(|c| {
                    let off = (c_count - 1 - c) as usize;
                    let norms = &norms;
                    let starts = &starts;
                    let thetas = &thetas;
                    eps_grid.iter().map(move |&e| {
                        let bohr = Bitset::from_predicate(n, |i| norms[off + i] < e);
                        let (score, t, m, o) = best_run(target, &bohr, starts, probe.run_len);
                        let spec = BohrSpec::new(thetas.clone(), e, c).unwrap();
                        candidate(spec, score, t, probe.run_len, m, o)
                    })
                })
                .collect();
            out.extend(found);
        }
    }
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.spec.to_string().cmp(&b.spec.to_string())));
    Ok(out)
}

fn candidate(spec: BohrSpec, score: f64, t: i64, len: u64, m: u64, o: u64) -> BohrCandidate {
    BohrCandidate {
        spec,
        score,
        defect: 1.0 - score,
        run: (t, t + len as i64 - 1),
        members_in_run: m,
        outside_in_run: o,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &str) -> BohrSpec {
        s.parse().unwrap()
    }

    #[test]
    fn literals() {
        let b = spec("bohr(d=1; theta=0.618; eps=0.1; center=0)");
        assert_eq!(b.rank(), 1);
        assert_eq!(b.to_string(), "bohr(d=1; theta=0.618; eps=0.1; center=0)");
        let two = spec("bohr(d=2; theta=1/3,0.25; eps=0.25; center=-4)");
        assert_eq!(spec(&two.to_string()), two);
        assert_eq!(spec("bohr(theta=1/4; eps=0.2)").center(), 0);
        assert!("bohr(d=2; theta=0.1; eps=0.1)".parse::<BohrSpec>().is_err());
        assert!("bohr(d=1; theta=0.1; eps=0.6)".parse::<BohrSpec>().is_err());
        assert!("bohr(d=1; theta=0.1; eps=0)".parse::<BohrSpec>().is_err());
        assert!("bohr(d=1; theta=0.1)".parse::<BohrSpec>().is_err());
    }

    #[test]
    fn membership_examples() {
        let b = spec("bohr(d=1; theta=1/4; eps=0.2; center=0)");
        assert_eq!(b.membership(0), (true, 0.2));
        assert!(b.contains(4));
        assert!(!b.contains(1));
        let shifted = b.with_center(7);
        assert_eq!(shifted.membership(7), (true, 0.2));
        assert_eq!(spec("bohr(d=1; theta=0.25; eps=0.2)").membership(4), (true, 0.2));
    }

    #[test]
    fn bound_and_period() {
        assert!((spec("bohr(d=1; theta=0.3; eps=0.1)").density_lower_bound() - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(spec("bohr(d=2; theta=0.3,0.7; eps=0.25)").density_lower_bound(), 1.0 / 25.0);
        assert_eq!(spec("bohr(d=2; theta=1/4,1/6; eps=0.1)").period(), Some(12));
        assert_eq!(spec("bohr(d=1; theta=0.3; eps=0.1)").period(), None);
        assert_eq!(spec("bohr(d=0; theta=; eps=0.1)").period(), Some(1));
        assert!(spec("bohr(d=0; theta=; eps=0.1)").contains(12345));
    }

    #[test]
    fn window_examples() {
        let w = bohr_window(&spec("bohr(d=1; theta=1/3; eps=0.1)"), -50, 50).unwrap();
        assert!(w.members().eq((-50..=50).filter(|x| x % 3 == 0)));
        let wide = bohr_window(&spec("bohr(d=1; theta=0.618034; eps=0.5)"), 0, 9999).unwrap();
        assert!(wide.density() > 0.999);
        let golden = bohr_window(&spec("bohr(d=1; theta=0.6180339887; eps=0.1)"), 0, 999_999).unwrap();
        assert!((golden.density() - 0.2).abs() < 1e-3);
    }

    #[test]
    fn density_bound_examples() {
        let r = bohr_density_bound_check(&spec("bohr(d=1; theta=0.3; eps=0.1)"), 0, 9999).unwrap();
        assert!((r.bound - 1.0 / 11.0).abs() < 1e-15);
        assert!(r.window_adequate && !r.violation);
        let rat = bohr_density_bound_check(&spec("bohr(d=1; theta=2/7; eps=0.2)"), 0, 6999).unwrap();
        assert!(rat.density >= 1.0 / 7.0);
        let two = bohr_density_bound_check(&spec("bohr(d=2; theta=0.41421356237,0.73205080757; eps=0.25)"), 0, 99_999).unwrap();
        assert!((two.density - 0.25).abs() < 0.01 && !two.violation);
        let small = bohr_density_bound_check(&spec("bohr(d=2; theta=0.1,0.2; eps=0.05)"), 0, 99).unwrap();
        assert!(!small.window_adequate);
    }

    #[test]
    fn half_radius_sums_stay_inside() {
        let b = spec("bohr(d=2; theta=0.377,1/5; eps=0.2)");
        let half = b.with_eps(0.1).unwrap();
        let w = bohr_window(&half, -300, 300).unwrap();
        let m: Vec<i64> = w.members().collect();
        for &x in &m {
            assert!(half.contains(-x));
            for &y in &m {
                assert!(b.contains(x + y), "{x} + {y}");
            }
        }
    }

    #[test]
    fn embeddability_examples() {
        let b = spec("bohr(d=1; theta=0.377; eps=0.1)");
        let own = bohr_window(&b, 0, 2000).unwrap();
        let rep = bohr_embeddability(&b, &own, 3, ProbeMode::Sampled { count: 50, seed: 7 }).unwrap();
        assert_eq!(rep.successes, 50);
        assert!(rep.witnesses.iter().all(|(_, t)| *t == 0));

        let half = b.with_eps(0.05).unwrap();
        let hw = bohr_window(&half, -3000, 3000).unwrap();
        let m: Vec<i64> = hw.members().collect();
        let mut sum = Bitset::new(2001);
        for &x in &m {
            for &y in &m {
                if (0..=2000).contains(&(x + y)) {
                    sum.insert((x + y) as usize);
                }
            }
        }
        let target = WindowSet::from_bitset(0, sum).unwrap();
        let probe_spec = b.with_eps(0.1).unwrap();
        let rep = bohr_embeddability(&probe_spec, &target, 2, ProbeMode::Sampled { count: 40, seed: 1 }).unwrap();
        assert_eq!(rep.successes, rep.probes);

        let squares = WindowSet::from_rule(&"floor_pow(n,2)".parse().unwrap(), 0, 20_000).unwrap();
        let rep = bohr_embeddability(&b, &squares, 3, ProbeMode::Sampled { count: 30, seed: 3 }).unwrap();
        assert!(!rep.failures.is_empty());
    }

    fn grid() -> Vec<Frequency> {
        ["1/2", "1/3", "1/4", "0.1", "0.377"].iter().map(|t| t.parse().unwrap()).collect()
    }

    fn probe(len: u64) -> ScanProbe {
        ScanProbe {
            centers: 4,
            run_len: len,
            seeds: 3,
        }
    }

    #[test]
    fn scan_finds_the_period_of_the_evens() {
        let even = WindowSet::from_rule(&SetRule::Even, 0, 9999).unwrap();
        let c = piecewise_bohr_scan(&even, 1, &[0.1, 0.25], &grid(), &probe(1000)).unwrap();
        assert_eq!(c[0].score, 1.0);
        assert_eq!(c[0].spec.thetas(), &["1/2".parse::<Frequency>().unwrap()]);
        assert_eq!(c[0].spec.center(), 0);
        let trivial = c.iter().find(|x| x.spec.rank() == 0).unwrap();
        assert_eq!(trivial.score, 0.5);
    }

    #[test]
    fn scan_of_everything_keeps_the_trivial_spec() {
        let all = WindowSet::from_rule(&SetRule::All, -500, 500).unwrap();
        let c = piecewise_bohr_scan(&all, 1, &[0.1], &grid(), &probe(100)).unwrap();
        assert!(c.iter().all(|x| x.score == 1.0));
        assert_eq!(c[0].spec.rank(), 0);
        assert!(matches!(
            piecewise_bohr_scan(&all, 1, &[], &grid(), &probe(100)),
            Err(LabError::Domain(_))
        ));
        assert!(piecewise_bohr_scan(&all, 1, &[0.1], &grid(), &probe(5000)).is_err());
    }

    #[test]
    fn scan_ranking_is_deterministic() {
        let odd = WindowSet::from_rule(&"mod(6,1,3)".parse().unwrap(), 0, 5999).unwrap();
        let a = piecewise_bohr_scan(&odd, 2, &[0.1, 0.2], &grid(), &probe(600)).unwrap();
        let b = piecewise_bohr_scan(&odd, 2, &[0.1, 0.2], &grid(), &probe(600)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].score, 1.0);
        assert_eq!(a[0].spec.center() % 2, 1);
    }

    #[test]
    fn torus_norm() {
        assert_eq!(TorusPoint::new(vec![0.9, 0.2]).norm(), 0.2);
        assert!((TorusPoint::new(vec![-0.05]).norm() - 0.05).abs() < 1e-15);
        assert_eq!(TorusPoint::new(vec![]).norm(), 0.0);
    }
}
