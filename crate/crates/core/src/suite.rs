//! The acceptance list: ten numbered checks, each producing a pass/fail
//! verdict, a JSON detail object and a CSV table. Artifacts carry no timing,
//! so two runs are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use num_integer::Integer;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::abelian::FiniteAbelianGroup;
use crate::bohr::{bohr_density_bound_check, BohrSpec};
use crate::commands::example_scan;
use crate::counterexample::{block_report, ExampleParameters, ExampleSets, GrowthPolicy};
use crate::density::FolnerFamily;
use crate::error::Result;
use crate::exhaustive::{abelian_groups_of_order, kneser_scan, pigeonhole_scan, steinhaus_scan};
use crate::frequency::Frequency;
use crate::hartman::{weyl_average, HartmanSequence};
use crate::means::{
    brn_reconstruct, containment_report, convolution_expansion_on_z, half_min_positive, rational_grid, BoundedFunction,
    Indicator, MeanApproximator, TrigPolynomial,
};
use crate::oracle::convolve_direct;
use crate::report::{to_sorted_json, Table};
use crate::row;
use crate::rules::SetRule;
use crate::spectral::{bochner_check, convolution_expansion_check, convolve, parseval_check, polarization_check, GroupFunction};
use crate::sumset::{steinhaus_level_set, sumset, GroupSubset};

pub const DEFAULT_OUT: &str = "acceptance";

/// Wall-clock limits in seconds, criterion `i + 1` at index `i`.
pub const RUNTIME_LIMITS_S: [u64; 10] = [10, 60, 300, 60, 5, 30, 120, 30, 300, 120];

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "convolution correctness"),
    (2, "Steinhaus exactness"),
    (3, "Kneser stabilizer"),
    (4, "pigeonhole"),
    (5, "Bochner and polarization"),
    (6, "Bohr syndeticity bound"),
    (7, "Weyl decay"),
    (8, "BRN exact reconstruction"),
    (9, "counterexample obstruction"),
    (10, "level-set sumset containment"),
];

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    pub detail: Value,
    #[serde(skip)]
    pub table: Table,
}

fn rng(id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + id as u64)
}

fn group(lit: &str) -> FiniteAbelianGroup {
    lit.parse().expect("fixture group literal")
}

/// Runs criterion `id` (1 to 10).
pub fn run_criterion(id: u8) -> Result<Outcome> {
    let name = CRITERIA[id as usize - 1].1;
    let (passed, summary, detail, table) = match id {
        1 => convolution_correctness()?,
        2 => steinhaus_exactness()?,
        3 => kneser_stabilizer()?,
        4 => pigeonhole()?,
        5 => bochner_polarization()?,
        6 => bohr_syndeticity()?,
        7 => weyl_decay()?,
        8 => brn_reconstruction()?,
        9 => counterexample_obstruction()?,
        10 => level_set_containment()?,
        _ => return Err(crate::error::LabError::domain(format!("no criterion {id}"))),
    };
    Ok(Outcome { id, name, passed, summary, detail, table })
}

/// Writes `criterion_XX.json`, `criterion_XX.csv`, `summary.json` and `summary.csv`.
pub fn write_outcomes(dir: &Path, outcomes: &[Outcome]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let mut summary = Table::new(&["criterion", "name", "passed", "summary"]);
    for o in outcomes {
        let json = dir.join(format!("criterion_{:02}.json", o.id));
        let csv = dir.join(format!("criterion_{:02}.csv", o.id));
        fs::write(&json, to_sorted_json(o)?)?;
        fs::write(&csv, o.table.to_csv()?)?;
        paths.push(json);
        paths.push(csv);
        summary.push(row![o.id, o.name, o.passed, o.summary]);
    }
    let sj = dir.join("summary.json");
    let sc = dir.join("summary.csv");
    let verdicts: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "summary": o.summary }))
        .collect();
    fs::write(&sj, to_sorted_json(&verdicts)?)?;
    fs::write(&sc, summary.to_csv()?)?;
    paths.push(sj);
    paths.push(sc);
    Ok(paths)
}

/// Runs every criterion in order and writes the artifacts to `dir`.
pub fn run_acceptance(dir: &Path) -> Result<Vec<Outcome>> {
    let outcomes = CRITERIA.iter().map(|&(id, _)| run_criterion(id)).collect::<Result<Vec<_>>>()?;
    write_outcomes(dir, &outcomes)?;
    Ok(outcomes)
}

type Verdict = (bool, String, Value, Table);

fn random_function(g: &FiniteAbelianGroup, r: &mut ChaCha8Rng) -> GroupFunction {
    GroupFunction::from_fn(g, |_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

/// A nonempty subset, each element kept with a random probability.
fn random_subset(g: &FiniteAbelianGroup, r: &mut ChaCha8Rng) -> Result<GroupSubset> {
    let p: f64 = r.random_range(0.05..0.95);
    let mut idx: Vec<usize> = (0..g.size()).filter(|_| r.random_bool(p)).collect();
    if idx.is_empty() {
        idx.push(r.random_range(0..g.size()));
    }
    GroupSubset::from_indices(g, &idx)
}

/// A nonempty residue set modulo `q`.
fn random_residues(q: u64, r: &mut ChaCha8Rng) -> Vec<i64> {
    let mut rs: Vec<i64> = (0..q as i64).filter(|_| r.random_bool(0.5)).collect();
    if rs.is_empty() {
        rs.push(r.random_range(0..q as i64));
    }
    rs
}

fn convolution_correctness() -> Result<Verdict> {
    let mut r = rng(1);
    let mut t = Table::new(&["group", "pairs", "max_conv_dev", "max_parseval", "max_expansion"]);
    let mut worst = 0.0f64;
    for lit in ["Z12", "Z2xZ3xZ5", "Z64"] {
        let g = group(lit);
        let (mut conv, mut pars, mut exp) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..200 {
            let f = random_function(&g, &mut r);
            let h = random_function(&g, &mut r);
            conv = conv.max(convolve(&f, &h)?.sup_distance(&convolve_direct(&f, &h)?)?);
            pars = pars.max(parseval_check(&f, &h)?);
            exp = exp.max(convolution_expansion_check(&f, &h)?);
        }
        worst = worst.max(conv).max(pars).max(exp);
        t.push(row![lit, 200, conv, pars, exp]);
    }
    let passed = worst <= TOL;
    Ok((passed, format!("max deviation {worst:e} (tolerance 1e-9)"), json!({ "max_deviation": worst }), t))
}

/// Groups of order at most 256 drawn from a fixed catalogue.
fn random_group(r: &mut ChaCha8Rng) -> FiniteAbelianGroup {
    let n = r.random_range(1..=256usize);
    abelian_groups_of_order(n).choose(r).expect("every order has a group").clone()
}

fn steinhaus_exactness() -> Result<Verdict> {
    let mut t = Table::new(&["case", "pairs", "mismatches"]);
    let mut mismatches = 0u64;
    for n in 1..=12 {
        let s = steinhaus_scan(&FiniteAbelianGroup::cyclic(n)?)?;
        mismatches += s.mismatches;
        t.push(row![s.group, s.pairs, s.mismatches]);
    }
    let mut r = rng(2);
    let cases: Vec<(FiniteAbelianGroup, GroupSubset, GroupSubset)> = (0..10_000)
        .map(|_| {
            let g = random_group(&mut r);
            let a = random_subset(&g, &mut r)?;
            let b = random_subset(&g, &mut r)?;
            Ok((g, a, b))
        })
        .collect::<Result<_>>()?;
    let random_bad = cases
        .par_iter()
        .map(|(_, a, b)| Ok((steinhaus_level_set(a, b)? != sumset(a, b)?) as u64))
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum::<u64>();
    t.push(row!["random |G| <= 256", cases.len(), random_bad]);
    let total = mismatches + random_bad;
    Ok((
        total == 0,
        format!("{total} mismatches between level set and sumset"),
        json!({ "exhaustive_mismatches": mismatches, "random_mismatches": random_bad, "random_pairs": cases.len() }),
        t,
    ))
}

fn kneser_groups() -> Vec<FiniteAbelianGroup> {
    let mut gs: Vec<FiniteAbelianGroup> = (1..=18).flat_map(abelian_groups_of_order).collect();
    gs.push(group("Z2xZ3"));
    gs
}

fn kneser_stabilizer() -> Result<Verdict> {
    let mut t = Table::new(&[
        "group",
        "pairs",
        "small_sumset_pairs",
        "trivial_stabilizer",
        "inequality_violations",
        "fixed_point_violations",
        "critical_violations",
    ]);
    let mut totals = [0u64; 4];
    let mut first = Value::Null;
    for g in kneser_groups() {
        let s = kneser_scan(&g)?;
        totals[0] += s.small_with_trivial_stabilizer;
        totals[1] += s.inequality_violations;
        totals[2] += s.fixed_point_violations;
        totals[3] += s.critical_violations;
        if first.is_null() {
            if let Some((a, b, sum)) = &s.first_trivial_example {
                first = json!({ "group": s.group, "a": a, "b": b, "sumset": sum });
            }
        }
        t.push(row![
            s.group,
            s.pairs,
            s.small_sumset_pairs,
            s.small_with_trivial_stabilizer,
            s.inequality_violations,
            s.fixed_point_violations,
            s.critical_violations
        ]);
    }
    // every small-sumset pair must have a nontrivial stabilizer
    let violations = totals[0] + totals[1] + totals[2];
    Ok((
        violations == 0,
        format!(
            "{} small-sumset pairs with trivial stabilizer, {} inequality and {} fixed-point violations",
            totals[0], totals[1], totals[2]
        ),
        json!({
            "small_with_trivial_stabilizer": totals[0],
            "inequality_violations": totals[1],
            "fixed_point_violations": totals[2],
            "critical_violations": totals[3],
            "first_trivial_example": first,
        }),
        t,
    ))
}

fn pigeonhole() -> Result<Verdict> {
    let mut t = Table::new(&["group", "pairs", "forced_pairs", "violations"]);
    let mut violations = 0;
    for g in (1..=16).flat_map(abelian_groups_of_order) {
        let s = pigeonhole_scan(&g)?;
        violations += s.violations;
        t.push(row![s.group, s.pairs, s.forced_pairs, s.violations]);
    }
    Ok((violations == 0, format!("{violations} violations"), json!({ "violations": violations }), t))
}

fn bochner_polarization() -> Result<Verdict> {
    let mut r = rng(5);
    let mut t = Table::new(&["group", "vectors", "max_bochner", "max_polarization"]);
    let mut worst = 0.0f64;
    for lit in ["Z9", "Z2xZ8"] {
        let g = group(lit);
        let (mut b, mut p) = (0.0f64, 0.0f64);
        for _ in 0..500 {
            let v = random_function(&g, &mut r);
            let w = random_function(&g, &mut r);
            b = b.max(bochner_check(&w));
            p = p.max(polarization_check(&v, &w)?);
        }
        worst = worst.max(b).max(p);
        t.push(row![lit, 500, b, p]);
    }
    Ok((worst <= TOL, format!("max deviation {worst:e} (tolerance 1e-9)"), json!({ "max_deviation": worst }), t))
}

fn bohr_fixture() -> Vec<BohrSpec> {
    let sqrt2 = Frequency::real(std::f64::consts::SQRT_2 - 1.0).unwrap();
    let golden = Frequency::real((5f64.sqrt() - 1.0) / 2.0).unwrap();
    let e = Frequency::real(std::f64::consts::E - 2.0).unwrap();
    let pi = Frequency::real(std::f64::consts::PI - 3.0).unwrap();
    let q = |j, d| Frequency::rational(j, d).unwrap();
    let specs: Vec<(Vec<Frequency>, f64)> = vec![
        (vec![q(1, 2)], 0.05),
        (vec![q(1, 3)], 0.1),
        (vec![q(2, 7)], 0.25),
        (vec![q(5, 12)], 0.05),
        (vec![q(3, 11)], 0.1),
        (vec![sqrt2], 0.05),
        (vec![sqrt2], 0.1),
        (vec![golden], 0.25),
        (vec![e], 0.05),
        (vec![pi], 0.1),
        (vec![golden], 0.05),
        (vec![q(1, 4), q(1, 6)], 0.1),
        (vec![q(1, 5), q(2, 9)], 0.25),
        (vec![q(1, 3), q(3, 8)], 0.05),
        (vec![sqrt2, golden], 0.1),
        (vec![sqrt2, e], 0.25),
        (vec![pi, golden], 0.05),
        (vec![q(1, 7), sqrt2], 0.1),
        (vec![golden, q(2, 5)], 0.25),
        (vec![e, pi], 0.1),
    ];
    specs.into_iter().map(|(t, eps)| BohrSpec::new(t, eps, 0).unwrap()).collect()
}

fn bohr_syndeticity() -> Result<Verdict> {
    let mut t = Table::new(&["spec", "window_len", "density", "bound", "ratio", "ok"]);
    let mut failures = 0;
    let mut min_ratio = f64::INFINITY;
    for spec in bohr_fixture() {
        let need = (10.0 / spec.eps()).powi(spec.rank() as i32).ceil() as i64;
        let len = need.max(10_000);
        let rep = bohr_density_bound_check(&spec, 0, len - 1)?;
        let ok = rep.window_adequate && !rep.violation;
        failures += !ok as u32;
        let ratio = rep.density / rep.bound;
        min_ratio = min_ratio.min(ratio);
        t.push(row![spec, len, rep.density, rep.bound, ratio, ok]);
    }
    Ok((
        failures == 0,
        format!("{failures} of 20 specs below 0.9 of the bound; min density/bound {min_ratio:.4}"),
        json!({ "failures": failures, "min_ratio": min_ratio }),
        t,
    ))
}

fn weyl_decay() -> Result<Verdict> {
    let seq = HartmanSequence::pow("2.5")?;
    let mut t = Table::new(&["sequence", "theta", "N", "abs", "ok"]);
    let mut failures = 0;
    for k in 0..10 {
        let theta = Frequency::rational(5 + 9 * k, 100)?;
        let small = weyl_average(&seq, &theta, 1_000)?.norm();
        let large = weyl_average(&seq, &theta, 1_000_000)?.norm();
        let ok = large < small && large < 0.1;
        failures += !ok as u32;
        t.push(row![seq, theta, 1_000, small, ""]);
        t.push(row![seq, theta, 1_000_000, large, ok]);
    }
    let id = HartmanSequence::identity();
    let half = Frequency::rational(1, 2)?;
    for n in [1u64, 2, 3, 999, 1_000, 1_000_001] {
        let v = weyl_average(&id, &half, n)?.norm();
        let ok = v <= 1.0 / n as f64;
        failures += !ok as u32;
        t.push(row![id, half, n, v, ok]);
    }
    Ok((failures == 0, format!("{failures} failed checks"), json!({ "failures": failures }), t))
}

fn brn_reconstruction() -> Result<Verdict> {
    let mut r = rng(8);
    let mut t = Table::new(&["rule", "q", "sup_error", "bessel_residual"]);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let q = r.random_range(1..=24u64);
        let rule = SetRule::residues(q, &random_residues(q, &mut r))?;
        let f = Indicator::new(rule.clone());
        let m = MeanApproximator::folner(FolnerFamily::Initial, q as usize * 2000)?;
        let brn = brn_reconstruct(&f, &m, &rational_grid(q))?;
        let truth = f.eval_range(0, 9_999);
        let err = (0..10_000i64)
            .into_par_iter()
            .map(|x| (brn.eval(x) - truth[x as usize]).norm())
            .reduce(|| 0.0, f64::max);
        worst = worst.max(err);
        t.push(row![rule, q, err, brn.bessel_residual]);
    }
    Ok((worst <= TOL, format!("max sup error {worst:e} (tolerance 1e-9)"), json!({ "max_sup_error": worst }), t))
}

/// Largest depth whose last block has at most `2^24` points.
fn default_depth() -> Result<usize> {
    let full = ExampleParameters::build(10, GrowthPolicy::default(), 12)?;
    let mut depth = 1;
    for n in 1..=full.depth() {
        if full.b[n - 1] - full.a[n - 1] < 1 << 24 {
            depth = n;
        }
    }
    Ok(depth)
}

fn counterexample_obstruction() -> Result<Verdict> {
    let depth = default_depth()?;
    let params = ExampleParameters::build(10, GrowthPolicy::default(), depth)?;
    let sets = ExampleSets::build(&params)?;
    let phi: TrigPolynomial = "1@0".parse()?;
    let mut t = Table::new(&["n", "f_len", "defect", "density", "obstruction_gap"]);
    let mut last = None;
    for n in 1..=depth {
        let rep = block_report(&sets, &phi, n)?;
        t.push(row![n, rep.block.f_len(), rep.localization.defect, rep.sumset_density, rep.obstruction.gap]);
        last = Some(rep);
    }
    let last = last.expect("depth >= 1");
    let cands = example_scan(&sets, depth, &[0.05, 0.1, 0.25], &crate::config::rational_grid_upto(12), 8, 4)?;
    let rank1: Vec<_> = cands.into_iter().filter(|c| c.spec.rank() == 1).collect();
    let min_defect = rank1.iter().map(|c| c.defect).fold(f64::INFINITY, f64::min);
    let loc_ok = last.localization.defect <= 0.05;
    let dens_ok = (last.sumset_density - 0.5).abs() <= 0.02;
    let scan_ok = !rank1.is_empty() && min_defect >= 0.4;
    Ok((
        loc_ok && dens_ok && scan_ok,
        format!(
            "block {depth}: localization defect {:.4} (need <= 0.05), density {:.4} (need within 0.02 of 0.5), \
             min rank-1 defect {:.4} (need >= 0.4)",
            last.localization.defect, last.sumset_density, min_defect
        ),
        json!({
            "depth": depth,
            "last_block": last,
            "localization_ok": loc_ok,
            "density_ok": dens_ok,
            "scan_ok": scan_ok,
            "rank1_candidates": rank1.len(),
            "rank1_min_defect": min_defect,
            "rank1_top": &rank1[..rank1.len().min(20)],
        }),
        t,
    ))
}

fn level_set_containment() -> Result<Verdict> {
    let mut r = rng(10);
    let mut t = Table::new(&["a", "b", "lcm", "delta", "level_count", "outside_count", "defect"]);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (qa, qb) = (r.random_range(1..=12u64), r.random_range(1..=12u64));
        let a = SetRule::residues(qa, &random_residues(qa, &mut r))?;
        let b = SetRule::residues(qb, &random_residues(qb, &mut r))?;
        let l = qa.lcm(&qb);
        let m = MeanApproximator::folner(FolnerFamily::Initial, l as usize * 1000)?;
        let exp = convolution_expansion_on_z(&a, &b, &m, &m, &rational_grid(l))?;
        let delta = half_min_positive(&exp.h, TOL).unwrap_or(f64::INFINITY);
        let rep = containment_report(&exp.h, &a, &b, (0, 999_999), delta, 2 * l)?;
        worst = worst.max(rep.defect);
        t.push(row![a, b, l, delta, rep.level_count, rep.outside_count, rep.defect]);
    }
    Ok((worst <= 1e-3, format!("max defect {worst:e} (tolerance 1e-3)"), json!({ "max_defect": worst }), t))
}
