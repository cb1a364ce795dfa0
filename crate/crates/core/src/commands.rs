//! One function per subcommand: a normalized configuration in, a report out.

use rayon::prelude::*;
use serde_json::json;

use crate::abelian::FiniteAbelianGroup;
use crate::bohr::{bohr_density_bound_check, bohr_embeddability, piecewise_bohr_scan, BohrSpec, ScanProbe};
use crate::counterexample::{block_report, tail_oscillation, ExampleParameters, ExampleSets};
use crate::density::{
    banach_upper_density, classify_piecewise_syndetic, classify_syndetic, classify_thick, folner_density, ProbeMode,
    WindowSet,
};
use crate::error::{LabError, Result};
use crate::exhaustive::{kneser_scan, steinhaus_scan};
use crate::frequency::Frequency;
use crate::hartman::{weyl_average, HartmanSequence};
use crate::means::{brn_reconstruct, mean_fourier_coefficient, BoundedFunction, Indicator, MeanApproximator, TrigPolynomial};
use crate::report::{to_value, Plot, PlotStyle, RunReport, Series, Table};
use crate::rules::SetRule;
use crate::row;
use crate::spectral::{convolve, dft};
use crate::sumset::{kneser_certificate, level_set_sumset_check, steinhaus_level_set, sumset, GroupSubset};
use crate::config::ExperimentConfig;
use crate::suite;

/// Runs a command; the configuration is normalized first.
pub fn execute(config: &ExperimentConfig) -> Result<RunReport> {
    let c = config.normalize()?;
    match c.command.as_str() {
        "group dft" => group_dft(&c),
        "group convolve" => group_convolve(&c),
        "group kneser" => group_kneser(&c),
        "group steinhaus" => group_steinhaus(&c),
        "density scan" => density_scan(&c),
        "density classify" => density_classify(&c),
        "bohr window" => bohr_window_cmd(&c),
        "bohr scan" => bohr_scan(&c),
        "bohr embed" => bohr_embed(&c),
        "means coeff" => means_coeff(&c),
        "means weyl" => means_weyl(&c),
        "means brn" => means_brn(&c),
        "example build" => example_build(&c),
        "example verify" => example_verify(&c),
        "suite acceptance" => suite_acceptance(&c),
        other => Err(LabError::parse(format!("unknown command {other:?}"))),
    }
}

fn subset(c: &ExperimentConfig, g: &FiniteAbelianGroup, name: &str) -> Result<GroupSubset> {
    GroupSubset::parse(g, &c.text(name)?)
}

/// Both summands, or neither.
fn optional_pair(c: &ExperimentConfig, g: &FiniteAbelianGroup) -> Result<Option<(GroupSubset, GroupSubset)>> {
    match (c.has("a"), c.has("b")) {
        (true, true) => Ok(Some((subset(c, g, "a")?, subset(c, g, "b")?))),
        (false, false) => Ok(None),
        _ => Err(LabError::parse("give both --a and --b, or neither for an exhaustive scan")),
    }
}

fn window(c: &ExperimentConfig) -> Result<(i64, i64)> {
    let (lo, hi) = (c.int("lo")?, c.int("hi")?);
    if hi < lo {
        return Err(LabError::domain(format!("empty window [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}

fn group_dft(c: &ExperimentConfig) -> Result<RunReport> {
    let g: FiniteAbelianGroup = c.parsed("group")?;
    let a = subset(c, &g, "a")?;
    let s = dft(&a.indicator());
    let mut t = Table::new(&["index", "character", "re", "im", "abs"]);
    for (i, z) in s.coefficients().iter().enumerate() {
        t.push(row![i, g.element_at(i), z.re, z.im, z.norm()]);
    }
    let result = json!({
        "group": g.to_string(),
        "a": a.to_string(),
        "energy": s.energy(),
        "mean": s.coefficient(0).re,
    });
    Ok(RunReport::new(c, result, t))
}

fn group_convolve(c: &ExperimentConfig) -> Result<RunReport> {
    let g: FiniteAbelianGroup = c.parsed("group")?;
    let (a, b) = (subset(c, &g, "a")?, subset(c, &g, "b")?);
    let conv = convolve(&a.indicator(), &b.indicator())?;
    let rep = level_set_sumset_check(&a.indicator(), &b.indicator())?;
    let s = sumset(&a, &b)?;
    let mut t = Table::new(&["index", "element", "re", "im", "in_sumset"]);
    for (i, z) in conv.values().iter().enumerate() {
        t.push(row![i, g.element_at(i), z.re, z.im, s.contains(i)]);
    }
    Ok(RunReport::new(c, to_value(&rep), t))
}

fn group_kneser(c: &ExperimentConfig) -> Result<RunReport> {
    let g: FiniteAbelianGroup = c.parsed("group")?;
    match optional_pair(c, &g)? {
        Some((a, b)) => {
            let cert = kneser_certificate(&a, &b)?;
            let mut t = Table::new(&[
                "a_size",
                "b_size",
                "sumset_size",
                "stabilizer_order",
                "kneser_bound",
                "small_sumset",
                "satisfied_inequality",
                "union_of_cosets",
            ]);
            t.push(row![
                cert.a_size,
                cert.b_size,
                cert.sumset_size,
                cert.stabilizer.order(),
                cert.kneser_bound,
                cert.small_sumset,
                cert.satisfied_inequality,
                cert.union_of_cosets
            ]);
            Ok(RunReport::new(c, to_value(&cert), t))
        }
        None => {
            let scan = kneser_scan(&g)?;
            let mut t = Table::new(&[
                "group",
                "pairs",
                "small_sumset_pairs",
                "small_with_trivial_stabilizer",
                "critical_violations",
                "inequality_violations",
                "fixed_point_violations",
            ]);
            t.push(row![
                scan.group,
                scan.pairs,
                scan.small_sumset_pairs,
                scan.small_with_trivial_stabilizer,
                scan.critical_violations,
                scan.inequality_violations,
                scan.fixed_point_violations
            ]);
            Ok(RunReport::new(c, to_value(&scan), t))
        }
    }
}

fn group_steinhaus(c: &ExperimentConfig) -> Result<RunReport> {
    let g: FiniteAbelianGroup = c.parsed("group")?;
    match optional_pair(c, &g)? {
        Some((a, b)) => {
            let level = steinhaus_level_set(&a, &b)?;
            let s = sumset(&a, &b)?;
            let mut t = Table::new(&["level_set", "sumset", "equal"]);
            t.push(row![level, s, level == s]);
            let result = json!({ "level_set": level, "sumset": s, "equal": level == s });
            Ok(RunReport::new(c, result, t))
        }
        None => {
            let scan = steinhaus_scan(&g)?;
            let mut t = Table::new(&["group", "pairs", "mismatches", "empty_level_sets"]);
            t.push(row![scan.group, scan.pairs, scan.mismatches, scan.empty_level_sets]);
            Ok(RunReport::new(c, to_value(&scan), t))
        }
    }
}

fn density_scan(c: &ExperimentConfig) -> Result<RunReport> {
    let rule: SetRule = c.parsed("rule")?;
    let (lo, hi) = window(c)?;
    let w = WindowSet::from_rule(&rule, lo, hi)?;
    let depth = c.count("depth")? as usize;
    let (lower, upper) = folner_density(&w, &c.family("family")?, depth)?;
    let banach = banach_upper_density(&w, c.count("len")?, (lo, hi))?;
    let mut t = Table::new(&["kind", "value", "count", "window_lo", "window_hi", "scale"]);
    for e in [&lower, &upper, &banach] {
        let kind = to_value(&e.kind);
        t.push(row![kind.as_str().unwrap_or_default(), e.value, e.count, e.window.0, e.window.1, e.scale]);
    }
    let result = json!({ "lower": lower, "upper": upper, "banach_upper": banach, "window_density": w.density() });
    Ok(RunReport::new(c, result, t))
}

fn density_classify(c: &ExperimentConfig) -> Result<RunReport> {
    let rule: SetRule = c.parsed("rule")?;
    let (lo, hi) = window(c)?;
    let w = WindowSet::from_rule(&rule, lo, hi)?;
    let (len, gap) = (c.count("len")?, c.count("gap")?);
    let thick = classify_thick(&w, len);
    let synd = classify_syndetic(&w, gap);
    let pws = classify_piecewise_syndetic(&w, gap, len)?;
    let mut t = Table::new(&["property", "verdict", "witness"]);
    let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
    t.push(row!["thick", thick.witness.is_some(), opt(thick.witness)]);
    let verdict = synd.syndetic.map(|b| b.to_string()).unwrap_or_else(|| "undecided".into());
    t.push(row!["syndetic", verdict, synd.max_gap.map(|g| g.to_string()).unwrap_or_default()]);
    t.push(row!["piecewise_syndetic", pws.witness.is_some(), opt(pws.witness)]);
    let result = json!({ "thick": thick, "syndetic": synd, "piecewise_syndetic": pws });
    Ok(RunReport::new(c, result, t))
}

fn bohr_window_cmd(c: &ExperimentConfig) -> Result<RunReport> {
    let spec: BohrSpec = c.parsed("spec")?;
    let (lo, hi) = window(c)?;
    let rep = bohr_density_bound_check(&spec, lo, hi)?;
    let mut t = Table::new(&["spec", "eps", "density", "bound", "window_adequate", "violation"]);
    let mut measured = Vec::new();
    let mut bound = Vec::new();
    for k in 1..=10 {
        let eps = k as f64 / 20.0;
        let s = spec.with_eps(eps)?;
        let r = bohr_density_bound_check(&s, lo, hi)?;
        t.push(row![s, eps, r.density, r.bound, r.window_adequate, r.violation]);
        measured.push((eps, r.density));
        bound.push((eps, r.bound));
    }
    let plot = Plot {
        title: format!("Bohr density, theta = {:?}", spec.thetas().iter().map(|t| t.to_string()).collect::<Vec<_>>()),
        x_label: "eps".into(),
        y_label: "density".into(),
        log_x: false,
        style: PlotStyle::Line,
        series: vec![
            Series { label: "window density".into(), points: measured },
            Series { label: "(floor(1/eps)+1)^-d".into(), points: bound },
        ],
    };
    Ok(RunReport::new(c, to_value(&rep), t).with_plot(plot))
}

fn bohr_scan(c: &ExperimentConfig) -> Result<RunReport> {
    let rule: SetRule = c.parsed("rule")?;
    let (lo, hi) = window(c)?;
    let target = WindowSet::from_rule(&rule, lo, hi)?;
    let run_len = match c.count("run-len")? {
        0 => (target.len() / 4).max(1),
        l => l,
    };
    let probe = ScanProbe {
        centers: c.count("centers")?,
        run_len,
        seeds: c.count("seeds")? as usize,
    };
    let cands = piecewise_bohr_scan(&target, c.count("rank")? as usize, &c.floats("eps")?, &c.frequencies("thetas")?, &probe)?;
    let t = candidate_table(&cands);
    let result = json!({ "candidates": cands.len(), "probe": probe, "top": &cands[..cands.len().min(10)] });
    Ok(RunReport::new(c, result, t))
}

pub(crate) fn candidate_table(cands: &[crate::bohr::BohrCandidate]) -> Table {
    let mut t = Table::new(&["rank", "spec", "score", "defect", "run_lo", "run_hi", "members", "outside"]);
    for x in cands {
        t.push(row![
            x.spec.rank(),
            x.spec,
            x.score,
            x.defect,
            x.run.0,
            x.run.1,
            x.members_in_run,
            x.outside_in_run
        ]);
    }
    t
}

fn bohr_embed(c: &ExperimentConfig) -> Result<RunReport> {
    let spec: BohrSpec = c.parsed("spec")?;
    let rule: SetRule = c.parsed("rule")?;
    let (lo, hi) = window(c)?;
    let target = WindowSet::from_rule(&rule, lo, hi)?;
    let seed = c.count("seed")?;
    let mode = ProbeMode::Sampled { count: c.count("probes")?, seed };
    let rep = bohr_embeddability(&spec, &target, c.count("k")? as usize, mode)?;
    let mut t = Table::new(&["probe", "translate", "embedded"]);
    let join = |p: &[i64]| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    for (p, tr) in &rep.witnesses {
        t.push(row![join(p), tr, true]);
    }
    for p in &rep.failures {
        t.push(row![join(p), "", false]);
    }
    let result = json!({
        "probe_size": rep.probe_size,
        "probes": rep.probes,
        "successes": rep.successes,
        "success_rate": if rep.probes == 0 { 0.0 } else { rep.successes as f64 / rep.probes as f64 },
    });
    Ok(RunReport::new(c, result, t).with_seed("probes", seed))
}

fn approximator(c: &ExperimentConfig) -> Result<MeanApproximator> {
    let depth = c.count("depth")? as usize;
    if c.has("seq") {
        MeanApproximator::hartman(c.parsed::<HartmanSequence>("seq")?, depth)
    } else {
        MeanApproximator::folner(c.family("family")?, depth)
    }
}

fn means_coeff(c: &ExperimentConfig) -> Result<RunReport> {
    let f = Indicator::new(c.parsed("rule")?);
    let theta: Frequency = c.parsed("theta")?;
    let m = approximator(c)?;
    let e = mean_fourier_coefficient(&f, &m, &theta)?;
    let mut t = Table::new(&["theta", "re", "im", "abs", "delta"]);
    t.push(row![theta, e.value.re, e.value.im, e.value.norm(), e.delta]);
    let result = json!({ "approximator": m, "theta": theta, "estimate": e });
    Ok(RunReport::new(c, result, t))
}

fn means_weyl(c: &ExperimentConfig) -> Result<RunReport> {
    let seq: HartmanSequence = c.parsed("seq")?;
    let theta: Frequency = c.parsed("theta")?;
    let n = c.count("N")?;
    let mut ns: Vec<u64> = (1..).map(|k| 10u64.pow(k)).take_while(|&p| p < n).collect();
    ns.push(n);
    let mut t = Table::new(&["N", "re", "im", "abs"]);
    let mut pts = Vec::new();
    for &k in &ns {
        let v = weyl_average(&seq, &theta, k)?;
        t.push(row![k, v.re, v.im, v.norm()]);
        pts.push((k as f64, v.norm()));
    }
    let last = *pts.last().unwrap();
    let plot = Plot {
        title: format!("Weyl averages of {seq} at theta = {theta}"),
        x_label: "N".into(),
        y_label: "|average|".into(),
        log_x: true,
        style: PlotStyle::Line,
        series: vec![Series { label: seq.to_string(), points: pts }],
    };
    let result = json!({ "sequence": seq.to_string(), "theta": theta, "N": n, "abs": last.1 });
    Ok(RunReport::new(c, result, t).with_plot(plot))
}

fn means_brn(c: &ExperimentConfig) -> Result<RunReport> {
    let f = Indicator::new(c.parsed("rule")?);
    let m = approximator(c)?;
    let brn = brn_reconstruct(&f, &m, &c.frequencies("thetas")?)?;
    let check = c.count("check")? as i64;
    let sup_error = if check == 0 {
        0.0
    } else {
        let fv = f.eval_range(0, check - 1);
        (0..check)
            .into_par_iter()
            .map(|x| (brn.eval(x) - fv[x as usize]).norm())
            .reduce(|| 0.0, f64::max)
    };
    let mut t = Table::new(&["theta", "re", "im", "abs", "delta"]);
    for (th, e) in brn.frequencies.iter().zip(&brn.coefficients) {
        t.push(row![th, e.value.re, e.value.im, e.value.norm(), e.delta]);
    }
    let result = json!({ "reconstruction": brn, "sup_error": sup_error, "check_window": [0, check - 1] });
    Ok(RunReport::new(c, result, t))
}

fn example_params(c: &ExperimentConfig) -> Result<ExampleParameters> {
    ExampleParameters::build(c.count("a1")?, c.parsed("policy")?, c.count("depth")? as usize)
}

fn example_build(c: &ExperimentConfig) -> Result<RunReport> {
    let params = example_params(c)?;
    let sets = ExampleSets::build(&params)?;
    let ratios = params.ratios();
    let mut t = Table::new(&["n", "a_n", "b_n", "q_n", "i_lo", "i_hi", "j_lo", "j_hi", "f_len", "ratio"]);
    for (k, bl) in sets.blocks.iter().enumerate() {
        let ratio = ratios.get(k).map(|r| r.to_string()).unwrap_or_default();
        t.push(row![bl.n, bl.f.0, bl.f.1, bl.q, bl.i.0, bl.i.1, bl.j.0, bl.j.1, bl.f_len(), ratio]);
    }
    let result = json!({ "parameters": params, "ratios": ratios, "blocks": sets.blocks });
    Ok(RunReport::new(c, result, t))
}

/// Rank-1 scan of `(A + B) cap F_n` with runs of a quarter block.
pub(crate) fn example_scan(
    sets: &ExampleSets,
    n: usize,
    eps: &[f64],
    thetas: &[Frequency],
    seeds: usize,
    centers: u64,
) -> Result<Vec<crate::bohr::BohrCandidate>> {
    let (target, _) = sets.sumset_on_block(n)?;
    let probe = ScanProbe {
        centers,
        run_len: (target.len() / 4).max(1),
        seeds,
    };
    piecewise_bohr_scan(&target, 1, eps, thetas, &probe)
}

fn example_verify(c: &ExperimentConfig) -> Result<RunReport> {
    let params = example_params(c)?;
    let sets = ExampleSets::build(&params)?;
    let phi: TrigPolynomial = c.parsed("phi")?;
    let reports = (1..=params.depth())
        .map(|n| block_report(&sets, &phi, n))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&[
        "n", "f_len", "defect", "density", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "gap", "even_on_i", "odd_on_j",
    ]);
    for r in &reports {
        let o = &r.obstruction;
        t.push(row![
            r.block.n,
            r.block.f_len(),
            r.localization.defect,
            r.sumset_density,
            o.lhs.re,
            o.lhs.im,
            o.rhs.re,
            o.rhs.im,
            o.gap,
            r.even_on_i,
            r.odd_on_j
        ]);
    }
    let scan = if c.flag("scan")? {
        let cands = example_scan(
            &sets,
            params.depth(),
            &c.floats("eps")?,
            &c.frequencies("thetas")?,
            c.count("seeds")? as usize,
            c.count("centers")?,
        )?;
        let rank1: Vec<_> = cands.iter().filter(|x| x.spec.rank() == 1).collect();
        let min_defect = rank1.iter().map(|x| x.defect).fold(f64::INFINITY, f64::min);
        json!({
            "block": params.depth(),
            "rank1_candidates": rank1.len(),
            "rank1_min_defect": if rank1.is_empty() { serde_json::Value::Null } else { min_defect.into() },
            "top": &cands[..cands.len().min(10)],
        })
    } else {
        serde_json::Value::Null
    };
    let plot = Plot {
        title: "Counterexample blocks".into(),
        x_label: "block n".into(),
        y_label: "value".into(),
        log_x: false,
        style: PlotStyle::Line,
        series: vec![
            Series {
                label: "localization defect".into(),
                points: reports.iter().map(|r| (r.block.n as f64, r.localization.defect)).collect(),
            },
            Series {
                label: "d_F(A+B)".into(),
                points: reports.iter().map(|r| (r.block.n as f64, r.sumset_density)).collect(),
            },
        ],
    };
    let result = json!({
        "parameters": params,
        "blocks": reports,
        "tail_oscillation": tail_oscillation(&reports),
        "scan": scan,
    });
    Ok(RunReport::new(c, result, t).with_plot(plot))
}

fn suite_acceptance(c: &ExperimentConfig) -> Result<RunReport> {
    let dir = std::path::PathBuf::from(c.out.clone().unwrap_or_else(|| suite::DEFAULT_OUT.to_string()));
    let outcomes = suite::run_acceptance(&dir)?;
    let mut t = Table::new(&["criterion", "name", "passed", "summary"]);
    for o in &outcomes {
        t.push(row![o.id, o.name, o.passed, o.summary]);
    }
    let result = json!({
        "passed": outcomes.iter().filter(|o| o.passed).count(),
        "failed": outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect::<Vec<_>>(),
        "artifacts": dir.display().to_string(),
    });
    Ok(RunReport::new(c, result, t))
}
