//! Densities and largeness of integer sets, decided on finite windows.
//!
//! Thick, syndetic and piecewise syndetic are answered at an explicit scale
//! (`L`, `g`) with a certificate that replays against the bitset.

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bits::{Bitset, RankIndex};
use crate::error::{LabError, Result};
use crate::means::BoundedFunction;
use crate::rules::SetRule;

pub const DEFAULT_CAP_BITS: u64 = 1 << 28;

/// Largest window that may be materialized, from `SUMSETLAB_CAP_BITS` if set.
pub fn cap_bits() -> u64 {
    std::env::var("SUMSETLAB_CAP_BITS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP_BITS)
}

fn window_len(lo: i64, hi: i64) -> Result<u64> {
    if hi < lo {
        return Err(LabError::domain(format!("window [{lo}, {hi}] is empty")));
    }
    let len = (hi as i128 - lo as i128 + 1) as u128;
    let cap = cap_bits();
    if len > cap as u128 {
        return Err(LabError::capacity(format!("window [{lo}, {hi}]"), len, cap as u128));
    }
    Ok(len as u64)
}

/// A set of integers known exactly on `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct WindowSet {
    lo: i64,
    hi: i64,
    bits: Bitset,
    rank: RankIndex,
    rule: Option<SetRule>,
}

impl WindowSet {
    pub fn from_rule(rule: &SetRule, lo: i64, hi: i64) -> Result<Self> {
        window_len(lo, hi)?;
        let bits = rule.materialize(lo, hi)?;
        Ok(Self::assemble(lo, bits, Some(rule.clone())))
    }

    pub fn from_bitset(lo: i64, bits: Bitset) -> Result<Self> {
        // zero length, not zero members
        #[allow(clippy::len_zero)]
        if bits.len() == 0 {
            return Err(LabError::domain("window needs at least one position"));
        }
        window_len(lo, lo + bits.len() as i64 - 1)?;
        Ok(Self::assemble(lo, bits, None))
    }

    pub fn from_members(lo: i64, hi: i64, members: impl IntoIterator<Item = i64>) -> Result<Self> {
        let len = window_len(lo, hi)? as usize;
        let mut bits = Bitset::new(len);
        for x in members {
            if lo <= x && x <= hi {
                bits.insert((x - lo) as usize);
            }
        }
        Ok(Self::assemble(lo, bits, None))
    }

    fn assemble(lo: i64, bits: Bitset, rule: Option<SetRule>) -> Self {
        let rank = RankIndex::build(&bits);
        WindowSet {
            lo,
            hi: lo + bits.len() as i64 - 1,
            bits,
            rank,
            rule,
        }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> u64 {
        self.bits.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &Bitset {
        &self.bits
    }

    pub fn rule(&self) -> Option<&SetRule> {
        self.rule.as_ref()
    }

    pub fn covers(&self, lo: i64, hi: i64) -> bool {
        self.lo <= lo && hi <= self.hi
    }

    /// Membership; outside the window the rule decides, and without a rule
    /// the answer is `false`.
    pub fn contains(&self, x: i64) -> bool {
        if self.lo <= x && x <= self.hi {
            self.bits.contains((x - self.lo) as usize)
        } else {
            self.rule.as_ref().is_some_and(|r| r.contains(x))
        }
    }

    /// Members in `[lo, hi]` clipped to the window.
    pub fn count(&self, lo: i64, hi: i64) -> u64 {
        let (lo, hi) = (lo.max(self.lo), hi.min(self.hi));
        if lo > hi {
            return 0;
        }
        self.rank.count(&self.bits, (lo - self.lo) as usize, (hi - self.lo) as usize) as u64
    }

    /// Members in `[lo, hi]`, streaming from the rule beyond the window.
    pub fn count_exact(&self, lo: i64, hi: i64) -> Result<u64> {
        if self.covers(lo, hi) {
            return Ok(self.count(lo, hi));
        }
        let rule = self.rule.as_ref().ok_or_else(|| {
            LabError::capacity(
                format!("count over [{lo}, {hi}] outside a rule-less window [{}, {}]", self.lo, self.hi),
                (hi as i128 - lo as i128 + 1) as u128,
                self.len() as u128,
            )
        })?;
        stream_count(rule, lo, hi)
    }

    pub fn members(&self) -> impl Iterator<Item = i64> + '_ {
        self.bits.iter_ones().map(|i| self.lo + i as i64)
    }

    pub fn count_ones(&self) -> u64 {
        self.bits.count_ones() as u64
    }

    pub fn density(&self) -> f64 {
        self.count_ones() as f64 / self.len() as f64
    }

    /// `A + t`, on the shifted window.
    pub fn translate(&self, t: i64) -> WindowSet {
        WindowSet {
            lo: self.lo + t,
            hi: self.hi + t,
            bits: self.bits.clone(),
            rank: self.rank.clone(),
            rule: self.rule.as_ref().map(|r| SetRule::Translate(Box::new(r.clone()), t)),
        }
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<WindowSet> {
        if !self.covers(lo, hi) || lo > hi {
            return Err(LabError::domain(format!(
                "[{lo}, {hi}] is not inside [{}, {}]",
                self.lo, self.hi
            )));
        }
        let bits = self.bits.slice((lo - self.lo) as usize, (hi - lo + 1) as usize);
        let mut w = Self::assemble(lo, bits, None);
        w.rule = self.rule.clone();
        Ok(w)
    }

    /// Runs of consecutive members as `(start, length)`.
    pub fn runs(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.bits.runs().map(|(s, l)| (self.lo + s as i64, l as u64))
    }
}

/// Counts rule members in chunks no larger than the cap.
fn stream_count(rule: &SetRule, lo: i64, hi: i64) -> Result<u64> {
    let chunk = cap_bits().min(1 << 24) as i64;
    let mut total = 0u64;
    let mut start = lo;
    while start <= hi {
        let end = hi.min(start.saturating_add(chunk - 1));
        total += rule.materialize(start, end)?.count_ones() as u64;
        if end == i64::MAX {
            break;
        }
        start = end + 1;
    }
    Ok(total)
}

/// Intervals `F_n = [c_n, d_n]` with `|F_n| >= n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum FolnerFamily {
    /// `[-n, n]`.
    Centered,
    /// `[0, n - 1]`.
    Initial,
    /// `F_n` is the `n`-th listed interval.
    Explicit(Vec<(i64, i64)>),
}

impl FolnerFamily {
    pub fn explicit(intervals: Vec<(i64, i64)>) -> Result<Self> {
        for (k, &(c, d)) in intervals.iter().enumerate() {
            if d < c || ((d - c + 1) as u64) < (k as u64 + 1) {
                return Err(LabError::domain(format!(
                    "interval {} = [{c}, {d}] is shorter than its index",
                    k + 1
                )));
            }
        }
        Ok(FolnerFamily::Explicit(intervals))
    }

    pub fn interval(&self, n: usize) -> Result<(i64, i64)> {
        if n == 0 {
            return Err(LabError::domain("Folner index starts at 1"));
        }
        match self {
            FolnerFamily::Centered => Ok((-(n as i64), n as i64)),
            FolnerFamily::Initial => Ok((0, n as i64 - 1)),
            FolnerFamily::Explicit(v) => v
                .get(n - 1)
                .copied()
                .ok_or_else(|| LabError::domain(format!("family lists {} intervals, asked for {n}", v.len()))),
        }
    }

    /// Indices `k` in the dyadic tail `[n/2, n]`.
    pub fn tail(n: usize) -> std::ops::RangeInclusive<usize> {
        (n / 2).max(1)..=n.max(1)
    }

    fn nested(&self) -> bool {
        !matches!(self, FolnerFamily::Explicit(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    Lower,
    Upper,
    BanachUpper,
}

/// A density value with the window that witnesses it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub kind: DensityKind,
    pub value: f64,
    pub count: u64,
    /// Witnessing window `[lo, hi]`; its start is the translate `t`.
    pub window: (i64, i64),
    /// Folner index for Folner estimates, window length for Banach estimates.
    pub scale: u64,
}

impl DensityEstimate {
    /// Recounts the witnessing window.
    pub fn recheck(&self, a: &WindowSet) -> Result<bool> {
        Ok(a.count_exact(self.window.0, self.window.1)? == self.count)
    }
}

/// Running min and max of `|A cap F_k| / |F_k|` over `k` in `[n/2, n]`.
pub fn folner_density(a: &WindowSet, fam: &FolnerFamily, n: usize) -> Result<(DensityEstimate, DensityEstimate)> {
    let tail = FolnerFamily::tail(n);
    let intervals: Vec<(usize, (i64, i64))> = tail
        .map(|k| fam.interval(k).map(|iv| (k, iv)))
        .collect::<Result<_>>()?;
    let hull = intervals
        .iter()
        .fold((i64::MAX, i64::MIN), |(l, h), &(_, (c, d))| (l.min(c), h.max(d)));
    let counts: Vec<u64> = if a.covers(hull.0, hull.1) {
        intervals.iter().map(|&(_, (c, d))| a.count(c, d)).collect()
    } else if window_len(hull.0, hull.1).is_ok() && a.rule().is_some() {
        let w = WindowSet::from_rule(a.rule().unwrap(), hull.0, hull.1)?;
        intervals.iter().map(|&(_, (c, d))| w.count(c, d)).collect()
    } else if fam.nested() && a.rule().is_some() {
        // grow from the first interval one endpoint at a time
        let rule = a.rule().unwrap();
        let (c0, d0) = intervals[0].1;
        let mut acc = a.count_exact(c0, d0)?;
        let mut prev = (c0, d0);
        let mut out = vec![acc];
        for &(_, (c, d)) in &intervals[1..] {
            acc += (c..prev.0).filter(|&x| rule.contains(x)).count() as u64;
            acc += (prev.1 + 1..=d).filter(|&x| rule.contains(x)).count() as u64;
            prev = (c, d);
            out.push(acc);
        }
        out
    } else {
        intervals
            .iter()
            .map(|&(_, (c, d))| a.count_exact(c, d))
            .collect::<Result<_>>()?
    };
    let estimate = |kind, i: usize| {
        let (k, (c, d)) = intervals[i];
        DensityEstimate {
            kind,
            value: counts[i] as f64 / (d - c + 1) as f64,
            count: counts[i],
            window: (c, d),
            scale: k as u64,
        }
    };
    let ratio = |i: usize| counts[i] as f64 / (intervals[i].1 .1 - intervals[i].1 .0 + 1) as f64;
    let mut lo_i = 0;
    let mut hi_i = 0;
    for i in 1..intervals.len() {
        if ratio(i) < ratio(lo_i) {
            lo_i = i;
        }
        if ratio(i) > ratio(hi_i) {
            hi_i = i;
        }
    }
    Ok((estimate(DensityKind::Lower, lo_i), estimate(DensityKind::Upper, hi_i)))
}

/// `max_t |A cap [t, t + L)| / L` over windows inside `[lo, hi]`; the
/// certificate is the smallest maximizing `t`.
pub fn banach_upper_density(a: &WindowSet, len: u64, range: (i64, i64)) -> Result<DensityEstimate> {
    let (lo, hi) = range;
    if len == 0 {
        return Err(LabError::domain("window length must be at least 1"));
    }
    if hi < lo || (hi as i128 - lo as i128 + 1) < len as i128 {
        return Err(LabError::domain(format!("window length {len} exceeds search range [{lo}, {hi}]")));
    }
    if !a.covers(lo, hi) {
        return Err(LabError::capacity(
            format!("search range [{lo}, {hi}] outside materialized [{}, {}]", a.lo(), a.hi()),
            (hi as i128 - lo as i128 + 1) as u128,
            a.len() as u128,
        ));
    }
    let l = len as i64;
    let last = hi - l + 1;
    const CHUNK: i64 = 1 << 16;
    let starts: Vec<i64> = (0..=(last - lo) / CHUNK).map(|c| lo + c * CHUNK).collect();
    let (count, t) = starts
        .par_iter()
        .map(|&s| {
            let e = (s + CHUNK - 1).min(last);
            let mut best = (0u64, s);
            for t in s..=e {
                let c = a.count(t, t + l - 1);
                if c > best.0 {
                    best = (c, t);
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0u64, lo), |acc, b| if b.0 > acc.0 { b } else { acc });
    Ok(DensityEstimate {
        kind: DensityKind::BanachUpper,
        value: count as f64 / len as f64,
        count,
        window: (t, t + l - 1),
        scale: len,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThickReport {
    pub scale: u64,
    /// First `t` with `[t, t + L) subset A` inside the window.
    pub witness: Option<i64>,
    pub max_run: u64,
    pub max_run_start: Option<i64>,
}

pub fn classify_thick(a: &WindowSet, len: u64) -> ThickReport {
    let mut witness = None;
    let mut best: (u64, Option<i64>) = (0, None);
    for (s, l) in a.runs() {
        if witness.is_none() && l >= len {
            witness = Some(s);
        }
        if l > best.0 {
            best = (l, Some(s));
        }
    }
    ThickReport {
        scale: len,
        witness,
        max_run: best.0,
        max_run_start: best.1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyndeticReport {
    pub gap_bound: u64,
    /// `None` with fewer than two members: the window cannot decide.
    pub syndetic: Option<bool>,
    pub max_gap: Option<u64>,
    /// Consecutive members realizing the largest gap.
    pub gap_interval: Option<(i64, i64)>,
}

/// Largest difference between consecutive members, against the bound `g`.
pub fn classify_syndetic(a: &WindowSet, g: u64) -> SyndeticReport {
    let mut prev: Option<i64> = None;
    let mut best: Option<(u64, (i64, i64))> = None;
    for (s, l) in a.runs() {
        // inside a run consecutive members differ by 1
        let inner = (l >= 2).then_some((1, (s, s + 1)));
        let across = prev.map(|p| ((s - p) as u64, (p, s)));
        for cand in [inner, across].into_iter().flatten() {
            if best.is_none_or(|(b, _)| cand.0 > b) {
                best = Some(cand);
            }
        }
        prev = Some(s + l as i64 - 1);
    }
    match best {
        None => SyndeticReport {
            gap_bound: g,
            syndetic: None,
            max_gap: None,
            gap_interval: None,
        },
        Some((gap, iv)) => SyndeticReport {
            gap_bound: g,
            syndetic: Some(gap <= g),
            max_gap: Some(gap),
            gap_interval: Some(iv),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PiecewiseSyndeticReport {
    pub gap: u64,
    pub scale: u64,
    /// First `t` with `[t, t + L) subset A + [0, g]`.
    pub witness: Option<i64>,
    pub max_run: u64,
}

/// Thickness of `A + [0, g]` at scale `L`, from the window's members only.
pub fn classify_piecewise_syndetic(a: &WindowSet, g: u64, len: u64) -> Result<PiecewiseSyndeticReport> {
    if len == 0 {
        return Err(LabError::domain("run length must be at least 1"));
    }
    let n = a.len() as usize;
    let mut thick = Bitset::new(n);
    for (s, l) in a.bits().runs() {
        thick.insert_range(s, (s + l - 1).saturating_add(g as usize));
    }
    let t = WindowSet::from_bitset(a.lo(), thick)?;
    let rep = classify_thick(&t, len);
    Ok(PiecewiseSyndeticReport {
        gap: g,
        scale: len,
        witness: rep.witness,
        max_run: rep.max_run,
    })
}

/// How probes `F` are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeMode {
    /// Every `k`-subset, failing with a capacity error beyond `cap` probes.
    Exhaustive { cap: u64 },
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddabilityReport {
    pub probe_size: usize,
    pub probes: u64,
    pub successes: u64,
    /// `(probe, t)` for every successful probe, in probe order.
    pub witnesses: Vec<(Vec<i64>, i64)>,
    pub failures: Vec<Vec<i64>>,
}

impl EmbeddabilityReport {
    pub fn all_embedded(&self) -> bool {
        self.successes == self.probes
    }
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Draws `k`-element probes from `pool`.
pub(crate) fn draw_probes(pool: &[i64], k: usize, mode: ProbeMode) -> Result<Vec<Vec<i64>>> {
    if k == 0 {
        return Err(LabError::domain("probe size must be at least 1"));
    }
    if pool.len() < k {
        return Ok(Vec::new());
    }
    match mode {
        ProbeMode::Exhaustive { cap } => {
            let total = binomial(pool.len() as u64, k as u64).unwrap_or(u64::MAX);
            if total > cap {
                return Err(LabError::capacity(format!("{k}-element probes"), total as u128, cap as u128));
            }
            let mut out = Vec::with_capacity(total as usize);
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                out.push(idx.iter().map(|&i| pool[i]).collect());
                let mut i = k;
                loop {
                    if i == 0 {
                        return Ok(out);
                    }
                    i -= 1;
                    if idx[i] < pool.len() - k + i {
                        break;
                    }
                }
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
        ProbeMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count)
                .map(|_| {
                    let mut v: Vec<i64> = sample(&mut rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
                    v.sort_unstable();
                    v
                })
                .collect())
        }
    }
}

/// A translate `t` with `probe + t subset target`, preferring small `|t|`.
pub(crate) fn find_translate(probe: &[i64], target: &WindowSet) -> Option<i64> {
    let (&f0, &f1) = (probe.first()?, probe.last()?);
    let mut ts: Vec<i64> = target
        .members()
        .map(|y| y - f0)
        .filter(|&t| f1 + t <= target.hi())
        .collect();
    ts.sort_by_key(|&t| (t.unsigned_abs(), t));
    ts.into_iter()
        .find(|&t| probe.iter().all(|&x| target.contains(x + t)))
}

pub(crate) fn embed_probes(probes: Vec<Vec<i64>>, target: &WindowSet, k: usize) -> EmbeddabilityReport {
    let results: Vec<Option<i64>> = probes.par_iter().map(|p| find_translate(p, target)).collect();
    let mut rep = EmbeddabilityReport {
        probe_size: k,
        probes: probes.len() as u64,
        successes: 0,
        witnesses: Vec::new(),
        failures: Vec::new(),
    };
    for (p, r) in probes.into_iter().zip(results) {
        match r {
            Some(t) => {
                rep.successes += 1;
                rep.witnesses.push((p, t));
            }
            None => rep.failures.push(p),
        }
    }
    rep
}

/// For `k`-element probes `F subset A` (inside `A`'s window), a translate
/// with `F + t subset B` inside `B`'s window.
pub fn finite_embeddability(a: &WindowSet, b: &WindowSet, k: usize, mode: ProbeMode) -> Result<EmbeddabilityReport> {
    let pool: Vec<i64> = a.members().collect();
    let probes = draw_probes(&pool, k, mode)?;
    Ok(embed_probes(probes, b, k))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub depth: usize,
    #[serde(serialize_with = "crate::means::ser_complex")]
    pub value: Complex64,
    /// Largest spread of the real or imaginary part over `k` in `[n/2, n]`.
    pub oscillation: f64,
}

/// `lambda_n(f) = |F_n|^{-1} sum_{F_n} f`, with its dyadic-tail spread.
pub fn mean_from_family(fam: &FolnerFamily, f: &dyn BoundedFunction, n: usize) -> Result<MeanEstimate> {
    let intervals: Vec<(i64, i64)> = FolnerFamily::tail(n).map(|k| fam.interval(k)).collect::<Result<_>>()?;
    let hull = intervals
        .iter()
        .fold((i64::MAX, i64::MIN), |(l, h), &(c, d)| (l.min(c), h.max(d)));
    window_len(hull.0, hull.1)?;
    let values = f.eval_range(hull.0, hull.1);
    let mut prefix = Vec::with_capacity(values.len() + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    prefix.push(acc);
    for v in &values {
        acc += v;
        prefix.push(acc);
    }
    let means: Vec<Complex64> = intervals
        .iter()
        .map(|&(c, d)| {
            let (i, j) = ((c - hull.0) as usize, (d - hull.0) as usize + 1);
            (prefix[j] - prefix[i]) / (d - c + 1) as f64
        })
        .collect();
    // the reported value is summed directly rather than by prefix difference
    let (c, d) = *intervals.last().unwrap();
    let direct: Complex64 = values[(c - hull.0) as usize..=(d - hull.0) as usize].iter().sum::<Complex64>() / (d - c + 1) as f64;
    let spread = |part: fn(&Complex64) -> f64| {
        let (mn, mx) = means
            .iter()
            .map(part)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        mx - mn
    };
    Ok(MeanEstimate {
        depth: n,
        value: direct,
        oscillation: spread(|z| z.re).max(spread(|z| z.im)),
    })
}
