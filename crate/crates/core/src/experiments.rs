//! Monte Carlo experiments and their reports.
//!
//! Replica `i` of a run draws everything from the generator seeded with
//! `derive_seed(seed, i)` and produces one small outcome. Outcomes are
//! collected in replica order and folded on one thread, so a report
//! depends only on the configuration, never on the number of workers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::tau;
use crate::error::{Error, Result};
use crate::extremal::{clique_number, independence_number, nesting_number};
use crate::formulas::{degree_cdf_limit, mean_lj, mean_zk, poisson_pmf};
use crate::graph::{
    degree_unchecked, len_at_least, KCorePeeler,
    MonolithicChecker,
};
use crate::oracle::diagram_rank;
use crate::oriented::{find_balanced_clique, is_strongly_connected_on, orient, scc};
use crate::sampler::{derive_seed, run_discrete, ContinuousProcess, Seed, UniformSampler};
use crate::stats::{chi_square_gof, correlation, tv_to_reference, ChiSquare, Moments};

/// Report schema identifier.
pub const SCHEMA: &str = "chordlab-report/1";

/// Default work budget, in rough elementary steps.
pub const DEFAULT_BUDGET: f64 = 5e10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    DegreeCdf,
    SimpleChords,
    LengthClass,
    JointLengths,
    MonolithicFraction,
    KcoreVsLen,
    ZkConcentration,
    SccTrivial,
    LenStrongConn,
    BalancedClique,
    EvolutionSwitching,
    ModelEquivalence,
    ExtremalScaling,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 13] = [
        ExperimentKind::DegreeCdf,
        ExperimentKind::SimpleChords,
        ExperimentKind::LengthClass,
        ExperimentKind::JointLengths,
        ExperimentKind::MonolithicFraction,
        ExperimentKind::KcoreVsLen,
        ExperimentKind::ZkConcentration,
        ExperimentKind::SccTrivial,
        ExperimentKind::LenStrongConn,
        ExperimentKind::BalancedClique,
        ExperimentKind::EvolutionSwitching,
        ExperimentKind::ModelEquivalence,
        ExperimentKind::ExtremalScaling,
    ];

    pub fn name(self) -> &'static str {
        use ExperimentKind::*;
        match self {
            DegreeCdf => "degree_cdf",
            SimpleChords => "simple_chords",
            LengthClass => "length_class",
            JointLengths => "joint_lengths",
            MonolithicFraction => "monolithic_fraction",
            KcoreVsLen => "kcore_vs_len",
            ZkConcentration => "zk_concentration",
            SccTrivial => "scc_trivial",
            LenStrongConn => "len_strong_conn",
            BalancedClique => "balanced_clique",
            EvolutionSwitching => "evolution_switching",
            ModelEquivalence => "model_equivalence",
            ExtremalScaling => "extremal_scaling",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment kind {s:?}")))
    }
}

/// Kind-specific parameters. Unset fields take per-kind defaults, and the
/// report echoes the values actually used.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Grid of `b` values for `degree_cdf`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_grid: Option<Vec<f64>>,
    /// Length class for `length_class`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    /// Core order, largest length class, or `Z_k` index, depending on kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Length thresholds for `len_strong_conn`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_grid: Option<Vec<usize>>,
    /// Clique size for `balanced_clique`; derived from `epsilon` when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Smallest step checked against the switching envelope.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_min: Option<usize>,
    /// Step from which the evolution must stay monolithic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_m: Option<usize>,
    /// Constant `c` of the `c/m²` switching envelope.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switch_const: Option<f64>,
    /// Constant `t` of the lower bound `sqrt(2n) - t n^(1/6)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Statistics computed by `extremal_scaling`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<Vec<String>>,
    /// Main tolerance of the kind (distance, deviation or fraction).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Tolerance on total variation distance where `tol` means something else.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corr_tol: Option<f64>,
    /// Smallest acceptable frequency for whp events.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_freq: Option<f64>,
    /// Allowed deviation of `(n - R_k)/k` from 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_min_freq: Option<f64>,
    /// Slack `s` in the giant-component bound `1 - s/n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub giant_slack: Option<f64>,
    /// Smallest expected count per chi-square cell.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_cell: Option<f64>,
}

impl Params {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }
}

/// What to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub replicas: u64,
    pub seed: Seed,
    #[serde(default)]
    pub params: Params,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, n: usize, replicas: u64, seed: Seed) -> Self {
        Self { kind, n, replicas, seed, params: Params::default() }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }
}

/// How to run it. None of these affect the report, except that a run over
/// budget is refused.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub budget: f64,
    pub unsafe_no_cap: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { workers: None, budget: DEFAULT_BUDGET, unsafe_no_cap: false }
    }
}

/// One estimated quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_law: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub value: i64,
    pub count: u64,
    pub empirical: f64,
    pub reference: f64,
}

/// Empirical law of an integer statistic against a reference law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    pub name: String,
    pub reference_law: String,
    pub cells: Vec<Cell>,
    /// Reference mass above the largest observed value.
    pub reference_tail: f64,
    pub tv: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_square: Option<ChiSquare>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    /// `"<="` or `">="`.
    pub relation: String,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, observed: f64, bound: f64) -> Self {
        Self { name: name.into(), observed, relation: "<=".into(), bound, pass: observed <= bound }
    }

    fn at_least(name: &str, observed: f64, bound: f64) -> Self {
        Self { name: name.into(), observed, relation: ">=".into(), bound, pass: observed >= bound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
    pub replicas_per_second: f64,
    pub workers: usize,
}

/// Result of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub kind: ExperimentKind,
    pub n: usize,
    pub replicas: u64,
    pub seed: Seed,
    pub seed_derivation: String,
    pub params: Params,
    pub estimates: Vec<Estimate>,
    pub distributions: Vec<DistributionReport>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub samples: BTreeMap<String, Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ExperimentReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn estimate(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    pub fn distribution(&self, name: &str) -> Option<&DistributionReport> {
        self.distributions.iter().find(|d| d.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report json")
    }

    /// JSON without the timing block; identical across reruns.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.timing = None;
        serde_json::to_string_pretty(&copy).expect("report json")
    }

    /// One row per distribution cell, grid point or estimate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,name,value,count,empirical,reference\n");
        for d in &self.distributions {
            for c in &d.cells {
                out.push_str(&format!(
                    "distribution,{},{},{},{},{}\n",
                    d.name, c.value, c.count, c.empirical, c.reference
                ));
            }
        }
        for e in &self.estimates {
            let r = e.reference.map(|r| r.to_string()).unwrap_or_default();
            out.push_str(&format!("estimate,{},,,{},{}\n", e.name, e.value, r));
        }
        for c in &self.checks {
            out.push_str(&format!("check,{},{},,{},{}\n", c.name, c.relation, c.observed, c.bound));
        }
        out
    }
}

/// Runs with default options.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_with(cfg, &RunOptions::default())
}

pub fn run_experiment_with(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentReport> {
    validate(cfg)?;
    let estimate = estimate_cost(cfg);
    if !opts.unsafe_no_cap && estimate > opts.budget {
        return Err(Error::CostCapExceeded { estimate, budget: opts.budget });
    }
    let start = Instant::now();
    let pool = match opts.workers {
        Some(w) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?,
        ),
        None => None,
    };
    let workers = pool.as_ref().map(|p| p.current_num_threads()).unwrap_or_else(rayon::current_num_threads);
    let mut report = match &pool {
        Some(p) => p.install(|| dispatch(cfg)),
        None => dispatch(cfg),
    }?;
    let seconds = start.elapsed().as_secs_f64();
    report.passed = report.checks.iter().all(|c| c.pass);
    report.timing = Some(Timing {
        seconds,
        replicas_per_second: cfg.replicas as f64 / seconds.max(1e-9),
        workers,
    });
    Ok(report)
}

/// Rough number of elementary steps, for refusing oversized runs. Uses
/// `n²/6` crossings for the oriented kinds.
pub fn estimate_cost(cfg: &ExperimentConfig) -> f64 {
    use ExperimentKind::*;
    let n = cfg.n as f64;
    let r = cfg.replicas as f64;
    let per = match cfg.kind {
        DegreeCdf | SimpleChords | LengthClass | JointLengths | ZkConcentration | BalancedClique => 4.0 * n,
        MonolithicFraction => 8.0 * n,
        KcoreVsLen => n * ((2.0 * n).log2() + 8.0),
        SccTrivial | LenStrongConn => 8.0 * (n + n * n / 6.0),
        EvolutionSwitching => 4.0 * n * n,
        ModelEquivalence => 8.0 * n * n,
        ExtremalScaling => 2.0 * n * n,
    };
    per * r
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn validate(cfg: &ExperimentConfig) -> Result<()> {
    use ExperimentKind::*;
    if cfg.n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if cfg.replicas == 0 {
        return Err(invalid("replicas must be at least 1"));
    }
    let n = cfg.n;
    let p = &cfg.params;
    match cfg.kind {
        DegreeCdf => {
            if let Some(grid) = &p.b_grid {
                if grid.is_empty() || grid.iter().any(|b| !(0.0..=0.5).contains(b)) {
                    return Err(invalid("b_grid values must lie in [0, 1/2]"));
                }
            }
        }
        LengthClass => {
            let j = p.j.unwrap_or(3);
            if n < 2 || j > n - 2 {
                return Err(invalid(format!("length_class needs j <= n - 2, got j = {j}, n = {n}")));
            }
        }
        JointLengths => {
            let k = p.k.unwrap_or(2);
            if k > 7 || n < 2 || k > n - 2 {
                return Err(invalid("joint_lengths needs k <= min(7, n - 2)"));
            }
        }
        KcoreVsLen | ZkConcentration => {
            let k = p.k.unwrap_or(3);
            if k == 0 || k >= n {
                return Err(invalid(format!("k must lie in 1..n, got k = {k}")));
            }
        }
        BalancedClique => {
            if let Some(m) = p.m {
                if m == 0 || m > n {
                    return Err(invalid("m must lie in 1..=n"));
                }
            }
        }
        EvolutionSwitching => {
            let tail = p.tail_m.unwrap_or(50.min(n));
            if tail == 0 || tail > n {
                return Err(invalid("tail_m must lie in 1..=n"));
            }
        }
        ModelEquivalence => {
            if n > 6 {
                return Err(invalid("model_equivalence supports n <= 6"));
            }
        }
        ExtremalScaling => {
            for s in p.stats.iter().flatten() {
                if !["omega", "alpha", "alpha_nest"].contains(&s.as_str()) {
                    return Err(invalid(format!("unknown statistic {s:?}")));
                }
            }
        }
        SimpleChords | MonolithicFraction | SccTrivial | LenStrongConn => {}
    }
    Ok(())
}

/// Outcomes of all replicas, in replica order.
fn replicate<S, T, I, F>(cfg: &ExperimentConfig, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, &mut ChaCha8Rng) -> T + Sync + Send,
{
    let seed = cfg.seed;
    (0..cfg.replicas)
        .into_par_iter()
        .map_init(init, |state, i| {
            let mut rng = derive_seed(seed, i).rng();
            f(state, &mut rng)
        })
        .collect()
}

fn base_report(cfg: &ExperimentConfig, params: Params) -> ExperimentReport {
    ExperimentReport {
        schema: SCHEMA.into(),
        kind: cfg.kind,
        n: cfg.n,
        replicas: cfg.replicas,
        seed: cfg.seed,
        seed_derivation: "replica i uses ChaCha8 keyed by SplitMix64 from mix64(seed + 0x9e3779b97f4a7c15*(i+1))".into(),
        params,
        estimates: Vec::new(),
        distributions: Vec::new(),
        checks: Vec::new(),
        samples: BTreeMap::new(),
        notes: vec!["tolerances are finite-n engineering choices (about 3 standard errors plus slack for the distance to the limit law)".into()],
        passed: false,
        timing: None,
    }
}

fn proportion(name: &str, hits: u64, total: u64, reference: Option<f64>, law: Option<&str>) -> Estimate {
    let p = hits as f64 / total as f64;
    Estimate {
        name: name.into(),
        value: p,
        std_error: Some((p * (1.0 - p) / total as f64).sqrt()),
        reference,
        reference_law: law.map(Into::into),
    }
}

fn mean_estimate(name: &str, m: &Moments, reference: Option<f64>, law: Option<&str>) -> Estimate {
    Estimate {
        name: name.into(),
        value: m.mean(),
        std_error: Some(m.std_error()),
        reference,
        reference_law: law.map(Into::into),
    }
}

fn tally(values: impl IntoIterator<Item = i64>) -> BTreeMap<i64, u64> {
    let mut out = BTreeMap::new();
    for v in values {
        *out.entry(v).or_insert(0u64) += 1;
    }
    out
}

/// Compares counts of a nonnegative statistic with a reference law on `0..`.
fn distribution_report(
    name: &str,
    counts: &BTreeMap<i64, u64>,
    pmf: impl Fn(i64) -> f64,
    law: &str,
    min_cell: f64,
) -> DistributionReport {
    let total: u64 = counts.values().sum();
    let max = counts.keys().copied().max().unwrap_or(0).max(0);
    let mut cells = Vec::new();
    let mut covered = 0.0;
    for v in 0..=max {
        let count = counts.get(&v).copied().unwrap_or(0);
        let reference = pmf(v);
        covered += reference;
        cells.push(Cell { value: v, count, empirical: count as f64 / total as f64, reference });
    }
    let obs: Vec<u64> = cells.iter().map(|c| c.count).collect();
    let probs: Vec<f64> = cells.iter().map(|c| c.reference).collect();
    DistributionReport {
        name: name.into(),
        reference_law: law.into(),
        cells,
        reference_tail: (1.0 - covered).max(0.0),
        tv: tv_to_reference(counts, &pmf),
        chi_square: chi_square_gof(&obs, &probs, min_cell).ok(),
    }
}

fn poisson(lambda: f64) -> impl Fn(i64) -> f64 {
    move |v| if v < 0 { 0.0 } else { poisson_pmf(lambda, v as u64).unwrap_or(0.0) }
}

fn dispatch(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    use ExperimentKind::*;
    match cfg.kind {
        DegreeCdf => degree_cdf(cfg),
        SimpleChords => length_law(cfg, 0, "simple_chords"),
        LengthClass => length_law(cfg, cfg.params.j.unwrap_or(3), "length_class"),
        JointLengths => joint_lengths(cfg),
        MonolithicFraction => monolithic_fraction(cfg),
        KcoreVsLen => kcore_vs_len(cfg),
        ZkConcentration => zk_concentration(cfg),
        SccTrivial => scc_trivial(cfg),
        LenStrongConn => len_strong_conn(cfg),
        BalancedClique => balanced_clique(cfg),
        EvolutionSwitching => evolution_switching(cfg),
        ModelEquivalence => model_equivalence(cfg),
        ExtremalScaling => extremal_scaling(cfg),
    }
}

fn default_b_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 * 0.05).collect()
}

fn degree_cdf(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let grid = cfg.params.b_grid.clone().unwrap_or_else(default_b_grid);
    let tol = cfg.params.tol.unwrap_or(0.02);
    let degrees: Vec<u32> = replicate(cfg, UniformSampler::default, |s, rng| {
        let partner = s.sample_partner0(n, rng).expect("n >= 1");
        degree_unchecked(partner, 0, partner[0])
    });
    let counts = tally(degrees.iter().map(|&d| d as i64));
    let mut report = base_report(cfg, Params { b_grid: Some(grid.clone()), tol: Some(tol), ..cfg.params.clone() });
    let mut worst = 0.0f64;
    for &b in &grid {
        let threshold = b * n as f64;
        let hits: u64 = counts.range(..).filter(|(&d, _)| d as f64 <= threshold).map(|(_, &c)| c).sum();
        let reference = degree_cdf_limit(b)?;
        let est = proportion(&format!("cdf_b{b:.4}"), hits, cfg.replicas, Some(reference), Some("1 - sqrt(1 - 2b)"));
        worst = worst.max((est.value - reference).abs());
        report.estimates.push(est);
    }
    report.checks.push(Check::at_most("max_cdf_deviation", worst, tol));
    Ok(report)
}

fn length_law(cfg: &ExperimentConfig, j: usize, name: &str) -> Result<ExperimentReport> {
    let n = cfg.n;
    let tol = cfg.params.tol.unwrap_or(0.02);
    let min_cell = cfg.params.min_cell.unwrap_or(5.0);
    let values: Vec<u32> = replicate(cfg, UniformSampler::default, |s, rng| {
        let partner = s.sample_partner0(n, rng).expect("n >= 1");
        count_length(partner, j as u32)
    });
    let counts = tally(values.iter().map(|&v| v as i64));
    let params = if name == "length_class" {
        Params { j: Some(j), tol: Some(tol), min_cell: Some(min_cell), ..cfg.params.clone() }
    } else {
        Params { tol: Some(tol), min_cell: Some(min_cell), ..cfg.params.clone() }
    };
    let mut report = base_report(cfg, params);
    let dist = distribution_report(&format!("l{j}"), &counts, poisson(1.0), "Poisson(1)", min_cell);
    let tv = dist.tv;
    report.distributions.push(dist);
    let zero = counts.get(&0).copied().unwrap_or(0);
    report.estimates.push(proportion(&format!("p_l{j}_zero"), zero, cfg.replicas, Some(poisson_pmf(1.0, 0)?), Some("Poisson(1)")));
    let mut m = Moments::default();
    for &v in &values {
        m.push(v as f64);
    }
    let exact_mean = mean_lj(n as u64, j as u64).ok().map(|v| v.to_f64());
    report.estimates.push(mean_estimate(&format!("mean_l{j}"), &m, exact_mean, Some("2n/(2n-1)")));
    report.checks.push(Check::at_most(&format!("tv_l{j}"), tv, tol));
    Ok(report)
}

fn chord_len(a: u32, b: u32, m: u32) -> u32 {
    let inner = b - a - 1;
    inner.min(m - 2 - inner)
}

fn count_length(partner: &[u32], j: u32) -> u32 {
    let m = partner.len() as u32;
    let mut count = 0;
    for (a, &b) in partner.iter().enumerate() {
        if b > a as u32 && chord_len(a as u32, b, m) == j {
            count += 1;
        }
    }
    count
}

fn length_counts_upto(partner: &[u32], k: usize, out: &mut [u32]) {
    let m = partner.len() as u32;
    out.iter_mut().for_each(|x| *x = 0);
    for (a, &b) in partner.iter().enumerate() {
        if b > a as u32 {
            let l = chord_len(a as u32, b, m) as usize;
            if l <= k {
                out[l] += 1;
            }
        }
    }
}

fn joint_lengths(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    const TRUNC: u32 = 5;
    let n = cfg.n;
    let k = cfg.params.k.unwrap_or(2);
    let tv_tol = cfg.params.tv_tol.unwrap_or(0.03);
    let corr_tol = cfg.params.corr_tol.unwrap_or(0.02);
    let min_cell = cfg.params.min_cell.unwrap_or(5.0);
    let dims = k + 1;
    let outcomes: Vec<[u32; 8]> = replicate(cfg, UniformSampler::default, |s, rng| {
        let partner = s.sample_partner0(n, rng).expect("n >= 1");
        let mut out = [0u32; 8];
        length_counts_upto(partner, k, &mut out[..dims]);
        out
    });
    let mut report = base_report(
        cfg,
        Params { k: Some(k), tv_tol: Some(tv_tol), corr_tol: Some(corr_tol), min_cell: Some(min_cell), ..cfg.params.clone() },
    );
    for i in 0..dims {
        let counts = tally(outcomes.iter().map(|o| o[i] as i64));
        report.distributions.push(distribution_report(&format!("l{i}"), &counts, poisson(1.0), "Poisson(1)", min_cell));
    }
    // Joint law on {0..=5}^dims plus one overflow cell.
    let side = TRUNC as usize + 1;
    let cells = side.pow(dims as u32);
    let mut joint = vec![0u64; cells + 1];
    for o in &outcomes {
        if o[..dims].iter().any(|&v| v > TRUNC) {
            joint[cells] += 1;
        } else {
            let idx = o[..dims].iter().fold(0usize, |acc, &v| acc * side + v as usize);
            joint[idx] += 1;
        }
    }
    let pmf = poisson(1.0);
    let mut reference = vec![0.0; cells + 1];
    for (idx, r) in reference.iter_mut().enumerate().take(cells) {
        let mut rest = idx;
        let mut p = 1.0;
        for _ in 0..dims {
            p *= pmf((rest % side) as i64);
            rest /= side;
        }
        *r = p;
    }
    reference[cells] = (1.0 - reference[..cells].iter().sum::<f64>()).max(0.0);
    let total = cfg.replicas as f64;
    let tv = 0.5 * joint.iter().zip(&reference).map(|(&c, &q)| (c as f64 / total - q).abs()).sum::<f64>();
    report.estimates.push(Estimate {
        name: "joint_tv_truncated".into(),
        value: tv,
        std_error: None,
        reference: Some(0.0),
        reference_law: Some(format!("independent Poisson(1)^{dims}, values above {TRUNC} pooled")),
    });
    let columns: Vec<Vec<f64>> = (0..dims).map(|i| outcomes.iter().map(|o| o[i] as f64).collect()).collect();
    let mut max_corr = 0.0f64;
    for a in 0..dims {
        for b in a + 1..dims {
            let c = correlation(&columns[a], &columns[b]);
            max_corr = max_corr.max(c.abs());
            report.estimates.push(Estimate {
                name: format!("corr_l{a}_l{b}"),
                value: c,
                std_error: Some(1.0 / total.sqrt()),
                reference: Some(0.0),
                reference_law: Some("independent Poisson(1)".into()),
            });
        }
    }
    report.checks.push(Check::at_most("joint_tv", tv, tv_tol));
    report.checks.push(Check::at_most("max_abs_corr", max_corr, corr_tol));
    Ok(report)
}

fn monolithic_fraction(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let tol = cfg.params.tol.unwrap_or(0.01);
    let flags: Vec<bool> = replicate(
        cfg,
        || (UniformSampler::default(), MonolithicChecker::default()),
        |(s, checker), rng| {
            let partner = s.sample_partner0(n, rng).expect("n >= 1");
            checker.check(partner)
        },
    );
    let non = flags.iter().filter(|&&f| !f).count() as u64;
    let mut report = base_report(cfg, Params { tol: Some(tol), ..cfg.params.clone() });
    let est = proportion("non_monolithic_fraction", non, cfg.replicas, None, Some("O(1/n)"));
    let frac = est.value;
    report.estimates.push(est);
    report.estimates.push(Estimate {
        name: "n_times_non_monolithic_fraction".into(),
        value: frac * n as f64,
        std_error: None,
        reference: None,
        reference_law: Some("bounded in n".into()),
    });
    if n <= 2 {
        report.notes.push(
            "for n <= 2 the adjacent-simple-chord condition wraps around the whole circle".into(),
        );
    }
    report.checks.push(Check::at_most("non_monolithic_fraction", frac, tol));
    Ok(report)
}

fn kcore_vs_len(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let k = cfg.params.k.unwrap_or(3);
    let min_freq = cfg.params.min_freq.unwrap_or(0.95);
    let tv_tol = cfg.params.tv_tol.unwrap_or(0.03);
    let ratio_tol = cfg.params.ratio_tol.unwrap_or(0.2);
    let ratio_min_freq = cfg.params.ratio_min_freq.unwrap_or(0.9);
    let min_cell = cfg.params.min_cell.unwrap_or(5.0);
    let outcomes: Vec<(bool, u32)> = replicate(
        cfg,
        || (UniformSampler::default(), KCorePeeler::default()),
        |(s, peeler), rng| {
            let partner = s.sample_partner0(n, rng).expect("n >= 1");
            let m = partner.len() as u32;
            let alive = peeler.run(partner, k);
            let mut equal = true;
            let mut core = 0u32;
            for (a, &b) in partner.iter().enumerate() {
                if b as usize > a {
                    let long = chord_len(a as u32, b, m) as usize >= k;
                    equal &= long == alive[a];
                    core += alive[a] as u32;
                }
            }
            (equal, n as u32 - core)
        },
    );
    let mut report = base_report(
        cfg,
        Params {
            k: Some(k),
            min_freq: Some(min_freq),
            tv_tol: Some(tv_tol),
            ratio_tol: Some(ratio_tol),
            ratio_min_freq: Some(ratio_min_freq),
            min_cell: Some(min_cell),
            ..cfg.params.clone()
        },
    );
    let equal = outcomes.iter().filter(|o| o.0).count() as u64;
    let eq = proportion("core_equals_len_at_least", equal, cfg.replicas, Some(1.0), Some("whp equality"));
    let eq_freq = eq.value;
    report.estimates.push(eq);
    let counts = tally(outcomes.iter().map(|o| o.1 as i64));
    let dist = distribution_report("n_minus_core_size", &counts, poisson(k as f64), &format!("Poisson({k})"), min_cell);
    let tv = dist.tv;
    report.distributions.push(dist);
    let mut ratio = Moments::default();
    let mut within = 0u64;
    for o in &outcomes {
        let r = o.1 as f64 / k as f64;
        ratio.push(r);
        within += ((r - 1.0).abs() <= ratio_tol) as u64;
    }
    report.estimates.push(mean_estimate("ratio_mean", &ratio, Some(1.0), Some("(n - R_k)/k -> 1")));
    let wf = proportion("ratio_within_tol", within, cfg.replicas, Some(1.0), Some("(n - R_k)/k -> 1"));
    let within_freq = wf.value;
    report.estimates.push(wf);
    report.checks.push(Check::at_least("core_equals_len_at_least_freq", eq_freq, min_freq));
    report.checks.push(Check::at_most("tv_n_minus_core", tv, tv_tol));
    report.checks.push(Check::at_least("ratio_within_tol_freq", within_freq, ratio_min_freq));
    Ok(report)
}

fn zk_concentration(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let k = cfg.params.k.unwrap_or(3);
    let tol = cfg.params.tol.unwrap_or(0.05);
    let ratio_tol = cfg.params.ratio_tol.unwrap_or(0.2);
    let min_cell = cfg.params.min_cell.unwrap_or(5.0);
    let values: Vec<u32> = replicate(cfg, UniformSampler::default, |s, rng| {
        let partner = s.sample_partner0(n, rng).expect("n >= 1");
        let m = partner.len() as u32;
        partner
            .iter()
            .enumerate()
            .filter(|&(a, &b)| b as usize > a && (chord_len(a as u32, b, m) as usize) < k)
            .count() as u32
    });
    let mut report = base_report(
        cfg,
        Params { k: Some(k), tol: Some(tol), ratio_tol: Some(ratio_tol), min_cell: Some(min_cell), ..cfg.params.clone() },
    );
    let mut ratio = Moments::default();
    let mut within = 0u64;
    for &z in &values {
        let r = z as f64 / k as f64;
        ratio.push(r);
        within += ((r - 1.0).abs() <= ratio_tol) as u64;
    }
    let exact = mean_zk(n as u64, k as u64)?.to_f64() / k as f64;
    let est = mean_estimate("mean_zk_over_k", &ratio, Some(exact), Some("E[Z_k]/k = 1 + 1/(2n-1)"));
    let dev = (est.value - exact).abs();
    report.estimates.push(est);
    report.estimates.push(proportion("zk_over_k_within_tol", within, cfg.replicas, Some(1.0), Some("Z_k/k -> 1")));
    let counts = tally(values.iter().map(|&v| v as i64));
    report.distributions.push(distribution_report("z_k", &counts, poisson(k as f64), &format!("Poisson({k})"), min_cell));
    report.checks.push(Check::at_most("mean_zk_over_k_deviation", dev, tol));
    Ok(report)
}

fn scc_trivial(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let tol = cfg.params.tol.unwrap_or(0.3);
    let tv_tol = cfg.params.tv_tol.unwrap_or(0.06);
    let min_freq = cfg.params.min_freq.unwrap_or(0.95);
    let slack = cfg.params.giant_slack.unwrap_or(10.0);
    let min_cell = cfg.params.min_cell.unwrap_or(5.0);
    let outcomes: Vec<(u32, u32, u32)> = replicate(cfg, UniformSampler::default, |s, rng| {
        let d = s.sample(n, rng).expect("n >= 1");
        let od = orient(&d, rng);
        let dec = scc(&od);
        (dec.trivial_count as u32, dec.nontrivial_count() as u32, dec.giant_size() as u32)
    });
    let mut report = base_report(
        cfg,
        Params {
            tol: Some(tol),
            tv_tol: Some(tv_tol),
            min_freq: Some(min_freq),
            giant_slack: Some(slack),
            min_cell: Some(min_cell),
            ..cfg.params.clone()
        },
    );
    let mut trivial = Moments::default();
    let mut giant = Moments::default();
    let mut single = 0u64;
    for &(t, nt, g) in &outcomes {
        trivial.push(t as f64);
        giant.push(g as f64 / n as f64);
        single += (nt == 1) as u64;
    }
    let mean = trivial.mean();
    report.estimates.push(mean_estimate("mean_trivial_scc", &trivial, Some(3.0), Some("Poisson(3)")));
    report.estimates.push(Estimate {
        name: "var_trivial_scc".into(),
        value: trivial.variance(),
        std_error: None,
        reference: Some(3.0),
        reference_law: Some("Poisson(3)".into()),
    });
    let counts = tally(outcomes.iter().map(|o| o.0 as i64));
    let dist = distribution_report("trivial_scc", &counts, poisson(3.0), "Poisson(3)", min_cell);
    let tv = dist.tv;
    report.distributions.push(dist);
    let one = proportion("one_nontrivial_scc", single, cfg.replicas, Some(1.0), Some("whp one strong component of size > 1"));
    let one_freq = one.value;
    report.estimates.push(one);
    let g = mean_estimate("mean_giant_fraction", &giant, Some(1.0), Some("giant component covers all but O(1) chords"));
    let gm = g.value;
    report.estimates.push(g);
    report.checks.push(Check::at_most("mean_trivial_scc_deviation", (mean - 3.0).abs(), tol));
    report.checks.push(Check::at_most("tv_trivial_scc", tv, tv_tol));
    report.checks.push(Check::at_least("one_nontrivial_scc_freq", one_freq, min_freq));
    report.checks.push(Check::at_least("mean_giant_fraction", gm, 1.0 - slack / n as f64));
    Ok(report)
}

fn default_k_grid(n: usize) -> Vec<usize> {
    let nf = n as f64;
    let mut grid = vec![(2.0 * nf.ln()).ceil() as usize, nf.powf(0.6).floor() as usize];
    grid.retain(|&k| k < n);
    grid.sort_unstable();
    grid.dedup();
    grid
}

fn len_strong_conn(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let grid = cfg.params.k_grid.clone().unwrap_or_else(|| default_k_grid(n));
    let outcomes: Vec<Vec<bool>> = replicate(cfg, UniformSampler::default, |s, rng| {
        let d = s.sample(n, rng).expect("n >= 1");
        let od = orient(&d, rng);
        grid.iter()
            .map(|&k| {
                let sub = len_at_least(&d, k);
                is_strongly_connected_on(&od, sub.chords()).expect("chords of d")
            })
            .collect()
    });
    let mut report = base_report(cfg, Params { k_grid: Some(grid.clone()), ..cfg.params.clone() });
    for (i, &k) in grid.iter().enumerate() {
        let hits = outcomes.iter().filter(|o| o[i]).count() as u64;
        let est = proportion(&format!("strongly_connected_len_ge_{k}"), hits, cfg.replicas, Some(1.0), Some("whp strongly connected"));
        if let Some(min) = cfg.params.min_freq {
            report.checks.push(Check::at_least(&est.name, est.value, min));
        }
        report.estimates.push(est);
    }
    Ok(report)
}

/// `floor(sqrt(n) / ((2 + ε) sqrt(ln n)))`, at least 1.
pub fn balanced_clique_size(n: usize, epsilon: f64) -> usize {
    let nf = n as f64;
    if n < 3 {
        return 1;
    }
    ((nf.sqrt() / ((2.0 + epsilon) * nf.ln().sqrt())).floor() as usize).clamp(1, n)
}

fn balanced_clique(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let epsilon = cfg.params.epsilon.unwrap_or(0.1);
    let m = cfg.params.m.unwrap_or_else(|| balanced_clique_size(n, epsilon));
    let hits: Vec<bool> = replicate(cfg, UniformSampler::default, |s, rng| {
        let d = s.sample(n, rng).expect("n >= 1");
        find_balanced_clique(&d, m).expect("m validated").is_some()
    });
    let mut report = base_report(cfg, Params { m: Some(m), epsilon: Some(epsilon), ..cfg.params.clone() });
    let count = hits.iter().filter(|&&h| h).count() as u64;
    let est = proportion("balanced_clique_found", count, cfg.replicas, Some(1.0), Some("whp a balanced clique exists"));
    if let Some(min) = cfg.params.min_freq {
        report.checks.push(Check::at_least("balanced_clique_found_freq", est.value, min));
    }
    report.estimates.push(est);
    Ok(report)
}

fn evolution_switching(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let m_min = cfg.params.m_min.unwrap_or(20.min(n));
    let tail_m = cfg.params.tail_m.unwrap_or(50.min(n));
    let c = cfg.params.switch_const.unwrap_or(10.0);
    let min_freq = cfg.params.min_freq.unwrap_or(0.8);
    // Per run: switching steps and the last non-monolithic step (0 if none).
    let outcomes: Vec<(Vec<u32>, u32)> = replicate(
        cfg,
        || (ContinuousProcess::new(), MonolithicChecker::default(), Vec::new(), Vec::new()),
        |(process, checker, partner, first), rng| {
            *process = ContinuousProcess::new();
            let mut switches = Vec::new();
            let mut last_bad = 0u32;
            let mut prev_mono = false;
            for m in 1..=n as u32 {
                process.step(rng);
                process.partner0_into(partner, first);
                let mono = checker.check(partner);
                if prev_mono && !mono {
                    switches.push(m - 1);
                }
                if !mono {
                    last_bad = m;
                }
                prev_mono = mono;
            }
            (switches, last_bad)
        },
    );
    let mut report = base_report(
        cfg,
        Params {
            m_min: Some(m_min),
            tail_m: Some(tail_m),
            switch_const: Some(c),
            min_freq: Some(min_freq),
            ..cfg.params.clone()
        },
    );
    let mut per_step = vec![0u64; n + 1];
    for (s, _) in &outcomes {
        for &m in s {
            per_step[m as usize] += 1;
        }
    }
    let mut worst_ratio = 0.0f64;
    for m in m_min.max(1)..n {
        let est = proportion(
            &format!("switch_at_{m}"),
            per_step[m],
            cfg.replicas,
            Some(3.0 * std::f64::consts::E / (m * m) as f64),
            Some("envelope 3e/m^2"),
        );
        worst_ratio = worst_ratio.max(est.value * (m * m) as f64);
        report.estimates.push(est);
    }
    if n > 0 {
        report.notes.push(format!("a switch at m needs step m + 1, so only m < {n} can be observed"));
    }
    let tail_ok = outcomes.iter().filter(|o| (o.1 as usize) < tail_m).count() as u64;
    let tail = proportion(&format!("monolithic_from_{tail_m}_to_{n}"), tail_ok, cfg.replicas, Some(1.0), Some("no late switching points whp"));
    let tail_freq = tail.value;
    report.estimates.push(tail);
    report.checks.push(Check::at_most("max_switch_freq_times_m2", worst_ratio, c));
    report.checks.push(Check::at_least("monolithic_tail_freq", tail_freq, min_freq));
    Ok(report)
}

fn model_equivalence(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let tol = cfg.params.tol.unwrap_or(0.01);
    let outcomes: Vec<(u64, u64, u64, u64)> = replicate(cfg, ContinuousProcess::new, |process, rng| {
        *process = ContinuousProcess::new();
        let mut cont_path = 0u64;
        let mut cont_last = 0u64;
        for k in 1..=n {
            process.step(rng);
            let r = diagram_rank(&process.diagram());
            cont_path = cont_path * odd_double_factorial(k) + r;
            cont_last = r;
        }
        let trace = run_discrete(n, rng).expect("n >= 1");
        let mut disc_path = 0u64;
        let mut disc_last = 0u64;
        for k in 1..=n {
            let r = diagram_rank(&tau(&trace.labeling()[..k]).expect("k >= 1"));
            disc_path = disc_path * odd_double_factorial(k) + r;
            disc_last = r;
        }
        (cont_path, disc_path, cont_last, disc_last)
    });
    let mut report = base_report(cfg, Params { tol: Some(tol), ..cfg.params.clone() });
    let total = cfg.replicas as f64;
    let empirical_tv = |a: &BTreeMap<i64, u64>, b: &BTreeMap<i64, u64>| {
        let mut keys: Vec<i64> = a.keys().chain(b.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys
            .iter()
            .map(|k| {
                (a.get(k).copied().unwrap_or(0) as f64 - b.get(k).copied().unwrap_or(0) as f64).abs() / total
            })
            .sum::<f64>()
    };
    let cont = tally(outcomes.iter().map(|o| o.0 as i64));
    let disc = tally(outcomes.iter().map(|o| o.1 as i64));
    let joint_tv = empirical_tv(&cont, &disc);
    report.estimates.push(Estimate {
        name: "joint_tv_continuous_vs_discrete".into(),
        value: joint_tv,
        std_error: None,
        reference: Some(0.0),
        reference_law: Some("equal joint laws of the two processes".into()),
    });
    let diagrams = odd_double_factorial(n);
    let uniform = |_: i64| 1.0 / diagrams as f64;
    let uniform_law = format!("uniform over {diagrams} diagrams");
    for (name, idx) in [("final_continuous", 2usize), ("final_discrete_compacted", 3)] {
        let counts = tally(outcomes.iter().map(|o| if idx == 2 { o.2 } else { o.3 } as i64));
        let mut d = distribution_report(name, &counts, uniform, &uniform_law, 5.0);
        // Uniform law lives on 0..diagrams; cells above the largest observed
        // rank carry its remaining mass.
        let max_seen = counts.keys().copied().max().unwrap_or(0);
        d.reference_tail = (diagrams as i64 - 1 - max_seen).max(0) as f64 / diagrams as f64;
        report.checks.push(Check::at_most(&format!("tv_{name}_uniform"), d.tv, tol));
        report.distributions.push(d);
    }
    report.checks.push(Check::at_most("joint_tv", joint_tv, tol));
    Ok(report)
}

/// `(2k - 1)!!` as a machine integer, for `k <= 10`.
fn odd_double_factorial(k: usize) -> u64 {
    (1..=k as u64).map(|i| 2 * i - 1).product()
}

fn extremal_scaling(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.n;
    let t = cfg.params.t.unwrap_or(5.0);
    let min_freq = cfg.params.min_freq.unwrap_or(0.99);
    let stats = cfg
        .params
        .stats
        .clone()
        .unwrap_or_else(|| vec!["omega".into(), "alpha".into(), "alpha_nest".into()]);
    let want = |s: &str| stats.iter().any(|x| x == s);
    let (w_omega, w_alpha, w_nest) = (want("omega"), want("alpha"), want("alpha_nest"));
    let outcomes: Vec<[u32; 3]> = replicate(cfg, UniformSampler::default, |s, rng| {
        let d = s.sample(n, rng).expect("n >= 1");
        [
            if w_omega { clique_number(&d).0 } else { 0 },
            if w_alpha { independence_number(&d).0 } else { 0 },
            if w_nest { nesting_number(&d).0 } else { 0 },
        ]
    });
    let mut report = base_report(cfg, Params { t: Some(t), min_freq: Some(min_freq), stats: Some(stats.clone()), ..cfg.params.clone() });
    let root = (2.0 * n as f64).sqrt();
    let scale = (2.0 * n as f64).powf(1.0 / 6.0);
    for (i, name, on) in [(0, "omega", w_omega), (1, "alpha", w_alpha), (2, "alpha_nest", w_nest)] {
        if !on {
            continue;
        }
        let mut m = Moments::default();
        for o in &outcomes {
            m.push(o[i] as f64);
        }
        report.estimates.push(mean_estimate(&format!("mean_{name}"), &m, None, None));
        report.samples.insert(name.into(), outcomes.iter().map(|o| o[i] as f64).collect());
    }
    if w_omega {
        let z: Vec<f64> = outcomes.iter().map(|o| (o[0] as f64 - root) / scale).collect();
        let mut m = Moments::default();
        z.iter().for_each(|&x| m.push(x));
        report.estimates.push(mean_estimate("mean_omega_standardized", &m, None, Some("(omega - sqrt(2n)) / (2n)^(1/6)")));
        report.samples.insert("omega_standardized".into(), z);
    }
    if w_alpha {
        let lo = root - t * (n as f64).powf(1.0 / 6.0);
        let hi = std::f64::consts::E * root;
        let inside = outcomes.iter().filter(|o| (o[1] as f64) >= lo && (o[1] as f64) <= hi).count() as u64;
        let est = proportion("alpha_within_bounds", inside, cfg.replicas, Some(1.0), Some("sqrt(2n) - t n^(1/6) <= alpha <= e sqrt(2n)"));
        report.checks.push(Check::at_least("alpha_within_bounds_freq", est.value, min_freq));
        report.estimates.push(est);
        report.estimates.push(Estimate { name: "alpha_lower_bound".into(), value: lo, std_error: None, reference: None, reference_law: None });
        report.estimates.push(Estimate { name: "alpha_upper_bound".into(), value: hi, std_error: None, reference: None, reference_law: None });
    }
    Ok(report)
}
