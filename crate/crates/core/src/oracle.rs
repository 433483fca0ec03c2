//! Exhaustive enumeration of small chord diagrams and exact laws of
//! per-diagram statistics.
//!
//! Diagrams are generated by pairing the smallest unused endpoint with each
//! unused partner in increasing order. Counts are integers until the end,
//! where they become probabilities with denominator `(2n-1)!!` (times
//! `2^C(n,2)` for statistics of oriented diagrams).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{Chord, ChordDiagram};
use crate::error::{Error, Result};
use crate::extremal::{clique_number, independence_number, nesting_number};
use crate::formulas::RationalValue;
use crate::graph::{
    components_of_diagram, count_full_blocks, degree_of_c1, intersection_graph, is_monolithic,
    length_profile,
};
use crate::oriented::{scc, OrientedDiagram};

/// Largest `n` the enumerator accepts.
pub const MAX_N: usize = 8;
/// Largest `n` for statistics that also enumerate orientations.
pub const MAX_ORIENTED_N: usize = 5;

/// Every diagram with `n` chords, each once, in a fixed order.
#[derive(Debug, Clone)]
pub struct DiagramEnumerator {
    partner: Vec<u32>,
    /// Stack of (opening endpoint, index of the partner tried last).
    stack: Vec<(u32, u32)>,
    first_partner: Option<u32>,
    started: bool,
    done: bool,
}

pub fn enumerate_diagrams(n: usize) -> Result<DiagramEnumerator> {
    DiagramEnumerator::new(n, None)
}

impl DiagramEnumerator {
    /// With `first_partner = Some(p)` only diagrams pairing endpoint 1 with
    /// `p` (1-based) are produced.
    pub fn new(n: usize, first_partner: Option<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroSize);
        }
        if n > MAX_N {
            return Err(Error::SizeCapExceeded { n, cap: MAX_N });
        }
        if let Some(p) = first_partner {
            if p < 2 || p as usize > 2 * n {
                return Err(Error::LabelOutOfRange { label: p as u64, max: 2 * n as u64 });
            }
        }
        Ok(Self {
            partner: vec![u32::MAX; 2 * n],
            stack: Vec::with_capacity(n),
            first_partner: first_partner.map(|p| p - 1),
            started: false,
            done: false,
        })
    }

    /// Tries to pair the opening endpoint on top of the stack with its next
    /// candidate after the current one. Returns false when exhausted.
    fn advance_top(&mut self) -> bool {
        let depth = self.stack.len() - 1;
        let (a, cur) = self.stack[depth];
        if cur != u32::MAX {
            self.partner[cur as usize] = u32::MAX;
            self.partner[a as usize] = u32::MAX;
            if depth == 0 && self.first_partner.is_some() {
                return false;
            }
        }
        let start = if cur == u32::MAX {
            match (depth, self.first_partner) {
                (0, Some(p)) => p,
                _ => a + 1,
            }
        } else {
            cur + 1
        };
        for b in start..self.partner.len() as u32 {
            if self.partner[b as usize] == u32::MAX {
                self.partner[a as usize] = b;
                self.partner[b as usize] = a;
                self.stack[depth].1 = b;
                return true;
            }
        }
        false
    }

    /// Fills the remaining endpoints with first choices.
    fn descend(&mut self) -> bool {
        loop {
            let Some(a) = self.partner.iter().position(|&p| p == u32::MAX) else {
                return true;
            };
            self.stack.push((a as u32, u32::MAX));
            if !self.advance_top() {
                return false;
            }
        }
    }
}

impl Iterator for DiagramEnumerator {
    type Item = ChordDiagram;

    fn next(&mut self) -> Option<ChordDiagram> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if !self.descend() {
                self.done = true;
                return None;
            }
            return Some(ChordDiagram::from_partner0(self.partner.clone()));
        }
        loop {
            if self.stack.is_empty() {
                self.done = true;
                return None;
            }
            if self.advance_top() {
                if self.descend() {
                    return Some(ChordDiagram::from_partner0(self.partner.clone()));
                }
            } else {
                self.stack.pop();
            }
        }
    }
}

/// Position of `d` in the enumeration order of diagrams of its size.
///
/// Each step pairs the smallest unused endpoint with one of the unused
/// endpoints above it; the index of that choice is one mixed-radix digit,
/// most significant first.
pub fn diagram_rank(d: &ChordDiagram) -> u64 {
    let partner = d.partner0();
    let m = partner.len();
    let mut used = vec![false; m];
    let mut rank = 0u64;
    let mut remaining = m as u64;
    for a in 0..m {
        if used[a] {
            continue;
        }
        let b = partner[a] as usize;
        let idx = (a + 1..b).filter(|&x| !used[x]).count() as u64;
        rank = rank * (remaining - 1) + idx;
        used[a] = true;
        used[b] = true;
        remaining -= 2;
    }
    rank
}

/// A statistic of a diagram with integer values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "stat", rename_all = "snake_case")]
pub enum StatisticSpec {
    /// Number of chords of length `j`.
    LengthCount { j: usize },
    /// Number of chords of length below `k`.
    ZCount { k: usize },
    /// `Z_k (Z_k - 1)`.
    ZFactorial2 { k: usize },
    /// `Z_k²`.
    ZSquared { k: usize },
    /// Degree of the chord through endpoint 1.
    DegreeC1,
    /// Length of the chord through endpoint 1.
    LengthC1,
    /// Chords with both endpoints in `{2, .., p - 1}` where `p` is the
    /// partner of endpoint 1.
    InnerChordsC1,
    /// Square of [`StatisticSpec::InnerChordsC1`].
    InnerChordsC1Squared,
    ComponentCount,
    /// 1 if monolithic, else 0.
    Monolithic,
    FullBlocks { k: usize },
    /// Number of pairwise non-crossing `r`-sets of chords.
    IndependentSets { r: usize },
    CliqueNumber,
    IndependenceNumber,
    NestingNumber,
    CrossingCount,
    /// Single-chord strong components, over all orientations of the diagram.
    TrivialScc,
    /// Always 1; its distribution's weight is the number of diagrams.
    Count,
}

impl StatisticSpec {
    pub fn is_oriented(self) -> bool {
        matches!(self, StatisticSpec::TrivialScc)
    }

    /// Value of the statistic on one diagram (not for oriented statistics).
    pub fn eval(self, d: &ChordDiagram) -> i64 {
        use StatisticSpec::*;
        match self {
            LengthCount { j } => length_profile(d).l(j) as i64,
            ZCount { k } => length_profile(d).z(k) as i64,
            ZFactorial2 { k } => {
                let z = length_profile(d).z(k) as i64;
                z * (z - 1)
            }
            ZSquared { k } => {
                let z = length_profile(d).z(k) as i64;
                z * z
            }
            DegreeC1 => degree_of_c1(d) as i64,
            LengthC1 => d.length_unchecked(d.c1()) as i64,
            InnerChordsC1 => inner_chords_c1(d),
            InnerChordsC1Squared => inner_chords_c1(d).pow(2),
            ComponentCount => components_of_diagram(d).count() as i64,
            Monolithic => is_monolithic(d) as i64,
            FullBlocks { k } => count_full_blocks(d, k).map(|v| v as i64).unwrap_or(0),
            IndependentSets { r } => independent_sets(d, r),
            CliqueNumber => clique_number(d).0 as i64,
            IndependenceNumber => independence_number(d).0 as i64,
            NestingNumber => nesting_number(d).0 as i64,
            CrossingCount => intersection_graph(d).edge_count() as i64,
            TrivialScc => panic!("oriented statistic"),
            Count => 1,
        }
    }

    fn check(self, n: usize) -> Result<()> {
        use StatisticSpec::*;
        let bad = |what: &str| Err(Error::OutOfRange(format!("{what} for n = {n}")));
        match self {
            LengthCount { j } if j >= n => bad("j must be below n"),
            ZCount { k } | ZFactorial2 { k } | ZSquared { k } if k > n => bad("k must be at most n"),
            FullBlocks { k } if k == 0 || k > n => bad("k must lie in 1..=n"),
            IndependentSets { r } if r == 0 || r > n => bad("r must lie in 1..=n"),
            TrivialScc if n > MAX_ORIENTED_N => {
                Err(Error::SizeCapExceeded { n, cap: MAX_ORIENTED_N })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for StatisticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use StatisticSpec::*;
        match *self {
            LengthCount { j } => write!(f, "l{j}"),
            ZCount { k } => write!(f, "z{k}"),
            ZFactorial2 { k } => write!(f, "zfact{k}"),
            ZSquared { k } => write!(f, "zsq{k}"),
            DegreeC1 => f.write_str("deg_c1"),
            LengthC1 => f.write_str("len_c1"),
            InnerChordsC1 => f.write_str("x_c1"),
            InnerChordsC1Squared => f.write_str("xsq_c1"),
            ComponentCount => f.write_str("components"),
            Monolithic => f.write_str("monolithic"),
            FullBlocks { k } => write!(f, "blocks{k}"),
            IndependentSets { r } => write!(f, "indep{r}"),
            CliqueNumber => f.write_str("omega"),
            IndependenceNumber => f.write_str("alpha"),
            NestingNumber => f.write_str("alpha_nest"),
            CrossingCount => f.write_str("crossings"),
            TrivialScc => f.write_str("trivial_scc"),
            Count => f.write_str("count"),
        }
    }
}

/// Parses the names printed by `Display`, e.g. `l0`, `z3`, `blocks2`.
impl FromStr for StatisticSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        use StatisticSpec::*;
        let fixed = match s {
            "deg_c1" => Some(DegreeC1),
            "len_c1" => Some(LengthC1),
            "x_c1" => Some(InnerChordsC1),
            "xsq_c1" => Some(InnerChordsC1Squared),
            "components" => Some(ComponentCount),
            "monolithic" => Some(Monolithic),
            "omega" => Some(CliqueNumber),
            "alpha" => Some(IndependenceNumber),
            "alpha_nest" => Some(NestingNumber),
            "crossings" => Some(CrossingCount),
            "trivial_scc" => Some(TrivialScc),
            "count" => Some(Count),
            _ => None,
        };
        if let Some(f) = fixed {
            return Ok(f);
        }
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(|| unknown(s))?;
        let (name, num) = s.split_at(split);
        let v: usize = num.parse().map_err(|_| unknown(s))?;
        Ok(match name {
            "l" => LengthCount { j: v },
            "z" => ZCount { k: v },
            "zfact" => ZFactorial2 { k: v },
            "zsq" => ZSquared { k: v },
            "blocks" => FullBlocks { k: v },
            "indep" => IndependentSets { r: v },
            _ => return Err(unknown(s)),
        })
    }
}

fn unknown(s: &str) -> Error {
    Error::Syntax(format!("unknown statistic {s:?}"))
}

fn inner_chords_c1(d: &ChordDiagram) -> i64 {
    let p = d.partner(1);
    (2..p).filter(|&x| {
        let y = d.partner(x);
        y > x && y < p
    })
    .count() as i64
}

/// Number of `r`-subsets of chords that are pairwise non-crossing.
fn independent_sets(d: &ChordDiagram, r: usize) -> i64 {
    let chords: Vec<Chord> = d.chords().collect();
    fn rec(chords: &[Chord], start: usize, chosen: &mut Vec<Chord>, r: usize) -> i64 {
        if chosen.len() == r {
            return 1;
        }
        let mut total = 0;
        for i in start..chords.len() {
            let c = chords[i];
            if chosen.iter().all(|&x| !crate::diagram::crosses_unchecked(x, c)) {
                chosen.push(c);
                total += rec(chords, i + 1, chosen, r);
                chosen.pop();
            }
        }
        total
    }
    rec(&chords, 0, &mut Vec::new(), r)
}

/// Restriction of the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Condition {
    /// Endpoint 1 is paired with `p`.
    PartnerOfOne { p: u32 },
}

impl FromStr for Condition {
    type Err = Error;
    /// Accepts `c1=<1,p>`, `c1=1-p` or `partner1=p`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Syntax(format!("unknown condition {s:?}"));
        let (key, val) = s.split_once('=').ok_or_else(bad)?;
        let val = val.trim().trim_start_matches('<').trim_end_matches('>');
        let p = match key.trim() {
            "c1" => {
                let (a, b) = val.split_once([',', '-']).ok_or_else(bad)?;
                if a.trim() != "1" {
                    return Err(bad());
                }
                b.trim().parse().map_err(|_| bad())?
            }
            "partner1" => val.parse().map_err(|_| bad())?,
            _ => return Err(bad()),
        };
        Ok(Condition::PartnerOfOne { p })
    }
}

/// Exact law of a statistic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactDistribution {
    pub n: usize,
    pub statistic: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
    /// Number of diagrams enumerated (after conditioning).
    pub diagrams: u64,
    /// Value and probability, by increasing value.
    pub support: Vec<(i64, RationalValue)>,
}

impl ExactDistribution {
    pub fn mean(&self) -> RationalValue {
        self.support
            .iter()
            .fold(RationalValue::zero(), |acc, (v, p)| acc + RationalValue::integer(*v) * p.clone())
    }

    pub fn prob(&self, value: i64) -> RationalValue {
        self.support
            .iter()
            .find(|(v, _)| *v == value)
            .map(|(_, p)| p.clone())
            .unwrap_or_else(RationalValue::zero)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("distribution json")
    }
}

/// Integer tallies: value -> weight.
type Tally = BTreeMap<i64, u128>;

fn tally_partition(n: usize, stat: StatisticSpec, first_partner: u32) -> (Tally, u64) {
    let mut tally = Tally::new();
    let mut diagrams = 0u64;
    let enumerator = DiagramEnumerator::new(n, Some(first_partner)).expect("checked");
    let full_orientations = n * (n - 1) / 2;
    for d in enumerator {
        diagrams += 1;
        if stat.is_oriented() {
            let cr = intersection_graph(&d).edge_count();
            let weight = 1u128 << (full_orientations - cr);
            for mask in 0u64..(1 << cr) {
                let od = OrientedDiagram::from_fn(d.clone(), |e, _, _| mask >> e & 1 == 1);
                *tally.entry(scc(&od).trivial_count as i64).or_default() += weight;
            }
        } else {
            *tally.entry(stat.eval(&d)).or_default() += 1;
        }
    }
    (tally, diagrams)
}

/// Exact distribution of `stat` over all diagrams with `n` chords, or over
/// those satisfying `condition`. Partitions by the partner of endpoint 1
/// run in parallel and are merged by integer addition.
pub fn exact_distribution(
    n: usize,
    stat: StatisticSpec,
    condition: Option<Condition>,
) -> Result<ExactDistribution> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    if n > MAX_N {
        return Err(Error::SizeCapExceeded { n, cap: MAX_N });
    }
    stat.check(n)?;
    let partners: Vec<u32> = match condition {
        None => (2..=2 * n as u32).collect(),
        Some(Condition::PartnerOfOne { p }) => {
            if p < 2 || p as usize > 2 * n {
                return Err(Error::EmptyCondition);
            }
            vec![p]
        }
    };
    let parts: Vec<(Tally, u64)> =
        partners.par_iter().map(|&p| tally_partition(n, stat, p)).collect();
    let mut tally = Tally::new();
    let mut diagrams = 0u64;
    for (t, count) in parts {
        diagrams += count;
        for (v, w) in t {
            *tally.entry(v).or_default() += w;
        }
    }
    if diagrams == 0 {
        return Err(Error::EmptyCondition);
    }
    let total: u128 = tally.values().sum();
    let support = tally
        .into_iter()
        .map(|(v, w)| (v, RationalValue::new(BigInt::from(w), BigInt::from(total))))
        .collect();
    Ok(ExactDistribution { n, statistic: stat.to_string(), condition, diagrams, support })
}

pub fn exact_expectation(
    n: usize,
    stat: StatisticSpec,
    condition: Option<Condition>,
) -> Result<RationalValue> {
    Ok(exact_distribution(n, stat, condition)?.mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulas::{double_factorial, mean_lj};

    fn r(s: &str) -> RationalValue {
        s.parse().unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_diagrams(1).unwrap().count(), 1);
        assert_eq!(enumerate_diagrams(2).unwrap().count(), 3);
        assert_eq!(enumerate_diagrams(3).unwrap().count(), 15);
        assert_eq!(enumerate_diagrams(5).unwrap().count(), 945);
        assert!(matches!(enumerate_diagrams(9), Err(Error::SizeCapExceeded { n: 9, cap: 8 })));
        for n in 1..=6 {
            let all: Vec<ChordDiagram> = enumerate_diagrams(n).unwrap().collect();
            let expected = double_factorial(2 * n as i64 - 1).unwrap();
            assert_eq!(num_bigint::BigUint::from(all.len()), expected);
            let mut sorted = all.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), all.len());
        }
        for (i, d) in enumerate_diagrams(5).unwrap().enumerate() {
            assert_eq!(diagram_rank(&d), i as u64);
        }
        let first: Vec<String> = enumerate_diagrams(2).unwrap().map(|d| d.to_text()).collect();
        assert_eq!(first, vec!["1-2 3-4", "1-3 2-4", "1-4 2-3"]);
    }

    #[test]
    fn small_laws() {
        let comps = exact_distribution(3, StatisticSpec::ComponentCount, None).unwrap();
        assert_eq!(comps.prob(1), r("4/15"));
        assert_eq!(exact_expectation(3, StatisticSpec::LengthCount { j: 0 }, None).unwrap(), mean_lj(3, 0).unwrap());
        let c1 = exact_distribution(5, StatisticSpec::LengthC1, None).unwrap();
        for k in 0..=3 {
            assert_eq!(c1.prob(k), r("2/9"));
        }
        assert_eq!(c1.prob(4), r("1/9"));
        let count = exact_distribution(3, StatisticSpec::Count, None).unwrap();
        assert_eq!(count.diagrams, 15);
        assert_eq!(
            exact_expectation(6, StatisticSpec::InnerChordsC1, Some(Condition::PartnerOfOne { p: 6 })).unwrap(),
            r("2/3")
        );
        assert_eq!(exact_expectation(3, StatisticSpec::IndependentSets { r: 2 }, None).unwrap(), r("2"));
        assert_eq!(
            exact_distribution(3, StatisticSpec::Count, Some(Condition::PartnerOfOne { p: 9 })),
            Err(Error::EmptyCondition)
        );
    }

    #[test]
    fn oriented_law_sums_to_one() {
        let d = exact_distribution(3, StatisticSpec::TrivialScc, None).unwrap();
        let total = d.support.iter().fold(RationalValue::zero(), |a, (_, p)| a + p.clone());
        assert_eq!(total, RationalValue::one());
        // Only the cyclically oriented triangle 1-4 2-5 3-6 has no trivial
        // component: 2 of its 8 orientations, out of 15 diagrams.
        assert_eq!(d.prob(0), r("2/120"));
    }

    #[test]
    fn names_round_trip() {
        for s in ["l0", "z3", "zfact2", "zsq2", "deg_c1", "len_c1", "x_c1", "xsq_c1", "components",
            "monolithic", "blocks2", "indep3", "omega", "alpha", "alpha_nest", "crossings",
            "trivial_scc", "count"]
        {
            assert_eq!(s.parse::<StatisticSpec>().unwrap().to_string(), s);
        }
        assert!("bogus".parse::<StatisticSpec>().is_err());
        assert_eq!("c1=<1,6>".parse::<Condition>().unwrap(), Condition::PartnerOfOne { p: 6 });
        assert_eq!("c1=1-6".parse::<Condition>().unwrap(), Condition::PartnerOfOne { p: 6 });
    }
}
