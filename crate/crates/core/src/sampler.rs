//! Uniform chord diagrams and the two growth processes.
//!
//! Randomness is ChaCha8 seeded from a 64-bit master value expanded with
//! SplitMix64. Bounded integers use Lemire's multiply-and-reject method on
//! raw 64-bit outputs, so a given seed produces the same diagrams on every
//! platform and with every version of this crate that keeps these three
//! algorithms.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::diagram::{tau, Chord, ChordDiagram};
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A 64-bit master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// A fresh generator for this seed. The 32-byte ChaCha key is four
    /// successive SplitMix64 outputs starting from the seed value.
    pub fn rng(self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = self.0;
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(GOLDEN_GAMMA);
            chunk.copy_from_slice(&mix64(state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Seed {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            Some(hex) => u64::from_str_radix(hex, 16),
            None => s.parse::<u64>(),
        };
        parsed.map(Seed).map_err(|_| Error::Syntax(format!("bad seed {s:?}")))
    }
}

/// Seed of replica `replica` under `master`: `mix64(master + γ·(replica + 1))`
/// with γ the 64-bit golden-ratio constant. `mix64` is a bijection and γ is
/// odd, so distinct replicas of one master never share a seed.
pub fn derive_seed(master: Seed, replica: u64) -> Seed {
    Seed(mix64(master.0.wrapping_add(GOLDEN_GAMMA.wrapping_mul(replica.wrapping_add(1)))))
}

/// Uniform integer in `0..s` (`s > 0`).
#[inline]
pub fn below<R: RngCore + ?Sized>(rng: &mut R, s: u64) -> u64 {
    debug_assert!(s > 0);
    let mut m = (rng.next_u64() as u128) * (s as u128);
    let mut low = m as u64;
    if low < s {
        let threshold = s.wrapping_neg() % s;
        while low < threshold {
            m = (rng.next_u64() as u128) * (s as u128);
            low = m as u64;
        }
    }
    (m >> 64) as u64
}

/// Draws a uniformly random diagram with `n` chords.
///
/// The smallest unused endpoint is paired with a uniformly chosen other
/// unused endpoint, `n` times; each diagram arises from exactly one sequence
/// of choices, with probability `1/(2n-1)!!`.
pub fn sample_uniform<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<ChordDiagram> {
    let mut sampler = UniformSampler::default();
    sampler.sample_partner0(n, rng)?;
    Ok(ChordDiagram::from_partner0(sampler.partner.clone()))
}

/// Reusable buffers for repeated uniform sampling at one size.
#[derive(Debug, Default, Clone)]
pub struct UniformSampler {
    pool: Vec<u32>,
    pos: Vec<u32>,
    partner: Vec<u32>,
}

impl UniformSampler {
    /// Samples into the internal partner buffer and returns it (0-based).
    pub fn sample_partner0<R: RngCore + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<&[u32]> {
        if n == 0 {
            return Err(Error::ZeroSize);
        }
        let m = 2 * n;
        self.pool.clear();
        self.pool.extend(0..m as u32);
        self.pos.clear();
        self.pos.extend(0..m as u32);
        self.partner.clear();
        self.partner.resize(m, u32::MAX);
        let mut next = 0usize;
        for _ in 0..n {
            while self.partner[next] != u32::MAX {
                next += 1;
            }
            self.remove(next as u32);
            let idx = below(rng, self.pool.len() as u64) as usize;
            let other = self.pool[idx];
            self.remove(other);
            self.partner[next] = other;
            self.partner[other as usize] = next as u32;
        }
        Ok(&self.partner)
    }

    pub fn sample<R: RngCore + ?Sized>(&mut self, n: usize, rng: &mut R) -> Result<ChordDiagram> {
        self.sample_partner0(n, rng)?;
        Ok(ChordDiagram::from_partner0(self.partner.clone()))
    }

    fn remove(&mut self, x: u32) {
        let i = self.pos[x as usize] as usize;
        let last = self.pool.pop().expect("pool underflow");
        if last != x {
            self.pool[i] = last;
            self.pos[last as usize] = i as u32;
        }
    }
}

/// Which growth process produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Continuous,
    Discrete,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Continuous => "continuous",
            Model::Discrete => "discrete",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "continuous" => Ok(Model::Continuous),
            "discrete" => Ok(Model::Discrete),
            other => Err(Error::Syntax(format!("unknown model {other:?}"))),
        }
    }
}

/// Whether a trace keeps every intermediate state or only the creation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotPolicy {
    Full,
    DeltasOnly,
    /// Full snapshots up to the given size, deltas above it.
    Auto(usize),
}

impl Default for SnapshotPolicy {
    fn default() -> Self {
        SnapshotPolicy::Auto(10_000)
    }
}

impl SnapshotPolicy {
    fn keeps_snapshots(self, n: usize) -> bool {
        match self {
            SnapshotPolicy::Full => true,
            SnapshotPolicy::DeltasOnly => false,
            SnapshotPolicy::Auto(limit) => n <= limit,
        }
    }
}

/// History of one run of a growth process.
///
/// `labeling[t]` is the chord created at step `t + 1`, written in the labels
/// of the final diagram. Every intermediate state is recoverable from these
/// two fields; stored snapshots are a cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvolutionTrace {
    model: Model,
    final_diagram: ChordDiagram,
    labeling: Vec<Chord>,
    snapshots: Option<Vec<Vec<Chord>>>,
}

impl EvolutionTrace {
    pub fn model(&self) -> Model {
        self.model
    }

    pub fn n(&self) -> usize {
        self.final_diagram.n()
    }

    pub fn final_diagram(&self) -> &ChordDiagram {
        &self.final_diagram
    }

    /// Creation order of the chords; the first entry contains endpoint 1.
    pub fn labeling(&self) -> &[Chord] {
        &self.labeling
    }

    pub fn has_snapshots(&self) -> bool {
        self.snapshots.is_some()
    }

    /// Chords of the state after `k` steps, sorted by smaller endpoint: the
    /// chords of `U_k` on `[2k]`, or the chords of `C'_k` on `[2n]`.
    pub fn step_chords(&self, k: usize) -> Result<Vec<Chord>> {
        if k == 0 || k > self.n() {
            return Err(Error::JOutOfRange { j: k, n: self.n() });
        }
        if let Some(s) = &self.snapshots {
            return Ok(s[k - 1].clone());
        }
        Ok(self.compute_step(k))
    }

    fn compute_step(&self, k: usize) -> Vec<Chord> {
        match self.model {
            Model::Continuous => tau(&self.labeling[..k]).expect("prefix").chords().collect(),
            Model::Discrete => {
                let mut v = self.labeling[..k].to_vec();
                v.sort_unstable();
                v
            }
        }
    }

    /// The state after `k` steps compacted onto `[2k]`: `U_k`, or `τ(C'_k)`.
    pub fn step_diagram(&self, k: usize) -> Result<ChordDiagram> {
        let chords = self.step_chords(k)?;
        match self.model {
            Model::Continuous => ChordDiagram::from_chords(&chords),
            Model::Discrete => tau(&chords),
        }
    }

    /// Writes one JSON object per step.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            k: usize,
            model: Model,
            pairs: &'a [Chord],
        }
        for k in 1..=self.n() {
            let chords = self.step_chords(k).expect("k in range");
            serde_json::to_writer(&mut out, &Line { k, model: self.model, pairs: &chords })?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    fn build(model: Model, final_diagram: ChordDiagram, labeling: Vec<Chord>, policy: SnapshotPolicy) -> Self {
        let mut trace = Self { model, final_diagram, labeling, snapshots: None };
        if policy.keeps_snapshots(trace.n()) {
            let snaps = (1..=trace.n()).map(|k| trace.compute_step(k)).collect();
            trace.snapshots = Some(snaps);
        }
        trace
    }
}

/// The continuous growth process, one step at a time.
///
/// The state is the circular sequence of chord ids (creation order) read
/// clockwise from endpoint 1. There are `2k` arcs between consecutive
/// endpoints; arc `i` follows position `i`, and arc `2k - 1` wraps back to
/// endpoint 1. A step picks one of the `C(2k+1, 2)` unordered arc pairs,
/// repetition allowed, and drops the two new endpoints there.
#[derive(Debug, Clone, Default)]
pub struct ContinuousProcess {
    order: Vec<u32>,
    k: u32,
}

impl ContinuousProcess {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of chords placed so far.
    pub fn len(&self) -> usize {
        self.k as usize
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    /// Chord ids around the circle, starting at endpoint 1.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn step<R: RngCore + ?Sized>(&mut self, rng: &mut R) {
        let id = self.k;
        if id == 0 {
            self.order.extend([0, 0]);
            self.k = 1;
            return;
        }
        let arcs = 2 * self.k as u64;
        let idx = below(rng, arcs * (arcs + 1) / 2);
        let (i, j) = arc_pair(idx);
        if i == j {
            self.order.splice(i + 1..i + 1, [id, id]);
        } else {
            self.order.insert(j + 1, id);
            self.order.insert(i + 1, id);
        }
        self.k += 1;
    }

    /// The 0-based partner array of the current diagram `U_k`.
    pub fn partner0_into(&self, partner: &mut Vec<u32>, first: &mut Vec<u32>) {
        partner.clear();
        partner.resize(self.order.len(), 0);
        first.clear();
        first.resize(self.k as usize, u32::MAX);
        for (p, &id) in self.order.iter().enumerate() {
            let f = &mut first[id as usize];
            if *f == u32::MAX {
                *f = p as u32;
            } else {
                partner[p] = *f;
                partner[*f as usize] = p as u32;
            }
        }
    }

    pub fn diagram(&self) -> ChordDiagram {
        let (mut partner, mut first) = (Vec::new(), Vec::new());
        self.partner0_into(&mut partner, &mut first);
        ChordDiagram::from_partner0(partner)
    }

    /// Chords of the current diagram in creation order.
    pub fn labeling(&self) -> Vec<Chord> {
        let mut first = vec![u32::MAX; self.k as usize];
        let mut out = vec![Chord::new_unchecked(1, 2); self.k as usize];
        for (p, &id) in self.order.iter().enumerate() {
            let f = &mut first[id as usize];
            if *f == u32::MAX {
                *f = p as u32;
            } else {
                out[id as usize] = Chord::new_unchecked(*f + 1, p as u32 + 1);
            }
        }
        out
    }
}

/// Decodes an index in `0..C(2k+1, 2)` to an arc pair `i <= j`: the index
/// enumerates pairs `i < j'` of `0..=2k` as `j'(j'-1)/2 + i`, and `j = j' - 1`.
fn arc_pair(idx: u64) -> (usize, usize) {
    let mut jp = ((1.0 + (1.0 + 8.0 * idx as f64).sqrt()) / 2.0) as u64;
    while jp * (jp - 1) / 2 > idx {
        jp -= 1;
    }
    while (jp + 1) * jp / 2 <= idx {
        jp += 1;
    }
    let i = idx - jp * (jp - 1) / 2;
    (i as usize, (jp - 1) as usize)
}

/// Runs the continuous model to `n` chords.
pub fn run_continuous<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<EvolutionTrace> {
    run_continuous_with(n, rng, SnapshotPolicy::default())
}

pub fn run_continuous_with<R: RngCore + ?Sized>(
    n: usize,
    rng: &mut R,
    policy: SnapshotPolicy,
) -> Result<EvolutionTrace> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let mut process = ContinuousProcess::new();
    for _ in 0..n {
        process.step(rng);
    }
    Ok(EvolutionTrace::build(Model::Continuous, process.diagram(), process.labeling(), policy))
}

/// Runs the discrete model on the fixed endpoint set `[2n]`.
pub fn run_discrete<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<EvolutionTrace> {
    run_discrete_with(n, rng, SnapshotPolicy::default())
}

pub fn run_discrete_with<R: RngCore + ?Sized>(
    n: usize,
    rng: &mut R,
    policy: SnapshotPolicy,
) -> Result<EvolutionTrace> {
    let (partner, labeling) = discrete_chords(n, rng)?;
    Ok(EvolutionTrace::build(
        Model::Discrete,
        ChordDiagram::from_partner0(partner),
        labeling,
        policy,
    ))
}

fn discrete_chords<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<(Vec<u32>, Vec<Chord>)> {
    if n == 0 {
        return Err(Error::ZeroSize);
    }
    let m = 2 * n;
    let mut pool: Vec<u32> = (1..m as u32).collect();
    let mut partner = vec![0u32; m];
    let mut labeling = Vec::with_capacity(n);
    let take = |pool: &mut Vec<u32>, rng: &mut R| {
        let idx = below(rng, pool.len() as u64) as usize;
        pool.swap_remove(idx)
    };
    let mut x = 0u32;
    let mut y = take(&mut pool, rng);
    loop {
        partner[x as usize] = y;
        partner[y as usize] = x;
        labeling.push(Chord::new_unchecked(x.min(y) + 1, x.max(y) + 1));
        if pool.is_empty() {
            break;
        }
        x = take(&mut pool, rng);
        y = take(&mut pool, rng);
    }
    Ok((partner, labeling))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::phi;

    #[test]
    fn seeds_parse_and_derive() {
        assert_eq!("42".parse::<Seed>().unwrap(), Seed(42));
        assert_eq!("0x2A".parse::<Seed>().unwrap(), Seed(42));
        assert!("zz".parse::<Seed>().is_err());
        let s = Seed(7);
        assert_ne!(derive_seed(s, 0), derive_seed(s, 1));
        assert_eq!(derive_seed(s, 5), derive_seed(s, 5));
        let a: Vec<u64> = (0..4).map(|_| derive_seed(s, 3).rng().next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn arc_pairs_cover_triangle() {
        for k in 1..20u64 {
            let arcs = 2 * k;
            let mut expected = Vec::new();
            for j in 0..arcs {
                for i in 0..=j {
                    expected.push((i as usize, j as usize));
                }
            }
            let mut got: Vec<_> = (0..arcs * (arcs + 1) / 2).map(arc_pair).collect();
            got.sort_by_key(|&(i, j)| (j, i));
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn below_is_in_range() {
        let mut rng = Seed(1).rng();
        for s in [1u64, 2, 3, 7, 1 << 40, u64::MAX] {
            for _ in 0..100 {
                assert!(below(&mut rng, s) < s);
            }
        }
    }

    #[test]
    fn trivial_sizes() {
        let mut rng = Seed(3).rng();
        assert_eq!(sample_uniform(1, &mut rng).unwrap().to_text(), "1-2");
        assert_eq!(sample_uniform(0, &mut rng), Err(Error::ZeroSize));
        assert_eq!(run_continuous(1, &mut rng).unwrap().final_diagram().to_text(), "1-2");
        assert_eq!(run_discrete(1, &mut rng).unwrap().final_diagram().to_text(), "1-2");
        assert!(run_continuous(0, &mut rng).is_err());
    }

    #[test]
    fn uniform_sampler_uses_n_draws() {
        struct Counting<R>(R, usize);
        impl<R: RngCore> RngCore for Counting<R> {
            fn next_u32(&mut self) -> u32 {
                self.1 += 1;
                self.0.next_u32()
            }
            fn next_u64(&mut self) -> u64 {
                self.1 += 1;
                self.0.next_u64()
            }
            fn fill_bytes(&mut self, d: &mut [u8]) {
                self.0.fill_bytes(d)
            }
            fn try_fill_bytes(&mut self, d: &mut [u8]) -> std::result::Result<(), rand_core::Error> {
                self.0.try_fill_bytes(d)
            }
        }
        // Pool sizes are odd numbers below 2^32, so rejection essentially never fires.
        let mut rng = Counting(Seed(11).rng(), 0);
        sample_uniform(500, &mut rng).unwrap();
        assert_eq!(rng.1, 500);
    }

    #[test]
    fn traces_are_prefix_consistent() {
        let mut rng = Seed(5).rng();
        for model in [Model::Continuous, Model::Discrete] {
            for _ in 0..50 {
                let t = match model {
                    Model::Continuous => run_continuous_with(9, &mut rng, SnapshotPolicy::Full),
                    Model::Discrete => run_discrete_with(9, &mut rng, SnapshotPolicy::Full),
                }
                .unwrap();
                assert_eq!(t.labeling()[0], t.final_diagram().c1());
                for k in 1..=9 {
                    let chords = t.step_chords(k).unwrap();
                    assert_eq!(chords.len(), k);
                    let via_phi = phi(t.final_diagram(), t.labeling(), k).unwrap();
                    assert_eq!(t.step_diagram(k).unwrap(), via_phi);
                    if model == Model::Discrete && k > 1 {
                        let prev = t.step_chords(k - 1).unwrap();
                        assert!(prev.iter().all(|c| chords.contains(c)));
                    }
                }
                let lazy = EvolutionTrace { snapshots: None, ..t.clone() };
                for k in 1..=9 {
                    assert_eq!(lazy.step_chords(k).unwrap(), t.step_chords(k).unwrap());
                }
            }
        }
    }

    #[test]
    fn jsonl_lines() {
        let mut rng = Seed(9).rng();
        let t = run_discrete(3, &mut rng).unwrap();
        let mut buf = Vec::new();
        t.write_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with(r#"{"k":1,"model":"discrete","pairs":[["#));
    }
}
