//! Chord diagrams on the endpoints `1..=2n`.
//!
//! Every public interface speaks 1-based endpoint labels, listed clockwise.
//! Internally the pairing is a 0-based partner array. Chords are normalized
//! so that `a < b`, which amounts to cutting the circle between `2n` and `1`;
//! with that cut, whether two chords cross is a pure label-order test.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A chord `<a, b>` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[u32; 2]", try_from = "[u32; 2]")]
pub struct Chord {
    a: u32,
    b: u32,
}

impl Chord {
    /// Builds a normalized chord from two distinct labels in either order.
    pub fn new(x: u32, y: u32) -> Result<Self> {
        if x == y {
            return Err(Error::SelfPair(x as u64));
        }
        if x == 0 || y == 0 {
            return Err(Error::LabelOutOfRange { label: 0, max: u32::MAX as u64 });
        }
        Ok(Self { a: x.min(y), b: x.max(y) })
    }

    #[inline]
    pub(crate) fn new_unchecked(a: u32, b: u32) -> Self {
        debug_assert!(0 < a && a < b);
        Self { a, b }
    }

    #[inline]
    pub fn a(&self) -> u32 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> u32 {
        self.b
    }

    #[inline]
    pub fn has_endpoint(&self, p: u32) -> bool {
        self.a == p || self.b == p
    }

    #[inline]
    pub fn shares_endpoint(&self, other: &Chord) -> bool {
        self.has_endpoint(other.a) || self.has_endpoint(other.b)
    }

    /// `true` iff `other` lies strictly inside `(a, b)`, i.e. `self` nests it.
    #[inline]
    pub fn nests(&self, other: &Chord) -> bool {
        self.a < other.a && other.b < self.b
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

impl From<Chord> for [u32; 2] {
    fn from(c: Chord) -> Self {
        [c.a, c.b]
    }
}

impl TryFrom<[u32; 2]> for Chord {
    type Error = Error;
    fn try_from(v: [u32; 2]) -> Result<Self> {
        Chord::new(v[0], v[1])
    }
}

/// Crossing test for two endpoint-disjoint chords.
pub fn crosses(c: Chord, d: Chord) -> Result<bool> {
    if c.shares_endpoint(&d) {
        return Err(Error::SharedEndpoint(c, d));
    }
    Ok(crosses_unchecked(c, d))
}

/// Exactly one endpoint of `d` lies strictly between the endpoints of `c`.
#[inline]
pub fn crosses_unchecked(c: Chord, d: Chord) -> bool {
    (c.a < d.a && d.a < c.b && c.b < d.b) || (d.a < c.a && c.a < d.b && d.b < c.b)
}

/// A run of `len` consecutive endpoints starting at `start`, wrapping modulo `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub start: u32,
    pub len: u32,
}

impl Block {
    /// Labels in the block, in clockwise order.
    pub fn labels(&self, two_n: u32) -> impl Iterator<Item = u32> {
        let start = self.start;
        (0..self.len).map(move |i| (start - 1 + i) % two_n + 1)
    }

    pub fn contains(&self, label: u32, two_n: u32) -> bool {
        let offset = (label + two_n - self.start) % two_n;
        offset < self.len
    }
}

/// A validated perfect matching of `1..=2n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChordDiagram {
    partner: Vec<u32>,
}

impl ChordDiagram {
    /// Validates a list of endpoint pairs.
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let pairs: Vec<(u32, u32)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::EmptyDiagram);
        }
        let two_n = 2 * pairs.len() as u64;
        let mut partner = vec![u32::MAX; two_n as usize];
        for &(x, y) in &pairs {
            if x == y {
                return Err(Error::SelfPair(x as u64));
            }
            for p in [x, y] {
                if p == 0 || p as u64 > two_n {
                    return Err(Error::LabelOutOfRange { label: p as u64, max: two_n });
                }
            }
            for p in [x, y] {
                if partner[p as usize - 1] != u32::MAX {
                    return Err(Error::DuplicateEndpoint(p as u64));
                }
            }
            partner[x as usize - 1] = y - 1;
            partner[y as usize - 1] = x - 1;
        }
        Ok(Self { partner })
    }

    pub fn from_chords(chords: &[Chord]) -> Result<Self> {
        Self::new(chords.iter().map(|c| (c.a, c.b)))
    }

    /// Wraps a 0-based partner array that is already known to be a
    /// fixed-point-free involution.
    pub(crate) fn from_partner0(partner: Vec<u32>) -> Self {
        debug_assert!(!partner.is_empty() && partner.len() % 2 == 0);
        debug_assert!(partner
            .iter()
            .enumerate()
            .all(|(i, &p)| p as usize != i && partner[p as usize] as usize == i));
        Self { partner }
    }

    /// The 0-based partner array.
    #[inline]
    pub fn partner0(&self) -> &[u32] {
        &self.partner
    }

    /// Number of chords.
    #[inline]
    pub fn n(&self) -> usize {
        self.partner.len() / 2
    }

    /// Number of endpoints, `2n`.
    #[inline]
    pub fn two_n(&self) -> u32 {
        self.partner.len() as u32
    }

    /// Partner of endpoint `label` (1-based in, 1-based out).
    #[inline]
    pub fn partner(&self, label: u32) -> u32 {
        self.partner[label as usize - 1] + 1
    }

    /// The chord through endpoint `label`.
    #[inline]
    pub fn chord_at(&self, label: u32) -> Chord {
        let p = self.partner(label);
        Chord::new_unchecked(label.min(p), label.max(p))
    }

    /// The chord containing endpoint 1.
    pub fn c1(&self) -> Chord {
        self.chord_at(1)
    }

    pub fn contains(&self, c: Chord) -> bool {
        c.b <= self.two_n() && self.partner(c.a) == c.b
    }

    fn require(&self, c: Chord) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::ChordNotInDiagram(c))
        }
    }

    /// Chords ordered by their smaller endpoint. Position in this order is
    /// the vertex index used by the graph modules.
    pub fn chords(&self) -> impl Iterator<Item = Chord> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|&(i, &p)| (p as usize) > i)
            .map(|(i, &p)| Chord::new_unchecked(i as u32 + 1, p + 1))
    }

    /// Vertex index of every endpoint (0-based endpoint in, vertex out).
    pub fn vertex_of_endpoint(&self) -> Vec<u32> {
        let mut out = vec![0u32; self.partner.len()];
        let mut next = 0u32;
        for i in 0..self.partner.len() {
            let p = self.partner[i] as usize;
            if p > i {
                out[i] = next;
                out[p] = next;
                next += 1;
            }
        }
        out
    }

    /// Length of a chord of this diagram: the smaller of its two block lengths.
    pub fn chord_length(&self, c: Chord) -> Result<u32> {
        self.require(c)?;
        Ok(self.length_unchecked(c))
    }

    #[inline]
    pub(crate) fn length_unchecked(&self, c: Chord) -> u32 {
        let inner = c.b - c.a - 1;
        let outer = self.two_n() - c.b + c.a - 1;
        inner.min(outer)
    }

    /// The two blocks cut out by `c`: first the one clockwise from `a`,
    /// then the one clockwise from `b`. Their lengths sum to `2n - 2`.
    pub fn blocks_of(&self, c: Chord) -> Result<(Block, Block)> {
        self.require(c)?;
        let two_n = self.two_n();
        let first = Block { start: c.a + 1, len: c.b - c.a - 1 };
        let second = Block { start: c.b % two_n + 1, len: two_n - c.b + c.a - 1 };
        Ok((first, second))
    }

    /// Relabels endpoint `i` as `i + shift` modulo `2n`.
    pub fn rotate(&self, shift: u32) -> ChordDiagram {
        let m = self.partner.len();
        let s = shift as usize % m;
        let mut partner = vec![0u32; m];
        for (i, &p) in self.partner.iter().enumerate() {
            partner[(i + s) % m] = ((p as usize + s) % m) as u32;
        }
        ChordDiagram { partner }
    }

    /// Canonical text form: `a-b` tokens sorted by `a`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.partner.len() * 4);
        for (i, c) in self.chords().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&c.to_string());
        }
        out
    }

    /// Canonical JSON form `{"n":..,"pairs":[[a,b],..]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&DiagramJson::from(self)).expect("diagram json")
    }

    pub fn pairs(&self) -> Vec<[u32; 2]> {
        self.chords().map(Into::into).collect()
    }
}

impl fmt::Debug for ChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChordDiagram({})", self.to_text())
    }
}

impl fmt::Display for ChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DiagramJson {
    n: usize,
    pairs: Vec<[u32; 2]>,
}

impl From<&ChordDiagram> for DiagramJson {
    fn from(d: &ChordDiagram) -> Self {
        Self { n: d.n(), pairs: d.pairs() }
    }
}

/// Serialization formats for diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(Error::Syntax(format!("unknown format {other:?}"))),
        }
    }
}

pub fn serialize_diagram(d: &ChordDiagram, format: Format) -> String {
    match format {
        Format::Text => d.to_text(),
        Format::Json => d.to_json(),
    }
}

/// Parses either the text or the JSON form; JSON is recognised by a leading `{`.
pub fn parse_diagram(text: &str) -> Result<ChordDiagram> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let parsed: DiagramJson =
            serde_json::from_str(trimmed).map_err(|e| Error::Syntax(e.to_string()))?;
        if parsed.n != parsed.pairs.len() {
            return Err(Error::Syntax(format!(
                "n = {} but {} pairs given",
                parsed.n,
                parsed.pairs.len()
            )));
        }
        return ChordDiagram::new(parsed.pairs.into_iter().map(|[a, b]| (a, b)));
    }
    let mut pairs = Vec::new();
    for token in trimmed.split_whitespace() {
        let (x, y) = token
            .split_once('-')
            .ok_or_else(|| Error::Syntax(format!("expected a-b, got {token:?}")))?;
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| Error::Syntax(format!("bad endpoint {s:?} in {token:?}")))
        };
        pairs.push((parse(x)?, parse(y)?));
    }
    ChordDiagram::new(pairs)
}

impl FromStr for ChordDiagram {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_diagram(s)
    }
}

/// A set of endpoint-disjoint chords with inherited labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdiagram {
    parent_n: usize,
    chords: Vec<Chord>,
}

impl Subdiagram {
    pub fn new(parent_n: usize, mut chords: Vec<Chord>) -> Result<Self> {
        chords.sort_unstable();
        let max = 2 * parent_n as u64;
        let mut seen = vec![false; max as usize];
        for c in &chords {
            for p in [c.a, c.b] {
                if p as u64 > max {
                    return Err(Error::LabelOutOfRange { label: p as u64, max });
                }
                if std::mem::replace(&mut seen[p as usize - 1], true) {
                    return Err(Error::DuplicateEndpoint(p as u64));
                }
            }
        }
        Ok(Self { parent_n, chords })
    }

    /// The chords of `d` selected by `keep`.
    pub fn of(d: &ChordDiagram, keep: impl Fn(Chord) -> bool) -> Self {
        Self { parent_n: d.n(), chords: d.chords().filter(|&c| keep(c)).collect() }
    }

    pub fn parent_n(&self) -> usize {
        self.parent_n
    }

    /// Chords sorted by smaller endpoint.
    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    pub fn tau(&self) -> Result<ChordDiagram> {
        tau(&self.chords)
    }
}

/// Compacts an endpoint-disjoint chord set onto `[2k]`, keeping the relative
/// order of endpoints.
pub fn tau(chords: &[Chord]) -> Result<ChordDiagram> {
    if chords.is_empty() {
        return Err(Error::EmptySubdiagram);
    }
    let mut endpoints: Vec<(u32, u32)> = Vec::with_capacity(2 * chords.len());
    for (i, c) in chords.iter().enumerate() {
        endpoints.push((c.a, i as u32));
        endpoints.push((c.b, i as u32));
    }
    endpoints.sort_unstable();
    for w in endpoints.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateEndpoint(w[0].0 as u64));
        }
    }
    let mut first = vec![u32::MAX; chords.len()];
    let mut partner = vec![0u32; endpoints.len()];
    for (rank, &(_, chord)) in endpoints.iter().enumerate() {
        let slot = &mut first[chord as usize];
        if *slot == u32::MAX {
            *slot = rank as u32;
        } else {
            partner[rank] = *slot;
            partner[*slot as usize] = rank as u32;
        }
    }
    Ok(ChordDiagram::from_partner0(partner))
}

/// Keeps the first `j` chords of `labeling` (a creation order listing every
/// chord of `d` once, starting with the chord through endpoint 1) and
/// compacts them with [`tau`].
pub fn phi(d: &ChordDiagram, labeling: &[Chord], j: usize) -> Result<ChordDiagram> {
    validate_labeling(d, labeling)?;
    if j == 0 || j > d.n() {
        return Err(Error::JOutOfRange { j, n: d.n() });
    }
    tau(&labeling[..j])
}

pub fn validate_labeling(d: &ChordDiagram, labeling: &[Chord]) -> Result<()> {
    if labeling.len() != d.n() {
        return Err(Error::InvalidLabeling(format!(
            "{} labels for {} chords",
            labeling.len(),
            d.n()
        )));
    }
    let mut seen = vec![false; d.n()];
    let vertex = d.vertex_of_endpoint();
    for &c in labeling {
        if !d.contains(c) {
            return Err(Error::InvalidLabeling(format!("{c} is not a chord")));
        }
        if std::mem::replace(&mut seen[vertex[c.a as usize - 1] as usize], true) {
            return Err(Error::InvalidLabeling(format!("{c} labeled twice")));
        }
    }
    if labeling[0] != d.c1() {
        return Err(Error::InvalidLabeling("label 1 must go to the chord through endpoint 1".into()));
    }
    Ok(())
}
