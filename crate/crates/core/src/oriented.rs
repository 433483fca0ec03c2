//! Oriented chord diagrams: one over/under bit per crossing.
//!
//! Crossings are numbered in canonical edge order, pairs `(u, v)` with
//! `u < v` sorted lexicographically by vertex index. Bit 1 means `u` passes
//! over `v`, which gives the directed edge `u -> v`.

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::diagram::{Chord, ChordDiagram};
use crate::error::{Error, Result};
use crate::graph::{intersection_graph, IntersectionGraph};

/// A chord diagram with every crossing oriented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedDiagram {
    base: ChordDiagram,
    graph: IntersectionGraph,
    bits: Vec<u64>,
}

impl OrientedDiagram {
    /// Orients crossing `e` (canonical index) according to `over(e)`.
    pub fn from_fn(base: ChordDiagram, mut over: impl FnMut(usize, usize, usize) -> bool) -> Self {
        let graph = intersection_graph(&base);
        let m = graph.edge_count();
        let mut bits = vec![0u64; m.div_ceil(64)];
        for (e, (u, v)) in graph.edges().enumerate() {
            if over(e, u, v) {
                bits[e / 64] |= 1 << (e % 64);
            }
        }
        Self { base, graph, bits }
    }

    /// Orients crossings by a list of bits in canonical edge order.
    pub fn from_bits(base: ChordDiagram, bits: &[bool]) -> Result<Self> {
        let out = Self::from_fn(base, |e, _, _| bits.get(e).copied().unwrap_or(false));
        if bits.len() != out.crossing_count() {
            return Err(Error::Syntax(format!(
                "{} orientation bits for {} crossings",
                bits.len(),
                out.crossing_count()
            )));
        }
        Ok(out)
    }

    pub fn base(&self) -> &ChordDiagram {
        &self.base
    }

    pub fn graph(&self) -> &IntersectionGraph {
        &self.graph
    }

    pub fn crossing_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Bit of crossing `e` in canonical order.
    pub fn bit(&self, e: usize) -> bool {
        self.bits[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.crossing_count()).map(|e| self.bit(e)).collect()
    }

    /// Out-neighbors in compressed form: `(offsets, targets)`.
    pub fn out_adjacency(&self) -> (Vec<u32>, Vec<u32>) {
        let g = &self.graph;
        let n = g.vertex_count();
        // Directed slot marks, filled by walking edges in canonical order.
        // For vertex v the lower neighbors u < v are met in increasing u,
        // which is the order they sit at the front of v's sorted list.
        let offs = g.offsets();
        let mut out_mark = vec![false; offs[n] as usize];
        let mut lower_cursor: Vec<usize> = offs[..n].iter().map(|&o| o as usize).collect();
        let mut e = 0usize;
        for u in 0..n {
            for (slot, &v) in g.neighbors(u).iter().enumerate() {
                let v = v as usize;
                if v < u {
                    continue;
                }
                let over = self.bit(e);
                e += 1;
                out_mark[offs[u] as usize + slot] = over;
                out_mark[lower_cursor[v]] = !over;
                lower_cursor[v] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        let mut targets = Vec::with_capacity(self.crossing_count());
        for u in 0..n {
            for (slot, &v) in g.neighbors(u).iter().enumerate() {
                if out_mark[offs[u] as usize + slot] {
                    targets.push(v);
                }
            }
            offsets.push(targets.len() as u32);
        }
        (offsets, targets)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&OrientationJson {
            pairs: self.base.pairs(),
            bits: BASE64.encode(pack_bits(&self.bits(), self.crossing_count())),
        })
        .expect("orientation json")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: OrientationJson =
            serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;
        let base = ChordDiagram::new(parsed.pairs.iter().map(|&[a, b]| (a, b)))?;
        let bytes = BASE64.decode(parsed.bits.as_bytes()).map_err(|e| Error::Syntax(e.to_string()))?;
        let m = intersection_graph(&base).edge_count();
        if bytes.len() != m.div_ceil(8) {
            return Err(Error::Syntax(format!("{} bytes of bits for {m} crossings", bytes.len())));
        }
        let bits: Vec<bool> = (0..m).map(|e| bytes[e / 8] >> (7 - e % 8) & 1 == 1).collect();
        Self::from_bits(base, &bits)
    }
}

#[derive(Serialize, Deserialize)]
struct OrientationJson {
    pairs: Vec<[u32; 2]>,
    bits: String,
}

/// Most significant bit first within each byte.
fn pack_bits(bits: &[bool], m: usize) -> Vec<u8> {
    let mut out = vec![0u8; m.div_ceil(8)];
    for (e, &b) in bits.iter().enumerate() {
        if b {
            out[e / 8] |= 0x80 >> (e % 8);
        }
    }
    out
}

/// Orients every crossing by an independent fair coin. Bits are taken from
/// successive 64-bit outputs, least significant bit first.
pub fn orient<R: RngCore + ?Sized>(d: &ChordDiagram, rng: &mut R) -> OrientedDiagram {
    let graph = intersection_graph(d);
    let m = graph.edge_count();
    let mut bits: Vec<u64> = (0..m.div_ceil(64)).map(|_| rng.next_u64()).collect();
    if m % 64 != 0 {
        let last = bits.last_mut().unwrap();
        *last &= (1u64 << (m % 64)) - 1;
    }
    OrientedDiagram { base: d.clone(), graph, bits }
}

/// Strong components of the directed intersection graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccDecomposition {
    /// Sorted vertex lists, ordered by smallest vertex.
    pub components: Vec<Vec<u32>>,
    /// Index of a largest component (the first one if several tie).
    pub giant_index: usize,
    /// Number of single-chord components.
    pub trivial_count: usize,
}

impl SccDecomposition {
    pub fn giant_size(&self) -> usize {
        self.components[self.giant_index].len()
    }

    /// Number of components with more than one chord.
    pub fn nontrivial_count(&self) -> usize {
        self.components.len() - self.trivial_count
    }
}

/// Strong components by an iterative Tarjan search, `O(n + cr)`.
pub fn scc(od: &OrientedDiagram) -> SccDecomposition {
    let (offsets, targets) = od.out_adjacency();
    let n = od.graph.vertex_count();
    let labels = tarjan(n, &offsets, &targets);
    let mut members: Vec<Vec<u32>> = Vec::new();
    let mut remap = vec![u32::MAX; n];
    for v in 0..n {
        let slot = &mut remap[labels[v] as usize];
        if *slot == u32::MAX {
            *slot = members.len() as u32;
            members.push(Vec::new());
        }
        members[*slot as usize].push(v as u32);
    }
    let mut giant_index = 0;
    for (i, c) in members.iter().enumerate() {
        if c.len() > members[giant_index].len() {
            giant_index = i;
        }
    }
    let trivial_count = members.iter().filter(|c| c.len() == 1).count();
    SccDecomposition { components: members, giant_index, trivial_count }
}

/// Component id per vertex (ids in order of completion).
fn tarjan(n: usize, offsets: &[u32], targets: &[u32]) -> Vec<u32> {
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, u32)> = Vec::new();
    let mut counter = 0u32;
    let mut comps = 0u32;
    for root in 0..n as u32 {
        if index[root as usize] != UNSEEN {
            continue;
        }
        call.push((root, offsets[root as usize]));
        index[root as usize] = counter;
        low[root as usize] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root as usize] = true;
        while let Some(&mut (v, ref mut it)) = call.last_mut() {
            let end = offsets[v as usize + 1];
            if *it < end {
                let w = targets[*it as usize];
                *it += 1;
                if index[w as usize] == UNSEEN {
                    index[w as usize] = counter;
                    low[w as usize] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    call.push((w, offsets[w as usize]));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    comp[w as usize] = comps;
                    if w == v {
                        break;
                    }
                }
                comps += 1;
            }
        }
    }
    comp
}

pub fn trivial_scc_count(od: &OrientedDiagram) -> usize {
    scc(od).trivial_count
}

/// Largest strong component as a fraction of `n`.
pub fn giant_scc_fraction(od: &OrientedDiagram) -> f64 {
    scc(od).giant_size() as f64 / od.base.n() as f64
}

/// Whether the directed graph induced on `chords` is strongly connected.
/// The empty set counts as strongly connected.
pub fn is_strongly_connected_on(od: &OrientedDiagram, chords: &[Chord]) -> Result<bool> {
    let mut keep = vec![false; od.graph.vertex_count()];
    for &c in chords {
        let v = od.graph.vertex_of(c).ok_or(Error::UnknownChord(c))?;
        keep[v] = true;
    }
    let Some(start) = keep.iter().position(|&k| k) else {
        return Ok(true);
    };
    let (offsets, targets) = od.out_adjacency();
    let reach = |forward: bool| -> bool {
        let n = keep.len();
        // Reverse adjacency built on demand.
        let (ro, rt);
        let (o, t): (&[u32], &[u32]) = if forward {
            (&offsets, &targets)
        } else {
            let mut deg = vec![0u32; n + 1];
            for &w in &targets {
                deg[w as usize + 1] += 1;
            }
            for i in 0..n {
                deg[i + 1] += deg[i];
            }
            let mut fill = deg.clone();
            let mut rev = vec![0u32; targets.len()];
            for u in 0..n {
                for &w in &targets[offsets[u] as usize..offsets[u + 1] as usize] {
                    rev[fill[w as usize] as usize] = u as u32;
                    fill[w as usize] += 1;
                }
            }
            ro = deg;
            rt = rev;
            (&ro, &rt)
        };
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut todo = vec![start as u32];
        let mut count = 1;
        while let Some(u) = todo.pop() {
            for &w in &t[o[u as usize] as usize..o[u as usize + 1] as usize] {
                if keep[w as usize] && !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    todo.push(w);
                }
            }
        }
        count == keep.iter().filter(|&&k| k).count()
    };
    Ok(reach(true) && reach(false))
}

/// Looks for `m` chords joining block `I_t` to block `I_{t+m}` for each
/// `t = 1..=m`, where `I_t` is the `t`-th run of `r = floor(n/m)` endpoints.
/// For each block pair the chord with the smallest endpoint in `I_t` is used.
pub fn find_balanced_clique(d: &ChordDiagram, m: usize) -> Result<Option<Vec<Chord>>> {
    let n = d.n();
    if m == 0 || m > n {
        return Err(Error::MOutOfRange { m, n });
    }
    let r = (n / m) as u32;
    let block = |p: u32| (p - 1) / r;
    let mut out = Vec::with_capacity(m);
    for t in 0..m as u32 {
        let lo = t * r + 1;
        let found = (lo..lo + r).find(|&p| {
            let q = d.partner(p);
            q <= 2 * m as u32 * r && block(q) == t + m as u32
        });
        match found {
            Some(p) => out.push(d.chord_at(p)),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}
