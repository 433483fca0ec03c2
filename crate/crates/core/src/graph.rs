//! Intersection graphs and the undirected statistics built on them.
//!
//! Vertex `i` is the `i`-th chord in order of its smaller endpoint, so vertex
//! 0 is always the chord through endpoint 1. Several statistics also have a
//! diagram-level version that never materializes the graph; those are the
//! ones to use when `n` is large, since a random diagram has about `n²/6`
//! crossings.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::Serialize;

use crate::diagram::{Chord, ChordDiagram, Subdiagram};
use crate::error::{Error, Result};

/// Crossing graph of a diagram, in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionGraph {
    chords: Vec<Chord>,
    offsets: Vec<u32>,
    adj: Vec<u32>,
}

impl IntersectionGraph {
    pub fn vertex_count(&self) -> usize {
        self.chords.len()
    }

    /// Number of crossings.
    pub fn edge_count(&self) -> usize {
        self.adj.len() / 2
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn chord(&self, v: usize) -> Chord {
        self.chords[v]
    }

    pub fn vertex_of(&self, c: Chord) -> Option<usize> {
        self.chords.binary_search(&c).ok()
    }

    /// Sorted neighbors of `v`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub(crate) fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    /// Edges `(u, v)` with `u < v`, lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.neighbors(u).iter().filter(move |&&v| v as usize > u).map(move |&v| (u, v as usize))
        })
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// One `a-b c-d` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.chords[u], self.chords[v]).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct G {
            vertices: Vec<String>,
            edges: Vec<[usize; 2]>,
        }
        let g = G {
            vertices: self.chords.iter().map(|c| c.to_string()).collect(),
            edges: self.edges().map(|(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&g).expect("graph json")
    }

    fn from_adjacency(chords: Vec<Chord>, lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        offsets.push(0u32);
        let mut adj = Vec::new();
        for mut l in lists {
            l.sort_unstable();
            adj.extend_from_slice(&l);
            offsets.push(adj.len() as u32);
        }
        Self { chords, offsets, adj }
    }
}

/// Builds the crossing graph with one left-to-right sweep.
///
/// Open chords sit in a linked list in opening order. When a chord closes,
/// exactly the chords opened after it and still open cross it. The sweep
/// runs twice, first to size the adjacency lists and then to fill them.
pub fn intersection_graph(d: &ChordDiagram) -> IntersectionGraph {
    let partner = d.partner0();
    let m = partner.len();
    let n = d.n();
    let vertex = d.vertex_of_endpoint();
    let chords: Vec<Chord> = d.chords().collect();
    const NIL: u32 = u32::MAX;
    // Linked list over opening positions.
    let mut next = vec![NIL; m];
    let mut prev = vec![NIL; m];
    let mut degree = vec![0u32; n];
    let mut adj: Vec<u32> = Vec::new();
    let mut offsets = vec![0u32; n + 1];
    let mut cursor: Vec<u32> = Vec::new();

    for pass in 0..2 {
        let mut tail = NIL;
        for p in 0..m {
            let q = partner[p] as usize;
            if q > p {
                prev[p] = tail;
                next[p] = NIL;
                if tail != NIL {
                    next[tail as usize] = p as u32;
                }
                tail = p as u32;
                continue;
            }
            // p closes the chord opened at q.
            let u = vertex[q];
            let mut it = next[q];
            while it != NIL {
                let v = vertex[it as usize];
                if pass == 0 {
                    degree[u as usize] += 1;
                    degree[v as usize] += 1;
                } else {
                    adj[cursor[u as usize] as usize] = v;
                    cursor[u as usize] += 1;
                    adj[cursor[v as usize] as usize] = u;
                    cursor[v as usize] += 1;
                }
                it = next[it as usize];
            }
            let (pq, nq) = (prev[q], next[q]);
            if pq != NIL {
                next[pq as usize] = nq;
            }
            if nq != NIL {
                prev[nq as usize] = pq;
            } else {
                tail = pq;
            }
        }
        if pass == 0 {
            for v in 0..n {
                offsets[v + 1] = offsets[v] + degree[v];
            }
            adj = vec![0u32; offsets[n] as usize];
            cursor = offsets[..n].to_vec();
        }
    }
    for v in 0..n {
        adj[offsets[v] as usize..offsets[v + 1] as usize].sort_unstable();
    }
    IntersectionGraph { chords, offsets, adj }
}

/// All-pairs construction, quadratic; kept as a reference implementation.
pub fn intersection_graph_naive(d: &ChordDiagram) -> IntersectionGraph {
    let chords: Vec<Chord> = d.chords().collect();
    let mut lists = vec![Vec::new(); chords.len()];
    for i in 0..chords.len() {
        for j in i + 1..chords.len() {
            if crate::diagram::crosses_unchecked(chords[i], chords[j]) {
                lists[i].push(j as u32);
                lists[j].push(i as u32);
            }
        }
    }
    IntersectionGraph::from_adjacency(chords, lists)
}

/// Fenwick tree of counts.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    pub(crate) fn new(len: usize) -> Self {
        Self { tree: vec![0; len + 1] }
    }

    pub(crate) fn reset(&mut self, len: usize) {
        self.tree.clear();
        self.tree.resize(len + 1, 0);
    }

    pub(crate) fn add(&mut self, i: usize) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over `0..i`.
    pub(crate) fn prefix(&self, i: usize) -> u32 {
        let mut i = i;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }
}

/// Number of chords crossing `c`, found by scanning its shorter block.
pub fn degree_of(d: &ChordDiagram, c: Chord) -> Result<u32> {
    if !d.contains(c) {
        return Err(Error::ChordNotInDiagram(c));
    }
    Ok(degree_unchecked(d.partner0(), c.a() - 1, c.b() - 1))
}

/// Degree of the chord opened at 0-based `a` and closed at `b`.
pub(crate) fn degree_unchecked(partner: &[u32], a: u32, b: u32) -> u32 {
    let m = partner.len() as u32;
    let inner = b - a - 1;
    let mut count = 0;
    if inner <= m - inner - 2 {
        for p in a + 1..b {
            let q = partner[p as usize];
            count += (q < a || q > b) as u32;
        }
    } else {
        for p in (b + 1..m).chain(0..a) {
            let q = partner[p as usize];
            count += (q > a && q < b) as u32;
        }
    }
    count
}

pub fn degree_of_c1(d: &ChordDiagram) -> u32 {
    degree_unchecked(d.partner0(), 0, d.partner0()[0])
}

/// Degrees of all vertices in `O(n log n)`.
///
/// A chord `<a, b>` has `b - a - 1` endpoints strictly inside; those that
/// belong to chords nested inside it come in pairs and the rest are
/// crossings, so the degree is `(b - a - 1) - 2·nested`.
pub fn all_degrees(d: &ChordDiagram) -> Vec<u32> {
    let mut fw = Fenwick::new(0);
    let mut out = Vec::new();
    degrees_into(d.partner0(), &mut fw, &mut out);
    out
}

/// Degrees indexed by opening endpoint (0-based); closing slots are left at 0.
pub(crate) fn degrees_by_endpoint(partner: &[u32], fw: &mut Fenwick, out: &mut Vec<u32>) {
    let m = partner.len();
    fw.reset(m);
    out.clear();
    out.resize(m, 0);
    let mut closed = 0u32;
    for p in 0..m {
        let q = partner[p] as usize;
        if q < p {
            let nested = closed - fw.prefix(q + 1);
            out[q] = (p - q - 1) as u32 - 2 * nested;
            fw.add(q);
            closed += 1;
        }
    }
}

fn degrees_into(partner: &[u32], fw: &mut Fenwick, out: &mut Vec<u32>) {
    let mut by_endpoint = Vec::new();
    degrees_by_endpoint(partner, fw, &mut by_endpoint);
    out.clear();
    for (p, &q) in partner.iter().enumerate() {
        if q as usize > p {
            out.push(by_endpoint[p]);
        }
    }
}

/// Connected components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Components {
    /// Component index of every vertex.
    pub labels: Vec<u32>,
    /// Vertices of each component, sorted; components ordered by smallest
    /// vertex, so the root component comes first.
    pub members: Vec<Vec<u32>>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn root(&self) -> &[u32] {
        &self.members[0]
    }

    fn from_labels(raw: &[u32]) -> Self {
        let mut remap = vec![u32::MAX; raw.len()];
        let mut labels = Vec::with_capacity(raw.len());
        let mut members: Vec<Vec<u32>> = Vec::new();
        for (v, &r) in raw.iter().enumerate() {
            let slot = &mut remap[r as usize];
            if *slot == u32::MAX {
                *slot = members.len() as u32;
                members.push(Vec::new());
            }
            labels.push(*slot);
            members[*slot as usize].push(v as u32);
        }
        Self { labels, members }
    }
}

/// Components by breadth-first search.
pub fn components(g: &IntersectionGraph) -> Components {
    let n = g.vertex_count();
    let mut raw = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if raw[s] != u32::MAX {
            continue;
        }
        raw[s] = s as u32;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if raw[v as usize] == u32::MAX {
                    raw[v as usize] = s as u32;
                    queue.push_back(v as usize);
                }
            }
        }
    }
    Components::from_labels(&raw)
}

/// Components straight from the diagram, without building the graph.
pub fn components_of_diagram(d: &ChordDiagram) -> Components {
    let mut sweep = ComponentSweep::default();
    sweep.run(d.partner0());
    let vertex = d.vertex_of_endpoint();
    let partner = d.partner0();
    let mut raw = vec![0u32; d.n()];
    for (p, &q) in partner.iter().enumerate() {
        if q as usize > p {
            let root = sweep.find(p as u32);
            raw[vertex[p] as usize] = vertex[root as usize];
        }
    }
    Components::from_labels(&raw)
}

/// Union-find sweep for crossing components.
///
/// Open chords, in opening order, always form contiguous runs by component:
/// a closing chord crosses every chord opened after it that is still open,
/// so all runs above its own merge into it. Each run is a stack entry with
/// its number of open chords, and an entry leaves the stack when that
/// number reaches zero, which can only happen at the top.
#[derive(Debug, Default, Clone)]
pub struct ComponentSweep {
    parent: Vec<u32>,
    stack: Vec<(u32, u32)>,
    slot: Vec<u32>,
}

impl ComponentSweep {
    /// Sets of chords are identified by their 0-based opening endpoints.
    pub fn run(&mut self, partner: &[u32]) {
        let m = partner.len();
        self.parent.clear();
        self.parent.extend(0..m as u32);
        self.slot.clear();
        self.slot.resize(m, 0);
        self.stack.clear();
        for p in 0..m {
            let q = partner[p] as usize;
            if q > p {
                self.slot[p] = self.stack.len() as u32;
                self.stack.push((p as u32, 1));
                continue;
            }
            let root = self.find(q as u32);
            let target = self.slot[root as usize] as usize;
            let mut merged_open = 0;
            while self.stack.len() > target + 1 {
                let (r, open) = self.stack.pop().unwrap();
                self.parent[r as usize] = root;
                merged_open += open;
            }
            let top = self.stack.last_mut().unwrap();
            top.1 += merged_open;
            top.1 -= 1;
            if top.1 == 0 {
                self.stack.pop();
            }
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }
}

/// Monolithicity: everything outside the root component is a simple chord,
/// and no two chords `<i, i+1>` and `<i+2, i+3>` exist (indices mod `2n`).
///
/// A simple chord crosses nothing, so it is automatically its own
/// component; the first condition thus only asks that every chord outside
/// the root component be simple. With one chord the second condition would
/// compare the chord with itself and is skipped.
pub fn is_monolithic(d: &ChordDiagram) -> bool {
    MonolithicChecker::default().check(d.partner0())
}

/// Reusable buffers for repeated monolithicity checks.
#[derive(Debug, Default, Clone)]
pub struct MonolithicChecker {
    sweep: ComponentSweep,
}

impl MonolithicChecker {
    pub fn check(&mut self, partner: &[u32]) -> bool {
        let m = partner.len();
        if m > 2 && has_adjacent_simple_pair(partner) {
            return false;
        }
        self.sweep.run(partner);
        let root = self.sweep.find(0);
        for p in 1..m {
            let q = partner[p] as usize;
            if q > p + 1 && self.sweep.find(p as u32) != root {
                return false;
            }
        }
        true
    }
}

fn has_adjacent_simple_pair(partner: &[u32]) -> bool {
    let m = partner.len();
    let simple_at = |i: usize| partner[i] as usize == (i + 1) % m;
    (0..m).any(|i| simple_at(i) && simple_at((i + 2) % m))
}

/// The `k`-core by peeling: vertices of degree below `k` are removed until
/// none remain. Returns the surviving vertices, sorted.
pub fn k_core(g: &IntersectionGraph, k: usize) -> Vec<u32> {
    let order: Vec<u32> = (0..g.vertex_count() as u32).collect();
    k_core_with_order(g, k, &order)
}

/// Peeling that seeds its queue in the given vertex order. The result does
/// not depend on the order; this exists so that can be checked.
pub fn k_core_with_order(g: &IntersectionGraph, k: usize, order: &[u32]) -> Vec<u32> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &v in order {
        if deg[v as usize] < k && !removed[v as usize] {
            removed[v as usize] = true;
            queue.push_back(v);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u as usize) {
            let v = v as usize;
            if !removed[v] {
                deg[v] -= 1;
                if deg[v] < k {
                    removed[v] = true;
                    queue.push_back(v as u32);
                }
            }
        }
    }
    (0..n as u32).filter(|&v| !removed[v as usize]).collect()
}

/// The `k`-core computed on the diagram directly.
///
/// Degrees come from a Fenwick sweep. Removing a chord enumerates the live
/// chords crossing it by scanning its shorter block, which costs its length
/// rather than its degree. In a random diagram the peeled chords are short,
/// so this stays near `O(n log n)` even when the graph itself would not fit
/// in memory.
pub fn k_core_of_diagram(d: &ChordDiagram, k: usize) -> Subdiagram {
    let mut peeler = KCorePeeler::default();
    let alive = peeler.run(d.partner0(), k);
    let partner = d.partner0();
    let chords = (0..partner.len())
        .filter(|&p| partner[p] as usize > p && alive[p])
        .map(|p| Chord::new_unchecked(p as u32 + 1, partner[p] + 1))
        .collect();
    Subdiagram::new(d.n(), chords).expect("subset of a diagram")
}

/// Reusable buffers for [`k_core_of_diagram`].
#[derive(Debug, Default, Clone)]
pub struct KCorePeeler {
    fw: Option<Fenwick>,
    deg: Vec<u32>,
    alive: Vec<bool>,
    queue: Vec<u32>,
}

impl KCorePeeler {
    /// Returns, per 0-based endpoint, whether its chord survives.
    pub fn run(&mut self, partner: &[u32], k: usize) -> &[bool] {
        let m = partner.len();
        let fw = self.fw.get_or_insert_with(|| Fenwick::new(0));
        degrees_by_endpoint(partner, fw, &mut self.deg);
        for p in 0..m {
            let q = partner[p] as usize;
            if q < p {
                self.deg[p] = self.deg[q];
            }
        }
        self.alive.clear();
        self.alive.resize(m, true);
        self.queue.clear();
        for p in 0..m {
            if (partner[p] as usize) > p && (self.deg[p] as usize) < k {
                self.alive[p] = false;
                self.alive[partner[p] as usize] = false;
                self.queue.push(p as u32);
            }
        }
        let mut head = 0;
        while head < self.queue.len() {
            let a = self.queue[head];
            head += 1;
            let b = partner[a as usize];
            let inner = b - a - 1;
            let m32 = m as u32;
            let visit = |p: u32, deg: &mut Vec<u32>, alive: &mut Vec<bool>, queue: &mut Vec<u32>| {
                let q = partner[p as usize];
                if !alive[p as usize] {
                    return;
                }
                let lo = p.min(q);
                deg[p as usize] -= 1;
                deg[q as usize] -= 1;
                if (deg[p as usize] as usize) < k {
                    alive[p as usize] = false;
                    alive[q as usize] = false;
                    queue.push(lo);
                }
            };
            if inner <= m32 - inner - 2 {
                for p in a + 1..b {
                    let q = partner[p as usize];
                    if q < a || q > b {
                        visit(p, &mut self.deg, &mut self.alive, &mut self.queue);
                    }
                }
            } else {
                for p in (b + 1..m32).chain(0..a) {
                    let q = partner[p as usize];
                    if q > a && q < b {
                        visit(p, &mut self.deg, &mut self.alive, &mut self.queue);
                    }
                }
            }
        }
        &self.alive
    }
}

/// The chords of length at least `k`.
pub fn len_at_least(d: &ChordDiagram, k: usize) -> Subdiagram {
    Subdiagram::of(d, |c| d.length_unchecked(c) as usize >= k)
}

/// Numbers of chords of each length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthProfile {
    /// `counts[j]` is the number of chords of length `j`, for `0 <= j < n`.
    pub counts: Vec<u64>,
}

impl LengthProfile {
    pub fn l(&self, j: usize) -> u64 {
        self.counts.get(j).copied().unwrap_or(0)
    }

    /// Number of chords of length below `k`.
    pub fn z(&self, k: usize) -> u64 {
        self.counts.iter().take(k).sum()
    }
}

pub fn length_profile(d: &ChordDiagram) -> LengthProfile {
    let mut counts = vec![0u64; d.n()];
    for c in d.chords() {
        counts[d.length_unchecked(c) as usize] += 1;
    }
    LengthProfile { counts }
}

/// Lengths of all chords, by vertex.
pub fn lengths(d: &ChordDiagram) -> Vec<u32> {
    d.chords().map(|c| d.length_unchecked(c)).collect()
}

/// Number of starting points `s` in `[2n]` such that the `2k` consecutive
/// endpoints from `s` are exactly covered by `k` chords. At `k = n` every
/// start qualifies and the answer is `2n`.
pub fn count_full_blocks(d: &ChordDiagram, k: usize) -> Result<u64> {
    let n = d.n();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, reason: format!("need 1 <= k <= n = {n}") });
    }
    let m = 2 * n;
    if k == n {
        return Ok(m as u64);
    }
    let len = 2 * k;
    let partner = d.partner0();
    let inside = |s: usize, p: usize| (p + m - s) % m < len;
    let mut full_chords = 0usize;
    for p in 0..len {
        if inside(0, partner[p] as usize) && (partner[p] as usize) > p {
            full_chords += 1;
        }
    }
    let mut total = (full_chords == k) as u64;
    for s in 1..m {
        let gone = s - 1;
        if inside(s - 1, partner[gone] as usize) {
            full_chords -= 1;
        }
        let added = (s + len - 1) % m;
        if inside(s, partner[added] as usize) {
            full_chords += 1;
        }
        total += (full_chords == k) as u64;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;
    use crate::sampler::{sample_uniform, Seed};

    fn d(s: &str) -> ChordDiagram {
        parse_diagram(s).unwrap()
    }

    fn fig1() -> ChordDiagram {
        d("1-4 2-7 3-6 5-9 8-10")
    }

    fn names(g: &IntersectionGraph, vs: &[u32]) -> Vec<String> {
        vs.iter().map(|&v| g.chord(v as usize).to_string()).collect()
    }

    #[test]
    fn five_chord_example_graph() {
        let g = intersection_graph(&fig1());
        assert_eq!(g.edge_count(), 5);
        let mut edges: Vec<String> = g
            .edges()
            .map(|(u, v)| format!("{} {}", g.chord(u), g.chord(v)))
            .collect();
        edges.sort();
        assert_eq!(edges, vec!["1-4 2-7", "1-4 3-6", "2-7 5-9", "3-6 5-9", "5-9 8-10"]);
        assert_eq!(g, intersection_graph_naive(&fig1()));
        assert_eq!(intersection_graph(&d("1-2 3-4 5-6")).edge_count(), 0);
        assert_eq!(intersection_graph(&d("1-3 2-4")).edge_count(), 1);
        assert_eq!(
            g.to_json(),
            r#"{"vertices":["1-4","2-7","3-6","5-9","8-10"],"edges":[[0,1],[0,2],[1,3],[2,3],[3,4]]}"#
        );
    }

    #[test]
    fn degrees() {
        let ex = d("1-8 2-4 3-11 5-7 6-9 10-12");
        assert_eq!(degree_of_c1(&ex), 2);
        assert_eq!(ex.chord_length(ex.c1()), Ok(4));
        assert_eq!(degree_of(&fig1(), Chord::new(5, 9).unwrap()), Ok(3));
        assert_eq!(degree_of(&d("1-2 3-4"), Chord::new(1, 2).unwrap()), Ok(0));
        assert_eq!(all_degrees(&fig1()), vec![2, 2, 2, 3, 1]);
    }

    #[test]
    fn component_examples() {
        let g = intersection_graph(&fig1());
        assert_eq!(components(&g).count(), 1);
        let two = d("1-2 3-4");
        assert_eq!(components(&intersection_graph(&two)).members, vec![vec![0], vec![1]]);
        let mixed = d("1-3 2-4 5-6");
        let c = components(&intersection_graph(&mixed));
        assert_eq!(c.members, vec![vec![0, 1], vec![2]]);
        assert_eq!(components_of_diagram(&mixed), c);
    }

    #[test]
    fn monolithic_examples() {
        assert!(is_monolithic(&fig1()));
        assert!(!is_monolithic(&d("1-2 3-4")));
        assert!(is_monolithic(&d("1-4 2-5 3-6 7-8")));
        assert!(is_monolithic(&d("1-2")));
        assert!(!is_monolithic(&d("1-4 2-3")));
        // a lone non-simple chord outside the root component
        assert!(!is_monolithic(&d("1-2 3-6 4-5")));
        // <10, 1> and <2, 3> are adjacent across the wrap
        assert!(!is_monolithic(&d("1-10 2-3 4-7 5-8 6-9")));
        assert!(!is_monolithic(&d("1-6 2-4 3-5 7-8 9-10")));
    }

    #[test]
    fn kcore_examples() {
        let g = intersection_graph(&fig1());
        assert_eq!(k_core(&g, 1).len(), 5);
        assert_eq!(names(&g, &k_core(&g, 2)), vec!["1-4", "2-7", "3-6", "5-9"]);
        assert!(k_core(&g, 0).len() == 5);
        assert!(k_core(&intersection_graph(&d("1-2 3-4")), 1).is_empty());
        let implicit = k_core_of_diagram(&fig1(), 2);
        assert_eq!(implicit.chords().iter().map(|c| c.to_string()).collect::<Vec<_>>(), vec!["1-4", "2-7", "3-6", "5-9"]);
    }

    #[test]
    fn lengths_and_blocks() {
        let f = fig1();
        let l3: Vec<String> = len_at_least(&f, 3).chords().iter().map(|c| c.to_string()).collect();
        assert_eq!(l3, vec!["2-7", "5-9"]);
        assert_eq!(len_at_least(&f, 0).len(), 5);
        assert_eq!(len_at_least(&f, 5).len(), 0);
        assert_eq!(length_profile(&f).counts, vec![0, 1, 2, 1, 1]);
        assert_eq!(length_profile(&d("1-2 3-4 5-6")).l(0), 3);
        assert_eq!(length_profile(&d("1-3 2-4")).counts, vec![0, 2]);
        assert_eq!(count_full_blocks(&d("1-2 3-4"), 1), Ok(2));
        assert_eq!(count_full_blocks(&f, 2), Ok(0));
        assert_eq!(count_full_blocks(&d("1-3 2-4 5-6"), 2), Ok(1));
        assert!(count_full_blocks(&f, 0).is_err());
        assert!(count_full_blocks(&f, 6).is_err());
    }

    fn brute_full_blocks(d: &ChordDiagram, k: usize) -> u64 {
        let m = 2 * d.n();
        (0..m)
            .filter(|&s| {
                let block: Vec<usize> = (0..2 * k).map(|i| (s + i) % m).collect();
                block.iter().all(|&p| block.contains(&(d.partner0()[p] as usize)))
            })
            .count() as u64
    }

    #[test]
    fn random_cross_checks() {
        let mut rng = Seed(21).rng();
        for _ in 0..300 {
            let n = 1 + (crate::sampler::below(&mut rng, 40) as usize);
            let dd = sample_uniform(n, &mut rng).unwrap();
            let g = intersection_graph(&dd);
            assert_eq!(g, intersection_graph_naive(&dd));
            let degs: Vec<u32> = (0..n).map(|v| g.degree(v) as u32).collect();
            assert_eq!(all_degrees(&dd), degs);
            for c in dd.chords() {
                assert_eq!(degree_of(&dd, c).unwrap(), degs[g.vertex_of(c).unwrap()]);
            }
            assert_eq!(components_of_diagram(&dd), components(&g));
            for k in 0..6 {
                let core: Vec<Chord> = k_core(&g, k).iter().map(|&v| g.chord(v as usize)).collect();
                assert_eq!(k_core_of_diagram(&dd, k).chords(), &core[..]);
            }
            for k in 1..=n {
                assert_eq!(count_full_blocks(&dd, k).unwrap(), brute_full_blocks(&dd, k));
            }
        }
    }
}
