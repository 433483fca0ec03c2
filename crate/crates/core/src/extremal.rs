//! Clique, independence and nesting numbers of a chord diagram.
//!
//! Every statistic comes with a witness, the lexicographically smallest
//! optimal chord set when both sets are written sorted by smaller endpoint.

use serde::Serialize;

use crate::diagram::{crosses_unchecked, Chord, ChordDiagram};

/// The three extremal statistics of one diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremalStats {
    pub omega: u32,
    pub alpha: u32,
    pub alpha_nest: u32,
    pub omega_witness: Vec<Chord>,
    pub alpha_witness: Vec<Chord>,
    pub alpha_nest_witness: Vec<Chord>,
}

pub fn extremal_stats(d: &ChordDiagram) -> ExtremalStats {
    let (omega, omega_witness) = clique_number(d);
    let (alpha, alpha_witness) = independence_number(d);
    let (alpha_nest, alpha_nest_witness) = nesting_number(d);
    ExtremalStats { omega, alpha, alpha_nest, omega_witness, alpha_witness, alpha_nest_witness }
}

/// Lengths `L[i]` of the longest strictly increasing subsequence starting
/// at each index, by patience sorting from the right.
fn chain_lengths_from(values: &[i64]) -> Vec<u32> {
    let mut tails: Vec<i64> = Vec::new();
    let mut out = vec![0u32; values.len()];
    for i in (0..values.len()).rev() {
        let x = -values[i];
        let pos = tails.partition_point(|&t| t < x);
        if pos == tails.len() {
            tails.push(x);
        } else {
            tails[pos] = x;
        }
        out[i] = pos as u32 + 1;
    }
    out
}

/// Indices of the longest strictly increasing subsequence that is earliest
/// in lexicographic order of indices.
fn first_longest_increasing(values: &[i64]) -> Vec<usize> {
    let from = chain_lengths_from(values);
    let Some(&best) = from.iter().max() else {
        return Vec::new();
    };
    let mut rem = best;
    let mut prev = i64::MIN;
    let mut picked = Vec::with_capacity(best as usize);
    for (i, (&l, &v)) in from.iter().zip(values).enumerate() {
        if rem == 0 {
            break;
        }
        if l == rem && v > prev {
            picked.push(i);
            prev = v;
            rem -= 1;
        }
    }
    picked
}

fn longest_increasing_len(values: &[i64]) -> u32 {
    let mut tails: Vec<i64> = Vec::new();
    for &x in values {
        let pos = tails.partition_point(|&t| t < x);
        if pos == tails.len() {
            tails.push(x);
        } else {
            tails[pos] = x;
        }
    }
    tails.len() as u32
}

/// Largest pairwise-crossing set.
///
/// In a clique sorted by smaller endpoint, the first chord `<u, v>` crosses
/// all the others, each of which therefore has `u < a < v < b`. Among such
/// chords two cross exactly when their `b`s are in the same order as their
/// `a`s, so the clique is `<u, v>` plus an increasing run of `b`s read in
/// order of `a`. Each chord is tried as the first one.
pub fn clique_number(d: &ChordDiagram) -> (u32, Vec<Chord>) {
    let partner = d.partner0();
    let m = partner.len();
    let mut best = 0u32;
    let mut best_anchor = 0usize;
    let mut buf: Vec<i64> = Vec::new();
    let candidates = |u: usize, buf: &mut Vec<i64>| {
        let v = partner[u] as usize;
        buf.clear();
        for p in u + 1..v {
            if partner[p] as usize > v {
                buf.push(partner[p] as i64);
            }
        }
    };
    for u in 0..m {
        let v = partner[u] as usize;
        if v < u || v - u <= best as usize {
            continue;
        }
        candidates(u, &mut buf);
        if buf.len() + 1 <= best as usize {
            continue;
        }
        let size = 1 + longest_increasing_len(&buf);
        if size > best {
            best = size;
            best_anchor = u;
        }
    }
    let u = best_anchor;
    let mut witness = vec![d.chord_at(u as u32 + 1)];
    candidates(u, &mut buf);
    for i in first_longest_increasing(&buf) {
        let b = buf[i] as u32;
        witness.push(d.chord_at(b + 1));
    }
    debug_assert!(pairwise(&witness, crosses_unchecked));
    (best, witness)
}

/// Largest set of pairwise non-crossing chords.
///
/// With the circle cut between `2n` and `1`, a non-crossing set is a forest
/// of nested chords. `w(c)` is one plus the best set strictly inside `c`;
/// the best set inside an interval is a weighted interval schedule of the
/// chords it contains, with weights `w`, found by a right-to-left scan.
/// Chords are handled inner ones first, so the total cost is the sum of
/// all chord spans.
pub fn independence_number(d: &ChordDiagram) -> (u32, Vec<Chord>) {
    let partner = d.partner0();
    let m = partner.len();
    let mut weight = vec![0u32; m];
    let mut g: Vec<u32> = vec![0; m + 1];
    // Closing a chord at p means every chord inside it has already closed.
    for p in 0..m {
        let q = partner[p] as usize;
        if q < p {
            weight[q] = 1 + schedule(partner, &weight, q + 1, p, &mut g);
        }
    }
    let total = schedule(partner, &weight, 0, m, &mut g);
    let mut witness = Vec::with_capacity(total as usize);
    collect_schedule(partner, &weight, 0, m, &mut g, &mut witness);
    debug_assert!(witness.len() == total as usize && pairwise(&witness, |x, y| !crosses_unchecked(x, y)));
    (total, witness)
}

/// Best weight of nested-free chords inside `lo..hi`; leaves the suffix
/// values in `g[lo..=hi]`.
fn schedule(partner: &[u32], weight: &[u32], lo: usize, hi: usize, g: &mut [u32]) -> u32 {
    g[hi] = 0;
    for x in (lo..hi).rev() {
        let y = partner[x] as usize;
        let mut v = g[x + 1];
        if y > x && y < hi {
            v = v.max(weight[x] + g[y + 1]);
        }
        g[x] = v;
    }
    g[lo]
}

fn collect_schedule(
    partner: &[u32],
    weight: &[u32],
    lo: usize,
    hi: usize,
    g: &mut Vec<u32>,
    out: &mut Vec<Chord>,
) {
    schedule(partner, weight, lo, hi, g);
    let mut taken: Vec<(usize, usize)> = Vec::new();
    let mut x = lo;
    while x < hi {
        let y = partner[x] as usize;
        if y > x && y < hi && weight[x] + g[y + 1] == g[x] {
            taken.push((x, y));
            x = y + 1;
        } else {
            x += 1;
        }
    }
    for (x, y) in taken {
        out.push(Chord::new_unchecked(x as u32 + 1, y as u32 + 1));
        if y > x + 1 {
            collect_schedule(partner, weight, x + 1, y, g, out);
        }
    }
}

/// Interval table version of [`independence_number`], quadratic in time and
/// memory; only the value.
pub fn independence_number_table(d: &ChordDiagram) -> u32 {
    let partner = d.partner0();
    let m = partner.len();
    // best[i][j] over endpoints i..=j, stored row-major with j >= i.
    let mut best = vec![0u32; m * m];
    let at = |i: usize, j: usize| i * m + j;
    for len in 2..=m {
        for i in 0..=m - len {
            let j = i + len - 1;
            let mut v = best[at(i, j - 1)];
            let p = partner[j] as usize;
            if p >= i && p < j {
                let left = if p > i { best[at(i, p - 1)] } else { 0 };
                let inner = if j > p + 1 { best[at(p + 1, j - 1)] } else { 0 };
                v = v.max(left + 1 + inner);
            }
            best[at(i, j)] = v;
        }
    }
    best[at(0, m - 1)]
}

/// Longest nested chain `x_1 < ... < x_r < y_r < ... < y_1` in the given
/// labels: a strictly decreasing run of `b`s read in order of `a`.
pub fn nesting_number(d: &ChordDiagram) -> (u32, Vec<Chord>) {
    let chords: Vec<Chord> = d.chords().collect();
    let values: Vec<i64> = chords.iter().map(|c| -(c.b() as i64)).collect();
    let picked = first_longest_increasing(&values);
    let witness: Vec<Chord> = picked.into_iter().map(|i| chords[i]).collect();
    debug_assert!(witness.windows(2).all(|w| w[0].nests(&w[1])));
    (witness.len() as u32, witness)
}

fn pairwise(set: &[Chord], ok: impl Fn(Chord, Chord) -> bool) -> bool {
    set.iter().enumerate().all(|(i, &x)| set[i + 1..].iter().all(|&y| ok(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;
    use crate::sampler::{below, sample_uniform, Seed};

    fn d(s: &str) -> ChordDiagram {
        parse_diagram(s).unwrap()
    }

    fn text(cs: &[Chord]) -> Vec<String> {
        cs.iter().map(|c| c.to_string()).collect()
    }

    /// Largest subset satisfying `ok` pairwise, and the first one found in
    /// lexicographic order of sorted chord lists.
    fn brute(d: &ChordDiagram, ok: impl Fn(Chord, Chord) -> bool) -> (u32, Vec<Chord>) {
        let chords: Vec<Chord> = d.chords().collect();
        let n = chords.len();
        let mut best: Option<Vec<Chord>> = None;
        for mask in 1u32..(1 << n) {
            let set: Vec<Chord> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| chords[i]).collect();
            if !set.iter().enumerate().all(|(i, &x)| set[i + 1..].iter().all(|&y| ok(x, y))) {
                continue;
            }
            best = match best {
                Some(b) if b.len() > set.len() || (b.len() == set.len() && b <= set) => Some(b),
                _ => Some(set),
            };
        }
        let b = best.unwrap();
        (b.len() as u32, b)
    }

    #[test]
    fn examples() {
        let five = d("1-4 2-7 3-6 5-9 8-10");
        assert_eq!(clique_number(&five).0, 2);
        let (a, w) = independence_number(&five);
        assert_eq!(a, 3);
        assert_eq!(text(&w), vec!["2-7", "3-6", "8-10"]);
        assert_eq!(nesting_number(&five), (2, vec![Chord::new(2, 7).unwrap(), Chord::new(3, 6).unwrap()]));
        let tri = d("1-4 2-5 3-6");
        assert_eq!(clique_number(&tri).0, 3);
        assert_eq!(independence_number(&tri).0, 1);
        let simple = d("1-2 3-4 5-6 7-8");
        assert_eq!(clique_number(&simple).0, 1);
        assert_eq!(independence_number(&simple).0, 4);
        assert_eq!(nesting_number(&d("1-6 2-5 3-4")).0, 3);
        assert_eq!(nesting_number(&d("1-3 2-4")).0, 1);
    }

    #[test]
    fn matches_brute_force_on_random_diagrams() {
        let mut rng = Seed(17).rng();
        for _ in 0..400 {
            let n = 1 + below(&mut rng, 10) as usize;
            let dd = sample_uniform(n, &mut rng).unwrap();
            let s = extremal_stats(&dd);
            assert_eq!((s.omega, s.omega_witness.clone()), brute(&dd, crosses_unchecked));
            assert_eq!(
                (s.alpha, s.alpha_witness.clone()),
                brute(&dd, |x, y| !crosses_unchecked(x, y))
            );
            assert_eq!(
                (s.alpha_nest, s.alpha_nest_witness.clone()),
                brute(&dd, |x, y| x.nests(&y) || y.nests(&x))
            );
            assert_eq!(independence_number_table(&dd), s.alpha);
            assert!(s.alpha >= s.alpha_nest);
        }
    }
}
