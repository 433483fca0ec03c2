use std::collections::BTreeMap;

use chordlab::diagram::{crosses, parse_diagram, Chord};
use chordlab::formulas::RationalValue;
use chordlab::graph::components_of_diagram;
use chordlab::oracle::{enumerate_diagrams, exact_distribution, StatisticSpec};
use chordlab::oriented::{find_balanced_clique, is_strongly_connected_on, orient, scc, OrientedDiagram};
use chordlab::sampler::{below, sample_uniform, Seed};
use chordlab::ChordDiagram;

/// Strong components from the transitive closure of the arcs `u -> v`.
fn closure_components(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<u32>> {
    let mut reach = vec![vec![false; n]; n];
    for (v, row) in reach.iter_mut().enumerate() {
        row[v] = true;
    }
    for &(u, v) in arcs {
        reach[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if seen[v] {
            continue;
        }
        let comp: Vec<u32> = (0..n).filter(|&w| reach[v][w] && reach[w][v]).map(|w| w as u32).collect();
        for &w in &comp {
            seen[w as usize] = true;
        }
        out.push(comp);
    }
    out
}

fn oriented_with_arcs(d: &ChordDiagram, mut coin: impl FnMut() -> bool) -> (OrientedDiagram, Vec<(usize, usize)>) {
    let mut arcs = Vec::new();
    let od = OrientedDiagram::from_fn(d.clone(), |_, u, v| {
        let over = coin();
        arcs.push(if over { (u, v) } else { (v, u) });
        over
    });
    (od, arcs)
}

#[test]
fn scc_matches_transitive_closure_on_small_diagrams() {
    let mut rng = Seed(31).rng();
    for n in 1..=5 {
        for d in enumerate_diagrams(n).unwrap() {
            for _ in 0..50 {
                let (od, arcs) = oriented_with_arcs(&d, || below(&mut rng, 2) == 1);
                let dec = scc(&od);
                let expected = closure_components(n, &arcs);
                assert_eq!(dec.components, expected, "{}", d.to_text());
                assert_eq!(dec.trivial_count, expected.iter().filter(|c| c.len() == 1).count());
                for (i, c) in dec.components.iter().enumerate() {
                    assert!(c.len() <= dec.giant_size());
                    if c.len() == dec.giant_size() {
                        assert!(i >= dec.giant_index);
                    }
                }
            }
        }
    }
}

#[test]
fn scc_refines_undirected_components() {
    let mut rng = Seed(8).rng();
    for _ in 0..100_000 {
        let n = 1 + below(&mut rng, 200) as usize;
        let d = sample_uniform(n, &mut rng).unwrap();
        let od = orient(&d, &mut rng);
        let comps = components_of_diagram(&d);
        for c in scc(&od).components {
            let label = comps.labels[c[0] as usize];
            assert!(c.iter().all(|&v| comps.labels[v as usize] == label));
        }
    }
}

#[test]
fn orientation_bits_are_fair_and_uncorrelated() {
    let d = sample_uniform(50, &mut Seed(3).rng()).unwrap();
    let m = orient(&d, &mut Seed(0).rng()).crossing_count();
    assert!(m > 100);
    let reps = 10_000;
    let mut rng = Seed(4).rng();
    let samples: Vec<Vec<bool>> = (0..reps).map(|_| orient(&d, &mut rng).bits()).collect();
    for e in 0..m {
        let mean = samples.iter().filter(|b| b[e]).count() as f64 / reps as f64;
        assert!((mean - 0.5).abs() <= 0.02, "crossing {e}: {mean}");
    }
    for e in 0..m.min(40) {
        for f in e + 1..m.min(40) {
            let both = samples.iter().filter(|b| b[e] && b[f]).count() as f64 / reps as f64;
            let pe = samples.iter().filter(|b| b[e]).count() as f64 / reps as f64;
            let pf = samples.iter().filter(|b| b[f]).count() as f64 / reps as f64;
            let corr = (both - pe * pf) / (pe * (1.0 - pe) * pf * (1.0 - pf)).sqrt();
            assert!(corr.abs() < 0.05, "crossings {e}, {f}: {corr}");
        }
    }
}

#[test]
fn trivial_scc_law_matches_brute_force_orientations() {
    for n in 1..=4 {
        let mut tally: BTreeMap<i64, u64> = BTreeMap::new();
        let mut total = 0u64;
        for d in enumerate_diagrams(n).unwrap() {
            // Weight each diagram's orientations equally: 2^(C(n,2) - cr) each.
            let probe = OrientedDiagram::from_fn(d.clone(), |_, _, _| false);
            let cr = probe.crossing_count();
            let weight = 1u64 << (n * (n - 1) / 2 - cr);
            for mask in 0u64..(1 << cr) {
                let mut e = 0;
                let (_, arcs) = oriented_with_arcs(&d, || {
                    e += 1;
                    mask >> (e - 1) & 1 == 1
                });
                let trivial = closure_components(n, &arcs).iter().filter(|c| c.len() == 1).count();
                *tally.entry(trivial as i64).or_default() += weight;
                total += weight;
            }
        }
        let exact = exact_distribution(n, StatisticSpec::TrivialScc, None).unwrap();
        let expected: Vec<(i64, RationalValue)> =
            tally.into_iter().map(|(v, w)| (v, RationalValue::new(w, total))).collect();
        assert_eq!(exact.support, expected, "n = {n}");
    }
}

#[test]
fn fixed_orientations() {
    let five = parse_diagram("1-4 2-7 3-6 5-9 8-10").unwrap();
    let (od, arcs) = oriented_with_arcs(&five, || true);
    // Every arc goes from the smaller vertex, so there is no cycle.
    assert!(arcs.iter().all(|&(u, v)| u < v));
    assert_eq!(scc(&od).trivial_count, 5);
    let tri = OrientedDiagram::from_bits(parse_diagram("1-4 2-5 3-6").unwrap(), &[true, false, true]).unwrap();
    assert_eq!(scc(&tri).components, vec![vec![0, 1, 2]]);
    let all: Vec<Chord> = tri.base().chords().collect();
    assert!(is_strongly_connected_on(&tri, &all).unwrap());
}

#[test]
fn strong_connectivity_on_subsets_matches_closure() {
    let mut rng = Seed(12).rng();
    for _ in 0..2000 {
        let n = 1 + below(&mut rng, 9) as usize;
        let d = sample_uniform(n, &mut rng).unwrap();
        let (od, arcs) = oriented_with_arcs(&d, || below(&mut rng, 2) == 1);
        let chords: Vec<Chord> = d.chords().collect();
        let mask = below(&mut rng, 1 << n);
        let keep: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let index = |v: usize| keep.iter().position(|&x| x == v);
        let sub_arcs: Vec<(usize, usize)> = arcs
            .iter()
            .filter_map(|&(u, v)| Some((index(u)?, index(v)?)))
            .collect();
        let expected = keep.is_empty() || closure_components(keep.len(), &sub_arcs).len() == 1;
        let subset: Vec<Chord> = keep.iter().map(|&i| chords[i]).collect();
        assert_eq!(is_strongly_connected_on(&od, &subset).unwrap(), expected);
    }
}

#[test]
fn balanced_cliques_pairwise_cross() {
    let mut rng = Seed(21).rng();
    let mut found = 0;
    for _ in 0..3000 {
        let n = 2 + below(&mut rng, 60) as usize;
        let m = 1 + below(&mut rng, 4.min(n as u64)) as usize;
        let d = sample_uniform(n, &mut rng).unwrap();
        if let Some(clique) = find_balanced_clique(&d, m).unwrap() {
            found += 1;
            assert_eq!(clique.len(), m);
            for i in 0..m {
                for j in i + 1..m {
                    assert!(crosses(clique[i], clique[j]).unwrap());
                }
            }
        }
    }
    assert!(found > 100);
}

#[test]
fn one_nontrivial_component_at_n_2000() {
    let mut rng = Seed(2000).rng();
    let reps = 2000;
    let mut single = 0;
    for _ in 0..reps {
        let d = sample_uniform(2000, &mut rng).unwrap();
        single += (scc(&orient(&d, &mut rng)).nontrivial_count() == 1) as usize;
    }
    assert!(single as f64 / reps as f64 >= 0.95, "{single} of {reps}");
}
