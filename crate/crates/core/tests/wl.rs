mod common;

use common::*;
use prooflab::cfi::{to_graph, twisted_pair, CfiBase};
use prooflab::wl::*;
use rand::Rng;

fn relabel(g: &ColoredGraph, perm: &[usize]) -> ColoredGraph {
    let mut h = ColoredGraph::new(g.n);
    for v in 0..g.n {
        h.colors[perm[v]] = g.colors[v];
    }
    for (name, edges) in &g.relations {
        h.relations.entry(name.clone()).or_default();
        for &(a, b) in edges {
            h.add_edge(name, perm[a as usize] as u32, perm[b as usize] as u32).unwrap();
        }
    }
    h
}

fn random_perm(r: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, r.gen_range(0..=i));
    }
    p
}

fn two_triangles() -> ColoredGraph {
    ColoredGraph::undirected(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
}

fn c6() -> ColoredGraph {
    ColoredGraph::undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap()
}

#[test]
fn triangles_versus_hexagon() {
    let (g, h) = (two_triangles(), c6());
    assert!(!wl_distinguishes(&g, &h, 1).unwrap());
    assert!(wl_distinguishes(&g, &h, 2).unwrap());
    assert_eq!(wl_sweep(&g, &h, 3).unwrap(), Some(2));
    assert_eq!(wl_sweep(&g, &g, 3).unwrap(), None);
    assert!(wl_distinguishes(&g, &h, 0).is_err());
}

#[test]
fn sound_and_monotone_on_random_pairs() {
    let mut r = rng(51);
    let mut separated = 0;
    for case in 0..120 {
        let n = r.gen_range(2..=8);
        let ge = random_graph(&mut r, n, 0.4);
        let iso_copy = r.gen_bool(0.4);
        let he = if iso_copy {
            let perm = random_perm(&mut r, n);
            ge.iter().map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b]))).collect()
        } else {
            random_graph(&mut r, n, 0.4)
        };
        let (g, h) = (colored_from_edges(n, &ge, vec![0; n]), colored_from_edges(n, &he, vec![0; n]));
        let iso = brute_force_graph_iso(n, &ge, &he);
        let verdicts: Vec<bool> = (1..=3).map(|d| wl_distinguishes(&g, &h, d).unwrap()).collect();
        if iso {
            assert!(verdicts.iter().all(|&v| !v), "case {case}: isomorphic graphs distinguished");
        }
        for w in verdicts.windows(2) {
            assert!(!w[0] || w[1], "case {case}: not monotone {verdicts:?}");
        }
        separated += verdicts[2] as usize;
    }
    assert!(separated > 20);
}

#[test]
fn colored_soundness_against_backtracking() {
    let mut r = rng(52);
    for _ in 0..60 {
        let n = r.gen_range(2..=10);
        let colors: Vec<u32> = (0..n).map(|_| r.gen_range(0..3)).collect();
        let g = colored_from_edges(n, &random_graph(&mut r, n, 0.35), colors);
        let h = if r.gen_bool(0.5) { relabel(&g, &random_perm(&mut r, n)) } else {
            let colors: Vec<u32> = (0..n).map(|_| r.gen_range(0..3)).collect();
            colored_from_edges(n, &random_graph(&mut r, n, 0.35), colors)
        };
        if colored_iso(&g, &h) {
            assert!(!wl_distinguishes(&g, &h, 2).unwrap());
        }
        // a 1-dim distinction is a certificate of non-isomorphism
        if wl_distinguishes(&g, &h, 1).unwrap() {
            assert!(!colored_iso(&g, &h));
        }
    }
}

#[test]
fn invariant_under_relabelling() {
    let mut r = rng(53);
    for _ in 0..40 {
        let n = r.gen_range(2..=9);
        let colors: Vec<u32> = (0..n).map(|_| r.gen_range(0..2)).collect();
        let g = colored_from_edges(n, &random_graph(&mut r, n, 0.4), colors);
        let h = colored_from_edges(n, &random_graph(&mut r, n, 0.4), vec![0; n]);
        let (g2, h2) = (relabel(&g, &random_perm(&mut r, n)), relabel(&h, &random_perm(&mut r, n)));
        for d in 1..=2 {
            assert_eq!(wl_distinguishes(&g, &h, d).unwrap(), wl_distinguishes(&g2, &h2, d).unwrap());
            assert!(!wl_distinguishes(&g, &g2, d).unwrap());
        }
    }
}

#[test]
fn relation_names_matter_but_not_their_order() {
    let mut g = ColoredGraph::new(3);
    g.add_edge("A", 0, 1).unwrap();
    g.add_edge("B", 1, 2).unwrap();
    let mut h = ColoredGraph::new(3);
    h.add_edge("B", 1, 2).unwrap();
    h.add_edge("A", 0, 1).unwrap();
    assert!(!wl_distinguishes(&g, &h, 1).unwrap());
    let mut swapped = ColoredGraph::new(3);
    swapped.add_edge("B", 0, 1).unwrap();
    swapped.add_edge("A", 1, 2).unwrap();
    assert!(wl_distinguishes(&g, &swapped, 1).unwrap());
}

#[test]
fn sizes_and_colors_separate() {
    let g = ColoredGraph::undirected(3, &[]).unwrap();
    let h = ColoredGraph::undirected(4, &[]).unwrap();
    assert!(wl_distinguishes(&g, &h, 1).unwrap());
    let mut g2 = g.clone();
    g2.colors = vec![0, 0, 1];
    assert!(wl_distinguishes(&g, &g2, 1).unwrap());
}

#[test]
fn cfi_k4_pair_needs_more_than_one_dimension() {
    let base = CfiBase::library("k4").unwrap();
    let (a, b) = twisted_pair(&base, 2).unwrap();
    let (ga, gb) = (to_graph(&a), to_graph(&b));
    assert!(!wl_distinguishes(&ga, &gb, 1).unwrap());
    let d = wl_sweep(&ga, &gb, 3).unwrap();
    assert!(matches!(d, Some(2) | Some(3)), "{d:?}");
}

#[test]
fn text_and_json_formats() {
    let text = "# a path\n3 2\n0 1\n1 2\ncolors 0 1 0\n";
    let g = ColoredGraph::parse(text).unwrap();
    assert_eq!(g.n, 3);
    assert_eq!(g.colors, vec![0, 1, 0]);
    assert!(g.has_edge("E", 1, 0));
    assert_eq!(ColoredGraph::parse(&g.to_json()).unwrap(), g);
    assert_eq!(ColoredGraph::parse(&g.to_text().unwrap()).unwrap(), g);
    assert!(ColoredGraph::parse("3 1\n0 5\n").is_err());
    assert!(ColoredGraph::parse("3 2\n0 1\n").is_err());
}
