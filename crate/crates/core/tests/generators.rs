use std::collections::HashSet;

use locallab::generators::{
    assign_ids, gen_caterpillar2, gen_lb_graph, gen_path, gen_random_tree, gen_threelevel,
    lb_graph_size, IdScheme,
};
use locallab::tree::{compute_levels, Tree};
use locallab::Error;
use proptest::prelude::*;

/// Node count by the path-count recurrence, written out independently.
fn count_by_recurrence(lengths: &[usize]) -> usize {
    let k = lengths.len();
    let mut p = vec![0usize; k + 1];
    p[k] = 1;
    for i in (1..k).rev() {
        p[i] = (lengths[i] + 2) * p[i + 1];
    }
    (1..=k).map(|i| p[i] * lengths[i - 1]).sum()
}

fn components_up_to(t: &Tree, tags: &[u32], i: u32) -> Vec<usize> {
    let n = t.n();
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if seen[s] || tags[s] > i {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            for &u in t.neighbors(v) {
                if !seen[u] && tags[u] <= i {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        sizes.push(size);
    }
    sizes
}

#[test]
fn lb_graph_counts() {
    let g = gen_lb_graph(1, &[5]).unwrap();
    assert_eq!(g.tree.n(), 5);
    assert_eq!(g.tree.edges().len(), 4);

    let g = gen_lb_graph(2, &[2, 3]).unwrap();
    assert_eq!(g.tree.n(), 13);
    assert_eq!(g.level_tags.iter().filter(|&&l| l == 2).count(), 3);
    assert_eq!(g.level_tags.iter().filter(|&&l| l == 1).count(), 10);

    let g = gen_lb_graph(3, &[2, 2, 2]).unwrap();
    assert_eq!(g.tree.n(), 42);
    assert_eq!(lb_graph_size(&[2, 2, 2]), 42);
    let per_level: Vec<usize> = (1..=3)
        .map(|j| g.level_tags.iter().filter(|&&l| l == j).count())
        .collect();
    assert_eq!(per_level, vec![32, 8, 2]);
}

#[test]
fn lb_graph_errors() {
    assert!(matches!(gen_lb_graph(2, &[0, 3]), Err(Error::Domain(_))));
    assert!(matches!(gen_lb_graph(2, &[3]), Err(Error::Domain(_))));
    assert!(matches!(gen_lb_graph(3, &[1000, 1000, 1000]), Err(Error::SizeOverflow(_))));
}

#[test]
fn paths() {
    assert_eq!(gen_path(1).unwrap().tree.n(), 1);
    let t = gen_path(2).unwrap().tree;
    assert_eq!(t.edges(), vec![(0, 1)]);
    let t = gen_path(10).unwrap().tree;
    let d = t.distances_from(0, usize::MAX);
    assert_eq!(d.iter().copied().max(), Some(9));
    assert!(gen_path(0).is_err());
}

#[test]
fn caterpillars() {
    let g = gen_caterpillar2(1, 1).unwrap();
    assert_eq!(g.tree.n(), 2);
    assert_eq!(g.tree.edges().len(), 1);

    let g = gen_caterpillar2(3, 2).unwrap();
    assert_eq!(g.tree.n(), 9);
    let lv = compute_levels(&g.tree, 2);
    assert_eq!(lv.level, g.level_tags);
    // legs at level 1, the inner spine node at level 2
    assert!((3..9).all(|v| lv.level[v] == 1));
    assert_eq!(lv.level[1], 2);

    let g = gen_caterpillar2(20, 7).unwrap();
    assert_eq!(g.tree.n(), 160);
    assert_eq!(compute_levels(&g.tree, 2).level, g.level_tags);
}

#[test]
fn three_level() {
    let g = gen_threelevel(1, 1, 1).unwrap();
    assert_eq!(g.tree.n(), 13);
    for (l, l2, i) in [(1, 1, 1), (3, 2, 4), (5, 4, 2), (2, 6, 3)] {
        let g = gen_threelevel(l, l2, i).unwrap();
        let lv = compute_levels(&g.tree, 3);
        assert_eq!(lv.level, g.level_tags);
        assert!((1..=3).all(|j| lv.count(j) > 0));
        assert_eq!(lv.count(4), 0);
    }
}

#[test]
fn sequential_and_random_ids() {
    let t = gen_path(3).unwrap().tree;
    assert_eq!(assign_ids(&t, IdScheme::Sequential, 0).unwrap().ids(), &[1, 2, 3]);

    let t = gen_path(10).unwrap().tree;
    let a = assign_ids(&t, IdScheme::RandomPermutation { c: 2.0 }, 7).unwrap();
    let b = assign_ids(&t, IdScheme::RandomPermutation { c: 2.0 }, 7).unwrap();
    assert_eq!(a.ids(), b.ids());
    let set: HashSet<u64> = a.ids().iter().copied().collect();
    assert_eq!(set.len(), 10);
    assert!(a.ids().iter().all(|&x| (1..=100).contains(&x)));
    let c = assign_ids(&t, IdScheme::RandomPermutation { c: 2.0 }, 8).unwrap();
    assert_ne!(a.ids(), c.ids());

    assert!(matches!(
        assign_ids(&t, IdScheme::RandomPermutation { c: 0.5 }, 1),
        Err(Error::RangeTooSmall { n: 10, .. })
    ));
}

#[test]
fn monotone_ids_on_a_path() {
    let t = gen_path(9).unwrap().tree;
    let t = assign_ids(&t, IdScheme::MonotoneAlongPaths { c: 2.0 }, 0).unwrap();
    let ids = t.ids();
    let mid = (0..9).min_by_key(|&v| ids[v]).unwrap();
    assert_eq!(mid, 4);
    for v in 0..mid {
        assert!(ids[v] > ids[v + 1]);
    }
    for v in mid..8 {
        assert!(ids[v] < ids[v + 1]);
    }
    assert!(ids.iter().all(|&x| x <= 81));
}

#[test]
fn random_trees() {
    let a = gen_random_tree(500, 3, 11).unwrap();
    let b = gen_random_tree(500, 3, 11).unwrap();
    assert_eq!(a, b);
    assert!((0..500).all(|v| a.degree(v) <= 3));
    assert!(gen_random_tree(0, 3, 1).is_err());
    assert!(gen_random_tree(5, 1, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lb_graph_structure(lengths in prop::collection::vec(1usize..5, 1..4)) {
        let k = lengths.len();
        let g = gen_lb_graph(k, &lengths).unwrap();
        prop_assert_eq!(g.tree.n(), count_by_recurrence(&lengths));
        prop_assert_eq!(lb_graph_size(&lengths), g.tree.n() as u128);
        prop_assert!((0..g.tree.n()).all(|v| g.tree.degree(v) <= 4));
        let lv = compute_levels(&g.tree, k as u32);
        prop_assert_eq!(&lv.level, &g.level_tags);
        // component sizes of levels <= i lie within [L_i, 3^k L_i]
        let mut li = 1usize;
        for i in 1..=k {
            li *= lengths[i - 1];
            for size in components_up_to(&g.tree, &g.level_tags, i as u32) {
                prop_assert!(size >= li);
                prop_assert!(size <= 3usize.pow(k as u32) * li);
            }
        }
    }

    #[test]
    fn monotone_ids_increase_from_center(n in 1usize..80, seed in any::<u64>()) {
        let t = gen_random_tree(n, 4, seed).unwrap();
        let m = assign_ids(&t, IdScheme::MonotoneAlongPaths { c: 2.0 }, seed).unwrap();
        let root = (0..n).min_by_key(|&v| m.id(v)).unwrap();
        let d = t.distances_from(root, usize::MAX);
        for (u, v) in t.edges() {
            let (near, far) = if d[u] < d[v] { (u, v) } else { (v, u) };
            prop_assert!(m.id(near) < m.id(far));
        }
    }
}
