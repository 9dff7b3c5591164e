use locallab::generators::{gen_lb_graph, gen_path, gen_random_tree};
use locallab::tree::{
    build_tree, compute_levels, extract_ball, level_paths, levels_to_text, parse_instance, to_text,
    Tree,
};
use locallab::Error;
use proptest::prelude::*;

fn star(leaves: usize) -> Tree {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    build_tree(leaves + 1, &edges, None, None).unwrap()
}

#[test]
fn smallest_tree() {
    let t = build_tree(2, &[(0, 1)], Some(vec![1, 2]), None).unwrap();
    assert_eq!(t.n(), 2);
    assert_eq!(t.neighbors(0), &[1]);
    assert_eq!(t.id(1), 2);
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(
        build_tree(3, &[(0, 1), (1, 2), (2, 0)], None, None),
        Err(Error::NotATree(_))
    ));
    // right edge count but disconnected
    assert!(matches!(
        build_tree(4, &[(0, 1), (1, 0), (2, 3)], None, None),
        Err(Error::NotATree(_))
    ));
    assert!(matches!(
        build_tree(2, &[(0, 1)], Some(vec![5, 5]), None),
        Err(Error::DuplicateId(5))
    ));
    assert!(matches!(
        build_tree(2, &[(0, 1)], Some(vec![0, 5]), None),
        Err(Error::Domain(_))
    ));
    let edges: Vec<_> = (1..=5).map(|v| (0, v)).collect();
    assert!(matches!(
        build_tree(6, &edges, None, None),
        Err(Error::DegreeExceeded { node: 0, degree: 5, max: 4 })
    ));
    assert!(matches!(build_tree(2, &[(0, 2)], None, None), Err(Error::InvalidIndex(2))));
}

#[test]
fn path_of_five() {
    let t = build_tree(5, &[(0, 1), (1, 2), (2, 3), (3, 4)], Some(vec![1, 2, 3, 4, 5]), None).unwrap();
    assert_eq!((0..5).map(|v| t.degree(v)).max(), Some(2));
    let lv = compute_levels(&t, 2);
    assert!(lv.level.iter().all(|&l| l == 1));
    assert_eq!(lv.count(2), 0);
    assert_eq!(lv.count(3), 0);
    let paths = level_paths(&t, &lv, 1);
    assert_eq!(paths, vec![vec![0, 1, 2, 3, 4]]);
}

#[test]
fn star_levels() {
    let t = star(3);
    let lv = compute_levels(&t, 2);
    assert_eq!(lv.level, vec![2, 1, 1, 1]);
    let mut p = level_paths(&t, &lv, 1);
    p.sort();
    assert_eq!(p, vec![vec![1], vec![2], vec![3]]);
    assert_eq!(level_paths(&t, &lv, 2), vec![vec![0]]);
}

#[test]
fn remainder_nodes() {
    // A node of degree 4 whose arms are all long paths stays after one peel.
    let mut edges = Vec::new();
    let mut next = 1;
    for _ in 0..4 {
        let mut prev = 0;
        for _ in 0..3 {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    let t = build_tree(next, &edges, None, None).unwrap();
    let lv = compute_levels(&t, 1);
    assert!(lv.is_remainder(0));
    assert_eq!(lv.count(1), next - 1);
    let lv2 = compute_levels(&t, 2);
    assert_eq!(lv2.level[0], 2);
}

#[test]
fn lb_graph_level_paths() {
    let g = gen_lb_graph(2, &[2, 3]).unwrap();
    let lv = compute_levels(&g.tree, 2);
    let ones = level_paths(&g.tree, &lv, 1);
    let twos = level_paths(&g.tree, &lv, 2);
    assert_eq!(ones.len(), 5);
    assert!(ones.iter().all(|p| p.len() == 2));
    assert_eq!(twos.len(), 1);
    assert_eq!(twos[0].len(), 3);
}

#[test]
fn balls() {
    let t = gen_path(5).unwrap().tree;
    let b = extract_ball(&t, 2, 0).unwrap();
    assert_eq!(b.nodes, vec![2]);
    let b = extract_ball(&t, 2, 1).unwrap();
    assert_eq!(b.nodes, vec![1, 2, 3]);
    assert_eq!(b.dist, vec![1, 0, 1]);
    let b = extract_ball(&t, 0, 10).unwrap();
    assert_eq!(b.nodes, vec![0, 1, 2, 3, 4]);
    assert!(extract_ball(&t, 9, 1).is_err());
}

#[test]
fn text_roundtrip() {
    let t = gen_random_tree(40, 4, 3).unwrap();
    let ids: Vec<u64> = (0..40).map(|v| 1000 - 7 * v as u64).collect();
    let t = t.with_ids(ids).unwrap();
    let lv = compute_levels(&t, 2);
    let text = to_text(&t) + &levels_to_text(&lv.level);
    let inst = parse_instance(&text).unwrap();
    assert_eq!(inst.tree.edges(), t.edges());
    assert_eq!(inst.tree.ids(), t.ids());
    assert_eq!(inst.level_tags.unwrap(), lv.level);
}

#[test]
fn text_defaults_and_errors() {
    let inst = parse_instance("tree 3\nedge 0 1\nedge 1 2\n").unwrap();
    assert_eq!(inst.tree.ids(), &[1, 2, 3]);
    assert!(inst.level_tags.is_none());
    assert!(matches!(parse_instance("edge 0 1\n"), Err(Error::Parse { .. })));
    assert!(matches!(parse_instance("tree 2\nedge 0 5\n"), Err(Error::Parse { .. })));
    assert!(matches!(parse_instance("tree 2\nfoo 0 1\n"), Err(Error::Parse { .. })));
    assert!(parse_instance("tree 3\nedge 0 1\n").is_err());
}

/// Levels of the subtree induced by `keep`, by brute force.
fn peel_subgraph(t: &Tree, keep: &[bool], k: u32) -> Vec<Option<u32>> {
    let n = t.n();
    let mut level = vec![None; n];
    let mut alive = keep.to_vec();
    for i in 1..=k {
        let peel: Vec<usize> = (0..n)
            .filter(|&v| alive[v])
            .filter(|&v| t.neighbors(v).iter().filter(|&&u| alive[u]).count() <= 2)
            .collect();
        for &v in &peel {
            level[v] = Some(i);
            alive[v] = false;
        }
    }
    level
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn levels_are_valid(n in 1usize..120, seed in any::<u64>(), k in 1u32..5) {
        let t = gen_random_tree(n, 4, seed).unwrap();
        let lv = compute_levels(&t, k);
        for v in 0..n {
            let l = lv.level[v];
            // degree once the levels below min(l, k) are gone
            let floor = l.min(k);
            let deg = t.neighbors(v).iter().filter(|&&u| lv.level[u] >= floor).count();
            if l <= k {
                prop_assert!(deg <= 2);
            } else {
                prop_assert!(deg >= 3);
            }
        }
        // components of each level are paths partitioning the level
        for j in 1..=k {
            let paths = level_paths(&t, &lv, j);
            let mut seen: Vec<usize> = paths.iter().flatten().copied().collect();
            seen.sort_unstable();
            let want: Vec<usize> = (0..n).filter(|&v| lv.level[v] == j).collect();
            prop_assert_eq!(seen, want);
            for p in &paths {
                for w in p.windows(2) {
                    prop_assert!(t.neighbors(w[0]).contains(&w[1]));
                }
            }
        }
    }

    #[test]
    fn peeling_is_idempotent(n in 1usize..120, seed in any::<u64>(), k in 2u32..5, i in 2u32..4) {
        prop_assume!(i <= k);
        let t = gen_random_tree(n, 4, seed).unwrap();
        let lv = compute_levels(&t, k);
        let keep: Vec<bool> = lv.level.iter().map(|&l| l >= i).collect();
        let sub = peel_subgraph(&t, &keep, k - i + 1);
        for v in 0..n {
            if keep[v] {
                let want = if lv.level[v] <= k { Some(lv.level[v] - i + 1) } else { None };
                prop_assert_eq!(sub[v], want);
            }
        }
    }

    #[test]
    fn levels_are_local(n in 1usize..100, seed in any::<u64>(), k in 1u32..4) {
        let t = gen_random_tree(n, 4, seed).unwrap();
        let lv = compute_levels(&t, k);
        for v in 0..n {
            let ball = extract_ball(&t, v, k as usize).unwrap();
            let mut keep = vec![false; n];
            for &x in &ball.nodes {
                keep[x] = true;
            }
            // nodes at the rim keep their true degree by counting outside neighbours
            let mut level = vec![None; n];
            let mut alive = keep.clone();
            let mut deg: Vec<usize> = (0..n).map(|x| t.degree(x)).collect();
            for i in 1..=k {
                let peel: Vec<usize> = (0..n).filter(|&x| alive[x] && deg[x] <= 2).collect();
                for &x in &peel {
                    level[x] = Some(i);
                    alive[x] = false;
                }
                for &x in &peel {
                    for &u in t.neighbors(x) {
                        deg[u] -= 1;
                    }
                }
            }
            prop_assert_eq!(level[v].unwrap_or(k + 1), lv.level[v]);
        }
    }
}
