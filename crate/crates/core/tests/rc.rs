mod common;

use common::{decomposition_ok, lcl_ok, mutate_layer, mutate_lcl_label};
use locallab::alpha::schedule;
use locallab::generators::{gen_lb_graph, gen_path, gen_random_tree};
use locallab::rc::{
    compress, decompose_knuth_io, decompose_known_n, decompose_log, decompose_poly_n,
    knuth_sequence, knuth_x, labeling_to_text, lcl_to_text, linial_distance_coloring,
    linial_path_power, parse_labeling, rake, ruling_set_on_path, to_lcl, verify_decomposition,
    verify_rc_lcl, DecompLabeling, Layer, LclLabel, RcLclOutput, Residual,
};
use locallab::sim::{Knowledge, KnowledgeModel, Meter};
use locallab::tree::{build_tree, Tree};
use locallab::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn path(n: usize) -> Tree {
    gen_path(n).unwrap().tree
}

fn upper(big_n: u64, c: f64) -> KnowledgeModel {
    KnowledgeModel::deterministic(Knowledge::UpperBound { big_n, c })
}

fn proper_power(colors: &[u64], ell: usize) -> bool {
    (0..colors.len()).all(|p| (p + 1..colors.len().min(p + ell + 1)).all(|o| colors[o] != colors[p]))
}

#[test]
fn rake_examples() {
    let t = path(2);
    let mut res = Residual::new(&t);
    assert_eq!(rake(&mut res, 1, 1, None), vec![0]);
    assert_eq!(res.alive_count(), 1);

    let t = path(5);
    let mut res = Residual::new(&t);
    assert_eq!(rake(&mut res, 1, 1, None).len(), 2);
    assert_eq!(res.alive_count(), 3);
    assert_eq!(res.layer(0), Some(Layer::Rake { i: 1, j: 1 }));

    let t = build_tree(4, &[(0, 1), (0, 2), (0, 3)], None, None).unwrap();
    let mut res = Residual::new(&t);
    let mut gone = rake(&mut res, 1, 1, None);
    gone.sort();
    assert_eq!(gone, vec![1, 2, 3]);
    assert!(res.is_alive(0));
    assert_eq!(res.degree(0), 0);
    // the center lands one sublayer above its raked leaves
    rake(&mut res, 1, 1, None);
    assert_eq!(res.layer(0), Some(Layer::Rake { i: 1, j: 2 }));
}

#[test]
fn linial_examples() {
    let (c, _, pal) = linial_path_power(&[9], 4, 10);
    assert!((c[0] as u128) < pal);

    let ids: Vec<u64> = (1..=50).collect();
    let (c, _, pal) = linial_path_power(&ids, 2, 51);
    assert!(proper_power(&c, 2));
    assert!(c.iter().all(|&x| (x as u128) < pal));
    assert!(pal <= 1000);

    // a palette of 2^64 shrinks to a constant in a handful of steps
    let ids: Vec<u64> = (0..200).map(|x| u64::MAX - 7919 * x).collect();
    let (c, it, pal) = linial_path_power(&ids, 4, 1u128 << 64);
    assert!(proper_power(&c, 4));
    assert!(it <= 5 + 3, "{it} iterations");
    assert!(pal <= 1000, "palette {pal}");
    let (_, it2, pal2) = linial_path_power(&ids[..10], 4, 1u128 << 64);
    assert_eq!((it, pal), (it2, pal2));
}

/// Every `(ell, 2 ell)`-ruling set of a short path, by enumeration.
fn brute_ruling_sets(len: usize, ell: usize) -> Vec<Vec<usize>> {
    (0u32..1 << len)
        .map(|m| (0..len).filter(|&p| m >> p & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.windows(2).all(|w| w[1] - w[0] >= ell))
        .filter(|s| (0..len).all(|p| s.iter().any(|&q| p.abs_diff(q) <= 2 * ell)))
        .collect()
}

#[test]
fn ruling_sets_match_enumeration() {
    for len in 1..=12 {
        for ell in 1..=4 {
            let ids: Vec<u64> = (0..len as u64).map(|x| (x * 7 + 3) % 97 + 1).collect();
            let (colors, _, _) = linial_path_power(&ids, ell, 98);
            let got = ruling_set_on_path(len, ell, &colors);
            let all = brute_ruling_sets(len, ell);
            assert!(all.contains(&got), "len {len} ell {ell}: {got:?}");
        }
    }
    let ids: Vec<u64> = (1..=20).collect();
    let (colors, _, _) = linial_path_power(&ids, 3, 21);
    let s = ruling_set_on_path(20, 3, &colors);
    assert!(brute_ruling_sets(20, 3).contains(&s));
}

#[test]
fn compress_after_rakes() {
    let t = path(100);
    let mut res = Residual::new(&t);
    let mut meter = Meter::new(100);
    for j in 1..=10 {
        rake(&mut res, 1, j, Some(&mut meter));
    }
    assert_eq!(res.alive_count(), 80);
    let col = linial_distance_coloring(&res, 4);
    assert_eq!(col.paths.len(), 1);
    assert_eq!(col.paths[0].len(), 78);
    let assigned = compress(&mut res, 1, &col, Some(&mut meter));
    assert_eq!(assigned, 78);
    assert!(res.alive_count() <= 2);
    assert_eq!(meter.round(), 10 + col.iterations + 1);
    // both extremes rake, inner runs of compress nodes between ruling nodes
    assert_eq!(res.layer(11), Some(Layer::Rake { i: 2, j: 1 }));
    assert_eq!(res.layer(88), Some(Layer::Rake { i: 2, j: 1 }));
    let mut run = 0;
    let mut runs = Vec::new();
    for v in 12..=88 {
        match res.layer(v) {
            Some(Layer::Compress { i: 1 }) => run += 1,
            Some(Layer::Rake { i: 2, j: 1 }) => {
                runs.push(run);
                run = 0;
            }
            other => panic!("node {v}: {other:?}"),
        }
    }
    assert!(runs.iter().all(|&r| (4..=8).contains(&r)), "{runs:?}");

    // nothing long enough: no-op
    let t = path(5);
    let mut res = Residual::new(&t);
    rake(&mut res, 1, 1, None);
    let col = linial_distance_coloring(&res, 4);
    assert!(col.paths.is_empty());
    assert_eq!(compress(&mut res, 1, &col, None), 0);
    assert_eq!(res.alive_count(), 3);
}

fn assert_valid(t: &Tree, lab: &DecompLabeling) {
    assert!(verify_decomposition(t, lab).is_empty(), "{:?}", verify_decomposition(t, lab));
    assert!(decomposition_ok(t, lab));
    let lcl = to_lcl(t, lab);
    assert!(verify_rc_lcl(t, &lcl).is_empty(), "{:?}", verify_rc_lcl(t, &lcl));
    assert!(lcl_ok(t, &lcl));
}

#[test]
fn known_n_decompositions() {
    for n in [1, 2, 3, 10, 100, 1000, 5000] {
        let t = path(n);
        let d = decompose_known_n(&t, 2, 4).unwrap();
        assert_valid(&t, &d.labeling);
        assert!(d.trace.rounds_max as f64 <= 8.0 * (n as f64).sqrt() + 20.0);
    }
    let d = decompose_known_n(&path(1), 2, 4).unwrap();
    assert_eq!(d.trace.rounds_max, 1);
    for k in 2..=3 {
        let n = 4000f64;
        let l = n.powf(1.0 / k as f64).ceil() as usize;
        let g = gen_lb_graph(k, &vec![l; k]).unwrap();
        let d = decompose_known_n(&g.tree, k, 4).unwrap();
        assert_valid(&g.tree, &d.labeling);
    }
    for seed in 0..10 {
        let t = gen_random_tree(3000, 4, seed).unwrap();
        assert_valid(&t, &decompose_known_n(&t, 3, 4).unwrap().labeling);
    }
    assert!(matches!(decompose_known_n(&path(5), 2, 1), Err(Error::Domain(_))));
}

#[test]
fn log_decompositions() {
    let d = decompose_log(&path(1), 2, 4).unwrap();
    assert_eq!(d.labeling.big_l, 1);
    let mut ratio: f64 = 0.0;
    for m in 4..=14 {
        let t = path(1 << m);
        let d = decompose_log(&t, 2, 4).unwrap();
        assert_valid(&t, &d.labeling);
        ratio = ratio.max(d.labeling.big_l as f64 / m as f64);
    }
    assert!(ratio <= 2.0, "L/m = {ratio}");
    let t = gen_random_tree(100_000, 3, 5).unwrap();
    let d = decompose_log(&t, 2, 4).unwrap();
    assert_valid(&t, &d.labeling);
    assert!((d.labeling.big_l as f64) <= 4.0 * (1e5f64).log2());
}

#[test]
fn poly_n_decompositions() {
    let s = schedule(3, 3.0).unwrap();
    for n in [50usize, 500, 3000] {
        let t = gen_random_tree(n, 4, n as u64).unwrap();
        for big_n in [n as u64, (n as u64).pow(2), (n as f64).powf(3.0) as u64] {
            let d = decompose_poly_n(&t, &upper(big_n, 3.0), &s, 4).unwrap();
            assert_valid(&t, &d.labeling);
        }
    }
    // best case stays within a constant factor of the known-n algorithm
    let t = path(10_000);
    let best = decompose_poly_n(&t, &upper(10_000, 3.0), &s, 4).unwrap();
    let known = decompose_known_n(&t, 3, 4).unwrap();
    let r = best.trace.rounds_max as f64 / known.trace.rounds_max as f64;
    assert!((0.2..=5.0).contains(&r), "ratio {r}");

    assert!(matches!(
        decompose_poly_n(&path(10), &upper(9, 3.0), &s, 4),
        Err(Error::KnowledgeViolation(_))
    ));
    assert!(matches!(
        decompose_poly_n(&path(10), &KnowledgeModel::deterministic(Knowledge::ExactN(10)), &s, 4),
        Err(Error::KnowledgeViolation(_))
    ));
}

#[test]
fn poly_n_early_exit() {
    let s = schedule(3, 3.0).unwrap();
    // three rakes empty a path of five
    let t = path(5);
    let d = decompose_poly_n(&t, &upper(125, 3.0), &s, 4).unwrap();
    assert_eq!(d.alive_after_phase[0], 0);
    assert_eq!(d.trace.rounds_max, 3);
    assert_eq!(d.compress_cost, 0);
}

#[test]
fn poly_n_round_accounting() {
    let s = schedule(3, 3.0).unwrap();
    for (n, seed) in [(2000usize, 1u64), (20_000, 2)] {
        let t = gen_random_tree(n, 4, seed).unwrap();
        for big_n in [n as u64, (n as u64).pow(2)] {
            let d = decompose_poly_n(&t, &upper(big_n, 3.0), &s, 4).unwrap();
            let mut bound = d.compress_cost;
            for (before, budget) in d.alive_before_phase.iter().zip(&d.budgets) {
                bound += budget.map_or(*before, |b| b.min(*before));
            }
            assert!(d.trace.rounds_max <= bound, "{} > {bound}", d.trace.rounds_max);
            // phase residual law
            for i in 1..s.k {
                let cap = 4.0 * n as f64 / (big_n as f64).powf(s.prefix_at(i));
                assert!(d.alive_after_phase[i - 1] as f64 <= cap.max(1.0) + 2.0);
            }
        }
    }
}

#[test]
fn knuth_sequence_and_x() {
    assert_eq!(knuth_sequence(2.0, u64::MAX / 2), vec![2, 16, 65536]);
    for big_n in 16..=256 {
        assert_eq!(knuth_x(big_n, 2.0), 16);
    }
    assert_eq!(knuth_x(1000, 2.0), 1000);
    for n in [16usize, 300, 4096] {
        let t = path(n);
        for big_n in [n as u64, (n * n) as u64] {
            let d = decompose_knuth_io(&t, 2, &upper(big_n, 2.0), 4).unwrap();
            assert_valid(&t, &d.labeling);
        }
    }
    let t = path(16);
    let d = decompose_knuth_io(&t, 2, &upper(256, 2.0), 4).unwrap();
    assert_eq!(d.budgets[0], Some(4));
}

#[test]
fn verifier_examples() {
    let t = path(1);
    let lab = DecompLabeling::from_layers(vec![Layer::Rake { i: 1, j: 1 }], 4);
    assert!(verify_decomposition(&t, &lab).is_empty());

    let t = path(2);
    let o = RcLclOutput {
        k: 3,
        label: vec![LclLabel::C(1), LclLabel::C(2)],
        orient: vec![],
    };
    let v = verify_rc_lcl(&t, &o);
    assert!(v.iter().any(|x| x.rule.starts_with("rule 5")));

    let t = path(3);
    let o = RcLclOutput {
        k: 1,
        label: vec![LclLabel::R(1); 3],
        orient: vec![(1, 0), (1, 2)],
    };
    let v = verify_rc_lcl(&t, &o);
    assert!(v.iter().any(|x| x.node == 1 && x.rule.starts_with("rule 2")));

    // relabel one compress node as a rake node
    let t = path(200);
    let d = decompose_known_n(&t, 2, 4).unwrap();
    let c = d.labeling.layer.iter().position(|l| !l.is_rake()).unwrap();
    let mut lab = d.labeling.clone();
    lab.layer[c] = Layer::Rake { i: 1, j: 1 };
    assert!(!verify_decomposition(&t, &lab).is_empty());
}

#[test]
fn labeling_text_roundtrip() {
    let t = gen_random_tree(300, 4, 9).unwrap();
    let d = decompose_known_n(&t, 2, 4).unwrap();
    let text = labeling_to_text(&d.labeling);
    let p = parse_labeling(&text, 300).unwrap();
    assert_eq!(p.decomposition(4), d.labeling);
    let lcl = to_lcl(&t, &d.labeling);
    let p = parse_labeling(&lcl_to_text(&lcl), 300).unwrap();
    assert_eq!(p.lcl(&t, Some(lcl.k)), lcl);
    assert!(matches!(parse_labeling("label 0 X 1\n", 1), Err(Error::Parse { .. })));
    assert!(matches!(parse_labeling("label 3 R 1\n", 1), Err(Error::Parse { .. })));
    assert!(parse_labeling("label 0 R 1\n", 2).is_err());
}

#[test]
fn single_label_mutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut rejected = 0;
    for seed in 0..40u64 {
        let t = gen_random_tree(200, 4, seed).unwrap();
        let k = 2 + (seed % 2) as u32;
        let d = decompose_known_n(&t, k as usize, 4).unwrap();
        let mut base = d.labeling.clone();
        base.big_l = k;
        let mut lcl = to_lcl(&t, &base);
        lcl.k = k;
        assert!(verify_decomposition(&t, &base).is_empty());
        assert!(verify_rc_lcl(&t, &lcl).is_empty());
        for _ in 0..10 {
            let v = rand::Rng::gen_range(&mut rng, 0..t.n());
            let mut lab = base.clone();
            lab.layer[v] = mutate_layer(k, lab.gamma, lab.layer[v], &mut rng);
            let report = verify_decomposition(&t, &lab);
            assert_eq!(report.is_empty(), decomposition_ok(&t, &lab));
            assert!(report.iter().all(|x| x.node < t.n()));
            rejected += usize::from(!report.is_empty());

            let mut o = lcl.clone();
            o.label[v] = mutate_lcl_label(k, o.label[v], &mut rng);
            let report = verify_rc_lcl(&t, &o);
            assert_eq!(report.is_empty(), lcl_ok(&t, &o));
            assert!(report.iter().all(|x| x.node < t.n()));
            rejected += usize::from(!report.is_empty());
        }
    }
    assert!(rejected >= 700, "{rejected}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shrinkage(n in 500usize..5000, seed in any::<u64>(), x in prop::sample::select(vec![5usize, 10, 20])) {
        let t = gen_random_tree(n, 4, seed).unwrap();
        let mut res = Residual::new(&t);
        for j in 1..=x {
            rake(&mut res, 1, j as u32, None);
        }
        let col = linial_distance_coloring(&res, 4);
        compress(&mut res, 1, &col, None);
        prop_assert!(res.alive_count() as f64 <= 4.0 / (2.0 * x as f64) * n as f64);
    }

    #[test]
    fn every_algorithm_verifies(n in 1usize..400, seed in any::<u64>(), k in 2usize..4) {
        let t = gen_random_tree(n, 4, seed).unwrap();
        let s = schedule(k, 2.0).unwrap();
        let big_n = (n as u64).pow(2).max(1);
        for d in [
            decompose_known_n(&t, k, 4).unwrap(),
            decompose_log(&t, 3, 4).unwrap(),
            decompose_poly_n(&t, &upper(big_n, 2.0), &s, 4).unwrap(),
            decompose_knuth_io(&t, k, &upper(big_n, 2.0), 4).unwrap(),
        ] {
            prop_assert!(verify_decomposition(&t, &d.labeling).is_empty());
            prop_assert!(decomposition_ok(&t, &d.labeling));
            let lcl = to_lcl(&t, &d.labeling);
            prop_assert!(verify_rc_lcl(&t, &lcl).is_empty());
        }
    }
}
