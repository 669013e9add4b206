use std::collections::BTreeSet;

use proptest::prelude::*;
use trapscan_core::abstraction::{abstract_hierarchy, AbstractHierarchy, AbstractNode, ScreenIndex};
use trapscan_core::partition::{compute_ep, detect_partition, DetectorParams, SplitStats};
use trapscan_core::similarity::{lcs_len, sim_check, token_sequence, SimChecker};
use trapscan_core::tarpit::{best_window, TarpitMode, WindowScore};
use trapscan_core::trace::{Action, Bounds, Trace, TraceEntry, UiHierarchy, UiNode};

fn lcs_dp<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

fn tree_strategy() -> impl Strategy<Value = AbstractNode> {
    let leaf = (0..4u8, prop::option::of(0..3u8))
        .prop_map(|(t, id)| AbstractNode::new(format!("T{t}"), id.map(|i| format!("id{i}")).as_deref(), vec![]));
    leaf.prop_recursive(4, 40, 5, |inner| {
        ((0..4u8), prop::collection::vec(inner, 0..5))
            .prop_map(|(t, children)| AbstractNode::new(format!("T{t}"), None, children))
    })
}

fn hierarchy_strategy() -> impl Strategy<Value = AbstractHierarchy> {
    tree_strategy().prop_map(|root| AbstractHierarchy::new("Main", root))
}

fn screen(k: usize) -> UiHierarchy {
    let children = (0..2 + k % 3)
        .map(|j| UiNode::new("Button", Some(&format!("b{k}_{j}")), Bounds::new(0, 10 * j as i32, 100, 10 * j as i32 + 9)))
        .collect();
    UiHierarchy::new(format!("A{}", k % 4), UiNode::new("Frame", None, Bounds::new(0, 0, 100, 100)).with_children(children))
}

fn trace_from(ids: &[usize], gaps: &[u64], offset: u64) -> Trace {
    let mut t = offset;
    let entries = ids
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            if i > 0 {
                t += gaps[i % gaps.len()];
            }
            TraceEntry {
                timestamp_ms: t,
                hierarchy: screen(k),
                action: if i + 1 == ids.len() { Action::none() } else { Action::back() },
            }
        })
        .collect();
    Trace::new("tool", "app", "t", entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bit_parallel_lcs_matches_dp(
        a in prop::collection::vec(0u32..6, 0..160),
        b in prop::collection::vec(0u32..6, 0..160),
    ) {
        prop_assert_eq!(lcs_len(&a, &b), lcs_dp(&a, &b));
    }

    #[test]
    fn sim_check_matches_token_dp(h1 in hierarchy_strategy(), h2 in hierarchy_strategy(), d in 0u32..5) {
        let (t1, t2) = (token_sequence(&h1), token_sequence(&h2));
        let lcs = lcs_dp(&t1, &t2);
        let expected = lcs >= t1.len().min(t2.len()) && t1.len().max(t2.len()) - lcs <= d as usize;
        prop_assert_eq!(sim_check(&h1, &h2, d), expected);
        prop_assert_eq!(sim_check(&h1, &h2, d), sim_check(&h2, &h1, d));
        prop_assert!(sim_check(&h1, &h1, d));
    }

    #[test]
    fn merge_roots_are_pairwise_dissimilar(hs in prop::collection::vec(hierarchy_strategy(), 1..12)) {
        let mut distinct: Vec<AbstractHierarchy> = Vec::new();
        for h in hs {
            if !distinct.contains(&h) {
                distinct.push(h);
            }
        }
        let mut checker = SimChecker::new(&distinct, 3);
        let roots = checker.merge_all();
        let root_set: BTreeSet<usize> = roots.iter().copied().collect();
        for (i, &r) in roots.iter().enumerate() {
            prop_assert!(root_set.contains(&r));
            prop_assert_eq!(roots[r], r);
            prop_assert!(sim_check(&distinct[i], &distinct[r], 3));
        }
        let rs: Vec<usize> = root_set.into_iter().collect();
        for (x, &a) in rs.iter().enumerate() {
            for &b in &rs[x + 1..] {
                prop_assert!(!sim_check(&distinct[a], &distinct[b], 3));
            }
        }
    }

    #[test]
    fn split_stats_match_naive_sets(ids in prop::collection::vec(0usize..8, 1..80)) {
        let trace = trace_from(&ids, &[1000], 0);
        let index = ScreenIndex::build(&trace);
        let stats = SplitStats::new(index.ids());
        for n in 0..=ids.len() {
            let pre: BTreeSet<usize> = ids[..n].iter().copied().collect();
            let suf: BTreeSet<usize> = ids[n..].iter().copied().collect();
            prop_assert_eq!(stats.prefix_distinct[n] as usize, pre.len());
            prop_assert_eq!(stats.suffix_distinct[n] as usize, suf.len());
            prop_assert_eq!(stats.shared[n] as usize, pre.intersection(&suf).count());
        }
        if ids.len() >= 3 {
            let ep = ids.len() - 1;
            for n in 1..ep {
                let f = stats.objective(n, ep).unwrap();
                prop_assert!((0.0..2.0).contains(&f), "F({}) = {}", n, f);
            }
        }
    }

    #[test]
    fn ep_matches_linear_scan(gaps in prop::collection::vec(1u64..5000, 1..60), t_min in 1u64..60_000) {
        let ids: Vec<usize> = (0..=gaps.len()).map(|i| i % 3).collect();
        let mut ts = vec![0u64];
        for g in &gaps {
            ts.push(ts.last().unwrap() + g);
        }
        let entries = ids
            .iter()
            .zip(&ts)
            .enumerate()
            .map(|(i, (&k, &t))| TraceEntry {
                timestamp_ms: t,
                hierarchy: screen(k),
                action: if i == gaps.len() { Action::none() } else { Action::back() },
            })
            .collect();
        let trace = Trace::new("tool", "app", "t", entries).unwrap();
        let t_n = *ts.last().unwrap();
        let mut best = 0;
        for i in 0..ts.len() {
            if (t_n - ts[i]).abs_diff(t_min) < (t_n - ts[best]).abs_diff(t_min) {
                best = i;
            }
        }
        prop_assert_eq!(compute_ep(&trace, t_min).unwrap(), best + 1);
    }

    #[test]
    fn best_window_matches_brute_force(
        groups in prop::collection::vec(0u32..6, 1..70),
        gaps in prop::collection::vec(1u64..3, 1..5),
        t_min in 1u64..40,
        unconstrained in any::<bool>(),
    ) {
        let mut ts = vec![0u64];
        for i in 1..groups.len() {
            ts.push(ts[i - 1] + gaps[i % gaps.len()]);
        }
        let mode = if unconstrained { TarpitMode::Unconstrained } else { TarpitMode::Constrained };
        let hi = groups.len() - 1;
        let mut brute: Option<(usize, usize, WindowScore)> = None;
        for l in 0..=hi {
            for r in l..=hi {
                if mode == TarpitMode::Constrained && ts[r] - ts[l] < t_min {
                    continue;
                }
                let g = groups[l..=r].iter().collect::<BTreeSet<_>>().len() as u64;
                let cand = WindowScore { groups: g, len: (r - l + 1) as u64, start: l };
                if brute.as_ref().is_none_or(|(_, _, b)| cand.beats(b)) {
                    brute = Some((l, r, cand));
                }
            }
        }
        prop_assert_eq!(best_window(&groups, &ts, 0, hi, t_min, mode), brute);
    }

    #[test]
    fn partition_invariant_under_translation_and_relabeling(
        ids in prop::collection::vec(0usize..10, 3..120),
        offset in 0u64..1_000_000_000,
        shift in 1usize..10,
    ) {
        let params = DetectorParams { t_min_ms: 20_000, ..DetectorParams::default() };
        let base = detect_partition(&trace_from(&ids, &[1000, 2000], 0), &params);
        let moved = detect_partition(&trace_from(&ids, &[1000, 2000], offset), &params);
        let relabeled_ids: Vec<usize> = ids.iter().map(|k| (k + shift) % 10 + 10).collect();
        let relabeled = detect_partition(&trace_from(&relabeled_ids, &[1000, 2000], 0), &params);
        let key = |r: &trapscan_core::Result<trapscan_core::PartitionResult>| {
            r.as_ref().map(|p| (p.boundary_index, p.accepted, p.ep, p.objective_value.to_bits())).map_err(|e| e.clone())
        };
        prop_assert_eq!(key(&base), key(&moved));
        prop_assert_eq!(key(&base), key(&relabeled));
        if let Ok(p) = &base {
            prop_assert_eq!(p.region.start, p.boundary_index + 1);
            prop_assert_eq!(p.region.end, ids.len());
        }
    }

    #[test]
    fn fingerprint_ignores_text_and_hidden_nodes(k in 0usize..20, text in "[a-z]{0,12}") {
        let base = screen(k);
        let mut changed = base.clone();
        changed.root.children[0].text = Some(text);
        changed.root.children.push(UiNode::new("Spinner", Some("busy"), Bounds::new(0, 0, 5, 5)).hidden());
        changed.root.children.push(UiNode::new("Drawer", Some("nav"), Bounds::new(-50, 0, -10, 100)));
        prop_assert_eq!(abstract_hierarchy(&base), abstract_hierarchy(&changed));
    }
}
