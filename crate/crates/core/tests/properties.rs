//! Structural invariants as property tests.

use hamcolor::coloring::{run_col, run_col_orient, ColoringResult};
use hamcolor::cycle_merger::{double_rotation, merge_step, random_derangement, split_pools};
use hamcolor::one_factor::{cycle_count, OneFactor};
use hamcolor::process::{hitting_time, prefix_degrees, ArcSchedule, Mode, ProcessParams};
use hamcolor::rng::rng_from_seed;
use hamcolor::verify::{verify_color_degree, verify_factor};
use hamcolor::{Arc, Vertex};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use std::collections::HashSet;

fn pairs(p: &[Vertex]) -> HashSet<(Vertex, Vertex)> {
    p.windows(2).map(|w| (w[0], w[1])).collect()
}

proptest! {
    #[test]
    fn double_rotation_keeps_prefix_and_vertex_set(
        s in 3usize..60, seed in any::<u64>(), kk in any::<usize>(), ll in any::<usize>()
    ) {
        let mut rng = rng_from_seed(seed);
        let mut path: Vec<Vertex> = (0..s as Vertex).collect();
        path.shuffle(&mut rng);
        let k = 2 + kk % (s - 2);
        let l = k + 1 + ll % (s - k);
        let out = double_rotation(&path, k, l).unwrap();
        prop_assert_eq!(out.len(), s);
        prop_assert_eq!(&out[..k - 1], &path[..k - 1]);
        prop_assert_eq!(*out.last().unwrap(), path[l - 2]);
        let mut sorted = out.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..s as Vertex).collect::<Vec<_>>());
        let old = pairs(&path);
        let new = pairs(&out);
        let added: HashSet<_> = new.difference(&old).copied().collect();
        let expected: HashSet<_> = [(path[k - 2], path[l - 1]), (path[s - 1], path[k - 1])].into();
        prop_assert_eq!(added, expected);
    }

    #[test]
    fn double_rotation_rejects_bad_indices(s in 1usize..10, k in 0usize..12, l in 0usize..12) {
        let path: Vec<Vertex> = (0..s as Vertex).collect();
        let valid = 2 <= k && k < l && l <= s;
        prop_assert_eq!(double_rotation(&path, k, l).is_ok(), valid);
    }

    #[test]
    fn merge_step_joins_two_cycles(n in 4usize..80, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let phi = random_derangement(n, &mut rng).unwrap();
        prop_assume!(phi.cycles().len() >= 2);
        let ranks = phi.cycle_ranks();
        let a = rand::Rng::gen_range(&mut rng, 0..n as Vertex);
        let others: Vec<Vertex> = (0..n as Vertex).filter(|&v| ranks[v as usize] != ranks[a as usize]).collect();
        let b = *others.choose(&mut rng).unwrap();
        let out = merge_step(&phi, a, b).unwrap();
        prop_assert!(verify_factor(out.successors(), n, |_, _| true).pass);
        prop_assert_eq!(cycle_count(&out), cycle_count(&phi) - 1);
        let before: HashSet<Arc> = phi.arcs().collect();
        let after: HashSet<Arc> = out.arcs().collect();
        let x = phi.pred(b);
        let removed: HashSet<Arc> = before.difference(&after).copied().collect();
        let added: HashSet<Arc> = after.difference(&before).copied().collect();
        prop_assert_eq!(removed, [Arc::new(a, phi.succ(a)), Arc::new(x, b)].into());
        prop_assert_eq!(added, [Arc::new(a, b), Arc::new(x, phi.succ(a))].into());
        // merging within one cycle is refused
        prop_assert!(merge_step(&phi, a, phi.succ(a)).is_err());
    }

    #[test]
    fn factor_text_round_trips(n in 2usize..60, seed in any::<u64>()) {
        let phi = random_derangement(n, &mut rng_from_seed(seed)).unwrap();
        let mut buf = Vec::new();
        phi.write_text(&mut buf).unwrap();
        prop_assert_eq!(OneFactor::read_text(&buf[..]).unwrap(), phi);
    }

    #[test]
    fn split_pools_partition_the_arcs(n in 2usize..40, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let arcs: Vec<Arc> = (0..n as Vertex)
            .flat_map(|a| (0..n as Vertex).filter(move |&b| b != a).map(move |b| Arc::new(a, b)))
            .collect();
        let (e2, e3) = split_pools(n, &arcs, &mut rng);
        prop_assert_eq!(e2.arc_count() + e3.arc_count(), arcs.len());
        prop_assert!(e2.arcs().all(|a| !e3.contains(a)));
        let m = arcs.len() as f64;
        if m >= 100.0 {
            let dev = (e2.arc_count() as f64 - m / 2.0).abs();
            prop_assert!(dev <= 4.0 * (m / 4.0).sqrt(), "{} of {}", e2.arc_count(), m);
        }
    }

    #[test]
    fn schedule_prefix_is_distinct_and_deterministic(n in 2usize..30, seed in any::<u64>(), undirected in any::<bool>()) {
        let mode = if undirected { Mode::Undirected } else { Mode::Directed };
        let full = ArcSchedule::generate(n, mode, seed).unwrap();
        prop_assert!(full.is_complete());
        let keys: HashSet<(Vertex, Vertex)> = full.arcs.iter().map(|a| (a.tail, a.head)).collect();
        prop_assert_eq!(keys.len(), full.arcs.len());
        if undirected {
            prop_assert!(full.arcs.iter().all(|a| a.tail < a.head));
        }
        let len = full.arcs.len() / 2;
        let prefix = ArcSchedule::generate_prefix(n, mode, seed, len).unwrap();
        prop_assert_eq!(&prefix.arcs[..], &full.arcs[..len]);
    }

    #[test]
    fn hitting_time_is_first_time_degrees_reach_q(n in 3usize..40, q in 1usize..3, seed in any::<u64>(), undirected in any::<bool>()) {
        let mode = if undirected { Mode::Undirected } else { Mode::Directed };
        prop_assume!(mode == Mode::Directed || 2 * q < n);
        prop_assume!(q < n);
        let (sched, tau) = ArcSchedule::through_hitting_time(n, mode, seed, q).unwrap();
        prop_assert_eq!(tau, sched.len());
        prop_assert_eq!(hitting_time(&sched, q).unwrap(), tau);
        let need = if undirected { 2 * q as u32 } else { q as u32 };
        let ok = |t: usize| {
            let d = prefix_degrees(&sched, t).unwrap();
            d.out.iter().chain(&d.inn).all(|&x| x >= need)
        };
        prop_assert!(ok(tau));
        prop_assert!(!ok(tau - 1));
    }

    #[test]
    fn coloring_is_consistent_and_round_trips(n in 6usize..60, q in 1usize..3, seed in any::<u64>(), undirected in any::<bool>()) {
        let mode = if undirected { Mode::Undirected } else { Mode::Directed };
        prop_assume!(2 * q < n);
        let (sched, tau) = ArcSchedule::through_hitting_time(n, mode, seed, q).unwrap();
        let params = ProcessParams::with_q(q);
        let mut rng = rng_from_seed(seed ^ 1);
        let res = if undirected { run_col_orient(&sched, &params, &mut rng) } else { run_col(&sched, &params, &mut rng) }.unwrap();
        prop_assert_eq!(res.tau, tau);
        prop_assert_eq!(res.arcs.len(), tau);
        prop_assert!(res.colors.iter().all(|&c| (c as usize) < q));
        for (i, a) in res.arcs.iter().enumerate() {
            let s = sched.arcs[i];
            if undirected {
                prop_assert!((a.tail, a.head) == (s.tail, s.head) || (a.tail, a.head) == (s.head, s.tail));
            } else {
                prop_assert_eq!(*a, s);
            }
        }
        prop_assert_eq!(res.color_degree_ok, verify_color_degree(n, q, &res.arcs, &res.colors).pass);
        prop_assert!(res.e_prime.iter().all(|&i| i >= res.marks[2].min(tau) && i < tau));
        let mut buf = Vec::new();
        res.write_text(&mut buf).unwrap();
        let back = ColoringResult::read_text(&buf[..]).unwrap();
        prop_assert_eq!(&back.arcs, &res.arcs);
        prop_assert_eq!(&back.colors, &res.colors);
        prop_assert_eq!(&back.bad, &res.bad);
        prop_assert_eq!(&back.small, &res.small);
        prop_assert_eq!(back.orientation.is_some(), undirected);
    }
}
