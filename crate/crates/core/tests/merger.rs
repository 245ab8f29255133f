//! The exchange phase and the full engine on random factors and pools.

use hamcolor::cycle_merger::{merge_cycles, patchwork_hamilton, random_derangement, random_pools, PatchworkInput};
use hamcolor::one_factor::OneFactor;
use hamcolor::rng::{rng_for, stream, trial_seed};
use hamcolor::verify::{is_hamilton_cycle, verify_factor};
use hamcolor::{Arc, Digraph, Vertex};

fn instance(n: usize, i: usize) -> (OneFactor, Digraph, Digraph) {
    let seed = trial_seed(2, n, 0, i);
    let f = random_derangement(n, &mut rng_for(seed, stream::SCHEDULE)).unwrap();
    let density = (n as f64).ln() / (2.0 * n as f64);
    let (e2, e3) = random_pools(n, density, &mut rng_for(seed, stream::POOLS)).unwrap();
    (f, e2, e3)
}

#[test]
fn exchanges_leave_one_long_cycle() {
    let n = 1000;
    let ln = (n as f64).ln();
    let threshold = n as f64 - n as f64 / ln.sqrt();
    let mut long = 0;
    for i in 0..50 {
        let (f, e2, _) = instance(n, i);
        let (phi, stats) = merge_cycles(&f, &e2);
        assert!(verify_factor(phi.successors(), n, |a, b| f.succ(a) == b || e2.has_arc(a, b)).pass);
        assert_eq!(phi.cycles().len() + stats.merges, f.cycles().len());
        long += usize::from(phi.cycles()[0].len() as f64 >= threshold);
    }
    assert!(long >= 45, "only {long}/50 reached the length threshold");
}

#[test]
fn engine_avoids_forbidden_arcs() {
    let n = 400;
    let mut ok = 0;
    for i in 0..20 {
        let (f, e2, e3) = instance(n, i);
        // forbid every twentieth pool arc
        let forbidden = Digraph::from_arcs(n, e2.arcs().chain(e3.arcs()).step_by(20).collect::<Vec<Arc>>());
        let input = PatchworkInput::new(f.clone(), forbidden.clone(), e2.clone(), e3.clone()).unwrap();
        if let Ok((cycle, _)) = patchwork_hamilton(&input) {
            let allowed = |a: Vertex, b: Vertex| {
                f.succ(a) == b || ((e2.has_arc(a, b) || e3.has_arc(a, b)) && !forbidden.has_arc(a, b))
            };
            assert!(is_hamilton_cycle(&cycle, n, allowed).pass);
            ok += 1;
        }
    }
    assert!(ok >= 12, "only {ok}/20 succeeded");
}
