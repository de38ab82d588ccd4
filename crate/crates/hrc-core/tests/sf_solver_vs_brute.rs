//! Randomized cross-validation of the half-integral fixtures solver against
//! exhaustive search over integral matchings.
//!
//! Every solver output must pass the stability audit and have integral or
//! half-integral degrees only; the integrality verdict must agree with a
//! brute-force enumeration that shares no code with the solver.

use hrc_core::oracle::sf_brute;
use hrc_core::sf::{
    decide_integral, fractional_components, fractional_degree_violations, sf_stability_check,
    solve_half_integral, HalfMatching, SfInstance,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn random_instance(rng: &mut ChaCha8Rng) -> SfInstance {
    let n = rng.random_range(2..=8);
    let mut inst = SfInstance::default();
    for i in 0..n {
        // Mostly capacity 1 or 2; the occasional 0 exercises the
        // permanent-rejector path.
        let cap = match rng.random_range(0..10u32) {
            0 => 0,
            1..=6 => 1,
            _ => 2,
        };
        inst.add_node(format!("n{i}"), cap);
    }
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    pairs.shuffle(rng);
    let density = rng.random_range(30..90u32);
    let mut added = 0usize;
    for (u, v) in pairs {
        if added >= 14 {
            break;
        }
        if rng.random_range(0..100u32) < density {
            inst.add_edge(u, v);
            added += 1;
        }
    }
    for v in 0..inst.nodes.len() {
        let mut incident: Vec<usize> = (0..inst.edges.len())
            .filter(|&e| inst.edges[e].ends.0 == v || inst.edges[e].ends.1 == v)
            .collect();
        incident.shuffle(rng);
        inst.nodes[v].pref = incident;
    }
    inst
}

fn chosen_set(m: &HalfMatching) -> Vec<usize> {
    m.half
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w == 2)
        .map(|(e, _)| e)
        .collect()
}

// ===== 1. solver output is always a stable half-matching =====
#[test]
fn solver_output_is_always_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f_0001);
    for _ in 0..500 {
        let inst = random_instance(&mut rng);
        let m = solve_half_integral(&inst);
        assert!(
            sf_stability_check(&inst, &m).is_empty(),
            "unstable output on {:?}",
            inst
        );
        assert!(
            fractional_degree_violations(&inst, &m).is_empty(),
            "bad fractional degree on {:?}",
            inst
        );
    }
}

// ===== 2. integrality verdict agrees with exhaustive search =====
#[test]
fn integral_verdict_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f_0002);
    let mut integral = 0usize;
    let mut fractional = 0usize;
    for _ in 0..500 {
        let inst = random_instance(&mut rng);
        let brute_has = sf_brute::integral_stable_exists(&inst);
        match decide_integral(&inst) {
            Some(m) => {
                integral += 1;
                assert!(brute_has, "solver found integral, brute says none: {:?}", inst);
                assert!(m.is_integral());
                // The witness itself must be one of the exhaustively
                // enumerated stable matchings.
                let all = sf_brute::enumerate_integral_stable(&inst, None);
                assert!(
                    all.contains(&chosen_set(&m)),
                    "witness not in brute enumeration: {:?}",
                    inst
                );
            }
            None => {
                fractional += 1;
                assert!(
                    !brute_has,
                    "solver says none, brute found integral stable: {:?}",
                    inst
                );
            }
        }
    }
    // The corpus must exercise both verdicts or the test proves little.
    assert!(integral >= 50, "only {integral} integral cases");
    assert!(fractional >= 15, "only {fractional} fractional cases");
}

// ===== 3. fractional parts are odd cycles of half-weight edges =====
#[test]
fn fractional_support_is_half_weight_odd_cycles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f_0003);
    let mut seen_fractional = false;
    for _ in 0..300 {
        let inst = random_instance(&mut rng);
        let m = solve_half_integral(&inst);
        if m.is_integral() {
            continue;
        }
        seen_fractional = true;
        // Each node touches the half-weight edge set with degree 0 or 2,
        // so the support decomposes into disjoint cycles; stability of the
        // rounded output elsewhere forces them to be odd.
        for v in 0..inst.nodes.len() {
            let deg = inst
                .nodes[v]
                .pref
                .iter()
                .filter(|&&e| m.half[e] == 1)
                .count();
            assert!(deg == 0 || deg == 2, "node {v} has half-degree {deg}");
        }
        for comp in fractional_components(&inst, &m) {
            assert!(comp.len() >= 3, "half-weight cycle too short: {comp:?}");
            assert_eq!(comp.len() % 2, 1, "even half-weight cycle: {comp:?}");
        }
    }
    assert!(seen_fractional, "corpus produced no fractional outcome");
}
