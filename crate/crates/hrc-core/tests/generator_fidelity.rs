//! End-to-end checks of the instance generators: random corpora feed the
//! solver pipelines, the hardness constructions carry their certified
//! witnesses, and the brute-force oracle agrees with the intended
//! solvability on desk-sized cores.

use hrc_core::gen::{
    gen_dual_market_from_sat, gen_from_smti, gen_minbp_from_smti, gen_random, CoupleMix, GenParams,
};
use hrc_core::model::{
    classify_couple, detect_dual_market, parse_hrc, write_hrc, CnfFormula, HrcInstance,
    HrcMatching, Lit, SmtiInstance, SmtiMan, SmtiWoman,
};
use hrc_core::oracle::{enumerate_stable, min_bp, SearchBudget};
use hrc_core::reductions::{reduce_typed, solve, SolveMode, SolvePath, SolveResult};
use hrc_core::sf::SfInstance;
use hrc_core::stability::check_stability;

// ============================================================================
// Helpers and fixtures
// ============================================================================

fn assert_stable(inst: &HrcInstance, m: &HrcMatching, context: &str) {
    let report = check_stability(inst, m);
    assert!(
        report.feasibility.is_empty(),
        "{context}: feasibility violations {:?}",
        report.feasibility
    );
    assert!(
        report.blocking.is_empty(),
        "{context}: blocking records {:?}",
        report.blocking
    );
}

fn is_bipartite(sf: &SfInstance) -> bool {
    let n = sf.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &sf.edges {
        adj[e.ends.0].push(e.ends.1);
        adj[e.ends.1].push(e.ends.0);
    }
    let mut colour: Vec<Option<bool>> = vec![None; n];
    for s in 0..n {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(false);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let cu = colour[u].unwrap();
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(!cu);
                        stack.push(v);
                    }
                    Some(cv) => {
                        if cv == cu {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Two men, two women; w1 ties both men, w2 strictly lists m1. The unique
/// complete weakly-stable matching pairs m1 with w2 and m2 with w1.
fn tie_square() -> SmtiInstance {
    SmtiInstance {
        men: vec![
            SmtiMan {
                name: "m1".into(),
                pref: vec![0, 1],
            },
            SmtiMan {
                name: "m2".into(),
                pref: vec![0],
            },
        ],
        women: vec![
            SmtiWoman {
                name: "w1".into(),
                pref: vec![vec![0, 1]],
            },
            SmtiWoman {
                name: "w2".into(),
                pref: vec![vec![0]],
            },
        ],
        man_order: None,
    }
}

/// Balanced core without a complete weakly-stable matching: w1 accepts only
/// m1, w2 accepts nobody, so m2 can never be placed.
fn starved_core() -> SmtiInstance {
    SmtiInstance {
        men: vec![
            SmtiMan {
                name: "m1".into(),
                pref: vec![0],
            },
            SmtiMan {
                name: "m2".into(),
                pref: vec![0],
            },
        ],
        women: vec![
            SmtiWoman {
                name: "w1".into(),
                pref: vec![vec![0]],
            },
            SmtiWoman {
                name: "w2".into(),
                pref: vec![],
            },
        ],
        man_order: None,
    }
}

/// Three variables, four clauses, every variable twice positive and twice
/// negative. Satisfied by all-true and by (true, false, false).
fn tiny_formula() -> CnfFormula {
    let lit = |var: usize, positive: bool| Lit { var, positive };
    CnfFormula {
        num_vars: 3,
        clauses: vec![
            vec![lit(0, true), lit(1, true), lit(2, true)],
            vec![lit(0, true), lit(1, false), lit(2, false)],
            vec![lit(0, false), lit(1, true), lit(2, false)],
            vec![lit(0, false), lit(1, false), lit(2, true)],
        ],
    }
}

// ============================================================================
// Random corpora
// ============================================================================

#[test]
fn random_corpus_is_valid_and_always_near_solvable() {
    for seed in 0..60u64 {
        let params = GenParams {
            seed,
            singles: (seed % 5) as usize,
            couples: (seed % 6) as usize,
            hospitals: 3 + (seed % 4) as usize,
            capacity: (1, 3),
            list_len: (1, 3),
            mix: CoupleMix::default(),
            dual_market: false,
        };
        let inst = gen_random(&params).unwrap();
        assert!(inst.validate().is_empty(), "seed {seed}");
        for c in 0..inst.couples.len() {
            let profile = classify_couple(&inst, c);
            assert!(
                profile.sub_responsive && profile.sub_complete,
                "seed {seed}, couple {c}"
            );
        }
        let run = solve(&inst, SolveMode::NearFeasible).unwrap();
        let SolveResult::NearFeasible(out) = run.result else {
            panic!("seed {seed}: near-feasible mode must round");
        };
        assert!(
            out.deltas.iter().all(|d| d.abs() <= 1),
            "seed {seed}: capacities may move by at most one"
        );
        assert_stable(&inst, &out.matching, &format!("seed {seed}"));
    }
}

#[test]
fn dual_market_corpus_always_solves_exactly_over_a_bipartite_graph() {
    for step in 0..40u64 {
        let params = GenParams {
            seed: 1000 + step,
            singles: 3,
            couples: 4,
            hospitals: 4 + (step % 3) as usize,
            capacity: (1, 2),
            list_len: (1, 3),
            mix: CoupleMix {
                type_b: 0,
                type_c: 0,
                ..CoupleMix::default()
            },
            dual_market: true,
        };
        let inst = gen_random(&params).unwrap();
        assert!(inst.validate().is_empty(), "seed {}", params.seed);
        detect_dual_market(&inst).expect("generated market must be two-sided");
        let run = solve(&inst, SolveMode::Auto).unwrap();
        assert_eq!(
            run.path,
            SolvePath::ExactTyped,
            "two-sided couples have disjoint hospital sets, so the exact path applies"
        );
        let matching = match run.result {
            SolveResult::Stable(m) => m,
            other => panic!(
                "seed {}: a two-sided market always has a stable matching, got {other:?}",
                params.seed
            ),
        };
        assert_stable(&inst, &matching, &format!("seed {}", params.seed));
        let (sf, _) = reduce_typed(&inst).unwrap();
        assert!(
            is_bipartite(&sf),
            "seed {}: exact encoding of a two-sided market",
            params.seed
        );
    }
}

// ============================================================================
// Marriage-with-ties encoding
// ============================================================================

#[test]
fn marriage_encoding_agrees_with_core_solvability() {
    // A core with a complete weakly-stable matching: its witness is stable,
    // and the oracle confirms the encoded market is solvable.
    let build = gen_from_smti(&tie_square()).unwrap();
    let witness = build.witness_matching(&[1, 0]);
    assert_stable(&build.instance, &witness, "tie-square witness");
    let (found, _) = enumerate_stable(&build.instance, Some(1), SearchBudget::default()).unwrap();
    assert!(!found.is_empty());

    // A core with no complete weakly-stable matching: the cycle gadget of
    // the unplaceable man breaks every candidate matching.
    let build = gen_from_smti(&starved_core()).unwrap();
    assert!(build
        .notes
        .iter()
        .any(|n| n.contains("does not list him back")));
    let (found, _) = enumerate_stable(&build.instance, None, SearchBudget::default()).unwrap();
    assert!(
        found.is_empty(),
        "unsolvable core must encode to an unsolvable market, found {found:?}"
    );
}

// ============================================================================
// SAT dual markets
// ============================================================================

#[test]
fn sat_witnesses_fill_the_core_for_both_enforcer_variants() {
    let formula = tiny_formula();
    for assignment in [[true, true, true], [true, false, false]] {
        assert!(formula.satisfied_by(&assignment));
        for enforcers in [false, true] {
            let build = gen_dual_market_from_sat(&formula, enforcers, true).unwrap();
            assert!(build.instance.validate().is_empty());
            let witness = build.witness_matching(&formula, &assignment);
            assert_stable(
                &build.instance,
                &witness,
                &format!("assignment {assignment:?}, enforcers {enforcers}"),
            );
            let masters = build.master_lists.as_ref().expect("requested");
            assert_eq!(masters.violations(&build.instance), Vec::<String>::new());
            detect_dual_market(&build.instance).expect("encoding is two-sided");
        }
    }
}

// ============================================================================
// Blocking-pair amplification
// ============================================================================

#[test]
fn replication_separates_solvable_cores_from_unsolvable_ones() {
    // One mutual pair, no ties: a fully stable matching exists, so the
    // minimum stays at zero blocking records.
    let solvable = SmtiInstance {
        men: vec![SmtiMan {
            name: "m1".into(),
            pref: vec![0],
        }],
        women: vec![SmtiWoman {
            name: "w1".into(),
            pref: vec![vec![0]],
        }],
        man_order: None,
    };
    let build = gen_minbp_from_smti(&solvable, 1, Some(3), 7).unwrap();
    let (bp, witness, _) = min_bp(&build.instance, SearchBudget::default()).unwrap();
    assert_eq!(bp, 0);
    assert_stable(&build.instance, &witness, "solvable-core minimum");

    // Empty lists: no complete matching of the core, so every matching of
    // the encoding leaves at least one triangle corner blocking B times.
    let unsolvable = SmtiInstance {
        men: vec![SmtiMan {
            name: "m1".into(),
            pref: vec![],
        }],
        women: vec![SmtiWoman {
            name: "w1".into(),
            pref: vec![],
        }],
        man_order: None,
    };
    let build = gen_minbp_from_smti(&unsolvable, 1, Some(3), 7).unwrap();
    assert_eq!(build.edge_count, 0);
    let (bp, _, _) = min_bp(&build.instance, SearchBudget::default()).unwrap();
    // Seating one corner couple leaves exactly the three copies of the next
    // corner blocking; nothing does better.
    assert_eq!(bp, 3);
}

// ============================================================================
// Text round trips
// ============================================================================

#[test]
fn generated_instances_survive_the_text_round_trip() {
    let random = gen_random(&GenParams {
        seed: 5,
        ..GenParams::default()
    })
    .unwrap();
    assert_eq!(parse_hrc(&write_hrc(&random)).unwrap(), random);

    let marriage = gen_from_smti(&tie_square()).unwrap().instance;
    assert_eq!(parse_hrc(&write_hrc(&marriage)).unwrap(), marriage);

    let sat = gen_dual_market_from_sat(&tiny_formula(), true, false)
        .unwrap()
        .instance;
    assert_eq!(parse_hrc(&write_hrc(&sat)).unwrap(), sat);

    let amplified = gen_minbp_from_smti(&tie_square(), 2, Some(2), 0)
        .unwrap()
        .instance;
    assert_eq!(parse_hrc(&write_hrc(&amplified)).unwrap(), amplified);
}
