//! Exhaustive search over multigraph b-matchings with loops. The blocking
//! clauses are re-implemented here against the raw preference lists, kept
//! deliberately separate from [`crate::stability::multigraph_blocking_edges`]
//! so the two can vouch for each other on shared corpora.

use crate::model::{MultigraphInstance, MultigraphMatching};

fn rank_of(inst: &MultigraphInstance, v: usize, e: usize) -> usize {
    inst.nodes[v]
        .pref
        .iter()
        .position(|&f| f == e)
        .expect("edge appears in the ranking of each endpoint")
}

/// Chosen edges incident to `v` that `v` ranks strictly below `e`.
fn worse_chosen(inst: &MultigraphInstance, chosen: &[bool], v: usize, e: usize) -> Vec<usize> {
    let re = rank_of(inst, v, e);
    inst.nodes[v]
        .pref
        .iter()
        .copied()
        .filter(|&f| chosen[f] && rank_of(inst, v, f) > re)
        .collect()
}

fn edge_blocks(inst: &MultigraphInstance, chosen: &[bool], loads: &[u32], e: usize) -> bool {
    let (u, v) = inst.edges[e].ends;
    if u != v {
        [u, v].into_iter().all(|x| {
            loads[x] < inst.nodes[x].capacity || !worse_chosen(inst, chosen, x, e).is_empty()
        })
    } else {
        let free = inst.nodes[u].capacity.saturating_sub(loads[u]);
        let worse = worse_chosen(inst, chosen, u, e);
        free >= 2
            || (free >= 1 && !worse.is_empty())
            || worse.iter().any(|&f| inst.is_loop(f))
            || worse.len() >= 2
    }
}

fn is_stable(inst: &MultigraphInstance, chosen: &[bool], loads: &[u32]) -> bool {
    (0..inst.edges.len()).all(|e| chosen[e] || !edge_blocks(inst, chosen, loads, e))
}

/// All stable b-matchings, up to `limit`. A loop consumes two positions at
/// its node. Exponential in the edge count — keep instances small.
pub fn enumerate_mg_stable(
    inst: &MultigraphInstance,
    limit: Option<usize>,
) -> Vec<MultigraphMatching> {
    let cap = limit.unwrap_or(usize::MAX);
    let mut chosen = vec![false; inst.edges.len()];
    let mut loads = vec![0u32; inst.nodes.len()];
    let mut found = Vec::new();

    fn go(
        inst: &MultigraphInstance,
        e: usize,
        chosen: &mut Vec<bool>,
        loads: &mut Vec<u32>,
        found: &mut Vec<MultigraphMatching>,
        cap: usize,
    ) {
        if found.len() >= cap {
            return;
        }
        if e == inst.edges.len() {
            if is_stable(inst, chosen, loads) {
                found.push(MultigraphMatching {
                    chosen: chosen.clone(),
                });
            }
            return;
        }
        let (u, v) = inst.edges[e].ends;
        let fits = if u == v {
            loads[u] + 2 <= inst.nodes[u].capacity
        } else {
            loads[u] < inst.nodes[u].capacity && loads[v] < inst.nodes[v].capacity
        };
        if fits {
            chosen[e] = true;
            if u == v {
                loads[u] += 2;
            } else {
                loads[u] += 1;
                loads[v] += 1;
            }
            go(inst, e + 1, chosen, loads, found, cap);
            if u == v {
                loads[u] -= 2;
            } else {
                loads[u] -= 1;
                loads[v] -= 1;
            }
            chosen[e] = false;
        }
        go(inst, e + 1, chosen, loads, found, cap);
    }

    go(inst, 0, &mut chosen, &mut loads, &mut found, cap);
    found
}

/// Existence form of [`enumerate_mg_stable`].
pub fn mg_stable_exists(inst: &MultigraphInstance) -> bool {
    !enumerate_mg_stable(inst, Some(1)).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MgEdge, MgNode};

    fn node(name: &str, capacity: u32) -> MgNode {
        MgNode {
            name: name.into(),
            capacity,
            pref: vec![],
        }
    }

    // ===== 1. a loop fills both free positions or gets forced in =====

    #[test]
    fn lonely_loop_must_be_taken_when_two_posts_are_free() {
        let mut inst = MultigraphInstance {
            nodes: vec![node("u", 2)],
            edges: vec![MgEdge {
                name: "l".into(),
                ends: (0, 0),
            }],
        };
        inst.nodes[0].pref = vec![0];
        let all = enumerate_mg_stable(&inst, None);
        assert_eq!(all.len(), 1);
        assert!(all[0].chosen[0]);
    }

    #[test]
    fn loop_cannot_block_with_only_one_free_position() {
        let mut inst = MultigraphInstance {
            nodes: vec![node("u", 1)],
            edges: vec![MgEdge {
                name: "l".into(),
                ends: (0, 0),
            }],
        };
        inst.nodes[0].pref = vec![0];
        let all = enumerate_mg_stable(&inst, None);
        assert_eq!(all.len(), 1);
        assert!(!all[0].chosen[0]);
    }

    // ===== 2. one worse edge and no free post does not let a loop block =====

    /// Node u (capacity 2) holds a better edge and a worse edge; its loop
    /// sits between them in u's ranking. Displacing one edge frees only one
    /// position, which is not enough for the loop.
    #[test]
    fn full_node_with_single_worse_edge_resists_its_loop() {
        let mut inst = MultigraphInstance {
            nodes: vec![node("u", 2), node("x", 1), node("y", 1)],
            edges: vec![
                MgEdge {
                    name: "f1".into(),
                    ends: (0, 1),
                },
                MgEdge {
                    name: "f2".into(),
                    ends: (0, 2),
                },
                MgEdge {
                    name: "l".into(),
                    ends: (0, 0),
                },
            ],
        };
        inst.nodes[0].pref = vec![0, 2, 1]; // f1 > l > f2
        inst.nodes[1].pref = vec![0];
        inst.nodes[2].pref = vec![1];
        let all = enumerate_mg_stable(&inst, None);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].chosen, vec![true, true, false]);
    }

    // ===== 3. a preferred loop displaces a single worse edge via a free post =====

    #[test]
    fn loop_with_one_free_post_and_a_worse_edge_blocks() {
        let mut inst = MultigraphInstance {
            nodes: vec![node("u", 2), node("w", 1)],
            edges: vec![
                MgEdge {
                    name: "l".into(),
                    ends: (0, 0),
                },
                MgEdge {
                    name: "e".into(),
                    ends: (0, 1),
                },
            ],
        };
        inst.nodes[0].pref = vec![0, 1]; // l > e
        inst.nodes[1].pref = vec![1];
        let all = enumerate_mg_stable(&inst, None);
        // Only {l} survives: {e} leaves one free post beside a worse edge,
        // and {} leaves two free posts.
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].chosen, vec![true, false]);
    }

    // ===== 4. parallel edges collapse onto the shared favourite =====

    #[test]
    fn parallel_edges_keep_only_the_mutually_preferred_one() {
        let mut inst = MultigraphInstance {
            nodes: vec![node("u", 1), node("v", 1)],
            edges: vec![
                MgEdge {
                    name: "e0".into(),
                    ends: (0, 1),
                },
                MgEdge {
                    name: "e1".into(),
                    ends: (0, 1),
                },
            ],
        };
        inst.nodes[0].pref = vec![0, 1];
        inst.nodes[1].pref = vec![0, 1];
        let all = enumerate_mg_stable(&inst, None);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].chosen, vec![true, false]);
    }

    // ===== 5. worse matched loop is displaced by a better loop =====

    #[test]
    fn better_loop_displaces_a_worse_matched_loop() {
        let mut inst = MultigraphInstance {
            nodes: vec![node("u", 2)],
            edges: vec![
                MgEdge {
                    name: "l0".into(),
                    ends: (0, 0),
                },
                MgEdge {
                    name: "l1".into(),
                    ends: (0, 0),
                },
            ],
        };
        inst.nodes[0].pref = vec![0, 1];
        let all = enumerate_mg_stable(&inst, None);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].chosen, vec![true, false]);
    }
}
