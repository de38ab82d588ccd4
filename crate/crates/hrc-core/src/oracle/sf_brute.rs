//! Exhaustive search over integral degree-constrained matchings, used to
//! cross-check the half-integral solver's integrality verdicts on small
//! instances. Stability is decided here by scanning the ranking lists
//! directly — nothing is shared with [`crate::sf::sf_stability_check`].

use crate::sf::SfInstance;

/// True when node `x` would welcome edge `e`: it has a spare position, or it
/// holds an edge it ranks below `e`.
fn welcomes(inst: &SfInstance, chosen: &[bool], loads: &[u32], x: usize, e: usize) -> bool {
    if loads[x] < inst.nodes[x].capacity {
        return true;
    }
    let pref = &inst.nodes[x].pref;
    let pos = pref
        .iter()
        .position(|&f| f == e)
        .expect("edge appears in the ranking of each endpoint");
    pref[pos + 1..].iter().any(|&f| chosen[f])
}

fn is_stable(inst: &SfInstance, chosen: &[bool], loads: &[u32]) -> bool {
    (0..inst.edges.len()).all(|e| {
        if chosen[e] {
            return true;
        }
        let (u, v) = inst.edges[e].ends;
        !(welcomes(inst, chosen, loads, u, e) && welcomes(inst, chosen, loads, v, e))
    })
}

/// All stable integral matchings, as sorted lists of chosen edge indices,
/// up to `limit`. Exponential in the edge count — keep instances small.
pub fn enumerate_integral_stable(inst: &SfInstance, limit: Option<usize>) -> Vec<Vec<usize>> {
    let m = inst.edges.len();
    let cap = limit.unwrap_or(usize::MAX);
    let mut chosen = vec![false; m];
    let mut loads = vec![0u32; inst.nodes.len()];
    let mut found = Vec::new();

    fn go(
        inst: &SfInstance,
        e: usize,
        chosen: &mut Vec<bool>,
        loads: &mut Vec<u32>,
        found: &mut Vec<Vec<usize>>,
        cap: usize,
    ) {
        if found.len() >= cap {
            return;
        }
        if e == inst.edges.len() {
            if is_stable(inst, chosen, loads) {
                found.push(
                    (0..inst.edges.len())
                        .filter(|&f| chosen[f])
                        .collect(),
                );
            }
            return;
        }
        let (u, v) = inst.edges[e].ends;
        if loads[u] < inst.nodes[u].capacity && loads[v] < inst.nodes[v].capacity {
            chosen[e] = true;
            loads[u] += 1;
            loads[v] += 1;
            go(inst, e + 1, chosen, loads, found, cap);
            loads[v] -= 1;
            loads[u] -= 1;
            chosen[e] = false;
        }
        go(inst, e + 1, chosen, loads, found, cap);
    }

    go(inst, 0, &mut chosen, &mut loads, &mut found, cap);
    found
}

/// Existence form of [`enumerate_integral_stable`].
pub fn integral_stable_exists(inst: &SfInstance) -> bool {
    !enumerate_integral_stable(inst, Some(1)).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    // ===== 1. an odd cycle of mutually first-choice-chasing nodes =====

    /// Three unit-capacity nodes where every node prefers its "next"
    /// neighbour: whoever is left out can always break in.
    fn triangle() -> SfInstance {
        let mut inst = SfInstance::default();
        let a = inst.add_node("a", 1);
        let b = inst.add_node("b", 1);
        let c = inst.add_node("c", 1);
        let ab = inst.add_edge(a, b);
        let bc = inst.add_edge(b, c);
        let ca = inst.add_edge(c, a);
        inst.nodes[a].pref = vec![ab, ca];
        inst.nodes[b].pref = vec![bc, ab];
        inst.nodes[c].pref = vec![ca, bc];
        inst
    }

    #[test]
    fn rotating_triangle_has_no_integral_stable_matching() {
        assert!(enumerate_integral_stable(&triangle(), None).is_empty());
        assert!(!integral_stable_exists(&triangle()));
    }

    // ===== 2. a path resolves to the middle node's favourite =====

    #[test]
    fn path_keeps_the_middle_nodes_first_choice() {
        let mut inst = SfInstance::default();
        let a = inst.add_node("a", 1);
        let b = inst.add_node("b", 1);
        let c = inst.add_node("c", 1);
        let ab = inst.add_edge(a, b);
        let bc = inst.add_edge(b, c);
        inst.nodes[a].pref = vec![ab];
        inst.nodes[b].pref = vec![ab, bc];
        inst.nodes[c].pref = vec![bc];
        let all = enumerate_integral_stable(&inst, None);
        assert_eq!(all, vec![vec![ab]]);
    }

    // ===== 3. capacity zero forces the empty matching and it is stable =====

    #[test]
    fn zero_capacity_node_rejects_everything() {
        let mut inst = SfInstance::default();
        let u = inst.add_node("u", 0);
        let v = inst.add_node("v", 1);
        let e = inst.add_edge(u, v);
        inst.nodes[u].pref = vec![e];
        inst.nodes[v].pref = vec![e];
        let all = enumerate_integral_stable(&inst, None);
        assert_eq!(all, vec![Vec::<usize>::new()]);
    }

    // ===== 4. an even cycle with rotating preferences has two solutions =====

    #[test]
    fn four_cycle_has_both_alternating_matchings() {
        let mut inst = SfInstance::default();
        let a = inst.add_node("a", 1);
        let b = inst.add_node("b", 1);
        let c = inst.add_node("c", 1);
        let d = inst.add_node("d", 1);
        let ab = inst.add_edge(a, b);
        let bc = inst.add_edge(b, c);
        let cd = inst.add_edge(c, d);
        let da = inst.add_edge(d, a);
        inst.nodes[a].pref = vec![ab, da];
        inst.nodes[b].pref = vec![bc, ab];
        inst.nodes[c].pref = vec![cd, bc];
        inst.nodes[d].pref = vec![da, cd];
        let all = enumerate_integral_stable(&inst, None);
        assert_eq!(all.len(), 2);
        assert!(all.contains(&vec![ab, cd]));
        assert!(all.contains(&vec![bc, da]));
    }
}
