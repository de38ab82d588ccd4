//! Half-integral solver for degree-constrained stable matching on simple
//! graphs with ranked edges.
//!
//! The algorithm runs in two phases. Phase one is a capacitated proposal
//! round: every node offers itself along the best `b(x)` live entries of its
//! list; a node holding more offers than capacity rejects the worst one
//! (deleting the edge for both ends), and a node holding exactly as many
//! offers as capacity truncates every list entry it ranks below its worst
//! offer. Phase two repeatedly locates a node whose live list extends more
//! than one entry past its proposal window, walks the chain of worst offers
//! that hang off that surplus, and deletes the worst offer where the chain
//! closes into a cycle; the proposal round then re-converges. When every
//! node's list extends at most one entry past its window, the surviving
//! one-directional offers form disjoint simple cycles: odd cycles are
//! emitted at weight ½ all round, even cycles resolve integrally by
//! alternation, and mutual offers are emitted at weight 1.

use std::collections::BTreeSet;

use super::{fractional_degree_violations, sf_stability_check, HalfMatching, SfInstance};

struct Solver<'a> {
    inst: &'a SfInstance,
    /// `rank[e]` = position of edge `e` in the list of `ends.0` / `ends.1`.
    rank: Vec<[usize; 2]>,
    alive: Vec<bool>,
    n_alive: Vec<usize>,
    /// The proposal window of node `x` is every live entry at a list
    /// position `< prefix_end[x]`; `out_count[x]` counts them and is kept
    /// equal to `min(b(x), n_alive[x])`.
    prefix_end: Vec<usize>,
    out_count: Vec<usize>,
    /// Offers node `y` currently holds, keyed by `(rank at y, edge)`. An
    /// offer is any live edge whose other end has it inside its window.
    held: Vec<BTreeSet<(usize, usize)>>,
    /// Every list position `>= tail_end[y]` is already dead (truncation
    /// high-water mark, only ever moves down).
    tail_end: Vec<usize>,
    queue: BTreeSet<usize>,
}

impl<'a> Solver<'a> {
    fn new(inst: &'a SfInstance) -> Self {
        let n = inst.nodes.len();
        let m = inst.edges.len();
        let mut rank = vec![[usize::MAX; 2]; m];
        for (v, node) in inst.nodes.iter().enumerate() {
            for (pos, &e) in node.pref.iter().enumerate() {
                if inst.edges[e].ends.0 == v {
                    rank[e][0] = pos;
                } else {
                    rank[e][1] = pos;
                }
            }
        }
        Solver {
            inst,
            rank,
            alive: vec![true; m],
            n_alive: inst.nodes.iter().map(|nd| nd.pref.len()).collect(),
            prefix_end: vec![0; n],
            out_count: vec![0; n],
            held: vec![BTreeSet::new(); n],
            tail_end: inst.nodes.iter().map(|nd| nd.pref.len()).collect(),
            queue: BTreeSet::new(),
        }
    }

    fn cap(&self, v: usize) -> usize {
        self.inst.nodes[v].capacity as usize
    }

    fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.inst.edges[e].ends;
        if a == v {
            b
        } else {
            a
        }
    }

    fn rank_at(&self, v: usize, e: usize) -> usize {
        let side = usize::from(self.inst.edges[e].ends.0 != v);
        self.rank[e][side]
    }

    fn proposes(&self, v: usize, e: usize) -> bool {
        self.alive[e] && self.rank_at(v, e) < self.prefix_end[v]
    }

    /// Extends `x`'s proposal window until it offers `min(b, n_alive)`
    /// edges, registering each fresh offer at the receiving end.
    fn top_up(&mut self, x: usize) {
        let want = self.cap(x).min(self.n_alive[x]);
        while self.out_count[x] < want {
            let mut p = self.prefix_end[x];
            while !self.alive[self.inst.nodes[x].pref[p]] {
                p += 1;
            }
            let f = self.inst.nodes[x].pref[p];
            self.prefix_end[x] = p + 1;
            self.out_count[x] += 1;
            let z = self.other(f, x);
            let rank_there = self.rank_at(z, f);
            let inserted = self.held[z].insert((rank_there, f));
            debug_assert!(inserted, "an offer is registered at most once");
            self.queue.insert(z);
        }
    }

    fn delete_edge(&mut self, e: usize) {
        debug_assert!(self.alive[e]);
        self.alive[e] = false;
        let (u, v) = self.inst.edges[e].ends;
        for x in [u, v] {
            let r = self.rank_at(x, e);
            self.n_alive[x] -= 1;
            if r < self.prefix_end[x] {
                self.out_count[x] -= 1;
            }
            self.held[x].remove(&(r, e));
            self.queue.insert(x);
        }
        self.top_up(u);
        self.top_up(v);
    }

    /// Re-establishes the two local laws at `y`: reject offers beyond
    /// capacity (worst first), and once capacity is exactly met, truncate
    /// everything ranked below the worst held offer.
    fn process(&mut self, y: usize) {
        let b = self.cap(y);
        while self.held[y].len() > b {
            let &(r, e) = self.held[y].iter().next_back().unwrap();
            // A rejected offer is never one the rejecting node itself
            // proposes: reciprocated offers sit inside the window, and with
            // the window at most `b` entries wide, an overflowing offer set
            // always bottoms out past the window.
            debug_assert!(r >= self.prefix_end[y]);
            self.delete_edge(e);
        }
        if b > 0 && self.held[y].len() == b {
            let cutoff = self.held[y].iter().next_back().unwrap().0;
            if cutoff + 1 < self.tail_end[y] {
                let hi = self.tail_end[y];
                self.tail_end[y] = cutoff + 1;
                for p in (cutoff + 1..hi).rev() {
                    let f = self.inst.nodes[y].pref[p];
                    if self.alive[f] {
                        self.delete_edge(f);
                    }
                }
            }
        }
    }

    fn quiesce(&mut self) {
        while let Some(&y) = self.queue.iter().next() {
            self.queue.remove(&y);
            self.process(y);
        }
    }

    /// Live entries of `x`'s list beyond its proposal window.
    fn tail_count(&self, x: usize) -> usize {
        self.n_alive[x] - self.out_count[x]
    }

    fn first_tail_entry(&self, x: usize) -> usize {
        self.inst.nodes[x].pref[self.prefix_end[x]..self.tail_end[x]]
            .iter()
            .copied()
            .find(|&f| self.alive[f])
            .expect("walked nodes keep a live entry past their window")
    }

    fn worst_alive_entry(&self, y: usize) -> usize {
        (0..self.tail_end[y])
            .rev()
            .map(|p| self.inst.nodes[y].pref[p])
            .find(|&f| self.alive[f])
            .expect("a node holding offers has live entries")
    }

    /// Starting from a node with two or more surplus entries, follows the
    /// chain "best surplus entry → its other end → that end's worst held
    /// offer → the offer's proposer" until the proposer repeats, then
    /// deletes the worst offer at the closing link. The subsequent proposal
    /// cascade rotates every node on the cycle onto a strictly better
    /// offer, and at least one edge is gone for good.
    fn rotate_from(&mut self, start: usize) {
        let mut on_path = vec![false; self.inst.nodes.len()];
        let mut x = start;
        loop {
            on_path[x] = true;
            let sigma = self.first_tail_entry(x);
            let y = self.other(sigma, x);
            let l = self.worst_alive_entry(y);
            debug_assert_eq!(
                self.held[y].iter().next_back().map(|&(_, e)| e),
                Some(l),
                "the worst live entry of a surplus-adjacent node is its worst held offer",
            );
            let proposer = self.other(l, y);
            if on_path[proposer] {
                self.delete_edge(l);
                return;
            }
            x = proposer;
        }
    }

    fn solve(mut self) -> HalfMatching {
        // Nodes without positions keep nothing and block nothing: clear
        // their lists up front so they never linger as undecided entries.
        for v in 0..self.inst.nodes.len() {
            if self.cap(v) == 0 {
                for p in 0..self.inst.nodes[v].pref.len() {
                    let e = self.inst.nodes[v].pref[p];
                    if self.alive[e] {
                        self.delete_edge(e);
                    }
                }
                self.tail_end[v] = 0;
            }
        }
        for v in 0..self.inst.nodes.len() {
            self.top_up(v);
        }
        self.quiesce();
        loop {
            let trigger = (0..self.inst.nodes.len()).find(|&z| self.tail_count(z) >= 2);
            match trigger {
                None => break,
                Some(z) => {
                    self.rotate_from(z);
                    self.quiesce();
                }
            }
        }
        self.emit()
    }

    fn emit(&self) -> HalfMatching {
        let n = self.inst.nodes.len();
        let m = self.inst.edges.len();
        let mut half = vec![0u8; m];
        let mut heads: Vec<Option<usize>> = vec![None; m]; // receiving end of a one-way offer
        let mut out_one: Vec<Option<usize>> = vec![None; n];
        for e in 0..m {
            if !self.alive[e] {
                continue;
            }
            let (u, v) = self.inst.edges[e].ends;
            let pu = self.proposes(u, e);
            let pv = self.proposes(v, e);
            debug_assert!(pu || pv, "no edge survives without at least one proposer");
            if pu && pv {
                half[e] = 2;
            } else {
                let (from, to) = if pu { (u, v) } else { (v, u) };
                debug_assert!(out_one[from].is_none(), "one one-way offer out per node");
                out_one[from] = Some(e);
                heads[e] = Some(to);
            }
        }
        let mut placed = vec![false; m];
        for e0 in 0..m {
            if heads[e0].is_none() || placed[e0] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut e = e0;
            loop {
                placed[e] = true;
                cycle.push(e);
                let to = heads[e].unwrap();
                e = out_one[to].expect("one-way offers close into cycles");
                if e == e0 {
                    break;
                }
            }
            if cycle.len() % 2 == 1 {
                for &f in &cycle {
                    half[f] = 1;
                }
            } else {
                // Integral resolution: alternate full/empty around the
                // cycle, anchored at its smallest edge index so reruns
                // agree.
                let anchor = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|&(_, &f)| f)
                    .map(|(i, _)| i)
                    .unwrap();
                for (t, i) in (0..cycle.len()).enumerate() {
                    half[cycle[(anchor + i) % cycle.len()]] = if t % 2 == 0 { 2 } else { 0 };
                }
            }
        }
        let result = HalfMatching { half };
        debug_assert!(
            sf_stability_check(self.inst, &result).is_empty(),
            "solver output failed its own stability audit"
        );
        debug_assert!(fractional_degree_violations(self.inst, &result).is_empty());
        result
    }
}

/// Computes a stable half-integral assignment. Every instance has one; the
/// result is deterministic in the instance encoding.
pub fn solve_half_integral(inst: &SfInstance) -> HalfMatching {
    debug_assert!(inst.validate().is_empty(), "solver requires a valid instance");
    Solver::new(inst).solve()
}

/// Returns the solver's assignment when it is fully integral (so it encodes
/// an ordinary stable b-matching), and `None` when half-weights remain.
pub fn decide_integral(inst: &SfInstance) -> Option<HalfMatching> {
    let m = solve_half_integral(inst);
    if m.is_integral() {
        Some(m)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::sf_brute;

    // ===== 1. an odd cycle comes out at one half everywhere =====

    #[test]
    fn rotating_triangle_gets_half_weights() {
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
        let m = solve_half_integral(&inst);
        assert_eq!(m.half, vec![1, 1, 1]);
        assert!(decide_integral(&inst).is_none());
        assert!(!sf_brute::integral_stable_exists(&inst));
    }

    // ===== 2. mutual first choices pair up and the loser is cut =====

    #[test]
    fn middle_of_a_path_keeps_its_favourite() {
        let mut inst = SfInstance::default();
        let a = inst.add_node("a", 1);
        let b = inst.add_node("b", 1);
        let c = inst.add_node("c", 1);
        let ab = inst.add_edge(a, b);
        let bc = inst.add_edge(b, c);
        inst.nodes[a].pref = vec![ab];
        inst.nodes[b].pref = vec![ab, bc];
        inst.nodes[c].pref = vec![bc];
        let m = solve_half_integral(&inst);
        assert_eq!(m.half, vec![2, 0]);
        assert!(decide_integral(&inst).is_some());
    }

    // ===== 3. two odd cycles joined by a mid-ranked bridge resolve =====
    //
    // Both three-cycles of one-way offers would happily persist on their
    // own, but the bridge between them is ranked second by both of its
    // ends, so leaving it undecided is unstable. The only stable integral
    // matching takes the bridge plus the far edge of each triangle — this
    // pins the phase-two trigger to "more than one live entry past the
    // window", not "more than one entry beyond capacity".

    #[test]
    fn bridged_triangles_resolve_to_the_unique_integral_matching() {
        let mut inst = SfInstance::default();
        let z = inst.add_node("z", 1);
        let u = inst.add_node("u", 1);
        let v = inst.add_node("v", 1);
        let w = inst.add_node("w", 1);
        let a = inst.add_node("a", 1);
        let b = inst.add_node("b", 1);
        let zu = inst.add_edge(z, u);
        let uv = inst.add_edge(u, v);
        let vz = inst.add_edge(v, z);
        let f = inst.add_edge(z, w);
        let wa = inst.add_edge(w, a);
        let ab = inst.add_edge(a, b);
        let bw = inst.add_edge(b, w);
        inst.nodes[z].pref = vec![zu, f, vz];
        inst.nodes[u].pref = vec![uv, zu];
        inst.nodes[v].pref = vec![vz, uv];
        inst.nodes[w].pref = vec![wa, f, bw];
        inst.nodes[a].pref = vec![ab, wa];
        inst.nodes[b].pref = vec![bw, ab];
        assert!(inst.validate().is_empty());

        let m = solve_half_integral(&inst);
        let mut expected = vec![0u8; 7];
        expected[f] = 2;
        expected[uv] = 2;
        expected[ab] = 2;
        assert_eq!(m.half, expected);

        // The independent enumeration agrees this is the only stable set.
        let all = sf_brute::enumerate_integral_stable(&inst, None);
        assert_eq!(all, vec![vec![uv, f, ab]]);
    }

    // ===== 4. zero-capacity nodes reject everything, stably =====

    #[test]
    fn zero_capacity_node_ends_with_nothing() {
        let mut inst = SfInstance::default();
        let u = inst.add_node("u", 0);
        let v = inst.add_node("v", 1);
        let e = inst.add_edge(u, v);
        inst.nodes[u].pref = vec![e];
        inst.nodes[v].pref = vec![e];
        let m = solve_half_integral(&inst);
        assert_eq!(m.half, vec![0]);
        assert!(decide_integral(&inst).is_some());
    }

    // ===== 5. even cycles resolve integrally by alternation =====

    #[test]
    fn even_cycle_alternates_starting_at_its_smallest_edge() {
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
        let m = solve_half_integral(&inst);
        assert_eq!(m.half, vec![2, 0, 2, 0]);
    }

    // ===== 6. capacities above one hold several mutual offers =====

    #[test]
    fn wide_node_keeps_all_mutual_offers() {
        let mut inst = SfInstance::default();
        let s = inst.add_node("s", 2);
        let x = inst.add_node("x", 1);
        let y = inst.add_node("y", 1);
        let sx = inst.add_edge(s, x);
        let sy = inst.add_edge(s, y);
        inst.nodes[s].pref = vec![sx, sy];
        inst.nodes[x].pref = vec![sx];
        inst.nodes[y].pref = vec![sy];
        let m = solve_half_integral(&inst);
        assert_eq!(m.half, vec![2, 2]);
    }

    // ===== 7. an overloaded popular node keeps its best offers only =====

    #[test]
    fn popular_node_rejects_beyond_capacity() {
        let mut inst = SfInstance::default();
        let s = inst.add_node("s", 2);
        let x = inst.add_node("x", 1);
        let y = inst.add_node("y", 1);
        let z = inst.add_node("z", 1);
        let sx = inst.add_edge(s, x);
        let sy = inst.add_edge(s, y);
        let sz = inst.add_edge(s, z);
        inst.nodes[s].pref = vec![sy, sz, sx];
        inst.nodes[x].pref = vec![sx];
        inst.nodes[y].pref = vec![sy];
        inst.nodes[z].pref = vec![sz];
        let m = solve_half_integral(&inst);
        assert_eq!(m.half, vec![0, 2, 2]);
    }
}
