//! Stable fixtures: simple graphs with node capacities and per-node strict
//! rankings over incident edges, solved for half-integral stable matchings.
//!
//! Edge weights live in half-units (0, 1 or 2 halves), so a weight-1 edge is
//! stored as 2. A half-matching is *stable* when every edge with weight
//! below 1 is dominated at some endpoint: that endpoint is saturated and
//! ranks all of its positive edges at least as well as the edge in question.

mod solve;

pub use solve::{decide_integral, solve_half_integral};

use crate::model::ValidationIssue;
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfNode {
    pub name: String,
    pub capacity: u32,
    /// Strict ranking over all incident edges (edge indices, best first).
    pub pref: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SfEdge {
    pub ends: (usize, usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SfInstance {
    pub nodes: Vec<SfNode>,
    pub edges: Vec<SfEdge>,
}

impl SfInstance {
    pub fn add_node(&mut self, name: impl Into<String>, capacity: u32) -> usize {
        self.nodes.push(SfNode {
            name: name.into(),
            capacity,
            pref: Vec::new(),
        });
        self.nodes.len() - 1
    }

    /// Add an edge between two distinct nodes. Rankings are set separately.
    pub fn add_edge(&mut self, u: usize, v: usize) -> usize {
        debug_assert_ne!(u, v, "loops are not allowed");
        self.edges.push(SfEdge { ends: (u, v) });
        self.edges.len() - 1
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e].ends;
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn rank(&self, v: usize, e: usize) -> Option<usize> {
        self.nodes[v].pref.iter().position(|&x| x == e)
    }

    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        let mut seen_pairs = HashSet::new();
        let mut incident_count = vec![0usize; self.nodes.len()];
        for (ei, e) in self.edges.iter().enumerate() {
            let (u, v) = e.ends;
            if u == v {
                issues.push(ValidationIssue {
                    subject: format!("edge {ei}"),
                    message: "loop".into(),
                });
                incident_count[u] += 1;
            } else {
                incident_count[u] += 1;
                incident_count[v] += 1;
            }
            if !seen_pairs.insert((u.min(v), u.max(v))) {
                issues.push(ValidationIssue {
                    subject: format!("edge {ei}"),
                    message: "parallel edge".into(),
                });
            }
        }
        // One shared stamp vector instead of a per-node incidence set keeps
        // this linear; full preference audits run on every solve in debug
        // builds, including the hundred-thousand-edge instances.
        let mut stamped = vec![usize::MAX; self.edges.len()];
        for (vi, node) in self.nodes.iter().enumerate() {
            let mut distinct = 0usize;
            for &e in &node.pref {
                let incident = e < self.edges.len()
                    && (self.edges[e].ends.0 == vi || self.edges[e].ends.1 == vi);
                if !incident {
                    issues.push(ValidationIssue {
                        subject: node.name.clone(),
                        message: "ranks a non-incident edge".into(),
                    });
                } else if stamped[e] == vi {
                    issues.push(ValidationIssue {
                        subject: node.name.clone(),
                        message: "ranks an edge twice".into(),
                    });
                } else {
                    stamped[e] = vi;
                    distinct += 1;
                }
            }
            if distinct != incident_count[vi] {
                issues.push(ValidationIssue {
                    subject: node.name.clone(),
                    message: "does not rank every incident edge".into(),
                });
            }
        }
        issues
    }
}

/// Edge weights in half-units: 0, 1 (= one half) or 2 (= one whole unit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfMatching {
    pub half: Vec<u8>,
}

impl HalfMatching {
    pub fn zero(inst: &SfInstance) -> Self {
        HalfMatching {
            half: vec![0; inst.edges.len()],
        }
    }

    pub fn is_integral(&self) -> bool {
        self.half.iter().all(|&h| h != 1)
    }

    /// Total weight at a node, in half-units.
    pub fn load_halves(&self, inst: &SfInstance, v: usize) -> u32 {
        inst.nodes[v]
            .pref
            .iter()
            .map(|&e| self.half[e] as u32)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SfViolation {
    /// Edge weight above 1, or total node weight above capacity.
    Overloaded { node: usize, halves: u32 },
    BadWeight { edge: usize, half: u8 },
    /// An edge with weight below 1 that is dominated at neither endpoint.
    Blocking { edge: usize },
}

/// Check feasibility and stability of a half-matching. Empty result means
/// the matching is a stable half-integral solution.
pub fn sf_stability_check(inst: &SfInstance, m: &HalfMatching) -> Vec<SfViolation> {
    let mut out = Vec::new();
    for (e, &h) in m.half.iter().enumerate() {
        if h > 2 {
            out.push(SfViolation::BadWeight { edge: e, half: h });
        }
    }
    let loads: Vec<u32> = (0..inst.nodes.len())
        .map(|v| m.load_halves(inst, v))
        .collect();
    for (v, &halves) in loads.iter().enumerate() {
        if halves > 2 * inst.nodes[v].capacity {
            out.push(SfViolation::Overloaded { node: v, halves });
        }
    }
    if !out.is_empty() {
        return out;
    }

    // An endpoint dominates an edge when it is saturated and every positive
    // edge there ranks at least as well.
    let dominates = |v: usize, e: usize| -> bool {
        if loads[v] < 2 * inst.nodes[v].capacity {
            return false;
        }
        let re = inst.rank(v, e).expect("edge must be ranked at its endpoint");
        inst.nodes[v]
            .pref
            .iter()
            .enumerate()
            .all(|(rf, &f)| m.half[f] == 0 || rf <= re)
    };

    for (e, &h) in m.half.iter().enumerate() {
        if h >= 2 {
            continue;
        }
        let (u, v) = inst.edges[e].ends;
        if !dominates(u, e) && !dominates(v, e) {
            out.push(SfViolation::Blocking { edge: e });
        }
    }
    out
}

/// Nodes incident to an odd number of half-weight edges, or to more than
/// two. A stable half-matching has none: every node touches zero or exactly
/// two half-weight edges.
pub fn fractional_degree_violations(inst: &SfInstance, m: &HalfMatching) -> Vec<usize> {
    (0..inst.nodes.len())
        .filter(|&v| {
            let deg = inst.nodes[v]
                .pref
                .iter()
                .filter(|&&e| m.half[e] == 1)
                .count();
            deg != 0 && deg != 2
        })
        .collect()
}

/// Connected components of the half-weight edges, each as a sorted edge
/// list. For solver output these are disjoint odd cycles.
pub fn fractional_components(inst: &SfInstance, m: &HalfMatching) -> Vec<Vec<usize>> {
    let mut comp: Vec<Option<usize>> = vec![None; inst.edges.len()];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..inst.edges.len() {
        if m.half[start] != 1 || comp[start].is_some() {
            continue;
        }
        let id = components.len();
        let mut edges = vec![start];
        comp[start] = Some(id);
        let mut stack = vec![start];
        while let Some(e) = stack.pop() {
            let (u, v) = inst.edges[e].ends;
            for w in [u, v] {
                for &f in &inst.nodes[w].pref {
                    if m.half[f] == 1 && comp[f].is_none() {
                        comp[f] = Some(id);
                        edges.push(f);
                        stack.push(f);
                    }
                }
            }
        }
        edges.sort_unstable();
        components.push(edges);
    }
    components
}

/// Render an instance (and optionally a half-matching) in the text dump
/// format: `sfnode`, `sfedge` and `sfpref` lines, then one `w` line per
/// edge with weight `0`, `1/2` or `1`.
pub fn write_sf(inst: &SfInstance, m: Option<&HalfMatching>) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    for node in &inst.nodes {
        writeln!(s, "sfnode {} {}", node.name, node.capacity).unwrap();
    }
    for (ei, e) in inst.edges.iter().enumerate() {
        writeln!(
            s,
            "sfedge e{} {} {}",
            ei, inst.nodes[e.ends.0].name, inst.nodes[e.ends.1].name
        )
        .unwrap();
    }
    for node in &inst.nodes {
        write!(s, "sfpref {} :", node.name).unwrap();
        for &e in &node.pref {
            write!(s, " e{e}").unwrap();
        }
        s.push('\n');
    }
    if let Some(m) = m {
        for (ei, &h) in m.half.iter().enumerate() {
            let w = match h {
                0 => "0",
                1 => "1/2",
                _ => "1",
            };
            writeln!(s, "w e{ei} {w}").unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Triangle with unit capacities: the unique stable half-matching puts
    /// one half on every edge.
    fn triangle() -> SfInstance {
        let mut g = SfInstance::default();
        let a = g.add_node("a", 1);
        let b = g.add_node("b", 1);
        let c = g.add_node("c", 1);
        let ab = g.add_edge(a, b);
        let bc = g.add_edge(b, c);
        let ca = g.add_edge(c, a);
        g.nodes[a].pref = vec![ab, ca];
        g.nodes[b].pref = vec![bc, ab];
        g.nodes[c].pref = vec![ca, bc];
        g
    }

    #[test]
    fn half_weights_on_a_cycle_are_stable() {
        let g = triangle();
        let m = HalfMatching { half: vec![1, 1, 1] };
        assert!(sf_stability_check(&g, &m).is_empty());
        assert!(fractional_degree_violations(&g, &m).is_empty());
        assert_eq!(fractional_components(&g, &m), vec![vec![0, 1, 2]]);
        assert!(!m.is_integral());
    }

    #[test]
    fn no_integral_matching_on_the_triangle_is_stable() {
        let g = triangle();
        // Every integral matching leaves someone's favourite edge free.
        for half in [
            vec![0, 0, 0],
            vec![2, 0, 0],
            vec![0, 2, 0],
            vec![0, 0, 2],
        ] {
            let m = HalfMatching { half };
            assert!(!sf_stability_check(&g, &m).is_empty());
        }
    }

    #[test]
    fn overloads_are_reported_before_blocking() {
        let g = triangle();
        let m = HalfMatching { half: vec![2, 2, 0] };
        let violations = sf_stability_check(&g, &m);
        assert_eq!(violations, vec![SfViolation::Overloaded { node: 1, halves: 4 }]);
    }

    #[test]
    fn lone_half_edge_fails_the_degree_check() {
        let g = triangle();
        let m = HalfMatching { half: vec![1, 0, 0] };
        assert_eq!(fractional_degree_violations(&g, &m), vec![0, 1]);
    }

    #[test]
    fn dump_format() {
        let g = triangle();
        let m = HalfMatching { half: vec![2, 1, 0] };
        let text = write_sf(&g, Some(&m));
        assert!(text.contains("sfnode a 1\n"));
        assert!(text.contains("sfedge e0 a b\n"));
        assert!(text.contains("sfpref a : e0 e2\n"));
        assert!(text.contains("w e0 1\n"));
        assert!(text.contains("w e1 1/2\n"));
        assert!(text.contains("w e2 0\n"));
    }
}
