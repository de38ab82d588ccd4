//! Capacitated multigraphs with per-node edge rankings, and b-matchings on
//! them. Loops are allowed and consume two units of their node's capacity.

use super::ValidationIssue;
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MgNode {
    pub name: String,
    pub capacity: u32,
    /// Strict ranking over the node's incident edges (edge indices, best
    /// first). A loop appears once.
    pub pref: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MgEdge {
    pub name: String,
    pub ends: (usize, usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultigraphInstance {
    pub nodes: Vec<MgNode>,
    pub edges: Vec<MgEdge>,
}

impl MultigraphInstance {
    pub fn is_loop(&self, e: usize) -> bool {
        self.edges[e].ends.0 == self.edges[e].ends.1
    }

    /// Indices of edges incident to `v`, in edge-index order. A loop is
    /// reported once.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.ends.0 == v || e.ends.1 == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Position of edge `e` in `v`'s ranking (0 = best).
    pub fn rank(&self, v: usize, e: usize) -> Option<usize> {
        self.nodes[v].pref.iter().position(|&x| x == e)
    }

    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        for (vi, node) in self.nodes.iter().enumerate() {
            let incident: HashSet<usize> = self.incident(vi).into_iter().collect();
            let mut seen = HashSet::new();
            for &e in &node.pref {
                if e >= self.edges.len() || !incident.contains(&e) {
                    issues.push(ValidationIssue {
                        subject: node.name.clone(),
                        message: "ranks a non-incident edge".into(),
                    });
                } else if !seen.insert(e) {
                    issues.push(ValidationIssue {
                        subject: node.name.clone(),
                        message: format!("edge {} listed twice", self.edges[e].name),
                    });
                }
            }
            for &e in &incident {
                if !seen.contains(&e) {
                    issues.push(ValidationIssue {
                        subject: node.name.clone(),
                        message: format!("does not rank incident edge {}", self.edges[e].name),
                    });
                }
            }
        }
        issues.sort_by(|a, b| (&a.subject, &a.message).cmp(&(&b.subject, &b.message)));
        issues
    }
}

/// A subset of edges. Feasible when every node's load (loops counting twice)
/// is within its capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultigraphMatching {
    pub chosen: Vec<bool>,
}

impl MultigraphMatching {
    pub fn empty(inst: &MultigraphInstance) -> Self {
        MultigraphMatching {
            chosen: vec![false; inst.edges.len()],
        }
    }

    pub fn loads(&self, inst: &MultigraphInstance) -> Vec<u32> {
        let mut loads = vec![0u32; inst.nodes.len()];
        for (e, &on) in self.chosen.iter().enumerate() {
            if on {
                let (u, v) = inst.edges[e].ends;
                loads[u] += 1;
                loads[v] += 1;
            }
        }
        loads
    }

    pub fn is_feasible(&self, inst: &MultigraphInstance) -> bool {
        self.loads(inst)
            .iter()
            .zip(&inst.nodes)
            .all(|(&l, n)| l <= n.capacity)
    }

    /// Chosen edges incident to `v`; a chosen loop appears once.
    pub fn at_node(&self, inst: &MultigraphInstance, v: usize) -> Vec<usize> {
        inst.incident(v)
            .into_iter()
            .filter(|&e| self.chosen[e])
            .collect()
    }
}
