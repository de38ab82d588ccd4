//! Stable marriage with strict men and possibly-tied women.

use super::ValidationIssue;
use std::collections::HashSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtiMan {
    pub name: String,
    /// Strict list of women, best first.
    pub pref: Vec<usize>,
}

/// A woman's list: groups in decreasing preference, each group either a
/// single man or a tie of two or more men.
pub type WomanList = Vec<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtiWoman {
    pub name: String,
    pub pref: WomanList,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SmtiInstance {
    pub men: Vec<SmtiMan>,
    pub women: Vec<SmtiWoman>,
    /// Optional global order over all men (used as a tie-break by
    /// downstream constructions).
    pub man_order: Option<Vec<usize>>,
}

impl SmtiInstance {
    /// Group index of `m` in `w`'s list (0 = best group).
    pub fn woman_rank(&self, w: usize, m: usize) -> Option<usize> {
        self.women[w]
            .pref
            .iter()
            .position(|g| g.contains(&m))
    }

    pub fn man_rank(&self, m: usize, w: usize) -> Option<usize> {
        self.men[m].pref.iter().position(|&x| x == w)
    }

    /// Mutual-acceptability validation: a man lists a woman exactly when she
    /// lists him, and nobody appears twice in one list.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        let mut listed_by_man: Vec<HashSet<usize>> = Vec::new();
        for man in &self.men {
            let mut seen = HashSet::new();
            for &w in &man.pref {
                if !seen.insert(w) {
                    issues.push(ValidationIssue {
                        subject: man.name.clone(),
                        message: format!("woman {} listed twice", self.women[w].name),
                    });
                }
            }
            listed_by_man.push(seen);
        }
        for (wi, woman) in self.women.iter().enumerate() {
            let mut seen = HashSet::new();
            for group in &woman.pref {
                for &m in group {
                    if !seen.insert(m) {
                        issues.push(ValidationIssue {
                            subject: woman.name.clone(),
                            message: format!("man {} listed twice", self.men[m].name),
                        });
                    }
                    if !listed_by_man[m].contains(&wi) {
                        issues.push(ValidationIssue {
                            subject: woman.name.clone(),
                            message: format!(
                                "lists man {} who does not list her",
                                self.men[m].name
                            ),
                        });
                    }
                }
            }
            for (mi, listed) in listed_by_man.iter().enumerate() {
                if listed.contains(&wi) && !seen.contains(&mi) {
                    issues.push(ValidationIssue {
                        subject: woman.name.clone(),
                        message: format!("does not list man {}", self.men[mi].name),
                    });
                }
            }
        }
        issues.sort_by(|a, b| (&a.subject, &a.message).cmp(&(&b.subject, &b.message)));
        issues
    }
}
