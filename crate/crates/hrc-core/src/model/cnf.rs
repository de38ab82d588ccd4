//! Boolean formulas in conjunctive normal form, plus the shape check for
//! the restricted class consumed by the SAT-based instance generator:
//! every clause has exactly three distinct literals and every variable
//! occurs exactly twice positively and twice negatively.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Lit {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause {clause} has {len} literals, expected exactly 3")]
    NotThreeLiterals { clause: usize, len: usize },
    #[error("clause {clause} mentions variable {var} twice")]
    RepeatedVariable { clause: usize, var: usize },
    #[error("variable {var} occurs {pos} times positively and {neg} negatively, expected 2 and 2")]
    OccurrenceCount { var: usize, pos: usize, neg: usize },
}

impl CnfFormula {
    /// Check the (2,2)-occurrence exact-3-SAT shape.
    pub fn check_e3_22(&self) -> Result<(), CnfError> {
        let mut pos = vec![0usize; self.num_vars];
        let mut neg = vec![0usize; self.num_vars];
        for (ci, clause) in self.clauses.iter().enumerate() {
            if clause.len() != 3 {
                return Err(CnfError::NotThreeLiterals {
                    clause: ci,
                    len: clause.len(),
                });
            }
            for (i, lit) in clause.iter().enumerate() {
                if clause[..i].iter().any(|l| l.var == lit.var) {
                    return Err(CnfError::RepeatedVariable {
                        clause: ci,
                        var: lit.var,
                    });
                }
                if lit.positive {
                    pos[lit.var] += 1;
                } else {
                    neg[lit.var] += 1;
                }
            }
        }
        for var in 0..self.num_vars {
            if pos[var] != 2 || neg[var] != 2 {
                return Err(CnfError::OccurrenceCount {
                    var,
                    pos: pos[var],
                    neg: neg[var],
                });
            }
        }
        Ok(())
    }

    /// True when `assignment` satisfies every clause.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|l| assignment[l.var] == l.positive)
        })
    }
}
