//! Dual-market detection.
//!
//! A market is *dual* when the hospitals split into two sides such that
//! every couple's first member applies only to side-1 hospitals, every
//! second member only to side 2, and each single's whole list stays within
//! one side. Couples force colours directly; singles only tie hospitals
//! together, so they are handled with a union-find over their lists.

use super::{DoctorRole, HrcInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualMarket {
    /// 1 or 2 per hospital. Hospitals constrained by nobody default to 1.
    pub hospital_side: Vec<u8>,
    /// 1 or 2 per doctor: couple members by position, singles by the side
    /// their list lives on.
    pub doctor_side: Vec<u8>,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Classify the market as dual, returning the side assignment, or `None`
/// when no valid split exists.
pub fn detect_dual_market(inst: &HrcInstance) -> Option<DualMarket> {
    let nh = inst.hospitals.len();
    let mut forced: Vec<Option<u8>> = vec![None; nh];
    let mut dsu = Dsu::new(nh);

    for c in 0..inst.couples.len() {
        for side in 0..2 {
            let colour = side as u8 + 1;
            for h in inst.member_projection(c, side) {
                match forced[h] {
                    Some(prev) if prev != colour => return None,
                    _ => forced[h] = Some(colour),
                }
            }
        }
    }

    for d in &inst.doctors {
        if let DoctorRole::Single { pref } = &d.role {
            for w in pref.windows(2) {
                dsu.union(w[0], w[1]);
            }
        }
    }

    // Colour per union-find component: any forced colour inside wins; a
    // clash means the split fails.
    let mut component_colour: Vec<Option<u8>> = vec![None; nh];
    for h in 0..nh {
        if let Some(colour) = forced[h] {
            let root = dsu.find(h);
            match component_colour[root] {
                Some(prev) if prev != colour => return None,
                _ => component_colour[root] = Some(colour),
            }
        }
    }

    let mut hospital_side = vec![1u8; nh];
    for h in 0..nh {
        let root = dsu.find(h);
        hospital_side[h] = component_colour[root].unwrap_or(1);
    }

    let doctor_side = inst
        .doctors
        .iter()
        .map(|d| match &d.role {
            DoctorRole::Single { pref } => pref
                .first()
                .map(|&h| hospital_side[h])
                .unwrap_or(1),
            DoctorRole::Member { side, .. } => *side as u8 + 1,
        })
        .collect();

    Some(DualMarket {
        hospital_side,
        doctor_side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_hrc;

    #[test]
    fn split_market_is_detected() {
        let inst = parse_hrc(
            "\
hospital x 1
hospital y 1
hospital z 1
single s : x z
couple c1 c2 : x,y z,y
hpref x : s c1
hpref y : c2
hpref z : s c1
",
        )
        .unwrap();
        let dual = detect_dual_market(&inst).unwrap();
        assert_eq!(dual.hospital_side, vec![1, 2, 1]);
        assert_eq!(dual.doctor_side, vec![1, 1, 2]);
    }

    #[test]
    fn couple_straddling_sides_is_rejected() {
        let inst = parse_hrc(
            "\
hospital x 1
hospital y 1
couple c1 c2 : x,y y,x
hpref x : c1 c2
hpref y : c2 c1
",
        )
        .unwrap();
        assert!(detect_dual_market(&inst).is_none());
    }

    #[test]
    fn single_bridging_sides_is_rejected() {
        let inst = parse_hrc(
            "\
hospital x 1
hospital y 1
single s : x y
couple c1 c2 : x,y
hpref x : s c1
hpref y : s c2
",
        )
        .unwrap();
        assert!(detect_dual_market(&inst).is_none());
    }
}
