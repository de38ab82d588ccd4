//! Couple classification.
//!
//! A couple's joint list is *responsive-compatible* ("sub-responsive") when
//! each member admits a strict order over its own slot values such that
//! improving one member's slot while the other stays put always improves the
//! joint entry. It is *product-shaped* ("sub-complete") when the joint list
//! contains every combination of the two members' observed slot values
//! (except both-unmatched). Couples with both properties subdivide further
//! by how the members' hospital sets interact; those subclasses drive which
//! reduction gadget applies.

use super::{CoupleId, HospitalId, HrcInstance, Slot};
use std::collections::{HashMap, HashSet};

/// Whether members can be employed while their partner stays unmatched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepClass {
    /// Either member can be matched alone.
    Separable,
    /// Only member `employed` can be matched alone.
    HalfSeparable { employed: usize },
    /// The members are matched together or not at all.
    Connected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoupleType {
    /// The members' hospital sets are disjoint.
    A,
    /// Connected, exactly one shared hospital `h`, and the member that `h`
    /// ranks worse applies only to `h`.
    B,
    /// Connected, exactly one shared hospital `h`, and `h` is each member's
    /// last choice.
    C,
    /// Anything else (including couples that are not sub-responsive or not
    /// sub-complete).
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupleProfile {
    pub sub_responsive: bool,
    pub sub_complete: bool,
    pub sep_class: SepClass,
    pub couple_type: CoupleType,
    /// Witness order over member 0's slot values, best first. Empty when the
    /// couple is not sub-responsive. For sub-complete couples this order is
    /// forced; otherwise incomparable values are broken by hospital index
    /// with "unmatched" last.
    pub order_first: Vec<Slot>,
    /// Witness order for member 1.
    pub order_second: Vec<Slot>,
    /// The shared hospital, when the members share exactly one.
    pub common: Option<HospitalId>,
    /// For types B and C: true when member 1 is the member the shared
    /// hospital ranks worse, i.e. gadget constructions that want the worse
    /// member first should swap the pair.
    pub swap_for_gadget: bool,
}

/// Distinct slot values of one member, in order of first appearance.
fn domain(inst: &HrcInstance, c: CoupleId, side: usize) -> Vec<Slot> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for e in &inst.couples[c].joint {
        let v = if side == 0 { e.0 } else { e.1 };
        if seen.insert(v) {
            out.push(v);
        }
    }
    out
}

/// Witness order for one member: topological order of the constraints forced
/// by joint entries that share the other member's slot. `None` if the
/// constraints are cyclic (not sub-responsive).
fn witness_order(inst: &HrcInstance, c: CoupleId, side: usize) -> Option<Vec<Slot>> {
    let dom = domain(inst, c, side);
    let index: HashMap<Slot, usize> = dom.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let joint = &inst.couples[c].joint;

    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    for i in 0..joint.len() {
        for j in (i + 1)..joint.len() {
            let (a, b) = (joint[i], joint[j]);
            let (own_i, own_j, other_i, other_j) = if side == 0 {
                (a.0, b.0, a.1, b.1)
            } else {
                (a.1, b.1, a.0, b.0)
            };
            if other_i == other_j && own_i != own_j {
                edges.insert((index[&own_i], index[&own_j]));
            }
        }
    }

    let n = dom.len();
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &edges {
        indeg[v] += 1;
        out[u].push(v);
    }

    let mut order = Vec::with_capacity(n);
    let mut avail: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while !avail.is_empty() {
        // Most-preferred remaining value next; break ties by hospital index
        // with "unmatched" last.
        let pick_pos = avail
            .iter()
            .enumerate()
            .min_by_key(|&(_, &v)| match dom[v] {
                Some(h) => (0, h),
                None => (1, 0),
            })
            .map(|(pos, _)| pos)
            .unwrap();
        let v = avail.swap_remove(pick_pos);
        order.push(dom[v]);
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                avail.push(w);
            }
        }
    }
    if order.len() == n {
        Some(order)
    } else {
        None
    }
}

pub fn classify_couple(inst: &HrcInstance, c: CoupleId) -> CoupleProfile {
    let joint = &inst.couples[c].joint;
    let d0 = domain(inst, c, 0);
    let d1 = domain(inst, c, 1);

    let w0 = witness_order(inst, c, 0);
    let w1 = witness_order(inst, c, 1);
    let sub_responsive = w0.is_some() && w1.is_some();
    let order_first = w0.unwrap_or_default();
    let order_second = w1.unwrap_or_default();

    let both_null = d0.contains(&None) && d1.contains(&None);
    let expected = d0.len() * d1.len() - usize::from(both_null);
    let entry_set: HashSet<(Slot, Slot)> = joint.iter().copied().collect();
    let sub_complete = entry_set.len() == joint.len() && joint.len() == expected && {
        d0.iter().all(|&a| {
            d1.iter()
                .all(|&b| (a.is_none() && b.is_none()) || entry_set.contains(&(a, b)))
        })
    };

    let sep_class = match (d0.contains(&None), d1.contains(&None)) {
        (true, true) => SepClass::Separable,
        (true, false) => SepClass::HalfSeparable { employed: 1 },
        (false, true) => SepClass::HalfSeparable { employed: 0 },
        (false, false) => SepClass::Connected,
    };

    let h0: HashSet<HospitalId> = d0.iter().filter_map(|&v| v).collect();
    let h1: HashSet<HospitalId> = d1.iter().filter_map(|&v| v).collect();
    let mut shared: Vec<HospitalId> = h0.intersection(&h1).copied().collect();
    shared.sort_unstable();
    let common = if shared.len() == 1 {
        Some(shared[0])
    } else {
        None
    };

    let mut couple_type = CoupleType::Other;
    let mut swap_for_gadget = false;
    if sub_responsive && sub_complete {
        if shared.is_empty() {
            couple_type = CoupleType::A;
        } else if sep_class == SepClass::Connected && shared.len() == 1 {
            let h = shared[0];
            let [m0, m1] = inst.couples[c].members;
            let rank = |d| inst.hospitals[h].pref.iter().position(|&x| x == d);
            if let (Some(r0), Some(r1)) = (rank(m0), rank(m1)) {
                let worse_side = usize::from(r1 > r0);
                let worse_set = if worse_side == 0 { &h0 } else { &h1 };
                let last_0 = order_first.last() == Some(&Some(h));
                let last_1 = order_second.last() == Some(&Some(h));
                if worse_set.len() == 1 {
                    couple_type = CoupleType::B;
                    swap_for_gadget = worse_side == 1;
                } else if last_0 && last_1 {
                    couple_type = CoupleType::C;
                    swap_for_gadget = worse_side == 1;
                }
            }
        }
    }

    CoupleProfile {
        sub_responsive,
        sub_complete,
        sep_class,
        couple_type,
        order_first,
        order_second,
        common,
        swap_for_gadget,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Couple, Doctor, DoctorRole, Hospital};

    /// Two hospitals, one couple with the given joint list. Hospital 1
    /// ranks the members in the order given by `h1_pref_sides`.
    fn couple_inst(joint: Vec<(Slot, Slot)>, h1_pref_sides: &[usize]) -> HrcInstance {
        let mut inst = HrcInstance {
            doctors: vec![
                Doctor {
                    name: "c1".into(),
                    role: DoctorRole::Member { couple: 0, side: 0 },
                },
                Doctor {
                    name: "c2".into(),
                    role: DoctorRole::Member { couple: 0, side: 1 },
                },
            ],
            couples: vec![Couple {
                members: [0, 1],
                joint,
            }],
            hospitals: vec![
                Hospital {
                    name: "g".into(),
                    capacity: 1,
                    pref: Vec::new(),
                },
                Hospital {
                    name: "h".into(),
                    capacity: 1,
                    pref: Vec::new(),
                },
            ],
        };
        inst.hospitals[0].pref = (0..2)
            .filter(|&s| inst.member_projection(0, s).contains(&0))
            .collect();
        inst.hospitals[1].pref = h1_pref_sides
            .iter()
            .copied()
            .filter(|&s| inst.member_projection(0, s).contains(&1))
            .collect();
        inst
    }

    #[test]
    fn separable_product_couple_is_type_a() {
        // Member 0 applies to g, member 1 to h, full product shape.
        let inst = couple_inst(
            vec![
                (Some(0), Some(1)),
                (Some(0), None),
                (None, Some(1)),
            ],
            &[1],
        );
        let p = classify_couple(&inst, 0);
        assert!(p.sub_responsive && p.sub_complete);
        assert_eq!(p.sep_class, SepClass::Separable);
        assert_eq!(p.couple_type, CoupleType::A);
        assert_eq!(p.order_first, vec![Some(0), None]);
        assert_eq!(p.order_second, vec![Some(1), None]);
    }

    #[test]
    fn single_shared_pair_is_type_b() {
        let inst = couple_inst(vec![(Some(1), Some(1))], &[0, 1]);
        let p = classify_couple(&inst, 0);
        assert_eq!(p.sep_class, SepClass::Connected);
        assert_eq!(p.couple_type, CoupleType::B);
        assert_eq!(p.common, Some(1));
        assert!(p.swap_for_gadget, "member 1 is ranked worse by h");
    }

    #[test]
    fn shared_last_choice_is_type_c() {
        // Member 0: g then h; member 1: only h. If h prefers member 1, the
        // worse member (0) has two hospitals, so not type B; h is last on
        // both witness orders, so type C.
        let inst = couple_inst(vec![(Some(0), Some(1)), (Some(1), Some(1))], &[1, 0]);
        let p = classify_couple(&inst, 0);
        assert_eq!(p.couple_type, CoupleType::C);
        assert_eq!(p.order_first, vec![Some(0), Some(1)]);
        assert!(!p.swap_for_gadget, "member 0 is ranked worse by h");

        // Same couple, but h prefers member 0: the worse member (1) applies
        // only to h, so type B wins.
        let inst = couple_inst(vec![(Some(0), Some(1)), (Some(1), Some(1))], &[0, 1]);
        let p = classify_couple(&inst, 0);
        assert_eq!(p.couple_type, CoupleType::B);
        assert!(p.swap_for_gadget);
    }

    #[test]
    fn conflicting_orders_are_not_sub_responsive() {
        // (g,g) > (h,g) forces g > h for member 0; (h,h) > (g,h) forces the
        // opposite.
        let inst = couple_inst(
            vec![
                (Some(0), Some(0)),
                (Some(1), Some(0)),
                (Some(1), Some(1)),
                (Some(0), Some(1)),
            ],
            &[0, 1],
        );
        let p = classify_couple(&inst, 0);
        assert!(!p.sub_responsive);
        assert!(p.sub_complete);
        assert_eq!(p.couple_type, CoupleType::Other);
    }

    #[test]
    fn missing_combination_is_not_sub_complete() {
        let inst = couple_inst(vec![(Some(0), Some(0)), (Some(1), Some(1))], &[0, 1]);
        let p = classify_couple(&inst, 0);
        assert!(p.sub_responsive);
        assert!(!p.sub_complete);
        assert_eq!(p.couple_type, CoupleType::Other);
    }
}
