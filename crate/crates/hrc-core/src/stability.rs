//! Feasibility and stability checking for matchings, plus the blocking-edge
//! test for multigraph b-matchings.
//!
//! Feasibility problems (capacity overruns, off-list assignments) are
//! reported as typed records and are never conflated with blocking pairs.
//! Blocking is evaluated against the matching's own capacity vector, so
//! near-feasible outcomes are judged under their adjusted capacities.

use crate::model::{
    CoupleId, DoctorId, DoctorRole, HospitalId, HrcInstance, HrcMatching, MultigraphInstance,
    MultigraphMatching, Slot,
};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityError {
    /// A single doctor is assigned to a hospital not on their list.
    UnacceptableAssignment { doctor: DoctorId, hospital: HospitalId },
    /// A couple occupies a slot pair that is neither on its joint list nor
    /// both-unmatched.
    JointUnlisted { couple: CoupleId, slots: (Slot, Slot) },
    /// More doctors assigned to a hospital than its (effective) capacity.
    Oversubscribed { hospital: HospitalId, load: u32, capacity: u32 },
}

/// Which clause of the blocking definition fired for a couple's entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoupleCase {
    /// First member stays put, second moves.
    StayFirst,
    /// Second member stays put, first moves.
    StaySecond,
    /// Both move, to different slots.
    MoveApart,
    /// Both move to one hospital with two free posts.
    TogetherSpare,
    /// Both move to one hospital with one free post, displacing somebody
    /// worse than either member.
    TogetherOneFree,
    /// Both move to a full hospital, displacing two distinct assignees.
    TogetherFull,
}

impl CoupleCase {
    pub fn label(self) -> &'static str {
        match self {
            CoupleCase::StayFirst => "2a",
            CoupleCase::StaySecond => "2b",
            CoupleCase::MoveApart => "3a",
            CoupleCase::TogetherSpare => "3b",
            CoupleCase::TogetherOneFree => "3c",
            CoupleCase::TogetherFull => "3d",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockingPair {
    /// A single doctor and a hospital they prefer that would admit them.
    Single { doctor: DoctorId, hospital: HospitalId },
    /// A couple and a joint entry they prefer that the hospitals would
    /// accept, labelled with the first clause that applies.
    Couple { couple: CoupleId, slots: (Slot, Slot), case: CoupleCase },
}

impl BlockingPair {
    pub fn label(&self) -> &'static str {
        match self {
            BlockingPair::Single { .. } => "1",
            BlockingPair::Couple { case, .. } => case.label(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub feasibility: Vec<FeasibilityError>,
    pub blocking: Vec<BlockingPair>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.feasibility.is_empty() && self.blocking.is_empty()
    }
}

/// Maximum absolute difference between the matching's capacity vector and
/// the instance's declared capacities.
pub fn capacity_deviation(inst: &HrcInstance, m: &HrcMatching) -> u32 {
    inst.hospitals
        .iter()
        .zip(&m.capacities)
        .map(|(h, &q)| h.capacity.abs_diff(q))
        .max()
        .unwrap_or(0)
}

pub fn check_feasibility(inst: &HrcInstance, m: &HrcMatching) -> Vec<FeasibilityError> {
    let mut errors = Vec::new();

    for (d, doctor) in inst.doctors.iter().enumerate() {
        if let DoctorRole::Single { pref } = &doctor.role {
            if let Some(h) = m.assignment[d] {
                if !pref.contains(&h) {
                    errors.push(FeasibilityError::UnacceptableAssignment {
                        doctor: d,
                        hospital: h,
                    });
                }
            }
        }
    }

    for (c, couple) in inst.couples.iter().enumerate() {
        let slots = m.couple_slots(inst, c);
        if slots != (None, None) && !couple.joint.contains(&slots) {
            errors.push(FeasibilityError::JointUnlisted { couple: c, slots });
        }
    }

    let loads = m.loads(inst);
    for (h, &load) in loads.iter().enumerate() {
        if load > m.capacities[h] {
            errors.push(FeasibilityError::Oversubscribed {
                hospital: h,
                load,
                capacity: m.capacities[h],
            });
        }
    }

    errors
}

struct Ctx<'a> {
    m: &'a HrcMatching,
    loads: Vec<u32>,
    ranks: Vec<HashMap<DoctorId, u32>>,
    assignees: Vec<Vec<DoctorId>>,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a HrcInstance, m: &'a HrcMatching) -> Self {
        let loads = m.loads(inst);
        let ranks = inst.hospital_ranks();
        let mut assignees = vec![Vec::new(); inst.hospitals.len()];
        for (d, slot) in m.assignment.iter().enumerate() {
            if let Some(h) = *slot {
                assignees[h].push(d);
            }
        }
        Ctx {
            m,
            loads,
            ranks,
            assignees,
        }
    }

    /// An unmatched slot always has room; a hospital has room below its
    /// effective capacity.
    fn undersub(&self, slot: Slot) -> bool {
        match slot {
            None => true,
            Some(h) => self.loads[h] < self.m.capacities[h],
        }
    }

    /// Does hospital `h` strictly prefer `d` to `victim`?
    fn beats(&self, h: HospitalId, d: DoctorId, victim: DoctorId) -> bool {
        match self.ranks[h].get(&d) {
            Some(&rd) => rd < self.ranks[h].get(&victim).copied().unwrap_or(u32::MAX),
            None => false,
        }
    }

    /// Would `slot` admit doctor `d`, either through a free post or by
    /// preferring `d` to some assignee outside `excluded`?
    fn admits(&self, slot: Slot, d: DoctorId, excluded: &[DoctorId]) -> bool {
        if self.undersub(slot) {
            return true;
        }
        let h = slot.expect("undersub is always true for the unmatched slot");
        self.assignees[h]
            .iter()
            .any(|&r| !excluded.contains(&r) && self.beats(h, d, r))
    }
}

pub fn hrc_blocking_pairs(inst: &HrcInstance, m: &HrcMatching) -> Vec<BlockingPair> {
    let ctx = Ctx::new(inst, m);
    let mut out = Vec::new();

    for (d, doctor) in inst.doctors.iter().enumerate() {
        if let DoctorRole::Single { pref } = &doctor.role {
            let cur = m.assignment[d]
                .and_then(|h| pref.iter().position(|&x| x == h))
                .unwrap_or(usize::MAX);
            for (r, &h) in pref.iter().enumerate() {
                if r >= cur {
                    break;
                }
                if ctx.admits(Some(h), d, &[]) {
                    out.push(BlockingPair::Single { doctor: d, hospital: h });
                }
            }
        }
    }

    for (c, couple) in inst.couples.iter().enumerate() {
        let [m0, m1] = couple.members;
        let cur = m.couple_slots(inst, c);
        let cur_rank = if cur == (None, None) {
            usize::MAX
        } else {
            HrcMatching::joint_rank(inst, c, cur).unwrap_or(usize::MAX)
        };
        for (r, &(hj, hk)) in couple.joint.iter().enumerate() {
            if r >= cur_rank {
                break;
            }
            let case = couple_entry_case(&ctx, (m0, m1), cur, (hj, hk));
            if let Some(case) = case {
                out.push(BlockingPair::Couple {
                    couple: c,
                    slots: (hj, hk),
                    case,
                });
            }
        }
    }

    out
}

/// Apply the couple clauses in order and return the first that fires.
fn couple_entry_case(
    ctx: &Ctx<'_>,
    (m0, m1): (DoctorId, DoctorId),
    cur: (Slot, Slot),
    (hj, hk): (Slot, Slot),
) -> Option<CoupleCase> {
    if hj == cur.0 {
        // First member stays; the second's target must admit them, never
        // counting the staying partner as a displacement victim.
        if ctx.admits(hk, m1, &[m0]) {
            return Some(CoupleCase::StayFirst);
        }
        return None;
    }
    if hk == cur.1 {
        if ctx.admits(hj, m0, &[m1]) {
            return Some(CoupleCase::StaySecond);
        }
        return None;
    }
    // Both members move.
    if hj != hk {
        if ctx.admits(hj, m0, &[]) && ctx.admits(hk, m1, &[]) {
            return Some(CoupleCase::MoveApart);
        }
        return None;
    }
    // Both move to the same hospital (both-unmatched is never a joint entry).
    let h = hj.expect("identical slots cannot both be unmatched");
    let free = ctx.m.capacities[h].saturating_sub(ctx.loads[h]);
    if free >= 2 {
        return Some(CoupleCase::TogetherSpare);
    }
    if free == 1 {
        if ctx.assignees[h]
            .iter()
            .any(|&rt| ctx.beats(h, m0, rt) || ctx.beats(h, m1, rt))
        {
            return Some(CoupleCase::TogetherOneFree);
        }
        return None;
    }
    let v0: Vec<DoctorId> = ctx.assignees[h]
        .iter()
        .copied()
        .filter(|&rs| ctx.beats(h, m0, rs))
        .collect();
    let v1: Vec<DoctorId> = ctx.assignees[h]
        .iter()
        .copied()
        .filter(|&rt| ctx.beats(h, m1, rt))
        .collect();
    let distinct_pair = !v0.is_empty()
        && !v1.is_empty()
        && !(v0.len() == 1 && v1.len() == 1 && v0[0] == v1[0]);
    if distinct_pair {
        return Some(CoupleCase::TogetherFull);
    }
    None
}

pub fn check_stability(inst: &HrcInstance, m: &HrcMatching) -> StabilityReport {
    StabilityReport {
        feasibility: check_feasibility(inst, m),
        blocking: hrc_blocking_pairs(inst, m),
    }
}

/// A blocking edge in a multigraph b-matching, labelled with the first
/// clause that applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MgBlockingEdge {
    pub edge: usize,
    pub clause: u8,
}

/// Blocking edges of a b-matching. An unmatched edge blocks when both
/// endpoints would take it: a non-loop needs each endpoint free or holding a
/// worse edge (clause 1); a loop needs two free units (2), one free unit
/// plus a worse matched edge (3), a worse matched loop (4), or two distinct
/// worse matched edges (5).
pub fn multigraph_blocking_edges(
    g: &MultigraphInstance,
    m: &MultigraphMatching,
) -> Vec<MgBlockingEdge> {
    let loads = m.loads(g);
    let better = |v: usize, e: usize, f: usize| {
        g.rank(v, e).unwrap_or(usize::MAX) < g.rank(v, f).unwrap_or(usize::MAX)
    };

    let mut out = Vec::new();
    for (e, edge) in g.edges.iter().enumerate() {
        if m.chosen[e] {
            continue;
        }
        let (u, v) = edge.ends;
        if u != v {
            let side_ok = |x: usize| {
                loads[x] < g.nodes[x].capacity
                    || m.at_node(g, x).iter().any(|&f| better(x, e, f))
            };
            if side_ok(u) && side_ok(v) {
                out.push(MgBlockingEdge { edge: e, clause: 1 });
            }
            continue;
        }
        let free = g.nodes[v].capacity.saturating_sub(loads[v]);
        let matched: Vec<usize> = m.at_node(g, v);
        let worse: Vec<usize> = matched.iter().copied().filter(|&f| better(v, e, f)).collect();
        let clause = if free >= 2 {
            Some(2)
        } else if free == 1 && !worse.is_empty() {
            Some(3)
        } else if worse.iter().any(|&f| g.is_loop(f)) {
            Some(4)
        } else if worse.len() >= 2 {
            Some(5)
        } else {
            None
        };
        if let Some(clause) = clause {
            out.push(MgBlockingEdge { edge: e, clause });
        }
    }
    out
}
