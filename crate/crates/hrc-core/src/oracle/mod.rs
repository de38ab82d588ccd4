//! Brute-force ground truth at desk scale.
//!
//! Everything in this module decides stability by scanning the original
//! preference lists directly. It shares no helper code with the checker in
//! [`crate::stability`] and nothing with the reduction pipeline, so when the
//! two routes agree on a corpus that is evidence, not tautology.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::model::{CoupleId, DoctorId, DoctorRole, HospitalId, HrcInstance, HrcMatching, Slot};

pub mod mg_brute;
pub mod sf_brute;
pub mod smti_brute;

/// Why a brute-force search gave up.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
    #[error("search deadline of {millis} ms passed after {nodes} nodes")]
    DeadlinePassed { millis: u64, nodes: u64 },
}

/// Hard limits for a brute-force search. The node budget keeps runs
/// deterministic; the optional deadline is a safety net for interactive use.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_millis: Option<u64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 20_000_000,
            max_millis: None,
        }
    }
}

/// Counters reported back from a finished search.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub millis: u128,
}

/// Combined output of one oracle run over an instance.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub stable_matchings: Vec<HrcMatching>,
    pub min_bp_value: u64,
    pub min_bp_witness: HrcMatching,
    pub stats: SearchStats,
}

/// Result of checking the three persistence clauses across all stable
/// matchings: (i) the same single doctors are matched everywhere, (ii) every
/// hospital fills the same number of posts everywhere, and (iii) a hospital
/// undersubscribed in one stable matching has identical assignees in all.
#[derive(Debug, Clone)]
pub struct RuralReport {
    pub stable_count: usize,
    pub i_holds: bool,
    pub ii_holds: bool,
    pub iii_holds: bool,
    pub details: Vec<String>,
}

impl RuralReport {
    pub fn all_hold(&self) -> bool {
        self.i_holds && self.ii_holds && self.iii_holds
    }
}

// ---------------------------------------------------------------------------
// Backtracking search over per-unit choices
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Unit {
    Single(DoctorId),
    Couple(CoupleId),
}

struct Search<'a> {
    inst: &'a HrcInstance,
    units: Vec<Unit>,
    assignment: Vec<Slot>,
    loads: Vec<u32>,
    nodes: u64,
    leaves: u64,
    budget: SearchBudget,
    started: Instant,
}

impl<'a> Search<'a> {
    fn new(inst: &'a HrcInstance, budget: SearchBudget) -> Self {
        let mut units = Vec::new();
        for (i, _) in inst.couples.iter().enumerate() {
            units.push(Unit::Couple(i));
        }
        for (d, doc) in inst.doctors.iter().enumerate() {
            if matches!(doc.role, DoctorRole::Single { .. }) {
                units.push(Unit::Single(d));
            }
        }
        // Fail-first: place the most constrained units (fewest choices)
        // early so capacity pruning bites as soon as possible.
        units.sort_by_key(|u| match *u {
            Unit::Couple(i) => (inst.couples[i].joint.len() + 1, 0, i),
            Unit::Single(d) => match &inst.doctors[d].role {
                DoctorRole::Single { pref } => (pref.len() + 1, 1, d),
                DoctorRole::Member { .. } => unreachable!(),
            },
        });
        Search {
            inst,
            units,
            assignment: vec![None; inst.doctors.len()],
            loads: vec![0; inst.hospitals.len()],
            nodes: 0,
            leaves: 0,
            budget,
            started: Instant::now(),
        }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(OracleError::BudgetExhausted { nodes: self.nodes });
        }
        if let Some(ms) = self.budget.max_millis {
            if self.nodes % 8192 == 0 && self.started.elapsed().as_millis() as u64 > ms {
                return Err(OracleError::DeadlinePassed {
                    millis: ms,
                    nodes: self.nodes,
                });
            }
        }
        Ok(())
    }

    fn room(&self, slot: Slot, extra: u32) -> bool {
        match slot {
            None => true,
            Some(h) => self.loads[h] + extra <= self.inst.hospitals[h].capacity,
        }
    }

    fn place(&mut self, d: DoctorId, slot: Slot) {
        self.assignment[d] = slot;
        if let Some(h) = slot {
            self.loads[h] += 1;
        }
    }

    fn unplace(&mut self, d: DoctorId) {
        if let Some(h) = self.assignment[d] {
            self.loads[h] -= 1;
        }
        self.assignment[d] = None;
    }

    /// Walks every feasible matching, invoking `visit` at each leaf.
    /// `visit` returns `false` to stop the whole search early.
    fn walk(
        &mut self,
        depth: usize,
        visit: &mut dyn FnMut(&HrcInstance, &[Slot], &[u32]) -> bool,
    ) -> Result<bool, OracleError> {
        self.tick()?;
        if depth == self.units.len() {
            self.leaves += 1;
            return Ok(visit(self.inst, &self.assignment, &self.loads));
        }
        match self.units[depth] {
            Unit::Single(d) => {
                let pref = match &self.inst.doctors[d].role {
                    DoctorRole::Single { pref } => pref.clone(),
                    DoctorRole::Member { .. } => unreachable!(),
                };
                for h in pref {
                    if self.room(Some(h), 1) {
                        self.place(d, Some(h));
                        let go_on = self.walk(depth + 1, visit)?;
                        self.unplace(d);
                        if !go_on {
                            return Ok(false);
                        }
                    }
                }
                // Staying unmatched is always feasible for a single doctor.
                if !self.walk(depth + 1, visit)? {
                    return Ok(false);
                }
            }
            Unit::Couple(i) => {
                let couple = self.inst.couples[i].clone();
                let [m0, m1] = couple.members;
                for &(a, b) in &couple.joint {
                    let fits = if a.is_some() && a == b {
                        self.room(a, 2)
                    } else {
                        self.room(a, 1) && self.room(b, 1)
                    };
                    if !fits {
                        continue;
                    }
                    self.place(m0, a);
                    self.place(m1, b);
                    let go_on = self.walk(depth + 1, visit)?;
                    self.unplace(m1);
                    self.unplace(m0);
                    if !go_on {
                        return Ok(false);
                    }
                }
                // Both unmatched: the fallback every couple always has.
                if !self.walk(depth + 1, visit)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn stats(&self) -> SearchStats {
        SearchStats {
            nodes: self.nodes,
            leaves: self.leaves,
            millis: self.started.elapsed().as_millis(),
        }
    }
}

// ---------------------------------------------------------------------------
// Blocking predicate, written against the raw preference lists
// ---------------------------------------------------------------------------

fn hosp_pos(inst: &HrcInstance, h: HospitalId, d: DoctorId) -> usize {
    inst.hospitals[h]
        .pref
        .iter()
        .position(|&x| x == d)
        .unwrap_or(usize::MAX)
}

/// "h is undersubscribed, or it holds someone it ranks below `d`", with
/// `excluded` assignees not eligible as the displaced doctor. `None` stands
/// for the bottomless unemployment slot and never resists an arrival.
fn yields_to(
    inst: &HrcInstance,
    asn: &[Slot],
    loads: &[u32],
    slot: Slot,
    d: DoctorId,
    excluded: &[DoctorId],
) -> bool {
    let h = match slot {
        None => return true,
        Some(h) => h,
    };
    if loads[h] < inst.hospitals[h].capacity {
        return true;
    }
    let dp = hosp_pos(inst, h, d);
    (0..inst.doctors.len()).any(|r| {
        asn[r] == Some(h) && !excluded.contains(&r) && hosp_pos(inst, h, r) > dp
    })
}

fn single_blocking_count(inst: &HrcInstance, asn: &[Slot], loads: &[u32], d: DoctorId) -> u64 {
    let pref = match &inst.doctors[d].role {
        DoctorRole::Single { pref } => pref,
        DoctorRole::Member { .. } => return 0,
    };
    let mut n = 0;
    for &h in pref {
        if asn[d] == Some(h) {
            break; // everything after the current post is worse
        }
        if yields_to(inst, asn, loads, Some(h), d, &[]) {
            n += 1;
        }
    }
    n
}

fn couple_blocking_count(inst: &HrcInstance, asn: &[Slot], loads: &[u32], i: CoupleId) -> u64 {
    let couple = &inst.couples[i];
    let [m0, m1] = couple.members;
    let cur = (asn[m0], asn[m1]);
    let cur_rank = if cur == (None, None) {
        usize::MAX
    } else {
        couple
            .joint
            .iter()
            .position(|&p| p == cur)
            .unwrap_or(usize::MAX)
    };
    let mut n = 0;
    for (rank, &(hj, hk)) in couple.joint.iter().enumerate() {
        if rank >= cur_rank {
            break;
        }
        let blocks = if hj == cur.0 {
            // First member stays put; the displaced doctor at the second
            // member's target may not be the first member itself.
            yields_to(inst, asn, loads, hk, m1, &[m0])
        } else if hk == cur.1 {
            yields_to(inst, asn, loads, hj, m0, &[m1])
        } else if hj != hk {
            yields_to(inst, asn, loads, hj, m0, &[]) && yields_to(inst, asn, loads, hk, m1, &[])
        } else {
            // Both members move into the same hospital.
            let h = hj.expect("joint entries never pair unemployment with itself");
            let free = inst.hospitals[h].capacity.saturating_sub(loads[h]);
            if free >= 2 {
                true
            } else if free == 1 {
                let p0 = hosp_pos(inst, h, m0);
                let p1 = hosp_pos(inst, h, m1);
                (0..inst.doctors.len()).any(|r| {
                    asn[r] == Some(h) && {
                        let rp = hosp_pos(inst, h, r);
                        rp > p0 || rp > p1
                    }
                })
            } else {
                let p0 = hosp_pos(inst, h, m0);
                let p1 = hosp_pos(inst, h, m1);
                let worse0: Vec<DoctorId> = (0..inst.doctors.len())
                    .filter(|&r| asn[r] == Some(h) && hosp_pos(inst, h, r) > p0)
                    .collect();
                let worse1: Vec<DoctorId> = (0..inst.doctors.len())
                    .filter(|&r| asn[r] == Some(h) && hosp_pos(inst, h, r) > p1)
                    .collect();
                // Two distinct doctors must be displaced.
                !worse0.is_empty()
                    && !worse1.is_empty()
                    && !(worse0.len() == 1 && worse1.len() == 1 && worse0[0] == worse1[0])
            }
        };
        if blocks {
            n += 1;
        }
    }
    n
}

/// Total number of blocking records for a leaf assignment: one per blocking
/// (single doctor, hospital) pair plus one per blocking (couple, pair) entry.
fn blocking_count(inst: &HrcInstance, asn: &[Slot], loads: &[u32]) -> u64 {
    let mut n = 0;
    for d in 0..inst.doctors.len() {
        n += single_blocking_count(inst, asn, loads, d);
    }
    for i in 0..inst.couples.len() {
        n += couple_blocking_count(inst, asn, loads, i);
    }
    n
}

fn is_stable_leaf(inst: &HrcInstance, asn: &[Slot], loads: &[u32]) -> bool {
    (0..inst.doctors.len()).all(|d| single_blocking_count(inst, asn, loads, d) == 0)
        && (0..inst.couples.len()).all(|i| couple_blocking_count(inst, asn, loads, i) == 0)
}

fn to_matching(inst: &HrcInstance, asn: &[Slot]) -> HrcMatching {
    HrcMatching {
        assignment: asn.to_vec(),
        capacities: inst.hospitals.iter().map(|h| h.capacity).collect(),
    }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// Enumerates stable matchings by exhaustive backtracking, up to `limit`
/// (all of them when `limit` is `None`). Deterministic: results come out in
/// search order, which depends only on the instance.
pub fn enumerate_stable(
    inst: &HrcInstance,
    limit: Option<usize>,
    budget: SearchBudget,
) -> Result<(Vec<HrcMatching>, SearchStats), OracleError> {
    let mut search = Search::new(inst, budget);
    let mut found = Vec::new();
    let cap = limit.unwrap_or(usize::MAX);
    search.walk(0, &mut |inst, asn, loads| {
        if is_stable_leaf(inst, asn, loads) {
            found.push(to_matching(inst, asn));
            found.len() < cap
        } else {
            true
        }
    })?;
    let stats = search.stats();
    Ok((found, stats))
}

/// Exact minimum number of blocking records over all feasible matchings,
/// with a witness attaining it.
pub fn min_bp(
    inst: &HrcInstance,
    budget: SearchBudget,
) -> Result<(u64, HrcMatching, SearchStats), OracleError> {
    let mut search = Search::new(inst, budget);
    let mut best: Option<(u64, HrcMatching)> = None;
    search.walk(0, &mut |inst, asn, loads| {
        let bp = blocking_count(inst, asn, loads);
        if best.as_ref().map_or(true, |(b, _)| bp < *b) {
            best = Some((bp, to_matching(inst, asn)));
        }
        bp > 0 // a stable matching ends the search: nothing beats zero
    })?;
    let stats = search.stats();
    let (value, witness) =
        best.expect("every instance has at least the all-unmatched leaf");
    Ok((value, witness, stats))
}

/// Runs both searches and bundles the result.
pub fn oracle_report(
    inst: &HrcInstance,
    limit: Option<usize>,
    budget: SearchBudget,
) -> Result<OracleResult, OracleError> {
    let (stable_matchings, s1) = enumerate_stable(inst, limit, budget)?;
    let (min_bp_value, min_bp_witness, s2) = min_bp(inst, budget)?;
    Ok(OracleResult {
        stable_matchings,
        min_bp_value,
        min_bp_witness,
        stats: SearchStats {
            nodes: s1.nodes + s2.nodes,
            leaves: s1.leaves + s2.leaves,
            millis: s1.millis + s2.millis,
        },
    })
}

/// Checks the three persistence clauses across all stable matchings of the
/// instance (see [`RuralReport`]). Instances with at most one stable
/// matching satisfy all three trivially.
pub fn verify_rural_hospitals(
    inst: &HrcInstance,
    budget: SearchBudget,
) -> Result<RuralReport, OracleError> {
    let (stable, _) = enumerate_stable(inst, None, budget)?;
    let mut report = RuralReport {
        stable_count: stable.len(),
        i_holds: true,
        ii_holds: true,
        iii_holds: true,
        details: Vec::new(),
    };
    if stable.len() < 2 {
        return Ok(report);
    }

    let matched_singles: Vec<BTreeSet<DoctorId>> = stable
        .iter()
        .map(|m| {
            (0..inst.doctors.len())
                .filter(|&d| {
                    matches!(inst.doctors[d].role, DoctorRole::Single { .. })
                        && m.assignment[d].is_some()
                })
                .collect()
        })
        .collect();
    if matched_singles.iter().any(|s| *s != matched_singles[0]) {
        report.i_holds = false;
        report
            .details
            .push("matched single-doctor sets differ between stable matchings".into());
    }

    let fills: Vec<Vec<u32>> = stable.iter().map(|m| m.loads(inst)).collect();
    for h in 0..inst.hospitals.len() {
        if fills.iter().any(|f| f[h] != fills[0][h]) {
            report.ii_holds = false;
            report.details.push(format!(
                "hospital {} fills a different number of posts in different stable matchings",
                inst.hospitals[h].name
            ));
        }
    }

    for h in 0..inst.hospitals.len() {
        let undersub_somewhere = fills
            .iter()
            .any(|f| f[h] < inst.hospitals[h].capacity);
        if !undersub_somewhere {
            continue;
        }
        let assignees: Vec<BTreeSet<DoctorId>> = stable
            .iter()
            .map(|m| {
                (0..inst.doctors.len())
                    .filter(|&d| m.assignment[d] == Some(h))
                    .collect()
            })
            .collect();
        if assignees.iter().any(|a| *a != assignees[0]) {
            report.iii_holds = false;
            report.details.push(format!(
                "hospital {} is undersubscribed in one stable matching but its assignees vary",
                inst.hospitals[h].name
            ));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Couple, Doctor, Hospital};

    fn single(name: &str, pref: Vec<HospitalId>) -> Doctor {
        Doctor {
            name: name.into(),
            role: DoctorRole::Single { pref },
        }
    }

    fn member(name: &str, couple: CoupleId, side: usize) -> Doctor {
        Doctor {
            name: name.into(),
            role: DoctorRole::Member { couple, side },
        }
    }

    // ===== 1. the empty instance has exactly the empty stable matching =====

    #[test]
    fn empty_instance_has_one_stable_matching() {
        let inst = HrcInstance::default();
        let (stable, _) = enumerate_stable(&inst, None, SearchBudget::default()).unwrap();
        assert_eq!(stable.len(), 1);
        assert!(stable[0].assignment.is_empty());
    }

    // ===== 2. one over-demanded hospital: no stable matching, min bp 1 =====

    /// One hospital with two posts, a couple that must sit together there,
    /// and a single doctor the hospital ranks between the two members.
    fn crowded() -> HrcInstance {
        HrcInstance {
            doctors: vec![
                member("c1", 0, 0),
                member("c2", 0, 1),
                single("d", vec![0]),
            ],
            couples: vec![Couple {
                members: [0, 1],
                joint: vec![(Some(0), Some(0))],
            }],
            hospitals: vec![Hospital {
                name: "h".into(),
                capacity: 2,
                pref: vec![0, 2, 1],
            }],
        }
    }

    #[test]
    fn crowded_instance_has_no_stable_matching() {
        let (stable, _) = enumerate_stable(&crowded(), None, SearchBudget::default()).unwrap();
        assert!(stable.is_empty());
    }

    #[test]
    fn crowded_instance_min_bp_is_one() {
        let (value, witness, _) = min_bp(&crowded(), SearchBudget::default()).unwrap();
        assert_eq!(value, 1);
        // The witness itself must be feasible: no overload.
        let loads = witness.loads(&crowded());
        assert!(loads[0] <= 2);
    }

    // ===== 3. two couples fighting over one hospital: both outcomes stable =====

    /// Capacity-2 hospital ranking c1 > c3 > c4 > c2; couples (c1,c2) and
    /// (c3,c4) each apply only for both posts at once. Whichever couple gets
    /// the posts, the other cannot displace both members at once.
    fn contested() -> HrcInstance {
        HrcInstance {
            doctors: vec![
                member("c1", 0, 0),
                member("c2", 0, 1),
                member("c3", 1, 0),
                member("c4", 1, 1),
            ],
            couples: vec![
                Couple {
                    members: [0, 1],
                    joint: vec![(Some(0), Some(0))],
                },
                Couple {
                    members: [2, 3],
                    joint: vec![(Some(0), Some(0))],
                },
            ],
            hospitals: vec![Hospital {
                name: "h".into(),
                capacity: 2,
                pref: vec![0, 2, 3, 1],
            }],
        }
    }

    #[test]
    fn contested_hospital_has_exactly_two_stable_matchings() {
        let (stable, _) = enumerate_stable(&contested(), None, SearchBudget::default()).unwrap();
        assert_eq!(stable.len(), 2);
        // Different doctors are matched, yet the hospital fills both posts
        // either way.
        let inst = contested();
        let sets: Vec<Vec<DoctorId>> = stable
            .iter()
            .map(|m| {
                (0..4)
                    .filter(|&d| m.assignment[d].is_some())
                    .collect()
            })
            .collect();
        assert_ne!(sets[0], sets[1]);
        for m in &stable {
            assert_eq!(m.loads(&inst)[0], 2);
        }
    }

    #[test]
    fn contested_hospital_rural_clauses_hold() {
        let report = verify_rural_hospitals(&contested(), SearchBudget::default()).unwrap();
        assert_eq!(report.stable_count, 2);
        assert!(report.all_hold(), "{:?}", report.details);
    }

    // ===== 4. plain hospitals/residents behaviour as a sanity check =====

    #[test]
    fn two_singles_one_post_matches_the_preferred_one() {
        let inst = HrcInstance {
            doctors: vec![single("d1", vec![0]), single("d2", vec![0])],
            couples: vec![],
            hospitals: vec![Hospital {
                name: "h".into(),
                capacity: 1,
                pref: vec![0, 1],
            }],
        };
        let (stable, _) = enumerate_stable(&inst, None, SearchBudget::default()).unwrap();
        assert_eq!(stable.len(), 1);
        assert_eq!(stable[0].assignment, vec![Some(0), None]);
        let (value, _, _) = min_bp(&inst, SearchBudget::default()).unwrap();
        assert_eq!(value, 0);
    }

    // ===== 5. budgets abort with a typed error instead of lying =====

    #[test]
    fn tiny_node_budget_is_a_typed_error() {
        let budget = SearchBudget {
            max_nodes: 1,
            max_millis: None,
        };
        match enumerate_stable(&contested(), None, budget) {
            Err(OracleError::BudgetExhausted { .. }) => {}
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn limit_stops_after_enough_matchings() {
        let (stable, _) =
            enumerate_stable(&contested(), Some(1), SearchBudget::default()).unwrap();
        assert_eq!(stable.len(), 1);
    }
}
