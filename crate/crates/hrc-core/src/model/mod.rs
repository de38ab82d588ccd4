//! Instance types, parsing, validation, couple classification, and
//! dual-market detection.

mod classify;
mod cnf;
mod dual;
mod multigraph;
mod parse;
mod smti;

pub use classify::{classify_couple, CoupleProfile, CoupleType, SepClass};
pub use cnf::{CnfError, CnfFormula, Lit};
pub use dual::{detect_dual_market, DualMarket};
pub use multigraph::{MgEdge, MgNode, MultigraphInstance, MultigraphMatching};
pub use parse::{
    parse_cnf, parse_hrc, parse_matching, parse_multigraph, parse_smti, write_hrc, ParseError,
};
pub use smti::{SmtiInstance, SmtiMan, SmtiWoman, WomanList};

use std::collections::{HashMap, HashSet};

/// Index into [`HrcInstance::hospitals`].
pub type HospitalId = usize;
/// Index into [`HrcInstance::doctors`].
pub type DoctorId = usize;
/// Index into [`HrcInstance::couples`].
pub type CoupleId = usize;

/// One slot of a joint preference entry: a hospital, or `None` for staying
/// unmatched. Joint entries never have both slots `None`.
pub type Slot = Option<HospitalId>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hospital {
    pub name: String,
    pub capacity: u32,
    /// Strict preference over exactly the doctors that find this hospital
    /// acceptable (best first).
    pub pref: Vec<DoctorId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DoctorRole {
    /// A single doctor with a strict preference list over hospitals.
    Single { pref: Vec<HospitalId> },
    /// Member `side` (0 or 1) of the couple with the given index.
    Member { couple: CoupleId, side: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Doctor {
    pub name: String,
    pub role: DoctorRole,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Couple {
    /// `members[0]` is the doctor named first in the declaration.
    pub members: [DoctorId; 2],
    /// Strict joint preference over slot pairs, best first.
    pub joint: Vec<(Slot, Slot)>,
}

/// A hospitals/residents instance with couples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HrcInstance {
    pub doctors: Vec<Doctor>,
    pub couples: Vec<Couple>,
    pub hospitals: Vec<Hospital>,
}

/// A single problem found by [`HrcInstance::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub subject: String,
    pub message: String,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

impl HrcInstance {
    pub fn doctor_name(&self, d: DoctorId) -> &str {
        &self.doctors[d].name
    }

    pub fn hospital_name(&self, h: HospitalId) -> &str {
        &self.hospitals[h].name
    }

    /// Lookup maps from names to indices. Built on demand; instances are
    /// otherwise plain index-based data.
    pub fn name_maps(&self) -> (HashMap<&str, DoctorId>, HashMap<&str, HospitalId>) {
        let docs = self
            .doctors
            .iter()
            .enumerate()
            .map(|(i, d)| (d.name.as_str(), i))
            .collect();
        let hosps = self
            .hospitals
            .iter()
            .enumerate()
            .map(|(i, h)| (h.name.as_str(), i))
            .collect();
        (docs, hosps)
    }

    /// Hospitals the given couple member finds acceptable, in order of first
    /// appearance in the joint list.
    pub fn member_projection(&self, c: CoupleId, side: usize) -> Vec<HospitalId> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for entry in &self.couples[c].joint {
            let slot = if side == 0 { entry.0 } else { entry.1 };
            if let Some(h) = slot {
                if seen.insert(h) {
                    out.push(h);
                }
            }
        }
        out
    }

    /// Hospitals acceptable to a doctor (single list or couple projection).
    pub fn doctor_acceptable(&self, d: DoctorId) -> Vec<HospitalId> {
        match &self.doctors[d].role {
            DoctorRole::Single { pref } => pref.clone(),
            DoctorRole::Member { couple, side } => self.member_projection(*couple, *side),
        }
    }

    /// Rank tables: `hosp_rank[h][d]` is the position of doctor `d` in
    /// hospital `h`'s list (0 = best). Doctors absent from the list are
    /// absent from the map.
    pub fn hospital_ranks(&self) -> Vec<HashMap<DoctorId, u32>> {
        self.hospitals
            .iter()
            .map(|h| {
                h.pref
                    .iter()
                    .enumerate()
                    .map(|(r, &d)| (d, r as u32))
                    .collect()
            })
            .collect()
    }

    /// Semantic validation. Returns all problems found (empty means valid).
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        let issue = |issues: &mut Vec<ValidationIssue>, subject: &str, message: String| {
            issues.push(ValidationIssue {
                subject: subject.to_string(),
                message,
            });
        };

        let mut seen_doc = HashSet::new();
        for d in &self.doctors {
            if !seen_doc.insert(d.name.as_str()) {
                issue(&mut issues, &d.name, "duplicate doctor identifier".into());
            }
        }
        let mut seen_hosp = HashSet::new();
        for h in &self.hospitals {
            if !seen_hosp.insert(h.name.as_str()) {
                issue(&mut issues, &h.name, "duplicate hospital identifier".into());
            }
            if h.name == "-" || h.name.contains(',') {
                issue(
                    &mut issues,
                    &h.name,
                    "hospital identifier collides with pair syntax".into(),
                );
            }
            if h.capacity == 0 {
                issue(&mut issues, &h.name, "capacity must be at least 1".into());
            }
        }

        for (di, d) in self.doctors.iter().enumerate() {
            match &d.role {
                DoctorRole::Single { pref } => {
                    if pref.is_empty() {
                        issue(&mut issues, &d.name, "empty preference list".into());
                    }
                    let mut seen = HashSet::new();
                    for &h in pref {
                        if h >= self.hospitals.len() {
                            issue(&mut issues, &d.name, "unknown hospital in list".into());
                        } else if !seen.insert(h) {
                            issue(
                                &mut issues,
                                &d.name,
                                format!("hospital {} listed twice", self.hospitals[h].name),
                            );
                        }
                    }
                }
                DoctorRole::Member { couple, side } => {
                    if *couple >= self.couples.len()
                        || *side > 1
                        || self.couples[*couple].members[*side] != di
                    {
                        issue(&mut issues, &d.name, "inconsistent couple membership".into());
                    }
                }
            }
        }

        for (ci, c) in self.couples.iter().enumerate() {
            let label = format!(
                "couple ({}, {})",
                self.doctors[c.members[0]].name, self.doctors[c.members[1]].name
            );
            if c.members[0] == c.members[1] {
                issue(&mut issues, &label, "members must be distinct".into());
            }
            if c.joint.is_empty() {
                issue(&mut issues, &label, "empty joint preference list".into());
            }
            let mut seen = HashSet::new();
            for &(a, b) in &c.joint {
                if a.is_none() && b.is_none() {
                    issue(
                        &mut issues,
                        &label,
                        "joint entry with both slots unmatched".into(),
                    );
                }
                for slot in [a, b] {
                    if let Some(h) = slot {
                        if h >= self.hospitals.len() {
                            issue(&mut issues, &label, "unknown hospital in joint list".into());
                        }
                    }
                }
                if !seen.insert((a, b)) {
                    issue(&mut issues, &label, "duplicate joint entry".into());
                }
            }
            for side in 0..2 {
                let m = c.members[side];
                match &self.doctors[m].role {
                    DoctorRole::Member { couple, side: s } if *couple == ci && *s == side => {}
                    _ => issue(
                        &mut issues,
                        &label,
                        format!("doctor {} has mismatched role", self.doctors[m].name),
                    ),
                }
            }
        }

        // Mutual acceptability: each hospital ranks exactly its applicants.
        let mut applicants: Vec<HashSet<DoctorId>> = vec![HashSet::new(); self.hospitals.len()];
        for (di, _) in self.doctors.iter().enumerate() {
            for h in self.doctor_acceptable(di) {
                if h < self.hospitals.len() {
                    applicants[h].insert(di);
                }
            }
        }
        for (hi, h) in self.hospitals.iter().enumerate() {
            let mut seen = HashSet::new();
            for &d in &h.pref {
                if d >= self.doctors.len() {
                    issue(&mut issues, &h.name, "unknown doctor in list".into());
                    continue;
                }
                if !seen.insert(d) {
                    issue(
                        &mut issues,
                        &h.name,
                        format!("doctor {} listed twice", self.doctors[d].name),
                    );
                }
                if !applicants[hi].contains(&d) {
                    issue(
                        &mut issues,
                        &h.name,
                        format!(
                            "ranks doctor {} who does not find it acceptable",
                            self.doctors[d].name
                        ),
                    );
                }
            }
            for &d in applicants[hi].iter() {
                if !seen.contains(&d) {
                    issue(
                        &mut issues,
                        &h.name,
                        format!("does not rank applicant {}", self.doctors[d].name),
                    );
                }
            }
        }

        issues.sort_by(|a, b| (&a.subject, &a.message).cmp(&(&b.subject, &b.message)));
        issues
    }
}

/// An assignment of doctors to hospitals together with the capacity vector
/// it is measured against (near-feasible outcomes adjust capacities by at
/// most one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HrcMatching {
    /// Per doctor: the assigned hospital, or `None` for unmatched.
    pub assignment: Vec<Slot>,
    /// Effective capacity per hospital.
    pub capacities: Vec<u32>,
}

impl HrcMatching {
    /// Empty matching under the instance's own capacities.
    pub fn empty(inst: &HrcInstance) -> Self {
        HrcMatching {
            assignment: vec![None; inst.doctors.len()],
            capacities: inst.hospitals.iter().map(|h| h.capacity).collect(),
        }
    }

    /// Number of doctors assigned to each hospital.
    pub fn loads(&self, inst: &HrcInstance) -> Vec<u32> {
        let mut loads = vec![0u32; inst.hospitals.len()];
        for slot in &self.assignment {
            if let Some(h) = *slot {
                loads[h] += 1;
            }
        }
        loads
    }

    /// The pair of slots a couple currently occupies.
    pub fn couple_slots(&self, inst: &HrcInstance, c: CoupleId) -> (Slot, Slot) {
        let m = inst.couples[c].members;
        (self.assignment[m[0]], self.assignment[m[1]])
    }

    /// Position of `(a, b)` in the couple's joint list, if present.
    pub fn joint_rank(inst: &HrcInstance, c: CoupleId, pair: (Slot, Slot)) -> Option<usize> {
        inst.couples[c].joint.iter().position(|&e| e == pair)
    }
}
