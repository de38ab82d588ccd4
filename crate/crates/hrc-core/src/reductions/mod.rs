//! Reductions from hospital/residents instances with couples to the
//! degree-constrained stable matching solver, and solution extraction.
//!
//! Two encodings are provided. [`reduce_general`] keeps one node per
//! hospital and accepts every sub-responsive, sub-complete couple; its
//! half-integral solutions round to a matching that is stable after
//! adjusting each hospital's capacity by at most one
//! ([`round_to_near_feasible`]). [`reduce_typed`] splits every hospital
//! into an all-but-one-posts node and a single-post node and accepts only
//! the couple shapes for which the encoding is exact; an integral stable
//! solution of that instance projects back to a stable matching under the
//! original capacities ([`extract_hrc_matching`]), and the absence of one
//! proves that no stable matching exists.
//!
//! [`solve`] dispatches between the two pipelines, and
//! [`multigraph_to_hrc`] / [`solve_multigraph`] translate degree-capped
//! multigraph matching (loops allowed) into couple instances solved by the
//! exact pipeline.

use std::collections::BTreeMap;

use crate::model::{
    classify_couple, Couple, CoupleId, CoupleProfile, CoupleType, Doctor, DoctorId, DoctorRole,
    Hospital, HospitalId, HrcInstance, HrcMatching, MultigraphInstance, MultigraphMatching,
    SepClass, Slot,
};
use crate::sf::{
    decide_integral, sf_stability_check, solve_half_integral, HalfMatching, SfInstance,
};

/// Which node stands in for a hospital.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HospitalCopy {
    /// The single node carrying the full capacity.
    Whole,
    /// The node carrying all posts but the last one.
    AllButOne,
    /// The single-post node that ends up holding the hospital's worst
    /// assignee.
    LastPost,
}

/// Connector roles inside the six-edge gadget of a couple whose members
/// must be matched together or not at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectorRole {
    /// Adjacent to its own member, which ranks it first.
    Anchor,
    /// Reaches across to the partner, which ranks it last.
    Bridge,
}

/// Provenance of one node of the reduced instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrigin {
    Single(DoctorId),
    Member { couple: CoupleId, side: usize },
    Hospital { hospital: HospitalId, copy: HospitalCopy },
    Connector { couple: CoupleId, side: usize, role: ConnectorRole },
}

/// Provenance of one edge of the reduced instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrigin {
    /// A doctor applying to (one copy of) a hospital.
    Application { doctor: DoctorId, hospital: HospitalId, copy: HospitalCopy },
    /// The direct edge between the two members of a couple.
    PartnerLink { couple: CoupleId },
    /// One of the six edges of a together-or-not-at-all gadget.
    GadgetLink { couple: CoupleId },
}

/// Per-couple construction record.
#[derive(Debug, Clone)]
pub struct CoupleGadget {
    pub profile: CoupleProfile,
    /// The two member doctor ids in construction order. For the exact
    /// encoding of couples with a single shared hospital this is
    /// normalized so that the member the shared hospital ranks worse
    /// comes first; otherwise it is instance order.
    pub members: [DoctorId; 2],
    /// Connector node ids `[anchor0, bridge0, anchor1, bridge1]` when the
    /// couple is connected.
    pub connectors: Option<[usize; 4]>,
    /// Edge id of the direct member-to-member link, when present.
    pub partner_edge: Option<usize>,
}

/// Provenance map tying the reduced instance back to the original one.
#[derive(Debug, Clone)]
pub struct ReductionMap {
    pub node_origin: Vec<NodeOrigin>,
    pub edge_origin: Vec<EdgeOrigin>,
    pub couples: Vec<CoupleGadget>,
    /// Node id of each doctor.
    pub doctor_nodes: Vec<usize>,
    /// Node ids standing in for each hospital: the main node and, in the
    /// split encoding, the single-post node.
    pub hospital_nodes: Vec<(usize, Option<usize>)>,
    /// Per doctor, the hospital order used to build his list: the own
    /// preference list for singles, the individual witness order for
    /// couple members.
    pub doctor_orders: Vec<Vec<HospitalId>>,
    /// Whether hospitals were split into two nodes.
    pub split_hospitals: bool,
}

/// A matching together with the adjusted capacities it is stable under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearFeasibleOutcome {
    /// The assignment; `matching.capacities` is the adjusted vector.
    pub matching: HrcMatching,
    /// Per-hospital capacity change, each in {-1, 0, +1}.
    pub deltas: Vec<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("couple {index} ({name}) is not sub-responsive and sub-complete")]
    UnsupportedCouple { index: CoupleId, name: String },
    #[error("couple {index} ({name}) does not have a supported shape for the exact encoding")]
    UntypedCouple { index: CoupleId, name: String },
    #[error("the supplied weights are not a stable solution of the reduced instance")]
    UnstableWeights,
    #[error("the supplied solution is not integral")]
    FractionalWeights,
}

fn couple_label(inst: &HrcInstance, c: CoupleId) -> String {
    let [m0, m1] = inst.couples[c].members;
    format!("{}, {}", inst.doctors[m0].name, inst.doctors[m1].name)
}

/// Hospital sequence for one member in construction-side order `k`.
fn member_hospital_order(profile: &CoupleProfile, swapped: bool, k: usize) -> Vec<HospitalId> {
    let instance_side = if swapped { 1 - k } else { k };
    let order = if instance_side == 0 {
        &profile.order_first
    } else {
        &profile.order_second
    };
    order.iter().filter_map(|&s| s).collect()
}

fn build_reduction(
    inst: &HrcInstance,
    split: bool,
) -> Result<(SfInstance, ReductionMap), ReductionError> {
    let profiles: Vec<CoupleProfile> = (0..inst.couples.len())
        .map(|c| classify_couple(inst, c))
        .collect();
    for (c, p) in profiles.iter().enumerate() {
        if split {
            if p.couple_type == CoupleType::Other {
                return Err(ReductionError::UntypedCouple {
                    index: c,
                    name: couple_label(inst, c),
                });
            }
        } else if !p.sub_responsive || !p.sub_complete {
            return Err(ReductionError::UnsupportedCouple {
                index: c,
                name: couple_label(inst, c),
            });
        }
    }

    let mut sf = SfInstance::default();
    let mut node_origin = Vec::new();
    let mut edge_origin = Vec::new();

    // Nodes: doctors first, then hospitals, then connectors.
    let mut doctor_nodes = Vec::with_capacity(inst.doctors.len());
    for (d, doc) in inst.doctors.iter().enumerate() {
        doctor_nodes.push(sf.add_node(doc.name.clone(), 1));
        node_origin.push(match doc.role {
            DoctorRole::Single { .. } => NodeOrigin::Single(d),
            DoctorRole::Member { couple, side } => NodeOrigin::Member { couple, side },
        });
    }
    let mut hospital_nodes = Vec::with_capacity(inst.hospitals.len());
    for (h, hosp) in inst.hospitals.iter().enumerate() {
        if split {
            let main = sf.add_node(format!("{}.1", hosp.name), hosp.capacity.saturating_sub(1));
            node_origin.push(NodeOrigin::Hospital { hospital: h, copy: HospitalCopy::AllButOne });
            let last = sf.add_node(format!("{}.2", hosp.name), 1);
            node_origin.push(NodeOrigin::Hospital { hospital: h, copy: HospitalCopy::LastPost });
            hospital_nodes.push((main, Some(last)));
        } else {
            let node = sf.add_node(hosp.name.clone(), hosp.capacity);
            node_origin.push(NodeOrigin::Hospital { hospital: h, copy: HospitalCopy::Whole });
            hospital_nodes.push((node, None));
        }
    }
    let mut couples = Vec::with_capacity(inst.couples.len());
    for (c, profile) in profiles.iter().enumerate() {
        let [m0, m1] = inst.couples[c].members;
        let swapped = split && profile.swap_for_gadget;
        let members = if swapped { [m1, m0] } else { [m0, m1] };
        let connectors = if profile.sep_class == SepClass::Connected {
            let mut ids = [0usize; 4];
            for (slot, (side, role)) in
                [(0, ConnectorRole::Anchor), (0, ConnectorRole::Bridge),
                 (1, ConnectorRole::Anchor), (1, ConnectorRole::Bridge)]
                .into_iter()
                .enumerate()
            {
                let tag = if role == ConnectorRole::Anchor { "a" } else { "b" };
                let name = format!("{}.{}", inst.doctors[members[side]].name, tag);
                ids[slot] = sf.add_node(name, 1);
                node_origin.push(NodeOrigin::Connector { couple: c, side, role });
            }
            Some(ids)
        } else {
            None
        };
        couples.push(CoupleGadget {
            profile: profile.clone(),
            members,
            connectors,
            partner_edge: None,
        });
    }

    // Application edges, in each doctor's own list order. In the split
    // encoding every application yields an edge to both hospital nodes,
    // except that for a couple with exactly one shared hospital whose
    // worse-ranked member applies only there, the better member gets no
    // edge to the shared hospital's single-post node.
    let mut app_edge: BTreeMap<(DoctorId, HospitalId, bool), usize> = BTreeMap::new();
    let mut doctor_orders: Vec<Vec<HospitalId>> = vec![Vec::new(); inst.doctors.len()];
    let add_app = |sf: &mut SfInstance,
                   edge_origin: &mut Vec<EdgeOrigin>,
                   app_edge: &mut BTreeMap<(DoctorId, HospitalId, bool), usize>,
                   d: DoctorId,
                   h: HospitalId,
                   skip_last_post: bool| {
        let (main, last) = hospital_nodes[h];
        let e = sf.add_edge(doctor_nodes[d], main);
        let copy = if split { HospitalCopy::AllButOne } else { HospitalCopy::Whole };
        edge_origin.push(EdgeOrigin::Application { doctor: d, hospital: h, copy });
        app_edge.insert((d, h, false), e);
        if let Some(last) = last {
            if !skip_last_post {
                let e2 = sf.add_edge(doctor_nodes[d], last);
                edge_origin.push(EdgeOrigin::Application {
                    doctor: d,
                    hospital: h,
                    copy: HospitalCopy::LastPost,
                });
                app_edge.insert((d, h, true), e2);
            }
        }
    };
    for (d, doc) in inst.doctors.iter().enumerate() {
        if let DoctorRole::Single { pref } = &doc.role {
            for &h in pref {
                add_app(&mut sf, &mut edge_origin, &mut app_edge, d, h, false);
            }
            doctor_orders[d] = pref.clone();
        }
    }
    for (c, gadget) in couples.iter().enumerate() {
        let profile = &gadget.profile;
        let swapped = gadget.members[0] != inst.couples[c].members[0];
        for k in 0..2 {
            let d = gadget.members[k];
            let order = member_hospital_order(profile, swapped, k);
            for &h in &order {
                let deletes = split
                    && profile.couple_type == CoupleType::B
                    && k == 1
                    && Some(h) == profile.common;
                add_app(&mut sf, &mut edge_origin, &mut app_edge, d, h, deletes);
            }
            doctor_orders[d] = order;
        }
    }

    // Member-to-member and connector edges.
    let mut gadget_links: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (c, gadget) in couples.iter_mut().enumerate() {
        let wants_partner_edge = match gadget.profile.sep_class {
            SepClass::HalfSeparable { .. } => true,
            SepClass::Connected => split && gadget.profile.couple_type == CoupleType::C,
            SepClass::Separable => false,
        };
        if wants_partner_edge {
            let e = sf.add_edge(doctor_nodes[gadget.members[0]], doctor_nodes[gadget.members[1]]);
            edge_origin.push(EdgeOrigin::PartnerLink { couple: c });
            gadget.partner_edge = Some(e);
        }
        if let Some([a0, b0, a1, b1]) = gadget.connectors {
            let m0 = doctor_nodes[gadget.members[0]];
            let m1 = doctor_nodes[gadget.members[1]];
            for (u, v) in [(m0, a0), (a0, b0), (b0, m1), (m1, a1), (a1, b1), (b1, m0)] {
                let e = sf.add_edge(u, v);
                edge_origin.push(EdgeOrigin::GadgetLink { couple: c });
                gadget_links.insert((u.min(v), u.max(v)), e);
            }
        }
    }
    let link = |u: usize, v: usize| gadget_links[&(u.min(v), u.max(v))];

    // Preference lists. Doctors first.
    let hospital_entries = |d: DoctorId, h: HospitalId, out: &mut Vec<usize>| {
        out.push(app_edge[&(d, h, false)]);
        if let Some(&e) = app_edge.get(&(d, h, true)) {
            out.push(e);
        }
    };
    for (d, doc) in inst.doctors.iter().enumerate() {
        if let DoctorRole::Single { pref } = &doc.role {
            let mut list = Vec::new();
            for &h in pref {
                hospital_entries(d, h, &mut list);
            }
            sf.nodes[doctor_nodes[d]].pref = list;
        }
    }
    for gadget in &couples {
        let profile = &gadget.profile;
        for k in 0..2 {
            let d = gadget.members[k];
            let mut list = Vec::new();
            let before_hospitals;
            let after_hospitals;
            match profile.sep_class {
                SepClass::Connected => {
                    let [a0, b0, a1, b1] = gadget.connectors.unwrap();
                    let m = doctor_nodes[d];
                    let anchor = if k == 0 { a0 } else { a1 };
                    let bridge = if k == 0 { b1 } else { b0 };
                    before_hospitals = Some(link(m, anchor));
                    after_hospitals = Some(link(m, bridge));
                }
                SepClass::HalfSeparable { employed } => {
                    let partner = gadget.partner_edge.unwrap();
                    if k == employed {
                        before_hospitals = None;
                        after_hospitals = Some(partner);
                    } else {
                        before_hospitals = Some(partner);
                        after_hospitals = None;
                    }
                }
                SepClass::Separable => {
                    before_hospitals = None;
                    after_hospitals = None;
                }
            }
            list.extend(before_hospitals);
            let order = &doctor_orders[d];
            if split && profile.couple_type == CoupleType::C {
                let common = profile.common.unwrap();
                for &h in order.iter().filter(|&&h| h != common) {
                    hospital_entries(d, h, &mut list);
                }
                list.push(app_edge[&(d, common, false)]);
                list.push(gadget.partner_edge.unwrap());
                list.push(app_edge[&(d, common, true)]);
            } else {
                for &h in order {
                    hospital_entries(d, h, &mut list);
                }
            }
            list.extend(after_hospitals);
            sf.nodes[doctor_nodes[d]].pref = list;
        }
    }
    // Hospitals rank applying doctors in their own order; the single-post
    // node simply lacks the entries whose edges were never created.
    for (h, hosp) in inst.hospitals.iter().enumerate() {
        let (main, last) = hospital_nodes[h];
        let mut main_list = Vec::new();
        let mut last_list = Vec::new();
        for &d in &hosp.pref {
            if let Some(&e) = app_edge.get(&(d, h, false)) {
                main_list.push(e);
            }
            if let Some(&e) = app_edge.get(&(d, h, true)) {
                last_list.push(e);
            }
        }
        sf.nodes[main].pref = main_list;
        if let Some(last) = last {
            sf.nodes[last].pref = last_list;
        }
    }
    // Connectors: each anchor prefers its bridge to its member; each
    // bridge prefers the far member to its anchor.
    for gadget in &couples {
        if let Some([a0, b0, a1, b1]) = gadget.connectors {
            let m0 = doctor_nodes[gadget.members[0]];
            let m1 = doctor_nodes[gadget.members[1]];
            sf.nodes[a0].pref = vec![link(a0, b0), link(a0, m0)];
            sf.nodes[b0].pref = vec![link(b0, m1), link(b0, a0)];
            sf.nodes[a1].pref = vec![link(a1, b1), link(a1, m1)];
            sf.nodes[b1].pref = vec![link(b1, m0), link(b1, a1)];
        }
    }

    debug_assert!(sf.validate().is_empty(), "reduced instance fails validation");
    let map = ReductionMap {
        node_origin,
        edge_origin,
        couples,
        doctor_nodes,
        hospital_nodes,
        doctor_orders,
        split_hospitals: split,
    };
    Ok((sf, map))
}

/// Encode a couples instance for the half-integral pipeline: one node per
/// hospital at full capacity; per-member application edges ordered by the
/// individual witness orders; a direct member link for couples where only
/// one designated member may be matched alone; and a six-edge connector
/// cycle forcing both-or-neither for couples that must stay together.
///
/// Requires every couple to be sub-responsive and sub-complete.
pub fn reduce_general(inst: &HrcInstance) -> Result<(SfInstance, ReductionMap), ReductionError> {
    build_reduction(inst, false)
}

/// Encode a couples instance for the exact pipeline. On top of the
/// general construction, every hospital splits into an all-but-one-posts
/// node and a single-post node (doctors prefer the former); for a couple
/// with exactly one shared hospital whose worse-ranked member applies
/// only there, the better member loses the single-post edge at the shared
/// hospital; and couples for which the shared hospital is both members'
/// last choice get a member link wedged between the shared hospital's two
/// nodes in both lists.
///
/// Requires every couple to classify into one of the supported shapes:
/// disjoint hospital sets, or a single shared hospital with one of the
/// two list patterns above.
pub fn reduce_typed(inst: &HrcInstance) -> Result<(SfInstance, ReductionMap), ReductionError> {
    build_reduction(inst, true)
}

/// Round a stable half-integral solution of the [`reduce_general`] output
/// to a matching plus adjusted capacities: every doctor with positive
/// weight on hospital edges takes the best such hospital in his own
/// order; every hospital node saturated by the weights has its capacity
/// re-pinned to the number of doctors it received, so each capacity moves
/// by at most one.
pub fn round_to_near_feasible(
    inst: &HrcInstance,
    sf: &SfInstance,
    map: &ReductionMap,
    weights: &HalfMatching,
) -> Result<NearFeasibleOutcome, ReductionError> {
    if !sf_stability_check(sf, weights).is_empty() {
        return Err(ReductionError::UnstableWeights);
    }
    let mut assignment: Vec<Slot> = vec![None; inst.doctors.len()];
    let mut positive: Vec<Vec<HospitalId>> = vec![Vec::new(); inst.doctors.len()];
    for (e, &w) in weights.half.iter().enumerate() {
        if w == 0 {
            continue;
        }
        if let EdgeOrigin::Application { doctor, hospital, .. } = map.edge_origin[e] {
            positive[doctor].push(hospital);
        }
    }
    for d in 0..inst.doctors.len() {
        if positive[d].is_empty() {
            continue;
        }
        assignment[d] = map.doctor_orders[d]
            .iter()
            .copied()
            .find(|h| positive[d].contains(h));
        debug_assert!(assignment[d].is_some());
    }
    let mut capacities = Vec::with_capacity(inst.hospitals.len());
    let mut deltas = Vec::with_capacity(inst.hospitals.len());
    for (h, hosp) in inst.hospitals.iter().enumerate() {
        let node = map.hospital_nodes[h].0;
        let saturated = weights.load_halves(sf, node) == 2 * hosp.capacity;
        let assigned = assignment.iter().filter(|&&s| s == Some(h)).count() as u32;
        let q = if saturated { assigned } else { hosp.capacity };
        deltas.push(q as i32 - hosp.capacity as i32);
        capacities.push(q);
    }
    debug_assert!(deltas.iter().all(|d| d.abs() <= 1));
    let matching = HrcMatching { assignment, capacities };
    debug_assert!(
        {
            let report = crate::stability::check_stability(inst, &matching);
            report.feasibility.is_empty() && report.blocking.is_empty()
        },
        "rounded outcome must be stable under the adjusted capacities"
    );
    Ok(NearFeasibleOutcome { matching, deltas })
}

/// Project a stable integral solution of the [`reduce_typed`] output back
/// to the original instance: each doctor matched to a hospital node takes
/// that hospital, everyone matched inside a gadget (or unmatched) stays
/// unmatched. Capacities are the original ones.
pub fn extract_hrc_matching(
    inst: &HrcInstance,
    sf: &SfInstance,
    map: &ReductionMap,
    solution: &HalfMatching,
) -> Result<HrcMatching, ReductionError> {
    if !solution.is_integral() {
        return Err(ReductionError::FractionalWeights);
    }
    if !sf_stability_check(sf, solution).is_empty() {
        return Err(ReductionError::UnstableWeights);
    }
    let mut assignment: Vec<Slot> = vec![None; inst.doctors.len()];
    for (e, &w) in solution.half.iter().enumerate() {
        if w == 2 {
            if let EdgeOrigin::Application { doctor, hospital, .. } = map.edge_origin[e] {
                debug_assert!(assignment[doctor].is_none());
                assignment[doctor] = Some(hospital);
            }
        }
    }
    let matching = HrcMatching {
        assignment,
        capacities: inst.hospitals.iter().map(|h| h.capacity).collect(),
    };
    debug_assert!(
        {
            let report = crate::stability::check_stability(inst, &matching);
            report.feasibility.is_empty() && report.blocking.is_empty()
        },
        "extracted matching must be stable under the original capacities"
    );
    Ok(matching)
}

/// Which pipeline a solve ran through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolvePath {
    NearFeasible,
    ExactTyped,
}

/// Requested pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// Always round: capacities may move by one, an outcome always exists.
    NearFeasible,
    /// Decide exactly under the original capacities; requires supported
    /// couple shapes.
    ExactTyped,
    /// Exact when every couple has a supported shape, rounding otherwise.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// Matching stable under adjusted capacities.
    NearFeasible(NearFeasibleOutcome),
    /// Matching stable under the original capacities.
    Stable(HrcMatching),
    /// Proof that no stable matching exists under the original capacities.
    NoStable,
}

/// Outcome of [`solve`]: the pipeline that ran and its result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveRun {
    pub path: SolvePath,
    pub result: SolveResult,
}

/// Top-level dispatcher over the two pipelines.
pub fn solve(inst: &HrcInstance, mode: SolveMode) -> Result<SolveRun, ReductionError> {
    let path = match mode {
        SolveMode::NearFeasible => SolvePath::NearFeasible,
        SolveMode::ExactTyped => SolvePath::ExactTyped,
        SolveMode::Auto => {
            let all_typed = (0..inst.couples.len())
                .all(|c| classify_couple(inst, c).couple_type != CoupleType::Other);
            if all_typed {
                SolvePath::ExactTyped
            } else {
                SolvePath::NearFeasible
            }
        }
    };
    let result = match path {
        SolvePath::NearFeasible => {
            let (sf, map) = reduce_general(inst)?;
            let weights = solve_half_integral(&sf);
            SolveResult::NearFeasible(round_to_near_feasible(inst, &sf, &map, &weights)?)
        }
        SolvePath::ExactTyped => {
            let (sf, map) = reduce_typed(inst)?;
            match decide_integral(&sf) {
                Some(solution) => {
                    SolveResult::Stable(extract_hrc_matching(inst, &sf, &map, &solution)?)
                }
                None => SolveResult::NoStable,
            }
        }
    };
    Ok(SolveRun { path, result })
}

/// Translate a degree-capped multigraph matching instance into a couples
/// instance: every node becomes a hospital at its capacity, every edge a
/// couple whose members must be placed together, applying to the edge's
/// two endpoints. A loop's single entry in its node's ranking expands to
/// the two members adjacently, first-listed endpoint first. Nodes with
/// capacity zero get no hospital, and edges touching them get no couple
/// (they can never be matched and never block).
///
/// Returns the instance plus, per multigraph edge, the couple standing in
/// for it (`None` for dropped edges).
pub fn multigraph_to_hrc(mg: &MultigraphInstance) -> (HrcInstance, Vec<Option<CoupleId>>) {
    let mut inst = HrcInstance::default();
    let mut hospital_of: Vec<Option<HospitalId>> = Vec::with_capacity(mg.nodes.len());
    for node in &mg.nodes {
        if node.capacity == 0 {
            hospital_of.push(None);
            continue;
        }
        hospital_of.push(Some(inst.hospitals.len()));
        inst.hospitals.push(Hospital {
            name: node.name.clone(),
            capacity: node.capacity,
            pref: Vec::new(),
        });
    }
    let mut edge_couple: Vec<Option<CoupleId>> = vec![None; mg.edges.len()];
    for (e, edge) in mg.edges.iter().enumerate() {
        let (u, v) = edge.ends;
        let (Some(hu), Some(hv)) = (hospital_of[u], hospital_of[v]) else {
            continue;
        };
        let c = inst.couples.len();
        let d0 = inst.doctors.len();
        inst.doctors.push(Doctor {
            name: format!("e{e}.x"),
            role: DoctorRole::Member { couple: c, side: 0 },
        });
        inst.doctors.push(Doctor {
            name: format!("e{e}.y"),
            role: DoctorRole::Member { couple: c, side: 1 },
        });
        inst.couples.push(Couple {
            members: [d0, d0 + 1],
            joint: vec![(Some(hu), Some(hv))],
        });
        edge_couple[e] = Some(c);
    }
    for (vi, node) in mg.nodes.iter().enumerate() {
        let Some(h) = hospital_of[vi] else { continue };
        let mut pref = Vec::new();
        for &e in &node.pref {
            let Some(c) = edge_couple[e] else { continue };
            let members = inst.couples[c].members;
            if mg.is_loop(e) {
                pref.push(members[0]);
                pref.push(members[1]);
            } else {
                let side = usize::from(mg.edges[e].ends.1 == vi);
                pref.push(members[side]);
            }
        }
        inst.hospitals[h].pref = pref;
    }
    debug_assert!(inst.validate().is_empty());
    (inst, edge_couple)
}

/// Decide stable matching on a degree-capped multigraph with loops, via
/// the couples translation and the exact pipeline. Returns a stable
/// b-matching, or `None` when none exists.
pub fn solve_multigraph(
    mg: &MultigraphInstance,
) -> Result<Option<MultigraphMatching>, ReductionError> {
    let (inst, edge_couple) = multigraph_to_hrc(mg);
    let run = solve(&inst, SolveMode::ExactTyped)?;
    match run.result {
        SolveResult::Stable(m) => {
            let mut chosen = vec![false; mg.edges.len()];
            for (e, &couple) in edge_couple.iter().enumerate() {
                if let Some(c) = couple {
                    let (a, b) = m.couple_slots(&inst, c);
                    debug_assert_eq!(a.is_some(), b.is_some());
                    chosen[e] = a.is_some();
                }
            }
            let result = MultigraphMatching { chosen };
            debug_assert!(result.is_feasible(mg));
            debug_assert!(
                crate::stability::multigraph_blocking_edges(mg, &result).is_empty(),
                "translated matching must be stable on the multigraph"
            );
            Ok(Some(result))
        }
        SolveResult::NoStable => Ok(None),
        SolveResult::NearFeasible(_) => unreachable!("exact pipeline requested"),
    }
}
