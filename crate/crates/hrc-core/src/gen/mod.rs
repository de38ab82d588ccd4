//! Instance generators: seeded random corpora and the hardness-gadget
//! constructions used to exercise the solvers and the oracle.
//!
//! * [`gen_random`] plants couples whose joint lists are product-shaped and
//!   responsive-consistent by construction, so every output feeds the
//!   reduction pipeline without preprocessing.
//! * [`gen_from_smti`] encodes a restricted marriage-with-ties core as a
//!   couples market whose stable matchings mirror the core's complete
//!   weakly-stable matchings.
//! * [`gen_dual_market_from_sat`] turns a (2,2)-occurrence exact-3-SAT
//!   formula into a two-sided market whose complete stable matchings encode
//!   satisfying assignments, optionally with enforcer gadgets that make
//!   every stable matching complete, and optional master preference lists.
//! * [`gen_minbp_from_smti`] builds the blocking-pair amplification family:
//!   a replication factor `B` separates cores with a complete stable
//!   matching (few blocking pairs) from cores without one (at least `B`).

use crate::model::{
    CnfError, CnfFormula, Couple, CoupleId, Doctor, DoctorId, DoctorRole, Hospital, HospitalId,
    HrcInstance, HrcMatching, Slot, SmtiInstance,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("unsatisfiable generation mix: {0}")]
    Mix(String),
    #[error("marriage core violates the required shape: {subject}: {message}")]
    SmtiShape { subject: String, message: String },
    #[error(transparent)]
    Formula(#[from] CnfError),
    #[error("construction would need {couples} couples; lower the replication override")]
    TooLarge { couples: u128 },
}

// ---------------------------------------------------------------------------
// Random planted-structure instances
// ---------------------------------------------------------------------------

/// Relative weights for the couple shapes drawn by [`gen_random`]. The
/// separability weights apply to disjoint-set and free couples; shared-last
/// and shared-singleton couples are joint-or-nothing by definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupleMix {
    pub separable: u32,
    pub half_separable: u32,
    pub connected: u32,
    /// Members apply to disjoint hospital sets.
    pub type_a: u32,
    /// One shared hospital; the member it ranks worse applies only there.
    pub type_b: u32,
    /// One shared hospital, ranked last by both members.
    pub type_c: u32,
    /// No structural constraint beyond the product shape.
    pub unrestricted: u32,
}

impl Default for CoupleMix {
    fn default() -> Self {
        CoupleMix {
            separable: 1,
            half_separable: 1,
            connected: 1,
            type_a: 1,
            type_b: 1,
            type_c: 1,
            unrestricted: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub seed: u64,
    pub singles: usize,
    pub couples: usize,
    pub hospitals: usize,
    /// Inclusive capacity range.
    pub capacity: (u32, u32),
    /// Inclusive length range for individual preference lists.
    pub list_len: (usize, usize),
    pub mix: CoupleMix,
    /// Split the hospitals into two sides; first members and their lists stay
    /// on side one, second members on side two, singles inside one side.
    pub dual_market: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            singles: 4,
            couples: 2,
            hospitals: 4,
            capacity: (1, 2),
            list_len: (1, 3),
            mix: CoupleMix::default(),
            dual_market: false,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum PlantedType {
    Disjoint,
    SharedSingleton,
    SharedLast,
    Free,
}

fn weighted<T: Copy>(rng: &mut ChaCha8Rng, options: &[(T, u32)]) -> T {
    let total: u32 = options.iter().map(|&(_, w)| w).sum();
    let mut roll = rng.random_range(0..total);
    for &(v, w) in options {
        if roll < w {
            return v;
        }
        roll -= w;
    }
    unreachable!("weights sum to total")
}

/// A list length inside `range`, clamped to `cap` available entries.
fn draw_len(rng: &mut ChaCha8Rng, range: (usize, usize), cap: usize) -> usize {
    let hi = range.1.min(cap);
    let lo = range.0.min(hi);
    rng.random_range(lo..=hi)
}

/// `len` distinct entries of `pool`, order doubling as preference order.
fn sample_order(rng: &mut ChaCha8Rng, pool: &[HospitalId], len: usize) -> Vec<HospitalId> {
    let mut pool = pool.to_vec();
    pool.shuffle(rng);
    pool.truncate(len);
    pool
}

fn check_params(p: &GenParams) -> Result<(), GenError> {
    let mix = |msg: &str| Err(GenError::Mix(msg.to_string()));
    if p.capacity.0 == 0 {
        return mix("hospital capacities must be at least 1");
    }
    if p.capacity.0 > p.capacity.1 {
        return mix("empty capacity range");
    }
    if p.list_len.0 == 0 {
        return mix("preference lists need at least one entry");
    }
    if p.list_len.0 > p.list_len.1 {
        return mix("empty list-length range");
    }
    if p.singles > 0 && p.hospitals == 0 {
        return mix("single doctors need at least one hospital");
    }
    if p.dual_market && p.hospitals < 2 && (p.singles > 0 || p.couples > 0) {
        return mix("a dual market needs a hospital on each side");
    }
    if p.couples > 0 {
        let m = &p.mix;
        if m.type_a + m.type_b + m.type_c + m.unrestricted == 0 {
            return mix("no couple type enabled");
        }
        if (m.type_a > 0 || m.unrestricted > 0)
            && m.separable + m.half_separable + m.connected == 0
        {
            return mix("no separability class enabled");
        }
        if m.type_a > 0 && p.hospitals < 2 {
            return mix("disjoint-set couples need two hospitals");
        }
        if (m.type_b > 0 || m.type_c > 0) && p.dual_market {
            return mix("a shared hospital cannot sit on both market sides");
        }
        if m.type_b > 0 && p.hospitals == 0 {
            return mix("shared-hospital couples need a hospital");
        }
        if m.type_c > 0 && (p.hospitals < 3 || p.list_len.1 < 2) {
            return mix("shared-last couples need three hospitals and lists of length two");
        }
        if m.unrestricted > 0 && p.hospitals == 0 {
            return mix("couples need a hospital");
        }
    }
    Ok(())
}

/// Generates a random instance in which every couple is product-shaped and
/// responsive-consistent by construction: individual strict orders are
/// sampled first, the slot-value sets are combined per the drawn shape, and
/// the joint list is their full product sorted lexicographically by the two
/// members' ranks. Deterministic per seed.
pub fn gen_random(params: &GenParams) -> Result<HrcInstance, GenError> {
    check_params(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let hospitals: Vec<Hospital> = (0..params.hospitals)
        .map(|i| Hospital {
            name: format!("h{}", i + 1),
            capacity: rng.random_range(params.capacity.0..=params.capacity.1),
            pref: Vec::new(),
        })
        .collect();

    let all: Vec<HospitalId> = (0..params.hospitals).collect();
    let split = params.hospitals.div_ceil(2);
    let (side1, side2) = if params.dual_market {
        all.split_at(split)
    } else {
        (&all[..], &all[..])
    };

    let mut doctors: Vec<Doctor> = Vec::new();
    let mut couples: Vec<Couple> = Vec::new();

    for i in 0..params.singles {
        let pool = if params.dual_market && rng.random_bool(0.5) {
            side2
        } else {
            side1
        };
        let len = draw_len(&mut rng, params.list_len, pool.len());
        let pref = sample_order(&mut rng, pool, len);
        doctors.push(Doctor {
            name: format!("d{}", i + 1),
            role: DoctorRole::Single { pref },
        });
    }

    let m = &params.mix;
    let type_options = [
        (PlantedType::Disjoint, m.type_a),
        (PlantedType::SharedSingleton, m.type_b),
        (PlantedType::SharedLast, m.type_c),
        (PlantedType::Free, m.unrestricted),
    ];
    let sep_options = [(0u8, m.separable), (1, m.half_separable), (2, m.connected)];

    // (couple, shared hospital, side whose list is just that hospital):
    // hospital lists are built afterwards and must rank the singleton side
    // below its partner for the planted shape to classify as intended.
    let mut singleton_constraints: Vec<(CoupleId, HospitalId, usize)> = Vec::new();

    for ci in 0..params.couples {
        let ptype = weighted(&mut rng, &type_options);
        let sep = match ptype {
            PlantedType::SharedSingleton | PlantedType::SharedLast => 2,
            _ => weighted(&mut rng, &sep_options),
        };

        let (order0, order1) = match ptype {
            PlantedType::Disjoint => {
                if params.dual_market {
                    let l0 = draw_len(&mut rng, params.list_len, side1.len());
                    let l1 = draw_len(&mut rng, params.list_len, side2.len());
                    (
                        sample_order(&mut rng, side1, l0),
                        sample_order(&mut rng, side2, l1),
                    )
                } else {
                    let mut pool = all.clone();
                    pool.shuffle(&mut rng);
                    let l0 = draw_len(&mut rng, params.list_len, pool.len() - 1);
                    let l1 = draw_len(&mut rng, params.list_len, pool.len() - l0);
                    let second = pool.split_off(l0);
                    (pool, second[..l1].to_vec())
                }
            }
            PlantedType::SharedSingleton => {
                let common = *all.choose(&mut rng).unwrap();
                let singleton_side = rng.random_range(0..2usize);
                let mut rest: Vec<HospitalId> =
                    all.iter().copied().filter(|&h| h != common).collect();
                rest.shuffle(&mut rng);
                let total = draw_len(&mut rng, params.list_len, rest.len() + 1);
                rest.truncate(total.saturating_sub(1));
                rest.insert(rng.random_range(0..=rest.len()), common);
                singleton_constraints.push((ci, common, singleton_side));
                if singleton_side == 0 {
                    (vec![common], rest)
                } else {
                    (rest, vec![common])
                }
            }
            PlantedType::SharedLast => {
                let common = *all.choose(&mut rng).unwrap();
                let mut pool: Vec<HospitalId> =
                    all.iter().copied().filter(|&h| h != common).collect();
                pool.shuffle(&mut rng);
                let floor2 = (params.list_len.0.max(2), params.list_len.1);
                let t0 = draw_len(&mut rng, floor2, pool.len());
                let mut order0: Vec<HospitalId> = pool.drain(..t0 - 1).collect();
                let t1 = draw_len(&mut rng, floor2, pool.len() + 1);
                let mut order1: Vec<HospitalId> = pool.drain(..t1 - 1).collect();
                order0.push(common);
                order1.push(common);
                (order0, order1)
            }
            PlantedType::Free => {
                let l0 = draw_len(&mut rng, params.list_len, side1.len());
                let l1 = draw_len(&mut rng, params.list_len, side2.len());
                (
                    sample_order(&mut rng, side1, l0),
                    sample_order(&mut rng, side2, l1),
                )
            }
        };

        let mut slots0: Vec<Slot> = order0.into_iter().map(Some).collect();
        let mut slots1: Vec<Slot> = order1.into_iter().map(Some).collect();
        match sep {
            0 => {
                slots0.push(None);
                slots1.push(None);
            }
            1 => {
                // The employed side keeps a hospital while the partner sits
                // out, so "unmatched" goes into the other side's domain.
                if rng.random_range(0..2) == 0 {
                    slots1.push(None);
                } else {
                    slots0.push(None);
                }
            }
            _ => {}
        }

        let mut joint = Vec::with_capacity(slots0.len() * slots1.len());
        for &a in &slots0 {
            for &b in &slots1 {
                if a.is_some() || b.is_some() {
                    joint.push((a, b));
                }
            }
        }
        push_couple(
            &mut doctors,
            &mut couples,
            format!("c{}a", ci + 1),
            format!("c{}b", ci + 1),
            joint,
        );
    }

    let inst_partial = HrcInstance {
        doctors,
        couples,
        hospitals,
    };
    let mut lists: Vec<Vec<DoctorId>> = vec![Vec::new(); inst_partial.hospitals.len()];
    for d in 0..inst_partial.doctors.len() {
        for h in inst_partial.doctor_acceptable(d) {
            lists[h].push(d);
        }
    }
    for list in &mut lists {
        list.shuffle(&mut rng);
    }
    for &(ci, h, singleton_side) in &singleton_constraints {
        let members = inst_partial.couples[ci].members;
        let worse = members[singleton_side];
        let better = members[1 - singleton_side];
        let pw = lists[h].iter().position(|&d| d == worse).unwrap();
        let pb = lists[h].iter().position(|&d| d == better).unwrap();
        if pw < pb {
            lists[h].swap(pw, pb);
        }
    }

    let mut inst = inst_partial;
    for (h, list) in lists.into_iter().enumerate() {
        inst.hospitals[h].pref = list;
    }
    debug_assert!(inst.validate().is_empty());
    Ok(inst)
}

fn push_couple(
    doctors: &mut Vec<Doctor>,
    couples: &mut Vec<Couple>,
    first: String,
    second: String,
    joint: Vec<(Slot, Slot)>,
) -> CoupleId {
    let ci = couples.len();
    let m0 = doctors.len();
    doctors.push(Doctor {
        name: first,
        role: DoctorRole::Member { couple: ci, side: 0 },
    });
    doctors.push(Doctor {
        name: second,
        role: DoctorRole::Member { couple: ci, side: 1 },
    });
    couples.push(Couple {
        members: [m0, m0 + 1],
        joint,
    });
    ci
}

// ---------------------------------------------------------------------------
// Restricted marriage cores: shared shape checking
// ---------------------------------------------------------------------------

/// Class of one woman in the restricted core shape: strictly ordered list of
/// length at most three, or a single tie of exactly two men.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WomanClass {
    Strict,
    Tie([usize; 2]),
}

fn shape_err(subject: &str, message: impl Into<String>) -> GenError {
    GenError::SmtiShape {
        subject: subject.to_string(),
        message: message.into(),
    }
}

/// Checks the restricted core shape (men strict of length at most three;
/// women strict of length at most three or one tie of two) and returns each
/// woman's class. Mutuality is not required here: the builders work on the
/// mutual-edge graph and note dropped mentions.
fn smti_shape(smti: &SmtiInstance) -> Result<Vec<WomanClass>, GenError> {
    for man in &smti.men {
        if man.pref.len() > 3 {
            return Err(shape_err(&man.name, "list longer than three"));
        }
        for (i, w) in man.pref.iter().enumerate() {
            if man.pref[..i].contains(w) {
                return Err(shape_err(&man.name, "woman listed twice"));
            }
        }
    }
    if let Some(order) = &smti.man_order {
        let mut seen = vec![false; smti.men.len()];
        let ok = order.len() == smti.men.len()
            && order.iter().all(|&m| {
                m < smti.men.len() && !std::mem::replace(&mut seen[m], true)
            });
        if !ok {
            return Err(shape_err("manorder", "not a permutation of the men"));
        }
    }
    let mut classes = Vec::with_capacity(smti.women.len());
    for woman in &smti.women {
        let flat: Vec<usize> = woman.pref.iter().flatten().copied().collect();
        for (i, m) in flat.iter().enumerate() {
            if flat[..i].contains(m) {
                return Err(shape_err(&woman.name, "man listed twice"));
            }
        }
        let class = if woman.pref.len() == 1 && woman.pref[0].len() == 2 {
            WomanClass::Tie([woman.pref[0][0], woman.pref[0][1]])
        } else if woman.pref.iter().all(|g| g.len() == 1) && woman.pref.len() <= 3 {
            WomanClass::Strict
        } else {
            return Err(shape_err(
                &woman.name,
                "list must be strict of length at most three or one tie of two",
            ));
        };
        classes.push(class);
    }
    Ok(classes)
}

fn man_positions(smti: &SmtiInstance) -> Vec<usize> {
    let mut pos: Vec<usize> = (0..smti.men.len()).collect();
    if let Some(order) = &smti.man_order {
        for (p, &m) in order.iter().enumerate() {
            pos[m] = p;
        }
    }
    pos
}

fn mutual(smti: &SmtiInstance, u: usize, w: usize) -> bool {
    smti.men[u].pref.contains(&w) && smti.women[w].pref.iter().any(|g| g.contains(&u))
}

// ---------------------------------------------------------------------------
// Marriage core -> couples market
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum WomanSite {
    Strict {
        hospital: HospitalId,
    },
    Tie {
        /// Upper, middle and lower posts.
        posts: [HospitalId; 3],
        couple: CoupleId,
        /// Mutual neighbours in man-order: the earlier one enters at the
        /// upper post, the later one at the lower post.
        first: Option<usize>,
        second: Option<usize>,
    },
}

#[derive(Debug, Clone)]
struct ManGadget {
    fallback: HospitalId,
    dummies: [HospitalId; 3],
    anchor_couple: CoupleId,
    cycle_couple: CoupleId,
}

/// A couples market built from a restricted marriage core, with enough
/// bookkeeping to turn any complete weakly-stable core matching into a
/// stable matching of the market.
#[derive(Debug, Clone)]
pub struct SmtiHrcBuild {
    pub instance: HrcInstance,
    /// Header commentary: tie directions, dropped one-sided mentions,
    /// single-entry posts.
    pub notes: Vec<String>,
    man_single: Vec<DoctorId>,
    /// Per man: (woman, hospital standing for her in his list).
    man_target: Vec<Vec<(usize, HospitalId)>>,
    man_gadget: Vec<ManGadget>,
    woman_site: Vec<WomanSite>,
}

impl SmtiHrcBuild {
    /// The stable matching induced by a complete weakly-stable matching of
    /// the core, given as the woman assigned to each man.
    pub fn witness_matching(&self, wife: &[usize]) -> HrcMatching {
        let mut m = HrcMatching::empty(&self.instance);
        let mut husband: Vec<Option<usize>> = vec![None; self.woman_site.len()];
        for (u, &w) in wife.iter().enumerate() {
            husband[w] = Some(u);
            let target = self.man_target[u]
                .iter()
                .find(|&&(woman, _)| woman == w)
                .map(|&(_, h)| h)
                .expect("witness pairs a man with a woman he lists");
            m.assignment[self.man_single[u]] = Some(target);
        }
        for (wi, site) in self.woman_site.iter().enumerate() {
            if let WomanSite::Tie {
                posts,
                couple,
                first,
                ..
            } = site
            {
                let members = self.instance.couples[*couple].members;
                // When the earlier neighbour holds the upper post the couple
                // shifts down one notch; otherwise it takes the top pair.
                let upper_taken =
                    matches!((first, husband[wi]), (Some(f), Some(h)) if *f == h);
                if upper_taken {
                    m.assignment[members[0]] = Some(posts[1]);
                    m.assignment[members[1]] = Some(posts[2]);
                } else {
                    m.assignment[members[0]] = Some(posts[0]);
                    m.assignment[members[1]] = Some(posts[1]);
                }
            }
        }
        for g in &self.man_gadget {
            let anchor = self.instance.couples[g.anchor_couple].members;
            m.assignment[anchor[0]] = Some(g.fallback);
            m.assignment[anchor[1]] = Some(g.dummies[1]);
            let cycle = self.instance.couples[g.cycle_couple].members;
            m.assignment[cycle[0]] = Some(g.dummies[2]);
            m.assignment[cycle[1]] = Some(g.dummies[0]);
        }
        m
    }
}

/// Encodes a restricted marriage core as a couples market: one hospital per
/// strictly-ordered woman, a three-post gadget and a couple per tie woman,
/// and a fallback-plus-cycle gadget per man that forces his doctor out onto
/// the woman side. All hospitals have capacity one; every preference list
/// has length at most four; every couple is product-shaped and
/// responsive-consistent.
pub fn gen_from_smti(smti: &SmtiInstance) -> Result<SmtiHrcBuild, GenError> {
    let classes = smti_shape(smti)?;
    let pos = man_positions(smti);
    let mut notes = Vec::new();

    let mut hospitals: Vec<Hospital> = Vec::new();
    let hosp = |name: String, hospitals: &mut Vec<Hospital>| -> HospitalId {
        hospitals.push(Hospital {
            name,
            capacity: 1,
            pref: Vec::new(),
        });
        hospitals.len() - 1
    };

    // Woman-side hospitals first, then the man gadgets, so small cores keep
    // readable identifier blocks.
    let mut site_posts: Vec<[HospitalId; 3]> = Vec::new();
    let mut site_strict: Vec<HospitalId> = Vec::new();
    for (wi, woman) in smti.women.iter().enumerate() {
        match classes[wi] {
            WomanClass::Strict => {
                site_strict.push(hosp(format!("w_{}", woman.name), &mut hospitals));
                site_posts.push([0; 3]);
            }
            WomanClass::Tie(_) => {
                let posts = [
                    hosp(format!("w1_{}", woman.name), &mut hospitals),
                    hosp(format!("w2_{}", woman.name), &mut hospitals),
                    hosp(format!("w3_{}", woman.name), &mut hospitals),
                ];
                site_posts.push(posts);
                site_strict.push(usize::MAX);
            }
        }
    }
    let mut man_hosp: Vec<([HospitalId; 3], HospitalId)> = Vec::new();
    for man in &smti.men {
        let dummies = [
            hosp(format!("m1_{}", man.name), &mut hospitals),
            hosp(format!("m2_{}", man.name), &mut hospitals),
            hosp(format!("m3_{}", man.name), &mut hospitals),
        ];
        let fallback = hosp(format!("f_{}", man.name), &mut hospitals);
        man_hosp.push((dummies, fallback));
    }

    let mut doctors: Vec<Doctor> = Vec::new();
    let mut couples: Vec<Couple> = Vec::new();

    let mut man_single = Vec::with_capacity(smti.men.len());
    for man in &smti.men {
        man_single.push(doctors.len());
        doctors.push(Doctor {
            name: format!("d_{}", man.name),
            role: DoctorRole::Single { pref: Vec::new() },
        });
    }

    let mut woman_site: Vec<WomanSite> = Vec::with_capacity(smti.women.len());
    for (wi, woman) in smti.women.iter().enumerate() {
        match classes[wi] {
            WomanClass::Strict => woman_site.push(WomanSite::Strict {
                hospital: site_strict[wi],
            }),
            WomanClass::Tie(men) => {
                let posts = site_posts[wi];
                let mut neighbours: Vec<usize> = men
                    .iter()
                    .copied()
                    .filter(|&u| mutual(smti, u, wi))
                    .collect();
                neighbours.sort_by_key(|&u| pos[u]);
                for &u in men.iter() {
                    if !neighbours.contains(&u) {
                        notes.push(format!(
                            "{} ties {} who does not list her back; entry dropped",
                            woman.name, smti.men[u].name
                        ));
                    }
                }
                let [h1, h2, h3] = posts;
                let couple = push_couple(
                    &mut doctors,
                    &mut couples,
                    format!("cw1_{}", woman.name),
                    format!("cw2_{}", woman.name),
                    vec![
                        (Some(h2), Some(h2)),
                        (Some(h1), Some(h2)),
                        (Some(h2), Some(h3)),
                        (Some(h1), Some(h3)),
                    ],
                );
                let first = neighbours.first().copied();
                let second = neighbours.get(1).copied();
                match (first, second) {
                    (Some(a), Some(b)) => notes.push(format!(
                        "tie at {}: {} enters at {}, {} at {}",
                        woman.name,
                        smti.men[a].name,
                        hospitals[h1].name,
                        smti.men[b].name,
                        hospitals[h3].name
                    )),
                    (Some(a), None) => notes.push(format!(
                        "tie at {}: only {} is mutual; {} keeps a single-entry list",
                        woman.name,
                        smti.men[a].name,
                        hospitals[h3].name
                    )),
                    _ => notes.push(format!(
                        "tie at {}: no mutual neighbours; {} and {} keep single-entry lists",
                        woman.name, hospitals[h1].name, hospitals[h3].name
                    )),
                }
                woman_site.push(WomanSite::Tie {
                    posts,
                    couple,
                    first,
                    second,
                });
            }
        }
    }

    let mut man_gadget: Vec<ManGadget> = Vec::with_capacity(smti.men.len());
    for (ui, man) in smti.men.iter().enumerate() {
        let (dummies, fallback) = man_hosp[ui];
        let [m1, m2, m3] = dummies;
        let anchor_couple = push_couple(
            &mut doctors,
            &mut couples,
            format!("cm1_{}", man.name),
            format!("cm2_{}", man.name),
            vec![(Some(fallback), Some(m2)), (Some(m1), Some(m2))],
        );
        push_couple(
            &mut doctors,
            &mut couples,
            format!("cm3_{}", man.name),
            format!("cm4_{}", man.name),
            vec![(Some(m2), Some(m3))],
        );
        let cycle_couple = push_couple(
            &mut doctors,
            &mut couples,
            format!("cm5_{}", man.name),
            format!("cm6_{}", man.name),
            vec![(Some(m3), Some(m1))],
        );
        man_gadget.push(ManGadget {
            fallback,
            dummies,
            anchor_couple,
            cycle_couple,
        });
    }

    // Single doctors walk their man's list over the woman-side hospitals and
    // fall back on their own gadget.
    let mut man_target: Vec<Vec<(usize, HospitalId)>> = Vec::with_capacity(smti.men.len());
    for (ui, man) in smti.men.iter().enumerate() {
        let mut targets = Vec::new();
        for &w in &man.pref {
            if !mutual(smti, ui, w) {
                notes.push(format!(
                    "{} lists {} who does not list him back; entry dropped",
                    man.name, smti.women[w].name
                ));
                continue;
            }
            let h = match &woman_site[w] {
                WomanSite::Strict { hospital } => *hospital,
                WomanSite::Tie { posts, first, .. } => {
                    if *first == Some(ui) {
                        posts[0]
                    } else {
                        posts[2]
                    }
                }
            };
            targets.push((w, h));
        }
        let mut pref: Vec<HospitalId> = targets.iter().map(|&(_, h)| h).collect();
        pref.push(man_hosp[ui].1);
        doctors[man_single[ui]].role = DoctorRole::Single { pref };
        man_target.push(targets);
    }

    // Hospital lists.
    for (wi, woman) in smti.women.iter().enumerate() {
        match &woman_site[wi] {
            WomanSite::Strict { hospital } => {
                let mut pref = Vec::new();
                for group in &woman.pref {
                    let u = group[0];
                    if mutual(smti, u, wi) {
                        pref.push(man_single[u]);
                    } else {
                        notes.push(format!(
                            "{} lists {} who does not list her back; entry dropped",
                            woman.name, smti.men[u].name
                        ));
                    }
                }
                hospitals[*hospital].pref = pref;
            }
            WomanSite::Tie {
                posts,
                couple,
                first,
                second,
            } => {
                let members = couples[*couple].members;
                let mut upper = vec![members[0]];
                upper.extend(first.map(|u| man_single[u]));
                let mut lower = vec![members[1]];
                lower.extend(second.map(|u| man_single[u]));
                hospitals[posts[0]].pref = upper;
                hospitals[posts[1]].pref = vec![members[0], members[1]];
                hospitals[posts[2]].pref = lower;
            }
        }
    }
    for (ui, g) in man_gadget.iter().enumerate() {
        let anchor = couples[g.anchor_couple].members;
        let middle = couples[g.anchor_couple + 1].members;
        let cycle = couples[g.cycle_couple].members;
        hospitals[g.dummies[0]].pref = vec![cycle[1], anchor[0]];
        hospitals[g.dummies[1]].pref = vec![anchor[1], middle[0]];
        hospitals[g.dummies[2]].pref = vec![middle[1], cycle[0]];
        hospitals[g.fallback].pref = vec![man_single[ui], anchor[0]];
    }

    let instance = HrcInstance {
        doctors,
        couples,
        hospitals,
    };
    debug_assert!(instance.validate().is_empty());
    Ok(SmtiHrcBuild {
        instance,
        notes,
        man_single,
        man_target,
        man_gadget,
        woman_site,
    })
}

// ---------------------------------------------------------------------------
// (2,2)-E3-SAT -> dual market
// ---------------------------------------------------------------------------

/// Master preference lists: every individual list in the built instance is
/// an order-preserving sublist of the matching master list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterLists {
    pub couple_pairs: Vec<(Slot, Slot)>,
    pub single_hospitals: Vec<HospitalId>,
    pub hospital_doctors: Vec<DoctorId>,
}

/// True when `needle` appears in `hay` in order (not necessarily
/// contiguously).
pub fn is_subsequence<T: PartialEq>(needle: &[T], hay: &[T]) -> bool {
    let mut it = hay.iter();
    needle.iter().all(|n| it.by_ref().any(|h| h == n))
}

impl MasterLists {
    /// All lists of `inst` that fail the order-preserving-sublist property.
    pub fn violations(&self, inst: &HrcInstance) -> Vec<String> {
        let mut out = Vec::new();
        for c in &inst.couples {
            if !is_subsequence(&c.joint, &self.couple_pairs) {
                out.push(format!(
                    "couple ({}, {}) list is not a master sublist",
                    inst.doctors[c.members[0]].name, inst.doctors[c.members[1]].name
                ));
            }
        }
        for d in &inst.doctors {
            if let DoctorRole::Single { pref } = &d.role {
                if !is_subsequence(pref, &self.single_hospitals) {
                    out.push(format!("doctor {} list is not a master sublist", d.name));
                }
            }
        }
        for h in &inst.hospitals {
            if !is_subsequence(&h.pref, &self.hospital_doctors) {
                out.push(format!("hospital {} list is not a master sublist", h.name));
            }
        }
        out
    }
}

/// A dual market built from a (2,2)-occurrence exact-3-SAT formula, with
/// enough bookkeeping to turn a satisfying assignment into a stable
/// matching that fills the whole core.
#[derive(Debug, Clone)]
pub struct DualMarketBuild {
    pub instance: HrcInstance,
    /// Present when master lists were requested.
    pub master_lists: Option<MasterLists>,
    pub notes: Vec<String>,
    with_enforcers: bool,
    num_vars: usize,
    var_couples: Vec<CoupleId>,
    clause_couples: Vec<[CoupleId; 3]>,
    clause_single: Vec<(DoctorId, DoctorId)>,
    y_h: Vec<HospitalId>,
    l_h: Vec<HospitalId>,
    c_h: Vec<[HospitalId; 3]>,
    z_h: Vec<[HospitalId; 5]>,
    enforcer_couples: Vec<[CoupleId; 2]>,
    enforcer_single: Vec<DoctorId>,
    g_h: Vec<[HospitalId; 4]>,
}

impl DualMarketBuild {
    /// The stable matching encoding a satisfying assignment: true variables
    /// take the aligned row pairs, false ones the shifted row pairs, each
    /// clause routes its first satisfied literal, and enforcer gadgets park
    /// in their resting triple.
    pub fn witness_matching(&self, formula: &CnfFormula, assignment: &[bool]) -> HrcMatching {
        assert!(
            formula.satisfied_by(assignment),
            "witness requires a satisfying assignment"
        );
        let mut m = HrcMatching::empty(&self.instance);
        let inst = &self.instance;
        for i in 0..self.num_vars {
            for r in 0..4 {
                let e = 4 * i + r;
                let shift = if assignment[i] { 0 } else { 1 };
                let row = 4 * i + (r + shift) % 4;
                let members = inst.couples[self.var_couples[e]].members;
                m.assignment[members[0]] = Some(self.y_h[row]);
                m.assignment[members[1]] = Some(self.l_h[row]);
            }
        }
        for (j, clause) in formula.clauses.iter().enumerate() {
            let s = clause
                .iter()
                .position(|l| assignment[l.var] == l.positive)
                .expect("a satisfying assignment satisfies every clause");
            for b in 0..3 {
                let members = inst.couples[self.clause_couples[j][b]].members;
                if b == s {
                    m.assignment[members[0]] = Some(self.z_h[j][0]);
                    m.assignment[members[1]] = Some(self.z_h[j][1]);
                } else {
                    m.assignment[members[0]] = Some(self.c_h[j][b]);
                    m.assignment[members[1]] = Some(self.z_h[j][b + 2]);
                }
            }
            let (sj, tj) = self.clause_single[j];
            m.assignment[sj] = Some(self.c_h[j][s]);
            m.assignment[tj] = Some(self.z_h[j][s + 2]);
        }
        if self.with_enforcers {
            for e in 0..4 * self.num_vars {
                let waiting = inst.couples[self.enforcer_couples[e][1]].members;
                m.assignment[self.enforcer_single[e]] = Some(self.g_h[e][0]);
                m.assignment[waiting[0]] = Some(self.g_h[e][2]);
                m.assignment[waiting[1]] = Some(self.g_h[e][1]);
            }
        }
        m
    }
}

/// Builds the two-sided market encoding of a (2,2)-occurrence exact-3-SAT
/// formula: a four-row gadget per variable, a routing gadget per clause,
/// optional per-row enforcer gadgets that make every stable matching
/// complete, and optional master lists. Every list has length at most three
/// and every hospital capacity one.
pub fn gen_dual_market_from_sat(
    formula: &CnfFormula,
    with_enforcers: bool,
    emit_master_lists: bool,
) -> Result<DualMarketBuild, GenError> {
    formula.check_e3_22()?;
    let nv = formula.num_vars;
    let nc = formula.clauses.len();

    // Occurrence positions: (clause, 0-based slot) of the first and second
    // positive / negative occurrence of each variable.
    let mut pos_occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    let mut neg_occ: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (j, clause) in formula.clauses.iter().enumerate() {
        for (s, lit) in clause.iter().enumerate() {
            if lit.positive {
                pos_occ[lit.var].push((j, s));
            } else {
                neg_occ[lit.var].push((j, s));
            }
        }
    }

    let mut hospitals: Vec<Hospital> = Vec::new();
    let hosp = |name: String, hospitals: &mut Vec<Hospital>| -> HospitalId {
        hospitals.push(Hospital {
            name,
            capacity: 1,
            pref: Vec::new(),
        });
        hospitals.len() - 1
    };
    let y_h: Vec<HospitalId> = (0..4 * nv)
        .map(|e| hosp(format!("y{e}"), &mut hospitals))
        .collect();
    let l_h: Vec<HospitalId> = (0..4 * nv)
        .map(|e| hosp(format!("l{e}"), &mut hospitals))
        .collect();
    let c_h: Vec<[HospitalId; 3]> = (0..nc)
        .map(|j| std::array::from_fn(|s| hosp(format!("c{j}.{}", s + 1), &mut hospitals)))
        .collect();
    let z_h: Vec<[HospitalId; 5]> = (0..nc)
        .map(|j| std::array::from_fn(|r| hosp(format!("z{j}.{}", r + 1), &mut hospitals)))
        .collect();
    let g_h: Vec<[HospitalId; 4]> = if with_enforcers {
        (0..4 * nv)
            .map(|e| std::array::from_fn(|s| hosp(format!("g{e}.{}", s + 1), &mut hospitals)))
            .collect()
    } else {
        Vec::new()
    };

    // The clause hospital standing for a given occurrence of a literal.
    let occ_hosp = |occ: (usize, usize)| c_h[occ.0][occ.1];
    // Rows 0 and 1 carry the positive occurrences, rows 2 and 3 the negative.
    let c_of_row = |e: usize| {
        let (i, r) = (e / 4, e % 4);
        match r {
            0 => occ_hosp(pos_occ[i][0]),
            1 => occ_hosp(pos_occ[i][1]),
            2 => occ_hosp(neg_occ[i][0]),
            _ => occ_hosp(neg_occ[i][1]),
        }
    };

    let mut doctors: Vec<Doctor> = Vec::new();
    let mut couples: Vec<Couple> = Vec::new();

    let mut var_couples: Vec<CoupleId> = Vec::with_capacity(4 * nv);
    for i in 0..nv {
        for r in 0..4 {
            let e = 4 * i + r;
            let y = |k: usize| Some(y_h[4 * i + k]);
            let l = |k: usize| Some(l_h[4 * i + k]);
            let mid = Some(c_of_row(e));
            let joint = match r {
                0 => vec![(y(0), l(0)), (mid, l(1)), (y(1), l(1))],
                1 => vec![(y(1), l(1)), (mid, l(2)), (y(2), l(2))],
                2 => vec![(y(3), l(3)), (mid, l(2)), (y(2), l(2))],
                _ => vec![(y(0), l(0)), (mid, l(3)), (y(3), l(3))],
            };
            var_couples.push(push_couple(
                &mut doctors,
                &mut couples,
                format!("x{e}"),
                format!("k{e}"),
                joint,
            ));
        }
    }

    let mut clause_couples: Vec<[CoupleId; 3]> = Vec::with_capacity(nc);
    let mut clause_single: Vec<(DoctorId, DoctorId)> = Vec::with_capacity(nc);
    for j in 0..nc {
        let ids = std::array::from_fn(|b| {
            push_couple(
                &mut doctors,
                &mut couples,
                format!("p{j}.{}", b + 1),
                format!("p{j}.{}", b + 4),
                vec![
                    (Some(z_h[j][0]), Some(z_h[j][1])),
                    (Some(c_h[j][b]), Some(z_h[j][b + 2])),
                ],
            )
        });
        clause_couples.push(ids);
        let sj = doctors.len();
        doctors.push(Doctor {
            name: format!("s{j}"),
            role: DoctorRole::Single {
                pref: c_h[j].to_vec(),
            },
        });
        let tj = doctors.len();
        doctors.push(Doctor {
            name: format!("t{j}"),
            role: DoctorRole::Single {
                pref: z_h[j][2..5].to_vec(),
            },
        });
        clause_single.push((sj, tj));
    }

    let mut enforcer_couples: Vec<[CoupleId; 2]> = Vec::new();
    let mut enforcer_single: Vec<DoctorId> = Vec::new();
    if with_enforcers {
        for e in 0..4 * nv {
            let g = g_h[e];
            let resting = push_couple(
                &mut doctors,
                &mut couples,
                format!("u{e}.1"),
                format!("u{e}.2"),
                vec![(Some(g[0]), Some(g[1]))],
            );
            let waiting = push_couple(
                &mut doctors,
                &mut couples,
                format!("u{e}.3"),
                format!("u{e}.4"),
                vec![(Some(g[0]), Some(g[3])), (Some(g[2]), Some(g[1]))],
            );
            enforcer_couples.push([resting, waiting]);
            enforcer_single.push(doctors.len());
            doctors.push(Doctor {
                name: format!("u{e}.5"),
                role: DoctorRole::Single {
                    pref: vec![y_h[e], g[0]],
                },
            });
        }
    }

    // Hospital lists. Variable-row hospitals rank their two visitors in the
    // fixed pattern that makes exactly the aligned and shifted row matchings
    // stable; clause hospitals route their first satisfied literal.
    let x_doc = |e: usize| couples[var_couples[e]].members[0];
    let k_doc = |e: usize| couples[var_couples[e]].members[1];
    for i in 0..nv {
        let b = 4 * i;
        hospitals[y_h[b]].pref = vec![x_doc(b), x_doc(b + 3)];
        hospitals[y_h[b + 1]].pref = vec![x_doc(b + 1), x_doc(b)];
        hospitals[y_h[b + 2]].pref = vec![x_doc(b + 1), x_doc(b + 2)];
        hospitals[y_h[b + 3]].pref = vec![x_doc(b + 2), x_doc(b + 3)];
        hospitals[l_h[b]].pref = vec![k_doc(b + 3), k_doc(b)];
        hospitals[l_h[b + 1]].pref = vec![k_doc(b), k_doc(b + 1)];
        hospitals[l_h[b + 2]].pref = vec![k_doc(b + 2), k_doc(b + 1)];
        hospitals[l_h[b + 3]].pref = vec![k_doc(b + 3), k_doc(b + 2)];
    }
    // The variable-row doctor applying to a given clause hospital.
    let x_of_slot = |j: usize, s: usize| {
        let lit = formula.clauses[j][s];
        let occs = if lit.positive {
            &pos_occ[lit.var]
        } else {
            &neg_occ[lit.var]
        };
        let o = occs.iter().position(|&p| p == (j, s)).unwrap();
        let row = if lit.positive { o } else { 2 + o };
        x_doc(4 * lit.var + row)
    };
    for j in 0..nc {
        let p = |b: usize| couples[clause_couples[j][b]].members[0];
        let q = |b: usize| couples[clause_couples[j][b]].members[1];
        hospitals[z_h[j][0]].pref = vec![p(0), p(1), p(2)];
        hospitals[z_h[j][1]].pref = vec![q(2), q(1), q(0)];
        for s in 0..3 {
            hospitals[z_h[j][s + 2]].pref = vec![q(s), clause_single[j].1];
            hospitals[c_h[j][s]].pref = vec![p(s), x_of_slot(j, s), clause_single[j].0];
        }
    }
    if with_enforcers {
        for e in 0..4 * nv {
            let resting = couples[enforcer_couples[e][0]].members;
            let waiting = couples[enforcer_couples[e][1]].members;
            hospitals[y_h[e]].pref.push(enforcer_single[e]);
            hospitals[g_h[e][0]].pref = vec![enforcer_single[e], resting[0], waiting[0]];
            hospitals[g_h[e][1]].pref = vec![waiting[1], resting[1]];
            hospitals[g_h[e][2]].pref = vec![waiting[0]];
            hospitals[g_h[e][3]].pref = vec![waiting[1]];
        }
    }

    let master_lists = emit_master_lists.then(|| {
        let mut couple_pairs: Vec<(Slot, Slot)> = Vec::new();
        for i in 0..nv {
            let b = 4 * i;
            let y = |k: usize| Some(y_h[b + k]);
            let l = |k: usize| Some(l_h[b + k]);
            couple_pairs.extend([
                (y(0), l(0)),
                (Some(c_of_row(b)), l(1)),
                (y(1), l(1)),
                (Some(c_of_row(b + 1)), l(2)),
                (Some(c_of_row(b + 3)), l(3)),
                (y(3), l(3)),
                (Some(c_of_row(b + 2)), l(2)),
                (y(2), l(2)),
            ]);
        }
        if with_enforcers {
            for g in &g_h {
                couple_pairs.extend([
                    (Some(g[0]), Some(g[1])),
                    (Some(g[0]), Some(g[3])),
                    (Some(g[2]), Some(g[1])),
                ]);
            }
        }
        for j in 0..nc {
            couple_pairs.push((Some(z_h[j][0]), Some(z_h[j][1])));
            for s in 0..3 {
                couple_pairs.push((Some(c_h[j][s]), Some(z_h[j][s + 2])));
            }
        }

        let mut single_hospitals: Vec<HospitalId> = Vec::new();
        for j in 0..nc {
            single_hospitals.extend(c_h[j]);
            single_hospitals.extend(&z_h[j][2..5]);
        }
        if with_enforcers {
            for e in 0..4 * nv {
                single_hospitals.extend([y_h[e], g_h[e][0]]);
            }
        }

        let mut hospital_doctors: Vec<DoctorId> = Vec::new();
        for j in 0..nc {
            let p = |b: usize| couples[clause_couples[j][b]].members[0];
            let q = |b: usize| couples[clause_couples[j][b]].members[1];
            hospital_doctors.extend([p(0), p(1), p(2), q(2), q(1), q(0)]);
        }
        for i in 0..nv {
            let b = 4 * i;
            hospital_doctors.extend([
                x_doc(b + 1),
                x_doc(b),
                x_doc(b + 2),
                x_doc(b + 3),
                k_doc(b + 3),
                k_doc(b),
                k_doc(b + 2),
                k_doc(b + 1),
            ]);
        }
        for j in 0..nc {
            hospital_doctors.push(clause_single[j].0);
        }
        for j in 0..nc {
            hospital_doctors.push(clause_single[j].1);
        }
        if with_enforcers {
            for e in 0..4 * nv {
                let resting = couples[enforcer_couples[e][0]].members;
                let waiting = couples[enforcer_couples[e][1]].members;
                hospital_doctors.extend([
                    enforcer_single[e],
                    resting[0],
                    waiting[0],
                    waiting[1],
                    resting[1],
                ]);
            }
        }

        MasterLists {
            couple_pairs,
            single_hospitals,
            hospital_doctors,
        }
    });

    let notes = vec![
        format!("variables {nv}, clauses {nc}"),
        format!(
            "enforcer gadgets {}",
            if with_enforcers { "on" } else { "off" }
        ),
    ];
    let instance = HrcInstance {
        doctors,
        couples,
        hospitals,
    };
    debug_assert!(instance.validate().is_empty());
    Ok(DualMarketBuild {
        instance,
        master_lists,
        notes,
        with_enforcers,
        num_vars: nv,
        var_couples,
        clause_couples,
        clause_single,
        y_h,
        l_h,
        c_h,
        z_h,
        enforcer_couples,
        enforcer_single,
        g_h,
    })
}

// ---------------------------------------------------------------------------
// Marriage core -> blocking-pair amplification family
// ---------------------------------------------------------------------------

/// The blocking-pair amplification build. `replication` is the factor `B`:
/// a core with a complete weakly-stable matching yields a matching with at
/// most [`MinBpBuild::tie_women`] blocking pairs, a core without one forces
/// at least `B` in every matching.
#[derive(Debug, Clone)]
pub struct MinBpBuild {
    pub instance: HrcInstance,
    pub replication: u64,
    /// Number of tie women in the core.
    pub tie_women: usize,
    /// Number of mutual man-woman edges in the core.
    pub edge_count: usize,
    pub notes: Vec<String>,
}

/// Builds the amplification family over a restricted marriage core: one
/// capacity-one hospital per person, one single-pair couple per mutual edge
/// (replicated `B` times for strictly-ordered women), and `3B` triangle
/// couples around every woman hospital that punish leaving it empty. No
/// single doctors; every couple's members apply to disjoint hospitals.
///
/// `B` defaults to `t * e^c + 1` for `t` tie women, `e` mutual edges and
/// exponent `c`; the override replaces it and is recorded in the notes.
/// Ties are broken by a coin from `seed`, also recorded.
pub fn gen_minbp_from_smti(
    smti: &SmtiInstance,
    c_exponent: u32,
    b_override: Option<u64>,
    seed: u64,
) -> Result<MinBpBuild, GenError> {
    let classes = smti_shape(smti)?;
    if c_exponent == 0 {
        return Err(GenError::Mix("the exponent must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut notes = Vec::new();

    // Mutual edges in man-major order.
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (u, man) in smti.men.iter().enumerate() {
        for &w in &man.pref {
            if mutual(smti, u, w) {
                edges.push((u, w));
            } else {
                notes.push(format!(
                    "{} lists {} who does not list him back; entry dropped",
                    man.name, smti.women[w].name
                ));
            }
        }
    }
    let m_edges = edges.len();
    let n_tie = classes
        .iter()
        .filter(|c| matches!(c, WomanClass::Tie(_)))
        .count();

    let formula_b = (m_edges as u128)
        .checked_pow(c_exponent)
        .and_then(|p| p.checked_mul(n_tie as u128))
        .and_then(|p| p.checked_add(1))
        .ok_or(GenError::TooLarge { couples: u128::MAX })?;
    let b_used = match b_override {
        Some(b) => {
            notes.push(format!(
                "replication factor {b} (override; formula value {formula_b})"
            ));
            b as u128
        }
        None => {
            notes.push(format!("replication factor {formula_b} (formula value)"));
            formula_b
        }
    };
    if b_used == 0 {
        return Err(GenError::Mix("the replication factor must be positive".into()));
    }
    let strict_edges = edges
        .iter()
        .filter(|&&(_, w)| classes[w] == WomanClass::Strict)
        .count() as u128;
    let tie_edges = m_edges as u128 - strict_edges;
    let total_couples = strict_edges * b_used + tie_edges + 3 * b_used * smti.women.len() as u128;
    if total_couples > 1_000_000 {
        return Err(GenError::TooLarge {
            couples: total_couples,
        });
    }
    let b_used = b_used as u64;

    let mut hospitals: Vec<Hospital> = Vec::new();
    let hosp = |name: String, hospitals: &mut Vec<Hospital>| -> HospitalId {
        hospitals.push(Hospital {
            name,
            capacity: 1,
            pref: Vec::new(),
        });
        hospitals.len() - 1
    };
    let hu: Vec<HospitalId> = smti
        .men
        .iter()
        .map(|man| hosp(format!("hu_{}", man.name), &mut hospitals))
        .collect();
    let mut hw = Vec::with_capacity(smti.women.len());
    let mut hw_upper = Vec::with_capacity(smti.women.len());
    let mut hw_lower = Vec::with_capacity(smti.women.len());
    for woman in &smti.women {
        hw.push(hosp(format!("hw_{}", woman.name), &mut hospitals));
        hw_upper.push(hosp(format!("hp_{}", woman.name), &mut hospitals));
        hw_lower.push(hosp(format!("hq_{}", woman.name), &mut hospitals));
    }

    let mut doctors: Vec<Doctor> = Vec::new();
    let mut couples: Vec<Couple> = Vec::new();

    // Edge couples: one per tie-woman edge, `B` per strict-woman edge.
    // Member `a` applies to the man's hospital, member `b` to the woman's.
    let mut edge_couples: Vec<Vec<CoupleId>> = Vec::with_capacity(m_edges);
    for (ei, &(u, w)) in edges.iter().enumerate() {
        let copies = if classes[w] == WomanClass::Strict {
            b_used
        } else {
            1
        };
        let mut ids = Vec::with_capacity(copies as usize);
        for k in 1..=copies {
            let suffix = if copies == 1 {
                format!("e{ei}")
            } else {
                format!("e{ei}.{k}")
            };
            ids.push(push_couple(
                &mut doctors,
                &mut couples,
                format!("{suffix}a"),
                format!("{suffix}b"),
                vec![(Some(hu[u]), Some(hw[w]))],
            ));
        }
        edge_couples.push(ids);
    }

    // Triangle couples: (hw, hp), (hp, hq), (hq, hw), replicated B times.
    let mut triangle: Vec<[Vec<CoupleId>; 3]> = Vec::with_capacity(smti.women.len());
    for (wi, woman) in smti.women.iter().enumerate() {
        let corners = [
            (hw[wi], hw_upper[wi]),
            (hw_upper[wi], hw_lower[wi]),
            (hw_lower[wi], hw[wi]),
        ];
        let mut per_corner: [Vec<CoupleId>; 3] = Default::default();
        for (n, &(from, to)) in corners.iter().enumerate() {
            for k in 1..=b_used {
                per_corner[n].push(push_couple(
                    &mut doctors,
                    &mut couples,
                    format!("t{}_{}.{k}", 2 * n + 1, woman.name),
                    format!("t{}_{}.{k}", 2 * n + 2, woman.name),
                    vec![(Some(from), Some(to))],
                ));
            }
        }
        triangle.push(per_corner);
    }

    // Hospital lists. Men's hospitals walk the man's list; women's walk the
    // (tie-broken) list and then the triangle entries.
    for (u, man) in smti.men.iter().enumerate() {
        let mut pref = Vec::new();
        for &w in &man.pref {
            if let Some(ei) = edges.iter().position(|&e| e == (u, w)) {
                for &ci in &edge_couples[ei] {
                    pref.push(couples[ci].members[0]);
                }
            }
        }
        hospitals[hu[u]].pref = pref;
    }
    for (wi, woman) in smti.women.iter().enumerate() {
        let mut order: Vec<usize> = Vec::new();
        match classes[wi] {
            WomanClass::Strict => {
                for group in &woman.pref {
                    if mutual(smti, group[0], wi) {
                        order.push(group[0]);
                    } else {
                        notes.push(format!(
                            "{} lists {} who does not list her back; entry dropped",
                            woman.name, smti.men[group[0]].name
                        ));
                    }
                }
            }
            WomanClass::Tie(men) => {
                order = men.iter().copied().filter(|&u| mutual(smti, u, wi)).collect();
                if order.len() == 2 && rng.random_bool(0.5) {
                    order.swap(0, 1);
                }
                if order.len() == 2 {
                    notes.push(format!(
                        "tie at {} broken as {} before {}",
                        woman.name, smti.men[order[0]].name, smti.men[order[1]].name
                    ));
                }
            }
        }
        let mut pref = Vec::new();
        for u in order {
            let ei = edges.iter().position(|&e| e == (u, wi)).unwrap();
            for &ci in &edge_couples[ei] {
                pref.push(couples[ci].members[1]);
            }
        }
        for &ci in &triangle[wi][0] {
            pref.push(couples[ci].members[0]);
        }
        for &ci in &triangle[wi][2] {
            pref.push(couples[ci].members[1]);
        }
        hospitals[hw[wi]].pref = pref;

        let mut upper = Vec::new();
        for &ci in &triangle[wi][1] {
            upper.push(couples[ci].members[0]);
        }
        for &ci in &triangle[wi][0] {
            upper.push(couples[ci].members[1]);
        }
        hospitals[hw_upper[wi]].pref = upper;

        let mut lower = Vec::new();
        for &ci in &triangle[wi][2] {
            lower.push(couples[ci].members[0]);
        }
        for &ci in &triangle[wi][1] {
            lower.push(couples[ci].members[1]);
        }
        hospitals[hw_lower[wi]].pref = lower;
    }

    let instance = HrcInstance {
        doctors,
        couples,
        hospitals,
    };
    debug_assert!(instance.validate().is_empty());
    Ok(MinBpBuild {
        instance,
        replication: b_used,
        tie_women: n_tie,
        edge_count: m_edges,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify_couple, detect_dual_market, CoupleType, Lit, SmtiMan, SmtiWoman};
    use crate::stability::check_stability;

    fn only(mix_field: &str) -> CoupleMix {
        let mut m = CoupleMix {
            separable: 0,
            half_separable: 0,
            connected: 0,
            type_a: 0,
            type_b: 0,
            type_c: 0,
            unrestricted: 0,
        };
        match mix_field {
            "a" => m.type_a = 1,
            "b" => m.type_b = 1,
            "c" => m.type_c = 1,
            _ => m.unrestricted = 1,
        }
        m.separable = 1;
        m.half_separable = 1;
        m.connected = 1;
        m
    }

    #[test]
    fn same_seed_reproduces_the_instance() {
        let params = GenParams {
            seed: 99,
            singles: 5,
            couples: 4,
            hospitals: 5,
            ..GenParams::default()
        };
        assert_eq!(gen_random(&params).unwrap(), gen_random(&params).unwrap());
        let other = GenParams {
            seed: 100,
            ..params.clone()
        };
        assert_ne!(gen_random(&params).unwrap(), gen_random(&other).unwrap());
    }

    #[test]
    fn planted_types_classify_as_requested() {
        for (key, want) in [
            ("a", CoupleType::A),
            ("b", CoupleType::B),
            ("c", CoupleType::C),
        ] {
            let params = GenParams {
                seed: 7,
                singles: 2,
                couples: 6,
                hospitals: 5,
                mix: only(key),
                ..GenParams::default()
            };
            let inst = gen_random(&params).unwrap();
            assert!(inst.validate().is_empty());
            for c in 0..inst.couples.len() {
                let profile = classify_couple(&inst, c);
                assert!(profile.sub_responsive && profile.sub_complete);
                assert_eq!(profile.couple_type, want, "mix {key}, couple {c}");
            }
        }
    }

    #[test]
    fn every_couple_is_product_shaped_with_the_planted_orders() {
        let params = GenParams {
            seed: 3,
            singles: 3,
            couples: 10,
            hospitals: 6,
            ..GenParams::default()
        };
        let inst = gen_random(&params).unwrap();
        for c in 0..inst.couples.len() {
            let profile = classify_couple(&inst, c);
            assert!(profile.sub_responsive && profile.sub_complete);
            // The joint list is emitted best-first per member, so first
            // appearance recovers the planted individual orders.
            let mut seen0 = Vec::new();
            let mut seen1 = Vec::new();
            for &(a, b) in &inst.couples[c].joint {
                if !seen0.contains(&a) {
                    seen0.push(a);
                }
                if !seen1.contains(&b) {
                    seen1.push(b);
                }
            }
            assert_eq!(profile.order_first, seen0);
            assert_eq!(profile.order_second, seen1);
        }
    }

    #[test]
    fn dual_market_request_plants_a_two_sided_split() {
        let params = GenParams {
            seed: 11,
            singles: 4,
            couples: 5,
            hospitals: 6,
            mix: only("a"),
            dual_market: true,
            ..GenParams::default()
        };
        let inst = gen_random(&params).unwrap();
        assert!(inst.validate().is_empty());
        let dual = detect_dual_market(&inst).expect("planted split");
        for c in 0..inst.couples.len() {
            for h in inst.member_projection(c, 0) {
                assert_eq!(dual.hospital_side[h], 1);
            }
            for h in inst.member_projection(c, 1) {
                assert_eq!(dual.hospital_side[h], 2);
            }
        }
    }

    #[test]
    fn impossible_mixes_are_rejected() {
        let base = GenParams::default();
        let dual_shared = GenParams {
            dual_market: true,
            mix: only("b"),
            ..base.clone()
        };
        assert!(matches!(gen_random(&dual_shared), Err(GenError::Mix(_))));
        let no_hospitals = GenParams {
            hospitals: 0,
            couples: 0,
            ..base.clone()
        };
        assert!(matches!(gen_random(&no_hospitals), Err(GenError::Mix(_))));
        let shared_last_short_lists = GenParams {
            list_len: (1, 1),
            mix: only("c"),
            ..base
        };
        assert!(matches!(
            gen_random(&shared_last_short_lists),
            Err(GenError::Mix(_))
        ));
    }

    fn tie_square() -> SmtiInstance {
        // m1: w1 > w2; m2: w1; w1 ties {m1, m2}; w2 lists m1.
        SmtiInstance {
            men: vec![
                SmtiMan {
                    name: "m1".into(),
                    pref: vec![0, 1],
                },
                SmtiMan {
                    name: "m2".into(),
                    pref: vec![0],
                },
            ],
            women: vec![
                SmtiWoman {
                    name: "w1".into(),
                    pref: vec![vec![0, 1]],
                },
                SmtiWoman {
                    name: "w2".into(),
                    pref: vec![vec![0]],
                },
            ],
            man_order: None,
        }
    }

    #[test]
    fn marriage_encoding_has_the_documented_shape() {
        let build = gen_from_smti(&tie_square()).unwrap();
        let inst = &build.instance;
        assert!(inst.validate().is_empty());
        // 3 posts for the tie woman + 1 strict hospital + 4 per man.
        assert_eq!(inst.hospitals.len(), 3 + 1 + 8);
        // 1 tie couple + 3 couples per man, 2 single doctors.
        assert_eq!(inst.couples.len(), 7);
        assert_eq!(inst.doctors.len(), 2 + 14);
        assert!(inst.hospitals.iter().all(|h| h.capacity == 1));
        for d in 0..inst.doctors.len() {
            assert!(inst.doctor_acceptable(d).len() <= 4);
        }
        for h in &inst.hospitals {
            assert!(h.pref.len() <= 3);
        }
        for c in 0..inst.couples.len() {
            let p = classify_couple(inst, c);
            assert!(p.sub_responsive && p.sub_complete);
        }
        assert!(build.notes.iter().any(|n| n.contains("tie at w1")));
    }

    #[test]
    fn marriage_witness_is_stable() {
        let build = gen_from_smti(&tie_square()).unwrap();
        // The only complete weakly-stable core matching: m1-w2, m2-w1.
        let witness = build.witness_matching(&[1, 0]);
        let report = check_stability(&build.instance, &witness);
        assert!(report.feasibility.is_empty(), "{:?}", report.feasibility);
        assert!(report.blocking.is_empty(), "{:?}", report.blocking);
    }

    #[test]
    fn out_of_shape_cores_are_rejected() {
        let mut tie_of_three = tie_square();
        tie_of_three.men.push(SmtiMan {
            name: "m3".into(),
            pref: vec![0],
        });
        tie_of_three.women[0].pref = vec![vec![0, 1, 2]];
        assert!(matches!(
            gen_from_smti(&tie_of_three),
            Err(GenError::SmtiShape { .. })
        ));
        let mut tie_plus_tail = tie_square();
        tie_plus_tail.women[0].pref = vec![vec![0, 1], vec![0]];
        assert!(matches!(
            gen_from_smti(&tie_plus_tail),
            Err(GenError::SmtiShape { .. })
        ));
        let mut long_list = tie_square();
        long_list.men[0].pref = vec![0, 1, 0, 1];
        assert!(matches!(
            gen_from_smti(&long_list),
            Err(GenError::SmtiShape { .. })
        ));
    }

    fn tiny_formula() -> CnfFormula {
        let lit = |var: usize, positive: bool| Lit { var, positive };
        CnfFormula {
            num_vars: 3,
            clauses: vec![
                vec![lit(0, true), lit(1, true), lit(2, true)],
                vec![lit(0, true), lit(1, false), lit(2, false)],
                vec![lit(0, false), lit(1, true), lit(2, false)],
                vec![lit(0, false), lit(1, false), lit(2, true)],
            ],
        }
    }

    #[test]
    fn sat_encoding_is_a_capacity_one_dual_market() {
        let build = gen_dual_market_from_sat(&tiny_formula(), false, false).unwrap();
        let inst = &build.instance;
        assert!(inst.validate().is_empty());
        assert!(inst.hospitals.iter().all(|h| h.capacity == 1));
        for d in 0..inst.doctors.len() {
            assert!(inst.doctor_acceptable(d).len() <= 3);
        }
        for h in &inst.hospitals {
            assert!(h.pref.len() <= 3);
        }
        assert!(detect_dual_market(inst).is_some());
    }

    #[test]
    fn sat_witness_fills_the_core_and_is_stable() {
        let formula = tiny_formula();
        let assignment = [true, true, true];
        assert!(formula.satisfied_by(&assignment));
        for enforcers in [false, true] {
            let build = gen_dual_market_from_sat(&formula, enforcers, false).unwrap();
            let witness = build.witness_matching(&formula, &assignment);
            let report = check_stability(&build.instance, &witness);
            assert!(report.feasibility.is_empty(), "{:?}", report.feasibility);
            assert!(report.blocking.is_empty(), "{:?}", report.blocking);
            for (d, doc) in build.instance.doctors.iter().enumerate() {
                let resting = doc.name.starts_with('u')
                    && (doc.name.ends_with(".1") || doc.name.ends_with(".2"));
                assert_eq!(
                    witness.assignment[d].is_none(),
                    resting,
                    "doctor {}",
                    doc.name
                );
            }
        }
    }

    #[test]
    fn master_lists_cover_every_preference_list() {
        let build = gen_dual_market_from_sat(&tiny_formula(), true, true).unwrap();
        let masters = build.master_lists.as_ref().expect("requested");
        assert_eq!(masters.violations(&build.instance), Vec::<String>::new());
        assert!(detect_dual_market(&build.instance).is_some());
    }

    #[test]
    fn subsequence_check_is_order_sensitive() {
        assert!(is_subsequence(&[1, 3], &[1, 2, 3]));
        assert!(!is_subsequence(&[3, 1], &[1, 2, 3]));
        assert!(is_subsequence::<u32>(&[], &[]));
    }

    #[test]
    fn amplification_family_is_pairs_only() {
        let build = gen_minbp_from_smti(&tie_square(), 2, Some(3), 0).unwrap();
        let inst = &build.instance;
        assert!(inst.validate().is_empty());
        assert_eq!(build.replication, 3);
        assert_eq!(build.tie_women, 1);
        assert_eq!(build.edge_count, 3);
        // 2 tie edges + 3 copies of the strict edge + 3B per woman.
        assert_eq!(inst.couples.len(), 2 + 3 + 18);
        assert!(inst.hospitals.iter().all(|h| h.capacity == 1));
        for (c, couple) in inst.couples.iter().enumerate() {
            assert_eq!(couple.joint.len(), 1);
            let p = classify_couple(inst, c);
            assert_eq!(p.couple_type, CoupleType::A);
        }
        assert!(inst
            .doctors
            .iter()
            .all(|d| matches!(d.role, DoctorRole::Member { .. })));
        assert!(build.notes.iter().any(|n| n.contains("override")));
        assert!(build.notes.iter().any(|n| n.contains("tie at w1 broken")));
    }

    #[test]
    fn replication_defaults_to_the_formula_value() {
        let build = gen_minbp_from_smti(&tie_square(), 2, None, 0).unwrap();
        // 1 tie woman, 3 edges, exponent 2.
        assert_eq!(build.replication, 10);
        let too_big = gen_minbp_from_smti(&tie_square(), 20, None, 0);
        assert!(matches!(too_big, Err(GenError::TooLarge { .. })));
    }
}
