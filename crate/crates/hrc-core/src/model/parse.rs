//! Line-oriented text formats for instances and matchings.
//!
//! All formats share the same lexical rules: `#` starts a comment running to
//! the end of the line, tokens are separated by whitespace, and blank lines
//! are ignored. Identifiers may not be `-`, `:`, `(` or `)` and may not
//! contain `,`, since those characters carry syntax.

use super::cnf::{CnfFormula, Lit};
use super::multigraph::{MgEdge, MgNode, MultigraphInstance};
use super::smti::{SmtiInstance, SmtiMan, SmtiWoman};
use super::{Couple, Doctor, DoctorRole, Hospital, HrcInstance, HrcMatching, Slot};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        msg: msg.into(),
    }
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    line: usize,
    col: usize,
    s: &'a str,
}

impl<'a> Tok<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        perr(self.line, self.col, msg)
    }
}

/// Split the source into non-empty token lines, tracking 1-based columns.
fn tokenize(src: &str) -> Vec<Vec<Tok<'_>>> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let mut toks = Vec::new();
        let mut col = 0usize;
        let mut start: Option<(usize, usize)> = None;
        for (bi, ch) in body.char_indices() {
            col += 1;
            if ch.is_whitespace() {
                if let Some((sb, sc)) = start.take() {
                    toks.push(Tok {
                        line: i + 1,
                        col: sc,
                        s: &body[sb..bi],
                    });
                }
            } else if start.is_none() {
                start = Some((bi, col));
            }
        }
        if let Some((sb, sc)) = start {
            toks.push(Tok {
                line: i + 1,
                col: sc,
                s: &body[sb..],
            });
        }
        if !toks.is_empty() {
            out.push(toks);
        }
    }
    out
}

fn check_ident(tok: &Tok<'_>) -> Result<(), ParseError> {
    if matches!(tok.s, "-" | ":" | "(" | ")") {
        return Err(tok.err(format!("'{}' cannot be used as an identifier", tok.s)));
    }
    if tok.s.contains(',') {
        return Err(tok.err("identifiers must not contain ','"));
    }
    Ok(())
}

fn expect_colon(line: &[Tok<'_>], pos: usize) -> Result<(), ParseError> {
    match line.get(pos) {
        Some(t) if t.s == ":" => Ok(()),
        Some(t) => Err(t.err("expected ':'")),
        None => Err(line[line.len() - 1].err("expected ':' after this token")),
    }
}

fn need<'a, 'b>(line: &'b [Tok<'a>], pos: usize, what: &str) -> Result<&'b Tok<'a>, ParseError> {
    line.get(pos)
        .ok_or_else(|| line[line.len() - 1].err(format!("expected {what} after this token")))
}

fn no_extra(line: &[Tok<'_>], upto: usize) -> Result<(), ParseError> {
    match line.get(upto) {
        Some(t) => Err(t.err("unexpected trailing token")),
        None => Ok(()),
    }
}

fn parse_cap(tok: &Tok<'_>) -> Result<u32, ParseError> {
    tok.s
        .parse::<u32>()
        .map_err(|_| tok.err(format!("invalid capacity '{}'", tok.s)))
}

/// Parse a hospitals/residents instance with couples.
///
/// Directives (any order, one per line):
/// - `hospital <id> <capacity>`
/// - `single <id> : <hospital>...`
/// - `couple <id1> <id2> : <slot>,<slot> ...` where a slot is a hospital
///   id or `-` for staying unmatched
/// - `hpref <hospital> : <doctor>...`
pub fn parse_hrc(src: &str) -> Result<HrcInstance, ParseError> {
    let lines = tokenize(src);

    let mut hospitals: Vec<Hospital> = Vec::new();
    let mut hosp_idx: HashMap<String, usize> = HashMap::new();
    let mut doctors: Vec<Doctor> = Vec::new();
    let mut doc_idx: HashMap<String, usize> = HashMap::new();
    let mut couples: Vec<Couple> = Vec::new();

    // First pass: declarations, so later lines can refer to anything.
    for line in &lines {
        match line[0].s {
            "hospital" => {
                let name = need(line, 1, "a hospital identifier")?;
                check_ident(name)?;
                let cap = parse_cap(need(line, 2, "a capacity")?)?;
                no_extra(line, 3)?;
                if hosp_idx.contains_key(name.s) {
                    return Err(name.err(format!("duplicate hospital '{}'", name.s)));
                }
                hosp_idx.insert(name.s.to_string(), hospitals.len());
                hospitals.push(Hospital {
                    name: name.s.to_string(),
                    capacity: cap,
                    pref: Vec::new(),
                });
            }
            "single" => {
                let name = need(line, 1, "a doctor identifier")?;
                check_ident(name)?;
                if doc_idx.contains_key(name.s) {
                    return Err(name.err(format!("duplicate doctor '{}'", name.s)));
                }
                doc_idx.insert(name.s.to_string(), doctors.len());
                doctors.push(Doctor {
                    name: name.s.to_string(),
                    role: DoctorRole::Single { pref: Vec::new() },
                });
            }
            "couple" => {
                let a = need(line, 1, "a doctor identifier")?;
                let b = need(line, 2, "a doctor identifier")?;
                check_ident(a)?;
                check_ident(b)?;
                let couple = couples.len();
                for (side, tok) in [a, b].into_iter().enumerate() {
                    if doc_idx.contains_key(tok.s) {
                        return Err(tok.err(format!("duplicate doctor '{}'", tok.s)));
                    }
                    doc_idx.insert(tok.s.to_string(), doctors.len());
                    doctors.push(Doctor {
                        name: tok.s.to_string(),
                        role: DoctorRole::Member { couple, side },
                    });
                }
                couples.push(Couple {
                    members: [doctors.len() - 2, doctors.len() - 1],
                    joint: Vec::new(),
                });
            }
            "hpref" => {}
            _ => return Err(line[0].err(format!("unknown directive '{}'", line[0].s))),
        }
    }

    // Second pass: resolve preference lists.
    let mut seen_hpref = vec![false; hospitals.len()];
    for line in &lines {
        match line[0].s {
            "single" => {
                let name = &line[1];
                expect_colon(line, 2)?;
                let mut pref = Vec::new();
                for tok in &line[3..] {
                    let &h = hosp_idx
                        .get(tok.s)
                        .ok_or_else(|| tok.err(format!("unknown hospital '{}'", tok.s)))?;
                    pref.push(h);
                }
                doctors[doc_idx[name.s]].role = DoctorRole::Single { pref };
            }
            "couple" => {
                let ci = match doctors[doc_idx[line[1].s]].role {
                    DoctorRole::Member { couple, .. } => couple,
                    _ => unreachable!(),
                };
                expect_colon(line, 3)?;
                let mut joint = Vec::new();
                for tok in &line[4..] {
                    let parts: Vec<&str> = tok.s.split(',').collect();
                    if parts.len() != 2 || parts[0].is_empty() || parts[1].is_empty() {
                        return Err(tok.err(format!(
                            "malformed pair '{}': expected <slot>,<slot>",
                            tok.s
                        )));
                    }
                    let mut slots: [Slot; 2] = [None, None];
                    for (k, p) in parts.iter().enumerate() {
                        slots[k] = if *p == "-" {
                            None
                        } else {
                            Some(*hosp_idx.get(*p).ok_or_else(|| {
                                tok.err(format!("unknown hospital '{p}'"))
                            })?)
                        };
                    }
                    if slots[0].is_none() && slots[1].is_none() {
                        return Err(tok.err("pair with both slots unmatched"));
                    }
                    joint.push((slots[0], slots[1]));
                }
                couples[ci].joint = joint;
            }
            "hpref" => {
                let name = need(line, 1, "a hospital identifier")?;
                let &h = hosp_idx
                    .get(name.s)
                    .ok_or_else(|| name.err(format!("unknown hospital '{}'", name.s)))?;
                if seen_hpref[h] {
                    return Err(name.err(format!("duplicate hpref for hospital '{}'", name.s)));
                }
                seen_hpref[h] = true;
                expect_colon(line, 2)?;
                let mut pref = Vec::new();
                for tok in &line[3..] {
                    let &d = doc_idx
                        .get(tok.s)
                        .ok_or_else(|| tok.err(format!("unknown doctor '{}'", tok.s)))?;
                    pref.push(d);
                }
                hospitals[h].pref = pref;
            }
            _ => {}
        }
    }

    Ok(HrcInstance {
        doctors,
        couples,
        hospitals,
    })
}

/// Parse a matching for `inst`: `match <doctor> <hospital-or-->` lines plus
/// optional `capacity <hospital> <cap>` overrides. Unmentioned doctors are
/// unmatched; unmentioned hospitals keep their declared capacity.
pub fn parse_matching(src: &str, inst: &HrcInstance) -> Result<HrcMatching, ParseError> {
    let (docs, hosps) = inst.name_maps();
    let mut m = HrcMatching::empty(inst);
    let mut seen_match = vec![false; inst.doctors.len()];
    let mut seen_cap = vec![false; inst.hospitals.len()];

    for line in tokenize(src) {
        match line[0].s {
            "match" => {
                let dtok = need(&line, 1, "a doctor identifier")?;
                let stok = need(&line, 2, "a hospital or '-'")?;
                no_extra(&line, 3)?;
                let &d = docs
                    .get(dtok.s)
                    .ok_or_else(|| dtok.err(format!("unknown doctor '{}'", dtok.s)))?;
                if seen_match[d] {
                    return Err(dtok.err(format!("doctor '{}' matched twice", dtok.s)));
                }
                seen_match[d] = true;
                m.assignment[d] = if stok.s == "-" {
                    None
                } else {
                    Some(*hosps.get(stok.s).ok_or_else(|| {
                        stok.err(format!("unknown hospital '{}'", stok.s))
                    })?)
                };
            }
            "capacity" => {
                let htok = need(&line, 1, "a hospital identifier")?;
                let ctok = need(&line, 2, "a capacity")?;
                no_extra(&line, 3)?;
                let &h = hosps
                    .get(htok.s)
                    .ok_or_else(|| htok.err(format!("unknown hospital '{}'", htok.s)))?;
                if seen_cap[h] {
                    return Err(htok.err(format!("capacity for '{}' given twice", htok.s)));
                }
                seen_cap[h] = true;
                m.capacities[h] = parse_cap(ctok)?;
            }
            _ => return Err(line[0].err(format!("unknown directive '{}'", line[0].s))),
        }
    }
    Ok(m)
}

/// Parse a capacitated multigraph with per-node edge rankings.
///
/// Directives: `node <id> <capacity>`, `edge <id> <u> <v>` (a loop when
/// `u == v`), `npref <node> : <edge>...`.
pub fn parse_multigraph(src: &str) -> Result<MultigraphInstance, ParseError> {
    let lines = tokenize(src);

    let mut nodes: Vec<MgNode> = Vec::new();
    let mut node_idx: HashMap<String, usize> = HashMap::new();
    for line in &lines {
        match line[0].s {
            "node" => {
                let name = need(line, 1, "a node identifier")?;
                check_ident(name)?;
                let cap = parse_cap(need(line, 2, "a capacity")?)?;
                no_extra(line, 3)?;
                if node_idx.contains_key(name.s) {
                    return Err(name.err(format!("duplicate node '{}'", name.s)));
                }
                node_idx.insert(name.s.to_string(), nodes.len());
                nodes.push(MgNode {
                    name: name.s.to_string(),
                    capacity: cap,
                    pref: Vec::new(),
                });
            }
            "edge" | "npref" => {}
            _ => return Err(line[0].err(format!("unknown directive '{}'", line[0].s))),
        }
    }

    let mut edges: Vec<MgEdge> = Vec::new();
    let mut edge_idx: HashMap<String, usize> = HashMap::new();
    for line in &lines {
        if line[0].s != "edge" {
            continue;
        }
        let name = need(line, 1, "an edge identifier")?;
        check_ident(name)?;
        let u = need(line, 2, "a node identifier")?;
        let v = need(line, 3, "a node identifier")?;
        no_extra(line, 4)?;
        if edge_idx.contains_key(name.s) {
            return Err(name.err(format!("duplicate edge '{}'", name.s)));
        }
        let &ui = node_idx
            .get(u.s)
            .ok_or_else(|| u.err(format!("unknown node '{}'", u.s)))?;
        let &vi = node_idx
            .get(v.s)
            .ok_or_else(|| v.err(format!("unknown node '{}'", v.s)))?;
        edge_idx.insert(name.s.to_string(), edges.len());
        edges.push(MgEdge {
            name: name.s.to_string(),
            ends: (ui, vi),
        });
    }

    let mut seen_pref = vec![false; nodes.len()];
    for line in &lines {
        if line[0].s != "npref" {
            continue;
        }
        let name = need(line, 1, "a node identifier")?;
        let &v = node_idx
            .get(name.s)
            .ok_or_else(|| name.err(format!("unknown node '{}'", name.s)))?;
        if seen_pref[v] {
            return Err(name.err(format!("duplicate npref for node '{}'", name.s)));
        }
        seen_pref[v] = true;
        expect_colon(line, 2)?;
        let mut pref = Vec::new();
        for tok in &line[3..] {
            let &e = edge_idx
                .get(tok.s)
                .ok_or_else(|| tok.err(format!("unknown edge '{}'", tok.s)))?;
            pref.push(e);
        }
        nodes[v].pref = pref;
    }

    Ok(MultigraphInstance { nodes, edges })
}

/// Parse a stable-marriage instance with strict men and tied women.
///
/// Directives: `man <id> : <woman>...`, `woman <id> : ...` where a
/// parenthesised group `( m1 m2 )` is a tie, and an optional
/// `manorder : <man>...` giving a global order over all men.
pub fn parse_smti(src: &str) -> Result<SmtiInstance, ParseError> {
    let lines = tokenize(src);

    let mut men: Vec<SmtiMan> = Vec::new();
    let mut man_idx: HashMap<String, usize> = HashMap::new();
    let mut women: Vec<SmtiWoman> = Vec::new();
    let mut woman_idx: HashMap<String, usize> = HashMap::new();

    for line in &lines {
        match line[0].s {
            "man" => {
                let name = need(line, 1, "a man identifier")?;
                check_ident(name)?;
                if man_idx.contains_key(name.s) {
                    return Err(name.err(format!("duplicate man '{}'", name.s)));
                }
                man_idx.insert(name.s.to_string(), men.len());
                men.push(SmtiMan {
                    name: name.s.to_string(),
                    pref: Vec::new(),
                });
            }
            "woman" => {
                let name = need(line, 1, "a woman identifier")?;
                check_ident(name)?;
                if woman_idx.contains_key(name.s) {
                    return Err(name.err(format!("duplicate woman '{}'", name.s)));
                }
                woman_idx.insert(name.s.to_string(), women.len());
                women.push(SmtiWoman {
                    name: name.s.to_string(),
                    pref: Vec::new(),
                });
            }
            "manorder" => {}
            _ => return Err(line[0].err(format!("unknown directive '{}'", line[0].s))),
        }
    }

    let mut man_order: Option<Vec<usize>> = None;
    for line in &lines {
        match line[0].s {
            "man" => {
                let m = man_idx[line[1].s];
                expect_colon(line, 2)?;
                let mut pref = Vec::new();
                for tok in &line[3..] {
                    if tok.s == "(" || tok.s == ")" {
                        return Err(tok.err("ties are only supported on woman lists"));
                    }
                    let &w = woman_idx
                        .get(tok.s)
                        .ok_or_else(|| tok.err(format!("unknown woman '{}'", tok.s)))?;
                    pref.push(w);
                }
                men[m].pref = pref;
            }
            "woman" => {
                let w = woman_idx[line[1].s];
                expect_colon(line, 2)?;
                let mut groups: Vec<Vec<usize>> = Vec::new();
                let mut open: Option<Vec<usize>> = None;
                for tok in &line[3..] {
                    match tok.s {
                        "(" => {
                            if open.is_some() {
                                return Err(tok.err("nested tie group"));
                            }
                            open = Some(Vec::new());
                        }
                        ")" => match open.take() {
                            Some(g) if g.len() >= 2 => groups.push(g),
                            Some(_) => return Err(tok.err("tie group needs at least two men")),
                            None => return Err(tok.err("unmatched ')'")),
                        },
                        s => {
                            let &m = man_idx
                                .get(s)
                                .ok_or_else(|| tok.err(format!("unknown man '{s}'")))?;
                            match &mut open {
                                Some(g) => g.push(m),
                                None => groups.push(vec![m]),
                            }
                        }
                    }
                }
                if open.is_some() {
                    return Err(line[line.len() - 1].err("unclosed tie group"));
                }
                women[w].pref = groups;
            }
            "manorder" => {
                if man_order.is_some() {
                    return Err(line[0].err("duplicate manorder line"));
                }
                expect_colon(line, 1)?;
                let mut order = Vec::new();
                let mut seen = vec![false; men.len()];
                for tok in &line[2..] {
                    let &m = man_idx
                        .get(tok.s)
                        .ok_or_else(|| tok.err(format!("unknown man '{}'", tok.s)))?;
                    if seen[m] {
                        return Err(tok.err(format!("man '{}' listed twice", tok.s)));
                    }
                    seen[m] = true;
                    order.push(m);
                }
                if order.len() != men.len() {
                    return Err(line[0].err("manorder must list every man"));
                }
                man_order = Some(order);
            }
            _ => {}
        }
    }

    Ok(SmtiInstance {
        men,
        women,
        man_order,
    })
}

/// Parse a DIMACS CNF formula.
pub fn parse_cnf(src: &str) -> Result<CnfFormula, ParseError> {
    let mut num_vars: Option<usize> = None;
    let mut num_clauses: Option<usize> = None;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();

    for (i, raw) in src.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            if num_vars.is_some() {
                return Err(perr(lineno, 1, "duplicate problem line"));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(perr(lineno, 1, "expected 'p cnf <vars> <clauses>'"));
            }
            num_vars = Some(
                parts[2]
                    .parse()
                    .map_err(|_| perr(lineno, 1, "invalid variable count"))?,
            );
            num_clauses = Some(
                parts[3]
                    .parse()
                    .map_err(|_| perr(lineno, 1, "invalid clause count"))?,
            );
            continue;
        }
        let n = match num_vars {
            Some(n) => n,
            None => return Err(perr(lineno, 1, "literal before problem line")),
        };
        let mut col = 0usize;
        let mut start: Option<usize> = None;
        let chars: Vec<char> = raw.chars().collect();
        for (ci, &ch) in chars.iter().enumerate().chain(std::iter::once((
            chars.len(),
            &' ',
        ))) {
            if ch.is_whitespace() {
                if let Some(sc) = start.take() {
                    let tok: String = chars[sc..ci].iter().collect();
                    let v: i64 = tok
                        .parse()
                        .map_err(|_| perr(lineno, sc + 1, format!("invalid literal '{tok}'")))?;
                    if v == 0 {
                        clauses.push(std::mem::take(&mut current));
                    } else {
                        let var = v.unsigned_abs() as usize;
                        if var > n {
                            return Err(perr(
                                lineno,
                                sc + 1,
                                format!("literal '{tok}' out of range"),
                            ));
                        }
                        current.push(Lit {
                            var: var - 1,
                            positive: v > 0,
                        });
                    }
                }
            } else if start.is_none() {
                start = Some(col);
            }
            col += 1;
        }
    }

    if !current.is_empty() {
        return Err(perr(src.lines().count(), 1, "unterminated clause"));
    }
    let num_vars = num_vars.ok_or_else(|| perr(1, 1, "missing problem line"))?;
    if let Some(m) = num_clauses {
        if clauses.len() != m {
            return Err(perr(
                src.lines().count().max(1),
                1,
                format!("expected {m} clauses, found {}", clauses.len()),
            ));
        }
    }
    Ok(CnfFormula { num_vars, clauses })
}

/// Render an instance in the [`parse_hrc`] text format.
///
/// Declarations come out in index order, so parsing the result reproduces
/// the instance exactly provided couple members sit at adjacent doctor
/// indices (true for everything `parse_hrc` or the generators build) and no
/// identifier contains `#` or whitespace.
pub fn write_hrc(inst: &HrcInstance) -> String {
    let mut out = String::new();
    for h in &inst.hospitals {
        out.push_str(&format!("hospital {} {}\n", h.name, h.capacity));
    }
    let slot = |s: Slot| match s {
        Some(h) => inst.hospitals[h].name.clone(),
        None => "-".to_string(),
    };
    for (di, d) in inst.doctors.iter().enumerate() {
        match &d.role {
            DoctorRole::Single { pref } => {
                let names: Vec<&str> =
                    pref.iter().map(|&h| inst.hospitals[h].name.as_str()).collect();
                out.push_str(&format!("single {} : {}\n", d.name, names.join(" ")));
            }
            DoctorRole::Member { couple, side: 0 } => {
                let c = &inst.couples[*couple];
                debug_assert_eq!(c.members, [di, di + 1]);
                let pairs: Vec<String> = c
                    .joint
                    .iter()
                    .map(|&(a, b)| format!("{},{}", slot(a), slot(b)))
                    .collect();
                out.push_str(&format!(
                    "couple {} {} : {}\n",
                    inst.doctors[c.members[0]].name,
                    inst.doctors[c.members[1]].name,
                    pairs.join(" ")
                ));
            }
            DoctorRole::Member { .. } => {}
        }
    }
    for h in &inst.hospitals {
        let names: Vec<&str> = h.pref.iter().map(|&d| inst.doctors[d].name.as_str()).collect();
        out.push_str(&format!("hpref {} : {}\n", h.name, names.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hrc_basic_instance() {
        let src = "\
# demo
hospital h1 2
hospital h2 1
single d1 : h1 h2
couple c1 c2 : h1,h1 h1,- -,h2
hpref h1 : d1 c1 c2
hpref h2 : c2 d1
";
        let inst = parse_hrc(src).unwrap();
        assert_eq!(inst.hospitals.len(), 2);
        assert_eq!(inst.doctors.len(), 3);
        assert_eq!(inst.couples.len(), 1);
        assert_eq!(
            inst.couples[0].joint,
            vec![(Some(0), Some(0)), (Some(0), None), (None, Some(1))]
        );
        assert!(inst.validate().is_empty());
    }

    #[test]
    fn hrc_reports_position() {
        let src = "hospital h1 2\nsingle d1 : h9\n";
        let err = parse_hrc(src).unwrap_err();
        assert_eq!((err.line, err.col), (2, 13));
        assert!(err.msg.contains("unknown hospital"));
    }

    #[test]
    fn pair_needs_two_slots() {
        let src = "hospital h1 1\ncouple a b : h1,h1,h1\n";
        let err = parse_hrc(src).unwrap_err();
        assert!(err.msg.contains("malformed pair"));
        let src = "hospital h1 1\ncouple a b : -,-\n";
        let err = parse_hrc(src).unwrap_err();
        assert!(err.msg.contains("both slots unmatched"));
    }

    #[test]
    fn matching_lines() {
        let inst = parse_hrc(
            "hospital h1 1\nsingle d1 : h1\nhpref h1 : d1\n",
        )
        .unwrap();
        let m = parse_matching("match d1 h1\ncapacity h1 2\n", &inst).unwrap();
        assert_eq!(m.assignment, vec![Some(0)]);
        assert_eq!(m.capacities, vec![2]);
        let err = parse_matching("match d1 h1\nmatch d1 -\n", &inst).unwrap_err();
        assert!(err.msg.contains("matched twice"));
    }

    #[test]
    fn hrc_write_round_trips() {
        let src = "\
hospital h1 2
hospital h2 1
single d1 : h1 h2
couple c1 c2 : h1,h1 h1,- -,h2
hpref h1 : d1 c1 c2
hpref h2 : c2 d1
";
        let inst = parse_hrc(src).unwrap();
        let text = write_hrc(&inst);
        assert_eq!(parse_hrc(&text).unwrap(), inst);
        assert_eq!(text, src);
    }

    #[test]
    fn multigraph_with_loop() {
        let src = "\
node u 2
node v 1
edge e1 u v
edge e2 u u
npref u : e2 e1
npref v : e1
";
        let g = parse_multigraph(src).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert!(g.is_loop(1));
        assert!(!g.is_loop(0));
        assert!(g.validate().is_empty());
    }

    #[test]
    fn smti_ties() {
        let src = "\
man m1 : w1 w2
man m2 : w1
woman w1 : ( m1 m2 )
woman w2 : m1
manorder : m2 m1
";
        let s = parse_smti(src).unwrap();
        assert_eq!(s.women[0].pref, vec![vec![0, 1]]);
        assert_eq!(s.man_order, Some(vec![1, 0]));
        assert!(s.validate().is_empty());
        let err = parse_smti("man m : w\nwoman w : ( m )\n").unwrap_err();
        assert!(err.msg.contains("at least two"));
    }

    #[test]
    fn dimacs() {
        let f = parse_cnf("c hi\np cnf 3 2\n1 -2 3 0\n-1 2 -3 0\n").unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.clauses.len(), 2);
        assert_eq!(
            f.clauses[0],
            vec![
                Lit { var: 0, positive: true },
                Lit { var: 1, positive: false },
                Lit { var: 2, positive: true }
            ]
        );
        assert!(parse_cnf("p cnf 1 1\n2 0\n").is_err());
    }
}
