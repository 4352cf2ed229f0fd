//! Generators, oracles and properties shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use cosemo_core::classifier::Artifact;
use cosemo_core::{
    classify_all, emit_json, emit_text, enabled, fire, parse_json, parse_text, validate, ClassDef, Code,
    Diagnostic, Grant, Level, Model, Privilege, PrivilegeSet, ProcessDef, ProcessPrivilege, SimState,
    StatusPoint, Token, TransformMode,
};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

#[derive(Debug, Clone)]
pub struct RawModel {
    name: String,
    roles: usize,
    classes: Vec<(bool, u8)>,
    /// Per process: class slot (0 none, 1 input, 2 output), role slot
    /// (0/1 none, 2 owner, 3 responsible), transform slot per class pair.
    processes: Vec<(Vec<u8>, Vec<u8>, Vec<u8>)>,
    grants: Vec<u8>,
}

/// Structurally sound models of up to `roles`/`classes`/`processes` items.
/// Constraint violations are common; use [`repair`] for valid ones.
pub fn arb_model(roles: usize, classes: usize, processes: usize) -> impl Strategy<Value = Model> {
    (0..=roles, 0..=classes, 0..=processes)
        .prop_flat_map(|(r, c, p)| {
            (
                "[ -~]{0,10}",
                Just(r),
                vec((any::<bool>(), 0u8..8), c),
                vec((vec(0u8..3, c), vec(0u8..4, r), vec(0u8..3, c * c)), p),
                vec(prop_oneof![Just(0u8), 1u8..128], r * c),
            )
        })
        .prop_map(|(name, roles, classes, processes, grants)| {
            build(&RawModel {
                name,
                roles,
                classes,
                processes,
                grants,
            })
        })
}

fn build(raw: &RawModel) -> Model {
    let nc = raw.classes.len();
    let mut m = Model::new(raw.name.clone());
    for r in 0..raw.roles {
        m = m.with_role(format!("R{r}").as_str());
    }
    for (i, (dynamic, points)) in raw.classes.iter().enumerate() {
        let mut c = ClassDef::new(format!("C{i}").as_str());
        if *dynamic {
            c = c.dynamic();
        }
        for (bit, point) in StatusPoint::ALL.iter().enumerate() {
            if points & (1 << bit) != 0 {
                c = c.with_point(*point);
            }
        }
        m = m.with_class(c);
    }
    for (pi, (class_slots, role_slots, transform_slots)) in raw.processes.iter().enumerate() {
        let mut p = ProcessDef::new(format!("P{pi}").as_str());
        for (ci, slot) in class_slots.iter().enumerate() {
            let name = format!("C{ci}");
            match slot {
                1 => p = p.input(name.as_str()),
                2 => p = p.output(name.as_str()),
                _ => {}
            }
        }
        for (ri, slot) in role_slots.iter().enumerate() {
            let name = format!("R{ri}");
            match slot {
                2 => p = p.owner(name.as_str()),
                3 => p = p.responsible(name.as_str()),
                _ => {}
            }
        }
        for from in 0..nc {
            for to in 0..nc {
                if class_slots[from] != 1 || class_slots[to] != 2 {
                    continue;
                }
                let mode = match transform_slots[from * nc + to] {
                    1 => TransformMode::Remaining,
                    2 => TransformMode::Leaving,
                    _ => continue,
                };
                p = p.transform(format!("C{from}").as_str(), format!("C{to}").as_str(), mode);
            }
        }
        m = m.with_process(p);
    }
    for r in 0..raw.roles {
        for c in 0..nc {
            let bits = raw.grants[r * nc + c];
            if bits == 0 {
                continue;
            }
            let set: PrivilegeSet = Privilege::ALL
                .iter()
                .enumerate()
                .filter(|(i, _)| bits & (1 << i) != 0)
                .map(|(_, p)| *p)
                .collect();
            m = m.with_grant(format!("R{r}").as_str(), format!("C{c}").as_str(), set);
        }
    }
    m
}

fn add(m: &mut Model, role: &str, class: &str, privileges: &[Privilege]) {
    if let Some(g) = m.grants.iter_mut().find(|g| g.role == role && g.class == class) {
        for p in privileges {
            g.privileges.insert(*p);
        }
    } else {
        let set: PrivilegeSet = privileges.iter().copied().collect();
        m.grants.push(Grant::new(role, class, set));
    }
}

/// Grants the least extra privileges needed to clear every Error diagnostic.
pub fn repair(model: &Model) -> Model {
    let mut m = model.clone();
    let transform_ends: BTreeSet<String> = m
        .processes
        .iter()
        .flat_map(|p| p.transforms.iter().flat_map(|t| [t.from.to_string(), t.to.to_string()]))
        .collect();
    for c in &mut m.classes {
        if transform_ends.contains(c.name.as_str()) {
            c.dynamic = true;
        }
    }
    let first_role = m.roles.first().cloned();
    m.processes.retain(|p| !p.role_privileges.is_empty() || first_role.is_some());
    for p in &mut m.processes {
        if p.role_privileges.is_empty() {
            p.role_privileges
                .insert(first_role.clone().unwrap(), ProcessPrivilege::Owner);
        }
    }
    let needs: Vec<(String, String, Vec<Privilege>)> = m
        .processes
        .iter()
        .flat_map(|p| {
            p.role_privileges.iter().flat_map(move |(r, privilege)| {
                let owner = *privilege == ProcessPrivilege::Owner;
                let plus = move |mut v: Vec<Privilege>| {
                    if owner {
                        v.push(Privilege::ReferencePlus);
                    }
                    v
                };
                p.inputs
                    .iter()
                    .map(move |c| (r.to_string(), c.to_string(), plus(vec![Privilege::Reference])))
                    .chain(p.outputs.iter().map(move |c| {
                        (
                            r.to_string(),
                            c.to_string(),
                            plus(vec![Privilege::Creation, Privilege::Reference]),
                        )
                    }))
            })
        })
        .collect();
    for (r, c, privs) in needs {
        add(&mut m, &r, &c, &privs);
    }
    for g in &mut m.grants {
        if g.privileges.contains(Privilege::Creation) {
            g.privileges.insert(Privilege::Reference);
        }
    }
    m
}

pub fn arb_valid_model(roles: usize, classes: usize, processes: usize) -> impl Strategy<Value = Model> {
    arb_model(roles, classes, processes).prop_map(|m| repair(&m))
}

/// A model plus a token state over objects `o0..o2`.
pub fn arb_model_and_state() -> impl Strategy<Value = (Model, SimState)> {
    arb_model(3, 6, 5).prop_flat_map(|m| {
        let n = m.classes.len();
        (Just(m), vec(any::<bool>(), 3 * n))
    })
    .prop_map(|(m, bits)| {
        let state = state_from_bits(&m, &bits);
        (m, state)
    })
}

pub fn state_from_bits(m: &Model, bits: &[bool]) -> SimState {
    let n = m.classes.len();
    let mut state = SimState::default();
    for (i, on) in bits.iter().enumerate() {
        if *on {
            state
                .tokens
                .insert(Token::new(format!("o{}", i / n).as_str(), m.classes[i % n].name.clone()));
        }
    }
    state
}

pub fn keyed(diagnostics: &[Diagnostic]) -> Vec<(Code, String)> {
    let mut v: Vec<_> = diagnostics.iter().map(|d| (d.code, d.site.to_string())).collect();
    v.sort();
    v
}

fn grant_of(m: &Model, role: &str, class: &str) -> Vec<Privilege> {
    for g in &m.grants {
        if g.role == role && g.class == class {
            return g.privileges.iter().collect();
        }
    }
    Vec::new()
}

/// Rule evaluation by exhaustive enumeration over every role, class and
/// process combination, using only the raw model fields.
pub fn brute_force_rules(m: &Model) -> Vec<(Code, String)> {
    let mut out = Vec::new();
    for p in &m.processes {
        for t in &p.transforms {
            for end in [&t.from, &t.to] {
                let dynamic = m.classes.iter().any(|c| c.name == *end && c.dynamic);
                if !dynamic {
                    out.push((Code::C1, format!("transform {} -> {} in process {}", t.from, t.to, p.name)));
                }
            }
        }
    }
    for r in &m.roles {
        for c in &m.classes {
            let g = grant_of(m, r.as_str(), c.name.as_str());
            if g.contains(&Privilege::Creation) && !g.contains(&Privilege::Reference) {
                out.push((Code::C2, format!("grant {r} on {}", c.name)));
            }
        }
    }
    for p in &m.processes {
        let mut anyone = false;
        for r in &m.roles {
            let Some(pp) = p.role_privileges.get(r) else {
                continue;
            };
            anyone = true;
            for c in &m.classes {
                let g = grant_of(m, r.as_str(), c.name.as_str());
                let site = format!("role {r} / process {} / class {}", p.name, c.name);
                let is_in = p.inputs.contains(&c.name);
                let is_out = p.outputs.contains(&c.name);
                if is_in && !g.contains(&Privilege::Reference) {
                    out.push((Code::C3, site.clone()));
                }
                if is_out && !g.contains(&Privilege::Creation) {
                    out.push((Code::C4, site.clone()));
                }
                let owner = *pp == ProcessPrivilege::Owner;
                if owner && (is_in || is_out) && !g.contains(&Privilege::ReferencePlus) {
                    out.push((Code::C5, site));
                }
            }
        }
        if !anyone {
            out.push((Code::OrphanProcess, format!("process {}", p.name)));
        }
    }
    for c in &m.classes {
        let consumers = m.processes.iter().filter(|p| p.inputs.contains(&c.name)).count();
        let site = format!("class {}", c.name);
        let decision = c.status_points.contains(StatusPoint::Decision);
        if decision && consumers < 2 {
            out.push((Code::DecisionUnjustified, site.clone()));
        }
        if !decision && consumers >= 2 {
            out.push((Code::DecisionMissing, site.clone()));
        }
        if c.status_points.contains(StatusPoint::Fail) && consumers < 2 {
            out.push((Code::FailWithoutBackup, site.clone()));
        }
        if c.status_points.contains(StatusPoint::Waiting) {
            let plus = [Privilege::ModificationPlus, Privilege::ReferencePlus, Privilege::SuppressionPlus];
            let shared = m.roles.iter().any(|r1| {
                m.roles.iter().any(|r2| {
                    r1 != r2
                        && grant_of(m, r1.as_str(), c.name.as_str()).contains(&Privilege::Creation)
                        && grant_of(m, r2.as_str(), c.name.as_str()).iter().any(|p| plus.contains(p))
                })
            });
            if !shared {
                out.push((Code::WaitingNotShared, site));
            }
        }
    }
    out.sort();
    out
}

fn structural(m: &Model) -> String {
    format!("{m:?}")
}

// Properties. Each returns Err with a message on violation.

pub fn prop_canonicalize_idempotent(m: &Model) -> Result<(), TestCaseError> {
    let once = m.canonicalize().map_err(|e| TestCaseError::fail(e.to_string()))?;
    let twice = once.canonicalize().map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(structural(&once), structural(&twice));
    Ok(())
}

pub fn prop_enabled_monotone(m: &Model, small: &SimState, extra: &SimState) -> Result<(), TestCaseError> {
    let mut big = small.clone();
    big.tokens.extend(extra.tokens.iter().cloned());
    for o in ["o0", "o1", "o2"] {
        let before = enabled(m, small, o);
        let after = enabled(m, &big, o);
        prop_assert!(before.is_subset(&after), "{o}: {before:?} not within {after:?}");
    }
    Ok(())
}

/// Firing removes exactly the fired object's tokens in leaving inputs that
/// the process does not also output, and touches no other object.
pub fn prop_leaving_removes_exactly(m: &Model, state: &SimState) -> Result<(), TestCaseError> {
    for p in &m.processes {
        for o in ["o0", "o1", "o2"] {
            let Ok(next) = fire(m, state, p.name.as_str(), o) else {
                continue;
            };
            let removed: BTreeSet<&Token> = state.tokens.difference(&next.tokens).collect();
            let expected: BTreeSet<Token> = p
                .transforms
                .iter()
                .filter(|t| t.mode == TransformMode::Leaving && !p.outputs.contains(&t.from))
                .map(|t| Token::new(o, t.from.clone()))
                .collect();
            prop_assert_eq!(removed, expected.iter().collect::<BTreeSet<_>>());
            for t in state.tokens.iter().filter(|t| t.object != o) {
                prop_assert!(next.tokens.contains(t));
            }
            for t in next.tokens.iter().filter(|t| t.object != o) {
                prop_assert!(state.tokens.contains(t));
            }
            let single_leaving = p
                .inputs
                .iter()
                .filter(|c| p.consumes(c.as_str()) && !p.outputs.contains(*c))
                .count()
                == 1;
            if single_leaving {
                prop_assert_eq!(state.tokens.difference(&next.tokens).count(), 1);
            }
        }
    }
    Ok(())
}

fn class_levels(m: &Model) -> Vec<(String, String, String, Level)> {
    let report = classify_all(m).expect("repaired models are valid");
    let mut v: Vec<_> = report
        .findings
        .iter()
        .map(|f| (f.producer.to_string(), f.consumer.to_string(), f.artifact.to_string(), f.level))
        .collect();
    v.sort();
    v
}

/// Toggling Waiting on one class swaps Loose and VeryLoose for that class only.
pub fn prop_waiting_toggle(m: &Model, pick: usize) -> Result<(), TestCaseError> {
    if m.classes.is_empty() {
        return Ok(());
    }
    let ci = pick % m.classes.len();
    let target = m.classes[ci].name.clone();
    let mut toggled = m.clone();
    let points = &mut toggled.classes[ci].status_points;
    if points.contains(StatusPoint::Waiting) {
        points.remove(StatusPoint::Waiting);
    } else {
        points.insert(StatusPoint::Waiting);
    }
    let swap = |l: Level| match l {
        Level::Loose => Level::VeryLoose,
        Level::VeryLoose => Level::Loose,
        other => other,
    };
    let artifact = Artifact::Class(target).to_string();
    let mut expected: Vec<_> = class_levels(m)
        .into_iter()
        .map(|(p, c, a, l)| {
            let l = if a == artifact { swap(l) } else { l };
            (p, c, a, l)
        })
        .collect();
    expected.sort();
    prop_assert_eq!(class_levels(&toggled), expected);
    Ok(())
}

/// Adding reference to a grant flagged E-C2 removes that finding and adds none.
pub fn prop_c2_repair_monotone(m: &Model) -> Result<(), TestCaseError> {
    let before = keyed(&validate(m));
    for (code, site) in before.iter().filter(|(c, _)| *c == Code::C2) {
        let g = m
            .grants
            .iter()
            .position(|g| format!("grant {} on {}", g.role, g.class) == *site)
            .expect("site names a grant");
        let mut fixed = m.clone();
        fixed.grants[g].privileges.insert(Privilege::Reference);
        let after = keyed(&validate(&fixed));
        prop_assert!(!after.contains(&(*code, site.clone())));
        let mut remaining = before.clone();
        for d in &after {
            let Some(i) = remaining.iter().position(|x| x == d) else {
                return Err(TestCaseError::fail(format!("new finding {d:?} after repairing {site}")));
            };
            remaining.remove(i);
        }
    }
    Ok(())
}

pub fn round_trips(m: &Model) -> Result<(), String> {
    let text = emit_text(m);
    let back = parse_text(&text, "rt.csm").into_result().map_err(|d| format!("{d:?}\n{text}"))?;
    if back != *m || emit_text(&back) != text {
        return Err(format!("text round trip changed the model:\n{text}"));
    }
    let json = emit_json(m);
    let back = parse_json(&json).into_result().map_err(|d| format!("{d:?}"))?;
    if back != *m || emit_json(&back) != json {
        return Err("JSON round trip changed the model".to_owned());
    }
    Ok(())
}
