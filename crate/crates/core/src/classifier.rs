//! Collaboration levels between pairs of roles.
//!
//! Levels are inferred per shared artifact from privilege patterns:
//!
//! | level      | artifact | pattern                                                          |
//! |------------|----------|------------------------------------------------------------------|
//! | very tight | process  | r1 owns, r2 is responsible, r1 may modify+ and r2 reference+ an output |
//! | tight      | process  | both own; shared outputs are reference+ only for both           |
//! | loose      | class    | r1 creates, r2 only references (reference+), class is a waiting point |
//! | very loose | class    | as loose, not a waiting point                                    |
//!
//! Required privileges are checked as "at least"; the forbidden ones are
//! listed explicitly, so roles may hold extra rights on their own data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::diagnostic::{has_errors, Diagnostic};
use crate::model::{Model, ProcessDef};
use crate::names::{ClassName, ProcessName, RoleName};
use crate::privilege::{Privilege, PrivilegeSet, ProcessPrivilege, StatusPoint};
use crate::validator::validate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("a role cannot collaborate with itself (`{0}`)")]
    SameRole(String),
    #[error("model has {} error diagnostic(s)", .0.iter().filter(|d| d.is_error()).count())]
    InvalidModel(Vec<Diagnostic>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    VeryTight,
    Tight,
    Loose,
    VeryLoose,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::VeryTight, Level::Tight, Level::Loose, Level::VeryLoose];

    pub fn label(self) -> &'static str {
        match self {
            Level::VeryTight => "very tight",
            Level::Tight => "tight",
            Level::Loose => "loose",
            Level::VeryLoose => "very loose",
        }
    }

    /// What is shared at this level, and how.
    pub fn sharing(self) -> &'static str {
        match self {
            Level::VeryTight => "process and data shared; partner may modify shared data",
            Level::Tight => "process and data shared; shared data is read-only for partners",
            Level::Loose => "data handed over for reference; partner waits on it",
            Level::VeryLoose => "data handed over for reference; no one waits on it",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "name")]
pub enum Artifact {
    Process(ProcessName),
    Class(ClassName),
}

impl fmt::Display for Artifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Artifact::Process(p) => write!(f, "process {p}"),
            Artifact::Class(c) => write!(f, "class {c}"),
        }
    }
}

impl Artifact {
    pub fn name(&self) -> &str {
        match self {
            Artifact::Process(p) => p.as_str(),
            Artifact::Class(c) => c.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelFinding {
    /// Owner side for process levels, creating side for class levels.
    pub producer: RoleName,
    pub consumer: RoleName,
    pub artifact: Artifact,
    pub level: Level,
    /// Names of the predicates that matched.
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollaborationReport {
    pub findings: Vec<LevelFinding>,
    pub pair_summary: BTreeMap<(RoleName, RoleName), BTreeSet<Level>>,
}

impl CollaborationReport {
    fn from_findings(findings: Vec<LevelFinding>) -> Self {
        let mut pair_summary: BTreeMap<_, BTreeSet<_>> = BTreeMap::new();
        for f in &findings {
            pair_summary
                .entry((f.producer.clone(), f.consumer.clone()))
                .or_default()
                .insert(f.level);
        }
        Self {
            findings,
            pair_summary,
        }
    }

    /// Levels seen between two roles in either direction.
    pub fn levels_between(&self, a: &str, b: &str) -> BTreeSet<Level> {
        self.pair_summary
            .iter()
            .filter(|((p, c), _)| (p == a && c == b) || (p == b && c == a))
            .flat_map(|(_, levels)| levels.iter().copied())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Plain-text table: one row per finding.
    pub fn to_table(&self) -> String {
        let headers = ["Producer", "Consumer", "Artifact", "Collaboration level", "Sharing"];
        let rows: Vec<[String; 5]> = self
            .findings
            .iter()
            .map(|f| {
                [
                    f.producer.to_string(),
                    f.consumer.to_string(),
                    f.artifact.to_string(),
                    f.level.label().to_owned(),
                    f.level.sharing().to_owned(),
                ]
            })
            .collect();
        let mut widths = headers.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[&str]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", padded.join(" | ").trim_end());
        };
        line(&mut out, &headers);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        let _ = writeln!(out, "{}", rule.join("-+-"));
        for row in &rows {
            let cells: Vec<&str> = row.iter().map(String::as_str).collect();
            line(&mut out, &cells);
        }
        out
    }
}

impl Serialize for CollaborationReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Summary<'a>(&'a BTreeMap<(RoleName, RoleName), BTreeSet<Level>>);
        impl Serialize for Summary<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                let mut map = s.serialize_map(Some(self.0.len()))?;
                for ((p, c), levels) in self.0 {
                    map.serialize_entry(&format!("{p}->{c}"), levels)?;
                }
                map.end()
            }
        }
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("findings", &self.findings)?;
        map.serialize_entry("pair_summary", &Summary(&self.pair_summary))?;
        map.end()
    }
}

const NOT_READ_ONLY: [Privilege; 5] = [
    Privilege::Creation,
    Privilege::Modification,
    Privilege::Suppression,
    Privilege::ModificationPlus,
    Privilege::SuppressionPlus,
];

/// Findings for the ordered pair (`r1`, `r2`).
pub fn classify_pair(model: &Model, r1: &str, r2: &str) -> Result<Vec<LevelFinding>, ClassifyError> {
    for r in [r1, r2] {
        if !model.has_role(r) {
            return Err(ClassifyError::UnknownRole(r.to_owned()));
        }
    }
    if r1 == r2 {
        return Err(ClassifyError::SameRole(r1.to_owned()));
    }
    let mut findings = Vec::new();
    for p in &model.processes {
        if let Some(f) = very_tight(model, p, r1, r2).or_else(|| tight(model, p, r1, r2)) {
            findings.push(f);
        }
    }
    for class in &model.classes {
        if let Some(f) = loose_or_very_loose(model, &class.name, r1, r2) {
            findings.push(f);
        }
    }
    Ok(findings)
}

fn very_tight(model: &Model, p: &ProcessDef, r1: &str, r2: &str) -> Option<LevelFinding> {
    if p.privilege_of(r1) != Some(ProcessPrivilege::Owner)
        || p.privilege_of(r2) != Some(ProcessPrivilege::Responsibility)
    {
        return None;
    }
    let output = p.outputs.iter().find(|c| {
        model.has_privilege(r1, c.as_str(), Privilege::ModificationPlus)
            && model.has_privilege(r2, c.as_str(), Privilege::ReferencePlus)
    })?;
    Some(LevelFinding {
        producer: r1.into(),
        consumer: r2.into(),
        artifact: Artifact::Process(p.name.clone()),
        level: Level::VeryTight,
        evidence: vec![
            format!("owner({r1}, {})", p.name),
            format!("responsible({r2}, {})", p.name),
            format!("modification+({r1}, {output})"),
            format!("reference+({r2}, {output})"),
        ],
    })
}

/// Outputs of `p` both roles hold some privilege on.
fn shared_outputs<'a>(model: &'a Model, p: &'a ProcessDef, a: &'a str, b: &'a str) -> impl Iterator<Item = &'a ClassName> {
    p.outputs.iter().filter(move |c| {
        !model.privileges(a, c.as_str()).is_empty() && !model.privileges(b, c.as_str()).is_empty()
    })
}

fn tight(model: &Model, p: &ProcessDef, r1: &str, r2: &str) -> Option<LevelFinding> {
    if p.privilege_of(r1) != Some(ProcessPrivilege::Owner)
        || p.privilege_of(r2) != Some(ProcessPrivilege::Owner)
    {
        return None;
    }
    let read_only = |privs: PrivilegeSet| {
        privs.contains(Privilege::ReferencePlus)
            && !privs.contains(Privilege::ModificationPlus)
            && !privs.contains(Privilege::SuppressionPlus)
    };
    let shared: Vec<&ClassName> = shared_outputs(model, p, r1, r2).collect();
    if shared.is_empty() {
        return None;
    }
    let all_read_only = shared.iter().all(|c| {
        read_only(model.privileges(r1, c.as_str())) && read_only(model.privileges(r2, c.as_str()))
    });
    if !all_read_only {
        return None;
    }
    // Symmetric level: report with the pair in canonical order.
    let (first, second) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    let names: Vec<String> = shared.iter().map(|c| c.to_string()).collect();
    Some(LevelFinding {
        producer: first.into(),
        consumer: second.into(),
        artifact: Artifact::Process(p.name.clone()),
        level: Level::Tight,
        evidence: vec![
            format!("owner({first}, {})", p.name),
            format!("owner({second}, {})", p.name),
            format!("reference+ only on shared outputs [{}]", names.join(", ")),
        ],
    })
}

fn loose_or_very_loose(model: &Model, class: &ClassName, r1: &str, r2: &str) -> Option<LevelFinding> {
    let c = class.as_str();
    let producer = model.privileges(r1, c);
    let consumer = model.privileges(r2, c);
    if !producer.contains(Privilege::Creation)
        || consumer.intersects(NOT_READ_ONLY.into())
        || !consumer.contains(Privilege::ReferencePlus)
    {
        return None;
    }
    let co_produced = model.processes.iter().any(|p| {
        p.outputs.contains(c) && p.privilege_of(r1).is_some() && p.privilege_of(r2).is_some()
    });
    if co_produced {
        return None;
    }
    let waiting = model
        .class(c)
        .is_some_and(|def| def.is(StatusPoint::Waiting));
    let (level, waiting_evidence) = if waiting {
        (Level::Loose, format!("waiting({c})"))
    } else {
        (Level::VeryLoose, format!("not waiting({c})"))
    };
    Some(LevelFinding {
        producer: r1.into(),
        consumer: r2.into(),
        artifact: Artifact::Class(class.clone()),
        level,
        evidence: vec![
            format!("creation({r1}, {c})"),
            format!("reference+ only({r2}, {c})"),
            format!("no shared process outputs {c}"),
            waiting_evidence,
        ],
    })
}

/// Findings for every ordered pair of distinct roles. Tight findings are
/// symmetric and appear once per unordered pair.
pub fn classify_all(model: &Model) -> Result<CollaborationReport, ClassifyError> {
    let diagnostics = validate(model);
    if has_errors(&diagnostics) {
        return Err(ClassifyError::InvalidModel(diagnostics));
    }
    let mut roles: Vec<&RoleName> = model.roles.iter().collect();
    roles.sort();
    let mut findings = Vec::new();
    for r1 in &roles {
        for r2 in &roles {
            if r1 == r2 {
                continue;
            }
            let pair = classify_pair(model, r1.as_str(), r2.as_str())?;
            findings.extend(
                pair.into_iter()
                    .filter(|f| f.level != Level::Tight || r1 < r2),
            );
        }
    }
    Ok(CollaborationReport::from_findings(findings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassDef, ProcessDef};
    use crate::privilege::Privilege::*;

    fn levels(fs: &[LevelFinding]) -> Vec<(String, Level)> {
        fs.iter()
            .map(|f| (f.artifact.name().to_owned(), f.level))
            .collect()
    }

    fn two_roles() -> Model {
        Model::new("M").with_role("A").with_role("B")
    }

    #[test]
    fn errors() {
        let m = two_roles();
        assert_eq!(
            classify_pair(&m, "A", "Z"),
            Err(ClassifyError::UnknownRole("Z".into()))
        );
        assert_eq!(
            classify_pair(&m, "A", "A"),
            Err(ClassifyError::SameRole("A".into()))
        );
    }

    #[test]
    fn loose_vs_very_loose_by_waiting_flag() {
        let base = two_roles()
            .with_grant("A", "Result", [Creation, Reference])
            .with_grant("B", "Result", [Reference, ReferencePlus]);
        let waiting = base
            .clone()
            .with_class(ClassDef::new("Result").with_point(StatusPoint::Waiting));
        let plain = base.with_class(ClassDef::new("Result"));
        assert_eq!(
            levels(&classify_pair(&waiting, "A", "B").unwrap()),
            [("Result".to_owned(), Level::Loose)]
        );
        assert_eq!(
            levels(&classify_pair(&plain, "A", "B").unwrap()),
            [("Result".to_owned(), Level::VeryLoose)]
        );
        // Direction matters: B does not create.
        assert!(classify_pair(&plain, "B", "A").unwrap().is_empty());
    }

    #[test]
    fn consumer_with_write_rights_is_not_loose() {
        let m = two_roles()
            .with_class(ClassDef::new("X"))
            .with_grant("A", "X", [Creation, Reference])
            .with_grant("B", "X", [ReferencePlus, ModificationPlus]);
        assert!(classify_pair(&m, "A", "B").unwrap().is_empty());
    }

    #[test]
    fn tight_requires_a_shared_output() {
        let m = two_roles()
            .with_class(ClassDef::new("X"))
            .with_process(ProcessDef::new("P").owner("A").owner("B").output("X"))
            .with_grant("A", "X", [Creation, Reference, ReferencePlus]);
        assert!(classify_pair(&m, "A", "B").unwrap().is_empty());

        let shared = m.with_grant("B", "X", [Creation, Reference, ReferencePlus]);
        let fs = classify_pair(&shared, "B", "A").unwrap();
        assert_eq!(levels(&fs), [("P".to_owned(), Level::Tight)]);
        assert_eq!((fs[0].producer.as_str(), fs[0].consumer.as_str()), ("A", "B"));
    }

    #[test]
    fn very_tight_is_directional() {
        let m = two_roles()
            .with_class(ClassDef::new("X"))
            .with_process(ProcessDef::new("P").owner("A").responsible("B").output("X"))
            .with_grant("A", "X", PrivilegeSet::all())
            .with_grant("B", "X", [Creation, Modification, Reference, Suppression, ReferencePlus]);
        assert_eq!(
            levels(&classify_pair(&m, "A", "B").unwrap()),
            [("P".to_owned(), Level::VeryTight)]
        );
        assert!(classify_pair(&m, "B", "A").unwrap().is_empty());
    }

    #[test]
    fn classify_all_rejects_invalid_models() {
        let m = two_roles()
            .with_class(ClassDef::new("X"))
            .with_grant("A", "X", [Creation]);
        assert!(matches!(classify_all(&m), Err(ClassifyError::InvalidModel(_))));
    }

    #[test]
    fn single_role_gives_empty_report() {
        let report = classify_all(&Model::new("M").with_role("Solo")).unwrap();
        assert!(report.findings.is_empty() && report.pair_summary.is_empty());
    }

    #[test]
    fn report_json_shape() {
        let m = two_roles()
            .with_class(ClassDef::new("X"))
            .with_grant("A", "X", [Creation, Reference])
            .with_grant("B", "X", [ReferencePlus]);
        let report = classify_all(&m).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["pair_summary"]["A->B"], serde_json::json!(["very_loose"]));
        assert_eq!(v["findings"][0]["artifact"]["kind"], "class");
        assert_eq!(v["findings"][0]["level"], "very_loose");
        let table = report.to_table();
        assert!(table.starts_with("Producer"));
        assert!(table.contains("very loose"));
    }
}
