use std::fmt::Write;

use crate::model::Model;

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Pretty-prints the canonical form of `model` as `.csm` text.
pub fn emit_text(model: &Model) -> String {
    let m = model.sorted();
    let mut out = String::new();
    let _ = writeln!(out, "model {} {{", quote(&m.name));
    for role in &m.roles {
        let _ = writeln!(out, "  role {role}");
    }
    for class in &m.classes {
        out.push_str("  class ");
        out.push_str(class.name.as_str());
        if class.dynamic {
            out.push_str(" dynamic");
        }
        if !class.status_points.is_empty() {
            let points: Vec<_> = class.status_points.iter().map(|p| p.keyword()).collect();
            let _ = write!(out, " {{ {} }}", points.join(", "));
        }
        out.push('\n');
    }
    for p in &m.processes {
        let _ = writeln!(out, "  process {} {{", p.name);
        for role in p.owners() {
            let _ = writeln!(out, "    owner {role}");
        }
        for role in p.responsibles() {
            let _ = writeln!(out, "    responsible {role}");
        }
        for class in &p.inputs {
            let _ = writeln!(out, "    input {class}");
        }
        for class in &p.outputs {
            let _ = writeln!(out, "    output {class}");
        }
        for t in &p.transforms {
            let _ = writeln!(out, "    transform {} -> {} {}", t.from, t.to, t.mode);
        }
        out.push_str("  }\n");
    }
    for g in &m.grants {
        let _ = writeln!(out, "  grant {} on {} {{ {} }}", g.role, g.class, g.privileges);
    }
    out.push_str("}\n");
    out
}
