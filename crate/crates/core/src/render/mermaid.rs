use std::fmt::Write;

use super::{annotation, checked, output_label, placement, RenderError};
use crate::model::Model;

/// A quoted Mermaid label. Quotes become entity codes; newlines are dropped.
fn label(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("#quot;"),
            '#' => out.push_str("#35;"),
            '\n' | '\r' => out.push(' '),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Mermaid flowchart with one subgraph per role.
pub fn to_mermaid(model: &Model) -> Result<String, RenderError> {
    let m = checked(model)?;
    let mut out = String::from("flowchart LR\n");
    let class_ix = |name: &str| m.classes.iter().position(|c| c.name == name).expect("validated");

    for (li, role) in m.roles.iter().enumerate() {
        let _ = writeln!(out, "  subgraph lane{li}[{}]", label(role.as_str()));
        for (pi, p) in m.processes.iter().enumerate() {
            let (primary, aliases) = placement(p);
            if primary == Some(role) {
                let _ = writeln!(out, "    p{pi}[{}]", label(p.name.as_str()));
            } else if aliases.contains(&role) {
                let _ = writeln!(out, "    a{li}_{pi}[{}]:::alias", label(p.name.as_str()));
            }
        }
        out.push_str("  end\n");
    }

    for (ci, class) in m.classes.iter().enumerate() {
        let text = match annotation(&m, &class.name) {
            Some(a) => format!("{} {a}", class.name),
            None => class.name.to_string(),
        };
        let style = if class.dynamic { ":::dynamic" } else { "" };
        let _ = writeln!(out, "  c{ci}([{}]){style}", label(&text));
    }

    for (pi, p) in m.processes.iter().enumerate() {
        for input in &p.inputs {
            let _ = writeln!(out, "  c{} -->|input| p{pi}", class_ix(input.as_str()));
        }
        for output in &p.outputs {
            let _ = writeln!(
                out,
                "  p{pi} -->|{}| c{}",
                label(&output_label(p, output)),
                class_ix(output.as_str())
            );
        }
        let (_, aliases) = placement(p);
        for role in aliases {
            let li = m.roles.iter().position(|r| r == role).expect("validated");
            let _ = writeln!(out, "  a{li}_{pi} -.- p{pi}");
        }
    }

    if m.processes.iter().any(|p| !placement(p).1.is_empty()) {
        out.push_str("  classDef alias stroke-dasharray: 5 5\n");
    }
    if m.classes.iter().any(|c| c.dynamic) {
        out.push_str("  classDef dynamic stroke-width:3px\n");
    }
    Ok(out)
}
