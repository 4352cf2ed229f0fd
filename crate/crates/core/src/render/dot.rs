use std::fmt::Write;

use super::{annotation, checked, grant_lines, output_label, placement, RenderError, RenderOptions};
use crate::model::Model;

/// A double-quoted DOT string.
fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn class_id(name: &str) -> String {
    quoted(&format!("class:{name}"))
}

fn process_id(name: &str) -> String {
    quoted(&format!("process:{name}"))
}

fn alias_id(role: &str, name: &str) -> String {
    quoted(&format!("alias:{role}/{name}"))
}

/// Graphviz digraph with one `cluster:<role>` subgraph per role.
pub fn to_dot(model: &Model, options: RenderOptions) -> Result<String, RenderError> {
    let m = checked(model)?;
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quoted(&m.name));
    if m.roles.is_empty() && m.classes.is_empty() {
        out.push_str("}\n");
        return Ok(out);
    }
    out.push_str("  rankdir=LR;\n  compound=true;\n");

    for role in &m.roles {
        let _ = writeln!(out, "  subgraph {} {{", quoted(&format!("cluster:{role}")));
        let _ = writeln!(out, "    label={};\n    style=rounded;", quoted(role.as_str()));
        for p in &m.processes {
            let (primary, aliases) = placement(p);
            if primary == Some(role) {
                let _ = writeln!(out, "    {} [shape=box, label={}];", process_id(p.name.as_str()), quoted(p.name.as_str()));
            } else if aliases.contains(&role) {
                let _ = writeln!(
                    out,
                    "    {} [shape=box, style=dashed, label={}];",
                    alias_id(role.as_str(), p.name.as_str()),
                    quoted(p.name.as_str())
                );
            }
        }
        if options.show_privileges {
            let lines = grant_lines(&m, role);
            if !lines.is_empty() {
                let label: String = lines.iter().map(|l| format!("{l}\n")).collect();
                let _ = writeln!(
                    out,
                    "    {} [shape=note, fontsize=9, label={}];",
                    quoted(&format!("grants:{role}")),
                    quoted(&label)
                );
            }
        }
        out.push_str("  }\n");
    }

    for class in &m.classes {
        let label = match annotation(&m, &class.name) {
            Some(a) => format!("{}\n{a}", class.name),
            None => class.name.to_string(),
        };
        let style = if class.dynamic { ", style=bold" } else { "" };
        let _ = writeln!(out, "  {} [shape=oval{style}, label={}];", class_id(class.name.as_str()), quoted(&label));
    }

    for p in &m.processes {
        let pid = process_id(p.name.as_str());
        for input in &p.inputs {
            let _ = writeln!(out, "  {} -> {pid} [label=\"input\"];", class_id(input.as_str()));
        }
        for output in &p.outputs {
            let _ = writeln!(
                out,
                "  {pid} -> {} [label={}];",
                class_id(output.as_str()),
                quoted(&output_label(p, output))
            );
        }
        let (_, aliases) = placement(p);
        for role in aliases {
            let _ = writeln!(
                out,
                "  {} -> {pid} [style=dashed, arrowhead=none];",
                alias_id(role.as_str(), p.name.as_str())
            );
        }
    }
    out.push_str("}\n");
    Ok(out)
}
