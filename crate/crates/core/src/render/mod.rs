//! Diagram export: classes as ovals, processes as boxes, one lane per role.
//!
//! A process is drawn in the lane of its first owner (or first responsible
//! role when it has no owner). Every other role holding a privilege on it
//! gets a dashed alias in its own lane.

mod dot;
mod mermaid;

pub use dot::to_dot;
pub use mermaid::to_mermaid;

use thiserror::Error;

use crate::diagnostic::{has_errors, Diagnostic};
use crate::model::{Model, ProcessDef};
use crate::names::{ClassName, RoleName};
use crate::privilege::{StatusPoint, TransformMode};
use crate::validator::validate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("model has {} error diagnostic(s)", .0.iter().filter(|d| d.is_error()).count())]
    InvalidModel(Vec<Diagnostic>),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// List each role's grants in its lane.
    pub show_privileges: bool,
}

fn checked(model: &Model) -> Result<Model, RenderError> {
    let diagnostics = validate(model);
    if has_errors(&diagnostics) {
        return Err(RenderError::InvalidModel(diagnostics));
    }
    Ok(model.sorted())
}

/// The lane a process is drawn in, and the lanes that get an alias.
fn placement(p: &ProcessDef) -> (Option<&RoleName>, Vec<&RoleName>) {
    let primary = p.owners().next().or_else(|| p.responsibles().next());
    let aliases = p
        .role_privileges
        .keys()
        .filter(|r| Some(*r) != primary)
        .collect();
    (primary, aliases)
}

/// `W`, `F`, `D` letters for the class's status points, e.g. `{W,F}`.
fn annotation(model: &Model, class: &ClassName) -> Option<String> {
    let def = model.class(class.as_str())?;
    let letters: Vec<String> = StatusPoint::ALL
        .iter()
        .filter(|p| def.is(**p))
        .map(|p| p.letter().to_string())
        .collect();
    (!letters.is_empty()).then(|| format!("{{{}}}", letters.join(",")))
}

/// Label of the edge from `p` to `output`: the transforms into it, or `output`.
fn output_label(p: &ProcessDef, output: &ClassName) -> String {
    let into: Vec<_> = p.transforms.iter().filter(|t| t.to == *output).collect();
    let verb = |mode| match mode {
        TransformMode::Remaining => "remains",
        TransformMode::Leaving => "leaves",
    };
    match into.as_slice() {
        [] => "output".to_owned(),
        [t] => verb(t.mode).to_owned(),
        many => many
            .iter()
            .map(|t| format!("{} {}", t.from, verb(t.mode)))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn grant_lines(model: &Model, role: &RoleName) -> Vec<String> {
    model
        .grants
        .iter()
        .filter(|g| g.role == *role)
        .map(|g| format!("{}: {}", g.class, g.privileges))
        .collect()
}
