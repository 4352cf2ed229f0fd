//! Meta-model constraint checking.
//!
//! Errors:
//! - `E-C1` transform endpoint that is not a dynamic state
//! - `E-C2` creation without reference
//! - `E-C3` owner/responsible role cannot reference an input
//! - `E-C4` owner/responsible role cannot create an output
//! - `E-C5` owner lacks reference+ on an input or output
//! - `E-ORPHAN-P` process nobody owns or is responsible for
//!
//! Warnings cover status points that the process structure does not back up.

use thiserror::Error;

use crate::diagnostic::{Code, Diagnostic, Site};
use crate::model::Model;
use crate::names::{ClassName, ProcessName, RoleName};
use crate::privilege::{Privilege, ProcessPrivilege, StatusPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown diagnostic code `{0}`")]
pub struct UnknownCode(pub String);

/// Checks `model` against every rule. The result is sorted by code, then site.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    check_dynamic_endpoints(model, &mut out);
    check_creation_implies_reference(model, &mut out);
    check_process_access(model, &mut out);
    check_status_points(model, &mut out);
    out.sort_by(|a, b| {
        (a.code.as_str(), a.site.to_string()).cmp(&(b.code.as_str(), b.site.to_string()))
    });
    out
}

fn check_dynamic_endpoints(model: &Model, out: &mut Vec<Diagnostic>) {
    for p in &model.processes {
        for t in &p.transforms {
            for end in [&t.from, &t.to] {
                let Some(class) = model.class(end.as_str()) else {
                    continue;
                };
                if class.dynamic {
                    continue;
                }
                out.push(
                    Diagnostic::new(
                        Code::C1,
                        Site::Transform {
                            process: p.name.clone(),
                            from: t.from.clone(),
                            to: t.to.clone(),
                        },
                        format!(
                            "`{end}` takes part in the {} transform {} -> {} of `{}` but is not a dynamic state",
                            t.mode, t.from, t.to, p.name
                        ),
                    )
                    .with_suggestion(format!("declare `class {end} dynamic`")),
                );
            }
        }
    }
}

fn check_creation_implies_reference(model: &Model, out: &mut Vec<Diagnostic>) {
    for g in &model.grants {
        if g.privileges.contains(Privilege::Creation) && !g.privileges.contains(Privilege::Reference)
        {
            out.push(
                Diagnostic::new(
                    Code::C2,
                    Site::Grant {
                        role: g.role.clone(),
                        class: g.class.clone(),
                    },
                    format!(
                        "`{}` may create `{}` but cannot reference it",
                        g.role, g.class
                    ),
                )
                .with_suggestion(format!("add reference to grant {} on {}", g.role, g.class)),
            );
        }
    }
}

fn access(role: &RoleName, process: &ProcessName, class: &ClassName) -> Site {
    Site::Access {
        role: role.clone(),
        process: process.clone(),
        class: class.clone(),
    }
}

fn check_process_access(model: &Model, out: &mut Vec<Diagnostic>) {
    for p in &model.processes {
        if p.role_privileges.is_empty() {
            out.push(
                Diagnostic::new(
                    Code::OrphanProcess,
                    Site::Process(p.name.clone()),
                    format!("no role owns or is responsible for `{}`", p.name),
                )
                .with_suggestion(format!("add `owner <role>` to process {}", p.name)),
            );
        }
        for (role, privilege) in &p.role_privileges {
            let r = role.as_str();
            for class in &p.inputs {
                if !model.has_privilege(r, class.as_str(), Privilege::Reference) {
                    out.push(
                        Diagnostic::new(
                            Code::C3,
                            access(role, &p.name, class),
                            format!(
                                "`{role}` is {privilege} of `{}` but cannot reference its input `{class}`",
                                p.name
                            ),
                        )
                        .with_suggestion(format!("add reference to grant {role} on {class}")),
                    );
                }
            }
            for class in &p.outputs {
                let held = model.privileges(r, class.as_str());
                if !held.contains(Privilege::Creation) {
                    let mut fix = String::from("creation");
                    if !held.contains(Privilege::Reference) {
                        fix.push_str(", reference");
                    }
                    out.push(
                        Diagnostic::new(
                            Code::C4,
                            access(role, &p.name, class),
                            format!(
                                "`{role}` is {privilege} of `{}` but cannot create its output `{class}`",
                                p.name
                            ),
                        )
                        .with_suggestion(format!("add {fix} to grant {role} on {class}")),
                    );
                }
            }
            if *privilege != ProcessPrivilege::Owner {
                continue;
            }
            for class in p.inputs.iter().chain(&p.outputs) {
                if !model.has_privilege(r, class.as_str(), Privilege::ReferencePlus) {
                    out.push(
                        Diagnostic::new(
                            Code::C5,
                            access(role, &p.name, class),
                            format!(
                                "`{role}` owns `{}` but lacks reference+ on `{class}`",
                                p.name
                            ),
                        )
                        .with_suggestion(format!("add reference+ to grant {role} on {class}")),
                    );
                }
            }
        }
    }
}

fn check_status_points(model: &Model, out: &mut Vec<Diagnostic>) {
    for class in &model.classes {
        let c = class.name.as_str();
        let consumers = model.consumers_of(c).count();
        let site = || Site::Class(class.name.clone());

        if class.is(StatusPoint::Decision) && consumers < 2 {
            out.push(Diagnostic::new(
                Code::DecisionUnjustified,
                site(),
                format!("`{c}` is a decision point but feeds {consumers} process(es); a choice needs at least two"),
            ));
        }
        if !class.is(StatusPoint::Decision) && consumers >= 2 {
            out.push(
                Diagnostic::new(
                    Code::DecisionMissing,
                    site(),
                    format!("`{c}` feeds {consumers} processes but is not marked as a decision point"),
                )
                .with_suggestion(format!("add `decision` to class {c}")),
            );
        }
        if class.is(StatusPoint::Fail) && consumers < 2 {
            out.push(Diagnostic::new(
                Code::FailWithoutBackup,
                site(),
                format!("`{c}` is a fail point with no second consuming process to fall back on"),
            ));
        }
        if class.is(StatusPoint::Waiting) && !is_shared_between_roles(model, &class.name) {
            out.push(Diagnostic::new(
                Code::WaitingNotShared,
                site(),
                format!("`{c}` is a waiting point but no role shares it with another"),
            ));
        }
    }
}

fn is_shared_between_roles(model: &Model, class: &ClassName) -> bool {
    model.roles.iter().any(|r1| {
        model.roles.iter().any(|r2| {
            r1 != r2
                && model
                    .shared_classes(r1.as_str(), r2.as_str())
                    .map(|s| s.iter().any(|sc| &sc.class == class))
                    .unwrap_or(false)
        })
    })
}

/// Rule text for a diagnostic code.
pub fn explain(code: &str) -> Result<&'static str, UnknownCode> {
    let code: Code = code.parse().map_err(UnknownCode)?;
    Ok(match code {
        Code::Syntax => "The text does not follow the model grammar.",
        Code::Reference => "A name is used that is not declared as a role, class or process.",
        Code::Duplicate => "The same role, class, process, grant or process item is declared twice.",
        Code::TransformMode => {
            "Every transform must say whether the source state is `remaining` or `leaving`."
        }
        Code::TransformEndpoint => {
            "A transform must lead from an input class of its process to a different output class of the same process."
        }
        Code::Json => "The JSON document is malformed or does not match the model schema.",
        Code::C1 => {
            "A class that is the source or target of a state transform (remaining or leaving) must be declared a Dynamic state class."
        }
        Code::C2 => "A role with the creation privilege on a class must also hold the reference privilege on it.",
        Code::C3 => {
            "A role that owns or is responsible for a process must hold the reference privilege on every input class of that process."
        }
        Code::C4 => {
            "A role that owns or is responsible for a process must hold the creation privilege on every output class of that process."
        }
        Code::C5 => {
            "An owner of a process must hold the reference+ privilege on all input and output classes of that process."
        }
        Code::OrphanProcess => "Every process needs at least one owner or responsible role.",
        Code::DecisionUnjustified => {
            "A decision point should offer a choice: at least two processes should consume it."
        }
        Code::DecisionMissing => {
            "A class consumed by two or more processes implies a choice and should be marked as a decision point."
        }
        Code::FailWithoutBackup => {
            "A fail point needs a fallback: at least two processes should consume it."
        }
        Code::WaitingNotShared => {
            "A waiting point should be information that one role creates and another role receives."
        }
    })
}
