//! JSON interchange form. Keys are sorted and members appear in canonical
//! order on output; key order is irrelevant on input.

use serde::{Deserialize, Serialize};

use crate::diagnostic::{Code, Diagnostic, Site};
use crate::model::Model;
use crate::names::is_identifier;
use crate::privilege::{Privilege, ProcessPrivilege, StatusPoint, TransformMode};

use super::resolve::{resolve, Located, RawItem, RawModel, RawProcessItem};
use super::ParseResult;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonModel {
    name: String,
    #[serde(default)]
    roles: Vec<String>,
    #[serde(default)]
    classes: Vec<JsonClass>,
    #[serde(default)]
    processes: Vec<JsonProcess>,
    #[serde(default)]
    grants: Vec<JsonGrant>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonClass {
    name: String,
    #[serde(default)]
    dynamic: bool,
    #[serde(default)]
    status_points: Vec<StatusPoint>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonProcess {
    name: String,
    #[serde(default)]
    inputs: Vec<String>,
    #[serde(default)]
    outputs: Vec<String>,
    #[serde(default)]
    transforms: Vec<JsonTransform>,
    #[serde(default)]
    owners: Vec<String>,
    #[serde(default)]
    responsibles: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTransform {
    from: String,
    to: String,
    mode: Option<TransformMode>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGrant {
    role: String,
    class: String,
    privileges: Vec<Privilege>,
}

fn json_error(message: impl Into<String>) -> ParseResult {
    ParseResult {
        model: None,
        diagnostics: vec![Diagnostic::new(Code::Json, Site::Model, message)],
    }
}

pub fn parse_json(bytes: &[u8]) -> ParseResult {
    let doc: JsonModel = match serde_json::from_slice(bytes) {
        Ok(doc) => doc,
        Err(e) => return json_error(format!("malformed model document: {e}")),
    };
    match to_raw(doc) {
        Ok(raw) => {
            let (model, diagnostics) = resolve(raw);
            ParseResult { model, diagnostics }
        }
        Err(message) => json_error(message),
    }
}

fn name(s: String, kind: &str) -> Result<Located<String>, String> {
    if is_identifier(&s) {
        Ok(Located::new(s, None))
    } else {
        Err(format!("{kind} name {s:?} is not an identifier"))
    }
}

fn to_raw(doc: JsonModel) -> Result<RawModel, String> {
    let mut items = Vec::new();
    for role in doc.roles {
        items.push(RawItem::Role(name(role, "role")?));
    }
    for class in doc.classes {
        items.push(RawItem::Class {
            name: name(class.name, "class")?,
            dynamic: class.dynamic,
            points: class
                .status_points
                .into_iter()
                .map(|p| Located::new(p, None))
                .collect(),
        });
    }
    for p in doc.processes {
        let mut pitems = Vec::new();
        for role in p.owners {
            pitems.push(RawProcessItem::Privilege(ProcessPrivilege::Owner, name(role, "role")?));
        }
        for role in p.responsibles {
            pitems.push(RawProcessItem::Privilege(
                ProcessPrivilege::Responsibility,
                name(role, "role")?,
            ));
        }
        for class in p.inputs {
            pitems.push(RawProcessItem::Input(name(class, "class")?));
        }
        for class in p.outputs {
            pitems.push(RawProcessItem::Output(name(class, "class")?));
        }
        for t in p.transforms {
            pitems.push(RawProcessItem::Transform {
                from: name(t.from, "class")?,
                to: name(t.to, "class")?,
                mode: t.mode,
                span: None,
            });
        }
        items.push(RawItem::Process {
            name: name(p.name, "process")?,
            items: pitems,
        });
    }
    for g in doc.grants {
        if g.privileges.is_empty() {
            return Err(format!("grant of {} on {} lists no privileges", g.role, g.class));
        }
        items.push(RawItem::Grant {
            role: name(g.role, "role")?,
            class: name(g.class, "class")?,
            privileges: g
                .privileges
                .into_iter()
                .map(|p| Located::new(p, None))
                .collect(),
        });
    }
    Ok(RawModel {
        name: doc.name,
        items,
    })
}

/// Deterministic pretty-printed JSON with sorted keys and a trailing newline.
pub fn emit_json(model: &Model) -> Vec<u8> {
    let m = model.sorted();
    let doc = JsonModel {
        name: m.name,
        roles: m.roles.iter().map(ToString::to_string).collect(),
        classes: m
            .classes
            .iter()
            .map(|c| JsonClass {
                name: c.name.to_string(),
                dynamic: c.dynamic,
                status_points: c.status_points.iter().collect(),
            })
            .collect(),
        processes: m
            .processes
            .iter()
            .map(|p| JsonProcess {
                name: p.name.to_string(),
                inputs: p.inputs.iter().map(ToString::to_string).collect(),
                outputs: p.outputs.iter().map(ToString::to_string).collect(),
                transforms: p
                    .transforms
                    .iter()
                    .map(|t| JsonTransform {
                        from: t.from.to_string(),
                        to: t.to.to_string(),
                        mode: Some(t.mode),
                    })
                    .collect(),
                owners: p.owners().map(ToString::to_string).collect(),
                responsibles: p.responsibles().map(ToString::to_string).collect(),
            })
            .collect(),
        grants: m
            .grants
            .iter()
            .map(|g| JsonGrant {
                role: g.role.to_string(),
                class: g.class.to_string(),
                privileges: g.privileges.iter().collect(),
            })
            .collect(),
    };
    // Going through `Value` sorts object keys.
    let value = serde_json::to_value(&doc).expect("model documents always serialize");
    let mut out = serde_json::to_vec_pretty(&value).expect("values always serialize");
    out.push(b'\n');
    out
}
