//! Turns a loosely-checked item list (from text or JSON) into a [`Model`],
//! reporting unresolved names, duplicates and bad transforms.

use std::collections::BTreeSet;

use crate::diagnostic::{Code, Diagnostic, Site, SourceSpan};
use crate::model::{ClassDef, Grant, Model, ModelError, ProcessDef, Transform};
use crate::names::{ClassName, ProcessName, RoleName};
use crate::privilege::{Privilege, PrivilegeSet, ProcessPrivilege, StatusPoint, TransformMode};

#[derive(Debug, Clone)]
pub(crate) struct Located<T> {
    pub value: T,
    pub span: Option<SourceSpan>,
}

impl<T> Located<T> {
    pub fn new(value: T, span: Option<SourceSpan>) -> Self {
        Self { value, span }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RawModel {
    pub name: String,
    pub items: Vec<RawItem>,
}

#[derive(Debug, Clone)]
pub(crate) enum RawItem {
    Role(Located<String>),
    Class {
        name: Located<String>,
        dynamic: bool,
        points: Vec<Located<StatusPoint>>,
    },
    Process {
        name: Located<String>,
        items: Vec<RawProcessItem>,
    },
    Grant {
        role: Located<String>,
        class: Located<String>,
        privileges: Vec<Located<Privilege>>,
    },
}

#[derive(Debug, Clone)]
pub(crate) enum RawProcessItem {
    Privilege(ProcessPrivilege, Located<String>),
    Input(Located<String>),
    Output(Located<String>),
    Transform {
        from: Located<String>,
        to: Located<String>,
        mode: Option<TransformMode>,
        span: Option<SourceSpan>,
    },
}

pub(crate) fn resolve(raw: RawModel) -> (Option<Model>, Vec<Diagnostic>) {
    let mut r = Resolver::default();
    r.declare(&raw.items);
    let mut model = Model::new(raw.name);
    model.roles = r.roles.iter().map(|r| RoleName::from(r.as_str())).collect();
    model.classes = std::mem::take(&mut r.classes);
    for item in &raw.items {
        match item {
            RawItem::Process { name, items } if r.first_process.remove(&name.value) => {
                let p = r.process(name, items);
                model.processes.push(p);
            }
            RawItem::Grant {
                role,
                class,
                privileges,
            } => {
                if let Some(g) = r.grant(role, class, privileges) {
                    model.grants.push(g);
                }
            }
            _ => {}
        }
    }

    let mut diagnostics = r.diagnostics;
    if diagnostics.iter().any(Diagnostic::is_error) {
        return (None, diagnostics);
    }
    match model.canonicalize() {
        Ok(m) => (Some(m), diagnostics),
        Err(e) => {
            diagnostics.push(from_model_error(&e));
            (None, diagnostics)
        }
    }
}

/// Maps a structural model error onto the diagnostic catalog.
pub(crate) fn from_model_error(e: &ModelError) -> Diagnostic {
    let code = match e {
        ModelError::UnresolvedReference { .. }
        | ModelError::UnknownClass(_)
        | ModelError::UnknownProcess(_)
        | ModelError::UnknownRole(_) => Code::Reference,
        ModelError::Duplicate { .. } => Code::Duplicate,
        ModelError::SelfTransform { .. }
        | ModelError::TransformEndpoint { .. }
        | ModelError::UnguardedOverlap { .. } => Code::TransformEndpoint,
        ModelError::InvalidName { .. } | ModelError::EmptyGrant { .. } => Code::Syntax,
    };
    Diagnostic::new(code, Site::Model, e.to_string())
}

#[derive(Default)]
struct Resolver {
    roles: BTreeSet<String>,
    class_names: BTreeSet<String>,
    classes: Vec<ClassDef>,
    first_process: BTreeSet<String>,
    grants: BTreeSet<(String, String)>,
    diagnostics: Vec<Diagnostic>,
}

impl Resolver {
    fn report(&mut self, code: Code, site: Site, span: &Option<SourceSpan>, message: String) {
        self.diagnostics
            .push(Diagnostic::new(code, site, message).with_span(span.clone()));
    }

    fn declare(&mut self, items: &[RawItem]) {
        let mut processes = BTreeSet::new();
        for item in items {
            match item {
                RawItem::Role(name) => {
                    if !self.roles.insert(name.value.clone()) {
                        self.report(
                            Code::Duplicate,
                            Site::Role(name.value.as_str().into()),
                            &name.span,
                            format!("role `{}` is declared more than once", name.value),
                        );
                    }
                }
                RawItem::Class {
                    name,
                    dynamic,
                    points,
                } => {
                    let site = Site::Class(name.value.as_str().into());
                    if !self.class_names.insert(name.value.clone()) {
                        self.report(
                            Code::Duplicate,
                            site,
                            &name.span,
                            format!("class `{}` is declared more than once", name.value),
                        );
                        continue;
                    }
                    let mut def = ClassDef::new(name.value.as_str());
                    def.dynamic = *dynamic;
                    for point in points {
                        if !def.status_points.insert(point.value) {
                            self.report(
                                Code::Duplicate,
                                site.clone(),
                                &point.span,
                                format!("status point `{}` listed twice", point.value),
                            );
                        }
                    }
                    self.classes.push(def);
                }
                RawItem::Process { name, .. } => {
                    if processes.insert(name.value.clone()) {
                        self.first_process.insert(name.value.clone());
                    } else {
                        self.report(
                            Code::Duplicate,
                            Site::Process(name.value.as_str().into()),
                            &name.span,
                            format!("process `{}` is declared more than once", name.value),
                        );
                    }
                }
                RawItem::Grant { .. } => {}
            }
        }
    }

    fn role_exists(&mut self, role: &Located<String>, site: &Site) -> bool {
        let ok = self.roles.contains(&role.value);
        if !ok {
            self.report(
                Code::Reference,
                site.clone(),
                &role.span,
                format!("unknown role `{}`", role.value),
            );
        }
        ok
    }

    fn class_exists(&mut self, class: &Located<String>, site: &Site) -> bool {
        let ok = self.class_names.contains(&class.value);
        if !ok {
            self.report(
                Code::Reference,
                site.clone(),
                &class.span,
                format!("unknown class `{}`", class.value),
            );
        }
        ok
    }

    fn process(&mut self, name: &Located<String>, items: &[RawProcessItem]) -> ProcessDef {
        let pname = ProcessName::from(name.value.as_str());
        let site = Site::Process(pname.clone());
        let mut def = ProcessDef::new(pname.clone());

        for item in items {
            match item {
                RawProcessItem::Privilege(privilege, role) => {
                    if !self.role_exists(role, &site) {
                        continue;
                    }
                    if let Some(prev) = def.role_privileges.get(role.value.as_str()) {
                        let msg = format!(
                            "role `{}` is already {prev} of process `{pname}`",
                            role.value
                        );
                        self.report(Code::Duplicate, site.clone(), &role.span, msg);
                        continue;
                    }
                    def.role_privileges
                        .insert(role.value.as_str().into(), *privilege);
                }
                RawProcessItem::Input(class) | RawProcessItem::Output(class) => {
                    if !self.class_exists(class, &site) {
                        continue;
                    }
                    let (set, kind) = match item {
                        RawProcessItem::Input(_) => (&mut def.inputs, "input"),
                        _ => (&mut def.outputs, "output"),
                    };
                    if !set.insert(class.value.as_str().into()) {
                        let msg = format!("`{}` is listed twice as {kind}", class.value);
                        self.report(Code::Duplicate, site.clone(), &class.span, msg);
                    }
                }
                RawProcessItem::Transform { .. } => {}
            }
        }

        let mut pairs = BTreeSet::new();
        for item in items {
            let RawProcessItem::Transform {
                from,
                to,
                mode,
                span,
            } = item
            else {
                continue;
            };
            let tsite = Site::Transform {
                process: pname.clone(),
                from: from.value.as_str().into(),
                to: to.value.as_str().into(),
            };
            let Some(mode) = mode else {
                self.report(
                    Code::TransformMode,
                    tsite,
                    span,
                    format!(
                        "transform {} -> {} needs `remaining` or `leaving`",
                        from.value, to.value
                    ),
                );
                continue;
            };
            let known_from = self.class_exists(from, &tsite);
            let known_to = self.class_exists(to, &tsite);
            if !(known_from && known_to) {
                continue;
            }
            if from.value == to.value {
                self.report(
                    Code::TransformEndpoint,
                    tsite,
                    span,
                    format!("class `{}` cannot transform into itself", from.value),
                );
                continue;
            }
            if !def.inputs.contains(from.value.as_str()) {
                let msg = format!("`{}` is not an input of `{pname}`", from.value);
                self.report(Code::TransformEndpoint, tsite.clone(), &from.span, msg);
                continue;
            }
            if !def.outputs.contains(to.value.as_str()) {
                let msg = format!("`{}` is not an output of `{pname}`", to.value);
                self.report(Code::TransformEndpoint, tsite.clone(), &to.span, msg);
                continue;
            }
            if !pairs.insert((from.value.clone(), to.value.clone())) {
                let msg = format!("transform {} -> {} is declared twice", from.value, to.value);
                self.report(Code::Duplicate, tsite, span, msg);
                continue;
            }
            def.transforms
                .push(Transform::new(from.value.as_str(), to.value.as_str(), *mode));
        }

        let overlaps: Vec<ClassName> = def.inputs.intersection(&def.outputs).cloned().collect();
        for class in overlaps {
            let as_source = def.transforms.iter().any(|t| t.from == class);
            let as_target = def.transforms.iter().any(|t| t.to == class);
            if !(as_source && as_target) {
                let msg = format!(
                    "`{class}` is both input and output of `{pname}`; it must be the source of one transform and the target of another"
                );
                self.report(Code::TransformEndpoint, site.clone(), &name.span, msg);
            }
        }
        def
    }

    fn grant(
        &mut self,
        role: &Located<String>,
        class: &Located<String>,
        privileges: &[Located<Privilege>],
    ) -> Option<Grant> {
        let site = Site::Grant {
            role: role.value.as_str().into(),
            class: class.value.as_str().into(),
        };
        let known_role = self.role_exists(role, &site);
        let known_class = self.class_exists(class, &site);
        let mut set = PrivilegeSet::EMPTY;
        for p in privileges {
            if !set.insert(p.value) {
                self.report(
                    Code::Duplicate,
                    site.clone(),
                    &p.span,
                    format!("privilege `{}` listed twice", p.value),
                );
            }
        }
        if !(known_role && known_class) {
            return None;
        }
        if !self
            .grants
            .insert((role.value.clone(), class.value.clone()))
        {
            self.report(
                Code::Duplicate,
                site,
                &role.span,
                format!("`{}` already has a grant on `{}`", role.value, class.value),
            );
            return None;
        }
        Some(Grant::new(role.value.as_str(), class.value.as_str(), set))
    }
}
