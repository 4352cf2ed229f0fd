//! Collaborative service models: roles, classes, processes and privileges.
//!
//! A [`Model`] keeps its members in plain vectors so that models can be
//! assembled in any order. [`Model::canonicalize`] checks that every name
//! resolves and returns the canonical form, with all members sorted by name.
//! Equality between models is equality of their canonical forms.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::names::{is_identifier, ClassName, ProcessName, RoleName};
use crate::privilege::{
    Privilege, PrivilegeSet, ProcessPrivilege, StatusPoint, StatusPoints, TransformMode,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unresolved reference `{name}` in {site}")]
    UnresolvedReference { name: String, site: String },
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("{kind} name `{name}` is not an identifier")]
    InvalidName { kind: &'static str, name: String },
    #[error("process `{process}` transforms `{class}` into itself")]
    SelfTransform { process: ProcessName, class: ClassName },
    #[error("transform {from} -> {to} in `{process}`: {reason}")]
    TransformEndpoint {
        process: ProcessName,
        from: ClassName,
        to: ClassName,
        reason: &'static str,
    },
    #[error("class `{class}` is both input and output of `{process}` without transforms on both sides")]
    UnguardedOverlap { process: ProcessName, class: ClassName },
    #[error("grant of `{role}` on `{class}` lists no privileges")]
    EmptyGrant { role: RoleName, class: ClassName },
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("unknown role `{0}`")]
    UnknownRole(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDef {
    pub name: ClassName,
    /// Whether instances of this class are a significant state of an object.
    pub dynamic: bool,
    pub status_points: StatusPoints,
}

impl ClassDef {
    pub fn new(name: impl Into<ClassName>) -> Self {
        Self {
            name: name.into(),
            dynamic: false,
            status_points: StatusPoints::NONE,
        }
    }

    pub fn dynamic(mut self) -> Self {
        self.dynamic = true;
        self
    }

    pub fn with_point(mut self, point: StatusPoint) -> Self {
        self.status_points.insert(point);
        self
    }

    pub fn is(&self, point: StatusPoint) -> bool {
        self.status_points.contains(point)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transform {
    pub from: ClassName,
    pub to: ClassName,
    pub mode: TransformMode,
}

impl Transform {
    pub fn new(from: impl Into<ClassName>, to: impl Into<ClassName>, mode: TransformMode) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessDef {
    pub name: ProcessName,
    pub inputs: BTreeSet<ClassName>,
    pub outputs: BTreeSet<ClassName>,
    pub transforms: Vec<Transform>,
    pub role_privileges: BTreeMap<RoleName, ProcessPrivilege>,
}

impl ProcessDef {
    pub fn new(name: impl Into<ProcessName>) -> Self {
        Self {
            name: name.into(),
            inputs: BTreeSet::new(),
            outputs: BTreeSet::new(),
            transforms: Vec::new(),
            role_privileges: BTreeMap::new(),
        }
    }

    pub fn owner(mut self, role: impl Into<RoleName>) -> Self {
        self.role_privileges.insert(role.into(), ProcessPrivilege::Owner);
        self
    }

    pub fn responsible(mut self, role: impl Into<RoleName>) -> Self {
        self.role_privileges
            .insert(role.into(), ProcessPrivilege::Responsibility);
        self
    }

    pub fn input(mut self, class: impl Into<ClassName>) -> Self {
        self.inputs.insert(class.into());
        self
    }

    pub fn output(mut self, class: impl Into<ClassName>) -> Self {
        self.outputs.insert(class.into());
        self
    }

    pub fn transform(
        mut self,
        from: impl Into<ClassName>,
        to: impl Into<ClassName>,
        mode: TransformMode,
    ) -> Self {
        self.transforms.push(Transform::new(from, to, mode));
        self
    }

    /// A process without inputs mints new objects when it fires.
    pub fn is_generator(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn privilege_of(&self, role: &str) -> Option<ProcessPrivilege> {
        self.role_privileges.get(role).copied()
    }

    pub fn owners(&self) -> impl Iterator<Item = &RoleName> {
        self.roles_with(ProcessPrivilege::Owner)
    }

    pub fn responsibles(&self) -> impl Iterator<Item = &RoleName> {
        self.roles_with(ProcessPrivilege::Responsibility)
    }

    fn roles_with(&self, privilege: ProcessPrivilege) -> impl Iterator<Item = &RoleName> {
        self.role_privileges
            .iter()
            .filter(move |(_, p)| **p == privilege)
            .map(|(r, _)| r)
    }

    /// Whether firing this process consumes the object's token in `input`.
    /// Any leaving transform from `input` makes the token leave.
    pub fn consumes(&self, input: &str) -> bool {
        self.transforms
            .iter()
            .any(|t| t.from == input && t.mode == TransformMode::Leaving)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grant {
    pub role: RoleName,
    pub class: ClassName,
    pub privileges: PrivilegeSet,
}

impl Grant {
    pub fn new(
        role: impl Into<RoleName>,
        class: impl Into<ClassName>,
        privileges: impl Into<PrivilegeSet>,
    ) -> Self {
        Self {
            role: role.into(),
            class: class.into(),
            privileges: privileges.into(),
        }
    }
}

/// Producer/consumer direction of a class shared between two roles.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SharedClass {
    pub class: ClassName,
    pub producer: RoleName,
    pub consumer: RoleName,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub roles: Vec<RoleName>,
    pub classes: Vec<ClassDef>,
    pub processes: Vec<ProcessDef>,
    pub grants: Vec<Grant>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.sorted(), other.sorted());
        a.name == b.name
            && a.roles == b.roles
            && a.classes == b.classes
            && a.processes == b.processes
            && a.grants == b.grants
    }
}

impl Eq for Model {}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            roles: Vec::new(),
            classes: Vec::new(),
            processes: Vec::new(),
            grants: Vec::new(),
        }
    }

    pub fn with_role(mut self, role: impl Into<RoleName>) -> Self {
        self.roles.push(role.into());
        self
    }

    pub fn with_class(mut self, class: ClassDef) -> Self {
        self.classes.push(class);
        self
    }

    pub fn with_process(mut self, process: ProcessDef) -> Self {
        self.processes.push(process);
        self
    }

    pub fn with_grant(
        mut self,
        role: impl Into<RoleName>,
        class: impl Into<ClassName>,
        privileges: impl Into<PrivilegeSet>,
    ) -> Self {
        self.grants.push(Grant::new(role, class, privileges));
        self
    }

    /// Returns the canonical form, or the first structural problem found.
    pub fn canonicalize(&self) -> Result<Model, ModelError> {
        match self.check().into_iter().next() {
            Some(err) => Err(err),
            None => Ok(self.sorted()),
        }
    }

    /// Every structural problem, in declaration order.
    pub fn check(&self) -> Vec<ModelError> {
        let mut errors = Vec::new();

        let mut roles = BTreeSet::new();
        for role in &self.roles {
            if !is_identifier(role.as_str()) {
                errors.push(ModelError::InvalidName {
                    kind: "role",
                    name: role.to_string(),
                });
            }
            if !roles.insert(role.as_str()) {
                errors.push(ModelError::Duplicate {
                    kind: "role",
                    name: role.to_string(),
                });
            }
        }

        let mut classes = BTreeSet::new();
        for class in &self.classes {
            if !is_identifier(class.name.as_str()) {
                errors.push(ModelError::InvalidName {
                    kind: "class",
                    name: class.name.to_string(),
                });
            }
            if !classes.insert(class.name.as_str()) {
                errors.push(ModelError::Duplicate {
                    kind: "class",
                    name: class.name.to_string(),
                });
            }
        }

        let mut processes = BTreeSet::new();
        for process in &self.processes {
            let pname = &process.name;
            if !is_identifier(pname.as_str()) {
                errors.push(ModelError::InvalidName {
                    kind: "process",
                    name: pname.to_string(),
                });
            }
            if !processes.insert(pname.as_str()) {
                errors.push(ModelError::Duplicate {
                    kind: "process",
                    name: pname.to_string(),
                });
            }
            for role in process.role_privileges.keys() {
                if !roles.contains(role.as_str()) {
                    errors.push(ModelError::UnresolvedReference {
                        name: role.to_string(),
                        site: format!("process {pname}"),
                    });
                }
            }
            for class in process.inputs.iter().chain(&process.outputs) {
                if !classes.contains(class.as_str()) {
                    errors.push(ModelError::UnresolvedReference {
                        name: class.to_string(),
                        site: format!("process {pname}"),
                    });
                }
            }
            errors.extend(check_transforms(process));
        }

        let mut grants = BTreeSet::new();
        for grant in &self.grants {
            let site = format!("grant {} on {}", grant.role, grant.class);
            if !roles.contains(grant.role.as_str()) {
                errors.push(ModelError::UnresolvedReference {
                    name: grant.role.to_string(),
                    site: site.clone(),
                });
            }
            if !classes.contains(grant.class.as_str()) {
                errors.push(ModelError::UnresolvedReference {
                    name: grant.class.to_string(),
                    site: site.clone(),
                });
            }
            if !grants.insert((grant.role.as_str(), grant.class.as_str())) {
                errors.push(ModelError::Duplicate { kind: "grant", name: site });
            } else if grant.privileges.is_empty() {
                errors.push(ModelError::EmptyGrant {
                    role: grant.role.clone(),
                    class: grant.class.clone(),
                });
            }
        }

        errors
    }

    pub(crate) fn sorted(&self) -> Model {
        let mut m = self.clone();
        m.roles.sort();
        m.classes.sort_by(|a, b| a.name.cmp(&b.name));
        m.processes.sort_by(|a, b| a.name.cmp(&b.name));
        for p in &mut m.processes {
            p.transforms.sort();
        }
        m.grants
            .sort_by(|a, b| (&a.role, &a.class).cmp(&(&b.role, &b.class)));
        m
    }

    pub fn has_role(&self, role: &str) -> bool {
        self.roles.iter().any(|r| r == role)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn process(&self, name: &str) -> Option<&ProcessDef> {
        self.processes.iter().find(|p| p.name == name)
    }

    /// Privileges of `role` on `class`; empty when nothing is granted.
    pub fn privileges(&self, role: &str, class: &str) -> PrivilegeSet {
        self.grants
            .iter()
            .find(|g| g.role == role && g.class == class)
            .map(|g| g.privileges)
            .unwrap_or_default()
    }

    pub fn has_privilege(&self, role: &str, class: &str, privilege: Privilege) -> bool {
        self.privileges(role, class).contains(privilege)
    }

    pub fn process_privilege(&self, role: &str, process: &str) -> Option<ProcessPrivilege> {
        self.process(process).and_then(|p| p.privilege_of(role))
    }

    pub fn input_classes(&self, process: &str) -> Result<&BTreeSet<ClassName>, ModelError> {
        self.process(process)
            .map(|p| &p.inputs)
            .ok_or_else(|| ModelError::UnknownProcess(process.to_owned()))
    }

    pub fn output_classes(&self, process: &str) -> Result<&BTreeSet<ClassName>, ModelError> {
        self.process(process)
            .map(|p| &p.outputs)
            .ok_or_else(|| ModelError::UnknownProcess(process.to_owned()))
    }

    /// Processes consuming `class` as input, in declaration order.
    pub fn consumers_of<'a>(&'a self, class: &'a str) -> impl Iterator<Item = &'a ProcessDef> {
        self.processes.iter().filter(move |p| p.inputs.contains(class))
    }

    /// Processes on which both roles hold a process privilege.
    pub fn shared_processes(
        &self,
        r1: &str,
        r2: &str,
    ) -> Result<BTreeSet<ProcessName>, ModelError> {
        self.require_role(r1)?;
        self.require_role(r2)?;
        Ok(self
            .processes
            .iter()
            .filter(|p| p.privilege_of(r1).is_some() && p.privilege_of(r2).is_some())
            .map(|p| p.name.clone())
            .collect())
    }

    /// Classes one role creates while the other holds a plus privilege on
    /// them, with the direction of sharing.
    pub fn shared_classes(
        &self,
        r1: &str,
        r2: &str,
    ) -> Result<BTreeSet<SharedClass>, ModelError> {
        self.require_role(r1)?;
        self.require_role(r2)?;
        let mut shared = BTreeSet::new();
        for class in &self.classes {
            let c = class.name.as_str();
            for (producer, consumer) in [(r1, r2), (r2, r1)] {
                if self.has_privilege(producer, c, Privilege::Creation)
                    && self.privileges(consumer, c).has_plus()
                {
                    shared.insert(SharedClass {
                        class: class.name.clone(),
                        producer: producer.into(),
                        consumer: consumer.into(),
                    });
                }
            }
        }
        Ok(shared)
    }

    fn require_role(&self, role: &str) -> Result<(), ModelError> {
        if self.has_role(role) {
            Ok(())
        } else {
            Err(ModelError::UnknownRole(role.to_owned()))
        }
    }
}

fn check_transforms(process: &ProcessDef) -> Vec<ModelError> {
    let mut errors = Vec::new();
    let mut seen = BTreeSet::new();
    for t in &process.transforms {
        if t.from == t.to {
            errors.push(ModelError::SelfTransform {
                process: process.name.clone(),
                class: t.from.clone(),
            });
            continue;
        }
        if !seen.insert((&t.from, &t.to)) {
            errors.push(ModelError::Duplicate {
                kind: "transform",
                name: format!("{} -> {} in {}", t.from, t.to, process.name),
            });
        }
        if !process.inputs.contains(&t.from) {
            errors.push(ModelError::TransformEndpoint {
                process: process.name.clone(),
                from: t.from.clone(),
                to: t.to.clone(),
                reason: "source is not an input",
            });
        }
        if !process.outputs.contains(&t.to) {
            errors.push(ModelError::TransformEndpoint {
                process: process.name.clone(),
                from: t.from.clone(),
                to: t.to.clone(),
                reason: "target is not an output",
            });
        }
    }
    for class in process.inputs.intersection(&process.outputs) {
        let as_source = process.transforms.iter().any(|t| &t.from == class);
        let as_target = process.transforms.iter().any(|t| &t.to == class);
        if !(as_source && as_target) {
            errors.push(ModelError::UnguardedOverlap {
                process: process.name.clone(),
                class: class.clone(),
            });
        }
    }
    errors
}
