//! Token semantics: an object is in a class when a token `(object, class)`
//! exists. Firing a process on an object adds a token for every output class;
//! an input token is removed only if some transform from that input leaves.
//! Processes without inputs are generators and create new objects.

mod explore;
mod script;

pub use explore::{explore, Bounds, Query, QueryResult, ReachabilityGraph, ReachabilitySummary};
pub use script::{run_script, Outcome, ScriptObject, ScriptStep, Simulation, TraceEvent};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Model, ProcessDef};
use crate::names::{ClassName, ObjectId, ProcessName};
use crate::privilege::StatusPoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("unknown process `{0}`")]
    UnknownProcess(String),
    #[error("token ({object}, {class}) appears twice in the seed")]
    DuplicateToken { object: ObjectId, class: ClassName },
    #[error("{process} is not enabled for {object}: missing {}{}", join(.missing), if *.waiting { " (waiting)" } else { "" })]
    NotEnabled {
        process: ProcessName,
        object: ObjectId,
        missing: Vec<ClassName>,
        /// Some missing class is a waiting point.
        waiting: bool,
    },
    #[error("generator {process} cannot create {object}: the object already exists")]
    StaleObject { process: ProcessName, object: ObjectId },
    #[error("process {0} has neither inputs nor outputs")]
    EmptyProcess(ProcessName),
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
}

fn join(names: &[ClassName]) -> String {
    names.iter().map(ClassName::as_str).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Token {
    pub object: ObjectId,
    pub class: ClassName,
}

impl Token {
    pub fn new(object: impl Into<ObjectId>, class: impl Into<ClassName>) -> Self {
        Self {
            object: object.into(),
            class: class.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct SimState {
    pub tokens: BTreeSet<Token>,
}

impl SimState {
    pub fn contains(&self, object: &str, class: &str) -> bool {
        self.tokens.contains(&Token::new(object, class))
    }

    pub fn has_object(&self, object: &str) -> bool {
        self.tokens.iter().any(|t| t.object == object)
    }

    pub fn classes_of<'a>(&'a self, object: &'a str) -> impl Iterator<Item = &'a ClassName> {
        self.tokens
            .iter()
            .filter(move |t| t.object == object)
            .map(|t| &t.class)
    }

    pub fn objects(&self) -> BTreeSet<&ObjectId> {
        self.tokens.iter().map(|t| &t.object).collect()
    }

    pub fn count_in(&self, class: &str) -> usize {
        self.tokens.iter().filter(|t| t.class == class).count()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn init_state(model: &Model, seed: &[Token]) -> Result<SimState, SimError> {
    let mut state = SimState::default();
    for token in seed {
        if model.class(token.class.as_str()).is_none() {
            return Err(SimError::UnknownClass(token.class.to_string()));
        }
        if !state.tokens.insert(token.clone()) {
            return Err(SimError::DuplicateToken {
                object: token.object.clone(),
                class: token.class.clone(),
            });
        }
    }
    Ok(state)
}

/// Non-generator processes whose every input holds a token for `object`.
pub fn enabled(model: &Model, state: &SimState, object: &str) -> BTreeSet<ProcessName> {
    model
        .processes
        .iter()
        .filter(|p| !p.inputs.is_empty() && p.inputs.iter().all(|c| state.contains(object, c.as_str())))
        .map(|p| p.name.clone())
        .collect()
}

/// Token changes made by one firing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FireEffect {
    pub added: Vec<ClassName>,
    /// Outputs the object was already in; re-adding them changes nothing.
    pub already_present: Vec<ClassName>,
    pub removed: Vec<ClassName>,
}

impl FireEffect {
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if !self.added.is_empty() {
            parts.push(format!("added {}", join(&self.added)));
        }
        if !self.removed.is_empty() {
            parts.push(format!("removed {}", join(&self.removed)));
        }
        if !self.already_present.is_empty() {
            parts.push(format!("already in {}", join(&self.already_present)));
        }
        parts.join("; ")
    }
}

fn check_fire(model: &Model, state: &SimState, process: &ProcessDef, object: &str) -> Result<(), SimError> {
    if process.is_generator() {
        if process.outputs.is_empty() {
            return Err(SimError::EmptyProcess(process.name.clone()));
        }
        if state.has_object(object) {
            return Err(SimError::StaleObject {
                process: process.name.clone(),
                object: object.into(),
            });
        }
        return Ok(());
    }
    let missing: Vec<ClassName> = process
        .inputs
        .iter()
        .filter(|c| !state.contains(object, c.as_str()))
        .cloned()
        .collect();
    if missing.is_empty() {
        return Ok(());
    }
    let waiting = missing
        .iter()
        .any(|c| model.class(c.as_str()).is_some_and(|d| d.is(StatusPoint::Waiting)));
    Err(SimError::NotEnabled {
        process: process.name.clone(),
        object: object.into(),
        missing,
        waiting,
    })
}

/// Fires `process` on `object` in place. On error the state is unchanged.
pub fn step(model: &Model, state: &mut SimState, process: &str, object: &str) -> Result<FireEffect, SimError> {
    let p = model
        .process(process)
        .ok_or_else(|| SimError::UnknownProcess(process.to_owned()))?;
    check_fire(model, state, p, object)?;
    let mut effect = FireEffect::default();
    for input in &p.inputs {
        if p.consumes(input.as_str()) {
            state.tokens.remove(&Token::new(object, input.clone()));
            effect.removed.push(input.clone());
        }
    }
    for output in &p.outputs {
        if state.tokens.insert(Token::new(object, output.clone())) {
            effect.added.push(output.clone());
        } else {
            effect.already_present.push(output.clone());
        }
    }
    Ok(effect)
}

pub fn fire(model: &Model, state: &SimState, process: &str, object: &str) -> Result<SimState, SimError> {
    let mut next = state.clone();
    step(model, &mut next, process, object)?;
    Ok(next)
}
