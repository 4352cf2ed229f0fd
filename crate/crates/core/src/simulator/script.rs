use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{init_state, step, SimError, SimState, Token};
use crate::model::Model;
use crate::names::{ObjectId, ProcessName};

/// The object a script step targets. `"new"` asks a generator to mint one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ScriptObject {
    New,
    Id(ObjectId),
}

impl ScriptObject {
    pub fn as_str(&self) -> &str {
        match self {
            ScriptObject::New => "new",
            ScriptObject::Id(id) => id.as_str(),
        }
    }
}

impl From<&str> for ScriptObject {
    fn from(s: &str) -> Self {
        if s == "new" {
            ScriptObject::New
        } else {
            ScriptObject::Id(s.into())
        }
    }
}

impl fmt::Display for ScriptObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ScriptObject {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ScriptObject {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(String::deserialize(d)?.as_str().into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptStep {
    pub process: ProcessName,
    pub object: ScriptObject,
}

impl ScriptStep {
    pub fn new(process: impl Into<ProcessName>, object: &str) -> Self {
        Self {
            process: process.into(),
            object: object.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Fired,
    NotEnabled,
    /// Not enabled, and a missing input is a waiting point.
    BlockedWaiting,
    /// The step could not be interpreted; the run stops here.
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub step: usize,
    pub process: ProcessName,
    pub object: ScriptObject,
    pub outcome: Outcome,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minted: Option<ObjectId>,
}

impl TraceEvent {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("events always serialize")
    }
}

/// A running script: state plus the counter used to name minted objects.
#[derive(Debug, Clone)]
pub struct Simulation<'m> {
    model: &'m Model,
    state: SimState,
    next_mint: usize,
    steps: usize,
    aborted: bool,
}

/// Name for the next minted object: `new<n>` for the smallest unused `n`
/// not below `from`.
pub(crate) fn mint_name(from: usize, taken: impl Fn(&str) -> bool) -> (ObjectId, usize) {
    let mut n = from;
    loop {
        let name = format!("new{n}");
        if !taken(&name) {
            return (name.into(), n + 1);
        }
        n += 1;
    }
}

impl<'m> Simulation<'m> {
    pub fn new(model: &'m Model, seed: &[Token]) -> Result<Self, SimError> {
        Ok(Self {
            model,
            state: init_state(model, seed)?,
            next_mint: 1,
            steps: 0,
            aborted: false,
        })
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn is_aborted(&self) -> bool {
        self.aborted
    }

    /// Executes one step. Failed steps leave the state untouched.
    pub fn apply(&mut self, script_step: &ScriptStep) -> TraceEvent {
        self.steps += 1;
        let mut event = TraceEvent {
            step: self.steps,
            process: script_step.process.clone(),
            object: script_step.object.clone(),
            outcome: Outcome::Fired,
            detail: String::new(),
            minted: None,
        };
        if self.aborted {
            event.outcome = Outcome::Aborted;
            event.detail = "run already aborted".to_owned();
            return event;
        }
        let Some(process) = self.model.process(script_step.process.as_str()) else {
            self.aborted = true;
            event.outcome = Outcome::Aborted;
            event.detail = SimError::UnknownProcess(script_step.process.to_string()).to_string();
            return event;
        };
        let (object, next_mint) = match &script_step.object {
            ScriptObject::New => mint_name(self.next_mint, |n| self.state.has_object(n)),
            ScriptObject::Id(id) => (id.clone(), self.next_mint),
        };
        let creates = process.is_generator() && !self.state.has_object(object.as_str());
        match step(self.model, &mut self.state, process.name.as_str(), object.as_str()) {
            Ok(effect) => {
                event.detail = effect.describe();
                if script_step.object == ScriptObject::New {
                    self.next_mint = next_mint;
                    event.minted = Some(object.clone());
                    event.detail = format!("minted {object}; {}", event.detail);
                } else if creates {
                    event.detail = format!("created {object}; {}", event.detail);
                }
            }
            Err(err) => {
                event.outcome = match &err {
                    SimError::NotEnabled { waiting: true, .. } => Outcome::BlockedWaiting,
                    _ => Outcome::NotEnabled,
                };
                event.detail = err.to_string();
            }
        }
        event
    }
}

/// Runs `script` from `seed`, reporting every step. Failing steps do not
/// stop the run; an unknown process aborts it.
pub fn run_script(model: &Model, seed: &[Token], script: &[ScriptStep]) -> Result<Vec<TraceEvent>, SimError> {
    let mut sim = Simulation::new(model, seed)?;
    let mut events = Vec::with_capacity(script.len());
    for s in script {
        let event = sim.apply(s);
        let stop = event.outcome == Outcome::Aborted;
        events.push(event);
        if stop {
            break;
        }
    }
    Ok(events)
}
