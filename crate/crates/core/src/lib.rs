//! Collaborative service models: roles, object classes, processes and
//! privilege grants, with a text language, a validator, a collaboration
//! level classifier, a token simulator and diagram export.

pub mod classifier;
pub mod diagnostic;
pub mod dsl;
pub mod fixtures;
pub mod model;
pub mod names;
pub mod privilege;
pub mod render;
pub mod simulator;
pub mod validator;

pub use classifier::{classify_all, classify_pair, ClassifyError, CollaborationReport, Level, LevelFinding};
pub use diagnostic::{Code, Diagnostic, Severity, Site, SourceSpan};
pub use dsl::{emit_json, emit_text, parse_json, parse_text, ParseResult};
pub use model::{ClassDef, Grant, Model, ModelError, ProcessDef, SharedClass, Transform};
pub use names::{ClassName, ObjectId, ProcessName, RoleName};
pub use privilege::{Privilege, PrivilegeSet, ProcessPrivilege, StatusPoint, StatusPoints, TransformMode};
pub use validator::{explain, validate};
pub use render::{to_dot, to_mermaid, RenderError, RenderOptions};
pub use simulator::{
    enabled, explore, fire, init_state, run_script, Bounds, Outcome, Query, ReachabilityGraph,
    ReachabilitySummary, ScriptStep, SimError, SimState, Token, TraceEvent,
};
