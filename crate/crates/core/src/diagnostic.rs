//! Findings reported by the parsers and the validator.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::names::{ClassName, ProcessName, RoleName};

/// Closed catalog of diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    /// Syntax error in `.csm` text.
    Syntax,
    /// Unresolved name.
    Reference,
    /// Duplicate declaration.
    Duplicate,
    /// Transform without a `remaining`/`leaving` keyword.
    TransformMode,
    /// Transform endpoint that is not an input/output of its process.
    TransformEndpoint,
    /// Malformed JSON document.
    Json,
    C1,
    C2,
    C3,
    C4,
    C5,
    OrphanProcess,
    DecisionUnjustified,
    DecisionMissing,
    FailWithoutBackup,
    WaitingNotShared,
}

impl Code {
    pub const ALL: [Code; 16] = [
        Code::Syntax,
        Code::Reference,
        Code::Duplicate,
        Code::TransformMode,
        Code::TransformEndpoint,
        Code::Json,
        Code::C1,
        Code::C2,
        Code::C3,
        Code::C4,
        Code::C5,
        Code::OrphanProcess,
        Code::DecisionUnjustified,
        Code::DecisionMissing,
        Code::FailWithoutBackup,
        Code::WaitingNotShared,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::Syntax => "E-SYN",
            Code::Reference => "E-REF",
            Code::Duplicate => "E-DUP",
            Code::TransformMode => "E-TRF-MODE",
            Code::TransformEndpoint => "E-TRF-END",
            Code::Json => "E-JSON",
            Code::C1 => "E-C1",
            Code::C2 => "E-C2",
            Code::C3 => "E-C3",
            Code::C4 => "E-C4",
            Code::C5 => "E-C5",
            Code::OrphanProcess => "E-ORPHAN-P",
            Code::DecisionUnjustified => "W-DP",
            Code::DecisionMissing => "W-DP-MISS",
            Code::FailWithoutBackup => "W-FP",
            Code::WaitingNotShared => "W-WP",
        }
    }

    pub fn severity(self) -> Severity {
        if self.as_str().starts_with("W-") {
            Severity::Warning
        } else {
            Severity::Error
        }
    }

    /// The five meta-model constraint codes.
    pub fn is_constraint(self) -> bool {
        matches!(self, Code::C1 | Code::C2 | Code::C3 | Code::C4 | Code::C5)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Code {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| s.to_owned())
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Location in a source file; line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// The model element(s) a diagnostic is about.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Site {
    Model,
    Role(RoleName),
    Class(ClassName),
    Process(ProcessName),
    Transform {
        process: ProcessName,
        from: ClassName,
        to: ClassName,
    },
    Grant {
        role: RoleName,
        class: ClassName,
    },
    /// A role's access to a class through a process it holds.
    Access {
        role: RoleName,
        process: ProcessName,
        class: ClassName,
    },
    /// Free-form description, used for source-level findings.
    Text(String),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Model => f.write_str("model"),
            Site::Role(r) => write!(f, "role {r}"),
            Site::Class(c) => write!(f, "class {c}"),
            Site::Process(p) => write!(f, "process {p}"),
            Site::Transform { process, from, to } => {
                write!(f, "transform {from} -> {to} in process {process}")
            }
            Site::Grant { role, class } => write!(f, "grant {role} on {class}"),
            Site::Access {
                role,
                process,
                class,
            } => write!(f, "role {role} / process {process} / class {class}"),
            Site::Text(t) => f.write_str(t),
        }
    }
}

impl Serialize for Site {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub site: Site,
    pub message: String,
    pub suggestion: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn new(code: Code, site: Site, message: impl Into<String>) -> Self {
        Self {
            code,
            severity: code.severity(),
            site,
            message: message.into(),
            suggestion: None,
            span: None,
        }
    }

    pub fn with_suggestion(mut self, suggestion: impl Into<String>) -> Self {
        self.suggestion = Some(suggestion.into());
        self
    }

    pub fn with_span(mut self, span: Option<SourceSpan>) -> Self {
        self.span = span;
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// One JSON object on a single line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("diagnostics always serialize")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = &self.span {
            write!(f, "{span}: ")?;
        }
        write!(f, "{} {} [{}]: {}", self.severity, self.code, self.site, self.message)?;
        if let Some(s) = &self.suggestion {
            write!(f, " (suggestion: {s})")?;
        }
        Ok(())
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}
