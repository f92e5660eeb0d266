//! Diagnostics emitted by every validation stage.
//!
//! Violations are values, not errors: each check returns a list of
//! [`Diagnostic`]s and the caller decides what to do with them.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The diagnostic registry. Every diagnostic code the engine can produce is
/// listed here; `as_str` gives the stable token used in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Code {
    // structure
    DupId,
    DupName,
    DupChecklist,
    RefUnresolved,
    ParentCycle,
    SelfDependency,
    BadName,
    BadQuestion,
    // ingest
    UnknownKey,
    UnknownAnnotation,
    SkippedElement,
    // concern handling
    TypeSuspect,
    Dec01,
    Dec02,
    Dec03,
    Dec04,
    Dec05,
    Dec06,
    Dec07,
    Dec08,
    MissingField,
    EmptyAlt,
    // validation gates
    TypeMismatch,
    BadPriority,
    MissingCondition,
    ReviewDrift,
    StaleDate,
    // traceability
    NoStakeholder,
}

impl Code {
    pub const ALL: [Code; 28] = [
        Code::DupId,
        Code::DupName,
        Code::DupChecklist,
        Code::RefUnresolved,
        Code::ParentCycle,
        Code::SelfDependency,
        Code::BadName,
        Code::BadQuestion,
        Code::UnknownKey,
        Code::UnknownAnnotation,
        Code::SkippedElement,
        Code::TypeSuspect,
        Code::Dec01,
        Code::Dec02,
        Code::Dec03,
        Code::Dec04,
        Code::Dec05,
        Code::Dec06,
        Code::Dec07,
        Code::Dec08,
        Code::MissingField,
        Code::EmptyAlt,
        Code::TypeMismatch,
        Code::BadPriority,
        Code::MissingCondition,
        Code::ReviewDrift,
        Code::StaleDate,
        Code::NoStakeholder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::DupId => "DUP_ID",
            Code::DupName => "DUP_NAME",
            Code::DupChecklist => "DUP_CHECKLIST",
            Code::RefUnresolved => "REF_UNRESOLVED",
            Code::ParentCycle => "PARENT_CYCLE",
            Code::SelfDependency => "SELF_DEPENDENCY",
            Code::BadName => "BAD_NAME",
            Code::BadQuestion => "BAD_QUESTION",
            Code::UnknownKey => "UNKNOWN_KEY",
            Code::UnknownAnnotation => "UNKNOWN_ANNOTATION",
            Code::SkippedElement => "SKIPPED_ELEMENT",
            Code::TypeSuspect => "TYPE_SUSPECT",
            Code::Dec01 => "DEC01",
            Code::Dec02 => "DEC02",
            Code::Dec03 => "DEC03",
            Code::Dec04 => "DEC04",
            Code::Dec05 => "DEC05",
            Code::Dec06 => "DEC06",
            Code::Dec07 => "DEC07",
            Code::Dec08 => "DEC08",
            Code::MissingField => "MISSING_FIELD",
            Code::EmptyAlt => "EMPTY_ALT",
            Code::TypeMismatch => "TYPE_MISMATCH",
            Code::BadPriority => "BAD_PRIORITY",
            Code::MissingCondition => "MISSING_CONDITION",
            Code::ReviewDrift => "REVIEW_DRIFT",
            Code::StaleDate => "STALE_DATE",
            Code::NoStakeholder => "NO_STAKEHOLDER",
        }
    }

    pub fn is_decomposition(self) -> bool {
        matches!(
            self,
            Code::Dec01
                | Code::Dec02
                | Code::Dec03
                | Code::Dec04
                | Code::Dec05
                | Code::Dec06
                | Code::Dec07
                | Code::Dec08
        )
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    /// Entity identifier, or a `file:line` locus for ingest diagnostics.
    pub target: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(
        code: Code,
        severity: Severity,
        target: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Diagnostic {
            code,
            severity,
            target: target.into(),
            message: message.into(),
        }
    }

    pub fn error(code: Code, target: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(code, Severity::Error, target, message)
    }

    pub fn warning(code: Code, target: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(code, Severity::Warning, target, message)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}: {}",
            self.severity, self.code, self.target, self.message
        )
    }
}

/// Sorts diagnostics by target, then code, then message.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        a.target
            .cmp(&b.target)
            .then(a.code.cmp(&b.code))
            .then_with(|| a.message.cmp(&b.message))
    });
}
