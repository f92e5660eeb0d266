//! Phase 2 and Phase 3 validation: non-functional and aspect document
//! templates, the two checklists with their pass rules, and review-count
//! consistency.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::error::GateError;
use crate::model::*;

/// The answer each checklist question must receive for the gate to pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateConfig {
    expected: BTreeMap<Question, Answer>,
}

impl Default for GateConfig {
    /// Every question expects `Yes` except C2 (missing details), which
    /// expects `No`.
    fn default() -> Self {
        let expected = Question::all()
            .map(|q| {
                (
                    q,
                    if q == Question::C2 {
                        Answer::No
                    } else {
                        Answer::Yes
                    },
                )
            })
            .collect();
        GateConfig { expected }
    }
}

impl GateConfig {
    pub fn expected(&self, q: Question) -> Answer {
        self.expected[&q]
    }

    pub fn set(&mut self, q: Question, a: Answer) {
        self.expected.insert(q, a);
    }

    /// Reads `question = yes|no` overrides on top of the defaults. Blank
    /// lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, GateError> {
        let mut cfg = GateConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| GateError::Config {
                line: i + 1,
                message,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `question = yes|no`, found `{line}`")))?;
            let q: Question = k.parse().map_err(err)?;
            let a: Answer = v.parse().map_err(err)?;
            cfg.set(q, a);
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    Incomplete,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "Pass",
            Verdict::Fail => "Fail",
            Verdict::Incomplete => "Incomplete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateResult {
    pub target_id: String,
    pub verdict: Verdict,
    /// For `Fail`, the questions answered against expectation; for
    /// `Incomplete`, the questions left unanswered.
    pub failing_questions: Vec<Question>,
    pub review_count: u32,
}

fn evaluate(response: &ChecklistResponse, config: &GateConfig) -> GateResult {
    let questions = response.kind.questions();
    let unanswered: Vec<Question> = questions
        .iter()
        .copied()
        .filter(|q| !response.answers.contains_key(q))
        .collect();
    let (verdict, failing_questions) = if !unanswered.is_empty() {
        (Verdict::Incomplete, unanswered)
    } else {
        let failing: Vec<Question> = questions
            .iter()
            .copied()
            .filter(|q| response.answers[q] != config.expected(*q))
            .collect();
        if failing.is_empty() {
            (Verdict::Pass, failing)
        } else {
            (Verdict::Fail, failing)
        }
    };
    GateResult {
        target_id: response.target_id.clone(),
        verdict,
        failing_questions,
        review_count: response.review_count,
    }
}

fn expect_kind(response: &ChecklistResponse, kind: ChecklistKind) -> Result<(), GateError> {
    if response.kind == kind {
        Ok(())
    } else {
        Err(GateError::WrongKind {
            expected: kind.as_str(),
            found: response.kind.as_str(),
        })
    }
}

pub fn evaluate_concern_checklist(
    response: &ChecklistResponse,
    config: &GateConfig,
) -> Result<GateResult, GateError> {
    expect_kind(response, ChecklistKind::ConcernEvaluation)?;
    Ok(evaluate(response, config))
}

pub fn evaluate_aspect_checklist(
    response: &ChecklistResponse,
    config: &GateConfig,
    aspect: &AspectDocument,
) -> Result<GateResult, GateError> {
    expect_kind(response, ChecklistKind::AspectValidation)?;
    if !ids_equal(&response.target_id, &aspect.id)
        && !names_equal(&response.target_id, &aspect.name)
    {
        return Err(GateError::TargetMismatch {
            target: response.target_id.clone(),
            aspect: aspect.id.clone(),
        });
    }
    Ok(evaluate(response, config))
}

fn blank(v: &Option<String>) -> bool {
    v.as_deref().is_none_or(|s| s.trim().is_empty())
}

fn missing(target: &str, field: &str) -> Diagnostic {
    Diagnostic::error(Code::MissingField, target, format!("`{field}` is missing"))
}

/// Checks a non-functional description: mandatory fields present, related
/// concerns resolvable and functional.
pub fn validate_nf_description(nf: &NfDescription, corpus: &Corpus) -> Vec<Diagnostic> {
    let target = nf.id.as_str();
    let mut out = Vec::new();
    if nf.id.trim().is_empty() {
        out.push(missing(target, "id"));
    }
    if nf.name.trim().is_empty() {
        out.push(missing(target, "name"));
    }
    if nf.related_concerns.is_empty() {
        out.push(missing(target, "related_concerns"));
    }
    if blank(&nf.specification) {
        out.push(missing(target, "specification"));
    }
    for r in &nf.related_concerns {
        match corpus.resolve_concern_ref(r) {
            None => out.push(Diagnostic::error(
                Code::RefUnresolved,
                target,
                format!("related concern `{r}` does not resolve"),
            )),
            Some(c) if !c.is_functional() => out.push(Diagnostic::error(
                Code::TypeMismatch,
                target,
                format!("related concern `{}` is not functional", c.name()),
            )),
            Some(_) => {}
        }
    }
    if let Some(c) = corpus
        .concerns
        .iter()
        .find(|c| !nf.name.is_empty() && names_equal(&c.name, &nf.name))
    {
        if c.ctype == ConcernType::Functional {
            out.push(Diagnostic::error(
                Code::TypeMismatch,
                target,
                format!("describes concern {} which is declared functional", c.id),
            ));
        }
    }
    sort_diagnostics(&mut out);
    out
}

/// Checks an aspect document. `ALL` is expanded to every functional concern
/// before validation, so it behaves exactly like the explicit list.
pub fn validate_aspect_document(aspect: &AspectDocument, corpus: &Corpus) -> Vec<Diagnostic> {
    let target = aspect.id.as_str();
    let mut out = Vec::new();
    if aspect.id.trim().is_empty() {
        out.push(missing(target, "id"));
    }
    if aspect.name.trim().is_empty() {
        out.push(missing(target, "name"));
    }
    let concerns = corpus.expand_aspect_concerns(aspect);
    if concerns.is_empty() {
        out.push(Diagnostic::error(
            Code::MissingField,
            target,
            "`concerns` names no concern",
        ));
    }
    for r in &concerns {
        if corpus.resolve_concern_ref(r).is_none() {
            out.push(Diagnostic::error(
                Code::RefUnresolved,
                target,
                format!("crosscut concern `{r}` does not resolve"),
            ));
        }
    }
    if blank(&aspect.description) {
        out.push(missing(target, "description"));
    }
    match aspect.parsed_priority() {
        None => out.push(missing(target, "priority")),
        Some(Err(_))
            if aspect
                .priority
                .as_deref()
                .is_some_and(|p| p.trim().is_empty()) =>
        {
            out.push(missing(target, "priority"))
        }
        Some(Err(m)) => out.push(Diagnostic::error(Code::BadPriority, target, m)),
        Some(Ok(_)) => {}
    }
    if blank(&aspect.precondition) && blank(&aspect.postcondition) {
        out.push(Diagnostic::error(
            Code::MissingCondition,
            target,
            "neither a precondition nor a postcondition is given",
        ));
    }
    sort_diagnostics(&mut out);
    out
}

/// Compares checklist review counts with their targets and flags reviewed
/// entities that carry no revision date.
pub fn check_review_tracking(corpus: &Corpus) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for ch in &corpus.checklists {
        if let Some(n) = corpus.target_review_count(ch) {
            if n != ch.review_count {
                out.push(Diagnostic::warning(
                    Code::ReviewDrift,
                    &ch.target_id,
                    format!(
                        "{} checklist records {} review(s), the entity records {n}",
                        ch.kind.as_str(),
                        ch.review_count
                    ),
                ));
            }
        }
    }
    let dated = corpus
        .concerns
        .iter()
        .map(|c| (&c.id, c.review_count, c.revision_date))
        .chain(
            corpus
                .nf_descriptions
                .iter()
                .map(|n| (&n.id, n.review_count, n.revision_date)),
        );
    for (id, count, date) in dated {
        if count >= 1 && date.is_none() {
            out.push(Diagnostic::warning(
                Code::StaleDate,
                id,
                format!("reviewed {count} time(s) but no revision date"),
            ));
        }
    }
    sort_diagnostics(&mut out);
    out
}
