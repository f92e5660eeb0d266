//! Domain types for a requirements corpus.
//!
//! Concerns, non-functional descriptions and aspect documents share one
//! identifier namespace. Identifiers compare after [`normalize_id`], names
//! compare case-insensitively.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Normalizes an identifier for comparison: hyphens are dropped and the
/// result is case-folded, so `Asp-01` and `asp01` denote the same entity.
pub fn normalize_id(id: &str) -> String {
    id.chars()
        .filter(|c| *c != '-')
        .flat_map(char::to_lowercase)
        .collect()
}

pub fn ids_equal(a: &str, b: &str) -> bool {
    normalize_id(a) == normalize_id(b)
}

pub fn name_key(name: &str) -> String {
    name.trim().to_lowercase()
}

pub fn names_equal(a: &str, b: &str) -> bool {
    name_key(a) == name_key(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConcernType {
    Functional,
    NonFunctional,
}

impl ConcernType {
    pub fn as_str(self) -> &'static str {
        match self {
            ConcernType::Functional => "functional",
            ConcernType::NonFunctional => "nonfunctional",
        }
    }
}

impl FromStr for ConcernType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "functional" => Ok(ConcernType::Functional),
            "nonfunctional" | "non-functional" | "non functional" => Ok(ConcernType::NonFunctional),
            other => Err(format!(
                "invalid concern type `{other}` (expected functional or nonfunctional)"
            )),
        }
    }
}

/// Annotation flags that drive the intent-based decomposition rules.
pub const KNOWN_ANNOTATIONS: [&str; 4] = [
    "limits_goal",
    "design_constraint",
    "unused_parts",
    "derive_new",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concern {
    pub id: String,
    pub name: String,
    pub ctype: ConcernType,
    pub objective: Option<String>,
    pub successful_scenario: Option<String>,
    pub alternative_scenario: Option<String>,
    pub revision_date: Option<NaiveDate>,
    pub review_count: u32,
    pub references: Vec<String>,
    pub stakeholders: Vec<String>,
    pub parent: Option<String>,
    pub annotations: BTreeSet<String>,
}

impl Concern {
    pub fn new(id: impl Into<String>, name: impl Into<String>, ctype: ConcernType) -> Self {
        Concern {
            id: id.into(),
            name: name.into(),
            ctype,
            objective: None,
            successful_scenario: None,
            alternative_scenario: None,
            revision_date: None,
            review_count: 0,
            references: Vec::new(),
            stakeholders: Vec::new(),
            parent: None,
            annotations: BTreeSet::new(),
        }
    }

    pub fn has_annotation(&self, flag: &str) -> bool {
        self.annotations.contains(flag)
    }

    /// The scenario text the decomposition lints inspect: the successful
    /// scenario followed by the alternative scenario, when present.
    pub fn scenario_text(&self) -> String {
        let mut parts = Vec::new();
        if let Some(s) = &self.successful_scenario {
            parts.push(s.as_str());
        }
        if let Some(s) = &self.alternative_scenario {
            parts.push(s.as_str());
        }
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NfDescription {
    pub id: String,
    pub name: String,
    pub related_concerns: Vec<String>,
    pub specification: Option<String>,
    pub revision_date: Option<NaiveDate>,
    pub review_count: u32,
    pub references: Vec<String>,
}

impl NfDescription {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        NfDescription {
            id: id.into(),
            name: name.into(),
            related_concerns: Vec::new(),
            specification: None,
            revision_date: None,
            review_count: 0,
            references: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Priority {
    High,
    Medium,
    Low,
}

impl Priority {
    pub fn as_str(self) -> &'static str {
        match self {
            Priority::High => "High",
            Priority::Medium => "Medium",
            Priority::Low => "Low",
        }
    }
}

impl FromStr for Priority {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "high" => Ok(Priority::High),
            "medium" => Ok(Priority::Medium),
            "low" => Ok(Priority::Low),
            other => Err(format!(
                "invalid priority `{other}` (expected High, Medium or Low)"
            )),
        }
    }
}

/// The concerns an aspect crosscuts: an explicit list, or every functional
/// concern in the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AspectConcerns {
    All,
    List(Vec<String>),
}

impl AspectConcerns {
    pub fn is_empty(&self) -> bool {
        matches!(self, AspectConcerns::List(l) if l.is_empty())
    }
}

impl Default for AspectConcerns {
    fn default() -> Self {
        AspectConcerns::List(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AspectDocument {
    pub id: String,
    pub name: String,
    pub concerns: AspectConcerns,
    pub description: Option<String>,
    /// Kept verbatim so that an unrecognised value can be reported by
    /// aspect validation instead of failing the whole parse.
    pub priority: Option<String>,
    pub precondition: Option<String>,
    pub postcondition: Option<String>,
    pub depends_on: Vec<String>,
    pub references: Vec<String>,
}

impl AspectDocument {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        AspectDocument {
            id: id.into(),
            name: name.into(),
            concerns: AspectConcerns::default(),
            description: None,
            priority: None,
            precondition: None,
            postcondition: None,
            depends_on: Vec::new(),
            references: Vec::new(),
        }
    }

    pub fn parsed_priority(&self) -> Option<Result<Priority, String>> {
        self.priority.as_deref().map(str::parse)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChecklistKind {
    ConcernEvaluation,
    AspectValidation,
}

impl ChecklistKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChecklistKind::ConcernEvaluation => "concern_evaluation",
            ChecklistKind::AspectValidation => "aspect_validation",
        }
    }

    pub fn questions(self) -> &'static [Question] {
        match self {
            ChecklistKind::ConcernEvaluation => &Question::CONCERN_EVALUATION,
            ChecklistKind::AspectValidation => &Question::ASPECT_VALIDATION,
        }
    }
}

impl FromStr for ChecklistKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "concern_evaluation" => Ok(ChecklistKind::ConcernEvaluation),
            "aspect_validation" => Ok(ChecklistKind::AspectValidation),
            other => Err(format!(
                "invalid checklist kind `{other}` (expected concern_evaluation or aspect_validation)"
            )),
        }
    }
}

/// Checklist question identifiers. `C*` cover completeness and `S*`
/// consistency of a concern; `A*` validate an aspect document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Question {
    C1,
    C2,
    C3,
    C4,
    C5,
    S1,
    S2,
    S3,
    S4,
    S5,
    A1,
    A2,
    A3,
    A4,
    A5,
}

impl Question {
    pub const CONCERN_EVALUATION: [Question; 10] = [
        Question::C1,
        Question::C2,
        Question::C3,
        Question::C4,
        Question::C5,
        Question::S1,
        Question::S2,
        Question::S3,
        Question::S4,
        Question::S5,
    ];
    pub const ASPECT_VALIDATION: [Question; 5] = [
        Question::A1,
        Question::A2,
        Question::A3,
        Question::A4,
        Question::A5,
    ];

    pub fn all() -> impl Iterator<Item = Question> {
        Self::CONCERN_EVALUATION
            .into_iter()
            .chain(Self::ASPECT_VALIDATION)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Question::C1 => "C1",
            Question::C2 => "C2",
            Question::C3 => "C3",
            Question::C4 => "C4",
            Question::C5 => "C5",
            Question::S1 => "S1",
            Question::S2 => "S2",
            Question::S3 => "S3",
            Question::S4 => "S4",
            Question::S5 => "S5",
            Question::A1 => "A1",
            Question::A2 => "A2",
            Question::A3 => "A3",
            Question::A4 => "A4",
            Question::A5 => "A5",
        }
    }

    pub fn kind(self) -> ChecklistKind {
        match self {
            Question::A1 | Question::A2 | Question::A3 | Question::A4 | Question::A5 => {
                ChecklistKind::AspectValidation
            }
            _ => ChecklistKind::ConcernEvaluation,
        }
    }

    /// Short label for reports.
    pub fn label(self) -> &'static str {
        match self {
            Question::C1 => "concern clearly defined",
            Question::C2 => "details missing or forgotten",
            Question::C3 => "associated with other concerns or requirements",
            Question::C4 => "enough information for an architectural decision",
            Question::C5 => "enough information for a test case",
            Question::S1 => "successful scenario in clear language",
            Question::S2 => "description free of misinterpretation",
            Question::S3 => "parts repeated in other concerns",
            Question::S4 => "conflicts with other concerns or requirements",
            Question::S5 => "traceable to origin and stakeholder",
            Question::A1 => "solution concept described",
            Question::A2 => "process described accurately",
            Question::A3 => "all related crosscutting parts contained",
            Question::A4 => "intersection areas identified",
            Question::A5 => "affected requirements and concerns identified",
        }
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Question {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Question::all()
            .find(|q| q.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown checklist question `{}`", s.trim()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Answer {
    Yes,
    No,
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        }
    }

    pub fn flipped(self) -> Answer {
        match self {
            Answer::Yes => Answer::No,
            Answer::No => Answer::Yes,
        }
    }
}

impl FromStr for Answer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yes" => Ok(Answer::Yes),
            "no" => Ok(Answer::No),
            other => Err(format!("invalid answer `{other}` (expected yes or no)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistResponse {
    pub target_id: String,
    pub kind: ChecklistKind,
    pub answers: BTreeMap<Question, Answer>,
    pub review_count: u32,
}

impl ChecklistResponse {
    pub fn new(target_id: impl Into<String>, kind: ChecklistKind) -> Self {
        ChecklistResponse {
            target_id: target_id.into(),
            kind,
            answers: BTreeMap::new(),
            review_count: 0,
        }
    }

    pub fn with_answers(mut self, answers: impl IntoIterator<Item = (Question, Answer)>) -> Self {
        self.answers.extend(answers);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequirementItem {
    pub id: String,
    pub text: String,
    pub concern: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stakeholder {
    pub id: String,
    pub name: String,
    pub role: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub concerns: Vec<Concern>,
    pub nf_descriptions: Vec<NfDescription>,
    pub aspects: Vec<AspectDocument>,
    pub checklists: Vec<ChecklistResponse>,
    pub requirements: Vec<RequirementItem>,
    pub stakeholders: Vec<Stakeholder>,
}

/// An entity a concern reference may resolve to.
#[derive(Debug, Clone, Copy)]
pub enum ConcernRef<'a> {
    Concern(&'a Concern),
    NonFunctional(&'a NfDescription),
}

impl<'a> ConcernRef<'a> {
    pub fn is_functional(&self) -> bool {
        matches!(self, ConcernRef::Concern(c) if c.ctype == ConcernType::Functional)
    }

    pub fn name(&self) -> &'a str {
        match self {
            ConcernRef::Concern(c) => &c.name,
            ConcernRef::NonFunctional(n) => &n.name,
        }
    }
}

fn by_id_or_name<'a, T>(
    items: &'a [T],
    reference: &str,
    id: impl Fn(&T) -> &str,
    name: impl Fn(&T) -> &str,
) -> Option<&'a T> {
    let key = normalize_id(reference);
    items
        .iter()
        .find(|t| normalize_id(id(t)) == key)
        .or_else(|| items.iter().find(|t| names_equal(name(t), reference)))
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.concerns.is_empty()
            && self.nf_descriptions.is_empty()
            && self.aspects.is_empty()
            && self.checklists.is_empty()
            && self.requirements.is_empty()
            && self.stakeholders.is_empty()
    }

    pub fn concern(&self, reference: &str) -> Option<&Concern> {
        by_id_or_name(&self.concerns, reference, |c| &c.id, |c| &c.name)
    }

    pub fn concern_mut(&mut self, reference: &str) -> Option<&mut Concern> {
        let key = normalize_id(reference);
        let idx = self
            .concerns
            .iter()
            .position(|c| normalize_id(&c.id) == key)
            .or_else(|| {
                self.concerns
                    .iter()
                    .position(|c| names_equal(&c.name, reference))
            })?;
        self.concerns.get_mut(idx)
    }

    pub fn nf_description(&self, reference: &str) -> Option<&NfDescription> {
        by_id_or_name(&self.nf_descriptions, reference, |n| &n.id, |n| &n.name)
    }

    pub fn aspect(&self, reference: &str) -> Option<&AspectDocument> {
        by_id_or_name(&self.aspects, reference, |a| &a.id, |a| &a.name)
    }

    pub fn stakeholder(&self, id: &str) -> Option<&Stakeholder> {
        self.stakeholders.iter().find(|s| ids_equal(&s.id, id))
    }

    /// Resolves a related-concern or crosscut reference against concerns
    /// first, then non-functional descriptions.
    pub fn resolve_concern_ref(&self, reference: &str) -> Option<ConcernRef<'_>> {
        self.concern(reference)
            .map(ConcernRef::Concern)
            .or_else(|| {
                self.nf_description(reference)
                    .map(ConcernRef::NonFunctional)
            })
    }

    pub fn functional_concerns(&self) -> impl Iterator<Item = &Concern> {
        self.concerns
            .iter()
            .filter(|c| c.ctype == ConcernType::Functional)
    }

    pub fn children_of<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Concern> + 'a {
        self.concerns.iter().filter(move |c| {
            c.parent
                .as_deref()
                .is_some_and(|p| self.parent_matches(p, id))
        })
    }

    fn parent_matches(&self, parent_ref: &str, id: &str) -> bool {
        self.concern(parent_ref)
            .is_some_and(|p| ids_equal(&p.id, id))
    }

    /// Expands an aspect's crosscut list. `ALL` yields every functional
    /// concern's name; explicit entries are returned verbatim.
    pub fn expand_aspect_concerns(&self, aspect: &AspectDocument) -> Vec<String> {
        match &aspect.concerns {
            AspectConcerns::All => self.functional_concerns().map(|c| c.name.clone()).collect(),
            AspectConcerns::List(l) => l.clone(),
        }
    }

    /// Review count recorded on the entity a checklist targets. Aspect
    /// documents carry no count of their own; they report the count of the
    /// non-functional description that shares their identifier, if any.
    pub fn target_review_count(&self, checklist: &ChecklistResponse) -> Option<u32> {
        match checklist.kind {
            ChecklistKind::ConcernEvaluation => {
                match self.resolve_concern_ref(&checklist.target_id)? {
                    ConcernRef::Concern(c) => Some(c.review_count),
                    ConcernRef::NonFunctional(n) => Some(n.review_count),
                }
            }
            ChecklistKind::AspectValidation => {
                let aspect = self.aspect(&checklist.target_id)?;
                self.nf_descriptions
                    .iter()
                    .find(|n| ids_equal(&n.id, &aspect.id))
                    .map(|n| n.review_count)
            }
        }
    }

    /// Human-facing label for a checklist target: its name when it resolves.
    pub fn target_label(&self, checklist: &ChecklistResponse) -> String {
        let name = match checklist.kind {
            ChecklistKind::ConcernEvaluation => self
                .resolve_concern_ref(&checklist.target_id)
                .map(|r| r.name().to_string()),
            ChecklistKind::AspectValidation => {
                self.aspect(&checklist.target_id).map(|a| a.name.clone())
            }
        };
        match name {
            Some(n) if !n.is_empty() => n,
            _ => checklist.target_id.clone(),
        }
    }

    /// Sorts every entity list into the canonical order used by the text
    /// format: by normalized id (checklists by target, then kind).
    pub fn canonicalize(&mut self) {
        fn key(id: &str) -> (String, String) {
            (normalize_id(id), id.to_string())
        }
        self.concerns.sort_by_cached_key(|c| key(&c.id));
        self.nf_descriptions.sort_by_cached_key(|n| key(&n.id));
        self.aspects.sort_by_cached_key(|a| key(&a.id));
        self.checklists
            .sort_by_cached_key(|c| (key(&c.target_id), c.kind));
        self.requirements.sort_by_cached_key(|r| key(&r.id));
        self.stakeholders.sort_by_cached_key(|s| key(&s.id));
    }

    pub fn canonical(mut self) -> Self {
        self.canonicalize();
        self
    }

    /// Appends another corpus's entities.
    pub fn extend(&mut self, other: Corpus) {
        self.concerns.extend(other.concerns);
        self.nf_descriptions.extend(other.nf_descriptions);
        self.aspects.extend(other.aspects);
        self.checklists.extend(other.checklists);
        self.requirements.extend(other.requirements);
        self.stakeholders.extend(other.stakeholders);
    }
}
