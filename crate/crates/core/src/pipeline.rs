//! Full validation run over a corpus and report rendering.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostic::{Diagnostic, Severity};
use crate::error::{PipelineError, UnknownFormat};
use crate::gates::{
    check_review_tracking, evaluate_aspect_checklist, evaluate_concern_checklist,
    validate_aspect_document, validate_nf_description, GateConfig, GateResult, Verdict,
};
use crate::handling::{
    classify_concern_type, classify_nf_description, lint_decomposition,
    validate_concern_description, DecompositionConfig,
};
use crate::ingest::{parse_corpus, Ingested, Source};
use crate::integrity::check_structural_integrity;
use crate::matrix::{
    build_aspect_dependency_matrix, build_crosscutting_matrix, check_reference_integrity,
    RelationMatrix,
};
use crate::model::*;
use crate::themes::{
    extract_action_view, identify_crosscutting, ActionLexicon, DEFAULT_COOCCURRENCE_THRESHOLD,
};

/// File extension picked up when a directory is given as input.
pub const CORPUS_EXTENSION: &str = "valfar";

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub gates: GateConfig,
    pub decomposition: DecompositionConfig,
    /// Enables type classification, action-overlap linting and theme mining.
    pub lexicon: Option<ActionLexicon>,
    pub cooccurrence_threshold: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            gates: GateConfig::default(),
            decomposition: DecompositionConfig::default(),
            lexicon: None,
            cooccurrence_threshold: DEFAULT_COOCCURRENCE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Structure,
    ConcernHandling,
    ConcernValidation,
    AspectValidation,
    Traceability,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Ingest,
        Stage::Structure,
        Stage::ConcernHandling,
        Stage::ConcernValidation,
        Stage::AspectValidation,
        Stage::Traceability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Structure => "structure",
            Stage::ConcernHandling => "concern_handling",
            Stage::ConcernValidation => "concern_validation",
            Stage::AspectValidation => "aspect_validation",
            Stage::Traceability => "traceability",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Stage::Ingest => "Ingest",
            Stage::Structure => "Structure",
            Stage::ConcernHandling => "Phase 1: concern handling",
            Stage::ConcernValidation => "Phase 2: concern validation",
            Stage::AspectValidation => "Phase 3: aspect validation",
            Stage::Traceability => "Matrices and traceability",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub concerns: usize,
    pub nf_descriptions: usize,
    pub aspects: usize,
    pub checklists: usize,
    pub requirements: usize,
    pub stakeholders: usize,
}

impl CorpusSummary {
    pub fn of(corpus: &Corpus) -> Self {
        CorpusSummary {
            concerns: corpus.concerns.len(),
            nf_descriptions: corpus.nf_descriptions.len(),
            aspects: corpus.aspects.len(),
            checklists: corpus.checklists.len(),
            requirements: corpus.requirements.len(),
            stakeholders: corpus.stakeholders.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageDiagnostics {
    pub stage: Stage,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateRecord {
    pub stage: Stage,
    pub kind: ChecklistKind,
    /// Name of the evaluated entity, or its id when it has none.
    pub label: String,
    pub result: GateResult,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThemeSummary {
    pub threshold: usize,
    pub crosscutting: Vec<String>,
    pub base: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub summary: CorpusSummary,
    pub stages: Vec<StageDiagnostics>,
    pub gates: Vec<GateRecord>,
    pub crosscutting: Option<RelationMatrix>,
    pub dependencies: Option<RelationMatrix>,
    pub themes: Option<ThemeSummary>,
}

impl Report {
    pub fn diagnostics(&self) -> impl Iterator<Item = &Diagnostic> {
        self.stages.iter().flat_map(|s| s.diagnostics.iter())
    }

    pub fn error_count(&self) -> usize {
        self.diagnostics()
            .filter(|d| d.severity == Severity::Error)
            .count()
    }

    pub fn warning_count(&self) -> usize {
        self.diagnostics()
            .filter(|d| d.severity == Severity::Warning)
            .count()
    }

    pub fn all_gates_pass(&self) -> bool {
        self.gates.iter().all(|g| g.result.verdict == Verdict::Pass)
    }

    /// 0 when clean, 1 when any Error diagnostic or non-passing gate.
    pub fn exit_code(&self) -> i32 {
        if self.error_count() == 0 && self.all_gates_pass() {
            0
        } else {
            1
        }
    }

    /// Strict mode: every Warning becomes an Error.
    pub fn promote_warnings(&mut self) {
        for s in &mut self.stages {
            for d in &mut s.diagnostics {
                if d.severity == Severity::Warning {
                    d.severity = Severity::Error;
                }
            }
        }
    }
}

/// Expands directories to their `*.valfar` files (sorted) and keeps explicit
/// files as given.
pub fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, PipelineError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|e| io_err(p, e))?;
            let mut files = Vec::new();
            for entry in entries {
                let path = entry.map_err(|e| io_err(p, e))?.path();
                if path.is_file() && path.extension().is_some_and(|x| x == CORPUS_EXTENSION) {
                    files.push(path);
                }
            }
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn io_err(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads and merges corpus files.
pub fn load_corpus(paths: &[PathBuf]) -> Result<Ingested, PipelineError> {
    if paths.is_empty() {
        return Err(PipelineError::NoInput);
    }
    let files = collect_inputs(paths)?;
    let mut texts = Vec::with_capacity(files.len());
    for f in &files {
        let text = fs::read_to_string(f).map_err(|e| io_err(f, e))?;
        texts.push((f.display().to_string(), text));
    }
    let sources: Vec<Source<'_>> = texts.iter().map(|(n, t)| Source::new(n, t)).collect();
    Ok(parse_corpus(&sources)?)
}

pub fn run_pipeline(paths: &[PathBuf], options: &PipelineOptions) -> Result<Report, PipelineError> {
    let ingested = load_corpus(paths)?;
    Ok(run_on_corpus(&ingested, options))
}

/// Stage collector that drops diagnostics already reported by an earlier
/// stage, so each finding appears once.
struct Collector {
    seen: HashSet<Diagnostic>,
    stages: Vec<StageDiagnostics>,
}

impl Collector {
    fn push(&mut self, stage: Stage, diags: Vec<Diagnostic>) {
        let fresh: Vec<Diagnostic> = diags
            .into_iter()
            .filter(|d| self.seen.insert(d.clone()))
            .collect();
        match self.stages.iter_mut().find(|s| s.stage == stage) {
            Some(s) => s.diagnostics.extend(fresh),
            None => self.stages.push(StageDiagnostics {
                stage,
                diagnostics: fresh,
            }),
        }
    }
}

fn gate_for_missing(target: &str, kind: ChecklistKind, review_count: u32) -> GateResult {
    GateResult {
        target_id: target.to_string(),
        verdict: Verdict::Incomplete,
        failing_questions: kind.questions().to_vec(),
        review_count,
    }
}

/// Runs every stage over an already parsed corpus. Later stages run even
/// when earlier ones report errors.
pub fn run_on_corpus(ingested: &Ingested, options: &PipelineOptions) -> Report {
    let corpus = &ingested.corpus;
    let mut col = Collector {
        seen: HashSet::new(),
        stages: Vec::new(),
    };
    let mut gates = Vec::new();

    col.push(Stage::Ingest, ingested.warnings.clone());
    col.push(Stage::Structure, check_structural_integrity(corpus));

    let mut phase1 = Vec::new();
    for c in &corpus.concerns {
        if let Some(lex) = &options.lexicon {
            phase1.extend(classify_concern_type(c, lex));
        }
        phase1.extend(lint_decomposition(
            c,
            corpus,
            &options.decomposition,
            options.lexicon.as_ref(),
        ));
        phase1.extend(validate_concern_description(c, corpus));
    }
    col.push(Stage::ConcernHandling, phase1);

    let mut phase2 = Vec::new();
    for nf in &corpus.nf_descriptions {
        phase2.extend(validate_nf_description(nf, corpus));
        if let Some(lex) = &options.lexicon {
            phase2.extend(classify_nf_description(nf, lex));
        }
    }
    for ch in corpus
        .checklists
        .iter()
        .filter(|c| c.kind == ChecklistKind::ConcernEvaluation)
    {
        if corpus.resolve_concern_ref(&ch.target_id).is_none() {
            continue;
        }
        if let Ok(result) = evaluate_concern_checklist(ch, &options.gates) {
            gates.push(GateRecord {
                stage: Stage::ConcernValidation,
                kind: ch.kind,
                label: corpus.target_label(ch),
                result,
            });
        }
    }
    for nf in &corpus.nf_descriptions {
        let evaluated = corpus.checklists.iter().any(|ch| {
            ch.kind == ChecklistKind::ConcernEvaluation
                && matches!(corpus.resolve_concern_ref(&ch.target_id),
                    Some(ConcernRef::NonFunctional(n)) if ids_equal(&n.id, &nf.id))
        });
        if !evaluated {
            gates.push(GateRecord {
                stage: Stage::ConcernValidation,
                kind: ChecklistKind::ConcernEvaluation,
                label: if nf.name.is_empty() {
                    nf.id.clone()
                } else {
                    nf.name.clone()
                },
                result: gate_for_missing(&nf.id, ChecklistKind::ConcernEvaluation, nf.review_count),
            });
        }
    }
    phase2.extend(check_review_tracking(corpus));
    col.push(Stage::ConcernValidation, phase2);

    let mut phase3 = Vec::new();
    for a in &corpus.aspects {
        phase3.extend(validate_aspect_document(a, corpus));
        let label = if a.name.is_empty() {
            a.id.clone()
        } else {
            a.name.clone()
        };
        let checklist = corpus.checklists.iter().find(|ch| {
            ch.kind == ChecklistKind::AspectValidation
                && corpus
                    .aspect(&ch.target_id)
                    .is_some_and(|t| ids_equal(&t.id, &a.id))
        });
        let result = match checklist.map(|ch| evaluate_aspect_checklist(ch, &options.gates, a)) {
            Some(Ok(r)) => r,
            _ => {
                let nf_reviews = corpus
                    .nf_descriptions
                    .iter()
                    .find(|n| ids_equal(&n.id, &a.id))
                    .map_or(0, |n| n.review_count);
                gate_for_missing(&a.id, ChecklistKind::AspectValidation, nf_reviews)
            }
        };
        gates.push(GateRecord {
            stage: Stage::AspectValidation,
            kind: ChecklistKind::AspectValidation,
            label,
            result,
        });
    }
    col.push(Stage::AspectValidation, phase3);

    col.push(Stage::Traceability, check_reference_integrity(corpus));

    let themes = options.lexicon.as_ref().and_then(|lex| {
        if corpus.requirements.is_empty() {
            return None;
        }
        let view = extract_action_view(&corpus.requirements, lex).ok()?;
        let view = identify_crosscutting(&view, options.cooccurrence_threshold);
        Some(ThemeSummary {
            threshold: options.cooccurrence_threshold,
            crosscutting: view
                .crosscutting_actions()
                .into_iter()
                .map(String::from)
                .collect(),
            base: view.base_actions().into_iter().map(String::from).collect(),
        })
    });

    Report {
        summary: CorpusSummary::of(corpus),
        stages: col.stages,
        gates,
        crosscutting: Some(build_crosscutting_matrix(corpus)),
        dependencies: build_aspect_dependency_matrix(corpus).ok(),
        themes,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

impl FromStr for ReportFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "json" => Ok(ReportFormat::Json),
            other => Err(UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Text => "text",
            ReportFormat::Json => "json",
        })
    }
}

pub fn render_report(report: &Report, format: &str) -> Result<String, UnknownFormat> {
    Ok(match format.parse::<ReportFormat>()? {
        ReportFormat::Text => render_text(report),
        ReportFormat::Json => render_json(report),
    })
}

pub fn gate_line(g: &GateRecord) -> String {
    let r = &g.result;
    let mut line = format!("{}: {} (review {})", g.label, r.verdict, r.review_count);
    if !r.failing_questions.is_empty() {
        let qs: Vec<&str> = r.failing_questions.iter().map(|q| q.as_str()).collect();
        let what = if r.verdict == Verdict::Incomplete {
            "unanswered"
        } else {
            "failing"
        };
        let _ = write!(line, " {what}: {}", qs.join(", "));
    }
    line
}

fn render_text(report: &Report) -> String {
    let mut out = String::from("valfar validation report\n");
    let s = &report.summary;
    if report.stages.is_empty() && report.gates.is_empty() {
        out.push('\n');
    } else {
        let _ = writeln!(
            out,
            "corpus: {} concerns, {} non-functional descriptions, {} aspects, {} checklists, {} requirements, {} stakeholders\n",
            s.concerns, s.nf_descriptions, s.aspects, s.checklists, s.requirements, s.stakeholders
        );
    }
    for stage in Stage::ALL {
        let diags: Vec<&Diagnostic> = report
            .stages
            .iter()
            .filter(|sd| sd.stage == stage)
            .flat_map(|sd| &sd.diagnostics)
            .collect();
        let gates: Vec<&GateRecord> = report.gates.iter().filter(|g| g.stage == stage).collect();
        let present = report.stages.iter().any(|sd| sd.stage == stage) || !gates.is_empty();
        if !present {
            continue;
        }
        let _ = writeln!(out, "== {} ==", stage.title());
        for d in &diags {
            let _ = writeln!(out, "{d}");
        }
        for g in &gates {
            out.push_str(&gate_line(g));
            out.push('\n');
        }
        if diags.is_empty() && gates.is_empty() {
            out.push_str("no findings\n");
        }
        if stage == Stage::Traceability {
            if let Some(m) = &report.crosscutting {
                out.push_str("crosscutting matrix:\n");
                out.push_str(&m.render_text());
            }
            if let Some(m) = &report.dependencies {
                out.push_str("aspect dependency matrix:\n");
                out.push_str(&m.render_text());
            }
        }
        out.push('\n');
    }
    if let Some(t) = &report.themes {
        let _ = writeln!(out, "== Themes (k = {}) ==", t.threshold);
        let _ = writeln!(out, "crosscutting: {}", t.crosscutting.join(", "));
        let _ = writeln!(out, "base: {}\n", t.base.join(", "));
    }
    let _ = writeln!(
        out,
        "{} errors, {} warnings",
        report.error_count(),
        report.warning_count()
    );
    out
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record<'a> {
    Diagnostic {
        stage: Stage,
        code: &'static str,
        severity: Severity,
        target: &'a str,
        message: &'a str,
    },
    Gate {
        stage: Stage,
        kind: &'static str,
        target: &'a str,
        label: &'a str,
        verdict: String,
        failing_questions: Vec<&'static str>,
        review_count: u32,
    },
}

/// One JSON object per line: every diagnostic, then every gate result.
fn render_json(report: &Report) -> String {
    let mut out = String::new();
    for sd in &report.stages {
        for d in &sd.diagnostics {
            let rec = Record::Diagnostic {
                stage: sd.stage,
                code: d.code.as_str(),
                severity: d.severity,
                target: &d.target,
                message: &d.message,
            };
            out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
            out.push('\n');
        }
    }
    for g in &report.gates {
        let rec = Record::Gate {
            stage: g.stage,
            kind: g.kind.as_str(),
            target: &g.result.target_id,
            label: &g.label,
            verdict: g.result.verdict.to_string(),
            failing_questions: g
                .result
                .failing_questions
                .iter()
                .map(|q| q.as_str())
                .collect(),
            review_count: g.result.review_count,
        };
        out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        out.push('\n');
    }
    out
}
