//! The corpus block format.
//!
//! ```text
//! # comment
//! [concern]
//! id = Con04
//! name = TollGate
//! type = functional
//! references = Figure 2, Figure 3
//! ```
//!
//! A header line opens a block, `key = value` lines fill it and a blank line
//! closes it. Values run to the end of the line; list-valued keys are comma
//! separated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::diagnostic::{Code, Diagnostic};
use crate::error::{ParseError, SerializeError};
use crate::ingest::date::parse_date;
use crate::ingest::Ingested;
use crate::integrity::check_structural_integrity;
use crate::model::*;

/// One named input document.
#[derive(Debug, Clone, Copy)]
pub struct Source<'a> {
    pub name: &'a str,
    pub text: &'a str,
}

impl<'a> Source<'a> {
    pub fn new(name: &'a str, text: &'a str) -> Self {
        Source { name, text }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BlockKind {
    Concern,
    NonFunctional,
    Aspect,
    Checklist,
    Requirement,
    Stakeholder,
}

impl BlockKind {
    fn from_header(h: &str) -> Option<Self> {
        Some(match h {
            "concern" => BlockKind::Concern,
            "nonfunctional" => BlockKind::NonFunctional,
            "aspect" => BlockKind::Aspect,
            "checklist" => BlockKind::Checklist,
            "requirement" => BlockKind::Requirement,
            "stakeholder" => BlockKind::Stakeholder,
            _ => return None,
        })
    }
}

struct Entry {
    value: String,
    line: usize,
}

struct RawBlock {
    kind: BlockKind,
    line: usize,
    entries: BTreeMap<String, Entry>,
}

/// Where an entity came from, for cross-document collision checks.
#[derive(Clone)]
struct Origin {
    namespace: &'static str,
    key: String,
    shared_kind: Option<BlockKind>,
    file: String,
    line: usize,
}

struct BlockReader<'a> {
    file: &'a str,
    block: RawBlock,
    warnings: &'a mut Vec<Diagnostic>,
}

impl<'a> BlockReader<'a> {
    fn err(&self, line: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.file, line, msg)
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.block.entries.remove(key)
    }

    fn text(&mut self, key: &str) -> Option<String> {
        self.take(key).map(|e| e.value)
    }

    fn required(&mut self, key: &str) -> Result<String, ParseError> {
        match self.take(key) {
            Some(e) if !e.value.is_empty() => Ok(e.value),
            Some(e) => Err(self.err(e.line, format!("key `{key}` has an empty value"))),
            None => Err(self.err(self.block.line, format!("missing mandatory key `{key}`"))),
        }
    }

    fn list(&mut self, key: &str) -> Vec<String> {
        self.take(key)
            .map(|e| split_list(&e.value))
            .unwrap_or_default()
    }

    fn parsed<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ParseError> {
        match self.take(key) {
            Some(e) => parse(&e.value)
                .map(Some)
                .map_err(|m| self.err(e.line, format!("{key}: {m}"))),
            None => Ok(None),
        }
    }

    fn review_count(&mut self) -> Result<u32, ParseError> {
        Ok(self
            .parsed("review_count", |v| {
                v.parse::<u32>().map_err(|_| {
                    format!("invalid review count `{v}` (expected a non-negative integer)")
                })
            })?
            .unwrap_or(0))
    }

    fn date(&mut self) -> Result<Option<chrono::NaiveDate>, ParseError> {
        self.parsed("revision_date", parse_date)
    }

    /// Warns about every key nobody consumed.
    fn finish(self) {
        for (key, e) in self.block.entries {
            self.warnings.push(Diagnostic::warning(
                Code::UnknownKey,
                format!("{}:{}", self.file, e.line),
                format!("unknown key `{key}` ignored"),
            ));
        }
    }
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn tokenize(file: &str, text: &str) -> Result<Vec<RawBlock>, ParseError> {
    let mut blocks = Vec::new();
    let mut current: Option<RawBlock> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            blocks.extend(current.take());
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            let kind = line
                .strip_prefix('[')
                .and_then(|l| l.strip_suffix(']'))
                .and_then(|h| BlockKind::from_header(h.trim()))
                .ok_or_else(|| {
                    ParseError::new(file, line_no, format!("malformed block header `{line}`"))
                })?;
            blocks.extend(current.take());
            current = Some(RawBlock {
                kind,
                line: line_no,
                entries: BTreeMap::new(),
            });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::new(
                file,
                line_no,
                format!("expected `key = value`, found `{line}`"),
            ));
        };
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(ParseError::new(file, line_no, "empty key"));
        }
        let Some(block) = current.as_mut() else {
            return Err(ParseError::new(
                file,
                line_no,
                format!("key `{key}` outside of a block"),
            ));
        };
        if block.entries.contains_key(&key) {
            return Err(ParseError::new(
                file,
                line_no,
                format!("duplicate key `{key}` in block"),
            ));
        }
        block.entries.insert(
            key,
            Entry {
                value: value.trim().to_string(),
                line: line_no,
            },
        );
    }
    blocks.extend(current);
    Ok(blocks)
}

fn parse_document(
    source: Source<'_>,
    corpus: &mut Corpus,
    origins: &mut Vec<Origin>,
    warnings: &mut Vec<Diagnostic>,
) -> Result<(), ParseError> {
    let file = source.name;
    for block in tokenize(file, source.text)? {
        let kind = block.kind;
        let header_line = block.line;
        let mut r = BlockReader {
            file,
            block,
            warnings,
        };
        let origin = |namespace: &'static str, key: String, shared: bool| Origin {
            namespace,
            key,
            shared_kind: shared.then_some(kind),
            file: file.to_string(),
            line: header_line,
        };
        match kind {
            BlockKind::Concern => {
                let id = r.required("id")?;
                let name = r.required("name")?;
                let ctype = r
                    .parsed("type", |v| v.parse::<ConcernType>())?
                    .ok_or_else(|| r.err(header_line, "missing mandatory key `type`"))?;
                let annotations: BTreeSet<String> = r.list("annotations").into_iter().collect();
                for a in &annotations {
                    if !KNOWN_ANNOTATIONS.contains(&a.as_str()) {
                        r.warnings.push(Diagnostic::warning(
                            Code::UnknownAnnotation,
                            format!("{file}:{header_line}"),
                            format!("annotation `{a}` is not used by any rule"),
                        ));
                    }
                }
                let concern = Concern {
                    objective: r.text("objective"),
                    successful_scenario: r.text("successful_scenario"),
                    alternative_scenario: r.text("alternative_scenario"),
                    revision_date: r.date()?,
                    review_count: r.review_count()?,
                    references: r.list("references"),
                    stakeholders: r.list("stakeholders"),
                    parent: r.text("parent").filter(|p| !p.is_empty()),
                    annotations,
                    ..Concern::new(id, name, ctype)
                };
                origins.push(origin("shared", normalize_id(&concern.id), true));
                corpus.concerns.push(concern);
            }
            BlockKind::NonFunctional => {
                let id = r.required("id")?;
                let nf = NfDescription {
                    name: r.text("name").unwrap_or_default(),
                    related_concerns: r.list("related_concerns"),
                    specification: r.text("specification"),
                    revision_date: r.date()?,
                    review_count: r.review_count()?,
                    references: r.list("references"),
                    ..NfDescription::new(id, "")
                };
                origins.push(origin("shared", normalize_id(&nf.id), true));
                corpus.nf_descriptions.push(nf);
            }
            BlockKind::Aspect => {
                let id = r.required("id")?;
                let concerns = match r.take("concerns") {
                    Some(e) if e.value == "ALL" => AspectConcerns::All,
                    Some(e) => AspectConcerns::List(split_list(&e.value)),
                    None => AspectConcerns::default(),
                };
                let aspect = AspectDocument {
                    name: r.text("name").unwrap_or_default(),
                    concerns,
                    description: r.text("description"),
                    priority: r.text("priority"),
                    precondition: r.text("precondition"),
                    postcondition: r.text("postcondition"),
                    depends_on: r.list("depends_on"),
                    references: r.list("references"),
                    ..AspectDocument::new(id, "")
                };
                origins.push(origin("shared", normalize_id(&aspect.id), true));
                corpus.aspects.push(aspect);
            }
            BlockKind::Checklist => {
                let target = r.required("target")?;
                let kind = r
                    .parsed("kind", |v| v.parse::<ChecklistKind>())?
                    .ok_or_else(|| r.err(header_line, "missing mandatory key `kind`"))?;
                let review_count = r.review_count()?;
                let mut answers = BTreeMap::new();
                let question_keys: Vec<String> = r
                    .block
                    .entries
                    .keys()
                    .filter(|k| k.parse::<Question>().is_ok())
                    .cloned()
                    .collect();
                for key in question_keys {
                    let entry = r.take(&key).expect("key listed above");
                    let q: Question = key.parse().expect("filtered above");
                    if q.kind() != kind {
                        return Err(r.err(
                            entry.line,
                            format!("question {q} is not part of a {} checklist", kind.as_str()),
                        ));
                    }
                    let a: Answer = entry
                        .value
                        .parse()
                        .map_err(|m: String| r.err(entry.line, format!("{q}: {m}")))?;
                    answers.insert(q, a);
                }
                origins.push(origin(
                    "checklist",
                    format!("{}/{}", normalize_id(&target), kind.as_str()),
                    false,
                ));
                corpus.checklists.push(ChecklistResponse {
                    target_id: target,
                    kind,
                    answers,
                    review_count,
                });
            }
            BlockKind::Requirement => {
                let id = r.required("id")?;
                let text = r.required("text")?;
                let concern = r.text("concern").filter(|c| !c.is_empty());
                origins.push(origin("requirement", normalize_id(&id), false));
                corpus
                    .requirements
                    .push(RequirementItem { id, text, concern });
            }
            BlockKind::Stakeholder => {
                let id = r.required("id")?;
                let name = r.required("name")?;
                let role = r.text("role");
                origins.push(origin("stakeholder", normalize_id(&id), false));
                corpus.stakeholders.push(Stakeholder { id, name, role });
            }
        }
        r.finish();
    }
    Ok(())
}

/// Rejects an identifier defined in more than one document. Collisions
/// within a single document are left to the structural integrity check.
fn check_merge(origins: &[Origin]) -> Result<(), ParseError> {
    let mut by_key: BTreeMap<(&str, &str), Vec<&Origin>> = BTreeMap::new();
    for o in origins {
        by_key.entry((o.namespace, &o.key)).or_default().push(o);
    }
    let mut first_error: Option<&Origin> = None;
    let mut first_prev: Option<&Origin> = None;
    for group in by_key.values() {
        let files: BTreeSet<&str> = group.iter().map(|o| o.file.as_str()).collect();
        if files.len() < 2 {
            continue;
        }
        if group.len() == 2 {
            let kinds: BTreeSet<_> = group
                .iter()
                .filter_map(|o| o.shared_kind.map(|k| k as u8))
                .collect();
            if kinds
                == [BlockKind::NonFunctional as u8, BlockKind::Aspect as u8]
                    .into_iter()
                    .collect()
            {
                continue;
            }
        }
        let prev = group[0];
        let offender = group
            .iter()
            .find(|o| o.file != prev.file)
            .expect("two files");
        if first_error.is_none_or(|e| (&offender.file, offender.line) < (&e.file, e.line)) {
            first_error = Some(offender);
            first_prev = Some(prev);
        }
    }
    match (first_error, first_prev) {
        (Some(o), Some(p)) => Err(ParseError::new(
            &o.file,
            o.line,
            format!(
                "identifier `{}` is already defined at {}:{}",
                o.key, p.file, p.line
            ),
        )),
        _ => Ok(()),
    }
}

/// Parses one or more documents into a single canonically ordered corpus.
/// Unknown keys become warnings; malformed input is a [`ParseError`].
pub fn parse_corpus(sources: &[Source<'_>]) -> Result<Ingested, ParseError> {
    let mut corpus = Corpus::new();
    let mut origins = Vec::new();
    let mut warnings = Vec::new();
    for source in sources {
        parse_document(*source, &mut corpus, &mut origins, &mut warnings)?;
    }
    check_merge(&origins)?;
    corpus.canonicalize();
    Ok(Ingested { corpus, warnings })
}

/// Convenience wrapper for a single in-memory document.
pub fn parse_str(name: &str, text: &str) -> Result<Ingested, ParseError> {
    parse_corpus(&[Source::new(name, text)])
}

struct Writer {
    out: String,
    entity: String,
}

impl Writer {
    fn check(&self, field: &'static str, value: &str) -> Result<(), SerializeError> {
        let reason = if value.contains(['\n', '\r']) {
            "contains a line break"
        } else if value.trim() != value {
            "has surrounding whitespace"
        } else {
            return Ok(());
        };
        Err(SerializeError::Unrepresentable {
            entity: self.entity.clone(),
            field,
            reason,
        })
    }

    fn header(&mut self, kind: &str, entity: &str) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        self.entity = entity.to_string();
        let _ = writeln!(self.out, "[{kind}]");
    }

    fn kv(&mut self, key: &'static str, value: &str) -> Result<(), SerializeError> {
        self.check(key, value)?;
        if value.is_empty() {
            let _ = writeln!(self.out, "{key} =");
        } else {
            let _ = writeln!(self.out, "{key} = {value}");
        }
        Ok(())
    }

    fn opt(&mut self, key: &'static str, value: &Option<String>) -> Result<(), SerializeError> {
        match value {
            Some(v) => self.kv(key, v),
            None => Ok(()),
        }
    }

    fn list<S: AsRef<str>>(
        &mut self,
        key: &'static str,
        items: &[S],
    ) -> Result<(), SerializeError> {
        if items.is_empty() {
            return Ok(());
        }
        for item in items {
            let item = item.as_ref();
            self.check(key, item)?;
            if item.is_empty() || item.contains(',') {
                return Err(SerializeError::Unrepresentable {
                    entity: self.entity.clone(),
                    field: key,
                    reason: "list item is empty or contains a comma",
                });
            }
        }
        let joined = items
            .iter()
            .map(AsRef::as_ref)
            .collect::<Vec<_>>()
            .join(", ");
        self.kv(key, &joined)
    }

    fn date(&mut self, value: &Option<chrono::NaiveDate>) -> Result<(), SerializeError> {
        if let Some(d) = value {
            self.kv("revision_date", &d.format("%Y-%m-%d").to_string())?;
        }
        Ok(())
    }

    fn required(&mut self, key: &'static str, value: &str) -> Result<(), SerializeError> {
        if value.is_empty() {
            return Err(SerializeError::Unrepresentable {
                entity: self.entity.clone(),
                field: key,
                reason: "mandatory value is empty",
            });
        }
        self.kv(key, value)
    }
}

/// Writes a corpus in the block format, one block per entity, grouped by
/// kind and sorted by identifier. Corpora with structural errors are refused.
pub fn serialize_corpus(corpus: &Corpus) -> Result<String, SerializeError> {
    let errors: Vec<String> = check_structural_integrity(corpus)
        .into_iter()
        .filter(|d| d.is_error())
        .map(|d| d.to_string())
        .collect();
    if !errors.is_empty() {
        return Err(SerializeError::Structural(errors.join("; ")));
    }
    let corpus = corpus.clone().canonical();
    let mut w = Writer {
        out: String::new(),
        entity: String::new(),
    };

    for c in &corpus.concerns {
        w.header("concern", &c.id);
        w.required("id", &c.id)?;
        w.required("name", &c.name)?;
        w.kv("type", c.ctype.as_str())?;
        w.opt("objective", &c.objective)?;
        w.opt("successful_scenario", &c.successful_scenario)?;
        w.opt("alternative_scenario", &c.alternative_scenario)?;
        w.date(&c.revision_date)?;
        w.kv("review_count", &c.review_count.to_string())?;
        w.list("references", &c.references)?;
        w.list("stakeholders", &c.stakeholders)?;
        w.opt("parent", &c.parent)?;
        let annotations: Vec<&String> = c.annotations.iter().collect();
        w.list("annotations", &annotations)?;
    }
    for n in &corpus.nf_descriptions {
        w.header("nonfunctional", &n.id);
        w.required("id", &n.id)?;
        w.kv("name", &n.name)?;
        w.list("related_concerns", &n.related_concerns)?;
        w.opt("specification", &n.specification)?;
        w.date(&n.revision_date)?;
        w.kv("review_count", &n.review_count.to_string())?;
        w.list("references", &n.references)?;
    }
    for a in &corpus.aspects {
        w.header("aspect", &a.id);
        w.required("id", &a.id)?;
        w.kv("name", &a.name)?;
        match &a.concerns {
            AspectConcerns::All => w.kv("concerns", "ALL")?,
            AspectConcerns::List(l) if l.len() == 1 && l[0] == "ALL" => {
                return Err(SerializeError::Unrepresentable {
                    entity: a.id.clone(),
                    field: "concerns",
                    reason: "a concern literally named ALL reads back as the sentinel",
                })
            }
            AspectConcerns::List(l) => w.list("concerns", l)?,
        }
        w.opt("description", &a.description)?;
        w.opt("priority", &a.priority)?;
        w.opt("precondition", &a.precondition)?;
        w.opt("postcondition", &a.postcondition)?;
        w.list("depends_on", &a.depends_on)?;
        w.list("references", &a.references)?;
    }
    for ch in &corpus.checklists {
        w.header("checklist", &ch.target_id);
        w.required("target", &ch.target_id)?;
        w.kv("kind", ch.kind.as_str())?;
        w.kv("review_count", &ch.review_count.to_string())?;
        for (q, a) in &ch.answers {
            let _ = writeln!(w.out, "{q} = {}", a.as_str());
        }
    }
    for r in &corpus.requirements {
        w.header("requirement", &r.id);
        w.required("id", &r.id)?;
        w.required("text", &r.text)?;
        w.opt("concern", &r.concern)?;
    }
    for s in &corpus.stakeholders {
        w.header("stakeholder", &s.id);
        w.required("id", &s.id)?;
        w.required("name", &s.name)?;
        w.opt("role", &s.role)?;
    }
    Ok(w.out)
}
