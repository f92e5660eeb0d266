//! Crosscutting and aspect-dependency matrices, plus the reference and
//! stakeholder traceability checks that accompany them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::error::MatrixError;
use crate::integrity::unresolved_references;
use crate::model::*;
use crate::themes::ActionView;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RelationMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// `cells[row][col]`
    pub cells: Vec<Vec<bool>>,
}

impl RelationMatrix {
    fn empty(row_labels: Vec<String>, col_labels: Vec<String>) -> Self {
        let cells = vec![vec![false; col_labels.len()]; row_labels.len()];
        RelationMatrix {
            row_labels,
            col_labels,
            cells,
        }
    }

    pub fn get(&self, row: &str, col: &str) -> Option<bool> {
        let r = self.row_labels.iter().position(|l| l == row)?;
        let c = self.col_labels.iter().position(|l| l == col)?;
        Some(self.cells[r][c])
    }

    pub fn row(&self, label: &str) -> Option<Vec<&str>> {
        let r = self.row_labels.iter().position(|l| l == label)?;
        Some(
            self.col_labels
                .iter()
                .zip(&self.cells[r])
                .filter(|(_, &v)| v)
                .map(|(l, _)| l.as_str())
                .collect(),
        )
    }

    pub fn true_count(&self) -> usize {
        self.cells.iter().flatten().filter(|v| **v).count()
    }

    /// Column pairs that share a row: for the crosscutting matrix, the
    /// concern-to-concern relation induced by a common crosscutting entity.
    pub fn induced_column_relation(&self) -> BTreeSet<(usize, usize)> {
        let mut rel = BTreeSet::new();
        for row in &self.cells {
            let set: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, v)| **v)
                .map(|(i, _)| i)
                .collect();
            for &a in &set {
                for &b in &set {
                    if a != b {
                        rel.insert((a, b));
                    }
                }
            }
        }
        rel
    }

    /// Aligned grid, `X` for related and `.` otherwise.
    pub fn render_text(&self) -> String {
        if self.row_labels.is_empty() && self.col_labels.is_empty() {
            return "(empty)\n".to_string();
        }
        let label_width = self
            .row_labels
            .iter()
            .map(|l| l.chars().count())
            .max()
            .unwrap_or(0);
        let widths: Vec<usize> = self
            .col_labels
            .iter()
            .map(|l| l.chars().count().max(1))
            .collect();
        let mut out = String::new();
        let mut header = format!("{:label_width$}", "");
        for (l, w) in self.col_labels.iter().zip(&widths) {
            let _ = write!(header, "  {l:w$}");
        }
        out.push_str(header.trim_end());
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let mut line = format!("{label:label_width$}");
            for (v, w) in row.iter().zip(&widths) {
                let _ = write!(line, "  {:w$}", if *v { "X" } else { "." });
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    /// CSV with a header row of column labels; cells are `1` or `0`.
    pub fn render_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .flexible(false)
            .from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.col_labels.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|v| if *v { "1" } else { "0" }.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }
}

fn sort_labels(labels: &mut [String]) {
    labels.sort_by(|a, b| {
        a.to_lowercase()
            .cmp(&b.to_lowercase())
            .then_with(|| a.cmp(b))
    });
}

fn label_of(name: &str, id: &str) -> String {
    if name.trim().is_empty() {
        id.to_string()
    } else {
        name.to_string()
    }
}

fn functional_columns(corpus: &Corpus) -> Vec<String> {
    let mut cols: Vec<String> = corpus
        .functional_concerns()
        .map(|c| c.name.clone())
        .collect();
    sort_labels(&mut cols);
    cols.dedup_by(|a, b| names_equal(a, b));
    cols
}

/// Rows are non-functional concerns and aspects (merged by name), columns
/// are functional concerns. A cell is set when the row entity declares that
/// concern as related or crosscut; `ALL` expands to every functional concern.
pub fn build_crosscutting_matrix(corpus: &Corpus) -> RelationMatrix {
    let mut rows: BTreeMap<String, (String, BTreeSet<String>)> = BTreeMap::new();
    let mut add = |label: String, refs: Vec<String>| {
        let entry = rows
            .entry(name_key(&label))
            .or_insert_with(|| (label, BTreeSet::new()));
        for r in refs {
            if let Some(ConcernRef::Concern(c)) = corpus.resolve_concern_ref(&r) {
                if c.ctype == ConcernType::Functional {
                    entry.1.insert(name_key(&c.name));
                }
            }
        }
    };
    for n in &corpus.nf_descriptions {
        add(label_of(&n.name, &n.id), n.related_concerns.clone());
    }
    for a in &corpus.aspects {
        add(label_of(&a.name, &a.id), corpus.expand_aspect_concerns(a));
    }

    let cols = functional_columns(corpus);
    let mut row_labels: Vec<String> = rows.values().map(|(l, _)| l.clone()).collect();
    sort_labels(&mut row_labels);
    let mut m = RelationMatrix::empty(row_labels, cols);
    for (ri, label) in m.row_labels.iter().enumerate() {
        let related = &rows[&name_key(label)].1;
        for (ci, col) in m.col_labels.iter().enumerate() {
            m.cells[ri][ci] = related.contains(&name_key(col));
        }
    }
    m
}

/// Square matrix over aspects; `(A, B)` is set when A depends on B.
pub fn build_aspect_dependency_matrix(corpus: &Corpus) -> Result<RelationMatrix, MatrixError> {
    for a in &corpus.aspects {
        if a.depends_on.iter().any(|d| {
            ids_equal(d, &a.id) || corpus.aspect(d).is_some_and(|t| ids_equal(&t.id, &a.id))
        }) {
            return Err(MatrixError::SelfDependency(a.id.clone()));
        }
    }
    let mut aspects: Vec<&AspectDocument> = corpus.aspects.iter().collect();
    aspects.sort_by(|a, b| {
        let (la, lb) = (label_of(&a.name, &a.id), label_of(&b.name, &b.id));
        la.to_lowercase()
            .cmp(&lb.to_lowercase())
            .then_with(|| la.cmp(&lb))
    });
    let labels: Vec<String> = aspects.iter().map(|a| label_of(&a.name, &a.id)).collect();
    let mut m = RelationMatrix::empty(labels.clone(), labels);
    for (ri, a) in aspects.iter().enumerate() {
        for d in &a.depends_on {
            if let Some(target) = corpus.aspect(d) {
                if let Some(ci) = aspects.iter().position(|b| ids_equal(&b.id, &target.id)) {
                    m.cells[ri][ci] = true;
                }
            }
        }
    }
    Ok(m)
}

/// Crosscutting actions found by the theme miner against the functional
/// concerns owning the requirements they appear in. Used to compare mined
/// themes with the declared crosscutting matrix.
pub fn build_theme_matrix(corpus: &Corpus, view: &ActionView) -> RelationMatrix {
    let cols = functional_columns(corpus);
    let rows: Vec<String> = view
        .crosscutting_actions()
        .into_iter()
        .map(str::to_string)
        .collect();
    let mut m = RelationMatrix::empty(rows, cols);
    for (ri, action) in m.row_labels.clone().iter().enumerate() {
        let Some(ai) = view.action_index(action) else {
            continue;
        };
        for req_idx in view.requirements_of(ai) {
            let req_id = &view.requirements[req_idx];
            let owner = corpus
                .requirements
                .iter()
                .find(|r| &r.id == req_id)
                .and_then(|r| r.concern.as_deref())
                .and_then(|c| corpus.concern(c))
                .filter(|c| c.ctype == ConcernType::Functional);
            if let Some(owner) = owner {
                if let Some(ci) = m
                    .col_labels
                    .iter()
                    .position(|l| names_equal(l, &owner.name))
                {
                    m.cells[ri][ci] = true;
                }
            }
        }
    }
    m
}

/// Dangling links plus top-level concerns with no stakeholder. Sub-concerns
/// inherit their parent's stakeholders; reference strings are opaque.
pub fn check_reference_integrity(corpus: &Corpus) -> Vec<Diagnostic> {
    let mut out = unresolved_references(corpus);
    for c in &corpus.concerns {
        if c.parent.is_none() && c.stakeholders.is_empty() {
            out.push(Diagnostic::warning(
                Code::NoStakeholder,
                &c.id,
                "top-level concern is linked to no stakeholder",
            ));
        }
    }
    sort_diagnostics(&mut out);
    out
}
