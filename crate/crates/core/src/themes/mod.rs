//! Lexical theme mining over raw requirements text.
//!
//! Requirements are scanned for lexicon actions to build an action view: an
//! incidence relation between actions and the requirements that mention
//! them. Actions that share requirements with several other actions are
//! marked crosscutting; the rest are base themes.

mod lexicon;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::MinerError;
use crate::model::RequirementItem;

pub use lexicon::{stem_candidates, tokenize, ActionLexicon};

pub const DEFAULT_COOCCURRENCE_THRESHOLD: usize = 2;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ActionView {
    /// Lexicon order.
    pub actions: Vec<String>,
    /// Requirement ids, sorted.
    pub requirements: Vec<String>,
    /// `(action index, requirement index)` pairs.
    pub incidence: BTreeSet<(usize, usize)>,
    /// Indices into `actions`.
    pub crosscutting: BTreeSet<usize>,
}

impl ActionView {
    pub fn action_index(&self, action: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == action)
    }

    pub fn requirements_of(&self, action: usize) -> impl Iterator<Item = usize> + '_ {
        self.incidence
            .iter()
            .filter(move |(a, _)| *a == action)
            .map(|(_, r)| *r)
    }

    /// Other actions that share at least one requirement with `action`.
    pub fn co_occurring(&self, action: usize) -> BTreeSet<usize> {
        let reqs: BTreeSet<usize> = self.requirements_of(action).collect();
        self.incidence
            .iter()
            .filter(|(a, r)| *a != action && reqs.contains(r))
            .map(|(a, _)| *a)
            .collect()
    }

    pub fn crosscutting_actions(&self) -> Vec<&str> {
        self.crosscutting
            .iter()
            .map(|&i| self.actions[i].as_str())
            .collect()
    }

    /// Base themes: every action not marked crosscutting.
    pub fn base_actions(&self) -> Vec<&str> {
        (0..self.actions.len())
            .filter(|i| !self.crosscutting.contains(i))
            .map(|i| self.actions[i].as_str())
            .collect()
    }
}

/// Builds the action view. Actions with no hits stay listed with an empty
/// incidence.
pub fn extract_action_view(
    requirements: &[RequirementItem],
    lexicon: &ActionLexicon,
) -> Result<ActionView, MinerError> {
    if lexicon.is_empty() {
        return Err(MinerError::EmptyLexicon);
    }
    let mut reqs: Vec<&RequirementItem> = requirements.iter().collect();
    reqs.sort_by(|a, b| a.id.cmp(&b.id));
    let mut incidence = BTreeSet::new();
    for (ri, req) in reqs.iter().enumerate() {
        for ai in lexicon.actions_in(&req.text) {
            incidence.insert((ai, ri));
        }
    }
    Ok(ActionView {
        actions: lexicon.entries().to_vec(),
        requirements: reqs.iter().map(|r| r.id.clone()).collect(),
        incidence,
        crosscutting: BTreeSet::new(),
    })
}

/// Marks an action crosscutting when it co-occurs with at least `k` distinct
/// other actions and appears in more than one requirement.
pub fn identify_crosscutting(view: &ActionView, k: usize) -> ActionView {
    let crosscutting = (0..view.actions.len())
        .filter(|&a| view.requirements_of(a).count() >= 2 && view.co_occurring(a).len() >= k)
        .collect();
    ActionView {
        crosscutting,
        ..view.clone()
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Renders the clipped action view as an undirected DOT graph.
pub fn emit_clipped_view(view: &ActionView) -> String {
    let mut out = String::from("graph clipped_action_view {\n");
    for (i, action) in view.actions.iter().enumerate() {
        let id = quote(&format!("action:{action}"));
        if view.crosscutting.contains(&i) {
            let _ = writeln!(
                out,
                "  {id} [shape=ellipse, label={}, class=\"crosscutting\", style=filled, fillcolor=\"#d0d0d0\"];",
                quote(action)
            );
        } else {
            let _ = writeln!(out, "  {id} [shape=ellipse, label={}];", quote(action));
        }
    }
    for req in &view.requirements {
        let _ = writeln!(
            out,
            "  {} [shape=box, label={}];",
            quote(&format!("req:{req}")),
            quote(req)
        );
    }
    for &(a, r) in &view.incidence {
        let _ = writeln!(
            out,
            "  {} -- {};",
            quote(&format!("action:{}", view.actions[a])),
            quote(&format!("req:{}", view.requirements[r]))
        );
    }
    out.push_str("}\n");
    out
}
