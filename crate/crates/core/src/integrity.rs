//! Corpus-wide structural checks: identifier and name uniqueness, resolvable
//! cross references and an acyclic decomposition tree.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::model::{name_key, normalize_id, ChecklistKind, Corpus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EntityKind {
    Concern,
    NonFunctional,
    Aspect,
}

impl EntityKind {
    fn as_str(self) -> &'static str {
        match self {
            EntityKind::Concern => "concern",
            EntityKind::NonFunctional => "nonfunctional",
            EntityKind::Aspect => "aspect",
        }
    }
}

/// Runs every structural check and returns the violations, sorted by target
/// then code. An empty list means the corpus is structurally sound.
pub fn check_structural_integrity(corpus: &Corpus) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    duplicate_ids(corpus, &mut out);
    duplicate_names(corpus, &mut out);
    bad_names(corpus, &mut out);
    out.extend(unresolved_references(corpus));
    parent_cycles(corpus, &mut out);
    self_dependencies(corpus, &mut out);
    checklist_shape(corpus, &mut out);
    sort_diagnostics(&mut out);
    out
}

pub fn has_structural_errors(corpus: &Corpus) -> bool {
    check_structural_integrity(corpus)
        .iter()
        .any(Diagnostic::is_error)
}

fn duplicate_ids(corpus: &Corpus, out: &mut Vec<Diagnostic>) {
    let mut shared: BTreeMap<String, Vec<(EntityKind, &str)>> = BTreeMap::new();
    for c in &corpus.concerns {
        shared
            .entry(normalize_id(&c.id))
            .or_default()
            .push((EntityKind::Concern, &c.id));
    }
    for n in &corpus.nf_descriptions {
        shared
            .entry(normalize_id(&n.id))
            .or_default()
            .push((EntityKind::NonFunctional, &n.id));
    }
    for a in &corpus.aspects {
        shared
            .entry(normalize_id(&a.id))
            .or_default()
            .push((EntityKind::Aspect, &a.id));
    }
    for entries in shared.values() {
        if entries.len() < 2 {
            continue;
        }
        // A non-functional description and the aspect document elaborating
        // it may carry the same identifier.
        let mut kinds: Vec<_> = entries.iter().map(|(k, _)| *k).collect();
        kinds.sort();
        if kinds == [EntityKind::NonFunctional, EntityKind::Aspect] {
            continue;
        }
        let listed: Vec<String> = entries
            .iter()
            .map(|(k, id)| format!("{} {id}", k.as_str()))
            .collect();
        out.push(Diagnostic::error(
            Code::DupId,
            entries[1].1,
            format!(
                "identifier used by {} entities: {}",
                entries.len(),
                listed.join(", ")
            ),
        ));
    }

    let mut own_namespace = |label: &str, ids: Vec<&str>| {
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for id in ids {
            let n = seen.entry(normalize_id(id)).or_insert(0);
            *n += 1;
            if *n == 2 {
                out.push(Diagnostic::error(
                    Code::DupId,
                    id,
                    format!("{label} identifier `{id}` is not unique"),
                ));
            }
        }
    };
    own_namespace(
        "requirement",
        corpus.requirements.iter().map(|r| r.id.as_str()).collect(),
    );
    own_namespace(
        "stakeholder",
        corpus.stakeholders.iter().map(|s| s.id.as_str()).collect(),
    );
}

fn duplicate_names(corpus: &Corpus, out: &mut Vec<Diagnostic>) {
    let mut check = |label: &str, items: Vec<(&str, &str)>| {
        let mut first: BTreeMap<String, &str> = BTreeMap::new();
        for (id, name) in items {
            if name.trim().is_empty() {
                continue;
            }
            match first.get(&name_key(name)) {
                Some(prev) => out.push(Diagnostic::error(
                    Code::DupName,
                    id,
                    format!("{label} name `{name}` is already used by {prev}"),
                )),
                None => {
                    first.insert(name_key(name), id);
                }
            }
        }
    };
    check(
        "concern",
        corpus
            .concerns
            .iter()
            .map(|c| (c.id.as_str(), c.name.as_str()))
            .collect(),
    );
    check(
        "non-functional concern",
        corpus
            .nf_descriptions
            .iter()
            .map(|n| (n.id.as_str(), n.name.as_str()))
            .collect(),
    );
    check(
        "aspect",
        corpus
            .aspects
            .iter()
            .map(|a| (a.id.as_str(), a.name.as_str()))
            .collect(),
    );
}

fn bad_names(corpus: &Corpus, out: &mut Vec<Diagnostic>) {
    let names = corpus
        .concerns
        .iter()
        .map(|c| (&c.id, &c.name, true))
        .chain(
            corpus
                .nf_descriptions
                .iter()
                .map(|n| (&n.id, &n.name, false)),
        )
        .chain(corpus.aspects.iter().map(|a| (&a.id, &a.name, false)))
        .chain(corpus.stakeholders.iter().map(|s| (&s.id, &s.name, true)));
    for (id, name, required) in names {
        if name.contains(['\n', '\r']) {
            out.push(Diagnostic::error(
                Code::BadName,
                id,
                "name contains a line break",
            ));
        } else if required && name.trim().is_empty() {
            out.push(Diagnostic::error(Code::BadName, id, "name is empty"));
        }
    }
}

/// Every cross-entity reference that does not resolve. Shared with the
/// traceability checks.
pub fn unresolved_references(corpus: &Corpus) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut dangling = |source: &str, what: &str, reference: &str| {
        out.push(Diagnostic::error(
            Code::RefUnresolved,
            source,
            format!("{what} `{reference}` does not resolve"),
        ));
    };

    for c in &corpus.concerns {
        if let Some(p) = &c.parent {
            if corpus.concern(p).is_none() {
                dangling(&c.id, "parent concern", p);
            }
        }
        for s in &c.stakeholders {
            if corpus.stakeholder(s).is_none() {
                dangling(&c.id, "stakeholder", s);
            }
        }
    }
    for n in &corpus.nf_descriptions {
        for r in &n.related_concerns {
            if corpus.resolve_concern_ref(r).is_none() {
                dangling(&n.id, "related concern", r);
            }
        }
    }
    for a in &corpus.aspects {
        if let crate::model::AspectConcerns::List(list) = &a.concerns {
            for r in list {
                if corpus.resolve_concern_ref(r).is_none() {
                    dangling(&a.id, "crosscut concern", r);
                }
            }
        }
        for d in &a.depends_on {
            if corpus.aspect(d).is_none() {
                dangling(&a.id, "aspect dependency", d);
            }
        }
    }
    for ch in &corpus.checklists {
        let ok = match ch.kind {
            ChecklistKind::ConcernEvaluation => corpus.resolve_concern_ref(&ch.target_id).is_some(),
            ChecklistKind::AspectValidation => corpus.aspect(&ch.target_id).is_some(),
        };
        if !ok {
            dangling(
                &ch.target_id,
                &format!("{} checklist target", ch.kind.as_str()),
                &ch.target_id,
            );
        }
    }
    for r in &corpus.requirements {
        if let Some(c) = &r.concern {
            if corpus.concern(c).is_none() {
                dangling(&r.id, "owning concern", c);
            }
        }
    }
    out
}

fn parent_cycles(corpus: &Corpus, out: &mut Vec<Diagnostic>) {
    let mut reported: BTreeSet<Vec<String>> = BTreeSet::new();
    for start in &corpus.concerns {
        // Walk the parent chain; a revisited node means a cycle.
        let mut path: Vec<String> = vec![normalize_id(&start.id)];
        let mut raw: Vec<&str> = vec![&start.id];
        let mut current = start;
        while let Some(p) = current.parent.as_deref().and_then(|p| corpus.concern(p)) {
            let key = normalize_id(&p.id);
            if let Some(pos) = path.iter().position(|k| *k == key) {
                let mut members: Vec<String> = raw[pos..].iter().map(|s| s.to_string()).collect();
                members.sort_by_key(|m| normalize_id(m));
                if reported.insert(members.iter().map(|m| normalize_id(m)).collect()) {
                    out.push(Diagnostic::error(
                        Code::ParentCycle,
                        members[0].clone(),
                        format!("parent chain forms a cycle: {}", members.join(" -> ")),
                    ));
                }
                break;
            }
            path.push(key);
            raw.push(&p.id);
            current = p;
        }
    }
}

fn self_dependencies(corpus: &Corpus, out: &mut Vec<Diagnostic>) {
    for a in &corpus.aspects {
        if a.depends_on.iter().any(|d| {
            normalize_id(d) == normalize_id(&a.id)
                || (!a.name.is_empty() && name_key(d) == name_key(&a.name))
        }) {
            out.push(Diagnostic::error(
                Code::SelfDependency,
                &a.id,
                "aspect depends on itself",
            ));
        }
    }
}

fn checklist_shape(corpus: &Corpus, out: &mut Vec<Diagnostic>) {
    let mut seen = BTreeSet::new();
    for ch in &corpus.checklists {
        for q in ch.answers.keys() {
            if q.kind() != ch.kind {
                out.push(Diagnostic::error(
                    Code::BadQuestion,
                    &ch.target_id,
                    format!(
                        "question {q} does not belong to a {} checklist",
                        ch.kind.as_str()
                    ),
                ));
            }
        }
        if !seen.insert((normalize_id(&ch.target_id), ch.kind)) {
            out.push(Diagnostic::error(
                Code::DupChecklist,
                &ch.target_id,
                format!(
                    "more than one {} checklist for this target",
                    ch.kind.as_str()
                ),
            ));
        }
    }
}
