//! Phase 1: concern type determination, decomposition lints, decomposition
//! and description-template validation.

use std::collections::BTreeSet;

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::error::DecompositionError;
use crate::model::*;
use crate::themes::{tokenize, ActionLexicon};

pub const DEFAULT_MAX_DESC_WORDS: usize = 60;
pub const DEFAULT_OVERLAP_THRESHOLD: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleMode {
    /// Decided from the text by a threshold or a name scan.
    Automatic,
    /// Fires only when the analyst sets the named annotation flag.
    AnnotationDriven(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecompositionRule {
    pub code: Code,
    pub mode: RuleMode,
    pub summary: &'static str,
}

/// The eight decomposition rules, in order.
pub const RULES: [DecompositionRule; 8] = [
    DecompositionRule {
        code: Code::Dec01,
        mode: RuleMode::AnnotationDriven("limits_goal"),
        summary: "part of the concern restricts how a goal is reached",
    },
    DecompositionRule {
        code: Code::Dec02,
        mode: RuleMode::AnnotationDriven("design_constraint"),
        summary: "part of the concern implies a design constraint",
    },
    DecompositionRule {
        code: Code::Dec03,
        mode: RuleMode::AnnotationDriven("unused_parts"),
        summary: "part of the concern only describes the issue and is used by no other concern",
    },
    DecompositionRule {
        code: Code::Dec04,
        mode: RuleMode::Automatic,
        summary: "description is too long",
    },
    DecompositionRule {
        code: Code::Dec05,
        mode: RuleMode::Automatic,
        summary: "description refers to another concern",
    },
    DecompositionRule {
        code: Code::Dec06,
        mode: RuleMode::Automatic,
        summary: "description draws on several other concerns",
    },
    DecompositionRule {
        code: Code::Dec07,
        mode: RuleMode::AnnotationDriven("derive_new"),
        summary: "new concerns should be derived from this one",
    },
    DecompositionRule {
        code: Code::Dec08,
        mode: RuleMode::Automatic,
        summary: "parts of the concern overlap with another concern",
    },
];

pub fn rule(code: Code) -> Option<&'static DecompositionRule> {
    RULES.iter().find(|r| r.code == code)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecompositionConfig {
    pub max_desc_words: usize,
    pub overlap_threshold: usize,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig {
            max_desc_words: DEFAULT_MAX_DESC_WORDS,
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
        }
    }
}

fn sentences(text: &str) -> Vec<&str> {
    text.split(['.', '!', '?'])
        .filter(|s| s.chars().any(char::is_alphanumeric))
        .collect()
}

fn concern_text(c: &Concern) -> String {
    [
        &c.objective,
        &c.successful_scenario,
        &c.alternative_scenario,
    ]
    .into_iter()
    .flatten()
    .map(String::as_str)
    .collect::<Vec<_>>()
    .join(". ")
}

fn type_suspect_nf(target: &str, text: &str, lexicon: &ActionLexicon) -> Option<Diagnostic> {
    let sents = sentences(text);
    if sents.is_empty() {
        return None;
    }
    let with_action = sents.iter().filter(|s| lexicon.mentions_action(s)).count();
    (with_action * 2 >= sents.len()).then(|| {
        Diagnostic::warning(
            Code::TypeSuspect,
            target,
            format!(
                "declared non-functional but {with_action} of {} sentences name an action",
                sents.len()
            ),
        )
    })
}

/// Checks the declared concern type against the lexical signal: functional
/// concerns should name at least one action, non-functional ones should not
/// be dominated by actions. An empty lexicon gives no signal.
pub fn classify_concern_type(concern: &Concern, lexicon: &ActionLexicon) -> Vec<Diagnostic> {
    if lexicon.is_empty() {
        return Vec::new();
    }
    let text = concern_text(concern);
    match concern.ctype {
        ConcernType::Functional if !lexicon.mentions_action(&text) => vec![Diagnostic::warning(
            Code::TypeSuspect,
            &concern.id,
            "declared functional but objective and scenarios name no lexicon action",
        )],
        ConcernType::Functional => Vec::new(),
        ConcernType::NonFunctional => type_suspect_nf(&concern.id, &text, lexicon)
            .into_iter()
            .collect(),
    }
}

/// Same check for a non-functional description, over its specification.
pub fn classify_nf_description(nf: &NfDescription, lexicon: &ActionLexicon) -> Vec<Diagnostic> {
    if lexicon.is_empty() {
        return Vec::new();
    }
    nf.specification
        .as_deref()
        .and_then(|spec| type_suspect_nf(&nf.id, spec, lexicon))
        .into_iter()
        .collect()
}

pub fn word_count(text: &str) -> usize {
    text.split_whitespace()
        .filter(|w| w.chars().any(char::is_alphanumeric))
        .count()
}

/// Whole-word, case-insensitive mention of a (possibly multi-word) name.
pub fn mentions_name(text_tokens: &[String], name: &str) -> bool {
    let needle: Vec<String> = tokenize(name).collect();
    !needle.is_empty()
        && text_tokens
            .windows(needle.len())
            .any(|w| w == needle.as_slice())
}

fn fire(rule: &DecompositionRule, concern: &Concern, detail: String) -> Diagnostic {
    Diagnostic::warning(
        rule.code,
        &concern.id,
        format!("{}: {detail}", rule.summary),
    )
}

/// Runs the decomposition rules against one concern. Every finding is a
/// warning naming the rule that fired.
pub fn lint_decomposition(
    concern: &Concern,
    corpus: &Corpus,
    config: &DecompositionConfig,
    lexicon: Option<&ActionLexicon>,
) -> Vec<Diagnostic> {
    let description = concern.scenario_text();
    let tokens: Vec<String> = tokenize(&description).collect();
    let own = normalize_id(&concern.id);
    let others: Vec<&Concern> = corpus
        .concerns
        .iter()
        .filter(|c| normalize_id(&c.id) != own)
        .collect();

    let mut out = Vec::new();
    for rule in &RULES {
        match (rule.mode, rule.code) {
            (RuleMode::AnnotationDriven(flag), _) => {
                if concern.has_annotation(flag) {
                    out.push(fire(rule, concern, format!("annotated `{flag}`")));
                }
            }
            (_, Code::Dec04) => {
                let words = word_count(&description);
                if words > config.max_desc_words {
                    out.push(fire(
                        rule,
                        concern,
                        format!("{words} words, limit {}", config.max_desc_words),
                    ));
                }
            }
            (_, Code::Dec05) | (_, Code::Dec06) => {}
            (_, Code::Dec08) => {
                let Some(lex) = lexicon else { continue };
                let mine = lex.actions_in(&description);
                let threshold = config.overlap_threshold.max(1);
                let mut hits: Vec<String> = Vec::new();
                for other in &others {
                    let shared: BTreeSet<usize> = lex
                        .actions_in(&other.scenario_text())
                        .intersection(&mine)
                        .copied()
                        .collect();
                    if shared.len() >= threshold {
                        let verbs: Vec<&str> =
                            shared.iter().map(|&i| lex.entries()[i].as_str()).collect();
                        hits.push(format!("{} ({})", other.name, verbs.join(", ")));
                    }
                }
                if !hits.is_empty() {
                    out.push(fire(
                        rule,
                        concern,
                        format!("shares actions with {}", hits.join("; ")),
                    ));
                }
            }
            _ => unreachable!("every automatic rule is handled"),
        }
    }

    let mut mentioned: Vec<&str> = Vec::new();
    let mut seen = BTreeSet::new();
    for other in &others {
        if !names_equal(&other.name, &concern.name)
            && mentions_name(&tokens, &other.name)
            && seen.insert(name_key(&other.name))
        {
            mentioned.push(&other.name);
        }
    }
    match mentioned.len() {
        0 => {}
        1 => out.push(fire(
            &RULES[4],
            concern,
            format!("mentions {}", mentioned[0]),
        )),
        _ => out.push(fire(
            &RULES[5],
            concern,
            format!("mentions {}", mentioned.join(", ")),
        )),
    }
    sort_diagnostics(&mut out);
    out
}

pub fn delegation_note(name: &str) -> String {
    format!("See decomposition template for the {name} concern.")
}

/// True for a scenario that only points at the concern's sub-concerns.
pub fn is_delegation_note(text: &str) -> bool {
    let t = text.trim().to_lowercase();
    t.starts_with("see ") && (t.contains("decomposition") || t.contains("sub-concern"))
}

fn blank(v: &Option<String>) -> bool {
    v.as_deref().is_none_or(|s| s.trim().is_empty())
}

/// Checks a concern against the description template.
pub fn validate_concern_description(concern: &Concern, corpus: &Corpus) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let target = if concern.id.is_empty() {
        &concern.name
    } else {
        &concern.id
    };
    let missing = |field: &str| {
        Diagnostic::error(
            Code::MissingField,
            target.clone(),
            format!("`{field}` is missing"),
        )
    };
    if concern.id.trim().is_empty() {
        out.push(missing("id"));
    }
    if concern.name.trim().is_empty() {
        out.push(missing("name"));
    }
    if blank(&concern.objective) {
        out.push(missing("objective"));
    }
    let has_children = corpus.children_of(&concern.id).next().is_some();
    match concern.successful_scenario.as_deref() {
        _ if has_children => {}
        Some(s) if is_delegation_note(s) => out.push(Diagnostic::error(
            Code::MissingField,
            target.clone(),
            "`successful_scenario` defers to a decomposition but the concern has no sub-concerns",
        )),
        _ if blank(&concern.successful_scenario) => out.push(missing("successful_scenario")),
        _ => {}
    }
    if blank(&concern.alternative_scenario) {
        out.push(Diagnostic::warning(
            Code::EmptyAlt,
            target.clone(),
            "no alternative scenario",
        ));
    }
    sort_diagnostics(&mut out);
    out
}

/// Splits a concern into analyst-supplied sub-concerns. Children inherit the
/// parent's type and start unreviewed; the parent's review count goes up by
/// one and its scenario is replaced by a pointer to the decomposition.
pub fn apply_decomposition(
    corpus: &Corpus,
    parent: &str,
    children: &[(String, String)],
) -> Result<Corpus, DecompositionError> {
    if children.is_empty() {
        return Err(DecompositionError::EmptyDecomposition);
    }
    let parent_concern = corpus
        .concern(parent)
        .ok_or_else(|| DecompositionError::UnknownParent(parent.to_string()))?;
    let parent_id = parent_concern.id.clone();
    let ctype = parent_concern.ctype;

    let mut names: BTreeSet<String> = corpus.concerns.iter().map(|c| name_key(&c.name)).collect();
    for (name, _) in children {
        if !names.insert(name_key(name)) {
            return Err(DecompositionError::DupName(name.clone()));
        }
    }

    let mut taken: BTreeSet<String> = corpus
        .concerns
        .iter()
        .map(|c| normalize_id(&c.id))
        .chain(corpus.nf_descriptions.iter().map(|n| normalize_id(&n.id)))
        .chain(corpus.aspects.iter().map(|a| normalize_id(&a.id)))
        .collect();
    let mut next = 1usize;
    let mut out = corpus.clone();
    for (name, description) in children {
        let id = loop {
            let candidate = format!("{parent_id}_{next}");
            next += 1;
            if taken.insert(normalize_id(&candidate)) {
                break candidate;
            }
        };
        let text = Some(description.trim().to_string()).filter(|d| !d.is_empty());
        out.concerns.push(Concern {
            objective: text.clone(),
            successful_scenario: text,
            parent: Some(parent_id.clone()),
            ..Concern::new(id, name.trim(), ctype)
        });
    }
    let p = out.concern_mut(&parent_id).expect("parent resolved above");
    p.review_count += 1;
    p.successful_scenario = Some(delegation_note(&p.name));
    out.canonicalize();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn functional(id: &str, name: &str, scenario: &str) -> Concern {
        Concern {
            objective: Some(format!("{name} objective")),
            successful_scenario: Some(scenario.to_string()),
            ..Concern::new(id, name, ConcernType::Functional)
        }
    }

    #[test]
    fn registry_is_eight_rules_in_order() {
        let codes: Vec<Code> = RULES.iter().map(|r| r.code).collect();
        assert_eq!(
            codes,
            [
                Code::Dec01,
                Code::Dec02,
                Code::Dec03,
                Code::Dec04,
                Code::Dec05,
                Code::Dec06,
                Code::Dec07,
                Code::Dec08
            ]
        );
        let annotated: Vec<Code> = RULES
            .iter()
            .filter(|r| matches!(r.mode, RuleMode::AnnotationDriven(_)))
            .map(|r| r.code)
            .collect();
        assert_eq!(
            annotated,
            [Code::Dec01, Code::Dec02, Code::Dec03, Code::Dec07]
        );
    }

    #[test]
    fn classify() {
        let lex = ActionLexicon::new(["register", "give"]).unwrap();
        let fast = functional("C1", "Fast", "The system shall be fast.");
        let mut fast = fast;
        fast.objective = None;
        let d = classify_concern_type(&fast, &lex);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::TypeSuspect);

        let give = functional("C2", "Give", "The professor gives marks.");
        assert!(classify_concern_type(&give, &lex).is_empty());

        let mut nf = give.clone();
        nf.ctype = ConcernType::NonFunctional;
        assert_eq!(classify_concern_type(&nf, &lex).len(), 1);
        assert!(classify_concern_type(&fast, &ActionLexicon::default()).is_empty());
    }

    #[test]
    fn clean_single_sentence_concern() {
        let mut corpus = Corpus::new();
        corpus
            .concerns
            .push(functional("A", "Alpha", "Does one thing."));
        corpus
            .concerns
            .push(functional("B", "Beta", "Does another thing."));
        let d = lint_decomposition(
            &corpus.concerns[0],
            &corpus,
            &DecompositionConfig::default(),
            None,
        );
        assert_eq!(d, vec![]);
    }

    #[test]
    fn mention_counts_pick_dec05_or_dec06() {
        let mut corpus = Corpus::new();
        for (id, n) in [("V", "Vehicle"), ("G", "Gizmo"), ("D", "DebitingSystem")] {
            corpus.concerns.push(functional(id, n, "x"));
        }
        corpus
            .concerns
            .push(functional("T", "TollGate", "Reads the gizmo."));
        corpus.concerns.push(functional(
            "U",
            "Other",
            "The gizmo on the vehicle is read.",
        ));
        let cfg = DecompositionConfig::default();
        let codes = |corpus: &Corpus, i: usize| -> Vec<Code> {
            lint_decomposition(&corpus.concerns[i], corpus, &cfg, None)
                .iter()
                .map(|d| d.code)
                .collect()
        };
        assert_eq!(codes(&corpus, 3), [Code::Dec05]);
        assert_eq!(codes(&corpus, 4), [Code::Dec06]);
        // whole words only: "gizmos" and "vehicles" are not mentions.
        corpus.concerns[4].successful_scenario = Some("gizmos on vehicles".into());
        assert_eq!(codes(&corpus, 4), []);
    }

    #[test]
    fn length_threshold_and_annotations() {
        let mut corpus = Corpus::new();
        let long = vec!["word"; 61].join(" ");
        let mut c = functional("A", "Alpha", &long);
        c.annotations.insert("derive_new".into());
        c.annotations.insert("limits_goal".into());
        corpus.concerns.push(c);
        let codes: Vec<Code> = lint_decomposition(
            &corpus.concerns[0],
            &corpus,
            &DecompositionConfig::default(),
            None,
        )
        .iter()
        .map(|d| d.code)
        .collect();
        assert_eq!(codes, [Code::Dec01, Code::Dec04, Code::Dec07]);
        let relaxed = DecompositionConfig {
            max_desc_words: 61,
            ..Default::default()
        };
        assert_eq!(
            lint_decomposition(&corpus.concerns[0], &corpus, &relaxed, None).len(),
            2
        );
    }

    #[test]
    fn overlap_rule_needs_lexicon() {
        let lex = ActionLexicon::new(["display", "turn", "pay"]).unwrap();
        let mut corpus = Corpus::new();
        corpus.concerns.push(functional(
            "S",
            "SingleToll",
            "Turn the light green and display the amount to pay.",
        ));
        corpus.concerns.push(functional(
            "P",
            "PayToll",
            "Display the amount to be paid and pay it.",
        ));
        let cfg = DecompositionConfig::default();
        assert!(lint_decomposition(&corpus.concerns[0], &corpus, &cfg, None).is_empty());
        let d = lint_decomposition(&corpus.concerns[0], &corpus, &cfg, Some(&lex));
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].code, Code::Dec08);
        let strict = DecompositionConfig {
            overlap_threshold: 3,
            ..cfg
        };
        assert!(lint_decomposition(&corpus.concerns[0], &corpus, &strict, Some(&lex)).is_empty());
    }

    #[test]
    fn description_template() {
        let corpus = Corpus::new();
        let mut give = functional("Theme_01", "Give", "The professor enters marks.");
        give.objective = Some("Enables the professor to give marks".into());
        let d = validate_concern_description(&give, &corpus);
        assert_eq!(d.len(), 1);
        assert_eq!(
            (d[0].code, d[0].severity),
            (Code::EmptyAlt, crate::Severity::Warning)
        );

        give.objective = None;
        let codes: Vec<Code> = validate_concern_description(&give, &corpus)
            .iter()
            .map(|d| d.code)
            .collect();
        assert_eq!(codes, [Code::MissingField, Code::EmptyAlt]);
    }

    #[test]
    fn delegating_scenario_needs_children() {
        let mut corpus = Corpus::new();
        let mut tg = functional("Con04", "TollGate", &delegation_note("TollGate"));
        tg.alternative_scenario = Some("n/a".into());
        corpus.concerns.push(tg.clone());
        let errors = validate_concern_description(&tg, &corpus);
        assert_eq!(errors.len(), 1);
        let mut child = functional("Con04_1", "EntryToll", "Detects the gizmo.");
        child.parent = Some("Con04".into());
        corpus.concerns.push(child);
        assert_eq!(validate_concern_description(&tg, &corpus), vec![]);
    }

    #[test]
    fn decomposition_errors() {
        let mut corpus = Corpus::new();
        corpus.concerns.push(functional("Con04", "TollGate", "x"));
        corpus.concerns.push(functional("Con01", "Vehicle", "x"));
        assert_eq!(
            apply_decomposition(&corpus, "Con04", &[]),
            Err(DecompositionError::EmptyDecomposition)
        );
        assert_eq!(
            apply_decomposition(&corpus, "Con04", &[("vehicle".into(), "d".into())]),
            Err(DecompositionError::DupName("vehicle".into()))
        );
        assert_eq!(
            apply_decomposition(&corpus, "Nope", &[("A".into(), "d".into())]),
            Err(DecompositionError::UnknownParent("Nope".into()))
        );
        assert_eq!(
            apply_decomposition(
                &corpus,
                "Con04",
                &[("A".into(), "d".into()), ("a".into(), "e".into())]
            ),
            Err(DecompositionError::DupName("a".into()))
        );
    }

    #[test]
    fn decomposition_applies_children() {
        let mut corpus = Corpus::new();
        let mut tg = functional("Con04", "TollGate", "x");
        tg.review_count = 1;
        corpus.concerns.push(tg);
        let mut squatter = functional("Con04_1", "Squatter", "x");
        squatter.ctype = ConcernType::NonFunctional;
        corpus.concerns.push(squatter);
        let out = apply_decomposition(
            &corpus,
            "TollGate",
            &[
                ("EntryToll".into(), "Detects the gizmo.".into()),
                ("ExitToll".into(), "Checks.".into()),
            ],
        )
        .unwrap();
        assert_eq!(out.concerns.len(), 4);
        let entry = out.concern("EntryToll").unwrap();
        assert_eq!(entry.id, "Con04_2");
        assert_eq!(entry.parent.as_deref(), Some("Con04"));
        assert_eq!(entry.ctype, ConcernType::Functional);
        assert_eq!(entry.review_count, 0);
        assert_eq!(out.concern("ExitToll").unwrap().id, "Con04_3");
        let tg = out.concern("Con04").unwrap();
        assert_eq!(tg.review_count, 2);
        assert!(is_delegation_note(
            tg.successful_scenario.as_deref().unwrap()
        ));
        assert_eq!(out.concern("Squatter"), corpus.concern("Squatter"));
    }
}
