//! Shared proptest strategies and brute-force oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use proptest::collection::vec;
use proptest::option;
use proptest::prelude::*;
use valfar_core::*;

/// Free text that the block format can carry: no line breaks, no
/// surrounding whitespace.
pub fn text() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 ,.;:'()#=-]{0,24}[A-Za-z0-9.)]"
}

/// A list item: no commas.
pub fn item() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 .]{0,10}[A-Za-z0-9]"
}

pub fn date() -> impl Strategy<Value = NaiveDate> {
    (1990i32..2035, 1u32..=12, 1u32..=28)
        .prop_map(|(y, m, d)| NaiveDate::from_ymd_opt(y, m, d).unwrap())
}

fn pick<T: Clone>(items: &[T], mask: &[bool]) -> Vec<T> {
    items
        .iter()
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|(t, _)| t.clone())
        .collect()
}

fn answers() -> impl Strategy<Value = Vec<Option<bool>>> {
    vec(option::of(any::<bool>()), 15)
}

fn fill_answers(kind: ChecklistKind, raw: &[Option<bool>]) -> BTreeMap<Question, Answer> {
    kind.questions()
        .iter()
        .zip(raw)
        .filter_map(|(q, a)| a.map(|yes| (*q, if yes { Answer::Yes } else { Answer::No })))
        .collect()
}

#[derive(Debug, Clone)]
struct ConcernSeed {
    name: String,
    functional: bool,
    objective: Option<String>,
    success: Option<String>,
    alternative: Option<String>,
    date: Option<NaiveDate>,
    reviews: u32,
    references: Vec<String>,
    stakeholders: Vec<bool>,
    parent: usize,
    annotations: Vec<bool>,
}

fn concern_seed(n_stakeholders: usize, index: usize) -> impl Strategy<Value = ConcernSeed> {
    (
        item(),
        any::<bool>(),
        option::of(text()),
        option::of(text()),
        option::of(text()),
        option::of(date()),
        0u32..5,
        vec(item(), 0..3),
        vec(any::<bool>(), n_stakeholders),
        0..=index,
        vec(any::<bool>(), KNOWN_ANNOTATIONS.len()),
    )
        .prop_map(
            |(
                name,
                functional,
                objective,
                success,
                alternative,
                date,
                reviews,
                references,
                stakeholders,
                parent,
                annotations,
            )| {
                ConcernSeed {
                    name,
                    functional,
                    objective,
                    success,
                    alternative,
                    date,
                    reviews,
                    references,
                    stakeholders,
                    parent,
                    annotations,
                }
            },
        )
}

#[derive(Debug, Clone)]
struct NfSeed {
    name: String,
    related: Vec<bool>,
    spec: Option<String>,
    date: Option<NaiveDate>,
    reviews: u32,
    references: Vec<String>,
}

#[derive(Debug, Clone)]
struct AspectSeed {
    share_nf_id: bool,
    name: String,
    all: bool,
    concerns: Vec<bool>,
    description: Option<String>,
    priority: Option<&'static str>,
    pre: Option<String>,
    post: Option<String>,
    depends: Vec<bool>,
    references: Vec<String>,
}

#[derive(Debug, Clone)]
struct Sizes {
    concerns: usize,
    nfs: usize,
    aspects: usize,
    requirements: usize,
    stakeholders: usize,
}

/// Corpora that pass structural integrity by construction: unique ids and
/// names, resolvable references, acyclic parents, no self-dependency, at
/// most one checklist per target and kind.
pub fn sound_corpus() -> impl Strategy<Value = Corpus> {
    (0usize..6, 0usize..3, 0usize..3, 0usize..5, 0usize..3)
        .prop_map(
            |(concerns, nfs, aspects, requirements, stakeholders)| Sizes {
                concerns,
                nfs,
                aspects,
                requirements,
                stakeholders,
            },
        )
        .prop_flat_map(|s| {
            let concern_seeds: Vec<_> = (0..s.concerns)
                .map(|i| concern_seed(s.stakeholders, i))
                .collect();
            let nf_seeds = vec(
                (
                    item(),
                    vec(any::<bool>(), s.concerns),
                    option::of(text()),
                    option::of(date()),
                    0u32..5,
                    vec(item(), 0..3),
                )
                    .prop_map(
                        |(name, related, spec, date, reviews, references)| NfSeed {
                            name,
                            related,
                            spec,
                            date,
                            reviews,
                            references,
                        },
                    ),
                s.nfs,
            );
            let aspect_seeds = vec(
                (
                    any::<bool>(),
                    item(),
                    any::<bool>(),
                    vec(any::<bool>(), s.concerns),
                    option::of(text()),
                    option::of(prop::sample::select(vec!["High", "Medium", "Low"])),
                    option::of(text()),
                    option::of(text()),
                    vec(any::<bool>(), s.aspects),
                    vec(item(), 0..2),
                )
                    .prop_map(
                        |(
                            share_nf_id,
                            name,
                            all,
                            concerns,
                            description,
                            priority,
                            pre,
                            post,
                            depends,
                            references,
                        )| {
                            AspectSeed {
                                share_nf_id,
                                name,
                                all,
                                concerns,
                                description,
                                priority,
                                pre,
                                post,
                                depends,
                                references,
                            }
                        },
                    ),
                s.aspects,
            );
            let checklists = vec(
                (any::<bool>(), answers(), 0u32..4),
                s.concerns + s.nfs + s.aspects,
            );
            let requirements = vec((text(), 0..=s.concerns), s.requirements);
            let stakeholders = vec((item(), option::of(item())), s.stakeholders);
            (
                Just(s),
                concern_seeds,
                nf_seeds,
                aspect_seeds,
                checklists,
                requirements,
                stakeholders,
            )
        })
        .prop_map(|(s, cs, ns, asps, cls, reqs, shs)| build(s, cs, ns, asps, cls, reqs, shs))
}

#[allow(clippy::too_many_arguments)]
fn build(
    s: Sizes,
    cs: Vec<ConcernSeed>,
    ns: Vec<NfSeed>,
    asps: Vec<AspectSeed>,
    cls: Vec<(bool, Vec<Option<bool>>, u32)>,
    reqs: Vec<(String, usize)>,
    shs: Vec<(String, Option<String>)>,
) -> Corpus {
    let mut corpus = Corpus::new();
    let sh_ids: Vec<String> = (0..s.stakeholders).map(|i| format!("SH{i}")).collect();
    for (i, (name, role)) in shs.into_iter().enumerate() {
        corpus.stakeholders.push(Stakeholder {
            id: sh_ids[i].clone(),
            name,
            role,
        });
    }
    // Index suffixes keep names unique within a kind.
    let concern_ids: Vec<String> = (0..s.concerns).map(|i| format!("C{i}")).collect();
    let concern_names: Vec<String> = cs
        .iter()
        .enumerate()
        .map(|(i, c)| format!("{} {i}", c.name))
        .collect();
    for (i, c) in cs.into_iter().enumerate() {
        let ctype = if c.functional {
            ConcernType::Functional
        } else {
            ConcernType::NonFunctional
        };
        let mut concern = Concern::new(&concern_ids[i], &concern_names[i], ctype);
        concern.objective = c.objective;
        concern.successful_scenario = c.success;
        concern.alternative_scenario = c.alternative;
        concern.revision_date = c.date;
        concern.review_count = c.reviews;
        concern.references = c.references;
        concern.stakeholders = pick(&sh_ids, &c.stakeholders);
        concern.parent = (c.parent < i).then(|| concern_ids[c.parent].clone());
        concern.annotations = pick(&KNOWN_ANNOTATIONS.map(String::from), &c.annotations)
            .into_iter()
            .collect::<BTreeSet<_>>();
        corpus.concerns.push(concern);
    }
    let nf_ids: Vec<String> = (0..s.nfs).map(|i| format!("N-{i}")).collect();
    for (i, n) in ns.into_iter().enumerate() {
        let mut nf = NfDescription::new(&nf_ids[i], format!("{} {i}", n.name));
        nf.related_concerns = pick(&concern_names, &n.related);
        nf.specification = n.spec;
        nf.revision_date = n.date;
        nf.review_count = n.reviews;
        nf.references = n.references;
        corpus.nf_descriptions.push(nf);
    }
    let aspect_ids: Vec<String> = asps
        .iter()
        .enumerate()
        .map(|(j, a)| {
            if a.share_nf_id && j < s.nfs {
                format!("N{j}")
            } else {
                format!("A{j}")
            }
        })
        .collect();
    for (j, a) in asps.into_iter().enumerate() {
        let mut doc = AspectDocument::new(&aspect_ids[j], format!("{} {j}", a.name));
        doc.concerns = if a.all {
            AspectConcerns::All
        } else {
            AspectConcerns::List(pick(&concern_ids, &a.concerns))
        };
        doc.description = a.description;
        doc.priority = a.priority.map(String::from);
        doc.precondition = a.pre;
        doc.postcondition = a.post;
        doc.depends_on = aspect_ids
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j && a.depends[*k])
            .map(|(_, id)| id.clone())
            .collect();
        doc.references = a.references;
        corpus.aspects.push(doc);
    }
    let concern_targets = concern_ids
        .iter()
        .chain(&nf_ids)
        .map(|t| (t, ChecklistKind::ConcernEvaluation));
    let aspect_targets = aspect_ids
        .iter()
        .map(|t| (t, ChecklistKind::AspectValidation));
    for ((target, kind), (present, raw, reviews)) in concern_targets.chain(aspect_targets).zip(cls)
    {
        if present {
            let mut ch = ChecklistResponse::new(target.clone(), kind);
            ch.answers = fill_answers(kind, &raw);
            ch.review_count = reviews;
            corpus.checklists.push(ch);
        }
    }
    for (i, (text, owner)) in reqs.into_iter().enumerate() {
        corpus.requirements.push(RequirementItem {
            id: format!("R{i}"),
            text,
            concern: concern_ids.get(owner).cloned(),
        });
    }
    corpus
}

/// Vocabulary for randomized miner corpora: lexicon words plus filler that
/// can never stem to a lexicon entry.
pub const MINER_LEXICON: [&str; 6] = ["pay", "detect", "display", "capture", "check", "log"];
pub const FILLER: [&str; 6] = ["the", "gate", "system", "shall", "vehicle", "quickly"];

pub fn miner_requirements() -> impl Strategy<Value = Vec<RequirementItem>> {
    let word = prop_oneof![
        prop::sample::select(MINER_LEXICON.to_vec()),
        prop::sample::select(FILLER.to_vec()),
    ];
    vec(vec(word, 1..8), 0..10).prop_map(|reqs| {
        reqs.into_iter()
            .enumerate()
            .map(|(i, words)| RequirementItem {
                id: format!("R{i:02}"),
                text: words.join(" "),
                concern: None,
            })
            .collect()
    })
}

/// Brute-force crosscutting oracle. `forms` maps each action to the exact
/// lowercase tokens that count as a mention of it.
pub fn oracle_crosscutting(
    texts: &[&str],
    forms: &BTreeMap<&str, Vec<&str>>,
    k: usize,
) -> BTreeSet<String> {
    let mentions = |t: &str, action: &str| {
        t.split(|c: char| !c.is_alphanumeric())
            .map(|w| w.to_lowercase())
            .any(|w| forms[action].contains(&w.as_str()))
    };
    let mut out = BTreeSet::new();
    for &a in forms.keys() {
        let reqs: Vec<&str> = texts.iter().copied().filter(|t| mentions(t, a)).collect();
        let partners = forms
            .keys()
            .filter(|&&b| b != a && reqs.iter().any(|t| mentions(t, b)))
            .count();
        if reqs.len() >= 2 && partners >= k {
            out.insert(a.to_string());
        }
    }
    out
}

pub fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn load_fixture(name: &str) -> Corpus {
    parse_str(name, &fixture(name))
        .expect("fixture parses")
        .corpus
}
