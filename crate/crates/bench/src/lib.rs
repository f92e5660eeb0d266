//! Deterministic synthetic inputs for the benchmarks.

use std::fmt::Write as _;

use valfar_core::{ActionLexicon, RequirementItem};

const VERBS: [&str; 8] = [
    "pay", "detect", "display", "capture", "check", "issue", "notify", "log",
];

/// A block-format corpus with `n` functional concerns, one non-functional
/// description and matching aspect crosscutting every third concern, and
/// both checklists.
pub fn synthetic_corpus(n: usize) -> String {
    let mut out = String::from("[stakeholder]\nid = SH1\nname = Analyst\n");
    for i in 0..n {
        let verb = VERBS[i % VERBS.len()];
        let _ = write!(
            out,
            "\n[concern]\nid = C{i}\nname = Concern{i}\ntype = functional\n\
             objective = {verb} item {i}\n\
             successful_scenario = The system will {verb} the item and record the outcome for item {i}.\n\
             alternative_scenario = The attempt to {verb} fails and the operator is told.\n\
             review_count = 1\nrevision_date = 2020-05-0{}\nstakeholders = SH1\n",
            1 + i % 9
        );
    }
    let related: Vec<String> = (0..n).step_by(3).map(|i| format!("Concern{i}")).collect();
    let _ = write!(
        out,
        "\n[nonfunctional]\nid = NF-1\nname = Latency\nrelated_concerns = {list}\n\
         specification = Responses arrive within the agreed time.\nreview_count = 1\nrevision_date = 2020-05-04\n\
         \n[aspect]\nid = NF1\nname = Latency\nconcerns = {list}\ndescription = Bounds response time.\n\
         priority = High\nprecondition = Concerns operate normally.\n\
         \n[checklist]\ntarget = NF-1\nkind = concern_evaluation\nreview_count = 1\n\
         C1 = yes\nC2 = no\nC3 = yes\nC4 = yes\nC5 = yes\nS1 = yes\nS2 = yes\nS3 = yes\nS4 = yes\nS5 = yes\n\
         \n[checklist]\ntarget = NF1\nkind = aspect_validation\nreview_count = 1\n\
         A1 = yes\nA2 = yes\nA3 = yes\nA4 = yes\nA5 = yes\n",
        list = related.join(", ")
    );
    out
}

pub fn lexicon() -> ActionLexicon {
    ActionLexicon::new(VERBS).expect("non-empty lexicon")
}

/// `n` requirements, each naming two actions plus `log`.
pub fn synthetic_requirements(n: usize) -> Vec<RequirementItem> {
    (0..n)
        .map(|i| {
            let a = VERBS[i % (VERBS.len() - 1)];
            let b = VERBS[(i / 3) % (VERBS.len() - 1)];
            RequirementItem {
                id: format!("R{i:05}"),
                text: format!("The operator shall {a} and {b} the record; every step is logged."),
                concern: None,
            }
        })
        .collect()
}
