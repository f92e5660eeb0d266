//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p valfar-cli --test acceptance`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use valfar_core::gates::{evaluate_aspect_checklist, evaluate_concern_checklist};
use valfar_core::handling::{apply_decomposition, lint_decomposition, DecompositionConfig};
use valfar_core::matrix::{build_aspect_dependency_matrix, build_crosscutting_matrix};
use valfar_core::themes::{extract_action_view, identify_crosscutting};
use valfar_core::*;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture_path(name: &str) -> String {
    PathBuf::from(format!(
        "{}/../../fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .display()
    .to_string()
}

/// Runs the CLI; returns exit code and stdout.
fn valfar(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_valfar"))
        .args(args)
        .env_remove("VALFAR_CONFIG")
        .output()
        .expect("valfar binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

/// Parses the CLI's CSV matrix output into (header, rows).
fn csv_matrix(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text
        .lines()
        .map(|l| l.split(',').map(String::from).collect::<Vec<_>>());
    let header = lines.next().unwrap_or_default();
    (header, lines.collect())
}

fn proptest_runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn toll_fixture() -> Check {
    let toll = fixture_path("toll.valfar");
    let (code, report) = valfar(&["validate", &toll]);
    ensure!(code == 0, "validate exited {code}:\n{report}");

    let (code, out) = valfar(&["matrix", &toll, "--kind", "crosscutting", "--format", "csv"]);
    ensure!(code == 0, "matrix exited {code}");
    let (header, rows) = csv_matrix(&out);
    ensure!(
        rows.len() == 1 && rows[0][0] == "ResponseTime",
        "rows: {rows:?}"
    );
    let marked: BTreeSet<&str> = header
        .iter()
        .zip(&rows[0])
        .skip(1)
        .filter(|(_, v)| *v == "1")
        .map(|(h, _)| h.as_str())
        .collect();
    let expected = BTreeSet::from(["ATM", "Gizmo", "Vehicle", "TollGate"]);
    ensure!(marked == expected, "ResponseTime marks {marked:?}");

    let (code, out) = valfar(&["matrix", &toll, "--kind", "deps", "--format", "csv"]);
    ensure!(code == 0, "deps matrix exited {code}");
    let (_, rows) = csv_matrix(&out);
    ensure!(!rows.is_empty(), "empty dependency matrix");
    ensure!(
        rows.iter().all(|r| r.iter().skip(1).all(|v| v == "0")),
        "dependency matrix has a true cell: {rows:?}"
    );
    Ok(())
}

fn tollgate_decomposition() -> Check {
    let raw = common::load_fixture("toll_raw.valfar");
    let cfg = DecompositionConfig::default();
    let dec = |c: &Corpus| {
        let tollgate = c.concern("TollGate").expect("TollGate present");
        lint_decomposition(tollgate, c, &cfg, None)
            .into_iter()
            .filter(|d| d.code.is_decomposition())
            .count()
    };
    let before = dec(&raw);
    ensure!(before >= 1, "raw TollGate raised no DEC diagnostic");
    let children: Vec<(String, String)> = [
        ("EntryToll", "Detects the installed gizmo on the vehicle."),
        ("SingleToll", "Turn the light into the green for authorized vehicles and display the amount of money to be paid."),
        ("PayToll", "Display the amount of money to be paid by authorized vehicles."),
        ("PlateCapture", "It captures the plate numbers of unauthorized vehicles."),
        ("ExitToll", "Checks the entrance of the vehicle through the gate whether it is a valid entrance or not."),
    ]
    .iter()
    .map(|(n, d)| (n.to_string(), d.to_string()))
    .collect();
    let decomposed = apply_decomposition(&raw, "Con04", &children).map_err(|e| e.to_string())?;
    let after = dec(&decomposed);
    ensure!(after < before, "DEC count {before} -> {after}");
    let r0 = raw.concern("TollGate").unwrap().review_count;
    let r1 = decomposed.concern("TollGate").unwrap().review_count;
    ensure!(r1 == r0 + 1, "review_count {r0} -> {r1}");
    Ok(())
}

fn course_themes() -> Check {
    let corpus = common::load_fixture("course.valfar");
    let lex =
        ActionLexicon::parse(&common::fixture("course.lexicon")).map_err(|e| e.to_string())?;
    let entries: BTreeSet<&str> = lex.entries().iter().map(String::as_str).collect();
    ensure!(
        entries == BTreeSet::from(["give", "register", "unregister", "log"]),
        "lexicon {entries:?}"
    );
    let view = extract_action_view(&corpus.requirements, &lex).map_err(|e| e.to_string())?;
    let view = identify_crosscutting(&view, 2);
    let cross: BTreeSet<String> = view
        .crosscutting_actions()
        .into_iter()
        .map(String::from)
        .collect();
    let base: BTreeSet<&str> = view.base_actions().into_iter().collect();
    ensure!(
        cross == BTreeSet::from(["log".to_string()]),
        "crosscutting {cross:?}"
    );
    ensure!(
        base == BTreeSet::from(["give", "register", "unregister"]),
        "base {base:?}"
    );

    let forms = BTreeMap::from([
        ("give", vec!["give", "gives", "given", "giving"]),
        (
            "register",
            vec!["register", "registers", "registered", "registering"],
        ),
        (
            "unregister",
            vec!["unregister", "unregisters", "unregistered", "unregistering"],
        ),
        ("log", vec!["log", "logs", "logged", "logging"]),
    ]);
    let texts: Vec<&str> = corpus
        .requirements
        .iter()
        .map(|r| r.text.as_str())
        .collect();
    let oracle = common::oracle_crosscutting(&texts, &forms, 2);
    ensure!(oracle == cross, "oracle {oracle:?} vs miner {cross:?}");

    let (code, out) = valfar(&[
        "mine-themes",
        &fixture_path("course.valfar"),
        "--lexicon",
        &fixture_path("course.lexicon"),
        "-k",
        "2",
    ]);
    ensure!(
        code == 0 && out.contains("crosscutting: log\n"),
        "CLI printed:\n{out}"
    );
    Ok(())
}

fn gates() -> Check {
    let cfg = GateConfig::default();
    for (fixture, nf_target, aspect_target) in [
        ("toll.valfar", "Asp-01", "Asp01"),
        ("course.valfar", "Theme_a", "theme_a"),
    ] {
        let corpus = common::load_fixture(fixture);
        let find = |target: &str, kind| {
            corpus
                .checklists
                .iter()
                .find(|c| c.kind == kind && c.target_id == target)
                .cloned()
                .ok_or(format!("{fixture}: no {kind:?} checklist on {target}"))
        };
        let eval = find(nf_target, ChecklistKind::ConcernEvaluation)?;
        let r = evaluate_concern_checklist(&eval, &cfg).map_err(|e| e.to_string())?;
        ensure!(r.verdict == Verdict::Pass, "{fixture}: evaluation {:?}", r);
        for q in Question::CONCERN_EVALUATION {
            let mut flipped = eval.clone();
            let a = flipped.answers[&q].flipped();
            flipped.answers.insert(q, a);
            let r = evaluate_concern_checklist(&flipped, &cfg).map_err(|e| e.to_string())?;
            ensure!(
                r.verdict == Verdict::Fail && r.failing_questions == vec![q],
                "{fixture}: flipping {q} gave {:?} {:?}",
                r.verdict,
                r.failing_questions
            );
        }
        let val = find(aspect_target, ChecklistKind::AspectValidation)?;
        let aspect = corpus.aspect(aspect_target).ok_or("aspect missing")?;
        let r = evaluate_aspect_checklist(&val, &cfg, aspect).map_err(|e| e.to_string())?;
        ensure!(
            r.verdict == Verdict::Pass && r.review_count == 2,
            "{fixture}: validation {:?} review {}",
            r.verdict,
            r.review_count
        );
    }
    Ok(())
}

fn round_trip() -> Check {
    let mut runner = proptest_runner(100);
    runner
        .run(&common::sound_corpus(), |c| {
            let text = serialize_corpus(&c).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let back = parse_str("rt", &text).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(back.corpus, c.canonical());
            Ok(())
        })
        .map_err(|e| format!("round trip: {e}"))?;

    let dir = std::env::temp_dir().join(format!("valfar-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let out = dir.join("viewpoints.valfar");
    let (code, _) = valfar(&[
        "import-xml",
        &fixture_path("toll_viewpoints.xml"),
        "-o",
        out.to_str().unwrap(),
    ]);
    ensure!(code == 0, "import-xml exited {code}");
    let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
    let _ = std::fs::remove_dir_all(&dir);
    let corpus = parse_str("viewpoints.valfar", &text)
        .map_err(|e| e.to_string())?
        .corpus;
    ensure!(
        corpus.concerns.len() == 6,
        "imported {} concerns",
        corpus.concerns.len()
    );
    Ok(())
}

fn invariants() -> Check {
    let mut runner = proptest_runner(64);
    let strategy = (
        common::sound_corpus(),
        any::<prop::sample::Index>(),
        any::<prop::sample::Index>(),
    );
    runner
        .run(&strategy, |(c, a, b)| {
            // Sound corpora are clean; injected faults are reported.
            prop_assert!(check_structural_integrity(&c).iter().all(|d| !d.is_error()));
            if !c.concerns.is_empty() {
                let i = a.index(c.concerns.len());
                let mut dup = c.clone();
                dup.concerns.push(Concern::new(
                    c.concerns[i].id.clone(),
                    "Unique twin",
                    ConcernType::Functional,
                ));
                prop_assert!(check_structural_integrity(&dup)
                    .iter()
                    .any(|d| d.code == Code::DupId));
                let mut same_name = c.clone();
                same_name.concerns.push(Concern::new(
                    "Twin-9",
                    c.concerns[i].name.to_lowercase(),
                    ConcernType::Functional,
                ));
                prop_assert!(check_structural_integrity(&same_name)
                    .iter()
                    .any(|d| d.code == Code::DupName));
                let mut dangling = c.clone();
                dangling.concerns[i].stakeholders.push("SH-none".into());
                prop_assert!(check_structural_integrity(&dangling)
                    .iter()
                    .any(|d| d.code == Code::RefUnresolved));
                let j = b.index(c.concerns.len());
                if i != j {
                    let mut cyc = c.clone();
                    cyc.concerns[i].parent = Some(c.concerns[j].id.clone());
                    cyc.concerns[j].parent = Some(c.concerns[i].id.clone());
                    prop_assert!(check_structural_integrity(&cyc)
                        .iter()
                        .any(|d| d.code == Code::ParentCycle));
                }
            }
            // Matrix laws.
            let rel = build_crosscutting_matrix(&c).induced_column_relation();
            prop_assert!(rel.iter().all(|&(x, y)| x != y && rel.contains(&(y, x))));
            let deps = build_aspect_dependency_matrix(&c)
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!((0..deps.cells.len()).all(|i| !deps.cells[i][i]));
            // Exit-code law.
            let r = run_on_corpus(
                &Ingested {
                    corpus: c,
                    warnings: vec![],
                },
                &PipelineOptions::default(),
            );
            let clean = r.error_count() == 0 && r.all_gates_pass();
            prop_assert_eq!(r.exit_code(), if clean { 0 } else { 1 });
            Ok(())
        })
        .map_err(|e| format!("structure/matrix: {e}"))?;

    let lex = ActionLexicon::new(common::MINER_LEXICON).map_err(|e| e.to_string())?;
    proptest_runner(128)
        .run(&(common::miner_requirements(), 0usize..6), |(reqs, k)| {
            let view =
                extract_action_view(&reqs, &lex).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let wide = identify_crosscutting(&view, k).crosscutting;
            let narrow = identify_crosscutting(&view, k + 1).crosscutting;
            prop_assert!(narrow.is_subset(&wide));
            Ok(())
        })
        .map_err(|e| format!("k-monotonicity: {e}"))?;

    // Exit-code contract end to end.
    let dir = std::env::temp_dir().join(format!("valfar-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let dup = dir.join("dup.valfar");
    let bad = dir.join("bad.valfar");
    std::fs::write(&dup, "[concern]\nid = C1\nname = Pay\ntype = functional\n\n[concern]\nid = C2\nname = pay\ntype = functional\n")
        .map_err(|e| e.to_string())?;
    std::fs::write(&bad, "[concern\n").map_err(|e| e.to_string())?;
    let cases: [(&[&str], i32); 5] = [
        (&["validate", &fixture_path("toll.valfar")], 0),
        (&["validate", dup.to_str().unwrap()], 1),
        (&["validate", "--strict", &fixture_path("course.valfar")], 1),
        (&["validate", bad.to_str().unwrap()], 2),
        (&["validate", "--no-such-flag"], 3),
    ];
    for (args, expected) in cases {
        let (code, _) = valfar(args);
        ensure!(
            code == expected,
            "`valfar {}` exited {code}, expected {expected}",
            args.join(" ")
        );
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

fn main() {
    let criteria: [Criterion; 6] = [
        (
            "toll fixture validates; ResponseTime row and dependency matrix exact",
            toll_fixture,
        ),
        (
            "TollGate decomposition lowers DEC findings and bumps review count",
            tollgate_decomposition,
        ),
        (
            "course themes at k=2 match the brute-force oracle",
            course_themes,
        ),
        (
            "checklist gates pass, single flips fail, reviews echoed",
            gates,
        ),
        (
            "block format round trip and six-viewpoint XML import",
            round_trip,
        ),
        ("invariant suite and exit-code contract", invariants),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {}: {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
