use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use valfar_core::handling::{
    classify_concern_type, lint_decomposition, validate_concern_description, DecompositionConfig,
    DEFAULT_MAX_DESC_WORDS, DEFAULT_OVERLAP_THRESHOLD,
};
use valfar_core::matrix::{
    build_aspect_dependency_matrix, build_crosscutting_matrix, build_theme_matrix,
};
use valfar_core::pipeline::{gate_line, load_corpus, run_on_corpus, Stage};
use valfar_core::themes::{
    emit_clipped_view, extract_action_view, identify_crosscutting, DEFAULT_COOCCURRENCE_THRESHOLD,
};
use valfar_core::{
    import_arcade_xml, serialize_corpus, ActionLexicon, Diagnostic, GateConfig, PipelineError,
    PipelineOptions, RelationMatrix, Report, ReportFormat, Severity,
};

const EXIT_FINDINGS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "valfar",
    version,
    about = "Validate aspect-oriented requirements corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every validation stage and print a report.
    Validate(ValidateArgs),
    /// Run the concern-handling lints only.
    LintDecompose(LintArgs),
    /// Mine base and crosscutting themes from requirement items.
    MineThemes(MineArgs),
    /// Print the crosscutting or aspect-dependency matrix.
    Matrix(MatrixArgs),
    /// Convert viewpoint XML to the block format.
    ImportXml(ImportArgs),
    /// Evaluate checklists against the gate configuration.
    CheckGates(GateArgs),
}

#[derive(Args)]
struct GateConfigArg {
    /// Expected-answer overrides, one `Q = yes|no` per line.
    #[arg(long, env = "VALFAR_CONFIG")]
    gate_config: Option<PathBuf>,
}

#[derive(Args)]
struct DecompositionArgs {
    /// Word limit above which a scenario is flagged as tangled.
    #[arg(long, default_value_t = DEFAULT_MAX_DESC_WORDS)]
    max_desc_words: usize,
    /// Shared lexicon actions needed to flag overlap with another concern.
    #[arg(long, default_value_t = DEFAULT_OVERLAP_THRESHOLD)]
    overlap_threshold: usize,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[command(flatten)]
    gates: GateConfigArg,
    /// Treat warnings as errors.
    #[arg(long)]
    strict: bool,
    /// Output format: text or json.
    #[arg(long, default_value = "text")]
    format: String,
    /// Action lexicon enabling type checks, overlap lints and theme mining.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Co-occurrence threshold for theme mining.
    #[arg(short, default_value_t = DEFAULT_COOCCURRENCE_THRESHOLD)]
    k: usize,
    #[command(flatten)]
    decomposition: DecompositionArgs,
}

#[derive(Args)]
struct LintArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Only lint this concern (id or name).
    #[arg(long)]
    concern: Option<String>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    decomposition: DecompositionArgs,
}

#[derive(Args)]
struct MineArgs {
    /// Corpus files holding `[requirement]` blocks.
    #[arg(required = true)]
    reqs: Vec<PathBuf>,
    #[arg(long, required = true)]
    lexicon: PathBuf,
    #[arg(short, default_value_t = DEFAULT_COOCCURRENCE_THRESHOLD)]
    k: usize,
    /// Write the clipped action view as DOT to this path, or `-` for stdout.
    #[arg(long)]
    dot: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Crosscutting,
    Deps,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[arg(long, value_enum)]
    kind: MatrixKind,
    #[arg(long, value_enum, default_value = "text")]
    format: MatrixFormat,
    /// Also print the matrix of themes mined with this lexicon.
    #[arg(long, value_name = "LEXICON")]
    from_themes: Option<PathBuf>,
    #[arg(short, default_value_t = DEFAULT_COOCCURRENCE_THRESHOLD)]
    k: usize,
}

#[derive(Args)]
struct ImportArgs {
    file: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GateArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[command(flatten)]
    gates: GateConfigArg,
}

/// Why a command stopped before producing its normal output.
enum Failure {
    /// Unreadable or malformed input.
    Input(anyhow::Error),
    Usage(anyhow::Error),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::NoInput => Failure::Usage(e.into()),
            other => Failure::Input(other.into()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("{}: cannot read", path.display()))
        .map_err(Failure::Input)
}

fn load_lexicon(path: &Path) -> Result<ActionLexicon, Failure> {
    ActionLexicon::parse(&read(path)?)
        .with_context(|| path.display().to_string())
        .map_err(Failure::Input)
}

fn load_gate_config(arg: &GateConfigArg) -> Result<GateConfig, Failure> {
    match &arg.gate_config {
        None => Ok(GateConfig::default()),
        Some(p) => GateConfig::parse(&read(p)?)
            .with_context(|| p.display().to_string())
            .map_err(Failure::Input),
    }
}

fn decomposition_config(a: &DecompositionArgs) -> DecompositionConfig {
    DecompositionConfig {
        max_desc_words: a.max_desc_words,
        overlap_threshold: a.overlap_threshold,
    }
}

fn print_warnings(warnings: &[Diagnostic]) {
    for w in warnings {
        eprintln!("{w}");
    }
}

fn validate(args: ValidateArgs) -> Outcome {
    let format: ReportFormat = args
        .format
        .parse()
        .map_err(|e| Failure::Usage(anyhow!("{e}")))?;
    let options = PipelineOptions {
        gates: load_gate_config(&args.gates)?,
        decomposition: decomposition_config(&args.decomposition),
        lexicon: args.lexicon.as_deref().map(load_lexicon).transpose()?,
        cooccurrence_threshold: args.k,
    };
    let ingested = load_corpus(&args.paths)?;
    let mut report = run_on_corpus(&ingested, &options);
    if args.strict {
        report.promote_warnings();
    }
    let rendered = valfar_core::render_report(&report, &format.to_string())
        .map_err(|e| Failure::Usage(e.into()))?;
    print!("{rendered}");
    Ok(report.exit_code() as u8)
}

fn lint_decompose(args: LintArgs) -> Outcome {
    let ingested = load_corpus(&args.paths)?;
    let corpus = &ingested.corpus;
    let lexicon = args.lexicon.as_deref().map(load_lexicon).transpose()?;
    let config = decomposition_config(&args.decomposition);
    let concerns: Vec<_> = match &args.concern {
        Some(r) => vec![corpus
            .concern(r)
            .ok_or_else(|| Failure::Usage(anyhow!("no concern `{r}` in the corpus")))?],
        None => corpus.concerns.iter().collect(),
    };
    let mut diags = Vec::new();
    for c in concerns {
        if let Some(lex) = &lexicon {
            diags.extend(classify_concern_type(c, lex));
        }
        diags.extend(lint_decomposition(c, corpus, &config, lexicon.as_ref()));
        diags.extend(validate_concern_description(c, corpus));
    }
    if args.strict {
        for d in &mut diags {
            d.severity = Severity::Error;
        }
    }
    print_warnings(&ingested.warnings);
    for d in &diags {
        println!("{d}");
    }
    let errors = diags.iter().filter(|d| d.is_error()).count();
    println!("{errors} errors, {} warnings", diags.len() - errors);
    Ok(if errors > 0 { EXIT_FINDINGS } else { 0 })
}

fn mine_themes(args: MineArgs) -> Outcome {
    let lexicon = load_lexicon(&args.lexicon)?;
    let ingested = load_corpus(&args.reqs)?;
    print_warnings(&ingested.warnings);
    let view = extract_action_view(&ingested.corpus.requirements, &lexicon).map_err(input)?;
    let view = identify_crosscutting(&view, args.k);
    match args.dot.as_deref() {
        Some("-") => {
            print!("{}", emit_clipped_view(&view));
            return Ok(0);
        }
        Some(path) => fs::write(path, emit_clipped_view(&view))
            .with_context(|| format!("{path}: cannot write"))
            .map_err(Failure::Input)?,
        None => {}
    }
    println!("requirements: {}", view.requirements.len());
    println!(
        "crosscutting: {}",
        list_or_none(&view.crosscutting_actions())
    );
    println!("base: {}", list_or_none(&view.base_actions()));
    Ok(0)
}

fn list_or_none(items: &[&str]) -> String {
    if items.is_empty() {
        "(none)".to_string()
    } else {
        items.join(", ")
    }
}

fn render_matrix(m: &RelationMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Text => m.render_text(),
        MatrixFormat::Csv => m.render_csv(),
    }
}

fn matrix(args: MatrixArgs) -> Outcome {
    let ingested = load_corpus(&args.paths)?;
    print_warnings(&ingested.warnings);
    let corpus = &ingested.corpus;
    let m = match args.kind {
        MatrixKind::Crosscutting => build_crosscutting_matrix(corpus),
        MatrixKind::Deps => match build_aspect_dependency_matrix(corpus) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error {e}");
                return Ok(EXIT_FINDINGS);
            }
        },
    };
    print!("{}", render_matrix(&m, args.format));
    if let Some(path) = &args.from_themes {
        let lexicon = load_lexicon(path)?;
        let view = extract_action_view(&corpus.requirements, &lexicon).map_err(input)?;
        let view = identify_crosscutting(&view, args.k);
        let mined = build_theme_matrix(corpus, &view);
        if matches!(args.format, MatrixFormat::Text) {
            println!("\nmined themes (k = {}):", args.k);
        } else {
            println!();
        }
        print!("{}", render_matrix(&mined, args.format));
    }
    Ok(0)
}

fn import_xml(args: ImportArgs) -> Outcome {
    let text = read(&args.file)?;
    let ingested = import_arcade_xml(&args.file.display().to_string(), &text).map_err(input)?;
    print_warnings(&ingested.warnings);
    let out = match serialize_corpus(&ingested.corpus) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error {e}");
            return Ok(EXIT_FINDINGS);
        }
    };
    match &args.output {
        Some(p) => fs::write(p, out)
            .with_context(|| format!("{}: cannot write", p.display()))
            .map_err(Failure::Input)?,
        None => print!("{out}"),
    }
    Ok(0)
}

fn check_gates(args: GateArgs) -> Outcome {
    let options = PipelineOptions {
        gates: load_gate_config(&args.gates)?,
        ..PipelineOptions::default()
    };
    let ingested = load_corpus(&args.paths)?;
    let report: Report = run_on_corpus(&ingested, &options);
    for stage in [Stage::ConcernValidation, Stage::AspectValidation] {
        for g in report.gates.iter().filter(|g| g.stage == stage) {
            println!("{}", gate_line(g));
        }
    }
    Ok(if report.all_gates_pass() {
        0
    } else {
        EXIT_FINDINGS
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let outcome = match cli.command {
        Command::Validate(a) => validate(a),
        Command::LintDecompose(a) => lint_decompose(a),
        Command::MineThemes(a) => mine_themes(a),
        Command::Matrix(a) => matrix(a),
        Command::ImportXml(a) => import_xml(a),
        Command::CheckGates(a) => check_gates(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
