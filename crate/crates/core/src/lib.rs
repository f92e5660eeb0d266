pub mod diagnostic;
pub mod error;
pub mod gates;
pub mod handling;
pub mod ingest;
pub mod integrity;
pub mod matrix;
pub mod model;
pub mod pipeline;
pub mod themes;

pub use diagnostic::{Code, Diagnostic, Severity};
pub use error::*;
pub use gates::{GateConfig, GateResult, Verdict};
pub use ingest::{import_arcade_xml, parse_corpus, parse_str, serialize_corpus, Ingested, Source};
pub use integrity::check_structural_integrity;
pub use matrix::RelationMatrix;
pub use model::*;
pub use pipeline::{
    render_report, run_on_corpus, run_pipeline, PipelineOptions, Report, ReportFormat, Stage,
};
pub use themes::{ActionLexicon, ActionView};
