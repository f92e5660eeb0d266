//! Reading corpora: the block text format and viewpoint XML import.

mod block;
mod date;
mod xml;

pub use block::{parse_corpus, parse_str, serialize_corpus, Source};
pub use date::parse_date;
pub use xml::import_arcade_xml;

use crate::diagnostic::Diagnostic;
use crate::model::Corpus;

/// A successfully read corpus together with the non-fatal warnings raised
/// while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub corpus: Corpus,
    pub warnings: Vec<Diagnostic>,
}
