//! Import of viewpoint-style XML.
//!
//! ```xml
//! <aore>
//!   <Concern name="TollGate" id="Con04">
//!     <Requirement id="R1" name="EntryToll">Detects the gizmo.</Requirement>
//!     <Requirement id="R2">Plain requirement text.</Requirement>
//!   </Concern>
//! </aore>
//! ```
//!
//! A named `Requirement` becomes a child concern of the enclosing concern;
//! an unnamed one becomes a requirement item owned by the nearest concern.
//! Anything else is skipped with a warning.

use roxmltree::{Document, Node};

use crate::diagnostic::{Code, Diagnostic};
use crate::error::ParseError;
use crate::ingest::Ingested;
use crate::model::*;

struct Importer<'a, 'input> {
    file: &'a str,
    doc: &'a Document<'input>,
    corpus: Corpus,
    warnings: Vec<Diagnostic>,
    anonymous: usize,
}

impl<'a, 'input> Importer<'a, 'input> {
    fn line(&self, node: Node) -> usize {
        self.doc.text_pos_at(node.range().start).row as usize
    }

    fn skip(&mut self, node: Node) {
        self.warnings.push(Diagnostic::warning(
            Code::SkippedElement,
            format!("{}:{}", self.file, self.line(node)),
            format!(
                "element <{}> is not part of the import schema; skipped",
                node.tag_name().name()
            ),
        ));
    }

    /// Direct text of an element, excluding nested elements.
    fn own_text(node: Node) -> String {
        let raw: Vec<&str> = node
            .children()
            .filter(|c| c.is_text())
            .filter_map(|c| c.text())
            .collect();
        raw.join(" ")
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn concern(&mut self, node: Node) -> Result<(), ParseError> {
        let name = node
            .attribute("name")
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .ok_or_else(|| {
                ParseError::new(
                    self.file,
                    self.line(node),
                    "<Concern> element without a name",
                )
            })?;
        let ctype = match node.attribute("type") {
            Some(t) => t
                .parse::<ConcernType>()
                .map_err(|m| ParseError::new(self.file, self.line(node), m))?,
            None => ConcernType::Functional,
        };
        let id = node.attribute("id").unwrap_or(name).trim().to_string();
        let mut concern = Concern::new(id.clone(), name, ctype);
        let text = Self::own_text(node);
        if !text.is_empty() {
            concern.objective = Some(text);
        }
        self.corpus.concerns.push(concern);
        self.children(node, &id, ctype)
    }

    fn children(&mut self, node: Node, owner: &str, ctype: ConcernType) -> Result<(), ParseError> {
        for child in node.children().filter(Node::is_element) {
            if child.tag_name().name() == "Requirement" {
                self.requirement(child, owner, ctype)?;
            } else {
                self.skip(child);
            }
        }
        Ok(())
    }

    fn requirement(
        &mut self,
        node: Node,
        owner: &str,
        ctype: ConcernType,
    ) -> Result<(), ParseError> {
        let text = Self::own_text(node);
        let id = match node
            .attribute("id")
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            Some(id) => id.to_string(),
            None => {
                self.anonymous += 1;
                format!("{owner}.R{}", self.anonymous)
            }
        };
        match node
            .attribute("name")
            .map(str::trim)
            .filter(|n| !n.is_empty())
        {
            Some(name) => {
                let mut child = Concern::new(id.clone(), name, ctype);
                child.parent = Some(owner.to_string());
                if !text.is_empty() {
                    child.successful_scenario = Some(text);
                }
                self.corpus.concerns.push(child);
                self.children(node, &id, ctype)
            }
            None => {
                if text.is_empty() {
                    return Err(ParseError::new(
                        self.file,
                        self.line(node),
                        "<Requirement> without a name has no text",
                    ));
                }
                self.corpus.requirements.push(RequirementItem {
                    id,
                    text,
                    concern: Some(owner.to_string()),
                });
                self.children(node, owner, ctype)
            }
        }
    }
}

/// Imports viewpoint XML into a corpus. Review metadata is never invented:
/// every imported concern has a review count of 0 and no revision date.
pub fn import_arcade_xml(file: &str, source: &str) -> Result<Ingested, ParseError> {
    let doc = Document::parse(source).map_err(|e| {
        let pos = e.pos();
        ParseError::new(file, pos.row as usize, format!("ill-formed XML: {e}"))
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "aore" {
        return Err(ParseError::new(
            file,
            doc.text_pos_at(root.range().start).row as usize,
            format!(
                "expected root element <aore>, found <{}>",
                root.tag_name().name()
            ),
        ));
    }
    let mut imp = Importer {
        file,
        doc: &doc,
        corpus: Corpus::new(),
        warnings: Vec::new(),
        anonymous: 0,
    };
    for child in root.children().filter(Node::is_element) {
        if child.tag_name().name() == "Concern" {
            imp.concern(child)?;
        } else {
            imp.skip(child);
        }
    }
    let mut corpus = imp.corpus;
    corpus.canonicalize();
    Ok(Ingested {
        corpus,
        warnings: imp.warnings,
    })
}
