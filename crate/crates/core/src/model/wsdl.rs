//! Restricted WSDL + SAWSDL importer.
//!
//! Only the parts of a description that shape an interaction network are
//! read: the operations of each `portType` (WSDL 1.1) or `interface`
//! (WSDL 2.0), and the `sawsdl:modelReference` annotations reachable from
//! their input and output messages. A message part is annotated either
//! directly or through the schema `element`/`type` declaration it names.
//! QNames are matched by local name.
//!
//! A model reference IRI `http://x/onto#Country` maps to the concept
//! `http://x/onto#Country`: the fragment is the local name and everything
//! before `#` is the ontology id.

use std::collections::HashMap;

use roxmltree::{Document, Node};
use serde::Serialize;
use thiserror::Error;

use super::{Operation, Service};
use crate::ontology::ConceptRef;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WsdlError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("root element `{0}` is neither wsdl:definitions nor wsdl:description")]
    NotWsdl(String),
    #[error("operation `{operation}`: model reference `{iri}` has no `#fragment`")]
    IriWithoutFragment { operation: String, iri: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FileReport {
    pub file: String,
    pub services: usize,
    pub operations_imported: usize,
    pub operations_rejected: usize,
    pub parts_skipped: usize,
    pub warnings: Vec<String>,
}

/// Import counts aggregated over a batch of files.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    pub files: Vec<FileReport>,
    pub services: usize,
    pub operations_imported: usize,
    pub operations_rejected: usize,
    pub parts_skipped: usize,
}

impl ImportReport {
    pub fn push(&mut self, file: FileReport) {
        self.services += file.services;
        self.operations_imported += file.operations_imported;
        self.operations_rejected += file.operations_rejected;
        self.parts_skipped += file.parts_skipped;
        self.files.push(file);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WsdlImport {
    pub services: Vec<Service>,
    pub report: FileReport,
}

const SAWSDL_ATTR: &str = "modelReference";

fn local(qname: &str) -> &str {
    qname.rsplit_once(':').map_or(qname, |(_, l)| l)
}

fn model_reference<'a>(node: Node<'a, '_>) -> Option<&'a str> {
    node.attributes()
        .find(|a| a.name() == SAWSDL_ATTR)
        .map(|a| a.value())
        .filter(|v| !v.trim().is_empty())
}

fn children<'a, 'i>(node: Node<'a, 'i>, name: &'static str) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children()
        .filter(move |n| n.is_element() && n.tag_name().name() == name)
}

#[derive(Default)]
struct SchemaIndex<'a> {
    elements: HashMap<&'a str, &'a str>,
    types: HashMap<&'a str, &'a str>,
}

#[derive(Debug)]
struct Part<'a> {
    name: &'a str,
    reference: Option<&'a str>,
}

struct Parser<'a> {
    schema: SchemaIndex<'a>,
    messages: HashMap<&'a str, Vec<Part<'a>>>,
    report: FileReport,
}

impl<'a> Parser<'a> {
    fn new(root: Node<'a, '_>, file: &str) -> Self {
        let mut schema = SchemaIndex::default();
        for types in children(root, "types") {
            for sch in children(types, "schema") {
                for decl in sch.children().filter(|n| n.is_element()) {
                    let (Some(name), Some(mr)) = (decl.attribute("name"), model_reference(decl)) else {
                        continue;
                    };
                    match decl.tag_name().name() {
                        "element" => {
                            schema.elements.insert(name, mr);
                        }
                        "complexType" | "simpleType" => {
                            schema.types.insert(name, mr);
                        }
                        _ => {}
                    }
                }
            }
        }

        let mut messages = HashMap::new();
        for msg in children(root, "message") {
            let Some(name) = msg.attribute("name") else { continue };
            let parts = children(msg, "part")
                .map(|p| Part {
                    name: p.attribute("name").unwrap_or(""),
                    reference: model_reference(p)
                        .or_else(|| p.attribute("element").and_then(|e| schema.elements.get(local(e)).copied()))
                        .or_else(|| p.attribute("type").and_then(|t| schema.types.get(local(t)).copied())),
                })
                .collect();
            messages.insert(name, parts);
        }

        Self {
            schema,
            messages,
            report: FileReport {
                file: file.to_owned(),
                ..FileReport::default()
            },
        }
    }

    fn concept(&mut self, operation: &str, part: &str, value: &str) -> Result<ConceptRef, WsdlError> {
        let mut iris = value.split_whitespace();
        let iri = iris.next().unwrap_or_default();
        if iris.next().is_some() {
            self.report.warnings.push(format!(
                "{operation}: part `{part}` carries several model references; using `{iri}`"
            ));
        }
        iri.parse().map_err(|_| WsdlError::IriWithoutFragment {
            operation: operation.to_owned(),
            iri: iri.to_owned(),
        })
    }

    /// Concepts annotating one direction (`input` or `output`) of an operation.
    fn direction(&mut self, op: Node<'a, '_>, op_name: &str, dir: &'static str) -> Result<Vec<ConceptRef>, WsdlError> {
        let mut out = Vec::new();
        for io in children(op, dir) {
            let mut refs: Vec<(String, Option<&'a str>)> = Vec::new();
            if let Some(msg) = io.attribute("message") {
                match self.messages.get(local(msg)) {
                    Some(parts) => refs.extend(parts.iter().map(|p| (p.name.to_owned(), p.reference))),
                    None => self
                        .report
                        .warnings
                        .push(format!("{op_name}: {dir} message `{msg}` is not declared")),
                }
            } else if let Some(el) = io.attribute("element") {
                let reference = model_reference(io).or_else(|| self.schema.elements.get(local(el)).copied());
                refs.push((el.to_owned(), reference));
            }
            for (part, reference) in refs {
                match reference {
                    Some(value) => out.push(self.concept(op_name, &part, value)?),
                    None => {
                        self.report.parts_skipped += 1;
                        self.report
                            .warnings
                            .push(format!("{op_name}: {dir} part `{part}` has no model reference; skipped"));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Import the annotated operations of one WSDL document.
///
/// `fallback_name` names the service when the document itself does not
/// (typically the file stem).
pub fn import_wsdl(document: &str, fallback_name: &str) -> Result<WsdlImport, WsdlError> {
    let doc = Document::parse(document).map_err(|e| WsdlError::Xml(e.to_string()))?;
    let root = doc.root_element();
    let root_name = root.tag_name().name();
    if root_name != "definitions" && root_name != "description" {
        return Err(WsdlError::NotWsdl(root_name.to_owned()));
    }
    let mut parser = Parser::new(root, fallback_name);

    let interfaces: Vec<Node> = root
        .children()
        .filter(|n| n.is_element() && matches!(n.tag_name().name(), "portType" | "interface"))
        .collect();
    let single_name = children(root, "service")
        .next()
        .and_then(|s| s.attribute("name"))
        .or_else(|| root.attribute("name"))
        .unwrap_or(fallback_name);

    let mut services = Vec::new();
    for iface in &interfaces {
        let name = if interfaces.len() == 1 {
            single_name
        } else {
            iface.attribute("name").unwrap_or(fallback_name)
        };
        let mut operations = Vec::new();
        for op in children(*iface, "operation") {
            let op_name = op.attribute("name").unwrap_or_default().to_owned();
            let inputs = parser.direction(op, &op_name, "input")?;
            let outputs = parser.direction(op, &op_name, "output")?;
            if inputs.is_empty() && outputs.is_empty() {
                parser.report.operations_rejected += 1;
                parser
                    .report
                    .warnings
                    .push(format!("{op_name}: no annotated parameters; operation rejected"));
                continue;
            }
            operations.push(Operation {
                name: op_name,
                inputs,
                outputs,
            });
        }
        if !operations.is_empty() {
            parser.report.operations_imported += operations.len();
            services.push(Service {
                name: name.to_owned(),
                operations,
            });
        }
    }
    parser.report.services = services.len();
    Ok(WsdlImport {
        services,
        report: parser.report,
    })
}
