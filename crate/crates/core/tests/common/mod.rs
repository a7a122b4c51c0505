#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use borrowlens_core::diagnostic::{parse_diagnostic_stream, Diagnostic};
use quick_xml::events::Event;
use quick_xml::{Reader, XmlVersion};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn stream(name: &str) -> String {
    let path = fixtures_dir().join("streams").join(format!("{name}.jsonl"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn source(name: &str) -> String {
    let path = fixtures_dir().join(name).join("src/main.rs");
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn diagnostics(name: &str) -> Vec<Diagnostic> {
    parse_diagnostic_stream(&stream(name)).expect("fixture stream parses")
}

/// Fixtures whose build fails with exactly one supported error.
pub const SUPPORTED_FIXTURES: [(&str, &str); 10] = [
    ("fig1_use_after_move", "E0382"),
    ("fig2_closure_capture", "E0597"),
    ("e0373_closure_outlives", "E0373"),
    ("e0499_double_mut_borrow", "E0499"),
    ("e0502_mut_while_shared", "E0502"),
    ("e0503_use_while_mut", "E0503"),
    ("e0505_move_while_borrowed", "E0505"),
    ("e0506_assign_while_borrowed", "E0506"),
    ("e0597_dropped_while_borrowed", "E0597"),
    ("mixed_e0308_e0382", "E0382"),
];

#[derive(Debug, Clone)]
pub struct Element {
    pub name: String,
    pub attrs: BTreeMap<String, String>,
    pub text: String,
}

impl Element {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }

    pub fn num(&self, key: &str) -> f64 {
        self.attr(key)
            .unwrap_or_else(|| panic!("<{}> lacks {key}", self.name))
            .parse()
            .unwrap_or_else(|e| panic!("<{}> {key}: {e}", self.name))
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.attr("class").is_some_and(|c| c.split_whitespace().any(|c| c == class))
    }

    /// Every x coordinate the element draws at.
    pub fn xs(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for key in ["x", "x1", "x2"] {
            if self.attrs.contains_key(key) {
                out.push(self.num(key));
            }
        }
        if let Some(points) = self.attr("points") {
            for p in points.split_whitespace() {
                let (x, _) = p.split_once(',').expect("x,y pair");
                out.push(x.parse().unwrap());
            }
        }
        out
    }
}

/// Parses an XML document into a flat list of elements in document order.
/// Panics when the document is not well formed.
pub fn parse_xml(doc: &str) -> Vec<Element> {
    let mut reader = Reader::from_str(doc);
    reader.config_mut().check_end_names = true;
    let mut out: Vec<Element> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    loop {
        let event = reader.read_event().unwrap_or_else(|e| panic!("malformed XML: {e}"));
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let name = e.name().as_ref().to_string();
                let mut attrs = BTreeMap::new();
                for a in e.attributes() {
                    let a = a.expect("well-formed attribute");
                    let key = a.key.as_ref().to_string();
                    let value = a.normalized_value(XmlVersion::Implicit1_0).unwrap().into_owned();
                    assert!(attrs.insert(key.clone(), value).is_none(), "duplicate attribute {key}");
                }
                out.push(Element { name, attrs, text: String::new() });
                if matches!(event, Event::Start(_)) {
                    open.push(out.len() - 1);
                }
            }
            Event::End(_) => {
                open.pop().expect("balanced tags");
            }
            Event::Text(t) => {
                if let Some(&i) = open.last() {
                    out[i].text.push_str(&t.xml_content(XmlVersion::Implicit1_0));
                }
            }
            Event::GeneralRef(r) => {
                let s = match r.resolve_char_ref().unwrap() {
                    Some(c) => c.to_string(),
                    None => match &*r.xml_content(XmlVersion::Implicit1_0) {
                        "amp" => "&".into(),
                        "lt" => "<".into(),
                        "gt" => ">".into(),
                        "quot" => "\"".into(),
                        "apos" => "'".into(),
                        other => panic!("unknown entity {other}"),
                    },
                };
                if let Some(&i) = open.last() {
                    out[i].text.push_str(&s);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    assert!(open.is_empty(), "unclosed elements");
    out
}

/// Visual columns of a line with tabs expanded to `tab` stops.
pub fn columns(line: &str, tab: usize) -> usize {
    let mut col = 0;
    for c in line.chars() {
        if c == '\t' {
            col += tab - col % tab;
        } else {
            col += 1;
        }
    }
    col
}
