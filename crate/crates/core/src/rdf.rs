//! Minimal RDF term model with an N-Triples reader and writer.
//!
//! Only IRIs and literals are supported; blank nodes are rejected because
//! every node the pipeline produces carries a content-derived IRI.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

use crate::model::Iri;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";

#[derive(Debug, Error)]
pub enum RdfError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub lexical: String,
    /// `None` means `xsd:string`.
    pub datatype: Option<Iri>,
    pub lang: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: None, lang: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        if datatype.as_str() == XSD_STRING {
            return Literal::plain(lexical);
        }
        Literal { lexical: lexical.into(), datatype: Some(datatype), lang: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    /// IRI or lexical form.
    pub fn value(&self) -> &str {
        match self {
            Term::Iri(i) => i.as_str(),
            Term::Literal(l) => &l.lexical,
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject, predicate, object: object.into() }
    }

    /// The canonical N-Triples line, without the trailing newline.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::with_capacity(
            self.subject.as_str().len() + self.predicate.as_str().len() + 32,
        );
        let _ = write!(out, "<{}> <{}> ", self.subject, self.predicate);
        write_term(&mut out, &self.object);
        out.push_str(" .");
        out
    }
}

fn write_term(out: &mut String, term: &Term) {
    match term {
        Term::Iri(i) => {
            out.push('<');
            out.push_str(i.as_str());
            out.push('>');
        }
        Term::Literal(l) => {
            out.push('"');
            escape_literal(out, &l.lexical);
            out.push('"');
            if let Some(lang) = &l.lang {
                out.push('@');
                out.push_str(lang);
            } else if let Some(dt) = &l.datatype {
                out.push_str("^^<");
                out.push_str(dt.as_str());
                out.push('>');
            }
        }
    }
}

pub(crate) fn escape_literal(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
}

/// Sorts by canonical line and drops duplicates.
pub fn canonicalize<I: IntoIterator<Item = Triple>>(triples: I) -> Vec<Triple> {
    let mut keyed: Vec<(String, Triple)> =
        triples.into_iter().map(|t| (t.to_ntriples(), t)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    keyed.into_iter().map(|(_, t)| t).collect()
}

/// Canonical N-Triples document: sorted distinct lines, LF terminated.
pub fn to_canonical_ntriples<'a, I: IntoIterator<Item = &'a Triple>>(triples: I) -> String {
    let lines: BTreeSet<String> = triples.into_iter().map(Triple::to_ntriples).collect();
    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parses one N-Triples line; blank lines and comments yield `None`.
pub fn parse_line(line: &str, line_no: usize) -> Result<Option<Triple>, RdfError> {
    let mut cur = Cursor { s: line, pos: 0, line: line_no };
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = cur.iri()?;
    cur.skip_ws();
    let predicate = cur.iri()?;
    cur.skip_ws();
    let object = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('"') => Term::Literal(cur.literal()?),
        Some('_') => return Err(cur.err("blank nodes are not supported")),
        _ => return Err(cur.err("expected object")),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err(cur.err("expected '.'"));
    }
    cur.pos += 1;
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(cur.err("trailing content after '.'"));
    }
    Ok(Some(Triple { subject, predicate, object }))
}

/// Streams triples out of an N-Triples reader.
pub fn read_ntriples<R: BufRead>(reader: R) -> impl Iterator<Item = Result<Triple, RdfError>> {
    reader.lines().enumerate().filter_map(|(idx, line)| match line {
        Ok(line) => parse_line(&line, idx + 1).transpose(),
        Err(e) => Some(Err(RdfError::Io(e))),
    })
}

pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, RdfError> {
    read_ntriples(text.as_bytes()).collect()
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn err(&self, reason: &str) -> RdfError {
        RdfError::Syntax { line: self.line, reason: format!("{reason} at column {}", self.pos + 1) }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.s.len()
    }

    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == ' ' || c == '\t' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn iri(&mut self) -> Result<Iri, RdfError> {
        if self.peek() != Some('<') {
            return Err(self.err("expected '<'"));
        }
        let start = self.pos + 1;
        let end = self.s[start..]
            .find('>')
            .map(|i| start + i)
            .ok_or_else(|| self.err("unterminated IRI"))?;
        let iri = Iri::new(&self.s[start..end]).map_err(|e| self.err(&e.to_string()))?;
        self.pos = end + 1;
        Ok(iri)
    }

    fn literal(&mut self) -> Result<Literal, RdfError> {
        self.pos += 1; // opening quote
        let mut lexical = String::new();
        let mut chars = self.s[self.pos..].char_indices();
        let mut closed = None;
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    closed = Some(self.pos + i + 1);
                    break;
                }
                '\\' => {
                    let (_, esc) = chars.next().ok_or_else(|| self.err("dangling escape"))?;
                    match esc {
                        't' => lexical.push('\t'),
                        'n' => lexical.push('\n'),
                        'r' => lexical.push('\r'),
                        'b' => lexical.push('\u{8}'),
                        'f' => lexical.push('\u{c}'),
                        '"' => lexical.push('"'),
                        '\'' => lexical.push('\''),
                        '\\' => lexical.push('\\'),
                        'u' | 'U' => {
                            let len = if esc == 'u' { 4 } else { 8 };
                            let hex: String = (0..len).filter_map(|_| chars.next().map(|(_, c)| c)).collect();
                            let code = u32::from_str_radix(&hex, 16)
                                .ok()
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.err("bad unicode escape"))?;
                            lexical.push(code);
                        }
                        _ => return Err(self.err("unknown escape")),
                    }
                }
                c => lexical.push(c),
            }
        }
        self.pos = closed.ok_or_else(|| self.err("unterminated literal"))?;
        match self.peek() {
            Some('@') => {
                let start = self.pos + 1;
                let len = self.s[start..]
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                    .unwrap_or(self.s.len() - start);
                if len == 0 {
                    return Err(self.err("empty language tag"));
                }
                self.pos = start + len;
                Ok(Literal { lexical, datatype: None, lang: Some(self.s[start..start + len].to_string()) })
            }
            Some('^') => {
                if !self.s[self.pos..].starts_with("^^") {
                    return Err(self.err("expected '^^'"));
                }
                self.pos += 2;
                let dt = self.iri()?;
                Ok(Literal::typed(lexical, dt))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn parses_iri_and_literal_objects() {
        let text = "<http://a/s> <http://a/p> <http://a/o> .\n\
                    # comment\n\
                    \n\
                    <http://a/s> <http://a/p> \"x \\\"y\\\"\\n\"@en .\n\
                    <http://a/s> <http://a/p> \"5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n\
                    <http://a/s> <http://a/p> \"plain\"^^<http://www.w3.org/2001/XMLSchema#string> .";
        let triples = parse_ntriples(text).unwrap();
        assert_eq!(triples.len(), 4);
        assert_eq!(triples[0].object, Term::Iri(iri("http://a/o")));
        assert_eq!(
            triples[1].object,
            Term::Literal(Literal { lexical: "x \"y\"\n".into(), datatype: None, lang: Some("en".into()) })
        );
        assert_eq!(triples[3].object, Term::Literal(Literal::plain("plain")));
    }

    #[test]
    fn rejects_blank_nodes_and_garbage() {
        assert!(parse_ntriples("_:b <http://a/p> <http://a/o> .").is_err());
        assert!(parse_ntriples("<http://a/s> <http://a/p> _:b .").is_err());
        assert!(parse_ntriples("<http://a/s> <http://a/p> <http://a/o>").is_err());
        let err = parse_ntriples("<http://a/s> <http://a/p> <http://a/o> .\n<bad iri> <http://a/p> \"x\" .")
            .unwrap_err();
        assert!(matches!(err, RdfError::Syntax { line: 2, .. }));
    }

    #[test]
    fn canonical_document_sorts_and_dedups() {
        let a = Triple::new(iri("http://a/2"), iri("http://a/p"), iri("http://a/o"));
        let b = Triple::new(iri("http://a/1"), iri("http://a/p"), Literal::plain("z"));
        let doc = to_canonical_ntriples(&[a.clone(), b.clone(), a.clone()]);
        assert_eq!(doc.lines().count(), 2);
        assert!(doc.starts_with("<http://a/1>"));
        assert!(doc.ends_with(".\n"));
    }

    proptest! {
        #[test]
        fn literal_lines_round_trip(s in "\\PC*", lang in proptest::option::of("[a-z]{2}(-[A-Z]{2})?")) {
            let lit = Literal { lexical: s, datatype: None, lang };
            let t = Triple::new(iri("http://a/s"), iri("http://a/p"), lit);
            let back = parse_line(&t.to_ntriples(), 1).unwrap().unwrap();
            prop_assert_eq!(back, t);
        }
    }
}
