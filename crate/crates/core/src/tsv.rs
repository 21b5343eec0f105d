//! Tab-separated files with backslash escapes (`\t`, `\n`, `\r`, `\\`).
//!
//! All TSV inputs and outputs of the pipeline share this dialect: UTF-8, LF
//! line endings, one mandatory header row.

use std::io::{self, BufRead, Lines, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TsvError {
    #[error("missing header row")]
    MissingHeader,
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn escape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    for c in field.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(field: &str) -> String {
    let mut out = String::with_capacity(field.len());
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

pub fn write_row<W: Write, S: AsRef<str>>(out: &mut W, fields: &[S]) -> io::Result<()> {
    let mut first = true;
    for f in fields {
        if !first {
            out.write_all(b"\t")?;
        }
        first = false;
        out.write_all(escape(f.as_ref()).as_bytes())?;
    }
    out.write_all(b"\n")
}

/// One unescaped data row with its 1-based line number in the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub line: usize,
    pub fields: Vec<String>,
}

/// Lazy row reader. The header is consumed on construction; blank lines are
/// skipped.
pub struct Reader<R> {
    lines: Lines<R>,
    line: usize,
    header: Vec<String>,
}

impl<R: BufRead> Reader<R> {
    pub fn new(reader: R) -> Result<Self, TsvError> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => split(&line?),
            None => return Err(TsvError::MissingHeader),
        };
        Ok(Reader { lines, line: 1, header })
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }
}

fn split(line: &str) -> Vec<String> {
    line.trim_end_matches('\r').split('\t').map(unescape).collect()
}

impl<R: BufRead> Iterator for Reader<R> {
    type Item = Result<Row, TsvError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line += 1;
            if line.trim().is_empty() {
                continue;
            }
            return Some(Ok(Row { line: self.line, fields: split(&line) }));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_rows_with_line_numbers() {
        let text = "a\tb\n1\t2\n\nx\\ty\tz\n";
        let mut r = Reader::new(text.as_bytes()).unwrap();
        assert_eq!(r.header(), ["a", "b"]);
        assert_eq!(r.next().unwrap().unwrap(), Row { line: 2, fields: vec!["1".into(), "2".into()] });
        assert_eq!(r.next().unwrap().unwrap(), Row { line: 4, fields: vec!["x\ty".into(), "z".into()] });
        assert!(r.next().is_none());
    }

    #[test]
    fn empty_input_has_no_header() {
        assert!(matches!(Reader::new(&b""[..]), Err(TsvError::MissingHeader)));
    }

    proptest! {
        #[test]
        fn escape_round_trips(s in "\\PC*|[\\t\\n\\\\a]*") {
            prop_assert_eq!(unescape(&escape(&s)), s.clone());
            prop_assert!(!escape(&s).contains('\t'));
            prop_assert!(!escape(&s).contains('\n'));
        }
    }
}
