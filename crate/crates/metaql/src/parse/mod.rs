//! Text formats: the line-oriented ontology format and the SPARQL SELECT
//! subset. Prefix declarations are resolved here; everything downstream sees
//! fully expanded IRIs only.

pub mod qlf;
pub mod sparql;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("parse error at {line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl fmt::Display) -> ParseError {
        ParseError { line: line.max(1), column: column.max(1), message: message.to_string() }
    }
}

/// A token with its 1-based source position.
#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub fn err(&self, message: impl fmt::Display) -> ParseError {
        ParseError::new(self.line, self.column, message)
    }
}

#[derive(Default, Clone)]
pub(crate) struct PrefixTable {
    map: HashMap<String, String>,
}

impl PrefixTable {
    /// Parses `@prefix name: <iri> .` and records the binding.
    pub fn add_declaration(&mut self, line: &str, lineno: usize) -> Result<(), ParseError> {
        let fail = |msg: &str| Err(ParseError::new(lineno, 1, msg));
        let rest = line.trim().strip_prefix("@prefix").unwrap_or_default().trim();
        let Some((name, rest)) = rest.split_once(':') else {
            return fail("malformed prefix declaration: expected `@prefix name: <iri> .`");
        };
        let name = name.trim();
        if name.contains(char::is_whitespace) {
            return fail("prefix name must not contain whitespace");
        }
        let rest = rest.trim();
        let Some(rest) = rest.strip_prefix('<') else {
            return fail("prefix declaration: expected `<` before the IRI");
        };
        let Some((iri, tail)) = rest.split_once('>') else {
            return fail("prefix declaration: missing closing `>`");
        };
        if iri.is_empty() || iri.contains(char::is_whitespace) {
            return fail("prefix declaration: invalid IRI");
        }
        if tail.trim() != "." {
            return fail("prefix declaration must end with `.`");
        }
        self.map.insert(name.to_string(), iri.to_string());
        Ok(())
    }

    /// Expands a token to a full IRI. Angle-bracketed tokens are unwrapped;
    /// `prefix:local` expands when the prefix is declared and passes through
    /// verbatim otherwise (it may be an absolute IRI with a scheme).
    pub fn expand(&self, tok: &Token) -> Result<String, ParseError> {
        let text = tok.text.as_str();
        if let Some(inner) = text.strip_prefix('<') {
            let Some(iri) = inner.strip_suffix('>') else {
                return Err(tok.err("missing closing `>` in IRI"));
            };
            if iri.is_empty() {
                return Err(tok.err("empty IRI"));
            }
            return Ok(iri.to_string());
        }
        if let Some((prefix, local)) = text.split_once(':') {
            if let Some(base) = self.map.get(prefix) {
                return Ok(format!("{base}{local}"));
            }
        }
        if text.is_empty() {
            return Err(tok.err("empty IRI"));
        }
        Ok(text.to_string())
    }
}

/// Rejects literal syntax up front: data properties, datatypes, and literals
/// are outside the supported fragment.
pub(crate) fn check_no_literal_syntax(line: &str, lineno: usize) -> Result<(), ParseError> {
    if let Some(pos) = line.find('"') {
        return Err(ParseError::new(
            lineno,
            pos + 1,
            "string literal found: data properties and literals are not supported",
        ));
    }
    if let Some(pos) = line.find("^^") {
        return Err(ParseError::new(
            lineno,
            pos + 1,
            "typed literal found: datatypes are not supported",
        ));
    }
    Ok(())
}
