//! The query text format: a conjunctive `SELECT ... WHERE { ... }` block over
//! triple patterns, with optional `@prefix` declarations at the top.
//!
//! ```text
//! @prefix zoo: <http://example.org/zoo#> .
//! SELECT ?x ?y WHERE {
//!   ?x rdf:type ?y .
//!   ?y rdfs:subClassOf zoo:Species
//! }
//! ```
//!
//! Predicates may be `rdf:type`, `rdfs:subClassOf` (the `rdfs:SubClassOf`
//! spelling is accepted too), `rdfs:subPropertyOf`, `owl:disjointWith`, a
//! plain IRI, or a variable. Only basic graph patterns are supported.

use crate::model::{Query, QueryPred, QueryTerm, TriplePattern};
use crate::parse::{check_no_literal_syntax, ParseError, PrefixTable, Token};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const RDFS_SUBCLASSOF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
const RDFS_SUBPROPERTYOF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
const OWL_DISJOINTWITH: &str = "http://www.w3.org/2002/07/owl#disjointWith";

/// SPARQL keywords that signal a construct outside the supported fragment.
const UNSUPPORTED: &[&str] = &["OPTIONAL", "FILTER", "UNION", "MINUS", "GRAPH", "BIND", "SERVICE"];

pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut prefixes = PrefixTable::default();
    let mut tokens = Vec::new();
    let mut header = true;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with("@prefix") {
            if !header {
                return Err(ParseError::new(
                    lineno,
                    1,
                    "prefix declarations must appear before the query",
                ));
            }
            prefixes.add_declaration(line, lineno)?;
            continue;
        }
        if header && line.len() >= 7 && line[..6].eq_ignore_ascii_case("prefix") && line.as_bytes()[6].is_ascii_whitespace() {
            return Err(ParseError::new(
                lineno,
                1,
                "write prefix declarations as `@prefix name: <iri> .`",
            ));
        }
        header = false;
        check_no_literal_syntax(raw, lineno)?;
        tokenize_line(raw, lineno, &mut tokens)?;
    }
    let mut p = QueryParser { tokens: &tokens, pos: 0, prefixes: &prefixes };
    p.query()
}

/// `<...>` is atomic; `{` and `}` stand alone; `.` terminates a triple when
/// it is a lone token or trails a token (dots inside bare IRIs stay put).
fn tokenize_line(raw: &str, lineno: usize, out: &mut Vec<Token>) -> Result<(), ParseError> {
    let chars: Vec<char> = raw.chars().collect();
    let mut current = String::new();
    let mut start = 0usize;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => flush(&mut current, start, lineno, out),
            '{' | '}' => {
                flush(&mut current, start, lineno, out);
                out.push(Token { text: c.to_string(), line: lineno, column: i + 1 });
            }
            '<' => {
                flush(&mut current, start, lineno, out);
                let open = i;
                let mut iri = String::from("<");
                i += 1;
                while i < chars.len() && chars[i] != '>' {
                    iri.push(chars[i]);
                    i += 1;
                }
                if i == chars.len() {
                    return Err(ParseError::new(lineno, open + 1, "unterminated `<`"));
                }
                iri.push('>');
                out.push(Token { text: iri, line: lineno, column: open + 1 });
            }
            '.' => {
                let next = chars.get(i + 1);
                let terminator = current.is_empty()
                    || next.is_none()
                    || next.is_some_and(|n| n.is_whitespace() || *n == '}');
                if terminator {
                    flush(&mut current, start, lineno, out);
                    out.push(Token { text: ".".to_string(), line: lineno, column: i + 1 });
                } else {
                    if current.is_empty() {
                        start = i;
                    }
                    current.push('.');
                }
            }
            _ => {
                if current.is_empty() {
                    start = i;
                }
                current.push(c);
            }
        }
        i += 1;
    }
    flush(&mut current, start, lineno, out);
    Ok(())
}

fn flush(current: &mut String, start: usize, lineno: usize, out: &mut Vec<Token>) {
    if !current.is_empty() {
        out.push(Token { text: std::mem::take(current), line: lineno, column: start + 1 });
    }
}

struct QueryParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    prefixes: &'a PrefixTable,
}

impl<'a> QueryParser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        let tok = self.tokens.get(self.pos).ok_or_else(|| {
            let (line, col) = self
                .tokens
                .last()
                .map(|t| (t.line, t.column + t.text.len()))
                .unwrap_or((1, 1));
            ParseError::new(line, col, format!("expected {what}"))
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn query(&mut self) -> Result<Query, ParseError> {
        let select = self.next("SELECT")?;
        if !select.text.eq_ignore_ascii_case("SELECT") {
            return Err(select.err(format!("expected SELECT, found `{}`", select.text)));
        }

        let mut select_vars: Vec<(&'a Token, String)> = Vec::new();
        while let Some(tok) = self.peek() {
            if tok.text == "*" {
                return Err(tok.err("SELECT * is not supported: list the variables explicitly"));
            }
            if !tok.text.starts_with('?') {
                break;
            }
            self.pos += 1;
            select_vars.push((tok, var_name(tok)?));
        }
        if select_vars.is_empty() {
            return Err(select.err("expected at least one variable after SELECT"));
        }

        let wh = self.next("WHERE")?;
        if !wh.text.eq_ignore_ascii_case("WHERE") {
            return Err(wh.err(format!("expected WHERE, found `{}`", wh.text)));
        }
        let brace = self.next("`{`")?;
        if brace.text != "{" {
            return Err(brace.err(format!("expected `{{`, found `{}`", brace.text)));
        }

        let mut patterns = Vec::new();
        loop {
            let tok = self.next("a triple pattern or `}`")?;
            if tok.text == "}" {
                if patterns.is_empty() {
                    return Err(tok.err("WHERE block must contain at least one triple pattern"));
                }
                break;
            }
            // `FILTER(...)` arrives with the paren glued on, so compare the
            // leading identifier rather than the whole token.
            let ident: String = tok.text.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
            if let Some(kw) = UNSUPPORTED.iter().find(|k| ident.eq_ignore_ascii_case(k)) {
                return Err(tok.err(format!(
                    "{kw} is not supported: only basic graph patterns are allowed"
                )));
            }
            if tok.text == "{" {
                return Err(tok.err(
                    "nested graph patterns (UNION, grouping) are not supported: \
                     only a single basic graph pattern is allowed",
                ));
            }
            let subj = self.term_from(tok)?;
            let pred = self.predicate()?;
            let obj_tok = self.next("an IRI or variable")?;
            let obj = self.term_from(obj_tok)?;
            patterns.push(TriplePattern { subj, pred, obj });

            match self.peek() {
                Some(t) if t.text == "." => self.pos += 1,
                Some(t) if t.text == "}" => {}
                Some(t) => {
                    return Err(t.err(format!(
                        "expected `.` or `}}` after triple pattern, found `{}`",
                        t.text
                    )))
                }
                None => return Err(self.next("`.` or `}`").unwrap_err()),
            }
        }

        if let Some(extra) = self.peek() {
            return Err(extra.err(format!("unexpected `{}` after `}}`", extra.text)));
        }

        let body_vars: std::collections::HashSet<&str> = patterns
            .iter()
            .flat_map(|p| {
                let mut vs = Vec::new();
                if let QueryTerm::Var(v) = &p.subj {
                    vs.push(v.as_str());
                }
                if let QueryPred::Var(v) = &p.pred {
                    vs.push(v.as_str());
                }
                if let QueryTerm::Var(v) = &p.obj {
                    vs.push(v.as_str());
                }
                vs
            })
            .collect();
        for (tok, name) in &select_vars {
            if !body_vars.contains(name.as_str()) {
                return Err(tok.err(format!(
                    "selected variable ?{name} does not occur in the WHERE block"
                )));
            }
        }

        Query::new(select_vars.into_iter().map(|(_, v)| v).collect(), patterns)
            .map_err(|msg| select.err(msg))
    }

    fn term_from(&self, tok: &Token) -> Result<QueryTerm, ParseError> {
        if tok.text.starts_with('?') {
            return Ok(QueryTerm::Var(var_name(tok)?));
        }
        if matches!(tok.text.as_str(), "{" | "}" | ".") {
            return Err(tok.err(format!("expected an IRI or variable, found `{}`", tok.text)));
        }
        Ok(QueryTerm::Iri(crate::model::Iri::new(self.prefixes.expand(tok)?)))
    }

    fn predicate(&mut self) -> Result<QueryPred, ParseError> {
        let tok = self.next("a predicate")?;
        if tok.text.starts_with('?') {
            return Ok(QueryPred::Var(var_name(tok)?));
        }
        if matches!(tok.text.as_str(), "{" | "}" | ".") {
            return Err(tok.err(format!("expected a predicate, found `{}`", tok.text)));
        }
        // Conventional spellings win over prefix declarations.
        match tok.text.as_str() {
            "rdf:type" => return Ok(QueryPred::Type),
            "rdfs:subClassOf" | "rdfs:SubClassOf" => return Ok(QueryPred::SubClassOf),
            "rdfs:subPropertyOf" => return Ok(QueryPred::SubPropertyOf),
            "owl:disjointWith" => return Ok(QueryPred::DisjointWith),
            _ => {}
        }
        let expanded = self.prefixes.expand(tok)?;
        Ok(match expanded.as_str() {
            RDF_TYPE => QueryPred::Type,
            RDFS_SUBCLASSOF => QueryPred::SubClassOf,
            RDFS_SUBPROPERTYOF => QueryPred::SubPropertyOf,
            OWL_DISJOINTWITH => QueryPred::DisjointWith,
            _ => QueryPred::Iri(crate::model::Iri::new(expanded)),
        })
    }
}

fn var_name(tok: &Token) -> Result<String, ParseError> {
    let name = &tok.text[1..];
    if name.is_empty() {
        return Err(tok.err("variable name missing after `?`"));
    }
    if name.contains('?') {
        return Err(tok.err(format!("invalid variable name `{}`", tok.text)));
    }
    Ok(name.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Iri;

    fn var(v: &str) -> QueryTerm {
        QueryTerm::Var(v.to_string())
    }

    #[test]
    fn type_and_subclass_chain() {
        let q = parse_query(
            "SELECT ?x ?y ?z WHERE { ?x rdf:type ?y . ?y rdfs:SubClassOf ?z }",
        )
        .unwrap();
        assert_eq!(q.select_vars(), ["x", "y", "z"]);
        assert_eq!(
            q.patterns(),
            [
                TriplePattern { subj: var("x"), pred: QueryPred::Type, obj: var("y") },
                TriplePattern { subj: var("y"), pred: QueryPred::SubClassOf, obj: var("z") },
            ]
        );
    }

    #[test]
    fn lowercase_subclass_spelling() {
        let q = parse_query("SELECT ?a WHERE { ?a rdfs:subClassOf ?b . }").unwrap();
        assert_eq!(q.patterns()[0].pred, QueryPred::SubClassOf);
    }

    #[test]
    fn full_iri_keywords() {
        let q = parse_query(
            "SELECT ?x WHERE { ?x <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> ?y }",
        )
        .unwrap();
        assert_eq!(q.patterns()[0].pred, QueryPred::Type);
    }

    #[test]
    fn prefixed_terms_expand() {
        let q = parse_query(
            "@prefix zoo: <http://example.org/zoo#> .\nSELECT ?x WHERE { ?x rdf:type zoo:Eagle }",
        )
        .unwrap();
        assert_eq!(
            q.patterns()[0].obj,
            QueryTerm::Iri(Iri::new("http://example.org/zoo#Eagle"))
        );
    }

    #[test]
    fn plain_iri_and_variable_predicates() {
        let q = parse_query("SELECT ?x ?p WHERE { ?x teaches ?y . ?x ?p ?y }").unwrap();
        assert_eq!(q.patterns()[0].pred, QueryPred::Iri(Iri::new("teaches")));
        assert_eq!(q.patterns()[1].pred, QueryPred::Var("p".to_string()));
    }

    #[test]
    fn other_meta_predicates() {
        let q = parse_query(
            "SELECT ?r WHERE { ?r rdfs:subPropertyOf ?s . ?a owl:disjointWith ?b . ?r rdf:type ?a }",
        )
        .unwrap();
        assert_eq!(q.patterns()[0].pred, QueryPred::SubPropertyOf);
        assert_eq!(q.patterns()[1].pred, QueryPred::DisjointWith);
    }

    #[test]
    fn trailing_dot_is_optional() {
        let with = parse_query("SELECT ?x WHERE { ?x rdf:type Bird . }").unwrap();
        let without = parse_query("SELECT ?x WHERE { ?x rdf:type Bird }").unwrap();
        assert_eq!(with, without);
    }

    #[test]
    fn empty_where_is_rejected() {
        let err = parse_query("SELECT ?x WHERE { }").unwrap_err();
        assert!(err.message.contains("at least one triple pattern"), "{}", err.message);
    }

    #[test]
    fn unbound_select_var_is_rejected() {
        let err = parse_query("SELECT ?q WHERE { ?x rdf:type ?y }").unwrap_err();
        assert!(err.message.contains("?q"), "{}", err.message);
    }

    #[test]
    fn unsupported_constructs_are_named() {
        for (text, kw) in [
            ("SELECT ?x WHERE { ?x rdf:type ?y . OPTIONAL { ?x p ?z } }", "OPTIONAL"),
            ("SELECT ?x WHERE { ?x rdf:type ?y . FILTER(?x > 3) }", "FILTER"),
            ("SELECT ?x WHERE { { ?x rdf:type ?y } UNION { ?x p ?y } }", "UNION"),
            ("SELECT ?x WHERE { ?x rdf:type ?y . MINUS { ?x p ?y } }", "MINUS"),
        ] {
            let err = parse_query(text).unwrap_err();
            assert!(err.message.contains(kw), "{kw}: {}", err.message);
        }
    }

    #[test]
    fn literals_are_rejected() {
        let err = parse_query("SELECT ?x WHERE { ?x age \"42\" }").unwrap_err();
        assert!(err.message.contains("literal"), "{}", err.message);
    }

    #[test]
    fn misc_errors_have_positions() {
        let err = parse_query("SELECT WHERE { ?x rdf:type ?y }").unwrap_err();
        assert!(err.message.contains("variable after SELECT"), "{}", err.message);

        let err = parse_query("SELECT ?x WHERE { ?x rdf:type }").unwrap_err();
        assert_eq!(err.line, 1);

        let err = parse_query("SELECT ?x WHERE { ?x <http://unclosed ?y }").unwrap_err();
        assert!(err.message.contains("unterminated"), "{}", err.message);

        let err = parse_query("SELECT ?x WHERE { ?x rdf:type ?y }\n@prefix a: <b> .").unwrap_err();
        assert!(err.message.contains("before the query"), "{}", err.message);

        let err = parse_query("PREFIX zoo: <http://example.org/zoo#>\nSELECT ?x WHERE { ?x rdf:type ?y }")
            .unwrap_err();
        assert!(err.message.contains("@prefix"), "{}", err.message);
    }

    #[test]
    fn dots_inside_bare_iris_survive() {
        let q = parse_query("SELECT ?x WHERE { ?x rdf:type example.org/Bird }").unwrap();
        assert_eq!(
            q.patterns()[0].obj,
            QueryTerm::Iri(Iri::new("example.org/Bird"))
        );
    }
}
