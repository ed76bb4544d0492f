//! The ontology text format: one axiom per line, `#` comment lines, a
//! terminating `.` per axiom, optional `@prefix` declarations at the top.
//!
//! ```text
//! @prefix zoo: <http://example.org/zoo#> .
//! # subsumption and assertions
//! zoo:Eagle isa zoo:Bird .
//! GoldenEagle(Harry) .
//! exists teaches- isa Course .
//! FullProfessor disjoint AssociateProfessor .
//! worksFor isarole affiliatedWith .
//! refl(knows) .
//! Harry != Sally .
//! ```

use crate::model::{Axiom, BasicConcept, Iri, Ontology, RhsConcept, RoleExpr};
use crate::parse::{check_no_literal_syntax, ParseError, PrefixTable, Token};

pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    let mut prefixes = PrefixTable::default();
    let mut axioms = Vec::new();
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
                    "prefix declarations must appear before the first axiom",
                ));
            }
            prefixes.add_declaration(line, lineno)?;
            continue;
        }
        header = false;
        check_no_literal_syntax(raw, lineno)?;
        axioms.push(parse_axiom_line(raw, lineno, &prefixes)?);
    }
    Ok(Ontology::from_axioms(axioms))
}

fn parse_axiom_line(raw: &str, lineno: usize, prefixes: &PrefixTable) -> Result<Axiom, ParseError> {
    let trimmed = raw.trim_end();
    let Some(body) = trimmed.strip_suffix('.') else {
        return Err(ParseError::new(lineno, trimmed.len().max(1), "axiom must end with `.`"));
    };
    let tokens = tokenize(body, lineno);
    let mut p = Parser { tokens: &tokens, pos: 0, lineno, prefixes, raw_len: raw.len() };
    let axiom = p.axiom()?;
    p.expect_end()?;
    Ok(axiom)
}

/// Splits a line into tokens. `(`, `)`, `,`, and `!=` always stand alone; a
/// lone `.` (the qualified-existential separator) is its own token; anything
/// else, IRIs with embedded dots included, stays glued.
fn tokenize(body: &str, lineno: usize) -> Vec<Token> {
    fn push(tokens: &mut Vec<Token>, text: &mut String, start: usize, lineno: usize) {
        if !text.is_empty() {
            tokens.push(Token { text: std::mem::take(text), line: lineno, column: start + 1 });
        }
    }
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0usize;
    let chars: Vec<char> = body.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => push(&mut tokens, &mut current, start, lineno),
            '(' | ')' | ',' => {
                push(&mut tokens, &mut current, start, lineno);
                tokens.push(Token { text: c.to_string(), line: lineno, column: i + 1 });
            }
            '!' if chars.get(i + 1) == Some(&'=') => {
                push(&mut tokens, &mut current, start, lineno);
                tokens.push(Token { text: "!=".to_string(), line: lineno, column: i + 1 });
                i += 1;
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
    push(&mut tokens, &mut current, start, lineno);
    tokens
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    lineno: usize,
    prefixes: &'a PrefixTable,
    raw_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<&'a Token, ParseError> {
        let tok = self.tokens.get(self.pos).ok_or_else(|| {
            ParseError::new(self.lineno, self.raw_len.max(1), format!("expected {what}"))
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, text: &str) -> Result<(), ParseError> {
        let tok = self.next(&format!("`{text}`"))?;
        if tok.text != text {
            return Err(tok.err(format!("expected `{text}`, found `{}`", tok.text)));
        }
        Ok(())
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(tok) => Err(tok.err(format!("unexpected `{}` after axiom", tok.text))),
        }
    }

    fn iri(&mut self, what: &str) -> Result<Iri, ParseError> {
        let tok = self.next(what)?;
        if matches!(tok.text.as_str(), "(" | ")" | "," | "!=" | ".") {
            return Err(tok.err(format!("expected {what}, found `{}`", tok.text)));
        }
        Ok(Iri::new(self.prefixes.expand(tok)?))
    }

    /// A role with an optional trailing `-` inverse marker.
    fn role_expr(&mut self) -> Result<RoleExpr, ParseError> {
        let tok = self.next("role")?;
        let (text, inverse) = match tok.text.strip_suffix('-') {
            Some(base) if !base.is_empty() => (base, true),
            _ => (tok.text.as_str(), false),
        };
        let stripped = Token { text: text.to_string(), line: tok.line, column: tok.column };
        Ok(RoleExpr { name: Iri::new(self.prefixes.expand(&stripped)?), inverse })
    }

    fn axiom(&mut self) -> Result<Axiom, ParseError> {
        let first = self.peek().ok_or_else(|| {
            ParseError::new(self.lineno, 1, "empty axiom before `.`")
        })?;

        // refl(r) / irrefl(r) keyword forms.
        if (first.text == "refl" || first.text == "irrefl")
            && self.tokens.get(self.pos + 1).map(|t| t.text.as_str()) == Some("(")
        {
            let kw = self.next("keyword")?.text.clone();
            self.expect("(")?;
            let role = self.iri("role")?;
            self.expect(")")?;
            return Ok(if kw == "refl" { Axiom::Refl(role) } else { Axiom::Irrefl(role) });
        }

        // C(x), r(x,y): assertion forms.
        if self.tokens.get(self.pos + 1).map(|t| t.text.as_str()) == Some("(") {
            let pred = self.iri("class or role")?;
            self.expect("(")?;
            let first_arg = self.iri("individual")?;
            let tok = self.next("`,` or `)`")?;
            return match tok.text.as_str() {
                ")" => Ok(Axiom::ClassAssert(pred, first_arg)),
                "," => {
                    let second = self.iri("individual")?;
                    self.expect(")")?;
                    Ok(Axiom::RoleAssert(pred, first_arg, second))
                }
                other => Err(tok.err(format!("expected `,` or `)`, found `{other}`"))),
            };
        }

        // x != y.
        if self.tokens.get(self.pos + 1).map(|t| t.text.as_str()) == Some("!=") {
            let a = self.iri("individual")?;
            self.expect("!=")?;
            let b = self.iri("individual")?;
            return Ok(Axiom::Diff(a, b));
        }

        // Concept or role axiom: lhs keyword rhs.
        let lhs_exists = first.text == "exists";
        let lhs = if lhs_exists {
            self.next("`exists`")?;
            Lhs::Exists(self.role_expr()?)
        } else {
            Lhs::Plain(self.iri("class or role")?)
        };
        let kw = self.next("axiom keyword")?;
        match kw.text.as_str() {
            "isa" => Ok(Axiom::Incl(lhs.into_basic(), self.rhs_concept()?)),
            "disjoint" => Ok(Axiom::Disj(lhs.into_basic(), self.basic_concept()?)),
            "isarole" | "disjointrole" => {
                let Lhs::Plain(role) = lhs else {
                    return Err(kw.err(format!(
                        "`{}` takes a plain role on the left, not an `exists` concept",
                        kw.text
                    )));
                };
                let rhs = self.role_expr()?;
                Ok(if kw.text == "isarole" {
                    Axiom::RoleIncl(role, rhs)
                } else {
                    Axiom::RoleDisj(role, rhs)
                })
            }
            other => Err(kw.err(format!(
                "expected `isa`, `disjoint`, `isarole`, or `disjointrole`, found `{other}`"
            ))),
        }
    }

    fn basic_concept(&mut self) -> Result<BasicConcept, ParseError> {
        if self.peek().map(|t| t.text.as_str()) == Some("exists") {
            self.next("`exists`")?;
            Ok(BasicConcept::ExistsRole(self.role_expr()?))
        } else {
            Ok(BasicConcept::NamedClass(self.iri("class")?))
        }
    }

    /// `IRI`, `exists roleX`, or `exists roleX . IRI`.
    fn rhs_concept(&mut self) -> Result<RhsConcept, ParseError> {
        if self.peek().map(|t| t.text.as_str()) != Some("exists") {
            return Ok(RhsConcept::NamedClass(self.iri("class")?));
        }
        self.next("`exists`")?;
        let role = self.role_expr()?;
        if self.peek().map(|t| t.text.as_str()) == Some(".") {
            self.next("`.`")?;
            let filler = self.iri("filler class")?;
            Ok(RhsConcept::QualifiedExists(role, filler))
        } else {
            Ok(RhsConcept::unqualified_exists(role))
        }
    }
}

enum Lhs {
    Plain(Iri),
    Exists(RoleExpr),
}

impl Lhs {
    fn into_basic(self) -> BasicConcept {
        match self {
            Lhs::Plain(c) => BasicConcept::NamedClass(c),
            Lhs::Exists(re) => BasicConcept::ExistsRole(re),
        }
    }
}

/// Canonical text form; `parse_ontology(print_ontology(o))` reconstructs `o`.
pub fn print_ontology(o: &Ontology) -> String {
    let mut out = String::new();
    for a in o.axioms() {
        print_axiom(&mut out, a);
        out.push_str(" .\n");
    }
    out
}

fn print_axiom(out: &mut String, a: &Axiom) {
    let iri = |out: &mut String, i: &Iri| {
        let s = i.as_str();
        let needs_brackets = s.contains(['(', ')', ',', '!'])
            || s.ends_with('.')
            || s.ends_with('-')
            || s.starts_with('#')
            || s.starts_with('@')
            || s.starts_with('<');
        if needs_brackets {
            out.push('<');
            out.push_str(s);
            out.push('>');
        } else {
            out.push_str(s);
        }
    };
    let role = |out: &mut String, re: &RoleExpr| {
        iri(out, &re.name);
        if re.inverse {
            out.push('-');
        }
    };
    let basic = |out: &mut String, b: &BasicConcept| match b {
        BasicConcept::NamedClass(c) => iri(out, c),
        BasicConcept::ExistsRole(re) => {
            out.push_str("exists ");
            role(out, re);
        }
    };
    match a {
        Axiom::Incl(lhs, rhs) => {
            basic(out, lhs);
            out.push_str(" isa ");
            match rhs {
                RhsConcept::NamedClass(c) => iri(out, c),
                RhsConcept::QualifiedExists(re, filler) => {
                    out.push_str("exists ");
                    role(out, re);
                    if !filler.is_thing() {
                        out.push_str(" . ");
                        iri(out, filler);
                    }
                }
            }
        }
        Axiom::Disj(lhs, rhs) => {
            basic(out, lhs);
            out.push_str(" disjoint ");
            basic(out, rhs);
        }
        Axiom::RoleIncl(r1, r2) => {
            iri(out, r1);
            out.push_str(" isarole ");
            role(out, r2);
        }
        Axiom::RoleDisj(r1, r2) => {
            iri(out, r1);
            out.push_str(" disjointrole ");
            role(out, r2);
        }
        Axiom::Refl(r) => {
            out.push_str("refl(");
            iri(out, r);
            out.push(')');
        }
        Axiom::Irrefl(r) => {
            out.push_str("irrefl(");
            iri(out, r);
            out.push(')');
        }
        Axiom::ClassAssert(c, x) => {
            iri(out, c);
            out.push('(');
            iri(out, x);
            out.push(')');
        }
        Axiom::RoleAssert(r, x, y) => {
            iri(out, r);
            out.push('(');
            iri(out, x);
            out.push(',');
            iri(out, y);
            out.push(')');
        }
        Axiom::Diff(a, b) => {
            iri(out, a);
            out.push_str(" != ");
            iri(out, b);
        }
    }
}
