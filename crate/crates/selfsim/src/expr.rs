//! Expression syntax for algebra elements, plus path literals.
//!
//! Grammar (whitespace insignificant, offsets are byte offsets):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := [scalar '*'] factor ('*' factor)*
//! factor := 's' '(' edgeid (',' edgeid)* ')'
//!         | 'p' '(' vertexid ')'
//!         | factor '^*'
//!         | '(' expr ')'
//! scalar := rational 'i'? [('+'|'-') rational 'i']
//! ```
//!
//! Two conveniences extend the core grammar so that every printable element
//! reparses: an optional sign before the first term (the printer folds a
//! negative leading coefficient into it), a bare `rational 'i'` scalar for
//! purely imaginary coefficients, and the literal `0` for the zero element.
//!
//! `s(e1,e2)` denotes `s_{e1 e2}` and requires the edge list to compose;
//! `p(v)` is the vertex projection. Postfix `^*` is the adjoint.

use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::graph::{Graph, Path};
use crate::scalar::{format_scalar, sc_complex, Scalar};

const MAX_NESTING: usize = 200;

struct Parser<'a> {
    graph: &'a Arc<Graph>,
    bytes: &'a [u8],
    pos: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8, what: &str) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(syntax(self.pos, format!("expected {what}")))
        }
    }

    fn parse_ident(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        let is_head = |b: u8| b.is_ascii_alphabetic() || b == b'_';
        let is_body = |b: u8| b.is_ascii_alphanumeric() || b == b'_';
        match self.peek() {
            Some(b) if is_head(b) => {}
            _ => return Err(syntax(self.pos, "expected an identifier")),
        }
        while let Some(b) = self.peek() {
            if is_body(b) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii identifier")
            .to_string();
        Ok((text, start))
    }

    /// `digits ['/' digits]`, nonnegative; signs live outside the token.
    fn parse_rational(&mut self) -> Result<BigRational> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(syntax(start, "expected digits"));
        }
        let numer = BigInt::parse_bytes(&self.bytes[start..self.pos], 10)
            .ok_or_else(|| syntax(start, "invalid number"))?;
        if !self.eat(b'/') {
            return Ok(BigRational::from_integer(numer));
        }
        let dstart = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == dstart {
            return Err(syntax(dstart, "expected digits after `/`"));
        }
        let denom = BigInt::parse_bytes(&self.bytes[dstart..self.pos], 10)
            .ok_or_else(|| syntax(dstart, "invalid number"))?;
        if denom.is_zero() {
            return Err(syntax(dstart, "zero denominator"));
        }
        Ok(BigRational::new(numer, denom))
    }

    /// Attempts `scalar '*'`; rewinds fully and returns None when the text
    /// is not a scalar prefix, so a factor parse can take over.
    fn parse_scalar_star(&mut self) -> Option<Scalar> {
        self.skip_ws();
        let save = self.pos;
        if !self.peek().is_some_and(|b| b.is_ascii_digit()) {
            return None;
        }
        let Ok(first) = self.parse_rational() else {
            self.pos = save;
            return None;
        };
        let mut value = if self.eat(b'i') {
            sc_complex(BigRational::zero(), first)
        } else {
            sc_complex(first, BigRational::zero())
        };
        if value.im.is_zero() {
            let mark = self.pos;
            let sign = match self.peek() {
                Some(b'+') => Some(false),
                Some(b'-') => Some(true),
                _ => None,
            };
            if let Some(negative) = sign {
                self.pos += 1;
                let mut done = false;
                if self.peek().is_some_and(|b| b.is_ascii_digit()) {
                    if let Ok(im) = self.parse_rational() {
                        if self.eat(b'i') {
                            let im = if negative { -im } else { im };
                            value = sc_complex(value.re.clone(), im);
                            done = true;
                        }
                    }
                }
                if !done {
                    self.pos = mark;
                }
            }
        }
        self.skip_ws();
        if self.eat(b'*') {
            Some(value)
        } else {
            self.pos = save;
            None
        }
    }

    fn parse_generator_s(&mut self) -> Result<AlgebraElement> {
        self.skip_ws();
        self.expect(b'(', "`(` after `s`")?;
        let (first, first_off) = self.parse_ident()?;
        let e = self
            .graph
            .edge(&first)
            .map_err(|_| syntax(first_off, format!("unknown edge id `{first}`")))?;
        let mut path = Path::single(e, self.graph);
        loop {
            self.skip_ws();
            if self.eat(b',') {
                let (id, off) = self.parse_ident()?;
                let e = self
                    .graph
                    .edge(&id)
                    .map_err(|_| syntax(off, format!("unknown edge id `{id}`")))?;
                path = path.extend(e, self.graph).map_err(|_| {
                    syntax(off, format!("edge `{id}` does not follow: its range differs from the path source"))
                })?;
            } else {
                self.expect(b')', "`,` or `)`")?;
                break;
            }
        }
        let nu = Path::vertex(path.source());
        AlgebraElement::monomial(self.graph.clone(), path, nu)
    }

    fn parse_projection_p(&mut self) -> Result<AlgebraElement> {
        self.skip_ws();
        self.expect(b'(', "`(` after `p`")?;
        let (id, off) = self.parse_ident()?;
        let v = self
            .graph
            .vertex(&id)
            .map_err(|_| syntax(off, format!("unknown vertex id `{id}`")))?;
        self.skip_ws();
        self.expect(b')', "`)`")?;
        AlgebraElement::p(self.graph.clone(), v)
    }

    fn parse_factor(&mut self, depth: usize) -> Result<AlgebraElement> {
        self.skip_ws();
        let mut base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr(depth + 1)?;
                self.skip_ws();
                self.expect(b')', "`)`")?;
                inner
            }
            Some(b's') => {
                self.pos += 1;
                self.parse_generator_s()?
            }
            Some(b'p') => {
                self.pos += 1;
                self.parse_projection_p()?
            }
            _ => return Err(syntax(self.pos, "expected `s(`, `p(` or `(`")),
        };
        loop {
            self.skip_ws();
            if self.eat(b'^') {
                self.expect(b'*', "`*` after `^`")?;
                base = base.adjoint();
            } else {
                break;
            }
        }
        Ok(base)
    }

    fn parse_term(&mut self, depth: usize) -> Result<AlgebraElement> {
        let scalar = self.parse_scalar_star();
        let mut acc = self.parse_factor(depth)?;
        loop {
            self.skip_ws();
            let save = self.pos;
            if self.eat(b'*') {
                // `*` might open another factor; scalars cannot appear here.
                match self.parse_factor(depth) {
                    Ok(f) => acc = acc.multiply(&f)?,
                    Err(e) => {
                        self.pos = save;
                        return Err(e);
                    }
                }
            } else {
                break;
            }
        }
        Ok(match scalar {
            Some(c) => acc.scale(&c),
            None => acc,
        })
    }

    fn parse_expr(&mut self, depth: usize) -> Result<AlgebraElement> {
        if depth > MAX_NESTING {
            return Err(syntax(self.pos, "expression nests too deeply"));
        }
        self.skip_ws();
        let negate = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let first = self.parse_term(depth)?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.parse_term(depth)?;
                    acc = acc.add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.parse_term(depth)?;
                    acc = acc.sub(&t)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }
}

/// Parses an expression over `graph`. Syntax errors carry byte offsets.
pub fn parse(graph: &Arc<Graph>, text: &str) -> Result<AlgebraElement> {
    graph.require_valid()?;
    let mut p = Parser { graph, bytes: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.peek().is_none() {
        return Err(syntax(p.pos, "empty expression"));
    }
    // The zero element has no grammatical term; accept the bare literal.
    if p.peek() == Some(b'0') {
        let save = p.pos;
        p.pos += 1;
        p.skip_ws();
        if p.peek().is_none() {
            return Ok(AlgebraElement::zero(graph.clone()));
        }
        p.pos = save;
    }
    let x = p.parse_expr(0)?;
    p.skip_ws();
    if p.peek().is_some() {
        return Err(syntax(p.pos, "unexpected trailing input"));
    }
    Ok(x)
}

fn format_monomial(g: &Graph, mu: &Path, nu: &Path) -> String {
    let s_of = |p: &Path| {
        let ids: Vec<&str> = p.edges().iter().map(|&e| g.edge_name(e)).collect();
        format!("s({})", ids.join(","))
    };
    match (mu.is_empty(), nu.is_empty()) {
        (true, true) => format!("p({})", g.vertex_name(mu.range())),
        (false, true) => s_of(mu),
        (true, false) => format!("{}^*", s_of(nu)),
        (false, false) => format!("{}*{}^*", s_of(mu), s_of(nu)),
    }
}

/// Prints an element in canonical term order; output reparses to an element
/// with identical terms.
pub fn print(x: &AlgebraElement) -> String {
    if x.terms().is_empty() {
        return "0".to_string();
    }
    let g = x.graph();
    let mut out = String::new();
    for (i, (m, c)) in x.terms().iter().enumerate() {
        let negative = c.re.is_negative() || (c.re.is_zero() && c.im.is_negative());
        let shown = if negative { -c.clone() } else { c.clone() };
        if i == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let body = format_monomial(g, &m.mu, &m.nu);
        if shown.re.is_one() && shown.im.is_zero() {
            out.push_str(&body);
        } else {
            out.push_str(&format_scalar(&shown));
            out.push('*');
            out.push_str(&body);
        }
    }
    out
}

/// Parses a whitespace-separated path literal: edge ids forming a path, or a
/// single vertex id for the empty path.
pub fn parse_path_literal(graph: &Graph, text: &str) -> Result<Path> {
    let mut tokens = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        tokens.push((
            std::str::from_utf8(&bytes[start..i])
                .map_err(|_| syntax(start, "path literals must be ASCII"))?
                .to_string(),
            start,
        ));
    }
    if tokens.is_empty() {
        return Err(syntax(0, "empty path literal"));
    }
    if tokens.len() == 1 {
        if let Ok(v) = graph.vertex(&tokens[0].0) {
            return Ok(Path::vertex(v));
        }
    }
    let (first, first_off) = &tokens[0];
    let e = graph
        .edge(first)
        .map_err(|_| syntax(*first_off, format!("unknown edge id `{first}`")))?;
    let mut path = Path::single(e, graph);
    for (id, off) in &tokens[1..] {
        let e = graph
            .edge(id)
            .map_err(|_| syntax(*off, format!("unknown edge id `{id}`")))?;
        path = path.extend(e, graph).map_err(|_| {
            syntax(*off, format!("edge `{id}` does not follow: its range differs from the path source"))
        })?;
    }
    Ok(path)
}
