//! Recursive-descent parsers for polynomial and branch literals.
//!
//! Polynomials: rational literals, `x`, `y`, bound parameters, `+ - * /`,
//! `^` with natural exponents, parentheses. Division is by constants only.
//!
//! Branches: sums of `c*y^(p/q)` where `c` is a rational, `sqrt(r)` or a
//! product of the two.

use std::collections::BTreeMap;

use germ_core::arith::rat::{self, Rat};
use germ_core::arith::{isolate_real_roots, BiPoly, Field, Num, UniPoly};
use germ_core::puiseux::{DemiBranch, FracSeries};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("at offset {pos}: {msg} (expected {expected})")]
pub struct ParseError {
    pub pos: usize,
    pub expected: String,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Sym(char),
    End,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let cs: Vec<(usize, char)> = s.char_indices().collect();
    let mut k = 0;
    while k < cs.len() {
        let (pos, c) = cs[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let mut t = String::new();
            while k < cs.len() && cs[k].1.is_ascii_digit() {
                t.push(cs[k].1);
                k += 1;
            }
            out.push((pos, Tok::Int(t)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut t = String::new();
            while k < cs.len() && (cs[k].1.is_ascii_alphanumeric() || cs[k].1 == '_') {
                t.push(cs[k].1);
                k += 1;
            }
            out.push((pos, Tok::Ident(t)));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Sym(c)));
            k += 1;
        } else if c == '\u{2212}' {
            out.push((pos, Tok::Sym('-')));
            k += 1;
        } else {
            return Err(ParseError { pos, expected: "a number, variable or operator".into(), msg: format!("unexpected '{c}'") });
        }
    }
    out.push((s.len(), Tok::End));
    Ok(out)
}

struct Cursor {
    toks: Vec<(usize, Tok)>,
    k: usize,
}

impl Cursor {
    fn peek(&self) -> &Tok {
        &self.toks[self.k].1
    }

    fn pos(&self) -> usize {
        self.toks[self.k].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.k].1.clone();
        if self.k + 1 < self.toks.len() {
            self.k += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err(&self, expected: &str, msg: impl Into<String>) -> ParseError {
        ParseError { pos: self.pos(), expected: expected.into(), msg: msg.into() }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("'{c}'"), format!("found {}", describe(self.peek()))))
        }
    }

    fn natural(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(s) => s
                .parse()
                .map_err(|_| ParseError { pos, expected: "a small natural exponent".into(), msg: format!("exponent {s} too large") }),
            Tok::Sym('-') => Err(ParseError { pos, expected: "a natural exponent".into(), msg: "non-natural exponent".into() }),
            t => Err(ParseError { pos, expected: "a natural exponent".into(), msg: format!("found {}", describe(&t)) }),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(s) => format!("number {s}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

/// Parsed germ with its source text.
#[derive(Clone, Debug)]
pub struct GermExpr {
    pub source: String,
    pub poly: BiPoly,
}

/// Parses a polynomial in `x`, `y` with named rational parameters.
pub fn parse_poly(text: &str, bindings: &BTreeMap<String, Rat>) -> Result<GermExpr, ParseError> {
    let mut c = Cursor { toks: lex(text)?, k: 0 };
    let poly = expr(&mut c, bindings)?;
    if c.peek() != &Tok::End {
        return Err(c.err("an operator or end of input", format!("found {}", describe(c.peek()))));
    }
    Ok(GermExpr { source: text.to_string(), poly })
}

fn expr(c: &mut Cursor, b: &BTreeMap<String, Rat>) -> Result<BiPoly, ParseError> {
    let mut acc = term(c, b)?;
    loop {
        if c.eat('+') {
            acc = acc.add(&term(c, b)?);
        } else if c.eat('-') {
            acc = acc.sub(&term(c, b)?);
        } else {
            return Ok(acc);
        }
    }
}

fn term(c: &mut Cursor, b: &BTreeMap<String, Rat>) -> Result<BiPoly, ParseError> {
    let mut acc = unary(c, b)?;
    loop {
        if c.eat('*') {
            acc = acc.mul(&unary(c, b)?);
        } else if c.peek() == &Tok::Sym('/') {
            c.bump();
            let pos = c.pos();
            let d = unary(c, b)?;
            let k = constant(&d).filter(|k| !k.is_zero()).ok_or(ParseError {
                pos,
                expected: "a nonzero constant divisor".into(),
                msg: "division by a non-constant or zero".into(),
            })?;
            acc = acc.scale(&k.recip());
        } else {
            return Ok(acc);
        }
    }
}

fn constant(p: &BiPoly) -> Option<Rat> {
    if p.is_zero() {
        return Some(Rat::zero());
    }
    match p.terms().iter().next() {
        Some((&(0, 0), v)) if p.terms().len() == 1 => Some(v.clone()),
        _ => None,
    }
}

fn unary(c: &mut Cursor, b: &BTreeMap<String, Rat>) -> Result<BiPoly, ParseError> {
    if c.eat('-') {
        return Ok(unary(c, b)?.scale(&rat::int(-1)));
    }
    if c.eat('+') {
        return unary(c, b);
    }
    power(c, b)
}

fn power(c: &mut Cursor, b: &BTreeMap<String, Rat>) -> Result<BiPoly, ParseError> {
    let base = atom(c, b)?;
    if c.eat('^') {
        let n = if c.eat('(') {
            let n = c.natural()?;
            if c.peek() == &Tok::Sym('/') {
                return Err(c.err("a natural exponent", "non-natural exponent"));
            }
            c.expect(')')?;
            n
        } else {
            c.natural()?
        };
        return Ok(base.pow(n));
    }
    Ok(base)
}

fn atom(c: &mut Cursor, b: &BTreeMap<String, Rat>) -> Result<BiPoly, ParseError> {
    let pos = c.pos();
    match c.bump() {
        Tok::Int(s) => Ok(BiPoly::monomial(Rat::from_integer(s.parse().unwrap()), 0, 0)),
        Tok::Ident(s) if s == "x" => Ok(BiPoly::x()),
        Tok::Ident(s) if s == "y" => Ok(BiPoly::y()),
        Tok::Ident(s) => match b.get(&s) {
            Some(v) => Ok(BiPoly::monomial(v.clone(), 0, 0)),
            None => Err(ParseError { pos, expected: "x, y or a bound parameter".into(), msg: format!("unbound parameter '{s}'") }),
        },
        Tok::Sym('(') => {
            let e = expr(c, b)?;
            c.expect(')')?;
            Ok(e)
        }
        t => Err(ParseError { pos, expected: "a number, variable or '('".into(), msg: format!("found {}", describe(&t)) }),
    }
}

/// Parses `name=p/q`.
pub fn parse_binding(s: &str) -> Result<(String, Rat), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let k = k.trim();
    if k.is_empty() || k == "x" || k == "y" || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(format!("bad parameter name '{k}'"));
    }
    let v = rat::parse_rat(v).ok_or_else(|| format!("bad rational '{v}'"))?;
    Ok((k.to_string(), v))
}

/// Parses a branch `x = λ(y)`; `0` is the axis.
pub fn parse_branch(text: &str) -> Result<DemiBranch, ParseError> {
    let mut c = Cursor { toks: lex(text)?, k: 0 };
    let mut terms: BTreeMap<Rat, Num> = BTreeMap::new();
    let mut first = true;
    loop {
        let sign = if c.eat('-') {
            -1
        } else if c.eat('+') || first {
            1
        } else if c.peek() == &Tok::End {
            break;
        } else {
            return Err(c.err("'+', '-' or end of input", format!("found {}", describe(c.peek()))));
        };
        first = false;
        let (coef, e) = branch_term(&mut c)?;
        let coef = coef.mul(&Num::int(sign));
        let slot = terms.entry(e).or_insert_with(Num::zero_elem);
        *slot = slot.add(&coef);
    }
    let terms: Vec<(Rat, Num)> = terms.into_iter().filter(|(_, v)| !v.vanishes()).collect();
    if terms.iter().any(|(e, _)| e < &Rat::one()) {
        return Err(ParseError { pos: 0, expected: "exponents at least 1".into(), msg: "branch is tangent to the x-axis".into() });
    }
    Ok(DemiBranch::new(FracSeries::exact(terms)))
}

/// Factors `rational`, `sqrt(r)` joined by `*`, optionally ending in `y^e`.
fn branch_term(c: &mut Cursor) -> Result<(Num, Rat), ParseError> {
    let mut coef = Num::int(1);
    loop {
        match c.peek().clone() {
            Tok::Int(_) => coef = coef.mul(&Num::Q(rational(c)?)),
            Tok::Ident(s) if s == "sqrt" => {
                c.bump();
                c.expect('(')?;
                let pos = c.pos();
                let r = rational(c)?;
                c.expect(')')?;
                let root = sqrt(&r).ok_or(ParseError { pos, expected: "a nonnegative rational".into(), msg: "negative radicand".into() })?;
                coef = coef.mul(&root);
            }
            Tok::Ident(s) if s == "y" => {
                c.bump();
                let e = if !c.eat('^') {
                    Rat::one()
                } else if c.eat('(') {
                    let e = rational(c)?;
                    c.expect(')')?;
                    e
                } else {
                    rat::int(c.natural()? as i64)
                };
                return Ok((coef, e));
            }
            t => return Err(c.err("a coefficient, sqrt(r) or y", format!("found {}", describe(&t)))),
        }
        if !c.eat('*') {
            return Ok((coef, Rat::zero()));
        }
    }
}

fn rational(c: &mut Cursor) -> Result<Rat, ParseError> {
    let pos = c.pos();
    let n = match c.bump() {
        Tok::Int(s) => Rat::from_integer(s.parse().unwrap()),
        t => return Err(ParseError { pos, expected: "a rational".into(), msg: format!("found {}", describe(&t)) }),
    };
    if c.peek() == &Tok::Sym('/') && matches!(c.toks.get(c.k + 1).map(|t| &t.1), Some(Tok::Int(_))) {
        c.bump();
        let pos = c.pos();
        if let Tok::Int(s) = c.bump() {
            let d: Rat = Rat::from_integer(s.parse().unwrap());
            if d.is_zero() {
                return Err(ParseError { pos, expected: "a nonzero denominator".into(), msg: "division by zero".into() });
            }
            return Ok(n / d);
        }
    }
    Ok(n)
}

/// Positive square root as an exact real algebraic number.
fn sqrt(r: &Rat) -> Option<Num> {
    if r.is_negative() {
        return None;
    }
    let p = UniPoly::new(vec![-r.clone(), Rat::zero(), Rat::one()]);
    isolate_real_roots(&p).ok()?.into_iter().map(|(v, _)| v).find(|v| v.sign() >= 0)
}
