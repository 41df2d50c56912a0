//! Expression grammar and the system, component and point file formats.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' INT)?
//! atom   := INT | 't' | NAME deriv? | '(' expr ')'
//! deriv  := "'" | "''" | "'''" | '^(' INT ')'
//! ```
//!
//! Division is only allowed by nonzero constants. In `Q(t)` the name `t`
//! denotes the field generator and cannot be differentiated syntactically.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::decompose::CharSetComponent;
use crate::diffpoly::{DerVar, DiffPoly, Ring};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldTag};
use crate::point::DiffPoint;
use crate::ranking::{Ranking, RankingKind};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a Arc<Ring>,
}

fn perr<T>(pos: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        pos,
        msg: msg.into(),
    })
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.src[start..self.pos]).ok()?.parse().ok()
    }

    fn small_int(&mut self, what: &str) -> Result<u32> {
        let pos = self.pos;
        match self.integer().and_then(|n| u32::try_from(n).ok()) {
            Some(n) => Ok(n),
            None => perr(pos, format!("expected {what}")),
        }
    }

    fn expr(&mut self) -> Result<DiffPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(b'/') {
                let pos = self.pos;
                self.pos += 1;
                let d = self.unary()?;
                let c = match d.as_constant() {
                    Some(c) => c,
                    None => return perr(pos, "division by a non-constant"),
                };
                let inv = match c.inv() {
                    Ok(i) => i,
                    Err(_) => return perr(pos, "division by zero"),
                };
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<DiffPoly> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<DiffPoly> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.small_int("an exponent")?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffPoly> {
        let pos = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => perr(pos, "unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return perr(self.pos, "expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer().expect("digit present");
                let c = FieldElement::from_rational(self.ring.field(), BigRational::from_integer(n));
                Ok(DiffPoly::constant(self.ring, c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let order = self.deriv_suffix()?;
                if name == "t" && self.ring.field() == FieldTag::RationalFunctionsInT {
                    if order.is_some() {
                        return perr(start, "cannot differentiate `t`; it is a coefficient");
                    }
                    return Ok(DiffPoly::constant(self.ring, FieldElement::t()));
                }
                let var = self
                    .ring
                    .var_index(name)
                    .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                let order = order.unwrap_or(0);
                if order > self.ring.order_cap() {
                    return Err(Error::OrderCapExceeded {
                        order,
                        cap: self.ring.order_cap(),
                    });
                }
                Ok(DiffPoly::var(self.ring, DerVar::new(var, order)))
            }
            Some(c) => perr(pos, format!("unexpected character `{}`", c as char)),
        }
    }

    /// Primes or `^(k)` directly after a name (no whitespace allowed).
    fn deriv_suffix(&mut self) -> Result<Option<u32>> {
        let start = self.pos;
        let mut primes = 0;
        while self.src.get(self.pos) == Some(&b'\'') {
            primes += 1;
            self.pos += 1;
        }
        if primes > 3 {
            return perr(start, "more than three primes; use ^(k)");
        }
        if primes > 0 {
            return Ok(Some(primes));
        }
        if self.src.get(self.pos) == Some(&b'^') && self.src.get(self.pos + 1) == Some(&b'(') {
            self.pos += 2;
            let k = self.small_int("a derivative order")?;
            if !self.eat(b')') {
                return perr(self.pos, "expected `)`");
            }
            return Ok(Some(k));
        }
        Ok(None)
    }
}

/// Parses a differential polynomial in the given ring.
pub fn parse_poly(src: &str, ring: &Arc<Ring>) -> Result<DiffPoly> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        ring,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return perr(p.pos, "unexpected trailing input");
    }
    Ok(e)
}

/// Parses a coefficient: integers, `a/b`, and rational expressions in `t`.
pub fn parse_field_element(src: &str, field: FieldTag) -> Result<FieldElement> {
    let ring = Ring::new(field, Vec::<String>::new());
    let p = parse_poly(src, &ring)?;
    Ok(p.as_constant().expect("no variables in an empty ring"))
}

pub fn parse_field_tag(src: &str) -> Result<FieldTag> {
    match src.trim() {
        "Q" | "QQ" => Ok(FieldTag::Rationals),
        "Q(t)" | "QQ(t)" => Ok(FieldTag::RationalFunctionsInT),
        other => perr(0, format!("unknown field `{other}`")),
    }
}

/// `elim x > y`, `orderly x < y`; `>` lists highest first, `<` lowest first.
pub fn parse_ranking(src: &str, ring: &Ring) -> Result<Ranking> {
    let src = src.trim();
    let (kind, rest) = if let Some(r) = src.strip_prefix("elim") {
        (RankingKind::Elimination, r)
    } else if let Some(r) = src.strip_prefix("orderly") {
        (RankingKind::Orderly, r)
    } else {
        return Err(Error::InvalidRanking(format!("expected `elim` or `orderly`: `{src}`")));
    };
    let has_gt = rest.contains('>');
    let has_lt = rest.contains('<');
    if has_gt && has_lt {
        return Err(Error::InvalidRanking("mixed `<` and `>`".into()));
    }
    let sep = if has_lt { '<' } else { '>' };
    let mut order = Vec::new();
    for name in rest.split(sep).map(str::trim) {
        let v = ring
            .var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        order.push(v);
    }
    if has_lt {
        order.reverse();
    }
    if order.len() != ring.nvars() {
        return Err(Error::InvalidRanking(format!(
            "ranking lists {} of {} variables",
            order.len(),
            ring.nvars()
        )));
    }
    Ranking::new(kind, &order)
}

/// Parsed system file.
#[derive(Clone, Debug)]
pub struct SystemFile {
    pub ring: Arc<Ring>,
    pub ranking: Ranking,
    pub equations: Vec<(String, DiffPoly)>,
    pub points: Vec<(String, DiffPoint)>,
    pub components: Vec<CharSetComponent>,
}

impl SystemFile {
    pub fn polys(&self) -> Vec<DiffPoly> {
        self.equations.iter().map(|(_, p)| p.clone()).collect()
    }
}

fn ferr<T>(line: usize, e: impl std::fmt::Display) -> Result<T> {
    Err(Error::Format {
        line,
        msg: e.to_string(),
    })
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_point_assignments(src: &str, ring: &Arc<Ring>) -> Result<DiffPoint> {
    let mut values = BTreeMap::new();
    for item in split_list(src) {
        let (name, val) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidPoint(format!("expected `name = value`: `{item}`")))?;
        let name = name.trim();
        let var = ring
            .var_index(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        if values.contains_key(&var) {
            return Err(Error::InvalidPoint(format!("`{name}` assigned twice")));
        }
        values.insert(var, parse_field_element(val, ring.field())?);
    }
    DiffPoint::concrete(ring, values)
}

struct ComponentBuilder {
    name: String,
    line: usize,
    charset: Option<Vec<DiffPoly>>,
    ineqs: Vec<DiffPoly>,
    prime: bool,
}

impl ComponentBuilder {
    fn finish(self, ring: &Arc<Ring>, ranking: &Ranking) -> Result<CharSetComponent> {
        let seq = match self.charset {
            Some(s) => s,
            None => return ferr(self.line, format!("component `{}` has no charset", self.name)),
        };
        CharSetComponent::new(self.name, ring, ranking.clone(), seq, self.ineqs, self.prime)
            .or_else(|e| ferr(self.line, e))
    }
}

/// Line-oriented parser shared by system and component files.
///
/// Header lines (`field:`, `vars:`, `ranking:`) come first. Then any of
/// `eq NAME = EXPR`, `point NAME: x = v, …`, and component blocks opened by
/// `component NAME` followed by `charset:`, `ineqs:` and `prime: yes|no`.
/// `#` starts a comment.
fn parse_lines(src: &str, base: Option<(&Arc<Ring>, &Ranking)>) -> Result<SystemFile> {
    let mut field = base.map(|(r, _)| r.field());
    let mut names: Option<Vec<String>> = base.map(|(r, _)| r.names().to_vec());
    let mut ranking_src: Option<(usize, String)> = None;
    let mut ring: Option<Arc<Ring>> = base.map(|(r, _)| r.clone());
    let mut ranking: Option<Ranking> = base.map(|(_, k)| k.clone());
    let mut equations: Vec<(String, DiffPoly)> = Vec::new();
    let mut points = Vec::new();
    let mut components = Vec::new();
    let mut current: Option<ComponentBuilder> = None;

    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let header = |key: &str| line.strip_prefix(key).map(str::trim);
        if let Some(v) = header("field:") {
            if ring.is_some() && base.is_none() {
                return ferr(line_no, "`field:` must precede equations");
            }
            let tag = parse_field_tag(v).or_else(|e| ferr(line_no, e))?;
            if base.is_some_and(|(r, _)| r.field() != tag) {
                return ferr(line_no, "field differs from the system file");
            }
            field = Some(tag);
            continue;
        }
        if let Some(v) = header("vars:") {
            let list: Vec<String> = split_list(v).map(String::from).collect();
            if let Some((r, _)) = base {
                if r.names() != list.as_slice() {
                    return ferr(line_no, "variables differ from the system file");
                }
                continue;
            }
            if ring.is_some() {
                return ferr(line_no, "`vars:` must precede equations");
            }
            for (i, n) in list.iter().enumerate() {
                let valid = n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if !valid || list[..i].contains(n) {
                    return ferr(line_no, format!("invalid or duplicate variable `{n}`"));
                }
            }
            names = Some(list);
            continue;
        }
        if let Some(v) = header("ranking:") {
            ranking_src = Some((line_no, v.to_string()));
            if let Some(r) = &ring {
                ranking = Some(parse_ranking(v, r).or_else(|e| ferr(line_no, e))?);
            }
            continue;
        }

        // Body line: make sure the context is fixed.
        if ring.is_none() {
            let tag = field.unwrap_or(FieldTag::Rationals);
            let ns = match &names {
                Some(n) => n.clone(),
                None => return ferr(line_no, "missing `vars:` header"),
            };
            if tag == FieldTag::RationalFunctionsInT && ns.iter().any(|n| n == "t") {
                return ferr(line_no, "`t` is reserved over Q(t)");
            }
            let r = Ring::new(tag, ns);
            ranking = Some(match &ranking_src {
                Some((l, s)) => parse_ranking(s, &r).or_else(|e| ferr(*l, e))?,
                None => Ranking::elimination(r.nvars()),
            });
            ring = Some(r);
        }
        let r = ring.as_ref().unwrap();
        let rk = ranking.as_ref().unwrap();
        let parse_list = |s: &str| -> Result<Vec<DiffPoly>> {
            split_list(s)
                .map(|e| parse_poly(e, r))
                .collect::<Result<Vec<_>>>()
                .or_else(|e| ferr(line_no, e))
        };

        if let Some(rest) = line.strip_prefix("eq ") {
            let (name, expr) = match rest.split_once('=') {
                Some(x) => x,
                None => return ferr(line_no, "expected `eq NAME = EXPR`"),
            };
            let name = name.trim().to_string();
            if equations.iter().any(|(n, _)| *n == name) {
                return ferr(line_no, format!("duplicate equation name `{name}`"));
            }
            let p = parse_poly(expr, r).or_else(|e| ferr(line_no, e))?;
            equations.push((name, p));
        } else if let Some(rest) = line.strip_prefix("point ") {
            let (name, body) = match rest.split_once(':') {
                Some(x) => x,
                None => return ferr(line_no, "expected `point NAME: x = v, ...`"),
            };
            let pt = parse_point_assignments(body, r).or_else(|e| ferr(line_no, e))?;
            points.push((name.trim().to_string(), pt));
        } else if let Some(rest) = line.strip_prefix("component") {
            if let Some(b) = current.take() {
                components.push(b.finish(r, rk)?);
            }
            let name = rest.trim();
            current = Some(ComponentBuilder {
                name: if name.is_empty() {
                    format!("C{}", components.len() + 1)
                } else {
                    name.to_string()
                },
                line: line_no,
                charset: None,
                ineqs: Vec::new(),
                prime: false,
            });
        } else if let Some(rest) = line.strip_prefix("charset:") {
            let b = match current.as_mut() {
                Some(b) => b,
                None => {
                    current = Some(ComponentBuilder {
                        name: format!("C{}", components.len() + 1),
                        line: line_no,
                        charset: None,
                        ineqs: Vec::new(),
                        prime: false,
                    });
                    current.as_mut().unwrap()
                }
            };
            if b.charset.is_some() {
                return ferr(line_no, "second `charset:` in one component");
            }
            b.charset = Some(parse_list(rest)?);
        } else if let Some(rest) = line.strip_prefix("ineqs:") {
            match current.as_mut() {
                Some(b) => b.ineqs.extend(parse_list(rest)?),
                None => return ferr(line_no, "`ineqs:` outside a component"),
            }
        } else if let Some(rest) = line.strip_prefix("prime:") {
            let b = match current.as_mut() {
                Some(b) => b,
                None => return ferr(line_no, "`prime:` outside a component"),
            };
            b.prime = match rest.trim() {
                "yes" => true,
                "no" => false,
                other => return ferr(line_no, format!("expected yes or no, got `{other}`")),
            };
        } else {
            return ferr(line_no, format!("unrecognized line `{line}`"));
        }
    }
    let ring = match ring {
        Some(r) => r,
        None => {
            let tag = field.unwrap_or(FieldTag::Rationals);
            let r = Ring::new(tag, names.ok_or(Error::Format {
                line: 0,
                msg: "missing `vars:` header".into(),
            })?);
            ranking = Some(match &ranking_src {
                Some((l, s)) => parse_ranking(s, &r).or_else(|e| ferr(*l, e))?,
                None => Ranking::elimination(r.nvars()),
            });
            r
        }
    };
    let ranking = ranking.unwrap();
    if let Some(b) = current.take() {
        components.push(b.finish(&ring, &ranking)?);
    }
    Ok(SystemFile {
        ring,
        ranking,
        equations,
        points,
        components,
    })
}

/// Parses a system file.
pub fn parse_system(src: &str) -> Result<SystemFile> {
    parse_lines(src, None)
}

/// Parses a component file in the context of an existing system. Header
/// lines, when present, must agree with the system except for `ranking:`.
pub fn parse_components(src: &str, ring: &Arc<Ring>, ranking: &Ranking) -> Result<Vec<CharSetComponent>> {
    Ok(parse_lines(src, Some((ring, ranking)))?.components)
}

/// Point file: one `name = value` per line or comma-separated.
pub fn parse_point(src: &str, ring: &Arc<Ring>) -> Result<DiffPoint> {
    let body: Vec<&str> = src
        .lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .map(|l| l.strip_prefix("point:").map(str::trim).unwrap_or(l))
        .filter(|l| !l.is_empty())
        .collect();
    parse_point_assignments(&body.join(","), ring)
}

/// Canonical system file text.
pub fn format_system(ring: &Ring, ranking: &Ranking, equations: &[(String, DiffPoly)]) -> String {
    let mut out = format!(
        "field: {}\nvars: {}\nranking: {}\n",
        ring.field(),
        ring.names().join(", "),
        ranking.describe(ring)
    );
    for (n, p) in equations {
        out.push_str(&format!("eq {n} = {p}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYSTEM: &str = "field: Q\nvars: x, y\nranking: elim x > y\neq u1 = x'' + y\neq u2 = x'^2 + y\n";

    #[test]
    fn parses_the_reference_system() {
        let s = parse_system(SYSTEM).unwrap();
        assert_eq!(s.ring.names(), ["x", "y"]);
        assert_eq!(s.equations[0].1.to_string(), "x'' + y");
        assert_eq!(s.equations[1].1.to_string(), "x'^2 + y");
        assert_eq!(format_system(&s.ring, &s.ranking, &s.equations), SYSTEM);
    }

    #[test]
    fn grammar_coverage() {
        let r = Ring::new(FieldTag::RationalFunctionsInT, ["x"]);
        let p = parse_poly("x^(4) - t*x", &r).unwrap();
        assert_eq!(p.to_string(), "x^(4) - t*x");
        assert_eq!(parse_poly("x''''", &r).unwrap_err().code(), "E_PARSE");
        assert_eq!(parse_poly("t'", &r).unwrap_err().code(), "E_PARSE");
        assert_eq!(parse_poly("z", &r).unwrap_err(), Error::UnknownVariable("z".into()));
        match parse_poly("x + * 2", &r) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        let q = parse_poly("(t^2 - 1)/(t + 2)*x'", &r).unwrap();
        assert_eq!(parse_poly(&q.to_string(), &r).unwrap(), q);
        assert!(parse_poly("x/x", &r).is_err());
        assert!(parse_poly("x/0", &r).is_err());
    }

    #[test]
    fn field_elements() {
        let a = parse_field_element("1/2 + 1/3", FieldTag::Rationals).unwrap();
        assert_eq!(a, FieldElement::ratio(FieldTag::Rationals, 5, 6).unwrap());
        let b = parse_field_element("(t^2-1)/(t-1)", FieldTag::RationalFunctionsInT).unwrap();
        assert_eq!(b.to_string(), "t + 1");
    }

    #[test]
    fn rankings() {
        let r = Ring::new(FieldTag::Rationals, ["x", "y"]);
        let a = parse_ranking("orderly x < y", &r).unwrap();
        assert_eq!(a.descending(), vec![1, 0]);
        assert_eq!(a.describe(&r), "orderly x < y");
        assert!(parse_ranking("elim x", &r).is_err());
        assert!(parse_ranking("lex x > y", &r).is_err());
    }

    #[test]
    fn components_and_points() {
        let s = parse_system(SYSTEM).unwrap();
        let comps = parse_components(
            "component P1\ncharset: y'^2 + 4*y^3, 2*y*x' - y'\nineqs: y\nprime: no\ncomponent P2\ncharset: y, x'\n",
            &s.ring,
            &s.ranking,
        )
        .unwrap();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1].name, "P2");
        let pt = parse_point("x = 0\ny = 0\n", &s.ring).unwrap();
        assert!(matches!(pt, DiffPoint::Concrete { .. }));
        assert!(parse_point("x = 0", &s.ring).is_err());
        let bad = parse_system("vars: x\neq a = x\neq a = x'\n").unwrap_err();
        assert_eq!(bad.code(), "E_FORMAT");
    }
}
