//! Text syntax for exponential polynomials and vector fields.
//!
//! Grammar (scalars): sums of products of factors, with `*` optional between
//! factors, `/` allowed only by ring units, `^` for nonnegative integer
//! powers, and `e^(w)` where w is a linear form in x and y with constant
//! coefficients. `i` is the imaginary unit; `x`, `y`, `u` are coordinates;
//! identifiers starting with an uppercase letter are parameter symbols.
//! Vector fields additionally use the markers Dx, Dy, Du, exactly one per
//! additive term.
//!
//! Printing is canonical: terms in the ring's term order, sign-separated,
//! factors ordered parameters, x, y, u, exponential. `parse(print(p)) == p`
//! holds exactly.

use crate::error::{Error, Result};
use crate::expoly::{ExpPoly, Freq, Term, Var};
use crate::rat::GaussianRational;
use crate::vfield::{Space, VectorField};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Id(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = s.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    return Err(Error::Parse {
                        pos: i,
                        msg: "decimal literals are not part of the exact ring".into(),
                    });
                }
                let n: BigInt = s[start..i].parse().expect("digit run");
                toks.push((Tok::Num(n), start));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &s[start..i];
                if word.chars().next().unwrap().is_ascii_uppercase()
                    || matches!(word, "x" | "y" | "u" | "e" | "i")
                {
                    toks.push((Tok::Id(word.to_string()), start));
                } else if word.chars().all(|ch| matches!(ch, 'x' | 'y' | 'u' | 'i')) {
                    // allow juxtaposed single-letter coordinates: "xy", "ix"
                    for (k, ch) in word.char_indices() {
                        toks.push((Tok::Id(ch.to_string()), start + k));
                    }
                } else {
                    // any other word is a named constant, e.g. `k03a002`
                    toks.push((Tok::Id(word.to_string()), start));
                }
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

fn is_direction(id: &str) -> Option<usize> {
    match id {
        "Dx" => Some(0),
        "Dy" => Some(1),
        "Du" => Some(2),
        _ => None,
    }
}

impl Parser {
    fn new(s: &str) -> Result<Parser> {
        Ok(Parser {
            toks: tokenize(s)?,
            pos: 0,
            end: s.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.here();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Num(_)) | Some(Tok::Id(_)) | Some(Tok::LParen)
        )
    }

    // expr := ['+'|'-'] term (('+'|'-') term)*
    fn parse_expr(&mut self) -> Result<ExpPoly> {
        let mut acc = ExpPoly::zero();
        loop {
            let mut neg = false;
            while let Some(t) = self.peek() {
                match t {
                    Tok::Plus => {
                        self.bump();
                    }
                    Tok::Minus => {
                        neg = !neg;
                        self.bump();
                    }
                    _ => break,
                }
            }
            let t = self.parse_term()?;
            acc = if neg { acc.sub(&t) } else { acc.add(&t) };
            match self.peek() {
                Some(Tok::Plus) | Some(Tok::Minus) => continue,
                _ => break,
            }
        }
        Ok(acc)
    }

    // term := factor (('*' | '/')? factor)*
    fn parse_term(&mut self) -> Result<ExpPoly> {
        let mut p = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let f = self.parse_factor()?;
                    p = p.mul(&f);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let f = self.parse_factor()?;
                    let inv = f.unit_inv().ok_or_else(|| Error::Parse {
                        pos: self.here(),
                        msg: format!("division by `{f}` which is not a ring unit"),
                    })?;
                    p = p.mul(&inv);
                }
                _ if self.starts_factor() => {
                    let f = self.parse_factor()?;
                    p = p.mul(&f);
                }
                _ => break,
            }
        }
        Ok(p)
    }

    // factor := primary ['^' exponent]
    fn parse_factor(&mut self) -> Result<ExpPoly> {
        let base = self.parse_primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let n = self.parse_exponent()?;
            Ok(base.pow(n))
        } else {
            Ok(base)
        }
    }

    fn parse_exponent(&mut self) -> Result<u32> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => u32::try_from(&n).map_err(|_| Error::Parse {
                pos,
                msg: "exponent too large".into(),
            }),
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "`)` after exponent")?;
                constant_u32(&e).ok_or(Error::Parse {
                    pos,
                    msg: "exponent must be a nonnegative integer".into(),
                })
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected an integer exponent".into(),
            }),
        }
    }

    fn parse_primary(&mut self) -> Result<ExpPoly> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(ExpPoly::constant(GaussianRational::new(
                BigRational::from_integer(n),
                BigRational::zero(),
            ))),
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Id(id)) => match id.as_str() {
                "x" => Ok(ExpPoly::var(Var::X)),
                "y" => Ok(ExpPoly::var(Var::Y)),
                "u" => Ok(ExpPoly::var(Var::U)),
                "i" => Ok(ExpPoly::constant(GaussianRational::i())),
                "e" => {
                    self.expect(Tok::Caret, "`^` after e")?;
                    self.expect(Tok::LParen, "`(` after e^")?;
                    let inner = self.parse_expr()?;
                    self.expect(Tok::RParen, "`)` closing the exponent of e")?;
                    let freq = linear_form(&inner).ok_or(Error::Parse {
                        pos,
                        msg: "exponent of e must be a constant-coefficient linear form in x and y"
                            .into(),
                    })?;
                    Ok(ExpPoly::exponential(freq))
                }
                _ if is_direction(&id).is_some() => Err(Error::Parse {
                    pos,
                    msg: format!("`{id}` is a vector-field marker, not a scalar"),
                }),
                _ => Ok(ExpPoly::var(Var::param(&id))),
            },
            _ => Err(Error::Parse {
                pos,
                msg: "expected a number, variable, or `(`".into(),
            }),
        }
    }

    // vector field := signed products, each containing exactly one D-marker
    fn parse_field(&mut self, space: Space) -> Result<VectorField> {
        let mut comps = [ExpPoly::zero(), ExpPoly::zero(), ExpPoly::zero()];
        loop {
            let mut neg = false;
            while let Some(t) = self.peek() {
                match t {
                    Tok::Plus => {
                        self.bump();
                    }
                    Tok::Minus => {
                        neg = !neg;
                        self.bump();
                    }
                    _ => break,
                }
            }
            let (coeff, dir) = self.parse_field_product()?;
            let Some(d) = dir else {
                return self.err("each term needs exactly one of Dx, Dy, Du");
            };
            comps[d] = if neg {
                comps[d].sub(&coeff)
            } else {
                comps[d].add(&coeff)
            };
            match self.peek() {
                Some(Tok::Plus) | Some(Tok::Minus) => continue,
                _ => break,
            }
        }
        let [ax, ay, au] = comps;
        VectorField::new(space, ax, ay, au)
    }

    fn parse_field_product(&mut self) -> Result<(ExpPoly, Option<usize>)> {
        let mut p = ExpPoly::one();
        let mut dir: Option<usize> = None;
        let mut saw_operand = false;
        loop {
            if let Some(Tok::Id(id)) = self.peek() {
                if let Some(d) = is_direction(id) {
                    if dir.is_some() {
                        return self.err("more than one direction marker in a term");
                    }
                    dir = Some(d);
                    saw_operand = true;
                    self.bump();
                    continue;
                }
            }
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    if let Some(Tok::Id(id)) = self.peek() {
                        if let Some(d) = is_direction(id) {
                            if dir.is_some() {
                                return self.err("more than one direction marker in a term");
                            }
                            dir = Some(d);
                            self.bump();
                            continue;
                        }
                    }
                    let f = self.parse_factor()?;
                    p = p.mul(&f);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let f = self.parse_factor()?;
                    let inv = f.unit_inv().ok_or_else(|| Error::Parse {
                        pos: self.here(),
                        msg: format!("division by `{f}` which is not a ring unit"),
                    })?;
                    p = p.mul(&inv);
                }
                _ if self.starts_factor() => {
                    let f = self.parse_factor()?;
                    p = p.mul(&f);
                    saw_operand = true;
                }
                _ => break,
            }
        }
        if !saw_operand {
            return self.err("expected a term");
        }
        Ok((p, dir))
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            Err(Error::Parse {
                pos: self.here(),
                msg: "trailing input".into(),
            })
        } else {
            Ok(())
        }
    }
}

fn constant_u32(p: &ExpPoly) -> Option<u32> {
    let c = p.as_constant()?;
    if !c.im.is_zero() || !c.re.is_integer() || c.re.is_negative() {
        return None;
    }
    u32::try_from(&c.re.to_integer()).ok()
}

/// Recognize w = c1*x + c2*y (no constant part, no u, no parameters).
fn linear_form(p: &ExpPoly) -> Option<Freq> {
    let mut fx = GaussianRational::zero();
    let mut fy = GaussianRational::zero();
    for t in p.terms() {
        if !t.freq.is_zero() {
            return None;
        }
        let exps: Vec<_> = t.exps.iter().collect();
        match exps.as_slice() {
            [(Var::X, 1)] => fx = &fx + &t.coeff,
            [(Var::Y, 1)] => fy = &fy + &t.coeff,
            _ => return None,
        }
    }
    Some(Freq::new(fx, fy))
}

pub fn parse_expoly(s: &str) -> Result<ExpPoly> {
    let mut p = Parser::new(s)?;
    if p.peek().is_none() {
        return p.err("empty input");
    }
    let e = p.parse_expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_vector_field(s: &str, space: Space) -> Result<VectorField> {
    let mut p = Parser::new(s)?;
    if p.peek().is_none() {
        return p.err("empty input");
    }
    if p.toks.len() == 1 {
        if let Some(Tok::Num(n)) = p.peek() {
            if n.is_zero() {
                return Ok(VectorField::zero(space));
            }
        }
    }
    let v = p.parse_field(space)?;
    p.finish()?;
    Ok(v)
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

fn fmt_rational_term(q: &BigRational, parenthesize: bool) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else if parenthesize {
        format!("({}/{})", q.numer(), q.denom())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Magnitude (sign already extracted) as a printable coefficient factor.
/// `standalone` means the coefficient is the whole term, so bare fractions
/// need no parentheses.
fn coeff_string(mag: &GaussianRational, standalone: bool) -> String {
    if mag.im.is_zero() {
        fmt_rational_term(&mag.re, !standalone)
    } else if mag.re.is_zero() {
        if mag.im.is_one() {
            "i".to_string()
        } else {
            format!("{}*i", fmt_rational_term(&mag.im, true))
        }
    } else {
        format!("({})", mag)
    }
}

fn freq_string(f: &Freq) -> String {
    let lin = ExpPoly::var(Var::X)
        .scale(&f.x)
        .add(&ExpPoly::var(Var::Y).scale(&f.y));
    format!("e^({})", poly_to_string(&lin))
}

fn term_body(t: &Term) -> (bool, String) {
    let neg = t.coeff.re.is_negative()
        || (t.coeff.re.is_zero() && t.coeff.im.is_negative());
    let mag = if neg { -&t.coeff } else { t.coeff.clone() };
    let mut factors: Vec<String> = Vec::new();
    let pow = |name: String, e: u32| {
        if e == 1 {
            name
        } else {
            format!("{name}^{e}")
        }
    };
    for (v, e) in &t.exps {
        if v.is_param() {
            factors.push(pow(v.to_string(), *e));
        }
    }
    for v in [Var::X, Var::Y, Var::U] {
        let e = t.exp(&v);
        if e > 0 {
            factors.push(pow(v.to_string(), e));
        }
    }
    if !t.freq.is_zero() {
        factors.push(freq_string(&t.freq));
    }
    let body = if factors.is_empty() {
        coeff_string(&mag, true)
    } else if mag.is_one() {
        factors.join("*")
    } else {
        format!("{}*{}", coeff_string(&mag, false), factors.join("*"))
    };
    (neg, body)
}

pub fn poly_to_string(p: &ExpPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, t) in p.terms().iter().enumerate() {
        let (neg, body) = term_body(t);
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

pub fn field_to_string(v: &VectorField) -> String {
    if v.is_zero() {
        return "0".to_string();
    }
    let mut pieces: Vec<String> = Vec::new();
    for (comp, marker) in [(&v.ax, "Dx"), (&v.ay, "Dy"), (&v.au, "Du")] {
        if comp.is_zero() {
            continue;
        }
        let piece = if comp.is_one() {
            marker.to_string()
        } else if comp.neg().is_one() {
            format!("-{marker}")
        } else if comp.terms().len() == 1 {
            let (neg, body) = term_body(&comp.terms()[0]);
            let sign = if neg { "-" } else { "" };
            format!("{sign}{body}*{marker}")
        } else {
            format!("({})*{}", poly_to_string(comp), marker)
        };
        pieces.push(piece);
    }
    let mut out = String::new();
    for (k, piece) in pieces.iter().enumerate() {
        if k == 0 {
            out.push_str(piece);
        } else if let Some(rest) = piece.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(piece);
        }
    }
    out
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_to_string(self))
    }
}

impl FromStr for ExpPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<ExpPoly> {
        parse_expoly(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(s: &str) {
        let p = parse_expoly(s).unwrap();
        let printed = p.to_string();
        let again = parse_expoly(&printed).unwrap();
        assert_eq!(p, again, "roundtrip of `{s}` via `{printed}`");
    }

    #[test]
    fn parses_basic_polynomials() {
        let p = parse_expoly("x^2 - 2*x*y + y^2").unwrap();
        let q = parse_expoly("(x - y)^2").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn implicit_multiplication_and_joined_letters() {
        assert_eq!(parse_expoly("2xy").unwrap(), parse_expoly("2*x*y").unwrap());
        assert_eq!(parse_expoly("ix").unwrap(), parse_expoly("i*x").unwrap());
    }

    #[test]
    fn imaginary_arithmetic() {
        let p = parse_expoly("(1+i)*(1-i)").unwrap();
        assert_eq!(p, ExpPoly::from_int(2));
        let q = parse_expoly("i^2").unwrap();
        assert_eq!(q, ExpPoly::from_int(-1));
    }

    #[test]
    fn exponentials() {
        let p = parse_expoly("e^(2x)*e^(y)").unwrap();
        let q = parse_expoly("e^(2*x + y)").unwrap();
        assert_eq!(p, q);
        assert!(parse_expoly("e^(x + 1)").is_err());
        assert!(parse_expoly("e^(u)").is_err());
        assert!(parse_expoly("e^(x*y)").is_err());
    }

    #[test]
    fn division_only_by_units() {
        let p = parse_expoly("x/2").unwrap();
        assert_eq!(p, parse_expoly("(1/2)*x").unwrap());
        let q = parse_expoly("y/e^(x)").unwrap();
        assert_eq!(q, parse_expoly("y*e^(-x)").unwrap());
        assert!(parse_expoly("1/(x+1)").is_err());
        assert!(parse_expoly("1/x").is_err());
    }

    #[test]
    fn parameters() {
        let p = parse_expoly("Alpha*x + B2*y").unwrap();
        assert!(p.has_params());
        // lowercase words beyond pure coordinate runs are named constants
        let q = parse_expoly("k03a002*u + foo").unwrap();
        assert!(q.has_params());
        assert_eq!(parse_expoly(&q.to_string()).unwrap(), q);
        // while coordinate runs still multiply out
        assert_eq!(
            parse_expoly("xyu").unwrap(),
            parse_expoly("x*y*u").unwrap()
        );
    }

    #[test]
    fn print_forms() {
        assert_eq!(parse_expoly("x - y").unwrap().to_string(), "x - y");
        assert_eq!(parse_expoly("-x").unwrap().to_string(), "-x");
        assert_eq!(
            parse_expoly("x/2 + 3*i*y").unwrap().to_string(),
            "(1/2)*x + 3*i*y"
        );
        assert_eq!(
            parse_expoly("(1+2i)*u*e^(2x)").unwrap().to_string(),
            "(1+2i)*u*e^(2*x)"
        );
        assert_eq!(parse_expoly("0").unwrap().to_string(), "0");
        assert_eq!(parse_expoly("-1/2").unwrap().to_string(), "-1/2");
    }

    #[test]
    fn printed_forms_roundtrip() {
        for s in [
            "x^2*y - 3*u + e^(x - y)",
            "-i*u^2 + (2-3i)*x*e^(ix)",
            "A*x + 1/2 - u*e^(2y)",
            "e^(-x)*e^(-y) + x^10",
            "(1/3)*x - (2/5)*i*y + u",
        ] {
            roundtrip(s);
        }
    }

    #[test]
    fn field_parse_and_print() {
        let v = parse_vector_field("x^2*Dx + x*u*Du", Space::Total).unwrap();
        assert_eq!(v.to_string(), "x^2*Dx + x*u*Du");
        let w = parse_vector_field("Dx - Dy", Space::Base).unwrap();
        assert_eq!(w.to_string(), "Dx - Dy");
        let z = parse_vector_field("(x + y)*Dx", Space::Base).unwrap();
        assert_eq!(z.to_string(), "(x + y)*Dx");
        assert_eq!(
            parse_vector_field("0", Space::Base).unwrap(),
            VectorField::zero(Space::Base)
        );
    }

    #[test]
    fn field_errors() {
        assert!(parse_vector_field("x + y", Space::Base).is_err());
        assert!(parse_vector_field("Dx*Dy", Space::Base).is_err());
        assert!(parse_vector_field("u*Dx", Space::Base).is_err());
        assert!(parse_vector_field("Du", Space::Base).is_err());
    }

    #[test]
    fn field_roundtrip_moebius_style() {
        for s in [
            "y*Dx - u^2*Du",
            "e^(x)*Dy + (u^2 - 2*u)*Du",
            "Dx + (A*u + B)*Du",
            "-Dy",
            "x*y*Dx + (x^2 - y^2)*Dy - 2*y*u*Du",
        ] {
            let v = parse_vector_field(s, Space::Total).unwrap();
            let again = parse_vector_field(&v.to_string(), Space::Total).unwrap();
            assert_eq!(v, again, "roundtrip of `{s}` via `{v}`");
        }
    }
}
