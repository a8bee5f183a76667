//! Text form of series: `term (± term)*`, `term = [coeff] [var^int]`.
//!
//! Coefficients are rationals (`-1/4`) or row-major matrices (`[[1, 0], [0, -1]]`),
//! the variable is `z` or `zeta`. A trailing `O(z^k)` marks the truncation
//! floor `k + 1`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{KsError, Result};
use crate::exact::{parse_rational, render_rational, RatMatrix, Rational};
use crate::ks::ScalarOperator;
use crate::laurent::{MatrixSeries, ScalarSeries};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Var(String),
    Big,
    Plus,
    Minus,
    Slash,
    Caret,
    LBracket,
    RBracket,
    Comma,
    LParen,
    RParen,
}

fn parse_err(pos: usize, msg: impl Into<String>) -> KsError {
    KsError::Parse { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b',' => Some(Tok::Comma),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((i, t));
            i += 1;
        } else if c.is_ascii_whitespace() || c == b'*' {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Num(text[start..i].to_string())));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            let word = &text[start..i];
            match word {
                "z" | "zeta" => out.push((start, Tok::Var(word.to_string()))),
                "O" => out.push((start, Tok::Big)),
                _ => return Err(parse_err(start, format!("unknown identifier {word:?}"))),
            }
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(parse_err(i, format!("unexpected character {ch:?}")));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Coef {
    Scalar(Rational),
    Matrix(RatMatrix),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    var: Option<String>,
}

struct Parsed {
    terms: Vec<(i64, Coef)>,
    floor: Option<i64>,
    var: Option<String>,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Self {
            toks: lex(text)?,
            at: 0,
            end: text.len(),
            var: None,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(parse_err(pos, format!("expected {what}"))),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let pos = self.pos();
        let neg = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                true
            }
            Some(Tok::Plus) => {
                self.at += 1;
                false
            }
            _ => false,
        };
        match self.bump() {
            Some(Tok::Num(d)) => {
                let v: i64 = d.parse().map_err(|_| parse_err(pos, "exponent out of range"))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(parse_err(pos, "expected an integer exponent")),
        }
    }

    fn unsigned_rational(&mut self) -> Result<Rational> {
        let pos = self.pos();
        let num = match self.bump() {
            Some(Tok::Num(d)) => d,
            _ => return Err(parse_err(pos, "expected a number")),
        };
        if self.peek() == Some(&Tok::Slash) {
            self.at += 1;
            let dpos = self.pos();
            match self.bump() {
                Some(Tok::Num(d)) => parse_rational(&format!("{num}/{d}")).map_err(|_| parse_err(dpos, "zero denominator")),
                _ => Err(parse_err(dpos, "expected a denominator")),
            }
        } else {
            parse_rational(&num).map_err(|_| parse_err(pos, "malformed number"))
        }
    }

    fn signed_rational(&mut self) -> Result<Rational> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                Ok(-self.unsigned_rational()?)
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.unsigned_rational()
            }
            _ => self.unsigned_rational(),
        }
    }

    fn matrix(&mut self) -> Result<RatMatrix> {
        let start = self.pos();
        self.expect(Tok::LBracket, "'['")?;
        let mut rows = Vec::new();
        loop {
            self.expect(Tok::LBracket, "'[' opening a matrix row")?;
            let mut row = vec![self.signed_rational()?];
            while self.peek() == Some(&Tok::Comma) {
                self.at += 1;
                row.push(self.signed_rational()?);
            }
            self.expect(Tok::RBracket, "']' closing a matrix row")?;
            rows.push(row);
            match self.peek() {
                Some(Tok::Comma) => self.at += 1,
                _ => break,
            }
        }
        self.expect(Tok::RBracket, "']' closing the matrix")?;
        RatMatrix::from_rows(rows).map_err(|_| parse_err(start, "matrix rows have different lengths"))
    }

    fn variable(&mut self) -> Result<i64> {
        let pos = self.pos();
        let name = match self.bump() {
            Some(Tok::Var(v)) => v,
            _ => return Err(parse_err(pos, "expected z or zeta")),
        };
        match &self.var {
            Some(v) if *v != name => {
                return Err(parse_err(pos, format!("mixes variables {v} and {name}")));
            }
            _ => self.var = Some(name),
        }
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            self.integer()
        } else {
            Ok(1)
        }
    }

    fn series(mut self) -> Result<Parsed> {
        let mut terms = Vec::new();
        let mut floor = None;
        let mut first = true;
        loop {
            let pos = self.pos();
            let negative = match self.peek() {
                Some(Tok::Minus) => {
                    self.at += 1;
                    true
                }
                Some(Tok::Plus) => {
                    self.at += 1;
                    false
                }
                None if first => return Err(parse_err(pos, "empty expression")),
                _ if first => false,
                _ => return Err(parse_err(pos, "expected '+' or '-' between terms")),
            };
            first = false;
            let term_pos = self.pos();
            if self.peek() == Some(&Tok::Big) {
                self.at += 1;
                self.expect(Tok::LParen, "'(' after O")?;
                let k = self.variable()?;
                self.expect(Tok::RParen, "')'")?;
                floor = Some(k + 1);
                if self.peek().is_some() {
                    return Err(parse_err(self.pos(), "O(...) must be the last term"));
                }
                break;
            }
            let coef = match self.peek() {
                Some(Tok::Num(_)) => Some(Coef::Scalar(self.unsigned_rational()?)),
                Some(Tok::LBracket) => Some(Coef::Matrix(self.matrix()?)),
                _ => None,
            };
            let exp = match self.peek() {
                Some(Tok::Var(_)) => Some(self.variable()?),
                _ => None,
            };
            let (exp, coef) = match (exp, coef) {
                (None, None) => return Err(parse_err(term_pos, "expected a term")),
                (e, c) => (e.unwrap_or(0), c.unwrap_or(Coef::Scalar(Rational::one()))),
            };
            let coef = if negative {
                match coef {
                    Coef::Scalar(q) => Coef::Scalar(-q),
                    Coef::Matrix(m) => Coef::Matrix(m.neg()),
                }
            } else {
                coef
            };
            terms.push((exp, coef));
            if self.peek().is_none() {
                break;
            }
        }
        Ok(Parsed {
            terms,
            floor,
            var: self.var,
        })
    }
}

fn parse(text: &str) -> Result<Parsed> {
    Parser::new(text)?.series()
}

fn check_floor(terms: &BTreeMap<i64, Coef>, floor: Option<i64>) -> Result<()> {
    if let (Some(f), Some((&k, _))) = (floor, terms.iter().next()) {
        if k < f {
            return Err(parse_err(0, format!("term z^{k} lies below the truncation O(z^{})", f - 1)));
        }
    }
    Ok(())
}

/// Parses a scalar series in `z` or `zeta`.
pub fn parse_series(text: &str) -> Result<ScalarSeries> {
    let parsed = parse(text)?;
    let mut acc: BTreeMap<i64, Coef> = BTreeMap::new();
    for (k, c) in parsed.terms {
        let q = match c {
            Coef::Scalar(q) => q,
            Coef::Matrix(_) => return Err(parse_err(0, "matrix coefficient in a scalar series")),
        };
        let slot = acc.entry(k).or_insert(Coef::Scalar(Rational::zero()));
        if let Coef::Scalar(s) = slot {
            *s += q;
        }
    }
    check_floor(&acc, parsed.floor)?;
    let terms = acc.into_iter().map(|(k, c)| match c {
        Coef::Scalar(q) => (k, q),
        Coef::Matrix(_) => unreachable!(),
    });
    ScalarSeries::from_rational_terms(terms, parsed.floor)
}

/// Parses a matrix series; every coefficient must be a matrix of one common shape,
/// except a lone `0` for the zero series of shape `shape`.
pub fn parse_matrix_series(text: &str, shape: (usize, usize)) -> Result<MatrixSeries> {
    let parsed = parse(text)?;
    let mut acc: BTreeMap<i64, RatMatrix> = BTreeMap::new();
    for (k, c) in parsed.terms {
        let m = match c {
            Coef::Matrix(m) => m,
            Coef::Scalar(q) if q.is_zero() => continue,
            Coef::Scalar(_) => return Err(parse_err(0, "scalar coefficient in a matrix series")),
        };
        if m.shape() != shape {
            return Err(KsError::DimensionMismatch(format!(
                "coefficient of z^{k} is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                shape.0,
                shape.1
            )));
        }
        match acc.get_mut(&k) {
            Some(e) => *e = e.add(&m),
            None => {
                acc.insert(k, m);
            }
        }
    }
    if let (Some(f), Some((&k, _))) = (parsed.floor, acc.iter().next()) {
        if k < f {
            return Err(parse_err(0, format!("term z^{k} lies below the truncation O(z^{})", f - 1)));
        }
    }
    MatrixSeries::from_terms(shape, acc, parsed.floor)
}

/// Parses `[[a, b], [c, d]]`.
pub fn parse_matrix(text: &str) -> Result<RatMatrix> {
    let mut p = Parser::new(text)?;
    let m = p.matrix()?;
    if p.peek().is_some() {
        return Err(parse_err(p.pos(), "trailing input after matrix"));
    }
    Ok(m)
}

/// Variable name used by [`parse_series`] for `text`, if any.
pub fn series_variable(text: &str) -> Result<Option<String>> {
    Ok(parse(text)?.var)
}

fn monomial(var: &str, k: i64) -> String {
    match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    }
}

fn join(parts: Vec<(bool, String)>, floor: Option<i64>, var: &str) -> String {
    let mut out = String::new();
    for (i, (neg, body)) in parts.iter().enumerate() {
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(body);
    }
    if let Some(f) = floor {
        if !out.is_empty() {
            out.push_str(" + ");
        }
        out.push_str(&format!("O({})", monomial(var, f - 1)));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Canonical text of a scalar series, highest exponent first.
pub fn render_series_in(s: &ScalarSeries, var: &str) -> String {
    let parts = s
        .terms()
        .rev()
        .map(|(k, q)| {
            let mono = monomial(var, k);
            let abs = q.abs();
            let body = if mono.is_empty() {
                render_rational(&abs)
            } else if abs.is_one() {
                mono
            } else {
                format!("{} {mono}", render_rational(&abs))
            };
            (q.is_negative(), body)
        })
        .collect();
    join(parts, s.floor(), var)
}

pub fn render_series(s: &ScalarSeries) -> String {
    render_series_in(s, "z")
}

/// Canonical text of a matrix series: `[[..]] z^k + …`.
pub fn render_matrix_series(s: &MatrixSeries) -> String {
    let parts = s
        .terms()
        .rev()
        .map(|(k, m)| {
            let mono = monomial("z", k);
            let body = if mono.is_empty() {
                m.to_string()
            } else {
                format!("{m} {mono}")
            };
            (false, body)
        })
        .collect();
    join(parts, s.floor(), "z")
}

/// `(a) D + P` for a scalar operator `a·∂ + P`; `D + P` when `a = 1`.
pub fn render_scalar_operator(op: &ScalarOperator) -> String {
    let deriv = if op.deriv_coeff == ScalarSeries::constant(Rational::one()) {
        "D".to_string()
    } else {
        format!("({}) D", render_series(&op.deriv_coeff))
    };
    if op.potential.is_exact_zero() {
        return deriv;
    }
    let pot = render_series(&op.potential);
    match pot.strip_prefix('-') {
        Some(rest) => format!("{deriv} - {rest}"),
        None => format!("{deriv} + {pot}"),
    }
}

/// Inverse of [`render_scalar_operator`].
pub fn parse_scalar_operator(text: &str) -> Result<ScalarOperator> {
    let d = text
        .find('D')
        .ok_or_else(|| parse_err(0, "operator needs a derivative symbol D"))?;
    let head = text[..d].trim();
    let deriv = if head.is_empty() {
        ScalarSeries::constant(Rational::one())
    } else {
        let inner = head
            .strip_prefix('(')
            .and_then(|h| h.strip_suffix(')'))
            .ok_or_else(|| parse_err(0, "derivative coefficient must be parenthesized"))?;
        parse_series(inner).map_err(|e| shift_pos(e, text.find('(').unwrap_or(0) + 1))?
    };
    let tail = text[d + 1..].trim_start();
    let tail_at = text.len() - tail.len();
    let potential = if tail.is_empty() {
        ScalarSeries::scalar_zero(None)
    } else if tail.starts_with('+') || tail.starts_with('-') {
        parse_series(tail).map_err(|e| shift_pos(e, tail_at))?
    } else {
        return Err(parse_err(tail_at, "expected '+' or '-' after D"));
    };
    ScalarOperator::new(deriv, potential)
}

fn shift_pos(e: KsError, by: usize) -> KsError {
    match e {
        KsError::Parse { pos, msg } => KsError::Parse { pos: pos + by, msg },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn kdv_coefficients() {
        let s = parse_series("z - 1/4 z^-2").unwrap();
        let want = ScalarSeries::from_rational_terms([(1, int(1)), (-2, rat(-1, 4))], None).unwrap();
        assert_eq!(s, want);
        assert!(parse_series("0").unwrap().is_exact_zero());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_series("z + + 2") {
            Err(KsError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        match parse_series("1/0 z") {
            Err(KsError::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_series("z + zeta").is_err());
        assert!(parse_series("").is_err());
        assert!(parse_series("x^2").is_err());
        assert!(parse_series("z^-3 + O(z^-2)").is_err());
    }

    #[test]
    fn matrix_series_text() {
        let s = parse_matrix_series("[[0, 1], [0, 0]] + [[0, 0], [1, 0]] z", (2, 2)).unwrap();
        assert_eq!(render_matrix_series(&s), "[[0, 0], [1, 0]] z + [[0, 1], [0, 0]]");
        assert!(parse_matrix_series("[[1]] z", (2, 2)).is_err());
        assert!(parse_matrix_series("0", (2, 2)).unwrap().is_exact_zero());
        assert_eq!(parse_matrix("[[1, -1/2]]").unwrap().to_string(), "[[1, -1/2]]");
    }

    #[test]
    fn operator_text() {
        let op = ScalarOperator::reduced(2, parse_series("z - 1/4 z^-2").unwrap());
        let text = render_scalar_operator(&op);
        assert_eq!(text, "(1/2 z^-1) D + z - 1/4 z^-2");
        assert_eq!(parse_scalar_operator(&text).unwrap(), op);
        let neg = parse_scalar_operator("D - z").unwrap();
        assert_eq!(render_scalar_operator(&neg), "D - z");
        assert_eq!(render_scalar_operator(&parse_scalar_operator("D").unwrap()), "D");
        match parse_scalar_operator("D + z + ") {
            Err(KsError::Parse { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("{other:?}"),
        }
    }
}
