//! Text form of field elements: `a/b + c/e*sqrt(n)`.
//!
//! Both terms are optional and may appear in any order, signs are optional on
//! the first term, and whitespace is ignored: `18+17*sqrt(2)`,
//! `-1/2 + 3/2*sqrt(5)`, `-sqrt(-1)`, `7`. The radicand only has to share its
//! squarefree part with the field, so `sqrt(8)` reads as `2*sqrt(2)` in
//! `Q(sqrt(2))`. Printing is canonical: reduced fractions, the rational part
//! first, and the field's own `d` under the root.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{QuadElem, QuadField};
use crate::arith::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("unexpected {found} at position {position} in {input:?}")]
    Unexpected {
        input: String,
        position: usize,
        found: String,
    },
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("sqrt({radicand}) does not lie in Q(sqrt({d}))")]
    ForeignRadicand { radicand: BigInt, d: BigInt },
}

struct Cursor<'a> {
    input: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Self {
        Self {
            input,
            chars: input.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        let len = word.chars().count();
        let matches = self
            .chars
            .get(self.pos..self.pos + len)
            .is_some_and(|s| s.iter().copied().eq(word.chars()));
        if matches {
            self.pos += len;
        }
        matches
    }

    fn error(&self) -> ParseError {
        ParseError::Unexpected {
            input: self.input.to_string(),
            position: self.pos,
            found: self
                .peek()
                .map_or_else(|| "end of input".to_string(), |c| format!("{c:?}")),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn sign(&mut self) -> Option<bool> {
        if self.eat('+') {
            Some(false)
        } else if self.eat('-') {
            Some(true)
        } else {
            None
        }
    }

    fn natural(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error());
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let negative = self.sign() == Some(true);
        let n = self.natural()?;
        Ok(if negative { -n } else { n })
    }

    fn unsigned_rational(&mut self) -> Result<Rational, ParseError> {
        let num = self.natural()?;
        if self.eat('/') {
            let den = self.natural()?;
            if den.is_zero() {
                return Err(ParseError::ZeroDenominator(self.input.to_string()));
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    /// `sqrt(` has already been consumed.
    fn radicand(&mut self) -> Result<BigInt, ParseError> {
        let n = self.integer()?;
        self.expect(')')?;
        Ok(n)
    }
}

/// A term is either `q`, `q*sqrt(n)` or `sqrt(n)`.
enum Term {
    Rational(Rational),
    Root(Rational, BigInt),
}

fn term(cur: &mut Cursor<'_>) -> Result<Term, ParseError> {
    if cur.eat_keyword("sqrt(") {
        let n = cur.radicand()?;
        return Ok(Term::Root(Rational::one(), n));
    }
    let coefficient = cur.unsigned_rational()?;
    if cur.eat('*') {
        if !cur.eat_keyword("sqrt(") {
            return Err(cur.error());
        }
        let n = cur.radicand()?;
        Ok(Term::Root(coefficient, n))
    } else {
        Ok(Term::Rational(coefficient))
    }
}

pub(super) fn parse_elem(text: &str, field: &QuadField) -> Result<QuadElem, ParseError> {
    let mut cur = Cursor::new(text);
    if cur.at_end() {
        return Err(ParseError::Empty);
    }
    reject_split_tokens(text)?;
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    let mut first = true;
    while !cur.at_end() {
        let negative = match cur.sign() {
            Some(neg) => neg,
            None if first => false,
            None => return Err(cur.error()),
        };
        first = false;
        let value = match term(&mut cur)? {
            Term::Rational(q) => {
                a += if negative { -q } else { q };
                continue;
            }
            Term::Root(coefficient, radicand) => (coefficient, radicand),
        };
        let (coefficient, radicand) = value;
        let coefficient = if negative { -coefficient } else { coefficient };
        if radicand.is_zero() {
            continue;
        }
        let (core, scale) = arith::squarefree_part(&radicand).expect("nonzero radicand");
        let scaled = coefficient * Rational::from_integer(scale);
        if core.is_one() {
            a += scaled;
        } else if core == *field.d() {
            b += scaled;
        } else {
            return Err(ParseError::ForeignRadicand {
                radicand,
                d: field.d().clone(),
            });
        }
    }
    Ok(field.elem(a, b))
}

/// Parses a plain rational `n` or `n/m` (optionally signed).
/// Whitespace is insignificant except inside a number or keyword, so
/// `"2 3"` is an error rather than `23`.
fn reject_split_tokens(text: &str) -> Result<(), ParseError> {
    let mut previous: Option<char> = None;
    let mut gap = false;
    for (position, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            gap = previous.is_some();
            continue;
        }
        if gap && c.is_alphanumeric() && previous.is_some_and(char::is_alphanumeric) {
            return Err(ParseError::Unexpected {
                input: text.to_string(),
                position,
                found: format!("{c:?}"),
            });
        }
        previous = Some(c);
        gap = false;
    }
    Ok(())
}

pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let mut cur = Cursor::new(text);
    if cur.at_end() {
        return Err(ParseError::Empty);
    }
    reject_split_tokens(text)?;
    let negative = cur.sign() == Some(true);
    let q = cur.unsigned_rational()?;
    if !cur.at_end() {
        return Err(cur.error());
    }
    Ok(if negative { -q } else { q })
}

pub(super) fn write_elem(f: &mut fmt::Formatter<'_>, e: &QuadElem) -> fmt::Result {
    let (a, b) = (e.rational_part(), e.sqrt_part());
    if b.is_zero() {
        return write!(f, "{a}");
    }
    let d = e.field().d();
    if !a.is_zero() {
        write!(f, "{a}")?;
        f.write_str(if b.is_negative() { "-" } else { "+" })?;
    } else if b.is_negative() {
        f.write_str("-")?;
    }
    let magnitude = b.abs();
    if magnitude.is_one() {
        write!(f, "sqrt({d})")
    } else {
        write!(f, "{magnitude}*sqrt({d})")
    }
}
