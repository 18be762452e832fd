//! Canonical text form of free polynomials, with a bit-exact round trip.
//!
//! A polynomial prints as terms joined by ` + ` or ` - `, highest word first.
//! Each term is `coefficient * word`, where the coefficient is a rational
//! magnitude followed by parameter factors `name^exp`, and the word is
//! generators `u[i,j]` joined by spaces. A bare `1` rational is omitted when
//! the term has any other factor; the zero polynomial prints as `0`.

use super::{AlgebraError, FreePolynomial, Generator, Word};
use crate::coeff::{scalar_term_text, Param, ParamMono, Rat, Scalar};
use num::bigint::BigInt;
use num::{One, Signed, Zero};

pub(super) fn render(p: &FreePolynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (word, scalar) in p.terms().collect::<Vec<_>>().into_iter().rev() {
        for (mono, coeff) in scalar.terms() {
            if first {
                if coeff.is_negative() {
                    out.push('-');
                }
                first = false;
            } else if coeff.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            out.push_str(&term_text(&coeff.abs(), mono, word));
        }
    }
    out
}

fn term_text(mag: &Rat, mono: &ParamMono, word: &Word) -> String {
    if word.is_unit() {
        return scalar_term_text(mag, mono);
    }
    if mag.is_one() && mono.is_unit() {
        return word.to_string();
    }
    format!("{} * {}", scalar_term_text(mag, mono), word)
}

pub(super) fn parse(d: u8, input: &str) -> Result<FreePolynomial, AlgebraError> {
    let mut parser = Parser {
        input: input.as_bytes(),
        pos: 0,
    };
    parser.skip_ws();
    if parser.at_end() {
        return Err(AlgebraError::Parse("empty input".into()));
    }
    let mut terms: Vec<(Word, Scalar)> = Vec::new();
    let mut negative = parser.eat(b'-');
    loop {
        parser.skip_ws();
        let (mag, mono, word) = parser.term()?;
        let coeff = if negative { -mag } else { mag };
        terms.push((word, Scalar::term(mono, coeff)));
        parser.skip_ws();
        if parser.at_end() {
            break;
        }
        negative = if parser.eat(b'+') {
            false
        } else if parser.eat(b'-') {
            true
        } else {
            return Err(parser.fail("expected '+' or '-' between terms"));
        };
    }
    FreePolynomial::from_terms(d, terms)
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn fail(&self, message: &str) -> AlgebraError {
        AlgebraError::Parse(format!("{message} at byte {}", self.pos))
    }

    fn at_end(&self) -> bool {
        self.pos >= self.input.len()
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<u8> {
        self.input.get(self.pos + offset).copied()
    }

    fn eat(&mut self, byte: u8) -> bool {
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    /// One term: optional rational magnitude, parameter factors, then a word.
    /// `*` is accepted as a separator anywhere between factors.
    fn term(&mut self) -> Result<(Rat, ParamMono, Word), AlgebraError> {
        let mut mag: Option<Rat> = None;
        let mut powers: Vec<(Param, i64)> = Vec::new();
        let mut letters: Vec<Generator> = Vec::new();
        let mut any = false;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                if !any {
                    return Err(self.fail("unexpected '*'"));
                }
                self.pos += 1;
                continue;
            }
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    if mag.is_some() || !powers.is_empty() || !letters.is_empty() {
                        return Err(self.fail("rational must come first in a term"));
                    }
                    mag = Some(self.rational()?);
                    any = true;
                }
                Some(b'u') if self.peek_at(1) == Some(b'[') => {
                    letters.push(self.generator()?);
                    any = true;
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    if !letters.is_empty() {
                        return Err(self.fail("parameters must come before generators"));
                    }
                    powers.push(self.param_factor()?);
                    any = true;
                }
                _ => break,
            }
        }
        if !any {
            return Err(self.fail("expected a term"));
        }
        Ok((
            mag.unwrap_or_else(Rat::one),
            ParamMono::from_powers(powers),
            Word::from_letters(letters),
        ))
    }

    fn integer(&mut self) -> Result<BigInt, AlgebraError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail("expected digits"));
        }
        let text = std::str::from_utf8(&self.input[start..self.pos]).expect("ascii digits");
        text.parse::<BigInt>()
            .map_err(|e| self.fail(&format!("bad integer: {e}")))
    }

    fn rational(&mut self) -> Result<Rat, AlgebraError> {
        let numerator = self.integer()?;
        if self.eat(b'/') {
            let denominator = self.integer()?;
            if denominator.is_zero() {
                return Err(self.fail("zero denominator"));
            }
            Ok(Rat::new(numerator, denominator))
        } else {
            Ok(Rat::from_integer(numerator))
        }
    }

    fn generator(&mut self) -> Result<Generator, AlgebraError> {
        self.pos += 2; // "u["
        let i = self.index()?;
        if !self.eat(b',') {
            return Err(self.fail("expected ',' in generator"));
        }
        let j = self.index()?;
        if !self.eat(b']') {
            return Err(self.fail("expected ']' in generator"));
        }
        Ok(Generator::new(i, j))
    }

    fn index(&mut self) -> Result<u8, AlgebraError> {
        let value = self.integer()?;
        u8::try_from(value.clone()).map_err(|_| self.fail(&format!("index {value} too large")))
    }

    fn param_factor(&mut self) -> Result<(Param, i64), AlgebraError> {
        let start = self.pos;
        self.pos += 1; // leading letter
        let mut depth = 0u32;
        while let Some(c) = self.peek() {
            match c {
                b'{' => depth += 1,
                b'}' if depth > 0 => depth -= 1,
                b'}' => break,
                b',' if depth > 0 => {}
                b',' => break,
                c if c.is_ascii_alphanumeric() || c == b'_' => {}
                _ => break,
            }
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.input[start..self.pos])
            .map_err(|_| self.fail("parameter name is not ascii"))?;
        let param = Param::new(name).map_err(AlgebraError::Coeff)?;
        let exp = if self.eat(b'^') {
            let negative = self.eat(b'-');
            let raw = self.integer()?;
            let e = i64::try_from(raw.clone())
                .map_err(|_| self.fail(&format!("exponent {raw} too large")))?;
            if negative {
                -e
            } else {
                e
            }
        } else {
            1
        };
        Ok((param, exp))
    }
}
