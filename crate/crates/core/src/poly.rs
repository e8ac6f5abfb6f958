//! Integer-coefficient noncommutative polynomials without constant term.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::Ring;

/// `coeff * x_{letters[0]} * x_{letters[1]} * ...`, variables numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    pub coeff: i64,
    pub letters: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NcPolynomial {
    words: Vec<Word>,
}

impl NcPolynomial {
    /// Merges equal letter sequences, drops zero coefficients and sorts
    /// by length, then lexicographically.
    pub fn from_words(words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut merged: Vec<Word> = Vec::new();
        for w in words {
            if w.letters.is_empty() {
                return Err(Error::Parse("constant terms are not allowed; use the shift c".into()));
            }
            if w.letters.contains(&0) {
                return Err(Error::Parse("variables are numbered from 1".into()));
            }
            match merged.iter_mut().find(|m| m.letters == w.letters) {
                Some(m) => {
                    m.coeff = m
                        .coeff
                        .checked_add(w.coeff)
                        .ok_or_else(|| Error::Parse("coefficient overflow".into()))?
                }
                None => merged.push(w),
            }
        }
        merged.retain(|w| w.coeff != 0);
        merged.sort_by(|a, b| a.letters.len().cmp(&b.letters.len()).then_with(|| a.letters.cmp(&b.letters)));
        Ok(NcPolynomial { words: merged })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).polynomial()
    }

    /// `x_1^2 + ... + x_{d-1}^2`.
    pub fn paraboloid(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Precondition("the paraboloid needs d >= 2".into()));
        }
        Self::from_words((1..d).map(|i| Word {
            coeff: 1,
            letters: vec![i, i],
        }))
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Largest variable index used (0 for the zero polynomial).
    pub fn max_variable(&self) -> usize {
        self.words.iter().flat_map(|w| w.letters.iter().copied()).max().unwrap_or(0)
    }

    pub fn degree(&self) -> usize {
        self.words.iter().map(|w| w.letters.len()).max().unwrap_or(0)
    }

    /// Checks the polynomial fits in `d - 1` variables.
    pub fn check_dimension(&self, d: usize) -> Result<()> {
        if d < 1 || self.max_variable() > d - 1 {
            return Err(Error::Precondition(format!(
                "polynomial uses x{} but d = {d} leaves only {} variables",
                self.max_variable(),
                d.saturating_sub(1)
            )));
        }
        Ok(())
    }

    /// `sum integer_image(coeff) * (letters multiplied left to right)`.
    pub fn evaluate(&self, ring: &Ring, point: &[usize]) -> Result<usize> {
        if self.max_variable() > point.len() {
            return Err(Error::DimensionMismatch {
                expected: self.max_variable(),
                got: point.len(),
            });
        }
        Ok(self.evaluate_unchecked(ring, point))
    }

    pub(crate) fn evaluate_unchecked(&self, ring: &Ring, point: &[usize]) -> usize {
        let mut acc = ring.zero();
        for w in &self.words {
            let mut prod = point[w.letters[0] - 1];
            for &l in &w.letters[1..] {
                prod = ring.mul(prod, point[l - 1]);
            }
            acc = ring.add(acc, ring.scale(prod, w.coeff));
        }
        acc
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return f.write_str("0");
        }
        for (i, w) in self.words.iter().enumerate() {
            let c = if i == 0 {
                if w.coeff < 0 {
                    f.write_str("-")?;
                }
                w.coeff.unsigned_abs()
            } else {
                f.write_str(if w.coeff < 0 { " - " } else { " + " })?;
                w.coeff.unsigned_abs()
            };
            if c != 1 {
                write!(f, "{c}*")?;
            }
            let mut j = 0;
            let mut first = true;
            while j < w.letters.len() {
                let mut run = 1;
                while j + run < w.letters.len() && w.letters[j + run] == w.letters[j] {
                    run += 1;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                write!(f, "x{}", w.letters[j])?;
                if run > 1 {
                    write!(f, "^{run}")?;
                }
                j += run;
            }
        }
        Ok(())
    }
}

impl FromStr for NcPolynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for NcPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            text,
            chars: text.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at position {} in '{}'", self.pos, self.text))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("number too large"))
    }

    fn polynomial(&mut self) -> Result<NcPolynomial> {
        if self.chars.is_empty() {
            return Err(self.err("empty polynomial"));
        }
        let mut words = Vec::new();
        let mut sign = if self.eat('-') { -1 } else { 1 };
        loop {
            words.push(self.term(sign)?);
            sign = match self.peek() {
                None => break,
                Some('+') => 1,
                Some('-') => -1,
                Some(_) => return Err(self.err("expected '+' or '-'")),
            };
            self.pos += 1;
        }
        NcPolynomial::from_words(words)
    }

    fn term(&mut self, sign: i64) -> Result<Word> {
        let mut coeff = sign;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let n = i64::try_from(self.number()?).map_err(|_| self.err("coefficient too large"))?;
            coeff *= n;
            if !self.eat('*') {
                return Err(self.err("constant terms are not allowed"));
            }
        }
        let mut letters = Vec::new();
        loop {
            if !(self.eat('x') || self.eat('X')) {
                return Err(self.err("expected a variable xK"));
            }
            let k = self.number()? as usize;
            if k == 0 {
                return Err(self.err("variables are numbered from 1"));
            }
            let reps = if self.eat('^') { self.number()? as usize } else { 1 };
            if reps == 0 {
                return Err(self.err("exponent must be positive"));
            }
            letters.extend(std::iter::repeat_n(k, reps));
            if !self.eat('*') {
                break;
            }
        }
        Ok(Word { coeff, letters })
    }
}
