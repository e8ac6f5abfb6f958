//! Ring-spec DSL: `zmod(N) | gf(Q) | gf(P,K) | mat(N, spec) | prod(spec, spec, ...)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::arith::{checked_pow, is_prime, prime_power};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingSpec {
    Zmod(u64),
    Galois { p: u64, k: u32 },
    Matrix { n: usize, base: Box<RingSpec> },
    Product(Vec<RingSpec>),
    Table(TableSpec),
}

/// Explicit Cayley tables. Elements are `0..size`; tables are row-major `size * size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableSpec {
    pub label: String,
    pub size: usize,
    pub add: Arc<Vec<u32>>,
    pub mul: Arc<Vec<u32>>,
    pub zero: usize,
    pub one: usize,
}

impl RingSpec {
    pub fn parse(text: &str) -> Result<RingSpec> {
        let cleaned: String = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let mut parser = Parser {
            s: cleaned.as_bytes(),
            pos: 0,
        };
        let spec = parser.spec()?;
        if parser.pos != parser.s.len() {
            return Err(parser.error("trailing input"));
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Number of elements, if it fits in a u64.
    pub fn size(&self) -> Option<u64> {
        match self {
            RingSpec::Zmod(n) => Some(*n),
            RingSpec::Galois { p, k } => checked_pow(*p, *k),
            RingSpec::Matrix { n, base } => checked_pow(base.size()?, (*n * *n) as u32),
            RingSpec::Product(parts) => parts
                .iter()
                .try_fold(1u64, |acc, p| acc.checked_mul(p.size()?)),
            RingSpec::Table(t) => Some(t.size as u64),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RingSpec::Zmod(n) if *n < 2 => {
                return Err(Error::InvalidRing(format!("zmod({n}) needs n >= 2")))
            }
            RingSpec::Galois { p, k } => {
                if !is_prime(*p) {
                    return Err(Error::InvalidRing(format!("{p} is not prime")));
                }
                if *k < 1 {
                    return Err(Error::InvalidRing("gf degree must be >= 1".into()));
                }
            }
            RingSpec::Matrix { n, base } => {
                if *n < 1 {
                    return Err(Error::InvalidRing("matrix size must be >= 1".into()));
                }
                base.validate()?;
            }
            RingSpec::Product(parts) => {
                if parts.len() < 2 {
                    return Err(Error::InvalidRing("prod needs at least two factors".into()));
                }
                for p in parts {
                    p.validate()?;
                }
            }
            _ => {}
        }
        match self.size() {
            Some(s) if s <= MAX_RING_SIZE => Ok(()),
            _ => Err(Error::InvalidRing(format!("{self} is too large"))),
        }
    }
}

/// Largest ring this crate will construct.
pub const MAX_RING_SIZE: u64 = 1 << 40;

impl FromStr for RingSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RingSpec::parse(s)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Zmod(n) => write!(f, "zmod({n})"),
            RingSpec::Galois { p, k } => write!(f, "gf({})", p.pow(*k)),
            RingSpec::Matrix { n, base } => write!(f, "mat({n},{base})"),
            RingSpec::Product(parts) => {
                write!(f, "prod(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            RingSpec::Table(t) => f.write_str(&t.label),
        }
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.s[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{token}'")))
        }
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    fn spec(&mut self) -> Result<RingSpec> {
        if self.eat("zmod(") {
            let n = self.number()?;
            self.expect(")")?;
            Ok(RingSpec::Zmod(n))
        } else if self.eat("gf(") {
            let q = self.number()?;
            let spec = if self.eat(",") {
                let k = self.number()?;
                if !is_prime(q) {
                    return Err(Error::Parse(format!("gf({q},{k}): {q} is not prime")));
                }
                let k = u32::try_from(k).map_err(|_| self.error("degree out of range"))?;
                RingSpec::Galois { p: q, k }
            } else {
                let (p, k) = prime_power(q)
                    .ok_or_else(|| Error::Parse(format!("gf({q}): {q} is not a prime power")))?;
                RingSpec::Galois { p, k }
            };
            self.expect(")")?;
            Ok(spec)
        } else if self.eat("mat(") {
            let n = self.number()?;
            if n < 1 {
                return Err(Error::Parse("mat: n must be >= 1".into()));
            }
            self.expect(",")?;
            let base = self.spec()?;
            self.expect(")")?;
            Ok(RingSpec::Matrix {
                n: n as usize,
                base: Box::new(base),
            })
        } else if self.eat("prod(") {
            let mut parts = vec![self.spec()?];
            while self.eat(",") {
                parts.push(self.spec()?);
            }
            self.expect(")")?;
            if parts.len() < 2 {
                return Err(Error::Parse("prod needs at least two factors".into()));
            }
            Ok(RingSpec::Product(parts))
        } else {
            Err(self.error("expected zmod, gf, mat or prod"))
        }
    }
}
