//! Symbolic conditional mutual-information atoms and signed sums of them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `I(left; right | given)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MiTerm {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub given: Vec<String>,
}

impl MiTerm {
    pub fn new<S: AsRef<str>>(left: &[S], right: &[S], given: &[S]) -> Result<Self> {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        let term = Self {
            left: own(left),
            right: own(right),
            given: own(given),
        };
        term.check()?;
        Ok(term)
    }

    fn check(&self) -> Result<()> {
        let bad = |reason: &str| Error::Parse {
            text: self.to_string(),
            reason: reason.to_string(),
        };
        if self.left.is_empty() || self.right.is_empty() {
            return Err(bad("both sides of a mutual information need variables"));
        }
        let all: Vec<&String> = self
            .left
            .iter()
            .chain(&self.right)
            .chain(&self.given)
            .collect();
        for (i, a) in all.iter().enumerate() {
            if all[i + 1..].contains(a) {
                return Err(bad("variable sets must be pairwise disjoint"));
            }
        }
        Ok(())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.left
            .iter()
            .chain(&self.right)
            .chain(&self.given)
            .map(String::as_str)
    }

    /// Applies a name substitution to every variable of the term.
    pub fn renamed(&self, f: &impl Fn(&str) -> String) -> Self {
        let map = |v: &[String]| v.iter().map(|s| f(s)).collect();
        Self {
            left: map(&self.left),
            right: map(&self.right),
            given: map(&self.given),
        }
    }
}

impl fmt::Display for MiTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I({}; {}", self.left.join(","), self.right.join(","))?;
        if !self.given.is_empty() {
            write!(f, " | {}", self.given.join(","))?;
        }
        write!(f, ")")
    }
}

/// A signed sum of mutual-information terms plus a constant, in bits.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MiExpr {
    pub terms: Vec<(i8, MiTerm)>,
    pub constant: f64,
}

impl MiExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(t: MiTerm) -> Self {
        Self {
            terms: vec![(1, t)],
            constant: 0.0,
        }
    }

    pub fn plus(mut self, t: MiTerm) -> Self {
        self.terms.push((1, t));
        self
    }

    pub fn minus(mut self, t: MiTerm) -> Self {
        self.terms.push((-1, t));
        self
    }

    /// Concatenates `other` with its signs multiplied by `sign`.
    pub fn add_scaled(mut self, sign: i8, other: &MiExpr) -> Self {
        self.terms
            .extend(other.terms.iter().map(|(s, t)| (s * sign, t.clone())));
        self.constant += f64::from(sign) * other.constant;
        self
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().flat_map(|(_, t)| t.variables())
    }

    pub fn renamed(&self, f: &impl Fn(&str) -> String) -> Self {
        Self {
            terms: self.terms.iter().map(|(s, t)| (*s, t.renamed(f))).collect(),
            constant: self.constant,
        }
    }

    /// Parses text such as `I(Y2; U1c,X2 | U2c) - I(U1c; X2) + 0.5`.
    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).expr()
    }
}

impl fmt::Display for MiExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (sign, t) in &self.terms {
            match (first, *sign < 0) {
                (true, true) => write!(f, "-{t}")?,
                (true, false) => write!(f, "{t}")?,
                (false, true) => write!(f, " - {t}")?,
                (false, false) => write!(f, " + {t}")?,
            }
            first = false;
        }
        if self.constant != 0.0 || first {
            if first {
                write!(f, "{}", self.constant)?;
            } else if self.constant < 0.0 {
                write!(f, " - {}", -self.constant)?;
            } else {
                write!(f, " + {}", self.constant)?;
            }
        }
        Ok(())
    }
}

pub(crate) struct Parser<'a> {
    text: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Self {
            text,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    pub(crate) fn error(&self, reason: impl Into<String>) -> Error {
        Error::Parse {
            text: self.text.to_string(),
            reason: format!("{} (at offset {})", reason.into(), self.pos),
        }
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(crate) fn rest_starts_with(&mut self, s: &str) -> bool {
        self.skip_ws();
        let rest: String = self.chars[self.pos..].iter().take(s.len()).collect();
        rest == s
    }

    pub(crate) fn advance(&mut self, n: usize) {
        self.pos += n;
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                self.pos += 1;
            } else {
                break;
            }
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    pub(crate) fn number(&mut self) -> Option<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_digit() || self.chars[self.pos] == '.')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn name_list(&mut self) -> Result<Vec<String>> {
        let mut names = vec![self.ident()?];
        while self.eat(',') {
            names.push(self.ident()?);
        }
        Ok(names)
    }

    fn mi_term(&mut self) -> Result<MiTerm> {
        if self.ident()? != "I" {
            return Err(self.error("expected `I(`"));
        }
        self.expect('(')?;
        let left = self.name_list()?;
        self.expect(';')?;
        let right = self.name_list()?;
        let given = if self.eat('|') {
            self.name_list()?
        } else {
            Vec::new()
        };
        self.expect(')')?;
        let t = MiTerm { left, right, given };
        t.check()?;
        Ok(t)
    }

    /// One signed summand: either a constant or an `I(..)` atom.
    fn summand(&mut self, sign: i8, out: &mut MiExpr) -> Result<()> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let v = self.number().ok_or_else(|| self.error("bad number"))?;
                out.constant += f64::from(sign) * v;
            }
            Some('I') => {
                let t = self.mi_term()?;
                out.terms.push((sign, t));
            }
            _ => return Err(self.error("expected `I(` or a number")),
        }
        Ok(())
    }

    pub(crate) fn expr(&mut self) -> Result<MiExpr> {
        let mut out = MiExpr::zero();
        let sign = if self.eat('-') { -1 } else { 1 };
        self.summand(sign, &mut out)?;
        loop {
            let sign = if self.eat('+') {
                1
            } else if self.eat('-') {
                -1
            } else {
                break;
            };
            self.summand(sign, &mut out)?;
        }
        if !self.at_end() {
            return Err(self.error("trailing input"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_compound_rhs() {
        let e = MiExpr::parse("I(Y2; U2pb,U1c,X2,U2c) + I(U1c; X2| U2c)").unwrap();
        assert_eq!(e.terms.len(), 2);
        assert_eq!(e.terms[1].1.given, vec!["U2c".to_string()]);
        assert_eq!(e.constant, 0.0);
        let back = MiExpr::parse(&e.to_string()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn parses_signs_and_constants() {
        let e = MiExpr::parse("-I(A;B) + 0.5 - I(A; C|B)").unwrap();
        assert_eq!(e.terms[0].0, -1);
        assert_eq!(e.terms[1].0, -1);
        assert_eq!(e.constant, 0.5);
        assert_eq!(MiExpr::parse("0").unwrap(), MiExpr::zero());
    }

    #[test]
    fn rejects_overlapping_sets() {
        assert!(MiExpr::parse("I(A; A)").is_err());
        assert!(MiExpr::parse("I(A; B | B)").is_err());
        assert!(MiExpr::parse("I(A; B").is_err());
        assert!(MiExpr::parse("I(A; B) junk").is_err());
    }
}
