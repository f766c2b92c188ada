//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::poly::{CPoly, C64};
use crate::error::{Error, Result};

type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MPoly {
    vars: Vec<String>,
    terms: BTreeMap<Exponents, C64>,
}

impl MPoly {
    pub fn zero(vars: &[&str]) -> Self {
        Self { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], c: C64) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn var(vars: &[&str], index: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, C64::new(1.0, 0.0));
        p
    }

    /// Variable by name; panics on an unknown name (programming error).
    pub fn named(vars: &[&str], name: &str) -> Self {
        let idx = vars.iter().position(|v| *v == name).expect("unknown variable");
        Self::var(vars, idx)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &C64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn add_term(&mut self, exps: Exponents, c: C64) {
        debug_assert_eq!(exps.len(), self.vars.len());
        let entry = self.terms.entry(exps).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.retain(|_, v| *v != C64::new(0.0, 0.0));
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn eval(&self, point: &[C64]) -> C64 {
        assert_eq!(point.len(), self.vars.len());
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(point).fold(*c, |acc, (&k, &x)| acc * x.powu(k))
            })
            .sum()
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.add_term(d, c * e[var] as f64);
        }
        out
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * k);
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_vars(rhs);
        let mut out = Self { vars: self.vars.clone(), terms: BTreeMap::new() };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(&self.var_refs(), C64::new(1.0, 0.0));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Substitute every variable by a polynomial over a common new variable set.
    pub fn compose(&self, images: &[MPoly]) -> Self {
        assert_eq!(images.len(), self.vars.len());
        let target: Vec<&str> = images[0].var_refs();
        let mut out = Self::zero(&target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(&target, *c);
            for (img, &k) in images.iter().zip(e) {
                if k > 0 {
                    term = term.mul(&img.pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Univariate polynomial in `var` with every other variable fixed.
    /// The nominal degree is `degree_in(var)`.
    pub fn to_univariate(&self, var: usize, point: &[C64]) -> CPoly {
        let n = self.degree_in(var) as usize;
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        for (e, c) in &self.terms {
            let v = e
                .iter()
                .zip(point)
                .enumerate()
                .filter(|(i, _)| *i != var)
                .fold(*c, |acc, (_, (&k, &x))| acc * x.powu(k));
            coeffs[e[var] as usize] += v;
        }
        CPoly::new(coeffs)
    }

    /// Drop coefficients below `rel * max|coeff|`.
    pub fn pruned(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coeff();
        let mut out = self.clone();
        out.terms.retain(|_, c| c.norm() > cut);
        out
    }

    fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    fn check_vars(&self, rhs: &Self) {
        assert_eq!(self.vars, rhs.vars, "variable sets differ");
    }

    /// Parse polynomial text over the given variables.
    pub fn parse(text: &str, vars: &[&str]) -> Result<Self> {
        Parser { src: text.as_bytes(), pos: 0, vars }.parse_all()
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:?}{:+?}i)", c.re, c.im)?;
            for (v, &k) in self.vars.iter().zip(e) {
                match k {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    _ => write!(f, "*{v}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// Recursive-descent parser for the polynomial grammar:
///
/// ```text
/// expr    := ['+'|'-'] term (('+'|'-') term)*
/// term    := factor ('*' factor)*
/// factor  := atom ['^' integer]
/// atom    := number ['i'] | 'i' | ident | '(' expr ')' | ('+'|'-') factor
/// number  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
/// ```
///
/// Whitespace is insignificant. `i` is the imaginary unit and may suffix a
/// number (`2.5i`). Identifiers must belong to the declared variable list.
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<MPoly> {
        if self.peek().is_none() {
            return self.err("empty expression");
        }
        let p = self.expr()?;
        if let Some(ch) = self.peek() {
            return self.err(format!("unexpected character '{}'", ch as char));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc.add(&rhs) } else { acc.sub(&rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.factor()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = acc.mul(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected non-negative integer exponent");
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let k: u32 = match text.parse() {
                Ok(k) if k <= 64 => k,
                _ => {
                    self.pos = start;
                    return self.err("exponent out of range");
                }
            };
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly> {
        let vars = self.vars;
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected ')'"),
                }
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.scale(C64::new(-1.0, 0.0)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.factor()
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => {
                let value = self.number()?;
                if self.src.get(self.pos) == Some(&b'i') && !self.ident_continues(self.pos + 1) {
                    self.pos += 1;
                    return Ok(MPoly::constant(vars, C64::new(0.0, value)));
                }
                Ok(MPoly::constant(vars, C64::new(value, 0.0)))
            }
            Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => {
                let start = self.pos;
                while self.ident_continues(self.pos) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "i" {
                    return Ok(MPoly::constant(vars, C64::new(0.0, 1.0)));
                }
                match vars.iter().position(|v| *v == name) {
                    Some(idx) => Ok(MPoly::var(vars, idx)),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown variable '{name}' (expected one of {vars:?})"))
                    }
                }
            }
            Some(ch) => self.err(format!("unexpected character '{}'", ch as char)),
        }
    }

    fn ident_continues(&self, at: usize) -> bool {
        self.src.get(at).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return self.err("malformed number");
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
                return self.err("malformed exponent");
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("malformed number")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: [&str; 3] = ["G", "t1", "t2"];

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn parses_static_generating_function() {
        let p = MPoly::parse("G*t1 - t2", &V).unwrap();
        assert_eq!(p.eval(&[c(2.0, 0.0), c(3.0, 0.0), c(1.0, 0.0)]), c(5.0, 0.0));
    }

    #[test]
    fn complex_literals_and_powers() {
        let p = MPoly::parse("(1+2i)*G^2 - 3.5e-1i + i*t2", &V).unwrap();
        let v = p.eval(&[c(1.0, 1.0), c(0.0, 0.0), c(2.0, 0.0)]);
        // (1+2i)(2i) - 0.35i + 2i
        let expect = c(1.0, 2.0) * c(0.0, 2.0) - c(0.0, 0.35) + c(0.0, 2.0);
        assert!((v - expect).norm() < 1e-15);
    }

    #[test]
    fn unary_minus_binds_to_factor() {
        let p = MPoly::parse("-G^2", &V).unwrap();
        assert_eq!(p.eval(&[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]), c(-9.0, 0.0));
    }

    #[test]
    fn errors_carry_position() {
        match MPoly::parse("G*t1 + q", &V) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        match MPoly::parse("G*(t1 + t2", &V) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 10),
            other => panic!("{other:?}"),
        }
        assert!(matches!(MPoly::parse("G^x", &V), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(MPoly::parse("", &V), Err(Error::Parse { .. })));
    }

    #[test]
    fn partial_and_compose() {
        let p = MPoly::parse("G^2*t1 + 3*t2", &V).unwrap();
        let dg = p.partial(0);
        assert_eq!(dg.eval(&[c(2.0, 0.0), c(5.0, 0.0), c(0.0, 0.0)]), c(20.0, 0.0));
        let w = ["s"];
        let s = MPoly::var(&w, 0);
        let one = MPoly::constant(&w, c(1.0, 0.0));
        let q = p.compose(&[s.clone(), s.add(&one), one.clone()]);
        // s^2 (s+1) + 3
        assert_eq!(q.eval(&[c(2.0, 0.0)]), c(15.0, 0.0));
    }

    #[test]
    fn univariate_restriction_keeps_nominal_degree() {
        let p = MPoly::parse("t1*G^2 + G - t2", &V).unwrap();
        let u = p.to_univariate(0, &[c(0.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(u.nominal_degree(), 2);
        assert_eq!(u.coeffs(), &[c(-4.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    }
}
