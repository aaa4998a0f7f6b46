//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Monomials are exponent vectors ordered by graded lex; the term map never
//! stores explicit zeros.  The plain-text grammar accepted by [`SparsePoly::parse`]
//! is the CLI's: terms `c * x0^a0 x1^a1 ...` joined by `+`/`-`, rationals as
//! `p/q`; `x`, `y` are aliases for `x0`, `x1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exponent vector with graded-lex ordering (total degree first, then lex).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise quotient if `other` divides `self`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::constant(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::variable(nvars, i), BigRational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lex ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    /// Leading term under graded lex.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        debug_assert_eq!(m.exponents().len(), self.nvars);
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(mm, cc)| (mm.mul(m), cc * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// ∂/∂x_i, exact.
    pub fn partial_derivative(&self, i: usize) -> Self {
        assert!(i < self.nvars);
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[i] = e - 1;
            out.add_term(Monomial::new(exps), c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Evaluate at a rational point.
    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                for _ in 0..e {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    /// True when every coefficient has denominator 1.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }

    /// Max |numerator| over coefficients after clearing nothing; the height
    /// ‖P‖∞ of an integer polynomial.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Multiply through by the lcm of denominators and divide by the gcd of
    /// numerators; sign fixed so the graded-lex leading coefficient is
    /// positive.  Returns the primitive integer polynomial (zero stays zero).
    pub fn primitive_integer_form(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let mut gcd = BigInt::zero();
        for c in self.terms.values() {
            gcd = gcd.gcd(&(c.numer() * &lcm / c.denom()));
        }
        let mut scale = BigRational::new(lcm, gcd);
        if self.leading_term().unwrap().1.is_negative() {
            scale = -scale;
        }
        self.scale(&scale)
    }

    /// Substitute x_i -> a_i·t + b_i, returning univariate coefficients of t
    /// (ascending).  Used for irreducibility certificates via specialization.
    pub fn specialize_line(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(a.len(), self.nvars);
        assert_eq!(b.len(), self.nvars);
        let deg = self.total_degree().unwrap_or(0) as usize;
        let mut acc = vec![BigRational::zero(); deg + 1];
        for (m, c) in &self.terms {
            // Product over variables of (a_i t + b_i)^{e_i}, kept as a dense vec.
            let mut term = vec![c.clone()];
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    let mut next = vec![BigRational::zero(); term.len() + 1];
                    for (k, t) in term.iter().enumerate() {
                        if t.is_zero() {
                            continue;
                        }
                        next[k] += t * &b[i];
                        next[k + 1] += t * &a[i];
                    }
                    term = next;
                }
            }
            for (k, t) in term.into_iter().enumerate() {
                acc[k] += t;
            }
        }
        acc
    }

    /// Parse the plain-text grammar.  `nvars` fixes the ambient variable
    /// count; variables are `x0..x9` (and `x`/`y` for `x0`/`x1`).
    pub fn parse(input: &str, nvars: usize) -> Result<Self, PolyParseError> {
        Parser { input: input.as_bytes(), pos: 0, nvars }.parse_poly()
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Graded-lex descending: leading term first.
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                first = false;
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let vars: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{i}") } else { format!("x{i}^{e}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join(" "))?;
            } else {
                write!(f, "{mag} * {}", vars.join(" "))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyParseError {
    pub message: String,
    pub position: usize,
}

impl fmt::Display for PolyParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.message, self.position)
    }
}

impl std::error::Error for PolyParseError {}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: &str) -> Result<T, PolyParseError> {
        Err(PolyParseError { message: message.to_string(), position: self.pos })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn parse_poly(&mut self) -> Result<SparsePoly, PolyParseError> {
        let mut acc = SparsePoly::zero(self.nvars);
        self.skip_ws();
        if self.pos == self.input.len() {
            return self.err("empty polynomial");
        }
        let mut sign = BigRational::one();
        if let Some(b) = self.peek() {
            if b == b'+' || b == b'-' {
                self.pos += 1;
                if b == b'-' {
                    sign = -sign;
                }
            }
        }
        loop {
            let term = self.parse_term()?;
            acc = acc.add(&term.scale(&sign));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = BigRational::one();
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -BigRational::one();
                }
                Some(_) => return self.err("expected '+' or '-' between terms"),
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<SparsePoly, PolyParseError> {
        self.skip_ws();
        let mut coeff = BigRational::one();
        let mut exps = vec![0u32; self.nvars];
        let mut saw_anything = false;
        if matches!(self.peek(), Some(b'0'..=b'9')) {
            coeff = self.parse_rational()?;
            saw_anything = true;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            }
            self.skip_ws();
        }
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'x') | Some(b'y') => {
                    let idx = self.parse_variable()?;
                    if idx >= self.nvars {
                        return self.err(&format!("variable x{idx} out of range for {} variables", self.nvars));
                    }
                    let mut exp = 1u32;
                    self.skip_ws();
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.skip_ws();
                        exp = self.parse_unsigned()? as u32;
                    }
                    exps[idx] += exp;
                    saw_anything = true;
                    self.skip_ws();
                    if self.peek() == Some(b'*') {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        if !saw_anything {
            return self.err("expected a coefficient or a variable");
        }
        let mut p = SparsePoly::zero(self.nvars);
        p.add_term(Monomial::new(exps), coeff);
        Ok(p)
    }

    fn parse_variable(&mut self) -> Result<usize, PolyParseError> {
        match self.peek() {
            Some(b'y') => {
                self.pos += 1;
                Ok(1)
            }
            Some(b'x') => {
                self.pos += 1;
                match self.peek() {
                    Some(d @ b'0'..=b'9') => {
                        self.pos += 1;
                        Ok((d - b'0') as usize)
                    }
                    _ => Ok(0), // bare `x`
                }
            }
            _ => self.err("expected a variable"),
        }
    }

    fn parse_unsigned(&mut self) -> Result<u64, PolyParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a digit");
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyParseError { message: "integer overflow".into(), position: start })
    }

    fn parse_rational(&mut self) -> Result<BigRational, PolyParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let num: BigInt = std::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| PolyParseError { message: "bad integer".into(), position: start })?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let dstart = self.pos;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
            if dstart == self.pos {
                return self.err("expected denominator digits");
            }
            let den: BigInt = std::str::from_utf8(&self.input[dstart..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| PolyParseError { message: "bad denominator".into(), position: dstart })?;
            if den.is_zero() {
                return self.err("zero denominator");
            }
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn graded_lex_ordering() {
        let a = Monomial::new(vec![0, 2, 0, 0]); // deg 2
        let b = Monomial::new(vec![1, 0, 0, 0]); // deg 1
        let c = Monomial::new(vec![0, 0, 1, 1]); // deg 2, lex-smaller than a
        assert!(b < a);
        assert!(c < a);
        assert!(b < c);
    }

    #[test]
    fn arithmetic_and_degree() {
        let x = SparsePoly::variable(2, 0);
        let y = SparsePoly::variable(2, 1);
        let p = x.mul(&x).add(&y.scale(&rat(3))); // x^2 + 3y
        assert_eq!(p.total_degree(), Some(2));
        assert_eq!(p.num_terms(), 2);
        let q = p.sub(&p);
        assert!(q.is_zero());
        assert_eq!(q.total_degree(), None);
    }

    #[test]
    fn zero_coefficients_never_stored() {
        let x = SparsePoly::variable(2, 0);
        let p = x.add(&x.neg());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn partial_derivatives() {
        // d/dx (x^3 y) = 3 x^2 y
        let p = SparsePoly::parse("x0^3 x1", 2).unwrap();
        let d = p.partial_derivative(0);
        assert_eq!(d, SparsePoly::parse("3 * x0^2 x1", 2).unwrap());
    }

    #[test]
    fn parse_round_trips_display() {
        let p = SparsePoly::parse("3/2 * x0^2 x1 - x3 + 7", 4).unwrap();
        let q = SparsePoly::parse(&p.to_string(), 4).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn parse_aliases_and_signs() {
        let p = SparsePoly::parse("-x + y^2", 2).unwrap();
        let q = SparsePoly::parse("x1^2 - x0", 2).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(SparsePoly::parse("", 2).is_err());
        assert!(SparsePoly::parse("x5", 2).is_err());
        assert!(SparsePoly::parse("3 & x", 2).is_err());
    }

    #[test]
    fn primitive_integer_form_normalises() {
        let p = SparsePoly::parse("2/3 * x0 - 4/3 * x1", 2).unwrap();
        let q = p.primitive_integer_form();
        // leading term under graded lex is the x1 term (lex: [0,1] > [1,0]).
        assert_eq!(q, SparsePoly::parse("2 * x1 - x0", 2).unwrap());
        assert!(q.is_integral());
    }

    #[test]
    fn specialize_line_matches_eval() {
        let p = SparsePoly::parse("x0^2 x1 - 3 * x1^2 + 5", 2).unwrap();
        let a = [rat(2), rat(-1)];
        let b = [rat(1), rat(4)];
        let coeffs = p.specialize_line(&a, &b);
        for t in [-3i64, 0, 2, 7] {
            let t = rat(t);
            let point = [&a[0] * &t + &b[0], &a[1] * &t + &b[1]];
            let direct = p.eval_rational(&point);
            let mut horner = BigRational::zero();
            for c in coeffs.iter().rev() {
                horner = horner * &t + c;
            }
            assert_eq!(horner, direct);
        }
    }
}
