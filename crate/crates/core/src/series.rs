//! Truncated formal power series in one variable `q` over exact rationals.
//!
//! A [`TruncatedSeries`] stores the coefficients of `q^0 .. q^N` exactly; the
//! truncation order of any binary operation is the minimum of the inputs, and
//! asking for a coefficient beyond the stored range is an error rather than a
//! silent zero.  [`LaurentTruncated`] adds a finite pole order at `q = 0`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Errors from series arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    /// Division by a series that is identically zero to its truncation order.
    DivisorVanishes,
    /// `a / b` with `ord(a) < ord(b)`: the quotient is not a power series.
    OrderMismatch { ord_num: usize, ord_den: usize },
    /// A coefficient beyond the stored truncation order was requested.
    TruncationTooShort { wanted: usize, have: usize },
    /// A Laurent body with `pole_order > 0` must have a nonzero constant term.
    InvalidLaurentBody,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::DivisorVanishes => {
                write!(f, "division by a series that vanishes identically to its truncation")
            }
            SeriesError::OrderMismatch { ord_num, ord_den } => write!(
                f,
                "quotient is not a power series: ord(numerator) = {ord_num} < ord(denominator) = {ord_den}"
            ),
            SeriesError::TruncationTooShort { wanted, have } => {
                write!(f, "coefficient {wanted} requested but series is truncated at {have}")
            }
            SeriesError::InvalidLaurentBody => {
                write!(f, "Laurent body must have a nonzero constant term when the pole order is positive")
            }
        }
    }
}

impl std::error::Error for SeriesError {}

/// Order of vanishing at `q = 0`, or the sentinel when every stored
/// coefficient vanishes.  "`≥ N+1`" and "`= ∞`" cannot be told apart at a
/// finite truncation, so the all-zero case is tagged, never numeric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrdResult {
    Determinate(usize),
    IndeterminateAt(usize),
}

impl OrdResult {
    pub fn determinate(self) -> Option<usize> {
        match self {
            OrdResult::Determinate(m) => Some(m),
            OrdResult::IndeterminateAt(_) => None,
        }
    }
}

/// A formal power series truncated at order `N`: coefficients of `q^0 ..= q^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl TruncatedSeries {
    /// Series from explicit coefficients `c_0, .., c_N`.  Must be nonempty.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series stores at least the constant term");
        TruncatedSeries { coeffs }
    }

    pub fn from_integers(coeffs: Vec<BigInt>) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(BigRational::from_integer).collect())
    }

    /// The zero series truncated at order `n`.
    pub fn zero(n: usize) -> Self {
        TruncatedSeries { coeffs: vec![BigRational::zero(); n + 1] }
    }

    /// The constant series 1 truncated at order `n`.
    pub fn one(n: usize) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// The monomial `c·q^i` truncated at order `n` (requires `i ≤ n`).
    pub fn monomial(c: BigRational, i: usize, n: usize) -> Self {
        assert!(i <= n, "monomial exponent beyond truncation");
        let mut s = Self::zero(n);
        s.coeffs[i] = c;
        s
    }

    /// The coordinate series `q` truncated at order `n ≥ 1`.
    pub fn q(n: usize) -> Self {
        Self::monomial(BigRational::one(), 1, n)
    }

    pub fn trunc_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exact coefficient of `q^i`; an error beyond the truncation order.
    pub fn coeff(&self, i: usize) -> Result<&BigRational, SeriesError> {
        self.coeffs.get(i).ok_or(SeriesError::TruncationTooShort {
            wanted: i,
            have: self.trunc_order(),
        })
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when every coefficient has denominator 1.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }

    /// Drop coefficients beyond order `n` (never extends).
    pub fn truncate(&self, n: usize) -> Self {
        let keep = n.min(self.trunc_order());
        TruncatedSeries { coeffs: self.coeffs[..=keep].to_vec() }
    }

    /// Smallest index with a nonzero coefficient, or the tagged sentinel.
    pub fn ord(&self) -> OrdResult {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                return OrdResult::Determinate(i);
            }
        }
        OrdResult::IndeterminateAt(self.trunc_order())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.trunc_order().min(other.trunc_order());
        let coeffs = (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect();
        TruncatedSeries { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.trunc_order().min(other.trunc_order());
        let coeffs = (0..=n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect();
        TruncatedSeries { coeffs }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Cauchy product, truncated at the minimum input order.  Integer inputs
    /// take a BigInt fast path; the generic path is an exact rational
    /// convolution.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.trunc_order().min(other.trunc_order());
        if self.is_integral() && other.is_integral() {
            let a: Vec<&BigInt> = self.coeffs.iter().map(|c| c.numer()).collect();
            let b: Vec<&BigInt> = other.coeffs.iter().map(|c| c.numer()).collect();
            let mut out = vec![BigInt::zero(); n + 1];
            for (i, ai) in a.iter().enumerate().take(n + 1) {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().enumerate().take(n + 1 - i) {
                    if !bj.is_zero() {
                        out[i + j] += *ai * *bj;
                    }
                }
            }
            return Self::from_integers(out);
        }
        let mut out = vec![BigRational::zero(); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if !other.coeffs[j].is_zero() {
                    out[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// `self^k` by repeated squaring.
    pub fn pow(&self, k: u32) -> Self {
        let n = self.trunc_order();
        let mut result = Self::one(n);
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

    /// Exact quotient.  Common `q`-powers are factored out first; after that
    /// the divisor must have a nonzero constant term.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let ord_den = match other.ord() {
            OrdResult::Determinate(m) => m,
            OrdResult::IndeterminateAt(_) => return Err(SeriesError::DivisorVanishes),
        };
        let n_out = self.trunc_order().min(other.trunc_order());
        if self.is_zero() {
            // 0 / b = 0; the common-power shift costs ord_den stored terms.
            return Ok(Self::zero(n_out.saturating_sub(ord_den)));
        }
        let ord_num = match self.ord() {
            OrdResult::Determinate(m) => m,
            OrdResult::IndeterminateAt(_) => unreachable!(),
        };
        if ord_num < ord_den {
            return Err(SeriesError::OrderMismatch { ord_num, ord_den });
        }
        let a = self.shift_down(ord_den);
        let b = other.shift_down(ord_den);
        let n = a.trunc_order().min(b.trunc_order());
        let b0 = &b.coeffs[0];
        debug_assert!(!b0.is_zero());
        let mut out = vec![BigRational::zero(); n + 1];
        for k in 0..=n {
            let mut acc = a.coeffs[k].clone();
            for j in 0..k {
                if !out[j].is_zero() && !b.coeffs[k - j].is_zero() {
                    acc -= &out[j] * &b.coeffs[k - j];
                }
            }
            out[k] = acc / b0;
        }
        Ok(TruncatedSeries { coeffs: out })
    }

    /// `θ = q·d/dq`: coefficient `i` becomes `i·c_i`.  Truncation unchanged.
    pub fn theta(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        TruncatedSeries { coeffs }
    }

    /// `d/dq`: coefficient `i` becomes `(i+1)·c_{i+1}`; truncation drops by one.
    pub fn q_derivative(&self) -> Self {
        let n = self.trunc_order();
        if n == 0 {
            return Self::zero(0);
        }
        let coeffs = (1..=n)
            .map(|i| &self.coeffs[i] * BigRational::from_integer(BigInt::from(i)))
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Multiply by `q^k` at the same truncation order; the top `k` stored
    /// coefficients fall outside the window and are dropped.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.trunc_order();
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for i in 0..=n.saturating_sub(k) {
            coeffs[i + k] = self.coeffs[i].clone();
        }
        TruncatedSeries { coeffs }
    }

    /// Divide by `q^k` assuming the first `k` coefficients vanish; the
    /// truncation order drops by `k`.
    pub fn shift_down(&self, k: usize) -> Self {
        if k == 0 {
            return self.clone();
        }
        assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()), "shift_down below the order of vanishing");
        assert!(k <= self.trunc_order());
        TruncatedSeries { coeffs: self.coeffs[k..].to_vec() }
    }

    /// Line-oriented text form: header `N=<order>`, then `<i> <p>/<q>` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("N={}\n", self.trunc_order());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{} {}/{}\n", i, c.numer(), c.denom()));
        }
        out
    }

    /// Inverse of [`to_text`]; bit-exact round-trip.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("empty series file")?;
        let n: usize = header
            .trim()
            .strip_prefix("N=")
            .ok_or("missing N= header")?
            .parse()
            .map_err(|e| format!("bad truncation order: {e}"))?;
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for line in lines {
            let mut parts = line.split_whitespace();
            let idx: usize = parts
                .next()
                .ok_or("missing index")?
                .parse()
                .map_err(|e| format!("bad index: {e}"))?;
            if idx > n {
                return Err(format!("index {idx} beyond truncation {n}"));
            }
            let frac = parts.next().ok_or("missing coefficient")?;
            let (num, den) = frac.split_once('/').ok_or("coefficient must be p/q")?;
            let num: BigInt = num.parse().map_err(|e| format!("bad numerator: {e}"))?;
            let den: BigInt = den.parse().map_err(|e| format!("bad denominator: {e}"))?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            coeffs[idx] = BigRational::new(num, den);
        }
        Ok(Self::from_coeffs(coeffs))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                first = false;
                write!(f, "{}", term_str(c, i as isize))?;
            } else if c.is_negative() {
                write!(f, " - {}", term_str(&-c, i as isize))?;
            } else {
                write!(f, " + {}", term_str(c, i as isize))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.trunc_order() + 1)
    }
}

fn term_str(c: &BigRational, i: isize) -> String {
    match i {
        0 => format!("{c}"),
        1 if c.is_one() => "q".to_string(),
        1 => format!("{c}*q"),
        _ if c.is_one() => format!("q^{i}"),
        _ => format!("{c}*q^{i}"),
    }
}

/// `q^{-pole_order} · body` with `body` a truncated power series.  When the
/// pole order is positive the body has a nonzero constant term, so the pole
/// order is honest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentTruncated {
    pole_order: usize,
    body: TruncatedSeries,
}

impl LaurentTruncated {
    pub fn new(pole_order: usize, body: TruncatedSeries) -> Result<Self, SeriesError> {
        if pole_order > 0 {
            match body.ord() {
                OrdResult::Determinate(0) => {}
                _ => return Err(SeriesError::InvalidLaurentBody),
            }
        }
        Ok(LaurentTruncated { pole_order, body })
    }

    pub fn from_series(s: TruncatedSeries) -> Self {
        LaurentTruncated { pole_order: 0, body: s }
    }

    /// Exact quotient `a / b` of power series as a Laurent series: common
    /// `q`-powers decide the pole order.
    pub fn div_series(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<Self, SeriesError> {
        let ord_den = match b.ord() {
            OrdResult::Determinate(m) => m,
            OrdResult::IndeterminateAt(_) => return Err(SeriesError::DivisorVanishes),
        };
        if a.is_zero() {
            let n = a.trunc_order().min(b.trunc_order());
            return Ok(Self::from_series(TruncatedSeries::zero(n.saturating_sub(ord_den))));
        }
        let ord_num = a.ord().determinate().unwrap();
        let k = ord_num.min(ord_den);
        let a2 = a.shift_down(k);
        let b2 = b.shift_down(k);
        if ord_num >= ord_den {
            return Ok(Self::from_series(a2.div(&b2)?));
        }
        // Still a genuine pole of order ord_den - k after cancelling.
        let b3 = b2.shift_down(ord_den - k);
        let n = a2.trunc_order().min(b3.trunc_order());
        let body = a2.truncate(n).div(&b3.truncate(n))?;
        Self::new(ord_den - k, body)
    }

    pub fn pole_order(&self) -> usize {
        self.pole_order
    }

    pub fn body(&self) -> &TruncatedSeries {
        &self.body
    }

    /// Coefficient of `q^i` for `i ≥ -pole_order`.
    pub fn coeff(&self, i: isize) -> Result<&BigRational, SeriesError> {
        let shifted = i + self.pole_order as isize;
        assert!(shifted >= 0, "coefficient below the pole order is zero by construction");
        self.body.coeff(shifted as usize)
    }

    /// `θ` on a Laurent series: `θ(q^{-m}·b) = q^{-m}·(θb - m·b)`.
    pub fn theta(&self) -> Self {
        let m = BigRational::from_integer(BigInt::from(self.pole_order));
        let body = self.body.theta().sub(&self.body.scale(&m));
        // θ may kill the constant term; renormalise the pole order.
        Self::normalized(self.pole_order, body)
    }

    pub fn mul_series(&self, s: &TruncatedSeries) -> Self {
        Self::normalized(self.pole_order, self.body.mul(s))
    }

    fn normalized(pole: usize, body: TruncatedSeries) -> Self {
        if pole == 0 {
            return LaurentTruncated { pole_order: 0, body };
        }
        match body.ord() {
            OrdResult::Determinate(k) if k > 0 => {
                let cancel = k.min(pole);
                LaurentTruncated { pole_order: pole - cancel, body: body.shift_down(cancel) }
            }
            OrdResult::Determinate(_) => LaurentTruncated { pole_order: pole, body },
            OrdResult::IndeterminateAt(_) => {
                // Identically zero to truncation: collapse the pole.
                let n = body.trunc_order().saturating_sub(pole);
                LaurentTruncated { pole_order: 0, body: TruncatedSeries::zero(n) }
            }
        }
    }

    /// Forget the pole when it has cancelled.
    pub fn into_series(self) -> Option<TruncatedSeries> {
        if self.pole_order == 0 {
            Some(self.body)
        } else {
            None
        }
    }
}
