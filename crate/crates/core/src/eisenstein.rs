//! Exact q-expansions of E₂, E₄, E₆, Δ, j and the curve bundle
//! φ(q) = (q, E₂(q), E₄(q), E₆(q)).
//!
//! The normalisation constants (−24, 240, −504) are not trusted as given:
//! every construction is validated against the Ramanujan system
//!
//! ```text
//!   θE₂ = (E₂² − E₄)/12,   θE₄ = (E₂E₄ − E₆)/3,   θE₆ = (E₂E₆ − E₄²)/2
//! ```
//!
//! which, together with the leading term 1, pins the constants exactly.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::SparsePoly;
use crate::series::{LaurentTruncated, OrdResult, SeriesError, TruncatedSeries};

/// Full Ramanujan-system validation is Θ(N²) exact work; beyond this many
/// coefficients only a prefix of the identities is checked (the identities
/// are exact power-series identities, so a long prefix already pins the
/// constants and guards the σ implementation).
pub const RAMANUJAN_CHECK_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EisensteinError {
    /// An internal Ramanujan-system self-check failed: identity `index`
    /// (0,1,2) first differs at the given coefficient.
    RamanujanCheckFailed { identity: usize, coefficient: usize },
    /// compose_poly was asked for more terms than the bundle stores.
    TruncationTooShort { wanted: usize, have: usize },
    /// compose_poly over a polynomial that is not in x₀..x₃.
    ArityMismatch { expected: usize, got: usize },
}

impl fmt::Display for EisensteinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EisensteinError::RamanujanCheckFailed { identity, coefficient } => write!(
                f,
                "Ramanujan identity {identity} fails at coefficient {coefficient}: the series constants are wrong"
            ),
            EisensteinError::TruncationTooShort { wanted, have } => {
                write!(f, "bundle truncated at {have}, need {wanted}")
            }
            EisensteinError::ArityMismatch { expected, got } => {
                write!(f, "polynomial has {got} variables, bundle substitutes {expected}")
            }
        }
    }
}

impl std::error::Error for EisensteinError {}

/// Sum of `d^e` over positive divisors `d` of `m`, by trial division up to √m.
pub fn sigma(m: u64, e: u32) -> BigInt {
    assert!(m >= 1, "sigma is defined for m >= 1");
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            acc += BigInt::from(d).pow(e);
            let other = m / d;
            if other != d {
                acc += BigInt::from(other).pow(e);
            }
        }
        d += 1;
    }
    acc
}

fn raw_eisenstein(weight: u32, constant: i64, n: usize) -> TruncatedSeries {
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigInt::one());
    for m in 1..=n as u64 {
        coeffs.push(BigInt::from(constant) * sigma(m, weight - 1));
    }
    TruncatedSeries::from_integers(coeffs)
}

/// The three residual series of the Ramanujan system at the common truncation
/// of the inputs; all three vanish identically iff the system holds exactly.
pub fn ramanujan_residuals(
    e2: &TruncatedSeries,
    e4: &TruncatedSeries,
    e6: &TruncatedSeries,
) -> [TruncatedSeries; 3] {
    let r12 = BigRational::new(BigInt::one(), BigInt::from(12));
    let r3 = BigRational::new(BigInt::one(), BigInt::from(3));
    let r2 = BigRational::new(BigInt::one(), BigInt::from(2));
    let r0 = e2.theta().sub(&e2.mul(e2).sub(e4).scale(&r12));
    let r1 = e4.theta().sub(&e2.mul(e4).sub(e6).scale(&r3));
    let r2s = e6.theta().sub(&e2.mul(e6).sub(&e4.mul(e4)).scale(&r2));
    [r0, r1, r2s]
}

fn check_ramanujan(
    e2: &TruncatedSeries,
    e4: &TruncatedSeries,
    e6: &TruncatedSeries,
    cap: usize,
) -> Result<(), EisensteinError> {
    let n = e2.trunc_order().min(cap);
    let (a, b, c) = (e2.truncate(n), e4.truncate(n), e6.truncate(n));
    for (identity, r) in ramanujan_residuals(&a, &b, &c).iter().enumerate() {
        if let OrdResult::Determinate(coefficient) = r.ord() {
            return Err(EisensteinError::RamanujanCheckFailed { identity, coefficient });
        }
    }
    Ok(())
}

// The constants are validated once per process at a fixed prefix length; each
// PhiBundle construction re-validates at its own truncation.
fn validated_constants() -> &'static (i64, i64, i64) {
    static CONSTANTS: OnceLock<(i64, i64, i64)> = OnceLock::new();
    CONSTANTS.get_or_init(|| {
        let consts = (-24, 240, -504);
        let n = 128;
        let e2 = raw_eisenstein(2, consts.0, n);
        let e4 = raw_eisenstein(4, consts.1, n);
        let e6 = raw_eisenstein(6, consts.2, n);
        check_ramanujan(&e2, &e4, &e6, n)
            .expect("Ramanujan system rejects the Eisenstein normalisation constants");
        consts
    })
}

/// Exact q-expansion of the normalised Eisenstein series of weight 2, 4 or 6,
/// truncated at order `n`.
pub fn eisenstein_series(weight: u32, n: usize) -> TruncatedSeries {
    let (c2, c4, c6) = *validated_constants();
    match weight {
        2 => raw_eisenstein(2, c2, n),
        4 => raw_eisenstein(4, c4, n),
        6 => raw_eisenstein(6, c6, n),
        _ => panic!("Eisenstein weight must be 2, 4 or 6"),
    }
}

/// Δ = (E₄³ − E₆²)/1728, exact, with ord 1 and integer coefficients.
pub fn delta_series(n: usize) -> TruncatedSeries {
    let e4 = eisenstein_series(4, n);
    let e6 = eisenstein_series(6, n);
    let num = e4.pow(3).sub(&e6.mul(&e6));
    let delta = num.scale(&BigRational::new(BigInt::one(), BigInt::from(1728)));
    debug_assert!(delta.is_integral());
    debug_assert_eq!(delta.ord(), OrdResult::Determinate(1));
    delta
}

/// j = E₄³/Δ as a Laurent series with pole order 1 at q = 0.
pub fn j_series(n: usize) -> LaurentTruncated {
    let e4 = eisenstein_series(4, n);
    let delta = delta_series(n);
    LaurentTruncated::div_series(&e4.pow(3), &delta)
        .expect("Delta has exact order 1, so j has a simple pole")
}

/// The curve bundle φ(q) = (q, E₂, E₄, E₆) at a common truncation order,
/// with the Ramanujan system verified exactly at construction (up to
/// [`RAMANUJAN_CHECK_CAP`] coefficients).
#[derive(Debug, Clone)]
pub struct PhiBundle {
    q_series: TruncatedSeries,
    e2: TruncatedSeries,
    e4: TruncatedSeries,
    e6: TruncatedSeries,
}

impl PhiBundle {
    pub fn new(n: usize) -> Self {
        let bundle = PhiBundle {
            q_series: if n == 0 { TruncatedSeries::zero(0) } else { TruncatedSeries::q(n) },
            e2: eisenstein_series(2, n),
            e4: eisenstein_series(4, n),
            e6: eisenstein_series(6, n),
        };
        check_ramanujan(&bundle.e2, &bundle.e4, &bundle.e6, RAMANUJAN_CHECK_CAP)
            .expect("freshly generated Eisenstein series must satisfy the Ramanujan system");
        debug_assert!(bundle.e2.is_integral() && bundle.e4.is_integral() && bundle.e6.is_integral());
        bundle
    }

    pub fn trunc_order(&self) -> usize {
        self.e2.trunc_order()
    }

    pub fn q_series(&self) -> &TruncatedSeries {
        &self.q_series
    }

    pub fn e2(&self) -> &TruncatedSeries {
        &self.e2
    }

    pub fn e4(&self) -> &TruncatedSeries {
        &self.e4
    }

    pub fn e6(&self) -> &TruncatedSeries {
        &self.e6
    }

    /// Exact substitution x₀←q, x₁←E₂, x₂←E₄, x₃←E₆ at the bundle's
    /// truncation.  Power tables for each variable are built once.
    pub fn compose_poly(&self, p: &SparsePoly) -> Result<TruncatedSeries, EisensteinError> {
        if p.nvars() != 4 {
            return Err(EisensteinError::ArityMismatch { expected: 4, got: p.nvars() });
        }
        let n = self.trunc_order();
        let mut max_exp = [0u32; 4];
        for (mono, _) in p.terms() {
            for (i, &e) in mono.exponents().iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let pow_table = |s: &TruncatedSeries, top: u32| -> Vec<TruncatedSeries> {
            let mut v = Vec::with_capacity(top as usize + 1);
            v.push(TruncatedSeries::one(n));
            for k in 1..=top {
                let prev = &v[(k - 1) as usize];
                v.push(prev.mul(s));
            }
            v
        };
        let p2 = pow_table(&self.e2, max_exp[1]);
        let p4 = pow_table(&self.e4, max_exp[2]);
        let p6 = pow_table(&self.e6, max_exp[3]);
        let mut acc = TruncatedSeries::zero(n);
        for (mono, coeff) in p.terms() {
            let e = mono.exponents();
            let j0 = e[0] as usize;
            if j0 > n {
                continue; // q^{j0} is beyond the window entirely
            }
            let mut term = p2[e[1] as usize].mul(&p4[e[2] as usize]);
            term = term.mul(&p6[e[3] as usize]);
            acc = acc.add(&term.shift_up(j0).scale(coeff));
        }
        Ok(acc)
    }
}

/// Standalone form of [`PhiBundle::compose_poly`].
pub fn compose_poly(p: &SparsePoly, bundle: &PhiBundle) -> Result<TruncatedSeries, EisensteinError> {
    bundle.compose_poly(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::SparsePoly;

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn sigma_small_values() {
        // Brute-force divisor enumeration as the oracle.
        let brute = |m: u64, e: u32| -> BigInt {
            (1..=m).filter(|d| m % d == 0).map(|d| BigInt::from(d).pow(e)).sum()
        };
        assert_eq!(sigma(1, 3), int(1));
        assert_eq!(sigma(2, 3), int(9));
        assert_eq!(sigma(6, 1), int(12));
        for m in 1..=60 {
            for e in 1..=5 {
                assert_eq!(sigma(m, e), brute(m, e), "sigma({m},{e})");
            }
        }
    }

    #[test]
    fn eisenstein_leading_coefficients() {
        let e4 = eisenstein_series(4, 2);
        assert_eq!(e4.coeffs()[..3], [int(1).into(), int(240).into(), int(2160).into()]);
        let e2 = eisenstein_series(2, 2);
        assert_eq!(e2.coeffs()[..3], [int(1).into(), int(-24).into(), int(-72).into()]);
        let e6 = eisenstein_series(6, 2);
        assert_eq!(e6.coeffs()[..3], [int(1).into(), int(-504).into(), int(-16632).into()]);
    }

    #[test]
    fn e4_cubed_matches_convolution_oracle() {
        // E4^3 at N=3 from the divisor-sum oracle, by naive convolution.
        let e4 = eisenstein_series(4, 3);
        let cube = e4.pow(3);
        let expected = [1i64, 720, 179280, 16954560];
        for (i, want) in expected.iter().enumerate() {
            assert_eq!(cube.coeff(i).unwrap(), &BigRational::from_integer(int(*want)));
        }
    }

    #[test]
    fn delta_first_terms_and_ord() {
        let d = delta_series(4);
        let expected = [0i64, 1, -24, 252, -1472];
        for (i, want) in expected.iter().enumerate() {
            assert_eq!(d.coeff(i).unwrap(), &BigRational::from_integer(int(*want)));
        }
        assert_eq!(d.ord(), OrdResult::Determinate(1));
    }

    #[test]
    fn delta_definition_is_exact() {
        // 1728·Δ − (E₄³ − E₆²) = 0 identically.
        let n = 40;
        let e4 = eisenstein_series(4, n);
        let e6 = eisenstein_series(6, n);
        let lhs = delta_series(n).scale(&BigRational::from_integer(int(1728)));
        let rhs = e4.pow(3).sub(&e6.mul(&e6));
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn j_series_leading_terms() {
        let j = j_series(6);
        assert_eq!(j.pole_order(), 1);
        assert_eq!(j.coeff(-1).unwrap(), &BigRational::from_integer(int(1)));
        assert_eq!(j.coeff(0).unwrap(), &BigRational::from_integer(int(744)));
        assert!(j.body().is_integral());
    }

    #[test]
    fn ramanujan_system_exact() {
        let b = PhiBundle::new(120);
        for r in ramanujan_residuals(b.e2(), b.e4(), b.e6()) {
            assert!(r.is_zero());
        }
    }

    #[test]
    fn theta_log_delta_is_e2() {
        // θΔ/Δ = E₂, checked at N=50 in the cleared form θΔ = E₂·Δ.
        let n = 50;
        let delta = delta_series(n);
        let e2 = eisenstein_series(2, n);
        assert!(delta.theta().sub(&e2.mul(&delta)).is_zero());
        // And through the division operation itself.
        let quot = delta.theta().div(&delta).unwrap();
        assert_eq!(quot, e2.truncate(quot.trunc_order()));
    }

    #[test]
    fn theta_e2_from_the_system() {
        let n = 30;
        let e2 = eisenstein_series(2, n);
        let e4 = eisenstein_series(4, n);
        let rhs = e2.mul(&e2).sub(&e4).scale(&BigRational::new(int(1), int(12)));
        assert_eq!(e2.theta(), rhs);
    }

    #[test]
    fn lemma_312_theta_j_cleared_form() {
        // θj·(E₄³−E₆²) = −1728·E₄²·E₆ as Laurent × series, exact.
        let n = 60;
        let e4 = eisenstein_series(4, n);
        let e6 = eisenstein_series(6, n);
        let j = j_series(n);
        let num = e4.pow(3).sub(&e6.mul(&e6));
        let lhs = j.theta().mul_series(&num);
        let rhs = e4.mul(&e4).mul(&e6).scale(&BigRational::from_integer(int(-1728)));
        let lhs = lhs.into_series().expect("pole cancels against ord-1 factor");
        let n_common = lhs.trunc_order().min(rhs.trunc_order());
        assert!(lhs.truncate(n_common).sub(&rhs.truncate(n_common)).is_zero());
    }

    #[test]
    fn coefficient_growth_bound() {
        // |m-th coefficient of E_{2k}| <= |c_{2k}|·m^{2k}
        for (w, c) in [(2u32, 24i64), (4, 240), (6, 504)] {
            let e = eisenstein_series(w, 200);
            for m in 1..=200usize {
                let bound = int(c) * BigInt::from(m).pow(w);
                assert!(e.coeff(m).unwrap().numer().abs() <= bound);
            }
        }
    }

    #[test]
    fn phi_bundle_integrality_and_base_point() {
        let b = PhiBundle::new(16);
        assert!(b.e2().is_integral() && b.e4().is_integral() && b.e6().is_integral());
        // φ(0) = (0, 1, 1, 1)
        assert!(b.q_series().coeff(0).unwrap().is_zero());
        assert!(b.e2().coeff(0).unwrap().is_one());
        assert!(b.e4().coeff(0).unwrap().is_one());
        assert!(b.e6().coeff(0).unwrap().is_one());
    }

    #[test]
    fn compose_coordinates() {
        let b = PhiBundle::new(12);
        let x0 = SparsePoly::variable(4, 0);
        let x1 = SparsePoly::variable(4, 1);
        assert_eq!(b.compose_poly(&x0).unwrap(), *b.q_series());
        assert_eq!(b.compose_poly(&x1).unwrap(), *b.e2());
        assert_eq!(b.compose_poly(&x1).unwrap().ord(), OrdResult::Determinate(0));
    }

    #[test]
    fn compose_discriminant_polynomial() {
        // x₂³ − x₃² composes to 1728·Δ, ord 1.
        let b = PhiBundle::new(20);
        let p = SparsePoly::variable(4, 2).pow(3).sub(&SparsePoly::variable(4, 3).pow(2));
        let composed = b.compose_poly(&p).unwrap();
        assert_eq!(composed.ord(), OrdResult::Determinate(1));
        let delta1728 = delta_series(20).scale(&BigRational::from_integer(int(1728)));
        assert_eq!(composed, delta1728);
    }
}
