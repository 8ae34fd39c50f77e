//! Exact arithmetic for the coefficient field: rational functions in the
//! formal deformation parameters `h` and `r` over the rationals.
//!
//! Every value is kept in canonical form: numerator and denominator are
//! coprime and the denominator has leading coefficient +1 under the
//! graded-lexicographic term order with `h` senior to `r`. Equality is
//! therefore plain structural equality. Both parameters are real, so the
//! *-involution of the algebra layer fixes scalars.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero scalar")]
    DivisionByZero,
    #[error("denominator vanishes at h={h}, r={r}")]
    Pole { h: BigRational, r: BigRational },
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exponent pair of the monomial `h^h * r^r`, graded-lex ordered (`h` senior).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exp {
    pub h: u32,
    pub r: u32,
}

impl Exp {
    pub const ONE: Exp = Exp { h: 0, r: 0 };

    fn total(&self) -> u32 {
        self.h + self.r
    }
}

impl Ord for Exp {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.total(), self.h).cmp(&(other.total(), other.h))
    }
}

impl PartialOrd for Exp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `h` and `r` with rational coefficients. No zero terms are
/// stored; the term map is ordered by the graded-lex order on exponents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamPoly {
    terms: BTreeMap<Exp, BigRational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn one() -> Self {
        ParamPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = ParamPoly::default();
        p.insert(Exp::ONE, c);
        p
    }

    pub fn int(n: i64) -> Self {
        ParamPoly::constant(rat_int(n))
    }

    pub fn var_h() -> Self {
        ParamPoly::monomial(Exp { h: 1, r: 0 }, BigRational::one())
    }

    pub fn var_r() -> Self {
        ParamPoly::monomial(Exp { h: 0, r: 1 }, BigRational::one())
    }

    pub fn monomial(e: Exp, c: BigRational) -> Self {
        let mut p = ParamPoly::default();
        p.insert(e, c);
        p
    }

    fn insert(&mut self, e: Exp, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Exp::ONE)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == Exp::ONE)
    }

    /// Largest term under the graded-lex order.
    pub fn leading(&self) -> Option<(Exp, &BigRational)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    pub fn deg_h(&self) -> u32 {
        self.terms.keys().map(|e| e.h).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &BigRational)> {
        self.terms.iter()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        let mut out = ParamPoly::default();
        for (e, v) in &self.terms {
            out.terms.insert(*e, v * c);
        }
        out
    }

    pub fn eval(&self, h: &BigRational, r: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..e.h {
                t *= h;
            }
            for _ in 0..e.r {
                t *= r;
            }
            acc += t;
        }
        acc
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = ParamPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division; `None` when `self` is not a polynomial multiple of `d`.
    pub fn div_exact(&self, d: &ParamPoly) -> Option<ParamPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = ParamPoly::zero();
        let (de, dc) = d.leading().unwrap();
        while !rem.is_zero() {
            let (re, rc) = rem.leading().unwrap();
            if re.h < de.h || re.r < de.r {
                return None;
            }
            let qe = Exp {
                h: re.h - de.h,
                r: re.r - de.r,
            };
            let qc = rc / dc;
            let term = ParamPoly::monomial(qe, qc);
            rem = &rem - &(&term * d);
            quot = &quot + &term;
        }
        Some(quot)
    }

    /// Scales so the leading coefficient is +1. Zero stays zero.
    pub fn monic(&self) -> ParamPoly {
        match self.leading() {
            None => ParamPoly::zero(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Coefficients with respect to powers of `h`; values only involve `r`.
    fn coeffs_in_h(&self) -> BTreeMap<u32, ParamPoly> {
        let mut out: BTreeMap<u32, ParamPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            out.entry(e.h)
                .or_default()
                .insert(Exp { h: 0, r: e.r }, c.clone());
        }
        out
    }

    fn lead_coeff_in_h(&self) -> ParamPoly {
        self.coeffs_in_h()
            .into_iter()
            .next_back()
            .map(|(_, p)| p)
            .unwrap_or_default()
    }

    fn mul_h_pow(&self, k: u32) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (e, c) in &self.terms {
            out.insert(
                Exp {
                    h: e.h + k,
                    r: e.r,
                },
                c.clone(),
            );
        }
        out
    }

    /// Content with respect to `h`: the gcd of the `h`-coefficients (each a
    /// polynomial in `r` alone).
    fn content_in_h(&self) -> ParamPoly {
        let mut acc = ParamPoly::zero();
        for (_, p) in self.coeffs_in_h() {
            acc = gcd_r(&acc, &p);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// GCD up to a rational unit, normalised monic under graded-lex.
    pub fn gcd(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        // Constants are units over the rationals.
        if a.is_constant() || b.is_constant() {
            return ParamPoly::one();
        }
        if a.deg_h() == 0 && b.deg_h() == 0 {
            return gcd_r(a, b);
        }
        // Primitive PRS in h over Q[r].
        let ca = a.content_in_h();
        let cb = b.content_in_h();
        let cont = gcd_r(&ca, &cb);
        let mut p = a.div_exact(&ca).expect("content divides");
        let mut q = b.div_exact(&cb).expect("content divides");
        if p.deg_h() < q.deg_h() {
            std::mem::swap(&mut p, &mut q);
        }
        while !q.is_zero() {
            let r = pseudo_rem_h(&p, &q);
            p = q;
            q = if r.is_zero() {
                ParamPoly::zero()
            } else {
                let c = r.content_in_h();
                r.div_exact(&c).expect("content divides")
            };
        }
        (&cont * &p).monic()
    }
}

/// GCD of two polynomials in `r` alone (plain Euclid over the rationals).
fn gcd_r(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    assert!(a.deg_h() == 0 && b.deg_h() == 0);
    let mut p = a.clone();
    let mut q = b.clone();
    while !q.is_zero() {
        let r = rem_r(&p, &q);
        p = q;
        q = r;
    }
    p.monic()
}

/// Remainder of univariate division in `r`.
fn rem_r(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    let (be, bc) = b.leading().expect("nonzero divisor");
    let mut rem = a.clone();
    loop {
        match rem.leading() {
            None => return rem,
            Some((re, rc)) => {
                if re.r < be.r {
                    return rem;
                }
                let q = ParamPoly::monomial(
                    Exp {
                        h: 0,
                        r: re.r - be.r,
                    },
                    rc / bc,
                );
                rem = &rem - &(&q * b);
            }
        }
    }
}

/// Pseudo-remainder of `p` by `q` viewed in `h` over `Q[r]`.
fn pseudo_rem_h(p: &ParamPoly, q: &ParamPoly) -> ParamPoly {
    let dq = q.deg_h();
    let lq = q.lead_coeff_in_h();
    let mut rem = p.clone();
    while !rem.is_zero() && rem.deg_h() >= dq {
        let dr = rem.deg_h();
        let lr = rem.lead_coeff_in_h();
        // lq * rem - lr * h^(dr-dq) * q cancels the leading h-term.
        rem = &(&rem * &lq) - &(&q.mul_h_pow(dr - dq) * &lr);
        debug_assert!(rem.is_zero() || rem.deg_h() < dr);
    }
    rem
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(*e, c.clone());
        }
        out
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(*e, -c.clone());
        }
        out
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.insert(
                    Exp {
                        h: ea.h + eb.h,
                        r: ea.r + eb.r,
                    },
                    ca * cb,
                );
            }
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        self.scale(&-BigRational::one())
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c < &BigRational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || (e.h == 0 && e.r == 0) {
                factors.push(mag.to_string());
            }
            match e.h {
                0 => {}
                1 => factors.push("h".into()),
                n => factors.push(format!("h^{}", n)),
            }
            match e.r {
                0 => {}
                1 => factors.push("r".into()),
                n => factors.push(format!("r^{}", n)),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// A rational function in `h` and `r`, reduced and with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamScalar {
    num: ParamPoly,
    den: ParamPoly,
}

impl ParamScalar {
    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: ParamPoly, den: ParamPoly) -> Self {
        if num.is_zero() {
            return ParamScalar {
                num: ParamPoly::zero(),
                den: ParamPoly::one(),
            };
        }
        let g = ParamPoly::gcd(&num, &den);
        let mut num = num.div_exact(&g).expect("gcd divides numerator");
        let mut den = den.div_exact(&g).expect("gcd divides denominator");
        let (_, lc) = den.leading().expect("nonzero denominator");
        let inv = lc.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
        ParamScalar { num, den }
    }

    pub fn from_poly(p: ParamPoly) -> Self {
        ParamScalar {
            num: p,
            den: ParamPoly::one(),
        }
    }

    pub fn from_rat(c: BigRational) -> Self {
        ParamScalar::from_poly(ParamPoly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        ParamScalar::from_poly(ParamPoly::int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        ParamScalar::from_rat(rat(n, d))
    }

    pub fn h() -> Self {
        ParamScalar::from_poly(ParamPoly::var_h())
    }

    pub fn r() -> Self {
        ParamScalar::from_poly(ParamPoly::var_r())
    }

    pub fn zero() -> Self {
        ParamScalar::from_poly(ParamPoly::zero())
    }

    pub fn one() -> Self {
        ParamScalar::from_poly(ParamPoly::one())
    }

    pub fn num(&self) -> &ParamPoly {
        &self.num
    }

    pub fn den(&self) -> &ParamPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The constant value when the scalar involves neither parameter.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.is_constant() && self.den.is_one() {
            Some(
                self.num
                    .leading()
                    .map(|(_, c)| c.clone())
                    .unwrap_or_else(BigRational::zero),
            )
        } else {
            None
        }
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(ParamScalar::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = ParamScalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, h: &BigRational, r: &BigRational) -> Result<BigRational, ScalarError> {
        let d = self.den.eval(h, r);
        if d.is_zero() {
            return Err(ScalarError::Pole {
                h: h.clone(),
                r: r.clone(),
            });
        }
        Ok(self.num.eval(h, r) / d)
    }

    /// Substitutes the parameters, returning the value as a constant scalar.
    pub fn substitute(&self, h: &BigRational, r: &BigRational) -> Result<Self, ScalarError> {
        Ok(ParamScalar::from_rat(self.eval(h, r)?))
    }
}

impl Add for &ParamScalar {
    type Output = ParamScalar;
    fn add(self, rhs: &ParamScalar) -> ParamScalar {
        ParamScalar::reduced(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: &ParamScalar) -> ParamScalar {
        ParamScalar::reduced(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &ParamScalar {
    type Output = ParamScalar;
    fn mul(self, rhs: &ParamScalar) -> ParamScalar {
        ParamScalar::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        ParamScalar {
            num: (-&self.num).clone(),
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        // A non-trivial denominator is never constant, so it always needs
        // parentheses to re-parse as a division.
        if self.num.terms.len() > 1 {
            write!(f, "({})/({})", self.num, self.den)
        } else {
            write!(f, "{}/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h() -> ParamScalar {
        ParamScalar::h()
    }

    fn r() -> ParamScalar {
        ParamScalar::r()
    }

    #[test]
    fn additive_inverse() {
        let s = &h() + &(-&h());
        assert!(s.is_zero());
    }

    #[test]
    fn multiplicative_inverse_of_two_plus_h_squared() {
        let two_h2 = &ParamScalar::int(2) + &h().pow(2);
        let inv = two_h2.inv().unwrap();
        assert!((&two_h2 * &inv).is_one());
    }

    #[test]
    fn quotient_h2_minus_rh_by_h() {
        // (h^2 - r h) / h = h - r, checked against independent long division.
        let num = &h().pow(2) - &(&r() * &h());
        let q = num.div(&h()).unwrap();
        let expect = &h() - &r();
        assert_eq!(q, expect);

        // Independent oracle: naive term-by-term long division on the
        // polynomial layer.
        let n = num.num().clone();
        let d = h().num().clone();
        let mut rem = n.clone();
        let mut quot = ParamPoly::zero();
        while !rem.is_zero() {
            let (re, rc) = rem.leading().unwrap();
            let (de, dc) = d.leading().unwrap();
            assert!(re.h >= de.h && re.r >= de.r, "not exactly divisible");
            let t = ParamPoly::monomial(
                Exp {
                    h: re.h - de.h,
                    r: re.r - de.r,
                },
                rc / dc,
            );
            rem = &rem - &(&t * &d);
            quot = &quot + &t;
        }
        assert_eq!(ParamScalar::from_poly(quot), expect);
    }

    #[test]
    fn substitute_simple() {
        let s = ParamScalar::one()
            .div(&(&ParamScalar::int(2) + &h().pow(2)))
            .unwrap();
        assert_eq!(s.eval(&rat_int(0), &rat_int(0)).unwrap(), rat(1, 2));

        let t = &h().pow(2) - &r();
        assert_eq!(t.eval(&rat_int(2), &rat_int(1)).unwrap(), rat_int(3));
    }

    #[test]
    fn no_pole_for_two_plus_h_squared() {
        // 2 + h^2 > 0 for every rational h, so evaluation never fails.
        let s = ParamScalar::one()
            .div(&(&ParamScalar::int(2) + &h().pow(2)))
            .unwrap();
        for n in -5i64..=5 {
            for d in 1i64..=4 {
                assert!(s.eval(&rat(n, d), &rat_int(0)).is_ok());
            }
        }
    }

    #[test]
    fn pole_detection() {
        let s = ParamScalar::one().div(&h()).unwrap();
        assert!(matches!(
            s.eval(&rat_int(0), &rat_int(0)),
            Err(ScalarError::Pole { .. })
        ));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            h().div(&ParamScalar::zero()),
            Err(ScalarError::DivisionByZero)
        );
    }

    #[test]
    fn gcd_cases() {
        let p = ParamPoly::gcd(
            &(&ParamPoly::var_h() * &ParamPoly::var_r()),
            &ParamPoly::var_h(),
        );
        assert_eq!(p, ParamPoly::var_h());

        // Common factor (2 + h^2) is found across a mixed product.
        let f = &ParamPoly::int(2) + &ParamPoly::var_h().pow(2);
        let a = &f * &(&ParamPoly::var_h() + &ParamPoly::var_r());
        let b = &f * &ParamPoly::var_r();
        let g = ParamPoly::gcd(&a, &b);
        assert_eq!(g, f.monic());
    }

    #[test]
    fn display_roundtrip_shapes() {
        let s = ParamScalar::one()
            .div(&(&ParamScalar::int(2) + &h().pow(2)))
            .unwrap();
        assert_eq!(s.to_string(), "1/(h^2 + 2)");
        assert_eq!((&h().pow(2) - &r()).to_string(), "h^2 - r");
    }

    fn arb_scalar() -> impl Strategy<Value = ParamScalar> {
        // Small polynomials over small rationals keep the axioms tests fast.
        let term = (0u32..3, 0u32..2, -4i64..5);
        prop::collection::vec(term, 0..4).prop_map(|ts| {
            let mut p = ParamPoly::zero();
            for (dh, dr, c) in ts {
                p = &p + &ParamPoly::monomial(Exp { h: dh, r: dr }, rat_int(c));
            }
            ParamScalar::from_poly(p)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn canonicalization_idempotent(a in arb_scalar(), b in arb_scalar()) {
            if !b.is_zero() {
                let q = a.div(&b).unwrap();
                let again = ParamScalar::new(q.num().clone(), q.den().clone()).unwrap();
                prop_assert_eq!(q, again);
            }
        }

        #[test]
        fn substitute_is_ring_hom(a in arb_scalar(), b in arb_scalar()) {
            let (hv, rv) = (rat(1, 3), rat(2, 1));
            let lhs = (&a * &b).eval(&hv, &rv).unwrap();
            let rhs = a.eval(&hv, &rv).unwrap() * b.eval(&hv, &rv).unwrap();
            prop_assert_eq!(lhs, rhs);
            let lhs = (&a + &b).eval(&hv, &rv).unwrap();
            let rhs = a.eval(&hv, &rv).unwrap() + b.eval(&hv, &rv).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
