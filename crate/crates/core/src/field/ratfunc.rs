//! Elements of F_p(t) in canonical form.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::poly::Poly;

/// A rational function `num / den` over F_p.
///
/// The denominator is monic and coprime to the numerator, and zero is `0/1`.
/// Constants (the prime field F_p) are the values with constant numerator and
/// denominator `1`, so a single type serves both base fields.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero(p: u8) -> Self {
        RatFunc { num: Poly::zero(p), den: Poly::one(p) }
    }

    pub fn one(p: u8) -> Self {
        Self::constant(p, 1)
    }

    pub fn constant(p: u8, c: i64) -> Self {
        let c = c.rem_euclid(p as i64) as u8;
        RatFunc { num: Poly::constant(p, c), den: Poly::one(p) }
    }

    /// The transcendental `t`.
    pub fn t(p: u8) -> Self {
        Self::from_poly(Poly::monomial(p, 1, 1))
    }

    pub fn from_poly(num: Poly) -> Self {
        let p = num.characteristic();
        RatFunc { num, den: Poly::one(p) }
    }

    /// Builds `num / den`, reducing to canonical form. Panics if `den` is zero.
    pub fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let p = num.characteristic();
        if num.is_zero() {
            return Self::zero(p);
        }
        if den.is_one() {
            return RatFunc { num, den };
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let lead = d.leading();
        if lead != 1 {
            let inv = super::poly::inv_mod(lead, p);
            n = n.scale(inv);
            d = d.scale(inv);
        }
        RatFunc { num: n, den: d }
    }

    pub fn characteristic(&self) -> u8 {
        self.num.characteristic()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value lies in the prime field F_p.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    /// The value as an integer in `[0, p)` when it is a constant.
    pub fn as_constant(&self) -> Option<u8> {
        self.is_constant().then(|| self.num.constant_term())
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Some(Self::from_parts(self.den.clone(), self.num.clone()))
    }

    /// `self / other`, or `None` when dividing by zero.
    pub fn checked_div(&self, other: &RatFunc) -> Option<RatFunc> {
        other.inv().map(|inv| self * &inv)
    }

    pub fn pow(&self, mut e: u64) -> RatFunc {
        let mut base = self.clone();
        let mut acc = Self::one(self.characteristic());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The p-th power map, computed coefficient-wise as `t -> t^p`.
    pub fn frobenius(&self) -> RatFunc {
        RatFunc { num: self.num.frobenius(), den: self.den.frobenius() }
    }

    /// Formal derivative with respect to `t` (quotient rule).
    pub fn derivative(&self) -> RatFunc {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        Self::from_parts(n, self.den.mul(&self.den))
    }

    fn add_impl(&self, other: &RatFunc) -> RatFunc {
        if self.den.is_one() && other.den.is_one() {
            return RatFunc { num: self.num.add(&other.num), den: self.den.clone() };
        }
        if self.den == other.den {
            return Self::from_parts(self.num.add(&other.num), self.den.clone());
        }
        let n = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::from_parts(n, self.den.mul(&other.den))
    }

    fn mul_impl(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.characteristic());
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc { num: self.num.mul(&other.num), den: self.den.clone() };
        }
        Self::from_parts(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    fn needs_parens(p: &Poly) -> bool {
        p.term_count() > 1 || (p.degree().unwrap_or(0) > 0 && p.leading() != 1)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| {
            if Self::needs_parens(p) {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:expr) => {
        impl $tr<&RatFunc> for &RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                $imp(self, rhs)
            }
        }
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                $imp(&self, &rhs)
            }
        }
        impl $tr<&RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: &RatFunc) -> RatFunc {
                $imp(&self, rhs)
            }
        }
    };
}

binop!(Add, add, RatFunc::add_impl);
binop!(Mul, mul, RatFunc::mul_impl);
binop!(Sub, sub, |a: &RatFunc, b: &RatFunc| a.add_impl(&-b));

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl AddAssign<&RatFunc> for RatFunc {
    fn add_assign(&mut self, rhs: &RatFunc) {
        *self = self.add_impl(rhs);
    }
}

impl SubAssign<&RatFunc> for RatFunc {
    fn sub_assign(&mut self, rhs: &RatFunc) {
        *self = self.add_impl(&-rhs);
    }
}
