//! Scalar fields: the prime field F_p and the rational function field F_p(t).

mod expr;
mod poly;
mod ratfunc;

pub use expr::{parse_expr, Expr, ExprDomain, ExprError};
pub use poly::Poly;
pub use ratfunc::RatFunc;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The characteristics this crate supports.
pub const SUPPORTED_PRIMES: [u8; 4] = [2, 3, 5, 7];

/// A coordinate vector over the base field.
pub type Vector = Vec<RatFunc>;

/// The prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u8,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, Error> {
        if SUPPORTED_PRIMES.iter().any(|&q| q as u32 == p) {
            Ok(PrimeField { p: p as u8 })
        } else {
            Err(Error::UnsupportedPrime(p))
        }
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn element(&self, c: i64) -> RatFunc {
        RatFunc::constant(self.p, c)
    }

    /// All elements `0, 1, ..., p-1`.
    pub fn elements(&self) -> impl Iterator<Item = RatFunc> + '_ {
        (0..self.p as i64).map(move |c| self.element(c))
    }
}

/// Which ground field k the structures live over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    /// k = F_p
    #[serde(rename = "Fp")]
    Prime,
    /// k = F_p(t)
    #[serde(rename = "Fp_t")]
    RationalFunctions,
}

/// The ground field k together with its characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BaseField {
    prime: PrimeField,
    kind: FieldKind,
}

impl BaseField {
    pub fn prime(p: u32) -> Result<Self, Error> {
        Ok(BaseField { prime: PrimeField::new(p)?, kind: FieldKind::Prime })
    }

    pub fn rational(p: u32) -> Result<Self, Error> {
        Ok(BaseField { prime: PrimeField::new(p)?, kind: FieldKind::RationalFunctions })
    }

    pub fn new(p: u32, kind: FieldKind) -> Result<Self, Error> {
        Ok(BaseField { prime: PrimeField::new(p)?, kind })
    }

    pub fn p(&self) -> u8 {
        self.prime.p
    }

    pub fn prime_field(&self) -> PrimeField {
        self.prime
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn is_prime_field(&self) -> bool {
        self.kind == FieldKind::Prime
    }

    pub fn zero(&self) -> RatFunc {
        RatFunc::zero(self.p())
    }

    pub fn one(&self) -> RatFunc {
        RatFunc::one(self.p())
    }

    pub fn constant(&self, c: i64) -> RatFunc {
        RatFunc::constant(self.p(), c)
    }

    /// The transcendental `t`; only meaningful over F_p(t).
    pub fn t(&self) -> RatFunc {
        RatFunc::t(self.p())
    }

    /// True when `x` is an element of this field (rejects `t` over F_p).
    pub fn contains(&self, x: &RatFunc) -> bool {
        x.characteristic() == self.p() && (self.kind == FieldKind::RationalFunctions || x.is_constant())
    }

    pub fn zeros(&self, n: usize) -> Vector {
        vec![self.zero(); n]
    }

    pub fn unit_vector(&self, n: usize, i: usize) -> Vector {
        let mut v = self.zeros(n);
        v[i] = self.one();
        v
    }

    /// A random element: uniform over F_p, or a small random rational function.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> RatFunc {
        let p = self.p();
        match self.kind {
            FieldKind::Prime => self.constant(rng.gen_range(0..p as i64)),
            FieldKind::RationalFunctions => {
                let num: Vec<u8> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..p)).collect();
                let num = Poly::from_coeffs(p, &num);
                if rng.gen_bool(0.75) {
                    RatFunc::from_poly(num)
                } else {
                    let mut den: Vec<u8> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..p)).collect();
                    den.push(1);
                    RatFunc::from_parts(num, Poly::from_coeffs(p, &den))
                }
            }
        }
    }

    pub fn random_vector<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vector {
        (0..n).map(|_| self.random(rng)).collect()
    }

    /// Parses a scalar written in the coefficient grammar.
    pub fn parse(&self, text: &str) -> Result<RatFunc, ExprError> {
        let expr = parse_expr(text)?;
        let value = expr.eval_scalar(self)?;
        Ok(value)
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Prime => write!(f, "F_{}", self.p()),
            FieldKind::RationalFunctions => write!(f, "F_{}(t)", self.p()),
        }
    }
}

/// Vector helpers over the base field.
pub mod vec_ops {
    use super::{RatFunc, Vector};

    pub fn add(a: &[RatFunc], b: &[RatFunc]) -> Vector {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(a: &[RatFunc], b: &[RatFunc]) -> Vector {
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg(a: &[RatFunc]) -> Vector {
        a.iter().map(|x| -x).collect()
    }

    pub fn scale(c: &RatFunc, a: &[RatFunc]) -> Vector {
        a.iter().map(|x| c * x).collect()
    }

    pub fn add_assign(acc: &mut [RatFunc], b: &[RatFunc]) {
        for (x, y) in acc.iter_mut().zip(b) {
            if !y.is_zero() {
                *x += y;
            }
        }
    }

    /// `acc += c * b`
    pub fn axpy(acc: &mut [RatFunc], c: &RatFunc, b: &[RatFunc]) {
        if c.is_zero() {
            return;
        }
        for (x, y) in acc.iter_mut().zip(b) {
            if !y.is_zero() {
                *x += &(c * y);
            }
        }
    }

    pub fn is_zero(a: &[RatFunc]) -> bool {
        a.iter().all(RatFunc::is_zero)
    }

    pub fn frobenius(a: &[RatFunc]) -> Vector {
        a.iter().map(RatFunc::frobenius).collect()
    }

    /// Renders a coordinate vector as `[a, b, ...]`.
    pub fn show(a: &[RatFunc]) -> String {
        let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
        format!("[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn only_small_primes_are_supported() {
        assert!(PrimeField::new(7).is_ok());
        assert!(matches!(PrimeField::new(4), Err(Error::UnsupportedPrime(4))));
        assert!(PrimeField::new(11).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let f3 = BaseField::prime(3).unwrap();
        assert_eq!(f3.constant(2).frobenius(), f3.constant(2));
        let f2t = BaseField::rational(2).unwrap();
        let a = &f2t.t() + &f2t.one();
        assert_eq!(a.frobenius(), &f2t.t().pow(2) + &f2t.one());
        assert!(f2t.zero().frobenius().is_zero());
    }

    #[test]
    fn fermat_on_every_constant() {
        for p in SUPPORTED_PRIMES {
            let k = PrimeField::new(p as u32).unwrap();
            for a in k.elements() {
                assert_eq!(a.pow(p as u64), a);
            }
        }
    }

    #[test]
    fn frobenius_is_a_ring_endomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for p in SUPPORTED_PRIMES {
            for kind in [FieldKind::Prime, FieldKind::RationalFunctions] {
                let k = BaseField::new(p as u32, kind).unwrap();
                for _ in 0..100 {
                    let a = k.random(&mut rng);
                    let b = k.random(&mut rng);
                    assert_eq!((&a + &b).frobenius(), &a.frobenius() + &b.frobenius());
                    assert_eq!((&a * &b).frobenius(), &a.frobenius() * &b.frobenius());
                    assert_eq!(a.frobenius(), a.pow(p as u64));
                }
            }
        }
    }

    #[test]
    fn membership_rejects_t_over_prime_field() {
        let k = BaseField::prime(5).unwrap();
        assert!(k.contains(&k.constant(3)));
        assert!(!k.contains(&RatFunc::t(5)));
        assert!(!k.contains(&RatFunc::one(3)));
    }
}
