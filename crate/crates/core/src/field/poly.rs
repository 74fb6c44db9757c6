//! Dense univariate polynomials over F_p in the variable `t`.

use std::fmt;

use smallvec::SmallVec;

type Coeffs = SmallVec<[u8; 6]>;

/// A polynomial over F_p, little-endian coefficients with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    p: u8,
    coeffs: Coeffs,
}

pub(crate) fn inv_mod(a: u8, p: u8) -> u8 {
    debug_assert!(!a.is_multiple_of(p));
    // p <= 7, so a^(p-2) by repeated multiplication is fine.
    let mut r = 1u32;
    for _ in 0..(p - 2) {
        r = r * a as u32 % p as u32;
    }
    r as u8
}

impl Poly {
    pub fn zero(p: u8) -> Self {
        Poly { p, coeffs: Coeffs::new() }
    }

    pub fn constant(p: u8, c: u8) -> Self {
        let mut coeffs = Coeffs::new();
        let c = c % p;
        if c != 0 {
            coeffs.push(c);
        }
        Poly { p, coeffs }
    }

    pub fn one(p: u8) -> Self {
        Self::constant(p, 1)
    }

    /// The monomial `c * t^k`.
    pub fn monomial(p: u8, c: u8, k: usize) -> Self {
        if c.is_multiple_of(p) {
            return Self::zero(p);
        }
        let mut coeffs: Coeffs = std::iter::repeat_n(0, k).collect();
        coeffs.push(c % p);
        Poly { p, coeffs }
    }

    pub fn from_coeffs(p: u8, coeffs: &[u8]) -> Self {
        let mut out = Poly { p, coeffs: coeffs.iter().map(|c| c % p).collect() };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn characteristic(&self) -> u8 {
        self.p
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 1
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u8 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn constant_term(&self) -> u8 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let p = self.p as u16;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Coeffs::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).copied().unwrap_or(0) as u16;
            let b = other.coeffs.get(i).copied().unwrap_or(0) as u16;
            coeffs.push(((a + b) % p) as u8);
        }
        let mut out = Poly { p: self.p, coeffs };
        out.trim();
        out
    }

    pub fn neg(&self) -> Poly {
        let p = self.p;
        Poly { p, coeffs: self.coeffs.iter().map(|&c| if c == 0 { 0 } else { p - c }).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u8) -> Poly {
        let c = c % self.p;
        if c == 0 {
            return Poly::zero(self.p);
        }
        let p = self.p as u16;
        Poly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|&a| ((a as u16 * c as u16) % p) as u8).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p as u32;
        let mut acc = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                acc[i + j] += a as u32 * b as u32;
            }
        }
        let mut out = Poly { p: self.p, coeffs: acc.into_iter().map(|c| (c % p) as u8).collect() };
        out.trim();
        out
    }

    /// Euclidean division: returns `(q, r)` with `self = q * divisor + r`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let p = self.p;
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (Poly::zero(p), self.clone());
        }
        let lead_inv = inv_mod(divisor.leading(), p);
        let mut rem: Vec<u16> = self.coeffs.iter().map(|&c| c as u16).collect();
        let mut quot = vec![0u8; self.coeffs.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = (rem[k + dd] * lead_inv as u16 % p as u16) as u8;
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                let sub = c as u16 * b as u16 % p as u16;
                rem[k + j] = (rem[k + j] + p as u16 - sub) % p as u16;
            }
        }
        rem.truncate(dd);
        let mut r = Poly { p, coeffs: rem.into_iter().map(|c| c as u8).collect() };
        r.trim();
        let mut q = Poly { p, coeffs: quot.into_iter().collect() };
        q.trim();
        (q, r)
    }

    /// Scales to a monic polynomial; zero stays zero.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.leading(), self.p))
    }

    /// Monic gcd by the Euclidean algorithm, normalizing at each step.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    /// Substitutes `t -> t^p`, which is the Frobenius on F_p[t].
    pub fn frobenius(&self) -> Poly {
        if self.is_constant() {
            return self.clone();
        }
        let p = self.p as usize;
        let mut coeffs: Coeffs = std::iter::repeat_n(0, (self.coeffs.len() - 1) * p + 1).collect();
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * p] = c;
        }
        Poly { p: self.p, coeffs }
    }

    /// Formal derivative with respect to `t`.
    pub fn derivative(&self) -> Poly {
        let p = self.p as usize;
        let coeffs: Coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| ((i % p) * c as usize % p) as u8)
            .collect();
        let mut out = Poly { p: self.p, coeffs };
        out.trim();
        out
    }

    pub(crate) fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (k, 1) => write!(f, "t^{k}")?,
                (k, c) => write!(f, "{c}*t^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_identity() {
        let a = Poly::from_coeffs(5, &[1, 2, 3, 4]);
        let b = Poly::from_coeffs(5, &[2, 0, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        // (t+1)(t+2) and (t+1)(t+3) over F_7
        let f = Poly::from_coeffs(7, &[1, 1]);
        let a = f.mul(&Poly::from_coeffs(7, &[2, 1]));
        let b = f.mul(&Poly::from_coeffs(7, &[3, 1]));
        assert_eq!(a.gcd(&b), f);
        assert_eq!(a.scale(3).gcd(&b.scale(2)), f);
    }

    #[test]
    fn frobenius_of_t_plus_one_in_char_two() {
        let a = Poly::from_coeffs(2, &[1, 1]);
        assert_eq!(a.frobenius(), Poly::from_coeffs(2, &[1, 0, 1]));
        assert_eq!(a.mul(&a), a.frobenius());
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_coeffs(3, &[1, 0, 2]).to_string(), "2*t^2+1");
        assert_eq!(Poly::from_coeffs(3, &[0, 1]).to_string(), "t");
        assert_eq!(Poly::zero(3).to_string(), "0");
    }
}
