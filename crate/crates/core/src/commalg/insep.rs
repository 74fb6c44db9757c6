//! The purely inseparable extension `K = k(s)`, `s^p = t`, over `k = F_p(t)`.

use serde_json::json;

use super::{CommAlgebra, Derivation};
use crate::error::Result;
use crate::field::{BaseField, RatFunc, Vector};
use crate::linalg::Matrix;
use crate::report::Report;

/// `K = k[s]/(s^p - t)` with k-basis `1, s, ..., s^{p-1}` and `d = d/ds`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsepExtension {
    field: CommAlgebra,
    partial: Derivation,
}

impl InsepExtension {
    pub fn new(p: u32) -> Result<Self> {
        let k = BaseField::rational(p)?;
        let p = p as usize;
        let names = (0..p)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "s".to_string(),
                _ => format!("s^{i}"),
            })
            .collect();
        let table = (0..p * p)
            .map(|idx| {
                let e = idx / p + idx % p;
                let mut v = k.zeros(p);
                if e < p {
                    v[e] = k.one();
                } else {
                    v[e - p] = k.t();
                }
                v
            })
            .collect();
        let field = CommAlgebra::new(k, names, table, k.unit_vector(p, 0))?;
        let cols: Vec<Vector> = (0..p)
            .map(|i| {
                let mut v = k.zeros(p);
                if i > 0 {
                    v[i - 1] = k.constant(i as i64);
                }
                v
            })
            .collect();
        let partial = Derivation::from_images(&field, &cols)?;
        Ok(InsepExtension { field, partial })
    }

    pub fn p(&self) -> u8 {
        self.field.p()
    }

    /// The lower field `k = F_p(t)`.
    pub fn base(&self) -> BaseField {
        self.field.field()
    }

    /// The upper field `K` as a commutative k-algebra.
    pub fn algebra(&self) -> &CommAlgebra {
        &self.field
    }

    /// The derivation `d/ds`.
    pub fn partial(&self) -> &Derivation {
        &self.partial
    }

    pub fn s(&self) -> Vector {
        self.field.basis(1)
    }

    /// The element `c * 1` of K.
    pub fn embed(&self, c: &RatFunc) -> Vector {
        self.field.scalar(c)
    }

    /// The scalar `c` when `x = c * 1` lies in k.
    pub fn as_scalar(&self, x: &[RatFunc]) -> Option<RatFunc> {
        x[1..].iter().all(RatFunc::is_zero).then(|| x[0].clone())
    }

    /// Verifies `s^p = t`, `d(s) = 1`, `d` vanishes on k, `d^p = 0` and Leibniz.
    pub fn check(&self) -> Report {
        let k = self.base();
        let a = &self.field;
        let mut report = Report::new("purely inseparable extension");
        let mut c = report.check("s^p = t");
        c.case(a.frobenius(&self.s()) == self.embed(&k.t()), || json!(a.show(&a.frobenius(&self.s()))));
        c.finish();
        let mut c = report.check("d(s) = 1");
        c.case(self.partial.apply(&self.s()) == a.one(), || json!(a.show(&self.partial.apply(&self.s()))));
        c.finish();
        let mut c = report.check("d vanishes on k");
        c.case(self.partial.apply(&a.one()).iter().all(RatFunc::is_zero), || json!("d(1)"));
        c.finish();
        let mut c = report.check("d^p = 0");
        let dp = self.partial.matrix().pow(self.p() as u32);
        c.case(dp == Matrix::zeros(k.p(), a.dim(), a.dim()), || json!(dp.to_string()));
        c.finish();
        let mut c = report.check("Leibniz rule for d");
        let defect = self.partial.leibniz_defect(a);
        c.case(defect.is_none(), || json!(defect));
        c.finish();
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commalg::{derivation_space, p_power_derivation};

    #[test]
    fn extension_invariants_hold() {
        for p in [2, 3, 5] {
            let e = InsepExtension::new(p).unwrap();
            assert!(e.check().passed, "p = {p}");
        }
    }

    #[test]
    fn derivations_over_k_for_p2() {
        let e = InsepExtension::new(2).unwrap();
        let basis = derivation_space(e.algebra());
        assert_eq!(basis.len(), 2);
        assert_eq!(basis[0], *e.partial());
        assert_eq!(basis[1], e.partial().scaled(e.algebra(), &e.s()));
    }

    #[test]
    fn partial_to_the_p_vanishes() {
        let e = InsepExtension::new(3).unwrap();
        assert!(p_power_derivation(e.algebra(), e.partial()).unwrap().is_zero());
    }
}
