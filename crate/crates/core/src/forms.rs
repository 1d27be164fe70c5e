use std::collections::BTreeMap;

use leibniz_scalar::{Rational, Scalar};

use crate::array::{increasing_tuples, sort_with_sign};
use crate::error::{GeomError, Result};

/// An E-p-form, stored by its components on strictly increasing frame index
/// tuples. Evaluation uses the determinant convention, so
/// `(e^1 ∧ e^2)(X_1, X_2) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EForm {
    rank: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Scalar>,
}

impl EForm {
    pub fn zero(rank: usize, degree: usize) -> Self {
        EForm {
            rank,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn function(rank: usize, f: Scalar) -> Self {
        let mut out = EForm::zero(rank, 0);
        out.set(&[], f);
        out
    }

    /// The dual coframe element `e^a`.
    pub fn basis(rank: usize, a: usize) -> Self {
        let mut out = EForm::zero(rank, 1);
        out.set(&[a], Scalar::one());
        out
    }

    /// Builds a form from its value on every increasing tuple.
    pub fn from_fn(rank: usize, degree: usize, mut f: impl FnMut(&[usize]) -> Scalar) -> Self {
        let mut out = EForm::zero(rank, degree);
        for t in increasing_tuples(rank, degree) {
            let v = f(&t);
            out.set(&t, v);
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Component on an increasing tuple.
    pub fn get(&self, idx: &[usize]) -> &Scalar {
        self.comps.get(idx).unwrap_or_else(|| Scalar::zero_ref())
    }

    /// Value on frame elements `(X_{idx_1}, ..., X_{idx_p})` in any order.
    pub fn at(&self, idx: &[usize]) -> Scalar {
        match sort_with_sign(idx) {
            None => Scalar::zero(),
            Some((sorted, s)) => {
                let v = self.get(&sorted);
                if s < 0 {
                    -v
                } else {
                    v.clone()
                }
            }
        }
    }

    /// Sets the component on an increasing tuple.
    pub fn set(&mut self, idx: &[usize], v: Scalar) {
        assert_eq!(idx.len(), self.degree, "tuple length must equal degree");
        assert!(idx.windows(2).all(|w| w[0] < w[1]), "tuple must be increasing");
        assert!(idx.iter().all(|&i| i < self.rank), "frame index out of range");
        if v.is_zero() {
            self.comps.remove(idx);
        } else {
            self.comps.insert(idx.to_vec(), v);
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.comps.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// The degree-0 value, zero for higher degrees.
    pub fn as_function(&self) -> Scalar {
        if self.degree == 0 {
            self.get(&[]).clone()
        } else {
            Scalar::zero()
        }
    }

    pub fn add(&self, other: &EForm) -> EForm {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        let mut out = self.clone();
        for (k, v) in &other.comps {
            let cur = out.get(k) + v;
            out.set(k, cur);
        }
        out
    }

    pub fn sub(&self, other: &EForm) -> EForm {
        self.add(&other.scale(&Rational::from_integer(-1)))
    }

    pub fn scale(&self, c: &Rational) -> EForm {
        self.mul_scalar(&Scalar::from_rational(c.clone()))
    }

    pub fn mul_scalar(&self, f: &Scalar) -> EForm {
        let mut out = EForm::zero(self.rank, self.degree);
        for (k, v) in &self.comps {
            out.set(k, v * f);
        }
        out
    }

    /// Exterior product. Beyond the top degree the result is the zero form.
    pub fn wedge(&self, other: &EForm) -> EForm {
        let (p, q) = (self.degree, other.degree);
        let mut out = EForm::zero(self.rank, p + q);
        if p + q > self.rank {
            return out;
        }
        let mut acc: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let mut cat = i.clone();
                cat.extend_from_slice(j);
                if let Some((k, s)) = sort_with_sign(&cat) {
                    let t = a * b;
                    let t = if s < 0 { -t } else { t };
                    let e = acc.entry(k).or_default();
                    *e = &*e + &t;
                }
            }
        }
        for (k, v) in acc {
            out.set(&k, v);
        }
        out
    }

    /// Interior product `ι_v`, contracting the first slot.
    pub fn interior(&self, v: &[Scalar]) -> Result<EForm> {
        if self.degree == 0 {
            return Err(GeomError::Shape("interior product of a degree-0 form".into()));
        }
        if v.len() != self.rank {
            return Err(GeomError::Shape("section length differs from rank".into()));
        }
        Ok(EForm::from_fn(self.rank, self.degree - 1, |j| {
            let mut acc = Scalar::zero();
            for (a, va) in v.iter().enumerate() {
                if va.is_zero() || j.contains(&a) {
                    continue;
                }
                let mut idx = vec![a];
                idx.extend_from_slice(j);
                acc = &acc + &(va * &self.at(&idx));
            }
            acc
        }))
    }

    /// Evaluates on `p` sections.
    pub fn eval(&self, sections: &[Vec<Scalar>]) -> Scalar {
        assert_eq!(sections.len(), self.degree, "wrong number of arguments");
        let mut acc = Scalar::zero();
        let mut idx = Vec::with_capacity(self.degree);
        self.eval_rec(sections, &mut idx, Scalar::one(), &mut acc);
        acc
    }

    fn eval_rec(&self, sections: &[Vec<Scalar>], idx: &mut Vec<usize>, coeff: Scalar, acc: &mut Scalar) {
        let k = idx.len();
        if k == sections.len() {
            let v = self.at(idx);
            if !v.is_zero() {
                *acc = &*acc + &(&coeff * &v);
            }
            return;
        }
        for (a, c) in sections[k].iter().enumerate() {
            if c.is_zero() || idx.contains(&a) {
                continue;
            }
            idx.push(a);
            self.eval_rec(sections, idx, &coeff * c, acc);
            idx.pop();
        }
    }
}
