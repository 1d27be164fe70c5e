use std::cmp::Ordering;

use smallvec::SmallVec;

/// Exponent vector of a monomial in the chart coordinates.
///
/// Trailing zero exponents are never stored, so the same monomial has a single
/// representation regardless of the chart dimension it is viewed in.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u16; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    /// The monomial `x_var^exp` (0-based variable index).
    pub fn var(var: usize, exp: u16) -> Self {
        let mut v = SmallVec::from_elem(0, var + 1);
        v[var] = exp;
        Monomial(v).trimmed()
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps)).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn exponent(&self, var: usize) -> u16 {
        self.0.get(var).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// One past the highest variable index that occurs.
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.0.clone();
        for (o, e) in out.iter_mut().zip(short.0.iter()) {
            *o += e;
        }
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut out = self.0.clone();
        for (o, e) in out.iter_mut().zip(other.0.iter()) {
            *o = o.checked_sub(*e)?;
        }
        Some(Monomial(out).trimmed())
    }

    pub fn with_exponent(&self, var: usize, exp: u16) -> Monomial {
        let mut out = self.0.clone();
        if out.len() <= var {
            out.resize(var + 1, 0);
        }
        out[var] = exp;
        Monomial(out).trimmed()
    }

    /// Componentwise minimum (the gcd of two monomials).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let out: SmallVec<[u16; 4]> = self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| *a.min(b))
            .collect();
        Monomial(out).trimmed()
    }
}

/// Graded lexicographic order: total degree first, then lexicographic with
/// the first coordinate most significant.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.exponent(i).cmp(&other.exponent(i)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
