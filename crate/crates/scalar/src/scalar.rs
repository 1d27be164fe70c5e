use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::ScalarError;
use crate::gcd::gcd;
use crate::poly::Poly;
use crate::rational::Rational;

/// Largest `len(num) * len(den)` for which fractions are reduced by a full
/// polynomial gcd. Larger fractions only get the cheap normalizations.
const GCD_LIMIT: usize = 600;

/// An element of the rational function field Q(x1, ..., xn).
///
/// Equality is decided by cross-multiplication, so it never depends on how
/// far a fraction happens to be reduced.
#[derive(Clone, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rational::ONE)
    }

    /// A shared zero, for lookups into sparse storage.
    pub fn zero_ref() -> &'static Scalar {
        static ZERO: std::sync::OnceLock<Scalar> = std::sync::OnceLock::new();
        ZERO.get_or_init(Scalar::zero)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Rational::from_integer(n))
    }

    pub fn from_rational(c: Rational) -> Self {
        Scalar {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    /// The coordinate `x_var` (0-based).
    pub fn var(var: usize) -> Self {
        Scalar::from_poly(Poly::var(var))
    }

    /// Builds `num/den`, normalizing the representation.
    pub fn fraction(num: Poly, den: Poly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.as_constant() {
            return Scalar {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        let (mut num, mut den) = (num, den);
        if num.len() * den.len() <= GCD_LIMIT {
            let g = gcd(&num, &den);
            if !g.is_one() {
                num = num.div_exact(&g).expect("gcd divides numerator");
                den = den.div_exact(&g).expect("gcd divides denominator");
            }
        } else {
            let mc = num.monomial_content().gcd(&den.monomial_content());
            if !mc.is_one() {
                let m = Poly::monomial(mc, Rational::ONE);
                num = num.div_exact(&m).expect("monomial divides");
                den = den.div_exact(&m).expect("monomial divides");
            }
        }
        let lc = den.leading_coeff();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        if let Some(c) = den.as_constant() {
            return Scalar {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        Scalar { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(&n / &d)
    }

    /// Total number of stored terms in numerator and denominator.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar, ScalarError> {
        if rhs.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self * &rhs.inv_unchecked())
    }

    pub fn recip(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.inv_unchecked())
    }

    fn inv_unchecked(&self) -> Scalar {
        Scalar::normalized(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Scalar {
        Scalar {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Partial derivative with respect to the 0-based coordinate `var`.
    pub fn derivative(&self, var: usize) -> Scalar {
        let dn = self.num.derivative(var);
        if self.den.is_one() {
            return Scalar::from_poly(dn);
        }
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Scalar::normalized(dn, self.den.clone());
        }
        let top = dn.mul(&self.den).sub(&self.num.mul(&dd));
        Scalar::normalized(top, self.den.mul(&self.den))
    }

    /// Partial derivative with a range check against the chart dimension.
    pub fn differentiate(&self, var: usize, dim: usize) -> Result<Scalar, ScalarError> {
        if var >= dim {
            return Err(ScalarError::IndexOutOfRange { index: var, dim });
        }
        Ok(self.derivative(var))
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, ScalarError> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            return Err(ScalarError::Pole);
        }
        Ok(&self.num.evaluate(point) / &d)
    }

    /// Highest coordinate index occurring, plus one.
    pub fn width(&self) -> usize {
        self.num.width().max(self.den.width())
    }

    /// Canonical text form using the given coordinate names.
    pub fn to_expr(&self, names: &[String]) -> String {
        let name = |i: usize| {
            names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{}", i + 1))
        };
        let mut num = String::new();
        self.num.write_with(&mut num, &name).unwrap();
        if self.den.is_one() {
            return num;
        }
        let mut den = String::new();
        self.den.write_with(&mut den, &name).unwrap();
        let num = if self.num.len() > 1 { format!("({num})") } else { num };
        let bare_den = self.den.len() == 1 && self.den.terms()[0].0.exponents().iter().filter(|&&e| e > 0).count() == 1;
        if bare_den {
            format!("{num}/{den}")
        } else {
            format!("{num}/({den})")
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for Scalar {}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Scalar::from_rational(c)
    }
}

impl From<Poly> for Scalar {
    fn from(p: Poly) -> Self {
        Scalar::from_poly(p)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = self.num.add(&rhs.num);
            if self.den.is_one() {
                return Scalar::from_poly(num);
            }
            return Scalar::normalized(num, self.den.clone());
        }
        if rhs.den.is_one() {
            let num = self.num.add(&rhs.num.mul(&self.den));
            return Scalar::normalized(num, self.den.clone());
        }
        if self.den.is_one() {
            let num = rhs.num.add(&self.num.mul(&rhs.den));
            return Scalar::normalized(num, rhs.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        Scalar::normalized(num, self.den.mul(&rhs.den))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar::from_poly(self.num.mul(&rhs.num));
        }
        if let Some(c) = self.as_rational() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_rational() {
            return self.scale(&c);
        }
        Scalar::normalized(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

/// Panics on division by zero; use [`Scalar::checked_div`] for a fallible form.
impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr(&[]))
    }
}

/// Upper bound on expression size, checked at solver and verifier boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_terms: 100_000 }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            max_terms: usize::MAX,
        }
    }

    pub fn check(&self, s: &Scalar) -> Result<(), ScalarError> {
        let size = s.size();
        if size > self.max_terms {
            Err(ScalarError::Budget {
                size,
                limit: self.max_terms,
            })
        } else {
            Ok(())
        }
    }
}
