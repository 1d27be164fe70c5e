//! Multivariate polynomial gcd over the rationals by recursive primitive
//! pseudo-remainder sequences.

use crate::monomial::Monomial;
use crate::poly::Poly;
use crate::rational::Rational;

/// Normalizes so the leading coefficient is 1.
pub fn monic(p: &Poly) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    p.scale(&p.leading_coeff().recip())
}

/// Greatest common divisor, made monic. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return monic(b);
    }
    if b.is_zero() {
        return monic(a);
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    let mc = a.monomial_content().gcd(&b.monomial_content());
    let a = strip_monomial(a, &a.monomial_content());
    let b = strip_monomial(b, &b.monomial_content());
    let g = gcd_rec(&a, &b);
    monic(&g.mul_term(&mc, &Rational::ONE))
}

fn strip_monomial(p: &Poly, m: &Monomial) -> Poly {
    if m.is_one() {
        p.clone()
    } else {
        p.div_exact(&Poly::monomial(m.clone(), Rational::ONE))
            .expect("monomial content divides")
    }
}

fn main_var(a: &Poly, b: &Poly) -> Option<usize> {
    let w = a.width().max(b.width());
    (0..w).rev().find(|&v| a.degree_in(v) > 0 || b.degree_in(v) > 0)
}

fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return monic(b);
    }
    if b.is_zero() {
        return monic(a);
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    let v = main_var(a, b).expect("non-constant input");
    let (da, db) = (a.degree_in(v), b.degree_in(v));
    if da == 0 {
        return gcd_rec(a, &content_in(b, v));
    }
    if db == 0 {
        return gcd_rec(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd_rec(&ca, &cb);
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        let r = prem(&p, &q, v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(v) == 0 {
            q = Poly::one();
            break;
        }
        p = q;
        q = primitive_in(&r, v);
    }
    monic(&c.mul(&q))
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x_v`.
fn content_in(p: &Poly, v: usize) -> Poly {
    let mut g = Poly::zero();
    for c in p.coeffs_in(v) {
        if c.is_zero() {
            continue;
        }
        g = gcd_rec(&g, &c);
        if g.as_constant().is_some() {
            return Poly::one();
        }
    }
    g
}

fn primitive_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides")
}

/// Pseudo-remainder of `p` by `q` with respect to `x_v`.
fn prem(p: &Poly, q: &Poly, v: usize) -> Poly {
    let dq = q.degree_in(v);
    let lq = q.lc_in(v);
    let mut r = p.clone();
    while !r.is_zero() && r.degree_in(v) >= dq {
        let dr = r.degree_in(v);
        let lr = r.lc_in(v);
        let shift = Poly::monomial(Monomial::var(v, dr - dq), Rational::ONE);
        r = r.mul(&lq).sub(&lr.mul(&shift).mul(q));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn common_factor_found() {
        let f = x(0).add(&x(1));
        let a = f.mul(&x(0).sub(&Poly::one()));
        let b = f.mul(&x(1).add(&x(2)).pow(2));
        assert_eq!(gcd(&a, &b), f);
    }

    #[test]
    fn coprime_and_monomial() {
        let a = x(0).pow(2).mul(&x(1));
        let b = x(0).mul(&x(1).add(&Poly::one()));
        assert_eq!(gcd(&a, &b), x(0));
        assert!(gcd(&x(0).add(&Poly::one()), &x(1)).is_one());
    }

    #[test]
    fn rational_coefficients() {
        let h = Rational::new(1, 2);
        let f = x(0).scale(&h).add(&Poly::constant(Rational::new(3, 4)));
        let a = f.mul(&x(1));
        let b = f.mul(&x(0));
        assert_eq!(gcd(&a, &b), monic(&f));
    }
}
