use leibniz_scalar::Scalar;

use crate::algebroid::{frame_section, section_sub, Algebroid, Section};
use crate::array::{all_indices, SparseArray};
use crate::connection::{is_admissible, kind_bracket, modified_anholonomy, BracketKind, Connection};
use crate::error::{GeomError, Result};
use crate::forms::EForm;

fn sign(k: usize) -> bool {
    k % 2 == 1
}

/// The alternating formula for the exterior derivative on frame elements
/// `(X_{a_0}, ..., X_{a_p})`, using the anholonomy `gam` of the chosen bracket.
fn alternating(alg: &Algebroid, gam: &SparseArray, omega: &EForm, idx: &[usize]) -> Scalar {
    let r = alg.rank();
    let mut acc = Scalar::zero();
    for i in 0..idx.len() {
        let mut rest = idx.to_vec();
        rest.remove(i);
        let t = alg.rho(idx[i], &omega.at(&rest));
        acc = if sign(i) { &acc - &t } else { &acc + &t };
    }
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            let mut rest: Vec<usize> = idx.to_vec();
            rest.remove(j);
            rest.remove(i);
            let mut t = Scalar::zero();
            for c in 0..r {
                let g = gam.get(&[c, idx[i], idx[j]]);
                if g.is_zero() {
                    continue;
                }
                let mut full = vec![c];
                full.extend_from_slice(&rest);
                let w = omega.at(&full);
                if !w.is_zero() {
                    t = &t + &(g * &w);
                }
            }
            acc = if sign(i + j) { &acc - &t } else { &acc + &t };
        }
    }
    acc
}

/// The alternating formula evaluated on every frame tuple, without
/// assuming the result is antisymmetric. Used to witness the failure of
/// antisymmetry for non-admissible connections.
pub fn exterior_derivative_raw(alg: &Algebroid, conn: &Connection, omega: &EForm, kind: BracketKind) -> Result<SparseArray> {
    let gam = modified_anholonomy(alg, conn, kind)?;
    let dims = vec![alg.rank(); omega.degree() + 1];
    Ok(SparseArray::from_fn(&dims, |idx| alternating(alg, &gam, omega, idx)))
}

/// `d(∇)` for `kind = Modified`, `d̂(∇)` for `kind = Projected`; `Plain` uses
/// the algebroid bracket and needs it antisymmetric.
pub fn e_exterior_derivative(alg: &Algebroid, conn: &Connection, omega: &EForm, kind: BracketKind) -> Result<EForm> {
    let ok = match kind {
        BracketKind::Plain => alg.symmetric_gamma_report().pass,
        _ => is_admissible(alg, conn),
    };
    if !ok {
        return Err(GeomError::NotAdmissible);
    }
    exterior_derivative_unchecked(alg, conn, omega, kind)
}

/// The exterior derivative on increasing tuples without the admissibility
/// precondition.
pub fn exterior_derivative_unchecked(alg: &Algebroid, conn: &Connection, omega: &EForm, kind: BracketKind) -> Result<EForm> {
    if omega.rank() != alg.rank() {
        return Err(GeomError::Shape("form rank differs from bundle rank".into()));
    }
    let gam = modified_anholonomy(alg, conn, kind)?;
    Ok(EForm::from_fn(alg.rank(), omega.degree() + 1, |idx| alternating(alg, &gam, omega, idx)))
}

/// E-Leibniz derivative of a function: `ρ(v)(f)` for every kind.
pub fn leibniz_function(alg: &Algebroid, v: &[Scalar], f: &Scalar) -> Scalar {
    alg.rho_section(v, f)
}

/// E-Leibniz derivative of a section: the chosen bracket `[v, u]'`.
pub fn leibniz_section(alg: &Algebroid, conn: &Connection, kind: BracketKind, v: &[Scalar], u: &[Scalar]) -> Result<Section> {
    kind_bracket(alg, conn, kind, v, u)
}

/// E-Leibniz derivative of a form:
/// `(𝓛_v Ω)(u_1..u_p) = ρ(v)(Ω(u_1..u_p)) − Σ_i Ω(u_1..[v,u_i]'..u_p)`.
pub fn leibniz_form(alg: &Algebroid, conn: &Connection, kind: BracketKind, v: &[Scalar], omega: &EForm) -> Result<EForm> {
    let r = alg.rank();
    let p = omega.degree();
    let brackets: Vec<Section> = (0..r)
        .map(|b| kind_bracket(alg, conn, kind, v, &frame_section(r, b)))
        .collect::<Result<_>>()?;
    Ok(EForm::from_fn(r, p, |idx| {
        let mut acc = alg.rho_section(v, omega.get(idx));
        for i in 0..p {
            for (c, bc) in brackets[idx[i]].iter().enumerate() {
                if bc.is_zero() {
                    continue;
                }
                let mut j = idx.to_vec();
                j[i] = c;
                let w = omega.at(&j);
                if !w.is_zero() {
                    acc = &acc - &(bc * &w);
                }
            }
        }
        acc
    }))
}

/// `Assoc(u, v, w) = [u,[v,w]'] ' − [[u,v]',w]' − [v,[u,w]']'`.
pub fn associator(alg: &Algebroid, conn: &Connection, kind: BracketKind, u: &[Scalar], v: &[Scalar], w: &[Scalar]) -> Result<Section> {
    let b = |x: &[Scalar], y: &[Scalar]| kind_bracket(alg, conn, kind, x, y);
    let t1 = b(u, &b(v, w)?)?;
    let t2 = b(&b(u, v)?, w)?;
    let t3 = b(v, &b(u, w)?)?;
    Ok(section_sub(&section_sub(&t1, &t2), &t3))
}

/// Whether the associator of `kind` vanishes on all frame triples. For
/// brackets whose associator is tensorial this decides it on all sections.
pub fn associator_vanishes_on_frame(alg: &Algebroid, conn: &Connection, kind: BracketKind) -> Result<bool> {
    let r = alg.rank();
    for idx in all_indices(&[r, r, r]) {
        let s: Vec<Section> = idx.iter().map(|&a| frame_section(r, a)).collect();
        if associator(alg, conn, kind, &s[0], &s[1], &s[2])?.iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A graded derivation of the algebra of E-forms.
#[derive(Clone, Copy, Debug)]
pub enum Derivation<'a> {
    /// `d(∇)` or `d̂(∇)`, degree 1.
    Exterior(BracketKind),
    /// `ι_v`, degree −1.
    Interior(&'a [Scalar]),
    /// `𝓛_v` for the chosen bracket, degree 0.
    Leibniz(BracketKind, &'a [Scalar]),
}

impl Derivation<'_> {
    pub fn degree(&self) -> i32 {
        match self {
            Derivation::Exterior(_) => 1,
            Derivation::Interior(_) => -1,
            Derivation::Leibniz(..) => 0,
        }
    }

    /// Applies the derivation. Interior products of functions are `None`,
    /// standing for the zero element of degree −1.
    pub fn apply(&self, alg: &Algebroid, conn: &Connection, omega: Option<&EForm>) -> Result<Option<EForm>> {
        let Some(omega) = omega else {
            return Ok(None);
        };
        Ok(match self {
            Derivation::Exterior(kind) => Some(exterior_derivative_unchecked(alg, conn, omega, *kind)?),
            Derivation::Interior(v) => {
                if omega.degree() == 0 {
                    None
                } else {
                    Some(omega.interior(v)?)
                }
            }
            Derivation::Leibniz(kind, v) => Some(leibniz_form(alg, conn, *kind, v, omega)?),
        })
    }
}

fn opt_sub(a: Option<EForm>, b: Option<EForm>) -> Option<EForm> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.sub(&b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b.scale(&leibniz_scalar::Rational::from_integer(-1))),
        (None, None) => None,
    }
}

fn opt_add(a: Option<EForm>, b: Option<EForm>) -> Option<EForm> {
    opt_sub(a, b.map(|b| b.scale(&leibniz_scalar::Rational::from_integer(-1))))
}

/// `[D1, D2] Ω = D1 D2 Ω − (−1)^{k1 k2} D2 D1 Ω`.
pub fn graded_commutator(alg: &Algebroid, conn: &Connection, d1: Derivation, d2: Derivation, omega: &EForm) -> Result<Option<EForm>> {
    let a = d1.apply(alg, conn, d2.apply(alg, conn, Some(omega))?.as_ref())?;
    let b = d2.apply(alg, conn, d1.apply(alg, conn, Some(omega))?.as_ref())?;
    Ok(if (d1.degree() * d2.degree()) % 2 == 0 {
        opt_sub(a, b)
    } else {
        opt_add(a, b)
    })
}

/// True when an optional form is absent or zero.
pub fn is_zero_opt(f: &Option<EForm>) -> bool {
    f.as_ref().is_none_or(EForm::is_zero)
}

/// `Ω(Assoc(u, v, w))` for a 1-form `Ω`.
pub fn form_on_associator(alg: &Algebroid, conn: &Connection, kind: BracketKind, omega: &EForm, u: &[Scalar], v: &[Scalar], w: &[Scalar]) -> Result<Scalar> {
    let a = associator(alg, conn, kind, u, v, w)?;
    Ok(omega.eval(&[a]))
}
