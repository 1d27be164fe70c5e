use std::collections::BTreeMap;

use leibniz_scalar::linsolve::{nullspace, rank};
use leibniz_scalar::{Budget, Matrix, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::array::SparseArray;
use crate::error::{GeomError, Result};
use crate::forms::EForm;
use crate::report::{frame_at, CheckReport};

/// Components `v^a` of a section on the frame.
pub type Section = Vec<Scalar>;

/// The frame element `X_a` as a section.
pub fn frame_section(r: usize, a: usize) -> Section {
    let mut v = vec![Scalar::zero(); r];
    v[a] = Scalar::one();
    v
}

pub fn section_add(u: &[Scalar], v: &[Scalar]) -> Section {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

pub fn section_sub(u: &[Scalar], v: &[Scalar]) -> Section {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn section_scale(f: &Scalar, u: &[Scalar]) -> Section {
    u.iter().map(|a| f * a).collect()
}

pub fn is_zero_section(u: &[Scalar]) -> bool {
    u.iter().all(Scalar::is_zero)
}

/// L entries grouped by the (d, e) pair they are contracted over.
type LocIndex = BTreeMap<(usize, usize), Vec<(usize, usize, Scalar)>>;

/// A local pre-Leibniz algebroid over a coordinate chart.
///
/// Index layout: `gamma[c, a, b] = γ^c_ab = <e^c, [X_a, X_b]>`,
/// `loc[a, d, e, c] = L^{ad}_{ec}` with `L(e^d, X_e, X_c) = L^{ad}_{ec} X_a`,
/// `anchor[i][a] = ρ^i_a` and `proj[a][b] = P^a_b`.
#[derive(Clone, Debug)]
pub struct Algebroid {
    coords: Vec<String>,
    rank: usize,
    anchor: Matrix,
    gamma: SparseArray,
    loc: SparseArray,
    proj: Option<Matrix>,
    loc_by_de: LocIndex,
}

/// Structural flags of an algebroid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub almost_dull: bool,
    pub almost_lie: bool,
    pub pre_leibniz: bool,
    pub pre_dull: bool,
    pub pre_lie: bool,
}

impl Algebroid {
    pub fn new(
        coords: Vec<String>,
        rank: usize,
        anchor: Matrix,
        gamma: SparseArray,
        loc: SparseArray,
        proj: Option<Matrix>,
    ) -> Result<Self> {
        let n = coords.len();
        if anchor.len() != n || anchor.iter().any(|row| row.len() != rank) {
            return Err(GeomError::Shape(format!("anchor must be {n}x{rank}")));
        }
        if gamma.dims() != [rank, rank, rank] {
            return Err(GeomError::Shape("gamma must be r x r x r".into()));
        }
        if loc.dims() != [rank, rank, rank, rank] {
            return Err(GeomError::Shape("L must be r x r x r x r".into()));
        }
        if let Some(p) = &proj {
            if p.len() != rank || p.iter().any(|row| row.len() != rank) {
                return Err(GeomError::Shape("P must be r x r".into()));
            }
        }
        let all = [&anchor]
            .into_iter()
            .flatten()
            .flatten()
            .chain(gamma.iter().map(|(_, v)| v))
            .chain(loc.iter().map(|(_, v)| v))
            .chain(proj.iter().flatten().flatten());
        if let Some(w) = all.map(Scalar::width).max() {
            if w > n {
                return Err(GeomError::Shape("expression uses a coordinate beyond the chart".into()));
            }
        }
        let mut loc_by_de: LocIndex = BTreeMap::new();
        for (k, v) in loc.iter() {
            loc_by_de
                .entry((k[1], k[2]))
                .or_default()
                .push((k[0], k[3], v.clone()));
        }
        Ok(Algebroid {
            coords,
            rank,
            anchor,
            gamma,
            loc,
            proj,
            loc_by_de,
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn anchor(&self) -> &Matrix {
        &self.anchor
    }

    pub fn gamma(&self) -> &SparseArray {
        &self.gamma
    }

    pub fn loc(&self) -> &SparseArray {
        &self.loc
    }

    pub fn proj(&self) -> Option<&Matrix> {
        self.proj.as_ref()
    }

    pub fn require_proj(&self) -> Result<&Matrix> {
        self.proj.as_ref().ok_or(GeomError::MissingProjector)
    }

    /// Entries `(a, c, L^{ad}_{ec})` for a fixed pair `(d, e)`.
    pub fn loc_slice(&self, d: usize, e: usize) -> &[(usize, usize, Scalar)] {
        self.loc_by_de.get(&(d, e)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn with_gamma(&self, gamma: SparseArray) -> Result<Algebroid> {
        Algebroid::new(self.coords.clone(), self.rank, self.anchor.clone(), gamma, self.loc.clone(), self.proj.clone())
    }

    pub fn with_loc(&self, loc: SparseArray) -> Result<Algebroid> {
        Algebroid::new(self.coords.clone(), self.rank, self.anchor.clone(), self.gamma.clone(), loc, self.proj.clone())
    }

    pub fn with_proj(&self, proj: Option<Matrix>) -> Result<Algebroid> {
        Algebroid::new(self.coords.clone(), self.rank, self.anchor.clone(), self.gamma.clone(), self.loc.clone(), proj)
    }

    /// `ρ(X_a)(f)`.
    pub fn rho(&self, a: usize, f: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, row) in self.anchor.iter().enumerate() {
            if !row[a].is_zero() {
                acc = &acc + &(&row[a] * &f.derivative(i));
            }
        }
        acc
    }

    /// The vector field `ρ(v)` on the chart.
    pub fn anchor_field(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.anchor
            .iter()
            .map(|row| row.iter().zip(v).map(|(r, c)| r * c).sum())
            .collect()
    }

    /// `ρ(v)(f)`.
    pub fn rho_section(&self, v: &[Scalar], f: &Scalar) -> Scalar {
        if f.is_zero() {
            return Scalar::zero();
        }
        let field = self.anchor_field(v);
        let mut acc = Scalar::zero();
        for (i, x) in field.iter().enumerate() {
            if !x.is_zero() {
                acc = &acc + &(x * &f.derivative(i));
            }
        }
        acc
    }

    /// `L(Ω, u, v)` for an E-1-form given by its components `Ω_d`.
    pub fn loc_apply(&self, omega: &[Scalar], u: &[Scalar], v: &[Scalar]) -> Section {
        let mut out = vec![Scalar::zero(); self.rank];
        for (k, l) in self.loc.iter() {
            let (a, d, e, c) = (k[0], k[1], k[2], k[3]);
            if omega[d].is_zero() || u[e].is_zero() || v[c].is_zero() {
                continue;
            }
            let t = &(&(&omega[d] * &u[e]) * &v[c]) * l;
            out[a] = &out[a] + &t;
        }
        out
    }

    /// The bracket extended from the frame data by the right- and
    /// left-Leibniz rules.
    pub fn bracket(&self, u: &[Scalar], v: &[Scalar]) -> Result<Section> {
        let r = self.rank;
        if u.len() != r || v.len() != r {
            return Err(GeomError::Shape("section length differs from rank".into()));
        }
        let mut out = vec![Scalar::zero(); r];
        for (k, g) in self.gamma.iter() {
            let (c, a, b) = (k[0], k[1], k[2]);
            if u[a].is_zero() || v[b].is_zero() {
                continue;
            }
            out[c] = &out[c] + &(&(&u[a] * &v[b]) * g);
        }
        let fu = self.anchor_field(u);
        let fv = self.anchor_field(v);
        for c in 0..r {
            for i in 0..self.dim() {
                if !fu[i].is_zero() {
                    out[c] = &out[c] + &(&fu[i] * &v[c].derivative(i));
                }
                if !fv[i].is_zero() {
                    out[c] = &out[c] - &(&fv[i] * &u[c].derivative(i));
                }
            }
        }
        if !self.loc.is_zero() {
            // ρ_d(u^a) v^b L^{cd}_{ab}
            let mut du: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
            for (k, l) in self.loc.iter() {
                let (c, d, a, b) = (k[0], k[1], k[2], k[3]);
                if v[b].is_zero() || u[a].is_zero() {
                    continue;
                }
                let dua = du.entry((d, a)).or_insert_with(|| self.rho(d, &u[a])).clone();
                if dua.is_zero() {
                    continue;
                }
                out[c] = &out[c] + &(&(&dua * &v[b]) * l);
            }
        }
        Ok(out)
    }

    /// `Df` with `(Df)_a = ρ(X_a)(f)`.
    pub fn coboundary(&self, f: &Scalar) -> EForm {
        EForm::from_fn(self.rank, 1, |t| self.rho(t[0], f))
    }

    pub fn classify(&self) -> Classification {
        let almost_dull = self.loc.is_zero();
        let almost_lie = almost_dull && self.symmetric_gamma_report().pass;
        let pre_leibniz = self.anchor_morphism_report().pass;
        Classification {
            almost_dull,
            almost_lie,
            pre_leibniz,
            pre_dull: pre_leibniz && almost_dull,
            pre_lie: pre_leibniz && almost_lie,
        }
    }

    /// Residuals of `γ^c_ab + γ^c_ba = 0`.
    pub fn symmetric_gamma_report(&self) -> CheckReport {
        let r = self.rank;
        let mut rep = CheckReport::new("bracket_antisymmetry");
        for c in 0..r {
            for a in 0..r {
                for b in a..r {
                    let s = self.gamma.get(&[c, a, b]) + self.gamma.get(&[c, b, a]);
                    rep.record(frame_at(&[c, a, b]), s);
                }
            }
        }
        rep
    }

    /// Residuals of the anchor morphism property on the frame,
    /// `γ^c_ab ρ^i_c = ρ_a(ρ^i_b) − ρ_b(ρ^i_a)`, together with
    /// `ρ^i_a ρ^j_d L^{ad}_{ec} = 0`, which makes it extend to all sections.
    pub fn anchor_morphism_report(&self) -> CheckReport {
        let (n, r) = (self.dim(), self.rank);
        let mut rep = CheckReport::new("anchor_morphism");
        for a in 0..r {
            for b in 0..r {
                for i in 0..n {
                    let mut lhs = Scalar::zero();
                    for c in 0..r {
                        let g = self.gamma.get(&[c, a, b]);
                        if !g.is_zero() {
                            lhs = &lhs + &(g * &self.anchor[i][c]);
                        }
                    }
                    let rhs = &self.rho(a, &self.anchor[i][b]) - &self.rho(b, &self.anchor[i][a]);
                    let mut at = frame_at(&[a, b]);
                    at.push(format!("x{}", i + 1));
                    rep.record(at, &lhs - &rhs);
                }
            }
        }
        let mut rl: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        for (k, l) in self.loc.iter() {
            let (a, d, e, c) = (k[0], k[1], k[2], k[3]);
            for i in 0..n {
                if self.anchor[i][a].is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &(&self.anchor[i][a] * &self.anchor[j][d]) * l;
                    if !t.is_zero() {
                        let e2 = rl.entry(vec![i, j, e, c]).or_default();
                        *e2 = &*e2 + &t;
                    }
                }
            }
        }
        for (k, v) in rl {
            rep.record(
                vec![format!("x{}", k[0] + 1), format!("x{}", k[1] + 1), (k[2] + 1).to_string(), (k[3] + 1).to_string()],
                v,
            );
        }
        rep
    }

    /// Verifies `im(P L) ⊂ ker ρ` and `P = id` on `ker ρ`, with the rank of
    /// `ρ` spot-checked at sample points.
    pub fn check_locality_projector(&self, budget: &Budget) -> Result<CheckReport> {
        let p = self.require_proj()?;
        let (n, r) = (self.dim(), self.rank);
        let mut rep = CheckReport::new("locality_projector");
        // Condition 1: ρ^i_a P^a_f L^{fd}_{ec} = 0.
        let mut acc: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        for (k, l) in self.loc.iter() {
            let (f, d, e, c) = (k[0], k[1], k[2], k[3]);
            for i in 0..n {
                let mut rp = Scalar::zero();
                for a in 0..r {
                    if !self.anchor[i][a].is_zero() && !p[a][f].is_zero() {
                        rp = &rp + &(&self.anchor[i][a] * &p[a][f]);
                    }
                }
                if rp.is_zero() {
                    continue;
                }
                let ent = acc.entry(vec![i, d, e, c]).or_default();
                *ent = &*ent + &(&rp * l);
            }
        }
        for (k, v) in acc {
            let mut at = vec![format!("x{}", k[0] + 1)];
            at.extend(frame_at(&k[1..]));
            rep.record(at, v);
        }
        // Condition 2: P k = k on a basis of ker ρ.
        let kernel = nullspace(&self.anchor, budget)?;
        for (m, k) in kernel.iter().enumerate() {
            for a in 0..r {
                let pk: Scalar = (0..r).map(|b| &p[a][b] * &k[b]).sum();
                rep.record(vec![format!("ker{}", m + 1), (a + 1).to_string()], &pk - &k[a]);
            }
        }
        let symbolic = rank(&self.anchor, budget)?;
        rep.assume(format!("kernel of the anchor has rank {} over the rational function field", r - symbolic));
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut checked = 0;
        let mut tries = 0;
        while checked < 5 && tries < 200 {
            tries += 1;
            let pt: Vec<Rational> = (0..n)
                .map(|_| Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                .collect();
            let Ok(m) = self
                .anchor
                .iter()
                .map(|row| row.iter().map(|s| s.evaluate(&pt).map(Scalar::from_rational)).collect())
                .collect::<std::result::Result<Vec<Vec<Scalar>>, _>>()
            else {
                continue;
            };
            checked += 1;
            let pr = rank(&m, budget)?;
            if pr != symbolic {
                let shown: Vec<String> = pt.iter().map(|x| x.to_string()).collect();
                rep.assume(format!("anchor rank drops to {pr} at ({})", shown.join(", ")));
            }
        }
        rep.assume(format!("regularity of the anchor spot-checked at {checked} rational points"));
        Ok(rep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use leibniz_scalar::linsolve::identity;

    fn tangent(n: usize) -> Algebroid {
        let coords = (1..=n).map(|i| format!("x{i}")).collect();
        Algebroid::new(coords, n, identity(n), SparseArray::new(&[n, n, n]), SparseArray::new(&[n; 4]), None).unwrap()
    }

    #[test]
    fn coordinate_lie_bracket() {
        let a = tangent(2);
        let u = frame_section(2, 0);
        let v = vec![Scalar::zero(), Scalar::var(0)];
        assert_eq!(a.bracket(&u, &v).unwrap(), frame_section(2, 1));
        let f = &Scalar::var(0) * &Scalar::var(1);
        let df = a.coboundary(&f);
        assert_eq!(df.get(&[0]), &Scalar::var(1));
        assert_eq!(df.get(&[1]), &Scalar::var(0));
        let c = a.classify();
        assert!(c.almost_dull && c.almost_lie && c.pre_leibniz && c.pre_dull && c.pre_lie);
    }

    #[test]
    fn non_pre_leibniz_line() {
        let mut g = SparseArray::new(&[1, 1, 1]);
        g.set(&[0, 0, 0], Scalar::one());
        let a = Algebroid::new(vec!["x1".into()], 1, vec![vec![Scalar::one()]], g, SparseArray::new(&[1; 4]), None).unwrap();
        let c = a.classify();
        assert!(c.almost_dull);
        assert!(!c.almost_lie);
        assert!(!c.pre_leibniz);
    }
}
