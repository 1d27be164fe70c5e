use leibniz_scalar::linsolve::inverse;
use leibniz_scalar::{Budget, Matrix, Scalar};

use crate::algebroid::{section_sub, Algebroid, Section};
use crate::array::{all_indices, SparseArray};
use crate::error::{GeomError, Result};
use crate::forms::EForm;
use crate::report::{frame_at, CheckReport};

/// Which bracket (and hence which anholonomy) a computation uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BracketKind {
    /// The algebroid bracket itself.
    Plain,
    /// The bracket corrected by the L-contraction of the connection.
    Modified,
    /// The bracket corrected by the projected L-contraction.
    Projected,
}

impl BracketKind {
    pub fn name(self) -> &'static str {
        match self {
            BracketKind::Plain => "plain",
            BracketKind::Modified => "modified",
            BracketKind::Projected => "projected",
        }
    }
}

/// Coefficients `Γ^a_bc` with `∇_{X_b} X_c = Γ^a_bc X_a`, stored as `[a, b, c]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    coeff: SparseArray,
}

impl Connection {
    pub fn zero(r: usize) -> Self {
        Connection {
            coeff: SparseArray::new(&[r, r, r]),
        }
    }

    pub fn new(coeff: SparseArray) -> Result<Self> {
        let d = coeff.dims();
        if d.len() != 3 || d[0] != d[1] || d[1] != d[2] {
            return Err(GeomError::Shape("connection must be r x r x r".into()));
        }
        Ok(Connection { coeff })
    }

    pub fn rank(&self) -> usize {
        self.coeff.dims()[0]
    }

    pub fn coeff(&self) -> &SparseArray {
        &self.coeff
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &Scalar {
        self.coeff.get(&[a, b, c])
    }

    /// The connection 1-form `ω^a_b` with `(ω^a_b)_c = Γ^a_cb`.
    pub fn omega(&self, a: usize, b: usize) -> EForm {
        EForm::from_fn(self.rank(), 1, |t| self.get(a, t[0], b).clone())
    }
}

/// A symmetric non-degenerate bilinear form with its exact inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    g: Matrix,
    ginv: Matrix,
}

impl Metric {
    pub fn new(g: Matrix, budget: &Budget) -> Result<Self> {
        let r = g.len();
        if g.iter().any(|row| row.len() != r) {
            return Err(GeomError::Shape("metric must be square".into()));
        }
        for a in 0..r {
            for b in a + 1..r {
                if g[a][b] != g[b][a] {
                    return Err(GeomError::Shape("metric must be symmetric".into()));
                }
            }
        }
        let ginv = inverse(&g, budget).map_err(|e| match e {
            leibniz_scalar::ScalarError::DivisionByZero => GeomError::DegenerateMetric,
            other => GeomError::Scalar(other),
        })?;
        Ok(Metric { g, ginv })
    }

    pub fn rank(&self) -> usize {
        self.g.len()
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn ginv(&self) -> &Matrix {
        &self.ginv
    }

    pub fn pair(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if !vb.is_zero() && !self.g[a][b].is_zero() {
                    acc = &acc + &(&(ua * vb) * &self.g[a][b]);
                }
            }
        }
        acc
    }
}

fn check_rank(alg: &Algebroid, conn: &Connection) -> Result<()> {
    if conn.rank() != alg.rank() {
        return Err(GeomError::Shape("connection rank differs from bundle rank".into()));
    }
    Ok(())
}

/// `(∇_v w)^a = ρ(v)(w^a) + v^b w^c Γ^a_bc`.
pub fn nabla(alg: &Algebroid, conn: &Connection, v: &[Scalar], w: &[Scalar]) -> Section {
    let mut out: Section = w.iter().map(|wa| alg.rho_section(v, wa)).collect();
    for (k, g) in conn.coeff().iter() {
        let (a, b, c) = (k[0], k[1], k[2]);
        if v[b].is_zero() || w[c].is_zero() {
            continue;
        }
        out[a] = &out[a] + &(&(&v[b] * &w[c]) * g);
    }
    out
}

/// Second covariant derivative `∇_u ∇_v w − ∇_{∇_u v} w`.
pub fn nabla2(alg: &Algebroid, conn: &Connection, u: &[Scalar], v: &[Scalar], w: &[Scalar]) -> Section {
    let nvw = nabla(alg, conn, v, w);
    let nuv = nabla(alg, conn, u, v);
    section_sub(&nabla(alg, conn, u, &nvw), &nabla(alg, conn, &nuv, w))
}

/// Frame components of the covariant derivative of a tensor whose first
/// `contra` slots are contravariant. The derivative slot is inserted at
/// position `contra`.
pub fn nabla_tensor(alg: &Algebroid, conn: &Connection, t: &SparseArray, contra: usize) -> SparseArray {
    let r = alg.rank();
    let order = t.order();
    let mut out = SparseArray::new(&vec![r; order + 1]);
    let put = |idx: &[usize], e: usize| {
        let mut full = idx[..contra].to_vec();
        full.push(e);
        full.extend_from_slice(&idx[contra..]);
        full
    };
    for (idx, val) in t.iter() {
        for e in 0..r {
            let d = alg.rho(e, val);
            out.add_to(&put(idx, e), &d);
        }
    }
    for (idx, val) in t.iter() {
        for slot in 0..order {
            let x = idx[slot];
            for e in 0..r {
                for y in 0..r {
                    if slot < contra {
                        // + Γ^y_ex T^{..x..}
                        let g = conn.get(y, e, x);
                        if g.is_zero() {
                            continue;
                        }
                        let mut j = idx.to_vec();
                        j[slot] = y;
                        out.add_to(&put(&j, e), &(g * val));
                    } else {
                        // − Γ^x_ey T_{..x..} lands at slot value y
                        let g = conn.get(x, e, y);
                        if g.is_zero() {
                            continue;
                        }
                        let mut j = idx.to_vec();
                        j[slot] = y;
                        out.add_to(&put(&j, e), &-(g * val));
                    }
                }
            }
        }
    }
    out
}

/// Contracts a (1, k) tensor `t[a, i1, .., ik]` with `k` sections.
pub fn contract(t: &SparseArray, args: &[&[Scalar]]) -> Section {
    let r = t.dims()[0];
    let mut out = vec![Scalar::zero(); r];
    'outer: for (idx, val) in t.iter() {
        let mut c = val.clone();
        for (slot, arg) in args.iter().enumerate() {
            let x = &arg[idx[slot + 1]];
            if x.is_zero() {
                continue 'outer;
            }
            c = &c * x;
        }
        out[idx[0]] = &out[idx[0]] + &c;
    }
    out
}

/// Contracts a fully covariant tensor with sections.
pub fn contract_cov(t: &SparseArray, args: &[&[Scalar]]) -> Scalar {
    let mut acc = Scalar::zero();
    'outer: for (idx, val) in t.iter() {
        let mut c = val.clone();
        for (slot, arg) in args.iter().enumerate() {
            let x = &arg[idx[slot]];
            if x.is_zero() {
                continue 'outer;
            }
            c = &c * x;
        }
        acc = &acc + &c;
    }
    acc
}

/// `A^c_ab = Γ^e_da L^{cd}_{eb}`, the frame components of `L(e^d, ∇_{X_d} X_a, X_b)`.
pub fn l_contraction(alg: &Algebroid, conn: &Connection) -> SparseArray {
    let r = alg.rank();
    let mut out = SparseArray::new(&[r, r, r]);
    for (k, l) in alg.loc().iter() {
        let (c, d, e, b) = (k[0], k[1], k[2], k[3]);
        for a in 0..r {
            let g = conn.get(e, d, a);
            if !g.is_zero() {
                out.add_to(&[c, a, b], &(g * l));
            }
        }
    }
    out
}

/// Applies `P` to the contravariant first slot of an array.
pub fn project_first(p: &Matrix, t: &SparseArray) -> SparseArray {
    let mut out = SparseArray::new(t.dims());
    for (idx, v) in t.iter() {
        for (a, row) in p.iter().enumerate() {
            if !row[idx[0]].is_zero() {
                let mut j = idx.to_vec();
                j[0] = a;
                out.add_to(&j, &(&row[idx[0]] * v));
            }
        }
    }
    out
}

fn correction(alg: &Algebroid, conn: &Connection, kind: BracketKind) -> Result<Option<SparseArray>> {
    Ok(match kind {
        BracketKind::Plain => None,
        BracketKind::Modified => Some(l_contraction(alg, conn)),
        BracketKind::Projected => Some(project_first(alg.require_proj()?, &l_contraction(alg, conn))),
    })
}

/// `γ`, `γ(∇) = γ − A` or `γ̂(∇) = γ − P A`.
pub fn modified_anholonomy(alg: &Algebroid, conn: &Connection, kind: BracketKind) -> Result<SparseArray> {
    check_rank(alg, conn)?;
    Ok(match correction(alg, conn, kind)? {
        None => alg.gamma().clone(),
        Some(c) => alg.gamma().sub(&c),
    })
}

/// `L(e^a, ∇_{X_a} u, v)` as a section.
pub fn l_contraction_apply(alg: &Algebroid, conn: &Connection, u: &[Scalar], v: &[Scalar]) -> Section {
    let r = alg.rank();
    let mut out = vec![Scalar::zero(); r];
    if alg.loc().is_zero() {
        return out;
    }
    let derivs: Vec<Section> = (0..r)
        .map(|a| nabla(alg, conn, &crate::algebroid::frame_section(r, a), u))
        .collect();
    for (k, l) in alg.loc().iter() {
        let (b, a, e, c) = (k[0], k[1], k[2], k[3]);
        if derivs[a][e].is_zero() || v[c].is_zero() {
            continue;
        }
        out[b] = &out[b] + &(&(&derivs[a][e] * &v[c]) * l);
    }
    out
}

/// `P v`.
pub fn apply_proj(p: &Matrix, v: &[Scalar]) -> Section {
    p.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// The chosen bracket on arbitrary sections.
pub fn kind_bracket(alg: &Algebroid, conn: &Connection, kind: BracketKind, u: &[Scalar], v: &[Scalar]) -> Result<Section> {
    let b = alg.bracket(u, v)?;
    Ok(match kind {
        BracketKind::Plain => b,
        BracketKind::Modified => section_sub(&b, &l_contraction_apply(alg, conn, u, v)),
        BracketKind::Projected => {
            let p = alg.require_proj()?;
            section_sub(&b, &apply_proj(p, &l_contraction_apply(alg, conn, u, v)))
        }
    })
}

/// `[u, v]^∇` (modified) or `[u, v]^∇̂` (projected).
pub fn modified_bracket(alg: &Algebroid, conn: &Connection, u: &[Scalar], v: &[Scalar], kind: BracketKind) -> Result<Section> {
    kind_bracket(alg, conn, kind, u, v)
}

/// `T^a_bc = Γ^a_bc − Γ^a_cb − γ'^a_bc` with `γ'` the anholonomy of `kind`.
pub fn torsion(alg: &Algebroid, conn: &Connection, kind: BracketKind) -> Result<SparseArray> {
    let gam = modified_anholonomy(alg, conn, kind)?;
    let r = alg.rank();
    let mut out = SparseArray::new(&[r, r, r]);
    for (k, g) in conn.coeff().iter() {
        out.add_to(&[k[0], k[1], k[2]], g);
        out.add_to(&[k[0], k[2], k[1]], &-g);
    }
    for (k, g) in gam.iter() {
        out.add_to(k, &-g);
    }
    Ok(out)
}

/// `∇_u v − ∇_v u − [u, v]'` evaluated directly on sections.
pub fn torsion_apply(alg: &Algebroid, conn: &Connection, kind: BracketKind, u: &[Scalar], v: &[Scalar]) -> Result<Section> {
    let b = kind_bracket(alg, conn, kind, u, v)?;
    Ok(section_sub(&section_sub(&nabla(alg, conn, u, v), &nabla(alg, conn, v, u)), &b))
}

/// `R^a_bcd = ρ_b(Γ^a_cd) − ρ_c(Γ^a_bd) + Γ^e_cd Γ^a_be − Γ^e_bd Γ^a_ce − γ̂^e_bc Γ^a_ed`.
pub fn curvature(alg: &Algebroid, conn: &Connection) -> Result<SparseArray> {
    let gh = modified_anholonomy(alg, conn, BracketKind::Projected)?;
    let r = alg.rank();
    let mut out = SparseArray::new(&[r; 4]);
    for (k, g) in conn.coeff().iter() {
        let (a, c, d) = (k[0], k[1], k[2]);
        for b in 0..r {
            let t = alg.rho(b, g);
            if !t.is_zero() {
                out.add_to(&[a, b, c, d], &t);
                out.add_to(&[a, c, b, d], &-t);
            }
        }
    }
    for (k1, g1) in conn.coeff().iter() {
        // Γ^e_cd Γ^a_be
        let (e, c, d) = (k1[0], k1[1], k1[2]);
        for a in 0..r {
            for b in 0..r {
                let g2 = conn.get(a, b, e);
                if g2.is_zero() {
                    continue;
                }
                let t = g1 * g2;
                out.add_to(&[a, b, c, d], &t);
                out.add_to(&[a, c, b, d], &-t);
            }
        }
    }
    for (k, gv) in gh.iter() {
        let (e, b, c) = (k[0], k[1], k[2]);
        for a in 0..r {
            for d in 0..r {
                let g2 = conn.get(a, e, d);
                if !g2.is_zero() {
                    out.add_to(&[a, b, c, d], &-(gv * g2));
                }
            }
        }
    }
    Ok(out)
}

/// `∇_u ∇_v w − ∇_v ∇_u w − ∇_{[u,v]^∇̂} w` evaluated on sections.
pub fn curvature_apply(alg: &Algebroid, conn: &Connection, u: &[Scalar], v: &[Scalar], w: &[Scalar]) -> Result<Section> {
    let b = kind_bracket(alg, conn, BracketKind::Projected, u, v)?;
    let uvw = nabla(alg, conn, u, &nabla(alg, conn, v, w));
    let vuw = nabla(alg, conn, v, &nabla(alg, conn, u, w));
    Ok(section_sub(&section_sub(&uvw, &vuw), &nabla(alg, conn, &b, w)))
}

/// `Q_abc = ρ_a(g_bc) − Γ^d_ab g_dc − Γ^d_ac g_bd`.
pub fn non_metricity(alg: &Algebroid, conn: &Connection, metric: &Metric) -> SparseArray {
    let r = alg.rank();
    let g = metric.g();
    let mut out = SparseArray::new(&[r, r, r]);
    for b in 0..r {
        for c in 0..r {
            if g[b][c].is_zero() {
                continue;
            }
            for a in 0..r {
                out.add_to(&[a, b, c], &alg.rho(a, &g[b][c]));
            }
        }
    }
    for (k, gm) in conn.coeff().iter() {
        let (d, a, b) = (k[0], k[1], k[2]);
        for c in 0..r {
            if g[d][c].is_zero() {
                continue;
            }
            let t = gm * &g[d][c];
            out.add_to(&[a, b, c], &-&t);
            out.add_to(&[a, c, b], &-t);
        }
    }
    out
}

/// `γ^c_ab + γ^c_ba − (A^c_ab + A^c_ba)` as `[c, a, b]`.
pub fn admissibility_residual(alg: &Algebroid, conn: &Connection) -> SparseArray {
    let s = alg.gamma().sub(&l_contraction(alg, conn));
    s.add(&s.permuted(&[0, 2, 1]))
}

/// Frame-level admissibility verdict with the residual array as witnesses.
pub fn check_admissible(alg: &Algebroid, conn: &Connection) -> CheckReport {
    let mut rep = CheckReport::new("admissible");
    for (k, v) in admissibility_residual(alg, conn).iter() {
        if k[1] <= k[2] {
            rep.record(frame_at(k), v.clone());
        }
    }
    rep
}

pub fn is_admissible(alg: &Algebroid, conn: &Connection) -> bool {
    admissibility_residual(alg, conn).is_zero()
}

/// Fails with `NotAdmissible` unless the connection is admissible.
pub fn require_admissible(alg: &Algebroid, conn: &Connection) -> Result<()> {
    if is_admissible(alg, conn) {
        Ok(())
    } else {
        Err(GeomError::NotAdmissible)
    }
}

/// `Δ^a_bc = Γ1^a_bc − Γ2^a_bc`.
pub fn difference_tensor(c1: &Connection, c2: &Connection) -> Result<SparseArray> {
    if c1.rank() != c2.rank() {
        return Err(GeomError::Shape("connections of different rank".into()));
    }
    Ok(c1.coeff().sub(c2.coeff()))
}

/// Whether two connections induce the same symmetrized L-contraction,
/// so that one is admissible exactly when the other is.
pub fn equivalent(alg: &Algebroid, c1: &Connection, c2: &Connection) -> Result<bool> {
    let delta = Connection::new(difference_tensor(c1, c2)?)?;
    let a = l_contraction(alg, &delta);
    Ok(a.add(&a.permuted(&[0, 2, 1])).is_zero())
}

/// `γ'^c_ab = Γ^c_ab − Γ^c_ba + A^c_ab`.
pub fn bracket_from_connection(conn: &Connection, amap: &SparseArray) -> Result<SparseArray> {
    if amap.dims() != conn.coeff().dims() {
        return Err(GeomError::Shape("A-map must be r x r x r".into()));
    }
    Ok(conn.coeff().sub(&conn.coeff().permuted(&[0, 2, 1])).add(amap))
}

/// The algebroid carrying the modified (or projected) bracket with `L = 0`.
pub fn modified_algebroid(alg: &Algebroid, conn: &Connection, kind: BracketKind) -> Result<Algebroid> {
    let r = alg.rank();
    let gam = modified_anholonomy(alg, conn, kind)?;
    Algebroid::new(alg.coords().to_vec(), r, alg.anchor().clone(), gam, SparseArray::new(&[r; 4]), None)
}

/// Splits `γ` into the antisymmetric part of `γ(∇)` and the L-contraction,
/// which is valid when the contraction is symmetric in its lower pair.
/// Reports residuals of both index readings of the decomposition.
pub fn check_anholonomy_decomposition(alg: &Algebroid, conn: &Connection) -> Result<CheckReport> {
    let r = alg.rank();
    let mut rep = CheckReport::new("anholonomy_decomposition");
    let a = l_contraction(alg, conn);
    let sym_defect = a.sub(&a.permuted(&[0, 2, 1]));
    if !sym_defect.is_zero() {
        rep.assume("L-contraction is not symmetric; decomposition not applicable");
        return Ok(rep);
    }
    if !is_admissible(alg, conn) {
        rep.assume("connection is not admissible; decomposition not applicable");
        return Ok(rep);
    }
    let gm = modified_anholonomy(alg, conn, BracketKind::Modified)?;
    let half = leibniz_scalar::Rational::new(1, 2);
    let split = gm
        .sub(&gm.permuted(&[0, 2, 1]))
        .add(&a.add(&a.permuted(&[0, 2, 1])))
        .scale(&half);
    for idx in all_indices(&[r, r, r]) {
        let (x, b, c) = (idx[0], idx[1], idx[2]);
        let lhs = alg.gamma().get(&idx);
        rep.record(frame_at(&idx), lhs - split.get(&idx));
        // Literal index placement: Γ^d_{x b} L^{e x}_{d c}, summed over d and e.
        let mut lit = Scalar::zero();
        for d in 0..r {
            for e in 0..r {
                let g = conn.get(d, x, b);
                let l = alg.loc().get(&[e, x, d, c]);
                if !g.is_zero() && !l.is_zero() {
                    lit = &lit + &(g * l);
                }
            }
        }
        let lit_res = lhs - &(gm.get(&idx) + &lit);
        if !lit_res.is_zero() {
            rep.assume(format!(
                "literal index reading differs at ({}): {}",
                frame_at(&idx).join(","),
                lit_res.to_expr(alg.coords())
            ));
        }
    }
    Ok(rep)
}
