use std::collections::BTreeMap;

use leibniz_scalar::linsolve::solve;
use leibniz_scalar::{AffineSolution, Budget, Equation, Rational, Scalar};

use crate::algebroid::{Algebroid, Section};
use crate::array::{all_indices, SparseArray};
use crate::connection::{
    is_admissible, kind_bracket, modified_algebroid, nabla, non_metricity, require_admissible, torsion, BracketKind,
    Connection, Metric,
};
use crate::error::{GeomError, Result};
use crate::report::{frame_at, sample_at, CheckReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionStatus {
    Unique,
    Affine(usize),
    Infeasible,
}

/// All connections satisfying an affine system: `particular + Σ c_i kernel_i`.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub status: SolutionStatus,
    pub particular: Option<Connection>,
    pub kernel_basis: Vec<SparseArray>,
    /// For infeasible systems, the nonzero value the system reduced `0` to.
    pub certificate: Option<Scalar>,
}

impl SolutionSpace {
    fn from_affine(r: usize, sol: AffineSolution) -> Self {
        let to_arr = |v: &[Scalar]| {
            let mut a = SparseArray::new(&[r, r, r]);
            for (j, x) in v.iter().enumerate() {
                a.set(&unflat(r, j), x.clone());
            }
            a
        };
        match sol {
            AffineSolution::Infeasible { residual } => SolutionSpace {
                status: SolutionStatus::Infeasible,
                particular: None,
                kernel_basis: Vec::new(),
                certificate: Some(residual),
            },
            AffineSolution::Solved { particular, kernel } => SolutionSpace {
                status: if kernel.is_empty() {
                    SolutionStatus::Unique
                } else {
                    SolutionStatus::Affine(kernel.len())
                },
                particular: Some(Connection::new(to_arr(&particular)).expect("cube")),
                kernel_basis: kernel.iter().map(|k| to_arr(k)).collect(),
                certificate: None,
            },
        }
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == SolutionStatus::Infeasible
    }

    /// `particular + Σ c_i kernel_i`.
    pub fn member(&self, coeffs: &[Scalar]) -> Option<Connection> {
        let mut acc = self.particular.as_ref()?.coeff().clone();
        for (c, k) in coeffs.iter().zip(&self.kernel_basis) {
            acc = acc.add(&k.mul_scalar(c));
        }
        Connection::new(acc).ok()
    }

    /// Distinct non-constant denominators appearing in the solution.
    pub fn denominator_loci(&self) -> Vec<Scalar> {
        let mut seen: BTreeMap<String, Scalar> = BTreeMap::new();
        let arrays = self.particular.iter().map(Connection::coeff).chain(self.kernel_basis.iter());
        for arr in arrays {
            for (_, v) in arr.iter() {
                if v.den().as_constant().is_none() {
                    let d = Scalar::from_poly(v.den().clone());
                    seen.entry(d.to_string()).or_insert(d);
                }
            }
        }
        seen.into_values().collect()
    }
}

fn flat(r: usize, a: usize, b: usize, c: usize) -> usize {
    (a * r + b) * r + c
}

fn unflat(r: usize, j: usize) -> [usize; 3] {
    [j / (r * r), (j / r) % r, j % r]
}

/// Frame form of the modified Koszul formula, as equations in `Γ^a_bc`:
/// for each `(b, c, d)`,
/// `2Γ^a_bc g_ad − A^e_cd g_eb − A^e_bd g_ec + A^e_bc g_ed
///  = ρ_b g_cd + ρ_c g_bd − ρ_d g_bc − γ^e_cd g_eb − γ^e_bd g_ec + γ^e_bc g_ed`
/// with `A^e_xy = Γ^p_qx L^{eq}_{py}`.
fn koszul_equations(alg: &Algebroid, metric: &Metric) -> Vec<Equation> {
    let r = alg.rank();
    let g = metric.g();
    let gam = alg.gamma();
    let mut eqs = Vec::with_capacity(r * r * r);
    for idx in all_indices(&[r, r, r]) {
        let (b, c, d) = (idx[0], idx[1], idx[2]);
        let mut eq = Equation::new();
        for a in 0..r {
            eq.add_term(flat(r, a, b, c), &g[a][d].scale(&Rational::from_integer(2)));
        }
        // A^e_xy g_ez with sign s, i.e. Σ Γ^p_qx L^{eq}_{py} g_ez.
        let mut add_a = |x: usize, y: usize, z: usize, s: i64| {
            for (k, l) in alg.loc().iter() {
                let (e, q, p, yy) = (k[0], k[1], k[2], k[3]);
                if yy != y || g[e][z].is_zero() {
                    continue;
                }
                eq.add_term(flat(r, p, q, x), &(l * &g[e][z]).scale(&Rational::from_integer(s)));
            }
        };
        add_a(c, d, b, -1);
        add_a(b, d, c, -1);
        add_a(b, c, d, 1);
        let mut rhs = &(&alg.rho(b, &g[c][d]) + &alg.rho(c, &g[b][d])) - &alg.rho(d, &g[b][c]);
        for e in 0..r {
            rhs = &rhs - &(gam.get(&[e, c, d]) * &g[e][b]);
            rhs = &rhs - &(gam.get(&[e, b, d]) * &g[e][c]);
            rhs = &rhs + &(gam.get(&[e, b, c]) * &g[e][d]);
        }
        eq.add_rhs(&rhs);
        eqs.push(eq);
    }
    eqs
}

/// Evaluates a system at a connection: `Σ coeffs Γ − rhs` for each equation.
fn residuals(eqs: &[Equation], conn: &Connection) -> Vec<Scalar> {
    let r = conn.rank();
    eqs.iter()
        .map(|eq| {
            let mut acc = -&eq.rhs;
            for (j, c) in &eq.coeffs {
                let [a, b, cc] = unflat(r, *j);
                let x = conn.get(a, b, cc);
                if !x.is_zero() {
                    acc = &acc + &(c * x);
                }
            }
            acc
        })
        .collect()
}

/// Residual of the modified Koszul formula on frame triples, as `[b, c, d]`.
pub fn koszul_residual(alg: &Algebroid, conn: &Connection, metric: &Metric) -> SparseArray {
    let r = alg.rank();
    let res = residuals(&koszul_equations(alg, metric), conn);
    let mut out = SparseArray::new(&[r, r, r]);
    for (j, v) in res.into_iter().enumerate() {
        out.set(&unflat(r, j), v);
    }
    out
}

fn check_shapes(alg: &Algebroid, metric: &Metric) -> Result<()> {
    if metric.rank() != alg.rank() {
        return Err(GeomError::Shape("metric rank differs from bundle rank".into()));
    }
    Ok(())
}

/// All E-Koszul connections of `metric`.
pub fn solve_koszul(alg: &Algebroid, metric: &Metric, budget: &Budget) -> Result<SolutionSpace> {
    check_shapes(alg, metric)?;
    let r = alg.rank();
    let sol = solve(r * r * r, koszul_equations(alg, metric), budget)?;
    Ok(SolutionSpace::from_affine(r, sol))
}

/// `T^a_bc = 0` as equations: `Γ^a_bc − Γ^a_cb + Γ^e_db L^{ad}_{ec} = γ^a_bc`.
fn torsion_equations(alg: &Algebroid) -> Vec<Equation> {
    let r = alg.rank();
    let mut eqs = Vec::with_capacity(r * r * r);
    for idx in all_indices(&[r, r, r]) {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        let mut eq = Equation::new();
        eq.add_term(flat(r, a, b, c), &Scalar::one());
        eq.add_term(flat(r, a, c, b), &Scalar::from_int(-1));
        for (k, l) in alg.loc().iter() {
            if k[0] == a && k[3] == c {
                let (d, e) = (k[1], k[2]);
                eq.add_term(flat(r, e, d, b), l);
            }
        }
        eq.add_rhs(alg.gamma().get(&idx));
        eqs.push(eq);
    }
    eqs
}

/// All torsion-free connections. Infeasibility certifies that none exists.
pub fn solve_torsion_free(alg: &Algebroid, budget: &Budget) -> Result<SolutionSpace> {
    let r = alg.rank();
    let sol = solve(r * r * r, torsion_equations(alg), budget)?;
    Ok(SolutionSpace::from_affine(r, sol))
}

/// Split of a connection into its Levi-Civita part, contortion and
/// disformation.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub lc_part: Connection,
    pub torsion_part: SparseArray,
    pub nonmetricity_part: SparseArray,
    pub report: CheckReport,
}

/// `Γ = Γ̃ + K + D` where `Γ̃` is the Levi-Civita connection of the
/// almost-Lie algebroid carrying the modified bracket, `K` is built from the
/// torsion and `D` from the non-metricity.
pub fn decompose_connection(alg: &Algebroid, conn: &Connection, metric: &Metric, budget: &Budget) -> Result<Decomposition> {
    check_shapes(alg, metric)?;
    require_admissible(alg, conn)?;
    let r = alg.rank();
    let modified = modified_algebroid(alg, conn, BracketKind::Modified)?;
    let space = solve_koszul(&modified, metric, budget)?;
    let lc = space.particular.clone().ok_or(GeomError::NotAdmissible)?;
    let t = torsion(alg, conn, BracketKind::Modified)?;
    let q = non_metricity(alg, conn, metric);
    let (g, ginv) = (metric.g(), metric.ginv());
    let half = Rational::new(1, 2);
    // Lowered combinations, indexed [b, d, c].
    let mut kq = SparseArray::new(&[r, r, r]);
    let mut kt = SparseArray::new(&[r, r, r]);
    for idx in all_indices(&[r, r, r]) {
        let (b, d, c) = (idx[0], idx[1], idx[2]);
        let qv = &(&-q.get(&[b, d, c]) + q.get(&[d, c, b])) - q.get(&[c, b, d]);
        kq.set(&idx, qv);
        let mut tv = Scalar::zero();
        for e in 0..r {
            tv = &tv - &(&g[e][c] * t.get(&[e, b, d]));
            tv = &tv + &(&g[e][d] * t.get(&[e, b, c]));
            tv = &tv - &(&g[e][b] * t.get(&[e, c, d]));
        }
        kt.set(&idx, tv);
    }
    let raise = |low: &SparseArray| {
        let mut out = SparseArray::new(&[r, r, r]);
        for (k, v) in low.iter() {
            let (b, d, c) = (k[0], k[1], k[2]);
            for a in 0..r {
                if !ginv[a][d].is_zero() {
                    out.add_to(&[a, b, c], &(&ginv[a][d] * v).scale(&half));
                }
            }
        }
        out
    };
    let disformation = raise(&kq);
    let contortion = raise(&kt);
    let mut report = CheckReport::new("decomposition");
    if space.status != SolutionStatus::Unique {
        report.assume(format!("Levi-Civita part not unique: {:?}", space.status));
    }
    let recon = conn.coeff().sub(lc.coeff()).sub(&contortion).sub(&disformation);
    for (k, v) in recon.iter() {
        report.record(frame_at(k), v.clone());
    }
    Ok(Decomposition {
        lc_part: lc,
        torsion_part: contortion,
        nonmetricity_part: disformation,
        report,
    })
}

/// The four Levi-Civita predicates of a connection and their consistency.
#[derive(Clone, Debug)]
pub struct LeviCivitaVerdict {
    pub admissible: bool,
    pub koszul: bool,
    pub torsion_free: bool,
    pub metric_compatible: bool,
    pub report: CheckReport,
}

/// Evaluates admissibility, the Koszul residual, torsion-freeness and metric
/// compatibility; checks that admissible Koszul connections are exactly the
/// torsion-free metric ones; and for Levi-Civita connections checks
/// `(𝓛^∇_v g)(u, w) = g(∇_u v, w) + g(u, ∇_w v)` on frame pairs and samples.
pub fn check_levicivita_props(
    alg: &Algebroid,
    conn: &Connection,
    metric: &Metric,
    samples: &[Section],
) -> Result<LeviCivitaVerdict> {
    check_shapes(alg, metric)?;
    let r = alg.rank();
    let admissible = is_admissible(alg, conn);
    let koszul = koszul_residual(alg, conn, metric).is_zero();
    let torsion_free = torsion(alg, conn, BracketKind::Modified)?.is_zero();
    let metric_compatible = non_metricity(alg, conn, metric).is_zero();
    let mut report = CheckReport::new("levicivita");
    report.assume(format!(
        "admissible={admissible} koszul={koszul} torsion_free={torsion_free} metric_compatible={metric_compatible}"
    ));
    if (admissible && koszul) != (torsion_free && metric_compatible) {
        report.fail("admissible Koszul and torsion-free metric verdicts disagree");
    }
    if torsion_free && metric_compatible {
        let frames: Vec<Section> = (0..r).map(|a| crate::algebroid::frame_section(r, a)).collect();
        let mut triples: Vec<(Vec<String>, [&Section; 3])> = Vec::new();
        for v in 0..r {
            for u in 0..r {
                for w in 0..r {
                    triples.push((frame_at(&[v, u, w]), [&frames[v], &frames[u], &frames[w]]));
                }
            }
        }
        let m = samples.len();
        for i in 0..m {
            let (j, k) = ((i + 1) % m, (i + 2) % m);
            triples.push((sample_at(&[i, j, k]), [&samples[i], &samples[j], &samples[k]]));
        }
        for (at, [v, u, w]) in triples {
            let lhs = {
                let vu = kind_bracket(alg, conn, BracketKind::Modified, v, u)?;
                let vw = kind_bracket(alg, conn, BracketKind::Modified, v, w)?;
                &(&alg.rho_section(v, &metric.pair(u, w)) - &metric.pair(&vu, w)) - &metric.pair(u, &vw)
            };
            let rhs = &metric.pair(&nabla(alg, conn, u, v), w) + &metric.pair(u, &nabla(alg, conn, w, v));
            report.record(at, &lhs - &rhs);
        }
    }
    Ok(LeviCivitaVerdict {
        admissible,
        koszul,
        torsion_free,
        metric_compatible,
        report,
    })
}
