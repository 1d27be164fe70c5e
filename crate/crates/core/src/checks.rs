//! Identity suites. Every check evaluates both sides of an identity exactly
//! and records the nonzero differences as residual witnesses.
//!
//! Tensorial identities are checked on all frame tuples, which decides them,
//! and additionally on seeded random sections through the section-level
//! operators, which exercises an independent code path.

use leibniz_scalar::{Budget, Rational, Scalar};

use crate::algebroid::{frame_section, section_add, section_scale, section_sub, Algebroid, Section};
use crate::array::{all_indices, SparseArray};
use crate::calculus::{
    associator, associator_vanishes_on_frame, exterior_derivative_unchecked, graded_commutator, is_zero_opt,
    leibniz_form, Derivation,
};
use crate::connection::{
    apply_proj, check_admissible, contract, curvature, curvature_apply, is_admissible, kind_bracket, l_contraction,
    l_contraction_apply, nabla, nabla2, nabla_tensor, project_first, torsion, torsion_apply, BracketKind, Connection, Metric,
};
use crate::error::Result;
use crate::fixtures::{random_forms, random_sections, rng, random_poly};
use crate::forms::EForm;
use crate::levicivita::{check_levicivita_props, decompose_connection};
use crate::report::{frame_at, sample_at, CheckReport};

/// Sampling parameters shared by all suites.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub seed: u64,
    pub samples: usize,
    pub degree: u32,
    pub budget: Budget,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0,
            samples: 8,
            degree: 2,
            budget: Budget::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Classify,
    Admissible,
    Cartan,
    Bianchi,
    Ricci,
    Magic,
    LeviCivita,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::All,
        Suite::Classify,
        Suite::Admissible,
        Suite::Cartan,
        Suite::Bianchi,
        Suite::Ricci,
        Suite::Magic,
        Suite::LeviCivita,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Classify => "classify",
            Suite::Admissible => "admissible",
            Suite::Cartan => "cartan",
            Suite::Bianchi => "bianchi",
            Suite::Ricci => "ricci",
            Suite::Magic => "magic",
            Suite::LeviCivita => "levicivita",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// The data an identity is evaluated on, with seeded samples.
pub struct Inputs<'a> {
    pub alg: &'a Algebroid,
    pub conn: &'a Connection,
    pub metric: Option<&'a Metric>,
    pub sections: Vec<Section>,
    pub functions: Vec<Scalar>,
    pub forms: Vec<EForm>,
    frames: Vec<Section>,
}

impl<'a> Inputs<'a> {
    pub fn new(alg: &'a Algebroid, conn: &'a Connection, metric: Option<&'a Metric>, cfg: &CheckConfig) -> Self {
        let (r, n) = (alg.rank(), alg.dim());
        let sections = random_sections(cfg.seed, cfg.samples, r, n, cfg.degree);
        let mut g = rng(cfg.seed.wrapping_add(1));
        let functions = (0..cfg.samples.clamp(1, 2))
            .map(|_| random_poly(&mut g, n, cfg.degree, 3))
            .collect();
        let forms = random_forms(cfg.seed.wrapping_add(2), r, n, 2, cfg.degree);
        Inputs {
            alg,
            conn,
            metric,
            sections,
            functions,
            forms,
            frames: (0..r).map(|a| frame_section(r, a)).collect(),
        }
    }

    fn rank(&self) -> usize {
        self.alg.rank()
    }

    fn has_proj(&self) -> bool {
        self.alg.proj().is_some()
    }

    /// Consecutive sample tuples of length `k`, cycling through the samples.
    fn sample_tuples(&self, k: usize) -> Vec<(Vec<String>, Vec<&Section>)> {
        let m = self.sections.len();
        (0..m)
            .map(|i| {
                let idx: Vec<usize> = (0..k).map(|j| (i + j) % m).collect();
                (sample_at(&idx), idx.iter().map(|&j| &self.sections[j]).collect())
            })
            .collect()
    }

    /// All frame tuples of length `k` followed by the sample tuples.
    fn tuples(&self, k: usize) -> Vec<(Vec<String>, Vec<&Section>)> {
        let r = self.rank();
        let mut out: Vec<(Vec<String>, Vec<&Section>)> = all_indices(&vec![r; k])
            .into_iter()
            .map(|idx| (frame_at(&idx), idx.iter().map(|&a| &self.frames[a]).collect()))
            .collect();
        out.extend(self.sample_tuples(k));
        out
    }

    /// Sections used as derivation directions: the frame and the samples.
    fn directions(&self) -> Vec<(String, &Section)> {
        let mut out: Vec<(String, &Section)> = self
            .frames
            .iter()
            .enumerate()
            .map(|(a, s)| ((a + 1).to_string(), s))
            .collect();
        out.extend(self.sections.iter().enumerate().map(|(i, s)| (format!("s{i}"), s)));
        out
    }

    fn kinds(&self) -> Vec<BracketKind> {
        if self.has_proj() {
            vec![BracketKind::Modified, BracketKind::Projected]
        } else {
            vec![BracketKind::Modified]
        }
    }
}

/// A failing report for an identity whose hypotheses exclude the input,
/// carrying the admissibility residuals as witnesses.
fn refused(identity: &str, inp: &Inputs) -> CheckReport {
    let mut rep = check_admissible(inp.alg, inp.conn);
    rep.identity = identity.to_string();
    rep.fail("requires an admissible connection");
    rep
}

fn suffix(name: &str, kind: BracketKind) -> String {
    match kind {
        BracketKind::Modified => name.to_string(),
        _ => format!("{name}_{}", kind.name()),
    }
}

fn record_section(rep: &mut CheckReport, at: &[String], diff: &[Scalar]) {
    rep.record_all(at, diff);
}

fn record_form(rep: &mut CheckReport, prefix: &[String], diff: &EForm) {
    for (idx, v) in diff.components() {
        let mut at = prefix.to_vec();
        at.extend(frame_at(idx));
        rep.record(at, v.clone());
    }
}

fn record_opt(rep: &mut CheckReport, prefix: &[String], diff: &Option<EForm>) {
    if let Some(f) = diff {
        record_form(rep, prefix, f);
    }
}

fn neg() -> Rational {
    Rational::from_integer(-1)
}

/// `Σ_e Γ^a_{e d} s^e`, i.e. `∇_s X_d` for each `a`.
fn nabla_frame(inp: &Inputs, s: &[Scalar], d: usize) -> Section {
    nabla(inp.alg, inp.conn, s, &inp.frames[d])
}

// ---------------------------------------------------------------- classify

/// Classification flags and, when a projector is present, its axioms.
pub fn classify(alg: &Algebroid, budget: &Budget) -> Result<Vec<CheckReport>> {
    let c = alg.classify();
    let mut rep = CheckReport::new("classify");
    rep.assume(format!(
        "almost_dull={} almost_lie={} pre_leibniz={} pre_dull={} pre_lie={}",
        c.almost_dull, c.almost_lie, c.pre_leibniz, c.pre_dull, c.pre_lie
    ));
    let mut out = vec![rep];
    if alg.proj().is_some() {
        out.push(alg.check_locality_projector(budget)?);
    }
    Ok(out)
}

// -------------------------------------------------------------- admissible

/// `T(u, v) = −T(v, u)` for the modified (and projected) torsion.
pub fn torsion_antisymmetry(inp: &Inputs, kind: BracketKind) -> Result<CheckReport> {
    let name = suffix("torsion_antisymmetry", kind);
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(&name, inp));
    }
    let mut rep = CheckReport::new(name);
    let t = torsion(inp.alg, inp.conn, kind)?;
    let r = inp.rank();
    for idx in all_indices(&[r, r, r]) {
        if idx[1] <= idx[2] {
            rep.record(frame_at(&idx), t.get(&idx) + t.get(&[idx[0], idx[2], idx[1]]));
        }
    }
    for (at, s) in inp.sample_tuples(2) {
        let a = torsion_apply(inp.alg, inp.conn, kind, s[0], s[1])?;
        let b = torsion_apply(inp.alg, inp.conn, kind, s[1], s[0])?;
        record_section(&mut rep, &at, &section_add(&a, &b));
    }
    Ok(rep)
}

/// `R(u, v)w = −R(v, u)w`.
pub fn curvature_antisymmetry(inp: &Inputs) -> Result<CheckReport> {
    let name = "curvature_antisymmetry";
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let mut rep = CheckReport::new(name);
    let rc = curvature(inp.alg, inp.conn)?;
    let r = inp.rank();
    for idx in all_indices(&[r; 4]) {
        if idx[1] <= idx[2] {
            rep.record(frame_at(&idx), rc.get(&idx) + rc.get(&[idx[0], idx[2], idx[1], idx[3]]));
        }
    }
    for (at, s) in inp.sample_tuples(3) {
        let a = curvature_apply(inp.alg, inp.conn, s[0], s[1], s[2])?;
        let b = curvature_apply(inp.alg, inp.conn, s[1], s[0], s[2])?;
        record_section(&mut rep, &at, &section_add(&a, &b));
    }
    Ok(rep)
}

/// The component arrays of torsion and curvature agree with the operators
/// evaluated directly on sample sections.
pub fn component_consistency(inp: &Inputs) -> Result<CheckReport> {
    let mut rep = CheckReport::new("component_consistency");
    let mut arrays: Vec<(BracketKind, SparseArray)> = Vec::new();
    for kind in inp.kinds() {
        arrays.push((kind, torsion(inp.alg, inp.conn, kind)?));
    }
    for (at, s) in inp.sample_tuples(2) {
        for (kind, t) in &arrays {
            let direct = torsion_apply(inp.alg, inp.conn, *kind, s[0], s[1])?;
            let mut at = at.clone();
            at.push(format!("torsion_{}", kind.name()));
            record_section(&mut rep, &at, &section_sub(&direct, &contract(t, &[s[0], s[1]])));
        }
    }
    if inp.has_proj() {
        let rc = curvature(inp.alg, inp.conn)?;
        for (at, s) in inp.sample_tuples(3) {
            let direct = curvature_apply(inp.alg, inp.conn, s[0], s[1], s[2])?;
            let mut at = at.clone();
            at.push("curvature".into());
            record_section(&mut rep, &at, &section_sub(&direct, &contract(&rc, &[s[0], s[1], s[2]])));
        }
    }
    Ok(rep)
}

pub fn admissible_suite(inp: &Inputs) -> Result<Vec<CheckReport>> {
    let mut out = vec![check_admissible(inp.alg, inp.conn)];
    for kind in inp.kinds() {
        out.push(torsion_antisymmetry(inp, kind)?);
    }
    if inp.has_proj() {
        out.push(curvature_antisymmetry(inp)?);
    }
    out.push(component_consistency(inp)?);
    Ok(out)
}

// ------------------------------------------------------------------ cartan

fn torsion_form(t: &SparseArray, r: usize, a: usize) -> EForm {
    EForm::from_fn(r, 2, |i| t.get(&[a, i[0], i[1]]).clone())
}

/// `(R^a_b)(X_c, X_d) = R^a_{cdb}`.
fn curvature_form(rc: &SparseArray, r: usize, a: usize, b: usize) -> EForm {
    EForm::from_fn(r, 2, |i| rc.get(&[a, i[0], i[1], b]).clone())
}

/// `T^a = d e^a + ω^a_b ∧ e^b` with the derivative and torsion of `kind`.
pub fn cartan_first(inp: &Inputs, kind: BracketKind) -> Result<CheckReport> {
    let name = suffix("cartan_first", kind);
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(&name, inp));
    }
    let mut rep = CheckReport::new(name);
    let r = inp.rank();
    let t = torsion(inp.alg, inp.conn, kind)?;
    for a in 0..r {
        let mut rhs = exterior_derivative_unchecked(inp.alg, inp.conn, &EForm::basis(r, a), kind)?;
        for b in 0..r {
            rhs = rhs.add(&inp.conn.omega(a, b).wedge(&EForm::basis(r, b)));
        }
        record_form(&mut rep, &[format!("a={}", a + 1)], &torsion_form(&t, r, a).sub(&rhs));
    }
    Ok(rep)
}

/// `R^a_b = d̂ ω^a_b + ω^a_c ∧ ω^c_b`.
pub fn cartan_second(inp: &Inputs) -> Result<CheckReport> {
    let name = "cartan_second";
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let mut rep = CheckReport::new(name);
    let r = inp.rank();
    let rc = curvature(inp.alg, inp.conn)?;
    let omega: Vec<Vec<EForm>> = (0..r).map(|a| (0..r).map(|b| inp.conn.omega(a, b)).collect()).collect();
    for a in 0..r {
        for b in 0..r {
            let mut rhs = exterior_derivative_unchecked(inp.alg, inp.conn, &omega[a][b], BracketKind::Projected)?;
            for c in 0..r {
                rhs = rhs.add(&omega[a][c].wedge(&omega[c][b]));
            }
            let prefix = vec![format!("a={}", a + 1), format!("b={}", b + 1)];
            record_form(&mut rep, &prefix, &curvature_form(&rc, r, a, b).sub(&rhs));
        }
    }
    Ok(rep)
}

/// `d̂² f = 0` on sample functions and coordinates.
pub fn dhat_squared_functions(inp: &Inputs) -> Result<CheckReport> {
    let name = "dhat_squared_functions";
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let mut rep = CheckReport::new(name);
    let r = inp.rank();
    let coords = (0..inp.alg.dim()).map(Scalar::var);
    for (i, f) in inp.functions.iter().cloned().chain(coords).enumerate() {
        let d1 = exterior_derivative_unchecked(inp.alg, inp.conn, &EForm::function(r, f), BracketKind::Projected)?;
        let d2 = exterior_derivative_unchecked(inp.alg, inp.conn, &d1, BracketKind::Projected)?;
        record_form(&mut rep, &[format!("f{i}")], &d2);
    }
    Ok(rep)
}

/// Compares `d̂²Ω(u, v, w)` for 1-forms with `sign · Ω(Assoc(u, v, w))` on
/// frame triples, the associator computed from the projected bracket.
fn dhat_squared_vs_associator(inp: &Inputs, name: &str, sign: i64) -> Result<CheckReport> {
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let mut rep = CheckReport::new(name);
    let r = inp.rank();
    let kind = BracketKind::Projected;
    let mut assoc = Vec::new();
    for idx in all_indices(&[r, r, r]) {
        let f = &inp.frames;
        assoc.push((idx.clone(), associator(inp.alg, inp.conn, kind, &f[idx[0]], &f[idx[1]], &f[idx[2]])?));
    }
    let s = Scalar::from_int(sign);
    for (k, omega) in inp.forms.iter().filter(|f| f.degree() == 1).enumerate() {
        let d1 = exterior_derivative_unchecked(inp.alg, inp.conn, omega, kind)?;
        let d2 = exterior_derivative_unchecked(inp.alg, inp.conn, &d1, kind)?;
        for (idx, a) in &assoc {
            let rhs = &s * &omega.eval(std::slice::from_ref(a));
            let mut at = vec![format!("form{k}")];
            at.extend(frame_at(idx));
            rep.record(at, &d2.at(idx) - &rhs);
        }
    }
    Ok(rep)
}

/// `d̂²Ω = Ω(Assoc)` as stated for the projected modified bracket.
pub fn dhat_squared_associator(inp: &Inputs) -> Result<CheckReport> {
    let mut rep = dhat_squared_vs_associator(inp, "dhat_squared_associator", 1)?;
    rep.assume("1-forms; Assoc(u,v,w) = [u,[v,w]] - [[u,v],w] - [v,[u,w]]");
    Ok(rep)
}

/// `d̂²Ω(u, v, w) = Ω(Jac(u, v, w))` with `Jac = [[u,v],w] + cyclic`,
/// which equals `−Ω(Assoc(u, v, w))` for an antisymmetric bracket.
pub fn dhat_squared_jacobiator(inp: &Inputs) -> Result<CheckReport> {
    dhat_squared_vs_associator(inp, "dhat_squared_jacobiator", -1)
}

/// Structure equations and the laws of `d̂²`.
pub fn cartan_suite(inp: &Inputs) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for kind in inp.kinds() {
        out.push(cartan_first(inp, kind)?);
    }
    if inp.has_proj() {
        out.push(cartan_second(inp)?);
        out.push(dhat_squared_functions(inp)?);
        out.push(dhat_squared_jacobiator(inp)?);
    }
    Ok(out)
}

// ----------------------------------------------------------------- bianchi

/// How the double bracket in the Jacobi-type correction term is nested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nesting {
    /// `[u, [v, w]]`
    Inner,
    /// `[[u, v], w]`
    Outer,
}

/// Double brackets of frame triples, as `jac[u][v][w]`.
fn double_brackets(inp: &Inputs, kind: BracketKind, nesting: Nesting) -> Result<Vec<Vec<Vec<Section>>>> {
    let r = inp.rank();
    let f = &inp.frames;
    let br = |x: &[Scalar], y: &[Scalar]| kind_bracket(inp.alg, inp.conn, kind, x, y);
    let pairs: Vec<Vec<Section>> = (0..r)
        .map(|a| (0..r).map(|b| br(&f[a], &f[b])).collect())
        .collect::<Result<_>>()?;
    (0..r)
        .map(|u| {
            (0..r)
                .map(|v| {
                    (0..r)
                        .map(|w| match nesting {
                            Nesting::Inner => br(&f[u], &pairs[v][w]),
                            Nesting::Outer => br(&pairs[u][v], &f[w]),
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn cyclic(b: usize, c: usize, d: usize) -> [(usize, usize, usize); 3] {
    [(b, c, d), (c, d, b), (d, b, c)]
}

/// `(1 − P) L(e^a, ∇_{X_a} X_u, X_v)` as `[c, u, v]`.
fn locality_remainder(inp: &Inputs) -> Result<SparseArray> {
    let a = l_contraction(inp.alg, inp.conn);
    Ok(a.sub(&project_first(inp.alg.require_proj()?, &a)))
}

/// `R(u,v)w + cyc = (∇_u T)(v,w) + T(T(u,v),w) + extra(u,v,w) + cyc` on
/// frame triples.
fn bianchi_first_with(
    inp: &Inputs,
    name: &str,
    t: &SparseArray,
    extra: impl Fn(usize, usize, usize) -> Section,
) -> Result<CheckReport> {
    let mut rep = CheckReport::new(name);
    let r = inp.rank();
    let rc = curvature(inp.alg, inp.conn)?;
    let nt = nabla_tensor(inp.alg, inp.conn, t, 1);
    for idx in all_indices(&[r, r, r]) {
        let mut diff = vec![Scalar::zero(); r];
        for (u, v, w) in cyclic(idx[0], idx[1], idx[2]) {
            let ex = extra(u, v, w);
            for (a, da) in diff.iter_mut().enumerate() {
                let mut x = rc.get(&[a, u, v, w]) - nt.get(&[a, u, v, w]);
                for e in 0..r {
                    let te = t.get(&[e, u, v]);
                    if !te.is_zero() {
                        x = &x - &(te * t.get(&[a, e, w]));
                    }
                }
                *da = &*da + &(&x - &ex[a]);
            }
        }
        record_section(&mut rep, &frame_at(&idx), &diff);
    }
    Ok(rep)
}

/// `R(u,v)w + cyc = (∇_u T̂)(v,w) + T̂(T̂(u,v),w) + J(u,v,w) + cyc` with `J`
/// the double projected bracket nested as given. The identity holds for
/// [`Nesting::Inner`]; for antisymmetric brackets the outer nesting flips
/// the sign of the cyclic sum.
pub fn bianchi_first(inp: &Inputs, nesting: Nesting) -> Result<CheckReport> {
    let name = match nesting {
        Nesting::Inner => "bianchi_first",
        Nesting::Outer => "bianchi_first_outer",
    };
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let kind = BracketKind::Projected;
    let th = torsion(inp.alg, inp.conn, kind)?;
    let jac = double_brackets(inp, kind, nesting)?;
    bianchi_first_with(inp, name, &th, |u, v, w| jac[u][v][w].clone())
}

/// `R(u,v)w + cyc = (∇_u T)(v,w) + T(T(u,v),w) − ∇_{N(u,v)}w + [u,[v,w]^∇]^∇ + cyc`
/// with `N(u,v) = (1 − P) L(e^a, ∇_{X_a}u, v)`.
pub fn bianchi_first_modified(inp: &Inputs) -> Result<CheckReport> {
    let name = "bianchi_first_modified";
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let r = inp.rank();
    let t = torsion(inp.alg, inp.conn, BracketKind::Modified)?;
    let jac = double_brackets(inp, BracketKind::Modified, Nesting::Inner)?;
    let n = locality_remainder(inp)?;
    let col = |u: usize, v: usize| -> Section { (0..r).map(|c| n.get(&[c, u, v]).clone()).collect() };
    bianchi_first_with(inp, name, &t, |u, v, w| section_sub(&jac[u][v][w], &nabla_frame(inp, &col(u, v), w)))
}

/// `(∇_u R)(v,w)w' + cyc = R(u, T(v,w))w' − R(u, N(v,w))w' + ∇_{[[u,v]^,w]^}w' + cyc`,
/// where `N` is subtracted only when given. With `T = T̂` and no `N` this is
/// the projected form.
fn bianchi_second_with(inp: &Inputs, name: &str, t: &SparseArray, n: Option<&SparseArray>) -> Result<CheckReport> {
    let r = inp.rank();
    let jac = double_brackets(inp, BracketKind::Projected, Nesting::Outer)?;
    let rc = curvature(inp.alg, inp.conn)?;
    let nr = nabla_tensor(inp.alg, inp.conn, &rc, 1);
    let nj: Vec<Vec<Vec<Vec<Section>>>> = jac
        .iter()
        .map(|x| {
            x.iter()
                .map(|y| y.iter().map(|j| (0..r).map(|f| nabla_frame(inp, j, f)).collect()).collect())
                .collect()
        })
        .collect();
    let mut rep = CheckReport::new(name);
    for idx in all_indices(&[r; 4]) {
        let f = idx[3];
        let mut diff = vec![Scalar::zero(); r];
        for (u, v, w) in cyclic(idx[0], idx[1], idx[2]) {
            for (a, da) in diff.iter_mut().enumerate() {
                let mut x = nr.get(&[a, u, v, w, f]) - &nj[u][v][w][f][a];
                for e in 0..r {
                    let rue = rc.get(&[a, u, e, f]);
                    if rue.is_zero() {
                        continue;
                    }
                    let mut te = t.get(&[e, v, w]).clone();
                    if let Some(n) = n {
                        te = &te - n.get(&[e, v, w]);
                    }
                    if !te.is_zero() {
                        x = &x - &(&te * rue);
                    }
                }
                *da = &*da + &x;
            }
        }
        record_section(&mut rep, &frame_at(&idx), &diff);
    }
    Ok(rep)
}

/// `(∇_u R)(v,w)w' + cyc = R(u, T̂(v,w))w' + ∇_{[[u,v]^,w]^}w' + cyc`.
pub fn bianchi_second(inp: &Inputs) -> Result<CheckReport> {
    let name = "bianchi_second";
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let th = torsion(inp.alg, inp.conn, BracketKind::Projected)?;
    bianchi_second_with(inp, name, &th, None)
}

/// The second identity in terms of the modified torsion, using
/// `T̂ = T − N` with `N(u,v) = (1 − P) L(e^a, ∇_{X_a}u, v)`.
pub fn bianchi_second_modified(inp: &Inputs) -> Result<CheckReport> {
    let name = "bianchi_second_modified";
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let t = torsion(inp.alg, inp.conn, BracketKind::Modified)?;
    let n = locality_remainder(inp)?;
    bianchi_second_with(inp, name, &t, Some(&n))
}

/// The modified second identity with the locality corrections expanded as
/// `∇_u∇_{N(u,v)}w' − ∇_{N(u,v)}∇_u w' − ∇_{N([v,w]^∇, u)}w' + ∇_{[[u,v]^∇,w]^∇}w'`
/// next to `R(u, T(v,w))w'`, evaluated term by term on sections. This
/// expansion agrees with [`bianchi_second_modified`] only when `N = 0`.
pub fn bianchi_second_modified_expanded(inp: &Inputs) -> Result<CheckReport> {
    let name = "bianchi_second_modified_expanded";
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(name, inp));
    }
    let (alg, conn) = (inp.alg, inp.conn);
    let p = alg.require_proj()?;
    let m = BracketKind::Modified;
    let rc = curvature(alg, conn)?;
    let nr = nabla_tensor(alg, conn, &rc, 1);
    let rest = |x: &[Scalar], y: &[Scalar]| {
        let l = l_contraction_apply(alg, conn, x, y);
        section_sub(&l, &apply_proj(p, &l))
    };
    let mut rep = CheckReport::new(name);
    let r = inp.rank();
    let f = &inp.frames;
    for idx in all_indices(&[r; 4]) {
        let wp = &f[idx[3]];
        let mut diff = vec![Scalar::zero(); r];
        for (u, v, w) in cyclic(idx[0], idx[1], idx[2]) {
            let (u, v, w) = (&f[u], &f[v], &f[w]);
            let lhs = contract(&nr, &[u, v, w, wp]);
            let tvw = torsion_apply(alg, conn, m, v, w)?;
            let mut rhs = contract(&rc, &[u, &tvw, wp]);
            let luv = rest(u, v);
            rhs = section_add(&rhs, &nabla(alg, conn, u, &nabla(alg, conn, &luv, wp)));
            rhs = section_sub(&rhs, &nabla(alg, conn, &luv, &nabla(alg, conn, u, wp)));
            let vw = kind_bracket(alg, conn, m, v, w)?;
            rhs = section_sub(&rhs, &nabla(alg, conn, &rest(&vw, u), wp));
            let uvw = kind_bracket(alg, conn, m, &kind_bracket(alg, conn, m, u, v)?, w)?;
            rhs = section_add(&rhs, &nabla(alg, conn, &uvw, wp));
            diff = section_add(&diff, &section_sub(&lhs, &rhs));
        }
        record_section(&mut rep, &frame_at(&idx), &diff);
    }
    Ok(rep)
}

/// `d̂T̂^a + ω^a_b ∧ T̂^b = R^a_b ∧ e^b + d̂²e^a` and
/// `d̂R^a_b + ω^a_c ∧ R^c_b = R^a_c ∧ ω^c_b + d̂²ω^a_b`.
pub fn differential_bianchi(inp: &Inputs) -> Result<Vec<CheckReport>> {
    let names = ["differential_bianchi_torsion", "differential_bianchi_curvature"];
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(names.iter().map(|n| refused(n, inp)).collect());
    }
    let (alg, conn) = (inp.alg, inp.conn);
    let kind = BracketKind::Projected;
    let d = |f: &EForm| exterior_derivative_unchecked(alg, conn, f, kind);
    let r = inp.rank();
    let th = torsion(alg, conn, kind)?;
    let rc = curvature(alg, conn)?;
    let omega: Vec<Vec<EForm>> = (0..r).map(|a| (0..r).map(|b| conn.omega(a, b)).collect()).collect();
    let tf: Vec<EForm> = (0..r).map(|a| torsion_form(&th, r, a)).collect();
    let rf: Vec<Vec<EForm>> = (0..r).map(|a| (0..r).map(|b| curvature_form(&rc, r, a, b)).collect()).collect();

    let mut first = CheckReport::new(names[0]);
    for a in 0..r {
        let ea = EForm::basis(r, a);
        let mut diff = d(&tf[a])?.sub(&d(&d(&ea)?)?);
        for b in 0..r {
            diff = diff.add(&omega[a][b].wedge(&tf[b]));
            diff = diff.sub(&rf[a][b].wedge(&EForm::basis(r, b)));
        }
        record_form(&mut first, &[format!("a={}", a + 1)], &diff);
    }
    let mut second = CheckReport::new(names[1]);
    for a in 0..r {
        for b in 0..r {
            let mut diff = d(&rf[a][b])?.sub(&d(&d(&omega[a][b])?)?);
            for c in 0..r {
                diff = diff.add(&omega[a][c].wedge(&rf[c][b]));
                diff = diff.sub(&rf[a][c].wedge(&omega[c][b]));
            }
            record_form(&mut second, &[format!("a={}", a + 1), format!("b={}", b + 1)], &diff);
        }
    }
    Ok(vec![first, second])
}

pub fn bianchi_suite(inp: &Inputs) -> Result<Vec<CheckReport>> {
    if !inp.has_proj() {
        return Ok(Vec::new());
    }
    let mut out = vec![
        bianchi_first(inp, Nesting::Inner)?,
        bianchi_second(inp)?,
        bianchi_first_modified(inp)?,
        bianchi_second_modified(inp)?,
    ];
    out.extend(differential_bianchi(inp)?);
    Ok(out)
}

// ------------------------------------------------------------------- ricci

/// `∇²_{u,v}w − ∇²_{v,u}w = R(u,v)w − ∇_{T(u,v)}w + ∇_{(1−P)L(e^a, ∇_{X_a}u, v)}w`
/// for any connection.
pub fn ricci(inp: &Inputs) -> Result<CheckReport> {
    let (alg, conn) = (inp.alg, inp.conn);
    let p = alg.require_proj()?;
    let mut rep = CheckReport::new("ricci");
    for (at, s) in inp.tuples(3) {
        let (u, v, w) = (s[0], s[1], s[2]);
        let lhs = section_sub(&nabla2(alg, conn, u, v, w), &nabla2(alg, conn, v, u, w));
        let t = torsion_apply(alg, conn, BracketKind::Modified, u, v)?;
        let l = l_contraction_apply(alg, conn, u, v);
        let rest = section_sub(&l, &apply_proj(p, &l));
        let mut rhs = curvature_apply(alg, conn, u, v, w)?;
        rhs = section_sub(&rhs, &nabla(alg, conn, &t, w));
        rhs = section_add(&rhs, &nabla(alg, conn, &rest, w));
        record_section(&mut rep, &at, &section_sub(&lhs, &rhs));
    }
    Ok(rep)
}

/// `∇²_{u,v}w − ∇²_{v,u}w = R(u,v)w − ∇_{T̂(u,v)}w`.
pub fn ricci_projected(inp: &Inputs) -> Result<CheckReport> {
    let (alg, conn) = (inp.alg, inp.conn);
    let mut rep = CheckReport::new("ricci_projected");
    for (at, s) in inp.tuples(3) {
        let (u, v, w) = (s[0], s[1], s[2]);
        let lhs = section_sub(&nabla2(alg, conn, u, v, w), &nabla2(alg, conn, v, u, w));
        let t = torsion_apply(alg, conn, BracketKind::Projected, u, v)?;
        let rhs = section_sub(&curvature_apply(alg, conn, u, v, w)?, &nabla(alg, conn, &t, w));
        record_section(&mut rep, &at, &section_sub(&lhs, &rhs));
    }
    Ok(rep)
}

/// For torsion-free connections,
/// `R(u,v)w = ∇²_{u,v}w − ∇²_{v,u}w − ∇_{(1−P)L(e^a, ∇_{X_a}u, v)}w`.
pub fn ricci_torsion_free(inp: &Inputs) -> Result<Option<CheckReport>> {
    let (alg, conn) = (inp.alg, inp.conn);
    if !torsion(alg, conn, BracketKind::Modified)?.is_zero() {
        return Ok(None);
    }
    let p = alg.require_proj()?;
    let mut rep = CheckReport::new("ricci_torsion_free");
    for (at, s) in inp.tuples(3) {
        let (u, v, w) = (s[0], s[1], s[2]);
        let l = l_contraction_apply(alg, conn, u, v);
        let rest = section_sub(&l, &apply_proj(p, &l));
        let mut rhs = section_sub(&nabla2(alg, conn, u, v, w), &nabla2(alg, conn, v, u, w));
        rhs = section_sub(&rhs, &nabla(alg, conn, &rest, w));
        record_section(&mut rep, &at, &section_sub(&curvature_apply(alg, conn, u, v, w)?, &rhs));
    }
    Ok(Some(rep))
}

pub fn ricci_suite(inp: &Inputs) -> Result<Vec<CheckReport>> {
    if !inp.has_proj() {
        return Ok(Vec::new());
    }
    let mut out = vec![ricci(inp)?, ricci_projected(inp)?];
    out.extend(ricci_torsion_free(inp)?);
    Ok(out)
}

// ------------------------------------------------------------------- magic

/// `𝓛_v = [d, ι_v]` for the modified and projected derivatives.
pub fn magic_formula(inp: &Inputs, kind: BracketKind) -> Result<CheckReport> {
    let name = suffix("magic_formula", kind);
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(&name, inp));
    }
    let mut rep = CheckReport::new(name);
    for (label, v) in inp.directions() {
        for (k, omega) in inp.forms.iter().enumerate() {
            let lie = leibniz_form(inp.alg, inp.conn, kind, v, omega)?;
            let comm = graded_commutator(inp.alg, inp.conn, Derivation::Exterior(kind), Derivation::Interior(v), omega)?;
            let diff = match comm {
                Some(c) => lie.sub(&c),
                None => lie,
            };
            record_form(&mut rep, &[format!("v={label}"), format!("form{k}")], &diff);
        }
    }
    Ok(rep)
}

/// `𝓛_{fv}Ω = f 𝓛_vΩ + df ∧ ι_vΩ`.
pub fn leibniz_function_rule(inp: &Inputs, kind: BracketKind) -> Result<CheckReport> {
    let name = suffix("leibniz_function_rule", kind);
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(&name, inp));
    }
    let mut rep = CheckReport::new(name);
    for (i, f) in inp.functions.iter().enumerate() {
        let df = inp.alg.coboundary(f);
        for (label, v) in inp.directions() {
            let fv = section_scale(f, v);
            for (k, omega) in inp.forms.iter().enumerate() {
                let lhs = leibniz_form(inp.alg, inp.conn, kind, &fv, omega)?;
                let mut rhs = leibniz_form(inp.alg, inp.conn, kind, v, omega)?.mul_scalar(f);
                if omega.degree() > 0 {
                    rhs = rhs.add(&df.wedge(&omega.interior(v)?));
                }
                let at = vec![format!("f{i}"), format!("v={label}"), format!("form{k}")];
                record_form(&mut rep, &at, &lhs.sub(&rhs));
            }
        }
    }
    Ok(rep)
}

/// `[𝓛_u, ι_v] = ι_{[u,v]}` and `𝓛_v(Ω1 ∧ Ω2) = 𝓛_vΩ1 ∧ Ω2 + Ω1 ∧ 𝓛_vΩ2`.
pub fn leibniz_derivation(inp: &Inputs, kind: BracketKind) -> Result<Vec<CheckReport>> {
    let (alg, conn) = (inp.alg, inp.conn);
    let mut inter = CheckReport::new(suffix("leibniz_interior", kind));
    let mut wedge = CheckReport::new(suffix("leibniz_wedge", kind));
    for (at, s) in inp.tuples(2) {
        let (u, v) = (s[0], s[1]);
        let uv = kind_bracket(alg, conn, kind, u, v)?;
        for (k, omega) in inp.forms.iter().enumerate().filter(|(_, f)| f.degree() > 0) {
            let comm = graded_commutator(alg, conn, Derivation::Leibniz(kind, u), Derivation::Interior(v), omega)?;
            let diff = match comm {
                Some(c) => c.sub(&omega.interior(&uv)?),
                None => omega.interior(&uv)?.scale(&neg()),
            };
            let mut at = at.clone();
            at.push(format!("form{k}"));
            record_form(&mut inter, &at, &diff);
        }
    }
    for (label, v) in inp.directions() {
        let lie: Vec<EForm> = inp
            .forms
            .iter()
            .map(|f| leibniz_form(alg, conn, kind, v, f))
            .collect::<Result<_>>()?;
        for i in 0..inp.forms.len() {
            for j in i..inp.forms.len() {
                let (a, b) = (&inp.forms[i], &inp.forms[j]);
                let lhs = leibniz_form(alg, conn, kind, v, &a.wedge(b))?;
                let rhs = lie[i].wedge(b).add(&a.wedge(&lie[j]));
                let at = vec![format!("v={label}"), format!("form{i}"), format!("form{j}")];
                record_form(&mut wedge, &at, &lhs.sub(&rhs));
            }
        }
    }
    Ok(vec![inter, wedge])
}

/// `[𝓛_v, ι_v] = 0` for antisymmetric brackets.
pub fn leibniz_interior_same(inp: &Inputs, kind: BracketKind) -> Result<CheckReport> {
    let name = suffix("leibniz_interior_same", kind);
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(&name, inp));
    }
    let mut rep = CheckReport::new(name);
    for (label, v) in inp.directions() {
        for (k, omega) in inp.forms.iter().enumerate() {
            let comm = graded_commutator(inp.alg, inp.conn, Derivation::Leibniz(kind, v), Derivation::Interior(v), omega)?;
            if !is_zero_opt(&comm) {
                record_opt(&mut rep, &[format!("v={label}"), format!("form{k}")], &comm);
            }
        }
    }
    Ok(rep)
}

/// `d(Ω1 ∧ Ω2) = dΩ1 ∧ Ω2 + (−1)^{p1} Ω1 ∧ dΩ2`.
pub fn exterior_leibniz_rule(inp: &Inputs, kind: BracketKind) -> Result<CheckReport> {
    let name = suffix("exterior_leibniz_rule", kind);
    if !is_admissible(inp.alg, inp.conn) {
        return Ok(refused(&name, inp));
    }
    let (alg, conn) = (inp.alg, inp.conn);
    let d = |f: &EForm| exterior_derivative_unchecked(alg, conn, f, kind);
    let mut rep = CheckReport::new(name);
    let mut forms: Vec<EForm> = inp.functions.iter().map(|f| EForm::function(inp.rank(), f.clone())).collect();
    forms.extend(inp.forms.iter().cloned());
    let derived: Vec<EForm> = forms.iter().map(&d).collect::<Result<_>>()?;
    for i in 0..forms.len() {
        for j in 0..forms.len() {
            let (a, b) = (&forms[i], &forms[j]);
            let lhs = d(&a.wedge(b))?;
            let mut second = a.wedge(&derived[j]);
            if a.degree() % 2 == 1 {
                second = second.scale(&neg());
            }
            let rhs = derived[i].wedge(b).add(&second);
            record_form(&mut rep, &[format!("form{i}"), format!("form{j}")], &lhs.sub(&rhs));
        }
    }
    Ok(rep)
}

/// When the associator of `kind` vanishes: `[𝓛_u, 𝓛_v] = 𝓛_{[u,v]}` and,
/// for antisymmetric brackets, `[𝓛_v, d] = 0`. Otherwise the report is
/// skipped with a note.
pub fn leibniz_commutators(inp: &Inputs, kind: BracketKind) -> Result<CheckReport> {
    let (alg, conn) = (inp.alg, inp.conn);
    let mut rep = CheckReport::new(format!("leibniz_commutators_{}", kind.name()));
    if !associator_vanishes_on_frame(alg, conn, kind)? {
        rep.assume("skipped: associator ≠ 0");
        return Ok(rep);
    }
    let with_d = match kind {
        BracketKind::Plain => alg.symmetric_gamma_report().pass,
        _ => is_admissible(alg, conn),
    };
    for (at, s) in inp.tuples(2) {
        let (u, v) = (s[0], s[1]);
        let uv = kind_bracket(alg, conn, kind, u, v)?;
        for (k, omega) in inp.forms.iter().enumerate() {
            let comm = graded_commutator(alg, conn, Derivation::Leibniz(kind, u), Derivation::Leibniz(kind, v), omega)?;
            let lie = leibniz_form(alg, conn, kind, &uv, omega)?;
            let mut at = at.clone();
            at.push(format!("form{k}"));
            let diff = match comm {
                Some(c) => c.sub(&lie),
                None => lie,
            };
            record_form(&mut rep, &at, &diff);
            if with_d {
                let c = graded_commutator(alg, conn, Derivation::Leibniz(kind, u), Derivation::Exterior(kind), omega)?;
                at.push("d".into());
                record_opt(&mut rep, &at, &c);
            }
        }
    }
    Ok(rep)
}

pub fn magic_suite(inp: &Inputs) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    let kinds = inp.kinds();
    for &kind in &kinds {
        out.push(magic_formula(inp, kind)?);
        out.push(leibniz_function_rule(inp, kind)?);
    }
    for kind in std::iter::once(BracketKind::Plain).chain(kinds.iter().copied()) {
        out.extend(leibniz_derivation(inp, kind)?);
    }
    for &kind in &kinds {
        out.push(leibniz_interior_same(inp, kind)?);
        out.push(exterior_leibniz_rule(inp, kind)?);
    }
    for kind in std::iter::once(BracketKind::Plain).chain(kinds.iter().copied()) {
        out.push(leibniz_commutators(inp, kind)?);
    }
    Ok(out)
}

// -------------------------------------------------------------- levicivita

pub fn levicivita_suite(inp: &Inputs, budget: &Budget) -> Result<Vec<CheckReport>> {
    let Some(metric) = inp.metric else {
        return Ok(Vec::new());
    };
    let mut out = vec![check_levicivita_props(inp.alg, inp.conn, metric, &inp.sections)?.report];
    if is_admissible(inp.alg, inp.conn) {
        out.push(decompose_connection(inp.alg, inp.conn, metric, budget)?.report);
    } else {
        out.push(refused("decomposition", inp));
    }
    Ok(out)
}

/// Runs a suite. Classification does not need a connection; the others do.
pub fn run_suite(
    alg: &Algebroid,
    conn: Option<&Connection>,
    metric: Option<&Metric>,
    suite: Suite,
    cfg: &CheckConfig,
) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Classify) {
        out.extend(classify(alg, &cfg.budget)?);
    }
    let Some(conn) = conn else {
        return Ok(out);
    };
    let inp = Inputs::new(alg, conn, metric, cfg);
    let wants = |s: Suite| suite == Suite::All || suite == s;
    if suite == Suite::All || suite == Suite::Admissible {
        out.extend(admissible_suite(&inp)?);
    }
    if wants(Suite::Cartan) {
        out.extend(cartan_suite(&inp)?);
    }
    if wants(Suite::Bianchi) {
        out.extend(bianchi_suite(&inp)?);
    }
    if wants(Suite::Ricci) {
        out.extend(ricci_suite(&inp)?);
    }
    if wants(Suite::Magic) {
        out.extend(magic_suite(&inp)?);
    }
    if wants(Suite::LeviCivita) {
        out.extend(levicivita_suite(&inp, &cfg.budget)?);
    }
    Ok(out)
}
