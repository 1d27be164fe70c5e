use leibniz_scalar::linsolve::identity;
use leibniz_scalar::{AffineSolution, Budget, Equation, Matrix, Rational, Scalar};

use crate::algebroid::Algebroid;
use crate::array::{increasing_tuples, sort_with_sign, SparseArray};
use crate::connection::{check_admissible, non_metricity, Connection, Metric};
use crate::error::{GeomError, Result};
use crate::forms::EForm;
use crate::frame::{change_frame, FrameChange};
use crate::report::{frame_at, CheckReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleKind {
    TangentLie,
    TwistedFrameLie,
    CourantStandard,
    CourantHTwisted,
    MetricAlgebroid,
    HigherCourant,
    ConformalCourant,
}

impl ExampleKind {
    pub const ALL: [ExampleKind; 7] = [
        ExampleKind::TangentLie,
        ExampleKind::TwistedFrameLie,
        ExampleKind::CourantStandard,
        ExampleKind::CourantHTwisted,
        ExampleKind::MetricAlgebroid,
        ExampleKind::HigherCourant,
        ExampleKind::ConformalCourant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::TangentLie => "tangent_lie",
            ExampleKind::TwistedFrameLie => "twisted_frame_lie",
            ExampleKind::CourantStandard => "courant_standard",
            ExampleKind::CourantHTwisted => "courant_h_twisted",
            ExampleKind::MetricAlgebroid => "metric_algebroid",
            ExampleKind::HigherCourant => "higher_courant",
            ExampleKind::ConformalCourant => "conformal_courant",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        ExampleKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Constructor parameters per example kind.
#[derive(Clone, Debug)]
pub enum ExampleParams {
    TangentLie { n: usize },
    TwistedFrameLie { n: usize, frame: Matrix },
    CourantStandard { n: usize },
    /// `h` is a 3-form on the chart (rank `n`).
    CourantHTwisted { n: usize, h: EForm },
    MetricAlgebroid { coords: Vec<String>, anchor: Matrix, gamma_antisym: SparseArray, g: Matrix },
    HigherCourant { n: usize, p: usize },
    ConformalCourant { coords: Vec<String>, anchor: Matrix, gamma_antisym: SparseArray, g: Matrix, theta: Vec<Scalar> },
}

impl ExampleParams {
    pub fn kind(&self) -> ExampleKind {
        match self {
            ExampleParams::TangentLie { .. } => ExampleKind::TangentLie,
            ExampleParams::TwistedFrameLie { .. } => ExampleKind::TwistedFrameLie,
            ExampleParams::CourantStandard { .. } => ExampleKind::CourantStandard,
            ExampleParams::CourantHTwisted { .. } => ExampleKind::CourantHTwisted,
            ExampleParams::MetricAlgebroid { .. } => ExampleKind::MetricAlgebroid,
            ExampleParams::HigherCourant { .. } => ExampleKind::HigherCourant,
            ExampleParams::ConformalCourant { .. } => ExampleKind::ConformalCourant,
        }
    }
}

/// The Λ^{p−1}-valued pairing of a higher-Courant algebroid, stored as
/// `[a, b, I]` with `I` enumerating increasing `(p−1)`-tuples of coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct HigherMetricValue {
    pub n: usize,
    pub p: usize,
    pub comps: SparseArray,
}

impl HigherMetricValue {
    pub fn basis(&self) -> Vec<Vec<usize>> {
        increasing_tuples(self.n, self.p - 1)
    }
}

#[derive(Clone, Debug)]
pub struct Example {
    pub kind: ExampleKind,
    pub algebroid: Algebroid,
    pub metric: Option<Metric>,
    pub higher_metric: Option<HigherMetricValue>,
    pub theta: Option<Vec<Scalar>>,
}

pub fn coordinate_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Scalar::zero(); cols]; rows]
}

/// `[I | 0]`, the projection onto the vector slots.
fn vector_projection(n: usize, r: usize) -> Matrix {
    let mut m = zeros(n, r);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Scalar::one();
    }
    m
}

/// Projector onto the slots `n..r`.
fn form_projector(n: usize, r: usize) -> Matrix {
    let mut m = zeros(r, r);
    for (a, row) in m.iter_mut().enumerate().skip(n) {
        row[a] = Scalar::one();
    }
    m
}

/// The split pairing `η` on `T ⊕ T*`.
pub fn courant_pairing(n: usize) -> Matrix {
    let mut m = zeros(2 * n, 2 * n);
    for i in 0..n {
        m[i][n + i] = Scalar::one();
        m[n + i][i] = Scalar::one();
    }
    m
}

/// `L^{ad}_{ec} = g_ec g^{ad}`, the locality operator `g(u, v) g^{-1}(Ω)`.
fn metric_locality(metric: &Metric) -> SparseArray {
    let r = metric.rank();
    let (g, ginv) = (metric.g(), metric.ginv());
    SparseArray::from_fn(&[r; 4], |k| &g[k[2]][k[3]] * &ginv[k[0]][k[1]])
}

/// Coordinate exterior derivative of a form on the chart (rank `n`).
pub fn coordinate_d(form: &EForm) -> EForm {
    let n = form.rank();
    EForm::from_fn(n, form.degree() + 1, |idx| {
        let mut acc = Scalar::zero();
        for i in 0..idx.len() {
            let mut rest = idx.to_vec();
            rest.remove(i);
            let t = form.get(&rest).derivative(idx[i]);
            acc = if i % 2 == 1 { &acc - &t } else { &acc + &t };
        }
        acc
    })
}

/// `ι_X` of a chart form along a vector field with components `x`.
fn coordinate_interior(form: &EForm, x: &[Scalar]) -> EForm {
    if form.degree() == 0 {
        return EForm::zero(form.rank(), 0);
    }
    form.interior(x).expect("degree checked")
}

pub fn make_example(params: &ExampleParams, budget: &Budget) -> Result<Example> {
    let kind = params.kind();
    let mut ex = match params {
        ExampleParams::TangentLie { n } => {
            let n = *n;
            if n == 0 {
                return Err(GeomError::InvalidParams("n must be positive".into()));
            }
            let alg = Algebroid::new(
                coordinate_names(n),
                n,
                identity(n),
                SparseArray::new(&[n, n, n]),
                SparseArray::new(&[n; 4]),
                Some(zeros(n, n)),
            )?;
            Example { kind, algebroid: alg, metric: None, higher_metric: None, theta: None }
        }
        ExampleParams::TwistedFrameLie { n, frame } => {
            let base = make_example(&ExampleParams::TangentLie { n: *n }, budget)?;
            let fc = FrameChange::new(frame.clone(), budget)?;
            let moved = change_frame(&base.algebroid, &fc, None, None, budget)?;
            Example { kind, algebroid: moved.algebroid, metric: None, higher_metric: None, theta: None }
        }
        ExampleParams::CourantStandard { n } => courant(*n, None, budget)?,
        ExampleParams::CourantHTwisted { n, h } => courant(*n, Some(h), budget)?,
        ExampleParams::MetricAlgebroid { coords, anchor, gamma_antisym, g } => {
            let metric = Metric::new(g.clone(), budget)?;
            let gamma = symmetrized_gamma(coords, anchor, gamma_antisym, &metric, None)?;
            let r = metric.rank();
            let alg = Algebroid::new(coords.clone(), r, anchor.clone(), gamma, metric_locality(&metric), None)?;
            Example { kind, algebroid: alg, metric: Some(metric), higher_metric: None, theta: None }
        }
        ExampleParams::HigherCourant { n, p } => higher_courant(*n, *p)?,
        ExampleParams::ConformalCourant { coords, anchor, gamma_antisym, g, theta } => {
            let metric = Metric::new(g.clone(), budget)?;
            let r = metric.rank();
            if theta.len() != r {
                return Err(GeomError::InvalidParams("theta must have one entry per frame index".into()));
            }
            let gamma = symmetrized_gamma(coords, anchor, gamma_antisym, &metric, Some(theta))?;
            let alg = Algebroid::new(coords.clone(), r, anchor.clone(), gamma, metric_locality(&metric), None)?;
            Example { kind, algebroid: alg, metric: Some(metric), higher_metric: None, theta: Some(theta.clone()) }
        }
    };
    ex.kind = kind;
    Ok(ex)
}

fn courant(n: usize, h: Option<&EForm>, budget: &Budget) -> Result<Example> {
    if n == 0 {
        return Err(GeomError::InvalidParams("n must be positive".into()));
    }
    let r = 2 * n;
    let metric = Metric::new(courant_pairing(n), budget)?;
    let mut gamma = SparseArray::new(&[r, r, r]);
    let kind = if let Some(h) = h {
        if h.rank() != n || h.degree() != 3 {
            return Err(GeomError::InvalidParams("H must be a 3-form on the chart".into()));
        }
        if !coordinate_d(h).is_zero() {
            return Err(GeomError::InvalidParams("H is not closed".into()));
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    gamma.set(&[n + k, i, j], h.at(&[i, j, k]));
                }
            }
        }
        ExampleKind::CourantHTwisted
    } else {
        ExampleKind::CourantStandard
    };
    let alg = Algebroid::new(
        coordinate_names(n),
        r,
        vector_projection(n, r),
        gamma,
        metric_locality(&metric),
        Some(form_projector(n, r)),
    )?;
    Ok(Example { kind, algebroid: alg, metric: Some(metric), higher_metric: None, theta: None })
}

/// `γ` with the given antisymmetric part and symmetric part
/// `½ g^{cd} (ρ_d(g_ab) + θ_d g_ab)`.
fn symmetrized_gamma(
    coords: &[String],
    anchor: &Matrix,
    gamma_antisym: &SparseArray,
    metric: &Metric,
    theta: Option<&Vec<Scalar>>,
) -> Result<SparseArray> {
    let r = metric.rank();
    if gamma_antisym.dims() != [r, r, r] {
        return Err(GeomError::InvalidParams("gamma must be r x r x r".into()));
    }
    let sym_defect = gamma_antisym.add(&gamma_antisym.permuted(&[0, 2, 1]));
    if !sym_defect.is_zero() {
        return Err(GeomError::InvalidParams("gamma part must be antisymmetric".into()));
    }
    let probe = Algebroid::new(
        coords.to_vec(),
        r,
        anchor.clone(),
        SparseArray::new(&[r, r, r]),
        SparseArray::new(&[r; 4]),
        None,
    )?;
    let (g, ginv) = (metric.g(), metric.ginv());
    let half = Rational::new(1, 2);
    let mut out = gamma_antisym.clone();
    for a in 0..r {
        for b in 0..r {
            for d in 0..r {
                let mut dg = probe.rho(d, &g[a][b]);
                if let Some(th) = theta {
                    dg = &dg + &(&th[d] * &g[a][b]);
                }
                if dg.is_zero() {
                    continue;
                }
                for c in 0..r {
                    out.add_to(&[c, a, b], &(&ginv[c][d] * &dg).scale(&half));
                }
            }
        }
    }
    Ok(out)
}

fn higher_courant(n: usize, p: usize) -> Result<Example> {
    if n == 0 || p == 0 || p > n {
        return Err(GeomError::InvalidParams("need 1 <= p <= n".into()));
    }
    let forms = increasing_tuples(n, p);
    let lower = increasing_tuples(n, p - 1);
    let r = n + forms.len();
    let form_index = |t: &[usize]| forms.iter().position(|f| f == t).expect("increasing tuple");
    let lower_index = |t: &[usize]| lower.iter().position(|f| f == t).expect("increasing tuple");
    // g(∂_i, dx^J) = ι_{∂_i} dx^J, a (p−1)-form.
    let mut pairing = SparseArray::new(&[r, r, lower.len()]);
    for i in 0..n {
        for (k, j) in forms.iter().enumerate() {
            if let Some(pos) = j.iter().position(|&x| x == i) {
                let mut rest = j.clone();
                rest.remove(pos);
                let s = if pos % 2 == 0 { 1 } else { -1 };
                let li = lower_index(&rest);
                pairing.set(&[i, n + k, li], Scalar::from_int(s));
                pairing.set(&[n + k, i, li], Scalar::from_int(s));
            }
        }
    }
    // L(e^d, X_e, X_c) = dx^d ∧ g(X_e, X_c) for vector-slot d.
    let mut loc = SparseArray::new(&[r; 4]);
    for (k, v) in pairing.iter() {
        let (e, c, li) = (k[0], k[1], k[2]);
        for d in 0..n {
            let mut cat = vec![d];
            cat.extend_from_slice(&lower[li]);
            if let Some((sorted, s)) = sort_with_sign(&cat) {
                let a = n + form_index(&sorted);
                let t = if s < 0 { -v } else { v.clone() };
                loc.add_to(&[a, d, e, c], &t);
            }
        }
    }
    let alg = Algebroid::new(
        coordinate_names(n),
        r,
        vector_projection(n, r),
        SparseArray::new(&[r, r, r]),
        loc,
        Some(form_projector(n, r)),
    )?;
    Ok(Example {
        kind: ExampleKind::HigherCourant,
        algebroid: alg,
        metric: None,
        higher_metric: Some(HigherMetricValue { n, p, comps: pairing }),
        theta: None,
    })
}

/// Extra data a specialized admissibility verdict needs beyond the algebroid.
pub enum Extras<'a> {
    Courant(&'a Metric),
    Higher(&'a HigherMetricValue),
    Conformal(&'a Metric, &'a [Scalar]),
}

/// Residual of the kind-specific compatibility condition:
/// `Q_abc` for almost-Courant, `ι_{ρ(X_a)} d(g_bc) − g(∇_a X_b, X_c) − g(X_b, ∇_a X_c)`
/// (Λ^{p−1}-valued, indexed `[a, b, c, I]`) for higher-Courant, and
/// `Q_abc + θ_a g_bc` for conformal Courant.
pub fn compatibility_residual(alg: &Algebroid, conn: &Connection, extras: &Extras) -> SparseArray {
    match extras {
        Extras::Courant(m) => non_metricity(alg, conn, m),
        Extras::Conformal(m, theta) => {
            let r = alg.rank();
            let mut q = non_metricity(alg, conn, m);
            for a in 0..r {
                for b in 0..r {
                    for c in 0..r {
                        q.add_to(&[a, b, c], &(&theta[a] * &m.g()[b][c]));
                    }
                }
            }
            q
        }
        Extras::Higher(hm) => higher_residual(alg, conn, hm),
    }
}

fn higher_residual(alg: &Algebroid, conn: &Connection, hm: &HigherMetricValue) -> SparseArray {
    let r = alg.rank();
    let n = hm.n;
    let lower = hm.basis();
    let nl = lower.len();
    let mut out = SparseArray::new(&[r, r, r, nl]);
    for b in 0..r {
        for c in 0..r {
            let gbc = EForm::from_fn(n, hm.p - 1, |t| {
                let li = lower.iter().position(|x| x == t).expect("basis");
                hm.comps.get(&[b, c, li]).clone()
            });
            let dg = coordinate_d(&gbc);
            for a in 0..r {
                let field = alg.anchor_field(&crate::algebroid::frame_section(r, a));
                let lhs = coordinate_interior(&dg, &field);
                for (li, t) in lower.iter().enumerate() {
                    out.add_to(&[a, b, c, li], lhs.get(t));
                }
            }
        }
    }
    for (k, gm) in conn.coeff().iter() {
        let (d, a, b) = (k[0], k[1], k[2]);
        for c in 0..r {
            for li in 0..nl {
                let gdc = hm.comps.get(&[d, c, li]);
                if !gdc.is_zero() {
                    let t = gm * gdc;
                    out.add_to(&[a, b, c, li], &-&t);
                    out.add_to(&[a, c, b, li], &-t);
                }
            }
        }
    }
    out
}

/// The generic admissibility verdict next to the kind-specific compatibility
/// verdict. The report passes when the two verdicts coincide.
#[derive(Clone, Debug)]
pub struct SpecializedVerdict {
    pub admissible: CheckReport,
    pub compatible: CheckReport,
    pub report: CheckReport,
}

pub fn specialized_admissibility(kind: ExampleKind, alg: &Algebroid, conn: &Connection, extras: &Extras) -> Result<SpecializedVerdict> {
    let ok = matches!(
        (kind, extras),
        (ExampleKind::CourantStandard | ExampleKind::CourantHTwisted | ExampleKind::MetricAlgebroid, Extras::Courant(_))
            | (ExampleKind::HigherCourant, Extras::Higher(_))
            | (ExampleKind::ConformalCourant, Extras::Conformal(..))
    );
    if !ok {
        return Err(GeomError::InvalidParams(format!("no specialized verdict for {}", kind.name())));
    }
    let admissible = check_admissible(alg, conn);
    let mut compatible = CheckReport::new("compatibility");
    for (k, v) in compatibility_residual(alg, conn, extras).iter() {
        compatible.record(frame_at(k), v.clone());
    }
    if kind == ExampleKind::HigherCourant {
        compatible.assume("interior product taken along the anchor image of the direction section");
    }
    let mut report = CheckReport::new(format!("specialized_admissibility_{}", kind.name()));
    report.assume(format!("admissible={} compatible={}", admissible.pass, compatible.pass));
    if admissible.pass != compatible.pass {
        report.fail("generic and specialized verdicts disagree");
    }
    Ok(SpecializedVerdict { admissible, compatible, report })
}

/// All connections satisfying the kind-specific compatibility condition,
/// as an affine space over the connection coefficients.
pub fn compatible_connections(alg: &Algebroid, extras: &Extras, budget: &Budget) -> Result<AffineSolution> {
    let r = alg.rank();
    let zero = Connection::zero(r);
    let base = compatibility_residual(alg, &zero, extras);
    let mut eqs: std::collections::BTreeMap<Vec<usize>, Equation> = std::collections::BTreeMap::new();
    for idx in crate::array::all_indices(base.dims()) {
        let mut e = Equation::new();
        e.add_rhs(&-base.get(&idx));
        eqs.insert(idx, e);
    }
    for j in 0..r * r * r {
        let mut unit = SparseArray::new(&[r, r, r]);
        unit.set(&[j / (r * r), (j / r) % r, j % r], Scalar::one());
        let res = compatibility_residual(alg, &Connection::new(unit)?, extras).sub(&base);
        for (k, v) in res.iter() {
            eqs.get_mut(k).expect("same shape").add_term(j, v);
        }
    }
    Ok(leibniz_scalar::linsolve::solve(r * r * r, eqs.into_values(), budget)?)
}

/// The bracket condition of a conformal Courant algebroid on frame triples,
/// `ρ_a(g_bc) + θ_a g_bc − g([X_a, X_b], X_c) − g(X_b, [X_a, X_c])`.
/// Constructors do not enforce it.
pub fn conformal_bracket_compatibility(alg: &Algebroid, metric: &Metric, theta: &[Scalar]) -> Result<CheckReport> {
    let r = alg.rank();
    if metric.rank() != r || theta.len() != r {
        return Err(GeomError::Shape("metric and theta must match the rank".into()));
    }
    let (g, gamma) = (metric.g(), alg.gamma());
    let mut rep = CheckReport::new("conformal_bracket_compatibility");
    for idx in crate::array::all_indices(&[r, r, r]) {
        let (a, b, c) = (idx[0], idx[1], idx[2]);
        let mut v = &alg.rho(a, &g[b][c]) + &(&theta[a] * &g[b][c]);
        for d in 0..r {
            v = &v - &(gamma.get(&[d, a, b]) * &g[d][c]);
            v = &v - &(gamma.get(&[d, a, c]) * &g[b][d]);
        }
        rep.record(frame_at(&idx), v);
    }
    Ok(rep)
}
