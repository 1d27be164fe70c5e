use std::fs;
use std::path::Path;

use leibniz_core::catalog::{make_example, ExampleKind, ExampleParams};
use leibniz_core::checks::{run_suite, CheckConfig, Suite};
use leibniz_core::connection::{check_admissible, curvature, non_metricity, torsion, BracketKind, Connection};
use leibniz_core::document::{sparse_json, Document};
use leibniz_core::frame::{change_frame, FrameChange};
use leibniz_core::levicivita::{decompose_connection, solve_koszul, solve_torsion_free, SolutionSpace, SolutionStatus};
use leibniz_core::{EForm, GeomError, SparseArray};
use leibniz_scalar::{parse_scalar, Budget, Matrix, Scalar};
use serde_json::{json, Map, Value};

use crate::{CheckArgs, Common, ComputeArgs, ExampleArgs, FrameArgs, SolveArg, SuiteArg, Target};

pub const PASS: u8 = 0;
pub const IDENTITY_FAILED: u8 = 1;
pub const INPUT_ERROR: u8 = 2;
pub const INFEASIBLE: u8 = 3;
pub const BUDGET_EXCEEDED: u8 = 4;

/// Lines to emit and the process exit code.
pub struct Outcome {
    pub lines: Vec<Value>,
    pub code: u8,
}

/// A run that produced no output stream.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: INPUT_ERROR, message: message.into() }
    }
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        let code = if e.is_budget() { BUDGET_EXCEEDED } else { INPUT_ERROR };
        Failure { code, message: e.to_string() }
    }
}

type Run = Result<Outcome, Failure>;

fn budget(common: &Common) -> Budget {
    common.budget.map_or_else(Budget::default, |max_terms| Budget { max_terms })
}

fn check_config(common: &Common) -> CheckConfig {
    CheckConfig { seed: common.seed, samples: common.samples, degree: common.degree, budget: budget(common) }
}

fn load(path: &Path, budget: &Budget) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(Document::parse(&text, budget)?)
}

fn config_json(command: &str, common: &Common, extra: &[(&str, Value)]) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(common.seed));
    m.insert("samples".into(), json!(common.samples));
    m.insert("degree".into(), json!(common.degree));
    m.insert("budget".into(), json!(budget(common).max_terms));
    for (k, v) in extra {
        m.insert((*k).into(), v.clone());
    }
    Value::Object(m)
}

fn with_config(mut line: Value, config: &Value) -> Value {
    if let Value::Object(m) = &mut line {
        m.insert("config".into(), config.clone());
    }
    line
}

fn suite_of(arg: SuiteArg) -> Suite {
    match arg {
        SuiteArg::All => Suite::All,
        SuiteArg::Classify => Suite::Classify,
        SuiteArg::Admissible => Suite::Admissible,
        SuiteArg::Cartan => Suite::Cartan,
        SuiteArg::Bianchi => Suite::Bianchi,
        SuiteArg::Ricci => Suite::Ricci,
        SuiteArg::Magic => Suite::Magic,
        SuiteArg::Levicivita => Suite::LeviCivita,
    }
}

fn status_json(status: &SolutionStatus) -> (&'static str, usize) {
    match status {
        SolutionStatus::Unique => ("unique", 0),
        SolutionStatus::Affine(d) => ("affine", *d),
        SolutionStatus::Infeasible => ("infeasible", 0),
    }
}

fn solution_json(space: &SolutionSpace, coords: &[String]) -> Value {
    let (status, dim) = status_json(&space.status);
    json!({
        "status": status,
        "dimension": dim,
        "particular": space.particular.as_ref().map(|c| sparse_json(c.coeff(), coords)),
        "kernel": space.kernel_basis.iter().map(|k| sparse_json(k, coords)).collect::<Vec<_>>(),
        "certificate": space.certificate.as_ref().map(|c| c.to_expr(coords)),
        "denominators": space.denominator_loci().iter().map(|d| d.to_expr(coords)).collect::<Vec<_>>(),
    })
}

/// The document connection, else the particular Koszul solution of the
/// metric when there is one.
fn connection_for(doc: &Document, budget: &Budget) -> Result<(Option<Connection>, &'static str), Failure> {
    if let Some(c) = &doc.connection {
        return Ok((Some(c.clone()), "document"));
    }
    if let Some(m) = &doc.metric {
        let space = solve_koszul(&doc.algebroid, m, budget)?;
        if let Some(c) = space.particular {
            return Ok((Some(c), "koszul"));
        }
    }
    Ok((None, "none"))
}

pub fn check(args: &CheckArgs) -> Run {
    let cfg = check_config(&args.common);
    let doc = load(&args.input, &cfg.budget)?;
    let alg = &doc.algebroid;
    let coords = alg.coords();
    let (conn, source) = connection_for(&doc, &cfg.budget)?;
    let suite = suite_of(args.suite);
    let config = config_json(
        "check",
        &args.common,
        &[("suite", json!(suite.name())), ("connection", json!(source))],
    );

    let mut reports = Vec::new();
    if let (Some(c), false) = (&conn, matches!(suite, Suite::All | Suite::Admissible)) {
        reports.push(check_admissible(alg, c));
    }
    reports.extend(run_suite(alg, conn.as_ref(), doc.metric.as_ref(), suite, &cfg)?);
    let mut code = if reports.iter().all(|r| r.pass) { PASS } else { IDENTITY_FAILED };
    let mut lines: Vec<Value> = reports.iter().map(|r| with_config(r.to_json(coords), &config)).collect();

    if let Some(which) = args.solve {
        let (name, space) = match which {
            SolveArg::TorsionFree => ("torsion-free", solve_torsion_free(alg, &cfg.budget)?),
            SolveArg::Koszul => {
                let metric = doc.metric.as_ref().ok_or_else(|| Failure::input("metric block required"))?;
                ("koszul", solve_koszul(alg, metric, &cfg.budget)?)
            }
        };
        let mut line = solution_json(&space, coords);
        line["solve"] = json!(name);
        lines.push(with_config(line, &config));
        if space.is_infeasible() {
            code = INFEASIBLE;
        }
    }
    Ok(Outcome { lines, code })
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Torsion => "torsion",
        Target::ProjectedTorsion => "projected-torsion",
        Target::Curvature => "curvature",
        Target::Nonmetricity => "nonmetricity",
        Target::Levicivita => "levicivita",
        Target::Decomposition => "decomposition",
    }
}

pub fn compute(args: &ComputeArgs) -> Run {
    let budget = budget(&args.common);
    let doc = load(&args.input, &budget)?;
    let alg = &doc.algebroid;
    let coords = alg.coords();
    let metric = || doc.metric.as_ref().ok_or_else(|| Failure::input("metric block required"));

    if args.target == Target::Levicivita {
        let space = solve_koszul(alg, metric()?, &budget)?;
        let config = config_json("compute", &args.common, &[("target", json!("levicivita"))]);
        let mut line = solution_json(&space, coords);
        line["target"] = json!("levicivita");
        let code = if space.is_infeasible() { INFEASIBLE } else { PASS };
        return Ok(Outcome { lines: vec![with_config(line, &config)], code });
    }

    let (conn, source) = connection_for(&doc, &budget)?;
    let conn = conn.ok_or_else(|| Failure::input("connection block required"))?;
    let name = target_name(args.target);
    let config = config_json("compute", &args.common, &[("target", json!(name)), ("connection", json!(source))]);
    let components = |t: &SparseArray| json!({ "target": name, "components": sparse_json(t, coords) });
    let (line, code) = match args.target {
        Target::Torsion => (components(&torsion(alg, &conn, BracketKind::Modified)?), PASS),
        Target::ProjectedTorsion => (components(&torsion(alg, &conn, BracketKind::Projected)?), PASS),
        Target::Curvature => (components(&curvature(alg, &conn)?), PASS),
        Target::Nonmetricity => (components(&non_metricity(alg, &conn, metric()?)), PASS),
        Target::Decomposition => {
            let d = decompose_connection(alg, &conn, metric()?, &budget)?;
            let line = json!({
                "target": name,
                "levicivita": sparse_json(d.lc_part.coeff(), coords),
                "contortion": sparse_json(&d.torsion_part, coords),
                "disformation": sparse_json(&d.nonmetricity_part, coords),
                "report": d.report.to_json(coords),
            });
            (line, if d.report.pass { PASS } else { IDENTITY_FAILED })
        }
        Target::Levicivita => unreachable!("handled above"),
    };
    Ok(Outcome { lines: vec![with_config(line, &config)], code })
}

fn parse_matrix(text: &str, coords: &[String], what: &str) -> Result<Matrix, Failure> {
    let rows: Vec<Vec<Value>> =
        serde_json::from_str(text).map_err(|e| Failure::input(format!("{what}: {e}")))?;
    rows.iter()
        .map(|row| row.iter().map(|v| parse_value(v, coords, what)).collect())
        .collect()
}

fn parse_value(v: &Value, coords: &[String], what: &str) -> Result<Scalar, Failure> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(Failure::input(format!("{what}: expected expression, found {other}"))),
    };
    parse_scalar(&text, coords).map_err(|e| Failure::input(format!("{what}: {e}")))
}

fn coordinate_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn example_params(args: &ExampleArgs, kind: ExampleKind, budget: &Budget) -> Result<ExampleParams, Failure> {
    let n = args.n;
    let source = || -> Result<Document, Failure> {
        let path = args.from.as_ref().ok_or_else(|| Failure::input("--from document required"))?;
        let doc = load(path, budget)?;
        if doc.metric.is_none() {
            return Err(Failure::input("--from document needs a metric block"));
        }
        Ok(doc)
    };
    Ok(match kind {
        ExampleKind::TangentLie => ExampleParams::TangentLie { n },
        ExampleKind::CourantStandard => ExampleParams::CourantStandard { n },
        ExampleKind::HigherCourant => ExampleParams::HigherCourant { n, p: args.p },
        ExampleKind::TwistedFrameLie => {
            let text = args.frame.as_deref().ok_or_else(|| Failure::input("--frame required"))?;
            ExampleParams::TwistedFrameLie { n, frame: parse_matrix(text, &coordinate_names(n), "frame")? }
        }
        ExampleKind::CourantHTwisted => {
            let text = args.h.as_deref().ok_or_else(|| Failure::input("--h required"))?;
            if n < 3 {
                return Err(Failure::input("a 3-form needs n >= 3"));
            }
            let c = parse_scalar(text, &coordinate_names(n)).map_err(|e| Failure::input(format!("h: {e}")))?;
            let mut h = EForm::zero(n, 3);
            h.set(&[0, 1, 2], c);
            ExampleParams::CourantHTwisted { n, h }
        }
        ExampleKind::MetricAlgebroid => {
            let doc = source()?;
            let alg = doc.algebroid;
            ExampleParams::MetricAlgebroid {
                coords: alg.coords().to_vec(),
                anchor: alg.anchor().clone(),
                gamma_antisym: alg.gamma().clone(),
                g: doc.metric.expect("checked").g().clone(),
            }
        }
        ExampleKind::ConformalCourant => {
            let doc = source()?;
            let alg = doc.algebroid;
            let coords = alg.coords().to_vec();
            let text = args.theta.as_deref().ok_or_else(|| Failure::input("--theta required"))?;
            let raw: Vec<Value> = serde_json::from_str(text).map_err(|e| Failure::input(format!("theta: {e}")))?;
            let theta = raw.iter().map(|v| parse_value(v, &coords, "theta")).collect::<Result<_, _>>()?;
            ExampleParams::ConformalCourant {
                anchor: alg.anchor().clone(),
                gamma_antisym: alg.gamma().clone(),
                g: doc.metric.expect("checked").g().clone(),
                theta,
                coords,
            }
        }
    })
}

pub fn example(args: &ExampleArgs) -> Run {
    let budget = budget(&args.common);
    let kind = ExampleKind::from_name(&args.kind).ok_or_else(|| {
        let names: Vec<&str> = ExampleKind::ALL.iter().map(|k| k.name()).collect();
        Failure::input(format!("unknown example `{}`; expected one of {}", args.kind, names.join(", ")))
    })?;
    let ex = make_example(&example_params(args, kind, &budget)?, &budget)?;
    let mut doc = Document::new(ex.algebroid);
    doc.metric = ex.metric;
    Ok(Outcome { lines: vec![doc.to_json()], code: PASS })
}

pub fn frame_change(args: &FrameArgs) -> Run {
    let budget = budget(&args.common);
    let doc = load(&args.input, &budget)?;
    let a = parse_matrix(&args.frame, doc.algebroid.coords(), "frame")?;
    let fc = FrameChange::new(a, &budget)?;
    let changed = change_frame(&doc.algebroid, &fc, doc.connection.as_ref(), doc.metric.as_ref(), &budget)?;
    let out = Document { algebroid: changed.algebroid, metric: changed.metric, connection: changed.connection };
    Ok(Outcome { lines: vec![out.to_json()], code: PASS })
}
