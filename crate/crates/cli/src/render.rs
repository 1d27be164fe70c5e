use std::fmt::Write;

use serde_json::Value;

pub fn jsonl(lines: &[Value]) -> String {
    lines.iter().map(|v| format!("{v}\n")).collect()
}

fn text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn entries(out: &mut String, indent: &str, arr: &Value) {
    for e in arr.as_array().into_iter().flatten() {
        let idx: Vec<String> = e["idx"].as_array().into_iter().flatten().map(text).collect();
        let _ = writeln!(out, "{indent}{:<12} {}", idx.join(" "), text(&e["val"]));
    }
}

fn report(out: &mut String, v: &Value) {
    let verdict = if v["pass"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
    let residuals = v["residuals"].as_array().map_or(0, Vec::len);
    let _ = writeln!(out, "{verdict}  {:<44} residuals={residuals}", text(&v["identity"]));
    for r in v["residuals"].as_array().into_iter().flatten() {
        let at: Vec<String> = r["at"].as_array().into_iter().flatten().map(text).collect();
        let _ = writeln!(out, "      at {}: {}", at.join(","), text(&r["value"]));
    }
    for a in v["assumptions"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "      # {}", text(a));
    }
}

fn solution(out: &mut String, label: &str, v: &Value) {
    let _ = writeln!(out, "{label}: {} (dimension {})", text(&v["status"]), v["dimension"]);
    if let Some(c) = v["certificate"].as_str() {
        let _ = writeln!(out, "  certificate: {c}");
    }
    if !v["particular"].is_null() {
        let _ = writeln!(out, "  particular:");
        entries(out, "    ", &v["particular"]);
    }
    for (k, gen) in v["kernel"].as_array().into_iter().flatten().enumerate() {
        let _ = writeln!(out, "  kernel {}:", k + 1);
        entries(out, "    ", gen);
    }
}

/// Human-readable rendering of the same lines the JSON format emits.
pub fn table(lines: &[Value]) -> String {
    let mut out = String::new();
    for v in lines {
        if v.get("identity").is_some() {
            report(&mut out, v);
        } else if let Some(name) = v.get("solve") {
            solution(&mut out, &format!("solve {}", text(name)), v);
        } else if v.get("status").is_some() {
            solution(&mut out, &text(&v["target"]), v);
        } else if let Some(comps) = v.get("components") {
            let _ = writeln!(out, "{}:", text(&v["target"]));
            entries(&mut out, "  ", comps);
        } else if v.get("report").is_some() {
            for part in ["levicivita", "contortion", "disformation"] {
                let _ = writeln!(out, "{part}:");
                entries(&mut out, "  ", &v[part]);
            }
            report(&mut out, &v["report"]);
        } else {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
        }
    }
    out
}
