//! The JSON certificate report. Rationals are `"p/q"` strings and balls are `{mid, rad}` strings.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::certificate::{BallJson, Status};
use crate::config::Config;
use crate::contraction::{delta_halving_probe, pc, DeltaProbe};
use crate::dag::{contraction_json, d2_published, d4_published, Evaluation, NodeResult};
use crate::exact_scalars::rational_string;
use crate::oracle::OracleReport;

fn node_json(r: &NodeResult) -> Value {
    let mut m = Map::new();
    m.insert("status".into(), serde_json::to_value(&r.status).unwrap());
    if let Some(b) = &r.blocked_by {
        m.insert("blocked_by".into(), json!(b));
    }
    if let Some(e) = &r.error {
        m.insert("error".into(), json!(e));
    }
    if r.precision_exhausted {
        m.insert("precision_exhausted".into(), json!(true));
    }
    if r.own.is_some() {
        m.insert("bits".into(), json!(r.bits));
    }
    if let Some(o) = &r.output {
        m.insert("checks".into(), json!(o.checks.iter().map(|c| c.to_json()).collect::<Vec<_>>()));
        let vals: Map<String, Value> =
            o.values.iter().map(|(k, v)| (k.clone(), serde_json::to_value(BallJson::from(v)).unwrap())).collect();
        m.insert("values".into(), Value::Object(vals));
        if !o.notes.is_empty() {
            m.insert("notes".into(), json!(o.notes));
        }
        if let Some(c) = &o.contraction {
            m.insert("contraction".into(), contraction_json(c));
        }
    }
    Value::Object(m)
}

fn group(ev: &Evaluation, prefix: &str) -> Value {
    let m: Map<String, Value> = ev
        .results
        .iter()
        .filter(|(id, _)| id.starts_with(prefix))
        .map(|(id, r)| (id.clone(), node_json(r)))
        .collect();
    Value::Object(m)
}

#[derive(Serialize)]
struct Summary<'a> {
    passed: bool,
    checks: usize,
    failed_checks: Vec<&'a str>,
    failed_nodes: Vec<&'a str>,
    unverified_nodes: Vec<&'a str>,
    disabled_nodes: Vec<&'a str>,
}

/// Half-`delta` probe on the published constants; informational only.
pub fn probe(cfg: &Config) -> Vec<DeltaProbe> {
    let p = cfg.prec;
    let (g2, g4) = (d2_published(p), d4_published(p));
    let (e2, e2p) = (pc("1.745e-7", p), pc("1.605e-7", p));
    let d3 = [pc("0.49", p), pc("1", p), pc("6.3", p), pc("12.3", p), pc("2.04e-6", p), pc("1.23e-5", p)];
    let (e4, e4p) = (pc("2.34e-5", p), pc("1.15e-4", p));
    delta_halving_probe((&g2, &e2, &e2p), (&d3[0], &d3[1], &d3[2], &d3[3], &d3[4], &d3[5]), (&g4, &e4, &e4p), p)
}

pub fn build(cfg: &Config, ev: &Evaluation, oracle: Option<&OracleReport>) -> Value {
    let ledger = ev.ledger();
    let failed = ledger.failed();
    let by = |s: Status| ev.results.values().filter(|r| r.status == s).map(|r| r.id.as_str()).collect::<Vec<_>>();
    let summary = Summary {
        passed: ev.passed(),
        checks: ledger.entries.len(),
        failed_checks: failed,
        failed_nodes: by(Status::Fail),
        unverified_nodes: by(Status::UnverifiedDependency),
        disabled_nodes: by(Status::Disabled),
    };
    let pole = match ev.results.get("pole") {
        Some(r) => match r.output.as_ref().and_then(|o| o.pole.as_ref()) {
            Some(p) => serde_json::to_value(p.to_json()).unwrap(),
            None => node_json(r),
        },
        None => Value::Null,
    };
    json!({
        "config": {
            "precision_bits": cfg.prec,
            "grid_n_d2": cfg.grid_n_d2,
            "grid_n_d3": cfg.grid_n_d3,
            "tail_s": rational_string(&cfg.tail_s),
            "gamma0": rational_string(&cfg.gamma0),
            "disabled": cfg.disabled.iter().collect::<Vec<_>>(),
            "parallel": crate::par::is_parallel(),
        },
        "D1": group(ev, "D1."),
        "D2": group(ev, "D2."),
        "D3": group(ev, "D3."),
        "D4": group(ev, "D4."),
        "jumps": ev.results.get("jumps").map(node_json).unwrap_or(Value::Null),
        "theorem": ev.results.get("theorem").map(node_json).unwrap_or(Value::Null),
        "pole": pole,
        "oracle": oracle.map(|o| serde_json::to_value(o).unwrap()).unwrap_or(Value::Null),
        "delta_probe": probe(cfg),
        "ledger": ledger.to_json(),
        "summary": summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::assemble_theorem;
    use std::collections::BTreeSet;

    #[test]
    fn deterministic_and_each_inequality_once() {
        let cfg = Config::default();
        let (ev, ledger) = assemble_theorem(&cfg);
        let a = serde_json::to_string_pretty(&build(&cfg, &ev, None)).unwrap();
        let (ev2, _) = assemble_theorem(&cfg);
        let b = serde_json::to_string_pretty(&build(&cfg, &ev2, None)).unwrap();
        assert_eq!(a, b);
        let mut names = BTreeSet::new();
        for e in ledger.entries.values() {
            assert!(names.insert(e.check.name.clone()), "duplicate {}", e.check.name);
        }
        let v: Value = serde_json::from_str(&a).unwrap();
        for k in ["D1", "D2", "D3", "D4", "pole", "theorem", "oracle"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        for e in v["ledger"].as_array().unwrap() {
            let pv = e["paper_value"].as_str().unwrap();
            assert!(crate::exact_scalars::parse_rational(pv).is_ok() && !pv.contains('e'), "{pv}");
        }
    }
}
