//! JSON reports and their replay.
//!
//! A report carries the verdict, the search statistics and, when there is
//! one, the witness or counterexample as a list of steps. Every field is a
//! deterministic function of the input and the options except
//! `statistics.elapsed_ms`.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::delta::Label;
use crate::dsl::{Model, TextReader};
use crate::error::{Error, Result};
use crate::term::{sym, Configuration, Substitution, TimestampedFact};
use crate::validate::{validate_counterexample, validate_lasso, validate_trace, TraceCheck};
use crate::verify::{Lasso, Mode, Outcome, Step, Trace, Verdict, Witness};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn config_json(c: &Configuration) -> Value {
    Value::Array(
        c.facts()
            .iter()
            .map(|f| json!({"fact": f.fact.text(), "ts": f.ts}))
            .collect(),
    )
}

fn subst_json(s: &Substitution) -> Value {
    let mut m = Map::new();
    for (v, t) in &s.time {
        m.insert(v.to_string(), json!(t));
    }
    for (v, t) in &s.terms {
        m.insert(v.to_string(), json!(t.to_string()));
    }
    Value::Object(m)
}

fn trace_json(t: &Trace) -> Value {
    Value::Array(
        t.steps
            .iter()
            .map(|s| {
                let index = match &s.label {
                    Label::Tick => Value::Null,
                    Label::Rule { index, .. } => json!(index),
                };
                json!({
                    "label": s.label.name(),
                    "rule_index": index,
                    "subst": subst_json(&s.subst),
                    "config": config_json(&s.config),
                })
            })
            .collect(),
    )
}

/// The report for `v`, `spec_text` being the exact input it was run on.
pub fn to_json(v: &Verdict, spec_text: &str) -> Value {
    let st = &v.stats;
    let mut out = json!({
        "tool_version": TOOL_VERSION,
        "input_digest": digest(spec_text),
        "mode": v.mode.as_str(),
        "ticks": v.ticks,
        "outcome": v.outcome.as_str(),
        "statistics": {
            "states": st.states,
            "peak_frontier": st.peak_frontier,
            "elapsed_ms": st.elapsed_ms as u64,
            "l_sigma_decimal": st.l_sigma.to_string(),
            "dmax": st.dmax,
            "facts": st.facts,
            "max_depth": st.max_depth,
            "max_instantaneous_run": st.max_instantaneous_run,
            "instant_run_violations": st.instant_run_violations,
            "depth_violations": st.depth_violations,
        },
        "critical": v.critical.as_ref().map(|h| json!({"index": h.index, "name": &*h.name})),
        "lasso": Value::Null,
        "initial": Value::Null,
        "trace": Value::Null,
    });
    let trace = match (&v.counterexample, &v.witness) {
        (Some(t), _) => Some(t.clone()),
        (None, Some(Witness::Trace(t))) => Some(t.clone()),
        (None, Some(Witness::Lasso(l))) => {
            out["lasso"] = json!({
                "dmax": l.dmax,
                "stem_length": l.stem.len(),
                "cycle_length": l.cycle.len(),
            });
            Some(l.full())
        }
        (None, None) => None,
    };
    if let Some(t) = trace {
        out["initial"] = config_json(&t.initial);
        out["trace"] = trace_json(&t);
    }
    out
}

pub fn render(v: &Verdict, spec_text: &str) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(v, spec_text)).expect("json values serialize");
    s.push('\n');
    s
}

/// Report contents needed for replay.
#[derive(Debug, Clone)]
pub struct ParsedReport {
    pub mode: Mode,
    pub ticks: Option<u64>,
    pub outcome: Outcome,
    pub input_digest: String,
    pub critical_index: Option<usize>,
    pub trace: Option<Trace>,
    /// `(stem length, dmax)` for lasso witnesses.
    pub lasso: Option<(usize, u64)>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Report(msg.into())
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field `{key}`")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| bad(format!("`{what}` must be a non-negative integer")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(format!("`{what}` must be a string")))
}

fn read_config(reader: &mut TextReader, v: &Value) -> Result<Configuration> {
    let arr = v.as_array().ok_or_else(|| bad("configuration must be an array"))?;
    let mut facts = Vec::with_capacity(arr.len());
    for f in arr {
        let fact = reader.fact(as_str(get(f, "fact")?, "fact")?)?;
        facts.push(TimestampedFact::new(fact, as_u64(get(f, "ts")?, "ts")?));
    }
    Configuration::new(facts)
}

fn read_subst(reader: &mut TextReader, v: &Value) -> Result<Substitution> {
    let obj = v.as_object().ok_or_else(|| bad("substitution must be an object"))?;
    let mut s = Substitution::new();
    for (k, val) in obj {
        match val {
            Value::Number(_) => {
                s.time.insert(sym(k), as_u64(val, k)?);
            }
            Value::String(t) => {
                s.terms.insert(sym(k), reader.term(t)?);
            }
            _ => return Err(bad(format!("binding of `{k}` must be a number or a string"))),
        }
    }
    Ok(s)
}

pub fn parse_report(model: &Model, text: &str) -> Result<ParsedReport> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let mode = match as_str(get(&v, "mode")?, "mode")? {
        "realizability" => Mode::Realizability,
        "survivability" => Mode::Survivability,
        other => return Err(bad(format!("unknown mode `{other}`"))),
    };
    let outcome = match as_str(get(&v, "outcome")?, "outcome")? {
        "holds" => Outcome::Holds,
        "fails" => Outcome::Fails,
        "unknown" => Outcome::Unknown,
        other => return Err(bad(format!("unknown outcome `{other}`"))),
    };
    let ticks = match get(&v, "ticks")? {
        Value::Null => None,
        t => Some(as_u64(t, "ticks")?),
    };
    let critical_index = match v.get("critical") {
        None | Some(Value::Null) => None,
        Some(c) => Some(as_u64(get(c, "index")?, "critical.index")? as usize),
    };
    let lasso = match v.get("lasso") {
        None | Some(Value::Null) => None,
        Some(l) => Some((
            as_u64(get(l, "stem_length")?, "stem_length")? as usize,
            as_u64(get(l, "dmax")?, "dmax")?,
        )),
    };
    let mut reader = TextReader::new(&model.system.signature);
    let trace = match v.get("trace") {
        None | Some(Value::Null) => None,
        Some(steps) => {
            let initial = read_config(&mut reader, get(&v, "initial")?)?;
            let arr = steps.as_array().ok_or_else(|| bad("`trace` must be an array"))?;
            let mut out = Vec::with_capacity(arr.len());
            for s in arr {
                let name = as_str(get(s, "label")?, "label")?;
                let subst = read_subst(&mut reader, get(s, "subst")?)?;
                let label = match get(s, "rule_index")? {
                    Value::Null if name == "tick" => Label::Tick,
                    Value::Null => return Err(bad(format!("step `{name}` lacks a rule index"))),
                    i => Label::Rule {
                        index: as_u64(i, "rule_index")? as usize,
                        name: sym(name),
                        subst: subst.term_part(),
                    },
                };
                out.push(Step {
                    label,
                    subst,
                    config: read_config(&mut reader, get(s, "config")?)?,
                });
            }
            Some(Trace { initial, steps: out })
        }
    };
    Ok(ParsedReport {
        mode,
        ticks,
        outcome,
        input_digest: as_str(get(&v, "input_digest")?, "input_digest")?.to_string(),
        critical_index,
        trace,
        lasso,
    })
}

/// Check the trace stored in a report against `model`.
pub fn replay(model: &Model, report: &ParsedReport) -> Result<TraceCheck> {
    let sys = &model.system;
    let cs = &model.critical;
    let Some(trace) = &report.trace else {
        return Err(bad("report holds no trace"));
    };
    if trace.initial != model.init {
        return Ok(TraceCheck {
            ok: false,
            failing_step: Some(0),
            message: "initial configuration differs from the spec".into(),
        });
    }
    Ok(match (report.outcome, report.lasso) {
        (Outcome::Fails, _) => validate_counterexample(sys, cs, trace, report.critical_index),
        (_, Some((stem_len, dmax))) => {
            if stem_len > trace.len() {
                return Err(bad("stem longer than the trace"));
            }
            let stem = Trace {
                initial: trace.initial.clone(),
                steps: trace.steps[..stem_len].to_vec(),
            };
            let cycle = Trace {
                initial: stem.last().clone(),
                steps: trace.steps[stem_len..].to_vec(),
            };
            validate_lasso(sys, cs, &Lasso { stem, cycle, dmax })
        }
        _ => validate_trace(sys, cs, trace, report.ticks.map(|n| n as usize)),
    })
}
