//! JSON serialization of machines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::gmmt::{GUpdate, Gmmt, GmmtBuilder, Source};
use crate::mmt::{Action, Mmt, MmtBuilder, Update};

/// An MMT or a generalized MMT.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Mmt(Mmt),
    Gmmt(Gmmt),
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    id: String,
    #[serde(default)]
    active: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ActionJson {
    Input(String),
    Timeout(String),
}

impl ActionJson {
    fn text(&self) -> String {
        match self {
            ActionJson::Input(i) => i.clone(),
            ActionJson::Timeout(x) => format!("to[{x}]"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct UpdateJson {
    timer: String,
    value: u32,
}

#[derive(Serialize, Deserialize)]
struct TransitionJson {
    from: String,
    action: ActionJson,
    to: String,
    output: String,
    #[serde(default)]
    update: Option<UpdateJson>,
}

#[derive(Serialize, Deserialize, Default)]
struct GUpdateJson {
    #[serde(default)]
    renames: BTreeMap<String, String>,
    #[serde(default)]
    start: Option<UpdateJson>,
}

#[derive(Serialize, Deserialize)]
struct GTransitionJson {
    from: String,
    action: ActionJson,
    to: String,
    output: String,
    #[serde(default)]
    update: Option<GUpdateJson>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    timers: Vec<String>,
    inputs: Vec<String>,
    #[serde(default)]
    outputs: Vec<String>,
    states: Vec<StateJson>,
    #[serde(default)]
    initial: Option<String>,
    transitions: Vec<T>,
}

fn json_err(e: serde_json::Error) -> ModelError {
    ModelError::Parse(e.to_string())
}

fn state_refs(states: &[StateJson]) -> Vec<(&str, Vec<&str>)> {
    states
        .iter()
        .map(|s| (s.id.as_str(), s.active.iter().map(String::as_str).collect()))
        .collect()
}

/// Parses a machine. Documents with `"kind": "gmmt"` are generalized MMTs.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(json_err)?;
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("mmt");
    match kind {
        "mmt" => parse_mmt_value(value).map(Model::Mmt),
        "gmmt" => parse_gmmt_value(value).map(Model::Gmmt),
        other => Err(ModelError::Parse(format!("unknown model kind `{other}`"))),
    }
}

/// Parses an MMT.
pub fn parse_mmt(text: &str) -> Result<Mmt, ModelError> {
    match parse_model(text)? {
        Model::Mmt(m) => Ok(m),
        Model::Gmmt(_) => Err(ModelError::Parse("expected an MMT, found a gMMT".into())),
    }
}

fn parse_mmt_value(value: serde_json::Value) -> Result<Mmt, ModelError> {
    let doc: ModelJson<TransitionJson> = serde_json::from_value(value).map_err(json_err)?;
    let mut b = MmtBuilder::new();
    for x in &doc.timers {
        b.add_timer(x);
    }
    for i in &doc.inputs {
        b.add_input(i);
    }
    for o in &doc.outputs {
        b.add_output(o);
    }
    for (id, active) in state_refs(&doc.states) {
        b.add_state(id, &active);
    }
    if let Some(init) = &doc.initial {
        b = b.initial(init);
    }
    for t in &doc.transitions {
        b.add_edge(
            &t.from,
            &t.action.text(),
            &t.to,
            &t.output,
            t.update.as_ref().map(|u| (u.timer.as_str(), u.value)),
        );
    }
    b.build()
}

fn parse_gmmt_value(value: serde_json::Value) -> Result<Gmmt, ModelError> {
    let doc: ModelJson<GTransitionJson> = serde_json::from_value(value).map_err(json_err)?;
    let mut b = GmmtBuilder::new();
    for x in &doc.timers {
        b.add_timer(x);
    }
    for i in &doc.inputs {
        b.add_input(i);
    }
    for o in &doc.outputs {
        b.add_output(o);
    }
    for (id, active) in state_refs(&doc.states) {
        b.add_state(id, &active);
    }
    if let Some(init) = &doc.initial {
        b = b.initial(init);
    }
    for t in &doc.transitions {
        let mut assign: Vec<(String, String)> = Vec::new();
        if let Some(u) = &t.update {
            assign.extend(u.renames.iter().map(|(d, s)| (d.clone(), s.clone())));
            if let Some(st) = &u.start {
                assign.push((st.timer.clone(), st.value.to_string()));
            }
        }
        let refs: Vec<(&str, &str)> = assign
            .iter()
            .map(|(d, s)| (d.as_str(), s.as_str()))
            .collect();
        b.add_edge(&t.from, &t.action.text(), &t.to, &t.output, &refs);
    }
    b.build()
}

fn action_json(name: String, a: Action) -> ActionJson {
    match a {
        Action::Input(_) => ActionJson::Input(name),
        Action::Timeout(_) => ActionJson::Timeout(name),
    }
}

/// Serializes an MMT as pretty-printed JSON.
pub fn mmt_to_json(m: &Mmt) -> String {
    let mut transitions = Vec::new();
    for q in m.states() {
        for (a, t) in m.transitions(q) {
            let name = match a {
                Action::Input(i) => m.input_name(i).to_string(),
                Action::Timeout(x) => m.timer_name(x).to_string(),
            };
            transitions.push(TransitionJson {
                from: m.state_name(q).to_string(),
                action: action_json(name, a),
                to: m.state_name(t.target).to_string(),
                output: m.output_name(t.output).to_string(),
                update: match t.update {
                    Update::Bot => None,
                    Update::Start(x, c) => Some(UpdateJson {
                        timer: m.timer_name(x).to_string(),
                        value: c,
                    }),
                },
            });
        }
    }
    let doc = ModelJson {
        kind: None,
        timers: m.timer_names().to_vec(),
        inputs: m.input_names().to_vec(),
        outputs: m.output_names().to_vec(),
        states: m
            .states()
            .map(|q| StateJson {
                id: m.state_name(q).to_string(),
                active: m
                    .active(q)
                    .iter()
                    .map(|x| m.timer_name(*x).to_string())
                    .collect(),
            })
            .collect(),
        initial: Some(m.state_name(m.initial()).to_string()),
        transitions,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

fn gupdate_json(g: &Gmmt, u: &GUpdate) -> GUpdateJson {
    let mut out = GUpdateJson::default();
    for (d, s) in &u.0 {
        let d = g.timer_name(*d).to_string();
        match s {
            Source::Timer(x) => {
                out.renames.insert(d, g.timer_name(*x).to_string());
            }
            Source::Const(c) => {
                out.start = Some(UpdateJson {
                    timer: d,
                    value: *c,
                })
            }
        }
    }
    out
}

/// Serializes a generalized MMT as pretty-printed JSON.
pub fn gmmt_to_json(g: &Gmmt) -> String {
    let mut transitions = Vec::new();
    for q in g.states() {
        for (a, t) in g.transitions(q) {
            let name = match a {
                Action::Input(i) => g.input_names()[i.index()].clone(),
                Action::Timeout(x) => g.timer_name(x).to_string(),
            };
            transitions.push(GTransitionJson {
                from: g.state_name(q).to_string(),
                action: action_json(name, a),
                to: g.state_name(t.target).to_string(),
                output: g.output_name(t.output).to_string(),
                update: Some(gupdate_json(g, &t.update)),
            });
        }
    }
    let doc = ModelJson {
        kind: Some("gmmt".into()),
        timers: g.timer_names().to_vec(),
        inputs: g.input_names().to_vec(),
        outputs: g.output_names().to_vec(),
        states: g
            .states()
            .map(|q| StateJson {
                id: g.state_name(q).to_string(),
                active: g
                    .active(q)
                    .iter()
                    .map(|x| g.timer_name(*x).to_string())
                    .collect(),
            })
            .collect(),
        initial: Some(g.state_name(g.initial()).to_string()),
        transitions,
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Serializes either kind of machine.
pub fn model_to_json(m: &Model) -> String {
    match m {
        Model::Mmt(m) => mmt_to_json(m),
        Model::Gmmt(g) => gmmt_to_json(g),
    }
}
