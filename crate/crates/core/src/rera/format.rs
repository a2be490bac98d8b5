//! Automaton files (TOML) and Graphviz rendering.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{Rera, Transition};
use crate::timed::{Alphabet, ClockError, Guard, Rel};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error("{0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Clock(#[from] ClockError),
}

fn field(field: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    clock: String,
    rel: String,
    #[serde(rename = "const")]
    constant: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawReset {
    Flag(bool),
    Clocks(Vec<String>),
}

impl Default for RawReset {
    fn default() -> Self {
        RawReset::Flag(false)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    source: String,
    action: String,
    #[serde(default)]
    guard: Vec<RawAtom>,
    #[serde(default)]
    reset: RawReset,
    target: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRera {
    alphabet: Vec<String>,
    locations: Vec<String>,
    initial: String,
    #[serde(default)]
    accepting: Vec<String>,
    max_constant: u32,
    #[serde(default)]
    transitions: Vec<RawTransition>,
}

/// Parses an automaton file. Structural checks (determinism, resets) are
/// left to [`Rera::validate`].
pub fn parse(text: &str) -> Result<Rera, FormatError> {
    let raw: RawRera = toml::from_str(text)?;
    let alphabet = Alphabet::new(raw.alphabet.iter().cloned())?;
    let loc = |name: &str, what: &str| {
        raw.locations
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| field(what, format!("unknown location `{name}`")))
    };
    let initial = loc(&raw.initial, "initial")?;
    let accepting = raw
        .accepting
        .iter()
        .map(|a| loc(a, "accepting"))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let mut transitions = Vec::new();
    for (i, t) in raw.transitions.iter().enumerate() {
        let ctx = |f: &str| format!("transitions[{i}].{f}");
        let source = loc(&t.source, &ctx("source"))?;
        let target = loc(&t.target, &ctx("target"))?;
        let action = alphabet
            .action(&t.action)
            .map_err(|e| field(ctx("action"), e.to_string()))?;
        let mut atoms = Vec::new();
        for atom in &t.guard {
            let clock = alphabet
                .clock(&atom.clock)
                .map_err(|e| field(ctx("guard"), e.to_string()))?;
            let rel = Rel::parse(&atom.rel)
                .ok_or_else(|| field(ctx("guard"), format!("unknown relation `{}`", atom.rel)))?;
            atoms.push((clock, rel, atom.constant));
        }
        let guard = Guard::from_atoms(alphabet.len(), atoms).map_err(|e| field(ctx("guard"), e.to_string()))?;
        let resets = match &t.reset {
            RawReset::Flag(true) => vec![action.clock()],
            RawReset::Flag(false) => Vec::new(),
            RawReset::Clocks(names) => {
                let mut cs = names
                    .iter()
                    .map(|n| alphabet.clock(n).map_err(|e| field(ctx("reset"), e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                cs.sort_unstable();
                cs.dedup();
                cs
            }
        };
        transitions.push(Transition {
            source,
            action,
            guard,
            resets,
            target,
        });
    }
    Ok(Rera {
        alphabet,
        locations: raw.locations,
        initial,
        accepting,
        transitions,
        max_constant: raw.max_constant,
    })
}

pub fn serialize(a: &Rera) -> Result<String, FormatError> {
    let transitions = a
        .transitions
        .iter()
        .map(|t| RawTransition {
            source: a.locations[t.source].clone(),
            action: a.alphabet.name(t.action).to_string(),
            guard: t
                .guard
                .atoms()
                .into_iter()
                .map(|(c, rel, k)| RawAtom {
                    clock: a.alphabet.clock_name(c),
                    rel: rel.symbol().to_string(),
                    constant: k,
                })
                .collect(),
            reset: if t.resets.is_empty() {
                RawReset::Flag(false)
            } else if t.resets == [t.action.clock()] {
                RawReset::Flag(true)
            } else {
                RawReset::Clocks(t.resets.iter().map(|&c| a.alphabet.clock_name(c)).collect())
            },
            target: a.locations[t.target].clone(),
        })
        .collect();
    let raw = RawRera {
        alphabet: a.alphabet.symbols().to_vec(),
        locations: a.locations.clone(),
        initial: a.locations[a.initial].clone(),
        accepting: a.accepting.iter().map(|&l| a.locations[l].clone()).collect(),
        max_constant: a.max_constant,
        transitions,
    };
    Ok(toml::to_string(&raw)?)
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Edge label `a, guard, {x_a}`.
pub fn edge_label(a: &Rera, t: &Transition) -> String {
    let resets: Vec<String> = t.resets.iter().map(|&c| a.alphabet.clock_name(c)).collect();
    format!(
        "{}, {}, {{{}}}",
        a.alphabet.name(t.action),
        t.guard.display(&a.alphabet),
        resets.join(",")
    )
}

pub fn to_dot(a: &Rera) -> String {
    let mut out = String::from("digraph rera {\n  rankdir=LR;\n  __start [shape=point];\n");
    for (i, l) in a.locations.iter().enumerate() {
        let shape = if a.is_accepting(i) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  {} [shape={}];", quote(l), shape);
    }
    let _ = writeln!(out, "  __start -> {};", quote(&a.locations[a.initial]));
    for t in &a.transitions {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&a.locations[t.source]),
            quote(&a.locations[t.target]),
            quote(&edge_label(a, t))
        );
    }
    out.push_str("}\n");
    out
}
