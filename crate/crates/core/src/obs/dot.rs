//! Graphviz rendering of the TDG and TOG. Language and observation states
//! are circles carrying their label set, decision states are diamonds.

use std::fmt::Write as _;

use super::{ObservationStructure, Tdg, Tog};

impl ObservationStructure<'_> {
    pub fn tdg_dot(&self) -> String {
        let alphabet = self.alphabet();
        let mut out = String::from("digraph tdg {\n  node [fontname=\"Helvetica\"];\n");
        for s in self.tdg.live_states() {
            let state = &self.tdg.lang[s];
            let extra = if s == Tdg::ROOT { ", penwidth=2" } else { "" };
            let _ = writeln!(out, "  l{s} [shape=circle, label=\"{}\"{extra}];", state.labels);
            for &d in &state.children {
                let dec = &self.tdg.dec[d];
                let _ = writeln!(out, "  d{d} [shape=diamond, label=\"\"];");
                let _ = writeln!(
                    out,
                    "  l{s} -> d{d} [label=\"{}, {}\"];",
                    alphabet.name(dec.action),
                    dec.guard.display(alphabet)
                );
                for (r, c) in dec.children() {
                    let _ = writeln!(out, "  d{d} -> l{c} [label=\"{r}\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn tog_dot(&self) -> String {
        let alphabet = self.alphabet();
        let mut out = String::from("digraph tog {\n  node [fontname=\"Helvetica\"];\n");
        let mut stack = vec![Tog::ROOT];
        while let Some(s) = stack.pop() {
            let state = &self.tog.states[s];
            let style = if state.invalid {
                ", style=filled, fillcolor=lightgray"
            } else {
                ""
            };
            let label = if state.invalid {
                format!("{} inv", state.labels)
            } else {
                state.labels.to_string()
            };
            let _ = writeln!(out, "  o{s} [shape=circle, label=\"{label}\"{style}];");
            for &d in &state.children {
                let dec = &self.tog.decs[d];
                let _ = writeln!(out, "  e{d} [shape=diamond, label=\"\"];");
                let _ = writeln!(
                    out,
                    "  o{s} -> e{d} [label=\"{}, {}\"];",
                    alphabet.name(dec.action),
                    dec.class
                );
                for r in super::RESETS {
                    if let Some(c) = dec.child[r as usize] {
                        let _ = writeln!(out, "  e{d} -> o{c} [label=\"{r}\"];");
                        stack.push(c);
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
