//! DOT rendering of the dual graph: one vertex per divisor component, one
//! edge per size-2 stratum; separator edges bold red, other nodal edges
//! dashed.

use std::collections::BTreeSet;
use std::fmt::Write;

use strata_core::nodal::NodalData;
use strata_core::{StrataStructure, Stratum};

pub fn dual_graph_dot(
    s: &StrataStructure,
    names: &[String],
    nodal: &NodalData,
    separator: &BTreeSet<Stratum>,
) -> String {
    let mut out = String::from("graph divisor {\n");
    for (t, i) in s.indices().iter().enumerate() {
        let label = names
            .get(t)
            .cloned()
            .unwrap_or_else(|| format!("E{}", i.0))
            .replace('\\', "\\\\")
            .replace('"', "\\\"");
        writeln!(out, "  {} [label=\"{}\"];", i.0, label).expect("string write");
    }
    for edge in s.level(2) {
        let [a, b] = edge.members() else { unreachable!("size 2") };
        let attrs = if separator.contains(edge) {
            " [style=bold,color=red]"
        } else if nodal.contains(edge) {
            " [style=dashed]"
        } else {
            ""
        };
        writeln!(out, "  {} -- {}{};", a.0, b.0, attrs).expect("string write");
    }
    out.push_str("}\n");
    out
}
