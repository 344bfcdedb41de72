//! Graphviz rendering. Vertices become nodes colored by agent, edges become
//! edges, and every simplex of dimension two or more becomes a small
//! `triangle` node (a `box` above dimension two) attached to its vertices.

use std::fmt::Write;

use crate::cset::{Cset, SimplexId};

const PALETTE: [&str; 8] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999",
];

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn to_dot(x: &Cset, name: &str) -> String {
    let agents = x.agents();
    let mut out = String::new();
    writeln!(out, "graph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  node [fontsize=10];").unwrap();
    for v in x.vertices() {
        let a = x.color(v).iter().next().expect("vertex has one color");
        writeln!(
            out,
            "  s{} [label=\"{}\", tooltip=\"{}\", style=filled, fillcolor=\"{}\"];",
            v,
            agents.name(a),
            escape(x.payload(v)),
            PALETTE[a % PALETTE.len()]
        )
        .unwrap();
    }
    for e in x.dimension(1) {
        let ends: Vec<SimplexId> = x
            .color(e)
            .iter()
            .map(|a| x.vertex(e, a).expect("edge vertex"))
            .collect();
        writeln!(
            out,
            "  s{} -- s{} [tooltip=\"{}\"];",
            ends[0],
            ends[1],
            escape(x.payload(e))
        )
        .unwrap();
    }
    for d in 2..=x.max_dimension().unwrap_or(0) {
        let shape = if d == 2 { "triangle" } else { "box" };
        for s in x.dimension(d) {
            writeln!(
                out,
                "  s{} [shape={}, label=\"\", width=0.15, height=0.15, tooltip=\"{}\"];",
                s,
                shape,
                escape(x.payload(s))
            )
            .unwrap();
            for a in x.color(s).iter() {
                writeln!(out, "  s{} -- s{} [style=dotted];", s, x.vertex(s, a).expect("vertex")).unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cset::AgentSet;

    #[test]
    fn triangle_rendering() {
        let agents = AgentSet::alphabetic(3);
        let x = Cset::standard_simplex(&agents, agents.full()).unwrap();
        let dot = to_dot(&x, "t");
        assert_eq!(dot.matches("shape=triangle").count(), 1);
        assert_eq!(dot.matches("fillcolor").count(), 3);
        assert_eq!(dot.matches("style=dotted").count(), 3);
        assert!(dot.starts_with("graph \"t\" {"));
    }
}
