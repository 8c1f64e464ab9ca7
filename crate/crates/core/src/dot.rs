//! Graphviz output. Vertices and edges are emitted in sorted order, so equal
//! inputs give byte-identical files.

use std::fmt::Write;

use crate::graph::FiniteGraph;
use crate::treedecomp::TreeDecomposition;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22",
];

#[derive(Clone, Debug, Default)]
pub struct DotStyle {
    /// Drawn dashed.
    pub boundary: Vec<usize>,
    /// Filled red.
    pub separator: Vec<usize>,
    /// One colour class per region, cycling through a fixed palette.
    pub regions: Vec<Vec<usize>>,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_to_dot(g: &FiniteGraph, name: &str, style: &DotStyle) -> String {
    let mut region_of = vec![None; g.n()];
    for (i, r) in style.regions.iter().enumerate() {
        for &v in r {
            if v < g.n() {
                region_of[v] = Some(i);
            }
        }
    }
    let mut out = String::new();
    writeln!(out, "graph {} {{", quote(name)).unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in 0..g.n() {
        let mut attrs = Vec::new();
        if let Some(l) = g.labels().get(&v) {
            attrs.push(format!("label={}", quote(l)));
        }
        let mut styles = Vec::new();
        if style.boundary.contains(&v) {
            styles.push("dashed");
        }
        if style.separator.contains(&v) {
            styles.push("filled");
            attrs.push("fillcolor=\"#d62728\"".into());
        } else if let Some(i) = region_of[v] {
            attrs.push(format!("color=\"{}\"", PALETTE[i % PALETTE.len()]));
        }
        if !styles.is_empty() {
            attrs.push(format!("style=\"{}\"", styles.join(",")));
        }
        if attrs.is_empty() {
            writeln!(out, "  {v};").unwrap();
        } else {
            writeln!(out, "  {v} [{}];", attrs.join(", ")).unwrap();
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "  {u} -- {v};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// The decomposition tree with each node labelled by its part.
pub fn td_to_dot(td: &TreeDecomposition, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "graph {} {{", quote(name)).unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    for (t, part) in td.parts().iter().enumerate() {
        let body: Vec<String> = part.iter().map(ToString::to_string).collect();
        writeln!(out, "  {t} [label={}];", quote(&format!("{t}: {{{}}}", body.join(",")))).unwrap();
    }
    for (a, b) in td.tree().edges() {
        writeln!(out, "  {a} -- {b};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_with_styles() {
        let style = DotStyle {
            boundary: vec![0, 2],
            separator: vec![1],
            regions: vec![vec![0], vec![2]],
        };
        let dot = graph_to_dot(&FiniteGraph::path(3), "p3", &style);
        assert_eq!(
            dot,
            "graph \"p3\" {\n  node [shape=circle];\n  0 [color=\"#1f77b4\", style=\"dashed\"];\n  1 [fillcolor=\"#d62728\", style=\"filled\"];\n  2 [color=\"#2ca02c\", style=\"dashed\"];\n  0 -- 1;\n  1 -- 2;\n}\n"
        );
    }

    #[test]
    fn decomposition_labels() {
        let td = TreeDecomposition::new(FiniteGraph::path(2), vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(td_to_dot(&td, "td").contains("1 [label=\"1: {1,2}\"];"));
    }
}
