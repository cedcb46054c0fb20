//! Graphviz output.

use std::fmt::Write;

use rabuild::coxeter::Partition;
use rabuild::verify::residue_tree_edges;
use rabuild::{Ball, BuildingSpec, Chamber, Residue, Result, TypeSet, Wing};

const PALETTE: [&str; 8] =
    ["lightblue", "lightpink", "palegreen", "khaki", "plum", "lightsalmon", "lightcyan", "wheat"];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn chamber_id(spec: &BuildingSpec, c: &Chamber) -> String {
    quote(&spec.display(c).to_string())
}

fn residue_label(spec: &BuildingSpec, r: &Residue) -> String {
    format!("{}@{}", spec.diagram().format_types(r.types()), spec.display(r.base()))
}

/// Appends one edge per adjacent pair of ball members, labelled by type.
fn adjacency(out: &mut String, spec: &BuildingSpec, ball: &Ball) {
    for (k, x) in ball.members().iter().enumerate() {
        for (t, y) in spec.all_neighbours(x) {
            if ball.index_of(&y).is_some_and(|l| l > k) {
                let _ = writeln!(
                    out,
                    "  {} -- {} [label={}];",
                    chamber_id(spec, x),
                    chamber_id(spec, &y),
                    quote(spec.diagram().name(t))
                );
            }
        }
    }
}

/// The chamber graph of the ball.
pub fn ball(spec: &BuildingSpec, ball: &Ball) -> String {
    let mut out = String::from("graph ball {\n");
    for (x, d) in ball.iter() {
        let _ = writeln!(out, "  {} [dist={d}];", chamber_id(spec, x));
    }
    adjacency(&mut out, spec, ball);
    out.push_str("}\n");
    out
}

/// The ball with every chamber filled by the colour of the wing of the
/// `ty`-panel of `c` it belongs to.
pub fn wings(spec: &BuildingSpec, ball: &Ball, c: &Chamber, ty: usize) -> Result<String> {
    let mut panel: Vec<Chamber> = spec.neighbours(c, ty).chain([c.clone()]).collect();
    panel.sort();
    let mut out = String::from("graph wings {\n  node [style=filled];\n");
    let _ = writeln!(
        out,
        "  label={};",
        quote(&format!("wings of the {}-panel of {}", spec.diagram().name(ty), spec.display(c)))
    );
    for x in ball.members() {
        let mut wing = None;
        for (k, d) in panel.iter().enumerate() {
            if spec.wing_contains(&Wing::new(d.clone(), TypeSet::singleton(ty)), x)? {
                wing = Some(k);
                break;
            }
        }
        let k = wing.expect("wings of a panel cover the building");
        let _ = writeln!(
            out,
            "  {} [wing={}, fillcolor={}];",
            chamber_id(spec, x),
            quote(&spec.display(&panel[k]).to_string()),
            PALETTE[k % PALETTE.len()]
        );
    }
    adjacency(&mut out, spec, ball);
    out.push_str("}\n");
    Ok(out)
}

/// The bipartite graph on residues of types `I0 ∪ I1` (boxes) and
/// `I0 ∪ I2` (ellipses) meeting the ball, one edge per `I0`-residue.
pub fn tree(spec: &BuildingSpec, p: &Partition, ball: &Ball) -> String {
    let (vertices, edges) = residue_tree_edges(spec, p, ball);
    let side_one = p.i0.union(p.i1);
    let mut out = String::from("graph tree {\n");
    for r in &vertices {
        let shape = if r.types() == side_one { "box" } else { "ellipse" };
        let _ = writeln!(out, "  {} [shape={shape}];", quote(&residue_label(spec, r)));
    }
    for &(a, b) in &edges {
        let _ = writeln!(
            out,
            "  {} -- {};",
            quote(&residue_label(spec, &vertices[a])),
            quote(&residue_label(spec, &vertices[b]))
        );
    }
    out.push_str("}\n");
    out
}
