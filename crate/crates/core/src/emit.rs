//! Deterministic DOT and SVG emitters. The pictures are schematic mirrors
//! of the combinatorial data, on an integer grid; identical inputs yield
//! byte-identical output. No floating point is used anywhere.

use std::fmt::Write as _;

use crate::graph::{Decomposition, PlumbingGraph, Sign};
use crate::stein::{HandlebodyDiagram, LinkKind};
use crate::wrap::{EdgeKind, WrappedForm};

fn dot_escape(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT rendering of a plumbing graph; negative edges are dashed.
pub fn dot_graph(g: &PlumbingGraph) -> String {
    let mut s = String::new();
    s.push_str("graph plumbing {\n  node [shape=circle];\n");
    for v in g.vertices() {
        let _ = writeln!(
            s,
            "  {} [label=\"{}\\n{}\"];",
            dot_escape(&v.id),
            v.id,
            v.weight
        );
    }
    for e in g.edges() {
        let style = match e.sign {
            Sign::Plus => "",
            Sign::Minus => " [style=dashed, label=\"-\"]",
        };
        let _ = writeln!(
            s,
            "  {} -- {}{};",
            dot_escape(g.id(e.u)),
            dot_escape(g.id(e.v)),
            style
        );
    }
    s.push_str("}\n");
    s
}

/// DOT rendering of a decomposition: one subgraph cluster per 2-connected
/// part, tree and connector edges drawn outside.
pub fn dot_decomposition(g: &PlumbingGraph, d: &Decomposition) -> String {
    let mut s = String::new();
    s.push_str("graph decomposition {\n  node [shape=circle];\n");
    for v in g.vertices() {
        let _ = writeln!(
            s,
            "  {} [label=\"{}\\n{}\"];",
            dot_escape(&v.id),
            v.id,
            v.weight
        );
    }
    for (ci, cluster) in d.clusters.iter().enumerate() {
        let _ = writeln!(s, "  subgraph cluster_{ci} {{");
        let _ = writeln!(s, "    label=\"cluster {ci}\";");
        for (u, v, sign) in &cluster.edges {
            let style = match sign {
                Sign::Plus => "",
                Sign::Minus => " [style=dashed]",
            };
            let _ = writeln!(s, "    {} -- {}{};", dot_escape(u), dot_escape(v), style);
        }
        s.push_str("  }\n");
    }
    for part in d
        .trees
        .iter()
        .map(|t| &t.edges)
        .chain(d.connectors.iter().map(|c| &c.edges))
    {
        for (u, v, sign) in part {
            let style = match sign {
                Sign::Plus => "",
                Sign::Minus => " [style=dashed]",
            };
            let _ = writeln!(s, "  {} -- {}{};", dot_escape(u), dot_escape(v), style);
        }
    }
    s.push_str("}\n");
    s
}

/// DOT rendering of a wrapped form: rows share a rank, curved edges are
/// drawn dashed without a layout constraint.
pub fn dot_wrapped(w: &WrappedForm) -> String {
    let mut s = String::new();
    s.push_str("graph wrapped {\n  node [shape=circle];\n");
    for (r, row) in w.rows.iter().enumerate() {
        let _ = write!(s, "  {{ rank=same; /* row {r} */");
        for id in row {
            let _ = write!(s, " {};", dot_escape(id));
        }
        s.push_str(" }\n");
    }
    for e in &w.edges {
        let style = match (e.kind, e.sign) {
            (EdgeKind::Curved, _) => " [style=dashed, constraint=false]",
            (_, Sign::Minus) => " [style=dotted]",
            _ => "",
        };
        let _ = writeln!(
            s,
            "  {} -- {}{};",
            dot_escape(&e.u),
            dot_escape(&e.v),
            style
        );
    }
    s.push_str("}\n");
    s
}

const CELL_W: i64 = 90;
const CELL_H: i64 = 80;
const MARGIN: i64 = 60;

struct Grid {
    cols: i64,
    rows: i64,
}

impl Grid {
    fn of(rows: &[Vec<String>]) -> Grid {
        Grid {
            cols: rows.iter().map(|r| r.len() as i64).max().unwrap_or(1),
            rows: rows.len().max(1) as i64,
        }
    }

    fn x(&self, col: i64) -> i64 {
        MARGIN + col * CELL_W
    }

    /// Row 0 sits at the bottom of the picture.
    fn y(&self, row: i64) -> i64 {
        MARGIN + (self.rows - 1 - row) * CELL_H
    }

    fn width(&self, extra: i64) -> i64 {
        2 * MARGIN + (self.cols - 1).max(0) * CELL_W + extra
    }

    fn height(&self, extra: i64) -> i64 {
        2 * MARGIN + (self.rows - 1).max(0) * CELL_H + extra
    }
}

fn position(rows: &[Vec<String>], id: &str) -> Option<(i64, i64)> {
    for (r, row) in rows.iter().enumerate() {
        if let Some(c) = row.iter().position(|v| v == id) {
            return Some((r as i64, c as i64));
        }
    }
    None
}

fn svg_header(width: i64, height: i64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n\
         <style>text{{font:12px monospace;text-anchor:middle}} \
         .edge{{stroke:#333;fill:none}} .neg{{stroke-dasharray:4 3}} \
         .curved{{stroke:#0066cc;fill:none}} .unknot{{fill:none;stroke:#000}} \
         .handle{{fill:#dddddd;stroke:#000}}</style>\n"
    )
}

/// SVG schematic of a wrapped form: rows on an integer grid, curved edges
/// as nested arcs sweeping below the bottom row.
pub fn svg_wrapped(w: &WrappedForm) -> String {
    let grid = Grid::of(&w.rows);
    let max_nest = w.edges.iter().filter_map(|e| e.nesting).max().unwrap_or(0) as i64;
    let depth = 30 + 25 * (max_nest + 1);
    let mut s = svg_header(grid.width(0), grid.height(depth));
    let floor = grid.y(0) + 30;
    for e in &w.edges {
        let Some((ru, cu)) = position(&w.rows, &e.u) else {
            continue;
        };
        let Some((rv, cv)) = position(&w.rows, &e.v) else {
            continue;
        };
        let (x1, y1) = (grid.x(cu), grid.y(ru));
        let (x2, y2) = (grid.x(cv), grid.y(rv));
        let neg = if e.sign == Sign::Minus { " neg" } else { "" };
        match e.kind {
            EdgeKind::Horizontal | EdgeKind::Vertical => {
                let _ = writeln!(
                    s,
                    "<line class=\"edge{neg}\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>"
                );
            }
            EdgeKind::Curved => {
                let dip = floor + 25 * (e.nesting.unwrap_or(0) as i64 + 1);
                let _ = writeln!(
                    s,
                    "<path class=\"curved{neg}\" d=\"M {x1} {y1} C {x1} {dip}, {x2} {dip}, {x2} {y2}\"/>"
                );
            }
        }
    }
    for (r, row) in w.rows.iter().enumerate() {
        for (c, id) in row.iter().enumerate() {
            let x = grid.x(c as i64);
            let y = grid.y(r as i64);
            let weight = w.graph.index_of(id).map(|i| w.graph.weight(i)).unwrap_or(0);
            let _ = writeln!(
                s,
                "<circle cx=\"{x}\" cy=\"{y}\" r=\"14\" fill=\"#fff\" stroke=\"#000\"/>"
            );
            let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\">{id}</text>", y + 4);
            let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\">{weight}</text>", y - 18);
        }
    }
    s.push_str("</svg>\n");
    s
}

/// SVG schematic of a handlebody diagram: one unknot glyph per 2-handle on
/// the grid and one box pair per 1-handle on the right margin.
pub fn svg_diagram(h: &HandlebodyDiagram) -> String {
    let grid = Grid::of(&h.rows);
    let handle_zone = 40 + 70 * h.one_handles.len() as i64;
    let width = grid.width(handle_zone);
    let height = grid.height(40);
    let mut s = svg_header(width, height);
    for oh in &h.one_handles {
        let x = grid.width(0) + 70 * oh.id as i64;
        let _ = writeln!(
            s,
            "<rect class=\"handle\" x=\"{x}\" y=\"{MARGIN}\" width=\"18\" height=\"40\"/>"
        );
        let _ = writeln!(
            s,
            "<rect class=\"handle\" x=\"{x}\" y=\"{}\" width=\"18\" height=\"40\"/>",
            height - MARGIN - 40
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\">h{}</text>",
            x + 9,
            MARGIN - 8,
            oh.id
        );
    }
    // links drawn pre-slide; through-handle clasps detour to their handle
    for th in &h.two_handles {
        let Some((ru, cu)) = position(&h.rows, &th.vertex) else {
            continue;
        };
        for link in &th.links {
            if link.to.as_str() <= th.vertex.as_str() {
                continue; // draw each clasp once
            }
            let Some((rv, cv)) = position(&h.rows, &link.to) else {
                continue;
            };
            let (x1, y1) = (grid.x(cu), grid.y(ru));
            let (x2, y2) = (grid.x(cv), grid.y(rv));
            let neg = if link.sign == Sign::Minus { " neg" } else { "" };
            match link.kind {
                LinkKind::Horizontal | LinkKind::Vertical => {
                    let _ = writeln!(
                        s,
                        "<line class=\"edge{neg}\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\"/>"
                    );
                }
                LinkKind::ThroughHandle => {
                    let hid = th
                        .passes
                        .iter()
                        .copied()
                        .find(|&p| {
                            let ce = &h.one_handles[p as usize].curved_edge;
                            (ce.0 == th.vertex && ce.1 == link.to)
                                || (ce.1 == th.vertex && ce.0 == link.to)
                        })
                        .unwrap_or(0);
                    let hx = grid.width(0) + 70 * hid as i64 + 9;
                    let hy = height / 2;
                    let _ = writeln!(
                        s,
                        "<path class=\"curved{neg}\" d=\"M {x1} {y1} C {hx} {hy}, {hx} {hy}, {x2} {y2}\"/>"
                    );
                }
            }
        }
    }
    for (r, row) in h.rows.iter().enumerate() {
        for (c, id) in row.iter().enumerate() {
            let x = grid.x(c as i64);
            let y = grid.y(r as i64);
            let framing = h.two_handle(id).map(|t| t.framing).unwrap_or(0);
            let _ = writeln!(
                s,
                "<ellipse class=\"unknot\" cx=\"{x}\" cy=\"{y}\" rx=\"26\" ry=\"12\"/>"
            );
            let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\">{id}</text>", y + 4);
            let _ = writeln!(s, "<text x=\"{x}\" y=\"{}\">{framing}</text>", y - 16);
        }
    }
    s.push_str("</svg>\n");
    s
}
