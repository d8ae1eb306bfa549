//! Handlebody diagram synthesis from wrapped-up forms, the dedicated K3,3
//! builder, assembly of full graphs, Legendrian data, and enumeration of
//! Stein structures by rotation vectors.
//!
//! Diagrams are combinatorial records, not curve geometry: one 1-handle per
//! curved edge, one 2-handle (an unknot) per vertex, and one link record per
//! edge. A horizontal edge links two unknots in a row, a vertical edge links
//! by a band, and a curved edge links through its 1-handle, with both
//! endpoint unknots threading the handle. The sign field on a link is the
//! sign of the plumbing edge: positive edges clasp positively, negative
//! edges negatively. The linking matrix derived from these records must
//! reproduce the plumbing intersection form exactly; handle slides are kept
//! as annotations and never alter the recorded links.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    cluster_graphs, decompose, validate, Decomposition, GraphError, PlumbingGraph, Sign,
};
use crate::wrap::{wrap, wrapped_violation, EdgeKind, K33Certificate, WrapError, WrappedForm};

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("malformed wrapped form: {0}")]
    Malformed(String),
    #[error("graph is not a complete bipartite K3,3")]
    NotK33,
    #[error("nonplanar cluster is not an exact K3,3; unsupported shape")]
    UnsupportedNonplanar(K33Certificate),
    #[error(transparent)]
    Wrap(WrapError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("stabilization budget for `{vertex}`: s- + s+ must equal {budget}")]
    BadStabilization { vertex: String, budget: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkKind {
    Horizontal,
    Vertical,
    ThroughHandle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub to: String,
    pub sign: Sign,
    pub kind: LinkKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlideReason {
    /// Positive vertical links require sliding the upper unknot over the
    /// 1-handles below it before the clasp can be drawn Legendrian.
    PositiveVerticalLink,
    /// A band from a protruding half unknot slides over its own 1-handle.
    CurvedBand,
    /// The K3,3 form has one crossing pair of curved edges; one attaching
    /// circle slides over a 1-handle to resolve it.
    CrossingResolution,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleSlide {
    pub over: u32,
    pub reason: SlideReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneHandle {
    pub id: u32,
    /// Index of the cluster this handle belongs to within its diagram.
    pub group: u32,
    pub curved_edge: (String, String),
    /// Nesting depth of the curved edge inside its cluster, 0 = innermost.
    pub nesting: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoHandle {
    #[serde(rename = "id")]
    pub vertex: String,
    pub framing: i64,
    pub group: u32,
    /// 1-handles this attaching circle runs through, in handle-id order.
    pub passes: Vec<u32>,
    pub links: Vec<Link>,
    /// Present when a curved edge leaves this vertex mid-row, drawn as a
    /// half unknot protruding from the handle plus a band.
    pub protrusion: bool,
    pub slides: Vec<HandleSlide>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandlebodyDiagram {
    pub one_handles: Vec<OneHandle>,
    pub two_handles: Vec<TwoHandle>,
    /// Unknot positions for schematic rendering; row-major like a wrapped
    /// form, clusters stacked, tree vertices rowed separately.
    pub rows: Vec<Vec<String>>,
    /// Pairs of curved edges that cross (only the K3,3 form has one).
    pub crossings: Vec<((String, String), (String, String))>,
}

impl HandlebodyDiagram {
    pub fn two_handle(&self, vertex: &str) -> Option<&TwoHandle> {
        self.two_handles.iter().find(|t| t.vertex == vertex)
    }

    /// Linking matrix in two-handle order: framings on the diagonal, one
    /// signed entry per link record.
    pub fn linking_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.two_handles.len();
        let index = |id: &str| {
            self.two_handles
                .iter()
                .position(|t| t.vertex == id)
                .expect("link target exists")
        };
        let mut m = vec![vec![0i64; n]; n];
        for (i, th) in self.two_handles.iter().enumerate() {
            m[i][i] = th.framing;
            for link in &th.links {
                m[i][index(&link.to)] += link.sign.as_i64();
            }
        }
        m
    }

    fn row_of(&self, vertex: &str) -> Option<usize> {
        self.rows
            .iter()
            .position(|row| row.iter().any(|v| v == vertex))
    }
}

fn row_position(rows: &[Vec<String>], vertex: &str) -> Option<(usize, usize)> {
    for (r, row) in rows.iter().enumerate() {
        if let Some(c) = row.iter().position(|v| v == vertex) {
            return Some((r, c));
        }
    }
    None
}

/// Builds the handlebody diagram of one wrapped cluster: a 1-handle per
/// curved edge and a clockwise unknot per vertex, linked along the edges.
pub fn build_handlebody(w: &WrappedForm) -> Result<HandlebodyDiagram, DiagramError> {
    if let Some(reason) = wrapped_violation(w) {
        return Err(DiagramError::Malformed(reason));
    }
    let g = &w.graph;
    let mut curved: Vec<&crate::wrap::WrappedEdge> = w
        .edges
        .iter()
        .filter(|e| e.kind == EdgeKind::Curved)
        .collect();
    curved.sort_by_key(|e| e.nesting);
    let one_handles: Vec<OneHandle> = curved
        .iter()
        .enumerate()
        .map(|(i, e)| OneHandle {
            id: i as u32,
            group: 0,
            curved_edge: (e.u.clone(), e.v.clone()),
            nesting: e.nesting.unwrap(),
        })
        .collect();

    let mut two_handles: Vec<TwoHandle> = g
        .vertices()
        .iter()
        .map(|v| TwoHandle {
            vertex: v.id.clone(),
            framing: v.weight,
            group: 0,
            passes: Vec::new(),
            links: Vec::new(),
            protrusion: false,
            slides: Vec::new(),
        })
        .collect();
    let push_link = |ths: &mut Vec<TwoHandle>, a: &str, b: &str, sign: Sign, kind: LinkKind| {
        let ai = g.index_of(a).expect("endpoint");
        let bi = g.index_of(b).expect("endpoint");
        ths[ai].links.push(Link {
            to: b.to_string(),
            sign,
            kind,
        });
        ths[bi].links.push(Link {
            to: a.to_string(),
            sign,
            kind,
        });
    };
    for e in &w.edges {
        match e.kind {
            EdgeKind::Horizontal => {
                push_link(&mut two_handles, &e.u, &e.v, e.sign, LinkKind::Horizontal)
            }
            EdgeKind::Vertical => {
                push_link(&mut two_handles, &e.u, &e.v, e.sign, LinkKind::Vertical)
            }
            EdgeKind::Curved => {
                push_link(
                    &mut two_handles,
                    &e.u,
                    &e.v,
                    e.sign,
                    LinkKind::ThroughHandle,
                );
                let h = curved
                    .iter()
                    .position(|c| c.nesting == e.nesting)
                    .expect("curved edge indexed") as u32;
                for end in [&e.u, &e.v] {
                    let vi = g.index_of(end).expect("endpoint");
                    two_handles[vi].passes.push(h);
                    let (r, c) = row_position(&w.rows, end).expect("vertex in rows");
                    if c != 0 && c != w.rows[r].len() - 1 {
                        two_handles[vi].protrusion = true;
                    }
                }
            }
        }
    }
    for th in &mut two_handles {
        th.passes.sort_unstable();
        debug_assert!(th.passes.len() <= 2, "at most two 1-handle passes");
    }
    Ok(HandlebodyDiagram {
        one_handles,
        two_handles,
        rows: w.rows.clone(),
        crossings: Vec::new(),
    })
}

/// True iff the graph is the complete bipartite graph on two triples.
pub fn is_k33(g: &PlumbingGraph) -> bool {
    if g.vertex_count() != 6 || g.edge_count() != 9 || !g.is_connected() {
        return false;
    }
    if (0..6).any(|v| g.valence(v) != 3) {
        return false;
    }
    // 2-color; a 3-regular simple bipartite graph on 3+3 vertices is K3,3
    let mut color = [u8::MAX; 6];
    color[0] = 0;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        for n in g.neighbors(v) {
            if color[n] == u8::MAX {
                color[n] = 1 - color[v];
                stack.push(n);
            } else if color[n] == color[v] {
                return false;
            }
        }
    }
    color.iter().filter(|&&c| c == 0).count() == 3
}

/// Builds the handlebody diagram of a K3,3 plumbing from the fixed
/// alternate wrapped-up form: a bottom row of four vertices, a top row of
/// two, four 1-handles, and one crossing pair of curved edges resolved by
/// sliding the top-left attaching circle over the second-outermost handle.
pub fn build_k33(g: &PlumbingGraph) -> Result<HandlebodyDiagram, DiagramError> {
    if !is_k33(g) {
        return Err(DiagramError::NotK33);
    }
    // Bipartition in input order: the first part fills template slots
    // a, b, c; the other fills d, e, f. Any bijection works because every
    // cross pair is an edge.
    let mut color = [u8::MAX; 6];
    color[0] = 0;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        for n in g.neighbors(v) {
            if color[n] == u8::MAX {
                color[n] = 1 - color[v];
                stack.push(n);
            }
        }
    }
    let part0: Vec<usize> = (0..6).filter(|&v| color[v] == 0).collect();
    let part1: Vec<usize> = (0..6).filter(|&v| color[v] == 1).collect();
    let (a, b, c) = (part0[0], part0[1], part0[2]);
    let (d, e, f) = (part1[0], part1[1], part1[2]);
    let id = |v: usize| g.id(v).to_string();

    // template: rows [d a e c] and [b f]; horizontals d-a, a-e, e-c;
    // verticals b-d, f-c; curved edges innermost out: c-d, b-f, a-f, b-e
    let rows = vec![vec![id(d), id(a), id(e), id(c)], vec![id(b), id(f)]];
    let curved = [(c, d), (b, f), (a, f), (b, e)];
    let horizontals = [(d, a), (a, e), (e, c)];
    let verticals = [(b, d), (f, c)];
    let one_handles: Vec<OneHandle> = curved
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| OneHandle {
            id: i as u32,
            group: 0,
            curved_edge: (id(x), id(y)),
            nesting: i as u32,
        })
        .collect();
    let mut two_handles: Vec<TwoHandle> = g
        .vertices()
        .iter()
        .map(|v| TwoHandle {
            vertex: v.id.clone(),
            framing: v.weight,
            group: 0,
            passes: Vec::new(),
            links: Vec::new(),
            protrusion: false,
            slides: Vec::new(),
        })
        .collect();
    let link = |ths: &mut Vec<TwoHandle>, x: usize, y: usize, kind: LinkKind| {
        let sign = g.edges()[g.edge_between(x, y).expect("K3,3 edge")].sign;
        ths[x].links.push(Link {
            to: id(y),
            sign,
            kind,
        });
        ths[y].links.push(Link {
            to: id(x),
            sign,
            kind,
        });
    };
    for &(x, y) in &horizontals {
        link(&mut two_handles, x, y, LinkKind::Horizontal);
    }
    for &(x, y) in &verticals {
        link(&mut two_handles, x, y, LinkKind::Vertical);
    }
    for (h, &(x, y)) in curved.iter().enumerate() {
        link(&mut two_handles, x, y, LinkKind::ThroughHandle);
        two_handles[x].passes.push(h as u32);
        two_handles[y].passes.push(h as u32);
    }
    for th in &mut two_handles {
        th.passes.sort_unstable();
    }
    // mid-row curve endpoints protrude: a and e sit inside the bottom row
    two_handles[a].protrusion = true;
    two_handles[e].protrusion = true;
    // the crossing pair is (a-f, b-e); resolved by sliding b over handle 2
    two_handles[b].slides.push(HandleSlide {
        over: 2,
        reason: SlideReason::CrossingResolution,
    });
    Ok(HandlebodyDiagram {
        one_handles,
        two_handles,
        rows,
        crossings: vec![((id(a), id(f)), (id(b), id(e)))],
    })
}

/// Builds the diagram of a whole valid graph: clusters are wrapped (or
/// K3,3-built) and stacked in input order; tree and connector vertices
/// become plain linked unknots without 1-handle passes.
pub fn assemble(g: &PlumbingGraph, d: &Decomposition) -> Result<HandlebodyDiagram, DiagramError> {
    let report = validate(g);
    if !report.ok {
        return Err(DiagramError::Graph(GraphError::Invalid(report)));
    }
    let mut clusters = cluster_graphs(g, d);
    clusters.sort_by_key(|c| {
        c.vertices()
            .iter()
            .map(|v| g.index_of(&v.id).expect("cluster vertex"))
            .min()
    });

    let mut one_handles = Vec::new();
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut crossings = Vec::new();
    let mut two_handles: Vec<TwoHandle> = g
        .vertices()
        .iter()
        .map(|v| TwoHandle {
            vertex: v.id.clone(),
            framing: v.weight,
            group: u32::MAX,
            passes: Vec::new(),
            links: Vec::new(),
            protrusion: false,
            slides: Vec::new(),
        })
        .collect();

    for (ci, cluster) in clusters.iter().enumerate() {
        let sub = match wrap(cluster) {
            Ok(w) => build_handlebody(&w)?,
            Err(WrapError::NonPlanar(cert)) => {
                if is_k33(cluster) {
                    build_k33(cluster)?
                } else {
                    return Err(DiagramError::UnsupportedNonplanar(cert));
                }
            }
            Err(other) => return Err(DiagramError::Wrap(other)),
        };
        let offset = one_handles.len() as u32;
        for h in sub.one_handles {
            one_handles.push(OneHandle {
                id: h.id + offset,
                group: ci as u32,
                curved_edge: h.curved_edge,
                nesting: h.nesting,
            });
        }
        for th in sub.two_handles {
            let gi = g.index_of(&th.vertex).expect("cluster vertex");
            two_handles[gi] = TwoHandle {
                vertex: th.vertex,
                framing: th.framing,
                group: ci as u32,
                passes: th.passes.iter().map(|p| p + offset).collect(),
                links: th.links,
                protrusion: th.protrusion,
                slides: th.slides,
            };
        }
        rows.extend(sub.rows);
        crossings.extend(sub.crossings);
    }

    // trees and connectors: plain unknots, linked clasp by clasp
    let mut extra_edges: Vec<(String, String, Sign)> = Vec::new();
    let mut extra_rows: Vec<Vec<String>> = Vec::new();
    for t in &d.trees {
        extra_edges.extend(t.edges.iter().cloned());
        if !t.vertices.is_empty() {
            extra_rows.push(t.vertices.clone());
        }
    }
    for c in &d.connectors {
        extra_edges.extend(c.edges.iter().cloned());
        if !c.vertices.is_empty() {
            extra_rows.push(c.vertices.clone());
        }
    }
    extra_rows.sort();
    rows.extend(extra_rows);
    extra_edges.sort();
    for (u, v, sign) in extra_edges {
        let ui = g.index_of(&u).expect("edge endpoint");
        let vi = g.index_of(&v).expect("edge endpoint");
        two_handles[ui].links.push(Link {
            to: v.clone(),
            sign,
            kind: LinkKind::Horizontal,
        });
        two_handles[vi].links.push(Link {
            to: u,
            sign,
            kind: LinkKind::Horizontal,
        });
    }
    let tree_group = clusters.len() as u32;
    for th in &mut two_handles {
        if th.group == u32::MAX {
            th.group = tree_group;
        }
    }
    Ok(HandlebodyDiagram {
        one_handles,
        two_handles,
        rows,
        crossings,
    })
}

/// Decompose and assemble in one step.
pub fn build_diagram(g: &PlumbingGraph) -> Result<HandlebodyDiagram, DiagramError> {
    let d = decompose(g)?;
    assemble(g, &d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendrianTwoHandle {
    #[serde(flatten)]
    pub base: TwoHandle,
    pub tb: i64,
    pub rot: i64,
    pub stabilizations: (u32, u32),
}

/// A handlebody diagram whose attaching circles carry Legendrian data:
/// every unknot starts at tb = -1 and is stabilized down to tb = weight + 1,
/// so the smooth framing tb - 1 equals the weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegendrianDiagram {
    pub one_handles: Vec<OneHandle>,
    pub two_handles: Vec<LegendrianTwoHandle>,
    pub rows: Vec<Vec<String>>,
    pub crossings: Vec<((String, String), (String, String))>,
}

/// Applies a stabilization choice `(s-, s+)` per vertex (in two-handle
/// order); each must satisfy `s- + s+ = -weight - 2`.
pub fn legendrianize(
    h: &HandlebodyDiagram,
    choices: &[(u32, u32)],
) -> Result<LegendrianDiagram, DiagramError> {
    assert_eq!(
        choices.len(),
        h.two_handles.len(),
        "one choice per 2-handle"
    );
    let mut out = Vec::with_capacity(h.two_handles.len());
    for (th, &(s_neg, s_pos)) in h.two_handles.iter().zip(choices) {
        let budget = -th.framing - 2;
        if budget < 0 || (s_neg + s_pos) as i64 != budget {
            return Err(DiagramError::BadStabilization {
                vertex: th.vertex.clone(),
                budget,
            });
        }
        let mut base = th.clone();
        // Legendrian rearrangement slides, recorded bottom-up: a positive
        // vertical clasp slides the upper unknot over its cluster's handles;
        // a protruding band slides over its own handle.
        let my_row = h.row_of(&th.vertex).unwrap_or(0);
        let positive_vertical = th.links.iter().any(|l| {
            l.kind == LinkKind::Vertical
                && l.sign == Sign::Plus
                && h.row_of(&l.to).unwrap_or(0) < my_row
        });
        if positive_vertical {
            for oh in &h.one_handles {
                if oh.group == th.group {
                    base.slides.push(HandleSlide {
                        over: oh.id,
                        reason: SlideReason::PositiveVerticalLink,
                    });
                }
            }
        }
        if th.protrusion {
            for &p in &th.passes {
                base.slides.push(HandleSlide {
                    over: p,
                    reason: SlideReason::CurvedBand,
                });
            }
        }
        out.push(LegendrianTwoHandle {
            tb: -1 - (s_neg + s_pos) as i64,
            rot: s_neg as i64 - s_pos as i64,
            stabilizations: (s_neg, s_pos),
            base,
        });
    }
    Ok(LegendrianDiagram {
        one_handles: h.one_handles.clone(),
        two_handles: out,
        rows: h.rows.clone(),
        crossings: h.crossings.clone(),
    })
}

/// Lazy odometer over all rotation vectors, lexicographically ascending.
/// Vertex `i` ranges over `-(a-2), -(a-4), ..., a-2` for weight `-a`.
pub struct RotationVectors {
    maxima: Vec<i64>,
    current: Option<Vec<i64>>,
}

impl RotationVectors {
    fn new(diagram: &HandlebodyDiagram) -> Self {
        let maxima: Vec<i64> = diagram
            .two_handles
            .iter()
            .map(|th| -th.framing - 2)
            .collect();
        let current = if maxima.iter().any(|&m| m < 0) {
            None // a weight of -1 admits no stabilization choice at all
        } else {
            Some(maxima.iter().map(|&m| -m).collect())
        };
        RotationVectors { maxima, current }
    }
}

impl Iterator for RotationVectors {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().expect("present");
        let mut i = cur.len();
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] + 2 <= self.maxima[i] {
                cur[i] += 2;
                for (c, m) in cur.iter_mut().zip(&self.maxima).skip(i + 1) {
                    *c = -m;
                }
                break;
            }
        }
        Some(out)
    }
}

/// All rotation vectors of Stein structures on the diagram, lazily.
pub fn stein_rotation_vectors(h: &HandlebodyDiagram) -> RotationVectors {
    RotationVectors::new(h)
}

/// The full enumeration of Stein structures, one rotation-number vector per
/// structure, lexicographically ordered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinEnumeration {
    pub vertex_order: Vec<String>,
    pub rotation_vectors: Vec<Vec<i64>>,
}

pub fn enumerate_stein(h: &HandlebodyDiagram) -> SteinEnumeration {
    SteinEnumeration {
        vertex_order: h.two_handles.iter().map(|t| t.vertex.clone()).collect(),
        rotation_vectors: stein_rotation_vectors(h).collect(),
    }
}

/// Product of (a_v - 1) over all vertices: the guaranteed number of Stein
/// fillable contact structures, and exactly the enumeration cardinality.
pub fn lower_bound(g: &PlumbingGraph) -> Result<BigUint, GraphError> {
    let report = validate(g);
    if !report.ok {
        return Err(GraphError::Invalid(report));
    }
    Ok(g.vertices()
        .iter()
        .map(|v| BigUint::from((-v.weight - 1) as u64))
        .product())
}

/// Product of (a - 1) over a list of positive chain coefficients.
pub fn coefficient_product(coeffs: impl IntoIterator<Item = i64>) -> BigUint {
    coeffs
        .into_iter()
        .map(|a| BigUint::from((a - 1).unsigned_abs()))
        .fold(BigUint::one(), |acc, x| acc * x)
}
