//! Planar embedding of 2-connected clusters, the dual graph, Hamiltonian
//! paths ending at the outer face, and the wrapped-up form.
//!
//! The wrapped-up form rewrites a cluster as horizontal rows of vertices in
//! which every cycle wraps around an innermost cycle. The bottom row plus a
//! curved closing edge form that cycle; every further independent cycle
//! contributes exactly one curved edge nested around it, so the number of
//! curved edges equals the cycle rank. A wrapped form is accepted only if
//! peeling the curved edges back off, innermost first, replays down to the
//! bottom cycle; this is the operational form of the requirement that the
//! dual graph of the drawing is a path ending at the outer face.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{is_two_connected, validate, GraphError, PlumbingGraph, Sign, Vertex};

/// Witness that a cluster contains a subdivided complete bipartite graph on
/// two triples of branch vertices; such clusters have no planar embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct K33Certificate {
    pub branch_vertices: Vec<String>,
    /// Nine internally disjoint paths, each listed with its endpoints.
    pub paths: Vec<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum WrapError {
    #[error(transparent)]
    Invalid(#[from] GraphError),
    #[error("wrapping requires a 2-connected cluster containing a cycle")]
    NotTwoConnected,
    #[error("cluster is nonplanar: it contains a K3,3 subdivision")]
    NonPlanar(K33Certificate),
    #[error("no Hamiltonian dual path yields a wrapped form; counterexample graph: {0}")]
    SearchExhausted(String),
}

/// A face of an embedding: a closed walk, stored as the vertex and edge
/// sequences of the traversal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// A combinatorial embedding: cyclic edge order per vertex, the traced
/// faces, and the canonical outer face.
#[derive(Debug, Clone)]
pub struct PlanarEmbedding {
    pub rotations: Vec<Vec<usize>>,
    pub faces: Vec<Face>,
    /// Face id of each dart; dart `2e` traverses edge `e` from `u` to `v`.
    pub dart_face: Vec<usize>,
    pub outer: usize,
}

/// Dual graph of an embedding: one vertex per face, one edge per primal
/// edge. `v_inf` marks the outer face.
#[derive(Debug, Clone)]
pub struct DualGraph {
    pub face_count: usize,
    pub v_inf: usize,
    /// `(face, face, primal edge)` triples in primal edge order.
    pub edges: Vec<(usize, usize, usize)>,
}

/// A Hamiltonian path of the dual graph ending at `v_inf`, together with one
/// crossed primal edge per step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamPath {
    pub faces: Vec<usize>,
    pub crossed: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Vertical,
    Curved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WrappedEdge {
    pub u: String,
    pub v: String,
    pub sign: Sign,
    pub kind: EdgeKind,
    /// Nesting depth for curved edges, 0 = innermost (the closing edge of
    /// the bottom cycle).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nesting: Option<u32>,
}

/// A cluster rewritten into rows. `rows[r][c]` sits at integer coordinates
/// (row `r`, column `c`), row 0 at the bottom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WrappedForm {
    pub graph: PlumbingGraph,
    pub rows: Vec<Vec<String>>,
    pub edges: Vec<WrappedEdge>,
    pub innermost_cycle: Vec<String>,
}

impl WrappedForm {
    /// Integer grid position (row, column) of a vertex.
    pub fn coordinate(&self, id: &str) -> Option<(usize, usize)> {
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(c) = row.iter().position(|v| v == id) {
                return Some((r, c));
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// embedding machinery

fn incident_edges(g: &PlumbingGraph, v: usize) -> Vec<usize> {
    (0..g.edge_count())
        .filter(|&e| g.edges()[e].u == v || g.edges()[e].v == v)
        .collect()
}

fn rotations_for_mask(g: &PlumbingGraph, trivalent: &[usize], mask: u32) -> Vec<Vec<usize>> {
    let mut rot: Vec<Vec<usize>> = (0..g.vertex_count())
        .map(|v| incident_edges(g, v))
        .collect();
    for (k, &v) in trivalent.iter().enumerate() {
        if mask & (1 << k) != 0 {
            rot[v].swap(1, 2);
        }
    }
    rot
}

fn trace_faces(g: &PlumbingGraph, rotations: &[Vec<usize>]) -> (Vec<Face>, Vec<usize>) {
    let darts = 2 * g.edge_count();
    let mut dart_face = vec![usize::MAX; darts];
    let mut faces = Vec::new();
    for start in 0..darts {
        if dart_face[start] != usize::MAX {
            continue;
        }
        let fid = faces.len();
        let mut verts = Vec::new();
        let mut edges = Vec::new();
        let mut d = start;
        loop {
            dart_face[d] = fid;
            let e = d / 2;
            let (tail, head) = if d % 2 == 0 {
                (g.edges()[e].u, g.edges()[e].v)
            } else {
                (g.edges()[e].v, g.edges()[e].u)
            };
            verts.push(tail);
            edges.push(e);
            let rot = &rotations[head];
            let pos = rot.iter().position(|&x| x == e).expect("incident edge");
            let next_e = rot[(pos + 1) % rot.len()];
            d = if g.edges()[next_e].u == head {
                2 * next_e
            } else {
                2 * next_e + 1
            };
            if d == start {
                break;
            }
        }
        faces.push(Face {
            vertices: verts,
            edges,
        });
    }
    (faces, dart_face)
}

fn planar_face_count(g: &PlumbingGraph) -> usize {
    2 + g.edge_count() - g.vertex_count()
}

/// Counts the faces of a rotation system without materializing the walks.
fn count_faces(g: &PlumbingGraph, rotations: &[Vec<usize>], seen: &mut Vec<bool>) -> usize {
    let darts = 2 * g.edge_count();
    seen.clear();
    seen.resize(darts, false);
    let mut faces = 0;
    for start in 0..darts {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut d = start;
        loop {
            seen[d] = true;
            let e = d / 2;
            let head = if d % 2 == 0 {
                g.edges()[e].v
            } else {
                g.edges()[e].u
            };
            let rot = &rotations[head];
            let pos = rot.iter().position(|&x| x == e).expect("incident edge");
            let next_e = rot[(pos + 1) % rot.len()];
            d = if g.edges()[next_e].u == head {
                2 * next_e
            } else {
                2 * next_e + 1
            };
            if d == start {
                break;
            }
        }
    }
    faces
}

/// First planar rotation system in enumeration order, if any. Vertices of
/// valence 3 have two cyclic orders; all others have one.
fn find_planar_rotation(g: &PlumbingGraph) -> Option<Vec<Vec<usize>>> {
    let trivalent: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| g.valence(v) == 3)
        .collect();
    debug_assert!(trivalent.len() < 28, "cluster too large to embed");
    let want = planar_face_count(g);
    let base = rotations_for_mask(g, &trivalent, 0);
    let mut rot = base;
    let mut scratch = Vec::new();
    let mut prev_mask = 0u32;
    for mask in 0u32..(1u32 << trivalent.len()) {
        // toggle only the rotations whose mask bit changed
        let diff = mask ^ prev_mask;
        for (k, &v) in trivalent.iter().enumerate() {
            if diff & (1 << k) != 0 {
                rot[v].swap(1, 2);
            }
        }
        prev_mask = mask;
        if count_faces(g, &rot, &mut scratch) == want {
            return Some(rot);
        }
    }
    None
}

/// Canonical outer face: maximal boundary length, ties broken by the
/// lexicographically smallest sorted vertex-id list.
fn pick_outer(g: &PlumbingGraph, faces: &[Face]) -> usize {
    (0..faces.len())
        .min_by_key(|&f| {
            let mut ids: Vec<String> = faces[f]
                .vertices
                .iter()
                .map(|&v| g.id(v).to_string())
                .collect();
            ids.sort_unstable();
            (usize::MAX - faces[f].edges.len(), ids)
        })
        .expect("at least one face")
}

/// Computes a combinatorial embedding of a 2-connected cluster with maximal
/// valence 3, or a K3,3-subdivision certificate when none exists. The
/// certificate is not a pipeline error: an exact K3,3 is diagrammed by the
/// dedicated builder.
pub fn planar_embed(g: &PlumbingGraph) -> Result<PlanarEmbedding, WrapError> {
    let report = validate(g);
    if !report.ok {
        return Err(WrapError::Invalid(GraphError::Invalid(report)));
    }
    if !is_two_connected(g) {
        return Err(WrapError::NotTwoConnected);
    }
    match find_planar_rotation(g) {
        Some(rotations) => {
            let (faces, dart_face) = trace_faces(g, &rotations);
            let outer = pick_outer(g, &faces);
            Ok(PlanarEmbedding {
                rotations,
                faces,
                dart_face,
                outer,
            })
        }
        None => Err(WrapError::NonPlanar(k33_certificate(g))),
    }
}

/// Convenience planarity predicate for whole clusters.
pub fn is_planar(g: &PlumbingGraph) -> bool {
    find_planar_rotation(g).is_some()
}

/// Planarity of the subgraph spanned by the alive edges.
fn subgraph_planar(g: &PlumbingGraph, alive: &[bool]) -> bool {
    let n = g.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ei, e) in g.edges().iter().enumerate() {
        if alive[ei] {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
    }
    let mut comp_count = 0;
    for v in 0..n {
        if comp[v] != usize::MAX || adj[v].is_empty() {
            continue;
        }
        let mut stack = vec![v];
        comp[v] = comp_count;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = comp_count;
                    stack.push(y);
                }
            }
        }
        comp_count += 1;
    }
    for c in 0..comp_count {
        let keep: Vec<usize> = (0..n).filter(|&v| comp[v] == c).collect();
        let mut index = vec![usize::MAX; n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut sub_edges = Vec::new();
        for (ei, e) in g.edges().iter().enumerate() {
            if alive[ei] && comp[e.u] == c {
                sub_edges.push((index[e.u], index[e.v], e.sign));
            }
        }
        let vertices: Vec<Vertex> = keep
            .iter()
            .map(|&v| Vertex {
                id: g.id(v).to_string(),
                weight: g.weight(v),
            })
            .collect();
        let sub = PlumbingGraph::new(vertices, sub_edges).expect("valid subgraph");
        if find_planar_rotation(&sub).is_none() {
            return false;
        }
    }
    true
}

/// Deletion-minimal nonplanar subgraph; with valences at most 3 this is
/// always a K3,3 subdivision, reported as branch vertices plus paths.
fn k33_certificate(g: &PlumbingGraph) -> K33Certificate {
    let mut alive = vec![true; g.edge_count()];
    for ei in 0..g.edge_count() {
        alive[ei] = false;
        if subgraph_planar(g, &alive) {
            alive[ei] = true;
        }
    }
    let degree = |v: usize, alive: &[bool]| -> usize {
        g.edges()
            .iter()
            .enumerate()
            .filter(|(ei, e)| alive[*ei] && (e.u == v || e.v == v))
            .count()
    };
    let branch: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| degree(v, &alive) == 3)
        .collect();
    let mut paths = Vec::new();
    let mut used = vec![false; g.edge_count()];
    for &b in &branch {
        for (ei, e) in g.edges().iter().enumerate() {
            if !alive[ei] || used[ei] || (e.u != b && e.v != b) {
                continue;
            }
            // walk through subdivision vertices to the next branch vertex
            let mut path = vec![b];
            let mut prev = b;
            let mut cur = if e.u == b { e.v } else { e.u };
            used[ei] = true;
            while degree(cur, &alive) == 2 {
                let (next_ei, next) = g
                    .edges()
                    .iter()
                    .enumerate()
                    .find_map(|(fi, f)| {
                        if !alive[fi] || used[fi] {
                            return None;
                        }
                        if f.u == cur && f.v != prev {
                            Some((fi, f.v))
                        } else if f.v == cur && f.u != prev {
                            Some((fi, f.u))
                        } else {
                            None
                        }
                    })
                    .expect("subdivision path continues");
                used[next_ei] = true;
                path.push(cur);
                prev = cur;
                cur = next;
            }
            path.push(cur);
            paths.push(path);
        }
    }
    debug_assert_eq!(branch.len(), 6);
    debug_assert_eq!(paths.len(), 9);
    K33Certificate {
        branch_vertices: branch.iter().map(|&v| g.id(v).to_string()).collect(),
        paths: paths
            .into_iter()
            .map(|p| p.into_iter().map(|v| g.id(v).to_string()).collect())
            .collect(),
    }
}

/// Builds the dual graph of an embedding.
pub fn dual_graph(g: &PlumbingGraph, emb: &PlanarEmbedding) -> DualGraph {
    let edges = (0..g.edge_count())
        .map(|e| (emb.dart_face[2 * e], emb.dart_face[2 * e + 1], e))
        .collect();
    DualGraph {
        face_count: emb.faces.len(),
        v_inf: emb.outer,
        edges,
    }
}

fn dual_adjacency(d: &DualGraph) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); d.face_count];
    for &(a, b, _) in &d.edges {
        if a != b {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    adj
}

/// Constructive peeling: repeatedly contract a neighbor of `v_inf` into
/// `v_inf`, which forces that face to sit just before `v_inf` in the path.
fn ham_by_peeling(d: &DualGraph) -> Option<Vec<usize>> {
    fn peel(
        mut adj: Vec<BTreeSet<usize>>,
        mut alive: Vec<bool>,
        v_inf: usize,
        required: Option<usize>,
    ) -> Option<Vec<usize>> {
        let alive_count = alive.iter().filter(|&&a| a).count();
        if alive_count == 2 {
            let other = (0..alive.len()).find(|&v| alive[v] && v != v_inf)?;
            if !adj[v_inf].contains(&other) {
                return None;
            }
            if let Some(r) = required {
                if r != other {
                    return None;
                }
            }
            return Some(vec![other, v_inf]);
        }
        let v_z = match required {
            Some(r) => {
                if !adj[v_inf].contains(&r) {
                    return None;
                }
                r
            }
            None => adj[v_inf].iter().copied().find(|&v| alive[v])?,
        };
        let v_j = adj[v_z].iter().copied().find(|&v| alive[v] && v != v_inf)?;
        // contract v_z into v_inf
        alive[v_z] = false;
        let moved: Vec<usize> = adj[v_z].iter().copied().filter(|&v| v != v_inf).collect();
        for v in moved {
            adj[v].insert(v_inf);
            adj[v_inf].insert(v);
        }
        for set in adj.iter_mut() {
            set.remove(&v_z);
        }
        let mut sub = peel(adj, alive, v_inf, Some(v_j))?;
        let last = sub.pop()?;
        debug_assert_eq!(last, v_inf);
        sub.push(v_z);
        sub.push(v_inf);
        Some(sub)
    }
    if d.face_count < 2 {
        return None;
    }
    peel(dual_adjacency(d), vec![true; d.face_count], d.v_inf, None)
}

/// All Hamiltonian paths ending at `v_inf`, lazily, built backwards from
/// `v_inf` with smaller face ids tried first.
struct HamBacktrack {
    adj: Vec<BTreeSet<usize>>,
    n: usize,
    path: Vec<usize>,
    visited: Vec<bool>,
    choices: Vec<Vec<usize>>,
}

impl HamBacktrack {
    fn new(d: &DualGraph) -> Self {
        let adj = dual_adjacency(d);
        let mut it = HamBacktrack {
            n: d.face_count,
            path: vec![d.v_inf],
            visited: vec![false; d.face_count],
            choices: Vec::new(),
            adj,
        };
        it.visited[d.v_inf] = true;
        let first = it.candidates(d.v_inf);
        it.choices.push(first);
        it
    }

    fn candidates(&self, from: usize) -> Vec<usize> {
        // popped from the back, so reverse for ascending order
        self.adj[from]
            .iter()
            .copied()
            .filter(|&v| !self.visited[v])
            .rev()
            .collect()
    }
}

impl Iterator for HamBacktrack {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        while let Some(top) = self.choices.last_mut() {
            match top.pop() {
                Some(v) => {
                    self.path.push(v);
                    self.visited[v] = true;
                    if self.path.len() == self.n {
                        let mut out = self.path.clone();
                        out.reverse();
                        self.path.pop();
                        self.visited[v] = false;
                        return Some(out);
                    }
                    let next = self.candidates(v);
                    self.choices.push(next);
                }
                None => {
                    self.choices.pop();
                    if self.path.len() > 1 {
                        let v = self.path.pop().expect("nonempty");
                        self.visited[v] = false;
                    } else {
                        return None;
                    }
                }
            }
        }
        None
    }
}

fn crossed_edges(d: &DualGraph, faces: &[usize]) -> Vec<usize> {
    faces
        .windows(2)
        .map(|w| {
            d.edges
                .iter()
                .filter(|&&(a, b, _)| (a, b) == (w[0], w[1]) || (a, b) == (w[1], w[0]))
                .map(|&(_, _, e)| e)
                .min()
                .expect("consecutive path faces share an edge")
        })
        .collect()
}

/// Finds a Hamiltonian path of the dual ending at `v_inf`: constructive
/// peeling first, exhaustive backtracking as fallback. An exhausted search
/// is reported as an error so the offending graph can be kept as a fixture.
pub fn hamiltonian_path(d: &DualGraph) -> Result<HamPath, WrapError> {
    if let Some(faces) = ham_by_peeling(d) {
        let crossed = crossed_edges(d, &faces);
        return Ok(HamPath { faces, crossed });
    }
    if let Some(faces) = HamBacktrack::new(d).next() {
        let crossed = crossed_edges(d, &faces);
        return Ok(HamPath { faces, crossed });
    }
    Err(WrapError::SearchExhausted(format!(
        "dual with {} faces has no Hamiltonian path ending at the outer face",
        d.face_count
    )))
}

// ---------------------------------------------------------------------------
// wrapping

/// Walks away from `from` through bivalent vertices starting at `start`,
/// returning the visited vertices ending at the first non-bivalent one.
fn extend_chain_end<D, O>(
    start: usize,
    from: usize,
    deg: D,
    other_neighbor: O,
    limit: usize,
) -> Option<Vec<usize>>
where
    D: Fn(usize) -> usize,
    O: Fn(usize, usize) -> Option<usize>,
{
    let mut out = Vec::new();
    let mut prev = from;
    let mut cur = start;
    let mut steps = 0;
    while deg(cur) == 2 {
        let next = other_neighbor(cur, prev)?;
        out.push(cur);
        prev = cur;
        cur = next;
        steps += 1;
        if steps > limit || cur == from {
            return None; // closed a bivalent cycle
        }
    }
    out.push(cur);
    Some(out)
}

/// Maximal linear subgraph through edge `(u, v)` in an adjacency-set
/// subgraph: the full vertex path with non-bivalent anchors at both ends.
fn chain_in_adjacency(adj: &[BTreeSet<usize>], u: usize, v: usize) -> Option<Vec<usize>> {
    let deg = |x: usize| adj[x].len();
    let other = |x: usize, p: usize| adj[x].iter().copied().find(|&y| y != p);
    let limit = adj.len() + 1;
    let left = extend_chain_end(u, v, deg, other, limit)?;
    let right = extend_chain_end(v, u, deg, other, limit)?;
    let mut path: Vec<usize> = left.into_iter().rev().collect();
    path.extend(right);
    Some(path)
}

fn graph_adjacency(g: &PlumbingGraph) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); g.vertex_count()];
    for e in g.edges() {
        adj[e.u].insert(e.v);
        adj[e.v].insert(e.u);
    }
    adj
}

/// Attempts the row layout for one Hamiltonian path; the result is verified
/// with [`is_wrapped`] before being accepted.
fn layout(g: &PlumbingGraph, emb: &PlanarEmbedding, path: &HamPath) -> Option<WrappedForm> {
    let n = g.vertex_count();
    let steps = path.faces.len() - 1;
    let mut row_of = vec![usize::MAX; n];
    let mut rows: Vec<Vec<usize>> = Vec::new();

    // bottom: the full walk of the first face
    let base_walk = emb.faces[path.faces[0]].vertices.clone();
    {
        let mut dedup = base_walk.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if dedup.len() != base_walk.len() || base_walk.len() < 3 {
            return None;
        }
    }
    for &v in &base_walk {
        row_of[v] = 0;
    }
    rows.push(base_walk.clone());

    // each later bounded face contributes its unseen vertices as a row
    for step in 1..steps {
        let walk = &emb.faces[path.faces[step]].vertices;
        let k = walk.len();
        let is_new = |p: usize| row_of[walk[p]] == usize::MAX;
        let mut start = None;
        for p in 0..k {
            if is_new(p) && !is_new((p + k - 1) % k) {
                let better = match start {
                    None => true,
                    Some(q) => g.id(walk[p]) < g.id(walk[q]),
                };
                if better {
                    start = Some(p);
                }
            }
        }
        let mut row = Vec::new();
        if let Some(s) = start {
            for off in 0..k {
                let p = (s + off) % k;
                if is_new(p) {
                    row.push(walk[p]);
                }
            }
        } else if walk.iter().any(|&v| row_of[v] == usize::MAX) {
            return None; // new vertices but no anchor to hang them on
        }
        if !row.is_empty() {
            for &v in &row {
                row_of[v] = rows.len();
            }
            rows.push(row);
        }
    }
    if row_of.contains(&usize::MAX) {
        return None;
    }

    // one curved edge per crossed chain, nesting from the inside out; each
    // curved endpoint threads a 1-handle downstream, so keep at most two per
    // vertex by steering the choice to the less loaded anchor
    let full_adj = graph_adjacency(g);
    let mut load = vec![0u32; n];
    let mut curved: Vec<(usize, u32)> = Vec::new();
    for i in (1..steps).rev() {
        let nesting = (steps - i) as u32;
        let e = &g.edges()[path.crossed[i]];
        let chain = chain_in_adjacency(&full_adj, e.u, e.v)?;
        let (a, b) = (chain[0], *chain.last().unwrap());
        let edge_id = if chain.len() == 2 {
            g.edge_between(a, b)?
        } else {
            let key = |x: usize| (load[x], g.id(x).to_string());
            if key(a) <= key(b) {
                g.edge_between(a, chain[1])?
            } else {
                g.edge_between(chain[chain.len() - 2], b)?
            }
        };
        load[g.edges()[edge_id].u] += 1;
        load[g.edges()[edge_id].v] += 1;
        curved.push((edge_id, nesting));
    }

    // closing edge of the bottom cycle: least loaded endpoints, then ids
    let k = base_walk.len();
    let base_edges: Vec<usize> = (0..k)
        .map(|i| {
            g.edge_between(base_walk[i], base_walk[(i + 1) % k])
                .expect("face walk follows edges")
        })
        .collect();
    let gamma = base_edges
        .iter()
        .copied()
        .min_by_key(|&ei| {
            let e = &g.edges()[ei];
            let mut ids = [g.id(e.u).to_string(), g.id(e.v).to_string()];
            ids.sort();
            (load[e.u].max(load[e.v]), load[e.u].min(load[e.v]), ids)
        })
        .expect("base cycle nonempty");
    load[g.edges()[gamma].u] += 1;
    load[g.edges()[gamma].v] += 1;
    if load.iter().any(|&l| l > 2) {
        return None;
    }
    curved.push((gamma, 0));

    // rotate/orient the bottom row so gamma closes last back to first, with
    // the smaller-id endpoint of gamma first
    let (gu, gv) = (g.edges()[gamma].u, g.edges()[gamma].v);
    let pos_u = base_walk.iter().position(|&x| x == gu).unwrap();
    let first = if g.id(gu) <= g.id(gv) { gu } else { gv };
    let forward_puts_gv_before_gu =
        (pos_u + k - 1) % k == base_walk.iter().position(|&x| x == gv).unwrap();
    let mut row0 = Vec::with_capacity(k);
    // walk the cycle starting at `first`, moving away from gamma
    let start_pos = base_walk.iter().position(|&x| x == first).unwrap();
    let away_forward = if first == gu {
        forward_puts_gv_before_gu
    } else {
        !forward_puts_gv_before_gu
    };
    for off in 0..k {
        let p = if away_forward {
            (start_pos + off) % k
        } else {
            (start_pos + k - off % k) % k
        };
        row0.push(base_walk[p]);
    }
    if *row0.last().unwrap() != if first == gu { gv } else { gu } {
        return None;
    }
    rows[0] = row0;

    // classify
    let mut kind = vec![EdgeKind::Vertical; g.edge_count()];
    let mut nesting = vec![None; g.edge_count()];
    for row in &rows {
        for pair in row.windows(2) {
            if let Some(e) = g.edge_between(pair[0], pair[1]) {
                kind[e] = EdgeKind::Horizontal;
            }
        }
    }
    for &(e, nst) in &curved {
        kind[e] = EdgeKind::Curved;
        nesting[e] = Some(nst);
    }

    let wrapped = WrappedForm {
        graph: g.clone(),
        rows: rows
            .iter()
            .map(|row| row.iter().map(|&v| g.id(v).to_string()).collect())
            .collect(),
        edges: g
            .edges()
            .iter()
            .enumerate()
            .map(|(ei, e)| WrappedEdge {
                u: g.id(e.u).to_string(),
                v: g.id(e.v).to_string(),
                sign: e.sign,
                kind: kind[ei],
                nesting: nesting[ei],
            })
            .collect(),
        innermost_cycle: rows[0].iter().map(|&v| g.id(v).to_string()).collect(),
    };
    if is_wrapped(&wrapped) {
        Some(wrapped)
    } else {
        None
    }
}

/// Candidate unbounded regions: the canonical outer face first, then every
/// other face in id order. Isotoping the drawing through the point at
/// infinity makes any face the unbounded one, and some graphs have no
/// Hamiltonian dual path ending at the longest face.
pub fn outer_face_candidates(d: &DualGraph) -> Vec<usize> {
    let mut order = vec![d.v_inf];
    order.extend((0..d.face_count).filter(|&f| f != d.v_inf));
    order
}

/// Rewrites a 2-connected planar cluster into wrapped-up form. Nonplanar
/// clusters surface their K3,3 certificate.
pub fn wrap(g: &PlumbingGraph) -> Result<WrappedForm, WrapError> {
    let emb = planar_embed(g)?;
    let base = dual_graph(g, &emb);
    for root in outer_face_candidates(&base) {
        let dual = DualGraph {
            v_inf: root,
            ..base.clone()
        };
        if let Some(faces) = ham_by_peeling(&dual) {
            let crossed = crossed_edges(&dual, &faces);
            if let Some(w) = layout(g, &emb, &HamPath { faces, crossed }) {
                return Ok(w);
            }
        }
        for faces in HamBacktrack::new(&dual) {
            let crossed = crossed_edges(&dual, &faces);
            if let Some(w) = layout(g, &emb, &HamPath { faces, crossed }) {
                return Ok(w);
            }
        }
    }
    Err(WrapError::SearchExhausted(
        serde_json::to_string(g).unwrap_or_default(),
    ))
}

/// Why a wrapped form is rejected, or `None` if it is valid.
pub fn wrapped_violation(w: &WrappedForm) -> Option<String> {
    let g = &w.graph;
    let n = g.vertex_count();

    // rows partition the vertex set
    let mut row_of = vec![usize::MAX; n];
    for (r, row) in w.rows.iter().enumerate() {
        for id in row {
            let Some(v) = g.index_of(id) else {
                return Some(format!("row vertex `{id}` not in graph"));
            };
            if row_of[v] != usize::MAX {
                return Some(format!("vertex `{id}` appears in two rows"));
            }
            row_of[v] = r;
        }
    }
    if row_of.contains(&usize::MAX) {
        return Some("some vertex missing from the rows".into());
    }

    // classified edges match the graph's signed edge multiset
    if w.edges.len() != g.edge_count() {
        return Some("edge count mismatch".into());
    }
    let mut seen = vec![false; g.edge_count()];
    let mut kind = vec![EdgeKind::Vertical; g.edge_count()];
    let mut nesting: Vec<Option<u32>> = vec![None; g.edge_count()];
    for we in &w.edges {
        let (Some(u), Some(v)) = (g.index_of(&we.u), g.index_of(&we.v)) else {
            return Some(format!("edge endpoint `{}`/`{}` not in graph", we.u, we.v));
        };
        let Some(ei) = g.edge_between(u, v) else {
            return Some(format!("edge {}-{} not in graph", we.u, we.v));
        };
        if seen[ei] {
            return Some(format!("edge {}-{} classified twice", we.u, we.v));
        }
        if g.edges()[ei].sign != we.sign {
            return Some(format!("edge {}-{} sign mismatch", we.u, we.v));
        }
        seen[ei] = true;
        kind[ei] = we.kind;
        nesting[ei] = we.nesting;
        match (we.kind, we.nesting) {
            (EdgeKind::Curved, Some(_)) => {}
            (EdgeKind::Curved, None) => return Some("curved edge without nesting".into()),
            (_, Some(_)) => return Some("nesting on a non-curved edge".into()),
            (_, None) => {}
        }
    }
    if seen.iter().any(|&s| !s) {
        return Some("some graph edge left unclassified".into());
    }

    // curved count = cycle rank, nesting values = 0..rank
    let rank = g.cycle_rank();
    if rank < 1 {
        return Some("cluster must contain a cycle".into());
    }
    let mut curved: Vec<(u32, usize)> = (0..g.edge_count())
        .filter(|&e| kind[e] == EdgeKind::Curved)
        .map(|e| (nesting[e].unwrap(), e))
        .collect();
    curved.sort_unstable();
    if curved.len() as i64 != rank {
        return Some(format!(
            "curved edge count {} differs from cycle rank {rank}",
            curved.len()
        ));
    }
    for (expect, &(nst, _)) in curved.iter().enumerate() {
        if nst as usize != expect {
            return Some("curved nesting values are not 0..rank".into());
        }
    }

    // bottom cycle: a horizontal path closed by the nesting-0 curved edge
    let row0: Vec<usize> = w.rows[0].iter().map(|id| g.index_of(id).unwrap()).collect();
    if row0.len() < 3 {
        return Some("bottom row shorter than a cycle".into());
    }
    for pair in row0.windows(2) {
        match g.edge_between(pair[0], pair[1]) {
            Some(e) if kind[e] == EdgeKind::Horizontal => {}
            _ => return Some("bottom row is not a horizontal path".into()),
        }
    }
    let gamma = curved[0].1;
    {
        let e = &g.edges()[gamma];
        let ends = [row0[0], *row0.last().unwrap()];
        if !(ends.contains(&e.u) && ends.contains(&e.v)) {
            return Some("innermost curved edge does not close the bottom row".into());
        }
    }
    let cycle_ids: Vec<String> = row0.iter().map(|&v| g.id(v).to_string()).collect();
    if w.innermost_cycle != cycle_ids {
        return Some("recorded innermost cycle differs from the bottom row".into());
    }

    // peel the curved edges back off, innermost chain first; each peeled
    // chain interior must be the topmost remaining row
    let mut adj = graph_adjacency(g);
    let mut pending: Vec<Vec<usize>> = w.rows[1..]
        .iter()
        .map(|row| row.iter().map(|id| g.index_of(id).unwrap()).collect())
        .collect();
    for &(_, ce) in curved.iter().skip(1) {
        let e = &g.edges()[ce];
        if !adj[e.u].contains(&e.v) {
            return Some("curved edge already consumed while peeling".into());
        }
        let Some(chain) = chain_in_adjacency(&adj, e.u, e.v) else {
            return Some("curved edge lies on a closed bivalent cycle".into());
        };
        let (a, b) = (chain[0], *chain.last().unwrap());
        if adj[a].len() != 3 || adj[b].len() != 3 {
            return Some("peeled chain does not end at trivalent anchors".into());
        }
        let interior = &chain[1..chain.len() - 1];
        if !interior.is_empty() {
            let Some(top) = pending.pop() else {
                return Some("more nonempty chains than rows".into());
            };
            let rev: Vec<usize> = top.iter().rev().copied().collect();
            if interior != top.as_slice() && interior != rev.as_slice() {
                return Some("peeled chain interior does not match the top row".into());
            }
        }
        for pair in chain.windows(2) {
            adj[pair[0]].remove(&pair[1]);
            adj[pair[1]].remove(&pair[0]);
        }
        for &v in interior {
            adj[v].clear();
        }
    }
    if !pending.is_empty() {
        return Some("rows left over after peeling all curved edges".into());
    }

    // what remains must be exactly the bottom cycle
    let mut remaining: Vec<(usize, usize)> = Vec::new();
    for (v, set) in adj.iter().enumerate() {
        for &u in set {
            if v < u {
                remaining.push((v, u));
            }
        }
    }
    let mut expect: Vec<(usize, usize)> = row0
        .windows(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    {
        let e = &g.edges()[gamma];
        expect.push((e.u.min(e.v), e.u.max(e.v)));
    }
    remaining.sort_unstable();
    expect.sort_unstable();
    if remaining != expect {
        return Some("peeling does not terminate at the bottom cycle".into());
    }
    None
}

/// True iff all wrapped-form invariants hold: same graph data, total edge
/// classification, curved count = cycle rank, and the peeling replay (the
/// dual-path condition) succeeds.
pub fn is_wrapped(w: &WrappedForm) -> bool {
    wrapped_violation(w).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> PlumbingGraph {
        PlumbingGraph::parse(text).unwrap()
    }

    fn fig5() -> PlumbingGraph {
        parse(include_str!("../tests/fixtures/fig5.plumb"))
    }

    fn theta() -> PlumbingGraph {
        parse(include_str!("../tests/fixtures/theta.plumb"))
    }

    fn cycle() -> PlumbingGraph {
        parse(include_str!("../tests/fixtures/cycle.plumb"))
    }

    fn k33() -> PlumbingGraph {
        parse(include_str!("../tests/fixtures/k33_plus.plumb"))
    }

    #[test]
    fn cycle_embeds_with_two_faces() {
        let emb = planar_embed(&cycle()).unwrap();
        assert_eq!(emb.faces.len(), 2);
    }

    #[test]
    fn fig5_embeds_with_four_faces() {
        let emb = planar_embed(&fig5()).unwrap();
        assert_eq!(emb.faces.len(), 4);
    }

    #[test]
    fn k33_is_nonplanar_with_certificate() {
        match planar_embed(&k33()) {
            Err(WrapError::NonPlanar(cert)) => {
                assert_eq!(cert.branch_vertices.len(), 6);
                assert_eq!(cert.paths.len(), 9);
            }
            other => panic!("expected a K3,3 certificate, got {other:?}"),
        }
    }

    #[test]
    fn subdivided_k33_is_nonplanar() {
        let mut text = String::new();
        for v in ["u1", "u2", "u3", "v1", "v2", "v3"] {
            text.push_str(&format!("vertex {v} -3\n"));
        }
        text.push_str("vertex m -2\nedge u1 m\nedge m v1\n");
        for (a, b) in [
            ("u1", "v2"),
            ("u1", "v3"),
            ("u2", "v1"),
            ("u2", "v2"),
            ("u2", "v3"),
            ("u3", "v1"),
            ("u3", "v2"),
            ("u3", "v3"),
        ] {
            text.push_str(&format!("edge {a} {b}\n"));
        }
        let g = parse(&text);
        match planar_embed(&g) {
            Err(WrapError::NonPlanar(cert)) => {
                assert!(cert.paths.iter().any(|p| p.len() == 3));
            }
            other => panic!("expected nonplanar, got {other:?}"),
        }
    }

    #[test]
    fn dual_of_cycle() {
        let g = cycle();
        let emb = planar_embed(&g).unwrap();
        let d = dual_graph(&g, &emb);
        assert_eq!(d.face_count, 2);
        assert_eq!(d.edges.len(), 4); // parallel dual edges, one per primal
    }

    #[test]
    fn dual_of_theta_has_three_faces() {
        let g = theta();
        let emb = planar_embed(&g).unwrap();
        let d = dual_graph(&g, &emb);
        assert_eq!(d.face_count, 3);
    }

    #[test]
    fn ham_path_cycle() {
        let g = cycle();
        let emb = planar_embed(&g).unwrap();
        let d = dual_graph(&g, &emb);
        let p = hamiltonian_path(&d).unwrap();
        assert_eq!(p.faces.len(), 2);
        assert_eq!(*p.faces.last().unwrap(), d.v_inf);
    }

    #[test]
    fn ham_path_theta_and_fig5() {
        for g in [theta(), fig5()] {
            let emb = planar_embed(&g).unwrap();
            let d = dual_graph(&g, &emb);
            let p = hamiltonian_path(&d).unwrap();
            assert_eq!(p.faces.len(), d.face_count);
            assert_eq!(*p.faces.last().unwrap(), d.v_inf);
            assert_eq!(p.crossed.len(), d.face_count - 1);
            let mut seen = p.faces.clone();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), d.face_count);
        }
    }

    #[test]
    fn backtrack_finds_peeled_path() {
        let g = theta();
        let emb = planar_embed(&g).unwrap();
        let d = dual_graph(&g, &emb);
        let peeled = ham_by_peeling(&d).unwrap();
        let all: Vec<Vec<usize>> = HamBacktrack::new(&d).collect();
        assert!(all.contains(&peeled));
        for p in &all {
            assert_eq!(*p.last().unwrap(), d.v_inf);
        }
    }

    #[test]
    fn wrap_cycle_single_row() {
        let w = wrap(&cycle()).unwrap();
        assert_eq!(w.rows.len(), 1);
        assert_eq!(w.rows[0].len(), 4);
        let curved = w
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Curved)
            .count();
        assert_eq!(curved, 1);
        assert!(is_wrapped(&w));
    }

    #[test]
    fn wrap_theta() {
        let w = wrap(&theta()).unwrap();
        assert_eq!(w.rows.len(), 2);
        let curved = w
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Curved)
            .count();
        assert_eq!(curved, 2);
        assert!(is_wrapped(&w));
    }

    #[test]
    fn wrap_fig5_three_curved() {
        let w = wrap(&fig5()).unwrap();
        let curved = w
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Curved)
            .count();
        assert_eq!(curved, 3);
        assert!(is_wrapped(&w));
    }

    #[test]
    fn wrap_preserves_multisets() {
        for g in [cycle(), theta(), fig5()] {
            let w = wrap(&g).unwrap();
            let mut row_ids: Vec<&String> = w.rows.iter().flatten().collect();
            row_ids.sort_unstable();
            let mut graph_ids: Vec<String> = g.vertices().iter().map(|v| v.id.clone()).collect();
            graph_ids.sort_unstable();
            assert_eq!(
                row_ids.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                graph_ids.iter().map(|s| s.as_str()).collect::<Vec<_>>()
            );
            assert_eq!(w.edges.len(), g.edge_count());
        }
    }

    #[test]
    fn deleting_a_curved_edge_breaks_wrapping() {
        let mut w = wrap(&fig5()).unwrap();
        let pos = w
            .edges
            .iter()
            .position(|e| e.kind == EdgeKind::Curved)
            .unwrap();
        w.edges[pos].kind = EdgeKind::Vertical;
        w.edges[pos].nesting = None;
        assert!(!is_wrapped(&w));
    }

    #[test]
    fn swapping_rows_breaks_wrapping() {
        let mut w = wrap(&fig5()).unwrap();
        assert!(w.rows.len() >= 3, "fixture should wrap into three rows");
        w.rows.swap(1, 2);
        assert!(!is_wrapped(&w));
    }

    #[test]
    fn wrap_reroots_when_the_longest_face_has_no_path() {
        // in this cluster no Hamiltonian dual path ends at the canonical
        // (longest-boundary) outer face; an isotopy through infinity must
        // reroot to another face
        let g = parse(include_str!("../tests/fixtures/reroot.plumb"));
        let emb = planar_embed(&g).unwrap();
        let d = dual_graph(&g, &emb);
        assert!(ham_by_peeling(&d).is_none());
        assert!(HamBacktrack::new(&d).next().is_none());
        let w = wrap(&g).unwrap();
        assert!(is_wrapped(&w));
        let curved = w
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Curved)
            .count() as i64;
        assert_eq!(curved, g.cycle_rank());
    }

    #[test]
    fn wrap_is_deterministic() {
        let a = serde_json::to_string(&wrap(&fig5()).unwrap()).unwrap();
        let b = serde_json::to_string(&wrap(&fig5()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
