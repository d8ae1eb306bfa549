//! Decorated plumbing graphs: parsing, validation, torus classes, and
//! cluster/tree decomposition.
//!
//! A plumbing graph has vertices weighted by negative integers and edges
//! decorated with a sign. Vertices keep their input order throughout; every
//! matrix and serialization is indexed in that order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Edge decoration (also reused for basic-slice signs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub weight: i64,
}

/// Undirected edge between vertex indices, `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub sign: Sign,
}

/// A decorated plumbing graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlumbingGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate vertex id `{id}`")]
    DuplicateVertex { line: usize, id: String },
    #[error("line {line}: edge endpoint `{id}` is not a declared vertex")]
    DanglingEndpoint { line: usize, id: String },
    #[error("line {line}: weight must be a strictly negative integer")]
    BadWeight { line: usize },
    #[error("line {line}: self-loops are not allowed")]
    SelfLoop { line: usize },
    #[error("line {line}: duplicate edge between `{a}` and `{b}`")]
    MultiEdge { line: usize, a: String, b: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex ids must be unique (`{0}` repeats)")]
    DuplicateVertex(String),
    #[error("edge endpoint index {0} out of range")]
    BadEndpoint(usize),
    #[error("self-loops are not allowed")]
    SelfLoop,
    #[error("multi-edges are not allowed")]
    MultiEdge,
    #[error("weight of `{0}` must be strictly negative")]
    BadWeight(String),
    #[error("graph does not satisfy the validation report: {0:?}")]
    Invalid(ValidationReport),
}

impl PlumbingGraph {
    /// Builds a graph from parts, rejecting duplicate ids, dangling or
    /// repeated edges, self-loops, and non-negative weights.
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<(usize, usize, Sign)>,
    ) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.id.clone()) {
                return Err(GraphError::DuplicateVertex(v.id.clone()));
            }
            if v.weight >= 0 {
                return Err(GraphError::BadWeight(v.id.clone()));
            }
        }
        let mut norm = Vec::with_capacity(edges.len());
        let mut edge_set = BTreeSet::new();
        for (a, b, sign) in edges {
            if a >= vertices.len() {
                return Err(GraphError::BadEndpoint(a));
            }
            if b >= vertices.len() {
                return Err(GraphError::BadEndpoint(b));
            }
            if a == b {
                return Err(GraphError::SelfLoop);
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !edge_set.insert((u, v)) {
                return Err(GraphError::MultiEdge);
            }
            norm.push(Edge { u, v, sign });
        }
        Ok(PlumbingGraph {
            vertices,
            edges: norm,
        })
    }

    /// Parses the line-oriented graph file format:
    /// `vertex <id> <weight>`, `edge <id1> <id2> [+|-]`, `#` comments.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut vertices: Vec<Vertex> = Vec::new();
        let mut edges: Vec<(usize, usize, Sign)> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut edge_set = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tok = content.split_whitespace();
            match tok.next() {
                Some("vertex") => {
                    let id = tok.next().ok_or_else(|| ParseError::Syntax {
                        line,
                        msg: "expected `vertex <id> <weight>`".into(),
                    })?;
                    let weight: i64 = tok
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or(ParseError::BadWeight { line })?;
                    if weight >= 0 {
                        return Err(ParseError::BadWeight { line });
                    }
                    if tok.next().is_some() {
                        return Err(ParseError::Syntax {
                            line,
                            msg: "trailing tokens after vertex declaration".into(),
                        });
                    }
                    if index.insert(id.to_string(), vertices.len()).is_some() {
                        return Err(ParseError::DuplicateVertex {
                            line,
                            id: id.to_string(),
                        });
                    }
                    vertices.push(Vertex {
                        id: id.to_string(),
                        weight,
                    });
                }
                Some("edge") => {
                    let a = tok.next().ok_or_else(|| ParseError::Syntax {
                        line,
                        msg: "expected `edge <id1> <id2> [+|-]`".into(),
                    })?;
                    let b = tok.next().ok_or_else(|| ParseError::Syntax {
                        line,
                        msg: "expected `edge <id1> <id2> [+|-]`".into(),
                    })?;
                    let sign = match tok.next() {
                        None => Sign::Plus,
                        Some("+") => Sign::Plus,
                        Some("-") => Sign::Minus,
                        Some(other) => {
                            return Err(ParseError::Syntax {
                                line,
                                msg: format!("unknown edge sign `{other}`"),
                            })
                        }
                    };
                    if tok.next().is_some() {
                        return Err(ParseError::Syntax {
                            line,
                            msg: "trailing tokens after edge declaration".into(),
                        });
                    }
                    let &ai = index.get(a).ok_or_else(|| ParseError::DanglingEndpoint {
                        line,
                        id: a.to_string(),
                    })?;
                    let &bi = index.get(b).ok_or_else(|| ParseError::DanglingEndpoint {
                        line,
                        id: b.to_string(),
                    })?;
                    if ai == bi {
                        return Err(ParseError::SelfLoop { line });
                    }
                    let key = (ai.min(bi), ai.max(bi));
                    if !edge_set.insert(key) {
                        return Err(ParseError::MultiEdge {
                            line,
                            a: a.to_string(),
                            b: b.to_string(),
                        });
                    }
                    edges.push((ai, bi, sign));
                }
                Some(other) => {
                    return Err(ParseError::Syntax {
                        line,
                        msg: format!("unknown directive `{other}`"),
                    })
                }
                None => unreachable!(),
            }
        }
        PlumbingGraph::new(vertices, edges).map_err(|e| ParseError::Syntax {
            line: 0,
            msg: e.to_string(),
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.vertices[i].id
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.vertices[i].weight
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    /// Neighbor indices in edge-list order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.u == i {
                out.push(e.v);
            } else if e.v == i {
                out.push(e.u);
            }
        }
        out
    }

    pub fn valence(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.u == i || e.v == i).count()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edges.iter().position(|e| (e.u, e.v) == key)
    }

    /// E - V + 1 for connected graphs; the number of independent cycles.
    pub fn cycle_rank(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for n in self.neighbors(v) {
                if !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Extracts the subgraph induced by `keep` (indices into self), keeping
    /// relative vertex order and all edges with both endpoints kept.
    pub fn induced(&self, keep: &[usize]) -> PlumbingGraph {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::with_capacity(keep.len());
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
            vertices.push(self.vertices[old].clone());
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| map[e.u] != usize::MAX && map[e.v] != usize::MAX)
            .map(|e| Edge {
                u: map[e.u].min(map[e.v]),
                v: map[e.u].max(map[e.v]),
                sign: e.sign,
            })
            .collect();
        PlumbingGraph { vertices, edges }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// The negative of the weight is smaller than the valence.
    BadVertex,
    /// Valence is 4 or more; such plumbings are out of scope.
    ValenceExceeded,
    Disconnected,
    LoopOrMultiEdge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub vertex: Option<String>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

/// Checks connectivity, valence <= 3, and -weight >= valence at every vertex.
pub fn validate(g: &PlumbingGraph) -> ValidationReport {
    let mut violations = Vec::new();
    // Self-loops and multi-edges are rejected at parse time; report them
    // anyway for graphs assembled through other routes.
    let mut pair_seen = BTreeSet::new();
    for e in g.edges() {
        if e.u == e.v || !pair_seen.insert((e.u, e.v)) {
            violations.push(Violation {
                vertex: Some(g.id(e.u).to_string()),
                kind: ViolationKind::LoopOrMultiEdge,
            });
        }
    }
    for i in 0..g.vertex_count() {
        let val = g.valence(i);
        if val > 3 {
            violations.push(Violation {
                vertex: Some(g.id(i).to_string()),
                kind: ViolationKind::ValenceExceeded,
            });
        }
        if -(g.weight(i)) < val as i64 {
            violations.push(Violation {
                vertex: Some(g.id(i).to_string()),
                kind: ViolationKind::BadVertex,
            });
        }
    }
    if !g.is_connected() {
        let vertex = if g.vertex_count() == 0 {
            None
        } else {
            // name the first vertex unreachable from vertex 0
            let mut seen = vec![false; g.vertex_count()];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for n in g.neighbors(v) {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
            seen.iter().position(|s| !s).map(|i| g.id(i).to_string())
        };
        violations.push(Violation {
            vertex,
            kind: ViolationKind::Disconnected,
        });
    }
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

fn require_valid(g: &PlumbingGraph) -> Result<(), GraphError> {
    let report = validate(g);
    if report.ok {
        Ok(())
    } else {
        Err(GraphError::Invalid(report))
    }
}

/// One isotopy class of incompressible tori: a maximal linear path whose
/// endpoints are trivalent and whose interior vertices are bivalent. The two
/// endpoints may coincide (a cycle hanging at a single trivalent vertex).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusClass {
    pub path: Vec<String>,
}

/// Enumerates torus classes, sorted by their canonical vertex-id paths.
pub fn torus_classes(g: &PlumbingGraph) -> Result<Vec<TorusClass>, GraphError> {
    require_valid(g)?;
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    for start in 0..g.vertex_count() {
        if g.valence(start) != 3 {
            continue;
        }
        for first in g.neighbors(start) {
            // walk through bivalent vertices until a non-bivalent vertex
            let mut path = vec![start, first];
            let (mut prev, mut cur) = (start, first);
            while g.valence(cur) == 2 {
                let next = g
                    .neighbors(cur)
                    .into_iter()
                    .find(|&n| n != prev)
                    .expect("bivalent vertex has two neighbors");
                prev = cur;
                cur = next;
                path.push(cur);
            }
            if g.valence(cur) != 3 {
                continue; // dead end at a leaf
            }
            let rev: Vec<usize> = path.iter().rev().copied().collect();
            found.insert(if rev < path { rev } else { path });
        }
    }
    Ok(found
        .into_iter()
        .map(|p| TorusClass {
            path: p.into_iter().map(|i| g.id(i).to_string()).collect(),
        })
        .collect())
}

/// Edge sets of the biconnected components, via the classic DFS edge-stack
/// algorithm. Components with a single edge are bridges.
fn biconnected_edge_components(g: &PlumbingGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut comps = Vec::new();
    if n == 0 {
        return comps;
    }
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (ei, e) in g.edges().iter().enumerate() {
        adj[e.u].push((e.v, ei));
        adj[e.v].push((e.u, ei));
    }
    let mut num = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut counter = 0usize;
    let mut edge_stack: Vec<usize> = Vec::new();
    // iterative DFS: (vertex, parent edge, next adjacency position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if num[root] != usize::MAX {
            continue;
        }
        num[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (v, pe, ref mut pos)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let (w, ei) = adj[v][*pos];
                *pos += 1;
                if ei == pe {
                    continue;
                }
                if num[w] == usize::MAX {
                    edge_stack.push(ei);
                    num[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push((w, ei, 0));
                } else if num[w] < num[v] {
                    // back edge to an ancestor
                    edge_stack.push(ei);
                    low[v] = low[v].min(num[w]);
                }
            } else {
                stack.pop();
                if let Some(&mut (parent, _, _)) = stack.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] >= num[parent] {
                        // pop everything up to and including the tree edge
                        // parent -> v; that slice is one component
                        let mut comp = Vec::new();
                        loop {
                            let top = edge_stack.pop().expect("tree edge on the stack");
                            comp.push(top);
                            if top == pe {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        comps.push(comp);
                    }
                }
            }
        }
        debug_assert!(edge_stack.is_empty(), "all components popped at the root");
    }
    comps.sort();
    comps
}

/// True if the (connected) graph stays connected after removing any single
/// vertex, and it has at least one cycle.
pub fn is_two_connected(g: &PlumbingGraph) -> bool {
    g.vertex_count() >= 3
        && g.is_connected()
        && biconnected_edge_components(g).len() == 1
        && g.cycle_rank() >= 1
}

/// A cycle-containing 2-connected piece of the decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPart {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, Sign)>,
}

/// A tree piece, attached to at most one anchor vertex elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePart {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, Sign)>,
    /// `(root, host)`: `root` is the tree vertex adjacent to `host`, which
    /// lives on a cluster or connector. Absent when the whole graph is a tree.
    pub attachment: Option<(String, String)>,
}

/// A tree of bridges joining two or more clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectorPart {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, Sign)>,
    pub cluster_vertices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub clusters: Vec<ClusterPart>,
    pub trees: Vec<TreePart>,
    pub connectors: Vec<ConnectorPart>,
}

/// Splits a valid graph into cycle-containing clusters, emanating trees, and
/// inter-cluster connectors. Every edge lands in exactly one part.
pub fn decompose(g: &PlumbingGraph) -> Result<Decomposition, GraphError> {
    require_valid(g)?;
    let comps = biconnected_edge_components(g);
    let mut edge_part = vec![usize::MAX; g.edge_count()]; // cluster index or MAX
    let mut clusters = Vec::new();
    let mut in_cluster = vec![false; g.vertex_count()];
    for comp in &comps {
        if comp.len() < 2 {
            continue;
        }
        let ci = clusters.len();
        let mut verts = BTreeSet::new();
        for &ei in comp {
            edge_part[ei] = ci;
            verts.insert(g.edges()[ei].u);
            verts.insert(g.edges()[ei].v);
        }
        let mut ordered: Vec<usize> = verts.into_iter().collect();
        ordered.sort_unstable();
        for &v in &ordered {
            in_cluster[v] = true;
        }
        clusters.push(ClusterPart {
            vertices: ordered.iter().map(|&v| g.id(v).to_string()).collect(),
            edges: comp
                .iter()
                .map(|&ei| {
                    let e = &g.edges()[ei];
                    (g.id(e.u).to_string(), g.id(e.v).to_string(), e.sign)
                })
                .collect(),
        });
    }
    clusters.sort_by(|a, b| a.vertices.cmp(&b.vertices));

    // Group the remaining bridge edges into connected pieces.
    let bridge_edges: Vec<usize> = (0..g.edge_count())
        .filter(|&ei| edge_part[ei] == usize::MAX)
        .collect();
    let mut piece_of = vec![usize::MAX; g.edge_count()];
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    for &start in &bridge_edges {
        if piece_of[start] != usize::MAX {
            continue;
        }
        let pi = pieces.len();
        let mut queue = vec![start];
        piece_of[start] = pi;
        let mut members = Vec::new();
        while let Some(ei) = queue.pop() {
            members.push(ei);
            let e = &g.edges()[ei];
            for end in [e.u, e.v] {
                // bridge pieces never continue through cluster vertices
                if in_cluster[end] {
                    continue;
                }
                for &other in &bridge_edges {
                    if piece_of[other] == usize::MAX {
                        let o = &g.edges()[other];
                        if o.u == end || o.v == end {
                            piece_of[other] = pi;
                            queue.push(other);
                        }
                    }
                }
            }
        }
        members.sort_unstable();
        pieces.push(members);
    }

    let mut trees = Vec::new();
    let mut connectors = Vec::new();
    for piece in pieces {
        let mut verts = BTreeSet::new();
        for &ei in &piece {
            verts.insert(g.edges()[ei].u);
            verts.insert(g.edges()[ei].v);
        }
        let anchors: Vec<usize> = verts.iter().copied().filter(|&v| in_cluster[v]).collect();
        let loose: Vec<usize> = verts.iter().copied().filter(|&v| !in_cluster[v]).collect();
        let edges: Vec<(String, String, Sign)> = piece
            .iter()
            .map(|&ei| {
                let e = &g.edges()[ei];
                (g.id(e.u).to_string(), g.id(e.v).to_string(), e.sign)
            })
            .collect();
        if anchors.len() >= 2 {
            connectors.push(ConnectorPart {
                vertices: loose.iter().map(|&v| g.id(v).to_string()).collect(),
                edges,
                cluster_vertices: anchors.iter().map(|&v| g.id(v).to_string()).collect(),
            });
        } else {
            let attachment = anchors.first().map(|&host| {
                let root = piece
                    .iter()
                    .map(|&ei| &g.edges()[ei])
                    .find_map(|e| {
                        if e.u == host {
                            Some(e.v)
                        } else if e.v == host {
                            Some(e.u)
                        } else {
                            None
                        }
                    })
                    .expect("anchor touches some bridge edge");
                (g.id(root).to_string(), g.id(host).to_string())
            });
            trees.push(TreePart {
                vertices: loose.iter().map(|&v| g.id(v).to_string()).collect(),
                edges,
                attachment,
            });
        }
    }
    trees.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    connectors.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(Decomposition {
        clusters,
        trees,
        connectors,
    })
}

/// Plumbing intersection form: weights on the diagonal, edge signs off it.
/// Rows and columns follow the input vertex order.
pub fn intersection_matrix(g: &PlumbingGraph) -> Result<Vec<Vec<i64>>, GraphError> {
    require_valid(g)?;
    let n = g.vertex_count();
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = g.weight(i);
    }
    for e in g.edges() {
        m[e.u][e.v] = e.sign.as_i64();
        m[e.v][e.u] = e.sign.as_i64();
    }
    Ok(m)
}

/// Extracts each cluster of the decomposition as a standalone graph,
/// preserving input vertex order.
pub fn cluster_graphs(g: &PlumbingGraph, d: &Decomposition) -> Vec<PlumbingGraph> {
    d.clusters
        .iter()
        .map(|c| {
            let keep: Vec<usize> = (0..g.vertex_count())
                .filter(|&i| c.vertices.iter().any(|id| id == g.id(i)))
                .collect();
            g.induced(&keep)
        })
        .collect()
}
