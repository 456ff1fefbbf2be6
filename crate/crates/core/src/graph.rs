//! Combinatorial model of a semiplanar graph: a simple graph together with a
//! rotation system (cyclic neighbor order per vertex) from which faces are
//! traced. Infinite graphs are represented by finite truncations whose rim
//! vertices are flagged as boundary; every metric query refuses to touch the
//! rim, so answers agree with the infinite graph.

use std::collections::VecDeque;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact combinatorial curvature value.
pub type Curvature = Ratio<i64>;

/// Marker for half-edges whose face is the unbounded outer region of a
/// truncation.
const OUTER: usize = usize::MAX;

/// Semiplanar graph derived from a rotation system.
///
/// Faces are always traced from the rotation, never taken on trust. The graph
/// is immutable after construction; all queries are pure.
#[derive(Debug, Clone)]
pub struct SemiplanarGraph {
    rotation: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    /// Undirected edges, each stored once with `u < v`, sorted.
    edges: Vec<(usize, usize)>,
    /// Interior faces as cyclic vertex lists (outer face excluded).
    faces: Vec<Vec<usize>>,
    /// Outer face cycle of a truncation, kept for diagnostics.
    outer_face: Option<Vec<usize>>,
    /// Face id of each half-edge, indexed by `half_edge_start[v] + k` for the
    /// half-edge from `v` to `rotation[v][k]`. `OUTER` marks the outer face.
    he_face: Vec<usize>,
    half_edge_start: Vec<usize>,
    /// Incident interior faces per edge (same order as `edges`).
    edge_faces: Vec<[Option<usize>; 2]>,
    max_face_degree: usize,
}

/// One violated structural invariant found during validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyGraph,
    NeighborOutOfRange { vertex: usize, neighbor: usize },
    SelfLoop { vertex: usize },
    MultiEdge { u: usize, v: usize },
    /// `from` lists `to` as a neighbor but not vice versa.
    DanglingHalfEdge { from: usize, to: usize },
    InteriorDegreeTooSmall { vertex: usize, degree: usize },
    /// An unflagged vertex whose face fan is incomplete (touches the outer
    /// region), i.e. an unclosed face cycle at an interior vertex.
    IncompleteFan { vertex: usize },
    /// Truncation has boundary vertices but no face qualifies as the outer
    /// region, or several candidates tie in an unresolvable way.
    OuterFaceUndetermined,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGraph => write!(f, "graph has no vertices"),
            Violation::NeighborOutOfRange { vertex, neighbor } => {
                write!(f, "vertex {vertex} lists out-of-range neighbor {neighbor}")
            }
            Violation::SelfLoop { vertex } => write!(f, "loop at vertex {vertex}"),
            Violation::MultiEdge { u, v } => write!(f, "multi-edge between {u} and {v}"),
            Violation::DanglingHalfEdge { from, to } => {
                write!(f, "dangling half-edge: {from} lists {to} but {to} does not list {from}")
            }
            Violation::InteriorDegreeTooSmall { vertex, degree } => {
                write!(f, "interior vertex {vertex} has degree {degree} < 3")
            }
            Violation::IncompleteFan { vertex } => {
                write!(f, "unclosed face cycle: interior vertex {vertex} has an incomplete fan")
            }
            Violation::OuterFaceUndetermined => write!(f, "outer face could not be determined"),
        }
    }
}

/// Structured validation failure listing every violated invariant.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Closed geodesic ball in the hop metric.
#[derive(Debug, Clone)]
pub struct GraphBall {
    pub center: usize,
    pub radius: usize,
    /// Member vertices, ascending.
    pub members: Vec<usize>,
    /// Number of vertices in the ball.
    pub count: usize,
    /// Sum of vertex degrees over the ball.
    pub volume: usize,
}

/// Outcome of the exact nonnegative-curvature test.
#[derive(Debug, Clone)]
pub struct CurvatureCheck {
    pub all_nonnegative: bool,
    /// Interior vertices with negative curvature, with exact values.
    pub offenders: Vec<(usize, Curvature)>,
    /// Boundary vertices skipped by the test.
    pub skipped_boundary: usize,
}

impl SemiplanarGraph {
    /// Builds and validates a graph from a rotation system.
    ///
    /// `boundary` flags vertices of a finite truncation whose face fan is
    /// allowed to be incomplete. An empty list means the graph is closed
    /// (boundaryless), and no outer face is removed.
    pub fn from_rotation(rotation: Vec<Vec<usize>>, boundary: &[usize]) -> Result<Self> {
        let n = rotation.len();
        let mut report = ValidationReport::default();
        if n == 0 {
            report.violations.push(Violation::EmptyGraph);
            return Err(Error::Validation(report));
        }
        let mut boundary_flags = vec![false; n];
        for &b in boundary {
            if b >= n {
                report
                    .violations
                    .push(Violation::NeighborOutOfRange { vertex: b, neighbor: b });
            } else {
                boundary_flags[b] = true;
            }
        }

        // Simplicity and rotation consistency.
        for (v, nbrs) in rotation.iter().enumerate() {
            let mut seen = nbrs.clone();
            seen.sort_unstable();
            for w in seen.windows(2) {
                if w[0] == w[1] {
                    report.violations.push(Violation::MultiEdge { u: v, v: w[0] });
                }
            }
            for &u in nbrs {
                if u >= n {
                    report
                        .violations
                        .push(Violation::NeighborOutOfRange { vertex: v, neighbor: u });
                    continue;
                }
                if u == v {
                    report.violations.push(Violation::SelfLoop { vertex: v });
                    continue;
                }
                if !rotation[u].contains(&v) {
                    report
                        .violations
                        .push(Violation::DanglingHalfEdge { from: v, to: u });
                }
            }
        }
        if !report.violations.is_empty() {
            return Err(Error::Validation(report));
        }

        // Undirected edge table.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (v, nbrs) in rotation.iter().enumerate() {
            for &u in nbrs {
                if v < u {
                    edges.push((v, u));
                }
            }
        }
        edges.sort_unstable();

        // Face tracing: the successor of half-edge (u -> v) is (v -> w) where
        // w precedes u in the rotation at v. With counterclockwise rotations
        // this orients interior faces counterclockwise. Every half-edge lies
        // on exactly one traced cycle.
        let half_edge_start: Vec<usize> = {
            let mut acc = 0;
            let mut starts = Vec::with_capacity(n + 1);
            for nbrs in &rotation {
                starts.push(acc);
                acc += nbrs.len();
            }
            starts.push(acc);
            starts
        };
        let he_count = half_edge_start[n];
        let he_id = |v: usize, k: usize| half_edge_start[v] + k;
        let pos = |v: usize, u: usize| rotation[v].iter().position(|&x| x == u).unwrap();

        let mut he_face = vec![usize::MAX; he_count];
        let mut traced: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            for k in 0..rotation[v].len() {
                if he_face[he_id(v, k)] != usize::MAX {
                    continue;
                }
                let face_id = traced.len();
                let mut cycle = Vec::new();
                let (mut cv, mut ck) = (v, k);
                loop {
                    he_face[he_id(cv, ck)] = face_id;
                    cycle.push(cv);
                    let nv = rotation[cv][ck];
                    let j = pos(nv, cv);
                    let d = rotation[nv].len();
                    let nk = (j + d - 1) % d;
                    (cv, ck) = (nv, nk);
                    if cv == v && ck == k {
                        break;
                    }
                }
                traced.push(cycle);
            }
        }
        debug_assert_eq!(traced.iter().map(Vec::len).sum::<usize>(), he_count);

        // Outer face of a truncation: among traced faces consisting entirely
        // of boundary vertices, the longest one (ties resolved to the last
        // traced, which matters only for degenerate patches like a single
        // face, where either choice is equivalent).
        let has_boundary = boundary_flags.iter().any(|&b| b);
        let outer_id = if has_boundary {
            let mut best: Option<usize> = None;
            for (id, cycle) in traced.iter().enumerate() {
                if cycle.iter().all(|&v| boundary_flags[v]) {
                    match best {
                        Some(b) if traced[b].len() > cycle.len() => {}
                        _ => best = Some(id),
                    }
                }
            }
            if best.is_none() {
                report.violations.push(Violation::OuterFaceUndetermined);
                return Err(Error::Validation(report));
            }
            best
        } else {
            None
        };

        // Re-index interior faces; remap half-edge labels.
        let mut faces = Vec::with_capacity(traced.len().saturating_sub(1));
        let mut remap = vec![OUTER; traced.len()];
        let mut outer_face = None;
        for (id, cycle) in traced.into_iter().enumerate() {
            if Some(id) == outer_id {
                outer_face = Some(cycle);
            } else {
                remap[id] = faces.len();
                faces.push(cycle);
            }
        }
        for f in he_face.iter_mut() {
            *f = remap[*f];
        }

        // Fan completeness: an interior vertex must not touch the outer face,
        // and must have degree at least 3.
        for v in 0..n {
            if boundary_flags[v] {
                continue;
            }
            if rotation[v].len() < 3 {
                report.violations.push(Violation::InteriorDegreeTooSmall {
                    vertex: v,
                    degree: rotation[v].len(),
                });
                continue;
            }
            let incomplete = (0..rotation[v].len()).any(|k| he_face[he_id(v, k)] == OUTER);
            if incomplete {
                report.violations.push(Violation::IncompleteFan { vertex: v });
            }
        }
        if !report.violations.is_empty() {
            return Err(Error::Validation(report));
        }

        let mut edge_faces = vec![[None, None]; edges.len()];
        for v in 0..n {
            for (k, &u) in rotation[v].iter().enumerate() {
                if v < u {
                    let e = edges.binary_search(&(v, u)).unwrap();
                    let fa = he_face[he_id(v, k)];
                    let fb = he_face[half_edge_start[u] + pos(u, v)];
                    edge_faces[e] = [
                        (fa != OUTER).then_some(fa),
                        (fb != OUTER).then_some(fb),
                    ];
                }
            }
        }

        let max_face_degree = faces.iter().map(Vec::len).max().unwrap_or(0);

        Ok(Self {
            rotation,
            boundary: boundary_flags,
            edges,
            faces,
            outer_face,
            he_face,
            half_edge_start,
            edge_faces,
            max_face_degree,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    /// Neighbors of `v` in cyclic (embedding) order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.boundary[v]).collect()
    }

    /// Undirected edges, each once with `u < v`, ascending.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Interior faces as cyclic vertex lists.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, id: usize) -> &[usize] {
        &self.faces[id]
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_degree(&self, id: usize) -> usize {
        self.faces[id].len()
    }

    /// Maximal face degree D.
    pub fn max_face_degree(&self) -> usize {
        self.max_face_degree
    }

    pub fn outer_face(&self) -> Option<&[usize]> {
        self.outer_face.as_deref()
    }

    /// Interior faces incident to the edge `id`.
    pub fn edge_faces(&self, id: usize) -> [Option<usize>; 2] {
        self.edge_faces[id]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Face on the left of the half-edge `v -> rotation[v][k]`; `None` for
    /// the outer region.
    fn half_edge_face(&self, v: usize, k: usize) -> Option<usize> {
        let f = self.he_face[self.half_edge_start[v] + k];
        (f != OUTER).then_some(f)
    }

    /// Interior faces around `v` in rotation order. Fails on boundary
    /// vertices, whose fan is incomplete.
    pub fn faces_at(&self, v: usize) -> Result<Vec<usize>> {
        if self.boundary[v] {
            return Err(Error::BoundaryVertex { vertex: v });
        }
        (0..self.degree(v))
            .map(|k| self.half_edge_face(v, k).ok_or(Error::BoundaryVertex { vertex: v }))
            .collect()
    }

    /// Cyclic sequence of face degrees around an interior vertex.
    pub fn vertex_pattern(&self, v: usize) -> Result<Vec<usize>> {
        Ok(self.faces_at(v)?.into_iter().map(|f| self.faces[f].len()).collect())
    }

    /// Exact combinatorial curvature `1 - d/2 + sum over incident faces of
    /// 1/deg` at an interior vertex.
    pub fn vertex_curvature(&self, v: usize) -> Result<Curvature> {
        let faces = self.faces_at(v)?;
        let mut phi = Curvature::new(1, 1) - Curvature::new(self.degree(v) as i64, 2);
        for f in faces {
            phi += Curvature::new(1, self.faces[f].len() as i64);
        }
        Ok(phi)
    }

    /// Total angle of the polygonal surface at an interior vertex, in
    /// radians: `2*pi*(1 - curvature)`, which is also the sum of interior
    /// angles of the incident regular polygons.
    pub fn total_angle(&self, v: usize) -> Result<f64> {
        let phi = self.vertex_curvature(v)?;
        let phi = *phi.numer() as f64 / *phi.denom() as f64;
        Ok(2.0 * std::f64::consts::PI * (1.0 - phi))
    }

    /// Exact rational test that every interior vertex has nonnegative
    /// curvature. Boundary vertices are skipped and counted.
    pub fn nonnegative_curvature(&self) -> CurvatureCheck {
        let zero = Curvature::new(0, 1);
        let mut offenders = Vec::new();
        let mut skipped = 0;
        for v in 0..self.vertex_count() {
            if self.boundary[v] {
                skipped += 1;
                continue;
            }
            let phi = self.vertex_curvature(v).expect("interior vertex");
            if phi < zero {
                offenders.push((v, phi));
            }
        }
        CurvatureCheck {
            all_nonnegative: offenders.is_empty(),
            offenders,
            skipped_boundary: skipped,
        }
    }

    /// Hop distances from `p` to every vertex (`usize::MAX` if unreachable).
    pub fn bfs_distances(&self, p: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count()];
        dist[p] = 0;
        let mut queue = VecDeque::from([p]);
        while let Some(v) = queue.pop_front() {
            for &u in &self.rotation[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Hop-count distance between two vertices.
    pub fn distance(&self, u: usize, v: usize) -> Result<usize> {
        let d = self.bfs_distances(u)[v];
        if d == usize::MAX {
            return Err(Error::Disconnected { from: u, to: v });
        }
        Ok(d)
    }

    /// Closed geodesic ball of hop radius `radius` around `p`.
    ///
    /// Errors if the ball touches a boundary vertex of the truncation, in
    /// which case counts and volumes could differ from the infinite graph.
    pub fn ball(&self, p: usize, radius: usize) -> Result<GraphBall> {
        let dist = self.bfs_distances(p);
        let mut members = Vec::new();
        let mut volume = 0;
        for v in 0..self.vertex_count() {
            if dist[v] <= radius {
                if self.boundary[v] {
                    return Err(Error::InsufficientTruncation { center: p, radius });
                }
                members.push(v);
                volume += self.degree(v);
            }
        }
        Ok(GraphBall {
            center: p,
            radius,
            count: members.len(),
            members,
            volume,
        })
    }

    /// Euler characteristic `V - E + F`, counting the outer face of a
    /// truncation. Reported for genus diagnostics, not acted upon.
    pub fn euler_characteristic(&self) -> i64 {
        let f = self.faces.len() + usize::from(self.outer_face.is_some());
        self.vertex_count() as i64 - self.edges.len() as i64 + f as i64
    }
}
