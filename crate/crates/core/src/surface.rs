//! The regular polygonal surface of a semiplanar graph: every face is filled
//! with a regular unit-side polygon and glued along shared edges.
//!
//! The intrinsic metric is approximated by shortest paths in a refined graph
//! whose nodes are the original vertices plus evenly spaced edge subdivision
//! points, with complete straight-line links inside each (convex) face. Every
//! mesh path is a genuine surface path, so mesh distances overestimate the
//! intrinsic distance; the overestimate shrinks with the subdivision step.
//! Areas are measured by fan-triangulated quadrature against the mesh
//! distance field, with the indicator smoothed over a band of width `h`
//! whose mass is reported alongside every value.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::SemiplanarGraph;

/// Geometry of a regular `n`-gon with unit side length.
#[derive(Debug, Clone, Copy)]
pub struct FaceGeometry {
    pub degree: usize,
    /// Distance from the barycenter to a vertex.
    pub circumradius: f64,
    /// Distance from the barycenter to an edge midpoint.
    pub apothem: f64,
    pub area: f64,
    /// Angle subtended by one edge at the barycenter.
    pub sector_angle: f64,
    /// Largest point-to-point distance inside the polygon.
    pub diameter: f64,
}

impl FaceGeometry {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::FaceDegreeTooSmall(n));
        }
        let nf = n as f64;
        let circumradius = 0.5 / (PI / nf).sin();
        let apothem = circumradius * (PI / nf).cos();
        let area = nf / (4.0 * (PI / nf).tan());
        let diameter = if n % 2 == 0 {
            2.0 * circumradius
        } else {
            2.0 * circumradius * (PI / (2.0 * nf)).cos()
        };
        Ok(Self {
            degree: n,
            circumradius,
            apothem,
            area,
            sector_angle: 2.0 * PI / nf,
            diameter,
        })
    }

    /// Position of corner `i` in face-local coordinates (barycenter at the
    /// origin, corner 0 on the positive x-axis).
    pub fn corner(&self, i: usize) -> [f64; 2] {
        let t = self.sector_angle * i as f64;
        [self.circumradius * t.cos(), self.circumradius * t.sin()]
    }

    /// Polar equation of the polygon boundary at angle `theta`.
    pub fn boundary_radius(&self, theta: f64) -> f64 {
        let alpha = self.sector_angle;
        let t = theta.rem_euclid(2.0 * PI);
        let j = (t / alpha).floor().min(self.degree as f64 - 1.0);
        self.apothem / (t - (2.0 * j + 1.0) * alpha / 2.0).cos()
    }
}

/// Upper bound on the diameter of any face with degree at most `max_degree`.
pub fn face_diameter_bound(max_degree: usize) -> f64 {
    FaceGeometry::new(max_degree.max(3)).map(|g| 2.0 * g.circumradius).unwrap()
}

/// A point of the polygonal surface: a face plus local polar coordinates
/// about the face barycenter, with corner 0 at angle 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub face: usize,
    pub r: f64,
    pub theta: f64,
}

impl SurfacePoint {
    pub fn barycenter(face: usize) -> Self {
        Self { face, r: 0.0, theta: 0.0 }
    }

    /// The surface point sitting at graph vertex `v`, expressed in the first
    /// face that contains it.
    pub fn at_vertex(graph: &SemiplanarGraph, v: usize) -> Result<Self> {
        for (face, cycle) in graph.faces().iter().enumerate() {
            if let Some(i) = cycle.iter().position(|&w| w == v) {
                let geom = FaceGeometry::new(cycle.len())?;
                return Ok(Self {
                    face,
                    r: geom.circumradius,
                    theta: geom.sector_angle * i as f64,
                });
            }
        }
        Err(Error::OutsideFace { face: usize::MAX })
    }

    pub fn cartesian(&self) -> [f64; 2] {
        [self.r * self.theta.cos(), self.r * self.theta.sin()]
    }

    pub fn is_inside(&self, geom: &FaceGeometry) -> bool {
        self.r <= geom.boundary_radius(self.theta) + 1e-9
    }
}

/// Per-vertex planar coordinates of a developable (flat) patch. Rim vertices
/// that lie on no interior face are not covered.
#[derive(Debug, Clone)]
pub struct PlanarLayout {
    coords: Vec<Option<[f64; 2]>>,
}

impl PlanarLayout {
    pub fn get(&self, v: usize) -> Option<[f64; 2]> {
        self.coords[v]
    }

    pub fn require(&self, v: usize) -> Result<[f64; 2]> {
        self.coords[v].ok_or(Error::MissingValue { vertex: v })
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<f64> {
        let (a, b) = (self.require(u)?, self.require(v)?);
        Ok((a[0] - b[0]).hypot(a[1] - b[1]))
    }

    pub fn covered(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.coords.len()).filter(|&v| self.coords[v].is_some())
    }
}

/// Develops a flat patch isometrically into the plane: every edge gets
/// length one and every face becomes a regular polygon. Fails with
/// `NotDevelopable` if some interior vertex has nonzero curvature.
pub fn planar_layout(graph: &SemiplanarGraph) -> Result<PlanarLayout> {
    let zero = crate::graph::Curvature::new(0, 1);
    for v in 0..graph.vertex_count() {
        if !graph.is_boundary(v) && graph.vertex_curvature(v)? != zero {
            return Err(Error::NotDevelopable { vertex: v });
        }
    }
    if graph.face_count() == 0 {
        return Err(Error::InvalidParameter("patch has no faces to develop".into()));
    }

    let mut coords: Vec<Option<[f64; 2]>> = vec![None; graph.vertex_count()];
    let mut placed_face = vec![false; graph.face_count()];
    let mut queue = std::collections::VecDeque::new();

    // Seed: face 0 with its first edge along the positive x-axis.
    {
        let cycle = graph.face(0);
        coords[cycle[0]] = Some([0.0, 0.0]);
        coords[cycle[1]] = Some([1.0, 0.0]);
    }
    queue.push_back(0usize);
    let mut pending = std::collections::VecDeque::new();
    let mut stalled = 0usize;
    while let Some(f) = queue.pop_front().or_else(|| pending.pop_front()) {
        if placed_face[f] {
            continue;
        }
        let cycle = graph.face(f);
        let n = cycle.len();
        // Need one directed edge of the cycle already placed.
        let Some(start) = (0..n).find(|&i| {
            coords[cycle[i]].is_some() && coords[cycle[(i + 1) % n]].is_some()
        }) else {
            stalled += 1;
            if stalled > pending.len() + 1 {
                // Remaining faces are not edge-connected to the seed.
                return Err(Error::InvalidParameter(
                    "patch faces are not edge-connected; cannot develop".into(),
                ));
            }
            pending.push_back(f);
            continue;
        };
        stalled = 0;
        placed_face[f] = true;
        let exterior = 2.0 * PI / n as f64;
        let mut a = coords[cycle[start]].unwrap();
        let b = coords[cycle[(start + 1) % n]].unwrap();
        let mut heading = (b[1] - a[1]).atan2(b[0] - a[0]);
        for step in 1..n {
            let v = cycle[(start + step) % n];
            let next = [a[0] + heading.cos(), a[1] + heading.sin()];
            match coords[v] {
                None => coords[v] = Some(next),
                Some(old) => {
                    let gap = (old[0] - next[0]).hypot(old[1] - next[1]);
                    if gap > 1e-6 {
                        return Err(Error::InconsistentDevelopment { vertex: v, mismatch: gap });
                    }
                }
            }
            a = coords[v].unwrap();
            heading += exterior;
        }
        for i in 0..n {
            if let Some(e) = graph.edge_id(cycle[i], cycle[(i + 1) % n]) {
                for other in graph.edge_faces(e).into_iter().flatten() {
                    if !placed_face[other] {
                        queue.push_back(other);
                    }
                }
            }
        }
    }

    for &(u, v) in graph.edges() {
        if let (Some(a), Some(b)) = (coords[u], coords[v]) {
            let d = (a[0] - b[0]).hypot(a[1] - b[1]);
            if (d - 1.0).abs() > 1e-9 {
                return Err(Error::InconsistentDevelopment { vertex: v, mismatch: (d - 1.0).abs() });
            }
        }
    }
    Ok(PlanarLayout { coords })
}

/// Area of one ball radius, with the quadrature mass of the smoothing band.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceBallVolume {
    pub radius: f64,
    pub area: f64,
    /// Quadrature mass within `h/2` of the ball boundary; an upper bound on
    /// the smoothing error.
    pub band_mass: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct BiLipschitzReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Min-heap on distance.
        other.dist.total_cmp(&self.dist).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest-path structure on the refined surface mesh.
pub struct MetricMesh {
    /// Requested refinement step.
    pub h: f64,
    /// Subdivisions per edge (power of two so node sets nest as h halves).
    k: usize,
    node_count: usize,
    /// Per face: mesh boundary nodes with face-local coordinates.
    face_nodes: Vec<Vec<(usize, [f64; 2])>>,
    /// Faces incident to each node.
    node_faces: Vec<Vec<usize>>,
    /// Face geometry per face.
    geom: Vec<FaceGeometry>,
    /// Faces touching the truncation rim.
    rim_face: Vec<bool>,
    /// Vertex-node ids that lie on the truncation rim.
    rim_nodes: Vec<usize>,
}

impl MetricMesh {
    pub fn build(graph: &SemiplanarGraph, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter("mesh step h must be positive".into()));
        }
        let k = ((1.0 / h).ceil() as usize).max(1).next_power_of_two();
        let nv = graph.vertex_count();
        let ne = graph.edge_count();
        let node_count = nv + ne * (k - 1);

        let geom: Vec<FaceGeometry> = graph
            .faces()
            .iter()
            .map(|c| FaceGeometry::new(c.len()))
            .collect::<Result<_>>()?;

        let mut face_nodes = Vec::with_capacity(graph.face_count());
        let mut node_faces: Vec<Vec<usize>> = vec![Vec::new(); node_count];
        for (f, cycle) in graph.faces().iter().enumerate() {
            let g = &geom[f];
            let n = cycle.len();
            let mut nodes = Vec::with_capacity(n * k);
            for i in 0..n {
                let u = cycle[i];
                let v = cycle[(i + 1) % n];
                let cu = g.corner(i);
                let cv = g.corner((i + 1) % n);
                nodes.push((u, cu));
                let e = graph.edge_id(u, v).expect("face edge exists");
                let a = u.min(v);
                for j in 1..k {
                    let id = nv + e * (k - 1) + (j - 1);
                    // Subdivision point j/k measured from the canonical
                    // endpoint a.
                    let t = j as f64 / k as f64;
                    let t = if a == u { t } else { 1.0 - t };
                    nodes.push((id, [cu[0] + t * (cv[0] - cu[0]), cu[1] + t * (cv[1] - cu[1])]));
                }
            }
            for &(id, _) in &nodes {
                node_faces[id].push(f);
            }
            face_nodes.push(nodes);
        }

        let rim_face = graph
            .faces()
            .iter()
            .map(|c| c.iter().any(|&v| graph.is_boundary(v)))
            .collect();
        let rim_nodes = (0..nv).filter(|&v| graph.is_boundary(v)).collect();

        Ok(Self {
            h,
            k,
            node_count,
            face_nodes,
            node_faces,
            geom,
            rim_face,
            rim_nodes,
        })
    }

    /// Actual node spacing along edges.
    pub fn spacing(&self) -> f64 {
        1.0 / self.k as f64
    }

    pub fn face_geometry(&self, face: usize) -> &FaceGeometry {
        &self.geom[face]
    }

    fn check_point(&self, p: &SurfacePoint) -> Result<()> {
        if p.face >= self.geom.len() || !p.is_inside(&self.geom[p.face]) {
            return Err(Error::OutsideFace { face: p.face });
        }
        Ok(())
    }

    /// Dijkstra distances from `p` to all mesh nodes, pruned beyond `limit`.
    fn distances_from(&self, p: &SurfacePoint, limit: f64) -> Result<Vec<f64>> {
        self.check_point(p)?;
        let mut dist = vec![f64::INFINITY; self.node_count];
        let mut heap = BinaryHeap::new();
        let pc = p.cartesian();
        for &(id, c) in &self.face_nodes[p.face] {
            let d = (c[0] - pc[0]).hypot(c[1] - pc[1]);
            if d < dist[id] {
                dist[id] = d;
                heap.push(HeapEntry { dist: d, node: id });
            }
        }
        while let Some(HeapEntry { dist: du, node: u }) = heap.pop() {
            if du > dist[u] || du > limit {
                continue;
            }
            for &f in &self.node_faces[u] {
                // Position of u inside f.
                let cu = self.face_nodes[f]
                    .iter()
                    .find(|&&(id, _)| id == u)
                    .map(|&(_, c)| c)
                    .expect("node listed in incident face");
                for &(w, cw) in &self.face_nodes[f] {
                    let nd = du + (cw[0] - cu[0]).hypot(cw[1] - cu[1]);
                    if nd < dist[w] {
                        dist[w] = nd;
                        heap.push(HeapEntry { dist: nd, node: w });
                    }
                }
            }
        }
        Ok(dist)
    }

    fn guard_rim(&self, dist: &[f64], limit: f64) -> Result<()> {
        for &v in &self.rim_nodes {
            if dist[v] <= limit {
                return Err(Error::OutsideSafeRegion { radius: limit });
            }
        }
        Ok(())
    }

    /// Mesh shortest-path distance and a conservative error bound. The mesh
    /// value never undershoots the intrinsic distance.
    pub fn distance(&self, p: &SurfacePoint, q: &SurfacePoint) -> Result<(f64, f64)> {
        self.check_point(q)?;
        let mut best = f64::INFINITY;
        if p.face == q.face {
            let (a, b) = (p.cartesian(), q.cartesian());
            best = (a[0] - b[0]).hypot(a[1] - b[1]);
        }
        let dist = self.distances_from(p, f64::INFINITY)?;
        let qc = q.cartesian();
        for &(id, c) in &self.face_nodes[q.face] {
            let d = dist[id] + (c[0] - qc[0]).hypot(c[1] - qc[1]);
            best = best.min(d);
        }
        self.guard_rim(&dist, best)?;
        let bound = self.spacing() * (2.0 + best);
        Ok((best, bound))
    }

    /// Visits every quadrature node within `r_max` (plus the smoothing band)
    /// of `p`, passing face id, face-local coordinates, mesh distance, and
    /// quadrature weight.
    pub fn for_each_ball_node(
        &self,
        p: &SurfacePoint,
        r_max: f64,
        mut visit: impl FnMut(usize, [f64; 2], f64, f64),
    ) -> Result<()> {
        let reach = r_max + self.h;
        let dist = self.distances_from(p, reach)?;
        self.guard_rim(&dist, reach)?;
        let pc = p.cartesian();
        for f in 0..self.face_nodes.len() {
            let nodes = &self.face_nodes[f];
            let near = nodes.iter().map(|&(id, _)| dist[id]).fold(f64::INFINITY, f64::min);
            let same_face = f == p.face;
            if !same_face && near > reach {
                continue;
            }
            if self.rim_face[f] && (same_face || near <= reach) {
                return Err(Error::OutsideSafeRegion { radius: r_max });
            }
            let g = &self.geom[f];
            let n = g.degree;
            let boundary: Vec<([f64; 2], f64)> = nodes
                .iter()
                .filter(|&&(id, _)| dist[id].is_finite())
                .map(|&(id, c)| (c, dist[id]))
                .collect();
            let local_dist = |x: [f64; 2]| -> f64 {
                let mut d = f64::INFINITY;
                if same_face {
                    d = (x[0] - pc[0]).hypot(x[1] - pc[1]);
                }
                for &(c, db) in &boundary {
                    let cand = db + (x[0] - c[0]).hypot(x[1] - c[1]);
                    if cand < d {
                        d = cand;
                    }
                }
                d
            };
            // Fan triangulation: barycenter + each edge, subdivided into m^2
            // congruent sub-triangles, 3-point midpoint rule on each.
            let m = ((g.circumradius.max(1.0)) / self.h).ceil() as usize;
            let tri_area = g.area / (n as f64 * (m * m) as f64);
            let w_node = tri_area / 3.0;
            for i in 0..n {
                let a = [0.0, 0.0];
                let b = g.corner(i);
                let c = g.corner((i + 1) % n);
                let eb = [(b[0] - a[0]) / m as f64, (b[1] - a[1]) / m as f64];
                let ec = [(c[0] - b[0]) / m as f64, (c[1] - b[1]) / m as f64];
                let at = |u: f64, v: f64| -> [f64; 2] {
                    [a[0] + u * eb[0] + v * ec[0], a[1] + u * eb[1] + v * ec[1]]
                };
                for row in 0..m {
                    for col in 0..=row {
                        // Upward sub-triangle (row+1 picks up the corner at
                        // parameter (row+1, col..)); its edge midpoints.
                        let (p0, p1, p2) = (
                            at(row as f64, col as f64),
                            at(row as f64 + 1.0, col as f64),
                            at(row as f64 + 1.0, col as f64 + 1.0),
                        );
                        for (qa, qb) in [(p0, p1), (p1, p2), (p2, p0)] {
                            let x = [(qa[0] + qb[0]) / 2.0, (qa[1] + qb[1]) / 2.0];
                            visit(f, x, local_dist(x), w_node);
                        }
                        if col < row {
                            // Downward companion.
                            let (q0, q1, q2) = (
                                at(row as f64, col as f64),
                                at(row as f64 + 1.0, col as f64 + 1.0),
                                at(row as f64, col as f64 + 1.0),
                            );
                            for (qa, qb) in [(q0, q1), (q1, q2), (q2, q0)] {
                                let x = [(qa[0] + qb[0]) / 2.0, (qa[1] + qb[1]) / 2.0];
                                visit(f, x, local_dist(x), w_node);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Areas of the balls around `p` for each requested radius, sharing one
    /// distance field.
    pub fn ball_volumes(&self, p: &SurfacePoint, radii: &[f64]) -> Result<Vec<SurfaceBallVolume>> {
        for &r in radii {
            if !(r >= 0.0) {
                return Err(Error::InvalidParameter(format!("negative ball radius {r}")));
            }
        }
        let r_max = radii.iter().copied().fold(0.0, f64::max);
        let mut out: Vec<SurfaceBallVolume> = radii
            .iter()
            .map(|&r| SurfaceBallVolume { radius: r, area: 0.0, band_mass: 0.0 })
            .collect();
        let h = self.h;
        self.for_each_ball_node(p, r_max, |_, _, d, w| {
            for acc in out.iter_mut() {
                if acc.radius == 0.0 {
                    continue;
                }
                acc.area += w * smooth_indicator(d, acc.radius, h);
                if (d - acc.radius).abs() <= h / 2.0 {
                    acc.band_mass += w;
                }
            }
        })?;
        Ok(out)
    }
}

/// Indicator of `d <= radius` smoothed linearly over a band of width `h`.
pub fn smooth_indicator(d: f64, radius: f64, h: f64) -> f64 {
    ((radius - d) / h + 0.5).clamp(0.0, 1.0)
}

/// Measures `d(x,y) / d_G(x,y)` over sampled vertex pairs, grouped by source
/// so each source needs one distance field.
pub fn bilipschitz_measure(
    graph: &SemiplanarGraph,
    mesh: &MetricMesh,
    pairs: &[(usize, usize)],
) -> Result<BiLipschitzReport> {
    let mut by_source: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &(u, v) in pairs {
        if u != v {
            by_source.entry(u).or_default().push(v);
        }
    }
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut samples = 0;
    for (u, targets) in by_source {
        let pu = SurfacePoint::at_vertex(graph, u)?;
        let dist = mesh.distances_from(&pu, f64::INFINITY)?;
        let hops = graph.bfs_distances(u);
        for v in targets {
            if hops[v] == usize::MAX {
                return Err(Error::Disconnected { from: u, to: v });
            }
            let ds = dist[v];
            mesh.guard_rim(&dist, ds)?;
            let ratio = ds / hops[v] as f64;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            samples += 1;
        }
    }
    Ok(BiLipschitzReport { min_ratio, max_ratio, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SemiplanarGraph;
    use crate::tiling::{generate, TilingKind, TilingSpec};

    #[test]
    fn face_geometry_known_values() {
        let sq = FaceGeometry::new(4).unwrap();
        assert!((sq.circumradius - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((sq.area - 1.0).abs() < 1e-14);
        let hex = FaceGeometry::new(6).unwrap();
        assert!((hex.area - 1.5 * 3f64.sqrt()).abs() < 1e-13);
        let tri = FaceGeometry::new(3).unwrap();
        assert!((tri.circumradius - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(FaceGeometry::new(2).is_err());
        // Unit side length identity.
        for n in 3..=16 {
            let g = FaceGeometry::new(n).unwrap();
            assert!((2.0 * g.circumradius * (PI / n as f64).sin() - 1.0).abs() < 1e-14);
            assert!(g.diameter <= 2.0 * g.circumradius + 1e-14);
        }
    }

    #[test]
    fn square_layout_is_integer_lattice() {
        let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 3 }).unwrap();
        let layout = planar_layout(&patch.graph).unwrap();
        let mut covered = 0;
        for v in layout.covered() {
            let c = layout.require(v).unwrap();
            assert!((c[0] - c[0].round()).abs() < 1e-9, "{c:?}");
            assert!((c[1] - c[1].round()).abs() < 1e-9, "{c:?}");
            covered += 1;
        }
        assert!(covered > patch.graph.ball(patch.center, 3).unwrap().count);
    }

    #[test]
    fn triangular_layout_has_unit_edges() {
        let patch = generate(TilingSpec { kind: TilingKind::Triangular, radius: 3 }).unwrap();
        let layout = planar_layout(&patch.graph).unwrap();
        for &(u, v) in patch.graph.edges() {
            if layout.get(u).is_some() && layout.get(v).is_some() {
                assert!((layout.distance(u, v).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn curved_cap_is_not_developable() {
        // Five triangles around a hub.
        let mut rotation = vec![(1..=5).collect::<Vec<_>>()];
        for i in 0..5 {
            let prev = 1 + (i + 4) % 5;
            let next = 1 + (i + 1) % 5;
            rotation.push(vec![next, 0, prev]);
        }
        let g = SemiplanarGraph::from_rotation(rotation, &[1, 2, 3, 4, 5]).unwrap();
        assert!(matches!(
            planar_layout(&g),
            Err(Error::NotDevelopable { vertex: 0 })
        ));
    }

    #[test]
    fn mesh_distances_on_the_square_tiling() {
        let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 5 }).unwrap();
        let g = &patch.graph;
        let mesh = MetricMesh::build(g, 0.1).unwrap();
        let p = SurfacePoint::at_vertex(g, patch.center).unwrap();
        // p = q.
        assert_eq!(mesh.distance(&p, &p).unwrap().0, 0.0);
        // Adjacent vertices: the edge is a geodesic.
        let q = SurfacePoint::at_vertex(g, g.neighbors(patch.center)[0]).unwrap();
        let (d, bound) = mesh.distance(&p, &q).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "{d}");
        assert!(bound > 0.0);
        // Opposite corners of one square: exact diagonal.
        let face = patch.graph.faces().iter().position(|c| c.contains(&patch.center)).unwrap();
        let cycle = patch.graph.face(face);
        let i = cycle.iter().position(|&v| v == patch.center).unwrap();
        let opposite = cycle[(i + 2) % 4];
        let po = SurfacePoint::at_vertex(g, patch.center).unwrap();
        let qo = SurfacePoint::at_vertex(g, opposite).unwrap();
        let (d, _) = mesh.distance(&po, &qo).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 2e-2, "{d}");
    }

    #[test]
    fn mesh_distance_monotone_in_h() {
        let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 5 }).unwrap();
        let g = &patch.graph;
        let layout = planar_layout(g).unwrap();
        // A knight-move pair exercises genuinely oblique geodesics.
        let p0 = layout.require(patch.center).unwrap();
        let target = (0..g.vertex_count())
            .find(|&v| {
                layout.get(v).is_some_and(|c| {
                    ((c[0] - p0[0]).abs() - 2.0).abs() < 1e-9
                        && ((c[1] - p0[1]).abs() - 1.0).abs() < 1e-9
                })
            })
            .unwrap();
        let p = SurfacePoint::at_vertex(g, patch.center).unwrap();
        let q = SurfacePoint::at_vertex(g, target).unwrap();
        let exact = 5f64.sqrt();
        let mut prev = f64::INFINITY;
        for h in [0.4, 0.2, 0.1] {
            let mesh = MetricMesh::build(g, h).unwrap();
            let (d, _) = mesh.distance(&p, &q).unwrap();
            assert!(d >= exact - 1e-12, "mesh must not undershoot: {d}");
            assert!(d <= prev + 1e-12, "monotone in h: {d} vs {prev}");
            prev = d;
        }
        assert!((prev - exact).abs() < 0.02, "{prev}");
    }

    #[test]
    fn flat_ball_areas_match_the_plane() {
        let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 6 }).unwrap();
        let mesh = MetricMesh::build(&patch.graph, 0.1).unwrap();
        let p = SurfacePoint::at_vertex(&patch.graph, patch.center).unwrap();
        let vols = mesh.ball_volumes(&p, &[0.0, 1.0, 2.0]).unwrap();
        assert!(vols[0].area.abs() < 1e-12);
        for v in &vols[1..] {
            let exact = PI * v.radius * v.radius;
            assert!(
                (v.area - exact).abs() < 0.05 * exact,
                "radius {}: {} vs {}",
                v.radius,
                v.area,
                exact
            );
        }
    }

    #[test]
    fn ball_volume_refuses_the_rim() {
        let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 2 }).unwrap();
        let mesh = MetricMesh::build(&patch.graph, 0.25).unwrap();
        let p = SurfacePoint::at_vertex(&patch.graph, patch.center).unwrap();
        assert!(matches!(
            mesh.ball_volumes(&p, &[20.0]),
            Err(Error::OutsideSafeRegion { .. })
        ));
    }

    #[test]
    fn bilipschitz_on_flat_tilings() {
        let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 5 }).unwrap();
        let g = &patch.graph;
        let mesh = MetricMesh::build(g, 0.1).unwrap();
        let ball = g.ball(patch.center, 3).unwrap();
        let pairs: Vec<(usize, usize)> = ball
            .members
            .iter()
            .filter(|&&v| v != patch.center)
            .map(|&v| (patch.center, v))
            .collect();
        let report = bilipschitz_measure(g, &mesh, &pairs).unwrap();
        assert!(report.max_ratio <= 1.0 + 1e-9, "{}", report.max_ratio);
        assert!(report.min_ratio >= 0.5, "{}", report.min_ratio);
        assert_eq!(report.samples, pairs.len());
    }
}
