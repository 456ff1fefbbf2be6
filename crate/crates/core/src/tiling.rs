//! Generators for finite balls of the flat (zero-curvature) tilings, plus
//! graph file ingestion.
//!
//! Each tiling is described by a translation lattice and a motif of vertex
//! offsets with an edge table; generation works in exact planar coordinates,
//! derives the rotation system by angular order, then discards coordinates.
//! The combinatorial map is the single source of truth afterwards.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SemiplanarGraph;

/// Supported vertex configurations. All are Euclidean tilings, so interior
/// combinatorial curvature is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TilingKind {
    /// 3^6, all triangles.
    Triangular,
    /// 4^4, the square lattice.
    Square,
    /// 6^3, the honeycomb.
    Hexagonal,
    /// (3.6.3.6), alternating triangles and hexagons.
    TriHex,
    /// (3.3.4.3.4).
    SnubSquare,
    /// (4.8.8), squares and octagons.
    TruncatedSquare,
    /// (3.12.12), triangles and 12-gons.
    TruncatedHexagonal,
    /// (4.6.12), squares, hexagons, and 12-gons.
    TruncatedTriHex,
}

impl TilingKind {
    pub const ALL: [TilingKind; 8] = [
        TilingKind::Triangular,
        TilingKind::Square,
        TilingKind::Hexagonal,
        TilingKind::TriHex,
        TilingKind::SnubSquare,
        TilingKind::TruncatedSquare,
        TilingKind::TruncatedHexagonal,
        TilingKind::TruncatedTriHex,
    ];

    /// Canonical name, e.g. `4^4` or `4.8.8`.
    pub fn name(self) -> &'static str {
        match self {
            TilingKind::Triangular => "3^6",
            TilingKind::Square => "4^4",
            TilingKind::Hexagonal => "6^3",
            TilingKind::TriHex => "3.6.3.6",
            TilingKind::SnubSquare => "3.3.4.3.4",
            TilingKind::TruncatedSquare => "4.8.8",
            TilingKind::TruncatedHexagonal => "3.12.12",
            TilingKind::TruncatedTriHex => "4.6.12",
        }
    }

    /// Vertex configuration as face degrees in rotation order.
    pub fn pattern(self) -> &'static [usize] {
        match self {
            TilingKind::Triangular => &[3, 3, 3, 3, 3, 3],
            TilingKind::Square => &[4, 4, 4, 4],
            TilingKind::Hexagonal => &[6, 6, 6],
            TilingKind::TriHex => &[3, 6, 3, 6],
            TilingKind::SnubSquare => &[3, 3, 4, 3, 4],
            TilingKind::TruncatedSquare => &[4, 8, 8],
            TilingKind::TruncatedHexagonal => &[3, 12, 12],
            TilingKind::TruncatedTriHex => &[4, 6, 12],
        }
    }

    /// Largest face degree.
    pub fn max_face_degree(self) -> usize {
        *self.pattern().iter().max().unwrap()
    }
}

impl fmt::Display for TilingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TilingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3^6" | "3.3.3.3.3.3" | "triangular" | "tri" => Ok(TilingKind::Triangular),
            "4^4" | "4.4.4.4" | "square" => Ok(TilingKind::Square),
            "6^3" | "6.6.6" | "6.3" | "hexagonal" | "hex" => Ok(TilingKind::Hexagonal),
            "3.6.3.6" => Ok(TilingKind::TriHex),
            "3.3.4.3.4" => Ok(TilingKind::SnubSquare),
            "4.8.8" => Ok(TilingKind::TruncatedSquare),
            "3.12.12" => Ok(TilingKind::TruncatedHexagonal),
            "4.6.12" => Ok(TilingKind::TruncatedTriHex),
            other => Err(Error::UnsupportedPattern(other.to_string())),
        }
    }
}

/// Request for a generated ball of a tiling.
#[derive(Debug, Clone, Copy)]
pub struct TilingSpec {
    pub kind: TilingKind,
    /// Hop radius guaranteed to lie strictly inside the truncation.
    pub radius: usize,
}

/// A generated truncation together with its designated center vertex
/// (always vertex 0).
#[derive(Debug, Clone)]
pub struct GeneratedPatch {
    pub graph: SemiplanarGraph,
    pub center: usize,
}

/// Lattice description of one tiling: basis vectors, motif vertex offsets,
/// and edges as (motif a, motif b, cell offset of b relative to a).
struct Lattice {
    basis: [[f64; 2]; 2],
    motif: Vec<[f64; 2]>,
    edges: Vec<(usize, usize, (i64, i64))>,
}

fn lattice(kind: TilingKind) -> Lattice {
    let s3 = 3f64.sqrt();
    match kind {
        TilingKind::Triangular => Lattice {
            basis: [[1.0, 0.0], [0.5, s3 / 2.0]],
            motif: vec![[0.0, 0.0]],
            edges: vec![(0, 0, (1, 0)), (0, 0, (0, 1)), (0, 0, (-1, 1))],
        },
        TilingKind::Square => Lattice {
            basis: [[1.0, 0.0], [0.0, 1.0]],
            motif: vec![[0.0, 0.0]],
            edges: vec![(0, 0, (1, 0)), (0, 0, (0, 1))],
        },
        TilingKind::Hexagonal => Lattice {
            basis: [[s3, 0.0], [s3 / 2.0, 1.5]],
            motif: vec![[0.0, 0.0], [0.0, 1.0]],
            edges: vec![(0, 1, (0, 0)), (0, 1, (0, -1)), (0, 1, (1, -1))],
        },
        TilingKind::TriHex => Lattice {
            basis: [[2.0, 0.0], [1.0, s3]],
            motif: vec![[0.0, 0.0], [1.0, 0.0], [0.5, s3 / 2.0]],
            edges: vec![
                (0, 1, (0, 0)),
                (0, 2, (0, 0)),
                (1, 2, (0, 0)),
                (1, 0, (1, 0)),
                (2, 0, (0, 1)),
                (2, 1, (-1, 1)),
            ],
        },
        TilingKind::TruncatedSquare => {
            let l = 1.0 + 2f64.sqrt();
            let t = 2f64.sqrt() / 2.0;
            Lattice {
                basis: [[l, 0.0], [0.0, l]],
                motif: vec![[t, 0.0], [0.0, t], [-t, 0.0], [0.0, -t]],
                edges: vec![
                    (0, 1, (0, 0)),
                    (1, 2, (0, 0)),
                    (2, 3, (0, 0)),
                    (3, 0, (0, 0)),
                    (0, 2, (1, 0)),
                    (1, 3, (0, 1)),
                ],
            }
        }
        TilingKind::SnubSquare => {
            let a = (2.0 + s3).sqrt();
            let r = 0.5f64.sqrt();
            let corner = |deg: f64| [r * (deg * PI / 180.0).cos(), r * (deg * PI / 180.0).sin()];
            Lattice {
                basis: [[a, 0.0], [0.0, a]],
                // One square rotated by 15 degrees; the interleaved square and
                // both triangle families close up through the offsets below.
                motif: vec![corner(60.0), corner(150.0), corner(240.0), corner(330.0)],
                edges: vec![
                    (0, 1, (0, 0)),
                    (1, 2, (0, 0)),
                    (2, 3, (0, 0)),
                    (3, 0, (0, 0)),
                    (0, 3, (0, 1)),
                    (0, 1, (1, 0)),
                    (2, 3, (-1, 0)),
                    (1, 2, (0, 1)),
                    (0, 2, (0, 1)),
                    (3, 1, (1, 0)),
                ],
            }
        }
        TilingKind::TruncatedHexagonal => {
            let r12 = 0.5 / (PI / 12.0).sin();
            let l = 2.0 + s3;
            let v = |deg: f64| [r12 * (deg * PI / 180.0).cos(), r12 * (deg * PI / 180.0).sin()];
            Lattice {
                basis: [[l, 0.0], [l / 2.0, l * s3 / 2.0]],
                motif: vec![v(15.0), v(45.0), v(75.0), v(105.0), v(135.0), v(195.0)],
                edges: vec![
                    (0, 1, (0, 0)),
                    (1, 2, (0, 0)),
                    (2, 3, (0, 0)),
                    (3, 4, (0, 0)),
                    (4, 0, (-1, 0)),
                    (0, 5, (1, 0)),
                    (5, 2, (0, -1)),
                    (1, 4, (1, 0)),
                    (3, 5, (0, 1)),
                ],
            }
        }
        TilingKind::TruncatedTriHex => {
            let r12 = 0.5 / (PI / 12.0).sin();
            let l = 3.0 + s3;
            let v = |k: usize| {
                let deg = 15.0 + 30.0 * k as f64;
                [r12 * (deg * PI / 180.0).cos(), r12 * (deg * PI / 180.0).sin()]
            };
            let mut edges: Vec<(usize, usize, (i64, i64))> =
                (0..12).map(|k| (k, (k + 1) % 12, (0, 0))).collect();
            edges.extend([
                (0, 5, (1, 0)),
                (11, 6, (1, 0)),
                (2, 7, (0, 1)),
                (1, 8, (0, 1)),
                (4, 9, (-1, 1)),
                (3, 10, (-1, 1)),
            ]);
            Lattice {
                basis: [[l, 0.0], [l / 2.0, l * s3 / 2.0]],
                motif: (0..12).map(v).collect(),
                edges,
            }
        }
    }
}

/// Generates a validated truncation that contains the full closed ball
/// `B_radius(center)` with complete interior face fans. The center is
/// vertex 0 of the returned graph.
pub fn generate(spec: TilingSpec) -> Result<GeneratedPatch> {
    if spec.radius == 0 {
        return Err(Error::InvalidParameter("tiling radius must be at least 1".into()));
    }
    let lat = lattice(spec.kind);
    // Keep every vertex within this many hops of the center; the extra
    // buffer makes the fans of all ball vertices complete.
    let hop_target = spec.radius + spec.kind.max_face_degree() / 2 + 2;
    let motif_extent = lat
        .motif
        .iter()
        .map(|m| (m[0] * m[0] + m[1] * m[1]).sqrt())
        .fold(0.0, f64::max);
    let cutoff = hop_target as f64 + motif_extent + 2.0;

    // Enumerate lattice cells covering the cutoff disk.
    let det = lat.basis[0][0] * lat.basis[1][1] - lat.basis[0][1] * lat.basis[1][0];
    let inv = [
        [lat.basis[1][1] / det, -lat.basis[1][0] / det],
        [-lat.basis[0][1] / det, lat.basis[0][0] / det],
    ];
    let cell_range = {
        // Conservative index bound from the inverse basis norms.
        let n0 = inv[0][0].abs() + inv[0][1].abs();
        let n1 = inv[1][0].abs() + inv[1][1].abs();
        ((cutoff + motif_extent + 1.0) * n0.max(n1)).ceil() as i64 + 1
    };

    let mut ids: std::collections::BTreeMap<(i64, i64, usize), usize> = Default::default();
    let mut coords: Vec<[f64; 2]> = Vec::new();
    for i in -cell_range..=cell_range {
        for j in -cell_range..=cell_range {
            let ox = i as f64 * lat.basis[0][0] + j as f64 * lat.basis[1][0];
            let oy = i as f64 * lat.basis[0][1] + j as f64 * lat.basis[1][1];
            for (m, off) in lat.motif.iter().enumerate() {
                let x = ox + off[0];
                let y = oy + off[1];
                if (x * x + y * y).sqrt() <= cutoff {
                    ids.insert((i, j, m), coords.len());
                    coords.push([x, y]);
                }
            }
        }
    }

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); coords.len()];
    for (&(i, j, m), &a) in ids.iter() {
        for &(ma, mb, (di, dj)) in &lat.edges {
            if ma != m {
                continue;
            }
            if let Some(&b) = ids.get(&(i + di, j + dj, mb)) {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }

    // Center: vertex nearest the origin, lowest id on ties.
    let center = (0..coords.len())
        .min_by(|&a, &b| {
            let da = coords[a][0].hypot(coords[a][1]);
            let db = coords[b][0].hypot(coords[b][1]);
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        })
        .ok_or_else(|| Error::InvalidParameter("empty tiling patch".into()))?;

    // Hop distances on the oversized patch; keep the target ball, center first.
    let dist = bfs(&adjacency, center);
    let mut keep: Vec<usize> = (0..coords.len())
        .filter(|&v| v != center && dist[v] <= hop_target)
        .collect();
    keep.insert(0, center);
    let mut new_id = vec![usize::MAX; coords.len()];
    for (ni, &v) in keep.iter().enumerate() {
        new_id[v] = ni;
    }

    // Rotation by angular order; restriction to the kept set preserves the
    // cyclic order.
    let mut rotation: Vec<Vec<usize>> = Vec::with_capacity(keep.len());
    for &v in &keep {
        let mut nbrs: Vec<usize> = adjacency[v]
            .iter()
            .copied()
            .filter(|&u| new_id[u] != usize::MAX)
            .collect();
        nbrs.sort_by(|&a, &b| {
            let ta = (coords[a][1] - coords[v][1]).atan2(coords[a][0] - coords[v][0]);
            let tb = (coords[b][1] - coords[v][1]).atan2(coords[b][0] - coords[v][0]);
            ta.partial_cmp(&tb).unwrap()
        });
        rotation.push(nbrs.into_iter().map(|u| new_id[u]).collect());
    }

    let graph = from_rotation_auto_boundary(rotation)?;
    // The requested ball must sit strictly inside the truncation.
    graph.ball(0, spec.radius)?;
    Ok(GeneratedPatch { graph, center: 0 })
}

fn bfs(adjacency: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adjacency.len()];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &u in &adjacency[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Builds a graph from a rotation system of a disk-like patch, deriving the
/// boundary flags: the outer region is the unique longest traced face, and
/// its vertices are the truncation rim.
pub fn from_rotation_auto_boundary(rotation: Vec<Vec<usize>>) -> Result<SemiplanarGraph> {
    // Trace with everything flagged as boundary: validation then only checks
    // simplicity, and we can read the face cycles back.
    let all: Vec<usize> = (0..rotation.len()).collect();
    let probe = SemiplanarGraph::from_rotation(rotation.clone(), &all)?;
    let mut cycles: Vec<Vec<usize>> = probe.faces().to_vec();
    if let Some(outer) = probe.outer_face() {
        cycles.push(outer.to_vec());
    }
    let longest = cycles.iter().map(Vec::len).max().unwrap_or(0);
    let candidates: Vec<&Vec<usize>> = cycles.iter().filter(|c| c.len() == longest).collect();
    if candidates.len() != 1 {
        return Err(Error::FileFormat {
            detail: format!("ambiguous outer face: {} cycles of length {longest}", candidates.len()),
        });
    }
    let mut rim: Vec<usize> = candidates[0].clone();
    rim.sort_unstable();
    rim.dedup();
    SemiplanarGraph::from_rotation(rotation, &rim)
}

/// On-disk graph format. Faces are always recomputed, never trusted from the
/// file.
#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    vertices: usize,
    rotation: Vec<Vec<usize>>,
    #[serde(default)]
    boundary: Vec<usize>,
}

/// Serializes a validated graph.
pub fn save_graph<P: AsRef<Path>>(graph: &SemiplanarGraph, path: P) -> Result<()> {
    let file = GraphFile {
        vertices: graph.vertex_count(),
        rotation: (0..graph.vertex_count())
            .map(|v| graph.neighbors(v).to_vec())
            .collect(),
        boundary: graph.boundary_vertices(),
    };
    let text = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Parses and validates a graph file.
pub fn load_graph<P: AsRef<Path>>(path: P) -> Result<SemiplanarGraph> {
    let text = std::fs::read_to_string(&path)?;
    let file: GraphFile = serde_json::from_str(&text)?;
    if file.rotation.len() != file.vertices {
        return Err(Error::FileFormat {
            detail: format!(
                "vertex count {} does not match rotation table length {}",
                file.vertices,
                file.rotation.len()
            ),
        });
    }
    for (v, nbrs) in file.rotation.iter().enumerate() {
        for &u in nbrs {
            if u >= file.vertices {
                return Err(Error::FileFormat {
                    detail: format!("rotation entry for vertex {v} names unknown vertex {u}"),
                });
            }
        }
    }
    SemiplanarGraph::from_rotation(file.rotation, &file.boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Curvature;

    fn cyclic_eq(a: &[usize], b: &[usize]) -> bool {
        if a.len() != b.len() {
            return false;
        }
        let n = a.len();
        for rev in [false, true] {
            let seq: Vec<usize> = if rev {
                b.iter().rev().copied().collect()
            } else {
                b.to_vec()
            };
            for shift in 0..n {
                if (0..n).all(|i| a[i] == seq[(i + shift) % n]) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn all_kinds_generate_flat_validated_patches() {
        for kind in TilingKind::ALL {
            let patch = generate(TilingSpec { kind, radius: 2 }).unwrap();
            let g = &patch.graph;
            assert_eq!(g.max_face_degree(), kind.max_face_degree(), "{kind}");
            let zero = Curvature::new(0, 1);
            let check = g.nonnegative_curvature();
            assert!(check.all_nonnegative, "{kind}");
            for v in 0..g.vertex_count() {
                if !g.is_boundary(v) {
                    assert_eq!(g.vertex_curvature(v).unwrap(), zero, "{kind} vertex {v}");
                    assert!(
                        cyclic_eq(&g.vertex_pattern(v).unwrap(), kind.pattern()),
                        "{kind} vertex {v}: {:?}",
                        g.vertex_pattern(v).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn square_ball_counts_match_closed_form() {
        let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 6 }).unwrap();
        for r in 0..=6 {
            let ball = patch.graph.ball(patch.center, r).unwrap();
            assert_eq!(ball.count, 2 * r * r + 2 * r + 1, "radius {r}");
            assert_eq!(ball.volume, 4 * ball.count);
        }
    }

    #[test]
    fn hex_ball_small_counts() {
        // Hand enumeration: center, 3 neighbors, then 6 at distance two.
        let patch = generate(TilingSpec { kind: TilingKind::Hexagonal, radius: 3 }).unwrap();
        let counts: Vec<usize> = (0..=2)
            .map(|r| patch.graph.ball(patch.center, r).unwrap().count)
            .collect();
        assert_eq!(counts, vec![1, 4, 10]);
        assert_eq!(patch.graph.ball(patch.center, 1).unwrap().volume, 12);
    }

    #[test]
    fn triangular_ball_counts_match_closed_form() {
        let patch = generate(TilingSpec { kind: TilingKind::Triangular, radius: 5 }).unwrap();
        for r in 0..=5 {
            let ball = patch.graph.ball(patch.center, r).unwrap();
            assert_eq!(ball.count, 3 * r * r + 3 * r + 1, "radius {r}");
        }
    }

    #[test]
    fn generated_ball_monotone_and_rooted() {
        let patch = generate(TilingSpec { kind: TilingKind::TruncatedSquare, radius: 4 }).unwrap();
        let mut prev = 0;
        for r in 0..=4 {
            let count = patch.graph.ball(patch.center, r).unwrap().count;
            assert!(count > prev);
            prev = count;
        }
        assert_eq!(patch.graph.ball(patch.center, 0).unwrap().volume, 3);
    }

    #[test]
    fn unsupported_pattern_is_an_error() {
        assert!(matches!(
            "5.5.5".parse::<TilingKind>(),
            Err(Error::UnsupportedPattern(_))
        ));
    }

    #[test]
    fn save_load_round_trip_preserves_curvature_profile() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        let patch = generate(TilingSpec { kind: TilingKind::SnubSquare, radius: 3 }).unwrap();
        save_graph(&patch.graph, &path).unwrap();
        let loaded = load_graph(&path).unwrap();
        assert_eq!(loaded.vertex_count(), patch.graph.vertex_count());
        assert_eq!(loaded.face_count(), patch.graph.face_count());
        for v in 0..loaded.vertex_count() {
            assert_eq!(loaded.is_boundary(v), patch.graph.is_boundary(v));
            if !loaded.is_boundary(v) {
                assert_eq!(
                    loaded.vertex_curvature(v).unwrap(),
                    patch.graph.vertex_curvature(v).unwrap()
                );
            }
        }
    }

    #[test]
    fn malformed_rotation_entry_names_the_vertex() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(
            &path,
            r#"{ "vertices": 2, "rotation": [[1], [0, 7]], "boundary": [0, 1] }"#,
        )
        .unwrap();
        match load_graph(&path) {
            Err(Error::FileFormat { detail }) => {
                assert!(detail.contains("vertex 1"), "{detail}");
                assert!(detail.contains('7'), "{detail}");
            }
            other => panic!("expected file format error, got {other:?}"),
        }
    }

    /// Cap of three pentagons around a degree-3 hub.
    #[test]
    fn pentagon_cap_loads_with_positive_center_curvature() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cap.json");
        // Hub 0; ring a=1, b=2, d=3; rim x1..x6 = 4..9.
        // Pentagons: (0,1,4,5,2), (0,2,6,7,3), (0,3,8,9,1).
        let file = serde_json::json!({
            "vertices": 10,
            "rotation": [
                [1, 2, 3],
                [0, 9, 4],
                [0, 5, 6],
                [0, 7, 8],
                [1, 5],
                [4, 2],
                [2, 7],
                [6, 3],
                [3, 9],
                [8, 1],
            ],
            "boundary": [1, 2, 3, 4, 5, 6, 7, 8, 9],
        });
        std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
        let g = load_graph(&path).unwrap();
        assert_eq!(g.vertex_pattern(0).unwrap(), vec![5, 5, 5]);
        assert_eq!(g.vertex_curvature(0).unwrap(), Curvature::new(1, 10));
    }
}
