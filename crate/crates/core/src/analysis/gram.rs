//! Gram matrices of field families over balls, in exact graph mode (degree
//! weighted vertex sums) and quadrature surface mode (integrals of
//! extensions), with the trace bounds used by the dimension estimate.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::extension::ExtendedField;
use crate::field::ScalarField;
use crate::graph::SemiplanarGraph;
use crate::surface::{smooth_indicator, MetricMesh, SurfacePoint};

use super::{InequalityId, InequalityReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramMode {
    /// Exact finite sums `sum u_i u_j d_x` over a graph ball.
    Graph,
    /// Quadrature integrals of extensions over a surface ball.
    Surface,
}

/// Symmetric matrix of pairwise ball inner products with its eigenvalues.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub descriptors: Vec<String>,
    pub center: String,
    pub radius: f64,
    pub mode: GramMode,
    pub entries: Vec<Vec<f64>>,
    /// Descending.
    pub eigenvalues: Vec<f64>,
}

impl GramMatrix {
    /// Exact graph-mode Gram over `B_R(p)`.
    pub fn graph_mode(
        graph: &SemiplanarGraph,
        fields: &[(String, &ScalarField)],
        p: usize,
        radius: usize,
    ) -> Result<Self> {
        let ball = graph.ball(p, radius)?;
        let k = fields.len();
        let mut entries = vec![vec![0.0; k]; k];
        for &v in &ball.members {
            let d = graph.degree(v) as f64;
            let values: Vec<f64> = fields
                .iter()
                .map(|(_, f)| f.value(v))
                .collect::<Result<_>>()?;
            for i in 0..k {
                for j in i..k {
                    entries[i][j] += values[i] * values[j] * d;
                }
            }
        }
        for i in 0..k {
            for j in 0..i {
                entries[i][j] = entries[j][i];
            }
        }
        let eigenvalues = symmetric_eigenvalues(&entries);
        Ok(Self {
            descriptors: fields.iter().map(|(n, _)| n.clone()).collect(),
            center: format!("vertex {p}"),
            radius: radius as f64,
            mode: GramMode::Graph,
            entries,
            eigenvalues,
        })
    }

    /// Surface-mode Grams of the same basis at several radii, sharing one
    /// ball scan.
    pub fn surface_mode_multi(
        mesh: &MetricMesh,
        extensions: &[(String, &ExtendedField)],
        p: &SurfacePoint,
        radii: &[f64],
    ) -> Result<Vec<Self>> {
        let k = extensions.len();
        let r_max = radii.iter().copied().fold(0.0, f64::max);
        let h = mesh.h;
        let mut acc = vec![vec![vec![0.0; k]; k]; radii.len()];
        let mut scan_error: Option<Error> = None;
        mesh.for_each_ball_node(p, r_max, |face, local, d, w| {
            if scan_error.is_some() {
                return;
            }
            let point = SurfacePoint {
                face,
                r: local[0].hypot(local[1]),
                theta: local[1].atan2(local[0]),
            };
            let mut values = Vec::with_capacity(k);
            for (_, e) in extensions {
                match e.evaluate(&point) {
                    Ok(x) => values.push(x),
                    Err(err) => {
                        scan_error = Some(err);
                        return;
                    }
                }
            }
            for (ri, &radius) in radii.iter().enumerate() {
                let ind = w * smooth_indicator(d, radius, h);
                if ind > 0.0 {
                    for i in 0..k {
                        for j in i..k {
                            acc[ri][i][j] += ind * values[i] * values[j];
                        }
                    }
                }
            }
        })?;
        if let Some(err) = scan_error {
            return Err(err);
        }
        Ok(acc
            .into_iter()
            .zip(radii)
            .map(|(mut entries, &radius)| {
                for i in 0..k {
                    for j in 0..i {
                        entries[i][j] = entries[j][i];
                    }
                }
                let eigenvalues = symmetric_eigenvalues(&entries);
                Self {
                    descriptors: extensions.iter().map(|(n, _)| n.clone()).collect(),
                    center: format!("face {} (r={:.3}, theta={:.3})", p.face, p.r, p.theta),
                    radius,
                    mode: GramMode::Surface,
                    entries,
                    eigenvalues,
                }
            })
            .collect())
    }

    pub fn surface_mode(
        mesh: &MetricMesh,
        extensions: &[(String, &ExtendedField)],
        p: &SurfacePoint,
        radius: f64,
    ) -> Result<Self> {
        Ok(Self::surface_mode_multi(mesh, extensions, p, &[radius])?.remove(0))
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[i][i]).sum()
    }

    /// Count of eigenvalues above `tau` relative to the largest.
    pub fn numerical_rank(&self, tau: f64) -> usize {
        let top = self.eigenvalues.first().copied().unwrap_or(0.0);
        if top <= 0.0 {
            return 0;
        }
        self.eigenvalues.iter().filter(|&&l| l > tau * top).count()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        let k = self.dim();
        DMatrix::from_fn(k, k, |i, j| self.entries[i][j])
    }
}

pub(crate) fn symmetric_eigenvalues(entries: &[Vec<f64>]) -> Vec<f64> {
    let k = entries.len();
    if k == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_fn(k, k, |i, j| entries[i][j]);
    let mut eigen: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigen.sort_by(|a, b| b.total_cmp(a));
    eigen
}

/// Basis-independent trace of the radius-`R` Gram against an orthonormal
/// basis for the expanded-radius Gram: `tr(M^{-1} A)` via Cholesky.
fn orthonormal_trace(outer: &GramMatrix, inner: &GramMatrix) -> Result<f64> {
    let m = outer.to_dmatrix();
    let a = inner.to_dmatrix();
    let chol = m.cholesky().ok_or(Error::GramNotPositiveDefinite)?;
    // tr(M^{-1} A): solve M X = A and take the trace.
    let x = chol.solve(&a);
    Ok(x.trace())
}

#[derive(Debug, Clone)]
pub struct TraceLowerReport {
    /// Per schedule radius: orthonormalized trace `sum A_R(u_i, u_i)`.
    pub rows: Vec<(usize, f64)>,
    pub threshold: f64,
    /// First schedule radius meeting the threshold.
    pub passing_radius: Option<usize>,
    pub report: InequalityReport,
}

/// For each schedule radius `R`, orthonormalizes the basis against the Gram
/// at `beta R` and measures the trace of the radius-`R` Gram; the lower
/// bound asserts some radius reaches `k beta^{-(2d+2+delta)}`.
pub fn trace_lower_check(
    graph: &SemiplanarGraph,
    descriptor: &str,
    fields: &[(String, &ScalarField)],
    p: usize,
    d: f64,
    beta: f64,
    delta: f64,
    schedule: &[usize],
) -> Result<TraceLowerReport> {
    if beta < 1.0 || delta < 0.0 {
        return Err(Error::InvalidParameter("need beta >= 1 and delta >= 0".into()));
    }
    let k = fields.len();
    let threshold = k as f64 * beta.powf(-(2.0 * d + 2.0 + delta));
    let mut rows = Vec::with_capacity(schedule.len());
    let mut passing = None;
    let mut best: f64 = 0.0;
    for &r in schedule {
        let inner = GramMatrix::graph_mode(graph, fields, p, r)?;
        let outer_radius = (beta * r as f64).ceil() as usize;
        let outer = GramMatrix::graph_mode(graph, fields, p, outer_radius)?;
        let trace = orthonormal_trace(&outer, &inner)?;
        if trace >= threshold && passing.is_none() {
            passing = Some(r);
        }
        best = best.max(trace);
        rows.push((r, trace));
    }
    let report = InequalityReport {
        id: InequalityId::TraceLower,
        graph: descriptor.to_string(),
        sample: format!(
            "p={p} k={k} d={d} beta={beta} delta={delta} schedule={schedule:?}"
        ),
        measured: best,
        bound: Some(threshold),
        pass: Some(passing.is_some()),
    };
    Ok(TraceLowerReport { rows, threshold, passing_radius: passing, report })
}

/// Trace of the surface Gram at `R` against the largest eigenvalue of the
/// Gram at `(1+eps)R` in the same basis; the ratio is the measured
/// `C(D)/eps` factor.
pub fn trace_upper_check(
    mesh: &MetricMesh,
    descriptor: &str,
    extensions: &[(String, &ExtendedField)],
    p: &SurfacePoint,
    radius: f64,
    eps: f64,
) -> Result<InequalityReport> {
    if !(0.0 < eps && eps < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1/2), got {eps}"
        )));
    }
    let grams =
        GramMatrix::surface_mode_multi(mesh, extensions, p, &[radius, (1.0 + eps) * radius])?;
    let trace = grams[0].trace();
    let sup = grams[1].eigenvalues.first().copied().unwrap_or(0.0);
    let measured = if sup > 0.0 { trace / sup } else { f64::INFINITY };
    Ok(InequalityReport {
        id: InequalityId::TraceUpper,
        graph: descriptor.to_string(),
        sample: format!(
            "k={} R={radius} eps={eps} trace={trace:.6} sup={sup:.6}",
            extensions.len()
        ),
        measured,
        bound: None,
        pass: None,
    })
}
