//! The graph Laplacian `Lf(x) = (1/d_x) sum over y ~ x of (f(y) - f(x))`,
//! Dirichlet solves on finite domains, and the graph-side Harnack and mean
//! value measurements.
//!
//! The Dirichlet system is assembled in combinatorial form (multiply through
//! by d_x), which is symmetric positive definite whenever the domain is
//! finite and attached to its boundary, and solved by conjugate gradients
//! with a Jacobi fallback. Iteration order is the vertex order, so solves are
//! deterministic.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::graph::SemiplanarGraph;

/// Default max-norm residual target for `Lf` on the interior.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Default iteration budget.
pub const DEFAULT_MAX_ITERATIONS: usize = 1_000_000;
/// Default tolerance for "is harmonic" predicates, separate from solver
/// error.
pub const HARMONIC_TOLERANCE: f64 = 1e-9;

/// Pointwise Laplacian at `v`; every neighbor of `v` (and `v` itself) must
/// carry a value.
pub fn laplacian_at(graph: &SemiplanarGraph, field: &ScalarField, v: usize) -> Result<f64> {
    let fv = field.value(v)?;
    let mut acc = 0.0;
    for &u in graph.neighbors(v) {
        acc += field.value(u)? - fv;
    }
    Ok(acc / graph.degree(v) as f64)
}

/// Largest `|Lf|` over the vertices of `domain` (all of whose neighborhoods
/// must be covered by the field).
pub fn max_residual(graph: &SemiplanarGraph, field: &ScalarField, domain: &[usize]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &v in domain {
        worst = worst.max(laplacian_at(graph, field, v)?.abs());
    }
    Ok(worst)
}

/// Dirichlet problem on a finite interior set with prescribed boundary
/// values. The boundary is exactly the set of vertices at hop distance 1
/// from the interior.
#[derive(Debug, Clone)]
pub struct DirichletProblem<'g> {
    graph: &'g SemiplanarGraph,
    interior: Vec<usize>,
    boundary: Vec<(usize, f64)>,
    pub tolerance: f64,
    pub max_iterations: usize,
}

/// How a solve finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ConjugateGradient,
    JacobiFallback,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    pub max_residual: f64,
    pub method: SolveMethod,
}

impl<'g> DirichletProblem<'g> {
    /// Interior set plus a boundary value function; the boundary set is
    /// derived, never supplied.
    pub fn new(
        graph: &'g SemiplanarGraph,
        interior: Vec<usize>,
        boundary_values: impl Fn(usize) -> f64,
    ) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::InvalidParameter("empty Dirichlet interior".into()));
        }
        let mut inside = vec![false; graph.vertex_count()];
        for &v in &interior {
            inside[v] = true;
        }
        let mut boundary = Vec::new();
        let mut on_boundary = vec![false; graph.vertex_count()];
        for &v in &interior {
            for &u in graph.neighbors(v) {
                if !inside[u] && !on_boundary[u] {
                    on_boundary[u] = true;
                    boundary.push((u, boundary_values(u)));
                }
            }
        }
        if boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        boundary.sort_by_key(|&(v, _)| v);
        Ok(Self {
            graph,
            interior,
            boundary,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        })
    }

    /// Dirichlet problem whose interior is the ball `B_R(p)`.
    pub fn on_ball(
        graph: &'g SemiplanarGraph,
        p: usize,
        radius: usize,
        boundary_values: impl Fn(usize) -> f64,
    ) -> Result<Self> {
        let ball = graph.ball(p, radius)?;
        Self::new(graph, ball.members, boundary_values)
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[(usize, f64)] {
        &self.boundary
    }

    /// Solves `Lf = 0` on the interior with the stored boundary values.
    pub fn solve(&self) -> Result<(ScalarField, SolveReport)> {
        let n = self.graph.vertex_count();
        let mut index = vec![usize::MAX; n];
        for (i, &v) in self.interior.iter().enumerate() {
            index[v] = i;
        }
        let mut bval = vec![0.0; n];
        let mut is_boundary = vec![false; n];
        for &(v, x) in &self.boundary {
            bval[v] = x;
            is_boundary[v] = true;
        }

        let m = self.interior.len();
        let degrees: Vec<f64> = self.interior.iter().map(|&v| self.graph.degree(v) as f64).collect();
        // Combinatorial system A x = b with A = D - Adj restricted to the
        // interior; b collects boundary contributions.
        let mut b = vec![0.0; m];
        for (i, &v) in self.interior.iter().enumerate() {
            for &u in self.graph.neighbors(v) {
                if is_boundary[u] {
                    b[i] += bval[u];
                }
            }
        }
        let matvec = |x: &[f64], y: &mut [f64]| {
            for (i, &v) in self.interior.iter().enumerate() {
                let mut acc = degrees[i] * x[i];
                for &u in self.graph.neighbors(v) {
                    let j = index[u];
                    if j != usize::MAX {
                        acc -= x[j];
                    }
                }
                y[i] = acc;
            }
        };
        // Residual in the normalized (Lf) sense.
        let linf = |r: &[f64]| {
            r.iter()
                .zip(&degrees)
                .map(|(ri, di)| (ri / di).abs())
                .fold(0.0f64, f64::max)
        };

        let mut x = vec![0.0; m];
        let mut r = b.clone();
        let mut p = r.clone();
        let mut ap = vec![0.0; m];
        let mut rr: f64 = r.iter().map(|v| v * v).sum();
        let mut iterations = 0;
        let mut method = SolveMethod::ConjugateGradient;
        let mut stalled = false;
        while linf(&r) > self.tolerance {
            if iterations >= self.max_iterations {
                stalled = true;
                break;
            }
            matvec(&p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if !(pap > 0.0) || !pap.is_finite() {
                stalled = true;
                break;
            }
            let alpha = rr / pap;
            for i in 0..m {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new: f64 = r.iter().map(|v| v * v).sum();
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..m {
                p[i] = r[i] + beta * p[i];
            }
            iterations += 1;
        }

        if stalled {
            // Damped-free Jacobi sweeps from the current iterate.
            method = SolveMethod::JacobiFallback;
            let mut jac_iter = 0;
            loop {
                matvec(&x, &mut ap);
                for i in 0..m {
                    r[i] = b[i] - ap[i];
                }
                if linf(&r) <= self.tolerance {
                    break;
                }
                if jac_iter >= self.max_iterations {
                    return Err(Error::NonConvergence {
                        residual: linf(&r),
                        iterations: iterations + jac_iter,
                    });
                }
                for i in 0..m {
                    x[i] += r[i] / degrees[i];
                }
                jac_iter += 1;
            }
            iterations += jac_iter;
        }

        let mut entries: Vec<(usize, f64)> = self
            .interior
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, x[i]))
            .collect();
        entries.extend(self.boundary.iter().copied());
        let field = ScalarField::on_support(n, &entries);

        matvec(&x, &mut ap);
        for i in 0..m {
            r[i] = b[i] - ap[i];
        }
        Ok((
            field,
            SolveReport {
                iterations,
                max_residual: linf(&r),
                method,
            },
        ))
    }
}

/// Ratio `max f / min f` over the ball `B_R(p)` for a strictly positive
/// field that is harmonic (up to `harmonic_tol`) on its whole supplied
/// support.
pub fn harnack_ratio(
    graph: &SemiplanarGraph,
    p: usize,
    radius: usize,
    field: &ScalarField,
    harmonic_tol: f64,
) -> Result<f64> {
    for v in field.support_vertices() {
        let x = field.value(v)?;
        if x <= 0.0 {
            return Err(Error::NotPositive { vertex: v, value: x });
        }
    }
    check_harmonic_where_defined(graph, field, harmonic_tol)?;
    let ball = graph.ball(p, radius)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &ball.members {
        let x = field.value(v)?;
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Ok(hi / lo)
}

/// Graph mean value ratio `f(p)^2 |B_R(p)| / sum over the ball of f^2 d_x`
/// for a field harmonic on the ball. Zero fields give 0 by convention.
pub fn graph_mean_value_ratio(
    graph: &SemiplanarGraph,
    p: usize,
    radius: usize,
    field: &ScalarField,
    harmonic_tol: f64,
) -> Result<f64> {
    let ball = graph.ball(p, radius)?;
    for &v in &ball.members {
        let lf = laplacian_at(graph, field, v)?;
        if lf.abs() > harmonic_tol {
            return Err(Error::NotHarmonic { vertex: v, residual: lf.abs() });
        }
    }
    let mut denom = 0.0;
    for &v in &ball.members {
        let x = field.value(v)?;
        denom += x * x * graph.degree(v) as f64;
    }
    if denom == 0.0 {
        return Ok(0.0);
    }
    let fp = field.value(p)?;
    Ok(fp * fp * ball.volume as f64 / denom)
}

/// Residual check at every support vertex whose full neighborhood is
/// covered.
fn check_harmonic_where_defined(
    graph: &SemiplanarGraph,
    field: &ScalarField,
    tol: f64,
) -> Result<()> {
    for v in field.support_vertices() {
        if graph.neighbors(v).iter().all(|&u| field.is_defined(u)) {
            let lf = laplacian_at(graph, field, v)?;
            if lf.abs() > tol {
                return Err(Error::NotHarmonic { vertex: v, residual: lf.abs() });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SemiplanarGraph;
    use crate::tiling::{generate, TilingKind, TilingSpec};

    fn square_patch(radius: usize) -> crate::tiling::GeneratedPatch {
        generate(TilingSpec { kind: TilingKind::Square, radius }).unwrap()
    }

    #[test]
    fn constant_boundary_solves_to_constant() {
        let patch = square_patch(4);
        let problem = DirichletProblem::on_ball(&patch.graph, patch.center, 2, |_| 3.25).unwrap();
        let (f, report) = problem.solve().unwrap();
        assert!(report.max_residual <= DEFAULT_TOLERANCE);
        for v in f.support_vertices() {
            assert!((f.value(v).unwrap() - 3.25).abs() < 1e-10);
        }
    }

    #[test]
    fn maximum_principle_and_uniqueness() {
        let patch = square_patch(6);
        let g = &patch.graph;
        let data = ScalarField::random(g.vertex_count(), 42, -2.0, 2.0);
        let problem =
            DirichletProblem::on_ball(g, patch.center, 4, |v| data.value(v).unwrap()).unwrap();
        let (f, _) = problem.solve().unwrap();
        let (lo, hi) = problem
            .boundary()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, x)| {
                (lo.min(x), hi.max(x))
            });
        for &v in problem.interior() {
            let x = f.value(v).unwrap();
            assert!(x >= lo - 1e-12 && x <= hi + 1e-12);
        }
        let (f2, _) = problem.solve().unwrap();
        for &v in problem.interior() {
            assert!((f.value(v).unwrap() - f2.value(v).unwrap()).abs() <= 10.0 * DEFAULT_TOLERANCE);
        }
    }

    #[test]
    fn solves_are_linear() {
        let patch = square_patch(5);
        let g = &patch.graph;
        let d1 = ScalarField::random(g.vertex_count(), 1, -1.0, 1.0);
        let d2 = ScalarField::random(g.vertex_count(), 2, -1.0, 1.0);
        let (a, b) = (2.0, -0.75);
        let solve = |data: &ScalarField| {
            DirichletProblem::on_ball(g, patch.center, 3, |v| data.value(v).unwrap())
                .unwrap()
                .solve()
                .unwrap()
                .0
        };
        let f1 = solve(&d1);
        let f2 = solve(&d2);
        let combined = solve(&d1.combine(a, &d2, b));
        let expect = f1.combine(a, &f2, b);
        for v in expect.support_vertices() {
            assert!(
                (combined.value(v).unwrap() - expect.value(v).unwrap()).abs()
                    <= 10.0 * DEFAULT_TOLERANCE
            );
        }
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let patch = square_patch(3);
        let g = &patch.graph;
        let f = ScalarField::constant(g.vertex_count(), 5.0);
        for v in 0..g.vertex_count() {
            assert_eq!(laplacian_at(g, &f, v).unwrap(), 0.0);
        }
    }

    #[test]
    fn missing_neighbor_value_is_an_error() {
        let patch = square_patch(3);
        let f = ScalarField::on_support(patch.graph.vertex_count(), &[(patch.center, 1.0)]);
        assert!(matches!(
            laplacian_at(&patch.graph, &f, patch.center),
            Err(Error::MissingValue { .. })
        ));
    }

    #[test]
    fn empty_boundary_is_detected() {
        // On a closed graph the whole vertex set has no boundary.
        let rotation = vec![
            vec![1, 4, 3],
            vec![2, 5, 0],
            vec![3, 6, 1],
            vec![2, 0, 7],
            vec![5, 7, 0],
            vec![6, 4, 1],
            vec![2, 7, 5],
            vec![6, 3, 4],
        ];
        let g = SemiplanarGraph::from_rotation(rotation, &[]).unwrap();
        let err = DirichletProblem::new(&g, (0..8).collect(), |_| 0.0).unwrap_err();
        assert!(matches!(err, Error::EmptyBoundary));
    }

    #[test]
    fn harnack_ratio_on_constants_is_one() {
        let patch = square_patch(4);
        let f = ScalarField::constant(patch.graph.vertex_count(), 2.0);
        let r = harnack_ratio(&patch.graph, patch.center, 2, &f, 1e-9).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn harnack_rejects_nonpositive_fields() {
        let patch = square_patch(4);
        let f = ScalarField::constant(patch.graph.vertex_count(), 0.0);
        assert!(matches!(
            harnack_ratio(&patch.graph, patch.center, 2, &f, 1e-9),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn mean_value_ratio_conventions() {
        let patch = square_patch(4);
        let g = &patch.graph;
        let one = ScalarField::constant(g.vertex_count(), 1.0);
        assert_eq!(graph_mean_value_ratio(g, patch.center, 2, &one, 1e-9).unwrap(), 1.0);
        let zero = ScalarField::constant(g.vertex_count(), 0.0);
        assert_eq!(graph_mean_value_ratio(g, patch.center, 2, &zero, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn mean_value_requires_harmonicity() {
        let patch = square_patch(4);
        let g = &patch.graph;
        let f = ScalarField::random(g.vertex_count(), 9, 1.0, 2.0);
        assert!(matches!(
            graph_mean_value_ratio(g, patch.center, 2, &f, 1e-9),
            Err(Error::NotHarmonic { .. })
        ));
    }

}
