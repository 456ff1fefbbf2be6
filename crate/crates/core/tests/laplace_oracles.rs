//! Solver oracles on the square lattice, where discrete harmonic polynomials
//! give exact reference solutions.

use semiplanar::field::ScalarField;
use semiplanar::laplace::{graph_mean_value_ratio, harnack_ratio, laplacian_at, DirichletProblem};
use semiplanar::surface::planar_layout;
use semiplanar::tiling::{generate, TilingKind, TilingSpec};
use semiplanar::{GeneratedPatch, PlanarLayout};

fn square(radius: usize) -> (GeneratedPatch, PlanarLayout) {
    let patch = generate(TilingSpec { kind: TilingKind::Square, radius }).unwrap();
    let layout = planar_layout(&patch.graph).unwrap();
    (patch, layout)
}

fn lattice_field(
    patch: &GeneratedPatch,
    layout: &PlanarLayout,
    f: impl Fn(f64, f64) -> f64,
) -> ScalarField {
    let origin = layout.require(patch.center).unwrap();
    ScalarField::full(
        (0..patch.graph.vertex_count())
            .map(|v| {
                layout
                    .get(v)
                    .map_or(0.0, |c| f((c[0] - origin[0]).round(), (c[1] - origin[1]).round()))
            })
            .collect(),
    )
}

#[test]
fn laplacian_of_coordinate_and_square() {
    let (patch, layout) = square(4);
    let g = &patch.graph;
    let x = lattice_field(&patch, &layout, |x, _| x);
    assert_eq!(laplacian_at(g, &x, patch.center).unwrap(), 0.0);
    let x2 = lattice_field(&patch, &layout, |x, _| x * x);
    // (1/4)((1)^2 + (-1)^2 + 0 + 0) = 1/2.
    assert!((laplacian_at(g, &x2, patch.center).unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn manhattan_distance_oracle() {
    let (patch, layout) = square(9);
    let g = &patch.graph;
    let origin = layout.require(patch.center).unwrap();
    let find = |dx: f64, dy: f64| {
        (0..g.vertex_count())
            .find(|&v| {
                layout.get(v).is_some_and(|c| {
                    (c[0] - origin[0] - dx).abs() < 1e-9 && (c[1] - origin[1] - dy).abs() < 1e-9
                })
            })
            .unwrap()
    };
    let target = find(3.0, 4.0);
    assert_eq!(g.distance(patch.center, target).unwrap(), 7);
    assert_eq!(g.distance(target, patch.center).unwrap(), 7);
    // Triangle inequality through an intermediate vertex.
    let mid = find(3.0, 0.0);
    assert!(
        g.distance(patch.center, target).unwrap()
            <= g.distance(patch.center, mid).unwrap() + g.distance(mid, target).unwrap()
    );
}

#[test]
fn dirichlet_reproduces_discrete_harmonic_polynomials() {
    let (patch, layout) = square(8);
    let g = &patch.graph;
    let polys: Vec<(&str, Box<dyn Fn(f64, f64) -> f64>)> = vec![
        ("x", Box::new(|x, _| x)),
        ("y", Box::new(|_, y| y)),
        ("xy", Box::new(|x, y| x * y)),
        ("x2-y2", Box::new(|x, y| x * x - y * y)),
    ];
    for (name, f) in &polys {
        let exact = lattice_field(&patch, &layout, f);
        let problem = DirichletProblem::on_ball(g, patch.center, 6, |v| exact.value(v).unwrap())
            .unwrap();
        let (solved, report) = problem.solve().unwrap();
        assert!(report.max_residual <= 1e-12);
        for &v in problem.interior() {
            let err = (solved.value(v).unwrap() - exact.value(v).unwrap()).abs();
            assert!(err <= 1e-9, "{name} at {v}: {err:.3e}");
        }
    }
}

#[test]
fn harnack_ratio_affine_example() {
    // f = 10 + x on B_2 is harmonic and positive: max/min = 12/8.
    let (patch, layout) = square(6);
    let g = &patch.graph;
    let origin = layout.require(patch.center).unwrap();
    let f = ScalarField::full(
        (0..g.vertex_count())
            .map(|v| layout.get(v).map_or(10.0, |c| 10.0 + (c[0] - origin[0]).round()))
            .collect(),
    );
    // Supply the field restricted to the ball so the positivity check covers
    // exactly the supplied patch.
    let ball = g.ball(patch.center, 2).unwrap();
    let entries: Vec<(usize, f64)> = ball
        .members
        .iter()
        .map(|&v| (v, f.value(v).unwrap()))
        .collect();
    let restricted = ScalarField::on_support(g.vertex_count(), &entries);
    let ratio = harnack_ratio(g, patch.center, 2, &restricted, 1e-9).unwrap();
    assert!((ratio - 1.5).abs() < 1e-12, "{ratio}");
}

#[test]
fn mean_value_ratio_vanishes_for_odd_harmonics() {
    let (patch, layout) = square(6);
    let g = &patch.graph;
    let x = lattice_field(&patch, &layout, |x, _| x);
    let ratio = graph_mean_value_ratio(g, patch.center, 2, &x, 1e-9).unwrap();
    assert_eq!(ratio, 0.0);
}
