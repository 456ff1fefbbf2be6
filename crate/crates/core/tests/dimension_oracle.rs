//! Dimension estimates on the square lattice against the brute-force
//! harmonic-polynomial oracle: the discrete harmonic polynomials of degree
//! at most one are spanned by {1, x, y}, and degree two adds {xy, x^2-y^2},
//! so the estimates must come out 3 and 5 (and 1 for sublinear growth).

use semiplanar::analysis::estimate_dimension;
use semiplanar::field::ScalarField;
use semiplanar::laplace::{laplacian_at, max_residual};
use semiplanar::surface::planar_layout;
use semiplanar::tiling::{generate, TilingKind, TilingSpec};

fn lattice_field(
    patch: &semiplanar::GeneratedPatch,
    layout: &semiplanar::PlanarLayout,
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
fn harmonic_polynomial_oracle() {
    let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 8 }).unwrap();
    let g = &patch.graph;
    let layout = planar_layout(g).unwrap();
    // The five generators are discrete harmonic: Lf = 0 pointwise.
    let fields = [
        lattice_field(&patch, &layout, |_, _| 1.0),
        lattice_field(&patch, &layout, |x, _| x),
        lattice_field(&patch, &layout, |_, y| y),
        lattice_field(&patch, &layout, |x, y| x * y),
        lattice_field(&patch, &layout, |x, y| x * x - y * y),
    ];
    let ball = g.ball(patch.center, 5).unwrap();
    for f in &fields {
        assert!(max_residual(g, f, &ball.members).unwrap() < 1e-12);
    }
    // x^2 alone is not harmonic: the Laplacian is 1/2 at the center.
    let x2 = lattice_field(&patch, &layout, |x, _| x * x);
    assert!((laplacian_at(g, &x2, patch.center).unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn quadratic_growth_dimension_is_five_across_cutoffs() {
    let patch = generate(TilingSpec { kind: TilingKind::Square, radius: 36 }).unwrap();
    let layout = planar_layout(&patch.graph).unwrap();
    for tau in [1e-6, 1e-8, 1e-10] {
        let est = estimate_dimension(
            &patch.graph,
            &layout,
            patch.center,
            2.0,
            &[4, 6, 8, 10],
            tau,
        )
        .unwrap();
        assert_eq!(est.estimated, 5, "tau={tau:e}: {:#?}", est.diagnostics);
    }
}
