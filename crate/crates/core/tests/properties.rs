//! Property tests for the structural invariants.

use proptest::prelude::*;
use semiplanar::extension::{disk_to_polygon, polygon_to_disk, FaceFourier};
use semiplanar::surface::FaceGeometry;

proptest! {
    /// The sector map and its inverse are mutually inverse everywhere inside
    /// the polygon, and the boundary lands on the circle.
    #[test]
    fn sector_map_round_trip(
        n in 3usize..=12,
        frac in 0.0f64..=1.0,
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let geom = FaceGeometry::new(n).unwrap();
        let r = frac * geom.boundary_radius(theta);
        let (rho, eta) = polygon_to_disk(n, r, theta).unwrap();
        prop_assert!(rho <= geom.circumradius + 1e-12);
        let (r2, t2) = disk_to_polygon(n, rho, eta).unwrap();
        prop_assert!((r2 - r).abs() < 1e-12);
        prop_assert!((t2 - theta.rem_euclid(std::f64::consts::TAU)).abs() < 1e-12);
        if frac == 1.0 {
            prop_assert!((rho - geom.circumradius).abs() < 1e-9);
        }
    }

    /// The gradient-versus-tangent coefficient inequality holds for every
    /// computed coefficient set, whatever the boundary samples.
    #[test]
    fn coefficient_energy_inequality(
        n in 3usize..=12,
        seed in 0u64..1000,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..256).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let data = FaceFourier::from_samples(0, n, 16, &samples).unwrap();
        let energy = data.energy();
        prop_assert!(energy.coefficient_inequality_holds());
        prop_assert!(energy.dirichlet_energy >= 0.0);
        prop_assert!(energy.boundary_mass >= 0.0);
    }
}
