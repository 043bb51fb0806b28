//! Property-based tests for the selection pipeline: planted instances must
//! stay within the guaranteed constants, and the building blocks must obey
//! their algebraic laws on arbitrary inputs.

use lipsel_core::geometry::{nearest_pair, AffineSubspace, Cube};
use lipsel_core::metricspace::{
    lipschitz_seminorm, Metric, Modulus, PseudometricSpace, WeightedGraph,
};
use lipsel_core::selection::{select_affine, select_cube, validate_selection};
use lipsel_core::{max_norm_dist, Tolerances};
use proptest::prelude::*;

/// Points in a bounded box, at least two of them.
fn point_cloud(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        prop::collection::vec(-2.0f64..2.0, n..=n),
        2..7,
    )
}

fn space_of(points: &[Vec<f64>]) -> PseudometricSpace {
    PseudometricSpace::from_fn_trusted(points.len(), |i, j| {
        max_norm_dist(&points[i], &points[j])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The max-norm Lipschitz seminorm scales inversely with the metric.
    #[test]
    fn seminorm_scales_inversely_with_the_metric(
        points in point_cloud(3),
        scale in 0.25f64..4.0,
    ) {
        let s = space_of(&points);
        let scaled = PseudometricSpace::from_fn_trusted(points.len(), |i, j| {
            scale * s.dist(i, j)
        });
        let a = lipschitz_seminorm(&s, &points);
        let b = lipschitz_seminorm(&scaled, &points);
        if a.is_finite() {
            prop_assert!((b * scale - a).abs() <= 1e-9 * (1.0 + a));
        }
    }

    /// Selecting from zero-radius cubes placed on a 1-Lipschitz map returns
    /// that map up to rounding in the distance sums.
    #[test]
    fn zero_radius_cubes_force_the_planted_map(points in point_cloud(2)) {
        let s = space_of(&points);
        let cubes: Vec<Cube> = points
            .iter()
            .map(|p| Cube::new(p.clone(), 0.0).unwrap())
            .collect();
        let f = select_cube(&s, &cubes, 1e-9).unwrap();
        for (fi, pi) in f.iter().zip(&points) {
            prop_assert!(max_norm_dist(fi, pi) <= 1e-12 * (1.0 + lipsel_core::max_norm(pi)));
        }
    }

    /// Growing every cube keeps a compatible family compatible and the
    /// selection 1-Lipschitz and inside its cube.
    #[test]
    fn inflated_cubes_stay_selectable(
        points in point_cloud(2),
        radius in 0.0f64..1.5,
    ) {
        let s = space_of(&points);
        let cubes: Vec<Cube> = points
            .iter()
            .map(|p| Cube::new(p.clone(), radius).unwrap())
            .collect();
        let f = select_cube(&s, &cubes, 1e-9).unwrap();
        prop_assert!(lipschitz_seminorm(&s, &f) <= 1.0 + 1e-9);
        for (fi, c) in f.iter().zip(&cubes) {
            prop_assert!(c.contains(fi, 1e-9));
        }
    }

    /// The canonical nearest pair reports the same distance regardless of
    /// operand order.
    #[test]
    fn nearest_pair_distance_is_symmetric(
        p in prop::collection::vec(-2.0f64..2.0, 3),
        q in prop::collection::vec(-2.0f64..2.0, 3),
        d1 in prop::collection::vec(-1.0f64..1.0, 3),
        d2 in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        prop_assume!(d1.iter().any(|x| x.abs() > 1e-3));
        prop_assume!(d2.iter().any(|x| x.abs() > 1e-3));
        let u1 = AffineSubspace::span(p, &[d1]).unwrap();
        let u2 = AffineSubspace::span(q, &[d2]).unwrap();
        let a = nearest_pair(&u1, &u2, 1e-9).unwrap();
        let b = nearest_pair(&u2, &u1, 1e-9).unwrap();
        prop_assert!((a.distance - b.distance).abs() <= 1e-7 * (1.0 + a.distance));
    }

    /// A concave modulus is subadditive.
    #[test]
    fn power_modulus_is_subadditive(
        alpha in 0.1f64..=1.0,
        s in 1e-6f64..10.0,
        t in 1e-6f64..10.0,
    ) {
        let w = Modulus::power(alpha).unwrap();
        prop_assert!(w.eval(s + t) <= w.eval(s) + w.eval(t) + 1e-12);
    }

    /// Planted instances with line-valued flats admit a selection on their
    /// flats whose seminorm respects the guaranteed constant.
    #[test]
    fn planted_lines_select_within_the_guarantee(
        planted in point_cloud(2),
        dirs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 2), 2..7),
        dims in prop::collection::vec(0usize..=1, 2..7),
    ) {
        let m = planted.len().min(dirs.len()).min(dims.len());
        let planted = &planted[..m];
        let s = space_of(planted);
        let g = WeightedGraph::complete(&s);
        let mut flats = Vec::with_capacity(m);
        for v in 0..m {
            if dims[v] == 0 || dirs[v].iter().all(|x| x.abs() <= 1e-3) {
                flats.push(AffineSubspace::from_point(planted[v].clone()).unwrap());
            } else {
                flats.push(AffineSubspace::span(planted[v].clone(), &[dirs[v].clone()]).unwrap());
            }
        }
        let tol = Tolerances::default();
        let sel = select_affine(&s, &g, &flats, 1.0, 1, &tol).unwrap();
        let report = validate_selection(&s, &flats, &sel, 1e-6).unwrap();
        prop_assert!(report.max_membership_residual <= 1e-6);
        // The planted instance satisfies the unit-seminorm hypothesis, so
        // the output must respect the dimension-dependent guarantee.
        let cap = sel.diagnostics.cube_radius_factor.max(1.0);
        prop_assert!(
            sel.seminorm <= cap * (1.0 + 1e-9),
            "seminorm {} exceeds guarantee {}",
            sel.seminorm,
            cap
        );
    }
}
