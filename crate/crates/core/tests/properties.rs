use polclass_core::classify::{PrototypeSet, Rule};
use polclass_core::diffusion::{diffusion_step, evolve, reaction_step, EvolutionParams};
use polclass_core::distance::{self, DistanceKind};
use polclass_core::estimation::estimate_sigma;
use polclass_core::weights::{optimize_table, project_to_simplex, DistanceTable, OptimizerConfig, WeightVector};
use polclass_core::{Complex, Grid, HermitianMatrix3, WishartModel};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

/// `Σ aₖaₖ* + εI` with three random vectors, so positive definite.
fn pd_matrix() -> impl Strategy<Value = HermitianMatrix3> {
    (prop::array::uniform3(prop::array::uniform3(complex())), 0.01..1.0f64).prop_map(|(vs, eps)| {
        vs.iter().fold(HermitianMatrix3::identity() * eps, |acc, v| acc + HermitianMatrix3::outer(v))
    })
}

fn rel_err(a: &HermitianMatrix3, b: &HermitianMatrix3) -> f64 {
    a.frobenius_distance(b) / b.frobenius_norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn inverse_determinant_is_reciprocal(s in pd_matrix()) {
        let inv = s.inverse().unwrap();
        prop_assert!((inv.determinant() * s.determinant() - 1.0).abs() < 1e-8);
        prop_assert!((inv.trace_product(&s) - 3.0).abs() < 1e-8);
    }

    #[test]
    fn cholesky_round_trip(s in pd_matrix()) {
        let f = s.cholesky().unwrap();
        prop_assert!(f.diag.iter().all(|d| *d > 0.0));
        prop_assert!(rel_err(&f.reconstruct(), &s) < 1e-12);
    }

    #[test]
    fn convex_combinations_stay_in_the_cone(a in pd_matrix(), b in pd_matrix()) {
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            prop_assert!(a.convex_combine(&b, t).is_positive_definite());
        }
    }

    #[test]
    fn distances_vanish_on_the_diagonal(s in pd_matrix(), l in 3.0..20.0f64) {
        for kind in DistanceKind::ALL {
            prop_assert_eq!(kind.eval(&s, &s, l).unwrap(), 0.0);
        }
    }

    #[test]
    fn distances_are_symmetric_and_nonnegative(a in pd_matrix(), b in pd_matrix(), l in 3.0..20.0f64) {
        for kind in DistanceKind::ALL {
            let ab = kind.eval(&a, &b, l).unwrap();
            let ba = kind.eval(&b, &a, l).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - ba).abs() <= 1e-9 * ab.max(1.0));
        }
        let h = distance::hellinger_distance(&a, &b, l).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
    }

    #[test]
    fn bhattacharyya_is_log_transform_of_hellinger(a in pd_matrix(), b in pd_matrix()) {
        let h = distance::hellinger_distance(&a, &b, 3.0).unwrap();
        let bh = distance::bhattacharyya_distance(&a, &b, 3.0).unwrap();
        prop_assume!(h < 0.999);
        prop_assert!((bh + (1.0 - h).ln()).abs() < 1e-8 * bh.max(1.0));
    }

    #[test]
    fn stochastic_distances_are_scale_invariant(a in pd_matrix(), b in pd_matrix(), c in 0.01..100.0f64) {
        let kl = distance::kl_distance(&a, &b, 4.0).unwrap();
        let kl_scaled = distance::kl_distance(&(a * c), &(b * c), 4.0).unwrap();
        prop_assert!((kl - kl_scaled).abs() < 1e-7 * kl.max(1.0));
        let bh = distance::bhattacharyya_distance(&a, &b, 4.0).unwrap();
        let bh_scaled = distance::bhattacharyya_distance(&(a * c), &(b * c), 4.0).unwrap();
        prop_assert!((bh - bh_scaled).abs() < 1e-7 * bh.max(1.0));
    }

    #[test]
    fn kl_is_linear_in_looks(a in pd_matrix(), b in pd_matrix(), l in 3.0..50.0f64) {
        let one = distance::kl_distance(&a, &b, 1.0).unwrap();
        let many = distance::kl_distance(&a, &b, l).unwrap();
        prop_assert!((many - l * one).abs() < 1e-9 * many.max(1.0));
    }

    #[test]
    fn sample_mean_is_permutation_invariant_and_scale_equivariant(
        mut sample in prop::collection::vec(pd_matrix(), 1..40),
        c in 0.1..10.0f64,
    ) {
        let mean = estimate_sigma(&sample).unwrap();
        let scaled: Vec<_> = sample.iter().map(|z| *z * c).collect();
        prop_assert!(rel_err(&estimate_sigma(&scaled).unwrap(), &(mean * c)) < 1e-12);
        sample.reverse();
        prop_assert!(rel_err(&estimate_sigma(&sample).unwrap(), &mean) < 1e-12);
    }

    #[test]
    fn simplex_projection_is_feasible_and_idempotent(v in prop::collection::vec(-5.0..5.0f64, 1..8)) {
        let p = project_to_simplex(&v);
        prop_assert!(p.iter().all(|x| *x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let again = project_to_simplex(&p);
        for (x, y) in p.iter().zip(&again) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn optimizer_descends_and_stays_on_the_simplex(
        rows in prop::collection::vec(prop::collection::vec(0.0..30.0f64, 3 * 12), 3),
    ) {
        let table = DistanceTable::from_rows(3, rows).unwrap();
        let out = optimize_table(&table, &OptimizerConfig::default()).unwrap();
        for pair in out.trace.windows(2) {
            prop_assert!(pair[1].energy <= pair[0].energy);
        }
        for entry in &out.trace {
            prop_assert!(WeightVector::new(entry.weights.clone()).is_ok());
        }
    }

    #[test]
    fn optimizer_is_equivariant_under_class_relabelling(
        rows in prop::collection::vec(prop::collection::vec(0.0..30.0f64, 2 * 10), 2),
    ) {
        // Swapping the two classes swaps rows and the columns inside them.
        let swapped: Vec<Vec<f64>> = rows
            .iter()
            .rev()
            .map(|r| r.chunks(2).flat_map(|d| [d[1], d[0]]).collect())
            .collect();
        let a = optimize_table(&DistanceTable::from_rows(2, rows).unwrap(), &OptimizerConfig::default()).unwrap();
        let b = optimize_table(&DistanceTable::from_rows(2, swapped).unwrap(), &OptimizerConfig::default()).unwrap();
        prop_assert!((a.energy - b.energy).abs() < 1e-9);
        prop_assert!((a.weights[0] - b.weights[1]).abs() < 1e-6);
    }

    #[test]
    fn uniform_weights_reproduce_plain_kl(protos in prop::array::uniform3(pd_matrix()), x in pd_matrix()) {
        let models = protos.iter().map(|s| WishartModel::new(*s, 4.0).unwrap()).collect();
        let set = PrototypeSet::unweighted(models, 4.0).unwrap();
        prop_assert_eq!(
            set.classify_pixel(&x, Rule::WeightedKullbackLeibler).unwrap(),
            set.classify_pixel(&x, Rule::KullbackLeibler).unwrap()
        );
    }
}

fn field_strategy(w: usize, h: usize) -> impl Strategy<Value = Grid<HermitianMatrix3>> {
    prop::collection::vec(pd_matrix(), w * h).prop_map(move |v| Grid::from_vec(w, h, v).unwrap())
}

fn prototype_set(protos: [HermitianMatrix3; 3]) -> PrototypeSet {
    let models = protos.iter().map(|s| WishartModel::new(*s, 4.0).unwrap()).collect();
    PrototypeSet::new(models, WeightVector::new(vec![0.5, 0.3, 0.2]).unwrap(), 4.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_preserves_the_cone(
        field in field_strategy(6, 5),
        protos in prop::array::uniform3(pd_matrix()),
        alpha in 0.0..25.0f64,
    ) {
        let params = EvolutionParams { alpha, iterations: 10, ..Default::default() };
        let (out, metrics) = evolve(&field, &prototype_set(protos), &params).unwrap();
        prop_assert!(out.all_positive_definite());
        prop_assert!(metrics.iterations.iter().all(|m| (0.0..=1.0).contains(&m.changed_fraction)));
    }

    #[test]
    fn constant_prototype_field_is_a_fixed_point(protos in prop::array::uniform3(pd_matrix()), m in 0usize..3) {
        let set = prototype_set(protos);
        prop_assume!(set.nearest(&protos[m], DistanceKind::KullbackLeibler, true).unwrap().class == m);
        let field = Grid::filled(4, 3, protos[m]);
        let params = EvolutionParams { iterations: 5, ..Default::default() };
        let (out, _) = evolve(&field, &set, &params).unwrap();
        prop_assert_eq!(out, field);
    }

    #[test]
    fn pure_reaction_approaches_the_nearest_prototype(protos in prop::array::uniform3(pd_matrix()), x in pd_matrix()) {
        let set = prototype_set(protos);
        let params = EvolutionParams { alpha: 0.0, ..Default::default() };
        let target = set.nearest(&x, DistanceKind::KullbackLeibler, true).unwrap().class;
        let mut field = Grid::filled(1, 1, x);
        let mut gap = x.frobenius_distance(&protos[target]);
        for _ in 0..20 {
            field = reaction_step(&diffusion_step(&field, &params).unwrap(), &set, &params).unwrap();
            let pixel = field.get(0, 0);
            if set.nearest(pixel, DistanceKind::KullbackLeibler, true).unwrap().class != target {
                break;
            }
            let next = pixel.frobenius_distance(&protos[target]);
            prop_assert!(next <= gap);
            gap = next;
        }
    }
}
