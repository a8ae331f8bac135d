use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solidtorus::checker::{stokes_residual, Subcomplex};
use solidtorus::feasibility::{find_positive_solution, FeasibilityOptions};
use solidtorus::generate;
use solidtorus::system::{verify_nz, AngleAssignment, ExactAngles, SolutionSpace};
use solidtorus::volume::{maximize_volume, random_positive_point, volume, VolumeOptions};

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stokes_on_positive_and_mixed_solutions(seed in any::<u64>(), half in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tri, a, theta) = generate::random_admissible(2 * half, &mut rng);
        let sp = SolutionSpace::new(&tri, &a).unwrap();
        let t: Vec<f64> = (0..sp.dim()).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let mixed = sp.point(&t);
        for _ in 0..50 {
            let g = Subcomplex::random(&tri, &mut rng);
            prop_assert!(g.is_closed(&tri));
            prop_assert!(stokes_residual(&tri, &theta, &a.alpha, &g) <= 1e-10);
            prop_assert!(stokes_residual(&tri, &mixed, &a.alpha, &g) <= 1e-9);
        }
    }

    #[test]
    fn volume_is_concave_on_kernel_lines(seed in any::<u64>(), half in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tri, a, theta) = generate::random_admissible(2 * half, &mut rng);
        let sp = SolutionSpace::new(&tri, &a).unwrap();
        let p = random_positive_point(&sp, &theta, &mut rng);
        let d = sp.point(&(0..sp.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let dir: Vec<f64> = d.iter().zip(&sp.particular).map(|(x, y)| x - y).collect();
        let reach = p.iter().zip(&dir).map(|(&x, &v)| {
            if v > 0.0 { (PI - x) / v } else if v < 0.0 { -x / v } else { f64::INFINITY }
        }).fold(f64::INFINITY, f64::min);
        let h = (0.3 * reach).min(1e-2);
        prop_assume!(h > 1e-6);
        let at = |s: f64| volume(&p.iter().zip(&dir).map(|(x, v)| x + s * v).collect::<Vec<_>>());
        prop_assert!(at(h) - 2.0 * at(0.0) + at(-h) <= 1e-12);
    }

    #[test]
    fn symplectic_relation_on_random_triangulations(seed in any::<u64>(), half in 1usize..21) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tri = generate::random_triangulation(2 * half, &mut rng);
        let r = verify_nz(&tri, tri.longitude()).unwrap();
        prop_assert_eq!(r.sign.abs(), 1);
    }

    #[test]
    fn exact_and_numeric_verdicts_agree(x in 1i64..23, y in 1i64..23, k in 0i64..48) {
        // One-vertex torus: α sums to π. Cone angles are odd multiples of
        // π/48, so they never equal a curve weight.
        prop_assume!(x + y < 24);
        let ex = ExactAngles {
            alpha_pi: vec![frac(x, 24), frac(y, 24), frac(24 - x - y, 24)],
            cone_angle_pi: frac(2 * k + 1, 48),
        };
        let a = AngleAssignment::exact(ex).unwrap();
        let tri = generate::one_vertex();
        let exact = find_positive_solution(&tri, &a, &FeasibilityOptions::default()).unwrap();
        let numeric = find_positive_solution(&tri, &a.to_numeric(), &FeasibilityOptions { exact: false, ..Default::default() }).unwrap();
        prop_assert_eq!(exact.is_feasible(), numeric.is_feasible());
        if let Some(c) = exact.certificate() {
            prop_assert!(c.verified);
        }
    }
}

#[test]
fn maximizer_beats_random_positive_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for m in [4, 8, 12] {
        let (tri, a, theta) = generate::random_admissible(m, &mut rng);
        let sp = SolutionSpace::new(&tri, &a).unwrap();
        let (best, rep) = maximize_volume(&tri, &sp, &theta, &VolumeOptions::default()).unwrap();
        assert!((volume(&best) - rep.volume).abs() < 1e-14);
        for _ in 0..200 {
            let p = random_positive_point(&sp, &best, &mut rng);
            assert!(volume(&p) <= rep.volume + 1e-12);
        }
    }
}
