use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solidtorus::generate;
use solidtorus::homology::HomologyClass;
use solidtorus::topology::{next_corner, phi, prev_corner, Triangulation};

fn random_tri(seed: u64, m: usize) -> Triangulation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate::random_triangulation(m, &mut rng)
}

#[test]
fn one_vertex_meridian_vector() {
    let tri = generate::one_vertex();
    let t = tri.path_vector(tri.meridian());
    assert_eq!(t, vec![0, 0, -1, 0, 0, 1]);
    assert_eq!(tri.homology_class(tri.meridian()).unwrap(), (1, 0));
    assert_eq!(tri.homology_class(tri.longitude()).unwrap(), (0, 1));
}

#[test]
fn vertex_loop_vectors() {
    let tri = generate::four_face();
    for v in 0..tri.num_vertices() {
        let t = tri.path_vector(&tri.vertex_loop(v));
        // Every corner at v is passed once, turning right.
        for c in 0..tri.num_corners() {
            let expected = if tri.vertex_of(c) == v { -1 } else { 0 };
            assert_eq!(t[c], expected);
        }
        // Φ(x)_c = x_{c'} - x_{c''} with c' = next, c'' = previous corner.
        let p = phi(&t);
        let at_v = |c: usize| (tri.vertex_of(c) == v) as i64;
        for c in 0..tri.num_corners() {
            assert_eq!(p[c], at_v(prev_corner(c)) - at_v(next_corner(c)));
        }
        assert_eq!(tri.homology_class(&tri.vertex_loop(v)).unwrap(), (0, 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn basis_classes(seed in any::<u64>(), m in 1usize..20) {
        let tri = random_tri(seed, 2 * m);
        prop_assert_eq!(tri.homology_class(tri.meridian()).unwrap(), (1, 0));
        prop_assert_eq!(tri.homology_class(tri.longitude()).unwrap(), (0, 1));
        prop_assert_eq!(tri.homology_class(&tri.meridian().reversed()).unwrap(), (-1, 0));
        let v: usize = (seed as usize) % tri.num_vertices();
        prop_assert_eq!(tri.homology_class(&tri.vertex_loop(v)).unwrap(), (0, 0));
    }

    #[test]
    fn paths_of_class_have_that_class(seed in any::<u64>(), m in 1usize..12, a in -3i64..4, b in -3i64..4) {
        prop_assume!(a != 0 || b != 0);
        let tri = random_tri(seed, 2 * m);
        let c = HomologyClass::new(a, b);
        let p = tri.homology().path_of_class(&tri, c);
        prop_assert!(p.check(&tri).is_ok());
        prop_assert_eq!(tri.class_of(&p), c);
    }

    #[test]
    fn vertex_sums_of_phi_cancel(seed in any::<u64>(), m in 1usize..20) {
        let tri = random_tri(seed, 2 * m);
        let mut total = vec![0i64; tri.num_corners()];
        for v in 0..tri.num_vertices() {
            for (x, y) in total.iter_mut().zip(phi(&tri.path_vector(&tri.vertex_loop(v)))) {
                *x += y;
            }
        }
        prop_assert!(total.iter().all(|&x| x == 0));
    }

    #[test]
    fn pushing_across_a_vertex_keeps_class(seed in any::<u64>(), m in 1usize..10, a in -2i64..3, b in -2i64..3) {
        prop_assume!(a != 0 || b != 0);
        let tri = random_tri(seed, 2 * m);
        let c = HomologyClass::new(a, b);
        let p = tri.homology().path_of_class(&tri, c);
        for i in 0..p.len() {
            if let Some(q) = tri.push_across_vertex(&p, i) {
                prop_assert!(q.check(&tri).is_ok());
                prop_assert_eq!(tri.class_of(&q), c);
                // The holonomy changes by a multiple of a vertex loop's.
                let d: Vec<i64> = tri.path_vector(&q).iter().zip(tri.path_vector(&p)).map(|(x, y)| x - y).collect();
                let pd = phi(&d);
                let ok = (0..tri.num_vertices()).any(|v| {
                    let l = phi(&tri.path_vector(&tri.vertex_loop(v)));
                    pd.iter().zip(&l).all(|(x, y)| *x == *y) || pd.iter().zip(&l).all(|(x, y)| *x == -*y)
                });
                prop_assert!(ok);
            }
        }
    }
}
