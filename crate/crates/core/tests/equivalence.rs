//! Feasibility verdicts against direct checks on enumerated normal curves.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use common::{direct_verdict, light_curve_alpha, run, Sampling};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solidtorus::checker::{enumerate_curves, CurveKind};
use solidtorus::feasibility::{find_positive_solution, FeasibilityOptions};
use solidtorus::generate;
use solidtorus::system::AngleAssignment;

#[test]
fn one_vertex_agreement() {
    let start = Instant::now();
    let t = run(&generate::one_vertex(), &Sampling::new(64, 120, 0.2, 1));
    eprintln!(
        "one vertex: {} samples, {} conclusive, {} feasible, {:?} {:?}",
        t.samples,
        t.conclusive,
        t.feasible,
        t.conditions,
        start.elapsed()
    );
    assert_eq!(t.disagreements, 0);
}

#[test]
fn four_face_agreement() {
    let start = Instant::now();
    let tri = generate::four_face();
    let t = run(&tri, &Sampling::new(30, 120, 0.25, 2));
    eprintln!(
        "four face: {} samples, {} conclusive, {} feasible, {:?} {:?}",
        t.samples,
        t.conclusive,
        t.feasible,
        t.conditions,
        start.elapsed()
    );
    assert_eq!(t.disagreements, 0);
}

#[test]
fn larger_grids_agreement() {
    for (n, k, seed) in [(2usize, 2usize, 3u64), (3, 1, 4), (2, 3, 5)] {
        let start = Instant::now();
        let tri = generate::grid_complex(n, k, &vec![false; n * k])
            .triangulation(solidtorus::homology::HomologyClass::new(1, 0));
        let t = run(&tri, &Sampling::new((2.0 * PI / 0.35).ceil() as u32 + 1, 40, 0.35, seed));
        eprintln!(
            "grid {n}x{k}: {} samples, {} conclusive, {} feasible, {} unverified, {:?} {:?}",
            t.samples,
            t.conclusive,
            t.feasible,
            t.unverified,
            t.conditions,
            start.elapsed()
        );
        assert_eq!(t.disagreements, 0);
    }
}

#[test]
fn boundary_parallel_violations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let opts = FeasibilityOptions { exact: false, ..Default::default() };
    let mut seen = 0;
    let mut split = generate::four_face_complex();
    split.split(0, [0.3, 0.3, 0.4]);
    for tri in [
        split.triangulation(solidtorus::homology::HomologyClass::new(1, 0)),
        generate::random_triangulation(6, &mut rng.clone()),
    ] {
        let lo = 0.3;
        let en = enumerate_curves(&tri, (2.0 * PI / lo).ceil() as u32 + 1, 50_000_000);
        let nulls: Vec<_> = en.curves.iter().filter(|c| c.kind == CurveKind::NullHomotopic).collect();
        eprintln!("{} null-homotopic curves", nulls.len());
        for c in nulls.iter().take(10) {
            let Some(alpha) = light_curve_alpha(&tri, &c.weights, lo, &mut rng) else { continue };
            let w = c.weight(&alpha);
            let a = AngleAssignment::new(alpha, 0.1).unwrap();
            let r = find_positive_solution(&tri, &a, &opts).unwrap();
            let d = direct_verdict(&tri, &a, &en);
            eprintln!(
                "curve weight {w:.4}: direct {d:?}, feasible {}, {:?}",
                r.is_feasible(),
                r.certificate().map(|c| c.summary())
            );
            if w <= 2.0 * PI {
                seen += 1;
            }
            if let Some(d) = d {
                assert_eq!(d, r.is_feasible());
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn separation_and_vertex_sum_violations_agree() {
    let tri = generate::four_face();
    let s = Sampling { zero_prob: 0.2, violate_prob: 0.5, ..Sampling::new(30, 60, 0.25, 8) };
    let t = run(&tri, &s);
    eprintln!("violations: {t:?}");
    assert!(t.injected_i > 0 && t.injected_ii > 0);
    assert_eq!(t.disagreements, 0);
}
