//! Empirical gradients and moduli against the explicit bounds.

use biball::geometry::operator_norm;
use biball::lipschitz::{jacobian_estimate, lipschitz_estimate, solution_bound, Majorant};
use biball::solver::{Problem, ProblemSpec};
use biball::verify::random_ball_point;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn finite_difference_gradients_stay_below_the_bound() {
    let w = Majorant::identity();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for i in 0..30 {
        let n = 2 + i % 4;
        let p = Problem::new(ProblemSpec::random(n, 2, 500 + i as u64)).unwrap();
        let bound = solution_bound(&p, &w).unwrap();
        let total = bound.components.total();
        for _ in 0..10 {
            let x = random_ball_point(&mut rng, n, 0.9);
            let jac = operator_norm(&jacobian_estimate(&p, &x, 1e-4).unwrap()).unwrap();
            assert!(jac <= total, "problem {i} at {x:?}: |Df| = {jac} > {total}");
            worst = worst.max(jac / total);
        }
    }
    assert!(worst > 0.0);
}

#[test]
fn sharp_example_modulus_is_stable_under_more_pairs() {
    let p = Problem::new(ProblemSpec::sharp_example(2, 1)).unwrap();
    let w = Majorant::identity();
    let a = lipschitz_estimate(&p, &w, 1000).unwrap();
    let b = lipschitz_estimate(&p, &w, 2000).unwrap();
    assert!(((a - b) / b).abs() < 0.05, "{a} vs {b}");
    // sup |∇(1−|x|²)²| = max 4r(1−r²) = 8/(3√3), attained at r = 1/√3 < 0.9.
    let exact = 8.0 / (3.0 * 3f64.sqrt());
    assert!(b <= exact * (1.0 + 1e-6) && b > 0.95 * exact, "{b} vs {exact}");
}

#[test]
fn other_majorants_scale_the_constant() {
    let p = Problem::new(ProblemSpec::random(3, 1, 4)).unwrap();
    let w = Majorant::Linear { slope: 2.0 };
    let est = lipschitz_estimate(&p, &w, 200).unwrap();
    let bound = solution_bound(&p, &w).unwrap();
    assert!(est <= bound.constant);
    let unit = lipschitz_estimate(&p, &Majorant::identity(), 200).unwrap();
    assert!((est * 2.0 - unit).abs() < 1e-12 * unit.max(1.0));
}
