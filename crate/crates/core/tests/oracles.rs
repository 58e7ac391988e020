mod common;

use intercomp::info::{dsbs, JointPmf};
use intercomp::network::{solve_lp, LpStatus};
use intercomp::sum_rate::{
    min_sum_rate_bruteforce, min_sum_rate_penalty, Location, PenaltyOptions,
};
use intercomp::{FunctionTable, SumRateProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_lp, two_message_enumeration, vertex_enumeration};

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut optimal = 0;
    for k in 0..50 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=7);
        let lp = random_lp(&mut rng, n, m);
        let sol = solve_lp(&lp).unwrap();
        match vertex_enumeration(&lp) {
            Some(v) => {
                assert_eq!(sol.status, LpStatus::Optimal, "lp {k}");
                assert!(
                    (sol.objective - v).abs() < 1e-7,
                    "lp {k}: {} vs {v}",
                    sol.objective
                );
                assert!((lp.objective_at(&sol.values) - sol.objective).abs() < 1e-9);
                assert!(lp.max_violation(&sol.values) < 1e-7);
                optimal += 1;
            }
            None => assert_eq!(sol.status, LpStatus::Infeasible, "lp {k}"),
        }
    }
    assert!(optimal >= 10, "too few feasible instances: {optimal}");
}

fn random_pmf(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> JointPmf {
    let raw: Vec<f64> = (0..nx * ny).map(|_| rng.random_range(0.05..1.0)).collect();
    JointPmf::renormalized(vec![nx, ny], raw).unwrap()
}

fn random_function(rng: &mut ChaCha8Rng, nx: usize, ny: usize, range: usize) -> FunctionTable {
    FunctionTable::from_fn(vec![nx, ny], range, |_| rng.random_range(0..range)).unwrap()
}

#[test]
fn bruteforce_matches_plain_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (k, &(nx, ny, caps)) in [
        (2, 2, [2, 2]),
        (2, 2, [2, 3]),
        (3, 2, [3, 2]),
        (2, 3, [2, 3]),
        (3, 2, [2, 3]),
    ]
    .iter()
    .cycle()
    .take(20)
    .enumerate()
    {
        let pmf = random_pmf(&mut rng, nx, ny);
        let f_a = random_function(&mut rng, nx, ny, 2);
        let f_b = random_function(&mut rng, nx, ny, 2);
        let problem =
            SumRateProblem::new(pmf.clone(), f_a.clone(), f_b.clone(), Location::A).unwrap();
        let got = min_sum_rate_bruteforce(&problem, 2, Some(&caps)).unwrap();
        let want = two_message_enumeration(nx, ny, pmf.probs(), f_a.values(), f_b.values(), caps);
        match want {
            Some(w) => {
                assert!(
                    got.is_feasible(),
                    "case {k}: oracle found nothing, enumeration {w}"
                );
                assert!(
                    (got.achieved - w).abs() < 1e-9,
                    "case {k}: {} vs {w}",
                    got.achieved
                );
            }
            None => assert!(
                !got.is_feasible(),
                "case {k}: oracle {} but enumeration infeasible",
                got.achieved
            ),
        }
    }
}

#[test]
fn penalty_one_message_matches_oracle() {
    let cases = [
        (
            dsbs(0.2).unwrap(),
            FunctionTable::zero2(),
            FunctionTable::and2(),
        ),
        (
            dsbs(0.35).unwrap(),
            FunctionTable::zero2(),
            FunctionTable::xor2(),
        ),
        (
            JointPmf::new(vec![2, 2], vec![0.4, 0.1, 0.2, 0.3]).unwrap(),
            FunctionTable::zero2(),
            FunctionTable::or2(),
        ),
    ];
    for (i, (pmf, f_a, f_b)) in cases.into_iter().enumerate() {
        let problem = SumRateProblem::new(pmf, f_a, f_b, Location::A).unwrap();
        let exact = min_sum_rate_bruteforce(&problem, 1, None).unwrap();
        let opts = PenaltyOptions {
            restarts: 8,
            seed: i as u64,
            ..PenaltyOptions::default()
        };
        let found = min_sum_rate_penalty(&problem, 1, &opts).unwrap();
        assert!(found.is_feasible(), "case {i}");
        assert!(
            (found.achieved - exact.achieved).abs() < 1e-4,
            "case {i}: {} vs {}",
            found.achieved,
            exact.achieved
        );
    }
}

#[test]
fn penalty_is_deterministic_for_a_seed() {
    let problem = SumRateProblem::new(
        dsbs(0.3).unwrap(),
        FunctionTable::and2(),
        FunctionTable::and2(),
        Location::A,
    )
    .unwrap();
    let opts = PenaltyOptions {
        restarts: 4,
        seed: 5,
        ..PenaltyOptions::default()
    };
    let a = min_sum_rate_penalty(&problem, 2, &opts).unwrap();
    let b = min_sum_rate_penalty(&problem, 2, &opts).unwrap();
    assert_eq!(a, b);
}
