//! Oracles shared by the integration tests. They avoid the library's own
//! search and measure code so they can check it independently.

#![allow(dead_code)]

use intercomp::network::{LpConstraint, LpProblem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Solves the square system `m z = r` by Gaussian elimination with partial
/// pivoting; `None` when singular.
fn solve_square(mut m: Vec<Vec<f64>>, mut r: Vec<f64>) -> Option<Vec<f64>> {
    let n = r.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
                r[row] -= f * r[col];
            }
        }
    }
    Some((0..n).map(|i| r[i] / m[i][i]).collect())
}

fn combinations(n: usize, k: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(
        start: usize,
        n: usize,
        k: usize,
        cur: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), visit);
}

/// Minimum of `c·x` over `A x >= b, x >= 0` by enumerating every basic
/// solution. `None` when no vertex is feasible. Only meaningful when the
/// objective is bounded below, e.g. for nonnegative costs.
pub fn vertex_enumeration(lp: &LpProblem) -> Option<f64> {
    let n = lp.variables.len();
    let mut rows: Vec<(Vec<f64>, f64)> = lp
        .constraints
        .iter()
        .map(|c| (c.coefficients.clone(), c.rhs))
        .collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push((e, 0.0));
    }
    let mut best: Option<f64> = None;
    combinations(rows.len(), n, &mut |pick| {
        let m: Vec<Vec<f64>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let r: Vec<f64> = pick.iter().map(|&i| rows[i].1).collect();
        let Some(x) = solve_square(m, r) else { return };
        let feasible = rows
            .iter()
            .all(|(a, b)| a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>() >= b - 1e-9);
        if feasible {
            let v: f64 = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    });
    best
}

/// A random LP with `n` variables, `m` rows, positive costs and mixed-sign
/// integer-valued coefficients.
pub fn random_lp(rng: &mut ChaCha8Rng, n: usize, m: usize) -> LpProblem {
    let variables = (0..n).map(|i| format!("x{i}")).collect();
    let objective = (0..n).map(|_| rng.random_range(1..=5) as f64).collect();
    let constraints = (0..m)
        .map(|i| LpConstraint {
            label: format!("row{i}"),
            coefficients: (0..n).map(|_| rng.random_range(-3..=4) as f64).collect(),
            rhs: rng.random_range(-4..=6) as f64,
        })
        .collect();
    LpProblem {
        variables,
        objective,
        constraints,
    }
}

/// Conditional entropy `H(U | V)` from a list of `(v, u, mass)` triples.
fn cond_entropy(triples: &[(usize, usize, f64)]) -> f64 {
    use std::collections::BTreeMap;
    let mut joint: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut marg: BTreeMap<usize, f64> = BTreeMap::new();
    for &(v, u, p) in triples {
        *joint.entry((v, u)).or_default() += p;
        *marg.entry(v).or_default() += p;
    }
    joint
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(&(v, _), &p)| p * (marg[&v] / p).log2())
        .sum()
}

fn for_each_map(domain: usize, cap: usize, visit: &mut dyn FnMut(&[usize])) {
    let mut cur = vec![0; domain];
    loop {
        visit(&cur);
        let mut i = 0;
        while i < domain {
            cur[i] += 1;
            if cur[i] < cap {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == domain {
            return;
        }
    }
}

/// Minimum sum-rate over deterministic chains `U1 = g(X)`, `U2 = h(Y, U1)`
/// with `g` into `caps[0]` labels and `h` into `caps[1]` labels, both
/// terminals decoding on the support. Plain enumeration of every map.
pub fn two_message_enumeration(
    nx: usize,
    ny: usize,
    probs: &[f64],
    fa: &[usize],
    fb: &[usize],
    caps: [usize; 2],
) -> Option<f64> {
    let support: Vec<(usize, usize, f64)> = (0..nx)
        .flat_map(|x| (0..ny).map(move |y| (x, y)))
        .map(|(x, y)| (x, y, probs[x * ny + y]))
        .filter(|c| c.2 > 1e-12)
        .collect();
    let mut best: Option<f64> = None;
    for_each_map(nx, caps[0], &mut |g| {
        for_each_map(ny * caps[0], caps[1], &mut |h| {
            let u1 = |x: usize| g[x];
            let u2 = |x: usize, y: usize| h[y * caps[0] + u1(x)];
            // Decoding: f_A constant on (x, u1, u2) classes, f_B on (y, u1, u2).
            let mut seen_a = std::collections::HashMap::new();
            let mut seen_b = std::collections::HashMap::new();
            for &(x, y, _) in &support {
                let (a, b) = (fa[x * ny + y], fb[x * ny + y]);
                if *seen_a.entry((x, u1(x), u2(x, y))).or_insert(a) != a
                    || *seen_b.entry((y, u1(x), u2(x, y))).or_insert(b) != b
                {
                    return;
                }
            }
            let r1: Vec<_> = support.iter().map(|&(x, y, p)| (y, u1(x), p)).collect();
            let r2: Vec<_> = support
                .iter()
                .map(|&(x, y, p)| (x * caps[0] + u1(x), u2(x, y), p))
                .collect();
            let sum = cond_entropy(&r1) + cond_entropy(&r2);
            best = Some(best.map_or(sum, |b: f64| b.min(sum)));
        });
    });
    best
}
