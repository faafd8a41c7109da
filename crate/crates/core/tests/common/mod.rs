//! Random instances shared by the integration tests.
#![allow(dead_code)]

use nonrev::{ChainSpec, Density};
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

pub fn rng(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

/// Irreducible chain on `n` states: a ring plus random chords, every edge
/// carrying positive rates both ways, rates in `[0.2, 3]`.
pub fn random_chain(rng: &mut Pcg64, n: usize) -> ChainSpec<f64> {
    let mut t = vec![];
    let mut add = |x: usize, y: usize, rng: &mut Pcg64| {
        t.push((x, y, rng.random_range(0.2..3.0)));
        t.push((y, x, rng.random_range(0.2..3.0)));
    };
    for x in 0..n {
        let y = (x + 1) % n;
        if n == 2 && x == 1 {
            break;
        }
        add(x, y, rng);
    }
    for x in 0..n {
        for y in x + 2..n {
            if (x, y) != (0, n - 1) && rng.random_bool(0.4) {
                add(x, y, rng);
            }
        }
    }
    ChainSpec::new(n, t).unwrap()
}

/// Metropolis chain for random weights on a random connected graph.
pub fn random_reversible(rng: &mut Pcg64, n: usize) -> ChainSpec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
    let base = random_chain(rng, n);
    let t = base
        .support_pairs()
        .into_iter()
        .flat_map(|(x, y)| {
            let k = 0.5 + (x + 2 * y) as f64 * 0.1;
            [(x, y, k * f64::min(1.0, w[y] / w[x])), (y, x, k * f64::min(1.0, w[x] / w[y]))]
        })
        .collect::<Vec<_>>();
    ChainSpec::new(n, t).unwrap()
}

pub fn random_density(rng: &mut Pcg64, n: usize) -> Density<f64> {
    Density::normalized((0..n).map(|_| rng.random_range(0.1..1.0)).collect()).unwrap()
}

pub fn random_vec(rng: &mut Pcg64, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-r..r)).collect()
}

pub fn r3() -> ChainSpec<f64> {
    ChainSpec::new(
        3,
        [(0, 1, 2.0), (1, 2, 2.0), (2, 0, 2.0), (1, 0, 1.0), (2, 1, 1.0), (0, 2, 1.0)],
    )
    .unwrap()
}

pub fn c2() -> ChainSpec<f64> {
    ChainSpec::new(2, [(0, 1, 2.0), (1, 0, 1.0)]).unwrap()
}
