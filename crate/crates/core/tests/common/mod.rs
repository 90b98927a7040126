#![allow(dead_code)]

use gridhard::reduce::CnfFormula;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FAMILY_SEED: u64 = 0x5a7_2024;
pub const FAMILY_SIZE: usize = 50;

/// Fixed formulas over at most 3 variables and 3 clauses.
pub fn formula_family() -> Vec<CnfFormula> {
    let mut out = vec![
        CnfFormula::new(1, vec![vec![1]]).unwrap(),
        CnfFormula::new(1, vec![vec![-1]]).unwrap(),
        CnfFormula::new(2, vec![vec![1, 2]]).unwrap(),
        CnfFormula::new(2, vec![vec![1, -2], vec![-1, 2]]).unwrap(),
        CnfFormula::new(3, vec![vec![1, 2, 3]]).unwrap(),
        CnfFormula::new(3, vec![vec![-1, -2, -3], vec![1, 2], vec![3]]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
    while out.len() < FAMILY_SIZE {
        let n = rng.gen_range(1..=3usize);
        let m = rng.gen_range(1..=3usize);
        let clauses = (0..m)
            .map(|_| {
                let k = rng.gen_range(1..=3usize);
                (0..k)
                    .map(|_| {
                        let v = rng.gen_range(1..=n as i32);
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        out.push(CnfFormula::new(n, clauses).unwrap());
    }
    out
}

pub fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}
