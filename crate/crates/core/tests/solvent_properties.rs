mod common;

use common::{planted, random_matrix, rng, seeded, tol};
use matpoly_core::linalg::{identity, invert, mat_pow, matrix_jordan_structure, norm, numerical_rank};
use matpoly_core::oracle::{
    brute_solvent_check, exhaustive_semisimple_solvents, random_regular, PlantedSpectrum,
};
use matpoly_core::solvents::{
    bisolvents, cosolvents, reduce_bisolvent, solvent_count_bound, solvents, to_additive,
    verify_bisolvent,
};
use matpoly_core::spectral::{weierstrass_data_of, EigenPoint};
use matpoly_core::{ComplexMatrix, MatrixPolynomial};
use proptest::prelude::*;

fn close(a: &ComplexMatrix, b: &ComplexMatrix, rel: f64) -> bool {
    norm(&(a - b)) <= rel * (1.0 + norm(a).max(norm(b)))
}

fn same_set(a: &[ComplexMatrix], b: &[ComplexMatrix], rel: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| close(x, y, rel)))
        && b.iter().all(|y| a.iter().any(|x| close(x, y, rel)))
}

/// Random `n×n` polynomial of degree `k` with the given coefficient fixed to `I`.
fn pinned(seed: u64, n: usize, k: usize, unit: usize) -> MatrixPolynomial {
    let mut g = rng(seed);
    let coeffs = (0..=k)
        .map(|i| if i == unit { identity(n) } else { random_matrix(&mut g, n, n) })
        .collect();
    MatrixPolynomial::new(coeffs).unwrap()
}

proptest! {
    #![proptest_config(seeded(301, 24))]
    #[test]
    fn solvents_substitute_and_respect_bound_seed_301(seed in 0u64..400) {
        let (p, _) = planted(seed);
        let sols = solvents(&p, &tol()).unwrap();
        let bound = solvent_count_bound(&p).unwrap();
        prop_assert!(sols.infinite_family || sols.items.len() as u64 <= bound);
        for s in &sols.items {
            prop_assert!(brute_solvent_check(&p, &s.matrix) <= 1e-8);
        }
        let cos = cosolvents(&p, &tol()).unwrap();
        let rev = p.reverse();
        for s in &cos.items {
            prop_assert!(brute_solvent_check(&rev, &s.matrix) <= 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(seeded(302, 24))]
    #[test]
    fn solvent_spectrum_is_subordinate_seed_302(seed in 0u64..400) {
        let (p, _) = planted(seed);
        let w = weierstrass_data_of(&p, &tol()).unwrap();
        for s in &solvents(&p, &tol()).unwrap().items {
            for chain in matrix_jordan_structure(&s.matrix, &tol()).unwrap() {
                let EigenPoint::Finite(e) = chain.eigenvalue else { panic!("infinite chain of a matrix") };
                let hit = w.finite.iter().find(|f| (f.0 - e).norm() <= 1e-6 * (1.0 + e.norm()));
                prop_assert!(hit.is_some(), "solvent eigenvalue {} not in spectrum", e);
                let longest = hit.unwrap().1.iter().copied().max().unwrap();
                prop_assert!(chain.len() <= longest);
            }
        }
    }
}

proptest! {
    #![proptest_config(seeded(303, 24))]
    #[test]
    fn two_by_two_semisimple_matches_oracle_seed_303(k in 1usize..=3, seed in 0u64..400) {
        let plan = PlantedSpectrum::semisimple(2, k, seed);
        let (p, _) = random_regular(&plan).unwrap();
        let found: Vec<ComplexMatrix> =
            solvents(&p, &tol()).unwrap().items.into_iter().map(|s| s.matrix).collect();
        let oracle = exhaustive_semisimple_solvents(&p, &tol()).unwrap();
        prop_assert!(same_set(&found, &oracle, 1e-7), "{} vs {}", found.len(), oracle.len());
    }
}

proptest! {
    #![proptest_config(seeded(304, 16))]
    #[test]
    fn monic_bisolvents_are_solvents_seed_304(n in 1usize..=2, k in 1usize..=3, seed in any::<u64>()) {
        let p = pinned(seed, n, k, k);
        let sols: Vec<ComplexMatrix> =
            solvents(&p, &tol()).unwrap().items.into_iter().map(|s| s.matrix).collect();
        let mut reduced = Vec::new();
        for b in &bisolvents(&p, &tol()).unwrap().items {
            let r = reduce_bisolvent(&p, b, &tol()).unwrap();
            prop_assert!(r.solvent.is_some());
            reduced.push(r.solvent.unwrap());
        }
        prop_assert!(same_set(&sols, &reduced, 1e-7), "{} vs {}", sols.len(), reduced.len());
    }
}

proptest! {
    #![proptest_config(seeded(305, 16))]
    #[test]
    fn comonic_bisolvents_are_cosolvents_seed_305(n in 1usize..=2, k in 1usize..=3, seed in any::<u64>()) {
        let p = pinned(seed, n, k, 0);
        let cos: Vec<ComplexMatrix> =
            cosolvents(&p, &tol()).unwrap().items.into_iter().map(|s| s.matrix).collect();
        let mut reduced = Vec::new();
        for b in &bisolvents(&p, &tol()).unwrap().items {
            let r = reduce_bisolvent(&p, b, &tol()).unwrap();
            prop_assert!(r.cosolvent.is_some());
            reduced.push(r.cosolvent.unwrap());
        }
        prop_assert!(same_set(&cos, &reduced, 1e-7), "{} vs {}", cos.len(), reduced.len());
    }
}

proptest! {
    #![proptest_config(seeded(306, 24))]
    #[test]
    fn invertible_solvents_invert_to_cosolvents_seed_306(seed in 0u64..400) {
        let (p, _) = planted(seed);
        let (sols, cos) = (solvents(&p, &tol()).unwrap(), cosolvents(&p, &tol()).unwrap());
        prop_assume!(!sols.infinite_family && !cos.infinite_family);
        let n = p.rows();
        let inverses = |items: &[matpoly_core::solvents::Solvent]| -> Vec<ComplexMatrix> {
            items.iter()
                .filter(|s| numerical_rank(&s.matrix, &tol()) == n)
                .map(|s| invert(&s.matrix, &tol()).unwrap())
                .collect()
        };
        let cos_set: Vec<ComplexMatrix> = cos.items.iter().map(|s| s.matrix.clone()).collect();
        let sol_set: Vec<ComplexMatrix> = sols.items.iter().map(|s| s.matrix.clone()).collect();
        for s in inverses(&sols.items) {
            prop_assert!(cos_set.iter().any(|c| close(c, &s, 1e-7)));
        }
        for c in inverses(&cos.items) {
            prop_assert!(sol_set.iter().any(|s| close(s, &c, 1e-7)));
        }
    }
}

proptest! {
    #![proptest_config(seeded(307, 24))]
    #[test]
    fn bisolvents_verify_and_satisfy_power_identity_seed_307(seed in 0u64..400) {
        let (p, _) = planted(seed);
        for b in &bisolvents(&p, &tol()).unwrap().items {
            prop_assert!(verify_bisolvent(&p, b, &tol()).unwrap().all_pass());
            let a = to_additive(b);
            let lhs = mat_pow(&b.s1, 2) * &b.s2;
            let rhs = mat_pow(&a.p1, 2) + &a.p2;
            let scale = norm(&b.s1).max(1.0).powi(2) * norm(&b.s2).max(1.0);
            prop_assert!(norm(&(lhs - rhs)) <= 1e-12 * scale);
        }
    }
}
