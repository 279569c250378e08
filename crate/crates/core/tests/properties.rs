//! Property tests for the algebraic identities the library is built on.
//! Everything here is exact; there are no tolerances.

use proptest::collection::vec;
use proptest::prelude::*;

use frechet_core::diffcalc::{DiffChain, GridFunction, GridWindow};
use frechet_core::exppoly::{ExpPoly, Frequency};
use frechet_core::group::{
    generates, smith_normal_form, subgroup_index, CosetTable, GroupElement, GroupSpec, IntMatrix,
    SubgroupIndex,
};
use frechet_core::linalg::{rref_nullspace, ScalarMatrix};
use frechet_core::poly::Polynomial;
use frechet_core::scalar::Scalar;

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        vec(vec(-20i64..=20, c), r).prop_map(|rows| IntMatrix::from_rows(&rows))
    })
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-4i64..=4, 1i64..=3, -2i64..=2).prop_map(|(a, b, c)| Scalar::from_parts(a, b, c, 1))
}

fn nonzero_freq() -> impl Strategy<Value = Frequency> {
    prop_oneof![
        Just(Frequency::unit(1)),
        Just(Frequency::new(vec![Scalar::from_int(2)]).unwrap()),
        Just(Frequency::new(vec![Scalar::from_int(-1)]).unwrap()),
        Just(Frequency::new(vec![Scalar::from_parts(1, 1, 1, 1)]).unwrap()),
        Just(Frequency::new(vec![Scalar::from_parts(1, 2, 0, 1)]).unwrap()),
    ]
}

fn exppoly_1d() -> impl Strategy<Value = ExpPoly> {
    vec((nonzero_freq(), vec(scalar(), 1..=4)), 0..=3).prop_map(|parts| {
        let mut f = ExpPoly::zero(1);
        for (freq, coeffs) in parts {
            let mut p = Polynomial::zero(1);
            for (deg, c) in coeffs.into_iter().enumerate() {
                p.add_term(vec![deg as u32], c);
            }
            if !p.is_zero() {
                f = f.add(&ExpPoly::exp_part(freq, p));
            }
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_reconstructs_exactly(m in small_matrix()) {
        let (u, d, v) = smith_normal_form(&m);
        prop_assert_eq!(u.mul(&m).mul(&v), d.clone());
        prop_assert_eq!(u.det().magnitude().to_string(), "1");
        prop_assert_eq!(v.det().magnitude().to_string(), "1");
        let k = m.rows.min(m.cols);
        for i in 0..k.saturating_sub(1) {
            let a = d.get(i, i);
            let b = d.get(i + 1, i + 1);
            if num_traits::Zero::is_zero(a) {
                prop_assert!(num_traits::Zero::is_zero(b));
            } else {
                prop_assert!(num_traits::Zero::is_zero(&(b % a)));
            }
        }
    }

    #[test]
    fn generates_iff_index_one(steps in vec(vec(-6i64..=6, 2), 1..=4)) {
        let g = GroupSpec::free(2);
        let elems: Vec<GroupElement> = steps.into_iter().map(GroupElement::free_vec).collect();
        let gen = generates(&g, &elems).unwrap();
        let idx = subgroup_index(&g, &elems).unwrap();
        prop_assert_eq!(gen, idx.is_one());
    }

    #[test]
    fn appending_preserves_generation(
        steps in vec(vec(-6i64..=6, 2), 1..=3),
        extra in vec(-6i64..=6, 2),
    ) {
        let g = GroupSpec::free(2);
        let mut elems: Vec<GroupElement> = steps.into_iter().map(GroupElement::free_vec).collect();
        if generates(&g, &elems).unwrap() {
            elems.push(GroupElement::free_vec(extra));
            prop_assert!(generates(&g, &elems).unwrap());
        }
    }

    #[test]
    fn coset_transversal_is_complete_and_distinct(
        a in 1i64..=4, b in -3i64..=3, c in 1i64..=4,
    ) {
        // triangular generators guarantee finite index a*c
        let g = GroupSpec::free(2);
        let steps = vec![
            GroupElement::free_vec(vec![a, 0]),
            GroupElement::free_vec(vec![b, c]),
        ];
        let table = CosetTable::new(&g, &steps).unwrap();
        let reps = table.representatives();
        match subgroup_index(&g, &steps).unwrap() {
            SubgroupIndex::Finite(n) => prop_assert_eq!(n.to_string(), reps.len().to_string()),
            SubgroupIndex::Infinite => prop_assert!(false),
        }
        let mut keys: Vec<_> = reps
            .iter()
            .map(|r| table.coset_key(r).unwrap())
            .collect();
        keys.sort();
        keys.dedup();
        prop_assert_eq!(keys.len(), reps.len());
    }

    #[test]
    fn translations_commute_and_compose(
        f in exppoly_1d(),
        a in -4i64..=4,
        b in -4i64..=4,
    ) {
        let lhs = f.translate(&[a]).unwrap().translate(&[b]).unwrap();
        let rhs = f.translate(&[a + b]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn deltas_commute(f in exppoly_1d(), a in -4i64..=4, b in -4i64..=4) {
        let ab = f.delta(&[a]).unwrap().delta(&[b]).unwrap();
        let ba = f.delta(&[b]).unwrap().delta(&[a]).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn delta_drops_polynomial_degree(coeffs in vec(scalar(), 2..=5), h in 1i64..=4) {
        let mut p = Polynomial::zero(1);
        for (deg, c) in coeffs.into_iter().enumerate() {
            p.add_term(vec![deg as u32], c);
        }
        prop_assume!(!p.is_zero());
        let f = ExpPoly::from_polynomial(p);
        let n = f.total_degree().unwrap();
        prop_assume!(n >= 1);
        let d = f.delta(&[h]).unwrap();
        match d.total_degree() {
            Some(m) => prop_assert!(m <= n - 1),
            None => {}
        }
    }

    #[test]
    fn tau_span_dimension_bounds(f in exppoly_1d(), h in -3i64..=3) {
        let dim = f.tau_span_dimension();
        prop_assert_eq!(f.translate(&[h]).unwrap().tau_span_dimension(), dim);
        prop_assert!(f.delta(&[h]).unwrap().tau_span_dimension() <= dim);
    }

    #[test]
    fn evaluate_respects_delta(f in exppoly_1d(), h in -4i64..=4, x in -6i64..=6) {
        let d = f.delta(&[h]).unwrap();
        let expected = &f.evaluate(&[x + h]).unwrap() - &f.evaluate(&[x]).unwrap();
        prop_assert_eq!(d.evaluate(&[x]).unwrap(), expected);
    }

    #[test]
    fn chain_application_is_order_free(
        f in exppoly_1d(),
        steps in vec(-3i64..=3, 1..=4),
        seed in any::<u64>(),
    ) {
        let chain = DiffChain::new(steps.iter().map(|&s| vec![s]).collect()).unwrap();
        let reference = chain.apply_exppoly(&f).unwrap();
        // fold deltas in a shuffled order
        let mut order: Vec<usize> = (0..steps.len()).collect();
        let k = (seed as usize) % order.len().max(1);
        order.rotate_left(k);
        let mut g = f.clone();
        for i in order {
            g = g.delta(&[steps[i]]).unwrap();
        }
        prop_assert_eq!(reference, g);
    }

    #[test]
    fn stencil_coefficients_sum_to_zero(steps in vec(-3i64..=3, 1..=5)) {
        let chain = DiffChain::new(steps.iter().map(|&s| vec![s]).collect()).unwrap();
        let total: num_bigint::BigInt = chain.expand().into_iter().map(|(_, c)| c).sum();
        prop_assert!(num_traits::Zero::is_zero(&total));
    }

    #[test]
    fn grid_and_symbolic_application_agree(
        f in exppoly_1d(),
        steps in vec(1i64..=2, 1..=3),
    ) {
        let chain = DiffChain::new(steps.iter().map(|&s| vec![s]).collect()).unwrap();
        let window = GridWindow::new(vec![0], vec![12]).unwrap();
        let sampled = GridFunction::sample(&f, window).unwrap();
        let on_grid = chain.apply_grid(&sampled).unwrap();
        let symbolic = chain.apply_exppoly(&f).unwrap();
        let resampled = GridFunction::sample(&symbolic, on_grid.window.clone()).unwrap();
        prop_assert_eq!(on_grid, resampled);
    }

    #[test]
    fn long_chains_annihilate_polynomials(
        coeffs in vec(scalar(), 1..=4),
        steps in vec(prop_oneof![-3i64..=-1, 1i64..=3], 0..=2),
    ) {
        let mut p = Polynomial::zero(1);
        for (deg, c) in coeffs.into_iter().enumerate() {
            p.add_term(vec![deg as u32], c);
        }
        let f = ExpPoly::from_polynomial(p);
        let n = f.total_degree().map_or(0, |d| d as usize);
        // any n+1 nonzero steps kill a degree-n polynomial
        let mut all_steps: Vec<Vec<i64>> = steps.into_iter().map(|s| vec![s]).collect();
        while all_steps.len() < n + 1 {
            all_steps.push(vec![1]);
        }
        let chain = DiffChain::new(all_steps).unwrap();
        prop_assert!(chain.apply_exppoly(&f).unwrap().is_zero());
    }

    #[test]
    fn nullspace_residuals_vanish(rows in vec(vec(-5i64..=5, 4), 1..=4)) {
        let m = ScalarMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Scalar::from_int).collect())
                .collect(),
        );
        for v in rref_nullspace(&m) {
            for r in m.mul_vec(&v) {
                prop_assert!(r.is_zero());
            }
        }
    }
}
