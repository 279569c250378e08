//! Exact solvers for difference systems: brute-force window kernels,
//! polynomial ansatz solving, and exponential-polynomial fitting.

pub use crate::linalg::{rref_nullspace, solve_affine, AffineSolutionSpace, ScalarMatrix};

use std::collections::BTreeSet;

use crate::diffcalc::{DiffChain, GridFunction, GridWindow};
use crate::error::CoreError;
use crate::exppoly::{ExpPoly, Frequency};
use crate::poly::Polynomial;
use crate::scalar::Scalar;

/// One equation of a difference system: chain applied to the unknown
/// equals the right-hand side (None means zero).
pub type Equation = (DiffChain, Option<ExpPoly>);

/// Brute-force oracle: the exact affine set of grid functions on
/// `window` satisfying every equation at every valid point. Unknowns
/// are the grid values in row-major order.
pub fn window_kernel(
    equations: &[Equation],
    window: &GridWindow,
) -> Result<AffineSolutionSpace, CoreError> {
    let volume = window.volume();
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for (chain, right) in equations {
        let stencil = chain.expand();
        if chain.num_vars().is_some() && chain.num_vars() != Some(window.dim()) {
            return Err(CoreError::DimensionMismatch {
                expected: window.dim(),
                got: chain.num_vars().unwrap(),
            });
        }
        // shrink to the points where the whole stencil stays inside
        let mut lower = window.lower.clone();
        let mut upper = window.upper.clone();
        for (off, _) in &stencil {
            for i in 0..window.dim() {
                lower[i] = lower[i].max(window.lower[i] - off[i]);
                upper[i] = upper[i].min(window.upper[i] - off[i]);
            }
        }
        if lower.iter().zip(&upper).any(|(l, u)| l >= u) {
            return Err(CoreError::EmptyValidWindow);
        }
        let valid = GridWindow::new(lower, upper)?;
        for x in valid.points() {
            let mut row = vec![Scalar::zero(); volume];
            for (off, c) in &stencil {
                let y: Vec<i64> = x.iter().zip(off).map(|(a, b)| a + b).collect();
                let idx = window.index_of(&y)?;
                row[idx] = &row[idx] + &Scalar::from_bigint(c.clone());
            }
            rows.push(row);
            rhs.push(match right {
                Some(p) => p.evaluate(&x)?,
                None => Scalar::zero(),
            });
        }
    }
    let a = ScalarMatrix::from_rows(rows);
    Ok(solve_affine(&a, &rhs))
}

/// Total-degree-bounded monomial exponents in `num_vars` variables,
/// in lexicographic order.
pub fn monomials_up_to(num_vars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; num_vars];
    loop {
        if current.iter().sum::<u32>() <= max_degree {
            out.push(current.clone());
        }
        // odometer with early cutoff would be nicer; the ranges are tiny
        let mut i = num_vars;
        loop {
            if i == 0 {
                out.sort();
                return out;
            }
            i -= 1;
            current[i] += 1;
            if current[i] <= max_degree {
                break;
            }
            current[i] = 0;
        }
    }
}

/// Solution of a polynomial-ansatz solve: coefficients are indexed by
/// `basis_exponents`.
#[derive(Clone, Debug)]
pub struct AnsatzSolution {
    pub basis_exponents: Vec<Vec<u32>>,
    pub space: AffineSolutionSpace,
}

impl AnsatzSolution {
    /// Rebuilds the polynomial behind a coefficient vector.
    pub fn to_polynomial(&self, coeffs: &[Scalar]) -> Polynomial {
        let num_vars = self.basis_exponents.first().map_or(0, Vec::len);
        let mut p = Polynomial::zero(num_vars);
        for (e, c) in self.basis_exponents.iter().zip(coeffs) {
            if !c.is_zero() {
                p.add_term(e.clone(), c.clone());
            }
        }
        p
    }
}

/// Solves the system over a generic polynomial of total degree
/// <= max_degree by equating ExpPoly coefficients. A right-hand side
/// with a non-unit frequency makes the system inconsistent by
/// construction; that shows up as an absent particular, not an error.
pub fn polynomial_ansatz_solve(
    equations: &[(DiffChain, ExpPoly)],
    max_degree: u32,
    num_vars: usize,
) -> Result<AnsatzSolution, CoreError> {
    let basis_exponents = monomials_up_to(num_vars, max_degree);
    // image of each basis monomial under each chain
    let mut images: Vec<Vec<ExpPoly>> = Vec::new(); // [equation][basis]
    for (chain, _) in equations {
        let mut row = Vec::with_capacity(basis_exponents.len());
        for e in &basis_exponents {
            let mono = ExpPoly::from_polynomial(Polynomial::monomial(
                num_vars,
                e.clone(),
                Scalar::one(),
            ));
            row.push(chain.apply_exppoly(&mono)?);
        }
        images.push(row);
    }
    // coordinate keys: union over images and right-hand sides, per equation
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs_vec: Vec<Scalar> = Vec::new();
    for (eq_idx, (_, rhs)) in equations.iter().enumerate() {
        let mut keys: BTreeSet<(Frequency, Vec<u32>)> = BTreeSet::new();
        for img in &images[eq_idx] {
            for (f, p) in img.parts() {
                for (e, _) in p.terms() {
                    keys.insert((f.clone(), e.clone()));
                }
            }
        }
        for (f, p) in rhs.parts() {
            for (e, _) in p.terms() {
                keys.insert((f.clone(), e.clone()));
            }
        }
        for key in keys {
            let row: Vec<Scalar> = images[eq_idx]
                .iter()
                .map(|img| coeff_at(img, &key))
                .collect();
            rows.push(row);
            rhs_vec.push(coeff_at(rhs, &key));
        }
    }
    let a = if rows.is_empty() {
        ScalarMatrix::zero(0, basis_exponents.len())
    } else {
        ScalarMatrix::from_rows(rows)
    };
    let space = solve_affine(&a, &rhs_vec);
    Ok(AnsatzSolution {
        basis_exponents,
        space,
    })
}

fn coeff_at(f: &ExpPoly, key: &(Frequency, Vec<u32>)) -> Scalar {
    for (freq, p) in f.parts() {
        if freq == &key.0 {
            return p.coeff(&key.1);
        }
    }
    Scalar::zero()
}

/// Exact interpolation of a grid function by an exponential polynomial
/// over the given candidate frequencies with polynomial parts of total
/// degree <= max_degree. Returns None unless the fit matches every
/// window point exactly.
pub fn exppoly_fit(
    g: &GridFunction,
    frequencies: &[Frequency],
    max_degree: u32,
) -> Result<Option<ExpPoly>, CoreError> {
    let d = g.window.dim();
    for f in frequencies {
        if f.num_vars() != d {
            return Err(CoreError::DimensionMismatch {
                expected: d,
                got: f.num_vars(),
            });
        }
    }
    // deduplicate candidates, canonical order
    let freqs: Vec<Frequency> = frequencies
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let monos = monomials_up_to(d, max_degree);
    let unknowns = freqs.len() * monos.len();
    // underdetermined fits are legal but flagged to the caller by the
    // kernel of the returned system; here we only need the particular
    let mut rows = Vec::with_capacity(g.window.volume());
    for x in g.window.points() {
        let mut row = Vec::with_capacity(unknowns);
        for f in &freqs {
            let character = f.pow(&x)?;
            for e in &monos {
                let mut m = Scalar::one();
                for (i, &k) in e.iter().enumerate() {
                    if k > 0 {
                        m = &m * &Scalar::from_int(x[i]).pow(k as i64)?;
                    }
                }
                row.push(&m * &character);
            }
        }
        rows.push(row);
    }
    let a = ScalarMatrix::from_rows(rows);
    let sol = solve_affine(&a, &g.values);
    let coeffs = match sol.particular {
        Some(c) => c,
        None => return Ok(None),
    };
    let mut fit = ExpPoly::zero(d);
    for (fi, f) in freqs.iter().enumerate() {
        let mut p = Polynomial::zero(d);
        for (mi, e) in monos.iter().enumerate() {
            let c = &coeffs[fi * monos.len() + mi];
            if !c.is_zero() {
                p.add_term(e.clone(), c.clone());
            }
        }
        if !p.is_zero() {
            fit = fit.add(&ExpPoly::exp_part(f.clone(), p));
        }
    }
    // residual must vanish at every point
    for (x, v) in g.window.points().zip(&g.values) {
        if &fit.evaluate(&x)? != v {
            return Ok(None);
        }
    }
    Ok(Some(fit))
}

/// Tries degrees 0..=cap in order and returns the first exact fit, so
/// certificates carry the minimal ansatz degree.
pub fn exppoly_fit_escalating(
    g: &GridFunction,
    frequencies: &[Frequency],
    degree_cap: u32,
) -> Result<Option<(ExpPoly, u32)>, CoreError> {
    for deg in 0..=degree_cap {
        if let Some(fit) = exppoly_fit(g, frequencies, deg)? {
            return Ok(Some((fit, deg)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn x_poly() -> Polynomial {
        Polynomial::var(1, 0)
    }

    fn freq(n: i64) -> Frequency {
        Frequency::new(vec![s(n)]).unwrap()
    }

    #[test]
    fn window_kernel_third_difference() {
        // Delta_1^3 f = 0 on [0,12): restrictions of degree <= 2 polynomials
        let eqs = vec![(DiffChain::power(vec![1], 3), None)];
        let w = GridWindow::new(vec![0], vec![12]).unwrap();
        let sol = window_kernel(&eqs, &w).unwrap();
        assert!(sol.is_consistent());
        assert_eq!(sol.dimension, 3);
        // every kernel vector fits a degree <= 2 polynomial
        for v in &sol.kernel {
            let g = GridFunction::new(w.clone(), v.clone()).unwrap();
            let fit = exppoly_fit(&g, &[Frequency::unit(1)], 2).unwrap();
            assert!(fit.is_some());
        }
    }

    #[test]
    fn window_kernel_unmixed_pair() {
        // Delta_2^2 f = 0 and Delta_3^2 f = 0 on [0,30)
        let eqs = vec![
            (DiffChain::power(vec![2], 2), None),
            (DiffChain::power(vec![3], 2), None),
        ];
        let w = GridWindow::new(vec![0], vec![30]).unwrap();
        let sol = window_kernel(&eqs, &w).unwrap();
        for v in &sol.kernel {
            let g = GridFunction::new(w.clone(), v.clone()).unwrap();
            let fit = exppoly_fit(&g, &[Frequency::unit(1)], 2).unwrap();
            assert!(fit.is_some(), "kernel vector not a degree <= 2 polynomial");
        }
    }

    #[test]
    fn window_kernel_telescoping() {
        // Delta_1 f = 1 on [0,10): particular is x + c, kernel = constants
        let eqs = vec![(
            DiffChain::single(vec![1]),
            Some(ExpPoly::constant(1, Scalar::one())),
        )];
        let w = GridWindow::new(vec![0], vec![10]).unwrap();
        let sol = window_kernel(&eqs, &w).unwrap();
        assert_eq!(sol.dimension, 1);
        let p = sol.particular.unwrap();
        // consecutive differences all equal 1
        for i in 0..9 {
            assert_eq!(&p[i + 1] - &p[i], s(1));
        }
        for k in &sol.kernel {
            assert!(k.windows(2).all(|w| w[0] == w[1]), "kernel not constant");
        }
    }

    #[test]
    fn ansatz_affine_kernel() {
        let eqs = vec![(DiffChain::power(vec![1], 2), ExpPoly::zero(1))];
        let sol = polynomial_ansatz_solve(&eqs, 1, 1).unwrap();
        assert!(sol.space.is_consistent());
        assert_eq!(sol.space.dimension, 2);
    }

    #[test]
    fn ansatz_inverse_of_delta() {
        // Delta_1 f = 2x + 1 -> f = x^2 (+ constants)
        let rhs = ExpPoly::from_polynomial(
            x_poly()
                .scale(&s(2))
                .add(&Polynomial::constant(1, Scalar::one())),
        );
        let eqs = vec![(DiffChain::single(vec![1]), rhs)];
        let sol = polynomial_ansatz_solve(&eqs, 2, 1).unwrap();
        let p = sol.space.particular.clone().unwrap();
        let poly = sol.to_polynomial(&p);
        // particular solution differs from x^2 by a constant
        let x2 = x_poly().mul(&x_poly());
        let diff = poly.sub(&x2);
        assert!(diff.total_degree().map_or(true, |d| d == 0));
        assert_eq!(sol.space.dimension, 1);
    }

    #[test]
    fn ansatz_agrees_with_window_kernel() {
        let eqs = vec![
            (DiffChain::power(vec![2], 2), ExpPoly::zero(1)),
            (DiffChain::power(vec![3], 2), ExpPoly::zero(1)),
        ];
        let sol = polynomial_ansatz_solve(&eqs, 2, 1).unwrap();
        assert!(sol.space.is_consistent());
        // sampling every ansatz solution lands in the window kernel
        let w = GridWindow::new(vec![0], vec![30]).unwrap();
        let weqs: Vec<Equation> = vec![
            (DiffChain::power(vec![2], 2), None),
            (DiffChain::power(vec![3], 2), None),
        ];
        let wk = window_kernel(&weqs, &w).unwrap();
        assert_eq!(sol.space.dimension, wk.dimension);
    }

    #[test]
    fn ansatz_nonunit_rhs_inconsistent() {
        let rhs = ExpPoly::exp_part(freq(2), Polynomial::constant(1, Scalar::one()));
        let eqs = vec![(DiffChain::single(vec![1]), rhs)];
        let sol = polynomial_ansatz_solve(&eqs, 3, 1).unwrap();
        assert!(!sol.space.is_consistent());
    }

    #[test]
    fn fit_examples() {
        // 2^x from its own samples
        let two_pow = ExpPoly::exp_part(freq(2), Polynomial::constant(1, Scalar::one()));
        let w = GridWindow::new(vec![0], vec![10]).unwrap();
        let g = GridFunction::sample(&two_pow, w.clone()).unwrap();
        let fit = exppoly_fit(&g, &[freq(2)], 0).unwrap().unwrap();
        assert_eq!(fit, two_pow);

        // parity is not a polynomial on [0,10) ...
        let parity = GridFunction::new(w.clone(), (0..10).map(|i| s(i % 2)).collect()).unwrap();
        assert!(exppoly_fit(&parity, &[Frequency::unit(1)], 7)
            .unwrap()
            .is_none());
        // ... but is (1 - (-1)^x) / 2
        let fit = exppoly_fit(&parity, &[freq(-1), freq(1)], 0)
            .unwrap()
            .unwrap();
        let half = Scalar::from_parts(1, 2, 0, 1);
        let expected = ExpPoly::constant(1, half.clone())
            .sub(&ExpPoly::exp_part(freq(-1), Polynomial::constant(1, half)));
        assert_eq!(fit, expected);

        // x^2 from samples
        let x2 = ExpPoly::from_polynomial(x_poly().mul(&x_poly()));
        let g = GridFunction::sample(&x2, w).unwrap();
        let fit = exppoly_fit(&g, &[Frequency::unit(1)], 2).unwrap().unwrap();
        assert_eq!(fit, x2);
    }

    #[test]
    fn fit_escalation_reports_minimal_degree() {
        let x2 = ExpPoly::from_polynomial(x_poly().mul(&x_poly()));
        let w = GridWindow::new(vec![0], vec![10]).unwrap();
        let g = GridFunction::sample(&x2, w).unwrap();
        let (fit, deg) = exppoly_fit_escalating(&g, &[Frequency::unit(1)], 8)
            .unwrap()
            .unwrap();
        assert_eq!(deg, 2);
        assert_eq!(fit, x2);
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_up_to(1, 2), vec![vec![0], vec![1], vec![2]]);
        let m2 = monomials_up_to(2, 2);
        assert_eq!(m2.len(), 6); // 1, y, y^2, x, xy, x^2
        assert!(m2.iter().all(|e| e.iter().sum::<u32>() <= 2));
        assert!(monomials_up_to(0, 3).len() == 1);
    }

    #[test]
    fn kernel_dimension_monotone_under_window_growth() {
        let eqs: Vec<Equation> = vec![
            (DiffChain::new(vec![vec![2], vec![4]]).unwrap(), None),
            (DiffChain::new(vec![vec![3], vec![9]]).unwrap(), None),
        ];
        let mut prev = usize::MAX;
        for n in [26i64, 32, 38, 44] {
            let w = GridWindow::new(vec![0], vec![n]).unwrap();
            let dim = window_kernel(&eqs, &w).unwrap().dimension;
            assert!(dim <= prev);
            prev = dim;
        }
    }
}
