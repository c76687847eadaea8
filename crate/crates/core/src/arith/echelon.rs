//! Echelon forms over the local ring `Z_(p)` and mixed field/ring solving.

use super::matrix::{axpy_rows, nullspace_from_rref, Matrix, Vector};
use super::prime::Prime;
use super::rational::{Rational, Valuation};

/// Hermite echelon form of a `Z_(p)`-row span.
///
/// Pivot `i` sits at `(i, pivot_cols[i])` and equals `p^exponents[i]`;
/// entries below pivots vanish and entries above a pivot are canonical
/// residues modulo `p^exponents[i] Z_(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DvrEchelon {
    pub pivot_cols: Vec<usize>,
    pub exponents: Vec<i64>,
    pub matrix: Matrix,
}

impl DvrEchelon {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    /// Pivot positions as `(row, col)`.
    pub fn pivots(&self) -> Vec<(usize, usize)> {
        self.pivot_cols.iter().copied().enumerate().collect()
    }

    /// Reduces `x` by the rows of the echelon; the remainder is zero iff
    /// `x` lies in the span. Returns `None` when a non-integral coefficient
    /// would be required.
    pub fn reduce(&self, x: &mut [Rational], p: Prime) -> Option<()> {
        for (i, (&c, &a)) in self.pivot_cols.iter().zip(&self.exponents).enumerate() {
            if x[c].is_zero() {
                continue;
            }
            if x[c].valuation(p) < Valuation::Finite(a) {
                return None;
            }
            let t = &x[c] / &Rational::p_pow(p, a);
            for (xj, mj) in x.iter_mut().zip(self.matrix.row(i)).skip(c) {
                if !mj.is_zero() {
                    *xj -= &(&t * mj);
                }
            }
        }
        Some(())
    }

    pub fn contains(&self, x: &[Rational], p: Prime) -> bool {
        let mut v = x.to_vec();
        self.reduce(&mut v, p).is_some() && v.iter().all(Rational::is_zero)
    }
}

/// Canonical Hermite form of the `Z_(p)`-row span of `m`.
pub fn dvr_echelon(m: &Matrix, p: Prime) -> DvrEchelon {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivot_cols = Vec::new();
    let mut exponents = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !a[(i, c)].is_zero())
            .min_by_key(|&i| a[(i, c)].valuation(p));
        let Some(best) = best else { continue };
        a.swap_rows(best, r);
        let e = a[(r, c)].valuation(p).finite().expect("nonzero pivot");
        let target = Rational::p_pow(p, e);
        if a[(r, c)] != target {
            let u = &target / &a[(r, c)];
            for x in a.row_mut(r)[c..].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &u;
                }
            }
        }
        let inv = Rational::p_pow(p, -e);
        for i in r + 1..rows {
            if !a[(i, c)].is_zero() {
                let t = &a[(i, c)] * &inv;
                axpy_rows(&mut a, i, r, &t, c);
            }
        }
        pivot_cols.push(c);
        exponents.push(e);
        r += 1;
    }
    let mut a = a.submatrix(0, r, 0, cols);
    // Ascending pivot order: reducing by row i never touches earlier pivot columns.
    for (i, (&c, &e)) in pivot_cols.iter().zip(&exponents).enumerate() {
        let inv = Rational::p_pow(p, -e);
        for j in 0..i {
            let x = &a[(j, c)];
            if x.is_zero() {
                continue;
            }
            let res = x.residue(e, p);
            if res == *x {
                continue;
            }
            let t = &(x - &res) * &inv;
            axpy_rows(&mut a, j, i, &t, c);
        }
    }
    DvrEchelon {
        pivot_cols,
        exponents,
        matrix: a,
    }
}

/// Given a `Q`-basis (rows) of a subspace `K` of `Q^g`, returns a
/// `Z_(p)`-basis of `K ∩ Z_(p)^g`.
pub fn saturate(basis: &Matrix, p: Prime) -> Matrix {
    let (s, g) = (basis.rows(), basis.cols());
    let mut m = basis.clone();
    // Column operations on `m` are mirrored as inverse row operations on `vinv`.
    let mut vinv = Matrix::identity(g);
    for r in 0..s {
        let best = (r..g)
            .filter(|&j| !m[(r, j)].is_zero())
            .min_by_key(|&j| m[(r, j)].valuation(p))
            .expect("saturate expects linearly independent rows");
        if best != r {
            for i in 0..s {
                let tmp = m[(i, best)].clone();
                m[(i, best)] = m[(i, r)].clone();
                m[(i, r)] = tmp;
            }
            vinv.swap_rows(best, r);
        }
        let inv = m[(r, r)].recip().expect("nonzero pivot");
        for j in r + 1..g {
            if m[(r, j)].is_zero() {
                continue;
            }
            let t = &m[(r, j)] * &inv;
            for i in r..s {
                if !m[(i, r)].is_zero() {
                    let d = &t * &m[(i, r)];
                    m[(i, j)] -= &d;
                }
            }
            // vinv row_r += t * row_j
            let neg = -&t;
            axpy_rows(&mut vinv, r, j, &neg, 0);
        }
    }
    vinv.submatrix(0, s, 0, g)
}

/// Generators of the solution module of `c * (a; b) = 0` where the first
/// `n_free` unknowns range over `Q` and the rest over `Z_(p)`.
///
/// Returns `(free_gens, int_gens)` as row matrices of width `c.cols()`.
pub fn solve_mixed(c: &Matrix, n_free: usize, p: Prime) -> (Matrix, Matrix) {
    let width = c.cols();
    let n_int = width - n_free;
    let (r, piv) = c.rref();
    let free_piv: Vec<(usize, usize)> = piv
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, col)| col < n_free)
        .collect();
    let int_rows: Vec<usize> = (0..piv.len()).filter(|&i| piv[i] >= n_free).collect();

    // Constraints purely on the integral unknowns, already in rref.
    let mut cint = Matrix::zeros(0, n_int);
    for &i in &int_rows {
        cint.push_row(&r.row(i)[n_free..]);
    }
    let int_piv: Vec<usize> = int_rows.iter().map(|&i| piv[i] - n_free).collect();
    let kernel = nullspace_from_rref(&cint, &int_piv);
    let lattice = if kernel.rows() == 0 {
        kernel
    } else {
        saturate(&kernel, p)
    };

    let mut is_piv = vec![false; n_free];
    for &(_, col) in &free_piv {
        is_piv[col] = true;
    }
    let mut free_gens = Matrix::zeros(0, width);
    for j in (0..n_free).filter(|&j| !is_piv[j]) {
        let mut v = vec![Rational::zero(); width];
        v[j] = Rational::one();
        for &(i, col) in &free_piv {
            v[col] = -&r[(i, j)];
        }
        free_gens.push_row(&v);
    }
    let mut int_gens = Matrix::zeros(0, width);
    for b in lattice.row_vecs() {
        let mut v: Vector = vec![Rational::zero(); width];
        for &(i, col) in &free_piv {
            let mut acc = Rational::zero();
            for (coef, bj) in r.row(i)[n_free..].iter().zip(&b) {
                if !coef.is_zero() && !bj.is_zero() {
                    acc += &(coef * bj);
                }
            }
            v[col] = -acc;
        }
        v[n_free..].clone_from_slice(&b);
        int_gens.push_row(&v);
    }
    (free_gens, int_gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn identity_echelon() {
        let e = dvr_echelon(&Matrix::identity(2), pr(3));
        assert_eq!(e.exponents, vec![0, 0]);
        assert_eq!(e.matrix, Matrix::identity(2));
    }

    #[test]
    fn redundant_row_absorbed() {
        let e = dvr_echelon(&Matrix::from_ints(&[&[3, 0], &[0, 1], &[1, 0]]), pr(3));
        assert_eq!(e.matrix, Matrix::identity(2));
        assert_eq!(e.pivots(), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn negative_exponent_pivot() {
        let p = pr(5);
        let m = Matrix::from_rows(vec![vec![q(1, 5), q(1, 1)]], 2).unwrap();
        let e = dvr_echelon(&m, p);
        assert_eq!(e.exponents, vec![-1]);
        assert_eq!(e.pivot_cols, vec![0]);
        assert_eq!(e.matrix.row(0), &[q(1, 5), q(1, 1)]);
        // mutual membership
        assert!(e.contains(m.row(0), p));
        let orig = dvr_echelon(&e.matrix, p);
        assert_eq!(orig, e);
    }

    #[test]
    fn above_pivot_entries_are_residues() {
        let p = pr(3);
        let m = Matrix::from_ints(&[&[1, 7], &[0, 9]]);
        let e = dvr_echelon(&m, p);
        assert_eq!(e.matrix, Matrix::from_ints(&[&[1, 7], &[0, 9]]));
        let m2 = Matrix::from_ints(&[&[1, 16], &[0, -9]]);
        assert_eq!(dvr_echelon(&m2, p), e);
    }

    #[test]
    fn saturation_of_a_line() {
        let p = pr(3);
        // span of (3, 6): the saturated generator is (1, 2) up to a unit.
        let b = Matrix::from_ints(&[&[3, 6]]);
        let s = saturate(&b, p);
        let e = dvr_echelon(&s, p);
        assert_eq!(e.matrix, Matrix::from_ints(&[&[1, 2]]));
        let b = Matrix::from_rows(vec![vec![q(1, 9), q(1, 3)]], 2).unwrap();
        let e = dvr_echelon(&saturate(&b, p), p);
        assert_eq!(e.matrix, Matrix::from_ints(&[&[1, 3]]));
    }

    #[test]
    fn mixed_solve_sum_zero() {
        // x1 + x2 = 0 with both unknowns integral: generator (1, -1).
        let p = pr(3);
        let (f, i) = solve_mixed(&Matrix::from_ints(&[&[1, 1]]), 0, p);
        assert_eq!(f.rows(), 0);
        let e = dvr_echelon(&i, p);
        assert_eq!(e.matrix, Matrix::from_ints(&[&[1, -1]]));
    }

    #[test]
    fn mixed_solve_free_absorbs() {
        // a - 3 b = 0, a free, b integral: solutions (3b, b).
        let p = pr(3);
        let (f, i) = solve_mixed(&Matrix::from_ints(&[&[1, -3]]), 1, p);
        assert_eq!(f.rows(), 0);
        assert_eq!(i, Matrix::from_ints(&[&[3, 1]]));
    }
}
