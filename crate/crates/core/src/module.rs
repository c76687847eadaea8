//! Finitely generated `O_p`-submodules of `Q_p^n`.
//!
//! A module is `F + L` where `F` is a `Q`-subspace (free generators) and `L`
//! a finitely generated `Z_(p)`-module (integral generators). Modules are
//! kept in canonical form at all times, so `==` is set equality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{dvr_echelon, solve_mixed, DvrEchelon, Matrix, Prime, Rational, Vector};
use crate::error::{dim_err, Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Module {
    p: Prime,
    dim: usize,
    free: Matrix,
    free_pivots: Vec<usize>,
    lattice: DvrEchelon,
}

impl Module {
    /// Canonicalizes the module generated by the rows of `free` (over `Q`)
    /// and `int` (over `Z_(p)`).
    pub fn new(p: Prime, dim: usize, free: &Matrix, int: &Matrix) -> Result<Self> {
        if free.cols() != dim || int.cols() != dim {
            return Err(dim_err(format!(
                "generators of width {}/{} in ambient dimension {dim}",
                free.cols(),
                int.cols()
            )));
        }
        Ok(Self::canonical(p, dim, free, int))
    }

    fn canonical(p: Prime, dim: usize, free: &Matrix, int: &Matrix) -> Self {
        let (free, free_pivots) = free.rref();
        let mut reduced = int.clone();
        for r in 0..reduced.rows() {
            let row = reduced.row_mut(r);
            reduce_by_rref(row, &free, &free_pivots);
        }
        let lattice = dvr_echelon(&reduced, p);
        Module {
            p,
            dim,
            free,
            free_pivots,
            lattice,
        }
    }

    pub fn zero(p: Prime, dim: usize) -> Self {
        Self::canonical(p, dim, &Matrix::zeros(0, dim), &Matrix::zeros(0, dim))
    }

    /// `O_p^n`.
    pub fn standard_lattice(p: Prime, dim: usize) -> Self {
        Self::canonical(p, dim, &Matrix::zeros(0, dim), &Matrix::identity(dim))
    }

    /// `Q_p^n`.
    pub fn whole(p: Prime, dim: usize) -> Self {
        Self::canonical(p, dim, &Matrix::identity(dim), &Matrix::zeros(0, dim))
    }

    /// `⊕ p^{e_i} O_p e_i`.
    pub fn diagonal_lattice(p: Prime, exponents: &[i64]) -> Self {
        let d: Vec<Rational> = exponents.iter().map(|&e| Rational::p_pow(p, e)).collect();
        let n = d.len();
        Self::canonical(p, n, &Matrix::zeros(0, n), &Matrix::diagonal(&d))
    }

    /// The `Q_p`-span of the rows of `basis`.
    pub fn subspace(p: Prime, basis: &Matrix) -> Self {
        let n = basis.cols();
        Self::canonical(p, n, basis, &Matrix::zeros(0, n))
    }

    /// The `O_p`-span of the rows of `gens`.
    pub fn lattice_span(p: Prime, gens: &Matrix) -> Self {
        let n = gens.cols();
        Self::canonical(p, n, &Matrix::zeros(0, n), gens)
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Canonical free generators (a basis of `R_↓` in rref).
    pub fn free(&self) -> &Matrix {
        &self.free
    }

    /// Canonical integral generators (Hermite form modulo `R_↓`).
    pub fn int(&self) -> &Matrix {
        &self.lattice.matrix
    }

    pub fn echelon(&self) -> &DvrEchelon {
        &self.lattice
    }

    /// No free part.
    pub fn is_compact(&self) -> bool {
        self.free.rows() == 0
    }

    /// Compact and of full rank.
    pub fn is_lattice(&self) -> bool {
        self.is_compact() && self.lattice.rank() == self.dim
    }

    pub fn is_subspace(&self) -> bool {
        self.lattice.rank() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.free.rows() == 0 && self.lattice.rank() == 0
    }

    fn check_same(&self, other: &Module) -> Result<()> {
        if self.dim != other.dim {
            return Err(dim_err(format!(
                "ambient dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        if self.p != other.p {
            return Err(Error::Input(format!(
                "modules over p={} and p={}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    pub fn contains_vector(&self, x: &[Rational]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(dim_err(format!(
                "vector of length {} in dimension {}",
                x.len(),
                self.dim
            )));
        }
        let mut v = x.to_vec();
        reduce_by_rref(&mut v, &self.free, &self.free_pivots);
        Ok(self.lattice.contains(&v, self.p))
    }

    fn in_free_span(&self, x: &[Rational]) -> bool {
        let mut v = x.to_vec();
        reduce_by_rref(&mut v, &self.free, &self.free_pivots);
        v.iter().all(Rational::is_zero)
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Module) -> Result<bool> {
        self.check_same(other)?;
        for r in 0..other.free.rows() {
            if !self.in_free_span(other.free.row(r)) {
                return Ok(false);
            }
        }
        for r in 0..other.int().rows() {
            if !self.contains_vector(other.int().row(r))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Module) -> Result<Module> {
        self.check_same(other)?;
        let free = Matrix::vstack(&[&self.free, &other.free])?;
        let int = Matrix::vstack(&[self.int(), other.int()])?;
        Ok(Self::canonical(self.p, self.dim, &free, &int))
    }

    /// Direct sum in `Q^{n1} ⊕ Q^{n2}`.
    pub fn direct_sum(&self, other: &Module) -> Result<Module> {
        if self.p != other.p {
            return Err(Error::Input("direct sum over different primes".into()));
        }
        // Block-diagonal assembly of canonical forms is already canonical.
        let free = Matrix::block_diag(&[&self.free, &other.free]);
        let int = Matrix::block_diag(&[self.int(), other.int()]);
        let mut free_pivots = self.free_pivots.clone();
        free_pivots.extend(other.free_pivots.iter().map(|c| c + self.dim));
        let mut pivot_cols = self.lattice.pivot_cols.clone();
        pivot_cols.extend(other.lattice.pivot_cols.iter().map(|c| c + self.dim));
        let mut exponents = self.lattice.exponents.clone();
        exponents.extend_from_slice(&other.lattice.exponents);
        let out = Module {
            p: self.p,
            dim: self.dim + other.dim,
            free,
            free_pivots,
            lattice: DvrEchelon {
                pivot_cols,
                exponents,
                matrix: int,
            },
        };
        debug_assert!({
            let c = Self::canonical(out.p, out.dim, &out.free, out.int());
            c == out
        });
        Ok(out)
    }

    /// `{Ax : x ∈ R}` for `A` of shape `m × n`.
    pub fn image(&self, a: &Matrix) -> Result<Module> {
        if a.cols() != self.dim {
            return Err(dim_err(format!(
                "map with {} columns on dimension {}",
                a.cols(),
                self.dim
            )));
        }
        let at = a.transpose();
        let free = self.free.mul(&at)?;
        let int = self.int().mul(&at)?;
        Ok(Self::canonical(self.p, a.rows(), &free, &int))
    }

    /// `{x : Ax ∈ R}` for `A` of shape `dim(R) × n`.
    pub fn preimage(&self, a: &Matrix) -> Result<Module> {
        if a.rows() != self.dim {
            return Err(dim_err(format!(
                "map with {} rows into dimension {}",
                a.rows(),
                self.dim
            )));
        }
        let n = a.cols();
        let ft = self.free.transpose().neg();
        let gt = self.int().transpose().neg();
        let c = Matrix::hstack(&[a, &ft, &gt])?;
        let (sf, si) = solve_mixed(&c, n + self.free.rows(), self.p);
        let free = sf.submatrix(0, sf.rows(), 0, n);
        let int = si.submatrix(0, si.rows(), 0, n);
        Ok(Self::canonical(self.p, n, &free, &int))
    }

    /// `{x ∈ self : Ax = 0}`.
    pub fn kernel_of(&self, a: &Matrix) -> Result<Module> {
        if a.cols() != self.dim {
            return Err(dim_err(format!(
                "map with {} columns on dimension {}",
                a.cols(),
                self.dim
            )));
        }
        let gens = Matrix::vstack(&[&self.free, self.int()])?;
        let c = a.mul(&gens.transpose())?;
        let (sf, si) = solve_mixed(&c, self.free.rows(), self.p);
        let free = sf.mul(&gens)?;
        let int = si.mul(&gens)?;
        Ok(Self::canonical(self.p, self.dim, &free, &int))
    }

    pub fn intersect(&self, other: &Module) -> Result<Module> {
        self.check_same(other)?;
        let n = self.dim;
        let mut a = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            a[(i, i)] = Rational::one();
            a[(i, n + i)] = -Rational::one();
        }
        let k = self.direct_sum(other)?.kernel_of(&a)?;
        k.project(0, n)
    }

    /// Image under the coordinate projection onto `start..end`.
    pub fn project(&self, start: usize, end: usize) -> Result<Module> {
        if start > end || end > self.dim {
            return Err(dim_err(format!(
                "projection {start}..{end} of dimension {}",
                self.dim
            )));
        }
        let free = self.free.submatrix(0, self.free.rows(), start, end);
        let int = self.int().submatrix(0, self.int().rows(), start, end);
        Ok(Self::canonical(self.p, end - start, &free, &int))
    }

    /// Reorders coordinates: output coordinate `i` is input coordinate `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Module> {
        if perm.len() != self.dim {
            return Err(dim_err("permutation length differs from dimension"));
        }
        let free = self.free.select_cols(perm);
        let int = self.int().select_cols(perm);
        Ok(Self::canonical(self.p, self.dim, &free, &int))
    }

    pub fn scale(&self, c: &Rational) -> Module {
        if c.is_zero() {
            return Self::zero(self.p, self.dim);
        }
        Self::canonical(self.p, self.dim, &self.free, &self.int().scale(c))
    }

    /// Basis of `R_↓`.
    pub fn down(&self) -> Matrix {
        self.free.clone()
    }

    /// Basis (rref) of `R^↑`.
    pub fn up(&self) -> Matrix {
        Matrix::vstack(&[&self.free, self.int()])
            .expect("same width")
            .rref()
            .0
    }

    pub fn down_module(&self) -> Module {
        Self::subspace(self.p, &self.free)
    }

    pub fn up_module(&self) -> Module {
        Self::subspace(self.p, &self.up())
    }

    /// `x ∈ R + p^t O^n`.
    pub fn approx_contains(&self, x: &[Rational], t: i64) -> Result<bool> {
        let ball = Self::diagonal_lattice(self.p, &vec![t; self.dim]);
        self.sum(&ball)?.contains_vector(x)
    }

    /// `Q ⊗ O^m`: each generator `q` becomes `q ⊗ e_s` for `s < m`, with
    /// coordinate `j` of `q` sent to index `j*m + s`.
    pub fn tensor_with_standard_lattice(&self, m: usize) -> Module {
        let expand = |g: &Matrix| {
            let mut out = Matrix::zeros(0, self.dim * m);
            for r in 0..g.rows() {
                for s in 0..m {
                    let mut v = vec![Rational::zero(); self.dim * m];
                    for (j, x) in g.row(r).iter().enumerate() {
                        v[j * m + s] = x.clone();
                    }
                    out.push_row(&v);
                }
            }
            out
        };
        Self::canonical(
            self.p,
            self.dim * m,
            &expand(&self.free),
            &expand(self.int()),
        )
    }

    /// All generators, free rows first.
    pub fn generators(&self) -> (Matrix, Matrix) {
        (self.free.clone(), self.int().clone())
    }

    /// `{w : B(v, w) ∈ O_p for all v ∈ R}`.
    pub fn dual(&self, form: &SymplecticForm) -> Result<Module> {
        if form.dim() != self.dim {
            return Err(dim_err(format!(
                "form of dimension {} on module of dimension {}",
                form.dim(),
                self.dim
            )));
        }
        let gens = Matrix::vstack(&[&self.free, self.int()])?;
        let pairing = gens.mul(form.gram())?;
        let (r, s) = (self.free.rows(), self.int().rows());
        let mut target_int = Matrix::zeros(s, r + s);
        for j in 0..s {
            target_int[(j, r + j)] = Rational::one();
        }
        let target = Self::canonical(self.p, r + s, &Matrix::zeros(0, r + s), &target_int);
        target.preimage(&pairing)
    }

    pub fn is_isotropic(&self, form: &SymplecticForm) -> Result<bool> {
        self.dual(form)?.contains(self)
    }

    pub fn is_selfdual(&self, form: &SymplecticForm) -> Result<bool> {
        Ok(self.dual(form)? == *self)
    }

    /// `dual(R) ⊆ R ⊆ p^{-1} dual(R)`.
    pub fn is_almost_selfdual(&self, form: &SymplecticForm) -> Result<bool> {
        let d = self.dual(form)?;
        Ok(self.contains(&d)? && d.contains(&self.scale(&Rational::p_pow(self.p, 1)))?)
    }

    /// The same module viewed over a different prime (re-canonicalized).
    pub fn with_prime(&self, p: Prime) -> Module {
        Self::canonical(p, self.dim, &self.free, self.int())
    }
}

fn reduce_by_rref(x: &mut [Rational], free: &Matrix, pivots: &[usize]) {
    for (i, &c) in pivots.iter().enumerate() {
        if x[c].is_zero() {
            continue;
        }
        let t = x[c].clone();
        for (xj, fj) in x.iter_mut().zip(free.row(i)).skip(c) {
            if !fj.is_zero() {
                *xj -= &(&t * fj);
            }
        }
    }
}

impl fmt::Debug for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Module(p={}, n={}, free={:?}, int={:?})",
            self.p,
            self.dim,
            self.free,
            self.int()
        )
    }
}

/// Wire format of a module; canonicalization needs the prime, supplied on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub ambient: usize,
    #[serde(default)]
    pub free: Vec<Vector>,
    #[serde(default)]
    pub int: Vec<Vector>,
}

impl ModuleJson {
    pub fn into_module(self, p: Prime) -> Result<Module> {
        let free = Matrix::from_rows(self.free, self.ambient)?;
        let int = Matrix::from_rows(self.int, self.ambient)?;
        Module::new(p, self.ambient, &free, &int)
    }
}

impl From<&Module> for ModuleJson {
    fn from(m: &Module) -> Self {
        ModuleJson {
            ambient: m.dim,
            free: m.free.row_vecs(),
            int: m.int().row_vecs(),
        }
    }
}

/// Non-degenerate skew-symmetric bilinear form `B(v, w) = vᵀ G w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticForm {
    gram: Matrix,
}

impl SymplecticForm {
    pub fn new(gram: Matrix) -> Result<Self> {
        if !gram.is_square() || gram.transpose() != gram.neg() {
            return Err(Error::Input("Gram matrix is not skew-symmetric".into()));
        }
        if gram.det()?.is_zero() {
            return Err(Error::Input("Gram matrix is degenerate".into()));
        }
        Ok(SymplecticForm { gram })
    }

    /// `[[0, I], [-I, 0]]` on `Q^{2n}`.
    pub fn standard(n: usize) -> Self {
        SymplecticForm {
            gram: standard_j(n),
        }
    }

    /// `B_src ⊖ B_dst` on `src ⊕ dst`.
    pub fn ominus(src: &SymplecticForm, dst: &SymplecticForm) -> Self {
        SymplecticForm {
            gram: Matrix::block_diag(&[&src.gram, &dst.gram.neg()]),
        }
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn pair(&self, v: &[Rational], w: &[Rational]) -> Result<Rational> {
        let gw = self.gram.mul_vec(w)?;
        if v.len() != gw.len() {
            return Err(dim_err("pairing vectors of different lengths"));
        }
        let mut acc = Rational::zero();
        for (a, b) in v.iter().zip(&gw) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
        Ok(acc)
    }

    /// `A` preserves the form: `Aᵀ G A = G`.
    pub fn preserved_by(&self, a: &Matrix) -> Result<bool> {
        Ok(a.transpose().mul(&self.gram)?.mul(a)? == self.gram)
    }
}

/// The standard symplectic Gram matrix `[[0, I_n], [-I_n, 0]]`.
pub fn standard_j(n: usize) -> Matrix {
    let mut j = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = Rational::one();
        j[(n + i, i)] = -Rational::one();
    }
    j
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

    fn ints(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    fn empty(n: usize) -> Matrix {
        Matrix::zeros(0, n)
    }

    #[test]
    fn canonicalize_examples() {
        let p = pr(3);
        let m = Module::new(p, 2, &ints(&[&[1, 0]]), &ints(&[&[3, 0], &[0, 1]])).unwrap();
        assert_eq!(m.free(), &ints(&[&[1, 0]]));
        assert_eq!(m.int(), &ints(&[&[0, 1]]));
        let lat = Module::standard_lattice(p, 3);
        assert_eq!(lat.int(), &Matrix::identity(3));
        let r = Module::new(p, 2, &empty(2), &ints(&[&[1, 0], &[3, 0]])).unwrap();
        assert_eq!(r.int(), &ints(&[&[1, 0]]));
        let again = Module::new(p, 2, r.free(), r.int()).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn membership_examples() {
        let p = pr(3);
        let x = vec![q(1, 3), q(1, 1)];
        assert!(!Module::standard_lattice(p, 2).contains_vector(&x).unwrap());
        assert!(Module::diagonal_lattice(p, &[-1, 0])
            .contains_vector(&x)
            .unwrap());
        let line = Module::subspace(p, &ints(&[&[1, 0]]));
        assert!(line.contains_vector(&[q(5, 7), q(0, 1)]).unwrap());
        assert!(line.contains_vector(&[q(1, 1)]).is_err());
    }

    #[test]
    fn intersection_and_sum_examples() {
        let p = pr(5);
        let o2 = Module::standard_lattice(p, 2);
        let other = Module::diagonal_lattice(p, &[1, -1]);
        assert_eq!(
            o2.intersect(&other).unwrap(),
            Module::diagonal_lattice(p, &[1, 0])
        );
        let line = Module::subspace(p, &ints(&[&[1, 1]]));
        let cap = line.intersect(&o2).unwrap();
        assert_eq!(cap, Module::lattice_span(p, &ints(&[&[1, 1]])));
        // oracle: t(1,1) ∈ cap iff v(t) >= 0
        for e in -3..=3 {
            let t = Rational::p_pow(p, e);
            assert_eq!(cap.contains_vector(&[t.clone(), t]).unwrap(), e >= 0);
        }
        let a = Module::lattice_span(p, &ints(&[&[1, 0]]));
        let b = Module::lattice_span(p, &ints(&[&[0, 1]]));
        assert_eq!(a.sum(&b).unwrap(), o2);
    }

    #[test]
    fn image_preimage_kernel_examples() {
        let p = pr(3);
        let o2 = Module::standard_lattice(p, 2);
        assert_eq!(
            o2.image(&ints(&[&[3, 0], &[0, 1]])).unwrap(),
            Module::diagonal_lattice(p, &[1, 0])
        );
        let pre = Module::standard_lattice(p, 1)
            .preimage(&ints(&[&[1, 0]]))
            .unwrap();
        assert_eq!(
            pre,
            Module::new(p, 2, &ints(&[&[0, 1]]), &ints(&[&[1, 0]])).unwrap()
        );
        let k = o2.kernel_of(&ints(&[&[1, 1]])).unwrap();
        assert_eq!(k, Module::lattice_span(p, &ints(&[&[1, -1]])));
        // brute check: small integral vectors in the kernel are multiples
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                let v = [Rational::from_int(a), Rational::from_int(b)];
                assert_eq!(k.contains_vector(&v).unwrap(), a + b == 0);
            }
        }
    }

    #[test]
    fn down_up_examples() {
        let p = pr(3);
        let o2 = Module::standard_lattice(p, 2);
        assert_eq!(o2.down().rows(), 0);
        assert_eq!(o2.up(), Matrix::identity(2));
        let m = Module::new(p, 4, &ints(&[&[1, 0, 0, 0]]), &ints(&[&[0, 1, 0, 0]])).unwrap();
        assert_eq!(m.down(), ints(&[&[1, 0, 0, 0]]));
        assert_eq!(m.up(), ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]));
    }

    #[test]
    fn dual_examples() {
        let p = pr(3);
        let b1 = SymplecticForm::standard(1);
        let b2 = SymplecticForm::standard(2);
        let o4 = Module::standard_lattice(p, 4);
        assert_eq!(o4.dual(&b2).unwrap(), o4);
        assert!(o4.is_selfdual(&b2).unwrap());
        let r = Module::diagonal_lattice(p, &[-1, 0]);
        assert_eq!(r.dual(&b1).unwrap(), Module::diagonal_lattice(p, &[0, 1]));
        let line = Module::subspace(p, &ints(&[&[1, 0]]));
        assert_eq!(line.dual(&b1).unwrap(), line);
        let small = o4.scale(&Rational::from_int(3));
        assert!(small.is_isotropic(&b2).unwrap());
        assert!(!small.is_selfdual(&b2).unwrap());
    }

    #[test]
    fn symmetric_graph_is_selfdual() {
        let p = pr(5);
        // graph of kappa: (x, kappa x)
        let kappa = ints(&[&[2, 1], &[1, -3]]);
        let basis = Matrix::hstack(&[&Matrix::identity(2), &kappa.transpose()]).unwrap();
        let g = Module::subspace(p, &basis);
        assert!(g.is_selfdual(&SymplecticForm::standard(2)).unwrap());
    }

    #[test]
    fn almost_selfdual_examples() {
        let p = pr(3);
        let b1 = SymplecticForm::standard(1);
        assert!(Module::standard_lattice(p, 2)
            .is_almost_selfdual(&b1)
            .unwrap());
        assert!(Module::diagonal_lattice(p, &[-1, 0])
            .is_almost_selfdual(&b1)
            .unwrap());
        assert!(!Module::diagonal_lattice(p, &[-1, -1])
            .is_almost_selfdual(&b1)
            .unwrap());
    }

    #[test]
    fn approx_contains_examples() {
        let p = pr(3);
        let z = Module::zero(p, 2);
        assert!(z
            .approx_contains(&[Rational::from_int(27), Rational::zero()], 3)
            .unwrap());
        let r = Module::diagonal_lattice(p, &[1, 1]);
        let e1 = [Rational::one(), Rational::zero()];
        assert!(r.approx_contains(&e1, 0).unwrap());
        assert!(!r.approx_contains(&e1, 1).unwrap());
    }

    #[test]
    fn tensor_examples() {
        let p = pr(3);
        assert_eq!(
            Module::standard_lattice(p, 2).tensor_with_standard_lattice(3),
            Module::standard_lattice(p, 6)
        );
        let line = Module::subspace(p, &ints(&[&[1, 0]]));
        let t = line.tensor_with_standard_lattice(2);
        assert_eq!(t.free().rows(), 2);
        assert!(t.is_subspace());
    }

    #[test]
    fn json_round_trip() {
        let p = pr(3);
        let m = Module::new(
            p,
            2,
            &ints(&[&[1, 2]]),
            &Matrix::from_rows(vec![vec![q(0, 1), q(1, 3)]], 2).unwrap(),
        )
        .unwrap();
        let s = serde_json::to_string(&ModuleJson::from(&m)).unwrap();
        let back: ModuleJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.into_module(p).unwrap(), m);
    }
}
