//! Dense matrices over `Q`.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::rational::Rational;
use crate::error::{dim_err, Error, Result};

pub type Vector = Vec<Rational>;

/// Row-major dense matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(n: usize, s: &Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = s.clone();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds from explicit rows; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: Vec<Vector>, cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let r = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(dim_err(format!(
                    "row of length {} in a {cols}-column matrix",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols,
            data,
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), cols, "ragged integer matrix");
                r.iter().map(|&x| Rational::from_int(x))
            })
            .collect();
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Rational] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn col(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn push_row(&mut self, row: &[Rational]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (a.min(b), a.max(b));
        let (left, right) = self.data.split_at_mut(hi * c);
        left[lo * c..lo * c + c].swap_with_slice(&mut right[..c]);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(dim_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += &prod;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(dim_err(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Matrix,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(dim_err("entrywise operation on different shapes"));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    /// Copy of rows `r0..r1`, columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            out.row_mut(i - r0).clone_from_slice(&self.row(i)[c0..c1]);
        }
        out
    }

    /// Selects the listed columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(i, j)] = self[(i, c)].clone();
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn hstack(parts: &[&Matrix]) -> Result<Matrix> {
        let rows = parts.first().map_or(0, |m| m.rows);
        if parts.iter().any(|m| m.rows != rows) {
            return Err(dim_err("hstack of matrices with different row counts"));
        }
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for m in parts {
            out.set_block(0, c0, m);
            c0 += m.cols;
        }
        Ok(out)
    }

    pub fn vstack(parts: &[&Matrix]) -> Result<Matrix> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(dim_err("vstack of matrices with different column counts"));
        }
        let mut data = Vec::new();
        let mut rows = 0;
        for m in parts {
            data.extend_from_slice(&m.data);
            rows += m.rows;
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn block_diag(parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for m in parts {
            out.set_block(r0, c0, m);
            r0 += m.rows;
            c0 += m.cols;
        }
        out
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * &other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form over `Q`, dropping zero rows; returns the
    /// pivot column of each surviving row.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m);
        let r = pivots.len();
        m.data.truncate(r * m.cols);
        m.rows = r;
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis (as rows) of `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Matrix {
        let (r, piv) = self.rref();
        nullspace_from_rref(&r, &piv)
    }

    pub fn invert(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(dim_err("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let mut aug = Matrix::hstack(&[self, &Matrix::identity(n)])?;
        let piv = rref_in_place(&mut aug);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(aug.submatrix(0, n, n, 2 * n))
    }

    /// One solution of `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Result<Option<Vector>> {
        if b.len() != self.rows {
            return Err(dim_err("right-hand side length differs from row count"));
        }
        let bcol = Matrix {
            rows: self.rows,
            cols: 1,
            data: b.to_vec(),
        };
        let mut aug = Matrix::hstack(&[self, &bcol])?;
        let piv = rref_in_place(&mut aug);
        let n = self.cols;
        if piv.last() == Some(&n) {
            return Ok(None);
        }
        let mut x = vec![Rational::zero(); n];
        for (i, &c) in piv.iter().enumerate() {
            x[c] = aug[(i, n)].clone();
        }
        Ok(Some(x))
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(dim_err("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            let inv = piv.recip().expect("nonzero pivot");
            for r in c + 1..n {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let t = &m[(r, c)] * &inv;
                axpy_rows(&mut m, r, c, &t, c);
            }
        }
        Ok(det)
    }
}

/// `row[dst] -= t * row[src]` over columns `from..`.
pub(crate) fn axpy_rows(m: &mut Matrix, dst: usize, src: usize, t: &Rational, from: usize) {
    let c = m.cols;
    for j in from..c {
        let s = &m.data[src * c + j];
        if s.is_zero() {
            continue;
        }
        let prod = t * s;
        m.data[dst * c + j] -= &prod;
    }
}

/// In-place Gauss-Jordan; zero rows end up at the bottom.
fn rref_in_place(m: &mut Matrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.cols {
        if r == m.rows {
            break;
        }
        let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        m.swap_rows(pr, r);
        let inv = m[(r, c)].recip().expect("nonzero pivot");
        if !inv.is_one() {
            for j in c..m.cols {
                if !m[(r, j)].is_zero() {
                    m[(r, j)] = &m[(r, j)] * &inv;
                }
            }
        }
        for i in 0..m.rows {
            if i != r && !m[(i, c)].is_zero() {
                let t = m[(i, c)].clone();
                axpy_rows(m, i, r, &t, c);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn nullspace_from_rref(r: &Matrix, piv: &[usize]) -> Matrix {
    let n = r.cols();
    let mut is_piv = vec![false; n];
    for &c in piv {
        is_piv[c] = true;
    }
    let mut out = Matrix::zeros(0, n);
    for j in (0..n).filter(|&j| !is_piv[j]) {
        let mut v = vec![Rational::zero(); n];
        v[j] = Rational::one();
        for (i, &c) in piv.iter().enumerate() {
            v[c] = -&r[(i, j)];
        }
        out.push_row(&v);
    }
    out
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            data: self.row_vecs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        if j.data.len() != j.rows {
            return Err(de::Error::custom(format!(
                "expected {} rows, found {}",
                j.rows,
                j.data.len()
            )));
        }
        Matrix::from_rows(j.data, j.cols).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    #[test]
    fn rref_examples() {
        assert_eq!(Matrix::identity(3).rref().0, Matrix::identity(3));
        let (r, piv) = m(&[&[2, 4], &[1, 2]]).rref();
        assert_eq!(r, m(&[&[1, 2]]));
        assert_eq!(piv, vec![0]);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).rref().0, Matrix::identity(2));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(Matrix::identity(2).invert().unwrap(), Matrix::identity(2));
        assert_eq!(
            m(&[&[1, 1], &[0, 1]]).invert().unwrap(),
            m(&[&[1, -1], &[0, 1]])
        );
        assert_eq!(m(&[&[1, 1], &[1, 1]]).invert(), Err(Error::Singular));
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1, 0], &[0, 1, 0], &[3, 0, 1]]);
        let inv = a.invert().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        assert_eq!(a.det().unwrap(), Rational::from_int(2));
    }

    #[test]
    fn solve_and_nullspace() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(
            a.solve(&[Rational::from_int(1), Rational::from_int(3)])
                .unwrap(),
            None
        );
        let x = a
            .solve(&[Rational::from_int(2), Rational::from_int(4)])
            .unwrap()
            .unwrap();
        assert_eq!(
            a.mul_vec(&x).unwrap(),
            vec![Rational::from_int(2), Rational::from_int(4)]
        );
        let ns = a.nullspace();
        assert_eq!(ns.rows(), 1);
        assert!(a.mul_vec(ns.row(0)).unwrap().iter().all(Rational::is_zero));
    }

    #[test]
    fn json_round_trip() {
        let a =
            Matrix::from_rows(vec![vec![Rational::new(-3, 7), Rational::from_int(2)]], 2).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[["-3/7","2"]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let lenient: Matrix =
            serde_json::from_str(r#"{"rows":1,"cols":2,"data":[[1,"1/2"]]}"#).unwrap();
        assert_eq!(lenient[(0, 1)], Rational::new(1, 2));
    }
}
