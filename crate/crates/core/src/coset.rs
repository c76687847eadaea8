//! Block group elements of `GL(α + k·m)` and the ⋆-product of double cosets.
//!
//! Rows and columns are ordered `(α, slot_1[m], …, slot_k[m])`.

use serde::{Deserialize, Serialize};

use crate::arith::{Matrix, Prime, Rational};
use crate::error::{dim_err, Error, Result};
use crate::module::standard_j;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockElement {
    alpha: usize,
    k: usize,
    m: usize,
    matrix: Matrix,
}

impl BlockElement {
    pub fn new(alpha: usize, k: usize, m: usize, matrix: Matrix) -> Result<Self> {
        let n = alpha + k * m;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(dim_err(format!(
                "block element with alpha={alpha}, k={k}, m={m} needs a {n}x{n} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if matrix.det()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(BlockElement {
            alpha,
            k,
            m,
            matrix,
        })
    }

    pub fn identity(alpha: usize, k: usize, m: usize) -> Self {
        BlockElement {
            alpha,
            k,
            m,
            matrix: Matrix::identity(alpha + k * m),
        }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> usize {
        self.alpha + self.k * self.m
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    fn slot(&self, i: usize) -> (usize, usize) {
        let s = self.alpha + i * self.m;
        (s, s + self.m)
    }

    pub fn a(&self) -> Matrix {
        self.matrix.submatrix(0, self.alpha, 0, self.alpha)
    }

    /// `b_i`: top row, slot `i` (0-based).
    pub fn b(&self, i: usize) -> Matrix {
        let (c0, c1) = self.slot(i);
        self.matrix.submatrix(0, self.alpha, c0, c1)
    }

    pub fn c(&self, i: usize) -> Matrix {
        let (r0, r1) = self.slot(i);
        self.matrix.submatrix(r0, r1, 0, self.alpha)
    }

    pub fn d(&self, i: usize, j: usize) -> Matrix {
        let (r0, r1) = self.slot(i);
        let (c0, c1) = self.slot(j);
        self.matrix.submatrix(r0, r1, c0, c1)
    }

    /// All of `b_1..b_k` side by side (`α × km`).
    pub fn b_all(&self) -> Matrix {
        self.matrix
            .submatrix(0, self.alpha, self.alpha, self.size())
    }

    pub fn c_all(&self) -> Matrix {
        self.matrix
            .submatrix(self.alpha, self.size(), 0, self.alpha)
    }

    pub fn d_all(&self) -> Matrix {
        self.matrix
            .submatrix(self.alpha, self.size(), self.alpha, self.size())
    }

    /// Exact inverse; represents the involuted coset.
    pub fn involute(&self) -> BlockElement {
        let inv = self.matrix.invert().expect("block elements are invertible");
        BlockElement {
            alpha: self.alpha,
            k: self.k,
            m: self.m,
            matrix: inv,
        }
    }

    /// Extends every slot from `m` to `m_new` by an identity tail.
    pub fn pad(&self, m_new: usize) -> Result<BlockElement> {
        if m_new < self.m {
            return Err(Error::Input(format!(
                "cannot pad slot size {} down to {m_new}",
                self.m
            )));
        }
        let matrix = reslot(&self.matrix, self.alpha, self.k, self.m, m_new, 0);
        Ok(BlockElement {
            alpha: self.alpha,
            k: self.k,
            m: m_new,
            matrix,
        })
    }

    pub fn mul(&self, other: &BlockElement) -> Result<BlockElement> {
        self.check_shape(other)?;
        if self.m != other.m {
            return Err(dim_err("literal product needs equal slot sizes"));
        }
        Ok(BlockElement {
            alpha: self.alpha,
            k: self.k,
            m: self.m,
            matrix: self.matrix.mul(&other.matrix)?,
        })
    }

    fn check_shape(&self, other: &BlockElement) -> Result<()> {
        if self.alpha != other.alpha || self.k != other.k {
            return Err(dim_err(format!(
                "incompatible blocks: alpha {} vs {}, k {} vs {}",
                self.alpha, other.alpha, self.k, other.k
            )));
        }
        Ok(())
    }
}

/// Re-embeds a matrix with slot size `m` into slot size `m_new`, placing the
/// old slot coordinates at `offset..offset+m` and extending by the identity.
fn reslot(g: &Matrix, alpha: usize, k: usize, m: usize, m_new: usize, offset: usize) -> Matrix {
    let n_new = alpha + k * m_new;
    let index = |i: usize| {
        if i < alpha {
            i
        } else {
            let (slot, s) = ((i - alpha) / m, (i - alpha) % m);
            alpha + slot * m_new + offset + s
        }
    };
    let mut out = Matrix::identity(n_new);
    let n = alpha + k * m;
    let mapped: Vec<usize> = (0..n).map(index).collect();
    for &t in &mapped {
        out[(t, t)] = Rational::zero();
    }
    for i in 0..n {
        for j in 0..n {
            out[(mapped[i], mapped[j])] = g[(i, j)].clone();
        }
    }
    out
}

/// The ⋆-product: slot size `l + m`, `g`-side coordinates first in every slot.
pub fn coset_mul(g: &BlockElement, h: &BlockElement) -> Result<BlockElement> {
    g.check_shape(h)?;
    let (alpha, k, l, m) = (g.alpha, g.k, g.m, h.m);
    let first = reslot(&g.matrix, alpha, k, l, l + m, 0);
    let second = reslot(&h.matrix, alpha, k, m, l + m, l);
    Ok(BlockElement {
        alpha,
        k,
        m: l + m,
        matrix: first.mul(&second)?,
    })
}

/// `𝕀(u) = 1_α ⊕ u ⊕ … ⊕ u` for an orthogonal `u` over `Z_(p)`.
pub fn embed_orthogonal(u: &Matrix, alpha: usize, k: usize, p: Prime) -> Result<BlockElement> {
    if !u.is_square() {
        return Err(dim_err("orthogonal block must be square"));
    }
    if !u.transpose().mul(u)?.is_identity() {
        return Err(Error::Input("block is not orthogonal".into()));
    }
    for i in 0..u.rows() {
        if u.row(i).iter().any(|x| !x.is_p_integral(p)) {
            return Err(Error::Input("orthogonal block is not integral".into()));
        }
    }
    let m = u.rows();
    let mut parts: Vec<&Matrix> = Vec::with_capacity(k + 1);
    let id = Matrix::identity(alpha);
    parts.push(&id);
    for _ in 0..k {
        parts.push(u);
    }
    Ok(BlockElement {
        alpha,
        k,
        m,
        matrix: Matrix::block_diag(&parts),
    })
}

/// `𝕀(Θ_N)` at slot size `max(m, 2N)`: swaps the first `N` coordinates of
/// every slot with the next `N`.
pub fn theta(m: usize, n: usize, alpha: usize, k: usize) -> BlockElement {
    let size = m.max(2 * n);
    let mut u = Matrix::zeros(size, size);
    for i in 0..n {
        u[(i, n + i)] = Rational::one();
        u[(n + i, i)] = Rational::one();
    }
    for i in 2 * n..size {
        u[(i, i)] = Rational::one();
    }
    let id = Matrix::identity(alpha);
    let mut parts = vec![&id];
    for _ in 0..k {
        parts.push(&u);
    }
    BlockElement {
        alpha,
        k,
        m: size,
        matrix: Matrix::block_diag(&parts),
    }
}

/// `g · 𝕀(Θ_N) · h` with both factors padded to the common slot size.
pub fn theta_product(g: &BlockElement, h: &BlockElement, n: usize) -> Result<BlockElement> {
    g.check_shape(h)?;
    let size = g.m.max(h.m).max(2 * n);
    let t = theta(size, n, g.alpha, g.k);
    g.pad(size)?.mul(&t)?.mul(&h.pad(size)?)
}

/// Symplectic element of `Sp(2(α + k·m))` in the doubled layout
/// `(u⁺, x⁺, u⁻, x⁻)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpBlockElement {
    alpha: usize,
    k: usize,
    m: usize,
    matrix: Matrix,
}

impl SpBlockElement {
    pub fn new(alpha: usize, k: usize, m: usize, matrix: Matrix) -> Result<Self> {
        let n = alpha + k * m;
        if matrix.rows() != 2 * n || matrix.cols() != 2 * n {
            return Err(dim_err(format!(
                "symplectic element needs a {0}x{0} matrix",
                2 * n
            )));
        }
        let j = standard_j(n);
        if matrix.transpose().mul(&j)?.mul(&matrix)? != j {
            return Err(Error::Input("matrix is not symplectic".into()));
        }
        Ok(SpBlockElement {
            alpha,
            k,
            m,
            matrix,
        })
    }

    /// `diag(g, g^{-T})`.
    pub fn from_block(g: &BlockElement) -> Self {
        let inv_t = g.matrix.invert().expect("invertible").transpose();
        SpBlockElement {
            alpha: g.alpha,
            k: g.k,
            m: g.m,
            matrix: Matrix::block_diag(&[&g.matrix, &inv_t]),
        }
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    fn reslot(&self, m_new: usize, offset: usize) -> Matrix {
        let n = self.alpha + self.k * self.m;
        let n_new = self.alpha + self.k * m_new;
        let half = |i: usize| {
            let (base, j) = if i < n { (0, i) } else { (n_new, i - n) };
            let t = if j < self.alpha {
                j
            } else {
                let (slot, s) = ((j - self.alpha) / self.m, (j - self.alpha) % self.m);
                self.alpha + slot * m_new + offset + s
            };
            base + t
        };
        let mapped: Vec<usize> = (0..2 * n).map(half).collect();
        let mut out = Matrix::identity(2 * n_new);
        for &t in &mapped {
            out[(t, t)] = Rational::zero();
        }
        for i in 0..2 * n {
            for j in 0..2 * n {
                out[(mapped[i], mapped[j])] = self.matrix[(i, j)].clone();
            }
        }
        out
    }

    pub fn pad(&self, m_new: usize) -> Result<SpBlockElement> {
        if m_new < self.m {
            return Err(Error::Input(format!(
                "cannot pad slot size {} down to {m_new}",
                self.m
            )));
        }
        Ok(SpBlockElement {
            alpha: self.alpha,
            k: self.k,
            m: m_new,
            matrix: self.reslot(m_new, 0),
        })
    }

    pub fn involute(&self) -> SpBlockElement {
        let inv = self
            .matrix
            .invert()
            .expect("symplectic matrices are invertible");
        SpBlockElement {
            alpha: self.alpha,
            k: self.k,
            m: self.m,
            matrix: inv,
        }
    }
}

/// ⋆-product in the symplectic setting: both halves are re-slotted.
pub fn sp_coset_mul(g: &SpBlockElement, h: &SpBlockElement) -> Result<SpBlockElement> {
    if g.alpha != h.alpha || g.k != h.k {
        return Err(dim_err("incompatible symplectic blocks"));
    }
    let (l, m) = (g.m, h.m);
    let first = g.reslot(l + m, 0);
    let second = h.reslot(l + m, l);
    Ok(SpBlockElement {
        alpha: g.alpha,
        k: g.k,
        m: l + m,
        matrix: first.mul(&second)?,
    })
}

#[derive(Deserialize)]
struct BlockJson {
    alpha: usize,
    k: usize,
    m: usize,
    matrix: Matrix,
}

impl<'de> Deserialize<'de> for BlockElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BlockJson::deserialize(d)?;
        BlockElement::new(j.alpha, j.k, j.m, j.matrix).map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for SpBlockElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = BlockJson::deserialize(d)?;
        SpBlockElement::new(j.alpha, j.k, j.m, j.matrix).map_err(serde::de::Error::custom)
    }
}
