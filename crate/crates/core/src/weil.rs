//! Finite-level Heisenberg and Weil operators on functions over
//! `p^{-N}O/p^{N}O`, with the `SL(2)` generator factorization and the
//! `λ`/`θ` extension operators.
//!
//! Points of the one-dimensional model are indexed by `i ∈ [0, p^{2N})`,
//! standing for `i·p^{-N}`; each point carries mass `p^{-N}`. The
//! two-dimensional model indexes `(x, y)` as `ix·p^{2N} + iy`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{Matrix, Prime, Rational, Valuation};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest supported space dimension.
const MAX_SIZE: usize = 6561;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiniteModel {
    p: Prime,
    depth: u32,
    n: usize,
}

impl FiniteModel {
    pub fn new(p: Prime, depth: u32, n: usize) -> Result<Self> {
        if p.get() == 2 {
            return Err(Error::Input("the Weil model needs an odd prime".into()));
        }
        if depth == 0 || !(1..=2).contains(&n) {
            return Err(Error::Input(format!("unsupported model N={depth}, n={n}")));
        }
        let m = FiniteModel { p, depth, n };
        let side = (p.get() as u128).checked_pow(2 * depth);
        match side.and_then(|s| s.checked_pow(n as u32)) {
            Some(s) if s <= MAX_SIZE as u128 => Ok(m),
            _ => Err(Error::BoundExceeded(format!(
                "model p={}, N={depth}, n={n} exceeds {MAX_SIZE} points",
                p.get()
            ))),
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points in one coordinate, `p^{2N}`.
    pub fn side(&self) -> usize {
        (self.p.get() as usize).pow(2 * self.depth)
    }

    pub fn size(&self) -> usize {
        self.side().pow(self.n as u32)
    }

    /// The point `i·p^{-N}`.
    pub fn point(&self, i: usize) -> Rational {
        &Rational::from_int(i as i64) * &Rational::p_pow(self.p, -(self.depth as i64))
    }

    /// Index of `x mod p^N O`; requires `v_p(x) ≥ -N`.
    pub fn index_of(&self, x: &Rational) -> Result<usize> {
        self.check_window(x, -(self.depth as i64), "point")?;
        let scaled = x * &Rational::p_pow(self.p, self.depth as i64);
        let r = scaled.residue(2 * self.depth as i64, self.p);
        Ok(r.numer().to_usize().expect("residue below p^{2N}"))
    }

    /// The lattice `O/p^N O` inside the window, as a membership test on indices.
    pub fn is_integral_index(&self, i: usize) -> bool {
        i.is_multiple_of((self.p.get() as usize).pow(self.depth))
    }

    fn check_window(&self, x: &Rational, min: i64, what: &str) -> Result<()> {
        match x.valuation(self.p) {
            Valuation::Finite(v) if v < min => Err(Error::WindowViolation(format!(
                "{what} {x} has valuation {v} < {min}"
            ))),
            _ => Ok(()),
        }
    }

    fn require_line(&self) -> Result<()> {
        if self.n != 1 {
            return Err(Error::Input(
                "operator is defined on the one-dimensional model".into(),
            ));
        }
        Ok(())
    }
}

/// A linear map between the function spaces of two models.
#[derive(Debug, Clone)]
pub struct FiniteOperator {
    pub src: FiniteModel,
    pub dst: FiniteModel,
    pub matrix: CMatrix,
}

impl FiniteOperator {
    fn on(model: FiniteModel, matrix: CMatrix) -> Self {
        FiniteOperator {
            src: model,
            dst: model,
            matrix,
        }
    }

    pub fn identity(model: FiniteModel) -> Self {
        Self::on(model, CMatrix::identity(model.size(), model.size()))
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &FiniteOperator) -> Result<FiniteOperator> {
        if first.dst != self.src {
            return Err(Error::Input("operator models do not match".into()));
        }
        Ok(FiniteOperator {
            src: first.src,
            dst: self.dst,
            matrix: &self.matrix * &first.matrix,
        })
    }

    /// Adjoint for the `L²` inner products with the models' point masses.
    pub fn adjoint(&self) -> FiniteOperator {
        let p = self.src.p.get() as f64;
        let n = self.dst.n as f64 - self.src.n as f64;
        let ratio = p.powf(-(self.src.depth as f64) * n);
        FiniteOperator {
            src: self.dst,
            dst: self.src,
            matrix: self.matrix.adjoint() * Complex64::new(ratio, 0.0),
        }
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.matrix.nrows())
            .map(|i| {
                (0..self.matrix.ncols())
                    .map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im])
                    .collect()
            })
            .collect();
        json!({
            "p": self.src.p.get(),
            "N": self.src.depth,
            "rows": self.matrix.nrows(),
            "cols": self.matrix.ncols(),
            "matrix": rows,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HeisConvention {
    /// Phase `v⁺·x + ½v⁺v⁻`.
    AsWritten,
    /// Phase `v⁻·x + ½v⁺v⁻`.
    Corrected,
}

/// `f(x) ↦ λ f(x+v⁺) e(phase)`.
pub fn heis_op(
    model: FiniteModel,
    vp: &Rational,
    vm: &Rational,
    lambda: Complex64,
    conv: HeisConvention,
) -> Result<FiniteOperator> {
    model.require_line()?;
    let lo = -(model.depth as i64);
    model.check_window(vp, lo, "v+")?;
    model.check_window(vm, lo, "v-")?;
    let p = model.p;
    let central = &(vp * vm) * &Rational::new(1, 2);
    let slope = match conv {
        HeisConvention::AsWritten => vp,
        HeisConvention::Corrected => vm,
    };
    let shift = model.index_of(vp)?;
    let side = model.side();
    let mut m = CMatrix::zeros(side, side);
    for i in 0..side {
        let phase = &(slope * &model.point(i)) + &central;
        m[((i), (i + shift) % side)] = lambda * phase.char_value(p);
    }
    Ok(FiniteOperator::on(model, m))
}

/// `f(z) ↦ f(zA)` for a unit `A`.
pub fn weil_diag(model: FiniteModel, a: &Rational) -> Result<FiniteOperator> {
    model.require_line()?;
    if a.valuation(model.p) != Valuation::Finite(0) {
        return Err(Error::WindowViolation(format!(
            "diagonal entry {a} is not a unit"
        )));
    }
    let side = model.side();
    let mut m = CMatrix::zeros(side, side);
    for i in 0..side {
        m[(i, model.index_of(&(&model.point(i) * a))?)] = Complex64::new(1.0, 0.0);
    }
    Ok(FiniteOperator::on(model, m))
}

/// Multiplication by `e(Bz²/2)`; requires `v_p(B) ≥ 0`.
pub fn weil_upper(model: FiniteModel, b: &Rational) -> Result<FiniteOperator> {
    model.require_line()?;
    model.check_window(b, 0, "upper entry")?;
    let half = &Rational::new(1, 2) * b;
    let side = model.side();
    let mut m = CMatrix::zeros(side, side);
    for i in 0..side {
        let z = model.point(i);
        m[(i, i)] = (&half * &(&z * &z)).char_value(model.p);
    }
    Ok(FiniteOperator::on(model, m))
}

/// `f ↦ p^{-N} Σ_x f(x) e(xz)`.
pub fn weil_fourier(model: FiniteModel) -> Result<FiniteOperator> {
    model.require_line()?;
    let side = model.side();
    let w = (model.p.get() as f64).powi(-(model.depth as i32));
    let pts: Vec<Rational> = (0..side).map(|i| model.point(i)).collect();
    let m = CMatrix::from_fn(side, side, |z, x| {
        (&pts[x] * &pts[z]).char_value(model.p) * w
    });
    Ok(FiniteOperator::on(model, m))
}

/// Generators of `SL(2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sl2Token {
    /// `[[1, b], [0, 1]]`
    Upper(Rational),
    /// `[[a, 0], [0, 1/a]]`
    Diag(Rational),
    /// `[[0, 1], [-1, 0]]`
    Fourier,
}

impl Sl2Token {
    pub fn matrix(&self) -> Matrix {
        let (o, z) = (Rational::one(), Rational::zero());
        match self {
            Sl2Token::Upper(b) => {
                Matrix::from_rows(vec![vec![o.clone(), b.clone()], vec![z, o]], 2)
            }
            Sl2Token::Diag(a) => Matrix::from_rows(
                vec![
                    vec![a.clone(), z.clone()],
                    vec![z, a.recip().expect("unit")],
                ],
                2,
            ),
            Sl2Token::Fourier => {
                Matrix::from_rows(vec![vec![z.clone(), o.clone()], vec![-o, z]], 2)
            }
        }
        .expect("2x2")
    }

    pub fn operator(&self, model: FiniteModel) -> Result<FiniteOperator> {
        match self {
            Sl2Token::Upper(b) => weil_upper(model, b),
            Sl2Token::Diag(a) => weil_diag(model, a),
            Sl2Token::Fourier => weil_fourier(model),
        }
    }
}

pub fn tokens_product(tokens: &[Sl2Token]) -> Matrix {
    tokens.iter().fold(Matrix::identity(2), |acc, t| {
        acc.mul(&t.matrix()).expect("2x2")
    })
}

fn push_upper(out: &mut Vec<Sl2Token>, b: Rational) {
    if !b.is_zero() {
        out.push(Sl2Token::Upper(b));
    }
}

fn push_diag(out: &mut Vec<Sl2Token>, a: Rational) {
    if !a.is_one() {
        out.push(Sl2Token::Diag(a));
    }
}

/// Factors `g ∈ SL(2,Q)` into generators whose product is exactly `g`.
/// With `c = 0`: `D(a)·U(b/a)`. Otherwise `U(a/c)·D(-1/c)·J·U(d/c)`, except
/// that for `p | c` (so `a` is a unit when `g` is integral) the prefix
/// `D(-1)·J` is split off and `Jg` is factored instead, which keeps every
/// factor inside the operator windows.
pub fn sl2_factor(g: &Matrix, p: Prime) -> Result<Vec<Sl2Token>> {
    if g.rows() != 2 || g.cols() != 2 || !g.det()?.is_one() {
        return Err(Error::Input(
            "sl2_factor needs a 2x2 matrix of determinant 1".into(),
        ));
    }
    let (a, b, c, d) = (&g[(0, 0)], &g[(0, 1)], &g[(1, 0)], &g[(1, 1)]);
    let mut out = Vec::new();
    if c.is_zero() {
        push_diag(&mut out, a.clone());
        push_upper(&mut out, b * &a.recip().expect("det 1"));
    } else if matches!(c.valuation(p), Valuation::Finite(v) if v > 0)
        && a.valuation(p) == Valuation::Finite(0)
    {
        push_diag(&mut out, -Rational::one());
        out.push(Sl2Token::Fourier);
        let jg = Sl2Token::Fourier.matrix().mul(g)?;
        out.extend(sl2_factor(&jg, p)?);
    } else {
        let ci = c.recip().expect("nonzero");
        push_upper(&mut out, a * &ci);
        push_diag(&mut out, -ci.clone());
        out.push(Sl2Token::Fourier);
        push_upper(&mut out, d * &ci);
    }
    if tokens_product(&out) != *g {
        return Err(Error::Consistency(
            "generator product does not reproduce the input".into(),
        ));
    }
    Ok(out)
}

/// `We(g)`: the product of generator operators along [`sl2_factor`].
pub fn weil_of(model: FiniteModel, g: &Matrix) -> Result<FiniteOperator> {
    model.require_line()?;
    let mut acc = FiniteOperator::identity(model);
    for t in sl2_factor(g, model.p)? {
        acc = acc.compose(&t.operator(model)?)?;
    }
    Ok(acc)
}

/// The matrix acting on Heisenberg parameters `(v⁺, v⁻)` under conjugation
/// by `We(g)`: `We(g) Ψ(v) We(g)^{-1} = Ψ(g^{-T} v)`.
pub fn covariance_matrix(g: &Matrix) -> Result<Matrix> {
    Ok(g.invert()?.transpose())
}

/// `λ: f(x) ↦ f(x)·I(y)` from the one- to the two-dimensional model.
pub fn lambda_op(src: FiniteModel, dst: FiniteModel) -> Result<FiniteOperator> {
    if src.p != dst.p || src.depth != dst.depth || src.n + 1 != dst.n {
        return Err(Error::Input(
            "λ needs the target model to add one coordinate".into(),
        ));
    }
    let side = src.side();
    let mut m = CMatrix::zeros(dst.size(), src.size());
    for x in 0..src.size() {
        for y in (0..side).filter(|&y| src.is_integral_index(y)) {
            m[(x * side + y, x)] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(FiniteOperator {
        src,
        dst,
        matrix: m,
    })
}

/// `θ = λλ*` on the two-dimensional model.
pub fn theta_op(model: FiniteModel) -> Result<FiniteOperator> {
    let src = FiniteModel::new(model.p, model.depth, model.n - 1)?;
    let l = lambda_op(src, model)?;
    l.compose(&l.adjoint())
}

/// Frobenius norm of `a - b`.
pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

/// `‖U*U - I‖` for the matrix inner product (uniform point mass).
pub fn unitarity_residual(op: &FiniteOperator) -> f64 {
    let n = op.matrix.ncols();
    distance(
        &(op.matrix.adjoint() * &op.matrix),
        &CMatrix::identity(n, n),
    )
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// The scalar `s` with `a ≈ s·b` (median of entrywise ratios over the
/// support of `b`) and the residual `‖a - s·b‖`.
pub fn projective_scalar(a: &CMatrix, b: &CMatrix) -> (Complex64, f64) {
    let ratios: Vec<Complex64> = a
        .iter()
        .zip(b.iter())
        .filter(|(_, y)| y.norm() > 1e-9)
        .map(|(x, y)| x / y)
        .collect();
    let s = Complex64::new(
        median(ratios.iter().map(|z| z.re).collect()),
        median(ratios.iter().map(|z| z.im).collect()),
    );
    (s, distance(a, &(b * s)))
}

/// `‖ΨvΨwΨv⁻¹Ψw⁻¹ - e(v⁺w⁻ - v⁻w⁺)·I‖`, with the inverse computed as the adjoint.
pub fn commutator_residual(
    model: FiniteModel,
    v: (&Rational, &Rational),
    w: (&Rational, &Rational),
    conv: HeisConvention,
) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let pv = heis_op(model, v.0, v.1, one, conv)?.matrix;
    let pw = heis_op(model, w.0, w.1, one, conv)?.matrix;
    let c = &pv * &pw * pv.adjoint() * pw.adjoint();
    let phase = (&(v.0 * w.1) - &(v.1 * w.0)).char_value(model.p);
    let n = model.size();
    Ok(distance(&c, &(CMatrix::identity(n, n) * phase)))
}

/// Compares `Ψ(g^{-T}v)·We(g)` with `We(g)·Ψ(v)`; returns the scalar and residual.
pub fn covariance_residual(
    model: FiniteModel,
    g: &Matrix,
    v: (&Rational, &Rational),
) -> Result<(Complex64, f64)> {
    let one = Complex64::new(1.0, 0.0);
    let w = weil_of(model, g)?.matrix;
    let moved = covariance_matrix(g)?.mul_vec(&[v.0.clone(), v.1.clone()])?;
    let lhs = heis_op(model, &moved[0], &moved[1], one, HeisConvention::Corrected)?.matrix * &w;
    let rhs = &w * heis_op(model, v.0, v.1, one, HeisConvention::Corrected)?.matrix;
    Ok(projective_scalar(&lhs, &rhs))
}

/// `f(z) ↦ f(-z)`.
pub fn parity(model: FiniteModel) -> Result<FiniteOperator> {
    weil_diag(model, &-Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(p: u64, n: u32) -> FiniteModel {
        FiniteModel::new(Prime::new(p).unwrap(), n, 1).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn rejects_two() {
        assert!(FiniteModel::new(Prime::new(2).unwrap(), 1, 1).is_err());
    }

    #[test]
    fn trivial_generators() {
        let m = model(3, 1);
        let id = FiniteOperator::identity(m).matrix;
        assert!(distance(&weil_diag(m, &Rational::one()).unwrap().matrix, &id) < 1e-12);
        assert!(distance(&weil_upper(m, &Rational::zero()).unwrap().matrix, &id) < 1e-12);
        let h = heis_op(
            m,
            &Rational::zero(),
            &Rational::zero(),
            Complex64::new(0.0, 1.0),
            HeisConvention::Corrected,
        );
        assert!(distance(&h.unwrap().matrix, &(id * Complex64::new(0.0, 1.0))) < 1e-12);
    }

    #[test]
    fn fourier_squares_to_parity() {
        let m = model(3, 1);
        let f = weil_fourier(m).unwrap().matrix;
        let (s, r) = projective_scalar(&(&f * &f), &parity(m).unwrap().matrix);
        assert!(r < 1e-10 && (s.norm() - 1.0).abs() < 1e-10);
        assert!(unitarity_residual(&weil_fourier(m).unwrap()) < 1e-10);
    }

    #[test]
    fn windows_enforced() {
        let m = model(3, 1);
        assert!(matches!(
            weil_upper(m, &q(1, 3)),
            Err(Error::WindowViolation(_))
        ));
        assert!(matches!(
            weil_diag(m, &q(3, 1)),
            Err(Error::WindowViolation(_))
        ));
        assert!(matches!(
            heis_op(
                m,
                &q(1, 9),
                &Rational::zero(),
                Complex64::new(1.0, 0.0),
                HeisConvention::Corrected
            ),
            Err(Error::WindowViolation(_))
        ));
    }

    #[test]
    fn commutator_selects_convention() {
        let m = model(3, 1);
        let (v, w) = ((q(1, 3), q(1, 1)), (q(0, 1), q(1, 3)));
        let corrected =
            commutator_residual(m, (&v.0, &v.1), (&w.0, &w.1), HeisConvention::Corrected).unwrap();
        assert!(corrected < 1e-10);
        let written =
            commutator_residual(m, (&v.0, &v.1), (&w.0, &w.1), HeisConvention::AsWritten).unwrap();
        assert!(written > 1e-3);
    }

    #[test]
    fn factorizations_multiply_back() {
        let p = Prime::new(3).unwrap();
        for g in [
            Matrix::identity(2),
            Sl2Token::Fourier.matrix(),
            Matrix::from_ints(&[&[2, 1], &[1, 1]]),
            Matrix::from_ints(&[&[1, 0], &[3, 1]]),
            Matrix::from_ints(&[&[2, 3], &[3, 5]]),
        ] {
            let t = sl2_factor(&g, p).unwrap();
            assert_eq!(tokens_product(&t), g);
        }
        assert!(sl2_factor(&Matrix::identity(2), p).unwrap().is_empty());
        assert_eq!(
            sl2_factor(&Sl2Token::Fourier.matrix(), p).unwrap(),
            vec![Sl2Token::Fourier]
        );
    }

    #[test]
    fn covariance_on_integral_element() {
        let m = model(3, 1);
        let g = Matrix::from_ints(&[&[2, 1], &[1, 1]]);
        let (s, r) = covariance_residual(m, &g, (&q(1, 3), &q(2, 3))).unwrap();
        assert!(r < 1e-9 && (s.norm() - 1.0).abs() < 1e-9, "{s} {r}");
    }

    #[test]
    fn lambda_theta() {
        let p = Prime::new(3).unwrap();
        let src = FiniteModel::new(p, 1, 1).unwrap();
        let dst = FiniteModel::new(p, 1, 2).unwrap();
        let l = lambda_op(src, dst).unwrap();
        let ll = l.adjoint().compose(&l).unwrap().matrix;
        assert!(distance(&ll, &CMatrix::identity(9, 9)) < 1e-12);
        let t = theta_op(dst).unwrap().matrix;
        assert!(distance(&(&t * &t), &t) < 1e-12);
        assert!(distance(&t.adjoint(), &t) < 1e-12);
        assert!(distance(&(&t * &l.matrix), &l.matrix) < 1e-12);
    }
}
