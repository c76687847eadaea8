//! Characteristic functions `χ_g(Q, T): V ⇒ V`.
//!
//! Coordinates: `V = (u⁺, u⁻)`; `H ⊗ ℓ_m = (x⁺, x⁻)` with `h_i ⊗ e_s` at
//! `i*m + s` inside each half; the doubled space `W = (u⁺, x⁺, u⁻, x⁻)` on
//! which `diag(g, g^{-T})` acts directly.

use serde::Serialize;

use crate::arith::{Matrix, Prime, Rational};
use crate::coset::{BlockElement, SpBlockElement};
use crate::error::{dim_err, Error, Result};
use crate::module::{Module, SymplecticForm};
use crate::relation::Relation;

/// Index maps of `V` and `H ⊗ ℓ_m` into the doubled space `W`.
#[derive(Debug, Clone, Copy)]
struct Layout {
    alpha: usize,
    km: usize,
}

impl Layout {
    fn w_dim(self) -> usize {
        2 * (self.alpha + self.km)
    }

    fn v_index(self, i: usize) -> usize {
        if i < self.alpha {
            i
        } else {
            self.alpha + self.km + (i - self.alpha)
        }
    }

    fn x_index(self, j: usize) -> usize {
        if j < self.km {
            self.alpha + j
        } else {
            2 * self.alpha + self.km + (j - self.km)
        }
    }

    /// Splits `w ∈ W` into `(u, x)`.
    fn split(self, w: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let u = (0..2 * self.alpha)
            .map(|i| w[self.v_index(i)].clone())
            .collect();
        let x = (0..2 * self.km)
            .map(|j| w[self.x_index(j)].clone())
            .collect();
        (u, x)
    }
}

fn check_inputs(k: usize, q: &Module, t: &Module) -> Result<()> {
    if q.dim() != 2 * k || t.dim() != 2 * k {
        return Err(dim_err(format!(
            "Q and T must live in dimension {}, got {} and {}",
            2 * k,
            q.dim(),
            t.dim()
        )));
    }
    if q.prime() != t.prime() {
        return Err(Error::Input("Q and T over different primes".into()));
    }
    Ok(())
}

fn require_almost_selfdual(k: usize, q: &Module, t: &Module) -> Result<()> {
    let form = SymplecticForm::standard(k);
    for (name, m) in [("Q", q), ("T", t)] {
        if !m.is_almost_selfdual(&form)? {
            return Err(Error::Input(format!("{name} is not almost self-dual")));
        }
    }
    Ok(())
}

/// `diag(g, g^{-T})` in the doubled layout.
pub fn doubled_operator(g: &BlockElement) -> Matrix {
    SpBlockElement::from_block(g).matrix().clone()
}

/// `Λ_Q = {(u, (u, x)) : x ∈ Q ⊗ O^m}` as a relation `V ⇒ W`.
fn lambda_relation(lay: Layout, qm: &Module) -> Result<Relation> {
    let p = qm.prime();
    let v = 2 * lay.alpha;
    let w = lay.w_dim();
    let n = v + w;
    let mut free = Matrix::zeros(0, n);
    for i in 0..v {
        let mut row = vec![Rational::zero(); n];
        row[i] = Rational::one();
        row[v + lay.v_index(i)] = Rational::one();
        free.push_row(&row);
    }
    let place = |g: &Matrix| {
        let mut out = Matrix::zeros(0, n);
        for r in 0..g.rows() {
            let mut row = vec![Rational::zero(); n];
            for (j, x) in g.row(r).iter().enumerate() {
                row[v + lay.x_index(j)] = x.clone();
            }
            out.push_row(&row);
        }
        out
    };
    let free = Matrix::vstack(&[&free, &place(qm.free())])?;
    let int = place(qm.int());
    Relation::new(v, w, Module::new(p, n, &free, &int)?)
}

/// Composite of `Λ_Q`, the graph of `op` and the pseudo-inverse of `Λ_T`.
fn chi_by_composition(lay: Layout, op: &Matrix, qm: &Module, tm: &Module) -> Result<Relation> {
    let p = qm.prime();
    let lq = lambda_relation(lay, qm)?;
    let lt = lambda_relation(lay, tm)?;
    let inner = Relation::graph(p, op).compose(&lq)?;
    lt.pseudo_inverse().compose(&inner)
}

/// `ξ = {((x, y), (u, v)) : (v, y) = op (u, x)}` as a relation
/// `(H⊗ℓ_m) ⊕ (H⊗ℓ_m) ⇒ V ⊕ V`.
fn xi_from_operator(lay: Layout, op: &Matrix, p: Prime) -> Result<Relation> {
    let w = lay.w_dim();
    let (hv, vv) = (2 * lay.km, 2 * lay.alpha);
    let n = 2 * hv + 2 * vv;
    let mut free = Matrix::zeros(0, n);
    for e in 0..w {
        let mut basis = vec![Rational::zero(); w];
        basis[e] = Rational::one();
        let (u, x) = lay.split(&basis);
        let image = op.mul_vec(&basis)?;
        let (v, y) = lay.split(&image);
        let row: Vec<Rational> = x.into_iter().chain(y).chain(u).chain(v).collect();
        free.push_row(&row);
    }
    Relation::new(2 * hv, 2 * vv, Module::subspace(p, &free))
}

/// The relation `ξ` of a block element.
pub fn xi_relation(g: &BlockElement, p: Prime) -> Result<Relation> {
    let lay = Layout {
        alpha: g.alpha(),
        km: g.k() * g.m(),
    };
    xi_from_operator(lay, &doubled_operator(g), p)
}

fn chi_from_operator(
    lay: Layout,
    op: &Matrix,
    q: &Module,
    t: &Module,
    m: usize,
) -> Result<Relation> {
    let p = q.prime();
    let qm = q.tensor_with_standard_lattice(m);
    let tm = t.tensor_with_standard_lattice(m);
    let composed = chi_by_composition(lay, op, &qm, &tm)?;
    let eta = qm.direct_sum(&tm)?;
    let direct = Relation::new(
        2 * lay.alpha,
        2 * lay.alpha,
        xi_from_operator(lay, op, p)?.apply_to_module(&eta)?,
    )?;
    if composed != direct {
        return Err(Error::Consistency(format!(
            "composite and direct constructions of chi disagree: {:?} vs {:?}",
            composed.body(),
            direct.body()
        )));
    }
    Ok(composed)
}

/// `χ_g(Q, T)`; `Q` and `T` must be almost self-dual.
pub fn chi(g: &BlockElement, q: &Module, t: &Module) -> Result<Relation> {
    check_inputs(g.k(), q, t)?;
    require_almost_selfdual(g.k(), q, t)?;
    chi_unchecked(g, q, t)
}

/// `χ_g(Q, T)` for arbitrary modules `Q`, `T`.
pub fn chi_unchecked(g: &BlockElement, q: &Module, t: &Module) -> Result<Relation> {
    check_inputs(g.k(), q, t)?;
    let lay = Layout {
        alpha: g.alpha(),
        km: g.k() * g.m(),
    };
    chi_from_operator(lay, &doubled_operator(g), q, t, g.m())
}

/// `χ` for a symplectic element of the doubled space.
pub fn chi_sp(gs: &SpBlockElement, q: &Module, t: &Module) -> Result<Relation> {
    check_inputs(gs.k(), q, t)?;
    require_almost_selfdual(gs.k(), q, t)?;
    let lay = Layout {
        alpha: gs.alpha(),
        km: gs.k() * gs.m(),
    };
    chi_from_operator(lay, gs.matrix(), q, t, gs.m())
}

/// `Λ(g) ⊂ V ⊕ V`: solutions with `x = y = 0`.
pub fn lambda_subspace(g: &BlockElement, p: Prime) -> Result<Module> {
    let al = g.alpha();
    let km = g.k() * g.m();
    let (a, b, c) = (g.a(), g.b_all(), g.c_all());
    let id = Matrix::identity(al);
    // unknowns (u⁺, u⁻, v⁺, v⁻)
    let mut sys = Matrix::zeros(2 * al + 2 * km, 4 * al);
    // v⁺ - a u⁺ = 0
    sys.set_block(0, 0, &a.neg());
    sys.set_block(0, 2 * al, &id);
    // c u⁺ = 0
    sys.set_block(al, 0, &c);
    // u⁻ - aᵀ v⁻ = 0
    sys.set_block(al + km, al, &id);
    sys.set_block(al + km, 3 * al, &a.transpose().neg());
    // bᵀ v⁻ = 0
    sys.set_block(2 * al + km, 3 * al, &b.transpose());
    Ok(Module::subspace(p, &sys.nullspace()))
}

/// Outcome of the `Λ(g)` sandwich comparison.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub down_contains_lambda: bool,
    pub up_inside_lambda_perp: bool,
    /// Only evaluated when `Q` and `T` are lattices.
    pub down_equals_lambda: Option<bool>,
    pub up_equals_lambda_perp: Option<bool>,
}

impl SandwichReport {
    pub fn pass(&self) -> bool {
        self.down_contains_lambda
            && self.up_inside_lambda_perp
            && self.down_equals_lambda.unwrap_or(true)
            && self.up_equals_lambda_perp.unwrap_or(true)
    }
}

/// `χ_↓ ⊇ Λ(g)` and `χ^↑ ⊆ Λ(g)^⊥` (orthocomplement under `B_V ⊖ B_V`),
/// with equality when `Q` and `T` are lattices.
pub fn lambda_sandwich_check(g: &BlockElement, q: &Module, t: &Module) -> Result<SandwichReport> {
    let p = q.prime();
    let x = chi(g, q, t)?;
    let lam = lambda_subspace(g, p)?;
    let v = SymplecticForm::standard(g.alpha());
    let perp = lam.dual(&SymplecticForm::ominus(&v, &v))?;
    let down = x.body().down_module();
    let up = x.body().up_module();
    let lattices = q.is_lattice() && t.is_lattice();
    Ok(SandwichReport {
        down_contains_lambda: down.contains(&lam)?,
        up_inside_lambda_perp: perp.contains(&up)?,
        down_equals_lambda: lattices.then(|| down == lam),
        up_equals_lambda_perp: lattices.then(|| up == perp),
    })
}

/// `graph(κ)` for symmetric `κ`: `{(h⁺, κ h⁺)} ⊂ H`.
pub fn symmetric_graph(kappa: &Matrix, p: Prime) -> Result<Module> {
    if !kappa.is_symmetric() {
        return Err(Error::Input("boundary matrix must be symmetric".into()));
    }
    let basis = Matrix::hstack(&[&Matrix::identity(kappa.rows()), kappa])?;
    Ok(Module::subspace(p, &basis))
}

/// Value of `χ` on a pair of Lagrangian graphs.
#[derive(Debug, Clone)]
pub enum BoundaryValue {
    /// `χ` is the graph of this symplectic operator on `V`.
    Symplectic(Matrix),
    /// `χ` is a Lagrangian subspace that is not a graph.
    Relation(Relation),
}

/// The linear map `(u⁺, v⁻) ↦ (v⁺, u⁻)` obtained by eliminating `x⁺, y⁺`
/// when `x⁻ = τ x⁺` and `y⁻ = κ y⁺`.
fn boundary_map(g: &BlockElement, kappa: &Matrix, tau: &Matrix) -> Result<Matrix> {
    let k = g.k();
    if kappa.rows() != k || kappa.cols() != k || tau.rows() != k || tau.cols() != k {
        return Err(dim_err(format!("boundary matrices must be {k}x{k}")));
    }
    if !kappa.is_symmetric() || !tau.is_symmetric() {
        return Err(Error::Input("boundary matrices must be symmetric".into()));
    }
    let (al, m) = (g.alpha(), g.m());
    let km = k * m;
    let idm = Matrix::identity(m);
    let kt = kappa.kron(&idm);
    let tt = tau.kron(&idm);
    let (a, b, c, d) = (g.a(), g.b_all(), g.c_all(), g.d_all());
    let mut omega = Matrix::zeros(2 * km, 2 * km);
    omega.set_block(0, 0, &d.neg());
    omega.set_block(0, km, &Matrix::identity(km));
    omega.set_block(km, 0, &tt);
    omega.set_block(km, km, &d.transpose().mul(&kt)?.neg());
    let omega_inv = match omega.invert() {
        Ok(inv) => inv,
        Err(Error::Singular) => return Err(Error::SingularBoundary),
        Err(e) => return Err(e),
    };
    // right-hand side in terms of (u⁺, v⁻)
    let mut rhs = Matrix::zeros(2 * km, 2 * al);
    rhs.set_block(0, 0, &c);
    rhs.set_block(km, al, &b.transpose());
    let sol = omega_inv.mul(&rhs)?;
    let xs = sol.submatrix(0, km, 0, 2 * al);
    let ys = sol.submatrix(km, 2 * km, 0, 2 * al);
    let mut top = Matrix::zeros(al, 2 * al);
    top.set_block(0, 0, &a);
    let top = top.add(&b.mul(&xs)?)?;
    let mut bottom = Matrix::zeros(al, 2 * al);
    bottom.set_block(0, al, &a.transpose());
    let bottom = bottom.add(&c.transpose().mul(&kt)?.mul(&ys)?)?;
    Matrix::vstack(&[&top, &bottom])
}

/// `χ_g(graph τ, graph κ)` by elimination, cross-checked against the
/// module pipeline over `p`.
pub fn chi_boundary(
    g: &BlockElement,
    kappa: &Matrix,
    tau: &Matrix,
    p: Prime,
) -> Result<BoundaryValue> {
    let mm = boundary_map(g, kappa, tau)?;
    let al = g.alpha();
    let mut basis = Matrix::zeros(0, 4 * al);
    for j in 0..2 * al {
        let mut row = vec![Rational::zero(); 4 * al];
        // (u⁺, u⁻, v⁺, v⁻)
        if j < al {
            row[j] = Rational::one();
        } else {
            row[3 * al + (j - al)] = Rational::one();
        }
        for i in 0..al {
            row[2 * al + i] = mm[(i, j)].clone();
            row[al + i] = mm[(al + i, j)].clone();
        }
        basis.push_row(&row);
    }
    let body = Module::subspace(p, &basis);
    let v = SymplecticForm::standard(al);
    let ominus = SymplecticForm::ominus(&v, &v);
    if !body.is_selfdual(&ominus)? {
        return Err(Error::Consistency(
            "boundary value is not Lagrangian".into(),
        ));
    }
    let rel = Relation::new(2 * al, 2 * al, body)?;
    let q = symmetric_graph(tau, p)?;
    let t = symmetric_graph(kappa, p)?;
    let pipeline = chi(g, &q, &t)?;
    if pipeline != rel {
        return Err(Error::Consistency(format!(
            "boundary elimination {:?} disagrees with module pipeline {:?}",
            rel.body(),
            pipeline.body()
        )));
    }
    match rel.as_operator() {
        Some(s) => {
            if !v.preserved_by(&s)? {
                return Err(Error::Consistency(
                    "boundary operator is not symplectic".into(),
                ));
            }
            Ok(BoundaryValue::Symplectic(s))
        }
        None => Ok(BoundaryValue::Relation(rel)),
    }
}

/// The matrix `Z` with `(v⁺, u⁻) = Z (v⁻, u⁺)`; always symmetric.
pub fn z_matrix(g: &BlockElement, kappa: &Matrix, tau: &Matrix) -> Result<Matrix> {
    let mm = boundary_map(g, kappa, tau)?;
    let al = g.alpha();
    // mm acts on (u⁺, v⁻); Z acts on (v⁻, u⁺).
    let mut z = Matrix::zeros(2 * al, 2 * al);
    z.set_block(0, 0, &mm.submatrix(0, 2 * al, al, 2 * al));
    z.set_block(0, al, &mm.submatrix(0, 2 * al, 0, al));
    if !z.is_symmetric() {
        return Err(Error::Consistency("Z is not symmetric".into()));
    }
    Ok(z)
}

/// `M(λ) = diag(λ·1, λ^{-1}·1)` on `Q^{2n}`.
pub fn m_lambda(lambda: &Rational, n: usize) -> Result<Matrix> {
    let inv = lambda
        .recip()
        .ok_or_else(|| Error::Input("M(λ) needs λ ≠ 0".into()))?;
    let mut d = vec![lambda.clone(); n];
    d.extend(std::iter::repeat_n(inv, n));
    Ok(Matrix::diagonal(&d))
}

/// `graph(A) ∘ P ∘ graph(A^{-1})`.
pub fn conjugate(rel: &Relation, a: &Matrix) -> Result<Relation> {
    let p = rel.prime();
    let inv = a.invert()?;
    Relation::graph(p, a).compose(&rel.compose(&Relation::graph(p, &inv))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn ints(rows: &[&[i64]]) -> Matrix {
        Matrix::from_ints(rows)
    }

    #[test]
    fn identity_gives_identity_graph() {
        let p = pr(3);
        let g = BlockElement::identity(1, 1, 1);
        let o2 = Module::standard_lattice(p, 2);
        assert_eq!(chi(&g, &o2, &o2).unwrap(), Relation::identity(p, 2));
        let line = Module::subspace(p, &ints(&[&[1, 0]]));
        assert_eq!(chi(&g, &line, &o2).unwrap(), Relation::identity(p, 2));
    }

    #[test]
    fn worked_example() {
        let p = pr(3);
        let g = BlockElement::new(1, 1, 1, ints(&[&[1, 1], &[0, 1]])).unwrap();
        let o2 = Module::standard_lattice(p, 2);
        let x = chi(&g, &o2, &o2).unwrap();
        let expect = Module::new(
            p,
            4,
            &ints(&[&[1, 0, 1, 0]]),
            &ints(&[&[0, 1, 0, 1], &[0, 0, 1, 0]]),
        )
        .unwrap();
        assert_eq!(x.body(), &expect);
        // down/up
        assert_eq!(x.body().down(), ints(&[&[1, 0, 1, 0]]));
        let up = Module::subspace(p, &ints(&[&[1, 0, 0, 0], &[0, 1, 0, 1], &[0, 0, 1, 0]]));
        assert_eq!(x.body().up_module(), up);
        let lam = lambda_subspace(&g, p).unwrap();
        assert_eq!(lam, Module::subspace(p, &ints(&[&[1, 0, 1, 0]])));
        assert!(lambda_sandwich_check(&g, &o2, &o2).unwrap().pass());
    }

    #[test]
    fn lambda_of_identity() {
        let p = pr(5);
        let lam = lambda_subspace(&BlockElement::identity(1, 1, 1), p).unwrap();
        assert_eq!(
            lam,
            Module::subspace(p, &ints(&[&[1, 0, 1, 0], &[0, 1, 0, 1]]))
        );
    }

    #[test]
    fn xi_indefiniteness_is_lambda() {
        let p = pr(3);
        let g = BlockElement::new(1, 1, 1, ints(&[&[1, 1], &[0, 1]])).unwrap();
        let xi = xi_relation(&g, p).unwrap();
        assert_eq!(xi.body().free().rows(), 4);
        assert_eq!(xi.indef().unwrap(), lambda_subspace(&g, p).unwrap());
    }

    #[test]
    fn boundary_identity() {
        let g = BlockElement::identity(1, 1, 1);
        match chi_boundary(&g, &ints(&[&[2]]), &ints(&[&[1]]), pr(3)).unwrap() {
            BoundaryValue::Symplectic(s) => assert!(s.is_identity()),
            BoundaryValue::Relation(r) => panic!("expected a graph, got {r:?}"),
        }
    }

    #[test]
    fn boundary_small_instance_and_singular() {
        let g = BlockElement::new(1, 1, 1, ints(&[&[2, 1], &[1, 1]])).unwrap();
        let kappa = ints(&[&[1]]);
        let tau = ints(&[&[3]]);
        assert!(chi_boundary(&g, &kappa, &tau, pr(5)).is_ok());
        let z = z_matrix(&g, &kappa, &tau).unwrap();
        assert!(z.is_symmetric());
        // tau = dᵀ kappa d makes the elimination system singular
        let d = g.d_all();
        let tau_sing = d.transpose().mul(&kappa).unwrap().mul(&d).unwrap();
        assert_eq!(
            chi_boundary(&g, &kappa, &tau_sing, pr(5)).unwrap_err(),
            Error::SingularBoundary
        );
    }

    #[test]
    fn z_for_trivial_corner() {
        // a = 1, b = c = 0
        let g = BlockElement::new(1, 1, 1, ints(&[&[1, 0], &[0, 2]])).unwrap();
        let z = z_matrix(&g, &ints(&[&[1]]), &ints(&[&[1]])).unwrap();
        assert_eq!(z, ints(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn m_lambda_basics() {
        let l = Rational::from_int(3);
        let m = m_lambda(&l, 2).unwrap();
        let mi = m_lambda(&l.recip().unwrap(), 2).unwrap();
        assert!(m.mul(&mi).unwrap().is_identity());
        assert!(m_lambda(&Rational::one(), 2).unwrap().is_identity());
        assert!(SymplecticForm::standard(2).preserved_by(&m).unwrap());
        assert!(m_lambda(&Rational::zero(), 1).is_err());
    }

    #[test]
    fn sp_variant_reproduces_block_case() {
        let p = pr(3);
        let g = BlockElement::new(1, 1, 1, ints(&[&[2, 1], &[1, 1]])).unwrap();
        let o2 = Module::standard_lattice(p, 2);
        let gs = SpBlockElement::from_block(&g);
        assert_eq!(chi_sp(&gs, &o2, &o2).unwrap(), chi(&g, &o2, &o2).unwrap());
        let j = crate::module::standard_j(2);
        let js = SpBlockElement::new(1, 1, 1, j).unwrap();
        let x = chi_sp(&js, &o2, &o2).unwrap();
        let v = SymplecticForm::standard(1);
        assert!(x.is_nazarov(&v, &v, false).unwrap());
    }
}
