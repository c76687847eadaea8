//! Linear relations `P: V ⇒ W`, i.e. submodules of `V ⊕ W`.

use serde::{Deserialize, Serialize};

use crate::arith::{Matrix, Prime, Rational};
use crate::error::{dim_err, Result};
use crate::module::{Module, ModuleJson, SymplecticForm};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    src: usize,
    dst: usize,
    body: Module,
}

impl Relation {
    /// `body` lives in `Q^src ⊕ Q^dst`, source coordinates first.
    pub fn new(src: usize, dst: usize, body: Module) -> Result<Self> {
        if body.dim() != src + dst {
            return Err(dim_err(format!(
                "body of dimension {} for {src} ⇒ {dst}",
                body.dim()
            )));
        }
        Ok(Relation { src, dst, body })
    }

    pub fn src(&self) -> usize {
        self.src
    }

    pub fn dst(&self) -> usize {
        self.dst
    }

    pub fn body(&self) -> &Module {
        &self.body
    }

    pub fn prime(&self) -> Prime {
        self.body.prime()
    }

    /// Graph `{(v, Av)}` of `A: Q^cols → Q^rows`.
    pub fn graph(p: Prime, a: &Matrix) -> Self {
        let basis =
            Matrix::hstack(&[&Matrix::identity(a.cols()), &a.transpose()]).expect("same height");
        Relation {
            src: a.cols(),
            dst: a.rows(),
            body: Module::subspace(p, &basis),
        }
    }

    pub fn identity(p: Prime, n: usize) -> Self {
        Self::graph(p, &Matrix::identity(n))
    }

    /// A submodule `T ⊆ W` as the relation `0 ⇒ W`.
    pub fn from_point(t: &Module) -> Self {
        Relation {
            src: 0,
            dst: t.dim(),
            body: t.clone(),
        }
    }

    fn source_axis(&self) -> Module {
        let n = self.src + self.dst;
        let mut basis = Matrix::zeros(self.src, n);
        for i in 0..self.src {
            basis[(i, i)] = Rational::one();
        }
        Module::subspace(self.prime(), &basis)
    }

    fn target_axis(&self) -> Module {
        let n = self.src + self.dst;
        let mut basis = Matrix::zeros(self.dst, n);
        for i in 0..self.dst {
            basis[(i, self.src + i)] = Rational::one();
        }
        Module::subspace(self.prime(), &basis)
    }

    /// `{v : (v, 0) ∈ P}`.
    pub fn kernel(&self) -> Result<Module> {
        self.body
            .intersect(&self.source_axis())?
            .project(0, self.src)
    }

    /// `{w : (0, w) ∈ P}`.
    pub fn indef(&self) -> Result<Module> {
        self.body
            .intersect(&self.target_axis())?
            .project(self.src, self.src + self.dst)
    }

    pub fn dom(&self) -> Result<Module> {
        self.body.project(0, self.src)
    }

    pub fn im(&self) -> Result<Module> {
        self.body.project(self.src, self.src + self.dst)
    }

    /// The same body read as `W ⇒ V`.
    pub fn pseudo_inverse(&self) -> Self {
        let perm: Vec<usize> = (self.src..self.src + self.dst).chain(0..self.src).collect();
        let body = self
            .body
            .permute(&perm)
            .expect("permutation of full length");
        Relation {
            src: self.dst,
            dst: self.src,
            body,
        }
    }

    /// `self ∘ first`: apply `first: V ⇒ W`, then `self: W ⇒ Y`.
    ///
    /// Intersects `P ⊕ Q` with the diagonal `{(v, w, w, y)}` inside
    /// `V ⊕ W ⊕ W ⊕ Y` and projects to `(v, y)`.
    pub fn compose(&self, first: &Relation) -> Result<Relation> {
        if first.dst != self.src {
            return Err(dim_err(format!(
                "cannot compose {}⇒{} after {}⇒{}",
                self.src, self.dst, first.src, first.dst
            )));
        }
        let (v, w, y) = (first.src, first.dst, self.dst);
        let n = v + 2 * w + y;
        let mut h = Matrix::zeros(v + w + y, n);
        for i in 0..v {
            h[(i, i)] = Rational::one();
        }
        for i in 0..w {
            h[(v + i, v + i)] = Rational::one();
            h[(v + i, v + w + i)] = Rational::one();
        }
        for i in 0..y {
            h[(v + w + i, v + 2 * w + i)] = Rational::one();
        }
        let diag = Module::subspace(self.prime(), &h);
        let r = diag.intersect(&first.body.direct_sum(&self.body)?)?;
        let mut proj = Matrix::zeros(v + y, n);
        for i in 0..v {
            proj[(i, i)] = Rational::one();
        }
        for i in 0..y {
            proj[(v + i, v + 2 * w + i)] = Rational::one();
        }
        Relation::new(v, y, r.image(&proj)?)
    }

    /// `PT = {w : (v, w) ∈ P for some v ∈ T}`.
    pub fn apply_to_module(&self, t: &Module) -> Result<Module> {
        if t.dim() != self.src {
            return Err(dim_err(format!(
                "module of dimension {} for source {}",
                t.dim(),
                self.src
            )));
        }
        Ok(self.compose(&Relation::from_point(t))?.body)
    }

    /// Self-dual under `B_src ⊖ B_dst`; `strict` also demands compact
    /// kernel and indefiniteness.
    pub fn is_nazarov(
        &self,
        b_src: &SymplecticForm,
        b_dst: &SymplecticForm,
        strict: bool,
    ) -> Result<bool> {
        let form = SymplecticForm::ominus(b_src, b_dst);
        if !self.body.is_selfdual(&form)? {
            return Ok(false);
        }
        if strict {
            return Ok(self.kernel()?.is_compact() && self.indef()?.is_compact());
        }
        Ok(true)
    }

    /// If the body is the graph of an operator, returns its matrix.
    pub fn as_operator(&self) -> Option<Matrix> {
        if !self.body.is_subspace() || self.body.free().rows() != self.src {
            return None;
        }
        let f = self.body.free();
        // rref with pivots on the source block means rows are (e_i, A e_i).
        if f.rows() > 0 && f.submatrix(0, self.src, 0, self.src) != Matrix::identity(self.src) {
            return None;
        }
        Some(
            f.submatrix(0, self.src, self.src, self.src + self.dst)
                .transpose(),
        )
    }
}

/// Wire format: `{"src", "dst", "module"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationJson {
    pub src: usize,
    pub dst: usize,
    pub module: ModuleJson,
}

impl RelationJson {
    pub fn into_relation(self, p: Prime) -> Result<Relation> {
        Relation::new(self.src, self.dst, self.module.into_module(p)?)
    }
}

impl From<&Relation> for RelationJson {
    fn from(r: &Relation) -> Self {
        RelationJson {
            src: r.src,
            dst: r.dst,
            module: ModuleJson::from(&r.body),
        }
    }
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
    fn graph_examples() {
        let p = pr(3);
        let id = Relation::identity(p, 2);
        assert_eq!(id.body().free(), &ints(&[&[1, 0, 1, 0], &[0, 1, 0, 1]]));
        let zero = Relation::graph(p, &Matrix::zeros(2, 2));
        assert_eq!(
            zero.body(),
            &Module::subspace(p, &ints(&[&[1, 0, 0, 0], &[0, 1, 0, 0]]))
        );
        let two = Relation::graph(p, &ints(&[&[2]]));
        assert!(two
            .body()
            .contains_vector(&[Rational::one(), Rational::from_int(2)])
            .unwrap());
        assert!(two
            .body()
            .contains_vector(&[Rational::new(1, 3), Rational::new(2, 3)])
            .unwrap());
        assert_eq!(two.as_operator(), Some(ints(&[&[2]])));
    }

    #[test]
    fn invariants_of_lattice_relation() {
        let p = pr(5);
        let r = Relation::new(1, 1, Module::standard_lattice(p, 2)).unwrap();
        let o1 = Module::standard_lattice(p, 1);
        assert_eq!(r.kernel().unwrap(), o1);
        assert_eq!(r.indef().unwrap(), o1);
        assert_eq!(r.dom().unwrap(), o1);
        assert_eq!(r.im().unwrap(), o1);
        let a = ints(&[&[1, 1], &[2, 2]]);
        let g = Relation::graph(p, &a);
        assert_eq!(g.kernel().unwrap(), Module::subspace(p, &ints(&[&[1, -1]])));
        assert!(g.indef().unwrap().is_zero());
    }

    #[test]
    fn composition_examples() {
        let p = pr(3);
        let a = ints(&[&[1, 2], &[0, 1]]);
        let b = ints(&[&[0, 1], &[-1, 3]]);
        let ga = Relation::graph(p, &a);
        let gb = Relation::graph(p, &b);
        assert_eq!(
            gb.compose(&ga).unwrap(),
            Relation::graph(p, &b.mul(&a).unwrap())
        );
        assert_eq!(ga.compose(&Relation::identity(p, 2)).unwrap(), ga);
        let lat = Relation::new(1, 1, Module::standard_lattice(p, 2)).unwrap();
        let scaled = Relation::graph(p, &ints(&[&[3]])).compose(&lat).unwrap();
        assert_eq!(scaled.body(), &Module::diagonal_lattice(p, &[0, 1]));
    }

    #[test]
    fn pseudo_inverse_examples() {
        let p = pr(7);
        let a = ints(&[&[2, 1], &[1, 1]]);
        let g = Relation::graph(p, &a);
        assert_eq!(g.pseudo_inverse(), Relation::graph(p, &a.invert().unwrap()));
        assert_eq!(g.pseudo_inverse().pseudo_inverse(), g);
    }

    #[test]
    fn apply_examples() {
        let p = pr(3);
        let a = ints(&[&[3, 0], &[1, 1]]);
        let t = Module::standard_lattice(p, 2);
        assert_eq!(
            Relation::graph(p, &a).apply_to_module(&t).unwrap(),
            t.image(&a).unwrap()
        );
        let l = Module::diagonal_lattice(p, &[-1]);
        let rel = Relation::new(1, 1, Module::zero(p, 1).direct_sum(&l).unwrap()).unwrap();
        assert_eq!(rel.apply_to_module(&Module::zero(p, 1)).unwrap(), l);
    }

    #[test]
    fn nazarov_examples() {
        let p = pr(3);
        let b = SymplecticForm::standard(1);
        let s = ints(&[&[1, 2], &[1, 3]]);
        assert!(Relation::graph(p, &s).is_nazarov(&b, &b, true).unwrap());
        let lat = Relation::new(2, 2, Module::standard_lattice(p, 4)).unwrap();
        assert!(lat.is_nazarov(&b, &b, true).unwrap());
        assert!(!Relation::graph(p, &ints(&[&[2, 0], &[0, 1]]))
            .is_nazarov(&b, &b, false)
            .unwrap());
    }
}
