//! Vertices and arrows of the building graphs, local neighbor enumeration,
//! the graph-morphism property of `χ`, and the `↗`-continuity harness.

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{Matrix, Prime, Rational, Valuation};
use crate::charfn::chi;
use crate::coset::BlockElement;
use crate::error::{Error, Result};
use crate::module::{Module, ModuleJson, SymplecticForm};
use crate::relation::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Selfdual,
    AlmostSelfdual,
    Neither,
}

pub fn classify(r: &Module, form: &SymplecticForm) -> Result<Classification> {
    if !r.dim().is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "odd ambient dimension {}",
            r.dim()
        )));
    }
    Ok(if r.is_selfdual(form)? {
        Classification::Selfdual
    } else if r.is_almost_selfdual(form)? {
        Classification::AlmostSelfdual
    } else {
        Classification::Neither
    })
}

/// Whether there is an arrow `r → r2`, i.e. `r2 ⊆ r`. An arrow forces
/// `r_↓ = r2_↓` and `r^↑ = r2^↑`; a violation is reported as an error.
pub fn has_arrow(r: &Module, r2: &Module) -> Result<bool> {
    if r.dim() != r2.dim() {
        return Err(Error::Dimension(format!(
            "ambient {} vs {}",
            r.dim(),
            r2.dim()
        )));
    }
    if !r.contains(r2)? {
        return Ok(false);
    }
    if r.down_module() != r2.down_module() || r.up_module() != r2.up_module() {
        return Err(Error::Consistency(
            "arrow between modules with different R_↓ or R^↑".into(),
        ));
    }
    Ok(true)
}

/// All subspaces of `F_p^d`, each as an rref basis with entries in `[0, p)`.
pub fn subspaces_mod_p(d: usize, p: u64) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << d) {
        let pivots: Vec<usize> = (0..d).filter(|&j| mask & (1 << j) != 0).collect();
        // Free slots: (row, col) with col after the row's pivot and not a pivot.
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &pc)| {
                (pc + 1..d)
                    .filter(|c| !pivots.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let count = p.pow(slots.len() as u32);
        for code in 0..count {
            let mut rows: Vec<Vec<u64>> = pivots
                .iter()
                .map(|&pc| {
                    let mut r = vec![0; d];
                    r[pc] = 1;
                    r
                })
                .collect();
            let mut c = code;
            for &(i, col) in &slots {
                rows[i][col] = c % p;
                c /= p;
            }
            out.push(rows);
        }
    }
    out
}

/// Almost self-dual modules `R` with `M ⊆ R ⊆ p^{-1}M` for a self-dual
/// lattice `M`, as lifts `M + p^{-1}Ũ` of subspaces `U` of `M/pM` that are
/// isotropic for the reduced form. `M` itself comes first.
pub fn neighbors_over(m: &Module, form: &SymplecticForm) -> Result<Vec<Module>> {
    let p = m.prime();
    let d = m.dim();
    if d > 4 || p.get() > 5 {
        return Err(Error::BoundExceeded(format!(
            "neighbor enumeration needs dim ≤ 4 and p ≤ 5, got {d} and {}",
            p.get()
        )));
    }
    if !m.is_lattice() || !m.is_selfdual(form)? {
        return Err(Error::Input(
            "neighbors_over needs a self-dual lattice".into(),
        ));
    }
    let basis = m.int().clone();
    let gram = basis.mul(form.gram())?.mul(&basis.transpose())?;
    let pu = p.get() as i64;
    let reduce = |x: &Rational| -> i64 { x.residue(1, p).numer().to_i64().expect("small residue") };
    let gram_mod: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| reduce(&gram[(i, j)])).collect())
        .collect();
    let inv_p = Rational::p_pow(p, -1);
    let mut out = Vec::new();
    for u in subspaces_mod_p(d, p.get()) {
        let isotropic = u.iter().all(|a| {
            u.iter().all(|b| {
                let mut s = 0i64;
                for i in 0..d {
                    for j in 0..d {
                        s += a[i] as i64 * gram_mod[i][j] * b[j] as i64;
                    }
                }
                s.rem_euclid(pu) == 0
            })
        });
        if !isotropic {
            continue;
        }
        let mut lifts = basis.clone();
        for row in &u {
            let coeffs: Vec<Rational> = row
                .iter()
                .map(|&c| &Rational::from_int(c as i64) * &inv_p)
                .collect();
            lifts.push_row(&basis.transpose().mul_vec(&coeffs)?);
        }
        let r = Module::lattice_span(p, &lifts);
        if !r.is_almost_selfdual(form)? {
            return Err(Error::Consistency(
                "lift of an isotropic subspace is not almost self-dual".into(),
            ));
        }
        out.push(r);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct MorphismReport {
    pub contains: bool,
    pub equal: bool,
    pub source_almost_selfdual: bool,
    pub target_almost_selfdual: bool,
}

impl MorphismReport {
    pub fn pass(&self) -> bool {
        self.contains && self.source_almost_selfdual && self.target_almost_selfdual
    }
}

/// For an arrow `(Q,T) → (Q′,T′)`, checks `χ(Q,T) ⊇ χ(Q′,T′)` and that
/// both images are almost self-dual.
pub fn chi_graph_morphism_check(
    g: &BlockElement,
    (q, t): (&Module, &Module),
    (q2, t2): (&Module, &Module),
) -> Result<MorphismReport> {
    if !q.contains(q2)? || !t.contains(t2)? {
        return Err(Error::Input("not an arrow: need Q ⊇ Q′ and T ⊇ T′".into()));
    }
    let v = SymplecticForm::standard(g.alpha());
    let vv = SymplecticForm::ominus(&v, &v);
    let a = chi(g, q, t)?;
    let b = chi(g, q2, t2)?;
    Ok(MorphismReport {
        contains: a.body().contains(b.body())?,
        equal: a == b,
        source_almost_selfdual: a.body().is_almost_selfdual(&vv)?,
        target_almost_selfdual: b.body().is_almost_selfdual(&vv)?,
    })
}

/// Rows spanning the compact part of `r` inside `p^{-t}O^n`: each free row
/// scaled to have minimal valuation `-t`, and each integral row whose
/// coordinates already lie in `p^{-t}O`.
fn compact_generators(r: &Module, t: i64) -> Vec<Vec<Rational>> {
    let p = r.prime();
    let min_val = |row: &[Rational]| {
        row.iter()
            .filter_map(|x| match x.valuation(p) {
                Valuation::Finite(v) => Some(v),
                Valuation::Infinite => None,
            })
            .min()
    };
    let mut out = Vec::new();
    for row in r.free().row_vecs().iter() {
        if let Some(v) = min_val(row) {
            let s = Rational::p_pow(p, -v - t);
            out.push(row.iter().map(|x| x * &s).collect());
        }
    }
    for row in r.int().row_vecs().iter() {
        if min_val(row).is_none_or(|v| v >= -t) {
            out.push(row.to_vec());
        }
    }
    out
}

/// Canonical generators of `r`: free rows scaled to minimal valuation 0,
/// followed by the integral rows.
fn canonical_generators(r: &Module) -> Vec<Vec<Rational>> {
    compact_generators(r, 0)
        .into_iter()
        .take(r.free().rows())
        .chain(r.int().row_vecs())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    /// Clause (i): for each depth `t ≤ depth`, the first index from which
    /// every compact generator of the limit lies in all later terms.
    pub j0: Vec<Option<usize>>,
    pub clause_i: bool,
    /// Clause (ii): for each term, the largest `t ≤ cap` with every
    /// canonical generator in `limit + p^t O^n`.
    pub t_j: Vec<i64>,
    pub clause_ii: bool,
    pub witnesses: Vec<Value>,
}

impl ConvergenceReport {
    pub fn pass(&self) -> bool {
        self.clause_i && self.clause_ii
    }
}

/// Finite-depth check of `seq ↗ limit`. Clause (ii) requires `t_j` to be
/// nondecreasing and to reach `depth` by the end of the sequence.
pub fn check_convergence(seq: &[Module], limit: &Module, depth: i64) -> Result<ConvergenceReport> {
    let cap = 4 * depth + 4;
    let mut witnesses = Vec::new();
    let mut j0 = Vec::new();
    for t in 0..=depth {
        let gens = compact_generators(limit, t);
        let mut first = None;
        for j in (0..seq.len()).rev() {
            let mut all = true;
            for x in &gens {
                if !seq[j].contains_vector(x)? {
                    all = false;
                    break;
                }
            }
            if !all {
                break;
            }
            first = Some(j);
        }
        if first.is_none() {
            witnesses.push(json!({"clause": "i", "t": t, "generators": gens}));
        }
        j0.push(first);
    }
    let clause_i = j0.iter().all(|j| j.is_some());

    let mut t_j = Vec::new();
    for (j, r) in seq.iter().enumerate() {
        let gens = canonical_generators(r);
        let mut best = i64::MIN;
        for t in (-cap..=cap).rev() {
            let mut ok = true;
            for x in &gens {
                if !limit.approx_contains(x, t)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                best = t;
                break;
            }
        }
        if best == i64::MIN {
            witnesses.push(json!({"clause": "ii", "j": j}));
        }
        t_j.push(best);
    }
    let monotone = t_j.windows(2).all(|w| w[0] <= w[1]);
    let reaches = t_j.last().is_some_and(|&t| t >= depth);
    if !(monotone && reaches) {
        witnesses.push(json!({"clause": "ii", "t_j": t_j}));
    }
    Ok(ConvergenceReport {
        j0,
        clause_i,
        t_j,
        clause_ii: monotone && reaches,
        witnesses,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub convergence: ConvergenceReport,
    /// `χ(Q_j,T)_↓ ⊆ χ(Q∞,T)_↓` for every term.
    pub lower_limit: bool,
    pub witnesses: Vec<Value>,
}

impl ContinuityReport {
    pub fn pass(&self) -> bool {
        self.convergence.pass() && self.lower_limit
    }
}

/// Checks that `χ(Q_j,T) ↗ χ(Q∞,T)` at finite depth.
pub fn continuity_check(
    g: &BlockElement,
    qseq: &[Module],
    q_lim: &Module,
    t: &Module,
    depth: i64,
) -> Result<ContinuityReport> {
    let images: Vec<Relation> = qseq.iter().map(|q| chi(g, q, t)).collect::<Result<_>>()?;
    let lim = chi(g, q_lim, t)?;
    let bodies: Vec<Module> = images.iter().map(|r| r.body().clone()).collect();
    let convergence = check_convergence(&bodies, lim.body(), depth)?;
    let lim_down = lim.body().down_module();
    let mut witnesses = Vec::new();
    let mut lower_limit = true;
    for (j, b) in bodies.iter().enumerate() {
        if !lim_down.contains(&b.down_module())? {
            lower_limit = false;
            witnesses.push(json!({"j": j, "down": ModuleJson::from(&b.down_module())}));
        }
    }
    Ok(ContinuityReport {
        convergence,
        lower_limit,
        witnesses,
    })
}

/// `Q_j = p^{-j}O e⁺ ⊕ p^{j}O e⁻` for `j = 0..=len-1` over `Q^{2}`, and its
/// limit `Q_p e⁺`.
pub fn standard_sequence(p: Prime, len: usize) -> (Vec<Module>, Module) {
    let seq = (0..len as i64)
        .map(|j| Module::diagonal_lattice(p, &[-j, j]))
        .collect();
    let lim = Module::subspace(p, &Matrix::from_ints(&[&[1, 0]]));
    (seq, lim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn classify_examples() {
        let f = SymplecticForm::standard(1);
        assert_eq!(
            classify(&Module::standard_lattice(p(3), 2), &f).unwrap(),
            Classification::Selfdual
        );
        assert_eq!(
            classify(&Module::diagonal_lattice(p(3), &[-1, 0]), &f).unwrap(),
            Classification::AlmostSelfdual
        );
        assert_eq!(
            classify(&Module::diagonal_lattice(p(3), &[-1, -1]), &f).unwrap(),
            Classification::Neither
        );
    }

    #[test]
    fn arrows() {
        let big = Module::diagonal_lattice(p(3), &[-1, 0]);
        let o = Module::standard_lattice(p(3), 2);
        assert!(has_arrow(&big, &o).unwrap());
        assert!(has_arrow(&o, &o).unwrap());
        let other = Module::diagonal_lattice(p(3), &[-1, 1]);
        assert!(!has_arrow(&o, &other).unwrap());
        assert!(!has_arrow(&other, &o).unwrap());
    }

    #[test]
    fn subspace_counts() {
        // Gaussian binomials: F_3^2 has 1 + 4 + 1 subspaces, F_2^3 has 1 + 7 + 7 + 1.
        assert_eq!(subspaces_mod_p(2, 3).len(), 6);
        assert_eq!(subspaces_mod_p(3, 2).len(), 16);
    }

    #[test]
    fn tree_valence() {
        for q in [3, 5] {
            let f = SymplecticForm::standard(1);
            let n = neighbors_over(&Module::standard_lattice(p(q), 2), &f).unwrap();
            assert_eq!(n.len() as u64, q + 2);
        }
    }

    #[test]
    fn standard_sequence_converges() {
        let (seq, lim) = standard_sequence(p(3), 7);
        let r = check_convergence(&seq, &lim, 4).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.t_j, (0..7).collect::<Vec<i64>>());
    }

    #[test]
    fn constant_sequence_converges() {
        let q = Module::diagonal_lattice(p(5), &[-1, 0]);
        let r = check_convergence(&vec![q.clone(); 3], &q, 2).unwrap();
        assert!(r.clause_i);
    }
}
