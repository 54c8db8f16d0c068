//! Extremal polynomials `P_j^v = Σ_k v_k Q_{jk}` with
//! `Q_{jk}(x) = Σ_α (−1)^{|α|}/α! c_{jα}^k x^α`.

use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::algebra::{GradedLieAlgebra, LieVec};
use crate::error::{Error, Result};
use crate::exec;
use crate::group::Group;
use crate::linalg::{self, SparseRow};
use crate::poly::{Poly, PolyVectorField};
use crate::prolongation::ProlongedAlgebra;
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct ExtremalFamily {
    prolonged: ProlongedAlgebra,
    /// `q[slot(j)][k-1]`.
    q: Vec<Vec<Poly>>,
    fields: OnceLock<Vec<PolyVectorField>>,
}

/// A nonzero entry of `X_i Q_{jk} − Σ_l c_{ij}^l Q_{lk}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub i: i64,
    pub j: i64,
    pub k: i64,
    pub residual: Poly,
}

fn q_row(alg: &GradedLieAlgebra, j: i64) -> Result<Vec<Poly>> {
    let n = alg.n();
    let off = alg.base_offset();
    let mut row: Vec<Poly> = (0..n).map(|_| Poly::zero(n)).collect();
    for (alpha, v) in alg.commutator_tree(j)? {
        let sign = alpha.sign_over_factorial();
        for (slot, c) in v {
            if slot < off {
                continue;
            }
            row[slot - off].add_term(alpha.clone(), &sign * c);
        }
    }
    Ok(row)
}

impl ExtremalFamily {
    pub fn build(p: &ProlongedAlgebra) -> Result<ExtremalFamily> {
        let alg = p.algebra();
        let ids: Vec<i64> = alg.ids().collect();
        let q = exec::map(&ids, |&j| q_row(alg, j)).into_iter().collect::<Result<Vec<_>>>()?;
        Ok(ExtremalFamily { prolonged: p.clone(), q, fields: OnceLock::new() })
    }

    /// Family of `g` alone, without prolongation indices.
    pub fn of_algebra(a: &GradedLieAlgebra) -> Result<ExtremalFamily> {
        Self::build(&ProlongedAlgebra::trivial(a))
    }

    pub fn prolonged(&self) -> &ProlongedAlgebra {
        &self.prolonged
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        self.prolonged.algebra()
    }

    pub fn n(&self) -> usize {
        self.algebra().n()
    }

    pub fn weights(&self) -> &[i32] {
        self.algebra().positive_degrees()
    }

    /// All stored indices `j ≤ n`.
    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        self.algebra().ids()
    }

    pub fn q(&self, j: i64, k: i64) -> Result<&Poly> {
        let slot = self.algebra().slot(j)?;
        if k < 1 || k > self.n() as i64 {
            return Err(Error::UnknownIndex(k));
        }
        Ok(&self.q[slot][(k - 1) as usize])
    }

    pub fn q_row(&self, j: i64) -> Result<&[Poly]> {
        Ok(&self.q[self.algebra().slot(j)?])
    }

    fn check_v(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: v.len() });
        }
        Ok(())
    }

    /// `P_j^v` as a polynomial in `x`.
    pub fn polynomial(&self, j: i64, v: &[Rational]) -> Result<Poly> {
        self.check_v(v)?;
        let mut out = Poly::zero(self.n());
        for (vk, q) in v.iter().zip(self.q_row(j)?) {
            if !vk.is_zero() {
                out.add_scaled(vk, q);
            }
        }
        Ok(out)
    }

    pub fn eval_p(&self, j: i64, v: &[Rational], x: &[Rational]) -> Result<Rational> {
        self.check_v(v)?;
        let mut acc = Rational::zero();
        for (vk, q) in v.iter().zip(self.q_row(j)?) {
            if !vk.is_zero() && !q.is_zero() {
                acc += vk * q.evaluate(x)?;
            }
        }
        Ok(acc)
    }

    pub fn eval_p_f64(&self, j: i64, v: &[f64], x: &[f64]) -> Result<f64> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: v.len() });
        }
        let mut acc = 0.0;
        for (vk, q) in v.iter().zip(self.q_row(j)?) {
            if *vk != 0.0 && !q.is_zero() {
                acc += vk * q.evaluate_f64(x)?;
            }
        }
        Ok(acc)
    }

    /// Left-invariant fields `X_1, …, X_n` of the underlying group.
    pub fn fields(&self) -> &[PolyVectorField] {
        self.fields.get_or_init(|| {
            Group::new(self.prolonged.base())
                .expect("nonempty algebra")
                .left_invariant_fields()
        })
    }

    /// Every nonzero `X_i Q_{jk} − Σ_l c_{ij}^l Q_{lk}` over `i = 1..n`,
    /// stored `j` and `k = 1..n`. Empty means the identities hold exactly.
    pub fn verify_structure(&self) -> Vec<Residual> {
        let fields = self.fields();
        let alg = self.algebra();
        let n = self.n();
        let ids: Vec<i64> = alg.ids().collect();
        let per_j = exec::map(&ids, |&j| {
            let row = self.q_row(j).expect("stored");
            let derivs: Vec<Vec<Poly>> =
                row.iter().map(|q| (0..n).map(|l| q.derivative(l)).collect()).collect();
            let mut out = Vec::new();
            for i in 1..=n as i64 {
                let field = &fields[(i - 1) as usize];
                let bracket = alg.bracket_basis(i, j).expect("stored");
                for k in 0..n {
                    let mut r = Poly::zero(n);
                    for (l, f) in field.coeffs.iter().enumerate() {
                        if !f.is_zero() && !derivs[k][l].is_zero() {
                            r.add_assign_poly(&(f * &derivs[k][l]));
                        }
                    }
                    for (lid, c) in &bracket {
                        r.add_scaled(&-c, &self.q_row(*lid).expect("stored")[k]);
                    }
                    if !r.is_zero() {
                        out.push(Residual { i, j, k: k as i64 + 1, residual: r });
                    }
                }
            }
            out
        });
        per_j.into_iter().flatten().collect()
    }

    /// Rebuilds the family from the structure identities alone, descending in
    /// `d(j)`: only `X_1, …, X_r` are used directly, higher `X_m` through
    /// commutators, and `Q_{j·}` is recovered by integrating along the
    /// coordinate axes where `X_i = ∂/∂x_i`.
    pub fn reconstruct_by_recursion(p: &ProlongedAlgebra) -> Result<ExtremalFamily> {
        let alg = p.algebra();
        let n = alg.n();
        let fields = Group::new(p.base())?.left_invariant_fields();
        let degrees = alg.positive_degrees().to_vec();
        let r = alg.rank();
        let decomposition = commutator_decomposition(alg)?;
        let mut q: Vec<Option<Vec<Poly>>> = vec![None; alg.dim()];
        let mut order: Vec<i64> = alg.ids().collect();
        order.sort_by_key(|&j| std::cmp::Reverse(alg.degree(j).expect("stored")));
        for j in order {
            let slot = alg.slot(j)?;
            let unit = |k: usize| if j >= 1 && k == (j - 1) as usize { Rational::one() } else { Rational::zero() };
            // X_i Q_{j·} for i ≤ r from the identities
            let mut known: Vec<Option<Vec<Poly>>> = vec![None; n];
            for i in 1..=r as i64 {
                let mut d: Vec<Poly> = (0..n).map(|_| Poly::zero(n)).collect();
                for (l, c) in alg.bracket_basis(i, j)? {
                    let row = q[alg.slot(l)?].as_ref().ok_or_else(|| Error::Integrability {
                        index: j,
                        detail: format!("Q_{l} needed before it was built"),
                    })?;
                    for (dk, qk) in d.iter_mut().zip(row) {
                        dk.add_scaled(&c, qk);
                    }
                }
                known[(i - 1) as usize] = Some(d);
            }
            // X_m = Σ d_{ab}^m [X_a, X_b] for higher m, in increasing degree
            for m in 0..n {
                if degrees[m] == 1 {
                    continue;
                }
                let mut d: Vec<Poly> = (0..n).map(|_| Poly::zero(n)).collect();
                for (a, b, c) in &decomposition[m] {
                    let xa = known[*a].as_ref().expect("lower degree first");
                    let xb = known[*b].as_ref().expect("generator");
                    for k in 0..n {
                        let ab = fields[*a].apply(&xb[k])?;
                        let ba = fields[*b].apply(&xa[k])?;
                        d[k].add_scaled(c, &(&ab - &ba));
                    }
                }
                known[m] = Some(d);
            }
            let mut row: Vec<Poly> = (0..n).map(|k| Poly::constant(n, unit(k))).collect();
            for i in 0..n {
                let d = known[i].as_ref().expect("filled");
                for k in 0..n {
                    let g = d[k].restrict_zero(|v| v < i);
                    if !g.is_zero() {
                        row[k].add_assign_poly(&g.antiderivative(i));
                    }
                }
            }
            for i in 0..r {
                let d = known[i].as_ref().expect("filled");
                for k in 0..n {
                    if fields[i].apply(&row[k])? != d[k] {
                        return Err(Error::Integrability {
                            index: j,
                            detail: format!("X_{} Q_{{{j},{}}} disagrees with the structure identity", i + 1, k + 1),
                        });
                    }
                }
            }
            q[slot] = Some(row);
        }
        Ok(ExtremalFamily {
            prolonged: p.clone(),
            q: q.into_iter().map(|r| r.expect("all built")).collect(),
            fields: OnceLock::from(fields),
        })
    }

    /// Same polynomials, entry by entry.
    pub fn same_polynomials(&self, other: &ExtremalFamily) -> bool {
        self.q == other.q
    }
}

/// For each `m` of degree ≥ 2, a decomposition `X_m = Σ c [X_a, X_b]` with
/// `d(a) = d(m) − 1` and `d(b) = 1` (slots are `index − 1`).
fn commutator_decomposition(alg: &GradedLieAlgebra) -> Result<Vec<Vec<(usize, usize, Rational)>>> {
    let n = alg.n();
    let degrees = alg.positive_degrees();
    let mut out = vec![Vec::new(); n];
    for m in 0..n {
        let d = degrees[m];
        if d < 2 {
            continue;
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .filter(|&a| degrees[a] == d - 1)
            .flat_map(|a| (0..n).filter(|&b| degrees[b] == 1).map(move |b| (a, b)))
            .collect();
        let images: Vec<LieVec> = pairs
            .iter()
            .map(|&(a, b)| alg.bracket_basis(a as i64 + 1, b as i64 + 1))
            .collect::<Result<_>>()?;
        let targets = alg.ids_of_degree(d);
        let eqs: Vec<(SparseRow, Rational)> = targets
            .iter()
            .map(|&t| {
                let row: SparseRow = images
                    .iter()
                    .enumerate()
                    .filter_map(|(p, img)| img.get(&t).map(|c| (p, c.clone())))
                    .collect();
                let rhs = if t == m as i64 + 1 { Rational::one() } else { Rational::zero() };
                (row, rhs)
            })
            .collect();
        let coef = linalg::solve(&eqs, pairs.len()).ok_or_else(|| Error::Integrability {
            index: m as i64 + 1,
            detail: "not generated by brackets with the first layer".into(),
        })?;
        out[m] = pairs
            .into_iter()
            .zip(coef)
            .filter(|(_, c)| !c.is_zero())
            .map(|((a, b), c)| (a, b, c))
            .collect();
    }
    Ok(out)
}
