//! Graded Lie algebras given by exact structure constants.
//!
//! Basis elements carry signed indices: `1..=n` span the stratified algebra
//! `g = g_1 ⊕ … ⊕ g_s`, while indices `≤ 0` are prolongation elements of
//! degree `≤ 0`. Internally the indices `min_id..=n` are stored contiguously
//! (slot = id − min_id); every public result speaks in indices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{self, SparseRow};
use crate::rational::{self, Rational};

/// Coefficient ring for Lie algebra elements (rationals, polynomials, floats).
pub trait Coeff: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn vanishes(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
}

impl Coeff for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn vanishes(&self) -> bool {
        *self == 0.0
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Rational) -> Self {
        self * rational::to_f64(c)
    }
}

/// Exponent vector `α ∈ ℕ^n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, e: u8) {
        self.0[i] = e;
    }

    /// `|α| = Σ α_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// `α! = Π α_j!`.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().fold(BigInt::one(), |acc, &e| acc * rational::factorial(e as u32))
    }

    /// `d(α) = Σ α_j d(j)`.
    pub fn weighted_degree(&self, weights: &[i32]) -> i64 {
        self.0.iter().zip(weights).map(|(&e, &w)| e as i64 * w as i64).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// `(-1)^{|α|} / α!`.
    pub fn sign_over_factorial(&self) -> Rational {
        let s = if self.order().is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        Rational::new(s, self.factorial())
    }
}

impl From<Vec<u8>> for MultiIndex {
    fn from(v: Vec<u8>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sparse linear combination of basis elements keyed by index.
pub type LieVec = BTreeMap<i64, Rational>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Antisymmetry { i: i64, j: i64, k: i64 },
    Grading { i: i64, j: i64, k: i64 },
    Jacobi { i: i64, j: i64, k: i64, component: i64 },
    Generativity { degree: i32, expected: usize, spanned: usize },
    Ordering { id: i64 },
    Degree { id: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Antisymmetry { i, j, k } => {
                write!(f, "antisymmetry violated: c_{{{i},{j}}}^{k} != -c_{{{j},{i}}}^{k}")
            }
            Violation::Grading { i, j, k } => {
                write!(f, "grading violated: c_{{{i},{j}}}^{k} != 0 but d({k}) != d({i}) + d({j})")
            }
            Violation::Jacobi { i, j, k, component } => {
                write!(f, "Jacobi identity violated on triple ({i}, {j}, {k}) at component {component}")
            }
            Violation::Generativity { degree, expected, spanned } => write!(
                f,
                "stratum {degree} not generated: [g_{}, g_1] spans {spanned} of {expected} dimensions",
                degree - 1
            ),
            Violation::Ordering { id } => write!(f, "basis not adapted: degree drops at index {id}"),
            Violation::Degree { id } => write!(f, "index {id} has a degree outside its range"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedLieAlgebra {
    min_id: i64,
    n: usize,
    degrees: Vec<i32>,
    table: Vec<Vec<(usize, Rational)>>,
    /// Lowest degree whose brackets are known; brackets below it were dropped.
    cutoff: Option<i32>,
}

impl GradedLieAlgebra {
    /// Builds `g` from the degrees of `X_1..X_n` and bracket entries
    /// `(i, j, k, c_{ij}^k)`. A pair listed only one way is completed by
    /// antisymmetry; pairs listed both ways are stored as given.
    pub fn new<I>(degrees: Vec<i32>, brackets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, i64, i64, Rational)>,
    {
        Self::with_prolongation(1, degrees, brackets, None)
    }

    /// Like [`GradedLieAlgebra::new`] but the basis runs over `min_id..=n`;
    /// `degrees[slot]` is the degree of index `min_id + slot`.
    pub fn with_prolongation<I>(
        min_id: i64,
        degrees: Vec<i32>,
        brackets: I,
        cutoff: Option<i32>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, i64, i64, Rational)>,
    {
        if min_id > 1 {
            return Err(Error::InvalidArgument("min_id must be at most 1".into()));
        }
        let dim = degrees.len();
        let n_neg = (1 - min_id) as usize;
        if dim < n_neg {
            return Err(Error::InvalidArgument("fewer degrees than prolongation indices".into()));
        }
        let mut alg = GradedLieAlgebra {
            min_id,
            n: dim - n_neg,
            degrees,
            table: vec![Vec::new(); dim * dim],
            cutoff,
        };
        let mut given: BTreeMap<(usize, usize), BTreeMap<usize, Rational>> = BTreeMap::new();
        for (i, j, k, c) in brackets {
            let (a, b, t) = (alg.slot(i)?, alg.slot(j)?, alg.slot(k)?);
            let e = given.entry((a, b)).or_default().entry(t).or_insert_with(Rational::zero);
            *e += c;
        }
        let keys: Vec<(usize, usize)> = given.keys().copied().collect();
        for (a, b) in keys {
            if !given.contains_key(&(b, a)) {
                let neg = given[&(a, b)].iter().map(|(k, c)| (*k, -c.clone())).collect();
                given.insert((b, a), neg);
            }
        }
        for ((a, b), row) in given {
            alg.table[a * dim + b] = row.into_iter().filter(|(_, c)| !Zero::is_zero(c)).collect();
        }
        Ok(alg)
    }

    pub(crate) fn from_raw_table(
        min_id: i64,
        degrees: Vec<i32>,
        table: Vec<Vec<(usize, Rational)>>,
        cutoff: Option<i32>,
    ) -> Self {
        let dim = degrees.len();
        debug_assert_eq!(table.len(), dim * dim);
        GradedLieAlgebra { min_id, n: dim - (1 - min_id) as usize, degrees, table, cutoff }
    }

    pub(crate) fn raw_table(&self) -> &[Vec<(usize, Rational)>] {
        &self.table
    }

    /// Dimension of `g` (positive indices only).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored basis elements, prolongation included.
    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn min_id(&self) -> i64 {
        self.min_id
    }

    pub fn ids(&self) -> std::ops::RangeInclusive<i64> {
        self.min_id..=self.n as i64
    }

    pub fn cutoff(&self) -> Option<i32> {
        self.cutoff
    }

    pub fn rank(&self) -> usize {
        self.positive_degrees().iter().filter(|&&d| d == 1).count()
    }

    pub fn step(&self) -> i32 {
        self.positive_degrees().iter().copied().max().unwrap_or(0)
    }

    pub fn slot(&self, id: i64) -> Result<usize> {
        if id < self.min_id || id > self.n as i64 {
            return Err(Error::UnknownIndex(id));
        }
        Ok((id - self.min_id) as usize)
    }

    pub fn id_of(&self, slot: usize) -> i64 {
        slot as i64 + self.min_id
    }

    /// Slot of positive index 1.
    pub fn base_offset(&self) -> usize {
        (1 - self.min_id) as usize
    }

    pub fn degree(&self, id: i64) -> Result<i32> {
        Ok(self.degrees[self.slot(id)?])
    }

    pub fn slot_degrees(&self) -> &[i32] {
        &self.degrees
    }

    /// Degrees `d(1), …, d(n)`, used as polynomial weights.
    pub fn positive_degrees(&self) -> &[i32] {
        &self.degrees[self.base_offset()..]
    }

    /// Indices of degree `d` in increasing order.
    pub fn ids_of_degree(&self, d: i32) -> Vec<i64> {
        self.ids().filter(|&i| self.degrees[(i - self.min_id) as usize] == d).collect()
    }

    /// `[X_a, X_b]` as sparse `(slot, coefficient)` pairs.
    pub fn bracket_slots(&self, a: usize, b: usize) -> &[(usize, Rational)] {
        &self.table[a * self.dim() + b]
    }

    pub fn bracket_basis(&self, i: i64, j: i64) -> Result<LieVec> {
        let (a, b) = (self.slot(i)?, self.slot(j)?);
        Ok(self.bracket_slots(a, b).iter().map(|(k, c)| (self.id_of(*k), c.clone())).collect())
    }

    /// `c_{ij}^k`.
    pub fn structure_constant(&self, i: i64, j: i64, k: i64) -> Result<Rational> {
        let (a, b, t) = (self.slot(i)?, self.slot(j)?, self.slot(k)?);
        Ok(self
            .bracket_slots(a, b)
            .iter()
            .find(|(s, _)| *s == t)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero))
    }

    /// Bilinear bracket of two slot-dense vectors over any coefficient ring.
    pub fn bracket_dense<R: Coeff>(&self, u: &[R], w: &[R]) -> Vec<R> {
        let dim = self.dim();
        assert!(u.len() == dim && w.len() == dim, "vector length must equal dim");
        let zero = u[0].zero_like();
        let mut out = vec![zero; dim];
        for (a, ua) in u.iter().enumerate() {
            if ua.vanishes() {
                continue;
            }
            for (b, wb) in w.iter().enumerate() {
                if wb.vanishes() {
                    continue;
                }
                let row = self.bracket_slots(a, b);
                if row.is_empty() {
                    continue;
                }
                let p = ua.mul(wb);
                for (k, c) in row {
                    out[*k].add_assign(&p.scale(c));
                }
            }
        }
        out
    }

    /// `[u, X_b]` for a single basis slot, over any coefficient ring.
    pub fn bracket_with_basis<R: Coeff>(&self, u: &[R], b: usize) -> Vec<R> {
        let dim = self.dim();
        let zero = u[0].zero_like();
        let mut out = vec![zero; dim];
        for (a, ua) in u.iter().enumerate() {
            if ua.vanishes() {
                continue;
            }
            for (k, c) in self.bracket_slots(a, b) {
                out[*k].add_assign(&ua.scale(c));
            }
        }
        out
    }

    fn check_keys(&self, u: &LieVec) -> Result<()> {
        for &k in u.keys() {
            self.slot(k)?;
        }
        Ok(())
    }

    /// Bracket of coefficient maps.
    pub fn bracket(&self, u: &LieVec, w: &LieVec) -> Result<LieVec> {
        self.check_keys(u)?;
        self.check_keys(w)?;
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, ci) in u {
            for (j, cj) in w {
                let (a, b) = (self.slot(*i)?, self.slot(*j)?);
                for (k, c) in self.bracket_slots(a, b) {
                    *acc.entry(*k).or_insert_with(Rational::zero) += ci * cj * c;
                }
            }
        }
        Ok(acc
            .into_iter()
            .filter(|(_, c)| !Zero::is_zero(c))
            .map(|(k, c)| (self.id_of(k), c))
            .collect())
    }

    pub fn basis_vec(&self, id: i64) -> Result<LieVec> {
        self.slot(id)?;
        Ok([(id, Rational::one())].into_iter().collect())
    }

    /// `[X_i, X_α]`: brackets with `X_1` α_1 times, then `X_2` α_2 times, …
    pub fn iterated_commutator(&self, i: i64, alpha: &MultiIndex) -> Result<LieVec> {
        if alpha.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: alpha.len() });
        }
        let mut v: Vec<Rational> = vec![Rational::zero(); self.dim()];
        v[self.slot(i)?] = Rational::one();
        let off = self.base_offset();
        for (m, &e) in alpha.exponents().iter().enumerate() {
            for _ in 0..e {
                v = self.bracket_with_basis(&v, off + m);
            }
        }
        Ok(self.dense_to_map(&v))
    }

    pub fn dense_to_map(&self, v: &[Rational]) -> LieVec {
        v.iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(s, c)| (self.id_of(s), c.clone()))
            .collect()
    }

    pub fn map_to_dense(&self, u: &LieVec) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (k, c) in u {
            v[self.slot(*k)?] = c.clone();
        }
        Ok(v)
    }

    /// All nonzero `[X_i, X_α]`, as `(α, sparse slot vector)`, enumerated
    /// depth-first with generators in ascending order. Zero commutators are
    /// pruned together with all their extensions.
    pub fn commutator_tree(&self, i: i64) -> Result<Vec<(MultiIndex, Vec<(usize, Rational)>)>> {
        let start = self.slot(i)?;
        let top = self.step();
        let n = self.n;
        let off = self.base_offset();
        let mut out = Vec::new();
        let mut v0 = vec![Rational::zero(); self.dim()];
        v0[start] = Rational::one();
        let mut stack: Vec<(Vec<Rational>, usize, MultiIndex, i32)> =
            vec![(v0, 0, MultiIndex::zeros(n), self.degrees[start])];
        while let Some((v, first, alpha, deg)) = stack.pop() {
            out.push((
                alpha.clone(),
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| !Zero::is_zero(*c))
                    .map(|(s, c)| (s, c.clone()))
                    .collect(),
            ));
            // push in reverse so that smaller generators are visited first
            for m in (first..n).rev() {
                let dm = self.degrees[off + m];
                if deg + dm > top {
                    continue;
                }
                let w = self.bracket_with_basis(&v, off + m);
                if w.iter().all(Zero::is_zero) {
                    continue;
                }
                let mut beta = alpha.clone();
                beta.set(m, alpha.get(m) + 1);
                stack.push((w, m, beta, deg + dm));
            }
        }
        Ok(out)
    }

    /// Nonzero generalized structure constants `c_{iα}^k`, keyed by `(α, k)`.
    pub fn generalized_structure_constants(&self, i: i64) -> Result<BTreeMap<(MultiIndex, i64), Rational>> {
        let mut out = BTreeMap::new();
        for (alpha, v) in self.commutator_tree(i)? {
            for (s, c) in v {
                out.insert((alpha.clone(), self.id_of(s)), c);
            }
        }
        Ok(out)
    }

    fn below_cutoff(&self, d: i32) -> bool {
        matches!(self.cutoff, Some(c) if d < c)
    }

    /// Checks ordering, antisymmetry, grading, Jacobi on all triples and
    /// generation of each stratum by `[g_{m-1}, g_1]`. Never fails; an empty
    /// list means the table is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let dim = self.dim();
        let off = self.base_offset();
        for s in 0..dim {
            let id = self.id_of(s);
            let d = self.degrees[s];
            if (id >= 1 && d < 1) || (id <= 0 && d > 0) {
                out.push(Violation::Degree { id });
            }
            if s > 0 && s != off && self.degrees[s] < self.degrees[s - 1] {
                out.push(Violation::Ordering { id });
            }
        }
        for a in 0..dim {
            for b in a..dim {
                let ab: BTreeMap<usize, &Rational> = self.bracket_slots(a, b).iter().map(|(k, c)| (*k, c)).collect();
                let ba: BTreeMap<usize, &Rational> = self.bracket_slots(b, a).iter().map(|(k, c)| (*k, c)).collect();
                let keys: std::collections::BTreeSet<usize> = ab.keys().chain(ba.keys()).copied().collect();
                for k in keys {
                    let x = ab.get(&k).map(|c| (*c).clone()).unwrap_or_else(Rational::zero);
                    let y = ba.get(&k).map(|c| (*c).clone()).unwrap_or_else(Rational::zero);
                    if !Zero::is_zero(&(x + y)) {
                        out.push(Violation::Antisymmetry { i: self.id_of(a), j: self.id_of(b), k: self.id_of(k) });
                    }
                }
            }
        }
        for a in 0..dim {
            for b in 0..dim {
                for (k, _) in self.bracket_slots(a, b) {
                    if self.degrees[*k] != self.degrees[a] + self.degrees[b] {
                        out.push(Violation::Grading { i: self.id_of(a), j: self.id_of(b), k: self.id_of(*k) });
                    }
                }
            }
        }
        out.extend(self.jacobi_violations());
        out.extend(self.generativity_violations());
        out
    }

    /// `[[a,b],c] + [[b,c],a] + [[c,a],b] = 0` over all `a < b < c`.
    pub fn jacobi_violations(&self) -> Vec<Violation> {
        let dim = self.dim();
        let unit = |s: usize| {
            let mut v = vec![Rational::zero(); dim];
            v[s] = Rational::one();
            v
        };
        let per_a = exec::map_range(dim, |a| {
            let mut found = Vec::new();
            for b in a + 1..dim {
                for c in b + 1..dim {
                    let (da, db, dc) = (self.degrees[a], self.degrees[b], self.degrees[c]);
                    if self.below_cutoff(da + db) || self.below_cutoff(db + dc) || self.below_cutoff(da + dc) {
                        continue;
                    }
                    let ab = self.bracket_with_basis(&unit(a), b);
                    let bc = self.bracket_with_basis(&unit(b), c);
                    let ca = self.bracket_with_basis(&unit(c), a);
                    let mut j = self.bracket_with_basis(&ab, c);
                    for (x, y) in j.iter_mut().zip(self.bracket_with_basis(&bc, a)) {
                        *x += y;
                    }
                    for (x, y) in j.iter_mut().zip(self.bracket_with_basis(&ca, b)) {
                        *x += y;
                    }
                    if let Some(k) = j.iter().position(|x| !Zero::is_zero(x)) {
                        found.push(Violation::Jacobi {
                            i: self.id_of(a),
                            j: self.id_of(b),
                            k: self.id_of(c),
                            component: self.id_of(k),
                        });
                    }
                }
            }
            found
        });
        per_a.into_iter().flatten().collect()
    }

    fn generativity_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let off = self.base_offset();
        let g1: Vec<usize> = (0..self.n).filter(|&m| self.degrees[off + m] == 1).map(|m| off + m).collect();
        for d in 2..=self.step() {
            let lower: Vec<usize> = (0..self.n).filter(|&m| self.degrees[off + m] == d - 1).map(|m| off + m).collect();
            let expected = (0..self.n).filter(|&m| self.degrees[off + m] == d).count();
            let mut rows: Vec<SparseRow> = Vec::new();
            for &a in &lower {
                for &b in &g1 {
                    let row: SparseRow = self
                        .bracket_slots(a, b)
                        .iter()
                        .filter(|(k, _)| self.degrees[*k] == d)
                        .map(|(k, c)| (*k, c.clone()))
                        .collect();
                    rows.push(row);
                }
            }
            let spanned = linalg::rank(&rows, self.dim());
            if spanned != expected {
                out.push(Violation::Generativity { degree: d, expected, spanned });
            }
        }
        out
    }

    /// Structure constants for pairs of positive indices only.
    pub fn positive_part(&self) -> GradedLieAlgebra {
        if self.min_id == 1 {
            return self.clone();
        }
        let off = self.base_offset();
        let n = self.n;
        let mut table = vec![Vec::new(); n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self
                    .bracket_slots(off + a, off + b)
                    .iter()
                    .map(|(k, c)| (k - off, c.clone()))
                    .collect();
            }
        }
        GradedLieAlgebra::from_raw_table(1, self.positive_degrees().to_vec(), table, None)
    }

    /// The Heisenberg algebra with `X_3 = [X_2, X_1]`.
    pub fn heisenberg() -> GradedLieAlgebra {
        GradedLieAlgebra::new(vec![1, 1, 2], [(2, 1, 3, Rational::one())]).expect("static table")
    }

    /// Abelian algebra of dimension `r`, all of degree one.
    pub fn abelian(r: usize) -> GradedLieAlgebra {
        GradedLieAlgebra::new(vec![1; r], std::iter::empty()).expect("static table")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn e(id: i64) -> LieVec {
        [(id, int(1))].into_iter().collect()
    }

    #[test]
    fn heisenberg_brackets() {
        let h = GradedLieAlgebra::heisenberg();
        assert_eq!(h.bracket(&e(2), &e(1)).unwrap(), e(3));
        assert_eq!(h.bracket(&e(1), &e(2)).unwrap(), [(3, int(-1))].into_iter().collect());
        for i in 1..=3 {
            assert!(h.bracket(&e(i), &e(i)).unwrap().is_empty());
        }
        assert!(h.validate().is_empty());
        assert!(matches!(h.bracket(&e(4), &e(1)), Err(Error::UnknownIndex(4))));
    }

    #[test]
    fn heisenberg_gsc() {
        let h = GradedLieAlgebra::heisenberg();
        let gsc = h.generalized_structure_constants(1).unwrap();
        assert_eq!(gsc[&(MultiIndex::from(vec![0, 1, 0]), 3)], int(-1));
        assert_eq!(gsc[&(MultiIndex::zeros(3), 1)], int(1));
        assert_eq!(gsc.len(), 2);
        let via = h.iterated_commutator(1, &MultiIndex::from(vec![0, 1, 0])).unwrap();
        assert_eq!(via, [(3, int(-1))].into_iter().collect());
    }

    #[test]
    fn antisymmetry_violation_reported() {
        let bad = GradedLieAlgebra::new(vec![1, 1, 2], [(1, 2, 3, int(1)), (2, 1, 3, int(1))]).unwrap();
        let v = bad.validate();
        assert!(v.contains(&Violation::Antisymmetry { i: 1, j: 2, k: 3 }), "{v:?}");
    }

    #[test]
    fn grading_and_generativity_violations() {
        // [X_1, X_2] = X_2 breaks grading; X_3 of degree 2 is then not generated.
        let bad = GradedLieAlgebra::new(vec![1, 1, 2], [(1, 2, 2, int(1))]).unwrap();
        let v = bad.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::Grading { .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::Generativity { degree: 2, .. })));
    }

    #[test]
    fn multi_index_quantities() {
        let a = MultiIndex::from(vec![2, 0, 1]);
        assert_eq!(a.order(), 3);
        assert_eq!(a.factorial(), BigInt::from(2));
        assert_eq!(a.weighted_degree(&[1, 1, 2]), 4);
        assert_eq!(a.sign_over_factorial(), crate::rational::frac(-1, 2));
    }
}
