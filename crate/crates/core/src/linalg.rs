//! Exact and numeric linear algebra for null spaces and small solves.
//!
//! Exact elimination keeps every echelon row as a primitive integer vector
//! with positive leading entry: rows are combined by cross-multiplication and
//! divided by their content, so no fractions appear during the forward pass.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;
type IntRow = BTreeMap<usize, BigInt>;

fn to_primitive_int(row: &SparseRow) -> IntRow {
    let lcm = row.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut out: IntRow = row
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(&k, c)| (k, c.numer() * (&lcm / c.denom())))
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    row.retain(|_, v| !v.is_zero());
    let g = row.values().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return;
    }
    let neg = row.values().next().map(|v| v.is_negative()).unwrap_or(false);
    let g = if neg { -g } else { g };
    if !g.is_one() {
        for v in row.values_mut() {
            *v = &*v / &g;
        }
    }
}

/// Incremental echelon form over the integers.
#[derive(Clone, Debug)]
pub struct RowReducer {
    ncols: usize,
    pivots: BTreeMap<usize, IntRow>,
}

impl RowReducer {
    pub fn new(ncols: usize) -> Self {
        RowReducer { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    fn reduce(&self, mut row: IntRow) -> IntRow {
        loop {
            let hit = row
                .iter()
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(&c, v)| (c, v.clone()));
            let Some((col, val)) = hit else { break };
            let p = &self.pivots[&col];
            let lead = &p[&col];
            let g = lead.gcd(&val);
            let (a, b) = (lead / &g, &val / &g);
            for v in row.values_mut() {
                *v *= &a;
            }
            for (k, pv) in p {
                let e = row.entry(*k).or_insert_with(BigInt::zero);
                *e -= &b * pv;
            }
            make_primitive(&mut row);
        }
        row
    }

    /// Adds a row; returns `true` when it was independent of the previous ones.
    pub fn insert(&mut self, row: &SparseRow) -> bool {
        let r = self.reduce(to_primitive_int(row));
        match r.keys().next().copied() {
            None => false,
            Some(c) => {
                self.pivots.insert(c, r);
                true
            }
        }
    }

    pub fn is_in_span(&self, row: &SparseRow) -> bool {
        self.reduce(to_primitive_int(row)).is_empty()
    }

    /// Reduced row echelon form with unit pivots, keyed by pivot column.
    pub fn rref(&self) -> BTreeMap<usize, SparseRow> {
        let mut rows: BTreeMap<usize, SparseRow> = self
            .pivots
            .iter()
            .map(|(&c, r)| {
                let lead = Rational::from_integer(r[&c].clone());
                (c, r.iter().map(|(&k, v)| (k, Rational::from_integer(v.clone()) / &lead)).collect())
            })
            .collect();
        let cols: Vec<usize> = rows.keys().rev().copied().collect();
        for &c in &cols {
            let pr = rows[&c].clone();
            for (&other, r) in rows.iter_mut() {
                if other >= c {
                    continue;
                }
                if let Some(f) = r.get(&c).cloned() {
                    for (k, v) in &pr {
                        let e = r.entry(*k).or_insert_with(Rational::zero);
                        *e -= &f * v;
                    }
                    r.retain(|_, v| !v.is_zero());
                }
            }
        }
        rows
    }

    /// Null space basis, one vector per free column in increasing order,
    /// each scaled to primitive integers with first nonzero entry positive.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let rref = self.rref();
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if rref.contains_key(&f) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.ncols];
            v[f] = Rational::one();
            for (&c, r) in &rref {
                if let Some(x) = r.get(&f) {
                    v[c] = -x.clone();
                }
            }
            out.push(primitive_vector(&v));
        }
        out
    }
}

/// Scales a rational vector to coprime integers with first nonzero entry positive.
pub fn primitive_vector(v: &[Rational]) -> Vec<Rational> {
    let row: SparseRow = v.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    let ints = to_primitive_int(&row);
    let mut out = vec![Rational::zero(); v.len()];
    for (k, x) in ints {
        out[k] = Rational::from_integer(x);
    }
    out
}

pub fn null_space(rows: &[SparseRow], ncols: usize) -> Vec<Vec<Rational>> {
    let mut r = RowReducer::new(ncols);
    for row in rows {
        r.insert(row);
    }
    r.null_space()
}

pub fn rank(rows: &[SparseRow], ncols: usize) -> usize {
    let mut r = RowReducer::new(ncols);
    rows.iter().filter(|row| r.insert(row)).count()
}

/// Solves `Σ_c row[c] x_c = rhs` for all equations; free variables are set
/// to zero. Returns `None` when the system is inconsistent.
pub fn solve(equations: &[(SparseRow, Rational)], ncols: usize) -> Option<Vec<Rational>> {
    let mut r = RowReducer::new(ncols + 1);
    for (row, rhs) in equations {
        let mut aug = row.clone();
        if !rhs.is_zero() {
            aug.insert(ncols, rhs.clone());
        }
        r.insert(&aug);
    }
    let rref = r.rref();
    if rref.contains_key(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (&c, row) in &rref {
        if let Some(v) = row.get(&ncols) {
            x[c] = v.clone();
        }
    }
    Some(x)
}

/// Numeric null space via SVD. Singular values at most `tol * max(1, σ_max)`
/// count as zero. Returns the basis and the full singular spectrum.
pub fn numeric_null_space(rows: &[Vec<f64>], ncols: usize, tol: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    if ncols == 0 {
        return (Vec::new(), Vec::new());
    }
    let m = rows.len().max(ncols);
    let mut a = nalgebra::DMatrix::<f64>::zeros(m, ncols);
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate().take(ncols) {
            a[(i, j)] = v;
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sigma.iter().cloned().fold(0.0, f64::max).max(1.0);
    let mut basis = Vec::new();
    for (k, &s) in sigma.iter().enumerate() {
        if s <= tol * smax {
            basis.push(vt.row(k).iter().copied().collect());
        }
    }
    let mut spectrum = sigma;
    spectrum.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (basis, spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn row(entries: &[(usize, Rational)]) -> SparseRow {
        entries.iter().cloned().collect()
    }

    #[test]
    fn null_space_of_rank_one() {
        // x + 2y - z = 0
        let rows = vec![row(&[(0, int(1)), (1, int(2)), (2, int(-1))])];
        let ns = null_space(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s = &v[0] + &(&v[1] * int(2)) - &v[2];
            assert!(s.is_zero());
        }
        // canonical: free column 1 -> (-2, 1, 0) -> primitive with positive first entry
        assert_eq!(ns[0], vec![int(2), int(-1), int(0)]);
        assert_eq!(ns[1], vec![int(1), int(0), int(1)]);
    }

    #[test]
    fn rank_and_span() {
        let rows = vec![
            row(&[(0, frac(1, 2)), (1, int(1))]),
            row(&[(0, int(1)), (1, int(2))]),
            row(&[(2, int(3))]),
        ];
        assert_eq!(rank(&rows, 3), 2);
        let mut r = RowReducer::new(3);
        r.insert(&rows[0]);
        assert!(r.is_in_span(&rows[1]));
        assert!(!r.is_in_span(&rows[2]));
    }

    #[test]
    fn solve_consistent_and_not() {
        let eqs = vec![(row(&[(0, int(1)), (1, int(1))]), int(3)), (row(&[(0, int(1)), (1, int(-1))]), int(1))];
        assert_eq!(solve(&eqs, 2).unwrap(), vec![int(2), int(1)]);
        let bad = vec![(row(&[(0, int(1))]), int(1)), (row(&[(0, int(2))]), int(3))];
        assert!(solve(&bad, 1).is_none());
    }

    #[test]
    fn numeric_matches_exact() {
        let rows = vec![vec![1.0, 2.0, -1.0], vec![2.0, 4.0, -2.0]];
        let (basis, spec) = numeric_null_space(&rows, 3, 1e-9);
        assert_eq!(basis.len(), 2);
        assert_eq!(spec.len(), 3);
        for v in basis {
            assert!((v[0] + 2.0 * v[1] - v[2]).abs() < 1e-12);
        }
    }
}
