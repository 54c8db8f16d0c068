//! Abnormal varieties, corank detection, the minor system and the Goh test.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::algebra::{GradedLieAlgebra, MultiIndex};
use crate::error::{Error, Result};
use crate::exec;
use crate::extremal::ExtremalFamily;
use crate::linalg::{self, SparseRow};
use crate::poly::Poly;
use crate::prolongation::ProlongedAlgebra;
use crate::rational::{self, Rational};

/// Indices `j` whose `P_j^v` cut out the abnormal variety: every stored `j`
/// with `d(j) ≤ 1`, plus the degree-2 indices when `rank_two_reduction` is
/// set and the rank is 2.
pub fn generator_indices(fam: &ExtremalFamily, rank_two_reduction: bool) -> Vec<i64> {
    let alg = fam.algebra();
    let top = if rank_two_reduction && alg.rank() == 2 { 2 } else { 1 };
    fam.indices().filter(|&j| alg.degree(j).expect("stored") <= top).collect()
}

fn check_nonzero(v: &[Rational]) -> Result<()> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::InvalidArgument("covector v must be nonzero".into()));
    }
    Ok(())
}

/// `(j, P_j^v)` for every generator index.
pub fn variety_generators(fam: &ExtremalFamily, v: &[Rational], rank_two_reduction: bool) -> Result<Vec<(i64, Poly)>> {
    check_nonzero(v)?;
    generator_indices(fam, rank_two_reduction)
        .into_iter()
        .map(|j| Ok((j, fam.polynomial(j, v)?)))
        .collect()
}

/// Exact membership of rational samples in `Z_v`; returns the largest
/// `|P_j^v(x)|` seen.
pub fn membership(fam: &ExtremalFamily, v: &[Rational], samples: &[Vec<Rational>]) -> Result<(bool, Rational)> {
    let gens = variety_generators(fam, v, false)?;
    let mut worst = Rational::zero();
    for x in samples {
        for (_, p) in &gens {
            let r = p.evaluate(x)?.abs();
            if r > worst {
                worst = r;
            }
        }
    }
    Ok((worst.is_zero(), worst))
}

/// Floating membership with tolerance `tol`.
pub fn membership_f64(fam: &ExtremalFamily, v: &[f64], samples: &[Vec<f64>], tol: f64) -> Result<(bool, f64)> {
    if v.iter().all(|x| *x == 0.0) {
        return Err(Error::InvalidArgument("covector v must be nonzero".into()));
    }
    let mut worst = 0.0f64;
    for j in generator_indices(fam, false) {
        for x in samples {
            worst = worst.max(fam.eval_p_f64(j, v, x)?.abs());
        }
    }
    Ok((worst <= tol, worst))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    /// Basis of the covectors `v` whose variety contains every sample.
    pub basis: Vec<Vec<Rational>>,
    /// Lower bound on the corank of an abnormal extremal through the samples.
    pub corank_lower_bound: usize,
    /// Set when the samples are too few to pin down the variety; the result
    /// then over-approximates.
    pub few_samples: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericDetection {
    pub basis: Vec<Vec<f64>>,
    pub spectrum: Vec<f64>,
    pub corank_lower_bound: usize,
    pub few_samples: bool,
}

fn with_origin<T: Clone + Zero>(samples: &[Vec<T>], n: usize) -> (Vec<Vec<T>>, usize) {
    let mut out: Vec<Vec<T>> = samples.to_vec();
    if !out.iter().any(|x| x.iter().all(Zero::is_zero)) {
        out.insert(0, vec![T::zero(); n]);
    }
    let nonorigin = out.iter().filter(|x| !x.iter().all(Zero::is_zero)).count();
    (out, nonorigin)
}

fn too_few(fam: &ExtremalFamily, nonorigin: usize) -> bool {
    nonorigin < fam.algebra().step() as usize
}

/// Stacks `Σ_k v_k Q_{jk}(x_m) = 0` over generators and samples (the origin
/// is always included) and returns the exact solution space.
pub fn detect_abnormal(fam: &ExtremalFamily, samples: &[Vec<Rational>]) -> Result<Detection> {
    let n = fam.n();
    let (samples, nonorigin) = with_origin(samples, n);
    let gens = generator_indices(fam, false);
    let jobs: Vec<(i64, &Vec<Rational>)> = gens.iter().flat_map(|&j| samples.iter().map(move |x| (j, x))).collect();
    let rows = exec::map(&jobs, |&(j, x)| -> Result<SparseRow> {
        let row = fam.q_row(j)?;
        let mut out = SparseRow::new();
        for (k, q) in row.iter().enumerate() {
            if !q.is_zero() {
                let val = q.evaluate(x)?;
                if !val.is_zero() {
                    out.insert(k, val);
                }
            }
        }
        Ok(out)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let basis = linalg::null_space(&rows, n);
    Ok(Detection { corank_lower_bound: basis.len(), basis, few_samples: too_few(fam, nonorigin) })
}

/// Floating version with singular-value thresholding at `tol` (relative).
pub fn detect_abnormal_f64(fam: &ExtremalFamily, samples: &[Vec<f64>], tol: f64) -> Result<NumericDetection> {
    let n = fam.n();
    let (samples, nonorigin) = with_origin(samples, n);
    let gens = generator_indices(fam, false);
    let compiled: Vec<Vec<_>> = gens
        .iter()
        .map(|&j| fam.q_row(j).map(|row| row.iter().map(Poly::compile).collect()))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for row in &compiled {
        for x in &samples {
            if x.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: x.len() });
            }
            rows.push(row.iter().map(|q| q.eval(x)).collect::<Vec<f64>>());
        }
    }
    let (basis, spectrum) = linalg::numeric_null_space(&rows, n, tol);
    Ok(NumericDetection { corank_lower_bound: basis.len(), basis, spectrum, few_samples: too_few(fam, nonorigin) })
}

#[derive(Clone, Debug)]
pub struct Minor {
    pub rows: Vec<i64>,
    pub cols: Vec<i64>,
    pub det: Poly,
}

#[derive(Clone, Debug)]
pub struct MinorSystem {
    pub rows: Vec<i64>,
    pub cols: Vec<i64>,
    pub matrix: Vec<Vec<Poly>>,
    pub minors: Vec<Minor>,
    pub weights: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub monomial: MultiIndex,
    pub coeff: Rational,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Builds the matrix `Q_{jk}` (rows: generator indices; columns: `d(k) ≥ 2`,
/// or `d(k) ≥ 3` under the rank-two reduction) and all maximal square minors.
pub fn minor_system(fam: &ExtremalFamily, rank_two_reduction: bool) -> Result<MinorSystem> {
    let alg = fam.algebra();
    let reduce = rank_two_reduction && alg.rank() == 2;
    let rows = generator_indices(fam, rank_two_reduction);
    let min_col = if reduce { 3 } else { 2 };
    let cols: Vec<i64> = (1..=fam.n() as i64).filter(|&k| alg.degree(k).expect("stored") >= min_col).collect();
    let matrix: Vec<Vec<Poly>> = rows
        .iter()
        .map(|&j| cols.iter().map(|&k| fam.q(j, k).cloned()).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let size = rows.len().min(cols.len());
    let mut picks = Vec::new();
    for rs in subsets(rows.len(), size) {
        for cs in subsets(cols.len(), size) {
            picks.push((rs.clone(), cs));
        }
    }
    let minors = exec::map(&picks, |(rs, cs)| -> Result<Minor> {
        let sub: Vec<Vec<Poly>> = rs.iter().map(|&r| cs.iter().map(|&c| matrix[r][c].clone()).collect()).collect();
        Ok(Minor {
            rows: rs.iter().map(|&r| rows[r]).collect(),
            cols: cs.iter().map(|&c| cols[c]).collect(),
            det: bareiss_det(&sub)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(MinorSystem { rows, cols, matrix, minors, weights: fam.weights().to_vec() })
}

/// Fraction-free determinant over `Q[x]` with row pivoting.
pub fn bareiss_det(m: &[Vec<Poly>]) -> Result<Poly> {
    let size = m.len();
    if size == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if m.iter().any(|r| r.len() != size) {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    let nv = m[0][0].nvars();
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut prev = Poly::one(nv);
    let mut negate = false;
    for k in 0..size {
        if a[k][k].is_zero() {
            match (k + 1..size).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(Poly::zero(nv)),
            }
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.exact_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    Ok(if negate { -&det } else { det })
}

/// Cofactor expansion along the first row with memoised column sets.
pub fn laplace_det(m: &[Vec<Poly>]) -> Poly {
    fn go(m: &[Vec<Poly>], row: usize, mask: u64, memo: &mut HashMap<u64, Poly>) -> Poly {
        let size = m.len();
        if row == size {
            return Poly::one(m[0][0].nvars());
        }
        if let Some(p) = memo.get(&mask) {
            return p.clone();
        }
        let mut acc = Poly::zero(m[0][0].nvars());
        let mut sign = 1;
        for c in 0..size {
            if mask & (1 << c) != 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let sub = go(m, row + 1, mask | (1 << c), memo);
                let term = &m[row][c] * &sub;
                if sign > 0 {
                    acc.add_assign_poly(&term);
                } else {
                    acc.add_assign_poly(&-&term);
                }
            }
            sign = -sign;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    go(m, 0, 0, &mut HashMap::new())
}

/// For each minor, one monomial with nonzero coefficient: the one with the
/// fewest factors, ties broken by canonical order. `None` for zero minors.
pub fn nonvanishing_certificate(ms: &MinorSystem) -> Vec<Option<Certificate>> {
    ms.minors
        .iter()
        .map(|m| {
            m.det
                .canonical_terms(&ms.weights)
                .into_iter()
                .min_by_key(|(a, _)| a.order())
                .map(|(a, c)| Certificate { monomial: a.clone(), coeff: c.clone() })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GohReport {
    pub passed: bool,
    pub max_residual: f64,
    /// Index and sample position of the largest residual.
    pub worst: Option<(i64, usize)>,
}

/// Indices `i ≥ 1` with `d(i) ∈ {1, 2}`.
pub fn goh_indices(alg: &GradedLieAlgebra) -> Vec<i64> {
    (1..=alg.n() as i64).filter(|&i| matches!(alg.degree(i), Ok(1) | Ok(2))).collect()
}

/// Checks `P_i^v = 0` on every sample for all `i` with `d(i) ∈ {1, 2}`.
pub fn goh_check(fam: &ExtremalFamily, v: &[f64], samples: &[Vec<f64>], tol: f64) -> Result<GohReport> {
    if v.len() != fam.n() {
        return Err(Error::DimensionMismatch { expected: fam.n(), got: v.len() });
    }
    let idx = goh_indices(fam.algebra());
    let polys: Vec<(i64, _)> = idx
        .iter()
        .map(|&i| {
            let mut p = Poly::zero(fam.n());
            for (k, q) in fam.q_row(i)?.iter().enumerate() {
                if v[k] != 0.0 {
                    p.add_scaled(&rational::from_f64(v[k])?, q);
                }
            }
            Ok((i, p.compile()))
        })
        .collect::<Result<_>>()?;
    let per_sample = exec::map(samples, |x| {
        polys
            .iter()
            .map(|(i, p)| (p.eval(x).abs(), *i))
            .fold((0.0f64, None), |acc, (r, i)| if r > acc.0 { (r, Some(i)) } else { acc })
    });
    let mut report = GohReport { passed: true, max_residual: 0.0, worst: None };
    for (m, (r, i)) in per_sample.into_iter().enumerate() {
        if r > report.max_residual {
            report.max_residual = r;
            report.worst = i.map(|i| (i, m));
        }
    }
    report.passed = report.max_residual <= tol;
    Ok(report)
}

/// Exact Goh check on rational samples.
pub fn goh_check_exact(fam: &ExtremalFamily, v: &[Rational], samples: &[Vec<Rational>]) -> Result<bool> {
    for i in goh_indices(fam.algebra()) {
        let p = fam.polynomial(i, v)?;
        for x in samples {
            if !p.evaluate(x)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Direct product with index embeddings `embed_a[i - min_id]` etc.
#[derive(Clone, Debug)]
pub struct Product {
    pub algebra: ProlongedAlgebra,
    /// Product index of each index of the first factor, in the order of
    /// that factor's ids.
    pub embed_a: Vec<i64>,
    pub embed_b: Vec<i64>,
}

/// `A ⊕ B` with `[A, B] = 0`. Within each degree the indices of `A` come
/// first; positive indices start at 1 and nonpositive ones end at 0.
pub fn product_group(a: &ProlongedAlgebra, b: &ProlongedAlgebra) -> Result<Product> {
    let (ga, gb) = (a.algebra(), b.algebra());
    let mut degs: Vec<i32> = ga.slot_degrees().iter().chain(gb.slot_degrees()).copied().collect();
    degs.sort();
    degs.dedup();
    let mut pos_order: Vec<(u8, i64)> = Vec::new();
    let mut neg_order: Vec<(u8, i64)> = Vec::new();
    for &d in &degs {
        for (tag, g) in [(0u8, ga), (1u8, gb)] {
            for id in g.ids_of_degree(d) {
                if id >= 1 {
                    pos_order.push((tag, id));
                } else {
                    neg_order.push((tag, id));
                }
            }
        }
    }
    let mut map: HashMap<(u8, i64), i64> = HashMap::new();
    let n_neg = neg_order.len() as i64;
    for (p, key) in neg_order.iter().enumerate() {
        map.insert(*key, p as i64 + 1 - n_neg);
    }
    for (p, key) in pos_order.iter().enumerate() {
        map.insert(*key, p as i64 + 1);
    }
    let min_id = 1 - n_neg;
    let mut degrees = vec![0; neg_order.len() + pos_order.len()];
    let mut entries = Vec::new();
    for (tag, g) in [(0u8, ga), (1u8, gb)] {
        for id in g.ids() {
            degrees[(map[&(tag, id)] - min_id) as usize] = g.degree(id)?;
        }
        let dim = g.dim();
        for s in 0..dim {
            for t in 0..dim {
                for (k, c) in g.bracket_slots(s, t) {
                    entries.push((
                        map[&(tag, g.id_of(s))],
                        map[&(tag, g.id_of(t))],
                        map[&(tag, g.id_of(*k))],
                        c.clone(),
                    ));
                }
            }
        }
    }
    let cutoff = match (ga.cutoff(), gb.cutoff()) {
        (None, None) => None,
        (x, y) => x.max(y),
    };
    let algebra = GradedLieAlgebra::with_prolongation(min_id, degrees, entries, cutoff)?;
    let embed = |tag: u8, g: &GradedLieAlgebra| g.ids().map(|id| map[&(tag, id)]).collect();
    Ok(Product {
        algebra: ProlongedAlgebra::from_graded(algebra)?,
        embed_a: embed(0, ga),
        embed_b: embed(1, gb),
    })
}

/// Covector `v` supported on degrees `≥ min_degree` whose polynomials
/// `P_j^v`, `j` in `targets`, equal the given polynomials; free parameters
/// are set to zero.
pub fn solve_covector(fam: &ExtremalFamily, targets: &[(i64, Poly)], min_degree: i32) -> Result<Option<Vec<Rational>>> {
    let n = fam.n();
    let alg = fam.algebra();
    let allowed: Vec<usize> = (0..n).filter(|&k| alg.degree(k as i64 + 1).map(|d| d >= min_degree).unwrap_or(false)).collect();
    let mut eqs: Vec<(SparseRow, Rational)> = Vec::new();
    for (j, target) in targets {
        let row = fam.q_row(*j)?;
        let mut monos: Vec<&MultiIndex> = target.terms().map(|(a, _)| a).collect();
        for &k in &allowed {
            monos.extend(row[k].terms().map(|(a, _)| a));
        }
        monos.sort();
        monos.dedup();
        for a in monos {
            let lhs: SparseRow = allowed
                .iter()
                .filter_map(|&k| {
                    let c = row[k].coeff(a);
                    (!c.is_zero()).then_some((k, c))
                })
                .collect();
            eqs.push((lhs, target.coeff(a)));
        }
    }
    Ok(linalg::solve(&eqs, n).map(|v| {
        let mut v = v;
        for (k, x) in v.iter_mut().enumerate() {
            if !allowed.contains(&k) {
                *x = Rational::zero();
            }
        }
        v
    }))
}

/// Maximum absolute coefficient of a minor, for compact reports.
pub fn det_size(p: &Poly) -> (usize, Rational) {
    (p.len(), p.terms().map(|(_, c)| c.abs()).fold(Rational::zero(), |a, c| if c > a { c } else { a }))
}

/// Sign helper used by reports: `true` when some minor is nonzero.
pub fn any_nonzero(ms: &MinorSystem) -> bool {
    ms.minors.iter().any(|m| !m.det.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn p(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn bareiss_matches_laplace() {
        let n = 3;
        let m = vec![
            vec![p(n, 0), p(n, 1), Poly::one(n)],
            vec![Poly::zero(n), p(n, 2), &p(n, 0) * &p(n, 1)],
            vec![p(n, 1), Poly::constant(n, int(2)), p(n, 2)],
        ];
        assert_eq!(bareiss_det(&m).unwrap(), laplace_det(&m));
        let mut swapped = m.clone();
        swapped[0][0] = Poly::zero(n);
        assert_eq!(bareiss_det(&swapped).unwrap(), laplace_det(&swapped));
    }

    #[test]
    fn repeated_row_vanishes() {
        let n = 2;
        let r = vec![p(n, 0), p(n, 1)];
        assert!(bareiss_det(&[r.clone(), r]).unwrap().is_zero());
    }

    #[test]
    fn heisenberg_detection() {
        let fam = ExtremalFamily::of_algebra(&GradedLieAlgebra::heisenberg()).unwrap();
        let samples: Vec<Vec<Rational>> = [1, 2, 3].iter().map(|&t| vec![int(t), int(0), int(0)]).collect();
        let d = detect_abnormal(&fam, &samples).unwrap();
        assert!(d.basis.is_empty());
        let origin = detect_abnormal(&fam, &[]).unwrap();
        assert_eq!(origin.basis, vec![vec![int(0), int(0), int(1)]]);
        assert!(origin.few_samples);
    }

    #[test]
    fn zero_covector_rejected() {
        let fam = ExtremalFamily::of_algebra(&GradedLieAlgebra::heisenberg()).unwrap();
        assert!(variety_generators(&fam, &[int(0), int(0), int(0)], false).is_err());
    }
}
