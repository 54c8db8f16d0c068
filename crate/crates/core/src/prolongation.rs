//! Tanaka prolongation: strata `g_0, g_{-1}, …` of degree-`k` derivations of
//! `g`, computed as exact null spaces and glued onto the structure constants.
//!
//! A stratum element `φ` acts by `[φ, X] = −[X, φ] = φ(X)` for `X ∈ g`, and
//! two prolongation elements bracket by `[φ, ψ](X) = [[φ, X], ψ] + [φ, [ψ, X]]`.
//! New strata receive the indices just below the current lowest one, so the
//! first element of `g_0` computed for an algebra with `m` zero-degree
//! elements is `X_{1-m}` and the last is `X_0`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{GradedLieAlgebra, LieVec};
use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{self, SparseRow};
use crate::rational::Rational;

/// Default number of nonpositive strata attempted by [`prolong`].
pub const DEFAULT_MAX_DEPTH: usize = 8;

/// How a matrix supplied by the user acts on `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    /// `[φ, X] = M X`.
    #[default]
    Left,
    /// `[X, φ] = M X`, i.e. the stored element is `−M`.
    Right,
}

/// A user-chosen basis of one stratum, given by restrictions to `g_1`.
///
/// `elements[e][row][col]`: column `col` is the image of the `col`-th
/// degree-one generator, written in the basis of the target degree
/// (`degree + 1`) in increasing index order.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumBasis {
    pub degree: i32,
    pub action: Action,
    pub elements: Vec<Vec<Vec<Rational>>>,
}

/// One computed stratum; `maps[e][a-1]` is the image of `X_a` under the
/// `e`-th basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct Stratum {
    pub degree: i32,
    pub ids: Vec<i64>,
    pub maps: Vec<Vec<LieVec>>,
}

impl Stratum {
    pub fn dim(&self) -> usize {
        self.maps.len()
    }
}

#[derive(Clone, Debug)]
pub struct ProlongedAlgebra {
    base: GradedLieAlgebra,
    algebra: GradedLieAlgebra,
    strata: Vec<Stratum>,
    terminated: bool,
}

impl ProlongedAlgebra {
    /// `g` alone, with no prolongation attached.
    pub fn trivial(base: &GradedLieAlgebra) -> ProlongedAlgebra {
        let base = base.positive_part();
        ProlongedAlgebra { algebra: base.clone(), base, strata: Vec::new(), terminated: false }
    }

    /// Wraps an algebra whose nonpositive part is already known (loaded
    /// from a file or assembled from products). Strata are read off the
    /// brackets `[X_p, X_a]`.
    pub fn from_graded(algebra: GradedLieAlgebra) -> Result<ProlongedAlgebra> {
        let base = algebra.positive_part();
        let n = base.n() as i64;
        let mut degrees: Vec<i32> = algebra.ids().filter(|&i| i <= 0).map(|i| algebra.degree(i).expect("stored")).collect();
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        degrees.dedup();
        let mut strata = Vec::new();
        for (expected, &d) in (0..).map(|k: i32| -k).zip(&degrees) {
            if d != expected {
                return Err(Error::Structural(format!("prolongation degrees skip from {} to {d}", expected + 1)));
            }
            let ids = algebra.ids_of_degree(d);
            let maps = ids
                .iter()
                .map(|&p| (1..=n).map(|a| algebra.bracket_basis(p, a)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            strata.push(Stratum { degree: d, ids, maps });
        }
        Ok(ProlongedAlgebra { base, algebra, strata, terminated: false })
    }

    pub fn base(&self) -> &GradedLieAlgebra {
        &self.base
    }

    /// The extended algebra over all stored indices.
    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.algebra
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// Dimensions of `g_0, g_{-1}, …` as computed (a trailing zero means
    /// the prolongation ended).
    pub fn dims(&self) -> Vec<usize> {
        self.strata.iter().map(Stratum::dim).collect()
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    /// True when the last computed stratum is nonzero.
    pub fn possibly_infinite(&self) -> bool {
        !self.terminated && !self.strata.is_empty()
    }

    fn next_degree(&self) -> i32 {
        self.strata.last().map(|s| s.degree - 1).unwrap_or(0)
    }
}

/// Prolongs `a` stratum by stratum for `k = 0, −1, …, −max_depth`, stopping
/// at the first zero stratum.
pub fn prolong(a: &GradedLieAlgebra, max_depth: usize) -> Result<ProlongedAlgebra> {
    prolong_with(a, max_depth, &[])
}

/// As [`prolong`], using the supplied bases where given.
pub fn prolong_with(a: &GradedLieAlgebra, max_depth: usize, bases: &[StratumBasis]) -> Result<ProlongedAlgebra> {
    let mut p = ProlongedAlgebra::trivial(a);
    for step in 0..=max_depth {
        let k = -(step as i32);
        let stratum = compute_stratum(&p, k)?;
        let chosen = bases.iter().find(|b| b.degree == k);
        p = extend_structure_constants(&p, &stratum, chosen)?;
        if p.terminated {
            break;
        }
    }
    if let Some(b) = bases.iter().find(|b| b.degree < 0 && -(b.degree as i64) > max_depth as i64) {
        return Err(Error::InvalidArgument(format!("basis given for degree {} beyond the requested depth", b.degree)));
    }
    Ok(p)
}

/// Unknown layout: for each positive `a`, one unknown per target of degree
/// `d(a) + k`.
struct Layout {
    offsets: Vec<usize>,
    targets: Vec<Vec<i64>>,
    total: usize,
}

impl Layout {
    fn new(alg: &GradedLieAlgebra, k: i32) -> Layout {
        let n = alg.n();
        let mut offsets = Vec::with_capacity(n);
        let mut targets = Vec::with_capacity(n);
        let mut total = 0;
        for a in 1..=n as i64 {
            let d = alg.degree(a).expect("positive index") + k;
            let t = alg.ids_of_degree(d);
            offsets.push(total);
            total += t.len();
            targets.push(t);
        }
        Layout { offsets, targets, total }
    }

    fn unknown(&self, a: i64, target: i64) -> Option<usize> {
        let i = (a - 1) as usize;
        self.targets[i].iter().position(|&t| t == target).map(|p| self.offsets[i] + p)
    }

    fn to_maps(&self, v: &[Rational]) -> Vec<LieVec> {
        self.targets
            .iter()
            .enumerate()
            .map(|(i, ts)| {
                ts.iter()
                    .enumerate()
                    .filter(|(p, _)| !v[self.offsets[i] + p].is_zero())
                    .map(|(p, &t)| (t, v[self.offsets[i] + p].clone()))
                    .collect()
            })
            .collect()
    }

    fn from_maps(&self, maps: &[LieVec]) -> SparseRow {
        let mut out = SparseRow::new();
        for (i, img) in maps.iter().enumerate() {
            for (t, c) in img {
                if let Some(u) = self.unknown(i as i64 + 1, *t) {
                    out.insert(u, c.clone());
                }
            }
        }
        out
    }
}

/// Derivation equations on all pairs `a < c` of `g`, one row per output
/// component, for maps of degree `k`.
fn derivation_rows(alg: &GradedLieAlgebra, layout: &Layout, k: i32) -> Vec<SparseRow> {
    let n = alg.n() as i64;
    let pairs: Vec<(i64, i64)> = (1..=n).flat_map(|a| (a + 1..=n).map(move |c| (a, c))).collect();
    let per_pair = exec::map(&pairs, |&(a, c)| {
        let mut rows: BTreeMap<i64, SparseRow> = BTreeMap::new();
        let mut add = |t: i64, u: usize, coef: Rational| {
            let e = rows.entry(t).or_default().entry(u).or_insert_with(Rational::zero);
            *e += coef;
        };
        // φ([X_a, X_c]) = Σ_e c_{ac}^e Σ_t u_{et} X_t
        for (e, ce) in alg.bracket_basis(a, c).expect("stored") {
            for (p, &t) in layout.targets[(e - 1) as usize].iter().enumerate() {
                add(t, layout.offsets[(e - 1) as usize] + p, ce.clone());
            }
        }
        // − [φ X_a, X_c] − [X_a, φ X_c]
        for (p, &b) in layout.targets[(a - 1) as usize].iter().enumerate() {
            for (t, cc) in alg.bracket_basis(b, c).expect("stored") {
                add(t, layout.offsets[(a - 1) as usize] + p, -cc);
            }
        }
        for (p, &b) in layout.targets[(c - 1) as usize].iter().enumerate() {
            for (t, cc) in alg.bracket_basis(a, b).expect("stored") {
                add(t, layout.offsets[(c - 1) as usize] + p, -cc);
            }
        }
        let _ = k;
        rows.into_values()
            .map(|mut r| {
                r.retain(|_, c| !c.is_zero());
                r
            })
            .filter(|r| !r.is_empty())
            .collect::<Vec<_>>()
    });
    per_pair.into_iter().flatten().collect()
}

/// Canonical basis of the degree-`k` stratum; all strata of degree above `k`
/// must already be attached to `p`.
pub fn compute_stratum(p: &ProlongedAlgebra, k: i32) -> Result<Stratum> {
    if k > 0 {
        return Err(Error::InvalidArgument(format!("stratum degree must be nonpositive, got {k}")));
    }
    if k != p.next_degree() {
        return Err(Error::InvalidArgument(format!(
            "stratum {k} requested but the next uncomputed stratum is {}",
            p.next_degree()
        )));
    }
    if p.terminated {
        return Ok(Stratum { degree: k, ids: Vec::new(), maps: Vec::new() });
    }
    let alg = &p.algebra;
    let layout = Layout::new(alg, k);
    let rows = derivation_rows(alg, &layout, k);
    let basis = linalg::null_space(&rows, layout.total);
    let maps = basis.iter().map(|v| layout.to_maps(v)).collect();
    Ok(Stratum { degree: k, ids: Vec::new(), maps })
}

/// Full derivations matching a user basis given on `g_1`.
fn lift_chosen(alg: &GradedLieAlgebra, stratum: &Stratum, chosen: &StratumBasis) -> Result<Vec<Vec<LieVec>>> {
    let g1 = alg.ids_of_degree(1);
    let targets = alg.ids_of_degree(stratum.degree + 1);
    if chosen.elements.len() != stratum.dim() {
        return Err(Error::Structural(format!(
            "stratum {} has dimension {} but {} basis elements were supplied",
            stratum.degree,
            stratum.dim(),
            chosen.elements.len()
        )));
    }
    let sign = match chosen.action {
        Action::Left => Rational::one(),
        Action::Right => -Rational::one(),
    };
    // unknowns: coefficients on the canonical basis
    let mut out = Vec::new();
    let mut rank = linalg::RowReducer::new(stratum.dim());
    for (e, m) in chosen.elements.iter().enumerate() {
        if m.len() != targets.len() || m.iter().any(|row| row.len() != g1.len()) {
            return Err(Error::DimensionMismatch { expected: targets.len() * g1.len(), got: m.iter().map(Vec::len).sum() });
        }
        let mut eqs = Vec::new();
        for (col, &a) in g1.iter().enumerate() {
            for (row, &t) in targets.iter().enumerate() {
                let lhs: SparseRow = stratum
                    .maps
                    .iter()
                    .enumerate()
                    .filter_map(|(q, map)| map[(a - 1) as usize].get(&t).map(|c| (q, c.clone())))
                    .collect();
                eqs.push((lhs, &sign * &m[row][col]));
            }
        }
        let coef = linalg::solve(&eqs, stratum.dim()).ok_or_else(|| {
            Error::Structural(format!("supplied element {e} of stratum {} is not a derivation", stratum.degree))
        })?;
        let row: SparseRow = coef.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        if !rank.insert(&row) {
            return Err(Error::Structural(format!("supplied basis of stratum {} does not span it", stratum.degree)));
        }
        out.push(combine(&stratum.maps, &coef, alg.n()));
    }
    Ok(out)
}

fn combine(maps: &[Vec<LieVec>], coef: &[Rational], n: usize) -> Vec<LieVec> {
    let mut out = vec![LieVec::new(); n];
    for (map, c) in maps.iter().zip(coef) {
        if c.is_zero() {
            continue;
        }
        for (img, o) in map.iter().zip(out.iter_mut()) {
            for (t, x) in img {
                *o.entry(*t).or_insert_with(Rational::zero) += c * x;
            }
        }
    }
    for o in out.iter_mut() {
        o.retain(|_, c| !c.is_zero());
    }
    out
}

fn table_entries(alg: &GradedLieAlgebra) -> Vec<(i64, i64, i64, Rational)> {
    let dim = alg.dim();
    let mut out = Vec::new();
    for a in 0..dim {
        for b in 0..dim {
            for (k, c) in alg.bracket_slots(a, b) {
                out.push((alg.id_of(a), alg.id_of(b), alg.id_of(*k), c.clone()));
            }
        }
    }
    out
}

/// Attaches `stratum` (in the chosen basis if supplied) to `p`, adding the
/// brackets of its elements with `g` and every prolongation bracket landing
/// in it.
pub fn extend_structure_constants(
    p: &ProlongedAlgebra,
    stratum: &Stratum,
    chosen: Option<&StratumBasis>,
) -> Result<ProlongedAlgebra> {
    if stratum.degree != p.next_degree() {
        return Err(Error::InvalidArgument(format!("stratum {} does not follow the attached strata", stratum.degree)));
    }
    let m = stratum.degree;
    let n = p.base.n();
    if stratum.dim() == 0 {
        if chosen.map(|c| !c.elements.is_empty()).unwrap_or(false) {
            return Err(Error::Structural(format!("stratum {m} is zero but a basis was supplied")));
        }
        let mut q = p.clone();
        q.strata.push(Stratum { degree: m, ids: Vec::new(), maps: Vec::new() });
        q.terminated = true;
        let alg = &p.algebra;
        q.algebra = GradedLieAlgebra::from_raw_table(
            alg.min_id(),
            alg.slot_degrees().to_vec(),
            alg.raw_table().to_vec(),
            None,
        );
        return Ok(q);
    }
    let maps = match chosen {
        Some(c) => lift_chosen(&p.algebra, stratum, c)?,
        None => stratum.maps.clone(),
    };
    let old = &p.algebra;
    let dim = maps.len();
    let new_min = old.min_id() - dim as i64;
    let ids: Vec<i64> = (new_min..old.min_id()).collect();
    let mut degrees = vec![m; dim];
    degrees.extend_from_slice(old.slot_degrees());
    let mut entries = table_entries(old);
    for (id, map) in ids.iter().zip(&maps) {
        for (a, img) in map.iter().enumerate() {
            for (t, c) in img {
                entries.push((*id, a as i64 + 1, *t, c.clone()));
                entries.push((a as i64 + 1, *id, *t, -c.clone()));
            }
        }
    }
    let partial = GradedLieAlgebra::with_prolongation(new_min, degrees.clone(), entries.clone(), Some(m))?;

    // prolongation pairs whose bracket lands in the new stratum
    let layout = Layout::new(&partial, m);
    let basis_rows: Vec<SparseRow> = maps.iter().map(|mp| layout.from_maps(mp)).collect();
    let pairs: Vec<(i64, i64)> = partial
        .ids()
        .filter(|&q| q <= 0)
        .flat_map(|q1| {
            let partial = &partial;
            partial.ids().filter(move |&q2| q2 > q1 && q2 <= 0).map(move |q2| (q1, q2))
        })
        .filter(|&(q1, q2)| partial.degree(q1).unwrap() + partial.degree(q2).unwrap() == m)
        .collect();
    let brackets = exec::map(&pairs, |&(q1, q2)| -> Result<Vec<(i64, i64, i64, Rational)>> {
        let mut image = Vec::with_capacity(n);
        for a in 1..=n as i64 {
            let xa = partial.basis_vec(a)?;
            let e1 = partial.basis_vec(q1)?;
            let e2 = partial.basis_vec(q2)?;
            let mut v = partial.bracket(&partial.bracket(&e1, &xa)?, &e2)?;
            for (t, c) in partial.bracket(&e1, &partial.bracket(&e2, &xa)?)? {
                *v.entry(t).or_insert_with(Rational::zero) += c;
            }
            v.retain(|_, c| !c.is_zero());
            image.push(v);
        }
        let target = layout.from_maps(&image);
        let mut eqs: Vec<(SparseRow, Rational)> = Vec::new();
        for u in 0..layout.total {
            let lhs: SparseRow = basis_rows
                .iter()
                .enumerate()
                .filter_map(|(e, r)| r.get(&u).map(|c| (e, c.clone())))
                .collect();
            let rhs = target.get(&u).cloned().unwrap_or_else(Rational::zero);
            if !lhs.is_empty() || !rhs.is_zero() {
                eqs.push((lhs, rhs));
            }
        }
        let coef = linalg::solve(&eqs, dim).ok_or_else(|| {
            Error::Structural(format!("[X_{q1}, X_{q2}] is not in the span of stratum {m}"))
        })?;
        let mut out = Vec::new();
        for (e, c) in coef.into_iter().enumerate() {
            if !c.is_zero() {
                out.push((q1, q2, ids[e], c.clone()));
                out.push((q2, q1, ids[e], -c));
            }
        }
        Ok(out)
    });
    for b in brackets {
        entries.extend(b?);
    }
    let algebra = GradedLieAlgebra::with_prolongation(new_min, degrees, entries, Some(m))?;
    let mut q = p.clone();
    q.algebra = algebra;
    q.strata.push(Stratum { degree: m, ids, maps });
    Ok(q)
}
