//! The simply connected group of a stratified algebra, realised on `R^n` in
//! exponential coordinates of the second kind:
//! `x = exp(x_n X_n) · … · exp(x_1 X_1)`.
//!
//! All operations are generic over the coefficient ring, so the same code
//! runs on exact rationals, on polynomials in the coordinates and on floats.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::algebra::{Coeff, GradedLieAlgebra, LieVec};
use crate::error::{Error, Result};
use crate::exec;
use crate::poly::{Poly, PolyVectorField};
use crate::rational::{self, Rational};

/// BCH series as a Lie polynomial: `(word, c)` stands for `c` times the
/// right-nested bracket of the word, letter `0` = first argument.
type BchSeries = Vec<(Vec<u8>, Rational)>;

fn bch_series(depth: usize) -> Arc<BchSeries> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<BchSeries>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("bch cache").get(&depth) {
        return s.clone();
    }
    let series = Arc::new(compute_bch_series(depth));
    cache.lock().expect("bch cache").insert(depth, series.clone());
    series
}

type Assoc = BTreeMap<Vec<u8>, Rational>;

fn assoc_mul(a: &Assoc, b: &Assoc, depth: usize) -> Assoc {
    let mut out = Assoc::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > depth {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            *out.entry(w).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `log(e^X e^Y)` as an associative series, turned into right-nested brackets
/// by the Dynkin–Specht–Wever projection (divide by word length).
fn compute_bch_series(depth: usize) -> BchSeries {
    let mut z = Assoc::new();
    for p in 0..=depth {
        for q in 0..=depth - p {
            if p + q == 0 {
                continue;
            }
            let mut w = vec![0u8; p];
            w.extend(std::iter::repeat_n(1u8, q));
            let den = rational::factorial(p as u32) * rational::factorial(q as u32);
            z.insert(w, Rational::new(1.into(), den));
        }
    }
    let mut log = Assoc::new();
    let mut power = z.clone();
    for k in 1..=depth {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let c = rational::frac(sign, k as i64);
        for (w, v) in &power {
            *log.entry(w.clone()).or_insert_with(Rational::zero) += &c * v;
        }
        power = assoc_mul(&power, &z, depth);
    }
    log.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(w, c)| {
            let m = w.len() as i64;
            (w, c / rational::int(m))
        })
        .collect()
}

/// Formal first-order perturbation `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual<R> {
    pub re: R,
    pub eps: R,
}

impl<R: Coeff> Coeff for Dual<R> {
    fn zero_like(&self) -> Self {
        Dual { re: self.re.zero_like(), eps: self.re.zero_like() }
    }
    fn vanishes(&self) -> bool {
        self.re.vanishes() && self.eps.vanishes()
    }
    fn add_assign(&mut self, other: &Self) {
        self.re.add_assign(&other.re);
        self.eps.add_assign(&other.eps);
    }
    fn mul(&self, other: &Self) -> Self {
        let mut eps = self.re.mul(&other.eps);
        eps.add_assign(&self.eps.mul(&other.re));
        Dual { re: self.re.mul(&other.re), eps }
    }
    fn scale(&self, c: &Rational) -> Self {
        Dual { re: self.re.scale(c), eps: self.eps.scale(c) }
    }
}

#[derive(Clone, Debug)]
pub struct Group {
    alg: GradedLieAlgebra,
    series: Arc<BchSeries>,
}

fn neg<R: Coeff>(v: &[R]) -> Vec<R> {
    let m1 = -Rational::one();
    v.iter().map(|c| c.scale(&m1)).collect()
}

impl Group {
    /// Uses the positive part of `alg`; prolongation indices are ignored.
    pub fn new(alg: &GradedLieAlgebra) -> Result<Group> {
        let alg = alg.positive_part();
        if alg.n() == 0 {
            return Err(Error::InvalidArgument("empty algebra".into()));
        }
        let depth = alg.step().max(1) as usize;
        Ok(Group { series: bch_series(depth), alg })
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.alg
    }

    pub fn n(&self) -> usize {
        self.alg.n()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: len });
        }
        Ok(())
    }

    /// `log(exp(u) exp(w))` on dense coefficient vectors (slot `i-1` ↔ `X_i`).
    pub fn bch<R: Coeff>(&self, u: &[R], w: &[R]) -> Vec<R> {
        if w.iter().all(Coeff::vanishes) {
            return u.to_vec();
        }
        if u.iter().all(Coeff::vanishes) {
            return w.to_vec();
        }
        let mut out: Vec<R> = u.iter().map(|c| c.zero_like()).collect();
        let mut memo: HashMap<&[u8], Vec<R>> = HashMap::new();
        for (word, c) in self.series.iter() {
            let v = self.nested(word, u, w, &mut memo);
            for (o, x) in out.iter_mut().zip(&v) {
                if !x.vanishes() {
                    o.add_assign(&x.scale(c));
                }
            }
        }
        out
    }

    fn nested<'a, R: Coeff>(&self, word: &'a [u8], u: &[R], w: &[R], memo: &mut HashMap<&'a [u8], Vec<R>>) -> Vec<R> {
        if let Some(v) = memo.get(word) {
            return v.clone();
        }
        let letter = |l: u8| if l == 0 { u } else { w };
        let v = if word.len() == 1 {
            letter(word[0]).to_vec()
        } else {
            let tail = self.nested(&word[1..], u, w, memo);
            if tail.iter().all(Coeff::vanishes) {
                tail
            } else {
                self.alg.bracket_dense(letter(word[0]), &tail)
            }
        };
        memo.insert(word, v.clone());
        v
    }

    /// BCH on sparse coefficient maps over indices `1..=n`.
    pub fn bch_map(&self, u: &LieVec, w: &LieVec) -> Result<LieVec> {
        let (du, dw) = (self.alg.map_to_dense(u)?, self.alg.map_to_dense(w)?);
        Ok(self.alg.dense_to_map(&self.bch(&du, &dw)))
    }

    fn unit_times<R: Coeff>(&self, i: usize, c: &R) -> Vec<R> {
        let mut v: Vec<R> = (0..self.n()).map(|_| c.zero_like()).collect();
        v[i] = c.clone();
        v
    }

    /// Second-kind coordinates of `exp(u)`.
    pub fn to_second_kind<R: Coeff>(&self, u: &[R]) -> Vec<R> {
        let mut w = u.to_vec();
        let mut x = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let xi = w[i].clone();
            if !xi.vanishes() {
                w = self.bch(&w, &neg(&self.unit_times(i, &xi)));
            }
            x.push(xi);
        }
        x
    }

    /// The element of `g` whose exponential has second-kind coordinates `x`.
    pub fn from_second_kind<R: Coeff>(&self, x: &[R]) -> Vec<R> {
        let mut u: Vec<R> = x.iter().map(|c| c.zero_like()).collect();
        for i in (0..self.n()).rev() {
            if !x[i].vanishes() {
                u = self.bch(&u, &self.unit_times(i, &x[i]));
            }
        }
        u
    }

    pub fn mul<R: Coeff>(&self, x: &[R], y: &[R]) -> Vec<R> {
        self.to_second_kind(&self.bch(&self.from_second_kind(x), &self.from_second_kind(y)))
    }

    pub fn inverse<R: Coeff>(&self, x: &[R]) -> Vec<R> {
        self.to_second_kind(&neg(&self.from_second_kind(x)))
    }

    /// `x · exp(t X_i)`, `i` in `1..=n`.
    pub fn flow<R: Coeff>(&self, i: usize, t: &R, x: &[R]) -> Result<Vec<R>> {
        self.check_len(x.len())?;
        if i == 0 || i > self.n() {
            return Err(Error::UnknownIndex(i as i64));
        }
        Ok(self.mul(x, &self.unit_times(i - 1, t)))
    }

    /// Exact group law on rational coordinates.
    pub fn group_mul(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.mul(x, y))
    }

    /// `Ad_{exp(-a X_m)} z = Σ_k (-a)^k / k! ad_{X_m}^k z`.
    fn ad_exp_neg(&self, m: usize, a: &Poly, z: &[Poly]) -> Vec<Poly> {
        let mut out = z.to_vec();
        let mut term = z.to_vec();
        let mut a_pow = Poly::one(a.nvars());
        let m1 = -Rational::one();
        for k in 1..=self.alg.step() as i64 {
            // ad_{X_m} term = [X_m, term] = -[term, X_m]
            term = self.alg.bracket_with_basis(&term, m).iter().map(|p| p.scale(&m1)).collect();
            if term.iter().all(Poly::is_zero) {
                break;
            }
            a_pow = &a_pow * &a.scale(&m1);
            let coef = a_pow.scale(&Rational::new(1.into(), rational::factorial(k as u32)));
            for (o, t) in out.iter_mut().zip(&term) {
                if !t.is_zero() {
                    o.add_assign_poly(&(&coef * t));
                }
            }
        }
        out
    }

    /// `x^{-1} ∂x/∂x_j = Ad_{exp(-x_1X_1)} ⋯ Ad_{exp(-x_{j-1}X_{j-1})} X_j`.
    fn maurer_cartan_columns(&self) -> Vec<Vec<Poly>> {
        let n = self.n();
        exec::map_range(n, |j| {
            let mut col: Vec<Poly> = (0..n).map(|_| Poly::zero(n)).collect();
            col[j] = Poly::one(n);
            for m in (0..j).rev() {
                col = self.ad_exp_neg(m, &Poly::var(n, m), &col);
            }
            col
        })
    }

    /// Left-invariant fields `X_1, …, X_n` as polynomial vector fields.
    pub fn left_invariant_fields(&self) -> Vec<PolyVectorField> {
        let n = self.n();
        let cols = self.maurer_cartan_columns();
        exec::map_range(n, |i| {
            // Σ_j f_j col_j = X_i; col_j = X_j + (higher-degree terms)
            let mut residual: Vec<Poly> = (0..n).map(|_| Poly::zero(n)).collect();
            residual[i] = Poly::one(n);
            let mut f: Vec<Poly> = (0..n).map(|_| Poly::zero(n)).collect();
            for j in 0..n {
                let fj = residual[j].clone();
                if fj.is_zero() {
                    continue;
                }
                for (r, c) in residual.iter_mut().zip(&cols[j]) {
                    if !c.is_zero() {
                        r.add_assign_poly(&-&(&fj * c));
                    }
                }
                f[j] = fj;
            }
            PolyVectorField { coeffs: f }
        })
    }

    /// Same fields by differentiating `t ↦ x · exp(t X_i)` at `t = 0` with
    /// dual numbers. Much slower; kept for cross-checks on small groups.
    pub fn left_invariant_fields_by_differentiation(&self) -> Vec<PolyVectorField> {
        let n = self.n();
        let x: Vec<Dual<Poly>> = (0..n).map(|i| Dual { re: Poly::var(n, i), eps: Poly::zero(n) }).collect();
        (0..n)
            .map(|i| {
                let mut e: Vec<Dual<Poly>> = (0..n).map(|_| Dual { re: Poly::zero(n), eps: Poly::zero(n) }).collect();
                e[i].eps = Poly::one(n);
                let y = self.mul(&x, &e);
                PolyVectorField { coeffs: y.into_iter().map(|d| d.eps).collect() }
            })
            .collect()
    }
}

/// Converts a rational vector to floats.
pub fn to_f64_vec(x: &[Rational]) -> Vec<f64> {
    x.iter().map(rational::to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn heis() -> Group {
        Group::new(&GradedLieAlgebra::heisenberg()).unwrap()
    }

    #[test]
    fn bch_heisenberg() {
        let g = heis();
        let u = vec![int(2), int(0), int(0)];
        let w = vec![int(0), int(3), int(0)];
        // aX_1 + bX_2 - (ab/2) X_3
        assert_eq!(g.bch(&u, &w), vec![int(2), int(3), int(-3)]);
        let z = vec![frac(1, 2), int(-1), int(4)];
        assert!(g.bch(&z, &neg(&z)).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn second_kind_heisenberg() {
        let g = heis();
        assert_eq!(g.to_second_kind(&[int(1), int(1), int(0)]), vec![int(1), int(1), frac(-1, 2)]);
        let x = g.group_mul(&[int(1), int(0), int(0)], &[int(0), int(1), int(0)]).unwrap();
        assert_eq!(x, vec![int(1), int(1), int(-1)]);
    }

    #[test]
    fn heisenberg_fields() {
        let g = heis();
        let f = g.left_invariant_fields();
        let n = 3;
        assert_eq!(f[0], PolyVectorField::coordinate(n, 0));
        assert_eq!(f[1].coeffs, vec![Poly::zero(n), Poly::one(n), -&Poly::var(n, 0)]);
        assert_eq!(f, g.left_invariant_fields_by_differentiation());
    }
}
