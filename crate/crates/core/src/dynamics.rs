//! Fixed-step RK4 integration of horizontal curves, adjoint equations and
//! normal extremals, plus the numeric cross-checks built on them.
//!
//! Controls `h_1..h_r` drive `γ̇ = Σ_j h_j X_j(γ)`; the dual curve obeys
//! `λ̇_i = −Σ_k Σ_{j≤r} c_{ij}^k h_j λ_k`. Normal extremals close the loop
//! with `h_j = −λ_j`.

use std::sync::Arc;

use crate::abnormal::{self, goh_check, product_group, GohReport};
use crate::algebra::GradedLieAlgebra;
use crate::error::{Error, Result};
use crate::extremal::ExtremalFamily;
use crate::free_lie::FreeLie;
use crate::group::Group;
use crate::poly::{CompiledField, Poly, PolyVectorField};
use crate::prolongation::ProlongedAlgebra;
use crate::rational::{self, Rational};

/// Default RK4 step.
pub const DEFAULT_STEP: f64 = 1e-3;

type ControlFn = Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>;

#[derive(Clone)]
pub enum ControlPath {
    Constant(Vec<f64>),
    /// Piecewise-linear interpolation of samples; `times` ascending.
    Table { times: Vec<f64>, values: Vec<Vec<f64>> },
    Func { r: usize, f: ControlFn },
}

impl std::fmt::Debug for ControlPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ControlPath::Constant(h) => write!(f, "Constant({h:?})"),
            ControlPath::Table { times, .. } => write!(f, "Table({} samples)", times.len()),
            ControlPath::Func { r, .. } => write!(f, "Func(r = {r})"),
        }
    }
}

impl ControlPath {
    pub fn func(r: usize, f: impl Fn(f64, &mut [f64]) + Send + Sync + 'static) -> Self {
        ControlPath::Func { r, f: Arc::new(f) }
    }

    pub fn r(&self) -> usize {
        match self {
            ControlPath::Constant(h) => h.len(),
            ControlPath::Table { values, .. } => values.first().map(Vec::len).unwrap_or(0),
            ControlPath::Func { r, .. } => *r,
        }
    }

    pub fn eval(&self, t: f64, out: &mut [f64]) {
        match self {
            ControlPath::Constant(h) => out.copy_from_slice(h),
            ControlPath::Table { times, values } => {
                let p = times.partition_point(|&s| s <= t);
                if p == 0 {
                    out.copy_from_slice(&values[0]);
                } else if p == times.len() {
                    out.copy_from_slice(&values[p - 1]);
                } else {
                    let (t0, t1) = (times[p - 1], times[p]);
                    let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
                    for (k, o) in out.iter_mut().enumerate() {
                        *o = values[p - 1][k] * (1.0 - w) + values[p][k] * w;
                    }
                }
            }
            ControlPath::Func { f, .. } => f(t, out),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePath {
    pub times: Vec<f64>,
    pub gamma: Vec<Vec<f64>>,
    pub lambda: Option<Vec<Vec<f64>>>,
}

/// `t0, t0 + step, …, t1` (the last step absorbs rounding).
pub fn uniform_grid(t0: f64, t1: f64, step: f64) -> Vec<f64> {
    let m = ((t1 - t0) / step).round().max(1.0) as usize;
    (0..=m).map(|i| t0 + (t1 - t0) * i as f64 / m as f64).collect()
}

/// Classical RK4 over the nodes of `grid`.
pub fn rk4<F>(grid: &[f64], y0: &[f64], f: F) -> Vec<Vec<f64>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let d = y0.len();
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0.to_vec();
    out.push(y.clone());
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for w in grid.windows(2) {
        let (t, h) = (w[0], w[1] - w[0]);
        f(t, &y, &mut k1);
        for i in 0..d {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..d {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..d {
            tmp[i] = y[i] + h * k3[i];
        }
        f(t + h, &tmp, &mut k4);
        for i in 0..d {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(y.clone());
    }
    out
}

#[derive(Clone, Debug)]
pub struct Dynamics {
    n: usize,
    r: usize,
    fields: Vec<CompiledField>,
    /// `(i, j, k, c_{ij}^k)` for `j ≤ r`, zero-based.
    adjoint: Vec<(usize, usize, usize, f64)>,
}

impl Dynamics {
    pub fn new(alg: &GradedLieAlgebra) -> Result<Dynamics> {
        let fields = Group::new(alg)?.left_invariant_fields();
        Self::from_fields(alg, &fields)
    }

    /// Reuses already computed left-invariant fields.
    pub fn from_fields(alg: &GradedLieAlgebra, fields: &[PolyVectorField]) -> Result<Dynamics> {
        let g = alg.positive_part();
        let (n, r) = (g.n(), g.rank());
        if fields.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: fields.len() });
        }
        let mut adjoint = Vec::new();
        for i in 1..=n as i64 {
            for j in 1..=r as i64 {
                for (k, c) in g.bracket_basis(i, j)? {
                    adjoint.push(((i - 1) as usize, (j - 1) as usize, (k - 1) as usize, rational::to_f64(&c)));
                }
            }
        }
        Ok(Dynamics { n, r, fields: fields[..r].iter().map(PolyVectorField::compile).collect(), adjoint })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    fn check(&self, h: Option<&ControlPath>, x0: &[f64], l0: Option<&[f64]>) -> Result<()> {
        if let Some(h) = h {
            if h.r() != self.r {
                return Err(Error::DimensionMismatch { expected: self.r, got: h.r() });
            }
        }
        if x0.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x0.len() });
        }
        if let Some(l) = l0 {
            if l.len() != self.n {
                return Err(Error::DimensionMismatch { expected: self.n, got: l.len() });
            }
        }
        Ok(())
    }

    fn horizontal_rhs(&self, h: &[f64], x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (f, &hj) in self.fields.iter().zip(h) {
            f.accumulate(x, hj, out);
        }
    }

    fn adjoint_rhs(&self, h: &[f64], l: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(i, j, k, c) in &self.adjoint {
            out[i] -= c * h[j] * l[k];
        }
    }

    pub fn integrate_horizontal(&self, h: &ControlPath, x0: &[f64], grid: &[f64]) -> Result<CurvePath> {
        self.check(Some(h), x0, None)?;
        let mut hv = vec![0.0; self.r];
        let ys = rk4(grid, x0, |t, x, out| {
            let mut hv = hv.clone();
            h.eval(t, &mut hv);
            self.horizontal_rhs(&hv, x, out);
        });
        hv.clear();
        Ok(CurvePath { times: grid.to_vec(), gamma: ys, lambda: None })
    }

    /// Curve and dual curve driven by the same controls.
    pub fn integrate_adjoint(&self, h: &ControlPath, x0: &[f64], lambda0: &[f64], grid: &[f64]) -> Result<CurvePath> {
        self.check(Some(h), x0, Some(lambda0))?;
        let n = self.n;
        let y0: Vec<f64> = x0.iter().chain(lambda0).copied().collect();
        let ys = rk4(grid, &y0, |t, y, out| {
            let mut hv = vec![0.0; self.r];
            h.eval(t, &mut hv);
            let (o1, o2) = out.split_at_mut(n);
            self.horizontal_rhs(&hv, &y[..n], o1);
            self.adjoint_rhs(&hv, &y[n..], o2);
        });
        Ok(split(grid, ys, n))
    }

    /// Normal extremal: `h_j = −λ_j`.
    pub fn integrate_normal(&self, lambda0: &[f64], x0: &[f64], grid: &[f64]) -> Result<CurvePath> {
        self.check(None, x0, Some(lambda0))?;
        let n = self.n;
        let y0: Vec<f64> = x0.iter().chain(lambda0).copied().collect();
        let ys = rk4(grid, &y0, |_, y, out| {
            let hv: Vec<f64> = y[n..n + self.r].iter().map(|l| -l).collect();
            let (o1, o2) = out.split_at_mut(n);
            self.horizontal_rhs(&hv, &y[..n], o1);
            self.adjoint_rhs(&hv, &y[n..], o2);
        });
        Ok(split(grid, ys, n))
    }
}

fn split(grid: &[f64], ys: Vec<Vec<f64>>, n: usize) -> CurvePath {
    let (gamma, lambda) = ys.into_iter().map(|mut y| {
        let l = y.split_off(n);
        (y, l)
    }).unzip();
    CurvePath { times: grid.to_vec(), gamma, lambda: Some(lambda) }
}

/// `max_t |λ_i(t) − P_i^{λ(0)}(γ(t))|` for `i = 1..n`.
pub fn duality_check(fam: &ExtremalFamily, curve: &CurvePath) -> Result<Vec<f64>> {
    let lambda = curve
        .lambda
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("curve carries no dual coordinates".into()))?;
    let n = fam.n();
    let v = lambda.first().ok_or_else(|| Error::InvalidArgument("empty curve".into()))?.clone();
    let polys: Vec<_> = (1..=n as i64)
        .map(|i| {
            let mut p = Poly::zero(n);
            for (k, q) in fam.q_row(i)?.iter().enumerate() {
                if v[k] != 0.0 {
                    p.add_scaled(&rational::from_f64(v[k])?, q);
                }
            }
            Ok(p.compile())
        })
        .collect::<Result<_>>()?;
    let mut drift = vec![0.0f64; n];
    for (x, l) in curve.gamma.iter().zip(lambda) {
        for i in 0..n {
            drift[i] = drift[i].max((l[i] - polys[i].eval(x)).abs());
        }
    }
    Ok(drift)
}

/// A degree-zero index `m` whose polynomial equals `sign · B_{ij}` along
/// horizontal curves through the origin: `[X_{j'}, X_m] = sign · δ_{j'j} X_i`
/// for every `j' ≤ r`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing {
    pub i: i64,
    pub j: i64,
    pub m: i64,
    pub sign: f64,
    pub drift: f64,
}

pub fn find_pairings(alg: &GradedLieAlgebra) -> Vec<(i64, i64, i64, f64)> {
    let r = alg.rank() as i64;
    let mut out = Vec::new();
    for m in alg.ids_of_degree(0) {
        let images: Vec<_> = (1..=r).map(|j| alg.bracket_basis(j, m).expect("stored")).collect();
        let nonzero: Vec<(i64, &_)> = images.iter().enumerate().filter(|(_, b)| !b.is_empty()).map(|(p, b)| (p as i64 + 1, b)).collect();
        if nonzero.len() != 1 {
            continue;
        }
        let (j, img) = nonzero[0];
        if img.len() != 1 {
            continue;
        }
        let (&i, c) = img.iter().next().expect("one term");
        if i >= 1 && i <= r && (c == &Rational::from_integer(1.into()) || c == &Rational::from_integer((-1).into())) {
            out.push((i, j, m, rational::to_f64(c)));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct IteratedIntegrals {
    pub times: Vec<f64>,
    /// `b[i-1][j-1][t]`.
    pub b: Vec<Vec<Vec<f64>>>,
    pub curve: CurvePath,
    pub pairings: Vec<Pairing>,
}

/// `B_{ij}^v(t) = ∫_0^t P_i^v(γ) γ̇_j ds` for `i, j ≤ r`, integrated together
/// with the curve, and the drift against the matching degree-zero
/// polynomials.
pub fn iterated_integrals(
    fam: &ExtremalFamily,
    dynamics: &Dynamics,
    h: &ControlPath,
    v: &[f64],
    grid: &[f64],
) -> Result<IteratedIntegrals> {
    let (n, r) = (dynamics.n, dynamics.r);
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    dynamics.check(Some(h), &vec![0.0; n], None)?;
    let vr: Vec<Rational> = v.iter().map(|&x| rational::from_f64(x)).collect::<Result<_>>()?;
    let p: Vec<_> = (1..=r as i64).map(|i| fam.polynomial(i, &vr).map(|p| p.compile())).collect::<Result<_>>()?;
    let y0 = vec![0.0; n + r * r];
    let ys = rk4(grid, &y0, |t, y, out| {
        let mut hv = vec![0.0; r];
        h.eval(t, &mut hv);
        let (o1, o2) = out.split_at_mut(n);
        dynamics.horizontal_rhs(&hv, &y[..n], o1);
        for i in 0..r {
            let pi = p[i].eval(&y[..n]);
            for j in 0..r {
                o2[i * r + j] = pi * hv[j];
            }
        }
    });
    let mut b = vec![vec![Vec::with_capacity(grid.len()); r]; r];
    let mut gamma = Vec::with_capacity(grid.len());
    for y in &ys {
        for i in 0..r {
            for j in 0..r {
                b[i][j].push(y[n + i * r + j]);
            }
        }
        gamma.push(y[..n].to_vec());
    }
    let mut pairings = Vec::new();
    for (i, j, m, sign) in find_pairings(fam.algebra()) {
        let pm = fam.polynomial(m, &vr)?.compile();
        let drift = gamma
            .iter()
            .zip(&b[(i - 1) as usize][(j - 1) as usize])
            .map(|(x, bij)| (pm.eval(x) - sign * bij).abs())
            .fold(0.0, f64::max);
        pairings.push(Pairing { i, j, m, sign, drift });
    }
    Ok(IteratedIntegrals {
        times: grid.to_vec(),
        b,
        curve: CurvePath { times: grid.to_vec(), gamma, lambda: None },
        pairings,
    })
}

/// Largest drift over `i` and `t` of a normal extremal started at `x = 0`.
pub fn prime_integral_drift(fam: &ExtremalFamily, dynamics: &Dynamics, lambda0: &[f64], t1: f64, step: f64) -> Result<f64> {
    let curve = dynamics.integrate_normal(lambda0, &vec![0.0; dynamics.n], &uniform_grid(0.0, t1, step))?;
    Ok(duality_check(fam, &curve)?.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug)]
pub struct SpiralOptions {
    pub samples: usize,
    pub puncture: f64,
    pub tol: f64,
    /// Smallest `|t|` where integration starts on each side.
    pub start: f64,
    /// `h_1 = h_4 = slope · t`; the spiral lies on the variety only for 2.
    pub slope: f64,
}

impl Default for SpiralOptions {
    fn default() -> Self {
        SpiralOptions { samples: 2000, puncture: 1e-6, tol: 1e-8, start: 1e-12, slope: 2.0 }
    }
}

#[derive(Clone, Debug)]
pub struct SpiralReport {
    pub n: usize,
    pub rank: usize,
    pub step: i32,
    /// Nonzero entries of the covector of one factor, as `(index, value)`.
    pub covector: Vec<(i64, Rational)>,
    pub goh: GohReport,
    pub samples_checked: usize,
    pub origin_exact: bool,
    pub max_phi_prime: f64,
    pub max_psi_prime: f64,
    pub max_control_norm: f64,
    pub passed: bool,
}

fn spiral_log(t: f64) -> (f64, f64) {
    let a = 1.0 - t.abs().ln();
    (a.ln(), a)
}

/// `(φ, ψ, φ', ψ')` of the planar spiral `t (cos L, sin L)` with
/// `L = log(1 − log|t|)`, all zero at `t = 0`.
pub fn spiral_profile(t: f64) -> (f64, f64, f64, f64) {
    if t == 0.0 {
        return (0.0, 0.0, 0.0, 0.0);
    }
    let (l, a) = spiral_log(t);
    let (s, c) = l.sin_cos();
    (t * c, t * s, c + s / a, s - c / a)
}

/// Two-sided geometric-then-uniform grid from `±start` outward to `±1`.
fn spiral_half_grid(start: f64, sign: f64) -> Vec<f64> {
    let mut g = vec![0.0, sign * start];
    let mut t = start;
    while t < 1.0 {
        t = (t + (0.01 * t).min(DEFAULT_STEP)).min(1.0);
        g.push(sign * t);
    }
    g
}

/// Builds `F × F` for the free algebra of rank 3 and step 4, solves for the
/// covector with `Q_4^v = y_2² − y_1`, `Q_5^v = Q_6^v = 0`, lifts the spiral
/// `(t², t, φ(t))`, `(t², t, ψ(t))` horizontally and runs the Goh check.
pub fn spiral_example(opts: SpiralOptions) -> Result<SpiralReport> {
    let f = FreeLie::build(3, 4)?;
    let single = ExtremalFamily::of_algebra(&f.algebra)?;
    let m = 32;
    let y = |i: usize| Poly::var(m, i - 1);
    let target = &(&y(2) * &y(2)) - &y(1);
    let zero = Poly::zero(m);
    let v = abnormal::solve_covector(&single, &[(4, target), (5, zero.clone()), (6, zero)], 3)?
        .ok_or_else(|| Error::Structural("no covector realises the target polynomials".into()))?;
    let covector: Vec<(i64, Rational)> =
        v.iter().enumerate().filter(|(_, c)| !num_traits::Zero::is_zero(*c)).map(|(k, c)| (k as i64 + 1, c.clone())).collect();

    let factor = ProlongedAlgebra::trivial(&f.algebra);
    let prod = product_group(&factor, &factor)?;
    let alg = prod.algebra.algebra().clone();
    let n = alg.n();
    let mut vp = vec![0.0; n];
    for (k, c) in &covector {
        let idx = (k - 1) as usize;
        vp[(prod.embed_a[idx] - 1) as usize] = rational::to_f64(c);
        vp[(prod.embed_b[idx] - 1) as usize] = rational::to_f64(c);
    }
    let fam = ExtremalFamily::build(&prod.algebra)?;
    let dynamics = Dynamics::from_fields(&alg, fam.fields())?;
    // degree-one indices of the factors: y_1..y_3 then z_1..z_3
    let slot = |emb: &Vec<i64>, i: usize| (emb[i - 1] - 1) as usize;
    let (ya, za) = (prod.embed_a.clone(), prod.embed_b.clone());
    let layout: Vec<usize> = (1..=3).map(|i| slot(&ya, i)).chain((1..=3).map(|i| slot(&za, i))).collect();
    if layout != (0..6).collect::<Vec<_>>() {
        return Err(Error::Structural("unexpected product layout".into()));
    }
    let k = opts.slope;
    let controls = ControlPath::func(6, move |t, out| {
        let (_, _, dphi, dpsi) = spiral_profile(t);
        out.copy_from_slice(&[k * t, 1.0, dphi, k * t, 1.0, dpsi]);
    });
    let mut samples = Vec::new();
    let (mut max_phi, mut max_psi, mut max_norm) = (0.0f64, 0.0f64, 0.0f64);
    for sign in [1.0, -1.0] {
        let grid = spiral_half_grid(opts.start, sign);
        let curve = dynamics.integrate_horizontal(&controls, &vec![0.0; n], &grid)?;
        for &t in &grid {
            let (_, _, dphi, dpsi) = spiral_profile(t);
            max_phi = max_phi.max(dphi.abs());
            max_psi = max_psi.max(dpsi.abs());
            let norm = (2.0 * (k * t).powi(2) + 2.0 + dphi * dphi + dpsi * dpsi).sqrt();
            max_norm = max_norm.max(norm);
        }
        let eligible: Vec<usize> = (0..grid.len()).filter(|&i| grid[i].abs() >= opts.puncture).collect();
        let want = opts.samples / 2;
        for p in 0..want.min(eligible.len()) {
            let idx = eligible[p * (eligible.len() - 1) / (want - 1).max(1)];
            samples.push(curve.gamma[idx].clone());
        }
    }
    let goh = goh_check(&fam, &vp, &samples, opts.tol)?;
    let vr: Vec<Rational> = vp.iter().map(|&x| rational::from_f64(x)).collect::<Result<_>>()?;
    let origin_exact = abnormal::goh_check_exact(&fam, &vr, &[vec![Rational::from_integer(0.into()); n]])?;
    let passed = goh.passed && origin_exact && max_phi <= 2.0 && max_psi <= 2.0 && max_norm <= 2.0 * 5f64.sqrt();
    Ok(SpiralReport {
        n,
        rank: alg.rank(),
        step: alg.step(),
        covector,
        samples_checked: samples.len(),
        goh,
        origin_exact,
        max_phi_prime: max_phi,
        max_psi_prime: max_psi,
        max_control_norm: max_norm,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exact_on_cubic() {
        let grid = uniform_grid(0.0, 1.0, 0.1);
        let ys = rk4(&grid, &[0.0], |t, _, out| out[0] = 3.0 * t * t);
        assert!((ys.last().unwrap()[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn heisenberg_adjoint() {
        let h = GradedLieAlgebra::heisenberg();
        let d = Dynamics::new(&h).unwrap();
        let grid = uniform_grid(0.0, 1.0, 1e-3);
        let c = d.integrate_adjoint(&ControlPath::Constant(vec![1.0, 0.0]), &[0.0; 3], &[0.0, 0.0, 1.0], &grid).unwrap();
        let l = c.lambda.unwrap();
        let last = l.last().unwrap();
        assert!((last[0]).abs() < 1e-12 && (last[1] + 1.0).abs() < 1e-12 && (last[2] - 1.0).abs() < 1e-12);
        assert!((c.gamma.last().unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_normal_line() {
        let d = Dynamics::new(&GradedLieAlgebra::heisenberg()).unwrap();
        let c = d.integrate_normal(&[0.0, -1.0, 0.0], &[0.0; 3], &uniform_grid(0.0, 1.0, 1e-2)).unwrap();
        let g = c.gamma.last().unwrap();
        assert!((g[1] - 1.0).abs() < 1e-12 && g[0].abs() < 1e-15 && g[2].abs() < 1e-15);
        assert_eq!(c.lambda.unwrap().last().unwrap(), &vec![0.0, -1.0, 0.0]);
    }

    #[test]
    fn table_controls_interpolate() {
        let c = ControlPath::Table { times: vec![0.0, 1.0], values: vec![vec![0.0], vec![2.0]] };
        let mut out = [0.0];
        c.eval(0.25, &mut out);
        assert_eq!(out[0], 0.5);
        c.eval(3.0, &mut out);
        assert_eq!(out[0], 2.0);
    }

    #[test]
    fn spiral_profile_bounds() {
        for k in 1..2000 {
            let t = k as f64 / 2000.0;
            let (_, _, a, b) = spiral_profile(t);
            assert!(a.abs() <= 2.0 && b.abs() <= 2.0);
        }
        assert_eq!(spiral_profile(0.0), (0.0, 0.0, 0.0, 0.0));
    }
}
