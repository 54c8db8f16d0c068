#![allow(dead_code)]

use carnot_core::free_lie::FreeLie;
use carnot_core::prolongation::{prolong_with, Action, ProlongedAlgebra, StratumBasis};
use carnot_core::rational::{frac, int};
use carnot_core::{MultiIndex, Poly, Rational};

/// `c · Π x_i^e` from `(i, e)` pairs, `i` starting at 1.
pub fn mono(n: usize, num: i64, den: i64, powers: &[(usize, u8)]) -> Poly {
    let mut a = vec![0u8; n];
    for &(i, e) in powers {
        a[i - 1] += e;
    }
    Poly::monomial(MultiIndex::from(a), frac(num, den))
}

pub fn sum(terms: &[Poly]) -> Poly {
    let n = terms[0].nvars();
    terms.iter().fold(Poly::zero(n), |acc, t| &acc + t)
}

pub fn matrix(rows: [[i64; 2]; 2]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

/// The four 2×2 matrices used for `g_0` of free(2,4), in index order −3..0.
pub fn fixed_g0(action: Action) -> StratumBasis {
    StratumBasis {
        degree: 0,
        action,
        elements: vec![
            matrix([[0, 1], [0, 0]]),
            matrix([[0, 0], [0, 1]]),
            matrix([[1, 0], [0, 0]]),
            matrix([[0, 0], [1, 0]]),
        ],
    }
}

pub fn free24(action: Action) -> ProlongedAlgebra {
    let f = FreeLie::build(2, 4).unwrap();
    prolong_with(&f.algebra, 3, &[fixed_g0(action)]).unwrap()
}

/// Random-ish rational generator with a fixed seed (xorshift).
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn rational(&mut self, span: i64) -> Rational {
        let num = (self.next() % (2 * span as u64 + 1)) as i64 - span;
        let den = (self.next() % 4) as i64 + 1;
        frac(num, den)
    }
}

pub fn m8(num: i64, den: i64, p: &[(usize, u8)]) -> Poly {
    mono(8, num, den, p)
}

/// Coefficients of the second left-invariant field of free(2,4).
pub fn second_field() -> Vec<Poly> {
    vec![
        Poly::zero(8),
        Poly::one(8),
        m8(-1, 1, &[(1, 1)]),
        m8(1, 2, &[(1, 2)]),
        m8(1, 1, &[(1, 1), (2, 1)]),
        m8(-1, 6, &[(1, 3)]),
        m8(-1, 2, &[(1, 2), (2, 1)]),
        m8(-1, 2, &[(1, 1), (2, 2)]),
    ]
}

/// Rows `Q_{j,4..8}` for `j = 3, 2, 1` (with `v_1 = v_2 = v_3 = 0`).
pub fn first_layers() -> Vec<(i64, [Poly; 5])> {
    vec![
        (3, [m8(-1, 1, &[(1, 1)]), m8(-1, 1, &[(2, 1)]), m8(1, 2, &[(1, 2)]), m8(1, 1, &[(1, 1), (2, 1)]), m8(1, 2, &[(2, 2)])]),
        (
            2,
            [
                m8(1, 2, &[(1, 2)]),
                sum(&[m8(1, 1, &[(3, 1)]), m8(1, 1, &[(1, 1), (2, 1)])]),
                m8(-1, 6, &[(1, 3)]),
                sum(&[m8(1, 1, &[(4, 1)]), m8(-1, 2, &[(1, 2), (2, 1)])]),
                sum(&[m8(1, 1, &[(5, 1)]), m8(-1, 2, &[(1, 1), (2, 2)])]),
            ],
        ),
        (1, [m8(1, 1, &[(3, 1)]), m8(-1, 2, &[(2, 2)]), m8(1, 1, &[(4, 1)]), m8(1, 1, &[(5, 1)]), m8(1, 6, &[(2, 3)])]),
    ]
}

/// Rows `Q_{j,4..8}` for `j = −3..0` in the fixed basis.
pub fn zero_layer() -> Vec<(i64, [Poly; 5])> {
    vec![
        (
            -3,
            [
                sum(&[m8(1, 1, &[(3, 1), (2, 1)]), m8(1, 1, &[(5, 1)])]),
                m8(-1, 6, &[(2, 3)]),
                sum(&[m8(1, 1, &[(4, 1), (2, 1)]), m8(1, 1, &[(7, 1)])]),
                sum(&[m8(1, 1, &[(5, 1), (2, 1)]), m8(2, 1, &[(8, 1)])]),
                m8(1, 24, &[(2, 4)]),
            ],
        ),
        (
            -2,
            [
                m8(1, 1, &[(4, 1)]),
                sum(&[m8(1, 1, &[(2, 1), (3, 1)]), m8(2, 1, &[(5, 1)])]),
                m8(1, 1, &[(6, 1)]),
                sum(&[m8(1, 1, &[(2, 1), (4, 1)]), m8(2, 1, &[(7, 1)])]),
                sum(&[m8(1, 1, &[(2, 1), (5, 1)]), m8(3, 1, &[(8, 1)])]),
            ],
        ),
        (
            -1,
            [
                sum(&[m8(1, 1, &[(1, 1), (3, 1)]), m8(2, 1, &[(4, 1)])]),
                sum(&[m8(1, 1, &[(5, 1)]), m8(-1, 2, &[(1, 1), (2, 2)])]),
                sum(&[m8(1, 1, &[(1, 1), (4, 1)]), m8(3, 1, &[(6, 1)])]),
                sum(&[m8(1, 1, &[(1, 1), (5, 1)]), m8(2, 1, &[(7, 1)])]),
                sum(&[m8(1, 6, &[(1, 1), (2, 3)]), m8(1, 1, &[(8, 1)])]),
            ],
        ),
        (
            0,
            [
                m8(1, 6, &[(1, 3)]),
                sum(&[m8(1, 2, &[(1, 2), (2, 1)]), m8(1, 1, &[(1, 1), (3, 1)]), m8(1, 1, &[(4, 1)])]),
                m8(-1, 24, &[(1, 4)]),
                sum(&[m8(-1, 6, &[(1, 3), (2, 1)]), m8(1, 1, &[(1, 1), (4, 1)]), m8(2, 1, &[(6, 1)])]),
                sum(&[m8(-1, 4, &[(1, 2), (2, 2)]), m8(1, 1, &[(1, 1), (5, 1)]), m8(1, 1, &[(7, 1)])]),
            ],
        ),
    ]
}

/// Brute-force oracle: null space of the evaluation matrix by Gaussian
/// elimination on dense rationals, written independently of the library.
pub fn dense_null_space(mut a: Vec<Vec<Rational>>, n: usize) -> usize {
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..a.len()).find(|&r| a[r][c] != int(0)) else { continue };
        a.swap(rank, p);
        let piv = a[rank][c].clone();
        for r in 0..a.len() {
            if r != rank && a[r][c] != int(0) {
                let f = &a[r][c] / &piv;
                for k in 0..n {
                    let sub = &f * &a[rank][k];
                    a[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    n - rank
}
