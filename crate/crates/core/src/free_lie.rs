//! Free nilpotent Lie algebras in a Hall basis.
//!
//! Generators are `X_1 < … < X_r`. Words are numbered by degree and, within a
//! degree, by enumerating `[u, v]` by the degree of `v`, then `u` ascending,
//! then `v` ascending. A
//! bracket `[u, v]` is a Hall word when `u > v` and either `u` is a generator
//! or `u = [x, y]` with `y ≤ v`. For rank 2 this gives `X_3 = [X_2, X_1]`,
//! `X_4 = [X_3, X_1]`, `X_5 = [X_3, X_2]`, …

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::GradedLieAlgebra;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on the dimension of generated algebras.
pub const DEFAULT_MAX_DIM: usize = 256;

/// Reads the cap from `CARNOT_MAX_DIM`, falling back to [`DEFAULT_MAX_DIM`].
pub fn max_dim_from_env() -> usize {
    std::env::var("CARNOT_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// Bracket tree over generators `1..=r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Gen(usize),
    Br(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn br(a: Tree, b: Tree) -> Tree {
        Tree::Br(Box::new(a), Box::new(b))
    }

    pub fn degree(&self) -> usize {
        match self {
            Tree::Gen(_) => 1,
            Tree::Br(a, b) => a.degree() + b.degree(),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Gen(i) => write!(f, "X{i}"),
            Tree::Br(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallWord {
    /// Position in the Hall order, starting at 1.
    pub serial: usize,
    pub degree: usize,
    /// `(u, v)` for `[X_u, X_v]`; `None` for generators.
    pub factors: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct FreeLie {
    pub r: usize,
    pub s: usize,
    pub words: Vec<HallWord>,
    pub algebra: GradedLieAlgebra,
    by_pair: HashMap<(usize, usize), usize>,
}

type Combo = BTreeMap<usize, Rational>;

/// Möbius function.
fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Dimension of the degree-`m` part of the free Lie algebra on `r` generators.
pub fn witt_dimension(r: usize, m: usize) -> usize {
    let mut total: i128 = 0;
    for d in 1..=m {
        if m.is_multiple_of(d) {
            total += mobius(d) as i128 * (r as i128).pow((m / d) as u32);
        }
    }
    (total / m as i128) as usize
}

fn enumerate_words(r: usize, s: usize, cap: usize) -> Result<Vec<HallWord>> {
    let expected: usize = (1..=s).map(|m| witt_dimension(r, m)).sum();
    if expected > cap {
        return Err(Error::DimensionCap { n: expected, cap });
    }
    let mut words: Vec<HallWord> = (1..=r).map(|i| HallWord { serial: i, degree: 1, factors: None }).collect();
    for m in 2..=s {
        let prev = words.len();
        let mut fresh = Vec::new();
        for dv in 1..m {
            for u in 0..prev {
                if words[u].degree != m - dv {
                    continue;
                }
                for v in 0..u {
                    if words[v].degree != dv {
                        continue;
                    }
                    let ok = match words[u].factors {
                        None => true,
                        Some((_, y)) => y <= v + 1,
                    };
                    if ok {
                        fresh.push((u + 1, v + 1));
                    }
                }
            }
        }
        for (u, v) in fresh {
            let serial = words.len() + 1;
            words.push(HallWord { serial, degree: m, factors: Some((u, v)) });
        }
    }
    Ok(words)
}

impl FreeLie {
    /// Free nilpotent algebra of rank `r` and step `s`, capped at
    /// `CARNOT_MAX_DIM` (default 256).
    pub fn build(r: usize, s: usize) -> Result<FreeLie> {
        Self::build_with_cap(r, s, max_dim_from_env())
    }

    pub fn build_with_cap(r: usize, s: usize, cap: usize) -> Result<FreeLie> {
        if r < 2 || s < 1 {
            return Err(Error::InvalidArgument(format!("free algebra needs r >= 2 and s >= 1, got r={r}, s={s}")));
        }
        let words = enumerate_words(r, s, cap)?;
        let by_pair = words
            .iter()
            .filter_map(|w| w.factors.map(|p| (p, w.serial)))
            .collect();
        let degrees: Vec<i32> = words.iter().map(|w| w.degree as i32).collect();
        let mut this = FreeLie {
            r,
            s,
            words,
            algebra: GradedLieAlgebra::new(degrees.clone(), std::iter::empty())?,
            by_pair,
        };
        let n = this.words.len();
        let mut memo = HashMap::new();
        let mut entries = Vec::new();
        for a in 1..=n {
            for b in 1..=n {
                if a == b || this.words[a - 1].degree + this.words[b - 1].degree > s {
                    continue;
                }
                for (k, c) in this.reduce_pair(a, b, &mut memo) {
                    entries.push((a as i64, b as i64, k as i64, c));
                }
            }
        }
        this.algebra = GradedLieAlgebra::new(degrees, entries)?;
        Ok(this)
    }

    pub fn n(&self) -> usize {
        self.words.len()
    }

    pub fn tree(&self, serial: usize) -> Tree {
        match self.words[serial - 1].factors {
            None => Tree::Gen(serial),
            Some((u, v)) => Tree::br(self.tree(u), self.tree(v)),
        }
    }

    fn degree(&self, w: usize) -> usize {
        self.words[w - 1].degree
    }

    fn reduce_pair(&self, u: usize, v: usize, memo: &mut HashMap<(usize, usize), Combo>) -> Combo {
        if u == v || self.degree(u) + self.degree(v) > self.s {
            return Combo::new();
        }
        if let Some(c) = memo.get(&(u, v)) {
            return c.clone();
        }
        let out = if u < v {
            self.reduce_pair(v, u, memo).into_iter().map(|(k, c)| (k, -c)).collect()
        } else {
            match self.words[u - 1].factors {
                Some((x, y)) if y > v => {
                    // [[x,y],v] = [[x,v],y] + [x,[y,v]]
                    let xv = self.reduce_pair(x, v, memo);
                    let yv = self.reduce_pair(y, v, memo);
                    let mut acc = self.combo_bracket(&xv, &[(y, Rational::one())].into_iter().collect(), memo);
                    let rhs = self.combo_bracket(&[(x, Rational::one())].into_iter().collect(), &yv, memo);
                    add_into(&mut acc, &rhs);
                    acc
                }
                _ => {
                    let k = self.by_pair[&(u, v)];
                    [(k, Rational::one())].into_iter().collect()
                }
            }
        };
        memo.insert((u, v), out.clone());
        out
    }

    fn combo_bracket(&self, a: &Combo, b: &Combo, memo: &mut HashMap<(usize, usize), Combo>) -> Combo {
        let mut acc = Combo::new();
        for (u, cu) in a {
            for (v, cv) in b {
                let p = cu * cv;
                for (k, c) in self.reduce_pair(*u, *v, memo) {
                    *acc.entry(k).or_insert_with(Rational::zero) += &p * c;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        acc
    }

    /// Expresses an arbitrary bracket tree in the Hall basis; trees of degree
    /// above the step reduce to zero.
    pub fn reduce_to_hall(&self, tree: &Tree) -> Result<BTreeMap<i64, Rational>> {
        let mut memo = HashMap::new();
        let c = self.reduce_tree(tree, &mut memo)?;
        Ok(c.into_iter().map(|(k, c)| (k as i64, c)).collect())
    }

    fn reduce_tree(&self, tree: &Tree, memo: &mut HashMap<(usize, usize), Combo>) -> Result<Combo> {
        match tree {
            Tree::Gen(i) => {
                if *i == 0 || *i > self.r {
                    return Err(Error::UnknownIndex(*i as i64));
                }
                Ok([(*i, Rational::one())].into_iter().collect())
            }
            Tree::Br(a, b) => {
                if tree.degree() > self.s {
                    // still validate the leaves
                    self.reduce_tree(a, memo)?;
                    self.reduce_tree(b, memo)?;
                    return Ok(Combo::new());
                }
                let ra = self.reduce_tree(a, memo)?;
                let rb = self.reduce_tree(b, memo)?;
                Ok(self.combo_bracket(&ra, &rb, memo))
            }
        }
    }
}

fn add_into(acc: &mut Combo, other: &Combo) {
    for (k, c) in other {
        *acc.entry(*k).or_insert_with(Rational::zero) += c;
    }
    acc.retain(|_, c| !c.is_zero());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn g(i: usize) -> Tree {
        Tree::Gen(i)
    }

    #[test]
    fn witt_counts() {
        assert_eq!((1..=4).map(|m| witt_dimension(2, m)).collect::<Vec<_>>(), vec![2, 1, 2, 3]);
        assert_eq!((1..=4).map(|m| witt_dimension(3, m)).sum::<usize>(), 32);
        assert_eq!(witt_dimension(2, 6), 9);
    }

    #[test]
    fn rank_two_step_four_words() {
        let f = FreeLie::build(2, 4).unwrap();
        assert_eq!(f.n(), 8);
        let pairs: Vec<_> = f.words.iter().filter_map(|w| w.factors).collect();
        assert_eq!(pairs, vec![(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (5, 2)]);
        assert!(f.algebra.validate().is_empty());
    }

    #[test]
    fn reductions() {
        let f = FreeLie::build(2, 4).unwrap();
        let neg3: BTreeMap<i64, Rational> = [(3, int(-1))].into_iter().collect();
        assert_eq!(f.reduce_to_hall(&Tree::br(g(1), g(2))).unwrap(), neg3);
        assert!(f.reduce_to_hall(&Tree::br(g(1), g(1))).unwrap().is_empty());
        let x3 = Tree::br(g(2), g(1));
        assert!(f.reduce_to_hall(&Tree::br(x3.clone(), x3)).unwrap().is_empty());
        for w in 1..=8 {
            let single: BTreeMap<i64, Rational> = [(w as i64, int(1))].into_iter().collect();
            assert_eq!(f.reduce_to_hall(&f.tree(w)).unwrap(), single);
        }
    }

    #[test]
    fn abelian_when_step_one() {
        let f = FreeLie::build(2, 1).unwrap();
        assert_eq!(f.n(), 2);
        assert!(f.algebra.bracket_basis(2, 1).unwrap().is_empty());
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(FreeLie::build_with_cap(3, 4, 20), Err(Error::DimensionCap { n: 32, cap: 20 })));
    }
}
