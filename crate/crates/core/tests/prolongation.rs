use carnot_core::free_lie::FreeLie;
use carnot_core::prolongation::{prolong, prolong_with, Action, StratumBasis};
use carnot_core::rational::int;
use carnot_core::GradedLieAlgebra;

#[test]
fn free_two_three_is_exceptional() {
    let f = FreeLie::build(2, 3).unwrap();
    let p = prolong(&f.algebra, 8).unwrap();
    assert_eq!(p.dims(), vec![4, 2, 1, 2, 0]);
    assert!(p.terminated());
    assert!(p.algebra().validate().is_empty());
}

#[test]
fn heisenberg_keeps_going() {
    let p = prolong(&GradedLieAlgebra::heisenberg(), 2).unwrap();
    assert_eq!(p.dims(), vec![4, 6, 9]);
    assert!(p.possibly_infinite());
    assert!(p.algebra().validate().is_empty());
}

#[test]
fn free_three_four_degree_zero_only() {
    let f = FreeLie::build(3, 4).unwrap();
    let p = prolong(&f.algebra, 2).unwrap();
    assert_eq!(p.dims(), vec![9, 0]);
}

fn m(rows: [[i64; 2]; 2]) -> Vec<Vec<carnot_core::Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

#[test]
fn chosen_basis_sets_structure_constants() {
    let f = FreeLie::build(2, 4).unwrap();
    let basis = StratumBasis {
        degree: 0,
        action: Action::Left,
        elements: vec![m([[0, 1], [0, 0]]), m([[0, 0], [0, 1]]), m([[1, 0], [0, 0]]), m([[0, 0], [1, 0]])],
    };
    let p = prolong_with(&f.algebra, 3, &[basis]).unwrap();
    let a = p.algebra();
    let c = |i, j, k| a.structure_constant(i, j, k).unwrap();
    assert_eq!(c(-3, 2, 1), int(1));
    assert_eq!(c(-1, 1, 1), int(1));
    assert_eq!(c(-2, 2, 2), int(1));
    assert_eq!(c(0, 1, 2), int(1));
    for (i, j) in [(-3, 1), (-2, 1), (-1, 2), (0, 2)] {
        for k in 1..=2 {
            assert_eq!(c(i, j, k), int(0));
        }
    }
    assert!(a.validate().is_empty());
}
