mod common;

use carnot_core::extremal::ExtremalFamily;
use carnot_core::free_lie::FreeLie;
use carnot_core::group::Group;
use carnot_core::prolongation::{prolong, Action};
use carnot_core::rational::int;
use carnot_core::{GradedLieAlgebra, Poly};
use common::{first_layers, free24, second_field, zero_layer};

const N: usize = 8;

#[test]
fn rank_two_step_four_fields() {
    let f = FreeLie::build(2, 4).unwrap();
    let x = Group::new(&f.algebra).unwrap().left_invariant_fields();
    assert_eq!(x[0].coeffs[0], Poly::one(N));
    assert!(x[0].coeffs[1..].iter().all(Poly::is_zero));
    assert_eq!(x[1].coeffs, second_field());
}

#[test]
fn first_three_polynomials() {
    let fam = ExtremalFamily::build(&free24(Action::Right)).unwrap();
    for (j, row) in first_layers() {
        for (c, expected) in row.iter().enumerate() {
            assert_eq!(fam.q(j, c as i64 + 4).unwrap(), expected, "Q_{{{j},{}}}", c + 4);
        }
    }
}

#[test]
fn degree_zero_polynomials_in_fixed_basis() {
    let fam = ExtremalFamily::build(&free24(Action::Right)).unwrap();
    for (j, row) in zero_layer() {
        for (c, expected) in row.iter().enumerate() {
            assert_eq!(fam.q(j, c as i64 + 4).unwrap(), expected, "Q_{{{j},{}}}", c + 4);
        }
        let origin = vec![int(0); N];
        for k in 1..=N as i64 {
            assert_eq!(fam.q(j, k).unwrap().evaluate(&origin).unwrap(), int(0));
        }
    }
}

#[test]
fn left_action_negates_degree_zero_rows() {
    let left = ExtremalFamily::build(&free24(Action::Left)).unwrap();
    for (j, row) in zero_layer() {
        for (c, expected) in row.iter().enumerate() {
            assert_eq!(left.q(j, c as i64 + 4).unwrap(), &-expected);
        }
    }
}

#[test]
fn structure_identities_hold() {
    for action in [Action::Left, Action::Right] {
        let fam = ExtremalFamily::build(&free24(action)).unwrap();
        assert!(fam.verify_structure().is_empty());
    }
    let fam = ExtremalFamily::build(&free24(Action::Right)).unwrap();
    let x = fam.fields();
    let v: Vec<_> = (1..=8).map(|k| if k <= 3 { int(0) } else { int(k * k - 7) }).collect();
    let p = |j| fam.polynomial(j, &v).unwrap();
    let zero = Poly::zero(N);
    let pairs = [
        (0, -3, zero.clone()),
        (0, -2, zero.clone()),
        (0, -1, p(1)),
        (0, 0, p(2)),
        (1, -3, p(1)),
        (1, -2, p(2)),
        (1, -1, zero.clone()),
        (1, 0, zero),
    ];
    for (i, j, expected) in pairs {
        assert_eq!(x[i].apply(&p(j)).unwrap(), expected, "X_{} P_{j}", i + 1);
    }
}

#[test]
fn recursion_rebuilds_every_family() {
    let cases = vec![
        prolong(&GradedLieAlgebra::heisenberg(), 1).unwrap(),
        prolong(&FreeLie::build(2, 3).unwrap().algebra, 8).unwrap(),
        free24(Action::Right),
    ];
    for p in cases {
        let built = ExtremalFamily::build(&p).unwrap();
        let rebuilt = ExtremalFamily::reconstruct_by_recursion(&p).unwrap();
        assert!(built.same_polynomials(&rebuilt));
        assert!(built.verify_structure().is_empty());
    }
}

#[test]
fn homogeneity_and_origin_values() {
    let fam = ExtremalFamily::build(&free24(Action::Right)).unwrap();
    let w = fam.weights().to_vec();
    let zero = vec![int(0); N];
    for j in fam.indices() {
        let dj = fam.algebra().degree(j).unwrap() as i64;
        for k in 1..=N as i64 {
            let q = fam.q(j, k).unwrap();
            if !q.is_zero() {
                assert!(q.is_homogeneous(&w));
                assert_eq!(q.weighted_degree(&w).unwrap(), w[(k - 1) as usize] as i64 - dj);
            }
            let expected = if j == k { int(1) } else { int(0) };
            assert_eq!(q.evaluate(&zero).unwrap(), expected);
        }
    }
}
