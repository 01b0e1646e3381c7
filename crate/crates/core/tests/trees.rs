use necs_core::series::schroeder_series;
use necs_core::trees::{enumerate_trees, enumerate_trees_with_root};
use necs_core::{CoveringSystem, Tree};
use num_bigint::BigInt;

#[test]
fn images_are_exact_with_bounded_lcm() {
    let t = schroeder_series(10);
    for k in 1..=10 {
        let trees = enumerate_trees(k);
        assert_eq!(&BigInt::from(trees.len()), t.coeff(k), "k={k}");
        for tree in &trees {
            let c = tree.chi();
            assert_eq!(c.size(), k);
            assert!(c.is_exact(), "{tree}");
            assert!(c.lcm() <= 1 << (k - 1), "{tree}");
        }
    }
}

#[test]
fn image_is_union_of_expanded_subtree_images() {
    for k in 2..=8 {
        for tree in enumerate_trees(k) {
            let pieces: Vec<CoveringSystem> = tree.children().iter().map(Tree::chi).collect();
            assert_eq!(
                CoveringSystem::reassemble(&pieces).unwrap(),
                tree.chi(),
                "{tree}"
            );
        }
    }
}

#[test]
fn regrouping_preserves_image() {
    for (a, b) in [(2, 2), (2, 3), (3, 2)] {
        for k in a * b..=8 {
            for tree in enumerate_trees_with_root(k, a * b) {
                let grouped = tree.ab_bijection(a, b).unwrap();
                assert_eq!(grouped.chi(), tree.chi(), "{tree}");
                assert_eq!(grouped.leaf_count(), k);
                assert_eq!(grouped.ab_inverse().unwrap(), tree);
            }
        }
    }
}

#[test]
fn text_form_round_trips() {
    for tree in enumerate_trees(7) {
        assert_eq!(Tree::parse(&tree.to_string()).unwrap(), tree);
    }
    let fig = "(3 (3 () (2 () ()) ()) () (2 () (3 (2 () ()) () ())))";
    assert_eq!(Tree::parse(fig).unwrap().to_string(), fig);
}
