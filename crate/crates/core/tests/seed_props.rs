mod common;

use common::{bfs_connected, random_connected, random_tree};
use contig::partition::{hamming_agree, is_valid, StateParams};
use contig::seed::{find_local_reduction, local_reductions, partition_connected, tree_break, ReductionSearch};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// One break: the piece is a connected subtree of the right size and the
    /// remainder keeps the root and stays connected.
    #[test]
    fn tree_break_piece_sizes(seed in any::<u64>(), n in 3usize..200, b_idx in 0usize..2) {
        let b = [3, 5][b_idx];
        prop_assume!(b < n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = random_tree(n, 4, &mut rng);
        let delta = 4;
        let root = (0..n).find(|&v| tree.degree(v) < delta).unwrap();
        let r = tree_break(&tree, root, b, delta).unwrap();
        prop_assert!(r.piece.len() <= b);
        prop_assert!((r.piece.len() as f64) > (b - 1) as f64 / (delta - 1) as f64);
        prop_assert!(r.remainder.contains(&root));
        prop_assert_eq!(r.piece.len() + r.remainder.len(), n);
        prop_assert!(bfs_connected(&tree, &r.piece));
        prop_assert!(bfs_connected(&tree, &r.remainder));
    }

    /// Whole-graph partition: valid with q = classes used, and every class
    /// but the last has more than (B-1)/(Delta-1) vertices.
    #[test]
    fn partition_connected_is_valid(seed in any::<u64>(), n in 1usize..120, extra in 0usize..40, b in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(n, extra, &mut rng);
        let p = partition_connected(&g, b).unwrap();
        prop_assert!(is_valid(&g, &p, &StateParams::new(p.q(), b, 0).unwrap()));
        prop_assert_eq!(p.kappa(), p.q());
    }

    /// Repeated reduction strictly lowers kappa, stays valid, and every step
    /// changes only vertices inside its connected region.
    #[test]
    fn reductions_terminate(seed in any::<u64>(), n in 2usize..30, b in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_connected(n, n / 4, &mut rng);
        let params = StateParams::new(n, b, 0).unwrap();
        let mut p = contig::partition::Partition::singletons(n, n).unwrap();
        let search = ReductionSearch::new(3, 12);
        let mut rounds = 0;
        while let Some(red) = find_local_reduction(&g, &p, b, &search) {
            prop_assert!(bfs_connected(&g, &red.region));
            prop_assert!(red.region.len() <= 12);
            let next = red.apply(&p);
            prop_assert!(next.kappa() < p.kappa());
            prop_assert!(is_valid(&g, &next, &params));
            for v in hamming_agree(&p, &next) {
                prop_assert!(red.region.contains(&v), "vertex {} changed outside the region", v);
            }
            p = next;
            rounds += 1;
            prop_assert!(rounds <= n);
        }
        prop_assert!(local_reductions(&g, &p, b, &search).is_empty());
    }
}

/// Fixed-seed sweep of 500 trees, B in {3, 5}.
#[test]
fn five_hundred_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for i in 0..500 {
        let n = rng.gen_range(2..=200);
        let b = if i % 2 == 0 { 3 } else { 5 };
        let tree = random_tree(n, 4, &mut rng);
        let p = partition_connected(&tree, b).unwrap();
        assert!(is_valid(&tree, &p, &StateParams::new(p.q(), b, 0).unwrap()));
        let small = p.sizes().iter().filter(|&&s| s > 0 && (s as f64) <= (b - 1) as f64 / 3.0).count();
        assert!(small <= 1, "tree {i}: {small} undersized classes");
    }
}
