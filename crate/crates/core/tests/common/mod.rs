#![allow(dead_code)]

use contig::graph::Graph;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random labelled tree (random attachment) plus `extra` random chords.
pub fn random_connected(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !edges.contains(&(u.min(v), u.max(v))) {
            edges.push((u.min(v), u.max(v)));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let edges: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Random tree with maximum degree at most `max_deg`.
pub fn random_tree(n: usize, max_deg: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut deg = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| deg[u] < max_deg).collect();
        let u = *open.choose(rng).expect("a tree with max degree >= 2 always has an open vertex");
        deg[u] += 1;
        deg[v] += 1;
        edges.push((u, v));
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Plain BFS connectivity of a vertex set, independent of the library.
pub fn bfs_connected(g: &Graph, set: &[usize]) -> bool {
    if set.len() <= 1 {
        return true;
    }
    let mut seen = vec![set[0]];
    let mut i = 0;
    while i < seen.len() {
        let u = seen[i];
        i += 1;
        for &w in g.neighbors(u) {
            if set.contains(&w) && !seen.contains(&w) {
                seen.push(w);
            }
        }
    }
    seen.len() == set.len()
}

/// Matchings of a graph by edge inclusion/exclusion, counting the empty one.
pub fn matching_count(n: usize, edges: &[(usize, usize)]) -> u64 {
    fn go(edges: &[(usize, usize)], used: &mut [bool]) -> u64 {
        let Some((&(u, v), rest)) = edges.split_first() else { return 1 };
        let mut total = go(rest, used);
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            total += go(rest, used);
            used[u] = false;
            used[v] = false;
        }
        total
    }
    go(edges, &mut vec![false; n])
}
