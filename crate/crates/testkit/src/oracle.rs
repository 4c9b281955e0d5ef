//! Reference computations written directly from the defining formulas, with
//! dense matrices and exhaustive enumeration instead of the library's
//! incremental algorithms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `(a, b, weight)` over node indices `0..n`.
pub type WeightedEdge = (usize, usize, f64);

pub fn adjacency_matrix(n: usize, edges: &[WeightedEdge]) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        a[i][j] += w;
        a[j][i] += w;
    }
    a
}

/// Modularity as the literal double sum over ordered node pairs:
/// `Q = 1/2m Σ_{i,j} [A_ij - k_i k_j / 2m] δ(c_i, c_j)`.
pub fn modularity(n: usize, edges: &[WeightedEdge], labels: &[usize]) -> f64 {
    let a = adjacency_matrix(n, edges);
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max + 1 {
            if pos == 0 && c > 0 {
                break;
            }
            cur.push(c);
            rec(pos + 1, n, max.max(c), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    rec(0, n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Maximum modularity over all partitions, with every partition attaining it
/// (within `1e-12`).
pub fn best_partitions(n: usize, edges: &[WeightedEdge]) -> (f64, Vec<Vec<usize>>) {
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for p in set_partitions(n) {
        let q = modularity(n, edges, &p);
        if q > best + 1e-12 {
            best = q;
            argmax = vec![p];
        } else if (q - best).abs() <= 1e-12 {
            argmax.push(p);
        }
    }
    (best, argmax)
}

/// Canonical form of a labelling: relabelled by first appearance.
pub fn canonical(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

pub fn connected_components(n: usize, edges: &[WeightedEdge]) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    fn find(l: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while l[r] != r {
            r = l[r];
        }
        l[x] = r;
        r
    }
    for &(a, b, _) in edges {
        let (ra, rb) = (find(&mut label, a), find(&mut label, b));
        if ra != rb {
            label[ra.max(rb)] = ra.min(rb);
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut label, i)).collect();
    canonical(&roots)
}

/// Weighted TextRank by dense matrix power iteration for a fixed, large
/// number of rounds: `C = (1-d) 1 + d W C` with `W_jk = A_jk / k_k`.
pub fn textrank_power(n: usize, edges: &[WeightedEdge], damping: f64, rounds: usize) -> Vec<f64> {
    let a = adjacency_matrix(n, edges);
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let mut w = vec![vec![0.0; n]; n];
    for j in 0..n {
        for kk in 0..n {
            if a[j][kk] > 0.0 {
                w[j][kk] = a[j][kk] / k[kk];
            }
        }
    }
    let mut c = vec![1.0; n];
    for _ in 0..rounds {
        c = (0..n)
            .map(|j| (1.0 - damping) + damping * (0..n).map(|kk| w[j][kk] * c[kk]).sum::<f64>())
            .collect();
    }
    c
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len());
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for i in 0..u.len() {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    dot / (nu.sqrt() * nv.sqrt())
}

/// Cosine of the shorter sentence against every equal-length window of the
/// longer one, built token by token.
pub fn window_cosines(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<f64> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let probe: Vec<f64> = short.iter().flatten().copied().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k + short.len() <= long.len() {
        let window: Vec<f64> = long[k..k + short.len()].iter().flatten().copied().collect();
        out.push(cosine(&window, &probe));
        k += 1;
    }
    out
}

/// Random weighted graph on `n` nodes; each pair is an edge with probability
/// `p`, weight uniform in `[w_lo, w_hi)`. At least one edge is guaranteed.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64, w_lo: f64, w_hi: f64) -> Vec<WeightedEdge> {
    assert!(n >= 2);
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((a, b, rng.random_range(w_lo..w_hi)));
                }
            }
        }
        if !edges.is_empty() {
            return edges;
        }
    }
}

/// A seeded RNG for test generators.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
