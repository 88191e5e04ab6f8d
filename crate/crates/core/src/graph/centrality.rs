use std::collections::VecDeque;

use super::Graph;

/// Normalized node betweenness centrality (Brandes' accumulation).
///
/// Values are divided by `(n-1)(n-2)/2`, the number of unordered pairs not
/// containing the node, so they lie in `[0, 1]`.
pub fn betweenness_centrality(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut bc = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();

    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        preds.iter_mut().for_each(Vec::clear);
        order.clear();

        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in g.neighbors(x) {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
                if dist[y] == dist[x] + 1 {
                    sigma[y] += sigma[x];
                    preds[y].push(x);
                }
            }
        }
        for &w in order.iter().rev() {
            for &p in &preds[w] {
                delta[p] += sigma[p] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }

    // Each unordered pair was counted from both endpoints.
    let pairs = if n > 2 { ((n - 1) * (n - 2)) as f64 / 2.0 } else { 1.0 };
    bc.iter_mut().for_each(|b| *b /= 2.0 * pairs);
    bc
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Pair-by-pair definition: fraction of shortest s-t paths through w.
    fn naive(g: &Graph) -> Vec<f64> {
        let n = g.node_count();
        let counts: Vec<_> = (0..n).map(|s| g.shortest_path_counts(s)).collect();
        let mut bc = vec![0.0; n];
        for s in 0..n {
            for t in s + 1..n {
                let Some(dst) = counts[s].0[t] else { continue };
                for w in (0..n).filter(|&w| w != s && w != t) {
                    if let (Some(a), Some(b)) = (counts[s].0[w], counts[w].0[t]) {
                        if a + b == dst {
                            bc[w] += (counts[s].1[w] * counts[w].1[t]) as f64 / counts[s].1[t] as f64;
                        }
                    }
                }
            }
        }
        let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
        bc.iter().map(|b| b / pairs).collect()
    }

    #[test]
    fn star_center_is_on_every_path() {
        let bc = betweenness_centrality(&star(5));
        assert_abs_diff_eq!(bc[0], 1.0, epsilon = 1e-12);
        assert!(bc[1..].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn path_graph_middle() {
        // P5: node 2 lies on 4 of the 6 pairs not containing it.
        let bc = betweenness_centrality(&path(5));
        assert_abs_diff_eq!(bc[2], 4.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn agrees_with_pairwise_definition() {
        for g in [cycle(7), complete(5), path(6), crate::synth::spatial_graph(40, 0.1, 11)] {
            for (a, b) in betweenness_centrality(&g).iter().zip(naive(&g)) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
            }
        }
    }
}
