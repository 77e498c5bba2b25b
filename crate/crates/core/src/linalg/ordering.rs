use std::collections::VecDeque;

use super::sparse::CsrMatrix;

const LEAF_SIZE: usize = 64;

/// Symmetrized adjacency of a square matrix, without self loops.
pub fn symmetric_adjacency(a: &CsrMatrix) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for &j in a.row(i).0 {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

/// Nested-dissection ordering from BFS level-set separators.
///
/// Returns `perm` with `perm[k]` the original index eliminated at step `k`.
pub fn nested_dissection(a: &CsrMatrix) -> Vec<usize> {
    let adj = symmetric_adjacency(a);
    let n = adj.len();
    let mut label = vec![0u32; n];
    let mut level = vec![usize::MAX; n];
    let mut next_label = 1u32;
    let mut out = Vec::with_capacity(n);
    dissect((0..n).collect(), 0, &adj, &mut label, &mut level, &mut next_label, &mut out);
    debug_assert_eq!(out.len(), n);
    out
}

fn bfs(start: usize, tag: u32, adj: &[Vec<usize>], label: &[u32], level: &mut [usize], order: &mut Vec<usize>) {
    order.clear();
    level[start] = 0;
    order.push(start);
    let mut q = VecDeque::from([start]);
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if label[w] == tag && level[w] == usize::MAX {
                level[w] = level[v] + 1;
                order.push(w);
                q.push_back(w);
            }
        }
    }
}

fn dissect(
    nodes: Vec<usize>,
    tag: u32,
    adj: &[Vec<usize>],
    label: &mut [u32],
    level: &mut [usize],
    next_label: &mut u32,
    out: &mut Vec<usize>,
) {
    if nodes.len() <= LEAF_SIZE {
        out.extend(nodes);
        return;
    }
    for &v in &nodes {
        label[v] = tag;
    }
    let mut order = Vec::with_capacity(nodes.len());
    let mut start = nodes[0];
    let mut depth = 0;
    for _ in 0..3 {
        bfs(start, tag, adj, label, level, &mut order);
        let last = *order.last().unwrap();
        let d = level[last];
        for &v in &order {
            level[v] = usize::MAX;
        }
        if d <= depth && depth > 0 {
            break;
        }
        depth = d;
        start = last;
    }
    bfs(start, tag, adj, label, level, &mut order);
    let reached = order.len();
    let max_level = level[*order.last().unwrap()];

    let mut part_a = Vec::new();
    let mut part_b = Vec::new();
    let mut sep = Vec::new();
    if max_level < 2 {
        // Too dense to split by levels.
        for &v in &order {
            level[v] = usize::MAX;
        }
        let seen: std::collections::HashSet<usize> = order.iter().copied().collect();
        let rest: Vec<usize> = nodes.iter().copied().filter(|v| !seen.contains(v)).collect();
        out.extend(order.iter().copied());
        if !rest.is_empty() {
            let t = *next_label;
            *next_label += 1;
            dissect(rest, t, adj, label, level, next_label, out);
        }
        return;
    }
    let half = reached / 2;
    let mut count = 0;
    let mut split = 1;
    let mut per_level = vec![0usize; max_level + 1];
    for &v in &order {
        per_level[level[v]] += 1;
    }
    for (l, &c) in per_level.iter().enumerate() {
        count += c;
        if count >= half {
            split = l.clamp(1, max_level - 1);
            break;
        }
    }
    for &v in &order {
        match level[v].cmp(&split) {
            std::cmp::Ordering::Less => part_a.push(v),
            std::cmp::Ordering::Equal => sep.push(v),
            std::cmp::Ordering::Greater => part_b.push(v),
        }
    }
    for &v in &order {
        level[v] = usize::MAX;
    }
    if reached < nodes.len() {
        let in_order: std::collections::HashSet<usize> = order.iter().copied().collect();
        part_b.extend(nodes.iter().copied().filter(|v| !in_order.contains(v)));
    }
    for &v in &sep {
        label[v] = 0;
    }
    let ta = *next_label;
    let tb = *next_label + 1;
    *next_label += 2;
    dissect(part_a, ta, adj, label, level, next_label, out);
    dissect(part_b, tb, adj, label, level, next_label, out);
    out.extend(sep);
}

/// Reverse Cuthill–McKee ordering.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let adj = symmetric_adjacency(a);
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| adj[v].len());
    for &s in &by_degree {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nb.sort_by_key(|&w| adj[w].len());
            for w in nb {
                visited[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_laplacian(m: usize) -> CsrMatrix {
        let id = |i: usize, j: usize| i * m + j;
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                t.push((id(i, j), id(i, j), 4.0));
                if i + 1 < m {
                    t.push((id(i, j), id(i + 1, j), -1.0));
                    t.push((id(i + 1, j), id(i, j), -1.0));
                }
                if j + 1 < m {
                    t.push((id(i, j), id(i, j + 1), -1.0));
                    t.push((id(i, j + 1), id(i, j), -1.0));
                }
            }
        }
        CsrMatrix::from_triplets(m * m, m * m, &t)
    }

    #[test]
    fn orderings_are_permutations() {
        let a = grid_laplacian(30);
        for p in [nested_dissection(&a), reverse_cuthill_mckee(&a)] {
            let mut s = p.clone();
            s.sort_unstable();
            assert_eq!(s, (0..900).collect::<Vec<_>>());
        }
    }
}
