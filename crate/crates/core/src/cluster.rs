//! 8-connected grouping of grid cells.

use std::collections::HashMap;

/// Groups `cells` into 8-connected components. Returns indices into `cells`;
/// components are ordered by their earliest member and members keep input order.
pub fn connected_components(cells: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let index: HashMap<(usize, usize), usize> =
        cells.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut seen = vec![false; cells.len()];
    let mut components = Vec::new();
    for start in 0..cells.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(k) = stack.pop() {
            members.push(k);
            let (i, j) = cells[k];
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 {
                        continue;
                    }
                    if let Some(&n) = index.get(&(ni as usize, nj as usize)) {
                        if !seen[n] {
                            seen[n] = true;
                            stack.push(n);
                        }
                    }
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}
