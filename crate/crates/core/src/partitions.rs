//! Ordered set partitions, shared by the keyframe and animation recommenders.

/// All ordered partitions of `{0, .., n-1}` into at most `max_blocks`
/// nonempty blocks.
///
/// Results come grouped by block count, then in lexicographic order of the
/// element-to-block assignment. Elements inside a block are ascending.
///
/// ```
/// let parts = keystage::partitions::ordered_partitions(2, 2);
/// assert_eq!(parts, vec![
///     vec![vec![0, 1]],
///     vec![vec![0], vec![1]],
///     vec![vec![1], vec![0]],
/// ]);
/// ```
pub fn ordered_partitions(n: usize, max_blocks: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut assignment = vec![0; n];
    for k in 1..=max_blocks.min(n) {
        let mut used = vec![0usize; k];
        surjections(0, k, &mut assignment, &mut used, &mut out);
    }
    out
}

fn surjections(i: usize, k: usize, assignment: &mut [usize], used: &mut [usize], out: &mut Vec<Vec<Vec<usize>>>) {
    let n = assignment.len();
    if i == n {
        let mut blocks = vec![Vec::new(); k];
        for (element, &block) in assignment.iter().enumerate() {
            blocks[block].push(element);
        }
        out.push(blocks);
        return;
    }
    let empty = used.iter().filter(|&&c| c == 0).count();
    for b in 0..k {
        // every block still empty needs one of the remaining elements
        let still_empty = empty - usize::from(used[b] == 0);
        if still_empty > n - i - 1 {
            continue;
        }
        assignment[i] = b;
        used[b] += 1;
        surjections(i + 1, k, assignment, used, out);
        used[b] -= 1;
    }
}
