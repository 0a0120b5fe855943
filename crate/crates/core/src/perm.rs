//! Permutation helpers: lexicographic enumeration and increasing runs.

/// Rearranges `items` into the next lexicographic permutation. Returns
/// `false` (leaving `items` sorted ascending) after the last one.
pub fn next_permutation<T: Ord>(items: &mut [T]) -> bool {
    let n = items.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && items[i - 1] >= items[i] {
        i -= 1;
    }
    if i == 0 {
        items.reverse();
        return false;
    }
    let mut j = n - 1;
    while items[j] <= items[i - 1] {
        j -= 1;
    }
    items.swap(i - 1, j);
    items[i..].reverse();
    true
}

/// All permutations of `1..=n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct Permutations {
    current: Vec<u32>,
    done: bool,
}

impl Permutations {
    pub fn new(n: u32) -> Self {
        Permutations { current: (1..=n).collect(), done: false }
    }
}

impl Iterator for Permutations {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !next_permutation(&mut self.current);
        Some(out)
    }
}

/// Lengths of the maximal increasing runs, left to right.
pub fn run_lengths(seq: &[u32]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut len = 0;
    for (i, &x) in seq.iter().enumerate() {
        if i > 0 && x < seq[i - 1] {
            out.push(len);
            len = 0;
        }
        len += 1;
    }
    if len > 0 {
        out.push(len);
    }
    out
}
