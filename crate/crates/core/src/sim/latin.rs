//! Balanced Latin squares for counterbalancing condition order.

use crate::error::{Error, Result};

/// Williams design for even `n`: first row 0, 1, n-1, 2, n-2, …; each later
/// row adds its index mod n.
pub fn balanced_latin_square(n: usize) -> Result<Vec<Vec<usize>>> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::Domain(format!("balanced Latin square needs an even order, got {n}")));
    }
    let mut first = vec![0];
    let (mut lo, mut hi) = (1, n);
    for i in 1..n {
        if i % 2 == 1 {
            first.push(lo);
            lo += 1;
        } else {
            hi -= 1;
            first.push(hi);
        }
    }
    Ok((0..n).map(|r| first.iter().map(|&c| (c + r) % n).collect()).collect())
}

/// Checks row and column permutations and that every ordered pair of
/// distinct conditions is adjacent exactly once.
pub fn is_balanced(square: &[Vec<usize>]) -> bool {
    let n = square.len();
    let perm = |xs: Vec<usize>| {
        let mut seen = vec![false; n];
        xs.len() == n && xs.into_iter().all(|x| x < n && !std::mem::replace(&mut seen[x], true))
    };
    if square.iter().any(|r| !perm(r.clone())) {
        return false;
    }
    if (0..n).any(|c| !perm(square.iter().map(|r| r[c]).collect())) {
        return false;
    }
    let mut pairs = vec![vec![0u32; n]; n];
    for r in square {
        for w in r.windows(2) {
            pairs[w[0]][w[1]] += 1;
        }
    }
    (0..n).all(|a| (0..n).all(|b| a == b || pairs[a][b] == 1))
}
