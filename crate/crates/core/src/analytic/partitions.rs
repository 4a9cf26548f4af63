//! Index set of Faà di Bruno's formula: all `(b_1, ..., b_m)` with
//! `b_i >= 0` and `sum i b_i = m`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionTuple(Vec<u32>);

impl PartitionTuple {
    /// Multiplicities `b_1..b_m`; `None` unless `sum i b_i == b.len()`.
    pub fn new(b: Vec<u32>) -> Option<Self> {
        let weight: usize = b
            .iter()
            .enumerate()
            .map(|(i, &bi)| (i + 1) * bi as usize)
            .sum();
        (weight == b.len()).then_some(PartitionTuple(b))
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.0
    }

    /// The `m` this tuple partitions.
    pub fn order(&self) -> usize {
        self.0.len()
    }

    /// `prod h_i^{b_i} / b_i!` with `h[i]` holding `h_i` (index 0 unused).
    pub fn weighted_product(&self, h: &[f64]) -> f64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0)
            .map(|(i, &b)| {
                let hi = h[i + 1];
                (1..=b).fold(1.0, |acc, j| acc * hi / f64::from(j))
            })
            .product()
    }
}

/// All tuples for `m`. `m = 0` yields the single empty tuple, whose product
/// is 1.
pub fn enumerate_partitions(m: usize) -> Vec<PartitionTuple> {
    let mut out = Vec::new();
    let mut b = vec![0u32; m];
    fill(m, m, &mut b, &mut out);
    out
}

// assigns b_part for part sizes part, part-1, ..., 1
fn fill(part: usize, remaining: usize, b: &mut [u32], out: &mut Vec<PartitionTuple>) {
    if part <= 1 {
        if part == 1 {
            b[0] = remaining as u32;
        } else if remaining != 0 {
            return;
        }
        out.push(PartitionTuple(b.to_vec()));
        if part == 1 {
            b[0] = 0;
        }
        return;
    }
    for count in (0..=remaining / part).rev() {
        b[part - 1] = count as u32;
        fill(part - 1, remaining - count * part, b, out);
    }
    b[part - 1] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    // every tuple in the box b_i <= m / i, filtered by weight
    fn brute_force(m: usize) -> HashSet<Vec<u32>> {
        let mut found = HashSet::new();
        let bounds: Vec<u32> = (1..=m).map(|i| (m / i) as u32).collect();
        let mut cur = vec![0u32; m];
        loop {
            let w: usize = cur
                .iter()
                .enumerate()
                .map(|(i, &b)| (i + 1) * b as usize)
                .sum();
            if w == m {
                found.insert(cur.clone());
            }
            let mut idx = 0;
            loop {
                if idx == m {
                    return found;
                }
                if cur[idx] < bounds[idx] {
                    cur[idx] += 1;
                    break;
                }
                cur[idx] = 0;
                idx += 1;
            }
        }
    }

    #[test]
    fn small_sets() {
        let b0 = enumerate_partitions(0);
        assert_eq!(b0.len(), 1);
        assert!(b0[0].multiplicities().is_empty());
        assert_eq!(b0[0].weighted_product(&[0.0]), 1.0);

        let b1: Vec<_> = enumerate_partitions(1).into_iter().map(|t| t.0).collect();
        assert_eq!(b1, vec![vec![1]]);

        let b2: HashSet<_> = enumerate_partitions(2).into_iter().map(|t| t.0).collect();
        assert_eq!(b2, HashSet::from([vec![2, 0], vec![0, 1]]));
    }

    #[test]
    fn matches_brute_force() {
        assert_eq!(enumerate_partitions(4).len(), 5);
        for m in 1..=9 {
            let got: HashSet<_> = enumerate_partitions(m).into_iter().map(|t| t.0).collect();
            assert_eq!(got, brute_force(m), "m = {m}");
        }
        // partition numbers
        let p = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77];
        for (m, &count) in p.iter().enumerate() {
            assert_eq!(enumerate_partitions(m).len(), count);
        }
    }

    #[test]
    fn constructor_checks_weight() {
        assert!(PartitionTuple::new(vec![2, 0]).is_some());
        assert!(PartitionTuple::new(vec![1, 1]).is_none());
        assert!(PartitionTuple::new(vec![]).is_some());
    }
}
