//! Gaussian elimination over GF(2) on packed symplectic vectors.

/// Incrementally built row-echelon basis of a GF(2) subspace.
#[derive(Debug, Clone, Default)]
pub struct Gf2Basis {
    // Each row has a distinct leading bit; kept sorted by leading bit, descending.
    rows: Vec<u128>,
}

impl Gf2Basis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residue of `v` after elimination against the basis; zero iff `v` is in the span.
    pub fn reduce(&self, mut v: u128) -> u128 {
        for &row in &self.rows {
            if v & leading_bit(row) != 0 {
                v ^= row;
            }
        }
        v
    }

    pub fn contains(&self, v: u128) -> bool {
        self.reduce(v) == 0
    }

    /// Adds `v` to the basis; returns false when it was already in the span.
    pub fn insert(&mut self, v: u128) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        let pos = self
            .rows
            .iter()
            .position(|&row| leading_bit(row) < leading_bit(r))
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, r);
        true
    }
}

fn leading_bit(v: u128) -> u128 {
    1u128 << (127 - v.leading_zeros())
}

/// Rank of a set of GF(2) row vectors.
pub fn gf2_rank(vectors: impl IntoIterator<Item = u128>) -> usize {
    let mut basis = Gf2Basis::new();
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(gf2_rank([]), 0);
        assert_eq!(gf2_rank([0]), 0);
        assert_eq!(gf2_rank([0b011, 0b110, 0b101]), 2);
        assert_eq!(gf2_rank([0b001, 0b010, 0b100]), 3);
        assert_eq!(gf2_rank([1u128 << 127, 1u128 << 127 | 1, 1]), 2);
    }

    #[test]
    fn insert_reports_dependence() {
        let mut b = Gf2Basis::new();
        assert!(b.insert(0b1100));
        assert!(b.insert(0b0110));
        assert!(!b.insert(0b1010));
        assert!(b.contains(0b1010));
        assert!(!b.contains(0b0001));
    }

    #[test]
    fn rank_matches_brute_force_span() {
        // Oracle: the span of k vectors has 2^rank elements.
        let vectors = [0b10110u128, 0b01101, 0b11011, 0b00111, 0b11100];
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..1 << vectors.len() {
            let v = vectors
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u128, |acc, (_, &v)| acc ^ v);
            span.insert(v);
        }
        assert_eq!(1usize << gf2_rank(vectors), span.len());
    }
}
