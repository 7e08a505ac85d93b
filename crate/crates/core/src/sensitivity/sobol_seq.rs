//! Unscrambled Sobol' low-discrepancy sequence with Joe-Kuo direction numbers.

use crate::error::{Error, Result};

const BITS: usize = 32;

/// (s, a, m_1..m_s) for dimensions 2.. of the Joe-Kuo D(6) table.
const DIRECTIONS: &[(u32, u32, &[u32])] = &[
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
    (6, 19, &[1, 1, 1, 15, 7, 5]),
    (6, 22, &[1, 3, 1, 15, 13, 25]),
    (6, 25, &[1, 1, 5, 5, 19, 61]),
    (7, 1, &[1, 3, 7, 11, 23, 15, 103]),
    (7, 4, &[1, 3, 7, 13, 13, 15, 69]),
];

/// Largest supported dimension.
pub const MAX_DIMENSION: usize = DIRECTIONS.len() + 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SobolSequence {
    v: Vec<[u32; BITS]>,
}

impl SobolSequence {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::Invalid(format!(
                "Sobol dimension {dimension} outside 1..={MAX_DIMENSION}"
            )));
        }
        let mut v = Vec::with_capacity(dimension);
        let mut first = [0u32; BITS];
        for (k, x) in first.iter_mut().enumerate() {
            *x = 1 << (BITS - 1 - k);
        }
        v.push(first);
        for &(s, a, m) in DIRECTIONS.iter().take(dimension - 1) {
            let s = s as usize;
            let mut d = [0u32; BITS];
            for k in 0..BITS {
                d[k] = if k < s {
                    m[k] << (BITS - 1 - k)
                } else {
                    let mut x = d[k - s] ^ (d[k - s] >> s);
                    for l in 1..s {
                        if (a >> (s - 1 - l)) & 1 == 1 {
                            x ^= d[k - l];
                        }
                    }
                    x
                };
            }
            v.push(d);
        }
        Ok(SobolSequence { v })
    }

    pub fn dimension(&self) -> usize {
        self.v.len()
    }

    /// Point `index` (0-based; point 0 is the origin).
    pub fn point(&self, index: u64) -> Vec<f64> {
        let gray = index ^ (index >> 1);
        self.v
            .iter()
            .map(|d| {
                let mut x = 0u32;
                for (k, &dk) in d.iter().enumerate() {
                    if (gray >> k) & 1 == 1 {
                        x ^= dk;
                    }
                }
                f64::from(x) / 4_294_967_296.0
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_points_in_two_dimensions() {
        let s = SobolSequence::new(2).unwrap();
        let expect = [[0.0, 0.0], [0.5, 0.5], [0.75, 0.25], [0.25, 0.75], [0.375, 0.375], [0.875, 0.875]];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(s.point(i as u64), e.to_vec(), "point {i}");
        }
    }

    #[test]
    fn each_coordinate_is_stratified() {
        // Any 2^k consecutive points from 0 put one point in each 2^-k interval.
        let s = SobolSequence::new(MAX_DIMENSION).unwrap();
        let n = 64;
        for j in 0..MAX_DIMENSION {
            let mut cells = vec![0; n];
            for i in 0..n as u64 {
                cells[(s.point(i)[j] * n as f64) as usize] += 1;
            }
            assert!(cells.iter().all(|&c| c == 1), "dimension {j}");
        }
    }

    #[test]
    fn dimension_bounds() {
        assert!(SobolSequence::new(0).is_err());
        assert!(SobolSequence::new(MAX_DIMENSION + 1).is_err());
    }
}
