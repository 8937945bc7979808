//! Rank distributions and joint rank profiles.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::shape::{MixedShape, TripleShape};

/// How a distribution was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Brute,
    Closed,
    Recurrence,
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Closed => "closed",
            Method::Recurrence => "recurrence",
        }
    }
}

/// Identifies the matrix family a distribution belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeClass {
    Triple(TripleShape),
    Double { rows1: usize, rows2: usize, k: usize },
    Mixed(MixedShape),
}

impl ShapeClass {
    pub fn k(&self) -> usize {
        match self {
            ShapeClass::Triple(t) => t.k(),
            ShapeClass::Double { k, .. } => *k,
            ShapeClass::Mixed(m) => m.k(),
        }
    }

    pub fn total_rows(&self) -> usize {
        match self {
            ShapeClass::Triple(t) => t.total_rows(),
            ShapeClass::Double { rows1, rows2, .. } => rows1 + rows2,
            ShapeClass::Mixed(m) => m.total_rows(),
        }
    }

    pub fn max_rank(&self) -> usize {
        self.k().min(self.total_rows())
    }

    /// Free bits generating the family (log2 of the tuple count).
    pub fn total_coeff_bits(&self) -> usize {
        match self {
            ShapeClass::Triple(t) => t.total_coeff_bits(),
            ShapeClass::Double { rows1, rows2, k } => (k + rows1 - 1) + (k + rows2 - 1),
            ShapeClass::Mixed(m) => m.total_coeff_bits(),
        }
    }
}

impl fmt::Display for ShapeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeClass::Triple(t) => {
                let [a, b, c] = t.block_rows();
                write!(f, "[{},{},{}]x{}", a, b, c, t.k())
            }
            ShapeClass::Double { rows1, rows2, k } => write!(f, "[{},{}]x{}", rows1, rows2, k),
            ShapeClass::Mixed(m) => {
                write!(f, "[({}),{},{}]x{}", m.n(), 1 + m.m(), 1 + m.m() + m.l(), m.k())
            }
        }
    }
}

/// Exact counts of coefficient tuples by the rank of their stacked matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDistribution {
    pub shape: ShapeClass,
    pub counts: Vec<BigUint>,
    pub method: Method,
}

impl RankDistribution {
    pub fn new(shape: ShapeClass, counts: Vec<BigUint>, method: Method) -> Self {
        debug_assert_eq!(counts.len(), shape.max_rank() + 1);
        RankDistribution {
            shape,
            counts,
            method,
        }
    }

    /// Count at rank `i`; zero past the last index.
    pub fn count(&self, i: usize) -> BigUint {
        self.counts.get(i).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// 2^(total coefficient bits), the expected total.
    pub fn expected_total(&self) -> BigUint {
        BigUint::one() << self.shape.total_coeff_bits()
    }
}

/// Counts of 8-tuples of ranks of the four nested stacks at widths k-1 and k.
///
/// Tuple layout: (r1(k-1), r1(k), r2(k-1), r2(k), r3(k-1), r3(k),
/// r4(k-1), r4(k)) where stack 1 drops the last row of every block and
/// stacks 2..4 restore them one block at a time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointRankProfile {
    pub shape: TripleShape,
    pub counts: BTreeMap<[u8; 8], u64>,
}

impl JointRankProfile {
    pub fn total(&self) -> BigUint {
        self.counts.values().map(|&c| BigUint::from(c)).sum()
    }

    /// Count of the profile (j, j+1, j, j+1, j, j+1, j, j+1).
    pub fn stair_profile_count(&self, j: usize) -> u64 {
        let j = j as u8;
        let key = [j, j + 1, j, j + 1, j, j + 1, j, j + 1];
        self.counts.get(&key).copied().unwrap_or(0)
    }

    /// Largest j the vanishing statement covers: min(3s+2m+l-3, k-2).
    pub fn stair_range_max(&self) -> usize {
        (self.shape.total_rows() - 3).min(self.shape.k() - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_class_display() {
        let t = TripleShape::new(2, 1, 3, 4).unwrap();
        assert_eq!(ShapeClass::Triple(t).to_string(), "[2,3,6]x4");
        let m = MixedShape::new(2, 1, 3, 5).unwrap();
        assert_eq!(ShapeClass::Mixed(m).to_string(), "[(2),2,5]x5");
        assert_eq!(
            ShapeClass::Double {
                rows1: 2,
                rows2: 5,
                k: 4
            }
            .to_string(),
            "[2,5]x4"
        );
    }

    #[test]
    fn distribution_count_past_end_is_zero() {
        let t = TripleShape::new(1, 0, 0, 1).unwrap();
        let d = RankDistribution::new(
            ShapeClass::Triple(t),
            vec![BigUint::from(1u32), BigUint::from(7u32)],
            Method::Brute,
        );
        assert_eq!(d.count(0), BigUint::from(1u32));
        assert_eq!(d.count(5), BigUint::zero());
        assert_eq!(d.total(), BigUint::from(8u32));
        assert_eq!(d.expected_total(), BigUint::from(8u32));
    }
}
