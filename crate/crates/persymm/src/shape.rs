//! Shape parameters for stacked persymmetric matrices and their builders.
//!
//! A triple stack has three persymmetric blocks of s, s+m and s+m+l rows
//! over a common width k. A block with b rows is generated by b+k-1
//! anti-diagonal coefficients, so the three blocks take k+s-1, k+s+m-1 and
//! k+s+m+l-1 coefficient bits; coefficient index i (0-based) sits on
//! anti-diagonal i, i.e. paper-style alpha_{i+1} lives at bit i.

use thiserror::Error;

use crate::gf2::{persymmetric_matrix, vstack, BitMatrix, Bits};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what}: expected {}x{}, got {}x{}", expected.0, expected.1, got.0, got.1)]
    DimensionMismatch {
        what: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("{what}: degenerate dimensions rejected")]
    Degenerate { what: &'static str },
    #[error("column range {requested} out of 1..={cols}")]
    ColumnRange { requested: usize, cols: usize },
}

/// Block-size parameters (s, m, l) and width k of a triple stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripleShape {
    s: usize,
    m: usize,
    l: usize,
    k: usize,
}

impl TripleShape {
    pub fn new(s: usize, m: usize, l: usize, k: usize) -> Result<Self, ShapeError> {
        if s == 0 || k == 0 {
            return Err(ShapeError::Degenerate {
                what: "triple shape (s >= 1, k >= 1)",
            });
        }
        Ok(TripleShape { s, m, l, k })
    }

    pub fn s(&self) -> usize {
        self.s
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_rows(&self) -> [usize; 3] {
        [self.s, self.s + self.m, self.s + self.m + self.l]
    }

    pub fn total_rows(&self) -> usize {
        3 * self.s + 2 * self.m + self.l
    }

    /// Coefficient lengths of the three blocks at width k.
    pub fn coeff_lens(&self) -> [usize; 3] {
        let k = self.k;
        [
            k + self.s - 1,
            k + self.s + self.m - 1,
            k + self.s + self.m + self.l - 1,
        ]
    }

    /// Total free coefficient bits: 3k + 3s + 2m + l - 3.
    pub fn total_coeff_bits(&self) -> usize {
        self.coeff_lens().iter().sum()
    }

    pub fn max_rank(&self) -> usize {
        self.k.min(self.total_rows())
    }

    /// The same shape at width `k`.
    pub fn with_k(&self, k: usize) -> Result<Self, ShapeError> {
        TripleShape::new(self.s, self.m, self.l, k)
    }

    /// Canonical form of arbitrary block sizes: sorted ascending, then
    /// (s, m, l) recovered as (r0, r1-r0, r2-r1). Rank statistics are
    /// invariant under block permutation, so distributions agree.
    pub fn from_blocks(r0: usize, r1: usize, r2: usize, k: usize) -> Result<Self, ShapeError> {
        let mut b = [r0, r1, r2];
        b.sort_unstable();
        if b[0] == 0 {
            return Err(ShapeError::Degenerate {
                what: "triple blocks (each block >= 1 row)",
            });
        }
        TripleShape::new(b[0], b[1] - b[0], b[2] - b[1], k)
    }
}

/// Parameters (n, m, l, k) of a stack with n unstructured rows on top of
/// persymmetric blocks of 1+m and 1+m+l rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MixedShape {
    n: usize,
    m: usize,
    l: usize,
    k: usize,
}

impl MixedShape {
    pub fn new(n: usize, m: usize, l: usize, k: usize) -> Result<Self, ShapeError> {
        if k == 0 {
            return Err(ShapeError::Degenerate {
                what: "mixed shape (k >= 1)",
            });
        }
        Ok(MixedShape { n, m, l, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn l(&self) -> usize {
        self.l
    }
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn total_rows(&self) -> usize {
        self.n + 2 * self.m + self.l + 2
    }

    /// Free bits: n*k general entries plus k+m and k+m+l coefficients.
    pub fn total_coeff_bits(&self) -> usize {
        self.n * self.k + (self.k + self.m) + (self.k + self.m + self.l)
    }

    pub fn max_rank(&self) -> usize {
        self.k.min(self.total_rows())
    }
}

/// The three coefficient sequences generating one triple stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTriple {
    pub alpha: Bits,
    pub beta: Bits,
    pub gamma: Bits,
}

impl CoefficientTriple {
    pub fn zeros(shape: &TripleShape) -> Self {
        let [la, lb, lg] = shape.coeff_lens();
        CoefficientTriple {
            alpha: Bits::zeros(la),
            beta: Bits::zeros(lb),
            gamma: Bits::zeros(lg),
        }
    }

    /// Builds from packed words; each length must be <= 64 bits.
    pub fn from_u64(shape: &TripleShape, alpha: u64, beta: u64, gamma: u64) -> Self {
        let [la, lb, lg] = shape.coeff_lens();
        CoefficientTriple {
            alpha: Bits::from_u64(alpha, la),
            beta: Bits::from_u64(beta, lb),
            gamma: Bits::from_u64(gamma, lg),
        }
    }

    pub fn matches(&self, shape: &TripleShape) -> Result<(), ShapeError> {
        let [la, lb, lg] = shape.coeff_lens();
        for (got, expected, what) in [
            (self.alpha.len(), la, "alpha coefficients"),
            (self.beta.len(), lb, "beta coefficients"),
            (self.gamma.len(), lg, "gamma coefficients"),
        ] {
            if got != expected {
                return Err(ShapeError::LengthMismatch {
                    what,
                    expected,
                    got,
                });
            }
        }
        Ok(())
    }
}

/// The (3s+2m+l) x k stack of three persymmetric blocks.
pub fn stack_triple(c: &CoefficientTriple, shape: &TripleShape) -> Result<BitMatrix, ShapeError> {
    c.matches(shape)?;
    let [r0, r1, r2] = shape.block_rows();
    let k = shape.k();
    let a = persymmetric_matrix(&c.alpha, r0, k)?;
    let b = persymmetric_matrix(&c.beta, r1, k)?;
    let g = persymmetric_matrix(&c.gamma, r2, k)?;
    vstack(&vstack(&a, &b)?, &g)
}

/// The (n+2m+l+2) x k stack: n literal rows, then persymmetric blocks of
/// 1+m and 1+m+l rows generated by `t` and `eta`.
pub fn stack_mixed(
    general_rows: &BitMatrix,
    t: &Bits,
    eta: &Bits,
    ms: &MixedShape,
) -> Result<BitMatrix, ShapeError> {
    let k = ms.k();
    if general_rows.rows() != ms.n() || general_rows.cols() != k {
        return Err(ShapeError::DimensionMismatch {
            what: "general rows",
            expected: (ms.n(), k),
            got: (general_rows.rows(), general_rows.cols()),
        });
    }
    if t.len() != k + ms.m() {
        return Err(ShapeError::LengthMismatch {
            what: "t coefficients",
            expected: k + ms.m(),
            got: t.len(),
        });
    }
    if eta.len() != k + ms.m() + ms.l() {
        return Err(ShapeError::LengthMismatch {
            what: "eta coefficients",
            expected: k + ms.m() + ms.l(),
            got: eta.len(),
        });
    }
    let b1 = persymmetric_matrix(t, 1 + ms.m(), k)?;
    let b2 = persymmetric_matrix(eta, 1 + ms.m() + ms.l(), k)?;
    vstack(&vstack(general_rows, &b1)?, &b2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_shape_validation() {
        assert!(TripleShape::new(0, 0, 0, 2).is_err());
        assert!(TripleShape::new(1, 0, 0, 0).is_err());
        let sh = TripleShape::new(2, 1, 3, 4).unwrap();
        assert_eq!(sh.block_rows(), [2, 3, 6]);
        assert_eq!(sh.total_rows(), 11);
        assert_eq!(sh.coeff_lens(), [5, 6, 9]);
        assert_eq!(sh.total_coeff_bits(), 20);
        assert_eq!(sh.max_rank(), 4);
    }

    #[test]
    fn from_blocks_sorts() {
        let sh = TripleShape::from_blocks(3, 1, 2, 5).unwrap();
        assert_eq!((sh.s(), sh.m(), sh.l()), (1, 1, 1));
        assert!(TripleShape::from_blocks(0, 1, 2, 5).is_err());
    }

    #[test]
    fn stack_triple_small() {
        let sh = TripleShape::new(1, 0, 0, 2).unwrap();
        let c = CoefficientTriple::from_u64(&sh, 0b01, 0b10, 0b11);
        let d = stack_triple(&c, &sh).unwrap();
        // rows (1,0), (0,1), (1,1)
        assert_eq!(d.rows(), 3);
        assert!(d.get(0, 0) && !d.get(0, 1));
        assert!(!d.get(1, 0) && d.get(1, 1));
        assert!(d.get(2, 0) && d.get(2, 1));
        assert_eq!(d.rank(), 2);
    }

    #[test]
    fn stack_triple_zero() {
        let sh = TripleShape::new(2, 1, 1, 3).unwrap();
        let d = stack_triple(&CoefficientTriple::zeros(&sh), &sh).unwrap();
        assert!(d.is_zero());
        assert_eq!(d.rank(), 0);
    }

    #[test]
    fn stack_triple_s2_hand_checked() {
        // s=2, k=2: blocks of 2 rows each from 3-bit coefficients
        let sh = TripleShape::new(2, 0, 0, 2).unwrap();
        let c = CoefficientTriple::from_u64(&sh, 0b001, 0b010, 0b100);
        let d = stack_triple(&c, &sh).unwrap();
        assert_eq!((d.rows(), d.cols()), (6, 2));
        // alpha rows (1,0),(0,0); beta rows (0,1),(1,0); gamma rows (0,0),(0,1)
        assert_eq!(d.rank(), 2);
    }

    #[test]
    fn stack_triple_rejects_mismatch() {
        let sh = TripleShape::new(2, 0, 0, 2).unwrap();
        let other = TripleShape::new(2, 1, 0, 2).unwrap();
        let c = CoefficientTriple::zeros(&other);
        assert!(stack_triple(&c, &sh).is_err());
    }

    #[test]
    fn stack_mixed_degenerate_n_is_double() {
        let ms = MixedShape::new(0, 1, 2, 3).unwrap();
        let d = stack_mixed(
            &BitMatrix::zeros(0, 3),
            &Bits::zeros(4),
            &Bits::zeros(6),
            &ms,
        )
        .unwrap();
        assert_eq!((d.rows(), d.cols()), (2 + 4, 3));
        assert!(d.is_zero());
    }

    #[test]
    fn stack_mixed_shape_of_paper_example() {
        // n=2, m=1, l=3, k=5: 9 x 5 with 2 general rows, 2-row and 5-row blocks
        let ms = MixedShape::new(2, 1, 3, 5).unwrap();
        assert_eq!(ms.total_rows(), 9);
        let mut gen = BitMatrix::zeros(2, 5);
        gen.set(0, 0, true);
        gen.set(1, 4, true);
        let mut t = Bits::zeros(6);
        t.set(0, true);
        let eta = Bits::zeros(9);
        let d = stack_mixed(&gen, &t, &eta, &ms).unwrap();
        assert_eq!((d.rows(), d.cols()), (9, 5));
        // persymmetric block row 0 = (t0..t4), row 1 = (t1..t5)
        assert!(d.get(2, 0) && !d.get(3, 0));
        // general row 0 coincides with the first block row here, so rank 2
        assert_eq!(d.rank(), 2);
    }

    #[test]
    fn tuple_to_matrix_is_injective_per_block() {
        // distinct coefficients give distinct matrices: each coefficient is
        // the value of exactly one anti-diagonal
        let sh = TripleShape::new(2, 1, 0, 3).unwrap();
        let a = CoefficientTriple::from_u64(&sh, 0b1011, 0, 0);
        let b = CoefficientTriple::from_u64(&sh, 0b1010, 0, 0);
        assert_ne!(
            stack_triple(&a, &sh).unwrap(),
            stack_triple(&b, &sh).unwrap()
        );
        // and reconstruction: coefficient i of the top block is entry (0, i)
        // for i < k, entry (i-k+1, k-1) past that
        let d = stack_triple(&a, &sh).unwrap();
        for i in 0..4 {
            let got = if i < 3 {
                d.get(0, i)
            } else {
                d.get(i - 2, 2)
            };
            assert_eq!(got, a.alpha.get(i));
        }
    }
}
