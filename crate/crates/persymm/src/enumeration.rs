//! Exhaustive enumeration oracles.
//!
//! Everything here counts exactly or refuses: a bit budget caps the size of
//! the enumerated coefficient space (2^bits tuples). Enumeration is
//! embarrassingly parallel; workers accumulate private count vectors that
//! are merged by addition, so results do not depend on the worker count.

use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::dist::{JointRankProfile, Method, RankDistribution, ShapeClass};
use crate::shape::{MixedShape, ShapeError, TripleShape};

/// Default ceiling on enumerated bits (~16M tuples).
pub const DEFAULT_BIT_BUDGET: u32 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("enumeration needs {required_bits} free bits, budget is {budget}")]
    BudgetExceeded { required_bits: usize, budget: u32 },
    #[error("width k={k} exceeds the 64-column enumeration kernel")]
    WidthTooLarge { k: usize },
    #[error("joint profiles need k >= 2, got k={k}")]
    ProfileWidth { k: usize },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

const MAX_ROWS: usize = 40;

/// XOR basis over u64 rows with distinct leading bits.
#[derive(Clone, Copy)]
struct Basis {
    rows: [u64; MAX_ROWS],
    len: usize,
}

impl Basis {
    #[inline]
    fn new() -> Self {
        Basis {
            rows: [0; MAX_ROWS],
            len: 0,
        }
    }

    #[inline]
    fn add(&mut self, mut row: u64) {
        while row != 0 {
            let lead = 63 - row.leading_zeros() as usize;
            let mut reduced = false;
            for i in 0..self.len {
                let b = self.rows[i];
                if 63 - b.leading_zeros() as usize == lead {
                    row ^= b;
                    reduced = true;
                    break;
                }
            }
            if !reduced {
                self.rows[self.len] = row;
                self.len += 1;
                return;
            }
        }
    }

    #[inline]
    fn rank(&self) -> usize {
        self.len
    }
}

/// Rows of the b-row persymmetric block of width k generated by `coeffs`
/// (bit i = anti-diagonal i): row r is bits r..r+k-1.
#[inline]
fn add_persym_rows(basis: &mut Basis, coeffs: u64, rows: usize, k: usize) {
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    for r in 0..rows {
        basis.add((coeffs >> r) & mask);
    }
}

fn check_budget(bits: usize, budget: u32) -> Result<(), EnumError> {
    if bits > budget as usize {
        return Err(EnumError::BudgetExceeded {
            required_bits: bits,
            budget,
        });
    }
    Ok(())
}

fn counts_to_dist(shape: ShapeClass, counts: Vec<u64>) -> RankDistribution {
    RankDistribution::new(
        shape,
        counts.into_iter().map(BigUint::from).collect(),
        Method::Brute,
    )
}

/// Exact rank distribution of the triple family by full enumeration.
pub fn gamma_bruteforce(
    shape: &TripleShape,
    bit_budget: u32,
) -> Result<RankDistribution, EnumError> {
    check_budget(shape.total_coeff_bits(), bit_budget)?;
    let [ra, rb, rg] = shape.block_rows();
    let k = shape.k();
    let [la, lb, lg] = shape.coeff_lens();
    if k + rg - 1 > 64 {
        return Err(EnumError::WidthTooLarge { k });
    }
    let maxr = shape.max_rank();
    // outer loop over the widest block so chunks parallelize; the smallest
    // block runs innermost where rows are re-added most often
    let counts = (0usize..1usize << lg)
        .into_par_iter()
        .with_min_len(1 << lg.saturating_sub(8).min(16))
        .fold(
            || vec![0u64; maxr + 1],
            |mut acc, g| {
                let g = g as u64;
                let mut bg = Basis::new();
                add_persym_rows(&mut bg, g, rg, k);
                for b in 0..1u64 << lb {
                    let mut bgb = bg;
                    add_persym_rows(&mut bgb, b, rb, k);
                    for a in 0..1u64 << la {
                        let mut bgba = bgb;
                        add_persym_rows(&mut bgba, a, ra, k);
                        acc[bgba.rank()] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; maxr + 1],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );
    Ok(counts_to_dist(ShapeClass::Triple(*shape), counts))
}

/// Exact rank distribution of two stacked persymmetric blocks.
pub fn gamma_bruteforce_double(
    rows1: usize,
    rows2: usize,
    k: usize,
    bit_budget: u32,
) -> Result<RankDistribution, EnumError> {
    if rows1 == 0 || rows2 == 0 || k == 0 {
        return Err(ShapeError::Degenerate {
            what: "double shape",
        }
        .into());
    }
    let (l1, l2) = (k + rows1 - 1, k + rows2 - 1);
    check_budget(l1 + l2, bit_budget)?;
    if k + rows1.max(rows2) - 1 > 64 {
        return Err(EnumError::WidthTooLarge { k });
    }
    // put the taller block outermost
    let (ro, lo, ri, li) = if rows1 >= rows2 {
        (rows1, l1, rows2, l2)
    } else {
        (rows2, l2, rows1, l1)
    };
    let maxr = k.min(rows1 + rows2);
    let counts = (0usize..1usize << lo)
        .into_par_iter()
        .with_min_len(1 << lo.saturating_sub(8).min(16))
        .fold(
            || vec![0u64; maxr + 1],
            |mut acc, o| {
                let o = o as u64;
                let mut bo = Basis::new();
                add_persym_rows(&mut bo, o, ro, k);
                for i in 0..1u64 << li {
                    let mut boi = bo;
                    add_persym_rows(&mut boi, i, ri, k);
                    acc[boi.rank()] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; maxr + 1],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );
    Ok(counts_to_dist(
        ShapeClass::Double { rows1, rows2, k },
        counts,
    ))
}

/// Exact rank distribution of the mixed family: all (general rows, t, eta).
pub fn gamma_bruteforce_mixed(
    ms: &MixedShape,
    bit_budget: u32,
) -> Result<RankDistribution, EnumError> {
    check_budget(ms.total_coeff_bits(), bit_budget)?;
    let (n, m, l, k) = (ms.n(), ms.m(), ms.l(), ms.k());
    let (lt, le) = (k + m, k + m + l);
    if le > 64 || n * k > 63 {
        return Err(EnumError::WidthTooLarge { k });
    }
    let maxr = ms.max_rank();
    let kmask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let counts = (0usize..1usize << (n * k))
        .into_par_iter()
        .with_min_len(1 << (n * k).saturating_sub(8).min(16))
        .fold(
            || vec![0u64; maxr + 1],
            |mut acc, gen| {
                let gen = gen as u64;
                let mut bg = Basis::new();
                for j in 0..n {
                    bg.add((gen >> (j * k)) & kmask);
                }
                for e in 0..1u64 << le {
                    let mut bge = bg;
                    add_persym_rows(&mut bge, e, 1 + m + l, k);
                    for t in 0..1u64 << lt {
                        let mut bget = bge;
                        add_persym_rows(&mut bget, t, 1 + m, k);
                        acc[bget.rank()] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; maxr + 1],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += b;
                }
                x
            },
        );
    Ok(counts_to_dist(ShapeClass::Mixed(*ms), counts))
}

/// Joint rank profiles of the four nested stacks at widths k-1 and k.
pub fn joint_profiles(
    shape: &TripleShape,
    bit_budget: u32,
) -> Result<JointRankProfile, EnumError> {
    let k = shape.k();
    if k < 2 {
        return Err(EnumError::ProfileWidth { k });
    }
    check_budget(shape.total_coeff_bits(), bit_budget)?;
    let [ra, rb, rg] = shape.block_rows();
    let [la, lb, lg] = shape.coeff_lens();
    if k + rg - 1 > 64 {
        return Err(EnumError::WidthTooLarge { k });
    }
    let kmask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let k1mask = (1u64 << (k - 1)) - 1;
    let maps = (0usize..1usize << lg)
        .into_par_iter()
        .with_min_len(1 << lg.saturating_sub(6).min(16))
        .fold(
            HashMap::<[u8; 8], u64>::new,
            |mut acc, g| {
                let g = g as u64;
                for b in 0..1u64 << lb {
                    for a in 0..1u64 << la {
                        let mut full = Basis::new();
                        let mut cut = Basis::new();
                        let mut profile = [0u8; 8];
                        // stage 1: all blocks one row short
                        for (coeffs, rows) in [(a, ra - 1), (b, rb - 1), (g, rg - 1)] {
                            for r in 0..rows {
                                let row = (coeffs >> r) & kmask;
                                full.add(row);
                                cut.add(row & k1mask);
                            }
                        }
                        profile[0] = cut.rank() as u8;
                        profile[1] = full.rank() as u8;
                        // stages 2..4 restore each block's last row in turn
                        for (idx, (coeffs, last)) in
                            [(a, ra - 1), (b, rb - 1), (g, rg - 1)].into_iter().enumerate()
                        {
                            let row = (coeffs >> last) & kmask;
                            full.add(row);
                            cut.add(row & k1mask);
                            profile[2 + 2 * idx] = cut.rank() as u8;
                            profile[3 + 2 * idx] = full.rank() as u8;
                        }
                        *acc.entry(profile).or_insert(0) += 1;
                    }
                }
                acc
            },
        )
        .reduce(HashMap::new, |mut x, y| {
            for (key, c) in y {
                *x.entry(key).or_insert(0) += c;
            }
            x
        });
    Ok(JointRankProfile {
        shape: *shape,
        counts: maps.into_iter().collect(),
    })
}

/// Carry-less product of bit-packed polynomials over GF(2).
#[inline]
pub fn clmul(a: u64, mut b: u64) -> u64 {
    debug_assert!(
        a == 0 || b == 0 || (64 - a.leading_zeros()) + (64 - b.leading_zeros()) <= 65,
        "clmul overflow"
    );
    let mut r = 0u64;
    while b != 0 {
        let low = b & b.wrapping_neg();
        r ^= a << low.trailing_zeros();
        b ^= low;
    }
    r
}

/// Number of q-tuples (Y_i, Z_i, U_i, V_i) of polynomials over GF(2) with
/// deg Y <= k-1, deg Z <= s-1, deg U <= s+m-1, deg V <= s+m+l-1 satisfying
/// sum Y_i Z_i = sum Y_i U_i = sum Y_i V_i = 0.
pub fn solution_count_bruteforce(
    q: usize,
    k: usize,
    s: usize,
    m: usize,
    l: usize,
    bit_budget: u32,
) -> Result<BigUint, EnumError> {
    assert!(q >= 1 && k >= 1 && s >= 1);
    let d = k + s + (s + m) + (s + m + l);
    let total_bits = q * d;
    check_budget(total_bits, bit_budget)?;
    if total_bits > 63 {
        return Err(EnumError::WidthTooLarge { k });
    }
    let (dy, dz, du, dv) = (k, s, s + m, s + m + l);
    let my = (1u64 << dy) - 1;
    let mz = (1u64 << dz) - 1;
    let mu = (1u64 << du) - 1;
    let mv = (1u64 << dv) - 1;
    let count = (0usize..1usize << total_bits)
        .into_par_iter()
        .with_min_len(1 << (total_bits).saturating_sub(8).min(16))
        .map(|x| {
            let (mut pz, mut pu, mut pv) = (0u64, 0u64, 0u64);
            let mut rest = x as u64;
            for _ in 0..q {
                let y = rest & my;
                rest >>= dy;
                let z = rest & mz;
                rest >>= dz;
                let u = rest & mu;
                rest >>= du;
                let v = rest & mv;
                rest >>= dv;
                pz ^= clmul(y, z);
                pu ^= clmul(y, u);
                pv ^= clmul(y, v);
            }
            u64::from(pz == 0 && pu == 0 && pv == 0)
        })
        .sum::<u64>();
    Ok(BigUint::from(count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{stack_triple, CoefficientTriple};

    fn dist_u64(d: &RankDistribution) -> Vec<u64> {
        d.counts
            .iter()
            .map(|c| u64::try_from(c).expect("fits"))
            .collect()
    }

    #[test]
    fn kernel_matches_bitmatrix_rank() {
        let shape = TripleShape::new(2, 1, 0, 3).unwrap();
        let [la, lb, lg] = shape.coeff_lens();
        for seed in [0u64, 1, 9157, 40991, 65535] {
            let (a, b, g) = (
                seed & ((1 << la) - 1),
                (seed >> 3) & ((1 << lb) - 1),
                (seed >> 7) & ((1 << lg) - 1),
            );
            let c = CoefficientTriple::from_u64(&shape, a, b, g);
            let mat = stack_triple(&c, &shape).unwrap();
            let mut basis = Basis::new();
            add_persym_rows(&mut basis, g, 3, 3);
            add_persym_rows(&mut basis, b, 3, 3);
            add_persym_rows(&mut basis, a, 2, 3);
            assert_eq!(basis.rank(), mat.rank());
        }
    }

    #[test]
    fn triple_small_examples() {
        let d = gamma_bruteforce(&TripleShape::new(1, 0, 0, 1).unwrap(), 24).unwrap();
        assert_eq!(dist_u64(&d), vec![1, 7]);
        let d = gamma_bruteforce(&TripleShape::new(2, 0, 0, 2).unwrap(), 24).unwrap();
        assert_eq!(dist_u64(&d), vec![1, 21, 490]);
        let d = gamma_bruteforce(&TripleShape::new(1, 1, 1, 3).unwrap(), 24).unwrap();
        assert_eq!(dist_u64(&d), vec![1, 25, 366, 3704]);
    }

    #[test]
    fn triple_budget_refusal() {
        let shape = TripleShape::new(3, 0, 0, 8).unwrap();
        match gamma_bruteforce(&shape, 20) {
            Err(EnumError::BudgetExceeded { required_bits, .. }) => {
                assert_eq!(required_bits, shape.total_coeff_bits())
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn double_examples() {
        let d = gamma_bruteforce_double(1, 1, 1, 24).unwrap();
        assert_eq!(dist_u64(&d), vec![1, 3]);
        let d = gamma_bruteforce_double(2, 5, 4, 24).unwrap();
        assert_eq!(dist_u64(&d), vec![1, 9, 94, 600, 7488]);
        assert_eq!(d.counts[2], BigUint::from((1u64 << 5) + 62));
    }

    #[test]
    fn mixed_examples() {
        let d = gamma_bruteforce_mixed(&MixedShape::new(0, 0, 0, 1).unwrap(), 24).unwrap();
        assert_eq!(dist_u64(&d), vec![1, 3]);
        let d = gamma_bruteforce_mixed(&MixedShape::new(1, 0, 0, 2).unwrap(), 24).unwrap();
        assert_eq!(dist_u64(&d), vec![1, 21, 42]);
    }

    #[test]
    fn mixed_golden_table() {
        let d = gamma_bruteforce_mixed(&MixedShape::new(2, 1, 3, 5).unwrap(), 25).unwrap();
        assert_eq!(
            dist_u64(&d),
            vec![1, 129, 4566, 94440, 1714368, 31740928]
        );
    }

    #[test]
    fn block_order_does_not_matter() {
        // [1,2,3] enumerated as canonical (s,m,l)=(1,1,1) — same multiset of
        // blocks in any order gives the same distribution
        let d1 = gamma_bruteforce(&TripleShape::from_blocks(3, 1, 2, 3).unwrap(), 24).unwrap();
        let d2 = gamma_bruteforce(&TripleShape::new(1, 1, 1, 3).unwrap(), 24).unwrap();
        assert_eq!(d1.counts, d2.counts);
    }

    #[test]
    fn profiles_small() {
        let shape = TripleShape::new(2, 0, 0, 2).unwrap();
        let p = joint_profiles(&shape, 24).unwrap();
        assert_eq!(p.total(), BigUint::from(1u64) << shape.total_coeff_bits());
        // all-zero tuple contributes the all-zeros profile
        assert!(p.counts.get(&[0u8; 8]).copied().unwrap_or(0) >= 1);
        for j in 0..=p.stair_range_max() {
            assert_eq!(p.stair_profile_count(j), 0, "stair profile at j={j}");
        }
    }

    #[test]
    fn profiles_monotone_within_width() {
        let shape = TripleShape::new(2, 1, 0, 3).unwrap();
        let p = joint_profiles(&shape, 24).unwrap();
        for key in p.counts.keys() {
            let cut = [key[0], key[2], key[4], key[6]];
            let full = [key[1], key[3], key[5], key[7]];
            assert!(cut.windows(2).all(|w| w[0] <= w[1]));
            assert!(full.windows(2).all(|w| w[0] <= w[1]));
            for (c, f) in cut.iter().zip(full) {
                assert!(*c <= f && f <= c + 1);
            }
        }
    }

    #[test]
    fn solution_counts() {
        assert_eq!(
            solution_count_bruteforce(1, 2, 1, 0, 0, 24).unwrap(),
            BigUint::from(11u32)
        );
        assert_eq!(
            solution_count_bruteforce(1, 1, 1, 0, 0, 24).unwrap(),
            BigUint::from(9u32)
        );
        assert_eq!(
            solution_count_bruteforce(2, 2, 1, 0, 0, 24).unwrap(),
            BigUint::from(142u32)
        );
    }

    #[test]
    fn clmul_basics() {
        assert_eq!(clmul(0b11, 0b11), 0b101); // (x+1)^2 = x^2+1
        assert_eq!(clmul(0b101, 0b10), 0b1010);
        assert_eq!(clmul(0, 0b1111), 0);
    }
}
