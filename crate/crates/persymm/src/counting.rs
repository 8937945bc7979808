//! Character sums over truncated Laurent points and exact solution counts.
//!
//! The additive character reads the parity of the T^-1 coefficient of its
//! argument. For a truncated point and bit-packed polynomials that parity
//! is `popcount(coeffs & clmul(Y, Z)) mod 2`, so the whole sum factors over
//! Y into three (or n+2) independent inner sums.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dist::{RankDistribution, ShapeClass};
use crate::enumeration::{clmul, EnumError};
use crate::gf2::{BitMatrix, Bits};
use crate::recurrence::{Engine, RecurrenceError};
use crate::shape::{CoefficientTriple, MixedShape, TripleShape};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("distribution shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("non-integral result in {context}: a correct distribution cannot produce this")]
    NonIntegral { context: String },
    #[error("q must be >= 1")]
    QZero,
}

#[inline]
fn sign_of(masked: u64) -> i64 {
    1 - 2 * ((masked.count_ones() & 1) as i64)
}

/// Direct character sum over all (Y, Z, U, V) with degrees below the block
/// row counts: sum E(tYZ) E(eta YU) E(xi YV).
///
/// Equals 2^(3s+2m+l+k-rank) for the stacked matrix of the point; the test
/// suites assert that identity, this function only sums.
pub fn exp_sum_direct(
    point: &CoefficientTriple,
    shape: &TripleShape,
    bit_budget: u32,
) -> Result<BigInt, EnumError> {
    point.matches(shape)?;
    let (s, m, l, k) = (shape.s(), shape.m(), shape.l(), shape.k());
    let work = k + 3 * s + 2 * m + l;
    if work > bit_budget as usize {
        return Err(EnumError::BudgetExceeded {
            required_bits: work,
            budget: bit_budget,
        });
    }
    let t = point.alpha.to_u64().ok_or(EnumError::WidthTooLarge { k })?;
    let eta = point.beta.to_u64().ok_or(EnumError::WidthTooLarge { k })?;
    let xi = point.gamma.to_u64().ok_or(EnumError::WidthTooLarge { k })?;
    let mut total: i128 = 0;
    for y in 0..1u64 << k {
        let sz: i64 = (0..1u64 << s).map(|z| sign_of(clmul(y, z) & t)).sum();
        if sz == 0 {
            continue;
        }
        let su: i64 = (0..1u64 << (s + m)).map(|u| sign_of(clmul(y, u) & eta)).sum();
        if su == 0 {
            continue;
        }
        let sv: i64 = (0..1u64 << (s + m + l))
            .map(|v| sign_of(clmul(y, v) & xi))
            .sum();
        total += sz as i128 * su as i128 * sv as i128;
    }
    Ok(BigInt::from(total))
}

/// Direct character sum for the mixed family with degree caps m+1, m+l+1
/// and 0: sum E(tYZ) E(eta YU) prod_j E(xi_j Y V_j).
///
/// Equals 2^(k+2m+l+n+4-r) where r is the rank of the zero-extended stack
/// (blocks n, 2+m, 2+m+l with vanishing top coefficients); on points whose
/// visible stack already has rank k the two stacks agree, which covers the
/// full-rank evaluations used downstream.
pub fn exp_sum_mixed(
    general_rows: &BitMatrix,
    t: &Bits,
    eta: &Bits,
    ms: &MixedShape,
    bit_budget: u32,
) -> Result<BigInt, EnumError> {
    let (n, m, l, k) = (ms.n(), ms.m(), ms.l(), ms.k());
    let work = k + (m + 2) + (m + l + 2) + n;
    if work > bit_budget as usize {
        return Err(EnumError::BudgetExceeded {
            required_bits: work,
            budget: bit_budget,
        });
    }
    if general_rows.rows() != n || general_rows.cols() != k {
        return Err(crate::shape::ShapeError::DimensionMismatch {
            what: "general rows",
            expected: (n, k),
            got: (general_rows.rows(), general_rows.cols()),
        }
        .into());
    }
    let tw = t.to_u64().ok_or(EnumError::WidthTooLarge { k })?;
    let ew = eta.to_u64().ok_or(EnumError::WidthTooLarge { k })?;
    let rows: Vec<u64> = (0..n)
        .map(|r| general_rows.row_as_u64(r).expect("k <= 64"))
        .collect();
    let mut total: i128 = 0;
    for y in 0..1u64 << k {
        let sz: i64 = (0..1u64 << (m + 2)).map(|z| sign_of(clmul(y, z) & tw)).sum();
        if sz == 0 {
            continue;
        }
        let su: i64 = (0..1u64 << (m + l + 2))
            .map(|u| sign_of(clmul(y, u) & ew))
            .sum();
        if su == 0 {
            continue;
        }
        let mut prod: i128 = sz as i128 * su as i128;
        for &row in &rows {
            prod *= (1 + sign_of(row & y)) as i128;
        }
        total += prod;
    }
    Ok(BigInt::from(total))
}

/// An exact solution count with a flag marking the extrapolated l > 0 case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RqValue {
    pub value: BigUint,
    /// true when l > 0: the source states the identity for l = 0 only; the
    /// evident general-l prefactor is validated against direct enumeration
    pub extrapolated: bool,
}

fn shift_exact(sum: BigUint, e: i64, context: &str) -> Result<BigUint, CountError> {
    if e >= 0 {
        Ok(sum << u64::try_from(e).unwrap())
    } else {
        let div = BigUint::one() << u64::try_from(-e).unwrap();
        let (q, r) = sum.div_rem(&div);
        if !r.is_zero() {
            return Err(CountError::NonIntegral {
                context: context.to_string(),
            });
        }
        Ok(q)
    }
}

/// Number of solutions of the q-summand bilinear system with triple-family
/// degree caps: 2^((k+3s+2m+l)q - (3k+3s+2m+l-3)) * sum Gamma_i 2^(-iq).
pub fn r_q(q: usize, shape: &TripleShape, dist: &RankDistribution) -> Result<RqValue, CountError> {
    if q == 0 {
        return Err(CountError::QZero);
    }
    if dist.shape != ShapeClass::Triple(*shape) {
        return Err(CountError::ShapeMismatch {
            expected: ShapeClass::Triple(*shape).to_string(),
            got: dist.shape.to_string(),
        });
    }
    let (s, m, l, k) = (shape.s(), shape.m(), shape.l(), shape.k());
    let cap = shape.max_rank();
    let mut sum = BigUint::zero();
    for (i, c) in dist.counts.iter().enumerate() {
        sum += c.clone() << ((cap - i) * q);
    }
    let e = ((k + 3 * s + 2 * m + l) * q) as i64
        - (3 * k + 3 * s + 2 * m + l - 3) as i64
        - (cap * q) as i64;
    Ok(RqValue {
        value: shift_exact(sum, e, "r_q")?,
        extrapolated: l > 0,
    })
}

/// Mixed-family analogue:
/// 2^(q(k+2m+l+n+4) - (2m+l+k(n+2))) * sum Gamma_i 2^(-iq).
pub fn r_q_mixed(
    q: usize,
    ms: &MixedShape,
    dist: &RankDistribution,
) -> Result<BigUint, CountError> {
    if q == 0 {
        return Err(CountError::QZero);
    }
    if dist.shape != ShapeClass::Mixed(*ms) {
        return Err(CountError::ShapeMismatch {
            expected: ShapeClass::Mixed(*ms).to_string(),
            got: dist.shape.to_string(),
        });
    }
    let (n, m, l, k) = (ms.n(), ms.m(), ms.l(), ms.k());
    let cap = ms.max_rank();
    let mut sum = BigUint::zero();
    for (i, c) in dist.counts.iter().enumerate() {
        sum += c.clone() << ((cap - i) * q);
    }
    let e = (q * (k + 2 * m + l + n + 4)) as i64
        - (2 * m + l + k * (n + 2)) as i64
        - (cap * q) as i64;
    shift_exact(sum, e, "r_q_mixed")
}

/// Writes v as (odd, e) with v = odd * 2^e; (0, 0) for zero.
pub fn odd_times_pow2(v: &BigUint) -> (BigUint, u64) {
    if v.is_zero() {
        return (BigUint::zero(), 0);
    }
    let e = v.trailing_zeros().unwrap_or(0);
    (v >> e, e)
}

/// Fraction of square-width stacks of the l = 0 family that are invertible,
/// as a reduced fraction.
pub fn invertible_fraction(
    s: usize,
    m: usize,
    engine: &Engine,
) -> Result<(BigUint, BigUint), RecurrenceError> {
    let k = 3 * s + 2 * m;
    let shape = TripleShape::new(s, m, 0, k).expect("k >= 1");
    let num = engine.gamma(&shape, k)?;
    let den = BigUint::one() << (12 * s + 8 * m - 3);
    let g = num.gcd(&den);
    Ok((num / &g, den / g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{gamma_bruteforce, gamma_bruteforce_mixed};
    use crate::formulas::gamma_ssm;
    use crate::shape::stack_triple;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn exp_sum_zero_point() {
        let shape = TripleShape::new(1, 0, 0, 1).unwrap();
        let p = CoefficientTriple::zeros(&shape);
        assert_eq!(exp_sum_direct(&p, &shape, 24).unwrap(), BigInt::from(16));
    }

    #[test]
    fn exp_sum_rank_one_point() {
        let shape = TripleShape::new(1, 0, 0, 1).unwrap();
        let p = CoefficientTriple::from_u64(&shape, 1, 0, 0);
        assert_eq!(stack_triple(&p, &shape).unwrap().rank(), 1);
        assert_eq!(exp_sum_direct(&p, &shape, 24).unwrap(), BigInt::from(8));
    }

    #[test]
    fn exp_sum_identity_on_sampled_points() {
        for (s, m, l, k) in [(1, 0, 0, 2), (1, 1, 0, 2), (2, 0, 0, 2), (1, 0, 1, 2)] {
            let shape = TripleShape::new(s, m, l, k).unwrap();
            let [la, lb, lg] = shape.coeff_lens();
            for seed in 0..48u64 {
                let a = seed.wrapping_mul(0x9e3779b97f4a7c15) & ((1 << la) - 1);
                let b = seed.wrapping_mul(0xc2b2ae3d27d4eb4f) & ((1 << lb) - 1);
                let g = seed.wrapping_mul(0x165667b19e3779f9) & ((1 << lg) - 1);
                let p = CoefficientTriple::from_u64(&shape, a, b, g);
                let r = stack_triple(&p, &shape).unwrap().rank();
                let want = BigInt::one() << (3 * s + 2 * m + l + k - r);
                assert_eq!(exp_sum_direct(&p, &shape, 24).unwrap(), want);
            }
        }
    }

    #[test]
    fn exp_sum_mixed_zero_point() {
        let ms = MixedShape::new(2, 1, 3, 5).unwrap();
        let f = exp_sum_mixed(
            &BitMatrix::zeros(2, 5),
            &Bits::zeros(6),
            &Bits::zeros(9),
            &ms,
            24,
        )
        .unwrap();
        assert_eq!(f, BigInt::one() << 16);
    }

    #[test]
    fn exp_sum_mixed_full_rank_point() {
        // rows e1..e2 plus persymmetric blocks that complete the identity
        let ms = MixedShape::new(2, 1, 3, 5).unwrap();
        let mut gen = BitMatrix::zeros(2, 5);
        gen.set(0, 0, true);
        gen.set(1, 1, true);
        let t = Bits::from_u64(0b000100, 6); // rows (..1..), (...1.)-ish
        let eta = Bits::from_u64(0b000010000, 9);
        let mut rows = vec![
            gen.row_as_u64(0).unwrap(),
            gen.row_as_u64(1).unwrap(),
        ];
        for r in 0..2 {
            rows.push((t.to_u64().unwrap() >> r) & 0x1f);
        }
        for r in 0..5 {
            rows.push((eta.to_u64().unwrap() >> r) & 0x1f);
        }
        let d = BitMatrix::from_rows_u64(&rows, 5);
        assert_eq!(d.rank(), 5, "chosen point must be full rank");
        let f = exp_sum_mixed(&gen, &t, &eta, &ms, 24).unwrap();
        assert_eq!(f, BigInt::one() << (16 - 5));
    }

    #[test]
    fn r_q_unit_q_identity() {
        for (s, m, l, k) in [(1, 0, 0, 1), (1, 0, 0, 2), (2, 0, 0, 3), (1, 1, 1, 3)] {
            let shape = TripleShape::new(s, m, l, k).unwrap();
            let dist = gamma_bruteforce(&shape, 24).unwrap();
            let got = r_q(1, &shape, &dist).unwrap();
            let want = (BigUint::one() << (3 * s + 2 * m + l)) + (BigUint::one() << k)
                - BigUint::one();
            assert_eq!(got.value, want);
            assert_eq!(got.extrapolated, l > 0);
        }
    }

    #[test]
    fn r_q_goldens() {
        // R_3(5,3) corrected per erratum e8
        let shape = TripleShape::new(3, 0, 0, 5).unwrap();
        let counts: Vec<BigUint> = (0..=5).map(|i| gamma_ssm(3, 0, 5, i).unwrap().value).collect();
        let dist = RankDistribution::new(ShapeClass::Triple(shape), counts, crate::dist::Method::Closed);
        assert_eq!(
            r_q(3, &shape, &dist).unwrap().value,
            big(3563904) << 6
        );
        // R_3(7,3,4)
        let shape = TripleShape::new(3, 4, 0, 7).unwrap();
        let counts: Vec<BigUint> = (0..=7).map(|i| gamma_ssm(3, 4, 7, i).unwrap().value).collect();
        let dist = RankDistribution::new(ShapeClass::Triple(shape), counts, crate::dist::Method::Closed);
        assert_eq!(
            r_q(3, &shape, &dist).unwrap().value,
            big(4243395) << 29
        );
    }

    #[test]
    fn r_q_mixed_golden() {
        let ms = MixedShape::new(2, 1, 3, 5).unwrap();
        let dist = gamma_bruteforce_mixed(&ms, 25).unwrap();
        assert_eq!(r_q_mixed(3, &ms, &dist).unwrap(), big(13281) << 20);
    }

    #[test]
    fn r_q_rejects_mismatched_distribution() {
        let shape = TripleShape::new(1, 0, 0, 1).unwrap();
        let other = TripleShape::new(1, 0, 0, 2).unwrap();
        let dist = gamma_bruteforce(&other, 24).unwrap();
        assert!(matches!(
            r_q(1, &shape, &dist),
            Err(CountError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn invertible_fractions_are_21_64ths() {
        let engine = Engine::new();
        for (s, m) in [(1usize, 0usize), (1, 1), (2, 0), (2, 2), (3, 4)] {
            let (num, den) = invertible_fraction(s, m, &engine).unwrap();
            assert_eq!((num, den), (big(21), big(64)), "s={s} m={m}");
        }
    }
}
