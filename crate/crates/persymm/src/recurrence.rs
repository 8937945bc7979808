//! The recurrence engine: rank counts for arbitrary (s, m, l, k) via the
//! row-removal recurrence with its closed-form remainder.
//!
//! Every value is resolved through a fallback ladder on the canonical
//! (block-sorted) shape:
//!
//! 1. closed form, when a validated window covers the point;
//! 2. the three-block recurrence (s >= 2), whose remainder consumes
//!    square-width values of the one-smaller shape;
//! 3. for s = 1: one-row augmentation over a brute-forced double
//!    distribution, then full triple enumeration, both budget-capped;
//! 4. an error naming the frontier shape.
//!
//! Block sorting is justified by row-permutation invariance of rank and is
//! exercised against enumeration in the test suite. The memo table allows
//! concurrent reads; duplicate concurrent computation of a key is harmless
//! (values are equal and idempotent to insert).

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::dist::{Method, RankDistribution, ShapeClass};
use crate::enumeration::{
    gamma_bruteforce, gamma_bruteforce_double, EnumError, DEFAULT_BIT_BUDGET,
};
use crate::formulas::{closed_gamma, gamma_append_row};
use crate::shape::TripleShape;

/// Default ceiling for brute-forced double distributions inside the ladder;
/// doubles are a factor 2^k cheaper than triples, so they get more headroom.
pub const DEFAULT_DOUBLE_BIT_BUDGET: u32 = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecurrenceError {
    #[error("no path to rank-{i} count of [{b0},{b1},{b2}]x{k}: {reason}")]
    Frontier {
        b0: usize,
        b1: usize,
        b2: usize,
        k: usize,
        i: usize,
        reason: String,
    },
}

fn frontier(s: usize, m: usize, l: usize, k: usize, i: usize, reason: String) -> RecurrenceError {
    RecurrenceError::Frontier {
        b0: s,
        b1: s + m,
        b2: s + m + l,
        k,
        i,
        reason,
    }
}

type Key = (usize, usize, usize, usize, usize);

pub struct Engine {
    memo: RwLock<HashMap<Key, BigUint>>,
    doubles: RwLock<HashMap<(usize, usize, usize), Arc<Vec<BigUint>>>>,
    bit_budget: u32,
    double_bit_budget: u32,
    closed_shortcut: bool,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine::with_budgets(DEFAULT_BIT_BUDGET, DEFAULT_DOUBLE_BIT_BUDGET)
    }

    pub fn with_budgets(bit_budget: u32, double_bit_budget: u32) -> Self {
        Engine {
            memo: RwLock::new(HashMap::new()),
            doubles: RwLock::new(HashMap::new()),
            bit_budget,
            double_bit_budget,
            closed_shortcut: true,
        }
    }

    /// Disables the closed-form shortcut for s >= 2 shapes, forcing every
    /// such value through the recurrence (s = 1 bases still resolve
    /// normally). Used by verification sweeps.
    pub fn without_closed_shortcut(mut self) -> Self {
        self.closed_shortcut = false;
        self
    }

    pub fn bit_budget(&self) -> u32 {
        self.bit_budget
    }

    /// Rank-i count via the fallback ladder.
    pub fn gamma(&self, shape: &TripleShape, i: usize) -> Result<BigUint, RecurrenceError> {
        let c = canonical(shape);
        self.resolve(c.s(), c.m(), c.l(), c.k(), i)
    }

    /// Rank-i count with the recurrence forced at the top level (s = 1
    /// canonical shapes fall through to their base resolution).
    pub fn gamma_recursive(&self, shape: &TripleShape, i: usize) -> Result<BigUint, RecurrenceError> {
        let c = canonical(shape);
        let (s, m, l, k) = (c.s(), c.m(), c.l(), c.k());
        if i > c.max_rank() {
            return Ok(BigUint::zero());
        }
        if i == 0 {
            return Ok(BigUint::one());
        }
        if s == 1 {
            return self.resolve_s1(m, l, k, i);
        }
        self.recurrence_step(s, m, l, k, i)
    }

    /// The full distribution of a shape, every entry through the ladder.
    pub fn distribution(&self, shape: &TripleShape) -> Result<RankDistribution, RecurrenceError> {
        let counts = (0..=shape.max_rank())
            .map(|i| self.gamma(shape, i))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RankDistribution::new(
            ShapeClass::Triple(*shape),
            counts,
            Method::Recurrence,
        ))
    }

    fn resolve(
        &self,
        s: usize,
        m: usize,
        l: usize,
        k: usize,
        i: usize,
    ) -> Result<BigUint, RecurrenceError> {
        let n_rows = 3 * s + 2 * m + l;
        if i > k.min(n_rows) {
            return Ok(BigUint::zero());
        }
        if i == 0 {
            return Ok(BigUint::one());
        }
        let key = (s, m, l, k, i);
        if let Some(v) = self.memo.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let value = if s == 1 {
            self.resolve_s1(m, l, k, i)?
        } else if self.closed_shortcut {
            match closed_gamma(s, m, l, k, i) {
                Some(r) => r.value,
                None => self.recurrence_or_brute(s, m, l, k, i)?,
            }
        } else {
            self.recurrence_or_brute(s, m, l, k, i)?
        };
        self.memo.write().unwrap().insert(key, value.clone());
        Ok(value)
    }

    fn recurrence_or_brute(
        &self,
        s: usize,
        m: usize,
        l: usize,
        k: usize,
        i: usize,
    ) -> Result<BigUint, RecurrenceError> {
        match self.recurrence_step(s, m, l, k, i) {
            Ok(v) => Ok(v),
            Err(e) => {
                let shape = TripleShape::new(s, m, l, k).expect("canonical shape is valid");
                match gamma_bruteforce(&shape, self.bit_budget) {
                    Ok(dist) => Ok(dist.count(i)),
                    Err(_) => Err(e),
                }
            }
        }
    }

    /// One application of the three-block recurrence at the target point.
    fn recurrence_step(
        &self,
        s: usize,
        m: usize,
        l: usize,
        k: usize,
        i: usize,
    ) -> Result<BigUint, RecurrenceError> {
        debug_assert!(s >= 2 && i >= 1);
        let (b0, b1, b2) = (s, s + m, s + m + l);
        let mut acc = BigInt::zero();
        // weight 2/4/8 for removing the last row of block 0/1/2
        for (w, blocks) in [
            (2, (b0 - 1, b1, b2)),
            (4, (b0, b1 - 1, b2)),
            (8, (b0, b1, b2 - 1)),
        ] {
            acc += BigInt::from(w) * BigInt::from(self.gamma_blocks(blocks, k, i as i64 - 1)?);
        }
        for (w, blocks) in [
            (8, (b0 - 1, b1 - 1, b2)),
            (16, (b0 - 1, b1, b2 - 1)),
            (32, (b0, b1 - 1, b2 - 1)),
        ] {
            acc -= BigInt::from(w) * BigInt::from(self.gamma_blocks(blocks, k, i as i64 - 2)?);
        }
        acc += BigInt::from(64) * BigInt::from(self.gamma_blocks((b0 - 1, b1 - 1, b2 - 1), k, i as i64 - 3)?);
        acc += self.delta_remainder(s, m, l, k, i)?;
        if acc.is_negative() {
            return Err(frontier(
                s,
                m,
                l,
                k,
                i,
                "recurrence produced a negative count (inconsistent inputs)".into(),
            ));
        }
        Ok(acc.to_biguint().unwrap())
    }

    fn gamma_blocks(
        &self,
        blocks: (usize, usize, usize),
        k: usize,
        i: i64,
    ) -> Result<BigUint, RecurrenceError> {
        if i < 0 {
            return Ok(BigUint::zero());
        }
        let c = TripleShape::from_blocks(blocks.0, blocks.1, blocks.2, k)
            .expect("recurrence references keep every block >= 1");
        self.resolve(c.s(), c.m(), c.l(), c.k(), i as usize)
    }

    /// Square-width value of the one-smaller shape, as consumed by the
    /// remainder: rank-j count of [s-1, s-1+m, s-1+m+l] at width j.
    fn square(&self, s: usize, m: usize, l: usize, j: usize) -> Result<BigUint, RecurrenceError> {
        if j == 0 {
            return Ok(BigUint::one());
        }
        let c = TripleShape::from_blocks(s - 1, s - 1 + m, s - 1 + m + l, j)
            .expect("s >= 2 keeps blocks positive");
        self.resolve(c.s(), c.m(), c.l(), c.k(), j)
    }

    /// The remainder of the recurrence at (s, m, l, k, i), in closed form
    /// over square-width values one shape down.
    ///
    /// The coefficient of the Gamma_{i-1} square term is -70 per erratum
    /// e1 (the source prints -80). The value depends on k only through
    /// k = i versus k > i, and not at all in the four top cases.
    pub fn delta_remainder(
        &self,
        s: usize,
        m: usize,
        l: usize,
        k: usize,
        i: usize,
    ) -> Result<BigInt, RecurrenceError> {
        assert!(s >= 2, "the remainder is never taken at s = 1");
        let n = 3 * s + 2 * m + l;
        assert!(i <= n && k >= i.max(1), "remainder outside 0 <= i <= rows, k >= i");
        let sq = |j: usize| -> Result<BigInt, RecurrenceError> {
            Ok(BigInt::from(self.square(s, m, l, j)?))
        };
        let big = |v: i64| BigInt::from(v);
        if i == 0 {
            return Ok(BigInt::one());
        }
        if i + 4 <= n {
            let head = match i {
                1 => big(8) * sq(1)? - big(7),
                2 => big(15) * sq(2)? - big(56) * sq(1)? + big(14),
                3 => big(15) * sq(3)? - big(70) * sq(2)? + big(112) * sq(1)? - big(8),
                _ => {
                    big(15) * sq(i)? - big(70) * sq(i - 1)? + big(120) * sq(i - 2)?
                        - big(64) * sq(i - 3)?
                }
            };
            let tail = if k >= i + 1 { sq(i + 1)? } else { BigInt::zero() };
            return Ok(head - tail);
        }
        // the four top cases are width-independent
        Ok(match n - i {
            3 => big(15) * sq(n - 3)? - big(70) * sq(n - 4)? + big(120) * sq(n - 5)? - big(64) * sq(n - 6)?,
            2 => -big(70) * sq(n - 3)? + big(120) * sq(n - 4)? - big(64) * sq(n - 5)?,
            1 => big(120) * sq(n - 3)? - big(64) * sq(n - 4)?,
            0 => -big(64) * sq(n - 3)?,
            _ => unreachable!(),
        })
    }

    /// Resolution for s = 1 shapes: closed tables, then one-row
    /// augmentation over a brute-forced double, then triple enumeration.
    fn resolve_s1(&self, m: usize, l: usize, k: usize, i: usize) -> Result<BigUint, RecurrenceError> {
        if let Some(r) = closed_gamma(1, m, l, k, i) {
            return Ok(r.value);
        }
        let (r1, r2) = (1 + m, 1 + m + l);
        match self.double_dist(r1, r2, k) {
            Ok(dd) => {
                let shape = ShapeClass::Double { rows1: r1, rows2: r2, k };
                let dist = RankDistribution::new(shape, dd.as_ref().clone(), Method::Brute);
                if let Ok(v) = gamma_append_row(&dist, k, i) {
                    return Ok(v);
                }
            }
            Err(EnumError::BudgetExceeded { .. }) => {}
            Err(e) => {
                return Err(frontier(1, m, l, k, i, format!("double enumeration failed: {e}")))
            }
        }
        let shape = TripleShape::new(1, m, l, k).expect("valid");
        match gamma_bruteforce(&shape, self.bit_budget) {
            Ok(dist) => Ok(dist.count(i)),
            Err(e) => Err(frontier(
                1,
                m,
                l,
                k,
                i,
                format!(
                    "outside closed windows; double needs {} bits (budget {}), triple: {e}",
                    2 * k + m + (m + l),
                    self.double_bit_budget
                ),
            )),
        }
    }

    fn double_dist(
        &self,
        r1: usize,
        r2: usize,
        k: usize,
    ) -> Result<Arc<Vec<BigUint>>, EnumError> {
        let key = (r1, r2, k);
        if let Some(v) = self.doubles.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let dist = gamma_bruteforce_double(r1, r2, k, self.double_bit_budget)?;
        let arc = Arc::new(dist.counts);
        self.doubles.write().unwrap().insert(key, arc.clone());
        Ok(arc)
    }
}

fn canonical(shape: &TripleShape) -> TripleShape {
    let [a, b, c] = shape.block_rows();
    TripleShape::from_blocks(a, b, c, shape.k()).expect("blocks already valid")
}

/// Residuals of the two exact moment identities of a distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentReport {
    /// sum Gamma_i minus 2^(free bits)
    pub sum_residual: BigInt,
    /// scaled weighted identity residual (triple shapes only)
    pub weighted_residual: Option<BigInt>,
}

impl MomentReport {
    pub fn pass(&self) -> bool {
        self.sum_residual.is_zero()
            && self
                .weighted_residual
                .as_ref()
                .map(|r| r.is_zero())
                .unwrap_or(true)
    }
}

/// Checks sum Gamma_i = 2^(free bits) and, for triple shapes, the weighted
/// identity sum Gamma_i 2^(I-i+3) = 2^I (2^(2k+3s+2m+l) + 2^3k - 2^2k) with
/// I = min(k, rows), both in exact integers.
pub fn moment_check(dist: &RankDistribution) -> MomentReport {
    let total = BigInt::from(dist.total());
    let sum_residual = total - BigInt::from(dist.expected_total());
    let weighted_residual = match dist.shape {
        ShapeClass::Triple(t) => {
            let (s, m, l, k) = (t.s(), t.m(), t.l(), t.k());
            let cap = t.max_rank();
            let mut lhs = BigInt::zero();
            for (i, c) in dist.counts.iter().enumerate() {
                lhs += BigInt::from(c.clone()) << (cap - i + 3);
            }
            let rhs = (BigInt::one() << (2 * k + 3 * s + 2 * m + l))
                + (BigInt::one() << (3 * k))
                - (BigInt::one() << (2 * k));
            Some(lhs - (rhs << cap))
        }
        _ => None,
    };
    MomentReport {
        sum_residual,
        weighted_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn delta_base_cases() {
        let e = Engine::new();
        assert_eq!(e.delta_remainder(2, 0, 0, 3, 0).unwrap(), BigInt::one());
        // squares of [1,1,1]: 7, 42 -> 8*7 - 42 - 7 = 7
        assert_eq!(e.delta_remainder(2, 0, 0, 2, 1).unwrap(), BigInt::from(7));
        assert_eq!(e.delta_remainder(2, 0, 0, 5, 1).unwrap(), BigInt::from(7));
        // width-1 branch drops the trailing square: 8*7 - 7 = 49
        assert_eq!(e.delta_remainder(2, 0, 0, 1, 1).unwrap(), BigInt::from(49));
    }

    #[test]
    fn delta_width_stability() {
        let e = Engine::new();
        for (s, m, l) in [(2usize, 0usize, 0usize), (2, 1, 0), (2, 0, 1), (3, 0, 0)] {
            let n = 3 * s + 2 * m + l;
            for i in 0..=n.saturating_sub(4) {
                let at_edge = e.delta_remainder(s, m, l, i + 1, i).unwrap();
                for k in (i + 2)..(i + 5) {
                    assert_eq!(e.delta_remainder(s, m, l, k, i).unwrap(), at_edge);
                }
            }
            for i in (n - 3)..=n {
                let at_i = e.delta_remainder(s, m, l, i.max(1), i).unwrap();
                assert_eq!(e.delta_remainder(s, m, l, i + 3, i).unwrap(), at_i);
            }
        }
    }

    #[test]
    fn gamma_first_values() {
        let e = Engine::new();
        // (2+4+8)*Gamma_0 + Delta_1 = 14 + 7 = 21
        let shape = TripleShape::new(2, 0, 0, 4).unwrap();
        assert_eq!(e.gamma_recursive(&shape, 1).unwrap(), big(21));
    }

    #[test]
    fn recursive_matches_golden_table() {
        let e = Engine::new();
        let shape = TripleShape::new(2, 0, 0, 6).unwrap();
        let want = [1u64, 21, 1162, 20160, 258720, 1128960, 688128];
        for (i, w) in want.iter().enumerate() {
            assert_eq!(e.gamma_recursive(&shape, i).unwrap(), big(*w), "i={i}");
        }
    }

    #[test]
    fn recursive_matches_brute_with_l() {
        let e = Engine::new();
        let shape = TripleShape::new(2, 1, 1, 4).unwrap();
        let brute = gamma_bruteforce(&shape, 24).unwrap();
        for i in 0..=shape.max_rank() {
            assert_eq!(e.gamma_recursive(&shape, i).unwrap(), brute.counts[i], "i={i}");
        }
        // frozen expected values for this shape
        assert_eq!(
            brute.counts,
            [1u64, 21, 394, 6336, 255392].map(big).to_vec()
        );
    }

    #[test]
    fn unsorted_blocks_resolve_via_canonicalization() {
        let e = Engine::new();
        let odd = TripleShape::from_blocks(3, 1, 2, 3).unwrap();
        let sorted = TripleShape::new(1, 1, 1, 3).unwrap();
        for i in 0..=3 {
            assert_eq!(
                e.gamma(&odd, i).unwrap(),
                e.gamma(&sorted, i).unwrap()
            );
        }
    }

    #[test]
    fn moment_check_pass_and_sensitivity() {
        let shape = TripleShape::new(2, 1, 0, 3).unwrap();
        let dist = gamma_bruteforce(&shape, 24).unwrap();
        assert!(moment_check(&dist).pass());
        let mut bad = dist.clone();
        bad.counts[2] += BigUint::one();
        let report = moment_check(&bad);
        assert!(!report.pass());
        assert_eq!(report.sum_residual, BigInt::one());
    }

    #[test]
    fn frontier_error_names_shape() {
        // a huge s=1 shape outside every window and budget
        let e = Engine::with_budgets(16, 18);
        let shape = TripleShape::new(1, 6, 1, 9).unwrap();
        match e.gamma(&shape, 5) {
            Err(RecurrenceError::Frontier { b0, b1, b2, k, .. }) => {
                assert_eq!((b0, b1, b2, k), (1, 7, 8, 9));
            }
            other => panic!("expected frontier, got {other:?}"),
        }
    }
}
