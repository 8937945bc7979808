//! The verification suites: every acceptance criterion as a reusable
//! check returning structured per-case results.
//!
//! Used both by the `verify` CLI command and by the acceptance test
//! target. Everything is exact and deterministic (fixed seeds, ordered
//! sweeps, addition-only parallel merges).

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::counting::{exp_sum_direct, exp_sum_mixed, odd_times_pow2, r_q, r_q_mixed};
use crate::dist::{Method, RankDistribution, ShapeClass};
use crate::enumeration::{
    gamma_bruteforce, gamma_bruteforce_double, joint_profiles, solution_count_bruteforce,
};
use crate::formulas::{
    a_coeff, a_coeff_explicit, closed_gamma, count_rank_unstructured, gamma_low,
    gamma_mixed_from_doubles, gamma_ssm, reduction_map,
};
use crate::gf2::{BitMatrix, Bits};
use crate::recurrence::{moment_check, Engine};
use crate::shape::{stack_triple, CoefficientTriple, MixedShape, TripleShape};
use crate::shapes_within_bits;

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CaseResult {
    fn ok(name: impl Into<String>) -> Self {
        CaseResult {
            name: name.into(),
            pass: true,
            detail: String::new(),
        }
    }

    fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CaseResult {
            name: name.into(),
            pass: false,
            detail: detail.into(),
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(name: impl Into<String>, got: T, want: T) -> Self {
        let name = name.into();
        if got == want {
            CaseResult::ok(name)
        } else {
            CaseResult::fail(name, format!("got {got:?}, want {want:?}"))
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub cases: Vec<CaseResult>,
}

impl CriterionReport {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {} ({} cases)",
            self.id,
            if self.pass() { "PASS" } else { "FAIL" },
            self.title,
            self.cases.len()
        )
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn biguints(vs: &[u64]) -> Vec<BigUint> {
    vs.iter().map(|&v| big(v)).collect()
}

fn engine_dist(engine: &Engine, shape: &TripleShape) -> Result<Vec<BigUint>, String> {
    (0..=shape.max_rank())
        .map(|i| engine.gamma(shape, i).map_err(|e| e.to_string()))
        .collect()
}

/// Criterion 1: golden tables, exact.
pub fn criterion_golden_tables() -> CriterionReport {
    let mut cases = Vec::new();
    let engine = Engine::new();

    let table = |s, m, k: usize| -> Vec<BigUint> {
        (0..=k.min(3 * s + 2 * m))
            .map(|i| gamma_ssm(s, m, k, i).expect("window covers the table").value)
            .collect()
    };

    cases.push(CaseResult::eq(
        "[2,2,2]x6 closed",
        table(2, 0, 6),
        biguints(&[1, 21, 1162, 20160, 258720, 1128960, 688128]),
    ));
    cases.push(CaseResult::eq(
        "[3,3,3]x5 closed",
        table(3, 0, 5),
        biguints(&[1, 21, 378, 6832, 103488, 1986432]),
    ));
    match engine_dist(&engine, &TripleShape::new(2, 0, 0, 6).unwrap()) {
        Ok(d) => cases.push(CaseResult::eq(
            "[2,2,2]x6 ladder",
            d,
            biguints(&[1, 21, 1162, 20160, 258720, 1128960, 688128]),
        )),
        Err(e) => cases.push(CaseResult::fail("[2,2,2]x6 ladder", e)),
    }

    // mixed [(2),2,5]x5 out of the double-stack combination
    let ms = MixedShape::new(2, 1, 3, 5).unwrap();
    let dd = gamma_bruteforce_double(2, 5, 5, 26).expect("13 bits");
    let mixed: Vec<BigUint> = (0..=5)
        .map(|i| gamma_mixed_from_doubles(&ms, i, &dd).unwrap())
        .collect();
    cases.push(CaseResult::eq(
        "[(2),2,5]x5 combination",
        mixed,
        biguints(&[1, 129, 4566, 94440, 1714368, 31740928]),
    ));

    cases.push(CaseResult::eq(
        "[3,7,7]x7 closed",
        table(3, 4, 7),
        biguints(&[
            1,
            21,
            378,
            6832,
            108096,
            1714560,
            27276288,
            (1 << 35) - 3553 * (1 << 13),
        ]),
    ));
    cases.push(CaseResult::eq(
        "[3,7,7]x10 closed",
        table(3, 4, 10),
        biguints(&[
            1,
            21,
            378,
            10416,
            140352,
            1994112,
            29598720,
            458661888,
            109389 << 16,
            213759 << 19,
            (1u64 << 44) - 14273 * (1 << 23),
        ]),
    ));

    // the [3,4,4]xk family at sampled widths; i=7 carries erratum e5
    cases.push(CaseResult::eq(
        "[3,4,4]x10 closed (erratum e5 applied at i=7)",
        table(3, 1, 10),
        biguints(&[
            1, 21, 378, 10416, 235584, 4104576, 65952768, 1015234560, 12193628160,
            92484403200, 169114337280,
        ]),
    ));
    cases.push(CaseResult::eq(
        "[3,4,4]x12 closed (erratum e5 applied at i=7)",
        table(3, 1, 12),
        biguints(&[
            1,
            21,
            378,
            22704,
            641088,
            11846016,
            200137728,
            4528226304,
            65614381056,
            779511398400,
            5919001804800,
            10823317585920,
        ]),
    ));
    // sampled member of the same family at s=2 against enumeration
    let brute = gamma_bruteforce(&TripleShape::new(2, 1, 0, 6).unwrap(), 24).unwrap();
    cases.push(CaseResult::eq(
        "[2,3,3]x6 closed vs enumeration",
        table(2, 1, 6),
        brute.counts,
    ));

    CriterionReport {
        id: 1,
        title: "golden tables",
        cases,
    }
}

/// Criterion 2: solution counts, exact.
pub fn criterion_solution_counts() -> CriterionReport {
    let mut cases = Vec::new();

    let closed_dist = |s, m, k: usize| -> RankDistribution {
        let shape = TripleShape::new(s, m, 0, k).unwrap();
        let counts = (0..=shape.max_rank())
            .map(|i| gamma_ssm(s, m, k, i).unwrap().value)
            .collect();
        RankDistribution::new(ShapeClass::Triple(shape), counts, Method::Closed)
    };

    let shape53 = TripleShape::new(3, 0, 0, 5).unwrap();
    let d53 = closed_dist(3, 0, 5);
    let r3 = r_q(3, &shape53, &d53).unwrap();
    cases.push(CaseResult::eq(
        "R_3(5,3) = 3563904*2^6 (erratum e8; source prints 2^18)",
        r3.value.clone(),
        big(3563904) << 6,
    ));
    let (odd, e) = odd_times_pow2(&r3.value);
    cases.push(CaseResult::eq("R_3(5,3) odd form", (odd, e), (big(27843), 13)));

    let shape734 = TripleShape::new(3, 4, 0, 7).unwrap();
    let d734 = closed_dist(3, 4, 7);
    cases.push(CaseResult::eq(
        "R_3(7,3,4) = 4243395*2^29",
        r_q(3, &shape734, &d734).unwrap().value,
        big(4243395) << 29,
    ));

    let ms = MixedShape::new(2, 1, 3, 5).unwrap();
    let dd = gamma_bruteforce_double(2, 5, 5, 26).unwrap();
    let counts: Vec<BigUint> = (0..=5)
        .map(|i| gamma_mixed_from_doubles(&ms, i, &dd).unwrap())
        .collect();
    let dmx = RankDistribution::new(ShapeClass::Mixed(ms), counts, Method::Closed);
    cases.push(CaseResult::eq(
        "mixed R_3 = 13281*2^20",
        r_q_mixed(3, &ms, &dmx).unwrap(),
        big(13281) << 20,
    ));

    // R_q(6,2) as a polynomial identity in 2^q, checked at q = 1..6
    let shape62 = TripleShape::new(2, 0, 0, 6).unwrap();
    let d62 = closed_dist(2, 0, 6);
    let frozen: [u64; 6] = [
        127,
        21400,
        5288704,
        2260074496,
        2027098734592,
        3839775924551680,
    ];
    for q in 1..=6usize {
        let via_dist = r_q(q, &shape62, &d62).unwrap().value;
        // 2^(6q-21) * sum Gamma_i 2^((6-i)q), assembled independently
        let mut poly = BigUint::zero();
        for (i, c) in d62.counts.iter().enumerate() {
            poly += c.clone() << ((6 - i) * q);
        }
        let shifted = if 6 * q >= 21 {
            poly.clone() << (6 * q - 21)
        } else {
            let div = BigUint::one() << (21 - 6 * q);
            assert!((poly.clone() % &div).is_zero());
            poly.clone() / div
        };
        cases.push(CaseResult::eq(
            format!("R_{q}(6,2) polynomial identity"),
            (via_dist.clone(), shifted),
            (big(frozen[q - 1]), big(frozen[q - 1])),
        ));
    }

    CriterionReport {
        id: 2,
        title: "solution counts",
        cases,
    }
}

/// Criterion 3: oracle equivalence on every shape within the bit budget.
pub fn criterion_oracle_equivalence(bit_budget: u32) -> CriterionReport {
    let mut cases = Vec::new();
    let ladder = Engine::with_budgets(bit_budget, bit_budget.max(26));
    let forced = Engine::with_budgets(bit_budget, bit_budget.max(26)).without_closed_shortcut();
    let shapes = shapes_within_bits(bit_budget);
    let mut checked = 0usize;
    let mut closed_points = 0usize;
    for shape in &shapes {
        let brute = match gamma_bruteforce(shape, bit_budget) {
            Ok(d) => d,
            Err(e) => {
                cases.push(CaseResult::fail(
                    format!("brute {}", ShapeClass::Triple(*shape)),
                    e.to_string(),
                ));
                continue;
            }
        };
        for i in 0..=shape.max_rank() {
            let want = &brute.counts[i];
            match ladder.gamma(shape, i) {
                Ok(v) if &v == want => {}
                Ok(v) => cases.push(CaseResult::fail(
                    format!("ladder {} i={i}", ShapeClass::Triple(*shape)),
                    format!("got {v}, brute {want}"),
                )),
                Err(e) => cases.push(CaseResult::fail(
                    format!("ladder {} i={i}", ShapeClass::Triple(*shape)),
                    e.to_string(),
                )),
            }
            if shape.s() >= 2 {
                match forced.gamma_recursive(shape, i) {
                    Ok(v) if &v == want => {}
                    Ok(v) => cases.push(CaseResult::fail(
                        format!("recurrence {} i={i}", ShapeClass::Triple(*shape)),
                        format!("got {v}, brute {want}"),
                    )),
                    Err(e) => cases.push(CaseResult::fail(
                        format!("recurrence {} i={i}", ShapeClass::Triple(*shape)),
                        e.to_string(),
                    )),
                }
            }
            if let Some(r) = closed_gamma(shape.s(), shape.m(), shape.l(), shape.k(), i) {
                closed_points += 1;
                if &r.value != want {
                    cases.push(CaseResult::fail(
                        format!("closed {} i={i}", ShapeClass::Triple(*shape)),
                        format!("got {} ({}), brute {want}", r.value, r.source),
                    ));
                }
            }
            checked += 1;
        }
    }
    // the named l > 0 shapes must be part of the sweep
    for (s, m, l, k) in [(2, 1, 1, 4), (2, 0, 1, 4), (2, 0, 2, 3), (3, 0, 1, 3)] {
        let shape = TripleShape::new(s, m, l, k).unwrap();
        cases.push(CaseResult::eq(
            format!("sweep covers {}", ShapeClass::Triple(shape)),
            shapes.contains(&shape),
            true,
        ));
    }
    cases.push(CaseResult::ok(format!(
        "{} shapes, {checked} rank values, {closed_points} closed-form points agree with enumeration",
        shapes.len()
    )));
    CriterionReport {
        id: 3,
        title: "oracle equivalence (formula, recurrence, ladder vs enumeration)",
        cases,
    }
}

/// Criterion 4: moment identities on every distribution produced here.
pub fn criterion_moments(bit_budget: u32) -> CriterionReport {
    let mut cases = Vec::new();
    let engine = Engine::new();
    let sweep_cap = bit_budget.min(18);
    let mut count = 0usize;
    for shape in shapes_within_bits(sweep_cap) {
        let brute = gamma_bruteforce(&shape, sweep_cap).unwrap();
        if !moment_check(&brute).pass() {
            cases.push(CaseResult::fail(
                format!("moments brute {}", ShapeClass::Triple(shape)),
                "residual nonzero",
            ));
        }
        if let Ok(counts) = engine_dist(&engine, &shape) {
            let d = RankDistribution::new(ShapeClass::Triple(shape), counts, Method::Recurrence);
            if !moment_check(&d).pass() {
                cases.push(CaseResult::fail(
                    format!("moments ladder {}", ShapeClass::Triple(shape)),
                    "residual nonzero",
                ));
            }
        }
        count += 1;
    }
    // closed-form golden tables as assembled distributions
    for (s, m, k) in [(2usize, 0usize, 6usize), (3, 0, 5), (3, 4, 7), (3, 4, 10), (3, 1, 10), (3, 1, 12)] {
        let shape = TripleShape::new(s, m, 0, k).unwrap();
        let counts = (0..=shape.max_rank())
            .map(|i| gamma_ssm(s, m, k, i).unwrap().value)
            .collect();
        let d = RankDistribution::new(ShapeClass::Triple(shape), counts, Method::Closed);
        let rep = moment_check(&d);
        if !rep.pass() {
            cases.push(CaseResult::fail(
                format!("moments closed {}", ShapeClass::Triple(shape)),
                format!(
                    "sum residual {}, weighted residual {:?}",
                    rep.sum_residual, rep.weighted_residual
                ),
            ));
        }
        count += 1;
    }
    // sensitivity: a perturbed distribution must fail
    let mut bad = gamma_bruteforce(&TripleShape::new(1, 0, 0, 2).unwrap(), 24).unwrap();
    bad.counts[1] += BigUint::one();
    let rep = moment_check(&bad);
    cases.push(CaseResult::eq(
        "perturbed distribution is rejected with residual 1",
        (rep.pass(), rep.sum_residual.clone()),
        (false, BigInt::one()),
    ));
    cases.push(CaseResult::ok(format!(
        "{count} distributions satisfy both identities exactly"
    )));
    CriterionReport {
        id: 4,
        title: "moment identities",
        cases,
    }
}

/// Criterion 5: low-rank universality for i <= s-1 on shapes with s >= 4.
pub fn criterion_low_rank_universality() -> CriterionReport {
    let mut cases = Vec::new();
    let engine = Engine::with_budgets(24, 28).without_closed_shortcut();
    let mut shapes = Vec::new();
    for s in [4usize, 5, 6] {
        for m in 0..=2usize {
            for l in 0..=2usize {
                shapes.push((s, m, l));
            }
        }
        shapes.push((s, 3, 0));
    }
    assert!(shapes.len() >= 30);
    let mut values = 0usize;
    for &(s, m, l) in &shapes {
        let k = s + 1;
        let shape = TripleShape::new(s, m, l, k).unwrap();
        for i in 1..s {
            match engine.gamma_recursive(&shape, i) {
                Ok(v) => {
                    if v != gamma_low(i) {
                        cases.push(CaseResult::fail(
                            format!("low-rank {} i={i}", ShapeClass::Triple(shape)),
                            format!("recurrence {v}, universal {}", gamma_low(i)),
                        ));
                    }
                    values += 1;
                }
                Err(e) => cases.push(CaseResult::fail(
                    format!("low-rank {} i={i}", ShapeClass::Triple(shape)),
                    e.to_string(),
                )),
            }
        }
    }
    cases.push(CaseResult::ok(format!(
        "{} shapes with s >= 4, {values} recurrence values equal 105*2^(4i-6) - 21*2^(3i-5)",
        shapes.len()
    )));
    CriterionReport {
        id: 5,
        title: "low-rank universality",
        cases,
    }
}

/// Criterion 6: the recurrence reproduces the closed l = 0 tables for
/// s <= 4, m <= 3, k <= 3s+2m+2, every i.
pub fn criterion_recurrence_crosscheck() -> CriterionReport {
    let mut cases = Vec::new();
    // deep double budget: the (4,3) sweep reaches below-window s=1 shapes
    // whose double enumerations peak at 2^31 tuples
    let engine = Engine::with_budgets(24, 32).without_closed_shortcut();
    let mut values = 0usize;
    for s in 2..=4usize {
        for m in 0..=3usize {
            for k in 1..=(3 * s + 2 * m + 2) {
                let shape = TripleShape::new(s, m, 0, k).unwrap();
                for i in 0..=shape.max_rank() {
                    let closed = gamma_ssm(s, m, k, i)
                        .expect("l = 0 tables cover every point")
                        .value;
                    match engine.gamma_recursive(&shape, i) {
                        Ok(v) => {
                            if v != closed {
                                cases.push(CaseResult::fail(
                                    format!("recurrence {} i={i}", ShapeClass::Triple(shape)),
                                    format!("recurrence {v}, closed {closed}"),
                                ));
                            }
                            values += 1;
                        }
                        Err(e) => cases.push(CaseResult::fail(
                            format!("recurrence {} i={i}", ShapeClass::Triple(shape)),
                            e.to_string(),
                        )),
                    }
                }
            }
        }
    }
    cases.push(CaseResult::ok(format!(
        "{values} recurrence values equal the closed tables"
    )));
    CriterionReport {
        id: 6,
        title: "recurrence cross-check (l = 0 tables)",
        cases,
    }
}

/// Criterion 7: a-coefficients and the unstructured rank count.
pub fn criterion_a_coefficients() -> CriterionReport {
    let mut cases = Vec::new();
    let mut ok = true;
    for n in 1..=12usize {
        for j in 0..=n {
            if a_coeff(n, j) != a_coeff_explicit(n, j) {
                ok = false;
                cases.push(CaseResult::fail(
                    format!("a({n},{j}) routes disagree"),
                    String::new(),
                ));
            }
        }
    }
    if ok {
        cases.push(CaseResult::ok("recurrence route == explicit route, n <= 12"));
    }
    // three-term combination == gaussian-binomial product
    let mut ok = true;
    for n in 1..=10usize {
        for i in 1..=(n + 2) {
            let mut lhs = BigInt::zero();
            if i >= 2 && i - 2 <= n {
                lhs += BigInt::from(a_coeff(n, i - 2)) << (2 * n + 4 - 2 * i);
            }
            if i >= 1 && i - 1 <= n {
                lhs += BigInt::from(3u32) * BigInt::from(a_coeff(n, i - 1)) << (n + 1 - i);
            }
            if i <= n {
                lhs += BigInt::from(a_coeff(n, i));
            }
            let mut num = BigInt::one();
            let mut den = BigInt::one();
            for t in 0..i {
                num *= (BigInt::one() << (n + 2)) - (BigInt::one() << t);
                den *= (BigInt::one() << i) - (BigInt::one() << t);
            }
            if lhs * den.clone() != num {
                ok = false;
                cases.push(CaseResult::fail(
                    format!("three-term combination n={n} i={i}"),
                    String::new(),
                ));
            }
        }
    }
    if ok {
        cases.push(CaseResult::ok(
            "three-term combination equals the gaussian-binomial product",
        ));
    }
    // unstructured count == mixed combination at m = l = 0
    let mut ok = true;
    for n in 0..=4usize {
        for k in 1..=6usize {
            let ms = MixedShape::new(n, 0, 0, k).unwrap();
            let dd = gamma_bruteforce_double(1, 1, k, 26).unwrap();
            for i in 0..=(n + 2).min(k) {
                if gamma_mixed_from_doubles(&ms, i, &dd).unwrap()
                    != count_rank_unstructured(n + 2, k, i)
                {
                    ok = false;
                    cases.push(CaseResult::fail(
                        format!("unstructured n={n} k={k} i={i}"),
                        String::new(),
                    ));
                }
            }
        }
    }
    if ok {
        cases.push(CaseResult::ok(
            "mixed combination equals the unstructured rank count (rows <= 6, cols <= 6)",
        ));
    }
    CriterionReport {
        id: 7,
        title: "a-coefficients",
        cases,
    }
}

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }
}

/// Criterion 8: exponential-sum identities.
pub fn criterion_exponential_sums(bit_budget: u32) -> CriterionReport {
    let mut cases = Vec::new();
    let mut rng = XorShift(0x5eed_cafe_f00d_1234);
    let pool = [
        (1usize, 0usize, 0usize, 2usize),
        (1, 1, 0, 2),
        (2, 0, 0, 2),
        (1, 0, 1, 2),
        (1, 1, 1, 2),
        (2, 1, 0, 2),
        (1, 0, 0, 4),
        (2, 0, 0, 3),
        (1, 2, 1, 2),
    ];
    let mut ok = true;
    for trial in 0..1000 {
        let (s, m, l, k) = pool[(rng.next() % pool.len() as u64) as usize];
        let shape = TripleShape::new(s, m, l, k).unwrap();
        let [la, lb, lg] = shape.coeff_lens();
        let p = CoefficientTriple::from_u64(
            &shape,
            rng.next() & ((1 << la) - 1),
            rng.next() & ((1 << lb) - 1),
            rng.next() & ((1 << lg) - 1),
        );
        let rank = stack_triple(&p, &shape).unwrap().rank();
        let want = BigInt::one() << (3 * s + 2 * m + l + k - rank);
        match exp_sum_direct(&p, &shape, bit_budget) {
            Ok(f) if f == want => {}
            other => {
                ok = false;
                cases.push(CaseResult::fail(
                    format!("point identity trial {trial} {}", ShapeClass::Triple(shape)),
                    format!("{other:?} != 2^{}", 3 * s + 2 * m + l + k - rank),
                ));
            }
        }
    }
    if ok {
        cases.push(CaseResult::ok(
            "1000 random points satisfy g = 2^(3s+2m+l+k-rank)",
        ));
    }

    // global power sums at [1,1,1]xk for k <= 3, q <= 3 reproduce R_q
    for k in 1..=3usize {
        let shape = TripleShape::new(1, 0, 0, k).unwrap();
        let dist = gamma_bruteforce(&shape, 24).unwrap();
        let [la, lb, lg] = shape.coeff_lens();
        for q in 1..=3usize {
            let mut total = BigUint::zero();
            for a in 0..1u64 << la {
                for b in 0..1u64 << lb {
                    for g in 0..1u64 << lg {
                        let p = CoefficientTriple::from_u64(&shape, a, b, g);
                        let f = exp_sum_direct(&p, &shape, bit_budget)
                            .unwrap()
                            .to_biguint()
                            .unwrap();
                        total += num_traits::pow::Pow::pow(f, q);
                    }
                }
            }
            let denom = BigUint::one() << (3 * k);
            let (quot, rem) = num_integer::Integer::div_rem(&total, &denom);
            let want = r_q(q, &shape, &dist).unwrap().value;
            cases.push(CaseResult::eq(
                format!("global power sum k={k} q={q}"),
                (quot, rem.is_zero()),
                (want, true),
            ));
        }
    }

    // mixed identity against the zero-extended stack on sampled points
    let mut ok = true;
    for trial in 0..200 {
        let (n, m, l, k) = [(1usize, 0usize, 0usize, 2usize), (2, 1, 0, 2), (1, 1, 1, 2), (0, 1, 1, 2)]
            [(rng.next() % 4) as usize];
        let ms = MixedShape::new(n, m, l, k).unwrap();
        let t = Bits::from_u64(rng.next() & ((1 << (k + m)) - 1), k + m);
        let eta = Bits::from_u64(rng.next() & ((1 << (k + m + l)) - 1), k + m + l);
        let mut gen = BitMatrix::zeros(n, k);
        let mut rows = Vec::new();
        for r in 0..n {
            let w = rng.next() & ((1 << k) - 1);
            rows.push(w);
            for c in 0..k {
                if w >> c & 1 == 1 {
                    gen.set(r, c, true);
                }
            }
        }
        // zero-extended stack: blocks n, 2+m, 2+m+l
        for r in 0..(2 + m) {
            rows.push((t.to_u64().unwrap() >> r) & ((1 << k) - 1));
        }
        for r in 0..(2 + m + l) {
            rows.push((eta.to_u64().unwrap() >> r) & ((1 << k) - 1));
        }
        let rank = BitMatrix::from_rows_u64(&rows, k).rank();
        let want = BigInt::one() << (k + 2 * m + l + n + 4 - rank);
        match exp_sum_mixed(&gen, &t, &eta, &ms, bit_budget) {
            Ok(f) if f == want => {}
            other => {
                ok = false;
                cases.push(CaseResult::fail(
                    format!("mixed point identity trial {trial}"),
                    format!("{other:?} != {want}"),
                ));
            }
        }
    }
    if ok {
        cases.push(CaseResult::ok(
            "200 mixed points satisfy f = 2^(k+2m+l+n+4-rank of the zero-extended stack)",
        ));
    }
    CriterionReport {
        id: 8,
        title: "exponential-sum identities",
        cases,
    }
}

/// Criterion 9: the forbidden stair profiles vanish on every shape within
/// 18 free bits.
pub fn criterion_profile_vanishing() -> CriterionReport {
    let mut cases = Vec::new();
    let mut shapes = 0usize;
    for shape in shapes_within_bits(18) {
        if shape.k() < 2 {
            continue;
        }
        let prof = joint_profiles(&shape, 18).unwrap();
        if prof.total() != (BigUint::one() << shape.total_coeff_bits()) {
            cases.push(CaseResult::fail(
                format!("profile total {}", ShapeClass::Triple(shape)),
                "profiles do not partition the tuple space",
            ));
        }
        for j in 0..=prof.stair_range_max() {
            let c = prof.stair_profile_count(j);
            if c != 0 {
                cases.push(CaseResult::fail(
                    format!("stair profile {} j={j}", ShapeClass::Triple(shape)),
                    format!("count {c}"),
                ));
            }
        }
        shapes += 1;
    }
    cases.push(CaseResult::ok(format!(
        "{shapes} shapes: no forbidden stair profile in range"
    )));
    CriterionReport {
        id: 9,
        title: "profile vanishing",
        cases,
    }
}

/// Criterion 10: direct enumeration of the polynomial systems equals r_q.
pub fn criterion_solution_enumeration() -> CriterionReport {
    let mut cases = Vec::new();
    for (q, k, s, m, l) in [
        (1usize, 1usize, 1usize, 0usize, 0usize),
        (1, 2, 1, 0, 0),
        (2, 2, 1, 0, 0),
        (2, 1, 1, 1, 0),
        (2, 2, 1, 0, 1),
    ] {
        let direct = solution_count_bruteforce(q, k, s, m, l, 24).unwrap();
        let shape = TripleShape::new(s, m, l, k).unwrap();
        let dist = gamma_bruteforce(&shape, 24).unwrap();
        let via_dist = r_q(q, &shape, &dist).unwrap();
        cases.push(CaseResult::eq(
            format!("q={q} k={k} s={s} m={m} l={l}"),
            direct,
            via_dist.value,
        ));
    }
    CriterionReport {
        id: 10,
        title: "direct solution enumeration",
        cases,
    }
}

/// Criterion 11: the invertible fraction is 21/64.
pub fn criterion_invertible_fraction() -> CriterionReport {
    let mut cases = Vec::new();
    // symbolic route for m >= 2: numerator 21*2^(8m+12s-9) over 2^(12s+8m-3)
    for (s, m) in [(1usize, 2usize), (2, 2), (2, 3), (3, 2), (3, 4)] {
        let k = 3 * s + 2 * m;
        let num = gamma_ssm(s, m, k, k).unwrap().value;
        cases.push(CaseResult::eq(
            format!("square top value s={s} m={m}"),
            num.clone(),
            big(21) << (8 * m + 12 * s - 9),
        ));
        let den = BigUint::one() << (12 * s + 8 * m - 3);
        let g = num_integer::Integer::gcd(&num, &den);
        cases.push(CaseResult::eq(
            format!("fraction s={s} m={m}"),
            (num / &g, den / &g),
            (big(21), big(64)),
        ));
    }
    // oracle confirmation at the square shapes within budget
    for (s, m) in [(1usize, 0usize), (1, 1), (2, 0)] {
        let k = 3 * s + 2 * m;
        let shape = TripleShape::new(s, m, 0, k).unwrap();
        let dist = gamma_bruteforce(&shape, 24).unwrap();
        let num = dist.counts[k].clone();
        let den = dist.total();
        let g = num_integer::Integer::gcd(&num, &den);
        cases.push(CaseResult::eq(
            format!("oracle fraction s={s} m={m}"),
            (num / &g, den / &g),
            (big(21), big(64)),
        ));
    }
    CriterionReport {
        id: 11,
        title: "invertibility fraction 21/64",
        cases,
    }
}

/// Criterion 12: reduction identities, oracle-checked and symbolic.
pub fn criterion_reductions(bit_budget: u32) -> CriterionReport {
    let mut cases = Vec::new();
    let mut oracle_points = 0usize;
    for shape in shapes_within_bits(bit_budget.min(18)) {
        let brute = gamma_bruteforce(&shape, bit_budget).unwrap();
        for i in 0..=shape.max_rank() {
            if let Some(r) = reduction_map(&shape, i) {
                let rhs = match gamma_bruteforce(&r.target, bit_budget) {
                    Ok(d) => d.count(r.i) * r.factor(),
                    Err(_) => continue,
                };
                if brute.counts[i] != rhs {
                    cases.push(CaseResult::fail(
                        format!("reduction {} i={i} [{}]", ShapeClass::Triple(shape), r.source),
                        format!("lhs {} rhs {rhs}", brute.counts[i]),
                    ));
                }
                oracle_points += 1;
            }
        }
    }
    cases.push(CaseResult::ok(format!(
        "{oracle_points} reduction points agree with enumeration"
    )));
    // symbolic spot checks at widths beyond any budget
    let mut symbolic = 0usize;
    for (s, m) in [(2usize, 0usize), (3, 0), (4, 0), (2, 1), (3, 1), (2, 2), (2, 3), (3, 2)] {
        let top = 3 * s + 2 * m;
        for k in (top + 2)..=(top + 4) {
            let shape = TripleShape::new(s, m, 0, k).unwrap();
            for i in (2 * s + m + 1)..=top {
                if let Some(r) = reduction_map(&shape, i) {
                    let lhs = gamma_ssm(s, m, k, i).unwrap().value;
                    let rhs = gamma_ssm(r.target.s(), r.target.m(), r.target.k(), r.i)
                        .unwrap()
                        .value
                        * r.factor();
                    if lhs != rhs {
                        cases.push(CaseResult::fail(
                            format!("symbolic reduction {} i={i} [{}]", ShapeClass::Triple(shape), r.source),
                            format!("lhs {lhs} rhs {rhs}"),
                        ));
                    }
                    symbolic += 1;
                }
            }
        }
    }
    cases.push(CaseResult::ok(format!(
        "{symbolic} symbolic reduction points agree across closed forms"
    )));
    CriterionReport {
        id: 12,
        title: "reduction formulas",
        cases,
    }
}

/// Runs every criterion at the given budget.
pub fn run_all(bit_budget: u32) -> Vec<CriterionReport> {
    vec![
        criterion_golden_tables(),
        criterion_solution_counts(),
        criterion_oracle_equivalence(bit_budget),
        criterion_moments(bit_budget),
        criterion_low_rank_universality(),
        criterion_recurrence_crosscheck(),
        criterion_a_coefficients(),
        criterion_exponential_sums(bit_budget.max(24)),
        criterion_profile_vanishing(),
        criterion_solution_enumeration(),
        criterion_invertible_fraction(),
        criterion_reductions(bit_budget),
    ]
}
