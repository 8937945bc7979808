//! Exact rank distributions of stacked persymmetric matrices over GF(2),
//! computed three independent ways — closed forms, a recurrence engine and
//! exhaustive enumeration — plus exact counts of solutions of bilinear
//! polynomial systems over F2[T] under degree caps.
//!
//! All counting is exact: arbitrary-precision integers everywhere, no
//! floating point. Enumeration is the ground truth; transcribed closed
//! forms that disagree with it carry corrections recorded in
//! [`errata`].

pub mod checks;
pub mod counting;
pub mod dist;
pub mod enumeration;
pub mod errata;
pub mod formulas;
pub mod gf2;
pub mod recurrence;
pub mod shape;

pub use dist::{JointRankProfile, Method, RankDistribution, ShapeClass};
pub use gf2::{persymmetric_matrix, BitMatrix, Bits};
pub use recurrence::{moment_check, Engine};
pub use shape::{stack_mixed, stack_triple, CoefficientTriple, MixedShape, ShapeError, TripleShape};

/// All triple shapes whose free-bit count stays within `max_bits`, in a
/// fixed deterministic order. Used by oracle sweeps.
pub fn shapes_within_bits(max_bits: u32) -> Vec<TripleShape> {
    let mut out = Vec::new();
    let cap = max_bits as usize;
    for s in 1.. {
        if 3 * s + 3 - 3 + 3 > cap {
            // even k = 1, m = l = 0 no longer fits
            break;
        }
        for m in 0.. {
            if 3 + 3 * s + 2 * m - 3 > cap {
                break;
            }
            for l in 0.. {
                if 3 + 3 * s + 2 * m + l - 3 > cap {
                    break;
                }
                for k in 1.. {
                    let bits = 3 * k + 3 * s + 2 * m + l - 3;
                    if bits > cap {
                        break;
                    }
                    out.push(TripleShape::new(s, m, l, k).unwrap());
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_sweep_is_exhaustive_and_bounded() {
        let shapes = shapes_within_bits(14);
        assert!(shapes.iter().all(|s| s.total_coeff_bits() <= 14));
        assert!(shapes.contains(&TripleShape::new(1, 0, 0, 1).unwrap()));
        assert!(shapes.contains(&TripleShape::new(2, 0, 0, 3).unwrap()));
        assert!(!shapes.contains(&TripleShape::new(2, 0, 0, 4).unwrap()));
        // strictly increasing bits within fixed (s, m, l)
        let mut seen = std::collections::HashSet::new();
        for s in &shapes {
            assert!(seen.insert((s.s(), s.m(), s.l(), s.k())));
        }
    }
}
