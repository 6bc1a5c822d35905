//! Hensel lifting of Z_2 schemes to Z mod 2^k and reconstruction of
//! integer-coefficient schemes.
//!
//! One Newton step per bit of precision: a scheme correct mod 2^k has
//! Brent residuals divisible by 2^k; writing them as 2^k * E and solving
//! the linearized system J * delta = E over Z_2 (J the Jacobian of the
//! Brent polynomials, which mod 2 depends only on the original Z_2
//! scheme) yields a correction making the scheme correct mod 2^(k+1).
//!
//! The system is usually underdetermined and the solution variety is
//! positive-dimensional, so an arbitrary solution chain converges to a
//! 2-adic point that is almost never integral. The lift driver therefore
//! samples several rng-driven solutions per level and greedily follows
//! the one with the smallest balanced coefficients; a lift has settled
//! once the residuals vanish exactly, which is checked by attempting
//! integer reconstruction as the chain climbs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::intmat::IntMatrix;
use crate::scheme::{Format, Gf2Scheme, IntScheme, Ring, Slot, Term};

/// Solution candidates sampled per level by the lift driver.
const SOLUTION_SAMPLES: usize = 32;

/// Outcome of one lifting attempt chain.
#[derive(Clone, Copy, Debug)]
pub struct LiftAttempt {
    /// Highest modulus exponent reached (scheme was correct mod 2^max_k).
    pub max_k: u32,
    /// Set when the linear system became inconsistent stepping past max_k.
    pub obstructed_at: Option<u32>,
}

/// Per-attempt obstruction depths of a failed lift.
#[derive(Clone, Debug, Default)]
pub struct LiftReport {
    pub attempts: Vec<LiftAttempt>,
}

#[derive(Clone, Debug)]
pub enum LiftOutcome {
    Lifted(IntScheme),
    Failed(LiftReport),
}

impl LiftOutcome {
    pub fn lifted(&self) -> Option<&IntScheme> {
        match self {
            LiftOutcome::Lifted(s) => Some(s),
            LiftOutcome::Failed(_) => None,
        }
    }
}

/// One Newton step: a scheme correct mod 2^k becomes correct mod 2^(k+1),
/// or the step is obstructed. Free solution dimensions are drawn at
/// random; residuals that are already zero leave the scheme unchanged.
pub fn hensel_step(s: &IntScheme, rng: &mut impl Rng) -> Result<IntScheme> {
    let Ring::Mod2k(k) = s.ring() else {
        return Err(Error::InvalidRing(format!(
            "hensel_step needs a mod-2^k scheme, got {}",
            s.ring()
        )));
    };
    if k >= 62 {
        return Err(Error::InvalidRing("cannot lift past 2^62".into()));
    }
    let mut terms = s.terms().to_vec();
    let system = StepSystem::build(s.format(), &terms, k)?;
    if system.any_residual {
        let delta = system.solve_with(|| rng.gen::<bool>());
        apply_delta(s.format(), &mut terms, &delta, k);
    }
    IntScheme::new_int(s.format(), Ring::Mod2k(k + 1), terms)
}

/// Balanced representatives as plain integers, accepted iff the scheme
/// verifies exactly over Z.
pub fn reconstruct_integers(s: &IntScheme) -> Result<IntScheme> {
    let Ring::Mod2k(k) = s.ring() else {
        return Err(Error::InvalidRing(format!(
            "reconstruct_integers needs a mod-2^k scheme, got {}",
            s.ring()
        )));
    };
    debug_assert!(k >= 2);
    let candidate = s.retagged_integer();
    // coefficients too large for exact verification cannot be a settled lift
    let max = candidate.max_abs_coefficient().max(1) as u128;
    let bits = 128 - max.leading_zeros();
    let rank_bits = 64 - (candidate.rank().max(1) as u64).leading_zeros();
    if 3 * bits + rank_bits > 126 {
        return Err(Error::NotStabilized);
    }
    if candidate.verify() {
        Ok(candidate)
    } else {
        Err(Error::NotStabilized)
    }
}

/// Repeated Hensel chains from a verified Z_2 scheme with fresh random
/// choices per attempt. Each level follows the sampled solution with the
/// smallest balanced coefficients; integer reconstruction is attempted
/// as soon as it can settle (always at k_max).
pub fn lift(
    s: &Gf2Scheme,
    attempts: u32,
    k_max: u32,
    rng: &mut impl Rng,
) -> Result<LiftOutcome> {
    if attempts == 0 || !(2..=62).contains(&k_max) {
        return Err(Error::InvalidScheme(
            "lift needs attempts >= 1 and 2 <= k_max <= 62".into(),
        ));
    }
    if !s.verify() {
        return Err(Error::InvalidScheme(
            "lift input does not satisfy the Brent equations over gf2".into(),
        ));
    }
    let format = s.format();
    let base = s.to_int_scheme(Ring::Integer)?;
    // exact verification per level is cheap for small systems; larger
    // formats only reconstruct once the coefficients stop moving
    let check_every_level = format.brent_equation_count() * s.rank() as u64 <= 20_000_000;
    let mut report = LiftReport::default();
    for _ in 0..attempts {
        let mut terms = base.terms().to_vec();
        let mut k = 1u32;
        let mut obstructed_at = None;
        let mut prev: Option<Vec<Term<IntMatrix>>> = None;
        while k < k_max {
            let system = match StepSystem::build(format, &terms, k) {
                Ok(sys) => sys,
                Err(Error::Obstructed { .. }) => {
                    obstructed_at = Some(k + 1);
                    break;
                }
                Err(e) => return Err(e),
            };
            if system.any_residual {
                let mut best: Option<(i64, i64, Vec<Term<IntMatrix>>)> = None;
                for sample in 0..SOLUTION_SAMPLES {
                    // the first candidate is the plain echelon solution
                    let delta = if sample == 0 {
                        system.solve_with(|| false)
                    } else {
                        system.solve_with(|| rng.gen::<bool>())
                    };
                    let mut cand = terms.clone();
                    apply_delta(format, &mut cand, &delta, k);
                    let score = coefficient_score(&cand);
                    if best.as_ref().is_none_or(|(ma, sa, _)| score < (*ma, *sa)) {
                        best = Some((score.0, score.1, cand));
                    }
                }
                terms = best.expect("at least one candidate").2;
            }
            k += 1;
            let stabilized = prev.as_deref() == Some(terms.as_slice());
            prev = Some(terms.clone());
            if stabilized || check_every_level || k == k_max {
                let candidate = IntScheme::new_int(format, Ring::Mod2k(k), terms.clone())?;
                if let Ok(lifted) = reconstruct_integers(&candidate) {
                    debug_assert_eq!(lifted.rank(), s.rank());
                    return Ok(LiftOutcome::Lifted(lifted));
                }
            }
        }
        report.attempts.push(LiftAttempt {
            max_k: k,
            obstructed_at,
        });
    }
    Ok(LiftOutcome::Failed(report))
}

/// (largest |coefficient|, sum of |coefficients|): the greedy selection
/// key steering chains toward small integer points.
fn coefficient_score(terms: &[Term<IntMatrix>]) -> (i64, i64) {
    let mut max = 0i64;
    let mut sum = 0i64;
    for t in terms {
        for slot in Slot::ALL {
            for &v in t.slot(slot).entries() {
                max = max.max(v.abs());
                sum += v.abs();
            }
        }
    }
    (max, sum)
}

/// Column layout of the linearized system: all coefficients of term l,
/// slots A then B then C, row-major.
fn column_of(format: Format, l: usize, slot: Slot, r: usize, c: usize) -> usize {
    let (n, m, p) = (format.n, format.m, format.p);
    let per_term = n * m + m * p + p * n;
    let base = l * per_term;
    match slot {
        Slot::A => base + r * m + c,
        Slot::B => base + n * m + r * p + c,
        Slot::C => base + n * m + m * p + r * n + c,
    }
}

/// Echelonized linearized system for one level: J * delta = E over Z_2,
/// with the augmented bit stored past the last unknown.
struct StepSystem {
    unknowns: usize,
    aug_bit: usize,
    pivots: Vec<Option<Vec<u64>>>,
    any_residual: bool,
}

impl StepSystem {
    /// Build and echelonize the system for stepping from 2^k to 2^(k+1).
    /// Fails with `Obstructed` when inconsistent.
    fn build(format: Format, terms: &[Term<IntMatrix>], k: u32) -> Result<StepSystem> {
        let (n, m, p) = (format.n, format.m, format.p);
        let r = terms.len();
        let unknowns = r * (n * m + m * p + p * n);
        let words = unknowns / 64 + 1; // last word also carries the augmented bit
        let aug_bit = unknowns;

        // parity of every coefficient; mod 2 the Jacobian only sees these
        let bit = |m: &IntMatrix, r: usize, c: usize| (m.get(r, c) as u64) & 1;

        let mask = (1u64 << (k + 1)) - 1;
        let low_mask = (1u64 << k) - 1;

        let mut sys = StepSystem {
            unknowns,
            aug_bit,
            pivots: vec![None; unknowns],
            any_residual: false,
        };
        let mut row = vec![0u64; words];

        for i1 in 0..n {
            for i2 in 0..m {
                for j1 in 0..m {
                    for j2 in 0..p {
                        for k1 in 0..p {
                            for k2 in 0..n {
                                // residual of this Brent equation mod 2^(k+1)
                                let mut f: u64 = 0;
                                for t in terms.iter() {
                                    let prod = (t.a.get(i1, i2) as u64)
                                        .wrapping_mul(t.b.get(j1, j2) as u64)
                                        .wrapping_mul(t.c.get(k1, k2) as u64);
                                    f = f.wrapping_add(prod);
                                }
                                let delta = (i2 == j1 && j2 == k1 && k2 == i1) as u64;
                                f = f.wrapping_sub(delta) & mask;
                                if f & low_mask != 0 {
                                    return Err(Error::InvalidScheme(format!(
                                        "input scheme is not correct mod 2^{k}"
                                    )));
                                }
                                let e = f >> k; // 0 or 1

                                row.iter_mut().for_each(|w| *w = 0);
                                for (l, t) in terms.iter().enumerate() {
                                    let a = bit(&t.a, i1, i2);
                                    let b = bit(&t.b, j1, j2);
                                    let c = bit(&t.c, k1, k2);
                                    if b & c == 1 {
                                        let col = column_of(format, l, Slot::A, i1, i2);
                                        row[col / 64] ^= 1 << (col % 64);
                                    }
                                    if a & c == 1 {
                                        let col = column_of(format, l, Slot::B, j1, j2);
                                        row[col / 64] ^= 1 << (col % 64);
                                    }
                                    if a & b == 1 {
                                        let col = column_of(format, l, Slot::C, k1, k2);
                                        row[col / 64] ^= 1 << (col % 64);
                                    }
                                }
                                if e == 1 {
                                    row[aug_bit / 64] ^= 1 << (aug_bit % 64);
                                    sys.any_residual = true;
                                }
                                sys.fold_row(&mut row, k)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(sys)
    }

    /// Fold one row into the online echelon form; a row reducing to zero
    /// coefficients with the augmented bit set means the system has no
    /// solution.
    fn fold_row(&mut self, row: &mut [u64], k: u32) -> Result<()> {
        loop {
            let mut lead = None;
            'scan: for (wi, &w) in row.iter().enumerate() {
                if w != 0 {
                    let col = wi * 64 + w.trailing_zeros() as usize;
                    if col != self.aug_bit {
                        lead = Some(col);
                    }
                    break 'scan;
                }
            }
            let Some(col) = lead else {
                let aug = (row[self.aug_bit / 64] >> (self.aug_bit % 64)) & 1;
                if aug == 1 {
                    return Err(Error::Obstructed { k });
                }
                return Ok(());
            };
            match &self.pivots[col] {
                Some(prow) => {
                    for (w, pw) in row.iter_mut().zip(prow.iter()) {
                        *w ^= pw;
                    }
                }
                None => {
                    self.pivots[col] = Some(row.to_vec());
                    return Ok(());
                }
            }
        }
    }

    /// A solution of J * delta = E: free variables are drawn from `free`,
    /// pivots back-substituted in decreasing column order.
    fn solve_with(&self, mut free: impl FnMut() -> bool) -> Vec<u64> {
        let words = self.unknowns / 64 + 1;
        let mut delta = vec![0u64; words];
        for col in 0..self.unknowns {
            if self.pivots[col].is_none() && free() {
                delta[col / 64] |= 1 << (col % 64);
            }
        }
        for col in (0..self.unknowns).rev() {
            if let Some(prow) = &self.pivots[col] {
                let mut parity = 0u64;
                for (w, d) in prow.iter().zip(delta.iter()) {
                    parity ^= w & d;
                }
                // the pivot bit itself is still 0 in delta here
                let aug = (prow[self.aug_bit / 64] >> (self.aug_bit % 64)) & 1;
                let value = (parity.count_ones() as u64 & 1) ^ aug;
                if value == 1 {
                    delta[col / 64] |= 1 << (col % 64);
                }
            }
        }
        delta
    }
}

/// Apply a correction: coefficient += delta * 2^k, rebalanced mod 2^(k+1).
fn apply_delta(format: Format, terms: &mut [Term<IntMatrix>], delta: &[u64], k: u32) {
    let add = 1i64 << k;
    let half = 1i64 << k; // 2^((k+1)-1)
    let modulus = 1i64 << (k + 1);
    for (l, t) in terms.iter_mut().enumerate() {
        for slot in Slot::ALL {
            let mat = t.slot_mut(slot);
            let (rows, cols) = (mat.rows(), mat.cols());
            for rr in 0..rows {
                for cc in 0..cols {
                    let col = column_of(format, l, slot, rr, cc);
                    let mut v = mat.get(rr, cc);
                    if (delta[col / 64] >> (col % 64)) & 1 == 1 {
                        v += add;
                    }
                    // rebalance into (-2^k, 2^k]
                    if v > half {
                        v -= modulus;
                    } else if v <= half - modulus {
                        v += modulus;
                    }
                    mat.set(rr, cc, v);
                }
            }
        }
    }
}
