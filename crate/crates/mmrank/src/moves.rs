//! The flip graph move set over Z_2: rank-preserving flips, rank-decreasing
//! reductions and rank-increasing escape splits.
//!
//! The flip identity, for two terms sharing component a:
//!
//!   a (x) b_i (x) c_i  +  a (x) b_j (x) c_j
//!     =  a (x) (b_i + b_j) (x) c_i  +  a (x) b_j (x) (c_j + c_i)
//!
//! and its images under rotating which slot is shared. Over Z_2 subtraction
//! is addition, so a flip is two XORs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::Gf2Matrix;
use crate::scheme::{Gf2Scheme, Slot};

/// A flip between terms `i` and `j`, which agree in slot `shared`.
///
/// The ordered pair encodes the direction: term `i` absorbs the sum in the
/// slot after `shared` (cyclically), term `j` absorbs in the remaining one.
/// Swapping `i` and `j` gives the other direction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct FlipMove {
    pub shared: Slot,
    pub i: usize,
    pub j: usize,
}

/// A reduction between terms `i < j` that agree in at least two slots.
/// If they agree in exactly two, the pair merges into one term; if they
/// are identical, both cancel.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ReductionMove {
    pub i: usize,
    pub j: usize,
}

/// An escape move: term `i`'s component in `slot` is split into
/// `mask` + (component + mask), increasing the rank by one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitMove {
    pub i: usize,
    pub slot: Slot,
    pub mask: Gf2Matrix,
}

fn check_index(rank: usize, idx: usize) -> Result<()> {
    if idx >= rank {
        return Err(Error::NotAFlip(format!(
            "term index {idx} out of range for rank {rank}"
        )));
    }
    Ok(())
}

/// Apply a flip, returning the rewritten scheme. The rank is unchanged
/// unless a component becomes zero, in which case that term is dropped.
pub fn flip(s: &Gf2Scheme, mv: FlipMove) -> Result<Gf2Scheme> {
    check_index(s.rank(), mv.i)?;
    check_index(s.rank(), mv.j)?;
    if mv.i == mv.j {
        return Err(Error::NotAFlip("term indices must differ".into()));
    }
    let ti = &s.terms()[mv.i];
    let tj = &s.terms()[mv.j];
    if ti.slot(mv.shared) != tj.slot(mv.shared) {
        return Err(Error::NotAFlip(format!(
            "terms {} and {} do not share slot {}",
            mv.i, mv.j, mv.shared
        )));
    }
    if ti == tj {
        return Err(Error::NotAFlip(
            "terms are identical; cancel them with a reduction instead".into(),
        ));
    }
    let u = mv.shared.next();
    let v = u.next();
    let new_u = ti.slot(u).xored(tj.slot(u));
    let new_v = tj.slot(v).xored(ti.slot(v));

    let mut out = s.clone();
    let terms = out.terms_mut();
    let drop_i = new_u.is_zero();
    let drop_j = new_v.is_zero();
    *terms[mv.i].slot_mut(u) = new_u;
    *terms[mv.j].slot_mut(v) = new_v;
    debug_assert!(!(drop_i && drop_j), "identical terms were rejected above");
    if drop_i {
        terms.remove(mv.i);
    } else if drop_j {
        terms.remove(mv.j);
    }
    Ok(out)
}

/// All valid flips, grouped by shared slot A then B then C, groups and
/// pairs in the total component order. Identical term pairs are excluded
/// (they are reduction material).
pub fn enumerate_flips(s: &Gf2Scheme) -> Vec<FlipMove> {
    let mut moves = Vec::new();
    let terms = s.terms();
    let mut idx: Vec<usize> = (0..terms.len()).collect();
    for slot in Slot::ALL {
        idx.sort_unstable_by(|&a, &b| {
            terms[a]
                .slot(slot)
                .cmp(terms[b].slot(slot))
                .then(a.cmp(&b))
        });
        let mut start = 0;
        while start < idx.len() {
            let mut end = start + 1;
            while end < idx.len()
                && terms[idx[end]].slot(slot) == terms[idx[start]].slot(slot)
            {
                end += 1;
            }
            for &i in &idx[start..end] {
                for &j in &idx[start..end] {
                    if i != j && terms[i] != terms[j] {
                        moves.push(FlipMove { shared: slot, i, j });
                    }
                }
            }
            start = end;
        }
    }
    moves
}

/// All unordered pairs of terms sharing at least two component slots,
/// in ascending (i, j) order.
pub fn find_reductions(s: &Gf2Scheme) -> Vec<ReductionMove> {
    use std::collections::HashMap;
    let terms = s.terms();
    let mut pairs: Vec<ReductionMove> = Vec::new();
    for (s1, s2) in [(Slot::A, Slot::B), (Slot::B, Slot::C), (Slot::C, Slot::A)] {
        let mut groups: HashMap<(&Gf2Matrix, &Gf2Matrix), Vec<usize>> = HashMap::new();
        for (l, t) in terms.iter().enumerate() {
            groups.entry((t.slot(s1), t.slot(s2))).or_default().push(l);
        }
        for members in groups.values() {
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    pairs.push(ReductionMove { i, j });
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Apply a reduction. Terms agreeing in exactly two slots merge into one
/// (rank -1); identical terms cancel (rank -2).
pub fn reduce(s: &Gf2Scheme, mv: ReductionMove) -> Result<Gf2Scheme> {
    let rank = s.rank();
    if mv.i >= rank || mv.j >= rank || mv.i == mv.j {
        return Err(Error::NotAReduction(format!(
            "bad term indices ({}, {}) for rank {rank}",
            mv.i, mv.j
        )));
    }
    let ti = &s.terms()[mv.i];
    let tj = &s.terms()[mv.j];
    let shared = ti.shared_slots(tj);
    if shared < 2 {
        return Err(Error::NotAReduction(format!(
            "terms {} and {} share {shared} slots, need at least 2",
            mv.i, mv.j
        )));
    }
    let (lo, hi) = (mv.i.min(mv.j), mv.i.max(mv.j));
    let mut out = s.clone();
    let terms = out.terms_mut();
    if shared == 3 {
        terms.remove(hi);
        terms.remove(lo);
        return Ok(out);
    }
    let diff = Slot::ALL
        .into_iter()
        .find(|&sl| terms[lo].slot(sl) != terms[hi].slot(sl))
        .expect("exactly two slots shared");
    let merged = terms[lo].slot(diff).xored(terms[hi].slot(diff));
    debug_assert!(!merged.is_zero());
    *terms[lo].slot_mut(diff) = merged;
    terms.remove(hi);
    Ok(out)
}

/// Apply a split: term `i`'s component in `slot` is replaced by `mask`,
/// and a sibling term with component `old + mask` is appended.
pub fn split(s: &Gf2Scheme, mv: &SplitMove) -> Result<Gf2Scheme> {
    let rank = s.rank();
    if mv.i >= rank {
        return Err(Error::DegenerateSplit(format!(
            "term index {} out of range for rank {rank}",
            mv.i
        )));
    }
    let old = s.terms()[mv.i].slot(mv.slot);
    if mv.mask.rows() != old.rows() || mv.mask.cols() != old.cols() {
        return Err(Error::DegenerateSplit("mask dimensions mismatch".into()));
    }
    if mv.mask.is_zero() || mv.mask == *old {
        return Err(Error::DegenerateSplit(
            "mask must be nonzero and differ from the component".into(),
        ));
    }
    let mut out = s.clone();
    let terms = out.terms_mut();
    let mut sibling = terms[mv.i].clone();
    *sibling.slot_mut(mv.slot) = old.xored(&mv.mask);
    *terms[mv.i].slot_mut(mv.slot) = mv.mask.clone();
    terms.push(sibling);
    Ok(out)
}

/// Sample a uniformly random valid split: uniform term, uniform slot,
/// uniform nonzero mask different from the current component. Returns
/// None when no valid mask exists (1x1 components only).
pub fn random_split(s: &Gf2Scheme, rng: &mut impl Rng) -> Option<SplitMove> {
    if s.rank() == 0 {
        return None;
    }
    let i = rng.gen_range(0..s.rank());
    let slot = Slot::ALL[rng.gen_range(0..3)];
    let current = s.terms()[i].slot(slot);
    let (rows, cols) = (current.rows(), current.cols());
    if rows * cols == 1 {
        // the only nonzero 1x1 matrix is the component itself
        return None;
    }
    loop {
        let mask = Gf2Matrix::random(rows, cols, rng);
        if !mask.is_zero() && mask != *current {
            return Some(SplitMove { i, slot, mask });
        }
    }
}
