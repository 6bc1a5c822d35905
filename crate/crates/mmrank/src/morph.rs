//! Transformations between formats: blockwise extension, restriction by
//! zeroing, and the symmetry group of the matrix multiplication tensor.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::scheme::{AnyScheme, Format, Scheme, Term};

/// Which indices survive a restriction, per axis. Indices must be strictly
/// increasing and within the source dimension.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Selector {
    pub n_keep: Vec<usize>,
    pub m_keep: Vec<usize>,
    pub p_keep: Vec<usize>,
}

impl Selector {
    /// Keep the leading indices of each axis (the trailing ones are
    /// zeroed), matching the usual blockwise picture.
    pub fn prefix(target: Format) -> Self {
        Selector {
            n_keep: (0..target.n).collect(),
            m_keep: (0..target.m).collect(),
            p_keep: (0..target.p).collect(),
        }
    }

    fn validate(&self, source: Format, target: Format) -> Result<()> {
        let axes = [
            ("n", &self.n_keep, source.n, target.n),
            ("m", &self.m_keep, source.m, target.m),
            ("p", &self.p_keep, source.p, target.p),
        ];
        for (name, keep, src, tgt) in axes {
            if keep.len() != tgt {
                return Err(Error::SelectorOutOfRange(format!(
                    "{name}-axis selector keeps {} indices, target needs {tgt}",
                    keep.len()
                )));
            }
            if keep.iter().any(|&i| i >= src) {
                return Err(Error::SelectorOutOfRange(format!(
                    "{name}-axis selector index out of range (source dim {src})"
                )));
            }
            if keep.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::SelectorOutOfRange(format!(
                    "{name}-axis selector must be strictly increasing"
                )));
            }
        }
        Ok(())
    }
}

/// Patch two schemes of formats (n,m,p) and (n,m,q) into one of format
/// (n,m,p+q): the second operand's B and C blocks are shifted past the
/// first's. Rank is exactly additive.
pub fn extend<M: Mat>(s1: &Scheme<M>, s2: &Scheme<M>) -> Result<Scheme<M>> {
    let (f1, f2) = (s1.format(), s2.format());
    if f1.n != f2.n || f1.m != f2.m {
        return Err(Error::IncompatibleFormats(format!(
            "extend needs matching n and m, got {f1} and {f2}"
        )));
    }
    if s1.ring() != s2.ring() {
        return Err(Error::IncompatibleFormats(format!(
            "extend needs matching rings, got {} and {}",
            s1.ring(),
            s2.ring()
        )));
    }
    let out_f = Format::new(f1.n, f1.m, f1.p + f2.p)?;
    let (n, m, p) = (out_f.n, out_f.m, out_f.p);
    let mut terms = Vec::with_capacity(s1.rank() + s2.rank());
    for t in s1.terms() {
        terms.push(Term::new(
            t.a.clone(),
            t.b.embedded(m, p, 0, 0),
            t.c.embedded(p, n, 0, 0),
        ));
    }
    for t in s2.terms() {
        terms.push(Term::new(
            t.a.clone(),
            t.b.embedded(m, p, 0, f1.p),
            t.c.embedded(p, n, f1.p, 0),
        ));
    }
    Ok(Scheme::from_parts_unchecked(out_f, s1.ring(), terms))
}

/// Zero out the rows and columns not selected, then drop the coordinates:
/// every scheme contains schemes of all smaller formats this way. Terms
/// that lose a whole component become zero and are dropped.
pub fn restrict<M: Mat>(
    s: &Scheme<M>,
    target: Format,
    selector: &Selector,
) -> Result<Scheme<M>> {
    selector.validate(s.format(), target)?;
    let mut terms = Vec::with_capacity(s.rank());
    for t in s.terms() {
        let cropped = Term::new(
            t.a.cropped(&selector.n_keep, &selector.m_keep),
            t.b.cropped(&selector.m_keep, &selector.p_keep),
            t.c.cropped(&selector.p_keep, &selector.n_keep),
        );
        if !cropped.has_zero_component() {
            terms.push(cropped);
        }
    }
    Ok(Scheme::from_parts_unchecked(target, s.ring(), terms))
}

/// Cyclic symmetry: (A,B,C) -> (B,C,A), format (n,m,p) -> (m,p,n).
/// Order three; preserves verification and rank.
pub fn rotate<M: Mat>(s: &Scheme<M>) -> Scheme<M> {
    let terms = s
        .terms()
        .iter()
        .map(|t| Term::new(t.b.clone(), t.c.clone(), t.a.clone()))
        .collect();
    Scheme::from_parts_unchecked(s.format().rotated(), s.ring(), terms)
}

/// Transpose symmetry, from (XY)^T = Y^T X^T: (A,B,C) -> (B^T, A^T, C^T),
/// format (n,m,p) -> (p,m,n). An involution.
pub fn transpose<M: Mat>(s: &Scheme<M>) -> Scheme<M> {
    let terms = s
        .terms()
        .iter()
        .map(|t| Term::new(t.b.transposed(), t.a.transposed(), t.c.transposed()))
        .collect();
    Scheme::from_parts_unchecked(s.format().transposed(), s.ring(), terms)
}

/// All six symmetry images, in a fixed order: identity, the two
/// rotations, and the three transposed variants.
pub fn symmetry_orbit<M: Mat>(s: &Scheme<M>) -> Vec<Scheme<M>> {
    let r1 = rotate(s);
    let r2 = rotate(&r1);
    let t0 = transpose(s);
    let t1 = transpose(&r1);
    let t2 = transpose(&r2);
    vec![s.clone(), r1, r2, t0, t1, t2]
}

/// Rotate/transpose until n <= m <= p.
pub fn canonical_format<M: Mat>(s: &Scheme<M>) -> Scheme<M> {
    if s.format().is_sorted() {
        return s.clone();
    }
    symmetry_orbit(s)
        .into_iter()
        .find(|img| img.format().is_sorted())
        .expect("the symmetry orbit realizes every ordering of the dimensions")
}

impl AnyScheme {
    pub fn extend(&self, other: &AnyScheme) -> Result<AnyScheme> {
        match (self, other) {
            (AnyScheme::Gf2(a), AnyScheme::Gf2(b)) => Ok(AnyScheme::Gf2(extend(a, b)?)),
            (AnyScheme::Int(a), AnyScheme::Int(b)) => Ok(AnyScheme::Int(extend(a, b)?)),
            _ => Err(Error::IncompatibleFormats(format!(
                "extend needs matching rings, got {} and {}",
                self.ring(),
                other.ring()
            ))),
        }
    }

    pub fn restrict(&self, target: Format, selector: &Selector) -> Result<AnyScheme> {
        match self {
            AnyScheme::Gf2(s) => Ok(AnyScheme::Gf2(restrict(s, target, selector)?)),
            AnyScheme::Int(s) => Ok(AnyScheme::Int(restrict(s, target, selector)?)),
        }
    }

    pub fn rotate(&self) -> AnyScheme {
        match self {
            AnyScheme::Gf2(s) => AnyScheme::Gf2(rotate(s)),
            AnyScheme::Int(s) => AnyScheme::Int(rotate(s)),
        }
    }

    pub fn transpose(&self) -> AnyScheme {
        match self {
            AnyScheme::Gf2(s) => AnyScheme::Gf2(transpose(s)),
            AnyScheme::Int(s) => AnyScheme::Int(transpose(s)),
        }
    }

    pub fn canonical_format(&self) -> AnyScheme {
        match self {
            AnyScheme::Gf2(s) => AnyScheme::Gf2(canonical_format(s)),
            AnyScheme::Int(s) => AnyScheme::Int(canonical_format(s)),
        }
    }
}
