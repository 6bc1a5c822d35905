use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, MAX_DIM};
use crate::intmat::{balanced_mod2k, IntMatrix};
use crate::mat::Mat;

/// Dimensions of the matrix product being computed: an n x m matrix times
/// an m x p matrix.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Format {
    pub n: usize,
    pub m: usize,
    pub p: usize,
}

impl Format {
    pub fn new(n: usize, m: usize, p: usize) -> Result<Self> {
        for (name, v) in [("n", n), ("m", m), ("p", p)] {
            if !(1..=MAX_DIM).contains(&v) {
                return Err(Error::InvalidFormat(format!(
                    "{name} = {v} out of range 1..={MAX_DIM}"
                )));
            }
        }
        Ok(Format { n, m, p })
    }

    /// Rank of the standard algorithm.
    pub fn naive_rank(&self) -> usize {
        self.n * self.m * self.p
    }

    /// Image under the cyclic symmetry (n,m,p) -> (m,p,n).
    pub fn rotated(&self) -> Format {
        Format {
            n: self.m,
            m: self.p,
            p: self.n,
        }
    }

    /// Image under the transpose symmetry (n,m,p) -> (p,m,n).
    pub fn transposed(&self) -> Format {
        Format {
            n: self.p,
            m: self.m,
            p: self.n,
        }
    }

    pub fn is_sorted(&self) -> bool {
        self.n <= self.m && self.m <= self.p
    }

    /// Number of Brent equations for this format: (nm)(mp)(pn).
    pub fn brent_equation_count(&self) -> u64 {
        let (n, m, p) = (self.n as u64, self.m as u64, self.p as u64);
        (n * m) * (m * p) * (p * n)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.m, self.p)
    }
}

impl fmt::Debug for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Format({},{},{})", self.n, self.m, self.p)
    }
}

/// Coefficient ring of a scheme.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Ring {
    Gf2,
    /// Z mod 2^k, 2 <= k <= 62; entries stored as balanced representatives.
    Mod2k(u32),
    Integer,
}

impl Ring {
    pub fn validate(&self) -> Result<()> {
        if let Ring::Mod2k(k) = self {
            if !(2..=62).contains(k) {
                return Err(Error::InvalidRing(format!(
                    "mod 2^k requires 2 <= k <= 62, got k = {k}"
                )));
            }
        }
        Ok(())
    }

    pub fn parse(s: &str) -> Result<Ring> {
        if s == "gf2" {
            return Ok(Ring::Gf2);
        }
        if s == "integer" {
            return Ok(Ring::Integer);
        }
        if let Some(k) = s.strip_prefix("mod2^") {
            let k: u32 = k
                .parse()
                .map_err(|_| Error::InvalidRing(format!("bad modulus exponent in {s:?}")))?;
            let ring = Ring::Mod2k(k);
            ring.validate()?;
            return Ok(ring);
        }
        Err(Error::InvalidRing(format!("unknown ring {s:?}")))
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Gf2 => write!(f, "gf2"),
            Ring::Mod2k(k) => write!(f, "mod2^{k}"),
            Ring::Integer => write!(f, "integer"),
        }
    }
}

/// The three component slots of a rank-one term.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Slot {
    A,
    B,
    C,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::A, Slot::B, Slot::C];

    /// Cyclic successor: A -> B -> C -> A.
    pub fn next(self) -> Slot {
        match self {
            Slot::A => Slot::B,
            Slot::B => Slot::C,
            Slot::C => Slot::A,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Slot::A => 0,
            Slot::B => 1,
            Slot::C => 2,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::A => write!(f, "A"),
            Slot::B => write!(f, "B"),
            Slot::C => write!(f, "C"),
        }
    }
}

/// One rank-one component of a decomposition; one ring multiplication of
/// the algorithm. `a` is n x m, `b` is m x p and `c` is stored p x n:
/// the product entry is Z[i,k] = sum_l c_l[k,i] * m_l.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Term<M> {
    pub a: M,
    pub b: M,
    pub c: M,
}

impl<M: Mat> Term<M> {
    pub fn new(a: M, b: M, c: M) -> Self {
        Term { a, b, c }
    }

    pub fn slot(&self, s: Slot) -> &M {
        match s {
            Slot::A => &self.a,
            Slot::B => &self.b,
            Slot::C => &self.c,
        }
    }

    pub fn slot_mut(&mut self, s: Slot) -> &mut M {
        match s {
            Slot::A => &mut self.a,
            Slot::B => &mut self.b,
            Slot::C => &mut self.c,
        }
    }

    pub fn has_zero_component(&self) -> bool {
        self.a.is_zero() || self.b.is_zero() || self.c.is_zero()
    }

    /// Number of component slots in which the two terms agree.
    pub fn shared_slots(&self, other: &Self) -> usize {
        (self.a == other.a) as usize + (self.b == other.b) as usize + (self.c == other.c) as usize
    }
}

/// A matrix multiplication scheme: a format, a coefficient ring and a
/// sequence of rank-one terms. The rank is the number of terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scheme<M> {
    format: Format,
    ring: Ring,
    terms: Vec<Term<M>>,
}

pub type Gf2Scheme = Scheme<Gf2Matrix>;
pub type IntScheme = Scheme<IntMatrix>;

impl<M: Mat> Scheme<M> {
    pub fn format(&self) -> Format {
        self.format
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> &[Term<M>] {
        &self.terms
    }

    /// Number of terms: how many ring multiplications the algorithm costs.
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    fn check_dims(format: Format, terms: &[Term<M>]) -> Result<()> {
        for (i, t) in terms.iter().enumerate() {
            let ok = t.a.rows() == format.n
                && t.a.cols() == format.m
                && t.b.rows() == format.m
                && t.b.cols() == format.p
                && t.c.rows() == format.p
                && t.c.cols() == format.n;
            if !ok {
                return Err(Error::InvalidScheme(format!(
                    "term {i} has component dimensions not matching format {format}"
                )));
            }
        }
        Ok(())
    }

    /// Drop zero-component terms, cancel identical term pairs over Z_2
    /// (t + t = 0), and sort terms under the total component order. The
    /// serialized form of a normalized scheme is canonical.
    pub fn normalize(&mut self) {
        self.terms.retain(|t| !t.has_zero_component());
        self.terms.sort_unstable();
        if self.ring == Ring::Gf2 {
            // identical neighbours cancel in pairs
            let old = std::mem::take(&mut self.terms);
            let mut out: Vec<Term<M>> = Vec::with_capacity(old.len());
            let mut iter = old.into_iter().peekable();
            while let Some(t) = iter.next() {
                if iter.peek() == Some(&t) {
                    iter.next();
                } else {
                    out.push(t);
                }
            }
            self.terms = out;
        }
    }

    pub fn normalized(&self) -> Self {
        let mut s = self.clone();
        s.normalize();
        s
    }

    pub(crate) fn from_parts_unchecked(format: Format, ring: Ring, terms: Vec<Term<M>>) -> Self {
        Scheme {
            format,
            ring,
            terms,
        }
    }

    pub(crate) fn terms_mut(&mut self) -> &mut Vec<Term<M>> {
        &mut self.terms
    }
}

impl Gf2Scheme {
    pub fn new_gf2(format: Format, terms: Vec<Term<Gf2Matrix>>) -> Result<Self> {
        Self::check_dims(format, &terms)?;
        Ok(Scheme {
            format,
            ring: Ring::Gf2,
            terms,
        })
    }

    /// The standard algorithm over Z_2: one term per (i,j,k) triple.
    pub fn standard(format: Format) -> Self {
        let (n, m, p) = (format.n, format.m, format.p);
        let mut terms = Vec::with_capacity(format.naive_rank());
        for i in 0..n {
            for j in 0..m {
                for k in 0..p {
                    terms.push(Term::new(
                        Gf2Matrix::unit(n, m, i, j),
                        Gf2Matrix::unit(m, p, j, k),
                        Gf2Matrix::unit(p, n, k, i),
                    ));
                }
            }
        }
        Scheme {
            format,
            ring: Ring::Gf2,
            terms,
        }
    }

    /// Reinterpret 0/1 coefficients over another ring.
    pub fn to_int_scheme(&self, ring: Ring) -> Result<IntScheme> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Term::new(
                    gf2_to_int(&t.a),
                    gf2_to_int(&t.b),
                    gf2_to_int(&t.c),
                )
            })
            .collect();
        IntScheme::new_int(self.format, ring, terms)
    }
}

fn gf2_to_int(m: &Gf2Matrix) -> IntMatrix {
    IntMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c) as i64)
}

impl IntScheme {
    pub fn new_int(format: Format, ring: Ring, terms: Vec<Term<IntMatrix>>) -> Result<Self> {
        if ring == Ring::Gf2 {
            return Err(Error::InvalidRing(
                "integer-carrier scheme cannot be tagged gf2".into(),
            ));
        }
        ring.validate()?;
        Self::check_dims(format, &terms)?;
        if let Ring::Mod2k(k) = ring {
            let half = 1i64 << (k - 1);
            for (i, t) in terms.iter().enumerate() {
                for s in Slot::ALL {
                    for &v in t.slot(s).entries() {
                        if v <= -half || v > half {
                            return Err(Error::InvalidScheme(format!(
                                "term {i}: entry {v} not a balanced representative mod 2^{k}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(Scheme {
            format,
            ring,
            terms,
        })
    }

    /// The standard algorithm with 0/1 coefficients over `ring`.
    pub fn standard(format: Format, ring: Ring) -> Result<Self> {
        Gf2Scheme::standard(format).to_int_scheme(ring)
    }

    /// Coefficients reduced mod 2, as a Z_2 scheme.
    pub fn to_gf2_scheme(&self) -> Gf2Scheme {
        let to_gf2 = |m: &IntMatrix| {
            Gf2Matrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c) & 1 == 1)
        };
        Scheme {
            format: self.format,
            ring: Ring::Gf2,
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(to_gf2(&t.a), to_gf2(&t.b), to_gf2(&t.c)))
                .collect(),
        }
    }

    /// Entries reduced to balanced representatives mod 2^k.
    pub fn reduced_mod2k(&self, k: u32) -> Result<IntScheme> {
        Ring::Mod2k(k).validate()?;
        let red = |m: &IntMatrix| {
            IntMatrix::from_fn(m.rows(), m.cols(), |r, c| balanced_mod2k(m.get(r, c), k))
        };
        IntScheme::new_int(
            self.format,
            Ring::Mod2k(k),
            self.terms
                .iter()
                .map(|t| Term::new(red(&t.a), red(&t.b), red(&t.c)))
                .collect(),
        )
    }

    /// Same coefficients retagged as plain integers.
    pub fn retagged_integer(&self) -> IntScheme {
        Scheme {
            format: self.format,
            ring: Ring::Integer,
            terms: self.terms.clone(),
        }
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coefficient(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|t| Slot::ALL.map(|s| t.slot(s).max_abs()))
            .max()
            .unwrap_or(0)
    }

    /// The classical rank-7 scheme for 2x2 matrices, with integer
    /// coefficients.
    pub fn strassen() -> IntScheme {
        let f = Format::new(2, 2, 2).unwrap();
        let m = |e: [i64; 4]| IntMatrix::from_entries(2, 2, &e);
        // (A, B, C) per multiplication; C stored p x n, entry (k, i)
        let data: [([i64; 4], [i64; 4], [i64; 4]); 7] = [
            ([1, 0, 0, 1], [1, 0, 0, 1], [1, 0, 0, 1]),
            ([0, 0, 1, 1], [1, 0, 0, 0], [0, 1, 0, -1]),
            ([1, 0, 0, 0], [0, 1, 0, -1], [0, 0, 1, 1]),
            ([0, 0, 0, 1], [-1, 0, 1, 0], [1, 1, 0, 0]),
            ([1, 1, 0, 0], [0, 0, 0, 1], [-1, 0, 1, 0]),
            ([-1, 0, 1, 0], [1, 1, 0, 0], [0, 0, 0, 1]),
            ([0, 1, 0, -1], [0, 0, 1, 1], [1, 0, 0, 0]),
        ];
        let terms = data
            .into_iter()
            .map(|(a, b, c)| Term::new(m(a), m(b), m(c)))
            .collect();
        IntScheme::new_int(f, Ring::Integer, terms).unwrap()
    }
}

/// A scheme over any of the three supported rings.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AnyScheme {
    Gf2(Gf2Scheme),
    Int(IntScheme),
}

impl AnyScheme {
    pub fn format(&self) -> Format {
        match self {
            AnyScheme::Gf2(s) => s.format(),
            AnyScheme::Int(s) => s.format(),
        }
    }

    pub fn ring(&self) -> Ring {
        match self {
            AnyScheme::Gf2(s) => s.ring(),
            AnyScheme::Int(s) => s.ring(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            AnyScheme::Gf2(s) => s.rank(),
            AnyScheme::Int(s) => s.rank(),
        }
    }

    pub fn normalized(&self) -> Self {
        match self {
            AnyScheme::Gf2(s) => AnyScheme::Gf2(s.normalized()),
            AnyScheme::Int(s) => AnyScheme::Int(s.normalized()),
        }
    }

    pub fn verify(&self) -> bool {
        match self {
            AnyScheme::Gf2(s) => s.verify(),
            AnyScheme::Int(s) => s.verify(),
        }
    }

    pub fn as_gf2(&self) -> Option<&Gf2Scheme> {
        match self {
            AnyScheme::Gf2(s) => Some(s),
            AnyScheme::Int(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<&IntScheme> {
        match self {
            AnyScheme::Gf2(_) => None,
            AnyScheme::Int(s) => Some(s),
        }
    }

    /// Coefficients reduced mod 2. Correct schemes stay correct; this is
    /// how integer schemes become flip graph starting points.
    pub fn reduce_mod2(&self) -> AnyScheme {
        match self {
            AnyScheme::Gf2(s) => AnyScheme::Gf2(s.clone()),
            AnyScheme::Int(s) => AnyScheme::Gf2(s.to_gf2_scheme()),
        }
    }
}

/// The scheme with one term per (i,j,k) triple; rank n*m*p.
pub fn standard_scheme(format: Format, ring: Ring) -> Result<AnyScheme> {
    ring.validate()?;
    Ok(match ring {
        Ring::Gf2 => AnyScheme::Gf2(Gf2Scheme::standard(format)),
        _ => AnyScheme::Int(IntScheme::standard(format, ring)?),
    })
}
