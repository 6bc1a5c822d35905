//! Scheme serialization, import of externally published scheme files, and
//! plain-text matrix files.
//!
//! Canonical scheme format (UTF-8 text, deterministic after normalization):
//!
//! ```text
//! format 2 2 2 integer 7
//! # optional provenance notes
//! 1 0 0 1 | 1 0 0 1 | 1 0 0 1
//! ...
//! ```
//!
//! The header is `format n m p ring rank`; each following line is one term
//! as three row-major coefficient blocks for A (n x m), B (m x p) and C
//! (p x n), separated by `|`.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, MAX_DIM};
use crate::intmat::IntMatrix;
use crate::mat::Mat;
use crate::scheme::{AnyScheme, Format, Gf2Scheme, IntScheme, Ring, Slot, Term};

/// Canonical text form of a scheme. The scheme is normalized first, so
/// equal schemes serialize to identical bytes.
pub fn serialize(s: &AnyScheme) -> String {
    serialize_with_notes(s, &[])
}

/// Canonical text form with provenance notes after the header.
pub fn serialize_with_notes(s: &AnyScheme, notes: &[String]) -> String {
    let s = s.normalized();
    let f = s.format();
    let mut out = String::new();
    writeln!(out, "format {} {} {} {} {}", f.n, f.m, f.p, s.ring(), s.rank()).unwrap();
    for note in notes {
        writeln!(out, "# {note}").unwrap();
    }
    match &s {
        AnyScheme::Gf2(s) => {
            for t in s.terms() {
                push_term_line(&mut out, t);
            }
        }
        AnyScheme::Int(s) => {
            for t in s.terms() {
                push_term_line(&mut out, t);
            }
        }
    }
    out
}

fn push_term_line<M: Mat>(out: &mut String, t: &Term<M>) {
    for (idx, slot) in Slot::ALL.iter().enumerate() {
        if idx > 0 {
            out.push_str("| ");
        }
        let m = t.slot(*slot);
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                write!(out, "{} ", m.entry(r, c)).unwrap();
            }
        }
    }
    out.pop();
    out.push('\n');
}

/// Parse the canonical format. Tolerant of extra whitespace and blank
/// lines; `#` lines are notes and are skipped.
pub fn parse(text: &str) -> Result<AnyScheme> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty scheme file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "format" {
        return Err(Error::parse(
            line_no,
            "expected header `format n m p ring rank`",
        ));
    }
    let dim = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::parse(line_no, format!("bad dimension {s:?}")))
    };
    let format = Format::new(dim(fields[1])?, dim(fields[2])?, dim(fields[3])?)
        .map_err(|e| Error::parse(line_no, e))?;
    let ring = Ring::parse(fields[4]).map_err(|e| Error::parse(line_no, e))?;
    let declared_rank: usize = fields[5]
        .parse()
        .map_err(|_| Error::parse(line_no, format!("bad rank {:?}", fields[5])))?;

    let sizes = [
        format.n * format.m,
        format.m * format.p,
        format.p * format.n,
    ];
    let mut gf2_terms = Vec::new();
    let mut int_terms = Vec::new();
    let mut body_count = 0usize;
    for (line_no, line) in lines {
        body_count += 1;
        let blocks: Vec<&str> = line.split('|').collect();
        if blocks.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 `|`-separated blocks, found {}", blocks.len()),
            ));
        }
        let mut coeffs: [Vec<i64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (bi, block) in blocks.iter().enumerate() {
            for tok in block.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| {
                    Error::parse(line_no, format!("bad coefficient {tok:?}"))
                })?;
                if ring == Ring::Gf2 && !(v == 0 || v == 1) {
                    return Err(Error::parse(
                        line_no,
                        format!("coefficient {v} is not a gf2 value"),
                    ));
                }
                coeffs[bi].push(v);
            }
            if coeffs[bi].len() != sizes[bi] {
                return Err(Error::parse(
                    line_no,
                    format!(
                        "block {} has {} coefficients, format {format} needs {}",
                        bi + 1,
                        coeffs[bi].len(),
                        sizes[bi]
                    ),
                ));
            }
        }
        let dims = [
            (format.n, format.m),
            (format.m, format.p),
            (format.p, format.n),
        ];
        if ring == Ring::Gf2 {
            let m = |bi: usize| {
                Gf2Matrix::from_fn(dims[bi].0, dims[bi].1, |r, c| {
                    coeffs[bi][r * dims[bi].1 + c] == 1
                })
            };
            gf2_terms.push(Term::new(m(0), m(1), m(2)));
        } else {
            let m =
                |bi: usize| IntMatrix::from_entries(dims[bi].0, dims[bi].1, &coeffs[bi]);
            int_terms.push(Term::new(m(0), m(1), m(2)));
        }
    }
    if body_count != declared_rank {
        return Err(Error::parse(
            line_no_of_header(text),
            format!("header declares rank {declared_rank} but body has {body_count} terms"),
        ));
    }
    match ring {
        Ring::Gf2 => Ok(AnyScheme::Gf2(Gf2Scheme::new_gf2(format, gf2_terms)?)),
        _ => Ok(AnyScheme::Int(IntScheme::new_int(format, ring, int_terms)?)),
    }
}

fn line_no_of_header(text: &str) -> usize {
    text.lines()
        .position(|l| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|i| i + 1)
        .unwrap_or(1)
}

/// How an imported file's factors were mapped onto (A, B, C).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Orientation {
    /// Which parsed factor fills A, B, C.
    pub perm: [usize; 3],
    /// Whether the C factor was transposed on read.
    pub transpose_c: bool,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["1st", "2nd", "3rd"];
        write!(
            f,
            "A={}, B={}, C={}{}",
            names[self.perm[0]],
            names[self.perm[1]],
            names[self.perm[2]],
            if self.transpose_c { " transposed" } else { "" }
        )
    }
}

/// A successfully imported published scheme.
#[derive(Clone, Debug)]
pub struct PublishedImport {
    /// Verified scheme, canonicalized to n <= m <= p.
    pub scheme: AnyScheme,
    /// Format as stored in the file, before canonicalization.
    pub stored_format: Format,
    pub orientation: Orientation,
}

/// Import a scheme file in one of the published formats: either sum
/// expressions, one term per line,
///
/// ```text
/// (a11+a22)*(b11+b22)*(c11+c22)
/// ```
///
/// or nested integer lists `{{{A},{B},{C}}, ...}`. Factors may be bare
/// single variables, and a term may carry a rational divisor (`.../3`);
/// odd divisors are units mod 2, so such files are read over Z_2.
/// The factor-to-slot mapping and the C orientation are not
/// standardized, so all six assignments and both C conventions are
/// tried until verification succeeds. `ring` forces the coefficient
/// ring; by default, files whose coefficients are all 0/1 are tried
/// over Z_2 first, then over Z.
pub fn import_published(text: &str, ring: Option<Ring>) -> Result<PublishedImport> {
    let raw = if text.trim_start().starts_with('{') {
        parse_m_file(text)?
    } else {
        parse_exp_file(text)?
    };
    if raw.is_empty() {
        return Err(Error::parse(1, "no terms found"));
    }

    let divided = raw.iter().any(|t| t.divisor != 1);
    if divided {
        if raw.iter().any(|t| t.divisor % 2 == 0) {
            return Err(Error::InvalidScheme(
                "terms divided by an even number have no mod-2 reading".into(),
            ));
        }
        if matches!(ring, Some(r) if r != Ring::Gf2) {
            return Err(Error::InvalidScheme(format!(
                "file has divided terms; only the mod-2 reading is supported, not {}",
                ring.unwrap()
            )));
        }
    }
    let all_01 = raw
        .iter()
        .flat_map(|t| t.factors.iter())
        .flat_map(|m| m.entries().iter())
        .all(|&v| v == 0 || v == 1);
    let rings: Vec<Ring> = match ring {
        Some(r) => vec![r],
        None if divided => vec![Ring::Gf2],
        None if all_01 => vec![Ring::Gf2, Ring::Integer],
        None => vec![Ring::Integer, Ring::Gf2],
    };

    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [0, 2, 1],
        [2, 1, 0],
        [1, 0, 2],
    ];
    for &ring in &rings {
        for perm in perms {
            for transpose_c in [false, true] {
                let a0 = &raw[0].factors[perm[0]];
                let b0 = &raw[0].factors[perm[1]];
                let c0 = &raw[0].factors[perm[2]];
                let (c_rows, c_cols) = if transpose_c {
                    (c0.cols(), c0.rows())
                } else {
                    (c0.rows(), c0.cols())
                };
                // cyclic consistency: A n x m, B m x p, C p x n
                if a0.cols() != b0.rows() || b0.cols() != c_rows || c_cols != a0.rows() {
                    continue;
                }
                if a0.rows() > MAX_DIM || a0.cols() > MAX_DIM || b0.cols() > MAX_DIM {
                    continue;
                }
                let format = match Format::new(a0.rows(), a0.cols(), b0.cols()) {
                    Ok(f) => f,
                    Err(_) => continue,
                };
                let candidate = build_candidate(&raw, format, ring, perm, transpose_c)?;
                let Some(candidate) = candidate else { continue };
                if candidate.verify() {
                    return Ok(PublishedImport {
                        scheme: candidate.canonical_format().normalized(),
                        stored_format: format,
                        orientation: Orientation { perm, transpose_c },
                    });
                }
            }
        }
    }
    Err(Error::UnrecognizedConvention)
}

fn build_candidate(
    raw: &[RawTerm],
    format: Format,
    ring: Ring,
    perm: [usize; 3],
    transpose_c: bool,
) -> Result<Option<AnyScheme>> {
    let pick = |t: &RawTerm, slot: usize| -> IntMatrix {
        let m = &t.factors[perm[slot]];
        if slot == 2 && transpose_c {
            m.transposed()
        } else {
            m.clone()
        }
    };
    // all terms must agree on factor dimensions
    for t in raw {
        let (a, b, c) = (pick(t, 0), pick(t, 1), pick(t, 2));
        if a.rows() != format.n
            || a.cols() != format.m
            || b.rows() != format.m
            || b.cols() != format.p
            || c.rows() != format.p
            || c.cols() != format.n
        {
            return Ok(None);
        }
    }
    let scheme = match ring {
        Ring::Gf2 => {
            let terms = raw
                .iter()
                .map(|t| {
                    let (a, b, c) = (pick(t, 0), pick(t, 1), pick(t, 2));
                    let g = |m: &IntMatrix| {
                        Gf2Matrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c) & 1 == 1)
                    };
                    Term::new(g(&a), g(&b), g(&c))
                })
                .collect();
            AnyScheme::Gf2(Gf2Scheme::new_gf2(format, terms)?)
        }
        _ => {
            if raw.iter().any(|t| t.divisor != 1) {
                return Ok(None);
            }
            let terms = raw
                .iter()
                .map(|t| Term::new(pick(t, 0), pick(t, 1), pick(t, 2)))
                .collect();
            AnyScheme::Int(IntScheme::new_int(format, ring, terms)?)
        }
    };
    Ok(Some(scheme))
}

/// One parsed published term: three factors and a rational divisor.
struct RawTerm {
    factors: [IntMatrix; 3],
    divisor: i64,
}

/// Sparse factor under construction: 1-based indices from the file.
#[derive(Default)]
struct RawFactor {
    entries: HashMap<(usize, usize), i64>,
    max_row: usize,
    max_col: usize,
}

impl RawFactor {
    fn add(&mut self, row: usize, col: usize, coef: i64) {
        *self.entries.entry((row, col)).or_insert(0) += coef;
        self.max_row = self.max_row.max(row);
        self.max_col = self.max_col.max(col);
    }
}

fn parse_exp_file(text: &str) -> Result<Vec<RawTerm>> {
    let mut parsed: Vec<([RawFactor; 3], i64)> = Vec::new();
    let letters = ['a', 'b', 'c'];
    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (parts, divisor) = split_exp_factors(line, line_no)?;
        let mut term: [RawFactor; 3] = Default::default();
        for (fi, part) in parts.iter().enumerate() {
            parse_exp_sum(part, letters[fi], &mut term[fi], line_no)?;
            if term[fi].entries.is_empty() {
                return Err(Error::parse(line_no, format!("empty factor {}", fi + 1)));
            }
        }
        parsed.push((term, divisor));
    }
    // dimensions: maximum index seen per factor across all terms
    let mut dims = [(0usize, 0usize); 3];
    for (t, _) in &parsed {
        for fi in 0..3 {
            dims[fi].0 = dims[fi].0.max(t[fi].max_row);
            dims[fi].1 = dims[fi].1.max(t[fi].max_col);
        }
    }
    let out = parsed
        .iter()
        .map(|(t, divisor)| RawTerm {
            factors: [0, 1, 2].map(|fi| {
                let mut m = IntMatrix::zero(dims[fi].0, dims[fi].1);
                for (&(r, c), &v) in &t[fi].entries {
                    m.set(r - 1, c - 1, v);
                }
                m
            }),
            divisor: *divisor,
        })
        .collect();
    Ok(out)
}

/// Split a term line into its three factor bodies and an optional
/// trailing divisor. Factors are parenthesized sums or bare signed
/// variables: `(a11+a22)*b11*(c11-c22)/3`.
fn split_exp_factors(line: &str, line_no: usize) -> Result<([String; 3], i64)> {
    let mut out: Vec<String> = Vec::new();
    let mut divisor = 1i64;
    let mut chars = line.chars().peekable();
    loop {
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        match chars.peek() {
            Some('(') => {
                chars.next();
                let mut depth = 1usize;
                let mut body = String::new();
                for ch in chars.by_ref() {
                    match ch {
                        '(' => {
                            depth += 1;
                            body.push(ch);
                        }
                        ')' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                            body.push(ch);
                        }
                        _ => body.push(ch),
                    }
                }
                if depth != 0 {
                    return Err(Error::parse(line_no, "unbalanced parentheses"));
                }
                out.push(body);
            }
            Some(c) if *c == '+' || *c == '-' || c.is_ascii_digit() || c.is_ascii_lowercase() => {
                // bare factor: optional sign and coefficient, one variable
                let mut body = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '*' {
                        // lookahead: `2*a11` keeps its inner star
                        let mut probe = chars.clone();
                        probe.next();
                        if matches!(probe.peek(), Some(c) if c.is_ascii_lowercase()) {
                            body.push('*');
                            chars.next();
                            continue;
                        }
                        break;
                    }
                    if c == '/' {
                        break;
                    }
                    body.push(c);
                    chars.next();
                }
                out.push(body);
            }
            None => break,
            Some(c) => {
                return Err(Error::parse(
                    line_no,
                    format!("unexpected character {c:?} between factors"),
                ));
            }
        }
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        match chars.peek() {
            Some('*') => {
                chars.next();
            }
            Some('/') => {
                chars.next();
                while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
                    chars.next();
                }
                let mut digits = String::new();
                while matches!(chars.peek(), Some(c) if c.is_ascii_digit()) {
                    digits.push(chars.next().unwrap());
                }
                divisor = digits
                    .parse()
                    .map_err(|_| Error::parse(line_no, "bad divisor"))?;
                if divisor == 0 {
                    return Err(Error::parse(line_no, "zero divisor"));
                }
            }
            _ => {}
        }
    }
    let n = out.len();
    let factors: [String; 3] = out
        .try_into()
        .map_err(|_| Error::parse(line_no, format!("expected 3 factors, found {n}")))?;
    Ok((factors, divisor))
}

/// Parse a signed sum like `-b11+2*b23-3*(b31+b32)` into a factor.
/// Parenthesized subexpressions distribute their multiplier.
fn parse_exp_sum(
    body: &str,
    letter: char,
    factor: &mut RawFactor,
    line_no: usize,
) -> Result<()> {
    let mut chars = body.chars().peekable();
    parse_sum_group(&mut chars, letter, factor, line_no, 1, false)
}

fn parse_sum_group(
    chars: &mut std::iter::Peekable<std::str::Chars>,
    letter: char,
    factor: &mut RawFactor,
    line_no: usize,
    multiplier: i64,
    in_parens: bool,
) -> Result<()> {
    loop {
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        match chars.peek() {
            None => {
                if in_parens {
                    return Err(Error::parse(line_no, "unbalanced parentheses"));
                }
                return Ok(());
            }
            Some(')') if in_parens => {
                chars.next();
                return Ok(());
            }
            _ => {}
        }
        let mut sign = 1i64;
        while let Some(&c) = chars.peek() {
            match c {
                '+' => {
                    chars.next();
                }
                '-' => {
                    sign = -sign;
                    chars.next();
                }
                c if c.is_whitespace() => {
                    chars.next();
                }
                _ => break,
            }
        }
        let mut coef = 1i64;
        if matches!(chars.peek(), Some(c) if c.is_ascii_digit()) {
            let mut v = 0i64;
            while matches!(chars.peek(), Some(c) if c.is_ascii_digit()) {
                v = v * 10 + (chars.next().unwrap() as u8 - b'0') as i64;
            }
            coef = v;
            while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
                chars.next();
            }
            if chars.peek() == Some(&'*') {
                chars.next();
            }
            while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
                chars.next();
            }
        }
        match chars.next() {
            Some('(') => {
                parse_sum_group(chars, letter, factor, line_no, multiplier * sign * coef, true)?;
                continue;
            }
            Some(c) if c == letter => {}
            Some(c) => {
                return Err(Error::parse(
                    line_no,
                    format!("expected variable {letter:?}, found {c:?}"),
                ))
            }
            None => return Err(Error::parse(line_no, "dangling sign")),
        }
        let mut digit = || -> Result<usize> {
            match chars.next() {
                Some(c) if c.is_ascii_digit() && c != '0' => Ok(c as usize - '0' as usize),
                other => Err(Error::parse(
                    line_no,
                    format!("expected nonzero index digit, found {other:?}"),
                )),
            }
        };
        let row = digit()?;
        let col = digit()?;
        if matches!(chars.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(Error::parse(
                line_no,
                "indices with more than one digit are not supported",
            ));
        }
        factor.add(row, col, multiplier * sign * coef);
    }
}

/// Parse nested-list files `{{{A},{B},{C}}, {{A},{B},{C}}, ...}` where
/// each matrix is a list of integer rows.
fn parse_m_file(text: &str) -> Result<Vec<RawTerm>> {
    #[derive(Debug)]
    enum Node {
        Int(i64),
        List(Vec<Node>),
    }

    fn parse_node(chars: &mut std::iter::Peekable<std::str::Chars>) -> Result<Node> {
        while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
            chars.next();
        }
        match chars.peek() {
            Some('{') => {
                chars.next();
                let mut items = Vec::new();
                loop {
                    while matches!(chars.peek(), Some(c) if c.is_whitespace() || *c == ',') {
                        chars.next();
                    }
                    if chars.peek() == Some(&'}') {
                        chars.next();
                        return Ok(Node::List(items));
                    }
                    if chars.peek().is_none() {
                        return Err(Error::parse(0, "unbalanced braces"));
                    }
                    items.push(parse_node(chars)?);
                }
            }
            Some(c) if *c == '-' || c.is_ascii_digit() => {
                let mut s = String::new();
                if *c == '-' {
                    s.push(chars.next().unwrap());
                }
                while matches!(chars.peek(), Some(c) if c.is_ascii_digit()) {
                    s.push(chars.next().unwrap());
                }
                let v = s
                    .parse()
                    .map_err(|_| Error::parse(0, format!("bad integer {s:?}")))?;
                Ok(Node::Int(v))
            }
            other => Err(Error::parse(0, format!("unexpected character {other:?}"))),
        }
    }

    fn to_matrix(node: &Node) -> Result<IntMatrix> {
        let Node::List(rows) = node else {
            return Err(Error::parse(0, "expected a matrix, found an integer"));
        };
        let n_rows = rows.len();
        let mut data: Vec<Vec<i64>> = Vec::with_capacity(n_rows);
        for row in rows {
            let Node::List(cells) = row else {
                return Err(Error::parse(0, "expected a row list"));
            };
            let mut r = Vec::with_capacity(cells.len());
            for cell in cells {
                let Node::Int(v) = cell else {
                    return Err(Error::parse(0, "expected an integer entry"));
                };
                r.push(*v);
            }
            data.push(r);
        }
        let n_cols = data.first().map(|r| r.len()).unwrap_or(0);
        if n_rows == 0 || n_cols == 0 || data.iter().any(|r| r.len() != n_cols) {
            return Err(Error::parse(0, "ragged or empty matrix"));
        }
        Ok(IntMatrix::from_fn(n_rows, n_cols, |r, c| data[r][c]))
    }

    let mut chars = text.chars().peekable();
    let root = parse_node(&mut chars)?;
    while matches!(chars.peek(), Some(c) if c.is_whitespace()) {
        chars.next();
    }
    if chars.peek().is_some() {
        return Err(Error::parse(0, "trailing content after top-level list"));
    }
    let Node::List(terms) = root else {
        return Err(Error::parse(0, "expected a top-level list"));
    };
    terms
        .iter()
        .map(|t| {
            let Node::List(factors) = t else {
                return Err(Error::parse(0, "expected a term list"));
            };
            if factors.len() != 3 {
                return Err(Error::parse(
                    0,
                    format!("expected 3 factors per term, found {}", factors.len()),
                ));
            }
            Ok(RawTerm {
                factors: [
                    to_matrix(&factors[0])?,
                    to_matrix(&factors[1])?,
                    to_matrix(&factors[2])?,
                ],
                divisor: 1,
            })
        })
        .collect()
}

/// Parse a whitespace-separated integer matrix: one row per line.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::parse(line_no + 1, format!("bad entry {t:?}")))
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let n_rows = rows.len();
    let n_cols = rows.first().map(|r| r.len()).unwrap_or(0);
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::parse(1, "empty matrix"));
    }
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::parse(1, "ragged matrix"));
    }
    if n_rows > MAX_DIM || n_cols > MAX_DIM {
        return Err(Error::parse(1, format!("matrix larger than {MAX_DIM}x{MAX_DIM}")));
    }
    Ok(IntMatrix::from_fn(n_rows, n_cols, |r, c| rows[r][c]))
}

pub fn format_matrix(m: &IntMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if c > 0 {
                out.push(' ');
            }
            write!(out, "{}", m.get(r, c)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn int_to_gf2_matrix(m: &IntMatrix) -> Result<Gf2Matrix> {
    for &v in m.entries() {
        if v != 0 && v != 1 {
            return Err(Error::InvalidScheme(format!(
                "entry {v} is not a gf2 value"
            )));
        }
    }
    Ok(Gf2Matrix::from_fn(m.rows(), m.cols(), |r, c| {
        m.get(r, c) == 1
    }))
}

pub fn gf2_to_int_matrix(m: &Gf2Matrix) -> IntMatrix {
    IntMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c) as i64)
}

/// Read a scheme from either the canonical format or one of the published
/// formats, detected by content.
pub fn load_scheme_text(text: &str) -> Result<AnyScheme> {
    let head = text.trim_start();
    if head.starts_with("format ") {
        parse(text)
    } else {
        Ok(import_published(text, None)?.scheme)
    }
}
