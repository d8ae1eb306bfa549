//! Exact slope calculus: reduced fractions with infinity, negative continued
//! fractions, gluing matrices for chains and legs, and the Honda-style counts
//! for solid tori and toric annuli.
//!
//! The evaluation convention is fixed front-first throughout:
//! `[a1, ..., an] = a1 - 1/(a2 - 1/(...))`, with the empty prefix convergent
//! defined as `1/0`. Slopes `a/b` transform as direction vectors `(b, a)`.
//! All arithmetic uses arbitrary-precision integers.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CfError {
    #[error("expansion requires a finite fraction p/q with p > q >= 1, got {0}")]
    ExpandDomain(Fraction),
    #[error("division by zero while evaluating coefficient {index}")]
    DivisionByZero { index: usize },
    #[error("operation requires a canonical expansion (all coefficients >= 2)")]
    NotCanonical,
    #[error("fraction 0/0 is not representable")]
    ZeroOverZero,
    #[error("cannot parse `{0}` as a fraction")]
    BadFraction(String),
    #[error("cannot parse `{0}` as a coefficient list")]
    BadCoefficients(String),
}

/// An exact reduced rational with denominator >= 0; `1/0` represents the
/// infinite slope. `-1/0` is normalized to `1/0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    numerator: BigInt,
    denominator: BigInt,
}

impl Fraction {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self, CfError> {
        if numerator.is_zero() && denominator.is_zero() {
            return Err(CfError::ZeroOverZero);
        }
        if denominator.is_zero() {
            return Ok(Fraction {
                numerator: BigInt::one(),
                denominator: BigInt::zero(),
            });
        }
        let mut n = numerator;
        let mut d = denominator;
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if !g.is_zero() {
            n /= &g;
            d /= &g;
        }
        Ok(Fraction {
            numerator: n,
            denominator: d,
        })
    }

    pub fn integer(n: i64) -> Self {
        Fraction {
            numerator: BigInt::from(n),
            denominator: BigInt::one(),
        }
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Fraction::new(BigInt::from(p), BigInt::from(q)).expect("0/0")
    }

    pub fn infinity() -> Self {
        Fraction {
            numerator: BigInt::one(),
            denominator: BigInt::zero(),
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.denominator.is_zero()
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// `self > 1`, false for infinity.
    fn exceeds_one(&self) -> bool {
        !self.is_infinite() && self.numerator > self.denominator && self.denominator.is_positive()
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one() {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

impl FromStr for Fraction {
    type Err = CfError;

    fn from_str(s: &str) -> Result<Self, CfError> {
        let bad = || CfError::BadFraction(s.to_string());
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Fraction::new(p, q).map_err(|_| bad())
            }
            None => {
                let p: BigInt = s.trim().parse().map_err(|_| bad())?;
                Ok(Fraction {
                    numerator: p,
                    denominator: BigInt::one(),
                })
            }
        }
    }
}

/// A negative continued fraction coefficient list. Canonical means every
/// coefficient is at least 2, which pins a unique expansion for each
/// fraction greater than 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ncf {
    coefficients: Vec<i64>,
    canonical: bool,
}

impl Ncf {
    pub fn new(coefficients: Vec<i64>) -> Self {
        assert!(
            !coefficients.is_empty(),
            "coefficient list must be nonempty"
        );
        let canonical = coefficients.iter().all(|&a| a >= 2);
        Ncf {
            coefficients,
            canonical,
        }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }
}

impl fmt::Display for Ncf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.coefficients.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Ncf {
    type Err = CfError;

    fn from_str(s: &str) -> Result<Self, CfError> {
        let bad = || CfError::BadCoefficients(s.to_string());
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        let coeffs: Vec<i64> = trimmed
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if coeffs.is_empty() {
            return Err(bad());
        }
        Ok(Ncf::new(coeffs))
    }
}

/// Expands `f = p/q > 1` into its canonical negative continued fraction via
/// the ceiling algorithm; every coefficient comes out >= 2.
pub fn ncf_expand(f: &Fraction) -> Result<Ncf, CfError> {
    if !f.exceeds_one() {
        return Err(CfError::ExpandDomain(f.clone()));
    }
    let mut p = f.numerator().clone();
    let mut q = f.denominator().clone();
    let mut coeffs = Vec::new();
    loop {
        // a = ceil(p/q) for positive q
        let a = (&p + &q - BigInt::one()).div_floor(&q);
        coeffs
            .push(i64::try_from(&a).expect("canonical coefficients stay within machine integers"));
        let r = &a * &q - &p;
        if r.is_zero() {
            break;
        }
        p = std::mem::replace(&mut q, r);
    }
    Ok(Ncf::new(coeffs))
}

/// Evaluates `[a1,...,an] = a1 - 1/(a2 - 1/(...))` exactly.
pub fn ncf_eval(c: &Ncf) -> Result<Fraction, CfError> {
    let n = c.coefficients.len();
    let mut value = Fraction::integer(c.coefficients[n - 1]);
    for i in (0..n - 1).rev() {
        if value.numerator().is_zero() {
            return Err(CfError::DivisionByZero { index: i + 2 });
        }
        // a - 1/value
        let num = BigInt::from(c.coefficients[i]) * value.numerator() - value.denominator();
        value = Fraction::new(num, value.numerator().clone())?;
    }
    Ok(value)
}

/// Continuant pairs `(p, q)` and `(p', q')` for the full list and its
/// prefix, with the empty prefix fixed as `1/0`.
fn convergents(c: &Ncf) -> (BigInt, BigInt, BigInt, BigInt) {
    let mut p_prev = BigInt::zero(); // p_{-1}
    let mut p = BigInt::one(); // p_0
    let mut q_prev = -BigInt::one(); // q_{-1}
    let mut q = BigInt::zero(); // q_0
    for &a in &c.coefficients {
        let a = BigInt::from(a);
        let p_next = &a * &p - &p_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        let q_next = &a * &q - &q_prev;
        q_prev = std::mem::replace(&mut q, q_next);
    }
    (p, q, p_prev, q_prev)
}

/// A 2x2 integer matrix with determinant +-1, acting on slope vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingMatrix {
    pub entries: [[BigInt; 2]; 2],
}

impl GluingMatrix {
    pub fn new(entries: [[BigInt; 2]; 2]) -> Self {
        let m = GluingMatrix { entries };
        debug_assert!(m.det().abs().is_one(), "gluing matrices are unimodular");
        m
    }

    pub fn from_i64(e: [[i64; 2]; 2]) -> Self {
        GluingMatrix::new([
            [BigInt::from(e[0][0]), BigInt::from(e[0][1])],
            [BigInt::from(e[1][0]), BigInt::from(e[1][1])],
        ])
    }

    pub fn identity() -> Self {
        GluingMatrix::from_i64([[1, 0], [0, 1]])
    }

    pub fn det(&self) -> BigInt {
        &self.entries[0][0] * &self.entries[1][1] - &self.entries[0][1] * &self.entries[1][0]
    }

    pub fn mul(&self, other: &GluingMatrix) -> GluingMatrix {
        let a = &self.entries;
        let b = &other.entries;
        GluingMatrix::new([
            [
                &a[0][0] * &b[0][0] + &a[0][1] * &b[1][0],
                &a[0][0] * &b[0][1] + &a[0][1] * &b[1][1],
            ],
            [
                &a[1][0] * &b[0][0] + &a[1][1] * &b[1][0],
                &a[1][0] * &b[0][1] + &a[1][1] * &b[1][1],
            ],
        ])
    }
}

impl fmt::Display for GluingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.entries[0][0], self.entries[0][1], self.entries[1][0], self.entries[1][1]
        )
    }
}

fn require_canonical(c: &Ncf) -> Result<(), CfError> {
    if c.is_canonical() {
        Ok(())
    } else {
        Err(CfError::NotCanonical)
    }
}

/// Gluing map of the lens-space chain: `[[-p', -q'], [p, q]]`.
pub fn chain_gluing_matrix(c: &Ncf) -> Result<GluingMatrix, CfError> {
    require_canonical(c)?;
    let (p, q, pp, qp) = convergents(c);
    Ok(GluingMatrix::new([[-pp, -qp], [p, q]]))
}

/// Gluing map between the two pair-of-pants boundary tori of a maximal
/// chain: `[[-p', q'], [-p, q]]`.
pub fn boundary_gluing_matrix(c: &Ncf) -> Result<GluingMatrix, CfError> {
    require_canonical(c)?;
    let (p, q, pp, qp) = convergents(c);
    Ok(GluingMatrix::new([[-pp, qp], [-p, q]]))
}

/// Gluing map of a leg solid torus onto its chain boundary torus:
/// `[[x, x'], [-y, -y']]`.
pub fn leg_gluing_matrix(c: &Ncf) -> Result<GluingMatrix, CfError> {
    require_canonical(c)?;
    let (x, y, xp, yp) = convergents(c);
    Ok(GluingMatrix::new([[x, xp], [-y, -yp]]))
}

/// Applies a gluing matrix to a slope: `a/b` is the direction `(b, a)`, and
/// the image `(x, y)` is read back as the slope `y/x` (infinity when x = 0).
pub fn transform_slope(m: &GluingMatrix, s: &Fraction) -> Fraction {
    let b = s.denominator();
    let a = s.numerator();
    let x = &m.entries[0][0] * b + &m.entries[0][1] * a;
    let y = &m.entries[1][0] * b + &m.entries[1][1] * a;
    Fraction::new(y, x).expect("unimodular image of a nonzero vector is nonzero")
}

fn product_minus_one(c: &Ncf) -> BigUint {
    c.coefficients
        .iter()
        .map(|&a| BigUint::from((a - 1) as u64))
        .product()
}

/// Number of tight contact structures on the solid torus described by a
/// canonical leg expansion: the product of (coefficient - 1).
pub fn count_solid_torus(c: &Ncf) -> Result<BigUint, CfError> {
    require_canonical(c)?;
    Ok(product_minus_one(c))
}

/// Number of tight contact structures on the toric annulus of a central
/// chain: the product of (coefficient - 1).
pub fn count_toric_annulus(c: &Ncf) -> Result<BigUint, CfError> {
    require_canonical(c)?;
    Ok(product_minus_one(c))
}

/// Outcome of checking the chain slope identity for one canonical list.
///
/// The left side is `(p-q)/(p'-q')`. Under the front-first convention the
/// identity that actually holds is `(p-q)/(p'-q') = [an, ..., a2, a1-1]`:
/// the word is reversed and its trailing coefficient is decremented, with a
/// trailing 1 absorbed into its neighbor. The form with the last coefficient
/// of the unreversed word decremented holds only for palindromic lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainIdentityReport {
    pub chain: Vec<i64>,
    pub left_side: Fraction,
    /// Value of `[a1, ..., a_{n-1}, an - 1]` under the fixed convention.
    pub last_decremented_value: Fraction,
    /// Whether the last-decremented form equals the left side.
    pub equal: bool,
    /// Value of `[an, ..., a2, a1 - 1]`; matches the left side always.
    pub reversed_decremented_value: Fraction,
    pub reversed_rule_holds: bool,
    /// Canonical expansion of the left side; absent when the left side is 1.
    pub left_canonical: Option<Vec<i64>>,
}

/// Evaluates both readings of the chain slope identity for a canonical list
/// and reports which one holds, together with the canonical expansion of the
/// left side.
pub fn verify_chain_identity(c: &Ncf) -> Result<ChainIdentityReport, CfError> {
    require_canonical(c)?;
    let (p, q, pp, qp) = convergents(c);
    let left_side = Fraction::new(&p - &q, &pp - &qp)?;

    let mut last_dec = c.coefficients.to_vec();
    *last_dec.last_mut().unwrap() -= 1;
    let last_decremented_value = ncf_eval(&Ncf::new(last_dec))?;

    let mut rev_dec: Vec<i64> = c.coefficients.iter().rev().copied().collect();
    *rev_dec.last_mut().unwrap() -= 1;
    let reversed_decremented_value = ncf_eval(&Ncf::new(rev_dec))?;

    let left_canonical = if left_side.exceeds_one() {
        Some(ncf_expand(&left_side)?.coefficients().to_vec())
    } else {
        None
    };
    Ok(ChainIdentityReport {
        chain: c.coefficients.to_vec(),
        equal: last_decremented_value == left_side,
        reversed_rule_holds: reversed_decremented_value == left_side,
        left_side,
        last_decremented_value,
        reversed_decremented_value,
        left_canonical,
    })
}

/// All canonical lists with lengths in `1..=max_len` and coefficients in
/// `2..=max_coeff`, in lexicographic order.
pub fn canonical_ncfs(max_len: usize, max_coeff: i64) -> Vec<Ncf> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<i64>> = (2..=max_coeff).rev().map(|a| vec![a]).collect();
    while let Some(word) = stack.pop() {
        out.push(Ncf::new(word.clone()));
        if word.len() < max_len {
            for a in (2..=max_coeff).rev() {
                let mut next = word.clone();
                next.push(a);
                stack.push(next);
            }
        }
    }
    out
}
