//! Basic-slice sign bookkeeping, the rigidity criterion for twisting, and
//! the upper bounds on tight contact structures for the four-legged chain
//! family.
//!
//! Sign data is tracked per continued-fraction block: shuffling acts inside
//! a block, so rigidity only depends on the multiset of signs each block
//! carries. Block `j` of a leg `[b1, ..., bk]` holds `bj - 1` basic slices.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cf::Ncf;
use crate::graph::{validate, GraphError, PlumbingGraph, Sign, Vertex};
use crate::stein::coefficient_product;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TorsionError {
    #[error("family shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("twisting order m must be at least 1")]
    BadTwisting,
    #[error("sign multisets must be nonempty")]
    EmptyMultiset,
    #[error("block {index} holds {expected} slices, got {got}")]
    BlockSizeMismatch {
        index: usize,
        expected: u32,
        got: u32,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A multiset of basic-slice signs, stored as counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMultiset {
    pub plus: u32,
    pub minus: u32,
}

impl SignMultiset {
    pub fn new(plus: u32, minus: u32) -> Result<Self, TorsionError> {
        if plus + minus == 0 {
            return Err(TorsionError::EmptyMultiset);
        }
        Ok(SignMultiset { plus, minus })
    }

    pub fn uniform(sign: Sign, count: u32) -> Result<Self, TorsionError> {
        match sign {
            Sign::Plus => SignMultiset::new(count, 0),
            Sign::Minus => SignMultiset::new(0, count),
        }
    }

    pub fn contains(&self, sign: Sign) -> bool {
        match sign {
            Sign::Plus => self.plus > 0,
            Sign::Minus => self.minus > 0,
        }
    }

    pub fn len(&self) -> u32 {
        self.plus + self.minus
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Ordered continued-fraction blocks of basic-slice signs, innermost first;
/// block sizes are pinned by the expansion coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSigns {
    pub blocks: Vec<SignMultiset>,
}

impl BlockSigns {
    /// Builds block data against an expansion: block `j` must carry exactly
    /// `coefficient_j - 1` signs.
    pub fn for_ncf(ncf: &Ncf, blocks: Vec<SignMultiset>) -> Result<Self, TorsionError> {
        if blocks.len() != ncf.len() {
            return Err(TorsionError::BlockSizeMismatch {
                index: blocks.len().min(ncf.len()),
                expected: ncf.len() as u32,
                got: blocks.len() as u32,
            });
        }
        for (j, (block, &a)) in blocks.iter().zip(ncf.coefficients()).enumerate() {
            let expected = (a - 1) as u32;
            if block.len() != expected {
                return Err(TorsionError::BlockSizeMismatch {
                    index: j,
                    expected,
                    got: block.len(),
                });
            }
        }
        Ok(BlockSigns { blocks })
    }

    pub fn innermost(&self) -> &SignMultiset {
        &self.blocks[0]
    }
}

/// A pair of toric annuli is nonrigid when their innermost blocks can be
/// shuffled to expose opposite signs.
pub fn is_nonrigid(inner_i: &SignMultiset, inner_j: &SignMultiset) -> bool {
    (inner_i.contains(Sign::Plus) && inner_j.contains(Sign::Minus))
        || (inner_i.contains(Sign::Minus) && inner_j.contains(Sign::Plus))
}

/// Which boundary tori of the pair of pants have been filled by solid tori.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilledTori {
    /// Only T0 is filled.
    T0,
    /// T0 and T1 are filled.
    T0T1,
    /// All three boundary tori are filled.
    All,
}

impl FilledTori {
    pub fn from_flags(t0: bool, t1: bool, t2: bool) -> Result<Self, TorsionError> {
        match (t0, t1, t2) {
            (true, false, false) => Ok(FilledTori::T0),
            (true, true, false) => Ok(FilledTori::T0T1),
            (true, true, true) => Ok(FilledTori::All),
            _ => Err(TorsionError::ShapeMismatch(
                "filled subset must be {T0}, {T0,T1}, or {T0,T1,T2}".into(),
            )),
        }
    }
}

/// The two readings of the pair list in the two-filling case. The stated
/// list is "(T_i, T2) for i in {1, 2}", which includes the degenerate pair
/// (T2, T2); the emended reading replaces it with (T2, T0). Both are
/// provided rather than guessing intent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case2Pairs {
    /// Pairs (T1, T2) and (T2, T2).
    Literal,
    /// Pairs (T1, T2) and (T2, T0).
    Emended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Overtwisted,
    Inconclusive,
}

/// Overtwistedness criterion after filling boundary tori of a pair of
/// pants: a nonrigid pair among the listed ones forces an overtwisted disk.
/// The slope side conditions are asserted by the caller, not re-derived.
pub fn overtwisted_by_rigidity(
    filled: FilledTori,
    inner: &[SignMultiset; 3],
    case2: Case2Pairs,
) -> Verdict {
    let pairs: Vec<(usize, usize)> = match filled {
        FilledTori::T0 => vec![(1, 2)],
        FilledTori::T0T1 => match case2 {
            Case2Pairs::Literal => vec![(1, 2), (2, 2)],
            Case2Pairs::Emended => vec![(1, 2), (2, 0)],
        },
        FilledTori::All => vec![(0, 1), (0, 2), (1, 2)],
    };
    if pairs
        .into_iter()
        .any(|(i, j)| is_nonrigid(&inner[i], &inner[j]))
    {
        Verdict::Overtwisted
    } else {
        Verdict::Inconclusive
    }
}

/// The four-legged chain family: a central chain with two legs hanging off
/// each end. Leg expansions are read outward from the chain; all
/// coefficients are at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyY {
    pub chain: Ncf,
    pub legs: [Ncf; 4],
}

impl FamilyY {
    pub fn new(chain: Ncf, legs: [Ncf; 4]) -> Result<Self, TorsionError> {
        if !chain.is_canonical() || legs.iter().any(|l| !l.is_canonical()) {
            return Err(TorsionError::ShapeMismatch(
                "chain and leg expansions must be canonical (coefficients >= 2)".into(),
            ));
        }
        Ok(FamilyY { chain, legs })
    }

    /// Reconstructs the plumbing graph: chain vertices `c1..cn`, leg `i`
    /// vertices `l<i>_1..`, legs 1 and 2 at the head of the chain. Only
    /// chains of length at least 2 give a valid plumbing (a single chain
    /// vertex would carry all four legs).
    pub fn to_graph(&self) -> PlumbingGraph {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for (i, &a) in self.chain.coefficients().iter().enumerate() {
            vertices.push(Vertex {
                id: format!("c{}", i + 1),
                weight: -a,
            });
            if i > 0 {
                edges.push((i - 1, i, Sign::Plus));
            }
        }
        let n = self.chain.len();
        for (li, leg) in self.legs.iter().enumerate() {
            let anchor = if li < 2 { 0 } else { n - 1 };
            let mut prev = anchor;
            for (j, &b) in leg.coefficients().iter().enumerate() {
                let idx = vertices.len();
                vertices.push(Vertex {
                    id: format!("l{}_{}", li + 1, j + 1),
                    weight: -b,
                });
                edges.push((prev, idx, Sign::Plus));
                prev = idx;
            }
        }
        PlumbingGraph::new(vertices, edges).expect("family graph is well formed")
    }
}

/// Recognizes the four-legged chain family: two trivalent vertices joined by
/// a bivalent path, each carrying two leaf-terminated legs. Legs 1 and 2
/// attach at the chain end whose vertex comes first in input order.
pub fn detect_family_y(g: &PlumbingGraph) -> Result<FamilyY, TorsionError> {
    let report = validate(g);
    if !report.ok {
        return Err(GraphError::Invalid(report).into());
    }
    if g.cycle_rank() != 0 {
        return Err(TorsionError::ShapeMismatch("graph contains a cycle".into()));
    }
    let trivalent: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| g.valence(v) == 3)
        .collect();
    if trivalent.len() != 2 {
        return Err(TorsionError::ShapeMismatch(format!(
            "expected exactly 2 trivalent vertices, found {}",
            trivalent.len()
        )));
    }
    let (head, tail) = (trivalent[0], trivalent[1]);

    // walk from an anchor through bivalent vertices until a branch or leaf
    let walk = |start: usize, first: usize| -> (Vec<usize>, usize) {
        let mut path = vec![first];
        let (mut prev, mut cur) = (start, first);
        while g.valence(cur) == 2 {
            let next = g
                .neighbors(cur)
                .into_iter()
                .find(|&x| x != prev)
                .expect("bivalent continuation");
            prev = cur;
            cur = next;
            path.push(cur);
        }
        (path, cur)
    };

    let mut chain_interior: Option<Vec<usize>> = None;
    let mut head_legs: Vec<Vec<usize>> = Vec::new();
    let mut tail_legs: Vec<Vec<usize>> = Vec::new();
    for (anchor, legs) in [(head, &mut head_legs), (tail, &mut tail_legs)] {
        for first in g.neighbors(anchor) {
            let (path, end) = walk(anchor, first);
            if end == head || end == tail {
                if anchor == head {
                    chain_interior = Some(path[..path.len() - 1].to_vec());
                }
                continue;
            }
            if g.valence(end) != 1 {
                return Err(TorsionError::ShapeMismatch(format!(
                    "leg through `{}` ends at `{}` of valence {}",
                    g.id(first),
                    g.id(end),
                    g.valence(end)
                )));
            }
            legs.push(path);
        }
    }
    let chain_interior = chain_interior.ok_or_else(|| {
        TorsionError::ShapeMismatch("the two trivalent vertices are not joined by a path".into())
    })?;
    if head_legs.len() != 2 || tail_legs.len() != 2 {
        return Err(TorsionError::ShapeMismatch(format!(
            "expected two legs per chain end, found {} and {}",
            head_legs.len(),
            tail_legs.len()
        )));
    }

    let coeff = |v: usize| -> Result<i64, TorsionError> {
        let a = -g.weight(v);
        if a < 2 {
            return Err(TorsionError::ShapeMismatch(format!(
                "vertex `{}` has weight -1, outside the family",
                g.id(v)
            )));
        }
        Ok(a)
    };
    let mut chain_coeffs = vec![coeff(head)?];
    for &v in &chain_interior {
        chain_coeffs.push(coeff(v)?);
    }
    chain_coeffs.push(coeff(tail)?);
    let leg_ncf = |path: &[usize]| -> Result<Ncf, TorsionError> {
        let coeffs: Result<Vec<i64>, _> = path.iter().map(|&v| coeff(v)).collect();
        Ok(Ncf::new(coeffs?))
    };
    let legs = [
        leg_ncf(&head_legs[0])?,
        leg_ncf(&head_legs[1])?,
        leg_ncf(&tail_legs[0])?,
        leg_ncf(&tail_legs[1])?,
    ];
    FamilyY::new(Ncf::new(chain_coeffs), legs)
}

/// Upper bound on minimally twisting tight contact structures: the product
/// of (a - 1) over the chain times (b - 1) over every leg coefficient.
pub fn mintwist_upper_bound(y: &FamilyY) -> BigUint {
    let chain = coefficient_product(y.chain.coefficients().iter().copied());
    y.legs.iter().fold(chain, |acc, leg| {
        acc * coefficient_product(leg.coefficients().iter().copied())
    })
}

/// Upper bound on tight contact structures with m/2-twisting: twice the
/// product of (b_j - 1) over every leg coefficient beyond the first. The
/// bound does not depend on m.
pub fn torsion_upper_bound(y: &FamilyY, m: u64) -> Result<BigUint, TorsionError> {
    if m < 1 {
        return Err(TorsionError::BadTwisting);
    }
    let mut out = BigUint::from(2u32);
    for leg in &y.legs {
        out *= coefficient_product(leg.coefficients().iter().skip(1).copied());
    }
    Ok(out)
}

/// One admissible sign assignment for a twisting contact structure: a
/// single global sign fixes every leg's first block (the leg pairs at each
/// chain end must be rigid, and the chain layer couples the two ends); the
/// chain annulus takes the opposite sign; every block past the first picks
/// one of its (b_j - 1) slots freely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistingAssignment {
    /// Sign of every leg's first continued-fraction block.
    pub first_blocks: Sign,
    /// Sign of the chain annulus layer, opposite the first blocks.
    pub chain_annulus: Sign,
    /// Per leg, per block beyond the first: the chosen slot index in
    /// `0..(b_j - 1)`.
    pub tail_choices: [Vec<u32>; 4],
}

/// Enumerates the admissible twisting sign assignments in lexicographic
/// order (global sign +, then -; tail slots as an ascending odometer). The
/// cardinality equals the m/2-twisting upper bound.
pub fn enumerate_twisting_signs(y: &FamilyY) -> Vec<TwistingAssignment> {
    let leg_sizes: Vec<Vec<u32>> = y
        .legs
        .iter()
        .map(|leg| {
            leg.coefficients()
                .iter()
                .skip(1)
                .map(|&b| (b - 1) as u32)
                .collect()
        })
        .collect();
    let sizes: Vec<u32> = leg_sizes.iter().flatten().copied().collect();
    let mut out = Vec::new();
    for global in [Sign::Plus, Sign::Minus] {
        let mut counter = vec![0u32; sizes.len()];
        'odometer: loop {
            let mut it = counter.iter();
            let mut tail_choices: [Vec<u32>; 4] = Default::default();
            for (li, leg) in leg_sizes.iter().enumerate() {
                tail_choices[li] = leg.iter().map(|_| *it.next().expect("aligned")).collect();
            }
            out.push(TwistingAssignment {
                first_blocks: global,
                chain_annulus: global.opposite(),
                tail_choices,
            });
            let mut i = sizes.len();
            loop {
                if i == 0 {
                    break 'odometer;
                }
                i -= 1;
                counter[i] += 1;
                if counter[i] < sizes[i] {
                    break;
                }
                counter[i] = 0;
            }
        }
    }
    out
}
