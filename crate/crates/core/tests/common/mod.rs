//! Seeded random generators shared by the integration suites. Everything is
//! driven by a caller-provided ChaCha stream, so runs are reproducible.

#![allow(dead_code)]

use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use plumbstein::cf::{Fraction, GluingMatrix, Ncf};
use plumbstein::graph::{cluster_graphs, decompose, validate, PlumbingGraph, Sign, Vertex};
use plumbstein::stein::{is_k33, lower_bound};
use plumbstein::torsion::FamilyY;
use plumbstein::wrap::is_planar;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    if rng.gen_bool(0.25) {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// A connected plumbing graph with valence at most 3, no bad vertices, and
/// only planar or exact-K3,3 clusters, so the whole diagram pipeline runs.
/// The Stein count is capped so enumeration stays cheap.
pub fn random_valid_graph(rng: &mut ChaCha8Rng, max_vertices: usize) -> PlumbingGraph {
    loop {
        let n = rng.gen_range(2..=max_vertices.max(2));
        let mut valence = vec![0usize; n];
        let mut edges: Vec<(usize, usize, Sign)> = Vec::new();
        // random spanning tree on vertices with spare valence
        for i in 1..n {
            let parent = (0..64)
                .map(|_| rng.gen_range(0..i))
                .find(|&p| valence[p] < 3)
                .or_else(|| (0..i).find(|&p| valence[p] < 3));
            let Some(p) = parent else { break };
            valence[p] += 1;
            valence[i] += 1;
            edges.push((p, i, random_sign(rng)));
        }
        if edges.len() + 1 < n {
            continue; // tree construction stalled on full valences
        }
        // a few extra edges create cycles
        let extra = rng.gen_range(0..=2usize);
        for _ in 0..extra {
            let mut found = None;
            for _ in 0..64 {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a == b || valence[a] >= 3 || valence[b] >= 3 {
                    continue;
                }
                let key = (a.min(b), a.max(b));
                if edges.iter().any(|&(u, v, _)| (u.min(v), u.max(v)) == key) {
                    continue;
                }
                found = Some((a, b));
                break;
            }
            if let Some((a, b)) = found {
                valence[a] += 1;
                valence[b] += 1;
                edges.push((a, b, random_sign(rng)));
            }
        }
        let vertices: Vec<Vertex> = (0..n)
            .map(|i| {
                let bump = i64::from(rng.gen_bool(0.4));
                Vertex {
                    id: format!("v{i}"),
                    weight: -((valence[i].max(2) as i64) + bump),
                }
            })
            .collect();
        let Ok(g) = PlumbingGraph::new(vertices, edges) else {
            continue;
        };
        if !validate(&g).ok {
            continue;
        }
        let d = decompose(&g).expect("validated");
        let clusters = cluster_graphs(&g, &d);
        if clusters.iter().any(|c| !is_planar(c) && !is_k33(c)) {
            continue;
        }
        if lower_bound(&g)
            .expect("validated")
            .to_u64()
            .map(|b| b > 50_000)
            .unwrap_or(true)
        {
            continue;
        }
        return g;
    }
}

/// A 2-connected planar graph with valence at most 3, built from a cycle by
/// ear additions, with weights making every vertex good.
pub fn random_two_connected_planar(rng: &mut ChaCha8Rng, max_vertices: usize) -> PlumbingGraph {
    'rebuild: loop {
        let base = rng.gen_range(3..=6usize.min(max_vertices));
        let mut valence = vec![2usize; base];
        let mut edges: Vec<(usize, usize, Sign)> = (0..base)
            .map(|i| (i, (i + 1) % base, random_sign(rng)))
            .collect();
        let mut n = base;
        let ears = rng.gen_range(0..=4usize);
        for _ in 0..ears {
            let candidates: Vec<usize> = (0..n).filter(|&v| valence[v] < 3).collect();
            if candidates.len() < 2 {
                break;
            }
            let a = candidates[rng.gen_range(0..candidates.len())];
            let b = (0..64)
                .map(|_| candidates[rng.gen_range(0..candidates.len())])
                .find(|&b| b != a);
            let Some(b) = b else { break };
            let adjacent = edges
                .iter()
                .any(|&(u, v, _)| (u.min(v), u.max(v)) == (a.min(b), a.max(b)));
            let interior = if adjacent {
                rng.gen_range(1..=3usize)
            } else {
                rng.gen_range(0..=3usize)
            };
            if n + interior > max_vertices {
                continue;
            }
            valence[a] += 1;
            valence[b] += 1;
            let mut prev = a;
            for _ in 0..interior {
                valence.push(2);
                edges.push((prev, n, random_sign(rng)));
                prev = n;
                n += 1;
            }
            edges.push((prev, b, random_sign(rng)));
        }
        let vertices: Vec<Vertex> = (0..n)
            .map(|i| Vertex {
                id: format!("v{i}"),
                weight: -(valence[i].max(2) as i64) - i64::from(rng.gen_bool(0.3)),
            })
            .collect();
        let Ok(g) = PlumbingGraph::new(vertices, edges) else {
            continue 'rebuild;
        };
        if !validate(&g).ok || !plumbstein::graph::is_two_connected(&g) {
            continue 'rebuild;
        }
        if !is_planar(&g) {
            continue 'rebuild;
        }
        return g;
    }
}

/// A random four-legged chain family with small coefficients; the chain end
/// vertices are trivalent in the graph, so their coefficients are at least 3.
pub fn random_family_y(rng: &mut ChaCha8Rng) -> FamilyY {
    let chain_len = rng.gen_range(2..=4usize);
    let chain: Vec<i64> = (0..chain_len)
        .map(|i| {
            if i == 0 || i == chain_len - 1 {
                rng.gen_range(3..=4)
            } else {
                rng.gen_range(2..=4)
            }
        })
        .collect();
    let mut legs = Vec::new();
    for _ in 0..4 {
        let len = rng.gen_range(1..=3usize);
        legs.push(Ncf::new(
            (0..len).map(|_| rng.gen_range(2..=4)).collect::<Vec<_>>(),
        ));
    }
    FamilyY::new(
        Ncf::new(chain),
        [
            legs[0].clone(),
            legs[1].clone(),
            legs[2].clone(),
            legs[3].clone(),
        ],
    )
    .expect("coefficients are canonical")
}

/// A random unimodular matrix: a short word in shears and the swap.
pub fn random_unimodular(rng: &mut ChaCha8Rng) -> GluingMatrix {
    let mut m = GluingMatrix::identity();
    for _ in 0..rng.gen_range(1..=8usize) {
        let a = rng.gen_range(1..=3i64);
        let s = if rng.gen_bool(0.5) { a } else { -a };
        let factor = match rng.gen_range(0..3u8) {
            0 => GluingMatrix::from_i64([[1, s], [0, 1]]),
            1 => GluingMatrix::from_i64([[1, 0], [s, 1]]),
            _ => GluingMatrix::from_i64([[0, 1], [1, 0]]),
        };
        m = m.mul(&factor);
    }
    m
}

/// A random reduced fraction p/q with p > q >= 1.
pub fn random_expandable_fraction(rng: &mut ChaCha8Rng) -> Fraction {
    let q = rng.gen_range(1..=999i64);
    let p = q + rng.gen_range(1..=2000i64);
    Fraction::ratio(p, q)
}

/// A random slope, finite or infinite.
pub fn random_slope(rng: &mut ChaCha8Rng) -> Fraction {
    if rng.gen_bool(0.05) {
        return Fraction::infinity();
    }
    let a = rng.gen_range(-50..=50i64);
    let b = rng.gen_range(0..=50i64);
    if a == 0 && b == 0 {
        return Fraction::integer(0);
    }
    Fraction::ratio(a, b.max(i64::from(a == 0)))
}
