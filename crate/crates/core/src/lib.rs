//! Plumbed 3-manifold toolkit: wrapped-up planar forms, Legendrian
//! handlebody diagram synthesis, incompressible-torus censuses, and exact
//! counts and bounds of tight contact structures.
//!
//! The pipeline starts from a decorated plumbing graph (negative integer
//! weights, signed edges) and is entirely combinatorial:
//!
//! - [`graph`] parses and validates plumbing graphs, enumerates torus
//!   classes, and splits graphs into clusters and trees.
//! - [`cf`] is the exact slope calculus: reduced fractions (with infinity),
//!   negative continued fractions, gluing matrices, and Honda-style counts.
//! - [`wrap`] embeds 2-connected clusters in the plane, finds a Hamiltonian
//!   path of the dual ending at the outer face, and rewrites the cluster in
//!   wrapped-up form.
//! - [`stein`] turns wrapped forms into handlebody diagram records, makes
//!   them Legendrian, and enumerates Stein structures by rotation vectors.
//! - [`torsion`] holds the basic-slice sign model, the rigidity criterion,
//!   and the twisting upper bounds for the four-legged chain family.
//! - [`emit`] renders deterministic DOT and SVG schematics.
//!
//! All arithmetic is exact; nothing in the library uses floating point or
//! global randomness.

pub mod cf;
pub mod cli;
pub mod emit;
pub mod graph;
pub mod stein;
pub mod torsion;
pub mod wrap;

pub use cf::{Fraction, GluingMatrix, Ncf};
pub use graph::{PlumbingGraph, Sign, ValidationReport};
pub use stein::{HandlebodyDiagram, LegendrianDiagram, SteinEnumeration};
pub use torsion::FamilyY;
pub use wrap::WrappedForm;
