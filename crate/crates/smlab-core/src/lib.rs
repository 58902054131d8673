//! Numerical laboratory for spectral metric spaces at desk scale.
//!
//! Everything here is finite: Dirac operators become dense Hermitian
//! matrices over a truncation window, states become finitely supported
//! probability vectors, and the distances of noncommutative geometry
//! (Connes / Kantorovich / Wasserstein) become small linear programs.
//! The crate is organised around the objects it materialises:
//!
//! * [`matrix`], [`eigen`], [`spin`] — dense complex linear algebra, a
//!   cyclic Jacobi Hermitian eigensolver, operator norms, and the Pauli
//!   and Dirac matrix sets.
//! * [`zline`] — metrics on `Z` and the spectral triples over `c0(Z)`
//!   built from weighted finite differences.
//! * [`transport`] — probability vectors on `Z`, transportation LPs via
//!   min-cost flow, and the Lipschitz-dual LP with its certificates.
//! * [`crossed`] — the regular representation of a finite base triple
//!   crossed by `Z`, its dual action, and the Fejér/Sobolev estimates.
//! * [`bundle`] — the space of Euclidean metrics (SPD geometry) and the
//!   noncommutative metric bundle.
//! * [`gallery`] — toral automorphisms, the bilateral shift on the
//!   Cantor set, and real-multiplication noncommutative tori.
//! * [`codes`] — q-ary block codes and their language invariants.
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature,
//! on by default, only switches the float math from `libm` to the
//! standard library intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bundle;
pub mod codes;
pub mod crossed;
pub mod eigen;
pub mod gallery;
pub mod math;
pub mod matrix;
pub mod rng;
pub mod spin;
pub mod transport;
pub mod zline;

pub use matrix::{CMatrix, MatrixError, C64};
