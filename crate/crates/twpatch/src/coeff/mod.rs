//! Exact arithmetic and linear algebra over `Z/p^M` and `F_p`.
//!
//! `Z/p^M` is a chain ring, so instead of a Smith form everything is built on
//! the reduced Howell form (see [`Howell`]): its pivots are powers of `p`, its
//! rows give canonical normal forms, and the length of a submodule is read off
//! the pivot valuations.  Pivoting is deterministic (leftmost column, smallest
//! valuation, first inserted row), so every downstream result is reproducible.

mod howell;
mod linalg;
mod mat;
mod poly;
mod ring;

pub use howell::Howell;
pub use linalg::{cyclic_type, intersection, mat_kernel, mat_solve, preimage, span};
pub use mat::Mat;
pub use poly::{degree, Exponent, TruncPoly};
pub use ring::CoeffRing;

/// `trunc(a·b)`; errors on mismatched ring, variable count or bound.
pub fn poly_mul_trunc(a: &TruncPoly, b: &TruncPoly) -> crate::Result<TruncPoly> {
    a.mul(b)
}

/// O-span of the algebra generated by `gens` (plus the identity), as a
/// Howell form over flattened `n×n` matrices.  Used for every "is this
/// operator in the algebra generated by those" question.
pub fn algebra_span(ring: CoeffRing, n: usize, gens: &[Mat]) -> Howell {
    let mut h = Howell::new(ring, n * n);
    let mut frontier = vec![Mat::identity(ring, n)];
    frontier.extend(gens.iter().cloned());
    while let Some(a) = frontier.pop() {
        let before = h.len();
        h.insert(a.entries.clone());
        if h.len() == before {
            continue;
        }
        // a new direction: close it under multiplication by the generators
        for g in gens {
            frontier.push(a.mul(g).expect("square"));
            frontier.push(g.mul(&a).expect("square"));
        }
    }
    h
}
