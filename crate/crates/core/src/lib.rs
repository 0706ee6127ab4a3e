//! Exact integrability classification for the Hamiltonians
//! `H = ½Σ(v_i² + μ_i u_i²) − (ε/2k)(Σu_j²)^k`, with numeric corroboration.

pub mod critsys;
pub mod dynamics;
pub mod exactnum;
pub mod hypergeom;
pub mod kovacic;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/hypergeometric.md")]
    mod hypergeometric {}
    #[doc = include_str!("../../../book/src/kovacic.md")]
    mod kovacic {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
