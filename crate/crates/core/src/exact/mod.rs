//! Closed-form solutions used as oracles.

pub mod elliptic;
pub mod integrals;
pub mod jacobi;
pub mod kink;
pub mod soliton;
pub mod weierstrass;

pub use elliptic::{elliptic_coeffs, elliptic_eval, g3_for_speed, EllipticLine, EllipticSolution};
pub use integrals::{
    first_integral_at, residual_first_integral, residual_second_integral, second_integral_at,
    travelling_wave_at,
};
pub use kink::{kink_eval, kink_pole_variant, Branch, KinkSolution};
pub use soliton::{gardner_soliton, kdv5_soliton, GardnerSoliton, Kdv5Soliton};
pub use weierstrass::{degenerate_p, degenerate_roots, weierstrass_p, Lattice, Weierstrass};
