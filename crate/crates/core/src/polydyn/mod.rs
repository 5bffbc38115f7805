//! Forms, self-maps of projective space, orbits and heights.

mod morphism;
mod orbit;
mod point;
mod poly;
mod univariate;

pub use morphism::{wellformed_check, Morphism, WellformedOutcome, Wellformedness};
pub use orbit::{iterate, pullback, pullback_iterate, OrbitRecord, OrbitStep, DEFAULT_COMPOSITION_CAP};
pub use point::{canonical_twist, height, height_twisted, normalize, ProjPoint};
pub use poly::{exponents_of_degree, HomogPoly};
pub use univariate::UniPoly;
