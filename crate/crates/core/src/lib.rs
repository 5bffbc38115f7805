//! Exact-arithmetic toolkit for arithmetic dynamics on projective space.
//!
//! The crate is organised bottom-up:
//!
//! * [`exactnum`]: rationals, quadratic fields, places and the [`LogMag`] value type.
//! * [`polydyn`]: homogeneous polynomials, self-maps of `P^n`, orbits and heights.
//! * [`weil`]: divisor presentations and local/global Weil functions.
//! * [`singular`]: log canonical thresholds, exact simplex, ramification growth `e_f(D)`.
//! * [`degree`]: arithmetic degree estimates and growth fits.
//! * [`lab`]: experiment configuration, orbit caching, series and report emission.

pub mod degree;
pub mod error;
pub mod exactnum;
pub mod lab;
pub mod polydyn;
pub mod singular;
pub mod weil;

pub use error::{Error, Result};
pub use exactnum::{LogMag, Place, QuadElem, QuadField, Rational};
pub use polydyn::{HomogPoly, Morphism, OrbitRecord, ProjPoint};
pub use weil::DivisorPresentation;
