//! Certified p-adic scalars and power series with quadratic Newton-polygon
//! bounds.

mod scalar;
mod series;

pub use scalar::{check_prime, mod_inverse, ord_p, pow_p, prime_power_exponent, PadicScalar};
pub use series::{
    certified_cutoff, check_quadratic_bound, eval_entire, newton_polygon, BoundCheck, CertifiedSeries, NewtonPolygon,
    QuadraticBound, SeriesCoeff,
};
