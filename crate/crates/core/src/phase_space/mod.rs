//! Characteristic functions, Wigner functions, quadrature marginals and the
//! phase-space measure I.

mod charfn;
mod measure_i;
pub mod special;
mod wigner;

pub use charfn::{characteristic_function, characteristic_grid, CharacteristicGrid};
pub use measure_i::{
    measure_i_algebraic, measure_i_integral, measure_i_pure, IOffset, IntegralOptions,
};
pub use wigner::{
    default_quadrature_grid, quadrature_distribution, wigner, wigner_at, QuadratureDistribution, WignerGrid,
};
