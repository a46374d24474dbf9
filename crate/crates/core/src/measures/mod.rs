//! Macroscopicity measures other than the phase-space measure `I`.

pub mod bjork_mana;
pub mod cavalcanti_reid;
pub mod disconnectivity;
pub mod dur;
pub mod fisher;
pub mod index_p;
pub mod index_q;
pub mod korsbakken;
pub mod local_opt;
pub mod marquardt;
pub mod sekatski;

pub use bjork_mana::{bjork_mana, quadrature_spectrum, spin_spectrum, SpectralDistribution};
pub use cavalcanti_reid::{cavalcanti_reid, scan_s_max, CrOptions, InequalityVerdict};
pub use disconnectivity::{disconnectivity, disconnectivity_modes, DisconnectivityProfile};
pub use dur::{dur_effective_size, DurMode};
pub use fisher::{fisher_neff, qfi};
pub use index_p::index_p_estimate;
pub use index_q::index_q_correlator;
pub use korsbakken::korsbakken_size;
pub use marquardt::marquardt_size;
pub use sekatski::{sekatski_size, DetectorModel};
