//! State constructors and a serializable description of every supported state.

pub mod fit;
pub mod fock_builders;
pub mod schemes;
pub mod spin_builders;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::{DensityOperator, FockPureState};
use crate::linalg::CVector;
use crate::spin::SpinState;
use crate::C64;

pub use fit::{fit_cat, CatFit};
pub use schemes::SchemeOutcome;

/// A complex parameter written either as a real number or as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn value(self) -> C64 {
        match self {
            Amplitude::Real(x) => C64::new(x, 0.0),
            Amplitude::Complex([re, im]) => C64::new(re, im),
        }
    }
}

impl From<f64> for Amplitude {
    fn from(x: f64) -> Self {
        Amplitude::Real(x)
    }
}

fn default_order_cap() -> usize {
    40
}

fn default_reflectivity() -> f64 {
    0.01
}

/// Every buildable state, tagged by `kind`. `cutoff` overrides the automatic
/// per-mode Fock truncation where it applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Vacuum,
    Fock {
        n: usize,
    },
    Coherent {
        alpha: Amplitude,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    Scs {
        alpha: Amplitude,
        #[serde(default)]
        phi: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    Ecs {
        alpha: Amplitude,
        #[serde(default)]
        phi: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    Hybrid {
        alpha: Amplitude,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    /// `(|1>|0> + |0>|1>)/sqrt 2`.
    Spe,
    DisplacedSpe {
        alpha: Amplitude,
        #[serde(default)]
        both_modes: bool,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    SqueezedVacuum {
        r: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    SqueezedSpe {
        r: f64,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    SqueezedCat {
        beta: f64,
        #[serde(default)]
        theta: f64,
        #[serde(default)]
        s: f64,
        #[serde(default)]
        phi: f64,
    },
    ZeroPlusCoherent {
        alpha: Amplitude,
        #[serde(default)]
        cutoff: Option<usize>,
    },
    Qiopa {
        g: f64,
        #[serde(default = "default_order_cap")]
        order_cap: usize,
    },
    /// `|A> + |B>` of the two-mode number-splitting pair.
    Marquardt {
        #[serde(alias = "N")]
        n: usize,
        theta: f64,
    },
    Ghz {
        #[serde(alias = "N")]
        n: usize,
    },
    GeneralizedGhz {
        #[serde(alias = "N")]
        n: usize,
        epsilon: f64,
    },
    MixedGhz {
        #[serde(alias = "N")]
        n: usize,
        #[serde(alias = "Gamma")]
        gamma: f64,
    },
    ProductPlus {
        #[serde(alias = "N")]
        n: usize,
    },
    ProductZero {
        #[serde(alias = "N")]
        n: usize,
    },
    Dn {
        #[serde(alias = "N")]
        n: usize,
    },
    Cooper {
        /// Number of pairs; the register has `2 n` qubits.
        #[serde(alias = "N")]
        n: usize,
        #[serde(default)]
        phi: f64,
    },
    PhotonSubtraction {
        r: f64,
        n_sub: usize,
        #[serde(default = "default_reflectivity")]
        reflectivity: f64,
    },
    Homodyne {
        n: usize,
        x0: f64,
        #[serde(default)]
        aux_squeeze: f64,
    },
    Amplification {
        alpha: f64,
    },
}

/// The outcome of [`StateSpec::build`].
#[derive(Debug, Clone)]
pub enum BuiltState {
    Fock(FockPureState),
    FockMixed(DensityOperator),
    Spin(SpinState),
}

impl BuiltState {
    /// Density operator of a bosonic state; `None` for qubit registers.
    pub fn fock_density(&self) -> Option<DensityOperator> {
        match self {
            BuiltState::Fock(s) => Some(s.to_density()),
            BuiltState::FockMixed(r) => Some(r.clone()),
            BuiltState::Spin(_) => None,
        }
    }

    pub fn spin(&self) -> Option<&SpinState> {
        match self {
            BuiltState::Spin(s) => Some(s),
            _ => None,
        }
    }
}

/// The two macroscopically distinct constituents of a superposition.
#[derive(Debug, Clone)]
pub enum Branches {
    Fock(FockPureState, FockPureState),
    Spin(SpinState, SpinState),
}

/// `D(alpha)|+->` with `|+-> = (|0> +- |1>)/sqrt 2`: the mode-B constituents
/// of one-sided displaced single-photon entanglement in the `|+->_A` basis.
pub fn displaced_spe_branches(alpha: C64) -> Result<(FockPureState, FockPureState)> {
    let mut c = crate::fock::auto_cutoff(alpha.norm_sqr() + 1.0);
    loop {
        let d = crate::phase_space::special::displacement_matrix(alpha, c);
        let h = 0.5f64.sqrt();
        let plus: CVector = (d.column(0) + d.column(1)).scale(h);
        let minus: CVector = (d.column(0) - d.column(1)).scale(h);
        let a = FockPureState::normalized(vec![c], plus)?;
        let b = FockPureState::normalized(vec![c], minus)?;
        let tail = a.tail_mass(0).max(b.tail_mass(0));
        if tail < crate::fock::TAIL_TOL {
            return Ok((a, b));
        }
        c += c / 4 + 4;
        if c > 600 {
            return Err(crate::Error::Truncation { tail, tol: crate::fock::TAIL_TOL });
        }
    }
}

impl StateSpec {
    pub fn kind(&self) -> &'static str {
        use StateSpec::*;
        match self {
            Vacuum => "vacuum",
            Fock { .. } => "fock",
            Coherent { .. } => "coherent",
            Scs { .. } => "scs",
            Ecs { .. } => "ecs",
            Hybrid { .. } => "hybrid",
            Spe => "spe",
            DisplacedSpe { .. } => "displaced_spe",
            SqueezedVacuum { .. } => "squeezed_vacuum",
            SqueezedSpe { .. } => "squeezed_spe",
            SqueezedCat { .. } => "squeezed_cat",
            ZeroPlusCoherent { .. } => "zero_plus_coherent",
            Qiopa { .. } => "qiopa",
            Marquardt { .. } => "marquardt",
            Ghz { .. } => "ghz",
            GeneralizedGhz { .. } => "generalized_ghz",
            MixedGhz { .. } => "mixed_ghz",
            ProductPlus { .. } => "product_plus",
            ProductZero { .. } => "product_zero",
            Dn { .. } => "dn",
            Cooper { .. } => "cooper",
            PhotonSubtraction { .. } => "photon_subtraction",
            Homodyne { .. } => "homodyne",
            Amplification { .. } => "amplification",
        }
    }

    /// Runs the heralded scheme behind a scheme spec; `None` for ordinary states.
    pub fn scheme(&self) -> Option<Result<SchemeOutcome>> {
        match *self {
            StateSpec::PhotonSubtraction { r, n_sub, reflectivity } => {
                Some(schemes::photon_subtraction(r, n_sub, reflectivity))
            }
            StateSpec::Homodyne { n, x0, aux_squeeze } => Some(schemes::homodyne_conditioning(n, x0, aux_squeeze)),
            StateSpec::Amplification { alpha } => Some(schemes::amplification(alpha)),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<BuiltState> {
        use fock_builders as fb;
        use spin_builders as sb;
        use BuiltState::{Fock, Spin};
        if let Some(outcome) = self.scheme() {
            let o = outcome?;
            return Ok(match o.pure {
                Some(p) => Fock(p),
                None => BuiltState::FockMixed(o.state),
            });
        }
        Ok(match *self {
            StateSpec::Vacuum => Fock(fb::vacuum()?),
            StateSpec::Fock { n } => Fock(fb::fock(n)?),
            StateSpec::Coherent { alpha, cutoff } => Fock(fb::coherent(alpha.value(), cutoff)?),
            StateSpec::Scs { alpha, phi, cutoff } => Fock(fb::scs(alpha.value(), phi, cutoff)?),
            StateSpec::Ecs { alpha, phi, cutoff } => Fock(fb::ecs(alpha.value(), phi, cutoff)?),
            StateSpec::Hybrid { alpha, cutoff } => Fock(fb::hybrid(alpha.value(), cutoff)?),
            StateSpec::Spe => Fock(fb::single_photon_entanglement()?),
            StateSpec::DisplacedSpe { alpha, both_modes, cutoff } => {
                Fock(fb::displaced_spe(alpha.value(), both_modes, cutoff)?)
            }
            StateSpec::SqueezedVacuum { r, cutoff } => Fock(fb::squeezed_vacuum(r, cutoff)?),
            StateSpec::SqueezedSpe { r, cutoff } => Fock(fb::squeezed_spe(r, cutoff)?),
            StateSpec::SqueezedCat { beta, theta, s, phi } => Fock(fb::squeezed_cat(beta, theta, s, phi)?),
            StateSpec::ZeroPlusCoherent { alpha, cutoff } => Fock(fb::zero_plus_coherent(alpha.value(), cutoff)?),
            StateSpec::Qiopa { g, order_cap } => Fock(fb::qiopa(g, order_cap)?),
            StateSpec::Marquardt { n, theta } => {
                let (a, b) = fb::marquardt_pair(n, theta)?;
                let v = a.amplitudes() + b.amplitudes();
                Fock(FockPureState::normalized(a.truncations().to_vec(), v)?)
            }
            StateSpec::Ghz { n } => Spin(sb::ghz(n)?),
            StateSpec::GeneralizedGhz { n, epsilon } => Spin(sb::generalized_ghz(n, epsilon)?),
            StateSpec::MixedGhz { n, gamma } => Spin(sb::mixed_ghz(n, gamma)?),
            StateSpec::ProductPlus { n } => Spin(sb::product_plus(n)?),
            StateSpec::ProductZero { n } => Spin(sb::product_zero(n)?),
            StateSpec::Dn { n } => Spin(sb::dn_state(n)?),
            StateSpec::Cooper { n, phi } => Spin(sb::cooper_product(n, phi)?),
            StateSpec::PhotonSubtraction { .. } | StateSpec::Homodyne { .. } | StateSpec::Amplification { .. } => {
                unreachable!("handled by scheme()")
            }
        })
    }

    /// Constituent pair for branch-based measures, where the state has one.
    pub fn branches(&self) -> Option<Result<Branches>> {
        use fock_builders as fb;
        use spin_builders as sb;
        let pair = |r: Result<(FockPureState, FockPureState)>| Some(r.map(|(a, b)| Branches::Fock(a, b)));
        let spin_pair = |r: Result<(SpinState, SpinState)>| Some(r.map(|(a, b)| Branches::Spin(a, b)));
        match *self {
            StateSpec::Scs { alpha, cutoff, .. } => {
                let a = alpha.value();
                pair(fb::coherent(a, cutoff).and_then(|p| Ok((p, fb::coherent(-a, cutoff)?))))
            }
            StateSpec::ZeroPlusCoherent { alpha, cutoff } => {
                pair(fb::coherent(alpha.value(), cutoff).and_then(|p| {
                    let c = p.dim();
                    Ok((FockPureState::vacuum(vec![c])?, p))
                }))
            }
            StateSpec::DisplacedSpe { alpha, both_modes: false, .. } => pair(displaced_spe_branches(alpha.value())),
            StateSpec::Marquardt { n, theta } => pair(fb::marquardt_pair(n, theta)),
            StateSpec::Ghz { n } => spin_pair(sb::ghz_branches(n)),
            StateSpec::GeneralizedGhz { n, epsilon } => spin_pair(sb::generalized_ghz_branches(n, epsilon)),
            StateSpec::Dn { n } => spin_pair(sb::dn_branches(n)),
            _ => None,
        }
    }

    /// Qubit count of a register spec.
    pub fn qubits(&self) -> Option<usize> {
        match *self {
            StateSpec::Ghz { n }
            | StateSpec::GeneralizedGhz { n, .. }
            | StateSpec::MixedGhz { n, .. }
            | StateSpec::ProductPlus { n }
            | StateSpec::ProductZero { n }
            | StateSpec::Dn { n } => Some(n),
            StateSpec::Cooper { n, .. } => Some(2 * n),
            _ => None,
        }
    }

    /// The same family at `n` qubits (`n` pairs for `cooper`).
    pub fn with_size(&self, size: usize) -> Option<StateSpec> {
        let mut s = self.clone();
        match &mut s {
            StateSpec::Ghz { n }
            | StateSpec::GeneralizedGhz { n, .. }
            | StateSpec::MixedGhz { n, .. }
            | StateSpec::ProductPlus { n }
            | StateSpec::ProductZero { n }
            | StateSpec::Dn { n }
            | StateSpec::Cooper { n, .. } => *n = size,
            _ => return None,
        }
        Some(s)
    }
}
