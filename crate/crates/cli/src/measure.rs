//! Measure tags accepted in manifests and their evaluation on a state.

use std::cell::OnceCell;

use macroq::fock::{mean_photon_number, purity, DensityOperator, FockPureState};
use macroq::measures::{self, CrOptions, DurMode};
use macroq::phase_space::{measure_i_algebraic, measure_i_integral, measure_i_pure, IOffset, IntegralOptions};
use macroq::spin::{AdditiveObservable, Axis, ProjectorSpec, SpinState};
use macroq::states::{fit_cat, BuiltState, Branches, SchemeOutcome, StateSpec};
use macroq::{Error, MeasureReport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    #[default]
    Algebraic,
    Integral,
}

/// Projector used by the index-q correlator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaChoice {
    /// Onto the GHZ vector of the register.
    #[default]
    Ghz,
    /// Onto the (pure) state itself.
    #[serde(rename = "self")]
    SelfState,
}

fn z_axis() -> Axis {
    Axis::Z
}

fn one() -> f64 {
    1.0
}

fn analytic() -> DurMode {
    DurMode::Analytic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureSpec {
    MeasureI {
        #[serde(default)]
        route: Route,
        #[serde(default)]
        offset: IOffset,
    },
    MeanPhotonNumber,
    Purity,
    Disconnectivity,
    /// Size and branch offset `epsilon` come from a `ghz` or `generalized_ghz` state.
    Dur {
        #[serde(default = "analytic")]
        mode: DurMode,
        #[serde(default = "one")]
        gamma: f64,
    },
    /// Quadrature `angle` for bosonic states, collective `axis` for registers.
    BjorkMana {
        #[serde(default)]
        angle: f64,
        #[serde(default = "z_axis")]
        axis: Axis,
    },
    IndexP {
        sizes: Vec<usize>,
    },
    IndexQ {
        #[serde(default = "z_axis")]
        axis: Axis,
        #[serde(default)]
        eta: EtaChoice,
    },
    CavalcantiReid {
        #[serde(default)]
        center: f64,
        #[serde(default)]
        drop_s_term: bool,
    },
    Korsbakken {
        delta: f64,
    },
    Marquardt,
    Qfi {
        #[serde(default = "z_axis")]
        axis: Axis,
    },
    /// `group_size` splits the register into consecutive blocks.
    FisherNeff {
        #[serde(default)]
        group_size: Option<usize>,
    },
    Sekatski {
        p_g: f64,
    },
    SuccessProbability,
    CatFit {
        #[serde(default)]
        phi: f64,
        #[serde(default)]
        squeezed: bool,
    },
}

impl MeasureSpec {
    pub fn kind(&self) -> &'static str {
        use MeasureSpec::*;
        match self {
            MeasureI { .. } => "measure_i",
            MeanPhotonNumber => "mean_photon_number",
            Purity => "purity",
            Disconnectivity => "disconnectivity",
            Dur { .. } => "dur",
            BjorkMana { .. } => "bjork_mana",
            IndexP { .. } => "index_p",
            IndexQ { .. } => "index_q",
            CavalcantiReid { .. } => "cavalcanti_reid",
            Korsbakken { .. } => "korsbakken",
            Marquardt => "marquardt",
            Qfi { .. } => "qfi",
            FisherNeff { .. } => "fisher_neff",
            Sekatski { .. } => "sekatski",
            SuccessProbability => "success_probability",
            CatFit { .. } => "cat_fit",
        }
    }
}

/// Largest Hilbert-space dimension for which a pure bosonic state is expanded
/// into a density matrix.
pub const MAX_DENSITY_DIM: usize = 4096;

/// A state spec with its build and scheme outcome computed on first use.
pub struct Prepared<'a> {
    pub spec: &'a StateSpec,
    built: OnceCell<Result<BuiltState, Error>>,
    scheme: OnceCell<Option<Result<SchemeOutcome, Error>>>,
}

impl<'a> Prepared<'a> {
    pub fn new(spec: &'a StateSpec) -> Self {
        Self { spec, built: OnceCell::new(), scheme: OnceCell::new() }
    }

    fn scheme(&self) -> Option<&Result<SchemeOutcome, Error>> {
        self.scheme.get_or_init(|| self.spec.scheme()).as_ref()
    }

    pub fn built(&self) -> Result<&BuiltState, Error> {
        self.built
            .get_or_init(|| match self.scheme() {
                Some(Ok(o)) => Ok(match &o.pure {
                    Some(p) => BuiltState::Fock(p.clone()),
                    None => BuiltState::FockMixed(o.state.clone()),
                }),
                Some(Err(e)) => Err(e.clone()),
                None => self.spec.build(),
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn pure(&self) -> Result<Option<&FockPureState>, Error> {
        Ok(match self.built()? {
            BuiltState::Fock(p) => Some(p),
            _ => None,
        })
    }

    /// Density operator of a bosonic state, refused above [`MAX_DENSITY_DIM`].
    fn fock(&self) -> Result<DensityOperator, Error> {
        let built = self.built()?;
        if let BuiltState::Fock(p) = built {
            if p.dim() > MAX_DENSITY_DIM {
                return Err(Error::Unsupported(format!(
                    "density operator of dimension {} exceeds {MAX_DENSITY_DIM}",
                    p.dim()
                )));
            }
        }
        built.fock_density().ok_or_else(|| unsupported(self.spec, "needs a bosonic state"))
    }

    fn spin(&self) -> Result<&SpinState, Error> {
        self.built()?.spin().ok_or_else(|| unsupported(self.spec, "needs a qubit register"))
    }
}

fn unsupported(spec: &StateSpec, what: &str) -> Error {
    Error::Unsupported(format!("{what}; got `{}`", spec.kind()))
}

fn ghz_projector(n: usize) -> Result<ProjectorSpec, Error> {
    let g = macroq::states::spin_builders::ghz(n)?;
    ProjectorSpec::from_vector(g.vector().expect("GHZ is pure"))
}

/// Evaluates one measure. `seed` feeds the randomized optimizers.
pub fn evaluate(measure: &MeasureSpec, state: &Prepared, seed: u64) -> Result<MeasureReport, Error> {
    let spec = state.spec;
    match *measure {
        MeasureSpec::MeasureI { route: Route::Algebraic, offset } => match state.pure()? {
            Some(p) => Ok(measure_i_pure(p, offset)),
            None => Ok(measure_i_algebraic(&state.fock()?, offset)),
        },
        MeasureSpec::MeasureI { route: Route::Integral, offset } => {
            measure_i_integral(&state.fock()?, &IntegralOptions { offset, ..Default::default() })
        }
        MeasureSpec::MeanPhotonNumber => match state.pure()? {
            Some(p) => Ok(MeasureReport::new(p.mean_photon_number(), "expectation", p.max_tail_mass())),
            None => {
                let rho = state.fock()?;
                Ok(MeasureReport::new(mean_photon_number(&rho), "trace", rho.max_tail_mass()))
            }
        },
        MeasureSpec::Purity => match state.built()? {
            BuiltState::Spin(s) => Ok(MeasureReport::new(s.purity(), "trace", 0.0)),
            BuiltState::Fock(p) => Ok(MeasureReport::new(p.amplitudes().norm_squared().powi(2), "pure", 0.0)),
            BuiltState::FockMixed(rho) => Ok(MeasureReport::new(purity(rho), "trace", rho.max_tail_mass())),
        },
        MeasureSpec::Disconnectivity => match state.built()? {
            BuiltState::Spin(s) => Ok(measures::disconnectivity(s)?.report()),
            other => Ok(measures::disconnectivity_modes(&other.fock_density().expect("bosonic"))?.report()),
        },
        MeasureSpec::Dur { mode, gamma } => {
            let (n, eps) = match *spec {
                StateSpec::Ghz { n } => (n, std::f64::consts::FRAC_PI_2),
                StateSpec::GeneralizedGhz { n, epsilon } => (n, epsilon),
                _ => return Err(unsupported(spec, "dur needs a ghz or generalized_ghz state")),
            };
            measures::dur_effective_size(n, eps, gamma, mode)
        }
        MeasureSpec::BjorkMana { angle, axis } => match state.built()? {
            BuiltState::Spin(s) => {
                let obs = AdditiveObservable::collective(s.qubit_count(), axis);
                measures::bjork_mana(&measures::spin_spectrum(s, &obs)?)
            }
            other => {
                let rho = other.fock_density().expect("bosonic");
                measures::bjork_mana(&measures::quadrature_spectrum(&rho, angle)?)
            }
        },
        MeasureSpec::IndexP { ref sizes } => measures::index_p_estimate(spec, sizes, seed),
        MeasureSpec::IndexQ { axis, eta } => {
            let s = state.spin()?;
            let n = s.qubit_count();
            let eta = match eta {
                EtaChoice::Ghz => ghz_projector(n)?,
                EtaChoice::SelfState => ProjectorSpec::from_vector(
                    s.vector().ok_or_else(|| Error::InvalidState("eta = \"self\" needs a pure state".into()))?,
                )?,
            };
            measures::index_q_correlator(s, &AdditiveObservable::collective(n, axis), &eta)
        }
        MeasureSpec::CavalcantiReid { center, drop_s_term } => {
            let rho = state.fock()?;
            measures::scan_s_max(
                &rho,
                &measures::cavalcanti_reid::default_s_grid(),
                &CrOptions { center, drop_s_term },
            )
        }
        MeasureSpec::Korsbakken { delta } => match spec.branches() {
            Some(Ok(Branches::Spin(a, b))) => measures::korsbakken_size(&a, &b, delta),
            Some(Ok(Branches::Fock(..))) | None => Err(unsupported(spec, "korsbakken needs register branches")),
            Some(Err(e)) => Err(e),
        },
        MeasureSpec::Marquardt => match *spec {
            StateSpec::Marquardt { n, theta } => measures::marquardt_size(n, theta),
            _ => Err(unsupported(spec, "marquardt needs a marquardt state")),
        },
        MeasureSpec::Qfi { axis } => {
            let s = state.spin()?;
            let f = measures::qfi(s, &AdditiveObservable::collective(s.qubit_count(), axis))?;
            let method = if s.is_pure_repr() { "four-variance" } else { "spectral" };
            Ok(MeasureReport::new(f, method, 0.0))
        }
        MeasureSpec::FisherNeff { group_size } => {
            let s = state.spin()?;
            let n = s.qubit_count();
            match group_size {
                None | Some(1) => measures::fisher_neff(s, None, seed),
                Some(k) if k > 0 && n % k == 0 => {
                    let groups: Vec<Vec<usize>> = (0..n / k).map(|g| (g * k..(g + 1) * k).collect()).collect();
                    measures::fisher_neff(s, Some(&groups), seed)
                }
                Some(k) => Err(Error::InvalidParameter(format!("group_size {k} does not divide {n} qubits"))),
            }
        }
        MeasureSpec::Sekatski { p_g } => match spec.branches() {
            Some(Ok(Branches::Fock(a, b))) => measures::sekatski_size(&a, &b, p_g),
            Some(Ok(Branches::Spin(..))) | None => Err(unsupported(spec, "sekatski needs bosonic branches")),
            Some(Err(e)) => Err(e),
        },
        MeasureSpec::SuccessProbability => match state.scheme() {
            Some(Ok(o)) => {
                let mut r = MeasureReport::new(o.success_probability, "scheme", 0.0);
                r.metadata.extend(o.metadata.clone());
                Ok(r)
            }
            Some(Err(e)) => Err(e.clone()),
            None => Err(unsupported(spec, "success_probability needs a heralded scheme")),
        },
        MeasureSpec::CatFit { phi, squeezed } => {
            let fit = fit_cat(&state.fock()?, phi, squeezed)?;
            Ok(MeasureReport::new(fit.fidelity, "fidelity-fit", 0.0)
                .with("beta", format!("{:.9e}", fit.beta))
                .with("theta", format!("{:.9e}", fit.theta))
                .with("s", format!("{:.9e}", fit.s)))
        }
    }
}
