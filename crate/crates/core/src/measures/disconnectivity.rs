use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fock::{von_neumann_entropy, DensityOperator};
use crate::report::MeasureReport;
use crate::spin::SpinState;

/// Largest number of subsystems handled by the exhaustive subset search.
pub const MAX_DISCONNECTIVITY_PARTS: usize = 10;

/// Entropies below this are treated as zero when forming ratios.
const ENTROPY_FLOOR: f64 = 1e-10;
const TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DisconnectivityProfile {
    /// `delta[n - 1]` is `delta_n`.
    pub delta: Vec<f64>,
    pub d: usize,
    pub policy: &'static str,
}

impl DisconnectivityProfile {
    pub fn report(&self) -> MeasureReport {
        let deltas: Vec<String> = self.delta.iter().map(|d| format!("{d:.6}")).collect();
        MeasureReport::new(self.d as f64, "entropy-ratio", 0.0)
            .with("policy", self.policy)
            .with("delta", deltas.join(","))
    }
}

/// Subsystem entropies memoized by bitmask (bit `k` set when part `k` is kept).
struct EntropyCache<F: Fn(&[usize]) -> Result<f64>> {
    parts: usize,
    entropy: F,
    cache: HashMap<u32, f64>,
}

impl<F: Fn(&[usize]) -> Result<f64>> EntropyCache<F> {
    fn get(&mut self, mask: u32) -> Result<f64> {
        if let Some(&s) = self.cache.get(&mask) {
            return Ok(s);
        }
        let keep: Vec<usize> = (0..self.parts).filter(|k| mask >> k & 1 == 1).collect();
        let s = (self.entropy)(&keep)?;
        self.cache.insert(mask, s);
        Ok(s)
    }

    /// `S_T / min_{U} (S_U + S_{T \ U})` with the `0/0 = 1` convention.
    fn ratio(&mut self, t: u32) -> Result<f64> {
        let num = self.get(t)?;
        let mut den = f64::INFINITY;
        // proper non-empty subsets U of T; each unordered split visited once
        let low = t & t.wrapping_neg();
        let mut u = (t - 1) & t;
        while u > 0 {
            if u & low != 0 {
                den = den.min(self.get(u)? + self.get(t & !u)?);
            }
            u = (u - 1) & t;
        }
        if den < ENTROPY_FLOOR {
            return Ok(1.0);
        }
        Ok(num.max(0.0) / den)
    }
}

fn profile(parts: usize, symmetric: bool, entropy: impl Fn(&[usize]) -> Result<f64>) -> Result<DisconnectivityProfile> {
    if parts == 0 || parts > MAX_DISCONNECTIVITY_PARTS {
        return Err(Error::Unsupported(format!(
            "disconnectivity needs 1..={MAX_DISCONNECTIVITY_PARTS} subsystems, got {parts}"
        )));
    }
    let mut cache = EntropyCache { parts, entropy, cache: HashMap::new() };
    let mut delta = vec![0.0];
    for n in 2..=parts {
        let d = if symmetric {
            cache.ratio((1u32 << n) - 1)?
        } else {
            let mut best = f64::INFINITY;
            for t in 0u32..(1 << parts) {
                if t.count_ones() as usize == n {
                    best = best.min(cache.ratio(t)?);
                }
            }
            best
        };
        delta.push(d);
    }
    let min = delta.iter().copied().fold(f64::INFINITY, f64::min);
    let d = (1..=parts).rev().find(|&n| delta[n - 1] <= min + TIE).unwrap_or(1);
    let policy = if symmetric { "first-n (permutation symmetric)" } else { "min over n-subsets" };
    Ok(DisconnectivityProfile { delta, d, policy })
}

/// Disconnectivity of a qubit register, one subsystem per qubit.
///
/// For states that are not permutation symmetric, `delta_n` is the smallest
/// ratio over all `n`-subsets.
pub fn disconnectivity(state: &SpinState) -> Result<DisconnectivityProfile> {
    let n = state.qubit_count();
    let symmetric = state.is_permutation_symmetric(1e-10);
    let pure = state.is_pure_repr();
    profile(n, symmetric, |keep| {
        // a pure state has equal entropies on complementary blocks
        if pure && keep.len() == n {
            return Ok(0.0);
        }
        if pure && 2 * keep.len() > n {
            let rest: Vec<usize> = (0..n).filter(|k| !keep.contains(k)).collect();
            return state.subset_entropy(&rest);
        }
        state.subset_entropy(keep)
    })
}

/// Disconnectivity of a multi-mode bosonic state, one subsystem per mode.
pub fn disconnectivity_modes(state: &DensityOperator) -> Result<DisconnectivityProfile> {
    let m = state.mode_count();
    profile(m, false, |keep| {
        if keep.len() == m {
            Ok(von_neumann_entropy(state))
        } else {
            Ok(von_neumann_entropy(&state.partial_trace(keep)?))
        }
    })
}
