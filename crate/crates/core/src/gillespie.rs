//! Exact stochastic simulation of a jump process and the empirical objects
//! built from one trajectory.

use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, Density};
use crate::error::{Error, Result};
use crate::force_flux::{EdgeField, EdgeSet};
use crate::scalar::Scalar;

/// A sample path on `[0, total_time]`. `times[k]` is the time the path entered
/// `states[k]`; `times[0] = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub n_states: usize,
    pub times: Vec<T>,
    pub states: Vec<usize>,
    pub seed: u64,
    pub total_time: T,
}

impl<T: Scalar> Trajectory<T> {
    pub fn jumps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    /// Time spent in `states[k]`.
    pub fn holding_time(&self, k: usize) -> T {
        let end = self.times.get(k + 1).copied().unwrap_or(self.total_time);
        end - self.times[k]
    }
}

/// Simulate from `x0` up to time `t_end` with a seeded PCG generator.
/// Absorbing states simply hold until `t_end`.
pub fn simulate<T: Scalar>(spec: &ChainSpec<T>, x0: usize, t_end: T, seed: u64) -> Result<Trajectory<T>> {
    let n = spec.n_states();
    if x0 >= n {
        return Err(Error::InvalidArgument(format!("initial state {x0} out of range")));
    }
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return Err(Error::InvalidArgument("simulation time must be positive".into()));
    }
    // per-state targets and cumulative rates
    let table: Vec<(Vec<usize>, Vec<f64>)> = (0..n)
        .map(|x| {
            let mut ys = vec![];
            let mut cum = vec![];
            let mut acc = 0.0;
            for y in 0..n {
                let r = spec.rate(x, y).to_f64_lossy();
                if y != x && r > 0.0 {
                    acc += r;
                    ys.push(y);
                    cum.push(acc);
                }
            }
            (ys, cum)
        })
        .collect();
    let horizon = t_end.to_f64_lossy();
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut t = 0.0f64;
    let mut x = x0;
    let mut times = vec![T::zero()];
    let mut states = vec![x0];
    loop {
        let (ys, cum) = &table[x];
        let Some(&total) = cum.last() else { break };
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / total;
        if t >= horizon {
            break;
        }
        let pick = rng.random::<f64>() * total;
        let k = cum.partition_point(|&c| c <= pick).min(ys.len() - 1);
        x = ys[k];
        times.push(T::lit(t));
        states.push(x);
    }
    Ok(Trajectory {
        n_states: n,
        times,
        states,
        seed,
        total_time: t_end,
    })
}

/// Occupation fractions and net jump currents per unit time.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasures<T> {
    pub rho: Density<T>,
    /// `(#x→y − #y→x) / T` on the chain's support pairs
    pub flux: EdgeField<T>,
}

pub fn empirical_measures<T: Scalar>(
    traj: &Trajectory<T>,
    spec: &ChainSpec<T>,
) -> Result<EmpiricalMeasures<T>> {
    if traj.states.is_empty() || !(traj.total_time > T::zero()) {
        return Err(Error::EmptyTrajectory);
    }
    if traj.n_states != spec.n_states() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_states(),
            got: traj.n_states,
        });
    }
    let mut occ = vec![T::zero(); traj.n_states];
    for k in 0..traj.states.len() {
        occ[traj.states[k]] = occ[traj.states[k]] + traj.holding_time(k);
    }
    let total: T = occ.iter().copied().sum();
    let rho = Density::new(occ.into_iter().map(|v| v / total).collect())?;

    let edges = Arc::new(EdgeSet::new(spec.n_states(), spec.support_pairs())?);
    let mut counts = vec![T::zero(); edges.len()];
    for w in traj.states.windows(2) {
        let (i, s) = edges
            .locate(w[0], w[1])
            .ok_or_else(|| Error::InvalidArgument(format!("jump {}→{} not in chain", w[0], w[1])))?;
        counts[i] = if s > 0 { counts[i] + T::one() } else { counts[i] - T::one() };
    }
    let flux = EdgeField::new(
        edges,
        counts.into_iter().map(|c| c / traj.total_time).collect(),
    )?;
    Ok(EmpiricalMeasures { rho, flux })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate<T> {
    /// `(1/T) Σ_jumps log(r_xy / r_yx)`, which estimates `⟨j, F⟩`
    pub per_jump_log_ratio_rate: T,
    /// Twice the above, on the scale of `e = 2⟨j, F⟩`
    pub e_estimate: T,
    pub jumps: usize,
}

/// Entropy production estimated from the jumps of one trajectory.
pub fn entropy_rate_estimate<T: Scalar>(
    traj: &Trajectory<T>,
    spec: &ChainSpec<T>,
) -> Result<EntropyEstimate<T>> {
    if traj.states.is_empty() || !(traj.total_time > T::zero()) {
        return Err(Error::EmptyTrajectory);
    }
    let mut s = T::zero();
    for w in traj.states.windows(2) {
        let (x, y) = (w[0], w[1]);
        let back = spec.rate(y, x);
        if !(back > T::zero()) {
            return Err(Error::InfiniteContribution { x, y });
        }
        s = s + (spec.rate(x, y) / back).ln();
    }
    let rate = s / traj.total_time;
    Ok(EntropyEstimate {
        per_jump_log_ratio_rate: rate,
        e_estimate: T::lit(2.0) * rate,
        jumps: traj.jumps(),
    })
}
