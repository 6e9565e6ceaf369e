//! Pseudospectral solver for the one-dimensional homogenized Boussinesq
//! system in the mean variables (eta_bar, q_bar):
//!
//!   eta_t = -q_x - delta <H>^-1 (eta q)_x
//!   q_t   = -(1 - delta^2 <H>^-1 mu d_xx)^-1 (g <H> eta_x + delta <H>^-1 q q_x)
//!
//! Fourier collocation in space, the inverse elliptic operator applied
//! mode-wise, and three-stage third-order SSP Runge-Kutta in time.

use std::sync::Arc;

use crate::bathymetry::EffectiveCoefficients;
use crate::error::{Error, Result};
use crate::grid::{Field1D, PeriodicGrid1D};
use crate::spectral::SpectralOps1D;

#[derive(Debug, Clone)]
pub struct HomogenizedParams {
    pub coeffs: EffectiveCoefficients,
    /// Courant number on the advective bound sqrt(g <H>); the dispersive
    /// term only slows modes down, so no extra restriction is needed.
    pub cfl: f64,
    pub dealias_on: bool,
}

impl HomogenizedParams {
    pub fn new(coeffs: EffectiveCoefficients) -> Self {
        Self { coeffs, cfl: 0.5, dealias_on: true }
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must be in (0, 1], got {}", self.cfl)));
        }
        Ok(())
    }
}

/// Mean state (eta_bar, q_bar) at one instant.
#[derive(Debug, Clone)]
pub struct State1D {
    pub grid: Arc<PeriodicGrid1D>,
    pub eta: Vec<f64>,
    pub q: Vec<f64>,
    pub t: f64,
}

impl State1D {
    pub fn new(grid: Arc<PeriodicGrid1D>, eta: Vec<f64>, q: Vec<f64>, t: f64) -> Result<Self> {
        if eta.len() != grid.n() || q.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "state fields ({}, {}) do not match grid size {}",
                eta.len(),
                q.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, eta, q, t })
    }

    pub fn zero(grid: Arc<PeriodicGrid1D>) -> Self {
        let n = grid.n();
        Self { grid, eta: vec![0.0; n], q: vec![0.0; n], t: 0.0 }
    }

    pub fn from_fn(
        grid: Arc<PeriodicGrid1D>,
        eta: impl Fn(f64) -> f64,
        q: impl Fn(f64) -> f64,
    ) -> Self {
        let ev = (0..grid.n()).map(|j| eta(grid.x(j))).collect();
        let qv = (0..grid.n()).map(|j| q(grid.x(j))).collect();
        Self { grid, eta: ev, q: qv, t: 0.0 }
    }

    pub fn max_abs_eta(&self) -> f64 {
        self.eta.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eta_field(&self) -> Field1D {
        Field1D { grid: self.grid.clone(), values: self.eta.clone() }
    }

    pub fn is_finite(&self) -> bool {
        self.eta.iter().chain(&self.q).all(|v| v.is_finite())
    }
}

pub struct HomogenizedSolver {
    ops: SpectralOps1D,
    params: HomogenizedParams,
}

impl HomogenizedSolver {
    pub fn new(grid: Arc<PeriodicGrid1D>, params: HomogenizedParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { ops: SpectralOps1D::new(grid), params })
    }

    pub fn params(&self) -> &HomogenizedParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<PeriodicGrid1D> {
        self.ops.grid()
    }

    fn product(&self, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        if self.params.dealias_on {
            self.ops.dealias(&prod)
        } else {
            Ok(prod)
        }
    }

    /// Right-hand side (eta_t, q_t) of the semi-discrete system.
    pub fn rhs(&self, state: &State1D) -> Result<(Vec<f64>, Vec<f64>)> {
        let c = &self.params.coeffs;
        let mean_h = c.mean_depth;
        let min_depth = state.eta.iter().fold(f64::INFINITY, |m, &e| m.min(mean_h + e));
        if !(min_depth > 0.0) {
            return Err(Error::NonPositiveDepth(format!(
                "mean depth + eta_bar reaches {min_depth}"
            )));
        }
        let n = state.grid.n();
        let ratio = c.delta / mean_h;

        let q_x = self.ops.derivative(&state.q, 1)?;
        let eta_q_x = self.ops.derivative(&self.product(&state.eta, &state.q)?, 1)?;
        let mut eta_t = vec![0.0; n];
        for j in 0..n {
            eta_t[j] = -q_x[j] - ratio * eta_q_x[j];
        }

        let eta_x = self.ops.derivative(&state.eta, 1)?;
        let q_qx = self.product(&state.q, &q_x)?;
        let mut forcing = vec![0.0; n];
        for j in 0..n {
            forcing[j] = c.g * mean_h * eta_x[j] + ratio * q_qx[j];
        }
        let mut q_t = self.ops.helmholtz_inverse(&forcing, c.helmholtz_coeff())?;
        for v in &mut q_t {
            *v = -*v;
        }
        Ok((eta_t, q_t))
    }

    /// One Shu-Osher SSP-RK3 step of size dt.
    pub fn ssprk3_step(&self, state: &State1D, dt: f64) -> Result<State1D> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        let n = state.grid.n();
        let (ke, kq) = self.rhs(state)?;
        let mut s1 = state.clone();
        for j in 0..n {
            s1.eta[j] = state.eta[j] + dt * ke[j];
            s1.q[j] = state.q[j] + dt * kq[j];
        }
        let (ke, kq) = self.rhs(&s1)?;
        let mut s2 = state.clone();
        for j in 0..n {
            s2.eta[j] = 0.75 * state.eta[j] + 0.25 * (s1.eta[j] + dt * ke[j]);
            s2.q[j] = 0.75 * state.q[j] + 0.25 * (s1.q[j] + dt * kq[j]);
        }
        let (ke, kq) = self.rhs(&s2)?;
        let mut out = state.clone();
        for j in 0..n {
            out.eta[j] = state.eta[j] / 3.0 + 2.0 / 3.0 * (s2.eta[j] + dt * ke[j]);
            out.q[j] = state.q[j] / 3.0 + 2.0 / 3.0 * (s2.q[j] + dt * kq[j]);
        }
        out.t = state.t + dt;
        if !out.is_finite() {
            return Err(Error::BlowUp {
                t: out.t,
                detail: "non-finite values after SSP-RK3 step".into(),
            });
        }
        Ok(out)
    }

    /// Fixed-step time stepping to `t_end`; steps are shortened to land
    /// exactly on requested snapshot times and on `t_end`.  The observer is
    /// called after every accepted step.
    pub fn simulate(
        &self,
        initial: &State1D,
        t_end: f64,
        snapshot_times: &[f64],
        mut observer: impl FnMut(&State1D),
    ) -> Result<(State1D, Vec<State1D>)> {
        if t_end < initial.t {
            return Err(Error::Domain(format!(
                "t_end = {t_end} lies before the initial time {}",
                initial.t
            )));
        }
        let mut stops: Vec<f64> = snapshot_times
            .iter()
            .copied()
            .filter(|&s| s > initial.t && s <= t_end)
            .collect();
        stops.sort_by(f64::total_cmp);
        stops.dedup();

        let c = &self.params.coeffs;
        let dt = self.params.cfl * initial.grid.dx() / c.wave_speed();
        let blow_up_scale = initial.max_abs_eta();

        let mut snapshots = Vec::new();
        let mut state = initial.clone();
        if snapshot_times.iter().any(|&s| (s - initial.t).abs() == 0.0) {
            snapshots.push(state.clone());
        }
        let mut stop_iter = stops.into_iter().peekable();
        while state.t < t_end - 1e-12 * t_end.abs().max(1.0) {
            let next_stop = stop_iter.peek().copied().unwrap_or(t_end).min(t_end);
            let step = dt.min(next_stop - state.t);
            state = self.ssprk3_step(&state, step)?;
            let here = state.max_abs_eta();
            if blow_up_scale > 0.0 && here > 100.0 * blow_up_scale {
                return Err(Error::BlowUp {
                    t: state.t,
                    detail: format!(
                        "max |eta_bar| = {here} exceeds 100x the initial {blow_up_scale}"
                    ),
                });
            }
            if (state.t - next_stop).abs() <= 1e-12 * next_stop.abs().max(1.0) {
                state.t = next_stop;
                if stop_iter.peek().is_some() {
                    stop_iter.next();
                    snapshots.push(state.clone());
                }
            }
            observer(&state);
        }
        Ok((state, snapshots))
    }
}

/// Linearized dispersion relation omega(k) of the homogenized system.
pub fn dispersion_omega(coeffs: &EffectiveCoefficients, k: f64) -> f64 {
    let c = (coeffs.g * coeffs.mean_depth).sqrt();
    c * k / (1.0 + coeffs.helmholtz_coeff() * k * k).sqrt()
}
