//! y-periodic bathymetry profiles and the averaging machinery built on them:
//! the period mean, the zero-mean fluctuation integral, its nested variant,
//! and the effective dispersion coefficient they produce.
//!
//! All profiles live on the canonical window `[-1/2, 1/2)` with period 1.
//! Piecewise-constant profiles are handled analytically segment by segment
//! (the fluctuation integrals are then exact piecewise polynomials); smooth
//! profiles go through sampled quadrature on a uniform grid.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::PeriodicGrid1D;
use crate::spectral::SpectralOps1D;

pub const DEFAULT_GRAVITY: f64 = 9.81;

/// Sample count used for the quadrature tables of smooth profiles.
pub const STRUCTURE_TABLE_SIZE: usize = 4096;

/// Relative tolerance for the internal agreement check between the two
/// expressions for the dispersion coefficient.
pub const MU_CONSISTENCY_RTOL: f64 = 1e-10;

/// Threshold on |<H^-1 [[H]]>| below which the homogenized description is
/// considered supported.
pub const ZERO_MEAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// Constant bottom levels; `levels[i] = (y_break, b)` means `b(y) = b`
    /// for `y_break <= y < next break` (left-closed).  Breaks ascend within
    /// `[-1/2, 1/2)`; the stretch before the first break wraps around from
    /// the last level.
    PiecewiseConstant { levels: Vec<(f64, f64)> },
    /// `b(y) = b0 + amplitude * sin(2 pi y)`.
    Sinusoidal { b0: f64, amplitude: f64 },
    /// Bottom samples at `y_j = -1/2 + j/n`.
    Tabulated { samples: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BathymetryProfile {
    kind: ProfileKind,
    eta0: f64,
}

impl BathymetryProfile {
    pub fn piecewise_constant(levels: Vec<(f64, f64)>, eta0: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidProfile("no levels given".into()));
        }
        for w in levels.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::InvalidProfile(format!(
                    "breaks must ascend, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        let lo = levels.first().unwrap().0;
        let hi = levels.last().unwrap().0;
        if lo < -0.5 || hi >= 0.5 {
            return Err(Error::InvalidProfile(
                "breaks must lie in [-1/2, 1/2)".into(),
            ));
        }
        let p = Self { kind: ProfileKind::PiecewiseConstant { levels }, eta0 };
        p.validate_depths()?;
        Ok(p)
    }

    pub fn sinusoidal(b0: f64, amplitude: f64, eta0: f64) -> Result<Self> {
        let p = Self { kind: ProfileKind::Sinusoidal { b0, amplitude }, eta0 };
        if eta0 - b0 - amplitude.abs() <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "minimum depth {} is not positive",
                eta0 - b0 - amplitude.abs()
            )));
        }
        Ok(p)
    }

    pub fn tabulated(samples: Vec<f64>, eta0: f64) -> Result<Self> {
        if samples.len() < 8 || samples.len() % 2 != 0 {
            return Err(Error::InvalidProfile(format!(
                "need an even number of samples >= 8, got {}",
                samples.len()
            )));
        }
        let p = Self { kind: ProfileKind::Tabulated { samples }, eta0 };
        p.validate_depths()?;
        Ok(p)
    }

    /// Flat bottom at depth `depth` (with eta0 = 0).
    pub fn flat(depth: f64) -> Result<Self> {
        Self::piecewise_constant(vec![(-0.5, -depth)], 0.0)
    }

    /// The two-level step profile used in the discontinuous experiment:
    /// b = -2/5 on [-1/2, 0), b = -8/5 on [0, 1/2).
    pub fn pwc_experiment() -> Self {
        Self::piecewise_constant(vec![(-0.5, -0.4), (0.0, -1.6)], 0.0).unwrap()
    }

    /// The smooth experiment profile: b = -1 + (3/10) sin(2 pi y).
    pub fn sinusoidal_experiment() -> Self {
        Self::sinusoidal(-1.0, 0.3, 0.0).unwrap()
    }

    fn validate_depths(&self) -> Result<()> {
        let bad = |h: f64, at: String| {
            Err(Error::InvalidProfile(format!(
                "non-positive depth {h} at {at}"
            )))
        };
        match &self.kind {
            ProfileKind::PiecewiseConstant { levels } => {
                for &(y, b) in levels {
                    let h = self.eta0 - b;
                    if !(h > 0.0 && h.is_finite()) {
                        return bad(h, format!("y = {y}"));
                    }
                }
            }
            ProfileKind::Sinusoidal { .. } => {}
            ProfileKind::Tabulated { samples } => {
                for (j, &b) in samples.iter().enumerate() {
                    let h = self.eta0 - b;
                    if !(h > 0.0 && h.is_finite()) {
                        return bad(h, format!("sample {j}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    pub fn period(&self) -> f64 {
        1.0
    }

    /// True when the bottom is continuous (a requirement of the 2D
    /// pseudospectral solver).  A single-level piecewise profile is a flat
    /// bottom and counts as smooth.
    pub fn is_smooth(&self) -> bool {
        match &self.kind {
            ProfileKind::PiecewiseConstant { levels } => {
                levels.iter().all(|&(_, b)| b == levels[0].1)
            }
            ProfileKind::Sinusoidal { .. } => true,
            ProfileKind::Tabulated { .. } => true,
        }
    }

    /// Wraps y into the canonical window [-1/2, 1/2).
    fn wrap(y: f64) -> f64 {
        let t = (y + 0.5).rem_euclid(1.0) - 0.5;
        if t >= 0.5 { t - 1.0 } else { t }
    }

    /// Bottom elevation b(y), periodically extended.
    pub fn bottom(&self, y: f64) -> f64 {
        let t = Self::wrap(y);
        match &self.kind {
            ProfileKind::PiecewiseConstant { levels } => {
                // left-closed: value of the last break <= t, wrapping around
                let mut b = levels.last().unwrap().1;
                for &(yb, bv) in levels {
                    if yb <= t {
                        b = bv;
                    } else {
                        break;
                    }
                }
                b
            }
            ProfileKind::Sinusoidal { b0, amplitude } => {
                b0 + amplitude * (2.0 * std::f64::consts::PI * t).sin()
            }
            ProfileKind::Tabulated { samples } => {
                // linear interpolation between samples, periodic
                let n = samples.len();
                let s = (t + 0.5) * n as f64;
                let i0 = s.floor() as usize % n;
                let frac = s - s.floor();
                let i1 = (i0 + 1) % n;
                samples[i0] * (1.0 - frac) + samples[i1] * frac
            }
        }
    }

    /// Unperturbed water depth H(y) = eta0 - b(y).
    pub fn depth(&self, y: f64) -> f64 {
        self.eta0 - self.bottom(y)
    }

    /// Exact period mean of H.
    pub fn mean_depth(&self) -> f64 {
        match &self.kind {
            ProfileKind::PiecewiseConstant { .. } => self
                .segments()
                .iter()
                .map(|s| (self.eta0 - s.b) * (s.y_hi - s.y_lo))
                .sum(),
            ProfileKind::Sinusoidal { b0, .. } => self.eta0 - b0,
            ProfileKind::Tabulated { samples } => {
                self.eta0 - samples.iter().sum::<f64>() / samples.len() as f64
            }
        }
    }

    /// Closed segment list covering [-1/2, 1/2) for piecewise profiles.
    fn segments(&self) -> Vec<ConstSegment> {
        let ProfileKind::PiecewiseConstant { levels } = &self.kind else {
            return Vec::new();
        };
        let mut segs = Vec::with_capacity(levels.len() + 1);
        if levels[0].0 > -0.5 {
            // wrap-around stretch before the first break
            segs.push(ConstSegment {
                y_lo: -0.5,
                y_hi: levels[0].0,
                b: levels.last().unwrap().1,
            });
        }
        for (i, &(y, b)) in levels.iter().enumerate() {
            let y_hi = if i + 1 < levels.len() { levels[i + 1].0 } else { 0.5 };
            segs.push(ConstSegment { y_lo: y, y_hi, b });
        }
        segs
    }

    /// Depth sampled at `y_j = -1/2 + j/n` (used by the quadrature path).
    pub fn depth_samples(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.depth(-0.5 + j as f64 / n as f64)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct ConstSegment {
    y_lo: f64,
    y_hi: f64,
    b: f64,
}

/// One polynomial piece of a structure function: value at y in
/// [y_lo, y_hi) is `c[0] + c[1]*s + c[2]*s^2` with `s = y - y_lo`.
#[derive(Debug, Clone, Copy)]
pub struct PolySeg {
    pub y_lo: f64,
    pub y_hi: f64,
    pub c: [f64; 3],
}

impl PolySeg {
    fn eval(&self, y: f64) -> f64 {
        let s = y - self.y_lo;
        self.c[0] + s * (self.c[1] + s * self.c[2])
    }

    fn integral(&self) -> f64 {
        let d = self.y_hi - self.y_lo;
        d * (self.c[0] + d * (self.c[1] / 2.0 + d * self.c[2] / 3.0))
    }
}

/// A zero-mean periodic structure function on [-1/2, 1/2): either exact
/// piecewise polynomials (piecewise-constant profiles) or uniform samples
/// with linear interpolation (smooth profiles).
#[derive(Debug, Clone)]
pub enum StructureTable {
    PiecewisePoly(Vec<PolySeg>),
    Samples(Vec<f64>),
}

impl StructureTable {
    pub fn eval(&self, y: f64) -> f64 {
        let t = BathymetryProfile::wrap(y);
        match self {
            StructureTable::PiecewisePoly(segs) => {
                for seg in segs {
                    if t < seg.y_hi || seg.y_hi >= 0.5 {
                        if t >= seg.y_lo {
                            return seg.eval(t);
                        }
                    }
                }
                // t below the first segment start cannot happen (segments
                // cover the window), but fall back to the first piece.
                segs[0].eval(t)
            }
            StructureTable::Samples(v) => {
                // 4-point Lagrange cubic on the uniform periodic grid
                let n = v.len() as isize;
                let s = (t + 0.5) * n as f64;
                let i = s.floor() as isize;
                let u = s - s.floor();
                let at = |o: isize| v[(i + o).rem_euclid(n) as usize];
                let (m1, p0, p1, p2) = (at(-1), at(0), at(1), at(2));
                let a = u * (u - 1.0) * (u - 2.0) / -6.0;
                let b = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
                let c = (u + 1.0) * u * (u - 2.0) / -2.0;
                let d = (u + 1.0) * u * (u - 1.0) / 6.0;
                a * m1 + b * p0 + c * p1 + d * p2
            }
        }
    }

    /// Samples at `y_j = -1/2 + j/n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.eval(-0.5 + j as f64 / n as f64)).collect()
    }

    /// Exact period mean (for sanity checks; zero by construction).
    pub fn mean(&self) -> f64 {
        match self {
            StructureTable::PiecewisePoly(segs) => {
                segs.iter().map(|s| s.integral()).sum()
            }
            StructureTable::Samples(v) => v.iter().sum::<f64>() / v.len() as f64,
        }
    }
}

/// Period mean of sampled data (uniform grid, periodic trapezoid).
pub fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("mean of empty sample set".into()));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Zero-mean fluctuation integral of sampled data on the unit period:
/// the periodic antiderivative of `f - <f>`, shifted to zero mean.
/// Computed spectrally, so d[[f]]/dy = f - <f> holds on the trigonometric
/// interpolant and <[[f]]> = 0 exactly.
pub fn fluct_integral(values: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 8 || n % 2 != 0 {
        return Err(Error::Domain(format!(
            "fluctuation integral needs an even number of samples >= 8, got {n}"
        )));
    }
    let grid = Arc::new(PeriodicGrid1D::new(n, -0.5, 1.0)?);
    let ops = SpectralOps1D::new(grid);
    ops.antiderivative_zero_mean(values)
}

/// Effective coefficients of a bathymetry profile: the mean depth, the
/// dispersion coefficient mu, and the tabulated structure functions
/// [[H]] and [[H^-1 [[H]]]].
#[derive(Debug, Clone)]
pub struct EffectiveCoefficients {
    pub mean_depth: f64,
    pub mu: f64,
    pub delta: f64,
    pub g: f64,
    /// [[H]]
    pub depth_fluct: StructureTable,
    /// [[H^-1 [[H]]]]
    pub nested_fluct: StructureTable,
    /// |<H^-1 [[H]]>|
    pub zero_mean_residual: f64,
    /// residual below tolerance; homogenized predictions are unsupported
    /// when false
    pub zero_mean_ok: bool,
}

impl EffectiveCoefficients {
    pub fn compute(profile: &BathymetryProfile) -> Result<Self> {
        Self::compute_with(profile, 1.0, DEFAULT_GRAVITY)
    }

    pub fn compute_with(profile: &BathymetryProfile, delta: f64, g: f64) -> Result<Self> {
        if !(delta > 0.0) || !(g > 0.0) {
            return Err(Error::Config(format!("need delta > 0 and g > 0, got {delta}, {g}")));
        }
        match profile.kind() {
            ProfileKind::PiecewiseConstant { .. } => Self::compute_piecewise(profile, delta, g),
            _ => Self::compute_sampled(profile, delta, g),
        }
    }

    /// Exact segment arithmetic for piecewise-constant bottoms.
    fn compute_piecewise(profile: &BathymetryProfile, delta: f64, g: f64) -> Result<Self> {
        let segs = profile.segments();
        let mean_h: f64 = segs
            .iter()
            .map(|s| (profile.eta0() - s.b) * (s.y_hi - s.y_lo))
            .sum();

        // antiderivative of H - <H>: piecewise linear, continuous, starts at 0
        let mut acc = 0.0;
        let mut lin: Vec<PolySeg> = Vec::with_capacity(segs.len());
        for s in &segs {
            let slope = (profile.eta0() - s.b) - mean_h;
            lin.push(PolySeg { y_lo: s.y_lo, y_hi: s.y_hi, c: [acc, slope, 0.0] });
            acc += slope * (s.y_hi - s.y_lo);
        }
        let raw_mean: f64 = lin.iter().map(|p| p.integral()).sum();
        for p in &mut lin {
            p.c[0] -= raw_mean;
        }
        let br_h = StructureTable::PiecewisePoly(lin.clone());

        // f2 = H^-1 [[H]]: still piecewise linear
        let f2: Vec<PolySeg> = lin
            .iter()
            .zip(&segs)
            .map(|(p, s)| {
                let hinv = 1.0 / (profile.eta0() - s.b);
                PolySeg { y_lo: p.y_lo, y_hi: p.y_hi, c: [p.c[0] * hinv, p.c[1] * hinv, 0.0] }
            })
            .collect();
        let zero_mean_residual: f64 = f2.iter().map(|p| p.integral()).sum::<f64>().abs();

        // antiderivative of f2 - <f2>: piecewise quadratic
        let f2_mean: f64 = f2.iter().map(|p| p.integral()).sum();
        let mut acc = 0.0;
        let mut quad: Vec<PolySeg> = Vec::with_capacity(f2.len());
        for p in &f2 {
            let d = p.y_hi - p.y_lo;
            quad.push(PolySeg {
                y_lo: p.y_lo,
                y_hi: p.y_hi,
                c: [acc, p.c[0] - f2_mean, p.c[1] / 2.0],
            });
            acc += (p.c[0] - f2_mean) * d + p.c[1] / 2.0 * d * d;
        }
        let raw_mean: f64 = quad.iter().map(|p| p.integral()).sum();
        for p in &mut quad {
            p.c[0] -= raw_mean;
        }

        // mu two ways, both via exact polynomial integrals
        let mu_direct: f64 = lin
            .iter()
            .zip(&segs)
            .map(|(p, s)| {
                // integral of (c0 + c1 s)^2 / H over the segment
                let d = p.y_hi - p.y_lo;
                let (a, b) = (p.c[0], p.c[1]);
                (a * a * d + a * b * d * d + b * b * d * d * d / 3.0)
                    / (profile.eta0() - s.b)
            })
            .sum();
        let mu_nested: f64 = -quad
            .iter()
            .zip(&segs)
            .map(|(p, s)| (profile.eta0() - s.b) * p.integral())
            .sum::<f64>();

        Self::assemble(
            mean_h,
            mu_direct,
            mu_nested,
            br_h,
            StructureTable::PiecewisePoly(quad),
            zero_mean_residual,
            delta,
            g,
        )
    }

    /// Quadrature tables for smooth profiles.
    fn compute_sampled(profile: &BathymetryProfile, delta: f64, g: f64) -> Result<Self> {
        let n = match profile.kind() {
            ProfileKind::Tabulated { samples } => samples.len().max(STRUCTURE_TABLE_SIZE),
            _ => STRUCTURE_TABLE_SIZE,
        };
        let h = profile.depth_samples(n);
        let mean_h = mean(&h)?;
        let br_h = fluct_integral(&h)?;
        let f2: Vec<f64> = br_h.iter().zip(&h).map(|(b, hh)| b / hh).collect();
        let zero_mean_residual = mean(&f2)?.abs();
        let nested = fluct_integral(&f2)?;

        let mu_direct = mean(
            &br_h.iter().zip(&h).map(|(b, hh)| b * b / hh).collect::<Vec<_>>(),
        )?;
        let mu_nested = -mean(
            &nested.iter().zip(&h).map(|(q, hh)| q * hh).collect::<Vec<_>>(),
        )?;

        Self::assemble(
            mean_h,
            mu_direct,
            mu_nested,
            StructureTable::Samples(br_h),
            StructureTable::Samples(nested),
            zero_mean_residual,
            delta,
            g,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        mean_depth: f64,
        mu_direct: f64,
        mu_nested: f64,
        depth_fluct: StructureTable,
        nested_fluct: StructureTable,
        zero_mean_residual: f64,
        delta: f64,
        g: f64,
    ) -> Result<Self> {
        let scale = mu_direct.abs().max(1e-14);
        if (mu_direct - mu_nested).abs() > MU_CONSISTENCY_RTOL * scale {
            return Err(Error::Consistency(format!(
                "dispersion coefficient mismatch: {mu_direct} vs {mu_nested}"
            )));
        }
        Ok(Self {
            mean_depth,
            mu: mu_direct,
            delta,
            g,
            depth_fluct,
            nested_fluct,
            zero_mean_residual,
            zero_mean_ok: zero_mean_residual < ZERO_MEAN_TOL,
        })
    }

    /// Long-wave speed sqrt(g <H>).
    pub fn wave_speed(&self) -> f64 {
        (self.g * self.mean_depth).sqrt()
    }

    /// Helmholtz coefficient delta^2 mu / <H> of the dispersive operator.
    pub fn helmholtz_coeff(&self) -> f64 {
        self.delta * self.delta * self.mu / self.mean_depth
    }
}

/// Dispersion coefficient of a profile (the `<H^-1 [[H]]^2>` value, after
/// the internal two-formula agreement check).
pub fn effective_dispersion_mu(profile: &BathymetryProfile) -> Result<f64> {
    EffectiveCoefficients::compute(profile).map(|c| c.mu)
}

/// |<H^-1 [[H]]>| and whether it is small enough for the homogenized
/// description to apply.
pub fn verify_zero_mean_condition(profile: &BathymetryProfile) -> Result<(f64, bool)> {
    EffectiveCoefficients::compute(profile).map(|c| (c.zero_mean_residual, c.zero_mean_ok))
}
