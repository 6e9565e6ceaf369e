//! Solitary traveling waves of the homogenized system, constructed from the
//! phase-plane formulation
//!
//!   q'' = -U'(q),   U(q) = (a2 q^3/6 - V q^2/2 - (a1/a2) q
//!                           - (a1/a2^2) V ln(1 - a2 q / V)) / (mu~ V)
//!
//! with a1 = g <H>, a2 = delta / <H>, mu~ = delta^2 mu / <H>.  For V >
//! sqrt(a1) the origin is a saddle and the homoclinic orbit through it is
//! the solitary wave; the surface profile follows as eta = q / (V - a2 q).

use crate::bathymetry::EffectiveCoefficients;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct TravelingWaveParams {
    /// wave speed
    pub v: f64,
    /// g <H>
    pub a1: f64,
    /// delta / <H>
    pub a2: f64,
    /// delta^2 mu / <H>
    pub mu_tilde: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Saddle,
    Center,
}

#[derive(Debug, Clone, Copy)]
pub struct Equilibrium {
    pub q: f64,
    pub kind: EquilibriumKind,
}

impl TravelingWaveParams {
    pub fn new(coeffs: &EffectiveCoefficients, v: f64) -> Result<Self> {
        let p = Self {
            v,
            a1: coeffs.g * coeffs.mean_depth,
            a2: coeffs.delta / coeffs.mean_depth,
            mu_tilde: coeffs.helmholtz_coeff(),
        };
        if !(p.a2 > 0.0) || !(p.mu_tilde > 0.0) || !(v > 0.0) {
            return Err(Error::Domain(format!(
                "need a2 > 0, mu~ > 0 and V > 0, got a2 = {}, mu~ = {}, V = {v}",
                p.a2, p.mu_tilde
            )));
        }
        Ok(p)
    }

    /// Upper end of the admissible q range (the log argument vanishes).
    pub fn q_max(&self) -> f64 {
        self.v / self.a2
    }

    /// True when the origin is a saddle, i.e. a homoclinic orbit exists.
    pub fn has_homoclinic(&self) -> bool {
        self.v > self.a1.sqrt()
    }

    /// The potential U(q); U(0) = 0.
    pub fn potential(&self, q: f64) -> Result<f64> {
        if q >= self.q_max() {
            return Err(Error::Domain(format!(
                "q = {q} is outside the domain (q < V/a2 = {})",
                self.q_max()
            )));
        }
        let (v, a1, a2) = (self.v, self.a1, self.a2);
        let u = a2 * q * q * q / 6.0 - v * q * q / 2.0 - a1 / a2 * q
            - a1 / (a2 * a2) * v * (1.0 - a2 * q / v).ln();
        Ok(u / (self.mu_tilde * v))
    }

    /// U'(q).
    pub fn potential_deriv(&self, q: f64) -> Result<f64> {
        if q >= self.q_max() {
            return Err(Error::Domain(format!(
                "q = {q} is outside the domain (q < V/a2 = {})",
                self.q_max()
            )));
        }
        let (v, a1, a2) = (self.v, self.a1, self.a2);
        Ok((a2 * q * q / 2.0 - v * q + a1 * q / (v - a2 * q)) / (self.mu_tilde * v))
    }

    /// U''(q).
    pub fn potential_second_deriv(&self, q: f64) -> Result<f64> {
        if q >= self.q_max() {
            return Err(Error::Domain(format!("q = {q} outside domain")));
        }
        let (v, a1, a2) = (self.v, self.a1, self.a2);
        let d = v - a2 * q;
        Ok((a2 * q - v + a1 * v / (d * d)) / (self.mu_tilde * v))
    }

    /// Surface elevation corresponding to a discharge value.
    pub fn eta_of_q(&self, q: f64) -> f64 {
        q / (self.v - self.a2 * q)
    }

    /// Equilibria of the phase plane on (-inf, V/a2), classified by the sign
    /// of U'': potential maxima are saddles, minima are centers.  The origin
    /// is always one of them; the other root of U' = 0 is located by
    /// bracketed bisection on a sign-change scan.
    pub fn find_equilibria(&self) -> Result<Vec<Equilibrium>> {
        let classify = |q: f64| -> Result<Equilibrium> {
            let upp = self.potential_second_deriv(q)?;
            let kind = if upp < 0.0 { EquilibriumKind::Saddle } else { EquilibriumKind::Center };
            Ok(Equilibrium { q, kind })
        };
        let mut out = vec![classify(0.0)?];

        // scan for a sign change of U' away from the origin
        let q_hi = self.q_max();
        let scan_lo = -q_hi * 50.0;
        let n_scan = 20000;
        let mut prev_q = scan_lo;
        let mut prev_f = self.potential_deriv(prev_q)?;
        for i in 1..=n_scan {
            let q = scan_lo + (q_hi * 0.999_999 - scan_lo) * i as f64 / n_scan as f64;
            if q.abs() < q_hi * 1e-7 {
                prev_q = q;
                prev_f = self.potential_deriv(q)?;
                continue;
            }
            let f = self.potential_deriv(q)?;
            if prev_f != 0.0 && f != 0.0 && prev_f.signum() != f.signum()
                && !(prev_q < 0.0 && q > 0.0)
            {
                let root = bisect(|x| self.potential_deriv(x), prev_q, q)?;
                out.push(classify(root)?);
            }
            prev_q = q;
            prev_f = f;
        }
        out.sort_by(|a, b| a.q.total_cmp(&b.q));
        Ok(out)
    }

    /// The center equilibrium (exists for all V > 0; positive iff V > sqrt(a1)).
    pub fn center_equilibrium(&self) -> Result<f64> {
        let eqs = self.find_equilibria()?;
        eqs.iter()
            .find(|e| e.kind == EquilibriumKind::Center)
            .map(|e| e.q)
            .ok_or_else(|| Error::RootFinding("no center equilibrium found".into()))
    }
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::RootFinding(format!("no sign change on [{a}, {b}]")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 || (b - a).abs() < 1e-16 * m.abs().max(1.0) {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone)]
pub struct HomoclinicOptions {
    /// Starting amplitude relative to the center-equilibrium scale.
    pub epsilon: f64,
    /// Local error tolerance of the adaptive integrator.
    pub tol: f64,
    /// Number of points of the uniform output grid (odd, symmetric about 0).
    pub n_out: usize,
}

impl Default for HomoclinicOptions {
    fn default() -> Self {
        Self { epsilon: 1e-8, tol: 1e-12, n_out: 8193 }
    }
}

/// A sampled solitary wave profile on a uniform xi grid, symmetric about
/// its maximum at xi = 0.
#[derive(Debug, Clone)]
pub struct TravelingWaveSolution {
    pub xi: Vec<f64>,
    pub q: Vec<f64>,
    pub eta: Vec<f64>,
    pub v: f64,
    /// peak of eta
    pub amplitude: f64,
    /// fitted width parameter of A sech^2(alpha sqrt(A) xi)
    pub alpha: f64,
    /// max |eta - fit| / A over the profile
    pub sech2_residual: f64,
    /// max |(q')^2/2 + U(q)| along the integrated orbit (zero on the exact
    /// homoclinic)
    pub energy_drift: f64,
}

impl TravelingWaveSolution {
    /// Cubic interpolation of the profile at arbitrary xi (zero in the tails).
    pub fn eta_at(&self, xi: f64) -> f64 {
        interp_cubic(&self.xi, &self.eta, xi)
    }

    pub fn q_at(&self, xi: f64) -> f64 {
        interp_cubic(&self.xi, &self.q, xi)
    }
}

/// 4-point Lagrange cubic on a uniform grid, zero outside the table.
fn interp_cubic(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len();
    let dx = x[1] - x[0];
    let s = (at - x[0]) / dx;
    if s < 0.0 || s > (n - 1) as f64 {
        return 0.0;
    }
    let i = (s.floor() as usize).clamp(1, n - 3);
    let u = s - i as f64;
    let (m1, p0, p1, p2) = (y[i - 1], y[i], y[i + 1], y[i + 2]);
    let a = u * (u - 1.0) * (u - 2.0) / -6.0;
    let b = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    let c = (u + 1.0) * u * (u - 2.0) / -2.0;
    let d = (u + 1.0) * u * (u - 1.0) / 6.0;
    a * m1 + b * p0 + c * p1 + d * p2
}

/// One classical RK4 step of the phase-plane system (q, w).
fn rk4_step(p: &TravelingWaveParams, q: f64, w: f64, h: f64) -> Result<(f64, f64)> {
    let f = |q: f64, w: f64| -> Result<(f64, f64)> { Ok((w, -p.potential_deriv(q)?)) };
    let (k1q, k1w) = f(q, w)?;
    let (k2q, k2w) = f(q + 0.5 * h * k1q, w + 0.5 * h * k1w)?;
    let (k3q, k3w) = f(q + 0.5 * h * k2q, w + 0.5 * h * k2w)?;
    let (k4q, k4w) = f(q + h * k3q, w + h * k3w)?;
    Ok((
        q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
    ))
}

/// Integrates the unstable manifold of the saddle at the origin up to the
/// turning point (q' = 0) with step-doubling adaptive RK4, then mirrors the
/// branch about the peak (the orbit is symmetric there).  The perturbation
/// starts along the unstable eigenvector (1, lambda) with magnitude
/// `epsilon` relative to the center-equilibrium scale.
pub fn integrate_homoclinic(
    p: &TravelingWaveParams,
    opts: &HomoclinicOptions,
) -> Result<TravelingWaveSolution> {
    if !p.has_homoclinic() {
        return Err(Error::Domain(format!(
            "V = {} <= sqrt(a1) = {}: origin is a center, no homoclinic orbit",
            p.v,
            p.a1.sqrt()
        )));
    }
    let upp0 = p.potential_second_deriv(0.0)?;
    let lambda = (-upp0).sqrt();
    let q_center = p.center_equilibrium()?;
    let q0 = opts.epsilon * q_center;
    let (mut q, mut w) = (q0, lambda * q0);
    let (mut xi, mut h) = (0.0, 1e-3 / lambda);

    // accepted samples (xi, q, w) along the ascending branch
    let mut samples: Vec<(f64, f64, f64)> = vec![(xi, q, w)];
    let mut energy_drift: f64 = (0.5 * w * w + p.potential(q)?).abs();
    let max_steps = 2_000_000usize;
    let mut steps = 0usize;

    while w > 0.0 {
        steps += 1;
        if steps > max_steps {
            return Err(Error::RootFinding(
                "homoclinic integration exceeded the step cap".into(),
            ));
        }
        // reject escapes toward the log singularity
        if q > 0.999 * p.q_max() {
            return Err(Error::Domain(format!(
                "orbit escaped toward q = V/a2 = {} (no homoclinic return)",
                p.q_max()
            )));
        }
        // step doubling: one step h vs two steps h/2
        let (q1, w1) = rk4_step(p, q, w, h)?;
        let (qh, wh) = rk4_step(p, q, w, 0.5 * h)?;
        let (q2, w2) = rk4_step(p, qh, wh, 0.5 * h)?;
        let scale = q.abs().max(q_center) + w.abs().max(lambda * q_center);
        let err = ((q1 - q2).abs() + (w1 - w2).abs()) / scale;
        if err > opts.tol {
            h *= 0.5;
            continue;
        }
        // accept the fine solution
        q = q2;
        w = w2;
        xi += h;
        samples.push((xi, q, w));
        energy_drift = energy_drift.max((0.5 * w * w + p.potential(q)?).abs());
        if err < opts.tol / 64.0 {
            h *= 2.0;
        }
    }

    // refine the peak: bisect on w between the last two samples
    let (xi_a, q_a, w_a) = samples[samples.len() - 2];
    let (mut lo, mut hi) = (0.0, samples[samples.len() - 1].0 - xi_a);
    let (mut q_pk, mut w_pk) = (q_a, w_a);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let (qm, wm) = integrate_fixed(p, q_a, w_a, mid, 16)?;
        if wm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        q_pk = qm;
        w_pk = wm;
    }
    let xi_peak = xi_a + 0.5 * (lo + hi);
    samples.pop();
    samples.push((xi_peak, q_pk, 0.0));
    let _ = w_pk;

    // uniform symmetric grid, peak at xi = 0; q(|xi|) interpolated on the
    // ascending branch by cubic Hermite (we know q' = w at the samples)
    let n_out = if opts.n_out % 2 == 1 { opts.n_out } else { opts.n_out + 1 };
    let half = xi_peak;
    let mut xi_grid = Vec::with_capacity(n_out);
    let mut q_prof = Vec::with_capacity(n_out);
    for j in 0..n_out {
        let x = -half + 2.0 * half * j as f64 / (n_out - 1) as f64;
        let t = xi_peak - x.abs(); // position along the ascending branch
        xi_grid.push(x);
        q_prof.push(hermite_eval(&samples, t));
    }
    let eta: Vec<f64> = q_prof.iter().map(|&qq| p.eta_of_q(qq)).collect();

    let amplitude = p.eta_of_q(q_pk);
    let fit = fit_sech2(&xi_grid, &eta)?;
    Ok(TravelingWaveSolution {
        xi: xi_grid,
        q: q_prof,
        eta,
        v: p.v,
        amplitude,
        alpha: fit.alpha,
        sech2_residual: fit.residual,
        energy_drift,
    })
}

/// Fixed-step RK4 helper used by the peak refinement.
fn integrate_fixed(
    p: &TravelingWaveParams,
    mut q: f64,
    mut w: f64,
    span: f64,
    steps: usize,
) -> Result<(f64, f64)> {
    let h = span / steps as f64;
    for _ in 0..steps {
        (q, w) = rk4_step(p, q, w, h)?;
    }
    Ok((q, w))
}

/// Cubic Hermite evaluation of q(t) on the (xi, q, w) sample list.
fn hermite_eval(samples: &[(f64, f64, f64)], t: f64) -> f64 {
    if t <= samples[0].0 {
        return samples[0].1;
    }
    let last = samples[samples.len() - 1];
    if t >= last.0 {
        return last.1;
    }
    // binary search for the bracketing interval
    let mut lo = 0usize;
    let mut hi = samples.len() - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if samples[mid].0 <= t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (x0, y0, d0) = samples[lo];
    let (x1, y1, d1) = samples[hi];
    let h = x1 - x0;
    let s = (t - x0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

#[derive(Debug, Clone, Copy)]
pub struct Sech2Fit {
    /// peak value
    pub amplitude: f64,
    /// width parameter of A sech^2(alpha sqrt(A) xi)
    pub alpha: f64,
    /// max |eta - fit| / A
    pub residual: f64,
}

/// Fits A sech^2(alpha sqrt(A) (xi - xi_peak)) to a single-peaked profile.
/// A is the peak value; alpha is found by least squares on log(eta/A)
/// against the sech^2 template, over samples above a small floor.
pub fn fit_sech2(xi: &[f64], eta: &[f64]) -> Result<Sech2Fit> {
    if xi.len() != eta.len() || xi.len() < 8 {
        return Err(Error::Domain("fit needs matching sample arrays (>= 8 points)".into()));
    }
    let (mut i_pk, mut amp) = (0usize, f64::MIN);
    for (i, &e) in eta.iter().enumerate() {
        if e > amp {
            amp = e;
            i_pk = i;
        }
    }
    if !(amp > 0.0) {
        return Err(Error::Domain("profile has no positive peak".into()));
    }
    // reject profiles with a second separated local maximum above 10% of A
    let mut peaks = 0;
    for i in 1..eta.len() - 1 {
        if eta[i] > eta[i - 1] && eta[i] >= eta[i + 1] && eta[i] > 0.1 * amp {
            peaks += 1;
        }
    }
    if peaks > 1 {
        return Err(Error::Domain(format!("multi-peaked profile ({peaks} maxima)")));
    }

    // sub-grid peak position by quadratic interpolation
    let xi_pk = if i_pk > 0 && i_pk + 1 < eta.len() {
        let (ym, y0, yp) = (eta[i_pk - 1], eta[i_pk], eta[i_pk + 1]);
        let denom = ym - 2.0 * y0 + yp;
        if denom.abs() > 0.0 {
            xi[i_pk] + 0.5 * (ym - yp) / denom * (xi[1] - xi[0])
        } else {
            xi[i_pk]
        }
    } else {
        xi[i_pk]
    };

    let floor = 1e-4 * amp;
    let pts: Vec<(f64, f64)> = xi
        .iter()
        .zip(eta)
        .filter(|&(_, &e)| e >= floor)
        .map(|(&x, &e)| (x - xi_pk, (e / amp).ln()))
        .collect();
    if pts.len() < 8 {
        return Err(Error::Domain("too few samples above the fit floor".into()));
    }

    // 1-D least squares over the width parameter b = alpha sqrt(A)
    let objective = |b: f64| -> f64 {
        pts.iter()
            .map(|&(x, target)| {
                let z = (b * x).abs().min(300.0);
                let model = -2.0 * z.cosh().ln();
                let d = target - model;
                d * d
            })
            .sum()
    };
    // bracket from the half-maximum width
    let mut x_half = f64::MAX;
    for (&x, &e) in xi.iter().zip(eta) {
        if e >= 0.5 * amp {
            x_half = x_half.min((x - xi_pk).abs().max(1e-12));
        }
    }
    let half_width = xi
        .iter()
        .zip(eta)
        .filter(|&(_, &e)| e >= 0.5 * amp)
        .map(|(&x, _)| (x - xi_pk).abs())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let _ = x_half;
    let b_guess = (2.0f64.sqrt() + 1.0).ln() / half_width;
    let b = golden_min(&objective, b_guess / 10.0, b_guess * 10.0);

    let residual = xi
        .iter()
        .zip(eta)
        .map(|(&x, &e)| {
            let z = (b * (x - xi_pk)).abs().min(300.0);
            let model = amp / (z.cosh() * z.cosh());
            (e - model).abs()
        })
        .fold(0.0f64, f64::max)
        / amp;

    Ok(Sech2Fit { amplitude: amp, alpha: b / amp.sqrt(), residual })
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * b.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bathymetry::BathymetryProfile;

    fn pwc_params(v: f64) -> TravelingWaveParams {
        let coeffs =
            EffectiveCoefficients::compute(&BathymetryProfile::pwc_experiment()).unwrap();
        TravelingWaveParams::new(&coeffs, v).unwrap()
    }

    #[test]
    fn potential_vanishes_at_origin() {
        let p = pwc_params(10.0 / 3.0);
        assert_eq!(p.potential(0.0).unwrap(), 0.0);
        assert!(p.potential(p.q_max()).is_err());
    }

    #[test]
    fn potential_quadratic_coefficient_matches_finite_differences() {
        // small-q expansion: U(q) ~ (a1 - V^2) q^2 / (2 mu~ V^2), negative
        // above the sonic speed (saddle at the origin)
        for v in [3.2, 10.0 / 3.0, 3.5] {
            let p = pwc_params(v);
            let expect = (p.a1 - v * v) / (2.0 * p.mu_tilde * v * v);
            assert!(expect < 0.0);
            let h = 1e-5;
            let fd = (p.potential(h).unwrap() - 2.0 * p.potential(0.0).unwrap()
                + p.potential(-h).unwrap())
                / (h * h);
            assert!(
                (fd / 2.0 - expect).abs() < 1e-3 * expect.abs(),
                "V = {v}: fd {} vs {expect}",
                fd / 2.0
            );
            // and the closed-form second derivative agrees with the fd one
            let upp = p.potential_second_deriv(0.0).unwrap();
            assert!((upp - fd).abs() < 1e-3 * upp.abs());
        }
    }

    #[test]
    fn potential_has_negative_well_and_second_zero() {
        let p = pwc_params(10.0 / 3.0);
        let q_c = p.center_equilibrium().unwrap();
        assert!(p.potential(q_c).unwrap() < 0.0, "no well at the center");
        // second zero above the center
        let mut found = false;
        let mut prev = p.potential(q_c).unwrap();
        for i in 1..=1000 {
            let q = q_c + (p.q_max() * 0.999 - q_c) * i as f64 / 1000.0;
            let u = p.potential(q).unwrap();
            if prev < 0.0 && u >= 0.0 {
                found = true;
                break;
            }
            prev = u;
        }
        assert!(found, "potential has no second zero");
    }

    #[test]
    fn equilibria_classification() {
        let p = pwc_params(10.0 / 3.0);
        let eqs = p.find_equilibria().unwrap();
        assert_eq!(eqs.len(), 2, "{eqs:?}");
        let origin = eqs.iter().find(|e| e.q.abs() < 1e-12).unwrap();
        assert_eq!(origin.kind, EquilibriumKind::Saddle);
        let center = eqs.iter().find(|e| e.q > 1e-6).unwrap();
        assert_eq!(center.kind, EquilibriumKind::Center);
        // closed-form root of U' = 0: (3V - sqrt(V^2 + 8 a1)) / (2 a2)
        let v = p.v;
        let exact = (3.0 * v - (v * v + 8.0 * p.a1).sqrt()) / (2.0 * p.a2);
        assert!(
            (center.q - exact).abs() < 1e-9 * exact,
            "center {} vs {exact}",
            center.q
        );
    }

    #[test]
    fn subsonic_speed_has_center_at_origin() {
        let p = pwc_params(3.0); // below sqrt(9.81)
        assert!(!p.has_homoclinic());
        let eqs = p.find_equilibria().unwrap();
        let origin = eqs.iter().find(|e| e.q.abs() < 1e-12).unwrap();
        assert_eq!(origin.kind, EquilibriumKind::Center);
        assert!(integrate_homoclinic(&p, &HomoclinicOptions::default()).is_err());
    }

    #[test]
    fn near_sonic_center_scales_linearly() {
        // center location ~ 2 <H> (V - sqrt(a1)) / ... from the cubic
        // approximation; check the asymptotic proportionality
        let v1 = 3.14;
        let v2 = 3.1480184; // twice the excess speed of v1
        let p1 = pwc_params(v1);
        let p2 = pwc_params(v2);
        let c = p1.a1.sqrt();
        let q1 = p1.center_equilibrium().unwrap();
        let q2 = p2.center_equilibrium().unwrap();
        let r = (q2 / q1) / ((v2 - c) / (v1 - c));
        assert!((r - 1.0).abs() < 0.02, "scaling ratio {r}");
    }

    #[test]
    fn homoclinic_energy_and_turning_point() {
        let p = pwc_params(10.0 / 3.0);
        let sol = integrate_homoclinic(&p, &HomoclinicOptions::default()).unwrap();
        assert!(
            sol.energy_drift <= 1e-8,
            "energy drift {} exceeds 1e-8",
            sol.energy_drift
        );
        // the peak q solves U(q) = 0 (turning point on the separatrix)
        let q_pk = sol.q.iter().cloned().fold(f64::MIN, f64::max);
        let q_root = bisect(
            |q| p.potential(q),
            0.5 * q_pk,
            (1.5 * q_pk).min(0.999 * p.q_max()),
        )
        .unwrap();
        assert!(
            (q_pk - q_root).abs() <= 1e-8 * q_root,
            "turning point {q_pk} vs root {q_root}"
        );
        // tails decay below 1e-8 of the peak
        assert!(sol.q[0] <= 1e-8 * q_pk);
        // single interior maximum at xi = 0
        let mid = sol.q.len() / 2;
        assert_eq!(sol.q[mid], q_pk);
    }

    #[test]
    fn epsilon_robustness() {
        let p = pwc_params(10.0 / 3.0);
        let a = integrate_homoclinic(
            &p,
            &HomoclinicOptions { epsilon: 1e-8, ..Default::default() },
        )
        .unwrap();
        let b = integrate_homoclinic(
            &p,
            &HomoclinicOptions { epsilon: 5e-9, ..Default::default() },
        )
        .unwrap();
        assert!(
            (a.amplitude - b.amplitude).abs() < 1e-6 * a.amplitude,
            "amplitude moved from {} to {}",
            a.amplitude,
            b.amplitude
        );
    }

    #[test]
    fn fit_recovers_exact_sech2() {
        let alpha = 4.7f64;
        let amp = 0.03f64;
        let b = alpha * amp.sqrt();
        let n = 2001;
        let xi: Vec<f64> = (0..n).map(|j| -20.0 + 40.0 * j as f64 / (n - 1) as f64).collect();
        let eta: Vec<f64> = xi.iter().map(|&x| amp / ((b * x).cosh().powi(2))).collect();
        let fit = fit_sech2(&xi, &eta).unwrap();
        assert!((fit.amplitude - amp).abs() < 1e-12);
        assert!(
            (fit.alpha - alpha).abs() < 1e-8 * alpha,
            "alpha {} vs {alpha}",
            fit.alpha
        );
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn fit_rejects_multi_peak() {
        let n = 801;
        let xi: Vec<f64> = (0..n).map(|j| -8.0 + 16.0 * j as f64 / (n - 1) as f64).collect();
        let eta: Vec<f64> = xi
            .iter()
            .map(|&x| (-(x - 3.0) * (x - 3.0)).exp() + 0.9 * (-(x + 3.0) * (x + 3.0)).exp())
            .collect();
        assert!(fit_sech2(&xi, &eta).is_err());
    }

    #[test]
    fn homoclinic_profile_is_near_sech2() {
        let p = pwc_params(10.0 / 3.0);
        let sol = integrate_homoclinic(&p, &HomoclinicOptions::default()).unwrap();
        // at this speed the profile is still close to sech^2 but not exact
        assert!(
            sol.sech2_residual < 0.05,
            "residual {} unexpectedly large",
            sol.sech2_residual
        );
        assert!(sol.sech2_residual > 1e-4, "suspiciously perfect fit");
    }

    #[test]
    fn amplitude_increases_with_speed() {
        let mut prev = 0.0;
        for v in [3.15, 3.2, 3.25, 3.3, 10.0 / 3.0] {
            let p = pwc_params(v);
            let sol = integrate_homoclinic(&p, &HomoclinicOptions::default()).unwrap();
            assert!(
                sol.amplitude > prev,
                "amplitude {} at V = {v} not larger than {prev}",
                sol.amplitude
            );
            prev = sol.amplitude;
        }
    }
}
