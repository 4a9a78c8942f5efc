//! Orthogonal norms h_j = ∫ |z|^{2j} e^{-sQ} dA, s = N (normal) or 2N (symplectic).

use std::f64::consts::PI;

use serde::Serialize;

use crate::droplet::solve_r_tau;
use crate::equilibrium::b1_raw;
use crate::error::{domain, Error, Result};
use crate::potential::{Ensemble, RadialPotential};
use crate::quadrature::Quadrature;
use crate::special_fn::ln_factorial;

/// Exponent budget for the discarded tails: e^{-(TAIL_BUDGET + log s)}.
const TAIL_BUDGET: f64 = 40.0;
/// Stand-in for r = 0 when the peak sits at the origin.
const ORIGIN_FLOOR: f64 = 1e-150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormQuery {
    pub n: usize,
    pub j: usize,
    pub ensemble: Ensemble,
}

impl NormQuery {
    pub fn new(n: usize, j: usize, ensemble: Ensemble) -> Result<Self> {
        if n == 0 {
            return Err(domain("N must be at least 1"));
        }
        Ok(Self { n, j, ensemble })
    }

    pub fn scale(&self) -> f64 {
        self.ensemble.weight_scale(self.n)
    }

    pub fn tau(&self) -> f64 {
        self.j as f64 / self.scale()
    }
}

/// Per-norm quadrature settings: relative 1e-13, tightened to 1e-14 from N = 400.
pub fn norm_quadrature(n: usize) -> Quadrature {
    Quadrature {
        rel_tol: if n >= 400 { 1e-14 } else { 1e-13 },
        abs_tol: 0.0,
        ..Quadrature::default()
    }
}

/// Minimiser of V_τ on (0, support): r_τ for τ ≤ 1, continued past τ = 1 by
/// the same bisection on r q'(r) = 2τ.
fn minimizer(p: &RadialPotential, tau: f64) -> Result<f64> {
    if tau <= 1.0 {
        return solve_r_tau(p, tau);
    }
    let target = 2.0 * tau;
    let ceiling = p
        .support_radius()
        .map_or(f64::INFINITY, |s| s * (1.0 - 4.0 * f64::EPSILON));
    let mut lo = solve_r_tau(p, 1.0)?;
    let mut hi = lo;
    while p.rq_prime(hi) < target {
        lo = hi;
        hi = if 2.0 * hi < ceiling {
            2.0 * hi
        } else {
            0.5 * (hi + ceiling)
        };
        if hi == lo {
            return Err(Error::InvalidPotential(format!(
                "no minimiser of V_tau for tau = {tau}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if p.rq_prime(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// V_τ(r) − V_τ(r*), with the differences formed before they are combined.
fn shifted_v(p: &RadialPotential, tau: f64, r: f64, r_star: f64, q_star: f64) -> f64 {
    let dq = p.q_raw(r, 0) - q_star;
    if tau == 0.0 {
        dq
    } else {
        dq - 2.0 * tau * (r / r_star).ln()
    }
}

/// log h_j by quadrature of 2r e^{-s(V_τ(r) − V_τ(r*))} around the peak r*.
pub fn log_norm_exact(p: &RadialPotential, nq: NormQuery) -> Result<f64> {
    log_norm_exact_with(p, nq, &norm_quadrature(nq.n))
}

pub fn log_norm_exact_with(p: &RadialPotential, nq: NormQuery, quad: &Quadrature) -> Result<f64> {
    let s = nq.scale();
    let tau = nq.tau();
    let r_min = minimizer(p, tau)?;
    let r_star = r_min.max(ORIGIN_FLOOR);
    let q_star = p.q_raw(r_star, 0);
    let v_min = if tau == 0.0 {
        q_star
    } else {
        q_star - 2.0 * tau * r_star.ln()
    };
    let dv = |r: f64| shifted_v(p, tau, r, r_star, q_star);
    let threshold = (TAIL_BUDGET + s.ln()) / s;

    // peak width from V'' = 4ΔQ at the minimum
    let curvature = 4.0 * p.laplacian_raw(r_star, 0);
    let mut width = 1.0 / (s * curvature).sqrt();
    if !(width.is_finite() && width > 0.0) {
        width = 1.0;
    }
    let ceiling = p.support_radius().unwrap_or(f64::INFINITY);

    let mut upper = r_star + width;
    let mut step = width;
    loop {
        if upper >= ceiling {
            upper = ceiling;
            break;
        }
        if dv(upper) >= threshold {
            break;
        }
        step *= 2.0;
        upper = r_star + step;
        if !upper.is_finite() {
            return Err(Error::Integration(
                "no upper cutoff for the norm integrand".into(),
            ));
        }
    }

    let mut lower = 0.0;
    if r_min > 0.0 {
        let mut step = width;
        loop {
            let cand = r_star - step;
            if cand <= 0.0 {
                break;
            }
            if dv(cand) >= threshold {
                lower = cand;
                break;
            }
            step *= 2.0;
        }
    }

    let integrand = |r: f64| {
        if !p.in_support(r) {
            return 0.0;
        }
        let e = dv(r);
        2.0 * r * (-s * e).exp()
    };
    let mut points = vec![lower];
    if r_min > lower && r_min < upper {
        points.push(r_min);
    }
    points.push(upper);
    let res = quad.integrate_points(integrand, &points)?;
    if !(res.value > 0.0) {
        return Err(Error::Integration(format!(
            "norm integral is not positive: {}",
            res.value
        )));
    }
    Ok(-s * v_min + res.value.ln())
}

/// Two-term Laplace approximation, correction kept inside the logarithm.
pub fn log_norm_laplace(p: &RadialPotential, nq: NormQuery) -> Result<f64> {
    let (lead, b1_over_s) = laplace_parts(p, nq)?;
    Ok(lead + b1_over_s.ln_1p())
}

/// Leading Laplace term and 𝔅₁(r_τ)/s.
fn laplace_parts(p: &RadialPotential, nq: NormQuery) -> Result<(f64, f64)> {
    let s = nq.scale();
    let tau = nq.tau();
    let r = solve_r_tau(p, tau)?;
    if r <= 0.0 {
        return Err(domain(format!(
            "r_tau vanishes at tau = {tau}; use the low-degree regime"
        )));
    }
    let lap = p.laplacian(r)?;
    let v = p.v_tau_raw(tau, r, 0);
    let b1 = b1_raw(p, r);
    Ok((-s * v + 0.5 * (2.0 * PI * r * r / (s * lap)).ln(), b1 / s))
}

/// Gamma-function approximation for degrees j ≪ N (disc droplets).
pub fn log_norm_lowdeg(p: &RadialPotential, nq: NormQuery) -> Result<f64> {
    let origin = match solve_r_tau(p, 0.0)? {
        r if r > 0.0 => {
            return Err(domain("the low-degree regime requires a disc droplet"));
        }
        _ => p.origin_values()?,
    };
    let s = nq.scale();
    Ok(
        -s * origin.q - (nq.j as f64 + 1.0) * (s * origin.q2 / 2.0).ln()
            + ln_factorial(nq.j as u64),
    )
}

/// Degree threshold m_N = N^{1/6} (2N^{1/6} on the symplectic grid).
pub fn high_degree_threshold(n: usize, ensemble: Ensemble) -> f64 {
    let m = (n as f64).powf(1.0 / 6.0);
    match ensemble {
        Ensemble::Normal => m,
        Ensemble::Symplectic => 2.0 * m,
    }
}

/// Laplace form for degrees j ≥ m_N of a disc droplet, with 𝔅₁/s added
/// outside the logarithm.
pub fn log_norm_highdeg(p: &RadialPotential, nq: NormQuery) -> Result<f64> {
    if solve_r_tau(p, 0.0)? > 0.0 {
        return Err(domain("the high-degree regime requires a disc droplet"));
    }
    let m = high_degree_threshold(nq.n, nq.ensemble);
    if (nq.j as f64) < m {
        return Err(domain(format!(
            "degree {} is below the high-degree threshold {m:.6}",
            nq.j
        )));
    }
    let (lead, b1_over_s) = laplace_parts(p, nq)?;
    Ok(lead + b1_over_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    Exact,
    Laplace,
    Lowdeg,
    Highdeg,
}

pub fn log_norm(p: &RadialPotential, nq: NormQuery, method: NormMethod) -> Result<f64> {
    match method {
        NormMethod::Exact => log_norm_exact(p, nq),
        NormMethod::Laplace => log_norm_laplace(p, nq),
        NormMethod::Lowdeg => log_norm_lowdeg(p, nq),
        NormMethod::Highdeg => log_norm_highdeg(p, nq),
    }
}
