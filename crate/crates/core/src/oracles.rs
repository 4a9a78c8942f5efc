//! Closed forms for the Mittag-Leffler and truncated-unitary ensembles.
//!
//! Every product is accumulated in log space, since the partition functions
//! leave the double range already around N = 30.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::droplet::{Droplet, DropletKind};
use crate::equilibrium::EquilibriumReport;
use crate::error::{domain, Result};
use crate::potential::{Ensemble, Profile, RadialPotential};
use crate::special_fn::{ln_barnes_g, ln_factorial, ln_gamma};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleModel {
    MittagLeffler { lambda: f64, c: f64 },
    TruncatedUnitary { alpha: f64, radius: f64 },
}

/// m with m·x = 1 for a positive integer m, if x is the reciprocal of one.
fn reciprocal_integer(x: f64) -> Option<u32> {
    let m = (1.0 / x).round();
    if (1.0..1e6).contains(&m) && (m * x - 1.0).abs() < 1e-12 {
        Some(m as u32)
    } else {
        None
    }
}

fn check_n(n: usize) -> Result<f64> {
    if n == 0 {
        Err(domain("N must be at least 1"))
    } else {
        Ok(n as f64)
    }
}

fn check_ml(lambda: f64, c: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(domain(format!("c must be nonnegative, got {c}")));
    }
    Ok(())
}

fn check_tu(alpha: f64, radius: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && radius.is_finite() && radius > 0.0) {
        return Err(domain(format!(
            "alpha and R must be positive, got alpha = {alpha}, R = {radius}"
        )));
    }
    Ok(())
}

/// log Z_N for q(r) = r^{2λ} − 2c log r; needs 1/λ ∈ ℕ (normal) or 2/λ ∈ ℕ (symplectic).
pub fn ml_log_z(lambda: f64, c: f64, n: usize, ensemble: Ensemble) -> Result<f64> {
    check_ml(lambda, c)?;
    let nf = check_n(n)?;
    let mut acc = CompensatedSum::new();
    acc += ln_factorial(n as u64);
    match ensemble {
        Ensemble::Normal => {
            let m = reciprocal_integer(lambda).ok_or_else(|| {
                domain(format!(
                    "the closed form needs 1/lambda in N, got lambda = {lambda}"
                ))
            })?;
            let inv = 1.0 / lambda;
            acc += -((2.0 * c + 1.0) * nf * nf + nf) / (2.0 * lambda) * nf.ln();
            acc += (0.5 - 0.5 * inv) * nf * (2.0 * PI).ln();
            acc += ((0.5 * inv + c * inv) * nf * nf + (inv + 0.5 - 0.5 * inv) * nf) * inv.ln();
            for k in 0..m {
                let shift = nf * c + 1.0 + lambda * k as f64;
                acc += ln_barnes_g(nf + shift)?;
                acc += -ln_barnes_g(shift)?;
            }
        }
        Ensemble::Symplectic => {
            let m = reciprocal_integer(lambda / 2.0).ok_or_else(|| {
                domain(format!(
                    "the closed form needs 2/lambda in N, got lambda = {lambda}"
                ))
            })?;
            let inv = 1.0 / lambda;
            acc += -((2.0 * c + 1.0) * nf * nf + nf) * inv * (2.0 * nf).ln();
            acc += (0.5 - inv) * nf * (2.0 * PI).ln();
            acc +=
                ((inv + 2.0 * c * inv) * nf * nf + (2.0 * inv + 0.5 - inv) * nf) * (2.0 * inv).ln();
            for k in 0..m {
                let shift = nf * c + 1.0 + 0.5 * lambda * k as f64;
                acc += ln_barnes_g(nf + shift)?;
                acc += -ln_barnes_g(shift)?;
            }
        }
    }
    Ok(acc.value())
}

/// log Z_N for the truncated-unitary weight (1 − r²/(R²(1+α)))^{αN}.
pub fn tu_log_z(alpha: f64, radius: f64, n: usize, ensemble: Ensemble) -> Result<f64> {
    check_tu(alpha, radius)?;
    let nf = check_n(n)?;
    let an = alpha * nf;
    let g = ln_barnes_g;
    let mut acc = CompensatedSum::new();
    acc += ln_factorial(n as u64);
    match ensemble {
        Ensemble::Normal => {
            acc += nf * (nf + 1.0) * radius.ln();
            acc += 0.5 * (nf * nf + nf) * alpha.ln_1p();
            acc += nf * ln_gamma(an + 1.0)?;
            acc += g(nf + 1.0)?;
            acc += g(an + 2.0)?;
            acc += -g(an + nf + 2.0)?;
        }
        Ensemble::Symplectic => {
            acc += 2.0 * nf * (nf + 1.0) * radius.ln();
            acc += -2.0 * an * nf * LN_2;
            acc += (nf * nf + nf) * alpha.ln_1p();
            acc += nf * ln_gamma(2.0 * an + 1.0)?;
            acc += g(nf + 1.0)?;
            acc += g(nf + 1.5)?;
            acc += -g(1.5)?;
            acc += g(an + 2.0)?;
            acc += -g(an + nf + 2.0)?;
            acc += g(an + 1.5)?;
            acc += -g(an + nf + 1.5)?;
        }
    }
    Ok(acc.value())
}

/// log h_j for the ML weight e^{-sQ}, s = N or 2N, as a single Gamma value.
pub fn ml_log_norm(lambda: f64, c: f64, n: usize, j: usize, ensemble: Ensemble) -> Result<f64> {
    check_ml(lambda, c)?;
    check_n(n)?;
    let s = ensemble.weight_scale(n);
    let a = (j as f64 + 1.0 + c * s) / lambda;
    Ok(-lambda.ln() - a * s.ln() + ln_gamma(a)?)
}

/// log h_j for the truncated-unitary weight e^{-sQ} (Euler's beta integral).
pub fn tu_log_norm(alpha: f64, radius: f64, n: usize, j: usize, ensemble: Ensemble) -> Result<f64> {
    check_tu(alpha, radius)?;
    check_n(n)?;
    let b = alpha * ensemble.weight_scale(n);
    let jf = j as f64;
    Ok((jf + 1.0) * (radius * radius * (1.0 + alpha)).ln()
        + ln_gamma(jf + 1.0)?
        + ln_gamma(b + 1.0)?
        - ln_gamma(b + jf + 2.0)?)
}

/// Equilibrium quantities of the Mittag-Leffler potential (annulus, c > 0).
pub fn ml_equilibrium(lambda: f64, c: f64) -> Result<EquilibriumReport> {
    check_ml(lambda, c)?;
    if c == 0.0 {
        return Err(domain(
            "the Mittag-Leffler closed forms describe the annulus droplet and need c > 0",
        ));
    }
    let l = lambda;
    let log_c = c.ln();
    let log_c1 = c.ln_1p();
    // c log c − (1+c) log(1+c) and its squared-weight analogue
    let energy = (c * c * log_c - (1.0 + c) * (1.0 + c) * log_c1) / (2.0 * l)
        + (1.0 + 2.0 * c) / (2.0 * l) * (l.ln() + 1.5);
    let entropy = (1.0 + l) / l * l.ln() + (1.0 - l) / l * (1.0 + c * log_c - (1.0 + c) * log_c1);
    let u0 = -((1.0 + c) / l).ln() / (2.0 * l) + 1.0 / (2.0 * l) - c / (2.0 * l) * (log_c1 - log_c);
    let f = -(l * l - 3.0 * l + 1.0) / (12.0 * l) * (log_c - log_c1);
    let exp = 1.0 / (2.0 * l);
    Ok(EquilibriumReport {
        energy,
        entropy,
        log_potential_origin: u0,
        f_term: f,
        mass: 1.0,
        droplet: Droplet {
            r0: (c / l).powf(exp),
            r1: ((1.0 + c) / l).powf(exp),
            kind: DropletKind::Annulus,
        },
    })
}

/// Equilibrium quantities of the truncated-unitary potential (disc of radius R).
pub fn tu_equilibrium(alpha: f64, radius: f64) -> Result<EquilibriumReport> {
    check_tu(alpha, radius)?;
    let a = alpha;
    let log_ratio = (a / (1.0 + a)).ln();
    let log_r = radius.ln();
    Ok(EquilibriumReport {
        energy: -a / 2.0 - a * (2.0 + a) / 2.0 * log_ratio - log_r,
        entropy: -2.0 - (1.0 + 2.0 * a) * log_ratio - 2.0 * log_r,
        log_potential_origin: -log_r - a / 2.0 * log_ratio,
        f_term: (1.0 / a + 5.0 * log_ratio) / 12.0,
        mass: 1.0,
        droplet: Droplet {
            r0: 0.0,
            r1: radius,
            kind: DropletKind::Disc,
        },
    })
}

impl OracleModel {
    /// The closed-form model matching `p`, when there is one. Ginibre with
    /// scale s is the λ = 1, c = 0 model dilated by s.
    pub fn for_potential(p: &RadialPotential) -> Option<(OracleModel, f64)> {
        match p.profile() {
            Profile::Ginibre { scale } => Some((
                OracleModel::MittagLeffler {
                    lambda: 1.0,
                    c: 0.0,
                },
                *scale,
            )),
            Profile::MittagLeffler { lambda, c } => Some((
                OracleModel::MittagLeffler {
                    lambda: *lambda,
                    c: *c,
                },
                1.0,
            )),
            Profile::TruncatedUnitary { alpha, radius } => Some((
                OracleModel::TruncatedUnitary {
                    alpha: *alpha,
                    radius: *radius,
                },
                1.0,
            )),
            Profile::Dilated { inner, factor } => {
                Self::for_potential(inner).map(|(m, a)| (m, a * factor))
            }
            Profile::Custom(_) => None,
        }
    }

    pub fn log_z(&self, n: usize, ensemble: Ensemble) -> Result<f64> {
        match *self {
            OracleModel::MittagLeffler { lambda, c } => ml_log_z(lambda, c, n, ensemble),
            OracleModel::TruncatedUnitary { alpha, radius } => tu_log_z(alpha, radius, n, ensemble),
        }
    }

    pub fn log_norm(&self, n: usize, j: usize, ensemble: Ensemble) -> Result<f64> {
        match *self {
            OracleModel::MittagLeffler { lambda, c } => ml_log_norm(lambda, c, n, j, ensemble),
            OracleModel::TruncatedUnitary { alpha, radius } => {
                tu_log_norm(alpha, radius, n, j, ensemble)
            }
        }
    }

    pub fn equilibrium(&self) -> Result<EquilibriumReport> {
        match *self {
            OracleModel::MittagLeffler { lambda, c } => ml_equilibrium(lambda, c),
            OracleModel::TruncatedUnitary { alpha, radius } => tu_equilibrium(alpha, radius),
        }
    }

    pub fn potential(&self) -> Result<RadialPotential> {
        match *self {
            OracleModel::MittagLeffler { lambda, c } => RadialPotential::mittag_leffler(lambda, c),
            OracleModel::TruncatedUnitary { alpha, radius } => {
                RadialPotential::truncated_unitary(alpha, radius)
            }
        }
    }
}

/// Closed-form log Z_N of `p` (physics convention), for the built-in families.
///
/// A dilation q(r/a) multiplies h_j by a^{2j+2}, which adds N(N+1) log a to
/// log Z_N, or 2N(N+1) log a on the odd symplectic grid.
pub fn closed_form_log_z(p: &RadialPotential, n: usize, ensemble: Ensemble) -> Result<f64> {
    let (model, a) = OracleModel::for_potential(p)
        .ok_or_else(|| domain("no closed form is known for a custom potential"))?;
    let nf = check_n(n)?;
    let shift = match ensemble {
        Ensemble::Normal => nf * (nf + 1.0),
        Ensemble::Symplectic => 2.0 * nf * (nf + 1.0),
    } * a.ln();
    Ok(model.log_z(n, ensemble)? + shift)
}

/// log Z_N assembled from closed-form norms, the second route to the same value.
pub fn log_z_from_norms(model: &OracleModel, n: usize, ensemble: Ensemble) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    acc += ln_factorial(check_n(n)? as u64);
    for j in 0..n {
        acc += match ensemble {
            Ensemble::Normal => model.log_norm(n, j, ensemble)?,
            Ensemble::Symplectic => LN_2 + model.log_norm(n, 2 * j + 1, ensemble)?,
        };
    }
    Ok(acc.value())
}
