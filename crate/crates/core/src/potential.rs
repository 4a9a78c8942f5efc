//! Radially symmetric potentials Q(z) = q(|z|).
//!
//! Throughout, ΔQ = ∂∂̄Q is a quarter of the usual Laplacian, so for a
//! radial profile ΔQ(r) = (q'(r)/r + q''(r)) / 4.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Which of the two β = 2 ensembles a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// Random normal matrices (determinantal), weight e^{-NQ}.
    Normal,
    /// Planar symplectic ensemble (Pfaffian), weight e^{-2NQ}.
    Symplectic,
}

impl Ensemble {
    /// Exponent scale s in the weight e^{-sQ}: N or 2N.
    pub fn weight_scale(self, n: usize) -> f64 {
        match self {
            Ensemble::Normal => n as f64,
            Ensemble::Symplectic => 2.0 * n as f64,
        }
    }
}

/// Fractional degree τ together with the grid it was taken from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauParams {
    pub tau: f64,
    pub kind: Ensemble,
}

impl TauParams {
    pub fn new(tau: f64, kind: Ensemble) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(domain(format!("tau must lie in [0, 1], got {tau}")));
        }
        Ok(Self { tau, kind })
    }

    /// τ(j) = j/N for the normal ensemble, τ̃(j) = j/(2N) for the symplectic one.
    pub fn for_degree(j: usize, n: usize, kind: Ensemble) -> Result<Self> {
        Self::new(j as f64 / kind.weight_scale(n), kind)
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type DerivFn = Arc<dyn Fn(f64, u8) -> f64 + Send + Sync>;

/// User-supplied radial profile.
///
/// Derivatives of order 1..=4 come from `derivatives` when given, otherwise
/// from central finite differences of `q`.
#[derive(Clone)]
pub struct CustomProfile {
    q: ScalarFn,
    derivatives: Option<DerivFn>,
}

impl CustomProfile {
    pub fn new(q: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            q: Arc::new(q),
            derivatives: None,
        }
    }

    /// Analytic q^{(k)}(r) for k = 1..=4.
    pub fn with_derivatives(mut self, d: impl Fn(f64, u8) -> f64 + Send + Sync + 'static) -> Self {
        self.derivatives = Some(Arc::new(d));
        self
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.derivatives.is_some()
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile")
            .field("analytic_derivatives", &self.derivatives.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Profile {
    /// q(r) = (r / scale)².
    Ginibre {
        scale: f64,
    },
    /// q(r) = r^{2λ} − 2c log r.
    MittagLeffler {
        lambda: f64,
        c: f64,
    },
    /// q(r) = −α log(1 − r² / (R²(1 + α))) for r < R√(1 + α), +∞ beyond.
    TruncatedUnitary {
        alpha: f64,
        radius: f64,
    },
    Custom(CustomProfile),
    /// q_a(r) = q(r / a).
    Dilated {
        inner: Arc<RadialPotential>,
        factor: f64,
    },
}

/// Values of q and ΔQ at the origin, for potentials that are smooth there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OriginValues {
    pub q: f64,
    pub q2: f64,
    pub laplacian: f64,
}

#[derive(Debug, Clone)]
pub struct RadialPotential {
    profile: Profile,
    support_radius: Option<f64>,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// d^k/dr^k of r^p.
fn power_deriv(p: f64, r: f64, k: u8) -> f64 {
    let mut coef = 1.0;
    for i in 0..k {
        coef *= p - i as f64;
    }
    if coef == 0.0 {
        0.0
    } else {
        coef * r.powf(p - k as f64)
    }
}

/// d^k/dr^k of log r.
fn log_deriv(r: f64, k: u8) -> f64 {
    match k {
        0 => r.ln(),
        1 => 1.0 / r,
        2 => -1.0 / (r * r),
        3 => 2.0 / (r * r * r),
        _ => -6.0 / (r * r * r * r),
    }
}

fn finite_difference(f: &dyn Fn(f64) -> f64, r: f64, order: u8, limit: f64) -> f64 {
    let eps = f64::EPSILON;
    let scale = r.max(1.0);
    let reach = if order >= 3 { 2.0 } else { 1.0 };
    let mut h = scale * eps.powf(1.0 / (order as f64 + 2.0));
    h = h.min(r / (2.0 * reach));
    if limit.is_finite() {
        h = h.min((limit - r) / (2.0 * reach));
    }
    match order {
        1 => (f(r + h) - f(r - h)) / (2.0 * h),
        2 => (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h),
        3 => {
            (f(r + 2.0 * h) - 2.0 * f(r + h) + 2.0 * f(r - h) - f(r - 2.0 * h)) / (2.0 * h * h * h)
        }
        _ => {
            (f(r + 2.0 * h) - 4.0 * f(r + h) + 6.0 * f(r) - 4.0 * f(r - h) + f(r - 2.0 * h))
                / (h * h * h * h)
        }
    }
}

impl RadialPotential {
    pub fn ginibre(scale: f64) -> Result<Self> {
        Ok(Self {
            profile: Profile::Ginibre {
                scale: positive("scale", scale)?,
            },
            support_radius: None,
        })
    }

    /// Mittag-Leffler potential; `c = 0` is allowed (disc droplet).
    pub fn mittag_leffler(lambda: f64, c: f64) -> Result<Self> {
        let lambda = positive("lambda", lambda)?;
        if !(c.is_finite() && c >= 0.0) {
            return Err(domain(format!("c must be nonnegative and finite, got {c}")));
        }
        Ok(Self {
            profile: Profile::MittagLeffler { lambda, c },
            support_radius: None,
        })
    }

    pub fn truncated_unitary(alpha: f64, radius: f64) -> Result<Self> {
        let alpha = positive("alpha", alpha)?;
        let radius = positive("R", radius)?;
        Ok(Self {
            profile: Profile::TruncatedUnitary { alpha, radius },
            support_radius: Some(radius * (1.0 + alpha).sqrt()),
        })
    }

    pub fn custom(profile: CustomProfile, support_radius: Option<f64>) -> Result<Self> {
        if let Some(r) = support_radius {
            positive("support_radius", r)?;
        }
        Ok(Self {
            profile: Profile::Custom(profile),
            support_radius,
        })
    }

    /// Q_a(z) = Q(z / a).
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        let factor = positive("dilation factor", factor)?;
        Ok(Self {
            support_radius: self.support_radius.map(|r| r * factor),
            profile: Profile::Dilated {
                inner: Arc::new(self.clone()),
                factor,
            },
        })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    /// Whether `r` lies strictly inside the support (always true without a hard edge).
    pub fn in_support(&self, r: f64) -> bool {
        self.support_radius.is_none_or(|s| r < s)
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(domain(format!("radius must be positive, got {r}")));
        }
        if !self.in_support(r) {
            return Err(domain(format!(
                "radius {r} lies outside the support radius {}",
                self.support_radius.unwrap_or(f64::INFINITY)
            )));
        }
        Ok(())
    }

    /// q^{(order)}(r) without argument checks; +∞/NaN outside the support.
    pub(crate) fn q_raw(&self, r: f64, order: u8) -> f64 {
        match &self.profile {
            Profile::Ginibre { scale } => {
                let s2 = scale * scale;
                match order {
                    0 => r * r / s2,
                    1 => 2.0 * r / s2,
                    2 => 2.0 / s2,
                    _ => 0.0,
                }
            }
            Profile::MittagLeffler { lambda, c } => {
                let pow = power_deriv(2.0 * lambda, r, order);
                if *c == 0.0 {
                    pow
                } else {
                    pow - 2.0 * c * log_deriv(r, order)
                }
            }
            Profile::TruncatedUnitary { alpha, radius } => {
                // q = −α[log(1 − r/a) + log(1 + r/a)], a = R√(1+α)
                let a = radius * (1.0 + alpha).sqrt();
                if r >= a {
                    return f64::INFINITY;
                }
                let m = a - r;
                let p = a + r;
                match order {
                    0 => -alpha * ((-r / a).ln_1p() + (r / a).ln_1p()),
                    1 => alpha * (1.0 / m - 1.0 / p),
                    2 => alpha * (1.0 / (m * m) + 1.0 / (p * p)),
                    3 => 2.0 * alpha * (1.0 / (m * m * m) - 1.0 / (p * p * p)),
                    _ => 6.0 * alpha * (1.0 / (m * m * m * m) + 1.0 / (p * p * p * p)),
                }
            }
            Profile::Custom(custom) => {
                if order == 0 {
                    return (custom.q)(r);
                }
                match &custom.derivatives {
                    Some(d) => d(r, order),
                    None => finite_difference(
                        &*custom.q,
                        r,
                        order,
                        self.support_radius.unwrap_or(f64::INFINITY),
                    ),
                }
            }
            Profile::Dilated { inner, factor } => {
                inner.q_raw(r / factor, order) / factor.powi(order as i32)
            }
        }
    }

    /// ∂_r^order ΔQ(r) for order 0..=2, without argument checks.
    pub(crate) fn laplacian_raw(&self, r: f64, order: u8) -> f64 {
        match &self.profile {
            Profile::Ginibre { scale } => {
                if order == 0 {
                    1.0 / (scale * scale)
                } else {
                    0.0
                }
            }
            Profile::MittagLeffler { lambda, .. } => {
                lambda * lambda * power_deriv(2.0 * lambda - 2.0, r, order)
            }
            Profile::TruncatedUnitary { alpha, radius } => {
                let k = radius * radius * alpha * (1.0 + alpha);
                let d = radius * radius * (1.0 + alpha) - r * r;
                match order {
                    0 => k / (d * d),
                    1 => 4.0 * k * r / (d * d * d),
                    _ => 4.0 * k / (d * d * d) + 24.0 * k * r * r / (d * d * d * d),
                }
            }
            Profile::Custom(_) => {
                let q1 = self.q_raw(r, 1);
                let q2 = self.q_raw(r, 2);
                match order {
                    0 => (q1 / r + q2) / 4.0,
                    1 => {
                        let q3 = self.q_raw(r, 3);
                        (q2 / r - q1 / (r * r) + q3) / 4.0
                    }
                    _ => {
                        let q3 = self.q_raw(r, 3);
                        let q4 = self.q_raw(r, 4);
                        (q3 / r - 2.0 * q2 / (r * r) + 2.0 * q1 / (r * r * r) + q4) / 4.0
                    }
                }
            }
            Profile::Dilated { inner, factor } => {
                inner.laplacian_raw(r / factor, order) / factor.powi(2 + order as i32)
            }
        }
    }

    /// d^order q / dr^order at r, order ≤ 4.
    pub fn q_derivs(&self, r: f64, order: u8) -> Result<f64> {
        if order > 4 {
            return Err(Error::UnsupportedOrder(order));
        }
        self.check_radius(r)?;
        Ok(self.q_raw(r, order))
    }

    pub fn laplacian(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let v = self.laplacian_raw(r, 0);
        if !(v > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "ΔQ({r}) = {v} is not positive"
            )));
        }
        Ok(v)
    }

    pub fn laplacian_dr(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.laplacian_raw(r, 1))
    }

    pub fn laplacian_dr2(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.laplacian_raw(r, 2))
    }

    /// r q'(r), the quantity whose level sets define r_τ.
    pub(crate) fn rq_prime(&self, r: f64) -> f64 {
        r * self.q_raw(r, 1)
    }

    /// V_τ^{(order)}(r) where V_τ(r) = q(r) − 2τ log r.
    pub fn v_tau(&self, tp: TauParams, r: f64, order: u8) -> Result<f64> {
        if order > 4 {
            return Err(Error::UnsupportedOrder(order));
        }
        self.check_radius(r)?;
        Ok(self.v_tau_raw(tp.tau, r, order))
    }

    pub(crate) fn v_tau_raw(&self, tau: f64, r: f64, order: u8) -> f64 {
        let q = self.q_raw(r, order);
        if tau == 0.0 {
            q
        } else {
            q - 2.0 * tau * log_deriv(r, order)
        }
    }

    /// q(0), when finite.
    pub fn q_origin(&self) -> Result<f64> {
        let v = match &self.profile {
            Profile::Ginibre { .. } | Profile::TruncatedUnitary { .. } => 0.0,
            Profile::MittagLeffler { c, .. } => {
                if *c > 0.0 {
                    return Err(domain(
                        "q has a logarithmic singularity at the origin (c > 0)",
                    ));
                }
                0.0
            }
            Profile::Custom(custom) => (custom.q)(0.0),
            Profile::Dilated { inner, .. } => inner.q_origin()?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain(format!("q(0) = {v} is not finite")))
        }
    }

    /// q(0), q''(0) and ΔQ(0) for potentials smooth and strictly subharmonic at 0.
    pub fn origin_values(&self) -> Result<OriginValues> {
        let vals = match &self.profile {
            Profile::Ginibre { scale } => {
                let s2 = scale * scale;
                OriginValues {
                    q: 0.0,
                    q2: 2.0 / s2,
                    laplacian: 1.0 / s2,
                }
            }
            Profile::MittagLeffler { lambda, c } => {
                if *c > 0.0 {
                    return Err(domain(
                        "q has a logarithmic singularity at the origin (c > 0)",
                    ));
                }
                if *lambda != 1.0 {
                    return Err(domain(format!(
                        "ΔQ(0) is {} for λ = {lambda}; the origin is not a regular point",
                        if *lambda > 1.0 { "zero" } else { "infinite" }
                    )));
                }
                OriginValues {
                    q: 0.0,
                    q2: 2.0,
                    laplacian: 1.0,
                }
            }
            Profile::TruncatedUnitary { alpha, radius } => {
                let d0 = radius * radius * (1.0 + alpha);
                OriginValues {
                    q: 0.0,
                    q2: 2.0 * alpha / d0,
                    laplacian: alpha / d0,
                }
            }
            Profile::Custom(custom) => {
                let q0 = (custom.q)(0.0);
                let q2 = match &custom.derivatives {
                    Some(d) => d(0.0, 2),
                    None => {
                        // q is even in r when Q is smooth at 0
                        let h = f64::EPSILON.powf(0.25);
                        2.0 * ((custom.q)(h) - q0) / (h * h)
                    }
                };
                OriginValues {
                    q: q0,
                    q2,
                    laplacian: q2 / 2.0,
                }
            }
            Profile::Dilated { inner, factor } => {
                let v = inner.origin_values()?;
                let a2 = factor * factor;
                OriginValues {
                    q: v.q,
                    q2: v.q2 / a2,
                    laplacian: v.laplacian / a2,
                }
            }
        };
        if !(vals.q.is_finite() && vals.q2.is_finite() && vals.laplacian > 0.0) {
            return Err(domain(format!(
                "potential is not smooth and strictly subharmonic at the origin: {vals:?}"
            )));
        }
        Ok(vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn q_derivs_examples() {
        let g = RadialPotential::ginibre(1.0).unwrap();
        assert!((g.q_derivs(0.7, 1).unwrap() - 1.4).abs() < 1e-15);
        let ml = RadialPotential::mittag_leffler(1.0, 1.0).unwrap();
        assert!(ml.q_derivs(1.0, 1).unwrap().abs() < 1e-15);
        let tu = RadialPotential::truncated_unitary(1.0, 1.0).unwrap();
        assert!((tu.q_derivs(1.0, 0).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn q_derivs_errors() {
        let g = RadialPotential::ginibre(1.0).unwrap();
        assert_eq!(g.q_derivs(1.0, 5), Err(Error::UnsupportedOrder(5)));
        assert!(matches!(g.q_derivs(0.0, 0), Err(Error::Domain(_))));
        assert!(matches!(g.q_derivs(-1.0, 1), Err(Error::Domain(_))));
        let tu = RadialPotential::truncated_unitary(1.0, 1.0).unwrap();
        assert!(matches!(tu.q_derivs(2f64.sqrt(), 0), Err(Error::Domain(_))));
        assert!(matches!(tu.q_derivs(1.5, 0), Err(Error::Domain(_))));
        assert!(RadialPotential::ginibre(0.0).is_err());
        assert!(RadialPotential::mittag_leffler(1.0, -1.0).is_err());
        assert!(RadialPotential::truncated_unitary(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let g = RadialPotential::ginibre(1.0).unwrap();
        for r in [0.1, 0.5, 3.0] {
            assert_eq!(g.laplacian(r).unwrap(), 1.0);
            assert_eq!(g.laplacian_dr(r).unwrap(), 0.0);
        }
        let ml = RadialPotential::mittag_leffler(2.0, 0.5).unwrap();
        assert!((ml.laplacian(1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((ml.laplacian_dr(1.0).unwrap() - 8.0).abs() < 1e-14);
        let tu = RadialPotential::truncated_unitary(1.0, 1.0).unwrap();
        assert!((tu.laplacian(1.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((tu.laplacian_dr(1.0).unwrap() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn laplacian_matches_chain_rule_from_q() {
        let pots = [
            RadialPotential::ginibre(1.7).unwrap(),
            RadialPotential::mittag_leffler(2.0, 0.5).unwrap(),
            RadialPotential::mittag_leffler(0.5, 1.0).unwrap(),
            RadialPotential::truncated_unitary(1.3, 0.8).unwrap(),
        ];
        for p in &pots {
            for r in [0.2, 0.5, 0.9] {
                let q1 = p.q_raw(r, 1);
                let q2 = p.q_raw(r, 2);
                let q3 = p.q_raw(r, 3);
                let q4 = p.q_raw(r, 4);
                let l0 = (q1 / r + q2) / 4.0;
                let l1 = (q2 / r - q1 / (r * r) + q3) / 4.0;
                let l2 = (q3 / r - 2.0 * q2 / (r * r) + 2.0 * q1 / (r * r * r) + q4) / 4.0;
                assert!(rel(p.laplacian_raw(r, 0), l0) < 1e-12, "{p:?} r={r}");
                assert!((p.laplacian_raw(r, 1) - l1).abs() < 1e-11 * (1.0 + l1.abs()));
                assert!((p.laplacian_raw(r, 2) - l2).abs() < 1e-10 * (1.0 + l2.abs()));
            }
        }
    }

    #[test]
    fn v_tau_examples() {
        let g = RadialPotential::ginibre(1.0).unwrap();
        let tp = TauParams::new(0.25, Ensemble::Normal).unwrap();
        let v = g.v_tau(tp, 0.5, 0).unwrap();
        assert!((v - (0.25 - 0.5 * 0.5f64.ln())).abs() < 1e-15);
        assert!(g.v_tau(tp, 0.5, 1).unwrap().abs() < 1e-15);
        let tp1 = TauParams::new(1.0, Ensemble::Normal).unwrap();
        assert!((g.v_tau(tp1, 1.0, 2).unwrap() - 4.0).abs() < 1e-15);
        let ml = RadialPotential::mittag_leffler(1.0, 1.0).unwrap();
        assert!(ml.v_tau(tp1, 2f64.sqrt(), 1).unwrap().abs() < 1e-14);
        assert!(TauParams::new(1.5, Ensemble::Normal).is_err());
        let t = TauParams::for_degree(3, 10, Ensemble::Symplectic).unwrap();
        assert_eq!(t.tau, 0.15);
    }

    #[test]
    fn v_tau_identities() {
        // V'' = 4ΔQ − V'/r, V''' = 4ΔQ' − 4ΔQ/r + 2V'/r²,
        // V'''' = 4ΔQ'' + 12ΔQ/r² − 4ΔQ'/r − 6V'/r³
        let pots = [
            RadialPotential::mittag_leffler(1.5, 0.7).unwrap(),
            RadialPotential::truncated_unitary(2.0, 1.0).unwrap(),
        ];
        for p in &pots {
            for tau in [0.0, 0.3, 1.0] {
                let tp = TauParams::new(tau, Ensemble::Normal).unwrap();
                for r in [0.3, 0.8, 1.1] {
                    let v1 = p.v_tau(tp, r, 1).unwrap();
                    let v2 = p.v_tau(tp, r, 2).unwrap();
                    let v3 = p.v_tau(tp, r, 3).unwrap();
                    let v4 = p.v_tau(tp, r, 4).unwrap();
                    let l0 = p.laplacian(r).unwrap();
                    let l1 = p.laplacian_dr(r).unwrap();
                    let l2 = p.laplacian_dr2(r).unwrap();
                    assert!(rel(v2, 4.0 * l0 - v1 / r) < 1e-12);
                    let w3 = 4.0 * l1 - 4.0 * l0 / r + 2.0 * v1 / (r * r);
                    assert!((v3 - w3).abs() < 1e-11 * (1.0 + v3.abs()));
                    let w4 = 4.0 * l2 + 12.0 * l0 / (r * r) - 4.0 * l1 / r - 6.0 * v1 / (r * r * r);
                    assert!((v4 - w4).abs() < 1e-10 * (1.0 + v4.abs()));
                }
            }
        }
    }

    #[test]
    fn custom_finite_differences_track_analytic() {
        let custom = CustomProfile::new(|r: f64| r.powi(4) / 4.0 + r * r / 2.0);
        let p = RadialPotential::custom(custom, None).unwrap();
        for r in [0.3f64, 1.0, 2.5] {
            let exact = [r.powi(3) + r, 3.0 * r * r + 1.0, 6.0 * r, 6.0];
            for (k, want) in exact.iter().enumerate() {
                let got = p.q_derivs(r, k as u8 + 1).unwrap();
                assert!(
                    rel(got, *want) < 1e-4,
                    "order {} r={r}: {got} vs {want}",
                    k + 1
                );
            }
        }
        let o = p.origin_values().unwrap();
        assert!((o.q2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn origin_values() {
        let tu = RadialPotential::truncated_unitary(1.0, 1.0).unwrap();
        let o = tu.origin_values().unwrap();
        assert_eq!(o.q, 0.0);
        assert!((o.q2 - 1.0).abs() < 1e-15);
        assert!((o.laplacian - 0.5).abs() < 1e-15);
        assert!(RadialPotential::mittag_leffler(1.0, 1.0)
            .unwrap()
            .origin_values()
            .is_err());
        assert!(RadialPotential::mittag_leffler(2.0, 0.0)
            .unwrap()
            .origin_values()
            .is_err());
        let g = RadialPotential::ginibre(1.0).unwrap().dilated(2.0).unwrap();
        assert!((g.origin_values().unwrap().laplacian - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dilation_rescales_derivatives() {
        let p = RadialPotential::truncated_unitary(1.0, 1.0).unwrap();
        let a = 3.0;
        let d = p.dilated(a).unwrap();
        assert!((d.support_radius().unwrap() - a * 2f64.sqrt()).abs() < 1e-15);
        for k in 0..=4u8 {
            let want = p.q_raw(0.4, k) / a.powi(k as i32);
            assert!(rel(d.q_raw(1.2, k), want) < 1e-14 || want == 0.0);
        }
        assert!(rel(d.laplacian(1.2).unwrap(), p.laplacian(0.4).unwrap() / 9.0) < 1e-14);
    }
}
