//! Functionals of the equilibrium measure dμ_Q = ΔQ · 1_S dA.
//!
//! Radial integrals are written in the variable r with dA/π = 2r dr, except
//! the Zabrodin–Wiegmann coefficients which are integrated in x = r².

use serde::Serialize;

use crate::droplet::{droplet_of, Droplet};
use crate::error::{domain, Error, Result};
use crate::potential::RadialPotential;
use crate::quadrature::Quadrature;

/// Allowed deviation of ∫ dμ_Q from 1.
const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumReport {
    /// I_Q[μ_Q]
    pub energy: f64,
    /// E_Q[μ_Q]
    pub entropy: f64,
    /// U_{μ_Q}(0)
    pub log_potential_origin: f64,
    /// F_Q of the annulus or disc, by droplet kind
    pub f_term: f64,
    /// ∫ dμ_Q, which must be 1
    pub mass: f64,
    pub droplet: Droplet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZwCoefficients {
    pub f0: f64,
    pub f_half: f64,
    pub f1: f64,
}

/// Both sides of the identity for ∫ 𝔅₁ dμ_Q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct B1Integral {
    pub direct: f64,
    pub identity: f64,
}

/// A potential together with its droplet and the quadrature settings used
/// for every integral.
#[derive(Debug, Clone)]
pub struct Equilibrium<'a> {
    p: &'a RadialPotential,
    droplet: Droplet,
    quad: Quadrature,
}

impl<'a> Equilibrium<'a> {
    pub fn new(p: &'a RadialPotential) -> Result<Self> {
        Self::with_quadrature(p, Quadrature::default())
    }

    pub fn with_quadrature(p: &'a RadialPotential, quad: Quadrature) -> Result<Self> {
        Ok(Self {
            p,
            droplet: droplet_of(p)?,
            quad,
        })
    }

    pub fn droplet(&self) -> Droplet {
        self.droplet
    }

    pub fn potential(&self) -> &RadialPotential {
        self.p
    }

    // Disc integrals start at r = 0 itself; the Kronrod nodes are interior,
    // so the integrands are never evaluated at the origin.
    fn integrate(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        Ok(self
            .quad
            .integrate(f, self.droplet.r0, self.droplet.r1)?
            .value)
    }

    fn require_annulus(&self, what: &str) -> Result<()> {
        if self.droplet.is_disc() {
            Err(domain(format!("{what} requires an annulus droplet")))
        } else {
            Ok(())
        }
    }

    fn require_disc(&self, what: &str) -> Result<()> {
        if self.droplet.is_disc() {
            Ok(())
        } else {
            Err(domain(format!("{what}: a disc droplet is required")))
        }
    }

    /// ∫ 2r ΔQ dr over the droplet.
    pub fn mass(&self) -> Result<f64> {
        let p = self.p;
        self.integrate(|r| 2.0 * r * p.laplacian_raw(r, 0))
    }

    /// I_Q[μ_Q] = q(r₁) − log r₁ − ¼ ∫ r q'(r)² dr.
    pub fn energy(&self) -> Result<f64> {
        let p = self.p;
        let r1 = self.droplet.r1;
        let integral = self.integrate(|r| {
            let q1 = p.q_raw(r, 1);
            r * q1 * q1
        })?;
        Ok(p.q_raw(r1, 0) - r1.ln() - 0.25 * integral)
    }

    /// U_{μ_Q}(0) = −log r₁ + (q(r₁) − q(r₀)) / 2.
    pub fn log_potential_origin(&self) -> Result<f64> {
        let r1 = self.droplet.r1;
        let q0 = if self.droplet.is_disc() {
            self.p.q_origin()?
        } else {
            self.p.q_raw(self.droplet.r0, 0)
        };
        Ok(-r1.ln() + 0.5 * (self.p.q_raw(r1, 0) - q0))
    }

    /// E_Q[μ_Q] = ∫ log ΔQ dμ_Q.
    pub fn entropy(&self) -> Result<f64> {
        let p = self.p;
        self.integrate(|r| {
            let l = p.laplacian_raw(r, 0);
            2.0 * r * l * l.ln()
        })
    }

    /// (∂_rΔQ / ΔQ)² r, the integrand shared by both F_Q formulas.
    fn f_integrand(&self, r: f64) -> f64 {
        let l = self.p.laplacian_raw(r, 0);
        let l1 = self.p.laplacian_raw(r, 1);
        let t = l1 / l;
        t * t * r
    }

    fn edge_term(&self, r: f64) -> (f64, f64) {
        let l = self.p.laplacian_raw(r, 0);
        let l1 = self.p.laplacian_raw(r, 1);
        ((r * r * l).ln(), r * l1 / l)
    }

    /// F_Q for an annulus droplet.
    pub fn f_annulus(&self) -> Result<f64> {
        self.require_annulus("F_Q of an annulus")?;
        let (log0, d0) = self.edge_term(self.droplet.r0);
        let (log1, d1) = self.edge_term(self.droplet.r1);
        let integral = self.integrate(|r| self.f_integrand(r))?;
        Ok((log0 - log1) / 12.0 - (d1 - d0) / 16.0 + integral / 24.0)
    }

    /// Fails when (∂_rΔQ/ΔQ)² r is not integrable at the origin.
    fn check_disc_integrable(&self) -> Result<()> {
        let r = 1e-8 * self.droplet.r1;
        let t = r * self.f_integrand(r);
        if !(t.is_finite() && t < 1e-6) {
            return Err(Error::Integration(
                "∫ (∂_rΔQ/ΔQ)² r dr diverges at the origin (ΔQ degenerates at 0)".into(),
            ));
        }
        Ok(())
    }

    /// F_Q for a disc droplet.
    pub fn f_disc(&self) -> Result<f64> {
        self.require_disc("F_Q of a disc")?;
        self.check_disc_integrable()?;
        let (log1, d1) = self.edge_term(self.droplet.r1);
        let integral = self.integrate(|r| self.f_integrand(r))?;
        Ok(-log1 / 12.0 - d1 / 16.0 + integral / 24.0)
    }

    /// F_Q for a disc written through χ = ½ log ΔQ, with each piece integrated separately.
    pub fn f_disc_chi_form(&self) -> Result<f64> {
        self.require_disc("F_Q of a disc")?;
        self.check_disc_integrable()?;
        let p = self.p;
        let r1 = self.droplet.r1;
        let chi1 = |r: f64| 0.5 * p.laplacian_raw(r, 1) / p.laplacian_raw(r, 0);
        let chi2 = |r: f64| {
            let l = p.laplacian_raw(r, 0);
            let t = p.laplacian_raw(r, 1) / l;
            0.5 * (p.laplacian_raw(r, 2) / l - t * t)
        };
        let chi_r1 = 0.5 * p.laplacian_raw(r1, 0).ln();
        let laplacian_chi = self.integrate(|r| (chi2(r) + chi1(r) / r) / 4.0 * 2.0 * r)?;
        let dirichlet = self.integrate(|r| {
            let c = chi1(r);
            c * c * 2.0 * r
        })?;
        Ok((1.0 / (r1 * r1)).ln() / 12.0 - chi_r1 / 6.0 - laplacian_chi / 4.0 + dirichlet / 12.0)
    }

    /// F_Q of whichever droplet the potential has.
    pub fn f_term(&self) -> Result<f64> {
        if self.droplet.is_disc() {
            self.f_disc()
        } else {
            self.f_annulus()
        }
    }

    /// ∫ 𝔅₁ dμ_Q by quadrature and by the closed-form identity.
    pub fn b1_integral(&self) -> Result<B1Integral> {
        self.require_annulus("the 𝔅₁ integral identity")?;
        let p = self.p;
        let direct = self.integrate(|r| b1_raw(p, r) * 2.0 * r * p.laplacian_raw(r, 0))?;
        let (r0, r1) = (self.droplet.r0, self.droplet.r1);
        let identity = self.f_annulus()?
            - 0.25 * (p.laplacian_raw(r1, 0) / p.laplacian_raw(r0, 0)).ln()
            + (r1 / r0).ln() / 3.0;
        Ok(B1Integral { direct, identity })
    }

    /// Zabrodin–Wiegmann coefficients, integrated in x = r² over [0, r₁²].
    pub fn zw_coefficients(&self) -> Result<ZwCoefficients> {
        self.require_disc("the Zabrodin–Wiegmann coefficients")?;
        self.check_disc_integrable()?;
        let p = self.p;
        let r1 = self.droplet.r1;
        let x1 = r1 * r1;
        let lo = 0.0;
        // W_rad(x) = −q(√x), W_rad'(x)·x = −q'(√x)·√x / 2
        let f0 = self
            .quad
            .integrate(
                |x| {
                    let r = x.sqrt();
                    (-p.q_raw(r, 0) + 0.5 * p.q_raw(r, 1) * r * x.ln()) * p.laplacian_raw(r, 0)
                },
                lo,
                x1,
            )?
            .value;
        let f_half = -0.5
            * self
                .quad
                .integrate(
                    |x| {
                        let l = p.laplacian_raw(x.sqrt(), 0);
                        l * l.ln()
                    },
                    lo,
                    x1,
                )?
                .value;
        let chi_rad_prime = |x: f64| {
            let r = x.sqrt();
            p.laplacian_raw(r, 1) / (4.0 * r * p.laplacian_raw(r, 0))
        };
        let dirichlet = self
            .quad
            .integrate(
                |x| {
                    let c = chi_rad_prime(x);
                    x * c * c
                },
                lo,
                x1,
            )?
            .value;
        let chi_rad_x1 = 0.5 * p.laplacian_raw(r1, 0).ln();
        let f1 = (1.0 / x1).ln() / 12.0 - chi_rad_x1 / 6.0 - 0.25 * x1 * chi_rad_prime(x1)
            + dirichlet / 3.0;
        Ok(ZwCoefficients { f0, f_half, f1 })
    }

    pub fn report(&self) -> Result<EquilibriumReport> {
        let mass = self.mass()?;
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidPotential(format!(
                "equilibrium measure has mass {mass}, expected 1"
            )));
        }
        Ok(EquilibriumReport {
            energy: self.energy()?,
            entropy: self.entropy()?,
            log_potential_origin: self.log_potential_origin()?,
            f_term: self.f_term()?,
            mass,
            droplet: self.droplet,
        })
    }
}

pub(crate) fn b1_raw(p: &RadialPotential, r: f64) -> f64 {
    let l = p.laplacian_raw(r, 0);
    let l1 = p.laplacian_raw(r, 1);
    let l2 = p.laplacian_raw(r, 2);
    let l_sq = l * l;
    -l2 / (32.0 * l_sq) - 19.0 * l1 / (96.0 * r * l_sq)
        + 5.0 * l1 * l1 / (96.0 * l_sq * l)
        + 1.0 / (12.0 * r * r * l)
}

/// 𝔅₁(r), the first subleading coefficient in the norm asymptotics.
pub fn b1(p: &RadialPotential, r: f64) -> Result<f64> {
    p.laplacian(r)?;
    Ok(b1_raw(p, r))
}

pub fn energy(p: &RadialPotential) -> Result<f64> {
    Equilibrium::new(p)?.energy()
}

pub fn entropy(p: &RadialPotential) -> Result<f64> {
    Equilibrium::new(p)?.entropy()
}

pub fn log_potential_origin(p: &RadialPotential) -> Result<f64> {
    Equilibrium::new(p)?.log_potential_origin()
}

pub fn f_annulus(p: &RadialPotential) -> Result<f64> {
    Equilibrium::new(p)?.f_annulus()
}

pub fn f_disc(p: &RadialPotential) -> Result<f64> {
    Equilibrium::new(p)?.f_disc()
}

pub fn f_disc_chi_form(p: &RadialPotential) -> Result<f64> {
    Equilibrium::new(p)?.f_disc_chi_form()
}

pub fn b1_integral(p: &RadialPotential) -> Result<B1Integral> {
    Equilibrium::new(p)?.b1_integral()
}

pub fn zw_coefficients(p: &RadialPotential) -> Result<ZwCoefficients> {
    Equilibrium::new(p)?.zw_coefficients()
}

pub fn equilibrium_report(p: &RadialPotential) -> Result<EquilibriumReport> {
    Equilibrium::new(p)?.report()
}
