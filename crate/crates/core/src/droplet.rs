//! Droplet radii and the map τ ↦ r_τ.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::potential::RadialPotential;

const LOWER_START: f64 = 1e-12;
const DISC_PROBE: f64 = 1e-9;
const DISC_ROOT_FLOOR: f64 = 1e-8;
const MAX_BISECTIONS: usize = 200;
const REL_TOL: f64 = 1e-13;
/// Smallest τ at which dr/dτ is evaluated for a disc droplet.
pub const DISC_TAU_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DropletKind {
    Disc,
    Annulus,
}

impl std::fmt::Display for DropletKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DropletKind::Disc => "disc",
            DropletKind::Annulus => "annulus",
        })
    }
}

/// Support {r0 ≤ |z| ≤ r1} of the equilibrium measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Droplet {
    pub r0: f64,
    pub r1: f64,
    pub kind: DropletKind,
}

impl Droplet {
    pub fn is_disc(&self) -> bool {
        self.kind == DropletKind::Disc
    }
}

/// Largest radius that may be probed: just inside a hard edge, if any.
fn probe_ceiling(p: &RadialPotential) -> f64 {
    p.support_radius()
        .map_or(f64::INFINITY, |s| s * (1.0 - 4.0 * f64::EPSILON))
}

/// Upper bracket B with r q'(B) ≥ target.
fn upper_bracket(p: &RadialPotential, target: f64) -> Result<f64> {
    let ceiling = probe_ceiling(p);
    let mut b = 1.0f64.min(0.5 * ceiling);
    for _ in 0..2100 {
        let g = p.rq_prime(b);
        if g >= target {
            return Ok(b);
        }
        let next = 2.0 * b;
        b = if next < ceiling {
            next
        } else {
            0.5 * (b + ceiling)
        };
        if !b.is_finite() {
            break;
        }
    }
    Err(Error::InvalidPotential(format!(
        "r q'(r) never reaches {target}; no bracket for r_tau"
    )))
}

/// Bisect a monotone predicate: `below(lo)` holds, `below(hi)` does not.
/// Once the bracket is two adjacent floats, the endpoint with the smaller
/// `|residual|` is returned.
fn bisect(
    lo: f64,
    hi: f64,
    below: impl Fn(f64) -> bool,
    residual: impl Fn(f64) -> f64,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Ok(if residual(lo).abs() <= residual(hi).abs() {
                lo
            } else {
                hi
            });
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= REL_TOL * hi {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::Solver(format!(
            "bisection did not converge in {MAX_BISECTIONS} steps: [{lo}, {hi}]"
        )))
    }
}

fn is_disc(p: &RadialPotential) -> bool {
    p.rq_prime(DISC_PROBE) > 0.0
}

/// r_τ with r_τ q'(r_τ) = 2τ; for τ = 0 the inner radius r₀ (0 for a disc).
pub fn solve_r_tau(p: &RadialPotential, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(domain(format!("tau must lie in [0, 1], got {tau}")));
    }
    let target = 2.0 * tau;
    if tau == 0.0 {
        if is_disc(p) {
            return Ok(0.0);
        }
        // largest zero: sup{r : r q'(r) ≤ 0}
        let hi = upper_bracket(p, f64::MIN_POSITIVE)?;
        let r0 = bisect(DISC_PROBE, hi, |r| p.rq_prime(r) <= 0.0, |r| p.rq_prime(r))?;
        return Ok(if r0 < DISC_ROOT_FLOOR { 0.0 } else { r0 });
    }
    let mut lo = LOWER_START;
    while p.rq_prime(lo) >= target {
        lo *= 1e-3;
        if lo < 1e-300 {
            return Err(Error::InvalidPotential(format!(
                "no lower bracket for r_tau at tau = {tau}"
            )));
        }
    }
    let hi = upper_bracket(p, target)?;
    // smallest solution: inf{r : r q'(r) ≥ 2τ}
    bisect(
        lo,
        hi,
        |r| p.rq_prime(r) < target,
        |r| p.rq_prime(r) - target,
    )
}

/// Checks ΔQ > 0 on a grid covering [max(0.9 r₀, 1e-6), 1.1 r₁] ∩ support.
pub fn check_strict_subharmonicity(p: &RadialPotential, d: &Droplet) -> Result<()> {
    let a = (0.9 * d.r0).max(1e-6);
    let b = (1.1 * d.r1).min(probe_ceiling(p));
    const POINTS: usize = 256;
    for i in 0..=POINTS {
        let r = a + (b - a) * i as f64 / POINTS as f64;
        let lap = p.laplacian_raw(r, 0);
        if !(lap > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "potential is not strictly subharmonic near the droplet: ΔQ({r}) = {lap}"
            )));
        }
    }
    Ok(())
}

pub fn droplet_of(p: &RadialPotential) -> Result<Droplet> {
    let r0 = solve_r_tau(p, 0.0)?;
    let r1 = solve_r_tau(p, 1.0)?;
    if !(r1 > r0) {
        return Err(Error::InvalidPotential(format!(
            "degenerate droplet r0 = {r0}, r1 = {r1}"
        )));
    }
    let kind = if r0 == 0.0 {
        DropletKind::Disc
    } else {
        DropletKind::Annulus
    };
    let d = Droplet { r0, r1, kind };
    check_strict_subharmonicity(p, &d)?;
    Ok(d)
}

/// dr_τ/dτ = 1 / (2 r_τ ΔQ(r_τ)).
pub fn dr_dtau(p: &RadialPotential, tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(domain(format!("tau must lie in [0, 1], got {tau}")));
    }
    if tau < DISC_TAU_FLOOR && is_disc(p) {
        return Err(domain(format!(
            "tau = {tau} is below the floor {DISC_TAU_FLOOR} for a disc droplet"
        )));
    }
    let r = solve_r_tau(p, tau)?;
    let lap = p.laplacian(r)?;
    Ok(1.0 / (2.0 * r * lap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn r_tau_examples() {
        let g = RadialPotential::ginibre(1.0).unwrap();
        assert!(rel(solve_r_tau(&g, 0.25).unwrap(), 0.5) < 1e-14);
        for (lambda, c) in [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0), (1.5, 0.0)] {
            let ml = RadialPotential::mittag_leffler(lambda, c).unwrap();
            for tau in [0.01, 0.3, 1.0] {
                let want = ((tau + c) / lambda).powf(1.0 / (2.0 * lambda));
                assert!(rel(solve_r_tau(&ml, tau).unwrap(), want) < 1e-13);
            }
        }
        let tu = RadialPotential::truncated_unitary(0.7, 1.3).unwrap();
        assert!(rel(solve_r_tau(&tu, 1.0).unwrap(), 1.3) < 1e-13);
        assert!(solve_r_tau(&g, 1.5).is_err());
    }

    #[test]
    fn droplet_examples() {
        let ml = RadialPotential::mittag_leffler(1.0, 1.0).unwrap();
        let d = droplet_of(&ml).unwrap();
        assert_eq!(d.kind, DropletKind::Annulus);
        assert!(rel(d.r0, 1.0) < 1e-13);
        assert!(rel(d.r1, 2f64.sqrt()) < 1e-13);
        let g = droplet_of(&RadialPotential::ginibre(1.0).unwrap()).unwrap();
        assert_eq!((g.r0, g.kind), (0.0, DropletKind::Disc));
        assert!(rel(g.r1, 1.0) < 1e-14);
        let tu = droplet_of(&RadialPotential::truncated_unitary(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(tu.kind, DropletKind::Disc);
        assert!(rel(tu.r1, 1.0) < 1e-13);
    }

    #[test]
    fn dr_dtau_examples() {
        let g = RadialPotential::ginibre(1.0).unwrap();
        assert!(rel(dr_dtau(&g, 0.25).unwrap(), 1.0) < 1e-13);
        let ml = RadialPotential::mittag_leffler(1.0, 1.0).unwrap();
        assert!(rel(dr_dtau(&ml, 1.0).unwrap(), 0.5 / 2f64.sqrt()) < 1e-13);
        assert!(matches!(dr_dtau(&g, 0.0), Err(Error::Domain(_))));
        assert!(matches!(dr_dtau(&g, 1e-13), Err(Error::Domain(_))));
    }

    #[test]
    fn hard_edge_never_probed_outside() {
        let tu = RadialPotential::truncated_unitary(0.01, 5.0).unwrap();
        let r = solve_r_tau(&tu, 1.0).unwrap();
        assert!(rel(r, 5.0) < 1e-13);
    }

    #[test]
    fn flat_region_gives_annulus_at_its_end() {
        use crate::potential::CustomProfile;
        // q = (r² − 1)² for r > 1 and 0 inside: r q' = 4r²(r² − 1)₊
        let prof = CustomProfile::new(|r: f64| if r > 1.0 { (r * r - 1.0).powi(2) } else { 0.0 })
            .with_derivatives(|r, k| {
                if r <= 1.0 {
                    return 0.0;
                }
                match k {
                    1 => 4.0 * r * (r * r - 1.0),
                    2 => 12.0 * r * r - 4.0,
                    3 => 24.0 * r,
                    _ => 24.0,
                }
            });
        let p = RadialPotential::custom(prof, None).unwrap();
        assert!(rel(solve_r_tau(&p, 0.0).unwrap(), 1.0) < 1e-13);
        // ΔQ vanishes on (0.9, 1): not strictly subharmonic near the droplet
        assert!(matches!(droplet_of(&p), Err(Error::InvalidPotential(_))));
    }
}
