//! Log-partition functions: exact norm sums, large-N expansions, partial-sum
//! identities and convergence studies.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::droplet::{solve_r_tau, DropletKind};
use crate::equilibrium::Equilibrium;
use crate::error::{domain, Result};
use crate::norms::{log_norm_exact_with, norm_quadrature, NormQuery};
use crate::potential::{Ensemble, RadialPotential};
use crate::quadrature::Quadrature;
use crate::special_fn::{ln_factorial, ZETA_PRIME_MINUS_1};
use crate::summation::{CompensatedSum, DoubleDouble};

/// Z_N (with the N! from the integral) or 𝒵_N = Z_N / N!.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Physics,
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionTerms {
    pub c_n2: f64,
    pub c_nlogn: f64,
    pub c_n: f64,
    pub c_logn: f64,
    pub c_1: f64,
    pub convention: Convention,
    pub ensemble: Ensemble,
    pub kind: DropletKind,
}

impl ExpansionTerms {
    pub fn evaluate(&self, n: usize) -> f64 {
        let nf = n as f64;
        let ln = nf.ln();
        self.c_n2 * nf * nf + self.c_nlogn * nf * ln + self.c_n * nf + self.c_logn * ln + self.c_1
    }
}

/// Numerical settings shared by the partition routines.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PartitionOptions {
    /// Overrides the per-norm quadrature chosen from N.
    pub norm_quadrature: Option<Quadrature>,
    /// Quadrature for the equilibrium functionals.
    pub equilibrium_quadrature: Quadrature,
    /// Accumulate Σ log h_j in double-double instead of Neumaier summation.
    pub double_double: bool,
}

impl PartitionOptions {
    /// Same relative tolerance everywhere.
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            norm_quadrature: Some(Quadrature {
                rel_tol,
                abs_tol: 0.0,
                ..Quadrature::default()
            }),
            equilibrium_quadrature: Quadrature::with_rel_tol(rel_tol),
            double_double: false,
        }
    }
}

/// log Z_N (physics convention) from the norms, evaluated in parallel over j
/// and summed in ascending j.
pub fn log_z_exact(p: &RadialPotential, n: usize, ensemble: Ensemble) -> Result<f64> {
    log_z_exact_with(
        p,
        n,
        ensemble,
        Convention::Physics,
        &PartitionOptions::default(),
    )
}

pub fn log_z_exact_with(
    p: &RadialPotential,
    n: usize,
    ensemble: Ensemble,
    convention: Convention,
    opts: &PartitionOptions,
) -> Result<f64> {
    if n == 0 {
        return Err(domain("N must be at least 1"));
    }
    let quad = opts.norm_quadrature.unwrap_or_else(|| norm_quadrature(n));
    let terms: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| match ensemble {
            Ensemble::Normal => log_norm_exact_with(p, NormQuery::new(n, j, ensemble)?, &quad),
            Ensemble::Symplectic => {
                let h = log_norm_exact_with(p, NormQuery::new(n, 2 * j + 1, ensemble)?, &quad)?;
                Ok(LN_2 + h)
            }
        })
        .collect::<Result<_>>()?;
    let factorial = match convention {
        Convention::Physics => ln_factorial(n as u64),
        Convention::Canonical => 0.0,
    };
    let total = if opts.double_double {
        let mut acc: DoubleDouble = terms.into_iter().collect();
        acc.add(factorial);
        acc.value()
    } else {
        let mut acc: CompensatedSum = terms.into_iter().collect();
        acc.add(factorial);
        acc.value()
    };
    Ok(total)
}

pub fn expansion_terms(
    p: &RadialPotential,
    ensemble: Ensemble,
    convention: Convention,
) -> Result<ExpansionTerms> {
    expansion_terms_with(p, ensemble, convention, &Quadrature::default())
}

pub fn expansion_terms_with(
    p: &RadialPotential,
    ensemble: Ensemble,
    convention: Convention,
    quad: &Quadrature,
) -> Result<ExpansionTerms> {
    let eq = Equilibrium::with_quadrature(p, *quad)?;
    let report = eq.report()?;
    let d = report.droplet;
    let (i, e, f) = (report.energy, report.entropy, report.f_term);
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let lap_r1 = p.laplacian(d.r1)?;
    let mut t = match (ensemble, d.kind) {
        (Ensemble::Normal, kind) => ExpansionTerms {
            c_n2: -i,
            c_nlogn: 0.5,
            c_n: half_ln_2pi - 1.0 - 0.5 * e,
            c_logn: if kind == DropletKind::Disc {
                5.0 / 12.0
            } else {
                0.5
            },
            c_1: half_ln_2pi
                + f
                + if kind == DropletKind::Disc {
                    ZETA_PRIME_MINUS_1
                } else {
                    0.0
                },
            convention,
            ensemble,
            kind,
        },
        (Ensemble::Symplectic, kind) => {
            let u0 = report.log_potential_origin;
            let base = ExpansionTerms {
                c_n2: -2.0 * i,
                c_nlogn: 0.5,
                c_n: 0.5 * (4.0 * PI).ln() - 1.0 - u0 - 0.5 * e,
                c_logn: 0.5,
                c_1: half_ln_2pi + 0.5 * f,
                convention,
                ensemble,
                kind,
            };
            match kind {
                DropletKind::Annulus => ExpansionTerms {
                    c_1: base.c_1 + 0.125 * (p.laplacian(d.r0)? / lap_r1).ln(),
                    ..base
                },
                DropletKind::Disc => {
                    let lap0 = p.origin_values()?.laplacian;
                    ExpansionTerms {
                        c_logn: 11.0 / 24.0,
                        c_1: base.c_1
                            + 0.5 * ZETA_PRIME_MINUS_1
                            + 5.0 / 24.0 * LN_2
                            + 0.125 * (lap0 / lap_r1).ln(),
                        ..base
                    }
                }
            }
        }
    };
    if convention == Convention::Canonical {
        // log N! = N log N − N + ½ log N + ½ log 2π + O(1/N)
        t.c_nlogn -= 1.0;
        t.c_n += 1.0;
        t.c_logn -= 0.5;
        t.c_1 -= half_ln_2pi;
    }
    Ok(t)
}

pub fn log_z_asymptotic(
    p: &RadialPotential,
    n: usize,
    ensemble: Ensemble,
    convention: Convention,
) -> Result<f64> {
    Ok(expansion_terms(p, ensemble, convention)?.evaluate(n))
}

/// Partial sums over the degree grid whose asymptotics enter the annulus proofs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[clap(rename_all = "snake_case")]
pub enum LemmaSum {
    SumVNormal,
    SumLogdqNormal,
    SumLogrNormal,
    SumVSympOdd,
    SumLogdqSympOdd,
    SumLogrSympOdd,
}

impl LemmaSum {
    pub const ALL: [LemmaSum; 6] = [
        LemmaSum::SumVNormal,
        LemmaSum::SumLogdqNormal,
        LemmaSum::SumLogrNormal,
        LemmaSum::SumVSympOdd,
        LemmaSum::SumLogdqSympOdd,
        LemmaSum::SumLogrSympOdd,
    ];

    /// Power k in the remainder O(N^{-k}).
    pub fn remainder_order(self) -> i32 {
        match self {
            LemmaSum::SumVNormal | LemmaSum::SumVSympOdd => 3,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LemmaSum::SumVNormal => "sum_v_normal",
            LemmaSum::SumLogdqNormal => "sum_logdq_normal",
            LemmaSum::SumLogrNormal => "sum_logr_normal",
            LemmaSum::SumVSympOdd => "sum_v_symp_odd",
            LemmaSum::SumLogdqSympOdd => "sum_logdq_symp_odd",
            LemmaSum::SumLogrSympOdd => "sum_logr_symp_odd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaValue {
    pub direct: f64,
    pub predicted: f64,
}

impl LemmaValue {
    pub fn gap(&self) -> f64 {
        self.direct - self.predicted
    }
}

pub fn lemma_sum(p: &RadialPotential, n: usize, which: LemmaSum) -> Result<LemmaValue> {
    if n == 0 {
        return Err(domain("N must be at least 1"));
    }
    let eq = Equilibrium::new(p)?;
    let d = eq.droplet();
    if d.is_disc() {
        return Err(domain(
            "the partial-sum identities are stated for annulus droplets",
        ));
    }
    let nf = n as f64;
    let odd = matches!(
        which,
        LemmaSum::SumVSympOdd | LemmaSum::SumLogdqSympOdd | LemmaSum::SumLogrSympOdd
    );
    let taus: Vec<f64> = (0..n)
        .map(|j| {
            if odd {
                (2 * j + 1) as f64 / (2.0 * nf)
            } else {
                j as f64 / nf
            }
        })
        .collect();
    let terms: Vec<f64> = taus
        .par_iter()
        .map(|&tau| {
            let r = solve_r_tau(p, tau)?;
            Ok(match which {
                LemmaSum::SumVNormal | LemmaSum::SumVSympOdd => p.v_tau_raw(tau, r, 0),
                LemmaSum::SumLogdqNormal | LemmaSum::SumLogdqSympOdd => p.laplacian(r)?.ln(),
                LemmaSum::SumLogrNormal | LemmaSum::SumLogrSympOdd => r.ln(),
            })
        })
        .collect::<Result<_>>()?;
    let direct = terms.into_iter().collect::<CompensatedSum>().value();
    let (r0, r1) = (d.r0, d.r1);
    let predicted = match which {
        LemmaSum::SumVNormal => {
            nf * eq.energy()? - eq.log_potential_origin()? + (r0 / r1).ln() / (6.0 * nf)
        }
        LemmaSum::SumLogdqNormal => {
            nf * eq.entropy()? - 0.5 * (p.laplacian(r1)? / p.laplacian(r0)?).ln()
        }
        LemmaSum::SumLogrNormal => -nf * eq.log_potential_origin()? - 0.5 * (r1 / r0).ln(),
        LemmaSum::SumVSympOdd => nf * eq.energy()? - (r0 / r1).ln() / (12.0 * nf),
        LemmaSum::SumLogdqSympOdd => nf * eq.entropy()?,
        LemmaSum::SumLogrSympOdd => -nf * eq.log_potential_origin()?,
    };
    Ok(LemmaValue { direct, predicted })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub exact: f64,
    pub asymptotic: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Slope of log|residual| against log N; NaN when a residual underflowed.
    pub fitted_exponent: f64,
    pub fit_r2: f64,
    /// Some |residual| fell below the underflow floor and no fit was made.
    pub residual_underflow: bool,
}

/// Residuals below this are treated as indistinguishable from rounding.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// Ordinary least squares y = a + b x; returns (b, r²).
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, r2)
}

fn check_ns(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(domain("at least one N is required"));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("N values must be strictly increasing"));
    }
    if ns[0] < 10 {
        return Err(domain(format!("each N must be at least 10, got {}", ns[0])));
    }
    Ok(())
}

pub fn convergence_study(
    p: &RadialPotential,
    ns: &[usize],
    ensemble: Ensemble,
    convention: Convention,
) -> Result<ConvergenceTable> {
    let opts = PartitionOptions::default();
    convergence_study_opts(p, ns, ensemble, convention, &opts)
}

pub fn convergence_study_opts(
    p: &RadialPotential,
    ns: &[usize],
    ensemble: Ensemble,
    convention: Convention,
    opts: &PartitionOptions,
) -> Result<ConvergenceTable> {
    convergence_study_with(p, ns, ensemble, convention, opts, |n| {
        log_z_exact_with(p, n, ensemble, convention, opts)
    })
}

/// Convergence study with a caller-supplied exact value (e.g. a closed form).
pub fn convergence_study_with(
    p: &RadialPotential,
    ns: &[usize],
    ensemble: Ensemble,
    convention: Convention,
    opts: &PartitionOptions,
    exact: impl Fn(usize) -> Result<f64>,
) -> Result<ConvergenceTable> {
    check_ns(ns)?;
    let terms = expansion_terms_with(p, ensemble, convention, &opts.equilibrium_quadrature)?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let exact = exact(n)?;
        let asymptotic = terms.evaluate(n);
        rows.push(ConvergenceRow {
            n,
            exact,
            asymptotic,
            residual: exact - asymptotic,
        });
    }
    let residual_underflow = rows.iter().any(|r| r.residual.abs() < RESIDUAL_FLOOR);
    let (fitted_exponent, fit_r2) = if residual_underflow || rows.len() < 2 {
        (f64::NAN, f64::NAN)
    } else {
        let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.residual.abs().ln()).collect();
        fit_power_law(&xs, &ys)
    };
    Ok(ConvergenceTable {
        rows,
        fitted_exponent,
        fit_r2,
        residual_underflow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::ln_gamma;

    fn ginibre() -> RadialPotential {
        RadialPotential::ginibre(1.0).unwrap()
    }

    fn ml11() -> RadialPotential {
        RadialPotential::mittag_leffler(1.0, 1.0).unwrap()
    }

    #[test]
    fn exact_small_n() {
        let g = ginibre();
        assert!(log_z_exact(&g, 1, Ensemble::Normal).unwrap().abs() < 1e-14);
        assert!((log_z_exact(&g, 2, Ensemble::Normal).unwrap() - 0.25f64.ln()).abs() < 1e-13);
        assert!((log_z_exact(&g, 1, Ensemble::Symplectic).unwrap() + LN_2).abs() < 1e-14);
        assert!(log_z_exact(&g, 0, Ensemble::Normal).is_err());
    }

    #[test]
    fn exact_ginibre_product_formula() {
        // log Z_N = log N! + Σ_j [log j! − (j+1) log N]
        let g = ginibre();
        let n = 60usize;
        let nf = n as f64;
        let want: f64 = ln_gamma(nf + 1.0).unwrap()
            + (0..n)
                .map(|j| ln_gamma(j as f64 + 1.0).unwrap() - (j as f64 + 1.0) * nf.ln())
                .sum::<f64>();
        let got = log_z_exact(&g, n, Ensemble::Normal).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        let canonical = log_z_exact_with(
            &g,
            n,
            Ensemble::Normal,
            Convention::Canonical,
            &PartitionOptions::default(),
        )
        .unwrap();
        assert!((got - canonical - ln_factorial(n as u64)).abs() < 1e-9);
        let dd = PartitionOptions {
            double_double: true,
            ..Default::default()
        };
        let got_dd = log_z_exact_with(&g, n, Ensemble::Normal, Convention::Physics, &dd).unwrap();
        assert!((got - got_dd).abs() < 1e-10);
    }

    #[test]
    fn expansion_terms_ginibre() {
        let g = ginibre();
        let t = expansion_terms(&g, Ensemble::Normal, Convention::Physics).unwrap();
        let h = 0.5 * (2.0 * PI).ln();
        assert!((t.c_n2 + 0.75).abs() < 1e-13);
        assert_eq!(t.c_nlogn, 0.5);
        assert!((t.c_n - (h - 1.0)).abs() < 1e-14);
        assert_eq!(t.c_logn, 5.0 / 12.0);
        assert!((t.c_1 - (h + ZETA_PRIME_MINUS_1)).abs() < 1e-14);

        let s = expansion_terms(&g, Ensemble::Symplectic, Convention::Physics).unwrap();
        assert!((s.c_n2 + 1.5).abs() < 1e-13);
        assert!((s.c_n - (0.5 * (4.0 * PI).ln() - 1.5)).abs() < 1e-14);
        assert_eq!(s.c_logn, 11.0 / 24.0);
        assert!((s.c_1 - (h + 0.5 * ZETA_PRIME_MINUS_1 + 5.0 / 24.0 * LN_2)).abs() < 1e-14);

        let c = expansion_terms(&g, Ensemble::Normal, Convention::Canonical).unwrap();
        assert_eq!(c.c_nlogn, -0.5);
        assert!((c.c_logn + 1.0 / 12.0).abs() < 1e-15);
        assert!((c.c_1 - ZETA_PRIME_MINUS_1).abs() < 1e-14);
    }

    #[test]
    fn expansion_terms_ml() {
        let t = expansion_terms(&ml11(), Ensemble::Normal, Convention::Physics).unwrap();
        assert_eq!(t.kind, DropletKind::Annulus);
        assert!((t.c_n2 + 2.25 - 2.0 * LN_2).abs() < 1e-12);
        assert_eq!(t.c_logn, 0.5);
        assert!((t.c_1 - 0.5 * (2.0 * PI).ln() + LN_2 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn annulus_residual_is_order_one_over_n() {
        let p = ml11();
        for e in [Ensemble::Normal, Ensemble::Symplectic] {
            let t = convergence_study(&p, &[50, 100, 200], e, Convention::Physics).unwrap();
            for r in &t.rows {
                assert!(r.residual.abs() * r.n as f64 <= 1.0, "{e:?} {r:?}");
            }
            assert!(
                (-1.3..=-0.7).contains(&t.fitted_exponent),
                "{e:?} {}",
                t.fitted_exponent
            );
        }
    }

    #[test]
    fn disc_residuals_decrease() {
        let g = ginibre();
        for e in [Ensemble::Normal, Ensemble::Symplectic] {
            let t = convergence_study(&g, &[25, 50, 100], e, Convention::Physics).unwrap();
            for w in t.rows.windows(2) {
                assert!(
                    w[1].residual.abs() < w[0].residual.abs(),
                    "{e:?} {:?}",
                    t.rows
                );
            }
        }
    }

    #[test]
    fn lemma_sums() {
        let p = ml11();
        let v = lemma_sum(&p, 100, LemmaSum::SumLogrNormal).unwrap();
        assert!(v.gap().abs() < 1e-2);
        for which in LemmaSum::ALL {
            let a = lemma_sum(&p, 50, which).unwrap().gap().abs();
            let b = lemma_sum(&p, 100, which).unwrap().gap().abs();
            if a < 1e-12 && b < 1e-12 {
                continue;
            }
            let factor = 2f64.powi(which.remainder_order()) / 2.0;
            assert!(a / b >= factor, "{}: {a} -> {b}", which.name());
        }
        assert!(lemma_sum(&ginibre(), 10, LemmaSum::SumVNormal).is_err());
    }

    #[test]
    fn power_law_fit() {
        let xs: Vec<f64> = [10f64, 20.0, 40.0].iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = [10f64, 20.0, 40.0].iter().map(|x| (3.0 / x).ln()).collect();
        let (b, r2) = fit_power_law(&xs, &ys);
        assert!((b + 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        assert!(check_ns(&[5, 10]).is_err());
        assert!(check_ns(&[20, 10]).is_err());
    }
}
