//! Log-Gamma, log-factorial and log Barnes G-function for real arguments.

use std::sync::OnceLock;

use crate::error::{domain, Result};

/// ζ'(−1).
pub const ZETA_PRIME_MINUS_1: f64 = -0.165_421_143_700_450_929_213_919_660_242_780_64;
/// Glaisher–Kinkelin constant A, with log A = 1/12 − ζ'(−1).
pub const GLAISHER_KINKELIN: f64 = 1.282_427_129_100_622_636_875_342_568_869_791_7;
/// log(2π).
pub const LN_2PI: f64 = 1.837_877_066_409_345_483_560_659_472_811_235_3;
/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_4;

/// Named constants that appear in the large-N expansions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialConstants {
    pub log_2pi: f64,
    pub zeta_prime_minus1: f64,
}

impl Default for SpecialConstants {
    fn default() -> Self {
        Self {
            log_2pi: LN_2PI,
            zeta_prime_minus1: ZETA_PRIME_MINUS_1,
        }
    }
}

// B_2, B_4, ..., B_22
const BERNOULLI_EVEN: [f64; 11] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
];

const SERIES_TERMS: usize = 32;

/// ζ(k) − 1 for k = 2..SERIES_TERMS, via Euler–Maclaurin on the tail Σ_{n≥M} n^{-k}.
fn zeta_minus_one_table() -> &'static [f64; SERIES_TERMS + 1] {
    static TABLE: OnceLock<[f64; SERIES_TERMS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; SERIES_TERMS + 1];
        const M: f64 = 20.0;
        for (k, slot) in table.iter_mut().enumerate().skip(2) {
            let kf = k as f64;
            // tail: ∫_M^∞ + f(M)/2 − Σ B_{2i}/(2i)! f^{(2i-1)}(M)
            let mut tail = M.powf(1.0 - kf) / (kf - 1.0) + 0.5 * M.powf(-kf);
            let mut rising = kf; // k (k+1) ... (k + 2i - 2)
            let mut fact = 2.0; // (2i)!
            for (i, b) in BERNOULLI_EVEN.iter().take(8).enumerate() {
                let i = i + 1;
                tail += b / fact * rising * M.powf(-kf - (2 * i) as f64 + 1.0);
                rising *= (kf + (2 * i - 1) as f64) * (kf + (2 * i) as f64);
                fact *= ((2 * i + 1) * (2 * i + 2)) as f64;
            }
            let mut head = 0.0;
            for n in (2..20).rev() {
                head += (n as f64).powf(-kf);
            }
            *slot = head + tail;
        }
        table
    })
}

/// log Γ(2 + z) for |z| ≤ 1/2 from the Taylor series around 2.
fn ln_gamma_near_two(z: f64) -> f64 {
    let table = zeta_minus_one_table();
    let mut acc = 0.0;
    // sum from the smallest term up
    for k in (2..=SERIES_TERMS).rev() {
        let term = table[k] * z.powi(k as i32) / k as f64;
        acc += if k % 2 == 0 { term } else { -term };
    }
    acc + (1.0 - EULER_GAMMA) * z
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let two_k = (2 * (k + 1)) as f64;
        series += b / (two_k * (two_k - 1.0)) * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + 0.5 * LN_2PI + series
}

/// log Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 171.0 {
        return ln_factorial(x as u64 - 1);
    }
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    if x > 2.5 {
        let mut y = x;
        let mut prod = 1.0;
        while y > 2.5 {
            y -= 1.0;
            prod *= y;
        }
        return ln_gamma_near_two(y - 2.0) + prod.ln();
    }
    if x >= 1.5 {
        return ln_gamma_near_two(x - 2.0);
    }
    // x < 1.5: Γ(x) = Γ(x + 1) / x
    let mut y = x;
    let mut log_div = 0.0;
    while y < 0.5 {
        log_div += y.ln();
        y += 1.0;
    }
    // y ∈ [0.5, 1.5); y − 1 is exact here
    ln_gamma_near_two(y - 1.0) - (y - 1.0).ln_1p() - log_div
}

/// log n!.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 170 {
        let mut prod = 1.0f64;
        for k in 2..=n {
            prod *= k as f64;
        }
        prod.ln()
    } else {
        ln_gamma_stirling(n as f64 + 1.0)
    }
}

/// Truncated large-z form of log G(z + 1) without Bernoulli corrections:
/// z² log z / 2 − 3z²/4 + z log(2π)/2 − log z / 12 + ζ'(−1).
pub fn ln_barnes_g_leading(z: f64) -> f64 {
    let lz = z.ln();
    0.5 * z * z * lz - 0.75 * z * z + 0.5 * LN_2PI * z - lz / 12.0 + ZETA_PRIME_MINUS_1
}

fn ln_barnes_g_asymptotic(z: f64) -> f64 {
    // Σ_k B_{2k+2} / (4k(k+1) z^{2k})
    let inv2 = 1.0 / (z * z);
    let mut pow = inv2;
    let mut series = 0.0;
    for (k, &b) in BERNOULLI_EVEN.iter().enumerate().skip(1).take(8) {
        series += b / (4.0 * (k * (k + 1)) as f64) * pow;
        pow *= inv2;
    }
    ln_barnes_g_leading(z) + series
}

const BARNES_SHIFT: f64 = 30.0;

/// log G(x) for real x ≥ 1/2.
///
/// Arguments below the asymptotic threshold are lifted with
/// log G(z + 1) = log Γ(z) + log G(z).
pub fn ln_barnes_g(x: f64) -> Result<f64> {
    if !(x >= 0.5) || !x.is_finite() {
        return Err(domain(format!("ln_barnes_g requires x >= 0.5, got {x}")));
    }
    Ok(ln_barnes_g_unchecked(x))
}

pub(crate) fn ln_barnes_g_unchecked(x: f64) -> f64 {
    // G(n) = 0! 1! ⋯ (n−2)! for small integers, exact to rounding
    if x.fract() == 0.0 && x <= BARNES_SHIFT + 1.0 {
        let n = x as u64;
        return (1..n.saturating_sub(1)).map(ln_factorial).sum();
    }
    let mut z = x;
    let mut lifted = 0.0;
    while z - 1.0 < BARNES_SHIFT {
        lifted += ln_gamma_unchecked(z);
        z += 1.0;
    }
    ln_barnes_g_asymptotic(z - 1.0) - lifted
}

/// Stirling's form N log N − N + (1/2) log N + (1/2) log 2π of log N!.
pub fn stirling_ln_factorial(n: f64) -> f64 {
    n * n.ln() - n + 0.5 * n.ln() + 0.5 * LN_2PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!(close(ln_gamma(5.0).unwrap(), 24f64.ln(), 1e-15));
        assert!(close(ln_gamma(0.5).unwrap(), 0.5 * PI.ln(), 1e-15));
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    // Reference values from mpmath at 40 digits, evaluated at the f64 inputs.
    #[test]
    fn gamma_reference_values() {
        let cases = [
            (0.5, 0.572_364_942_924_700_087_071_713_7),
            (0.75, 0.203_280_951_431_295_371_481_433),
            (1.000_001, -5.772_148_423_874_146_650_588e-7),
            (1.3, -0.108_174_809_507_860_470_945_578_1),
            (2.000_000_1, 4.227_843_666_532_497_923_203e-8),
            (2.7, 0.434_820_553_655_104_531_704_636_9),
            (3.5, 1.200_973_602_347_074_224_816_022),
            (9.99, 12.779_315_214_350_192_880_463_56),
            (15.25, 25.861_949_901_848_519_358_276_05),
            (123.456, 469.605_547_129_929_468_730_069_2),
            (1.0e6 + 0.5, 12_815_511.476_902_765_642_114_02),
        ];
        for (x, want) in cases {
            let got = ln_gamma(x).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(rel <= 1e-14, "x={x} got={got} want={want} rel={rel:e}");
        }
    }

    #[test]
    fn factorial_matches_direct_product() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!(close(ln_factorial(10), 15.104_412_573_075_516, 1e-14));
        let mut prod: u128 = 1;
        for n in 1..=20u64 {
            prod *= n as u128;
            let direct = (prod as f64).ln();
            let got = ln_factorial(n);
            assert!(
                direct == 0.0 && got == 0.0 || ((got - direct) / direct).abs() <= 1e-15,
                "n={n}"
            );
        }
        // continuity across the table/Stirling switch
        let a = ln_factorial(170) + 171f64.ln();
        assert!(((ln_factorial(171) - a) / a).abs() < 1e-15);
    }

    #[test]
    fn factorial_against_stirling() {
        let n = 1000.0;
        let gap = ln_factorial(1000) - stirling_ln_factorial(n);
        assert!(gap.abs() < 1e-4);
        assert!(close(gap, 1.0 / (12.0 * n), 1e-9));
    }

    #[test]
    fn barnes_examples() {
        assert!(close(ln_barnes_g(1.0).unwrap(), 0.0, 1e-12));
        assert!(close(ln_barnes_g(2.0).unwrap(), 0.0, 1e-12));
        assert!(close(ln_barnes_g(4.0).unwrap(), LN_2, 1e-12));
        let half = LN_2 / 24.0 + 1.5 * ZETA_PRIME_MINUS_1 - 0.25 * PI.ln();
        assert!(close(ln_barnes_g(0.5).unwrap(), half, 1e-12));
        assert!(close(
            ln_barnes_g(1.5).unwrap(),
            half + 0.5 * PI.ln(),
            1e-12
        ));
        assert!(ln_barnes_g(0.49).is_err());
    }

    // mpmath.log(mpmath.barnesg(x))
    #[test]
    fn barnes_reference_values() {
        let cases = [
            (0.75, -0.164_028_798_513_126_443_201_421_7),
            (7.3, 12.228_615_592_899_987_423_906_34),
            (29.5, 777.037_460_694_810_942_346_241_4),
            (30.5, 846.606_541_615_634_576_528_881_1),
            (250.25, 125_052.852_527_341_080_100_809_9),
        ];
        for (x, want) in cases {
            let got = ln_barnes_g(x).unwrap();
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                "x={x} got={got} want={want}"
            );
        }
    }

    #[test]
    fn glaisher_relation() {
        assert!(close(
            ZETA_PRIME_MINUS_1,
            1.0 / 12.0 - GLAISHER_KINKELIN.ln(),
            1e-16
        ));
        let c = SpecialConstants::default();
        assert!(close(c.log_2pi, (2.0 * PI).ln(), 1e-15));
    }

    #[test]
    fn barnes_leading_form_at_thirty() {
        // log G(31) = Σ_{k=1}^{30} log Γ(k), recursion from G(1) = 1
        let by_recursion: f64 = (1..=30).map(|k| ln_factorial(k - 1)).sum();
        let leading = ln_barnes_g_leading(30.0);
        let gap = (by_recursion - leading).abs();
        assert!(gap <= 1e-4, "gap {gap}");
        // and the remainder is the B_4 term −1/(240 z²)
        assert!(close(by_recursion - leading, -1.0 / (240.0 * 900.0), 1e-8));
        assert!(close(ln_barnes_g(31.0).unwrap(), by_recursion, 1e-10));
    }

    #[test]
    fn zeta_table() {
        let t = zeta_minus_one_table();
        assert!(close(t[2], PI * PI / 6.0 - 1.0, 1e-16));
        assert!(close(t[4], PI.powi(4) / 90.0 - 1.0, 5e-16));
        assert!(close(
            t[3],
            0.202_056_903_159_594_285_399_738_161_511_449_99,
            1e-16
        ));
    }
}
