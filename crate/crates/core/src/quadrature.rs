//! Adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! Panels are kept in a max-heap keyed on their error estimate; the worst
//! panel is bisected until the global estimate meets the tolerance. Panel
//! values are merged with compensated summation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

// 21-point Kronrod abscissae on [-1, 1] (non-negative half, descending).
// Odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_712_915_928_000,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Settings for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subintervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            max_subintervals: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subintervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut resabs = WGK[10] * fc.abs();
    let mut fv = [0.0f64; 20];
    for i in 0..10 {
        let dx = half * XGK[i];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[2 * i] = f1;
        fv[2 * i + 1] = f2;
        kronrod += WGK[i] * (f1 + f2);
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    if !kronrod.is_finite() || fv.iter().any(|v| !v.is_finite()) || !fc.is_finite() {
        return Err(Error::Integration(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for i in 0..10 {
        resasc += WGK[i] * ((fv[2 * i] - mean).abs() + (fv[2 * i + 1] - mean).abs());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        let scale = (200.0 * error / resasc).powf(1.5);
        error = if scale < 1.0 { resasc * scale } else { resasc };
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        resabs,
    })
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadResult> {
        self.integrate_points(f, &[a, b])
    }

    /// Integrate over `[points[0], points[last]]`, starting from the panels
    /// delimited by `points` (which must be nondecreasing).
    pub fn integrate_points<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<QuadResult> {
        if points.len() < 2 {
            return Err(Error::Integration("need at least two points".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Integration("non-finite integration limit".into()));
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Integration(
                "breakpoints must be nondecreasing".into(),
            ));
        }
        let mut heap = BinaryHeap::new();
        for w in points.windows(2) {
            if w[1] > w[0] {
                heap.push(kronrod21(&f, w[0], w[1])?);
            }
        }
        if heap.is_empty() {
            return Ok(QuadResult {
                value: 0.0,
                error_estimate: 0.0,
                subintervals: 0,
            });
        }
        let mut total_err: f64 = heap.iter().map(|p| p.error).sum();
        let mut total: f64 = heap.iter().map(|p| p.value).sum();
        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol {
                break;
            }
            let worst = *heap.peek().expect("heap is non-empty");
            let mid = 0.5 * (worst.a + worst.b);
            // Worst panel is already at rounding level or cannot be split:
            // nothing further can be gained.
            let roundoff = worst.error <= 4.0 * f64::EPSILON * worst.resabs;
            let unsplittable = !(mid > worst.a && mid < worst.b);
            if roundoff || unsplittable {
                break;
            }
            if heap.len() >= self.max_subintervals {
                return Err(Error::Integration(format!(
                    "no convergence within {} subintervals (error {:.3e}, tolerance {:.3e})",
                    self.max_subintervals, total_err, tol
                )));
            }
            heap.pop();
            let left = kronrod21(&f, worst.a, mid)?;
            let right = kronrod21(&f, mid, worst.b)?;
            total_err += left.error + right.error - worst.error;
            total += left.value + right.value - worst.value;
            heap.push(left);
            heap.push(right);
            if heap.len() % 64 == 0 {
                total_err = heap.iter().map(|p| p.error).sum();
                total = heap
                    .iter()
                    .map(|p| p.value)
                    .collect::<CompensatedSum>()
                    .value();
            }
        }
        let mut panels = heap.into_vec();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value = panels
            .iter()
            .map(|p| p.value)
            .collect::<CompensatedSum>()
            .value();
        let error_estimate = panels.iter().map(|p| p.error).sum();
        Ok(QuadResult {
            value,
            error_estimate,
            subintervals: panels.len(),
        })
    }
}
