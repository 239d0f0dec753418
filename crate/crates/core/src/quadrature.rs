//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The engine integrates a vector of integrands over the same
//! panel set so that the correlators sharing a dispersion evaluation are
//! computed together. The panel with the largest error estimate is bisected
//! until the summed estimate falls below the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_PANEL_BUDGET: usize = 10_000;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_715_430_394,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

// 10-point Gauss weights for the odd Kronrod abscissae XGK[1], XGK[3], ...
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Settings for [`integrate`] and [`integrate_many`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub tolerance: f64,
    pub panel_budget: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            tolerance: DEFAULT_TOLERANCE,
            panel_budget: DEFAULT_PANEL_BUDGET,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        QuadratureConfig {
            tolerance,
            ..Default::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub value: Vec<f64>,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
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

struct Scratch {
    f1: Vec<f64>,
    f2: Vec<f64>,
    kronrod: Vec<f64>,
    gauss: Vec<f64>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Scratch {
            f1: vec![0.0; dim],
            f2: vec![0.0; dim],
            kronrod: vec![0.0; dim],
            gauss: vec![0.0; dim],
        }
    }
}

fn kronrod_panel<F>(f: &mut F, a: f64, b: f64, s: &mut Scratch) -> Panel
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let dim = s.kronrod.len();

    f(center, &mut s.f1);
    for k in 0..dim {
        s.kronrod[k] = WGK[10] * s.f1[k];
        s.gauss[k] = 0.0;
    }
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let dx = half * x;
        f(center - dx, &mut s.f1);
        f(center + dx, &mut s.f2);
        for k in 0..dim {
            let sum = s.f1[k] + s.f2[k];
            s.kronrod[k] += w * sum;
            if j % 2 == 1 {
                s.gauss[k] += WG[j / 2] * sum;
            }
        }
    }

    let mut value = vec![0.0; dim];
    let mut error = 0.0f64;
    for k in 0..dim {
        value[k] = s.kronrod[k] * half;
        let diff = ((s.kronrod[k] - s.gauss[k]) * half).abs();
        // Roundoff floor so that exactly integrable panels terminate.
        let floor = 50.0 * f64::EPSILON * value[k].abs();
        error = error.max(diff.max(floor));
    }
    Panel { a, b, value, error }
}

/// Integrates `dim` functions over `[a, b]` on a shared panel set. `f(x, out)`
/// writes the integrand values at `x` into `out`. Panel edges are forced at
/// `breakpoints` (kinks or jumps of the integrand).
///
/// The returned error is the summed per-panel estimate, maximized over the
/// components.
pub fn integrate_many<F>(
    dim: usize,
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    config: QuadratureConfig,
) -> Result<Estimate>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut scratch = Scratch::new(dim);
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    let mut total_error = 0.0;
    for w in edges.windows(2) {
        if w[1] > w[0] {
            let p = kronrod_panel(&mut f, w[0], w[1], &mut scratch);
            total_error += p.error;
            heap.push(p);
        }
    }

    while total_error > config.tolerance {
        if heap.len() >= config.panel_budget {
            return Err(Error::QuadratureFailure {
                tolerance: config.tolerance,
                estimate: total_error,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel is at machine resolution; nothing left to refine.
            return Err(Error::QuadratureFailure {
                tolerance: config.tolerance,
                estimate: total_error,
                panels: heap.len() + 1,
            });
        }
        let left = kronrod_panel(&mut f, worst.a, mid, &mut scratch);
        let right = kronrod_panel(&mut f, mid, worst.b, &mut scratch);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Resum to remove drift of the running total before accepting.
        if total_error <= config.tolerance {
            total_error = heap.iter().map(|p| p.error).sum();
        }
    }

    let panels = heap.len();
    let mut all = heap.into_vec();
    all.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = vec![0.0; dim];
    for p in &all {
        for k in 0..dim {
            value[k] += p.value[k];
        }
    }
    Ok(Estimate {
        value,
        error: total_error,
        panels,
    })
}

/// Scalar convenience wrapper over [`integrate_many`].
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], config: QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_many(1, |x, out| out[0] = f(x), a, b, breakpoints, config).map(|e| e.value[0])
}
