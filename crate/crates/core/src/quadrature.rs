//! Globally adaptive Gauss-Kronrod (7/15) quadrature in one dimension, and
//! a nested tensor rule on boxes in two dimensions.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-8,
            abs: 0.0,
            max_intervals: 2000,
        }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            rel,
            ..Self::default()
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// One 15-point Kronrod panel on `[a, b]`; returns (kronrod, |kronrod - gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`, splitting `initial` equal panels first and
/// then bisecting the worst panel until the summed error estimate meets `tol`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    initial: usize,
    tol: Tolerance,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::invalid(format!("bad integration interval [{a}, {b}]")));
    }
    let initial = initial.max(1);
    let w = (b - a) / initial as f64;
    let mut breaks: Vec<f64> = (0..initial).map(|i| a + w * i as f64).collect();
    breaks.push(b);
    integrate_pieces(f, &breaks, tol)
}

/// Like [`integrate`], with the initial panels delimited by `breaks`
/// (sorted internally; duplicates are dropped). The domain is
/// `[min breaks, max breaks]`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: Tolerance) -> Result<Estimate> {
    let mut pts: Vec<f64> = breaks.to_vec();
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("non-finite breakpoint"));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if pts.len() < 2 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let mut heap = BinaryHeap::with_capacity(2 * pts.len() + 16);
    for w in pts.windows(2) {
        let (value, error) = gk15(&f, w[0], w[1]);
        heap.push(Panel { a: w[0], b: w[1], value, error });
    }
    let totals = |heap: &BinaryHeap<Panel>| {
        heap.iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    while error > tol.target(value) {
        if heap.len() >= tol.max_intervals {
            let (v, e) = totals(&heap);
            if e <= tol.target(v) {
                break;
            }
            return Err(Error::Quadrature {
                tolerance: tol.target(v),
                estimate: e,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            let (v, e) = totals(&heap);
            return Err(Error::Quadrature {
                tolerance: tol.target(v),
                estimate: e,
            });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        if error <= tol.target(value) {
            // guard against drift in the running sums
            let (v, e) = totals(&heap);
            value = v;
            error = e;
        }
    }
    let (value, error) = totals(&heap);
    Ok(Estimate { value, error })
}

/// Axis-aligned integration box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i)).product()
    }
}

/// Integrates `f` over a box in one or two dimensions.
///
/// In 2-D the inner integrals along the first axis get an absolute tolerance
/// derived from `scale`, an estimate of the magnitude of the full integral,
/// so that their accumulated error stays a small fraction of `tol.rel * scale`.
pub fn integrate_box<F>(f: F, bounds: &Bounds, scale: f64, initial: usize, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64,
{
    match bounds.dim() {
        1 => integrate(|t| f(&[t]), bounds.lo[0], bounds.hi[0], initial, tol),
        2 => {
            let inner_tol = Tolerance {
                rel: tol.rel * 1e-2,
                abs: tol.rel * 1e-2 * scale.abs() / bounds.width(1).max(f64::MIN_POSITIVE),
                max_intervals: tol.max_intervals,
            };
            let failed = std::cell::Cell::new(None);
            let outer = integrate(
                |s| {
                    match integrate(|t| f(&[t, s]), bounds.lo[0], bounds.hi[0], initial, inner_tol) {
                        Ok(e) => e.value,
                        Err(err) => {
                            if failed.take().is_none() {
                                failed.set(Some(err));
                            }
                            f64::NAN
                        }
                    }
                },
                bounds.lo[1],
                bounds.hi[1],
                initial,
                tol,
            );
            if let Some(err) = failed.take() {
                return Err(err);
            }
            let mut est = outer?;
            est.error += inner_tol.abs * bounds.width(1);
            Ok(est)
        }
        d => Err(Error::invalid(format!(
            "quadrature supports d <= 2, got d = {d}"
        ))),
    }
}

/// Fixed-panel tensor Gauss-Kronrod, used for rough scale estimates.
pub fn integrate_box_fixed<F>(f: F, bounds: &Bounds, panels: usize) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let rule = |g: &dyn Fn(f64) -> f64, a: f64, b: f64| {
        let w = (b - a) / panels as f64;
        (0..panels)
            .map(|i| gk15(&g, a + w * i as f64, a + w * (i + 1) as f64).0)
            .sum::<f64>()
    };
    match bounds.dim() {
        1 => rule(&|t| f(&[t]), bounds.lo[0], bounds.hi[0]),
        _ => rule(
            &|s| rule(&|t| f(&[t, s]), bounds.lo[0], bounds.hi[0]),
            bounds.lo[1],
            bounds.hi[1],
        ),
    }
}
