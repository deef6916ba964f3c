//! One-dimensional quadrature: adaptive Gauss-Legendre (5 points) by
//! bisection, and globally adaptive Gauss-Kronrod 7/15.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

// Kronrod abscissae on [0, 1), symmetric; odd indices are the Gauss points.
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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gl5<E>(f: &impl Fn(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<f64, E> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for k in 0..5 {
        s += GL5_W[k] * f(c + h * GL5_X[k])?;
    }
    Ok(s * h)
}

/// Integrates `f` over `[a, b]` with 5-point Gauss-Legendre, bisecting each
/// panel until the two halves agree with the parent to `rel_tol` of the
/// running total (with a tiny absolute floor).
pub fn gl5_adaptive<E>(f: impl Fn(f64) -> Result<f64, E>, a: f64, b: f64, rel_tol: f64) -> Result<f64, E> {
    let whole = gl5(&f, a, b)?;
    let scale = whole.abs().max(1e-300);
    gl5_rec(&f, a, b, whole, rel_tol * scale, 0)
}

fn gl5_rec<E>(f: &impl Fn(f64) -> Result<f64, E>, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> Result<f64, E> {
    let m = 0.5 * (a + b);
    let left = gl5(f, a, m)?;
    let right = gl5(f, m, b)?;
    let refined = left + right;
    if (refined - whole).abs() <= tol || depth >= 48 {
        return Ok(refined);
    }
    Ok(gl5_rec(f, a, m, left, 0.5 * tol, depth + 1)? + gl5_rec(f, m, b, right, 0.5 * tol, depth + 1)?)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

fn gk15<E>(f: &impl Fn(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<(f64, f64), E> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let d = h * XGK[j];
        let s = f(c - d)? + f(c + d)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
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
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod 7/15 on a finite interval. Stops when the
/// summed error estimate is below `max(abs_tol, rel_tol * |I|)` or after
/// `max_panels` panels.
pub fn gk15_adaptive<E>(
    f: impl Fn(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<Quad, E> {
    let (v, e) = gk15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
    });
    let (mut total, mut err) = (v, e);
    while err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_panels {
        let p = heap.pop().expect("nonempty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (lv, le) = gk15(&f, p.a, m)?;
        let (rv, re) = gk15(&f, m, p.b)?;
        total += lv + rv - p.value;
        err += le + re - p.error;
        heap.push(Panel {
            a: p.a,
            b: m,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: m,
            b: p.b,
            value: rv,
            error: re,
        });
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    Ok(Quad {
        value,
        error,
        converged: error <= abs_tol.max(rel_tol * value.abs()),
    })
}
