//! Adaptive Gauss–Kronrod (7/15) quadrature of integrands given by their
//! logarithm.
//!
//! Each panel is summed with [`lse_unchecked`], so integrands whose values
//! are e^-1000 or smaller are handled without underflow. Panels are
//! bisected in order of decreasing error estimate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::specfun::lse_unchecked;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Target for (estimated absolute error) / (integral).
    pub rel_tol: f64,
    /// Maximum number of bisections of any initial panel.
    pub max_depth: u32,
    /// Cap on the total number of panels.
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            rel_tol: 1e-10,
            max_depth: 20,
            max_panels: 20_000,
        }
    }
}

/// Result of [`integrate_ln`]; all magnitudes are natural logarithms.
#[derive(Debug, Clone, Copy)]
pub struct LogIntegral {
    pub ln_value: f64,
    pub ln_abs_error: f64,
    pub converged: bool,
    pub panels: usize,
}

impl LogIntegral {
    /// Estimated relative error, i.e. the absolute error of `ln_value`.
    pub fn rel_error(&self) -> f64 {
        if self.ln_value == f64::NEG_INFINITY {
            return 0.0;
        }
        (self.ln_abs_error - self.ln_value).exp()
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    ln_value: f64,
    ln_error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.ln_error.total_cmp(&other.ln_error) == Ordering::Equal
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
        self.ln_error.total_cmp(&other.ln_error)
    }
}

fn gk15<F: Fn(f64) -> f64>(ln_f: &F, a: f64, b: f64, depth: u32) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = [(0.0, 0.0); 15];
    let mut gauss = [(0.0, 0.0); 7];
    let mut ng = 0;
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = ln_f(center - dx);
        let hi = ln_f(center + dx);
        kron[2 * j] = (lo, WGK[j]);
        kron[2 * j + 1] = (hi, WGK[j]);
        if j % 2 == 1 {
            gauss[ng] = (lo, WG[j / 2]);
            gauss[ng + 1] = (hi, WG[j / 2]);
            ng += 2;
        }
    }
    let mid = ln_f(center);
    kron[14] = (mid, WGK[7]);
    gauss[6] = (mid, WG[3]);
    let ln_half = half.ln();
    let ln_k = lse_unchecked(kron.iter().copied()) + ln_half;
    let ln_g = lse_unchecked(gauss.iter().copied()) + ln_half;
    let ln_error = if ln_k == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if ln_g == f64::NEG_INFINITY {
        ln_k
    } else {
        ln_k + (ln_g - ln_k).exp_m1().abs().ln()
    };
    Panel {
        a,
        b,
        depth,
        ln_value: ln_k,
        ln_error,
    }
}

/// Integrate `exp(ln_f(x))` over `[knots[0], knots[last]]`, starting from one
/// panel per pair of consecutive knots.
///
/// `ln_f` may return `-inf` where the integrand vanishes. Knots must be
/// finite and strictly increasing; at least two are required.
pub fn integrate_ln<F: Fn(f64) -> f64>(ln_f: F, knots: &[f64], opts: &AdaptiveOptions) -> LogIntegral {
    assert!(knots.len() >= 2, "integrate_ln needs at least two knots");
    let mut heap: BinaryHeap<Panel> = knots
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk15(&ln_f, w[0], w[1], 0))
        .collect();
    let mut frozen: Vec<Panel> = Vec::new();

    let totals = |heap: &BinaryHeap<Panel>, frozen: &Vec<Panel>| {
        let all = heap.iter().chain(frozen.iter());
        let v = lse_unchecked(all.clone().map(|p| (p.ln_value, 1.0)));
        let e = lse_unchecked(all.map(|p| (p.ln_error, 1.0)));
        (v, e)
    };

    loop {
        let (ln_value, ln_error) = totals(&heap, &frozen);
        let panels = heap.len() + frozen.len();
        let done = ln_error == f64::NEG_INFINITY || ln_error - ln_value <= opts.rel_tol.ln();
        if done {
            return LogIntegral {
                ln_value,
                ln_abs_error: ln_error,
                converged: true,
                panels,
            };
        }
        let worst = match heap.pop() {
            Some(p) if panels < opts.max_panels => p,
            other => {
                if let Some(p) = other {
                    heap.push(p);
                }
                return LogIntegral {
                    ln_value,
                    ln_abs_error: ln_error,
                    converged: false,
                    panels,
                };
            }
        };
        if worst.depth >= opts.max_depth {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            frozen.push(worst);
            continue;
        }
        heap.push(gk15(&ln_f, worst.a, mid, worst.depth + 1));
        heap.push(gk15(&ln_f, mid, worst.b, worst.depth + 1));
    }
}

/// Knots `center ± base·ratio^k` clipped to `(lo, hi)`, plus the endpoints
/// and `center` itself when inside. Sorted and deduplicated.
pub fn geometric_knots(lo: f64, hi: f64, centers: &[f64], base: f64, ratio: f64) -> Vec<f64> {
    let mut knots = vec![lo, hi];
    for &c in centers {
        if c > lo && c < hi {
            knots.push(c);
        }
        let mut step = base;
        let mut any = true;
        while any {
            any = false;
            for x in [c - step, c + step] {
                if x > lo && x < hi {
                    knots.push(x);
                    any = true;
                }
            }
            step *= ratio;
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(b.abs()).max(1e-300));
    knots
}
