//! Bracketed root finding for monotone functions.

/// Outcome of a bracketed solve. `bracket` always straddles a sign change
/// of `f` (or holds an exact zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub bracket: (f64, f64),
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub x: f64,
    pub f: f64,
    pub max_iterations: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            x: 1e-6,
            f: 1e-8,
            max_iterations: 200,
        }
    }
}

/// Plain bisection on `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, flo: f64, fhi: f64, tol: Tolerance) -> Root {
    solve(&mut f, lo, hi, flo, fhi, tol, false)
}

/// Regula falsi with the Illinois modification, falling back to a bisection
/// step whenever an interpolation step fails to halve the bracket. Never
/// leaves the bracket, so it inherits bisection's guarantees.
pub fn illinois<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, flo: f64, fhi: f64, tol: Tolerance) -> Root {
    solve(&mut f, lo, hi, flo, fhi, tol, true)
}

fn solve<F: FnMut(f64) -> f64>(
    f: &mut F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: Tolerance,
    interpolate: bool,
) -> Root {
    debug_assert!(a <= b);
    let mut evaluations = 0;
    let best = |a: f64, fa: f64, b: f64, fb: f64| if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
        let (x, fx) = best(a, fa, b, fb);
        return Root { x, fx, bracket: (a, b), evaluations };
    }
    // side retained on the previous step: -1 = a, +1 = b
    let mut last_side = 0i8;
    let mut width_before = b - a;
    let mut stalled = false;
    for _ in 0..tol.max_iterations {
        if b - a <= tol.x {
            break;
        }
        let mid = 0.5 * (a + b);
        let mut c = if interpolate && !stalled {
            let secant = (a * fb - b * fa) / (fb - fa);
            if secant.is_finite() && secant > a && secant < b {
                secant
            } else {
                mid
            }
        } else {
            mid
        };
        if c <= a || c >= b {
            c = mid;
        }
        let fc = f(c);
        evaluations += 1;
        if fc == 0.0 || fc.abs() < tol.f {
            let bracket = if fc.signum() == fa.signum() { (c, b) } else { (a, c) };
            return Root { x: c, fx: fc, bracket, evaluations };
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
            if last_side == -1 {
                fb *= 0.5;
            }
            last_side = -1;
        } else {
            b = c;
            fb = fc;
            if last_side == 1 {
                fa *= 0.5;
            }
            last_side = 1;
        }
        let width = b - a;
        stalled = interpolate && !stalled && width > 0.5 * width_before;
        width_before = width;
    }
    let (x, fx) = if interpolate {
        best(a, fa, b, fb)
    } else {
        (0.5 * (a + b), f64::NAN)
    };
    let fx = if fx.is_nan() {
        evaluations += 1;
        f(x)
    } else {
        fx
    };
    Root { x, fx, bracket: (a, b), evaluations }
}
