//! Bracketed bisection for the scalar calibrations.

/// Result of a bracketed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Root {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Midpoint {
    Arithmetic,
    /// For strictly positive brackets spanning many orders of magnitude.
    Geometric,
}

/// Solves `f(x) = target` on `[lo, hi]`, where `f(lo) - target` and
/// `f(hi) - target` have opposite signs. Stops once `|f(x) - target|` is
/// within `abs_tol` or the bracket can no longer be split.
pub(crate) fn bisect<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    target: f64,
    abs_tol: f64,
    mid: Midpoint,
) -> Root {
    let mut f_lo = f(lo) - target;
    let f_hi = f(hi) - target;
    debug_assert!(f_lo * f_hi <= 0.0, "root not bracketed");
    let mut best = if f_lo.abs() <= f_hi.abs() {
        Root {
            x: lo,
            value: f_lo + target,
            iterations: 0,
        }
    } else {
        Root {
            x: hi,
            value: f_hi + target,
            iterations: 0,
        }
    };

    for iteration in 1..=400 {
        let m = match mid {
            Midpoint::Arithmetic => lo + 0.5 * (hi - lo),
            Midpoint::Geometric => (lo.ln() + 0.5 * (hi.ln() - lo.ln())).exp(),
        };
        if !(m > lo && m < hi) {
            best.iterations = iteration;
            break;
        }
        let f_m = f(m) - target;
        if f_m.abs() < (best.value - target).abs() {
            best = Root {
                x: m,
                value: f_m + target,
                iterations: iteration,
            };
        }
        best.iterations = iteration;
        if f_m == 0.0 || f_m.abs() <= abs_tol * 1e-3 {
            break;
        }
        if (f_m < 0.0) == (f_lo < 0.0) {
            lo = m;
            f_lo = f_m;
        } else {
            hi = m;
        }
    }
    best
}
