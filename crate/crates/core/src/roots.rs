//! Bracketed scalar root finding.

/// Outcome of a failed bracketed search: the last bracket and how many
/// iterations were spent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoConvergence {
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Brent–Dekker search (inverse quadratic / secant steps safeguarded by
/// bisection) for a root of `f` in `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must not share a sign. Iteration stops when `f`
/// evaluates to exactly zero or when the bracket has shrunk to a few ulps
/// around the iterate, so callers get the best root representable in `f64`.
/// Returns the abscissa and the function value there.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, max_iter: usize) -> Result<(f64, f64), NoConvergence>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok((a, fa));
    }
    if fb == 0.0 {
        return Ok((b, fb));
    }
    if fa.signum() == fb.signum() {
        return Err(NoConvergence {
            lo,
            hi,
            iterations: 0,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol = 2.0 * f64::EPSILON * b.abs() + f64::MIN_POSITIVE;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok((b, fb));
        }

        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);

        if iter + 1 == max_iter {
            break;
        }
    }
    Err(NoConvergence {
        lo: b.min(c),
        hi: b.max(c),
        iterations: max_iter,
    })
}

/// Bisection for the abscissa where a non-decreasing `g` crosses `target`.
///
/// Returns the midpoint of the final bracket once its width falls below
/// `x_rel_tol * |x|`, or `None` after `max_iter` halvings.
pub fn bisect_monotone<G>(
    mut g: G,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    x_rel_tol: f64,
    max_iter: usize,
) -> Option<f64>
where
    G: FnMut(f64) -> f64,
{
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_rel_tol * mid.abs() || mid <= lo || mid >= hi {
            return Some(mid);
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}
