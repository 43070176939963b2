/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// `int_a^inf f` for a function decaying at least like `exp(-rate x)`.
pub fn integrate_to_infinity(f: &impl Fn(f64) -> f64, a: f64, rate: f64, tol: f64) -> f64 {
    // exp(-40) is below double precision relative to an O(1) integrand.
    let end = a.max(0.0) + 40.0 / rate;
    let pieces = 16;
    let width = (end - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + width * i as f64;
            integrate(f, lo, lo + width, tol / pieces as f64)
        })
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_exponentials() {
        assert!((integrate(&|x| x * x * x, 0.0, 2.0, 1e-12) - 4.0).abs() < 1e-12);
        assert!((integrate(&f64::sin, 0.0, std::f64::consts::PI, 1e-12) - 2.0).abs() < 1e-11);
        let tail = integrate_to_infinity(&|x| (-2.0 * x).exp(), 1.0, 2.0, 1e-13);
        assert!((tail - 0.5 * (-2.0f64).exp()).abs() < 1e-12);
    }
}
