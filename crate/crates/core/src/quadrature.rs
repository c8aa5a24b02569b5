//! Truncated Gaussian Fourier integrals and the adaptive quadrature behind them.

use std::f64::consts::PI;

use crate::error::{QgfError, Result};

// Kronrod abscissae (positive half) and weights; Gauss weights sit on the odd abscissae.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_DEPTH: u32 = 60;

// (integral, error estimate, integral of |f|)
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (lo, hi) = (f(c - x), f(c + x));
        let pair = lo + hi;
        kron += WGK[j] * pair;
        abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs(), (abs * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integral of `f` over `[a, b]` to absolute
/// tolerance `tol`. Intervals are bisected until the Gauss/Kronrod
/// difference on each falls below its share of the tolerance, or below the
/// rounding level of `∫|f|` on that interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(QgfError::invalid("integration bounds must be finite"));
    }
    if !(tol > 0.0) {
        return Err(QgfError::invalid("tolerance must be positive"));
    }
    if a == b {
        return Ok(0.0);
    }
    let width = (b - a).abs();
    let mut total = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err, abs) = gk15(&f, lo, hi);
        let share = tol * (hi - lo).abs() / width;
        if err <= share.max(50.0 * f64::EPSILON * abs) || depth >= MAX_DEPTH {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Ok(total)
}

/// The untruncated response `f(h) = e^{-h²/σ²}`.
pub fn gaussian_response(h: f64, sigma: f64) -> f64 {
    (-(h / sigma).powi(2)).exp()
}

/// `f_Y(h) = (σ/2√π) ∫_{-Y}^{Y} e^{-σ²y²/4} e^{-ihy} dy`, real by symmetry.
pub fn truncated_response_fy(h: f64, sigma: f64, y_cut: f64) -> Result<f64> {
    check(sigma, y_cut)?;
    let pref = sigma / PI.sqrt();
    let v = integrate(|y| (-(sigma * y).powi(2) / 4.0).exp() * (h * y).cos(), 0.0, y_cut, 1e-14)?;
    Ok(pref * v)
}

/// `f(h) - f_Y(h)`, integrated directly over the tail `y > Y` so that tiny
/// differences keep their relative precision.
pub fn truncation_error(h: f64, sigma: f64, y_cut: f64) -> Result<f64> {
    check(sigma, y_cut)?;
    // e^{-σ²y²/4} < 1e-300 past this point
    let end = y_cut.max(0.0) + 53.0 / sigma;
    let pref = sigma / PI.sqrt();
    let scale = (-(sigma * y_cut).powi(2) / 4.0).exp();
    let tol = (1e-14 * scale).max(1e-300);
    let v = integrate(|y| (-(sigma * y).powi(2) / 4.0).exp() * (h * y).cos(), y_cut, end, tol)?;
    Ok(pref * v)
}

/// Riemann-sum version `(σΔ/2√π) Σ_{|y|Δ ≤ Y} e^{-σ²(yΔ)²/4} cos(h yΔ)`.
pub fn discrete_response(h: f64, sigma: f64, y_cut: f64, delta_y: f64) -> Result<f64> {
    check(sigma, y_cut)?;
    if !(delta_y > 0.0) {
        return Err(QgfError::invalid("delta_y must be positive"));
    }
    let m = (y_cut / delta_y + 1e-9).floor() as i64;
    let pref = sigma * delta_y / (2.0 * PI.sqrt());
    let sum: f64 = (-m..=m)
        .map(|y| {
            let t = y as f64 * delta_y;
            (-(sigma * t).powi(2) / 4.0).exp() * (h * t).cos()
        })
        .sum();
    Ok(pref * sum)
}

/// Leading estimate of the discretization error, `(σΔ/2√π) e^{-σ²Y²/4} |sin hY|`.
pub fn discretization_error_estimate(h: f64, sigma: f64, y_cut: f64, delta_y: f64) -> f64 {
    sigma * delta_y / (2.0 * PI.sqrt()) * (-(sigma * y_cut).powi(2) / 4.0).exp() * (h * y_cut).sin().abs()
}

fn check(sigma: f64, y_cut: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(QgfError::invalid("sigma must be positive"));
    }
    if !(y_cut > 0.0 && y_cut.is_finite()) {
        return Err(QgfError::invalid("cutoff Y must be positive"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_oscillations() {
        let v = integrate(|x| x.powi(5) - 2.0 * x, -1.0, 3.0, 1e-12).unwrap();
        assert!((v - (729.0 - 1.0) / 6.0 + 8.0).abs() < 1e-10);
        let s = integrate(|x| (20.0 * x).sin(), 0.0, PI, 1e-13).unwrap();
        assert!(s.abs() < 1e-12);
        assert_eq!(integrate(|x| x, 2.0, 2.0, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn full_gaussian_integral() {
        for sigma in [0.5, 1.0, 3.0] {
            let v = truncated_response_fy(0.0, sigma, 100.0 / sigma).unwrap();
            assert!((v - 1.0).abs() < 1e-10, "{v}");
        }
    }

    #[test]
    fn tail_matches_difference_when_not_tiny() {
        let (h, sigma, y) = (0.7, 1.2, 1.5);
        let direct = gaussian_response(h, sigma) - truncated_response_fy(h, sigma, y).unwrap();
        let tail = truncation_error(h, sigma, y).unwrap();
        assert!((direct - tail).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(truncated_response_fy(0.0, 1.0, 0.0).is_err());
        assert!(truncated_response_fy(0.0, -1.0, 1.0).is_err());
        assert!(discrete_response(0.0, 1.0, 1.0, 0.0).is_err());
    }
}
