//! Dormand–Prince 5(4) integrator for complex scalar ODEs.

use num_complex::Complex64;

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-9,
            atol: 1e-9,
            max_steps: 200_000,
        }
    }
}

/// Integrates `y' = f(y)` from `y(grid[0]) = y0`, returning `y` at every grid time.
/// The grid must be monotone (increasing or decreasing).
pub fn integrate<F>(f: F, y0: Complex64, grid: &[f64], opts: OdeOptions) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut out = Vec::with_capacity(grid.len());
    if grid.is_empty() {
        return Ok(out);
    }
    out.push(y0);
    let mut t = grid[0];
    let mut y = y0;
    let mut k1 = f(y)?;
    let mut h = initial_step(&f, y, k1, opts)?;
    let mut steps = 0;
    for &target in &grid[1..] {
        let dir = (target - t).signum();
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Evaluation(format!(
                    "ODE step budget exhausted at t = {t}"
                )));
            }
            let remaining = (target - t).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h };
            let (y_new, k7, err) = match step(&f, y, k1, hs * dir) {
                Ok(v) => v,
                Err(e) => {
                    // A stage left the domain of `f`: shrink and retry.
                    h = hs * 0.25;
                    if h < 1e-14 * (1.0 + t.abs()) {
                        return Err(e);
                    }
                    continue;
                }
            };
            let sc = opts.atol + opts.rtol * y.norm().max(y_new.norm());
            let ratio = err / sc;
            if ratio <= 1.0 {
                t = if last { target } else { t + hs * dir };
                y = y_new;
                k1 = k7;
                let fac = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || fac < 1.0 {
                    h = hs * fac;
                }
            } else {
                h = hs * (0.9 * ratio.powf(-0.2)).clamp(0.1, 1.0);
                if h < 1e-14 * (1.0 + t.abs()) {
                    return Err(Error::Evaluation(format!("ODE step size underflow at t = {t}")));
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

fn initial_step<F>(f: &F, y: Complex64, k1: Complex64, opts: OdeOptions) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let sc = opts.atol + opts.rtol * y.norm();
    let d0 = y.norm() / sc;
    let d1 = k1.norm() / sc;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = y + k1 * h0;
    let d2 = match f(y1) {
        Ok(k) => (k - k1).norm() / sc / h0,
        Err(_) => return Ok(h0 * 1e-3),
    };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok(h0.min(100.0 * h0).min(h1).max(1e-12))
}

fn step<F>(f: &F, y: Complex64, k1: Complex64, h: f64) -> Result<(Complex64, Complex64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let k2 = f(y + k1 * (h * A21))?;
    let k3 = f(y + (k1 * A31 + k2 * A32) * h)?;
    let k4 = f(y + (k1 * A41 + k2 * A42 + k3 * A43) * h)?;
    let k5 = f(y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * h)?;
    let k6 = f(y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * h)?;
    let y_new = y + (k1 * B1 + k3 * B3 + k4 * B4 + k5 * B5 + k6 * B6) * h;
    let k7 = f(y_new)?;
    let err = ((k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h).norm();
    Ok((y_new, k7, err))
}
