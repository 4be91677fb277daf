//! Euclidean distances to rays, segments and parametric curves.

use num_complex::Complex64;

/// Distance from `w` to the segment `[a, b]`.
pub fn segment_distance(w: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (w - a).norm();
    }
    let t = (((w - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (w - (a + d * t)).norm()
}

/// Distance from `w` to the ray `{origin + s·dir : s ≥ 0}`.
pub fn ray_distance(w: Complex64, origin: Complex64, dir: Complex64) -> f64 {
    let u = dir / dir.norm();
    let t = ((w - origin) * u.conj()).re.max(0.0);
    (w - (origin + u * t)).norm()
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Distance from `w` to the curve `u ↦ p(u)`, `u ∈ [lo, hi]`: dense sampling
/// followed by golden-section refinement of every sampled local minimum.
/// The sample count is doubled until two successive estimates agree to `tol`.
pub fn curve_distance<P: Fn(f64) -> Complex64>(
    p: P,
    lo: f64,
    hi: f64,
    w: Complex64,
    tol: f64,
    n0: usize,
) -> f64 {
    let dist = |u: f64| (p(u) - w).norm();
    let mut n = n0.max(4);
    let mut prev = f64::INFINITY;
    loop {
        let h = (hi - lo) / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| dist(lo + h * i as f64)).collect();
        let mut best = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        for i in 0..=n {
            let left = if i > 0 { vals[i - 1] } else { f64::INFINITY };
            let right = if i < n { vals[i + 1] } else { f64::INFINITY };
            if vals[i] <= left && vals[i] <= right {
                let a = lo + h * (i.max(1) - 1) as f64;
                let b = lo + h * (i + 1).min(n) as f64;
                let (_, v) = golden_min(dist, a, b, 1e-13 * (1.0 + a.abs().max(b.abs())));
                best = best.min(v);
            }
        }
        if (prev - best).abs() <= tol || n >= 4096 {
            return best.min(prev);
        }
        prev = best;
        n *= 2;
    }
}
