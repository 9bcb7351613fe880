//! Least-squares helpers.

/// Slope and intercept of the least-squares line through (x, y).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Exponent p of a power law y ≈ C·x^p fitted in log-log coordinates.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Vertex of the parabola through three points, as (x, y).
pub fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d2 - d1) / (x[2] - x[0]);
    if a == 0.0 {
        return (x[1], y[1]);
    }
    // p(t) = y1 + b (t − x1) + a (t − x1)(t − x0)... written in Newton form
    let b = d1 + a * (x[1] - x[0]);
    let xv = x[1] - 0.5 * b / a;
    let xv = xv.clamp(x[0], x[2]);
    let t = xv - x[1];
    (xv, y[1] + b * t + a * t * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(0.75)).collect();
        assert!((loglog_slope(&x, &y) - 0.75).abs() < 1e-12);
        let (xv, yv) = parabola_vertex([0.0, 1.0, 3.0], [-0.44, 0.96, -2.24]);
        assert!((xv - 1.2).abs() < 1e-12, "{xv}");
        assert!((yv - 1.0).abs() < 1e-12);
    }
}
