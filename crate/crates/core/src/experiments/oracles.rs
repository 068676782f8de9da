//! Independent closed-form oracles used by experiments and tests: they never
//! touch the spectral-sum implementation paths they are compared against.

/// Heat-kernel diagonal of -Δ + |x|² in d dimensions (Mehler formula):
/// K(t; x, x) = (2π sinh 2t)^{-d/2} exp(-|x|² tanh t).
pub fn mehler_diag(d: usize, t: f64, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (2.0 * std::f64::consts::PI * (2.0 * t).sinh()).powf(-(d as f64) / 2.0)
        * (-r2 * t.tanh()).exp()
}

/// Number of lattice points alpha in N^2 with 2(|alpha|) + 2 <= lambda,
/// i.e. the exact harmonic d = 2 counting function.
pub fn harmonic2_count(lambda: f64) -> usize {
    let mut count = 0usize;
    let mut j = 0usize;
    while 2.0 * j as f64 + 2.0 <= lambda {
        count += j + 1;
        j += 1;
    }
    count
}

/// Closed-form phase volume for the harmonic oscillator d = 2:
/// (2π)^{-2} vol{|ξ|² + |x|² <= λ} = λ²/8.
pub fn harmonic2_phase_volume(lambda: f64) -> f64 {
    lambda * lambda / 8.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mehler_at_origin() {
        assert_abs_diff_eq!(
            mehler_diag(1, 0.5, &[0.0]),
            (2.0 * std::f64::consts::PI * 1.0f64.sinh()).powf(-0.5),
            epsilon = 1e-15
        );
    }

    #[test]
    fn lattice_count() {
        // lambda = 20.5: levels j = 0..9, sum j+1 = 55
        assert_eq!(harmonic2_count(20.5), 55);
    }
}
