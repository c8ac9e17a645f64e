//! Truncated Fourier series of the thermodynamic root density and the
//! critical-asymmetry condition.

/// `σ(λ) = Σ_{|m| ≤ m_max} e^{−imφλ} / (2 cosh mφ) = ½ + Σ_{m ≥ 1} cos(mφλ) / cosh(mφ)`.
pub fn root_density(lambda: f64, phi: f64, m_max: usize) -> f64 {
    0.5 + (1..=m_max)
        .map(|m| {
            let m = m as f64;
            (m * phi * lambda).cos() / (m * phi).cosh()
        })
        .sum::<f64>()
}

/// `g(φ) = Σ_{m=1}^{m_max} (−1)^m tanh(mφ) / m`; the gap can only close where `g = 0`.
pub fn critical_phi_residual(phi: f64, m_max: usize) -> f64 {
    (1..=m_max)
        .map(|m| {
            let s = if m % 2 == 0 { 1.0 } else { -1.0 };
            s * (m as f64 * phi).tanh() / m as f64
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn density_is_even_and_periodic() {
        let phi = 0.7;
        for &l in &[0.0, 0.3, 1.7, -2.2, 5.0] {
            let s = root_density(l, phi, 60);
            assert!((s - root_density(-l, phi, 60)).abs() < 1e-13);
            assert!((s - root_density(l + 2.0 * PI / phi, phi, 60)).abs() < 1e-11);
        }
    }

    #[test]
    fn density_averages_to_one_half() {
        // trapezoid rule is exact for trigonometric polynomials of lower degree
        let phi = 0.9;
        let period = 2.0 * PI / phi;
        let n = 400;
        let avg: f64 = (0..n)
            .map(|i| root_density(period * i as f64 / n as f64, phi, 40))
            .sum::<f64>()
            / n as f64;
        assert!((avg - 0.5).abs() < 1e-12, "{avg}");
    }

    #[test]
    fn only_the_trivial_critical_point() {
        assert_eq!(critical_phi_residual(0.0, 200), 0.0);
        for i in 1..=300 {
            let phi = 3.0 * i as f64 / 300.0;
            assert!(critical_phi_residual(phi, 200) < 0.0, "phi = {phi}");
        }
        assert!((critical_phi_residual(20.0, 2000) + LN_2).abs() < 1e-3);
    }
}
