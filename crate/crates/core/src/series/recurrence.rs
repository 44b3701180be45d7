use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;

use super::{Branch, SeriesCoefficients};

/// Runs the coupled recurrences
///
/// ```text
/// b_{n+1} = [(E + Ω/2 − n − g²)cₙ + (gz − ε)bₙ − g b_{n−1} + z c_{n−1}] / (g(n+1))
/// c_{n+1} = [(E − Ω/2 − n − g²)bₙ + (gz − ε)cₙ − g c_{n−1} + z b_{n−1}] / (g(n+1))
/// ```
///
/// from `b₀ = 1`, `c₀ = c0` and `b₋₁ = c₋₁ = 0`, producing indices `0..=n_max`.
pub fn recurrence_coefficients(
    energy: f64,
    z: f64,
    p: &ModelParams,
    n_max: usize,
    c0: f64,
) -> Result<SeriesCoefficients> {
    let g = p.g();
    if g == 0.0 {
        return Err(Error::SingularRecurrence);
    }
    if n_max < 2 {
        return Err(invalid("n_max", format!("must be at least 2, got {n_max}")));
    }
    let (b, c) = run(energy, z, p.rabi, g, p.eps(), n_max, c0);
    Ok(SeriesCoefficients { b, c, z, energy })
}

pub(crate) fn run(
    energy: f64,
    z: f64,
    rabi: f64,
    g: f64,
    eps: f64,
    n_max: usize,
    c0: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut b = Vec::with_capacity(n_max + 1);
    let mut c = Vec::with_capacity(n_max + 1);
    b.push(1.0);
    c.push(c0);
    let (g2, drive) = (g * g, g * z - eps);
    for n in 0..n_max {
        let nf = n as f64;
        let (b_prev, c_prev) = if n == 0 { (0.0, 0.0) } else { (b[n - 1], c[n - 1]) };
        let denom = g * (nf + 1.0);
        let b_next = ((energy + rabi / 2.0 - nf - g2) * c[n] + drive * b[n] - g * b_prev
            + z * c_prev)
            / denom;
        let c_next = ((energy - rabi / 2.0 - nf - g2) * b[n] + drive * c[n] - g * c_prev
            + z * b_prev)
            / denom;
        b.push(b_next);
        c.push(c_next);
    }
    (b, c)
}

/// `(b_{N+1}, c_{N+1}, c_N − s·b_N)`.
pub(crate) fn residual_vector(b: &[f64], c: &[f64], order: usize, sign: f64) -> [f64; 3] {
    [b[order + 1], c[order + 1], c[order] - sign * b[order]]
}

/// `max(|b_{N+1}|, |c_{N+1}|, |c_N − s·b_N|)`; infinite when the coefficient
/// lists are too short.
pub fn termination_residual(coeffs: &SeriesCoefficients, order: usize, branch: Branch) -> f64 {
    if coeffs.b.len() < order + 2 || coeffs.c.len() < order + 2 {
        return f64::INFINITY;
    }
    residual_vector(&coeffs.b, &coeffs.c, order, branch.sign())
        .iter()
        .fold(0.0, |m, r| m.max(r.abs()))
}

/// The `c₀` for which `c_N = s·b_N`. Both coefficients are affine in `c₀`,
/// so two trial runs fix it; `None` when the condition does not depend on `c₀`.
pub fn matching_c0(
    p: &ModelParams,
    order: usize,
    branch: Branch,
) -> Option<f64> {
    let g = p.g();
    if g == 0.0 {
        return None;
    }
    let s = branch.sign();
    let energy = order as f64 + s * p.eps();
    let z = s * g;
    let (b0, c0) = run(energy, z, p.rabi, g, p.eps(), order, 0.0);
    let (b1, c1) = run(energy, z, p.rabi, g, p.eps(), order, 1.0);
    let f0 = c0[order] - s * b0[order];
    let f1 = c1[order] - s * b1[order];
    let slope = f1 - f0;
    if slope == 0.0 || !slope.is_finite() {
        return None;
    }
    let root = -f0 / slope;
    root.is_finite().then_some(root)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_g_is_singular() {
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(
            recurrence_coefficients(1.0, 0.0, &p, 3, 0.0).unwrap_err(),
            Error::SingularRecurrence
        );
    }

    #[test]
    fn n_max_too_small() {
        let p = ModelParams::new(1.0, 0.2, 0.0).unwrap();
        assert!(recurrence_coefficients(1.0, 0.1, &p, 1, 0.0).is_err());
    }

    #[test]
    fn first_step_matches_direct_formula() {
        let (rabi, eta, eps, energy, z, c0) = (1.3, 0.4, 0.25, 0.9, -0.2, 0.6);
        let p = ModelParams::from_eps(rabi, eta, eps).unwrap();
        let g = eta / 2.0;
        let co = recurrence_coefficients(energy, z, &p, 2, c0).unwrap();
        let b1 = ((energy + rabi / 2.0 - g * g) * c0 + (g * z - eps)) / g;
        let c1 = ((energy - rabi / 2.0 - g * g) + (g * z - eps) * c0) / g;
        assert!((co.b[1] - b1).abs() < 1e-14);
        assert!((co.c[1] - c1).abs() < 1e-14);
        assert_eq!(co.b[0], 1.0);
    }

    #[test]
    fn generic_energy_does_not_terminate() {
        // Values checked against an independent evaluation of the recurrences:
        // residuals 35, 121.63, 818.45 at N = 1, 2, 3.
        let p = ModelParams::from_eps(1.0, 0.2, 0.3).unwrap();
        let co = recurrence_coefficients(0.7, 0.1, &p, 5, 1.0).unwrap();
        let expected = [35.0, 121.633_333_333_333_3, 818.451_666_666_666_3];
        for (order, want) in (1..=3).zip(expected) {
            let r = termination_residual(&co, order, Branch::Plus);
            assert!(r > 1e-3);
            assert!((r - want).abs() < 1e-9 * want, "N={order}: {r}");
        }
    }

    #[test]
    fn short_coefficients_give_infinite_residual() {
        let p = ModelParams::from_eps(1.0, 0.2, 0.3).unwrap();
        let co = recurrence_coefficients(0.7, 0.1, &p, 2, 1.0).unwrap();
        assert!(termination_residual(&co, 2, Branch::Plus).is_infinite());
    }

    #[test]
    fn matching_c0_enforces_top_condition() {
        let p = ModelParams::from_eps(1.7, 0.3, -0.2).unwrap();
        for branch in Branch::BOTH {
            for order in 1..=4 {
                let c0 = matching_c0(&p, order, branch).unwrap();
                let s = branch.sign();
                let energy = order as f64 + s * p.eps();
                let co = recurrence_coefficients(energy, s * p.g(), &p, order + 1, c0).unwrap();
                let scale = co.b[order].abs().max(1.0);
                assert!((co.c[order] - s * co.b[order]).abs() < 1e-12 * scale);
            }
        }
    }
}
