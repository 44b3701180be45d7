//! Small dense helpers shared by the model and state builders.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::C64;

/// Maximum absolute column sum.
pub fn one_norm(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
///
/// The scaled matrix has one-norm at most 1/2, so the Taylor tail drops below
/// machine precision within ~20 terms.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm needs a square matrix");
    let norm = one_norm(m);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m * Complex64::from(scale);
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..=40 {
        term = (&term * &a) / Complex64::from(k as f64);
        result += &term;
        if one_norm(&term) <= 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Applies `exp(G)` to `v` where `apply` evaluates `G·x` and `norm_bound`
/// bounds `‖G‖`. Steps of norm at most one keep each Taylor series short.
pub fn expm_apply<F>(apply: F, norm_bound: f64, v: &DVector<C64>) -> DVector<C64>
where
    F: Fn(&DVector<C64>) -> DVector<C64>,
{
    let steps = norm_bound.ceil().max(1.0) as usize;
    let dt = Complex64::from(1.0 / steps as f64);
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..=60 {
            term = apply(&term) * (dt / k as f64);
            acc += &term;
            if term.norm() <= 1e-18 * acc.norm().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        out = acc;
    }
    out
}

/// `D(γ)·v` on a single motional register, `D(γ) = exp(γa† − γ*a)` with the
/// generator truncated to `v.len()` levels. Agrees with
/// [`crate::model::displacement_matrix`] to rounding.
pub fn displace_vector(gamma: C64, v: &DVector<C64>) -> DVector<C64> {
    let dim = v.len();
    if gamma == C64::new(0.0, 0.0) || dim == 0 {
        return v.clone();
    }
    let sqrt: Vec<f64> = (0..=dim).map(|n| (n as f64).sqrt()).collect();
    let apply = |x: &DVector<C64>| {
        DVector::from_fn(dim, |n, _| {
            let mut acc = C64::new(0.0, 0.0);
            if n > 0 {
                acc += gamma * sqrt[n] * x[n - 1];
            }
            if n + 1 < dim {
                acc -= gamma.conj() * sqrt[n + 1] * x[n + 1];
            }
            acc
        })
    };
    let bound = 2.0 * gamma.norm() * (dim as f64).sqrt();
    expm_apply(apply, bound, v)
}

/// Exact matrix elements `⟨m|D(β)|n⟩` of the untruncated displacement for
/// `m, n < dim`, from
/// `⟨m|D(β)|n⟩ = √(n!/m!) β^{m−n} e^{−|β|²/2} L_n^{(m−n)}(|β|²)` (`m ≥ n`)
/// and its mirror for `m < n`.
pub fn displacement_elements(beta: C64, dim: usize) -> DMatrix<C64> {
    let x = beta.norm_sqr();
    let r = beta.norm();
    let mut ln_fact = vec![0.0; dim + 1];
    for k in 1..=dim {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let mut out = DMatrix::zeros(dim, dim);
    for a in 0..dim {
        // L_k^{(a)}(x) for k = 0..dim−a by the three-term recurrence.
        let len = dim - a;
        let mut lag = vec![1.0; len];
        if len > 1 {
            lag[1] = 1.0 + a as f64 - x;
        }
        for k in 1..len.saturating_sub(1) {
            let kf = k as f64;
            lag[k + 1] =
                ((2.0 * kf + 1.0 + a as f64 - x) * lag[k] - (kf + a as f64) * lag[k - 1]) / (kf + 1.0);
        }
        let (lower, upper) = if a == 0 || r == 0.0 {
            (C64::new(1.0, 0.0), C64::new(1.0, 0.0))
        } else {
            let unit = beta / r;
            (unit.powu(a as u32), (-unit.conj()).powu(a as u32))
        };
        let ln_r = if r > 0.0 { r.ln() } else { f64::NEG_INFINITY };
        for (k, &l) in lag.iter().enumerate() {
            let (n, m) = (k, k + a);
            let ln_mag = -0.5 * x + 0.5 * (ln_fact[n] - ln_fact[m])
                + if a == 0 { 0.0 } else { a as f64 * ln_r };
            let mag = ln_mag.exp() * l;
            out[(m, n)] = lower * mag;
            if a > 0 {
                out[(n, m)] = upper * mag;
            }
        }
    }
    out
}
