//! Monomial basis, Bernstein fitting and feasibility certification.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::Interval;
use crate::strategy::{Basis, PolynomialStrategy};

/// Above this degree the monomial coefficients of a fit carry few correct
/// digits; fitted rules are evaluated from their Bernstein control values.
pub const FIT_DEGREE_CAP: usize = 25;

const MIN_CERT_GRID: usize = 65;
const MAX_CERT_GRID: usize = 1 << 20;

/// `ξ_d(t) = (1, t, …, t^d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector(Vec<f64>);

impl BasisVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, coeffs: &[f64]) -> f64 {
        dot_slices(coeffs, &self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Powers of `t` by iterated multiplication.
pub fn monomial_basis(t: f64, degree: usize) -> BasisVector {
    let mut values = Vec::with_capacity(degree + 1);
    fill_monomials(t, degree, &mut values);
    BasisVector(values)
}

pub(crate) fn fill_monomials(t: f64, degree: usize, out: &mut Vec<f64>) {
    out.clear();
    let mut p = 1.0;
    out.push(p);
    for _ in 0..degree {
        p *= t;
        out.push(p);
    }
}

#[inline]
pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = a[0] * b[0];
    for (x, y) in a[1..].iter().zip(&b[1..]) {
        acc += x * y;
    }
    acc
}

/// `v^T ξ_d(t)`, accumulated in increasing degree.
///
/// Every evaluation of a rule in the crate goes through this function so the
/// solver's constraint rows and strategy evaluation agree bit for bit.
#[inline]
pub fn dot_monomials(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = coeffs[0];
    let mut p = 1.0;
    for c in &coeffs[1..] {
        p *= t;
        acc += c * p;
    }
    acc
}

/// Evaluates a rule at `theta`, rejecting types outside its domain.
pub fn eval_strategy(s: &PolynomialStrategy, theta: f64) -> Result<f64> {
    s.eval(theta)
}

/// Evaluates a Bernstein polynomial with control values `ctrl` at `s ∈ [0,1]`.
///
/// Each intermediate value is clamped to the hull of its two parents, so the
/// result never leaves `[min ctrl, max ctrl]`.
pub fn de_casteljau(ctrl: &[f64], s: f64) -> f64 {
    let mut b = ctrl.to_vec();
    let r = 1.0 - s;
    for level in (1..b.len()).rev() {
        for k in 0..level {
            let (x, y) = (b[k], b[k + 1]);
            let v = r * x + s * y;
            b[k] = v.max(x.min(y)).min(x.max(y));
        }
    }
    b[0]
}

fn binomial_row(n: usize) -> Vec<f64> {
    let mut row = vec![1.0; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * ((n - k + 1) as f64) / (k as f64);
        row[k] = libm::round(row[k]);
    }
    row
}

/// Monomial coefficients in `s ∈ [0,1]` of `Σ_j c_j C(d,j) s^j (1-s)^{d-j}`.
fn bernstein_to_unit_monomial(ctrl: &[f64]) -> Vec<f64> {
    let d = ctrl.len() - 1;
    let cd = binomial_row(d);
    (0..=d)
        .map(|k| {
            // C(d,k) · Δ^k c_0
            let ck = binomial_row(k);
            let mut acc = 0.0;
            for j in 0..=k {
                let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * ck[j] * ctrl[j];
            }
            cd[k] * acc
        })
        .collect()
}

/// Rewrites `Σ p_k ((θ - lo) / w)^k` as `Σ q_m θ^m`.
fn unit_to_raw_monomial(unit: &[f64], domain: Interval) -> Vec<f64> {
    let d = unit.len() - 1;
    let (lo, w) = (domain.lo(), domain.width());
    let mut raw = vec![0.0; d + 1];
    let mut inv_wk = 1.0;
    for (k, &pk) in unit.iter().enumerate() {
        let ck = binomial_row(k);
        // (θ - lo)^k = Σ_m C(k,m) θ^m (-lo)^{k-m}
        for m in 0..=k {
            raw[m] += pk * inv_wk * ck[m] * libm::pow(-lo, (k - m) as f64);
        }
        inv_wk /= w;
    }
    raw
}

/// Bernstein polynomial of `f` on `domain`, expanded in the raw monomial
/// basis.
///
/// For `f` with range in `bounds` the fitted rule stays in `bounds` on the
/// whole domain. Degree 0 fits the constant `f(midpoint)`.
pub fn bernstein_fit<F>(f: F, degree: usize, domain: Interval, bounds: Interval) -> Result<PolynomialStrategy>
where
    F: FnMut(f64) -> f64,
{
    bernstein_fit_in(Basis::Raw, f, degree, domain, bounds)
}

/// [`bernstein_fit`] with the coefficients expressed in `basis`.
pub fn bernstein_fit_in<F>(
    basis: Basis,
    mut f: F,
    degree: usize,
    domain: Interval,
    bounds: Interval,
) -> Result<PolynomialStrategy>
where
    F: FnMut(f64) -> f64,
{
    let mut sample = |theta: f64| {
        let y = f(theta);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite {
                context: "bernstein_fit target",
                point: vec![theta],
            })
        }
    };
    if degree == 0 {
        let c = sample(domain.midpoint())?;
        return PolynomialStrategy::with_basis(vec![c], domain, bounds, basis).map(|s| s.with_bernstein(vec![c]));
    }
    let ctrl = (0..=degree)
        .map(|j| {
            let theta = if j == degree {
                domain.hi()
            } else {
                domain.lo() + domain.width() * (j as f64) / (degree as f64)
            };
            sample(theta)
        })
        .collect::<Result<Vec<f64>>>()?;
    let unit = bernstein_to_unit_monomial(&ctrl);
    let coeffs = match basis {
        Basis::Unit => unit,
        Basis::Raw => unit_to_raw_monomial(&unit, domain),
    };
    Ok(PolynomialStrategy::with_basis(coeffs, domain, bounds, basis)?.with_bernstein(ctrl))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertificateStatus {
    Certified,
    Violated,
    Undecided,
}

/// Outcome of [`certify_feasible`].
///
/// `witness` is the grid type where the bounds are breached (violated) or
/// tightest (otherwise). `margin` is the certified distance to the nearest
/// bound; it is negative when violated or undecided.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityCertificate {
    pub status: CertificateStatus,
    pub witness: f64,
    pub margin: f64,
    pub grid_points: usize,
}

/// Bound on `|f'|` over the variable range, in the basis variable.
fn derivative_bound(s: &PolynomialStrategy) -> f64 {
    match s.bernstein_control() {
        Some(ctrl) => {
            let d = ctrl.len() - 1;
            let max_diff = ctrl.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
            // d/ds in Bernstein form, converted to the basis variable.
            let (vlo, vhi) = s.variable_range();
            (d as f64) * max_diff / (vhi - vlo)
        }
        _ => {
            let (vlo, vhi) = s.variable_range();
            let r = 1f64.max(vlo.abs()).max(vhi.abs());
            s.coeffs()
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| (j as f64) * c.abs() * libm::pow(r, (j - 1) as f64))
                .sum()
        }
    }
}

fn rounding_bound(s: &PolynomialStrategy) -> f64 {
    if let Some(ctrl) = s.bernstein_control() {
        let magnitude = ctrl.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        return 2.0 * (s.degree() as f64) * f64::EPSILON * magnitude;
    }
    let (vlo, vhi) = s.variable_range();
    let r = 1f64.max(vlo.abs()).max(vhi.abs());
    let magnitude: f64 = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c.abs() * libm::pow(r, j as f64))
        .sum();
    2.0 * (s.degree() as f64) * f64::EPSILON * magnitude
}

/// Certifies `a ≤ f(θ) ≤ b` on the whole domain.
///
/// Evaluates on a uniform grid and bounds the excursion between grid points
/// by `h · ‖f'‖_∞ / 2`. The grid is refined until the rule is certified or a
/// grid point violates a bound, up to 2^20 points.
pub fn certify_feasible(s: &PolynomialStrategy) -> FeasibilityCertificate {
    let bounds = s.action_bounds();
    let domain = s.domain();
    let (vlo, vhi) = s.variable_range();
    let lipschitz = derivative_bound(s);
    let rounding = rounding_bound(s);
    let mut points = MIN_CERT_GRID;
    loop {
        let mut worst = f64::INFINITY;
        let mut witness = domain.lo();
        for k in 0..points {
            let theta = domain.grid_point(k, points);
            let y = s.eval_unchecked(theta);
            let m = (y - bounds.lo()).min(bounds.hi() - y);
            if m < worst {
                worst = m;
                witness = theta;
            }
        }
        if worst < 0.0 {
            return FeasibilityCertificate {
                status: CertificateStatus::Violated,
                witness,
                margin: worst,
                grid_points: points,
            };
        }
        let h = (vhi - vlo) / ((points - 1) as f64);
        let margin = worst - 0.5 * h * lipschitz - rounding;
        if margin > 0.0 || (margin == 0.0 && lipschitz == 0.0 && rounding == 0.0) {
            return FeasibilityCertificate {
                status: CertificateStatus::Certified,
                witness,
                margin,
                grid_points: points,
            };
        }
        if points >= MAX_CERT_GRID {
            return FeasibilityCertificate {
                status: CertificateStatus::Undecided,
                witness,
                margin,
                grid_points: points,
            };
        }
        points = 2 * (points - 1) + 1;
    }
}

/// Runs [`certify_feasible`] and records a positive outcome on the rule.
pub fn certify_in_place(s: &mut PolynomialStrategy) -> FeasibilityCertificate {
    let cert = certify_feasible(s);
    s.set_certified(cert.status == CertificateStatus::Certified);
    cert
}
