//! Lower and upper bounds on `max_P f` from the moments `∫_P f^k`.
//!
//! With `μ_k = ∫_P f^k / vol(P)` for `f ≥ 0` on `P`:
//!
//! - `L_k = μ_k^{1/k} ≤ f_max`,
//! - `U_k = μ_k^{1/(d+k)} (M𝓛)^{γ} γ^{-γ} (1-γ)^{-(1-γ)} ≥ f_max`, `γ = d/(d+k)`,
//!   once `k ≥ d(f_max/(M𝓛) - 1)`, where `M` is the largest coordinate width of
//!   `P` and `𝓛` a Lipschitz constant of `f` on `P`.
//!
//! Both bounds are produced as exact powers (`L_k^k`, `U_k^{d+k}`) and as
//! decimals rounded in the direction that keeps them valid.

mod numeric;
mod pipeline;

pub use numeric::{ln_bounds, nth_root_directed, Decimal, Rounding};
pub use pipeline::{render_table, run_pipeline, BackendKind, BoundsReport, KSpec, PipelineOptions, ShiftMode};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::decompose::{find_certificate, Objective};
use crate::error::{Error, Result};
use crate::integrate::{integrate_polynomial, volume, Backend};
use crate::polytope::HRep;
use crate::ratpoly::{binomial, rational_pow, Polynomial, Rational};

/// Digits used internally by the k-chooser.
const CHOOSER_DIGITS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzMethod {
    WholePolynomial,
    PerMonomial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzEstimate {
    pub value: Rational,
    pub method: LipschitzMethod,
    /// `M̃`, a bound on `|x_i|` over the polytope.
    pub box_bound: Rational,
}

/// Lipschitz constant of `f` on `[-M̃, M̃]^d`.
///
/// `WholePolynomial` uses `c r D M̃^{D-1}` with `c` the largest nonconstant
/// coefficient in absolute value and `r` the number of nonconstant terms.
/// `PerMonomial` sums `|c_i| D_i M̃^{D_i - 1}` over the nonconstant terms.
pub fn lipschitz(f: &Polynomial, box_bound: &Rational, method: LipschitzMethod) -> Result<LipschitzEstimate> {
    if box_bound.is_negative() {
        return Err(Error::InvalidArgument("box bound must be nonnegative".into()));
    }
    let terms: Vec<(u32, &Rational)> = f
        .terms()
        .filter(|(m, _)| !m.is_constant())
        .map(|(m, c)| (m.degree(), c))
        .collect();
    let value = match method {
        LipschitzMethod::WholePolynomial => match terms.iter().map(|(_, c)| c.abs()).max() {
            None => Rational::zero(),
            Some(c) => {
                let degree = f.degree();
                c * Rational::from_integer(BigInt::from(terms.len()))
                    * Rational::from_integer(BigInt::from(degree))
                    * rational_pow(box_bound, degree - 1)
            }
        },
        LipschitzMethod::PerMonomial => terms.iter().fold(Rational::zero(), |acc, (deg, c)| {
            acc + c.abs() * Rational::from_integer(BigInt::from(*deg)) * rational_pow(box_bound, deg - 1)
        }),
    };
    Ok(LipschitzEstimate {
        value,
        method,
        box_bound: box_bound.clone(),
    })
}

/// `∫_P f^k / vol(P)`, exactly, with the linear-forms backend.
pub fn power_mean(p: &HRep, f: &Polynomial, k: u32) -> Result<Rational> {
    let integral = integrate_polynomial(p, &f.pow(k), Backend::LinearForms)?;
    Ok(integral / volume(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub k: u32,
    pub lk_pow_k: Rational,
    /// Rounded toward −∞.
    pub l_k: Decimal,
}

pub fn lower_bound(p: &HRep, f: &Polynomial, k: u32, digits: u32) -> Result<LowerBound> {
    if k == 0 {
        return Err(Error::NonPositive { what: "k" });
    }
    lower_from_mean(power_mean(p, f, k)?, k, digits)
}

/// `L_k` from a known `μ_k`.
pub fn lower_from_mean(mean: Rational, k: u32, digits: u32) -> Result<LowerBound> {
    if k == 0 {
        return Err(Error::NonPositive { what: "k" });
    }
    let l_k = nth_root_directed(&mean, k, digits, Rounding::Down)?;
    Ok(LowerBound { k, lk_pow_k: mean, l_k })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub k: u32,
    pub d: usize,
    /// `γ_k = d/(d+k)`.
    pub gamma: Rational,
    pub uk_pow_dk: Rational,
    /// Rounded toward +∞.
    pub u_k: Decimal,
    /// `d(U/(M𝓛) - 1)` for the caller's upper estimate `U`, if one was given.
    pub k0: Option<Rational>,
}

impl UpperBound {
    /// False when `k` is below the threshold computed from the caller's `U`.
    pub fn above_k0(&self) -> bool {
        self.k0
            .as_ref()
            .is_none_or(|k0| Rational::from_integer(BigInt::from(self.k)) >= *k0)
    }
}

pub fn gamma(d: usize, k: u32) -> Rational {
    Rational::new(BigInt::from(d), BigInt::from(d as u64 + k as u64))
}

/// `d(U/(M𝓛) - 1)`.
pub fn k0_threshold(d: usize, upper: &Rational, width: &Rational, lipschitz: &Rational) -> Rational {
    Rational::from_integer(BigInt::from(d)) * (upper / (width * lipschitz) - Rational::one())
}

pub fn upper_bound(
    p: &HRep,
    f: &Polynomial,
    k: u32,
    lipschitz: &Rational,
    width: &Rational,
    upper: Option<&Rational>,
    digits: u32,
) -> Result<UpperBound> {
    if k == 0 {
        return Err(Error::NonPositive { what: "k" });
    }
    upper_from_mean(&power_mean(p, f, k)?, p.dim(), k, lipschitz, width, upper, digits)
}

/// `U_k` from a known `μ_k`: `U_k^{d+k} = μ_k (M𝓛)^d γ^{-d} (1-γ)^{-k}`.
pub fn upper_from_mean(
    mean: &Rational,
    d: usize,
    k: u32,
    lipschitz: &Rational,
    width: &Rational,
    upper: Option<&Rational>,
    digits: u32,
) -> Result<UpperBound> {
    if k == 0 {
        return Err(Error::NonPositive { what: "k" });
    }
    if !lipschitz.is_positive() {
        return Err(Error::NonPositive {
            what: "Lipschitz constant",
        });
    }
    if !width.is_positive() {
        return Err(Error::NonPositive { what: "width M" });
    }
    if mean.is_negative() {
        return Err(Error::NegativeMean { k });
    }
    let g = gamma(d, k);
    let dd = d as u32;
    let ml = width * lipschitz;
    let uk_pow_dk =
        mean * rational_pow(&ml, dd) * rational_pow(&g.recip(), dd) * rational_pow(&(Rational::one() - &g).recip(), k);
    let u_k = nth_root_directed(&uk_pow_dk, dd + k, digits, Rounding::Up)?;
    Ok(UpperBound {
        k,
        d,
        gamma: g,
        uk_pow_dk,
        u_k,
        k0: upper.map(|u| k0_threshold(d, u, width, lipschitz)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KChooserParams {
    pub epsilon: Rational,
    pub delta: Rational,
    pub c_delta: Rational,
    /// An upper estimate `U` of `f_max`.
    pub upper: Rational,
}

impl KChooserParams {
    /// `δ = 1/10`, `c_δ = 81/20`.
    pub fn new(epsilon: Rational, upper: Rational) -> Self {
        KChooserParams {
            epsilon,
            delta: Rational::new(BigInt::one(), BigInt::from(10)),
            c_delta: Rational::new(BigInt::from(81), BigInt::from(20)),
            upper,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KChoice {
    /// Upper bounds on the four candidate thresholds.
    pub components: [Rational; 4],
    pub k: u64,
}

/// Smallest `k` for which `U_k - L_k ≤ ε f_max` is guaranteed:
///
/// `k = ⌈max{ d(U/(M𝓛) - 1), d/((1+ε)^{1/3} - 1), 3d ln(M𝓛/U)(1 + 1/ε),
///            d((3c_δ)^{1+δ}(1 + 1/ε)^{1+δ} - 1) }⌉`,
///
/// with the logarithm clamped at 0 and every component rounded up.
pub fn choose_k(params: &KChooserParams, d: usize, width: &Rational, lipschitz: &Rational) -> Result<KChoice> {
    let KChooserParams {
        epsilon,
        delta,
        c_delta,
        upper,
    } = params;
    for (v, what) in [
        (epsilon, "epsilon"),
        (upper, "upper estimate U"),
        (width, "width M"),
        (lipschitz, "Lipschitz constant"),
        (c_delta, "c_delta"),
    ] {
        if !v.is_positive() {
            return Err(Error::NonPositive { what });
        }
    }
    if delta.is_negative() {
        return Err(Error::InvalidArgument("delta must be nonnegative".into()));
    }
    let dr = Rational::from_integer(BigInt::from(d));
    let one = Rational::one();
    let ml = width * lipschitz;
    let inv_eps = &one + epsilon.recip();

    let c1 = k0_threshold(d, upper, width, lipschitz);

    let cube = nth_root_directed(&(&one + epsilon), 3, CHOOSER_DIGITS, Rounding::Down)?.to_rational();
    if cube <= one {
        return Err(Error::InvalidArgument("epsilon is below the working precision".into()));
    }
    let c2 = &dr / (cube - &one);

    let ratio = &ml / upper;
    let c3 = if ratio <= one {
        Rational::zero()
    } else {
        let (_, ln_hi) = ln_bounds(&ratio, CHOOSER_DIGITS)?;
        Rational::from_integer(BigInt::from(3)) * &dr * ln_hi * &inv_eps
    };

    // X^{1+δ} with δ = p/q is the q-th root of X^{q+p}
    let x = Rational::from_integer(BigInt::from(3)) * c_delta * &inv_eps;
    let q = delta
        .denom()
        .to_u32()
        .ok_or_else(|| Error::InvalidArgument("delta denominator too large".into()))?;
    let p = delta
        .numer()
        .to_u32()
        .ok_or_else(|| Error::InvalidArgument("delta too large".into()))?;
    let powered = nth_root_directed(&rational_pow(&x, q + p), q, CHOOSER_DIGITS, Rounding::Up)?.to_rational();
    let c4 = &dr * (powered - &one);

    let components = [c1, c2, c3, c4];
    let max = components.iter().max().cloned().unwrap_or_else(Rational::zero);
    let k = max
        .ceil()
        .to_integer()
        .max(BigInt::one())
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument("selected k does not fit in 64 bits".into()))?;
    Ok(KChoice { components, k })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftQuality {
    pub degree: u32,
    pub t: u32,
    /// `c = D^D C(2D-1, D)`.
    pub constant: BigInt,
    /// `C(D,2) / (t - C(D,2))`.
    pub factor: Rational,
    /// Shift from the shift-only Handelman LP at degree `t`.
    pub shift: Rational,
}

impl ShiftQuality {
    /// `s + f_min ≤ bound_factor · (f_max - f_min)`.
    pub fn bound_factor(&self) -> Rational {
        Rational::from_integer(self.constant.clone()) * &self.factor
    }

    /// `ε' = ε / (2c)`: running the bounds at `ε'` gives `U_k - L_k ≤ ε (f_max - f_min)`.
    pub fn epsilon_prime(&self, epsilon: &Rational) -> Rational {
        epsilon / Rational::from_integer(BigInt::from(2) * &self.constant)
    }
}

pub fn shift_quality_constant(degree: u32) -> BigInt {
    num_traits::pow(BigInt::from(degree), degree as usize) * binomial((2 * degree).saturating_sub(1), degree)
}

pub fn shift_quality_factor(degree: u32, t: u32) -> Result<Rational> {
    let pairs = binomial(degree, 2);
    let t = BigInt::from(t);
    if t <= pairs {
        return Err(Error::InvalidArgument("t must exceed C(D, 2)".into()));
    }
    Ok(Rational::new(pairs.clone(), t - pairs))
}

/// Quality of the Handelman shift on a simplex at `t = D(D-1)+1`.
pub fn simplex_shift_quality(p: &HRep, f: &Polynomial, degree: u32) -> Result<ShiftQuality> {
    let d = p.dim();
    if p.num_constraints() != d + 1 || p.vertices().len() != d + 1 {
        return Err(Error::NotSimplex {
            facets: p.num_constraints(),
            dim: d,
        });
    }
    if degree == 0 {
        return Err(Error::NonPositive { what: "degree D" });
    }
    if f.degree() > degree {
        return Err(Error::InvalidArgument(format!(
            "polynomial degree {} exceeds D = {degree}",
            f.degree()
        )));
    }
    let t = degree * (degree - 1) + 1;
    let cert = find_certificate(f, p, t, Objective::ShiftOnly)?;
    Ok(ShiftQuality {
        degree,
        t,
        constant: shift_quality_constant(degree),
        factor: shift_quality_factor(degree, t)?,
        shift: cert.shift,
    })
}

#[cfg(test)]
mod tests;
