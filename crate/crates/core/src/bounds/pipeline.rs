//! End-to-end bounds: shift, moment, Lipschitz constant, `L_k`, `U_k`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{
    choose_k, k0_threshold, lipschitz, lower_from_mean, upper_from_mean, Decimal, KChoice, KChooserParams,
    LipschitzMethod, LowerBound, Rounding, UpperBound,
};
use crate::decompose::{certificate_pow, find_certificate, Objective};
use crate::error::{Error, Result};
use crate::integrate::{integrate_handelman, integrate_polynomial, volume, Backend};
use crate::polytope::{coordinate_width, HRep};
use crate::ratpoly::{Polynomial, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    LinearForms,
    Handelman,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::LinearForms => "linear-forms",
            BackendKind::Handelman => "handelman",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    /// Find `s` with a Handelman certificate of `f + s`.
    Auto,
    /// The caller asserts `f ≥ 0` on `P`.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KSpec {
    Fixed(u32),
    /// Pick `k` from a target relative gap `ε`.
    Epsilon {
        epsilon: Rational,
        delta: Rational,
        c_delta: Rational,
    },
}

impl KSpec {
    /// `ε` with `δ = 1/10`, `c_δ = 81/20`.
    pub fn epsilon(epsilon: Rational) -> Self {
        let defaults = KChooserParams::new(epsilon, Rational::zero());
        KSpec::Epsilon {
            epsilon: defaults.epsilon,
            delta: defaults.delta,
            c_delta: defaults.c_delta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub backend: BackendKind,
    pub shift: ShiftMode,
    /// Starting Handelman degree; defaults to `deg f`.
    pub t: Option<u32>,
    pub objective: Objective,
    /// Overrides the computed Lipschitz constant.
    pub lipschitz: Option<Rational>,
    pub lipschitz_method: LipschitzMethod,
    /// Upper estimate `U` of `max(f + s)`, for the k-chooser and the `k₀` check.
    pub upper: Option<Rational>,
    pub digits: u32,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            backend: BackendKind::LinearForms,
            shift: ShiftMode::Auto,
            t: None,
            objective: Objective::SparseShift,
            lipschitz: None,
            lipschitz_method: LipschitzMethod::PerMonomial,
            upper: None,
            digits: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub d: usize,
    pub k: u32,
    pub backend: BackendKind,
    pub shift: Rational,
    /// Handelman degree of the certificate, if one was computed.
    pub t: Option<u32>,
    /// Largest coordinate width `M`.
    pub width: Rational,
    pub lipschitz: Rational,
    /// `None` when the constant was supplied by the caller.
    pub lipschitz_method: Option<LipschitzMethod>,
    pub gamma: Rational,
    pub lower: LowerBound,
    /// Absent when `f` is constant (`𝓛 = 0`).
    pub upper: Option<UpperBound>,
    /// `d(U/(M𝓛) - 1)` for the upper estimate in use.
    pub k0_upper: Option<Rational>,
    /// `d (f(x₀)+s) / (M𝓛)` at the vertex barycenter `x₀`.
    pub k0_point: Option<Rational>,
    pub choice: Option<KChoice>,
    pub digits: u32,
}

impl BoundsReport {
    /// `k` meets one of the sufficient conditions for `U_k ≥ f_max + s`.
    pub fn valid(&self) -> bool {
        let k = Rational::from_integer(BigInt::from(self.k));
        match (&self.k0_upper, &self.k0_point) {
            (None, None) => true,
            (a, b) => a.iter().chain(b.iter()).any(|t| &k >= t),
        }
    }

    /// Lower bound on `max f` (without the shift), rounded down.
    pub fn f_max_lower(&self) -> Decimal {
        Decimal::from_rational(
            &(self.lower.l_k.to_rational() - &self.shift),
            self.digits,
            Rounding::Down,
        )
    }

    /// Upper bound on `max f` (without the shift), rounded up.
    pub fn f_max_upper(&self) -> Option<Decimal> {
        self.upper
            .as_ref()
            .map(|u| Decimal::from_rational(&(u.u_k.to_rational() - &self.shift), self.digits, Rounding::Up))
    }

    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        let _ = writeln!(out, "k={}", self.k);
        let _ = writeln!(out, "d={}", self.d);
        let _ = writeln!(out, "backend={}", self.backend.name());
        let _ = writeln!(out, "s={}", self.shift);
        let _ = writeln!(out, "t={}", opt(self.t.map(|t| t.to_string())));
        let _ = writeln!(out, "M={}", self.width);
        let _ = writeln!(out, "lipschitz={}", self.lipschitz);
        let _ = writeln!(
            out,
            "lipschitz_method={}",
            match self.lipschitz_method {
                None => "given",
                Some(LipschitzMethod::WholePolynomial) => "whole",
                Some(LipschitzMethod::PerMonomial) => "per-monomial",
            }
        );
        let _ = writeln!(out, "gamma_k={}", self.gamma);
        let _ = writeln!(out, "Lk_pow_k={}", self.lower.lk_pow_k);
        let _ = writeln!(
            out,
            "Uk_pow_dk={}",
            opt(self.upper.as_ref().map(|u| u.uk_pow_dk.to_string()))
        );
        let _ = writeln!(out, "L_k={}", self.lower.l_k);
        let _ = writeln!(out, "U_k={}", opt(self.upper.as_ref().map(|u| u.u_k.to_string())));
        let _ = writeln!(out, "k0_upper={}", opt(self.k0_upper.as_ref().map(|x| x.to_string())));
        let _ = writeln!(out, "k0_point={}", opt(self.k0_point.as_ref().map(|x| x.to_string())));
        let _ = writeln!(out, "valid={}", self.valid());
        let _ = writeln!(out, "f_max_lower={}", self.f_max_lower());
        let _ = writeln!(out, "f_max_upper={}", opt(self.f_max_upper().map(|x| x.to_string())));
        out
    }

    pub fn to_table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("k".into(), self.k.to_string()),
            ("backend".into(), self.backend.name().into()),
            ("shift s".into(), self.shift.to_string()),
            ("M".into(), self.width.to_string()),
            ("lipschitz".into(), self.lipschitz.to_string()),
            ("gamma_k".into(), self.gamma.to_string()),
            ("L_k".into(), format!(">= {}", self.lower.l_k)),
        ];
        match &self.upper {
            Some(u) => rows.push(("U_k".into(), format!("<= {}", u.u_k))),
            None => rows.push(("U_k".into(), "n/a (constant polynomial)".into())),
        }
        rows.push(("max f".into(), format!(">= {}", self.f_max_lower())));
        if let Some(u) = self.f_max_upper() {
            rows.push(("max f".into(), format!("<= {u}")));
        }
        if !self.valid() {
            rows.push(("note".into(), "k below the validity threshold; U_k unverified".into()));
        }
        let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
        rows.iter().map(|(l, v)| format!("{l:<width$}  {v}\n")).collect()
    }
}

/// One row per report: `k`, `L_k` (rounded down), `U_k` (rounded up).
pub fn render_table(reports: &[BoundsReport]) -> String {
    let rows: Vec<[String; 3]> = reports
        .iter()
        .map(|r| {
            let upper = r
                .upper
                .as_ref()
                .map_or_else(|| "n/a".to_string(), |u| u.u_k.to_string());
            let upper = if r.valid() {
                upper
            } else {
                format!("{upper} (unverified)")
            };
            [r.k.to_string(), r.lower.l_k.to_string(), upper]
        })
        .collect();
    let header = ["k".to_string(), "L_k >=".to_string(), "U_k <=".to_string()];
    let mut widths = [0usize; 3];
    for row in std::iter::once(&header).chain(&rows) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let _ = writeln!(
            out,
            "{:>w0$}  {:<w1$}  {}",
            row[0],
            row[1],
            row[2],
            w0 = widths[0],
            w1 = widths[1]
        );
    }
    out
}

/// Shifts `f` to be nonnegative, integrates `(f + s)^k`, and brackets `max f + s`.
pub fn run_pipeline(p: &HRep, f: &Polynomial, k: &KSpec, options: &PipelineOptions) -> Result<BoundsReport> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: f.dim(),
        });
    }
    let d = p.dim();
    let cert = match options.shift {
        ShiftMode::Auto => {
            let t = options.t.unwrap_or_else(|| f.degree());
            Some(find_certificate(f, p, t, options.objective)?)
        }
        ShiftMode::None if options.backend == BackendKind::Handelman => {
            return Err(Error::InvalidArgument(
                "the Handelman backend requires --shift auto".into(),
            ));
        }
        ShiftMode::None => None,
    };
    let shift = cert.as_ref().map_or_else(Rational::zero, |c| c.shift.clone());
    let g = f.clone() + Polynomial::constant(d, shift.clone());

    let widths = coordinate_width(p);
    let (lip, lip_method) = match &options.lipschitz {
        Some(l) => (l.clone(), None),
        None => (
            lipschitz(f, &widths.max_abs, options.lipschitz_method)?.value,
            Some(options.lipschitz_method),
        ),
    };
    let ml = &widths.width * &lip;
    let x0 = p.vertex_barycenter();
    let g_x0 = g.eval(&x0)?;
    let upper_estimate = match &options.upper {
        Some(u) => Some(u.clone()),
        None if ml.is_positive() => Some(&g_x0 + &ml),
        None => None,
    };

    let (k, choice) = match k {
        KSpec::Fixed(k) => (*k, None),
        KSpec::Epsilon { .. } if !ml.is_positive() => (1, None),
        KSpec::Epsilon {
            epsilon,
            delta,
            c_delta,
        } => {
            let params = KChooserParams {
                epsilon: epsilon.clone(),
                delta: delta.clone(),
                c_delta: c_delta.clone(),
                upper: upper_estimate.clone().unwrap_or_else(Rational::zero),
            };
            let choice = choose_k(&params, d, &widths.width, &lip)?;
            let k = choice
                .k
                .to_u32()
                .ok_or_else(|| Error::InvalidArgument(format!("selected k = {} is too large", choice.k)))?;
            (k, Some(choice))
        }
    };
    if k == 0 {
        return Err(Error::NonPositive { what: "k" });
    }

    let integral = match (options.backend, &cert) {
        (BackendKind::Handelman, Some(c)) => integrate_handelman(p, &certificate_pow(c, k))?,
        _ => integrate_polynomial(p, &g.pow(k), Backend::LinearForms)?,
    };
    let mean = integral / volume(p);
    let lower = lower_from_mean(mean.clone(), k, options.digits)?;
    let upper = if ml.is_positive() {
        Some(upper_from_mean(
            &mean,
            d,
            k,
            &lip,
            &widths.width,
            upper_estimate.as_ref(),
            options.digits,
        )?)
    } else {
        None
    };
    let k0_upper = match (&upper_estimate, ml.is_positive()) {
        (Some(u), true) => Some(k0_threshold(d, u, &widths.width, &lip)),
        _ => None,
    };
    let k0_point = ml
        .is_positive()
        .then(|| Rational::from_integer(BigInt::from(d)) * &g_x0 / &ml);

    Ok(BoundsReport {
        d,
        k,
        backend: options.backend,
        shift,
        t: cert.as_ref().map(|c| c.t),
        width: widths.width,
        lipschitz: lip,
        lipschitz_method: lip_method,
        gamma: super::gamma(d, k),
        lower,
        upper,
        k0_upper,
        k0_point,
        choice,
        digits: options.digits,
    })
}
