//! Grid-sum lower bounds `L_{k,m} = (S(m) / |P ∩ (1/m)ℤ^d|)^{1/k}`, with
//! `S(m) = Σ_{x ∈ P ∩ (1/m)ℤ^d} f(x)^k`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bounds::{lower_bound, nth_root_directed, Decimal, LowerBound, Rounding};
use crate::error::{Error, Result};
use crate::polytope::{lattice_numerators, HRep};
use crate::ratpoly::{Polynomial, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct GridSumResult {
    pub m: u64,
    pub k: u32,
    /// `S(m)`.
    pub sum: Rational,
    pub count: u64,
    /// `L_{k,m}^k = S(m) / count`.
    pub mean: Rational,
    /// Rounded toward −∞.
    pub l_km: Decimal,
    /// Largest value of `f` on the grid.
    pub grid_max: Rational,
}

/// `f(q/m) = N(q) / (den · m^D)` with `N` integer-valued on `ℤ^d`.
struct ScaledPoly {
    terms: Vec<(Vec<u32>, BigInt)>,
    max_exp: usize,
    scale: BigInt,
}

impl ScaledPoly {
    fn new(f: &Polynomial, m: u64) -> Self {
        let (terms, den) = f.integer_form();
        let degree = f.degree();
        let m = BigInt::from(m);
        let max_exp = terms
            .iter()
            .flat_map(|(mono, _)| mono.exponents().iter().copied())
            .max()
            .unwrap_or(0) as usize;
        let terms = terms
            .into_iter()
            .map(|(mono, c)| {
                let lift = num_traits::pow(m.clone(), (degree - mono.degree()) as usize);
                (mono.exponents().to_vec(), c * lift)
            })
            .collect();
        ScaledPoly {
            terms,
            max_exp,
            scale: den * num_traits::pow(m, degree as usize),
        }
    }

    fn numerator(&self, q: &[BigInt]) -> BigInt {
        let powers: Vec<Vec<BigInt>> = q
            .iter()
            .map(|x| {
                let mut row = Vec::with_capacity(self.max_exp + 1);
                row.push(BigInt::one());
                for j in 1..=self.max_exp {
                    let next = &row[j - 1] * x;
                    row.push(next);
                }
                row
            })
            .collect();
        self.terms.iter().fold(BigInt::zero(), |acc, (e, c)| {
            let mut term = c.clone();
            for (row, &ei) in powers.iter().zip(e) {
                if ei > 0 {
                    term *= &row[ei as usize];
                }
            }
            acc + term
        })
    }
}

/// Sum of `N^k` and the largest `N` over a chunk of grid points.
fn accumulate(poly: &ScaledPoly, points: &[Vec<BigInt>], k: u32) -> (BigInt, Option<BigInt>) {
    points.iter().fold((BigInt::zero(), None), |(sum, max), q| {
        let n = poly.numerator(q);
        let max = match max {
            Some(mx) if mx >= n => Some(mx),
            _ => Some(n.clone()),
        };
        (sum + num_traits::pow(n, k as usize), max)
    })
}

pub fn grid_lower_bound(p: &HRep, f: &Polynomial, k: u32, m: u64, digits: u32) -> Result<GridSumResult> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: f.dim(),
        });
    }
    if k == 0 {
        return Err(Error::NonPositive { what: "k" });
    }
    if m == 0 {
        return Err(Error::NonPositive { what: "m" });
    }
    let points = lattice_numerators(p, m);
    if points.is_empty() {
        return Err(Error::EmptyGrid { m });
    }
    let poly = ScaledPoly::new(f, m);

    #[cfg(feature = "parallel")]
    let (total, max) = {
        use rayon::prelude::*;
        points.par_chunks(4096).map(|chunk| accumulate(&poly, chunk, k)).reduce(
            || (BigInt::zero(), None),
            |(sa, ma), (sb, mb)| (sa + sb, ma.into_iter().chain(mb).max()),
        )
    };
    #[cfg(not(feature = "parallel"))]
    let (total, max) = accumulate(&poly, &points, k);

    let count = points.len() as u64;
    let scale = Rational::from_integer(poly.scale.clone());
    let sum = Rational::new(total, num_traits::pow(poly.scale.clone(), k as usize));
    let mean = &sum / Rational::from_integer(BigInt::from(count));
    if mean < Rational::zero() && k.is_multiple_of(2) {
        return Err(Error::NegativeMean { k });
    }
    let l_km = nth_root_directed(&mean, k, digits, Rounding::Down)?;
    let grid_max = Rational::from_integer(max.expect("grid is nonempty")) / scale;
    Ok(GridSumResult {
        m,
        k,
        sum,
        count,
        mean,
        l_km,
        grid_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<GridSumResult>,
    /// The continuous `L_k` the grid bounds converge to.
    pub limit: LowerBound,
}

impl ConvergenceReport {
    pub fn to_table(&self) -> String {
        let cells: Vec<[String; 3]> = self
            .rows
            .iter()
            .map(|r| [r.m.to_string(), r.count.to_string(), r.l_km.to_string()])
            .collect();
        let header = ["m".to_string(), "points".to_string(), "L_km >=".to_string()];
        let mut widths = [0usize; 3];
        for row in std::iter::once(&header).chain(&cells) {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut out = String::new();
        for row in std::iter::once(&header).chain(&cells) {
            let _ = writeln!(
                out,
                "{:>w0$}  {:>w1$}  {}",
                row[0],
                row[1],
                row[2],
                w0 = widths[0],
                w1 = widths[1]
            );
        }
        let _ = writeln!(out, "L_k >= {} (k = {})", self.limit.l_k, self.limit.k);
        out
    }
}

/// `L_{k,m}` for each `m`, next to `L_k`.
pub fn convergence_report(p: &HRep, f: &Polynomial, k: u32, ms: &[u64], digits: u32) -> Result<ConvergenceReport> {
    let rows = ms
        .iter()
        .map(|&m| grid_lower_bound(p, f, k, m, digits))
        .collect::<Result<Vec<_>>>()?;
    let limit = lower_bound(p, f, k, digits)?;
    Ok(ConvergenceReport { rows, limit })
}
