//! Handelman certificates `f + s = Σ c_α g_1^{α_1} ⋯ g_n^{α_n}` with `c_α ≥ 0`,
//! where `g_i = b_i - ⟨A_i, x⟩` are the facet polynomials of the polytope.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlp::{self, LpProblem, LpStatus, Sense, VarBound};
use crate::polytope::HRep;
use crate::ratpoly::{parse_rational, Monomial, MonomialIndex, Polynomial, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `min s + w · Σ c_α`
    SparseShift,
    /// `min s`
    ShiftOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandelmanMonomial {
    pub coefficient: Rational,
    pub exponent: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandelmanCertificate {
    /// Facet polynomials `g_i`, taken verbatim from the H-representation rows.
    pub facets: Vec<Polynomial>,
    pub t: u32,
    pub shift: Rational,
    pub monomials: Vec<HandelmanMonomial>,
}

/// The LP together with the meaning of its columns and rows.
#[derive(Debug, Clone)]
pub struct HandelmanLp {
    pub problem: LpProblem,
    /// `α` for each `c_α` column; the shift `s` is the final column.
    pub columns: Vec<Vec<u32>>,
    /// Monomial of each equality row.
    pub rows: Vec<Monomial>,
}

impl HandelmanLp {
    pub fn shift_column(&self) -> usize {
        self.columns.len()
    }
}

fn exponents_up_to(nvars: usize, t: u32) -> Vec<Vec<u32>> {
    let index = MonomialIndex::new(nvars, t);
    (0..index.len()).map(|i| index.exponents(i).to_vec()).collect()
}

/// `g^α` for every `α` in `alphas` (which must be closed under decrementing the last nonzero entry).
fn facet_products(facets: &[Polynomial], alphas: &[Vec<u32>], dim: usize) -> Vec<Polynomial> {
    let mut memo: HashMap<Vec<u32>, Polynomial> = HashMap::new();
    let mut out = Vec::with_capacity(alphas.len());
    for alpha in alphas {
        let value = match alpha.iter().rposition(|&x| x > 0) {
            None => Polynomial::one(dim),
            Some(j) => {
                let mut prev = alpha.clone();
                prev[j] -= 1;
                let base = memo.get(&prev).cloned().unwrap_or_else(|| g_power(facets, &prev, dim));
                &base * &facets[j]
            }
        };
        memo.insert(alpha.clone(), value.clone());
        out.push(value);
    }
    out
}

fn g_power(facets: &[Polynomial], alpha: &[u32], dim: usize) -> Polynomial {
    facets
        .iter()
        .zip(alpha)
        .fold(Polynomial::one(dim), |acc, (g, &a)| acc * g.pow(a))
}

pub fn handelman_lp(f: &Polynomial, p: &HRep, t: u32, objective: Objective) -> Result<HandelmanLp> {
    handelman_lp_weighted(f, p, t, objective, &Rational::one())
}

/// As [`handelman_lp`], with weight `w` on `Σ c_α` in the sparse objective.
pub fn handelman_lp_weighted(
    f: &Polynomial,
    p: &HRep,
    t: u32,
    objective: Objective,
    weight: &Rational,
) -> Result<HandelmanLp> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: f.dim(),
        });
    }
    if t < f.degree() {
        return Err(Error::DegreeTooLow { t, degree: f.degree() });
    }
    let d = p.dim();
    let facets: Vec<Polynomial> = (0..p.num_constraints()).map(|i| p.facet_polynomial(i)).collect();
    let columns = exponents_up_to(facets.len(), t);
    let rows: Vec<Monomial> = exponents_up_to(d, t).into_iter().map(Monomial::new).collect();
    let row_of: HashMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let products = facet_products(&facets, &columns, d);

    let nvars = columns.len() + 1;
    let mut lp = LpProblem::new(nvars);
    lp.bounds[columns.len()] = VarBound::Free;
    let mut matrix = vec![vec![Rational::zero(); nvars]; rows.len()];
    for (j, g) in products.iter().enumerate() {
        for (m, c) in g.terms() {
            matrix[row_of[m]][j] = c.clone();
        }
    }
    // constant row: a_0ᵀ c − s = f_0
    matrix[0][columns.len()] = -Rational::one();
    for (i, (row, m)) in matrix.into_iter().zip(&rows).enumerate() {
        debug_assert!(i != 0 || m.is_constant());
        lp.add_row(row, Sense::Eq, f.coefficient(m));
    }
    lp.objective[columns.len()] = Rational::one();
    if objective == Objective::SparseShift {
        for c in lp.objective.iter_mut().take(columns.len()) {
            *c = weight.clone();
        }
    }
    Ok(HandelmanLp {
        problem: lp,
        columns,
        rows,
    })
}

/// Solves the Handelman LP at degree `t`, retrying `t + 1, …` up to `D(D-1)+1`
/// while infeasible. Every returned certificate has passed [`verify_certificate`].
pub fn find_certificate(f: &Polynomial, p: &HRep, t: u32, objective: Objective) -> Result<HandelmanCertificate> {
    let degree = f.degree();
    let t_max = (degree * degree.saturating_sub(1) + 1).max(t);
    let mut current = t;
    loop {
        let lp = handelman_lp(f, p, current, objective)?;
        let sol = exactlp::solve(&lp.problem)?;
        match sol.status {
            LpStatus::Optimal => {
                let mut monomials: Vec<HandelmanMonomial> = lp
                    .columns
                    .iter()
                    .zip(&sol.values)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(alpha, c)| HandelmanMonomial {
                        coefficient: c.clone(),
                        exponent: alpha.clone(),
                    })
                    .collect();
                monomials.sort_by_key(|m| Monomial::new(m.exponent.clone()));
                let cert = HandelmanCertificate {
                    facets: (0..p.num_constraints()).map(|i| p.facet_polynomial(i)).collect(),
                    t: current,
                    shift: sol.values[lp.shift_column()].clone(),
                    monomials,
                };
                if !verify_certificate(&cert, f) {
                    return Err(Error::UnverifiedCertificate);
                }
                return Ok(cert);
            }
            LpStatus::Unbounded => {
                return Err(Error::InvalidArgument("Handelman LP is unbounded".into()));
            }
            LpStatus::Infeasible if current < t_max => current += 1,
            LpStatus::Infeasible => return Err(Error::CertificateNotFound { last_t: current }),
        }
    }
}

impl HandelmanCertificate {
    pub fn dim(&self) -> usize {
        self.facets.first().map_or(0, Polynomial::dim)
    }

    /// `Σ c_α g^α` in the monomial basis.
    pub fn expand(&self) -> Polynomial {
        expand_monomials(&self.facets, &self.monomials, self.dim())
    }

    /// Serialized as `t <t>`, `s <s>`, then one `c : α_1 … α_n` line per monomial.
    pub fn to_text(&self) -> String {
        let mut out = format!("t {}\ns {}\n", self.t, self.shift);
        for m in &self.monomials {
            let _ = write!(out, "{} :", m.coefficient);
            for a in &m.exponent {
                let _ = write!(out, " {a}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`HandelmanCertificate::to_text`] output for the facets of `p`.
    pub fn parse(text: &str, p: &HRep) -> Result<Self> {
        let n = p.num_constraints();
        let mut t = None;
        let mut shift = None;
        let mut monomials = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("t ") {
                t = Some(
                    rest.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::parse(line_no, "bad degree"))?,
                );
            } else if let Some(rest) = line.strip_prefix("s ") {
                shift = Some(parse_rational(rest.trim()).ok_or_else(|| Error::parse(line_no, "bad shift"))?);
            } else {
                let (c, alpha) = line
                    .split_once(':')
                    .ok_or_else(|| Error::parse(line_no, "expected `c : α`"))?;
                let coefficient = parse_rational(c.trim()).ok_or_else(|| Error::parse(line_no, "bad coefficient"))?;
                if coefficient.is_negative() {
                    return Err(Error::parse(line_no, "negative Handelman coefficient"));
                }
                let exponent: Vec<u32> = alpha
                    .split_whitespace()
                    .map(|x| x.parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::parse(line_no, "bad exponent"))?;
                if exponent.len() != n {
                    return Err(Error::parse(line_no, format!("expected {n} exponents")));
                }
                monomials.push(HandelmanMonomial { coefficient, exponent });
            }
        }
        Ok(HandelmanCertificate {
            facets: (0..n).map(|i| p.facet_polynomial(i)).collect(),
            t: t.ok_or_else(|| Error::parse(1, "missing `t` line"))?,
            shift: shift.ok_or_else(|| Error::parse(1, "missing `s` line"))?,
            monomials,
        })
    }
}

pub(crate) fn expand_monomials(facets: &[Polynomial], monomials: &[HandelmanMonomial], dim: usize) -> Polynomial {
    let mut alphas: Vec<Vec<u32>> = Vec::new();
    // close the exponent set downward along the last nonzero entry for memoized products
    let mut seen = std::collections::HashSet::new();
    for m in monomials {
        let mut a = m.exponent.clone();
        let mut chain = Vec::new();
        while seen.insert(a.clone()) {
            chain.push(a.clone());
            match a.iter().rposition(|&x| x > 0) {
                Some(j) => a[j] -= 1,
                None => break,
            }
        }
        alphas.extend(chain.into_iter().rev());
    }
    alphas.sort_by(|x, y| Monomial::new(x.clone()).cmp(&Monomial::new(y.clone())));
    let products = facet_products(facets, &alphas, dim);
    let lookup: HashMap<&Vec<u32>, &Polynomial> = alphas.iter().zip(&products).collect();
    monomials.iter().fold(Polynomial::zero(dim), |acc, m| {
        acc + lookup[&m.exponent].scale(&m.coefficient)
    })
}

/// Whether the certificate has nonnegative coefficients and expands to `f + s` exactly.
pub fn verify_certificate(cert: &HandelmanCertificate, f: &Polynomial) -> bool {
    if cert.dim() != f.dim() && !cert.facets.is_empty() {
        return false;
    }
    if cert
        .monomials
        .iter()
        .any(|m| m.coefficient.is_negative() || m.exponent.len() != cert.facets.len())
    {
        return false;
    }
    let target = f + &Polynomial::constant(f.dim(), cert.shift.clone());
    expand_monomials(&cert.facets, &cert.monomials, f.dim()) == target
}

/// Monomials of `(Σ c_α g^α)^k`, collected by exponent, in graded order of `α`.
pub fn certificate_pow(cert: &HandelmanCertificate, k: u32) -> Vec<HandelmanMonomial> {
    let n = cert.facets.len();
    let mut h = Polynomial::zero(n);
    for m in &cert.monomials {
        h.add_term(Monomial::new(m.exponent.clone()), m.coefficient.clone());
    }
    h.pow(k)
        .terms()
        .map(|(alpha, c)| HandelmanMonomial {
            coefficient: c.clone(),
            exponent: alpha.exponents().to_vec(),
        })
        .collect()
}
