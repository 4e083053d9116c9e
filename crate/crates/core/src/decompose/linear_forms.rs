//! Monomials as signed sums of powers of linear forms:
//!
//! `x^m = 1/|m|! · Σ_{0 ≤ p ≤ m, p ≠ 0} (-1)^{|m|-|p|} ∏ C(m_i, p_i) ⟨p, x⟩^{|m|}`.
//!
//! Forms that are positive multiples of each other are merged, so every
//! output form is a primitive integer vector with a positive leading entry.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::ratpoly::{binomial, factorial, Monomial, Polynomial, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFormPower {
    pub coefficient: Rational,
    pub form: Vec<Rational>,
    pub power: u32,
}

impl LinearFormPower {
    /// Expands `coefficient · ⟨form, x⟩^power` in the monomial basis.
    pub fn to_polynomial(&self) -> Polynomial {
        let base = Polynomial::affine(Rational::zero(), &self.form);
        base.pow(self.power).scale(&self.coefficient)
    }
}

/// Integer encoding of a polynomial `f` as
/// `f = (constant + Σ_q Σ_M weights[q][M] ⟨q, x⟩^M / M!) / denominator`,
/// where each `q` is a primitive nonnegative integer direction.
#[derive(Debug, Clone)]
pub struct DirectionTable {
    pub dim: usize,
    pub denominator: BigInt,
    pub constant: BigInt,
    pub max_power: u32,
    pub weights: BTreeMap<Vec<u32>, Vec<BigInt>>,
}

impl DirectionTable {
    /// Number of nonzero `(q, M)` terms plus the constant term if nonzero.
    pub fn num_terms(&self) -> usize {
        let forms: usize = self
            .weights
            .values()
            .map(|w| w.iter().filter(|x| !x.is_zero()).count())
            .sum();
        forms + usize::from(!self.constant.is_zero())
    }

    pub fn to_linear_forms(&self) -> Vec<LinearFormPower> {
        let den = Rational::from_integer(self.denominator.clone());
        let mut out = Vec::new();
        if !self.constant.is_zero() {
            out.push(LinearFormPower {
                coefficient: Rational::from_integer(self.constant.clone()) / &den,
                form: vec![Rational::zero(); self.dim],
                power: 0,
            });
        }
        let mut entries: Vec<(u32, &Vec<u32>, &BigInt)> = self
            .weights
            .iter()
            .flat_map(|(q, w)| {
                w.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(move |(m, x)| (m as u32, q, x))
            })
            .collect();
        entries.sort();
        for (m, q, w) in entries {
            out.push(LinearFormPower {
                coefficient: Rational::from_integer(w.clone()) / Rational::from_integer(factorial(m)) / &den,
                form: q.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect(),
                power: m,
            });
        }
        out
    }
}

fn gcd_all(p: &[u32]) -> u32 {
    p.iter().fold(0u32, |g, &x| g.gcd(&x))
}

struct Scratch {
    binom: Vec<Vec<BigInt>>,
    lambda_pow: HashMap<(u32, u32), BigInt>,
}

impl Scratch {
    fn new(max: u32) -> Self {
        let binom = (0..=max).map(|n| (0..=n).map(|k| binomial(n, k)).collect()).collect();
        Scratch {
            binom,
            lambda_pow: HashMap::new(),
        }
    }

    fn lambda_pow(&mut self, lambda: u32, m: u32) -> BigInt {
        self.lambda_pow
            .entry((lambda, m))
            .or_insert_with(|| num_traits::pow(BigInt::from(lambda), m as usize))
            .clone()
    }
}

/// Adds `coef · x^m` (as integer direction weights) into `acc`.
fn expand_monomial(
    m: &[u32],
    coef: &BigInt,
    scratch: &mut Scratch,
    acc: &mut HashMap<Vec<u32>, Vec<BigInt>>,
    max_power: u32,
) {
    let total: u32 = m.iter().sum();
    let d = m.len();
    let mut p = vec![0u32; d];
    loop {
        // advance p through the box ∏ [0, m_i], odometer style
        let mut i = 0;
        while i < d {
            if p[i] < m[i] {
                p[i] += 1;
                break;
            }
            p[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
        let size: u32 = p.iter().sum();
        let mut term = coef.clone();
        for (mi, pi) in m.iter().zip(&p) {
            if *pi != 0 && pi != mi {
                term *= &scratch.binom[*mi as usize][*pi as usize];
            }
        }
        if (total - size) % 2 == 1 {
            term = -term;
        }
        let lambda = gcd_all(&p);
        if lambda > 1 {
            term *= scratch.lambda_pow(lambda, total);
        }
        let q: Vec<u32> = p.iter().map(|x| x / lambda).collect();
        let slot = acc
            .entry(q)
            .or_insert_with(|| vec![BigInt::zero(); max_power as usize + 1]);
        slot[total as usize] += term;
    }
}

#[cfg(feature = "parallel")]
fn merge_into(into: &mut HashMap<Vec<u32>, Vec<BigInt>>, from: HashMap<Vec<u32>, Vec<BigInt>>) {
    for (q, w) in from {
        match into.get_mut(&q) {
            Some(slot) => {
                for (a, b) in slot.iter_mut().zip(w) {
                    *a += b;
                }
            }
            None => {
                into.insert(q, w);
            }
        }
    }
}

/// Builds the [`DirectionTable`] of `f`.
pub fn direction_table(f: &Polynomial) -> DirectionTable {
    let (terms, denominator) = f.integer_form();
    let max_power = f.degree();
    let max_exp = terms
        .iter()
        .flat_map(|(m, _)| m.exponents().iter().copied())
        .max()
        .unwrap_or(0);
    let mut constant = BigInt::zero();
    let nonconstant: Vec<&(Monomial, BigInt)> = terms
        .iter()
        .filter(|(m, c)| {
            if m.is_constant() {
                constant += c;
                false
            } else {
                true
            }
        })
        .collect();

    #[cfg(feature = "parallel")]
    let acc = {
        use rayon::prelude::*;
        nonconstant
            .par_iter()
            .fold(
                || (Scratch::new(max_exp), HashMap::new()),
                |(mut scratch, mut acc), (m, c)| {
                    expand_monomial(m.exponents(), c, &mut scratch, &mut acc, max_power);
                    (scratch, acc)
                },
            )
            .map(|(_, acc)| acc)
            .reduce(HashMap::new, |mut a, b| {
                if a.len() < b.len() {
                    let mut b = b;
                    merge_into(&mut b, a);
                    return b;
                }
                merge_into(&mut a, b);
                a
            })
    };
    #[cfg(not(feature = "parallel"))]
    let acc = {
        let mut scratch = Scratch::new(max_exp);
        let mut acc = HashMap::new();
        for (m, c) in &nonconstant {
            expand_monomial(m.exponents(), c, &mut scratch, &mut acc, max_power);
        }
        acc
    };

    let weights = acc
        .into_iter()
        .filter(|(_, w)| w.iter().any(|x| !x.is_zero()))
        .collect();
    DirectionTable {
        dim: f.dim(),
        denominator,
        constant,
        max_power,
        weights,
    }
}

/// Powers of linear forms summing to `x^m`.
pub fn monomial_to_linear_forms(m: &Monomial) -> Vec<LinearFormPower> {
    let mut f = Polynomial::zero(m.dim());
    f.add_term(m.clone(), Rational::one());
    poly_to_linear_forms(&f)
}

/// Powers of linear forms summing to `f`, with like `(form, power)` terms merged.
/// A constant `c` is carried as `(c, 0, 0)`.
pub fn poly_to_linear_forms(f: &Polynomial) -> Vec<LinearFormPower> {
    direction_table(f).to_linear_forms()
}

/// Sums the expansions of `forms` in the monomial basis.
pub fn linear_forms_to_polynomial(dim: usize, forms: &[LinearFormPower]) -> Polynomial {
    forms
        .iter()
        .fold(Polynomial::zero(dim), |acc, t| acc + t.to_polynomial())
}
