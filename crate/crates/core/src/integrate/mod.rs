//! Exact integration over polytopes through the exponential valuation of
//! their vertex cones.
//!
//! For a simplicial cone `s + C` with rays `u_1, …, u_d`,
//! `∫_{s+C} e^{⟨ℓ,x⟩} dx = vol(Π_C) e^{⟨ℓ,s⟩} ∏ 1/(-⟨ℓ,u_i⟩)`, and summing over
//! all vertex cones of a triangulated tangent-cone decomposition gives the
//! integral over the polytope. Taylor coefficients of that identity give
//! powers of linear forms directly when `ℓ` is regular; otherwise (and for
//! products of affine forms) the coefficient is extracted from truncated
//! Laurent series in an auxiliary variable.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::decompose::{
    direction_table, verify_certificate, DirectionTable, HandelmanCertificate, HandelmanMonomial, LinearFormPower,
};
use crate::error::{Error, Result};
use crate::polytope::{linalg, HRep, SimplicialCone};
use crate::ratpoly::{factorial, MonomialIndex, Polynomial, Rational, TruncatedSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct AffineFactor {
    pub form: Vec<Rational>,
    pub constant: Rational,
    pub power: u32,
}

/// `p ↦ ∫_P ∏ (⟨ℓ_i,x⟩ + r_i)^{p_i} / p_i! dx` for every `|p| ≤ M`.
#[derive(Debug, Clone)]
pub struct AffineProductIntegralTable {
    pub factors: Vec<AffineFactor>,
    pub max_degree: u32,
    index: Arc<MonomialIndex>,
    values: Vec<Rational>,
}

impl AffineProductIntegralTable {
    pub fn get(&self, p: &[u32]) -> Option<&Rational> {
        self.index.position(p).map(|i| &self.values[i])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(p, value)` pairs in graded order of `p`.
    pub fn iter(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        (0..self.values.len()).map(move |i| (self.index.exponents(i), &self.values[i]))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Backend<'a> {
    LinearForms,
    Handelman(&'a HandelmanCertificate),
}

fn ray_dot(form: &[Rational], ray: &[BigInt]) -> Rational {
    form.iter()
        .zip(ray)
        .filter(|(a, _)| !a.is_zero())
        .fold(Rational::zero(), |acc, (a, u)| {
            acc + a * Rational::from_integer(u.clone())
        })
}

fn is_regular(form: &[Rational], cones: &[SimplicialCone]) -> bool {
    cones.iter().all(|c| c.rays.iter().all(|u| !ray_dot(form, u).is_zero()))
}

/// First form `(1, λ, λ², …, λ^{d-1})`, `λ = 1, 2, …`, with `⟨ℓ, u⟩ ≠ 0` on every ray.
pub fn regularizing_form(p: &HRep) -> Vec<Rational> {
    let d = p.dim();
    let cones = p.cones();
    (1u64..)
        .map(|lambda| {
            let mut v = Vec::with_capacity(d);
            let mut x = Rational::one();
            for _ in 0..d {
                v.push(x.clone());
                x *= Rational::from_integer(BigInt::from(lambda));
            }
            v
        })
        .find(|v| is_regular(v, cones))
        .expect("finitely many λ are excluded")
}

/// `Σ_C vol(Π_C) ⟨ℓ,s⟩^{M+d} / ∏ (-⟨ℓ,u_i⟩) · M!/(M+d)!`, or `None` when `ℓ` is not regular.
fn cone_formula(p: &HRep, form: &[Rational], m: u32) -> Option<Rational> {
    let d = p.dim() as u32;
    let verts = p.vertices();
    let mut total = Rational::zero();
    for c in p.cones() {
        let mut denom = Rational::one();
        for u in &c.rays {
            let v = ray_dot(form, u);
            if v.is_zero() {
                return None;
            }
            denom *= -v;
        }
        let s = linalg::dot(form, &verts[c.apex].point);
        total += &c.parallelepiped_volume * crate::ratpoly::rational_pow(&s, m + d) / denom;
    }
    Some(total * Rational::new(factorial(m), factorial(m + d)))
}

pub fn volume(p: &HRep) -> Rational {
    let form = regularizing_form(p);
    cone_formula(p, &form, 0).expect("regularizing form is regular")
}

/// Volume evaluated with the given form, `None` if it is not regular for the cones.
pub fn volume_with_form(p: &HRep, form: &[Rational]) -> Option<Rational> {
    cone_formula(p, form, 0)
}

/// `∫_P ⟨ℓ,x⟩^M dx`.
pub fn integrate_linear_form_power(p: &HRep, form: &[Rational], m: u32) -> Rational {
    if form.iter().all(Zero::is_zero) {
        return if m == 0 { volume(p) } else { Rational::zero() };
    }
    if let Some(v) = cone_formula(p, form, m) {
        return v;
    }
    let table = affine_table(p, &[(form.to_vec(), Rational::zero())], m);
    table.values[m as usize].clone() * Rational::from_integer(factorial(m))
}

pub fn integrate_affine_product(p: &HRep, factors: &[AffineFactor]) -> Result<AffineProductIntegralTable> {
    for f in factors {
        if f.form.len() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: f.form.len(),
            });
        }
    }
    let m: u32 = factors.iter().map(|f| f.power).sum();
    let forms: Vec<(Vec<Rational>, Rational)> = factors.iter().map(|f| (f.form.clone(), f.constant.clone())).collect();
    let mut table = affine_table(p, &forms, m);
    table.factors = factors.to_vec();
    Ok(table)
}

fn map_cones<T: Send>(cones: &[SimplicialCone], f: impl Fn(&SimplicialCone) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cones.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cones.iter().map(f).collect()
    }
}

/// Table of `∫_P ∏ (⟨ℓ_i,x⟩ + r_i)^{p_i}/p_i!` for all `|p| ≤ m`.
fn affine_table(p: &HRep, forms: &[(Vec<Rational>, Rational)], m: u32) -> AffineProductIntegralTable {
    let n = forms.len();
    let d = p.dim();
    let index = Arc::new(MonomialIndex::new(n, m));
    let aux = regularizing_form(p);
    let verts = p.vertices();
    let per_cone = map_cones(p.cones(), |cone| {
        let apex = &verts[cone.apex].point;
        let a: Vec<Rational> = forms.iter().map(|(l, r)| linalg::dot(l, apex) + r).collect();
        // ∏ exp(a_i t_i), written out directly
        let mut series = exponential_product(&index, &a);
        for u in &cone.rays {
            let b: Vec<Rational> = forms.iter().map(|(l, _)| ray_dot(l, u)).collect();
            let beta = ray_dot(&aux, u);
            series = series.div_affine(&b, &beta).expect("dimensions agree and β ≠ 0");
        }
        let big_b = linalg::dot(&aux, apex);
        let slice = series.exp_aux_constant(&big_b, d as u32 * (m + 1));
        slice
            .into_iter()
            .map(|v| v * &cone.parallelepiped_volume)
            .collect::<Vec<_>>()
    });
    let mut values = vec![Rational::zero(); index.len()];
    for cone_values in per_cone {
        for (acc, v) in values.iter_mut().zip(cone_values) {
            *acc += v;
        }
    }
    AffineProductIntegralTable {
        factors: forms
            .iter()
            .map(|(l, r)| AffineFactor {
                form: l.clone(),
                constant: r.clone(),
                power: 0,
            })
            .collect(),
        max_degree: m,
        index,
        values,
    }
}

fn exponential_product(index: &Arc<MonomialIndex>, a: &[Rational]) -> TruncatedSeries {
    let n = a.len();
    let m = index.max_degree();
    // powers[i][k] = a_i^k / k!
    let powers: Vec<Vec<Rational>> = a
        .iter()
        .map(|ai| {
            let mut row = Vec::with_capacity(m as usize + 1);
            let mut x = Rational::one();
            for k in 0..=m {
                if k > 0 {
                    x = x * ai / Rational::from_integer(BigInt::from(k));
                }
                row.push(x.clone());
            }
            row
        })
        .collect();
    let terms = (0..index.len()).map(|idx| {
        let e = index.exponents(idx);
        let c = (0..n).fold(Rational::one(), |acc, i| acc * &powers[i][e[i] as usize]);
        (e.to_vec(), 0i64, c)
    });
    TruncatedSeries::from_terms(n, m, terms).expect("exponent vectors have length n")
}

/// `Σ_q Σ_M W[q][M] ∫_P ⟨q,x⟩^M / M! dx` for integer directions `q` and integer weights.
fn integrate_directions(p: &HRep, directions: &BTreeMap<Vec<BigInt>, Vec<BigInt>>, max_power: u32) -> Rational {
    let d = p.dim() as u32;
    let verts = p.vertices();
    let cones = p.cones();
    // Vertices as σ_v / δ with a common denominator.
    let delta = verts
        .iter()
        .flat_map(|v| v.point.iter())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let sigma: Vec<Vec<BigInt>> = verts
        .iter()
        .map(|v| v.point.iter().map(|x| x.numer() * (&delta / x.denom())).collect())
        .collect();
    // scale[M] = δ^{Mmax−M} · (Mmax+d)! / (M+d)!
    let mut scale = vec![BigInt::one(); max_power as usize + 1];
    for m in (0..max_power as usize).rev() {
        scale[m] = &scale[m + 1] * &delta * BigInt::from(m as u32 + d + 1);
    }
    let common = num_traits::pow(delta.clone(), (max_power + d) as usize) * factorial(max_power + d);

    let entries: Vec<(&Vec<BigInt>, &Vec<BigInt>)> = directions.iter().collect();
    let contribution = |(q, w): &(&Vec<BigInt>, &Vec<BigInt>)| -> Rational {
        let form: Vec<Rational> = q.iter().map(|x| Rational::from_integer(x.clone())).collect();
        if !is_regular(&form, cones) {
            let table = affine_table(p, &[(form, Rational::zero())], max_power);
            return w
                .iter()
                .zip(&table.values)
                .filter(|(wm, _)| !wm.is_zero())
                .fold(Rational::zero(), |acc, (wm, t)| {
                    acc + Rational::from_integer(wm.clone()) * t
                });
        }
        // v[M] = W_M · scale[M]; each vertex then needs only a Horner pass in the small integer z
        let v: Vec<BigInt> = w
            .iter()
            .zip(&scale)
            .map(|(wm, sm)| if wm.is_zero() { BigInt::zero() } else { wm * sm })
            .collect();
        let mut total = Rational::zero();
        for (vi, s) in sigma.iter().enumerate() {
            let mut factor = Rational::zero();
            for c in cones.iter().filter(|c| c.apex == vi) {
                let denom = c.rays.iter().fold(BigInt::one(), |acc, u| {
                    acc * -q.iter().zip(u).fold(BigInt::zero(), |s, (a, b)| s + a * b)
                });
                factor += &c.parallelepiped_volume / Rational::from_integer(denom);
            }
            if factor.is_zero() {
                continue;
            }
            let z: BigInt = q.iter().zip(s).fold(BigInt::zero(), |acc, (a, b)| acc + a * b);
            let mut h = BigInt::zero();
            for vm in v.iter().rev() {
                h *= &z;
                h += vm;
            }
            h *= num_traits::pow(z, d as usize);
            total += factor * Rational::from_integer(h);
        }
        total / Rational::from_integer(common.clone())
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        entries
            .par_iter()
            .map(contribution)
            .reduce(Rational::zero, |a, b| a + b)
    }
    #[cfg(not(feature = "parallel"))]
    {
        entries.iter().map(contribution).fold(Rational::zero(), |a, b| a + b)
    }
}

fn integrate_table(p: &HRep, table: &DirectionTable) -> Rational {
    let directions: BTreeMap<Vec<BigInt>, Vec<BigInt>> = table
        .weights
        .iter()
        .map(|(q, w)| (q.iter().map(|&x| BigInt::from(x)).collect(), w.clone()))
        .collect();
    let mut total = integrate_directions(p, &directions, table.max_power);
    if !table.constant.is_zero() {
        total += Rational::from_integer(table.constant.clone()) * volume(p);
    }
    total / Rational::from_integer(table.denominator.clone())
}

/// `Σ ∫_P c ⟨ℓ,x⟩^M dx` over the given terms.
pub fn integrate_linear_forms(p: &HRep, forms: &[LinearFormPower]) -> Result<Rational> {
    let mut grouped: BTreeMap<Vec<BigInt>, BTreeMap<u32, Rational>> = BTreeMap::new();
    let mut constant = Rational::zero();
    let mut max_power = 0;
    for t in forms {
        if t.form.len() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: t.form.len(),
            });
        }
        if t.form.iter().all(Zero::is_zero) {
            if t.power == 0 {
                constant += &t.coefficient;
            }
            continue;
        }
        let (q, lambda) = linalg::direction(&t.form);
        // c ⟨λq,x⟩^M = (c λ^M M!) ⟨q,x⟩^M / M!
        let w = &t.coefficient
            * crate::ratpoly::rational_pow(&lambda, t.power)
            * Rational::from_integer(factorial(t.power));
        *grouped
            .entry(q)
            .or_default()
            .entry(t.power)
            .or_insert_with(Rational::zero) += w;
        max_power = max_power.max(t.power);
    }
    let den = crate::ratpoly::common_denominator(grouped.values().flat_map(|m| m.values()));
    let directions = grouped
        .into_iter()
        .map(|(q, by_power)| {
            let mut w = vec![BigInt::zero(); max_power as usize + 1];
            for (m, c) in by_power {
                w[m as usize] = (c * Rational::from_integer(den.clone())).to_integer();
            }
            (q, w)
        })
        .collect();
    let total = integrate_directions(p, &directions, max_power) / Rational::from_integer(den);
    Ok(total + constant * volume(p))
}

/// `Σ c_α ∫_P g^α dx` using one affine-product table for all facets.
pub fn integrate_handelman(p: &HRep, monomials: &[HandelmanMonomial]) -> Result<Rational> {
    let n = p.num_constraints();
    if let Some(bad) = monomials.iter().find(|m| m.exponent.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.exponent.len(),
        });
    }
    let m = monomials
        .iter()
        .map(|h| h.exponent.iter().sum::<u32>())
        .max()
        .unwrap_or(0);
    let forms: Vec<(Vec<Rational>, Rational)> = p
        .a()
        .iter()
        .zip(p.b())
        .map(|(row, b)| (row.iter().map(|x| -x.clone()).collect(), b.clone()))
        .collect();
    let table = affine_table(p, &forms, m);
    let mut total = Rational::zero();
    for h in monomials {
        let alpha_fact = h.exponent.iter().fold(BigInt::one(), |acc, &a| acc * factorial(a));
        let v = table.get(&h.exponent).expect("exponent within table degree");
        total += &h.coefficient * Rational::from_integer(alpha_fact) * v;
    }
    Ok(total)
}

/// `∫_P f(x) dx`.
///
/// The Handelman backend expects a certificate with `Σ c_α g^α = f + s`; it
/// integrates the certificate and removes `s · vol(P)`.
pub fn integrate_polynomial(p: &HRep, f: &Polynomial, backend: Backend<'_>) -> Result<Rational> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: f.dim(),
        });
    }
    match backend {
        Backend::LinearForms => Ok(integrate_table(p, &direction_table(f))),
        Backend::Handelman(cert) => {
            if !verify_certificate(cert, f) {
                return Err(Error::UnverifiedCertificate);
            }
            let total = integrate_handelman(p, &cert.monomials)?;
            Ok(total - &cert.shift * volume(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{find_certificate, Objective};
    use crate::ratpoly::{int, rat};

    fn triangle() -> HRep {
        HRep::parse("3 2\n-1 -1 0\n-1 0 -1\n3 1 1\n").unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn volumes() {
        assert_eq!(volume(&triangle()), rat(1, 2));
        assert_eq!(
            volume(&HRep::from_box(&[(int(-1), int(1)), (int(-1), int(1))]).unwrap()),
            int(4)
        );
        assert_eq!(volume(&HRep::unit_simplex(3).unwrap()), rat(1, 6));
    }

    #[test]
    fn linear_form_powers() {
        let s = HRep::unit_simplex(2).unwrap();
        assert_eq!(integrate_linear_form_power(&s, &ints(&[1, 1]), 2), rat(1, 4));
        assert_eq!(integrate_linear_form_power(&triangle(), &ints(&[1, 0]), 1), rat(2, 3));
        assert_eq!(integrate_linear_form_power(&triangle(), &ints(&[0, 0]), 0), rat(1, 2));
    }

    #[test]
    fn affine_product_examples() {
        let i = HRep::from_box(&[(int(-1), int(1))]).unwrap();
        let t = integrate_affine_product(
            &i,
            &[AffineFactor {
                form: ints(&[1]),
                constant: int(1),
                power: 2,
            }],
        )
        .unwrap();
        assert_eq!(t.get(&[2]), Some(&rat(4, 3)));
        let b = HRep::unit_box(2).unwrap();
        let t = integrate_affine_product(
            &b,
            &[AffineFactor {
                form: ints(&[1, 1]),
                constant: int(1),
                power: 2,
            }],
        )
        .unwrap();
        assert_eq!(t.get(&[2]), Some(&rat(25, 12)));
        let t = integrate_affine_product(&triangle(), &[]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.get(&[]), Some(&rat(1, 2)));
    }

    #[test]
    fn polynomial_backends() {
        let b = HRep::unit_box(2).unwrap();
        let f = Polynomial::from_terms(2, [(vec![2, 1], int(1))]).unwrap();
        assert_eq!(integrate_polynomial(&b, &f, Backend::LinearForms).unwrap(), rat(1, 6));
        let cert = find_certificate(&f, &b, 3, Objective::SparseShift).unwrap();
        assert_eq!(
            integrate_polynomial(&b, &f, Backend::Handelman(&cert)).unwrap(),
            rat(1, 6)
        );
        assert_eq!(
            integrate_polynomial(&triangle(), &Polynomial::one(2), Backend::LinearForms).unwrap(),
            rat(1, 2)
        );
    }

    #[test]
    fn handelman_rejects_wrong_certificate() {
        let i = HRep::parse("2 1\n1 -1\n1 1\n").unwrap();
        let f = Polynomial::from_terms(1, [(vec![2], int(1)), (vec![1], int(-1))]).unwrap();
        let mut cert = find_certificate(&f, &i, 2, Objective::SparseShift).unwrap();
        cert.shift = int(2);
        assert_eq!(
            integrate_polynomial(&i, &f, Backend::Handelman(&cert)).unwrap_err(),
            Error::UnverifiedCertificate
        );
    }

    #[test]
    fn rational_linear_forms_with_signs() {
        let t = triangle();
        let forms = vec![
            LinearFormPower {
                coefficient: rat(3, 2),
                form: vec![rat(-1, 2), int(1)],
                power: 3,
            },
            LinearFormPower {
                coefficient: int(2),
                form: vec![int(1), int(-2)],
                power: 3,
            },
            LinearFormPower {
                coefficient: int(5),
                form: ints(&[0, 0]),
                power: 0,
            },
        ];
        let direct: Rational = forms
            .iter()
            .map(|f| {
                if f.power == 0 {
                    &f.coefficient * volume(&t)
                } else {
                    &f.coefficient * integrate_linear_form_power(&t, &f.form, f.power)
                }
            })
            .sum();
        assert_eq!(integrate_linear_forms(&t, &forms).unwrap(), direct);
        let poly = crate::decompose::linear_forms_to_polynomial(2, &forms);
        assert_eq!(integrate_polynomial(&t, &poly, Backend::LinearForms).unwrap(), direct);
    }

    #[test]
    fn non_regular_direction_uses_series() {
        // (1,0) is orthogonal to the ray (0,1) of every box vertex cone
        let b = HRep::unit_box(2).unwrap();
        assert_eq!(integrate_linear_form_power(&b, &ints(&[1, 0]), 3), rat(1, 4));
        assert_eq!(integrate_linear_form_power(&b, &ints(&[1, 1]), 2), rat(7, 6));
    }
}
