//! Dense truncated series in main variables `t_1, …, t_n` whose coefficients are
//! Laurent polynomials in one auxiliary variable `τ`.
//!
//! Main-variable terms of total degree above the truncation order are discarded
//! after every multiplication. Auxiliary exponents simply add and are never
//! truncated.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{rational_pow, Rational};
use crate::error::{Error, Result};

/// Graded enumeration of all exponent vectors `p ∈ ℕ^n` with `|p| ≤ max_degree`.
#[derive(Debug)]
pub struct MonomialIndex {
    nvars: usize,
    max_degree: u32,
    exps: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
    /// `degree_start[k]` is the first index of degree `k`; one extra sentinel at the end.
    degree_start: Vec<usize>,
    /// `lower[i][v]` is the index of `exps[i] - e_v`, if that is a valid exponent.
    lower: Vec<Vec<Option<usize>>>,
}

impl MonomialIndex {
    pub fn new(nvars: usize, max_degree: u32) -> Self {
        let mut exps = Vec::new();
        let mut degree_start = Vec::with_capacity(max_degree as usize + 2);
        for deg in 0..=max_degree {
            degree_start.push(exps.len());
            let mut current = vec![0u32; nvars];
            compositions(deg, 0, &mut current, &mut exps);
        }
        degree_start.push(exps.len());
        let lookup: HashMap<Vec<u32>, usize> = exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let lower = exps
            .iter()
            .map(|e| {
                (0..nvars)
                    .map(|v| {
                        if e[v] == 0 {
                            return None;
                        }
                        let mut prev = e.clone();
                        prev[v] -= 1;
                        lookup.get(&prev).copied()
                    })
                    .collect()
            })
            .collect();
        MonomialIndex {
            nvars,
            max_degree,
            exps,
            lookup,
            degree_start,
            lower,
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn exponents(&self, idx: usize) -> &[u32] {
        &self.exps[idx]
    }

    pub fn position(&self, exps: &[u32]) -> Option<usize> {
        self.lookup.get(exps).copied()
    }

    fn degree_of(&self, idx: usize) -> u32 {
        self.exps[idx].iter().sum()
    }
}

fn compositions(remaining: u32, var: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if var == n - 1 {
        current[var] = remaining;
        out.push(current.clone());
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        compositions(remaining - e, var + 1, current, out);
    }
    current[var] = 0;
}

/// Laurent polynomial in `τ`, stored densely from exponent `lo` upward.
#[derive(Debug, Clone, Default, PartialEq)]
struct Laurent {
    lo: i64,
    coeffs: Vec<Rational>,
}

impl Laurent {
    fn monomial(e: i64, c: Rational) -> Self {
        if c.is_zero() {
            return Laurent::default();
        }
        Laurent { lo: e, coeffs: vec![c] }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    fn get(&self, e: i64) -> Rational {
        if self.is_zero() || e < self.lo || e > self.hi() {
            return Rational::zero();
        }
        self.coeffs[(e - self.lo) as usize].clone()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    /// `self += scale · τ^shift · other`
    fn add_scaled(&mut self, other: &Laurent, scale: &Rational, shift: i64) {
        if other.is_zero() || scale.is_zero() {
            return;
        }
        let olo = other.lo + shift;
        let ohi = other.hi() + shift;
        if self.is_zero() {
            self.lo = olo;
            self.coeffs = other.coeffs.iter().map(|c| c * scale).collect();
            self.trim();
            return;
        }
        let lo = self.lo.min(olo);
        let hi = self.hi().max(ohi);
        if lo < self.lo {
            let pad = (self.lo - lo) as usize;
            let mut fresh = vec![Rational::zero(); pad];
            fresh.append(&mut self.coeffs);
            self.coeffs = fresh;
            self.lo = lo;
        }
        self.coeffs.resize((hi - self.lo + 1) as usize, Rational::zero());
        for (k, c) in other.coeffs.iter().enumerate() {
            if !c.is_zero() {
                self.coeffs[(olo - self.lo) as usize + k] += c * scale;
            }
        }
        self.trim();
    }

    /// `self += a · b`
    fn add_product(&mut self, a: &Laurent, b: &Laurent) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        for (k, c) in a.coeffs.iter().enumerate() {
            if !c.is_zero() {
                self.add_scaled(b, c, a.lo + k as i64);
            }
        }
    }
}

/// Truncated series `Σ_{|p| ≤ M} Σ_{lo ≤ e ≤ hi} c_{p,e} t^p τ^e`.
#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    index: Arc<MonomialIndex>,
    aux_lo: i64,
    aux_hi: i64,
    rows: Vec<Laurent>,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.index.nvars == other.index.nvars
            && self.index.max_degree == other.index.max_degree
            && self.rows == other.rows
    }
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, max_degree: u32) -> Self {
        Self::zero_with_index(Arc::new(MonomialIndex::new(nvars, max_degree)))
    }

    pub fn zero_with_index(index: Arc<MonomialIndex>) -> Self {
        let rows = vec![Laurent::default(); index.len()];
        TruncatedSeries {
            index,
            aux_lo: 0,
            aux_hi: 0,
            rows,
        }
    }

    pub fn one(nvars: usize, max_degree: u32) -> Self {
        let mut s = Self::zero(nvars, max_degree);
        s.rows[0] = Laurent::monomial(0, Rational::one());
        s
    }

    /// Builds a series from `(p, e, c)` triples; terms with `|p| > max_degree` are dropped.
    /// The auxiliary range is the smallest one holding every given exponent.
    pub fn from_terms<I>(nvars: usize, max_degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, i64, Rational)>,
    {
        let mut s = Self::zero(nvars, max_degree);
        let mut range: Option<(i64, i64)> = None;
        for (p, e, c) in terms {
            if p.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: p.len(),
                });
            }
            range = Some(match range {
                None => (e, e),
                Some((lo, hi)) => (lo.min(e), hi.max(e)),
            });
            if let Some(idx) = s.index.position(&p) {
                s.rows[idx].add_scaled(&Laurent::monomial(0, c), &Rational::one(), e);
            }
        }
        let (lo, hi) = range.unwrap_or((0, 0));
        s.aux_lo = lo;
        s.aux_hi = hi;
        Ok(s)
    }

    /// Truncated `exp(a·t_var) = Σ_{k ≤ M} a^k t_var^k / k!`.
    pub fn exponential(nvars: usize, max_degree: u32, var: usize, a: &Rational) -> Self {
        let mut term = Rational::one();
        let mut terms = Vec::with_capacity(max_degree as usize + 1);
        for k in 0..=max_degree {
            if k > 0 {
                term = term * a / Rational::from_integer(k.into());
            }
            let mut p = vec![0; nvars];
            p[var] = k;
            terms.push((p, 0, term.clone()));
        }
        Self::from_terms(nvars, max_degree, terms).expect("exponent vectors have length nvars")
    }

    /// Laurent expansion of `1 / (-⟨b, t⟩ - β τ)` around `t = 0`:
    /// `Σ_{k ≤ M} (-1)^{k+1} ⟨b, t⟩^k β^{-1-k} τ^{-1-k}`.
    pub fn inverse_affine(max_degree: u32, b: &[Rational], beta: &Rational) -> Result<Self> {
        if beta.is_zero() {
            return Err(Error::InvalidArgument("auxiliary coefficient β must be nonzero".into()));
        }
        let nvars = b.len();
        let index = Arc::new(MonomialIndex::new(nvars, max_degree));
        // power[idx] holds the coefficient of t^p in ⟨b,t⟩^k for |p| = k
        let mut power = vec![Rational::zero(); index.len()];
        power[0] = Rational::one();
        let inv_beta = beta.recip();
        let mut out = Self::zero_with_index(index.clone());
        let mut scale = -inv_beta.clone();
        for k in 0..=max_degree {
            let start = index.degree_start[k as usize];
            let end = index.degree_start[k as usize + 1];
            if k > 0 {
                for idx in start..end {
                    let mut acc = Rational::zero();
                    for (v, bv) in b.iter().enumerate() {
                        if let Some(prev) = index.lower[idx][v] {
                            acc += bv * &power[prev];
                        }
                    }
                    power[idx] = acc;
                }
                scale = -(scale * &inv_beta);
            }
            for (row, value) in out.rows[start..end].iter_mut().zip(&power[start..end]) {
                *row = Laurent::monomial(-1 - k as i64, &scale * value);
            }
        }
        out.aux_lo = -(max_degree as i64) - 1;
        out.aux_hi = -1;
        Ok(out)
    }

    pub fn nvars(&self) -> usize {
        self.index.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.index.max_degree
    }

    pub fn index(&self) -> &Arc<MonomialIndex> {
        &self.index
    }

    /// Declared auxiliary exponent range `[lo, hi]`.
    pub fn aux_range(&self) -> (i64, i64) {
        (self.aux_lo, self.aux_hi)
    }

    pub fn coeff(&self, p: &[u32], e: i64) -> Rational {
        self.index
            .position(p)
            .map(|idx| self.rows[idx].get(e))
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms `(p, e, c)` in graded order of `p`, then ascending `e`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], i64, &Rational)> + '_ {
        self.rows.iter().enumerate().flat_map(move |(idx, row)| {
            row.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(k, c)| (self.index.exponents(idx), row.lo + k as i64, c))
        })
    }

    /// Product truncated at main total degree `max_degree`.
    pub fn mul_truncated(&self, other: &TruncatedSeries, max_degree: u32) -> Result<TruncatedSeries> {
        if self.nvars() != other.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: other.nvars(),
            });
        }
        let index = if self.max_degree() == max_degree {
            self.index.clone()
        } else if other.max_degree() == max_degree {
            other.index.clone()
        } else {
            Arc::new(MonomialIndex::new(self.nvars(), max_degree))
        };
        let mut out = TruncatedSeries::zero_with_index(index.clone());
        out.aux_lo = self.aux_lo + other.aux_lo;
        out.aux_hi = self.aux_hi + other.aux_hi;
        let mut target = vec![0u32; self.nvars()];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let da = self.index.degree_of(i);
            if da > max_degree {
                break;
            }
            let budget = (max_degree - da).min(other.max_degree()) as usize;
            let end = other.index.degree_start[budget + 1];
            let pa = self.index.exponents(i);
            for (j, b) in other.rows[..end].iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for (t, (x, y)) in target.iter_mut().zip(pa.iter().zip(other.index.exponents(j))) {
                    *t = x + y;
                }
                let k = index.position(&target).expect("degree within truncation order");
                out.rows[k].add_product(a, b);
            }
        }
        Ok(out)
    }

    /// Product of `factors`, truncated at main degree `max_degree` after every multiplication.
    pub fn truncated_product(factors: &[TruncatedSeries], max_degree: u32) -> Result<TruncatedSeries> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidArgument("truncated_product needs at least one factor".into()))?;
        let mut acc = TruncatedSeries::one(first.nvars(), max_degree);
        for f in factors {
            acc = acc.mul_truncated(f, max_degree)?;
        }
        Ok(acc)
    }

    /// Multiplies by [`TruncatedSeries::inverse_affine`]`(M, b, β)` without forming it,
    /// solving `R · (-⟨b,t⟩ - βτ) = self` degree by degree.
    pub fn div_affine(&self, b: &[Rational], beta: &Rational) -> Result<TruncatedSeries> {
        if b.len() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: b.len(),
            });
        }
        if beta.is_zero() {
            return Err(Error::InvalidArgument("auxiliary coefficient β must be nonzero".into()));
        }
        let factor = -beta.recip();
        let mut out = TruncatedSeries::zero_with_index(self.index.clone());
        out.aux_lo = self.aux_lo - self.max_degree() as i64 - 1;
        out.aux_hi = self.aux_hi - 1;
        for idx in 0..self.rows.len() {
            let mut acc = self.rows[idx].clone();
            for (v, bv) in b.iter().enumerate() {
                if bv.is_zero() {
                    continue;
                }
                if let Some(prev) = self.index.lower[idx][v] {
                    let (done, _) = out.rows.split_at(idx);
                    acc.add_scaled(&done[prev], bv, 0);
                }
            }
            let mut row = Laurent::default();
            row.add_scaled(&acc, &factor, -1);
            out.rows[idx] = row;
        }
        Ok(out)
    }

    /// Coefficients of `τ^e` as a dense table over the main monomials.
    pub fn aux_slice(&self, e: i64) -> Vec<Rational> {
        self.rows.iter().map(|r| r.get(e)).collect()
    }

    /// Multiplies by `Σ_{j ≤ aux_degree} B^j τ^j / j!` and returns the `τ^0` slice.
    pub fn exp_aux_constant(&self, b: &Rational, aux_degree: u32) -> Vec<Rational> {
        let mut powers = Vec::with_capacity(aux_degree as usize + 1);
        let mut term = Rational::one();
        for j in 0..=aux_degree {
            if j > 0 {
                term = term * b / Rational::from_integer(j.into());
            }
            powers.push(term.clone());
        }
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Rational::zero();
                for (k, c) in row.coeffs.iter().enumerate() {
                    let e = row.lo + k as i64;
                    if e <= 0 && (-e) as u32 <= aux_degree && !c.is_zero() {
                        acc += c * &powers[(-e) as usize];
                    }
                }
                acc
            })
            .collect()
    }

    /// Auxiliary-only series `Σ_{j ≤ aux_degree} B^j τ^j / j!` in `nvars` main variables.
    pub fn aux_exponential(nvars: usize, max_degree: u32, b: &Rational, aux_degree: u32) -> Self {
        let terms = (0..=aux_degree).map(|j| {
            let c = rational_pow(b, j) / Rational::from_integer(super::factorial(j));
            (vec![0; nvars], j as i64, c)
        });
        Self::from_terms(nvars, max_degree, terms).expect("exponent vectors have length nvars")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{int, rat};
    use super::*;
    use proptest::prelude::*;

    fn series(nvars: usize, m: u32, terms: &[(&[u32], i64, Rational)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(nvars, m, terms.iter().map(|(p, e, c)| (p.to_vec(), *e, c.clone()))).unwrap()
    }

    #[test]
    fn index_is_graded_and_complete() {
        let idx = MonomialIndex::new(3, 4);
        assert_eq!(idx.len(), 35);
        let degrees: Vec<u32> = (0..idx.len()).map(|i| idx.degree_of(i)).collect();
        assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(MonomialIndex::new(0, 5).len(), 1);
    }

    #[test]
    fn square_truncated_at_one() {
        let a = series(1, 1, &[(&[0], 0, int(1)), (&[1], 0, int(1))]);
        let prod = TruncatedSeries::truncated_product(&[a.clone(), a], 1).unwrap();
        assert_eq!(prod, series(1, 1, &[(&[0], 0, int(1)), (&[1], 0, int(2))]));
    }

    #[test]
    fn one_is_identity() {
        let s = series(
            2,
            3,
            &[(&[1, 1], -2, rat(3, 4)), (&[0, 3], 5, int(-1)), (&[0, 0], 0, int(2))],
        );
        let prod = TruncatedSeries::truncated_product(&[TruncatedSeries::one(2, 3), s.clone()], 3).unwrap();
        assert_eq!(prod, s);
        assert_eq!(prod.aux_range(), (-2, 5));
    }

    #[test]
    fn two_variable_product() {
        let a = series(
            2,
            2,
            &[(&[0, 0], 0, int(1)), (&[1, 0], 0, int(1)), (&[0, 1], 0, int(1))],
        );
        let b = series(2, 2, &[(&[0, 0], 0, int(1)), (&[1, 0], 0, int(-1))]);
        let prod = TruncatedSeries::truncated_product(&[a, b], 2).unwrap();
        let expected = series(
            2,
            2,
            &[
                (&[0, 0], 0, int(1)),
                (&[0, 1], 0, int(1)),
                (&[2, 0], 0, int(-1)),
                (&[1, 1], 0, int(-1)),
            ],
        );
        assert_eq!(prod, expected);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = TruncatedSeries::one(1, 2);
        let b = TruncatedSeries::one(2, 2);
        assert!(matches!(
            TruncatedSeries::truncated_product(&[a, b], 2),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn laurent_exponents_add() {
        let a = series(1, 2, &[(&[0], -3, int(2)), (&[1], 1, int(1))]);
        let b = series(1, 2, &[(&[1], -1, int(5))]);
        let prod = a.mul_truncated(&b, 2).unwrap();
        assert_eq!(prod.coeff(&[1], -4), int(10));
        assert_eq!(prod.coeff(&[2], 0), int(5));
        assert_eq!(prod.aux_range(), (-4, 0));
    }

    #[test]
    fn inverse_affine_times_denominator_is_one() {
        // (-⟨b,t⟩ - βτ) · h = 1 up to main degree M
        let b = vec![rat(2, 3), int(-1)];
        let beta = rat(5, 2);
        let m = 4;
        let h = TruncatedSeries::inverse_affine(m, &b, &beta).unwrap();
        let denom = series(
            2,
            m,
            &[
                (&[1, 0], 0, -b[0].clone()),
                (&[0, 1], 0, -b[1].clone()),
                (&[0, 0], 1, -beta.clone()),
            ],
        );
        let prod = h.mul_truncated(&denom, m).unwrap();
        // degree-M terms of h times ⟨b,t⟩ are truncated away, the rest telescopes to 1
        let mut leftover = prod.clone();
        leftover.rows[0] = Laurent::default();
        for (p, e, c) in prod.terms() {
            if p.iter().sum::<u32>() == 0 {
                assert_eq!((e, c.clone()), (0, int(1)));
            }
        }
        for (p, _, _) in leftover.terms() {
            assert_eq!(p.iter().sum::<u32>(), m, "only truncation boundary may survive");
        }
    }

    #[test]
    fn aux_exponential_slice_matches_product() {
        let b = rat(-3, 2);
        let g = TruncatedSeries::inverse_affine(3, &[int(1), rat(1, 2)], &int(3)).unwrap();
        let e = TruncatedSeries::aux_exponential(2, 3, &b, 8);
        let full = g.mul_truncated(&e, 3).unwrap();
        assert_eq!(g.exp_aux_constant(&b, 8), full.aux_slice(0));
    }

    fn arb_series(nvars: usize, m: u32) -> impl Strategy<Value = TruncatedSeries> {
        prop::collection::vec(
            (prop::collection::vec(0u32..=m, nvars), -3i64..3, -6i64..7, 1i64..4),
            0..8,
        )
        .prop_map(move |terms| {
            TruncatedSeries::from_terms(nvars, m, terms.into_iter().map(|(p, e, n, d)| (p, e, rat(n, d)))).unwrap()
        })
    }

    fn untruncated_then_cut(a: &TruncatedSeries, b: &TruncatedSeries, m: u32) -> TruncatedSeries {
        let mut acc: HashMap<(Vec<u32>, i64), Rational> = HashMap::new();
        for (pa, ea, ca) in a.terms() {
            for (pb, eb, cb) in b.terms() {
                let p: Vec<u32> = pa.iter().zip(pb).map(|(x, y)| x + y).collect();
                *acc.entry((p, ea + eb)).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        TruncatedSeries::from_terms(
            a.nvars(),
            m,
            acc.into_iter()
                .filter(|((p, _), _)| p.iter().sum::<u32>() <= m)
                .map(|((p, e), c)| (p, e, c)),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn truncation_matches_full_product(
            (a, b, m) in (1usize..4, 0u32..7).prop_flat_map(|(n, m)| (arb_series(n, m), arb_series(n, m), Just(m))),
        ) {
            let prod = a.mul_truncated(&b, m).unwrap();
            prop_assert_eq!(prod, untruncated_then_cut(&a, &b, m));
        }

        #[test]
        fn div_affine_equals_explicit_product(
            b in prop::collection::vec(-4i64..5, 1..4),
            beta in prop_oneof![-5i64..-1, 1i64..6],
            m in 0u32..5,
            a in -3i64..4,
        ) {
            let n = b.len();
            let b: Vec<Rational> = b.into_iter().map(int).collect();
            let beta = int(beta);
            let base = TruncatedSeries::truncated_product(
                &(0..n).map(|v| TruncatedSeries::exponential(n, m, v, &rat(a + v as i64, 2))).collect::<Vec<_>>(),
                m,
            ).unwrap();
            let h = TruncatedSeries::inverse_affine(m, &b, &beta).unwrap();
            let explicit = base.mul_truncated(&h, m).unwrap();
            let fast = base.div_affine(&b, &beta).unwrap();
            prop_assert_eq!(fast.aux_range(), explicit.aux_range());
            prop_assert_eq!(fast, explicit);
        }
    }
}
