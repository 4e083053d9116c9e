//! Rational polytopes in H-representation: vertices, tangent cones and their
//! simplicial triangulations, coordinate widths, and scaled lattice points.

pub(crate) mod linalg;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlp::{self, LpProblem, LpStatus, Sense, VarBound};
use crate::ratpoly::{parse_rational, Polynomial, Rational};

/// `{x : A x ≤ b}`, validated bounded and full-dimensional.
#[derive(Debug, Clone)]
pub struct HRep {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    bbox: Vec<(Rational, Rational)>,
    vertices: OnceLock<Vec<Vertex>>,
    cones: OnceLock<Vec<SimplicialCone>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub point: Vec<Rational>,
    /// Indices of the constraints holding with equality, ascending.
    pub tight: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialCone {
    /// Index into [`HRep::vertices`].
    pub apex: usize,
    /// Primitive integer rays.
    pub rays: Vec<Vec<BigInt>>,
    /// `|det(u_1, …, u_d)|`.
    pub parallelepiped_volume: Rational,
}

impl SimplicialCone {
    pub fn rays_rational(&self) -> Vec<Vec<Rational>> {
        self.rays
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Widths {
    /// `M`: largest extent along a coordinate axis.
    pub width: Rational,
    /// `M̃`: largest absolute value of any coordinate over the polytope.
    pub max_abs: Rational,
}

impl HRep {
    pub fn new(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> Result<Self> {
        let d = a.first().map_or(0, Vec::len);
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        for row in &a {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            if row.iter().all(Zero::is_zero) {
                return Err(Error::InvalidArgument("constraint with zero normal vector".into()));
            }
        }
        let normalized: Vec<Vec<Rational>> = a
            .iter()
            .zip(&b)
            .map(|(row, bi)| {
                let scale = row.iter().find(|x| !x.is_zero()).map(|x| x.abs()).expect("nonzero row");
                row.iter().chain(std::iter::once(bi)).map(|x| x / &scale).collect()
            })
            .collect();
        for i in 0..normalized.len() {
            for j in i + 1..normalized.len() {
                if normalized[i] == normalized[j] {
                    return Err(Error::DuplicateConstraint { first: i, second: j });
                }
            }
        }
        check_interior(&a, &b)?;
        let mut bbox = Vec::with_capacity(d);
        for i in 0..d {
            let lo = optimize_coordinate(&a, &b, i, false)?;
            let hi = optimize_coordinate(&a, &b, i, true)?;
            bbox.push((lo, hi));
        }
        Ok(HRep {
            a,
            b,
            bbox,
            vertices: OnceLock::new(),
            cones: OnceLock::new(),
        })
    }

    /// Parses `n d` followed by `n` lines `b_i a_i1 … a_id` meaning `⟨a_i, x⟩ ≤ b_i`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing `n d` header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(hline, "header must be two integers `n d`"))?;
        let [n, d] = dims[..] else {
            return Err(Error::parse(hline, "header must be two integers `n d`"));
        };
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for (line, text) in lines {
            let vals: Vec<Rational> = text
                .split_whitespace()
                .map(|t| parse_rational(t).ok_or_else(|| Error::parse(line, format!("bad rational `{t}`"))))
                .collect::<Result<_>>()?;
            if vals.len() != d + 1 {
                return Err(Error::parse(
                    line,
                    format!("expected {} numbers, found {}", d + 1, vals.len()),
                ));
            }
            if a.len() == n {
                return Err(Error::parse(line, format!("more than {n} constraint rows")));
            }
            b.push(vals[0].clone());
            a.push(vals[1..].to_vec());
        }
        if a.len() != n {
            return Err(Error::parse(
                hline,
                format!("expected {n} constraint rows, found {}", a.len()),
            ));
        }
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        HRep::new(a, b)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.a.len(), self.dim());
        for (row, bi) in self.a.iter().zip(&self.b) {
            out.push_str(&bi.to_string());
            for x in row {
                out.push(' ');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Axis-aligned box `∏ [lo_i, hi_i]`.
    pub fn from_box(bounds: &[(Rational, Rational)]) -> Result<Self> {
        let d = bounds.len();
        let mut a = Vec::with_capacity(2 * d);
        let mut b = Vec::with_capacity(2 * d);
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            let mut row = vec![Rational::zero(); d];
            row[i] = -Rational::one();
            a.push(row.clone());
            b.push(-lo.clone());
            row[i] = Rational::one();
            a.push(row);
            b.push(hi.clone());
        }
        HRep::new(a, b)
    }

    pub fn unit_box(d: usize) -> Result<Self> {
        HRep::from_box(&vec![(Rational::zero(), Rational::one()); d])
    }

    /// `{x ≥ 0, x_1 + … + x_d ≤ 1}`.
    pub fn unit_simplex(d: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(d + 1);
        let mut b = Vec::with_capacity(d + 1);
        for i in 0..d {
            let mut row = vec![Rational::zero(); d];
            row[i] = -Rational::one();
            a.push(row);
            b.push(Rational::zero());
        }
        a.push(vec![Rational::one(); d]);
        b.push(Rational::one());
        HRep::new(a, b)
    }

    /// `P + v`.
    pub fn translate(&self, v: &[Rational]) -> Result<Self> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let b = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| bi + linalg::dot(row, v))
            .collect();
        HRep::new(self.a.clone(), b)
    }

    pub fn dim(&self) -> usize {
        self.bbox.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    /// `g_i(x) = b_i - ⟨A_i, x⟩`, nonnegative on the polytope.
    pub fn facet_polynomial(&self, i: usize) -> Polynomial {
        let neg: Vec<Rational> = self.a[i].iter().map(|x| -x.clone()).collect();
        Polynomial::affine(self.b[i].clone(), &neg)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim() && self.a.iter().zip(&self.b).all(|(row, bi)| linalg::dot(row, x) <= *bi)
    }

    /// Per-coordinate `(min, max)` over the polytope.
    pub fn bounding_box(&self) -> &[(Rational, Rational)] {
        &self.bbox
    }

    pub fn vertices(&self) -> &[Vertex] {
        self.vertices.get_or_init(|| compute_vertices(&self.a, &self.b))
    }

    pub fn cones(&self) -> &[SimplicialCone] {
        self.cones.get_or_init(|| compute_cones(&self.a, self.vertices()))
    }

    /// Average of the vertices.
    pub fn vertex_barycenter(&self) -> Vec<Rational> {
        let verts = self.vertices();
        let n = Rational::from_integer(BigInt::from(verts.len()));
        (0..self.dim())
            .map(|i| verts.iter().fold(Rational::zero(), |acc, v| acc + &v.point[i]) / &n)
            .collect()
    }
}

fn check_interior(a: &[Vec<Rational>], b: &[Rational]) -> Result<()> {
    // max ε subject to A x + ε 1 ≤ b, ε ≤ 1
    let d = a[0].len();
    let mut lp = LpProblem::new(d + 1);
    lp.bounds = vec![VarBound::Free; d + 1];
    lp.objective[d] = -Rational::one();
    for (row, bi) in a.iter().zip(b) {
        let mut r = row.clone();
        r.push(Rational::one());
        lp.add_row(r, Sense::Le, bi.clone());
    }
    let mut cap = vec![Rational::zero(); d + 1];
    cap[d] = Rational::one();
    lp.add_row(cap, Sense::Le, Rational::one());
    let sol = exactlp::solve(&lp)?;
    match sol.status {
        LpStatus::Optimal if sol.values[d].is_positive() => Ok(()),
        _ => Err(Error::EmptyInterior),
    }
}

fn optimize_coordinate(a: &[Vec<Rational>], b: &[Rational], i: usize, maximize: bool) -> Result<Rational> {
    let d = a[0].len();
    let mut lp = LpProblem::new(d);
    lp.bounds = vec![VarBound::Free; d];
    lp.objective[i] = if maximize { -Rational::one() } else { Rational::one() };
    for (row, bi) in a.iter().zip(b) {
        lp.add_row(row.clone(), Sense::Le, bi.clone());
    }
    let sol = exactlp::solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.values[i].clone()),
        LpStatus::Unbounded => Err(Error::Unbounded),
        LpStatus::Infeasible => Err(Error::EmptyInterior),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn compute_vertices(a: &[Vec<Rational>], b: &[Rational]) -> Vec<Vertex> {
    let d = a[0].len();
    let mut points: Vec<Vec<Rational>> = Vec::new();
    for basis in subsets(a.len(), d) {
        let rows: Vec<Vec<Rational>> = basis.iter().map(|&i| a[i].clone()).collect();
        let rhs: Vec<Rational> = basis.iter().map(|&i| b[i].clone()).collect();
        let Some(x) = linalg::solve_square(&rows, &rhs) else {
            continue;
        };
        if a.iter().zip(b).all(|(row, bi)| linalg::dot(row, &x) <= *bi) && !points.contains(&x) {
            points.push(x);
        }
    }
    points.sort();
    points
        .into_iter()
        .map(|point| {
            let tight = a
                .iter()
                .zip(b)
                .enumerate()
                .filter(|(_, (row, bi))| linalg::dot(row, &point) == **bi)
                .map(|(i, _)| i)
                .collect();
            Vertex { point, tight }
        })
        .collect()
}

/// Extreme rays of the pointed cone `{u : A_T u ≤ 0}`, as primitive integer vectors.
fn cone_rays(tight_rows: &[Vec<Rational>], d: usize) -> Vec<Vec<BigInt>> {
    let mut rays: Vec<Vec<BigInt>> = Vec::new();
    for sub in subsets(tight_rows.len(), d - 1) {
        let rows: Vec<Vec<Rational>> = sub.iter().map(|&i| tight_rows[i].clone()).collect();
        let Some(v) = linalg::null_vector(&rows, d) else {
            continue;
        };
        let signs: Vec<Rational> = tight_rows.iter().map(|r| linalg::dot(r, &v)).collect();
        let oriented = if signs.iter().all(|s| !s.is_positive()) {
            v
        } else if signs.iter().all(|s| !s.is_negative()) {
            v.iter().map(|x| -x.clone()).collect()
        } else {
            continue;
        };
        let p = linalg::primitive(&oriented);
        if !rays.contains(&p) {
            rays.push(p);
        }
    }
    rays.sort();
    rays
}

/// Pulling triangulation of the face spanned by `face` (indices into `rays`) of dimension `k`.
fn triangulate(face: &[usize], k: usize, rays: &[Vec<Rational>], tight_rows: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    if face.len() == k {
        return vec![face.to_vec()];
    }
    let apex = face[0];
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for row in tight_rows {
        let facet: Vec<usize> = face
            .iter()
            .copied()
            .filter(|&r| linalg::dot(row, &rays[r]).is_zero())
            .collect();
        if facet.contains(&apex) || facet.len() < k - 1 || seen.contains(&facet) {
            continue;
        }
        let vecs: Vec<Vec<Rational>> = facet.iter().map(|&r| rays[r].clone()).collect();
        if linalg::rank(&vecs) != k - 1 {
            continue;
        }
        seen.insert(facet.clone());
        for mut simplex in triangulate(&facet, k - 1, rays, tight_rows) {
            simplex.insert(0, apex);
            out.push(simplex);
        }
    }
    out
}

fn compute_cones(a: &[Vec<Rational>], vertices: &[Vertex]) -> Vec<SimplicialCone> {
    let d = a[0].len();
    let mut cones = Vec::new();
    for (vi, v) in vertices.iter().enumerate() {
        let tight_rows: Vec<Vec<Rational>> = v.tight.iter().map(|&i| a[i].clone()).collect();
        let rays = cone_rays(&tight_rows, d);
        let rays_q: Vec<Vec<Rational>> = rays
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        let all: Vec<usize> = (0..rays.len()).collect();
        for simplex in triangulate(&all, d, &rays_q, &tight_rows) {
            let mat: Vec<Vec<Rational>> = simplex.iter().map(|&r| rays_q[r].clone()).collect();
            cones.push(SimplicialCone {
                apex: vi,
                rays: simplex.iter().map(|&r| rays[r].clone()).collect(),
                parallelepiped_volume: linalg::determinant(&mat).abs(),
            });
        }
    }
    cones
}

pub fn enumerate_vertices(p: &HRep) -> &[Vertex] {
    p.vertices()
}

pub fn tangent_cones(p: &HRep) -> &[SimplicialCone] {
    p.cones()
}

pub fn coordinate_width(p: &HRep) -> Widths {
    let mut width = Rational::zero();
    let mut max_abs = Rational::zero();
    for (lo, hi) in p.bounding_box() {
        width = width.max(hi - lo);
        max_abs = max_abs.max(lo.abs()).max(hi.abs());
    }
    Widths { width, max_abs }
}

/// Integer vectors `q` with `q / m ∈ P`, boundary included, in lexicographic order.
pub fn lattice_numerators(p: &HRep, m: u64) -> Vec<Vec<BigInt>> {
    let d = p.dim();
    let m_big = BigInt::from(m);
    // Clear denominators row by row: ⟨a', q⟩ ≤ m·b'.
    let rows: Vec<(Vec<BigInt>, BigInt)> =
        p.a.iter()
            .zip(&p.b)
            .map(|(row, bi)| {
                let lcm = row
                    .iter()
                    .chain(std::iter::once(bi))
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let ints = row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
                (ints, bi.numer() * (&lcm / bi.denom()) * &m_big)
            })
            .collect();
    let ranges: Vec<(BigInt, BigInt)> = p
        .bbox
        .iter()
        .map(|(lo, hi)| {
            let lo = lo * Rational::from_integer(m_big.clone());
            let hi = hi * Rational::from_integer(m_big.clone());
            (lo.ceil().to_integer(), hi.floor().to_integer())
        })
        .collect();
    let mut out = Vec::new();
    let mut prefix: Vec<BigInt> = Vec::with_capacity(d);
    // residual[i] = m·b'_i − Σ_{j < len} a'_ij q_j
    let residual: Vec<BigInt> = rows.iter().map(|(_, r)| r.clone()).collect();
    scan(&rows, &ranges, &mut prefix, residual, &mut out);
    out
}

fn scan(
    rows: &[(Vec<BigInt>, BigInt)],
    ranges: &[(BigInt, BigInt)],
    prefix: &mut Vec<BigInt>,
    residual: Vec<BigInt>,
    out: &mut Vec<Vec<BigInt>>,
) {
    let j = prefix.len();
    let d = ranges.len();
    let (mut lo, mut hi) = ranges[j].clone();
    if j == d - 1 {
        for ((a, _), r) in rows.iter().zip(&residual) {
            let c = &a[j];
            if c.is_positive() {
                hi = hi.min(r.div_floor(c));
            } else if c.is_negative() {
                lo = lo.max(Integer::div_ceil(r, c));
            } else if r.is_negative() {
                return;
            }
        }
    }
    let mut q = lo;
    while q <= hi {
        if j == d - 1 {
            let mut point = prefix.clone();
            point.push(q.clone());
            out.push(point);
        } else {
            let next: Vec<BigInt> = rows.iter().zip(&residual).map(|((a, _), r)| r - &a[j] * &q).collect();
            prefix.push(q.clone());
            scan(rows, ranges, prefix, next, out);
            prefix.pop();
        }
        q += 1;
    }
}

/// `P ∩ (1/m) ℤ^d`, boundary included.
pub fn lattice_points(p: &HRep, m: u64) -> Vec<Vec<Rational>> {
    let denom = BigInt::from(m);
    lattice_numerators(p, m)
        .into_iter()
        .map(|q| q.into_iter().map(|x| Rational::new(x, denom.clone())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::{int, rat};
    use proptest::prelude::*;

    pub(crate) fn triangle() -> HRep {
        HRep::parse("3 2\n-1 -1 0\n-1 0 -1\n3 1 1\n").unwrap()
    }

    fn interval(lo: Rational, hi: Rational) -> HRep {
        HRep::from_box(&[(lo, hi)]).unwrap()
    }

    fn pts(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter().map(|p| p.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn triangle_vertices() {
        let t = triangle();
        let v: Vec<_> = t.vertices().iter().map(|v| v.point.clone()).collect();
        assert_eq!(v, pts(&[&[1, 1], &[1, 2], &[2, 1]]));
        assert_eq!(t.vertices()[0].tight, vec![0, 1]);
    }

    #[test]
    fn box_and_simplex_vertices() {
        let b = HRep::from_box(&[(int(-1), int(1)), (int(-1), int(1))]).unwrap();
        assert_eq!(b.vertices().len(), 4);
        let s = HRep::unit_simplex(2).unwrap();
        let v: Vec<_> = s.vertices().iter().map(|v| v.point.clone()).collect();
        assert_eq!(v, pts(&[&[0, 0], &[0, 1], &[1, 0]]));
    }

    #[test]
    fn invalid_polytopes_are_rejected() {
        let unbounded = HRep::new(vec![vec![int(-1), int(0)], vec![int(0), int(-1)]], vec![int(0), int(0)]);
        assert_eq!(unbounded.unwrap_err(), Error::Unbounded);
        let flat = HRep::new(vec![vec![int(1)], vec![int(-1)]], vec![int(0), int(0)]);
        assert_eq!(flat.unwrap_err(), Error::EmptyInterior);
        let empty = HRep::new(vec![vec![int(1)], vec![int(-1)]], vec![int(0), int(-1)]);
        assert_eq!(empty.unwrap_err(), Error::EmptyInterior);
        let dup = HRep::new(
            vec![vec![int(1)], vec![int(2)], vec![int(-1)]],
            vec![int(1), int(2), int(0)],
        );
        assert_eq!(dup.unwrap_err(), Error::DuplicateConstraint { first: 0, second: 1 });
        assert_eq!(HRep::new(vec![vec![]], vec![int(0)]).unwrap_err(), Error::ZeroDimension);
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(
            HRep::parse("2 1\n1 1\n0 x\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(HRep::parse("2 1\n1 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(HRep::parse("# only comment\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn text_round_trip() {
        let t = triangle();
        let again = HRep::parse(&t.to_text()).unwrap();
        assert_eq!(again.a(), t.a());
        assert_eq!(again.b(), t.b());
    }

    #[test]
    fn triangle_cone_at_first_vertex() {
        let t = triangle();
        let c: Vec<_> = t.cones().iter().filter(|c| c.apex == 0).collect();
        assert_eq!(c.len(), 1);
        let mut rays = c[0].rays.clone();
        rays.sort();
        assert_eq!(
            rays,
            vec![
                vec![BigInt::from(0), BigInt::from(1)],
                vec![BigInt::from(1), BigInt::from(0)]
            ]
        );
        assert_eq!(c[0].parallelepiped_volume, int(1));
    }

    #[test]
    fn simple_polytopes_have_one_cone_per_vertex() {
        for p in [triangle(), HRep::unit_box(3).unwrap(), HRep::unit_simplex(3).unwrap()] {
            assert_eq!(p.cones().len(), p.vertices().len());
        }
    }

    fn square_pyramid() -> HRep {
        // base [-1,1]² at z = 0, apex (0,0,1)
        HRep::parse("5 3\n0 0 0 -1\n1 1 0 1\n1 -1 0 1\n1 0 1 1\n1 0 -1 1\n").unwrap()
    }

    #[test]
    fn square_pyramid_apex_is_split() {
        let p = square_pyramid();
        assert_eq!(p.vertices().len(), 5);
        let apex = p
            .vertices()
            .iter()
            .position(|v| v.point == pts(&[&[0, 0, 1]])[0])
            .unwrap();
        assert_eq!(p.vertices()[apex].tight.len(), 4);
        let cones: Vec<_> = p.cones().iter().filter(|c| c.apex == apex).collect();
        assert_eq!(cones.len(), 2);
        // The apex cone's cross-section at z = -1 is the square [-1,1]² (area 4),
        // and each simplicial piece is a triangle of area 2 spanned by rays with z = -1.
        let mut total = Rational::zero();
        for c in &cones {
            assert!(c.rays.iter().all(|r| r[2] == BigInt::from(-1)));
            total += &c.parallelepiped_volume;
        }
        // |det| = 2 · area of the triangle (in the z = -1 plane) for each piece
        assert_eq!(total, int(2) * int(4));
    }

    #[test]
    fn widths() {
        let w = coordinate_width(&triangle());
        assert_eq!(w.width, int(1));
        let b = HRep::from_box(&[(int(-1), int(1)), (int(-1), int(1))]).unwrap();
        assert_eq!(
            coordinate_width(&b),
            Widths {
                width: int(2),
                max_abs: int(1)
            }
        );
        assert_eq!(coordinate_width(&interval(rat(-1, 4), rat(1, 4))).width, rat(1, 2));
    }

    #[test]
    fn lattice_point_examples() {
        let i = interval(rat(-1, 4), rat(1, 4));
        assert_eq!(lattice_points(&i, 2), vec![vec![int(0)]]);
        assert_eq!(
            lattice_points(&i, 4),
            vec![vec![rat(-1, 4)], vec![int(0)], vec![rat(1, 4)]]
        );
        assert_eq!(lattice_points(&triangle(), 1), pts(&[&[1, 1], &[1, 2], &[2, 1]]));
    }

    #[test]
    fn interval_counts_follow_quasi_polynomial() {
        let i = interval(rat(-1, 4), rat(1, 4));
        for m in 1u64..=20 {
            assert_eq!(
                Rational::from_integer(BigInt::from(lattice_points(&i, m).len())),
                rat(m as i64, 2) - rat((m % 4) as i64, 2) + int(1),
                "m = {m}"
            );
        }
    }

    #[test]
    fn lattice_points_match_brute_force() {
        let p = square_pyramid();
        for m in 1..4u64 {
            let pts = lattice_points(&p, m);
            let mut brute = Vec::new();
            let r = m as i64;
            for x in -r..=r {
                for y in -r..=r {
                    for z in 0..=r {
                        let q = vec![rat(x, r), rat(y, r), rat(z, r)];
                        if p.contains(&q) {
                            brute.push(q);
                        }
                    }
                }
            }
            assert_eq!(pts, brute);
        }
    }

    proptest! {
        #[test]
        fn vertices_satisfy_constraints(shift in prop::collection::vec(-3i64..4, 2), scale in 1i64..4) {
            let v: Vec<Rational> = shift.iter().map(|&x| rat(x, scale)).collect();
            let p = square_pyramid().translate(&[v[0].clone(), v[1].clone(), int(0)]).unwrap();
            for vert in p.vertices() {
                prop_assert!(p.contains(&vert.point));
                for &i in &vert.tight {
                    prop_assert_eq!(linalg::dot(&p.a()[i], &vert.point), p.b()[i].clone());
                }
                let rows: Vec<_> = vert.tight.iter().map(|&i| p.a()[i].clone()).collect();
                prop_assert_eq!(linalg::rank(&rows), 3);
            }
            prop_assert!(p.cones().len() >= p.vertices().len());
        }

        #[test]
        fn width_ignores_row_order(seed in any::<u64>()) {
            let p = square_pyramid();
            let mut idx: Vec<usize> = (0..p.num_constraints()).collect();
            let mut s = seed;
            for i in (1..idx.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                idx.swap(i, (s >> 33) as usize % (i + 1));
            }
            let q = HRep::new(idx.iter().map(|&i| p.a()[i].clone()).collect(), idx.iter().map(|&i| p.b()[i].clone()).collect()).unwrap();
            prop_assert_eq!(coordinate_width(&p), coordinate_width(&q));
        }
    }
}
