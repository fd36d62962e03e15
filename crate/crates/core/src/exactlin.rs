//! Exact rational linear algebra and the flat-intersection predicate.
//!
//! Matrices are plain row-major `Vec<Vec<Rational>>`. Vectors of a frame are
//! stored as a list of vectors (so a frame is "column-major").

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type RationalVector = Vec<Rational>;
pub type RationalMatrix = Vec<Vec<Rational>>;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `"a/b"` with `b > 0` and `gcd(a, b) = 1`.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `"a/b"` or a bare integer `"a"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::invalid(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Reduced row echelon form in place, pivoting only within the first
/// `ncoef` columns. Returns the pivot column of each nonzero row.
pub fn rref(m: &mut RationalMatrix, ncoef: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncoef {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        for i in 0..nrows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (pivot_row, row) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, p) in row.iter_mut().zip(pivot_row) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &RationalMatrix) -> usize {
    let ncols = m.first().map_or(0, Vec::len);
    rref(&mut m.clone(), ncols).len()
}

fn check_square(m: &RationalMatrix) -> Result<usize> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::dims("matrix is not square"));
    }
    Ok(n)
}

pub fn det(m: &RationalMatrix) -> Result<Rational> {
    let n = check_square(m)?;
    let mut a = m.clone();
    let mut acc = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            a.swap(p, c);
            acc = -acc;
        }
        let piv = a[c][c].clone();
        acc *= &piv;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &piv;
            let (top, bottom) = a.split_at_mut(i);
            for (x, y) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    Ok(acc)
}

/// Exact sign of the determinant of a square matrix.
pub fn sign_det(m: &RationalMatrix) -> Result<i8> {
    let d = det(m)?;
    Ok(if d.is_zero() { 0 } else if d.is_positive() { 1 } else { -1 })
}

/// Basis of `{x : m x = 0}`; `ncols` is needed when `m` has no rows.
pub fn nullspace(m: &RationalMatrix, ncols: usize) -> Vec<RationalVector> {
    let mut a = m.clone();
    let pivots = rref(&mut a, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); ncols];
            x[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -a[r][f].clone();
            }
            x
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Infeasible,
    Unique(RationalVector),
    /// A particular solution and a basis of the homogeneous solutions.
    Family(RationalVector, Vec<RationalVector>),
}

/// Solves `a x = b` exactly. `ncols` is the number of unknowns.
pub fn solve_affine(a: &RationalMatrix, b: &[Rational], ncols: usize) -> Result<AffineSolution> {
    if a.len() != b.len() || a.iter().any(|r| r.len() != ncols) {
        return Err(Error::dims("affine system shape mismatch"));
    }
    let mut aug: RationalMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect())
        .collect();
    let pivots = rref(&mut aug, ncols);
    if aug[pivots.len()..].iter().any(|row| !row[ncols].is_zero()) {
        return Ok(AffineSolution::Infeasible);
    }
    let mut x = vec![Rational::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][ncols].clone();
    }
    if pivots.len() == ncols {
        return Ok(AffineSolution::Unique(x));
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -aug[r][f].clone();
            }
            v
        })
        .collect();
    Ok(AffineSolution::Family(x, basis))
}

fn sub(a: &[Rational], b: &[Rational]) -> RationalVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Columns `v_1 - v_0, …, v_m - v_0` of an ordered vertex list.
pub fn tangent_frame(vertices: &[RationalVector]) -> Vec<RationalVector> {
    vertices[1..].iter().map(|v| sub(v, &vertices[0])).collect()
}

fn check_vertices(vertices: &[RationalVector]) -> Result<usize> {
    let Some(first) = vertices.first() else {
        return Err(Error::invalid("simplex with no vertices"));
    };
    let d = first.len();
    if vertices.iter().any(|v| v.len() != d) {
        return Err(Error::dims("vertices of different lengths"));
    }
    Ok(d)
}

/// Matrix whose columns are the given vectors.
pub fn columns_to_matrix(cols: &[&RationalVector]) -> RationalMatrix {
    let d = cols.first().map_or(0, |c| c.len());
    (0..d).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
}

/// Normal frame `N` of an oriented simplex image with `det[T | N] > 0`.
///
/// `N` is an exact basis of the orthogonal complement of the tangent space;
/// the orientation is fixed by negating its first vector when needed.
pub fn positive_normal_frame(vertices: &[RationalVector]) -> Result<Vec<RationalVector>> {
    let d = check_vertices(vertices)?;
    let t = tangent_frame(vertices);
    if t.len() > d || rank(&t) < t.len() {
        return Err(Error::generic("degenerate simplex: affinely dependent vertices"));
    }
    let mut n = nullspace(&t, d);
    if n.is_empty() {
        return Ok(n);
    }
    let cols: Vec<&RationalVector> = t.iter().chain(n.iter()).collect();
    if sign_det(&columns_to_matrix(&cols))? < 0 {
        for x in n[0].iter_mut() {
            *x = -x.clone();
        }
    }
    Ok(n)
}

/// A point common to several simplex images, with its barycentric coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatIntersection {
    pub point: RationalVector,
    pub barycentric: Vec<RationalVector>,
}

impl FlatIntersection {
    /// Every simplex's barycentric combination reproduces `point` exactly.
    pub fn reconstructs(&self, simplices: &[&[RationalVector]]) -> bool {
        simplices.len() == self.barycentric.len()
            && simplices.iter().zip(&self.barycentric).all(|(verts, lam)| {
                lam.iter().sum::<Rational>().is_one()
                    && (0..self.point.len()).all(|c| {
                        verts.iter().zip(lam).map(|(v, l)| &v[c] * l).sum::<Rational>() == self.point[c]
                    })
            })
    }

    fn min_lambda_sign(&self) -> i8 {
        let mut s = 1;
        for l in self.barycentric.iter().flatten() {
            if l.is_negative() {
                return -1;
            }
            if l.is_zero() {
                s = 0;
            }
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlatOutcome {
    Empty,
    Interior(FlatIntersection),
    /// Some barycentric coordinate is exactly zero.
    Boundary(FlatIntersection),
    /// The combined system has a positive-dimensional solution set.
    NonTransverse,
}

impl FlatOutcome {
    fn classify(fi: FlatIntersection) -> FlatOutcome {
        match fi.min_lambda_sign() {
            1 => FlatOutcome::Interior(fi),
            0 => FlatOutcome::Boundary(fi),
            _ => FlatOutcome::Empty,
        }
    }
}

/// Reference route: one linear system in all barycentric unknowns.
pub fn intersect_flats(simplices: &[&[RationalVector]]) -> Result<FlatOutcome> {
    if simplices.is_empty() {
        return Err(Error::invalid("no simplices to intersect"));
    }
    let d = check_vertices(simplices[0])?;
    for s in simplices {
        if check_vertices(s)? != d {
            return Err(Error::dims("simplices in different ambient dimensions"));
        }
    }
    let offsets: Vec<usize> = simplices
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.len();
            Some(o)
        })
        .collect();
    let n: usize = simplices.iter().map(|s| s.len()).sum();
    let mut a: RationalMatrix = Vec::new();
    let mut b: RationalVector = Vec::new();
    for (i, s) in simplices.iter().enumerate() {
        let mut row = vec![Rational::zero(); n];
        for j in 0..s.len() {
            row[offsets[i] + j] = Rational::one();
        }
        a.push(row);
        b.push(Rational::one());
    }
    for (i, s) in simplices.iter().enumerate().skip(1) {
        for c in 0..d {
            let mut row = vec![Rational::zero(); n];
            for (j, v) in simplices[0].iter().enumerate() {
                row[j] = v[c].clone();
            }
            for (j, v) in s.iter().enumerate() {
                row[offsets[i] + j] = -v[c].clone();
            }
            a.push(row);
            b.push(Rational::zero());
        }
    }
    match solve_affine(&a, &b, n)? {
        AffineSolution::Infeasible => Ok(FlatOutcome::Empty),
        AffineSolution::Family(..) => Ok(FlatOutcome::NonTransverse),
        AffineSolution::Unique(x) => {
            let barycentric: Vec<RationalVector> = simplices
                .iter()
                .enumerate()
                .map(|(i, s)| x[offsets[i]..offsets[i] + s.len()].to_vec())
                .collect();
            let point = (0..d)
                .map(|c| simplices[0].iter().zip(&barycentric[0]).map(|(v, l)| &v[c] * l).sum())
                .collect();
            Ok(FlatOutcome::classify(FlatIntersection { point, barycentric }))
        }
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub lo: RationalVector,
    pub hi: RationalVector,
}

impl BoundingBox {
    pub fn of_points(points: &[RationalVector]) -> BoundingBox {
        let mut lo = points[0].clone();
        let mut hi = points[0].clone();
        for p in &points[1..] {
            for c in 0..p.len() {
                if p[c] < lo[c] {
                    lo[c] = p[c].clone();
                }
                if p[c] > hi[c] {
                    hi[c] = p[c].clone();
                }
            }
        }
        BoundingBox { lo, hi }
    }

    /// Closed intersection, `None` when empty.
    pub fn meet(&self, other: &BoundingBox) -> Option<BoundingBox> {
        let lo: RationalVector = self.lo.iter().zip(&other.lo).map(|(a, b)| a.max(b).clone()).collect();
        let hi: RationalVector = self.hi.iter().zip(&other.hi).map(|(a, b)| a.min(b).clone()).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return None;
        }
        Some(BoundingBox { lo, hi })
    }
}

/// A simplex image with everything the fast intersection path needs.
#[derive(Clone, Debug)]
pub struct PreparedSimplex {
    pub vertices: Vec<RationalVector>,
    pub normals: Vec<RationalVector>,
    /// `⟨n, v_0⟩` for each normal `n`.
    pub offsets: RationalVector,
    /// Left inverse of the tangent frame: `μ = L (y - v_0)` for `y` in the flat.
    left_inverse: RationalMatrix,
    pub bbox: BoundingBox,
}

impl PreparedSimplex {
    pub fn new(vertices: Vec<RationalVector>) -> Result<Self> {
        let normals = positive_normal_frame(&vertices)?;
        let t = tangent_frame(&vertices);
        let m = t.len();
        // (TᵀT)⁻¹ Tᵀ
        let gram: RationalMatrix = (0..m).map(|i| (0..m).map(|j| dot(&t[i], &t[j])).collect()).collect();
        let mut aug: RationalMatrix = gram
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                row
            })
            .collect();
        rref(&mut aug, m);
        let d = vertices[0].len();
        let left_inverse = (0..m)
            .map(|i| (0..d).map(|c| (0..m).map(|j| &aug[i][m + j] * &t[j][c]).sum()).collect())
            .collect();
        let offsets = normals.iter().map(|n| dot(n, &vertices[0])).collect();
        let bbox = BoundingBox::of_points(&vertices);
        Ok(PreparedSimplex { vertices, normals, offsets, left_inverse, bbox })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn codim(&self) -> usize {
        self.normals.len()
    }

    /// Barycentric coordinates of a point known to lie on the flat.
    pub fn barycentric(&self, y: &[Rational]) -> RationalVector {
        let rel = sub(y, &self.vertices[0]);
        let mu: Vec<Rational> = self.left_inverse.iter().map(|row| dot(row, &rel)).collect();
        let first = Rational::one() - mu.iter().sum::<Rational>();
        std::iter::once(first).chain(mu).collect()
    }

    /// Linear part of [`Self::barycentric`] applied to a direction `p`.
    pub fn barycentric_linear(&self, p: &[Rational]) -> RationalVector {
        let mu: Vec<Rational> = self.left_inverse.iter().map(|row| dot(row, p)).collect();
        let first = -mu.iter().sum::<Rational>();
        std::iter::once(first).chain(mu).collect()
    }

    pub fn flat(&self) -> Flat {
        Flat { origin: self.vertices[0].clone(), dirs: tangent_frame(&self.vertices) }
    }
}

/// Affine subspace `origin + span(dirs)`, `dirs` linearly independent.
#[derive(Clone, Debug)]
pub struct Flat {
    pub origin: RationalVector,
    pub dirs: Vec<RationalVector>,
}

#[derive(Clone, Debug)]
pub enum Meet {
    Empty,
    Flat(Flat),
    /// The intersection is larger than its expected dimension.
    Degenerate,
}

impl Flat {
    pub fn dim(&self) -> usize {
        self.dirs.len()
    }

    /// Intersection with the flat of `s`, described by its normal equations.
    pub fn meet(&self, s: &PreparedSimplex) -> Meet {
        let f = self.dirs.len();
        let k = s.normals.len();
        // (Nᵀ P) t = offsets - Nᵀ origin
        let mut aug: RationalMatrix = s
            .normals
            .iter()
            .zip(&s.offsets)
            .map(|(n, off)| {
                let mut row: RationalVector = self.dirs.iter().map(|p| dot(n, p)).collect();
                row.push(off - dot(n, &self.origin));
                row
            })
            .collect();
        let pivots = rref(&mut aug, f);
        if aug[pivots.len()..].iter().any(|row| !row[f].is_zero()) {
            return Meet::Empty;
        }
        if pivots.len() < k {
            return Meet::Degenerate;
        }
        let mut t0 = vec![Rational::zero(); f];
        for (r, &pc) in pivots.iter().enumerate() {
            t0[pc] = aug[r][f].clone();
        }
        let origin: RationalVector = (0..self.origin.len())
            .map(|c| &self.origin[c] + self.dirs.iter().zip(&t0).map(|(p, t)| &p[c] * t).sum::<Rational>())
            .collect();
        let dirs = (0..f)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut coef = vec![Rational::zero(); f];
                coef[free] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    coef[pc] = -aug[r][free].clone();
                }
                (0..self.origin.len())
                    .map(|c| self.dirs.iter().zip(&coef).map(|(p, t)| &p[c] * t).sum())
                    .collect()
            })
            .collect();
        Meet::Flat(Flat { origin, dirs })
    }
}

/// Whether `{t : a·t + c >= 0 for every (a, c)}` is nonempty, by
/// Fourier–Motzkin elimination. `None` if the system grows past `cap` rows.
pub fn polyhedron_nonempty(mut rows: Vec<(RationalVector, Rational)>, vars: usize, cap: usize) -> Option<bool> {
    for v in (0..vars).rev() {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows {
            match row.0[v].cmp(&Rational::zero()) {
                std::cmp::Ordering::Greater => pos.push(row),
                std::cmp::Ordering::Less => neg.push(row),
                std::cmp::Ordering::Equal => rest.push(row),
            }
        }
        if pos.len() * neg.len() + rest.len() > cap {
            return None;
        }
        for (pa, pc) in &pos {
            for (na, nc) in &neg {
                let (s, t) = (-&na[v], &pa[v]);
                let a: RationalVector = (0..v).map(|j| &pa[j] * &s + &na[j] * t).collect();
                let c = pc * &s + nc * t;
                if a.iter().all(Zero::is_zero) {
                    if c.is_negative() {
                        return Some(false);
                    }
                    continue;
                }
                rest.push((a, c));
            }
        }
        rows = Vec::with_capacity(rest.len());
        for (mut a, c) in rest {
            a.truncate(v);
            if !a.iter().all(Zero::is_zero) {
                rows.push((a, c));
            } else if c.is_negative() {
                return Some(false);
            }
        }
    }
    Some(rows.iter().all(|(_, c)| !c.is_negative()))
}

impl Flat {
    /// Whether the flat can meet every simplex hull at a common point.
    /// `false` only when it certainly cannot.
    pub fn may_meet_hulls(&self, simplices: &[&PreparedSimplex]) -> bool {
        let m = self.dirs.len();
        let mut rows = Vec::new();
        for s in simplices {
            let base = s.barycentric(&self.origin);
            let lin: Vec<RationalVector> = self.dirs.iter().map(|p| s.barycentric_linear(p)).collect();
            for (i, c) in base.into_iter().enumerate() {
                rows.push(((0..m).map(|j| lin[j][i].clone()).collect(), c));
            }
        }
        polyhedron_nonempty(rows, m, 4096).unwrap_or(true)
    }
}

/// Classifies a point common to all flats against each simplex's barycentric
/// coordinates, stopping at the first negative coordinate.
pub fn classify_point(simplices: &[&PreparedSimplex], point: RationalVector) -> FlatOutcome {
    let mut barycentric = Vec::with_capacity(simplices.len());
    let mut boundary = false;
    // check the last simplex first: in prefix-cached enumeration it varies fastest
    for s in simplices.iter().rev() {
        let lam = s.barycentric(&point);
        for l in &lam {
            if l.is_negative() {
                return FlatOutcome::Empty;
            }
            boundary |= l.is_zero();
        }
        barycentric.push(lam);
    }
    barycentric.reverse();
    let fi = FlatIntersection { point, barycentric };
    if boundary { FlatOutcome::Boundary(fi) } else { FlatOutcome::Interior(fi) }
}

/// Fast route through normal equations; falls back to [`intersect_flats`]
/// whenever an intermediate intersection is degenerate.
pub fn intersect_prepared(simplices: &[&PreparedSimplex]) -> Result<FlatOutcome> {
    let Some(first) = simplices.first() else {
        return Err(Error::invalid("no simplices to intersect"));
    };
    let d = first.ambient_dim();
    if simplices.iter().any(|s| s.ambient_dim() != d) {
        return Err(Error::dims("simplices in different ambient dimensions"));
    }
    let mut bbox = first.bbox.clone();
    let mut flat = first.flat();
    for s in &simplices[1..] {
        match bbox.meet(&s.bbox) {
            Some(b) => bbox = b,
            None => return Ok(FlatOutcome::Empty),
        }
        match flat.meet(s) {
            Meet::Empty => return Ok(FlatOutcome::Empty),
            Meet::Flat(next) => flat = next,
            Meet::Degenerate => return reference(simplices),
        }
    }
    finish(simplices, flat)
}

/// Completes a prefix-cached intersection: `flat` is the meet of all flats.
pub fn finish(simplices: &[&PreparedSimplex], flat: Flat) -> Result<FlatOutcome> {
    if flat.dim() > 0 {
        return reference(simplices);
    }
    Ok(classify_point(simplices, flat.origin))
}

pub fn reference(simplices: &[&PreparedSimplex]) -> Result<FlatOutcome> {
    let verts: Vec<&[RationalVector]> = simplices.iter().map(|s| s.vertices.as_slice()).collect();
    intersect_flats(&verts)
}

impl fmt::Display for FlatOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatOutcome::Empty => write!(f, "empty"),
            FlatOutcome::Interior(fi) | FlatOutcome::Boundary(fi) => {
                let kind = if matches!(self, FlatOutcome::Interior(_)) { "interior" } else { "boundary" };
                let pts: Vec<String> = fi.point.iter().map(format_rational).collect();
                write!(f, "{kind} ({})", pts.join(", "))
            }
            FlatOutcome::NonTransverse => write!(f, "non-transverse"),
        }
    }
}
