//! Maps `K → ℝ^d` that are affine on each simplex, their genericity
//! certificate, global r-fold points and r-intersection signs.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactlin::{
    columns_to_matrix, finish, reference, sign_det, BoundingBox, Flat, FlatIntersection, FlatOutcome,
    Meet, PreparedSimplex, Rational, RationalVector,
};
use crate::par;
use crate::simplicial::{Simplex, SimplicialComplex};

pub const DEFAULT_RETRIES: usize = 32;

/// What the genericity predicate checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericityCertificate {
    pub r: usize,
    /// Unordered tuples of pairwise disjoint simplices whose bounding boxes meet.
    pub tuples_examined: usize,
    pub intersection_points: usize,
    /// Number of coordinate draws used (1 for maps given explicitly).
    pub attempts: usize,
}

/// One entry of a tuple search: a prepared simplex image and the vertex
/// labels used for the pairwise-disjointness test.
#[derive(Clone, Copy)]
pub(crate) struct Candidate<'a> {
    pub simplex: &'a PreparedSimplex,
    pub vertices: &'a [usize],
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    // both sorted
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

enum Prefix {
    Flat(Flat),
    Degenerate,
}

struct Search<'s, 'a> {
    levels: &'s [Vec<Candidate<'a>>],
    increasing: bool,
    examined: usize,
    hits: Vec<(Vec<usize>, FlatOutcome)>,
}

impl Search<'_, '_> {
    fn descend(&mut self, chosen: &mut Vec<usize>, bbox: &BoundingBox, prefix: &Prefix) -> Result<()> {
        let level = chosen.len();
        if level == self.levels.len() {
            self.examined += 1;
            let simplices: Vec<&PreparedSimplex> =
                chosen.iter().enumerate().map(|(l, &j)| self.levels[l][j].simplex).collect();
            let outcome = match prefix {
                Prefix::Flat(f) => finish(&simplices, f.clone())?,
                Prefix::Degenerate => reference(&simplices)?,
            };
            if outcome != FlatOutcome::Empty {
                self.hits.push((chosen.clone(), outcome));
            }
            return Ok(());
        }
        let start = if self.increasing { chosen.last().map_or(0, |&j| j + 1) } else { 0 };
        for j in start..self.levels[level].len() {
            let cand = self.levels[level][j];
            if !chosen
                .iter()
                .enumerate()
                .all(|(l, &i)| disjoint(self.levels[l][i].vertices, cand.vertices))
            {
                continue;
            }
            let Some(b) = bbox.meet(&cand.simplex.bbox) else { continue };
            let next = match prefix {
                Prefix::Flat(f) => match f.meet(cand.simplex) {
                    Meet::Empty => continue,
                    Meet::Flat(g) => {
                        if level + 1 < self.levels.len() {
                            let mut prefix: Vec<&PreparedSimplex> =
                                chosen.iter().enumerate().map(|(l, &i)| self.levels[l][i].simplex).collect();
                            prefix.push(cand.simplex);
                            if !g.may_meet_hulls(&prefix) {
                                continue;
                            }
                        }
                        Prefix::Flat(g)
                    }
                    Meet::Degenerate => Prefix::Degenerate,
                },
                Prefix::Degenerate => Prefix::Degenerate,
            };
            chosen.push(j);
            self.descend(chosen, &b, &next)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// All tuples (one candidate per level, pairwise vertex-disjoint) whose
/// simplex images meet, with the meeting outcome; sorted by tuple.
///
/// With `increasing`, every level must be the same list and tuples are
/// enumerated once as strictly increasing index sequences.
pub(crate) fn intersecting_tuples(
    levels: &[Vec<Candidate<'_>>],
    increasing: bool,
) -> Result<(usize, Vec<(Vec<usize>, FlatOutcome)>)> {
    if levels.is_empty() || levels[0].is_empty() {
        return Ok((0, Vec::new()));
    }
    let per_root = par::try_map_range(levels[0].len(), |j| {
        let root = levels[0][j].simplex;
        let mut s = Search { levels, increasing, examined: 0, hits: Vec::new() };
        s.descend(&mut vec![j], &root.bbox, &Prefix::Flat(root.flat()))?;
        Ok::<_, Error>((s.examined, s.hits))
    })?;
    let mut examined = 0;
    let mut hits = Vec::new();
    for (e, h) in per_root {
        examined += e;
        hits.extend(h);
    }
    Ok((examined, hits))
}

/// Sign of `det[N_1 | … | N_r]` for positive normal frames of the oriented
/// simplex images, in tuple order.
pub fn normal_block_sign(simplices: &[&PreparedSimplex]) -> Result<i8> {
    let d = simplices.first().map_or(0, |s| s.ambient_dim());
    let cols: Vec<&RationalVector> = simplices.iter().flat_map(|s| s.normals.iter()).collect();
    if cols.len() != d {
        return Err(Error::dims(format!("codimensions sum to {} in ℝ^{d}", cols.len())));
    }
    sign_det(&columns_to_matrix(&cols))
}

/// Parity of the permutation sorting `xs` (distinct entries).
pub fn sort_sign(xs: &[usize]) -> i8 {
    let mut inv = 0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if xs[i] > xs[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 { 1 } else { -1 }
}

/// A point with `r` preimages in the interiors of pairwise disjoint simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RFoldPoint {
    pub tuple: Vec<Simplex>,
    pub location: FlatIntersection,
    pub sign: i8,
}

/// Map affine on each simplex, given by vertex coordinates in ℝ^d.
#[derive(Clone, Debug)]
pub struct PLMap {
    complex: SimplicialComplex,
    d: usize,
    coords: Vec<RationalVector>,
    /// Per dimension `q ≤ min(dim K, d)`, the prepared simplex images.
    prepared: Vec<Vec<PreparedSimplex>>,
    certificate: Option<GenericityCertificate>,
}

impl PLMap {
    /// Fails with a genericity error when some simplex image is degenerate.
    pub fn new(complex: SimplicialComplex, d: usize, coords: Vec<RationalVector>) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("ambient dimension must be at least 1"));
        }
        if coords.len() != complex.vertex_count() {
            return Err(Error::dims(format!(
                "{} coordinate vectors for {} vertices",
                coords.len(),
                complex.vertex_count()
            )));
        }
        if let Some(bad) = coords.iter().position(|c| c.len() != d) {
            return Err(Error::dims(format!("vertex {bad} has {} coordinates, expected {d}", coords[bad].len())));
        }
        let top = complex.dim().map_or(0, |n| n.min(d) + 1);
        let prepared = (0..top)
            .map(|q| {
                complex
                    .simplices(q)
                    .iter()
                    .map(|s| PreparedSimplex::new(s.iter().map(|&v| coords[v].clone()).collect()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PLMap { complex, d, coords, prepared, certificate: None })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[RationalVector] {
        &self.coords
    }

    pub fn certificate(&self) -> Option<&GenericityCertificate> {
        self.certificate.as_ref()
    }

    pub fn prepared(&self, q: usize, idx: usize) -> &PreparedSimplex {
        &self.prepared[q][idx]
    }

    /// Runs the genericity predicate for `r`-tuples and stores the certificate.
    pub fn certify(&mut self, r: usize) -> Result<&GenericityCertificate> {
        let cert = self.check_genericity(r)?;
        self.certificate = Some(cert);
        Ok(self.certificate.as_ref().unwrap())
    }

    /// The predicate: over all unordered `r`-tuples of pairwise disjoint
    /// simplices, images of top simplices meet only at isolated points interior
    /// to every simplex, and images of tuples containing a lower simplex do not
    /// meet at all.
    pub fn check_genericity(&self, r: usize) -> Result<GenericityCertificate> {
        if r < 2 {
            return Err(Error::invalid("r must be at least 2"));
        }
        let Some(n) = self.complex.dim() else {
            return Ok(GenericityCertificate { r, tuples_examined: 0, intersection_points: 0, attempts: 1 });
        };
        if n >= self.d {
            return Err(Error::dims(format!("dim K = {n} is not below d = {}", self.d)));
        }
        let mut pool = Vec::new();
        let mut is_top = Vec::new();
        for q in 0..=n {
            for (i, s) in self.complex.simplices(q).iter().enumerate() {
                pool.push(Candidate { simplex: &self.prepared[q][i], vertices: s });
                is_top.push(q == n);
            }
        }
        let levels = vec![pool; r];
        let (examined, hits) = intersecting_tuples(&levels, true)?;
        let describe = |t: &[usize]| -> Vec<&[usize]> { t.iter().map(|&j| levels[0][j].vertices).collect() };
        let mut points = 0;
        for (t, outcome) in &hits {
            let all_top = t.iter().all(|&j| is_top[j]);
            match outcome {
                FlatOutcome::Interior(_) if all_top => points += 1,
                FlatOutcome::NonTransverse => {
                    return Err(Error::generic(format!("non-transverse images of {:?}", describe(t))))
                }
                FlatOutcome::Boundary(_) => {
                    return Err(Error::generic(format!("intersection on a face for {:?}", describe(t))))
                }
                _ => {
                    return Err(Error::generic(format!(
                        "images of lower-dimensional tuple {:?} meet",
                        describe(t)
                    )))
                }
            }
        }
        Ok(GenericityCertificate { r, tuples_examined: examined, intersection_points: points, attempts: 1 })
    }

    fn require_certified(&self, r: usize) -> Result<()> {
        match &self.certificate {
            Some(c) if c.r == r => Ok(()),
            Some(c) => Err(Error::generic(format!("map is certified for r = {}, not r = {r}", c.r))),
            None => Err(Error::generic("map has no genericity certificate")),
        }
    }

    /// `(k, r)` with `d = k r` and every simplex of dimension `k (r - 1)`.
    fn top_shape(&self, dims: &[usize]) -> Result<usize> {
        let r = dims.len();
        if r < 2 || self.d % r != 0 {
            return Err(Error::dims(format!("{r}-tuple in ℝ^{}", self.d)));
        }
        let k = self.d / r;
        if let Some(bad) = dims.iter().find(|&&m| m != k * (r - 1)) {
            return Err(Error::dims(format!("simplex of dimension {bad}, expected {}", k * (r - 1))));
        }
        Ok(k)
    }

    fn lookup(&self, oriented: &[usize]) -> Result<(&PreparedSimplex, Vec<usize>, i8)> {
        let mut sorted = oriented.to_vec();
        sorted.sort_unstable();
        let idx = self
            .complex
            .index_of(&sorted)
            .ok_or_else(|| Error::invalid(format!("{oriented:?} is not a simplex of the complex")))?;
        let q = sorted.len() - 1;
        if q >= self.prepared.len() {
            return Err(Error::dims(format!("simplex dimension {q} exceeds d = {}", self.d)));
        }
        Ok((&self.prepared[q][idx], sorted, sort_sign(oriented)))
    }

    /// Sign of the r-fold point `point` of the oriented tuple (each simplex
    /// given as a vertex list whose order is its orientation).
    pub fn r_intersection_sign(&self, tuple: &[Vec<usize>], point: &FlatIntersection) -> Result<i8> {
        let looked: Vec<_> = tuple.iter().map(|s| self.lookup(s)).collect::<Result<_>>()?;
        self.top_shape(&looked.iter().map(|l| l.0.dim()).collect::<Vec<_>>())?;
        for (i, l) in looked.iter().enumerate() {
            if looked[i + 1..].iter().any(|m| !disjoint(&l.1, &m.1)) {
                return Err(Error::invalid("tuple simplices are not pairwise disjoint"));
            }
        }
        let canonical: Vec<_> = looked.iter().map(|l| l.0.vertices.as_slice()).collect();
        if !point.reconstructs(&canonical) {
            return Err(Error::invalid("point does not lie on the simplex images"));
        }
        if point.barycentric.iter().flatten().any(|l| *l <= Rational::from_integer(BigInt::from(0))) {
            return Err(Error::invalid("point is not interior to every simplex"));
        }
        let prepared: Vec<&PreparedSimplex> = looked.iter().map(|l| l.0).collect();
        let orient: i8 = looked.iter().map(|l| l.2).product();
        Ok(normal_block_sign(&prepared)? * orient)
    }

    /// Algebraic r-intersection number of an oriented tuple of top simplices.
    pub fn intersection_number(&self, tuple: &[Vec<usize>]) -> Result<i64> {
        self.require_certified(tuple.len())?;
        let looked: Vec<_> = tuple.iter().map(|s| self.lookup(s)).collect::<Result<_>>()?;
        self.top_shape(&looked.iter().map(|l| l.0.dim()).collect::<Vec<_>>())?;
        for (i, l) in looked.iter().enumerate() {
            if looked[i + 1..].iter().any(|m| !disjoint(&l.1, &m.1)) {
                return Err(Error::invalid("tuple simplices are not pairwise disjoint"));
            }
        }
        let prepared: Vec<&PreparedSimplex> = looked.iter().map(|l| l.0).collect();
        match crate::exactlin::intersect_prepared(&prepared)? {
            FlatOutcome::Empty => Ok(0),
            FlatOutcome::Interior(_) => {
                let orient: i8 = looked.iter().map(|l| l.2).product();
                Ok((normal_block_sign(&prepared)? * orient) as i64)
            }
            other => Err(Error::generic(format!("certified map produced {other}"))),
        }
    }

    /// Global r-fold points of top simplices, one per unordered tuple, listed
    /// under the lexicographically smallest ordering.
    pub fn global_r_fold_points(&self, r: usize) -> Result<Vec<RFoldPoint>> {
        self.require_certified(r)?;
        let Some(n) = self.complex.dim() else { return Ok(Vec::new()) };
        self.top_shape(&vec![n; r])?;
        let tops = self.complex.simplices(n);
        let pool: Vec<Candidate> = tops
            .iter()
            .zip(&self.prepared[n])
            .map(|(s, p)| Candidate { simplex: p, vertices: s })
            .collect();
        let levels = vec![pool; r];
        let (_, hits) = intersecting_tuples(&levels, true)?;
        hits.into_iter()
            .map(|(t, outcome)| {
                let FlatOutcome::Interior(location) = outcome else {
                    return Err(Error::generic("certified map produced a degenerate intersection"));
                };
                let prepared: Vec<&PreparedSimplex> = t.iter().map(|&j| &self.prepared[n][j]).collect();
                Ok(RFoldPoint {
                    tuple: t.iter().map(|&j| tops[j].clone()).collect(),
                    location,
                    sign: normal_block_sign(&prepared)?,
                })
            })
            .collect()
    }
}

/// Distinct random rational parameters: numerators in `[-60, 60]`,
/// denominators in `1..=8`.
fn moment_parameters(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let mut ts: Vec<Rational> = Vec::with_capacity(n);
    while ts.len() < n {
        let t = Rational::new(BigInt::from(rng.random_range(-60i64..=60)), BigInt::from(rng.random_range(1i64..=8)));
        if !ts.contains(&t) {
            ts.push(t);
        }
    }
    ts
}

pub fn moment_point(t: &Rational, d: usize) -> RationalVector {
    let mut out = Vec::with_capacity(d);
    let mut p = t.clone();
    for _ in 0..d {
        out.push(p.clone());
        p *= t;
    }
    out
}

/// Multiplicity inferred from `d = k r`, `dim K = k (r - 1)`; 2 when the
/// dimensions do not fit that pattern.
pub fn infer_r(complex: &SimplicialComplex, d: usize) -> usize {
    match complex.dim() {
        Some(n) if n < d && d % (d - n) == 0 && d / (d - n) >= 2 => d / (d - n),
        _ => 2,
    }
}

pub fn random_generic_map(complex: &SimplicialComplex, d: usize, seed: u64) -> Result<PLMap> {
    let r = infer_r(complex, d);
    random_generic_map_with(complex, d, r, seed, DEFAULT_RETRIES)
}

/// Vertices on the moment curve at random parameters, resampled until the
/// genericity predicate for `r`-tuples passes.
pub fn random_generic_map_with(
    complex: &SimplicialComplex,
    d: usize,
    r: usize,
    seed: u64,
    retries: usize,
) -> Result<PLMap> {
    if d == 0 {
        return Err(Error::invalid("ambient dimension must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for attempt in 1..=retries.max(1) {
        let ts = moment_parameters(&mut rng, complex.vertex_count());
        let coords = ts.iter().map(|t| moment_point(t, d)).collect();
        let outcome = PLMap::new(complex.clone(), d, coords).and_then(|mut f| {
            f.certify(r)?;
            Ok(f)
        });
        match outcome {
            Ok(mut f) => {
                f.certificate.as_mut().unwrap().attempts = attempt;
                return Ok(f);
            }
            Err(e @ Error::Genericity(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::generic(format!(
        "no generic map after {retries} attempts: {}",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// One trial of the van Kampen parity experiment.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ParityTrial {
    pub seed: u64,
    pub points: usize,
    pub parity: u8,
}

/// For each trial, a fresh generic map and the parity of its number of
/// global 2-fold points.
pub fn van_kampen_parity(complex: &SimplicialComplex, d: usize, trials: usize, seed: u64) -> Result<Vec<ParityTrial>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..trials).map(|_| rng.random()).collect();
    par::try_map(&seeds, |&s| {
        let f = random_generic_map_with(complex, d, 2, s, DEFAULT_RETRIES)?;
        let points = f.global_r_fold_points(2)?.len();
        Ok(ParityTrial { seed: s, points, parity: (points % 2) as u8 })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;
    use crate::simplicial::skeleton;

    fn v(xs: &[i64]) -> RationalVector {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn crossing() -> PLMap {
        let k = SimplicialComplex::from_maximal(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let mut f = PLMap::new(k, 2, vec![v(&[0, 0]), v(&[2, 2]), v(&[0, 2]), v(&[2, 0])]).unwrap();
        f.certify(2).unwrap();
        f
    }

    #[test]
    fn crossing_segments_sign() {
        let f = crossing();
        // N(0→1) = (-1, 1), N(2→3) = (1, 1): det = -2
        assert_eq!(f.intersection_number(&[vec![0, 1], vec![2, 3]]).unwrap(), -1);
        assert_eq!(f.intersection_number(&[vec![2, 3], vec![0, 1]]).unwrap(), 1);
        assert_eq!(f.intersection_number(&[vec![1, 0], vec![2, 3]]).unwrap(), 1);
        let pts = f.global_r_fold_points(2).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].sign, -1);
        assert_eq!(f.r_intersection_sign(&[vec![0, 1], vec![2, 3]], &pts[0].location).unwrap(), -1);
        assert_eq!(f.r_intersection_sign(&[vec![0, 1], vec![3, 2]], &pts[0].location).unwrap(), 1);
    }

    #[test]
    fn three_planes_sign_is_normal_determinant() {
        let k = SimplicialComplex::from_maximal(9, &[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap();
        let coords = vec![
            v(&[-1, -1, 0]), v(&[3, -1, 0]), v(&[-1, 3, 0]),
            v(&[0, -1, -1]), v(&[0, 3, -1]), v(&[0, -1, 3]),
            v(&[-1, 0, -1]), v(&[-1, 0, 3]), v(&[3, 0, -1]),
        ];
        let mut f = PLMap::new(k, 3, coords).unwrap();
        f.certify(3).unwrap();
        // normals of the oriented planes: +z, +x, +y
        let normals = vec![v(&[0, 1, 0]), v(&[0, 0, 1]), v(&[1, 0, 0])];
        let expected = sign_det(&normals).unwrap() as i64;
        assert_eq!(f.intersection_number(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap(), expected);
    }

    #[test]
    fn uncertified_and_bad_tuples() {
        let k = SimplicialComplex::from_maximal(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let f = PLMap::new(k.clone(), 2, vec![v(&[0, 0]), v(&[2, 2]), v(&[0, 2]), v(&[2, 0])]).unwrap();
        assert!(matches!(f.intersection_number(&[vec![0, 1], vec![2, 3]]), Err(Error::Genericity(_))));
        let f = crossing();
        assert!(f.intersection_number(&[vec![0, 1], vec![0, 2]]).is_err());
        assert!(matches!(PLMap::new(k, 2, vec![v(&[0, 0])]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn touching_map_is_rejected() {
        let k = SimplicialComplex::from_maximal(4, &[vec![0, 1], vec![2, 3]]).unwrap();
        let mut f = PLMap::new(k, 2, vec![v(&[0, 0]), v(&[2, 0]), v(&[1, 0]), v(&[1, 3])]).unwrap();
        assert!(matches!(f.certify(2), Err(Error::Genericity(_))));
    }

    #[test]
    fn deterministic_random_maps() {
        let k = skeleton(2, 6).unwrap();
        let f = random_generic_map(&k, 4, 7).unwrap();
        let g = random_generic_map(&k, 4, 7).unwrap();
        assert_eq!(f.coords(), g.coords());
        assert_eq!(f.certificate().unwrap().r, 2);
    }

    #[test]
    fn skeleton_parity_is_odd() {
        let k = skeleton(2, 6).unwrap();
        for t in van_kampen_parity(&k, 4, 3, 11).unwrap() {
            assert_eq!(t.parity, 1, "{t:?}");
        }
    }
}
