//! Ornaments in the boundary of the cube `[0,1]^d`, their r-linking numbers
//! via coned extensions, mod-2 linking of cycles, and the triple cone
//! intersection terms of the Leibniz parity identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactlin::{int, rat, FlatOutcome, PreparedSimplex, Rational, RationalVector};
use crate::plmap::{intersecting_tuples, normal_block_sign, Candidate, DEFAULT_RETRIES};
use crate::simplicial::{facets, SimplicialComplex};

/// A closed pseudomanifold (a cycle over ℤ/2) with vertex coordinates.
#[derive(Clone, Debug)]
pub struct Cycle {
    complex: SimplicialComplex,
    coords: Vec<RationalVector>,
    tops: Vec<PreparedSimplex>,
}

impl Cycle {
    pub fn new(complex: SimplicialComplex, coords: Vec<RationalVector>) -> Result<Self> {
        let n = complex.dim().ok_or_else(|| Error::invalid("empty cycle"))?;
        if coords.len() != complex.vertex_count() {
            return Err(Error::dims(format!(
                "{} coordinate vectors for {} vertices",
                coords.len(),
                complex.vertex_count()
            )));
        }
        let d = coords[0].len();
        if coords.iter().any(|c| c.len() != d) {
            return Err(Error::dims("vertex coordinates of different lengths"));
        }
        if n >= d {
            return Err(Error::dims(format!("{n}-cycle in ℝ^{d}")));
        }
        if n == 0 {
            if complex.count(0) % 2 != 0 {
                return Err(Error::invalid("a 0-cycle mod 2 needs an even number of points"));
            }
        } else {
            let mut cofaces = vec![0usize; complex.count(n - 1)];
            for s in complex.simplices(n) {
                for f in facets(s) {
                    cofaces[complex.index_of(&f).expect("face")] += 1;
                }
            }
            if cofaces.iter().any(|c| c % 2 != 0) {
                return Err(Error::invalid("complex is not a cycle mod 2"));
            }
        }
        let tops = complex
            .simplices(n)
            .iter()
            .map(|s| PreparedSimplex::new(s.iter().map(|&v| coords[v].clone()).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Cycle { complex, coords, tops })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn coords(&self) -> &[RationalVector] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.complex.dim().unwrap_or(0)
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords[0].len()
    }

    pub fn top_simplices(&self) -> &[PreparedSimplex] {
        &self.tops
    }

    /// Cone simplices `[apex, σ]`, apex first, over the top simplices.
    fn cone(&self, apex: &RationalVector) -> Result<Vec<PreparedSimplex>> {
        self.complex
            .simplices(self.dim())
            .iter()
            .map(|s| {
                let verts = std::iter::once(apex.clone()).chain(s.iter().map(|&v| self.coords[v].clone()));
                PreparedSimplex::new(verts.collect())
            })
            .collect()
    }

    /// Integer fundamental cycle on the top simplices, `v_1 - v_0` for a 0-sphere.
    fn orientation_coefficients(&self) -> Result<Vec<i64>> {
        if self.dim() == 0 {
            if self.complex.count(0) != 2 {
                return Err(Error::invalid("a 0-dimensional component must have exactly two points"));
            }
            return Ok(vec![-1, 1]);
        }
        let z = self.complex.fundamental_cycle()?;
        Ok((0..self.complex.count(self.dim())).map(|i| z.coeffs[&i]).collect())
    }
}

fn candidates(simplices: &[PreparedSimplex]) -> Vec<Candidate<'_>> {
    simplices.iter().map(|s| Candidate { simplex: s, vertices: &[] }).collect()
}

/// Intersection points of one simplex per level; any non-isolated or
/// face-touching intersection is a genericity failure.
fn transverse_points(levels: &[Vec<Candidate<'_>>]) -> Result<Vec<Vec<usize>>> {
    let (_, hits) = intersecting_tuples(levels, false)?;
    hits.into_iter()
        .map(|(t, outcome)| match outcome {
            FlatOutcome::Interior(_) => Ok(t),
            other => Err(Error::generic(format!("tuple {t:?}: {other}"))),
        })
        .collect()
}

fn random_interior_point(rng: &mut ChaCha8Rng, d: usize) -> RationalVector {
    const DENOMS: [i64; 4] = [61, 67, 71, 73];
    (0..d)
        .map(|_| {
            let den = DENOMS[rng.random_range(0..DENOMS.len())];
            rat(rng.random_range(1..den), den)
        })
        .collect()
}

/// Runs `f` on fresh random interior apexes until it stops reporting a
/// genericity failure.
fn with_apexes<T>(
    seed: u64,
    count: usize,
    d: usize,
    mut f: impl FnMut(&[RationalVector]) -> Result<T>,
) -> Result<(T, Vec<RationalVector>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for attempt in 1..=DEFAULT_RETRIES {
        let apexes: Vec<RationalVector> = (0..count).map(|_| random_interior_point(&mut rng, d)).collect();
        if (0..count).any(|i| apexes[i + 1..].contains(&apexes[i])) {
            continue;
        }
        match f(&apexes) {
            Ok(v) => return Ok((v, apexes, attempt)),
            Err(e @ Error::Genericity(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::generic(format!(
        "no generic apexes after {DEFAULT_RETRIES} attempts: {}",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn on_cube_boundary(p: &[Rational]) -> bool {
    let (zero, one) = (int(0), int(1));
    p.iter().all(|x| *x >= zero && *x <= one) && p.iter().any(|x| *x == zero || *x == one)
}

/// The simplex lies in one facet of the cube.
fn in_cube_facet(verts: &[RationalVector]) -> bool {
    let (zero, one) = (int(0), int(1));
    (0..verts[0].len()).any(|c| {
        let b = &verts[0][c];
        (*b == zero || *b == one) && verts.iter().all(|v| v[c] == *b)
    })
}

#[derive(Clone, Debug)]
pub struct OrnamentComponent {
    pub cycle: Cycle,
    /// `±1`, multiplies the fundamental cycle.
    pub orientation: i8,
    coefficients: Vec<i64>,
}

impl OrnamentComponent {
    pub fn new(cycle: Cycle, orientation: i8) -> Result<Self> {
        if orientation != 1 && orientation != -1 {
            return Err(Error::invalid("component orientation must be +1 or -1"));
        }
        let coefficients = cycle.orientation_coefficients()?;
        Ok(OrnamentComponent { cycle, orientation, coefficients })
    }

    /// Signed coefficient of each top simplex in the oriented component.
    pub fn coefficients(&self) -> Vec<i64> {
        self.coefficients.iter().map(|c| c * self.orientation as i64).collect()
    }
}

/// `r` oriented spheres mapped into `∂[0,1]^d` with empty common intersection.
#[derive(Clone, Debug)]
pub struct Ornament {
    d: usize,
    components: Vec<OrnamentComponent>,
}

impl Ornament {
    pub fn new(d: usize, components: Vec<OrnamentComponent>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::invalid("an ornament needs at least two components"));
        }
        for (i, c) in components.iter().enumerate() {
            if c.cycle.ambient_dim() != d {
                return Err(Error::dims(format!("component {i} lives in ℝ^{}, not ℝ^{d}", c.cycle.ambient_dim())));
            }
            if let Some(v) = c.cycle.coords.iter().position(|p| !on_cube_boundary(p)) {
                return Err(Error::invalid(format!("component {i}: vertex {v} is not on the cube boundary")));
            }
            let n = c.cycle.dim();
            for s in c.cycle.complex.simplices(n) {
                let verts: Vec<RationalVector> = s.iter().map(|&v| c.cycle.coords[v].clone()).collect();
                if !in_cube_facet(&verts) {
                    return Err(Error::invalid(format!("component {i}: simplex {s:?} leaves the cube boundary")));
                }
            }
        }
        let levels: Vec<Vec<Candidate>> = components.iter().map(|c| candidates(&c.cycle.tops)).collect();
        let (_, hits) = intersecting_tuples(&levels, false)?;
        if let Some((t, outcome)) = hits.first() {
            return Err(Error::generic(format!("component images have a common point: tuple {t:?} {outcome}")));
        }
        Ok(Ornament { d, components })
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn components(&self) -> &[OrnamentComponent] {
        &self.components
    }

    pub fn r(&self) -> usize {
        self.components.len()
    }

    /// `k` with `d = k r` and every component of dimension `k (r - 1) - 1`.
    pub fn k(&self) -> Result<usize> {
        let r = self.r();
        if self.d % r != 0 {
            return Err(Error::dims(format!("d = {} is not a multiple of r = {r}", self.d)));
        }
        let k = self.d / r;
        for (i, c) in self.components.iter().enumerate() {
            if c.cycle.dim() + 1 != k * (r - 1) {
                return Err(Error::dims(format!(
                    "component {i} has dimension {}, expected k(r-1)-1 = {}",
                    c.cycle.dim(),
                    k * (r - 1) - 1
                )));
            }
        }
        Ok(k)
    }
}

/// Cones from distinct interior apexes over every component.
#[derive(Clone, Debug)]
pub struct ConedExtension {
    pub apexes: Vec<RationalVector>,
    pub cones: Vec<Vec<PreparedSimplex>>,
    pub attempts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkingResult {
    pub value: i64,
    pub points: usize,
    pub apexes: Vec<RationalVector>,
    pub attempts: usize,
}

fn linking_sum(orn: &Ornament, cones: &[Vec<PreparedSimplex>]) -> Result<(i64, usize)> {
    let levels: Vec<Vec<Candidate>> = cones.iter().map(|c| candidates(c)).collect();
    let coefficients: Vec<Vec<i64>> = orn.components.iter().map(OrnamentComponent::coefficients).collect();
    let mut total = 0;
    let tuples = transverse_points(&levels)?;
    for t in &tuples {
        let simplices: Vec<&PreparedSimplex> = t.iter().enumerate().map(|(i, &j)| &cones[i][j]).collect();
        let eps: i64 = t.iter().enumerate().map(|(i, &j)| coefficients[i][j]).product();
        total += eps * normal_block_sign(&simplices)? as i64;
    }
    Ok((total, tuples.len()))
}

/// `lk f`: the algebraic intersection number of the coned components.
pub fn r_linking_number(orn: &Ornament, seed: u64) -> Result<i64> {
    Ok(linking_details(orn, seed)?.value)
}

pub fn linking_details(orn: &Ornament, seed: u64) -> Result<LinkingResult> {
    orn.k()?;
    let ((value, points), apexes, attempts) = with_apexes(seed, orn.r(), orn.d, |apexes| {
        let cones = orn
            .components
            .iter()
            .zip(apexes)
            .map(|(c, a)| c.cycle.cone(a))
            .collect::<Result<Vec<_>>>()?;
        linking_sum(orn, &cones)
    })?;
    Ok(LinkingResult { value, points, apexes, attempts })
}

/// The certified extension used for `seed`.
pub fn coned_extension(orn: &Ornament, seed: u64) -> Result<ConedExtension> {
    orn.k()?;
    let (cones, apexes, attempts) = with_apexes(seed, orn.r(), orn.d, |apexes| {
        let cones = orn
            .components
            .iter()
            .zip(apexes)
            .map(|(c, a)| c.cycle.cone(a))
            .collect::<Result<Vec<_>>>()?;
        linking_sum(orn, &cones)?;
        Ok(cones)
    })?;
    Ok(ConedExtension { apexes, cones, attempts })
}

pub fn apex_independence(orn: &Ornament, seeds: &[u64]) -> Result<bool> {
    if seeds.len() < 2 {
        return Err(Error::invalid("need at least two seeds"));
    }
    let values = crate::par::try_map(seeds, |&s| r_linking_number(orn, s))?;
    Ok(values.iter().all(|&v| v == values[0]))
}

/// Reflects component `i` in the hyperplane `x_j = 1/2`, `j` the first
/// coordinate along which the component is not constant. The combinatorial
/// orientation is kept, so the oriented image is reflected.
pub fn reflect_component(orn: &Ornament, i: usize) -> Result<Ornament> {
    let comp = orn
        .components
        .get(i)
        .ok_or_else(|| Error::invalid(format!("component {i} out of range 0..{}", orn.r())))?;
    let coords = &comp.cycle.coords;
    let j = (0..orn.d)
        .find(|&c| coords.iter().any(|p| p[c] != coords[0][c]))
        .ok_or_else(|| Error::invalid("component is a single point"))?;
    let one = int(1);
    let reflected: Vec<RationalVector> = coords
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q[j] = &one - &q[j];
            q
        })
        .collect();
    let cycle = Cycle::new(comp.cycle.complex.clone(), reflected)?;
    let mut components = orn.components.clone();
    components[i] = OrnamentComponent::new(cycle, comp.orientation)?;
    Ornament::new(orn.d, components)
}

/// Mod-2 linking number of two disjoint cycles.
///
/// With `dim z1 + dim z2 = d - 1` this is `|z1 ∩ Cone(z2)|` in ℝ^d. With
/// `dim z1 + dim z2 = d - 2` and both cycles on the cube boundary it is the
/// linking number in that sphere, `|Cone(z1) ∩ Cone(z2)|` for interior apexes.
pub fn mod2_linking(z1: &Cycle, z2: &Cycle, seed: u64) -> Result<u8> {
    let d = z1.ambient_dim();
    if z2.ambient_dim() != d {
        return Err(Error::dims("cycles in different ambient dimensions"));
    }
    let (n1, n2) = (z1.dim(), z2.dim());
    if supports_meet(z1, z2)? {
        return Err(Error::invalid("cycles must have disjoint supports"));
    }
    if n1 + n2 + 1 == d {
        let (count, _, _) = with_apexes(seed, 1, d, |apex| {
            let cone = z2.cone(&apex[0])?;
            Ok(transverse_points(&[candidates(&z1.tops), candidates(&cone)])?.len())
        })?;
        Ok((count % 2) as u8)
    } else if n1 + n2 + 2 == d {
        let boundary = |z: &Cycle| z.coords.iter().all(|p| on_cube_boundary(p));
        if !boundary(z1) || !boundary(z2) {
            return Err(Error::invalid("cycles of dimensions summing to d - 2 must lie on the cube boundary"));
        }
        let (count, _, _) = with_apexes(seed, 2, d, |apexes| {
            let c1 = z1.cone(&apexes[0])?;
            let c2 = z2.cone(&apexes[1])?;
            Ok(transverse_points(&[candidates(&c1), candidates(&c2)])?.len())
        })?;
        Ok((count % 2) as u8)
    } else {
        Err(Error::dims(format!("cycle dimensions {n1} + {n2} fit neither d - 1 nor d - 2 for d = {d}")))
    }
}

/// `(|z1 ∩ C2 ∩ C3|, |C1 ∩ z2 ∩ C3|, |C1 ∩ C2 ∩ z3|) mod 2` for generic
/// cones `C_i` over `z_i`.
pub fn cone_triple_terms(z1: &Cycle, z2: &Cycle, z3: &Cycle, seed: u64) -> Result<[u8; 3]> {
    let zs = [z1, z2, z3];
    let d = z1.ambient_dim();
    if zs.iter().any(|z| z.ambient_dim() != d) {
        return Err(Error::dims("cycles in different ambient dimensions"));
    }
    let total: usize = zs.iter().map(|z| z.dim()).sum();
    if total + 2 != 2 * d {
        return Err(Error::dims(format!("cycle dimensions sum to {total}, expected 2d - 2 = {}", 2 * d - 2)));
    }
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        if supports_meet(zs[a], zs[b])? {
            return Err(Error::invalid(format!("cycles {a} and {b} meet")));
        }
    }
    let (terms, _, _) = with_apexes(seed, 3, d, |apexes| {
        let cones: Vec<Vec<PreparedSimplex>> =
            zs.iter().zip(apexes).map(|(z, a)| z.cone(a)).collect::<Result<_>>()?;
        let mut out = [0u8; 3];
        for (i, slot) in out.iter_mut().enumerate() {
            // only the parity is needed, so the uncone'd cycle goes first to prune early
            let mut levels = vec![candidates(&zs[i].tops)];
            levels.extend((0..3).filter(|&j| j != i).map(|j| candidates(&cones[j])));
            *slot = (transverse_points(&levels)?.len() % 2) as u8;
        }
        Ok(out)
    })?;
    Ok(terms)
}

/// Boundary of the cube `[0,1]^m` with the staircase triangulation of each
/// facet. Vertex `v` is the corner whose coordinate `c` is bit `c` of `v`.
pub fn cube_boundary(m: usize) -> Result<SimplicialComplex> {
    if m == 0 {
        return Err(Error::invalid("cube dimension must be at least 1"));
    }
    let mut maximal = Vec::new();
    for j in 0..m {
        for b in 0..2usize {
            let free: Vec<usize> = (0..m).filter(|&c| c != j).collect();
            for order in crate::deleted::permutations(free.len()) {
                let mut v = b << j;
                let mut simplex = vec![v];
                for &o in &order {
                    v |= 1 << free[o];
                    simplex.push(v);
                }
                simplex.sort_unstable();
                maximal.push(simplex);
            }
        }
    }
    SimplicialComplex::from_maximal(1 << m, &maximal)
}

fn corner(v: usize, m: usize) -> Vec<bool> {
    (0..m).map(|c| v >> c & 1 == 1).collect()
}

/// Component `i` is the boundary of the product of `r - 1` copies of the
/// `k`-cube, with coordinate slot `i` fixed at the centre.
pub fn product_ornament(k: usize, r: usize) -> Result<Ornament> {
    if k < 1 || r < 2 {
        return Err(Error::invalid("product ornament needs k >= 1 and r >= 2"));
    }
    let m = k * (r - 1);
    let sphere = cube_boundary(m)?;
    let half = rat(1, 2);
    let components = (0..r)
        .map(|i| {
            let coords = (0..sphere.vertex_count())
                .map(|v| {
                    let bits = corner(v, m);
                    let mut free = bits.iter();
                    (0..r)
                        .flat_map(|slot| {
                            if slot == i {
                                vec![half.clone(); k]
                            } else {
                                (0..k).map(|_| int(*free.next().unwrap() as i64)).collect()
                            }
                        })
                        .collect()
                })
                .collect();
            OrnamentComponent::new(Cycle::new(sphere.clone(), coords)?, 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ornament::new(k * r, components)
}

/// Components are boundaries of pairwise disjoint boxes inside the facet
/// `x_d = 0`: box `i` spans `[1/4, 3/4]` in `x_1`, its own band in `x_2`,
/// `[1/4, 3/4]` up to `x_m`, and sits at `1/2` in the remaining coordinates.
pub fn split_ornament(k: usize, r: usize) -> Result<Ornament> {
    if k < 1 || r < 2 {
        return Err(Error::invalid("split ornament needs k >= 1 and r >= 2"));
    }
    let d = k * r;
    let m = k * (r - 1);
    let sphere = cube_boundary(m)?;
    let denom = 4 * r as i64;
    let components = (0..r)
        .map(|i| {
            let coords = (0..sphere.vertex_count())
                .map(|v| {
                    let bits = corner(v, m);
                    let mut p = vec![rat(1, 2); d];
                    if m == 1 {
                        // k = 1, r = 2: pairs of points on opposite facets
                        p[0] = if bits[0] { rat(3, 4) } else { rat(1, 4) };
                        p[d - 1] = int(i as i64);
                        return p;
                    }
                    p[d - 1] = int(0);
                    for (c, &bit) in bits.iter().enumerate() {
                        p[c] = if c == 1 {
                            rat(4 * i as i64 + if bit { 3 } else { 1 }, denom)
                        } else if bit {
                            rat(3, 4)
                        } else {
                            rat(1, 4)
                        };
                    }
                    p
                })
                .collect();
            OrnamentComponent::new(Cycle::new(sphere.clone(), coords)?, 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ornament::new(d, components)
}

/// Boundary of the box `∏ [lo_c, hi_c]`; coordinates with `lo_c = hi_c` are fixed.
pub fn box_boundary(lo: &[Rational], hi: &[Rational]) -> Result<Cycle> {
    let free: Vec<usize> = (0..lo.len()).filter(|&c| lo[c] != hi[c]).collect();
    let sphere = cube_boundary(free.len())?;
    let coords = (0..sphere.vertex_count())
        .map(|v| {
            let mut p = lo.to_vec();
            for (b, &c) in free.iter().enumerate() {
                if v >> b & 1 == 1 {
                    p[c] = hi[c].clone();
                }
            }
            p
        })
        .collect();
    Cycle::new(sphere, coords)
}

/// A torus `T = ∂Q × ∂Q` in `ℝ^4`, `Q = [1/4, 3/4]^2`, coordinates
/// `(x1, x2, y1, y2)`, with two 2-cycles off it:
/// `S_p`, the boundary of a thickened meridian disk, linking the parallel
/// `p = ∂Q × {y0}`; and `S_m`, the boundary of (thin annulus around `∂Q`) ×
/// (short segment across `∂Q`), linking the meridian `m = {x0} × ∂Q`.
#[derive(Clone, Debug)]
pub struct TorusTriple {
    pub torus: Cycle,
    pub s_p: Cycle,
    pub s_m: Cycle,
    pub parallel: Cycle,
    pub meridian: Cycle,
}

impl TorusTriple {
    pub fn cycles(&self) -> [&Cycle; 3] {
        [&self.torus, &self.s_p, &self.s_m]
    }

    /// `lk(p, S_p) lk(m, S_m) + lk(m, S_p) lk(p, S_m) mod 2`, the value
    /// `|T ∩ C_p ∩ C_m|` must take.
    pub fn predicted_first_term(&self, seed: u64) -> Result<u8> {
        let lk = |a: &Cycle, b: &Cycle| mod2_linking(a, b, seed);
        Ok((lk(&self.parallel, &self.s_p)? * lk(&self.meridian, &self.s_m)?
            + lk(&self.meridian, &self.s_p)? * lk(&self.parallel, &self.s_m)?)
            % 2)
    }
}

fn torus_triple_coords() -> [Vec<RationalVector>; 3] {
    let q = |x: i64| rat(x, 16);
    let square = |lo: i64, hi: i64| [(lo, lo), (hi, lo), (hi, hi), (lo, hi)].map(|(a, b)| [q(a), q(b)]);
    let core = square(4, 12);
    let torus = (0..16)
        .map(|v| {
            let (x, y) = (&core[v / 4], &core[v % 4]);
            vec![x[0].clone(), x[1].clone(), y[0].clone(), y[1].clone()]
        })
        .collect();
    // thickened meridian disk: x1 = 1/2, x2 across the bottom edge, y over a square around Q
    let s_p = (0..8)
        .map(|v| {
            let bit = |b: usize| v >> b & 1 == 1;
            vec![q(8), if bit(0) { q(6) } else { q(2) }, if bit(1) { q(14) } else { q(2) }, if bit(2) { q(14) } else { q(2) }]
        })
        .collect();
    // annulus between the inner and outer squares, times y1 across the left edge, y2 = 1/2
    let (inner, outer) = (square(5, 11), square(3, 13));
    let s_m = (0..16)
        .map(|v| {
            let (i, j) = (v / 4, v % 4);
            let x = if j == 0 || j == 3 { &inner[i] } else { &outer[i] };
            let y1 = if j < 2 { q(3) } else { q(5) };
            vec![x[0].clone(), x[1].clone(), y1, q(8)]
        })
        .collect();
    [torus, s_p, s_m]
}

fn assemble_torus_triple(coords: [Vec<RationalVector>; 3]) -> Result<TorusTriple> {
    let [t, sp, sm] = coords;
    let grid = crate::simplicial::torus_grid(4, 4)?;
    let parallel = polygon((0..4).map(|i| t[4 * i].clone()).collect())?;
    let meridian = polygon((0..4).map(|j| t[j].clone()).collect())?;
    let triple = TorusTriple {
        torus: Cycle::new(grid.clone(), t)?,
        s_p: Cycle::new(cube_boundary(3)?, sp)?,
        s_m: Cycle::new(grid, sm)?,
        parallel,
        meridian,
    };
    let [a, b, c] = triple.cycles();
    if supports_meet(a, b)? || supports_meet(a, c)? || supports_meet(b, c)? {
        return Err(Error::generic("torus triple supports meet"));
    }
    Ok(triple)
}

pub fn torus_triple() -> Result<TorusTriple> {
    assemble_torus_triple(torus_triple_coords())
}

/// [`torus_triple`] with every vertex moved by at most `1/64` per coordinate
/// and the coordinates permuted, redrawn until the supports stay disjoint.
pub fn random_torus_triple(seed: u64) -> Result<TorusTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let mut perm: Vec<usize> = (0..4).collect();
        for i in (1..4).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let coords = torus_triple_coords().map(|pts| {
            pts.into_iter()
                .map(|p| perm.iter().map(|&c| &p[c] + rat(rng.random_range(-8..=8), 512)).collect())
                .collect()
        });
        match assemble_torus_triple(coords) {
            Ok(t) => return Ok(t),
            Err(Error::Genericity(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::generic("could not draw a disjoint torus triple"))
}

fn supports_meet(a: &Cycle, b: &Cycle) -> Result<bool> {
    let (_, hits) = intersecting_tuples(&[candidates(&a.tops), candidates(&b.tops)], false)?;
    Ok(!hits.is_empty())
}

/// Three boundaries of random tetrahedra in `[0,1]^4` with pairwise
/// disjoint supports, by rejection.
pub fn random_sphere_triple(seed: u64) -> Result<[Cycle; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sphere = crate::simplicial::simplex_boundary(3)?;
    let draw = |rng: &mut ChaCha8Rng| -> Result<Cycle> {
        loop {
            let coords: Vec<RationalVector> =
                (0..4).map(|_| (0..4).map(|_| rat(rng.random_range(0..=32), 32)).collect()).collect();
            match Cycle::new(sphere.clone(), coords) {
                Ok(c) => return Ok(c),
                Err(Error::Genericity(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    };
    for _ in 0..10_000 {
        let a = draw(&mut rng)?;
        let b = draw(&mut rng)?;
        if supports_meet(&a, &b)? {
            continue;
        }
        let c = draw(&mut rng)?;
        if supports_meet(&a, &c)? || supports_meet(&b, &c)? {
            continue;
        }
        return Ok([a, b, c]);
    }
    Err(Error::generic("could not draw three disjoint spheres"))
}

/// Closed polygon on vertices `0..n` in the given order.
pub fn polygon(points: Vec<RationalVector>) -> Result<Cycle> {
    let n = points.len();
    if n < 3 {
        return Err(Error::invalid("a polygon needs at least three vertices"));
    }
    let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    Cycle::new(SimplicialComplex::from_maximal(n, &edges)?, points)
}

/// Signed winding number of a planar closed polygon around `p`, by signed
/// crossings of the upward ray from `p` (the polygon must avoid `p`).
pub fn winding_number(poly: &[[Rational; 2]], p: &[Rational; 2]) -> i64 {
    let mut w = 0;
    for i in 0..poly.len() {
        let a = &poly[i];
        let b = &poly[(i + 1) % poly.len()];
        // half-open rule on x to count vertices once
        let a_left = a[0] <= p[0];
        let b_left = b[0] <= p[0];
        if a_left == b_left {
            continue;
        }
        let t = (&p[0] - &a[0]) / (&b[0] - &a[0]);
        let y = &a[1] + t * (&b[1] - &a[1]);
        if y > p[1] {
            // edge crosses above p: moving right→left counts +1 for counterclockwise
            w += if a_left { -1 } else { 1 };
        }
    }
    w
}

/// Data certified by [`cnld1_ornament`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnld1Certificate {
    /// Crossings of components 2 and 3 in the top face, with their signs.
    pub crossings: Vec<([Rational; 2], i8)>,
    /// Windings of component 1 around `p1, p2, n1, n2`.
    pub windings: [i64; 4],
}

/// Three circles in the top facet `z = 1` of `[0,1]^3` (oriented by `(e1, e2)`).
/// Components 2 and 3 are overlapping rectangles crossing at two positive
/// points `p1, p2` and two negative points `n1, n2`; component 1 is a
/// figure-8 winding `+1` around `p1`, `-1` around `p2`, and `0` around `n1, n2`.
pub fn cnld1_ornament() -> Result<(Ornament, Cnld1Certificate)> {
    let q = |x: i64, y: i64| [rat(x, 100), rat(y, 100)];
    let lift = |pts: &[[Rational; 2]]| -> Vec<RationalVector> {
        pts.iter().map(|p| vec![p[0].clone(), p[1].clone(), int(1)]).collect()
    };
    let eight = [q(55, 45), q(55, 35), q(65, 35), q(65, 45), q(35, 55), q(35, 65), q(45, 65), q(45, 55)];
    let rect2 = [q(20, 40), q(80, 40), q(80, 60), q(20, 60)];
    let rect3 = [q(40, 20), q(60, 20), q(60, 80), q(40, 80)];

    // crossings of the two rectangles and their signs in the plane
    let mut crossings = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            let a = [rect2[i].clone(), rect2[(i + 1) % 4].clone()];
            let b = [rect3[j].clone(), rect3[(j + 1) % 4].clone()];
            let sa = PreparedSimplex::new(a.iter().map(|p| p.to_vec()).collect())?;
            let sb = PreparedSimplex::new(b.iter().map(|p| p.to_vec()).collect())?;
            match crate::exactlin::intersect_prepared(&[&sa, &sb])? {
                FlatOutcome::Empty => {}
                FlatOutcome::Interior(fi) => {
                    let point = [fi.point[0].clone(), fi.point[1].clone()];
                    crossings.push((point, normal_block_sign(&[&sa, &sb])?));
                }
                other => return Err(Error::generic(format!("rectangle edges meet badly: {other}"))),
            }
        }
    }
    crossings.sort();
    let positive: Vec<&[Rational; 2]> = crossings.iter().filter(|c| c.1 > 0).map(|c| &c.0).collect();
    let negative: Vec<&[Rational; 2]> = crossings.iter().filter(|c| c.1 < 0).map(|c| &c.0).collect();
    if positive.len() != 2 || negative.len() != 2 {
        return Err(Error::generic("rectangles must cross at two positive and two negative points"));
    }
    // p1 is the positive crossing inside the first lobe
    let lobe1 = &eight[..4];
    let (p1, p2) = if winding_number(lobe1, positive[0]) != 0 {
        (positive[0], positive[1])
    } else {
        (positive[1], positive[0])
    };
    let windings = [p1, p2, negative[0], negative[1]].map(|p| winding_number(&eight, p));
    if windings != [1, -1, 0, 0] {
        return Err(Error::generic(format!("figure-8 windings {windings:?}, expected [1, -1, 0, 0]")));
    }
    let components = vec![
        OrnamentComponent::new(polygon(lift(&eight))?, 1)?,
        OrnamentComponent::new(polygon(lift(&rect2))?, 1)?,
        OrnamentComponent::new(polygon(lift(&rect3))?, 1)?,
    ];
    let orn = Ornament::new(3, components)?;
    Ok((orn, Cnld1Certificate { crossings, windings }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_boundary_counts() {
        let s = cube_boundary(4).unwrap();
        assert_eq!(s.count(3), 48);
        assert_eq!(s.vertex_count(), 16);
        assert!(s.fundamental_cycle().is_ok());
        assert_eq!(cube_boundary(2).unwrap().count(1), 4);
        assert_eq!(cube_boundary(3).unwrap().count(2), 12);
        assert_eq!(cube_boundary(3).unwrap().euler_characteristic(), 2);
    }

    #[test]
    fn hopf_pair_links_once() {
        let orn = product_ornament(2, 2).unwrap();
        assert_eq!(r_linking_number(&orn, 0).unwrap().abs(), 1);
        let z1 = &orn.components()[0].cycle;
        let z2 = &orn.components()[1].cycle;
        assert_eq!(mod2_linking(z1, z2, 0).unwrap(), 1);
        assert_eq!(mod2_linking(z2, z1, 5).unwrap(), 1);
    }

    #[test]
    fn split_ornaments_are_unlinked() {
        for (k, r) in [(1, 2), (2, 2), (1, 3)] {
            let orn = split_ornament(k, r).unwrap();
            assert_eq!(r_linking_number(&orn, 1).unwrap(), 0, "k={k} r={r}");
        }
    }

    #[test]
    fn reflection_negates() {
        let orn = product_ornament(2, 2).unwrap();
        let lk = r_linking_number(&orn, 0).unwrap();
        let refl = reflect_component(&orn, 1).unwrap();
        assert_eq!(r_linking_number(&refl, 0).unwrap(), -lk);
        let back = reflect_component(&refl, 1).unwrap();
        assert_eq!(r_linking_number(&back, 3).unwrap(), lk);
        assert!(reflect_component(&orn, 2).is_err());
    }

    #[test]
    fn windings() {
        let sq = [[int(0), int(0)], [int(2), int(0)], [int(2), int(2)], [int(0), int(2)]];
        assert_eq!(winding_number(&sq, &[int(1), int(1)]), 1);
        let rev: Vec<_> = sq.iter().rev().cloned().collect();
        assert_eq!(winding_number(&rev, &[int(1), int(1)]), -1);
        assert_eq!(winding_number(&sq, &[int(3), int(1)]), 0);
    }

    #[test]
    fn cnld1_postconditions() {
        let (orn, cert) = cnld1_ornament().unwrap();
        assert_eq!(cert.windings, [1, -1, 0, 0]);
        assert_eq!(cert.crossings.len(), 4);
        assert_eq!(r_linking_number(&orn, 0).unwrap(), 0);
    }

    #[test]
    fn triple_terms_sum_to_zero() {
        let tt = torus_triple().unwrap();
        let [t, sp, sm] = tt.cycles();
        let terms = cone_triple_terms(t, sp, sm, 0).unwrap();
        assert_eq!(terms.iter().sum::<u8>() % 2, 0);
        assert_eq!(tt.predicted_first_term(0).unwrap(), 1);
        assert_eq!(terms[0], 1);
        for seed in 0..3 {
            let tt = random_torus_triple(seed).unwrap();
            let [t, sp, sm] = tt.cycles();
            let terms = cone_triple_terms(t, sp, sm, seed).unwrap();
            assert_eq!(terms.iter().sum::<u8>() % 2, 0);
            assert_eq!(terms[0], tt.predicted_first_term(seed).unwrap());
        }
        for seed in 0..5 {
            let [a, b, c] = random_sphere_triple(seed).unwrap();
            let terms = cone_triple_terms(&a, &b, &c, seed).unwrap();
            assert_eq!(terms.iter().sum::<u8>() % 2, 0, "{terms:?}");
        }
    }

    #[test]
    fn separated_triple_is_zero() {
        let q = |x: i64| rat(x, 16);
        let boxes: Vec<Cycle> = (0..3)
            .map(|i| box_boundary(&[q(1 + 5 * i), q(1), q(1), q(8)], &[q(4 + 5 * i), q(4), q(4), q(8)]).unwrap())
            .collect();
        assert_eq!(cone_triple_terms(&boxes[0], &boxes[1], &boxes[2], 2).unwrap(), [0, 0, 0]);
    }

    #[test]
    fn ornament_rejects_interior_points() {
        let sq = polygon(vec![
            vec![rat(1, 4), rat(1, 4), rat(1, 2)],
            vec![rat(3, 4), rat(1, 4), rat(1, 2)],
            vec![rat(1, 2), rat(3, 4), rat(1, 2)],
        ])
        .unwrap();
        let c = OrnamentComponent::new(sq, 1).unwrap();
        assert!(Ornament::new(3, vec![c.clone(), c]).is_err());
    }
}
