//! Finite abstract simplicial complexes, integer chains, boundary operators and
//! constructors for the named complexes (skeleta, torus grids, the FKT complex,
//! cones).
//!
//! A simplex is a strictly increasing list of vertex indices; its canonical
//! orientation is that vertex order. Complexes keep every face of every listed
//! simplex in memory, grouped by dimension and sorted lexicographically, so a
//! simplex is addressed by `(dimension, index)`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::SparseIntMatrix;

/// Strictly increasing vertex indices.
pub type Simplex = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    name: Option<String>,
    vertex_count: usize,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    marked: BTreeMap<String, Vec<Simplex>>,
}

/// All `(len)`-element subsets of `items`, in lexicographic order.
pub(crate) fn subsets<T: Clone>(items: &[T], len: usize) -> Vec<Vec<T>> {
    let n = items.len();
    let mut out = Vec::new();
    if len > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..len).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i].clone()).collect());
        let mut pos = len;
        while pos > 0 && idx[pos - 1] == pos - 1 + n - len {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        idx[pos - 1] += 1;
        for j in pos..len {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Facets of a simplex, `i`-th facet omits vertex `i`.
pub fn facets(s: &[usize]) -> Vec<Simplex> {
    (0..s.len())
        .map(|i| {
            let mut f = s.to_vec();
            f.remove(i);
            f
        })
        .collect()
}

fn normalize(simplex: &[usize]) -> Result<Simplex> {
    let mut s = simplex.to_vec();
    s.sort_unstable();
    if s.is_empty() {
        return Err(Error::invalid("empty simplex"));
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!("repeated vertex in simplex {simplex:?}")));
    }
    Ok(s)
}

impl SimplicialComplex {
    /// Builds the complex generated by `maximal` (any generating set is fine;
    /// faces are added). Vertices `0..vertex_count` are always present.
    pub fn from_maximal(vertex_count: usize, maximal: &[Vec<usize>]) -> Result<Self> {
        let mut by_dim: Vec<std::collections::BTreeSet<Simplex>> = vec![Default::default()];
        for v in 0..vertex_count {
            by_dim[0].insert(vec![v]);
        }
        for raw in maximal {
            let s = normalize(raw)?;
            if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::invalid(format!(
                    "vertex {v} out of range (vertex_count = {vertex_count})"
                )));
            }
            let top = s.len() - 1;
            while by_dim.len() <= top {
                by_dim.push(Default::default());
            }
            if by_dim[top].contains(&s) {
                continue;
            }
            for q in 1..=top {
                for face in subsets(&s, q + 1) {
                    by_dim[q].insert(face);
                }
            }
        }
        while by_dim.len() > 1 && by_dim.last().is_some_and(|d| d.is_empty()) {
            by_dim.pop();
        }
        let simplices: Vec<Vec<Simplex>> =
            by_dim.into_iter().map(|set| set.into_iter().collect()).collect();
        let index = simplices
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Ok(SimplicialComplex {
            name: None,
            vertex_count,
            simplices,
            index,
            marked: BTreeMap::new(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Records a distinguished subcomplex by its generating simplices.
    pub fn mark(&mut self, label: impl Into<String>, simplices: Vec<Vec<usize>>) -> Result<()> {
        let label = label.into();
        let mut list = Vec::with_capacity(simplices.len());
        for s in simplices {
            let s = normalize(&s)?;
            if !self.contains(&s) {
                return Err(Error::invalid(format!(
                    "marked subcomplex {label:?} uses {s:?}, which is not a simplex"
                )));
            }
            list.push(s);
        }
        list.sort();
        list.dedup();
        self.marked.insert(label, list);
        Ok(())
    }

    pub fn marked(&self, label: &str) -> Option<&[Simplex]> {
        self.marked.get(label).map(Vec::as_slice)
    }

    pub fn marked_labels(&self) -> impl Iterator<Item = &str> {
        self.marked.keys().map(String::as_str)
    }

    pub(crate) fn marked_map(&self) -> &BTreeMap<String, Vec<Simplex>> {
        &self.marked
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        if self.vertex_count == 0 {
            None
        } else {
            Some(self.simplices.len() - 1)
        }
    }

    pub fn simplices(&self, q: usize) -> &[Simplex] {
        self.simplices.get(q).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, q: usize) -> usize {
        self.simplices(q).len()
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let q = simplex.len().checked_sub(1)?;
        self.index.get(q)?.get(simplex).copied()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.index_of(simplex).is_some()
    }

    /// Simplices that are not a face of another simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for q in 0..self.simplices.len() {
            let mut covered = vec![false; self.count(q)];
            if let Some(upper) = self.simplices.get(q + 1) {
                for s in upper {
                    for f in facets(s) {
                        covered[self.index[q][&f]] = true;
                    }
                }
            }
            out.extend(
                self.simplices[q]
                    .iter()
                    .zip(covered)
                    .filter(|(_, c)| !c)
                    .map(|(s, _)| s.clone()),
            );
        }
        out.sort();
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(q, l)| if q % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// The subcomplex generated by `generators` (which must be simplices here).
    pub fn subcomplex(&self, generators: &[Simplex]) -> Result<SimplicialComplex> {
        for g in generators {
            if !self.contains(g) {
                return Err(Error::invalid(format!("{g:?} is not a simplex of the complex")));
            }
        }
        SimplicialComplex::from_maximal(self.vertex_count, generators)
    }

    /// Simplicial boundary `∂_q`: rows index `(q-1)`-simplices, columns
    /// `q`-simplices, `∂[v0..vq] = Σ (-1)^i [v0..v̂i..vq]`.
    pub fn boundary_matrix(&self, q: usize) -> Result<SparseIntMatrix> {
        let top = self.dim().unwrap_or(0);
        if q == 0 || q > top {
            return Err(Error::dims(format!("boundary degree {q} outside 1..={top}")));
        }
        let mut triplets = Vec::with_capacity(self.count(q) * (q + 1));
        for (col, s) in self.simplices[q].iter().enumerate() {
            for (i, f) in facets(s).into_iter().enumerate() {
                let row = self.index[q - 1][&f];
                triplets.push((row, col, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        Ok(SparseIntMatrix::from_triplets(self.count(q - 1), self.count(q), triplets))
    }

    /// Integer boundary of a chain.
    pub fn boundary(&self, chain: &IntegerChain) -> Result<IntegerChain> {
        if chain.dim == 0 {
            return Ok(IntegerChain::zero(0));
        }
        let mut out = IntegerChain::zero(chain.dim - 1);
        for (&id, &c) in &chain.coeffs {
            let s = self
                .simplices(chain.dim)
                .get(id)
                .ok_or_else(|| Error::invalid(format!("no {}-simplex with id {id}", chain.dim)))?;
            for (i, f) in facets(s).into_iter().enumerate() {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                out.add(self.index[chain.dim - 1][&f], sign * c);
            }
        }
        Ok(out)
    }

    /// Coefficients `±1` on the top simplices making their sum an integer
    /// cycle, for a connected closed orientable pseudomanifold.
    pub fn fundamental_cycle(&self) -> Result<IntegerChain> {
        let n = self
            .dim()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::invalid("fundamental cycle needs dimension >= 1"))?;
        let tops = self.simplices(n);
        let mut cofaces: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.count(n - 1)];
        for (t, s) in tops.iter().enumerate() {
            for (i, f) in facets(s).into_iter().enumerate() {
                cofaces[self.index[n - 1][&f]].push((t, if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        if cofaces.iter().any(|c| c.len() != 2) {
            return Err(Error::invalid(
                "not a closed pseudomanifold: some facet does not have exactly two cofaces",
            ));
        }
        let mut eps = vec![0i64; tops.len()];
        eps[0] = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(t) = queue.pop_front() {
            for (i, f) in facets(&tops[t]).into_iter().enumerate() {
                let sign_t = if i % 2 == 0 { 1 } else { -1 };
                let fid = self.index[n - 1][&f];
                let &(other, sign_o) =
                    cofaces[fid].iter().find(|(u, _)| *u != t).expect("two cofaces");
                let want = -sign_t * eps[t] * sign_o;
                if eps[other] == 0 {
                    eps[other] = want;
                    queue.push_back(other);
                } else if eps[other] != want {
                    return Err(Error::invalid("pseudomanifold is not orientable"));
                }
            }
        }
        if eps.contains(&0) {
            return Err(Error::invalid("pseudomanifold is not connected"));
        }
        Ok(IntegerChain {
            dim: n,
            coeffs: eps.into_iter().enumerate().collect(),
        })
    }
}

/// Integer chain on the `dim`-simplices of a complex, keyed by simplex index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerChain {
    pub dim: usize,
    pub coeffs: BTreeMap<usize, i64>,
}

impl IntegerChain {
    pub fn zero(dim: usize) -> Self {
        IntegerChain { dim, coeffs: BTreeMap::new() }
    }

    pub fn add(&mut self, id: usize, c: i64) {
        let e = self.coeffs.entry(id).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&id);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Reduction mod 2: ids with odd coefficient.
    pub fn mod2_support(&self) -> Vec<usize> {
        self.coeffs.iter().filter(|(_, c)| *c % 2 != 0).map(|(&i, _)| i).collect()
    }
}

/// `n`-skeleton of the `big_n`-simplex on vertices `0..=big_n`.
pub fn skeleton(n: usize, big_n: usize) -> Result<SimplicialComplex> {
    if n > big_n {
        return Err(Error::dims(format!("skeleton dimension {n} exceeds simplex dimension {big_n}")));
    }
    let verts: Vec<usize> = (0..=big_n).collect();
    let maximal = subsets(&verts, n + 1);
    Ok(SimplicialComplex::from_maximal(big_n + 1, &maximal)?
        .with_name(format!("skeleton-{n}-{big_n}")))
}

/// Boundary of the `n`-simplex.
pub fn simplex_boundary(n: usize) -> Result<SimplicialComplex> {
    if n == 0 {
        return Err(Error::dims("the 0-simplex has empty boundary"));
    }
    Ok(skeleton(n - 1, n)?.with_name(format!("boundary-simplex-{n}")))
}

/// Two vertex-disjoint triangles.
pub fn two_disjoint_triangles() -> SimplicialComplex {
    SimplicialComplex::from_maximal(6, &[vec![0, 1, 2], vec![3, 4, 5]])
        .expect("valid")
        .with_name("two-triangles")
}

/// `a × b` grid triangulation of the torus. Vertex `(i, j)` has index
/// `i * b + j`; the square at `(i, j)` is split along the diagonal
/// `(i, j)–(i+1, j+1)`. Marks `meridian` (the cycle `(i, 0)`, i.e. `S¹×·`)
/// and `parallel` (the cycle `(0, j)`, i.e. `·×S¹`).
pub fn torus_grid(a: usize, b: usize) -> Result<SimplicialComplex> {
    if a < 3 || b < 3 {
        return Err(Error::invalid(format!("torus grid {a}x{b} is not simplicial (need a, b >= 3)")));
    }
    let v = |i: usize, j: usize| (i % a) * b + (j % b);
    let mut tris = Vec::with_capacity(2 * a * b);
    for i in 0..a {
        for j in 0..b {
            tris.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
            tris.push(vec![v(i, j), v(i, j + 1), v(i + 1, j + 1)]);
        }
    }
    let mut k = SimplicialComplex::from_maximal(a * b, &tris)?.with_name(format!("torus-{a}-{b}"));
    k.mark("meridian", (0..a).map(|i| vec![v(i, 0), v(i + 1, 0)]).collect())?;
    k.mark("parallel", (0..b).map(|j| vec![v(0, j), v(0, j + 1)]).collect())?;
    Ok(k)
}

/// The FKT 2-complex: two copies of the 2-skeleton of the 6-simplex with one
/// triangle removed, wedged at a vertex, with a 3×3 torus glued along the
/// boundaries of the removed triangles.
///
/// Vertices: `p1..p7 -> 0..6`, `m2..m7 -> 7..12` (`m1 = p1 = 0`), torus grid
/// vertices `(1,1), (1,2), (2,1), (2,2) -> 13..16`. The torus row `(i, 0)` is
/// glued to `p_{i+1}` and the column `(0, j)` to `m_{j+1}`.
pub fn fkt_complex() -> SimplicialComplex {
    let p = |i: usize| i - 1;
    let m = |i: usize| if i == 1 { 0 } else { i + 5 };
    let mut maximal = Vec::new();
    let seven: Vec<usize> = (1..=7).collect();
    for t in subsets(&seven, 3) {
        if t == [1, 2, 3] {
            continue;
        }
        maximal.push(t.iter().map(|&i| p(i)).collect::<Vec<_>>());
        maximal.push(t.iter().map(|&i| m(i)).collect::<Vec<_>>());
    }
    let torus = torus_grid(3, 3).expect("3x3 torus");
    let glue = |tv: usize| -> usize {
        let (i, j) = (tv / 3, tv % 3);
        match (i, j) {
            (i, 0) => p(i + 1),
            (0, j) => m(j + 1),
            (1, 1) => 13,
            (1, 2) => 14,
            (2, 1) => 15,
            (2, 2) => 16,
            _ => unreachable!(),
        }
    };
    for t in torus.simplices(2) {
        maximal.push(t.iter().map(|&v| glue(v)).collect());
    }
    let mut k = SimplicialComplex::from_maximal(17, &maximal).expect("fkt complex").with_name("fkt");
    let cycle = |f: &dyn Fn(usize) -> usize| vec![vec![f(1), f(2)], vec![f(2), f(3)], vec![f(1), f(3)]];
    let sphere = |f: &dyn Fn(usize) -> usize| {
        subsets(&[4, 5, 6, 7], 3)
            .into_iter()
            .map(|t| t.into_iter().map(f).collect())
            .collect::<Vec<Vec<usize>>>()
    };
    let marks = [
        ("p", cycle(&p)),
        ("m", cycle(&m)),
        ("S2_p", sphere(&p)),
        ("S2_m", sphere(&m)),
        (
            "meridian",
            torus.marked("meridian").unwrap().iter().map(|e| e.iter().map(|&v| glue(v)).collect()).collect(),
        ),
        (
            "parallel",
            torus.marked("parallel").unwrap().iter().map(|e| e.iter().map(|&v| glue(v)).collect()).collect(),
        ),
    ];
    for (label, list) in marks {
        k.mark(label, list).expect("marked simplices belong to the complex");
    }
    k
}

/// Adds a cone over the subcomplex generated by `base` with a fresh apex
/// (index `K.vertex_count()`), returning the new complex and the apex.
pub fn cone_complex(k: &SimplicialComplex, base: &[Vec<usize>]) -> Result<(SimplicialComplex, usize)> {
    let apex = k.vertex_count();
    let mut maximal = k.maximal_simplices();
    for s in base {
        let s = normalize(s)?;
        if !k.contains(&s) {
            return Err(Error::invalid(format!("cone base {s:?} is not a simplex of the complex")));
        }
        let mut c = s;
        c.push(apex);
        maximal.push(c);
    }
    let mut out = SimplicialComplex::from_maximal(apex + 1, &maximal)?;
    out.name = k.name.as_ref().map(|n| format!("cone({n})"));
    out.marked = k.marked.clone();
    Ok((out, apex))
}

/// The cone chain `apex * z` written in canonical orientations of
/// `coned` (where the apex is the largest vertex): `[apex, σ] = (-1)^{q+1} [σ, apex]`.
/// Its boundary is `z - apex * ∂z`.
pub fn cone_chain(
    base: &SimplicialComplex,
    coned: &SimplicialComplex,
    apex: usize,
    z: &IntegerChain,
) -> Result<IntegerChain> {
    let mut out = IntegerChain::zero(z.dim + 1);
    let sign = if (z.dim + 1) % 2 == 0 { 1 } else { -1 };
    for (&id, &c) in &z.coeffs {
        let mut s = base.simplices(z.dim)[id].clone();
        s.push(apex);
        let target = coned
            .index_of(&s)
            .ok_or_else(|| Error::invalid(format!("cone simplex {s:?} missing")))?;
        out.add(target, sign * c);
    }
    Ok(out)
}
