//! The simplicial r-fold deleted product with its symmetric-group action.
//!
//! A cell is an ordered tuple of pairwise vertex-disjoint simplices, each
//! addressed by `(dimension, index)` in the base complex. A permutation `π`
//! (stored as `perm[j] = π(j)`) acts by `(π·e)_i = e_{π⁻¹(i)}`, so the factor
//! in slot `j` moves to slot `π(j)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::SparseIntMatrix;
use crate::par;
use crate::simplicial::{facets, SimplicialComplex};

/// `(dimension, index)` of a simplex of the base complex.
pub type SimplexId = (usize, usize);
pub type Cell = Vec<SimplexId>;
pub type Permutation = Vec<usize>;

/// Which member of each orbit represents it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RepresentativeOrder {
    /// Lexicographically smallest tuple (the default).
    #[default]
    LexMin,
    /// Lexicographically largest tuple; only used to test independence of the choice.
    LexMax,
}

#[derive(Clone, Debug)]
pub struct DeletedProductOptions {
    pub order: RepresentativeOrder,
    pub max_cells: usize,
}

impl Default for DeletedProductOptions {
    fn default() -> Self {
        DeletedProductOptions { order: RepresentativeOrder::LexMin, max_cells: 1_000_000 }
    }
}

#[derive(Clone, Debug)]
struct OrbitEntry {
    orbit: usize,
    /// `cell = perm · representative`
    perm: Permutation,
}

#[derive(Clone, Debug)]
pub struct DeletedProduct {
    base: SimplicialComplex,
    r: usize,
    cells: Vec<Vec<Cell>>,
    index: Vec<HashMap<Cell, usize>>,
    orbit_of: Vec<Vec<OrbitEntry>>,
    /// Per dimension, the representative cell of each orbit.
    reps: Vec<Vec<usize>>,
}

pub fn perm_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

pub fn compose(pi: &[usize], rho: &[usize]) -> Permutation {
    rho.iter().map(|&j| pi[j]).collect()
}

pub fn inverse(pi: &[usize]) -> Permutation {
    let mut inv = vec![0; pi.len()];
    for (j, &p) in pi.iter().enumerate() {
        inv[p] = j;
    }
    inv
}

/// `(π·e)_{π(j)} = e_j`.
pub fn act<T: Clone>(pi: &[usize], cell: &[T]) -> Vec<T> {
    let mut out = cell.to_vec();
    for (j, x) in cell.iter().enumerate() {
        out[pi[j]] = x.clone();
    }
    out
}

/// All permutations of `0..r` in lexicographic order.
pub fn permutations(r: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut p: Permutation = (0..r).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..r).rev().find(|&i| p[i - 1] < p[i]) else { return out };
        let j = (i..r).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// `w(π, e) = sign(π)^{k r} · (-1)^{Σ_{i<j, π(i)>π(j)} dim σ_i dim σ_j}`.
pub fn koszul_weight(perm: &[usize], dims: &[usize], k: usize) -> i8 {
    let r = perm.len();
    let mut exp = 0;
    for i in 0..r {
        for j in i + 1..r {
            if perm[i] > perm[j] {
                exp += dims[i] * dims[j];
            }
        }
    }
    let koszul = if exp % 2 == 0 { 1 } else { -1 };
    let base = if (k * r) % 2 == 0 { 1 } else { perm_sign(perm) };
    base * koszul
}

fn is_disjoint(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|v| !b.contains(v))
}

impl DeletedProduct {
    pub fn new(base: &SimplicialComplex, r: usize) -> Result<Self> {
        Self::with_options(base, r, &DeletedProductOptions::default())
    }

    pub fn with_options(base: &SimplicialComplex, r: usize, opts: &DeletedProductOptions) -> Result<Self> {
        if r < 2 {
            return Err(Error::invalid("deleted product needs r >= 2"));
        }
        let n = base.dim().unwrap_or(0);
        let ids: Vec<SimplexId> = (0..=n)
            .flat_map(|q| (0..base.count(q)).map(move |i| (q, i)))
            .collect();
        let top = if base.dim().is_some() { r * n } else { 0 };
        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); top + 1];
        let mut total = 0usize;
        let mut stack: Cell = Vec::with_capacity(r);
        fn rec(
            base: &SimplicialComplex,
            ids: &[SimplexId],
            r: usize,
            stack: &mut Cell,
            cells: &mut [Vec<Cell>],
            total: &mut usize,
            cap: usize,
        ) -> Result<()> {
            if stack.len() == r {
                *total += 1;
                if *total > cap {
                    return Err(Error::Budget(format!("deleted product has more than {cap} cells")));
                }
                let dim = stack.iter().map(|s| s.0).sum::<usize>();
                cells[dim].push(stack.clone());
                return Ok(());
            }
            for &id in ids {
                let s = &base.simplices(id.0)[id.1];
                if stack.iter().all(|t| is_disjoint(&base.simplices(t.0)[t.1], s)) {
                    stack.push(id);
                    rec(base, ids, r, stack, cells, total, cap)?;
                    stack.pop();
                }
            }
            Ok(())
        }
        if base.dim().is_some() {
            rec(base, &ids, r, &mut stack, &mut cells, &mut total, opts.max_cells)?;
        }
        let mut index = Vec::with_capacity(cells.len());
        let mut orbit_of = Vec::with_capacity(cells.len());
        let mut reps = Vec::with_capacity(cells.len());
        for list in &mut cells {
            list.sort_unstable();
            let idx: HashMap<Cell, usize> = list.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
            let mut rep_ids: Vec<usize> = Vec::new();
            let mut orbit_by_rep: HashMap<usize, usize> = HashMap::new();
            let mut entries = Vec::with_capacity(list.len());
            for cell in list.iter() {
                let mut rep = cell.clone();
                rep.sort_unstable();
                if opts.order == RepresentativeOrder::LexMax {
                    rep.reverse();
                }
                // rep[j] = cell[π(j)]
                let perm: Permutation =
                    rep.iter().map(|x| cell.iter().position(|y| y == x).unwrap()).collect();
                let rid = idx[&rep];
                let next = orbit_by_rep.len();
                let orbit = *orbit_by_rep.entry(rid).or_insert_with(|| {
                    rep_ids.push(rid);
                    next
                });
                entries.push(OrbitEntry { orbit, perm });
            }
            // number orbits by representative order
            let mut order: Vec<usize> = (0..rep_ids.len()).collect();
            order.sort_by_key(|&o| rep_ids[o]);
            let mut renumber = vec![0; order.len()];
            for (new, &old) in order.iter().enumerate() {
                renumber[old] = new;
            }
            for e in &mut entries {
                e.orbit = renumber[e.orbit];
            }
            let mut sorted_reps = rep_ids.clone();
            sorted_reps.sort_unstable();
            index.push(idx);
            orbit_of.push(entries);
            reps.push(sorted_reps);
        }
        Ok(DeletedProduct { base: base.clone(), r, cells, index, orbit_of, reps })
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Largest `q` with a `q`-cell, `None` when the product is empty.
    pub fn top_dim(&self) -> Option<usize> {
        self.cells.iter().rposition(|c| !c.is_empty())
    }

    pub fn cells(&self, q: usize) -> &[Cell] {
        self.cells.get(q).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn cell_index(&self, cell: &[SimplexId]) -> Option<usize> {
        let q = cell.iter().map(|s| s.0).sum::<usize>();
        self.index.get(q)?.get(cell).copied()
    }

    pub fn orbit_count(&self, q: usize) -> usize {
        self.reps.get(q).map_or(0, Vec::len)
    }

    /// Orbit number and the permutation carrying the representative to the cell.
    pub fn orbit_of(&self, q: usize, cell: usize) -> (usize, &[usize]) {
        let e = &self.orbit_of[q][cell];
        (e.orbit, &e.perm)
    }

    pub fn representative(&self, q: usize, orbit: usize) -> usize {
        self.reps[q][orbit]
    }

    pub fn factor_dims(cell: &[SimplexId]) -> Vec<usize> {
        cell.iter().map(|s| s.0).collect()
    }

    /// Vertex lists of the factors.
    pub fn factors(&self, cell: &[SimplexId]) -> Vec<Vec<usize>> {
        cell.iter().map(|&(q, i)| self.base.simplices(q)[i].clone()).collect()
    }

    /// Weight of `π` at the cell `(q, idx)`.
    pub fn weight(&self, perm: &[usize], q: usize, idx: usize, k: usize) -> i8 {
        koszul_weight(perm, &Self::factor_dims(&self.cells[q][idx]), k)
    }

    /// Leibniz rule: `∂(σ_1×…×σ_r) = Σ_i (-1)^{dim σ_1+…+dim σ_{i-1}} σ_1×…×∂σ_i×…×σ_r`.
    pub fn cell_boundary(&self, q: usize, idx: usize) -> Result<Vec<(usize, i64)>> {
        let cell = self
            .cells(q)
            .get(idx)
            .ok_or_else(|| Error::invalid(format!("no {q}-cell with index {idx}")))?;
        if q == 0 {
            return Err(Error::invalid("0-cells have no boundary"));
        }
        let mut out = Vec::new();
        let mut before = 0;
        for (i, &(dim, sid)) in cell.iter().enumerate() {
            if dim > 0 {
                let block_sign = if before % 2 == 0 { 1 } else { -1 };
                for (j, face) in facets(&self.base.simplices(dim)[sid]).into_iter().enumerate() {
                    let fsign = if j % 2 == 0 { 1 } else { -1 };
                    let fid = self.base.index_of(&face).expect("faces are in the complex");
                    let mut target = cell.clone();
                    target[i] = (dim - 1, fid);
                    let t = self.index[q - 1][&target];
                    out.push((t, block_sign * fsign));
                }
            }
            before += dim;
        }
        Ok(out)
    }

    /// Full coboundary `δ: C^{q-1} → C^q` (rows `q`-cells, columns `(q-1)`-cells).
    pub fn full_coboundary(&self, q: usize) -> Result<SparseIntMatrix> {
        self.check_q(q)?;
        let mut triplets = Vec::new();
        for e in 0..self.cells[q].len() {
            for (f, s) in self.cell_boundary(q, e)? {
                triplets.push((e, f, s));
            }
        }
        Ok(SparseIntMatrix::from_triplets(self.cells[q].len(), self.cells[q - 1].len(), triplets))
    }

    fn check_q(&self, q: usize) -> Result<()> {
        if q == 0 || q >= self.cells.len() {
            return Err(Error::invalid(format!(
                "coboundary degree {q} outside 1..={}",
                self.cells.len().saturating_sub(1)
            )));
        }
        Ok(())
    }

    /// Coboundary on `w`-equivariant cochains, on orbit representatives
    /// (rows `q`-orbits, columns `(q-1)`-orbits).
    pub fn equivariant_coboundary_matrix(&self, q: usize, k: usize) -> Result<SparseIntMatrix> {
        self.check_q(q)?;
        let rows = par::try_map_range(self.reps[q].len(), |row| {
            let e = self.reps[q][row];
            let mut entries = Vec::new();
            for (f_prime, s) in self.cell_boundary(q, e)? {
                let (orbit, perm) = self.orbit_of(q - 1, f_prime);
                let f = self.reps[q - 1][orbit];
                entries.push((row, orbit, s * self.weight(perm, q - 1, f, k) as i64));
            }
            Ok::<_, Error>(entries)
        })?;
        Ok(SparseIntMatrix::from_triplets(
            self.reps[q].len(),
            self.reps[q - 1].len(),
            rows.into_iter().flatten(),
        ))
    }

    /// Extends an orbit cochain to all `q`-cells by `φ(π·f) = w(π, f) φ(f)`.
    pub fn unfold(&self, q: usize, k: usize, folded: &[i64]) -> Result<Vec<i64>> {
        if folded.len() != self.orbit_count(q) {
            return Err(Error::dims(format!(
                "{} values for {} orbits in degree {q}",
                folded.len(),
                self.orbit_count(q)
            )));
        }
        Ok((0..self.cells(q).len())
            .map(|c| {
                let (orbit, perm) = self.orbit_of(q, c);
                let rep = self.reps[q][orbit];
                folded[orbit] * self.weight(perm, q, rep, k) as i64
            })
            .collect())
    }

    /// Text dump, one `dim: (σ1|σ2|…) orbit-rep π w` line per cell.
    pub fn debug_dump(&self, k: usize) -> String {
        let mut s = String::new();
        for (q, list) in self.cells.iter().enumerate() {
            for (c, cell) in list.iter().enumerate() {
                let factors: Vec<String> = self
                    .factors(cell)
                    .iter()
                    .map(|f| f.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                let (orbit, perm) = self.orbit_of(q, c);
                let rep = self.reps[q][orbit];
                let w = self.weight(perm, q, rep, k);
                let _ = writeln!(s, "{q}: ({}) {rep} {perm:?} {w:+}", factors.join("|"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplicial::{simplex_boundary, skeleton};

    #[test]
    fn edge_r2() {
        let k = SimplicialComplex::from_maximal(2, &[vec![0, 1]]).unwrap();
        let x = DeletedProduct::new(&k, 2).unwrap();
        assert_eq!(x.cells(0).len(), 2);
        assert_eq!(x.orbit_count(0), 1);
        assert_eq!(x.top_dim(), Some(0));
    }

    #[test]
    fn triangle_boundary_r2_is_a_circle() {
        let k = simplex_boundary(2).unwrap();
        let x = DeletedProduct::new(&k, 2).unwrap();
        assert_eq!((x.cells(0).len(), x.cells(1).len()), (6, 6));
        assert_eq!(x.top_dim(), Some(1));
        assert_eq!(x.cells(0).len() as i64 - x.cells(1).len() as i64, 0);
    }

    #[test]
    fn skeleton_counts() {
        let x = DeletedProduct::new(&skeleton(2, 6).unwrap(), 2).unwrap();
        assert_eq!(x.cells(4).len(), 140);
        assert_eq!(x.orbit_count(4), 70);
        assert_eq!(x.cells(3).len(), 420);
        assert_eq!(x.orbit_count(3), 210);
        let m = x.equivariant_coboundary_matrix(4, 2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (70, 210));
    }

    #[test]
    fn weights() {
        assert_eq!(koszul_weight(&[0, 1], &[2, 2], 2), 1);
        assert_eq!(koszul_weight(&[1, 0], &[2, 2], 2), 1);
        assert_eq!(koszul_weight(&[1, 0], &[1, 1], 1), -1);
        assert_eq!(koszul_weight(&[1, 0], &[2, 1], 2), 1);
        assert_eq!(koszul_weight(&[0, 1, 2], &[1, 2, 0], 3), 1);
    }

    #[test]
    fn block_signs() {
        // (edge [0,1]) × (edge [2,3]) × (vertex 4): second block carries (-1)^1
        let k = SimplicialComplex::from_maximal(5, &[vec![0, 1], vec![2, 3], vec![4]]).unwrap();
        let x = DeletedProduct::new(&k, 3).unwrap();
        let e01 = (1, k.index_of(&[0, 1]).unwrap());
        let e23 = (1, k.index_of(&[2, 3]).unwrap());
        let v = |i: usize| (0, k.index_of(&[i]).unwrap());
        let cell = vec![e01, e23, v(4)];
        let idx = x.cell_index(&cell).unwrap();
        let mut got: Vec<(Cell, i64)> =
            x.cell_boundary(2, idx).unwrap().into_iter().map(|(c, s)| (x.cells(1)[c].clone(), s)).collect();
        got.sort();
        let mut want = vec![
            (vec![v(1), e23, v(4)], 1),
            (vec![v(0), e23, v(4)], -1),
            (vec![e01, v(3), v(4)], -1),
            (vec![e01, v(2), v(4)], 1),
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn permutation_helpers() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[1, 2, 0]), 1);
        let p = vec![2, 0, 1];
        assert_eq!(compose(&p, &inverse(&p)), vec![0, 1, 2]);
        assert_eq!(act(&[1, 0], &['a', 'b']), vec!['b', 'a']);
    }
}
