//! The intersection cocycle on the deleted product and the decision whether
//! its equivariant class vanishes, over ℤ or ℤ/2.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::deleted::{DeletedProduct, DeletedProductOptions, RepresentativeOrder};
use crate::error::{Error, Result};
use crate::lattice::{
    solve_integer_system_with, solve_mod2_system, IntegerSolution, Mod2Matrix, SolveOptions,
    UnsolvableCertificate,
};
use crate::par;
use crate::plmap::{random_generic_map_with, PLMap, DEFAULT_RETRIES};
use crate::simplicial::SimplicialComplex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "Z2")]
    Mod2,
}

impl std::str::FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" => Ok(Ring::Integers),
            "z2" => Ok(Ring::Mod2),
            _ => Err(Error::invalid(format!("unknown ring {s:?} (expected z or z2)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ObstructionOptions {
    pub max_cells: usize,
    /// Cap on `rows × columns` of the folded system.
    pub max_matrix_entries: usize,
    pub dense_column_limit: usize,
    pub include_witness: bool,
    pub order: RepresentativeOrder,
    pub retries: usize,
}

impl Default for ObstructionOptions {
    fn default() -> Self {
        ObstructionOptions {
            max_cells: 1_000_000,
            max_matrix_entries: 5000 * 5000,
            dense_column_limit: 2000,
            include_witness: false,
            order: RepresentativeOrder::LexMin,
            retries: DEFAULT_RETRIES,
        }
    }
}

/// Divisibility certificate, integers written in decimal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub index: usize,
    pub divisor: String,
    pub residue: String,
}

impl From<&UnsolvableCertificate> for CertificateRecord {
    fn from(c: &UnsolvableCertificate) -> Self {
        CertificateRecord { index: c.index, divisor: c.divisor.to_string(), residue: c.residue.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub k: usize,
    pub r: usize,
    pub d: usize,
    pub ring: Ring,
    pub class_trivial: bool,
    pub cocycle_support: usize,
    pub verdict: String,
    pub seed: u64,
    pub witness_included: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<serde_json::Value>>,
    /// No top cells: the cocycle is empty.
    pub degenerate: bool,
    pub cocycle_valid: bool,
    pub top_orbits: usize,
    pub facet_orbits: usize,
    pub map_attempts: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub unsolvable_certificate: Option<CertificateRecord>,
    pub notes: Vec<String>,
}

pub fn is_prime_power(r: u64) -> Result<bool> {
    if r < 2 {
        return Err(Error::invalid("prime-power test needs r >= 2"));
    }
    let mut n = r;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return Ok(n == 1);
        }
        p += 1;
    }
    Ok(true)
}

/// Degree of the top cells for `(k, r)`.
fn top_degree(k: usize, r: usize) -> usize {
    k * r * (r - 1)
}

fn check_shape(complex: &SimplicialComplex, k: usize, r: usize) -> Result<()> {
    if k < 1 || r < 2 {
        return Err(Error::invalid(format!("need k >= 1 and r >= 2, got k = {k}, r = {r}")));
    }
    if let Some(n) = complex.dim() {
        if n > k * (r - 1) {
            return Err(Error::dims(format!("dim K = {n} exceeds k(r-1) = {}", k * (r - 1))));
        }
    }
    Ok(())
}

/// `c(e) = f σ_1 · … · f σ_r` on every top orbit representative `e`.
pub fn intersection_cocycle(f: &PLMap, x: &DeletedProduct, k: usize) -> Result<Vec<i64>> {
    let r = x.r();
    if f.ambient_dim() != k * r {
        return Err(Error::dims(format!("map into ℝ^{} but k r = {}", f.ambient_dim(), k * r)));
    }
    let q = top_degree(k, r);
    let mut c = vec![0i64; x.orbit_count(q)];
    if c.is_empty() {
        return Ok(c);
    }
    let n = k * (r - 1);
    for point in f.global_r_fold_points(r)? {
        let cell: Vec<(usize, usize)> =
            point.tuple.iter().map(|s| (n, f.complex().index_of(s).expect("simplex of K"))).collect();
        let idx = x.cell_index(&cell).expect("disjoint tuple is a cell");
        let (orbit, perm) = x.orbit_of(q, idx);
        let rep = x.representative(q, orbit);
        // c(π·rep) = w(π, rep) c(rep) and w = ±1
        c[orbit] += point.sign as i64 * x.weight(perm, q, rep, k) as i64;
    }
    Ok(c)
}

/// Equivariance check: the direct intersection number of every top cell
/// equals the unfolded orbit value.
pub fn cocycle_is_equivariant(f: &PLMap, x: &DeletedProduct, k: usize, c: &[i64]) -> Result<bool> {
    let q = top_degree(k, x.r());
    let full = x.unfold(q, k, c)?;
    let cells = x.cells(q);
    let ok = par::try_map_range(cells.len(), |i| {
        let tuple = x.factors(&cells[i]);
        Ok::<_, Error>(f.intersection_number(&tuple)? == full[i])
    })?;
    Ok(ok.into_iter().all(|b| b))
}

fn solve_folded(
    x: &DeletedProduct,
    k: usize,
    rhs: &[i64],
    ring: Ring,
    opts: &ObstructionOptions,
) -> Result<(bool, Option<Vec<BigInt>>, Option<UnsolvableCertificate>)> {
    let q = top_degree(k, x.r());
    let rows = x.orbit_count(q);
    let cols = x.orbit_count(q - 1);
    if rows.saturating_mul(cols) > opts.max_matrix_entries {
        return Err(Error::Budget(format!(
            "folded system is {rows}×{cols}, above the cap of {} entries",
            opts.max_matrix_entries
        )));
    }
    let a = x.equivariant_coboundary_matrix(q, k)?;
    match ring {
        Ring::Integers => {
            let b: Vec<BigInt> = rhs.iter().map(|&v| BigInt::from(v)).collect();
            let so = SolveOptions { dense_column_limit: opts.dense_column_limit };
            match solve_integer_system_with(&a, &b, so)? {
                IntegerSolution::Solved(phi) => Ok((true, Some(phi), None)),
                IntegerSolution::Unsolvable(cert) => Ok((false, None, Some(cert))),
            }
        }
        Ring::Mod2 => {
            let m = Mod2Matrix::from_sparse(&a);
            let b: Vec<bool> = rhs.iter().map(|v| v % 2 != 0).collect();
            match solve_mod2_system(&m, &b)? {
                Some(phi) => Ok((true, Some(phi.into_iter().map(|v| BigInt::from(v as u8)).collect()), None)),
                None => Ok((false, None, None)),
            }
        }
    }
}

pub fn verdict(k: usize, r: usize, ring: Ring, class_trivial: bool) -> String {
    let d = k * r;
    if !class_trivial {
        return format!("not Z-almost {r}-embeddable in R^{d}; hence not almost {r}-embeddable in R^{d}");
    }
    match ring {
        Ring::Mod2 => format!("obstruction vanishes mod 2; Z-almost {r}-embeddability in R^{d} undecided"),
        Ring::Integers if k >= 2 && k + r >= 5 => format!("almost {r}-embeddable in R^{d}"),
        Ring::Integers if k == 2 && r == 2 => {
            "Z-almost 2-embeddable in R^4; almost-2-embeddability inconclusive".to_string()
        }
        Ring::Integers => format!("Z-almost {r}-embeddable in R^{d}; almost-{r}-embeddability unknown"),
    }
}

fn witness_json(phi: &[BigInt]) -> Vec<serde_json::Value> {
    phi.iter()
        .map(|v| match v.to_i64() {
            Some(i) => serde_json::Value::from(i),
            None => serde_json::Value::from(v.to_string()),
        })
        .collect()
}

pub fn obstruction_trivial(
    complex: &SimplicialComplex,
    k: usize,
    r: usize,
    ring: Ring,
    seed: u64,
) -> Result<ObstructionReport> {
    obstruction_trivial_with(complex, k, r, ring, seed, &ObstructionOptions::default())
}

pub fn obstruction_trivial_with(
    complex: &SimplicialComplex,
    k: usize,
    r: usize,
    ring: Ring,
    seed: u64,
    opts: &ObstructionOptions,
) -> Result<ObstructionReport> {
    check_shape(complex, k, r)?;
    let d = k * r;
    let q = top_degree(k, r);
    let mut notes = Vec::new();
    if !is_prime_power(r as u64)? {
        notes.push(format!("r = {r} is not a prime power: the obstruction is predicted to vanish"));
    }
    let x = DeletedProduct::with_options(
        complex,
        r,
        &DeletedProductOptions { order: opts.order, max_cells: opts.max_cells },
    )?;
    let mut report = ObstructionReport {
        k,
        r,
        d,
        ring,
        class_trivial: true,
        cocycle_support: 0,
        verdict: String::new(),
        seed,
        witness_included: false,
        witness: None,
        degenerate: false,
        cocycle_valid: true,
        top_orbits: x.orbit_count(q),
        facet_orbits: if q > 0 { x.orbit_count(q - 1) } else { 0 },
        map_attempts: 0,
        unsolvable_certificate: None,
        notes,
    };
    if x.orbit_count(q) == 0 {
        report.degenerate = true;
        report.notes.push("the deleted product has no top cells; the cocycle is empty".to_string());
        report.verdict = verdict(k, r, ring, true);
        return Ok(report);
    }
    let f = random_generic_map_with(complex, d, r, seed, opts.retries)?;
    report.map_attempts = f.certificate().map_or(0, |c| c.attempts);
    let c = intersection_cocycle(&f, &x, k)?;
    report.cocycle_support = c.iter().filter(|v| **v != 0).count();
    report.cocycle_valid = cocycle_is_equivariant(&f, &x, k, &c)?;
    if !report.cocycle_valid {
        return Err(Error::generic("intersection cocycle failed the equivariance check"));
    }
    let (solvable, phi, cert) = solve_folded(&x, k, &c, ring, opts)?;
    report.class_trivial = solvable;
    report.unsolvable_certificate = cert.as_ref().map(CertificateRecord::from);
    if opts.include_witness {
        if let Some(phi) = &phi {
            report.witness = Some(witness_json(phi));
            report.witness_included = true;
        }
    }
    if !solvable && report.notes.iter().any(|n| n.contains("not a prime power")) {
        report.notes.push("nonzero obstruction for a non-prime-power r contradicts the prediction".to_string());
    }
    report.verdict = verdict(k, r, ring, solvable);
    Ok(report)
}

/// The verdict over ℤ.
pub fn decide_embeddability(complex: &SimplicialComplex, k: usize, r: usize, seed: u64) -> Result<ObstructionReport> {
    if complex.dim().is_some_and(|n| n != k * (r - 1)) {
        return Err(Error::dims(format!("dim K must equal k(r-1) = {}", k * (r - 1))));
    }
    obstruction_trivial(complex, k, r, Ring::Integers, seed)
}

/// Whether the cocycles of two independently generated maps differ by a
/// folded coboundary over ℤ.
pub fn independence_of_map(complex: &SimplicialComplex, k: usize, r: usize, seeds: (u64, u64)) -> Result<bool> {
    check_shape(complex, k, r)?;
    let opts = ObstructionOptions::default();
    let x = DeletedProduct::new(complex, r)?;
    let q = top_degree(k, r);
    if x.orbit_count(q) == 0 {
        return Ok(true);
    }
    let f1 = random_generic_map_with(complex, k * r, r, seeds.0, opts.retries)?;
    let f2 = random_generic_map_with(complex, k * r, r, seeds.1, opts.retries)?;
    let c1 = intersection_cocycle(&f1, &x, k)?;
    let c2 = intersection_cocycle(&f2, &x, k)?;
    let diff: Vec<i64> = c1.iter().zip(&c2).map(|(a, b)| a - b).collect();
    if diff.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    Ok(solve_folded(&x, k, &diff, Ring::Integers, &opts)?.0)
}
