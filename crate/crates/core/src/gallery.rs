//! Named complexes and ornaments.

use crate::error::{Error, Result};
use crate::io::{complex_to_json, ornament_to_json};
use crate::linking::{cnld1_ornament, product_ornament, split_ornament, Ornament};
use crate::simplicial::{fkt_complex, skeleton, torus_grid, two_disjoint_triangles, SimplicialComplex};

/// Name patterns accepted by [`lookup`].
pub const NAMES: &[&str] = &[
    "skeleton-<n>-<N>",
    "simplex-<n>",
    "fkt",
    "torus-<a>-<b>",
    "two-triangles",
    "product-ornament-<k>-<r>",
    "split-ornament-<k>-<r>",
    "cnld1",
];

#[derive(Clone, Debug)]
pub enum GalleryItem {
    Complex(SimplicialComplex),
    Ornament(Ornament),
}

impl GalleryItem {
    pub fn to_json(&self) -> String {
        match self {
            GalleryItem::Complex(k) => complex_to_json(k),
            GalleryItem::Ornament(o) => ornament_to_json(o),
        }
    }
}

fn numbers<const N: usize>(name: &str, rest: &str) -> Result<[usize; N]> {
    let parts: Vec<&str> = rest.split('-').collect();
    let parsed: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
    parsed
        .and_then(|v| v.try_into().ok())
        .ok_or_else(|| Error::invalid(format!("malformed gallery name {name:?}")))
}

pub fn lookup(name: &str) -> Result<GalleryItem> {
    use GalleryItem::{Complex, Ornament};
    if let Some(rest) = name.strip_prefix("product-ornament-") {
        let [k, r] = numbers(name, rest)?;
        return Ok(Ornament(product_ornament(k, r)?));
    }
    if let Some(rest) = name.strip_prefix("split-ornament-") {
        let [k, r] = numbers(name, rest)?;
        return Ok(Ornament(split_ornament(k, r)?));
    }
    if let Some(rest) = name.strip_prefix("skeleton-") {
        let [n, big_n] = numbers(name, rest)?;
        return Ok(Complex(skeleton(n, big_n)?));
    }
    if let Some(rest) = name.strip_prefix("simplex-") {
        let [n] = numbers(name, rest)?;
        return Ok(Complex(skeleton(n, n)?.with_name(name)));
    }
    if let Some(rest) = name.strip_prefix("torus-") {
        let [a, b] = numbers(name, rest)?;
        return Ok(Complex(torus_grid(a, b)?));
    }
    match name {
        "fkt" => Ok(Complex(fkt_complex())),
        "two-triangles" => Ok(Complex(two_disjoint_triangles())),
        "cnld1" => Ok(Ornament(cnld1_ornament()?.0)),
        _ => Err(Error::invalid(format!("unknown gallery name {name:?}; known: {}", NAMES.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names() {
        let GalleryItem::Complex(k) = lookup("skeleton-2-6").unwrap() else { panic!() };
        assert_eq!(k.count(2), 35);
        let GalleryItem::Complex(k) = lookup("fkt").unwrap() else { panic!() };
        assert_eq!(k.count(2), 86);
        let GalleryItem::Complex(k) = lookup("torus-3-3").unwrap() else { panic!() };
        assert_eq!(k.euler_characteristic(), 0);
        let GalleryItem::Complex(k) = lookup("simplex-2").unwrap() else { panic!() };
        assert_eq!(k.count(2), 1);
        let GalleryItem::Ornament(o) = lookup("product-ornament-2-3").unwrap() else { panic!() };
        assert_eq!(o.r(), 3);
        assert!(lookup("nonsense").is_err());
        assert!(lookup("skeleton-2").is_err());
        assert!(lookup("torus-2-3").is_err());
    }
}
