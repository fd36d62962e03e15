//! JSON documents for complexes, maps and ornaments. Rationals are written
//! as `"a/b"` strings in lowest terms with `b > 0`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{format_rational, parse_rational, RationalVector};
use crate::linking::{Cycle, Ornament, OrnamentComponent};
use crate::plmap::PLMap;
use crate::simplicial::SimplicialComplex;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    #[serde(default)]
    pub name: String,
    pub vertex_count: usize,
    pub maximal_simplices: Vec<Vec<usize>>,
    #[serde(default)]
    pub marked: BTreeMap<String, Vec<Vec<usize>>>,
}

impl ComplexDoc {
    pub fn from_complex(k: &SimplicialComplex) -> Self {
        ComplexDoc {
            name: k.name().unwrap_or_default().to_string(),
            vertex_count: k.vertex_count(),
            maximal_simplices: k.maximal_simplices(),
            marked: k.marked_map().clone(),
        }
    }

    pub fn to_complex(&self) -> Result<SimplicialComplex> {
        let mut k = SimplicialComplex::from_maximal(self.vertex_count, &self.maximal_simplices)?;
        if !self.name.is_empty() {
            k = k.with_name(self.name.clone());
        }
        for (label, list) in &self.marked {
            k.mark(label.clone(), list.clone())?;
        }
        Ok(k)
    }
}

/// A complex given inline or as a path relative to the referring document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRef {
    Inline(ComplexDoc),
    File(String),
}

impl ComplexRef {
    fn resolve(&self, base: Option<&Path>) -> Result<SimplicialComplex> {
        match self {
            ComplexRef::Inline(doc) => doc.to_complex(),
            ComplexRef::File(p) => {
                let path = base.map_or_else(|| PathBuf::from(p), |b| b.join(p));
                read_complex(&path)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub complex: ComplexRef,
    pub d: usize,
    pub coords: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    pub complex: ComplexRef,
    pub coords: Vec<Vec<String>>,
    pub orientation: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrnamentDoc {
    pub d: usize,
    pub components: Vec<ComponentDoc>,
}

pub fn format_coords(coords: &[RationalVector]) -> Vec<Vec<String>> {
    coords.iter().map(|p| p.iter().map(format_rational).collect()).collect()
}

pub fn parse_coords(coords: &[Vec<String>]) -> Result<Vec<RationalVector>> {
    coords.iter().map(|p| p.iter().map(|s| parse_rational(s)).collect()).collect()
}

impl MapDoc {
    pub fn from_map(f: &PLMap) -> Self {
        MapDoc {
            complex: ComplexRef::Inline(ComplexDoc::from_complex(f.complex())),
            d: f.ambient_dim(),
            coords: format_coords(f.coords()),
        }
    }

    pub fn to_map(&self, base: Option<&Path>) -> Result<PLMap> {
        PLMap::new(self.complex.resolve(base)?, self.d, parse_coords(&self.coords)?)
    }
}

impl OrnamentDoc {
    pub fn from_ornament(orn: &Ornament) -> Self {
        OrnamentDoc {
            d: orn.ambient_dim(),
            components: orn
                .components()
                .iter()
                .map(|c| ComponentDoc {
                    complex: ComplexRef::Inline(ComplexDoc::from_complex(c.cycle.complex())),
                    coords: format_coords(c.cycle.coords()),
                    orientation: c.orientation,
                })
                .collect(),
        }
    }

    pub fn to_ornament(&self, base: Option<&Path>) -> Result<Ornament> {
        let components = self
            .components
            .iter()
            .map(|c| {
                let cycle = Cycle::new(c.complex.resolve(base)?, parse_coords(&c.coords)?)?;
                OrnamentComponent::new(cycle, c.orientation)
            })
            .collect::<Result<Vec<_>>>()?;
        Ornament::new(self.d, components)
    }
}

pub fn complex_to_json(k: &SimplicialComplex) -> String {
    to_json(&ComplexDoc::from_complex(k))
}

pub fn complex_from_json(text: &str) -> Result<SimplicialComplex> {
    serde_json::from_str::<ComplexDoc>(text)?.to_complex()
}

pub fn ornament_to_json(orn: &Ornament) -> String {
    to_json(&OrnamentDoc::from_ornament(orn))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents always serialize");
    s.push('\n');
    s
}

fn read_doc<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn read_complex(path: &Path) -> Result<SimplicialComplex> {
    read_doc::<ComplexDoc>(path)?.to_complex()
}

pub fn read_map(path: &Path) -> Result<PLMap> {
    read_doc::<MapDoc>(path)?.to_map(path.parent())
}

pub fn read_ornament(path: &Path) -> Result<Ornament> {
    read_doc::<OrnamentDoc>(path)?.to_ornament(path.parent())
}
