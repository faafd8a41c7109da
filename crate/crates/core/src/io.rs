//! JSON file formats.
//!
//! ```text
//! chain:      {"states": ["a", "b", ...], "rates": [[x, y, r_xy], ...]}
//! density:    [p0, p1, ...]
//! edge field: {"edges": [[x, y, u_xy], ...]}
//! grid model: {"n_cells": n, "drift": [...], "diffusion": [...]}
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, Density};
use crate::error::{Error, Result};
use crate::fokker_planck::GridModel;
use crate::force_flux::{EdgeField, EdgeSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub states: Vec<String>,
    pub rates: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFieldFile {
    pub edges: Vec<(usize, usize, f64)>,
}

fn parse<'a, D: Deserialize<'a>>(s: &'a str) -> Result<D> {
    serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
}

impl ChainFile {
    pub fn into_spec<T: Scalar>(self) -> Result<ChainSpec<T>> {
        let n = self.states.len();
        ChainSpec::new(n, self.rates.into_iter().map(|(x, y, r)| (x, y, T::lit(r))))?
            .with_labels(self.states)
    }

    pub fn from_spec<T: Scalar>(spec: &ChainSpec<T>) -> Self {
        let states = match spec.labels() {
            Some(l) => l.to_vec(),
            None => (0..spec.n_states()).map(|i| i.to_string()).collect(),
        };
        let rates = spec
            .triples()
            .into_iter()
            .map(|(x, y, r)| (x, y, r.to_f64_lossy()))
            .collect();
        Self { states, rates }
    }
}

pub fn chain_from_json<T: Scalar>(s: &str) -> Result<ChainSpec<T>> {
    parse::<ChainFile>(s)?.into_spec()
}

pub fn chain_to_json<T: Scalar>(spec: &ChainSpec<T>) -> String {
    serde_json::to_string(&ChainFile::from_spec(spec)).expect("plain data serialises")
}

pub fn density_from_json<T: Scalar>(s: &str) -> Result<Density<T>> {
    let v: Vec<f64> = parse(s)?;
    Density::new(v.into_iter().map(T::lit).collect())
}

/// Read an edge field and align it with a known edge set.
pub fn edge_field_from_json<T: Scalar>(s: &str, edges: &Arc<EdgeSet>) -> Result<EdgeField<T>> {
    let f: EdgeFieldFile = parse(s)?;
    EdgeField::from_triples(
        Arc::clone(edges),
        f.edges.into_iter().map(|(x, y, v)| (x, y, T::lit(v))),
    )
}

pub fn edge_field_file<T: Scalar>(field: &EdgeField<T>) -> EdgeFieldFile {
    EdgeFieldFile {
        edges: field
            .triples()
            .into_iter()
            .map(|(x, y, v)| (x, y, v.to_f64_lossy()))
            .collect(),
    }
}

pub fn grid_model_from_json(s: &str) -> Result<GridModel<f64>> {
    let m: GridModel<f64> = parse(s)?;
    m.check()?;
    Ok(m)
}
