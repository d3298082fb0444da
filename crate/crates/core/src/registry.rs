//! Named registries of interchangeable strategies.

use std::sync::Arc;

use crate::cg_engine::{ClosedForm, LitherlandGeneral, SatelliteFormula};
use crate::error::{Error, Result};
use crate::gilmer::{BruteForce, Constructive, WitnessStrategy};

/// An ordered name -> implementation table. Lookup is by exact name.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(&'static str, Arc<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, item: Arc<T>) -> &mut Self {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, item));
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, item)| Arc::clone(item))
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }
}

pub fn satellite_formulas() -> Registry<dyn SatelliteFormula> {
    let mut r = Registry::<dyn SatelliteFormula>::new("satellite formula");
    r.register("closed-form", Arc::new(ClosedForm))
        .register("litherland-general", Arc::new(LitherlandGeneral));
    r
}

pub fn witness_strategies() -> Registry<dyn WitnessStrategy> {
    let mut r = Registry::<dyn WitnessStrategy>::new("witness strategy");
    r.register("constructive", Arc::new(Constructive))
        .register("brute-force", Arc::new(BruteForce));
    r
}
