//! Name-keyed collections of interchangeable strategies.

use crate::error::{LabError, Result};

pub trait Named {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
}

pub struct Registry<T: ?Sized> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn empty() -> Self {
        Registry { entries: Vec::new() }
    }

    /// Adds `item`, replacing any entry of the same name.
    pub fn register(mut self, item: Box<T>) -> Self {
        self.entries.retain(|e| e.name() != item.name());
        self.entries.push(item);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| LabError::UnknownStrategy {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }
}
