//! Labelled type decompositions of forms into irreducible summands.

use serde::{Deserialize, Serialize};

use crate::exterior::Form;

/// One irreducible summand of a form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    /// Label of the summand, the dimension of the representation (e.g. `"8"`).
    pub label: String,
    /// Dimension of the summand.
    pub rank: usize,
    pub form: Form,
}

/// A form split into mutually orthogonal summands that add back to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub degree: usize,
    pub parts: Vec<Component>,
}

impl Components {
    /// The summand with the given label.
    ///
    /// # Panics
    /// If no summand carries that label.
    pub fn get(&self, label: &str) -> &Form {
        &self
            .parts
            .iter()
            .find(|c| c.label == label)
            .unwrap_or_else(|| panic!("no component labelled {label}"))
            .form
    }

    pub fn sum(&self) -> Form {
        let mut it = self.parts.iter();
        let mut acc = it.next().expect("at least one component").form.clone();
        for c in it {
            acc += &c.form;
        }
        acc
    }
}
