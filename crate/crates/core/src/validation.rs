use alloc::string::String;
use core::fmt;

/// One violated configuration constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Dotted config key, e.g. `model.h`.
    pub field: String,
    pub constraint: String,
    pub value: f64,
}

impl Violation {
    pub fn new(field: impl Into<String>, constraint: impl Into<String>, value: f64) -> Self {
        Self {
            field: field.into(),
            constraint: constraint.into(),
            value,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} (got {})", self.field, self.constraint, self.value)
    }
}
