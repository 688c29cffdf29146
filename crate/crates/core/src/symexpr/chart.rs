use std::fmt;
use std::sync::Arc;

use super::ExprError;

/// Ordered, uniquely named coordinates of a single chart.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    names: Vec<Arc<str>>,
}

const RESERVED: [&str; 3] = ["exp", "sinh", "cosh"];

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, ExprError> {
        if names.is_empty() {
            return Err(ExprError::InvalidChart("a chart needs at least one coordinate".into()));
        }
        let mut out: Vec<Arc<str>> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let valid = n
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || RESERVED.contains(&n) {
                return Err(ExprError::InvalidChart(format!("invalid coordinate name `{n}`")));
            }
            if out.iter().any(|m| &**m == n) {
                return Err(ExprError::InvalidChart(format!("duplicate coordinate `{n}`")));
            }
            out.push(Arc::from(n));
        }
        Ok(Chart { names: out })
    }

    /// `x1 .. xn`.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Chart::new(&names).expect("numbered names are valid")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| &**s)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    /// Concatenation of two charts with disjoint names.
    pub fn product(&self, other: &Chart) -> Result<Chart, ExprError> {
        let names: Vec<&str> = self.names().chain(other.names()).collect();
        Chart::new(&names)
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({})", self.names.join(" "))
    }
}
