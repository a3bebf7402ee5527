use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Coordinate names of the model space, optionally followed by formal
/// parameters (such as a pencil parameter) that polynomials may contain but
/// that no differential operator ever touches.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarSpace {
    names: Vec<String>,
    params: usize,
}

impl VarSpace {
    /// Space with the given coordinate names and no parameters.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>> {
        Self::with_params(names, &[] as &[&str])
    }

    /// Space with spatial coordinates `names` followed by formal parameters.
    pub fn with_params<S: AsRef<str>, T: AsRef<str>>(
        names: &[S],
        params: &[T],
    ) -> Result<Arc<Self>> {
        if names.is_empty() {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        let all: Vec<String> = names
            .iter()
            .map(|s| s.as_ref().to_string())
            .chain(params.iter().map(|s| s.as_ref().to_string()))
            .collect();
        let mut seen = HashSet::new();
        for name in &all {
            if !is_identifier(name) {
                return Err(Error::InvalidSpace(format!(
                    "`{name}` is not an identifier"
                )));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate variable `{name}`")));
            }
        }
        Ok(Arc::new(VarSpace {
            names: all,
            params: params.len(),
        }))
    }

    /// `x1, ..., xn`.
    pub fn standard(n: usize) -> Arc<Self> {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        Self::new(&names).expect("standard names are valid")
    }

    /// Spatial dimension `n` (parameters excluded).
    pub fn dim(&self) -> usize {
        self.names.len() - self.params
    }

    /// Number of polynomial variables, parameters included.
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn num_params(&self) -> usize {
        self.params
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn spatial_names(&self) -> &[String] {
        &self.names[..self.dim()]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Same spatial coordinates with extra trailing parameters appended.
    pub fn adjoin_params<T: AsRef<str>>(&self, extra: &[T]) -> Result<Arc<Self>> {
        let mut params: Vec<String> = self.names[self.dim()..].to_vec();
        params.extend(extra.iter().map(|s| s.as_ref().to_string()));
        Self::with_params(self.spatial_names(), &params)
    }
}

impl fmt::Display for VarSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.spatial_names().join(", "))?;
        if self.params > 0 {
            write!(f, " params [{}]", self.names[self.dim()..].join(", "))?;
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn same_space(a: &Arc<VarSpace>, b: &Arc<VarSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn check_same(a: &Arc<VarSpace>, b: &Arc<VarSpace>) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!("{a} vs {b}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(VarSpace::new(&["x1", "x1"]).is_err());
        assert!(VarSpace::new(&["1x"]).is_err());
        assert!(VarSpace::new::<&str>(&[]).is_err());
        assert!(VarSpace::with_params(&["x"], &["x"]).is_err());
    }

    #[test]
    fn params_are_not_spatial() {
        let s = VarSpace::with_params(&["q", "p"], &["lambda"]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.nvars(), 3);
        assert_eq!(s.index_of("lambda"), Some(2));
        let t = s.adjoin_params(&["mu"]).unwrap();
        assert_eq!(t.nvars(), 4);
        assert_eq!(t.num_params(), 2);
    }
}
