use std::fmt;

/// Outcome of a structure check.
///
/// `Indeterminate` covers both "could not be decided exactly" (sampled
/// evidence only) and "not applicable to this input"; the reason says which.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
    Indeterminate(String),
}

/// Where a check failed and the offending value, rendered canonically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub location: String,
    pub value: String,
}

impl Verdict {
    pub fn fail(location: impl Into<String>, value: impl fmt::Display) -> Self {
        Verdict::Fail(Witness {
            location: location.into(),
            value: value.to_string(),
        })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fail(w) => Some(w),
            _ => None,
        }
    }

    /// First failure wins, then indeterminacy, else pass.
    pub fn all<I: IntoIterator<Item = Verdict>>(verdicts: I) -> Verdict {
        let mut indeterminate = None;
        for v in verdicts {
            match v {
                Verdict::Fail(_) => return v,
                Verdict::Indeterminate(_) if indeterminate.is_none() => indeterminate = Some(v),
                _ => {}
            }
        }
        indeterminate.unwrap_or(Verdict::Pass)
    }

    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail(_) => "fail",
            Verdict::Indeterminate(_) => "indeterminate",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail(w) => write!(f, "fail at {w}"),
            Verdict::Indeterminate(r) => write!(f, "indeterminate: {r}"),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.value)
    }
}
