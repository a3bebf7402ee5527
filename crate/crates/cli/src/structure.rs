//! Structure files: TOML or JSON trees, canonicalized and hashed.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use partpoisson::liepoisson::lp_anchor_on;
use partpoisson::polycore::{fmt_rational, parse_rational};
use partpoisson::{
    parse_polynomial, Bivector, CoflatBasis, LieAlgebraSpec, OneOneTensor, PartialAnchor,
    Polynomial, Rational, TwoForm, VarSpace, VecField,
};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A polynomial or rational literal. Integers are accepted unquoted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Text(pub String);

impl<'de> Deserialize<'de> for Text {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Text;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a string or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Text, E> {
                Ok(Text(v.to_string()))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Text, E> {
                Ok(Text(v.to_string()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Text, E> {
                Ok(Text(v.to_string()))
            }
        }
        d.deserialize_any(V)
    }
}

impl From<&str> for Text {
    fn from(s: &str) -> Self {
        Text(s.to_string())
    }
}

pub type TextMatrix = Vec<Vec<Text>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorSection {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    /// Rows are the covectors spanning E♭; absent means the full dual.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coflat: Option<TextMatrix>,
    /// Row `a` is `P(theta_a)`.
    pub images: TextMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSection {
    pub matrix: TextMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieAlgebraSection {
    pub dimension: usize,
    /// `[i, j, k, c]`, 1-based: `[e_i, e_j] = ... + c e_k`.
    pub constants: Vec<(usize, usize, usize, Text)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub m0: Vec<Text>,
    #[serde(default = "auto_killing")]
    pub casimir: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

fn auto_killing() -> String {
    "auto-killing".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictSection {
    #[serde(rename = "A")]
    pub a: TextMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<Text>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectSection {
    #[serde(rename = "B")]
    pub b: TextMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct KdvSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<AnchorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_anchor: Option<AnchorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nijenhuis: Option<MatrixSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<MatrixSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie_algebra: Option<LieAlgebraSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restrict: Option<RestrictSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project: Option<ProjectSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kdv: Option<KdvSection>,
}

fn parse_err(e: impl fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}

fn at(path: &str, e: impl fmt::Display) -> CliError {
    CliError::Parse(format!("{path}: {e}"))
}

/// Read and canonicalize a structure file. `.json` files (or content starting
/// with `{`) are JSON, everything else TOML.
pub fn parse_structure(path: &Path) -> Result<StructureFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    parse_structure_str(&text, json)
}

pub fn parse_structure_str(text: &str, json: bool) -> Result<StructureFile, CliError> {
    let raw: StructureFile = if json {
        serde_json::from_str(text).map_err(parse_err)?
    } else {
        toml::from_str(text).map_err(parse_err)?
    };
    raw.canonical()
}

fn canon_rationals(row: &[Text], path: &str) -> Result<Vec<Text>, CliError> {
    row.iter()
        .enumerate()
        .map(|(i, t)| {
            let r = parse_rational(t.0.trim()).map_err(|e| at(&format!("{path}[{i}]"), e))?;
            Ok(Text(fmt_rational(&r)))
        })
        .collect()
}

fn canon_rational_matrix(m: &TextMatrix, path: &str) -> Result<TextMatrix, CliError> {
    let cols = m.first().map_or(0, Vec::len);
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != cols {
                return Err(at(
                    path,
                    format!("row {} has {} entries, expected {cols}", i + 1, row.len()),
                ));
            }
            canon_rationals(row, &format!("{path}[{i}]"))
        })
        .collect()
}

fn canon_poly_matrix(
    space: &Arc<VarSpace>,
    m: &TextMatrix,
    cols: usize,
    path: &str,
) -> Result<TextMatrix, CliError> {
    m.iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != cols {
                return Err(at(
                    path,
                    format!("row {} has {} entries, expected {cols}", i + 1, row.len()),
                ));
            }
            row.iter()
                .enumerate()
                .map(|(j, t)| {
                    let p = parse_polynomial(space, &t.0)
                        .map_err(|e| at(&format!("{path}[{i}][{j}]"), e))?;
                    Ok(Text(p.to_string()))
                })
                .collect()
        })
        .collect()
}

fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl AnchorSection {
    fn space(&self) -> Result<Arc<VarSpace>, CliError> {
        let names = self
            .variables
            .clone()
            .unwrap_or_else(|| default_names(self.dimension));
        if names.len() != self.dimension {
            return Err(CliError::Parse(format!(
                "{} variables declared for dimension {}",
                names.len(),
                self.dimension
            )));
        }
        VarSpace::new(&names).map_err(parse_err)
    }

    fn canonical(&self, path: &str) -> Result<Self, CliError> {
        let space = self.space()?;
        let n = self.dimension;
        let coflat = match &self.coflat {
            Some(c) => {
                let c = canon_rational_matrix(c, &format!("{path}.coflat"))?;
                if c.iter().any(|r| r.len() != n) {
                    return Err(at(
                        &format!("{path}.coflat"),
                        format!("rows must have {n} entries"),
                    ));
                }
                Some(c)
            }
            None => None,
        };
        let rows = coflat.as_ref().map_or(n, Vec::len);
        if self.images.len() != rows {
            return Err(at(
                &format!("{path}.images"),
                format!("{} rows for {rows} coflat covectors", self.images.len()),
            ));
        }
        Ok(AnchorSection {
            dimension: n,
            variables: Some(space.names().to_vec()),
            coflat,
            images: canon_poly_matrix(&space, &self.images, n, &format!("{path}.images"))?,
        })
    }

    pub fn build(&self) -> Result<PartialAnchor, CliError> {
        let space = self.space()?;
        let polys = |m: &TextMatrix| -> Result<Vec<Vec<Polynomial>>, CliError> {
            m.iter()
                .map(|r| {
                    r.iter()
                        .map(|t| parse_polynomial(&space, &t.0).map_err(parse_err))
                        .collect()
                })
                .collect()
        };
        let images = polys(&self.images)?;
        match &self.coflat {
            None => {
                let b = Bivector::new(&space, images).map_err(parse_err)?;
                Ok(PartialAnchor::from_bivector(&b))
            }
            Some(c) => {
                let basis = CoflatBasis::new(&space, rational_matrix(c)?).map_err(parse_err)?;
                let fields = images
                    .into_iter()
                    .map(|r| VecField::new(&space, r).map_err(parse_err))
                    .collect::<Result<Vec<_>, _>>()?;
                PartialAnchor::new(basis, fields).map_err(parse_err)
            }
        }
    }
}

pub fn rational_matrix(m: &TextMatrix) -> Result<Vec<Vec<Rational>>, CliError> {
    m.iter().map(|r| rational_vec(r)).collect()
}

pub fn rational_vec(r: &[Text]) -> Result<Vec<Rational>, CliError> {
    r.iter()
        .map(|t| parse_rational(t.0.trim()).map_err(parse_err))
        .collect()
}

impl LieAlgebraSection {
    fn canonical(&self) -> Result<Self, CliError> {
        let mut constants = Vec::with_capacity(self.constants.len());
        for (idx, (i, j, k, c)) in self.constants.iter().enumerate() {
            for v in [i, j, k] {
                if *v == 0 || *v > self.dimension {
                    return Err(CliError::Parse(format!(
                        "lie_algebra.constants[{idx}]: index {v} outside 1..={}",
                        self.dimension
                    )));
                }
            }
            let c = parse_rational(c.0.trim())
                .map_err(|e| at(&format!("lie_algebra.constants[{idx}]"), e))?;
            constants.push((*i, *j, *k, Text(fmt_rational(&c))));
        }
        constants.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        Ok(LieAlgebraSection {
            dimension: self.dimension,
            constants,
        })
    }

    pub fn build(&self) -> Result<LieAlgebraSpec, CliError> {
        let entries = self
            .constants
            .iter()
            .map(|(i, j, k, c)| {
                Ok((
                    i - 1,
                    j - 1,
                    k - 1,
                    parse_rational(c.0.trim()).map_err(parse_err)?,
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        LieAlgebraSpec::from_entries(self.dimension, &entries).map_err(parse_err)
    }
}

impl StructureFile {
    /// Canonical form: literals re-rendered, default variable names filled in.
    pub fn canonical(&self) -> Result<Self, CliError> {
        let primaries = [
            self.anchor.is_some(),
            self.lie_algebra.is_some(),
            self.kdv.is_some(),
        ];
        if primaries.iter().filter(|p| **p).count() != 1 {
            return Err(CliError::Parse(
                "exactly one of [anchor], [lie_algebra], [kdv] must be present".into(),
            ));
        }
        let mut out = self.clone();
        if let Some(a) = &self.anchor {
            out.anchor = Some(a.canonical("anchor")?);
        }
        if let Some(a) = &self.second_anchor {
            out.second_anchor = Some(a.canonical("second_anchor")?);
        }
        if let Some(g) = &self.lie_algebra {
            out.lie_algebra = Some(g.canonical()?);
        }
        let dim = self.dim();
        let space = self.space()?;
        for (name, sec, slot) in [
            ("nijenhuis", &self.nijenhuis, &mut out.nijenhuis),
            ("omega", &self.omega, &mut out.omega),
        ] {
            if let Some(m) = sec {
                let space = space
                    .as_ref()
                    .ok_or_else(|| CliError::Parse(format!("[{name}] needs a space")))?;
                if m.matrix.len() != dim {
                    return Err(at(
                        &format!("{name}.matrix"),
                        format!("expected {dim} rows"),
                    ));
                }
                *slot = Some(MatrixSection {
                    matrix: canon_poly_matrix(space, &m.matrix, dim, &format!("{name}.matrix"))?,
                });
            }
        }
        if let Some(c) = &self.chain {
            out.chain = Some(ChainSection {
                m0: canon_rationals(&c.m0, "chain.m0")?,
                casimir: match c.casimir.trim() {
                    "auto-killing" => "auto-killing".into(),
                    p => {
                        let space = space
                            .as_ref()
                            .ok_or_else(|| CliError::Parse("[chain] needs a space".into()))?;
                        parse_polynomial(space, p)
                            .map_err(|e| at("chain.casimir", e))?
                            .to_string()
                    }
                },
                depth: c.depth,
            });
        }
        if let Some(r) = &self.restrict {
            out.restrict = Some(RestrictSection {
                a: canon_rational_matrix(&r.a, "restrict.A")?,
                x0: r
                    .x0
                    .as_ref()
                    .map(|x| canon_rationals(x, "restrict.x0"))
                    .transpose()?,
            });
        }
        if let Some(p) = &self.project {
            out.project = Some(ProjectSection {
                b: canon_rational_matrix(&p.b, "project.B")?,
            });
        }
        Ok(out)
    }

    fn dim(&self) -> usize {
        if let Some(a) = &self.anchor {
            a.dimension
        } else if let Some(g) = &self.lie_algebra {
            g.dimension
        } else {
            0
        }
    }

    /// Space of the primary subject (none for KdV).
    pub fn space(&self) -> Result<Option<Arc<VarSpace>>, CliError> {
        if let Some(a) = &self.anchor {
            a.space().map(Some)
        } else if let Some(g) = &self.lie_algebra {
            Ok(Some(
                VarSpace::new(&default_names(g.dimension)).map_err(parse_err)?,
            ))
        } else {
            Ok(None)
        }
    }

    /// The anchor under study: `[anchor]`, or the Lie-Poisson anchor of `[lie_algebra]`.
    pub fn subject(&self) -> Result<PartialAnchor, CliError> {
        if let Some(a) = &self.anchor {
            return a.build();
        }
        if let Some(g) = &self.lie_algebra {
            let space = self.space()?.expect("lie algebra has a space");
            return Ok(lp_anchor_on(&g.build()?, &space));
        }
        Err(CliError::Usage(
            "this command needs an [anchor] or [lie_algebra] section".into(),
        ))
    }

    pub fn lie_algebra(&self) -> Result<LieAlgebraSpec, CliError> {
        self.lie_algebra
            .as_ref()
            .ok_or_else(|| CliError::Usage("this command needs a [lie_algebra] section".into()))?
            .build()
    }

    fn poly_matrix(
        &self,
        m: &MatrixSection,
    ) -> Result<(Arc<VarSpace>, Vec<Vec<Polynomial>>), CliError> {
        let space = self
            .space()?
            .ok_or_else(|| CliError::Usage("matrix sections need a space".into()))?;
        let rows = m
            .matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| parse_polynomial(&space, &t.0).map_err(parse_err))
                    .collect()
            })
            .collect::<Result<Vec<Vec<Polynomial>>, CliError>>()?;
        Ok((space, rows))
    }

    pub fn nijenhuis(&self) -> Result<Option<OneOneTensor>, CliError> {
        self.nijenhuis
            .as_ref()
            .map(|m| {
                let (s, rows) = self.poly_matrix(m)?;
                OneOneTensor::new(&s, rows).map_err(parse_err)
            })
            .transpose()
    }

    pub fn omega(&self) -> Result<Option<TwoForm>, CliError> {
        self.omega
            .as_ref()
            .map(|m| {
                let (s, rows) = self.poly_matrix(m)?;
                TwoForm::new(&s, rows).map_err(parse_err)
            })
            .transpose()
    }

    /// Canonical TOML rendering.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("structure files serialize")
    }

    /// SHA-256 of the canonical JSON rendering, hex encoded.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("structure files serialize");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
