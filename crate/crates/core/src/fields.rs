//! Polynomial tensor fields on the model space and the coordinate
//! differential-geometric primitives built on them.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * `(P a)^j = sum_i a_i P^{ij}` for a bivector `P` and one-form `a`, so that
//!   `{f, g} = <dg, P df> = sum_{ij} P^{ij} d_i f d_j g`;
//! * `(N X)^i = sum_j N^i_j X^j` and `(N^t a)_j = sum_i a_i N^i_j`;
//! * `(W X)_i = sum_j W_{ij} X^j` for a two-form `W`.
//!
//! Components are always indexed by the spatial coordinates of the
//! [`VarSpace`]; formal parameters may appear in the coefficients but are
//! never differentiated.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polycore::{parse_polynomial, Polynomial, Rational, VarSpace};

fn check_space(a: &Arc<VarSpace>, b: &Arc<VarSpace>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!("{a} vs {b}")))
    }
}

fn check_polys(space: &Arc<VarSpace>, polys: &[Polynomial]) -> Result<()> {
    polys.iter().try_for_each(|p| check_space(space, p.space()))
}

fn check_square(space: &Arc<VarSpace>, m: &[Vec<Polynomial>]) -> Result<()> {
    let n = space.dim();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("expected a {n}x{n} matrix")));
    }
    m.iter().try_for_each(|r| check_polys(space, r))
}

fn parse_row(space: &Arc<VarSpace>, row: &[&str]) -> Result<Vec<Polynomial>> {
    row.iter().map(|s| parse_polynomial(space, s)).collect()
}

/// Sum of products, skipping zero factors.
fn dot(space: &Arc<VarSpace>, pairs: impl Iterator<Item = (Polynomial, Polynomial)>) -> Polynomial {
    let mut acc = Polynomial::zero(space);
    for (a, b) in pairs {
        if !a.is_zero() && !b.is_zero() {
            acc += &(&a * &b);
        }
    }
    acc
}

/// Vector field `sum_i X^i d/dx_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct VecField {
    space: Arc<VarSpace>,
    comps: Vec<Polynomial>,
}

impl VecField {
    pub fn new(space: &Arc<VarSpace>, comps: Vec<Polynomial>) -> Result<Self> {
        if comps.len() != space.dim() {
            return Err(Error::LengthMismatch {
                expected: space.dim(),
                got: comps.len(),
            });
        }
        check_polys(space, &comps)?;
        Ok(VecField {
            space: space.clone(),
            comps,
        })
    }

    pub fn parse(space: &Arc<VarSpace>, comps: &[&str]) -> Result<Self> {
        Self::new(space, parse_row(space, comps)?)
    }

    pub fn zero(space: &Arc<VarSpace>) -> Self {
        VecField {
            space: space.clone(),
            comps: vec![Polynomial::zero(space); space.dim()],
        }
    }

    /// The coordinate field `d/dx_i`.
    pub fn coordinate(space: &Arc<VarSpace>, i: usize) -> Self {
        let mut x = Self::zero(space);
        x.comps[i] = Polynomial::one(space);
        x
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn comps(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Polynomial {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Polynomial::is_zero)
    }

    /// Derivation `X(f) = sum_i X^i d_i f`.
    pub fn apply(&self, f: &Polynomial) -> Polynomial {
        dot(
            &self.space,
            self.comps
                .iter()
                .enumerate()
                .map(|(i, x)| (x.clone(), f.d(i))),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        VecField {
            space: self.space.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        VecField {
            space: self.space.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, f: &Polynomial) -> Self {
        VecField {
            space: self.space.clone(),
            comps: self.comps.iter().map(|c| c * f).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        VecField {
            space: self.space.clone(),
            comps: self.comps.iter().map(|c| c.scale(r)).collect(),
        }
    }

    pub fn embed(&self, target: &Arc<VarSpace>) -> Result<Self> {
        Ok(VecField {
            space: target.clone(),
            comps: self
                .comps
                .iter()
                .map(|c| c.embed(target))
                .collect::<Result<_>>()?,
        })
    }

    /// Index and value of the first nonzero component.
    pub fn first_nonzero(&self) -> Option<(usize, &Polynomial)> {
        self.comps.iter().enumerate().find(|(_, c)| !c.is_zero())
    }
}

impl fmt::Display for VecField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl fmt::Debug for VecField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VecField{self}")
    }
}

/// One-form `sum_i a_i dx_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct OneForm {
    space: Arc<VarSpace>,
    comps: Vec<Polynomial>,
}

impl OneForm {
    pub fn new(space: &Arc<VarSpace>, comps: Vec<Polynomial>) -> Result<Self> {
        if comps.len() != space.dim() {
            return Err(Error::LengthMismatch {
                expected: space.dim(),
                got: comps.len(),
            });
        }
        check_polys(space, &comps)?;
        Ok(OneForm {
            space: space.clone(),
            comps,
        })
    }

    pub fn parse(space: &Arc<VarSpace>, comps: &[&str]) -> Result<Self> {
        Self::new(space, parse_row(space, comps)?)
    }

    pub fn zero(space: &Arc<VarSpace>) -> Self {
        OneForm {
            space: space.clone(),
            comps: vec![Polynomial::zero(space); space.dim()],
        }
    }

    pub fn dx(space: &Arc<VarSpace>, i: usize) -> Self {
        let mut a = Self::zero(space);
        a.comps[i] = Polynomial::one(space);
        a
    }

    /// Constant covector with rational entries.
    pub fn constant(space: &Arc<VarSpace>, entries: &[Rational]) -> Result<Self> {
        Self::new(
            space,
            entries
                .iter()
                .map(|c| Polynomial::constant(space, c.clone()))
                .collect(),
        )
    }

    /// Differential `df` over the spatial coordinates.
    pub fn differential(f: &Polynomial) -> Self {
        let space = f.space().clone();
        OneForm {
            comps: (0..space.dim()).map(|i| f.d(i)).collect(),
            space,
        }
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn comps(&self) -> &[Polynomial] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> &Polynomial {
        &self.comps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Polynomial::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        OneForm {
            space: self.space.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        OneForm {
            space: self.space.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, f: &Polynomial) -> Self {
        OneForm {
            space: self.space.clone(),
            comps: self.comps.iter().map(|c| c * f).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        OneForm {
            space: self.space.clone(),
            comps: self.comps.iter().map(|c| c.scale(r)).collect(),
        }
    }

    pub fn first_nonzero(&self) -> Option<(usize, &Polynomial)> {
        self.comps.iter().enumerate().find(|(_, c)| !c.is_zero())
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm{self}")
    }
}

fn antisymmetry_violation(m: &[Vec<Polynomial>]) -> Option<(usize, usize, Polynomial)> {
    let n = m.len();
    for i in 0..n {
        for j in i..n {
            let s = &m[i][j] + &m[j][i];
            if !s.is_zero() {
                return Some((i, j, s));
            }
        }
    }
    None
}

fn render_matrix(m: &[Vec<Polynomial>]) -> String {
    let rows: Vec<String> = m
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Antisymmetric `(2,0)` tensor `P^{ij}`.
#[derive(Clone, PartialEq, Eq)]
pub struct Bivector {
    space: Arc<VarSpace>,
    m: Vec<Vec<Polynomial>>,
}

impl Bivector {
    /// Validates `P^{ij} = -P^{ji}` exactly.
    pub fn new(space: &Arc<VarSpace>, m: Vec<Vec<Polynomial>>) -> Result<Self> {
        check_square(space, &m)?;
        if let Some((i, j, s)) = antisymmetry_violation(&m) {
            return Err(Error::NotAntisymmetric {
                i: i + 1,
                j: j + 1,
                witness: s.to_string(),
            });
        }
        Ok(Bivector {
            space: space.clone(),
            m,
        })
    }

    pub fn parse(space: &Arc<VarSpace>, rows: &[&[&str]]) -> Result<Self> {
        let m = rows
            .iter()
            .map(|r| parse_row(space, r))
            .collect::<Result<_>>()?;
        Self::new(space, m)
    }

    /// Build from the entries above the diagonal, `(i, j, P^{ij})` with `i < j`
    /// (0-based); the rest is filled by antisymmetry.
    pub fn from_upper(space: &Arc<VarSpace>, entries: &[(usize, usize, &str)]) -> Result<Self> {
        let n = space.dim();
        let mut m = vec![vec![Polynomial::zero(space); n]; n];
        for &(i, j, s) in entries {
            if i >= n || j >= n || i == j {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    dim: n,
                });
            }
            let p = parse_polynomial(space, s)?;
            m[j][i] = -&p;
            m[i][j] = p;
        }
        Self::new(space, m)
    }

    pub fn zero(space: &Arc<VarSpace>) -> Self {
        let n = space.dim();
        Bivector {
            space: space.clone(),
            m: vec![vec![Polynomial::zero(space); n]; n],
        }
    }

    /// Canonical symplectic bivector on coordinates ordered `(q1, p1, q2, p2, ...)`.
    pub fn canonical(space: &Arc<VarSpace>) -> Result<Self> {
        let n = space.dim();
        if n % 2 != 0 {
            return Err(Error::Shape(format!(
                "canonical bivector needs even dimension, got {n}"
            )));
        }
        let entries: Vec<(usize, usize, &str)> =
            (0..n / 2).map(|k| (2 * k, 2 * k + 1, "1")).collect();
        Self::from_upper(space, &entries)
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.m[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Polynomial>] {
        &self.m
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(Polynomial::is_zero)
    }

    /// Maximum spatial degree of the entries; `None` for the zero bivector.
    pub fn degree(&self) -> Option<u32> {
        self.m
            .iter()
            .flatten()
            .filter_map(Polynomial::spatial_degree)
            .max()
    }
}

impl fmt::Display for Bivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_matrix(&self.m))
    }
}

impl fmt::Debug for Bivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bivector{self}")
    }
}

/// Antisymmetric `(0,2)` tensor `W_{ij}`.
#[derive(Clone, PartialEq, Eq)]
pub struct TwoForm {
    space: Arc<VarSpace>,
    m: Vec<Vec<Polynomial>>,
}

impl TwoForm {
    pub fn new(space: &Arc<VarSpace>, m: Vec<Vec<Polynomial>>) -> Result<Self> {
        check_square(space, &m)?;
        if let Some((i, j, s)) = antisymmetry_violation(&m) {
            return Err(Error::NotAntisymmetric {
                i: i + 1,
                j: j + 1,
                witness: s.to_string(),
            });
        }
        Ok(TwoForm {
            space: space.clone(),
            m,
        })
    }

    pub fn parse(space: &Arc<VarSpace>, rows: &[&[&str]]) -> Result<Self> {
        let m = rows
            .iter()
            .map(|r| parse_row(space, r))
            .collect::<Result<_>>()?;
        Self::new(space, m)
    }

    /// Entries `(i, j, W_{ij})` with `i < j`, 0-based.
    pub fn from_upper(space: &Arc<VarSpace>, entries: &[(usize, usize, &str)]) -> Result<Self> {
        let n = space.dim();
        let mut m = vec![vec![Polynomial::zero(space); n]; n];
        for &(i, j, s) in entries {
            if i >= n || j >= n || i == j {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j),
                    dim: n,
                });
            }
            let p = parse_polynomial(space, s)?;
            m[j][i] = -&p;
            m[i][j] = p;
        }
        Self::new(space, m)
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.m[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Polynomial>] {
        &self.m
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(Polynomial::is_zero)
    }
}

impl fmt::Display for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_matrix(&self.m))
    }
}

impl fmt::Debug for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwoForm{self}")
    }
}

/// `(1,1)` tensor `N^i_j`, stored row `i`, column `j`.
#[derive(Clone, PartialEq, Eq)]
pub struct OneOneTensor {
    space: Arc<VarSpace>,
    m: Vec<Vec<Polynomial>>,
}

impl OneOneTensor {
    pub fn new(space: &Arc<VarSpace>, m: Vec<Vec<Polynomial>>) -> Result<Self> {
        check_square(space, &m)?;
        Ok(OneOneTensor {
            space: space.clone(),
            m,
        })
    }

    pub fn parse(space: &Arc<VarSpace>, rows: &[&[&str]]) -> Result<Self> {
        let m = rows
            .iter()
            .map(|r| parse_row(space, r))
            .collect::<Result<_>>()?;
        Self::new(space, m)
    }

    pub fn identity(space: &Arc<VarSpace>) -> Self {
        Self::scalar(&Polynomial::one(space))
    }

    /// `f * Id`.
    pub fn scalar(f: &Polynomial) -> Self {
        let space = f.space().clone();
        let n = space.dim();
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            f.clone()
                        } else {
                            Polynomial::zero(&space)
                        }
                    })
                    .collect()
            })
            .collect();
        OneOneTensor { space, m }
    }

    pub fn diagonal(space: &Arc<VarSpace>, diag: &[&str]) -> Result<Self> {
        let n = space.dim();
        if diag.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: diag.len(),
            });
        }
        let mut m = vec![vec![Polynomial::zero(space); n]; n];
        for (i, s) in diag.iter().enumerate() {
            m[i][i] = parse_polynomial(space, s)?;
        }
        Self::new(space, m)
    }

    /// Build from the columns `N(d/dx_j)`.
    pub fn from_columns(space: &Arc<VarSpace>, cols: &[VecField]) -> Result<Self> {
        let n = space.dim();
        if cols.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: cols.len(),
            });
        }
        let m = (0..n)
            .map(|i| cols.iter().map(|c| c.comp(i).clone()).collect())
            .collect();
        Self::new(space, m)
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn entry(&self, i: usize, j: usize) -> &Polynomial {
        &self.m[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Polynomial>] {
        &self.m
    }

    /// Column `j`, i.e. `N(d/dx_j)`.
    pub fn column(&self, j: usize) -> VecField {
        VecField {
            space: self.space.clone(),
            comps: self.m.iter().map(|r| r[j].clone()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        OneOneTensor {
            space: self.space.clone(),
            m: crate::linalg::transpose(&self.m),
        }
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.space.dim();
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        dot(
                            &self.space,
                            (0..n).map(|k| (self.m[i][k].clone(), other.m[k][j].clone())),
                        )
                    })
                    .collect()
            })
            .collect();
        OneOneTensor {
            space: self.space.clone(),
            m,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        OneOneTensor {
            space: self.space.clone(),
            m: self
                .m
                .iter()
                .zip(&other.m)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(Polynomial::is_zero)
    }

    /// True when every entry is a constant.
    pub fn is_constant(&self) -> bool {
        self.m.iter().flatten().all(Polynomial::is_constant)
    }
}

impl fmt::Display for OneOneTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_matrix(&self.m))
    }
}

impl fmt::Debug for OneOneTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneOneTensor{self}")
    }
}

/// Fully antisymmetric three-index tensor, stored on `i < j < k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Antisym3 {
    size: usize,
    space: Arc<VarSpace>,
    entries: BTreeMap<(usize, usize, usize), Polynomial>,
}

impl Antisym3 {
    pub fn zero(space: &Arc<VarSpace>, size: usize) -> Self {
        Antisym3 {
            size,
            space: space.clone(),
            entries: BTreeMap::new(),
        }
    }

    /// Set the canonical entry; indices must be strictly increasing.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Polynomial) {
        assert!(i < j && j < k && k < self.size, "canonical triple expected");
        if value.is_zero() {
            self.entries.remove(&(i, j, k));
        } else {
            self.entries.insert((i, j, k), value);
        }
    }

    /// Entry for any index triple, expanded by the permutation sign.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Polynomial {
        if i == j || j == k || i == k {
            return Polynomial::zero(&self.space);
        }
        let mut idx = [i, j, k];
        let mut swaps = 0;
        for a in 0..3 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    swaps += 1;
                }
            }
        }
        let v = self
            .entries
            .get(&(idx[0], idx[1], idx[2]))
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.space));
        if swaps % 2 == 1 {
            -v
        } else {
            v
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero canonical entries in triple order.
    pub fn nonzero(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Polynomial)> {
        self.entries.iter()
    }

    pub fn first_nonzero(&self) -> Option<((usize, usize, usize), Polynomial)> {
        self.entries.iter().next().map(|(k, v)| (*k, v.clone()))
    }
}

/// `[X, Y]^j = sum_i (X^i d_i Y^j - Y^i d_i X^j)`.
pub fn lie_bracket(x: &VecField, y: &VecField) -> Result<VecField> {
    check_space(&x.space, &y.space)?;
    let comps = (0..x.space.dim())
        .map(|j| &x.apply(&y.comps[j]) - &y.apply(&x.comps[j]))
        .collect();
    Ok(VecField {
        space: x.space.clone(),
        comps,
    })
}

/// `(L_X a)_i = sum_j (X^j d_j a_i + a_j d_i X^j)`.
pub fn lie_derivative_oneform(x: &VecField, a: &OneForm) -> Result<OneForm> {
    check_space(&x.space, &a.space)?;
    let n = x.space.dim();
    let comps = (0..n)
        .map(|i| {
            let mut c = x.apply(&a.comps[i]);
            c += &dot(
                &x.space,
                (0..n).map(|j| (a.comps[j].clone(), x.comps[j].d(i))),
            );
            c
        })
        .collect();
    Ok(OneForm {
        space: x.space.clone(),
        comps,
    })
}

/// Lie derivative of a `(1,1)` tensor, `(L_X N)(Y) = [X, NY] - N[X, Y]`,
/// expanded on coordinate fields:
/// `(L_X N)^i_j = X(N^i_j) - sum_l N^l_j d_l X^i + sum_l N^i_l d_j X^l`.
pub fn lie_derivative_oneone(x: &VecField, nt: &OneOneTensor) -> Result<OneOneTensor> {
    check_space(&x.space, &nt.space)?;
    let n = x.space.dim();
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut c = x.apply(&nt.m[i][j]);
                    c -= &dot(
                        &x.space,
                        (0..n).map(|l| (nt.m[l][j].clone(), x.comps[i].d(l))),
                    );
                    c += &dot(
                        &x.space,
                        (0..n).map(|l| (nt.m[i][l].clone(), x.comps[l].d(j))),
                    );
                    c
                })
                .collect()
        })
        .collect();
    Ok(OneOneTensor {
        space: x.space.clone(),
        m,
    })
}

/// Duality bracket `<a, X> = sum_i a_i X^i`.
pub fn pairing(a: &OneForm, x: &VecField) -> Result<Polynomial> {
    check_space(&a.space, &x.space)?;
    Ok(dot(
        &a.space,
        a.comps.iter().cloned().zip(x.comps.iter().cloned()),
    ))
}

/// `(da)_{ij} = d_i a_j - d_j a_i`.
pub fn d_oneform(a: &OneForm) -> TwoForm {
    let n = a.space.dim();
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &a.comps[j].d(i) - &a.comps[i].d(j))
                .collect()
        })
        .collect();
    TwoForm {
        space: a.space.clone(),
        m,
    }
}

/// `(dW)_{ijk} = d_i W_{jk} + d_j W_{ki} + d_k W_{ij}`.
pub fn d_twoform(w: &TwoForm) -> Antisym3 {
    let n = w.space.dim();
    let mut out = Antisym3::zero(&w.space, n);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut v = w.m[j][k].d(i);
                v += &w.m[k][i].d(j);
                v += &w.m[i][j].d(k);
                out.set(i, j, k, v);
            }
        }
    }
    out
}

/// `(P a)^j = sum_i a_i P^{ij}`.
pub fn apply_bivector(p: &Bivector, a: &OneForm) -> Result<VecField> {
    check_space(&p.space, &a.space)?;
    let n = p.space.dim();
    let comps = (0..n)
        .map(|j| {
            dot(
                &p.space,
                (0..n).map(|i| (a.comps[i].clone(), p.m[i][j].clone())),
            )
        })
        .collect();
    Ok(VecField {
        space: p.space.clone(),
        comps,
    })
}

/// `(N X)^i = sum_j N^i_j X^j`.
pub fn apply_oneone(nt: &OneOneTensor, x: &VecField) -> Result<VecField> {
    check_space(&nt.space, &x.space)?;
    let n = nt.space.dim();
    let comps = (0..n)
        .map(|i| {
            dot(
                &nt.space,
                (0..n).map(|j| (nt.m[i][j].clone(), x.comps[j].clone())),
            )
        })
        .collect();
    Ok(VecField {
        space: nt.space.clone(),
        comps,
    })
}

/// `(N^t a)_j = sum_i a_i N^i_j`.
pub fn apply_oneone_transpose(nt: &OneOneTensor, a: &OneForm) -> Result<OneForm> {
    check_space(&nt.space, &a.space)?;
    let n = nt.space.dim();
    let comps = (0..n)
        .map(|j| {
            dot(
                &nt.space,
                (0..n).map(|i| (a.comps[i].clone(), nt.m[i][j].clone())),
            )
        })
        .collect();
    Ok(OneForm {
        space: nt.space.clone(),
        comps,
    })
}

/// `(W X)_i = sum_j W_{ij} X^j`.
pub fn apply_twoform(w: &TwoForm, x: &VecField) -> Result<OneForm> {
    check_space(&w.space, &x.space)?;
    let n = w.space.dim();
    let comps = (0..n)
        .map(|i| {
            dot(
                &w.space,
                (0..n).map(|j| (w.m[i][j].clone(), x.comps[j].clone())),
            )
        })
        .collect();
    Ok(OneForm {
        space: w.space.clone(),
        comps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::rat;

    fn s(n: usize) -> Arc<VarSpace> {
        VarSpace::standard(n)
    }

    fn poly(sp: &Arc<VarSpace>, t: &str) -> Polynomial {
        parse_polynomial(sp, t).unwrap()
    }

    #[test]
    fn bracket_examples() {
        let sp = s(2);
        let d1 = VecField::coordinate(&sp, 0);
        let d2 = VecField::coordinate(&sp, 1);
        assert!(lie_bracket(&d1, &d2).unwrap().is_zero());
        // [x1 d2, d1]^j = x1 d2(d1^j) - d1(x1 d2^j): only j = 2 survives, value -1
        let x = VecField::parse(&sp, &["0", "x1"]).unwrap();
        assert_eq!(
            lie_bracket(&x, &d1).unwrap(),
            VecField::parse(&sp, &["0", "-1"]).unwrap()
        );
        let r = VecField::parse(&sp, &["x1*x2", "x2^2 - 3"]).unwrap();
        assert!(lie_bracket(&r, &r).unwrap().is_zero());
        assert!(lie_bracket(&r, &VecField::zero(&s(3))).is_err());
    }

    #[test]
    fn lie_derivative_oneform_examples() {
        let sp = s(2);
        let d1 = VecField::coordinate(&sp, 0);
        assert!(lie_derivative_oneform(&d1, &OneForm::dx(&sp, 1))
            .unwrap()
            .is_zero());
        let x = VecField::parse(&sp, &["x2", "0"]).unwrap();
        let l = lie_derivative_oneform(&x, &OneForm::dx(&sp, 0)).unwrap();
        assert_eq!(l, OneForm::dx(&sp, 1));
        // defining identity against three fields Y
        let a = OneForm::dx(&sp, 0);
        for y in [
            VecField::parse(&sp, &["1", "0"]).unwrap(),
            VecField::parse(&sp, &["x1", "x2^2"]).unwrap(),
            VecField::parse(&sp, &["x2", "-x1*x2 + 2"]).unwrap(),
        ] {
            let lhs = pairing(&l, &y).unwrap();
            let rhs = &x.apply(&pairing(&a, &y).unwrap())
                - &pairing(&a, &lie_bracket(&x, &y).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn lie_derivative_oneone_examples() {
        let sp = s(2);
        let x = VecField::parse(&sp, &["x1^2*x2", "3*x1 - x2"]).unwrap();
        assert!(lie_derivative_oneone(&x, &OneOneTensor::identity(&sp))
            .unwrap()
            .is_zero());
        let c = OneOneTensor::parse(&sp, &[&["1", "2"], &["-3", "5"]]).unwrap();
        assert!(lie_derivative_oneone(&VecField::coordinate(&sp, 0), &c)
            .unwrap()
            .is_zero());
        // L_{x1 d1} diag(x1, x2) via the defining identity on each d_j
        let x = VecField::parse(&sp, &["x1", "0"]).unwrap();
        let nt = OneOneTensor::diagonal(&sp, &["x1", "x2"]).unwrap();
        let l = lie_derivative_oneone(&x, &nt).unwrap();
        for j in 0..2 {
            let y = VecField::coordinate(&sp, j);
            let lhs = apply_oneone(&l, &y).unwrap();
            let ny = apply_oneone(&nt, &y).unwrap();
            let rhs = lie_bracket(&x, &ny)
                .unwrap()
                .sub(&apply_oneone(&nt, &lie_bracket(&x, &y).unwrap()).unwrap());
            assert_eq!(lhs, rhs);
        }
        assert_eq!(l, OneOneTensor::diagonal(&sp, &["x1", "0"]).unwrap());
    }

    #[test]
    fn pairing_examples() {
        let sp = s(2);
        let d1 = VecField::coordinate(&sp, 0);
        assert_eq!(
            pairing(&OneForm::dx(&sp, 0), &d1).unwrap(),
            Polynomial::one(&sp)
        );
        let x = VecField::parse(&sp, &["0", "x2"]).unwrap();
        assert!(pairing(&OneForm::dx(&sp, 0), &x).unwrap().is_zero());
        let a = OneForm::parse(&sp, &["x1", "1"]).unwrap();
        let y = VecField::parse(&sp, &["1", "x1"]).unwrap();
        assert_eq!(pairing(&a, &y).unwrap(), poly(&sp, "2*x1"));
    }

    #[test]
    fn exterior_derivative_examples() {
        let sp = s(3);
        let c = TwoForm::from_upper(&sp, &[(0, 1, "3"), (1, 2, "-1/2")]).unwrap();
        assert!(d_twoform(&c).is_zero());
        let w = TwoForm::from_upper(&sp, &[(0, 1, "x3")]).unwrap();
        let dw = d_twoform(&w);
        assert_eq!(dw.get(0, 1, 2), Polynomial::one(&sp));
        assert_eq!(dw.get(2, 1, 0), -Polynomial::one(&sp));
        let exact = d_oneform(&OneForm::parse(&sp, &["0", "0", "x1*x2"]).unwrap());
        assert!(!exact.is_zero());
        assert!(d_twoform(&exact).is_zero());
    }

    #[test]
    fn application_conventions() {
        let sp = s(2);
        let p = Bivector::canonical(&sp).unwrap();
        let v = apply_bivector(&p, &OneForm::dx(&sp, 0)).unwrap();
        assert_eq!(v, VecField::coordinate(&sp, 1));
        // {x1, x2} = <dx2, P dx1> = 1
        assert_eq!(
            pairing(&OneForm::dx(&sp, 1), &v).unwrap(),
            Polynomial::one(&sp)
        );
        let x = VecField::parse(&sp, &["x1", "7"]).unwrap();
        assert_eq!(apply_oneone(&OneOneTensor::identity(&sp), &x).unwrap(), x);
        let w = TwoForm::from_upper(&sp, &[(0, 1, "2")]).unwrap();
        assert_eq!(
            apply_twoform(&w, &VecField::coordinate(&sp, 1)).unwrap(),
            OneForm::constant(&sp, &[rat(2), rat(0)]).unwrap()
        );
    }

    #[test]
    fn bivector_validation() {
        let sp = s(2);
        let bad = Bivector::parse(&sp, &[&["0", "1"], &["1", "0"]]);
        assert!(matches!(
            bad,
            Err(Error::NotAntisymmetric { i: 1, j: 2, .. })
        ));
        assert!(Bivector::parse(&sp, &[&["x1", "0"], &["0", "0"]]).is_err());
        assert!(Bivector::canonical(&s(3)).is_err());
    }
}
