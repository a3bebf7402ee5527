//! Anchors defined only on a constant covector subspace `E♭`, the admissible
//! algebra, partial brackets and Hamiltonian fields.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fields::{apply_bivector, pairing, Bivector, OneForm, VecField};
use crate::linalg::{self, QMatrix};
use crate::polycore::{Polynomial, Rational, VarSpace};
use crate::verdict::Verdict;

/// Linearly independent constant covectors spanning `E♭`.
#[derive(Clone, PartialEq, Eq)]
pub struct CoflatBasis {
    space: Arc<VarSpace>,
    rows: QMatrix,
    // coefficients of a covector in span: a = solver * v
    solver: QMatrix,
    // w with <theta_a, w> = 0 for all a
    annihilator: QMatrix,
}

/// A covector outside `E♭`, with its component off the span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotInSpan {
    pub residual: OneForm,
}

impl CoflatBasis {
    pub fn new(space: &Arc<VarSpace>, rows: QMatrix) -> Result<Self> {
        let n = space.dim();
        let k = rows.len();
        if k == 0 || k > n {
            return Err(Error::Shape(format!(
                "coflat basis needs 1..={n} covectors, got {k}"
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: r.len(),
            });
        }
        let (_, pivots) = linalg::rref(&rows);
        if pivots.len() != k {
            return Err(Error::RankDeficient(format!(
                "coflat covectors have rank {} < {k}",
                pivots.len()
            )));
        }
        // v = sum_a a_a theta_a restricted to pivot columns is square and invertible
        let sub: QMatrix = pivots
            .iter()
            .map(|&c| rows.iter().map(|r| r[c].clone()).collect())
            .collect();
        let inv = linalg::inverse(&sub).expect("pivot minor is invertible");
        let mut solver = linalg::zeros(k, n);
        for a in 0..k {
            for (t, &c) in pivots.iter().enumerate() {
                solver[a][c] = inv[a][t].clone();
            }
        }
        let annihilator = linalg::kernel(&rows, n);
        Ok(CoflatBasis {
            space: space.clone(),
            rows,
            solver,
            annihilator,
        })
    }

    /// All of `{dx_1, ..., dx_n}`.
    pub fn full(space: &Arc<VarSpace>) -> Self {
        Self::new(space, linalg::identity(space.dim())).expect("identity has full rank")
    }

    /// Span of the given coordinate differentials (0-based indices).
    pub fn coordinates(space: &Arc<VarSpace>, indices: &[usize]) -> Result<Self> {
        let n = space.dim();
        let rows = indices
            .iter()
            .map(|&i| {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, dim: n });
                }
                let mut r = vec![Rational::zero(); n];
                r[i] = Rational::from_integer(1.into());
                Ok(r)
            })
            .collect::<Result<_>>()?;
        Self::new(space, rows)
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.space.dim()
    }

    pub fn rows(&self) -> &QMatrix {
        &self.rows
    }

    pub fn annihilator(&self) -> &QMatrix {
        &self.annihilator
    }

    /// `k x n` matrix mapping components of a covector in the span to its
    /// coefficients on the basis.
    pub fn solver(&self) -> &QMatrix {
        &self.solver
    }

    pub fn covector(&self, a: usize) -> OneForm {
        OneForm::constant(&self.space, &self.rows[a]).expect("row length checked")
    }

    /// Linear coordinate function `F_a(x) = theta_a . x`.
    pub fn linear_function(&self, a: usize) -> Polynomial {
        Polynomial::linear(&self.space, &self.rows[a])
    }

    /// Same basis over a space with extra parameters adjoined.
    pub fn rehome(&self, target: &Arc<VarSpace>) -> Result<Self> {
        if target.dim() != self.space.dim() {
            return Err(Error::SpaceMismatch(format!(
                "{} vs {}",
                self.space, target
            )));
        }
        let mut b = self.clone();
        b.space = target.clone();
        Ok(b)
    }

    /// Express `a` as `sum_a c_a theta_a` with polynomial coefficients.
    pub fn decompose(&self, a: &OneForm) -> std::result::Result<Vec<Polynomial>, NotInSpan> {
        let sp = a.space();
        let coeffs: Vec<Polynomial> = self
            .solver
            .iter()
            .map(|row| combine(sp, row, a.comps()))
            .collect();
        let n = self.space.dim();
        let residual: Vec<Polynomial> = (0..n)
            .map(|j| {
                let mut r = a.comp(j).clone();
                for (c, theta) in coeffs.iter().zip(&self.rows) {
                    if !theta[j].is_zero() && !c.is_zero() {
                        r -= &c.scale(&theta[j]);
                    }
                }
                r
            })
            .collect();
        if residual.iter().all(Polynomial::is_zero) {
            Ok(coeffs)
        } else {
            Err(NotInSpan {
                residual: OneForm::new(sp, residual).expect("shape preserved"),
            })
        }
    }

    /// Does the gradient of `g` lie in the span?
    fn gradient_in_span(&self, g: &Polynomial) -> bool {
        self.annihilator.iter().all(|w| {
            let grad: Vec<Polynomial> = (0..self.space.dim()).map(|i| g.d(i)).collect();
            combine(g.space(), w, &grad).is_zero()
        })
    }
}

impl fmt::Debug for CoflatBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let c: Vec<String> = r.iter().map(crate::polycore::fmt_rational).collect();
                format!("[{}]", c.join(", "))
            })
            .collect();
        write!(f, "CoflatBasis[{}]", rows.join(", "))
    }
}

fn combine(space: &Arc<VarSpace>, coeffs: &[Rational], polys: &[Polynomial]) -> Polynomial {
    let mut acc = Polynomial::zero(space);
    for (c, p) in coeffs.iter().zip(polys) {
        if !c.is_zero() && !p.is_zero() {
            acc += &p.scale(c);
        }
    }
    acc
}

/// `coflat_decompose`: coefficients of `a` on the basis, or the residual.
pub fn coflat_decompose(
    a: &OneForm,
    basis: &CoflatBasis,
) -> std::result::Result<Vec<Polynomial>, NotInSpan> {
    basis.decompose(a)
}

/// Result of the admissibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    /// The differential of order `order` leaves `E♭`: the gradient of the
    /// partial derivative `derivative` (variable indices, 0-based) has the
    /// given residual off the span.
    Inadmissible {
        order: usize,
        derivative: Vec<usize>,
        residual: OneForm,
    },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            Admissibility::Admissible => None,
            Admissibility::Inadmissible { order, .. } => Some(*order),
        }
    }
}

/// Decide membership of `f` in the admissible algebra of `basis`.
///
/// Walks every partial derivative of `f` breadth-first; a derivative of order
/// `j` whose gradient leaves the span makes `f` fail at order `j + 1`.
pub fn is_admissible(f: &Polynomial, basis: &CoflatBasis) -> Admissibility {
    if basis.is_full() {
        return Admissibility::Admissible;
    }
    let n = basis.space.dim();
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut queue: VecDeque<(Vec<u32>, Vec<usize>, Polynomial)> = VecDeque::new();
    queue.push_back((vec![0; n], Vec::new(), f.clone()));
    seen.insert(vec![0; n]);
    while let Some((counts, path, g)) = queue.pop_front() {
        if !basis.gradient_in_span(&g) {
            let grad = OneForm::differential(&g);
            let residual = basis
                .decompose(&grad)
                .err()
                .map(|e| e.residual)
                .expect("gradient outside span");
            return Admissibility::Inadmissible {
                order: path.len() + 1,
                derivative: path,
                residual,
            };
        }
        for i in 0..n {
            let h = g.d(i);
            if h.is_zero() {
                continue;
            }
            let mut c = counts.clone();
            c[i] += 1;
            if seen.insert(c.clone()) {
                let mut p = path.clone();
                p.push(i);
                queue.push_back((c, p, h));
            }
        }
    }
    Admissibility::Admissible
}

/// A quasi-anchor `P : E♭ -> TM`, stored through the images `P(theta_a)`.
#[derive(Clone, PartialEq, Eq)]
pub struct PartialAnchor {
    basis: CoflatBasis,
    images: Vec<VecField>,
}

impl PartialAnchor {
    pub fn new(basis: CoflatBasis, images: Vec<VecField>) -> Result<Self> {
        if images.len() != basis.len() {
            return Err(Error::LengthMismatch {
                expected: basis.len(),
                got: images.len(),
            });
        }
        for im in &images {
            if im.space().dim() != basis.space.dim() {
                return Err(Error::SpaceMismatch(format!(
                    "{} vs {}",
                    im.space(),
                    basis.space
                )));
            }
        }
        let space = images.first().map(|v| v.space().clone()).unwrap();
        if images.iter().any(|v| v.space() != &space) {
            return Err(Error::SpaceMismatch(
                "images live in different spaces".into(),
            ));
        }
        let basis = if space == basis.space {
            basis
        } else {
            basis.rehome(&space)?
        };
        Ok(PartialAnchor { basis, images })
    }

    /// The full anchor of a bivector: `E♭` is the whole dual, `P(dx_a)^j = P^{aj}`.
    pub fn from_bivector(p: &Bivector) -> Self {
        let space = p.space();
        let images = (0..space.dim())
            .map(|a| apply_bivector(p, &OneForm::dx(space, a)).expect("same space"))
            .collect();
        PartialAnchor {
            basis: CoflatBasis::full(space),
            images,
        }
    }

    /// The zero anchor on a given basis.
    pub fn zero(basis: &CoflatBasis) -> Self {
        PartialAnchor {
            images: vec![VecField::zero(&basis.space); basis.len()],
            basis: basis.clone(),
        }
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.basis.space
    }

    pub fn basis(&self) -> &CoflatBasis {
        &self.basis
    }

    pub fn images(&self) -> &[VecField] {
        &self.images
    }

    pub fn image(&self, a: usize) -> &VecField {
        &self.images[a]
    }

    pub fn is_full(&self) -> bool {
        self.basis.is_full()
    }

    /// Maximum spatial degree of the image components.
    pub fn degree(&self) -> Option<u32> {
        self.images
            .iter()
            .flat_map(|v| v.comps().iter())
            .filter_map(Polynomial::spatial_degree)
            .max()
    }

    /// `P(a)` for a covector in `E♭`.
    pub fn apply(&self, a: &OneForm) -> Result<VecField> {
        let coeffs = self
            .basis
            .decompose(a)
            .map_err(|e| Error::NotInCoflat(e.residual.to_string()))?;
        Ok(self.combine(&coeffs))
    }

    /// `sum_a c_a P(theta_a)`.
    pub fn combine(&self, coeffs: &[Polynomial]) -> VecField {
        let mut out = VecField::zero(self.space());
        for (c, im) in coeffs.iter().zip(&self.images) {
            if !c.is_zero() {
                out = out.add(&im.scale(c));
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(PartialAnchor {
            basis: self.basis.clone(),
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(PartialAnchor {
            basis: self.basis.clone(),
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    pub fn scale(&self, f: &Polynomial) -> Self {
        PartialAnchor {
            basis: self.basis.clone(),
            images: self.images.iter().map(|v| v.scale(f)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        PartialAnchor {
            basis: self.basis.clone(),
            images: self.images.iter().map(|v| v.scale_rational(r)).collect(),
        }
    }

    /// Same anchor over a space with parameters adjoined.
    pub fn embed(&self, target: &Arc<VarSpace>) -> Result<Self> {
        Ok(PartialAnchor {
            basis: self.basis.rehome(target)?,
            images: self
                .images
                .iter()
                .map(|v| v.embed(target))
                .collect::<Result<_>>()?,
        })
    }

    pub fn check_same_basis(&self, other: &Self) -> Result<()> {
        if self.basis.rows != other.basis.rows || self.space() != other.space() {
            return Err(Error::SpaceMismatch(format!(
                "anchors on different coflat bases: {:?} vs {:?}",
                self.basis, other.basis
            )));
        }
        Ok(())
    }

    /// `k x k` matrix with entry `(a, b) = <theta_b, P theta_a>`.
    pub fn pairing_matrix(&self) -> Vec<Vec<Polynomial>> {
        let k = self.basis.len();
        (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| pairing(&self.basis.covector(b), &self.images[a]).expect("same space"))
                    .collect()
            })
            .collect()
    }

    /// The bivector of a full anchor, `P^{ij} = <dx_j, P dx_i>`.
    pub fn to_bivector(&self) -> Result<Bivector> {
        if !self.is_full() {
            return Err(Error::Precondition(
                "anchor is only defined on a proper subspace".into(),
            ));
        }
        let sp = self.space();
        let m = (0..sp.dim())
            .map(|i| Ok(self.apply(&OneForm::dx(sp, i))?.comps().to_vec()))
            .collect::<Result<_>>()?;
        Bivector::new(sp, m)
    }

    /// Extend to the whole dual by sending a complement of `E♭` to zero and
    /// read off the bivector; fails when the extension is not antisymmetric.
    pub fn naive_extension(&self) -> Result<Bivector> {
        let sp = self.space();
        let n = sp.dim();
        let mut t = self.basis.rows.clone();
        t.extend(linalg::complete_basis(&self.basis.rows, n));
        let tinv = linalg::inverse(&t).expect("completed basis is invertible");
        let k = self.basis.len();
        let m = (0..n)
            .map(|i| {
                let coeffs: Vec<Polynomial> = (0..k)
                    .map(|r| Polynomial::constant(sp, tinv[i][r].clone()))
                    .collect();
                self.combine(&coeffs).comps().to_vec()
            })
            .collect();
        Bivector::new(sp, m)
    }
}

impl fmt::Debug for PartialAnchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PartialAnchor {{ basis: {:?}, images: {:?} }}",
            self.basis, self.images
        )
    }
}

/// Antisymmetry of `P` against `E♭`: `<theta_b, P theta_a> = -<theta_a, P theta_b>`.
pub fn check_partial_antisymmetry(p: &PartialAnchor) -> Verdict {
    let m = p.pairing_matrix();
    let k = m.len();
    for a in 0..k {
        for b in a..k {
            let s = &m[a][b] + &m[b][a];
            if !s.is_zero() {
                return Verdict::fail(format!("({}, {})", a + 1, b + 1), s);
            }
        }
    }
    Verdict::Pass
}

fn require_admissible(f: &Polynomial, basis: &CoflatBasis, which: &str) -> Result<()> {
    match is_admissible(f, basis) {
        Admissibility::Admissible => Ok(()),
        Admissibility::Inadmissible { order, .. } => Err(Error::Inadmissible {
            which: format!("{which} = {f}"),
            order,
        }),
    }
}

/// Hamiltonian field `X_f = P(df)`.
pub fn hamiltonian_field(f: &Polynomial, p: &PartialAnchor) -> Result<VecField> {
    require_admissible(f, &p.basis, "f")?;
    let f = f.embed(p.space())?;
    p.apply(&OneForm::differential(&f))
}

/// `{f, g} = <dg, P(df)>`.
pub fn partial_bracket(f: &Polynomial, g: &Polynomial, p: &PartialAnchor) -> Result<Polynomial> {
    require_admissible(g, &p.basis, "g")?;
    let xf = hamiltonian_field(f, p)?;
    let g = g.embed(p.space())?;
    pairing(&OneForm::differential(&g), &xf)
}

/// Are all pairwise brackets of the generators admissible again?
pub fn bracket_closure_check(p: &PartialAnchor, generators: &[Polynomial]) -> Result<Verdict> {
    for (i, g) in generators.iter().enumerate() {
        require_admissible(g, &p.basis, &format!("generator {}", i + 1))?;
    }
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            let b = partial_bracket(&generators[i], &generators[j], p)?;
            if let Admissibility::Inadmissible { order, .. } = is_admissible(&b, &p.basis) {
                return Ok(Verdict::fail(
                    format!(
                        "{{{}, {}}} (inadmissible at order {order})",
                        generators[i], generators[j]
                    ),
                    b,
                ));
            }
        }
    }
    Ok(Verdict::Pass)
}
