//! Rank of the characteristic distribution, polynomial Casimirs, and
//! restriction/projection of Poisson and PN structures along affine maps.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bistructures::{check_pn, PnStructure};
use crate::error::{Error, Result};
use crate::fields::{OneForm, OneOneTensor, VecField};
use crate::linalg::{self, PolyMatrix, QMatrix};
use crate::partial::{CoflatBasis, PartialAnchor};
use crate::polycore::{Monomial, Polynomial, Rational, VarSpace};
use crate::schouten::is_poisson;
use crate::verdict::{Verdict, Witness};

/// Result of a conditional construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Accepted(T),
    /// A hypothesis of the construction fails; `condition` names it.
    Rejected {
        condition: String,
        witness: Witness,
    },
    Indeterminate(String),
}

impl<T> Outcome<T> {
    fn reject(
        condition: impl Into<String>,
        location: impl Into<String>,
        value: impl fmt::Display,
    ) -> Self {
        Outcome::Rejected {
            condition: condition.into(),
            witness: Witness {
                location: location.into(),
                value: value.to_string(),
            },
        }
    }

    pub fn verdict(&self) -> Verdict {
        match self {
            Outcome::Accepted(_) => Verdict::Pass,
            Outcome::Rejected { condition, witness } => {
                Verdict::fail(format!("{condition} {}", witness.location), &witness.value)
            }
            Outcome::Indeterminate(r) => Verdict::Indeterminate(r.clone()),
        }
    }

    pub fn accepted(&self) -> Option<&T> {
        match self {
            Outcome::Accepted(t) => Some(t),
            _ => None,
        }
    }

    pub fn into_accepted(self) -> Option<T> {
        match self {
            Outcome::Accepted(t) => Some(t),
            _ => None,
        }
    }

    fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Accepted(t) => Outcome::Accepted(f(t)),
            Outcome::Rejected { condition, witness } => Outcome::Rejected { condition, witness },
            Outcome::Indeterminate(r) => Outcome::Indeterminate(r),
        }
    }
}

fn no_params(p: &PartialAnchor) -> Result<()> {
    if p.space().num_params() > 0 {
        return Err(Error::Precondition(
            "anchor must not carry formal parameters".into(),
        ));
    }
    Ok(())
}

/// `count` rational points: the origin, then seeded random points with small
/// numerators and denominators.
pub fn sample_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(vec![Rational::zero(); dim]);
    }
    while out.len() < count {
        out.push(
            (0..dim)
                .map(|_| {
                    Rational::new(
                        rng.random_range(-9i64..=9).into(),
                        rng.random_range(1i64..=5).into(),
                    )
                })
                .collect(),
        );
    }
    out
}

/// `n x k` matrix whose columns are the images `P theta_a`.
pub fn image_matrix(p: &PartialAnchor) -> PolyMatrix {
    let n = p.space().dim();
    (0..n)
        .map(|i| p.images().iter().map(|v| v.comp(i).clone()).collect())
        .collect()
}

fn eval_matrix(m: &[Vec<Polynomial>], point: &[Rational]) -> Result<QMatrix> {
    m.iter()
        .map(|row| row.iter().map(|e| e.eval(point)).collect())
        .collect()
}

/// Pointwise and generic rank of the characteristic distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub generic_rank: usize,
    pub samples: Vec<(Vec<Rational>, usize)>,
    /// Nonzero `r x r` minors `(rows, cols, det)`; `None` when too many to list.
    pub minors: Option<Vec<(Vec<usize>, Vec<usize>, Polynomial)>>,
    pub note: Option<String>,
}

/// Upper bound on listed minors.
pub const MAX_MINORS: usize = 4096;

pub fn rank_report(p: &PartialAnchor, samples: usize, seed: u64) -> Result<RankReport> {
    no_params(p)?;
    let space = p.space().clone();
    let m = image_matrix(p);
    let n = space.dim();
    let k = p.basis().len();
    let mut pts = Vec::new();
    for pt in sample_points(n, samples.max(1), seed) {
        let r = linalg::rank(&eval_matrix(&m, &pt)?);
        pts.push((pt, r));
    }
    let generic_rank = pts.iter().map(|(_, r)| *r).max().unwrap_or(0);
    let count = linalg::binomial(n, generic_rank).saturating_mul(linalg::binomial(k, generic_rank));
    let (minors, note) = if generic_rank == 0 {
        (Some(Vec::new()), None)
    } else if count > MAX_MINORS {
        (
            None,
            Some(format!(
                "{count} minors of size {generic_rank}; listing skipped, sampled ranks only"
            )),
        )
    } else {
        let mut out = Vec::new();
        for rows in linalg::subsets(n, generic_rank) {
            for cols in linalg::subsets(k, generic_rank) {
                let sub: PolyMatrix = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
                    .collect();
                let d = linalg::poly_det(&sub, &space);
                if !d.is_zero() {
                    out.push((rows.clone(), cols, d));
                }
            }
        }
        (Some(out), None)
    };
    Ok(RankReport {
        generic_rank,
        samples: pts,
        minors,
        note,
    })
}

fn monomials_up_to(nvars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, max_degree, &mut vec![0; nvars], &mut out);
    out.retain(|m| m.iter().any(|&e| e > 0));
    out.sort_by(|a, b| Monomial::new(b.clone()).cmp(&Monomial::new(a.clone())));
    out
}

/// Basis, modulo constants, of admissible polynomials `C` of degree at most
/// `max_degree` with `P dC = 0`. Each element is monic with distinct leading
/// monomials.
pub fn polynomial_casimirs(p: &PartialAnchor, max_degree: u32) -> Result<Vec<Polynomial>> {
    no_params(p)?;
    if max_degree == 0 {
        return Err(Error::Precondition("max degree must be at least 1".into()));
    }
    let space = p.space().clone();
    let n = space.dim();
    let basis = p.basis();
    let monos = monomials_up_to(n, max_degree);
    // each unknown contributes linear conditions keyed by (equation, monomial)
    let mut rows: BTreeMap<(usize, Monomial), Vec<Rational>> = BTreeMap::new();
    let ncols = monos.len();
    for (col, e) in monos.iter().enumerate() {
        let mu = Polynomial::monomial(&space, e.clone(), Rational::one());
        let grad: Vec<Polynomial> = (0..n).map(|i| mu.d(i)).collect();
        let mut conditions = Vec::new();
        for w in basis.annihilator() {
            conditions.push(contract(&space, w, &grad));
        }
        let coeffs: Vec<Polynomial> = basis
            .solver()
            .iter()
            .map(|s| contract(&space, s, &grad))
            .collect();
        let field = p.combine(&coeffs);
        conditions.extend(field.comps().iter().cloned());
        for (eq, c) in conditions.iter().enumerate() {
            for (m, v) in c.terms() {
                rows.entry((eq, m.clone()))
                    .or_insert_with(|| vec![Rational::zero(); ncols])[col] = v.clone();
            }
        }
    }
    let mat: QMatrix = rows.into_values().collect();
    let kernel = if mat.is_empty() {
        linalg::identity(ncols)
    } else {
        linalg::kernel(&mat, ncols)
    };
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    let (r, pivots) = linalg::rref(&kernel);
    Ok(r.iter()
        .take(pivots.len())
        .map(|row| {
            Polynomial::from_terms(
                &space,
                monos
                    .iter()
                    .zip(row)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(m, c)| (m.clone(), c.clone())),
            )
        })
        .collect())
}

fn contract(space: &Arc<VarSpace>, w: &[Rational], polys: &[Polynomial]) -> Polynomial {
    let mut acc = Polynomial::zero(space);
    for (c, p) in w.iter().zip(polys) {
        if !c.is_zero() && !p.is_zero() {
            acc += &p.scale(c);
        }
    }
    acc
}

/// `s -> x0 + A s`, `A` an `n x m` rational matrix of rank `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineImmersion {
    a: QMatrix,
    x0: Vec<Rational>,
}

impl AffineImmersion {
    pub fn new(a: QMatrix, x0: Vec<Rational>) -> Result<Self> {
        let n = a.len();
        let m = a.first().map_or(0, Vec::len);
        if n == 0 || m == 0 || a.iter().any(|r| r.len() != m) {
            return Err(Error::Shape("A must be a nonempty n x m matrix".into()));
        }
        if x0.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x0.len(),
            });
        }
        if linalg::rank(&a) != m {
            return Err(Error::RankDeficient(format!(
                "A has rank {} < {m}",
                linalg::rank(&a)
            )));
        }
        Ok(AffineImmersion { a, x0 })
    }

    /// Coordinate plane through the origin spanned by the given axes.
    pub fn coordinate_plane(n: usize, axes: &[usize]) -> Result<Self> {
        let mut a = linalg::zeros(n, axes.len());
        for (j, &i) in axes.iter().enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            a[i][j] = Rational::one();
        }
        Self::new(a, vec![Rational::zero(); n])
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.a
    }

    pub fn offset(&self) -> &[Rational] {
        &self.x0
    }

    pub fn target_dim(&self) -> usize {
        self.a.len()
    }

    pub fn source_dim(&self) -> usize {
        self.a[0].len()
    }

    /// `(A^t A)^-1 A^t`.
    pub fn pseudo_left_inverse(&self) -> QMatrix {
        let at = linalg::transpose(&self.a);
        let g = linalg::inverse(&linalg::matmul(&at, &self.a)).expect("full column rank");
        linalg::matmul(&g, &at)
    }

    /// Inverse of the first invertible `m x m` row block, zero elsewhere.
    pub fn row_left_inverse(&self) -> QMatrix {
        let (n, m) = (self.target_dim(), self.source_dim());
        let (_, pivots) = linalg::rref(&linalg::transpose(&self.a));
        let sub: QMatrix = pivots.iter().map(|&i| self.a[i].clone()).collect();
        let inv = linalg::inverse(&sub).expect("pivot rows are independent");
        let mut out = linalg::zeros(m, n);
        for (t, &i) in pivots.iter().enumerate() {
            for j in 0..m {
                out[j][i] = inv[j][t].clone();
            }
        }
        out
    }

    /// `x_i = x0_i + sum_j A_ij s_j` as polynomials in `s`.
    fn coordinate_images(&self, source: &Arc<VarSpace>) -> Vec<Polynomial> {
        self.a
            .iter()
            .zip(&self.x0)
            .map(|(row, x0)| {
                Polynomial::constant(source, x0.clone()) + Polynomial::linear(source, row)
            })
            .collect()
    }
}

/// `x -> B x`, `B` an `m x n` rational matrix of rank `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSubmersion {
    b: QMatrix,
}

impl LinearSubmersion {
    pub fn new(b: QMatrix) -> Result<Self> {
        let m = b.len();
        let n = b.first().map_or(0, Vec::len);
        if m == 0 || n == 0 || b.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("B must be a nonempty m x n matrix".into()));
        }
        if linalg::rank(&b) != m {
            return Err(Error::RankDeficient(format!(
                "B has rank {} < {m}",
                linalg::rank(&b)
            )));
        }
        Ok(LinearSubmersion { b })
    }

    /// Projection onto the given coordinates.
    pub fn onto_coordinates(n: usize, axes: &[usize]) -> Result<Self> {
        let mut b = linalg::zeros(axes.len(), n);
        for (j, &i) in axes.iter().enumerate() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            b[j][i] = Rational::one();
        }
        Self::new(b)
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.b
    }

    pub fn source_dim(&self) -> usize {
        self.b[0].len()
    }

    pub fn target_dim(&self) -> usize {
        self.b.len()
    }
}

fn subst_all(p: &Polynomial, images: &[Polynomial]) -> Result<Polynomial> {
    p.substitute(images)
}

fn render_vec(v: &[Polynomial]) -> String {
    let parts: Vec<String> = v.iter().map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn render_qvec(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(crate::polycore::fmt_rational).collect();
    format!("[{}]", parts.join(", "))
}

/// How to decide restriction conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictMode {
    /// Exact over the rational-function field; anchors of degree at most 1.
    Exact,
    /// Conditions evaluated at sampled points only; never conclusive.
    Sampled { samples: usize, seed: u64 },
}

/// Restriction of `P` to the image of `iota`, using `(A^t A)^-1 A^t` to pull
/// vectors back.
pub fn restrict_poisson(
    p: &PartialAnchor,
    iota: &AffineImmersion,
    mode: RestrictMode,
) -> Result<Outcome<PartialAnchor>> {
    restrict_poisson_with(p, iota, &iota.pseudo_left_inverse(), mode)
}

/// As `restrict_poisson` with an explicit left inverse of `A`.
pub fn restrict_poisson_with(
    p: &PartialAnchor,
    iota: &AffineImmersion,
    left_inverse: &QMatrix,
    mode: RestrictMode,
) -> Result<Outcome<PartialAnchor>> {
    no_params(p)?;
    let n = p.space().dim();
    if iota.target_dim() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: iota.target_dim(),
        });
    }
    let m = iota.source_dim();
    let ident = linalg::matmul(left_inverse, &iota.a);
    if ident != linalg::identity(m) {
        return Err(Error::Precondition("not a left inverse of A".into()));
    }
    let source = VarSpace::standard(m);
    let xs = iota.coordinate_images(&source);
    let basis = p.basis();
    let k = basis.len();
    // image matrix along S
    let mm: PolyMatrix = image_matrix(p)
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| subst_all(e, &xs))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let c_ann = linalg::kernel(&linalg::transpose(&iota.a), n);
    let cm: PolyMatrix = c_ann
        .iter()
        .map(|w| {
            (0..k)
                .map(|a| contract(&source, w, &column(&mm, a)))
                .collect()
        })
        .collect();
    // K = A^t Theta^t: pullbacks of the basis covectors
    let kq: QMatrix = linalg::matmul(
        &linalg::transpose(&iota.a),
        &linalg::transpose(basis.rows()),
    );
    let kp = linalg::to_poly_matrix(&source, &kq);

    match mode {
        RestrictMode::Exact => {
            if p.degree().unwrap_or(0) > 1 {
                return Err(Error::Precondition(format!(
                    "exact restriction needs an anchor of degree at most 1, got {}",
                    p.degree().unwrap_or(0)
                )));
            }
        }
        RestrictMode::Sampled { samples, seed } => {
            return sampled_restriction(&cm, &kq, &mm, &source, k, samples, seed);
        }
    }

    let stacked: PolyMatrix = cm.iter().chain(kp.iter()).cloned().collect();
    let r_cm = linalg::poly_rank(&cm);
    let r_k = linalg::rank(&kq);
    let r_all = linalg::poly_rank(&stacked);
    if r_all != r_cm + r_k {
        // a basis covector outside X_P(S) + ann
        let mut span: PolyMatrix = linalg::poly_kernel(&cm, &source, k);
        span.extend(linalg::poly_kernel(&kp, &source, k));
        let base = linalg::poly_rank(&span);
        for a in 0..k {
            let mut with = span.clone();
            let mut e = vec![Polynomial::zero(&source); k];
            e[a] = Polynomial::one(&source);
            with.push(e);
            if linalg::poly_rank(&with) > base {
                return Ok(Outcome::reject(
                    "RP1",
                    format!("theta_{}", a + 1),
                    render_qvec(&basis.rows()[a]),
                ));
            }
        }
        return Ok(Outcome::reject(
            "RP1",
            "rank",
            format!("{r_all} != {r_cm} + {r_k}"),
        ));
    }
    for v in linalg::poly_kernel(&stacked, &source, k) {
        let img = matvec_poly(&mm, &v, &source);
        if img.iter().any(|e| !e.is_zero()) {
            let alpha: Vec<Polynomial> = (0..n)
                .map(|i| {
                    contract_poly(
                        &source,
                        &basis
                            .rows()
                            .iter()
                            .map(|r| r[i].clone())
                            .collect::<Vec<_>>(),
                        &v,
                    )
                })
                .collect();
            return Ok(Outcome::reject(
                "RP2",
                format!("covector {}", render_vec(&alpha)),
                render_vec(&img),
            ));
        }
    }

    // source coflat basis: span of the pulled-back basis covectors
    let (r, piv) = linalg::rref(&linalg::transpose(&kq));
    let src_rows: QMatrix = r.into_iter().take(piv.len()).collect();
    let mut images = Vec::with_capacity(src_rows.len());
    for beta in &src_rows {
        let mut aug: PolyMatrix = cm
            .iter()
            .map(|row| {
                let mut r = row.clone();
                r.push(Polynomial::zero(&source));
                r
            })
            .collect();
        for (i, row) in kp.iter().enumerate() {
            let mut r = row.clone();
            r.push(Polynomial::constant(&source, -beta[i].clone()));
            aug.push(r);
        }
        let Some(sol) = linalg::poly_kernel(&aug, &source, k + 1)
            .into_iter()
            .find(|v| !v[k].is_zero())
        else {
            return Ok(Outcome::reject("RP1", "lift", render_qvec(beta)));
        };
        let t = sol[k].clone();
        let img = matvec_poly(&mm, &sol[..k], &source);
        let mut comps = Vec::with_capacity(m);
        for row in left_inverse {
            let num = contract(&source, row, &img);
            match num.div_exact(&t) {
                Some(q) => comps.push(q),
                None => {
                    return Ok(Outcome::reject(
                        "outside linear category",
                        format!("lift of {}", render_qvec(beta)),
                        format!("({num}) / ({t})"),
                    ))
                }
            }
        }
        images.push(VecField::new(&source, comps)?);
    }
    let restricted = PartialAnchor::new(CoflatBasis::new(&source, src_rows)?, images)?;
    if let Verdict::Fail(w) = is_poisson(&restricted) {
        return Ok(Outcome::reject(
            "is_poisson(restriction)",
            w.location,
            w.value,
        ));
    }
    Ok(Outcome::Accepted(restricted))
}

fn column(m: &[Vec<Polynomial>], j: usize) -> Vec<Polynomial> {
    m.iter().map(|r| r[j].clone()).collect()
}

fn contract_poly(space: &Arc<VarSpace>, w: &[Rational], v: &[Polynomial]) -> Polynomial {
    contract(space, w, v)
}

fn matvec_poly(m: &[Vec<Polynomial>], v: &[Polynomial], space: &Arc<VarSpace>) -> Vec<Polynomial> {
    m.iter()
        .map(|row| {
            let mut acc = Polynomial::zero(space);
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            acc
        })
        .collect()
}

fn sampled_restriction(
    cm: &[Vec<Polynomial>],
    kq: &[Vec<Rational>],
    mm: &[Vec<Polynomial>],
    source: &Arc<VarSpace>,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<Outcome<PartialAnchor>> {
    let mut bad = Vec::new();
    let pts = sample_points(source.dim(), samples.max(1), seed);
    for pt in &pts {
        let cmq = eval_matrix(cm, pt)?;
        let mq = eval_matrix(mm, pt)?;
        let stacked: QMatrix = cmq.iter().chain(kq.iter()).cloned().collect();
        let rp1 = linalg::rank(&stacked) == linalg::rank(&cmq) + linalg::rank(kq);
        let rp2 = linalg::kernel(&stacked, k)
            .iter()
            .all(|v| linalg::matvec(&mq, v).iter().all(Zero::is_zero));
        if !(rp1 && rp2) {
            bad.push(render_qvec(pt));
        }
    }
    Ok(Outcome::Indeterminate(if bad.is_empty() {
        format!("RP1 and RP2 hold at all {} sampled points", pts.len())
    } else {
        format!(
            "RP1/RP2 fail at {} of {} sampled points, first {}",
            bad.len(),
            pts.len(),
            bad[0]
        )
    }))
}

/// Adapted coordinates `(y, z)` with `y = B x`; returns the space and the
/// images of `x_i`.
fn adapted_coordinates(b: &LinearSubmersion) -> Result<(Arc<VarSpace>, Vec<Polynomial>)> {
    let (m, n) = (b.target_dim(), b.source_dim());
    let extra = linalg::complete_basis(&b.b, n);
    let t: QMatrix = b.b.iter().chain(extra.iter()).cloned().collect();
    let tinv = linalg::inverse(&t).expect("completed basis is invertible");
    let names: Vec<String> = (1..=m)
        .map(|i| format!("y{i}"))
        .chain((1..=n - m).map(|i| format!("z{i}")))
        .collect();
    let space = VarSpace::new(&names)?;
    let xs = tinv
        .iter()
        .map(|row| Polynomial::linear(&space, row))
        .collect();
    Ok((space, xs))
}

/// First fiber coordinate `z_j` that `p` involves.
fn fiber_dependence(p: &Polynomial, m: usize) -> Option<usize> {
    (m..p.space().nvars()).find(|&v| p.involves(v))
}

/// `y_i -> x_i` on the standard space of dimension `m`, fibers dropped.
fn to_base(p: &Polynomial, base: &Arc<VarSpace>) -> Result<Polynomial> {
    let m = base.dim();
    let imgs: Vec<Polynomial> = (0..p.space().nvars())
        .map(|i| {
            if i < m {
                Polynomial::var(base, i)
            } else {
                Polynomial::zero(base)
            }
        })
        .collect();
    p.substitute(&imgs)
}

/// Push `P` forward along `B`: on `E♭_Y = {beta : B^t beta in E♭}`,
/// `P'(beta) = B P(B^t beta)`, required to depend on `y = Bx` only.
pub fn project_poisson(p: &PartialAnchor, b: &LinearSubmersion) -> Result<Outcome<PartialAnchor>> {
    no_params(p)?;
    let n = p.space().dim();
    if b.source_dim() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: b.source_dim(),
        });
    }
    let m = b.target_dim();
    let basis = p.basis();
    // beta with <beta, B w> = 0 for every w annihilating E♭
    let cond: QMatrix = basis
        .annihilator()
        .iter()
        .map(|w| linalg::matvec(&b.b, w))
        .collect();
    let quotient: QMatrix = if cond.is_empty() {
        linalg::identity(m)
    } else {
        linalg::kernel(&cond, m)
    };
    if quotient.is_empty() {
        return Ok(Outcome::reject(
            "PpP",
            "quotient cotangent",
            "no covector of the base pulls back into E♭",
        ));
    }
    let (adapted, xs) = adapted_coordinates(b)?;
    let base = VarSpace::standard(m);
    let bt = linalg::transpose(&b.b);
    let mut images = Vec::with_capacity(quotient.len());
    for (j, beta) in quotient.iter().enumerate() {
        let pulled = OneForm::constant(p.space(), &linalg::matvec(&bt, beta))?;
        let v = p.apply(&pulled)?;
        let pushed: Vec<Polynomial> =
            b.b.iter()
                .map(|row| contract(p.space(), row, v.comps()))
                .collect();
        let mut comps = Vec::with_capacity(m);
        for (i, e) in pushed.iter().enumerate() {
            let ey = e.substitute(&xs)?;
            if let Some(z) = fiber_dependence(&ey, m) {
                return Ok(Outcome::reject(
                    "PpP",
                    format!(
                        "component {} of P'(beta_{}) depends on fiber coordinate {}",
                        i + 1,
                        j + 1,
                        adapted.name(z)
                    ),
                    e,
                ));
            }
            comps.push(to_base(&ey, &base)?);
        }
        images.push(VecField::new(&base, comps)?);
    }
    let projected = PartialAnchor::new(CoflatBasis::new(&base, quotient)?, images)?;
    if let Verdict::Fail(w) = is_poisson(&projected) {
        return Ok(Outcome::reject(
            "is_poisson(projection)",
            w.location,
            w.value,
        ));
    }
    Ok(Outcome::Accepted(projected))
}

/// Restrict a PN pair: `(I - A A+) N A = 0` along `S`, then
/// `N' = A+ N A`, re-checked as a PN pair with the restricted anchor.
pub fn restrict_pn(pn: &PnStructure, iota: &AffineImmersion) -> Result<Outcome<PnStructure>> {
    let outcome = restrict_poisson(pn.anchor(), iota, RestrictMode::Exact)?;
    let restricted = match outcome {
        Outcome::Accepted(p) => p,
        other => return Ok(other.map(|_| unreachable!())),
    };
    let n = iota.target_dim();
    let m = iota.source_dim();
    let source = restricted.space().clone();
    let xs = iota.coordinate_images(&source);
    let ns: PolyMatrix = pn
        .nijenhuis()
        .matrix()
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| e.substitute(&xs))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let linv = iota.pseudo_left_inverse();
    let a = linalg::to_poly_matrix(&source, &iota.a);
    let na = poly_matmul(&ns, &a, &source);
    let proj = linalg::matmul(&iota.a, &linv);
    for i in 0..n {
        for j in 0..m {
            let mut r = na[i][j].clone();
            for (l, row) in na.iter().enumerate() {
                if !proj[i][l].is_zero() && !row[j].is_zero() {
                    r -= &row[j].scale(&proj[i][l]);
                }
            }
            if !r.is_zero() {
                return Ok(Outcome::reject(
                    "RpN",
                    format!("entry ({}, {}) of (I - A A+) N A", i + 1, j + 1),
                    r,
                ));
            }
        }
    }
    let linv_p = linalg::to_poly_matrix(&source, &linv);
    let nr = OneOneTensor::new(&source, poly_matmul(&linv_p, &na, &source))?;
    induced_pn(restricted, nr)
}

fn induced_pn(anchor: PartialAnchor, n: OneOneTensor) -> Result<Outcome<PnStructure>> {
    let report = check_pn(&anchor, &n)?;
    if let Verdict::Fail(w) = report.verdict() {
        return Ok(Outcome::reject("induced PN", w.location, w.value));
    }
    Ok(Outcome::Accepted(PnStructure::new(anchor, n)?))
}

fn poly_matmul(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>], space: &Arc<VarSpace>) -> PolyMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = Polynomial::zero(space);
                    for (l, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[l][j].is_zero() {
                            acc += &(x * &b[l][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Project a PN pair: `N^t B^t = B^t M` with `M = (B B^t)^-1 B N^t B^t`
/// depending on `y` only; `N' = M^t`.
pub fn project_pn(pn: &PnStructure, b: &LinearSubmersion) -> Result<Outcome<PnStructure>> {
    let projected = match project_poisson(pn.anchor(), b)? {
        Outcome::Accepted(p) => p,
        other => return Ok(other.map(|_| unreachable!())),
    };
    let space = pn.anchor().space().clone();
    let m = b.target_dim();
    let n = b.source_dim();
    let bt = linalg::transpose(&b.b);
    let g = linalg::inverse(&linalg::matmul(&b.b, &bt)).expect("full row rank");
    let ntr: PolyMatrix = linalg::transpose(pn.nijenhuis().matrix());
    let bp = linalg::to_poly_matrix(&space, &b.b);
    let btp = linalg::to_poly_matrix(&space, &bt);
    let nt_bt = poly_matmul(&ntr, &btp, &space);
    let mmat = poly_matmul(
        &linalg::to_poly_matrix(&space, &g),
        &poly_matmul(&bp, &nt_bt, &space),
        &space,
    );
    let bt_m = poly_matmul(&btp, &mmat, &space);
    for i in 0..n {
        for j in 0..m {
            let r = &nt_bt[i][j] - &bt_m[i][j];
            if !r.is_zero() {
                return Ok(Outcome::reject(
                    "PpN",
                    format!("entry ({}, {}) of N^t B^t - B^t M", i + 1, j + 1),
                    r,
                ));
            }
        }
    }
    let (adapted, xs) = adapted_coordinates(b)?;
    let base = projected.space().clone();
    let mut out = vec![vec![Polynomial::zero(&base); m]; m];
    for i in 0..m {
        for j in 0..m {
            let e = mmat[i][j].substitute(&xs)?;
            if let Some(z) = fiber_dependence(&e, m) {
                return Ok(Outcome::reject(
                    "PpN",
                    format!(
                        "entry ({}, {}) of M depends on fiber coordinate {}",
                        i + 1,
                        j + 1,
                        adapted.name(z)
                    ),
                    &mmat[i][j],
                ));
            }
            // N' = M^t
            out[j][i] = to_base(&e, &base)?;
        }
    }
    induced_pn(projected, OneOneTensor::new(&base, out)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Bivector;
    use crate::liepoisson::{lp_anchor, LieAlgebraSpec};
    use crate::partial::check_partial_antisymmetry;
    use crate::polycore::{frac, parse_polynomial, rat};

    fn canonical(n: usize) -> PartialAnchor {
        PartialAnchor::from_bivector(&Bivector::canonical(&VarSpace::standard(n)).unwrap())
    }

    fn so3() -> PartialAnchor {
        lp_anchor(&LieAlgebraSpec::so3())
    }

    #[test]
    fn ranks() {
        let r = rank_report(&so3(), 8, 1).unwrap();
        assert_eq!(r.generic_rank, 2);
        assert_eq!(r.samples[0].1, 0);
        let s = so3().space().clone();
        let minors: Vec<Polynomial> = r.minors.unwrap().into_iter().map(|t| t.2).collect();
        for sq in ["x1^2", "x3^2"] {
            let p = parse_polynomial(&s, sq).unwrap();
            assert!(minors.iter().any(|m| *m == p || *m == -&p), "{sq}");
        }
        let r = rank_report(&canonical(4), 4, 0).unwrap();
        assert!(r.samples.iter().all(|(_, k)| *k == 4));
        assert!(r.minors.unwrap().iter().any(|t| t.2.is_constant()));
        let zero = PartialAnchor::zero(&CoflatBasis::full(&VarSpace::standard(3)));
        assert_eq!(rank_report(&zero, 4, 0).unwrap().generic_rank, 0);
        for p in [
            so3(),
            lp_anchor(&LieAlgebraSpec::sl2()),
            lp_anchor(&LieAlgebraSpec::heisenberg()),
        ] {
            assert_eq!(rank_report(&p, 6, 3).unwrap().generic_rank % 2, 0);
        }
    }

    #[test]
    fn samples_are_deterministic() {
        assert_eq!(sample_points(3, 5, 42), sample_points(3, 5, 42));
        assert_ne!(sample_points(3, 5, 42), sample_points(3, 5, 43));
    }

    #[test]
    fn casimirs() {
        let c = polynomial_casimirs(&so3(), 2).unwrap();
        let s = so3().space().clone();
        assert_eq!(c, vec![parse_polynomial(&s, "x1^2 + x2^2 + x3^2").unwrap()]);
        assert!(polynomial_casimirs(&canonical(2), 3).unwrap().is_empty());
        let c = polynomial_casimirs(&lp_anchor(&LieAlgebraSpec::heisenberg()), 2).unwrap();
        // x3 and x3^2
        assert_eq!(c.len(), 2);
        for x in &c {
            assert!(
                crate::liepoisson::casimir_check(x, &lp_anchor(&LieAlgebraSpec::heisenberg()))
                    .unwrap()
                    .is_pass()
            );
        }
    }

    #[test]
    fn partial_casimirs_respect_admissibility() {
        // E♭ = span{dx1, dx2} on R^3, P(dx1) = d2, P(dx2) = -d1
        let s = VarSpace::standard(3);
        let p = PartialAnchor::new(
            CoflatBasis::coordinates(&s, &[0, 1]).unwrap(),
            vec![
                VecField::parse(&s, &["0", "1", "0"]).unwrap(),
                VecField::parse(&s, &["-1", "0", "0"]).unwrap(),
            ],
        )
        .unwrap();
        // x3 would be a Casimir but is not admissible
        assert!(polynomial_casimirs(&p, 2).unwrap().is_empty());
    }

    #[test]
    fn canonical_restriction_and_projection() {
        let p = canonical(4);
        let plane = AffineImmersion::coordinate_plane(4, &[0, 1]).unwrap();
        let r = restrict_poisson(&p, &plane, RestrictMode::Exact).unwrap();
        assert_eq!(r.accepted().unwrap(), &canonical(2));
        let b = LinearSubmersion::onto_coordinates(4, &[0, 1]).unwrap();
        let q = project_poisson(&p, &b).unwrap();
        assert_eq!(q.accepted().unwrap(), &canonical(2));
    }

    #[test]
    fn identity_maps() {
        for p in [so3(), canonical(2)] {
            let n = p.space().dim();
            let all: Vec<usize> = (0..n).collect();
            let id = AffineImmersion::coordinate_plane(n, &all).unwrap();
            assert_eq!(
                restrict_poisson(&p, &id, RestrictMode::Exact)
                    .unwrap()
                    .accepted()
                    .unwrap(),
                &p
            );
            let b = LinearSubmersion::onto_coordinates(n, &all).unwrap();
            assert_eq!(project_poisson(&p, &b).unwrap().accepted().unwrap(), &p);
        }
    }

    #[test]
    fn invertible_projection_is_a_coordinate_change() {
        let p = so3();
        let bq = vec![
            vec![rat(1), rat(1), rat(0)],
            vec![rat(0), rat(1), rat(0)],
            vec![rat(0), frac(1, 2), rat(2)],
        ];
        let b = LinearSubmersion::new(bq.clone()).unwrap();
        let q = project_poisson(&p, &b).unwrap().into_accepted().unwrap();
        // pull back: P(x) = B^-1 Q(Bx) B^-t
        let s = p.space().clone();
        let y: Vec<Polynomial> = bq.iter().map(|r| Polynomial::linear(&s, r)).collect();
        let qb = q.to_bivector().unwrap();
        let binv = linalg::inverse(&bq).unwrap();
        let pb = p.to_bivector().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Polynomial::zero(&s);
                for k in 0..3 {
                    for l in 0..3 {
                        let c = &binv[i][k] * &binv[j][l];
                        if !c.is_zero() {
                            acc += &qb.entry(k, l).substitute(&y).unwrap().scale(&c);
                        }
                    }
                }
                assert_eq!(&acc, pb.entry(i, j));
            }
        }
    }

    #[test]
    fn so3_rejections() {
        let b = LinearSubmersion::onto_coordinates(3, &[0, 1]).unwrap();
        match project_poisson(&so3(), &b).unwrap() {
            Outcome::Rejected { condition, witness } => {
                assert_eq!(condition, "PpP");
                assert_eq!(witness.value, "x3");
            }
            other => panic!("{other:?}"),
        }
        let plane = AffineImmersion::coordinate_plane(3, &[0, 1]).unwrap();
        let r = restrict_poisson(&so3(), &plane, RestrictMode::Exact).unwrap();
        assert!(
            matches!(&r, Outcome::Rejected { condition, .. } if condition == "RP1"),
            "{r:?}"
        );
        let shifted =
            AffineImmersion::new(plane.matrix().clone(), vec![rat(0), rat(0), rat(1)]).unwrap();
        assert!(restrict_poisson(&so3(), &shifted, RestrictMode::Exact)
            .unwrap()
            .verdict()
            .is_fail());
    }

    #[test]
    fn left_inverse_choice_is_irrelevant() {
        let p = canonical(4);
        let a = vec![
            vec![rat(1), rat(0)],
            vec![rat(0), rat(1)],
            vec![rat(0), rat(0)],
            vec![rat(0), rat(0)],
        ];
        let iota = AffineImmersion::new(a, vec![rat(0), rat(0), rat(3), frac(-1, 2)]).unwrap();
        let r1 = restrict_poisson_with(&p, &iota, &iota.pseudo_left_inverse(), RestrictMode::Exact)
            .unwrap();
        let r2 = restrict_poisson_with(&p, &iota, &iota.row_left_inverse(), RestrictMode::Exact)
            .unwrap();
        assert!(r1.verdict().is_pass());
        assert_eq!(r1, r2);
        let skew = AffineImmersion::new(
            vec![
                vec![rat(1), rat(0)],
                vec![rat(0), rat(1)],
                vec![rat(2), rat(0)],
                vec![rat(0), rat(0)],
            ],
            vec![rat(0); 4],
        )
        .unwrap();
        assert_ne!(skew.pseudo_left_inverse(), skew.row_left_inverse());
        let a = restrict_poisson_with(&p, &skew, &skew.pseudo_left_inverse(), RestrictMode::Exact)
            .unwrap();
        let b = restrict_poisson_with(&p, &skew, &skew.row_left_inverse(), RestrictMode::Exact)
            .unwrap();
        assert_eq!(a.verdict().is_pass(), b.verdict().is_pass());
        if let (Some(x), Some(y)) = (a.accepted(), b.accepted()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn higher_degree_needs_sampling() {
        let s = VarSpace::standard(4);
        let p = PartialAnchor::from_bivector(
            &Bivector::from_upper(&s, &[(0, 1, "1 + x3^2"), (2, 3, "1")]).unwrap(),
        );
        let plane = AffineImmersion::coordinate_plane(4, &[0, 1]).unwrap();
        assert!(restrict_poisson(&p, &plane, RestrictMode::Exact).is_err());
        let r = restrict_poisson(
            &p,
            &plane,
            RestrictMode::Sampled {
                samples: 5,
                seed: 0,
            },
        )
        .unwrap();
        assert!(matches!(r, Outcome::Indeterminate(_)));
    }

    #[test]
    fn restricted_outputs_are_antisymmetric() {
        let p = canonical(6);
        let plane = AffineImmersion::coordinate_plane(6, &[0, 1, 4, 5]).unwrap();
        let r = restrict_poisson(&p, &plane, RestrictMode::Exact)
            .unwrap()
            .into_accepted()
            .unwrap();
        assert!(check_partial_antisymmetry(&r).is_pass());
        assert_eq!(r, canonical(4));
    }

    fn pn(n: &[&[&str]]) -> PnStructure {
        let p = canonical(4);
        let s = p.space().clone();
        PnStructure::new(p, OneOneTensor::parse(&s, n).unwrap()).unwrap()
    }

    #[test]
    fn pn_restriction_and_projection() {
        let id = pn(&[
            &["1", "0", "0", "0"],
            &["0", "1", "0", "0"],
            &["0", "0", "1", "0"],
            &["0", "0", "0", "1"],
        ]);
        let plane = AffineImmersion::coordinate_plane(4, &[0, 1]).unwrap();
        let b = LinearSubmersion::onto_coordinates(4, &[0, 1]).unwrap();
        let r = restrict_pn(&id, &plane).unwrap().into_accepted().unwrap();
        assert_eq!(
            r.nijenhuis(),
            &OneOneTensor::identity(&VarSpace::standard(2))
        );
        let q = project_pn(&id, &b).unwrap().into_accepted().unwrap();
        assert_eq!(
            q.nijenhuis(),
            &OneOneTensor::identity(&VarSpace::standard(2))
        );

        let block = pn(&[
            &["2", "0", "0", "0"],
            &["0", "2", "0", "0"],
            &["0", "0", "3", "0"],
            &["0", "0", "0", "3"],
        ]);
        let r = restrict_pn(&block, &plane)
            .unwrap()
            .into_accepted()
            .unwrap();
        assert_eq!(
            r.nijenhuis(),
            &OneOneTensor::diagonal(&VarSpace::standard(2), &["2", "2"]).unwrap()
        );
        let q = project_pn(&block, &b).unwrap().into_accepted().unwrap();
        assert_eq!(
            q.nijenhuis(),
            &OneOneTensor::diagonal(&VarSpace::standard(2), &["2", "2"]).unwrap()
        );
    }

    #[test]
    fn coupling_entry_is_rejected() {
        // N d1 has a d3 component: N^3_1 = 1 couples S to its complement
        let s = VarSpace::standard(4);
        let n = OneOneTensor::parse(
            &s,
            &[
                &["1", "0", "0", "0"],
                &["0", "1", "0", "0"],
                &["1", "0", "1", "0"],
                &["0", "0", "0", "1"],
            ],
        )
        .unwrap();
        let plane = AffineImmersion::coordinate_plane(4, &[0, 1]).unwrap();
        // not a PN pair with the canonical anchor; only the RpN test matters here
        let pair = PnStructure::unchecked(canonical(4), n);
        match restrict_pn(&pair, &plane).unwrap() {
            Outcome::Rejected { condition, witness } => {
                assert_eq!(condition, "RpN");
                assert_eq!(witness.location, "entry (3, 1) of (I - A A+) N A");
                assert_eq!(witness.value, "1");
            }
            other => panic!("{other:?}"),
        }
    }
}
