//! Lie-Poisson structures from structure constants: linear, frozen and
//! cocycle-modified brackets, the Killing Casimir, and Hamiltonian chains by
//! argument translation.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fields::{lie_bracket, Bivector, OneForm, VecField};
use crate::linalg::{self, QMatrix};
use crate::partial::{hamiltonian_field, partial_bracket, PartialAnchor};
use crate::polycore::{rat, Polynomial, Rational, VarSpace};
use crate::verdict::Verdict;

/// `[e_i, e_j] = sum_k c[i][j][k] e_k`, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebraSpec {
    dim: usize,
    c: Vec<Vec<Vec<Rational>>>,
}

impl LieAlgebraSpec {
    /// From sparse entries `(i, j, k, c)` meaning `c_ij^k = c` and
    /// `c_ji^k = -c`. Antisymmetry and Jacobi are checked.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, Rational)]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConstants("dimension must be positive".into()));
        }
        let mut c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        let mut set = vec![vec![vec![false; dim]; dim]; dim];
        for (i, j, k, v) in entries {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::IndexOutOfRange {
                    index: i.max(j).max(k),
                    dim,
                });
            }
            if i == j {
                if !v.is_zero() {
                    return Err(Error::InvalidConstants(format!(
                        "c_{i1}{i1}^{k1} = {v} must vanish",
                        i1 = i + 1,
                        k1 = k + 1
                    )));
                }
                continue;
            }
            let neg = -v.clone();
            for (a, b, val) in [(i, j, v.clone()), (j, i, neg)] {
                if set[a][b][k] && c[a][b][k] != val {
                    return Err(Error::InvalidConstants(format!(
                        "conflicting values for c_{}{}^{}",
                        a + 1,
                        b + 1,
                        k + 1
                    )));
                }
                set[a][b][k] = true;
                c[a][b][k] = val;
            }
        }
        Self::new(c)
    }

    /// Full dense array, checked.
    pub fn new(c: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let g = Self::unchecked(c)?;
        if let Some(msg) = g.antisymmetry_violation() {
            return Err(Error::InvalidConstants(msg));
        }
        if let Some((i, j, k, l, v)) = g.jacobi_violation() {
            return Err(Error::InvalidConstants(format!(
                "Jacobi fails for (i, j, k) = ({}, {}, {}), component {}: {v}",
                i + 1,
                j + 1,
                k + 1,
                l + 1
            )));
        }
        Ok(g)
    }

    /// Shape-checked only; for exercising checks on invalid constants.
    pub fn unchecked(c: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let dim = c.len();
        if dim == 0
            || c.iter()
                .any(|r| r.len() != dim || r.iter().any(|s| s.len() != dim))
        {
            return Err(Error::Shape("structure constants must be n x n x n".into()));
        }
        Ok(LieAlgebraSpec { dim, c })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    pub fn constants(&self) -> &[Vec<Vec<Rational>>] {
        &self.c
    }

    /// Same algebra with `c_ij^k = v` and `c_ji^k = -v`; Jacobi is not rechecked.
    pub fn with_constant(&self, i: usize, j: usize, k: usize, v: Rational) -> Self {
        let mut c = self.c.clone();
        c[j][i][k] = -v.clone();
        c[i][j][k] = v;
        LieAlgebraSpec { dim: self.dim, c }
    }

    fn antisymmetry_violation(&self) -> Option<String> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.c[i][j][k] != -self.c[j][i][k].clone() {
                        return Some(format!(
                            "c_{}{}^{} = {} but c_{}{}^{} = {}",
                            i + 1,
                            j + 1,
                            k + 1,
                            self.c[i][j][k],
                            j + 1,
                            i + 1,
                            k + 1,
                            self.c[j][i][k]
                        ));
                    }
                }
            }
        }
        None
    }

    /// First `(i, j, k, l)` with a nonzero Jacobi sum.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize, usize, Rational)> {
        let n = self.dim;
        let c = &self.c;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = Rational::zero();
                        for m in 0..n {
                            s += &c[i][j][m] * &c[m][k][l];
                            s += &c[j][k][m] * &c[m][i][l];
                            s += &c[k][i][m] * &c[m][j][l];
                        }
                        if !s.is_zero() {
                            return Some((i, j, k, l, s));
                        }
                    }
                }
            }
        }
        None
    }

    /// `[x, y]` in coordinates.
    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let n = self.dim;
        (0..n)
            .map(|k| {
                let mut s = Rational::zero();
                for i in 0..n {
                    for j in 0..n {
                        if !x[i].is_zero() && !y[j].is_zero() {
                            s += &x[i] * &y[j] * &self.c[i][j][k];
                        }
                    }
                }
                s
            })
            .collect()
    }

    /// Matrix of `ad_{e_i}`: entry `(k, j) = c_ij^k`.
    pub fn ad(&self, i: usize) -> QMatrix {
        let n = self.dim;
        (0..n)
            .map(|k| (0..n).map(|j| self.c[i][j][k].clone()).collect())
            .collect()
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebraSpec {
            dim,
            c: vec![vec![vec![Rational::zero(); dim]; dim]; dim],
        }
    }

    /// `c_ij^k = epsilon_ijk`.
    pub fn so3() -> Self {
        Self::from_entries(
            3,
            &[(0, 1, 2, rat(1)), (1, 2, 0, rat(1)), (2, 0, 1, rat(1))],
        )
        .expect("so(3) constants")
    }

    /// Basis `(h, e, f)`: `[h,e] = 2e`, `[h,f] = -2f`, `[e,f] = h`.
    pub fn sl2() -> Self {
        Self::from_entries(
            3,
            &[(0, 1, 1, rat(2)), (0, 2, 2, rat(-2)), (1, 2, 0, rat(1))],
        )
        .expect("sl(2) constants")
    }

    /// `[e_1, e_2] = e_3`.
    pub fn heisenberg() -> Self {
        Self::from_entries(3, &[(0, 1, 2, rat(1))]).expect("Heisenberg constants")
    }
}

fn space_for(g: &LieAlgebraSpec) -> Arc<VarSpace> {
    VarSpace::standard(g.dim())
}

fn linear_bivector(
    g: &LieAlgebraSpec,
    space: &Arc<VarSpace>,
    constant: Option<&[Rational]>,
    linear: bool,
) -> Bivector {
    let n = g.dim();
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut e = Polynomial::zero(space);
                    for k in 0..n {
                        let c = g.constant(i, j, k);
                        if c.is_zero() {
                            continue;
                        }
                        if linear {
                            e += &Polynomial::var(space, k).scale(c);
                        }
                        if let Some(m0) = constant {
                            e += &Polynomial::constant(space, c * &m0[k]);
                        }
                    }
                    e
                })
                .collect()
        })
        .collect();
    Bivector::new(space, m).expect("constants are antisymmetric")
}

/// `P^{ij}(x) = sum_k c_ij^k x_k`.
pub fn lp_anchor(g: &LieAlgebraSpec) -> PartialAnchor {
    lp_anchor_on(g, &space_for(g))
}

/// Lie-Poisson anchor over a given space of matching dimension.
pub fn lp_anchor_on(g: &LieAlgebraSpec, space: &Arc<VarSpace>) -> PartialAnchor {
    assert_eq!(
        space.dim(),
        g.dim(),
        "space dimension must match the algebra"
    );
    PartialAnchor::from_bivector(&linear_bivector(g, space, None, true))
}

/// Constant anchor `P^{ij} = sum_k c_ij^k m0_k`.
pub fn frozen_anchor(g: &LieAlgebraSpec, m0: &[Rational]) -> Result<PartialAnchor> {
    if m0.len() != g.dim() {
        return Err(Error::LengthMismatch {
            expected: g.dim(),
            got: m0.len(),
        });
    }
    Ok(PartialAnchor::from_bivector(&linear_bivector(
        g,
        &space_for(g),
        Some(m0),
        false,
    )))
}

/// Antisymmetric rational form on the algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleForm {
    omega: QMatrix,
}

impl CocycleForm {
    pub fn new(omega: QMatrix) -> Result<Self> {
        let n = omega.len();
        if omega.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("omega must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if omega[i][j] != -omega[j][i].clone() {
                    return Err(Error::NotAntisymmetric {
                        i: i + 1,
                        j: j + 1,
                        witness: (&omega[i][j] + &omega[j][i]).to_string(),
                    });
                }
            }
        }
        Ok(CocycleForm { omega })
    }

    pub fn zero(n: usize) -> Self {
        CocycleForm {
            omega: linalg::zeros(n, n),
        }
    }

    /// `omega(x, y) = <beta, [x, y]>`.
    pub fn coboundary(g: &LieAlgebraSpec, beta: &[Rational]) -> Self {
        let n = g.dim();
        let omega = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| g.constant(i, j, k) * &beta[k]).sum())
                    .collect()
            })
            .collect();
        CocycleForm { omega }
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }
}

fn check_form_dim(g: &LieAlgebraSpec, w: &CocycleForm) -> Result<()> {
    if w.dim() != g.dim() {
        return Err(Error::LengthMismatch {
            expected: g.dim(),
            got: w.dim(),
        });
    }
    Ok(())
}

/// `omega([e_i,e_j],e_k) + omega([e_j,e_k],e_i) + omega([e_k,e_i],e_j) = 0`.
pub fn cocycle_check(g: &LieAlgebraSpec, w: &CocycleForm) -> Result<Verdict> {
    check_form_dim(g, w)?;
    let n = g.dim();
    let om = &w.omega;
    let term = |i: usize, j: usize, k: usize| -> Rational {
        (0..n).map(|m| g.constant(i, j, m) * &om[m][k]).sum()
    };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let s = term(i, j, k) + term(j, k, i) + term(k, i, j);
                if !s.is_zero() {
                    return Ok(Verdict::fail(
                        format!("({}, {}, {})", i + 1, j + 1, k + 1),
                        s,
                    ));
                }
            }
        }
    }
    Ok(Verdict::Pass)
}

/// `beta` with `omega_ij = sum_k beta_k c_ij^k`, if any.
pub fn coboundary_solve(g: &LieAlgebraSpec, w: &CocycleForm) -> Result<Option<Vec<Rational>>> {
    check_form_dim(g, w)?;
    let n = g.dim();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            a.push(
                (0..n)
                    .map(|k| g.constant(i, j, k).clone())
                    .collect::<Vec<_>>(),
            );
            b.push(w.omega[i][j].clone());
        }
    }
    if a.is_empty() {
        return Ok(Some(vec![Rational::zero(); n]));
    }
    Ok(linalg::solve(&a, &b))
}

/// `P^{ij}(x) = sum_k c_ij^k x_k + omega_ij`. Rejects non-cocycles.
pub fn modified_anchor(g: &LieAlgebraSpec, w: &CocycleForm) -> Result<PartialAnchor> {
    if let Verdict::Fail(wit) = cocycle_check(g, w)? {
        return Err(Error::Precondition(format!(
            "omega is not a 2-cocycle at {wit}"
        )));
    }
    let space = space_for(g);
    let lp = linear_bivector(g, &space, None, true);
    let n = g.dim();
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| lp.entry(i, j) + &Polynomial::constant(&space, w.omega[i][j].clone()))
                .collect()
        })
        .collect();
    Ok(PartialAnchor::from_bivector(&Bivector::new(&space, m)?))
}

/// `K_ij = trace(ad_{e_i} ad_{e_j})`.
pub fn killing_form(g: &LieAlgebraSpec) -> QMatrix {
    let n = g.dim();
    let ads: Vec<QMatrix> = (0..n).map(|i| g.ad(i)).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let prod = linalg::matmul(&ads[i], &ads[j]);
                    (0..n).map(|k| prod[k][k].clone()).sum()
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KillingCasimir {
    /// `C = 1/2 sum (K^-1)_ij x_i x_j`.
    Casimir(Polynomial),
    /// Killing form singular; no quadratic Casimir from it.
    Degenerate { rank: usize },
}

impl KillingCasimir {
    pub fn casimir(&self) -> Option<&Polynomial> {
        match self {
            KillingCasimir::Casimir(c) => Some(c),
            KillingCasimir::Degenerate { .. } => None,
        }
    }
}

/// Quadratic Casimir from the inverse Killing form, verified against the
/// Lie-Poisson anchor.
pub fn killing_casimir(g: &LieAlgebraSpec) -> Result<KillingCasimir> {
    let k = killing_form(g);
    let Some(inv) = linalg::inverse(&k) else {
        return Ok(KillingCasimir::Degenerate {
            rank: linalg::rank(&k),
        });
    };
    let space = space_for(g);
    let n = g.dim();
    let half = Rational::new(1.into(), 2.into());
    let mut c = Polynomial::zero(&space);
    for i in 0..n {
        for j in 0..n {
            if !inv[i][j].is_zero() {
                let t = &Polynomial::var(&space, i) * &Polynomial::var(&space, j);
                c += &t.scale(&(&inv[i][j] * &half));
            }
        }
    }
    if let Verdict::Fail(w) = casimir_check(&c, &lp_anchor(g))? {
        return Err(Error::InvalidConstants(format!(
            "Killing Casimir {c} is not a Casimir: {w}"
        )));
    }
    Ok(KillingCasimir::Casimir(c))
}

/// `X_C = P dC` vanishes.
pub fn casimir_check(c: &Polynomial, p: &PartialAnchor) -> Result<Verdict> {
    let x = hamiltonian_field(c, p)?;
    Ok(match x.first_nonzero() {
        None => Verdict::Pass,
        Some(_) => Verdict::fail("X_C", &x),
    })
}

/// Chain `H_0, ..., H_d` from `H_lambda(m) = C(m0 + lambda m)` with the
/// pencil `P + lambda Q`, `P` frozen at `m0` and `Q` Lie-Poisson.
#[derive(Debug, Clone)]
pub struct MagriChain {
    pub hamiltonians: Vec<Polynomial>,
    pub frozen: PartialAnchor,
    pub lie_poisson: PartialAnchor,
    /// Link `k`: `P dH_k + Q dH_{k-1} = 0` (`k = 0`: `P dH_0 = 0`; the top
    /// link `Q dH_deg = 0` is labelled `deg + 1`).
    pub links: Vec<(usize, Verdict)>,
    /// `{H_i, H_j}` under `P` then `Q`.
    pub involutivity: Vec<(usize, usize, Verdict)>,
    /// `[X_{H_i}, X_{H_j}]` under `P` then `Q`.
    pub commuting_fields: Vec<(usize, usize, Verdict)>,
    /// `(P + lambda Q) dH_lambda` vanishes in `(x, lambda)`.
    pub pencil_identity: Verdict,
    /// Set when the requested depth exceeded `deg C`.
    pub notice: Option<String>,
}

impl MagriChain {
    pub fn verdict(&self) -> Verdict {
        let mut all = vec![self.pencil_identity.clone()];
        all.extend(self.links.iter().map(|(_, v)| v.clone()));
        all.extend(self.involutivity.iter().map(|(_, _, v)| v.clone()));
        all.extend(self.commuting_fields.iter().map(|(_, _, v)| v.clone()));
        Verdict::all(all)
    }
}

fn drop_params(p: &Polynomial, base: &Arc<VarSpace>) -> Result<Polynomial> {
    let images: Vec<Polynomial> = (0..p.space().nvars())
        .map(|i| {
            if i < base.dim() {
                Polynomial::var(base, i)
            } else {
                Polynomial::zero(base)
            }
        })
        .collect();
    p.substitute(&images)
}

fn field_verdict(label: String, v: &VecField) -> Verdict {
    if v.is_zero() {
        Verdict::Pass
    } else {
        Verdict::fail(label, v)
    }
}

/// Argument translation at `m0`. Errors if `C` is not a Casimir of the
/// Lie-Poisson anchor.
pub fn argument_translation_chain(
    g: &LieAlgebraSpec,
    m0: &[Rational],
    c: &Polynomial,
    depth: usize,
) -> Result<MagriChain> {
    let q = lp_anchor(g);
    let space = q.space().clone();
    let c = c.embed(&space)?;
    if let Verdict::Fail(w) = casimir_check(&c, &q)? {
        return Err(Error::Precondition(format!(
            "not a Casimir of the Lie-Poisson anchor: {w}"
        )));
    }
    let p = frozen_anchor(g, m0)?;
    let ext = space.adjoin_params(&["lambda"])?;
    let lam = Polynomial::var(&ext, ext.nvars() - 1);
    let shifted: Vec<Polynomial> = (0..space.nvars())
        .map(|i| Polynomial::constant(&ext, m0[i].clone()) + &(&lam * &Polynomial::var(&ext, i)))
        .collect();
    let h_lambda = c.substitute(&shifted)?;
    let all: Vec<Polynomial> = h_lambda
        .coefficients_in(ext.nvars() - 1)
        .iter()
        .map(|h| drop_params(h, &space))
        .collect::<Result<_>>()?;
    let deg = c.degree().unwrap_or(0) as usize;
    let mut all = all;
    all.resize(deg + 1, Polynomial::zero(&space));
    let notice = (depth > deg).then(|| {
        format!("requested depth {depth} exceeds deg C = {deg}; chain terminates at H_{deg}")
    });
    let d = depth.min(deg);
    let hams: Vec<Polynomial> = all[..=d].to_vec();

    let pd = |a: &PartialAnchor, h: &Polynomial| a.apply(&OneForm::differential(h));
    let mut links = Vec::new();
    links.push((0, field_verdict("P dH_0".into(), &pd(&p, &hams[0])?)));
    for k in 1..=d {
        let v = pd(&p, &hams[k])?.add(&pd(&q, &hams[k - 1])?);
        links.push((k, field_verdict(format!("P dH_{k} + Q dH_{}", k - 1), &v)));
    }
    if d == deg {
        links.push((
            deg + 1,
            field_verdict(format!("Q dH_{deg}"), &pd(&q, &hams[deg])?),
        ));
    }

    let mut involutivity = Vec::new();
    let mut commuting_fields = Vec::new();
    for i in 0..hams.len() {
        for j in i + 1..hams.len() {
            for (name, a) in [("P", &p), ("Q", &q)] {
                let b = partial_bracket(&hams[i], &hams[j], a)?;
                involutivity.push((
                    i,
                    j,
                    if b.is_zero() {
                        Verdict::Pass
                    } else {
                        Verdict::fail(format!("{{H_{i}, H_{j}}}_{name}"), b)
                    },
                ));
                let xi = hamiltonian_field(&hams[i], a)?;
                let xj = hamiltonian_field(&hams[j], a)?;
                commuting_fields.push((
                    i,
                    j,
                    field_verdict(format!("[X_H{i}, X_H{j}]_{name}"), &lie_bracket(&xi, &xj)?),
                ));
            }
        }
    }

    let pencil = p.embed(&ext)?.add(&q.embed(&ext)?.scale(&lam))?;
    let total = pencil.apply(&OneForm::differential(&h_lambda))?;
    let pencil_identity = field_verdict("(P + lambda Q) dH_lambda".into(), &total);

    Ok(MagriChain {
        hamiltonians: hams,
        frozen: p,
        lie_poisson: q,
        links,
        involutivity,
        commuting_fields,
        pencil_identity,
        notice,
    })
}

/// `1/2 |x|^2` on the standard space of dimension `n`.
pub fn half_norm_squared(n: usize) -> Polynomial {
    let space = VarSpace::standard(n);
    let mut c = Polynomial::zero(&space);
    for i in 0..n {
        c += &Polynomial::var(&space, i).pow(2);
    }
    c.scale(&Rational::new(1.into(), 2.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{frac, parse_polynomial};
    use crate::schouten::{is_compatible, is_poisson, mixed_schouten};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn lp_examples() {
        let p = lp_anchor(&LieAlgebraSpec::so3()).to_bivector().unwrap();
        let s = p.space().clone();
        assert_eq!(p.entry(0, 1), &parse_polynomial(&s, "x3").unwrap());
        assert_eq!(p.entry(1, 2), &parse_polynomial(&s, "x1").unwrap());
        assert_eq!(p.entry(2, 0), &parse_polynomial(&s, "x2").unwrap());
        assert!(lp_anchor(&LieAlgebraSpec::abelian(4))
            .to_bivector()
            .unwrap()
            .is_zero());
        assert!(is_poisson(&lp_anchor(&LieAlgebraSpec::sl2())).is_pass());
        assert!(is_poisson(&lp_anchor(&LieAlgebraSpec::heisenberg())).is_pass());
    }

    #[test]
    fn jacobi_of_constants_matches_jacobiator() {
        for g in [LieAlgebraSpec::so3(), LieAlgebraSpec::sl2()] {
            assert!(g.jacobi_violation().is_none());
            // keep antisymmetry, break Jacobi
            let bad = g.with_constant(0, 1, 0, rat(1));
            assert!(bad.jacobi_violation().is_some());
            assert!(is_poisson(&lp_anchor(&bad)).is_fail());
            assert!(LieAlgebraSpec::new(bad.constants().to_vec()).is_err());
        }
    }

    #[test]
    fn invalid_entries() {
        assert!(LieAlgebraSpec::from_entries(3, &[(0, 0, 1, rat(1))]).is_err());
        assert!(LieAlgebraSpec::from_entries(3, &[(0, 1, 2, rat(1)), (1, 0, 2, rat(1))]).is_err());
        assert!(LieAlgebraSpec::from_entries(3, &[(0, 1, 2, rat(1)), (1, 0, 2, rat(-1))]).is_ok());
        assert!(LieAlgebraSpec::from_entries(2, &[(0, 1, 2, rat(1))]).is_err());
    }

    #[test]
    fn frozen_examples() {
        let g = LieAlgebraSpec::so3();
        let f = frozen_anchor(&g, &q(&[0, 0, 1]))
            .unwrap()
            .to_bivector()
            .unwrap();
        assert_eq!(f.entry(0, 1).constant_term(), rat(1));
        assert!(f.entry(1, 2).is_zero() && f.entry(0, 2).is_zero());
        assert!(frozen_anchor(&g, &q(&[0, 0, 0]))
            .unwrap()
            .to_bivector()
            .unwrap()
            .is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let m0: Vec<Rational> = (0..3)
                .map(|_| frac(rng.random_range(-9..=9), rng.random_range(1..=5)))
                .collect();
            for g in [LieAlgebraSpec::so3(), LieAlgebraSpec::sl2()] {
                let (lp, fr) = (lp_anchor(&g), frozen_anchor(&g, &m0).unwrap());
                assert!(mixed_schouten(&lp, &fr).unwrap().is_zero());
                assert!(is_compatible(&lp, &fr).unwrap().is_pass());
            }
        }
    }

    #[test]
    fn cocycles() {
        let ab = LieAlgebraSpec::abelian(3);
        let w = CocycleForm::new(vec![q(&[0, 1, 0]), q(&[-1, 0, 2]), q(&[0, -2, 0])]).unwrap();
        assert!(cocycle_check(&ab, &w).unwrap().is_pass());
        assert_eq!(coboundary_solve(&ab, &w).unwrap(), None);
        assert!(coboundary_solve(&ab, &CocycleForm::zero(3))
            .unwrap()
            .is_some());

        let so3 = LieAlgebraSpec::so3();
        let w = CocycleForm::coboundary(&so3, &q(&[0, 0, 1]));
        assert!(cocycle_check(&so3, &w).unwrap().is_pass());
        assert_eq!(coboundary_solve(&so3, &w).unwrap(), Some(q(&[0, 0, 1])));

        let h = LieAlgebraSpec::heisenberg();
        let w = CocycleForm::new(vec![q(&[0, 1, 0]), q(&[-1, 0, 0]), q(&[0, 0, 0])]).unwrap();
        assert!(cocycle_check(&h, &w).unwrap().is_pass());
        let beta = coboundary_solve(&h, &w).unwrap().unwrap();
        assert_eq!(beta[2], rat(1));
        assert!(is_poisson(&modified_anchor(&h, &w).unwrap()).is_pass());
    }

    #[test]
    fn non_cocycle_is_rejected() {
        // [e1,e2] = e2, [e1,e3] = e3 with w = e2 ^ e3: cyclic sum 2
        let g = LieAlgebraSpec::from_entries(3, &[(0, 1, 1, rat(1)), (0, 2, 2, rat(1))]).unwrap();
        let w = CocycleForm::new(vec![q(&[0, 0, 0]), q(&[0, 0, 1]), q(&[0, -1, 0])]).unwrap();
        let v = cocycle_check(&g, &w).unwrap();
        assert_eq!(v.witness().unwrap().location, "(1, 2, 3)");
        assert!(modified_anchor(&g, &w).is_err());
    }

    #[test]
    fn coboundary_is_a_translation() {
        let g = LieAlgebraSpec::so3();
        let beta = vec![frac(1, 2), rat(-3), rat(2)];
        let w = CocycleForm::coboundary(&g, &beta);
        let m = modified_anchor(&g, &w).unwrap().to_bivector().unwrap();
        let lp = lp_anchor(&g).to_bivector().unwrap();
        let s = lp.space().clone();
        let shift: Vec<Polynomial> = (0..3)
            .map(|i| Polynomial::var(&s, i) + &Polynomial::constant(&s, beta[i].clone()))
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.entry(i, j), &lp.entry(i, j).substitute(&shift).unwrap());
            }
        }
        assert_eq!(
            modified_anchor(&g, &CocycleForm::zero(3)).unwrap(),
            lp_anchor(&g)
        );
    }

    /// Floating-point trace oracle for the Killing form.
    fn killing_oracle(g: &LieAlgebraSpec) -> Vec<Vec<f64>> {
        let n = g.dim();
        let c =
            |i: usize, j: usize, k: usize| crate::polycore::rational_to_f64(g.constant(i, j, k));
        let mut k = vec![vec![0.0; n]; n];
        for (x, row) in k.iter_mut().enumerate() {
            for (y, out) in row.iter_mut().enumerate() {
                // trace(ad_x ad_y) = sum_l (ad_x ad_y e_l)_l
                for l in 0..n {
                    let mid: Vec<f64> = (0..n).map(|m| c(y, l, m)).collect();
                    *out += (0..n).map(|m| mid[m] * c(x, m, l)).sum::<f64>();
                }
            }
        }
        k
    }

    #[test]
    fn killing_forms() {
        for g in [
            LieAlgebraSpec::so3(),
            LieAlgebraSpec::sl2(),
            LieAlgebraSpec::heisenberg(),
        ] {
            let k = killing_form(&g);
            let o = killing_oracle(&g);
            for i in 0..3 {
                for j in 0..3 {
                    assert_eq!(crate::polycore::rational_to_f64(&k[i][j]), o[i][j]);
                }
            }
        }
        let k = killing_form(&LieAlgebraSpec::so3());
        assert_eq!(k, vec![q(&[-2, 0, 0]), q(&[0, -2, 0]), q(&[0, 0, -2])]);
        let c = killing_casimir(&LieAlgebraSpec::so3()).unwrap();
        let s = VarSpace::standard(3);
        assert_eq!(
            c.casimir().unwrap(),
            &parse_polynomial(&s, "-1/4*(x1^2 + x2^2 + x3^2)").unwrap()
        );
        let c = killing_casimir(&LieAlgebraSpec::sl2()).unwrap();
        assert_eq!(
            c.casimir().unwrap(),
            &parse_polynomial(&s, "1/16*(x1^2 + 4*x2*x3)").unwrap()
        );
        assert_eq!(
            killing_casimir(&LieAlgebraSpec::abelian(3)).unwrap(),
            KillingCasimir::Degenerate { rank: 0 }
        );
        assert!(matches!(
            killing_casimir(&LieAlgebraSpec::heisenberg()).unwrap(),
            KillingCasimir::Degenerate { .. }
        ));
    }

    #[test]
    fn casimir_checks() {
        let so3 = lp_anchor(&LieAlgebraSpec::so3());
        let s = so3.space().clone();
        assert!(casimir_check(&Polynomial::constant(&s, rat(5)), &so3)
            .unwrap()
            .is_pass());
        assert!(casimir_check(&half_norm_squared(3), &so3)
            .unwrap()
            .is_pass());
        let s2 = VarSpace::standard(2);
        let can = PartialAnchor::from_bivector(&Bivector::canonical(&s2).unwrap());
        let v = casimir_check(&Polynomial::var(&s2, 0), &can).unwrap();
        assert_eq!(
            v.witness().unwrap().value,
            VecField::coordinate(&s2, 1).to_string()
        );
    }

    #[test]
    fn so3_chain() {
        let g = LieAlgebraSpec::so3();
        let ch = argument_translation_chain(&g, &q(&[0, 0, 1]), &half_norm_squared(3), 5).unwrap();
        let s = ch.lie_poisson.space().clone();
        assert_eq!(ch.hamiltonians.len(), 3);
        assert_eq!(ch.hamiltonians[0], Polynomial::constant(&s, frac(1, 2)));
        assert_eq!(ch.hamiltonians[1], Polynomial::var(&s, 2));
        assert_eq!(ch.hamiltonians[2], half_norm_squared(3));
        assert!(ch.notice.is_some());
        assert!(ch.verdict().is_pass(), "{}", ch.verdict());
        assert_eq!(ch.links.len(), 4);
    }

    #[test]
    fn sl2_and_abelian_chains() {
        let g = LieAlgebraSpec::sl2();
        let c = killing_casimir(&g).unwrap().casimir().unwrap().clone();
        let ch = argument_translation_chain(&g, &[frac(3, 2), rat(-1), rat(2)], &c, 2).unwrap();
        assert!(ch.notice.is_none());
        assert!(ch.verdict().is_pass(), "{}", ch.verdict());
        let ab = LieAlgebraSpec::abelian(2);
        let ch = argument_translation_chain(&ab, &q(&[1, 1]), &half_norm_squared(2), 2).unwrap();
        assert!(ch.verdict().is_pass());
    }

    #[test]
    fn chain_rejects_non_casimir() {
        let g = LieAlgebraSpec::so3();
        let s = VarSpace::standard(3);
        assert!(
            argument_translation_chain(&g, &q(&[0, 0, 1]), &Polynomial::var(&s, 0), 2).is_err()
        );
    }
}
