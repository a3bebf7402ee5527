//! Jacobiator (Schouten square) of anchors, compatibility of pairs and
//! symbolic pencils.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{lie_derivative_oneform, pairing, Antisym3, Bivector};
use crate::partial::{check_partial_antisymmetry, partial_bracket, CoflatBasis, PartialAnchor};
use crate::polycore::{frac, Polynomial, VarSpace};
use crate::verdict::Verdict;

/// `[P, P]` evaluated on triples of basis covectors of `E♭`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchoutenTensor {
    basis: CoflatBasis,
    entries: Antisym3,
}

impl SchoutenTensor {
    pub fn basis(&self) -> &CoflatBasis {
        &self.basis
    }

    /// Entry on any index triple (0-based), sign-expanded.
    pub fn get(&self, a: usize, b: usize, c: usize) -> Polynomial {
        self.entries.get(a, b, c)
    }

    pub fn entries(&self) -> &Antisym3 {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_zero()
    }

    /// First nonzero canonical entry.
    pub fn first_nonzero(&self) -> Option<((usize, usize, usize), Polynomial)> {
        self.entries.first_nonzero()
    }

    fn combine(&self, other: &Self, f: impl Fn(&Polynomial, &Polynomial) -> Polynomial) -> Self {
        let k = self.basis.len();
        let mut out = Antisym3::zero(self.entries.space(), k);
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    out.set(a, b, c, f(&self.get(a, b, c), &other.get(a, b, c)));
                }
            }
        }
        SchoutenTensor {
            basis: self.basis.clone(),
            entries: out,
        }
    }
}

fn triple_label(t: (usize, usize, usize)) -> String {
    format!("({}, {}, {})", t.0 + 1, t.1 + 1, t.2 + 1)
}

/// Section formula with constant sections `theta_a`:
/// `entry(a,b,c) = <L_{P theta_a} theta_b, P theta_c> + cyclic`.
pub fn jacobiator(p: &PartialAnchor) -> SchoutenTensor {
    let basis = p.basis().clone();
    let k = basis.len();
    let space = p.space();
    let thetas: Vec<_> = (0..k).map(|a| basis.covector(a)).collect();
    let term = |a: usize, b: usize, c: usize| -> Polynomial {
        let l = lie_derivative_oneform(p.image(a), &thetas[b]).expect("same space");
        pairing(&l, p.image(c)).expect("same space")
    };
    let mut entries = Antisym3::zero(space, k);
    for a in 0..k {
        for b in a + 1..k {
            for c in b + 1..k {
                let mut v = term(a, b, c);
                v += &term(b, c, a);
                v += &term(c, a, b);
                entries.set(a, b, c, v);
            }
        }
    }
    SchoutenTensor { basis, entries }
}

/// Coordinate form for a bivector:
/// `J^{ijk} = sum_l (P^{il} d_l P^{jk} + P^{jl} d_l P^{ki} + P^{kl} d_l P^{ij})`.
pub fn jacobiator_coordinates(p: &Bivector) -> Antisym3 {
    let space = p.space();
    let n = space.dim();
    let term = |i: usize, j: usize, k: usize| -> Polynomial {
        let mut acc = Polynomial::zero(space);
        for l in 0..n {
            let a = p.entry(i, l);
            if a.is_zero() {
                continue;
            }
            let d = p.entry(j, k).d(l);
            if !d.is_zero() {
                acc += &(a * &d);
            }
        }
        acc
    };
    let mut out = Antisym3::zero(space, n);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut v = term(i, j, k);
                v += &term(j, k, i);
                v += &term(k, i, j);
                out.set(i, j, k, v);
            }
        }
    }
    out
}

/// `{F_a, {F_b, F_c}} + cyclic` on the linear functions `F_a = theta_a . x`.
pub fn cyclic_bracket_sum(p: &PartialAnchor, a: usize, b: usize, c: usize) -> Result<Polynomial> {
    let f: Vec<Polynomial> = [a, b, c]
        .iter()
        .map(|&i| p.basis().linear_function(i))
        .collect();
    let one = |x: &Polynomial, y: &Polynomial, z: &Polynomial| -> Result<Polynomial> {
        partial_bracket(x, &partial_bracket(y, z, p)?, p)
    };
    let mut s = one(&f[0], &f[1], &f[2])?;
    s += &one(&f[1], &f[2], &f[0])?;
    s += &one(&f[2], &f[0], &f[1])?;
    Ok(s)
}

/// Partial Poisson iff antisymmetric on `E♭` and the Jacobiator vanishes.
pub fn is_poisson(p: &PartialAnchor) -> Verdict {
    match check_partial_antisymmetry(p) {
        Verdict::Pass => {}
        Verdict::Fail(w) => {
            return Verdict::fail(format!("antisymmetry {}", w.location), w.value);
        }
        other => return other,
    }
    match jacobiator(p).first_nonzero() {
        None => Verdict::Pass,
        Some((t, v)) => Verdict::fail(format!("jacobiator {}", triple_label(t)), v),
    }
}

/// Polarized bracket `[P, Q] = ([P+Q, P+Q] - [P, P] - [Q, Q]) / 2`.
pub fn mixed_schouten(p: &PartialAnchor, q: &PartialAnchor) -> Result<SchoutenTensor> {
    let sum = p.add(q)?;
    let jpq = jacobiator(&sum);
    let jp = jacobiator(p);
    let jq = jacobiator(q);
    let half = frac(1, 2);
    Ok(jpq
        .combine(&jp, |a, b| a - b)
        .combine(&jq, |a, b| (a - b).scale(&half)))
}

/// `P` and `Q` Poisson with vanishing mixed bracket.
///
/// Errors if either input is not Poisson. On pass, the sum is cross-checked
/// to be Poisson as well.
pub fn is_compatible(p: &PartialAnchor, q: &PartialAnchor) -> Result<Verdict> {
    for (name, a) in [("first", p), ("second", q)] {
        if let Verdict::Fail(w) = is_poisson(a) {
            return Err(Error::NotPoisson(format!(
                "{name} anchor fails at {}: {}",
                w.location, w.value
            )));
        }
    }
    let mixed = mixed_schouten(p, q)?;
    if let Some((t, v)) = mixed.first_nonzero() {
        return Ok(Verdict::fail(format!("[P,Q] {}", triple_label(t)), v));
    }
    let sum = jacobiator(&p.add(q)?);
    if let Some((t, v)) = sum.first_nonzero() {
        // polarization says this cannot happen once [P,Q] = 0
        return Ok(Verdict::fail(format!("[P+Q,P+Q] {}", triple_label(t)), v));
    }
    Ok(Verdict::Pass)
}

/// The pencil `P + lambda Q` (or `lambda P + mu Q`) over a space with the
/// formal parameters adjoined.
#[derive(Debug, Clone)]
pub struct SymbolicPencilAnchor {
    space: Arc<VarSpace>,
    anchor: PartialAnchor,
    params: Vec<usize>,
}

impl SymbolicPencilAnchor {
    /// `P + lambda Q`.
    pub fn one_parameter(p: &PartialAnchor, q: &PartialAnchor) -> Result<Self> {
        p.check_same_basis(q)?;
        let space = p
            .space()
            .adjoin_params(&[fresh_name(p.space(), "lambda")])?;
        let lam = space.nvars() - 1;
        let pe = p.embed(&space)?;
        let qe = q.embed(&space)?;
        let anchor = pe.add(&qe.scale(&Polynomial::var(&space, lam)))?;
        Ok(SymbolicPencilAnchor {
            space,
            anchor,
            params: vec![lam],
        })
    }

    /// `lambda P + mu Q`.
    pub fn two_parameter(p: &PartialAnchor, q: &PartialAnchor) -> Result<Self> {
        p.check_same_basis(q)?;
        let lam_name = fresh_name(p.space(), "lambda");
        let mu_name = fresh_name(p.space(), "mu");
        let space = p.space().adjoin_params(&[lam_name, mu_name])?;
        let (lam, mu) = (space.nvars() - 2, space.nvars() - 1);
        let pe = p.embed(&space)?.scale(&Polynomial::var(&space, lam));
        let qe = q.embed(&space)?.scale(&Polynomial::var(&space, mu));
        Ok(SymbolicPencilAnchor {
            anchor: pe.add(&qe)?,
            space,
            params: vec![lam, mu],
        })
    }

    pub fn anchor(&self) -> &PartialAnchor {
        &self.anchor
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    /// Variable indices of the formal parameters.
    pub fn params(&self) -> &[usize] {
        &self.params
    }

    /// Jacobiator of the pencil, a polynomial in `x` and the parameters.
    pub fn jacobiator(&self) -> SchoutenTensor {
        jacobiator(&self.anchor)
    }

    /// Zero test for all parameter values at once. The witness lists the
    /// nonzero coefficients of the first parameter in the first bad entry.
    pub fn verdict(&self) -> Verdict {
        match self.jacobiator().first_nonzero() {
            None => Verdict::Pass,
            Some((t, v)) => {
                let p0 = self.params[0];
                let name = self.space.name(p0).to_string();
                let parts: Vec<String> = v
                    .coefficients_in(p0)
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| format!("{name}^{k}: {c}"))
                    .collect();
                Verdict::fail(
                    format!(
                        "pencil jacobiator {} [{}]",
                        triple_label(t),
                        parts.join("; ")
                    ),
                    v,
                )
            }
        }
    }
}

fn fresh_name(space: &VarSpace, base: &str) -> String {
    let mut name = base.to_string();
    while space.index_of(&name).is_some() {
        name.push('_');
    }
    name
}

/// `jacobiator(P + lambda Q)` vanishes identically in `(x, lambda)`.
pub fn pencil_check(p: &PartialAnchor, q: &PartialAnchor) -> Result<Verdict> {
    Ok(SymbolicPencilAnchor::one_parameter(p, q)?.verdict())
}

/// `jacobiator(lambda P + mu Q)` vanishes identically in `(x, lambda, mu)`.
pub fn pencil_check_two(p: &PartialAnchor, q: &PartialAnchor) -> Result<Verdict> {
    Ok(SymbolicPencilAnchor::two_parameter(p, q)?.verdict())
}
