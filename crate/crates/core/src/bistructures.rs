//! Poisson-Nijenhuis and Poisson-symplectic pairs: Nijenhuis torsion, the
//! two PN conditions, hierarchies `N^k P`, and the closedness conditions of
//! a `P Omega` pair with its recursion operator.

use crate::error::{Error, Result};
use crate::fields::{
    apply_oneone, apply_oneone_transpose, apply_twoform, d_twoform, lie_bracket,
    lie_derivative_oneform, lie_derivative_oneone, OneOneTensor, TwoForm, VecField,
};
use crate::partial::PartialAnchor;
use crate::polycore::{Polynomial, Rational};
use crate::schouten::{is_poisson, mixed_schouten};
use crate::verdict::Verdict;

/// `T(N)(d_i, d_j)` for `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Torsion {
    dim: usize,
    entries: Vec<((usize, usize), VecField)>,
}

impl Torsion {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[((usize, usize), VecField)] {
        &self.entries
    }

    /// Entry on `(d_i, d_j)` with the antisymmetric sign.
    pub fn get(&self, i: usize, j: usize) -> Option<VecField> {
        let (a, b, neg) = if i < j { (i, j, false) } else { (j, i, true) };
        let v = self.entries.iter().find(|(k, _)| *k == (a, b))?.1.clone();
        Some(if neg {
            v.scale_rational(&Rational::from_integer((-1).into()))
        } else {
            v
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<&((usize, usize), VecField)> {
        self.entries.iter().find(|(_, v)| !v.is_zero())
    }

    pub fn verdict(&self) -> Verdict {
        match self.first_nonzero() {
            None => Verdict::Pass,
            Some(((i, j), v)) => Verdict::fail(format!("torsion (d{}, d{})", i + 1, j + 1), v),
        }
    }
}

/// `T(N)(X, Y) = [NX, NY] - N([NX, Y] + [X, NY] - N[X, Y])`.
pub fn torsion_on(n: &OneOneTensor, x: &VecField, y: &VecField) -> Result<VecField> {
    let nx = apply_oneone(n, x)?;
    let ny = apply_oneone(n, y)?;
    let nxy = apply_oneone(n, &lie_bracket(x, y)?)?;
    let inner = lie_bracket(&nx, y)?.add(&lie_bracket(x, &ny)?).sub(&nxy);
    Ok(lie_bracket(&nx, &ny)?.sub(&apply_oneone(n, &inner)?))
}

/// Same value through Lie derivatives of `N`:
/// `(L_{NX} N)(Y) - N((L_X N)(Y))`.
pub fn torsion_from_lie_derivatives(
    n: &OneOneTensor,
    x: &VecField,
    y: &VecField,
) -> Result<VecField> {
    let nx = apply_oneone(n, x)?;
    let a = apply_oneone(&lie_derivative_oneone(&nx, n)?, y)?;
    let b = apply_oneone(n, &apply_oneone(&lie_derivative_oneone(x, n)?, y)?)?;
    Ok(a.sub(&b))
}

/// Torsion on coordinate fields. Coordinate fields commute, so
/// `T(d_i, d_j) = [N d_i, N d_j] - N([N d_i, d_j] + [d_i, N d_j])`.
pub fn torsion(n: &OneOneTensor) -> Torsion {
    let space = n.space();
    let dim = space.dim();
    let cols: Vec<VecField> = (0..dim).map(|j| n.column(j)).collect();
    let coords: Vec<VecField> = (0..dim).map(|j| VecField::coordinate(space, j)).collect();
    let mut entries = Vec::new();
    for i in 0..dim {
        for j in i + 1..dim {
            let br = |a: &VecField, b: &VecField| lie_bracket(a, b).expect("same space");
            let inner = br(&cols[i], &coords[j]).add(&br(&coords[i], &cols[j]));
            let v = br(&cols[i], &cols[j]).sub(&apply_oneone(n, &inner).expect("same space"));
            entries.push(((i, j), v));
        }
    }
    Torsion { dim, entries }
}

/// Outcome of the three PN checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnReport {
    pub torsion: Verdict,
    /// `N P = P N^t` on `E♭`.
    pub ppn1: Verdict,
    /// The concomitant `R(P, N)` vanishes on generators.
    pub ppn2: Verdict,
}

impl PnReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::all([self.torsion.clone(), self.ppn1.clone(), self.ppn2.clone()])
    }

    pub fn is_pass(&self) -> bool {
        self.verdict().is_pass()
    }
}

/// `N^t theta_a` in `E♭` coordinates for every `a`, or the first `a` that
/// leaves `E♭`.
fn transpose_on_coflat(
    p: &PartialAnchor,
    n: &OneOneTensor,
) -> std::result::Result<Vec<VecField>, Verdict> {
    let basis = p.basis();
    let mut out = Vec::with_capacity(basis.len());
    for a in 0..basis.len() {
        let nt = apply_oneone_transpose(n, &basis.covector(a)).expect("same space");
        match p.apply(&nt) {
            Ok(v) => out.push(v),
            Err(_) => {
                return Err(Verdict::fail(
                    format!("N^t does not preserve E♭ at theta_{}", a + 1),
                    nt,
                ))
            }
        }
    }
    Ok(out)
}

/// `N(P theta_a) - P(N^t theta_a)` for every generator.
pub fn check_ppn1(p: &PartialAnchor, n: &OneOneTensor) -> Verdict {
    let pnt = match transpose_on_coflat(p, n) {
        Ok(v) => v,
        Err(v) => return v,
    };
    for (a, rhs) in pnt.iter().enumerate() {
        let lhs = apply_oneone(n, p.image(a)).expect("same space");
        let diff = lhs.sub(rhs);
        if !diff.is_zero() {
            return Verdict::fail(format!("pPN1 at theta_{}", a + 1), diff);
        }
    }
    Verdict::Pass
}

/// `R(P, N)(theta_a, P theta_b) = (L_{P theta_a} N)(X) - P(L_X(N^t theta_a) - L_{NX} theta_a)`.
pub fn concomitant(p: &PartialAnchor, n: &OneOneTensor, a: usize, b: usize) -> Result<VecField> {
    let basis = p.basis();
    let theta = basis.covector(a);
    let x = p.image(b);
    let first = apply_oneone(&lie_derivative_oneone(p.image(a), n)?, x)?;
    let nt = apply_oneone_transpose(n, &theta)?;
    let nx = apply_oneone(n, x)?;
    let form = lie_derivative_oneform(x, &nt)?.sub(&lie_derivative_oneform(&nx, &theta)?);
    let second = p.apply(&form).map_err(|_| {
        Error::NotInCoflat(format!(
            "L_X(N^t theta_{a1}) - L_(NX) theta_{a1} = {form} with X = P theta_{b1}",
            a1 = a + 1,
            b1 = b + 1
        ))
    })?;
    Ok(first.sub(&second))
}

fn check_ppn2(p: &PartialAnchor, n: &OneOneTensor) -> Verdict {
    let k = p.basis().len();
    for a in 0..k {
        for b in 0..k {
            match concomitant(p, n, a, b) {
                Ok(r) if r.is_zero() => {}
                Ok(r) => {
                    return Verdict::fail(format!("R(P,N)(theta_{}, P theta_{})", a + 1, b + 1), r)
                }
                Err(e) => return Verdict::fail(format!("R(P,N) not defined: {e}"), "outside E♭"),
            }
        }
    }
    Verdict::Pass
}

/// All PN conditions for `(P, N)`. Errors if `P` is not Poisson.
pub fn check_pn(p: &PartialAnchor, n: &OneOneTensor) -> Result<PnReport> {
    if let Verdict::Fail(w) = is_poisson(p) {
        return Err(Error::NotPoisson(format!("{}: {}", w.location, w.value)));
    }
    if n.space() != p.space() {
        return Err(Error::SpaceMismatch(
            "anchor and N on different spaces".into(),
        ));
    }
    Ok(PnReport {
        torsion: torsion(n).verdict(),
        ppn1: check_ppn1(p, n),
        ppn2: check_ppn2(p, n),
    })
}

/// A pair that passed every PN check.
#[derive(Debug, Clone)]
pub struct PnStructure {
    anchor: PartialAnchor,
    nijenhuis: OneOneTensor,
}

impl PnStructure {
    pub fn new(anchor: PartialAnchor, nijenhuis: OneOneTensor) -> Result<Self> {
        let report = check_pn(&anchor, &nijenhuis)?;
        if let Verdict::Fail(w) = report.verdict() {
            return Err(Error::Precondition(format!("not a PN pair: {w}")));
        }
        Ok(PnStructure { anchor, nijenhuis })
    }

    /// Skip the PN checks; for feeding known-bad pairs to later conditions.
    pub fn unchecked(anchor: PartialAnchor, nijenhuis: OneOneTensor) -> Self {
        PnStructure { anchor, nijenhuis }
    }

    pub fn anchor(&self) -> &PartialAnchor {
        &self.anchor
    }

    pub fn nijenhuis(&self) -> &OneOneTensor {
        &self.nijenhuis
    }
}

#[derive(Debug, Clone)]
pub struct PnHierarchy {
    /// `P_0 = P, P_1 = NP, ..., P_d`.
    pub anchors: Vec<PartialAnchor>,
    /// `(i, j, [P_i, P_j] = 0)` for `i < j`, plus each `P_k` Poisson as `(k, k, ..)`.
    pub compatibility: Vec<(usize, usize, Verdict)>,
}

impl PnHierarchy {
    pub fn verdict(&self) -> Verdict {
        Verdict::all(self.compatibility.iter().map(|(_, _, v)| v.clone()))
    }
}

/// `P_k = N^k P` up to `depth`, with pairwise compatibility.
pub fn pn_hierarchy(pn: &PnStructure, depth: usize) -> Result<PnHierarchy> {
    let p = pn.anchor();
    let n = pn.nijenhuis();
    let mut anchors = vec![p.clone()];
    for k in 1..=depth {
        let prev = &anchors[k - 1];
        let images = prev
            .images()
            .iter()
            .map(|v| apply_oneone(n, v))
            .collect::<Result<Vec<_>>>()?;
        let pk = PartialAnchor::new(p.basis().clone(), images)?;
        if let Verdict::Fail(w) = crate::partial::check_partial_antisymmetry(&pk) {
            return Err(Error::Precondition(format!(
                "P_{k} = N^{k} P not antisymmetric at {}: {} (pPN1 violated upstream)",
                w.location, w.value
            )));
        }
        anchors.push(pk);
    }
    let mut compatibility = Vec::new();
    for i in 0..anchors.len() {
        compatibility.push((i, i, is_poisson(&anchors[i])));
        for j in i + 1..anchors.len() {
            let m = mixed_schouten(&anchors[i], &anchors[j])?;
            let v = match m.first_nonzero() {
                None => Verdict::Pass,
                Some((t, val)) => Verdict::fail(
                    format!("[P_{i}, P_{j}] ({}, {}, {})", t.0 + 1, t.1 + 1, t.2 + 1),
                    val,
                ),
            };
            compatibility.push((i, j, v));
        }
    }
    Ok(PnHierarchy {
        anchors,
        compatibility,
    })
}

/// Enumerate `N` with entries `c + sum_k b_k x_k`, all coefficients drawn from
/// `values`, and keep those forming a PN pair with `p`. Constant scalar
/// multiples of the identity are skipped. Stops after `limit` hits.
pub fn search_linear_pn(
    p: &PartialAnchor,
    values: &[i64],
    limit: usize,
) -> Result<Vec<OneOneTensor>> {
    let space = p.space().clone();
    let n = space.dim();
    let per_entry = n + 1;
    let total_slots = n * n * per_entry;
    let base = values.len();
    let count = base
        .checked_pow(total_slots as u32)
        .ok_or_else(|| Error::Precondition("search space too large".into()))?;
    let mut found = Vec::new();
    let mut digits = vec![0usize; total_slots];
    for _ in 0..count {
        let m: Vec<Vec<Polynomial>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let off = (i * n + j) * per_entry;
                        let mut e = Polynomial::constant(
                            &space,
                            Rational::from_integer(values[digits[off]].into()),
                        );
                        for k in 0..n {
                            let c = values[digits[off + 1 + k]];
                            if c != 0 {
                                e += &Polynomial::var(&space, k)
                                    .scale(&Rational::from_integer(c.into()));
                            }
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        let cand = OneOneTensor::new(&space, m)?;
        let scalar_constant = cand.is_constant()
            && (0..n).all(|i| (0..n).all(|j| i == j || cand.entry(i, j).is_zero()))
            && (1..n).all(|i| cand.entry(i, i) == cand.entry(0, 0));
        if !scalar_constant
            && check_ppn1(p, &cand).is_pass()
            && torsion(&cand).is_zero()
            && check_ppn2(p, &cand).is_pass()
        {
            found.push(cand);
            if found.len() >= limit {
                break;
            }
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < base {
                break;
            }
            *d = 0;
        }
    }
    Ok(found)
}

/// `(Omega P Omega)(X, Y) = <Omega(P(Omega X)), Y>` on coordinate fields.
pub fn composite_two_form(p: &PartialAnchor, omega: &TwoForm) -> Result<TwoForm> {
    let n = recursion_operator_unchecked(p, omega)?;
    let space = p.space();
    let dim = space.dim();
    let rows = (0..dim)
        .map(|i| {
            let w = apply_twoform(omega, &n.column(i))?;
            Ok(w.comps().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    TwoForm::new(space, rows)
}

fn recursion_operator_unchecked(p: &PartialAnchor, omega: &TwoForm) -> Result<OneOneTensor> {
    let space = p.space();
    let cols = (0..space.dim())
        .map(|j| {
            let w = apply_twoform(omega, &VecField::coordinate(space, j))?;
            p.apply(&w).map_err(|_| {
                Error::NotInCoflat(format!("Omega not T♭-valued: Omega(d{}) = {w}", j + 1))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    OneOneTensor::from_columns(space, &cols)
}

/// `d Omega = 0` and `d(Omega P Omega) = 0`.
///
/// Errors if `P` is not Poisson or some `Omega(d_i)` leaves `E♭`.
pub fn check_pomega(p: &PartialAnchor, omega: &TwoForm) -> Result<Verdict> {
    if let Verdict::Fail(w) = is_poisson(p) {
        return Err(Error::NotPoisson(format!("{}: {}", w.location, w.value)));
    }
    if omega.space() != p.space() {
        return Err(Error::SpaceMismatch(
            "anchor and Omega on different spaces".into(),
        ));
    }
    let label = |t: (usize, usize, usize)| format!("({}, {}, {})", t.0 + 1, t.1 + 1, t.2 + 1);
    if let Some((t, v)) = d_twoform(omega).first_nonzero() {
        return Ok(Verdict::fail(format!("d Omega {}", label(t)), v));
    }
    let composite = composite_two_form(p, omega)?;
    if let Some((t, v)) = d_twoform(&composite).first_nonzero() {
        return Ok(Verdict::fail(format!("d(Omega P Omega) {}", label(t)), v));
    }
    Ok(Verdict::Pass)
}

/// A pair that passed `check_pomega`.
#[derive(Debug, Clone)]
pub struct POmegaStructure {
    anchor: PartialAnchor,
    omega: TwoForm,
}

impl POmegaStructure {
    pub fn new(anchor: PartialAnchor, omega: TwoForm) -> Result<Self> {
        if let Verdict::Fail(w) = check_pomega(&anchor, &omega)? {
            return Err(Error::Precondition(format!("not a P-Omega pair: {w}")));
        }
        Ok(POmegaStructure { anchor, omega })
    }

    pub fn anchor(&self) -> &PartialAnchor {
        &self.anchor
    }

    pub fn omega(&self) -> &TwoForm {
        &self.omega
    }

    pub fn recursion_operator(&self) -> OneOneTensor {
        recursion_operator_unchecked(&self.anchor, &self.omega).expect("checked on construction")
    }
}

/// `N = P o Omega`, column `j` being `P(Omega d_j)`. Requires a passing
/// `check_pomega`.
pub fn recursion_operator(p: &PartialAnchor, omega: &TwoForm) -> Result<OneOneTensor> {
    Ok(POmegaStructure::new(p.clone(), omega.clone())?.recursion_operator())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Bivector;
    use crate::partial::CoflatBasis;
    use crate::polycore::{parse_polynomial, VarSpace};

    fn canonical(n: usize) -> PartialAnchor {
        PartialAnchor::from_bivector(&Bivector::canonical(&VarSpace::standard(n)).unwrap())
    }

    fn so3() -> PartialAnchor {
        let s = VarSpace::standard(3);
        PartialAnchor::from_bivector(
            &Bivector::from_upper(&s, &[(0, 1, "x3"), (1, 2, "x1"), (0, 2, "-x2")]).unwrap(),
        )
    }

    #[test]
    fn torsion_examples() {
        let s = VarSpace::standard(2);
        let c = OneOneTensor::parse(&s, &[&["1", "2"], &["-3", "1/2"]]).unwrap();
        assert!(torsion(&c).is_zero());
        let d = OneOneTensor::diagonal(&s, &["x1", "x2"]).unwrap();
        assert!(torsion(&d).is_zero());
        // N^1_2 = x2: N d1 = 0, N d2 = x2 d1, [0, .] = 0, N([0,d2] + [d1, x2 d1]) = 0
        let u = OneOneTensor::parse(&s, &[&["0", "x2"], &["0", "0"]]).unwrap();
        assert!(torsion(&u).is_zero());
        let s3 = VarSpace::standard(3);
        let bad = OneOneTensor::parse(
            &s3,
            &[&["0", "x3", "0"], &["0", "0", "0"], &["0", "0", "x1"]],
        )
        .unwrap();
        let t = torsion(&bad);
        assert!(!t.is_zero());
        assert!(t.verdict().is_fail());
    }

    #[test]
    fn torsion_formulas_agree() {
        let s = VarSpace::standard(3);
        let n = OneOneTensor::parse(
            &s,
            &[&["x2", "x3", "0"], &["1", "x1^2", "0"], &["0", "x2", "x1"]],
        )
        .unwrap();
        let x = VecField::parse(&s, &["x1*x2", "1", "x3"]).unwrap();
        let y = VecField::parse(&s, &["0", "x3^2", "x1 - 2"]).unwrap();
        assert_eq!(
            torsion_on(&n, &x, &y).unwrap(),
            torsion_from_lie_derivatives(&n, &x, &y).unwrap()
        );
        let t = torsion(&n);
        let d = |i| VecField::coordinate(&s, i);
        assert_eq!(t.get(0, 2).unwrap(), torsion_on(&n, &d(0), &d(2)).unwrap());
        assert_eq!(t.get(2, 0).unwrap(), torsion_on(&n, &d(2), &d(0)).unwrap());
    }

    #[test]
    fn identity_is_always_pn() {
        for p in [so3(), canonical(2), canonical(4)] {
            let id = OneOneTensor::identity(p.space());
            assert!(check_pn(&p, &id).unwrap().is_pass());
            for a in 0..p.basis().len() {
                for b in 0..p.basis().len() {
                    assert!(concomitant(&p, &id, a, b).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn plane_pn_pairs() {
        let p = canonical(2);
        let s = p.space().clone();
        let c = OneOneTensor::diagonal(&s, &["5", "5"]).unwrap();
        assert!(check_pn(&p, &c).unwrap().is_pass());
        let f = OneOneTensor::scalar(&parse_polynomial(&s, "x1^2 + x2").unwrap());
        assert!(check_pn(&p, &f).unwrap().is_pass());
        // diag(x1, x2) is Nijenhuis but N P != P N^t
        let d = OneOneTensor::diagonal(&s, &["x1", "x2"]).unwrap();
        let r = check_pn(&p, &d).unwrap();
        assert!(r.torsion.is_pass());
        assert!(r.ppn1.is_fail());
    }

    #[test]
    fn non_poisson_is_an_error() {
        let s = VarSpace::standard(3);
        let h = PartialAnchor::from_bivector(
            &Bivector::from_upper(&s, &[(1, 2, "x2"), (0, 2, "-x3"), (0, 1, "x1")]).unwrap(),
        );
        assert!(check_pn(&h, &OneOneTensor::identity(&s)).is_err());
    }

    #[test]
    fn transpose_leaving_coflat_fails_ppn1() {
        let s = VarSpace::standard(3);
        let basis = CoflatBasis::coordinates(&s, &[0, 1]).unwrap();
        let p = PartialAnchor::new(
            basis,
            vec![
                VecField::parse(&s, &["0", "1", "0"]).unwrap(),
                VecField::parse(&s, &["-1", "0", "0"]).unwrap(),
            ],
        )
        .unwrap();
        let n = OneOneTensor::parse(&s, &[&["1", "0", "1"], &["0", "1", "0"], &["0", "0", "1"]])
            .unwrap();
        let v = check_ppn1(&p, &n);
        assert!(v.witness().unwrap().location.contains("does not preserve"));
    }

    #[test]
    fn hierarchies() {
        let p = so3();
        let two = OneOneTensor::scalar(&Polynomial::constant(
            p.space(),
            Rational::from_integer(2.into()),
        ));
        let h = pn_hierarchy(&PnStructure::new(p.clone(), two).unwrap(), 3).unwrap();
        assert_eq!(h.anchors.len(), 4);
        assert_eq!(
            h.anchors[3],
            p.scale_rational(&Rational::from_integer(8.into()))
        );
        assert!(h.verdict().is_pass());
    }

    #[test]
    fn linear_search_finds_non_scalar() {
        let p = canonical(2);
        let found = search_linear_pn(&p, &[0, 1], 4).unwrap();
        assert!(!found.is_empty());
        for n in &found {
            assert!(check_pn(&p, n).unwrap().is_pass());
            assert!(!n.is_constant());
            let h = pn_hierarchy(&PnStructure::new(p.clone(), n.clone()).unwrap(), 2).unwrap();
            assert!(h.verdict().is_pass());
            for pk in &h.anchors {
                assert!(check_ppn1(pk, n).is_pass());
            }
        }
    }

    #[test]
    fn pomega_plane() {
        let p = canonical(2);
        let s = p.space().clone();
        let w = TwoForm::from_upper(&s, &[(0, 1, "1")]).unwrap();
        assert!(check_pomega(&p, &w).unwrap().is_pass());
        let n = recursion_operator(&p, &w).unwrap();
        let id = OneOneTensor::identity(&s);
        assert_eq!(n, id);
        let w2 = TwoForm::from_upper(&s, &[(0, 1, "1 + x1^2")]).unwrap();
        assert!(check_pomega(&p, &w2).unwrap().is_pass());
        let n2 = recursion_operator(&p, &w2).unwrap();
        assert!(torsion(&n2).is_zero());
        assert_eq!(
            n2,
            OneOneTensor::scalar(&parse_polynomial(&s, "1 + x1^2").unwrap())
        );
    }

    #[test]
    fn pomega_four_dimensional() {
        let p = canonical(4);
        let s = p.space().clone();
        let good = TwoForm::from_upper(&s, &[(0, 1, "1 + x1*x2"), (2, 3, "x3^2 + x4")]).unwrap();
        assert!(check_pomega(&p, &good).unwrap().is_pass());
        let n = recursion_operator(&p, &good).unwrap();
        assert!(!n.is_constant());
        assert!(torsion(&n).is_zero());
        let bad = TwoForm::from_upper(&s, &[(0, 1, "1 + x3"), (2, 3, "1")]).unwrap();
        let v = check_pomega(&p, &bad).unwrap();
        assert!(v.witness().unwrap().location.starts_with("d Omega"));
        assert!(recursion_operator(&p, &bad).is_err());
    }

    #[test]
    fn omega_outside_coflat_is_an_error() {
        let s = VarSpace::standard(3);
        let basis = CoflatBasis::coordinates(&s, &[0, 1]).unwrap();
        let p = PartialAnchor::new(
            basis,
            vec![
                VecField::parse(&s, &["0", "1", "0"]).unwrap(),
                VecField::parse(&s, &["-1", "0", "0"]).unwrap(),
            ],
        )
        .unwrap();
        let w = TwoForm::from_upper(&s, &[(0, 2, "1")]).unwrap();
        assert!(matches!(check_pomega(&p, &w), Err(Error::NotInCoflat(_))));
    }
}
