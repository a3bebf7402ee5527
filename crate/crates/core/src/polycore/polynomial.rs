use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::space::{check_same, same_space, VarSpace};
use super::{fmt_rational, rational_to_f64, Rational};
use crate::error::{Error, Result};

/// Dense exponent vector, one entry per variable of the owning space.
///
/// Ordered graded-lexicographically: higher total degree is larger, ties are
/// broken by comparing exponents from the first variable on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with rational coefficients over a [`VarSpace`].
///
/// Zero coefficients are never stored, so two polynomials are equal exactly
/// when their term maps are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    space: Arc<VarSpace>,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(space: &Arc<VarSpace>) -> Self {
        Polynomial {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(space: &Arc<VarSpace>) -> Self {
        Self::constant(space, Rational::one())
    }

    pub fn constant(space: &Arc<VarSpace>, c: Rational) -> Self {
        let mut p = Self::zero(space);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(space.nvars()), c);
        }
        p
    }

    /// The coordinate function `x_i` (0-based). Panics when `i` is out of range.
    pub fn var(space: &Arc<VarSpace>, i: usize) -> Self {
        assert!(i < space.nvars(), "variable index {i} out of range");
        let mut e = vec![0; space.nvars()];
        e[i] = 1;
        Self::monomial(space, e, Rational::one())
    }

    pub fn monomial(space: &Arc<VarSpace>, exponents: Vec<u32>, coeff: Rational) -> Self {
        assert_eq!(exponents.len(), space.nvars(), "exponent length mismatch");
        let mut p = Self::zero(space);
        if !coeff.is_zero() {
            p.terms.insert(Monomial(exponents), coeff);
        }
        p
    }

    /// Linear form `sum_i c_i x_i` over the spatial coordinates.
    pub fn linear(space: &Arc<VarSpace>, coeffs: &[Rational]) -> Self {
        let mut p = Self::zero(space);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; space.nvars()];
                e[i] = 1;
                p.terms.insert(Monomial(e), c.clone());
            }
        }
        p
    }

    pub fn from_terms<I>(space: &Arc<VarSpace>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Self::zero(space);
        for (e, c) in terms {
            assert_eq!(e.len(), space.nvars(), "exponent length mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn space(&self) -> &Arc<VarSpace> {
        &self.space
    }

    /// Terms from the leading (largest) monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.space.nvars()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Total degree in the spatial variables only.
    pub fn spatial_degree(&self) -> Option<u32> {
        let n = self.space.dim();
        self.terms
            .keys()
            .map(|m| m.0[..n].iter().sum::<u32>())
            .max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Does variable `var` occur in any term?
    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_same(&self.space, &other.space)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_same(&self.space, &other.space)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_same(&self.space, &other.space)?;
        Ok(self * other)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(&self.space);
        }
        Polynomial {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * r)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.space);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `i` (0-based).
    pub fn diff(&self, i: usize) -> Result<Self> {
        if i >= self.space.nvars() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.space.nvars(),
            });
        }
        Ok(self.d(i))
    }

    /// Unchecked [`Polynomial::diff`]; panics on a bad index.
    pub fn d(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.terms
                .insert(Monomial(exps), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Exact value at a point giving every variable (parameters included).
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.space.nvars() {
            return Err(Error::LengthMismatch {
                expected: self.space.nvars(),
                got: point.len(),
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.space.nvars());
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(rational_to_f64(c), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    /// Compose: replace variable `i` with `images[i]`. All images share one
    /// target space, which becomes the space of the result.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Self> {
        if images.len() != self.space.nvars() {
            return Err(Error::LengthMismatch {
                expected: self.space.nvars(),
                got: images.len(),
            });
        }
        let target = match images.first() {
            Some(p) => p.space.clone(),
            None => return Err(Error::Shape("empty substitution".into())),
        };
        for p in images {
            check_same(&target, &p.space)?;
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(&target), p.clone()])
            .collect();
        let mut out = Polynomial::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out += &t;
        }
        Ok(out)
    }

    /// Re-home this polynomial in `target`, matching variables by name.
    pub fn embed(&self, target: &Arc<VarSpace>) -> Result<Self> {
        if same_space(&self.space, target) {
            return Ok(self.clone());
        }
        let map: Vec<usize> = self
            .space
            .names()
            .iter()
            .map(|n| {
                target
                    .index_of(n)
                    .ok_or_else(|| Error::UnknownVariable(n.clone()))
            })
            .collect::<Result<_>>()?;
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.nvars()];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[i]] = k;
                }
            }
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }

    /// Coefficients of `var^0, var^1, ...` as polynomials not involving `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Polynomial::zero(&self.space); deg + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut e = m.0.clone();
            e[var] = 0;
            out[k].terms.insert(Monomial(e), c.clone());
        }
        out
    }

    /// Exact quotient when `divisor` divides `self`, `None` otherwise.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        let (lm, lc) = divisor.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.space);
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = m.div(&lm);
            let qc = c / &lc;
            let step = Polynomial {
                space: self.space.clone(),
                terms: divisor
                    .terms
                    .iter()
                    .map(|(dm, dc)| (dm.mul(&qm), dc * &qc))
                    .collect(),
            };
            rem -= &step;
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Largest absolute coefficient; zero for the zero polynomial.
    pub fn max_abs_coefficient(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.space.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.space.name(i), e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&a), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        assert!(same_space(&self.space, &rhs.space), "space mismatch in add");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        assert!(same_space(&self.space, &rhs.space), "space mismatch in sub");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += &rhs;
        self
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        self -= &rhs;
        self
    }
}

impl Add<&Polynomial> for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: &Polynomial) -> Polynomial {
        self += rhs;
        self
    }
}

impl Sub<&Polynomial> for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: &Polynomial) -> Polynomial {
        self -= rhs;
        self
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert!(same_space(&self.space, &rhs.space), "space mismatch in mul");
        let mut out = Polynomial::zero(&self.space);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
