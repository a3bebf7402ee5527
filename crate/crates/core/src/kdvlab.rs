//! Periodic KdV on a uniform grid: the two discrete Poisson operators, mass
//! Casimir, Lenard recursion, RK4 integration with conservation diagnostics,
//! and refinement studies.
//!
//! Operators act as matrices, `(L g)_i = sum_j L_ij g_j`, with
//! `D1 = (u_{i+1} - u_{i-1}) / 2h`,
//! `D3 = (u_{i+2} - 2u_{i+1} + 2u_{i-1} - u_{i-2}) / 2h^3` and
//! `L(u) = D3 + 2 (diag(u) D1 + D1 diag(u))`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fields::Bivector;
use crate::linalg::{self, QMatrix};
use crate::partial::{check_partial_antisymmetry, PartialAnchor};
use crate::polycore::{rational_to_f64, Polynomial, Rational, VarSpace};
use crate::schouten::{jacobiator, SchoutenTensor};
use crate::verdict::Verdict;

/// Uniform periodic grid. `exact_h` is set for rational spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    exact_h: Option<Rational>,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 5 {
            return Err(Error::Precondition(format!(
                "need at least 5 points for the stencils, got {n}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Precondition(format!(
                "length must be positive, got {length}"
            )));
        }
        Ok(Grid {
            n,
            length,
            exact_h: None,
        })
    }

    /// `N` points on the circle of length `2 pi`.
    pub fn circle(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    /// Rational spacing `h`, so length `N h`. Needed for exact identities.
    pub fn rational(n: usize, h: Rational) -> Result<Self> {
        if h <= Rational::zero() {
            return Err(Error::Precondition("h must be positive".into()));
        }
        let mut g = Self::new(n, rational_to_f64(&h) * n as f64)?;
        g.exact_h = Some(h);
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn exact_h(&self) -> Option<&Rational> {
        self.exact_h.as_ref()
    }

    fn require_exact(&self) -> Result<&Rational> {
        self.exact_h.as_ref().ok_or_else(|| {
            Error::Precondition("exact mode needs a grid with rational spacing".into())
        })
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.h();
        (0..self.n).map(|i| i as f64 * h).collect()
    }

    /// Sample `f` at the grid points.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.points().into_iter().map(f).collect()
    }
}

/// `u1, ..., uN`.
pub fn kdv_space(n: usize) -> Arc<VarSpace> {
    let names: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    VarSpace::new(&names).expect("valid names")
}

fn circulant(n: usize, offsets: &[(isize, Rational)]) -> QMatrix {
    let mut m = linalg::zeros(n, n);
    for i in 0..n {
        for (off, c) in offsets {
            let j = (i as isize + off).rem_euclid(n as isize) as usize;
            m[i][j] += c;
        }
    }
    m
}

pub fn d1_matrix(n: usize, h: &Rational) -> QMatrix {
    let c = Rational::one() / (Rational::from_integer(2.into()) * h);
    circulant(n, &[(1, c.clone()), (-1, -c)])
}

pub fn d3_matrix(n: usize, h: &Rational) -> QMatrix {
    let c = Rational::one() / (Rational::from_integer(2.into()) * h * h * h);
    let two = Rational::from_integer(2.into());
    circulant(
        n,
        &[(2, c.clone()), (1, -&two * &c), (-1, &two * &c), (-2, -c)],
    )
}

/// Entries of `L(u)` as polynomials in `u`.
pub fn p2_matrix(space: &Arc<VarSpace>, h: &Rational) -> Vec<Vec<Polynomial>> {
    let n = space.dim();
    let d1 = d1_matrix(n, h);
    let d3 = d3_matrix(n, h);
    let two = Rational::from_integer(2.into());
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut e = Polynomial::constant(space, d3[i][j].clone());
                    if !d1[i][j].is_zero() {
                        let c = &two * &d1[i][j];
                        e += &Polynomial::var(space, i).scale(&c);
                        e += &Polynomial::var(space, j).scale(&c);
                    }
                    e
                })
                .collect()
        })
        .collect()
}

/// The two anchors with their exact diagnostics.
#[derive(Debug, Clone)]
pub struct KdvPair {
    pub p1: PartialAnchor,
    pub p2: PartialAnchor,
    pub p1_antisymmetry: Verdict,
    pub p2_antisymmetry: Verdict,
    pub p1_jacobiator: SchoutenTensor,
    /// Reported, not asserted.
    pub p2_jacobiator: SchoutenTensor,
}

/// `P1 = D1` and `P2 = L(u)` as anchors on `R^N`. Requires rational spacing.
pub fn build_pair(grid: &Grid) -> Result<KdvPair> {
    let h = grid.require_exact()?;
    let space = kdv_space(grid.n);
    let d1 = linalg::to_poly_matrix(&space, &d1_matrix(grid.n, h));
    let p1 = PartialAnchor::from_bivector(&Bivector::new(&space, d1)?);
    let p2 = PartialAnchor::from_bivector(&Bivector::new(&space, p2_matrix(&space, h))?);
    Ok(KdvPair {
        p1_antisymmetry: check_partial_antisymmetry(&p1),
        p2_antisymmetry: check_partial_antisymmetry(&p2),
        p1_jacobiator: jacobiator(&p1),
        p2_jacobiator: jacobiator(&p2),
        p1,
        p2,
    })
}

/// `C(u) = h sum u_i`.
pub fn discrete_casimir_mass(grid: &Grid) -> Result<Polynomial> {
    let h = grid.require_exact()?;
    let space = kdv_space(grid.n);
    Ok(Polynomial::linear(&space, &vec![h.clone(); grid.n]))
}

/// Exact basis of `ker D1`.
pub fn d1_kernel(grid: &Grid) -> Result<QMatrix> {
    let h = grid.require_exact()?;
    Ok(linalg::kernel(&d1_matrix(grid.n, h), grid.n))
}

// ---- float stencils ----

fn at(u: &[f64], i: isize) -> f64 {
    let n = u.len() as isize;
    u[i.rem_euclid(n) as usize]
}

pub fn d1(u: &[f64], h: f64) -> Vec<f64> {
    (0..u.len() as isize)
        .map(|i| (at(u, i + 1) - at(u, i - 1)) / (2.0 * h))
        .collect()
}

pub fn d3(u: &[f64], h: f64) -> Vec<f64> {
    (0..u.len() as isize)
        .map(|i| {
            (at(u, i + 2) - 2.0 * at(u, i + 1) + 2.0 * at(u, i - 1) - at(u, i - 2))
                / (2.0 * h * h * h)
        })
        .collect()
}

/// `L(u) g`.
pub fn l_apply(u: &[f64], g: &[f64], h: f64) -> Vec<f64> {
    let a = d3(g, h);
    let b = d1(g, h);
    let ug: Vec<f64> = u.iter().zip(g).map(|(x, y)| x * y).collect();
    let c = d1(&ug, h);
    (0..u.len())
        .map(|i| a[i] + 2.0 * (u[i] * b[i] + c[i]))
        .collect()
}

fn l_apply_exact(u: &[Rational], g: &[Rational], h: &Rational) -> Vec<Rational> {
    let n = u.len();
    let d1m = d1_matrix(n, h);
    let a = linalg::matvec(&d3_matrix(n, h), g);
    let b = linalg::matvec(&d1m, g);
    let ug: Vec<Rational> = u.iter().zip(g).map(|(x, y)| x * y).collect();
    let c = linalg::matvec(&d1m, &ug);
    let two = Rational::from_integer(2.into());
    (0..n)
        .map(|i| &a[i] + &two * (&u[i] * &b[i] + &c[i]))
        .collect()
}

/// One Lenard step `D1 g_next = L(u) g`, `g_next` orthogonal to `ker D1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LenardStep<T> {
    pub next: Vec<T>,
    pub residual: f64,
}

/// Exact step; `u`, `g` rational.
pub fn lenard_step_exact(
    grid: &Grid,
    u: &[Rational],
    g: &[Rational],
) -> Result<LenardStep<Rational>> {
    let h = grid.require_exact()?;
    let n = grid.n;
    check_len(n, u)?;
    check_len(n, g)?;
    let rhs = l_apply_exact(u, g, h);
    let ker = linalg::kernel(&d1_matrix(n, h), n);
    for k in &ker {
        let dot: Rational = k.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        if !dot.is_zero() {
            let mean: Rational =
                rhs.iter().sum::<Rational>() / Rational::from_integer((n as i64).into());
            return Err(Error::Precondition(format!(
                "right-hand side not in the image of D1: mean {mean}, kernel component {dot}"
            )));
        }
    }
    // (D1 + sum k k^t) g = rhs is invertible and forces g orthogonal to ker D1
    let mut a = d1_matrix(n, h);
    for k in &ker {
        for i in 0..n {
            for j in 0..n {
                a[i][j] += &k[i] * &k[j];
            }
        }
    }
    let next =
        linalg::solve(&a, &rhs).ok_or_else(|| Error::Numerical("singular Lenard system".into()))?;
    let check = linalg::matvec(&d1_matrix(n, h), &next);
    let residual = check
        .iter()
        .zip(&rhs)
        .map(|(x, y)| rational_to_f64(&(x - y)).abs())
        .fold(0.0, f64::max);
    Ok(LenardStep { next, residual })
}

fn check_len<T>(n: usize, v: &[T]) -> Result<()> {
    if v.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: v.len(),
        });
    }
    Ok(())
}

/// Relative size below which a right-hand side kernel component counts as zero.
pub const LENARD_TOLERANCE: f64 = 1e-9;

/// Float step via FFT: divide by the symbol `i sin(2 pi k / N) / h`, dropping
/// the kernel modes `k = 0` and `k = N/2`.
pub fn lenard_step(grid: &Grid, u: &[f64], g: &[f64]) -> Result<LenardStep<f64>> {
    let n = grid.n;
    check_len(n, u)?;
    check_len(n, g)?;
    let h = grid.h();
    let rhs = l_apply(u, g, h);
    let scale = 1.0 + rhs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mean = rhs.iter().sum::<f64>() / n as f64;
    let alt = if n % 2 == 0 {
        rhs.iter()
            .enumerate()
            .map(|(i, x)| if i % 2 == 0 { *x } else { -x })
            .sum::<f64>()
            / n as f64
    } else {
        0.0
    };
    if mean.abs() > LENARD_TOLERANCE * scale || alt.abs() > LENARD_TOLERANCE * scale {
        return Err(Error::Precondition(format!(
            "right-hand side not in the image of D1: mean {mean:e}, alternating component {alt:e}"
        )));
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = rhs.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let s = (2.0 * PI * k as f64 / n as f64).sin() / h;
        *c = if s.abs() < 1e-12 / h {
            Complex::new(0.0, 0.0)
        } else {
            *c / Complex::new(0.0, s)
        };
    }
    inv.process(&mut buf);
    let next: Vec<f64> = buf.iter().map(|c| c.re / n as f64).collect();
    let check = d1(&next, h);
    let residual = check
        .iter()
        .zip(&rhs)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(LenardStep { next, residual })
}

// ---- time integration ----

/// Flow generator `u' = D1 dH`, `dH_i = (1/h) dH/du_i`.
#[derive(Clone)]
pub enum Hamiltonian {
    /// `h sum u_i`; the flow is trivial.
    Mass,
    /// `h sum u_i^2 / 2`.
    Momentum,
    /// `h sum (u_i^3 - (D1 u)_i^2 / 2)`, giving `u' = 3 D1(u^2) + D1^3 u`.
    Energy,
    /// Variational gradient supplied directly.
    Custom(Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>),
}

impl fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hamiltonian::Mass => write!(f, "Mass"),
            Hamiltonian::Momentum => write!(f, "Momentum"),
            Hamiltonian::Energy => write!(f, "Energy"),
            Hamiltonian::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Hamiltonian {
    fn gradient(&self, u: &[f64], h: f64) -> Vec<f64> {
        match self {
            Hamiltonian::Mass => vec![1.0; u.len()],
            Hamiltonian::Momentum => u.to_vec(),
            Hamiltonian::Energy => {
                let dd = d1(&d1(u, h), h);
                u.iter().zip(dd).map(|(x, y)| 3.0 * x * x + y).collect()
            }
            Hamiltonian::Custom(f) => f(u, h),
        }
    }
}

pub fn mass(u: &[f64], h: f64) -> f64 {
    h * u.iter().sum::<f64>()
}

pub fn momentum(u: &[f64], h: f64) -> f64 {
    h * u.iter().map(|x| x * x).sum::<f64>() / 2.0
}

pub fn energy(u: &[f64], h: f64) -> f64 {
    let du = d1(u, h);
    h * u
        .iter()
        .zip(du)
        .map(|(x, d)| x * x * x - d * d / 2.0)
        .sum::<f64>()
}

/// `dt <= CFL_CONSTANT h^3`. RK4 is stable on the imaginary axis up to
/// `|lambda dt| = 2.83` and the largest eigenvalue of `D1^3` is `1/h^3`.
pub const CFL_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

impl Invariants {
    pub fn of(u: &[f64], h: f64) -> Self {
        Invariants {
            mass: mass(u, h),
            momentum: momentum(u, h),
            energy: energy(u, h),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub steps: usize,
    pub final_state: Vec<f64>,
    /// `(t, invariants)` after every step, starting at `t = 0`.
    pub history: Vec<(f64, Invariants)>,
}

impl Trajectory {
    /// `|F(u(T)) - F(u(0))|` for mass, momentum, energy.
    pub fn drift(&self) -> Invariants {
        let a = self.history.first().expect("history starts at t = 0").1;
        let b = self.history.last().expect("nonempty").1;
        Invariants {
            mass: (b.mass - a.mass).abs(),
            momentum: (b.momentum - a.momentum).abs(),
            energy: (b.energy - a.energy).abs(),
        }
    }
}

/// Norm growth factor treated as blowup.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// Classical RK4 for `u' = D1 dH(u)`.
pub fn integrate(
    grid: &Grid,
    u0: &[f64],
    ham: &Hamiltonian,
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    let n = grid.n;
    check_len(n, u0)?;
    let h = grid.h();
    if !(dt > 0.0) {
        return Err(Error::Precondition(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let limit = CFL_CONSTANT * h * h * h;
    if dt > limit {
        return Err(Error::Precondition(format!(
            "dt = {dt:e} exceeds the stability bound {CFL_CONSTANT} h^3 = {limit:e}"
        )));
    }
    let rhs = |u: &[f64]| d1(&ham.gradient(u, h), h);
    let norm = |u: &[f64]| u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let bound = BLOWUP_FACTOR * (1.0 + norm(u0));
    let mut u = u0.to_vec();
    let mut history = Vec::with_capacity(steps + 1);
    history.push((0.0, Invariants::of(&u, h)));
    let axpy = |u: &[f64], k: &[f64], a: f64| -> Vec<f64> {
        u.iter().zip(k).map(|(x, y)| x + a * y).collect()
    };
    for step in 1..=steps {
        let k1 = rhs(&u);
        let k2 = rhs(&axpy(&u, &k1, dt / 2.0));
        let k3 = rhs(&axpy(&u, &k2, dt / 2.0));
        let k4 = rhs(&axpy(&u, &k3, dt));
        for i in 0..n {
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if u.iter().any(|x| !x.is_finite()) || norm(&u) > bound {
            return Err(Error::Numerical(format!("solution blew up at step {step}")));
        }
        history.push((step as f64 * dt, Invariants::of(&u, h)));
    }
    Ok(Trajectory {
        dt,
        steps,
        final_state: u,
        history,
    })
}

/// Named initial data on the grid: `cos`, `sin`, `sech` (a `2 sech^2`
/// bump centred on the domain), `zero`.
pub fn initial_profile(name: &str, grid: &Grid) -> Result<Vec<f64>> {
    let l = grid.length();
    let w = 2.0 * PI / l;
    Ok(match name {
        "cos" => grid.sample(|x| (w * x).cos()),
        "sin" => grid.sample(|x| (w * x).sin()),
        "sech" => grid.sample(|x| {
            let s = 1.0 / (x - l / 2.0).cosh();
            2.0 * s * s
        }),
        "zero" => vec![0.0; grid.n],
        other => {
            return Err(Error::Precondition(format!(
                "unknown initial profile `{other}`"
            )))
        }
    })
}

/// `log2` of successive ratios.
pub fn empirical_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Energy (or other invariant) drift at time `t` for each `dt`.
pub fn drift_study(grid: &Grid, u0: &[f64], t: f64, dts: &[f64]) -> Result<Vec<(f64, Invariants)>> {
    dts.iter()
        .map(|&dt| {
            let steps = (t / dt).round() as usize;
            Ok((
                dt,
                integrate(grid, u0, &Hamiltonian::Energy, dt, steps)?.drift(),
            ))
        })
        .collect()
}

/// Max error of the energy flow from `eps cos x` against `eps cos(x - t)`,
/// the solution of the linearization `u_t = u_xxx`, for each `N`.
pub fn airy_errors(ns: &[usize], eps: f64, t: f64) -> Result<Vec<(usize, f64)>> {
    ns.iter()
        .map(|&n| {
            let grid = Grid::circle(n)?;
            let h = grid.h();
            let dt_max = h * h * h;
            let steps = (t / dt_max).ceil() as usize;
            let dt = t / steps as f64;
            let u0 = grid.sample(|x| eps * x.cos());
            let tr = integrate(&grid, &u0, &Hamiltonian::Energy, dt, steps)?;
            let exact = grid.sample(|x| eps * (x - t).cos());
            let err = tr
                .final_state
                .iter()
                .zip(exact)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok((n, err))
        })
        .collect()
}

/// One row of the Jacobiator refinement table.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRow {
    pub n: usize,
    pub p1: f64,
    pub p2: f64,
}

/// Covector profiles `alpha_i = h a(x_i)` used by the study.
fn study_covectors(grid: &Grid) -> [Vec<f64>; 3] {
    let h = grid.h();
    [
        grid.sample(|x| h * x.sin()),
        grid.sample(|x| h * (2.0 * x).cos()),
        grid.sample(|x| h * (x.sin() + (3.0 * x).cos())),
    ]
}

/// Background state for the study.
fn study_state(grid: &Grid) -> Vec<f64> {
    grid.sample(|x| x.cos() + 0.5 * (2.0 * x).sin())
}

/// `J(alpha, beta, gamma)` of `L(u)` with the anchor convention
/// `(P alpha)^l = sum_i alpha_i P^{il}`. Only the linear part of `P^{jk}`
/// varies, with `d_l (beta^t L gamma) = 2 (beta_l (D1 gamma)_l - (D1 beta)_l gamma_l)`.
pub fn p2_jacobiator_form(u: &[f64], h: f64, a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let term = |x: &[f64], y: &[f64], z: &[f64]| -> f64 {
        // v = P^t x = -L x
        let v: Vec<f64> = l_apply(u, x, h).into_iter().map(|t| -t).collect();
        let dz = d1(z, h);
        let dy = d1(y, h);
        2.0 * (0..u.len())
            .map(|l| v[l] * (y[l] * dz[l] - dy[l] * z[l]))
            .sum::<f64>()
    };
    term(a, b, c) + term(b, c, a) + term(c, a, b)
}

/// `|J(P1)|` and `|J(P2)|` on smooth covector profiles for each `N`.
pub fn jacobiator_refinement_study(ns: &[usize]) -> Result<Vec<JacobiRow>> {
    ns.iter()
        .map(|&n| {
            if n < 8 {
                return Err(Error::Precondition(format!("study needs N >= 8, got {n}")));
            }
            let grid = Grid::circle(n)?;
            let [a, b, c] = study_covectors(&grid);
            let u = study_state(&grid);
            Ok(JacobiRow {
                n,
                // constant anchor
                p1: 0.0,
                p2: p2_jacobiator_form(&u, grid.h(), &a, &b, &c).abs(),
            })
        })
        .collect()
}

/// Contract an exact Jacobiator with three covectors at a float state.
pub fn contract_jacobiator(j: &SchoutenTensor, u: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let k = j.basis().len();
    let mut s = 0.0;
    for (&(p, q, r), v) in j.entries().nonzero() {
        let val = v.eval_f64(u);
        // all six orderings of an antisymmetric entry
        let perms = [
            (p, q, r, 1.0),
            (q, r, p, 1.0),
            (r, p, q, 1.0),
            (q, p, r, -1.0),
            (p, r, q, -1.0),
            (r, q, p, -1.0),
        ];
        for (i, jj, l, sign) in perms {
            s += sign * val * a[i] * b[jj] * c[l];
        }
    }
    debug_assert!(k == u.len());
    s
}
