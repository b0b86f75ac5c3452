//! Differential operators `Σ_k c_k(p) ∂^k` with polynomial coefficients.
//!
//! Products are composed exactly with the Leibniz rule, so identities such as
//! `[X, P] = iℏ(1 + τP²)` hold symbolically before any discretization. A
//! symbol is turned into a grid matrix by [`DiffOp::realize`].

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::poly::Poly;
use crate::error::{Error, Result};
use crate::opcore::{first_derivative_rows, second_derivative_rows, Grid, Operator, Scheme};

/// Eight-point Gauss–Legendre rule on `[-1, 1]`.
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// A coefficient counts as nonvanishing when its smallest modulus on the grid
/// and quadrature nodes exceeds this fraction of its largest.
const NONVANISHING_TOL: f64 = 1e-8;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiffOp {
    coeffs: Vec<Poly>,
}

impl DiffOp {
    pub fn new(coeffs: Vec<Poly>) -> Self {
        let mut op = Self { coeffs };
        while op.coeffs.last().is_some_and(Poly::is_zero) {
            op.coeffs.pop();
        }
        op
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::multiplication(Poly::constant(c))
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    /// Multiplication by a polynomial in `p`.
    pub fn multiplication(f: Poly) -> Self {
        Self::new(vec![f])
    }

    /// `∂/∂p`.
    pub fn derivative() -> Self {
        Self::new(vec![Poly::zero(), Poly::constant(Complex64::new(1.0, 0.0))])
    }

    /// Highest derivative order, `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Poly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// Largest coefficient modulus of `self − other`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other)
            .coeffs
            .iter()
            .flat_map(|p| p.coeffs().iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self ∘ other`, expanded with `(f∂^m)(g∂^n) = Σ_i C(m,i) f g^{(i)} ∂^{m−i+n}`.
    pub fn compose(&self, other: &Self) -> Self {
        let (Some(a), Some(b)) = (self.order(), other.order()) else {
            return Self::zero();
        };
        let mut out = vec![Poly::zero(); a + b + 1];
        for (m, f) in self.coeffs.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (n, g) in other.coeffs.iter().enumerate() {
                let mut gi = g.clone();
                for i in 0..=m {
                    if gi.is_zero() {
                        break;
                    }
                    let term = (f * &gi).scale(Complex64::new(binomial(m, i), 0.0));
                    let slot = &mut out[m - i + n];
                    *slot = &*slot + &term;
                    gi = gi.derivative();
                }
            }
        }
        Self::new(out)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.compose(other) - &other.compose(self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &self.compose(other) + &other.compose(self)
    }

    /// Formal adjoint in `L²(dp)`: `(f∂^k)† = (−∂)^k f̄`.
    pub fn adjoint(&self) -> Self {
        let mut out = vec![Poly::zero(); self.coeffs.len()];
        for (k, f) in self.coeffs.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let mut fi = f.conj();
            for i in 0..=k {
                let term = fi.scale(Complex64::new(sign * binomial(k, i), 0.0));
                out[k - i] = &out[k - i] + &term;
                fi = fi.derivative();
            }
        }
        Self::new(out)
    }

    /// Grid matrix of this operator under the grid's [`Scheme`].
    pub fn realize(&self, grid: &Grid) -> Result<Operator> {
        match self.order() {
            None => Ok(Operator::zeros(grid)),
            Some(k) if k > 2 => Err(Error::UnsupportedOrder(k)),
            Some(k) => {
                if grid.n_points() < 5 {
                    return Err(Error::InvalidGrid(format!(
                        "realization needs at least 5 points, got {}",
                        grid.n_points()
                    )));
                }
                match grid.scheme() {
                    Scheme::Plain => Ok(self.realize_plain(grid)),
                    Scheme::Covariant => Ok(self
                        .realize_covariant(grid, k)
                        .unwrap_or_else(|| self.realize_plain(grid))),
                }
            }
        }
    }

    fn samples(&self, k: usize, points: &[f64]) -> Vec<Complex64> {
        let c = self.coeff(k);
        points.iter().map(|&x| c.eval(x)).collect()
    }

    fn realize_plain(&self, grid: &Grid) -> Operator {
        let n = grid.n_points();
        let h = grid.spacing();
        let points = grid.points();
        let mut op = Operator::zeros(grid);
        let c0 = self.samples(0, &points);
        for (j, &c) in c0.iter().enumerate() {
            op.set(j, j, c);
        }
        let stencils = [first_derivative_rows(n, h), second_derivative_rows(n, h)];
        for (order, rows) in (1..=2).zip(stencils.iter()) {
            if self.coeff(order).is_zero() {
                continue;
            }
            let c = self.samples(order, &points);
            for (j, row) in rows.iter().enumerate() {
                for &(k, w) in row {
                    op.set(j, k, op.get(j, k) + c[j] * w);
                }
            }
        }
        op
    }

    /// `c2 E⁻¹ ∂² E + c̃0` (order 2) or `c1 E⁻¹ ∂ E` (order 1), where `E = e^Φ`
    /// and `Φ′` absorbs the next-lower coefficient. Returns `None` when the
    /// leading coefficient vanishes somewhere on the grid.
    fn realize_covariant(&self, grid: &Grid, order: usize) -> Option<Operator> {
        if order == 0 {
            return None;
        }
        let lead = self.coeff(order);
        let next = self.coeff(order - 1);
        if next.is_zero() || !nonvanishing(&lead, grid) {
            return None;
        }
        let two = if order == 2 { 2.0 } else { 1.0 };
        let link = |x: f64| next.eval(x) / (two * lead.eval(x));
        let phi = link_phases(grid, link);

        let n = grid.n_points();
        let h = grid.spacing();
        let points = grid.points();
        let c = self.samples(order, &points);
        let rows = if order == 2 {
            second_derivative_rows(n, h)
        } else {
            first_derivative_rows(n, h)
        };
        let mut op = Operator::zeros(grid);
        for (j, row) in rows.iter().enumerate() {
            for &(k, w) in row {
                op.set(j, k, c[j] * w * (phi[k] - phi[j]).exp());
            }
        }
        if order == 2 {
            // c̃0 = c0 − c2 (β′ + β²), β = c1/(2 c2)
            let c0 = self.coeff(0);
            let (d1, d2) = (next.derivative(), lead.derivative());
            for (j, &x) in points.iter().enumerate() {
                let (a2, a1) = (lead.eval(x), next.eval(x));
                let beta = a1 / (2.0 * a2);
                let dbeta = (d1.eval(x) * a2 - a1 * d2.eval(x)) / (2.0 * a2 * a2);
                let diag = c0.eval(x) - a2 * (dbeta + beta * beta);
                op.set(j, j, op.get(j, j) + diag);
            }
        }
        Some(op)
    }
}

fn nonvanishing(c: &Poly, grid: &Grid) -> bool {
    let h = grid.spacing();
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for x in grid.points() {
        for &t in GL_NODES.iter().chain(std::iter::once(&-1.0)) {
            let v = c.eval(x + 0.5 * h * (t + 1.0)).norm();
            min = min.min(v);
            max = max.max(v);
        }
    }
    max > 0.0 && min > NONVANISHING_TOL * max
}

/// `Φ(p_k) = ∫_0^{p_k} β`, by Gauss–Legendre quadrature on each cell.
fn link_phases(grid: &Grid, beta: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
    let n = grid.n_points();
    let h = grid.spacing();
    let mut phi = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n - 1 {
        let mid = 0.5 * (grid.point(j) + grid.point(j + 1));
        let cell: Complex64 = GL_NODES
            .iter()
            .zip(GL_WEIGHTS.iter())
            .map(|(&t, &w)| beta(mid + 0.5 * h * t) * w)
            .sum();
        phi[j + 1] = phi[j] + cell * (0.5 * h);
    }
    let origin = phi[grid.center()];
    phi.iter().map(|v| v - origin).collect()
}

impl Add for &DiffOp {
    type Output = DiffOp;

    fn add(self, rhs: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DiffOp::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;

    fn neg(self) -> DiffOp {
        self.scale_real(-1.0)
    }
}

impl Sub for &DiffOp {
    type Output = DiffOp;

    fn sub(self, rhs: &DiffOp) -> DiffOp {
        self + &(-rhs)
    }
}

impl Mul for &DiffOp {
    type Output = DiffOp;

    fn mul(self, rhs: &DiffOp) -> DiffOp {
        self.compose(rhs)
    }
}
