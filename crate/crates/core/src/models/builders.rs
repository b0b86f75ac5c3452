use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::params::{PhysParams, QDeformParams};
use super::poly::Poly;
use super::symbol::DiffOp;
use crate::error::{Error, Result};
use crate::opcore::{hermitian_matrix_function, masked_norm, Grid, Operator};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// An operator kept both as a symbol and as its grid matrix.
///
/// Sums of observables combine matrices linearly; products and Hamiltonians
/// are composed on the symbol and realized afresh, so they never inherit the
/// sublattice decoupling of products of centered differences.
#[derive(Clone, Debug)]
pub struct Observable {
    symbol: DiffOp,
    matrix: Operator,
}

impl Observable {
    pub fn realize(symbol: DiffOp, grid: &Grid) -> Result<Self> {
        let matrix = symbol.realize(grid)?;
        Ok(Self { symbol, matrix })
    }

    pub fn symbol(&self) -> &DiffOp {
        &self.symbol
    }

    pub fn matrix(&self) -> &Operator {
        &self.matrix
    }

    pub fn grid(&self) -> Result<Grid> {
        self.matrix
            .grid()
            .copied()
            .ok_or_else(|| Error::Precondition("observable has no grid".into()))
    }

    /// `c1·self + c2·other`, combined linearly on both representations.
    fn combine(&self, c1: Complex64, other: &Self, c2: Complex64) -> Result<Self> {
        Ok(Self {
            symbol: &self.symbol.scale(c1) + &other.symbol.scale(c2),
            matrix: self.matrix.scale(c1).sum(&other.matrix.scale(c2))?,
        })
    }
}

/// Which Swanson Hamiltonian to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// `P²/2m + mω²X²/2 + iμ{X,P}`.
    #[default]
    Bf,
    /// `ω a†a + λa² + δ̃a†² + ω/2`.
    Jr,
}

/// `1 + τp²`.
pub fn deformation_weight(tau: f64) -> Poly {
    Poly::from_real(&[1.0, 0.0, tau])
}

pub fn momentum_symbol() -> DiffOp {
    DiffOp::multiplication(Poly::var())
}

/// `iℏ((1 + τp²)∂ + γ̃p)`.
pub fn position_symbol(pp: &PhysParams) -> DiffOp {
    let ih = I * pp.hbar;
    DiffOp::new(vec![
        Poly::from_real(&[0.0, pp.gamma_t]),
        deformation_weight(pp.tau),
    ])
    .scale(ih)
}

/// `x0 = iℏ∂`, `p0 = p`.
pub fn build_canonical_pair(grid: &Grid, pp: &PhysParams) -> Result<(Observable, Observable)> {
    pp.validate()?;
    let x0 = DiffOp::derivative().scale(I * pp.hbar);
    Ok((
        Observable::realize(x0, grid)?,
        Observable::realize(momentum_symbol(), grid)?,
    ))
}

/// `X = iℏ((1 + τp²)∂ + γ̃p)`, `P = p`.
pub fn build_deformed_pair(grid: &Grid, pp: &PhysParams) -> Result<(Observable, Observable)> {
    pp.validate()?;
    Ok((
        Observable::realize(position_symbol(pp), grid)?,
        Observable::realize(momentum_symbol(), grid)?,
    ))
}

#[derive(Clone, Debug)]
pub struct Ladder {
    pub a: Observable,
    pub a_dag: Observable,
    /// Masked `‖a† − adjoint(a)‖ / ‖a†‖`; zero only when `X` is Hermitian.
    pub adjoint_defect: f64,
}

/// `a = (P − iωX)/√(2mℏω)` and `a† = (P + iωX)/√(2mℏω)` by formula.
pub fn build_ladder(x: &Observable, p: &Observable, pp: &PhysParams) -> Result<Ladder> {
    pp.validate()?;
    let s = 1.0 / (2.0 * pp.mass * pp.hbar * pp.omega).sqrt();
    let one = Complex64::new(s, 0.0);
    let a = p.combine(one, x, -I * pp.omega * s)?;
    let a_dag = p.combine(one, x, I * pp.omega * s)?;
    let defect = a.matrix.adjoint().difference(&a_dag.matrix)?;
    let adjoint_defect = masked_norm(&defect, &[&a_dag.matrix])?;
    Ok(Ladder {
        a,
        a_dag,
        adjoint_defect,
    })
}

/// `P²/(2m) + (mω²/2)X² + iμ{X,P}`.
pub fn build_swanson_bf(x: &Observable, p: &Observable, pp: &PhysParams) -> Result<Observable> {
    pp.validate()?;
    let (xs, ps) = (&x.symbol, &p.symbol);
    let kinetic = ps.compose(ps).scale_real(0.5 / pp.mass);
    let potential = xs
        .compose(xs)
        .scale_real(0.5 * pp.mass * pp.omega * pp.omega);
    let coupling = xs.anticommutator(ps).scale(I * pp.mu);
    Observable::realize(&(&kinetic + &potential) + &coupling, &x.grid()?)
}

/// `ω a†a + λa² + δ̃a†² + ω/2`.
pub fn build_swanson_jr(ladder: &Ladder, pp: &PhysParams) -> Result<Observable> {
    pp.validate()?;
    if pp.lambda == pp.delta_t {
        log::warn!("lambda == delta_t: the undeformed JR Hamiltonian is Hermitian");
    }
    let (a, ad) = (&ladder.a.symbol, &ladder.a_dag.symbol);
    let h = &(&(&ad.compose(a).scale_real(pp.omega) + &a.compose(a).scale_real(pp.lambda))
        + &ad.compose(ad).scale_real(pp.delta_t))
        + &DiffOp::scalar(Complex64::new(0.5 * pp.omega, 0.0));
    Observable::realize(h, &ladder.a.grid()?)
}

/// Either Swanson Hamiltonian on the deformed pair for `pp`.
pub fn build_hamiltonian(model: ModelKind, grid: &Grid, pp: &PhysParams) -> Result<Observable> {
    let (x, p) = build_deformed_pair(grid, pp)?;
    match model {
        ModelKind::Bf => build_swanson_bf(&x, &p, pp),
        ModelKind::Jr => build_swanson_jr(&build_ladder(&x, &p, pp)?, pp),
    }
}

/// Hermitian part of the realized `a†a`.
pub fn default_number_operator(ladder: &Ladder) -> Result<Operator> {
    let n = ladder.a_dag.symbol.compose(&ladder.a.symbol);
    Ok(n.realize(&ladder.a.grid()?)?.hermitian_part())
}

/// Masked residual of the q-deformed commutator, relative to its right-hand side.
///
/// Both sides are formed from the matrices of `X` and `P`.
pub fn deformed_algebra_residual(
    x: &Observable,
    p: &Observable,
    n_op: &Operator,
    qp: &QDeformParams,
    pp: &PhysParams,
) -> Result<f64> {
    pp.validate()?;
    let (xm, pm) = (&x.matrix, &p.matrix);
    let lhs = xm.commutator(pm)?;
    let q = qp.q();
    let qf = if q == 1.0 {
        Operator::identity(&x.grid()?)
    } else {
        hermitian_matrix_function(n_op, |t| q.powf(qp.f(t)))?
    };
    let k = qp.norm_factor();
    let mut rhs = qf.scale(I * pp.hbar * k);
    if q != 1.0 {
        let (a, b, g, d) = (qp.alpha(), qp.beta(), qp.gamma(), qp.delta());
        let quad = xm
            .product(xm)?
            .scale_real(d * g)
            .sum(&pm.product(pm)?.scale_real(a * b))?
            .sum(&xm.product(pm)?.scale(I * a * d))?
            .difference(&pm.product(xm)?.scale(I * b * g))?;
        rhs = rhs.sum(&quad.scale(I * pp.hbar * (q * q - 1.0) / k))?;
    }
    masked_norm(&lhs.difference(&rhs)?, &[&rhs])
}

/// Two readings of `[X, P] − iℏ(1 + τP²)`, both masked and relative to `ℏ(1 + τP²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorCheck {
    /// Commutator of the grid matrices.
    pub matrix: f64,
    /// Commutator composed on the symbols, then realized.
    pub symbolic: f64,
}

pub fn commutator_check(
    x: &Observable,
    p: &Observable,
    pp: &PhysParams,
) -> Result<CommutatorCheck> {
    let grid = x.grid()?;
    let target_symbol = DiffOp::multiplication(deformation_weight(pp.tau)).scale(I * pp.hbar);
    let target = target_symbol.realize(&grid)?;
    let matrix = x.matrix.commutator(&p.matrix)?.difference(&target)?;
    let symbolic = x
        .symbol
        .commutator(&p.symbol)
        .realize(&grid)?
        .difference(&target)?;
    Ok(CommutatorCheck {
        matrix: masked_norm(&matrix, &[&target])?,
        symbolic: masked_norm(&symbolic, &[&target])?,
    })
}

/// `ln S(p)` for the gauge factor removing `iℏγ̃P` from `X`.
fn gauge_log(pp: &PhysParams, x: f64) -> f64 {
    if pp.tau > 0.0 {
        pp.gamma_t / (2.0 * pp.tau) * (pp.tau * x * x).ln_1p()
    } else {
        0.5 * pp.gamma_t * x * x
    }
}

/// Diagonal `S` with `S·X(γ̃)·S⁻¹ = X(0)`, and its inverse.
///
/// `S = (1 + τp²)^{γ̃/(2τ)}`, tending to `exp(γ̃p²/2)` as `τ → 0`.
pub fn gauge_transform(pp: &PhysParams, grid: &Grid) -> Result<(Operator, Operator)> {
    pp.validate()?;
    let logs: Vec<f64> = grid.points().iter().map(|&x| gauge_log(pp, x)).collect();
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let limit = crate::opcore::CONDITION_LIMIT;
    if hi - lo > limit.ln() {
        return Err(Error::Overflow {
            ratio: (hi - lo).exp(),
            limit,
        });
    }
    let s: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
    let s_inv: Vec<f64> = logs.iter().map(|l| (-l).exp()).collect();
    Ok((
        Operator::real_diagonal(grid, &s)?,
        Operator::real_diagonal(grid, &s_inv)?,
    ))
}

/// Masked `‖S·X(γ̃)·S⁻¹ − X(0)‖ / ‖X(0)‖`.
pub fn gauge_residual(grid: &Grid, pp: &PhysParams) -> Result<f64> {
    let (x, _) = build_deformed_pair(grid, pp)?;
    let (x_bare, _) = build_deformed_pair(grid, &pp.with_gamma(0.0))?;
    let (s, s_inv) = gauge_transform(pp, grid)?;
    let moved = s.product(x.matrix())?.product(&s_inv)?;
    masked_norm(&moved.difference(x_bare.matrix())?, &[x_bare.matrix()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::derivative_matrix;

    fn grid() -> Grid {
        Grid::algebra_default()
    }

    #[test]
    fn undeformed_x_is_scaled_difference() {
        let g = grid();
        let pp = PhysParams::default();
        let (x0, p0) = build_canonical_pair(&g, &pp).unwrap();
        let (x, p) = build_deformed_pair(&g, &pp).unwrap();
        let d = derivative_matrix(&g).unwrap().scale(I);
        assert_eq!(x0.matrix().mat(), d.mat());
        assert_eq!(x.matrix().mat(), x0.matrix().mat());
        assert_eq!(p.matrix().mat(), p0.matrix().mat());
        assert!(p0.matrix().is_diagonal());
    }

    #[test]
    fn deformed_row_prefactor() {
        let g = grid();
        let (x0, _) = build_canonical_pair(&g, &PhysParams::default()).unwrap();
        let (x, _) = build_deformed_pair(&g, &PhysParams::default().with_tau(0.1)).unwrap();
        let k = g.points().iter().position(|&v| v == 2.0).unwrap();
        for j in 0..g.n_points() {
            let want = x0.matrix().get(k, j) * 1.4;
            assert!((x.matrix().get(k, j) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn commutator_on_affine_profiles() {
        // the centred [D, p] averages neighbours, so it is exact on affine vectors
        let g = grid();
        let pp = PhysParams {
            hbar: 2.0,
            ..Default::default()
        };
        let (x0, p0) = build_canonical_pair(&g, &pp).unwrap();
        let c = x0.matrix().commutator(p0.matrix()).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 0.7 * x - 1.3).collect();
        for j in 1..g.n_points() - 1 {
            let cv: Complex64 = (0..g.n_points()).map(|k| c.get(j, k) * v[k]).sum();
            assert!(
                (cv - Complex64::new(0.0, 2.0) * v[j]).norm() < 1e-12,
                "row {j}"
            );
        }
    }

    #[test]
    fn symbolic_commutator_is_exact_for_all_gauges() {
        let g = grid();
        for tau in [0.0, 0.01, 0.1] {
            for gamma in [0.0, 0.3] {
                let pp = PhysParams::default().with_tau(tau).with_gamma(gamma);
                let (x, p) = build_deformed_pair(&g, &pp).unwrap();
                let check = commutator_check(&x, &p, &pp).unwrap();
                assert!(check.symbolic < 1e-15, "{}", check.symbolic);
                // a commutator with a diagonal has zero diagonal, so the matrix
                // reading can never reproduce a nonzero diagonal target
                assert!(check.matrix > 1.0);
            }
        }
    }

    #[test]
    fn ladder_defect_tracks_position_defect() {
        let g = grid();
        let pp = PhysParams::default();
        let (x, p) = build_deformed_pair(&g, &pp).unwrap();
        assert!(build_ladder(&x, &p, &pp).unwrap().adjoint_defect < 1e-12);

        let pp = pp.with_tau(0.1);
        let (x, p) = build_deformed_pair(&g, &pp).unwrap();
        let ladder = build_ladder(&x, &p, &pp).unwrap();
        let lhs = masked_norm(
            &ladder
                .a
                .matrix()
                .adjoint()
                .difference(ladder.a_dag.matrix())
                .unwrap(),
            &[],
        )
        .unwrap();
        let xdef = masked_norm(&x.matrix().adjoint().difference(x.matrix()).unwrap(), &[]).unwrap();
        let s = pp.omega / (2.0 * pp.mass * pp.hbar * pp.omega).sqrt();
        assert!((lhs - s * xdef).abs() < 1e-12 * lhs);
    }

    #[test]
    fn ladder_commutator_is_identity_on_smooth_states() {
        let g = grid();
        let pp = PhysParams::default();
        let (x, p) = build_deformed_pair(&g, &pp).unwrap();
        let l = build_ladder(&x, &p, &pp).unwrap();
        let sym = l.a.symbol().commutator(l.a_dag.symbol());
        assert!(sym.distance(&DiffOp::identity()) < 1e-15);
    }

    #[test]
    fn bf_is_linear_in_mu() {
        let g = Grid::new(65, 4.0, 0.25)
            .unwrap()
            .with_scheme(crate::opcore::Scheme::Plain);
        let h = |mu: f64| {
            build_hamiltonian(
                ModelKind::Bf,
                &g,
                &PhysParams::default().with_mu(mu).with_tau(0.1),
            )
            .unwrap()
            .matrix()
            .clone()
        };
        let lhs = h(0.1).sum(&h(0.25)).unwrap().difference(&h(0.0)).unwrap();
        let rhs = h(0.35);
        assert!(lhs.difference(&rhs).unwrap().frobenius_norm() < 1e-9 * rhs.frobenius_norm());
    }

    #[test]
    fn bf_non_hermiticity_at_tau_zero() {
        // H − H† = 2iμ{x0, p0} on the symbols
        let mu = 0.1;
        let pp = PhysParams::default().with_mu(mu);
        let (x, p) = build_canonical_pair(&grid(), &pp).unwrap();
        let h = build_swanson_bf(&x, &p, &pp).unwrap();
        let defect = h.symbol() - &h.symbol().adjoint();
        let expected = x.symbol().anticommutator(p.symbol()).scale(I * 2.0 * mu);
        assert!(defect.distance(&expected) < 1e-15);
    }

    #[test]
    fn jr_symmetric_couplings_are_hermitian() {
        let pp = PhysParams::default().with_ladder_couplings(0.05, 0.05);
        let h = build_hamiltonian(ModelKind::Jr, &grid(), &pp).unwrap();
        assert!(h.symbol().distance(&h.symbol().adjoint()) < 1e-15);
        let m = h.matrix();
        let rel = masked_norm(&m.difference(&m.adjoint()).unwrap(), &[m]).unwrap();
        assert!(rel < 1e-10, "{rel}");
    }

    #[test]
    fn gauge_factor_limits() {
        let g = Grid::new(5, 2.0, 0.0).unwrap();
        let (s, s_inv) = gauge_transform(&PhysParams::default(), &g).unwrap();
        assert_eq!(s.mat(), Operator::identity(&g).mat());
        assert_eq!(s_inv.mat(), Operator::identity(&g).mat());
        // at p = 1, γ̃ = 1: (1 + τ)^{1/(2τ)} → e^{1/2}
        let pp = PhysParams::default().with_gamma(1.0).with_tau(1e-8);
        let k = 3;
        let (s, _) = gauge_transform(&pp, &g).unwrap();
        assert!((s.get(k, k).re - 0.5f64.exp()).abs() < 1e-7);
    }

    #[test]
    fn gauge_removes_gamma_term() {
        for tau in [0.0, 0.01, 0.1] {
            let pp = PhysParams::default().with_tau(tau).with_gamma(0.3);
            let r = gauge_residual(&grid(), &pp).unwrap();
            assert!(r < 1e-12, "tau {tau}: {r}");
        }
    }

    #[test]
    fn gauge_overflow_is_reported() {
        let pp = PhysParams::default().with_gamma(5.0);
        assert!(matches!(
            gauge_transform(&pp, &Grid::spectra_default()),
            Err(Error::Overflow { .. })
        ));
    }
}
