use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{DiffOp, Observable};
use crate::opcore::{Grid, Scheme};

/// Smallest admissible `σ_min/σ_max` of the column-normalized dictionary.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityTerm {
    pub label: String,
    pub coefficient: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub terms: Vec<EqualityTerm>,
    /// `‖D − Σ c_i M_i‖ / ‖D‖` over masked entries; zero when `D` vanishes.
    pub unexplained: f64,
    /// `σ_min/σ_max` of the column-normalized dictionary.
    pub conditioning: f64,
}

impl EqualityReport {
    pub fn coefficient(&self, label: &str) -> Option<Complex64> {
        self.terms
            .iter()
            .find(|t| t.label == label)
            .map(|t| t.coefficient)
    }
}

/// Label of the `{X, P}` term.
pub const ANTICOMMUTATOR: &str = "{X,P}";

fn dictionary(x: &DiffOp, p: &DiffOp) -> Vec<(&'static str, DiffOp)> {
    let x2 = x * x;
    let p2 = p * p;
    let mixed = (&(&x2 * &p2) + &(&p2 * &x2)).scale_real(0.5);
    vec![
        ("I", DiffOp::identity()),
        ("P", p.clone()),
        ("P^2", p2.clone()),
        ("P^4", &p2 * &p2),
        ("X^2", x2),
        (ANTICOMMUTATOR, x.anticommutator(p)),
        ("(X^2P^2+P^2X^2)/2", mixed),
    ]
}

/// Least-squares expansion of `H1 − H2` over
/// `{I, P, P², P⁴, X², {X,P}, (X²P² + P²X²)/2}` on masked entries.
///
/// The difference and the dictionary are realized with the linear
/// [`Scheme::Plain`] map, so an exact symbolic identity is reproduced exactly.
/// `XP` and `PX` enter only through `{X,P}`: their difference is the
/// commutator, a multiple of `I + τP²`, which would make the set dependent.
pub fn model_equality_report(
    h1: &Observable,
    h2: &Observable,
    x: &Observable,
    p: &Observable,
) -> Result<EqualityReport> {
    let grid: Grid = h1.grid()?.with_scheme(Scheme::Plain);
    if h2.grid()?.with_scheme(Scheme::Plain) != grid {
        return Err(Error::GridMismatch);
    }
    let d = (h1.symbol() - h2.symbol()).realize(&grid)?;
    let terms = dictionary(x.symbol(), p.symbol());
    let r = grid.interior();
    let rows = r.len() * r.len();
    let cols = terms.len();

    let mut m = Mat::<Complex64>::zeros(rows, cols);
    let mut scales = vec![0.0; cols];
    for (c, (_, sym)) in terms.iter().enumerate() {
        let op = sym.realize(&grid)?;
        for (i, (j, k)) in r
            .clone()
            .flat_map(|j| r.clone().map(move |k| (j, k)))
            .enumerate()
        {
            m[(i, c)] = op.get(j, k);
        }
        scales[c] = m.col(c).norm_l2();
        if scales[c] == 0.0 {
            return Err(Error::RankDeficient(0.0));
        }
        for i in 0..rows {
            m[(i, c)] /= scales[c];
        }
    }
    let rhs = Mat::<Complex64>::from_fn(rows, 1, |i, _| {
        let (j, k) = (r.start + i / r.len(), r.start + i % r.len());
        d.get(j, k)
    });

    let svd = m.thin_svd().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = svd.S().column_vector();
    let conditioning = s[cols - 1].re / s[0].re;
    if conditioning < RANK_TOL {
        return Err(Error::RankDeficient(conditioning));
    }
    // c = V Σ⁻¹ Uᴴ d
    let utd = svd.U().adjoint() * &rhs;
    let scaled = Mat::<Complex64>::from_fn(cols, 1, |i, _| utd[(i, 0)] / s[i].re);
    let coef = svd.V() * &scaled;

    let fitted = &m * &coef;
    let dnorm = rhs.norm_l2();
    let unexplained = if dnorm == 0.0 {
        0.0
    } else {
        (&fitted - &rhs).norm_l2() / dnorm
    };
    Ok(EqualityReport {
        terms: terms
            .iter()
            .enumerate()
            .map(|(c, (label, _))| EqualityTerm {
                label: (*label).to_string(),
                coefficient: coef[(c, 0)] / scales[c],
            })
            .collect(),
        unexplained,
        conditioning,
    })
}

/// `μ*` such that `H1 = H_BF(μ*)` given `H2 = H_BF(μ_ref)`: the `{X,P}`
/// coefficient of `H1 − H2` is `i(μ* − μ_ref)`.
pub fn fitted_coupling(report: &EqualityReport, mu_ref: f64) -> Option<f64> {
    report.coefficient(ANTICOMMUTATOR).map(|c| mu_ref + c.im)
}
