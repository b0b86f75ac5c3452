use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants and couplings, in natural units by default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysParams {
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
    /// Coupling of `iμ{X, P}`.
    pub mu: f64,
    /// Coefficient of `a²`.
    pub lambda: f64,
    /// Coefficient of `a†²`.
    pub delta_t: f64,
    /// Deformation strength in `[X, P] = iℏ(1 + τP²)`.
    pub tau: f64,
    /// Coefficient of the gauge term `iℏγ̃P` in `X`.
    pub gamma_t: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            mu: 0.0,
            lambda: 0.0,
            delta_t: 0.0,
            tau: 0.0,
            gamma_t: 0.0,
        }
    }
}

impl PhysParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("omega", self.omega),
            ("mu", self.mu),
            ("lambda", self.lambda),
            ("delta_t", self.delta_t),
            ("tau", self.tau),
            ("gamma_t", self.gamma_t),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "{name} must be finite, got {v}"
            )));
        }
        for (name, v) in &fields[..3] {
            if *v <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.tau < 0.0 {
            return Err(Error::InvalidParams(format!(
                "tau must be nonnegative, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_gamma(mut self, gamma_t: f64) -> Self {
        self.gamma_t = gamma_t;
        self
    }

    pub fn with_ladder_couplings(mut self, lambda: f64, delta_t: f64) -> Self {
        self.lambda = lambda;
        self.delta_t = delta_t;
        self
    }
}

/// Real function of the number operator appearing as `q^{f(N)}`.
pub type NumberFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Parameters of the q-deformed commutator
/// `[X,P] = iℏ q^{f(N)}(αδ+βγ) + iℏ(q²−1)/(αδ+βγ)·(δγX² + αβP² + iαδXP − iβγPX)`.
#[derive(Clone)]
pub struct QDeformParams {
    q: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    f: NumberFn,
}

/// Allowed slack in `4αγ = q² + 1`.
pub const CONSTRAINT_TOL: f64 = 1e-12;

impl QDeformParams {
    pub fn new(q: f64, alpha: f64, beta: f64, gamma: f64, delta: f64, f: NumberFn) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidParams(format!("q must be positive, got {q}")));
        }
        if [alpha, beta, gamma, delta].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(
                "alpha, beta, gamma, delta must be finite".into(),
            ));
        }
        let slack = (4.0 * alpha * gamma - (q * q + 1.0)).abs();
        if slack > CONSTRAINT_TOL {
            return Err(Error::Precondition(format!(
                "4·alpha·gamma = {} differs from q²+1 = {} by {slack:.3e}",
                4.0 * alpha * gamma,
                q * q + 1.0
            )));
        }
        if alpha * delta + beta * gamma == 0.0 {
            return Err(Error::Precondition(
                "alpha·delta + beta·gamma vanishes".into(),
            ));
        }
        Ok(Self {
            q,
            alpha,
            beta,
            gamma,
            delta,
            f,
        })
    }

    /// `q = 1`, `α = δ = 1`, `γ = 1/2`, `β = 0`: the canonical relation.
    pub fn canonical(f: NumberFn) -> Self {
        Self::new(1.0, 1.0, 0.0, 0.5, 1.0, f).expect("canonical parameters satisfy the constraint")
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn f(&self, n: f64) -> f64 {
        (self.f)(n)
    }

    /// `αδ + βγ`.
    pub fn norm_factor(&self) -> f64 {
        self.alpha * self.delta + self.beta * self.gamma
    }
}

impl fmt::Debug for QDeformParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QDeformParams")
            .field("q", &self.q)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("gamma", &self.gamma)
            .field("delta", &self.delta)
            .finish_non_exhaustive()
    }
}
