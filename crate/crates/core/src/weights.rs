//! Corner cutting weights.
//!
//! A weight pair `(alpha, beta)` is stored as one period of a bi-infinite
//! sequence; index `i` reads entry `i mod period`. A pair is admissible when
//! `alpha_i`, `1 - beta_i` and `beta_i - alpha_i` stay above a positive
//! margin, and its contraction factor is
//!
//! ```text
//! mu = max_i { beta_i - alpha_i, 1 - beta_{i-1} + alpha_i }
//! ```
//!
//! Point refinement converges when the supremum of `mu` over all levels is
//! below 1; net refinement when it is below `sqrt(3)/3`.

use thiserror::Error;

/// Margin applied to the strict class inequalities when the caller has no
/// better value.
pub const DEFAULT_MARGIN: f64 = 1e-12;

/// Convergence threshold on `mu*` for corner cutting of nets.
pub const NET_THRESHOLD: f64 = 0.577_350_269_189_625_7; // sqrt(3) / 3

/// Which of the three admissibility quantities failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Alpha,
    OneMinusBeta,
    BetaMinusAlpha,
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Quantity::Alpha => "alpha",
            Quantity::OneMinusBeta => "1 - beta",
            Quantity::BetaMinusAlpha => "beta - alpha",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("alpha has {alpha} entries but beta has {beta}")]
    LengthMismatch { alpha: usize, beta: usize },
    #[error("weight period is empty")]
    EmptyPeriod,
    #[error("negative or non-finite margin {0}")]
    InvalidMargin(f64),
    #[error("{quantity} = {value} at index {index} does not exceed margin {margin}")]
    ClassViolation {
        quantity: Quantity,
        index: usize,
        value: f64,
        margin: f64,
    },
    #[error("weight schedule has no levels")]
    EmptySchedule,
}

/// One period of admissible corner cutting weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPair {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl WeightPair {
    /// Validates one period of weights against the class inequalities,
    /// each of which must exceed `margin`.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, margin: f64) -> Result<Self, WeightError> {
        if !(margin >= 0.0 && margin.is_finite()) {
            return Err(WeightError::InvalidMargin(margin));
        }
        if alpha.len() != beta.len() {
            return Err(WeightError::LengthMismatch {
                alpha: alpha.len(),
                beta: beta.len(),
            });
        }
        if alpha.is_empty() {
            return Err(WeightError::EmptyPeriod);
        }
        for (index, (&a, &b)) in alpha.iter().zip(&beta).enumerate() {
            for (quantity, value) in [
                (Quantity::Alpha, a),
                (Quantity::OneMinusBeta, 1.0 - b),
                (Quantity::BetaMinusAlpha, b - a),
            ] {
                // written so that NaN fails too
                if !(value > margin) {
                    return Err(WeightError::ClassViolation {
                        quantity,
                        index,
                        value,
                        margin,
                    });
                }
            }
        }
        Ok(Self { alpha, beta })
    }

    /// Constant pair reused at every index.
    pub fn uniform(alpha: f64, beta: f64, margin: f64) -> Result<Self, WeightError> {
        Self::new(vec![alpha], vec![beta], margin)
    }

    /// Chaikin's weights, `alpha = 1/4`, `beta = 3/4`.
    pub fn chaikin() -> Self {
        Self {
            alpha: vec![0.25],
            beta: vec![0.75],
        }
    }

    pub fn period(&self) -> usize {
        self.alpha.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    /// `alpha_i` under periodic extension; `i` may be negative.
    pub fn alpha(&self, i: isize) -> f64 {
        self.alpha[i.rem_euclid(self.period() as isize) as usize]
    }

    /// `beta_i` under periodic extension; `i` may be negative.
    pub fn beta(&self, i: isize) -> f64 {
        self.beta[i.rem_euclid(self.period() as isize) as usize]
    }

    /// Smallest of `alpha_i`, `1 - beta_i`, `beta_i - alpha_i` over the period.
    pub fn class_margin(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.beta)
            .flat_map(|(&a, &b)| [a, 1.0 - b, b - a])
            .fold(f64::INFINITY, f64::min)
    }

    /// Contraction factor `mu`. Periodicity turns the supremum over the
    /// integers into a maximum over one period.
    pub fn mu(&self) -> f64 {
        (0..self.period() as isize)
            .map(|i| {
                let inner = self.beta(i) - self.alpha(i);
                let across = 1.0 - self.beta(i - 1) + self.alpha(i);
                inner.max(across)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Weight pairs for successive refinement levels.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSchedule {
    /// The same pair at every level.
    Constant(WeightPair),
    /// Pair `k` drives the step from level `k` to level `k + 1`.
    PerLevel(Vec<WeightPair>),
}

impl WeightSchedule {
    pub fn chaikin() -> Self {
        WeightSchedule::Constant(WeightPair::chaikin())
    }

    /// Pair used at level `k`, if the schedule covers it.
    pub fn pair(&self, k: usize) -> Option<&WeightPair> {
        match self {
            WeightSchedule::Constant(p) => Some(p),
            WeightSchedule::PerLevel(ps) => ps.get(k),
        }
    }

    /// Number of levels covered, `None` when unbounded.
    pub fn len(&self) -> Option<usize> {
        match self {
            WeightSchedule::Constant(_) => None,
            WeightSchedule::PerLevel(ps) => Some(ps.len()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    fn pairs(&self) -> &[WeightPair] {
        match self {
            WeightSchedule::Constant(p) => std::slice::from_ref(p),
            WeightSchedule::PerLevel(ps) => ps,
        }
    }
}

/// Outcome of checking a schedule against the convergence conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// `mu` of each distinct level (a single entry for a constant schedule).
    pub mu_per_level: Vec<f64>,
    pub mu_sup: f64,
    /// `mu_sup < 1`.
    pub points_convergent: bool,
    /// `mu_sup < sqrt(3)/3`.
    pub nets_convergent: bool,
    /// Smallest class quantity seen anywhere in the schedule.
    pub margin: f64,
}

impl Certificate {
    fn from_levels(mu_per_level: Vec<f64>, margin: f64) -> Result<Self, WeightError> {
        if mu_per_level.is_empty() {
            return Err(WeightError::EmptySchedule);
        }
        let mu_sup = mu_per_level.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            mu_per_level,
            mu_sup,
            points_convergent: mu_sup < 1.0,
            nets_convergent: mu_sup < NET_THRESHOLD,
            margin,
        })
    }
}

/// Certifies a point-refinement schedule.
pub fn certify(schedule: &WeightSchedule) -> Result<Certificate, WeightError> {
    let pairs = schedule.pairs();
    let margin = pairs
        .iter()
        .map(WeightPair::class_margin)
        .fold(f64::INFINITY, f64::min);
    Certificate::from_levels(pairs.iter().map(WeightPair::mu).collect(), margin)
}

/// Certifies a net-refinement run, where each level uses the larger of the
/// `s`- and `t`-direction factors.
///
/// When one schedule is constant and the other per-level, the constant one
/// is paired with every level of the other. Two constant schedules give a
/// single entry.
pub fn certify_nets(
    s_schedule: &WeightSchedule,
    t_schedule: &WeightSchedule,
) -> Result<Certificate, WeightError> {
    let levels = match (s_schedule.len(), t_schedule.len()) {
        (None, None) => 1,
        (Some(n), None) | (None, Some(n)) => n,
        (Some(a), Some(b)) => a.min(b),
    };
    let mut mus = Vec::with_capacity(levels);
    let mut margin = f64::INFINITY;
    for k in 0..levels {
        // both exist for k < levels
        let (s, t) = (s_schedule.pair(k).unwrap(), t_schedule.pair(k).unwrap());
        mus.push(s.mu().max(t.mu()));
        margin = margin.min(s.class_margin()).min(t.class_margin());
    }
    Certificate::from_levels(mus, margin)
}
