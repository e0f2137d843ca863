//! Corner cutting of point sequences in `R^n`.
//!
//! Each refinement level carries the points together with a strictly
//! increasing parameter sequence, refined by the same convex combinations
//! as the points. The piecewise-linear interpolant through `(u_i, P_i)` is
//! what successive levels are compared on.
//!
//! Open sequences lose their two end segments' outer parts at every step, so
//! their parameter domain shrinks inward. Closed sequences are cyclic: the
//! parameter of point `i + m` is `u_i + period`.

use thiserror::Error;

use crate::weights::{certify, Certificate, WeightError, WeightPair, WeightSchedule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PointsError {
    #[error("{topology:?} polyline needs at least {required} points, got {got}")]
    TooFewPoints {
        topology: Topology,
        required: usize,
        got: usize,
    },
    #[error("{params} parameters for {points} points")]
    ParamCountMismatch { params: usize, points: usize },
    #[error("parameters must be strictly increasing and finite (index {0})")]
    NonIncreasingParams(usize),
    #[error("closed period {period} must exceed the parameter span {span}")]
    BadPeriod { period: f64, span: f64 },
    #[error("point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("points must have at least one coordinate")]
    ZeroDimension,
    #[error("parameter {x} outside [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("closed polyline of {points} points is not a whole number of weight periods ({period})")]
    PeriodMismatch { points: usize, period: usize },
    #[error("schedule is not certified convergent (mu = {mu_sup}); pass force to run anyway")]
    NotCertified { mu_sup: f64 },
    #[error("schedule has no weights for level {0}")]
    ScheduleTooShort(usize),
    #[error("level index {k} out of range for a run with {levels} levels")]
    InvalidLevel { k: usize, levels: usize },
    #[error("need at least one sample per interval")]
    TooFewSamples,
    #[error(transparent)]
    Weights(#[from] WeightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Open,
    Closed,
}

/// Points and parameters at one refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineLevel {
    level: usize,
    dim: usize,
    /// Row-major, `dim` coordinates per point.
    coords: Vec<f64>,
    u: Vec<f64>,
    /// `Some(period)` for closed polylines.
    period: Option<f64>,
    /// Segment lengths in parameter space. Refined levels carry them by
    /// recurrence rather than as differences of nearby parameters, which
    /// would lose digits once gaps are small against `|u|`.
    gaps: Vec<f64>,
}

impl PolylineLevel {
    /// Open polyline with parameters `0, 1, 2, ...`.
    pub fn open(points: &[Vec<f64>]) -> Result<Self, PointsError> {
        let u = (0..points.len()).map(|i| i as f64).collect();
        Self::open_with_params(points, u)
    }

    pub fn open_with_params(points: &[Vec<f64>], u: Vec<f64>) -> Result<Self, PointsError> {
        Self::build(points, u, None)
    }

    /// Closed polyline with parameters `0, 1, ..., m-1` and period `m`.
    pub fn closed(points: &[Vec<f64>]) -> Result<Self, PointsError> {
        let u = (0..points.len()).map(|i| i as f64).collect();
        Self::closed_with_params(points, u, points.len() as f64)
    }

    /// Closed polyline; the wrap-around segment runs from `u[m-1]` to
    /// `u[0] + period`.
    pub fn closed_with_params(
        points: &[Vec<f64>],
        u: Vec<f64>,
        period: f64,
    ) -> Result<Self, PointsError> {
        Self::build(points, u, Some(period))
    }

    fn build(points: &[Vec<f64>], u: Vec<f64>, period: Option<f64>) -> Result<Self, PointsError> {
        let topology = if period.is_some() { Topology::Closed } else { Topology::Open };
        let required = min_points(topology);
        if points.len() < required {
            return Err(PointsError::TooFewPoints {
                topology,
                required,
                got: points.len(),
            });
        }
        if u.len() != points.len() {
            return Err(PointsError::ParamCountMismatch {
                params: u.len(),
                points: points.len(),
            });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(PointsError::ZeroDimension);
        }
        let mut coords = Vec::with_capacity(dim * points.len());
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(PointsError::DimensionMismatch {
                    index,
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        check_increasing(&u)?;
        if let Some(period) = period {
            let span = u[u.len() - 1] - u[0];
            if !(period > span) || !period.is_finite() {
                return Err(PointsError::BadPeriod { period, span });
            }
        }
        let mut level = Self {
            level: 0,
            dim,
            coords,
            u,
            period,
            gaps: Vec::new(),
        };
        level.gaps = (0..level.segments())
            .map(|s| {
                let (a, b, _, _) = level.segment(s);
                b - a
            })
            .collect();
        Ok(level)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn topology(&self) -> Topology {
        if self.period.is_some() {
            Topology::Closed
        } else {
            Topology::Open
        }
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn params(&self) -> &[f64] {
        &self.u
    }

    /// Parameter length of each segment, wrap segment last when closed.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Number of linear pieces (including the wrap segment when closed).
    pub fn segments(&self) -> usize {
        match self.period {
            Some(_) => self.len(),
            None => self.len() - 1,
        }
    }

    /// Endpoints `(u_a, u_b)` and point indices `(i, j)` of segment `seg`.
    fn segment(&self, seg: usize) -> (f64, f64, usize, usize) {
        let m = self.len();
        if seg + 1 < m {
            (self.u[seg], self.u[seg + 1], seg, seg + 1)
        } else {
            // wrap segment of a closed polyline
            let period = self.period.expect("wrap segment on open polyline");
            (self.u[m - 1], self.u[0] + period, m - 1, 0)
        }
    }

    /// Parameter interval on which the interpolant is defined. For closed
    /// polylines this is one period starting at `u_0`.
    pub fn domain(&self) -> (f64, f64) {
        match self.period {
            Some(p) => (self.u[0], self.u[0] + p),
            None => (self.u[0], self.u[self.len() - 1]),
        }
    }

    /// Mesh size: the largest parameter gap.
    pub fn mesh_size(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    /// Largest `||P_{i+1} - P_i||_inf / (u_{i+1} - u_i)`, the Lipschitz
    /// constant of the interpolant in the sup norm.
    pub fn lipschitz_constant(&self) -> f64 {
        (0..self.segments())
            .map(|s| {
                let (_, _, i, j) = self.segment(s);
                sup_dist(self.point(i), self.point(j)) / self.gaps[s]
            })
            .fold(0.0, f64::max)
    }

    /// Value of the piecewise-linear interpolant at `x`, written into `out`.
    pub fn eval_into(&self, x: f64, out: &mut [f64]) -> Result<(), PointsError> {
        let (lo, hi) = self.domain();
        let x = match self.period {
            Some(p) => lo + (x - lo).rem_euclid(p),
            None => {
                if !(x >= lo && x <= hi) {
                    return Err(PointsError::OutOfDomain { x, lo, hi });
                }
                x
            }
        };
        // first knot strictly greater than x
        let pos = self.u.partition_point(|&k| k <= x);
        let seg = pos.saturating_sub(1).min(self.segments() - 1);
        let (a, b, i, j) = self.segment(seg);
        if x == a {
            out.copy_from_slice(self.point(i));
            return Ok(());
        }
        let (pa, pb) = (self.point(i), self.point(j));
        for ((o, &fa), &fb) in out.iter_mut().zip(pa).zip(pb) {
            *o = linear(a, b, fa, fb, x);
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<Vec<f64>, PointsError> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out)?;
        Ok(out)
    }

    /// One corner cutting step with the given weights.
    pub fn corner_cut(&self, pair: &WeightPair) -> Result<Self, PointsError> {
        let m = self.len();
        let topology = self.topology();
        if m < min_points(topology) {
            return Err(PointsError::TooFewPoints {
                topology,
                required: min_points(topology),
                got: m,
            });
        }
        if topology == Topology::Closed && m % pair.period() != 0 {
            return Err(PointsError::PeriodMismatch {
                points: m,
                period: pair.period(),
            });
        }
        let segs = self.segments();
        let mut coords = Vec::with_capacity(2 * segs * self.dim);
        let mut u = Vec::with_capacity(2 * segs);
        let mut gaps = Vec::with_capacity(2 * segs);
        for s in 0..segs {
            let (a, b, i, j) = self.segment(s);
            let (alpha, beta) = (pair.alpha(s as isize), pair.beta(s as isize));
            let (pi, pj) = (self.point(i), self.point(j));
            for w in [alpha, beta] {
                coords.extend(pi.iter().zip(pj).map(|(&x, &y)| (1.0 - w) * x + w * y));
                u.push((1.0 - w) * a + w * b);
            }
            gaps.push((beta - alpha) * self.gaps[s]);
            let next = s + 1;
            if next < segs {
                gaps.push((1.0 - beta) * self.gaps[s] + pair.alpha(next as isize) * self.gaps[next]);
            } else if self.period.is_some() {
                gaps.push((1.0 - beta) * self.gaps[s] + pair.alpha(next as isize) * self.gaps[0]);
            }
        }
        Ok(Self {
            level: self.level + 1,
            dim: self.dim,
            coords,
            u,
            period: self.period,
            gaps,
        })
    }
}

fn min_points(topology: Topology) -> usize {
    match topology {
        Topology::Open => 2,
        Topology::Closed => 3,
    }
}

fn check_increasing(u: &[f64]) -> Result<(), PointsError> {
    if let Some(i) = u.iter().position(|x| !x.is_finite()) {
        return Err(PointsError::NonIncreasingParams(i));
    }
    match u.windows(2).position(|w| !(w[1] > w[0])) {
        Some(i) => Err(PointsError::NonIncreasingParams(i + 1)),
        None => Ok(()),
    }
}

fn linear(a: f64, b: f64, fa: f64, fb: f64, x: f64) -> f64 {
    (x - a) / (b - a) * fb + (b - x) / (b - a) * fa
}

fn sup_dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Options for [`run_points`].
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Run even when the schedule is not certified.
    pub force: bool,
}

/// All levels of a corner cutting run and the bounds that govern them.
#[derive(Debug, Clone)]
pub struct PointsRun {
    pub levels: Vec<PolylineLevel>,
    pub certificate: Certificate,
    /// Lipschitz constant of the level-0 interpolant.
    pub lipschitz_l: f64,
    /// `tail_bounds[k]` bounds the distance from level `k` to any later
    /// level. Empty when `mu_sup >= 1`.
    pub tail_bounds: Vec<f64>,
}

impl PointsRun {
    /// Number of refinement steps performed.
    pub fn steps(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn mesh_sizes(&self) -> Vec<f64> {
        self.levels.iter().map(PolylineLevel::mesh_size).collect()
    }

    /// `L d^{(k+1)} / 2`, the bound on the distance between levels `k` and `k+1`.
    pub fn successive_bound(&self, k: usize) -> Result<f64, PointsError> {
        self.check_step(k)?;
        Ok(0.5 * self.lipschitz_l * self.levels[k + 1].mesh_size())
    }

    /// Measured sup distance between levels `k` and `k + 1`.
    pub fn successive_sup_distance(
        &self,
        k: usize,
        samples_per_interval: usize,
    ) -> Result<f64, PointsError> {
        self.check_step(k)?;
        sup_distance(&self.levels[k], &self.levels[k + 1], samples_per_interval)
    }

    fn check_step(&self, k: usize) -> Result<(), PointsError> {
        if k >= self.steps() {
            return Err(PointsError::InvalidLevel {
                k,
                levels: self.levels.len(),
            });
        }
        Ok(())
    }
}

/// `L d0 mu^{k+1} / (2 (1 - mu))`.
pub fn tail_bound(lipschitz_l: f64, d0: f64, mu: f64, k: usize) -> f64 {
    lipschitz_l * d0 * mu.powi(k as i32 + 1) / (2.0 * (1.0 - mu))
}

/// Runs `steps` corner cutting steps from `initial`.
pub fn run_points(
    initial: PolylineLevel,
    schedule: &WeightSchedule,
    steps: usize,
    options: RunOptions,
) -> Result<PointsRun, PointsError> {
    if let Some(n) = schedule.len() {
        if n < steps {
            return Err(PointsError::ScheduleTooShort(n));
        }
    }
    let certificate = certify(schedule)?;
    if !certificate.points_convergent && !options.force {
        return Err(PointsError::NotCertified {
            mu_sup: certificate.mu_sup,
        });
    }
    let lipschitz_l = initial.lipschitz_constant();
    let d0 = initial.mesh_size();
    let mut levels = Vec::with_capacity(steps + 1);
    levels.push(initial);
    for k in 0..steps {
        let pair = schedule.pair(k).ok_or(PointsError::ScheduleTooShort(k))?;
        let next = levels[k].corner_cut(pair)?;
        levels.push(next);
    }
    let tail_bounds = if certificate.points_convergent {
        (0..=steps)
            .map(|k| tail_bound(lipschitz_l, d0, certificate.mu_sup, k))
            .collect()
    } else {
        Vec::new()
    };
    Ok(PointsRun {
        levels,
        certificate,
        lipschitz_l,
        tail_bounds,
    })
}

/// Sup-norm distance between two interpolants over the intersection of
/// their domains.
///
/// Samples are the breakpoints of both levels plus `samples_per_interval`
/// uniformly spaced points (endpoints included) on every interval of the
/// finer level. The difference of two piecewise-linear functions is linear
/// between consecutive breakpoints, so the maximum is attained on the
/// sample set.
pub fn sup_distance(
    a: &PolylineLevel,
    b: &PolylineLevel,
    samples_per_interval: usize,
) -> Result<f64, PointsError> {
    if samples_per_interval < 1 {
        return Err(PointsError::TooFewSamples);
    }
    let (fine, coarse) = if b.len() >= a.len() { (b, a) } else { (a, b) };
    let (flo, fhi) = fine.domain();
    let (clo, chi) = coarse.domain();
    let (lo, hi) = match (fine.period, coarse.period) {
        // closed levels: compare over one period of the finer one
        (Some(_), Some(_)) => (flo, fhi),
        _ => (flo.max(clo), fhi.min(chi)),
    };
    let mut xs = Vec::new();
    for s in 0..fine.segments() {
        let (ua, ub, _, _) = fine.segment(s);
        let n = samples_per_interval.max(2);
        for q in 0..n {
            let x = ua + (ub - ua) * q as f64 / (n - 1) as f64;
            xs.push(x);
        }
    }
    for level in [coarse, fine] {
        let p = level.period.unwrap_or(0.0);
        for &u in &level.u {
            // shift closed-level knots into [lo, hi]
            let x = if p > 0.0 { lo + (u - lo).rem_euclid(p) } else { u };
            xs.push(x);
        }
    }
    let mut va = vec![0.0; fine.dim];
    let mut vb = vec![0.0; fine.dim];
    let mut best = 0.0f64;
    for x in xs.into_iter().filter(|&x| x >= lo && x <= hi) {
        fine.eval_into(x, &mut va)?;
        coarse.eval_into(x, &mut vb)?;
        best = best.max(sup_dist(&va, &vb));
    }
    Ok(best)
}
