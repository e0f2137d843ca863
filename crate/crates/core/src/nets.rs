//! Corner cutting of nets of u-functions.
//!
//! A net lives on a grid of lines `s = s_i`, `t = t_j`. Its u-functions are
//! `phi_j(s) = N(s, t_j)` along the horizontal lines and `psi_i(t) = N(s_i, t)`
//! along the vertical ones. The piecewise Coons surface fills every grid cell
//! with the Coons patch of its four boundary u-functions.
//!
//! One refinement step (the BC operator) builds the Coons surface of the
//! current net, refines both knot sequences by corner cutting, and restricts
//! the surface to the new grid lines. Restricted u-functions are lazy traces
//! of the previous surface; each surface memoizes its point evaluations, so
//! the cost of evaluating level `k` stays manageable despite the recursion.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::transfinite::{
    coons_blend, msdd_unchecked, CellSample, Corners, Rect, Representation, TransfiniteError,
    UFunction, DEFAULT_CORNER_TOL,
};
use crate::value::Value;
use crate::weights::{certify_nets, Certificate, WeightError, WeightPair, WeightSchedule, NET_THRESHOLD};

/// Default number of cached point evaluations per surface.
pub const DEFAULT_CACHE_BUDGET: usize = 1 << 21;
/// Default cap on lazily nested refinement levels.
pub const DEFAULT_MAX_DEPTH: usize = 10;
/// Samples per grid interval used when the BMSDD constant is estimated.
pub const DEFAULT_BMSDD_SAMPLES: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("{axis}-knots need at least two entries, got {got}")]
    TooFewKnots { axis: char, got: usize },
    #[error("{axis}-knots must be strictly increasing and finite (index {index})")]
    NonIncreasingKnots { axis: char, index: usize },
    #[error("expected {expected} {which} u-functions, got {got}")]
    FunctionCount {
        which: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{which} u-function {index} has domain [{lo}, {hi}], which does not cover [{need_lo}, {need_hi}]")]
    FunctionDomain {
        which: &'static str,
        index: usize,
        lo: f64,
        hi: f64,
        need_lo: f64,
        need_hi: f64,
    },
    #[error("net is not C0: {count} crossing(s) disagree, worst at ({i}, {j}) by {mismatch}")]
    NotC0 {
        count: usize,
        i: usize,
        j: usize,
        mismatch: f64,
    },
    #[error("({s}, {t}) outside the surface domain [{}, {}] x [{}, {}]", .rect.a, .rect.b, .rect.c, .rect.d)]
    OutOfDomain { s: f64, t: f64, rect: Rect },
    #[error("refined grid is not contained in the surface domain")]
    GridOutsideSurface,
    #[error("schedule is not certified for nets (mu* = {mu_star}, threshold sqrt(3)/3); pass force to run anyway")]
    NotCertified { mu_star: f64 },
    #[error("mu* = {0} outside (0, sqrt(3)/3)")]
    MuOutOfRange(f64),
    #[error("{which} schedule has no weights for level {level}")]
    ScheduleTooShort { which: char, level: usize },
    #[error("{requested} lazily nested levels exceed the limit of {max}; enable resampling or raise the limit")]
    DepthExceeded { requested: usize, max: usize },
    #[error("level index {k} out of range for a run with {levels} levels")]
    InvalidLevel { k: usize, levels: usize },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("BMSDD constant must be non-negative, got {0}")]
    NegativeConstant(f64),
    #[error(transparent)]
    Transfinite(#[from] TransfiniteError),
    #[error(transparent)]
    Weights(#[from] WeightError),
}

/// A grid of lines given by two strictly increasing knot sequences. The
/// origin is `(s[0], t[0])`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridT {
    s: Vec<f64>,
    t: Vec<f64>,
}

impl GridT {
    pub fn new(s: Vec<f64>, t: Vec<f64>) -> Result<Self, NetError> {
        check_knots('s', &s)?;
        check_knots('t', &t)?;
        Ok(Self { s, t })
    }

    /// Integer knots `s0..=s1` by `t0..=t1`.
    pub fn integer_window(s0: i64, s1: i64, t0: i64, t1: i64) -> Result<Self, NetError> {
        Self::new(
            (s0..=s1).map(|i| i as f64).collect(),
            (t0..=t1).map(|j| j as f64).collect(),
        )
    }

    pub fn s_knots(&self) -> &[f64] {
        &self.s
    }

    pub fn t_knots(&self) -> &[f64] {
        &self.t
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.s[0], self.t[0])
    }

    /// Bounding rectangle of the grid.
    pub fn rect(&self) -> Rect {
        Rect {
            a: self.s[0],
            b: self.s[self.s.len() - 1],
            c: self.t[0],
            d: self.t[self.t.len() - 1],
        }
    }

    /// Largest gap between consecutive `s`-knots.
    pub fn mesh_s(&self) -> f64 {
        max_gap(&self.s)
    }

    pub fn mesh_t(&self) -> f64 {
        max_gap(&self.t)
    }

    /// Corner cuts both knot sequences.
    pub fn refine(&self, gs: &WeightPair, gt: &WeightPair) -> Result<Self, NetError> {
        Self::new(refine_knots(&self.s, gs), refine_knots(&self.t, gt))
    }

    fn cell_s(&self, s: f64) -> usize {
        cell_index(&self.s, s)
    }

    fn cell_t(&self, t: f64) -> usize {
        cell_index(&self.t, t)
    }
}

fn check_knots(axis: char, k: &[f64]) -> Result<(), NetError> {
    if k.len() < 2 {
        return Err(NetError::TooFewKnots { axis, got: k.len() });
    }
    if let Some(index) = k.iter().position(|x| !x.is_finite()) {
        return Err(NetError::NonIncreasingKnots { axis, index });
    }
    if let Some(i) = k.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(NetError::NonIncreasingKnots { axis, index: i + 1 });
    }
    Ok(())
}

fn max_gap(k: &[f64]) -> f64 {
    k.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn refine_knots(k: &[f64], pair: &WeightPair) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * (k.len() - 1));
    for (i, w) in k.windows(2).enumerate() {
        let (a, b) = (pair.alpha(i as isize), pair.beta(i as isize));
        out.push((1.0 - a) * w[0] + a * w[1]);
        out.push((1.0 - b) * w[0] + b * w[1]);
    }
    out
}

/// Cell containing `x`: ties go to the cell on the right, the last knot to
/// the last cell. Points outside clamp to the end cells.
fn cell_index(k: &[f64], x: f64) -> usize {
    k.partition_point(|&v| v <= x).saturating_sub(1).min(k.len() - 2)
}

/// Crossing where the two u-functions through it disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingMismatch {
    pub i: usize,
    pub j: usize,
    /// `|phi_j(s_i) - psi_i(t_j)|` in the sup norm.
    pub mismatch: f64,
}

/// A net of u-functions on a grid of lines.
#[derive(Debug, Clone)]
pub struct NetOfFunctions<V> {
    grid: GridT,
    phi: Vec<UFunction<V>>,
    psi: Vec<UFunction<V>>,
    level: usize,
}

impl<V: Value> NetOfFunctions<V> {
    /// `phi[j]` runs along `t = t_j`, `psi[i]` along `s = s_i`. Each must be
    /// defined across the whole grid. Compatibility at crossings is not
    /// checked here; see [`NetOfFunctions::check_c0`].
    pub fn new(
        grid: GridT,
        phi: Vec<UFunction<V>>,
        psi: Vec<UFunction<V>>,
        level: usize,
    ) -> Result<Self, NetError> {
        let r = grid.rect();
        check_family("phi", &phi, grid.t.len(), r.a, r.b)?;
        check_family("psi", &psi, grid.s.len(), r.c, r.d)?;
        Ok(Self {
            grid,
            phi,
            psi,
            level,
        })
    }

    /// The net of grid-line traces of a bivariate function.
    pub fn from_function<F>(grid: GridT, f: F) -> Result<Self, NetError>
    where
        F: Fn(f64, f64) -> V + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let r = grid.rect();
        let mut phi = Vec::with_capacity(grid.t.len());
        for &t in &grid.t {
            let f = Arc::clone(&f);
            phi.push(UFunction::analytic(r.a, r.b, move |s| f(s, t))?);
        }
        let mut psi = Vec::with_capacity(grid.s.len());
        for &s in &grid.s {
            let f = Arc::clone(&f);
            psi.push(UFunction::analytic(r.c, r.d, move |t| f(s, t))?);
        }
        Self::new(grid, phi, psi, 0)
    }

    pub fn grid(&self) -> &GridT {
        &self.grid
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `phi_j`, the u-function along `t = t_j`.
    pub fn phi(&self, j: usize) -> &UFunction<V> {
        &self.phi[j]
    }

    /// `psi_i`, the u-function along `s = s_i`.
    pub fn psi(&self, i: usize) -> &UFunction<V> {
        &self.psi[i]
    }

    /// Net value at crossing `(s_i, t_j)`, read from `phi_j`.
    pub fn crossing(&self, i: usize, j: usize) -> Result<V, NetError> {
        Ok(self.phi[j].eval(self.grid.s[i])?)
    }

    /// Crossings where `|phi_j(s_i) - psi_i(t_j)| > tol`. Empty for a C0 net.
    pub fn check_c0(&self, tol: f64) -> Result<Vec<CrossingMismatch>, NetError> {
        let mut bad = Vec::new();
        for (j, &t) in self.grid.t.iter().enumerate() {
            for (i, &s) in self.grid.s.iter().enumerate() {
                let mismatch = (self.phi[j].eval(s)? - self.psi[i].eval(t)?).sup_norm();
                if !(mismatch <= tol) {
                    bad.push(CrossingMismatch { i, j, mismatch });
                }
            }
        }
        Ok(bad)
    }

    /// Replaces every u-function by its piecewise-linear interpolant with
    /// `per_cell` pieces per grid interval. Crossing values are kept
    /// exactly, so a C0 net stays C0.
    pub fn resample(&self, per_cell: usize) -> Result<Self, NetError> {
        if per_cell < 1 {
            return Err(NetError::TooFewSamples { min: 1, got: per_cell });
        }
        let fine = |k: &[f64]| -> Vec<f64> {
            let mut xs = Vec::with_capacity(per_cell * (k.len() - 1) + 1);
            for w in k.windows(2) {
                for q in 0..per_cell {
                    xs.push(w[0] + (w[1] - w[0]) * q as f64 / per_cell as f64);
                }
            }
            xs.push(k[k.len() - 1]);
            xs
        };
        let (xs, ys) = (fine(&self.grid.s), fine(&self.grid.t));
        let sample = |u: &UFunction<V>, at: &[f64]| -> Result<UFunction<V>, NetError> {
            let vals = at.iter().map(|&x| u.eval(x)).collect::<Result<Vec<_>, _>>()?;
            Ok(UFunction::piecewise_linear(at.to_vec(), vals)?)
        };
        let phi = self.phi.iter().map(|u| sample(u, &xs)).collect::<Result<_, _>>()?;
        let psi = self.psi.iter().map(|u| sample(u, &ys)).collect::<Result<_, _>>()?;
        Self::new(self.grid.clone(), phi, psi, self.level)
    }

    /// Largest crossing magnitude, at least 1.
    fn value_scale(&self) -> Result<f64, NetError> {
        let mut scale = 1.0f64;
        for phi in &self.phi {
            for &s in &self.grid.s {
                scale = scale.max(phi.eval(s)?.sup_norm());
            }
        }
        Ok(scale)
    }
}

fn check_family<V: Value>(
    which: &'static str,
    fs: &[UFunction<V>],
    expected: usize,
    need_lo: f64,
    need_hi: f64,
) -> Result<(), NetError> {
    if fs.len() != expected {
        return Err(NetError::FunctionCount {
            which,
            expected,
            got: fs.len(),
        });
    }
    for (index, f) in fs.iter().enumerate() {
        let (lo, hi) = f.domain();
        if !(lo <= need_lo && hi >= need_hi) {
            return Err(NetError::FunctionDomain {
                which,
                index,
                lo,
                hi,
                need_lo,
                need_hi,
            });
        }
    }
    Ok(())
}

fn point_key(s: f64, t: f64) -> (u64, u64) {
    // +0.0 and -0.0 share a key
    ((s + 0.0).to_bits(), (t + 0.0).to_bits())
}

/// The piecewise Coons surface of a C0 net, with memoized evaluation.
#[derive(Debug)]
pub struct PiecewiseCoonsSurface<V> {
    net: NetOfFunctions<V>,
    rect: Rect,
    cache: RwLock<HashMap<(u64, u64), V>>,
    cache_budget: usize,
}

impl<V: Value> PiecewiseCoonsSurface<V> {
    /// Checks that the net is C0 to a relative `1e-9` and builds its
    /// surface.
    pub fn new(net: NetOfFunctions<V>) -> Result<Self, NetError> {
        Self::with_budget(net, DEFAULT_CACHE_BUDGET)
    }

    pub fn with_budget(net: NetOfFunctions<V>, cache_budget: usize) -> Result<Self, NetError> {
        let tol = DEFAULT_CORNER_TOL * net.value_scale()?;
        let bad = net.check_c0(tol)?;
        if let Some(worst) = bad
            .iter()
            .copied()
            .max_by(|a, b| a.mismatch.total_cmp(&b.mismatch))
        {
            return Err(NetError::NotC0 {
                count: bad.len(),
                i: worst.i,
                j: worst.j,
                mismatch: worst.mismatch,
            });
        }
        Ok(Self::trusted(net, cache_budget))
    }

    /// For nets that are C0 by construction (surface restrictions).
    fn trusted(net: NetOfFunctions<V>, cache_budget: usize) -> Self {
        let rect = net.grid.rect();
        Self {
            net,
            rect,
            cache: RwLock::new(HashMap::new()),
            cache_budget,
        }
    }

    pub fn net(&self) -> &NetOfFunctions<V> {
        &self.net
    }

    pub fn domain(&self) -> Rect {
        self.rect
    }

    /// Number of memoized point values.
    pub fn cached_points(&self) -> usize {
        self.cache.read().map(|c| c.len()).unwrap_or(0)
    }

    /// Value of the surface at `(s, t)`. Points within a relative `1e-12` of
    /// the domain are clamped onto it.
    pub fn eval(&self, s: f64, t: f64) -> Result<V, NetError> {
        let (s, t) = self.clamp(s, t)?;
        let key = point_key(s, t);
        if let Some(v) = self.cache.read().ok().and_then(|c| c.get(&key).copied()) {
            return Ok(v);
        }
        let v = self.eval_uncached(s, t)?;
        if let Ok(mut c) = self.cache.write() {
            if c.len() < self.cache_budget {
                c.insert(key, v);
            }
        }
        Ok(v)
    }

    fn clamp(&self, s: f64, t: f64) -> Result<(f64, f64), NetError> {
        let r = self.rect;
        let slack = |lo: f64, hi: f64| 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        let (ss, ts) = (slack(r.a, r.b), slack(r.c, r.d));
        if !(s >= r.a - ss && s <= r.b + ss && t >= r.c - ts && t <= r.d + ts) {
            return Err(NetError::OutOfDomain { s, t, rect: r });
        }
        Ok((s.clamp(r.a, r.b), t.clamp(r.c, r.d)))
    }

    fn eval_uncached(&self, s: f64, t: f64) -> Result<V, NetError> {
        let g = &self.net.grid;
        let (i, j) = (g.cell_s(s), g.cell_t(t));
        let (s0, s1, t0, t1) = (g.s[i], g.s[i + 1], g.t[j], g.t[j + 1]);
        let (phi0, phi1) = (&self.net.phi[j], &self.net.phi[j + 1]);
        let (psi0, psi1) = (&self.net.psi[i], &self.net.psi[i + 1]);
        let cell = CellSample {
            psi0_t: psi0.eval(t)?,
            psi1_t: psi1.eval(t)?,
            phi0_s: phi0.eval(s)?,
            phi1_s: phi1.eval(s)?,
            corners: Corners::new(phi0.eval(s0)?, phi1.eval(s0)?, phi0.eval(s1)?, phi1.eval(s1)?),
        };
        Ok(coons_blend(&cell, (s1 - s0, t1 - t0), s - s0, t - t0))
    }
}

/// Restricts a surface to the lines of `grid`, giving a C0 net whose
/// u-functions are lazy traces of the surface.
pub fn restrict_to_grid<V: Value>(
    surface: &Arc<PiecewiseCoonsSurface<V>>,
    grid: GridT,
) -> Result<NetOfFunctions<V>, NetError> {
    let outer = surface.domain();
    let inner = grid.rect();
    if !(inner.a >= outer.a && inner.b <= outer.b && inner.c >= outer.c && inner.d <= outer.d) {
        return Err(NetError::GridOutsideSurface);
    }
    let to_transfinite = |e: NetError, x: f64, lo: f64, hi: f64| match e {
        NetError::Transfinite(t) => t,
        _ => TransfiniteError::OutOfDomain { x, lo, hi },
    };
    let mut phi = Vec::with_capacity(grid.t.len());
    for &t in &grid.t {
        let surf = Arc::clone(surface);
        phi.push(UFunction::fallible(inner.a, inner.b, Representation::SurfaceTrace, move |s| {
            surf.eval(s, t).map_err(|e| to_transfinite(e, s, inner.a, inner.b))
        })?);
    }
    let mut psi = Vec::with_capacity(grid.s.len());
    for &s in &grid.s {
        let surf = Arc::clone(surface);
        psi.push(UFunction::fallible(inner.c, inner.d, Representation::SurfaceTrace, move |t| {
            surf.eval(s, t).map_err(|e| to_transfinite(e, t, inner.c, inner.d))
        })?);
    }
    NetOfFunctions::new(grid, phi, psi, surface.net.level + 1)
}

/// One BC step: refine the grid and restrict the surface to it.
pub fn bc_step<V: Value>(
    surface: &Arc<PiecewiseCoonsSurface<V>>,
    gs: &WeightPair,
    gt: &WeightPair,
) -> Result<NetOfFunctions<V>, NetError> {
    let grid = surface.net.grid.refine(gs, gt)?;
    restrict_to_grid(surface, grid)
}

/// Largest sampled MSDD over the two families of configurations that
/// control the BMSDD constant of a net: adjacent `s`-knots with both
/// `t`-nodes inside one `t`-interval, and the mirror image.
///
/// For two neighbouring lines the MSDD is the divided difference of their
/// difference function, and a divided difference over a wide node pair is
/// a convex combination of those over the adjacent sample pairs in between.
/// So adjacent sample pairs already attain the sampled maximum.
pub fn estimate_bmsdd<V: Value>(net: &NetOfFunctions<V>, samples_per_interval: usize) -> Result<f64, NetError> {
    if samples_per_interval < 2 {
        return Err(NetError::TooFewSamples {
            min: 2,
            got: samples_per_interval,
        });
    }
    let n = samples_per_interval;
    let g = &net.grid;
    let mut best = 0.0f64;
    // lines u0, u1 at knots k0 < k1, sampled across every interval of `other`
    let mut scan = |u0: &UFunction<V>, u1: &UFunction<V>, k0: f64, k1: f64, other: &[f64]| -> Result<(), NetError> {
        for w in other.windows(2) {
            let mut prev: Option<(f64, V, V)> = None;
            for q in 0..n {
                let x = if q == n - 1 { w[1] } else { w[0] + (w[1] - w[0]) * q as f64 / (n - 1) as f64 };
                let (v0, v1) = (u0.eval(x)?, u1.eval(x)?);
                if let Some((xp, p0, p1)) = prev {
                    let m = msdd_unchecked(k0, k1, xp, x, p0, v1, p1, v0);
                    best = best.max(m.sup_norm());
                }
                prev = Some((x, v0, v1));
            }
        }
        Ok(())
    };
    for i in 0..g.s.len() - 1 {
        scan(&net.psi[i], &net.psi[i + 1], g.s[i], g.s[i + 1], &g.t)?;
    }
    for j in 0..g.t.len() - 1 {
        scan(&net.phi[j], &net.phi[j + 1], g.t[j], g.t[j + 1], &g.s)?;
    }
    Ok(best)
}

/// `(3 L H / 4) (3 mu*^2)^k`, the bound on the distance between the Coons
/// surfaces of levels `k` and `k + 1` in terms of level-0 data.
pub fn net_tail_bound(l: f64, h: f64, mu_star: f64, k: usize, force: bool) -> Result<f64, NetError> {
    if !(l >= 0.0) {
        return Err(NetError::NegativeConstant(l));
    }
    if !force && !(mu_star > 0.0 && mu_star < NET_THRESHOLD) {
        return Err(NetError::MuOutOfRange(mu_star));
    }
    Ok(3.0 * l * h / 4.0 * (3.0 * mu_star * mu_star).powi(k as i32))
}

/// Sup distance between two surfaces on a `samples x samples` grid over
/// `rect`, endpoints included.
pub fn surface_distance<V: Value>(
    a: &PiecewiseCoonsSurface<V>,
    b: &PiecewiseCoonsSurface<V>,
    rect: &Rect,
    samples: usize,
) -> Result<f64, NetError> {
    if samples < 2 {
        return Err(NetError::TooFewSamples { min: 2, got: samples });
    }
    let mut best = 0.0f64;
    for (s, t) in sample_grid(rect, samples) {
        best = best.max((a.eval(s, t)? - b.eval(s, t)?).sup_norm());
    }
    Ok(best)
}

/// Row-major `samples x samples` lattice over `rect`, `t` varying fastest.
pub fn sample_grid(rect: &Rect, samples: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
    let at = move |lo: f64, hi: f64, q: usize| {
        if q + 1 == samples {
            hi
        } else {
            lo + (hi - lo) * q as f64 / (samples - 1) as f64
        }
    };
    (0..samples).flat_map(move |p| (0..samples).map(move |q| (at(rect.a, rect.b, p), at(rect.c, rect.d, q))))
}

/// Options for [`run_nets`].
#[derive(Debug, Clone)]
pub struct NetRunOptions {
    /// Run even when `mu* >= sqrt(3)/3`; bounds are then omitted.
    pub force: bool,
    /// Known BMSDD constant of the initial net. Estimated when absent.
    pub bmsdd: Option<f64>,
    pub bmsdd_samples: usize,
    pub cache_budget: usize,
    pub max_depth: usize,
    /// Replace each level's traces by piecewise-linear samples with this
    /// many pieces per cell.
    pub resample: Option<usize>,
}

impl Default for NetRunOptions {
    fn default() -> Self {
        Self {
            force: false,
            bmsdd: None,
            bmsdd_samples: DEFAULT_BMSDD_SAMPLES,
            cache_budget: DEFAULT_CACHE_BUDGET,
            max_depth: DEFAULT_MAX_DEPTH,
            resample: None,
        }
    }
}

/// Levels of a net refinement run and the bounds that govern them.
#[derive(Debug)]
pub struct NetRun<V> {
    pub surfaces: Vec<Arc<PiecewiseCoonsSurface<V>>>,
    pub certificate: Certificate,
    /// BMSDD constant of the initial net.
    pub bmsdd_l: f64,
    /// `false` when `bmsdd_l` was estimated by sampling.
    pub bmsdd_exact: bool,
    /// `tail_bounds[k]` bounds the distance between levels `k` and `k + 1`;
    /// empty when the run was forced past the threshold.
    pub tail_bounds: Vec<f64>,
    /// `h_s h_t` of the initial grid.
    pub h0: f64,
}

impl<V: Value> NetRun<V> {
    pub fn steps(&self) -> usize {
        self.surfaces.len() - 1
    }

    pub fn net(&self, k: usize) -> &NetOfFunctions<V> {
        self.surfaces[k].net()
    }

    /// `(h_s, h_t)` per level.
    pub fn mesh_sizes(&self) -> Vec<(f64, f64)> {
        self.surfaces
            .iter()
            .map(|s| (s.net.grid.mesh_s(), s.net.grid.mesh_t()))
            .collect()
    }

    /// `3^{k+1} L h_s^{(k+1)} h_t^{(k+1)} / 4`.
    pub fn successive_bound(&self, k: usize) -> Result<f64, NetError> {
        self.check_step(k)?;
        let g = &self.surfaces[k + 1].net.grid;
        Ok(3f64.powi(k as i32 + 1) * self.bmsdd_l * g.mesh_s() * g.mesh_t() / 4.0)
    }

    /// Sup distance between the Coons surfaces of levels `k` and `k + 1` on
    /// a `samples x samples` lattice over the level `k + 1` domain.
    pub fn successive_distance(&self, k: usize, samples: usize) -> Result<f64, NetError> {
        self.check_step(k)?;
        let rect = self.surfaces[k + 1].domain();
        surface_distance(&self.surfaces[k], &self.surfaces[k + 1], &rect, samples)
    }

    fn check_step(&self, k: usize) -> Result<(), NetError> {
        if k >= self.steps() {
            return Err(NetError::InvalidLevel {
                k,
                levels: self.surfaces.len(),
            });
        }
        Ok(())
    }
}

/// Runs `steps` BC steps from `net0`.
pub fn run_nets<V: Value>(
    net0: NetOfFunctions<V>,
    s_schedule: &WeightSchedule,
    t_schedule: &WeightSchedule,
    steps: usize,
    options: &NetRunOptions,
) -> Result<NetRun<V>, NetError> {
    for (which, sched) in [('s', s_schedule), ('t', t_schedule)] {
        if let Some(n) = sched.len() {
            if n < steps {
                return Err(NetError::ScheduleTooShort { which, level: n });
            }
        }
    }
    if options.resample.is_none() && steps > options.max_depth {
        return Err(NetError::DepthExceeded {
            requested: steps,
            max: options.max_depth,
        });
    }
    let certificate = certify_nets(s_schedule, t_schedule)?;
    if !certificate.nets_convergent && !options.force {
        return Err(NetError::NotCertified {
            mu_star: certificate.mu_sup,
        });
    }
    let (bmsdd_l, bmsdd_exact) = match options.bmsdd {
        Some(l) if l >= 0.0 => (l, true),
        Some(l) => return Err(NetError::NegativeConstant(l)),
        None => (estimate_bmsdd(&net0, options.bmsdd_samples)?, false),
    };
    let h0 = net0.grid.mesh_s() * net0.grid.mesh_t();

    let mut surfaces = Vec::with_capacity(steps + 1);
    surfaces.push(Arc::new(PiecewiseCoonsSurface::with_budget(net0, options.cache_budget)?));
    for k in 0..steps {
        let gs = s_schedule.pair(k).ok_or(NetError::ScheduleTooShort { which: 's', level: k })?;
        let gt = t_schedule.pair(k).ok_or(NetError::ScheduleTooShort { which: 't', level: k })?;
        let mut next = bc_step(&surfaces[k], gs, gt)?;
        if let Some(m) = options.resample {
            next = next.resample(m)?;
        }
        surfaces.push(Arc::new(PiecewiseCoonsSurface::trusted(next, options.cache_budget)));
    }

    let tail_bounds = if certificate.nets_convergent {
        (0..=steps)
            .map(|k| net_tail_bound(bmsdd_l, h0, certificate.mu_sup, k, false))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    Ok(NetRun {
        surfaces,
        certificate,
        bmsdd_l,
        bmsdd_exact,
        tail_bounds,
        h0,
    })
}
