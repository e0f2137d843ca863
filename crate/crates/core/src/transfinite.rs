//! Univariate and transfinite interpolation on a single rectangle.
//!
//! This covers linear interpolation and its second divided difference
//! error form, mixed second divided differences (MSDDs), the bilinear patch,
//! the bilinearly blended Coons patch, the closed-form Coons error in terms
//! of four MSDDs, and the error bounds that follow from bounded MSDDs.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::value::Value;

/// Default relative tolerance for corner compatibility of Coons data.
pub const DEFAULT_CORNER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransfiniteError {
    #[error("interval [{a}, {b}] is empty or reversed")]
    EmptyInterval { a: f64, b: f64 },
    #[error("divided difference nodes must be pairwise distinct")]
    CoincidentNodes,
    #[error("({s}, {t}) lies outside [0, {h1}] x [0, {h2}]")]
    OutOfPatch { s: f64, t: f64, h1: f64, h2: f64 },
    #[error("u-function evaluated at {x} outside its domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("corner ({i}, {j}) mismatch {mismatch} exceeds tolerance {tol}")]
    CornerMismatch {
        i: usize,
        j: usize,
        mismatch: f64,
        tol: f64,
    },
    #[error("Lipschitz / MSDD constant must be non-negative, got {0}")]
    NegativeConstant(f64),
    #[error("piecewise-linear data needs at least two increasing knots with one value each")]
    BadSamples,
}

/// The rectangle `[a, b] x [c, d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Rect {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, TransfiniteError> {
        if !(a < b) {
            return Err(TransfiniteError::EmptyInterval { a, b });
        }
        if !(c < d) {
            return Err(TransfiniteError::EmptyInterval { a: c, b: d });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn unit() -> Self {
        Self {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
        }
    }

    /// Side lengths `(b - a, d - c)`.
    pub fn sides(&self) -> (f64, f64) {
        (self.b - self.a, self.d - self.c)
    }

    pub fn contains(&self, s: f64, t: f64) -> bool {
        s >= self.a && s <= self.b && t >= self.c && t <= self.d
    }
}

/// Result of [`linear_interp`]; `extrapolated` is set when `x` lies
/// outside `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolated<V> {
    pub value: V,
    pub extrapolated: bool,
}

/// `(x - a)/(b - a) f(b) + (b - x)/(b - a) f(a)`.
pub fn linear_interp<V: Value>(
    a: f64,
    b: f64,
    fa: V,
    fb: V,
    x: f64,
) -> Result<Interpolated<V>, TransfiniteError> {
    if !(a < b) {
        return Err(TransfiniteError::EmptyInterval { a, b });
    }
    Ok(Interpolated {
        value: lerp(a, b, fa, fb, x),
        extrapolated: !(x >= a && x <= b),
    })
}

#[inline]
pub(crate) fn lerp<V: Value>(a: f64, b: f64, fa: V, fb: V, x: f64) -> V {
    let h = b - a;
    fb * ((x - a) / h) + fa * ((b - x) / h)
}

/// Second order divided difference `[a, b, x]f`.
pub fn divided_diff2<V: Value>(
    a: f64,
    b: f64,
    x: f64,
    fa: V,
    fb: V,
    fx: V,
) -> Result<V, TransfiniteError> {
    if a == b || a == x || b == x {
        return Err(TransfiniteError::CoincidentNodes);
    }
    let right = (fb - fx) * (1.0 / (b - x));
    let left = (fx - fa) * (1.0 / (x - a));
    Ok((right - left) * (1.0 / (b - a)))
}

/// Mixed second divided difference `[s1, s2; t1, t2]F` from the four
/// values `F(s1,t1)`, `F(s2,t2)`, `F(s2,t1)`, `F(s1,t2)`.
#[allow(clippy::too_many_arguments)]
pub fn msdd<V: Value>(
    s1: f64,
    s2: f64,
    t1: f64,
    t2: f64,
    f11: V,
    f22: V,
    f21: V,
    f12: V,
) -> Result<V, TransfiniteError> {
    if s1 == s2 || t1 == t2 {
        return Err(TransfiniteError::CoincidentNodes);
    }
    Ok(msdd_unchecked(s1, s2, t1, t2, f11, f22, f21, f12))
}

#[allow(clippy::too_many_arguments)]
#[inline]
pub(crate) fn msdd_unchecked<V: Value>(
    s1: f64,
    s2: f64,
    t1: f64,
    t2: f64,
    f11: V,
    f22: V,
    f21: V,
    f12: V,
) -> V {
    (f11 + f22 - f21 - f12) * (1.0 / ((s1 - s2) * (t1 - t2)))
}

/// MSDD of a bivariate function at the four nodes.
pub fn msdd_of<V: Value>(
    f: impl Fn(f64, f64) -> V,
    s1: f64,
    s2: f64,
    t1: f64,
    t2: f64,
) -> Result<V, TransfiniteError> {
    msdd(s1, s2, t1, t2, f(s1, t1), f(s2, t2), f(s2, t1), f(s1, t2))
}

/// Corner values of a patch; `p[i][j]` sits at `(i h1, j h2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corners<V> {
    pub p: [[V; 2]; 2],
}

impl<V: Value> Corners<V> {
    pub fn new(p00: V, p01: V, p10: V, p11: V) -> Self {
        Self {
            p: [[p00, p01], [p10, p11]],
        }
    }
}

/// Bilinear interpolant of the corners on `[0, h1] x [0, h2]`.
pub fn bilinear_patch<V: Value>(
    corners: &Corners<V>,
    h: (f64, f64),
    s: f64,
    t: f64,
) -> Result<V, TransfiniteError> {
    check_local(h, s, t)?;
    Ok(bilinear_unchecked(corners, h, s, t))
}

#[inline]
pub(crate) fn bilinear_unchecked<V: Value>(c: &Corners<V>, h: (f64, f64), s: f64, t: f64) -> V {
    let (x, y) = (s / h.0, t / h.1);
    (c.p[0][0] * (1.0 - y) + c.p[0][1] * y) * (1.0 - x) + (c.p[1][0] * (1.0 - y) + c.p[1][1] * y) * x
}

fn check_local(h: (f64, f64), s: f64, t: f64) -> Result<(), TransfiniteError> {
    if !(h.0 > 0.0) {
        return Err(TransfiniteError::EmptyInterval { a: 0.0, b: h.0 });
    }
    if !(h.1 > 0.0) {
        return Err(TransfiniteError::EmptyInterval { a: 0.0, b: h.1 });
    }
    if !(s >= 0.0 && s <= h.0 && t >= 0.0 && t <= h.1) {
        return Err(TransfiniteError::OutOfPatch {
            s,
            t,
            h1: h.0,
            h2: h.1,
        });
    }
    Ok(())
}

/// Boundary data of one Coons cell, already evaluated at the point of
/// interest, in local coordinates.
pub(crate) struct CellSample<V> {
    pub psi0_t: V,
    pub psi1_t: V,
    pub phi0_s: V,
    pub phi1_s: V,
    pub corners: Corners<V>,
}

/// The bilinearly blended Coons formula.
#[inline]
pub(crate) fn coons_blend<V: Value>(cell: &CellSample<V>, h: (f64, f64), s: f64, t: f64) -> V {
    let (x, y) = (s / h.0, t / h.1);
    cell.psi0_t * (1.0 - x) + cell.psi1_t * x + cell.phi0_s * (1.0 - y) + cell.phi1_s * y
        - bilinear_unchecked(&cell.corners, h, s, t)
}

/// How a u-function is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Analytic,
    SampledPiecewiseLinear,
    SurfaceTrace,
}

type Eval<V> = Arc<dyn Fn(f64) -> Result<V, TransfiniteError> + Send + Sync>;

/// A continuous univariate function on a closed interval.
#[derive(Clone)]
pub struct UFunction<V> {
    lo: f64,
    hi: f64,
    kind: Representation,
    eval: Eval<V>,
}

impl<V> fmt::Debug for UFunction<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UFunction")
            .field("domain", &(self.lo, self.hi))
            .field("kind", &self.kind)
            .finish()
    }
}

impl<V: Value> UFunction<V> {
    /// A closed-form function restricted to `[lo, hi]`.
    pub fn analytic(
        lo: f64,
        hi: f64,
        f: impl Fn(f64) -> V + Send + Sync + 'static,
    ) -> Result<Self, TransfiniteError> {
        Self::with_kind(lo, hi, Representation::Analytic, f)
    }

    pub(crate) fn with_kind(
        lo: f64,
        hi: f64,
        kind: Representation,
        f: impl Fn(f64) -> V + Send + Sync + 'static,
    ) -> Result<Self, TransfiniteError> {
        Self::fallible(lo, hi, kind, move |x| Ok(f(x)))
    }

    pub(crate) fn fallible(
        lo: f64,
        hi: f64,
        kind: Representation,
        f: impl Fn(f64) -> Result<V, TransfiniteError> + Send + Sync + 'static,
    ) -> Result<Self, TransfiniteError> {
        if !(lo <= hi) {
            return Err(TransfiniteError::EmptyInterval { a: lo, b: hi });
        }
        Ok(Self {
            lo,
            hi,
            kind,
            eval: Arc::new(f),
        })
    }

    /// Piecewise-linear interpolant through `(knots[i], values[i])`.
    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<V>) -> Result<Self, TransfiniteError> {
        if knots.len() < 2
            || knots.len() != values.len()
            || knots.windows(2).any(|w| !(w[1] > w[0]))
            || !knots.iter().all(|k| k.is_finite())
        {
            return Err(TransfiniteError::BadSamples);
        }
        let (lo, hi) = (knots[0], knots[knots.len() - 1]);
        Self::with_kind(lo, hi, Representation::SampledPiecewiseLinear, move |x| {
            let pos = knots.partition_point(|&k| k <= x);
            let i = pos.saturating_sub(1).min(knots.len() - 2);
            if x == knots[i] {
                return values[i];
            }
            lerp(knots[i], knots[i + 1], values[i], values[i + 1], x)
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn representation(&self) -> Representation {
        self.kind
    }

    /// Evaluates at `x`. Arguments within a relative `1e-12` of the domain
    /// are clamped onto it, absorbing roundoff in computed knots.
    pub fn eval(&self, x: f64) -> Result<V, TransfiniteError> {
        if x >= self.lo && x <= self.hi {
            return (self.eval)(x);
        }
        let slack = 1e-12 * self.lo.abs().max(self.hi.abs()).max(1.0);
        if x >= self.lo - slack && x <= self.hi + slack {
            return (self.eval)(x.clamp(self.lo, self.hi));
        }
        Err(TransfiniteError::OutOfDomain {
            x,
            lo: self.lo,
            hi: self.hi,
        })
    }
}

/// Four boundary u-functions in local coordinates: `phi0`, `phi1` on
/// `[0, h1]` (the edges `t = 0` and `t = h2`), `psi0`, `psi1` on `[0, h2]`
/// (the edges `s = 0` and `s = h1`).
#[derive(Debug, Clone)]
pub struct CoonsPatch<V> {
    pub phi0: UFunction<V>,
    pub phi1: UFunction<V>,
    pub psi0: UFunction<V>,
    pub psi1: UFunction<V>,
    pub h: (f64, f64),
    corners: Corners<V>,
}

impl<V: Value> CoonsPatch<V> {
    /// Builds a patch after checking `phi_i(j h1) = psi_j(i h2)` up to
    /// `tol` times the corner magnitude (at least 1).
    pub fn new(
        phi0: UFunction<V>,
        phi1: UFunction<V>,
        psi0: UFunction<V>,
        psi1: UFunction<V>,
        h: (f64, f64),
        tol: f64,
    ) -> Result<Self, TransfiniteError> {
        check_local(h, 0.0, 0.0)?;
        let phis = [&phi0, &phi1];
        let psis = [&psi0, &psi1];
        let mut p = [[V::zero(); 2]; 2];
        for (i, phi) in phis.iter().enumerate() {
            for (j, psi) in psis.iter().enumerate() {
                let from_phi = phi.eval(j as f64 * h.0)?;
                let from_psi = psi.eval(i as f64 * h.1)?;
                let scale = from_phi.sup_norm().max(from_psi.sup_norm()).max(1.0);
                let mismatch = (from_phi - from_psi).sup_norm();
                if !(mismatch <= tol * scale) {
                    return Err(TransfiniteError::CornerMismatch {
                        i: j,
                        j: i,
                        mismatch,
                        tol: tol * scale,
                    });
                }
                // corner (j h1, i h2)
                p[j][i] = from_phi;
            }
        }
        Ok(Self {
            phi0,
            phi1,
            psi0,
            psi1,
            h,
            corners: Corners { p },
        })
    }

    /// Coons patch interpolating the boundary of `f` on `rect`, in local
    /// coordinates `(s - a, t - c)`.
    pub fn from_boundary(
        f: impl Fn(f64, f64) -> V + Send + Sync + Clone + 'static,
        rect: Rect,
    ) -> Result<Self, TransfiniteError> {
        let Rect { a, b, c, d } = rect;
        let (h1, h2) = rect.sides();
        let (f0, f1, f2, f3) = (f.clone(), f.clone(), f.clone(), f);
        Self::new(
            UFunction::analytic(0.0, h1, move |s| f0(a + s, c))?,
            UFunction::analytic(0.0, h1, move |s| f1(a + s, d))?,
            UFunction::analytic(0.0, h2, move |t| f2(a, c + t))?,
            UFunction::analytic(0.0, h2, move |t| f3(b, c + t))?,
            (h1, h2),
            DEFAULT_CORNER_TOL,
        )
    }

    pub fn corners(&self) -> &Corners<V> {
        &self.corners
    }

    /// Value of the Coons patch at local `(s, t)`.
    pub fn eval(&self, s: f64, t: f64) -> Result<V, TransfiniteError> {
        check_local(self.h, s, t)?;
        let cell = CellSample {
            psi0_t: self.psi0.eval(t)?,
            psi1_t: self.psi1.eval(t)?,
            phi0_s: self.phi0.eval(s)?,
            phi1_s: self.phi1.eval(s)?,
            corners: self.corners,
        };
        Ok(coons_blend(&cell, self.h, s, t))
    }
}

/// `F(s,t) - C(F|dR)(s,t)` through the four-MSDD closed form. Zero on the
/// boundary of `rect`, where the polynomial prefactor vanishes.
pub fn coons_error_exact<V: Value>(f: impl Fn(f64, f64) -> V, rect: &Rect, s: f64, t: f64) -> V {
    let Rect { a, b, c, d } = *rect;
    if s == a || s == b || t == c || t == d {
        return V::zero();
    }
    let pre = (s - a) * (s - b) * (t - c) * (t - d) / ((b - a) * (d - c));
    let m = |s1: f64, s2: f64, t1: f64, t2: f64| {
        msdd_unchecked(s1, s2, t1, t2, f(s1, t1), f(s2, t2), f(s2, t1), f(s1, t2))
    };
    (m(b, s, d, t) - m(s, a, d, t) + m(s, a, t, c) - m(b, s, t, c)) * pre
}

/// `L (b - a)(d - c) / 4`.
pub fn coons_error_bound(l: f64, rect: &Rect) -> Result<f64, TransfiniteError> {
    if !(l >= 0.0) {
        return Err(TransfiniteError::NegativeConstant(l));
    }
    let (h1, h2) = rect.sides();
    Ok(l * h1 * h2 / 4.0)
}

/// `(b - a) L / 2`.
pub fn linear_interp_error_bound(l: f64, a: f64, b: f64) -> Result<f64, TransfiniteError> {
    if !(a < b) {
        return Err(TransfiniteError::EmptyInterval { a, b });
    }
    if !(l >= 0.0) {
        return Err(TransfiniteError::NegativeConstant(l));
    }
    Ok((b - a) * l / 2.0)
}
