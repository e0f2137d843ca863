//! Built-in bivariate test functions for net mode.

use std::sync::Arc;

use cornercut::nets::GridT;

pub type Bivariate = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A registry function together with an analytic bound on its MSDDs over
/// a given grid.
pub struct Entry {
    pub name: &'static str,
    pub f: Bivariate,
    /// Upper bound on `|[s1, s2; t1, t2] F|` for nodes inside the grid's
    /// bounding rectangle.
    pub bmsdd: f64,
}

pub const NAMES: &[&str] = &["bilinear", "product", "sinycosx", "sincos", "s2t2", "s3t", "polynomial"];

/// Looks up `name`. `polynomial` takes `coefficients[a][b]` of `s^a t^b`.
pub fn lookup(name: &str, grid: &GridT, coefficients: Option<&[Vec<f64>]>) -> Option<Entry> {
    let r = grid.rect();
    let ms = r.a.abs().max(r.b.abs());
    let mt = r.c.abs().max(r.d.abs());
    let (name, f, bmsdd): (&'static str, Bivariate, f64) = match name {
        "bilinear" => ("bilinear", Arc::new(|s, t| 1.0 + 2.0 * s - 3.0 * t + 0.5 * s * t), 0.5),
        "product" => ("product", Arc::new(|s, t| s * t), 1.0),
        // |[s1, s2] sin| <= 1 and |[t1, t2] cos| <= 1
        "sinycosx" | "sincos" => ("sinycosx", Arc::new(|s: f64, t: f64| s.sin() * t.cos()), 1.0),
        "s2t2" => ("s2t2", Arc::new(|s, t| s * s * t * t), 4.0 * ms * mt),
        "s3t" => ("s3t", Arc::new(|s, t| s * s * s * t), 3.0 * ms * ms),
        "polynomial" => {
            let c: Vec<Vec<f64>> = coefficients?.to_vec();
            let mut l = 0.0;
            for (a, row) in c.iter().enumerate() {
                for (b, &x) in row.iter().enumerate() {
                    if a > 0 && b > 0 {
                        l += x.abs() * a as f64 * ms.powi(a as i32 - 1) * b as f64 * mt.powi(b as i32 - 1);
                    }
                }
            }
            let f = move |s: f64, t: f64| {
                let mut acc = 0.0;
                for (a, row) in c.iter().enumerate() {
                    let sa = s.powi(a as i32);
                    for (b, &x) in row.iter().enumerate() {
                        acc += x * sa * t.powi(b as i32);
                    }
                }
                acc
            };
            ("polynomial", Arc::new(f), l)
        }
        _ => return None,
    };
    Some(Entry { name, f, bmsdd })
}
