//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use cornercut::nets::{
    bc_step, estimate_bmsdd, run_nets, sample_grid, GridT, NetOfFunctions, NetRunOptions,
    PiecewiseCoonsSurface,
};
use cornercut::points::{run_points, sup_distance, PolylineLevel, RunOptions};
use cornercut::transfinite::{
    coons_error_bound, coons_error_exact, linear_interp, linear_interp_error_bound, CoonsPatch, Rect,
    UFunction,
};
use cornercut::weights::{certify, WeightPair, WeightSchedule, NET_THRESHOLD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn square() -> PolylineLevel {
    PolylineLevel::closed(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap()
}

fn c1_weight_certificate() -> Outcome {
    let schedule = WeightSchedule::chaikin();
    let mut fastest = Duration::MAX;
    let mut cert = None;
    for _ in 0..5 {
        let t = Instant::now();
        let c = certify(&schedule).map_err(|e| e.to_string())?;
        fastest = fastest.min(t.elapsed());
        cert = Some(c);
    }
    let c = cert.unwrap();
    ensure(c.mu_sup == 0.5 && c.mu_per_level == [0.5], || format!("mu = {:?}", c.mu_per_level))?;
    ensure(c.points_convergent && c.nets_convergent, || "not certified".into())?;
    ensure(0.5 < NET_THRESHOLD, || "threshold".into())?;
    ensure(fastest < Duration::from_millis(1), || format!("took {fastest:?}"))?;
    Ok(format!("mu = 0.5 exactly, both certificates, {fastest:?}"))
}

fn random_pair(rng: &mut impl Rng) -> WeightPair {
    loop {
        let period = rng.gen_range(1..=4);
        let mut alpha = Vec::with_capacity(period);
        let mut beta = Vec::with_capacity(period);
        for _ in 0..period {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            alpha.push(x.min(y));
            beta.push(x.max(y));
        }
        if let Ok(p) = WeightPair::new(alpha, beta, 0.01) {
            return p;
        }
    }
}

fn c2_mesh_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let pair = random_pair(&mut rng);
        let pts: Vec<Vec<f64>> = (0..=16).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let mut level = PolylineLevel::open(&pts).unwrap();
        let mu = pair.mu();
        for k in 0..=7 {
            let next = level.corner_cut(&pair).map_err(|e| e.to_string())?;
            let ratio = next.mesh_size() / (mu * level.mesh_size());
            worst = worst.max(ratio);
            ensure(ratio <= 1.0 + 1e-12, || format!("k = {k}: d'/(mu d) = {ratio}, pair {pair:?}"))?;
            level = next;
        }
    }
    Ok(format!("100 pairs, k = 0..7, max d'/(mu d) = {worst:.15}"))
}

fn c3_polyline_bound() -> Outcome {
    let t = Instant::now();
    let run = run_points(square(), &WeightSchedule::chaikin(), 8, RunOptions::default()).map_err(|e| e.to_string())?;
    let l = run.lipschitz_l;
    ensure(l == 1.0, || format!("L = {l}"))?;
    let mut d = Vec::new();
    for k in 0..8 {
        let m = run.successive_sup_distance(k, 64).map_err(|e| e.to_string())?;
        let bound = 0.5 * l * run.levels[k + 1].mesh_size();
        ensure(m <= bound + 1e-12, || format!("k = {k}: {m} > {bound}"))?;
        d.push(m);
    }
    let elapsed = t.elapsed();
    let worst_ratio = d.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    ensure(worst_ratio <= 0.52, || format!("decay ratio {worst_ratio}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("d0 = {:.4}, max ratio {worst_ratio:.4}, {elapsed:?}", d[0]))
}

fn c4_cauchy_tail() -> Outcome {
    let run = run_points(square(), &WeightSchedule::chaikin(), 10, RunOptions::default()).map_err(|e| e.to_string())?;
    let (l, d0, mu) = (run.lipschitz_l, run.levels[0].mesh_size(), run.certificate.mu_sup);
    let mut slack = f64::INFINITY;
    for k in 0..10 {
        // all breakpoints of both levels are sampled, so this is the exact sup
        let m = sup_distance(&run.levels[k], &run.levels[10], 2).map_err(|e| e.to_string())?;
        let bound = l * d0 * mu.powi(k as i32 + 1) / (2.0 * (1.0 - mu));
        ensure(m <= bound + 1e-10, || format!("k = {k}: {m} > {bound}"))?;
        slack = slack.min(bound - m);
    }
    Ok(format!("k = 0..9 within tail bound, min slack {slack:.3e}"))
}

fn c5_chaikin_fixed_points() -> Outcome {
    let run = run_points(square(), &WeightSchedule::chaikin(), 8, RunOptions::default()).map_err(|e| e.to_string())?;
    let mids = [[0.5, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 0.5]];
    for level in &run.levels {
        let pts: Vec<&[f64]> = level.points().collect();
        let n = pts.len();
        for (e, m) in mids.iter().enumerate() {
            let hit = (0..n).any(|i| {
                let (p, q) = (pts[i], pts[(i + 1) % n]);
                ((p[0] + q[0]) / 2.0 - m[0]).abs() < 1e-12 && ((p[1] + q[1]) / 2.0 - m[1]).abs() < 1e-12
            });
            ensure(hit, || format!("level {}: no edge with midpoint {m:?}", level.level()))?;
            let v = level.eval(e as f64 + 0.5).map_err(|e| e.to_string())?;
            ensure((v[0] - m[0]).abs() < 1e-12 && (v[1] - m[1]).abs() < 1e-12, || {
                format!("level {}: interpolant misses {m:?}", level.level())
            })?;
        }
    }
    Ok("4 edge midpoints kept as level-k edge midpoints, k = 0..8".into())
}

fn c6_linear_interp_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let a = rng.gen_range(-5.0..5.0);
        let b = a + rng.gen_range(0.1..4.0);
        let n = rng.gen_range(2..12);
        let mut knots: Vec<f64> = (0..n).map(|_| rng.gen_range(a..b)).collect();
        knots.push(a);
        knots.push(b);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let values: Vec<f64> = knots.iter().map(|_| rng.gen_range(-3.0..3.0)).collect();
        let l = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(k, v)| ((v[1] - v[0]) / (k[1] - k[0])).abs())
            .fold(0.0, f64::max);
        let f = UFunction::piecewise_linear(knots, values).map_err(|e| e.to_string())?;
        let (fa, fb) = (f.eval(a).unwrap(), f.eval(b).unwrap());
        let bound = linear_interp_error_bound(l, a, b).map_err(|e| e.to_string())?;
        for q in 0..129 {
            let x = a + (b - a) * q as f64 / 128.0;
            let err = (f.eval(x).unwrap() - linear_interp(a, b, fa, fb, x).unwrap().value).abs();
            worst = worst.max(err / bound);
            if err > bound * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("0 violations, max error/bound {worst:.4}"))
}

/// Total degree <= 4 polynomial in `(s, t)`.
#[derive(Clone)]
struct Poly4(Vec<(i32, i32, f64)>);

impl Poly4 {
    fn random(rng: &mut impl Rng) -> Self {
        let mut terms = Vec::new();
        for a in 0..=4 {
            for b in 0..=4 - a {
                terms.push((a, b, rng.gen_range(-1.0..1.0)));
            }
        }
        Self(terms)
    }

    fn eval(&self, s: f64, t: f64) -> f64 {
        self.0.iter().map(|&(a, b, c)| c * s.powi(a) * t.powi(b)).sum()
    }
}

/// Coons interpolant straight from its definition, on the whole of `r`.
fn coons_oracle(f: &dyn Fn(f64, f64) -> f64, r: &Rect, s: f64, t: f64) -> f64 {
    let x = (s - r.a) / (r.b - r.a);
    let y = (t - r.c) / (r.d - r.c);
    let ruled_s = (1.0 - x) * f(r.a, t) + x * f(r.b, t);
    let ruled_t = (1.0 - y) * f(s, r.c) + y * f(s, r.d);
    let bilinear = (1.0 - x) * ((1.0 - y) * f(r.a, r.c) + y * f(r.a, r.d)) + x * ((1.0 - y) * f(r.b, r.c) + y * f(r.b, r.d));
    ruled_s + ruled_t - bilinear
}

fn c7_coons_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = Poly4::random(&mut rng);
        let a = rng.gen_range(-2.0..1.0);
        let c = rng.gen_range(-2.0..1.0);
        let r = Rect::new(a, a + rng.gen_range(0.2..2.0), c, c + rng.gen_range(0.2..2.0)).unwrap();
        let f = {
            let p = p.clone();
            move |s: f64, t: f64| p.eval(s, t)
        };
        let patch = CoonsPatch::from_boundary(f.clone(), r).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let s = rng.gen_range(r.a..r.b);
            let t = rng.gen_range(r.c..r.d);
            let fv = f(s, t);
            let direct = fv - coons_oracle(&f, &r, s, t);
            let formula = coons_error_exact(f.clone(), &r, s, t);
            let lib = fv - patch.eval(s - r.a, t - r.c).map_err(|e| e.to_string())?;
            let scale = fv.abs().max(1.0);
            let dev = (formula - direct).abs().max((lib - direct).abs()) / scale;
            worst = worst.max(dev);
            ensure(dev <= 1e-10, || format!("({s}, {t}) on {r:?}: formula {formula}, direct {direct}, patch {lib}"))?;
        }
    }
    Ok(format!("200 polynomials x 5 points, max deviation {worst:.2e} x scale"))
}

fn c8_coons_bound() -> Outcome {
    let f = |s: f64, t: f64| s * s * t * t;
    let r = Rect::unit();
    let patch = CoonsPatch::from_boundary(f, r).map_err(|e| e.to_string())?;
    let bound = coons_error_bound(4.0, &r).map_err(|e| e.to_string())?;
    ensure(bound == 1.0, || format!("bound {bound}"))?;
    let mut worst = 0.0f64;
    for (s, t) in sample_grid(&r, 65) {
        worst = worst.max((f(s, t) - patch.eval(s, t).unwrap()).abs());
    }
    let centre = f(0.5, 0.5) - patch.eval(0.5, 0.5).unwrap();
    ensure(worst <= bound, || format!("max error {worst}"))?;
    ensure((centre - 1.0 / 16.0).abs() <= 1e-12, || format!("centre error {centre}"))?;
    Ok(format!("max |F - C| = {worst:.6} <= 1, centre {centre}"))
}

/// `sum c[a][b] s^a t^b`, `a, b <= 3`.
#[derive(Clone)]
struct Tensor3([[f64; 4]; 4]);

impl Tensor3 {
    fn random(rng: &mut impl Rng) -> Self {
        let mut c = [[0.0; 4]; 4];
        for row in &mut c {
            for x in row.iter_mut() {
                *x = rng.gen_range(-1.0..1.0);
            }
        }
        Self(c)
    }

    fn eval(&self, s: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        for (a, row) in self.0.iter().enumerate() {
            for (b, c) in row.iter().enumerate() {
                acc += c * s.powi(a as i32) * t.powi(b as i32);
            }
        }
        acc
    }

    /// MSDD bound on `[0, m]^2`: `|[s1, s2] s^a| <= a m^{a-1}`.
    fn bmsdd(&self, m: f64) -> f64 {
        let mut l = 0.0;
        for (a, row) in self.0.iter().enumerate().skip(1) {
            for (b, c) in row.iter().enumerate().skip(1) {
                l += c.abs() * a as f64 * m.powi(a as i32 - 1) * b as f64 * m.powi(b as i32 - 1);
            }
        }
        l
    }
}

fn c9_bmsdd_propagation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = 3.0;
    type F = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
    let mut cases: Vec<(String, F, f64)> = vec![
        ("st".into(), Arc::new(|s, t| s * t), 1.0),
        ("s^2t^2".into(), Arc::new(|s, t| s * s * t * t), 4.0 * m * m),
        ("s^3t".into(), Arc::new(|s, t| s * s * s * t), 3.0 * m * m),
    ];
    for i in 0..5 {
        let p = Tensor3::random(&mut rng);
        let l = p.bmsdd(m);
        cases.push((format!("poly{i}"), Arc::new(move |s, t| p.eval(s, t)), l));
    }
    let schedules = [
        (WeightSchedule::chaikin(), WeightSchedule::chaikin()),
        (
            WeightSchedule::Constant(WeightPair::new(vec![0.22, 0.27], vec![0.7, 0.75], 0.0).unwrap()),
            WeightSchedule::Constant(WeightPair::uniform(0.3, 0.8, 0.0).unwrap()),
        ),
    ];
    let mut worst = 0.0f64;
    for (name, f, l) in &cases {
        for (gs, gt) in &schedules {
            let f = Arc::clone(f);
            let net = NetOfFunctions::from_function(GridT::integer_window(0, 3, 0, 3).unwrap(), move |s, t| f(s, t))
                .map_err(|e| e.to_string())?;
            let run = run_nets(net, gs, gt, 3, &NetRunOptions { bmsdd: Some(*l), ..Default::default() })
                .map_err(|e| e.to_string())?;
            for k in 1..=3 {
                let est = estimate_bmsdd(run.net(k), 8).map_err(|e| e.to_string())?;
                let cap = 3f64.powi(k as i32) * l;
                worst = worst.max(est / cap);
                ensure(est <= cap * (1.0 + 1e-6), || format!("{name}, k = {k}: {est} > 3^k L = {cap}"))?;
            }
        }
    }
    Ok(format!("{} functions x 2 schedules, k = 1..3, max est/(3^k L) = {worst:.4}", cases.len()))
}

fn c10_net_contraction() -> Outcome {
    let t0 = Instant::now();
    let net = NetOfFunctions::from_function(GridT::integer_window(0, 4, 0, 4).unwrap(), |s: f64, t: f64| s.sin() * t.cos())
        .map_err(|e| e.to_string())?;
    let run = run_nets(net, &WeightSchedule::chaikin(), &WeightSchedule::chaikin(), 4, &NetRunOptions::default())
        .map_err(|e| e.to_string())?;
    let l = run.bmsdd_l;
    let h = run.h0;
    let mut d = Vec::new();
    for k in 0..4 {
        let m = run.successive_distance(k, 33).map_err(|e| e.to_string())?;
        let g = run.net(k + 1).grid();
        let step = 3f64.powi(k as i32 + 1) * l * g.mesh_s() * g.mesh_t() / 4.0;
        let tail = 3.0 * l * h / 4.0 * 0.75f64.powi(k as i32);
        ensure(m <= step, || format!("k = {k}: {m} > step bound {step}"))?;
        ensure(m <= tail, || format!("k = {k}: {m} > tail bound {tail}"))?;
        d.push(m);
    }
    let worst_ratio = d.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    ensure(worst_ratio <= 0.8, || format!("ratio {worst_ratio}, distances {d:?}"))?;
    let elapsed = t0.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("L^ = {l:.4}, distances {:?}, max ratio {worst_ratio:.3}, {elapsed:?}", d.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>()))
}

fn c11_bilinear_exactness() -> Outcome {
    let schedules = [
        (WeightSchedule::chaikin(), WeightSchedule::chaikin()),
        (
            WeightSchedule::Constant(WeightPair::new(vec![0.25, 0.28], vec![0.72, 0.7], 0.0).unwrap()),
            WeightSchedule::chaikin(),
        ),
        (
            WeightSchedule::PerLevel(vec![
                WeightPair::uniform(0.3, 0.8, 0.0).unwrap(),
                WeightPair::chaikin(),
                WeightPair::uniform(0.2, 0.7, 0.0).unwrap(),
                WeightPair::uniform(0.24, 0.76, 0.0).unwrap(),
            ]),
            WeightSchedule::Constant(WeightPair::uniform(0.3, 0.8, 0.0).unwrap()),
        ),
    ];
    let mut worst = 0.0f64;
    for (gs, gt) in &schedules {
        let net = NetOfFunctions::from_function(GridT::integer_window(0, 4, 0, 4).unwrap(), |s: f64, t: f64| s * t)
            .map_err(|e| e.to_string())?;
        let run = run_nets(net, gs, gt, 4, &NetRunOptions::default()).map_err(|e| e.to_string())?;
        ensure(run.certificate.nets_convergent, || "schedule not certified".into())?;
        for k in 0..4 {
            worst = worst.max(run.successive_distance(k, 33).map_err(|e| e.to_string())?);
        }
    }
    ensure(worst <= 1e-12, || format!("distance {worst}"))?;
    Ok(format!("3 schedules, K = 4, max distance {worst:.1e}"))
}

/// `L_s N + L_t N - L_s L_t N` from the u-functions alone.
fn boolean_sum(net: &NetOfFunctions<f64>, s: f64, t: f64) -> f64 {
    let (sk, tk) = (net.grid().s_knots(), net.grid().t_knots());
    let cell = |k: &[f64], x: f64| k.iter().rposition(|&v| v <= x).unwrap_or(0).min(k.len() - 2);
    let (i, j) = (cell(sk, s), cell(tk, t));
    let x = (s - sk[i]) / (sk[i + 1] - sk[i]);
    let y = (t - tk[j]) / (tk[j + 1] - tk[j]);
    let ls = (1.0 - x) * net.psi(i).eval(t).unwrap() + x * net.psi(i + 1).eval(t).unwrap();
    let lt = (1.0 - y) * net.phi(j).eval(s).unwrap() + y * net.phi(j + 1).eval(s).unwrap();
    let c = |a: usize, b: usize| net.psi(a).eval(tk[b]).unwrap();
    let lslt = (1.0 - x) * ((1.0 - y) * c(i, j) + y * c(i, j + 1)) + x * ((1.0 - y) * c(i + 1, j) + y * c(i + 1, j + 1));
    ls + lt - lslt
}

fn random_knots(rng: &mut impl Rng) -> Vec<f64> {
    let n = rng.gen_range(2..7);
    let mut k = vec![rng.gen_range(-2.0..1.0)];
    for _ in 1..n {
        let next = k[k.len() - 1] + rng.gen_range(0.1..1.5);
        k.push(next);
    }
    k
}

fn c12_boolean_sum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    let mut kinds = [0usize; 3];
    for n in 0..500 {
        let p = Poly4::random(&mut rng);
        let w = rng.gen_range(0.3..2.5);
        let f = move |s: f64, t: f64| p.eval(s, t) + (w * s + t).sin();
        let s_knots = random_knots(&mut rng);
        let grid = GridT::new(s_knots, random_knots(&mut rng)).unwrap();
        let net0 = NetOfFunctions::from_function(grid, f).map_err(|e| e.to_string())?;
        // analytic, surface-trace and sampled u-functions in turn
        let net = match n % 3 {
            0 => net0,
            1 => {
                let surf = Arc::new(PiecewiseCoonsSurface::new(net0).map_err(|e| e.to_string())?);
                bc_step(&surf, &WeightPair::uniform(0.2, 0.7, 0.0).unwrap(), &WeightPair::chaikin()).map_err(|e| e.to_string())?
            }
            _ => net0.resample(rng.gen_range(1..6)).map_err(|e| e.to_string())?,
        };
        kinds[n % 3] += 1;
        let surf = PiecewiseCoonsSurface::new(net.clone()).map_err(|e| e.to_string())?;
        let r = surf.domain();
        let (s, t) = (rng.gen_range(r.a..=r.b), rng.gen_range(r.c..=r.d));
        let want = boolean_sum(&net, s, t);
        let got = surf.eval(s, t).map_err(|e| e.to_string())?;
        let dev = (got - want).abs() / want.abs().max(1.0);
        worst = worst.max(dev);
        ensure(dev <= 1e-10, || format!("pair {n}: ({s}, {t}) surface {got}, oracle {want}"))?;
    }
    Ok(format!("500 pairs ({} analytic, {} traced, {} sampled), max deviation {worst:.2e} x scale", kinds[0], kinds[1], kinds[2]))
}

fn run_cli(args: &[&str]) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cornercut"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    out.status.code().ok_or_else(|| "killed by signal".to_string())
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn report_without_runtime(path: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("report is not an object")?.remove("runtime");
    Ok(v)
}

fn c13_cli_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = configs().join("square.toml");
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let code = run_cli(&["points", "-c", cfg, "-o", dir.to_str().unwrap(), "-q"])?;
        ensure(code == 0, || format!("square run exited {code}"))?;
    }
    let mut files: Vec<_> = std::fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .filter(|n| n.to_string_lossy().ends_with(".csv"))
        .collect();
    files.sort();
    ensure(files.len() == 10, || format!("expected 10 geometry files, got {files:?}"))?;
    for f in &files {
        let (x, y) = (std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
        ensure(x == y, || format!("{} differs between runs", f.to_string_lossy()))?;
    }
    ensure(
        report_without_runtime(&a.join("report.json"))? == report_without_runtime(&b.join("report.json"))?,
        || "report values differ".into(),
    )?;

    let violation = configs().join("square_violation.toml");
    let code = run_cli(&["points", "-c", violation.to_str().unwrap(), "-o", tmp.path().join("v").to_str().unwrap(), "-q"])?;
    ensure(code == 1, || format!("injected violation exited {code}, want 1"))?;
    let uncertified = configs().join("uncertified.toml");
    let code = run_cli(&["points", "-c", uncertified.to_str().unwrap(), "-o", tmp.path().join("u").to_str().unwrap(), "-q"])?;
    ensure(code == 2, || format!("uncertified run exited {code}, want 2"))?;
    Ok(format!("{} files byte-identical, exit codes 0 / 1 / 2", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("weight certificate", c1_weight_certificate),
        ("mesh contraction", c2_mesh_contraction),
        ("polyline approximation bound", c3_polyline_bound),
        ("Cauchy tail", c4_cauchy_tail),
        ("Chaikin fixed points", c5_chaikin_fixed_points),
        ("linear interpolation error", c6_linear_interp_lemma),
        ("Coons error formula", c7_coons_oracle),
        ("Coons error bound", c8_coons_bound),
        ("BMSDD propagation", c9_bmsdd_propagation),
        ("net contraction", c10_net_contraction),
        ("bilinear exactness", c11_bilinear_exactness),
        ("Boolean-sum oracle", c12_boolean_sum),
        ("CLI determinism and exit codes", c13_cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
