//! Numerical check that a computed coordinate change conjugates two systems.
//!
//! For each radius `eps` and direction `d`, the original system is integrated
//! from `x0 = eps d` and the transformed one from `w0 = T(x0)`, where `T` is
//! the composition of the truncated time-one flows of the generators. The
//! reported error is `max_t |T(x(t)) - w(t)|_inf`; its slope against `eps` on
//! a log-log scale estimates the order of the neglected tail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::polyvf::{CompiledField, GradeIndex, PolyVectorField};

/// Trajectories whose sup norm exceeds this are treated as blow-ups.
pub const BLOWUP_NORM: f64 = 1e6;

#[derive(Clone, Debug)]
pub struct FlowCheckOptions {
    pub horizon: f64,
    pub steps: usize,
    pub random_directions: usize,
    pub seed: u64,
}

impl Default for FlowCheckOptions {
    fn default() -> Self {
        Self {
            horizon: 1.0,
            steps: 2048,
            random_directions: 3,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowCheckReport {
    pub radii: Vec<f64>,
    /// Sup discrepancy per radius; `None` marks a blow-up.
    pub errors: Vec<Option<f64>>,
    /// Least-squares slope of `log error` against `log eps`; `None` when
    /// fewer than two radii have a positive finite error.
    pub fitted_order: Option<f64>,
    /// Every recorded error is exactly zero.
    pub exact: bool,
    pub horizon: f64,
    pub steps: usize,
    pub directions: usize,
}

/// `0.1 * 2^-j` for `j = 0..count`.
pub fn default_radii(count: usize) -> Vec<f64> {
    (0..count).map(|j| 0.1 * 0.5f64.powi(j as i32)).collect()
}

/// Compares `original` with `transformed` under the map built from
/// `generators` (applied in order), each flow truncated at `max_grade`.
pub fn flow_check(
    original: &PolyVectorField,
    transformed: &PolyVectorField,
    generators: &[PolyVectorField],
    max_grade: GradeIndex,
    radii: &[f64],
    opts: &FlowCheckOptions,
) -> Result<FlowCheckReport> {
    let n = original.dim();
    check_dim(n, transformed.dim())?;
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Parse("radii must be positive and strictly decreasing".into()));
    }
    if opts.steps == 0 || !(opts.horizon > 0.0) {
        return Err(Error::Parse("flow check needs a positive horizon and step count".into()));
    }
    let maps = generators
        .iter()
        .map(|h| {
            check_dim(n, h.dim())?;
            Ok(PolyVectorField::inverse_flow_map(h, max_grade)?.compile())
        })
        .collect::<Result<Vec<_>>>()?;
    let f = original.compile();
    let g = transformed.compile();
    let directions = directions(n, opts);

    let mut errors = Vec::with_capacity(radii.len());
    for &eps in radii {
        let mut worst = Some(0.0f64);
        for d in &directions {
            let x0: Vec<f64> = d.iter().map(|v| v * eps).collect();
            match discrepancy(&f, &g, &maps, &x0, opts) {
                Some(e) => worst = worst.map(|w| w.max(e)),
                None => {
                    worst = None;
                    break;
                }
            }
        }
        errors.push(worst);
    }
    let exact = errors.iter().all(|e| *e == Some(0.0));
    let points: Vec<(f64, f64)> = radii
        .iter()
        .zip(&errors)
        .filter_map(|(r, e)| e.filter(|v| *v > 0.0 && v.is_finite()).map(|v| (r.ln(), v.ln())))
        .collect();
    Ok(FlowCheckReport {
        radii: radii.to_vec(),
        errors,
        fitted_order: slope(&points),
        exact,
        horizon: opts.horizon,
        steps: opts.steps,
        directions: directions.len(),
    })
}

fn directions(n: usize, opts: &FlowCheckOptions) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0 / (n as f64).sqrt(); n]];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while out.len() < 1 + opts.random_directions {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

fn apply_maps(maps: &[CompiledField], x: &[f64]) -> Vec<f64> {
    let mut cur = x.to_vec();
    let mut next = vec![0.0; x.len()];
    for m in maps {
        m.eval_into(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn discrepancy(
    f: &CompiledField,
    g: &CompiledField,
    maps: &[CompiledField],
    x0: &[f64],
    opts: &FlowCheckOptions,
) -> Option<f64> {
    let h = opts.horizon / opts.steps as f64;
    let mut x = x0.to_vec();
    let mut w = apply_maps(maps, x0);
    let mut rk_x = Rk4::new(x.len());
    let mut rk_w = Rk4::new(x.len());
    let mut worst = 0.0f64;
    for _ in 0..opts.steps {
        rk_x.step(f, &mut x, h);
        rk_w.step(g, &mut w, h);
        if !(sup_norm(&x) < BLOWUP_NORM && sup_norm(&w) < BLOWUP_NORM) {
            return None;
        }
        let tx = apply_maps(maps, &x);
        let e = tx.iter().zip(&w).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        worst = worst.max(e);
    }
    worst.is_finite().then_some(worst)
}

/// Classical fourth-order Runge–Kutta with reusable buffers.
struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }

    fn step(&mut self, f: &CompiledField, x: &mut [f64], h: f64) {
        f.eval_into(x, &mut self.k1);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + 0.5 * h * self.k1[i];
        }
        f.eval_into(&self.tmp, &mut self.k2);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + 0.5 * h * self.k2[i];
        }
        f.eval_into(&self.tmp, &mut self.k3);
        for i in 0..x.len() {
            self.tmp[i] = x[i] + h * self.k3[i];
        }
        f.eval_into(&self.tmp, &mut self.k4);
        for i in 0..x.len() {
            x[i] += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
