//! Case classification, resonances, Poincaré–Dulac normalization and
//! convergence diagnostics for quasilinear equivariant fields.
//!
//! The linear part is `A = sum_p beta_p K_p`. Because the centralizer basis
//! is orthonormal with `K_a^2 = -I`, the spectrum is `beta_0 ± i omega` with
//! `omega^2 = sum_{a >= 1} beta_a^2`, and everything here is exact.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::equivariant::QuasilinearField;
use crate::error::{Error, Result};
use crate::homological::{eliminate, Certificate, Generator, Levels, Phase};
use crate::liealg::{quaternion_relations_hold, CentralizerBasis, SchurType};
use crate::linalg::{coordinates_in_span, Matrix};
use crate::rational::{exact_sqrt, from_f64, to_f64, Q};

/// Approximate-mode tolerance for [`rotate_to_standard`].
pub const ROTATION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    A,
    B1,
    B2,
    B3,
    C1,
    C2,
    C3,
    #[serde(rename = "ZERO_LINEAR")]
    ZeroLinear,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::A => "A",
            CaseTag::B1 => "B1",
            CaseTag::B2 => "B2",
            CaseTag::B3 => "B3",
            CaseTag::C1 => "C1",
            CaseTag::C2 => "C2",
            CaseTag::C3 => "C3",
            CaseTag::ZeroLinear => "ZERO_LINEAR",
        }
    }

    /// Cases with `beta_0 != 0`, whose normal form is linear.
    pub fn is_hyperbolic(self) -> bool {
        matches!(self, CaseTag::A | CaseTag::B1 | CaseTag::B2 | CaseTag::C1 | CaseTag::C2)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Spectrum `beta_0 ± i omega` of the linear part.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumInfo {
    pub dim: usize,
    pub beta0: Q,
    pub omega_sq: Q,
}

impl SpectrumInfo {
    /// `n/2` copies of `beta_0 + i omega` followed by `n/2` of
    /// `beta_0 - i omega`; `n` copies of `beta_0` when `omega = 0`.
    pub fn eigenvalues(&self) -> Vec<(f64, f64)> {
        let re = to_f64(&self.beta0);
        let w = to_f64(&self.omega_sq).sqrt();
        if self.omega_sq.is_zero() {
            return vec![(re, 0.0); self.dim];
        }
        let half = self.dim / 2;
        (0..self.dim)
            .map(|j| (re, if j < half { w } else { -w }))
            .collect()
    }

    /// Sign of the imaginary part of the `j`-th eigenvalue.
    fn sigma(&self, j: usize) -> i64 {
        if self.omega_sq.is_zero() {
            0
        } else if j < self.dim / 2 {
            1
        } else {
            -1
        }
    }
}

pub fn classify_case(q: &QuasilinearField) -> (CaseTag, SpectrumInfo) {
    let beta = q.linear_part();
    let beta0 = beta[0].clone();
    let omega_sq: Q = beta.iter().skip(1).map(|b| b * b).fold(Q::zero(), |a, b| a + b);
    let b0 = !beta0.is_zero();
    let w = !omega_sq.is_zero();
    let case = match (q.basis().schur_type(), b0, w) {
        (_, false, false) => CaseTag::ZeroLinear,
        (SchurType::Real, true, _) => CaseTag::A,
        (SchurType::Real, false, true) => unreachable!("real centralizer has no rotation part"),
        (SchurType::Complex, true, false) => CaseTag::B1,
        (SchurType::Complex, true, true) => CaseTag::B2,
        (SchurType::Complex, false, true) => CaseTag::B3,
        (SchurType::Quaternionic, true, false) => CaseTag::C1,
        (SchurType::Quaternionic, true, true) => CaseTag::C2,
        (SchurType::Quaternionic, false, true) => CaseTag::C3,
    };
    let spec = SpectrumInfo {
        dim: q.basis().dim(),
        beta0,
        omega_sq,
    };
    (case, spec)
}

/// `sum_i m_i lambda_i = lambda_target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResonanceWitness {
    pub m: Vec<u32>,
    pub target: usize,
}

impl ResonanceWitness {
    pub fn order(&self) -> u32 {
        self.m.iter().sum()
    }
}

/// All resonances with `2 <= |m| <= max_order + 1`.
///
/// `max_order` is the truncation order in grade units, so `|m|` runs over the
/// polynomial degrees that appear up to that grade.
pub fn resonance_check(spec: &SpectrumInfo, max_order: usize) -> Vec<ResonanceWitness> {
    let n = spec.dim;
    let half = n / 2;
    let mut out = Vec::new();
    if !spec.beta0.is_zero() {
        // the real part forces |m| = 1
        return out;
    }
    for total in 2..=(max_order as u32 + 1) {
        for m in compositions(total, n) {
            let plus: i64 = m[..half].iter().map(|&x| x as i64).sum();
            let minus: i64 = m[half..].iter().map(|&x| x as i64).sum();
            for j in 0..n {
                let imag_ok = spec.omega_sq.is_zero() || plus - minus - spec.sigma(j) == 0;
                if imag_ok {
                    out.push(ResonanceWitness { m: m.clone(), target: j });
                }
            }
        }
    }
    out
}

/// Vectors of `n` non-negative integers summing to `total`, lexicographic.
fn compositions(total: u32, n: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in (0..=left).rev() {
            prefix.push(v);
            rec(left - v, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(total, n, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Convergent,
    SmoothConjugacy,
    FormalOnly,
    ExpectDivergent,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Convergent => "CONVERGENT",
            Verdict::SmoothConjugacy => "SMOOTH_CONJUGACY",
            Verdict::FormalOnly => "FORMAL_ONLY",
            Verdict::ExpectDivergent => "EXPECT_DIVERGENT",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub poincare_domain: bool,
    pub hyperbolic: bool,
    #[serde(rename = "condition_A")]
    pub condition_a: bool,
    pub verdict: Verdict,
    pub assumptions: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub case: CaseTag,
    pub spectrum: SpectrumInfo,
    pub input: QuasilinearField,
    pub nf: QuasilinearField,
    pub generators: Vec<Generator>,
    pub certificates: Vec<Certificate>,
    /// Truncation order in grade units; slots with `2k <= N` are kept.
    pub truncation_order: usize,
    pub diagnostics: ConvergenceVerdict,
}

impl NormalFormResult {
    pub fn max_k(&self) -> usize {
        self.truncation_order / 2
    }
}

/// Poincaré–Dulac normalization up to grade `n` inside the equivariant module.
///
/// At every grade the part of `f_k` in the range of `ad(A)` is removed by an
/// equivariant generator; the orthogonal complement, which is the kernel, is
/// kept. Cases with `beta_0 != 0` therefore become linear, `B3` is returned
/// unchanged (there `ad(A)` vanishes on the module), and `C3` keeps the
/// components along `I` and `J = sum_a (beta_a / omega) K_a`.
pub fn normalize(q: &QuasilinearField, n: usize) -> Result<NormalFormResult> {
    let (case, spectrum) = classify_case(q);
    if case == CaseTag::ZeroLinear {
        return Err(Error::WrongCase {
            case: case.label().into(),
            reason: "linear part vanishes; use the renormalization for zero linear part".into(),
        });
    }
    let max_k = n / 2;
    let out = eliminate(q, max_k, &[Phase::all(q.num_components())], Levels::Linear)?;
    let mut res = NormalFormResult {
        case,
        spectrum,
        input: q.truncate(max_k),
        nf: out.field,
        generators: out.generators,
        certificates: out.certificates,
        truncation_order: n,
        diagnostics: placeholder_verdict(),
    };
    res.diagnostics = convergence_diagnostics(&res);
    Ok(res)
}

fn placeholder_verdict() -> ConvergenceVerdict {
    ConvergenceVerdict {
        poincare_domain: false,
        hyperbolic: false,
        condition_a: false,
        verdict: Verdict::FormalOnly,
        assumptions: Vec::new(),
    }
}

/// True when every slice `k >= 1` of `f` is a multiple of the linear slice,
/// i.e. `f = (1 + a(r^2)) A x` with a scalar series `a`.
pub fn satisfies_condition_a(f: &QuasilinearField) -> bool {
    let beta = f.linear_part();
    let Some(pivot) = beta.iter().position(|b| !b.is_zero()) else {
        return false;
    };
    let Some(max_k) = f.max_k() else {
        return false;
    };
    (1..=max_k).all(|k| {
        let s = f.slice(k);
        let ratio = &s[pivot] / &beta[pivot];
        s.iter().zip(&beta).all(|(x, b)| x == &(&ratio * b))
    })
}

pub fn convergence_diagnostics(res: &NormalFormResult) -> ConvergenceVerdict {
    // For beta_0 ± i omega the convex hull of the spectrum avoids the origin
    // exactly when beta_0 != 0, which is also hyperbolicity.
    let poincare_domain = !res.spectrum.beta0.is_zero();
    let hyperbolic = poincare_domain;
    let condition_a = satisfies_condition_a(&res.nf);
    let mut assumptions = Vec::new();
    let verdict = if poincare_domain {
        Verdict::Convergent
    } else if condition_a {
        assumptions.push(
            "normal form satisfies condition A; convergence further assumes the arithmetic \
             (small-divisor) condition on the spectrum, which is not checked"
                .to_string(),
        );
        Verdict::Convergent
    } else if hyperbolic {
        // hyperbolic outside the Poincare domain; cannot occur for beta_0 ± i omega
        Verdict::SmoothConjugacy
    } else if res.case == CaseTag::C3 {
        Verdict::ExpectDivergent
    } else {
        Verdict::FormalOnly
    };
    ConvergenceVerdict {
        poincare_domain,
        hyperbolic,
        condition_a,
        verdict,
        assumptions,
    }
}

/// Orthogonal change of coordinates `y = R x` inside the centralizer.
#[derive(Clone, Debug)]
pub struct Rotation {
    /// Quaternion `(q_0, q_1, q_2, q_3)`, `R = (q_0 I + sum q_a K_a) / |q|`.
    /// Float-derived in approximate mode.
    pub quaternion: [Q; 4],
    /// Action on coefficient vectors: `alpha~ = M alpha` on every slice.
    pub coefficient_map: Matrix,
    /// `R` in floating point.
    pub matrix: Vec<Vec<f64>>,
    pub approximate: bool,
    /// `max |A' - beta_0 I - omega K_1|` before any rounding.
    pub residual: f64,
}

/// Rotates a quaternionic field so its linear part is `beta_0 I + omega K_1`.
///
/// The rotation is `x -> U x / |q|` with `U = q_0 I + sum q_a K_a`, the
/// quaternion taking `(beta_1, beta_2, beta_3)` to `(omega, 0, 0)`. The
/// coefficient map only involves `U K_p U^T / |q|^2`, which is rational when
/// `omega` is; otherwise the computation falls back to floating point and is
/// flagged approximate.
pub fn rotate_to_standard(q: &QuasilinearField) -> Result<(QuasilinearField, Rotation)> {
    let basis = q.basis().clone();
    if basis.schur_type() != SchurType::Quaternionic {
        return Err(Error::TypeMismatch {
            expected: SchurType::Quaternionic.label().into(),
            found: basis.schur_type().label().into(),
        });
    }
    if !quaternion_relations_hold(basis.matrices()) {
        return Err(Error::Internal("centralizer basis violates the quaternion relations".into()));
    }
    let beta = q.linear_part();
    let omega_sq: Q = beta[1..].iter().map(|b| b * b).fold(Q::zero(), |a, b| a + b);
    match exact_sqrt(&omega_sq) {
        Some(omega) => rotate_exact(q, &basis, &beta, &omega),
        None => rotate_approximate(q, &basis, &beta, &omega_sq),
    }
}

fn quaternion_for(beta: &[Q], omega: &Q) -> [Q; 4] {
    let identity = [Q::one(), Q::zero(), Q::zero(), Q::zero()];
    if omega.is_zero() {
        return identity;
    }
    let w0 = omega + &beta[1];
    if w0.is_zero() {
        // antipodal: half turn about the third axis
        return [Q::zero(), Q::zero(), Q::zero(), Q::one()];
    }
    // (1 + u.e1, u x e1) scaled by omega, u = b / omega
    [w0, Q::zero(), beta[3].clone(), -beta[2].clone()]
}

fn quaternion_matrix(basis: &CentralizerBasis, qv: &[Q; 4]) -> Matrix {
    (0..4).fold(Matrix::zeros(basis.dim(), basis.dim()), |acc, p| {
        &acc + &basis.matrix(p).scale(&qv[p])
    })
}

fn rotate_exact(
    q: &QuasilinearField,
    basis: &Arc<CentralizerBasis>,
    beta: &[Q],
    omega: &Q,
) -> Result<(QuasilinearField, Rotation)> {
    let qv = quaternion_for(beta, omega);
    let u = quaternion_matrix(basis, &qv);
    let norm_sq: Q = qv.iter().map(|c| c * c).fold(Q::zero(), |a, b| a + b);
    let ut = u.transpose();
    let inv = Q::one() / &norm_sq;
    let mut cols = Vec::with_capacity(4);
    for p in 0..4 {
        let conj = (&(&u * basis.matrix(p)) * &ut).scale(&inv);
        let coords = coordinates_in_span(basis.matrices(), &conj)
            .ok_or_else(|| Error::Internal("conjugated basis matrix left the centralizer".into()))?;
        cols.push(coords);
    }
    let map = Matrix::from_columns(4, &cols);
    let rotated = apply_coefficient_map(q, &map);
    let lin = rotated.linear_part();
    let expected = [beta[0].clone(), omega.clone(), Q::zero(), Q::zero()];
    if lin[..] != expected[..] {
        return Err(Error::Internal("rotation did not reach the standard linear part".into()));
    }
    let scale = 1.0 / to_f64(&norm_sq).sqrt();
    let matrix = u
        .to_f64()
        .into_iter()
        .map(|row| row.into_iter().map(|x| x * scale).collect())
        .collect();
    Ok((
        rotated,
        Rotation {
            quaternion: qv,
            coefficient_map: map,
            matrix,
            approximate: false,
            residual: 0.0,
        },
    ))
}

fn apply_coefficient_map(q: &QuasilinearField, map: &Matrix) -> QuasilinearField {
    let mut out = QuasilinearField::zero(q.basis().clone());
    for k in 0..=q.max_k().unwrap_or(0) {
        out.set_slice(k, &map.mul_vec(&q.slice(k)));
    }
    out
}

/// Rotation matrix of the unit quaternion `w` acting on 3-vectors.
fn rotation3(w: [f64; 4]) -> [[f64; 3]; 3] {
    let n = w.iter().map(|x| x * x).sum::<f64>();
    let [a, b, c, d] = w.map(|x| x / n.sqrt());
    [
        [a * a + b * b - c * c - d * d, 2.0 * (b * c - a * d), 2.0 * (b * d + a * c)],
        [2.0 * (b * c + a * d), a * a - b * b + c * c - d * d, 2.0 * (c * d - a * b)],
        [2.0 * (b * d - a * c), 2.0 * (c * d + a * b), a * a - b * b - c * c + d * d],
    ]
}

fn rotate_approximate(
    q: &QuasilinearField,
    basis: &Arc<CentralizerBasis>,
    beta: &[Q],
    omega_sq: &Q,
) -> Result<(QuasilinearField, Rotation)> {
    let b: Vec<f64> = beta.iter().map(to_f64).collect();
    let omega = to_f64(omega_sq).sqrt();
    let w = if omega + b[1] == 0.0 {
        [0.0, 0.0, 0.0, 1.0]
    } else {
        [omega + b[1], 0.0, b[3], -b[2]]
    };
    let r3 = rotation3(w);
    let rotate = |v: &[f64]| -> [f64; 3] {
        let mut o = [0.0; 3];
        for (i, oi) in o.iter_mut().enumerate() {
            *oi = (0..3).map(|j| r3[i][j] * v[j]).sum();
        }
        o
    };
    let lin = rotate(&b[1..]);
    let mut residual = (lin[0] - omega).abs().max(lin[1].abs()).max(lin[2].abs());
    // residual measured on the matrices themselves
    let kmat: Vec<Vec<Vec<f64>>> = basis.matrices().iter().map(Matrix::to_f64).collect();
    let n = basis.dim();
    for i in 0..n {
        for j in 0..n {
            let a_new: f64 = (0..3).map(|a| lin[a] * kmat[a + 1][i][j]).sum();
            residual = residual.max((a_new - omega * kmat[1][i][j]).abs());
        }
    }
    if residual > ROTATION_TOLERANCE {
        return Err(Error::Internal(format!(
            "approximate rotation residual {residual:e} exceeds {ROTATION_TOLERANCE:e}"
        )));
    }
    let mut out = QuasilinearField::zero(basis.clone());
    for k in 0..=q.max_k().unwrap_or(0) {
        let s = q.slice(k);
        let vec: Vec<f64> = s.iter().map(to_f64).collect();
        if k == 0 {
            out.set_slice(0, &[s[0].clone(), from_f64(omega), Q::zero(), Q::zero()]);
            continue;
        }
        let r = rotate(&vec[1..]);
        out.set_slice(k, &[s[0].clone(), from_f64(r[0]), from_f64(r[1]), from_f64(r[2])]);
    }
    let mut map = Matrix::identity(4);
    for i in 0..3 {
        for j in 0..3 {
            map[(i + 1, j + 1)] = from_f64(r3[i][j]);
        }
    }
    let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut matrix = vec![vec![0.0; n]; n];
    for (p, kp) in kmat.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                matrix[i][j] += w[p] / wn * kp[i][j];
            }
        }
    }
    Ok((
        out,
        Rotation {
            quaternion: w.map(from_f64),
            coefficient_map: map,
            matrix,
            approximate: true,
            residual,
        },
    ))
}

/// Slots that must vanish in a C3 normal form: everything off `span{I, J}`.
pub fn off_axis_part(nf: &QuasilinearField) -> Vec<(usize, Vec<Q>)> {
    let beta = nf.linear_part();
    let mut out = Vec::new();
    for k in 1..=nf.max_k().unwrap_or(0) {
        let s = nf.slice(k);
        let cross = cross_with(&beta[1..], &s[1..]);
        if cross.iter().any(|c| !c.is_zero()) {
            out.push((k, cross));
        }
    }
    out
}

/// Generalized cross product: all 2x2 minors `u_i v_j - u_j v_i`, zero iff
/// `u` and `v` are parallel.
pub fn cross_with(u: &[Q], v: &[Q]) -> Vec<Q> {
    let mut out = Vec::new();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            out.push(&u[i] * &v[j] - &u[j] * &v[i]);
        }
    }
    out
}
