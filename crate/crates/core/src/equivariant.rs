//! Quasilinear equivariant fields `sum_p alpha_p(r^2) K_p x`.
//!
//! A [`QuasilinearField`] stores `a_{p,k}` with `alpha_p(rho) = sum_k a_{p,k} rho^k`,
//! i.e. coordinates on the basis fields `Phi^(p)_k = r^{2k} K_p x`
//! (`Psi_k = Phi^(0)_k = r^{2k} x`). The slot `(p, k)` has polynomial degree
//! `2k + 1`, grade `2k`.
//!
//! Brackets are computed with closed-form structure constants:
//!
//! ```text
//! {Phi^(p)_k, Phi^(q)_m} = 2m sigma_p Phi^(q)_{k+m} - 2k sigma_q Phi^(p)_{k+m}
//!                          + sum_s C^s_{pq} Phi^(s)_{k+m}
//! ```
//!
//! where `sym(K_p) = sigma_p I` (1 for `K_0`, 0 for the antisymmetric
//! `K_a`) and `{K_p x, K_q x} = sum_s C^s_{pq} K_s x` is the linear table of
//! the [`CentralizerBasis`]. In particular `{Psi_k, Psi_m} = 2(m-k) Psi_{k+m}`,
//! `{Psi_k, Phi^(p)_m} = 2m Phi^(p)_{k+m}`, and since `{Ax, Bx} = -[A,B] x`,
//! the quaternionic basis gives
//! `{Phi^(a)_k, Phi^(b)_m} = -2 eps_{abc} Phi^(c)_{k+m}` with no `Psi`
//! contribution. The oracle tests check every pair against the polynomial
//! bracket.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::liealg::CentralizerBasis;
use crate::linalg::{project_onto_columns, solve, Matrix};
use crate::polyvf::{Monomial, PolyVectorField, Polynomial};
use crate::rational::{num_den_strings, parse_num_den, to_f64, Q};

/// Coordinate `(p, k)` on `Phi^(p)_k = r^{2k} K_p x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub p: usize,
    pub k: usize,
}

impl Slot {
    pub fn new(p: usize, k: usize) -> Self {
        Self { p, k }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 {
            write!(f, "Psi_{}", self.k)
        } else {
            write!(f, "Phi^({})_{}", self.p, self.k)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisElement {
    Psi { k: usize },
    Phi { p: usize, k: usize },
}

impl BasisElement {
    pub fn slot(self) -> Slot {
        match self {
            BasisElement::Psi { k } => Slot::new(0, k),
            BasisElement::Phi { p, k } => Slot::new(p, k),
        }
    }

    pub fn from_slot(s: Slot) -> Self {
        if s.p == 0 {
            BasisElement::Psi { k: s.k }
        } else {
            BasisElement::Phi { p: s.p, k: s.k }
        }
    }
}

/// Bracket of two basis slots on the equivariant basis.
fn slot_bracket(a: Slot, b: Slot, basis: &CentralizerBasis) -> Vec<(Q, Slot)> {
    let k = a.k + b.k;
    let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
    let two = Q::from_integer(2.into());
    let sp = basis.symmetric_scalar(a.p);
    if !sp.is_zero() && b.k > 0 {
        *acc.entry(b.p).or_insert_with(Q::zero) += &two * Q::from_integer((b.k as i64).into()) * sp;
    }
    let sq = basis.symmetric_scalar(b.p);
    if !sq.is_zero() && a.k > 0 {
        *acc.entry(a.p).or_insert_with(Q::zero) -= &two * Q::from_integer((a.k as i64).into()) * sq;
    }
    for (s, c) in basis.linear_bracket(a.p, b.p).iter().enumerate() {
        if !c.is_zero() {
            *acc.entry(s).or_insert_with(Q::zero) += c;
        }
    }
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(s, c)| (c, Slot::new(s, k)))
        .collect()
}

/// `{e1, e2}` expanded on the basis, from the cached structure constants.
pub fn structure_bracket(e1: BasisElement, e2: BasisElement, basis: &CentralizerBasis) -> Result<Vec<(Q, BasisElement)>> {
    for e in [e1, e2] {
        let s = e.slot();
        if s.p >= basis.len() || matches!(e, BasisElement::Phi { p: 0, .. }) {
            return Err(Error::Parse(format!("basis element {s} not available for this centralizer")));
        }
    }
    Ok(slot_bracket(e1.slot(), e2.slot(), basis)
        .into_iter()
        .map(|(c, s)| (c, BasisElement::from_slot(s)))
        .collect())
}

/// Compares [`structure_bracket`] with the polynomial bracket of the
/// expansions for every pair of slots with `k, m <= max_k`; returns the
/// pairs that disagree.
pub fn structure_constant_mismatches(basis: &Arc<CentralizerBasis>, max_k: usize) -> Result<Vec<(Slot, Slot)>> {
    let slots: Vec<Slot> = (0..=max_k)
        .flat_map(|k| (0..basis.len()).map(move |p| Slot::new(p, k)))
        .collect();
    let expanded: Vec<PolyVectorField> = slots
        .iter()
        .map(|s| Ok(QuasilinearField::single(basis.clone(), *s, Q::one())?.expand()))
        .collect::<Result<_>>()?;
    let mut bad = Vec::new();
    for (i, a) in slots.iter().enumerate() {
        for (j, b) in slots.iter().enumerate() {
            let mut via_table = QuasilinearField::zero(basis.clone());
            for (c, e) in structure_bracket(BasisElement::from_slot(*a), BasisElement::from_slot(*b), basis)? {
                via_table.add_to(e.slot(), c);
            }
            if via_table.expand() != expanded[i].bracket(&expanded[j])? {
                bad.push((*a, *b));
            }
        }
    }
    Ok(bad)
}

/// Equivariant field `sum_{p,k} a_{p,k} r^{2k} K_p x`.
#[derive(Clone)]
pub struct QuasilinearField {
    basis: Arc<CentralizerBasis>,
    coeffs: BTreeMap<Slot, Q>,
}

impl PartialEq for QuasilinearField {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && (Arc::ptr_eq(&self.basis, &other.basis) || self.basis.matrices() == other.basis.matrices())
    }
}

impl fmt::Debug for QuasilinearField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuasilinearField[{}](", self.basis.group_label())?;
        let parts: Vec<String> = self.coeffs.iter().map(|(s, c)| format!("{c}*{s}")).collect();
        write!(f, "{})", parts.join(" + "))
    }
}

impl QuasilinearField {
    pub fn zero(basis: Arc<CentralizerBasis>) -> Self {
        Self {
            basis,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(basis: Arc<CentralizerBasis>, coeffs: impl IntoIterator<Item = (usize, usize, Q)>) -> Result<Self> {
        let mut f = Self::zero(basis);
        for (p, k, c) in coeffs {
            if p >= f.basis.len() {
                return Err(Error::Parse(format!(
                    "coefficient index p = {p} outside 0..{} for this centralizer",
                    f.basis.len()
                )));
            }
            f.add_to(Slot::new(p, k), c);
        }
        Ok(f)
    }

    pub fn single(basis: Arc<CentralizerBasis>, slot: Slot, c: Q) -> Result<Self> {
        Self::from_coeffs(basis, [(slot.p, slot.k, c)])
    }

    pub fn basis(&self) -> &Arc<CentralizerBasis> {
        &self.basis
    }

    pub fn num_components(&self) -> usize {
        self.basis.len()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (Slot, &Q)> {
        self.coeffs.iter().map(|(s, c)| (*s, c))
    }

    pub fn coeff(&self, p: usize, k: usize) -> Q {
        self.coeffs
            .get(&Slot::new(p, k))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_to(&mut self, slot: Slot, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(slot).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&slot);
        }
    }

    pub fn set(&mut self, slot: Slot, c: Q) {
        if c.is_zero() {
            self.coeffs.remove(&slot);
        } else {
            self.coeffs.insert(slot, c);
        }
    }

    pub fn nonzero_slots(&self) -> BTreeSet<Slot> {
        self.coeffs.keys().copied().collect()
    }

    pub fn max_k(&self) -> Option<usize> {
        self.coeffs.keys().map(|s| s.k).max()
    }

    /// Keeps slots with `k <= max_k`.
    pub fn truncate(&self, max_k: usize) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(s, _)| s.k <= max_k)
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
        }
    }

    /// Coefficients `(a_{0,k}, ..., a_{s,k})` of the `r^{2k}` slice.
    pub fn slice(&self, k: usize) -> Vec<Q> {
        (0..self.basis.len()).map(|p| self.coeff(p, k)).collect()
    }

    pub fn set_slice(&mut self, k: usize, values: &[Q]) {
        for (p, v) in values.iter().enumerate() {
            self.set(Slot::new(p, k), v.clone());
        }
    }

    /// `beta_p = alpha_p(0)`.
    pub fn linear_part(&self) -> Vec<Q> {
        self.slice(0)
    }

    /// Matrix `A = sum_p beta_p K_p` of the linear part.
    pub fn linear_matrix(&self) -> Matrix {
        self.slice_matrix(0)
    }

    pub fn slice_matrix(&self, k: usize) -> Matrix {
        let n = self.basis.dim();
        self.slice(k)
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Matrix::zeros(n, n), |acc, (p, c)| &acc + &self.basis.matrix(p).scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            out.add_to(*s, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.basis.clone());
        }
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|(s, v)| (*s, v * c)).collect(),
        }
    }

    /// `{self, other}` through the structure constants.
    pub fn bracket(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.basis.clone());
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let cab = ca * cb;
                for (c, s) in slot_bracket(*a, *b, &self.basis) {
                    out.add_to(s, &cab * c);
                }
            }
        }
        out
    }

    /// Like [`bracket`](Self::bracket) but drops slots above `max_k` early.
    pub fn bracket_truncated(&self, other: &Self, max_k: usize) -> Self {
        let mut out = Self::zero(self.basis.clone());
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if a.k + b.k > max_k {
                    continue;
                }
                let cab = ca * cb;
                for (c, s) in slot_bracket(*a, *b, &self.basis) {
                    out.add_to(s, &cab * c);
                }
            }
        }
        out
    }

    /// Lie-series push-forward `exp(ad_h) self`, truncated at `max_k`.
    ///
    /// This is the field in the coordinates `y = phi_{-h}(x)`, the time-one
    /// flow of `-h`. The generator `h` must have no `k = 0` slots.
    pub fn push_forward(&self, h: &Self, max_k: usize) -> Result<Self> {
        if h.coeffs.keys().any(|s| s.k == 0) {
            return Err(Error::Internal("generator has a linear part".into()));
        }
        let mut result = self.truncate(max_k);
        if h.is_zero() {
            return Ok(result);
        }
        let mut term = result.clone();
        let mut n = 1i64;
        loop {
            term = h
                .bracket_truncated(&term, max_k)
                .scale(&Q::new(1.into(), n.into()));
            if term.is_zero() {
                break;
            }
            result = result.add(&term);
            n += 1;
        }
        Ok(result)
    }

    /// Expansion to an explicit polynomial field.
    pub fn expand(&self) -> PolyVectorField {
        let n = self.basis.dim();
        let mut out = PolyVectorField::zero(n);
        let mut powers: BTreeMap<usize, Polynomial> = BTreeMap::new();
        for (s, c) in &self.coeffs {
            let rk = powers
                .entry(s.k)
                .or_insert_with(|| Polynomial::radius_power(n, s.k));
            let piece = PolyVectorField::scalar_times_linear(rk, &self.basis.matrix(s.p).scale(c));
            out = out.add(&piece).expect("same dimension");
        }
        out
    }

    /// Recovers quasilinear coordinates of `f`, grade by grade.
    ///
    /// Each grade `2k` piece is solved exactly on `{r^{2k} K_p x}`; odd
    /// grades and pieces outside the span are reported through
    /// [`Error::NotQuasilinear`] with the residual `f - expand(best fit)`,
    /// where the best fit is the orthogonal projection on the span.
    pub fn decompose(f: &PolyVectorField, basis: Arc<CentralizerBasis>) -> Result<Self> {
        check_dim(basis.dim(), f.dim())?;
        let mut q = Self::zero(basis.clone());
        let mut fits = true;
        for (grade, piece) in f.grade_decompose() {
            if grade % 2 == 1 {
                fits = false;
                continue;
            }
            let k = grade / 2;
            let elementary: Vec<PolyVectorField> = (0..basis.len())
                .map(|p| {
                    Self::single(basis.clone(), Slot::new(p, k), Q::one())
                        .expect("slot in range")
                        .expand()
                })
                .collect();
            let mut rows: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
            for e in elementary.iter().chain(std::iter::once(&piece)) {
                for (i, m, _) in e.terms() {
                    let next = rows.len();
                    rows.entry((i, m.clone())).or_insert(next);
                }
            }
            let mut m = Matrix::zeros(rows.len(), elementary.len());
            for (j, e) in elementary.iter().enumerate() {
                for (i, mono, c) in e.terms() {
                    m[(rows[&(i, mono.clone())], j)] = c.clone();
                }
            }
            let mut t = vec![Q::zero(); rows.len()];
            for (i, mono, c) in piece.terms() {
                t[rows[&(i, mono.clone())]] = c.clone();
            }
            let coords = match solve(&m, &t) {
                Some(x) => x,
                None => {
                    fits = false;
                    let proj = project_onto_columns(&m, &t);
                    solve(&m, &proj).expect("projection lies in the column space")
                }
            };
            for (p, c) in coords.into_iter().enumerate() {
                q.add_to(Slot::new(p, k), c);
            }
        }
        if fits {
            Ok(q)
        } else {
            let residual = f.sub(&q.expand())?;
            Err(Error::NotQuasilinear {
                residual: Box::new(residual),
            })
        }
    }

    /// Potentials `H_p(rho) = sum_k a_{p,k} rho^{k+1} / (2k + 2)`, so that
    /// `grad H_p(|x|^2) = alpha_p(|x|^2) x` and the field is
    /// `sum_p K_p grad H_p`.
    pub fn potentials(&self) -> Vec<Potential> {
        let mut out = vec![Potential::default(); self.basis.len()];
        for (s, c) in &self.coeffs {
            let denom = Q::from_integer((2 * s.k as i64 + 2).into());
            out[s.p].coeffs.insert(s.k + 1, c / denom);
        }
        out
    }

    pub fn to_json(&self) -> QuasilinearFieldJson {
        QuasilinearFieldJson {
            group: self.basis.group_label(),
            coeffs: self
                .coeffs
                .iter()
                .map(|(s, c)| {
                    let (num, den) = num_den_strings(c);
                    CoeffJson { p: s.p, k: s.k, num, den }
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &QuasilinearFieldJson, basis: Arc<CentralizerBasis>) -> Result<Self> {
        let coeffs = doc
            .coeffs
            .iter()
            .map(|c| Ok((c.p, c.k, parse_num_den(&c.num, &c.den)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(basis, coeffs)
    }
}

/// Univariate polynomial in `rho = r^2` with zero constant term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Potential {
    /// power of rho -> coefficient
    pub coeffs: BTreeMap<usize, Q>,
}

impl Potential {
    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(Zero::is_zero)
    }

    pub fn coeff(&self, power: usize) -> Q {
        self.coeffs.get(&power).cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, rho: f64) -> f64 {
        self.coeffs.iter().map(|(&e, c)| to_f64(c) * rho.powi(e as i32)).sum()
    }

    pub fn derivative_at(&self, rho: f64) -> f64 {
        self.coeffs
            .iter()
            .filter(|(&e, _)| e > 0)
            .map(|(&e, c)| to_f64(c) * e as f64 * rho.powi(e as i32 - 1))
            .sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CoeffJson {
    pub p: usize,
    pub k: usize,
    pub num: String,
    pub den: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct QuasilinearFieldJson {
    pub group: String,
    pub coeffs: Vec<CoeffJson>,
}
