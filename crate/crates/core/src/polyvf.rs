//! Exact polynomial vector fields on R^n.
//!
//! A [`PolyVectorField`] is a sparse map `(component, monomial) -> coefficient`
//! with rational coefficients. Grade `k` means the homogeneous piece of
//! polynomial degree `k + 1`, so that the bracket with a grade-`k` field maps
//! grade `m` to grade `m + k`.
//!
//! The bracket is the component form of the vector-field commutator,
//! `{f, g}^i = (f^k d_k) g^i - (g^k d_k) f^i`. Everything else in the crate
//! that computes brackets through structure constants is checked against
//! [`PolyVectorField::bracket`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::rational::{num_den_strings, parse_num_den, to_f64, Q};

/// Grade of a homogeneous piece: polynomial degree minus one.
pub type GradeIndex = usize;

/// Exponent vector, one entry per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `d/dx_i` applied to the monomial: `(exponent, reduced monomial)`, or
    /// `None` when the variable does not occur.
    fn derivative(&self, i: usize) -> Option<(u32, Monomial)> {
        let e = self.0[i];
        if e == 0 {
            return None;
        }
        let mut m = self.0.clone();
        m[i] -= 1;
        Some((e, Monomial(m)))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(e, _)| **e > 0)
            .map(|(&e, &xi)| xi.powi(e as i32))
            .product()
    }
}

/// Sparse scalar polynomial; used to build invariant factors like `r^{2k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::one(nvars), Q::one());
        p
    }

    /// `r^2 = x_1^2 + ... + x_n^2`.
    pub fn radius_squared(nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        for i in 0..nvars {
            let mut e = vec![0; nvars];
            e[i] = 2;
            p.terms.insert(Monomial(e), Q::one());
        }
        p
    }

    /// `(r^2)^k`.
    pub fn radius_power(nvars: usize, k: usize) -> Self {
        let r2 = Self::radius_squared(nvars);
        (0..k).fold(Self::one(nvars), |acc, _| acc.mul(&r2))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                add_coeff(&mut out.terms, m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }
}

fn add_coeff<K: Ord>(map: &mut BTreeMap<K, Q>, key: K, c: Q) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// Polynomial vector field `f^i(x) d/dx^i` with exact coefficients.
///
/// Terms are keyed by `(component, monomial)` in lexicographic order and
/// never store zero coefficients, so structural equality is mathematical
/// equality.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    dim: usize,
    terms: BTreeMap<(usize, Monomial), Q>,
}

impl PolyVectorField {
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "ambient dimension must be positive");
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The identity field `x^i d/dx^i`.
    pub fn identity(dim: usize) -> Self {
        Self::linear(&Matrix::identity(dim))
    }

    /// The linear field `(M x)^i d/dx^i`.
    pub fn linear(m: &Matrix) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let mut f = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                f.add_term(i, Monomial::var(n, j), m[(i, j)].clone());
            }
        }
        f
    }

    /// `p(x) (M x)`.
    pub fn scalar_times_linear(p: &Polynomial, m: &Matrix) -> Self {
        let n = m.rows();
        let mut f = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mij = &m[(i, j)];
                if mij.is_zero() {
                    continue;
                }
                let xj = Monomial::var(n, j);
                for (mono, c) in p.terms() {
                    f.add_term(i, mono.mul(&xj), c * mij);
                }
            }
        }
        f
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (usize, Vec<u32>, Q)>) -> Result<Self> {
        let mut f = Self::zero(dim);
        for (i, e, c) in terms {
            if i >= dim {
                return Err(Error::Parse(format!("component {i} out of range for dimension {dim}")));
            }
            check_dim(dim, e.len())?;
            f.add_term(i, Monomial(e), c);
        }
        Ok(f)
    }

    /// Adds `c * x^mono` to component `i` (0-based).
    pub fn add_term(&mut self, i: usize, mono: Monomial, c: Q) {
        assert!(i < self.dim && mono.len() == self.dim);
        add_coeff(&mut self.terms, (i, mono), c);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Monomial, &Q)> {
        self.terms.iter().map(|((i, m), c)| (*i, m, c))
    }

    pub fn coeff(&self, i: usize, mono: &Monomial) -> Q {
        self.terms
            .get(&(i, mono.clone()))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for ((i, m), c) in &other.terms {
            add_coeff(&mut out.terms, (*i, m.clone()), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// `a f + b g`.
    pub fn linear_combination(a: &Q, f: &Self, b: &Q, g: &Self) -> Result<Self> {
        f.scale(a).add(&g.scale(b))
    }

    /// Lie-Poisson bracket `{f, g}^i = (f^k d_k) g^i - (g^k d_k) f^i`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        self.bracket_truncated(other, GradeIndex::MAX)
    }

    /// Bracket with every term of grade above `max_grade` dropped.
    pub fn bracket_truncated(&self, other: &Self, max_grade: GradeIndex) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let max_deg = u32::try_from(max_grade.saturating_add(1)).unwrap_or(u32::MAX);
        let mut out = Self::zero(self.dim);
        directional(&mut out, self, other, &Q::one(), max_deg);
        directional(&mut out, other, self, &-Q::one(), max_deg);
        Ok(out)
    }

    /// Homogeneous pieces keyed by grade (degree - 1). Constant terms have no
    /// grade and are rejected by `debug_assert`; fields here vanish at 0.
    pub fn grade_decompose(&self) -> BTreeMap<GradeIndex, PolyVectorField> {
        let mut out: BTreeMap<GradeIndex, PolyVectorField> = BTreeMap::new();
        for ((i, m), c) in &self.terms {
            let deg = m.degree() as usize;
            debug_assert!(deg >= 1, "constant term in vector field");
            let g = deg.saturating_sub(1);
            out.entry(g)
                .or_insert_with(|| PolyVectorField::zero(self.dim))
                .terms
                .insert((*i, m.clone()), c.clone());
        }
        out
    }

    /// Piece of a single grade.
    pub fn grade_piece(&self, grade: GradeIndex) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|((_, m), _)| m.degree() as usize == grade + 1)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Drops every term of grade greater than `max_grade`.
    pub fn truncate(&self, max_grade: GradeIndex) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|((_, m), _)| (m.degree() as usize) <= max_grade + 1)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn max_grade(&self) -> Option<GradeIndex> {
        self.terms
            .keys()
            .map(|(_, m)| (m.degree() as usize).saturating_sub(1))
            .max()
    }

    /// Returns the single grade if the field is homogeneous and nonzero.
    pub fn homogeneous_grade(&self) -> Option<GradeIndex> {
        let mut grades = self.terms.keys().map(|(_, m)| m.degree() as usize);
        let first = grades.next()?;
        grades.all(|d| d == first).then(|| first.saturating_sub(1))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let mut out = vec![0.0; self.dim];
        for ((i, m), c) in &self.terms {
            out[*i] += to_f64(c) * m.eval(x);
        }
        Ok(out)
    }

    /// Float evaluator with coefficients converted once.
    pub fn compile(&self) -> CompiledField {
        CompiledField {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|((i, m), c)| (*i, m.0.iter().map(|&e| e as i32).collect(), to_f64(c)))
                .collect(),
        }
    }

    /// Truncated Lie series `exp(ad_h) f = f + {h,f} + {h,{h,f}}/2 + ...`,
    /// keeping grades `<= max_grade`. `h` must have no linear part.
    pub fn lie_series(h: &Self, f: &Self, max_grade: GradeIndex) -> Result<Self> {
        check_dim(h.dim, f.dim)?;
        if h.terms.keys().any(|(_, m)| m.degree() < 2) {
            return Err(Error::Internal("Lie series generator must start at grade 1".into()));
        }
        let mut result = f.truncate(max_grade);
        let mut term = result.clone();
        let mut n = 1i64;
        loop {
            term = h.bracket_truncated(&term, max_grade)?.scale(&Q::new(1.into(), n.into()));
            if term.is_zero() {
                break;
            }
            result = result.add(&term)?;
            n += 1;
        }
        Ok(result)
    }

    /// Componentwise directional derivative `(self^k d_k) g`.
    pub fn directional_derivative(&self, g: &Self) -> Result<Self> {
        check_dim(self.dim, g.dim)?;
        let mut out = Self::zero(self.dim);
        directional(&mut out, self, g, &Q::one(), u32::MAX);
        Ok(out)
    }

    /// Taylor polynomial of the time-one flow of `-h`,
    /// `y = sum_n (-h.grad)^n x / n!`, keeping grades `<= max_grade`.
    ///
    /// In the coordinates `y` a field `f` becomes `exp(ad_h) f`.
    pub fn inverse_flow_map(h: &Self, max_grade: GradeIndex) -> Result<Self> {
        if h.terms.keys().any(|(_, m)| m.degree() < 2) {
            return Err(Error::Internal("flow generator must start at grade 1".into()));
        }
        let mut result = Self::identity(h.dim);
        let mut term = result.clone();
        let mut n = 1i64;
        loop {
            term = h
                .directional_derivative(&term)?
                .truncate(max_grade)
                .scale(&Q::new((-1).into(), n.into()));
            if term.is_zero() {
                break;
            }
            result = result.add(&term)?;
            n += 1;
        }
        Ok(result)
    }

    pub fn to_json(&self) -> PolyVectorFieldJson {
        PolyVectorFieldJson {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|((i, m), c)| {
                    let (num, den) = num_den_strings(c);
                    TermJson {
                        component: i + 1,
                        exponents: m.0.clone(),
                        num,
                        den,
                    }
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &PolyVectorFieldJson) -> Result<Self> {
        if doc.dim == 0 {
            return Err(Error::Parse("field dimension must be positive".into()));
        }
        let mut f = Self::zero(doc.dim);
        for t in &doc.terms {
            if t.component == 0 || t.component > doc.dim {
                return Err(Error::Parse(format!(
                    "term component {} outside 1..={}",
                    t.component, doc.dim
                )));
            }
            if t.exponents.len() != doc.dim {
                return Err(Error::Parse(format!(
                    "term exponents have length {}, expected {}",
                    t.exponents.len(),
                    doc.dim
                )));
            }
            if t.exponents.iter().all(|&e| e == 0) {
                return Err(Error::Parse("constant terms are not allowed (fixed point at the origin)".into()));
            }
            let c = parse_num_den(&t.num, &t.den)?;
            f.add_term(t.component - 1, Monomial(t.exponents.clone()), c);
        }
        Ok(f)
    }
}

/// `out += s * (f^k d_k) g`.
/// Adds `s (f^k d_k) g` to `out`, skipping products of degree above `max_deg`.
fn directional(out: &mut PolyVectorField, f: &PolyVectorField, g: &PolyVectorField, s: &Q, max_deg: u32) {
    for ((k, mf), cf) in &f.terms {
        let coef = cf * s;
        let df = mf.degree();
        for ((i, mg), cg) in &g.terms {
            if (df + mg.degree()).saturating_sub(1) > max_deg {
                continue;
            }
            if let Some((e, dm)) = mg.derivative(*k) {
                let c = &coef * cg * Q::from_integer(e.into());
                add_coeff(&mut out.terms, (*i, mf.mul(&dm)), c);
            }
        }
    }
}

impl fmt::Debug for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyVectorField(dim={}, {} terms)", self.dim, self.terms.len())?;
        for ((i, m), c) in &self.terms {
            write!(f, "\n  [{}] {} * x^{:?}", i + 1, c, m.0)?;
        }
        Ok(())
    }
}

/// Float evaluator for numerical integration.
#[derive(Clone, Debug)]
pub struct CompiledField {
    dim: usize,
    terms: Vec<(usize, Vec<i32>, f64)>,
}

impl CompiledField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, e, c) in &self.terms {
            let mut v = *c;
            for (xi, &ei) in x.iter().zip(e) {
                if ei > 0 {
                    v *= xi.powi(ei);
                }
            }
            out[*i] += v;
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    /// 1-based component index.
    pub component: usize,
    pub exponents: Vec<u32>,
    pub num: String,
    pub den: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyVectorFieldJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn x_pow(n: usize, powers: &[u32]) -> Monomial {
        assert_eq!(powers.len(), n);
        Monomial::new(powers.to_vec())
    }

    fn psi(n: usize, k: usize) -> PolyVectorField {
        PolyVectorField::scalar_times_linear(&Polynomial::radius_power(n, k), &Matrix::identity(n))
    }

    #[test]
    fn bracket_self_is_zero() {
        let f = psi(3, 2).add(&PolyVectorField::identity(3)).unwrap();
        assert!(f.bracket(&f).unwrap().is_zero());
    }

    #[test]
    fn one_dimensional_bracket() {
        // {x d_x, x^2 d_x} = x * 2x - x^2 * 1 = x^2
        let mut f = PolyVectorField::zero(1);
        f.add_term(0, x_pow(1, &[1]), q(1));
        let mut g = PolyVectorField::zero(1);
        g.add_term(0, x_pow(1, &[2]), q(1));
        assert_eq!(f.bracket(&g).unwrap(), g);
    }

    #[test]
    fn psi_structure_constant() {
        let b = psi(2, 1).bracket(&psi(2, 2)).unwrap();
        assert_eq!(b, psi(2, 3).scale(&q(2)));
    }

    #[test]
    fn dimension_mismatch() {
        let f = PolyVectorField::identity(2);
        let g = PolyVectorField::identity(3);
        assert!(matches!(f.bracket(&g), Err(Error::Dimension { .. })));
        assert!(matches!(f.add(&g), Err(Error::Dimension { .. })));
        assert!(f.evaluate(&[1.0]).is_err());
    }

    #[test]
    fn grade_decomposition() {
        assert!(PolyVectorField::zero(2).grade_decompose().is_empty());
        let a = Matrix::from_i64(2, &[1, -2, 3, 4]);
        let f = PolyVectorField::linear(&a).add(&psi(2, 1)).unwrap();
        let pieces = f.grade_decompose();
        assert_eq!(pieces.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(pieces[&0], PolyVectorField::linear(&a));
        assert_eq!(pieces[&2], psi(2, 1));
    }

    #[test]
    fn grades_of_complex_quasilinear_sum() {
        // alpha_0 = 1 + r^2, alpha_1 = r^2 with J the rotation generator
        let j = Matrix::from_i64(2, &[0, -1, 1, 0]);
        let r2 = Polynomial::radius_squared(2);
        let f = PolyVectorField::identity(2)
            .add(&psi(2, 1))
            .unwrap()
            .add(&PolyVectorField::scalar_times_linear(&r2, &j))
            .unwrap();
        let pieces = f.grade_decompose();
        assert_eq!(pieces.keys().copied().collect::<Vec<_>>(), vec![0, 2]);
        for (g, piece) in &pieces {
            assert_eq!(piece.homogeneous_grade(), Some(*g));
        }
        let sum = pieces
            .values()
            .fold(PolyVectorField::zero(2), |acc, p| acc.add(p).unwrap());
        assert_eq!(sum, f);
    }

    #[test]
    fn evaluation() {
        assert_eq!(PolyVectorField::zero(3).evaluate(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
        assert_eq!(PolyVectorField::identity(1).evaluate(&[2.0]).unwrap(), vec![2.0]);
        assert_eq!(psi(2, 1).evaluate(&[1.0, 1.0]).unwrap(), vec![2.0, 2.0]);
        let c = psi(2, 1).compile();
        let mut out = [0.0; 2];
        c.eval_into(&[1.0, 1.0], &mut out);
        assert_eq!(out, [2.0, 2.0]);
    }

    #[test]
    fn linear_combinations() {
        let f = psi(2, 1).add(&PolyVectorField::identity(2)).unwrap();
        assert!(f.add(&f.scale(&q(-1))).unwrap().is_zero());
        let id = PolyVectorField::identity(1);
        let two = id.scale(&q(2));
        assert_eq!(two.coeff(0, &Monomial::var(1, 0)), q(2));
        let lc = PolyVectorField::linear_combination(&qf(1, 2), &two, &q(-1), &id).unwrap();
        assert!(lc.is_zero());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let f = psi(2, 1).scale(&qf(-3, 7)).add(&PolyVectorField::identity(2)).unwrap();
        let doc = f.to_json();
        assert!(doc.terms.iter().all(|t| (1..=2).contains(&t.component)));
        let text = serde_json::to_string(&doc).unwrap();
        let back: PolyVectorFieldJson = serde_json::from_str(&text).unwrap();
        assert_eq!(PolyVectorField::from_json(&back).unwrap(), f);

        let mut bad = doc.clone();
        bad.terms[0].component = 3;
        assert!(PolyVectorField::from_json(&bad).is_err());
    }

    #[test]
    fn lie_series_of_one_dimensional_example() {
        // f = x, h = c x^2: exp(ad_h) f = x - c x^2 + 0 (higher brackets vanish at grade <= 1)
        let f = PolyVectorField::identity(1);
        let mut h = PolyVectorField::zero(1);
        h.add_term(0, Monomial::new(vec![2]), q(3));
        let out = PolyVectorField::lie_series(&h, &f, 1).unwrap();
        let mut expected = PolyVectorField::identity(1);
        expected.add_term(0, Monomial::new(vec![2]), q(-3));
        assert_eq!(out, expected);
    }
}
