//! Grade-by-grade elimination in the equivariant module.
//!
//! Both Poincaré–Dulac normalization and the renormalized forms reduce a
//! [`QuasilinearField`] by the same loop. For every grade `g = 1..=max_k`
//! the engine
//!
//! 1. collects candidate generators `h_k` from the levels `s` of the current
//!    field (`k = g - s`), restricted to the generator components of the
//!    current [`Phase`];
//! 2. keeps only the combinations whose first-order effect `{h_k, f}` vanishes
//!    on the phase components below grade `g` (the higher homological
//!    operators see only their common kernel);
//! 3. orthogonally projects the grade-`g` target onto the span of the
//!    remaining effects and solves for the coefficients;
//! 4. applies the generators by Lie-series push-forward and checks the
//!    certificate.
//!
//! Orthogonality is taken in the slot-coefficient basis, in which the `K_p`
//! are orthonormal. For the linear homological operator this operator is
//! normal, so the projection choice is the usual `Ran ⊕ Ker` split.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::equivariant::{QuasilinearField, Slot};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, project_onto_columns, solve, Matrix};
use crate::rational::Q;

/// Which slots are reduced and by which generator components.
#[derive(Clone, Debug)]
pub struct Phase {
    pub name: &'static str,
    pub components: Vec<usize>,
    pub generators: Vec<usize>,
}

impl Phase {
    pub fn all(s: usize) -> Self {
        Self {
            name: "all",
            components: (0..s).collect(),
            generators: (0..s).collect(),
        }
    }

    pub fn psi() -> Self {
        Self {
            name: "psi",
            components: vec![0],
            generators: vec![0],
        }
    }

    pub fn phi(s: usize) -> Self {
        Self {
            name: "phi",
            components: (1..s).collect(),
            generators: (1..s).collect(),
        }
    }
}

/// Levels of the current field allowed to act on generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Levels {
    /// Only the linear part: the classical homological operator.
    Linear,
    /// Every nonzero slice below the target grade.
    Below,
}

/// One generator, applied as `exp(ad_h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub k: usize,
    pub field: QuasilinearField,
}

/// Exact record of one grade solve: `target + effect(coefficients) = survivors`.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub phase: &'static str,
    pub grade: usize,
    pub slots: Vec<Slot>,
    pub target: Vec<Q>,
    /// Effect of each admissible generator direction on `slots`.
    pub columns: Matrix,
    pub coefficients: Vec<Q>,
    pub survivors: Vec<Q>,
}

impl Certificate {
    /// Re-checks `target + columns * coefficients == survivors`.
    pub fn holds(&self) -> bool {
        let eff = self.columns.mul_vec(&self.coefficients);
        self.target
            .iter()
            .zip(&eff)
            .map(|(t, e)| t + e)
            .eq(self.survivors.iter().cloned())
    }

    /// Slots whose target was nonzero and that were removed.
    pub fn eliminated(&self) -> Vec<Slot> {
        self.slots
            .iter()
            .zip(self.target.iter().zip(&self.survivors))
            .filter(|(_, (t, s))| !t.is_zero() && s.is_zero())
            .map(|(slot, _)| *slot)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Elimination {
    pub field: QuasilinearField,
    pub generators: Vec<Generator>,
    pub certificates: Vec<Certificate>,
}

/// Applies `generators` in order by truncated push-forward.
pub fn replay(f: &QuasilinearField, generators: &[Generator], max_k: usize) -> Result<QuasilinearField> {
    generators
        .iter()
        .try_fold(f.truncate(max_k), |acc, g| acc.push_forward(&g.field, max_k))
}

/// Runs the phases in order on `f` truncated at `max_k`.
pub fn eliminate(f: &QuasilinearField, max_k: usize, phases: &[Phase], levels: Levels) -> Result<Elimination> {
    let mut current = f.truncate(max_k);
    let mut generators = Vec::new();
    let mut certificates = Vec::new();
    for phase in phases {
        if phase.components.is_empty() || phase.generators.is_empty() {
            continue;
        }
        for g in 1..=max_k {
            if let Some((cert, gens)) = solve_grade(&current, phase, g, levels)? {
                for h in &gens {
                    current = current.push_forward(&h.field, max_k)?;
                }
                let after: Vec<Q> = cert.slots.iter().map(|s| current.coeff(s.p, s.k)).collect();
                if after != cert.survivors || !cert.holds() {
                    return Err(Error::Internal(format!(
                        "grade {g} solve in phase {} not reproduced by push-forward",
                        phase.name
                    )));
                }
                generators.extend(gens);
                certificates.push(cert);
            }
        }
    }
    for cert in &certificates {
        for (slot, v) in cert.slots.iter().zip(&cert.survivors) {
            if &current.coeff(slot.p, slot.k) != v {
                return Err(Error::Internal(format!("slot {slot} changed after it was fixed")));
            }
        }
    }
    Ok(Elimination {
        field: current,
        generators,
        certificates,
    })
}

fn phase_slots(phase: &Phase, k: usize) -> Vec<Slot> {
    phase.components.iter().map(|&p| Slot::new(p, k)).collect()
}

fn solve_grade(
    current: &QuasilinearField,
    phase: &Phase,
    g: usize,
    levels: Levels,
) -> Result<Option<(Certificate, Vec<Generator>)>> {
    let slots = phase_slots(phase, g);
    let target: Vec<Q> = slots.iter().map(|s| current.coeff(s.p, s.k)).collect();
    if target.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let basis = current.basis().clone();
    let level_list: Vec<usize> = match levels {
        Levels::Linear => vec![0],
        Levels::Below => (0..g).collect(),
    };
    let lower: Vec<Slot> = (1..g).flat_map(|j| phase_slots(phase, j)).collect();

    // admissible directions, as (k, combination over phase.generators)
    let mut directions: Vec<(usize, Vec<Q>)> = Vec::new();
    let mut columns: Vec<Vec<Q>> = Vec::new();
    for s in level_list {
        if current.slice(s).iter().all(Zero::is_zero) {
            continue;
        }
        let k = g - s;
        if k == 0 {
            continue;
        }
        let effects: Vec<QuasilinearField> = phase
            .generators
            .iter()
            .map(|&p| {
                let h = QuasilinearField::single(basis.clone(), Slot::new(p, k), Q::one())?;
                Ok(h.bracket_truncated(current, g))
            })
            .collect::<Result<_>>()?;
        let admissible = if lower.is_empty() {
            identity_vectors(effects.len())
        } else {
            let cons = Matrix::from_columns(
                lower.len(),
                &effects
                    .iter()
                    .map(|e| lower.iter().map(|sl| e.coeff(sl.p, sl.k)).collect())
                    .collect::<Vec<_>>(),
            );
            if cons.is_zero() {
                identity_vectors(effects.len())
            } else {
                nullspace(&cons)
            }
        };
        for v in admissible {
            let col: Vec<Q> = slots
                .iter()
                .map(|sl| {
                    v.iter()
                        .zip(&effects)
                        .filter(|(c, _)| !c.is_zero())
                        .map(|(c, e)| c * e.coeff(sl.p, sl.k))
                        .fold(Q::zero(), |a, b| a + b)
                })
                .collect();
            if col.iter().all(Zero::is_zero) {
                continue;
            }
            directions.push((k, v));
            columns.push(col);
        }
    }
    if columns.is_empty() {
        return Ok(None);
    }
    let m = Matrix::from_columns(slots.len(), &columns);
    let proj = project_onto_columns(&m, &target);
    if proj.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let neg: Vec<Q> = proj.iter().map(|x| -x).collect();
    let coefficients =
        solve(&m, &neg).ok_or_else(|| Error::Internal(format!("projection at grade {g} not in column space")))?;
    let survivors: Vec<Q> = target.iter().zip(&proj).map(|(t, p)| t - p).collect();

    let mut by_k: BTreeMap<usize, QuasilinearField> = BTreeMap::new();
    for ((k, v), c) in directions.iter().zip(&coefficients) {
        if c.is_zero() {
            continue;
        }
        let h = by_k
            .entry(*k)
            .or_insert_with(|| QuasilinearField::zero(basis.clone()));
        for (&p, vp) in phase.generators.iter().zip(v) {
            h.add_to(Slot::new(p, *k), c * vp);
        }
    }
    let gens: Vec<Generator> = by_k
        .into_iter()
        .filter(|(_, h)| !h.is_zero())
        .map(|(k, field)| Generator { k, field })
        .collect();
    Ok(Some((
        Certificate {
            phase: phase.name,
            grade: g,
            slots,
            target,
            columns: m,
            coefficients,
            survivors,
        },
        gens,
    )))
}

fn identity_vectors(n: usize) -> Vec<Vec<Q>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}
