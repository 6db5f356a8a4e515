//! Renormalized forms beyond Poincaré–Dulac.
//!
//! Two entry points share the elimination engine of [`crate::homological`]:
//! fields with vanishing linear part, and `B3`/`C3` normal forms. In both the
//! `Psi` slots are reduced first by `Psi` generators and then the `Phi` slots
//! by `Phi` generators. `Phi` generators never produce `Psi` terms, so the
//! first phase is final once it is done.
//!
//! With `mu` the leading order of `alpha_0` and `nu_p` that of `alpha_p`, the
//! surviving slots (up to the truncation) are
//!
//! | case | survivors |
//! |---|---|
//! | `A0` | `Psi_mu`, `Psi_2mu` |
//! | `B0_MU_LT_NU` | `Psi_mu`, `Psi_2mu` |
//! | `B0_NU_LT_MU`, `B0_MU_EQ_NU` | `Psi_mu`, `Psi_2mu`, `Phi_k` for `nu <= k <= mu` |
//! | `C0_MU_MIN` | `Psi_mu`, `Psi_2mu`, `Phi^(p)_mu` for `nu_p = mu` |
//! | `C0_NU_MIN` | reported slot by slot; with a strict minimum `nu_s`: `Psi_mu`, `Psi_2mu`, `Phi^(s)_k` for `nu_s <= k <= mu` |
//! | `B3_LEMMA2`, `C3_LEMMA2` | `Psi_mu`, `Psi_2mu`, `J`-aligned `Phi_k` for `0 <= k <= mu` |

use serde::{Deserialize, Serialize};

use num_traits::Zero;

use crate::equivariant::{QuasilinearField, Slot};
use crate::error::{Error, Result};
use crate::homological::{eliminate, Certificate, Generator, Levels, Phase};
use crate::liealg::SchurType;
use crate::normalform::{CaseTag, NormalFormResult};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RenormCase {
    #[serde(rename = "A0")]
    A0,
    #[serde(rename = "B0_MU_LT_NU")]
    B0MuLtNu,
    #[serde(rename = "B0_NU_LT_MU")]
    B0NuLtMu,
    #[serde(rename = "B0_MU_EQ_NU")]
    B0MuEqNu,
    #[serde(rename = "C0_MU_MIN")]
    C0MuMin,
    #[serde(rename = "C0_NU_MIN")]
    C0NuMin,
    #[serde(rename = "B3_LEMMA2")]
    B3Lemma2,
    #[serde(rename = "C3_LEMMA2")]
    C3Lemma2,
}

impl RenormCase {
    pub fn label(self) -> &'static str {
        match self {
            RenormCase::A0 => "A0",
            RenormCase::B0MuLtNu => "B0_MU_LT_NU",
            RenormCase::B0NuLtMu => "B0_NU_LT_MU",
            RenormCase::B0MuEqNu => "B0_MU_EQ_NU",
            RenormCase::C0MuMin => "C0_MU_MIN",
            RenormCase::C0NuMin => "C0_NU_MIN",
            RenormCase::B3Lemma2 => "B3_LEMMA2",
            RenormCase::C3Lemma2 => "C3_LEMMA2",
        }
    }
}

/// Minimal orders `k >= 1` with a nonzero coefficient; `None` stands for
/// an identically vanishing series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadingOrders {
    pub mu: Option<usize>,
    /// `nu_p` for `p = 1..=s`.
    pub nu: Vec<Option<usize>>,
}

impl LeadingOrders {
    pub fn nu_min(&self) -> Option<usize> {
        self.nu.iter().flatten().copied().min()
    }
}

pub fn leading_orders(q: &QuasilinearField) -> Result<LeadingOrders> {
    if q.is_zero() {
        return Err(Error::ZeroField);
    }
    let first = |p: usize| {
        q.coeffs()
            .filter(|(s, _)| s.p == p && s.k >= 1)
            .map(|(s, _)| s.k)
            .min()
    };
    Ok(LeadingOrders {
        mu: first(0),
        nu: (1..q.num_components()).map(first).collect(),
    })
}

#[derive(Clone, Debug)]
pub struct RenormalizedForm {
    pub case: RenormCase,
    pub mu: usize,
    pub nu: Vec<Option<usize>>,
    /// Field the generators act on (truncated).
    pub input: QuasilinearField,
    pub form: QuasilinearField,
    pub generators: Vec<Generator>,
    pub certificates: Vec<Certificate>,
    pub truncation_order: usize,
    /// Leading coefficient `c_1`, the `Psi_mu` coefficient.
    pub c1: Q,
    pub notes: Vec<String>,
}

impl RenormalizedForm {
    pub fn max_k(&self) -> usize {
        self.truncation_order / 2
    }

    /// Surviving nonlinear slots (`k >= 1`) and the linear slots.
    pub fn surviving_slots(&self) -> Vec<(Slot, Q)> {
        self.form.coeffs().map(|(s, c)| (s, c.clone())).collect()
    }
}

const HAMILTONIAN_NOTE: &str = "alpha_0 vanishes up to the truncation order; the renormalization \
    leaves the normal form unchanged and Hamiltonian-type schemes are out of scope";

fn phases(s: usize) -> Vec<Phase> {
    let mut out = vec![Phase::psi()];
    if s > 1 {
        out.push(Phase::phi(s));
    }
    out
}

/// Renormalization of a field whose linear part vanishes, up to grade `n`.
pub fn renormalize_zero_linear(q: &QuasilinearField, n: usize) -> Result<RenormalizedForm> {
    if q.linear_part().iter().any(|b| !b.is_zero()) {
        let (case, _) = crate::normalform::classify_case(q);
        return Err(Error::WrongCase {
            case: case.label().into(),
            reason: "linear part is nonzero; normalize first".into(),
        });
    }
    let max_k = n / 2;
    let input = q.truncate(max_k);
    let orders = leading_orders(q)?;
    let orders = LeadingOrders {
        mu: orders.mu.filter(|&m| m <= max_k),
        nu: orders.nu.iter().map(|v| v.filter(|&m| m <= max_k)).collect(),
    };
    let mu = orders.mu.ok_or_else(|| Error::Ineffective(HAMILTONIAN_NOTE.into()))?;
    let mut notes = Vec::new();
    let case = match q.basis().schur_type() {
        SchurType::Real => RenormCase::A0,
        SchurType::Complex => match orders.nu[0] {
            Some(nu) if nu < mu => RenormCase::B0NuLtMu,
            Some(nu) if nu == mu => RenormCase::B0MuEqNu,
            _ => RenormCase::B0MuLtNu,
        },
        SchurType::Quaternionic => match orders.nu_min() {
            Some(nu) if nu < mu => {
                let below = orders.nu.iter().filter(|v| matches!(v, Some(x) if *x < mu)).count();
                let at_min = orders.nu.iter().filter(|v| **v == Some(nu)).count();
                if below < 3 || at_min > 1 {
                    notes.push(
                        "mixed quaternionic orders: survivors are reported slot by slot from the \
                         elimination, not from a closed-form template"
                            .into(),
                    );
                }
                RenormCase::C0NuMin
            }
            _ => RenormCase::C0MuMin,
        },
    };
    let out = eliminate(&input, max_k, &phases(q.num_components()), Levels::Below)?;
    let c1 = out.field.coeff(0, mu);
    Ok(RenormalizedForm {
        case,
        mu,
        nu: orders.nu,
        input,
        form: out.field,
        generators: out.generators,
        certificates: out.certificates,
        truncation_order: n,
        c1,
        notes,
    })
}

/// Further reduction of a `B3` or `C3` normal form, up to grade `n`.
pub fn renormalize_lemma2(nfr: &NormalFormResult, n: usize) -> Result<RenormalizedForm> {
    let case = match nfr.case {
        CaseTag::B3 => RenormCase::B3Lemma2,
        CaseTag::C3 => RenormCase::C3Lemma2,
        other => {
            return Err(Error::WrongCase {
                case: other.label().into(),
                reason: "this renormalization applies to B3 and C3 normal forms".into(),
            })
        }
    };
    let max_k = n / 2;
    let input = nfr.nf.truncate(max_k);
    let orders = leading_orders(&input)?;
    let mu = orders.mu.ok_or_else(|| Error::Ineffective(HAMILTONIAN_NOTE.into()))?;
    let out = eliminate(&input, max_k, &phases(input.num_components()), Levels::Below)?;
    let c1 = out.field.coeff(0, mu);
    Ok(RenormalizedForm {
        case,
        mu,
        nu: orders.nu,
        input,
        form: out.field,
        generators: out.generators,
        certificates: out.certificates,
        truncation_order: n,
        c1,
        notes: Vec::new(),
    })
}
