//! Helpers shared by the integration tests: fixtures, seeded random fields
//! and slot-set oracles written independently of the elimination engine.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use equinorm::equivariant::{QuasilinearField, Slot};
use equinorm::liealg::{builtin_rep, compute_centralizer, CentralizerBasis};
use equinorm::polyvf::{Monomial, PolyVectorField};
use equinorm::rational::{q, qf, Q};

pub fn basis(name: &str) -> Arc<CentralizerBasis> {
    Arc::new(compute_centralizer(&builtin_rep(name).unwrap()).unwrap())
}

pub fn field(b: &Arc<CentralizerBasis>, coeffs: &[(usize, usize, i64)]) -> QuasilinearField {
    QuasilinearField::from_coeffs(b.clone(), coeffs.iter().map(|&(p, k, c)| (p, k, q(c)))).unwrap()
}

/// Nonzero rational with numerator in `±[1, 50]` and denominator in `[1, 20]`.
pub fn rand_q(rng: &mut ChaCha8Rng) -> Q {
    let num: i64 = rng.gen_range(1..=50) * if rng.gen_bool(0.5) { 1 } else { -1 };
    qf(num, rng.gen_range(1..=20))
}

/// Random rational that is zero with probability one half.
pub fn rand_q_or_zero(rng: &mut ChaCha8Rng) -> Q {
    if rng.gen_bool(0.5) {
        Q::from_integer(0.into())
    } else {
        rand_q(rng)
    }
}

/// Random field with nonzero coefficients in every slot `(p, k)` with
/// `k >= start[p]` and `k <= max_k`; `None` leaves component `p` empty.
pub fn random_field(
    b: &Arc<CentralizerBasis>,
    start: &[Option<usize>],
    max_k: usize,
    rng: &mut ChaCha8Rng,
) -> QuasilinearField {
    let mut f = QuasilinearField::zero(b.clone());
    for (p, s) in start.iter().enumerate() {
        if let Some(s) = s {
            for k in *s..=max_k {
                f.set(Slot::new(p, k), rand_q(rng));
            }
        }
    }
    f
}

/// Random polynomial field on `R^n`, degrees `1..=max_deg`, up to `terms` terms.
pub fn random_poly(n: usize, max_deg: u32, terms: usize, rng: &mut ChaCha8Rng) -> PolyVectorField {
    let mut f = PolyVectorField::zero(n);
    for _ in 0..terms {
        let deg = rng.gen_range(1..=max_deg);
        let mut e = vec![0u32; n];
        for _ in 0..deg {
            e[rng.gen_range(0..n)] += 1;
        }
        f.add_term(rng.gen_range(0..n), Monomial::new(e), rand_q(rng));
    }
    f
}

pub fn slot_set(f: &QuasilinearField) -> BTreeSet<(usize, usize)> {
    f.nonzero_slots().into_iter().map(|s| (s.p, s.k)).collect()
}

/// `Psi_mu` and `Psi_2mu`, intersected with the truncation.
pub fn psi_pair(mu: usize, max_k: usize) -> BTreeSet<(usize, usize)> {
    [(0, mu), (0, 2 * mu)].into_iter().filter(|s| s.1 <= max_k).collect()
}

/// Expected survivors of a zero-linear complex field.
pub fn expected_complex(mu: usize, nu: Option<usize>, max_k: usize) -> BTreeSet<(usize, usize)> {
    let mut s = psi_pair(mu, max_k);
    if let Some(nu) = nu {
        if nu <= mu {
            s.extend((nu..=mu).map(|k| (1, k)));
        }
    }
    s
}

/// Expected survivors of a zero-linear quaternionic field when `mu` is
/// minimal, or when one `nu_s` is a strict minimum below `mu`.
pub fn expected_quaternionic(mu: usize, nu: &[Option<usize>], max_k: usize) -> BTreeSet<(usize, usize)> {
    let mut s = psi_pair(mu, max_k);
    let nu_min = nu.iter().flatten().copied().min();
    match nu_min {
        Some(m) if m < mu => {
            let count = nu.iter().filter(|v| **v == Some(m)).count();
            assert_eq!(count, 1, "oracle only covers a strict minimum");
            let sidx = nu.iter().position(|v| *v == Some(m)).unwrap() + 1;
            s.extend((m..=mu).map(|k| (sidx, k)));
        }
        _ => {
            for (i, v) in nu.iter().enumerate() {
                if *v == Some(mu) {
                    s.insert((i + 1, mu));
                }
            }
        }
    }
    s
}

/// Phi part of slice `k` is parallel to the rotation axis `beta`.
pub fn parallel(a: &[Q], b: &[Q]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

/// Shape check for a renormalized B3/C3 field: `Psi` survivors at `mu`, `2mu`,
/// Phi slices nonzero and parallel to the linear rotation part for
/// `k <= mu`, zero above.
pub fn rotation_case_shape(form: &QuasilinearField, mu: usize, max_k: usize) -> Result<(), String> {
    let psi: BTreeSet<usize> = form.coeffs().filter(|(s, _)| s.p == 0).map(|(s, _)| s.k).collect();
    let want: BTreeSet<usize> = psi_pair(mu, max_k).into_iter().map(|s| s.1).collect();
    if psi != want {
        return Err(format!("Psi survivors {psi:?}, expected {want:?}"));
    }
    let axis = &form.linear_part()[1..];
    for k in 0..=max_k {
        let s = form.slice(k);
        let phi = &s[1..];
        let zero = phi.iter().all(|c| c == &Q::from_integer(0.into()));
        if k <= mu {
            if zero {
                return Err(format!("J slice {k} vanished"));
            }
            if !parallel(phi, axis) {
                return Err(format!("J slice {k} not aligned with the rotation axis"));
            }
        } else if !zero {
            return Err(format!("J slice {k} survived above mu = {mu}"));
        }
    }
    Ok(())
}

/// Replays quasilinear generators through the polynomial Lie series, an
/// independent path from the structure-constant push-forward.
pub fn replay_polynomial(input: &QuasilinearField, gens: &[QuasilinearField], max_grade: usize) -> PolyVectorField {
    gens.iter().fold(input.expand().truncate(max_grade), |acc, h| {
        PolyVectorField::lie_series(&h.expand(), &acc, max_grade).unwrap()
    })
}
