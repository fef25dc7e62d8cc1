//! The element sets used in the indistinguishability argument, materialized
//! for small `m` so transcripts can be checked against them.
//!
//! For exponents `X = {N_1, ..., N_m}`:
//! - `V(m, X)`: `alpha` raised to the product over every proper subset of
//!   `{1..m}` (the empty product gives `alpha` itself);
//! - `K(X)`: `{alpha^(N_1 ... N_m)}`;
//! - `A_m = V(m, X) + {y}` for a random element `y`;
//! - `D_m = V(m, X) + K(X)`.

use alloc::collections::BTreeSet;

use num_bigint::BigUint;
use rand::RngCore;

use super::params::GroupParams;
use crate::random::random_inclusive;

/// Largest `m` accepted; `V(m, X)` has `2^m - 1` entries.
pub const MAX_SUBSET_EXPONENTS: usize = 20;

pub fn subset_view(params: &GroupParams, exponents: &[BigUint]) -> BTreeSet<BigUint> {
    let m = exponents.len();
    assert!(
        m <= MAX_SUBSET_EXPONENTS,
        "subset_view: {m} exponents is too many"
    );
    let full = (1u32 << m) - 1;
    (0..full)
        .map(|mask| {
            let chosen = exponents
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, n)| n);
            params.power(&params.exponent_product(chosen))
        })
        .collect()
}

pub fn key_set(params: &GroupParams, exponents: &[BigUint]) -> BTreeSet<BigUint> {
    BTreeSet::from([params.power(&params.exponent_product(exponents))])
}

/// `V(m, X)` plus a uniformly random subgroup element.
pub fn random_augmented<R: RngCore + ?Sized>(
    params: &GroupParams,
    exponents: &[BigUint],
    rng: &mut R,
) -> BTreeSet<BigUint> {
    let mut set = subset_view(params, exponents);
    let y = random_inclusive(rng, &BigUint::from(1u8), &(params.q() - 1u32));
    set.insert(params.power(&y));
    set
}

/// `V(m, X)` plus the key.
pub fn key_augmented(params: &GroupParams, exponents: &[BigUint]) -> BTreeSet<BigUint> {
    let mut set = subset_view(params, exponents);
    set.extend(key_set(params, exponents));
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::gen_group_params;
    use crate::group::params::PrivateExponent;
    use crate::group::protocol::{adversary_view, run_protocol, MemoryBus, ProtocolSetup};
    use alloc::vec::Vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transcript_lies_in_subset_view_of_all_exponents() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let params = gen_group_params(64, &mut rng).unwrap();
        for n in 1..=8 {
            let setup = ProtocolSetup::random(n, &params, &mut rng);
            let outcome = run_protocol(&params, &setup, &mut MemoryBus::new()).unwrap();
            let exponents: Vec<BigUint> = setup
                .members()
                .iter()
                .chain(core::iter::once(setup.distributor()))
                .map(PrivateExponent::value)
                .cloned()
                .collect();
            let view = adversary_view(&outcome.transcript);
            let v = subset_view(&params, &exponents);
            assert!(view.elements().is_subset(&v), "n={n}");
            let k = key_set(&params, &exponents);
            assert!(k.contains(outcome.agreed_key().unwrap().value()));
            assert!(v.is_disjoint(&k));
            assert_eq!(key_augmented(&params, &exponents).len(), v.len() + 1);
            assert!(random_augmented(&params, &exponents, &mut rng).len() >= v.len());
        }
    }

    #[test]
    fn subset_view_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params = gen_group_params(64, &mut rng).unwrap();
        let exponents: Vec<BigUint> = (0..6)
            .map(|_| {
                PrivateExponent::random(crate::group::Party::Distributor, &params, &mut rng)
                    .value()
                    .clone()
            })
            .collect();
        // 2^6 - 1 proper subsets, distinct with overwhelming probability in a 63-bit group.
        assert_eq!(subset_view(&params, &exponents).len(), 63);
    }
}
