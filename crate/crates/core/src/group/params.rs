use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;

use super::arith::{mod_exp, mod_inverse};
use super::prime::{gen_safe_prime, is_probable_prime};
use super::protocol::Party;
use super::GroupError;
use crate::random::random_inclusive;

/// Safe prime `p = 2q + 1` and a generator `alpha` of the order-`q` subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    p: BigUint,
    q: BigUint,
    alpha: BigUint,
}

impl GroupParams {
    /// Checks the structure (`p = 2q + 1`, `alpha` of order `q`). Primality is
    /// checked separately by [`GroupParams::verify_primes`] since it needs
    /// randomness.
    pub fn new(p: BigUint, q: BigUint, alpha: BigUint) -> Result<Self, GroupError> {
        if q < BigUint::from(2u8) {
            return Err(GroupError::InvalidParams(format!("q = {q} is too small")));
        }
        if p != (&q << 1u32) + 1u32 {
            return Err(GroupError::InvalidParams("p != 2q + 1".into()));
        }
        if alpha <= BigUint::one() || alpha >= &p - 1u32 {
            return Err(GroupError::InvalidParams(
                "alpha must lie in (1, p-1)".into(),
            ));
        }
        if !mod_exp(&alpha, &q, &p).is_one() {
            return Err(GroupError::InvalidParams("alpha^q != 1 mod p".into()));
        }
        Ok(Self { p, q, alpha })
    }

    pub fn verify_primes<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<(), GroupError> {
        if !is_probable_prime(&self.q, rng) {
            return Err(GroupError::InvalidParams("q is not prime".into()));
        }
        if !is_probable_prime(&self.p, rng) {
            return Err(GroupError::InvalidParams("p is not prime".into()));
        }
        Ok(())
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn alpha(&self) -> &BigUint {
        &self.alpha
    }

    /// `alpha ^ exponent mod p`.
    pub fn power(&self, exponent: &BigUint) -> BigUint {
        mod_exp(&self.alpha, exponent, &self.p)
    }

    /// Raise a group element to `exponent`.
    pub fn raise(&self, element: &BigUint, exponent: &BigUint) -> BigUint {
        mod_exp(element, exponent, &self.p)
    }

    /// Element of the order-`q` subgroup: `1 <= e < p` and `e^q = 1 mod p`.
    pub fn is_member(&self, element: &BigUint) -> bool {
        !element.is_zero() && element < &self.p && mod_exp(element, &self.q, &self.p).is_one()
    }

    /// Product of exponents reduced mod `q`.
    pub fn exponent_product<'a, I>(&self, exponents: I) -> BigUint
    where
        I: IntoIterator<Item = &'a BigUint>,
    {
        exponents
            .into_iter()
            .fold(BigUint::one(), |acc, n| acc * n % &self.q)
    }
}

/// Generate a `bits`-bit safe prime group; `alpha = g^2 mod p` for random `g`,
/// redrawn until it is neither 1 nor `p - 1`.
pub fn gen_group_params<R: RngCore + ?Sized>(
    bits: u64,
    rng: &mut R,
) -> Result<GroupParams, GroupError> {
    let p = gen_safe_prime(bits, rng)?;
    let q: BigUint = &p >> 1u32;
    let low = BigUint::from(2u8);
    let high = &p - 2u32;
    let minus_one = &p - 1u32;
    loop {
        let g = random_inclusive(rng, &low, &high);
        let alpha = &g * &g % &p;
        if !alpha.is_one() && alpha != minus_one {
            return GroupParams::new(p, q, alpha);
        }
    }
}

/// Private key `N` of one party, `1 <= N < q`.
#[derive(Clone, PartialEq, Eq)]
pub struct PrivateExponent {
    value: BigUint,
    role: Party,
}

impl core::fmt::Debug for PrivateExponent {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PrivateExponent")
            .field("role", &self.role)
            .finish_non_exhaustive()
    }
}

impl PrivateExponent {
    pub fn new(value: BigUint, role: Party, params: &GroupParams) -> Result<Self, GroupError> {
        if value.is_zero() || &value >= params.q() {
            return Err(GroupError::ExponentOutOfRange);
        }
        Ok(Self { value, role })
    }

    pub fn random<R: RngCore + ?Sized>(role: Party, params: &GroupParams, rng: &mut R) -> Self {
        let high = params.q() - 1u32;
        Self {
            value: random_inclusive(rng, &BigUint::one(), &high),
            role,
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn role(&self) -> Party {
        self.role
    }

    /// `N^-1 mod q`; always exists because `q` is prime and `0 < N < q`.
    pub fn inverse(&self, params: &GroupParams) -> Result<BigUint, GroupError> {
        mod_inverse(&self.value, params.q())
    }
}

/// The agreed group element `K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SharedKey(BigUint);

impl SharedKey {
    pub fn new(element: BigUint) -> Self {
        Self(element)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// Minimal big-endian encoding (a single zero byte for `K = 0`).
    pub fn to_bytes_be(&self) -> Vec<u8> {
        self.0.to_bytes_be()
    }
}
