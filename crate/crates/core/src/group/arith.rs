use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::GroupError;

/// `base^exponent mod modulus`. `modulus` must be at least 2.
///
/// Backed by `BigUint::modpow` (windowed square-and-multiply, Montgomery
/// reduction for odd moduli).
pub fn mod_exp(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> BigUint {
    assert!(*modulus > BigUint::one(), "mod_exp: modulus must be >= 2");
    base.modpow(exponent, modulus)
}

/// Inverse of `value` modulo `modulus` by the extended Euclidean algorithm.
pub fn mod_inverse(value: &BigUint, modulus: &BigUint) -> Result<BigUint, GroupError> {
    let not_invertible = || GroupError::NotInvertible {
        value: value.clone(),
        modulus: modulus.clone(),
    };
    if modulus.is_zero() {
        return Err(not_invertible());
    }
    if modulus.is_one() {
        return Ok(BigUint::zero());
    }
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let (mut old_r, mut r) = (BigInt::from_biguint(Sign::Plus, value % modulus), m.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let (quotient, remainder) = old_r.div_rem(&r);
        old_r = core::mem::replace(&mut r, remainder);
        let next_s = &old_s - &quotient * &s;
        old_s = core::mem::replace(&mut s, next_s);
    }
    if !old_r.is_one() {
        return Err(not_invertible());
    }
    Ok(old_s
        .mod_floor(&m)
        .to_biguint()
        .expect("mod_floor is non-negative"))
}
