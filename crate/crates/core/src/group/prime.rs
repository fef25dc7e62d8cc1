//! Probabilistic primality (Miller-Rabin plus a strong Lucas test) and safe
//! prime generation.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;

use super::GroupError;
use crate::random::{random_bits, random_inclusive};

/// Miller-Rabin rounds; with random bases the error is below `4^-64 = 2^-128`
/// before the Lucas test is even considered.
pub const MILLER_RABIN_ROUNDS: usize = 64;

const SIEVE_LIMIT: usize = 2048;

const fn small_prime_table() -> ([u16; 309], usize) {
    let mut composite = [false; SIEVE_LIMIT];
    let mut primes = [0u16; 309];
    let mut count = 0;
    let mut i = 2;
    while i < SIEVE_LIMIT {
        if !composite[i] {
            primes[count] = i as u16;
            count += 1;
            let mut j = i * i;
            while j < SIEVE_LIMIT {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (primes, count)
}

const SMALL_PRIMES_TABLE: ([u16; 309], usize) = small_prime_table();

/// All primes below 2048.
pub fn small_primes() -> &'static [u16] {
    &SMALL_PRIMES_TABLE.0[..SMALL_PRIMES_TABLE.1]
}

enum TrialDivision {
    Prime,
    Composite,
    Unknown,
}

fn trial_division(n: &BigUint) -> TrialDivision {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return TrialDivision::Composite;
        }
    }
    for &p in small_primes() {
        let p = u32::from(p);
        if *n == BigUint::from(p) {
            return TrialDivision::Prime;
        }
        if (n % p).is_zero() {
            return TrialDivision::Composite;
        }
    }
    if n.bits() <= 22 {
        // Below 2048^2 trial division is complete.
        return TrialDivision::Prime;
    }
    TrialDivision::Unknown
}

/// One strong-probable-prime test of odd `n > 3` to `base`.
pub fn miller_rabin_round(n: &BigUint, base: &BigUint) -> bool {
    let n_minus_1 = n - 1u32;
    let shift = n_minus_1.trailing_zeros().expect("n > 1");
    let d = &n_minus_1 >> shift;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..shift {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: &BigInt, n: &BigUint) -> i8 {
    assert!(n.is_odd(), "jacobi: n must be odd");
    let modulus = BigInt::from_biguint(Sign::Plus, n.clone());
    let mut a = a.mod_floor(&modulus).to_biguint().expect("non-negative");
    let mut n = n.clone();
    let mut result = 1i8;
    while !a.is_zero() {
        let twos = a.trailing_zeros().unwrap_or(0);
        a >>= twos;
        let n_mod_8 = (&n % 8u32).to_u32().expect("small");
        if twos % 2 == 1 && (n_mod_8 == 3 || n_mod_8 == 5) {
            result = -result;
        }
        core::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            result = -result;
        }
        a %= &n;
    }
    if n.is_one() {
        result
    } else {
        0
    }
}

fn half_mod(x: BigInt, n: &BigInt) -> BigInt {
    let x = x.mod_floor(n);
    if x.is_odd() {
        (x + n) >> 1u32
    } else {
        x >> 1u32
    }
}

/// Strong Lucas probable-prime test with Selfridge's parameters
/// (`D` the first of 5, -7, 9, -11, ... with `(D/n) = -1`, `P = 1`,
/// `Q = (1 - D)/4`). `n` must be odd and greater than 2.
pub fn strong_lucas(n: &BigUint) -> bool {
    assert!(
        n.is_odd() && *n > BigUint::from(2u8),
        "strong_lucas: n must be odd > 2"
    );
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let nn = BigInt::from_biguint(Sign::Plus, n.clone());
    let mut d = BigInt::from(5);
    loop {
        match jacobi(&d, n) {
            -1 => break,
            0 if d.magnitude() != n => return false,
            _ => {}
        }
        let two = BigInt::from(2);
        d = if d.sign() == Sign::Plus {
            -(d + two)
        } else {
            -(d - two)
        };
    }
    let p = BigInt::one();
    let q = (BigInt::one() - &d) / BigInt::from(4);

    let n_plus_1 = n + 1u32;
    let shift = n_plus_1.trailing_zeros().expect("n + 1 > 0");
    let odd = &n_plus_1 >> shift;

    // Left-to-right ladder over the bits of `odd`, starting from index 1.
    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut q_k = q.mod_floor(&nn);
    for bit in (0..odd.bits() - 1).rev() {
        u = (&u * &v).mod_floor(&nn);
        v = (&v * &v - (&q_k << 1u32)).mod_floor(&nn);
        q_k = (&q_k * &q_k).mod_floor(&nn);
        if odd.bit(bit) {
            let next_u = half_mod(&p * &u + &v, &nn);
            let next_v = half_mod(&d * &u + &p * &v, &nn);
            u = next_u;
            v = next_v;
            q_k = (&q_k * &q).mod_floor(&nn);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..shift {
        v = (&v * &v - (&q_k << 1u32)).mod_floor(&nn);
        if v.is_zero() {
            return true;
        }
        q_k = (&q_k * &q_k).mod_floor(&nn);
    }
    false
}

/// Trial division, Miller-Rabin to base 2 and [`MILLER_RABIN_ROUNDS`] - 1
/// random bases, then a strong Lucas test.
pub fn is_probable_prime<R: RngCore + ?Sized>(n: &BigUint, rng: &mut R) -> bool {
    match trial_division(n) {
        TrialDivision::Prime => return true,
        TrialDivision::Composite => return false,
        TrialDivision::Unknown => {}
    }
    if !miller_rabin_round(n, &BigUint::from(2u8)) {
        return false;
    }
    let low = BigUint::from(3u8);
    let high = n - 2u32;
    for _ in 1..MILLER_RABIN_ROUNDS {
        let base = random_inclusive(rng, &low, &high);
        if !miller_rabin_round(n, &base) {
            return false;
        }
    }
    strong_lucas(n)
}

/// `p` and `(p - 1)/2` both prime.
pub fn is_safe_prime<R: RngCore + ?Sized>(p: &BigUint, rng: &mut R) -> bool {
    if p.is_even() || *p < BigUint::from(5u8) {
        return false;
    }
    let q: BigUint = p >> 1u32;
    is_probable_prime(&q, rng) && is_probable_prime(p, rng)
}

fn survives_sieve(q: &BigUint, p: &BigUint) -> bool {
    for &s in small_primes().iter().skip(1) {
        let s = u32::from(s);
        let q_rem = (q % s).to_u32().expect("small");
        if q_rem == 0 && *q != BigUint::from(s) {
            return false;
        }
        // p = 2q + 1 is divisible by s iff q = (s - 1)/2 mod s.
        if q_rem == (s - 1) / 2 && *p != BigUint::from(s) {
            return false;
        }
    }
    true
}

/// A safe prime of exactly `bits` bits.
pub fn gen_safe_prime<R: RngCore + ?Sized>(bits: u64, rng: &mut R) -> Result<BigUint, GroupError> {
    if bits < 4 {
        return Err(GroupError::TooFewBits(bits));
    }
    let q_bits = bits - 1;
    let top = BigUint::one() << (q_bits - 1);
    loop {
        let q = (random_bits(rng, q_bits - 1) | &top) | BigUint::one();
        let p: BigUint = (&q << 1u32) | BigUint::one();
        if !survives_sieve(&q, &p) {
            continue;
        }
        if p.bits() > 22 && !miller_rabin_round(&p, &BigUint::from(2u8)) {
            continue;
        }
        if is_probable_prime(&q, rng) && is_probable_prime(&p, rng) {
            return Ok(p);
        }
    }
}
