//! One-time-pad sealing of scrambled codes.
//!
//! `c_i = u_i XOR k_i` over the `B` bits of the code. The pad for each record
//! is expanded from the shared key and a per-record nonce, so one agreed key
//! can seal many records without pad reuse. There is no authentication: opening
//! with the wrong key silently yields some other tag.

use alloc::string::String;
use core::fmt;

use num_bigint::BigUint;
use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bits::{BitString, BitsError};
use crate::codec::{decode, encode_with_budget, CodecError, HiddenTag};
use crate::group::SharedKey;

const PAD_DOMAIN: &[u8] = b"tagseal/otp-pad/v1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OtpError {
    #[error("length mismatch: data has {data} bits, key has {key}")]
    LengthMismatch { data: usize, key: usize },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Bits(#[from] BitsError),
}

/// A pad of exactly `B` bits.
#[derive(Clone, PartialEq, Eq)]
pub struct PadKey(BitString);

impl PadKey {
    pub fn new(bits: BitString) -> Self {
        Self(bits)
    }

    pub fn zero(len: usize) -> Self {
        Self(BitString::zeros(len))
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Debug for PadKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadKey({} bits)", self.0.len())
    }
}

/// 128-bit per-record nonce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nonce(pub [u8; 16]);

impl Nonce {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = [0u8; 16];
        rng.fill_bytes(&mut bytes);
        Self(bytes)
    }

    pub fn from_u128(value: u128) -> Self {
        Self(value.to_be_bytes())
    }

    pub fn as_bytes(&self) -> &[u8; 16] {
        &self.0
    }
}

pub fn xor_pad(data: &BitString, key: &PadKey) -> Result<BitString, OtpError> {
    data.xor(key.bits()).ok_or(OtpError::LengthMismatch {
        data: data.len(),
        key: key.len(),
    })
}

/// Expand `(K, nonce)` into a `bits`-long pad with SHA-256 in counter mode.
///
/// Block `j` is `SHA-256(domain || len(K) || K || nonce || j)` with `K` in
/// minimal big-endian form and lengths/counters as big-endian `u64`. Pad bit
/// `i` is bit `i % 8` (LSB first) of stream byte `i / 8`, so shorter pads are
/// prefixes of longer ones.
pub fn derive_pad(key: &SharedKey, nonce: &Nonce, bits: usize) -> PadKey {
    let key_bytes = key.to_bytes_be();
    let byte_len = bits.div_ceil(8);
    let mut stream = alloc::vec::Vec::with_capacity(byte_len + 32);
    let mut counter = 0u64;
    while stream.len() < byte_len {
        let mut hasher = Sha256::new();
        hasher.update(PAD_DOMAIN);
        hasher.update((key_bytes.len() as u64).to_be_bytes());
        hasher.update(&key_bytes);
        hasher.update(nonce.as_bytes());
        hasher.update(counter.to_be_bytes());
        stream.extend_from_slice(&hasher.finalize());
        counter += 1;
    }
    PadKey(BitString::from_le_bytes(&stream, bits))
}

/// A sealed tag as published next to its manifest content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagRecord {
    pub manifest_id: String,
    pub nonce: Nonce,
    pub cipher: BitString,
}

impl TagRecord {
    pub fn bit_budget(&self) -> usize {
        self.cipher.len()
    }
}

/// Scramble `tag` into a `budget`-bit code and encrypt it under a pad derived
/// from `key` and a fresh nonce.
pub fn seal_tag<R: RngCore + ?Sized>(
    tag: &HiddenTag,
    budget: u32,
    key: &SharedKey,
    manifest_id: &str,
    rng: &mut R,
) -> Result<TagRecord, OtpError> {
    let code = encode_with_budget(tag, budget, rng)?;
    let nonce = Nonce::random(rng);
    seal_code(code.value(), budget as usize, key, nonce, manifest_id)
}

/// Encrypt an already scrambled code under `(key, nonce)`.
pub fn seal_code(
    code: &BigUint,
    budget: usize,
    key: &SharedKey,
    nonce: Nonce,
    manifest_id: &str,
) -> Result<TagRecord, OtpError> {
    let plain = BitString::from_biguint(code, budget)?;
    let cipher = xor_pad(&plain, &derive_pad(key, &nonce, budget))?;
    Ok(TagRecord {
        manifest_id: manifest_id.into(),
        nonce,
        cipher,
    })
}

/// Decrypt and decode. A wrong key produces a wrong tag, not an error.
pub fn open_tag(record: &TagRecord, key: &SharedKey) -> BigUint {
    let pad = derive_pad(key, &record.nonce, record.bit_budget());
    let plain = xor_pad(&record.cipher, &pad).expect("pad length equals cipher length");
    decode(&plain.to_biguint())
}
