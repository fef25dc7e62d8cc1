//! Quadratic randomization of integer tags.
//!
//! Consecutive triangular numbers `p_k = k(k+1)/2` bound slots of width `k`.
//! A tag `n` is encoded as `p_k + n` for a random slot index `k >= n`; the
//! decoder recovers `n` as the offset of the code from the largest triangular
//! number not exceeding it, so the random `k` never needs to be shared.

use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::RngCore;
use thiserror::Error;

use crate::random::random_inclusive;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("tag outside alphabet: {tag} >= {alphabet}")]
    TagOutsideAlphabet { tag: BigUint, alphabet: BigUint },
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
    #[error("tag {value} does not fit in {bit_width} bits")]
    TagTooWide { value: BigUint, bit_width: u32 },
    #[error("bit width must be positive")]
    ZeroWidth,
    #[error("bit budget {budget} is smaller than twice the tag width {bit_width}")]
    BudgetTooSmall { budget: u32, bit_width: u32 },
    #[error("slot index {slot} outside [{low}, {high}]")]
    SlotOutOfRange {
        slot: BigUint,
        low: BigUint,
        high: BigUint,
    },
    #[error("code {value} does not fit in {bit_budget} bits")]
    CodeTooWide { value: BigUint, bit_budget: u32 },
}

/// The secret integer `h` together with its declared width `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HiddenTag {
    value: BigUint,
    bit_width: u32,
}

impl HiddenTag {
    pub fn new(value: BigUint, bit_width: u32) -> Result<Self, CodecError> {
        if bit_width == 0 {
            return Err(CodecError::ZeroWidth);
        }
        if value.bits() > u64::from(bit_width) {
            return Err(CodecError::TagTooWide { value, bit_width });
        }
        Ok(Self { value, bit_width })
    }

    pub fn from_u64(value: u64, bit_width: u32) -> Result<Self, CodecError> {
        Self::new(BigUint::from(value), bit_width)
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }
}

/// A randomized code `u` with its bit budget `B`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScrambledCode {
    value: BigUint,
    bit_budget: u32,
}

impl ScrambledCode {
    pub fn new(value: BigUint, bit_budget: u32) -> Result<Self, CodecError> {
        if bit_budget == 0 {
            return Err(CodecError::ZeroWidth);
        }
        if value.bits() > u64::from(bit_budget) {
            return Err(CodecError::CodeTooWide { value, bit_budget });
        }
        Ok(Self { value, bit_budget })
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn bit_budget(&self) -> u32 {
        self.bit_budget
    }

    pub fn into_value(self) -> BigUint {
        self.value
    }

    /// Recover the hidden tag value.
    pub fn decode(&self) -> BigUint {
        decode(&self.value)
    }
}

impl fmt::Display for ScrambledCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} bits)", self.value, self.bit_budget)
    }
}

/// Alphabet-mode parameters: tags `0..M`, slot indices up to `2M - 1`, and the
/// smallest bit budget that holds every code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecParams {
    alphabet: BigUint,
    k_max: BigUint,
    bit_budget: u32,
}

impl CodecParams {
    pub fn for_alphabet(alphabet: &BigUint) -> Result<Self, CodecError> {
        if alphabet.is_zero() {
            return Err(CodecError::EmptyAlphabet);
        }
        let k_max = (alphabet << 1u32) - BigUint::one();
        // The largest code is p_kmax + kmax = p_(kmax+1) - 1.
        let largest = &triangular(&k_max) + &k_max;
        let bit_budget = u32::try_from(largest.bits().max(1)).expect("bit budget overflows u32");
        Ok(Self {
            alphabet: alphabet.clone(),
            k_max,
            bit_budget,
        })
    }

    pub fn alphabet(&self) -> &BigUint {
        &self.alphabet
    }

    pub fn k_max(&self) -> &BigUint {
        &self.k_max
    }

    pub fn bit_budget(&self) -> u32 {
        self.bit_budget
    }
}

/// `k(k+1)/2`.
pub fn triangular(k: &BigUint) -> BigUint {
    (k * (k + 1u32)) >> 1u32
}

/// The unique `k` with `triangular(k) <= u < triangular(k + 1)`.
///
/// Starts from `floor((isqrt(8u + 1) - 1) / 2)` and corrects by whole steps, so
/// the result is exact at any width.
pub fn inverse_triangular(u: &BigUint) -> BigUint {
    let root = ((u << 3u32) + 1u32).sqrt();
    let mut k = (root - 1u32) >> 1u32;
    while triangular(&k) > *u {
        k -= 1u32;
    }
    loop {
        let next = &k + 1u32;
        if triangular(&next) <= *u {
            k = next;
        } else {
            break;
        }
    }
    k
}

/// Largest slot index `k` with `p_k + k < 2^budget`.
///
/// `p_k + k = p_(k+1) - 1`, so this is one less than the inverse triangular
/// number of `2^budget`.
pub fn k_max_for_budget(budget: u32) -> BigUint {
    let bound = BigUint::one() << budget;
    inverse_triangular(&bound) - 1u32
}

/// Encode `n` as `p_k + n` with `k` drawn uniformly from `[n, 2M - 1]`.
pub fn encode<R: RngCore + ?Sized>(
    n: &BigUint,
    alphabet: &BigUint,
    rng: &mut R,
) -> Result<ScrambledCode, CodecError> {
    let params = check_alphabet(n, alphabet)?;
    let slot = random_inclusive(rng, n, &params.k_max);
    encode_in_slot(n, &params, &slot)
}

/// [`encode`] with the slot index supplied by the caller.
pub fn encode_at_slot(
    n: &BigUint,
    alphabet: &BigUint,
    slot: &BigUint,
) -> Result<ScrambledCode, CodecError> {
    let params = check_alphabet(n, alphabet)?;
    if slot < n || slot > &params.k_max {
        return Err(CodecError::SlotOutOfRange {
            slot: slot.clone(),
            low: n.clone(),
            high: params.k_max,
        });
    }
    encode_in_slot(n, &params, slot)
}

fn check_alphabet(n: &BigUint, alphabet: &BigUint) -> Result<CodecParams, CodecError> {
    let params = CodecParams::for_alphabet(alphabet)?;
    if n >= alphabet {
        return Err(CodecError::TagOutsideAlphabet {
            tag: n.clone(),
            alphabet: alphabet.clone(),
        });
    }
    Ok(params)
}

fn encode_in_slot(
    n: &BigUint,
    params: &CodecParams,
    slot: &BigUint,
) -> Result<ScrambledCode, CodecError> {
    ScrambledCode::new(triangular(slot) + n, params.bit_budget)
}

/// Slot range `[max(n, 2^b - 1), k_max(B)]` used by [`encode_with_budget`].
///
/// The lower end is the same for every tag of width `b`, so the code
/// distribution depends on `n` only through the offset.
pub fn budget_slot_range(tag: &HiddenTag, budget: u32) -> Result<(BigUint, BigUint), CodecError> {
    let bit_width = tag.bit_width();
    if u64::from(budget) < 2 * u64::from(bit_width) {
        return Err(CodecError::BudgetTooSmall { budget, bit_width });
    }
    let floor = (BigUint::one() << bit_width) - 1u32;
    let low = if tag.value() > &floor {
        tag.value().clone()
    } else {
        floor
    };
    Ok((low, k_max_for_budget(budget)))
}

/// Encode a `b`-bit tag into a `B`-bit code, `B >= 2b`, drawing the slot from
/// [`budget_slot_range`]. The result is always below `2^B`.
pub fn encode_with_budget<R: RngCore + ?Sized>(
    tag: &HiddenTag,
    budget: u32,
    rng: &mut R,
) -> Result<ScrambledCode, CodecError> {
    let (low, high) = budget_slot_range(tag, budget)?;
    let slot = random_inclusive(rng, &low, &high);
    ScrambledCode::new(triangular(&slot) + tag.value(), budget)
}

/// [`encode_with_budget`] with the slot index supplied by the caller.
pub fn encode_with_budget_at_slot(
    tag: &HiddenTag,
    budget: u32,
    slot: &BigUint,
) -> Result<ScrambledCode, CodecError> {
    let (low, high) = budget_slot_range(tag, budget)?;
    if slot < &low || slot > &high {
        return Err(CodecError::SlotOutOfRange {
            slot: slot.clone(),
            low,
            high,
        });
    }
    ScrambledCode::new(triangular(slot) + tag.value(), budget)
}

/// `u - p_k` for the largest `k` with `p_k <= u`.
pub fn decode(u: &BigUint) -> BigUint {
    u - triangular(&inverse_triangular(u))
}
