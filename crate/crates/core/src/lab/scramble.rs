//! The weak baseline: tag bits copied to fixed positions, random filler elsewhere.

use alloc::vec::Vec;

use num_bigint::BigUint;
use rand::RngCore;

use super::LabError;
use crate::bits::BitString;
use crate::codec::{HiddenTag, ScrambledCode};
use crate::random::random_bits;

/// `b` positions spread evenly over `B` bits: `floor(i * B / b)`.
pub fn spread_positions(bit_width: u32, budget: u32) -> Result<Vec<u32>, LabError> {
    if bit_width == 0 || budget < bit_width {
        return Err(LabError::BudgetTooSmall { bit_width, budget });
    }
    Ok((0..bit_width)
        .map(|i| (u64::from(i) * u64::from(budget) / u64::from(bit_width)) as u32)
        .collect())
}

fn check_positions(bit_width: u32, budget: u32, positions: &[u32]) -> Result<(), LabError> {
    if positions.len() != bit_width as usize {
        return Err(LabError::PositionCount {
            expected: bit_width as usize,
            found: positions.len(),
        });
    }
    let mut seen = BitString::zeros(budget as usize);
    for &position in positions {
        if position >= budget {
            return Err(LabError::PositionOutOfRange { position, budget });
        }
        if seen.get(position as usize) {
            return Err(LabError::DuplicatePosition(position));
        }
        seen.set(position as usize, true);
    }
    Ok(())
}

/// Place bit `j` of `tag` at `positions[j]` in a `budget`-bit word whose other
/// bits are uniform random.
pub fn fixed_bits_scramble<R: RngCore + ?Sized>(
    tag: &HiddenTag,
    budget: u32,
    positions: &[u32],
    rng: &mut R,
) -> Result<ScrambledCode, LabError> {
    check_positions(tag.bit_width(), budget, positions)?;
    let mut word = BitString::from_biguint(&random_bits(rng, u64::from(budget)), budget as usize)
        .expect("random_bits stays below 2^budget");
    for (j, &position) in positions.iter().enumerate() {
        word.set(position as usize, tag.value().bit(j as u64));
    }
    Ok(ScrambledCode::new(word.to_biguint(), budget)?)
}

/// Read the tag back out of a fixed-bits code.
pub fn fixed_bits_unscramble(code: &ScrambledCode, positions: &[u32]) -> Result<BigUint, LabError> {
    let budget = code.bit_budget();
    check_positions(positions.len() as u32, budget, positions)?;
    let mut value = BigUint::default();
    for (j, &position) in positions.iter().enumerate() {
        value.set_bit(j as u64, code.value().bit(u64::from(position)));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_positions_at_full_width_copy_the_tag() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tag = HiddenTag::from_u64(0b1011_0110, 8).unwrap();
        let positions: Vec<u32> = (0..8).collect();
        let code = fixed_bits_scramble(&tag, 8, &positions, &mut rng).unwrap();
        assert_eq!(code.value(), tag.value());
    }

    #[test]
    fn two_scrambles_agree_on_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tag = HiddenTag::from_u64(0b1001, 4).unwrap();
        let positions = [1u32, 6, 3, 4];
        let a = fixed_bits_scramble(&tag, 8, &positions, &mut rng).unwrap();
        let b = fixed_bits_scramble(&tag, 8, &positions, &mut rng).unwrap();
        for &p in &positions {
            assert_eq!(a.value().bit(u64::from(p)), b.value().bit(u64::from(p)));
        }
        assert_eq!(
            fixed_bits_unscramble(&a, &positions).unwrap(),
            BigUint::from(0b1001u32)
        );
    }

    #[test]
    fn filler_bits_look_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tag = HiddenTag::from_u64(0, 2).unwrap();
        let positions = [0u32, 1];
        let mut ones = [0u32; 8];
        for _ in 0..4000 {
            let code = fixed_bits_scramble(&tag, 8, &positions, &mut rng).unwrap();
            for (i, count) in ones.iter_mut().enumerate() {
                *count += u32::from(code.value().bit(i as u64));
            }
        }
        assert_eq!(&ones[..2], &[0, 0]);
        for &count in &ones[2..] {
            assert!((1800..2200).contains(&count), "{count}");
        }
    }

    #[test]
    fn spread_positions_are_distinct_and_in_range() {
        for b in 1..40u32 {
            for budget in b..(4 * b) {
                let positions = spread_positions(b, budget).unwrap();
                assert!(check_positions(b, budget, &positions).is_ok());
            }
        }
        assert!(spread_positions(5, 4).is_err());
    }

    #[test]
    fn rejects_bad_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tag = HiddenTag::from_u64(1, 2).unwrap();
        assert_eq!(
            fixed_bits_scramble(&tag, 4, &[0, 4], &mut rng),
            Err(LabError::PositionOutOfRange {
                position: 4,
                budget: 4
            })
        );
        assert_eq!(
            fixed_bits_scramble(&tag, 4, &[2, 2], &mut rng),
            Err(LabError::DuplicatePosition(2))
        );
        assert_eq!(
            fixed_bits_scramble(&tag, 4, &[2], &mut rng),
            Err(LabError::PositionCount {
                expected: 2,
                found: 1
            })
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn unscramble_recovers_tag(b in 1u32..64, extra in 0u32..64, value: u64, seed: u64) {
            let value = if b == 64 { value } else { value & ((1u64 << b) - 1) };
            let tag = HiddenTag::from_u64(value, b).unwrap();
            let budget = b + extra;
            let positions = spread_positions(b, budget).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let code = fixed_bits_scramble(&tag, budget, &positions, &mut rng).unwrap();
            prop_assert!(code.value().bits() <= u64::from(budget));
            prop_assert_eq!(fixed_bits_unscramble(&code, &positions).unwrap(), BigUint::from(value));
        }
    }
}
