//! Paired (tag bits, code or cipher bits) samples for the attack.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;
use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::scramble::{fixed_bits_scramble, spread_positions};
use super::LabError;
use crate::codec::{encode_with_budget, HiddenTag};
use crate::group::SharedKey;
use crate::otp::{derive_pad, Nonce};
use crate::random::random_bits;

/// How a tag becomes a `B`-bit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Triangular-slot randomization.
    Quadratic,
    /// Tag bits at fixed positions among random filler.
    FixedBits,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Quadratic, Scheme::FixedBits];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Quadratic => "quadratic",
            Scheme::FixedBits => "fixed-bits",
        }
    }

    /// Smallest budget the scheme accepts for a `b`-bit tag.
    pub fn min_budget(self, bit_width: u32) -> u64 {
        match self {
            Scheme::Quadratic => 2 * u64::from(bit_width),
            Scheme::FixedBits => u64::from(bit_width),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadratic" => Ok(Scheme::Quadratic),
            "fixed-bits" | "fixed" => Ok(Scheme::FixedBits),
            _ => Err(LabError::UnknownName),
        }
    }
}

/// Whether every row of an encrypted dataset shares one pad or gets its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum PadMode {
    /// One nonce for the whole dataset, so every row is XORed with the same pad.
    Fixed,
    /// A new nonce, hence a new pad, per row.
    #[default]
    Fresh,
}

impl PadMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PadMode::Fixed => "fixed",
            PadMode::Fresh => "fresh",
        }
    }
}

impl fmt::Display for PadMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PadMode {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fixed" => Ok(PadMode::Fixed),
            "fresh" => Ok(PadMode::Fresh),
            _ => Err(LabError::UnknownName),
        }
    }
}

/// Parameters of one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetSpec {
    pub scheme: Scheme,
    pub bit_width: u32,
    pub budget: u32,
    pub samples: usize,
    pub encrypted: bool,
    pub pad_mode: PadMode,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.samples == 0 {
            return Err(LabError::NoSamples);
        }
        if self.bit_width == 0 || u64::from(self.budget) < self.scheme.min_budget(self.bit_width) {
            return Err(LabError::BudgetTooSmall {
                bit_width: self.bit_width,
                budget: self.budget,
            });
        }
        Ok(())
    }
}

/// `T` rows of tag bits `x` (`T x b`) and code or cipher bits `y` (`T x B`),
/// bit `i` of a value in column `i`, entries 0.0 or 1.0.
#[derive(Debug, Clone, PartialEq)]
pub struct BitDataset {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub scheme: Scheme,
    pub encrypted: bool,
}

impl BitDataset {
    pub fn samples(&self) -> usize {
        self.x.nrows()
    }
}

fn fill_row(matrix: &mut DMatrix<f64>, row: usize, value: &BigUint) {
    for (w, mut word) in value.iter_u64_digits().enumerate() {
        while word != 0 {
            let bit = word.trailing_zeros() as usize;
            matrix[(row, 64 * w + bit)] = 1.0;
            word &= word - 1;
        }
    }
}

fn child<R: RngCore + ?Sized>(rng: &mut R) -> ChaCha20Rng {
    let mut seed = [0u8; 32];
    rng.fill_bytes(&mut seed);
    ChaCha20Rng::from_seed(seed)
}

/// Draw `T` uniform `b`-bit tags, scramble each with `spec.scheme`, and
/// optionally XOR the codes with pads.
///
/// Tags, codes and pads come from three child generators seeded from `rng`
/// in that order, so two specs that differ only in scheme see the same tags
/// and the same pads when started from equal generator states.
pub fn sample_dataset<R: RngCore + ?Sized>(
    spec: &DatasetSpec,
    rng: &mut R,
) -> Result<BitDataset, LabError> {
    spec.validate()?;
    let mut tag_rng = child(rng);
    let mut code_rng = child(rng);
    let mut pad_rng = child(rng);

    let b = spec.bit_width;
    let budget = spec.budget;
    let rows = spec.samples;
    let positions = match spec.scheme {
        Scheme::FixedBits => spread_positions(b, budget)?,
        Scheme::Quadratic => Vec::new(),
    };
    let key = SharedKey::new(random_bits(&mut pad_rng, 256));
    let shared_nonce = Nonce::random(&mut pad_rng);

    let mut x = DMatrix::zeros(rows, b as usize);
    let mut y = DMatrix::zeros(rows, budget as usize);
    for row in 0..rows {
        let tag = HiddenTag::new(random_bits(&mut tag_rng, u64::from(b)), b)?;
        let code = match spec.scheme {
            Scheme::Quadratic => encode_with_budget(&tag, budget, &mut code_rng)?,
            Scheme::FixedBits => fixed_bits_scramble(&tag, budget, &positions, &mut code_rng)?,
        };
        let mut value = code.into_value();
        if spec.encrypted {
            let nonce = match spec.pad_mode {
                PadMode::Fixed => shared_nonce,
                PadMode::Fresh => Nonce::random(&mut pad_rng),
            };
            value ^= derive_pad(&key, &nonce, budget as usize)
                .bits()
                .to_biguint();
        }
        fill_row(&mut x, row, tag.value());
        fill_row(&mut y, row, &value);
    }
    Ok(BitDataset {
        x,
        y,
        scheme: spec.scheme,
        encrypted: spec.encrypted,
    })
}
