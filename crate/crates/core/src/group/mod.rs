//! Group key distribution.
//!
//! A distributor `A` and members `M_1 ... M_n` agree on
//! `K = alpha^(N_1 ... N_n N_a)` inside the order-`q` subgroup of `Z_p^*`,
//! `p = 2q + 1` a safe prime. Exponents live mod `q`, elements mod `p`.

mod arith;
pub mod ddh;
mod params;
pub mod prime;
pub mod protocol;

use alloc::string::String;

use num_bigint::BigUint;
use thiserror::Error;

pub use arith::{mod_exp, mod_inverse};
pub use params::{gen_group_params, GroupParams, PrivateExponent, SharedKey};
pub use protocol::{
    adversary_view, check_transcript, count_messages, run_protocol, AdversaryView, Bus, BusError,
    Distributor, Member, MemoryBus, Message, Party, ProtocolError, ProtocolOutcome, ProtocolSetup,
    Step, StepCounts, Transcript, TranscriptViolation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("{value} has no inverse modulo {modulus}")]
    NotInvertible { value: BigUint, modulus: BigUint },
    #[error("invalid group parameters: {0}")]
    InvalidParams(String),
    #[error("private exponent must lie in [1, q-1]")]
    ExponentOutOfRange,
    #[error("safe primes need at least 4 bits, got {0}")]
    TooFewBits(u64),
}
