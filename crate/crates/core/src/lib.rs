//! Correlation-resistant tagging primitives.
//!
//! A hidden tag `h` is first scrambled into a code `u` by placing it at a random
//! offset inside a triangular-number slot ([`codec`]), then sealed with a
//! one-time pad ([`otp`]) whose key material comes from an n-party
//! Diffie-Hellman style key distribution ([`group`]). The [`lab`] module holds
//! the canonical-correlation attack used to measure how much of `h` leaks
//! through `u` or through the sealed cipher.
//!
//! The crate is `no_std` (with `alloc`). Randomness is always injected as a
//! [`rand::RngCore`]; the `tagseal` companion crate provides the OS-backed
//! source, file formats and the command line front end.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod bits;
pub mod codec;
pub mod group;
pub mod lab;
pub mod otp;
pub mod random;

pub use bits::BitString;
pub use codec::{decode, encode, encode_with_budget, CodecError, HiddenTag, ScrambledCode};
pub use group::{GroupError, GroupParams, SharedKey};
pub use otp::{derive_pad, open_tag, seal_tag, xor_pad, Nonce, OtpError, PadKey, TagRecord};
