//! The five-step distribution of `K` from `A` to `M_1 ... M_n`.
//!
//! 1. `M_1` sends `alpha^N_1` to `A`; for `i = 2..n`, `A` forwards the running
//!    value to `M_i`, who raises it to `N_i` and returns it.
//! 2. `A` sends `alpha^(N_1...N_n)` to every member.
//! 3. Each `M_i` raises that to `N_i^-1` and returns it.
//! 4. `A` raises each reply to `N_a` and sends it back to its member.
//! 5. Each `M_i` raises the value to `N_i`, obtaining `K` (no transmission).
//!
//! Parties are isolated state machines; they only see messages delivered by a
//! [`Bus`]. Every message that leaves a party is appended to the
//! [`Transcript`].

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use rand::RngCore;
use thiserror::Error;

use super::params::{GroupParams, PrivateExponent, SharedKey};
use super::GroupError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    Distributor,
    /// Member `M_i`, 1-based.
    Member(usize),
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Distributor => f.write_str("A"),
            Party::Member(i) => write!(f, "M{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown party {0:?}")]
pub struct ParsePartyError(alloc::string::String);

impl FromStr for Party {
    type Err = ParsePartyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "A" {
            return Ok(Party::Distributor);
        }
        s.strip_prefix('M')
            .and_then(|i| i.parse::<usize>().ok())
            .filter(|&i| i >= 1)
            .map(Party::Member)
            .ok_or_else(|| ParsePartyError(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    I,
    II,
    III,
    IV,
    V,
}

impl Step {
    pub const ALL: [Step; 5] = [Step::I, Step::II, Step::III, Step::IV, Step::V];

    pub fn as_str(self) -> &'static str {
        match self {
            Step::I => "i",
            Step::II => "ii",
            Step::III => "iii",
            Step::IV => "iv",
            Step::V => "v",
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Step {
    type Err = ParsePartyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Step::ALL
            .into_iter()
            .find(|step| step.as_str() == s)
            .ok_or_else(|| ParsePartyError(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub step: Step,
    pub from: Party,
    pub to: Party,
    pub payload: BigUint,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, message: Message) {
        self.messages.push(message);
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    /// Number of distinct members appearing in the transcript.
    pub fn participant_count(&self) -> usize {
        self.messages
            .iter()
            .flat_map(|m| [m.from, m.to])
            .filter(|p| matches!(p, Party::Member(_)))
            .collect::<BTreeSet<_>>()
            .len()
    }
}

impl FromIterator<Message> for Transcript {
    fn from_iter<T: IntoIterator<Item = Message>>(iter: T) -> Self {
        Self {
            messages: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BusError {
    #[error("link dropped message #{0}")]
    Dropped(usize),
    #[error("bus closed")]
    Closed,
}

/// Ordered delivery of protocol messages.
pub trait Bus {
    fn send(&mut self, message: Message) -> Result<(), BusError>;

    /// Next message in delivery order, if any.
    fn recv(&mut self) -> Option<Message>;
}

/// FIFO queue with an eavesdropper tap recording every accepted message.
#[derive(Debug, Default)]
pub struct MemoryBus {
    queue: VecDeque<Message>,
    tap: Vec<Message>,
    fail_at: Option<usize>,
    sent: usize,
}

impl MemoryBus {
    pub fn new() -> Self {
        Self::default()
    }

    /// A bus whose link drops the message with zero-based index `index` and
    /// refuses everything after it.
    pub fn failing_at(index: usize) -> Self {
        Self {
            fail_at: Some(index),
            ..Self::default()
        }
    }

    /// Everything an eavesdropper saw, in order.
    pub fn tap(&self) -> &[Message] {
        &self.tap
    }
}

impl Bus for MemoryBus {
    fn send(&mut self, message: Message) -> Result<(), BusError> {
        if let Some(index) = self.fail_at {
            if self.sent >= index {
                self.sent += 1;
                return Err(BusError::Dropped(index));
            }
        }
        self.sent += 1;
        self.tap.push(message.clone());
        self.queue.push_back(message);
        Ok(())
    }

    fn recv(&mut self) -> Option<Message> {
        self.queue.pop_front()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("protocol needs at least one participant")]
    NoParticipants,
    #[error("bus failure, protocol aborted after {} messages: {error}", transcript.len())]
    Bus {
        error: BusError,
        transcript: Transcript,
    },
    #[error("{party} received an unexpected step {step} message from {from}")]
    Unexpected {
        party: Party,
        from: Party,
        step: Step,
    },
    #[error("message addressed to unknown party {0}")]
    UnknownParty(Party),
    #[error("{0} finished without a key")]
    Incomplete(Party),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Member `M_i` of the protocol.
#[derive(Debug, Clone)]
pub struct Member<'a> {
    index: usize,
    exponent: PrivateExponent,
    params: &'a GroupParams,
    key: Option<SharedKey>,
}

impl<'a> Member<'a> {
    pub fn new(index: usize, exponent: PrivateExponent, params: &'a GroupParams) -> Self {
        Self {
            index,
            exponent,
            params,
            key: None,
        }
    }

    pub fn party(&self) -> Party {
        Party::Member(self.index)
    }

    /// Opening message of step i (only meaningful for `M_1`).
    pub fn start(&self) -> Message {
        Message {
            step: Step::I,
            from: self.party(),
            to: Party::Distributor,
            payload: self.params.power(self.exponent.value()),
        }
    }

    pub fn handle(&mut self, message: &Message) -> Result<Option<Message>, ProtocolError> {
        let unexpected = || ProtocolError::Unexpected {
            party: Party::Member(self.index),
            from: message.from,
            step: message.step,
        };
        if message.from != Party::Distributor {
            return Err(unexpected());
        }
        match message.step {
            Step::I if self.index > 1 => Ok(Some(Message {
                step: Step::I,
                from: self.party(),
                to: Party::Distributor,
                payload: self.params.raise(&message.payload, self.exponent.value()),
            })),
            Step::II => {
                let inverse = self.exponent.inverse(self.params)?;
                Ok(Some(Message {
                    step: Step::III,
                    from: self.party(),
                    to: Party::Distributor,
                    payload: self.params.raise(&message.payload, &inverse),
                }))
            }
            Step::IV => {
                let key = self.params.raise(&message.payload, self.exponent.value());
                self.key = Some(SharedKey::new(key));
                Ok(None)
            }
            _ => Err(unexpected()),
        }
    }

    pub fn key(&self) -> Option<&SharedKey> {
        self.key.as_ref()
    }
}

/// The distributor `A`.
#[derive(Debug, Clone)]
pub struct Distributor<'a> {
    members: usize,
    exponent: PrivateExponent,
    params: &'a GroupParams,
    key: Option<SharedKey>,
}

impl<'a> Distributor<'a> {
    pub fn new(members: usize, exponent: PrivateExponent, params: &'a GroupParams) -> Self {
        Self {
            members,
            exponent,
            params,
            key: None,
        }
    }

    pub fn handle(&mut self, message: &Message) -> Result<Vec<Message>, ProtocolError> {
        let sender = match message.from {
            Party::Member(i) if (1..=self.members).contains(&i) => i,
            _ => {
                return Err(ProtocolError::Unexpected {
                    party: Party::Distributor,
                    from: message.from,
                    step: message.step,
                })
            }
        };
        match message.step {
            Step::I if sender < self.members => Ok(vec![Message {
                step: Step::I,
                from: Party::Distributor,
                to: Party::Member(sender + 1),
                payload: message.payload.clone(),
            }]),
            Step::I => {
                // alpha^(N_1...N_n) collected; K follows from N_a directly.
                let key = self.params.raise(&message.payload, self.exponent.value());
                self.key = Some(SharedKey::new(key));
                Ok((1..=self.members)
                    .map(|i| Message {
                        step: Step::II,
                        from: Party::Distributor,
                        to: Party::Member(i),
                        payload: message.payload.clone(),
                    })
                    .collect())
            }
            Step::III => Ok(vec![Message {
                step: Step::IV,
                from: Party::Distributor,
                to: message.from,
                payload: self.params.raise(&message.payload, self.exponent.value()),
            }]),
            _ => Err(ProtocolError::Unexpected {
                party: Party::Distributor,
                from: message.from,
                step: message.step,
            }),
        }
    }

    pub fn key(&self) -> Option<&SharedKey> {
        self.key.as_ref()
    }
}

/// Private exponents of every party for one run.
#[derive(Debug, Clone)]
pub struct ProtocolSetup {
    members: Vec<PrivateExponent>,
    distributor: PrivateExponent,
}

impl ProtocolSetup {
    pub fn new(members: Vec<PrivateExponent>, distributor: PrivateExponent) -> Self {
        Self {
            members,
            distributor,
        }
    }

    /// Build from raw exponent values, validating each against `q`.
    pub fn from_values(
        params: &GroupParams,
        members: &[BigUint],
        distributor: &BigUint,
    ) -> Result<Self, GroupError> {
        let members = members
            .iter()
            .enumerate()
            .map(|(i, n)| PrivateExponent::new(n.clone(), Party::Member(i + 1), params))
            .collect::<Result<Vec<_>, _>>()?;
        let distributor = PrivateExponent::new(distributor.clone(), Party::Distributor, params)?;
        Ok(Self::new(members, distributor))
    }

    /// Fresh uniformly random exponents for `n` members and the distributor.
    pub fn random<R: RngCore + ?Sized>(n: usize, params: &GroupParams, rng: &mut R) -> Self {
        let members = (1..=n)
            .map(|i| PrivateExponent::random(Party::Member(i), params, rng))
            .collect();
        let distributor = PrivateExponent::random(Party::Distributor, params, rng);
        Self::new(members, distributor)
    }

    pub fn members(&self) -> &[PrivateExponent] {
        &self.members
    }

    pub fn distributor(&self) -> &PrivateExponent {
        &self.distributor
    }

    /// `alpha^(N_1 ... N_n N_a mod q)`, computed straight from the exponents.
    pub fn reference_key(&self, params: &GroupParams) -> SharedKey {
        let exponents = self
            .members
            .iter()
            .chain(core::iter::once(&self.distributor))
            .map(PrivateExponent::value);
        SharedKey::new(params.power(&params.exponent_product(exponents)))
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    pub member_keys: Vec<SharedKey>,
    pub distributor_key: SharedKey,
    pub transcript: Transcript,
}

impl ProtocolOutcome {
    /// The common key, if all `n + 1` parties hold the same one.
    pub fn agreed_key(&self) -> Option<&SharedKey> {
        self.member_keys
            .iter()
            .all(|k| *k == self.distributor_key)
            .then_some(&self.distributor_key)
    }
}

/// Run the protocol to completion over `bus`, one party at a time in delivery
/// order.
pub fn run_protocol<B: Bus + ?Sized>(
    params: &GroupParams,
    setup: &ProtocolSetup,
    bus: &mut B,
) -> Result<ProtocolOutcome, ProtocolError> {
    let n = setup.members.len();
    if n == 0 {
        return Err(ProtocolError::NoParticipants);
    }
    let mut members: Vec<Member<'_>> = setup
        .members
        .iter()
        .enumerate()
        .map(|(i, exponent)| Member::new(i + 1, exponent.clone(), params))
        .collect();
    let mut distributor = Distributor::new(n, setup.distributor.clone(), params);
    let mut transcript = Transcript::new();

    let send = |bus: &mut B, transcript: &mut Transcript, message: Message| match bus
        .send(message.clone())
    {
        Ok(()) => {
            transcript.push(message);
            Ok(())
        }
        Err(error) => Err(ProtocolError::Bus {
            error,
            transcript: transcript.clone(),
        }),
    };

    send(bus, &mut transcript, members[0].start())?;
    while let Some(message) = bus.recv() {
        let replies = match message.to {
            Party::Distributor => distributor.handle(&message)?,
            Party::Member(i) if (1..=n).contains(&i) => {
                members[i - 1].handle(&message)?.into_iter().collect()
            }
            other => return Err(ProtocolError::UnknownParty(other)),
        };
        for reply in replies {
            send(bus, &mut transcript, reply)?;
        }
    }

    let member_keys = members
        .iter()
        .map(|m| m.key().cloned().ok_or(ProtocolError::Incomplete(m.party())))
        .collect::<Result<Vec<_>, _>>()?;
    let distributor_key = distributor
        .key()
        .cloned()
        .ok_or(ProtocolError::Incomplete(Party::Distributor))?;
    Ok(ProtocolOutcome {
        member_keys,
        distributor_key,
        transcript,
    })
}

/// Group elements an eavesdropper observes on the wire.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdversaryView {
    elements: BTreeSet<BigUint>,
}

impl AdversaryView {
    pub fn contains(&self, element: &BigUint) -> bool {
        self.elements.contains(element)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &BTreeSet<BigUint> {
        &self.elements
    }

    /// `Err` carrying the key if it was ever transmitted.
    pub fn check_excludes(&self, key: &SharedKey) -> Result<(), SharedKey> {
        if self.contains(key.value()) {
            Err(key.clone())
        } else {
            Ok(())
        }
    }
}

pub fn adversary_view(transcript: &Transcript) -> AdversaryView {
    AdversaryView {
        elements: transcript
            .messages()
            .iter()
            .map(|m| m.payload.clone())
            .collect(),
    }
}

/// Transmissions per step. Step v never transmits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub i: usize,
    pub ii: usize,
    pub iii: usize,
    pub iv: usize,
    pub v: usize,
}

impl StepCounts {
    pub fn total(&self) -> usize {
        self.i + self.ii + self.iii + self.iv + self.v
    }

    pub fn get(&self, step: Step) -> usize {
        match step {
            Step::I => self.i,
            Step::II => self.ii,
            Step::III => self.iii,
            Step::IV => self.iv,
            Step::V => self.v,
        }
    }
}

pub fn count_messages(transcript: &Transcript) -> StepCounts {
    let mut counts = StepCounts::default();
    for message in transcript.messages() {
        match message.step {
            Step::I => counts.i += 1,
            Step::II => counts.ii += 1,
            Step::III => counts.iii += 1,
            Step::IV => counts.iv += 1,
            Step::V => counts.v += 1,
        }
    }
    counts
}

/// Structural violations of a finished run.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranscriptViolation {
    #[error("{count} transmissions exceed 5n = {bound}")]
    TooManyMessages { count: usize, bound: usize },
    #[error("payload of message #{0} is outside the order-q subgroup")]
    NotInSubgroup(usize),
    #[error("the shared key was transmitted")]
    KeyTransmitted,
}

/// Message bound, subgroup membership of every payload, and key exclusion.
pub fn check_transcript(
    params: &GroupParams,
    transcript: &Transcript,
    participants: usize,
    key: &SharedKey,
) -> Result<(), TranscriptViolation> {
    let bound = 5 * participants;
    if transcript.len() > bound {
        return Err(TranscriptViolation::TooManyMessages {
            count: transcript.len(),
            bound,
        });
    }
    if let Some(index) = transcript
        .messages()
        .iter()
        .position(|m| !params.is_member(&m.payload))
    {
        return Err(TranscriptViolation::NotInSubgroup(index));
    }
    adversary_view(transcript)
        .check_excludes(key)
        .map_err(|_| TranscriptViolation::KeyTransmitted)
}
