//! Protocol run with one thread per party.
//!
//! A router thread owns delivery: it records each message in the transcript
//! and forwards it to the recipient's inbox. Parties report back after every
//! message they handle, so the router knows when nothing is left in flight.
//! Keys are identical to the single-threaded run; the transcript holds the
//! same messages, though step iii and iv interleave in arrival order.

use std::sync::mpsc;
use std::thread;

use tagseal_core::group::{
    Distributor, Member, Message, Party, ProtocolError, ProtocolOutcome, ProtocolSetup, Transcript,
};
use tagseal_core::{GroupParams, SharedKey};

type Report = Result<Vec<Message>, ProtocolError>;

pub fn run_protocol_threaded(
    params: &GroupParams,
    setup: &ProtocolSetup,
) -> Result<ProtocolOutcome, ProtocolError> {
    let n = setup.members().len();
    if n == 0 {
        return Err(ProtocolError::NoParticipants);
    }

    thread::scope(|scope| {
        let (report_tx, report_rx) = mpsc::channel::<Report>();
        let mut inboxes = Vec::with_capacity(n + 1);
        let mut handles = Vec::with_capacity(n + 1);

        let (tx, rx) = mpsc::channel::<Message>();
        inboxes.push(tx);
        let reports = report_tx.clone();
        let mut distributor = Distributor::new(n, setup.distributor().clone(), params);
        handles.push(scope.spawn(move || {
            for message in rx {
                let _ = reports.send(distributor.handle(&message));
            }
            distributor.key().cloned()
        }));

        let mut opening = None;
        for (i, exponent) in setup.members().iter().enumerate() {
            let (tx, rx) = mpsc::channel::<Message>();
            inboxes.push(tx);
            let reports = report_tx.clone();
            let mut member = Member::new(i + 1, exponent.clone(), params);
            if i == 0 {
                opening = Some(member.start());
            }
            handles.push(scope.spawn(move || {
                for message in rx {
                    let _ = reports.send(member.handle(&message).map(|m| m.into_iter().collect()));
                }
                member.key().cloned()
            }));
        }
        drop(report_tx);

        let mut transcript = Transcript::new();
        let mut in_flight = 0usize;
        let mut failure = None;
        let mut pending = vec![opening.expect("at least one member")];
        loop {
            for message in pending.drain(..) {
                let slot = match message.to {
                    Party::Distributor => 0,
                    Party::Member(i) if (1..=n).contains(&i) => i,
                    other => {
                        failure.get_or_insert(ProtocolError::UnknownParty(other));
                        continue;
                    }
                };
                transcript.push(message.clone());
                inboxes[slot]
                    .send(message)
                    .expect("party threads outlive the router");
                in_flight += 1;
            }
            if in_flight == 0 || failure.is_some() {
                break;
            }
            match report_rx.recv().expect("a party is still running") {
                Ok(replies) => pending = replies,
                Err(e) => failure = Some(e),
            }
            in_flight -= 1;
        }
        drop(inboxes);

        let keys: Vec<Option<SharedKey>> = handles
            .into_iter()
            .map(|h| h.join().expect("party thread panicked"))
            .collect();
        if let Some(e) = failure {
            return Err(e);
        }
        let distributor_key = keys[0]
            .clone()
            .ok_or(ProtocolError::Incomplete(Party::Distributor))?;
        let member_keys = keys[1..]
            .iter()
            .enumerate()
            .map(|(i, k)| {
                k.clone()
                    .ok_or(ProtocolError::Incomplete(Party::Member(i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProtocolOutcome {
            member_keys,
            distributor_key,
            transcript,
        })
    })
}
