//! Conversion of a two-terminal concurrent schedule into an alternating one.
//!
//! In a concurrent round `j` both terminals send at once: `AB_j` from A to
//! B and `BA_j` from B to A. Each message may depend on the sender's source
//! and on everything it received in earlier rounds. Merging `BA_{j-1}` with
//! `BA_j` (and likewise for A) gives an alternating schedule with one extra
//! message and the same total rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::Bits;
use crate::sum_rate::Location;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "AB")]
    AtoB,
    #[serde(rename = "BA")]
    BtoA,
}

impl Direction {
    pub fn sender(self) -> Location {
        match self {
            Direction::AtoB => Location::A,
            Direction::BtoA => Location::B,
        }
    }
}

/// Concurrent message `direction` of round `round` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MessageId {
    pub direction: Direction,
    pub round: usize,
}

impl MessageId {
    fn ab(round: usize) -> Self {
        MessageId {
            direction: Direction::AtoB,
            round,
        }
    }

    fn ba(round: usize) -> Self {
        MessageId {
            direction: Direction::BtoA,
            round,
        }
    }

    /// Messages the sender may have used: everything it received earlier.
    pub fn inputs(self) -> Vec<MessageId> {
        let other = match self.direction {
            Direction::AtoB => Direction::BtoA,
            Direction::BtoA => Direction::AtoB,
        };
        (1..self.round)
            .map(|round| MessageId {
                direction: other,
                round,
            })
            .collect()
    }
}

/// Declared rates of one concurrent round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrentRound {
    pub ab_rate: Bits,
    pub ba_rate: Bits,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcurrentSchedule {
    rounds: Vec<ConcurrentRound>,
}

impl ConcurrentSchedule {
    pub fn new(rounds: Vec<ConcurrentRound>) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::InvalidSchedule(
                "a concurrent schedule needs at least one round".into(),
            ));
        }
        for (i, r) in rounds.iter().enumerate() {
            if !(r.ab_rate >= 0.0
                && r.ba_rate >= 0.0
                && r.ab_rate.is_finite()
                && r.ba_rate.is_finite())
            {
                return Err(Error::InvalidSchedule(format!(
                    "round {} has a negative or non-finite rate",
                    i + 1
                )));
            }
        }
        Ok(ConcurrentSchedule { rounds })
    }

    pub fn t(&self) -> usize {
        self.rounds.len()
    }

    pub fn rounds(&self) -> &[ConcurrentRound] {
        &self.rounds
    }

    pub fn rate(&self, id: MessageId) -> Bits {
        let r = &self.rounds[id.round - 1];
        match id.direction {
            Direction::AtoB => r.ab_rate,
            Direction::BtoA => r.ba_rate,
        }
    }

    pub fn total_rate(&self) -> Bits {
        self.rounds.iter().map(|r| r.ab_rate + r.ba_rate).sum()
    }
}

/// One message of an alternating schedule, bundling concurrent messages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternatingMessage {
    pub sender: Location,
    pub parts: Vec<MessageId>,
    pub rate: Bits,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlternatingSchedule {
    pub messages: Vec<AlternatingMessage>,
}

impl AlternatingSchedule {
    pub fn total_rate(&self) -> Bits {
        self.messages.iter().map(|m| m.rate).sum()
    }

    pub fn strictly_alternates(&self) -> bool {
        self.messages.windows(2).all(|w| w[0].sender != w[1].sender)
    }
}

/// `t` concurrent rounds become `t + 1` alternating messages starting at A:
/// `AB_1`, then `BA_{j-1} + BA_j` for even `j` and `AB_{j-1} + AB_j` for odd
/// `j > 1`, and finally whichever of `AB_t`, `BA_t` is still unsent.
pub fn concurrent_to_alternating(schedule: &ConcurrentSchedule) -> Result<AlternatingSchedule> {
    let t = schedule.t();
    let mut groups = vec![vec![MessageId::ab(1)]];
    for j in 2..=t {
        if j % 2 == 0 {
            groups.push(vec![MessageId::ba(j - 1), MessageId::ba(j)]);
        } else {
            groups.push(vec![MessageId::ab(j - 1), MessageId::ab(j)]);
        }
    }
    groups.push(vec![if t % 2 == 0 {
        MessageId::ab(t)
    } else {
        MessageId::ba(t)
    }]);
    let messages = groups
        .into_iter()
        .map(|parts| AlternatingMessage {
            sender: parts[0].direction.sender(),
            rate: parts.iter().map(|&id| schedule.rate(id)).sum(),
            parts,
        })
        .collect();
    let alt = AlternatingSchedule { messages };
    replay_dependencies(schedule, &alt)?;
    Ok(alt)
}

/// Checks that `alt` strictly alternates, sends every concurrent message
/// exactly once from its own sender, only after all of that message's
/// inputs were delivered, and preserves the total rate.
pub fn replay_dependencies(schedule: &ConcurrentSchedule, alt: &AlternatingSchedule) -> Result<()> {
    let t = schedule.t();
    let mut sent_at = std::collections::BTreeMap::new();
    for (k, msg) in alt.messages.iter().enumerate() {
        if k > 0 && alt.messages[k - 1].sender == msg.sender {
            return Err(Error::InvalidSchedule(format!(
                "messages {k} and {} have the same sender",
                k + 1
            )));
        }
        for &id in &msg.parts {
            if id.round == 0 || id.round > t {
                return Err(Error::InvalidSchedule(format!(
                    "message {} carries {id:?}, outside rounds 1..={t}",
                    k + 1
                )));
            }
            if id.direction.sender() != msg.sender {
                return Err(Error::InvalidSchedule(format!(
                    "message {} is sent by {:?} but carries {id:?}",
                    k + 1,
                    msg.sender
                )));
            }
            if sent_at.insert(id, k).is_some() {
                return Err(Error::InvalidSchedule(format!("{id:?} is sent twice")));
            }
        }
    }
    for (&id, &k) in &sent_at {
        for input in id.inputs() {
            match sent_at.get(&input) {
                Some(&j) if j < k => {}
                _ => {
                    return Err(Error::InvalidSchedule(format!(
                        "{id:?} in message {} needs {input:?}, which has not been delivered",
                        k + 1
                    )))
                }
            }
        }
    }
    if sent_at.len() != 2 * t {
        return Err(Error::InvalidSchedule(format!(
            "{} of {} concurrent messages were sent",
            sent_at.len(),
            2 * t
        )));
    }
    let declared = schedule.total_rate();
    if (alt.total_rate() - declared).abs() > 1e-9 * declared.max(1.0) {
        return Err(Error::InvalidSchedule(
            "alternating schedule changes the total rate".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(t: usize) -> ConcurrentSchedule {
        ConcurrentSchedule::new(
            (0..t)
                .map(|i| ConcurrentRound {
                    ab_rate: 1.0 + i as f64,
                    ba_rate: 0.5 * i as f64,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn small_cases() {
        let alt = concurrent_to_alternating(&schedule(1)).unwrap();
        assert_eq!(alt.messages.len(), 2);
        assert_eq!(alt.messages[0].parts, vec![MessageId::ab(1)]);
        assert_eq!(alt.messages[1].parts, vec![MessageId::ba(1)]);

        let alt = concurrent_to_alternating(&schedule(2)).unwrap();
        let parts: Vec<_> = alt.messages.iter().map(|m| m.parts.clone()).collect();
        assert_eq!(
            parts,
            vec![
                vec![MessageId::ab(1)],
                vec![MessageId::ba(1), MessageId::ba(2)],
                vec![MessageId::ab(2)]
            ]
        );

        let alt = concurrent_to_alternating(&schedule(3)).unwrap();
        assert_eq!(alt.messages.len(), 4);
        assert_eq!(alt.messages[3].parts, vec![MessageId::ba(3)]);
        assert_eq!(alt.messages[3].sender, Location::B);
    }

    #[test]
    fn rates_and_alternation() {
        for t in 1..=12 {
            let s = schedule(t);
            let alt = concurrent_to_alternating(&s).unwrap();
            assert_eq!(alt.messages.len(), t + 1);
            assert!(alt.strictly_alternates());
            assert!((alt.total_rate() - s.total_rate()).abs() < 1e-12);
        }
    }

    #[test]
    fn replay_rejects_bad_orders() {
        let s = schedule(2);
        let msg = |sender, parts: Vec<MessageId>| AlternatingMessage {
            sender,
            rate: parts.iter().map(|&id| s.rate(id)).sum(),
            parts,
        };
        // AB_2 needs BA_1 first.
        let early = AlternatingSchedule {
            messages: vec![
                msg(Location::A, vec![MessageId::ab(1), MessageId::ab(2)]),
                msg(Location::B, vec![MessageId::ba(1), MessageId::ba(2)]),
            ],
        };
        assert!(replay_dependencies(&s, &early).is_err());
        let missing = AlternatingSchedule {
            messages: vec![msg(Location::A, vec![MessageId::ab(1)])],
        };
        assert!(replay_dependencies(&s, &missing).is_err());
        let wrong_sender = AlternatingSchedule {
            messages: vec![msg(Location::B, vec![MessageId::ab(1)])],
        };
        assert!(replay_dependencies(&s, &wrong_sender).is_err());
        assert!(ConcurrentSchedule::new(vec![]).is_err());
    }
}
