//! Step-by-step simulations of protocols that implement measurement
//! channels with limited communication.

mod bell_circuit;
mod register;
mod semilocal;
mod swap;
mod twisted;

use serde::{Deserialize, Serialize};

pub use bell_circuit::{bell_circuit_channel, bell_circuit_isometry};
pub use register::{BellLabel, QubitRegister};
pub use semilocal::{
    run_theorem4, semilocal_branches, semilocal_channel, SemilocalBranch, SemilocalMode,
    SemilocalRun,
};
pub use swap::{entanglement_swap_branches, entanglement_swap_demo, SwapBranch, SwapRun};
pub use twisted::{run_twisted_partition_classical, twisted_protocol_channel, TwistedRun};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Actor {
    Alice,
    Bob,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommDirection {
    AtoB,
    BtoA,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    Classical,
    Quantum,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub actor: Actor,
    pub action: String,
    #[serde(rename = "commDirection")]
    pub comm_direction: Option<CommDirection>,
    #[serde(rename = "payloadKind")]
    pub payload_kind: PayloadKind,
}

/// Ordered record of who did what, and what crossed between the parties.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolTrace {
    pub steps: Vec<TraceStep>,
}

impl ProtocolTrace {
    /// A local step with no communication.
    pub fn local(&mut self, actor: Actor, action: impl Into<String>) {
        self.steps.push(TraceStep {
            actor,
            action: action.into(),
            comm_direction: None,
            payload_kind: PayloadKind::None,
        });
    }

    /// A message from `actor` to the other party.
    pub fn send(&mut self, actor: Actor, action: impl Into<String>, payload: PayloadKind) {
        let direction = match actor {
            Actor::Alice => CommDirection::AtoB,
            Actor::Bob => CommDirection::BtoA,
        };
        self.steps.push(TraceStep {
            actor,
            action: action.into(),
            comm_direction: Some(direction),
            payload_kind: payload,
        });
    }

    pub fn messages(&self, direction: CommDirection) -> impl Iterator<Item = &TraceStep> {
        self.steps
            .iter()
            .filter(move |s| s.comm_direction == Some(direction))
    }

    /// No step sends anything from Bob to Alice.
    pub fn is_semilocal(&self) -> bool {
        self.messages(CommDirection::BtoA).next().is_none()
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        self.steps
            .iter()
            .map(|s| serde_json::to_string(s).expect("plain data") + "\n")
            .collect()
    }
}
