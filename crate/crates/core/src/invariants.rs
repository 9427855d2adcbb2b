//! Bookkeeping for structural invariants observed along trajectories.

/// Maximum number of violation messages kept verbatim.
const KEEP: usize = 32;

/// Counts invariant checks and records the first few violations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InvariantLog {
    pub checks: u64,
    pub violation_count: u64,
    pub messages: Vec<String>,
}

impl InvariantLog {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violation_count += 1;
            if self.messages.len() < KEEP {
                self.messages.push(what());
            }
        }
    }

    pub fn merge(&mut self, other: &InvariantLog) {
        self.checks += other.checks;
        self.violation_count += other.violation_count;
        for m in &other.messages {
            if self.messages.len() >= KEEP {
                break;
            }
            self.messages.push(m.clone());
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}
