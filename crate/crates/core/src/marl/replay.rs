use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `(s, a, r, s')` experience. `reward` is in USD as cleared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub done: bool,
}

/// Fixed-capacity FIFO of transitions; the oldest entry is evicted first.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    transitions: VecDeque<Transition>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::Config("replay capacity must be positive".into()));
        }
        Ok(Self {
            capacity,
            transitions: VecDeque::with_capacity(capacity.min(1 << 16)),
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn push(&mut self, transition: Transition) {
        if self.transitions.len() == self.capacity {
            self.transitions.pop_front();
        }
        self.transitions.push_back(transition);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.iter()
    }

    /// Draws `batch_size` distinct transitions uniformly at random.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        batch_size: usize,
        rng: &mut R,
    ) -> Result<Vec<&Transition>> {
        if batch_size == 0 || batch_size > self.transitions.len() {
            return Err(Error::Argument(format!(
                "cannot sample {batch_size} from a buffer holding {}",
                self.transitions.len()
            )));
        }
        Ok(
            rand::seq::index::sample(rng, self.transitions.len(), batch_size)
                .into_iter()
                .map(|i| &self.transitions[i])
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn t(action: usize) -> Transition {
        Transition {
            state: vec![0.0],
            action,
            reward: action as f64,
            next_state: vec![0.0],
            done: false,
        }
    }

    #[test]
    fn evicts_oldest_first() {
        let mut buf = ReplayBuffer::new(3).unwrap();
        for a in 0..5 {
            buf.push(t(a));
            assert!(buf.len() <= 3);
        }
        let actions: Vec<usize> = buf.iter().map(|t| t.action).collect();
        assert_eq!(actions, vec![2, 3, 4]);
    }

    #[test]
    fn sampling_requires_enough_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut buf = ReplayBuffer::new(10).unwrap();
        buf.push(t(0));
        assert!(buf.sample(2, &mut rng).is_err());
        buf.push(t(1));
        let batch = buf.sample(2, &mut rng).unwrap();
        let mut seen: Vec<usize> = batch.iter().map(|t| t.action).collect();
        seen.sort();
        assert_eq!(seen, vec![0, 1]);
        assert!(ReplayBuffer::new(0).is_err());
    }
}
