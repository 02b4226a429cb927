use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Rank used to order simultaneous events: departures first, then retrials,
/// then external arrivals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    Departure,
    Retrial,
    Arrival,
}

#[derive(Debug, Clone, Copy)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub seq: u64,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so the max-heap pops the earliest event.
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then(other.kind.cmp(&self.kind)).then(other.seq.cmp(&self.seq))
    }
}

/// Future-event list with deterministic tie-breaking.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: f64, kind: EventKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Event { time, kind, seq });
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_follow_kind_then_sequence() {
        let mut q = EventQueue::new();
        q.schedule(1.0, EventKind::Arrival);
        q.schedule(1.0, EventKind::Retrial);
        q.schedule(0.5, EventKind::Arrival);
        q.schedule(1.0, EventKind::Departure);
        q.schedule(1.0, EventKind::Arrival);
        let order: Vec<_> = std::iter::from_fn(|| q.pop()).map(|e| (e.time, e.kind, e.seq)).collect();
        assert_eq!(
            order,
            vec![
                (0.5, EventKind::Arrival, 2),
                (1.0, EventKind::Departure, 3),
                (1.0, EventKind::Retrial, 1),
                (1.0, EventKind::Arrival, 0),
                (1.0, EventKind::Arrival, 4),
            ]
        );
    }
}
