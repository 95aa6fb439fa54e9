//! Events, local states and the "definitely occurred before" relation of a
//! partially synchronous trace.
//!
//! Every timestamp is an integer number of ticks of a configurable quantum.
//! An event observed at local time `t` on a clock with skew bound `eps`
//! occurred (on the source clock) somewhere in `[max(0, t - eps), t + eps]`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Time in ticks of the configured quantum.
pub type Time = u64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("value {value} is not a multiple of the time quantum {quantum}")]
    Quantization { value: u64, quantum: u64 },
    #[error("time quantum must be positive")]
    ZeroQuantum,
    #[error("process {proc}: expected event index {expected}, got {got}")]
    Sequence { proc: String, expected: usize, got: usize },
    #[error("process {proc}: event {index} interval {interval} decreases relative to {previous}")]
    NonMonotonic { proc: String, index: usize, interval: Interval, previous: Interval },
    #[error("malformed record: {0}")]
    Format(String),
    #[error("unknown process {0:?}")]
    UnknownProcess(String),
}

/// Closed interval `[lo, hi]` of global time. `lo > hi` encodes the empty
/// interval, which only arises for derived definite intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Time,
    pub hi: Time,
}

impl Interval {
    pub const fn new(lo: Time, hi: Time) -> Self {
        Interval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, t: Time) -> bool {
        self.lo <= t && t <= self.hi
    }

    /// Intersection: largest lower bound, smallest upper bound.
    pub fn meet(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    /// Scales both endpoints from ticks back to raw units.
    pub fn scaled(&self, unit: u64) -> Interval {
        Interval::new(self.lo * unit, self.hi * unit)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "empty[{},{}]", self.lo, self.hi)
        } else {
            write!(f, "[{},{}]", self.lo, self.hi)
        }
    }
}

/// Size of one tick in raw trace units (default: 1, i.e. raw units are ticks).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quantum(u64);

impl Quantum {
    pub fn new(unit: u64) -> Result<Self, TraceError> {
        if unit == 0 {
            return Err(TraceError::ZeroQuantum);
        }
        Ok(Quantum(unit))
    }

    pub fn unit(&self) -> u64 {
        self.0
    }

    pub fn to_ticks(&self, value: u64) -> Result<Time, TraceError> {
        if !value.is_multiple_of(self.0) {
            return Err(TraceError::Quantization { value, quantum: self.0 });
        }
        Ok(value / self.0)
    }
}

impl Default for Quantum {
    fn default() -> Self {
        Quantum(1)
    }
}

/// `[max(0, local_ts - eps), local_ts + eps]`; the system starts at time 0.
pub fn event_interval(local_ts: Time, eps: Time) -> Interval {
    Interval::new(local_ts.saturating_sub(eps), local_ts + eps)
}

/// Same as [`event_interval`] but for raw (unquantized) values.
pub fn event_interval_quantized(
    local_ts: u64,
    eps: u64,
    quantum: Quantum,
) -> Result<Interval, TraceError> {
    Ok(event_interval(quantum.to_ticks(local_ts)?, quantum.to_ticks(eps)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub proc: usize,
    pub index: usize,
    pub local_ts: Time,
    pub interval: Interval,
}

/// `e1 -> e2`: on the same process the lower bounds are strictly ordered,
/// across processes `e1` ends strictly before `e2` can begin.
pub fn definitely_before_events(e1: &Event, e2: &Event) -> bool {
    if e1.proc == e2.proc {
        e1.interval.lo < e2.interval.lo
    } else {
        e1.interval.hi < e2.interval.lo
    }
}

pub type Atoms = BTreeMap<String, bool>;

/// The period a process spends between two adjacent events.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalState {
    pub proc: usize,
    pub index: usize,
    /// Opening event (`index`).
    pub le: Event,
    /// Closing event (`index + 1`).
    pub he: Event,
    pub atoms: Atoms,
}

impl LocalState {
    /// `[le.hi, he.lo]`, possibly empty.
    pub fn definite(&self) -> Interval {
        Interval::new(self.le.interval.hi, self.he.interval.lo)
    }

    /// `[le.lo, he.hi]`.
    pub fn possible(&self) -> Interval {
        Interval::new(self.le.interval.lo, self.he.interval.hi)
    }
}

pub fn state_intervals(s: &LocalState) -> (Interval, Interval) {
    (s.definite(), s.possible())
}

pub fn definitely_before_states(s1: &LocalState, s2: &LocalState) -> bool {
    if s1.proc == s2.proc {
        definitely_before_events(&s1.le, &s2.le)
    } else {
        definitely_before_events(&s1.he, &s2.le)
    }
}

/// One line of a trace file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub proc: String,
    pub index: usize,
    pub ts: i64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub atoms: Atoms,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[i64; 2]>,
}

impl TraceRecord {
    pub fn new(proc: impl Into<String>, index: usize, ts: i64) -> Self {
        TraceRecord { proc: proc.into(), index, ts, atoms: Atoms::new(), interval: None }
    }

    pub fn with_atom(mut self, name: impl Into<String>, value: bool) -> Self {
        self.atoms.insert(name.into(), value);
        self
    }
}

/// Optional first line of a trace file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub procs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceLine {
    Header(TraceHeader),
    Record(TraceRecord),
    Blank,
}

/// Parses one line of a line-delimited JSON trace. Lines starting with `#`
/// are comments.
pub fn parse_trace_line(line: &str) -> Result<TraceLine, TraceError> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(TraceLine::Blank);
    }
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| TraceError::Format(e.to_string()))?;
    if value.get("procs").is_some() {
        serde_json::from_value(value).map(TraceLine::Header)
    } else {
        serde_json::from_value(value).map(TraceLine::Record)
    }
    .map_err(|e| TraceError::Format(format!("{e}: {line}")))
}

/// Reads a whole trace. The process list comes from the header if present,
/// otherwise from first appearance.
pub fn read_trace(text: &str) -> Result<(TraceHeader, Vec<TraceRecord>), TraceError> {
    let mut header = None;
    let mut records = Vec::new();
    for line in text.lines() {
        match parse_trace_line(line)? {
            TraceLine::Header(h) if header.is_none() && records.is_empty() => header = Some(h),
            TraceLine::Header(_) => return Err(TraceError::Format("header must be the first line".into())),
            TraceLine::Record(r) => records.push(r),
            TraceLine::Blank => {}
        }
    }
    let header = header.unwrap_or_else(|| {
        let mut procs: Vec<String> = Vec::new();
        for r in &records {
            if !procs.contains(&r.proc) {
                procs.push(r.proc.clone());
            }
        }
        TraceHeader { procs, ..Default::default() }
    });
    Ok((header, records))
}

/// Serialises a trace as line-delimited JSON with a header line.
pub fn write_trace(header: &TraceHeader, records: &[TraceRecord]) -> String {
    let mut out = serde_json::to_string(header).expect("header serialises");
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serialises"));
        out.push('\n');
    }
    out
}

/// Ingestion state for one process: the open event and the FIFO of closed
/// states not yet consumed by the lattice.
#[derive(Debug)]
pub struct ProcessStream {
    proc: usize,
    name: String,
    eps: Time,
    quantum: Quantum,
    open: Option<(Event, Atoms)>,
    last_atoms: Atoms,
    queue: VecDeque<LocalState>,
}

fn non_negative(v: i64, what: &str) -> Result<u64, TraceError> {
    u64::try_from(v).map_err(|_| TraceError::Format(format!("negative {what} {v}")))
}

impl ProcessStream {
    /// `eps` is given in ticks.
    pub fn new(proc: usize, name: impl Into<String>, eps: Time, quantum: Quantum) -> Self {
        ProcessStream {
            proc,
            name: name.into(),
            eps,
            quantum,
            open: None,
            last_atoms: Atoms::new(),
            queue: VecDeque::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn next_index(&self) -> usize {
        self.open.as_ref().map_or(0, |(e, _)| e.index + 1)
    }

    /// Registers the event carried by `record`. Returns the state it closes,
    /// if any; the state is also pushed onto the FIFO queue.
    pub fn ingest_record(&mut self, record: &TraceRecord) -> Result<Option<LocalState>, TraceError> {
        if record.proc != self.name {
            return Err(TraceError::UnknownProcess(record.proc.clone()));
        }
        let expected = self.next_index();
        if record.index != expected {
            return Err(TraceError::Sequence {
                proc: self.name.clone(),
                expected,
                got: record.index,
            });
        }
        let ts = self.quantum.to_ticks(non_negative(record.ts, "timestamp")?)?;
        let interval = match record.interval {
            Some([lo, hi]) => {
                let lo = self.quantum.to_ticks(non_negative(lo, "interval bound")?)?;
                let hi = self.quantum.to_ticks(non_negative(hi, "interval bound")?)?;
                if lo > hi {
                    return Err(TraceError::Format(format!("interval [{lo},{hi}] has lo > hi")));
                }
                Interval::new(lo, hi)
            }
            None => event_interval(ts, self.eps),
        };
        let event = Event { proc: self.proc, index: record.index, local_ts: ts, interval };

        // Atoms not mentioned keep their previous value.
        let mut atoms = self.last_atoms.clone();
        atoms.extend(record.atoms.iter().map(|(k, v)| (k.clone(), *v)));

        let closed = match self.open.take() {
            None => None,
            Some((prev, prev_atoms)) => {
                if interval.lo < prev.interval.lo || interval.hi < prev.interval.hi {
                    let previous = prev.interval;
                    self.open = Some((prev, prev_atoms));
                    return Err(TraceError::NonMonotonic {
                        proc: self.name.clone(),
                        index: record.index,
                        interval,
                        previous,
                    });
                }
                Some(LocalState {
                    proc: self.proc,
                    index: prev.index,
                    le: prev,
                    he: event.clone(),
                    atoms: prev_atoms,
                })
            }
        };
        self.last_atoms = atoms.clone();
        self.open = Some((event, atoms));
        if let Some(s) = &closed {
            self.queue.push_back(s.clone());
        }
        Ok(closed)
    }

    pub fn pop_state(&mut self) -> Option<LocalState> {
        self.queue.pop_front()
    }

    pub fn queued(&self) -> usize {
        self.queue.len()
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn ev(proc: usize, lo: Time, hi: Time) -> Event {
        Event { proc, index: 0, local_ts: lo, interval: Interval::new(lo, hi) }
    }

    #[test]
    fn trace_file_round_trip() {
        let header = TraceHeader { procs: vec!["P2".into(), "P1".into()], epsilon: Some(1), unit: None };
        let records = vec![
            TraceRecord::new("P1", 0, 0).with_atom("a", true),
            TraceRecord { interval: Some([3, 5]), ..TraceRecord::new("P2", 0, 4) },
        ];
        let text = write_trace(&header, &records);
        assert_eq!(text.lines().count(), 3);
        assert_eq!(read_trace(&text).unwrap(), (header, records.clone()));

        let bare = format!("# comment\n\n{}", write_trace(&TraceHeader::default(), &records).split_once('\n').unwrap().1);
        assert_eq!(read_trace(&bare).unwrap().0.procs, vec!["P1".to_string(), "P2".to_string()]);
        assert!(matches!(parse_trace_line("{\"proc\": 3}"), Err(TraceError::Format(_))));
        assert!(read_trace(&format!("{bare}{{\"procs\":[]}}\n")).is_err());
    }

    #[test]
    fn event_interval_examples() {
        assert_eq!(event_interval(5, 1), Interval::new(4, 6));
        assert_eq!(event_interval(0, 0), Interval::new(0, 0));
        assert_eq!(event_interval(0, 3), Interval::new(0, 3));
    }

    #[test]
    fn quantization_is_enforced() {
        let q = Quantum::new(100).unwrap();
        assert_eq!(event_interval_quantized(500, 100, q).unwrap(), Interval::new(4, 6));
        assert!(matches!(
            event_interval_quantized(550, 100, q),
            Err(TraceError::Quantization { value: 550, quantum: 100 })
        ));
        assert_eq!(Quantum::new(0), Err(TraceError::ZeroQuantum));
    }

    #[test]
    fn definitely_before_event_examples() {
        assert!(!definitely_before_events(&ev(0, 11, 13), &ev(1, 10, 12)));
        assert!(definitely_before_events(&ev(0, 4, 6), &ev(1, 10, 12)));
        let e = ev(0, 4, 6);
        assert!(!definitely_before_events(&e, &e));
    }

    #[test]
    fn worked_trace_state_relations() {
        let t = worked_trace();
        // s(1)_0 -> s(2)_3
        assert!(definitely_before_states(&t[0][0], &t[1][3]));
        // s(1)_1 and s(2)_1 are concurrent
        assert!(!definitely_before_states(&t[0][1], &t[1][1]));
        assert!(!definitely_before_states(&t[1][1], &t[0][1]));
        assert!(definitely_before_states(&t[0][0], &t[0][1]));
    }

    #[test]
    fn worked_trace_state_intervals() {
        let t = worked_trace();
        assert_eq!(state_intervals(&t[0][1]), (Interval::new(6, 11), Interval::new(4, 13)));
        assert_eq!(state_intervals(&t[1][3]), (Interval::new(12, 12), Interval::new(10, 14)));
        let z = states_for(0, &[3, 7], 0, &[]);
        assert_eq!(state_intervals(&z[0]), (Interval::new(3, 7), Interval::new(3, 7)));
    }

    fn rec(proc: &str, index: usize, ts: i64) -> TraceRecord {
        TraceRecord { proc: proc.into(), index, ts, atoms: Atoms::new(), interval: None }
    }

    #[test]
    fn ingest_closes_states_in_order() {
        let mut s = ProcessStream::new(0, "P1", 1, Quantum::default());
        let mut r0 = rec("P1", 0, 0);
        r0.atoms.insert("x".into(), true);
        assert_eq!(s.ingest_record(&r0).unwrap(), None);
        let st = s.ingest_record(&rec("P1", 1, 5)).unwrap().unwrap();
        assert_eq!(st.index, 0);
        assert_eq!(st.atoms.get("x"), Some(&true));
        assert_eq!(st.possible(), Interval::new(0, 6));
        s.ingest_record(&rec("P1", 2, 9)).unwrap();
        assert_eq!(s.queued(), 2);
        assert_eq!(s.pop_state().unwrap().index, 0);
        // atoms carry forward from the opening record
        assert_eq!(s.pop_state().unwrap().atoms.get("x"), Some(&true));
    }

    #[test]
    fn ingest_rejects_bad_records() {
        let mut s = ProcessStream::new(0, "P1", 1, Quantum::default());
        s.ingest_record(&rec("P1", 0, 0)).unwrap();
        s.ingest_record(&rec("P1", 1, 3)).unwrap();
        s.ingest_record(&rec("P1", 2, 6)).unwrap();
        assert!(matches!(
            s.ingest_record(&rec("P1", 4, 9)),
            Err(TraceError::Sequence { expected: 3, got: 4, .. })
        ));
        assert!(matches!(s.ingest_record(&rec("P1", 3, -1)), Err(TraceError::Format(_))));
        let mut bad = rec("P1", 3, 7);
        bad.interval = Some([2, 9]);
        assert!(matches!(s.ingest_record(&bad), Err(TraceError::NonMonotonic { .. })));
        assert!(matches!(s.ingest_record(&rec("P2", 3, 7)), Err(TraceError::UnknownProcess(_))));
        // the stream is still usable after a rejected record
        assert!(s.ingest_record(&rec("P1", 3, 7)).unwrap().is_some());
    }

    #[test]
    fn explicit_interval_overrides_epsilon() {
        let mut s = ProcessStream::new(0, "P1", 1, Quantum::default());
        let mut r = rec("P1", 0, 5);
        r.interval = Some([2, 9]);
        s.ingest_record(&r).unwrap();
        let st = s.ingest_record(&rec("P1", 1, 20)).unwrap().unwrap();
        assert_eq!(st.le.interval, Interval::new(2, 9));
    }

    #[test]
    fn record_json_shape() {
        let r: TraceRecord =
            serde_json::from_str(r#"{"proc": "P2", "index": 3, "ts": 11, "atoms": {"at_assembly": false}}"#)
                .unwrap();
        assert_eq!(r.proc, "P2");
        assert_eq!(r.atoms.get("at_assembly"), Some(&false));
        let r: TraceRecord =
            serde_json::from_str(r#"{"proc": "P2", "index": 3, "ts": 11, "interval": [10, 12]}"#).unwrap();
        assert_eq!(r.interval, Some([10, 12]));
    }

    fn arb_process_events(proc: usize) -> impl Strategy<Value = Vec<Event>> {
        (prop::collection::vec(0u64..6, 1..6), 0u64..4).prop_map(move |(gaps, eps)| {
            let mut t = 0;
            gaps.iter()
                .enumerate()
                .map(|(i, g)| {
                    t += g;
                    Event { proc, index: i, local_ts: t, interval: event_interval(t, eps) }
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn relation_is_irreflexive_and_asymmetric(a in arb_process_events(0), b in arb_process_events(1)) {
            let all: Vec<&Event> = a.iter().chain(b.iter()).collect();
            for x in &all {
                prop_assert!(!definitely_before_events(x, x));
                for y in &all {
                    prop_assert!(!(definitely_before_events(x, y) && definitely_before_events(y, x)));
                }
            }
        }

        #[test]
        fn possible_contains_definite(ts in prop::collection::vec(0u64..50, 2..8), eps in 0u64..5) {
            let mut ts = ts;
            ts.sort();
            for s in states_for(0, &ts, eps, &[]) {
                let (d, p) = state_intervals(&s);
                prop_assert_eq!(p.lo, s.le.interval.lo);
                prop_assert_eq!(p.hi, s.he.interval.hi);
                if !d.is_empty() {
                    prop_assert!(p.lo <= d.lo && d.hi <= p.hi);
                }
            }
        }

        #[test]
        fn zero_skew_orders_distinct_timestamps(t1 in 0u64..100, t2 in 0u64..100) {
            prop_assume!(t1 != t2);
            let e1 = Event { proc: 0, index: 0, local_ts: t1, interval: event_interval(t1, 0) };
            let e2 = Event { proc: 1, index: 0, local_ts: t2, interval: event_interval(t2, 0) };
            prop_assert!(definitely_before_events(&e1, &e2) ^ definitely_before_events(&e2, &e1));
        }
    }
}
