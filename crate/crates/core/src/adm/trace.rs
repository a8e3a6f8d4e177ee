//! Timestamped simulation output and its CSV / JSON forms.
//!
//! CSV columns: `time_s, phase, event, knife_set, line_temp_0..n-1,
//! switch_0..n-1, note`. Times use Rust's shortest round-trip float
//! formatting, temperatures three decimals, switches `1` (open) / `0`.

use serde::Serialize;
use std::fmt;
use std::io::Write;

use super::state::Phase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Start,
    FaultActive,
    HealthCheckPass,
    HealthCheckFail,
    BurnStart,
    LineCut,
    LinePrecut,
    BurnEnd,
    SwitchesEvaluated,
    TimerArmed,
    TimerExpired,
    TimerCancelled,
    TcReceived,
    TcIgnored,
    DeployedConfirmed,
    Horizon,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Start => "start",
            EventKind::FaultActive => "fault_active",
            EventKind::HealthCheckPass => "health_check_pass",
            EventKind::HealthCheckFail => "health_check_fail",
            EventKind::BurnStart => "burn_start",
            EventKind::LineCut => "line_cut",
            EventKind::LinePrecut => "line_precut",
            EventKind::BurnEnd => "burn_end",
            EventKind::SwitchesEvaluated => "switches_evaluated",
            EventKind::TimerArmed => "timer_armed",
            EventKind::TimerExpired => "timer_expired",
            EventKind::TimerCancelled => "timer_cancelled",
            EventKind::TcReceived => "tc_received",
            EventKind::TcIgnored => "tc_ignored",
            EventKind::DeployedConfirmed => "deployed_confirmed",
            EventKind::Horizon => "horizon",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub time_s: f64,
    pub phase: Phase,
    pub event: EventKind,
    pub knife_set: Option<usize>,
    pub line_temps: Vec<f64>,
    pub switches: Vec<bool>,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EventTrace {
    pub n_lines: usize,
    pub records: Vec<TraceRecord>,
}

impl EventTrace {
    pub fn new(n_lines: usize) -> Self {
        Self { n_lines, records: Vec::new() }
    }

    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.time_s <= record.time_s));
        self.records.push(record);
    }

    pub fn events(&self) -> impl Iterator<Item = EventKind> + '_ {
        self.records.iter().map(|r| r.event)
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["time_s".to_string(), "phase".into(), "event".into(), "knife_set".into()];
        h.extend((0..self.n_lines).map(|i| format!("line_temp_{i}")));
        h.extend((0..self.n_lines).map(|i| format!("switch_{i}")));
        h.push("note".into());
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for r in &self.records {
            let mut row = vec![
                r.time_s.to_string(),
                r.phase.to_string(),
                r.event.to_string(),
                r.knife_set.map(|k| k.to_string()).unwrap_or_default(),
            ];
            row.extend(r.line_temps.iter().map(|t| format!("{t:.3}")));
            row.extend(r.switches.iter().map(|s| if *s { "1" } else { "0" }.to_string()));
            row.push(r.note.clone());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = EventTrace::new(2);
        t.push(TraceRecord {
            time_s: 0.0,
            phase: Phase::Stowed,
            event: EventKind::Start,
            knife_set: None,
            line_temps: vec![20.0, 20.0],
            switches: vec![false, true],
            note: String::new(),
        });
        t.push(TraceRecord {
            time_s: 5.25,
            phase: Phase::Burning(1),
            event: EventKind::LineCut,
            knife_set: Some(1),
            line_temps: vec![145.0, 99.12345],
            switches: vec![true, true],
            note: "line 0, door opened".into(),
        });
        let csv = t.to_csv_string();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "time_s,phase,event,knife_set,line_temp_0,line_temp_1,switch_0,switch_1,note");
        assert_eq!(lines[1], "0,stowed,start,,20.000,20.000,0,1,");
        assert_eq!(lines[2], "5.25,burning,line_cut,1,145.000,99.123,1,1,\"line 0, door opened\"");
    }
}
