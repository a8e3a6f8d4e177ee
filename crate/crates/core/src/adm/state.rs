//! Live state of the deployment controller and the protocol operations that
//! act on it.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

use super::scenario::{FaultKind, FaultSpec, Scenario, TcKind};
use super::thermal::{line_temp_step, MeltLine};
use super::AdmConfig;
use crate::error::ProtocolError;
use crate::quantities::TemperatureC;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Stowed,
    HealthCheck,
    /// Knife set currently powered.
    Burning(usize),
    Evaluate,
    Partial,
    DeployedUnconfirmed,
    DeployedConfirmed,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Stowed => "stowed",
            Phase::HealthCheck => "health_check",
            Phase::Burning(_) => "burning",
            Phase::Evaluate => "evaluate",
            Phase::Partial => "partial",
            Phase::DeployedUnconfirmed => "deployed_unconfirmed",
            Phase::DeployedConfirmed => "deployed_confirmed",
        }
    }

    pub fn knife_set(self) -> Option<usize> {
        match self {
            Phase::Burning(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Phase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimerId {
    /// 15 min retry after a partial deployment.
    RetryPartial,
    /// 6 h re-attempt while waiting for ground confirmation.
    ReattemptFull,
    /// 24 h forced burn armed by a confirmation during partial deployment.
    ForcedBurn,
}

impl TimerId {
    pub fn as_str(self) -> &'static str {
        match self {
            TimerId::RetryPartial => "retry_partial",
            TimerId::ReattemptFull => "reattempt_full",
            TimerId::ForcedBurn => "forced_burn",
        }
    }
}

impl fmt::Display for TimerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmedTimer {
    pub deadline: f64,
    /// Shared with the event queue so timer/event ties resolve by arming order.
    pub seq: u64,
}

/// Thermal trajectory of one burn, fixed when the burn starts.
#[derive(Debug, Clone, PartialEq)]
pub struct BurnPlan {
    pub knife_set: usize,
    pub attempt: u32,
    pub started_at: f64,
    /// Latest time the burn may run until (`started_at + burn_max`).
    pub deadline: f64,
    /// `(line, absolute cut time)` in time order.
    pub cuts: Vec<(usize, f64)>,
    /// Retry timers cancelled by starting this burn.
    pub cancelled: Vec<TimerId>,
    start_lines: Vec<MeltLine>,
    /// Sorted times in `(started_at, deadline)` where a resistor fault activates.
    breakpoints: Vec<f64>,
    cfg: AdmConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurnEndReason {
    AllLinesCut,
    BurnMax,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOutcome {
    pub phase: Phase,
    pub switches_open: usize,
    pub armed: TimerId,
    pub deadline: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TcOutcome {
    Confirmed { cancelled: Vec<TimerId> },
    ForcedArmed { deadline: f64 },
    ForcedAlreadyArmed,
    ForcedCancelled,
    Ignored { reason: &'static str },
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum TimerOutcome {
    /// Health check passed (or was bypassed) and a burn started.
    Burn { health_checked: bool, plan: BurnPlan },
    /// Health check failed; the same timer was re-armed.
    HealthFailed { rearmed_at: f64 },
    /// Forced timer expired while a burn was already running.
    Absorbed,
}

/// Battery voltage at the state's clock against the configured threshold.
pub fn health_check(state: &AdmState, scenario: &Scenario, cfg: &AdmConfig) -> bool {
    scenario.battery_at(state.sim_time) >= cfg.health_min_battery_v
}

#[derive(Debug, Clone)]
pub struct AdmState {
    pub phase: Phase,
    pub lines: Vec<MeltLine>,
    pub doors_open: Vec<bool>,
    pub switches_open: Vec<bool>,
    pub timers: BTreeMap<TimerId, ArmedTimer>,
    pub next_knife_set: usize,
    pub attempt_count: u32,
    pub forced_timer_armed: bool,
    pub sim_time: f64,
    pub ambient: TemperatureC,
    pub faults: Vec<FaultSpec>,
    /// Time at which the temperatures in `lines` were last brought up to date.
    temps_valid_at: f64,
    active_burn: Option<BurnPlan>,
    seq: u64,
}

impl AdmState {
    pub fn new(cfg: &AdmConfig, ambient: TemperatureC, faults: Vec<FaultSpec>) -> Self {
        let lines = (0..cfg.n_doors).map(|i| MeltLine::new(i, cfg, ambient)).collect();
        Self::with_lines(lines, ambient, faults)
    }

    pub fn with_lines(lines: Vec<MeltLine>, ambient: TemperatureC, faults: Vec<FaultSpec>) -> Self {
        let n = lines.len();
        Self {
            phase: Phase::Stowed,
            lines,
            doors_open: vec![false; n],
            switches_open: vec![false; n],
            timers: BTreeMap::new(),
            next_knife_set: 0,
            attempt_count: 0,
            forced_timer_armed: false,
            sim_time: 0.0,
            ambient,
            faults,
            temps_valid_at: 0.0,
            active_burn: None,
            seq: 0,
        }
    }

    pub fn next_seq(&mut self) -> u64 {
        let s = self.seq;
        self.seq += 1;
        s
    }

    pub fn active_burn(&self) -> Option<&BurnPlan> {
        self.active_burn.as_ref()
    }

    pub fn all_lines_cut(&self) -> bool {
        self.lines.iter().all(|l| l.cut)
    }

    pub fn doors_open_count(&self) -> usize {
        self.doors_open.iter().filter(|d| **d).count()
    }

    fn active_faults(&self, t: f64) -> impl Iterator<Item = FaultKind> + '_ {
        self.faults.iter().filter(move |f| f.is_active(t)).map(|f| f.kind)
    }

    fn resistor_open(&self, knife_set: usize, resistor: usize, t: f64) -> bool {
        self.active_faults(t).any(|k| k == FaultKind::ResistorOpen { knife_set, resistor })
    }

    fn door_stuck(&self, door: usize, t: f64) -> bool {
        self.active_faults(t).any(|k| k == FaultKind::DoorStuck { door })
    }

    /// Re-reads every tactile switch from door positions and switch faults.
    pub fn refresh_switches(&mut self, t: f64) {
        for d in 0..self.doors_open.len() {
            let mut reading = self.doors_open[d];
            for k in self.active_faults(t) {
                match k {
                    FaultKind::SwitchStuckClosed { door } if door == d => reading = false,
                    FaultKind::SwitchStuckOpen { door } if door == d => reading = true,
                    _ => {}
                }
            }
            self.switches_open[d] = reading;
        }
    }

    /// Earliest armed timer, ordered by `(deadline, seq)`.
    pub fn next_timer(&self) -> Option<(TimerId, ArmedTimer)> {
        self.timers
            .iter()
            .min_by(|a, b| a.1.deadline.total_cmp(&b.1.deadline).then(a.1.seq.cmp(&b.1.seq)))
            .map(|(id, t)| (*id, *t))
    }

    pub fn arm_timer(&mut self, id: TimerId, deadline: f64) {
        let seq = self.next_seq();
        self.timers.insert(id, ArmedTimer { deadline, seq });
        if id == TimerId::ForcedBurn {
            self.forced_timer_armed = true;
        }
    }

    pub fn cancel_timer(&mut self, id: TimerId) -> bool {
        if id == TimerId::ForcedBurn {
            self.forced_timer_armed = false;
        }
        self.timers.remove(&id).is_some()
    }

    /// Line temperatures at `t` (≥ the last update), without mutating state.
    pub fn temps_at(&self, t: f64) -> Vec<f64> {
        if let Some(plan) = &self.active_burn {
            return self.burn_snapshot(plan, t).into_iter().map(|l| l.temp_c.0).collect();
        }
        let dt = t - self.temps_valid_at;
        self.lines
            .iter()
            .map(|l| {
                let mut l = l.clone();
                l.relax(self.ambient, dt);
                l.temp_c.0
            })
            .collect()
    }

    fn settle_to(&mut self, t: f64) {
        let dt = t - self.temps_valid_at;
        let ambient = self.ambient;
        for l in &mut self.lines {
            l.relax(ambient, dt);
        }
        self.temps_valid_at = t;
    }

    fn heated(&self, line: &MeltLine, knife_set: usize, t: f64) -> bool {
        match line.resistor_in(knife_set) {
            Some(r) => !self.resistor_open(r.knife_set, r.resistor, t),
            None => false,
        }
    }

    /// Integrates `line` through the burn from `plan.started_at` to `until`,
    /// splitting at resistor-fault activation times.
    fn integrate_burn_line(
        &self,
        plan_start: f64,
        breakpoints: &[f64],
        knife_set: usize,
        line: &MeltLine,
        until: f64,
        cfg: &AdmConfig,
    ) -> (MeltLine, Option<f64>) {
        let mut current = line.clone();
        let mut seg_start = plan_start;
        let ends = breakpoints.iter().copied().filter(|b| *b < until).chain(std::iter::once(until));
        for seg_end in ends {
            if seg_end <= seg_start {
                continue;
            }
            let heated = self.heated(&current, knife_set, seg_start);
            let step = line_temp_step(&current, heated, cfg, self.ambient, seg_end - seg_start);
            current = step.line;
            if let Some(dt) = step.cut_after {
                return (current, Some(seg_start + dt));
            }
            seg_start = seg_end;
        }
        (current, None)
    }

    fn burn_snapshot(&self, plan: &BurnPlan, t: f64) -> Vec<MeltLine> {
        plan.start_lines
            .iter()
            .map(|start| {
                let current = &self.lines[start.id];
                if current.cut {
                    return current.clone();
                }
                let planned = plan.cuts.iter().find(|(id, _)| *id == start.id).map(|c| c.1);
                if planned.is_some_and(|tc| tc <= t) {
                    let mut l = start.clone();
                    l.cut = true;
                    l.temp_c = TemperatureC(l.thermal.melt_temp_c);
                    return l;
                }
                let (mut l, _) =
                    self.integrate_burn_line(plan.started_at, &plan.breakpoints, plan.knife_set, start, t, &plan.cfg);
                // the truncated last sub-step can graze the melt point
                l.cut = false;
                l.temp_c = TemperatureC(l.temp_c.0.min(l.thermal.melt_temp_c));
                l
            })
            .collect()
    }

    /// Powers the next knife set.
    pub fn start_burn(&mut self, cfg: &AdmConfig, now: f64) -> Result<BurnPlan, ProtocolError> {
        if let Some(active) = &self.active_burn {
            return Err(ProtocolError::BurnWhileBurning { active: active.knife_set });
        }
        self.sim_time = now;
        self.settle_to(now);
        let cancelled: Vec<TimerId> =
            [TimerId::RetryPartial, TimerId::ReattemptFull].into_iter().filter(|id| self.cancel_timer(*id)).collect();

        let knife_set = self.next_knife_set;
        self.next_knife_set = (knife_set + 1) % cfg.knife_sets;
        self.attempt_count += 1;
        self.phase = Phase::Burning(knife_set);

        let deadline = if self.all_lines_cut() { now } else { now + cfg.burn_max.as_secs() };
        let mut breakpoints: Vec<f64> = self
            .faults
            .iter()
            .filter(|f| matches!(f.kind, FaultKind::ResistorOpen { knife_set: k, .. } if k == knife_set))
            .map(|f| f.active_from.as_secs())
            .filter(|t| *t > now && *t < deadline)
            .collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();

        let mut cuts: Vec<(usize, f64)> = self
            .lines
            .iter()
            .filter(|l| !l.cut)
            .filter_map(|l| {
                self.integrate_burn_line(now, &breakpoints, knife_set, l, deadline, cfg).1.map(|t| (l.id, t))
            })
            .collect();
        cuts.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

        let plan = BurnPlan {
            knife_set,
            attempt: self.attempt_count,
            started_at: now,
            deadline,
            cuts,
            cancelled,
            start_lines: self.lines.clone(),
            breakpoints,
            cfg: cfg.clone(),
        };
        self.active_burn = Some(plan.clone());
        Ok(plan)
    }

    /// Severs `line` at `now`; its door opens unless stuck. Returns whether
    /// the door opened, or `None` if the line was already cut.
    pub fn cut_line(&mut self, line: usize, now: f64) -> Option<bool> {
        if self.lines[line].cut {
            return None;
        }
        self.sim_time = now;
        let temp = self.temps_at(now)[line];
        let l = &mut self.lines[line];
        l.cut = true;
        l.temp_c = TemperatureC(temp);
        let opened = !self.door_stuck(line, now);
        if opened {
            self.doors_open[line] = true;
        }
        self.refresh_switches(now);
        Some(opened)
    }

    /// Powers down the active knife set and moves to `Evaluate`.
    pub fn end_burn(&mut self, now: f64) -> Option<BurnPlan> {
        let plan = self.active_burn.take()?;
        let snapshot = self.burn_snapshot(&plan, now);
        for (dst, src) in self.lines.iter_mut().zip(snapshot) {
            if !dst.cut {
                dst.temp_c = src.temp_c;
            }
        }
        self.temps_valid_at = now;
        self.sim_time = now;
        self.phase = Phase::Evaluate;
        Some(plan)
    }

    /// Reads the switches after a burn and arms the matching timer.
    pub fn evaluate_switches(&mut self, cfg: &AdmConfig, now: f64) -> Result<EvalOutcome, ProtocolError> {
        if self.phase != Phase::Evaluate {
            return Err(ProtocolError::NotEvaluating);
        }
        self.sim_time = now;
        self.refresh_switches(now);
        let open = self.switches_open.iter().filter(|s| **s).count();
        let (phase, timer) = if open == self.switches_open.len() && open > 0 {
            (Phase::DeployedUnconfirmed, TimerId::ReattemptFull)
        } else {
            (Phase::Partial, TimerId::RetryPartial)
        };
        self.phase = phase;
        let deadline = now + cfg.timer_period(timer).as_secs();
        self.arm_timer(timer, deadline);
        Ok(EvalOutcome { phase, switches_open: open, armed: timer, deadline })
    }

    pub fn handle_tc(&mut self, tc: TcKind, cfg: &AdmConfig, now: f64) -> TcOutcome {
        self.sim_time = now;
        if self.phase == Phase::DeployedConfirmed {
            return TcOutcome::Ignored { reason: "already confirmed" };
        }
        match tc {
            TcKind::Confirm => match self.phase {
                Phase::DeployedUnconfirmed => {
                    let cancelled: Vec<TimerId> = self.timers.keys().copied().collect();
                    for id in &cancelled {
                        self.cancel_timer(*id);
                    }
                    self.phase = Phase::DeployedConfirmed;
                    TcOutcome::Confirmed { cancelled }
                }
                Phase::Partial if self.forced_timer_armed => TcOutcome::ForcedAlreadyArmed,
                Phase::Partial => {
                    let deadline = now + cfg.forced_burn_timer.as_secs();
                    self.arm_timer(TimerId::ForcedBurn, deadline);
                    TcOutcome::ForcedArmed { deadline }
                }
                _ => TcOutcome::Ignored { reason: "no deployment outcome to confirm" },
            },
            TcKind::OverrideForcedTimer => {
                if self.cancel_timer(TimerId::ForcedBurn) {
                    TcOutcome::ForcedCancelled
                } else {
                    TcOutcome::Ignored { reason: "no forced timer armed" }
                }
            }
        }
    }

    /// First deployment attempt: health check, then burn or schedule a retry.
    pub fn initiate(&mut self, scenario: &Scenario, cfg: &AdmConfig, now: f64) -> Result<TimerOutcome, ProtocolError> {
        self.sim_time = now;
        let resume = self.phase;
        self.phase = Phase::HealthCheck;
        if health_check(self, scenario, cfg) {
            let plan = self.start_burn(cfg, now)?;
            Ok(TimerOutcome::Burn { health_checked: true, plan })
        } else {
            self.phase = resume;
            let at = now + cfg.retry_partial.as_secs();
            self.arm_timer(TimerId::RetryPartial, at);
            Ok(TimerOutcome::HealthFailed { rearmed_at: at })
        }
    }

    /// Handles expiry of an armed timer.
    pub fn on_timer(
        &mut self,
        id: TimerId,
        scenario: &Scenario,
        cfg: &AdmConfig,
        now: f64,
    ) -> Result<TimerOutcome, ProtocolError> {
        self.sim_time = now;
        self.cancel_timer(id);
        match id {
            TimerId::ForcedBurn => {
                if self.active_burn.is_some() {
                    return Ok(TimerOutcome::Absorbed);
                }
                let plan = self.start_burn(cfg, now)?;
                Ok(TimerOutcome::Burn { health_checked: false, plan })
            }
            TimerId::RetryPartial | TimerId::ReattemptFull => {
                let resume = self.phase;
                self.phase = Phase::HealthCheck;
                if health_check(self, scenario, cfg) {
                    let plan = self.start_burn(cfg, now)?;
                    Ok(TimerOutcome::Burn { health_checked: true, plan })
                } else {
                    self.phase = resume;
                    let at = now + cfg.timer_period(id).as_secs();
                    self.arm_timer(id, at);
                    Ok(TimerOutcome::HealthFailed { rearmed_at: at })
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adm::scenario::BatteryPoint;

    fn cfg() -> AdmConfig {
        AdmConfig::default()
    }

    fn fresh(faults: &[&str]) -> AdmState {
        let faults = faults.iter().map(|f| f.parse().unwrap()).collect();
        AdmState::new(&cfg(), TemperatureC(20.0), faults)
    }

    fn battery(volts: f64) -> Scenario {
        Scenario { battery_v_timeline: vec![BatteryPoint { t_s: 0.0, volts }], ..Scenario::default() }
    }

    /// Ends the active burn at its deadline, applying planned cuts first.
    fn complete_burn(s: &mut AdmState, plan: &BurnPlan) -> EvalOutcome {
        for (line, t) in &plan.cuts {
            s.cut_line(*line, *t);
        }
        let end = plan.cuts.last().map(|c| c.1).filter(|_| s.all_lines_cut()).unwrap_or(plan.deadline);
        s.end_burn(end).unwrap();
        s.evaluate_switches(&cfg(), end).unwrap()
    }

    #[test]
    fn health_check_threshold() {
        let mut s = fresh(&[]);
        s.sim_time = 10.0;
        assert!(health_check(&s, &battery(8.0), &cfg()));
        assert!(!health_check(&s, &battery(6.0), &cfg()));
        let lax = AdmConfig { health_min_battery_v: 0.0, ..cfg() };
        assert!(health_check(&s, &battery(0.0), &lax));
    }

    #[test]
    fn knife_sets_alternate() {
        let mut s = fresh(&[]);
        let first = s.start_burn(&cfg(), 0.0).unwrap();
        assert_eq!(first.knife_set, 0);
        assert_eq!(s.phase, Phase::Burning(0));
        assert_eq!(s.start_burn(&cfg(), 1.0), Err(ProtocolError::BurnWhileBurning { active: 0 }));
        s.end_burn(1.0).unwrap();
        s.evaluate_switches(&cfg(), 1.0).unwrap();
        let second = s.start_burn(&cfg(), 100.0).unwrap();
        assert_eq!(second.knife_set, 1);
        assert_eq!(second.attempt, 2);
        assert_eq!(s.attempt_count, 2);
        assert_eq!(second.cancelled, vec![TimerId::RetryPartial]);
    }

    #[test]
    fn open_resistor_starves_its_lines() {
        let mut s = fresh(&["resistor-open:0:0"]);
        let plan = s.start_burn(&cfg(), 0.0).unwrap();
        let cut: Vec<usize> = plan.cuts.iter().map(|c| c.0).collect();
        assert_eq!(cut, vec![2, 3]);
        let eval = complete_burn(&mut s, &plan);
        assert_eq!(eval.phase, Phase::Partial);
        assert_eq!(s.temps_at(30.0)[0], 20.0);

        let retry = s.start_burn(&cfg(), 930.0).unwrap();
        assert_eq!(retry.knife_set, 1);
        let cut: Vec<usize> = retry.cuts.iter().map(|c| c.0).collect();
        assert_eq!(cut, vec![0, 1]);
    }

    #[test]
    fn resistor_failing_mid_burn_stops_heating() {
        // set 0 resistor 0 opens 2 s in; lines 0 and 1 stall below the melt point
        let mut s = fresh(&["resistor-open:0:0@2"]);
        let plan = s.start_burn(&cfg(), 0.0).unwrap();
        let cut: Vec<usize> = plan.cuts.iter().map(|c| c.0).collect();
        assert_eq!(cut, vec![2, 3]);
        let temps = s.temps_at(2.0);
        assert!(temps[0] > 60.0 && temps[0] < 145.0, "{temps:?}");
        let later = s.temps_at(10.0);
        assert!(later[0] < temps[0], "cooling after the fault: {later:?}");
    }

    #[test]
    fn precut_lines_end_burn_immediately() {
        let mut s = fresh(&[]);
        for i in 0..4 {
            s.cut_line(i, 0.0);
        }
        let plan = s.start_burn(&cfg(), 5.0).unwrap();
        assert!(plan.cuts.is_empty());
        assert_eq!(plan.deadline, 5.0);
    }

    #[test]
    fn switch_evaluation() {
        let c = cfg();
        for (open, phase, timer, period) in [
            (4, Phase::DeployedUnconfirmed, TimerId::ReattemptFull, 21_600.0),
            (3, Phase::Partial, TimerId::RetryPartial, 900.0),
            (0, Phase::Partial, TimerId::RetryPartial, 900.0),
        ] {
            let mut s = fresh(&[]);
            for d in 0..open {
                s.cut_line(d, 0.0);
            }
            s.phase = Phase::Evaluate;
            let out = s.evaluate_switches(&c, 10.0).unwrap();
            assert_eq!(out.phase, phase);
            assert_eq!(out.switches_open, open);
            assert_eq!(out.armed, timer);
            assert_eq!(s.timers[&timer].deadline, 10.0 + period);
        }
        let mut s = fresh(&[]);
        assert_eq!(s.evaluate_switches(&c, 0.0), Err(ProtocolError::NotEvaluating));
    }

    #[test]
    fn stuck_switches_override_doors() {
        let mut s = fresh(&["switch-stuck-closed:1", "switch-stuck-open:3"]);
        for d in 0..4 {
            s.cut_line(d, 0.0);
        }
        assert_eq!(s.doors_open, vec![true; 4]);
        assert_eq!(s.switches_open, vec![true, false, true, true]);

        let mut stuck = fresh(&["door-stuck:2"]);
        assert_eq!(stuck.cut_line(2, 0.0), Some(false));
        assert!(stuck.lines[2].cut);
        assert!(!stuck.doors_open[2]);
        assert_eq!(stuck.cut_line(2, 1.0), None);
    }

    #[test]
    fn telecommands() {
        let c = cfg();
        let mut s = fresh(&[]);
        s.phase = Phase::DeployedUnconfirmed;
        s.arm_timer(TimerId::ReattemptFull, 100.0);
        assert_eq!(
            s.handle_tc(TcKind::Confirm, &c, 50.0),
            TcOutcome::Confirmed { cancelled: vec![TimerId::ReattemptFull] }
        );
        assert_eq!(s.phase, Phase::DeployedConfirmed);
        assert!(s.timers.is_empty());
        assert!(matches!(s.handle_tc(TcKind::Confirm, &c, 60.0), TcOutcome::Ignored { .. }));

        let mut p = fresh(&[]);
        p.phase = Phase::Partial;
        p.arm_timer(TimerId::RetryPartial, 900.0);
        assert_eq!(p.handle_tc(TcKind::Confirm, &c, 100.0), TcOutcome::ForcedArmed { deadline: 86_500.0 });
        assert!(p.forced_timer_armed);
        assert_eq!(p.handle_tc(TcKind::Confirm, &c, 200.0), TcOutcome::ForcedAlreadyArmed);
        assert_eq!(p.handle_tc(TcKind::OverrideForcedTimer, &c, 300.0), TcOutcome::ForcedCancelled);
        assert!(!p.forced_timer_armed);
        assert!(p.timers.contains_key(&TimerId::RetryPartial));
        assert!(matches!(p.handle_tc(TcKind::OverrideForcedTimer, &c, 400.0), TcOutcome::Ignored { .. }));
    }

    #[test]
    fn retry_timer_checks_health() {
        let c = cfg();
        let mut s = fresh(&[]);
        s.phase = Phase::Partial;
        s.next_knife_set = 1;
        s.arm_timer(TimerId::RetryPartial, 930.0);
        match s.on_timer(TimerId::RetryPartial, &battery(8.2), &c, 930.0).unwrap() {
            TimerOutcome::Burn { health_checked, plan } => {
                assert!(health_checked);
                assert_eq!(plan.knife_set, 1);
            }
            other => panic!("expected burn, got {other:?}"),
        }

        let mut low = fresh(&[]);
        low.phase = Phase::Partial;
        low.arm_timer(TimerId::RetryPartial, 930.0);
        assert_eq!(
            low.on_timer(TimerId::RetryPartial, &battery(6.0), &c, 930.0).unwrap(),
            TimerOutcome::HealthFailed { rearmed_at: 1830.0 }
        );
        assert_eq!(low.phase, Phase::Partial);
        assert_eq!(low.attempt_count, 0);
        assert_eq!(low.timers[&TimerId::RetryPartial].deadline, 1830.0);
    }

    #[test]
    fn forced_timer_bypasses_health() {
        let c = cfg();
        let mut s = fresh(&[]);
        s.phase = Phase::Partial;
        s.arm_timer(TimerId::ForcedBurn, 86_400.0);
        match s.on_timer(TimerId::ForcedBurn, &battery(5.0), &c, 86_400.0).unwrap() {
            TimerOutcome::Burn { health_checked, .. } => assert!(!health_checked),
            other => panic!("expected burn, got {other:?}"),
        }
        assert!(!s.forced_timer_armed);
        assert_eq!(s.on_timer(TimerId::ForcedBurn, &battery(5.0), &c, 86_401.0).unwrap(), TimerOutcome::Absorbed);
    }

    #[test]
    fn timers_order_by_deadline_then_arming() {
        let mut s = fresh(&[]);
        s.arm_timer(TimerId::ForcedBurn, 100.0);
        s.arm_timer(TimerId::RetryPartial, 100.0);
        s.arm_timer(TimerId::ReattemptFull, 50.0);
        assert_eq!(s.next_timer().unwrap().0, TimerId::ReattemptFull);
        s.cancel_timer(TimerId::ReattemptFull);
        assert_eq!(s.next_timer().unwrap().0, TimerId::ForcedBurn);
    }
}
