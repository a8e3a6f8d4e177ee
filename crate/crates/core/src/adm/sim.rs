//! Event loop composing the protocol operations into a full run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::queue::EventQueue;
use super::scenario::{FaultKind, JitterSpec, Scenario, TcEvent};
use super::state::{AdmState, BurnEndReason, BurnPlan, Phase, TcOutcome, TimerId, TimerOutcome};
use super::thermal::MeltLine;
use super::trace::{EventKind, EventTrace, TraceRecord};
use super::AdmConfig;
use crate::error::DomainError;

/// Lower bound on a jittered parameter, as a fraction of its nominal value.
const MIN_JITTER_FACTOR: f64 = 0.05;

#[derive(Debug, Clone)]
enum SimEvent {
    Initiate,
    FaultActivated(usize),
    Tc(TcEvent),
    LineCut { line: usize, attempt: u32 },
    BurnEnd { attempt: u32 },
}

/// Outcome of a run, as written to the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub final_phase: Phase,
    pub end_time_s: f64,
    pub attempts: u32,
    pub doors_open: usize,
    pub lines_cut: usize,
    pub switches_open: usize,
    /// Absolute cut time per line, `null` if never cut.
    pub cut_times_s: Vec<Option<f64>>,
    /// Knife set used by each attempt, in order.
    pub knife_sets_used: Vec<usize>,
    pub confirmed_at_s: Option<f64>,
}

impl RunSummary {
    pub fn fully_deployed(&self) -> bool {
        self.doors_open == self.cut_times_s.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRun {
    pub summary: RunSummary,
    pub trace: EventTrace,
}

/// Per-line thermal parameters, jittered from the config with the
/// scenario's seed. Draw order is fixed: for each line, conductance, heat
/// capacity, melt temperature.
pub(crate) fn build_lines(cfg: &AdmConfig, scenario: &Scenario) -> Vec<MeltLine> {
    let mut lines: Vec<MeltLine> = (0..cfg.n_doors).map(|i| MeltLine::new(i, cfg, scenario.ambient)).collect();
    let JitterSpec { conductance, heat_capacity, melt_temp } = scenario.jitter;
    if scenario.jitter.is_zero() {
        return lines;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.rng_seed);
    let mut factor = |sigma: f64| {
        let z: f64 = StandardNormal.sample(&mut rng);
        (1.0 + sigma * z).max(MIN_JITTER_FACTOR)
    };
    for line in &mut lines {
        line.thermal.conductance_w_per_k *= factor(conductance);
        line.thermal.heat_capacity_j_per_k *= factor(heat_capacity);
        line.thermal.melt_temp_c *= factor(melt_temp);
    }
    lines
}

struct Sim<'a> {
    cfg: &'a AdmConfig,
    scenario: &'a Scenario,
    state: AdmState,
    queue: EventQueue<SimEvent>,
    trace: EventTrace,
    cut_times: Vec<Option<f64>>,
    knife_sets_used: Vec<usize>,
    confirmed_at: Option<f64>,
    tracing: bool,
}

impl<'a> Sim<'a> {
    fn record(&mut self, t: f64, event: EventKind, note: impl Into<String>) {
        if !self.tracing {
            return;
        }
        let phase = self.state.phase;
        let knife_set = match phase {
            Phase::Burning(k) => Some(k),
            _ => None,
        };
        self.trace.push(TraceRecord {
            time_s: t,
            phase,
            event,
            knife_set,
            line_temps: self.state.temps_at(t),
            switches: self.state.switches_open.clone(),
            note: note.into(),
        });
    }

    fn push(&mut self, t: f64, ev: SimEvent) {
        let seq = self.state.next_seq();
        self.queue.push(t, seq, ev);
    }

    fn begin_burn(&mut self, t: f64, plan: BurnPlan) {
        for id in &plan.cancelled {
            self.record(t, EventKind::TimerCancelled, id.as_str());
        }
        self.knife_sets_used.push(plan.knife_set);
        self.record(t, EventKind::BurnStart, format!("attempt {}", plan.attempt));
        for (line, at) in &plan.cuts {
            self.push(*at, SimEvent::LineCut { line: *line, attempt: plan.attempt });
        }
        self.push(plan.deadline, SimEvent::BurnEnd { attempt: plan.attempt });
    }

    fn apply_timer_outcome(&mut self, t: f64, outcome: TimerOutcome, timer: TimerId) {
        match outcome {
            TimerOutcome::Burn { health_checked, plan } => {
                if health_checked {
                    self.record_in(t, Phase::HealthCheck, EventKind::HealthCheckPass, self.battery_note(t));
                }
                self.begin_burn(t, plan);
            }
            TimerOutcome::HealthFailed { rearmed_at } => {
                self.record_in(t, Phase::HealthCheck, EventKind::HealthCheckFail, self.battery_note(t));
                self.record(t, EventKind::TimerArmed, format!("{} @ {}", timer, rearmed_at));
            }
            TimerOutcome::Absorbed => {}
        }
    }

    fn record_in(&mut self, t: f64, phase: Phase, event: EventKind, note: String) {
        let saved = self.state.phase;
        self.state.phase = phase;
        self.record(t, event, note);
        self.state.phase = saved;
    }

    fn battery_note(&self, t: f64) -> String {
        format!("battery {:.2} V", self.scenario.battery_at(t))
    }

    fn finish_burn(&mut self, t: f64, reason: BurnEndReason) {
        let Some(plan) = self.state.end_burn(t) else { return };
        let why = match reason {
            BurnEndReason::AllLinesCut => "all lines cut",
            BurnEndReason::BurnMax => "burn_max reached",
        };
        self.record(t, EventKind::BurnEnd, format!("knife set {}: {why}", plan.knife_set));
        let eval =
            self.state.evaluate_switches(self.cfg, t).expect("burn end always leaves the controller in Evaluate");
        let n = self.state.switches_open.len();
        self.record(t, EventKind::SwitchesEvaluated, format!("{}/{} switches open", eval.switches_open, n));
        self.record(t, EventKind::TimerArmed, format!("{} @ {}", eval.armed, eval.deadline));
    }

    fn after_cut(&mut self, t: f64) {
        if self.state.active_burn().is_some() && self.state.all_lines_cut() {
            self.finish_burn(t, BurnEndReason::AllLinesCut);
        }
    }

    fn dispatch(&mut self, t: f64, ev: SimEvent) {
        match ev {
            SimEvent::Initiate => {
                let outcome = self.state.initiate(self.scenario, self.cfg, t).expect("no burn is active at start");
                self.apply_timer_outcome(t, outcome, TimerId::RetryPartial);
            }
            SimEvent::FaultActivated(i) => {
                let fault = self.scenario.faults[i];
                self.state.refresh_switches(t);
                self.record(t, EventKind::FaultActive, fault.to_string());
                if let FaultKind::LinePreCut { line } = fault.kind {
                    if let Some(opened) = self.state.cut_line(line, t) {
                        self.cut_times[line] = Some(t);
                        let door = if opened { "door opened" } else { "door stuck" };
                        self.record(t, EventKind::LinePrecut, format!("line {line}, {door}"));
                        self.after_cut(t);
                    }
                }
            }
            SimEvent::Tc(tc) => {
                self.record(t, EventKind::TcReceived, tc.kind.to_string());
                match self.state.handle_tc(tc.kind, self.cfg, t) {
                    TcOutcome::Confirmed { cancelled } => {
                        for id in cancelled {
                            self.record(t, EventKind::TimerCancelled, id.as_str());
                        }
                        self.confirmed_at = Some(t);
                        self.record(t, EventKind::DeployedConfirmed, "");
                    }
                    TcOutcome::ForcedArmed { deadline } => {
                        self.record(t, EventKind::TimerArmed, format!("{} @ {}", TimerId::ForcedBurn, deadline));
                    }
                    TcOutcome::ForcedAlreadyArmed => {
                        self.record(t, EventKind::TcIgnored, "forced timer already armed");
                    }
                    TcOutcome::ForcedCancelled => {
                        self.record(t, EventKind::TimerCancelled, TimerId::ForcedBurn.as_str());
                    }
                    TcOutcome::Ignored { reason } => {
                        self.record(t, EventKind::TcIgnored, reason);
                    }
                }
            }
            SimEvent::LineCut { line, attempt } => {
                let current = self.state.active_burn().map(|p| p.attempt);
                if current != Some(attempt) {
                    return;
                }
                if let Some(opened) = self.state.cut_line(line, t) {
                    self.cut_times[line] = Some(t);
                    let door = if opened { "door opened" } else { "door stuck" };
                    self.record(t, EventKind::LineCut, format!("line {line}, {door}"));
                    self.after_cut(t);
                }
            }
            SimEvent::BurnEnd { attempt } => {
                if self.state.active_burn().map(|p| p.attempt) == Some(attempt) {
                    let reason =
                        if self.state.all_lines_cut() { BurnEndReason::AllLinesCut } else { BurnEndReason::BurnMax };
                    self.finish_burn(t, reason);
                }
            }
        }
    }

    fn on_timer(&mut self, t: f64, id: TimerId) {
        let absorbed = id == TimerId::ForcedBurn && self.state.active_burn().is_some();
        let note = if absorbed { format!("{id} absorbed by active burn") } else { id.to_string() };
        self.record(t, EventKind::TimerExpired, note);
        let outcome =
            self.state.on_timer(id, self.scenario, self.cfg, t).expect("retry timers are cancelled while burning");
        self.apply_timer_outcome(t, outcome, id);
    }

    fn run(mut self) -> SimRun {
        let horizon = self.scenario.horizon.as_secs();
        self.record(0.0, EventKind::Start, format!("ambient {:.1} °C", self.scenario.ambient.0));
        for (i, f) in self.scenario.faults.iter().enumerate() {
            let at = f.active_from.as_secs();
            let seq = self.state.next_seq();
            self.queue.push(at, seq, SimEvent::FaultActivated(i));
        }
        self.push(0.0, SimEvent::Initiate);
        for tc in &self.scenario.tc_schedule {
            let seq = self.state.next_seq();
            self.queue.push(tc.at.as_secs(), seq, SimEvent::Tc(*tc));
        }

        loop {
            let next_event = self.queue.peek_key();
            let next_timer = self.state.next_timer();
            let take_timer = match (next_event, next_timer) {
                (None, None) => break,
                (Some(_), None) => false,
                (None, Some(_)) => true,
                (Some((te, se)), Some((_, timer))) => (timer.deadline, timer.seq) < (te, se),
            };
            let t = if take_timer {
                next_timer.expect("checked above").1.deadline
            } else {
                next_event.expect("checked above").0
            };
            if t > horizon {
                break;
            }
            if take_timer {
                let (id, _) = next_timer.expect("checked above");
                self.on_timer(t, id);
            } else {
                let (t, ev) = self.queue.pop().expect("peeked");
                self.dispatch(t, ev);
            }
            if self.state.phase == Phase::DeployedConfirmed {
                break;
            }
        }

        let end = if self.state.phase == Phase::DeployedConfirmed {
            self.confirmed_at.unwrap_or(horizon)
        } else {
            self.record(horizon, EventKind::Horizon, format!("final phase {}", self.state.phase));
            horizon
        };

        let summary = RunSummary {
            final_phase: self.state.phase,
            end_time_s: end,
            attempts: self.state.attempt_count,
            doors_open: self.state.doors_open_count(),
            lines_cut: self.state.lines.iter().filter(|l| l.cut).count(),
            switches_open: self.state.switches_open.iter().filter(|s| **s).count(),
            cut_times_s: self.cut_times,
            knife_sets_used: self.knife_sets_used,
            confirmed_at_s: self.confirmed_at,
        };
        SimRun { summary, trace: self.trace }
    }
}

/// Runs one scenario to confirmation or horizon. Identical inputs give
/// bit-identical output.
pub fn run_scenario(scenario: &Scenario, cfg: &AdmConfig) -> Result<SimRun, DomainError> {
    simulate(scenario, cfg, true)
}

/// Same run without building the trace; used by the Monte Carlo driver.
pub(crate) fn run_summary_only(scenario: &Scenario, cfg: &AdmConfig) -> Result<RunSummary, DomainError> {
    simulate(scenario, cfg, false).map(|r| r.summary)
}

fn simulate(scenario: &Scenario, cfg: &AdmConfig, tracing: bool) -> Result<SimRun, DomainError> {
    cfg.validate()?;
    scenario.validate(cfg)?;
    let lines = build_lines(cfg, scenario);
    let state = AdmState::with_lines(lines, scenario.ambient, scenario.faults.clone());
    let sim = Sim {
        cfg,
        scenario,
        state,
        queue: EventQueue::new(),
        trace: EventTrace::new(cfg.n_doors),
        cut_times: vec![None; cfg.n_doors],
        knife_sets_used: Vec::new(),
        confirmed_at: None,
        tracing,
    };
    Ok(sim.run())
}
