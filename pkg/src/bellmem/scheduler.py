"""Trial timing and the conditional memory-start control logic.

The experiment cycle: the trap field is switched off each cycle, the
sequence waits for the field to decay, then runs write/read trials back
to back inside the usable window.  A heralding detection latches the
sequence -- all pulses stop for the programmable storage time tau --
after which exactly one read pulse fires and trials resume until the
window budget is exhausted.

Two equivalent drivers are provided: an explicit event-driven state
machine (`step`, the reference semantics, used by the unit tests) and a
vectorized per-window planner (`plan_window`) used by `run_schedule`
and the Monte Carlo simulator for speed.  A test pins them against each
other.
"""

from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np


class Phase(Enum):
    MOT_ON = "mot_on"
    MOT_OFF_WAIT = "mot_off_wait"
    REPUMP = "repump"
    WRITE_PULSE = "write_pulse"
    AWAIT_HERALD = "await_herald"
    LATCHED = "latched"
    READ_PULSE = "read_pulse"
    INTER_TRIAL = "inter_trial"


class Action(IntEnum):
    MOT_OFF = 0
    MOT_ON = 1
    REPUMP = 2
    WRITE = 3
    READ = 4
    LATCH_START = 5
    LATCH_END = 6

    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class TimingConfig:
    """All trial/window timing parameters.  Durations in their natural units."""

    mot_rate_hz: float = 40.0
    mot_off_window_ms: float = 6.0
    field_decay_wait_ms: float = 3.8
    trials_per_window: int = 1100
    trial_period_us: float = 2.0
    write_read_delay_ns: float = 400.0
    pulse_duration_ns: float = 30.0
    repump_duration_us: float = 1.0
    tau_us: float = 0.4
    tau_max_us: float = 40.0

    def __post_init__(self):
        if self.mot_rate_hz <= 0:
            raise ValueError("mot_rate must be > 0")
        for name in ("mot_off_window_ms", "field_decay_wait_ms", "trial_period_us",
                     "write_read_delay_ns", "pulse_duration_ns", "tau_max_us"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.repump_duration_us < 0 or self.tau_us < 0:
            raise ValueError("repump_duration and tau must be >= 0")
        if self.trials_per_window < 1:
            raise ValueError("trials_per_window must be >= 1")
        if self.tau_us > self.tau_max_us:
            raise ValueError(f"tau={self.tau_us} us exceeds tau_max={self.tau_max_us} us")
        if self.field_decay_wait_ms >= self.mot_off_window_ms:
            raise ValueError("field_decay_wait must be shorter than the off window")
        if self.mot_off_window_ms * 1e-3 > 1.0 / self.mot_rate_hz:
            raise ValueError("mot_off_window longer than the trap cycle period")
        budget_ms = self.mot_off_window_ms - self.field_decay_wait_ms
        if self.trials_per_window * self.trial_period_us * 1e-3 > budget_ms + 1e-12:
            raise ValueError(
                f"{self.trials_per_window} trials of {self.trial_period_us} us "
                f"do not fit in the {budget_ms} ms usable window")
        intra_us = (self.repump_duration_us
                    + (self.write_read_delay_ns + self.pulse_duration_ns) * 1e-3)
        if intra_us > self.trial_period_us:
            raise ValueError("repump + write/read delay + pulse exceed the trial period")

    # integer-ns views (1 ns clock granularity)
    @property
    def cycle_ns(self) -> int:
        return round(1e9 / self.mot_rate_hz)

    @property
    def window_ns(self) -> int:
        return round(self.mot_off_window_ms * 1e6)

    @property
    def wait_ns(self) -> int:
        return round(self.field_decay_wait_ms * 1e6)

    @property
    def period_ns(self) -> int:
        return round(self.trial_period_us * 1e3)

    @property
    def repump_ns(self) -> int:
        return round(self.repump_duration_us * 1e3)

    @property
    def wrd_ns(self) -> int:
        return round(self.write_read_delay_ns)

    @property
    def pulse_ns(self) -> int:
        return round(self.pulse_duration_ns)

    @property
    def tau_ns(self) -> int:
        return round(self.tau_us * 1e3)


@dataclass
class SchedulerState:
    """Mutable state of the event-driven machine."""

    phase: Phase = Phase.MOT_ON
    clock_ns: int = 0
    trial_index: int = -1
    window_index: int = -1
    trial_start_ns: int = 0
    write_ns: int = 0
    latch_end_ns: int = 0
    heralded: bool = False
    trials_in_window: int = 0
    out_of_window_heralds: int = 0


def _window_edges(config: TimingConfig, window_index: int) -> tuple[int, int, int]:
    start = window_index * config.cycle_ns
    return start, start + config.wait_ns, start + config.window_ns


def _can_start_trial(config: TimingConfig, state: SchedulerState, at_ns: int) -> bool:
    _, _, usable_end = _window_edges(config, state.window_index)
    if state.trials_in_window >= config.trials_per_window:
        return False
    # worst case: this trial heralds and pays the full latch
    return at_ns + config.period_ns + config.tau_ns <= usable_end


def next_tick(config: TimingConfig, state: SchedulerState) -> int:
    """Clock of the next scheduled transition for the current phase."""
    c = config
    if state.phase is Phase.MOT_ON:
        return (state.window_index + 1) * c.cycle_ns
    if state.phase is Phase.MOT_OFF_WAIT:
        return _window_edges(c, state.window_index)[1]
    if state.phase is Phase.REPUMP:
        return state.trial_start_ns + c.repump_ns
    if state.phase is Phase.WRITE_PULSE:
        return state.write_ns + c.pulse_ns
    if state.phase is Phase.AWAIT_HERALD:
        return state.write_ns + c.wrd_ns
    if state.phase is Phase.LATCHED:
        return state.latch_end_ns
    if state.phase is Phase.READ_PULSE:
        return state.clock_ns + c.pulse_ns
    # INTER_TRIAL ends when the trial wall time is used up
    extent = c.period_ns + (c.tau_ns if state.heralded else 0)
    return state.trial_start_ns + extent


def _begin_trial(config: TimingConfig, state: SchedulerState, at_ns: int) -> list:
    state.trial_index += 1
    state.trials_in_window += 1
    state.trial_start_ns = at_ns
    state.heralded = False
    state.write_ns = at_ns + config.repump_ns
    if config.repump_ns > 0:
        state.phase = Phase.REPUMP
        state.clock_ns = at_ns
        return [(at_ns, Action.REPUMP, state.trial_index)]
    state.phase = Phase.WRITE_PULSE
    state.clock_ns = at_ns
    return [(state.write_ns, Action.WRITE, state.trial_index)]


def step(config: TimingConfig, state: SchedulerState, event) -> tuple[SchedulerState, list]:
    """Advance the machine by one event.

    ``event`` is ``("tick", t_ns)`` for the scheduled transition at
    ``next_tick`` or ``("herald", t_ns)`` for a field-1 detection.
    Returns the state and the emitted ``(clock_ns, Action, trial_index)``
    records.  Heralds outside AWAIT_HERALD are counted and ignored.
    """
    kind, t = event
    if t < state.clock_ns:
        raise ValueError(f"event at {t} ns precedes the clock at {state.clock_ns} ns")

    if kind == "herald":
        if state.phase is not Phase.AWAIT_HERALD:
            state.out_of_window_heralds += 1
            return state, []
        state.heralded = True
        state.clock_ns = t
        if config.tau_ns == 0:
            # degenerate latch: read immediately, no latch records
            state.phase = Phase.READ_PULSE
            return state, [(t, Action.READ, state.trial_index)]
        state.phase = Phase.LATCHED
        state.latch_end_ns = t + config.tau_ns
        return state, [(t, Action.LATCH_START, state.trial_index)]

    if kind != "tick":
        raise ValueError(f"unknown event kind {kind!r}")
    state.clock_ns = t
    actions: list = []

    if state.phase is Phase.MOT_ON:
        state.window_index += 1
        state.trials_in_window = 0
        start, _, _ = _window_edges(config, state.window_index)
        state.phase = Phase.MOT_OFF_WAIT
        return state, [(start, Action.MOT_OFF, state.trial_index)]

    if state.phase is Phase.MOT_OFF_WAIT:
        return state, _begin_trial(config, state, t)

    if state.phase is Phase.REPUMP:
        state.phase = Phase.WRITE_PULSE
        return state, [(state.write_ns, Action.WRITE, state.trial_index)]

    if state.phase is Phase.WRITE_PULSE:
        state.phase = Phase.AWAIT_HERALD
        return state, []

    if state.phase is Phase.AWAIT_HERALD:
        # no herald arrived: unconditional read
        state.phase = Phase.READ_PULSE
        return state, [(state.write_ns + config.wrd_ns, Action.READ, state.trial_index)]

    if state.phase is Phase.LATCHED:
        state.phase = Phase.READ_PULSE
        return state, [(t, Action.LATCH_END, state.trial_index),
                       (t, Action.READ, state.trial_index)]

    if state.phase is Phase.READ_PULSE:
        state.phase = Phase.INTER_TRIAL
        return state, []

    # INTER_TRIAL: start the next trial or give the window back to the trap
    if _can_start_trial(config, state, t):
        return state, _begin_trial(config, state, t)
    _, _, usable_end = _window_edges(config, state.window_index)
    state.phase = Phase.MOT_ON
    return state, [(usable_end, Action.MOT_ON, state.trial_index)]


def run_fsm(config: TimingConfig, heralds, n_windows: int = 1):
    """Drive the state machine over n windows.

    ``heralds`` is a boolean sequence consumed one entry per executed
    trial (True: a detection arrives at the end of the write pulse).
    Returns the list of (clock_ns, Action, trial_index) records.
    """
    state = SchedulerState()
    records: list = []
    consumed = 0
    while state.window_index < n_windows:
        t = next_tick(config, state)
        if state.phase is Phase.AWAIT_HERALD:
            if consumed < len(heralds) and heralds[consumed]:
                herald_t = state.write_ns + config.pulse_ns
                consumed += 1
                _, acts = step(config, state, ("herald", herald_t))
                records.extend(acts)
                continue
            consumed += 1
        if state.phase is Phase.MOT_ON and state.window_index == n_windows - 1:
            break
        _, acts = step(config, state, ("tick", t))
        records.extend(acts)
    return records


def plan_window(config: TimingConfig, heralds: np.ndarray) -> dict:
    """Vectorized trial plan for one window.

    ``heralds[i]`` says whether trial i (if executed) detects a herald.
    Returns integer-ns arrays for the executed trials.  A trial is
    started only when even a latched completion still fits in the
    usable window, so every herald gets exactly one read.
    """
    heralds = np.asarray(heralds, dtype=bool)
    n_offered = min(len(heralds), config.trials_per_window)
    heralds = heralds[:n_offered]
    durations = config.period_ns + np.where(heralds, config.tau_ns, 0)
    starts = np.concatenate(([0], np.cumsum(durations)[:-1]))
    budget = config.window_ns - config.wait_ns - config.period_ns - config.tau_ns
    n_exec = int(np.searchsorted(starts, budget, side="right"))
    heralds = heralds[:n_exec]
    starts = starts[:n_exec] + config.wait_ns  # relative to window start
    write = starts + config.repump_ns
    herald_t = write + config.pulse_ns
    read = np.where(heralds, herald_t + config.tau_ns, write + config.wrd_ns)
    end = starts + config.period_ns + np.where(heralds, config.tau_ns, 0)
    return {
        "n_executed": n_exec,
        "heralded": heralds,
        "start_ns": starts,
        "write_ns": write,
        "herald_ns": herald_t,
        "read_ns": read,
        "end_ns": end,
    }


@dataclass
class ScheduleTrace:
    """Flat record of every emitted action over a run."""

    times_ns: np.ndarray
    actions: np.ndarray
    trial_index: np.ndarray
    n_trials: int
    success_count: int
    latch_starts_ns: np.ndarray
    latch_ends_ns: np.ndarray
    trial_time_ns: int
    out_of_window_heralds: int = 0

    def mean_time_per_success_us(self) -> float:
        if self.success_count == 0:
            raise ZeroDivisionError("no successes in trace")
        return self.trial_time_ns / self.success_count / 1e3

    def to_text(self) -> str:
        lines = [
            f"{t} {Action(a).label()} {i}"
            for t, a, i in zip(self.times_ns, self.actions, self.trial_index)
        ]
        return "\n".join(lines) + "\n"


def run_schedule(config: TimingConfig, p1: float, seed: int,
                 n_windows: int = 1) -> ScheduleTrace:
    """Run n windows with Bernoulli(p1) herald outcomes per trial.

    Reproducible: window w draws from a generator seeded by
    SeedSequence(seed, spawn_key=(w,)).
    """
    if not 0.0 <= p1 <= 1.0:
        raise ValueError(f"herald probability {p1} outside [0, 1]")
    if n_windows < 1:
        raise ValueError("n_windows must be >= 1")

    times, acts, trials = [], [], []
    latch_s, latch_e = [], []
    n_trials = successes = 0
    trial_time = 0
    next_index = 0
    for w in range(n_windows):
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(entropy=seed, spawn_key=(w,))))
        heralds = rng.random(config.trials_per_window) < p1
        plan = plan_window(config, heralds)
        w_start = w * config.cycle_ns
        n = plan["n_executed"]
        idx = np.arange(next_index, next_index + n)
        next_index += n

        times.append([w_start]); acts.append([Action.MOT_OFF]); trials.append([idx[0] - 1 if n else next_index - 1])
        if config.repump_ns > 0:
            times.append(w_start + plan["start_ns"]); acts.append(np.full(n, Action.REPUMP)); trials.append(idx)
        times.append(w_start + plan["write_ns"]); acts.append(np.full(n, Action.WRITE)); trials.append(idx)
        h = plan["heralded"]
        if config.tau_ns > 0 and h.any():
            times.append(w_start + plan["herald_ns"][h]); acts.append(np.full(h.sum(), Action.LATCH_START)); trials.append(idx[h])
            times.append(w_start + plan["read_ns"][h]); acts.append(np.full(h.sum(), Action.LATCH_END)); trials.append(idx[h])
        times.append(w_start + plan["read_ns"]); acts.append(np.full(n, Action.READ)); trials.append(idx)
        times.append([w_start + config.window_ns]); acts.append([Action.MOT_ON]); trials.append([idx[-1] if n else next_index - 1])

        latch_s.append(w_start + plan["herald_ns"][h])
        latch_e.append(w_start + plan["read_ns"][h])
        n_trials += n
        successes += int(h.sum())
        trial_time += int((plan["end_ns"] - plan["start_ns"]).sum())

    times = np.concatenate([np.asarray(x, dtype=np.int64) for x in times])
    acts = np.concatenate([np.asarray(x, dtype=np.int8) for x in acts])
    trials = np.concatenate([np.asarray(x, dtype=np.int64) for x in trials])
    # stable sort by time, ties broken by emission order within a trial
    order = np.lexsort((np.arange(len(times)), acts == Action.READ, times))
    order = np.lexsort((order, times[order]))  # keep time primary
    times, acts, trials = times[order], acts[order], trials[order]
    return ScheduleTrace(
        times_ns=times, actions=acts, trial_index=trials,
        n_trials=n_trials, success_count=successes,
        latch_starts_ns=np.concatenate(latch_s) if latch_s else np.empty(0, np.int64),
        latch_ends_ns=np.concatenate(latch_e) if latch_e else np.empty(0, np.int64),
        trial_time_ns=trial_time,
    )


def rate_gain(p1: float, trial_period_us: float, tau_max_us: float,
              tau_us: float = 0.0) -> float:
    """Repetition-rate gain of conditional gating over padded cycling.

    Unconditional operation pads every trial to tau_max; conditional
    operation pays the storage pause only on success:
    gain = (tau_max / p1) / (trial_period / p1 + tau).
    """
    if not 0.0 < p1 <= 1.0:
        raise ValueError(f"herald probability {p1} outside (0, 1]")
    if trial_period_us <= 0 or tau_max_us <= 0 or tau_us < 0:
        raise ValueError("periods must be positive and tau >= 0")
    return tau_max_us / (trial_period_us + p1 * tau_us)
