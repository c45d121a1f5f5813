"""Receding-horizon excitation design with a simulated-annealing inner solver.

Each outer step ``k`` optimizes ``L`` future inputs against the criterion on
the surrogate's predicted distribution, applies only the first one, and
shifts the horizon.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import ConfigError, ExcitationSignal, normalize_point, seeded_rng
from .criterion import _metric_code
from .plant import PlantDivergenceError
from .surrogate import IoRecord, refit, simulate_outputs

log = logging.getLogger(__name__)

MODES = ("fixed-surrogate", "active-learning")

# sub-stream keys under the master seed
_CALIBRATION_STREAM = 0
_STEP_STREAM = 1


class DesignError(RuntimeError):
    """Design run aborted; carries the partial signal and trace."""

    def __init__(self, message, signal=None, trace=None, diagnostics=None):
        super().__init__(message)
        self.signal = signal
        self.trace = trace or []
        self.diagnostics = diagnostics or {}


class DesignInfeasibleError(DesignError):
    pass


class DesignAbortedError(DesignError):
    pass


@dataclass(frozen=True)
class SaConfig:
    initial_temperature: float = None  # None: calibrate from random candidates
    cooling_factor: float = 0.9
    iterations_per_temperature: int = 25
    temperature_levels: int = 30
    step_scale: float = 0.15
    restart_count: int = 2
    warm_start: bool = True
    calibration_samples: int = 50

    def __post_init__(self):
        t = self.initial_temperature
        if t is not None and not (np.isfinite(t) and t > 0):
            raise ConfigError("initial_temperature must be > 0")
        if not 0 < self.cooling_factor < 1:
            raise ConfigError("cooling_factor must lie in (0, 1)")
        if self.iterations_per_temperature < 1 or self.temperature_levels < 1:
            raise ConfigError("iterations_per_temperature and temperature_levels must be >= 1")
        if not (np.isfinite(self.step_scale) and self.step_scale > 0):
            raise ConfigError("step_scale must be > 0")
        if self.restart_count < 0:
            raise ConfigError("restart_count must be >= 0")
        if self.calibration_samples < 2:
            raise ConfigError("calibration_samples must be >= 2")


@dataclass
class HorizonSolution:
    inputs: np.ndarray
    achieved_j: float
    feasible: bool
    accepted: int = 0
    rejected: int = 0
    history: list = field(default_factory=list, repr=False)


@dataclass
class StepRecord:
    k: int
    J_before: float
    J_after: float
    accepted: int
    rejected: int
    a: float
    b: float
    refit: str = ""


@dataclass
class DesignResult:
    signal: ExcitationSignal
    distribution: np.ndarray  # committed surrogate points z(0..N)
    trace: list
    surrogate: object
    temperature: float
    io_record: IoRecord = None


class DesignState:
    """Snapshot of a design run at step ``k``: past inputs, surrogate and criterion.

    ``past`` holds ``u(1..k-1)``. The criterion contribution of the realized
    points ``z(0..k-1)`` is cached as per-reference-point minimum distances,
    so scoring a horizon candidate only touches its ``L`` new points.
    """

    def __init__(self, surrogate, constraints, psi, past=(), horizon=1,
                 normalize=True, metric="euclidean", check_past=True):
        if horizon < 1:
            raise ConfigError("horizon must be >= 1")
        self.surrogate = surrogate
        self.constraints = constraints
        self.psi = psi
        self.L = int(horizon)
        self.normalize = bool(normalize)
        self.metric = metric
        self.metric_code = _metric_code(metric)

        u_past = np.asarray(getattr(past, "samples", past), dtype=float).ravel()
        u = np.concatenate(([surrogate.initial_state[0]], u_past))
        y = simulate_outputs(surrogate, u)
        self.k = len(u)
        self.y_k = float(y[-1])
        self.past_points = np.column_stack((u, y[:-1]))
        self.past_ok = (not check_past) or bool(np.all(constraints.state_ok(self.past_points)))

        box = constraints.state_box
        if self.normalize:
            self.offset = np.ascontiguousarray(box[:, 0])
            self.scale = np.ascontiguousarray(box[:, 1] - box[:, 0])
        else:
            self.offset = np.zeros(box.shape[0])
            self.scale = np.ones(box.shape[0])
        self.psi_n = np.ascontiguousarray((psi.points - self.offset) / self.scale)
        self.q = np.ascontiguousarray(psi.weights)
        past_n = np.ascontiguousarray((self.past_points - self.offset) / self.scale)
        self.base_min = kernels.ACTIVE.nn_min_dist(self.psi_n, past_n, self.metric_code)

    def current_j(self):
        """Criterion of the realized points ``z(0..k-1)``."""
        return float(kernels.ACTIVE.weighted_sum(self.q, self.base_min))

    def horizon_points(self, candidate):
        cand = np.asarray(candidate, dtype=float)
        y = kernels.ACTIVE.arx_simulate(self.surrogate.a, self.surrogate.b, self.y_k, cand)
        return np.column_stack((cand, y[:-1]))

    def evaluate(self, candidate):
        cand = np.ascontiguousarray(candidate, dtype=float).ravel()
        if cand.shape[0] != self.L:
            raise ValueError(f"candidate length {cand.shape[0]} != horizon {self.L}")
        if not (self.past_ok and self.constraints.input_ok(cand)):
            return np.inf, False
        Z = self.horizon_points(cand)
        if not np.all(self.constraints.state_ok(Z)):
            return np.inf, False
        Zn = np.ascontiguousarray((Z - self.offset) / self.scale)
        J = kernels.ACTIVE.horizon_cost(self.psi_n, self.q, self.base_min, Zn, self.metric_code)
        return float(J), True


def evaluate_candidate(candidate, state):
    """Return ``(J, feasible)`` of a horizon candidate; J is inf when infeasible."""
    return state.evaluate(candidate)


def calibrate_temperature(state, rng, samples=50):
    """Sample std of J over random feasible candidates (self-scaling start temperature)."""
    c = state.constraints
    vals = []
    for cand in rng.uniform(c.u_min, c.u_max, size=(samples, state.L)):
        J, ok = state.evaluate(cand)
        if ok:
            vals.append(J)
    if len(vals) >= 2 and np.std(vals, ddof=1) > 0:
        return float(np.std(vals, ddof=1))
    ref = abs(np.mean(vals)) if vals else 1.0
    return 1e-3 * max(ref, 1.0)


def _zero_candidate(state):
    c = state.constraints
    return np.full(state.L, min(max(0.0, c.u_min), c.u_max))


def sa_optimize(state, sa, rng, warm=None, temperature=None):
    """Simulated annealing over the horizon inputs of ``state``.

    Chains start from the warm start (or a random candidate when there is
    none), then a random candidate, then the zero-input candidate, then
    further random candidates, ``1 + restart_count`` chains in total. The
    best feasible candidate over all chains is returned; ties keep the
    earliest chain.
    """
    c = state.constraints
    L = state.L
    if temperature is None:
        temperature = sa.initial_temperature
    if temperature is None:
        temperature = calibrate_temperature(state, rng, sa.calibration_samples)

    def random_start():
        return rng.uniform(c.u_min, c.u_max, size=L)

    starts = []
    for r in range(1 + sa.restart_count):
        if r == 0 and warm is not None:
            starts.append(np.clip(np.asarray(warm, dtype=float), c.u_min, c.u_max))
        elif r == 2:
            starts.append(_zero_candidate(state))
        else:
            starts.append(random_start())

    n = sa.temperature_levels * sa.iterations_per_temperature
    step = sa.step_scale * (c.u_max - c.u_min)
    box = c.state_box
    box_lo = np.ascontiguousarray(box[:, 0])
    box_hi = np.ascontiguousarray(box[:, 1])
    chain = kernels.ACTIVE.sa_chain

    best = HorizonSolution(inputs=starts[0], achieved_j=np.inf, feasible=False)
    for start in starts:
        slots = rng.integers(0, L, size=n)
        noise = rng.standard_normal(n)
        coins = rng.random(n)
        inputs, J, feasible, acc, rej, hist = chain(
            np.ascontiguousarray(start, dtype=float), c.u_min, c.u_max,
            # a NaN start output makes every candidate infeasible
            state.y_k if state.past_ok else np.nan,
            state.surrogate.a, state.surrogate.b, box_lo, box_hi,
            state.offset, state.scale, state.psi_n, state.q, state.base_min,
            state.metric_code, float(temperature), sa.cooling_factor,
            sa.temperature_levels, sa.iterations_per_temperature, step,
            slots, noise, coins,
        )
        best.accepted += int(acc)
        best.rejected += int(rej)
        best.history.append(hist)
        if feasible and J < best.achieved_j:
            best.inputs = inputs.copy()
            best.achieved_j = float(J)
            best.feasible = True

    if not best.feasible:
        zero = _zero_candidate(state)
        J, ok = state.evaluate(zero)
        if ok:
            best.inputs, best.achieved_j, best.feasible = zero, J, True
    return best


def audit(signal, distribution, constraints):
    """List constraint violations of a realized design (empty when clean)."""
    problems = []
    u = np.asarray(getattr(signal, "samples", signal), dtype=float)
    bad_u = np.flatnonzero((u < constraints.u_min) | (u > constraints.u_max))
    problems += [f"u({i + 1}) = {u[i]!r} outside input box" for i in bad_u]
    bad_x = np.flatnonzero(~constraints.state_ok(distribution))
    problems += [f"z({j}) = {distribution[j].tolist()} outside state box" for j in bad_x]
    return problems


def design_signal(config, constraints, surrogate, psi, sa=SaConfig(),
                  mode="fixed-surrogate", plant=None, metric="euclidean",
                  progress=None):
    """Run the receding-horizon design for ``config.N`` steps.

    In ``"active-learning"`` mode every applied input is also fed to
    ``plant``; the surrogate is refit on all measurements after each step.
    Returns a :class:`DesignResult`.
    """
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    active = mode == "active-learning"
    if active and plant is None:
        raise ConfigError("active-learning mode requires a plant")
    if psi.points.shape[1] != constraints.dim:
        raise ConfigError("reference points and state box differ in dimension")
    if not constraints.state_ok(np.array(surrogate.initial_state)):
        raise ConfigError(f"initial state {surrogate.initial_state} outside the state box")
    if not constraints.input_ok(surrogate.initial_state[0]):
        raise ConfigError(f"initial input {surrogate.initial_state[0]} outside the input box")

    signal = ExcitationSignal(constraints)
    trace = []
    model = surrogate
    committed = [np.array(surrogate.initial_state)]
    record = None
    if active:
        plant = plant.clone()
        plant.reset()
        record = IoRecord()
        record.append(surrogate.initial_state[0], plant.y)
        pending_y = _plant_step(plant, surrogate.initial_state[0], signal, trace)

    def make_state():
        return DesignState(model, constraints, psi, signal, config.L,
                           config.normalization, metric, check_past=not active)

    state = make_state()
    temperature = sa.initial_temperature
    if temperature is None:
        temperature = calibrate_temperature(
            state, seeded_rng(config.seed, _CALIBRATION_STREAM), sa.calibration_samples
        )

    nn = kernels.ACTIVE.nn_min_dist
    realized_min = state.base_min.copy()
    warm = None
    for k in range(1, config.N + 1):
        rng = seeded_rng(config.seed, _STEP_STREAM, k)
        sol = sa_optimize(state, sa, rng, warm if sa.warm_start else None, temperature)
        if not sol.feasible:
            diag = {"k": k, "chains": 1 + sa.restart_count,
                    "rejected": sol.rejected, "past_ok": state.past_ok}
            raise DesignInfeasibleError(
                f"no feasible horizon candidate at step {k}", signal, trace, diag
            )
        u_k = float(sol.inputs[0])
        z_k = np.array([u_k, state.y_k])
        signal.append(u_k)
        committed.append(z_k)

        # criterion over the committed points; equals state.current_j() when
        # the surrogate is fixed
        J_before = float(kernels.ACTIVE.weighted_sum(state.q, realized_min))
        zn = np.ascontiguousarray(((z_k - state.offset) / state.scale)[None, :])
        realized_min = np.minimum(realized_min, nn(state.psi_n, zn, state.metric_code))
        J_after = float(kernels.ACTIVE.weighted_sum(state.q, realized_min))

        status = ""
        if active:
            record.append(u_k, pending_y)
            pending_y = _plant_step(plant, u_k, signal, trace)
            model, status = refit(model, record)

        trace.append(StepRecord(k, J_before, J_after, sol.accepted, sol.rejected,
                                model.a, model.b, status))
        warm = np.append(sol.inputs[1:], sol.inputs[-1])
        if progress is not None:
            progress(k, trace[-1])
        if k < config.N:
            state = make_state()

    distribution = np.array(committed)
    problems = audit(signal, distribution, constraints)
    if problems:
        raise DesignInfeasibleError(
            "post-run constraint audit failed", signal, trace, {"violations": problems}
        )
    return DesignResult(signal, distribution, trace, model, float(temperature), record)


def _plant_step(plant, u, signal, trace):
    try:
        return plant.step(u)
    except PlantDivergenceError as e:
        raise DesignAbortedError(
            f"plant diverged after {len(signal)} samples", signal, trace,
            {"k": len(signal), "input": u},
        ) from e
