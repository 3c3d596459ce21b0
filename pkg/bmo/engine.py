"""
The four phases of the butterfly mating optimizer and the synchronous step.

Every iteration each Bfly
  1. reads the fitness at its position,
  2. updates its UV from that fitness,
  3. distributes its UV to all other Bflies, nearer ones receiving more,
  4. picks its l-mate: the first fitter Bfly in descending order of the
     UV it absorbed from them (itself if none is fitter),
  5. steps toward the l-mate.
All phases read the time-t snapshot, so agent order never matters.
Jitter draws come from a per-agent stream keyed by (stream, t), so they do
not depend on agent order or on how often a state is stepped either.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np
from scipy.spatial.distance import cdist

from landscapes.domain import Domain
from landscapes.exceptions import OutOfDomainError

from .exceptions import InvalidParamsError, NonFiniteFitnessError
from .params import DEFAULT_D_MIN, BmoParams, PlacementPolicy

logger = logging.getLogger("bflyflow")


class FitnessLandscape(Protocol):
    """What the optimizer needs from a landscape."""
    domain: Domain

    def evaluate_many(self, points: np.ndarray, t: int) -> np.ndarray: ...


@dataclass
class Bfly:
    id: int
    position: np.ndarray
    uv: float = 0.0
    fitness: float = 0.0
    lmate: int = -1
    # jitter stream; follows the agent if ids are relabelled
    stream: int = -1

    def __post_init__(self):
        self.position = np.array(self.position, dtype=float)
        if self.lmate < 0:
            self.lmate = self.id
        if self.stream < 0:
            self.stream = self.id


@dataclass
class SwarmState:
    """
    All agents at one time index plus the swarm seed.

    received_uv[i][j] is the UV agent j absorbed from agent i. rng is the
    root SeedSequence; it is never advanced, jitter derives child streams
    from it.
    """
    time_index: int
    agents: list[Bfly]
    received_uv: np.ndarray
    rng: np.random.SeedSequence = field(default_factory=np.random.SeedSequence)

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def positions(self) -> np.ndarray:
        return np.array([agent.position for agent in self.agents])

    @property
    def fitness(self) -> np.ndarray:
        return np.array([agent.fitness for agent in self.agents])

    @property
    def uv(self) -> np.ndarray:
        return np.array([agent.uv for agent in self.agents])

    def lmate_graph(self) -> list[tuple[int, int]]:
        return [(agent.id, agent.lmate) for agent in self.agents]


def swarm_positions(state: SwarmState) -> np.ndarray:
    """N x d array of agent positions."""
    return state.positions


def lmate_graph(state: SwarmState) -> list[tuple[int, int]]:
    """(agent id, l-mate id) pairs in agent order."""
    return state.lmate_graph()


def update_uv(prev_uv: float, fitness: float, params: BmoParams) -> float:
    """UV update: max(0, b1 * previous UV + b2 * fitness)."""
    if not (math.isfinite(prev_uv) and math.isfinite(fitness)):
        raise NonFiniteFitnessError(
            f"UV update got non-finite input (prev_uv={prev_uv}, fitness={fitness}); "
            "check the landscape"
        )
    return max(0.0, params.b1 * prev_uv + params.b2 * fitness)


def distribute_uv(state: SwarmState, d_min: float = DEFAULT_D_MIN) -> SwarmState:
    """
    Split every agent's UV among all others in proportion to inverse distance.

    Distances are floored at d_min so co-located agents never divide by zero.
    Row i of the result sums to uv_i.
    """
    n = state.n
    if n == 1:
        return replace(state, received_uv=np.zeros((1, 1)))

    positions = state.positions
    if not np.all(np.isfinite(positions)):
        raise OutOfDomainError(f"non-finite agent position at t={state.time_index}")

    inverse = 1.0 / np.maximum(cdist(positions, positions), d_min)
    np.fill_diagonal(inverse, 0.0)
    weights = inverse / inverse.sum(axis=1, keepdims=True)
    received = weights * state.uv[:, None]
    np.fill_diagonal(received, 0.0)
    return replace(state, received_uv=received)


def _scan_lmate(i: int, absorbed: np.ndarray, distances: np.ndarray, fitness: np.ndarray) -> int:
    n = len(fitness)
    ids = np.arange(n)
    # lexsort keys are applied last-to-first: absorbed UV desc, then distance, then id
    order = np.lexsort((ids, distances, -absorbed))
    for j in order:
        if j != i and fitness[j] > fitness[i]:
            return int(j)
    return i


def select_lmate(i: int, state: SwarmState) -> int:
    """
    Pick agent i's l-mate.

    Other agents are scanned in descending order of the UV i absorbed from
    them (ties: nearer first, then smaller id); the first one fitter than i
    wins. With no fitter agent, i is its own l-mate.
    """
    positions = state.positions
    distances = cdist(positions[i:i + 1], positions)[0]
    return _scan_lmate(i, state.received_uv[:, i], distances, state.fitness)


def move_agent(x_i: np.ndarray, x_lmate: np.ndarray, step_size: float,
               movement: str = "clamped") -> np.ndarray:
    """
    Step from x_i toward x_lmate.

    Clamped movement stops on the l-mate instead of overshooting it; fixed
    movement always covers step_size. The caller clips the result to the domain.
    """
    x_i = np.asarray(x_i, dtype=float)
    x_lmate = np.asarray(x_lmate, dtype=float)
    delta = x_lmate - x_i
    distance = float(np.linalg.norm(delta))
    if distance == 0.0:
        return x_i.copy()
    if movement == "clamped" and distance <= step_size:
        return x_lmate.copy()
    return x_i + (step_size / distance) * delta


def sense_and_select(state: SwarmState, landscape: FitnessLandscape, params: BmoParams) -> SwarmState:
    """
    Phases 1-4 on the time-t snapshot: read fitness, update and distribute
    UV, choose l-mates. Positions and the time index are unchanged.
    """
    t = state.time_index
    positions = state.positions
    fitness = np.asarray(landscape.evaluate_many(positions, t), dtype=float)
    if not np.all(np.isfinite(fitness)):
        bad = int(np.flatnonzero(~np.isfinite(fitness))[0])
        raise NonFiniteFitnessError(
            f"landscape returned {fitness[bad]} for agent {bad} at t={t}"
        )

    agents = [
        Bfly(
            id=agent.id,
            position=agent.position,
            uv=update_uv(agent.uv, float(f), params),
            fitness=float(f),
            stream=agent.stream,
        )
        for agent, f in zip(state.agents, fitness)
    ]
    sensed = distribute_uv(replace(state, agents=agents), params.d_min)

    distances = cdist(positions, positions)
    for agent in sensed.agents:
        agent.lmate = _scan_lmate(agent.id, sensed.received_uv[:, agent.id], distances[agent.id], fitness)
    return sensed


def jitter_direction(seed: np.random.SeedSequence, stream: int, t: int, dim: int) -> np.ndarray:
    """Unit vector drawn from the (stream, t) child of the swarm seed."""
    rng = np.random.default_rng(np.random.SeedSequence(seed.entropy, spawn_key=(*seed.spawn_key, stream, t)))
    while True:
        v = rng.standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm > 0:
            return v / norm


def advance(state: SwarmState, landscape: FitnessLandscape, params: BmoParams) -> SwarmState:
    """
    Phase 5: move every agent toward the snapshot position of its l-mate,
    clip to the domain and return the state at t+1.
    """
    domain = landscape.domain
    snapshot = state.positions
    moved = []
    for agent in state.agents:
        origin = snapshot[agent.id]
        if agent.lmate == agent.id:
            target = origin.copy()
            if params.jitter > 0:
                direction = jitter_direction(state.rng, agent.stream, state.time_index, origin.shape[0])
                target = origin + params.jitter * direction
            limit = params.jitter
        else:
            target = move_agent(origin, snapshot[agent.lmate], params.step_size, params.movement)
            limit = params.step_size
        position = domain.limit_step(origin, domain.clip(target), limit)
        moved.append(replace(agent, position=position))
    return replace(state, time_index=state.time_index + 1, agents=moved)


def bmo_step(state: SwarmState, landscape: FitnessLandscape, params: BmoParams) -> SwarmState:
    """One synchronous BMO iteration: time t in, time t+1 out."""
    return advance(sense_and_select(state, landscape, params), landscape, params)


def init_swarm(params: BmoParams, domain: Domain, placement: PlacementPolicy) -> SwarmState:
    """
    Lay out params.n_agents agents on the domain with zero UV, each its own l-mate.

    A generator seeded from params.rng_seed draws the positions; the seed
    itself is kept in the state as the root of the jitter streams.
    """
    rng = np.random.default_rng(params.rng_seed)
    n = params.n_agents

    if placement.kind == "explicit":
        positions = np.array(placement.positions, dtype=float)
        if positions.shape[0] != n:
            raise InvalidParamsError(
                f"explicit placement lists {positions.shape[0]} positions for {n} agents"
            )
        if positions.shape[1] != domain.dim:
            raise InvalidParamsError(
                f"explicit positions are {positions.shape[1]}-D, domain is {domain.dim}-D"
            )
        outside = np.flatnonzero(~domain.contains_many(positions, tol=params.d_min))
        if outside.size:
            raise OutOfDomainError(
                f"explicit position {positions[outside[0]].tolist()} of agent {int(outside[0])} "
                "lies outside the domain"
            )
    elif placement.kind == "quadrant_random":
        if not domain.is_box or domain.dim != 2:
            raise InvalidParamsError("quadrant_random placement needs a 2-D box domain")
        unit = rng.uniform(size=(n, 2))
        positions = np.empty((n, 2))
        for i in range(n):
            lo, hi = domain.quadrant(i)
            positions[i] = lo + unit[i] * (hi - lo)
    else:
        positions = domain.sample_uniform(rng, n)

    agents = [Bfly(id=i, position=positions[i]) for i in range(n)]
    logger.debug(f"Initialised {n} agents with {placement.kind} placement (seed {params.rng_seed})")
    return SwarmState(time_index=0, agents=agents, received_uv=np.zeros((n, n)),
                      rng=np.random.SeedSequence(params.rng_seed))
