"""Propagation, interference aggregation and SINR for a static node placement.

All functions are pure and stateless. Power-law path loss only: received
power is p_t / d^alpha, interference is the sum of that expression over the
interfering transmitters, and SINR divides by interference plus noise
variance (or by interference alone in SIR mode).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


class GeometryError(ValueError):
    """Raised for degenerate geometry (co-located or negative-distance nodes)."""


@dataclass(frozen=True)
class Position:
    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        dx = self.x - other.x
        dy = self.y - other.y
        return math.sqrt(dx * dx + dy * dy)


@dataclass(frozen=True)
class ChannelModel:
    """Path-loss exponent, noise variance and the neighbor detection floor."""

    alpha: float = 3.0
    noise_variance: float = 1e-10
    detection_threshold: float = 2.5e-8
    sir_mode: bool = False

    def __post_init__(self):
        if self.alpha < 2.0:
            raise ValueError(f"path-loss exponent must be >= 2, got {self.alpha}")
        if self.noise_variance < 0.0:
            raise ValueError("noise variance must be >= 0")
        if self.detection_threshold <= 0.0:
            raise ValueError("detection threshold must be > 0")


@dataclass(frozen=True)
class LinkBudget:
    signal_power: float
    interference_power: float
    sinr: float


class Placement:
    """Static 2-D node placement with cached pairwise channel gains."""

    def __init__(self, xs, ys, area_side: float, alpha: float):
        self.xs = np.asarray(xs, dtype=np.float64)
        self.ys = np.asarray(ys, dtype=np.float64)
        if self.xs.shape != self.ys.shape or self.xs.ndim != 1:
            raise ValueError("xs and ys must be 1-d arrays of equal length")
        self.n = len(self.xs)
        self.area_side = area_side
        self.alpha = alpha
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.distance(i, j) <= 0.0:
                    raise GeometryError(f"nodes {i} and {j} are co-located")
        self.gains = kernels.pairwise_gains(self.xs, self.ys, alpha)

    def distance(self, i: int, j: int) -> float:
        dx = self.xs[i] - self.xs[j]
        dy = self.ys[i] - self.ys[j]
        return math.sqrt(dx * dx + dy * dy)

    def position(self, i: int) -> Position:
        return Position(float(self.xs[i]), float(self.ys[i]))


def sample_placement(n: int, area_side: float, rng: np.random.Generator,
                     alpha: float, min_separation: float = 1.0) -> Placement:
    """Draw n node positions uniformly in the square, rejecting pairs closer
    than min_separation so distances are never degenerate."""
    xs = np.empty(n)
    ys = np.empty(n)
    placed = 0
    attempts = 0
    while placed < n:
        attempts += 1
        if attempts > 1000 * n:
            raise GeometryError(
                f"could not place {n} nodes with separation {min_separation}"
                f" in a {area_side} m square")
        x = rng.uniform(0.0, area_side)
        y = rng.uniform(0.0, area_side)
        ok = True
        for k in range(placed):
            dx = xs[k] - x
            dy = ys[k] - y
            if math.sqrt(dx * dx + dy * dy) < min_separation:
                ok = False
                break
        if ok:
            xs[placed] = x
            ys[placed] = y
            placed += 1
    return Placement(xs, ys, area_side, alpha)


def received_power(p_t: float, d: float, alpha: float) -> float:
    """Power received over distance d with path-loss exponent alpha."""
    if d <= 0.0:
        raise GeometryError(f"transmitter-receiver distance must be > 0, got {d}")
    if p_t < 0.0:
        raise ValueError("transmit power must be >= 0")
    return p_t / d ** alpha


def aggregate_interference(receiver: int, intended_tx: int, transmitters,
                           placement: Placement) -> float:
    """Sum of received powers at `receiver` from every transmitter except the
    intended one and the receiver itself.

    `transmitters` is an iterable of (node_id, power) pairs; entries for the
    receiver or the intended transmitter are skipped.
    """
    total = 0.0
    for node, power in transmitters:
        if node == receiver or node == intended_tx:
            continue
        d = placement.distance(receiver, node)
        if d <= 0.0:
            raise GeometryError(f"interferer {node} co-located with receiver {receiver}")
        total += power / d ** placement.alpha
    return total


def sinr(signal: float, interference: float, channel: ChannelModel) -> float:
    """Signal to interference(+noise) ratio; inf when the denominator is zero."""
    denom = interference if channel.sir_mode else interference + channel.noise_variance
    if denom == 0.0:
        return math.inf
    return signal / denom


def link_budget(tx: int, rx: int, tx_power: float, transmitters,
                placement: Placement, channel: ChannelModel) -> LinkBudget:
    """Full budget for one link given the concurrently active transmitters."""
    signal = received_power(tx_power, placement.distance(tx, rx), channel.alpha)
    interference = aggregate_interference(rx, tx, transmitters, placement)
    return LinkBudget(signal, interference, sinr(signal, interference, channel))


def neighbors_of(node: int, placement: Placement, channel: ChannelModel,
                 p_max: float) -> list[int]:
    """Nodes whose received power at maximum transmit power reaches the
    detection threshold. Symmetric because every node shares p_max."""
    out = []
    for j in range(placement.n):
        if j == node:
            continue
        if received_power(p_max, placement.distance(node, j), channel.alpha) \
                >= channel.detection_threshold:
            out.append(j)
    return out


def adjacency(placement: Placement, channel: ChannelModel, p_max: float) -> list[list[int]]:
    """Neighbor lists for every node (brute-force pairwise check)."""
    neigh: list[list[int]] = [[] for _ in range(placement.n)]
    for i in range(placement.n):
        for j in range(i + 1, placement.n):
            if received_power(p_max, placement.distance(i, j), channel.alpha) \
                    >= channel.detection_threshold:
                neigh[i].append(j)
                neigh[j].append(i)
    return neigh
