"""Teleportation-based discrimination protocol and incomplete-set bounds.

Teleporting one half of the resource through the unknown basis state leaves
the receiving lab holding a residual ket gamma_i = (1 (x) U_i)|tau>, reducing
the task to single-lab discrimination of the gammas. Measuring them in the
maximally entangled basis of that lab succeeds with probability equal to the
fully entangled fraction of the resource, term by term. For a set of N < d^2
states the same measurement extended by completion states (or by a single
remainder projector) gives a computable lower bound, and the scaled
certificate trace gives the matching upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import fef
from .states import MaxEntBasis, ResourceSpectrum, max_ent_state
from .tensor import require_hermitian

GRAM_CROSS_TOL = 1e-12
COMPLETION_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class ResidualEnsemble:
    """Post-teleportation kets and their Gram matrix."""

    dim: int
    gammas: tuple[np.ndarray, ...]
    gram: np.ndarray

    def __post_init__(self):
        require_hermitian(self.gram)
        if np.max(np.abs(np.diag(self.gram) - 1.0)) > GRAM_CROSS_TOL:
            raise ValueError("residual states must be normalized")

    def __len__(self) -> int:
        return len(self.gammas)


def teleport_residuals(
    basis: MaxEntBasis, spec: ResourceSpectrum, n_states: int | None = None
) -> ResidualEnsemble:
    """Residuals gamma_i = sum_k a_k |k> (x) U_i|k> for the first n_states.

    The Gram matrix is computed twice, once from the kets directly and once
    from the closed form sum_k a_k^2 <k|U_i^dag U_j|k>, and the two must
    agree to GRAM_CROSS_TOL; a mismatch signals a bug.
    """
    d = basis.dim
    if spec.dim != d:
        raise ValueError(f"spectrum dimension {spec.dim} does not match basis {d}")
    if n_states is None:
        n_states = d * d
    if not 1 <= n_states <= d * d:
        raise ValueError(f"n_states must lie in [1, {d * d}], got {n_states}")

    a = np.asarray(spec.coeffs)
    gammas = [
        (np.diag(a.astype(complex)) @ U.T).reshape(-1)
        for U in basis.unitaries[:n_states]
    ]
    gram = np.array(
        [[np.vdot(gi, gj) for gj in gammas] for gi in gammas], dtype=complex
    )
    closed = np.array(
        [
            [
                np.sum(a * a * np.diag(Ui.conj().T @ Uj))
                for Uj in basis.unitaries[:n_states]
            ]
            for Ui in basis.unitaries[:n_states]
        ],
        dtype=complex,
    )
    defect = float(np.max(np.abs(gram - closed)))
    if defect > GRAM_CROSS_TOL:
        raise ValueError(f"Gram cross-check failed: defect {defect:.3e}")
    return ResidualEnsemble(dim=d, gammas=tuple(gammas), gram=gram)


@dataclass(frozen=True)
class ProtocolRun:
    """Exact single-lab simulation of the discrimination measurement."""

    dim: int
    value: float
    per_state: tuple[float, ...]
    expected: float
    residuals: ResidualEnsemble

    @property
    def max_term_deviation(self) -> float:
        """Largest |per-state success - expected|; zero up to roundoff."""
        return max(abs(t - self.expected) for t in self.per_state)


def simulate_protocol(basis: MaxEntBasis, spec: ResourceSpectrum) -> ProtocolRun:
    """Run the full-basis protocol exactly and tabulate per-state successes.

    Each residual is measured in the maximally entangled basis of the
    receiving lab; outcome i on residual i counts as success. Outcome
    distributions are checked to sum to one.
    """
    d = basis.dim
    residuals = teleport_residuals(basis, spec)
    kets = basis.kets()
    per_state = []
    for i, gamma in enumerate(residuals.gammas):
        dist = np.array([abs(np.vdot(psi, gamma)) ** 2 for psi in kets])
        if abs(dist.sum() - 1.0) > 1e-12:
            raise ValueError(f"outcome distribution for state {i} is not normalized")
        per_state.append(float(dist[i]))
    value = float(np.mean(per_state))
    return ProtocolRun(
        dim=d,
        value=value,
        per_state=tuple(per_state),
        expected=fef(spec),
        residuals=residuals,
    )


def protocol_success(basis: MaxEntBasis, spec: ResourceSpectrum) -> float:
    """Exact success probability of the teleportation protocol."""
    return simulate_protocol(basis, spec).value


def sample_protocol_success(
    basis: MaxEntBasis,
    spec: ResourceSpectrum,
    shots: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo estimate: draw inputs uniformly, sample the measurement.

    Frequencies converge to the exact value at the usual 1/sqrt(shots) rate;
    this exists for demonstration, the exact simulation is authoritative.
    """
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    d = basis.dim
    n = d * d
    residuals = teleport_residuals(basis, spec)
    kets = basis.kets()
    counts = rng.multinomial(shots, [1.0 / n] * n)
    hits = 0
    for i, draws in enumerate(counts):
        if draws == 0:
            continue
        dist = np.array([abs(np.vdot(psi, residuals.gammas[i])) ** 2 for psi in kets])
        dist = dist / dist.sum()
        outcomes = rng.choice(n, size=draws, p=dist)
        hits += int(np.sum(outcomes == i))
    return hits / shots


@dataclass(frozen=True)
class CompletionStates:
    """Extra orthonormal measurement directions for an incomplete set."""

    kets: tuple[np.ndarray, ...]

    def __post_init__(self):
        kets = tuple(np.asarray(v, dtype=complex) for v in self.kets)
        object.__setattr__(self, "kets", kets)
        for i, v in enumerate(kets):
            if abs(np.linalg.norm(v) - 1.0) > COMPLETION_ORTHO_TOL:
                raise ValueError(f"completion state {i} is not normalized")
            for j in range(i + 1, len(kets)):
                if abs(np.vdot(v, kets[j])) > COMPLETION_ORTHO_TOL:
                    raise ValueError(f"completion states {i} and {j} overlap")

    def __len__(self) -> int:
        return len(self.kets)


def default_completion(basis: MaxEntBasis, n_states: int) -> CompletionStates:
    """The unused basis states, a maximally entangled completion."""
    d = basis.dim
    if not 1 <= n_states < d * d:
        raise ValueError(
            f"completion requires 1 <= n_states < {d * d}, got {n_states}"
        )
    return CompletionStates(
        kets=tuple(max_ent_state(U) for U in basis.unitaries[n_states:])
    )


@dataclass(frozen=True)
class IncompleteBounds:
    """Lower and upper bounds on the N-state success probability.

    Iterates as (lower, upper). ``assignments`` records, per completion
    direction, which residual claimed it (ties to the lowest index);
    ``in_range`` flags whether N sits in the locally indistinguishable
    regime d+1 <= N <= d^2 the bounds are framed for.
    """

    dim: int
    n_states: int
    strategy: str
    lower: float
    upper: float
    fef_value: float
    assignments: tuple[int, ...]
    overlaps: tuple[float, ...]
    in_range: bool

    def __iter__(self):
        return iter((self.lower, self.upper))

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "n_states": self.n_states,
            "strategy": self.strategy,
            "lower": self.lower,
            "upper": self.upper,
            "fef_value": self.fef_value,
            "assignments": list(self.assignments),
            "overlaps": list(self.overlaps),
            "in_range": self.in_range,
        }


def incomplete_bounds(
    basis: MaxEntBasis,
    spec: ResourceSpectrum,
    n_states: int,
    completion: CompletionStates | None = None,
    strategy: str = "completion",
) -> IncompleteBounds:
    """Bracket the success probability for the first n_states basis states.

    With the "completion" strategy the receiver measures in the N basis
    directions plus the completion states, and every completion outcome is
    mapped back to the residual most likely to have produced it: lower =
    F + (1/N) sum_i max_j |<psi'_i|gamma_j>|^2. The "projector" strategy
    lumps the remainder into a single orthocomplement projector Q and scores
    only its best residual: lower = F + (1/N) max_j <gamma_j|Q|gamma_j>.
    Either way upper = min(1, (d^2/N) F) and lower <= upper is enforced.
    """
    d = basis.dim
    if spec.dim != d:
        raise ValueError(f"spectrum dimension {spec.dim} does not match basis {d}")
    if not 1 <= n_states <= d * d:
        raise ValueError(f"n_states must lie in [1, {d * d}], got {n_states}")
    if strategy not in ("completion", "projector"):
        raise ValueError(f"unknown strategy {strategy!r}")

    if completion is None:
        if n_states == d * d:
            completion = CompletionStates(kets=())
        else:
            completion = default_completion(basis, n_states)
    if len(completion) != d * d - n_states:
        raise ValueError(
            f"completion has {len(completion)} states, expected {d * d - n_states}"
        )
    basis_kets = basis.kets()[:n_states]
    for i, v in enumerate(completion.kets):
        worst = max(
            (abs(np.vdot(v, psi)) for psi in basis_kets), default=0.0
        )
        if worst > COMPLETION_ORTHO_TOL:
            raise ValueError(
                f"completion state {i} overlaps the measured set by {worst:.3e}"
            )

    residuals = teleport_residuals(basis, spec, n_states)
    fef_value = fef(spec)

    assignments: list[int] = []
    overlaps: list[float] = []
    if strategy == "completion":
        for v in completion.kets:
            per_j = np.array(
                [abs(np.vdot(v, g)) ** 2 for g in residuals.gammas]
            )
            j = int(np.argmax(per_j))
            assignments.append(j)
            overlaps.append(float(per_j[j]))
        bonus = sum(overlaps) / n_states
    else:
        proj = np.eye(d * d, dtype=complex)
        for psi in basis_kets:
            proj -= np.outer(psi, psi.conj())
        per_j = np.array(
            [float(np.vdot(g, proj @ g).real) for g in residuals.gammas]
        )
        j = int(np.argmax(per_j))
        assignments.append(j)
        overlaps.append(float(per_j[j]))
        bonus = overlaps[0] / n_states

    lower = fef_value + bonus
    upper = min(1.0, (d * d / n_states) * fef_value)
    if lower > upper + 1e-12:
        raise RuntimeError(
            f"bound ordering violated: lower {lower!r} > upper {upper!r}"
        )
    return IncompleteBounds(
        dim=d,
        n_states=n_states,
        strategy=strategy,
        lower=float(lower),
        upper=float(upper),
        fef_value=fef_value,
        assignments=tuple(assignments),
        overlaps=tuple(overlaps),
        in_range=d + 1 <= n_states <= d * d,
    )
