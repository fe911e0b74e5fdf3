"""Structural checks on symbol models, evaluated on user-supplied grids.

Each check returns a small result object with a ``verdict`` string
("holds" or "fails") plus the evidence that produced it.  Grid checks are
certificates only up to the grid: a sup over sampled points can under- or
over-state the true sup, which callers must keep in mind for one-sided
conclusions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .symbols import SymbolModel, eval_symbol

__all__ = [
    "BoundedCoefficientsCheck",
    "SectorConditionCheck",
    "FellerDecayCheck",
    "SubadditivityCheck",
    "check_bounded_coefficients",
    "check_sector_condition",
    "check_feller_decay",
    "check_sqrt_subadditivity",
]


def _grid_points(grid, d: int) -> np.ndarray:
    arr = np.asarray(grid, dtype=float)
    if d == 1:
        return arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] != d:
        raise ValueError(f"grid must be (n, {d}) points")
    return arr


def _ball_grid(radius: float, d: int, per_axis: int) -> np.ndarray:
    axes = [np.linspace(-radius, radius, per_axis)] * d
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    keep = np.sqrt(np.sum(pts * pts, axis=1)) <= radius + 1e-12
    return pts[keep]


@dataclass
class BoundedCoefficientsCheck:
    c_est: float
    verdict: str
    zero_offset: float
    shell_radii: list = field(default_factory=list)
    shell_sups: list = field(default_factory=list)


def check_bounded_coefficients(
    model: SymbolModel, x_grid, xi_grid, *, growth_tol: float = 1.1, zero_tol: float = 1e-8
) -> BoundedCoefficientsCheck:
    """Estimate c = sup |p(x, xi)| / (1 + |xi|^2) on the grid.

    The estimate is bucketed by dyadic |xi| shells; when the outermost three
    shell sups each grow by more than ``growth_tol`` the constant is still
    climbing at the grid edge and the verdict is "fails" with the shell trace
    as evidence.  A nonzero sup of |p(x, 0)| also fails when the model
    declares itself conservative.
    """
    d = model.dimension
    xs = _grid_points(x_grid, d)
    xis = _grid_points(xi_grid, d)
    if d == 1:
        # dimension one is elementwise: strip the component axis before
        # broadcasting x against xi, or a stray trailing axis survives
        vals = np.abs(eval_symbol(model, xs[:, 0][:, None], xis[:, 0][None, :]))
    else:
        vals = np.abs(eval_symbol(model, xs[:, None, :], xis[None, :, :]))
    rho = np.sqrt(np.sum(xis * xis, axis=1))
    ratio = vals.max(axis=0) / (1.0 + rho**2)
    c_est = float(ratio.max())

    zero_offset = float(np.max(np.abs(eval_symbol(model, xs, np.zeros((xs.shape[0], d))))))

    rmax = rho.max()
    shell_radii, shell_sups = [], []
    edge = rmax
    for _ in range(8):
        lo = edge / 2.0
        mask = (rho > lo) & (rho <= edge)
        if mask.any():
            shell_radii.append(float(edge))
            shell_sups.append(float(ratio[mask].max()))
        edge = lo
        if edge < 1e-12:
            break
    shell_radii.reverse()
    shell_sups.reverse()

    growing = len(shell_sups) >= 3 and all(
        shell_sups[i + 1] > growth_tol * shell_sups[i] for i in range(len(shell_sups) - 3, len(shell_sups) - 1)
    )
    bad_zero = model.conservative and zero_offset > zero_tol
    verdict = "fails" if (growing or bad_zero or not np.isfinite(c_est)) else "holds"
    return BoundedCoefficientsCheck(
        c_est=c_est,
        verdict=verdict,
        zero_offset=zero_offset,
        shell_radii=shell_radii,
        shell_sups=shell_sups,
    )


@dataclass
class SectorConditionCheck:
    constant: float
    verdict: str
    witness_xi: np.ndarray | None = None


def check_sector_condition(
    model: SymbolModel, x_grid, xi_grid, *, tol: float = 1e-12
) -> SectorConditionCheck:
    """Smallest c with sup_x |Im p(x, xi)| <= c * inf_x Re p(x, xi) on the grid.

    Real symbols give exactly 0.  A vanishing real infimum against a
    non-vanishing imaginary sup has no finite constant; the verdict is then
    "fails" with the witness frequency.
    """
    d = model.dimension
    xs = _grid_points(x_grid, d)
    xis = _grid_points(xi_grid, d)
    keep = np.sqrt(np.sum(xis * xis, axis=1)) > 0
    xis = xis[keep]
    vals = eval_symbol(model, xs[:, None, :], xis[None, :, :])
    # dimension one evaluates elementwise with a trailing component axis
    vals = np.asarray(vals).reshape(xs.shape[0], xis.shape[0])
    im_sup = np.abs(np.imag(vals)).max(axis=0)
    re_inf = np.real(vals).min(axis=0)

    constant = 0.0
    for j in range(xis.shape[0]):
        if im_sup[j] <= tol * (1.0 + np.abs(vals[:, j]).max()):
            continue
        if re_inf[j] <= tol:
            return SectorConditionCheck(constant=np.inf, verdict="fails", witness_xi=xis[j])
        constant = max(constant, float(im_sup[j] / re_inf[j]))
    verdict = "holds" if constant < 1.0 else "fails"
    return SectorConditionCheck(constant=constant, verdict=verdict)


@dataclass
class FellerDecayCheck:
    radii: list
    sups: list
    verdict: str


def check_feller_decay(
    model: SymbolModel,
    radii,
    *,
    x_resolution: int = 33,
    xi_resolution: int = 33,
    tol: float = 1e-2,
) -> FellerDecayCheck:
    """Track s_k = sup_{|x| <= r_k} sup_{|xi| <= 1/r_k} |p(x, xi)|.

    For symbols of Feller generators with vanishing-at-infinity range the
    sequence tends to zero along growing radii; the verdict holds when the
    recorded sups are (within 5 percent) nonincreasing and end below ``tol``.
    """
    d = model.dimension
    sups = []
    for r in radii:
        xg = _ball_grid(float(r), d, x_resolution)
        xig = _ball_grid(1.0 / float(r), d, xi_resolution)
        vals = np.abs(eval_symbol(model, xg[:, None, :], xig[None, :, :]))
        sups.append(float(vals.max()))
    decreasing = all(sups[i + 1] <= 1.05 * sups[i] for i in range(len(sups) - 1))
    verdict = "holds" if (decreasing and sups[-1] < tol) else "fails"
    return FellerDecayCheck(radii=[float(r) for r in radii], sups=sups, verdict=verdict)


@dataclass
class SubadditivityCheck:
    verdict: str
    n_checked: int
    counterexample: dict | None = None


def check_sqrt_subadditivity(
    model: SymbolModel,
    n_samples: int = 1000,
    seed: int = 0,
    *,
    x_range: float = 5.0,
    xi_range: float = 10.0,
    tol: float = 1e-9,
) -> SubadditivityCheck:
    """Random search for violations of
    sqrt(Re p(x, a + b)) <= sqrt(Re p(x, a)) + sqrt(Re p(x, b)).

    The inequality characterizes the square-root subadditivity that every
    genuine symbol family inherits from its negative definite structure;
    polynomially growing pseudo-symbols like |xi|^4 fail it.
    """
    rng = np.random.default_rng(seed)
    d = model.dimension
    xs = rng.uniform(-x_range, x_range, size=(n_samples, d))
    a = rng.uniform(-xi_range, xi_range, size=(n_samples, d))
    b = rng.uniform(-xi_range, xi_range, size=(n_samples, d))
    re = lambda xi: np.sqrt(np.maximum(np.real(eval_symbol(model, xs, xi)), 0.0))
    # dimension one evaluates elementwise with a trailing component axis
    lhs = re(a + b).reshape(n_samples)
    rhs = (re(a) + re(b)).reshape(n_samples)
    bad = lhs > rhs + tol * (1.0 + rhs)
    if bad.any():
        i = int(np.argmax(bad))
        return SubadditivityCheck(
            verdict="fails",
            n_checked=n_samples,
            counterexample={
                "x": xs[i].tolist(),
                "xi1": a[i].tolist(),
                "xi2": b[i].tolist(),
                "lhs": float(lhs[i]),
                "rhs": float(rhs[i]),
            },
        )
    return SubadditivityCheck(verdict="holds", n_checked=n_samples)
