"""Noise and entanglement sweeps with closed-form cross-checks.

Each sweep runs the full density pipeline (mixture construction, symmetric
conjugation by the reference optimum, trace against Alice's payoff operator)
at every grid point and pairs the simulated value with the closed-form
prediction, so a residual above tolerance localizes a defect to one grid
point.  Rows serialize to CSV with 12 significant digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .game import Convention, DEFAULT_CONVENTION, Player, apply_symmetric, expected_payoff
from .states import EntanglementParams, ghz_state, noisy_density, tunable_state
from .su3 import OPT_FULL, su3_matrix


@dataclass(frozen=True)
class GridAxis:
    """Inclusive linear grid along one named parameter."""

    name: str
    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if self.steps < 2:
            raise ContractViolation("grid needs at least 2 steps")
        if not self.start < self.stop:
            raise ContractViolation(f"grid bounds must satisfy start < stop, got [{self.start}, {self.stop}]")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


@dataclass(frozen=True)
class SweepRow:
    names: tuple[str, ...]
    coords: tuple[float, ...]
    simulated: float
    closed_form: float

    @property
    def residual(self) -> float:
        return abs(self.simulated - self.closed_form)


def default_fidelity_grid() -> GridAxis:
    return GridAxis("f", 0.0, 1.0, 101)


def default_entanglement_grid() -> tuple[GridAxis, GridAxis]:
    # 2.5 degree resolution in both angles; the azimuthal endpoint 2*pi is
    # the periodic seam of the 0 column.
    return (
        GridAxis("vartheta", 0.0, math.pi, 73),
        GridAxis("varphi", 0.0, 2 * math.pi, 145),
    )


def closed_form_fidelity(f: float) -> float:
    """Payoff of the reference optimum on the noisy resource: 2*(2+f)/9."""
    return 2.0 * (2.0 + f) / 9.0


def closed_form_entanglement(vartheta: float, varphi: float) -> float:
    """Payoff of the reference optimum on the tunable pure state."""
    st = math.sin(vartheta)
    s2t = math.sin(2 * vartheta)
    return (
        math.sin(varphi) * s2t
        + math.cos(varphi) * (2 * math.sin(varphi) * st * st + s2t)
        + 4.0
    ) / 9.0


def _optimum_matrix() -> np.ndarray:
    return su3_matrix(OPT_FULL)


def fidelity_sweep(
    grid: GridAxis | None = None, convention: Convention = DEFAULT_CONVENTION
) -> list[SweepRow]:
    """Simulated vs closed-form payoff as the GHZ resource is depolarized."""
    grid = grid or default_fidelity_grid()
    if grid.start < 0.0 or grid.stop > 1.0:
        raise ContractViolation("fidelity grid must stay within [0, 1]")
    u = _optimum_matrix()
    psi = ghz_state()
    rows = []
    for f in grid.values():
        rho_fin = apply_symmetric(noisy_density(psi, float(f)), u, convention)
        sim = expected_payoff(Player.A, rho_fin)
        rows.append(SweepRow((grid.name,), (float(f),), sim, closed_form_fidelity(float(f))))
    return rows


def entanglement_sweep(
    grid_vartheta: GridAxis | None = None,
    grid_varphi: GridAxis | None = None,
    convention: Convention = DEFAULT_CONVENTION,
) -> list[SweepRow]:
    """Simulated vs closed-form payoff over the tunable-state angles.

    Row order is grid order: vartheta varies slowest.  The strategy matrix is
    the fixed reference optimum at every point, never re-optimized.
    """
    default_t, default_p = default_entanglement_grid()
    gt = grid_vartheta or default_t
    gp = grid_varphi or default_p
    if gt.start < 0.0 or gt.stop > math.pi or gp.start < 0.0 or gp.stop > 2 * math.pi:
        raise ContractViolation("entanglement grid outside [0, pi] x [0, 2*pi]")
    u = _optimum_matrix()
    rows = []
    for vt in gt.values():
        for vp in gp.values():
            psi = tunable_state(EntanglementParams(float(vt), float(vp)))
            rho_fin = apply_symmetric(noisy_density(psi, 1.0), u, convention)
            sim = expected_payoff(Player.A, rho_fin)
            rows.append(
                SweepRow(
                    (gt.name, gp.name),
                    (float(vt), float(vp)),
                    sim,
                    closed_form_entanglement(float(vt), float(vp)),
                )
            )
    return rows


# -- serialization ------------------------------------------------------------

def _fmt(x: float) -> str:
    """12 significant digits; keep a decimal point so integers read as floats."""
    s = f"{x:.12g}"
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def emit_csv(rows: list[SweepRow], destination) -> None:
    """Write rows as CSV: axis columns, simulated, closed_form, residual.

    ``destination`` is a path or a writable text file; lines end with LF.
    An empty row list still writes a header (fidelity-style by default).
    """
    if rows:
        names = rows[0].names
        if any(r.names != names for r in rows):
            raise ContractViolation("all rows must share the same axis columns")
    else:
        names = ("f",)
    header = ",".join(names + ("simulated", "closed_form", "residual"))
    lines = [header]
    for r in rows:
        cells = [_fmt(c) for c in r.coords] + [_fmt(r.simulated), _fmt(r.closed_form), _fmt(r.residual)]
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write CSV to {destination}: {exc}") from exc


# Five-stop blue->yellow ramp, good enough for a quick-look heat map without
# pulling in a plotting stack.
_RAMP = [
    (0.0, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.5, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.0, (253, 231, 37)),
]


def _ramp_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    for (t0, c0), (t1, c1) in zip(_RAMP, _RAMP[1:]):
        if t <= t1:
            w = 0.0 if t1 == t0 else (t - t0) / (t1 - t0)
            rgb = tuple(round(a + w * (b - a)) for a, b in zip(c0, c1))
            return f"rgb({rgb[0]},{rgb[1]},{rgb[2]})"
    return "rgb(253,231,37)"


def render_entanglement_svg(rows: list[SweepRow], destination, cell: int = 6) -> None:
    """Self-contained SVG heat map of a two-axis sweep (simulated payoff)."""
    if not rows or len(rows[0].names) != 2:
        raise ContractViolation("SVG rendering needs two-axis sweep rows")
    vts = sorted({r.coords[0] for r in rows})
    vps = sorted({r.coords[1] for r in rows})
    lookup = {(r.coords[0], r.coords[1]): r.simulated for r in rows}
    vmin = min(lookup.values())
    vmax = max(lookup.values())
    span = (vmax - vmin) or 1.0
    width, height = len(vps) * cell, len(vts) * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- payoff heat map: {rows[0].names[0]} down, {rows[0].names[1]} across; "
        f"range [{_fmt(vmin)}, {_fmt(vmax)}] -->",
    ]
    for i, vt in enumerate(vts):
        for j, vp in enumerate(vps):
            val = lookup[(vt, vp)]
            color = _ramp_color((val - vmin) / span)
            parts.append(
                f'<rect x="{j * cell}" y="{i * cell}" width="{cell}" height="{cell}" fill="{color}"/>'
            )
    parts.append("</svg>")
    text = "\n".join(parts) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", newline="") as fh:
        fh.write(text)


def max_residual(rows: list[SweepRow]) -> float:
    return max((r.residual for r in rows), default=0.0)


def observed_range(rows: list[SweepRow]) -> tuple[float, float]:
    sims = [r.simulated for r in rows]
    return (min(sims), max(sims)) if sims else (math.nan, math.nan)
