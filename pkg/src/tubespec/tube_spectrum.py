"""Absolute boundary spectrum of the truncated tube, mode by mode.

Separation of variables turns the tube eigenproblem on [r0, R0] x torus
into one scalar problem per fiber mode (r, s):

    -a'' + kappa_{(r,s)}(u) a = lambda a

under either Robin conditions a' - beta a = 0 with beta = (log fh)' = -2H
at both ends (family "Abs1") or Dirichlet conditions (family "Abs2").  The
two families together make up the absolute boundary condition; the zero
mode is excluded from the merged spectrum by default because its
eigenvalues do not belong to the absolute spectrum of the ambient operator.

Mode selection is certified: a mode is skipped only when its potential
floor minus the attractive-boundary constant exceeds the window top, and
the lattice cutoff M_max is enlarged until everything outside the lattice
is certified skippable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import DegenerationSchedule, TubeGeometry, WarpedProfile, schedule_instantiate
from .sturm_liouville import (
    BoundaryCondition,
    SLProblem,
    attractive_boundary_constant,
    solve_cross_validated,
    spectral_floor,
)
from .torus_modes import ModeIndex, kappa_value, min_offzero_kappa

__all__ = [
    "TubeSpectrumRequest",
    "TubeSpectrum",
    "SpectrumEntry",
    "SweepOptions",
    "SweepRow",
    "assemble_mode_problem",
    "tube_absolute_spectrum",
    "find_r0",
    "sweep",
    "spectrum_csv_rows",
]

FAMILIES = ("Abs1", "Abs2")

# solver sizing for the per-mode problems (see the notes on Richardson
# accuracy: these reproduce strict-tolerance eigenvalues to ~1e-11 while
# keeping the worst R=10 solve well under a second)
_GRID_N = 2048
_PHASE_TOL = 1e-7
_M_MAX_LADDER = (1, 2, 4, 8, 16)


@dataclass(frozen=True)
class TubeSpectrumRequest:
    geometry: TubeGeometry
    lambda_max: float
    include_zero_mode: bool = False
    family: str = "Both"

    def __post_init__(self):
        object.__setattr__(self, "lambda_max", float(self.lambda_max))
        if not (self.lambda_max > 0 and math.isfinite(self.lambda_max)):
            raise ValueError("lambda_max must be positive and finite")
        if self.family not in ("Abs1", "Abs2", "Both"):
            raise ValueError(f"unknown family {self.family!r}")
        self.geometry.require_r0()

    @property
    def families(self) -> tuple:
        return FAMILIES if self.family == "Both" else (self.family,)


@dataclass(frozen=True)
class SpectrumEntry:
    mode: ModeIndex
    family: str
    eigenvalue: float
    error_estimate: float


@dataclass(frozen=True)
class TubeSpectrum:
    entries: tuple
    min_positive_offzero: float | None
    truncation_certificate: dict

    def __post_init__(self):
        ev = [e.eigenvalue for e in self.entries]
        if any(ev[i] > ev[i + 1] for i in range(len(ev) - 1)):
            raise ValueError("entries must be sorted by eigenvalue")


def assemble_mode_problem(mode: ModeIndex, geometry: TubeGeometry,
                          family: str) -> SLProblem:
    """The scalar problem of one fiber mode on [r0, R0] under one family."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    r0 = geometry.require_r0()
    R0 = geometry.R0

    def q(u, _r=mode.r, _s=mode.s, _g=geometry):
        return kappa_value(_r, _s, u, _g)

    if family == "Abs1":
        prof = WarpedProfile(geometry)
        bc_l = BoundaryCondition.robin(float(prof.beta(r0)))
        bc_r = BoundaryCondition.robin(float(prof.beta(R0)))
    else:
        bc_l = BoundaryCondition.dirichlet()
        bc_r = BoundaryCondition.dirichlet()
    return SLProblem(q=q, m0=r0, m1=R0, bc_left=bc_l, bc_right=bc_r)


def _mode_inf_kappa(mode: ModeIndex, geometry: TubeGeometry) -> float:
    """inf over [r0, R0] of this mode's kappa, swept on a fine grid.

    Both kappa summands are increasing in u, so the grid minimum equals the
    value at r0; the sweep keeps the skip decision independent of that fact.
    """
    u = np.linspace(geometry.require_r0(), geometry.R0, 513)
    return float(np.min(kappa_value(mode.r, mode.s, u, geometry)))


def _certified_lattice(geometry: TubeGeometry, cutoff: float):
    """Smallest ladder M_max whose outside-lattice floor clears the cutoff."""
    last_err = None
    for M in _M_MAX_LADDER:
        try:
            achieved, cert = min_offzero_kappa(geometry, M, with_certificate=True)
        except RuntimeError as exc:
            last_err = exc
            continue
        if cert["outside_floor"] > cutoff:
            return M, achieved, cert
    if last_err is not None:
        raise RuntimeError(str(last_err))
    raise RuntimeError(
        f"increase M_max: no lattice up to {_M_MAX_LADDER[-1]} certifies that "
        f"modes outside it stay above the skip cutoff {cutoff:.6g}")


def _canonical(mode: ModeIndex) -> ModeIndex:
    # kappa depends on (r, s) only through w^2 and r^2, so (r, s) and
    # (-r, -s) share one scalar problem
    if mode.r > 0 or (mode.r == 0 and mode.s >= 0):
        return mode
    return ModeIndex(-mode.r, -mode.s)


def tube_absolute_spectrum(request: TubeSpectrumRequest) -> TubeSpectrum:
    """Merged windowed spectra of every mode that can reach the window.

    A mode/family pair is solved unless inf_u kappa - C(beta) > lambda_max,
    where C is the attractive-boundary constant of that family (zero for
    Dirichlet); everything outside the mode lattice is certified skippable
    the same way.  Every solve runs both methods and must cross-validate.
    """
    geom = request.geometry
    lam_max = request.lambda_max
    window = (0.0, lam_max)

    c_beta = {}
    for fam in request.families:
        probe = assemble_mode_problem(ModeIndex(0, 0), geom, fam)
        c_beta[fam] = attractive_boundary_constant(probe)
    cutoff = lam_max + max(c_beta.values())

    M_used, kappa_min, cert = _certified_lattice(geom, cutoff)

    modes = [ModeIndex(r, s)
             for r in range(-M_used, M_used + 1)
             for s in range(-M_used, M_used + 1)]
    if not request.include_zero_mode:
        modes = [m for m in modes if not m.is_zero]

    solved = {}
    entries = []
    for mode in modes:
        inf_q = _mode_inf_kappa(mode, geom)
        for fam in request.families:
            if inf_q - c_beta[fam] > lam_max:
                continue
            key = (_canonical(mode).r, _canonical(mode).s, fam)
            if key not in solved:
                problem = assemble_mode_problem(mode, geom, fam)
                result = solve_cross_validated(problem, window,
                                               grid_n=_GRID_N,
                                               phase_tol=_PHASE_TOL)
                floor = spectral_floor(problem, inf_q=inf_q) - 1e-6
                assert all(ev >= floor for ev in result.eigenvalues), \
                    "eigenvalue below the quadratic-form floor"
                solved[key] = result
            result = solved[key]
            for ev, er in zip(result.eigenvalues, result.error_estimate):
                entries.append(SpectrumEntry(mode, fam, ev, er))

    entries.sort(key=lambda e: (e.eigenvalue, e.mode.r, e.mode.s, e.family))
    offzero = [e.eigenvalue for e in entries
               if not e.mode.is_zero and e.eigenvalue > 0]
    certificate = {
        "M_max": M_used,
        "kappa_min_offzero": kappa_min,
        "ring_min": cert["ring_min"],
        "outside_floor": cert["outside_floor"],
        "skip_cutoff": cutoff,
        "C_beta": dict(c_beta),
        "lambda_max": lam_max,
    }
    return TubeSpectrum(
        entries=tuple(entries),
        min_positive_offzero=(min(offzero) if offzero else None),
        truncation_certificate=certificate,
    )


def find_r0(geometry: TubeGeometry, threshold: float = 5.0):
    """Smallest r0 on the 0.1-grid with certified inf kappa above threshold.

    Accepts a geometry with or without r0 (any preset value is ignored, the
    scan always starts at 0).  Returns (r0, achieved_infimum).  When no grid
    point below R0 reaches the threshold the failure is explicit: the tube
    is too short for the requested floor.
    """
    threshold = float(threshold)
    candidates = []
    k = 0
    while k * 0.1 < geometry.R0 - 1e-12:
        candidates.append(round(k * 0.1, 10))
        k += 1
    best = None
    for r0 in candidates:
        trial = geometry.with_r0(r0)
        achieved = None
        for M in _M_MAX_LADDER:
            try:
                achieved = min_offzero_kappa(trial, M)
                break
            except RuntimeError:
                continue
        if achieved is None:
            continue
        best = achieved if best is None else max(best, achieved)
        if achieved > threshold:
            return r0, achieved
    detail = f"best inf kappa {best:.6g}" if best is not None else "no valid r0 grid point"
    raise RuntimeError(
        f"no r0 below R0={geometry.R0} reaches threshold {threshold} "
        f"({detail}); R={geometry.R} is too small")


@dataclass(frozen=True)
class SweepOptions:
    threshold: float = 5.0
    lambda_max: float = 2.0
    family: str = "Both"
    include_zero_mode: bool = False


@dataclass(frozen=True)
class SweepRow:
    R: float
    r0: float | None
    achieved_inf: float | None
    spectrum: TubeSpectrum | None
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None

    @property
    def min_positive_offzero(self) -> float | None:
        return self.spectrum.min_positive_offzero if self.spectrum else None


def sweep(schedule: DegenerationSchedule,
          options: SweepOptions = SweepOptions()) -> list:
    """Run find_r0 + tube_absolute_spectrum for every R in the schedule.

    Per-R failures (short tubes, certificate trouble) become rows with a
    failure reason; the sweep always continues to the next R.
    """
    rows = []
    for j, R in enumerate(schedule.R_grid):
        geom = schedule_instantiate(schedule, j)
        try:
            r0, achieved = find_r0(geom, threshold=options.threshold)
            geom = geom.with_r0(r0)
            spectrum = tube_absolute_spectrum(TubeSpectrumRequest(
                geometry=geom,
                lambda_max=options.lambda_max,
                include_zero_mode=options.include_zero_mode,
                family=options.family,
            ))
            rows.append(SweepRow(R=float(R), r0=r0, achieved_inf=achieved,
                                 spectrum=spectrum))
        except (RuntimeError, ValueError) as exc:
            rows.append(SweepRow(R=float(R), r0=None, achieved_inf=None,
                                 spectrum=None, failure=str(exc)))
    rows.sort(key=lambda row: row.R)
    return rows


def spectrum_csv_rows(rows) -> list:
    """Flatten sweep rows to (R, r0, mode_r, mode_s, family, eigenvalue, error).

    Failure rows keep their place with empty mode columns and the reason in
    the family column, so a sweep over a bad schedule still documents itself.
    """
    out = []
    for row in rows:
        if not row.ok:
            out.append((row.R, "", "", "", f"FAILED: {row.failure}", "", ""))
            continue
        if not row.spectrum.entries:
            out.append((row.R, row.r0, "", "", "empty-window", "", ""))
            continue
        for e in row.spectrum.entries:
            out.append((row.R, row.r0, e.mode.r, e.mode.s, e.family,
                        e.eigenvalue, e.error_estimate))
    return out
