"""Acceptance suite: one test per criterion, run at the stated tolerances.

Each test records a PASS/FAIL line that the conftest summary hook prints at
the end of the run.  Criterion 4 is split: its payoff clause holds, while its
matrix-proportionality clause is demonstrably false for the two stored
optimal parameter sets and is kept as a strict expected failure with the
analysis in the test body (see also the repository README).
"""

import math

import numpy as np
import pytest

from conftest import record_criterion
from qkolkata.game import (
    Convention,
    Player,
    all_payoffs,
    apply_profile,
    apply_symmetric,
    calibrate_convention,
    classical_baseline,
    classical_profile_payoffs,
    expected_payoff,
    payoff_operator,
    verify_classical_embedding,
)
from qkolkata.linalg import tensor3
from qkolkata.optimize import ObjectiveSpec, nash_check, objective, optimize_family
from qkolkata.states import (
    aharonov_state,
    ghz_state,
    nine_outcome_state,
    noisy_density,
    resolve_state,
)
from qkolkata.su3 import (
    OPT_FULL,
    OPT_ORTHOGONAL,
    OPT_REDUCED,
    StrategyFamily,
    StrategyParams,
    canonicalize_center,
    su3_matrices,
    su3_matrix,
)
from qkolkata.sweeps import (
    default_entanglement_grid,
    entanglement_sweep,
    fidelity_sweep,
    max_residual,
)

TWO_THIRDS = 2 / 3
ORTHOGONAL_TARGET = 40 / 81
GHZ_THETA = math.acos(1 / math.sqrt(3))
SEED = 42
N_STARTS = 200


def _check(label, passed, detail=""):
    record_criterion(label, passed, detail)
    assert passed, f"{label} failed {detail}"


def test_criterion_01_classical_baseline():
    expectation = classical_baseline()
    counts = [0, 0, 0]
    for i in range(3):
        for j in range(3):
            for k in range(3):
                pay = classical_profile_payoffs(i, j, k)
                for m in range(3):
                    counts[m] += pay[m]
    ok = (
        expectation.numerator == 4
        and expectation.denominator == 9
        and counts == [12, 12, 12]
    )
    _check("criterion 1: classical baseline 4/9 with 12 paying profiles per player", ok,
           f"E={expectation}, counts={counts}")


def test_criterion_02_classical_embedding():
    ok = verify_classical_embedding(atol=1e-12)
    _check("criterion 2: 27 shift profiles on the shared state replay the classical payoffs", ok)


def test_criterion_03_full_optimum_payoff_and_calibration():
    cal = calibrate_convention()
    rho = noisy_density(ghz_state(), 1.0)
    fin = apply_symmetric(rho, su3_matrix(OPT_FULL), cal.convention)
    payoffs = all_payoffs(fin)
    payoff_ok = all(abs(p - TWO_THIRDS) <= 1e-9 for p in payoffs)
    # Exactly one orientation passes the combined anchor (payoff + final
    # state).  The payoff anchor alone is degenerate: the adjoint optimum is
    # also a maximizer, so both orientations reach 2/3 on it.
    combined_passes = [
        conv
        for conv in ("standard", "paper")
        if abs(cal.payoff_by_convention[conv] - TWO_THIRDS) <= 1e-9 and cal.final_state_match[conv]
    ]
    ok = payoff_ok and combined_passes == ["standard"] and cal.convention is Convention.STANDARD
    _check(
        "criterion 3: full-family optimum pays 2/3 to every player; calibration singles out one convention",
        ok,
        f"payoffs={tuple(round(p, 12) for p in payoffs)}, anchor winners={combined_passes}, "
        f"payoff anchor alone is degenerate (both conventions reach 2/3)",
    )


def test_criterion_04a_reduced_optimum_payoff_equality():
    e_full = objective(ObjectiveSpec(StrategyFamily.FULL_SU3), OPT_FULL)
    e_red = objective(ObjectiveSpec(StrategyFamily.REDUCED6), OPT_REDUCED)
    ok = abs(e_full - e_red) <= 1e-12
    _check("criterion 4a: reduced-family optimum payoff equals the full-family payoff (1e-12)",
           ok, f"|diff|={abs(e_full - e_red):.2e}")


@pytest.mark.xfail(
    strict=True,
    reason="The stored full and reduced optima are NOT related by a constant "
    "unimodular scalar: the entrywise ratio U2/U1 is unimodular but non-constant, "
    "and U2 equals D_L @ conj(U1) @ D_R for diagonal unimodular D_L, D_R (rank-1 "
    "phase test passes at 2e-16).  Payoffs and optimality still coincide; see "
    "criterion 4a and the optimizer tests.",
)
def test_criterion_04b_matrices_differ_by_unimodular_scalar():
    u1 = su3_matrix(OPT_FULL)
    u2 = su3_matrix(
        StrategyParams(
            StrategyFamily.FULL_SU3,
            phi=OPT_REDUCED.phi, theta=OPT_REDUCED.theta, chi=OPT_REDUCED.chi,
            alpha3=OPT_REDUCED.alpha3, beta1=OPT_REDUCED.beta1, beta2=OPT_REDUCED.beta2,
        )
    )
    ratio = u2 / u1
    scalar = ratio[0, 0]
    deviation = np.abs(ratio - scalar).max()
    record_criterion(
        "criterion 4b: the two optimal matrices differ by one unimodular scalar",
        bool(deviation <= 1e-10 and abs(abs(scalar) - 1) <= 1e-10),
        f"documented defect: entrywise-ratio spread {deviation:.3f} (claim needs <= 1e-10); "
        "true relation is conjugation plus diagonal gauge",
    )
    assert deviation <= 1e-10


def test_criterion_05_orthogonal_optimum():
    val = objective(ObjectiveSpec(StrategyFamily.SO3), OPT_ORTHOGONAL)
    ok = abs(val - ORTHOGONAL_TARGET) <= 1e-9
    _check("criterion 5: orthogonal-family optimum pays 40/81", ok,
           f"E={val!r}, phi=chi=pi/4, theta=arccos(1/3)")


def test_criterion_06_final_state_nine_branches():
    u = su3_matrix(OPT_FULL)
    fin = tensor3(u, u, u) @ ghz_state()
    k = int(np.argmax(np.abs(fin)))
    fin = fin / (fin[k] / abs(fin[k]))  # strip the global phase
    target = nine_outcome_state()
    dev = np.abs(fin - target).max()
    ok = dev <= 1e-9
    _check("criterion 6: optimal symmetric play maps the shared state onto the nine-branch target",
           ok, f"max amplitude deviation {dev:.2e}")


def test_criterion_07_nash_equilibrium():
    report = nash_check(ObjectiveSpec(StrategyFamily.REDUCED6), step=1e-5, grid_points_per_axis=5)
    grad_ok = np.abs(report.gradient).max() < 1e-6
    eig_ok = bool(np.all(report.eigenvalues < -1e-8))
    closed_ok = np.abs(report.gradient - report.gradient_closed_form).max() < 1e-5
    grid_ok = report.payoff_at_optimum + report.max_unilateral_gain <= TWO_THIRDS + 1e-9
    ok = grad_ok and eig_ok and closed_ok and grid_ok and report.verdict
    _check(
        "criterion 7: reduced optimum is a Nash equilibrium "
        "(gradient, Hessian spectrum, closed forms, deviation grid)",
        ok,
        f"|grad|={np.abs(report.gradient).max():.1e}, eig_max={report.eigenvalues.max():.3e}, "
        f"grid gain={report.max_unilateral_gain:.1e}",
    )


def test_criterion_08_fidelity_law():
    rows = fidelity_sweep()  # default 101-point grid
    resid = max_residual(rows)
    by_f = {r.coords[0]: r.simulated for r in rows}
    ok = (
        len(rows) == 101
        and resid < 1e-10
        and abs(by_f[0.0] - 4 / 9) < 1e-10
        and abs(by_f[1.0] - 6 / 9) < 1e-10
    )
    _check("criterion 8: noisy payoff follows 2(2+f)/9 over 101 grid points", ok,
           f"max residual {resid:.2e}")


@pytest.fixture(scope="module")
def entanglement_rows():
    return entanglement_sweep()  # default 73 x 145 grid


def test_criterion_09_entanglement_surface(entanglement_rows):
    rows = entanglement_rows
    gt, gp = default_entanglement_grid()
    resid = max_residual(rows)
    sims = np.array([r.simulated for r in rows]).reshape(gt.steps, gp.steps)
    closed = np.array([r.closed_form for r in rows]).reshape(gt.steps, gp.steps)
    grid_max = sims.max()
    # the closed form is the independent oracle for where the maximum sits
    argmax_sim = set(map(tuple, np.argwhere(sims > grid_max - 1e-12)))
    argmax_closed = set(map(tuple, np.argwhere(closed > closed.max() - 1e-12)))
    vts, vps = gt.values(), gp.values()
    recovery_nodes = {
        (int(np.abs(vts - GHZ_THETA).argmin()), int(np.abs(vps - math.pi / 4).argmin())),
        (int(np.abs(vts - (math.pi - GHZ_THETA)).argmin()), int(np.abs(vps - 5 * math.pi / 4).argmin())),
    }
    ok = (
        len(rows) == gt.steps * gp.steps
        and resid < 1e-10
        and argmax_sim == recovery_nodes
        and argmax_sim == argmax_closed
        and abs(grid_max - TWO_THIRDS) < 1e-4  # off-lattice peak: grid sits 7.1e-6 below
        and grid_max <= TWO_THIRDS + 1e-10
    )
    _check(
        "criterion 9: payoff surface matches its closed form on the 73x145 grid, "
        "maxima at the recovery points of the shared state",
        ok,
        f"max residual {resid:.2e}, grid max {grid_max:.9f} at nodes {sorted(argmax_sim)}",
    )


def test_criterion_10_antisymmetric_state(rng):
    rho = noisy_density(aharonov_state(), 1.0)
    pay_ok = all(abs(expected_payoff(p, rho) - 1.0) <= 1e-12 for p in Player)
    psi = aharonov_state()
    worst = 0.0
    lo = np.zeros(8)
    hi = np.array([math.pi / 2] * 3 + [2 * math.pi] * 5)
    mats = su3_matrices(rng.uniform(lo, hi, size=(100, 8)))
    for u in mats:
        out = tensor3(u, u, u) @ psi
        worst = max(worst, float(np.abs(out - psi).max()))
    ok = pay_ok and worst <= 1e-10
    _check("criterion 10: antisymmetric state pays 1 under identity and is invariant "
           "under identical local strategies", ok, f"worst invariance residual {worst:.2e}")


def _alpha_lattice_canonical(best: StrategyParams, spec: ObjectiveSpec, payoff: float):
    """Reduce the found maximizer's alpha phases modulo the payoff-preserving
    moves, certifying each move numerically, and return |alpha - 5*pi/18|.

    Moves used (each re-evaluated and required to keep the payoff):
      * complex conjugation of the matrix  == negating all phases;
      * independent zero-sum alpha shifts  == left diagonal gauge;
      * joint alpha shifts by 2*pi/9       == right diagonal gauge fixing the
        shared state up to a global phase.
    The center quotient (joint shifts by 2*pi/3) is the sub-lattice of the
    third move, so the reported residue refines the stated (5+12n)*pi/18 form.
    """
    two_pi = 2 * math.pi
    v = best.full_vector()
    s = (v[3] + v[4] + v[5]) % (two_pi / 3)
    conjugated = abs(s - math.pi / 2) < abs(s - math.pi / 6)
    if conjugated:
        v = v.copy()
        v[3:] = np.mod(-v[3:], two_pi)
        p_conj = StrategyParams(StrategyFamily.FULL_SU3, *v)
        assert abs(objective(spec, p_conj) - payoff) < 1e-9, "conjugation was not payoff-null"
    mean_alpha = v[3:6].mean()
    v_eq = v.copy()
    v_eq[3:6] = mean_alpha % two_pi
    p_eq = StrategyParams(StrategyFamily.FULL_SU3, *v_eq)
    assert abs(objective(spec, p_eq) - payoff) < 1e-9, "alpha equalization was not payoff-null"
    target = 5 * math.pi / 18
    k = round((mean_alpha - target) / (two_pi / 9))
    canon_alpha = (mean_alpha - k * two_pi / 9) % two_pi
    v_canon = v_eq.copy()
    v_canon[3:6] = canon_alpha
    p_canon = StrategyParams(StrategyFamily.FULL_SU3, *v_canon)
    assert abs(objective(spec, p_canon) - payoff) < 1e-9, "joint lattice shift was not payoff-null"
    return abs(canon_alpha - target), conjugated


def test_criterion_11_optimizer_recovery():
    results = {}
    for family, target in (
        (StrategyFamily.FULL_SU3, TWO_THIRDS),
        (StrategyFamily.REDUCED6, TWO_THIRDS),
        (StrategyFamily.SO3, ORTHOGONAL_TARGET),
    ):
        res = optimize_family(ObjectiveSpec(family), seed=SEED, n_starts=N_STARTS)
        results[family] = res
        assert abs(res.best_payoff - target) <= 1e-6, (family, res.best_payoff)

    spec = ObjectiveSpec(StrategyFamily.FULL_SU3)
    full = results[StrategyFamily.FULL_SU3]
    residue, conjugated = _alpha_lattice_canonical(full.best_params, spec, full.best_payoff)
    lattice_ok = residue <= 1e-5

    # the stated alpha family is verified directly: every (5+12n)*pi/18 branch
    # is optimal and the center quotient maps each branch to the n=0 one
    branch_ok = True
    for n in (0, 1, 2):
        alpha = (5 + 12 * n) * math.pi / 18
        p = StrategyParams(
            StrategyFamily.FULL_SU3,
            phi=OPT_FULL.phi, theta=OPT_FULL.theta, chi=OPT_FULL.chi,
            alpha1=alpha, alpha2=alpha, alpha3=alpha,
            beta1=OPT_FULL.beta1, beta2=OPT_FULL.beta2,
        )
        branch_ok &= abs(objective(spec, p) - TWO_THIRDS) < 1e-12
        canon, recognized = canonicalize_center(p)
        branch_ok &= recognized and abs(canon.alpha1 - 5 * math.pi / 18) < 1e-12

    ok = lattice_ok and branch_ok
    _check(
        "criterion 11: seeded multistart recovers 2/3, 2/3 and 40/81; the full-family "
        "maximizer's alphas sit on the optimal lattice modulo the certified quotient",
        ok,
        f"payoffs=({results[StrategyFamily.FULL_SU3].best_payoff:.9f}, "
        f"{results[StrategyFamily.REDUCED6].best_payoff:.9f}, "
        f"{results[StrategyFamily.SO3].best_payoff:.9f}), alpha residue {residue:.2e}"
        + (", via conjugate branch" if conjugated else ""),
    )


def test_criterion_12_property_suite(rng):
    # 10^4 random matrices stay in the group
    lo = np.zeros(8)
    hi = np.array([math.pi / 2] * 3 + [2 * math.pi] * 5)
    mats = su3_matrices(rng.uniform(lo, hi, size=(10_000, 8)))
    gram_dev = float(np.abs(np.einsum("nij,nik->njk", mats.conj(), mats) - np.eye(3)).max())
    det_dev = float(np.abs(np.linalg.det(mats) - 1.0).max())
    group_ok = gram_dev < 1e-12 and det_dev < 1e-12

    # density invariants after construction and conjugation
    from qkolkata.linalg import check_density

    density_ok = True
    try:
        for name in ("ghz", "aharonov", "product000", "tunable:0.8,2.1"):
            for f in (0.0, 0.37, 1.0):
                rho = noisy_density(resolve_state(name), f)
                check_density(rho)
        rho = noisy_density(ghz_state(), 0.6)
        for u in mats[:50]:
            for conv in Convention:
                check_density(apply_symmetric(rho, u, conv))
    except Exception:  # noqa: BLE001 - any integrity failure flips the criterion
        density_ok = False

    proj_ok = True
    for player in Player:
        proj = payoff_operator(player).projector
        proj_ok &= bool(np.abs(proj @ proj - proj).max() == 0.0)
        proj_ok &= proj.trace().real == 12.0

    ok = group_ok and density_ok and proj_ok
    _check(
        "criterion 12: property suite (group membership at 1e4 draws, density invariants, projectors)",
        ok,
        f"gram dev {gram_dev:.1e}, det dev {det_dev:.1e}",
    )


def test_classical_profile_spot_cases_from_embedding():
    # spot checks quoted alongside criterion 2
    rho = noisy_density(ghz_state(), 1.0)
    from qkolkata.su3 import classical_operator

    fin = apply_profile(rho, classical_operator(1), classical_operator(1), classical_operator(1))
    assert np.abs(np.array(all_payoffs(fin))).max() < 1e-12
    fin = apply_profile(rho, classical_operator(2), classical_operator(1), classical_operator(0))
    assert np.abs(np.array(all_payoffs(fin)) - 1.0).max() < 1e-12
    assert classical_profile_payoffs(0, 1, 2) == (1, 1, 1)
