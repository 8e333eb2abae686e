import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from multiwell.bae import (
    BaeRoots,
    PoleConfiguration,
    SectorLabel,
    SolverConfig,
    baxter_solutions,
    bae_residual,
    canonical_roots,
    classify_solution,
    closed_form_energy,
    _multiset_distance,
    deduplicate,
    energy_from_roots,
    enumerate_sectors,
    group_sectors,
    judge,
    newton_batch,
    solve_bae,
)
from multiwell.model import to_spectral
from multiwell.spectrum import degeneracy
from strategies import params_strategy

L = lambda *l: SectorLabel(l, ())  # labels for n=2, m=1



# -- labels ------------------------------------------------------------------------


def test_sector_label_fields():
    lab = SectorLabel((1, 0), (2, 1))
    assert (lab.L, lab.K, lab.r, lab.group) == (1, 3, 4, (1, 3))
    assert str(lab) == "1,0;2,1"
    with pytest.raises(ValueError):
        SectorLabel((-1,), ())


@pytest.mark.parametrize("text,n,m,expected", [
    ("1,0;2,1", 3, 3, SectorLabel((1, 0), (2, 1))),
    ("2;", 2, 1, L(2)),
    ("2", 2, 1, L(2)),
    (";", 1, 1, SectorLabel((), ())),
    ("3", 1, 2, SectorLabel((), (3,))),
])
def test_parse(text, n, m, expected):
    assert SectorLabel.parse(text, n, m) == expected


@pytest.mark.parametrize("text", ["1,0", "1;2", "a,0;0,0", "1,0,0;0,0"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        SectorLabel.parse(text, 3, 3)


def test_enumerate_a1():
    assert enumerate_sectors(2, 1, 3) == [L(0), L(1), L(2), L(3)]


def test_enumerate_a2_groups():
    labels = enumerate_sectors(3, 3, 3)
    assert len(labels) == 35
    assert len(set(labels)) == 35
    groups = group_sectors(labels)
    assert {g: len(v) for g, v in groups.items()} == oracles.A2_ROWS_PER_GROUP
    assert sum((3 - L_ - K + 1) * len(v) for (L_, K), v in groups.items()) == 56
    assert set(groups[(1, 1)]) == {SectorLabel(l, k) for l in [(1, 0), (0, 1)] for k in [(1, 0), (0, 1)]}


def test_enumerate_single_wells():
    assert enumerate_sectors(1, 1, 4) == [SectorLabel((), ())]
    with pytest.raises(ValueError):
        enumerate_sectors(0, 1, 2)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 5))
def test_enumerate_group_sizes_match_degeneracy(n, m, N):
    labels = enumerate_sectors(n, m, N)
    assert all(lab.r <= N for lab in labels)
    rs = [lab.r for lab in labels]
    assert rs == sorted(rs)
    for (Ls, Ks), members in group_sectors(labels).items():
        assert len(members) == degeneracy(Ls, Ks, n, m)


# -- residuals and energies --------------------------------------------------------


def test_residual_table_roots(a1):
    # reference roots carry 10 significant digits; the E6 row has fewer and is left out
    for l, roots in [(0, oracles.A1_ROOTS[0][0][0]), (1, oracles.A1_ROOTS[1][0][0]), (2, (0.3731349939,))]:
        assert np.linalg.norm(bae_residual(roots, L(l), a1, 3)) < 1e-6


def test_residual_single_equation(a1):
    sp = to_spectral(a1)
    v = 0.3731349939
    direct = sp.eta**2 * (v + sp.omega + 2 * sp.eta) * (v - sp.omega) - 1
    res = bae_residual((v,), L(2), sp, 3)
    assert res[0] == pytest.approx(direct, abs=1e-14)
    assert abs(res[0]) < 1e-6


def test_bad_e8_root_is_not_a_solution(a1):
    sp = to_spectral(a1)
    # the bad value equals the shift -(omega + 2 eta) in the equation itself
    assert oracles.A1_BAD_E8_ROOT == pytest.approx(-(sp.omega + 2 * sp.eta), abs=1e-8)
    assert abs(bae_residual((oracles.A1_BAD_E8_ROOT,), L(2), a1, 3)[0]) > 0.1
    assert abs(bae_residual((oracles.A1_E8_ROOT,), L(2), a1, 3)[0]) < 1e-8


def test_residual_non_solution(a1):
    assert np.linalg.norm(bae_residual((0.0, 0.0, 0.0), L(0), a1, 3)) > 0.1


def test_residual_pole_and_count(a1):
    eta = to_spectral(a1).eta
    with pytest.raises(PoleConfiguration):
        bae_residual((0.2, 0.2 + eta), L(1), a1, 3)
    with pytest.raises(ValueError):
        bae_residual((0.2,), L(1), a1, 3)


def test_closed_form_energies(a1, a2):
    assert closed_form_energy(L(3), a1) == 10.5
    assert closed_form_energy(SectorLabel((3, 0), (0, 0)), a2) == pytest.approx(13.2, abs=1e-12)
    assert closed_form_energy(SectorLabel((1, 0), (2, 0)), a2) == pytest.approx(0.8, abs=1e-12)


def test_energy_from_table_roots(a1):
    for l, rows in oracles.A1_ROOTS.items():
        for roots, idx in rows:
            e, gap = energy_from_roots(roots, L(l), a1, 3)
            assert e.real == pytest.approx(oracles.A1_ENERGIES[idx - 1], abs=1e-6)
            assert gap < 1e-6


def test_energy_r_equals_n_matches_closed_form(a1, a2):
    e, gap = energy_from_roots((), L(3), a1, 3)
    assert e.real == pytest.approx(10.5, abs=1e-12) and gap < 1e-12
    for lab in enumerate_sectors(3, 3, 3):
        if lab.r == 3:
            e, _ = energy_from_roots((), lab, a2, 3)
            assert e.real == pytest.approx(closed_form_energy(lab, a2), abs=1e-12)


def test_energy_standoff_from_roots(a1):
    # a root sitting on a default sample point must not produce inf/nan
    e, gap = energy_from_roots((0.37, -2.0), L(1), a1, 3)
    assert np.isfinite(e) and np.isfinite(gap)


def test_permutation_invariance(a1):
    roots, _ = oracles.A1_ROOTS[0][0]
    energies = {round(energy_from_roots(pm, L(0), a1, 3)[0].real, 10) for pm in itertools.permutations(roots)}
    assert len(energies) == 1
    assert BaeRoots(roots, L(0)) == BaeRoots(roots[::-1], L(0))
    verdicts = {classify_solution(BaeRoots(pm, L(0)), a1, 3).verdict for pm in itertools.permutations(roots)}
    assert verdicts == {"valid"}


def test_canonical_order():
    assert canonical_roots([1 + 1j, -2, 1 - 1j]) == (-2, 1 - 1j, 1 + 1j)


# -- classification -----------------------------------------------------------------


def test_classify_duplicate_roots(a1):
    sol = classify_solution(BaeRoots((-0.6245152109, -0.6245152109, 0.3909070846), L(0)), a1, 3)
    assert sol.verdict == "spurious"
    assert "coincident roots" in sol.reasons


def test_classify_valid_triple(a1):
    roots, _ = oracles.A1_ROOTS[0][0]
    sol = classify_solution(BaeRoots(roots, L(0)), a1, 3)
    assert sol.valid
    assert sol.diagnostics["u_independence_gap"] < 1e-6
    assert sol.diagnostics["state_residual"] < 1e-6


def test_classify_non_solution(a1):
    sol = classify_solution(BaeRoots((0.1, -0.7, 1.9), L(0)), a1, 3)
    assert "energy depends on u" in sol.reasons
    assert "Bethe state is not an eigenvector" in sol.reasons


def test_judge_pure():
    good = {"min_root_separation": 1.0, "pole_configuration": 0.0, "u_independence_gap": 1e-12,
            "state_norm": 1.0, "state_residual": 1e-12, "bae_residual": 0.0}
    assert judge(good, 2.0 + 0j, 1e-6) == []
    assert judge(dict(good, state_norm=0.0), 2.0, 1e-6) == ["vanishing Bethe state"]
    assert judge(good, 2.0 + 1e-3j, 1e-6) == ["complex energy"]
    assert judge(dict(good, pole_configuration=1.0), 2.0, 1e-6) == ["pole configuration"]
    # thresholds scale with |E|
    assert judge(dict(good, state_residual=5e-6), 10.0, 1e-6) == []


# -- solver ---------------------------------------------------------------------------


def test_solve_a1_all_sectors(a1):
    for l, rows in oracles.A1_ROOTS.items():
        res = solve_bae(L(l), a1, 3)
        assert res.complete and len(res.solutions) == 3 - l + 1
        found = [np.array(s.roots.roots) for s in res.solutions]
        for roots, idx in rows:
            assert any(
                len(f) == len(roots) and np.abs(np.sort(f.real) - np.sort(roots)).max() < 1e-6
                and np.abs(f.imag).max() < 1e-9
                for f in found
            ), (l, roots)
        reference = sorted(oracles.A1_ENERGIES[i - 1] for _, i in rows)
        if l == 2:
            reference = sorted(reference + [oracles.A1_ENERGIES[7]])
        np.testing.assert_allclose(res.energies, reference, atol=1e-6)


def test_solve_a1_l2_roots(a1):
    res = solve_bae(L(2), a1, 3)
    roots = sorted(s.roots.roots[0].real for s in res.solutions)
    np.testing.assert_allclose(roots, [oracles.A1_E8_ROOT, 0.3731349939], atol=1e-6)
    np.testing.assert_allclose(res.energies, [1.4723074, 10.5276926], atol=1e-6)


def test_solve_a2_sigma_l_one(a2):
    res = solve_bae(SectorLabel((1, 0), (0, 0)), a2, 3)
    assert res.complete
    np.testing.assert_allclose(res.energies, oracles.A2_TABLE[(1, 0)], atol=1e-4)
    # one valid solution is a complex-conjugate pair
    assert any(np.abs(np.imag(s.roots.roots)).max() > 0.1 for s in res.solutions)


def test_solve_rejects_r_equals_n(a1):
    with pytest.raises(ValueError):
        solve_bae(L(3), a1, 3)


def test_incomplete_sector_is_reported(a1, caplog):
    cfg = SolverConfig(max_starts=0, baxter_seeds=False)
    res = solve_bae(L(0), a1, 3, cfg)
    # structured starts alone may or may not finish the sector; the flag must be honest
    assert res.complete == (len(res.solutions) == 4)
    if not res.complete:
        assert "expected 4" in caplog.text


def test_deterministic_given_seed(a1):
    cfg = SolverConfig(seed=7)
    a = solve_bae(L(0), a1, 3, cfg)
    b = solve_bae(L(0), a1, 3, cfg)
    assert [s.roots for s in a.solutions] == [s.roots for s in b.solutions]


def test_baxter_seed_count(a1, a2):
    for p in (a1, a2):
        sp = to_spectral(p)
        for lab in enumerate_sectors(p.n, p.m, 3):
            assert len(baxter_solutions(lab, sp, 3)) == 3 - lab.r + 1


def test_newton_converges_from_perturbed_root(a1):
    sp = to_spectral(a1)
    roots, _ = oracles.A1_ROOTS[1][0]
    V, ok = newton_batch(np.array([roots]) + 0.05, L(1), sp, SolverConfig())
    assert ok[0]
    np.testing.assert_allclose(np.sort(V[0].real), np.sort(roots), atol=1e-8)


def test_deduplicate():
    a = np.array([1.0, 2.0 + 1j])
    reps = deduplicate([a, a[::-1] + 1e-9, a + 0.5], 1e-7)
    assert len(reps) == 2


@settings(max_examples=12, deadline=None)
@given(params_strategy(max_modes=4), st.integers(1, 3))
def test_random_models_complete_and_conjugate_closed(p, N):
    for lab in enumerate_sectors(p.n, p.m, N):
        if lab.r == N:
            continue
        res = solve_bae(lab, p, N)
        assert len(res.solutions) == N - lab.r + 1
        sets = [np.array(s.roots.roots) for s in res.solutions]
        for s in res.solutions:
            assert abs(s.energy.imag) < 1e-8 * max(1, abs(s.energy.real))
        for v in sets:
            conj = np.conj(v)
            assert min(_multiset_distance(conj, w) for w in sets) < 1e-6
