import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from massdrift.errors import (DegenerateBasis, PingPongViolation, SpecInvalid)
from massdrift.kernel import evolve, verify_reversibility
from massdrift.models import (BooleOrbitSpec, FunnelChainSpec, SchottkyGroup,
                              SchottkyPoint, Sl2LatticePoint, boole_map,
                              boole_orbit, build_funnel_chain,
                              build_lattice_model, escape_proxy,
                              preimage_jacobian_sum, schottky_step, sl2_step,
                              srw_law)
from massdrift.models.schottky import (LETTERS, default_generator_matrices,
                                       to_disk, translation_length)
from massdrift.models.sl2 import reduce_batch, shortest_lengths


class TestLattice:
    def test_boundary_is_box_edge(self):
        m = build_lattice_model(2, 3)
        assert (3, 0) in m.boundary
        assert (3, -3) in m.boundary
        assert (2, 2) not in m.boundary

    def test_counting_measure_flagged_infinite(self):
        m = build_lattice_model(1, 5)
        assert m.reference.total_is_infinite
        assert m.reference(0) == 1.0

    def test_d2_srw_return_probability(self):
        m = build_lattice_model(2, 6)
        s = evolve(m, (0, 0), srw_law(2), 2)
        assert s.snapshot(2).mass_at((0, 0)) == pytest.approx(0.25)

    def test_small_radius_rejected(self):
        with pytest.raises(ValueError):
            build_lattice_model(1, 1)


class TestFunnelChain:
    def test_constant_neck_rows(self):
        spec = FunnelChainSpec(neck_prefix=(), tail=("constant", 1.0),
                               step_scale=0.25, truncation_size=10)
        m = build_funnel_chain(spec)
        assert m.rows[5] == {6: 0.25, 4: 0.25, 5: 0.5}
        assert m.rows[0] == {1: 0.25, 0: 0.75}

    def test_detailed_balance_holds(self):
        spec = FunnelChainSpec(neck_prefix=(0.5, 0.25),
                               tail=("geometric", 1.0, 0.5),
                               truncation_size=30)
        m = build_funnel_chain(spec)
        assert verify_reversibility(m).passes

    def test_geometric_tail_neck_values(self):
        spec = FunnelChainSpec(neck_prefix=(), tail=("geometric", 1.0, 0.5))
        assert spec.neck(1) == 1.0
        assert spec.neck(4) == 0.125

    def test_prefix_overrides_tail(self):
        spec = FunnelChainSpec(neck_prefix=(0.9,), tail=("constant", 0.1))
        assert spec.neck(1) == 0.9
        assert spec.neck(2) == 0.1

    def test_large_step_scale_rejected(self):
        spec = FunnelChainSpec(neck_prefix=(), tail=("constant", 1.0),
                               step_scale=0.3)
        with pytest.raises(SpecInvalid):
            build_funnel_chain(spec)

    def test_nonpositive_neck_rejected(self):
        spec = FunnelChainSpec(neck_prefix=(0.0,), tail=("constant", 1.0))
        with pytest.raises(SpecInvalid):
            build_funnel_chain(spec)

    def test_rows_are_stochastic(self):
        spec = FunnelChainSpec(neck_prefix=(), tail=("geometric", 1.0, 0.5),
                               truncation_size=40)
        m = build_funnel_chain(spec)
        for row in m.rows.values():
            assert sum(row.values()) == pytest.approx(1.0, abs=1e-12)


class TestBooleMap:
    def test_pointwise_values(self):
        assert boole_map(1.0) == 0.0
        assert boole_map(2.0) == 1.5
        assert boole_map(-2.0) == -1.5

    def test_jacobian_sum_is_one(self):
        for x in (0.3, 1.7, -2.4):
            assert preimage_jacobian_sum(x) == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(-50, 50))
    def test_jacobian_sum_is_one_everywhere(self, x):
        assert preimage_jacobian_sum(x) == pytest.approx(1.0, abs=1e-9)

    def test_orbit_report_shape(self):
        spec = BooleOrbitSpec(start_points=(0.7,), horizon=1000)
        rep = boole_orbit(spec)
        rec = rep.orbits[0]
        assert rec.occupation_curve[-1][0] == 1000
        assert 0.0 <= rec.final_fraction <= 1.0
        assert rec.drift_bound < 1e-6

    def test_occupation_fraction_decays(self):
        spec = BooleOrbitSpec(start_points=(0.7,), horizon=100_000)
        rec = boole_orbit(spec).orbits[0]
        frac = dict(rec.occupation_curve)
        assert frac[100_000] < frac[1000]

    def test_revisits_recorded(self):
        spec = BooleOrbitSpec(start_points=(0.7,), horizon=50_000)
        rec = boole_orbit(spec).orbits[0]
        assert any(n > 1000 for n in rec.revisit_times)

    def test_start_at_pole_rejected(self):
        with pytest.raises(ValueError):
            BooleOrbitSpec(start_points=(0.0,), horizon=10).validate()


def random_sl2z(rng, n):
    """Random integer matrices of determinant one, via products of the
    standard shears."""
    s = np.array([[1, 1], [0, 1]])
    t = np.array([[1, 0], [1, 1]])
    out = []
    for _ in range(n):
        m = np.eye(2, dtype=int)
        for k in rng.integers(-3, 4, size=4):
            m = m @ np.linalg.matrix_power(s if rng.random() < 0.5 else t,
                                           int(k))
        out.append(m)
    return out


class TestSl2Lattice:
    def test_identity_has_unit_shortest(self):
        assert Sl2LatticePoint.identity().shortest_len == pytest.approx(1.0)

    def test_shear_reduces_back(self):
        p = Sl2LatticePoint.from_basis([[1.0, 0.7], [0.0, 1.0]])
        assert p.shortest_len == pytest.approx(1.0)
        cols = {tuple(np.round(p.basis[:, j], 6)) for j in (0, 1)}
        assert (1.0, 0.0) in cols
        assert (-0.3, 1.0) in cols

    def test_reduction_idempotent(self):
        rng = np.random.default_rng(0)
        for g in random_sl2z(rng, 50):
            p = Sl2LatticePoint.from_basis(g.astype(float))
            q = Sl2LatticePoint.from_basis(p.basis)
            assert np.allclose(p.basis, q.basis)
            assert p.shortest_len == pytest.approx(q.shortest_len)

    def test_shortest_len_is_coset_invariant(self):
        rng = np.random.default_rng(1)
        base = np.array([[1.3, 0.4], [0.5, 0.923076923076923]])
        base /= math.sqrt(np.linalg.det(base))
        p0 = Sl2LatticePoint.from_basis(base)
        for g in random_sl2z(rng, 100):
            p = Sl2LatticePoint.from_basis(base @ g.astype(float))
            assert p.shortest_len == pytest.approx(p0.shortest_len, abs=1e-9)

    def test_step_shrinks_shortest_under_diagonal_flow(self):
        g = np.diag([3.0, 1.0 / 3.0])
        p = Sl2LatticePoint.identity()
        p = sl2_step(p, g)
        assert p.shortest_len == pytest.approx(1.0 / 3.0)

    def test_step_rejects_wrong_determinant(self):
        with pytest.raises(ValueError):
            sl2_step(Sl2LatticePoint.identity(), np.diag([2.0, 1.0]))

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(2)
        bases = np.stack([g.astype(float) for g in random_sl2z(rng, 40)])
        red = reduce_batch(bases.copy())
        lens = shortest_lengths(red)
        dets = red[:, 0, 0] * red[:, 1, 1] - red[:, 0, 1] * red[:, 1, 0]
        assert np.allclose(dets, 1.0)
        for i in range(len(bases)):
            p = Sl2LatticePoint.from_basis(bases[i])
            assert lens[i] == pytest.approx(p.shortest_len, abs=1e-9)


class TestSchottky:
    def test_default_group_validates(self):
        g = SchottkyGroup()
        assert g.core_radius == pytest.approx(math.log(3.0))

    def test_generator_translation_lengths(self):
        a, b = default_generator_matrices()
        assert translation_length(a) == pytest.approx(2 * math.log(3.0))
        assert translation_length(b) == pytest.approx(2 * math.log(3.0))

    def test_disk_generators_unitary_signature(self):
        g = SchottkyGroup()
        for s in LETTERS:
            m = g.disk[s]
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
            assert abs(det - 1.0) < 1e-9
            # SU(1,1) shape: second row is the conjugate-swap of the first
            assert abs(m[1, 1] - np.conj(m[0, 0])) < 1e-9
            assert abs(m[1, 0] - np.conj(m[0, 1])) < 1e-9

    def test_free_reduction_cancels(self):
        p = SchottkyPoint.basepoint()
        p = schottky_step(p, "a")
        p = schottky_step(p, "b")
        p = schottky_step(p, "B")
        assert p.word == ("a",)
        q = schottky_step(p, "A")
        assert q.word == ()
        assert q.core_distance == 0.0

    def test_word_length_changes_by_one(self):
        rng = np.random.default_rng(3)
        p = SchottkyPoint.basepoint()
        for _ in range(200):
            letter = LETTERS[rng.integers(4)]
            q = schottky_step(p, letter)
            assert abs(len(q.word) - len(p.word)) == 1
            p = q

    def test_core_distance_zero_at_basepoint(self):
        assert SchottkyPoint.basepoint().core_distance == 0.0

    def test_core_distance_grows_along_powers(self):
        p = SchottkyPoint.basepoint()
        dists = []
        for _ in range(5):
            p = schottky_step(p, "a")
            dists.append(p.core_distance)
        assert all(b > a for a, b in zip(dists, dists[1:]))

    def test_word_length_drift_near_half(self):
        rng = np.random.default_rng(4)
        n, walkers, total = 400, 200, 0
        for _ in range(walkers):
            p = SchottkyPoint.basepoint()
            for letter in rng.choice(LETTERS, size=n):
                p = schottky_step(p, str(letter))
            total += len(p.word)
        assert total / (walkers * n) == pytest.approx(0.5, abs=0.05)

    def test_elliptic_generator_rejected(self):
        theta = 0.3
        rot = np.array([[math.cos(theta), math.sin(theta)],
                        [-math.sin(theta), math.cos(theta)]])
        with pytest.raises(PingPongViolation):
            SchottkyGroup(a=rot)

    def test_overlapping_disks_rejected(self):
        a = np.array([[math.cosh(0.05), math.sinh(0.05)],
                      [math.sinh(0.05), math.cosh(0.05)]])
        with pytest.raises(PingPongViolation):
            SchottkyGroup(a=a)


class TestEscapeProxy:
    def test_dispatch(self):
        assert escape_proxy(Sl2LatticePoint.identity()) == pytest.approx(1.0)
        assert escape_proxy(SchottkyPoint.basepoint()) == 0.0

    def test_unknown_type_rejected(self):
        with pytest.raises(TypeError):
            escape_proxy(object())
