import numpy as np
import pytest

from ndsculpt.config import EngineConfig
from ndsculpt.errors import DegenerateInputError, ValidationError
from ndsculpt.model import DimensionSpec
from ndsculpt.pdfsketch import curve_to_pdf, resample_stroke
from ndsculpt.quads import (CorrelationSetting, Quadrilateral,
                            classify_and_snap_quad, collect_ticks,
                            generate_cluster_samples, sample_linked_value)

DIMS = tuple(DimensionSpec(f"x{i + 1}", -10.0, 10.0, i) for i in range(7))

TRAPEZOID_CLICKS = [(0.2, 0.3), (0.8, 0.4), (0.8, 0.8), (0.2, 0.7)]
BOWTIE_CLICKS = [(0.2, 0.3), (0.8, 0.8), (0.8, 0.4), (0.2, 0.7)]


def quad(kind="trapezoid", cluster=0, left=0,
         left_range=(-5.0, 5.0), right_range=(-5.0, 5.0)):
    return Quadrilateral(cluster, left, kind, left_range, right_range)


class TestSnap:
    def test_convex_clicks_make_trapezoid(self):
        q = classify_and_snap_quad(TRAPEZOID_CLICKS, DIMS)
        assert q.kind == "trapezoid"
        assert q.left_axis == 0
        # sides with slope 1/6 extended from x=0.2 / x=0.8 onto the axes
        assert q.left_range[0] == pytest.approx(-10 + 20 * (0.3 - 0.2 / 6), abs=1e-9)
        assert q.left_range[1] == pytest.approx(-10 + 20 * (0.7 - 0.2 / 6), abs=1e-9)
        assert q.right_range[0] == pytest.approx(-10 + 20 * (0.4 + 0.2 / 6), abs=1e-9)
        assert q.right_range[1] == pytest.approx(-10 + 20 * (0.8 + 0.2 / 6), abs=1e-9)

    def test_crossing_clicks_make_bowtie(self):
        q = classify_and_snap_quad(BOWTIE_CLICKS, DIMS)
        assert q.kind == "bowtie"

    def test_snap_is_idempotent(self):
        q = classify_and_snap_quad(TRAPEZOID_CLICKS, DIMS)
        ticks = collect_ticks({}, [q], DIMS)
        l = [float(DIMS[0].to_param(v)) for v in q.left_range]
        r = [float(DIMS[1].to_param(v)) for v in q.right_range]
        corners = [(0.0, l[0]), (1.0, r[0]), (1.0, r[1]), (0.0, l[1])]
        again = classify_and_snap_quad(corners, DIMS, ticks)
        assert again.kind == q.kind
        assert np.allclose(again.left_range, q.left_range)
        assert np.allclose(again.right_range, q.right_range)

    def test_vertex_snaps_to_existing_tick(self):
        first = classify_and_snap_quad(TRAPEZOID_CLICKS, DIMS)
        ticks = collect_ticks({}, [first], DIMS)
        target = float(DIMS[0].to_param(first.left_range[1]))
        # a second quad whose upper-left side lands within tolerance
        clicks = [(0.2, 0.05), (0.8, 0.05), (0.8, target + 0.01), (0.2, target + 0.01)]
        second = classify_and_snap_quad(clicks, DIMS, ticks)
        assert second.left_range[1] == pytest.approx(first.left_range[1], abs=1e-12)

    def test_spanning_two_gaps_rejected(self):
        clicks = [(0.1, 0.2), (2.1, 0.3), (2.1, 0.7), (0.1, 0.6)]
        with pytest.raises(ValidationError, match="gap"):
            classify_and_snap_quad(clicks, DIMS)

    def test_collapse_rejected(self):
        clicks = [(0.1, 0.2), (0.3, 0.25), (0.3, 0.7), (0.1, 0.6)]
        with pytest.raises(ValidationError, match="collapse"):
            classify_and_snap_quad(clicks, DIMS)

    def test_degenerate_collinear_rejected(self):
        clicks = [(0.2, 0.5), (0.5, 0.5), (0.8, 0.5), (0.5, 0.5)]
        with pytest.raises(DegenerateInputError):
            classify_and_snap_quad(clicks, DIMS)

    def test_zero_height_rejected(self):
        clicks = [(0.2, 0.5), (0.8, 0.5), (0.8, 0.5001), (0.2, 0.4999)]
        config = EngineConfig(snap_tolerance=0.05)
        first = classify_and_snap_quad(TRAPEZOID_CLICKS, DIMS)
        ticks = collect_ticks({}, [first], DIMS)
        # both vertices of a side pulled onto one tick collapse the range
        l = [float(DIMS[0].to_param(v)) for v in first.left_range]
        r = [float(DIMS[1].to_param(v)) for v in first.right_range]
        clicks = [(0.0, l[0] + 0.01), (1.0, r[0]), (1.0, r[1]), (0.0, l[0] - 0.01)]
        with pytest.raises(ValidationError, match="zero-height"):
            classify_and_snap_quad(clicks, DIMS, ticks, config=config)


class TestTicks:
    def test_empty(self):
        assert collect_ticks({}, [], DIMS) == {}

    def test_bimodal_pdf_valley_and_endpoints(self):
        # two humps with one interior valley at the axis middle
        t = np.linspace(0.05, 0.95, 200)
        h = 0.3 + 0.25 * np.cos((t - 0.05) / 0.9 * 4 * np.pi - np.pi)
        curve = resample_stroke(np.column_stack([h, t]), 256)
        pdf = curve_to_pdf(curve, DIMS[0])
        ticks = collect_ticks({0: pdf}, [], DIMS)[0]
        origins = [tk.origin for tk in ticks]
        assert origins.count("pdf-local-minimum") == len(ticks) == 3
        params = sorted(tk.param for tk in ticks)
        assert params[0] == pytest.approx(0.05, abs=0.01)
        assert params[1] == pytest.approx(0.5, abs=0.01)
        assert params[2] == pytest.approx(0.95, abs=0.01)

    def test_quad_produces_four_ticks(self):
        q = classify_and_snap_quad(TRAPEZOID_CLICKS, DIMS)
        ticks = collect_ticks({}, [q], DIMS)
        assert len(ticks[0]) == 2 and len(ticks[1]) == 2
        assert all(t.origin == "quad-vertex" for t in ticks[0] + ticks[1])


class TestLinkedValue:
    def test_high_correlation_trapezoid(self):
        rng = np.random.default_rng(0)
        q = quad("trapezoid")
        prev = -2.0  # relative position 0.3 of the left range
        for _ in range(50):
            v, fell_back = sample_linked_value(prev, q, CorrelationSetting(1.0),
                                               DIMS, rng)
            assert not fell_back
            rel = (v - q.right_range[0]) / (q.right_range[1] - q.right_range[0])
            assert abs(rel - 0.3) <= 0.011

    def test_high_correlation_bowtie(self):
        rng = np.random.default_rng(0)
        q = quad("bowtie")
        for _ in range(50):
            v, _ = sample_linked_value(-2.0, q, CorrelationSetting(1.0), DIMS, rng)
            rel = (v - q.right_range[0]) / (q.right_range[1] - q.right_range[0])
            assert abs(rel - 0.7) <= 0.011

    def test_zero_correlation_spans_range(self):
        rng = np.random.default_rng(0)
        q = quad()
        vals = np.array([sample_linked_value(-2.0, q, CorrelationSetting(0.0),
                                             DIMS, rng)[0]
                         for _ in range(500)])
        assert vals.min() < -4.5 and vals.max() > 4.5
        assert vals.min() >= -5.0 and vals.max() <= 5.0

    def test_prev_outside_left_range_rejected(self):
        with pytest.raises(ValidationError):
            sample_linked_value(9.0, quad(), CorrelationSetting(0.5), DIMS,
                                np.random.default_rng(0))


class TestGeneration:
    def test_trapezoid_positive_correlation(self):
        rng = np.random.default_rng(1)
        pts, _ = generate_cluster_samples(0, [quad()], {}, CorrelationSetting(0.9),
                                          1000, DIMS, rng)
        r = np.corrcoef(pts[:, 0], pts[:, 1])[0, 1]
        assert r > 0.8

    def test_bowtie_negative_correlation(self):
        rng = np.random.default_rng(1)
        pts, _ = generate_cluster_samples(0, [quad("bowtie")], {},
                                          CorrelationSetting(0.9), 1000, DIMS, rng)
        assert np.corrcoef(pts[:, 0], pts[:, 1])[0, 1] < -0.8

    def test_range_confinement(self):
        rng = np.random.default_rng(2)
        q = quad(left_range=(-8.0, -2.0), right_range=(1.0, 7.0))
        pts, _ = generate_cluster_samples(0, [q], {}, CorrelationSetting(0.5),
                                          2000, DIMS, rng)
        assert pts[:, 0].min() >= -8.0 and pts[:, 0].max() <= -2.0
        assert pts[:, 1].min() >= 1.0 - 1e-9 and pts[:, 1].max() <= 7.0 + 1e-9

    def test_unconstrained_dims_uniform_over_axis(self):
        rng = np.random.default_rng(3)
        pts, _ = generate_cluster_samples(0, [quad()], {}, CorrelationSetting(0.5),
                                          2000, DIMS, rng)
        for d in range(2, 7):
            col = pts[:, d]
            assert col.min() >= -10 and col.max() <= 10
            assert abs(col.mean()) < 1.0

    def test_chained_quads_respect_both_ranges(self):
        rng = np.random.default_rng(4)
        q01 = quad(left_range=(-6.0, 6.0), right_range=(-6.0, 6.0))
        q12 = Quadrilateral(0, 1, "trapezoid", (-2.0, 2.0), (-9.0, 9.0))
        pts, _ = generate_cluster_samples(0, [q01, q12], {},
                                          CorrelationSetting(0.3), 1000, DIMS, rng)
        assert pts[:, 1].min() >= -2.0 - 1e-9 and pts[:, 1].max() <= 2.0 + 1e-9
        assert pts[:, 2].min() >= -9.0 - 1e-9 and pts[:, 2].max() <= 9.0 + 1e-9

    def test_contradictory_chain_rejected(self):
        q01 = quad(right_range=(-9.0, -5.0))
        q12 = Quadrilateral(0, 1, "trapezoid", (5.0, 9.0), (-5.0, 5.0))
        with pytest.raises(ValidationError, match="x2"):
            generate_cluster_samples(0, [q01, q12], {}, CorrelationSetting(0.5),
                                     100, DIMS, np.random.default_rng(0))

    def test_parallel_quads_split_by_coverage(self):
        rng = np.random.default_rng(5)
        a = quad(left_range=(-9.0, -1.0), right_range=(-9.0, -1.0))
        b = quad(left_range=(1.0, 9.0), right_range=(1.0, 9.0))
        pts, _ = generate_cluster_samples(0, [a, b], {}, CorrelationSetting(0.8),
                                          2000, DIMS, rng)
        low = pts[:, 0] < 0
        assert 800 < low.sum() < 1200          # halves by coverage
        assert (pts[low, 1] < 0).all()         # branch consistency
        assert (pts[~low, 1] > 0).all()

    def test_pdf_constrained_dimension(self):
        # density on the right axis shapes accepted candidates
        rng = np.random.default_rng(6)
        curve = np.array([[1.0, 0.0], [1.4, 0.5], [1.0, 1.0]])
        pdf = curve_to_pdf(resample_stroke(curve, 256), DIMS[1])
        pts, warn = generate_cluster_samples(0, [quad()], {1: pdf},
                                             CorrelationSetting(0.2), 1000,
                                             DIMS, rng)
        assert warn["rejection_fallbacks"] == 0
        assert pts[:, 1].min() >= -5.0 - 1e-9 and pts[:, 1].max() <= 5.0 + 1e-9

    def test_correlation_monotone(self):
        rng = np.random.default_rng(7)
        rs = []
        for c in (0.0, 0.25, 0.5, 0.75, 1.0):
            pts, _ = generate_cluster_samples(0, [quad()], {},
                                              CorrelationSetting(c), 10_000,
                                              DIMS, rng)
            rs.append(np.corrcoef(pts[:, 0], pts[:, 1])[0, 1])
        for lo, hi in zip(rs, rs[1:]):
            assert hi >= lo - 0.02

    def test_needs_at_least_one_sample(self):
        with pytest.raises(ValidationError):
            generate_cluster_samples(0, [], {}, CorrelationSetting(0.5), 0,
                                     DIMS, np.random.default_rng(0))
