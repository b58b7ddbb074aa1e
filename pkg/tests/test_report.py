import json
import math

import numpy as np
import pytest

from shellcompat.grid import Grid2D, ScalarField, constant_field
from shellcompat.report import ReportBuilder, Series, Tolerances, report_to_json


def field(value, n=9):
    return constant_field(Grid2D(n, n), value)


def series_with(norms, check="order", scale=1.0):
    s = Series(name="s", check=check, scale=scale)
    for n, linf in norms.items():
        s.norms[n] = type("N", (), {"linf": linf, "l2": linf})()
    return s


class TestTolerances:
    def test_validation(self):
        with pytest.raises(ValueError):
            Tolerances(order_min=0.0)
        with pytest.raises(ValueError):
            Tolerances(order_min=2.0, order_max=1.0)
        with pytest.raises(ValueError):
            Tolerances(floor=0.0)


class TestSeriesOrders:
    def test_clean_second_order(self):
        tol = Tolerances()
        s = series_with({33: 4e-4, 65: 1e-4, 129: 2.5e-5})
        assert s.orders(tol) == pytest.approx([2.0, 2.0])
        assert s.passed(tol)

    def test_stall_fails_window(self):
        tol = Tolerances()
        s = series_with({33: 0.1, 65: 0.099})
        assert not s.passed(tol)

    def test_superconvergence_fails_strict_window_but_not_min(self):
        tol = Tolerances()
        strict = series_with({33: 1.6e-3, 65: 1e-4})  # order 4
        assert not strict.passed(tol)
        relaxed = series_with({33: 1.6e-3, 65: 1e-4}, check="order-min")
        assert relaxed.passed(tol)

    def test_all_below_floor_passes(self):
        tol = Tolerances()
        s = series_with({33: 1e-15, 65: 1e-14})
        assert s.orders(tol) == [None]
        assert s.passed(tol)

    def test_rounding_drift_above_floor_tolerated(self):
        # stacked differences amplify rounding ~4x per halving
        tol = Tolerances()
        s = series_with({33: 3e-14, 65: 2e-13, 129: 1.1e-12})
        assert s.orders(tol) == [None, None]
        assert s.passed(tol)

    def test_large_jump_from_floor_fails(self):
        tol = Tolerances()
        s = series_with({33: 1e-13, 65: 1e-3})
        assert s.orders(tol) == [-99.0]
        assert not s.passed(tol)

    def test_single_grid_reports_no_orders(self):
        tol = Tolerances()
        s = series_with({33: 1e-3})
        assert s.orders(tol) == []
        assert s.passed(tol)

    def test_informational_series_always_passes(self):
        tol = Tolerances()
        s = series_with({33: 1.0, 65: 1.0}, check="none")
        assert s.passed(tol)

    def test_normalization_by_scale(self):
        tol = Tolerances(floor=1e-12)
        s = series_with({33: 4e-6, 65: 1e-6}, scale=1e6)
        # normalized values sit below the floor
        assert s.normalized_linf(33) == pytest.approx(4e-12)
        assert s.orders(tol) == [None]


class TestReportBuilder:
    def build(self):
        rb = ReportBuilder("surface-check", [9, 17], trim=1, tol=Tolerances())
        for n, v in ((9, 4e-4), (17, 1e-4)):
            rb.add("gauss", n, field(v, n))
            rb.add("angles", n, field(1.0, n), check="none")
        return rb

    def test_passed_aggregates_over_series(self):
        rb = self.build()
        assert rb.passed
        rb.add("broken", 9, field(0.1, 9))
        rb.add("broken", 17, field(0.1, 17))
        assert not rb.passed

    def test_report_document_shape(self):
        rb = self.build()
        doc = rb.as_dict({"experiment": "surface-check"}, wall_time_s=0.5, version="0.1.0")
        assert doc["schema_version"] == 1
        assert doc["grids"] == [9, 17]
        assert set(doc["residuals"]) == {"gauss", "angles"}
        gauss = doc["residuals"]["gauss"]
        assert gauss["orders"] == [pytest.approx(2.0)]
        assert gauss["passed"] is True
        assert gauss["norms"]["9"]["linf"] == pytest.approx(4e-4)
        assert doc["provenance"]["wall_time_s"] == 0.5

    def test_json_serializable_and_sorted(self):
        rb = self.build()
        text = report_to_json(rb.as_dict({}, 0.1, "0.1.0"))
        doc = json.loads(text)
        assert doc["passed"] is True
        keys = list(doc.keys())
        assert keys == sorted(keys)
