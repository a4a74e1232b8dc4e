"""Tests for the experiment tools and their result wrapper."""

import json

import pytest

from spin import X, Z, Spin, SpinValidationError
from utils import BaseTool, ToolConfig, ToolResult
from utils.base import ERROR_INTERNAL, ERROR_VALIDATION
from utils.experiments import CommutatorTool, ExpandTool, FalsifyTool, OpsTool, ParadoxTool, RenderedResult
from utils.output_writer import format_complex, format_float, render_csv, render_table


class _Raises(BaseTool):

    def __init__(self, config, error):
        super().__init__(config)
        self.error = error

    def execute(self, **kwargs):
        raise self.error


@pytest.fixture
def config():
    return ToolConfig()


class TestToolResult:

    def test_success_has_no_error_type(self, config):
        result = OpsTool(config).run(spin=Spin(1))
        assert result.success
        assert result.error_type is None
        assert isinstance(result.data, RenderedResult)

    def test_validation_error(self, config):
        result = _Raises(config, SpinValidationError("bad m")).run()
        assert not result.success
        assert result.error == "bad m"
        assert result.error_type == ERROR_VALIDATION

    def test_internal_error(self, config):
        result = _Raises(config, KeyError("k")).run()
        assert result.error_type == ERROR_INTERNAL
        assert result.error.startswith("KeyError")

    def test_missing_metadata_counts_as_internal(self):
        assert ToolResult(success=False, data=None, error="x").error_type == ERROR_INTERNAL


class TestRenderedResult:

    def test_formats(self, config):
        rendered = ParadoxTool(config).execute(twice_s_max=2)
        assert json.loads(rendered.text("json"))[1]["twice_s"] == 2
        assert rendered.text("table").startswith("| s ")
        assert rendered.text("csv").startswith("twice_s,")

    def test_no_csv_for_ops(self, config):
        assert OpsTool(config).execute(spin=Spin(1)).text("csv") is None


class TestTools:

    def test_expand_payload(self, config):
        payload = ExpandTool(config).execute(spin=Spin(4), axis=X, twice_m=4, basis=Z).json_payload
        assert payload["eigenstate"]["axis"]["label"] == "x"
        assert len(payload["amplitudes"]) == 5

    def test_falsify_table_names_certificate(self, config):
        table = FalsifyTool(config).execute(spin=Spin(4), twice_vx=4, twice_vz=4).table
        assert "certificate" in table
        assert "negative" in table

    def test_commutator_unreachable_sums(self, config):
        table = CommutatorTool(config).execute(spin=Spin(4)).table
        assert "8 4 1 0" in table


class TestOutputWriter:

    def test_format_float(self):
        assert format_float(1 / 3) == "0.333333333333"
        assert format_float(-0.0) == "0"
        assert format_float(2.0) == "2"

    def test_format_complex(self):
        assert format_complex(0.5 + 0j) == "0.5"
        assert format_complex(-0.5j) == "-0.5i"
        assert format_complex(1 - 2j) == "1-2i"
        assert format_complex(1e-17 + 1e-17j) == "0"

    def test_render_table(self):
        assert render_table(["a", "bb"], [[1, "x"]]) == "| a | bb |\n|---|----|\n| 1 | x  |\n"

    def test_render_csv(self):
        assert render_csv(["chain", "count"], [("+1", 3)], comments=["seed: 1"]) == (
            "# seed: 1\nchain,count\n+1,3\n"
        )
