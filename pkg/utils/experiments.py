"""
Experiment Tools

One tool per command-line experiment. Each tool computes its result with
the `spin` package and renders it in every supported output format.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from spin import (
    Axis,
    Condition,
    EnumerationBoundError,
    OperatorSet,
    Spin,
    StateVector,
    axis_eigenstate,
    chi_square_gof,
    exact_final_distribution,
    exact_pi_half_probabilities,
    expand,
    falsify,
    max_max_assignment_feasible,
    paradox_scan,
    run_sequence,
    sum_operator_spectrum,
    von_neumann_witness,
)
from spin.spin_core import format_half
from .base import BaseTool
from .output_writer import (
    format_bool,
    format_complex,
    format_float,
    format_fraction,
    render_csv,
    render_json,
    render_table,
)

logger = logging.getLogger(__name__)


@dataclass
class RenderedResult:
    """An experiment result in each output format it supports."""
    json_payload: object
    table: str
    csv: Optional[str] = None

    def text(self, output_format: str) -> Optional[str]:
        if output_format == "json":
            return render_json(self.json_payload)
        if output_format == "csv":
            return self.csv
        return self.table


def _m_header(spin: Spin) -> list[str]:
    return [f"m={format_half(m, signed=True)}" for m in spin.twice_ms]


def _exact_overlap_probability(spin: Spin, state_axis: Axis, twice_m: int,
                               basis: Axis, target_m: int):
    """|<target|_basis |m>_state|^2 exactly, when both axes are x, y or z."""
    a, b = state_axis.principal_name(), basis.principal_name()
    if a is None or b is None:
        return None
    if a == b:
        return int(twice_m == target_m)
    try:
        return exact_pi_half_probabilities(spin, twice_m, target_m)
    except EnumerationBoundError:
        return None


class OpsTool(BaseTool):
    """S_x, S_y, S_z and S^2 for one spin."""

    def execute(self, spin: Spin) -> RenderedResult:
        operators = OperatorSet.build(spin)
        sections = [f"# spin s={spin.label} (dim {spin.dim}), basis m = s ... -s\n"]
        for name, op in operators.operators.items():
            rows = [
                [f"m={format_half(m, signed=True)}"] + [format_complex(z) for z in row]
                for m, row in zip(spin.twice_ms, op.entries)
            ]
            sections.append(f"\n{name} [{op.units.label}]\n")
            sections.append(render_table([""] + _m_header(spin), rows))
        return RenderedResult(operators.to_json(), "".join(sections))


class ExpandTool(BaseTool):
    """Expand |m>_axis over the eigenbasis of another axis."""

    def execute(self, spin: Spin, axis: Axis, twice_m: int, basis: Axis) -> RenderedResult:
        state = axis_eigenstate(spin, twice_m, axis)
        expansion = expand(state, spin, basis)
        payload = expansion.to_json()
        payload["eigenstate"] = {"axis": axis.to_json(), "twice_m": twice_m}

        rows = []
        for m, amp in expansion.amplitudes:
            exact = _exact_overlap_probability(spin, axis, twice_m, basis, m)
            rows.append([
                format_half(m, signed=True),
                format_complex(amp.to_complex()),
                format_float(abs(amp) ** 2),
                "-" if exact is None else format_fraction(exact),
            ])
        header = (f"# |{format_half(twice_m, signed=True)}>_{axis.label} over the "
                  f"{basis.label} eigenbasis, spin s={spin.label}\n")
        table = header + render_table(
            [f"m_{basis.label}", "amplitude", "probability", "exact"], rows
        )
        return RenderedResult(payload, table)


class SimulateTool(BaseTool):
    """Sequential Stern-Gerlach runs with optional post-selection."""

    def execute(self, spin: Spin, init_axis: Axis, init_twice_m: int, axes: Sequence[Axis],
                shots: int, seed: int, condition: Optional[Condition] = None,
                workers: int = 1) -> RenderedResult:
        initial: StateVector = axis_eigenstate(spin, init_twice_m, init_axis)
        stats = run_sequence(
            spin, initial, axes, shots, seed, condition,
            workers=workers, batch_shots=self.config.BATCH_SHOTS,
        )
        expected = exact_final_distribution(spin, init_axis, init_twice_m, axes, condition)
        final = stats.final_counts()
        accepted = stats.accepted

        final_rows = []
        for m in spin.twice_ms:
            freq = final[m] / accepted if accepted else 0.0
            row = {"twice_m": m, "count": final[m], "frequency": freq}
            if expected is not None:
                p = dict(expected)[m]
                row["expected"] = {"num": p.numerator, "den": p.denominator}
                row["three_sigma"] = 3.0 * math.sqrt(float(p) * (1 - float(p)) / accepted) if accepted else None
            final_rows.append(row)

        gof = None
        if expected is not None and accepted:
            gof = chi_square_gof([final[m] for m in spin.twice_ms],
                                 [float(p) for _, p in expected], accepted)

        payload = stats.to_json()
        payload["initial"] = {"axis": init_axis.to_json(), "twice_m": init_twice_m}
        payload["final"] = final_rows
        payload["gof"] = gof.to_json() if gof else None

        chain_label = ",".join(a.label for a in axes)
        head = [
            f"seed: {seed}",
            f"spin s={spin.label}, initial |{format_half(init_twice_m, signed=True)}>_{init_axis.label}, "
            f"sequence {chain_label}",
            f"shots: {shots}, accepted: {accepted}"
            + (f" (condition step {condition.step} = {format_half(condition.twice_m, signed=True)})"
               if condition else ""),
        ]
        table = "".join(f"# {line}\n" for line in head)
        table += "\n" + render_table(["chain", "count"], stats.csv_rows())
        final_table_rows = []
        for row in final_rows:
            exp = row.get("expected")
            final_table_rows.append([
                format_half(row["twice_m"], signed=True),
                row["count"],
                format_float(row["frequency"]),
                f"{exp['num']}/{exp['den']}" if exp else "-",
                format_float(row["three_sigma"]) if row.get("three_sigma") is not None else "-",
            ])
        table += "\nfinal outcome\n" + render_table(
            [f"m_{axes[-1].label}", "count", "frequency", "expected", "3 sigma"], final_table_rows
        )
        if gof:
            table += (f"\nchi-square: {format_float(gof.statistic)} on {gof.degrees} d.o.f. "
                      f"(critical {format_float(gof.critical)}), pass={format_bool(gof.passed)}\n")

        csv_text = render_csv(
            ["chain", "count"],
            stats.csv_rows(),
            comments=head,
        )
        logger.debug("simulate finished: %d accepted", accepted)
        return RenderedResult(payload, table, csv_text)


class ParadoxTool(BaseTool):
    """Paradox condition and max-max feasibility for s = 1/2 .. s_max."""

    def execute(self, twice_s_max: int, workers: int = 1) -> RenderedResult:
        reports = paradox_scan(twice_s_max, workers=workers)
        rows, payload, csv_rows = [], [], []
        for report in reports:
            feasible = max_max_assignment_feasible(report.spin)
            entry = report.to_json()
            entry["feasible"] = feasible
            payload.append(entry)
            rows.append([
                report.spin.label,
                format_fraction(report.lhs),
                format_fraction(report.rhs),
                format_bool(report.violated),
                format_bool(feasible),
                format_fraction(report.joint_probability),
            ])
            csv_rows.append([
                report.spin.twice_s, report.spin.label, format_fraction(report.lhs),
                format_fraction(report.rhs), report.violated, feasible,
                format_fraction(report.joint_probability),
            ])
        table = render_table(
            ["s", "2s^2 [hbar^2]", "s(s+1) [hbar^2]", "violated", "feasible", "P(max,max)"], rows
        )
        csv_text = render_csv(
            ["twice_s", "s", "lhs", "rhs", "violated", "feasible", "joint_probability"], csv_rows
        )
        return RenderedResult(payload, table, csv_text)


class FalsifyTool(BaseTool):
    """Test a pair of pre-existing values (v_x, v_z) against S^2 = s(s+1)."""

    def execute(self, spin: Spin, twice_vx: int, twice_vz: int) -> RenderedResult:
        report = falsify(spin, twice_vx, twice_vz)
        rows = [
            ["s", spin.label],
            ["v_x [hbar]", format_half(twice_vx)],
            ["v_z [hbar]", format_half(twice_vz)],
            ["required v_y^2 [hbar^2]", format_fraction(report.required_vy_squared)],
            ["max v_y^2 [hbar^2]", format_fraction(report.max_vy_squared)],
            ["positivity bound", "satisfied" if report.positivity_ok else "violated"],
            ["feasible", format_bool(report.feasible)],
            ["witness" if report.feasible else "certificate",
             ", ".join(w.label() for w in report.witnesses) if report.feasible else report.reason],
        ]
        return RenderedResult(report.to_json(), render_table(["quantity", "value"], rows))


class CommutatorTool(BaseTool):
    """[S_x^2, S_z^2] and the spectrum of S_x^2 + S_z^2."""

    def execute(self, spin: Spin) -> RenderedResult:
        witness = von_neumann_witness(spin)
        spectrum = sum_operator_spectrum(spin)
        payload = {"spin": spin.to_json(), **witness.to_json(), "sum_spectrum": spectrum.to_json()}
        rows = [
            ["max |[S_x^2, S_z^2]| [hbar^4]", format_float(witness.commutator_max_abs)],
            ["nonzero", format_bool(witness.nonzero)],
            ["eigenvalues of S_x^2+S_z^2 [hbar^2]",
             " ".join(format_float(e) for e in spectrum.operator_eigenvalues)],
            ["max v_x^2+v_z^2 [hbar^2]", format_fraction(spectrum.max_value_sum)],
            ["value sums that are not eigenvalues",
             " ".join(format_fraction(v) for v in spectrum.unreachable_sums) or "-"],
        ]
        return RenderedResult(payload, render_table(["quantity", "value"], rows))
