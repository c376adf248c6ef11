"""
Report serialization for elw-lab commands.

JSON reports embed the engine version and the fully resolved config. CSV
tables carry data only; their provenance goes to a sibling
``<name>.provenance.json``.
"""

import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from settings import ENGINE_VERSION
from engine.chiral import StrategyPair
from engine.nash import EquilibriumReport, Witness
from utils.codec import encode_matrix, format_real

logger = logging.getLogger(__name__)


def serialize_pair(pair: StrategyPair) -> Dict[str, List[float]]:
    return {"alice": encode_matrix(pair.uA.matrix), "bob": encode_matrix(pair.uB.matrix)}


def serialize_witness(witness: Optional[Witness]) -> Optional[Dict[str, Any]]:
    if witness is None:
        return None
    return {
        "side": witness.side.value,
        "deviation": encode_matrix(witness.deviation.matrix),
        "gain": witness.gain,
        "value": witness.value,
        "source": witness.source,
    }


def serialize_equilibrium(report: EquilibriumReport) -> Dict[str, Any]:
    out = {
        "status": report.status.value,
        "candidate": serialize_pair(report.candidate),
        "payoffs": list(report.payoffs),
        "witness": serialize_witness(report.witness),
        "probes_used": report.probes_used,
        "epsilon": report.epsilon,
    }
    if report.termination is not None:
        out["termination"] = report.termination.value
        out["rounds"] = report.rounds
    return out


def envelope(command: str, config: Dict[str, Any], result: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a command result with its provenance."""
    return {
        "engine_version": ENGINE_VERSION,
        "command": command,
        "config": config,
        "result": result,
    }


def render_json(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_real(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


class ReportWriter:
    """Writes a command's report to a file, or to stdout when no path is set."""

    def __init__(self, path: Optional[Path], output_format: str):
        self.path = Path(path) if path else None
        self.output_format = output_format

    def _emit(self, path: Optional[Path], text: str) -> None:
        if path is None:
            sys.stdout.write(text)
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.info("Report: wrote %s", path)

    def write(self, document: Dict[str, Any],
              table: Optional[tuple] = None) -> None:
        """
        Write a report.

        Args:
            document: The JSON envelope (engine_version, command, config, result)
            table: Optional (header, rows) used when the format is csv
        """
        if self.output_format == "csv" and table is not None:
            header, rows = table
            self._emit(self.path, render_csv(header, rows))
            provenance = {k: v for k, v in document.items() if k != "result"}
            if self.path is not None:
                sidecar = self.path.with_name(self.path.name + ".provenance.json")
                self._emit(sidecar, render_json(provenance))
            return
        if self.output_format == "csv":
            logger.warning("Report: command '%s' has no tabular form; writing JSON",
                           document.get("command"))
        self._emit(self.path, render_json(document))
