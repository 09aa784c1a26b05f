"""Machine-readable reports: versioned JSON plus round-trip-safe CSV.

Numbers are written with 17 significant digits ('.' decimal, no
separators) so a rerun with the same config reproduces byte-identical
CSV files; the JSON differs only in its wall_time_s field.  Files are
written atomically (temp file + rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA_VERSION = 1


def fmt(x) -> str:
    return f"{float(x):.17g}"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, str):
                cells.append(cell)
            elif isinstance(cell, (int,)) and not isinstance(cell, bool):
                cells.append(str(cell))
            else:
                cells.append(fmt(cell))
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


@dataclass
class Report:
    command: str
    config_echo: dict
    residuals: dict = field(default_factory=dict)
    spectrum: list = field(default_factory=list)
    convergence: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    wall_time_s: float = 0.0
    exit_status: int = 0

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config_echo,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "spectrum": self.spectrum,
            "convergence": self.convergence,
            "tables": self.tables,
            "flags": list(self.flags),
            "wall_time_s": self.wall_time_s,
            "exit_status": self.exit_status,
        }

    def write(self, out_dir) -> Path:
        out = Path(out_dir) / "report.json"
        atomic_write_text(out, json.dumps(self.to_dict(), indent=2,
                                          sort_keys=True) + "\n")
        return out
