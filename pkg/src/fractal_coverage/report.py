"""Run reports and the columnar text files written by the CLI."""

from __future__ import annotations

import hashlib
import io
import json
from dataclasses import dataclass, field

from . import __version__
from .hurst import METHODS, HurstEstimate

METHOD_LABELS = {
    "periodogram": "Periodogram method",
    "rs": "Rescaled adjusted range statistic method",
    "variance_time": "Variance-time analysis method",
}


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def estimate_entry(result) -> dict:
    if isinstance(result, HurstEstimate):
        return {
            "h": result.h,
            "slope": result.slope,
            "n_points": result.n_points,
            "r_squared": result.r_squared,
        }
    return {"unavailable": str(result)}


def estimates_csv(results: dict, header: str = "") -> str:
    """``method,h,slope,n_points,r_squared``; unavailable methods are commented out."""
    buf = io.StringIO()
    if header:
        buf.write(header)
    buf.write("method,h,slope,n_points,r_squared\n")
    for method in METHODS:
        res = results[method]
        if isinstance(res, HurstEstimate):
            buf.write(res.as_row() + "\n")
        else:
            buf.write(f"# {method} unavailable: {res}\n")
    return buf.getvalue()


def loglog_csv(est: HurstEstimate, header: str = "") -> str:
    buf = io.StringIO()
    if header:
        buf.write(header)
    buf.write(f"# method = {est.method}\n# slope = {est.slope!r}\n# intercept = {est.intercept!r}\n")
    buf.write("log10_x,log10_y\n")
    for a, b in zip(est.log10_x, est.log10_y):
        buf.write(f"{float(a)!r},{float(b)!r}\n")
    return buf.getvalue()


def comment_header(config: dict) -> str:
    """Config echo as ``# key = value`` lines, keys sorted."""
    return "".join(f"# {k} = {config[k]}\n" for k in sorted(config))


@dataclass
class RunReport:
    """Everything a run produced, serializable to deterministic JSON."""

    command: str
    estimates: dict
    boundary: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.provenance.setdefault("version", __version__)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "estimates": {m: estimate_entry(self.estimates[m]) for m in METHODS if m in self.estimates},
            "boundary": self.boundary,
            "stats": self.stats,
            "provenance": self.provenance,
        }
        return json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n"

    @staticmethod
    def load(text: str) -> dict:
        return json.loads(text)


def format_table(report: dict) -> str:
    """Human-readable table of a report loaded from JSON."""
    lines = [f"Hurst parameter ({report.get('command', '?')})", ""]
    width = max(len(v) for v in METHOD_LABELS.values())
    hs = []
    for method in METHODS:
        entry = report.get("estimates", {}).get(method)
        label = METHOD_LABELS[method].ljust(width)
        if entry is None:
            continue
        if "unavailable" in entry:
            lines.append(f"{label}  unavailable ({entry['unavailable']})")
        else:
            hs.append(entry["h"])
            lines.append(f"{label}  {entry['h']:.4f}  (slope {entry['slope']:.4f}, "
                         f"{entry['n_points']} pts, r2 {entry['r_squared']:.3f})")
    if hs:
        lines.append(f"{'Mean value of Hurst'.ljust(width)}  {sum(hs) / len(hs):.4f}")
    b = report.get("boundary") or {}
    if b:
        lines.append("")
        lines.append("boundary: " + ", ".join(f"{k}={b[k]}" for k in sorted(b)))
    return "\n".join(lines) + "\n"
