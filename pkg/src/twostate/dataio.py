"""File formats: study tables, sequence files, run curves, JSON reports.

All numeric output uses plain decimal with up to 9 significant digits and a
'.' separator, independent of locale, so fixed inputs produce byte-identical
files.  Data files are written atomically (temp file + rename).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from .estimate import RunFit, RunFitMethod, ScatterFit
from .simulate import BinarySequence, ScatterDataset


class DataFormatError(ValueError):
    """An input file does not match its declared format."""


class StudyFileError(DataFormatError):
    pass


class SequenceFormatError(DataFormatError):
    pass


class CurveFileError(DataFormatError):
    pass


@dataclass(frozen=True)
class StudyRecord:
    """One study row: identifier, size, proportion (or the successes it
    was computed from), optional group tag."""

    study_id: str
    n: int
    p_bar: float
    successes: int | None = None
    group: str | None = None


def fmt(x: float) -> str:
    """Canonical 9-significant-digit decimal rendering."""
    return f"{x:.9g}"


def round9(x: float) -> float:
    """Round to the canonical 9-significant-digit value."""
    return float(fmt(x))


def _read_text(source) -> str:
    if hasattr(source, "read"):
        return source.read()
    with open(source, "r", encoding="utf-8") as fh:
        return fh.read()


def write_text_atomic(path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    partially written file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _detect_delimiter(header_line: str) -> str:
    for cand in ("\t", ";", ","):
        if cand in header_line:
            return cand
    return ","


def parse_study_records(source) -> list[StudyRecord]:
    """Parse a delimiter-separated study table into records.

    The header must name study_id, n and exactly one non-empty per row of
    successes / p_bar; a group column is optional.  All malformed rows are
    collected and reported together with their line numbers.
    """
    text = _read_text(source)
    lines = text.splitlines()
    if not lines:
        raise StudyFileError("empty study file")
    delim = _detect_delimiter(lines[0])
    rows = list(csv.reader(io.StringIO(text), delimiter=delim))
    header = [h.strip().lower() for h in rows[0]]
    required = {"study_id", "n"}
    missing = required - set(header)
    if missing or not ({"successes", "p_bar"} & set(header)):
        raise StudyFileError(
            f"header must name study_id, n and successes and/or p_bar; got {header}"
        )
    col = {name: header.index(name) for name in header}

    def cell(row, name):
        i = col.get(name)
        if i is None or i >= len(row):
            return ""
        return row[i].strip()

    records, problems = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(field.strip() for field in row):
            continue
        study_id = cell(row, "study_id")
        group = cell(row, "group") or None
        raw_n = cell(row, "n")
        raw_succ = cell(row, "successes")
        raw_pbar = cell(row, "p_bar")
        try:
            n = int(raw_n)
            if n <= 0:
                raise ValueError
        except ValueError:
            problems.append(f"line {lineno}: n must be a positive integer, got {raw_n!r}")
            continue
        if bool(raw_succ) == bool(raw_pbar):
            problems.append(
                f"line {lineno}: exactly one of successes/p_bar must be given"
            )
            continue
        successes = None
        if raw_succ:
            try:
                successes = int(raw_succ)
                if not 0 <= successes <= n:
                    raise ValueError
            except ValueError:
                problems.append(f"line {lineno}: successes must be an integer in [0, n], got {raw_succ!r}")
                continue
            p_bar = successes / n
        else:
            try:
                p_bar = float(raw_pbar)
                if not 0.0 <= p_bar <= 1.0:
                    raise ValueError
            except ValueError:
                problems.append(f"line {lineno}: p_bar must lie in [0, 1], got {raw_pbar!r}")
                continue
        records.append(StudyRecord(study_id, n, p_bar, successes, group))
    if problems:
        raise StudyFileError("\n".join(problems))
    if not records:
        raise StudyFileError("study file contains no data rows")
    return records


def parse_studies(source) -> ScatterDataset:
    """Parse a study table straight into a scatter dataset."""
    records = parse_study_records(source)
    return ScatterDataset(
        np.array([r.n for r in records]),
        np.array([r.p_bar for r in records]),
        tuple(r.study_id for r in records),
    )


def parse_sequence(source, alphabet: tuple[str, str] | None = None) -> BinarySequence:
    """Read a binary sequence file.

    Default format is a stream of '0'/'1' characters with whitespace
    ignored.  With `alphabet` = (symbol_a, symbol_b), the file is read as
    whitespace-separated tokens instead.  Any third symbol is an error
    naming its position (1-based, counted over non-whitespace input).
    """
    text = _read_text(source)
    bits = []
    if alphabet is None:
        for ch in text:
            if ch.isspace():
                continue
            if ch == "1":
                bits.append(1)
            elif ch == "0":
                bits.append(0)
            else:
                raise SequenceFormatError(
                    f"unexpected symbol {ch!r} at position {len(bits) + 1}"
                )
    else:
        sym_a, sym_b = alphabet
        for pos, token in enumerate(text.split(), start=1):
            if token == sym_a:
                bits.append(1)
            elif token == sym_b:
                bits.append(0)
            else:
                raise SequenceFormatError(f"unexpected symbol {token!r} at position {pos}")
    if not bits:
        raise SequenceFormatError("sequence file contains no symbols")
    return BinarySequence(np.array(bits, dtype=np.uint8))


def sequence_text(seq: BinarySequence) -> str:
    return "".join("1" if s else "0" for s in seq.states.tolist()) + "\n"


def write_sequence(path, seq: BinarySequence) -> None:
    write_text_atomic(path, sequence_text(seq))


def curve_text(curve: dict) -> str:
    lines = ["m,frequency"]
    for m in sorted(curve):
        lines.append(f"{m},{fmt(curve[m])}")
    return "\n".join(lines) + "\n"


def write_curve(path, curve: dict) -> None:
    write_text_atomic(path, curve_text(curve))


def parse_curve(source) -> dict:
    """Read a two-column (m, frequency) table; header row optional."""
    text = _read_text(source)
    curve = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise CurveFileError(f"line {lineno}: expected two columns, got {line!r}")
        if lineno == 1 and not parts[0].lstrip("-").isdigit():
            continue  # header
        try:
            m = int(parts[0])
            f = float(parts[1])
            if m < 1 or f < 0.0:
                raise ValueError
        except ValueError:
            raise CurveFileError(f"line {lineno}: bad (m, frequency) pair {line!r}") from None
        if m in curve:
            raise CurveFileError(f"line {lineno}: duplicate run length {m}")
        curve[m] = f
    if not curve:
        raise CurveFileError("curve file contains no data rows")
    return curve


def funnel_table_text(ns, lower, upper) -> str:
    """(n, lower, upper) rows; bounds clamped to [0, 1] for display only."""
    lines = ["n,lower,upper"]
    for n, lo, hi in zip(ns, np.clip(lower, 0.0, 1.0), np.clip(upper, 0.0, 1.0)):
        lines.append(f"{fmt(n)},{fmt(lo)},{fmt(hi)}")
    return "\n".join(lines) + "\n"


def _round_nested(value):
    if isinstance(value, float):
        return round9(value)
    if isinstance(value, dict):
        return {k: _round_nested(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_nested(v) for v in value]
    return value


@dataclass(frozen=True)
class AnalysisReport:
    """Self-describing result record for one CLI invocation.

    Every derived quantity inside is recomputable from the recorded inputs
    digest plus the seed; no timestamps, so reruns are byte-identical.
    All floats are stored already rounded to the canonical 9 significant
    digits, which is what makes serialization round-trip exactly.
    """

    command: str
    version: str
    seed: int | None
    inputs: dict
    scatter_fit: ScatterFit | None = None
    run_fit: RunFit | None = None
    funnel_curve: dict | None = None
    run_curves: dict | None = None
    details: dict | None = None

    def to_dict(self) -> dict:
        body = {
            "tool": "twostate",
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "inputs": self.inputs,
            "scatter_fit": asdict(self.scatter_fit) if self.scatter_fit else None,
            "run_fit": None,
            "funnel_curve": self.funnel_curve,
            "run_curves": self.run_curves,
            "details": self.details,
        }
        if self.run_fit:
            rf = asdict(self.run_fit)
            rf["method"] = self.run_fit.method.value
            body["run_fit"] = rf
        return body

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def build(cls, **kwargs) -> "AnalysisReport":
        """Construct with all float payloads canonically rounded."""
        for key in ("inputs", "funnel_curve", "run_curves", "details"):
            if kwargs.get(key) is not None:
                kwargs[key] = _round_nested(kwargs[key])
        fit = kwargs.get("scatter_fit")
        if fit is not None:
            kwargs["scatter_fit"] = ScatterFit(
                pinf_hat=round9(fit.pinf_hat),
                nu_hat=round9(fit.nu_hat),
                p_hat=round9(fit.p_hat),
                q_hat=round9(fit.q_hat),
                coverage_achieved=round9(fit.coverage_achieved),
                n_points=fit.n_points,
            )
        rfit = kwargs.get("run_fit")
        if rfit is not None:
            kwargs["run_fit"] = RunFit(
                p11_hat=round9(rfit.p11_hat),
                p22_hat=round9(rfit.p22_hat),
                objective=round9(rfit.objective),
                method=rfit.method,
            )
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        data = json.loads(text)
        scatter = data.get("scatter_fit")
        run = data.get("run_fit")
        curves = data.get("run_curves")
        if curves is not None:
            curves = {
                state: {int(m): f for m, f in curve.items()} for state, curve in curves.items()
            }
        return cls(
            command=data["command"],
            version=data["version"],
            seed=data["seed"],
            inputs=data["inputs"],
            scatter_fit=ScatterFit(**scatter) if scatter else None,
            run_fit=RunFit(
                p11_hat=run["p11_hat"],
                p22_hat=run["p22_hat"],
                objective=run["objective"],
                method=RunFitMethod(run["method"]),
            )
            if run
            else None,
            funnel_curve=data.get("funnel_curve"),
            run_curves=curves,
            details=data.get("details"),
        )
