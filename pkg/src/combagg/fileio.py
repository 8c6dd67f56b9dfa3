"""Reading examinations, truths and corpora; writing CSV, JSON and run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .errors import FractionParseError, InputError, SchemaError
from .experiments import SessionSet
from .pcm import Examination, ExpertJudgment, Kind, make_pcm
from .robustness import ModelWeights

FLOAT_DIGITS = 12


def parse_number(raw: Any, where: str):
    """JSON number or exact fraction string ("16/7", "2.5") -> Fraction or float."""
    if isinstance(raw, bool):
        raise SchemaError(f"{where}: expected a number, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, float):
        return raw
    if isinstance(raw, str):
        try:
            return Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise FractionParseError(f"{where}: cannot parse {raw!r} as a fraction") from None
    raise SchemaError(f"{where}: expected a number or fraction string, got {raw!r}")


def load_json(path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in d:
        raise SchemaError(f"{where}: missing field {key!r}")
    return d[key]


def examination_from_dict(d: dict, source: str = "<examination>") -> Examination:
    kind = Kind.parse(_require(d, "kind", source))
    labels = _require(d, "objects", source)
    if not isinstance(labels, list) or len(labels) < 2:
        raise SchemaError(f"{source}: 'objects' must list at least 2 labels")
    experts = _require(d, "experts", source)
    if not isinstance(experts, list) or not experts:
        raise SchemaError(f"{source}: 'experts' must be a non-empty list")
    judgments = []
    for i, e in enumerate(experts):
        where = f"{source}: experts[{i}]"
        eid = str(_require(e, "id", where))
        where = f"{source}: expert {eid!r}"
        competence = float(parse_number(_require(e, "competence", where), f"{where}.competence"))
        entries = []
        for j, c in enumerate(_require(e, "comparisons", where)):
            cw = f"{where}.comparisons[{j}]"
            u, v = _require(c, "u", cw), _require(c, "v", cw)
            if not (isinstance(u, int) and isinstance(v, int)):
                raise SchemaError(f"{cw}: 'u' and 'v' must be integers")
            value = parse_number(_require(c, "value", cw), f"{cw}.value")
            grades = c.get("grades")
            if grades is not None and not isinstance(grades, int):
                raise SchemaError(f"{cw}: 'grades' must be an integer")
            entries.append((u, v, value, grades))
        try:
            pcm = make_pcm(len(labels), kind, entries)
            judgments.append(ExpertJudgment(eid, competence, pcm))
        except SchemaError:
            raise
        except InputError as exc:
            raise type(exc)(f"{where}: {exc}") from None
    return Examination(tuple(str(x) for x in labels), tuple(judgments))


def parse_examination(path) -> Examination:
    return examination_from_dict(load_json(path), str(path))


def examination_to_dict(exam: Examination) -> dict:
    def num(x):
        return f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else float(x)

    return {
        "kind": exam.kind.value,
        "objects": list(exam.object_labels),
        "experts": [
            {
                "id": j.expert_id,
                "competence": j.competence,
                "comparisons": [
                    {"u": u, "v": v, "value": num(x), "grades": j.pcm.grade(u, v)}
                    for (u, v), x in j.pcm.values.items()
                ],
            }
            for j in exam.judgments
        ],
    }


def truth_from_dict(d: dict, source: str = "<truth>", kind: Kind | str | None = None) -> ModelWeights:
    weights = _require(d, "weights", source)
    if not isinstance(weights, list):
        raise SchemaError(f"{source}: 'weights' must be a list")
    k = Kind.parse(kind) if kind is not None else Kind.parse(d.get("kind", "multiplicative"))
    return ModelWeights(tuple(float(parse_number(w, f"{source}.weights")) for w in weights), k)


def parse_truth(path, kind: Kind | str | None = None) -> ModelWeights:
    return truth_from_dict(load_json(path), str(path), kind)


def parse_corpus(path) -> SessionSet:
    """Manifest: {"truth": {...}, "sessions": [paths relative to the manifest]}."""
    path = Path(path)
    d = load_json(path)
    truth = truth_from_dict(_require(d, "truth", str(path)), f"{path}: truth")
    files = _require(d, "sessions", str(path))
    if not isinstance(files, list) or not files:
        raise SchemaError(f"{path}: 'sessions' must be a non-empty list")
    sessions, labels = [], None
    for f in files:
        exam = parse_examination(path.parent / f)
        if exam.m != 1:
            raise SchemaError(f"{f}: a session file holds exactly one expert, found {exam.m}")
        labels = labels or exam.object_labels
        sessions.append(exam.judgments[0])
    return SessionSet(d.get("objects", labels), truth, tuple(sessions))


def write_corpus(session_set: SessionSet, directory) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = []
    for s in session_set.sessions:
        name = f"{s.expert_id}.json"
        exam = Examination(session_set.object_labels, (s,))
        emit_json(examination_to_dict(exam), directory / name)
        files.append(name)
    manifest = {
        "objects": list(session_set.object_labels),
        "truth": {"kind": session_set.truth.kind.value, "weights": list(session_set.truth.weights)},
        "sessions": files,
    }
    out = directory / "manifest.json"
    emit_json(manifest, out)
    return out


def format_float(x: float) -> str:
    return f"{x:.{FLOAT_DIGITS}g}"


def _round_floats(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            return None
        return float(format_float(value))
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def emit_json(value, path) -> None:
    text = json.dumps(_round_floats(value), indent=2) + "\n"
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def emit_csv(rows: Iterable[dict], path, columns: Sequence[str]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([
                    format_float(row[c]) if isinstance(row[c], float) else row[c] for c in columns
                ])
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None
    version: str = __version__
    input_digests: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "version": self.version,
            "input_digests": dict(sorted(self.input_digests.items())),
        }

    def write_beside(self, output) -> Path:
        path = Path(str(output) + ".manifest.json")
        emit_json(self.to_dict(), path)
        return path
