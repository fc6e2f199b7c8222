"""Command line entry point: ``kstar-fano {enumerate, verify, show}``.

Exit codes: 0 success, 1 undocumented mismatch in ``verify``, 2 bad flags,
3 unknown key in ``show``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .construction import ConstructionError, FamilyInput
from .criteria import cone_systems, normal_form
from .enumerate import EXPECTED_TABLE, classify_all, count_differences
from .invariants import build_record

FORMATS = ("json", "csv", "md")


# ---------------------------------------------------------------- data

def _load(name):
    return json.loads(resources.files("kstar_fano").joinpath("data", name).read_text())


def load_lists(path=None) -> list[dict]:
    """Printed list entries: id, type, n, d, torsion, degree, numerator, family."""
    if path is None:
        return _load("printed_lists.json")
    with open(path) as f:
        return json.load(f)


def load_allowlist(path=None) -> list[dict]:
    if path is None:
        return _load("allowlist.json")
    with open(path) as f:
        return json.load(f)


@lru_cache(maxsize=1)
def _classification():
    return classify_all(check=False)


def list_id_map(lists=None) -> dict[str, int]:
    return {e["family"]: e["id"] for e in (lists or load_lists())}


# ---------------------------------------------------------------- parsing

_KEY = re.compile(r"^\s*([ABCabc])\s+d=([\d,]+)\s+l=([\d,]+)\s+s=(-?[\d,-]+)\s*$")


def parse_family(text: str) -> FamilyInput:
    m = _KEY.match(text)
    if not m:
        raise ValueError(f"cannot parse family key {text!r}")
    t, d, l, s = m.groups()
    ints = lambda x: tuple(int(v) for v in x.split(","))  # noqa: E731
    return FamilyInput(t, ints(d), ints(l), ints(s))


def _degree_list(text: str) -> tuple[int, ...]:
    try:
        d = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of integers: {text!r}")
    if not d or any(x < 1 for x in d):
        raise argparse.ArgumentTypeError("degrees must be positive")
    return tuple(sorted(d))


# ---------------------------------------------------------------- export rows

@dataclass(frozen=True)
class ExportRow:
    id: int
    list_id: int | None
    family: str
    type: str
    n: int
    d: tuple
    class_group: str
    template: tuple
    degree_matrix: tuple
    anti_k: tuple
    degree: int
    numerator: tuple
    g_flags: tuple
    notes: tuple

    def as_dict(self) -> dict:
        out = dict(self.__dict__)
        for k in ("d", "template", "anti_k", "numerator", "g_flags", "notes"):
            out[k] = list(out[k])
        out["degree_matrix"] = [list(r) for r in self.degree_matrix]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExportRow":
        data = dict(data)
        for k in ("d", "template", "anti_k", "numerator", "g_flags", "notes"):
            data[k] = tuple(data[k])
        data["degree_matrix"] = tuple(tuple(r) for r in data["degree_matrix"])
        return cls(**data)


def export_row(rec, list_ids=None, notes=()) -> ExportRow:
    fam = rec.input
    k = rec.anti_k
    return ExportRow(
        id=rec.id,
        list_id=(list_ids or {}).get(str(fam)),
        family=str(fam),
        type=fam.type,
        n=fam.n,
        d=fam.d,
        class_group=str(rec.grading.K),
        template=tuple(rec.template),
        degree_matrix=tuple(tuple(r) for r in rec.degree_matrix()),
        anti_k=tuple(k.free) + tuple(k.torsion),
        degree=rec.degree_cubed,
        numerator=tuple(rec.hilbert_numerator),
        g_flags=tuple(rec.g_flags),
        notes=tuple(notes),
    )


def _notes_by_family(allow) -> dict[str, list[str]]:
    lists = {e["id"]: e["family"] for e in load_lists()}
    out: dict[str, list[str]] = {}
    for a in allow:
        fam = lists.get(a["list_id"]) if a["list_id"] is not None else a.get("computed_value")
        if isinstance(fam, str):
            out.setdefault(fam, []).append(f"{a['field']}: {a['note']}")
    return out


def export_rows(records) -> list[ExportRow]:
    ids = list_id_map()
    notes = _notes_by_family(load_allowlist())
    return [export_row(r, ids, notes.get(str(r.input), ())) for r in records]


def rows_to_json(rows) -> str:
    return json.dumps([r.as_dict() for r in rows], indent=1)


def rows_from_json(text: str) -> list[ExportRow]:
    return [ExportRow.from_dict(x) for x in json.loads(text)]


def _ints(v, sep=" "):
    return sep.join(str(x) for x in v)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "list_id", "family", "type", "n", "d", "class_group", "relations",
                "degree_matrix", "anti_k", "degree", "numerator", "g_flags", "notes"])
    for r in rows:
        w.writerow([r.id, "" if r.list_id is None else r.list_id, r.family, r.type, r.n, _ints(r.d),
                    r.class_group, ";".join(r.template), ";".join(_ints(x) for x in r.degree_matrix),
                    _ints(r.anti_k), r.degree, _ints(r.numerator), ";".join(r.g_flags), ";".join(r.notes)])
    return buf.getvalue()


def rows_to_md(rows) -> str:
    def num(v):
        terms = []
        for i, c in enumerate(v):
            if c:
                coef = "" if (c == 1 and i) else str(c)
                terms.append(coef + ("" if i == 0 else "t" if i == 1 else f"t^{i}"))
        return " + ".join(terms)

    out = ["| ID | list ID | Cox ring relations | Q | -K | -K^3 | Hilbert numerator |",
           "|---|---|---|---|---|---|---|"]
    for r in rows:
        q = "<br>".join(_ints(x) for x in r.degree_matrix)
        out.append(f"| {r.id} | {r.list_id or ''} | {'<br>'.join(r.template)} | {q} | "
                   f"{_ints(r.anti_k)} | {r.degree} | {num(r.numerator)} |")
    return "\n".join(out) + "\n"


def render(rows, fmt: str) -> str:
    return {"json": rows_to_json, "csv": rows_to_csv, "md": rows_to_md}[fmt](rows)


# ---------------------------------------------------------------- verify

@dataclass(frozen=True)
class Discrepancy:
    list_id: int | None
    field: str
    printed_value: object
    computed_value: object
    family: str | None = None

    def matches(self, entry: dict) -> bool:
        return (entry.get("list_id") == self.list_id and entry.get("field") == self.field
                and entry.get("printed_value") == self.printed_value
                and entry.get("computed_value") == self.computed_value)

    def __str__(self):
        if self.list_id is not None:
            who = f"ID {self.list_id}"
        else:
            who = "table" if self.field.startswith("count") else "lists"
        fam = f" [{self.family}]" if self.family else ""
        return f"{who} {self.field}: printed {self.printed_value}, computed {self.computed_value}{fam}"


def find_discrepancies(records, counts, lists) -> list[Discrepancy]:
    out = []
    for (n, d), (want, got) in count_differences(counts).items():
        for t, a, b in zip("ABC", want, got):
            if a != b:
                out.append(Discrepancy(None, f"count {(n, d)} type {t}", a, b))
    by_family = {str(r.input): r for r in records}
    seen = set()
    for e in lists:
        rec = by_family.get(e["family"])
        if rec is None:
            out.append(Discrepancy(e["id"], "missing family", e["family"], None, e["family"]))
            continue
        seen.add(e["family"])
        if rec.degree_cubed != e["degree"]:
            out.append(Discrepancy(e["id"], "degree", e["degree"], rec.degree_cubed, e["family"]))
        if list(rec.hilbert_numerator) != list(e["numerator"]):
            out.append(Discrepancy(e["id"], "numerator", list(e["numerator"]),
                                   list(rec.hilbert_numerator), e["family"]))
    for fam in by_family:
        if fam not in seen:
            out.append(Discrepancy(None, "list entry", None, fam, fam))
    return out


def verify(records, counts, lists, allow) -> tuple[list[Discrepancy], list[Discrepancy]]:
    """Split discrepancies into (documented, undocumented)."""
    documented, undocumented = [], []
    for x in find_discrepancies(records, counts, lists):
        (documented if any(x.matches(a) for a in allow) else undocumented).append(x)
    return documented, undocumented


# ---------------------------------------------------------------- commands

def _emit(text: str, out):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_enumerate(args) -> int:
    records, _ = _classification()
    sel = [r for r in records
           if (args.type is None or r.type == args.type)
           and (args.n is None or r.input.n == args.n)
           and (args.d is None or tuple(sorted(r.input.d)) == args.d)]
    _emit(render(export_rows(sel), args.format), args.out)
    return 0


def cmd_verify(args) -> int:
    records, counts = _classification()
    lists = load_lists(args.lists)
    allow = [] if args.strict else load_allowlist(args.allowlist)
    documented, undocumented = verify(records, counts, lists, allow)
    lines = [f"families: {len(records)} computed, {len(lists)} in the printed lists",
             f"table rows: {len(EXPECTED_TABLE)}"]
    lines += [f"documented discrepancy: {x}" for x in documented]
    lines += [f"MISMATCH: {x}" for x in undocumented]
    lines.append(f"{len(documented)} documented discrepancies, {len(undocumented)} undocumented")
    _emit("\n".join(lines) + "\n", args.out)
    return 1 if undocumented else 0


def _show_text(rec, list_id, fam_in) -> str:
    fam = rec.input
    lines = [f"family: {fam}"]
    if str(fam_in) != str(fam):
        lines.append(f"normal form of: {fam_in}")
    lines.append(f"id: {rec.id if rec.id is not None else '-'}   list id: {list_id or '-'}")
    lines.append(f"class group: {rec.grading.K}")
    lines.append("degrees: " + "  ".join(f"T{k}={v}" for k, v in rec.grading.degrees.items()))
    for row in rec.degree_matrix():
        lines.append("  Q: " + " ".join(f"{x:>3}" for x in row))
    lines.append("relations:")
    lines += [f"  {t}" for t in rec.template]
    lines.append(f"-K: {rec.anti_k}   -K^3: {rec.degree_cubed}")
    lines.append(f"h(0..3): {list(rec.hilbert_values)}   numerator: {list(rec.hilbert_numerator)}")
    if rec.g_flags:
        lines.append("g flags: " + "; ".join(rec.g_flags))
    cert = rec.certificate.as_dict()
    lines.append("Gorenstein certificate (" + cert["type"] + "):")
    lines.append("  values: " + ", ".join(f"{k}={v}" for k, v in cert["values"].items()))
    lines.append("  checks: " + ", ".join(f"{k}: {'ok' if v else 'FAIL'}" for k, v in cert["checks"].items()))
    lines.append("cone systems (rows u = rhs):")
    for cs in cone_systems(fam):
        sol = "no integral solution" if cs.solution is None else f"u = {list(cs.solution)}"
        lines.append(f"  cone {','.join(cs.cone)}: rhs {list(cs.rhs)}, {sol}")
    return "\n".join(lines) + "\n"


def _resolve(key: str, by_id: bool):
    """(record, list id, input) for an artifact id, list id or family key; None if unknown."""
    records, _ = _classification()
    lists = load_lists()
    if key.strip().isdigit():
        k = int(key)
        if by_id:
            fams = [e["family"] for e in lists if e["id"] == k]
            if not fams:
                return None
            key = fams[0]
        else:
            hit = [r for r in records if r.id == k]
            if not hit:
                return None
            return hit[0], list_id_map(lists).get(str(hit[0].input)), hit[0].input
    try:
        fam = parse_family(key)
        nf = normal_form(fam)
        known = {str(r.input): r for r in records}
        rec = known.get(str(nf)) or build_record(nf)
    except (ValueError, ConstructionError, ArithmeticError):
        return None
    return rec, list_id_map(lists).get(str(nf)), fam


def cmd_show(args) -> int:
    hit = _resolve(" ".join(args.key), args.list_id)
    if hit is None:
        print(f"unknown key: {' '.join(args.key)}", file=sys.stderr)
        return 3
    rec, pid, fam = hit
    if args.format == "json":
        text = json.dumps(export_row(rec, {str(rec.input): pid} if pid else {}).as_dict(), indent=1) + "\n"
    else:
        text = _show_text(rec, pid, fam)
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write to this path instead of stdout")

    p = argparse.ArgumentParser(prog="kstar-fano", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", parents=[common], help="list the classified families")
    e.add_argument("--type", choices=["A", "B", "C"], type=str.upper)
    e.add_argument("--n", type=int)
    e.add_argument("--d", type=_degree_list, help="comma separated degrees, e.g. 1,2")
    e.add_argument("--format", choices=FORMATS, default="md")
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", parents=[common], help="compare with the embedded tables")
    v.add_argument("--strict", action="store_true", help="ignore the allowlist")
    v.add_argument("--lists", help="alternative list data (JSON)")
    v.add_argument("--allowlist", help="alternative allowlist (JSON)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("show", parents=[common], help="print one family")
    s.add_argument("key", nargs="+", help='artifact id, or a key like "A d=2 l=2,2,2,2 s=5,1,1,1"')
    s.add_argument("--list-id", action="store_true", help="interpret a numeric key as an id from the printed lists")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_show)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
