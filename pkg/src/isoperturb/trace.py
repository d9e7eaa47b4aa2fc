"""Structured (json-lines) and human renderings of an :class:`~isoperturb.engine.Outcome`.

All scalars are written as decimal strings; exact rationals also carry ``"p/q"``.
"""

from __future__ import annotations

import json
from decimal import Context, Decimal
from fractions import Fraction

import gmpy2

from .config import RunConfig
from .engine import IterationRecord, Outcome, Partition
from .numkit import as_fraction, format_scalar

FORMAT_NAME = "isoperturb-trace"
FORMAT_VERSION = 1
DECIMAL_DIGITS = 20


def _exact(x) -> Fraction:
    if isinstance(x, type(gmpy2.mpfr())):
        return as_fraction(gmpy2.mpq(x))
    return as_fraction(x)


def decimal_str(x, digits: int = DECIMAL_DIGITS) -> str | None:
    if x is None:
        return None
    q = _exact(x)
    ctx = Context(prec=digits)
    return str(ctx.divide(Decimal(q.numerator), Decimal(q.denominator)))


def fraction_str(x) -> str | None:
    if x is None:
        return None
    q = _exact(x)
    return f"{q.numerator}/{q.denominator}"


def _partition_doc(p: Partition | None) -> dict | None:
    if p is None:
        return None
    return {
        "classes": [list(c) for c in p.classes],
        "deltas": {f"{k}-{l}": decimal_str(v) for (k, l), v in sorted(p.deltas.items())},
    }


def record_doc(r: IterationRecord, timing: bool = True, partitions: bool = False) -> dict:
    doc = {
        "j": r.j,
        "epsilon": decimal_str(r.epsilon),
        "epsilon_exact": fraction_str(r.epsilon),
        "candidates_tried": list(r.candidates_tried),
        "k_j": r.k_j,
        "m_A": r.m_A,
        "m_B": r.m_B,
        "delta_min": decimal_str(r.delta_min),
        "sweeps": r.sweeps,
        "wall_time_ms": round(r.wall_time_ms, 3) if timing else None,
    }
    if partitions:
        doc["partition_A"] = _partition_doc(r.partition_A)
        doc["partition_B"] = _partition_doc(r.partition_B)
    return doc


def verdict_doc(outcome: Outcome) -> dict:
    v = outcome.verdict
    doc = {"verdict": "isomorphic" if outcome.is_isomorphic else "not_isomorphic_or_unreconstructible"}
    if outcome.is_isomorphic:
        doc["mapping"] = str(v.mapping)
    else:
        doc.update(
            reason=v.reason,
            failed_at_iteration=v.failed_at_iteration,
            failed_vertex=v.failed_vertex,
            demoted=v.demoted,
            bits_needed=v.bits_needed,
            pre_scheme_reject=outcome.pre_scheme_reject,
        )
    doc["n0"] = outcome.n0
    return doc


def to_json_lines(outcome: Outcome, config: RunConfig, n: int, timing: bool = True,
                  partitions: bool = False) -> str:
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "n": n,
        "backend": config.backend,
        "eps_mode": config.eps_mode,
        "mantissa_bits": config.mantissa_bits,
        "seed": config.seed,
    }
    lines = [header]
    lines += [record_doc(r, timing, partitions) for r in outcome.trace]
    lines.append(verdict_doc(outcome))
    return "".join(json.dumps(doc, sort_keys=True) + "\n" for doc in lines)


# ------------------------------------------------------------------ human

def correspondence_str(n: int, assigned: dict[int, int]) -> str:
    return " ".join(str(assigned.get(v, ".")) for v in range(1, n + 1))


def render_partition(p: Partition, name: str = "A", j: int = 0, digits: int = 4) -> str:
    sets = ", ".join(
        f"R{k}({name}^{j})={{{','.join(map(str, c))}}}" for k, c in enumerate(p.classes, start=1)
    )
    lines = [sets]
    if p.deltas:
        lines.append(", ".join(
            f"D{k}{l}={format_scalar(v, digits)}" for (k, l), v in sorted(p.deltas.items())
        ))
    lines.append(f"m({name}^{j})={p.m}")
    return "\n".join(lines)


def render_human(outcome: Outcome, n: int, partitions: bool = False) -> str:
    out = []
    assigned: dict[int, int] = {}
    for r in outcome.trace:
        if r.j == 0:
            out.append("before iteration 1:")
        else:
            eps = format_scalar(r.epsilon) if r.epsilon is not None else "-"
            out.append(f"iteration {r.j}: eps={eps} (exact {fraction_str(r.epsilon)}), "
                       f"candidates tried {r.candidates_tried}, k_{r.j}={r.k_j}")
            if r.k_j is not None:
                assigned[r.j] = r.k_j
                out.append(f"  correspondence: {correspondence_str(n, assigned)}")
        if partitions and r.partition_A is not None:
            out.extend("  " + line for line in render_partition(r.partition_A, "A", r.j).splitlines())
        else:
            out.append(f"  m(A)={r.m_A} m(B)={r.m_B}")
    v = verdict_doc(outcome)
    if outcome.is_isomorphic:
        out.append(f"isomorphic; mapping: {v['mapping']}")
    else:
        out.append(f"not isomorphic or not reconstructible: {v['reason']}")
    return "\n".join(out) + "\n"
