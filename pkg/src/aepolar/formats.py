"""Text formats for code profiles and automorphism representative lists.

Profile file::

    # aepolar profile v1
    n: 8
    K: 128
    crc_bits: 0
    structure: 3 5
    design_snr_db: 0.0
    frozen:
    0 1 2 ...

Representative file, one representative per line, ``p_vec | u_vec``::

    # aepolar representatives v1
    # structure: 3 5
    0 1 2 3 4 5 6 7 | 0000000000000
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .autgroup import EcRepresentative
from .construct import CodeProfile
from .gf2 import BlockStructure

PROFILE_HEADER = "# aepolar profile v1"
REPS_HEADER = "# aepolar representatives v1"


class FormatError(ValueError):
    pass


def dump_profile(profile: CodeProfile) -> str:
    lines = [
        PROFILE_HEADER,
        f"n: {profile.n}",
        f"K: {profile.K}",
        f"crc_bits: {profile.crc_bits}",
        f"structure: {' '.join(map(str, profile.structure.sizes))}",
        f"design_snr_db: {profile.design_snr_db!r}",
        "frozen:",
        " ".join(map(str, profile.frozen_set)),
    ]
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> CodeProfile:
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != PROFILE_HEADER:
        raise FormatError("missing profile header")
    fields: dict[str, str] = {}
    frozen: list[int] | None = None
    for k, ln in enumerate(lines[1:], start=1):
        if not ln or ln.startswith("#"):
            continue
        if ln == "frozen:":
            frozen = [int(tok) for tok in " ".join(lines[k + 1:]).split()]
            break
        key, sep, value = ln.partition(":")
        if not sep:
            raise FormatError(f"line {k + 1}: expected 'key: value'")
        fields[key.strip()] = value.strip()
    if frozen is None:
        raise FormatError("missing frozen set")
    try:
        n = int(fields["n"])
        K = int(fields["K"])
        crc = int(fields.get("crc_bits", "0"))
        structure = BlockStructure(tuple(int(s) for s in fields["structure"].split()))
        snr = float(fields.get("design_snr_db", "0.0"))
    except KeyError as e:
        raise FormatError(f"missing field {e.args[0]}") from None
    N = 1 << n
    if len(set(frozen)) != len(frozen) or any(not 0 <= i < N for i in frozen):
        raise FormatError("frozen set must hold distinct indices in [0, N)")
    info = sorted(set(range(N)) - set(frozen))
    if len(info) != K:
        raise FormatError(f"frozen set leaves {len(info)} information bits, header says K={K}")
    return CodeProfile(n, K, tuple(info), structure, crc, snr)


def save_profile(profile: CodeProfile, path) -> None:
    Path(path).write_text(dump_profile(profile))


def load_profile(path) -> CodeProfile:
    return parse_profile(Path(path).read_text())


def dump_representatives(reps, structure) -> str:
    structure = BlockStructure.of(structure)
    lines = [REPS_HEADER, f"# structure: {' '.join(map(str, structure.sizes))}"]
    for r in reps:
        p = " ".join(str(int(v)) for v in r.p_vec)
        u = "".join(str(int(v)) for v in r.u_vec)
        lines.append(f"{p} | {u}")
    return "\n".join(lines) + "\n"


def parse_representatives(text: str) -> tuple[BlockStructure, list[EcRepresentative]]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != REPS_HEADER:
        raise FormatError("missing representatives header")
    structure = None
    reps = []
    for k, ln in enumerate(lines[1:], start=2):
        ln = ln.strip()
        if ln.startswith("# structure:"):
            structure = BlockStructure(tuple(int(s) for s in ln.split(":", 1)[1].split()))
            continue
        if not ln or ln.startswith("#"):
            continue
        if structure is None:
            raise FormatError("structure line must precede representatives")
        p_txt, sep, u_txt = ln.partition("|")
        if not sep:
            raise FormatError(f"line {k}: expected 'p_vec | u_vec'")
        p = [int(tok) for tok in p_txt.split()]
        u = [int(ch) for ch in u_txt.strip()]
        try:
            reps.append(EcRepresentative.build(structure, p, np.array(u, dtype=np.uint8)))
        except ValueError as e:
            raise FormatError(f"line {k}: {e}") from None
    if structure is None:
        raise FormatError("missing structure line")
    return structure, reps


def save_representatives(reps, structure, path) -> None:
    Path(path).write_text(dump_representatives(reps, structure))


def load_representatives(path) -> tuple[BlockStructure, list[EcRepresentative]]:
    return parse_representatives(Path(path).read_text())
