"""Bundled corpus of groups with complete maximal subgroup class data.

Line-oriented text format, canonical serialization (classes sorted by
index, then order, then name), and two validation modes: `fast` checks
membership, orders, indices and primitivity certificates; `oracle`
additionally enumerates the full subgroup lattice (|G| <= oracle bound)
and proves the listed collection complete.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import Budget, DEFAULT_BUDGET, InputError, ValidationError
from .groupanalysis import GroupContext, enumerate_elements
from .invariants import MaximalCollection
from .permcore import GeneratedGroup, Permutation, is_primitive, stabilizer_chain

FORMAT_HEADER = "mindim-group v1"


@dataclass
class ClassRecord:
    name: str
    order: int
    index: int
    tags: list
    provenance: str
    generators: list  # list of image lists


@dataclass
class GroupFile:
    name: str
    degree: int
    order: int
    complete: bool
    stretch: bool
    provenance: str
    generators: list
    classes: list = field(default_factory=list)

    def canonical_text(self) -> str:
        out = [FORMAT_HEADER]
        out.append(f"name: {self.name}")
        out.append(f"degree: {self.degree}")
        out.append(f"order: {self.order}")
        out.append(f"complete: {'true' if self.complete else 'false'}")
        out.append(f"stretch: {'true' if self.stretch else 'false'}")
        out.append(f"provenance: {self.provenance}")
        out.append(f"generators: {len(self.generators)}")
        for g in self.generators:
            out.append(" ".join(map(str, g)))
        for cls in sorted(self.classes, key=lambda c: (c.index, c.order, c.name)):
            out.append(f"class: {cls.name}")
            out.append(f"order: {cls.order}")
            out.append(f"index: {cls.index}")
            out.append(f"tags: {','.join(cls.tags)}")
            out.append(f"provenance: {cls.provenance}")
            out.append(f"generators: {len(cls.generators)}")
            for g in cls.generators:
                out.append(" ".join(map(str, g)))
            out.append("endclass")
        out.append("end")
        return "\n".join(out) + "\n"


def parse_group_file(text: str) -> GroupFile:
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise InputError("not a mindim group file (bad header)")
    pos = 1

    def take(prefix):
        nonlocal pos
        line = lines[pos]
        if not line.startswith(prefix):
            raise InputError(f"expected {prefix!r} at line {pos + 1}")
        pos += 1
        return line[len(prefix):].strip()

    def take_perms(count):
        nonlocal pos
        out = []
        for _ in range(count):
            out.append([int(x) for x in lines[pos].split()])
            pos += 1
        return out

    name = take("name:")
    degree = int(take("degree:"))
    order = int(take("order:"))
    complete = take("complete:") == "true"
    stretch = take("stretch:") == "true"
    provenance = take("provenance:")
    gen_count = int(take("generators:"))
    generators = take_perms(gen_count)
    classes = []
    while pos < len(lines) and lines[pos].startswith("class:"):
        cname = take("class:")
        corder = int(take("order:"))
        cindex = int(take("index:"))
        tags = [t for t in take("tags:").split(",") if t]
        cprov = take("provenance:")
        cgen_count = int(take("generators:"))
        cgens = take_perms(cgen_count)
        if lines[pos].strip() != "endclass":
            raise InputError(f"missing endclass at line {pos + 1}")
        pos += 1
        classes.append(ClassRecord(cname, corder, cindex, tags, cprov, cgens))
    if pos >= len(lines) or lines[pos].strip() != "end":
        raise InputError("missing end marker")
    return GroupFile(name, degree, order, complete, stretch, provenance, generators, classes)


def corpus_dir() -> Path:
    return Path(str(resources.files("mindim.data").joinpath("corpus")))


def corpus_path(name: str) -> Path:
    return corpus_dir() / f"{name}.grp"


def list_corpus() -> list:
    d = corpus_dir()
    if not d.is_dir():
        return []
    return sorted(p.stem for p in d.glob("*.grp"))


def verify_manifest() -> bool:
    d = corpus_dir()
    manifest = d / "MANIFEST"
    if not manifest.is_file():
        raise ValidationError("corpus MANIFEST is missing")
    listed = {}
    for line in manifest.read_text().splitlines():
        if not line.strip():
            continue
        digest, fname = line.split()
        listed[fname] = digest
    files = {p.name for p in d.glob("*.grp")}
    if files != set(listed):
        raise ValidationError("corpus files do not match the MANIFEST")
    for fname, digest in listed.items():
        actual = hashlib.sha256((d / fname).read_bytes()).hexdigest()
        if actual != digest:
            raise ValidationError(f"checksum mismatch for {fname}")
    return True


@dataclass
class LoadedGroup:
    record: GroupFile
    ctx: GroupContext
    collection: MaximalCollection
    path: Optional[Path] = None


def _resolve(path_or_name) -> Path:
    p = Path(path_or_name)
    if p.is_file():
        return p
    candidate = corpus_path(str(path_or_name))
    if candidate.is_file():
        return candidate
    raise InputError(f"group file not found: {path_or_name}")


def load_group(path_or_name, budget: Budget = DEFAULT_BUDGET,
               skip_validate: bool = False) -> LoadedGroup:
    """Parse a group file, build its chain, and validate unless told not to."""
    path = _resolve(path_or_name)
    record = parse_group_file(path.read_text())
    budget.check_degree(record.degree, "group degree")
    group = GeneratedGroup.from_images(record.generators, label=record.name)
    ctx = GroupContext(group, budget=budget)
    if ctx.order != record.order:
        raise ValidationError(
            f"{record.name}: declared order {record.order} != computed {ctx.order}"
        )
    reps = []
    for cls in record.classes:
        rec = ctx.subgroup(
            [Permutation(np.array(g, dtype=np.int32)) for g in cls.generators],
            tags=[cls.name] + cls.tags,
            with_ranks=False,
        )
        if rec.order != cls.order:
            raise ValidationError(
                f"{record.name}/{cls.name}: declared order {cls.order} != computed {rec.order}"
            )
        if ctx.order // rec.order != cls.index:
            raise ValidationError(f"{record.name}/{cls.name}: index mismatch")
        reps.append(rec)
    collection = MaximalCollection(ctx, reps, complete=record.complete)
    loaded = LoadedGroup(record, ctx, collection, path)
    if not skip_validate:
        validate_record(loaded, mode="fast")
    return loaded


def validate_record(loaded: LoadedGroup, mode: str = "fast") -> dict:
    """fast: membership + orders + indices + primitivity certificates.

    oracle: additionally enumerate every subgroup (|G| <= oracle bound) and
    confirm the listed maximal classes are complete.
    """
    record = loaded.record
    ctx = loaded.ctx
    report = {"name": record.name, "mode": mode, "classes": []}
    for cls_rec, rep in zip(record.classes, loaded.collection.class_reps):
        for g in rep.generators:
            if not ctx.chain.contains(g):
                raise ValidationError(f"{record.name}/{cls_rec.name}: generator not in group")
        action = rep.coset_action()
        ok, block = is_primitive(action)
        if not ok:
            raise ValidationError(
                f"{record.name}/{cls_rec.name}: coset action imprimitive (block {block})"
            )
        report["classes"].append({"name": cls_rec.name, "index": cls_rec.index, "primitive": True})
    if mode == "fast":
        return report
    if mode != "oracle":
        raise InputError(f"unknown validation mode {mode!r}")
    if ctx.order > ctx.budget.oracle_bound:
        raise InputError(
            f"oracle validation limited to |G| <= {ctx.budget.oracle_bound}"
        )
    maximal_classes = _oracle_maximal_classes(ctx)
    listed_keys = set()
    for rep in loaded.collection.class_reps:
        listed_keys.add(_class_key_of(ctx, rep.ranks, maximal_classes))
    if None in listed_keys:
        raise ValidationError(f"{record.name}: a listed class is not maximal (oracle)")
    if len(listed_keys) != len(maximal_classes):
        raise ValidationError(
            f"{record.name}: oracle found {len(maximal_classes)} maximal classes, "
            f"file lists {len(listed_keys)}"
        )
    report["oracle_maximal_classes"] = len(maximal_classes)
    return report


def _oracle_maximal_classes(ctx: GroupContext):
    """All conjugacy classes of maximal subgroups by full lattice closure."""
    table = ctx.table
    order = ctx.order
    rows = table.elements
    # multiplication on ranks through the table
    def close(ranks):
        current = set(int(r) for r in ranks)
        frontier = list(current)
        while frontier:
            nxt = []
            for a in frontier:
                arow = rows[a]
                prods = arow[rows[sorted(current)]]
                got = table.rank_rows(prods)
                for r in got.tolist():
                    if r not in current:
                        current.add(r)
                        nxt.append(r)
            frontier = nxt
        return np.array(sorted(current), dtype=np.uint32)

    identity = table.identity_rank
    subgroups = {}
    triv = np.array([identity], dtype=np.uint32)
    subgroups[triv.tobytes()] = triv
    frontier = [triv]
    while frontier:
        nxt = []
        for s in frontier:
            sset = set(int(x) for x in s)
            for x in range(order):
                if x in sset:
                    continue
                t = close(list(s) + [x])
                key = t.tobytes()
                if key not in subgroups:
                    subgroups[key] = t
                    if t.shape[0] < order:
                        nxt.append(t)
        frontier = nxt
    proper = [s for s in subgroups.values() if s.shape[0] < order]
    maximal = []
    for s in proper:
        is_max = True
        for t in proper:
            if t.shape[0] <= s.shape[0] or t.shape[0] == order:
                continue
            if np.isin(s, t, assume_unique=True).all():
                is_max = False
                break
        if is_max:
            maximal.append(s)
    # conjugacy classes
    classes = []
    seen = set()
    for s in sorted(maximal, key=lambda a: (a.shape[0], a.tobytes())):
        if s.tobytes() in seen:
            continue
        orbit = {s.tobytes(): s}
        queue = [s]
        while queue:
            cur = queue.pop()
            for g in ctx.group.generators:
                conj = table.conjugate_ranks(cur, g)
                if conj.tobytes() not in orbit:
                    orbit[conj.tobytes()] = conj
                    queue.append(conj)
        seen |= set(orbit)
        classes.append(orbit)
    return classes


def _class_key_of(ctx, ranks, classes):
    key = ranks.tobytes()
    for i, orbit in enumerate(classes):
        if key in orbit:
            return i
    return None


def write_group_file(path: Path, record: GroupFile):
    path.write_text(record.canonical_text())


def write_manifest(directory: Path):
    lines = []
    for p in sorted(directory.glob("*.grp")):
        digest = hashlib.sha256(p.read_bytes()).hexdigest()
        lines.append(f"{digest} {p.name}")
    (directory / "MANIFEST").write_text("\n".join(lines) + "\n")
