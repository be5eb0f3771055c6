"""Configuration-driven command line front end.

One JSON config declares named algebras, spaces, function systems and
quadruples plus a ``run`` list of commands; every command writes a
deterministic ``<name>.report.json`` (and ``.csv`` / ``.pgm`` where
geometry is involved) under the output directory.  Identical config and
seed produce byte-identical outputs.

    shilov --config experiment.json [--output-dir out] [--seed N] [--quiet]
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .algebra import AlgebraSpec, preset_algebra, validate_algebra
from .boundary import (
    BOUNDARY_SEED,
    certify_peak,
    partition_to_csv,
    partition_to_pgm,
    shilov_estimate,
    synthesize_product_peaker,
    verify_peak_product,
    verify_product_theorem,
    witnesses_from_system,
)
from .characters import characters, radical, semisimple_quotient
from .function_algebras import (
    FunctionSystem,
    Quadruple,
    check_admissible,
    close_under_products,
    make_CXE,
    make_lip,
    make_poly,
    make_rational,
    validate_system,
)
from .reports import canonical_json, pair_to_complex
from .spaces import (
    Annulus,
    BoundaryUniform,
    CircleSample,
    Disk,
    FiniteSpace,
    InteriorGrid,
    RasterRegion,
    combine_spaces,
    polynomial_hull_raster,
    raster_from_shape,
    sample_raster,
    topological_boundary_raster,
    validate_metric,
    write_pgm,
)

_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["run"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "output_dir": {"type": "string"},
        "algebras": {
            "type": "object",
            "additionalProperties": {
                "oneOf": [
                    {"type": "string"},
                    {
                        "type": "object",
                        "required": ["dim", "structure", "unit", "weights"],
                        "properties": {
                            "dim": {"type": "integer", "minimum": 1},
                            "structure": {"type": "array"},
                            "unit": {"type": "array"},
                            "weights": {"type": "array"},
                            "label": {"type": "string"},
                        },
                    },
                ]
            },
        },
        "spaces": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "oneOf": [
                    {"required": ["points"]},
                    {"required": ["shape", "resolution"]},
                    {"required": ["sample_of", "strategies"]},
                ],
                "properties": {
                    "points": {"type": "array", "items": {"type": "string"}},
                    "coords": {"type": "array", "items": _PAIR},
                    "metric": {"type": "array"},
                    "shape": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["kind"],
                            "properties": {
                                "kind": {"enum": ["disk", "annulus"]},
                                "center": _PAIR,
                                "radius": {"type": "number"},
                                "inner": {"type": "number"},
                                "outer": {"type": "number"},
                            },
                        },
                    },
                    "resolution": {"type": "integer", "minimum": 8},
                    "sample_of": {"type": "string"},
                    "strategies": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["kind"],
                            "properties": {
                                "kind": {
                                    "enum": ["circle", "interior_grid", "boundary_uniform"]
                                },
                                "center": _PAIR,
                                "radius": {"type": "number"},
                                "count": {"type": "integer", "minimum": 1},
                                "step": {"type": "number"},
                            },
                        },
                    },
                },
            },
        },
        "systems": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["kind", "space", "algebra"],
                "properties": {
                    "kind": {"enum": ["cxe", "lip", "poly", "rational"]},
                    "space": {"type": "string"},
                    "algebra": {"type": "string"},
                    "alpha": {"type": "number"},
                    "degree": {"type": "integer", "minimum": 0},
                    "poles": {"type": "array", "items": _PAIR},
                    "close": {"type": "boolean"},
                },
            },
        },
        "quadruples": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["space", "algebra", "scalar_system", "vector_system"],
                "properties": {
                    "space": {"type": "string"},
                    "algebra": {"type": "string"},
                    "scalar_system": {"type": "string"},
                    "vector_system": {"type": "string"},
                },
            },
        },
        "run": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["command", "target"],
                "properties": {
                    "command": {
                        "enum": [
                            "characters",
                            "validate",
                            "hull",
                            "shilov",
                            "verify-product",
                            "verify-peaks",
                            "peaker",
                        ]
                    },
                    "target": {"type": "string"},
                    "name": {"type": "string"},
                    "tol": {"type": "number"},
                    "m": {"type": "integer", "minimum": 8},
                    "regime": {"enum": ["exact", "estimation"]},
                    "raster": {"type": "string"},
                    "point": {"type": "string"},
                    "character": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


class ConfigError(ValueError):
    pass


class _Workspace:
    """Named objects resolved lazily from the config."""

    def __init__(self, config: dict):
        self.config = config
        self._algebras: dict[str, AlgebraSpec] = {}
        self._spaces: dict[str, FiniteSpace | RasterRegion] = {}
        self._systems: dict[str, FunctionSystem] = {}
        self._quadruples: dict[str, Quadruple] = {}

    def algebra(self, name: str) -> AlgebraSpec:
        if name not in self._algebras:
            table = self.config.get("algebras", {})
            if name not in table:
                try:
                    return preset_algebra(name)
                except Exception:
                    raise ConfigError(f"unknown algebra reference {name!r}") from None
            spec = table[name]
            if isinstance(spec, str):
                self._algebras[name] = preset_algebra(spec)
            else:
                self._algebras[name] = AlgebraSpec.from_dict({"label": name, **spec})
        return self._algebras[name]

    def space(self, name: str):
        if name not in self._spaces:
            table = self.config.get("spaces", {})
            if name not in table:
                raise ConfigError(f"unknown space reference {name!r}")
            self._spaces[name] = self._build_space(table[name])
        return self._spaces[name]

    def _build_space(self, spec: dict):
        if "points" in spec:
            coords = None
            if spec.get("coords") is not None:
                coords = np.array([pair_to_complex(p) for p in spec["coords"]])
            metric = np.asarray(spec["metric"], float) if spec.get("metric") else None
            return FiniteSpace(tuple(spec["points"]), coords, metric)
        if "shape" in spec:
            shapes = []
            for sh in spec["shape"]:
                center = pair_to_complex(sh.get("center", [0.0, 0.0]))
                if sh["kind"] == "disk":
                    shapes.append(Disk(center, float(sh["radius"])))
                else:
                    shapes.append(Annulus(center, float(sh["inner"]), float(sh["outer"])))
            return raster_from_shape(shapes, int(spec["resolution"]))
        if "sample_of" in spec:
            base = self.space(spec["sample_of"])
            if not isinstance(base, RasterRegion):
                raise ConfigError(f"{spec['sample_of']!r} is not a raster region")
            parts = []
            for st in spec["strategies"]:
                if st["kind"] == "circle":
                    parts.append(
                        sample_raster(
                            base,
                            CircleSample(
                                pair_to_complex(st.get("center", [0.0, 0.0])),
                                float(st["radius"]),
                                int(st["count"]),
                            ),
                        )
                    )
                elif st["kind"] == "interior_grid":
                    parts.append(sample_raster(base, InteriorGrid(float(st["step"]))))
                else:
                    parts.append(sample_raster(base, BoundaryUniform(int(st["count"]))))
            return parts[0] if len(parts) == 1 else combine_spaces(*parts)
        raise ConfigError("space spec must give points, shape, or sample_of")

    def system(self, name: str) -> FunctionSystem:
        if name not in self._systems:
            table = self.config.get("systems", {})
            if name not in table:
                raise ConfigError(f"unknown system reference {name!r}")
            spec = table[name]
            space = self.space(spec["space"])
            if not isinstance(space, FiniteSpace):
                raise ConfigError(f"system {name!r} needs a finite space")
            E = self.algebra(spec["algebra"])
            kind = spec["kind"]
            if kind == "cxe":
                system = make_CXE(space, E, label=name)
            elif kind == "lip":
                system = make_lip(space, E, float(spec.get("alpha", 1.0)), label=name)
            elif kind == "poly":
                system = make_poly(space, E, int(spec.get("degree", 1)), label=name)
            else:
                poles = [pair_to_complex(p) for p in spec.get("poles", [])]
                system = make_rational(
                    space, E, int(spec.get("degree", 1)), poles, label=name
                )
            if spec.get("close") and not system.closed:
                system = close_under_products(system)
            self._systems[name] = system
        return self._systems[name]

    def quadruple(self, name: str) -> Quadruple:
        if name not in self._quadruples:
            table = self.config.get("quadruples", {})
            if name not in table:
                raise ConfigError(f"unknown quadruple reference {name!r}")
            spec = table[name]
            self._quadruples[name] = Quadruple(
                self.space(spec["space"]),
                self.algebra(spec["algebra"]),
                self.system(spec["scalar_system"]),
                self.system(spec["vector_system"]),
                label=name,
            )
        return self._quadruples[name]

    def resolve_any(self, name: str):
        """Target of `validate`: algebra, system, or quadruple, in that order."""
        for table, getter in (
            ("algebras", self.algebra),
            ("systems", self.system),
            ("quadruples", self.quadruple),
        ):
            if name in self.config.get(table, {}):
                return getter(name)
        if name in self.config.get("spaces", {}):
            return self.space(name)
        try:
            return preset_algebra(name)
        except Exception:
            raise ConfigError(f"unresolved reference {name!r}") from None


def validate_config(path) -> dict:
    """Parse and schema-check a config file; raises ConfigError with position."""
    text = Path(path).read_text()
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path_str = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config schema violation at {path_str}: {exc.message}") from None
    _check_references(config)
    return config


def _check_references(config: dict) -> None:
    """All cross-references must resolve (presets count as algebras)."""
    algebras = set(config.get("algebras", {}))
    spaces = set(config.get("spaces", {}))
    systems = set(config.get("systems", {}))
    quadruples = set(config.get("quadruples", {}))

    def need_algebra(name, where):
        if name in algebras:
            return
        try:
            preset_algebra(name)
        except Exception:
            raise ConfigError(f"{where}: unresolved algebra {name!r}") from None

    for name, spec in config.get("spaces", {}).items():
        if "sample_of" in spec and spec["sample_of"] not in spaces:
            raise ConfigError(f"space {name!r}: unresolved raster {spec['sample_of']!r}")
        if "shape" in spec:
            for sh in spec["shape"]:
                if sh["kind"] == "annulus" and not (
                    float(sh["outer"]) > float(sh["inner"]) > 0
                ):
                    raise ConfigError(
                        f"space {name!r}: annulus needs outer > inner > 0"
                    )
    for name, spec in config.get("systems", {}).items():
        if spec["space"] not in spaces:
            raise ConfigError(f"system {name!r}: unresolved space {spec['space']!r}")
        need_algebra(spec["algebra"], f"system {name!r}")
    for name, spec in config.get("quadruples", {}).items():
        if spec["space"] not in spaces:
            raise ConfigError(f"quadruple {name!r}: unresolved space {spec['space']!r}")
        need_algebra(spec["algebra"], f"quadruple {name!r}")
        for key in ("scalar_system", "vector_system"):
            if spec[key] not in systems:
                raise ConfigError(f"quadruple {name!r}: unresolved system {spec[key]!r}")
    for k, entry in enumerate(config.get("run", [])):
        target = entry["target"]
        known = algebras | spaces | systems | quadruples
        if target not in known:
            try:
                preset_algebra(target)
            except Exception:
                raise ConfigError(f"run[{k}]: unresolved target {target!r}") from None


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _run_entry(ws: _Workspace, entry: dict, seed: int, out_dir: Path, stem: str, config_hash: str):
    """Execute one run-list command; returns the payload plus extra files."""
    command = entry["command"]
    target = entry["target"]
    tol = float(entry.get("tol", 1e-4))
    m = int(entry.get("m", 32))
    payload: dict
    extras: dict[str, str] = {}

    if command == "characters":
        E = ws.algebra(target)
        chars = characters(E, seed=seed)
        rad = radical(E, chars)
        quotient, proj = semisimple_quotient(E, chars)
        payload = {
            "algebra": E.label,
            "characters": [c.to_dict() for c in chars],
            "radical_dim": len(rad),
            "radical_basis": [
                [[z.real, z.imag] for z in r.coords] for r in rad
            ],
            "quotient_dim": quotient.dim,
        }

    elif command == "validate":
        obj = ws.resolve_any(target)
        if isinstance(obj, AlgebraSpec):
            payload = validate_algebra(obj).to_dict()
        elif isinstance(obj, FunctionSystem):
            payload = validate_system(obj).to_dict()
        elif isinstance(obj, Quadruple):
            payload = check_admissible(obj).to_dict()
        elif isinstance(obj, FiniteSpace):
            payload = validate_metric(obj).to_dict()
        else:
            raise ConfigError(f"validate: cannot validate {target!r}")

    elif command == "hull":
        region = ws.space(target)
        if not isinstance(region, RasterRegion):
            raise ConfigError(f"hull target {target!r} is not a raster region")
        filled = polynomial_hull_raster(region)
        write_pgm(out_dir / f"{stem}.pgm", filled)
        boundary = topological_boundary_raster(filled)
        csv = "x,y\n" + "\n".join(f"{z.real!r},{z.imag!r}" for z in boundary) + "\n"
        extras[f"{stem}.csv"] = csv
        payload = {
            "raster": target,
            "set_pixels": int(filled.grid.sum()),
            "boundary_pixels": int(boundary.size),
            "pgm": f"{stem}.pgm",
            "csv": f"{stem}.csv",
        }

    elif command == "shilov":
        system = ws.system(target)
        if system.scalars.dim == 1:
            family = witnesses_from_system(system)
        else:
            family = witnesses_from_system(system, characters(system.scalars, seed=seed))
        partition = shilov_estimate(family, tol=tol, m=m)
        payload = partition.to_dict()
        payload["boundary_seed"] = BOUNDARY_SEED
        if family.coords is not None:
            extras[f"{stem}.csv"] = partition_to_csv(partition)
            payload["csv"] = f"{stem}.csv"
            if entry.get("raster"):
                raster = ws.space(entry["raster"])
                if not isinstance(raster, RasterRegion):
                    raise ConfigError(f"raster {entry['raster']!r} is not a raster region")
                extras[f"{stem}.pgm"] = partition_to_pgm(partition, raster)
                payload["pgm"] = f"{stem}.pgm"

    elif command in ("verify-product", "verify-peaks"):
        quadruple = ws.quadruple(target)
        regime = entry.get("regime", "exact")
        if command == "verify-product":
            payload = verify_product_theorem(quadruple, regime=regime, tol=tol, m=m).to_dict()
        else:
            payload = verify_peak_product(quadruple, regime=regime, tol=tol, m=m).to_dict()

    elif command == "peaker":
        quadruple = ws.quadruple(target)
        point = entry.get("point", quadruple.space.points[0])
        char_index = int(entry.get("character", 0))
        chars_E = characters(quadruple.scalars, seed=seed)
        if char_index >= len(chars_E):
            raise ConfigError(
                f"peaker: character index {char_index} out of range "
                f"({len(chars_E)} characters)"
            )
        x_index = quadruple.space.index(point)
        # v has transform = indicator of the chosen character; f is the
        # certified scalar peaker at the chosen point
        v = quadruple.scalars.element(
            _algebra_peaker(quadruple.scalars, chars_E, char_index)
        )
        fam_B = witnesses_from_system(quadruple.scalar_system)
        cert_f = certify_peak(fam_B, x_index, tol=tol, m=m)
        if cert_f.status != "certified_peak":
            raise RuntimeError(
                f"peaker: point {point!r} is not a certified peak point "
                f"of the scalar system (status {cert_f.status})"
            )
        peaker = synthesize_product_peaker(v, cert_f.coefficients, quadruple, chars_E)
        payload = {
            "quadruple": quadruple.label,
            "point": point,
            "character": chars_E[char_index].label,
            "scalar_certificate": cert_f.to_dict(),
            "peaker": peaker.to_dict(),
        }
    else:
        raise ConfigError(f"unknown command {command!r}")

    report = {
        "tool": f"shilov {__version__}",
        "command": command,
        "target": target,
        "seed": seed,
        "config_sha256": config_hash,
        "payload": payload,
    }
    return report, extras


def _algebra_peaker(E: AlgebraSpec, chars_E, char_index: int) -> np.ndarray:
    """Element of E whose transform is the indicator of the chosen character."""
    K = np.array([c.values for c in chars_E])  # (n_chars, dim)
    target = np.zeros(len(chars_E), dtype=complex)
    target[char_index] = 1.0
    coords, _, _, _ = np.linalg.lstsq(K, target, rcond=None)
    return coords


def run_config(config: dict, output_dir: Path, seed: int, quiet: bool = False) -> int:
    """Execute every command in the run list; returns a process exit code."""
    ws = _Workspace(config)
    config_hash = hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()
    ).hexdigest()
    output_dir.mkdir(parents=True, exist_ok=True)
    for k, entry in enumerate(config["run"]):
        stem = entry.get("name", f"{k:02d}-{entry['command']}-{entry['target']}")
        report, extras = _run_entry(ws, entry, seed, output_dir, stem, config_hash)
        _atomic_write(output_dir / f"{stem}.report.json", canonical_json(report))
        for fname, text in extras.items():
            _atomic_write(output_dir / fname, text)
        if not quiet:
            print(f"[{k}] {entry['command']} {entry['target']} -> {stem}.report.json")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="shilov",
        description="Gelfand theory and certified boundaries from a JSON config.",
    )
    parser.add_argument("--config", required=True, help="path to the experiment config")
    parser.add_argument("--output-dir", default=None, help="override config output_dir")
    parser.add_argument("--seed", type=int, default=None, help="override config seed")
    parser.add_argument("--quiet", action="store_true", help="suppress progress lines")
    args = parser.parse_args(argv)

    try:
        config = validate_config(args.config)
        seed = args.seed if args.seed is not None else int(config.get("seed", 0))
        out_dir = Path(args.output_dir or config.get("output_dir", "shilov-out"))
        return run_config(config, out_dir, seed, quiet=args.quiet)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "message": str(exc)}), file=sys.stderr)
        return 2
    except Exception as exc:  # operational failure: emit machine-readable JSON
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
