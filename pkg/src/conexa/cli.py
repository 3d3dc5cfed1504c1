"""Batch command-line front-end.

Every command prints a single report (JSON by default) to standard output and
exits 0 on success, 2 on a domain/input error, 3 on a cap/resource error.
Reports embed the tool version, the seed and the tolerances, so identical
inputs produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .connective import connective_order
from .density import density_structures, total_order
from .devices import (
    DEFAULT_CAP,
    builtin_device,
    derive_device,
    device_order,
    domanial_structures,
    locality_profile,
    realization_count,
    tensorial_structures,
)
from .disentangle import STRUCTURE_NAMES, PoolConfig, disentanglement_structures
from .errors import DomainError, ResourceError
from .quantum import (
    DEFAULT_TOL,
    BUILTIN_STATES,
    builtin_state,
    pauli_x,
    pauli_x_binary,
    pauli_z,
    pauli_z_binary,
)
from .randvars import rv_analysis
from .serialize import (
    canonical_json,
    density_from_dict,
    device_from_dict,
    device_to_dict,
    distribution_from_dict,
    join_key,
    state_from_dict,
    structure_to_dict,
)
from .devices import BUILTIN_DEVICES

MENU_TOKENS = {
    "Z": pauli_z,
    "X": pauli_x,
    "Zp": pauli_z_binary,
    "Xp": pauli_x_binary,
}


def _load_json(path: str) -> object:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise DomainError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(
            f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None


def _envelope(command: str, args, result: dict) -> dict:
    return {
        "tool": "conexa",
        "version": __version__,
        "command": command,
        "seed": getattr(args, "seed", None),
        "tolerance": getattr(args, "tol", None),
        "parameters": {
            "samples": getattr(args, "samples", None),
            "cap": getattr(args, "cap", None),
            "recode": getattr(args, "recode", None),
        },
        "result": result,
    }


def _structure_lines(name: str, data: dict) -> str:
    parts = ["{" + ",".join(subset) + "}" for subset in data["connected"]]
    return f"  {name}: " + " ".join(parts)


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(canonical_json(report))
        return
    result = report["result"]
    print(f"conexa {report['version']} -- {report['command']}")
    for key in ("classes", "subsets", "profile"):
        if key in result:
            print(f"{key}:")
            for sub, val in sorted(result[key].items()):
                print(f"  {sub}: {val}")
    if "structures" in result:
        print("structures:")
        for name, data in result["structures"].items():
            print(_structure_lines(name, data))
    if "structure" in result:
        print("structure:")
        print(_structure_lines("rv", result["structure"]))
    if "device" in result:
        print(json.dumps(result["device"], sort_keys=True))
    if "orders" in result:
        print("orders: " + json.dumps(result["orders"], sort_keys=True))
    for key in ("omega_c", "omega_f", "omega", "order", "realizations"):
        if key in result:
            print(f"{key}: {result[key]}")


def _pool_config(args) -> PoolConfig:
    if args.samples > 0 and args.seed is None:
        raise DomainError("--seed is required when random pool bases are in use")
    return PoolConfig(n_random=args.samples, seed=args.seed)


def _state_from_args(args):
    if getattr(args, "builtin", None):
        return builtin_state(args.builtin)
    if getattr(args, "file", None):
        return state_from_dict(_load_json(args.file))
    raise DomainError("provide --file or --builtin")


def _classes_dict(report) -> dict:
    return {
        join_key(tuple(str(x) for x in j)): {
            "class": cls.kind.value,
            "confidence": cls.confidence.value,
        }
        for j, cls in report.classes.items()
    }


def _cmd_analyze_state(args) -> dict:
    psi = _state_from_args(args)
    report = disentanglement_structures(psi, _pool_config(args), tol=args.tol)
    selected = STRUCTURE_NAMES
    if args.structures:
        selected = tuple(name.strip() for name in args.structures.split(","))
        unknown = [n for n in selected if n not in STRUCTURE_NAMES]
        if unknown:
            raise DomainError(f"unknown structure names {unknown}; known: {STRUCTURE_NAMES}")
    return {
        "dims": list(psi.layout.dims),
        "classes": _classes_dict(report),
        "structures": {
            name: structure_to_dict(report.structures[name]) for name in selected
        },
        "orders": {"omega_c": report.omega_c},
    }


def _cmd_analyze_density(args) -> dict:
    if args.builtin:
        rho = builtin_state(args.builtin).density()
    elif args.file:
        rho = density_from_dict(_load_json(args.file))
    else:
        raise DomainError("provide --file or --builtin")
    report = density_structures(rho, tol=args.tol)
    return {
        "dims": list(rho.layout.dims),
        "subsets": {
            join_key(tuple(str(x) for x in j)): {
                "completely_correlated": v.completely_correlated,
                "completely_entangled": v.completely_entangled,
                "quality": v.quality.value,
            }
            for j, v in report.subsets.items()
        },
        "structures": {
            "corr": structure_to_dict(report.kappa_corr),
            "S": structure_to_dict(report.kappa_s),
        },
        "orders": {"omega_f": report.omega_f},
    }


def _cmd_analyze_device(args) -> dict:
    if args.builtin:
        device = builtin_device(args.builtin)
    elif args.file:
        device = device_from_dict(_load_json(args.file))
    else:
        raise DomainError("provide --file or --builtin")
    profile = locality_profile(device, cap=args.cap)
    structures = tensorial_structures(device, cap=args.cap)
    kappa_do, kappa_dp = domanial_structures(device, cap=args.cap)
    orders = device_order(device, cap=args.cap)
    payload = {name: structure_to_dict(s) for name, s in structures.items()}
    payload["do"] = structure_to_dict(kappa_do)
    payload["dp"] = structure_to_dict(kappa_dp)
    return {
        "uplicity": device.uplicity,
        "realizations": realization_count(device),
        "profile": {
            "local": profile.local,
            "quasi_local": profile.quasi_local,
            "partially_local": profile.partially_local,
            "separable": profile.separable,
            "quasi_separable": profile.quasi_separable,
            "pseudo_separable": profile.pseudo_separable,
            "partially_separable": profile.partially_separable,
            "separable_cut": _cut_json(profile.separable_cut),
            "quasi_separable_cut": _cut_json(profile.quasi_separable_cut),
            "partially_separable_cut": _cut_json(profile.partially_separable_cut),
        },
        "structures": payload,
        "orders": {
            "tensorial": orders.tensorial,
            "domanial": orders.domanial,
            "overall": orders.overall,
            "ludic": "excluded (out of scope)",
        },
    }


def _cut_json(cut):
    if cut is None:
        return None
    return [[s + 1 for s in part] for part in cut]


def _cmd_analyze_rvs(args) -> dict:
    if not args.file:
        raise DomainError("provide --file with a joint-distribution JSON")
    dist = distribution_from_dict(_load_json(args.file))
    report = rv_analysis(dist)
    return {
        "variables": dist.variables,
        "structure": structure_to_dict(report.structure),
        "raw_generators": [[str(x) for x in j] for j in report.raw_generators],
        "raw_family_closed": report.raw_family_closed,
        "order": connective_order(report.structure),
    }


def _parse_menu_tokens(spec: str, sites: int) -> list:
    """Shorthand like "ZX" or "Zp,Xp": the same menu at every site.

    Multi-observable menus are labelled "0", "1", ...; a single-observable
    menu is labelled "*".
    """
    if "," in spec:
        tokens = [t.strip() for t in spec.split(",")]
    else:
        tokens = list(spec)
    matrices = []
    for token in tokens:
        if token not in MENU_TOKENS:
            raise DomainError(f"unknown observable token {token!r}; known: {sorted(MENU_TOKENS)}")
        matrices.append(MENU_TOKENS[token]())
    if len(matrices) == 1:
        menu = [("*", matrices[0])]
    else:
        menu = [(str(i), m) for i, m in enumerate(matrices)]
    return [list(menu) for _ in range(sites)]


def _menus_from_args(args, psi) -> list:
    spec = args.menus
    if spec.endswith(".json"):
        data = _load_json(spec)
        menus = []
        for site_entries in data:
            menu = []
            for entry in site_entries:
                mat = np.array(
                    [[complex(re, im) for re, im in row] for row in entry["matrix"]]
                )
                menu.append((str(entry["label"]), mat))
            menus.append(menu)
        return menus
    return _parse_menu_tokens(spec, psi.layout.sites)


def _cmd_derive_device(args) -> dict:
    if args.builtin_state:
        psi = builtin_state(args.builtin_state)
    elif args.state:
        psi = state_from_dict(_load_json(args.state))
    else:
        raise DomainError("provide --state or --builtin-state")
    menus = _menus_from_args(args, psi)
    recode = args.recode if args.recode != "raw" else None
    device = derive_device(psi, menus, recode=recode, tol=args.tol)
    return {"device": device_to_dict(device)}


def _cmd_order(args) -> dict:
    psi = _state_from_args(args)
    orders = total_order(psi, _pool_config(args), tol=args.tol)
    return {
        "omega_c": orders.omega_c,
        "omega_f": orders.omega_f,
        "omega": orders.omega,
    }


def _cmd_builtin(args) -> dict:
    from .serialize import state_to_dict

    if args.list:
        return {
            "states": sorted(BUILTIN_STATES),
            "devices": sorted(BUILTIN_DEVICES),
        }
    if args.state:
        return {"state": state_to_dict(builtin_state(args.state))}
    if args.device:
        return {"device": device_to_dict(builtin_device(args.device))}
    raise DomainError("provide --list, --state or --device")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conexa",
        description="Connectivity structures of quantum states, devices and random variables",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_pool=False, with_cap=False):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--format", choices=("json", "text"), default="json")
        if with_pool:
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--samples", type=int, default=20,
                           help="number of random pool bases per measured site set")
        if with_cap:
            p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = sub.add_parser("analyze-state", help="disentanglement structures of a pure state")
    p.add_argument("--file")
    p.add_argument("--builtin")
    p.add_argument("--structures", help="comma list among GI,BIP,MT,IP,ML,NCS")
    add_common(p, with_pool=True)
    p.set_defaults(fn=_cmd_analyze_state)

    p = sub.add_parser("analyze-density", help="correlation and Sugita structures")
    p.add_argument("--file")
    p.add_argument("--builtin")
    add_common(p)
    p.set_defaults(fn=_cmd_analyze_density)

    p = sub.add_parser("analyze-device", help="locality profile and device structures")
    p.add_argument("--file")
    p.add_argument("--builtin")
    add_common(p, with_cap=True)
    p.set_defaults(fn=_cmd_analyze_device)

    p = sub.add_parser("analyze-rvs", help="structure of a random-variable family")
    p.add_argument("--file")
    add_common(p)
    p.set_defaults(fn=_cmd_analyze_rvs)

    p = sub.add_parser("derive-device", help="device table of menu measurements on a state")
    p.add_argument("--state")
    p.add_argument("--builtin-state")
    p.add_argument("--menus", required=True,
                   help="menu JSON path or shorthand tokens (Z, X, Zp, Xp)")
    p.add_argument("--recode", choices=("paper", "raw"), default="raw")
    add_common(p)
    p.set_defaults(fn=_cmd_derive_device)

    p = sub.add_parser("order", help="connective orders of a pure state")
    p.add_argument("--file")
    p.add_argument("--builtin")
    add_common(p, with_pool=True)
    p.set_defaults(fn=_cmd_order)

    p = sub.add_parser("builtin", help="emit a builtin state or device")
    p.add_argument("--list", action="store_true")
    p.add_argument("--state")
    p.add_argument("--device")
    add_common(p)
    p.set_defaults(fn=_cmd_builtin)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    _emit(_envelope(args.command, args, result), args.format)
    return 0


if __name__ == "__main__":
    sys.exit(main())
