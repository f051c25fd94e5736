"""Command-line front end.

Subcommands: simulate (BER sweep), optimize (threshold / window grids),
air (rate curves), reach (fiber reach from required SNR), selftest.
Options come from defaults, then an optional flat key=value config file,
then flags, in that precedence order. Every run writes a manifest embedding
the resolved configuration; simulate --manifest re-runs it and reproduces
the data files byte for byte.

Exit codes: 0 success, 2 configuration error, 3 all results censored.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, air as air_mod
from .gf_bch import bdd_decode, encode
from .harness import (CODES, CSV_COLUMNS, ExperimentSpec, component_code,
                      grid_search, required_snr_at, run_point, write_csv,
                      write_json)
from .modem import pam_gray

_SPEC_KEYS = ("code", "decoder", "pam_m", "window", "iters", "k_plain",
              "mark_mode", "delta1", "delta2", "delta3", "snr_grid",
              "min_errors", "max_info_bits", "shards", "chunk_blocks",
              "master_seed")

_INT_KEYS = {"pam_m", "window", "iters", "k_plain", "min_errors",
             "max_info_bits", "shards", "chunk_blocks", "master_seed"}
_FLOAT_KEYS = {"delta1", "delta2", "delta3"}


class ConfigError(Exception):
    pass


def _parse_config_file(path: str) -> dict:
    values: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "pam":
            values["pam_m"] = _pam_to_m(val)
        elif key == "lk":
            values["lk"] = int(val)
        elif key in ("snr", "snr_grid"):
            values["snr_grid"] = _parse_snr_list(val)
        elif key in _INT_KEYS:
            values[key] = int(val)
        elif key in _FLOAT_KEYS:
            values[key] = float(val)
        elif key in _SPEC_KEYS:
            values[key] = val
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def _pam_to_m(val) -> int:
    M = int(val)
    m = M.bit_length() - 1
    if M < 2 or (1 << m) != M:
        raise ConfigError(f"PAM order must be a power of two >= 2, got {M}")
    return m


def _parse_snr_list(text: str) -> tuple:
    text = text.strip()
    if not text:
        raise ConfigError("empty SNR list")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("SNR range must be lo:hi:step")
        lo, hi, step = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise ConfigError("bad SNR range")
        n = int(round((hi - lo) / step))
        return tuple(round(lo + i * step, 10) for i in range(n + 1))
    return tuple(float(p) for p in text.split(","))


def _outdir(args) -> Path:
    out = args.out or os.environ.get("SCCSIM_OUTDIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _build_spec(args) -> ExperimentSpec:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(_parse_config_file(args.config))
    for key in _SPEC_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if getattr(args, "pam", None) is not None:
        values["pam_m"] = _pam_to_m(args.pam)
    if getattr(args, "snr", None) is not None:
        values["snr_grid"] = _parse_snr_list(args.snr)
    if getattr(args, "delta", None) is not None:
        parts = args.delta.split(",")
        if len(parts) != 2:
            raise ConfigError("--delta expects d1,d2")
        values["delta1"] = float(parts[0])
        values["delta2"] = float(parts[1])
        values["mark_mode"] = "two"
    if getattr(args, "delta3_flag", None) is not None:
        values["delta3"] = float(args.delta3_flag)
        values["mark_mode"] = "one"
    lk = values.pop("lk", None)
    if getattr(args, "lk", None) is not None:
        lk = args.lk
    if lk is not None:
        window = int(values.get("window", 9))
        values["k_plain"] = window - int(lk)
    if "snr_grid" in values and not isinstance(values["snr_grid"], tuple):
        values["snr_grid"] = tuple(values["snr_grid"])
    try:
        return ExperimentSpec(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _write_manifest(path: Path, command: str, spec: ExperimentSpec | None,
                    outputs: list[str], wall_time_s: float,
                    extra: dict | None = None) -> None:
    doc = {"command": command, "version": __version__, "outputs": outputs,
           "wall_time_s": wall_time_s}
    if spec is not None:
        doc["spec"] = spec.to_dict()
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cmd_simulate(args) -> int:
    if args.manifest:
        try:
            doc = json.loads(Path(args.manifest).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load manifest: {exc}") from exc
        spec_dict = doc.get("spec")
        if not spec_dict:
            raise ConfigError("manifest has no spec")
        spec_dict["snr_grid"] = tuple(spec_dict.get("snr_grid", ()))
        spec = ExperimentSpec(**spec_dict)
    else:
        spec = _build_spec(args)
    if not spec.snr_grid:
        raise ConfigError("no SNR points given (--snr or config snr=)")
    out = _outdir(args)
    t0 = time.perf_counter()
    records = []
    for s in spec.snr_grid:
        rec = run_point(spec, s)
        records.append(rec)
        print(f"snr={rec.snr_db:g} dB  pre={rec.pre_ber:.3e}  "
              f"post={rec.post_ber:.3e}  errors={rec.errors}  "
              f"bits={rec.bits}" + ("  censored" if rec.censored else ""))
    wall = time.perf_counter() - t0
    csv_path = out / "results.csv"
    write_csv(csv_path, records, spec)
    extra = {}
    target = args.target_ber
    if target:
        snr_req = required_snr_at(records, target)
        extra["required_snr_db"] = snr_req
        extra["target_ber"] = target
        if snr_req is None:
            print(f"target BER {target:g}: no bracketing grid points")
        else:
            print(f"required SNR at BER {target:g}: {snr_req:.3f} dB")
    write_json(out / "results.json", records, spec, extra)
    _write_manifest(out / "manifest.json", "simulate", spec,
                    ["results.csv", "results.json"], wall)
    print(f"wrote {csv_path}")
    return 3 if all(r.censored for r in records) else 0


def _parse_cells(kind: str, text: str) -> list:
    cells = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if kind == "delta12":
            bits = part.split(":")
            if len(bits) != 2:
                raise ConfigError("delta12 cells look like d1:d2,...")
            cells.append((float(bits[0]), float(bits[1])))
        elif kind == "delta3":
            cells.append(float(part))
        else:
            cells.append(int(part))
    if not cells:
        raise ConfigError("empty grid")
    return cells


def _cmd_optimize(args) -> int:
    spec = _build_spec(args)
    cells = _parse_cells(args.grid_kind, args.cells)
    out = _outdir(args)
    t0 = time.perf_counter()
    result = grid_search(spec, args.snr_point, args.grid_kind, cells)
    wall = time.perf_counter() - t0
    rows = []
    for cell, rec in zip(result.cells, result.records):
        label = ":".join(f"{v:g}" for v in cell) \
            if isinstance(cell, tuple) else f"{cell:g}"
        rows.append([label] + rec.csv_row())
        print(f"cell {label:>10}  post={rec.post_ber:.3e}  "
              f"errors={rec.errors}" + ("  censored" if rec.censored else ""))
    for cell in result.skipped:
        print(f"cell {cell} skipped (invalid)")
    grid_csv = out / "grid.csv"
    with open(grid_csv, "w", newline="") as fh:
        fh.write("# spec " + json.dumps(spec.to_dict(), sort_keys=True) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["cell"] + list(CSV_COLUMNS))
        writer.writerows(rows)
    doc = {
        "spec": spec.to_dict(), "kind": result.kind, "snr_db": args.snr_point,
        "cells": [list(c) if isinstance(c, tuple) else c
                  for c in result.cells],
        "records": [r.to_dict() for r in result.records],
        "argmin": (list(result.argmin) if isinstance(result.argmin, tuple)
                   else result.argmin),
    }
    with open(out / "grid.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out / "manifest.json", "optimize", spec,
                    ["grid.csv", "grid.json"], wall,
                    {"grid_kind": args.grid_kind, "cells": args.cells,
                     "snr_db": args.snr_point})
    if result.argmin is None:
        print("argmin: none (all cells censored)")
        return 3
    print(f"argmin: {result.argmin}")
    return 0


def _cmd_air(args) -> int:
    m = _pam_to_m(args.pam)
    cons = pam_gray(m)
    grid = _parse_snr_list(args.snr)
    out = _outdir(args)
    t0 = time.perf_counter()
    table = air_mod.air_table(cons, grid)
    air_csv = out / "air.csv"
    with open(air_csv, "w", newline="") as fh:
        fh.write("# pam M=%d\n" % (1 << m))
        writer = csv.writer(fh)
        writer.writerow(["snr_db", "pre_ber", "i_hd", "i_gmi"])
        for pt in table:
            writer.writerow([pt.snr_db, pt.pre_ber, pt.i_hd, pt.i_gmi])
    summary = []
    for name in sorted(CODES):
        code = component_code(name)
        target = air_mod.scc_air(m, code)
        row = {"code": name, "i_scc": target,
               "rate_gbps": air_mod.net_rate_gbps(m, code)}
        for label, curve in (
                ("snr_hd_db",
                 lambda s: air_mod.hd_air(min(air_mod.pre_fec_ber(cons, s),
                                              0.5), m)),
                ("snr_gmi_db", lambda s: air_mod.gmi(cons, s))):
            try:
                row[label] = air_mod.required_snr(target, curve)
            except ValueError:
                row[label] = None
        summary.append(row)
        hd = row["snr_hd_db"]
        gm = row["snr_gmi_db"]
        print(f"{name}: I_SCC={target:.4f} b/4D  rate={row['rate_gbps']:.1f} "
              f"Gbps  reqSNR(hd)="
              + (f"{hd:.3f}" if hd is not None else "n/a")
              + " dB  reqSNR(gmi)="
              + (f"{gm:.3f}" if gm is not None else "n/a") + " dB")
    with open(out / "air.json", "w") as fh:
        json.dump({"pam_m": m, "grid": list(grid), "required": summary},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out / "manifest.json", "air", None,
                    ["air.csv", "air.json"], time.perf_counter() - t0,
                    {"pam_m": m, "snr_grid": list(grid)})
    print(f"wrote {air_csv}")
    return 0


def _cmd_reach(args) -> int:
    link = air_mod.LinkParams()
    out = _outdir(args)
    rows = []
    t0 = time.perf_counter()
    snrs = [float(s) for s in args.required_snr.split(",")]
    gains = [float(g) for g in args.gain.split(",")] if args.gain else []
    try:
        for snr in snrs:
            base = air_mod.gn_reach(link, snr)
            rows.append(("base", snr, base))
            for g in gains:
                improved = air_mod.gn_reach(link, snr - g)
                rows.append((f"gain {g:g} dB", snr - g, improved))
                inc = (improved.reach_km - base.reach_km) / base.reach_km
                print(f"required {snr:g} dB -> {base.reach_km:.0f} km; "
                      f"with {g:g} dB gain -> {improved.reach_km:.0f} km "
                      f"(+{100 * inc:.1f}%)")
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    reach_csv = out / "reach.csv"
    with open(reach_csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label", "required_snr_db", "launch_power_dbm",
                         "spans", "reach_km"])
        for label, snr, res in rows:
            writer.writerow([label, snr, res.launch_power_dbm,
                             res.max_spans, res.reach_km])
    _write_manifest(out / "manifest.json", "reach", None, ["reach.csv"],
                    time.perf_counter() - t0,
                    {"required_snr_db": snrs, "gains_db": gains})
    print(f"wrote {reach_csv}")
    return 0


def _cmd_selftest(args) -> int:
    rng = np.random.default_rng(0)
    for name in sorted(CODES):
        code = component_code(name)
        info = rng.integers(0, 2, code.kc, dtype=np.uint8)
        cw = encode(code, info)
        pos = rng.choice(code.nc, size=code.t, replace=False)
        r = cw.copy()
        r[pos] ^= 1
        res = bdd_decode(code, r)
        assert res.decoded and (res.codeword == cw).all(), name
        print(f"{name}: encode/decode roundtrip ok")
    spec = ExperimentSpec(code="C1", decoder="isabm", pam_m=1,
                          snr_grid=(7.5,), min_errors=1,
                          max_info_bits=3_000_000, shards=2, master_seed=11)
    rec = run_point(spec, 7.5)
    assert rec.pre_ber > 0 and rec.post_ber <= rec.pre_ber
    print(f"mini run: pre={rec.pre_ber:.3e} post={rec.post_ber:.3e} "
          f"bits={rec.bits}")
    link = air_mod.LinkParams()
    pa, pn = air_mod.ase_nli_powers(
        link, air_mod.optimal_launch_power_dbm(link))
    assert abs(pa / pn - 2.0) < 1e-3
    print("reach model: ASE = 2x NLI at the optimum")
    print("selftest passed")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sccsim",
        description="Staircase-code BER simulator and rate/reach analysis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value experiment file")
        p.add_argument("--out", help="output directory "
                       "(default $SCCSIM_OUTDIR or .)")
        p.add_argument("--code", choices=sorted(CODES))
        p.add_argument("--decoder", choices=["standard", "isabm"])
        p.add_argument("--pam", help="PAM order M (2, 4, 8)")
        p.add_argument("--window", type=int)
        p.add_argument("--iters", type=int)
        p.add_argument("--k-plain", dest="k_plain", type=int)
        p.add_argument("--lk", type=int,
                       help="marked block count; sets k_plain = window - lk")
        p.add_argument("--delta", help="two-threshold marking d1,d2")
        p.add_argument("--delta3", dest="delta3_flag",
                       help="one-threshold marking d3")
        p.add_argument("--min-errors", dest="min_errors", type=int)
        p.add_argument("--max-info-bits", dest="max_info_bits", type=int)
        p.add_argument("--shards", type=int)
        p.add_argument("--seed", dest="master_seed", type=int)

    p_sim = sub.add_parser("simulate", help="run a BER sweep")
    add_common(p_sim)
    p_sim.add_argument("--snr", help="SNR points: list a,b,c or range lo:hi:step")
    p_sim.add_argument("--target-ber", dest="target_ber", type=float,
                       help="interpolate required SNR at this BER")
    p_sim.add_argument("--manifest", help="re-run a stored manifest")
    p_sim.set_defaults(func=_cmd_simulate)

    p_opt = sub.add_parser("optimize", help="grid search over parameters")
    add_common(p_opt)
    p_opt.add_argument("--grid-kind", dest="grid_kind", required=True,
                       choices=["delta12", "delta3", "lk"])
    p_opt.add_argument("--cells", required=True,
                       help="delta12: d1:d2,... | delta3: v,... | lk: n,...")
    p_opt.add_argument("--snr-point", dest="snr_point", type=float,
                       required=True)
    p_opt.set_defaults(func=_cmd_optimize)

    p_air = sub.add_parser("air", help="rate curves and required SNRs")
    p_air.add_argument("--pam", required=True, help="PAM order M")
    p_air.add_argument("--snr", required=True,
                       help="SNR grid: list a,b,c or range lo:hi:step")
    p_air.add_argument("--out", help="output directory")
    p_air.set_defaults(func=_cmd_air)

    p_reach = sub.add_parser("reach", help="GN-model reach from required SNR")
    p_reach.add_argument("--required-snr", dest="required_snr", required=True,
                         help="required SNR dB (comma list allowed)")
    p_reach.add_argument("--gain", help="SNR gain(s) dB to compare")
    p_reach.add_argument("--out", help="output directory")
    p_reach.set_defaults(func=_cmd_reach)

    p_self = sub.add_parser("selftest", help="quick internal checks")
    p_self.add_argument("--out", help="unused; accepted for symmetry")
    p_self.set_defaults(func=_cmd_selftest)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
