"""Command-line front end: synth, verify, bench, export.

Exit codes: 0 success, 1 verification failure, 2 usage error.  Circuits go
to standard output (deterministic bytes for identical invocations); the
DecompReport summary and diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import re
import sys

import numpy as np

from .approx import approx_mcu
from .bench import FAMILIES, run_family, to_csv
from .ir import cnot_count, export_text, lower, parse_json, report_for
from .mcx import McxSpec, mcx_log
from .sim import (UNITARY_CAP, apply, equiv, random_state, rx_mat, ry_mat,
                  rz_mat, spectral_distance, unitary_of)
from .su2 import McmtSpec, mcmt_su2, mcmt_x

SPOT_CAP = 18          # statevector spot checks beyond the unitary cap
_SPOT_SEED = 20240811


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# gate-argument parsing

_NAMED = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "s": np.diag([1, 1j]).astype(complex),
    "t": np.diag([1, cmath.exp(1j * math.pi / 4)]).astype(complex),
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
}
_ROT = {"rx": rx_mat, "ry": ry_mat, "rz": rz_mat}


def parse_angle(expr):
    """Float angle expression; arithmetic and the ``pi`` literal only."""
    if not re.fullmatch(r"[0-9pi+\-*/().eE ]*", expr or ""):
        raise UsageError("bad angle expression %r" % (expr,))
    try:
        return float(eval(expr, {"__builtins__": {}}, {"pi": math.pi}))
    except Exception:
        raise UsageError("bad angle expression %r" % (expr,))


def _matrix_from_json(data):
    a = np.asarray(data, dtype=float)
    if a.shape == (4, 2):           # row-major [re, im] pairs
        M = (a[:, 0] + 1j * a[:, 1]).reshape(2, 2)
    elif a.shape == (2, 2, 2):      # nested rows of [re, im] pairs
        M = a[..., 0] + 1j * a[..., 1]
    elif a.shape == (2, 2):         # plain real matrix
        M = a.astype(complex)
    else:
        raise UsageError("gate matrix must be 2x2")
    if np.abs(M.conj().T @ M - np.eye(2)).max() > 1e-10:
        raise UsageError("gate matrix is not unitary")
    return M


def parse_gate_spec(text):
    """--gate argument: x, z, s, t, h, rx(a)/ry(a)/rz(a), or a JSON matrix."""
    s = (text or "").strip()
    low = s.lower()
    if low in _NAMED:
        return _NAMED[low].copy()
    m = re.fullmatch(r"(rx|ry|rz)\((.*)\)", low)
    if m:
        return _ROT[m.group(1)](parse_angle(m.group(2)))
    try:
        data = json.loads(s)
    except ValueError:
        raise UsageError("unknown gate %r (use x, z, s, t, h, rx(a), ry(a), "
                         "rz(a), or a JSON 2x2 matrix)" % (text,))
    return _matrix_from_json(data)


def _su2_of(U):
    """Strip the global phase; multi-target SU(2) synthesis works up to it."""
    det = U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]
    return U * cmath.exp(-1j * cmath.phase(det) / 2.0)


# ---------------------------------------------------------------------------
# independent oracle pieces (index arithmetic only, no circuit lowering)

def _cnu_matrix(nq, ctrls, t, W):
    """Unitary of W on qubit t controlled on ctrls, over nq qubits."""
    dim = 1 << nq
    cm = sum(1 << c for c in ctrls)
    tb = 1 << t
    M = np.eye(dim, dtype=complex)
    for i in range(dim):
        if (i & cm) == cm and not (i & tb):
            j = i | tb
            M[i, i] = W[0, 0]
            M[j, i] = W[1, 0]
            M[i, j] = W[0, 1]
            M[j, j] = W[1, 1]
    return M


def _mcmt_oracle(nq, n, targets, W):
    M = np.eye(1 << nq, dtype=complex)
    for t in targets:
        M = _cnu_matrix(nq, range(n), t, W) @ M
    return M


# ---------------------------------------------------------------------------
# synthesis dispatch

def _synth_mcx(args):
    spec = McxSpec(args.controls, args.ancilla)
    c = mcx_log(spec)
    return c, report_for(c, args.ancilla)


def _synth_mcmt_x(args):
    c = mcmt_x(args.controls, args.targets)
    return c, report_for(c, "clean")


def _synth_mcmt_su2(args):
    W = _su2_of(parse_gate_spec(args.gate))
    c = mcmt_su2(McmtSpec(args.controls, args.targets,
                          (W,) * args.targets))
    return c, report_for(c)


def _synth_approx_u(args):
    U = parse_gate_spec(args.gate)
    c, _params, rep = approx_mcu(args.controls, U, args.epsilon, args.n_b)
    return c, rep


_SYNTH = {
    "mcx": _synth_mcx,
    "mcmt-x": _synth_mcmt_x,
    "mcmt-su2": _synth_mcmt_su2,
    "approx-u": _synth_approx_u,
}


def _report_line(rep):
    return ("cnot=%d total_gates=%d depth=%d num_ancilla=%d ancilla_kind=%s"
            % (rep.cnot_count, rep.total_gates, rep.depth, rep.num_ancilla,
               rep.ancilla_kind))


def cmd_synth(args):
    c, rep = _SYNTH[args.target](args)
    sys.stdout.write(export_text(c, args.format))
    sys.stderr.write(_report_line(rep) + "\n")
    return 0


# ---------------------------------------------------------------------------
# verification

def _spot_states(nq, count, rng):
    return [random_state(nq, rng, product=True) for _ in range(count)]


def _verify_mcx(args):
    n, mode = args.controls, args.ancilla
    c = mcx_log(McxSpec(n, mode))
    fails = []
    expect = {1: 1, 2: 6}.get(n, 6 * n - 6 if mode == "clean" else 12 * n - 18)
    got = cnot_count(c)
    if got != expect:
        fails.append("cnot count %d != %d" % (got, expect))
    nq = n + 2
    anc = (n + 1,)
    if nq <= UNITARY_CAP - 2:
        target = _cnu_matrix(nq, range(n), n, _NAMED["x"])
        emode = "clean_subspace" if mode == "clean" else "tensor_identity"
        r = equiv(unitary_of(lower(c)), target, emode, 1e-9, anc)
        if not r:
            fails.append("%s distance %.3e" % (emode, r.distance))
    elif nq <= SPOT_CAP:
        rng = np.random.default_rng(_SPOT_SEED)
        low = lower(c)
        mask = (1 << n) - 1
        for psi in _spot_states(n + 1, 8, rng):
            b = int(rng.integers(2)) if mode == "dirty" else 0
            off = b << (n + 1)
            full = np.zeros(1 << nq, dtype=complex)
            full[off:off + (1 << (n + 1))] = psi
            out = apply(low, full)
            want = psi.copy()
            i0, i1 = mask, mask | (1 << n)
            want[i0], want[i1] = psi[i1], psi[i0]
            wfull = np.zeros_like(full)
            wfull[off:off + (1 << (n + 1))] = want
            d = float(np.abs(out - wfull).max())
            if d > 1e-7:
                fails.append("statevector distance %.3e" % d)
                break
    return fails


def _basis_spots(c, n, m, nq, W, tol, checks=6):
    """Spot checks with basis-valued controls and random target registers.

    Controls occupy the low n wires; W should land on the m wires above
    them when every control fires.  Wires above n+m (the ancilla, if any)
    stay in |0>.
    """
    rng = np.random.default_rng(_SPOT_SEED)
    low = lower(c)
    fails = []
    patterns = [(1 << n) - 1] + [int(rng.integers(1 << n) & ((1 << n) - 2))
                                 for _ in range(checks - 1)]
    for pat in patterns:
        tpsi = random_state(m, rng)
        want_t = tpsi
        if pat == (1 << n) - 1:
            want_t = tpsi.reshape((2,) * m)
            for ax in range(m):
                want_t = np.moveaxis(
                    np.tensordot(W, np.moveaxis(want_t, m - 1 - ax, 0),
                                 axes=([1], [0])), 0, m - 1 - ax)
            want_t = want_t.reshape(-1)
        idx = pat + (np.arange(1 << m) << n)
        full = np.zeros(1 << nq, dtype=complex)
        full[idx] = tpsi
        out = apply(low, full)
        want = np.zeros_like(full)
        want[idx] = want_t
        # align one global phase before comparing
        k = int(np.abs(want).argmax())
        if abs(out[k]) > 1e-12:
            out = out * cmath.exp(-1j * cmath.phase(out[k] / want[k]))
        d = float(np.abs(out - want).max())
        if d > tol:
            fails.append("spot check distance %.3e (pattern %d)" % (d, pat))
            break
    return fails


def _verify_mcmt_x(args):
    n, m = args.controls, args.targets
    c = mcmt_x(n, m)
    fails = []
    expect = {1: m, 2: 2 * m + 4}.get(n, 6 * n + 2 * m - 8)
    got = cnot_count(c)
    if got != expect:
        fails.append("cnot count %d != %d" % (got, expect))
    nq = n + m + 1
    if nq <= UNITARY_CAP - 2:
        target = _mcmt_oracle(nq, n, range(n, n + m), _NAMED["x"])
        r = equiv(unitary_of(lower(c)), target, "clean_subspace", 1e-9,
                  (n + m,))
        if not r:
            fails.append("clean_subspace distance %.3e" % r.distance)
    elif nq <= SPOT_CAP:
        fails += _basis_spots(c, n, m, nq, _NAMED["x"], 1e-7)
    return fails


def _verify_mcmt_su2(args):
    n, m = args.controls, args.targets
    W = _su2_of(parse_gate_spec(args.gate))
    c = mcmt_su2(McmtSpec(n, m, (W,) * m))
    fails = []
    bound = {1: 2 * m, 2: 8 * m}.get(n, 12 * n + 8 * m - 30)
    got = cnot_count(c)
    if got > bound:
        fails.append("cnot count %d > bound %d" % (got, bound))
    nq = n + m
    if nq <= UNITARY_CAP - 2:
        target = _mcmt_oracle(nq, n, range(n, n + m), W)
        r = equiv(unitary_of(lower(c)), target, "global_phase", 1e-9)
        if not r:
            fails.append("global_phase distance %.3e" % r.distance)
    elif nq <= SPOT_CAP:
        fails += _basis_spots(c, n, m, nq, W, 1e-7)
    return fails


def _verify_approx_u(args):
    U = parse_gate_spec(args.gate)
    c, params, rep = approx_mcu(args.controls, U, args.epsilon, args.n_b)
    n, n_b = args.controls, params.n_b
    fails = []
    expect = 4 * n_b ** 2 + 24 * n - 12 * n_b - 56
    if rep.cnot_count != expect:
        fails.append("cnot count %d != %d" % (rep.cnot_count, expect))
    nq = n + 1
    if nq <= UNITARY_CAP - 2:
        target = _cnu_matrix(nq, range(n), n, U)
        d = spectral_distance(unitary_of(lower(c)), target)
        if d > args.epsilon:
            fails.append("spectral error %.3e > epsilon %g"
                         % (d, args.epsilon))
    elif nq <= SPOT_CAP:
        fails += _basis_spots(c, n, 1, nq, U, args.epsilon)
    return fails


_VERIFY = {
    "mcx": _verify_mcx,
    "mcmt-x": _verify_mcmt_x,
    "mcmt-su2": _verify_mcmt_su2,
    "approx-u": _verify_approx_u,
}


def cmd_verify(args):
    fails = _VERIFY[args.target](args)
    if fails:
        for f in fails:
            sys.stderr.write("verify %s: FAIL: %s\n" % (args.target, f))
        return 1
    sys.stderr.write("verify %s: ok\n" % args.target)
    return 0


# ---------------------------------------------------------------------------
# bench + export

def cmd_bench(args):
    ns = range(args.n_min, args.n_max + 1, args.step)
    params = {}
    if args.epsilon is not None:
        params["epsilon"] = args.epsilon
    rows = run_family(args.family, ns, m=args.m, params=params)
    text = to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    code = 0
    for r in rows:
        if r.n >= 6 and r.baseline_cnot is not None \
                and r.cnot > r.baseline_cnot:
            sys.stderr.write("bench: n=%d cnot %d exceeds baseline %s\n"
                             % (r.n, r.cnot, r.baseline_cnot))
            code = 1
    if args.verify:
        vargs = argparse.Namespace(ancilla="clean", targets=args.m,
                                   gate="rz(pi/4)", epsilon=args.epsilon
                                   or 0.1, n_b=None)
        target = {"mcx_clean": "mcx", "mcx_dirty": "mcx",
                  "mcmt_x": "mcmt-x", "mcmt_su2": "mcmt-su2",
                  "approx_u": "approx-u"}[args.family]
        if args.family == "mcx_dirty":
            vargs.ancilla = "dirty"
        for r in rows:
            vargs.controls = r.n
            fails = _VERIFY[target](vargs)
            for f in fails:
                sys.stderr.write("bench verify n=%d: FAIL: %s\n" % (r.n, f))
                code = 1
    return code


def cmd_export(args):
    if args.infile == "-":
        text = sys.stdin.read()
    else:
        with open(args.infile) as fh:
            text = fh.read()
    sys.stdout.write(export_text(parse_json(text), args.format))
    return 0


# ---------------------------------------------------------------------------
# argument plumbing

def _add_synth_flags(sub, target):
    sub.add_argument("--controls", type=int, required=True, metavar="N")
    if target == "mcx":
        sub.add_argument("--ancilla", choices=("clean", "dirty"),
                         default="clean")
    if target in ("mcmt-x", "mcmt-su2"):
        sub.add_argument("--targets", type=int, required=True, metavar="M")
    if target in ("mcmt-su2", "approx-u"):
        sub.add_argument("--gate", required=True,
                         help="x, z, s, t, h, rx(a), ry(a), rz(a) with pi "
                              "literal, or a JSON 2x2 matrix")
    if target == "approx-u":
        sub.add_argument("--epsilon", type=float, required=True)
        sub.add_argument("--n-b", dest="n_b", type=int, default=None)


def build_parser():
    p = argparse.ArgumentParser(prog="qsynth",
                                description="log-depth multi-controlled "
                                            "gate synthesis")
    cmds = p.add_subparsers(dest="command", required=True)

    for cmd, fn in (("synth", cmd_synth), ("verify", cmd_verify)):
        cp = cmds.add_parser(cmd)
        tsub = cp.add_subparsers(dest="target", required=True)
        for target in _SYNTH:
            tp = tsub.add_parser(target)
            _add_synth_flags(tp, target)
            if cmd == "synth":
                tp.add_argument("--format", choices=("qasm2", "qasm3",
                                                     "json"), default="json")
            tp.set_defaults(func=fn)

    bp = cmds.add_parser("bench")
    bp.add_argument("--family", choices=FAMILIES, required=True)
    bp.add_argument("--n-min", dest="n_min", type=int, required=True)
    bp.add_argument("--n-max", dest="n_max", type=int, required=True)
    bp.add_argument("--step", type=int, default=1)
    bp.add_argument("--m", type=int, default=1)
    bp.add_argument("--epsilon", type=float, default=None)
    bp.add_argument("--verify", action="store_true")
    bp.add_argument("--out", default=None)
    bp.set_defaults(func=cmd_bench)

    ep = cmds.add_parser("export")
    ep.add_argument("--in", dest="infile", required=True,
                    help="JSON circuit file, or - for standard input")
    ep.add_argument("--format", choices=("qasm2", "qasm3", "json"),
                    default="qasm3")
    ep.set_defaults(func=cmd_export)
    return p


def run(argv):
    """Entry point used by tests; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return 0 if not e.code else 2
    try:
        return args.func(args)
    except UsageError as e:
        sys.stderr.write("error: %s\n" % e)
        return 2
    except (ValueError, OSError) as e:
        sys.stderr.write("error: %s\n" % e)
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":  # pragma: no cover
    main()
