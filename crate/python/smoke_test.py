"""Smoke test for the compiled `asymod` extension module.

Build and install first, e.g. `pip install ./crates/py` (maturin backend), or
copy `target/release/libasymod.so` next to this file as `asymod.so`.
"""

import math
import sys

import asymod


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    checks = []

    checks.append(("jacobi endpoint", close(asymod.jacobi_eval(5, 1.0), 1.0, 0.0)))
    nodes, weights = asymod.gauss_legendre(8)
    checks.append(("legendre x^14", close(sum(w * x**14 for x, w in zip(nodes, weights)), 2 / 15, 1e-14)))
    nodes, weights = asymod.gauss_chebyshev(4)
    checks.append(("chebyshev mass", close(sum(weights), math.pi, 1e-14)))

    checks.append(("gate accepts (2, 1)", asymod.validate_params(2.0, 1.0) == []))
    checks.append(("gate rejects (2, 0.75)", asymod.validate_params(2.0, 0.75) != []))

    checks.append(("T_1 f = f", close(asymod.translate("abs", 1.0, -0.3), 0.3, 1e-12)))
    checks.append(("T_y 1 = 1", close(asymod.translate([1.0], 0.2, 0.5), 1.0, 1e-12)))
    checks.append(("R_1(y) = y^3", close(asymod.multiplier(1, 0.5), 0.125, 1e-14)))

    r = asymod.best_approx("x", 1, 2.0, 1.0)
    checks.append(("E_1(x) = sqrt(16/105)", close(r.value, math.sqrt(16 / 105), 1e-12)))
    seq = asymod.best_approx_seq("abs", 12, math.inf, 1.0)
    checks.append(("sup sequence healthy", all(s.healthy for s in seq)))
    checks.append(("sup sequence monotone", all(b.value <= a.value + 1e-9 for a, b in zip(seq, seq[1:]))))

    omega, _ = asymod.modulus("one", 0.5, 2.0, 1.0)
    checks.append(("omega of constant", omega <= 1e-10))

    selected, rows = asymod.calibrate()
    checks.append(("calibration unique", selected is not None and sum(m for _, _, m in rows) == 1))

    props = asymod.verify_lemma1(n_max=8)
    checks.append(("operator properties", all(p[-1] for p in props)))

    table = asymod.converse_table("abs", [4, 8, 16], 2.0, 1.0)
    checks.append(("converse ratios finite", all(math.isfinite(r[3]) and r[3] > 0 for r in table)))

    try:
        asymod.translate("abs", 0.3, 1.0)
        checks.append(("edge raises", False))
    except ValueError:
        checks.append(("edge raises", True))

    failed = [name for name, ok in checks if not ok]
    for name, ok in checks:
        print(f"{'ok  ' if ok else 'FAIL'} {name}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
