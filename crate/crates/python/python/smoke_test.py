"""Smoke test for the sparse_pr_py extension.

Uses an installed module if there is one, otherwise the shared library left
in target/ by `cargo build -p sparse-pr-python --features extension-module`.
"""

import cmath
import importlib.machinery
import importlib.util
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[3]


def load():
    try:
        import sparse_pr_py

        return sparse_pr_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libsparse_pr_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("sparse_pr_py", str(lib))
            spec = importlib.util.spec_from_loader("sparse_pr_py", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("sparse_pr_py not found; build it first")


def main():
    sp = load()

    x = sp.SparseSignal(64, [2, 5, 13, 31, 44], [0.8 + 0.24j, -1.3 - 0.39j, 0.4 + 0.12j, 2.1 + 0.63j, -0.6 - 0.18j])
    a = sp.autocorrelation(x)
    assert len(a) == 64
    assert abs(a[0] - x.norm() ** 2) < 1e-12

    w = sp.support_of(a)
    assert w == sp.distance_set(x.support)
    u = sp.recover_support(w)
    assert sp.distance_set(u) == w
    assert u in sp.brute_force_turnpike(w)

    y = sp.tspr(a)
    assert sp.equivalent(x, y), sp.orbit_distance(x, y)
    z = x.conj_flip().scaled(cmath.exp(0.7j)).shifted(-2)
    assert sp.equivalent(x, z)
    c = x.canonicalize()
    assert c.canonicalize() == c
    gap = sum(abs(p - q) ** 2 for p, q in zip(c.to_dense(), z.canonicalize().to_dense())) ** 0.5
    assert gap < 1e-9 * x.norm()

    v = sp.solve_sdp_equality(a, [i - x.support[0] for i in x.support], method="splitting")
    assert sp.equivalent(x, v, 1e-4)

    g = sp.gen_instance(256, 6, seed=4)
    assert g.sparsity == 6
    b = sp.autocorrelation(g)
    f, residual = sp.sparse_fienup(b, 6, inits=20, iters=200, seed=1)
    assert f.sparsity <= 6 and residual >= 0.0
    (s, lifted) = sp.tspr_noisy(b, tau=1e-9 * b[0].real)
    assert sp.equivalent(g, s)
    assert len(lifted) >= 6 and all(len(row) == len(lifted) for row in lifted)

    try:
        sp.SparseSignal(4, [5], [1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range support accepted")
    try:
        sp.recover_support([0, 1, 3, 7])
    except sp.RecoveryError:
        pass
    else:
        raise AssertionError("impossible distance set accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
