"""Compare the numba transfer-matrix kernel against the pure-numpy fallback.

The kernel choice is frozen at import time via BIRKHOFF_NO_NUMBA, so each
variant runs in a subprocess.  Usage: python3 benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import textwrap

_WORKER = textwrap.dedent("""
    import json, sys, time
    import numpy as np
    from birkhoff.potentials import random_potential
    from birkhoff.discriminant import DiscriminantEvaluator
    from birkhoff import kernels

    phi = random_potential(K=8, seed=3, amplitude=1.0)
    ev = DiscriminantEvaluator(phi, subintervals=512, scheme="magnus4")
    lams = np.linspace(-80.0, 80.0, 2000)
    ev.raw(lams[:4])                       # warmup / JIT compile
    reps = int(sys.argv[1])
    t0 = time.perf_counter()
    for _ in range(reps):
        d, d1, d2, err = ev.raw(lams)
    dt = (time.perf_counter() - t0) / reps
    json.dump({"numba": kernels.USE_NUMBA, "seconds": dt,
               "checksum": float(np.sum(np.abs(d)))}, sys.stdout)
""")


def run(no_numba, reps=3):
    env = dict(os.environ, BIRKHOFF_NO_NUMBA="1" if no_numba else "0")
    out = subprocess.run([sys.executable, "-c", _WORKER, str(reps)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    numba = run(no_numba=False)
    numpy = run(no_numba=True)
    assert numba["numba"] and not numpy["numba"]
    drift = abs(numba["checksum"] - numpy["checksum"])
    print("kernel      time/eval (2000 pts, N_x=512+Richardson)")
    print("numba       %.4f s" % numba["seconds"])
    print("numpy       %.4f s" % numpy["seconds"])
    print("speedup     %.2fx" % (numpy["seconds"] / numba["seconds"]))
    print("checksum drift %.3g (must be ~0)" % drift)
    if drift > 1e-8:
        raise SystemExit("kernel paths disagree")


if __name__ == "__main__":
    main()
