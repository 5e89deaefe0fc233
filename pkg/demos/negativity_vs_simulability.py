"""The codewords driven through the tableau have negative Wigner functions.

For each input state used by the demo circuits this prints the Wigner
negativity alongside the wall time of the exact simulation, and writes
the GKP Wigner grid to gkp0_wigner.csv.  Run with

    python demos/negativity_vs_simulability.py
"""

import time
from pathlib import Path

from cvstab import pipeline, wigner as wg
from cvstab.dsl import parse_file

here = Path(__file__).parent

cases = {
    "GKP |0_2>, Delta=0.2": wg.gkp_codeword_wavefunction(2, 0, 0.2),
    "GKP |0_2>, Delta=0.3": wg.gkp_codeword_wavefunction(2, 0, 0.3),
    "cat |0_2;1>, alpha=2": wg.cat_codeword_wavefunction(2.0, 2, 1, 0),
    "vacuum": (wg.uniform_grid(8, 0.05), None),
}
for name, (q, psi) in cases.items():
    if psi is None:
        psi = wg.vacuum_wavefunction(q)
    g = wg.wigner_of_wavefunction(psi, q)
    rep = wg.negativity(g)
    print(f"{name:24s} min W {rep.min_value:+.3f}  negative volume {rep.negative_volume:.3f}  log-neg {rep.log_negativity:.3f}")
    if name.startswith("GKP |0_2>, Delta=0.2"):
        (here / "gkp0_wigner.csv").write_text(wg.to_csv(g, stride=4))

print()
for path in sorted((here / "circuits").glob("*.cv")):
    try:
        t0 = time.perf_counter()
        rep = pipeline.run(parse_file(path))
        dt = time.perf_counter() - t0
        print(f"{path.name:30s} simulated exactly in {dt * 1e3:6.1f} ms: {rep['strong']['marginals']}")
    except Exception as exc:  # rejected circuits are part of the demo set
        print(f"{path.name:30s} rejected: {exc}")
