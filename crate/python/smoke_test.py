"""Smoke test for the hbf_py extension.

Run after `maturin develop -m crates/python/Cargo.toml`, or with the built
shared library on PYTHONPATH as hbf_py.so.
"""

import math
import os
import tempfile

import hbf_py as hbf

DIM = 2048

a = hbf.codeword("key", 7, DIM, "alpha")
b = hbf.codeword("value", 7, DIM, "red")
assert len(a) == DIM and set(a) <= {-1.0, 1.0}
bound = hbf.convolve(a, b)
recovered = hbf.correlate(a, bound)
assert hbf.cosine(recovered, b) > 0.6

pairs = [(f"k{i}", f"colour-{i % 4}") for i in range(20)]
labels = sorted({v for _, v in pairs})
mem = hbf.Memory.build(pairs, DIM, key_seed=3, value_seed=4)
assert mem.item_count == 20 and mem.dim == DIM

cal = mem.calibrate(labels, members=pairs, probes=200, eps=0.01)
ans = mem.query("k5", labels, cal.tau, cal.delta)
assert ans.hit and ans.label == "colour-1", ans
miss = mem.query("not-stored", labels, cal.tau, cal.delta)
assert not miss.hit, miss

mem.insert("late", "colour-9")
labels.append("colour-9")
assert mem.query("late", labels, -math.inf).label == "colour-9"

with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "store.hbf")
    mem.save(path)
    back = hbf.Memory.load(path)
    assert back.vector() == mem.vector()
    try:
        hbf.Memory.load(os.path.join(tmp, "missing.hbf"))
    except OSError:
        pass
    else:
        raise AssertionError("missing file should raise OSError")

assert abs(hbf.fp_threshold(100, 10000, 0.01) - 429.193) < 1e-3
assert abs(hbf.inv_norm_cdf(0.975) - 1.959963984540054) < 1e-9
assert abs(hbf.norm_cdf(0.0) - 0.5) < 1e-15
p, t = hbf.chase_model(0.99, 20)
assert abs(p - 0.99**20) < 1e-12
rate, _ = hbf.chase_simulation(0.99, 20, trials=2000, seed=1)
assert abs(rate - p) < 0.05

try:
    hbf.Memory(0)
except ValueError:
    pass
else:
    raise AssertionError("zero dimension should raise ValueError")

print("smoke test ok")
