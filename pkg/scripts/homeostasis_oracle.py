"""High-precision step-through of the homeostasis update for a short input stream.

Prints the per-step explore probabilities frozen into tests/test_homeostasis.py
and the acceptance suite. Run: python scripts/homeostasis_oracle.py
"""

import mpmath as mp

mp.mp.dps = 50


def trace(inputs, rho, eps):
    rho, eps = mp.mpf(rho), mp.mpf(eps)
    mean = var = tmean = mp.mpf(0)
    out = []
    for t, x in enumerate(inputs, start=1):
        x = mp.mpf(x)
        tau = min(mp.mpf(t), 5 / rho)
        a = 1 / tau
        mean = (1 - a) * mean + a * x
        var = (1 - a) * var + a * (x - mean) ** 2
        z = (x - mean) / mp.sqrt(var + eps)
        z = max(mp.mpf(-20), min(mp.mpf(20), z))
        xp = mp.exp(z)
        tmean = (1 - a) * tmean + a * xp
        out.append(min(mp.mpf(1), rho * xp / tmean))
    return out


if __name__ == "__main__":
    for p in trace([1, 2, 3], "0.5", "1e-8"):
        print(mp.nstr(p, 25))
