"""Independent reference values for the unit tests.

Written against the model definitions, not the C++ sources; uses mpmath at
50 digits. Run: python3 tests/oracles/oracles.py
"""

import math

import mpmath as mp

mp.mp.dps = 50
KB = mp.mpf("8.617333262e-5")
T0 = mp.mpf(300)


def rho(t, phi):
    t = mp.mpf(t)
    return (T0 / t) ** 2 * mp.e ** (phi / KB * (1 / t - 1 / T0))


def phi_from_drop(drop):
    target = 1 - mp.mpf(drop)
    return mp.findroot(lambda p: rho(360, p) - target, (mp.mpf("-0.05"), mp.mpf(1)), solver="anderson")


def sensitivity(phi, temps=(300, 310, 320, 330, 340, 350, 360)):
    xs = [t - 300 for t in temps]
    ys = [100 * (rho(t, phi) - 1) for t in temps]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)


# mt19937_64 and the seeding scheme, from their published definitions.
class MT64:
    def __init__(self, seed):
        self.mt = [0] * 312
        self.mt[0] = seed & 0xFFFFFFFFFFFFFFFF
        for i in range(1, 312):
            self.mt[i] = (6364136223846793005 * (self.mt[i - 1] ^ (self.mt[i - 1] >> 62)) + i) & 0xFFFFFFFFFFFFFFFF
        self.i = 312

    def next(self):
        if self.i >= 312:
            for k in range(312):
                x = (self.mt[k] & 0xFFFFFFFF80000000) | (self.mt[(k + 1) % 312] & 0x7FFFFFFF)
                xa = x >> 1
                if x & 1:
                    xa ^= 0xB5026F5AA96619E9
                self.mt[k] = self.mt[(k + 156) % 312] ^ xa
            self.i = 0
        y = self.mt[self.i]
        self.i += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & 0xFFFFFFFFFFFFFFFF


M64 = 0xFFFFFFFFFFFFFFFF


def splitmix(x):
    x = (x + 0x9E3779B97F4A7C15) & M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & M64
    return x ^ (x >> 31)


def fnv(s):
    h = 0xCBF29CE484222325
    for c in s.encode():
        h = ((h ^ c) * 0x100000001B3) & M64
    return h


def substream(seed, name):
    return splitmix(splitmix(seed) ^ fnv(name))


def below(g, bound):
    limit = M64 - (M64 % bound)
    while True:
        x = g.next()
        if x < limit:
            return x % bound


def schedule(seed):
    g = MT64(substream(seed, "schedule"))
    order = [300, 310, 320, 330, 340, 350, 360]
    for i in range(len(order), 1, -1):
        j = below(g, i)
        order[i - 1], order[j] = order[j], order[i - 1]
    if order[-1] == 360:
        order[-1], order[-2] = order[-2], order[-1]
    return order + [360, 300]


def plant_deficit(step, t, tau_a=180.0, tau_d=720.0):
    # Cascaded first-order stages after a setpoint step at t = 0.
    return step * (tau_d * math.exp(-t / tau_d) - tau_a * math.exp(-t / tau_a)) / (tau_d - tau_a)


if __name__ == "__main__":
    for d in (0.61, 0.58, 0.38, 0.24, 0.11):
        p = phi_from_drop(d)
        print(f"drop {d}: phi {mp.nstr(p, 17)} sens {mp.nstr(sensitivity(p), 12)}")
    print("min drop", mp.nstr(1 - rho(360, -2 * KB * 300), 17))
    print("rho(330, 0.1)", mp.nstr(rho(330, mp.mpf("0.1")), 17))
    g = MT64(5489)
    for _ in range(9999):
        g.next()
    print("mt19937_64 10000th", g.next())
    for name in ("schedule", "drift", "device_spread", "read_noise"):
        print("substream", name, substream(1, name))
    print("schedule seed 1", schedule(1))
    print("schedule seed 7", schedule(7))
    print("deficit 10 K @ 3600 s", plant_deficit(10, 3600))
    print("deficit 10 K @ 600 s", plant_deficit(10, 600))
    beta = math.log(11) / 0.7
    print("beta", repr(beta))
    print("thermionic I(0.3 V, 330 K, A=1e-6, phi=0.3, a=0.05)",
          mp.nstr(mp.mpf("1e-6") * 330**2 * mp.e ** (-(mp.mpf("0.3") - mp.mpf("0.05") * mp.sqrt(mp.mpf("0.3"))) / (KB * 330)), 17))
