"""Converse and achievability curves for BSC(0.11) at error 1e-3."""

from d0bounds import bounds
from d0bounds.channels import BscChannel, bsc_spectrum

P, EPS = 0.11, 1e-3


def main():
    print(f"{'n':>5} {'converse':>9} {'np':>9} {'ach':>9} {'rcu':>9} {'dt':>9} {'gallager':>9}  (rates, bits/use)")
    for n in (100, 200, 500, 1000, 2000):
        s = bsc_spectrum(BscChannel(n, P))
        row = [
            bounds.converse_bound(s, EPS, n),
            bounds.np_converse_bsc(BscChannel(n, P), EPS),
            bounds.achievability_bound(s, EPS, "exact", n),
            bounds.rcu_bsc(n, P, EPS),
            bounds.dt_bsc(n, P, EPS),
            bounds.gallager_bsc(n, P, EPS),
        ]
        print(f"{n:5d} " + " ".join(f"{pt.rate:9.5f}" for pt in row))


if __name__ == "__main__":
    main()
