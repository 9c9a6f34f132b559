"""Exhaustive best codes on tiny binary channels next to both bounds."""

import math

from d0bounds import DenseChannel, achievability_error, converse_sup_search, joint_spectrum
from d0bounds.distributions import normalize
from d0bounds.oracles import brute_force_best_code


def main():
    for a, b in ((0.1, 0.1), (0.05, 0.3), (0.0, 0.4)):
        ch = DenseChannel.from_matrix([[1 - a, a], [b, 1 - b]])
        for m in (2, 3):
            best = brute_force_best_code(ch, m).best_error
            conv = converse_sup_search(ch, max(best, 1e-12)).log2_m
            cert = min(achievability_error(joint_spectrum(ch, normalize([w, 1 - w])), m)[0] for w in (0.25, 0.5, 0.75))
            print(
                f"crossovers=({a}, {b}) m={m}: best error {best:.4f}; "
                f"log2 m = {math.log2(m):.3f} <= converse {conv:.3f}; certified error {cert:.4f} >= {best:.4f}"
            )


if __name__ == "__main__":
    main()
