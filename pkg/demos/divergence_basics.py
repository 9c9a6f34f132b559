"""Smooth 0-divergence of small distribution pairs and its threshold test."""

import math

from d0bounds import build_spectrum, d0, d0_smooth, kl_divergence, normalize


def main():
    p = normalize([0.5, 0.3, 0.2, 0.0])
    q = normalize([0.1, 0.2, 0.3, 0.4])
    spectrum = build_spectrum(p, q)
    print(f"D0(P||Q) = {d0(spectrum):.6f} bits (-log2 Q(supp P))")
    print(f"KL(P||Q) = {kl_divergence(p, q):.6f} bits")
    for delta in (0.0, 0.1, 0.3, 0.6, 0.9):
        res = d0_smooth(spectrum, delta)
        print(
            f"delta={delta:.1f}  D0^delta={res.value:8.5f}  "
            f"boundary log2 ratio={res.test.boundary_log_ratio:8.5f}  gamma={res.test.gamma:.4f}"
        )
    same = d0_smooth(build_spectrum(p, p), 0.25).value
    print(f"identical pair at delta=0.25: {same:.6f} = -log2(0.75) = {-math.log2(0.75):.6f}")


if __name__ == "__main__":
    main()
