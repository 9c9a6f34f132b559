"""Per-letter smooth 0-divergence of i.i.d. products approaching KL."""

from d0bounds import kl_divergence, normalize
from d0bounds.oracles import lemma2_convergence


def main():
    p, q = normalize([0.89, 0.11]), normalize([0.5, 0.5])
    print(f"KL = {kl_divergence(p, q):.6f} bits")
    for n, value in lemma2_convergence(p, q, 0.01, [1, 10, 125, 500, 2000, 10000]):
        print(f"n={n:6d}  D0^0.01(P^n||Q^n)/n = {value:.6f}")


if __name__ == "__main__":
    main()
