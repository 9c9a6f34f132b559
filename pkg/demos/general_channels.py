"""Bounds for the Z-channel and its first memoryless extensions."""

from d0bounds import DenseChannel, achievability_bound, converse_sup_search, joint_spectrum, memoryless_extension
from d0bounds.distributions import uniform


def main():
    z = DenseChannel.from_matrix([[1.0, 0.0], [0.2, 0.8]])
    for n in (1, 2, 3):
        ch = memoryless_extension(z, n)
        conv = converse_sup_search(ch, 0.1, grid=20 if n < 3 else 6)
        ach = achievability_bound(joint_spectrum(ch, uniform(2**n)), 0.1, "exact", n)
        print(f"n={n}  converse log2 m <= {conv.log2_m:.4f}   uniform-input achievability log2 m >= {ach.log2_m:.4f}")


if __name__ == "__main__":
    main()
