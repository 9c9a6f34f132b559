"""Monte Carlo error of the randomised threshold decoder against its certified bound."""

from d0bounds import achievability_error, bsc_dense, d0_smooth, joint_spectrum, memoryless_extension
from d0bounds.distributions import uniform
from d0bounds.oracles import simulate_phi_decoder


def main():
    for n, m in ((4, 2), (7, 4), (10, 8)):
        ch = memoryless_extension(bsc_dense(0.11), n)
        px = uniform(2**n)
        spectrum = joint_spectrum(ch, px)
        _, eps_prime = achievability_error(spectrum, m)
        rep = simulate_phi_decoder(ch, px, d0_smooth(spectrum, eps_prime).test, m, 100_000, seed=42)
        print(
            f"n={n:2d} m={m}  simulated {rep.error_estimate:.4f} +- {rep.std_err:.4f}"
            f"  bound {rep.bound_rhs:.4f}  within: {rep.within_bound}"
        )


if __name__ == "__main__":
    main()
