"""Closed-form error floors of the preset schemes next to their exact-asymmetry floors."""
import argparse

from phasebounds.bounds import scheme_bound
from phasebounds.schemes import preset


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--K-max", type=int, default=10)
    p.add_argument("--M", type=int, default=4)
    args = p.parse_args()

    for name in ("linear_multipass", "quadratic_iterative", "roy_iterative"):
        print(f"\n{name}, M={args.M}")
        print(f"{'K':>3} {'n':>6} {'closed form':>12} {'exact A':>10} {'A cap':>8} {'floor(A)':>10}")
        for K in range(2, args.K_max + 1):
            spec = preset(name, K=K, M=args.M)
            b = scheme_bound(spec)
            print(f"{K:3d} {spec.qubits:6d} {b.value:12.4e} {b.exact_asymmetry:10.4f} {b.asymmetry_cap:8.4f} {b.exact_bound:10.4e}")

    print("\nqubit_universal")
    for n in (1, 2, 5, 10, 20):
        print(f"  n={n:<3d} eps >= {scheme_bound('qubit_universal', n=n).value:.4e}")
    print("\noptical_universal")
    for m, N in ((1, 1), (2, 2), (4, 10), (10, 100)):
        print(f"  m={m:<3d} N={N:<4d} eps >= {scheme_bound('optical_universal', modes=m, mean_photons=N).value:.4e}")


if __name__ == "__main__":
    main()
