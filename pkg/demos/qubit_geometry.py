"""Qubit channels as Bloch-ball geometry: affine maps, ellipsoids, forms."""

import numpy as np

from qchan import channel, qubit


def main():
    np.set_printoptions(precision=4, suppress=True)

    print("Pauli transfer picture of amplitude damping at gamma = 0.5")
    ch = channel.amplitude_damping(0.5)
    p = qubit.ptm(ch)
    print("distortion matrix:")
    print(p.lam)
    print("shift vector:", p.t)

    print("\nimage of the Bloch ball")
    center, axes, orient = qubit.ellipsoid(ch)
    print("ellipsoid center:", center)
    print("semi-axes:", np.round(axes, 6))
    print("orientation determinant: %.4f" % np.linalg.det(orient))

    print("\nlocal-unitary normal form is conjugation invariant")
    rng = np.random.default_rng(2)
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    u = np.linalg.qr(g)[0]
    conj = channel.Channel([u @ k @ u.conj().T for k in ch.kraus])
    form = qubit.lu_normal_form(conj)
    print("lambdas:", np.round(form.lambdas, 6))
    print("shift:  ", np.round(form.shift, 6))
    print("(compare sqrt(1-g), sqrt(1-g), 1-g and (0, 0, g) at g = 0.5)")

    print("\nfiltering normal forms (classification up to invertible maps)")
    for name, ch2 in [("depolarizing 0.5", channel.depolarizing(0.5)),
                      ("amplitude damping 0.5",
                       channel.amplitude_damping(0.5)),
                      ("complete damping", channel.amplitude_damping(1.0))]:
        f = qubit.slocc_normal_form(ch2)
        extra = ""
        if f.kind == "Generic":
            extra = "  s = " + str(np.round(f.s, 4))
        if f.kind == "NonGeneric":
            extra = "  x = %.4f" % f.x
        print("  %-24s %s%s" % (name, f.kind, extra))

    print("\nthe two-angle family of extremal qubit channels")
    for alpha, beta in [(np.pi, 0.0), (2.0, 0.7), (1.2, 1.2)]:
        ch3 = qubit.canonical_extremal(alpha, beta)
        print("  alpha %.2f beta %.2f -> rank %d, extremal family member"
              % (alpha, beta, channel.rank(ch3)))

    # amplitude damping sits inside the family; recover its angles from
    # a unitarily disguised copy
    disguised = channel.Channel([u @ k @ u.conj().T for k in ch.kraus])
    rec = qubit.extremal_form_of(disguised)
    print("\nangles recovered for disguised amplitude damping:"
          " alpha %.4f beta %.4f" % (rec.alpha, rec.beta))
    print("reconstruction error %.2e"
          % np.abs(rec.reconstruct().choi - disguised.choi).max())


if __name__ == "__main__":
    main()
