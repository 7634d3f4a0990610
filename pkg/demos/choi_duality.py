"""Tour of the dual-state view: one matrix that holds a whole channel."""

import numpy as np

from qchan import channel, numkit


def section(title):
    print()
    print("== " + title)


def main():
    np.set_printoptions(precision=4, suppress=True, linewidth=100)

    section("amplitude damping, gamma = 0.4")
    ch = channel.amplitude_damping(0.4)
    print("Kraus operators:")
    for a in ch.kraus:
        print(np.round(a, 4))
    print("unnormalized Choi matrix (trace %.1f):" % np.trace(ch.choi).real)
    print(ch.choi.real)
    print("Jamiolkowski eigenvalues:", np.round(numkit.eigh(ch.jam)[0], 6))
    print("Kraus rank:", channel.rank(ch))

    section("the dual state answers map-level questions")
    print("trace preserving:", channel.is_tp(ch))
    print("unital:", channel.is_unital(ch))
    rho = np.array([[0.7, 0.2 + 0.1j], [0.2 - 0.1j, 0.3]])
    via_kraus = channel.apply(ch, rho)
    via_dual = channel.apply_via_dual(ch.choi, rho)
    print("Kraus route and dual-state route agree to %.2e"
          % np.abs(via_kraus - via_dual).max())

    section("round trip through the Choi matrix")
    back = channel.Channel(channel.kraus_from_choi(ch.choi))
    print("minimal Kraus count:", len(back.kraus))
    print("Choi reconstruction error: %.2e"
          % np.abs(back.choi - ch.choi).max())

    section("composition stays in the family")
    twice = channel.compose(ch, ch)
    expected = channel.amplitude_damping(1 - 0.6 * 0.6)
    print("damping twice at 0.4 equals damping once at 0.64: %.2e"
          % np.abs(twice.choi - expected.choi).max())

    section("the transpose is Hermitian-preserving but not CP")
    hm = channel.transpose_map(2)
    print("signed Kraus weights:",
          np.round(sorted(lam for lam, _ in hm.signed_kraus), 6))
    dec = channel.cp_deficit(hm)
    print("CP deficit epsilon = %.6f" % dec.epsilon)
    print("the CP part is itself a channel, TP:", channel.is_tp(dec.tilde))
    unit = np.array([[0, 1], [0, 0]], dtype=complex)
    err = np.abs(dec.reconstruct(unit) - unit.T).max()
    print("transpose action recovered from the CP part, error %.2e" % err)


if __name__ == "__main__":
    main()
