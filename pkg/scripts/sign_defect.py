"""Compare the literal odd-l weights with the corrected ones, generator by generator.

For each map the script prints the pseudo-determinant sign, the kind of
w = cx+d, and the least-squares ratio rhs/lhs of the two sides of the
intertwining identity under both weight forms.  A ratio of +1 means the
identity holds.
"""

import numpy as np

from slicegrav.moebius import PointSpace, compose, parse_word, sample_valid_point
from slicegrav.verify import CheckCase, intertwining_sides, random_polynomial, sample_stream, stack_polynomials
from slicegrav.weights import pseudo_determinant_sign

P, Q, SAMPLES = 2, 2, 20
WORDS = ["T[0.5,-0.3]", "D[1.7]", "D[-0.8]", "R[q:1]", "R[0.6,0.8]", "I", "I R[q:1]", "R[q:1] R[0.6,0.8]", "T[0.4,0] I R[q:2] D[1.3]"]


def ratio(lhs, rhs):
    return float(np.sum(lhs * rhs) / np.sum(lhs * lhs))


def main():
    space = PointSpace.vector(P, Q)
    print(f"signature p={P}, q={Q}; {SAMPLES} samples per row")
    print(f"{'word':<28} {'Delta':>5}  {'l':>2} {'literal':>10} {'corrected':>10}")
    for word in WORDS:
        M = compose(parse_word(word, space))
        rng = sample_stream(0, word, 0)
        xs = np.array([sample_valid_point(M, space, 0.1, rng) for _ in range(SAMPLES)])
        for l in (1, 3):
            f = stack_polynomials([random_polynomial(rng, space.nvars, l + 3, space.m) for _ in range(SAMPLES)])
            r = {}
            for form in ("literal", "corrected"):
                lhs, rhs = intertwining_sides(CheckCase("slice_G", P, Q, l, word, form=form), M, space, xs, f)
                r[form] = ratio(lhs, rhs)
            print(f"{word:<28} {pseudo_determinant_sign(M):>+5.0f}  {l:>2} {r['literal']:>+10.4f} {r['corrected']:>+10.4f}")


if __name__ == "__main__":
    main()
