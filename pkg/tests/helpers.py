"""Shared test oracles, independent of the engine's sign machinery."""


def adjacent_decomposition_sign(perm, degrees, from_left):
    """Realize a permutation by adjacent swaps on an explicit list,
    multiplying the (-1)^{|a||b|} twist signs stepwise; an oracle for
    koszul_sign that never consults the inversion formula.
    """
    items = list(zip(perm, degrees))
    sign = 1
    changed = True
    while changed:
        changed = False
        rng = range(len(items) - 1) if from_left else range(len(items) - 2, -1, -1)
        for i in rng:
            if items[i][0] > items[i + 1][0]:
                if items[i][1] % 2 and items[i + 1][1] % 2:
                    sign = -sign
                items[i], items[i + 1] = items[i + 1], items[i]
                changed = True
    assert [p for p, _ in items] == sorted(perm)
    return sign
