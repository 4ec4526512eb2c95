import numpy as np
from numba import jit


@jit(nopython=True)
def circular_runs(mask):
    """Label maximal runs of True values of a periodic boolean sequence.

    Returns (labels, count): labels[i] is the run index of sample i (or -1),
    with runs wrapping around the end of the array merged into the first one.
    """
    n = mask.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    count = 0
    for i in range(n):
        if mask[i]:
            if i > 0 and mask[i - 1]:
                labels[i] = labels[i - 1]
            else:
                labels[i] = count
                count += 1

    if count > 1 and mask[0] and mask[n - 1]:
        last = labels[n - 1]
        for i in range(n):
            if labels[i] == last:
                labels[i] = 0
        count -= 1

    return labels, count
