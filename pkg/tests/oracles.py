"""Independent reference implementations used to cross-check the library.

Everything here is deliberately written in a different style from the
package code: plain Python loops, exact rational arithmetic where
possible, no shared helpers. If the package and these routines agree,
the agreement is meaningful.
"""

import math
from collections import Counter
from fractions import Fraction


def haralick_bruteforce(img, offset, levels):
    """Texture stats by enumerating pixel pairs; no co-occurrence matrix.

    Returns (contrast, correlation, energy, homogeneity) as floats
    computed from exact Fraction probabilities.
    """
    h = len(img)
    w = len(img[0])
    dy, dx = offset
    pairs = []
    for y in range(h):
        for x in range(w):
            y2, x2 = y + dy, x + dx
            if 0 <= y2 < h and 0 <= x2 < w:
                a = (int(img[y][x]) * levels) // 256
                b = (int(img[y2][x2]) * levels) // 256
                pairs.append((a, b))
                pairs.append((b, a))
    if not pairs:
        raise ValueError("no pixel pairs for offset")
    n = len(pairs)
    counts = Counter(pairs)

    contrast = Fraction(0)
    energy = Fraction(0)
    homogeneity = Fraction(0)
    mu_i = Fraction(0)
    mu_j = Fraction(0)
    cross = Fraction(0)
    sq_i = Fraction(0)
    sq_j = Fraction(0)
    for (i, j), c in counts.items():
        p = Fraction(c, n)
        contrast += p * (i - j) ** 2
        energy += p * p
        homogeneity += p / (1 + abs(i - j))
        mu_i += p * i
        mu_j += p * j
        cross += p * i * j
        sq_i += p * i * i
        sq_j += p * j * j
    var_i = sq_i - mu_i * mu_i
    var_j = sq_j - mu_j * mu_j
    if var_i == 0 and var_j == 0:
        correlation = 1.0
    else:
        sigma = math.sqrt(float(var_i)) * math.sqrt(float(var_j))
        correlation = float(cross - mu_i * mu_j) / sigma if sigma else 1.0
    return float(contrast), correlation, float(energy), float(homogeneity)


def glcm_bruteforce(img, offset, levels):
    """Co-occurrence probabilities as a dict {(i, j): Fraction}."""
    h = len(img)
    w = len(img[0])
    dy, dx = offset
    counts = Counter()
    total = 0
    for y in range(h):
        for x in range(w):
            y2, x2 = y + dy, x + dx
            if 0 <= y2 < h and 0 <= x2 < w:
                a = (int(img[y][x]) * levels) // 256
                b = (int(img[y2][x2]) * levels) // 256
                counts[(a, b)] += 1
                counts[(b, a)] += 1
                total += 2
    return {k: Fraction(c, total) for k, c in counts.items()}


def knn_bruteforce(model, query):
    """Nearest-neighbour vote with explicit sort over (distance, index)."""
    mean = model.scaler.mean
    std = model.scaler.std
    z = [(float(query[d]) - float(mean[d])) / float(std[d]) for d in range(len(query))]
    dists = []
    for idx in range(model.exemplars.shape[0]):
        row = model.exemplars[idx]
        s = 0.0
        for d in range(len(z)):
            diff = float(row[d]) - z[d]
            s += diff * diff
        dists.append((math.sqrt(s), idx))
    dists.sort(key=lambda t: (t[0], t[1]))
    chosen = [model.labels[idx] for _, idx in dists[: model.k]]
    ones = sum(1 for c in chosen if c == 1)
    zeros = len(chosen) - ones
    label = 1 if ones > zeros else 0
    score = max(ones, zeros) / model.k
    return label, score


def best_gate_threshold(truth, text_labels, text_scores, image_labels):
    """Exhaustive scan over every distinct cutoff, plus the extremes."""
    candidates = [float("-inf")] + sorted(set(text_scores)) + [max(text_scores) + 1.0]
    best = None
    for tau in candidates:
        hits = 0
        for y, tl, ts, il in zip(truth, text_labels, text_scores, image_labels):
            fused = il if ts < tau else tl
            hits += fused == y
        acc = hits / len(truth)
        if best is None or acc > best[1]:
            best = (tau, acc)
    return best
