"""Per-step hot ops: mask+renormalize and cumulative sampling.

The Cython build is used when present, the numpy fallback otherwise.
Both produce bitwise-identical doubles: totals accumulate in ascending
index order (np.sum is pairwise and therefore banned here) and
normalization is one reciprocal multiply per element.
"""

try:
    from toolgate.kernels._speedups import cum_pick, renorm_masked
    BACKEND = "cython"
except ImportError:
    from toolgate.kernels._fallback import cum_pick, renorm_masked
    BACKEND = "python"


def available_backends() -> dict:
    """name -> module, for benchmarks and parity tests."""
    from toolgate.kernels import _fallback

    impls = {"python": _fallback}
    try:
        from toolgate.kernels import _speedups

        impls["cython"] = _speedups
    except ImportError:
        pass
    return impls


__all__ = ["renorm_masked", "cum_pick", "BACKEND", "available_backends"]
