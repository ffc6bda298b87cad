"""Backend selection for the path kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module takes over. ``use_backend`` switches explicitly (tests, benchmarks).
"""

from __future__ import annotations

from contextlib import contextmanager

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = _compiled if _compiled is not None else _kernels_py


def available_backends():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def backend_name():
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(name):
    global _active
    if name == "python":
        _active = _kernels_py
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        _active = _compiled
    else:
        raise ValueError(f"unknown backend {name!r}")


@contextmanager
def backend(name):
    prev = backend_name()
    use_backend(name)
    try:
        yield
    finally:
        use_backend(prev)


def longest_suffix(topo, succ_ptr, succ_idx, wcet, active):
    return _active.longest_suffix(topo, succ_ptr, succ_idx, wcet, active)


def enumerate_paths(succ_ptr, succ_idx, wcet, active, potential, source, sink, threshold, limit=-1):
    return _active.enumerate_paths(succ_ptr, succ_idx, wcet, active, potential, source, sink, threshold, limit)


def enumerate_dominant(topo, succ_ptr, succ_idx, wcet, potential, node_branch, source, sink, threshold):
    return _active.enumerate_dominant(
        topo, succ_ptr, succ_idx, wcet, potential, node_branch, source, sink, threshold
    )


def eliminate(choice, lengths, path_ptr, path_idx, ext_ptr, ext_idx, drop_ptr, drop_idx,
              topo, succ_ptr, succ_idx, wcet):
    return _active.eliminate(
        choice, lengths, path_ptr, path_idx, ext_ptr, ext_idx, drop_ptr, drop_idx, topo, succ_ptr, succ_idx, wcet
    )


def miss_matrix(choice, prob, conditional):
    return _active.miss_matrix(choice, prob, conditional)
