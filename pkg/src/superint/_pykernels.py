"""Pure-Python kernels; the reference behaviour for the compiled module."""
from .formula import AND, IMP, OR, VAR


def extend_extensions(todo, ext, frame, valuation):
    """Fill ``ext[node]`` (bitset of forcing points) for nodes in post-order."""
    full = frame.all
    down = frame.down
    for n in todo:
        k = n.kind
        if k == IMP:
            bad = ext[n.left] & ~ext[n.right]
            if bad:
                hit = 0
                while bad:
                    low = bad & -bad
                    v = low.bit_length() - 1
                    hit |= down[v]
                    bad &= ~hit
                ext[n] = full & ~hit
            else:
                ext[n] = full
        elif k == AND:
            ext[n] = ext[n.left] & ext[n.right]
        elif k == OR:
            ext[n] = ext[n.left] | ext[n.right]
        elif k == VAR:
            ext[n] = valuation.get(n.name, 0)
        else:
            ext[n] = 0


class Program:
    """A formula flattened to post-order arrays, shared by both kernel backends."""

    __slots__ = ("kinds", "lefts", "rights", "vars", "size")

    def __init__(self, kinds, lefts, rights, vars_):
        self.kinds = kinds
        self.lefts = lefts
        self.rights = rights
        self.vars = vars_
        self.size = len(kinds)


def compile_formula(f, names):
    """Post-order program for ``f``; variable slots index into ``names``."""
    from array import array
    from .formula import postorder

    slot = {n: i for i, n in enumerate(names)}
    nodes = postorder(f)
    where = {n: i for i, n in enumerate(nodes)}
    kinds, lefts, rights, vars_ = (array("i") for _ in range(4))
    for n in nodes:
        kinds.append(n.kind)
        if n.kind in (AND, OR, IMP):
            lefts.append(where[n.left])
            rights.append(where[n.right])
        else:
            lefts.append(-1)
            rights.append(-1)
        vars_.append(slot[n.name] if n.kind == VAR else -1)
    return Program(kinds, lefts, rights, vars_)


def _down_close(mask, down):
    hit = 0
    while mask:
        low = mask & -mask
        hit |= down[low.bit_length() - 1]
        mask &= ~hit
    return hit


def formula_bounds(prog, frame, lo_vals, hi_vals):
    """Points forcing the root under every / some completion of a partial valuation.

    ``lo_vals[v]`` are the points where variable ``v`` is surely true and
    ``hi_vals[v]`` those where it may be true.  Returns ``(lo, hi)``.
    """
    full = frame.all
    down = frame.down
    kinds, lefts, rights, vars_ = prog.kinds, prog.lefts, prog.rights, prog.vars
    lo = [0] * prog.size
    hi = [0] * prog.size
    for i in range(prog.size):
        k = kinds[i]
        if k == VAR:
            lo[i] = lo_vals[vars_[i]]
            hi[i] = hi_vals[vars_[i]]
        elif k == AND:
            lo[i] = lo[lefts[i]] & lo[rights[i]]
            hi[i] = hi[lefts[i]] & hi[rights[i]]
        elif k == OR:
            lo[i] = lo[lefts[i]] | lo[rights[i]]
            hi[i] = hi[lefts[i]] | hi[rights[i]]
        elif k == IMP:
            a, b = lefts[i], rights[i]
            lo[i] = full & ~_down_close(hi[a] & ~lo[b], down)
            hi[i] = full & ~_down_close(lo[a] & ~hi[b], down)
    return lo[-1], hi[-1]
