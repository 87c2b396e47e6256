"""Shared independent oracles for the test suite (no engine code)."""

from itertools import product

from crittuple.model import Fact


def naive_hom(query, instance, pin=None):
    """Enumerate every map of the query's variables into the instance's
    constants and return the first homomorphism, or None."""
    pin = pin or {}
    consts = sorted(instance.constants())
    qvars = query.variables()
    for values in product(consts, repeat=len(qvars)):
        h = dict(zip(qvars, values))
        if any(h[v] != c for v, c in pin.items()):
            continue
        ok = True
        for a in query.atoms:
            img = Fact(
                a.predicate,
                tuple(h[t.name] if t.is_var else t.name for t in a.args),
            )
            if img not in instance:
                ok = False
                break
        if ok:
            return h
    return None
