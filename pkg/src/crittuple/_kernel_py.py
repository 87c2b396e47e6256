"""Pure-Python search kernels.

Fallback twin of the compiled extension ``crittuple._kernel``: identical
entry points, identical traversal orders, identical results.  Keep the two
in lockstep; the parity tests assert it.

Encoding conventions (shared with the callers in ``homs``/``criticality``):
  * variables are 0..nvars-1; an atom argument ``-(v+1)`` denotes variable v,
    an argument ``c >= 0`` denotes constant id c;
  * instance tuples are tuples of constant ids, grouped per predicate id;
  * a pin is a length-nvars list with -1 for unbound variables.
"""

from time import monotonic

STATUS_FOUND = 0
STATUS_ABSENT = 1
STATUS_BUDGET = 2

STATUS_WITNESS = 0
STATUS_EXHAUSTED = 1

BACKEND = "python"

_TIME_CHECK_MASK = 1023


def solve_hom(
    nvars,
    nconsts,
    atom_preds,
    atom_args,
    tuples_by_pred,
    pin,
    var_order,
    use_mrv,
    max_nodes,
    deadline,
):
    """Backtracking search for a homomorphism of the encoded query.

    In static mode (use_mrv=False) variables are assigned in ``var_order``
    with candidate values ascending, so the first solution found is the
    lexicographically least extension of the pin.  MRV mode picks the
    most-constrained variable instead and only promises existence.

    Returns (status, assignment-or-None, nodes).  ``max_nodes``/``deadline``
    of 0 disable the respective budget.
    """
    na = len(atom_preds)
    assign = list(pin)
    vatoms = [[] for _ in range(nvars)]
    for a in range(na):
        for t in atom_args[a]:
            if t < 0:
                v = -t - 1
                if not vatoms[v] or vatoms[v][-1] != a:
                    vatoms[v].append(a)
    tupsets = [set(ts) for ts in tuples_by_pred]

    # Atoms already ground under the pin must be supported outright.
    for a in range(na):
        image = []
        for t in atom_args[a]:
            if t >= 0:
                image.append(t)
            else:
                b = assign[-t - 1]
                if b < 0:
                    image = None
                    break
                image.append(b)
        if image is not None and tuple(image) not in tupsets[atom_preds[a]]:
            return (STATUS_ABSENT, None, 0)

    def candidates(v):
        cand = None
        for a in vatoms[v]:
            args = atom_args[a]
            vals = set()
            for tup in tuples_by_pred[atom_preds[a]]:
                ok = True
                local = {}
                for pos, t in enumerate(args):
                    tv = tup[pos]
                    if t >= 0:
                        if tv != t:
                            ok = False
                            break
                    else:
                        v2 = -t - 1
                        b = assign[v2]
                        if b >= 0:
                            if tv != b:
                                ok = False
                                break
                        else:
                            prev = local.get(v2)
                            if prev is None:
                                local[v2] = tv
                            elif prev != tv:
                                ok = False
                                break
                if ok:
                    vals.add(local[v])
            if cand is None:
                cand = vals
            else:
                cand &= vals
            if not cand:
                return cand
        if cand is None:
            # variable in no atom: unconstrained
            return set(range(nconsts))
        return cand

    nodes = 0
    budget_hit = False

    def rec():
        nonlocal nodes, budget_hit
        if use_mrv:
            v = -1
            cand = None
            for u in range(nvars):
                if assign[u] < 0:
                    c = candidates(u)
                    if cand is None or len(c) < len(cand):
                        v, cand = u, c
                        if not c:
                            break
            if v < 0:
                return True
        else:
            v = -1
            for u in var_order:
                if assign[u] < 0:
                    v = u
                    break
            if v < 0:
                return True
            cand = candidates(v)
        for c in sorted(cand):
            nodes += 1
            if max_nodes and nodes > max_nodes:
                budget_hit = True
                return False
            if deadline and (nodes & _TIME_CHECK_MASK) == 0 and monotonic() > deadline:
                budget_hit = True
                return False
            assign[v] = c
            if rec():
                return True
            assign[v] = -1
            if budget_hit:
                return False
        return False

    if rec():
        return (STATUS_FOUND, assign, nodes)
    if budget_hit:
        return (STATUS_BUDGET, None, nodes)
    return (STATUS_ABSENT, None, nodes)


class _WitnessSearch:
    """Canonical candidate enumeration with image pruning.

    Enumerates, one representative per fresh-renaming class, the total maps
    of the query's variables into named constants (ids < nconsts_named)
    plus fresh constants, extending the pin.  A candidate h is a witness
    when the query has no homomorphism into h(Q) minus tau; a subtree is
    pruned as soon as the partial image already admits one (images only
    grow along a branch, so nothing below can be a witness).

    Value order at each variable: existing fresh constants ascending, one
    new fresh constant, then named constants ascending.  The first witness
    found is therefore the canonically least.

    Two layers keep the escape checks cheap:
      * per-atom support counters -- a tuple entering the image is tested
        once per atom for pattern compatibility (constants and repeated
        positions); while any atom has zero compatible tuples, no escape
        homomorphism can exist and the check is O(1);
      * a definite no-escape result is inherited down unchanged-image
        branches, so a leaf whose image equals an already-refuted one is a
        witness without another search.
    """

    def __init__(
        self,
        nvars,
        nconsts_named,
        npreds,
        atom_preds,
        atom_args,
        pin,
        order,
        tau_pred,
        tau_args,
        inner_budget,
        max_nodes,
        deadline,
        use_memo,
    ):
        self.nvars = nvars
        self.n_named = nconsts_named
        self.npreds = npreds
        self.atom_preds = list(atom_preds)
        self.atom_args = [tuple(a) for a in atom_args]
        self.assign = list(pin)
        self.order = list(order)
        self.tau_key = (tau_pred, tuple(tau_args))
        self.inner_budget = inner_budget
        self.max_nodes = max_nodes
        self.deadline = deadline
        self.memo = {} if use_memo else None

        na = len(self.atom_preds)
        self.nfree = len(self.order)
        pos_of = [-1] * nvars
        for i, v in enumerate(self.order):
            pos_of[v] = i
        self.atoms_at = [[] for _ in range(self.nfree + 1)]  # slot d+1
        for a in range(na):
            depth = -1
            for t in self.atom_args[a]:
                if t < 0:
                    v = -t - 1
                    if self.assign[v] < 0:
                        p = pos_of[v]
                        if p < 0:
                            raise ValueError("variable neither pinned nor ordered")
                        if p > depth:
                            depth = p
            self.atoms_at[depth + 1].append(a)

        self.vatoms = [[] for _ in range(nvars)]
        for a in range(na):
            for t in self.atom_args[a]:
                if t < 0:
                    v = -t - 1
                    if not self.vatoms[v] or self.vatoms[v][-1] != a:
                        self.vatoms[v].append(a)
        self.atoms_of_pred = [[] for _ in range(npreds)]
        for a in range(na):
            self.atoms_of_pred[self.atom_preds[a]].append(a)

        # pattern skeleton per atom: constants and repeated-position links
        self.pattern = []
        for a in range(na):
            args = self.atom_args[a]
            first_pos = {}
            pat = []
            for pos, t in enumerate(args):
                if t >= 0:
                    pat.append((pos, -1, t))  # must equal constant t
                else:
                    prev = first_pos.get(t)
                    if prev is None:
                        first_pos[t] = pos
                    else:
                        pat.append((pos, prev, -1))  # must equal value at prev
            self.pattern.append(pat)

        self.J = {}  # image tuple key -> refcount (tau excluded)
        self.support = [0] * na
        self.n_unsupported = na
        self.fresh_used = 0
        self.outer_nodes = 0
        self.hom_checks = 0
        self.inner_nodes = 0
        self.memo_hits = 0
        self._inner_assign = [-1] * nvars
        self._tbp = [[] for _ in range(npreds)]

    def _matches(self, a, tup):
        for pos, prev, c in self.pattern[a]:
            if c >= 0:
                if tup[pos] != c:
                    return False
            elif tup[pos] != tup[prev]:
                return False
        return True

    def _add_support(self, key):
        pred, tup = key
        for a in self.atoms_of_pred[pred]:
            if self._matches(a, tup):
                if self.support[a] == 0:
                    self.n_unsupported -= 1
                self.support[a] += 1

    def _drop_support(self, key):
        pred, tup = key
        for a in self.atoms_of_pred[pred]:
            if self._matches(a, tup):
                self.support[a] -= 1
                if self.support[a] == 0:
                    self.n_unsupported += 1

    def _ground(self, d):
        incr = []
        changed = False
        assign = self.assign
        for a in self.atoms_at[d + 1]:
            img = tuple(t if t >= 0 else assign[-t - 1] for t in self.atom_args[a])
            key = (self.atom_preds[a], img)
            if key == self.tau_key:
                continue
            n = self.J.get(key, 0)
            self.J[key] = n + 1
            incr.append(key)
            if n == 0:
                changed = True
                self._add_support(key)
        return incr, changed

    def _unground(self, incr):
        for key in incr:
            n = self.J[key] - 1
            if n:
                self.J[key] = n
            else:
                del self.J[key]
                self._drop_support(key)

    def _canonical_key(self):
        relabel = {}
        out = []
        for pred, args in sorted(self.J.keys()):
            row = [pred]
            for c in args:
                if c < self.n_named:
                    row.append(c)
                else:
                    r = relabel.get(c)
                    if r is None:
                        r = self.n_named + len(relabel)
                        relabel[c] = r
                    row.append(r)
            out.append(tuple(row))
        return tuple(out)

    def _escape_exists(self, max_nodes):
        """Full search for a homomorphism into the current image minus tau.

        Atom-oriented join: atoms are processed smallest-bucket-first with a
        connectivity preference, each step scanning the candidate tuples of
        one atom and binding all of its unbound variables at once.  Cheap
        per step, which matters more than node-optimal variable choice at
        these instance sizes.

        True / False / None (inner budget exhausted)."""
        atom_args = self.atom_args
        atom_preds = self.atom_preds
        na = len(atom_preds)
        tbp = self._tbp
        for lst in tbp:
            lst.clear()
        for pred, args in self.J.keys():
            tbp[pred].append(args)

        # join order: smallest bucket first, prefer atoms touching bound vars
        remaining = list(range(na))
        remaining.sort(key=lambda a: (len(tbp[atom_preds[a]]), a))
        order = []
        seen_vars = set()
        while remaining:
            pick = None
            for idx, a in enumerate(remaining):
                if any(t < 0 and (-t - 1) in seen_vars for t in atom_args[a]):
                    pick = idx
                    break
            if pick is None:
                pick = 0
            a = remaining.pop(pick)
            order.append(a)
            for t in atom_args[a]:
                if t < 0:
                    seen_vars.add(-t - 1)

        assign = self._inner_assign
        for i in range(self.nvars):
            assign[i] = -1
        nodes = 0
        budget_hit = False

        def rec(i):
            nonlocal nodes, budget_hit
            if i == na:
                return True
            a = order[i]
            args = atom_args[a]
            for tup in tbp[atom_preds[a]]:
                nodes += 1
                if max_nodes and nodes > max_nodes:
                    budget_hit = True
                    return False
                bound = []
                ok = True
                for pos, t in enumerate(args):
                    tv = tup[pos]
                    if t >= 0:
                        if tv != t:
                            ok = False
                            break
                    else:
                        v = -t - 1
                        b = assign[v]
                        if b < 0:
                            assign[v] = tv
                            bound.append(v)
                        elif b != tv:
                            ok = False
                            break
                if ok and rec(i + 1):
                    return True
                for v in bound:
                    assign[v] = -1
                if budget_hit:
                    return False
            return False

        found = rec(0)
        self.hom_checks += 1
        self.inner_nodes += nodes
        if found:
            return True
        if budget_hit:
            return None
        return False

    def _check(self, exact):
        """True: escape hom exists; False: definitely none; None: unknown."""
        if self.n_unsupported:
            return False
        memo = self.memo
        ck = None
        if memo is not None:
            ck = self._canonical_key()
            hit = memo.get(ck)
            if hit is not None:
                self.memo_hits += 1
                return hit
        res = self._escape_exists(0 if exact else self.inner_budget)
        if res is not None and memo is not None:
            memo[ck] = res
        return res

    def run(self):
        incr0, _ = self._ground(-1)
        if self.nfree == 0:
            res = self._check(True)
            status = STATUS_WITNESS if res is False else STATUS_EXHAUSTED
            witness = list(self.assign) if res is False else None
            return (status, witness, self._stats())
        root_res = self._check(False)
        if root_res is True:
            # the pinned part alone already admits an escape hom
            return (STATUS_EXHAUSTED, None, self._stats())
        r = self._rec(0, root_res is None)
        if r == 0:
            return (STATUS_WITNESS, list(self.assign), self._stats())
        if r == 2:
            return (STATUS_BUDGET, None, self._stats())
        return (STATUS_EXHAUSTED, None, self._stats())

    def _stats(self):
        return (self.outer_nodes, self.hom_checks, self.inner_nodes, self.memo_hits)

    def _rec(self, d, unknown):
        # 0 witness (assign left in place), 1 exhausted subtree, 2 budget.
        # ``unknown`` is True when the latest escape check on this image was
        # inconclusive; a False result is inherited down unchanged branches.
        v = self.order[d]
        last = d == self.nfree - 1
        n_named = self.n_named
        # value sequence: existing fresh ascending, one new fresh, named ascending
        values = list(range(n_named, n_named + self.fresh_used + 1))
        values.extend(range(n_named))
        for value in values:
            self.outer_nodes += 1
            if self.max_nodes and self.outer_nodes > self.max_nodes:
                return 2
            if (
                self.deadline
                and (self.outer_nodes & _TIME_CHECK_MASK) == 0
                and monotonic() > self.deadline
            ):
                return 2
            new_fresh = value == n_named + self.fresh_used
            self.assign[v] = value
            if new_fresh:
                self.fresh_used += 1
            incr, changed = self._ground(d)
            if last:
                if changed or unknown:
                    res = self._check(True)
                else:
                    res = False  # inherited: image unchanged since refuted
                if res is False:
                    return 0
            else:
                res = self._check(False) if changed else (None if unknown else False)
                if res is not True:
                    r = self._rec(d + 1, res is None)
                    if r != 1:
                        return r
            self._unground(incr)
            self.assign[v] = -1
            if new_fresh:
                self.fresh_used -= 1
        return 1


def search_witness(
    nvars,
    nconsts_named,
    npreds,
    atom_preds,
    atom_args,
    pin,
    order,
    tau_pred,
    tau_args,
    inner_budget,
    max_nodes,
    deadline,
    use_memo,
):
    """See :class:`_WitnessSearch`.

    Returns (status, assignment-or-None, stats) with stats =
    (outer_nodes, hom_checks, inner_nodes, memo_hits).
    """
    return _WitnessSearch(
        nvars,
        nconsts_named,
        npreds,
        atom_preds,
        atom_args,
        pin,
        order,
        tau_pred,
        tau_args,
        inner_budget,
        max_nodes,
        deadline,
        use_memo,
    ).run()
