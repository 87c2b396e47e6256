# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels.

Twin of ``crittuple._kernel_py``: identical entry points, identical
traversal orders, identical results.  The pure module is the reference;
keep the two in lockstep.
"""

from time import monotonic

from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy, memset

BACKEND = "compiled"

STATUS_FOUND = 0
STATUS_ABSENT = 1
STATUS_BUDGET = 2

STATUS_WITNESS = 0
STATUS_EXHAUSTED = 1

cdef long _TIME_MASK = 1023


cdef class _HomSolver:
    """Variable-oriented backtracking with forward candidate filtering."""

    cdef int nvars, nconsts, na, npreds
    cdef int* a_pred
    cdef int* a_off        # na + 1
    cdef int* a_args       # flattened term codes
    cdef int* a_prev       # earlier position of the same variable within the atom, else -1
    cdef int* v_off        # nvars + 1
    cdef int* v_atoms      # atom ids per variable (first occurrences only)
    cdef int* v_pos        # position of that first occurrence
    cdef int* t_off        # npreds, flat offsets into t_data
    cdef int* t_count      # tuples per predicate
    cdef int* t_arity
    cdef int* t_data
    cdef int* assign
    cdef int* order
    cdef int order_len
    cdef bint use_mrv
    cdef long max_nodes, nodes
    cdef double deadline
    cdef bint budget_hit
    cdef char* flags_stack  # nvars * nconsts, one row per depth
    cdef char* sel_flags
    cdef char* tmp_flags

    def __cinit__(self):
        self.a_pred = NULL

    def __dealloc__(self):
        if self.a_pred != NULL:
            free(self.a_pred); free(self.a_off); free(self.a_args)
            free(self.a_prev); free(self.v_off); free(self.v_atoms)
            free(self.v_pos); free(self.t_off); free(self.t_count)
            free(self.t_arity); free(self.t_data); free(self.assign)
            free(self.order); free(self.flags_stack); free(self.sel_flags)
            free(self.tmp_flags)

    cdef int setup(self, int nvars, int nconsts, list atom_preds, list atom_args,
                   list tuples_by_pred, list pin, list var_order) except -1:
        cdef int na = len(atom_preds)
        cdef int npreds = len(tuples_by_pred)
        cdef int total = 0, i, j, pos, t, v, cnt
        for args in atom_args:
            total += len(args)
        self.nvars = nvars; self.nconsts = nconsts
        self.na = na; self.npreds = npreds
        self.a_pred = <int*>malloc(max(na, 1) * sizeof(int))
        self.a_off = <int*>malloc((na + 1) * sizeof(int))
        self.a_args = <int*>malloc(max(total, 1) * sizeof(int))
        self.a_prev = <int*>malloc(max(total, 1) * sizeof(int))
        self.v_off = <int*>malloc((nvars + 1) * sizeof(int))
        self.t_off = <int*>malloc(max(npreds, 1) * sizeof(int))
        self.t_count = <int*>malloc(max(npreds, 1) * sizeof(int))
        self.t_arity = <int*>malloc(max(npreds, 1) * sizeof(int))
        self.assign = <int*>malloc(max(nvars, 1) * sizeof(int))
        self.order = <int*>malloc(max(nvars, 1) * sizeof(int))
        self.flags_stack = <char*>malloc(max(nvars * nconsts, 1))
        self.sel_flags = <char*>malloc(max(nconsts, 1))
        self.tmp_flags = <char*>malloc(max(nconsts, 1))
        self.a_off[0] = 0
        pos = 0
        for i in range(na):
            self.a_pred[i] = <int>atom_preds[i]
            for t in atom_args[i]:
                self.a_args[pos] = t
                pos += 1
            self.a_off[i + 1] = pos
        for i in range(na):
            for j in range(self.a_off[i], self.a_off[i + 1]):
                self.a_prev[j] = -1
                t = self.a_args[j]
                if t < 0:
                    for pos in range(self.a_off[i], j):
                        if self.a_args[pos] == t:
                            self.a_prev[j] = pos - self.a_off[i]
                            break
        cdef int* counts = <int*>calloc(max(nvars, 1), sizeof(int))
        if counts == NULL:
            raise MemoryError()
        for i in range(na):
            for j in range(self.a_off[i], self.a_off[i + 1]):
                t = self.a_args[j]
                if t < 0 and self.a_prev[j] < 0:
                    counts[-t - 1] += 1
        self.v_off[0] = 0
        for v in range(nvars):
            self.v_off[v + 1] = self.v_off[v] + counts[v]
            counts[v] = 0
        self.v_atoms = <int*>malloc(max(self.v_off[nvars], 1) * sizeof(int))
        self.v_pos = <int*>malloc(max(self.v_off[nvars], 1) * sizeof(int))
        for i in range(na):
            for j in range(self.a_off[i], self.a_off[i + 1]):
                t = self.a_args[j]
                if t < 0 and self.a_prev[j] < 0:
                    v = -t - 1
                    self.v_atoms[self.v_off[v] + counts[v]] = i
                    self.v_pos[self.v_off[v] + counts[v]] = j - self.a_off[i]
                    counts[v] += 1
        free(counts)
        total = 0
        for i in range(npreds):
            tl = tuples_by_pred[i]
            if len(tl) > 0:
                self.t_arity[i] = len(tl[0])
                total += len(tl) * self.t_arity[i]
            else:
                self.t_arity[i] = 0
        self.t_data = <int*>malloc(max(total, 1) * sizeof(int))
        pos = 0
        for i in range(npreds):
            self.t_off[i] = pos
            cnt = 0
            for tup in tuples_by_pred[i]:
                for t in tup:
                    self.t_data[pos] = t
                    pos += 1
                cnt += 1
            self.t_count[i] = cnt
        for v in range(nvars):
            self.assign[v] = <int>pin[v]
        self.order_len = len(var_order)
        for i in range(self.order_len):
            self.order[i] = <int>var_order[i]
        return 0

    cdef inline int ntuples(self, int p):
        return self.t_count[p]

    cdef inline int* tuple_at(self, int p, int k):
        return self.t_data + self.t_off[p] + k * self.t_arity[p]

    cdef bint ground_supported(self):
        cdef int i, j, p, k, arity, t, b
        cdef bint ground, match
        cdef int* tup
        cdef int image[64]
        for i in range(self.na):
            arity = self.a_off[i + 1] - self.a_off[i]
            if arity > 64:
                raise ValueError("atom arity above 64 is unsupported")
            ground = True
            for j in range(arity):
                t = self.a_args[self.a_off[i] + j]
                if t >= 0:
                    image[j] = t
                else:
                    b = self.assign[-t - 1]
                    if b < 0:
                        ground = False
                        break
                    image[j] = b
            if not ground:
                continue
            p = self.a_pred[i]
            match = False
            if self.t_arity[p] == arity:
                for k in range(self.ntuples(p)):
                    tup = self.tuple_at(p, k)
                    match = True
                    for j in range(arity):
                        if tup[j] != image[j]:
                            match = False
                            break
                    if match:
                        break
            if not match:
                return False
        return True

    cdef int cand_count(self, int v, char* out):
        """Candidate constants for v under the current partial assignment."""
        cdef int idx, a, first_pos, k, j, p, arity, t, b, base, c
        cdef int count = -1
        cdef int* tup
        cdef bint ok
        cdef char* tmp = self.tmp_flags
        if self.v_off[v] == self.v_off[v + 1]:
            memset(out, 1, self.nconsts)
            return self.nconsts
        cdef bint first_atom = True
        for idx in range(self.v_off[v], self.v_off[v + 1]):
            a = self.v_atoms[idx]
            first_pos = self.v_pos[idx]
            p = self.a_pred[a]
            base = self.a_off[a]
            arity = self.a_off[a + 1] - base
            memset(tmp, 0, self.nconsts)
            if self.t_arity[p] == arity:
                for k in range(self.ntuples(p)):
                    tup = self.tuple_at(p, k)
                    ok = True
                    for j in range(arity):
                        t = self.a_args[base + j]
                        if t >= 0:
                            if tup[j] != t:
                                ok = False
                                break
                        else:
                            b = self.assign[-t - 1]
                            if b >= 0:
                                if tup[j] != b:
                                    ok = False
                                    break
                            elif self.a_prev[base + j] >= 0:
                                if tup[j] != tup[self.a_prev[base + j]]:
                                    ok = False
                                    break
                    if ok:
                        tmp[tup[first_pos]] = 1
            count = 0
            if first_atom:
                memcpy(out, tmp, self.nconsts)
                for c in range(self.nconsts):
                    if out[c]:
                        count += 1
                first_atom = False
            else:
                for c in range(self.nconsts):
                    if out[c] and tmp[c]:
                        count += 1
                    else:
                        out[c] = 0
            if count == 0:
                return 0
        return count

    cdef int rec(self, int depth) except? -7:
        """1 found, 0 not in this subtree, -1 budget."""
        cdef int v = -1, u, c, n, best, i, r
        cdef char* out = self.flags_stack + depth * self.nconsts
        if self.use_mrv:
            best = -1
            for u in range(self.nvars):
                if self.assign[u] < 0:
                    n = self.cand_count(u, self.sel_flags)
                    if best < 0 or n < best:
                        best = n
                        v = u
                        memcpy(out, self.sel_flags, self.nconsts)
                        if n == 0:
                            break
            if v < 0:
                return 1
        else:
            for i in range(self.order_len):
                u = self.order[i]
                if self.assign[u] < 0:
                    v = u
                    break
            if v < 0:
                return 1
            self.cand_count(v, out)
        for c in range(self.nconsts):
            if not out[c]:
                continue
            self.nodes += 1
            if self.max_nodes and self.nodes > self.max_nodes:
                self.budget_hit = True
                return -1
            if self.deadline != 0.0 and (self.nodes & _TIME_MASK) == 0:
                if monotonic() > self.deadline:
                    self.budget_hit = True
                    return -1
            self.assign[v] = c
            r = self.rec(depth + 1)
            if r != 0:
                return r  # leave the assignment in place on success
            self.assign[v] = -1
        return 0


def solve_hom(int nvars, int nconsts, list atom_preds, list atom_args,
              list tuples_by_pred, list pin, list var_order, bint use_mrv,
              long max_nodes, double deadline):
    """See the pure twin for the contract."""
    cdef _HomSolver s = _HomSolver()
    s.setup(nvars, nconsts, atom_preds, atom_args, tuples_by_pred, pin, var_order)
    s.use_mrv = use_mrv
    s.max_nodes = max_nodes
    s.deadline = deadline
    s.nodes = 0
    s.budget_hit = False
    if not s.ground_supported():
        return (STATUS_ABSENT, None, 0)
    cdef int r = s.rec(0)
    if r == 1:
        return (STATUS_FOUND, [s.assign[i] for i in range(nvars)], s.nodes)
    if r == -1 or s.budget_hit:
        return (STATUS_BUDGET, None, s.nodes)
    return (STATUS_ABSENT, None, s.nodes)


cdef class _WitnessSearch:
    """Canonical candidate enumeration with image pruning.

    Mirrors the pure twin; see there for the algorithm description."""

    cdef int nvars, n_named, npreds, na, nfree
    cdef int* a_pred
    cdef int* a_off
    cdef int* a_args
    cdef int* a_prev       # pattern: earlier equal position within the atom
    cdef int* assign
    cdef int* order
    cdef int* ground_at_off   # nfree + 2 slots (depth -1 .. nfree-1)
    cdef int* ground_at
    cdef int* p_off            # atoms grouped by predicate
    cdef int* p_atoms
    cdef int* support
    cdef int n_unsupported
    cdef int tau_pred
    cdef tuple tau_key
    cdef long inner_budget, max_nodes
    cdef double deadline
    cdef object memo           # dict or None
    cdef dict J
    cdef int fresh_used
    cdef long outer_nodes, hom_checks, inner_nodes, memo_hits
    # escape-join buffers
    cdef int* b_data           # per-pred tuple buffers, capacity na rows
    cdef int* b_count          # per pred
    cdef int max_arity
    cdef int* j_order
    cdef int* j_tmp
    cdef char* j_seen
    cdef int* inner_assign
    cdef int* trail
    cdef long inner_node_buf

    def __cinit__(self):
        self.a_pred = NULL

    def __dealloc__(self):
        if self.a_pred != NULL:
            free(self.a_pred); free(self.a_off); free(self.a_args)
            free(self.a_prev); free(self.assign); free(self.order)
            free(self.ground_at_off); free(self.ground_at)
            free(self.p_off); free(self.p_atoms); free(self.support)
            free(self.b_data); free(self.b_count)
            free(self.j_order); free(self.j_tmp); free(self.j_seen)
            free(self.inner_assign); free(self.trail)

    cdef int setup(self, int nvars, int n_named, int npreds, list atom_preds,
                   list atom_args, list pin, list order, int tau_pred,
                   tuple tau_args, long inner_budget, long max_nodes,
                   double deadline, bint use_memo) except -1:
        cdef int na = len(atom_preds)
        cdef int total = 0, i, j, pos, t, v, d
        for args in atom_args:
            total += len(args)
        self.nvars = nvars; self.n_named = n_named; self.npreds = npreds
        self.na = na
        self.nfree = len(order)
        self.tau_pred = tau_pred
        self.tau_key = (tau_pred, tau_args)
        self.inner_budget = inner_budget
        self.max_nodes = max_nodes
        self.deadline = deadline
        self.memo = {} if use_memo else None
        self.J = {}
        self.fresh_used = 0
        self.outer_nodes = 0; self.hom_checks = 0
        self.inner_nodes = 0; self.memo_hits = 0
        self.a_pred = <int*>malloc(max(na, 1) * sizeof(int))
        self.a_off = <int*>malloc((na + 1) * sizeof(int))
        self.a_args = <int*>malloc(max(total, 1) * sizeof(int))
        self.a_prev = <int*>malloc(max(total, 1) * sizeof(int))
        self.assign = <int*>malloc(max(nvars, 1) * sizeof(int))
        self.order = <int*>malloc(max(self.nfree, 1) * sizeof(int))
        self.support = <int*>calloc(max(na, 1), sizeof(int))
        self.inner_assign = <int*>malloc(max(nvars, 1) * sizeof(int))
        self.trail = <int*>malloc(max(total, 1) * sizeof(int))
        self.j_order = <int*>malloc(max(na, 1) * sizeof(int))
        self.j_tmp = <int*>malloc(max(na, 1) * sizeof(int))
        self.j_seen = <char*>malloc(max(nvars, 1))
        self.n_unsupported = na
        self.a_off[0] = 0
        pos = 0
        for i in range(na):
            self.a_pred[i] = <int>atom_preds[i]
            for t in atom_args[i]:
                self.a_args[pos] = t
                pos += 1
            self.a_off[i + 1] = pos
        self.max_arity = 0
        for i in range(na):
            if self.a_off[i + 1] - self.a_off[i] > self.max_arity:
                self.max_arity = self.a_off[i + 1] - self.a_off[i]
        if self.max_arity > 64:
            raise ValueError("atom arity above 64 is unsupported")
        for i in range(na):
            for j in range(self.a_off[i], self.a_off[i + 1]):
                self.a_prev[j] = -1
                t = self.a_args[j]
                if t < 0:
                    for pos in range(self.a_off[i], j):
                        if self.a_args[pos] == t:
                            self.a_prev[j] = pos - self.a_off[i]
                            break
        for v in range(nvars):
            self.assign[v] = <int>pin[v]
        for i in range(self.nfree):
            self.order[i] = <int>order[i]
        # atoms grouped by grounding depth
        cdef int* pos_of = <int*>malloc(max(nvars, 1) * sizeof(int))
        if pos_of == NULL:
            raise MemoryError()
        for v in range(nvars):
            pos_of[v] = -1
        for i in range(self.nfree):
            pos_of[self.order[i]] = i
        cdef int* depth_of = <int*>malloc(max(na, 1) * sizeof(int))
        cdef int* counts = <int*>calloc(self.nfree + 1, sizeof(int))
        if depth_of == NULL or counts == NULL:
            free(pos_of)
            raise MemoryError()
        for i in range(na):
            d = -1
            for j in range(self.a_off[i], self.a_off[i + 1]):
                t = self.a_args[j]
                if t < 0:
                    v = -t - 1
                    if self.assign[v] < 0:
                        if pos_of[v] < 0:
                            free(pos_of); free(depth_of); free(counts)
                            raise ValueError("variable neither pinned nor ordered")
                        if pos_of[v] > d:
                            d = pos_of[v]
            depth_of[i] = d
            counts[d + 1] += 1
        self.ground_at_off = <int*>malloc((self.nfree + 2) * sizeof(int))
        self.ground_at = <int*>malloc(max(na, 1) * sizeof(int))
        self.ground_at_off[0] = 0
        for d in range(self.nfree + 1):
            self.ground_at_off[d + 1] = self.ground_at_off[d] + counts[d]
            counts[d] = 0
        for i in range(na):
            d = depth_of[i] + 1
            self.ground_at[self.ground_at_off[d] + counts[d]] = i
            counts[d] += 1
        free(pos_of); free(depth_of); free(counts)
        # atoms grouped by predicate
        cdef int* pcounts = <int*>calloc(max(npreds, 1), sizeof(int))
        if pcounts == NULL:
            raise MemoryError()
        for i in range(na):
            pcounts[self.a_pred[i]] += 1
        self.p_off = <int*>malloc((npreds + 1) * sizeof(int))
        self.p_atoms = <int*>malloc(max(na, 1) * sizeof(int))
        self.p_off[0] = 0
        for i in range(npreds):
            self.p_off[i + 1] = self.p_off[i] + pcounts[i]
            pcounts[i] = 0
        for i in range(na):
            j = self.a_pred[i]
            self.p_atoms[self.p_off[j] + pcounts[j]] = i
            pcounts[j] += 1
        free(pcounts)
        # escape-join tuple buffers: at most na distinct image tuples
        self.b_count = <int*>calloc(max(npreds, 1), sizeof(int))
        self.b_data = <int*>malloc(max(npreds * na * max(self.max_arity, 1), 1) * sizeof(int))
        return 0

    cdef inline bint matches(self, int a, tuple tup):
        cdef int base = self.a_off[a]
        cdef int arity = self.a_off[a + 1] - base
        cdef int j, t
        if len(tup) != arity:
            return False
        for j in range(arity):
            t = self.a_args[base + j]
            if t >= 0:
                if <int>tup[j] != t:
                    return False
            elif self.a_prev[base + j] >= 0:
                if <object>tup[j] != <object>tup[self.a_prev[base + j]]:
                    return False
        return True

    cdef void add_support(self, int pred, tuple tup):
        cdef int i, a
        for i in range(self.p_off[pred], self.p_off[pred + 1]):
            a = self.p_atoms[i]
            if self.matches(a, tup):
                if self.support[a] == 0:
                    self.n_unsupported -= 1
                self.support[a] += 1

    cdef void drop_support(self, int pred, tuple tup):
        cdef int i, a
        for i in range(self.p_off[pred], self.p_off[pred + 1]):
            a = self.p_atoms[i]
            if self.matches(a, tup):
                self.support[a] -= 1
                if self.support[a] == 0:
                    self.n_unsupported += 1

    cdef tuple ground(self, int d):
        """Returns (incr list, changed flag)."""
        cdef list incr = []
        cdef bint changed = False
        cdef int i, a, j, t, base, arity
        cdef int image[64]
        cdef tuple img
        cdef object key, n
        for i in range(self.ground_at_off[d + 1], self.ground_at_off[d + 2]):
            a = self.ground_at[i]
            base = self.a_off[a]
            arity = self.a_off[a + 1] - base
            for j in range(arity):
                t = self.a_args[base + j]
                image[j] = t if t >= 0 else self.assign[-t - 1]
            img = tuple([image[j] for j in range(arity)])
            key = (self.a_pred[a], img)
            if key == self.tau_key:
                continue
            n = self.J.get(key)
            if n is None:
                self.J[key] = 1
                self.add_support(self.a_pred[a], img)
                changed = True
            else:
                self.J[key] = <object>n + 1
            incr.append(key)
        return (incr, changed)

    cdef void unground(self, list incr):
        cdef object key, n
        for key in incr:
            n = self.J[key]
            if <int>n > 1:
                self.J[key] = <object>n - 1
            else:
                del self.J[key]
                self.drop_support(<int>(<tuple>key)[0], <tuple>(<tuple>key)[1])

    cdef tuple canonical_key(self):
        relabel = {}
        out = []
        cdef int c
        for pred, args in sorted(self.J.keys()):
            row = [pred]
            for cobj in args:
                c = <int>cobj
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

    cdef int escape_exists(self, long max_nodes):
        """1 escape exists, 0 definitely none, -1 inner budget exhausted."""
        cdef int i, j, a, k, pos, keep, best
        cdef int na = self.na
        cdef int* b_count = self.b_count
        for i in range(self.npreds):
            b_count[i] = 0
        cdef int pred
        cdef tuple args
        for key in self.J.keys():
            pred = <int>(<tuple>key)[0]
            args = <tuple>(<tuple>key)[1]
            k = b_count[pred]
            pos = (pred * na + k) * self.max_arity
            for j in range(len(args)):
                self.b_data[pos + j] = <int>args[j]
            b_count[pred] = k + 1
        # join order: smallest bucket first, prefer atoms touching bound vars
        cdef int* tmp = self.j_tmp
        cdef int* order = self.j_order
        for i in range(na):
            tmp[i] = i
        # insertion sort by (bucket size, atom id)
        cdef int key_a, key_b
        for i in range(1, na):
            a = tmp[i]
            key_a = b_count[self.a_pred[a]]
            j = i - 1
            while j >= 0 and (b_count[self.a_pred[tmp[j]]] > key_a or
                              (b_count[self.a_pred[tmp[j]]] == key_a and tmp[j] > a)):
                tmp[j + 1] = tmp[j]
                j -= 1
            tmp[j + 1] = a
        memset(self.j_seen, 0, self.nvars)
        cdef int remaining = na
        cdef int t
        cdef bint touches
        for k in range(na):
            keep = -1
            for i in range(remaining):
                a = tmp[i]
                touches = False
                for j in range(self.a_off[a], self.a_off[a + 1]):
                    t = self.a_args[j]
                    if t < 0 and self.j_seen[-t - 1]:
                        touches = True
                        break
                if touches:
                    keep = i
                    break
            if keep < 0:
                keep = 0
            a = tmp[keep]
            order[k] = a
            for i in range(keep, remaining - 1):
                tmp[i] = tmp[i + 1]
            remaining -= 1
            for j in range(self.a_off[a], self.a_off[a + 1]):
                t = self.a_args[j]
                if t < 0:
                    self.j_seen[-t - 1] = 1
        for i in range(self.nvars):
            self.inner_assign[i] = -1
        self.inner_node_buf = 0
        cdef int res = self.join_rec(0, max_nodes)
        self.hom_checks += 1
        self.inner_nodes += self.inner_node_buf
        return res

    cdef int join_rec(self, int i, long max_nodes):
        """1 found, 0 none in subtree, -1 budget."""
        if i == self.na:
            return 1
        cdef int a = self.j_order[i]
        cdef int pred = self.a_pred[a]
        cdef int base = self.a_off[a]
        cdef int arity = self.a_off[a + 1] - base
        cdef int k, j, t, v, b, nbound, r
        cdef int* tup
        cdef int* trail = self.trail + base
        cdef bint ok
        for k in range(self.b_count[pred]):
            tup = self.b_data + (pred * self.na + k) * self.max_arity
            self.inner_node_buf += 1
            if max_nodes and self.inner_node_buf > max_nodes:
                return -1
            nbound = 0
            ok = True
            for j in range(arity):
                t = self.a_args[base + j]
                if t >= 0:
                    if tup[j] != t:
                        ok = False
                        break
                else:
                    v = -t - 1
                    b = self.inner_assign[v]
                    if b < 0:
                        self.inner_assign[v] = tup[j]
                        trail[nbound] = v
                        nbound += 1
                    elif b != tup[j]:
                        ok = False
                        break
            if ok:
                r = self.join_rec(i + 1, max_nodes)
                if r == 1:
                    return 1
                if r == -1:
                    for j in range(nbound):
                        self.inner_assign[trail[j]] = -1
                    return -1
            for j in range(nbound):
                self.inner_assign[trail[j]] = -1
        return 0

    cdef int check(self, bint exact):
        """1 escape exists, 0 definitely none, -1 unknown (budget)."""
        if self.n_unsupported:
            return 0
        cdef object ck = None
        cdef object hit
        if self.memo is not None:
            ck = self.canonical_key()
            hit = (<dict>self.memo).get(ck)
            if hit is not None:
                self.memo_hits += 1
                return 1 if hit else 0
        cdef int res = self.escape_exists(0 if exact else self.inner_budget)
        if res >= 0 and self.memo is not None:
            (<dict>self.memo)[ck] = bool(res)
        return res

    cdef int rec(self, int d, bint unknown) except? -7:
        """0 witness (assignment left in place), 1 exhausted subtree, 2 budget."""
        cdef int v = self.order[d]
        cdef bint last = d == self.nfree - 1
        cdef int n_named = self.n_named
        cdef int nvalues = n_named + self.fresh_used + 1
        cdef int vi, value, res, r
        cdef bint new_fresh, child_unknown
        cdef list incr
        cdef bint changed
        for vi in range(nvalues):
            # existing fresh ascending, one new fresh, then named ascending
            if vi <= self.fresh_used:
                value = n_named + vi
            else:
                value = vi - self.fresh_used - 1
            self.outer_nodes += 1
            if self.max_nodes and self.outer_nodes > self.max_nodes:
                return 2
            if self.deadline != 0.0 and (self.outer_nodes & _TIME_MASK) == 0:
                if monotonic() > self.deadline:
                    return 2
            new_fresh = value == n_named + self.fresh_used
            self.assign[v] = value
            if new_fresh:
                self.fresh_used += 1
            grounded = self.ground(d)
            incr = <list>grounded[0]
            changed = <bint>grounded[1]
            if last:
                if changed or unknown:
                    res = self.check(True)
                else:
                    res = 0  # inherited: image unchanged since refuted
                if res == 0:
                    return 0
            else:
                if changed:
                    res = self.check(False)
                else:
                    res = -1 if unknown else 0
                if res != 1:
                    r = self.rec(d + 1, res == -1)
                    if r != 1:
                        return r
            self.unground(incr)
            self.assign[v] = -1
            if new_fresh:
                self.fresh_used -= 1
        return 1

    cdef tuple stats(self):
        return (self.outer_nodes, self.hom_checks, self.inner_nodes, self.memo_hits)


def search_witness(int nvars, int nconsts_named, int npreds, list atom_preds,
                   list atom_args, list pin, list order, int tau_pred,
                   tuple tau_args, long inner_budget, long max_nodes,
                   double deadline, bint use_memo):
    """See the pure twin for the contract."""
    cdef _WitnessSearch s = _WitnessSearch()
    s.setup(nvars, nconsts_named, npreds, atom_preds, atom_args, pin, order,
            tau_pred, tau_args, inner_budget, max_nodes, deadline, use_memo)
    grounded = s.ground(-1)
    cdef int res, r
    if s.nfree == 0:
        res = s.check(True)
        if res == 0:
            return (STATUS_WITNESS, [s.assign[i] for i in range(nvars)], s.stats())
        return (STATUS_EXHAUSTED, None, s.stats())
    res = s.check(False)
    if res == 1:
        return (STATUS_EXHAUSTED, None, s.stats())
    r = s.rec(0, res == -1)
    if r == 0:
        return (STATUS_WITNESS, [s.assign[i] for i in range(nvars)], s.stats())
    if r == 2:
        return (STATUS_BUDGET, None, s.stats())
    return (STATUS_EXHAUSTED, None, s.stats())
