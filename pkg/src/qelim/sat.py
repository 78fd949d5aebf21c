"""Conflict-driven clause-learning SAT solver.

Deliberately plain: two-watched-literal propagation, first-UIP learning,
lowest-index decision variable with phase saving, no restarts and no clause
erasure, so runs are bit-for-bit reproducible.  Clauses may be added between
``solve`` calls and learned clauses are kept, which is what the lazy theory
loop and the blocking-clause architecture rely on.
"""

from __future__ import annotations

from . import limits
from .limits import Deadline

Lit = int  # nonzero integer, sign is polarity, abs value is the variable


class CdclSolver:
    def __init__(self) -> None:
        self._num_vars = 0
        self._clauses: list[list[Lit]] = []
        self._watches: dict[Lit, list[int]] = {}
        self._assign: list[int] = [0]  # índex by var; 0 unassigned, +1 true, -1 false
        self._level: list[int] = [0]
        self._reason: list[int | None] = [None]
        self._polarity: list[bool] = [False]
        self._trail: list[Lit] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._ok = True

    # -- construction -------------------------------------------------------

    def new_var(self) -> int:
        self._num_vars += 1
        v = self._num_vars
        self._assign.append(0)
        self._level.append(0)
        self._reason.append(None)
        self._polarity.append(False)
        self._watches.setdefault(v, [])
        self._watches.setdefault(-v, [])
        return v

    def num_vars(self) -> int:
        return self._num_vars

    def add_clause(self, lits: list[Lit]) -> None:
        """Add a clause; must only be called between ``solve`` calls."""
        self._backtrack(0)
        seen: set[Lit] = set()
        out: list[Lit] = []
        for lit in lits:
            if -lit in seen:
                return  # tautology
            if lit in seen:
                continue
            value = self._lit_value(lit)
            if value > 0:
                return  # satisfied at the root level
            if value < 0:
                continue  # permanently false literal
            seen.add(lit)
            out.append(lit)
        if not out:
            self._ok = False
            return
        if len(out) == 1:
            self._enqueue(out[0], None)
            return
        self._attach(out)

    def _attach(self, clause: list[Lit]) -> int:
        ci = len(self._clauses)
        self._clauses.append(clause)
        self._watches[clause[0]].append(ci)
        self._watches[clause[1]].append(ci)
        return ci

    # -- assignment ---------------------------------------------------------

    def _lit_value(self, lit: Lit) -> int:
        v = self._assign[abs(lit)]
        return v if lit > 0 else -v

    def _decision_level(self) -> int:
        return len(self._trail_lim)

    def _enqueue(self, lit: Lit, reason: int | None) -> None:
        v = abs(lit)
        self._assign[v] = 1 if lit > 0 else -1
        self._level[v] = self._decision_level()
        self._reason[v] = reason
        self._trail.append(lit)

    def _backtrack(self, level: int) -> None:
        if self._decision_level() <= level:
            return
        limit = self._trail_lim[level]
        for lit in reversed(self._trail[limit:]):
            v = abs(lit)
            self._polarity[v] = lit > 0
            self._assign[v] = 0
            self._reason[v] = None
        del self._trail[limit:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)

    # -- search -------------------------------------------------------------

    def _propagate(self) -> int | None:
        while self._qhead < len(self._trail):
            p = self._trail[self._qhead]
            self._qhead += 1
            falsified = -p
            watchers = self._watches[falsified]
            i = 0
            while i < len(watchers):
                ci = watchers[i]
                clause = self._clauses[ci]
                if clause[0] == falsified:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._lit_value(first) > 0:
                    i += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self._lit_value(clause[k]) >= 0:
                        clause[1], clause[k] = clause[k], clause[1]
                        self._watches[clause[1]].append(ci)
                        watchers[i] = watchers[-1]
                        watchers.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self._lit_value(first) < 0:
                    return ci
                self._enqueue(first, ci)
                i += 1
        return None

    def _analyze(self, conflict: int) -> tuple[list[Lit], int]:
        current = self._decision_level()
        learnt: list[Lit] = []
        seen = [False] * (self._num_vars + 1)
        counter = 0
        p: Lit | None = None
        clause = self._clauses[conflict]
        idx = len(self._trail) - 1
        while True:
            for q in clause[1:] if p is not None else clause:
                v = abs(q)
                if not seen[v] and self._level[v] > 0:
                    seen[v] = True
                    if self._level[v] == current:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self._trail[idx])]:
                idx -= 1
            p = self._trail[idx]
            idx -= 1
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
            clause = self._clauses[self._reason[abs(p)]]
        learnt.insert(0, -p)
        if len(learnt) == 1:
            return learnt, 0
        best = 1
        for k in range(2, len(learnt)):
            if self._level[abs(learnt[k])] > self._level[abs(learnt[best])]:
                best = k
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self._level[abs(learnt[1])]

    def solve(self, assumptions: tuple[Lit, ...] = (), deadline: Deadline | None = None) -> bool:
        """Search for a full assignment extending ``assumptions``.

        Returns False either when the clause set is unsatisfiable or when it
        is unsatisfiable under the given assumptions.
        """
        if not self._ok:
            return False
        self._backtrack(0)
        self._qhead = 0
        ticks = 0
        hint = 1
        while True:
            ticks += 1
            if ticks % 256 == 0:
                limits.check(deadline)
            conflict = self._propagate()
            if conflict is not None:
                if self._decision_level() == 0:
                    self._ok = False
                    return False
                learnt, back_level = self._analyze(conflict)
                self._backtrack(back_level)
                hint = 1
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    ci = self._attach(learnt)
                    self._enqueue(learnt[0], ci)
                continue
            level = self._decision_level()
            if level < len(assumptions):
                lit = assumptions[level]
                value = self._lit_value(lit)
                self._trail_lim.append(len(self._trail))
                if value > 0:
                    continue
                if value < 0:
                    self._backtrack(0)
                    return False
                self._enqueue(lit, None)
                continue
            while hint <= self._num_vars and self._assign[hint] != 0:
                hint += 1
            if hint > self._num_vars:
                return True
            lit = hint if self._polarity[hint] else -hint
            self._trail_lim.append(len(self._trail))
            self._enqueue(lit, None)

    def model_value(self, var: int) -> bool:
        return self._assign[var] > 0

    def value_of(self, lit: Lit) -> int:
        """Current value of a literal: +1 true, -1 false, 0 unassigned."""
        return self._lit_value(lit)
