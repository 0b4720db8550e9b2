"""Exact rational presolving.

In rational mode every tolerance is zero and all arithmetic uses exact
fractions.  The singleton row 3x >= 13 implies the bound x >= 13/3, and
because nothing blocks x from below afterwards, the dual fixing lands x on
exactly 13/3; the objective offset stays an exact fraction end to end.
Float mode performs the same reductions, just with 4.333... instead.
"""
from fractions import Fraction

from premip import NumericContext, Problem, presolve
from premip.model import FixEntry


def build(ctx):
    p = Problem(ctx)
    x = p.add_col(0, 10, obj=1, integral=False, name="x")
    y = p.add_col(0, 1, obj=-2, integral=True, name="y")
    z = p.add_col(0, 1, obj=-1, integral=True, name="z")
    p.add_row({x: 3}, lhs=13, name="floor")          # 3x >= 13
    p.add_row({y: 7, z: 8}, rhs=13, name="knap")     # 7y + 8z <= 13
    return p


rational = presolve(build(NumericContext.rational()))
fixes = {e.col: e.value for e in rational.record.entries
         if isinstance(e, FixEntry)}
print("verdict:", rational.verdict.value)
print("x fixed at:", fixes[0], "   exactly 13/3:", fixes[0] == Fraction(13, 3))
print("objective offset:", rational.problem.obj_offset,
      "   exactly 13/3:", rational.problem.obj_offset == Fraction(13, 3))
for i in rational.problem.active_rows():
    names = [(rational.problem.col_names[j], v)
             for j, v in rational.problem.row_entries(i)]
    print("surviving row:", names, "<=", rational.problem.row_rhs[i])

floating = presolve(build(NumericContext.float64()))
float_fixes = {e.col: e.value for e in floating.record.entries
               if isinstance(e, FixEntry)}
print("float mode fixes x at:", float_fixes[0])
