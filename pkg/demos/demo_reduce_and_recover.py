"""Reduce a tiny knapsack and map a solution back to the original space.

The instance is

    min -2 x1 - x2
        7 x1 + 8 x2 <= 13
        x in {0, 1}^2

Coefficient tightening strengthens the row to x1 + x2 <= 1, whose LP
relaxation is already integral, so a solver gets the answer at the root.
"""
from premip import NumericContext, Problem, postsolve_primal, presolve

ctx = NumericContext.float64()
problem = Problem(ctx, name="knapsack")
x1 = problem.add_col(0, 1, obj=-2, integral=True, name="x1")
x2 = problem.add_col(0, 1, obj=-1, integral=True, name="x2")
problem.add_row({x1: 7, x2: 8}, rhs=13, name="capacity")

print("original row:", problem.row_entries(0), "<=", problem.row_rhs[0])

result = presolve(problem)
reduced = result.problem
print("verdict:", result.verdict.value)
for i in reduced.active_rows():
    print("reduced row:", reduced.row_entries(i), "<=", reduced.row_rhs[i])

# pretend an external solver produced the reduced-space optimum (1, 0)
solution = postsolve_primal(result.record, {x1: 1, x2: 0})
print("original-space solution:", solution.values)
print("objective:", solution.objective)

# the recovered point satisfies the original constraint
assert 7 * solution.values[0] + 8 * solution.values[1] <= 13
assert solution.objective == -2
