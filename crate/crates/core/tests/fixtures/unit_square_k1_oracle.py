"""Dense symbolic evaluation of the k=1 local VEM bilinear form on the unit square.

Independent of the Rust implementation: works with plain monomials x, y,
symbolic hat traces and exact boundary integrals. Writes
unit_square_k1_stiffness.json next to this script.

    python3 unit_square_k1_oracle.py
"""
import json
import os

import sympy as sp

x, y, s = sp.symbols("x y s", real=True)

verts = [(0, 0), (1, 0), (1, 1), (0, 1)]
n = len(verts)
h_d = sp.sqrt(2)

# edges as (start, end, outward normal)
edges = []
for i in range(n):
    a, b = verts[i], verts[(i + 1) % n]
    dx, dy = b[0] - a[0], b[1] - a[1]
    length = sp.sqrt(dx * dx + dy * dy)
    edges.append((i, (i + 1) % n, a, b, (sp.Rational(dy) / length, -sp.Rational(dx) / length), length))


def hat_trace(i, edge):
    """Trace of the i-th vertex hat on an edge, as a function of s in [0, 1]."""
    ia, ib = edge[0], edge[1]
    return (1 - s if ia == i else 0) + (s if ib == i else 0)


def edge_point(edge):
    a, b = edge[2], edge[3]
    return (a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]))


def boundary_integral(fn_of_edge):
    total = 0
    for e in edges:
        total += sp.integrate(fn_of_edge(e), (s, 0, 1)) * e[5]
    return sp.simplify(total)


# P1 unknown: p = c0 + c1 x + c2 y
c = sp.symbols("c0:3")
perimeter = boundary_integral(lambda e: 1)


def projector(i):
    p = c[0] + c[1] * x + c[2] * y
    eqs = []
    for q in (x, y):
        lhs = sp.integrate(sp.integrate(sp.diff(p, x) * sp.diff(q, x) + sp.diff(p, y) * sp.diff(q, y), (x, 0, 1)), (y, 0, 1))
        rhs = boundary_integral(
            lambda e: hat_trace(i, e) * (e[4][0] * sp.diff(q, x) + e[4][1] * sp.diff(q, y))
        )
        eqs.append(sp.Eq(lhs, rhs))
    def p_on(e):
        px, py = edge_point(e)
        return p.subs({x: px, y: py})
    eqs.append(sp.Eq(boundary_integral(p_on), boundary_integral(lambda e: hat_trace(i, e))))
    sol = sp.solve(eqs, c)
    return sp.expand(p.subs(sol))


proj = [projector(i) for i in range(n)]


def residual_trace(i, e):
    px, py = edge_point(e)
    return hat_trace(i, e) - proj[i].subs({x: px, y: py})


consistency = sp.zeros(n, n)
s1 = sp.zeros(n, n)
s2 = sp.zeros(n, n)
s2t = sp.zeros(n, n)
for i in range(n):
    for j in range(n):
        gi = (sp.diff(proj[i], x), sp.diff(proj[i], y))
        gj = (sp.diff(proj[j], x), sp.diff(proj[j], y))
        consistency[i, j] = sp.integrate(sp.integrate(gi[0] * gj[0] + gi[1] * gj[1], (x, 0, 1)), (y, 0, 1))
        # node sum over the four vertices
        acc = 0
        for v in range(n):
            vx, vy = verts[v]
            ri = (1 if v == i else 0) - proj[i].subs({x: vx, y: vy})
            rj = (1 if v == j else 0) - proj[j].subs({x: vx, y: vy})
            acc += ri * rj
        s1[i, j] = sp.simplify(acc)
        # tangential derivatives: d/ds_arc = (1/len) d/ds
        acc2 = 0
        acc2t = 0
        for e in edges:
            di = sp.diff(residual_trace(i, e), s) / e[5]
            dj = sp.diff(residual_trace(j, e), s) / e[5]
            integral = sp.integrate(di * dj, (s, 0, 1)) * e[5]
            acc2 += h_d * integral
            acc2t += e[5] * integral
        s2[i, j] = sp.simplify(acc2)
        s2t[i, j] = sp.simplify(acc2t)


def to_list(m):
    return [[float(sp.N(m[i, j], 30)) for j in range(n)] for i in range(n)]


out = {
    "vertices": [list(v) for v in verts],
    "k": 1,
    "projections": [str(p) for p in proj],
    "s1": to_list(consistency + s1),
    "s2": to_list(consistency + s2),
    "s2tilde": to_list(consistency + s2t),
}
path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "unit_square_k1_stiffness.json")
with open(path, "w") as fh:
    json.dump(out, fh, indent=2)
    fh.write("\n")
print(json.dumps(out, indent=2))
