"""Reference values for tests/oracles.rs, computed at 40 digits with mpmath.

The discrete problems are assembled here from the difference equations
directly, without the library's matrix layout:

    -(u[i-1] - 2u[i] + u[i+1])/h^2 + q[i] u[i] = z u[i]   at interior points,
    u = phi on the boundary,  D phi = (phi_b - u_adjacent)/h_b.
"""
import mpmath as mp

mp.mp.dps = 40


def dtn_1d(n, length, q, z):
    h = mp.mpf(length) / (n + 1)
    cols = []
    for side in range(2):
        phi = [mp.mpf(1) if s == side else mp.mpf(0) for s in range(2)]
        a = mp.matrix(n, n)
        b = mp.matrix(n, 1)
        for i in range(n):
            a[i, i] = 2 / h**2 + q[i] - z
            if i > 0:
                a[i, i - 1] = -1 / h**2
            if i < n - 1:
                a[i, i + 1] = -1 / h**2
        b[0] += phi[0] / h**2
        b[n - 1] += phi[1] / h**2
        u = mp.lu_solve(a, b)
        cols.append([(phi[0] - u[0]) / h, (phi[1] - u[n - 1]) / h])
    return [[cols[c][r] for c in range(2)] for r in range(2)]


def dtn_2d(nx, ny, lx, ly, q, z):
    hx = mp.mpf(lx) / (nx + 1)
    hy = mp.mpf(ly) / (ny + 1)
    idx = lambda i, j: i + nx * j
    # boundary nodes: left, right, bottom, top; (grid coords, adjacent interior, spacing)
    bnd = []
    bnd += [((0, j + 1), idx(0, j), hx) for j in range(ny)]
    bnd += [((nx + 1, j + 1), idx(nx - 1, j), hx) for j in range(ny)]
    bnd += [((i + 1, 0), idx(i, 0), hy) for i in range(nx)]
    bnd += [((i + 1, ny + 1), idx(i, ny - 1), hy) for i in range(nx)]
    pos = {p: k for k, (p, _, _) in enumerate(bnd)}
    ni, nb = nx * ny, len(bnd)
    d = mp.matrix(nb, nb)
    for c in range(nb):
        a = mp.matrix(ni, ni)
        b = mp.matrix(ni, 1)
        for j in range(ny):
            for i in range(nx):
                r = idx(i, j)
                a[r, r] = 2 / hx**2 + 2 / hy**2 + q[r] - z
                for (di, dj, hh) in [(-1, 0, hx), (1, 0, hx), (0, -1, hy), (0, 1, hy)]:
                    gi, gj = i + 1 + di, j + 1 + dj
                    if 1 <= gi <= nx and 1 <= gj <= ny:
                        a[r, idx(gi - 1, gj - 1)] = -1 / hh**2
                    elif pos[(gi, gj)] == c:
                        b[r] += 1 / hh**2
        u = mp.lu_solve(a, b)
        for k, (_, adj, hb) in enumerate(bnd):
            d[k, c] = ((1 if k == c else 0) - u[adj]) / hb
    return d


def weyl(a, v, z):
    n = a.rows
    x = mp.inverse(a - z * mp.eye(n)) * v
    m = (v.H * x) * (z * z + 1)
    return m + z * mp.eye(v.cols)


def show(name, m):
    print(name)
    for r in range(m.rows if hasattr(m, "rows") else len(m)):
        row = m[r] if isinstance(m, list) else [m[r, c] for c in range(m.cols)]
        print("   ", ", ".join("c(%s, %s)" % (mp.nstr(x.real, 17), mp.nstr(x.imag, 17)) for x in map(mp.mpc, row)))


z = mp.mpc(2, 1)
q1 = [mp.mpc(1, 2), mp.mpc(-0.5, 0), mp.mpc(0, 3)]
show("dtn_1d n=3 L=1 z=2+i", dtn_1d(3, 1, q1, z))

z2 = mp.mpc(5, -2)
q2 = [mp.mpc(1, 0.5), mp.mpc(-2, 1)]
show("dtn_2d nx=2 ny=1 lx=1 ly=1 z=5-2i", dtn_2d(2, 1, 1, 1, q2, z2))

s = 1 / mp.sqrt(2)
a = mp.matrix([[1, mp.mpc(0, 1), 0], [mp.mpc(0, -1), 2, 0.5], [0, 0.5, -1]])
v = mp.matrix([[s, 0], [s, 0], [0, 1]])
show("weyl z=0.5+0.3i", weyl(a, v, mp.mpc(0.5, 0.3)))
