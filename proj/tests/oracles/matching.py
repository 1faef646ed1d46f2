# Matched interior/exterior coefficients for the piecewise model at r0 = 10:
# sigma = alpha^2 inside, 1/(4t^2) outside; zeta1 = cos(alpha t), zeta2 = sin(alpha t)/alpha inside.
# Exterior basis y1 = t^(1/2), y2 = t^(1/2) log t. C^1 matching at t = r0.
import mpmath as mp

mp.mp.dps = 30
r0 = mp.mpf(10)
x = mp.findroot(lambda x: x * mp.tan(x) + mp.mpf(1) / 2, 2.97)
alpha = x / r0
y = lambda t: (mp.sqrt(t), mp.sqrt(t) * mp.log(t))
dy = lambda t: (1 / (2 * mp.sqrt(t)), (mp.log(t) + 2) / (2 * mp.sqrt(t)))


def match(v, dv):
    A = mp.matrix([[y(r0)[0], y(r0)[1]], [dy(r0)[0], dy(r0)[1]]])
    return mp.lu_solve(A, mp.matrix([v, dv]))


c1 = match(mp.cos(alpha * r0), -alpha * mp.sin(alpha * r0))
c2 = match(mp.sin(alpha * r0) / alpha, mp.cos(alpha * r0))
print("x", mp.nstr(x, 20), "alpha", mp.nstr(alpha, 20), "alpha^2", mp.nstr(alpha**2, 20))
print("c11", mp.nstr(c1[0], 20), "c12", mp.nstr(c1[1], 5))
print("c21", mp.nstr(c2[0], 20), "c22", mp.nstr(c2[1], 20))
