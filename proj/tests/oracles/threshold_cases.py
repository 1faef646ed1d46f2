# Frozen reference values for the threshold classifier tests (mpmath, 40 digits).
# Ladder nodes: u_k = u0 * (u1/u0)^(k/64), u0 = log(e) = 1, u1 = log(1e300).
import mpmath as mp

mp.mp.dps = 40
u0 = mp.mpf(1)
u1 = mp.log(mp.mpf(10) ** 300)


def node(k):
    return u0 * (u1 / u0) ** (mp.mpf(k) / 64)


def g_c(u):  # s^-0.9 (log s)^-1.8 ds, in u = log s
    return mp.exp(mp.mpf("0.1") * u) * u ** mp.mpf("-1.8")


def g_d(u):  # F_S(a), a = s^-1/4 (log s)^-1/2, mu_S = 1, theta = 1/2, R = e
    inv_a = mp.exp(u / 4) * mp.sqrt(u)
    return u ** -2 * mp.sqrt(mp.log(mp.e + inv_a))


for k in (8, 16, 24, 32):
    print("c", k, mp.nstr(node(k), 20), mp.nstr(mp.quad(g_c, [u0, node(k)]), 20))
for k in (16, 32, 48, 64):
    print("d", k, mp.nstr(node(k), 20), mp.nstr(mp.quad(g_d, mp.linspace(u0, node(k), 20)), 20))
print("d inf", mp.nstr(mp.quad(g_d, [u0, 10, 100, 1000, mp.inf]), 20))
