# Reference for the synthetic phase integral: |Fv| = a constant, zeta2 = tau^(1/2) log tau,
# F_L with mu_L = 1, R = e, n = 1, integrated from 3 to 3000.
import mpmath as mp

mp.mp.dps = 30
a = mp.mpf("0.5")


def integrand(t):
    b = a / mp.sqrt(mp.sqrt(t) * mp.log(t))
    return b ** 4 * mp.log(mp.e + 1 / b)


print(mp.nstr(mp.quad(integrand, [3, 30, 300, 3000]), 20))
