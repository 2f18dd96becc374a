"""Reference values frozen into the Rust tests. Run with python3; needs mpmath and scipy."""
import mpmath as mp
import numpy as np
from scipy.linalg import expm

mp.mp.dps = 30

# two-point rho in {r, s} with p = 1/2: E rho^k = 1
print("s(r=2,k=0.5) =", mp.nstr((2 - mp.sqrt(2)) ** 2, 17))
print("s(r=2,k=0.7) =", mp.nstr((2 - mp.mpf(2) ** mp.mpf("0.7")) ** (1 / mp.mpf("0.7")), 17))
print("kappa(3,0.2) =", mp.nstr(mp.findroot(lambda k: 3**k + mp.mpf("0.2") ** k - 2, 0.5), 17))

# truncated Levy Laplace transform over unit length
def trunc(lam, k, eps, th):
    f = lambda y: (1 - mp.exp(-th * y)) * y ** (-k - 1)
    return mp.exp(-lam * mp.quad(f, [eps, 1, 10, mp.inf]))

for k in (0.5, 0.7):
    for th in (0.5, 1, 2):
        print(f"trunc(1,{k},0.001,{th}) =", mp.nstr(trunc(1, k, mp.mpf("0.001"), th), 17))
print("exp(-2 sqrt(pi)) =", mp.nstr(mp.exp(-2 * mp.sqrt(mp.pi)), 17))

# three-atom lower-triangular system dv_k/dt = (v_{k-1} - v_k)/y_k
y = np.array([0.5, 1.0, 2.0])
u0 = np.array([1.0, 0.5, 0.25])
A = np.diag(-1 / y) + np.diag(1 / y[1:], -1)
for t in (0.25, 1.0, 3.0):
    print(f"v(t={t}) =", [f"{v:.15e}" for v in expm(A * t) @ u0])

# hand ladder: 60 sites of omega=3/4 to the left, then rho = 2, 1/2, 1/4, then omega=3/4
W = mp.mpf(0)
for _ in range(60):
    W = (W + 1) / 3
w = []
for r in (2, mp.mpf(0.5), mp.mpf(0.25)):
    W = r * (1 + W)
    w.append(W)
print("beta_0 =", mp.nstr(3 + 2 * sum(w), 17))
R = mp.mpf(0.5)
Rs = []
for r in (mp.mpf(0.25), mp.mpf(0.5), 2):
    R = r * (1 + R)
    Rs.append(R)
R2, R1, R0 = Rs
print("g(1) =", mp.nstr(1 + R1 + R2, 17), " g(0) =", mp.nstr(1 + R0 + R1, 17))
print("ks c(0.01) =", mp.nstr(mp.sqrt(-mp.log(0.005) / 2), 17))

# stiff four-atom system (depth ratio 1e-9)
mp.mp.dps = 60
ys = [mp.mpf("1e-9"), mp.mpf("0.5"), mp.mpf("1e-8"), mp.mpf(2)]
us = [1, mp.mpf("0.5"), mp.mpf("0.25"), mp.mpf("0.75")]
A = mp.matrix(4, 4)
for k in range(4):
    A[k, k] = -1 / ys[k]
    if k:
        A[k, k - 1] = 1 / ys[k]
for t in (mp.mpf("0.5"), mp.mpf(1)):
    v = mp.expm(A * t) * mp.matrix(us)
    print(f"stiff v(t={t}) =", [mp.nstr(v[i], 17) for i in range(4)])
