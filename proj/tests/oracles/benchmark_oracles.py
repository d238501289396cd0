"""Independent high-precision evaluations used to freeze expected values in the C++ tests."""
import mpmath as mp

mp.mp.dps = 40


def oscillator(mp_, ms, kp, ks, zp, zs, S0, Fs, peak=3):
    wp = mp.sqrt(kp / mp_)
    ws = mp.sqrt(ks / ms)
    gamma = ms / mp_
    wa = (wp + ws) / 2
    za = (zp + zs) / 2
    theta = (wp - ws) / wa
    ex2 = (mp.pi * S0 / (4 * zs * ws**3)
           * (za * zs) / (zp * zs * (4 * za**2 + theta**2) + gamma * za**2)
           * ((zp * wp**3 + zs * ws**3) * wp) / (4 * za * wa**4))
    return Fs - peak * ks * mp.sqrt(ex2)


def truss_f(alpha, a0):
    return mp.sin(alpha) - mp.tan(alpha) * mp.cos(a0)


def truss(P, E, A):
    l0 = mp.mpf(5)
    a0 = mp.radians(10)
    EA = E * A * 100
    astar = mp.acos(mp.cos(a0) ** (mp.mpf(1) / 3))
    pcr = 2 * EA * truss_f(astar, a0)
    target = P / (2 * EA)
    if P <= pcr:
        alpha = mp.findroot(lambda a: truss_f(a, a0) - target, (astar, a0), solver='bisect')
    else:
        alpha = mp.findroot(lambda a: truss_f(a, a0) - target, (-mp.pi / 2 + mp.mpf('1e-30'), -a0), solver='bisect')
    return l0 * mp.cos(a0) * (mp.tan(a0) - mp.tan(alpha)), pcr


def zhou_log(x, M):
    s1 = sum((mp.e ** (-(i)) * 10 * (x[i] - mp.mpf(1) / 3)) ** 2 for i in range(M))
    s2 = sum((mp.e ** (-(i)) * 10 * (x[i] - mp.mpf(2) / 3)) ** 2 for i in range(M))
    val = mp.mpf(10) ** M / 2 * (2 * mp.pi) ** (-mp.mpf(M) / 2) * (mp.exp(-s1 / 2) + mp.exp(-s2 / 2))
    return mp.log(val)


if __name__ == "__main__":
    print("oscillator(means) =", mp.nstr(oscillator(mp.mpf('1.5'), mp.mpf('0.01'), mp.mpf(1), mp.mpf('0.01'),
                                                    mp.mpf('0.05'), mp.mpf('0.02'), mp.mpf(100), mp.mpf(15)), 20))
    w, pcr = truss(mp.mpf(500), mp.mpf(210), mp.mpf(10))
    print("truss P_cr(means) =", mp.nstr(pcr, 20))
    print("truss w(P=500) =", mp.nstr(w, 20))
    w, _ = truss(mp.mpf(300), mp.mpf(210), mp.mpf(10))
    print("truss w(P=300) =", mp.nstr(w, 20))
    print("zhou M=1 x=1/3:", mp.nstr(mp.exp(zhou_log([mp.mpf(1) / 3], 1)), 20))
    print("zhou log M=100 x=1/3:", mp.nstr(zhou_log([mp.mpf(1) / 3] * 100, 100), 20))
    print("zhou log M=100 x=0.5:", mp.nstr(zhou_log([mp.mpf('0.5')] * 100, 100), 20))
    print("model_1d(0.65) =", mp.nstr(-mp.mpf('0.65') + mp.mpf('0.1') * mp.sin(mp.mpf('19.5')) + 1, 20))
    s2 = mp.log(1 + mp.mpf('0.01'))
    print("lognormal median(1.5,0.1) =", mp.nstr(mp.exp(mp.log(mp.mpf('1.5')) - s2 / 2), 20))
    beta = 430 * mp.mpf('0.2') * mp.sqrt(6) / mp.pi
    mu = 430 - mp.euler * beta
    print("gumbel median(430,0.2) =", mp.nstr(mu - beta * mp.log(mp.log(2)), 20))
    print("Phi(1) =", mp.nstr(mp.ncdf(1), 20))
