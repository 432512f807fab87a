"""Pure-Python integration kernel.

Mirrors ``_ckernel.pyx`` line for line so both backends produce the same
step sequence.  Used when the compiled extension is unavailable or when
``OPENSTIRAP_PURE_PYTHON`` is set.
"""
import math

import numpy as np

ADIABATIC_3 = 0
BARE_3 = 1
MASTER_4 = 2

EFFECTIVE = 0
PHENOMENOLOGICAL = 1

COUNTERINTUITIVE = 0
INTUITIVE = 1

OK = 0
UNDERFLOW = 1
TOO_MANY_STEPS = 2

_QUARTER_PI = 0.25 * math.pi
_SQRT_HALF = math.sqrt(0.5)

# Dormand-Prince 5(4) tableau, FSAL.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_E = (-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40)
# Continuous extension, y(t + s h) = y + h sum_j K_j sum_m P[j][m] s^(m+1).
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)

_SAFETY = 0.9
_ALPHA = 0.17
_BETA = 0.04
_MIN_FACTOR = 0.2


def _frame(t, alpha_t, delta_t, seq):
    """Return (Op, Os, O0, sin th, cos th, th_dot, phi, phi_dot, w_plus, w_minus)."""
    amp = alpha_t * _SQRT_HALF
    ch = math.cosh(t) if abs(t) < 700.0 else math.inf
    sech = 1.0 / ch
    tanh = math.tanh(t)
    v = _QUARTER_PI * (tanh + 1.0)
    sv = math.sin(v)
    cv = math.cos(v)
    o0 = amp * sech
    o1 = o0 * cv
    o2 = o0 * sv
    if seq == COUNTERINTUITIVE:
        op, os_ = o2, o1
        sth, cth = sv, cv
        th_dot = _QUARTER_PI * sech * sech
    else:
        op, os_ = o1, o2
        sth, cth = cv, sv
        th_dot = -_QUARTER_PI * sech * sech
    o0_dot = -o0 * tanh
    if delta_t == 0.0:
        phi = _QUARTER_PI
        phi_dot = 0.0
    else:
        phi = 0.5 * math.atan2(2.0 * o0, delta_t)
        phi_dot = o0_dot * delta_t / (delta_t * delta_t + 4.0 * o0 * o0)
    root = math.sqrt(delta_t * delta_t + 4.0 * o0 * o0)
    w_plus = 0.5 * (delta_t + root)
    w_minus = -2.0 * o0 * o0 / (delta_t + root) if delta_t + root > 0.0 else 0.0
    return op, os_, o0, sth, cth, th_dot, phi, phi_dot, w_plus, w_minus


def _h3(t, p):
    """3x3 generator as a flat row-major tuple for the amplitude systems."""
    system, model, seq, alpha_t, delta_t, gamma_t = p[0], p[1], p[2], p[3], p[4], p[5]
    op, os_, o0, sth, cth, thd, phi, phid, wp, wm = _frame(t, alpha_t, delta_t, seq)
    sp = math.sin(phi)
    cp = math.cos(phi)
    s2p = 2.0 * sp * cp
    if system == ADIABATIC_3:
        h02 = 1j * phid
        h20 = -1j * phid
        if model == PHENOMENOLOGICAL:
            h02 += 0.5j * gamma_t * s2p
            h20 += 0.5j * gamma_t * s2p
        return (
            wp - 1j * gamma_t * cp * cp, 1j * thd * sp, h02,
            -1j * thd * sp, 0.0, -1j * thd * cp,
            h20, 1j * thd * cp, wm - 1j * gamma_t * sp * sp,
        )
    h = [0.0, op, 0.0, op, delta_t - 1j * gamma_t, os_, 0.0, os_, 0.0]
    if model == EFFECTIVE:
        g = -0.5j * gamma_t * s2p
        c2p = cp * cp - sp * sp
        h[0] += g * s2p * sth * sth
        h[1] += g * c2p * sth
        h[2] += g * s2p * sth * cth
        h[3] += g * c2p * sth
        h[4] += -g * s2p
        h[5] += g * c2p * cth
        h[6] += g * s2p * sth * cth
        h[7] += g * c2p * cth
        h[8] += g * s2p * cth * cth
    return h


def _rhs_amplitude(t, y, p):
    h = _h3(t, p)
    y0, y1, y2 = y
    return [
        -1j * (h[0] * y0 + h[1] * y1 + h[2] * y2),
        -1j * (h[3] * y0 + h[4] * y1 + h[5] * y2),
        -1j * (h[6] * y0 + h[7] * y1 + h[8] * y2),
    ]


def _rhs_master(t, rho, p):
    seq, alpha_t, delta_t, gamma_t = p[2], p[3], p[4], p[5]
    n_plus, n_minus, omega4 = p[6], p[7], p[8]
    op, os_, o0, sth, cth, thd, phi, phid, wp, wm = _frame(t, alpha_t, delta_t, seq)
    sp = math.sin(phi)
    cp = math.cos(phi)
    h = (
        (0.0, op, 0.0, 0.0),
        (op, delta_t, os_, 0.0),
        (0.0, os_, 0.0, 0.0),
        (0.0, 0.0, 0.0, omega4),
    )
    r = [rho[4 * i:4 * i + 4] for i in range(4)]
    out = [[0j] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(4):
            acc = 0j
            for k in range(4):
                acc += h[i][k] * r[k][j] - r[i][k] * h[k][j]
            out[i][j] = -1j * acc

    e_plus = (sp * sth, cp, sp * cth, 0.0)
    e_minus = (cp * sth, -sp, cp * cth, 0.0)
    g_plus = 2.0 * gamma_t * cp * cp
    g_minus = 2.0 * gamma_t * sp * sp
    for e, g_dec, n in ((e_plus, g_plus * (n_plus + 1.0), n_plus),
                        (e_minus, g_minus * (n_minus + 1.0), n_minus)):
        g_exc = g_dec * n / (n + 1.0)
        # rho e and e^T rho; e is real.
        u = [sum(r[i][k] * e[k] for k in range(4)) for i in range(4)]
        w = [sum(e[k] * r[k][j] for k in range(4)) for j in range(4)]
        pop = sum(e[i] * u[i] for i in range(4))
        if g_dec != 0.0:
            for i in range(4):
                for j in range(4):
                    out[i][j] -= 0.5 * g_dec * (e[i] * w[j] + u[i] * e[j])
            out[3][3] += g_dec * pop
        if g_exc != 0.0:
            r44 = r[3][3]
            for i in range(4):
                for j in range(4):
                    out[i][j] += g_exc * r44 * e[i] * e[j]
            for j in range(4):
                out[3][j] -= 0.5 * g_exc * r[3][j]
                out[j][3] -= 0.5 * g_exc * r[j][3]
    return [x for row in out for x in row]


def rhs(system, params, t, y):
    """Evaluate the right-hand side once; exposed for tests."""
    p = (system,) + tuple(params)
    y = [complex(v) for v in np.asarray(y).ravel()]
    f = _rhs_master(t, y, p) if system == MASTER_4 else _rhs_amplitude(t, y, p)
    return np.asarray(f, dtype=complex)


def generator(system, params, t):
    """3x3 generator used by the amplitude systems; exposed for tests."""
    p = (system,) + tuple(params)
    return np.asarray(_h3(t, p), dtype=complex).reshape(3, 3)


def _error_norm(err, y, ynew, rtol, atol):
    acc = 0.0
    for e, a, b in zip(err, y, ynew):
        sc = atol + rtol * max(abs(a), abs(b))
        q = abs(e) / sc
        acc += q * q
    return math.sqrt(acc / len(err))


def integrate(system, params, y0, t0, t1, samples, rtol, atol, max_step,
              h0, max_factor, max_steps):
    """Adaptive Dormand-Prince integration of dy/dt = f(t, y).

    Parameters
    ----------
    system : int
        One of ``ADIABATIC_3``, ``BARE_3``, ``MASTER_4``.
    params : sequence of float
        ``(model, seq, alphaT, deltaT, gammaT, n_plus, n_minus, omega4T)``.
    y0 : array_like of complex
        Initial state (3 amplitudes or a flattened 4x4 density matrix).
    samples : array_like of float
        Ascending output times inside ``[t0, t1]``.

    Returns
    -------
    out : ndarray, shape (len(samples), dim)
    n_accepted, n_rejected, status : int
    t_fail : float
        Time at which the controller gave up (``nan`` on success).
    """
    p = (system,) + tuple(float(x) for x in params)
    p = (int(p[0]), int(p[1]), int(p[2])) + p[3:]
    f = _rhs_master if system == MASTER_4 else _rhs_amplitude
    y = [complex(v) for v in np.asarray(y0).ravel()]
    dim = len(y)
    samples = np.asarray(samples, dtype=float)
    ns = len(samples)
    out = np.zeros((ns, dim), dtype=complex)

    isamp = 0
    while isamp < ns and samples[isamp] <= t0:
        out[isamp] = y
        isamp += 1

    t = t0
    h = min(h0, max_step, t1 - t0)
    k1 = f(t, y, p)
    err_old = 1e-4
    rejected = False
    n_acc = 0
    n_rej = 0
    eps = 2.220446049250313e-16

    while t < t1:
        if n_acc + n_rej >= max_steps:
            return out, n_acc, n_rej, TOO_MANY_STEPS, t
        h_min = 16.0 * eps * max(1.0, abs(t))
        if h < h_min:
            return out, n_acc, n_rej, UNDERFLOW, t
        if t + h > t1 or t1 - (t + h) < h_min:
            h = t1 - t

        ks = [k1]
        for s in range(1, 6):
            a = _A[s]
            ys = [y[i] + h * sum(a[j] * ks[j][i] for j in range(s)) for i in range(dim)]
            ks.append(f(t + _C[s] * h, ys, p))
        ynew = [y[i] + h * sum(_B[j] * ks[j][i] for j in range(6)) for i in range(dim)]
        t_new = t + h if h != t1 - t else t1
        k7 = f(t_new, ynew, p)
        ks.append(k7)
        err_vec = [h * sum(_E[j] * ks[j][i] for j in range(7)) for i in range(dim)]
        err = _error_norm(err_vec, y, ynew, rtol, atol)

        if err <= 1.0:
            while isamp < ns and samples[isamp] <= t_new:
                if samples[isamp] == t_new:
                    out[isamp] = ynew
                else:
                    th = (samples[isamp] - t) / h
                    q = [th * (pj[0] + th * (pj[1] + th * (pj[2] + th * pj[3]))) for pj in _P]
                    out[isamp] = [y[i] + h * sum(q[j] * ks[j][i] for j in range(7))
                                  for i in range(dim)]
                isamp += 1
            if err == 0.0:
                factor = max_factor
            else:
                factor = _SAFETY * err ** -_ALPHA * err_old ** _BETA
                factor = min(max_factor, max(_MIN_FACTOR, factor))
            if rejected:
                factor = min(1.0, factor)
            err_old = max(err, 1e-4)
            rejected = False
            t = t_new
            y = ynew
            k1 = k7
            n_acc += 1
            h = min(h * factor, max_step)
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)
            rejected = True
            n_rej += 1

    while isamp < ns:
        out[isamp] = y
        isamp += 1
    return out, n_acc, n_rej, OK, math.nan
