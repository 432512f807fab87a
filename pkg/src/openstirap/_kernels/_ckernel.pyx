# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernel.

Same algorithm and step controller as ``_pykernel``; the whole adaptive loop
runs without the GIL so sweeps can use a thread pool.
"""
import numpy as np

from libc.math cimport atan2, cos, cosh, fabs, fmax, fmin, pow, sin, sqrt, tanh, NAN, INFINITY

cdef enum:
    MAXDIM = 16

cdef enum:
    ADIABATIC_3 = 0
    BARE_3 = 1
    MASTER_4 = 2

cdef enum:
    EFFECTIVE = 0
    PHENOMENOLOGICAL = 1

cdef enum:
    COUNTERINTUITIVE = 0
    INTUITIVE = 1

cdef enum:
    OK = 0
    UNDERFLOW = 1
    TOO_MANY_STEPS = 2

cdef double QUARTER_PI = 0.78539816339744830962
cdef double SQRT_HALF = 0.70710678118654752440

cdef double SAFETY = 0.9
cdef double ALPHA = 0.17
cdef double BETA = 0.04
cdef double MIN_FACTOR = 0.2

cdef double C[6]
cdef double A[6][5]
cdef double B[6]
cdef double E[7]
cdef double P[7][4]


cdef void _init_tableau():
    cdef int i, j
    for i in range(6):
        for j in range(5):
            A[i][j] = 0.0
    C[:] = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0]
    A[1][0] = 1.0 / 5
    A[2][0] = 3.0 / 40
    A[2][1] = 9.0 / 40
    A[3][0] = 44.0 / 45
    A[3][1] = -56.0 / 15
    A[3][2] = 32.0 / 9
    A[4][0] = 19372.0 / 6561
    A[4][1] = -25360.0 / 2187
    A[4][2] = 64448.0 / 6561
    A[4][3] = -212.0 / 729
    A[5][0] = 9017.0 / 3168
    A[5][1] = -355.0 / 33
    A[5][2] = 46732.0 / 5247
    A[5][3] = 49.0 / 176
    A[5][4] = -5103.0 / 18656
    B[:] = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84]
    E[:] = [-71.0 / 57600, 0.0, 71.0 / 16695, -71.0 / 1920, 17253.0 / 339200,
            -22.0 / 525, 1.0 / 40]
    P[0][:] = [1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608,
               -12715105075.0 / 11282082432]
    P[1][:] = [0.0, 0.0, 0.0, 0.0]
    P[2][:] = [0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933,
               87487479700.0 / 32700410799]
    P[3][:] = [0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304,
               -10690763975.0 / 1880347072]
    P[4][:] = [0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408,
               701980252875.0 / 199316789632]
    P[5][:] = [0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883,
               -1453857185.0 / 822651844]
    P[6][:] = [0.0, 40617522.0 / 29380423, -110615467.0 / 29380423,
               69997945.0 / 29380423]


_init_tableau()


cdef struct Params:
    int system
    int model
    int seq
    double alpha_t
    double delta_t
    double gamma_t
    double n_plus
    double n_minus
    double omega4


cdef struct Frame:
    double op
    double os
    double o0
    double sth
    double cth
    double th_dot
    double phi
    double phi_dot
    double w_plus
    double w_minus


cdef inline void _frame(double t, const Params* p, Frame* f) noexcept nogil:
    cdef double amp = p.alpha_t * SQRT_HALF
    cdef double sech = 0.0
    if fabs(t) < 700.0:
        sech = 1.0 / cosh(t)
    cdef double th = tanh(t)
    cdef double v = QUARTER_PI * (th + 1.0)
    cdef double sv = sin(v)
    cdef double cv = cos(v)
    cdef double o0 = amp * sech
    cdef double d = p.delta_t
    cdef double root
    f.o0 = o0
    if p.seq == COUNTERINTUITIVE:
        f.op = o0 * sv
        f.os = o0 * cv
        f.sth = sv
        f.cth = cv
        f.th_dot = QUARTER_PI * sech * sech
    else:
        f.op = o0 * cv
        f.os = o0 * sv
        f.sth = cv
        f.cth = sv
        f.th_dot = -QUARTER_PI * sech * sech
    if d == 0.0:
        f.phi = QUARTER_PI
        f.phi_dot = 0.0
    else:
        f.phi = 0.5 * atan2(2.0 * o0, d)
        f.phi_dot = -o0 * th * d / (d * d + 4.0 * o0 * o0)
    root = sqrt(d * d + 4.0 * o0 * o0)
    f.w_plus = 0.5 * (d + root)
    if d + root > 0.0:
        f.w_minus = -2.0 * o0 * o0 / (d + root)
    else:
        f.w_minus = 0.0


cdef void _h3(double t, const Params* p, double complex* h) noexcept nogil:
    cdef Frame f
    _frame(t, p, &f)
    cdef double sp = sin(f.phi)
    cdef double cp = cos(f.phi)
    cdef double s2p = 2.0 * sp * cp
    cdef double c2p = cp * cp - sp * sp
    cdef double g = p.gamma_t
    cdef double complex gg
    cdef double complex I = 1j
    if p.system == ADIABATIC_3:
        h[0] = f.w_plus - I * g * cp * cp
        h[1] = I * f.th_dot * sp
        h[2] = I * f.phi_dot
        h[3] = -I * f.th_dot * sp
        h[4] = 0.0
        h[5] = -I * f.th_dot * cp
        h[6] = -I * f.phi_dot
        h[7] = I * f.th_dot * cp
        h[8] = f.w_minus - I * g * sp * sp
        if p.model == PHENOMENOLOGICAL:
            h[2] = h[2] + 0.5 * I * g * s2p
            h[6] = h[6] + 0.5 * I * g * s2p
        return
    h[0] = 0.0
    h[1] = f.op
    h[2] = 0.0
    h[3] = f.op
    h[4] = p.delta_t - I * g
    h[5] = f.os
    h[6] = 0.0
    h[7] = f.os
    h[8] = 0.0
    if p.model == EFFECTIVE:
        gg = -0.5 * I * g * s2p
        h[0] = h[0] + gg * s2p * f.sth * f.sth
        h[1] = h[1] + gg * c2p * f.sth
        h[2] = h[2] + gg * s2p * f.sth * f.cth
        h[3] = h[3] + gg * c2p * f.sth
        h[4] = h[4] - gg * s2p
        h[5] = h[5] + gg * c2p * f.cth
        h[6] = h[6] + gg * s2p * f.sth * f.cth
        h[7] = h[7] + gg * c2p * f.cth
        h[8] = h[8] + gg * s2p * f.cth * f.cth


cdef void _rhs_amplitude(double t, const double complex* y, double complex* dy,
                         const Params* p) noexcept nogil:
    cdef double complex h[9]
    cdef double complex I = 1j
    cdef int i
    _h3(t, p, h)
    for i in range(3):
        dy[i] = -I * (h[3 * i] * y[0] + h[3 * i + 1] * y[1] + h[3 * i + 2] * y[2])


cdef void _dissipate(const double complex* r, double complex* out, const double* e,
                     double g_dec, double g_exc) noexcept nogil:
    cdef double complex u[4]
    cdef double complex w[4]
    cdef double complex pop = 0.0
    cdef double complex r44 = r[15]
    cdef int i, j, k
    for i in range(4):
        u[i] = 0.0
        w[i] = 0.0
        for k in range(4):
            u[i] = u[i] + r[4 * i + k] * e[k]
            w[i] = w[i] + e[k] * r[4 * k + i]
    for i in range(4):
        pop = pop + e[i] * u[i]
    if g_dec != 0.0:
        for i in range(4):
            for j in range(4):
                out[4 * i + j] = out[4 * i + j] - 0.5 * g_dec * (e[i] * w[j] + u[i] * e[j])
        out[15] = out[15] + g_dec * pop
    if g_exc != 0.0:
        for i in range(4):
            for j in range(4):
                out[4 * i + j] = out[4 * i + j] + g_exc * r44 * e[i] * e[j]
        for j in range(4):
            out[12 + j] = out[12 + j] - 0.5 * g_exc * r[12 + j]
            out[4 * j + 3] = out[4 * j + 3] - 0.5 * g_exc * r[4 * j + 3]


cdef void _rhs_master(double t, const double complex* r, double complex* out,
                      const Params* p) noexcept nogil:
    cdef Frame f
    _frame(t, p, &f)
    cdef double sp = sin(f.phi)
    cdef double cp = cos(f.phi)
    cdef double h[16]
    cdef double e_plus[4]
    cdef double e_minus[4]
    cdef double complex acc
    cdef double complex I = 1j
    cdef double g_plus, g_minus
    cdef int i, j, k
    for i in range(16):
        h[i] = 0.0
    h[1] = f.op
    h[4] = f.op
    h[5] = p.delta_t
    h[6] = f.os
    h[9] = f.os
    h[15] = p.omega4
    for i in range(4):
        for j in range(4):
            acc = 0.0
            for k in range(4):
                acc = acc + h[4 * i + k] * r[4 * k + j] - r[4 * i + k] * h[4 * k + j]
            out[4 * i + j] = -I * acc
    e_plus[:] = [sp * f.sth, cp, sp * f.cth, 0.0]
    e_minus[:] = [cp * f.sth, -sp, cp * f.cth, 0.0]
    g_plus = 2.0 * p.gamma_t * cp * cp
    g_minus = 2.0 * p.gamma_t * sp * sp
    _dissipate(r, out, e_plus, g_plus * (p.n_plus + 1.0), g_plus * p.n_plus)
    _dissipate(r, out, e_minus, g_minus * (p.n_minus + 1.0), g_minus * p.n_minus)


cdef inline void _rhs(double t, const double complex* y, double complex* dy,
                      const Params* p) noexcept nogil:
    if p.system == MASTER_4:
        _rhs_master(t, y, dy, p)
    else:
        _rhs_amplitude(t, y, dy, p)


cdef inline double _cabs(double complex z) noexcept nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef int _dopri(const Params* p, double complex* y, int dim, double t0, double t1,
                const double* samples, int ns, double complex* out,
                double rtol, double atol, double max_step, double h0,
                double max_factor, long max_steps,
                long* n_acc, long* n_rej, double* t_fail) noexcept nogil:
    cdef double complex K[7][MAXDIM]
    cdef double complex ys[MAXDIM]
    cdef double complex ynew[MAXDIM]
    cdef double complex errv
    cdef double complex acc
    cdef double q[7]
    cdef double t = t0
    cdef double h = fmin(fmin(h0, max_step), t1 - t0)
    cdef double t_new, err, sc, ratio, factor, th, h_min
    cdef double err_old = 1e-4
    cdef double eps = 2.220446049250313e-16
    cdef bint rejected = False
    cdef int isamp = 0
    cdef int s, i, j

    while isamp < ns and samples[isamp] <= t0:
        for i in range(dim):
            out[isamp * dim + i] = y[i]
        isamp += 1

    _rhs(t, y, K[0], p)
    while t < t1:
        if n_acc[0] + n_rej[0] >= max_steps:
            t_fail[0] = t
            return TOO_MANY_STEPS
        h_min = 16.0 * eps * fmax(1.0, fabs(t))
        if h < h_min:
            t_fail[0] = t
            return UNDERFLOW
        if t + h > t1 or t1 - (t + h) < h_min:
            h = t1 - t

        for s in range(1, 6):
            for i in range(dim):
                acc = 0.0
                for j in range(s):
                    acc = acc + A[s][j] * K[j][i]
                ys[i] = y[i] + h * acc
            _rhs(t + C[s] * h, ys, K[s], p)
        for i in range(dim):
            acc = 0.0
            for j in range(6):
                acc = acc + B[j] * K[j][i]
            ynew[i] = y[i] + h * acc
        if h != t1 - t:
            t_new = t + h
        else:
            t_new = t1
        _rhs(t_new, ynew, K[6], p)

        err = 0.0
        for i in range(dim):
            errv = 0.0
            for j in range(7):
                errv = errv + E[j] * K[j][i]
            errv = h * errv
            sc = atol + rtol * fmax(_cabs(y[i]), _cabs(ynew[i]))
            ratio = _cabs(errv) / sc
            err += ratio * ratio
        err = sqrt(err / dim)

        if err <= 1.0:
            while isamp < ns and samples[isamp] <= t_new:
                if samples[isamp] == t_new:
                    for i in range(dim):
                        out[isamp * dim + i] = ynew[i]
                else:
                    th = (samples[isamp] - t) / h
                    for j in range(7):
                        q[j] = th * (P[j][0] + th * (P[j][1] + th * (P[j][2] + th * P[j][3])))
                    for i in range(dim):
                        acc = 0.0
                        for j in range(7):
                            acc = acc + q[j] * K[j][i]
                        out[isamp * dim + i] = y[i] + h * acc
                isamp += 1
            if err == 0.0:
                factor = max_factor
            else:
                factor = SAFETY * pow(err, -ALPHA) * pow(err_old, BETA)
                factor = fmin(max_factor, fmax(MIN_FACTOR, factor))
            if rejected:
                factor = fmin(1.0, factor)
            err_old = fmax(err, 1e-4)
            rejected = False
            t = t_new
            for i in range(dim):
                y[i] = ynew[i]
                K[0][i] = K[6][i]
            n_acc[0] += 1
            h = fmin(h * factor, max_step)
        else:
            h *= fmax(MIN_FACTOR, SAFETY * pow(err, -0.2))
            rejected = True
            n_rej[0] += 1

    while isamp < ns:
        for i in range(dim):
            out[isamp * dim + i] = y[i]
        isamp += 1
    t_fail[0] = NAN
    return OK


cdef Params _params(int system, params):
    cdef Params p
    p.system = system
    p.model = int(params[0])
    p.seq = int(params[1])
    p.alpha_t = params[2]
    p.delta_t = params[3]
    p.gamma_t = params[4]
    p.n_plus = params[5]
    p.n_minus = params[6]
    p.omega4 = params[7]
    return p


def rhs(int system, params, double t, y):
    """Evaluate the right-hand side once; exposed for tests."""
    cdef Params p = _params(system, params)
    cdef double complex[::1] yv = np.ascontiguousarray(np.ravel(y), dtype=complex)
    res = np.zeros(yv.shape[0], dtype=complex)
    cdef double complex[::1] rv = res
    _rhs(t, &yv[0], &rv[0], &p)
    return res


def generator(int system, params, double t):
    """3x3 generator used by the amplitude systems; exposed for tests."""
    cdef Params p = _params(system, params)
    res = np.zeros(9, dtype=complex)
    cdef double complex[::1] rv = res
    _h3(t, &p, &rv[0])
    return res.reshape(3, 3)


def integrate(int system, params, y0, double t0, double t1, samples,
              double rtol, double atol, double max_step, double h0,
              double max_factor, long max_steps):
    """Adaptive Dormand-Prince integration; see ``_pykernel.integrate``."""
    cdef Params p = _params(system, params)
    y = np.array(np.ravel(y0), dtype=complex)
    cdef double complex[::1] yv = y
    cdef int dim = yv.shape[0]
    if dim > MAXDIM:
        raise ValueError("state dimension exceeds kernel capacity")
    cdef double[::1] sv = np.ascontiguousarray(samples, dtype=float)
    cdef int ns = sv.shape[0]
    out = np.zeros((ns, dim), dtype=complex)
    cdef double complex[:, ::1] ov = out
    cdef long n_acc = 0
    cdef long n_rej = 0
    cdef double t_fail = NAN
    cdef int status
    cdef double* sp = &sv[0] if ns > 0 else NULL
    cdef double complex* op = &ov[0, 0] if ns > 0 else NULL
    with nogil:
        status = _dopri(&p, &yv[0], dim, t0, t1, sp, ns, op, rtol, atol,
                        max_step, h0, max_factor, max_steps, &n_acc, &n_rej, &t_fail)
    return out, n_acc, n_rej, status, t_fail
