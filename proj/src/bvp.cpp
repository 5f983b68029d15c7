#include "ragnet/bvp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "ragnet/errors.hpp"
#include "ragnet/fft.hpp"

namespace ragnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt_value(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

KernelFuncs::KernelFuncs(const SymmetricParams& params) {
    params.validate();
    lambda = params.lambda;
    alpha = params.alpha;
    s = params.s;
    l_plus = params.l_plus;
    l_minus = params.l_minus;
}

complex_d KernelFuncs::H(complex_d x, complex_d y) const {
    return (1.0 - lambda + lambda * x) * (1.0 - lambda + lambda * y);
}

complex_d KernelFuncs::phi1(complex_d x, complex_d y) const {
    const double sb = 1.0 - s, ab = 1.0 - alpha;
    return H(x, y) * (sb * (ab * x + alpha) + s * (l_minus + l_plus * y));
}

complex_d KernelFuncs::phi2(complex_d x, complex_d y) const {
    const double sb = 1.0 - s, ab = 1.0 - alpha;
    return H(x, y) * (sb * (ab * y + alpha) + s * (l_minus + l_plus * x));
}

complex_d KernelFuncs::phi3(complex_d x, complex_d y) const {
    const double sb = 1.0 - s, ab = 1.0 - alpha;
    const complex_d sum = x + y, prod = x * y;
    const complex_d busy =
        sb * sb * (prod * (ab * ab + alpha * alpha) + alpha * ab * sum) +
        s * sb * (y * (l_minus + l_plus * y) + x * (l_minus + l_plus * x)) +
        s * s * (l_minus * l_minus + l_plus * l_minus * sum +
                 l_plus * l_plus * prod);
    return H(x, y) * busy;
}

complex_d KernelFuncs::Z(complex_d x, complex_d y) const {
    return x * y - phi3(x, y);
}

KernelValues kernel_eval(complex_d x, complex_d y,
                         const SymmetricParams& params) {
    const KernelFuncs k(params);
    return {k.phi1(x, y), k.phi2(x, y), k.phi3(x, y), k.Z(x, y)};
}

namespace {

// Restriction of the kernel to the zero-tuple ansatz (x,y) = (g e^{iθ},
// g e^{-iθ}): t(g) = g² − H·B is a real quartic in g whose coefficients
// depend on c = cos θ only.
struct RadialQuartic {
    double h0, h1, h2;  // H(g) = h0 + h1 g + h2 g²
    double b0, b1, b2;  // B(g) = b0 + b1 g + b2 g²

    RadialQuartic(const SymmetricRates& r, double c) {
        h0 = r.lambda_bar * r.lambda_bar;
        h1 = 2.0 * r.lambda * r.lambda_bar * c;
        h2 = r.lambda * r.lambda;
        const double ab = 1.0 - r.alpha;
        b0 = r.m * r.m;
        b1 = 2.0 * c * (r.q + r.s_bar * r.m + r.p * r.m);
        b2 = r.s_bar * r.s_bar * (ab * ab + r.alpha * r.alpha) +
             2.0 * r.s_bar * r.p * (2.0 * c * c - 1.0) + r.p * r.p;
    }

    double value(double g) const {
        return g * g - (h0 + g * (h1 + g * h2)) * (b0 + g * (b1 + g * b2));
    }

    double deriv(double g) const {
        const double H = h0 + g * (h1 + g * h2);
        const double B = b0 + g * (b1 + g * b2);
        return 2.0 * g - (h1 + 2.0 * h2 * g) * B - H * (b1 + 2.0 * b2 * g);
    }
};

// Real roots of the quartic in (0, 1+1e-9], by companion-matrix eigenvalues.
std::vector<double> admissible_roots(const RadialQuartic& t) {
    // coefficients of t(g) as c[0] + c[1] g + ... + c[4] g⁴
    std::array<double, 5> c{
        -t.h0 * t.b0,
        -(t.h0 * t.b1 + t.h1 * t.b0),
        1.0 - (t.h0 * t.b2 + t.h1 * t.b1 + t.h2 * t.b0),
        -(t.h1 * t.b2 + t.h2 * t.b1),
        -t.h2 * t.b2,
    };
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::fabs(v));
    int deg = 4;
    while (deg > 0 && std::fabs(c[deg]) < 1e-14 * scale) --deg;

    std::vector<double> roots;
    if (deg == 0) return roots;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 0; i + 1 < deg; ++i) comp(i + 1, i) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    for (int i = 0; i < deg; ++i) {
        const std::complex<double> root = es.eigenvalues()[i];
        if (std::fabs(root.imag()) < 1e-8 && root.real() > 1e-12 &&
            root.real() <= 1.0 + 1e-9) {
            roots.push_back(root.real());
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double root_near(const RadialQuartic& t, double warm, const char* where) {
    // Newton polish from the warm start; fall back to the full root set when
    // the polish strays off the branch.
    double g = warm;
    for (int it = 0; it < 60; ++it) {
        const double f = t.value(g);
        const double d = t.deriv(g);
        if (std::fabs(d) < 1e-300) break;
        const double gn = g - f / d;
        if (!(gn > -0.5 && gn < 2.0)) break;
        if (std::fabs(gn - g) < 1e-16) {
            g = gn;
            break;
        }
        g = gn;
    }
    if (std::fabs(t.value(g)) < 1e-12 && g > 1e-12 && g <= 1.0 + 1e-9 &&
        std::fabs(g - warm) < 0.25) {
        return g;
    }
    const std::vector<double> roots = admissible_roots(t);
    if (roots.empty()) {
        throw NumericError(std::string("no admissible kernel root in (0,1] ") +
                           where);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < roots.size(); ++i) {
        if (std::fabs(roots[i] - warm) < std::fabs(roots[best] - warm)) {
            best = i;
        }
    }
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (i != best && std::fabs(roots[i] - roots[best]) < 1e-10) {
            throw NumericError(
                std::string("branch ambiguity: two admissible kernel roots "
                            "within 1e-10 ") +
                where);
        }
    }
    return roots[best];
}

// Evaluates g at every node angle.  With warm non-empty the previous
// iterate's values seed the polish; otherwise the nodes are marched in
// order, each seeded by its predecessor, anchored at g = 1 over θ = 0.
void eval_g_nodes(const SymmetricRates& r, const std::vector<double>& theta,
                  std::vector<double>& g) {
    const std::size_t M = theta.size();
    const bool march = g.empty();
    if (march) g.assign(M, 1.0);
    for (std::size_t j = 0; j < M; ++j) {
        const RadialQuartic t(r, std::cos(theta[j]));
        const double warm = march ? (j == 0 ? 1.0 : g[j - 1]) : g[j];
        g[j] = root_near(t, warm, "on the node grid");
    }
}

// Circle conjugation operator: maps the boundary values of the real part of
// an analytic function to those of its imaginary part (spectral multiplier
// -i·sgn(n), DC and Nyquist annihilated).
std::vector<double> conjugate_fft(const std::vector<double>& f) {
    const std::size_t M = f.size();
    fft::cvec a(M);
    for (std::size_t j = 0; j < M; ++j) a[j] = f[j];
    fft::forward(a);
    a[0] = 0.0;
    a[M / 2] = 0.0;
    for (std::size_t n = 1; n < M / 2; ++n) a[n] *= complex_d(0.0, -1.0);
    for (std::size_t n = M / 2 + 1; n < M; ++n) a[n] *= complex_d(0.0, 1.0);
    fft::inverse(a);
    std::vector<double> out(M);
    for (std::size_t j = 0; j < M; ++j) out[j] = a[j].real();
    return out;
}

struct Projection {
    std::vector<complex_d> boundary;  // values of the analytic part on nodes
    std::vector<complex_d> coeffs;    // kept Taylor coefficients, n < M/2
    std::vector<complex_d> spectrum;  // full Fourier coefficients
};

// Projects node values onto the nonnegative frequencies below Nyquist: the
// boundary values of the function analytic inside the disk that shares them.
Projection plus_projection(const std::vector<complex_d>& f) {
    const std::size_t M = f.size();
    Projection out;
    fft::cvec a(f.begin(), f.end());
    fft::forward(a);
    out.spectrum.resize(M);
    for (std::size_t n = 0; n < M; ++n) out.spectrum[n] = a[n] / double(M);
    out.coeffs.assign(out.spectrum.begin(), out.spectrum.begin() + M / 2);
    fft::cvec keep(M, complex_d(0.0, 0.0));
    for (std::size_t n = 0; n < M / 2; ++n) keep[n] = a[n];  // already ×M
    fft::inverse(keep);
    out.boundary.assign(keep.begin(), keep.end());
    return out;
}

complex_d eval_series(const std::vector<complex_d>& coeffs, complex_d z) {
    complex_d acc(0.0, 0.0);
    for (std::size_t n = coeffs.size(); n-- > 0;) {
        acc = acc * z + coeffs[n];
    }
    return acc;
}

// The matching exterior function from the negative frequencies of the full
// spectrum: sum over n ≥ 1 of −spectrum[M−n]·z^{−n}.
complex_d minus_series(const std::vector<complex_d>& spectrum, complex_d z) {
    const std::size_t M = spectrum.size();
    const complex_d zi = 1.0 / z;
    complex_d acc(0.0, 0.0);
    for (std::size_t n = M / 2 - 1; n >= 1; --n) {
        acc = (acc - spectrum[M - n]) * zi;
    }
    return acc;
}

}  // namespace

double kernel_root_g(complex_d r, const SymmetricParams& params) {
    if (std::fabs(std::abs(r) - 1.0) > 1e-9) {
        throw ConfigError("kernel root requested off the unit circle");
    }
    const SymmetricRates rates(params);
    const double target = std::fabs(std::arg(r));
    const int steps = 256;
    double g = 1.0;
    for (int k = 1; k <= steps; ++k) {
        const double th = target * double(k) / double(steps);
        const RadialQuartic t(rates, std::cos(th));
        g = root_near(t, g, "while marching from r = 1");
        if (g < 1e-9) {
            throw NumericError(
                "kernel zero tuple reaches the origin: no root in (0,1] "
                "(s·l_minus = 0 puts the origin on the contour)");
        }
    }
    return g;
}

CircleGrid solve_theodorsen(const SymmetricParams& params, int M) {
    if (M < 256 || !fft::is_power_of_two(std::size_t(M))) {
        throw ConfigError("node count M must be a power of two ≥ 256");
    }
    if (!symmetric_stability(params).stable) {
        throw NumericError(
            "unstable: the boundary value problem needs a stable system");
    }
    const SymmetricRates r(params);
    if (r.m == 0.0) {
        throw NumericError(
            "origin on the boundary contour (s·l_minus = 0): the logarithmic "
            "factorization is singular; the closed-form queue bounds are "
            "exact in this regime");
    }

    CircleGrid grid;
    grid.M = M;
    grid.z.resize(M);
    std::vector<double> w(M);
    for (int j = 0; j < M; ++j) {
        w[j] = kTwoPi * double(j) / double(M);
        grid.z[j] = std::polar(1.0, w[j]);
    }

    std::vector<double> theta = w;
    std::vector<double> g;
    eval_g_nodes(r, theta, g);

    // Contraction estimate of the angle map fixes the initial damping.
    double eps = 0.0;
    for (int j = 0; j + 1 < M; ++j) {
        eps = std::max(eps, std::fabs(std::log(g[j + 1]) - std::log(g[j])) /
                                (kTwoPi / double(M)));
    }
    double damp = std::min(1.0, 1.0 / (1.0 + eps));

    double prev_diff = std::numeric_limits<double>::infinity();
    double diff = prev_diff;
    bool converged = false;
    int good = 0;
    int it = 0;
    std::vector<double> f(M);
    while (it < 500) {
        ++it;
        eval_g_nodes(r, theta, g);
        for (int j = 0; j < M; ++j) f[j] = std::log(g[j]);
        const std::vector<double> conj = conjugate_fft(f);
        diff = 0.0;
        for (int j = 0; j < M; ++j) {
            const double next = theta[j] + damp * (w[j] + conj[j] - theta[j]);
            diff = std::max(diff, std::fabs(next - theta[j]));
            theta[j] = next;
        }
        if (diff < 1e-12) {
            converged = true;
            break;
        }
        if (diff >= prev_diff) {
            damp = std::max(0.5 * damp, 1.0 / 1024.0);
            good = 0;
        } else if (++good >= 10) {
            damp = std::min(2.0 * damp, 1.0);
            good = 0;
        }
        prev_diff = diff;
    }
    grid.iterations = it;
    grid.final_diff = diff;
    if (!converged && !(diff < 1e-9)) {
        throw NumericError("no convergence: angle iteration stalled at step "
                           "size " +
                           fmt_value(diff));
    }

    eval_g_nodes(r, theta, g);
    grid.angle = std::move(theta);
    grid.g = std::move(g);
    grid.x.resize(M);
    grid.y.resize(M);
    const KernelFuncs kf(params);
    double worst = 0.0;
    for (int j = 0; j < M; ++j) {
        grid.x[j] = std::polar(grid.g[j], grid.angle[j]);
        grid.y[j] = std::conj(grid.x[j]);
        worst = std::max(
            worst, std::abs(grid.x[j] * grid.y[j] - kf.phi3(grid.x[j], grid.y[j])));
    }
    grid.max_kernel_residual = worst;
    if (worst > 1e-8) {
        throw NumericError("kernel identity violated on the contour: residual " +
                           fmt_value(worst));
    }
    return grid;
}

void boundary_functions(CircleGrid& grid, const SymmetricParams& params) {
    const KernelFuncs kf(params);
    const int M = grid.M;
    grid.G.assign(M, complex_d(0.0, 0.0));
    grid.S.assign(M, complex_d(0.0, 0.0));
    grid.G[0] = 1.0;  // analytic limits at z = 1
    grid.S[0] = 0.0;
    for (int j = 1; j < M; ++j) {
        const complex_d x = grid.x[j], y = grid.y[j];
        const complex_d p1 = kf.phi1(x, y), p2 = kf.phi2(x, y);
        const complex_d den = p1 - x;
        if (std::abs(den) < 1e-12) {
            throw NumericError("pole on contour at node " + std::to_string(j));
        }
        grid.G[j] = x * (y - p2) / (y * den);
        grid.S[j] = x * (1.0 - kf.H(x, y)) / den;
    }
}

int compute_index(const CircleGrid& grid) {
    if (grid.G.empty()) {
        throw ConfigError("index requested before boundary functions");
    }
    const int M = grid.M;
    double wind = 0.0;
    complex_d prev = grid.G[0] / grid.z[0];
    for (int j = 1; j <= M; ++j) {
        const complex_d cur = grid.G[j % M] / grid.z[j % M];
        wind += std::arg(cur / prev);
        prev = cur;
    }
    wind /= kTwoPi;
    const double nearest = std::round(wind);
    if (std::fabs(wind - nearest) > 1e-6) {
        throw NumericError("non-integer winding of the boundary coefficient: " +
                           fmt_value(wind));
    }
    return int(nearest) + 1;
}

BvpSolution solve_riemann(const SymmetricParams& params, int M) {
    CircleGrid grid = solve_theodorsen(params, M);
    boundary_functions(grid, params);
    const int chi = compute_index(grid);
    if (chi != 1) {
        throw NumericError("unsupported boundary index " + std::to_string(chi) +
                           " (expected 1)");
    }
    const SymmetricRates r(params);

    // log(z⁻¹G) on the nodes, argument unwrapped along the contour and
    // anchored at z = 1 where G = 1.
    std::vector<complex_d> ell(M);
    ell[0] = complex_d(0.0, 0.0);
    complex_d prev = grid.G[0] / grid.z[0];
    double acc = 0.0;
    for (int j = 1; j < M; ++j) {
        const complex_d cur = grid.G[j] / grid.z[j];
        acc += std::arg(cur / prev);
        ell[j] = complex_d(std::log(std::abs(cur)), acc);
        prev = cur;
    }

    const Projection gam = plus_projection(ell);
    grid.gamma_plus = gam.boundary;

    std::vector<complex_d> sigma(M);
    for (int j = 0; j < M; ++j) {
        sigma[j] = grid.S[j] * std::exp(-gam.boundary[j]);
    }
    const Projection psi = plus_projection(sigma);
    const complex_d c0 = -psi.coeffs[0];

    // Value of Φ1 at z = 1 fixes the empty-state probabilities through the
    // boundary balance relation.
    const complex_d T = std::exp(gam.boundary[0]) * (psi.boundary[0] + c0);
    const double Tr = T.real();
    const double denom =
        (1.0 + Tr) * (r.a - 2.0 * r.q - r.m) + (r.q - r.a);
    const double V = -r.delta / denom;
    const double U = V * (1.0 + Tr);
    if (!(V > 0.0 && V <= 1.0 + 1e-9)) {
        throw NumericError("empty-state probability out of (0,1]: " +
                           fmt_value(V));
    }

    BvpSolution sol;
    sol.chi = chi;
    sol.c0 = c0;
    sol.c1 = 0.0;
    sol.pi00 = V;
    sol.pi10 = U;
    sol.gamma_coeffs = gam.coeffs;
    sol.psi_coeffs = psi.coeffs;
    sol.gamma_spectrum = gam.spectrum;
    sol.psi_spectrum = psi.spectrum;
    sol.params_ = params;

    // Independent exterior evaluation closes the boundary-condition check.
    double bres = 0.0;
    for (int j = 0; j < M; ++j) {
        const complex_d z = grid.z[j];
        const complex_d inner =
            std::exp(gam.boundary[j]) * (psi.boundary[j] + c0);
        const complex_d outer = std::pow(z, -chi) *
                                std::exp(minus_series(gam.spectrum, z)) *
                                (minus_series(psi.spectrum, z) + c0);
        bres = std::max(bres,
                        std::abs(inner - grid.G[j] * outer - grid.S[j]));
    }
    sol.bc_residual = bres;

    // Power series of log(x(z)/z) gives the map at off-node points.
    std::vector<complex_d> lx(M);
    for (int j = 0; j < M; ++j) {
        lx[j] = complex_d(std::log(grid.g[j]),
                          grid.angle[j] - kTwoPi * double(j) / double(M));
    }
    sol.logx_coeffs = plus_projection(lx).coeffs;
    sol.grid = std::move(grid);

    // Boundary occupancy derivative: one-sided composite difference
    // quotients of Π(x(z),0) against x(z) along the real axis toward z = 1,
    // Richardson-extrapolated over h, h/2, h/4.
    const auto quotient = [&](double h) {
        const complex_d z(1.0 - h, 0.0);
        const double F = V * (1.0 + sol.phi1_interior(z).real());
        const double x = sol.x_of(z).real();
        return (U - F) / (1.0 - x);
    };
    const double h = 1e-3;
    const double q1 = quotient(h), q2 = quotient(h / 2), q3 = quotient(h / 4);
    const double e1 = 2.0 * q2 - q1, e2 = 2.0 * q3 - q2;
    sol.pi1_10 = (4.0 * e2 - e1) / 3.0;

    const LFromPi lf = l_from_pi(sol.pi(), params);
    sol.L_exact = lf.via_flow_balance;
    sol.L_second_moment = lf.via_second_moment;
    return sol;
}

complex_d BvpSolution::phi1_interior(complex_d z) const {
    return std::exp(eval_series(gamma_coeffs, z)) *
           (eval_series(psi_coeffs, z) + c0);
}

complex_d BvpSolution::phi2_exterior(complex_d z) const {
    return std::pow(z, -chi) * std::exp(minus_series(gamma_spectrum, z)) *
           (minus_series(psi_spectrum, z) + c0);
}

complex_d BvpSolution::x_of(complex_d z) const {
    return z * std::exp(eval_series(logx_coeffs, z));
}

double BvpSolution::joint_pgf(double x, double y) const {
    if (!(x >= 0.0 && x < 1.0 && y >= 0.0 && y < 1.0)) {
        throw ConfigError("joint pgf evaluator accepts real arguments in [0,1)");
    }
    const KernelFuncs kf(params_);
    const auto boundary_slice = [&](double v) {
        if (v <= 1e-12) return pi00;
        // x(t) is real and increasing on [0,1]; invert by bisection.
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (x_of(complex_d(mid, 0.0)).real() < v ? lo : hi) = mid;
        }
        const double t = 0.5 * (lo + hi);
        return pi00 * (1.0 + phi1_interior(complex_d(t, 0.0)).real());
    };
    const double Px = boundary_slice(x);
    const double Py = boundary_slice(y);
    const complex_d cx(x, 0.0), cy(y, 0.0);
    const complex_d Z = kf.Z(cx, cy);
    if (std::abs(Z) < 1e-3) {
        throw NumericError("joint pgf point too close to the kernel zero set");
    }
    const complex_d val =
        ((cy * kf.phi1(cx, cy) - kf.phi3(cx, cy)) * (Px - pi00) +
         (cx * kf.phi2(cx, cy) - kf.phi3(cx, cy)) * (Py - pi00) +
         (cx * cy * kf.H(cx, cy) - kf.phi3(cx, cy)) * pi00) /
        Z;
    return val.real();
}

PiEstimates BvpSolution::pi() const {
    PiEstimates pe;
    pe.pi00 = pi00;
    pe.pi10 = pi10;
    pe.pi1_10 = pi1_10;
    pe.p_both_busy = 1.0 - 2.0 * pi10 + pi00;
    return pe;
}

nlohmann::json BvpSolution::to_json() const {
    return nlohmann::json{
        {"M", grid.M},
        {"chi", chi},
        {"c0_re", c0.real()},
        {"c0_im", c0.imag()},
        {"pi00", pi00},
        {"pi10", pi10},
        {"pi1_10", pi1_10},
        {"L_exact", L_exact},
        {"max_kernel_residual", grid.max_kernel_residual},
        {"iterations", grid.iterations},
    };
}

}  // namespace ragnet
