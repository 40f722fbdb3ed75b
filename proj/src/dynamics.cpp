#include "echolab/dynamics.hpp"
#include "echolab/parallel.hpp"
#include "echolab/rng.hpp"
#include "fft.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace echolab
{

namespace
{

// exp(-i pi k^2 / N) with k^2 reduced mod 2N so large k keep full precision.
Cx quadratic_phase(std::int64_t k, std::int64_t N, double sign)
{
    const std::int64_t r = ((k % (2 * N)) * (k % (2 * N))) % (2 * N);
    const double a = sign * kPi * static_cast<double>(r) / static_cast<double>(N);
    return {std::cos(a), std::sin(a)};
}

const Cx kGauge = std::polar(1.0, kPi / 4.0);

void check_even(std::size_t N, const char* what)
{
    require(N >= 2 && N % 2 == 0, ErrorCode::Range, what);
}

std::string num(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

void apply_inplace(const Floquet& F, CVec& psi, long n)
{
    require(n >= 0, ErrorCode::Range, "kick count must be non-negative");
    require(static_cast<std::size_t>(psi.size()) == F.basis().dim(), ErrorCode::Dimension,
            "state dimension does not match the Floquet map");
    for (long i = 0; i < n; ++i)
        F.step(psi);
}

void adjoint_apply_inplace(const Floquet& F, CVec& psi, long n)
{
    require(n >= 0, ErrorCode::Range, "kick count must be non-negative");
    require(static_cast<std::size_t>(psi.size()) == F.basis().dim(), ErrorCode::Dimension,
            "state dimension does not match the Floquet map");
    for (long i = 0; i < n; ++i)
        F.step_adjoint(psi);
}

StateVector apply(const Floquet& F, const StateVector& psi, long n)
{
    require(psi.basis() == F.basis(), ErrorCode::BasisMismatch, "state basis does not match the Floquet map");
    CVec v = psi.vec();
    apply_inplace(F, v, n);
    return StateVector(psi.basis(), std::move(v));
}

StateVector adjoint_apply(const Floquet& F, const StateVector& psi, long n)
{
    require(psi.basis() == F.basis(), ErrorCode::BasisMismatch, "state basis does not match the Floquet map");
    CVec v = psi.vec();
    adjoint_apply_inplace(F, v, n);
    return StateVector(psi.basis(), std::move(v));
}

CMat dense_matrix(const Floquet& F)
{
    require(F.basis().dim() <= 4096, ErrorCode::Dimension, "dense matrix guard: dim must be <= 4096");
    return F.dense();
}

// ---------------------------------------------------------------- rotator

RotatorFloquet::RotatorFloquet(std::size_t N, double K) : N_(N), K_(K)
{
    check_even(N, "rotator needs an even N >= 2");
    require(std::isfinite(K), ErrorCode::Range, "kick strength must be finite");
    const auto n = static_cast<Eigen::Index>(N);
    kick_.resize(n);
    kin_.resize(n);
    const double amp = static_cast<double>(N) * K / kTwoPi;
    for (Eigen::Index l = 0; l < n; ++l)
    {
        const double x = kTwoPi * static_cast<double>(l) / static_cast<double>(N);
        kick_[l] = std::polar(1.0, -amp * std::cos(x));
        kin_[l] = quadratic_phase(l, n, -1.0) * kGauge / static_cast<double>(N);
    }
    fwd_ = FftPlan::get({static_cast<int>(N)}, FFTW_FORWARD);
    inv_ = FftPlan::get({static_cast<int>(N)}, FFTW_BACKWARD);
}

RotatorFloquet::~RotatorFloquet() = default;

void RotatorFloquet::step(CVec& psi) const
{
    psi.array() *= kick_.array();
    fwd_->execute(psi.data());
    psi.array() *= kin_.array();
    inv_->execute(psi.data());
}

void RotatorFloquet::step_adjoint(CVec& psi) const
{
    fwd_->execute(psi.data());
    psi.array() *= kin_.array().conjugate();
    inv_->execute(psi.data());
    psi.array() *= kick_.array().conjugate();
}

CMat RotatorFloquet::dense() const
{
    const auto n = static_cast<Eigen::Index>(N_);
    CMat m(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(N_));
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            m(r, c) = s * quadratic_phase(r - c + n, n, +1.0) * kick_[c];
    return m;
}

std::string RotatorFloquet::describe() const
{
    return "rotator(N=" + std::to_string(N_) + ",K=" + num(K_) + ")";
}

// ---------------------------------------------------------------- top

TopFloquet::TopFloquet(int twoS, double K, double phi) : twoS_(twoS), K_(K), phi_(phi)
{
    require(twoS >= 1, ErrorCode::Range, "spin must be at least 1/2");
    require(twoS <= 10000, ErrorCode::Range, "spin too large for dense top engine (2S <= 10000)");
    require(std::isfinite(K) && std::isfinite(phi), ErrorCode::Range, "top parameters must be finite");
    turn_ = unitary_exp(spin_y(twoS), kPi / 2.0);
    twist_.resize(twoS + 1);
    for (int i = 0; i <= twoS; ++i)
    {
        const double m = -0.5 * twoS + i;
        twist_[i] = std::polar(1.0, -K / twoS * m * m);
    }
    if (phi != 0.0)
        pert_ = unitary_exp(spin_x(twoS), phi);
}

void TopFloquet::step(CVec& psi) const
{
    CVec t = turn_ * psi;
    t.array() *= twist_.array();
    if (pert_.size() > 0)
        psi.noalias() = pert_ * t;
    else
        psi = std::move(t);
}

void TopFloquet::step_adjoint(CVec& psi) const
{
    CVec t;
    if (pert_.size() > 0)
        t.noalias() = pert_.adjoint() * psi;
    else
        t = psi;
    t.array() *= twist_.array().conjugate();
    psi.noalias() = turn_.adjoint() * t;
}

CMat TopFloquet::dense() const
{
    CMat m = twist_.asDiagonal() * turn_;
    if (pert_.size() > 0)
        m = (pert_ * m).eval();
    return m;
}

std::string TopFloquet::describe() const
{
    return "top(S=" + num(0.5 * twoS_) + ",K=" + num(K_) + ",phi=" + num(phi_) + ")";
}

// ---------------------------------------------------------------- coupled

CoupledFloquet::CoupledFloquet(std::size_t N1, std::size_t N2, double K1, double K2, double eps, bool reversed)
    : N1_(N1), N2_(N2), K1_(K1), K2_(K2), eps_(eps), reversed_(reversed)
{
    check_even(N1, "coupled engine needs even N1 >= 2");
    check_even(N2, "coupled engine needs even N2 >= 2");
    require(std::isfinite(K1) && std::isfinite(K2) && std::isfinite(eps), ErrorCode::Range,
            "coupled parameters must be finite");
    const auto n1 = static_cast<Eigen::Index>(N1);
    const auto n2 = static_cast<Eigen::Index>(N2);
    const double a1 = static_cast<double>(N1) * K1 / kTwoPi;
    const double a2 = static_cast<double>(N2) * K2 / kTwoPi;
    const double au = eps * std::sqrt(static_cast<double>(N1) * static_cast<double>(N2));
    pre_.resize(n1 * n2);
    kin_.resize(n1 * n2);
    if (reversed)
        post_.resize(n1 * n2);
    const double norm = 1.0 / (static_cast<double>(N1) * static_cast<double>(N2));
    for (Eigen::Index i = 0; i < n1; ++i)
    {
        const double x1 = kTwoPi * static_cast<double>(i) / static_cast<double>(N1);
        const Cx k1 = reversed ? std::conj(quadratic_phase(i, n1, -1.0) * kGauge) : quadratic_phase(i, n1, -1.0) * kGauge;
        for (Eigen::Index j = 0; j < n2; ++j)
        {
            const double x2 = kTwoPi * static_cast<double>(j) / static_cast<double>(N2);
            const double v2 = a2 * std::cos(x2) + au * std::sin(x1 - x2 - 0.33);
            const Eigen::Index idx = i * n2 + j;
            if (reversed)
            {
                pre_[idx] = std::polar(1.0, -v2);
                post_[idx] = std::polar(1.0, a1 * std::cos(x1));
            }
            else
                pre_[idx] = std::polar(1.0, -(a1 * std::cos(x1) + v2));
            kin_[idx] = k1 * quadratic_phase(j, n2, -1.0) * kGauge * norm;
        }
    }
    fwd_ = FftPlan::get({static_cast<int>(N1), static_cast<int>(N2)}, FFTW_FORWARD);
    inv_ = FftPlan::get({static_cast<int>(N1), static_cast<int>(N2)}, FFTW_BACKWARD);
}

CoupledFloquet CoupledFloquet::forward(std::size_t N1, std::size_t N2, double K1, double K2, double eps)
{
    return CoupledFloquet(N1, N2, K1, K2, eps, false);
}

CoupledFloquet CoupledFloquet::backward(std::size_t N1, std::size_t N2, double K1, double K2, double eps)
{
    return CoupledFloquet(N1, N2, K1, K2, eps, true);
}

CoupledFloquet::~CoupledFloquet() = default;
CoupledFloquet::CoupledFloquet(const CoupledFloquet&) = default;
CoupledFloquet::CoupledFloquet(CoupledFloquet&&) noexcept = default;

void CoupledFloquet::step(CVec& psi) const
{
    psi.array() *= pre_.array();
    fwd_->execute(psi.data());
    psi.array() *= kin_.array();
    inv_->execute(psi.data());
    if (post_.size() > 0)
        psi.array() *= post_.array();
}

void CoupledFloquet::step_adjoint(CVec& psi) const
{
    if (post_.size() > 0)
        psi.array() *= post_.array().conjugate();
    fwd_->execute(psi.data());
    psi.array() *= kin_.array().conjugate();
    inv_->execute(psi.data());
    psi.array() *= pre_.array().conjugate();
}

CMat CoupledFloquet::dense() const
{
    const auto n1 = static_cast<Eigen::Index>(N1_);
    const auto n2 = static_cast<Eigen::Index>(N2_);
    const double s = 1.0 / std::sqrt(static_cast<double>(N1_) * static_cast<double>(N2_));
    CMat m(n1 * n2, n1 * n2);
    for (Eigen::Index c1 = 0; c1 < n1; ++c1)
        for (Eigen::Index c2 = 0; c2 < n2; ++c2)
        {
            const Eigen::Index c = c1 * n2 + c2;
            for (Eigen::Index r1 = 0; r1 < n1; ++r1)
            {
                Cx t1 = quadratic_phase(r1 - c1 + n1, n1, +1.0);
                if (reversed_)
                    t1 = std::conj(t1);
                for (Eigen::Index r2 = 0; r2 < n2; ++r2)
                {
                    const Eigen::Index r = r1 * n2 + r2;
                    Cx v = s * t1 * quadratic_phase(r2 - c2 + n2, n2, +1.0) * pre_[c];
                    if (reversed_)
                        v *= post_[r];
                    m(r, c) = v;
                }
            }
        }
    return m;
}

std::string CoupledFloquet::describe() const
{
    return std::string(reversed_ ? "coupled_backward" : "coupled") + "(N1=" + std::to_string(N1_) +
           ",N2=" + std::to_string(N2_) + ",K1=" + num(K1_) + ",K2=" + num(K2_) + ",eps=" + num(eps_) + ")";
}

// ---------------------------------------------------------------- spectral

SpectralFloquet::SpectralFloquet(const Floquet& F) : SpectralFloquet(dense_matrix(F), F.basis()) {}

SpectralFloquet::SpectralFloquet(const CMat& unitary, Basis basis) : basis_(basis)
{
    require(static_cast<std::size_t>(unitary.rows()) == basis.dim(), ErrorCode::Dimension,
            "matrix does not match basis");
    eig_ = unitary_eig(unitary);
}

CVec SpectralFloquet::project(const StateVector& psi) const
{
    require(psi.basis() == basis_, ErrorCode::BasisMismatch, "state basis does not match the Floquet map");
    return eig_.vectors.adjoint() * psi.vec();
}

StateVector SpectralFloquet::apply(const StateVector& psi, long n) const
{
    CVec c = project(psi);
    for (Eigen::Index i = 0; i < c.size(); ++i)
        c[i] *= std::polar(1.0, eig_.phases[i] * static_cast<double>(n));
    return StateVector(basis_, eig_.vectors * c);
}

// ---------------------------------------------------------------- classical

TorusPoint standard_map_step(TorusPoint pt, double K)
{
    const double p = pt.p + K * std::sin(pt.x);
    const double x = pt.x + p;
    return {wrap_2pi(x), wrap_2pi(p)};
}

TorusPoint standard_map_tangent(TorusPoint pt, double K, double& dx, double& dp)
{
    const double c = K * std::cos(pt.x);
    dp += c * dx;
    dx += dp;
    return standard_map_step(pt, K);
}

namespace
{
void normalize(SpherePoint& s)
{
    const double r = std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z);
    s.x /= r;
    s.y /= r;
    s.z /= r;
}
} // namespace

SpherePoint top_map_step(SpherePoint pt, double K, double phi)
{
    // quarter turn about y, then twist about z by K * z
    const double ux = pt.z, uy = pt.y, uz = -pt.x;
    const double a = K * uz;
    const double c = std::cos(a), s = std::sin(a);
    SpherePoint out{ux * c - uy * s, ux * s + uy * c, uz};
    if (phi != 0.0)
    {
        const double cp = std::cos(phi), sp = std::sin(phi);
        const double y = out.y * cp - out.z * sp;
        const double z = out.y * sp + out.z * cp;
        out.y = y;
        out.z = z;
    }
    normalize(out);
    return out;
}

SpherePoint top_map_tangent(SpherePoint pt, double K, double t[3])
{
    const double ux = pt.z, uy = pt.y, uz = -pt.x;
    const double dux = t[2], duy = t[1], duz = -t[0];
    const double a = K * uz;
    const double c = std::cos(a), s = std::sin(a);
    const double nx = ux * c - uy * s, ny = ux * s + uy * c;
    const double da = K * duz;
    t[0] = dux * c - duy * s - ny * da;
    t[1] = dux * s + duy * c + nx * da;
    t[2] = duz;
    SpherePoint out{nx, ny, uz};
    normalize(out);
    const double radial = t[0] * out.x + t[1] * out.y + t[2] * out.z;
    t[0] -= radial * out.x;
    t[1] -= radial * out.y;
    t[2] -= radial * out.z;
    return out;
}

SpherePoint sphere_from_angles(double theta, double phi)
{
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

void sphere_to_angles(const SpherePoint& s, double& theta, double& phi)
{
    theta = std::acos(std::clamp(s.z, -1.0, 1.0));
    phi = wrap_2pi(std::atan2(s.y, s.x));
}

namespace
{

struct TorusOrbit
{
    TorusPoint pt;
    double d[2];
    double K;

    double advance()
    {
        pt = standard_map_tangent(pt, K, d[0], d[1]);
        const double n = std::hypot(d[0], d[1]);
        d[0] /= n;
        d[1] /= n;
        return std::log(n);
    }
};

struct SphereOrbit
{
    SpherePoint pt;
    double d[3];
    double K;

    double advance()
    {
        pt = top_map_tangent(pt, K, d);
        const double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        d[0] /= n;
        d[1] /= n;
        d[2] /= n;
        return std::log(n);
    }
};

template <class Orbit>
double run_orbit(Orbit& o, int steps)
{
    double acc = 0.0;
    for (int i = 0; i < steps; ++i)
        acc += o.advance();
    return steps > 0 ? acc / steps : 0.0;
}

void tangent_for(SpherePoint p, double ang, double d[3])
{
    // orthonormal frame of the tangent plane, rotated by ang
    double e1[3];
    if (std::abs(p.z) < 0.9)
        e1[0] = -p.y, e1[1] = p.x, e1[2] = 0.0;
    else
        e1[0] = 0.0, e1[1] = -p.z, e1[2] = p.y;
    const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (double& v : e1)
        v /= n1;
    const double e2[3] = {p.y * e1[2] - p.z * e1[1], p.z * e1[0] - p.x * e1[2], p.x * e1[1] - p.y * e1[0]};
    for (int k = 0; k < 3; ++k)
        d[k] = std::cos(ang) * e1[k] + std::sin(ang) * e2[k];
}

} // namespace

double finite_time_lyapunov(double K, TorusPoint start, int steps)
{
    TorusOrbit o{start, {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}, K};
    return run_orbit(o, steps);
}

double finite_time_lyapunov(double K, SpherePoint start, int steps)
{
    SphereOrbit o{start, {0, 0, 0}, K};
    tangent_for(start, 0.3, o.d);
    return run_orbit(o, steps);
}

LyapunovEstimate benettin_lyapunov(ClassicalMap map, double K, int n_init, int n_steps, std::uint64_t seed,
                                   const BenettinOptions& opts)
{
    require(n_init >= 1 && n_steps >= 1 && opts.transient >= 0, ErrorCode::Range,
            "Benettin needs positive initial-condition and step counts");
    std::vector<double> lam(static_cast<std::size_t>(n_init));
    std::vector<int> redraws(static_cast<std::size_t>(n_init), 0);
    parallel_for(static_cast<std::size_t>(n_init), opts.jobs, [&](std::size_t i) {
        Rng rng(seed, i);
        for (int attempt = 0;; ++attempt)
        {
            require(attempt <= opts.max_redraws, ErrorCode::Numerical,
                    "no chaotic initial condition found within the redraw budget");
            const double ang = rng.uniform(0.0, kTwoPi);
            if (map == ClassicalMap::Standard)
            {
                TorusPoint p{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
                if (opts.screen_steps > 0 && finite_time_lyapunov(K, p, opts.screen_steps) < opts.screen_min)
                {
                    ++redraws[i];
                    continue;
                }
                TorusOrbit o{p, {std::cos(ang), std::sin(ang)}, K};
                run_orbit(o, opts.transient);
                lam[i] = run_orbit(o, n_steps);
            }
            else
            {
                const double z = rng.uniform(-1.0, 1.0);
                const double az = rng.uniform(0.0, kTwoPi);
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                SpherePoint p{r * std::cos(az), r * std::sin(az), z};
                if (opts.screen_steps > 0 && finite_time_lyapunov(K, p, opts.screen_steps) < opts.screen_min)
                {
                    ++redraws[i];
                    continue;
                }
                SphereOrbit o{p, {0, 0, 0}, K};
                tangent_for(p, ang, o.d);
                run_orbit(o, opts.transient);
                lam[i] = run_orbit(o, n_steps);
            }
            return;
        }
    });
    LyapunovEstimate est;
    est.n_init = n_init;
    est.n_steps = n_steps;
    est.transient = opts.transient;
    double sum = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i)
    {
        sum += lam[i];
        est.redraws += redraws[i];
    }
    est.lambda = sum / n_init;
    if (n_init > 1)
    {
        double ss = 0.0;
        for (double v : lam)
            ss += (v - est.lambda) * (v - est.lambda);
        est.stderr_ = std::sqrt(ss / (n_init - 1) / n_init);
    }
    return est;
}

} // namespace echolab
