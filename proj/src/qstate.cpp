#include "echolab/qstate.hpp"
#include "echolab/rng.hpp"

#include <cmath>

namespace echolab
{

TorusGrid::TorusGrid(std::size_t N) : N_(N)
{
    require(N >= 2, ErrorCode::Range, "torus grid needs N >= 2");
}

StateVector::StateVector(Basis basis, CVec amplitudes) : basis_(basis), amp_(std::move(amplitudes))
{
    require(static_cast<std::size_t>(amp_.size()) == basis_.dim(), ErrorCode::Dimension,
            "amplitude count does not match basis dimension");
}

StateVector StateVector::normalized(Basis basis, CVec amplitudes)
{
    const double n = amplitudes.norm();
    require(n > 0 && std::isfinite(n), ErrorCode::Numerical, "cannot normalize a zero or non-finite vector");
    amplitudes /= n;
    return StateVector(basis, std::move(amplitudes));
}

DensityMatrix::DensityMatrix(Basis basis, CMat entries) : basis_(basis), rho_(std::move(entries))
{
    require(rho_.rows() == rho_.cols() && static_cast<std::size_t>(rho_.rows()) == basis_.dim(),
            ErrorCode::Dimension, "density matrix shape does not match basis");
}

DensityMatrix DensityMatrix::projector(const StateVector& psi)
{
    return DensityMatrix(psi.basis(), psi.vec() * psi.vec().adjoint());
}

double DensityMatrix::hermiticity_error() const
{
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

StateVector gaussian_torus(const TorusGrid& grid, const WavepacketSpec& spec)
{
    const double nu = spec.width > 0 ? spec.width : grid.coherent_width();
    require(std::isfinite(spec.x0) && std::isfinite(spec.p0), ErrorCode::Range, "non-finite wavepacket center");
    require(nu <= kPi, ErrorCode::Range, "wavepacket width exceeds pi; not localized on the torus");
    const std::size_t N = grid.N();
    const double hbar = grid.phase_hbar();
    const double x0 = wrap_2pi(spec.x0);
    // images whose envelope falls below 1e-14 everywhere are dropped
    const double reach = nu * std::sqrt(2.0 * std::log(1e14));
    const int W = static_cast<int>(std::ceil(reach / kTwoPi)) + 1;
    CVec a(static_cast<Eigen::Index>(N));
    for (std::size_t l = 0; l < N; ++l)
    {
        Cx acc = 0.0;
        for (int w = -W; w <= W; ++w)
        {
            const double y = grid.x(l) + kTwoPi * w - x0;
            if (std::abs(y) > reach + grid.spacing())
                continue;
            acc += std::exp(Cx(-y * y / (2.0 * nu * nu), spec.p0 * y / hbar));
        }
        a[static_cast<Eigen::Index>(l)] = acc;
    }
    return StateVector::normalized(grid.basis(), std::move(a));
}

StateVector position_state(const TorusGrid& grid, std::size_t l)
{
    require(l < grid.N(), ErrorCode::Range, "position index out of range");
    CVec a = CVec::Zero(static_cast<Eigen::Index>(grid.N()));
    a[static_cast<Eigen::Index>(l)] = 1.0;
    return StateVector(grid.basis(), std::move(a));
}

StateVector momentum_state(const TorusGrid& grid, std::size_t k)
{
    require(k < grid.N(), ErrorCode::Range, "momentum index out of range");
    const std::size_t N = grid.N();
    CVec a(static_cast<Eigen::Index>(N));
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    for (std::size_t l = 0; l < N; ++l)
    {
        const double ph = kTwoPi * static_cast<double>((k * l) % N) / static_cast<double>(N);
        a[static_cast<Eigen::Index>(l)] = s * Cx(std::cos(ph), std::sin(ph));
    }
    return StateVector(grid.basis(), std::move(a));
}

StateVector spin_coherent(int twoS, double theta, double phi)
{
    require(twoS >= 1, ErrorCode::Range, "spin must be at least 1/2");
    const double S = 0.5 * twoS;
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const double lc = std::log(std::abs(c));
    const double ls = std::log(std::abs(s));
    const double lg = std::lgamma(twoS + 1.0);
    CVec a(twoS + 1);
    for (int i = 0; i <= twoS; ++i)
    {
        const int up = i;          // S + m
        const int down = twoS - i; // S - m
        const double m = -S + i;
        double mag;
        if ((up > 0 && c == 0.0) || (down > 0 && s == 0.0))
            mag = 0.0;
        else
        {
            double lm = 0.5 * (lg - std::lgamma(up + 1.0) - std::lgamma(down + 1.0));
            if (up > 0)
                lm += up * lc;
            if (down > 0)
                lm += down * ls;
            mag = std::exp(lm);
            // signs of cos/sin for theta outside [0, pi]
            if (c < 0 && (up % 2))
                mag = -mag;
            if (s < 0 && (down % 2))
                mag = -mag;
        }
        a[i] = mag * std::exp(Cx(0.0, -m * phi));
    }
    return StateVector::normalized(Basis::spin(twoS), std::move(a));
}

CompassParts compass_parts(const TorusGrid& grid, const WavepacketSpec& spec, double r0)
{
    const double nu = spec.width > 0 ? spec.width : grid.coherent_width();
    const double psep = r0 * grid.phase_hbar() / (nu * nu);
    CompassParts parts;
    const double dx[4] = {r0, -r0, 0.0, 0.0};
    const double dp[4] = {0.0, 0.0, psep, -psep};
    for (int i = 0; i < 4; ++i)
        parts.packets[i] = gaussian_torus(grid, {wrap_2pi(spec.x0 + dx[i]), spec.p0 + dp[i], nu});
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            parts.max_overlap = std::max(parts.max_overlap, std::abs(inner(parts.packets[i], parts.packets[j])));
    return parts;
}

StateVector compass_pure(const TorusGrid& grid, const WavepacketSpec& spec, double r0)
{
    const CompassParts parts = compass_parts(grid, spec, r0);
    CVec sum = parts.packets[0].vec();
    for (int i = 1; i < 4; ++i)
        sum += parts.packets[i].vec();
    // exact renormalization regardless of residual overlaps
    return StateVector::normalized(grid.basis(), std::move(sum));
}

DensityMatrix compass_mixture(const TorusGrid& grid, const WavepacketSpec& spec, double r0)
{
    require(grid.N() <= 8192, ErrorCode::Dimension, "compass mixture materializes an N x N matrix; N <= 8192");
    const CompassParts parts = compass_parts(grid, spec, r0);
    const auto N = static_cast<Eigen::Index>(grid.N());
    CMat rho = CMat::Zero(N, N);
    for (const auto& p : parts.packets)
        rho.noalias() += 0.25 * p.vec() * p.vec().adjoint();
    return DensityMatrix(grid.basis(), std::move(rho));
}

Cx inner(const StateVector& a, const StateVector& b)
{
    require(a.basis() == b.basis(), ErrorCode::BasisMismatch, "inner product across different bases");
    return a.vec().dot(b.vec());
}

double overlap(const StateVector& a, const StateVector& b)
{
    return std::min(1.0, std::norm(inner(a, b)));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t n1, std::size_t n2, int keep)
{
    require(keep == 1 || keep == 2, ErrorCode::Range, "keep must be 1 or 2");
    require(n1 >= 1 && n2 >= 1 && n1 * n2 == rho.dim(), ErrorCode::Dimension,
            "density matrix dimension does not factor as declared");
    const CMat& r = rho.mat();
    const auto N1 = static_cast<Eigen::Index>(n1);
    const auto N2 = static_cast<Eigen::Index>(n2);
    if (keep == 1)
    {
        CMat out = CMat::Zero(N1, N1);
        for (Eigen::Index i = 0; i < N1; ++i)
            for (Eigen::Index j = 0; j < N1; ++j)
            {
                Cx acc = 0.0;
                for (Eigen::Index k = 0; k < N2; ++k)
                    acc += r(i * N2 + k, j * N2 + k);
                out(i, j) = acc;
            }
        return DensityMatrix(Basis::torus(n1), std::move(out));
    }
    CMat out = CMat::Zero(N2, N2);
    for (Eigen::Index k = 0; k < N1; ++k)
        out += r.block(k * N2, k * N2, N2, N2);
    return DensityMatrix(Basis::torus(n2), std::move(out));
}

double purity(const DensityMatrix& rho)
{
    // Frobenius form; equals Tr rho^2 for Hermitian rho
    return rho.mat().squaredNorm();
}

StateVector random_state(Basis basis, std::uint64_t seed)
{
    require(basis.dim() >= 1, ErrorCode::Range, "random state needs dim >= 1");
    Rng rng(seed);
    CVec a(static_cast<Eigen::Index>(basis.dim()));
    for (Eigen::Index i = 0; i < a.size(); ++i)
    {
        const double re = rng.normal();
        const double im = rng.normal();
        a[i] = Cx(re, im);
    }
    return StateVector::normalized(basis, std::move(a));
}

StateVector tensor(const StateVector& a, const StateVector& b)
{
    const auto n1 = a.vec().size();
    const auto n2 = b.vec().size();
    CVec out(n1 * n2);
    for (Eigen::Index i = 0; i < n1; ++i)
        out.segment(i * n2, n2) = a.vec()[i] * b.vec();
    return StateVector(Basis::pair(static_cast<std::size_t>(n1), static_cast<std::size_t>(n2)), std::move(out));
}

namespace
{
CMat raising(int twoS)
{
    const double S = 0.5 * twoS;
    CMat sp = CMat::Zero(twoS + 1, twoS + 1);
    for (int i = 0; i < twoS; ++i)
    {
        const double m = -S + i;
        sp(i + 1, i) = std::sqrt(S * (S + 1) - m * (m + 1));
    }
    return sp;
}
} // namespace

CMat spin_x(int twoS)
{
    const CMat sp = raising(twoS);
    return 0.5 * (sp + sp.adjoint());
}

CMat spin_y(int twoS)
{
    const CMat sp = raising(twoS);
    return Cx(0.0, -0.5) * (sp - CMat(sp.adjoint()));
}

CMat spin_z(int twoS)
{
    CMat sz = CMat::Zero(twoS + 1, twoS + 1);
    for (int i = 0; i <= twoS; ++i)
        sz(i, i) = -0.5 * twoS + i;
    return sz;
}

} // namespace echolab
