#include "echolab/phasespace.hpp"
#include "echolab/rng.hpp"
#include "fft.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <unordered_map>

namespace echolab
{

double WignerGrid::total() const
{
    double s = 0.0;
    for (double v : values)
        s += v;
    return s * cell_area();
}

namespace
{

// g(a, k) supplies rho_{(a-k) mod N, k}.
template <class Entry>
WignerGrid wigner_from(std::size_t N, Entry g)
{
    require(N >= 2 && N <= 4096, ErrorCode::Dimension, "Wigner grid needs 2 <= N <= 4096");
    WignerGrid w;
    w.N = N;
    const std::size_t M = 2 * N;
    w.values.assign(M * M, 0.0);
    const auto plan = FftPlan::get({static_cast<int>(N)}, FFTW_BACKWARD);
    CVec buf(static_cast<Eigen::Index>(N));
    const double scale = 1.0 / (static_cast<double>(M) * w.cell_area());
    for (std::size_t a = 0; a < M; ++a)
    {
        for (std::size_t k = 0; k < N; ++k)
            buf[static_cast<Eigen::Index>(k)] = g(a, k);
        plan->execute(buf.data());
        for (std::size_t b = 0; b < M; ++b)
        {
            const std::size_t r = (a * b) % M;
            const Cx ph = std::polar(1.0, -kPi * static_cast<double>(r) / static_cast<double>(N));
            const Cx v = ph * buf[static_cast<Eigen::Index>(b % N)] * scale;
            w.values[a * M + b] = v.real();
            w.max_imag = std::max(w.max_imag, std::abs(v.imag()) * w.cell_area());
        }
    }
    return w;
}

} // namespace

WignerGrid wigner(const StateVector& psi)
{
    require(psi.basis().kind == Basis::Kind::TorusPosition, ErrorCode::BasisMismatch, "Wigner needs a torus state");
    const std::size_t N = psi.dim();
    const CVec& v = psi.vec();
    return wigner_from(N, [&](std::size_t a, std::size_t k) {
        const auto j = static_cast<Eigen::Index>((a + N - k) % N);
        return v[j] * std::conj(v[static_cast<Eigen::Index>(k)]);
    });
}

WignerGrid wigner(const DensityMatrix& rho)
{
    require(rho.basis().kind == Basis::Kind::TorusPosition, ErrorCode::BasisMismatch, "Wigner needs a torus matrix");
    const std::size_t N = rho.dim();
    const CMat& m = rho.mat();
    return wigner_from(N, [&](std::size_t a, std::size_t k) {
        return m(static_cast<Eigen::Index>((a + N - k) % N), static_cast<Eigen::Index>(k));
    });
}

double trace_product(const WignerGrid& wa, const WignerGrid& wb)
{
    require(wa.N == wb.N && wa.values.size() == wb.values.size(), ErrorCode::Dimension, "Wigner grids differ");
    double s = 0.0;
    for (std::size_t i = 0; i < wa.values.size(); ++i)
        s += wa.values[i] * wb.values[i];
    const double hbar = kTwoPi / static_cast<double>(wa.N);
    return kTwoPi * hbar / 4.0 * wa.cell_area() * s;
}

std::vector<double> position_marginal(const WignerGrid& w)
{
    const std::size_t M = w.side();
    std::vector<double> out(M, 0.0);
    for (std::size_t a = 0; a < M; ++a)
    {
        double s = 0.0;
        for (std::size_t b = 0; b < M; ++b)
            s += w.values[a * M + b];
        out[a] = s * w.cell_area();
    }
    return out;
}

std::vector<double> momentum_marginal(const WignerGrid& w)
{
    const std::size_t M = w.side();
    std::vector<double> out(M, 0.0);
    for (std::size_t a = 0; a < M; ++a)
        for (std::size_t b = 0; b < M; ++b)
            out[b] += w.values[a * M + b];
    for (auto& v : out)
        v *= w.cell_area();
    return out;
}

namespace
{
void put_double(std::ostream& os, double v)
{
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, r.ptr - buf);
}
} // namespace

void write_wigner_csv(const WignerGrid& w, std::ostream& os)
{
    os << "q,p,value\n";
    const std::size_t M = w.side();
    for (std::size_t a = 0; a < M; ++a)
        for (std::size_t b = 0; b < M; ++b)
        {
            put_double(os, static_cast<double>(a) * w.step());
            os << ',';
            put_double(os, static_cast<double>(b) * w.step());
            os << ',';
            put_double(os, w.values[a * M + b]);
            os << '\n';
        }
}

PointCloud torus_gaussian_cloud(TorusPoint center, double sigma, std::size_t n, std::uint64_t seed)
{
    require(n >= 1 && sigma >= 0, ErrorCode::Range, "cloud needs n >= 1 and sigma >= 0");
    Rng rng(seed);
    PointCloud c;
    c.space = PointCloud::Space::Torus;
    c.torus.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        c.torus.push_back({wrap_2pi(center.x + sigma * rng.normal()), wrap_2pi(center.p + sigma * rng.normal())});
    return c;
}

PointCloud uniform_torus_cloud(std::size_t n, std::uint64_t seed)
{
    require(n >= 1, ErrorCode::Range, "cloud needs n >= 1");
    Rng rng(seed);
    PointCloud c;
    c.space = PointCloud::Space::Torus;
    c.torus.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        c.torus.push_back({rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)});
    return c;
}

PointCloud sphere_gaussian_cloud(SpherePoint center, double sigma, std::size_t n, std::uint64_t seed)
{
    require(n >= 1 && sigma >= 0, ErrorCode::Range, "cloud needs n >= 1 and sigma >= 0");
    const double r = std::sqrt(center.x * center.x + center.y * center.y + center.z * center.z);
    require(r > 0, ErrorCode::Range, "sphere cloud center must be nonzero");
    const double c0[3] = {center.x / r, center.y / r, center.z / r};
    // tangent frame
    double e1[3];
    if (std::abs(c0[2]) < 0.9)
        e1[0] = -c0[1], e1[1] = c0[0], e1[2] = 0.0;
    else
        e1[0] = 0.0, e1[1] = -c0[2], e1[2] = c0[1];
    const double n1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (double& v : e1)
        v /= n1;
    const double e2[3] = {c0[1] * e1[2] - c0[2] * e1[1], c0[2] * e1[0] - c0[0] * e1[2], c0[0] * e1[1] - c0[1] * e1[0]};
    Rng rng(seed);
    PointCloud c;
    c.space = PointCloud::Space::Sphere;
    c.sphere.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double u = sigma * rng.normal();
        const double v = sigma * rng.normal();
        double p[3];
        for (int k = 0; k < 3; ++k)
            p[k] = c0[k] + u * e1[k] + v * e2[k];
        const double pn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        c.sphere.push_back({p[0] / pn, p[1] / pn, p[2] / pn});
    }
    return c;
}

PointCloud liouville_propagate(const PointCloud& cloud, ClassicalMap map, double K, long n, double phi)
{
    require(n >= 0, ErrorCode::Range, "step count must be non-negative");
    PointCloud out = cloud;
    if (cloud.space == PointCloud::Space::Torus)
    {
        require(map == ClassicalMap::Standard, ErrorCode::BasisMismatch, "torus clouds evolve under the standard map");
        for (auto& p : out.torus)
            for (long i = 0; i < n; ++i)
                p = standard_map_step(p, K);
    }
    else
    {
        require(map == ClassicalMap::Top, ErrorCode::BasisMismatch, "sphere clouds evolve under the top map");
        for (auto& p : out.sphere)
            for (long i = 0; i < n; ++i)
                p = top_map_step(p, K, phi);
    }
    return out;
}

namespace
{
std::unordered_map<std::uint64_t, double> histogram(const PointCloud& c, double cell)
{
    std::unordered_map<std::uint64_t, double> h;
    h.reserve(c.size());
    auto key = [](std::int64_t i, std::int64_t j) {
        return (static_cast<std::uint64_t>(i) << 32) ^ static_cast<std::uint64_t>(j & 0xffffffff);
    };
    if (c.space == PointCloud::Space::Torus)
        for (const auto& p : c.torus)
            h[key(static_cast<std::int64_t>(std::floor(p.x / cell)), static_cast<std::int64_t>(std::floor(p.p / cell)))] += 1.0;
    else
        for (const auto& p : c.sphere)
        {
            const double az = wrap_2pi(std::atan2(p.y, p.x));
            h[key(static_cast<std::int64_t>(std::floor(az / cell)),
                  static_cast<std::int64_t>(std::floor((p.z + 1.0) / cell)))] += 1.0;
        }
    return h;
}
} // namespace

double classical_fidelity(const PointCloud& a, const PointCloud& b, double cell)
{
    require(a.space == b.space, ErrorCode::BasisMismatch, "clouds live in different spaces");
    require(cell > 0 && std::isfinite(cell) && cell < 2.0 * kTwoPi, ErrorCode::Range, "degenerate cell size");
    require(a.size() > 0 && b.size() > 0, ErrorCode::Range, "empty cloud");
    const auto ha = histogram(a, cell);
    const auto hb = histogram(b, cell);
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (const auto& [k, v] : ha)
    {
        aa += v * v;
        auto it = hb.find(k);
        if (it != hb.end())
            ab += v * it->second;
    }
    for (const auto& [k, v] : hb)
        bb += v * v;
    return std::min(1.0, ab / std::sqrt(aa * bb));
}

double default_fidelity_cell(std::size_t n_points)
{
    const double c = kTwoPi / std::sqrt(static_cast<double>(std::max<std::size_t>(n_points, 1)));
    return std::clamp(c, kTwoPi / 256.0, kTwoPi / 16.0);
}

} // namespace echolab
