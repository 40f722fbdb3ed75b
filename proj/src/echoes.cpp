#include "echolab/echoes.hpp"
#include "echolab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace echolab
{

namespace
{

std::string num(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_pair(const StateVector& psi, const Floquet& F0, const Floquet& F)
{
    require(F0.basis() == F.basis(), ErrorCode::Dimension, "echo engines act on different spaces");
    require(psi.basis() == F0.basis(), ErrorCode::BasisMismatch, "initial state basis does not match the engines");
}

std::vector<long> range_times(long n_max)
{
    require(n_max >= 0, ErrorCode::Range, "n_max must be non-negative");
    std::vector<long> t(static_cast<std::size_t>(n_max) + 1);
    for (long i = 0; i <= n_max; ++i)
        t[static_cast<std::size_t>(i)] = i;
    return t;
}

EchoEnsembleStats reduce(std::vector<EchoSeries>& runs, std::string sampling)
{
    require(runs.size() >= 2, ErrorCode::Range, "ensemble needs at least two samples");
    EchoEnsembleStats st;
    st.times = runs.front().times;
    st.n_samples = static_cast<int>(runs.size());
    st.sampling = std::move(sampling);
    const std::size_t T = st.times.size();
    st.mean.assign(T, 0.0);
    st.variance.assign(T, 0.0);
    for (const auto& r : runs)
    {
        require(r.values.size() == T, ErrorCode::Internal, "ensemble members have different lengths");
        for (std::size_t t = 0; t < T; ++t)
            st.mean[t] += r.values[t];
    }
    const double n = static_cast<double>(runs.size());
    for (auto& m : st.mean)
        m /= n;
    for (const auto& r : runs)
        for (std::size_t t = 0; t < T; ++t)
        {
            const double d = r.values[t] - st.mean[t];
            st.variance[t] += d * d;
        }
    for (auto& v : st.variance)
        v /= (n - 1.0);
    return st;
}

} // namespace

EchoSeries prepared_echo(const StateVector& psi0, const Floquet& F0, const Floquet& F, long T, long n_max)
{
    check_pair(psi0, F0, F);
    require(T >= 0, ErrorCode::Range, "preparation time must be non-negative");
    EchoSeries s;
    s.times = range_times(n_max);
    s.values.reserve(s.times.size());
    s.amplitude.reserve(s.times.size());
    CVec a = psi0.vec();
    apply_inplace(F0, a, T);
    CVec b = a;
    for (long n = 0; n <= n_max; ++n)
    {
        if (n > 0)
        {
            F0.step(a);
            F.step(b);
        }
        const Cx f = b.dot(a);
        s.amplitude.push_back(f);
        s.values.push_back(std::norm(f));
    }
    s.meta = {{"observable", T > 0 ? "prepared_echo" : "loschmidt"},
              {"F0", F0.describe()},
              {"F", F.describe()},
              {"T", std::to_string(T)}};
    return s;
}

EchoSeries loschmidt(const StateVector& psi0, const Floquet& F0, const Floquet& F, long n_max)
{
    return prepared_echo(psi0, F0, F, 0, n_max);
}

EchoSeries loschmidt_spectral(const StateVector& psi0, const SpectralFloquet& F0, const SpectralFloquet& F,
                              std::span<const long> times, long T)
{
    require(F0.basis() == F.basis() && psi0.basis() == F0.basis(), ErrorCode::BasisMismatch,
            "spectral echo needs matching bases");
    const CMat O = F.vectors().adjoint() * F0.vectors();
    CVec a = F0.project(psi0);
    const RVec& th0 = F0.phases();
    const RVec& th = F.phases();
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a[i] *= std::polar(1.0, th0[i] * static_cast<double>(T));
    const CVec b = O * a;
    EchoSeries s;
    for (long t : times)
    {
        require(t >= 0, ErrorCode::Range, "times must be non-negative");
        CVec u(a.size());
        for (Eigen::Index i = 0; i < a.size(); ++i)
            u[i] = a[i] * std::polar(1.0, th0[i] * static_cast<double>(t));
        const CVec v = O * u;
        Cx f = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            f += std::conj(b[i] * std::polar(1.0, th[i] * static_cast<double>(t))) * v[i];
        s.times.push_back(t);
        s.amplitude.push_back(f);
        s.values.push_back(std::norm(f));
    }
    s.meta = {{"observable", T > 0 ? "prepared_echo" : "loschmidt"}, {"T", std::to_string(T)}, {"method", "spectral"}};
    return s;
}

EchoEnsembleStats ensemble_of(const StateSampler& sampler, const EchoKernel& kernel, int n_samples,
                              std::uint64_t seed, int jobs)
{
    require(static_cast<bool>(sampler), ErrorCode::Range, "empty sampler");
    require(n_samples >= 2, ErrorCode::Range, "ensemble needs n_samples >= 2");
    std::vector<EchoSeries> runs(static_cast<std::size_t>(n_samples));
    parallel_for(runs.size(), jobs, [&](std::size_t i) {
        Rng rng(seed, i);
        runs[i] = kernel(sampler(rng));
    });
    return reduce(runs, "seed=" + std::to_string(seed));
}

EchoEnsembleStats ensemble_stats(const StateSampler& sampler, const Floquet& F0, const Floquet& F, long n_max,
                                 int n_samples, std::uint64_t seed, int jobs)
{
    return ensemble_of(
        sampler, [&](const StateVector& psi) { return loschmidt(psi, F0, F, n_max); }, n_samples, seed, jobs);
}

EchoEnsembleStats ensemble_stats_spectral(const StateSampler& sampler, const SpectralFloquet& F0,
                                          const SpectralFloquet& F, std::span<const long> times, int n_samples,
                                          std::uint64_t seed, long T)
{
    require(static_cast<bool>(sampler), ErrorCode::Range, "empty sampler");
    require(n_samples >= 2, ErrorCode::Range, "ensemble needs n_samples >= 2");
    const auto D = static_cast<Eigen::Index>(F0.basis().dim());
    CMat A(D, n_samples);
    for (int i = 0; i < n_samples; ++i)
    {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        A.col(i) = F0.project(sampler(rng));
    }
    const RVec& th0 = F0.phases();
    const RVec& th = F.phases();
    for (Eigen::Index r = 0; r < D; ++r)
        A.row(r) *= std::polar(1.0, th0[r] * static_cast<double>(T));
    const CMat O = F.vectors().adjoint() * F0.vectors();
    const CMat B = O * A;
    std::vector<EchoSeries> runs(static_cast<std::size_t>(n_samples));
    CMat U(D, n_samples), V(D, n_samples);
    for (long t : times)
    {
        for (Eigen::Index r = 0; r < D; ++r)
            U.row(r) = A.row(r) * std::polar(1.0, th0[r] * static_cast<double>(t));
        V.noalias() = O * U;
        for (int i = 0; i < n_samples; ++i)
        {
            Cx f = 0.0;
            for (Eigen::Index r = 0; r < D; ++r)
                f += std::conj(B(r, i) * std::polar(1.0, th[r] * static_cast<double>(t))) * V(r, i);
            auto& s = runs[static_cast<std::size_t>(i)];
            s.times.push_back(t);
            s.values.push_back(std::norm(f));
        }
    }
    return reduce(runs, "seed=" + std::to_string(seed) + ",method=spectral");
}

StateSampler torus_packet_sampler(const TorusGrid& grid, double width, std::function<bool(TorusPoint)> accept)
{
    return [grid, width, accept](Rng& rng) {
        for (int attempt = 0; attempt < 100000; ++attempt)
        {
            const TorusPoint c{rng.uniform(0.0, kTwoPi), rng.uniform(0.0, kTwoPi)};
            if (accept && !accept(c))
                continue;
            return gaussian_torus(grid, {c.x, c.p, width});
        }
        fail(ErrorCode::Numerical, "packet sampler rejected every candidate center");
    };
}

StateSampler spin_coherent_sampler(int twoS, std::function<bool(SpherePoint)> accept)
{
    return [twoS, accept](Rng& rng) {
        for (int attempt = 0; attempt < 100000; ++attempt)
        {
            const double z = rng.uniform(-1.0, 1.0);
            const double ph = rng.uniform(0.0, kTwoPi);
            const double theta = std::acos(z);
            if (accept && !accept(sphere_from_angles(theta, ph)))
                continue;
            return spin_coherent(twoS, theta, ph);
        }
        fail(ErrorCode::Numerical, "spin sampler rejected every candidate center");
    };
}

StateSampler random_state_sampler(Basis basis)
{
    return [basis](Rng& rng) { return random_state(basis, rng.next_u64()); };
}

void displace(CVec& psi, const DisplacementSpec& d)
{
    const auto N = psi.size();
    if (d.kind == DisplacementSpec::Kind::Momentum)
    {
        for (Eigen::Index l = 0; l < N; ++l)
        {
            const double x = kTwoPi * static_cast<double>(l) / static_cast<double>(N);
            psi[l] *= std::polar(1.0, d.m * x);
        }
        return;
    }
    require(d.m == std::round(d.m), ErrorCode::Range, "spatial displacement must be an integer lattice multiple");
    const long m = static_cast<long>(d.m);
    const long shift = ((m % N) + N) % N;
    if (shift == 0)
        return;
    CVec out(N);
    for (Eigen::Index l = 0; l < N; ++l)
        out[(l + shift) % N] = psi[l];
    psi = std::move(out);
}

EchoSeries displacement_echo(const StateVector& psi0, const Floquet& F0, const DisplacementSpec& disp, long n_max)
{
    require(psi0.basis() == F0.basis(), ErrorCode::BasisMismatch, "initial state basis does not match the engine");
    require(psi0.basis().kind == Basis::Kind::TorusPosition, ErrorCode::BasisMismatch,
            "displacement echo needs a torus state");
    require(std::isfinite(disp.m), ErrorCode::Range, "displacement must be finite");
    EchoSeries s;
    s.times = range_times(n_max);
    CVec a = psi0.vec(); // F0^n psi
    CVec b = psi0.vec(); // F0^n D psi
    displace(b, disp);
    for (long n = 0; n <= n_max; ++n)
    {
        if (n > 0)
        {
            F0.step(a);
            F0.step(b);
        }
        CVec da = a;
        displace(da, disp);
        const Cx f = b.dot(da);
        s.amplitude.push_back(f);
        s.values.push_back(std::norm(f));
    }
    s.meta = {{"observable", "displacement_echo"},
              {"F0", F0.describe()},
              {"kind", disp.kind == DisplacementSpec::Kind::Momentum ? "momentum" : "spatial"},
              {"m", num(disp.m)}};
    return s;
}

EchoSeries boltzmann_echo(const StateVector& psi1, const StateSampler& env_sampler, const CoupledFloquet& Hf,
                          const CoupledFloquet& Hb, std::span<const long> times, int n_env, std::uint64_t seed,
                          int jobs)
{
    require(Hf.N1() == Hb.N1() && Hf.N2() == Hb.N2(), ErrorCode::Dimension, "forward and backward grids differ");
    require(psi1.dim() == Hf.N1(), ErrorCode::Dimension, "system state does not match subsystem 1");
    require(n_env >= 1, ErrorCode::Range, "need at least one environment state");
    require(std::is_sorted(times.begin(), times.end()) && (times.empty() || times.front() >= 0), ErrorCode::Range,
            "times must be sorted and non-negative");
    const auto n1 = static_cast<Eigen::Index>(Hf.N1());
    const auto n2 = static_cast<Eigen::Index>(Hf.N2());
    std::vector<std::vector<double>> per_env(static_cast<std::size_t>(n_env));
    parallel_for(per_env.size(), jobs, [&](std::size_t e) {
        Rng rng(seed, e);
        const StateVector env = env_sampler(rng);
        require(env.dim() == Hf.N2(), ErrorCode::Dimension, "environment state does not match subsystem 2");
        CVec fwd = tensor(psi1, env).vec();
        long at = 0;
        auto& out = per_env[e];
        for (long t : times)
        {
            apply_inplace(Hf, fwd, t - at);
            at = t;
            CVec back = fwd;
            apply_inplace(Hb, back, t);
            // <psi1| Tr_2 |back><back| |psi1> = sum_j |sum_i conj(psi1_i) back_ij|^2
            Eigen::Map<const Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(back.data(), n1, n2);
            const Eigen::RowVectorXcd proj = psi1.vec().adjoint() * A;
            out.push_back(proj.squaredNorm());
        }
    });
    EchoSeries s;
    s.times.assign(times.begin(), times.end());
    s.values.assign(times.size(), 0.0);
    for (const auto& v : per_env)
        for (std::size_t t = 0; t < v.size(); ++t)
            s.values[t] += v[t];
    for (auto& v : s.values)
        v /= n_env;
    s.meta = {{"observable", "boltzmann_echo"},
              {"forward", Hf.describe()},
              {"backward", Hb.describe()},
              {"n_env", std::to_string(n_env)},
              {"seed", std::to_string(seed)}};
    return s;
}

EchoSeries boltzmann_echo(const StateVector& psi1, const StateSampler& env_sampler, const CoupledFloquet& Hf,
                          const CoupledFloquet& Hb, long n_max, int n_env, std::uint64_t seed, int jobs)
{
    const std::vector<long> t = range_times(n_max);
    return boltzmann_echo(psi1, env_sampler, Hf, Hb, std::span<const long>(t), n_env, seed, jobs);
}

CompassEcho compass_echo(const TorusGrid& grid, const WavepacketSpec& spec, double r0, const Floquet& F0,
                         const Floquet& F, long n_max)
{
    const CompassParts parts = compass_parts(grid, spec, r0);
    const StateVector pure = compass_pure(grid, spec, r0);
    CompassEcho out;
    out.max_overlap = parts.max_overlap;
    out.pure = loschmidt(pure, F0, F, n_max);
    out.pure.meta.emplace_back("state", "compass_pure");

    // mixed: (1/4) sum_ij |<psi_i| F^dag^n F0^n |psi_j>|^2, equal to 1 at t = 0 for orthogonal parts
    std::vector<CVec> a, b;
    for (const auto& p : parts.packets)
    {
        a.push_back(p.vec());
        b.push_back(p.vec());
    }
    EchoSeries& m = out.mixed;
    m.times = range_times(n_max);
    for (long n = 0; n <= n_max; ++n)
    {
        if (n > 0)
            for (int i = 0; i < 4; ++i)
            {
                F0.step(a[i]);
                F.step(b[i]);
            }
        double acc = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                acc += std::norm(b[i].dot(a[j]));
        m.values.push_back(0.25 * acc);
    }
    m.meta = out.pure.meta;
    m.meta.back().second = "compass_mixture";
    return out;
}

long threshold_time(const EchoSeries& series, double Mc)
{
    require(Mc > 0.0 && Mc < 1.0, ErrorCode::Range, "threshold must lie in (0, 1)");
    require(!series.times.empty(), ErrorCode::MissingData, "empty series");
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series.values[i] <= Mc)
            return series.times[i];
    return series.times.back() + 1;
}

std::vector<double> response_spectrum(const EchoSeries& series, std::span<const double> omega)
{
    require(series.has_amplitude(), ErrorCode::MissingData, "response spectrum needs the fidelity amplitude");
    const long n_max = series.times.back();
    require(n_max >= 1, ErrorCode::MissingData, "response spectrum needs at least two times");
    std::vector<double> out;
    out.reserve(omega.size());
    const double norm = 1.0 / (kTwoPi * static_cast<double>(n_max));
    for (double w : omega)
    {
        // two-sided sum with f(-t) = conj f(t): 2 Re sum_{t>=0} f e^{-iwt} - f(0)
        Cx acc = 0.0;
        Cx f0 = 0.0;
        for (std::size_t i = 0; i < series.size(); ++i)
        {
            const long t = series.times[i];
            const Cx term = series.amplitude[i] * std::polar(1.0, -w * static_cast<double>(t));
            if (t == 0)
                f0 = term;
            acc += term;
        }
        out.push_back(norm * (2.0 * acc.real() - f0.real()));
    }
    return out;
}

} // namespace echolab
