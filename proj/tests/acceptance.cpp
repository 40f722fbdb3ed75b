// Acceptance runner: `acceptance [n ...]` prints one PASS/FAIL line per criterion
// (all thirteen when no number is given). Tolerances are pinned below.
#include "echolab/analysis.hpp"
#include "echolab/echoes.hpp"
#include "echolab/entanglement.hpp"
#include "echolab/phasespace.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

using namespace echolab;

namespace
{

constexpr std::uint64_t kSeed = 20240917;

struct Verdict
{
    bool pass = true;
    std::string detail;

    void check(bool ok, const char* fmt, ...)
    {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        if (!detail.empty())
            detail += "; ";
        detail += buf;
        if (!ok)
        {
            detail += " [x]";
            pass = false;
        }
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double spread(const std::vector<double>& v)
{
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / std::abs(*lo);
}

EchoSeries mean_series(const EchoEnsembleStats& s)
{
    EchoSeries e;
    e.times = s.times;
    e.values = s.mean;
    return e;
}

std::vector<long> every(long step, long last, long first = 0)
{
    std::vector<long> t;
    for (long i = first; i <= last; i += step)
        t.push_back(i);
    return t;
}

double max_abs_diff(const CVec& a, const CVec& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Fit with the default window [2, first t below 5/N].
FitResult fit_default(FitKind kind, const EchoSeries& s, std::size_t N)
{
    const FitWindow w = default_fit_window(s.times, s.values, N);
    switch (kind)
    {
    case FitKind::Gaussian: return fit_gaussian(s, w);
    case FitKind::Power: return fit_power(s, w);
    default: return fit_exponential(s, w);
    }
}

// ---------------------------------------------------------------------------

Verdict oracle_equivalence()
{
    constexpr double kTol = 1e-10;
    constexpr int kKicks = 20;
    Verdict v;
    auto run = [&](const Floquet& F, const CMat& U, const char* name) {
        CVec fast = random_state(F.basis(), kSeed).vec();
        CVec ref = fast;
        double worst = 0;
        for (int n = 1; n <= kKicks; ++n)
        {
            F.step(fast);
            ref = U * ref;
            worst = std::max(worst, max_abs_diff(fast, ref));
        }
        v.check(worst < kTol, "%s max|diff| %.2e", name, worst);
    };
    const RotatorFloquet rot(128, 9.95);
    run(rot, oracle::rotator(128, 9.95), "rotator N=128");
    const TopFloquet top(100, 13.1, 1e-3);
    run(top, oracle::top(100, 13.1, 1e-3), "top S=50");
    const auto fw = CoupledFloquet::forward(16, 16, 10.0, 7.0, 0.05);
    run(fw, oracle::coupled(16, 16, 10.0, 7.0, 0.05, false), "coupled 16x16");
    const auto bw = CoupledFloquet::backward(16, 16, 10.1, 7.0, 0.05);
    run(bw, oracle::coupled(16, 16, 10.1, 7.0, 0.05, true), "coupled reversed");
    return v;
}

Verdict classical_lyapunov()
{
    constexpr double kTol = 0.05;
    Verdict v;
    for (double K : {10.0, 20.0, 50.0})
    {
        const LyapunovEstimate e = benettin_lyapunov(ClassicalMap::Standard, K, 10000, 1000, kSeed);
        const double ref = std::log(K / 2);
        v.check(rel(e.lambda, ref) < kTol, "K=%g lambda %.4f vs ln(K/2) %.4f", K, e.lambda, ref);
    }
    return v;
}

Verdict perturbative_gaussian()
{
    constexpr double kMinR2 = 0.98;
    constexpr int kTwoS = 1000;
    constexpr int kStates = 100;
    Verdict v;
    const SpectralFloquet F0(TopFloquet(kTwoS, 13.1));
    for (double phi : {1e-6, 5e-7})
    {
        const SpectralFloquet F(TopFloquet(kTwoS, 13.1, phi));
        // S_x is odd under the top's parity, so diagonal shifts start at second order and the
        // decay runs on phi^2 t; 300 points reach saturation for both strengths
        const long step = std::lround(2e-7 / (phi * phi));
        const auto times = every(step, 300 * step);
        const EchoSeries m = mean_series(
            ensemble_stats_spectral(spin_coherent_sampler(kTwoS), F0, F, times, kStates, kSeed));
        const FitResult g = fit_default(FitKind::Gaussian, m, kTwoS + 1);
        const FitResult e = fit_default(FitKind::Exponential, m, kTwoS + 1);
        v.check(g.r_squared > kMinR2, "phi=%g Gaussian R2 %.4f over t in [%ld,%ld] (exponential R2 %.4f)", phi,
                g.r_squared, g.window.t0, g.window.t1, e.r_squared);
    }
    return v;
}

Verdict golden_rule()
{
    constexpr double kTol = 0.25;
    constexpr std::size_t N = 4096;
    constexpr std::size_t kLdosN = 1024;
    constexpr double K = 9.95;
    constexpr int kStates = 200;
    Verdict v;
    const RotatorFloquet F0(N, K);
    const SpectralFloquet S0(RotatorFloquet(kLdosN, K));
    for (double dKN : {1.5, 2.6, 4.5})
    {
        const double dK = dKN / N;
        const double gamma = predicted_gamma(RotatorPerturbation{dK, N});
        const long n_max = std::lround(std::log(N / 5.0) / gamma) + 20;
        const auto st = ensemble_stats(torus_packet_sampler(TorusGrid(N)), F0, RotatorFloquet(N, K + dK), n_max,
                                       kStates, kSeed);
        const FitResult f = fit_default(FitKind::Exponential, mean_series(st), N);
        v.check(rel(f.rate, gamma) < kTol, "dK*N=%g echo rate %.4f vs %.4f", dKN, f.rate, gamma);

        // same dK*N on the smaller grid, where exact diagonalization is affordable
        const double dKs = dKN / kLdosN;
        const LdosHistogram h = ldos(S0, SpectralFloquet(RotatorFloquet(kLdosN, K + dKs)), 1001);
        const LorentzianFit lf = lorentzian_fit(h);
        v.check(rel(lf.gamma, gamma) < kTol && !lf.at_floor, "LDoS width %.4f", lf.gamma);
    }
    return v;
}

Verdict lyapunov_regime()
{
    constexpr double kTol = 0.15;
    constexpr std::size_t N = 65536;
    constexpr int kStates = 200;
    Verdict v;
    std::vector<double> per_K;
    for (double K : {10.0, 50.0})
    {
        const double lambda = std::log(K / 2);
        // Gamma = lambda at dK*N = sqrt(lambda / 0.024); dK a factor 2 and 4 beyond it (Gamma = 4 and 16 lambda)
        const double dKN0 = std::sqrt(lambda / 0.024);
        const RotatorFloquet F0(N, K);
        std::vector<double> rates;
        for (double f : {2.0, 4.0})
        {
            const double dK = f * dKN0 / N;
            const auto st =
                ensemble_stats(torus_packet_sampler(TorusGrid(N)), F0, RotatorFloquet(N, K + dK), 16, kStates, kSeed);
            const FitResult fit = fit_default(FitKind::Exponential, mean_series(st), N);
            rates.push_back(fit.rate);
        }
        v.check(rel(rates[1], rates[0]) < kTol, "K=%g rates %.3f, %.3f (ln(K/2)=%.3f)", K, rates[0], rates[1], lambda);
        per_K.push_back(rates[0]);
    }
    v.check(per_K[1] > per_K[0] * (1 + kTol), "ordering K=50 over K=10: %.3f > %.3f", per_K[1], per_K[0]);
    return v;
}

Verdict saturation()
{
    constexpr std::size_t N = 4096;
    constexpr int kStates = 1000;
    Verdict v;
    const double dK = 4.5 / N;
    const auto st = ensemble_stats(torus_packet_sampler(TorusGrid(N)), RotatorFloquet(N, 9.95),
                                   RotatorFloquet(N, 9.95 + dK), 150, kStates, kSeed);
    double m = 0, var = 0;
    int count = 0;
    for (std::size_t i = 0; i < st.times.size(); ++i)
        if (st.times[i] >= 100)
        {
            m += st.mean[i];
            var += st.variance[i];
            ++count;
        }
    m /= count;
    var /= count;
    const double r1 = m * N, r2 = var * N * N;
    v.check(r1 > 0.5 && r1 < 2.0, "mean*N %.3f", r1);
    v.check(r2 > 1.0 / 3 && r2 < 3.0, "variance*N^2 %.3f", r2);
    return v;
}

Verdict prepared_state()
{
    constexpr double kKickTol = 1.0;
    constexpr double kRateTol = 0.10;
    constexpr int kTwoS = 1000;
    constexpr int kStates = 100;
    constexpr double kThreshold = 1e-2;
    Verdict v;
    {
        const double K = 3.9, phi = 1.2e-3;
        const LyapunovEstimate le = benettin_lyapunov(ClassicalMap::Top, K, 10000, 1000, kSeed);
        const auto chaotic = [K](SpherePoint p) { return finite_time_lyapunov(K, p, 200) > 0.1; };
        const TopFloquet F0(kTwoS, K), F(kTwoS, K, phi);
        const auto sampler = spin_coherent_sampler(kTwoS, chaotic);
        for (long T : {0L, 2L, 4L, 6L})
        {
            const auto st = ensemble_of(
                sampler, [&](const StateVector& p) { return prepared_echo(p, F0, F, T, 120); }, kStates, kSeed);
            const long tc = threshold_time(mean_series(st), kThreshold);
            const double expect = -std::log(kThreshold) / le.lambda - static_cast<double>(T);
            v.check(std::abs(tc - expect) <= kKickTol, "T=%ld t_c %ld vs %.2f", T, tc, expect);
        }
        v.detail += "; lambda " + std::to_string(le.lambda);
    }
    {
        const double K = 13.1, phi = 5e-4;
        const SpectralFloquet S0(TopFloquet(kTwoS, K)), S(TopFloquet(kTwoS, K, phi));
        const auto times = every(2, 160);
        std::vector<double> rates;
        for (long T : {0L, 5L, 10L, 20L})
        {
            const auto st = ensemble_stats_spectral(spin_coherent_sampler(kTwoS), S0, S, times, kStates, kSeed, T);
            rates.push_back(fit_default(FitKind::Exponential, mean_series(st), kTwoS + 1).rate);
        }
        v.check(spread(rates) < kRateTol, "golden-rule rates %.4f %.4f %.4f %.4f", rates[0], rates[1], rates[2],
                rates[3]);
    }
    return v;
}

Verdict displacement()
{
    constexpr double kPlateauTol = 0.25;
    constexpr double kSpreadTol = 0.10;
    Verdict v;
    {
        constexpr std::size_t N = 16384;
        constexpr int kStates = 200;
        const RotatorFloquet F0(N, 10.09);
        const double nu = TorusGrid(N).coherent_width();
        for (double m : {0.25, 0.5, 1.0, 1.5, 2.5, 3.5})
        {
            const auto st = ensemble_of(
                torus_packet_sampler(TorusGrid(N)),
                [&](const StateVector& p) { return displacement_echo(p, F0, {DisplacementSpec::Kind::Momentum, m}, 60); },
                kStates, kSeed);
            double plateau = 0;
            for (long t = 40; t <= 60; ++t)
                plateau += st.mean[static_cast<std::size_t>(t)] / 21;
            const double PL = kPi * m; // P L / 2 with P = 2 pi m / N and L = N
            const double predicted =
                std::max(std::exp(-std::pow(nu * m, 2) / 2) * std::pow(std::sin(PL) / PL, 2), 1.0 / N);
            v.check(rel(plateau, predicted) < kPlateauTol, "m=%g plateau %.3e vs %.3e", m, plateau, predicted);
        }
    }
    {
        // the largest grid gives the K = 50 decay the longest run before the Ehrenfest time
        constexpr std::size_t N = 262144;
        constexpr int kStates = 100;
        std::vector<double> mean_rate;
        for (double K : {10.0, 50.0})
        {
            const RotatorFloquet F0(N, K);
            std::vector<double> rates;
            for (double m : {10.0, 20.0, 30.0})
            {
                const auto st = ensemble_of(
                    torus_packet_sampler(TorusGrid(N)),
                    [&](const StateVector& p) {
                        return displacement_echo(p, F0, {DisplacementSpec::Kind::Momentum, m}, 16);
                    },
                    kStates, kSeed);
                rates.push_back(fit_default(FitKind::Exponential, mean_series(st), N).rate);
            }
            v.check(spread(rates) < kSpreadTol, "K=%g rates %.3f %.3f %.3f", K, rates[0], rates[1], rates[2]);
            mean_rate.push_back(std::accumulate(rates.begin(), rates.end(), 0.0) / 3);
        }
        v.check(mean_rate[1] > mean_rate[0], "grows with K: %.3f > %.3f", mean_rate[1], mean_rate[0]);
    }
    return v;
}

// Mean purity over product packet states.
EchoSeries purity_mean(std::size_t N1, std::size_t N2, double K1, double K2, double eps, long n_max, int n,
                       std::function<bool(TorusPoint)> accept1 = {})
{
    const auto F = CoupledFloquet::forward(N1, N2, K1, K2, eps);
    const auto st = purity_ensemble(torus_packet_sampler(TorusGrid(N1), 0.0, std::move(accept1)),
                                    torus_packet_sampler(TorusGrid(N2)), F, n_max, n, kSeed);
    return mean_series(st);
}

Verdict purity()
{
    constexpr double kRateTol = 0.25;
    constexpr double kTrackTol = 0.20;
    Verdict v;
    for (std::size_t N2 : {128u, 512u})
    {
        const std::size_t N1 = 64;
        const double eps = 2.0 / std::sqrt(static_cast<double>(N1 * N2));
        const EchoSeries s = purity_mean(N1, N2, 10.09, 10.09, eps, 80, 4);
        double p = 0;
        for (long t = 60; t <= 80; ++t)
            p += s.values[static_cast<std::size_t>(t)] / 21;
        const double expect = 1.0 / N1 + 1.0 / N2;
        v.check(p / expect > 0.5 && p / expect < 2.0, "N2=%zu P(inf) %.4f vs %.4f", N2, p, expect);
    }
    constexpr std::size_t N = 256;
    for (double eN2 : {0.1, 0.2, 0.4})
    {
        const double eps = std::sqrt(eN2) / N;
        const double rate = 2 * predicted_gamma(CoupledInteraction{eps, N, N});
        const long n_max = std::lround(std::log(N / 2.0) / rate) + 10;
        const EchoSeries s = purity_mean(N, N, 50.09, 50.09, eps, n_max, 6);
        const FitResult f = fit_default(FitKind::Exponential, s, N);
        v.check(rel(f.rate, rate) < kRateTol, "(eps N)^2=%g rate %.4f vs %.4f", eN2, f.rate, rate);
    }
    {
        constexpr std::size_t Nc = 512;
        constexpr int kStates = 20;
        const double eps = 4.0 / Nc; // 2 Gamma_2 = 13.8, far above lambda_1
        const double K1 = 5.09;
        const double lambda1 = benettin_lyapunov(ClassicalMap::Standard, K1, 10000, 1000, kSeed).lambda;
        // packets of system 1 start in the chaotic sea, the region the exponent is averaged over
        const auto chaotic = [K1](TorusPoint p) { return finite_time_lyapunov(K1, p, 200) > 0.1; };
        std::vector<double> rates;
        for (double K2 : {10.09, 30.09})
        {
            const EchoSeries s = purity_mean(Nc, Nc, K1, K2, eps, 14, kStates, chaotic);
            const FitResult f = fit_default(FitKind::Exponential, s, Nc);
            rates.push_back(f.rate);
            v.check(rel(f.rate, lambda1) < kTrackTol, "K2=%g rate %.3f vs lambda1 %.3f", K2, f.rate, lambda1);
        }
        v.check(rel(rates[1], rates[0]) < kTrackTol, "K2 independence %.3f vs %.3f", rates[1], rates[0]);
    }
    return v;
}

EchoSeries boltzmann_mean(std::size_t N, double K1, double K2, double dK1, double dK2, double eps,
                          std::span<const long> times)
{
    const auto Hf = CoupledFloquet::forward(N, N, K1, K2, eps);
    const auto Hb = CoupledFloquet::backward(N, N, K1 + dK1, K2 + dK2, eps);
    constexpr int kSystems = 4;
    EchoSeries mean;
    for (int i = 0; i < kSystems; ++i)
    {
        Rng rng(kSeed, 1000 + static_cast<std::uint64_t>(i));
        const StateVector psi1 = torus_packet_sampler(TorusGrid(N))(rng);
        const EchoSeries s =
            boltzmann_echo(psi1, random_state_sampler(Basis::torus(N)), Hf, Hb, times, 6, kSeed + static_cast<std::uint64_t>(i));
        if (mean.values.empty())
            mean = s;
        else
            for (std::size_t t = 0; t < s.size(); ++t)
                mean.values[t] += s.values[t];
    }
    for (auto& x : mean.values)
        x /= kSystems;
    return mean;
}

Verdict boltzmann()
{
    constexpr double kTol = 0.25;
    constexpr double kInvariance = 0.15;
    constexpr std::size_t N = 512;
    Verdict v;
    const auto times = every(1, 24);
    const double dK1 = 3.0 / N;
    const double gs = predicted_gamma(RotatorPerturbation{dK1, N});
    double reference = 0;
    for (double eN : {0.0, 0.5, 0.7})
    {
        const double eps = eN / N;
        const double gu = predicted_gamma(CoupledInteraction{eps, N, N});
        const EchoSeries s = boltzmann_mean(N, 10, 10, dK1, 0, eps, times);
        const FitResult f = fit_default(FitKind::Exponential, s, N);
        v.check(rel(f.rate, gs + 2 * gu) < kTol, "eps N=%g rate %.3f vs %.3f", eN, f.rate, gs + 2 * gu);
        if (eN == 0.5)
            reference = f.rate;
    }
    for (auto [K2, dK2] : {std::pair{5.0, 0.0}, std::pair{20.0, 0.0}, std::pair{10.0, 2.0 / N}})
    {
        const EchoSeries s = boltzmann_mean(N, 10, K2, dK1, dK2, 0.5 / N, times);
        const FitResult f = fit_default(FitKind::Exponential, s, N);
        v.check(rel(f.rate, reference) < kInvariance, "K2=%g dK2*N=%g rate %.3f", K2, dK2 * N, f.rate);
    }
    {
        const double eps = 0.7 / N;
        const double floor = 2 * predicted_gamma(CoupledInteraction{eps, N, N});
        const EchoSeries s = boltzmann_mean(N, 10, 10, 0.0, 0.0, eps, every(1, 40));
        const FitResult f = fit_default(FitKind::Exponential, s, N);
        v.check(rel(f.rate, floor) < kTol, "dK1=0 rate %.3f vs 2 Gamma_U %.3f", f.rate, floor);
    }
    return v;
}

Verdict wigner_identities()
{
    constexpr double kTol = 1e-10;
    constexpr std::size_t N = 64;
    Verdict v;
    const RotatorFloquet F0(N, 9.95), F(N, 10.2);
    const StateVector psi = gaussian_torus(TorusGrid(N), {2.0, 1.0, 0.0});
    const EchoSeries e = loschmidt(psi, F0, F, 20);
    CVec a = psi.vec(), b = psi.vec();
    double norm_err = 0, pure_err = 0, echo_err = 0;
    for (int n = 0; n <= 20; ++n)
    {
        if (n)
        {
            F0.step(a);
            F.step(b);
        }
        const WignerGrid wa = wigner(StateVector(Basis::torus(N), a));
        const WignerGrid wb = wigner(StateVector(Basis::torus(N), b));
        norm_err = std::max({norm_err, std::abs(wa.total() - 1), std::abs(wb.total() - 1)});
        pure_err = std::max(pure_err, std::abs(trace_product(wa, wa) - 1));
        echo_err = std::max(echo_err, std::abs(trace_product(wa, wb) - e.values[static_cast<std::size_t>(n)]));
    }
    v.check(norm_err < kTol, "normalization %.1e", norm_err);
    v.check(pure_err < kTol, "pure rule %.1e", pure_err);
    v.check(echo_err < kTol, "trace product vs echo %.1e", echo_err);
    return v;
}

Verdict regular_decay()
{
    constexpr double kTol = 0.3;
    constexpr int kTwoS = 2000;
    const double K = 1.1, phi = 1.7e-4;
    Verdict v;
    {
        const SpectralFloquet S0(TopFloquet(kTwoS, K)), S(TopFloquet(kTwoS, K, phi));
        std::vector<long> times{0};
        for (double t = 1; t < 3000; t *= 1.1)
            if (std::lround(t) != times.back())
                times.push_back(std::lround(t));
        const auto st = ensemble_stats_spectral(spin_coherent_sampler(kTwoS), S0, S, times, 20, kSeed);
        const FitResult f = fit_power(mean_series(st), {100, 3000});
        v.check(std::abs(f.rate + 1.5) < kTol, "quantum exponent %.3f", f.rate);
    }
    {
        // one Planck cell: the cloud has the width of the spin coherent state, and the
        // counting cells resolve it
        const std::size_t n = 100000;
        const double width = 1.0 / std::sqrt(static_cast<double>(kTwoS));
        const SpherePoint c = sphere_from_angles(1.0, 0.7);
        const PointCloud cloud = sphere_gaussian_cloud(c, width, n, kSeed);
        const double cell = width / 4;
        std::vector<long> t;
        std::vector<double> y;
        PointCloud a = cloud, b = cloud;
        long at = 0;
        for (long s : every(10, 1000, 10))
        {
            a = liouville_propagate(a, ClassicalMap::Top, K, s - at);
            b = liouville_propagate(b, ClassicalMap::Top, K, s - at, phi);
            at = s;
            t.push_back(s);
            y.push_back(classical_fidelity(a, b, cell));
        }
        const FitResult f = fit_power(t, y, {100, 1000});
        v.check(std::abs(f.rate + 1.0) < kTol, "classical exponent %.3f (cell %.4f)", f.rate, cell);
    }
    return v;
}

constexpr int kToyDim = 64;

Verdict spin_toy()
{
    constexpr double kTol = 1e-10;
    constexpr int d = kToyDim;
    Verdict v;
    auto herm = [](std::uint64_t seed, double scale) {
        constexpr int d = kToyDim;
        Rng rng(seed);
        CMat m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                m(i, j) = Cx(rng.normal(), rng.normal());
        return CMat(scale * 0.5 * (m + m.adjoint()) / std::sqrt(static_cast<double>(d)));
    };
    const CMat he = herm(1, 1.0), hu = herm(2, 0.5), hd = herm(3, 0.5);
    const CVec phi0 = random_state(static_cast<std::size_t>(d), 4).vec();
    const Cx alpha(0.6, 0.0), beta(0.0, 0.8);
    const auto tg = every(1, 40);
    std::vector<double> t(tg.begin(), tg.end());
    for (auto& x : t)
        x *= 0.5;
    const SpinToyResult r = spin_dephasing_toy(alpha, beta, he, hu, hd, phi0, t);

    // joint evolution under |up><up| (x) (he + hu) + |down><down| (x) (he + hd), then trace out the environment
    CMat H = CMat::Zero(2 * d, 2 * d);
    H.topLeftCorner(d, d) = he + hu;
    H.bottomRightCorner(d, d) = he + hd;
    CVec psi(2 * d);
    psi.head(d) = alpha * phi0;
    psi.tail(d) = beta * phi0;
    double worst = 0, worst_f = 0;
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        const CVec out = oracle::expm_herm(H, t[i]) * psi;
        const DensityMatrix joint = DensityMatrix::projector(StateVector(Basis::pair(2, d), out));
        const double p = purity(partial_trace(joint, 2, d, 1));
        // f from the off-diagonal element of the reduced spin state
        const Cx off = out.tail(d).dot(out.head(d)) / (alpha * std::conj(beta));
        const double formula = a2 * a2 + b2 * b2 + 2 * a2 * b2 * std::norm(off);
        worst = std::max({worst, std::abs(r.purity[i] - p), std::abs(r.purity[i] - formula)});
        worst_f = std::max(worst_f, std::abs(std::abs(r.fidelity[i]) - std::abs(off)));
    }
    v.check(worst < kTol, "purity vs joint evolution %.1e", worst);
    v.check(worst_f < kTol, "|f| vs joint evolution %.1e", worst_f);
    return v;
}

struct Criterion
{
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all = {
        {"oracle equivalence", 10, oracle_equivalence},
        {"classical Lyapunov", 30, classical_lyapunov},
        {"perturbative Gaussian regime", 300, perturbative_gaussian},
        {"golden-rule regime", 300, golden_rule},
        {"Lyapunov regime", 900, lyapunov_regime},
        {"saturation", 600, saturation},
        {"prepared-state echo", 600, prepared_state},
        {"displacement echo", 900, displacement},
        {"purity", 1200, purity},
        {"Boltzmann echo", 900, boltzmann},
        {"Wigner identities", 10, wigner_identities},
        {"classical vs quantum regular decay", 600, regular_decay},
        {"spin-toy exactness", 10, spin_toy},
    };
    return all;
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i)
        pick.push_back(std::atoi(argv[i]));
    if (pick.empty())
        for (int i = 1; i <= static_cast<int>(criteria().size()); ++i)
            pick.push_back(i);

    int failed = 0;
    for (int id : pick)
    {
        if (id < 1 || id > static_cast<int>(criteria().size()))
        {
            std::printf("C%d FAIL no such criterion\n", id);
            ++failed;
            continue;
        }
        const Criterion& c = criteria()[static_cast<std::size_t>(id - 1)];
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = c.run();
        }
        catch (const std::exception& e)
        {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        v.check(secs < c.budget_s, "%.1f s of %.0f s", secs, c.budget_s);
        std::printf("C%d %s %s: %s\n", id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    return failed ? 1 : 0;
}
