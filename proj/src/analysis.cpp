#include "echolab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace echolab
{

RegimeParams rotator_regime(double Gamma, double lambda, std::size_t N)
{
    require(N >= 2, ErrorCode::Range, "N must be >= 2");
    RegimeParams rp;
    rp.Gamma = Gamma;
    rp.lambda = lambda;
    rp.N = N;
    rp.B = kTwoPi;
    rp.delta = kTwoPi / static_cast<double>(N);
    rp.tau_E = lambda > 0 ? ehrenfest_time(lambda, static_cast<double>(N)) : 0.0;
    return rp;
}

RegimeParams top_regime(double Gamma, double lambda, int twoS)
{
    require(twoS >= 1, ErrorCode::Range, "spin must be >= 1/2");
    RegimeParams rp;
    rp.Gamma = Gamma;
    rp.lambda = lambda;
    rp.N = static_cast<std::size_t>(twoS) + 1;
    rp.B = kPi / 2.0;
    rp.delta = rp.B / static_cast<double>(twoS);
    rp.tau_E = lambda > 0 ? ehrenfest_time(lambda, static_cast<double>(twoS)) : 0.0;
    return rp;
}

const char* regime_name(Regime r)
{
    switch (r)
    {
    case Regime::Perturbative: return "perturbative";
    case Regime::GoldenRule: return "golden_rule";
    case Regime::LyapunovDominated: return "lyapunov";
    case Regime::StrongPerturbation: return "strong_perturbation";
    }
    return "?";
}

Regime classify_regime(const RegimeParams& rp)
{
    require(rp.Gamma >= 0 && rp.delta > 0 && rp.B > 0 && rp.delta <= rp.B && rp.lambda >= 0, ErrorCode::Range,
            "invalid regime parameters");
    if (rp.Gamma < rp.delta)
        return Regime::Perturbative;
    if (rp.Gamma > rp.B)
        return Regime::StrongPerturbation;
    return rp.Gamma < rp.lambda ? Regime::GoldenRule : Regime::LyapunovDominated;
}

// ---------------------------------------------------------------- LDoS

double LdosHistogram::total() const
{
    double s = 0.0;
    for (double w : weights)
        s += w;
    return s;
}

LdosHistogram ldos(const SpectralFloquet& F0, const SpectralFloquet& F, int bins)
{
    require(F0.basis() == F.basis(), ErrorCode::Dimension, "LDoS needs maps on the same space");
    require(bins >= 8, ErrorCode::Range, "LDoS needs at least 8 bins");
    const auto D = static_cast<Eigen::Index>(F0.basis().dim());
    const CMat ov = F.vectors().adjoint() * F0.vectors();
    LdosHistogram h;
    h.dim = static_cast<std::size_t>(D);
    h.bin_width = kTwoPi / bins;
    h.level_spacing = kTwoPi / static_cast<double>(D);
    h.weights.assign(static_cast<std::size_t>(bins), 0.0);
    for (int b = 0; b < bins; ++b)
        h.centers.push_back(-kPi + (b + 0.5) * h.bin_width);
    const double inv = 1.0 / static_cast<double>(D);
    for (Eigen::Index beta = 0; beta < D; ++beta)
        for (Eigen::Index a = 0; a < D; ++a)
        {
            const double d = wrap_pi(F.phases()[a] - F0.phases()[beta]);
            int b = static_cast<int>(std::floor((d + kPi) / h.bin_width));
            b = std::clamp(b, 0, bins - 1);
            h.weights[static_cast<std::size_t>(b)] += std::norm(ov(a, beta)) * inv;
        }
    return h;
}

LdosHistogram ldos(const Floquet& F0, const Floquet& F, int bins)
{
    require(F0.basis().dim() <= 1024, ErrorCode::Dimension, "LDoS guard: dim must be <= 1024");
    return ldos(SpectralFloquet(F0), SpectralFloquet(F), bins);
}

namespace
{

// CDF of the wrapped Cauchy distribution with HWHM gamma/2, on (-pi, pi], shifted to [0, 1].
double wrapped_cauchy_cdf(double theta, double gamma)
{
    if (theta <= -kPi)
        return 0.0;
    if (theta >= kPi)
        return 1.0;
    const double rho = std::exp(-0.5 * gamma);
    const double k = (1.0 + rho) / (1.0 - rho);
    return 0.5 + std::atan(k * std::tan(0.5 * theta)) / kPi;
}

double misfit(const LdosHistogram& h, double gamma, double total)
{
    double s = 0.0;
    for (std::size_t b = 0; b < h.weights.size(); ++b)
    {
        const double lo = h.centers[b] - 0.5 * h.bin_width;
        const double hi = h.centers[b] + 0.5 * h.bin_width;
        const double m = total * (wrapped_cauchy_cdf(hi, gamma) - wrapped_cauchy_cdf(lo, gamma));
        const double d = h.weights[b] - m;
        s += d * d;
    }
    return s;
}

} // namespace

LorentzianFit lorentzian_fit(const LdosHistogram& h)
{
    double total = 0.0, sq = 0.0;
    for (double w : h.weights)
    {
        require(w >= 0, ErrorCode::Range, "negative LDoS weight");
        total += w;
        sq += w * w;
    }
    require(total > 0, ErrorCode::Range, "LDoS histogram is empty");
    // coarse scan in log(gamma), then golden-section refinement
    const double lo = 1e-6, hi = 40.0;
    const int scan = 400;
    double best_g = lo, best_v = std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i <= scan; ++i)
    {
        const double g = lo * std::pow(hi / lo, static_cast<double>(i) / scan);
        const double v = misfit(h, g, total);
        if (v < best_v)
        {
            best_v = v;
            best_g = g;
            best_i = i;
        }
    }
    double a = std::log(lo) + (std::log(hi) - std::log(lo)) * std::max(0, best_i - 1) / scan;
    double b = std::log(lo) + (std::log(hi) - std::log(lo)) * std::min(scan, best_i + 1) / scan;
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = misfit(h, std::exp(c), total), fd = misfit(h, std::exp(d), total);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it)
    {
        if (fc < fd)
        {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = misfit(h, std::exp(c), total);
        }
        else
        {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = misfit(h, std::exp(d), total);
        }
    }
    const double g = std::exp(0.5 * (a + b));
    if (misfit(h, g, total) <= best_v)
    {
        best_g = g;
        best_v = misfit(h, g, total);
    }
    LorentzianFit fit;
    fit.gamma = best_g;
    fit.residual = sq > 0 ? std::sqrt(best_v / sq) : 0.0;
    fit.converged = fit.residual < 0.25;
    if (best_g < h.bin_width)
    {
        fit.at_floor = true;
        fit.gamma = h.bin_width;
    }
    return fit;
}

double predicted_gamma(const PerturbationModel& m)
{
    return std::visit(
        [](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, RotatorPerturbation>)
            {
                require(p.N >= 2, ErrorCode::Range, "N must be >= 2");
                const double x = p.dK * static_cast<double>(p.N);
                return 0.024 * x * x;
            }
            else if constexpr (std::is_same_v<T, TopPerturbation>)
            {
                require(p.twoS >= 1, ErrorCode::Range, "spin must be >= 1/2");
                const double x = p.phi * 0.5 * p.twoS;
                return 0.84 * x * x;
            }
            else
            {
                require(p.N1 >= 2 && p.N2 >= 2, ErrorCode::Range, "N1, N2 must be >= 2");
                return 0.43 * p.eps * p.eps * static_cast<double>(p.N1) * static_cast<double>(p.N2);
            }
        },
        m);
}

// ---------------------------------------------------------------- reference curves

namespace
{
EchoSeries curve(long n_max, double floor, auto&& fn)
{
    require(n_max >= 0, ErrorCode::Range, "n_max must be non-negative");
    EchoSeries s;
    for (long t = 0; t <= n_max; ++t)
    {
        s.times.push_back(t);
        s.values.push_back(std::max(fn(static_cast<double>(t)), floor));
    }
    return s;
}
} // namespace

EchoSeries reference_curve(const RegimeParams& rp, Regime regime, long n_max)
{
    const double floor = 1.0 / static_cast<double>(rp.N);
    EchoSeries s;
    switch (regime)
    {
    case Regime::Perturbative:
    {
        const double s1 = rp.sigma1 > 0 ? rp.sigma1 : std::sqrt(rp.Gamma * rp.delta / kTwoPi);
        s = curve(n_max, floor, [&](double t) { return std::exp(-s1 * s1 * t * t); });
        break;
    }
    case Regime::GoldenRule: s = curve(n_max, floor, [&](double t) { return std::exp(-rp.Gamma * t); }); break;
    case Regime::LyapunovDominated: s = curve(n_max, floor, [&](double t) { return std::exp(-rp.lambda * t); }); break;
    case Regime::StrongPerturbation: s = curve(n_max, floor, [&](double t) { return std::exp(-rp.B * rp.B * t * t); }); break;
    }
    s.meta = {{"reference", regime_name(regime)}};
    return s;
}

EchoSeries reference_power_curve(double exponent, long n_max, std::size_t N)
{
    EchoSeries s = curve(n_max, 1.0 / static_cast<double>(N),
                         [&](double t) { return t < 1.0 ? 1.0 : std::pow(t, -exponent); });
    s.meta = {{"reference", "power"}};
    return s;
}

EchoSeries reference_purity_curve(double lambda1, double lambda2, double gamma2, std::size_t N1, std::size_t N2,
                                  long n_max)
{
    const double rate = std::min({lambda1, lambda2, 2.0 * gamma2});
    const double sat = 1.0 / static_cast<double>(N1) + 1.0 / static_cast<double>(N2);
    EchoSeries s = curve(n_max, 0.0, [&](double t) { return std::exp(-rate * t) + sat; });
    s.meta = {{"reference", "purity"}};
    return s;
}

// ---------------------------------------------------------------- fits

namespace
{

FitResult linear_fit(FitKind kind, std::span<const long> t, std::span<const double> y, FitWindow w, double floor)
{
    require(t.size() == y.size(), ErrorCode::Dimension, "times and values differ in length");
    require(w.t0 <= w.t1, ErrorCode::Range, "empty fit window");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        if (t[i] < w.t0 || t[i] > w.t1)
            continue;
        require(y[i] > 3.0 * floor && y[i] > 0, ErrorCode::Range, "fit window reaches the saturation floor");
        const double ti = static_cast<double>(t[i]);
        double x = ti;
        if (kind == FitKind::Gaussian)
            x = ti * ti;
        else if (kind == FitKind::Power)
        {
            require(ti > 0, ErrorCode::Range, "power-law fit needs t > 0");
            x = std::log(ti);
        }
        xs.push_back(x);
        ys.push_back(std::log(y[i]));
    }
    const std::size_t n = xs.size();
    require(n >= 4, ErrorCode::Range, "fit window needs at least 4 points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    require(sxx > 0, ErrorCode::Range, "degenerate fit abscissae");
    const double slope = sxy / sxx;
    const double icpt = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double r = ys[i] - (icpt + slope * xs[i]);
        ss += r * r;
    }
    FitResult f;
    f.kind = kind;
    f.window = w;
    f.points = static_cast<int>(n);
    f.offset = icpt;
    f.residual = std::sqrt(ss / n);
    f.r_squared = syy > 0 ? 1.0 - ss / syy : 1.0;
    const double slope_err = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
    switch (kind)
    {
    case FitKind::Exponential:
        f.rate = -slope;
        f.stderr_ = slope_err;
        break;
    case FitKind::Power:
        f.rate = slope;
        f.stderr_ = slope_err;
        break;
    case FitKind::Gaussian:
        f.rate = std::sqrt(std::max(0.0, -slope));
        f.stderr_ = f.rate > 0 ? slope_err / (2.0 * f.rate) : slope_err;
        break;
    }
    return f;
}

} // namespace

FitResult fit_exponential(std::span<const long> t, std::span<const double> y, FitWindow w, double floor)
{
    return linear_fit(FitKind::Exponential, t, y, w, floor);
}

FitResult fit_gaussian(std::span<const long> t, std::span<const double> y, FitWindow w, double floor)
{
    return linear_fit(FitKind::Gaussian, t, y, w, floor);
}

FitResult fit_power(std::span<const long> t, std::span<const double> y, FitWindow w, double floor)
{
    return linear_fit(FitKind::Power, t, y, w, floor);
}

FitResult fit_exponential(const EchoSeries& s, FitWindow w, double floor)
{
    return fit_exponential(s.times, s.values, w, floor);
}

FitResult fit_gaussian(const EchoSeries& s, FitWindow w, double floor)
{
    return fit_gaussian(s.times, s.values, w, floor);
}

FitResult fit_power(const EchoSeries& s, FitWindow w, double floor)
{
    return fit_power(s.times, s.values, w, floor);
}

FitWindow default_fit_window(std::span<const long> t, std::span<const double> y, std::size_t N)
{
    require(!t.empty() && t.size() == y.size(), ErrorCode::MissingData, "empty series");
    const double thr = 5.0 / static_cast<double>(N);
    long sat = t.back();
    for (std::size_t i = 0; i < t.size(); ++i)
        if (y[i] < thr)
        {
            sat = t[i];
            break;
        }
    return {2, sat};
}

const char* fit_kind_name(FitKind k)
{
    switch (k)
    {
    case FitKind::Exponential: return "exponential";
    case FitKind::Gaussian: return "gaussian";
    case FitKind::Power: return "power";
    }
    return "?";
}

std::string to_json(const FitResult& f)
{
    std::ostringstream os;
    os.precision(17);
    os << "{\"kind\":\"" << fit_kind_name(f.kind) << "\",\"rate\":" << f.rate << ",\"offset\":" << f.offset
       << ",\"window\":[" << f.window.t0 << ',' << f.window.t1 << "],\"residual\":" << f.residual << '}';
    return os.str();
}

double ehrenfest_time(double lambda, double log_arg)
{
    require(lambda > 0, ErrorCode::Range, "Ehrenfest time needs lambda > 0");
    require(log_arg >= 2, ErrorCode::Range, "Ehrenfest time needs a log argument >= 2");
    return std::log(log_arg) / lambda;
}

} // namespace echolab
