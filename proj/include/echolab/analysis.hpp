#pragma once
// Energy scales, LDoS widths, regime labels, reference curves and log-linear fits.

#include "echolab/dynamics.hpp"
#include "echolab/echoes.hpp"

#include <string>
#include <variant>
#include <vector>

namespace echolab
{

struct RegimeParams
{
    double Gamma = 0.0;
    double delta = 0.0;  // level spacing
    double B = kTwoPi;   // bandwidth
    double lambda = 0.0;
    std::size_t N = 2;
    double tau_E = 0.0;
    double sigma1 = 0.0; // Gaussian rate for the perturbative curve; 0 derives it from Gamma * delta
};

// Rotator: delta = 2 pi / N, B = 2 pi. Top: B = pi / 2, delta = B / (2S).
RegimeParams rotator_regime(double Gamma, double lambda, std::size_t N);
RegimeParams top_regime(double Gamma, double lambda, int twoS);

enum class Regime
{
    Perturbative,
    GoldenRule,
    LyapunovDominated,
    StrongPerturbation,
};

const char* regime_name(Regime r);
Regime classify_regime(const RegimeParams& rp);

struct LdosHistogram
{
    std::vector<double> centers; // eigenphase difference, (-pi, pi]
    std::vector<double> weights; // sum to 1
    double bin_width = 0.0;
    double level_spacing = 0.0;
    std::size_t dim = 0;

    double total() const;
};

LdosHistogram ldos(const Floquet& F0, const Floquet& F, int bins = 101);
LdosHistogram ldos(const SpectralFloquet& F0, const SpectralFloquet& F, int bins = 101);

struct LorentzianFit
{
    double gamma = 0.0;
    double residual = 0.0; // relative L2 misfit of the bin weights
    bool at_floor = false; // width unresolved; gamma reports the bin width
    bool converged = false;
};

// Width of a Lorentzian with its area fixed to the total weight, integrated over
// each bin and wrapped onto the circle.
LorentzianFit lorentzian_fit(const LdosHistogram& h);

struct RotatorPerturbation
{
    double dK;
    std::size_t N;
};
struct TopPerturbation
{
    double phi;
    int twoS;
};
struct CoupledInteraction
{
    double eps;
    std::size_t N1, N2;
};
using PerturbationModel = std::variant<RotatorPerturbation, TopPerturbation, CoupledInteraction>;

// 0.024 (dK N)^2, 0.84 phi^2 S^2, 0.43 eps^2 N1 N2.
double predicted_gamma(const PerturbationModel& m);

EchoSeries reference_curve(const RegimeParams& rp, Regime regime, long n_max);
// t^(-exponent) for t >= 1, 1 at t = 0, floored at 1/N.
EchoSeries reference_power_curve(double exponent, long n_max, std::size_t N);
// exp(-min(lambda1, lambda2, 2 Gamma2) t) + 1/N1 + 1/N2.
EchoSeries reference_purity_curve(double lambda1, double lambda2, double gamma2, std::size_t N1, std::size_t N2,
                                  long n_max);

enum class FitKind
{
    Exponential,
    Gaussian,
    Power,
};

struct FitWindow
{
    long t0 = 0;
    long t1 = 0;
};

struct FitResult
{
    FitKind kind = FitKind::Exponential;
    double rate = 0.0;   // decay rate, Gaussian width sigma, or power exponent
    double offset = 0.0; // intercept of the log-linear fit
    FitWindow window;
    double residual = 0.0; // RMS of log residuals
    double r_squared = 0.0;
    double stderr_ = 0.0; // standard error of rate
    int points = 0;
};

// ln y = offset - rate * t
FitResult fit_exponential(std::span<const long> t, std::span<const double> y, FitWindow w, double floor = 0.0);
// ln y = offset - (rate * t)^2
FitResult fit_gaussian(std::span<const long> t, std::span<const double> y, FitWindow w, double floor = 0.0);
// ln y = offset + rate * ln t
FitResult fit_power(std::span<const long> t, std::span<const double> y, FitWindow w, double floor = 0.0);

FitResult fit_exponential(const EchoSeries& s, FitWindow w, double floor = 0.0);
FitResult fit_gaussian(const EchoSeries& s, FitWindow w, double floor = 0.0);
FitResult fit_power(const EchoSeries& s, FitWindow w, double floor = 0.0);

// [2, t_sat]: t_sat is the first time the curve falls below 5/N (last time when it never does).
FitWindow default_fit_window(std::span<const long> t, std::span<const double> y, std::size_t N);

std::string to_json(const FitResult& f);
const char* fit_kind_name(FitKind k);

// lambda^-1 ln(log_arg); the log argument defaults to N.
double ehrenfest_time(double lambda, double log_arg);

} // namespace echolab
