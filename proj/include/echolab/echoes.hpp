#pragma once
// Echo observables: Loschmidt, prepared-state, displacement, Boltzmann,
// compass pure/mixed, threshold times and the response-spectrum transform.

#include "echolab/dynamics.hpp"
#include "echolab/qstate.hpp"
#include "echolab/rng.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace echolab
{

using Meta = std::vector<std::pair<std::string, std::string>>;

struct EchoSeries
{
    std::vector<long> times;
    std::vector<double> values;
    std::vector<Cx> amplitude; // fidelity amplitude, empty when not defined
    Meta meta;

    std::size_t size() const { return times.size(); }
    bool has_amplitude() const { return amplitude.size() == times.size() && !times.empty(); }
};

struct EchoEnsembleStats
{
    std::vector<long> times;
    std::vector<double> mean;
    std::vector<double> variance; // unbiased
    int n_samples = 0;
    std::string sampling;
};

// Draws one initial state from a per-sample random stream.
using StateSampler = std::function<StateVector(Rng&)>;
using EchoKernel = std::function<EchoSeries(const StateVector&)>;

EchoSeries loschmidt(const StateVector& psi0, const Floquet& F0, const Floquet& F, long n_max);
EchoSeries prepared_echo(const StateVector& psi0, const Floquet& F0, const Floquet& F, long T, long n_max);

// Long-time evaluation through eigendecompositions; times may be sparse.
EchoSeries loschmidt_spectral(const StateVector& psi0, const SpectralFloquet& F0, const SpectralFloquet& F,
                              std::span<const long> times, long T = 0);

EchoEnsembleStats ensemble_stats(const StateSampler& sampler, const Floquet& F0, const Floquet& F, long n_max,
                                 int n_samples, std::uint64_t seed, int jobs = 0);
EchoEnsembleStats ensemble_of(const StateSampler& sampler, const EchoKernel& kernel, int n_samples,
                              std::uint64_t seed, int jobs = 0);
// All samples evolved together with matrix products; prepared echo when T > 0.
EchoEnsembleStats ensemble_stats_spectral(const StateSampler& sampler, const SpectralFloquet& F0,
                                          const SpectralFloquet& F, std::span<const long> times, int n_samples,
                                          std::uint64_t seed, long T = 0);

// Samplers. The optional filter screens packet centers (e.g. chaotic-sea selection).
StateSampler torus_packet_sampler(const TorusGrid& grid, double width = 0.0,
                                  std::function<bool(TorusPoint)> accept = {});
StateSampler spin_coherent_sampler(int twoS, std::function<bool(SpherePoint)> accept = {});
StateSampler random_state_sampler(Basis basis);

struct DisplacementSpec
{
    enum class Kind
    {
        Momentum,
        Spatial,
    };
    Kind kind = Kind::Momentum;
    double m = 0.0; // lattice multiple; P (or X) = m * 2 pi / N. Spatial shifts must be integral.
};

// Applies the displacement operator to a torus state in place.
void displace(CVec& psi, const DisplacementSpec& d);

EchoSeries displacement_echo(const StateVector& psi0, const Floquet& F0, const DisplacementSpec& disp, long n_max);

EchoSeries boltzmann_echo(const StateVector& psi1, const StateSampler& env_sampler, const CoupledFloquet& Hf,
                          const CoupledFloquet& Hb, long n_max, int n_env, std::uint64_t seed, int jobs = 0);
EchoSeries boltzmann_echo(const StateVector& psi1, const StateSampler& env_sampler, const CoupledFloquet& Hf,
                          const CoupledFloquet& Hb, std::span<const long> times, int n_env, std::uint64_t seed,
                          int jobs = 0);

struct CompassEcho
{
    EchoSeries pure;
    EchoSeries mixed; // normalized so that the value at t = 0 is 1
    double max_overlap = 0.0;
};

CompassEcho compass_echo(const TorusGrid& grid, const WavepacketSpec& spec, double r0, const Floquet& F0,
                         const Floquet& F, long n_max);

// First time with value <= Mc; last time + 1 when never crossed.
long threshold_time(const EchoSeries& series, double Mc);

// Real response function from the fidelity amplitude, f(-t) = conj f(t).
std::vector<double> response_spectrum(const EchoSeries& series, std::span<const double> omega);

} // namespace echolab
