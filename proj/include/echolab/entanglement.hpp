#pragma once
// Purity of coupled rotators and the spin-1/2 dephasing toy.

#include "echolab/dynamics.hpp"
#include "echolab/echoes.hpp"
#include "echolab/qstate.hpp"

#include <span>
#include <vector>

namespace echolab
{

struct PuritySeries
{
    std::vector<long> times;
    std::vector<double> values;
    Meta meta;
};

// Tr rho_1^2 from a row-major N1 x N2 amplitude array (contracts over the larger factor).
double reduced_purity(const CVec& joint, std::size_t n1, std::size_t n2);

// keep = 1 returns rho_1 = Tr_2 |psi><psi|, keep = 2 returns rho_2.
DensityMatrix reduced_density(const StateVector& joint, int keep);

PuritySeries purity_series(const StateVector& psi1, const StateVector& psi2, const CoupledFloquet& F, long n_max);

// Purity averaged over product initial states drawn from two samplers.
EchoEnsembleStats purity_ensemble(const StateSampler& s1, const StateSampler& s2, const CoupledFloquet& F,
                                  long n_max, int n_samples, std::uint64_t seed, int jobs = 0);

struct SpinToyResult
{
    std::vector<Cx> fidelity;    // f(t)
    std::vector<double> purity;  // |a|^4 + |b|^4 + 2|a|^2|b|^2 |f|^2
};

SpinToyResult spin_dephasing_toy(Cx alpha, Cx beta, const CMat& h_env, const CMat& h_up, const CMat& h_down,
                                 const CVec& phi0, std::span<const double> t);

} // namespace echolab
