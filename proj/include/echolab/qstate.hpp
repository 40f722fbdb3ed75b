#pragma once
// States and density matrices on the torus lattice and the spin ladder.

#include "echolab/core.hpp"

#include <cstdint>
#include <span>

namespace echolab
{

// Position/momentum lattice with 2*pi/N spacing.
// hbar_eff() is the nominal 1/N scale; phases use the lattice Planck constant 2*pi/N.
class TorusGrid
{
public:
    explicit TorusGrid(std::size_t N);

    std::size_t N() const { return N_; }
    double x(std::size_t l) const { return kTwoPi * static_cast<double>(l) / static_cast<double>(N_); }
    double p(std::size_t l) const { return x(l); }
    double spacing() const { return kTwoPi / static_cast<double>(N_); }
    double hbar_eff() const { return 1.0 / static_cast<double>(N_); }
    double phase_hbar() const { return kTwoPi / static_cast<double>(N_); }
    double coherent_width() const { return std::sqrt(phase_hbar()); }
    Basis basis() const { return Basis::torus(N_); }

private:
    std::size_t N_;
};

class StateVector
{
public:
    StateVector() = default;
    // Takes amplitudes as given; throws if the dimension does not match the basis.
    StateVector(Basis basis, CVec amplitudes);

    // Normalizes first; throws on a zero vector.
    static StateVector normalized(Basis basis, CVec amplitudes);

    const Basis& basis() const { return basis_; }
    std::size_t dim() const { return static_cast<std::size_t>(amp_.size()); }
    const CVec& vec() const { return amp_; }
    CVec& mutable_vec() { return amp_; }
    std::span<const Cx> amplitudes() const { return {amp_.data(), static_cast<std::size_t>(amp_.size())}; }
    double norm() const { return amp_.norm(); }

private:
    Basis basis_{};
    CVec amp_;
};

class DensityMatrix
{
public:
    DensityMatrix() = default;
    DensityMatrix(Basis basis, CMat entries);

    static DensityMatrix projector(const StateVector& psi);

    const Basis& basis() const { return basis_; }
    std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
    const CMat& mat() const { return rho_; }
    Cx trace() const { return rho_.trace(); }
    double hermiticity_error() const;

private:
    Basis basis_{};
    CMat rho_;
};

struct WavepacketSpec
{
    double x0 = 0.0;
    double p0 = 0.0;
    double width = 0.0; // real-space standard width; <= 0 selects the coherent width
};

StateVector gaussian_torus(const TorusGrid& grid, const WavepacketSpec& spec);
StateVector position_state(const TorusGrid& grid, std::size_t l);
StateVector momentum_state(const TorusGrid& grid, std::size_t k);

// |theta, phi> on the 2S+1 ladder, m ascending from -S.
StateVector spin_coherent(int twoS, double theta, double phi);

// Four packets at (x0 +- r0, p0) and (x0, p0 +- p_sep); p_sep = r0 * hbar / width^2.
struct CompassParts
{
    StateVector packets[4]; // east, west, north, south
    double max_overlap = 0.0;
};
CompassParts compass_parts(const TorusGrid& grid, const WavepacketSpec& spec, double r0);
StateVector compass_pure(const TorusGrid& grid, const WavepacketSpec& spec, double r0);
DensityMatrix compass_mixture(const TorusGrid& grid, const WavepacketSpec& spec, double r0);

Cx inner(const StateVector& a, const StateVector& b);
double overlap(const StateVector& a, const StateVector& b);

// keep = 1 traces out the second factor, keep = 2 the first.
DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t n1, std::size_t n2, int keep);
double purity(const DensityMatrix& rho);

StateVector random_state(Basis basis, std::uint64_t seed);
inline StateVector random_state(std::size_t dim, std::uint64_t seed)
{
    return random_state(Basis::generic(dim), seed);
}

StateVector tensor(const StateVector& a, const StateVector& b);

// Spin matrices on the ascending ladder.
CMat spin_x(int twoS);
CMat spin_y(int twoS);
CMat spin_z(int twoS);

} // namespace echolab
