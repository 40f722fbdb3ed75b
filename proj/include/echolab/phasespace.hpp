#pragma once
// Discrete Wigner functions on the doubled torus lattice, classical point
// clouds and the classical fidelity.

#include "echolab/dynamics.hpp"
#include "echolab/qstate.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace echolab
{

// values[a * 2N + b] at q = a*pi/N, p = b*pi/N, as a density: cell_area() * sum = 1.
struct WignerGrid
{
    std::size_t N = 0;
    std::vector<double> values;
    double max_imag = 0.0; // largest imaginary residue before it was discarded

    std::size_t side() const { return 2 * N; }
    double step() const { return kPi / static_cast<double>(N); }
    double cell_area() const { return step() * step(); }
    double at(std::size_t a, std::size_t b) const { return values[a * side() + b]; }
    double total() const; // cell_area * sum
};

WignerGrid wigner(const StateVector& psi);
WignerGrid wigner(const DensityMatrix& rho);

// Tr[rho_a rho_b] from the Wigner grids: (2 pi hbar / 4) * cell_area * sum Wa Wb, hbar = 2 pi / N.
double trace_product(const WignerGrid& wa, const WignerGrid& wb);

// cell_area * row/column sums; entry 2l (2k) is the position (momentum) probability, odd entries vanish.
std::vector<double> position_marginal(const WignerGrid& w);
std::vector<double> momentum_marginal(const WignerGrid& w);

void write_wigner_csv(const WignerGrid& w, std::ostream& os);

struct PointCloud
{
    enum class Space
    {
        Torus,
        Sphere,
    };
    Space space = Space::Torus;
    std::vector<TorusPoint> torus;
    std::vector<SpherePoint> sphere;

    std::size_t size() const { return space == Space::Torus ? torus.size() : sphere.size(); }
};

PointCloud torus_gaussian_cloud(TorusPoint center, double sigma, std::size_t n, std::uint64_t seed);
PointCloud sphere_gaussian_cloud(SpherePoint center, double sigma, std::size_t n, std::uint64_t seed);
PointCloud uniform_torus_cloud(std::size_t n, std::uint64_t seed);

// n map iterations per point; phi is the top's x-rotation perturbation (ignored on the torus).
PointCloud liouville_propagate(const PointCloud& cloud, ClassicalMap map, double K, long n, double phi = 0.0);

// Histogram overlap on square cells of side `cell`; sphere points are binned in (azimuth, z).
double classical_fidelity(const PointCloud& a, const PointCloud& b, double cell);
double default_fidelity_cell(std::size_t n_points);

} // namespace echolab
