#pragma once
// Floquet engines for the kicked rotator, kicked top and coupled rotators,
// their classical maps, and Benettin Lyapunov estimation.

#include "echolab/core.hpp"
#include "echolab/linalg.hpp"
#include "echolab/qstate.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace echolab
{

class FftPlan;

// One period of a kicked system. Implementations are immutable after
// construction and can be shared by concurrent workers.
class Floquet
{
public:
    virtual ~Floquet() = default;
    virtual Basis basis() const = 0;
    virtual void step(CVec& psi) const = 0;
    virtual void step_adjoint(CVec& psi) const = 0;
    // Explicit matrix from the closed-form elements (oracle use).
    virtual CMat dense() const = 0;
    virtual std::string describe() const = 0;
};

StateVector apply(const Floquet& F, const StateVector& psi, long n);
StateVector adjoint_apply(const Floquet& F, const StateVector& psi, long n);
void apply_inplace(const Floquet& F, CVec& psi, long n);
void adjoint_apply_inplace(const Floquet& F, CVec& psi, long n);
// Guarded at dim 4096.
CMat dense_matrix(const Floquet& F);

// F = exp(-i p^2 / 2hbar) exp(-i K cos x / hbar) with hbar = 2 pi / N, N even.
class RotatorFloquet final : public Floquet
{
public:
    RotatorFloquet(std::size_t N, double K);
    ~RotatorFloquet() override;

    Basis basis() const override { return Basis::torus(N_); }
    void step(CVec& psi) const override;
    void step_adjoint(CVec& psi) const override;
    CMat dense() const override;
    std::string describe() const override;

    std::size_t N() const { return N_; }
    double K() const { return K_; }

private:
    std::size_t N_;
    double K_;
    CVec kick_;
    CVec kin_; // includes the gauge factor and the 1/N of the inverse transform
    std::shared_ptr<const FftPlan> fwd_, inv_;
};

// F = exp(-i phi S_x) exp(-i K/(2S) S_z^2) exp(-i pi/2 S_y).
class TopFloquet final : public Floquet
{
public:
    TopFloquet(int twoS, double K, double phi = 0.0);

    Basis basis() const override { return Basis::spin(twoS_); }
    void step(CVec& psi) const override;
    void step_adjoint(CVec& psi) const override;
    CMat dense() const override;
    std::string describe() const override;

    int two_spin() const { return twoS_; }
    double K() const { return K_; }
    double phi() const { return phi_; }

private:
    int twoS_;
    double K_;
    double phi_;
    CMat turn_;  // exp(-i pi/2 S_y)
    CVec twist_; // exp(-i K/(2S) m^2)
    CMat pert_;  // exp(-i phi S_x), empty when phi == 0
};

// Two rotators on an N1 x N2 grid coupled by eps*sqrt(N1 N2)*sin(x1 - x2 - 0.33).
// forward():  exp(-i T1 - i T2) exp(-i V1 - i V2 - i U)
// backward(): subsystem 1 runs the exact adjoint of its own Floquet map (kick K1),
//             subsystem 2 and the coupling run forward.
class CoupledFloquet final : public Floquet
{
public:
    static CoupledFloquet forward(std::size_t N1, std::size_t N2, double K1, double K2, double eps);
    static CoupledFloquet backward(std::size_t N1, std::size_t N2, double K1, double K2, double eps);
    ~CoupledFloquet() override;
    CoupledFloquet(const CoupledFloquet&);
    CoupledFloquet(CoupledFloquet&&) noexcept;

    Basis basis() const override { return Basis::pair(N1_, N2_); }
    void step(CVec& psi) const override;
    void step_adjoint(CVec& psi) const override;
    CMat dense() const override;
    std::string describe() const override;

    std::size_t N1() const { return N1_; }
    std::size_t N2() const { return N2_; }
    double K1() const { return K1_; }
    double K2() const { return K2_; }
    double eps() const { return eps_; }
    bool reversed() const { return reversed_; }

private:
    CoupledFloquet(std::size_t N1, std::size_t N2, double K1, double K2, double eps, bool reversed);

    std::size_t N1_, N2_;
    double K1_, K2_, eps_;
    bool reversed_;
    CVec pre_;  // diagonal phase before the kinetic factor
    CVec post_; // diagonal phase after it (reversed subsystem-1 kick), empty when forward
    CVec kin_;
    std::shared_ptr<const FftPlan> fwd_, inv_;
};

// Eigendecomposition of a Floquet map for O(dim^2) evaluation at any time.
class SpectralFloquet
{
public:
    explicit SpectralFloquet(const Floquet& F);
    explicit SpectralFloquet(const CMat& unitary, Basis basis);

    const Basis& basis() const { return basis_; }
    const RVec& phases() const { return eig_.phases; }
    const CMat& vectors() const { return eig_.vectors; }
    double residual() const { return eig_.max_residual; }

    StateVector apply(const StateVector& psi, long n) const;
    // Coefficients in the eigenbasis.
    CVec project(const StateVector& psi) const;

private:
    Basis basis_;
    UnitaryEig eig_;
};

// Classical counterparts.
struct TorusPoint
{
    double x = 0.0;
    double p = 0.0;
};

struct SpherePoint
{
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;
};

enum class ClassicalMap
{
    Standard,
    Top,
};

TorusPoint standard_map_step(TorusPoint pt, double K);
// The top map followed, if phi != 0, by a rotation by phi about the x axis.
SpherePoint top_map_step(SpherePoint pt, double K, double phi = 0.0);

// Tangent-space versions (tangent vector updated in place, not normalized).
TorusPoint standard_map_tangent(TorusPoint pt, double K, double& dx, double& dp);
SpherePoint top_map_tangent(SpherePoint pt, double K, double t[3]);

SpherePoint sphere_from_angles(double theta, double phi);
void sphere_to_angles(const SpherePoint& s, double& theta, double& phi);

struct LyapunovEstimate
{
    double lambda = 0.0;
    double stderr_ = 0.0;
    int n_init = 0;
    int n_steps = 0;
    int transient = 0;
    int redraws = 0;
};

struct BenettinOptions
{
    int transient = 100;
    int screen_steps = 200;
    double screen_min = 0.05;
    int max_redraws = 10000;
    int jobs = 0;
};

LyapunovEstimate benettin_lyapunov(ClassicalMap map, double K, int n_init, int n_steps, std::uint64_t seed,
                                   const BenettinOptions& opts = {});

// Finite-time exponent of a single orbit (no transient), used for chaotic-sea screening.
double finite_time_lyapunov(double K, TorusPoint start, int steps);
double finite_time_lyapunov(double K, SpherePoint start, int steps);

} // namespace echolab
