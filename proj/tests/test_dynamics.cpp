#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "approx.hpp"

#include "echolab/dynamics.hpp"
#include "echolab/rng.hpp"
#include "oracle.hpp"

#include <cmath>

using namespace echolab;

namespace
{
double max_diff(const CVec& a, const CVec& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

double unitarity(const CMat& u)
{
    return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}
} // namespace

TEST_CASE("rotator fast path equals the closed-form matrix")
{
    const RotatorFloquet F(128, 9.95);
    const CMat U = oracle::rotator(128, 9.95);
    CHECK((F.dense() - U).cwiseAbs().maxCoeff() < 1e-12);
    const StateVector psi0 = random_state(Basis::torus(128), 11);
    CVec ref = psi0.vec(), fast = psi0.vec(), back = psi0.vec();
    double worst = 0;
    for (int n = 1; n <= 20; ++n)
    {
        ref = U * ref;
        F.step(fast);
        worst = std::max(worst, max_diff(ref, fast));
    }
    CHECK(worst < 1e-10);
    adjoint_apply_inplace(F, fast, 20);
    CHECK(max_diff(fast, psi0.vec()) < 1e-10);
    apply_inplace(F, back, 10);
    CVec ten = psi0.vec();
    for (int i = 0; i < 10; ++i)
        ten = U * ten;
    CHECK(max_diff(back, ten) < 1e-10);
    // adjoint against the conjugate-transpose oracle
    CVec adj = psi0.vec();
    F.step_adjoint(adj);
    CHECK(max_diff(adj, U.adjoint() * psi0.vec()) < 1e-12);
}

TEST_CASE("apply semantics")
{
    const RotatorFloquet F(64, 5.0);
    const StateVector psi = random_state(Basis::torus(64), 3);
    const StateVector same = apply(F, psi, 0);
    CHECK(same.vec() == psi.vec());
    const StateVector one = apply(F, psi, 1);
    CHECK(std::abs(one.norm() - 1.0) < 1e-12);
    const CMat D = dense_matrix(F);
    for (Eigen::Index l = 0; l < 64; ++l)
    {
        CVec e = CVec::Zero(64);
        e[l] = 1;
        F.step(e);
        CHECK(max_diff(e, D.col(l)) < 1e-12);
    }
    CHECK_THROWS_AS(apply(F, random_state(Basis::torus(32), 1), 1), Error);
    CHECK_THROWS_AS(RotatorFloquet(65, 1.0), Error);
}

TEST_CASE("free rotor is diagonal in momentum")
{
    const std::size_t N = 64;
    const TorusGrid g(N);
    const RotatorFloquet F(N, 0.0);
    for (std::size_t k : {0u, 1u, 5u, 31u})
    {
        const StateVector p = momentum_state(g, k);
        const StateVector q = apply(F, p, 3);
        const Cx c = p.vec().dot(q.vec());
        CHECK(std::abs(c) == approx(1.0).epsilon(1e-12));
        // relative phase between two kicks is exp(-i pi k^2 / N) per period, up to the global gauge
        const StateVector q1 = apply(F, p, 1), q2 = apply(F, p, 2);
        const Cx r = q1.vec().dot(q2.vec());
        const double expect = -kPi * static_cast<double>((k * k) % (2 * N)) / N + kPi / 4;
        CHECK(std::abs(wrap_pi(std::arg(r) - expect)) < 1e-10);
        // adjoint flips the sign of the kinetic phase
        const StateVector a1 = adjoint_apply(F, p, 1);
        CHECK(std::abs(wrap_pi(std::arg(p.vec().dot(a1.vec())) + expect)) < 1e-10);
    }
}

TEST_CASE("dense matrices are unitary")
{
    CHECK(unitarity(RotatorFloquet(2, 3.0).dense()) < 1e-12);
    CHECK(unitarity(RotatorFloquet(256, 9.95).dense()) < 1e-10);
    CHECK(unitarity(TopFloquet(10, 13.1, 0.01).dense()) < 1e-12);
    CHECK(unitarity(TopFloquet(511, 13.1, 0.01).dense()) < 1e-10);
    CHECK_THROWS_AS(dense_matrix(RotatorFloquet(8192, 1.0)), Error);
}

TEST_CASE("kicked top matches the exponential construction")
{
    for (double phi : {0.0, 1e-3})
    {
        const TopFloquet F(100, 13.1, phi);
        const CMat U = oracle::top(100, 13.1, phi);
        CHECK((F.dense() - U).cwiseAbs().maxCoeff() < 1e-10);
        const StateVector psi0 = spin_coherent(100, 1.0, 0.5);
        CVec ref = psi0.vec(), fast = psi0.vec();
        double worst = 0;
        for (int n = 1; n <= 20; ++n)
        {
            ref = U * ref;
            F.step(fast);
            worst = std::max(worst, max_diff(ref, fast));
        }
        CHECK(worst < 1e-10);
        adjoint_apply_inplace(F, fast, 20);
        CHECK(max_diff(fast, psi0.vec()) < 1e-10);
    }
}

TEST_CASE("coupled engine: oracle, reversal and factorization")
{
    const std::size_t N1 = 16, N2 = 16;
    const auto F = CoupledFloquet::forward(N1, N2, 7.0, 9.0, 0.01);
    const CMat U = oracle::coupled(16, 16, 7.0, 9.0, 0.01);
    CHECK((F.dense() - U).cwiseAbs().maxCoeff() < 1e-12);
    const StateVector psi0 = random_state(Basis::pair(N1, N2), 4);
    CVec ref = psi0.vec(), fast = psi0.vec();
    double worst = 0;
    for (int n = 1; n <= 20; ++n)
    {
        ref = U * ref;
        F.step(fast);
        worst = std::max(worst, max_diff(ref, fast));
    }
    CHECK(worst < 1e-10);

    const auto B = CoupledFloquet::backward(N1, N2, 7.3, 9.0, 0.01);
    CHECK((B.dense() - oracle::coupled(16, 16, 7.3, 9.0, 0.01, true)).cwiseAbs().maxCoeff() < 1e-12);

    // no coupling and no kick error: the backward map undoes subsystem 1 exactly
    const auto F0 = CoupledFloquet::forward(N1, N2, 7.0, 9.0, 0.0);
    const auto B0 = CoupledFloquet::backward(N1, N2, 7.0, 9.0, 0.0);
    const StateVector a = random_state(Basis::torus(N1), 1), b = random_state(Basis::torus(N2), 2);
    CVec v = tensor(a, b).vec();
    apply_inplace(F0, v, 5);
    apply_inplace(B0, v, 5);
    const CVec expect = tensor(a, apply(RotatorFloquet(N2, 9.0), b, 10)).vec();
    CHECK(max_diff(v, expect) < 1e-12);

    // factorization at eps = 0
    CVec w = tensor(a, b).vec();
    F0.step(w);
    const CVec w2 = tensor(apply(RotatorFloquet(N1, 7.0), a, 1), apply(RotatorFloquet(N2, 9.0), b, 1)).vec();
    CHECK(max_diff(w, w2) < 1e-12);
    CHECK(std::abs(w.norm() - 1.0) < 1e-12);
}

TEST_CASE("spectral evaluation matches repeated application")
{
    const RotatorFloquet F(128, 9.95);
    const SpectralFloquet S(F);
    CHECK(S.residual() < 1e-10);
    const StateVector psi = random_state(Basis::torus(128), 8);
    CHECK(max_diff(S.apply(psi, 37).vec(), apply(F, psi, 37).vec()) < 1e-9);
    const TopFloquet T(200, 3.9, 0.0);
    const SpectralFloquet ST(T);
    const StateVector s = spin_coherent(200, 0.7, 0.2);
    CHECK(max_diff(ST.apply(s, 50).vec(), apply(T, s, 50).vec()) < 1e-9);
}

TEST_CASE("classical maps")
{
    const TorusPoint p{1.0, 2.0};
    const TorusPoint q = standard_map_step(p, 0.0);
    CHECK(q.p == approx(2.0));
    CHECK(q.x == approx(3.0));
    for (double x : {0.0, kPi})
    {
        const TorusPoint f = standard_map_step({x, 0.0}, 10.0);
        CHECK(std::abs(wrap_pi(f.x - x)) < 1e-12);
        CHECK(std::abs(wrap_pi(f.p)) < 1e-12);
    }
    TorusPoint r{0.3, 0.4};
    bool finite = true, inside = true;
    for (int i = 0; i < 1000000; ++i)
    {
        r = standard_map_step(r, 10.0);
        finite = finite && std::isfinite(r.x) && std::isfinite(r.p);
        inside = inside && r.x >= 0 && r.x < kTwoPi && r.p >= 0 && r.p < kTwoPi;
    }
    CHECK(finite);
    CHECK(inside);

    const SpherePoint s{0.6, 0.0, 0.8};
    const SpherePoint t = top_map_step(s, 0.0);
    CHECK(t.x == approx(0.8));
    CHECK(std::abs(t.y) < 1e-12);
    CHECK(t.z == approx(-0.6));
    SpherePoint u = sphere_from_angles(1.0, 0.3);
    double worst = 0;
    for (int i = 0; i < 100000; ++i)
    {
        u = top_map_step(u, 3.9);
        worst = std::max(worst, std::abs(std::sqrt(u.x * u.x + u.y * u.y + u.z * u.z) - 1.0));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("standard map preserves uniform cell occupancy")
{
    Rng rng(99);
    const int n = 10000, cells = 16;
    std::vector<TorusPoint> pts(n);
    for (auto& p : pts)
        p = {rng.uniform(0, kTwoPi), rng.uniform(0, kTwoPi)};
    for (auto& p : pts)
        for (int s = 0; s < 100; ++s)
            p = standard_map_step(p, 10.0);
    std::vector<int> h(cells * cells, 0);
    for (const auto& p : pts)
        ++h[static_cast<int>(p.x / kTwoPi * cells) * cells + static_cast<int>(p.p / kTwoPi * cells)];
    const double mean = static_cast<double>(n) / (cells * cells);
    int outliers = 0;
    for (int c : h)
        outliers += std::abs(c - mean) > 3 * std::sqrt(mean) ? 1 : 0;
    // 3 sigma: expect about 0.3% of 256 cells outside
    CHECK(outliers <= 3);
}

TEST_CASE("Benettin estimates")
{
    const LyapunovEstimate e = benettin_lyapunov(ClassicalMap::Standard, 10.0, 400, 1000, 5);
    CHECK(e.lambda == approx(std::log(5.0)).epsilon(0.05));
    CHECK(e.stderr_ >= 0);
    const LyapunovEstimate e50 = benettin_lyapunov(ClassicalMap::Standard, 50.0, 200, 1000, 5);
    CHECK(e50.lambda == approx(std::log(25.0)).epsilon(0.05));

    // stderr shrinks as 1/sqrt(n_init)
    const LyapunovEstimate a = benettin_lyapunov(ClassicalMap::Standard, 10.0, 100, 1000, 21);
    const LyapunovEstimate b = benettin_lyapunov(ClassicalMap::Standard, 10.0, 400, 1000, 22);
    CHECK(a.stderr_ / b.stderr_ == approx(2.0).epsilon(0.30));

    const LyapunovEstimate top = benettin_lyapunov(ClassicalMap::Top, 3.9, 200, 1000, 7);
    CHECK(top.lambda == approx(0.42).epsilon(0.15));

    CHECK_THROWS_AS(benettin_lyapunov(ClassicalMap::Standard, 10.0, 0, 1000, 1), Error);
}

TEST_CASE("top exponent agrees with a two-trajectory separation slope")
{
    // Benettin at K = 13.1 against the mean log growth of a 1e-9 separation over 5 kicks
    const double K = 13.1;
    const LyapunovEstimate e = benettin_lyapunov(ClassicalMap::Top, K, 300, 1000, 17);
    Rng rng(5);
    double acc = 0;
    int used = 0;
    for (int i = 0; i < 3000; ++i)
    {
        SpherePoint a = sphere_from_angles(std::acos(rng.uniform(-1, 1)), rng.uniform(0, kTwoPi));
        for (int s = 0; s < 100; ++s)
            a = top_map_step(a, K);
        if (finite_time_lyapunov(K, a, 200) < 0.05)
            continue;
        double th, ph;
        sphere_to_angles(a, th, ph);
        SpherePoint b = sphere_from_angles(th + 1e-9, ph);
        const double d0 = std::hypot(a.x - b.x, std::hypot(a.y - b.y, a.z - b.z));
        for (int s = 0; s < 5; ++s)
        {
            a = top_map_step(a, K);
            b = top_map_step(b, K);
        }
        const double d5 = std::hypot(a.x - b.x, std::hypot(a.y - b.y, a.z - b.z));
        acc += std::log(d5 / d0) / 5;
        ++used;
    }
    REQUIRE(used > 100);
    CHECK(acc / used == approx(e.lambda).epsilon(0.25));
}
