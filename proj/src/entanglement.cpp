#include "echolab/entanglement.hpp"
#include "echolab/linalg.hpp"
#include "echolab/parallel.hpp"

#include <cmath>

namespace echolab
{

namespace
{
using RowMat = Eigen::Matrix<Cx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double gram_purity(const CMat& g)
{
    // only the lower triangle is filled
    double acc = 0.0;
    for (Eigen::Index j = 0; j < g.cols(); ++j)
    {
        acc += std::norm(g(j, j));
        for (Eigen::Index i = j + 1; i < g.rows(); ++i)
            acc += 2.0 * std::norm(g(i, j));
    }
    return acc;
}
} // namespace

double reduced_purity(const CVec& joint, std::size_t n1, std::size_t n2)
{
    require(static_cast<std::size_t>(joint.size()) == n1 * n2, ErrorCode::Dimension,
            "joint state does not factor as declared");
    const auto r = static_cast<Eigen::Index>(n1);
    const auto c = static_cast<Eigen::Index>(n2);
    Eigen::Map<const RowMat> A(joint.data(), r, c);
    if (r <= c)
    {
        CMat g = CMat::Zero(r, r);
        g.selfadjointView<Eigen::Lower>().rankUpdate(A);
        return gram_purity(g);
    }
    CMat g = CMat::Zero(c, c);
    g.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose());
    return gram_purity(g);
}

DensityMatrix reduced_density(const StateVector& joint, int keep)
{
    require(joint.basis().kind == Basis::Kind::TorusPair, ErrorCode::BasisMismatch,
            "reduced density needs a bipartite state");
    require(keep == 1 || keep == 2, ErrorCode::Range, "keep must be 1 or 2");
    const auto r = static_cast<Eigen::Index>(joint.basis().n1);
    const auto c = static_cast<Eigen::Index>(joint.basis().n2);
    Eigen::Map<const RowMat> A(joint.vec().data(), r, c);
    if (keep == 1)
        return DensityMatrix(Basis::torus(joint.basis().n1), A * A.adjoint());
    // rho_2(j, j') = sum_i A(i, j) conj(A(i, j'))
    return DensityMatrix(Basis::torus(joint.basis().n2), A.transpose() * A.conjugate());
}

PuritySeries purity_series(const StateVector& psi1, const StateVector& psi2, const CoupledFloquet& F, long n_max)
{
    require(psi1.dim() == F.N1() && psi2.dim() == F.N2(), ErrorCode::Dimension,
            "factor states do not match the coupled grid");
    require(n_max >= 0, ErrorCode::Range, "n_max must be non-negative");
    PuritySeries s;
    CVec v = tensor(psi1, psi2).vec();
    for (long n = 0; n <= n_max; ++n)
    {
        if (n > 0)
            F.step(v);
        s.times.push_back(n);
        s.values.push_back(reduced_purity(v, F.N1(), F.N2()));
    }
    s.meta = {{"observable", "purity"}, {"F", F.describe()}};
    return s;
}

EchoEnsembleStats purity_ensemble(const StateSampler& s1, const StateSampler& s2, const CoupledFloquet& F,
                                  long n_max, int n_samples, std::uint64_t seed, int jobs)
{
    require(n_samples >= 2, ErrorCode::Range, "ensemble needs n_samples >= 2");
    std::vector<PuritySeries> runs(static_cast<std::size_t>(n_samples));
    parallel_for(runs.size(), jobs, [&](std::size_t i) {
        Rng rng(seed, i);
        const StateVector a = s1(rng);
        const StateVector b = s2(rng);
        runs[i] = purity_series(a, b, F, n_max);
    });
    EchoEnsembleStats st;
    st.times = runs.front().times;
    st.n_samples = n_samples;
    st.sampling = "seed=" + std::to_string(seed);
    const std::size_t T = st.times.size();
    st.mean.assign(T, 0.0);
    st.variance.assign(T, 0.0);
    for (const auto& r : runs)
        for (std::size_t t = 0; t < T; ++t)
            st.mean[t] += r.values[t] / n_samples;
    for (const auto& r : runs)
        for (std::size_t t = 0; t < T; ++t)
            st.variance[t] += (r.values[t] - st.mean[t]) * (r.values[t] - st.mean[t]) / (n_samples - 1);
    return st;
}

SpinToyResult spin_dephasing_toy(Cx alpha, Cx beta, const CMat& h_env, const CMat& h_up, const CMat& h_down,
                                 const CVec& phi0, std::span<const double> t)
{
    const Eigen::Index d = h_env.rows();
    require(d >= 1 && d <= 512, ErrorCode::Range, "environment dimension must be in [1, 512]");
    for (const CMat* h : {&h_env, &h_up, &h_down})
    {
        require(h->rows() == d && h->cols() == d, ErrorCode::Dimension, "Hamiltonians must be d x d");
        require((*h - h->adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, h->cwiseAbs().maxCoeff()),
                ErrorCode::Range, "Hamiltonians must be Hermitian");
    }
    require(phi0.size() == d, ErrorCode::Dimension, "environment state must have dimension d");
    require(std::abs(std::norm(alpha) + std::norm(beta) - 1.0) < 1e-12, ErrorCode::Range,
            "|alpha|^2 + |beta|^2 must equal 1");
    const HermitianEig up = hermitian_eig(h_env + h_up);
    const HermitianEig down = hermitian_eig(h_env + h_down);
    const CVec cu = up.vectors.adjoint() * phi0;
    const CVec cd = down.vectors.adjoint() * phi0;
    const CMat cross = down.vectors.adjoint() * up.vectors;
    const double a2 = std::norm(alpha), b2 = std::norm(beta);
    SpinToyResult out;
    for (double time : t)
    {
        // f = <phi0| e^{i H_down t} e^{-i H_up t} |phi0>
        CVec u(d), w(d);
        for (Eigen::Index i = 0; i < d; ++i)
        {
            u[i] = cu[i] * std::polar(1.0, -up.values[i] * time);
            w[i] = cd[i] * std::polar(1.0, -down.values[i] * time);
        }
        const Cx f = w.dot(cross * u);
        out.fidelity.push_back(f);
        out.purity.push_back(a2 * a2 + b2 * b2 + 2.0 * a2 * b2 * std::norm(f));
    }
    return out;
}

} // namespace echolab
