#include "echolab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include <algorithm>
#include <vector>

namespace echolab
{

HermitianEig hermitian_eig(const CMat& h)
{
    require(h.rows() == h.cols(), ErrorCode::Dimension, "eigensolver needs a square matrix");
    const auto n = static_cast<lapack_int>(h.rows());
    HermitianEig out;
    out.vectors = h;
    out.values.resize(n);
    if (n == 0)
        return out;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                           reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
                                           out.values.data());
    require(info == 0, ErrorCode::Numerical, "Hermitian eigensolver did not converge");
    return out;
}

CMat unitary_exp(const CMat& h, double angle)
{
    const HermitianEig e = hermitian_eig(h);
    CVec ph(e.values.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i)
        ph[i] = std::exp(Cx(0.0, -angle * e.values[i]));
    return e.vectors * ph.asDiagonal() * e.vectors.adjoint();
}

double unitarity_error(const CMat& u)
{
    return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

UnitaryEig unitary_eig(const CMat& u)
{
    require(u.rows() == u.cols(), ErrorCode::Dimension, "eigensolver needs a square matrix");
    const Eigen::Index n = u.rows();
    // Hermitian part of a rotated copy: eigenvalues cos(theta - c). Pairs mirrored
    // about c come out degenerate; they are split below by rediagonalizing U inside
    // each cluster of close Hermitian eigenvalues.
    const Cx rot = std::exp(Cx(0.0, -0.6180339887498949));
    const CMat a = 0.5 * (rot * u + std::conj(rot) * u.adjoint());
    HermitianEig he = hermitian_eig(a);
    CMat v = std::move(he.vectors);
    CMat w = u * v;

    const double cluster_gap = 1e-5;
    Eigen::Index start = 0;
    while (start < n)
    {
        Eigen::Index end = start + 1;
        while (end < n && he.values[end] - he.values[end - 1] < cluster_gap)
            ++end;
        const Eigen::Index len = end - start;
        if (len > 1)
        {
            const CMat block = v.middleCols(start, len).adjoint() * w.middleCols(start, len);
            Eigen::ComplexSchur<CMat> schur(block);
            const CMat z = schur.matrixU();
            v.middleCols(start, len) = (v.middleCols(start, len) * z).eval();
            w.middleCols(start, len) = (w.middleCols(start, len) * z).eval();
        }
        start = end;
    }

    UnitaryEig out;
    out.phases.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const Cx lam = v.col(i).dot(w.col(i));
        out.phases[i] = wrap_pi(std::arg(lam));
        const Cx unit = std::polar(1.0, out.phases[i]);
        out.max_residual = std::max(out.max_residual, (w.col(i) - unit * v.col(i)).norm());
    }
    out.vectors = std::move(v);
    return out;
}

} // namespace echolab
