#pragma once
// Dense eigensolvers used by the top engine, LDoS and long-time propagation.

#include "echolab/core.hpp"

namespace echolab
{

struct HermitianEig
{
    RVec values; // ascending
    CMat vectors;
};

HermitianEig hermitian_eig(const CMat& h);

// exp(-i * angle * H) for Hermitian H.
CMat unitary_exp(const CMat& h, double angle);

struct UnitaryEig
{
    RVec phases;  // wrapped to (-pi, pi]
    CMat vectors; // orthonormal columns
    double max_residual = 0.0;
};

// Eigendecomposition of a unitary matrix with orthonormal eigenvectors.
UnitaryEig unitary_eig(const CMat& u);

double unitarity_error(const CMat& u);

} // namespace echolab
