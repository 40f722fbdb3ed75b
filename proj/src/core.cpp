#include "echolab/core.hpp"
#include "echolab/parallel.hpp"

#include <cstdlib>
#include <thread>

namespace echolab
{

const char* error_code_name(ErrorCode code)
{
    switch (code)
    {
    case ErrorCode::Ok: return "OK";
    case ErrorCode::Parse: return "E_PARSE";
    case ErrorCode::Range: return "E_RANGE";
    case ErrorCode::UnknownKey: return "E_UNKNOWN_KEY";
    case ErrorCode::Dimension: return "E_DIMENSION";
    case ErrorCode::BasisMismatch: return "E_BASIS";
    case ErrorCode::MissingData: return "E_MISSING_DATA";
    case ErrorCode::Numerical: return "E_NUMERICAL";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Internal: return "E_INTERNAL";
    }
    return "E_INTERNAL";
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

std::string describe(const Basis& b)
{
    switch (b.kind)
    {
    case Basis::Kind::TorusPosition: return "torus(N=" + std::to_string(b.n1) + ")";
    case Basis::Kind::SpinLadder: return "spin(2S=" + std::to_string(b.two_spin()) + ")";
    case Basis::Kind::TorusPair: return "torus_pair(" + std::to_string(b.n1) + "x" + std::to_string(b.n2) + ")";
    case Basis::Kind::Generic: return "generic(" + std::to_string(b.n1) + ")";
    }
    return "?";
}

const char* version()
{
    return "0.1.0";
}

int resolve_jobs(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("ECHOLAB_JOBS"))
    {
        const int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace echolab
