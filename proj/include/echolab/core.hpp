#pragma once
// Shared vocabulary: complex types, error codes, basis labels.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace echolab
{

using Cx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorCode : int
{
    Ok = 0,
    Parse = 1,
    Range = 2,
    UnknownKey = 3,
    Dimension = 4,
    BasisMismatch = 5,
    MissingData = 6,
    Numerical = 7,
    Io = 8,
    Internal = 9,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool ok, ErrorCode code, const char* what)
{
    if (!ok)
        fail(code, what);
}

// Which Hilbert space a vector or matrix lives in.
struct Basis
{
    enum class Kind
    {
        TorusPosition, // n1 = N
        SpinLadder,    // n1 = 2S+1, m = -S..S ascending
        TorusPair,     // n1 x n2, row-major index l1*n2 + l2
        Generic,       // n1 = dim
    };

    Kind kind = Kind::Generic;
    std::size_t n1 = 1;
    std::size_t n2 = 1;

    static Basis torus(std::size_t N) { return {Kind::TorusPosition, N, 1}; }
    static Basis spin(int twoS) { return {Kind::SpinLadder, static_cast<std::size_t>(twoS) + 1, 1}; }
    static Basis pair(std::size_t N1, std::size_t N2) { return {Kind::TorusPair, N1, N2}; }
    static Basis generic(std::size_t d) { return {Kind::Generic, d, 1}; }

    std::size_t dim() const { return kind == Kind::TorusPair ? n1 * n2 : n1; }
    int two_spin() const { return static_cast<int>(n1) - 1; }
    double spin_value() const { return 0.5 * two_spin(); }

    bool operator==(const Basis&) const = default;
};

std::string describe(const Basis& b);

// Wrap an angle into [0, 2pi).
inline double wrap_2pi(double a)
{
    double r = std::fmod(a, kTwoPi);
    if (r < 0)
        r += kTwoPi;
    if (r >= kTwoPi)
        r = 0.0;
    return r;
}

// Wrap an angle into (-pi, pi].
inline double wrap_pi(double a)
{
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi)
        r += kTwoPi;
    return r;
}

const char* version();

} // namespace echolab
