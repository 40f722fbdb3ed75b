#pragma once
// Cached in-place FFTW plans. Planning is serialized; execution is thread-safe
// because every call passes its own buffer through the new-array interface.

#include "echolab/core.hpp"

#include <fftw3.h>

#include <memory>
#include <vector>

namespace echolab
{

class FftPlan
{
public:
    // sign: FFTW_FORWARD (-1) or FFTW_BACKWARD (+1); unnormalized.
    static std::shared_ptr<const FftPlan> get(const std::vector<int>& dims, int sign);

    FftPlan(const std::vector<int>& dims, int sign);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    void execute(Cx* data) const;

private:
    fftw_plan plan_ = nullptr;
};

} // namespace echolab
