#include "fft.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace echolab
{

namespace
{
std::mutex& planner_mutex()
{
    static std::mutex mu;
    return mu;
}
} // namespace

FftPlan::FftPlan(const std::vector<int>& dims, int sign)
{
    std::size_t total = 1;
    for (int d : dims)
        total *= static_cast<std::size_t>(d);
    // ESTIMATE keeps plan choice, and therefore rounding, identical run to run
    fftw_complex* buf = fftw_alloc_complex(total);
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    require(plan_ != nullptr, ErrorCode::Internal, "FFTW planning failed");
}

FftPlan::~FftPlan()
{
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
}

std::shared_ptr<const FftPlan> FftPlan::get(const std::vector<int>& dims, int sign)
{
    std::mutex& mu = planner_mutex(); // constructed before the cache, so it outlives it
    static std::map<std::pair<std::vector<int>, int>, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dims, sign);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;
    auto plan = std::make_shared<const FftPlan>(dims, sign);
    cache.emplace(std::move(key), plan);
    return plan;
}

void FftPlan::execute(Cx* data) const
{
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan_, p, p);
}

} // namespace echolab
