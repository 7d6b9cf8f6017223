#include "pdo/detail/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "pdo/error.hpp"

namespace pdo::detail {

namespace {

using Key = std::tuple<std::vector<int>, int, int>;

class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::span<const int> dims, int howmany, int sign) {
        Key key{std::vector<int>(dims.begin(), dims.end()), howmany, sign};
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::size_t total = static_cast<std::size_t>(howmany);
        for (int d : dims) total *= static_cast<std::size_t>(d);
        // FFTW_ESTIMATE never touches the buffer during planning, and
        // FFTW_UNALIGNED lets the plan run on any in-place array later.
        std::vector<std::complex<double>> scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, buf, nullptr,
                                            howmany, 1, buf, nullptr, howmany, 1,
                                            sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                            FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw Error("FFTW could not create a transform plan");
        plans_.emplace(std::move(key), plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void fft_many(std::complex<double>* data, std::span<const int> dims, int howmany, int sign) {
    fftw_plan plan = cache().get(dims, howmany, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace pdo::detail
