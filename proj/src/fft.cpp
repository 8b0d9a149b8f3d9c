#include "fft.hpp"

#include <map>
#include <mutex>
#include <utility>

#include <fftw3.h>

namespace mtm::detail {
namespace {

// Plans are created once per (size, direction) and reused through the
// new-array execute interface, which is thread safe. Planning is not.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        auto* in = fftw_alloc_complex(n);
        auto* out = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(in);
        fftw_free(out);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

void execute(const CVec& in, CVec& out, int sign) {
    const int n = static_cast<int>(in.size());
    out.resize(n);
    fftw_plan plan = cache().get(n, sign);
    // FFTW never writes through the input pointer of an out-of-place plan.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    if (src == dst) {
        CVec copy = in;
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(copy.data()), dst);
        return;
    }
    fftw_execute_dft(plan, src, dst);
}

}  // namespace

void fft_forward(const CVec& in, CVec& out) { execute(in, out, FFTW_FORWARD); }

void fft_inverse(const CVec& in, CVec& out) {
    execute(in, out, FFTW_BACKWARD);
    out /= static_cast<double>(in.size());
}

}  // namespace mtm::detail
