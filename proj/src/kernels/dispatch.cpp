#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cdflab/errors.hpp"
#include "cdflab/kernels/kernels.hpp"

namespace cdflab::kernels
{
namespace
{

bool cpu_has_avx2() noexcept
{
#if defined(CDFLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() noexcept
{
    const char* env = std::getenv("CDFLAB_ISA");
    if (env != nullptr && std::strcmp(env, "scalar") == 0)
        return Isa::scalar;
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

void check_sizes(std::size_t in, std::size_t out)
{
    if (out < in)
        throw ContractViolation("kernel output span shorter than input");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool avx2_available() noexcept
{
    static const bool available = cpu_has_avx2();
    return available;
}

Isa active_isa() noexcept
{
    return current().load(std::memory_order_relaxed);
}

Isa select_isa(Isa isa) noexcept
{
    if (isa == Isa::avx2 && !avx2_available())
        isa = Isa::scalar;
    current().store(isa, std::memory_order_relaxed);
    return isa;
}

#ifdef CDFLAB_HAVE_AVX2
#define CDFLAB_DISPATCH(call)              \
    if (active_isa() == Isa::avx2)         \
        return avx2::call;                 \
    return scalar::call
#else
#define CDFLAB_DISPATCH(call) return scalar::call
#endif

void exp(std::span<const double> x, std::span<double> out)
{
    check_sizes(x.size(), out.size());
    CDFLAB_DISPATCH(exp(x.data(), out.data(), x.size()));
}

void decay_intensity(double base, double excitation, double decay,
                     std::span<const double> elapsed, std::span<double> out)
{
    check_sizes(elapsed.size(), out.size());
    CDFLAB_DISPATCH(decay_intensity(base, excitation, decay, elapsed.data(), out.data(),
                                    elapsed.size()));
}

double exponential_ks_statistic(std::span<const double> sorted)
{
    CDFLAB_DISPATCH(exponential_ks_statistic(sorted.data(), sorted.size()));
}

#undef CDFLAB_DISPATCH

}  // namespace cdflab::kernels
