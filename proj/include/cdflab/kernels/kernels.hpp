#pragma once

// Data-parallel inner loops used by compensator quadrature and the
// goodness-of-fit tests. Each kernel has a scalar reference implementation
// and an AVX2 variant; the public entry points dispatch once at startup to
// the widest variant the CPU supports. Set CDFLAB_ISA=scalar in the
// environment to pin the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace cdflab::kernels
{

enum class Isa
{
    scalar,
    avx2,
};

std::string_view isa_name(Isa isa) noexcept;

// True when this binary carries the AVX2 variant and the CPU runs it.
bool avx2_available() noexcept;

// Variant used by the dispatching entry points below.
Isa active_isa() noexcept;

// Override dispatch (tests, benchmarks). Requesting an unavailable ISA
// falls back to scalar and returns the ISA actually selected.
Isa select_isa(Isa isa) noexcept;

//---------------------------------------------------------------------------//
// Dispatching entry points
//---------------------------------------------------------------------------//

// out[i] = exp(x[i]). Arguments below -708 underflow to 0.
void exp(std::span<const double> x, std::span<double> out);

// out[i] = base + excitation * exp(-decay * elapsed[i]): the intensity of an
// exponential-kernel Hawkes process at several offsets from a state update.
void decay_intensity(double base, double excitation, double decay,
                     std::span<const double> elapsed, std::span<double> out);

// Kolmogorov-Smirnov distance between the empirical CDF of `sorted`
// (ascending, nonnegative) and the unit-mean exponential CDF.
double exponential_ks_statistic(std::span<const double> sorted);

//---------------------------------------------------------------------------//
// Per-ISA implementations, exposed for equivalence testing
//---------------------------------------------------------------------------//

namespace scalar
{
void exp(const double* x, double* out, std::size_t n);
void decay_intensity(double base, double excitation, double decay,
                     const double* elapsed, double* out, std::size_t n);
double exponential_ks_statistic(const double* sorted, std::size_t n);
}  // namespace scalar

namespace avx2
{
// Calling these on a CPU without AVX2/FMA is undefined; check
// avx2_available() first.
void exp(const double* x, double* out, std::size_t n);
void decay_intensity(double base, double excitation, double decay,
                     const double* elapsed, double* out, std::size_t n);
double exponential_ks_statistic(const double* sorted, std::size_t n);
}  // namespace avx2

}  // namespace cdflab::kernels
