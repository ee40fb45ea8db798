#pragma once

#include <complex>
#include <span>
#include <vector>

namespace phaseslope {

/// One-sided DFT of a real sequence: X[m] = sum_t x[t] exp(-i 2 pi m t / n)
/// for m = 0..floor(n/2). Backed by FFTW; safe to call from several threads.
std::vector<std::complex<double>> dft(std::span<const double> x);

/// Same transform written into `out`, which must hold n/2 + 1 values.
void dft_into(std::span<const double> x, std::span<std::complex<double>> out);

}  // namespace phaseslope
