#pragma once

#include <vector>

#include "fracheat/grid.hpp"

namespace fracheat {

// Thin FFTW wrapper for the space-time lattice (c2c, row-major
// [Nx (, Nx), Nt], time fastest).  forward() returns normalized coefficients
// c = FFT(f)/Ntot so that backward(c) reproduces f.  Plan creation/destruction
// is serialized internally (FFTW's planner is not thread safe); execution on
// the private buffer is.
class Fft {
public:
    explicit Fft(const SpaceTimeGrid& g);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::vector<cplx> forward(const std::vector<cplx>& values) const;
    std::vector<cplx> backward(const std::vector<cplx>& coeffs) const;

private:
    SpaceTimeGrid grid_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
    mutable std::vector<cplx> buf_;
};

// One-shot helpers.
std::vector<cplx> fft_forward(const Field& f);
Field fft_backward(const SpaceTimeGrid& g, const std::vector<cplx>& coeffs, bool real_flag);

} // namespace fracheat
