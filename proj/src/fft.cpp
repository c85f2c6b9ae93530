#include "fracheat/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace fracheat {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

Fft::Fft(const SpaceTimeGrid& g) : grid_(g), buf_(g.total()) {
    int rank = g.n + 1;
    int dims[3] = {g.Nx, g.Nx, g.Nt};
    if (g.n == 1) {
        dims[0] = g.Nx;
        dims[1] = g.Nt;
    }
    auto* io = reinterpret_cast<fftw_complex*>(buf_.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft(rank, dims, io, io, FFTW_FORWARD, FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft(rank, dims, io, io, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_fwd_ || !plan_bwd_)
        throw numerical_error("Fft: planner failed");
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

std::vector<cplx> Fft::forward(const std::vector<cplx>& values) const {
    if (values.size() != grid_.total())
        throw shape_error("Fft::forward: size mismatch");
    buf_ = values;
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    std::vector<cplx> out = buf_;
    const double inv = 1.0 / static_cast<double>(grid_.total());
    for (auto& c : out) c *= inv;
    return out;
}

std::vector<cplx> Fft::backward(const std::vector<cplx>& coeffs) const {
    if (coeffs.size() != grid_.total())
        throw shape_error("Fft::backward: size mismatch");
    buf_ = coeffs;
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    return buf_;
}

std::vector<cplx> fft_forward(const Field& f) {
    Fft plan(f.grid);
    return plan.forward(f.values);
}

Field fft_backward(const SpaceTimeGrid& g, const std::vector<cplx>& coeffs, bool real_flag) {
    Fft plan(g);
    Field out(g, real_flag);
    out.values = plan.backward(coeffs);
    return out;
}

} // namespace fracheat
