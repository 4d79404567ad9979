#include "nlk/errors.hpp"
#include "nlk/solver.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>

namespace nlk {

namespace {

/// Real-to-complex plans for one line length, with their own aligned buffers.
class LineShifter {
public:
    explicit LineShifter(int n) : n_(n)
    {
        in_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        fwd_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(n, out_, in_, FFTW_ESTIMATE);
        if (!in_ || !out_ || !fwd_ || !bwd_)
            throw Error("FFTW plan creation failed for length " + std::to_string(n));
    }
    LineShifter(const LineShifter&) = delete;
    LineShifter& operator=(const LineShifter&) = delete;
    ~LineShifter()
    {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(in_);
        fftw_free(out_);
    }

    /// line(X) <- line(X + shift_cells * h), periodic, band-limited.
    void shift(double* line, std::size_t stride, double shift_cells)
    {
        for (int i = 0; i < n_; ++i)
            in_[i] = line[i * stride];
        fftw_execute(fwd_);
        const double w = 2.0 * std::numbers::pi * shift_cells / n_;
        for (int k = 0; k <= n_ / 2; ++k) {
            const std::complex<double> c(out_[k][0], out_[k][1]);
            const std::complex<double> r = c * std::polar(1.0 / n_, w * k);
            out_[k][0] = r.real();
            out_[k][1] = r.imag();
        }
        fftw_execute(bwd_);
        for (int i = 0; i < n_; ++i)
            line[i * stride] = in_[i];
    }

private:
    int n_;
    double* in_ = nullptr;
    fftw_complex* out_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

LineShifter& shifter(int n)
{
    thread_local std::map<int, std::unique_ptr<LineShifter>> cache;
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_unique<LineShifter>(n);
    return *slot;
}

struct PlaneLayout {
    std::size_t x_stride;
    std::size_t v_stride;
    int Nx;
    int Nv;
};

PlaneLayout plane(const PhaseGrid& g, int a)
{
    const std::size_t nv = g.v_cells();
    PlaneLayout L{};
    L.Nx = g.Nx();
    L.Nv = g.Nv();
    L.x_stride = (g.d() == 2 && a == 0 ? static_cast<std::size_t>(g.Nx()) : 1) * nv;
    L.v_stride = g.d() == 2 && a == 0 ? static_cast<std::size_t>(g.Nv()) : 1;
    return L;
}

/// f(X, V) <- f(X + alpha V, V) in plane a.
void shear_along_x(Field& F, int a, double alpha)
{
    const PhaseGrid& g = F.grid;
    const PlaneLayout L = plane(g, a);
    LineShifter& sh = shifter(L.Nx);
    for (std::size_t i = 0; i < F.values.size(); ++i) {
        if ((i / L.x_stride) % L.Nx != 0)
            continue;
        const int j = static_cast<int>((i / L.v_stride) % L.Nv);
        const double V = g.v_center(j);
        sh.shift(F.values.data() + i, L.x_stride, alpha * V / g.dx());
    }
}

/// f(X, V) <- f(X, V + beta X) in plane a.
void shear_along_v(Field& F, int a, double beta)
{
    const PhaseGrid& g = F.grid;
    const PlaneLayout L = plane(g, a);
    LineShifter& sh = shifter(L.Nv);
    for (std::size_t i = 0; i < F.values.size(); ++i) {
        if ((i / L.v_stride) % L.Nv != 0)
            continue;
        const int ii = static_cast<int>((i / L.x_stride) % L.Nx);
        const double X = g.x_center(ii);
        sh.shift(F.values.data() + i, L.v_stride, beta * X / g.dv());
    }
}

void rotate_spectral(Field& F, double theta)
{
    const double t = std::tan(0.5 * theta);
    const double s = std::sin(theta);
    for (int a = 0; a < F.grid.d(); ++a) {
        shear_along_x(F, a, -t);
        shear_along_v(F, a, s);
        shear_along_x(F, a, -t);
    }
}

void rotate_bilinear(Field& F, double theta)
{
    const PhaseGrid& g = F.grid;
    const double c = std::cos(theta), s = std::sin(theta);
    for (int a = 0; a < g.d(); ++a) {
        const PlaneLayout L = plane(g, a);
        const std::vector<double> old = F.values;
        for (std::size_t i = 0; i < F.values.size(); ++i) {
            const int ii = static_cast<int>((i / L.x_stride) % L.Nx);
            const int jj = static_cast<int>((i / L.v_stride) % L.Nv);
            const std::size_t base = i - ii * L.x_stride - jj * L.v_stride;
            const double X = g.x_center(ii), V = g.v_center(jj);
            const double X0 = X * c - V * s;
            const double V0 = X * s + V * c;
            const double u = (X0 + g.Lx()) / g.dx() - 0.5;
            const double w = (V0 + g.Lv()) / g.dv() - 0.5;
            const double fu = std::floor(u), fw = std::floor(w);
            const int i0 = static_cast<int>(fu), j0 = static_cast<int>(fw);
            const double au = u - fu, aw = w - fw;
            double acc = 0.0;
            for (int di = 0; di < 2; ++di) {
                const int ic = i0 + di;
                if (ic < 0 || ic >= L.Nx)
                    continue;
                for (int dj = 0; dj < 2; ++dj) {
                    const int jc = j0 + dj;
                    if (jc < 0 || jc >= L.Nv)
                        continue;
                    const double wt = (di ? au : 1.0 - au) * (dj ? aw : 1.0 - aw);
                    acc += wt * old[base + ic * L.x_stride + jc * L.v_stride];
                }
            }
            F.values[i] = acc;
        }
    }
}

} // namespace

void rotate(Field& G, double theta, TransportScheme scheme)
{
    theta = std::remainder(theta, 2.0 * std::numbers::pi);
    if (scheme == TransportScheme::bilinear) {
        rotate_bilinear(G, theta);
        return;
    }
    // shears stay well conditioned for angles up to a quarter turn
    const int parts = std::max(1, static_cast<int>(std::ceil(std::abs(theta) / (0.25 * std::numbers::pi))));
    for (int k = 0; k < parts; ++k)
        rotate_spectral(G, theta / parts);
}

Field step_transport(const Field& G, double dt, TransportScheme scheme)
{
    if (!(dt > 0.0))
        throw ValueError("transport step needs dt > 0");
    Field out = G;
    const double m0 = mass(G);
    rotate(out, 2.0 * dt, scheme);
    clip_and_rescale(out, m0);
    return out;
}

void shear_x(Field& F, double shift_per_v)
{
    for (int a = 0; a < F.grid.d(); ++a)
        shear_along_x(F, a, -shift_per_v);
}

double clip_and_rescale(Field& F, double target_mass)
{
    double neg = 0.0, pos = 0.0;
    for (double& x : F.values) {
        if (x < 0.0) {
            neg -= x;
            x = 0.0;
        } else {
            pos += x;
        }
    }
    const double vol = F.grid.cell_volume();
    if (pos > 0.0 && target_mass > 0.0) {
        const double s = target_mass / (pos * vol);
        for (double& x : F.values)
            x *= s;
    }
    return neg * vol;
}

} // namespace nlk
