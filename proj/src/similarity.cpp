// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace tempreg {

namespace {

// In-place box sum along every axis: out(x) = sum of in over the cube of
// half-width `radius` around x, clipped to the domain. Per-line prefix sums
// keep the cost independent of the radius.
void box_sum_inplace(std::vector<double>& buf, const Dims3& dims, int radius) {
    const int axis_n[3] = {dims.nx, dims.ny, dims.nz};
    const std::size_t axis_stride[3] = {
        1, static_cast<std::size_t>(dims.nx),
        static_cast<std::size_t>(dims.nx) * static_cast<std::size_t>(dims.ny)};

    std::vector<double> prefix;
    for (int axis = 0; axis < 3; ++axis) {
        const int n = axis_n[axis];
        const std::size_t stride = axis_stride[axis];
        prefix.resize(n + 1);

        const int on[2] = {axis_n[(axis + 1) % 3], axis_n[(axis + 2) % 3]};
        const std::size_t os[2] = {axis_stride[(axis + 1) % 3], axis_stride[(axis + 2) % 3]};
        for (int b = 0; b < on[1]; ++b) {
            for (int a = 0; a < on[0]; ++a) {
                const std::size_t base = a * os[0] + b * os[1];
                prefix[0] = 0.0;
                for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + buf[base + i * stride];
                for (int i = 0; i < n; ++i) {
                    const int lo = std::max(0, i - radius);
                    const int hi = std::min(n - 1, i + radius);
                    buf[base + i * stride] = prefix[hi + 1] - prefix[lo];
                }
            }
        }
    }
}

inline int axis_count(int i, int n, int radius) {
    return std::min(n - 1, i + radius) - std::max(0, i - radius) + 1;
}

}  // namespace

namespace detail {

double cc_total(const Volume3& fixed, const Volume3& warped, const CcConfig& cfg,
                Volume3* cc_map, std::vector<float>* dtotal_dwarped) {
    cfg.validate();
    if (!(fixed.dims == warped.dims)) {
        throw std::invalid_argument("local_cc: volume dims do not match");
    }
    const Dims3 dims = fixed.dims;
    const std::size_t n = dims.voxel_count();
    const int r = cfg.radius;

    std::vector<double> sf(n), sw(n), sff(n), sww(n), sfw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = fixed.data[i];
        const double w = warped.data[i];
        sf[i] = f;
        sw[i] = w;
        sff[i] = f * f;
        sww[i] = w * w;
        sfw[i] = f * w;
    }
    box_sum_inplace(sf, dims, r);
    box_sum_inplace(sw, dims, r);
    box_sum_inplace(sff, dims, r);
    box_sum_inplace(sww, dims, r);
    box_sum_inplace(sfw, dims, r);

    // Per-window moments. sff/sww/sfw are reused to hold the centered sums
    // B = sum(fbar^2), C = sum(wbar^2), A = sum(fbar*wbar); sf/sw become means.
    std::vector<double> cc(n, 0.0);
    double total = 0.0;
    {
        std::size_t i = 0;
        for (int z = 0; z < dims.nz; ++z) {
            const int cz = axis_count(z, dims.nz, r);
            for (int y = 0; y < dims.ny; ++y) {
                const int cyz = cz * axis_count(y, dims.ny, r);
                for (int x = 0; x < dims.nx; ++x, ++i) {
                    const double cnt = cyz * axis_count(x, dims.nx, r);
                    const double mf = sf[i] / cnt;
                    const double mw = sw[i] / cnt;
                    const double B = sff[i] - sf[i] * mf;
                    const double C = sww[i] - sw[i] * mw;
                    const double A = sfw[i] - sf[i] * mw;
                    sf[i] = mf;
                    sw[i] = mw;
                    sff[i] = B;
                    sww[i] = C;
                    sfw[i] = A;
                    if (B / cnt >= cfg.epsilon && C / cnt >= cfg.epsilon) {
                        double v = (A * A) / (B * C);
                        if (v > 1.0) v = 1.0;
                        cc[i] = v;
                        total += v;
                    }
                }
            }
        }
    }
    total /= static_cast<double>(n);

    if (cc_map) {
        *cc_map = Volume3(dims, fixed.spacing);
        for (std::size_t i = 0; i < n; ++i) cc_map->data[i] = static_cast<float>(cc[i]);
    }

    if (dtotal_dwarped) {
        // dcc(y)/dw(x) = alpha(y) (f(x) - mf(y)) - beta(y) (w(x) - mw(y)) for
        // x in W(y); summing over the windows containing x turns into four
        // more box sums of per-window coefficients.
        std::vector<double> alpha(n, 0.0), alpha_mf(n, 0.0), beta(n, 0.0), beta_mw(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (cc[i] > 0.0) {
                const double A = sfw[i], B = sff[i], C = sww[i];
                const double a = 2.0 * A / (B * C);
                const double b = 2.0 * A * A / (B * C * C);
                alpha[i] = a;
                alpha_mf[i] = a * sf[i];
                beta[i] = b;
                beta_mw[i] = b * sw[i];
            }
        }
        box_sum_inplace(alpha, dims, r);
        box_sum_inplace(alpha_mf, dims, r);
        box_sum_inplace(beta, dims, r);
        box_sum_inplace(beta_mw, dims, r);

        dtotal_dwarped->resize(n);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double f = fixed.data[i];
            const double w = warped.data[i];
            (*dtotal_dwarped)[i] = static_cast<float>(
                inv_n * (f * alpha[i] - alpha_mf[i] - w * beta[i] + beta_mw[i]));
        }
    }
    return total;
}

void scale_by_image_gradient(const Volume3& img, const std::vector<float>& scalar,
                             std::vector<float>& force) {
    const Dims3 dims = img.dims;
    force.resize(dims.voxel_count() * 3);
    const int nx = dims.nx, ny = dims.ny, nz = dims.nz;
    std::size_t i = 0;
    for (int z = 0; z < nz; ++z) {
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x, ++i) {
                const double s = scalar[i];
                const int xl = std::max(x - 1, 0), xh = std::min(x + 1, nx - 1);
                const int yl = std::max(y - 1, 0), yh = std::min(y + 1, ny - 1);
                const int zl = std::max(z - 1, 0), zh = std::min(z + 1, nz - 1);
                const double gx =
                    (img.at(xh, y, z) - img.at(xl, y, z)) / static_cast<double>(xh - xl);
                const double gy =
                    (img.at(x, yh, z) - img.at(x, yl, z)) / static_cast<double>(yh - yl);
                const double gz =
                    (img.at(x, y, zh) - img.at(x, y, zl)) / static_cast<double>(zh - zl);
                force[3 * i] = static_cast<float>(s * gx);
                force[3 * i + 1] = static_cast<float>(s * gy);
                force[3 * i + 2] = static_cast<float>(s * gz);
            }
        }
    }
}

}  // namespace detail

CcResult local_cc(const Volume3& fixed, const Volume3& warped, const CcConfig& cfg) {
    CcResult res;
    res.total = detail::cc_total(fixed, warped, cfg, &res.map, nullptr);
    return res;
}

VelocityField cc_gradient(const Volume3& fixed, const Volume3& moving,
                          const DisplacementField& current_field, const CcConfig& cfg) {
    if (!(fixed.dims == moving.dims)) {
        throw std::invalid_argument("cc_gradient: volume dims do not match");
    }
    const Volume3 warped = warp_volume(moving, current_field);
    std::vector<float> dw;
    detail::cc_total(fixed, warped, cfg, nullptr, &dw);
    VelocityField g(fixed.dims, fixed.spacing);
    detail::scale_by_image_gradient(warped, dw, g.data);
    return g;
}

}  // namespace tempreg
