// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/volume.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tempreg/field.hpp"

namespace tempreg {

namespace {

// Trilinear sample without the finiteness check; callers validate.
double sample_unchecked(const Volume3& vol, double px, double py, double pz) {
    const int nx = vol.dims.nx, ny = vol.dims.ny, nz = vol.dims.nz;
    if (px < 0.0 || py < 0.0 || pz < 0.0 || px > nx - 1 || py > ny - 1 || pz > nz - 1) {
        return vol.background;
    }
    const int x0 = static_cast<int>(px);
    const int y0 = static_cast<int>(py);
    const int z0 = static_cast<int>(pz);
    const int x1 = std::min(x0 + 1, nx - 1);
    const int y1 = std::min(y0 + 1, ny - 1);
    const int z1 = std::min(z0 + 1, nz - 1);
    const double fx = px - x0, fy = py - y0, fz = pz - z0;
    const double gx = 1.0 - fx, gy = 1.0 - fy, gz = 1.0 - fz;

    const float* d = vol.data.data();
    const std::size_t sx = 1;
    const std::size_t sy = static_cast<std::size_t>(nx);
    const std::size_t sz = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    const std::size_t i000 = x0 * sx + y0 * sy + z0 * sz;
    const std::size_t i100 = x1 * sx + y0 * sy + z0 * sz;
    const std::size_t i010 = x0 * sx + y1 * sy + z0 * sz;
    const std::size_t i110 = x1 * sx + y1 * sy + z0 * sz;
    const std::size_t i001 = x0 * sx + y0 * sy + z1 * sz;
    const std::size_t i101 = x1 * sx + y0 * sy + z1 * sz;
    const std::size_t i011 = x0 * sx + y1 * sy + z1 * sz;
    const std::size_t i111 = x1 * sx + y1 * sy + z1 * sz;

    const double c00 = gx * d[i000] + fx * d[i100];
    const double c10 = gx * d[i010] + fx * d[i110];
    const double c01 = gx * d[i001] + fx * d[i101];
    const double c11 = gx * d[i011] + fx * d[i111];
    const double c0 = gy * c00 + fy * c10;
    const double c1 = gy * c01 + fy * c11;
    return gz * c0 + fz * c1;
}

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[i + radius] = w;
        sum += w;
    }
    for (double& w : k) w /= sum;
    return k;
}

}  // namespace

double trilinear_sample(const Volume3& vol, const Vec3& p) {
    if (!p.finite()) {
        throw DataError("trilinear_sample: non-finite sample coordinate");
    }
    return sample_unchecked(vol, p.x, p.y, p.z);
}

Volume3 warp_volume(const Volume3& moving, const DisplacementField& field) {
    if (!(field.dims == moving.dims)) {
        throw std::invalid_argument("warp_volume: field dims do not match moving volume");
    }
    Volume3 out(moving.dims, moving.spacing, 0.0f, moving.background);
    const float* f = field.data.data();
    std::size_t i = 0;
    for (int z = 0; z < moving.dims.nz; ++z) {
        for (int y = 0; y < moving.dims.ny; ++y) {
            for (int x = 0; x < moving.dims.nx; ++x, ++i) {
                const float dx = f[3 * i], dy = f[3 * i + 1], dz = f[3 * i + 2];
                if (!std::isfinite(dx) || !std::isfinite(dy) || !std::isfinite(dz)) {
                    std::ostringstream msg;
                    msg << "warp_volume: non-finite displacement at voxel (" << x << ", " << y
                        << ", " << z << ")";
                    throw DataError(msg.str());
                }
                out.data[i] = static_cast<float>(
                    sample_unchecked(moving, x + static_cast<double>(dx),
                                     y + static_cast<double>(dy), z + static_cast<double>(dz)));
            }
        }
    }
    return out;
}

LabelMap warp_labels_nn(const LabelMap& labels, const DisplacementField& field) {
    if (!(field.dims == labels.dims)) {
        throw std::invalid_argument("warp_labels_nn: field dims do not match label map");
    }
    LabelMap out(labels.dims, labels.spacing);
    out.label_names = labels.label_names;
    const float* f = field.data.data();
    const int nx = labels.dims.nx, ny = labels.dims.ny, nz = labels.dims.nz;
    std::size_t i = 0;
    for (int z = 0; z < nz; ++z) {
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x, ++i) {
                const double px = x + static_cast<double>(f[3 * i]);
                const double py = y + static_cast<double>(f[3 * i + 1]);
                const double pz = z + static_cast<double>(f[3 * i + 2]);
                const long rx = std::lround(px);
                const long ry = std::lround(py);
                const long rz = std::lround(pz);
                if (rx < 0 || ry < 0 || rz < 0 || rx >= nx || ry >= ny || rz >= nz) {
                    out.data[i] = 0;
                } else {
                    out.data[i] = labels.data[labels.index(static_cast<int>(rx),
                                                           static_cast<int>(ry),
                                                           static_cast<int>(rz))];
                }
            }
        }
    }
    return out;
}

namespace detail {

void gaussian_smooth_inplace(std::vector<float>& data, const Dims3& dims, int channels,
                             double sigma) {
    if (sigma < 0.0) {
        throw std::invalid_argument("gaussian_smooth: negative sigma");
    }
    if (sigma == 0.0) return;

    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int radius = (static_cast<int>(kernel.size()) - 1) / 2;
    const std::size_t cnx = static_cast<std::size_t>(channels) * dims.nx;

    const int axis_n[3] = {dims.nx, dims.ny, dims.nz};
    const std::size_t axis_stride[3] = {static_cast<std::size_t>(channels), cnx,
                                        cnx * static_cast<std::size_t>(dims.ny)};

    std::vector<double> line;
    for (int axis = 0; axis < 3; ++axis) {
        const int n = axis_n[axis];
        if (n == 1) continue;
        const std::size_t stride = axis_stride[axis];
        line.resize(n);

        // Iterate every (line, channel) pair orthogonal to this axis.
        const int on[2] = {axis_n[(axis + 1) % 3], axis_n[(axis + 2) % 3]};
        const std::size_t os[2] = {axis_stride[(axis + 1) % 3], axis_stride[(axis + 2) % 3]};
        for (int b = 0; b < on[1]; ++b) {
            for (int a = 0; a < on[0]; ++a) {
                for (int c = 0; c < channels; ++c) {
                    const std::size_t base = a * os[0] + b * os[1] + c;
                    for (int i = 0; i < n; ++i) line[i] = data[base + i * stride];
                    for (int i = 0; i < n; ++i) {
                        const int lo = std::max(-radius, -i);
                        const int hi = std::min(radius, n - 1 - i);
                        double acc = 0.0;
                        if (lo == -radius && hi == radius) {
                            for (int k = -radius; k <= radius; ++k) {
                                acc += kernel[k + radius] * line[i + k];
                            }
                        } else {
                            double wsum = 0.0;
                            for (int k = lo; k <= hi; ++k) {
                                acc += kernel[k + radius] * line[i + k];
                                wsum += kernel[k + radius];
                            }
                            acc /= wsum;
                        }
                        data[base + i * stride] = static_cast<float>(acc);
                    }
                }
            }
        }
    }
}

}  // namespace detail

Volume3 gaussian_smooth(const Volume3& vol, double sigma) {
    if (sigma < 0.0) {
        throw std::invalid_argument("gaussian_smooth: negative sigma");
    }
    Volume3 out = vol;
    detail::gaussian_smooth_inplace(out.data, out.dims, 1, sigma);
    return out;
}

Volume3 resample_to_isotropic(const Volume3& vol, double target_spacing) {
    if (target_spacing <= 0.0) {
        throw std::invalid_argument("resample_to_isotropic: target spacing must be positive");
    }
    const double ex = vol.dims.nx * vol.spacing.sx;
    const double ey = vol.dims.ny * vol.spacing.sy;
    const double ez = vol.dims.nz * vol.spacing.sz;
    Dims3 nd{static_cast<int>(std::ceil(ex / target_spacing)),
             static_cast<int>(std::ceil(ey / target_spacing)),
             static_cast<int>(std::ceil(ez / target_spacing))};
    Volume3 out(nd, Spacing3{target_spacing, target_spacing, target_spacing}, 0.0f,
                vol.background);
    const double rx = target_spacing / vol.spacing.sx;
    const double ry = target_spacing / vol.spacing.sy;
    const double rz = target_spacing / vol.spacing.sz;
    // The ceil'ed grid can reach past the last sample of the source; those
    // positions clamp to the edge so the covered extent stays filled.
    const double mx = vol.dims.nx - 1, my = vol.dims.ny - 1, mz = vol.dims.nz - 1;
    std::size_t i = 0;
    for (int z = 0; z < nd.nz; ++z) {
        for (int y = 0; y < nd.ny; ++y) {
            for (int x = 0; x < nd.nx; ++x, ++i) {
                out.data[i] = static_cast<float>(sample_unchecked(
                    vol, std::min(x * rx, mx), std::min(y * ry, my), std::min(z * rz, mz)));
            }
        }
    }
    return out;
}

Volume3 downsample_by_two(const Volume3& vol) {
    if (vol.dims.nx < 2 || vol.dims.ny < 2 || vol.dims.nz < 2) {
        throw std::invalid_argument("downsample_by_two: all dims must be >= 2");
    }
    const Volume3 sm = gaussian_smooth(vol, 1.0);
    Dims3 nd{(vol.dims.nx + 1) / 2, (vol.dims.ny + 1) / 2, (vol.dims.nz + 1) / 2};
    Volume3 out(nd,
                Spacing3{vol.spacing.sx * 2.0, vol.spacing.sy * 2.0, vol.spacing.sz * 2.0},
                0.0f, vol.background);
    std::size_t i = 0;
    for (int z = 0; z < nd.nz; ++z) {
        for (int y = 0; y < nd.ny; ++y) {
            for (int x = 0; x < nd.nx; ++x, ++i) {
                out.data[i] = sm.at(2 * x, 2 * y, 2 * z);
            }
        }
    }
    return out;
}

}  // namespace tempreg
