// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tempreg {

namespace {

inline double clampd(double v, double lo, double hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

// Clamped trilinear sample over interleaved 3-channel data.
inline void sample3_clamped(const float* data, const Dims3& dims, double px, double py,
                            double pz, double out[3]) {
    const int nx = dims.nx, ny = dims.ny, nz = dims.nz;
    px = clampd(px, 0.0, nx - 1);
    py = clampd(py, 0.0, ny - 1);
    pz = clampd(pz, 0.0, nz - 1);
    const int x0 = static_cast<int>(px);
    const int y0 = static_cast<int>(py);
    const int z0 = static_cast<int>(pz);
    const int x1 = std::min(x0 + 1, nx - 1);
    const int y1 = std::min(y0 + 1, ny - 1);
    const int z1 = std::min(z0 + 1, nz - 1);
    const double fx = px - x0, fy = py - y0, fz = pz - z0;
    const double gx = 1.0 - fx, gy = 1.0 - fy, gz = 1.0 - fz;

    const std::size_t sy = 3 * static_cast<std::size_t>(nx);
    const std::size_t sz = sy * static_cast<std::size_t>(ny);
    const std::size_t i000 = 3 * static_cast<std::size_t>(x0) + y0 * sy + z0 * sz;
    const std::size_t i100 = 3 * static_cast<std::size_t>(x1) + y0 * sy + z0 * sz;
    const std::size_t i010 = 3 * static_cast<std::size_t>(x0) + y1 * sy + z0 * sz;
    const std::size_t i110 = 3 * static_cast<std::size_t>(x1) + y1 * sy + z0 * sz;
    const std::size_t i001 = 3 * static_cast<std::size_t>(x0) + y0 * sy + z1 * sz;
    const std::size_t i101 = 3 * static_cast<std::size_t>(x1) + y0 * sy + z1 * sz;
    const std::size_t i011 = 3 * static_cast<std::size_t>(x0) + y1 * sy + z1 * sz;
    const std::size_t i111 = 3 * static_cast<std::size_t>(x1) + y1 * sy + z1 * sz;

    for (int c = 0; c < 3; ++c) {
        const double c00 = gx * data[i000 + c] + fx * data[i100 + c];
        const double c10 = gx * data[i010 + c] + fx * data[i110 + c];
        const double c01 = gx * data[i001 + c] + fx * data[i101 + c];
        const double c11 = gx * data[i011 + c] + fx * data[i111 + c];
        const double c0 = gy * c00 + fy * c10;
        const double c1 = gy * c01 + fy * c11;
        out[c] = gz * c0 + fz * c1;
    }
}

// r(x) = inner(x) + outer(x + inner(x)), written into out (may alias neither input).
void compose_into(const float* outer, const float* inner, const Dims3& dims, float* out) {
    std::size_t i = 0;
    double s[3];
    for (int z = 0; z < dims.nz; ++z) {
        for (int y = 0; y < dims.ny; ++y) {
            for (int x = 0; x < dims.nx; ++x, i += 3) {
                const double ix = inner[i], iy = inner[i + 1], iz = inner[i + 2];
                sample3_clamped(outer, dims, x + ix, y + iy, z + iz, s);
                out[i] = static_cast<float>(ix + s[0]);
                out[i + 1] = static_cast<float>(iy + s[1]);
                out[i + 2] = static_cast<float>(iz + s[2]);
            }
        }
    }
}

void require_finite(const std::vector<float>& data, const char* who) {
    for (const float v : data) {
        if (!std::isfinite(v)) {
            throw DataError(std::string(who) + ": field contains non-finite components");
        }
    }
}

}  // namespace

template <class Tag>
Vec3 sample_field_clamped(const Field3<Tag>& f, const Vec3& p) {
    double s[3];
    sample3_clamped(f.data.data(), f.dims, p.x, p.y, p.z, s);
    return {s[0], s[1], s[2]};
}

template <class Tag>
double max_magnitude(const Field3<Tag>& f) {
    double best = 0.0;
    for (std::size_t i = 0; i + 2 < f.data.size(); i += 3) {
        const double m = static_cast<double>(f.data[i]) * f.data[i] +
                         static_cast<double>(f.data[i + 1]) * f.data[i + 1] +
                         static_cast<double>(f.data[i + 2]) * f.data[i + 2];
        if (m > best) best = m;
    }
    return std::sqrt(best);
}

template <class Tag>
Field3<Tag> negated(const Field3<Tag>& f) {
    Field3<Tag> out = f;
    for (float& v : out.data) v = -v;
    return out;
}

template <class Tag>
double field_sq_norm(const Field3<Tag>& f) {
    if (f.data.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 2 < f.data.size(); i += 3) {
        acc += static_cast<double>(f.data[i]) * f.data[i] +
               static_cast<double>(f.data[i + 1]) * f.data[i + 1] +
               static_cast<double>(f.data[i + 2]) * f.data[i + 2];
    }
    return acc / static_cast<double>(f.dims.voxel_count());
}

template <class Tag>
Field3<Tag> smooth_field(const Field3<Tag>& f, double sigma) {
    if (sigma < 0.0) {
        throw std::invalid_argument("smooth_field: negative sigma");
    }
    Field3<Tag> out = f;
    detail::gaussian_smooth_inplace(out.data, out.dims, 3, sigma);
    return out;
}

template <class Tag>
Field3<Tag> resample_field(const Field3<Tag>& f, Dims3 new_dims, Spacing3 new_spacing) {
    Field3<Tag> out(new_dims, new_spacing);
    // Positions correspond through physical coordinates; component values are
    // rescaled so the physical displacement is preserved across voxel sizes.
    const double px = new_spacing.sx / f.spacing.sx;
    const double py = new_spacing.sy / f.spacing.sy;
    const double pz = new_spacing.sz / f.spacing.sz;
    double s[3];
    std::size_t i = 0;
    for (int z = 0; z < new_dims.nz; ++z) {
        for (int y = 0; y < new_dims.ny; ++y) {
            for (int x = 0; x < new_dims.nx; ++x, i += 3) {
                sample3_clamped(f.data.data(), f.dims, x * px, y * py, z * pz, s);
                out.data[i] = static_cast<float>(s[0] / px);
                out.data[i + 1] = static_cast<float>(s[1] / py);
                out.data[i + 2] = static_cast<float>(s[2] / pz);
            }
        }
    }
    return out;
}

int recommended_exp_steps(const VelocityField& v) {
    const double m = max_magnitude(v);
    int n = 4;
    while (n < 24 && m / std::exp2(n) >= 0.5) ++n;
    return n;
}

DisplacementField exp_velocity(const VelocityField& v, int n_steps) {
    if (n_steps < 1) {
        throw std::invalid_argument("exp_velocity: n_steps must be >= 1");
    }
    require_finite(v.data, "exp_velocity");
    DisplacementField d(v.dims, v.spacing);
    const double scale = 1.0 / std::exp2(n_steps);
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        d.data[i] = static_cast<float>(v.data[i] * scale);
    }
    std::vector<float> tmp(d.data.size());
    for (int s = 0; s < n_steps; ++s) {
        compose_into(d.data.data(), d.data.data(), d.dims, tmp.data());
        d.data.swap(tmp);
    }
    return d;
}

DisplacementField exp_velocity(const VelocityField& v) {
    return exp_velocity(v, recommended_exp_steps(v));
}

DisplacementField compose(const DisplacementField& outer, const DisplacementField& inner) {
    if (!(outer.dims == inner.dims)) {
        throw std::invalid_argument("compose: field dims do not match");
    }
    DisplacementField out(inner.dims, inner.spacing);
    compose_into(outer.data.data(), inner.data.data(), inner.dims, out.data.data());
    return out;
}

DisplacementField invert(const DisplacementField& d, int iters, double tol) {
    DisplacementField inv(d.dims, d.spacing);
    std::vector<float> next(inv.data.size());
    double worst = 0.0;
    for (int it = 0; it < iters; ++it) {
        worst = 0.0;
        std::size_t i = 0;
        double s[3];
        for (int z = 0; z < d.dims.nz; ++z) {
            for (int y = 0; y < d.dims.ny; ++y) {
                for (int x = 0; x < d.dims.nx; ++x, i += 3) {
                    sample3_clamped(d.data.data(), d.dims, x + inv.data[i],
                                    y + inv.data[i + 1], z + inv.data[i + 2], s);
                    next[i] = static_cast<float>(-s[0]);
                    next[i + 1] = static_cast<float>(-s[1]);
                    next[i + 2] = static_cast<float>(-s[2]);
                    const double ux = next[i] - inv.data[i];
                    const double uy = next[i + 1] - inv.data[i + 1];
                    const double uz = next[i + 2] - inv.data[i + 2];
                    const double u = ux * ux + uy * uy + uz * uz;
                    if (u > worst) worst = u;
                }
            }
        }
        inv.data.swap(next);
        if (std::sqrt(worst) < tol) return inv;
    }
    std::ostringstream msg;
    msg << "invert: fixed point did not converge, residual " << std::sqrt(worst)
        << " voxels after " << iters << " iterations";
    throw ConvergenceError(msg.str(), std::sqrt(worst));
}

Volume3 jacobian_determinant(const DisplacementField& d) {
    if (d.dims.nx < 2 || d.dims.ny < 2 || d.dims.nz < 2) {
        throw std::invalid_argument("jacobian_determinant: dims must be >= 2 per axis");
    }
    Volume3 out(d.dims, d.spacing);
    const int nx = d.dims.nx, ny = d.dims.ny, nz = d.dims.nz;
    std::size_t i = 0;
    for (int z = 0; z < nz; ++z) {
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x, ++i) {
                // J[r][c] = d(map_r)/d(x_c) with map(x) = x + d(x).
                double J[3][3];
                for (int c = 0; c < 3; ++c) {
                    int lo[3] = {x, y, z};
                    int hi[3] = {x, y, z};
                    const int n = c == 0 ? nx : (c == 1 ? ny : nz);
                    const int pos = c == 0 ? x : (c == 1 ? y : z);
                    if (pos > 0) --lo[c];
                    if (pos < n - 1) ++hi[c];
                    const double h = hi[c] - lo[c];
                    const Vec3 a = d.at(hi[0], hi[1], hi[2]);
                    const Vec3 b = d.at(lo[0], lo[1], lo[2]);
                    J[0][c] = (a.x - b.x) / h + (c == 0 ? 1.0 : 0.0);
                    J[1][c] = (a.y - b.y) / h + (c == 1 ? 1.0 : 0.0);
                    J[2][c] = (a.z - b.z) / h + (c == 2 ? 1.0 : 0.0);
                }
                const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                                   J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                                   J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
                out.data[i] = static_cast<float>(det);
            }
        }
    }
    return out;
}

double min_jacobian_determinant(const DisplacementField& d) {
    const Volume3 j = jacobian_determinant(d);
    return *std::min_element(j.data.begin(), j.data.end());
}

template Vec3 sample_field_clamped<VelocityTag>(const VelocityField&, const Vec3&);
template Vec3 sample_field_clamped<DisplacementTag>(const DisplacementField&, const Vec3&);
template double max_magnitude<VelocityTag>(const VelocityField&);
template double max_magnitude<DisplacementTag>(const DisplacementField&);
template VelocityField negated<VelocityTag>(const VelocityField&);
template DisplacementField negated<DisplacementTag>(const DisplacementField&);
template double field_sq_norm<VelocityTag>(const VelocityField&);
template double field_sq_norm<DisplacementTag>(const DisplacementField&);
template VelocityField smooth_field<VelocityTag>(const VelocityField&, double);
template DisplacementField smooth_field<DisplacementTag>(const DisplacementField&, double);
template VelocityField resample_field<VelocityTag>(const VelocityField&, Dims3, Spacing3);
template DisplacementField resample_field<DisplacementTag>(const DisplacementField&, Dims3,
                                                           Spacing3);

}  // namespace tempreg
