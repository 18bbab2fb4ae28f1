// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tempreg {

namespace {

// Where motion lives: bumps around each ROI (the anatomy moves, the
// surrounding tissue mostly does not) over a small global floor for
// breathing-like drift of everything else.
Volume3 motion_envelope(Dims3 dims, Spacing3 spacing, const std::vector<PhantomRoi>& rois) {
    constexpr double kFloor = 0.1;
    Volume3 env(dims, spacing, static_cast<float>(kFloor));
    for (const PhantomRoi& roi : rois) {
        for (const auto& part : roi.parts) {
            const double cx = part.center_frac.x * dims.nx;
            const double cy = part.center_frac.y * dims.ny;
            const double cz = part.center_frac.z * dims.nz;
            const double r = 1.2 * std::max({part.semi_frac.x * dims.nx,
                                             part.semi_frac.y * dims.ny,
                                             part.semi_frac.z * dims.nz});
            std::size_t i = 0;
            for (int z = 0; z < dims.nz; ++z) {
                for (int y = 0; y < dims.ny; ++y) {
                    for (int x = 0; x < dims.nx; ++x, ++i) {
                        const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy) +
                                           (z - cz) * (z - cz)) /
                                          (r * r);
                        const float w = static_cast<float>(std::exp(-0.5 * d2));
                        if (w > env.data[i]) env.data[i] = w;
                    }
                }
            }
        }
    }
    return env;
}

// Smooth unit-scaled random vector field: white Gaussian noise per component,
// Gaussian-smoothed, shaped by the motion envelope, then rescaled so the
// largest magnitude is 1.
VelocityField smooth_unit_field(Dims3 dims, Spacing3 spacing, double sigma,
                                const Volume3& envelope, Rng& rng) {
    VelocityField f(dims, spacing);
    for (float& v : f.data) v = static_cast<float>(rng.gaussian());
    detail::gaussian_smooth_inplace(f.data, dims, 3, sigma);
    for (std::size_t i = 0; i < envelope.data.size(); ++i) {
        const float w = envelope.data[i];
        f.data[3 * i] *= w;
        f.data[3 * i + 1] *= w;
        f.data[3 * i + 2] *= w;
    }
    const double m = max_magnitude(f);
    if (m > 0.0) {
        const float inv = static_cast<float>(1.0 / m);
        for (float& v : f.data) v *= inv;
    }
    return f;
}

void add_scaled(VelocityField& dst, const VelocityField& src, double scale) {
    for (std::size_t i = 0; i < dst.data.size(); ++i) {
        dst.data[i] += static_cast<float>(scale * src.data[i]);
    }
}

// Intensity rolloff toward the faces, like the air margin of a real scan.
// The outermost plane is exactly zero, so the hard out-of-domain cutoff of
// warp sampling (background 0) agrees with the face content instead of
// penalizing every outward deformation there.
double edge_weight(int i, int n) {
    constexpr int kRamp = 4;
    const int d = std::min(i, n - 1 - i);
    return d >= kRamp ? 1.0 : static_cast<double>(d) / kRamp;
}

}  // namespace

std::vector<PhantomRoi> default_phantom_rois() {
    std::vector<PhantomRoi> rois(3);
    rois[0].label = 1;
    rois[0].name = "placenta";
    rois[0].intensity = 120.0f;
    rois[0].parts = {{{0.34, 0.50, 0.50}, {0.20, 0.20, 0.16}}};
    rois[1].label = 2;
    rois[1].name = "brain";
    rois[1].intensity = 200.0f;
    rois[1].parts = {{{0.70, 0.30, 0.38}, {0.13, 0.13, 0.13}}};
    rois[2].label = 3;
    rois[2].name = "liver";
    rois[2].intensity = 160.0f;
    rois[2].parts = {{{0.68, 0.68, 0.62}, {0.12, 0.12, 0.12}},
                     {{0.60, 0.76, 0.56}, {0.09, 0.09, 0.09}}};
    return rois;
}

void PhantomSpec::validate() const {
    if (dims.nx < 16 || dims.ny < 16 || dims.nz < 16) {
        throw std::invalid_argument("PhantomSpec: dims must be >= 16 per axis");
    }
    if (n_frames < 1) throw std::invalid_argument("PhantomSpec: n_frames must be >= 1");
    if (drift_amplitude < 0.0 || jump_amplitude < 0.0) {
        throw std::invalid_argument("PhantomSpec: amplitudes must be >= 0");
    }
    if (jump_probability < 0.0 || jump_probability > 1.0) {
        throw std::invalid_argument("PhantomSpec: jump_probability must be in [0, 1]");
    }
    if (drift_coherence < 0.0 || drift_coherence > 1.0) {
        throw std::invalid_argument("PhantomSpec: drift_coherence must be in [0, 1]");
    }
    if (velocity_smoothness_sigma <= 0.0) {
        throw std::invalid_argument("PhantomSpec: velocity_smoothness_sigma must be > 0");
    }
    if (noise_sigma < 0.0) {
        throw std::invalid_argument("PhantomSpec: noise_sigma must be >= 0");
    }
    if (rois.empty()) throw std::invalid_argument("PhantomSpec: at least one ROI required");
}

std::pair<Volume3, LabelMap> gen_template(const PhantomSpec& spec) {
    spec.validate();
    const Dims3 dims = spec.dims;
    const Spacing3 spacing{1.0, 1.0, 1.0};

    // Multi-octave texture: keeps CC windows non-degenerate everywhere and
    // leaves alignment structure at every pyramid scale.
    Volume3 texture(dims, spacing);
    const double octave_sigma[3] = {1.5, 4.0, 9.0};
    const double octave_weight[3] = {0.5, 0.3, 0.2};
    for (int o = 0; o < 3; ++o) {
        Rng rng = make_stream(spec.seed, "texture-octave", o);
        Volume3 layer(dims, spacing);
        for (float& v : layer.data) v = static_cast<float>(rng.gaussian());
        layer = gaussian_smooth(layer, octave_sigma[o]);
        double lm = 0.0, lsq = 0.0;
        for (const float v : layer.data) {
            lm += v;
            lsq += static_cast<double>(v) * v;
        }
        lm /= static_cast<double>(layer.data.size());
        const double lsd = std::sqrt(std::max(lsq / layer.data.size() - lm * lm, 1e-12));
        for (std::size_t i = 0; i < texture.data.size(); ++i) {
            texture.data[i] += static_cast<float>(octave_weight[o] * (layer.data[i] - lm) / lsd);
        }
    }
    double mean = 0.0, sq = 0.0;
    for (const float v : texture.data) {
        mean += v;
        sq += static_cast<double>(v) * v;
    }
    mean /= static_cast<double>(texture.data.size());
    const double sd = std::sqrt(std::max(sq / texture.data.size() - mean * mean, 1e-12));
    for (float& v : texture.data) {
        v = static_cast<float>((v - mean) / sd * spec.texture_amplitude);
    }

    Volume3 vol(dims, spacing, 0.0f, 0.0f);
    LabelMap labels(dims, spacing);
    for (std::size_t i = 0; i < vol.data.size(); ++i) {
        vol.data[i] = spec.background_mean + texture.data[i];
    }

    for (const PhantomRoi& roi : spec.rois) {
        if (roi.label == 0) {
            throw DataError("gen_template: label 0 is reserved for background");
        }
        labels.label_names[roi.label] = roi.name;
        std::size_t count = 0;
        for (const auto& part : roi.parts) {
            const double cx = part.center_frac.x * dims.nx;
            const double cy = part.center_frac.y * dims.ny;
            const double cz = part.center_frac.z * dims.nz;
            const double ax = part.semi_frac.x * dims.nx;
            const double ay = part.semi_frac.y * dims.ny;
            const double az = part.semi_frac.z * dims.nz;
            if (cx - ax < 1.0 || cx + ax > dims.nx - 2.0 || cy - ay < 1.0 ||
                cy + ay > dims.ny - 2.0 || cz - az < 1.0 || cz + az > dims.nz - 2.0) {
                throw DataError("gen_template: ROI '" + roi.name +
                                "' does not fit inside the volume");
            }
            const int x0 = static_cast<int>(std::floor(cx - ax));
            const int x1 = static_cast<int>(std::ceil(cx + ax));
            const int y0 = static_cast<int>(std::floor(cy - ay));
            const int y1 = static_cast<int>(std::ceil(cy + ay));
            const int z0 = static_cast<int>(std::floor(cz - az));
            const int z1 = static_cast<int>(std::ceil(cz + az));
            for (int z = z0; z <= z1; ++z) {
                for (int y = y0; y <= y1; ++y) {
                    for (int x = x0; x <= x1; ++x) {
                        const double dx = (x - cx) / ax;
                        const double dy = (y - cy) / ay;
                        const double dz = (z - cz) / az;
                        if (dx * dx + dy * dy + dz * dz > 1.0) continue;
                        const std::size_t i = labels.index(x, y, z);
                        if (labels.data[i] != 0 && labels.data[i] != roi.label) {
                            throw DataError("gen_template: ROI '" + roi.name +
                                            "' overlaps another ROI");
                        }
                        if (labels.data[i] == 0) ++count;
                        labels.data[i] = roi.label;
                        vol.data[i] = roi.intensity + texture.data[i];
                    }
                }
            }
        }
        if (count == 0) {
            throw DataError("gen_template: ROI '" + roi.name + "' contains no voxels");
        }
    }

    std::size_t i = 0;
    for (int z = 0; z < dims.nz; ++z) {
        for (int y = 0; y < dims.ny; ++y) {
            for (int x = 0; x < dims.nx; ++x, ++i) {
                const double w = edge_weight(x, dims.nx) * edge_weight(y, dims.ny) *
                                 edge_weight(z, dims.nz);
                vol.data[i] = static_cast<float>(vol.data[i] * w);
            }
        }
    }
    return {std::move(vol), std::move(labels)};
}

PhantomSeries gen_series(const Volume3& template_vol, const LabelMap& labels,
                         const PhantomSpec& spec) {
    spec.validate();
    if (!(template_vol.dims == labels.dims)) {
        throw std::invalid_argument("gen_series: template and labels dims do not match");
    }
    const Dims3 dims = template_vol.dims;
    const Spacing3 spacing = template_vol.spacing;
    const int n = spec.n_frames;

    PhantomSeries out;
    out.template_vol = template_vol;
    out.labels = labels;
    out.frames.reserve(n);
    out.gt_velocities.reserve(n);
    out.gt_forward.reserve(n);
    out.gt_inverse.reserve(n);

    // One shared drift direction per seed keeps consecutive increments
    // coherent; the envelope confines motion to the anatomy.
    const Volume3 envelope = motion_envelope(dims, spacing, spec.rois);
    Rng dir_rng = make_stream(spec.seed, "drift-direction");
    const VelocityField drift_dir =
        smooth_unit_field(dims, spacing, spec.velocity_smoothness_sigma, envelope, dir_rng);

    auto draw_motion = [&](const char* stream, std::uint64_t k) {
        Rng rng = make_stream(spec.seed, stream, k);
        const VelocityField wobble =
            smooth_unit_field(dims, spacing, spec.velocity_smoothness_sigma, envelope, rng);
        VelocityField out(dims, spacing);
        add_scaled(out, drift_dir, spec.drift_coherence);
        add_scaled(out, wobble, 1.0 - spec.drift_coherence);
        const double m = max_magnitude(out);
        if (m > 0.0) {
            for (float& x : out.data) x = static_cast<float>(x / m);
        }
        return out;
    };

    VelocityField v(dims, spacing);  // v_1 = 0
    for (int frame = 0; frame < n; ++frame) {
        if (frame > 0) {
            VelocityField accepted;
            bool ok = false;
            for (int attempt = 0; attempt < 10 && !ok; ++attempt) {
                VelocityField cand = v;
                const std::uint64_t k =
                    static_cast<std::uint64_t>(frame) * 16 + static_cast<std::uint64_t>(attempt);
                if (spec.drift_amplitude > 0.0) {
                    const VelocityField incr = draw_motion("increment", k);
                    add_scaled(cand, incr, spec.drift_amplitude);
                }
                bool jump = spec.jump_frame == frame;
                if (spec.jump_probability > 0.0) {
                    Rng jrng = make_stream(spec.seed, "jump-draw", k);
                    if (jrng.uniform() < spec.jump_probability) jump = true;
                }
                if (jump && spec.jump_amplitude > 0.0) {
                    const VelocityField jf = draw_motion("jump-field", k);
                    add_scaled(cand, jf, spec.jump_amplitude);
                }
                if (min_jacobian_determinant(exp_velocity(cand)) > 0.0) {
                    accepted = std::move(cand);
                    ok = true;
                }
            }
            if (!ok) {
                std::ostringstream msg;
                msg << "gen_series: frame " << frame + 1
                    << " failed Jacobian positivity after 10 attempts; "
                       "reduce drift/jump amplitudes or increase smoothness";
                throw DataError(msg.str());
            }
            v = std::move(accepted);
        }

        DisplacementField fwd = exp_velocity(v);
        DisplacementField inv = exp_velocity(negated(v));
        Volume3 fr = frame == 0 ? template_vol : warp_volume(template_vol, inv);

        if (spec.intensity_drift_roi != 0 && spec.intensity_drift_fraction != 0.0 && n > 1) {
            const LabelMap warped_labels = warp_labels_nn(labels, inv);
            const double factor = 1.0 + spec.intensity_drift_fraction *
                                            (static_cast<double>(frame) / (n - 1));
            for (std::size_t i = 0; i < fr.data.size(); ++i) {
                if (warped_labels.data[i] == spec.intensity_drift_roi) {
                    fr.data[i] = static_cast<float>(fr.data[i] * factor);
                }
            }
        }
        if (spec.noise_sigma > 0.0) {
            Rng nrng = make_stream(spec.seed, "noise", static_cast<std::uint64_t>(frame));
            for (float& x : fr.data) {
                x += static_cast<float>(spec.noise_sigma * nrng.gaussian());
            }
        }

        out.gt_velocities.push_back(v);
        out.gt_forward.push_back(std::move(fwd));
        out.gt_inverse.push_back(std::move(inv));
        out.frames.push_back(std::move(fr));
    }
    return out;
}

PhantomSeries gen_phantom(const PhantomSpec& spec) {
    auto [vol, labels] = gen_template(spec);
    return gen_series(vol, labels, spec);
}

}  // namespace tempreg
