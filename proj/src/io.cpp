// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace tempreg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

static_assert(sizeof(float) == 4, "raw format assumes 32-bit float");

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

template <class T>
void write_raw_le(std::ofstream& os, const std::vector<T>& data) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(data.data()),
                 static_cast<std::streamsize>(data.size() * sizeof(T)));
    } else {
        for (const T v : data) {
            unsigned char bytes[sizeof(T)];
            std::memcpy(bytes, &v, sizeof(T));
            std::reverse(bytes, bytes + sizeof(T));
            os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
        }
    }
}

template <class T>
void read_raw_le(std::ifstream& is, std::vector<T>& data) {
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(T)));
    if constexpr (std::endian::native == std::endian::big) {
        for (T& v : data) {
            unsigned char bytes[sizeof(T)];
            std::memcpy(bytes, &v, sizeof(T));
            std::reverse(bytes, bytes + sizeof(T));
            std::memcpy(&v, bytes, sizeof(T));
        }
    }
}

void write_header(const fs::path& header_path, const Dims3& dims, const Spacing3& spacing,
                  int channels, const std::string& element_type) {
    std::ofstream os(header_path);
    if (!os) {
        throw DataError("cannot write header: " + header_path.string());
    }
    os << "NDims = 3\n";
    os << "DimSize = " << dims.nx << ' ' << dims.ny << ' ' << dims.nz << '\n';
    os << "ElementSpacing = " << format_double(spacing.sx) << ' ' << format_double(spacing.sy)
       << ' ' << format_double(spacing.sz) << '\n';
    if (channels != 1) {
        os << "ElementNumberOfChannels = " << channels << '\n';
    }
    os << "ElementType = " << element_type << '\n';
    os << "ElementDataFile = " << fs::path(header_path).filename().replace_extension(".raw").string()
       << '\n';
    if (!os) {
        throw DataError("failed writing header: " + header_path.string());
    }
}

[[noreturn]] void header_error(const fs::path& path, int line_no, const std::string& what) {
    std::ostringstream msg;
    msg << path.string() << ":" << line_no << ": " << what;
    throw DataError(msg.str());
}

template <class T>
std::vector<T> read_payload(const fs::path& header_path, const VolumeHeader& hdr) {
    const fs::path raw_path = header_path.parent_path() / hdr.data_file;
    std::ifstream is(raw_path, std::ios::binary);
    if (!is) {
        throw DataError("cannot open raw payload: " + raw_path.string());
    }
    is.seekg(0, std::ios::end);
    const auto actual = static_cast<std::uint64_t>(is.tellg());
    is.seekg(0, std::ios::beg);
    const std::uint64_t expected =
        hdr.dims.voxel_count() * static_cast<std::uint64_t>(hdr.channels) * sizeof(T);
    if (actual != expected) {
        std::ostringstream msg;
        msg << raw_path.string() << ": raw payload has " << actual << " bytes, expected "
            << expected;
        throw DataError(msg.str());
    }
    std::vector<T> data(hdr.dims.voxel_count() * hdr.channels);
    read_raw_le(is, data);
    if (!is) {
        throw DataError("failed reading raw payload: " + raw_path.string());
    }
    return data;
}

const std::set<std::string>& known_header_keys() {
    static const std::set<std::string> keys = {
        "ObjectType",     "NDims",
        "BinaryData",     "BinaryDataByteOrderMSB",
        "CompressedData", "DimSize",
        "ElementSpacing", "ElementNumberOfChannels",
        "ElementType",    "ElementDataFile",
        "Offset"};
    return keys;
}

}  // namespace

VolumeHeader read_volume_header(const fs::path& header_path) {
    std::ifstream is(header_path);
    if (!is) {
        throw DataError("cannot open header: " + header_path.string());
    }
    VolumeHeader hdr;
    bool have_ndims = false, have_dims = false, have_spacing = false, have_type = false,
         have_file = false;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            header_error(header_path, line_no, "expected 'Key = value'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (known_header_keys().count(key) == 0) {
            header_error(header_path, line_no, "unknown header key '" + key + "'");
        }
        std::istringstream vs(value);
        if (key == "NDims") {
            int nd = 0;
            if (!(vs >> nd) || nd != 3) {
                header_error(header_path, line_no, "NDims must be 3");
            }
            have_ndims = true;
        } else if (key == "DimSize") {
            if (!(vs >> hdr.dims.nx >> hdr.dims.ny >> hdr.dims.nz) || !hdr.dims.valid()) {
                header_error(header_path, line_no, "DimSize must be three positive integers");
            }
            have_dims = true;
        } else if (key == "ElementSpacing") {
            if (!(vs >> hdr.spacing.sx >> hdr.spacing.sy >> hdr.spacing.sz) ||
                !hdr.spacing.valid()) {
                header_error(header_path, line_no,
                             "ElementSpacing must be three positive reals");
            }
            have_spacing = true;
        } else if (key == "ElementNumberOfChannels") {
            if (!(vs >> hdr.channels) || (hdr.channels != 1 && hdr.channels != 3)) {
                header_error(header_path, line_no, "ElementNumberOfChannels must be 1 or 3");
            }
        } else if (key == "ElementType") {
            if (value != "MET_FLOAT" && value != "MET_USHORT") {
                header_error(header_path, line_no,
                             "unsupported ElementType '" + value + "'");
            }
            hdr.element_type = value;
            have_type = true;
        } else if (key == "ElementDataFile") {
            if (value.empty() || value == "LOCAL" || value == "LIST") {
                header_error(header_path, line_no,
                             "ElementDataFile must name a sibling raw file");
            }
            hdr.data_file = value;
            have_file = true;
        } else if (key == "ObjectType") {
            if (value != "Image") {
                header_error(header_path, line_no, "ObjectType must be Image");
            }
        } else if (key == "BinaryData") {
            if (value != "True") {
                header_error(header_path, line_no, "BinaryData must be True");
            }
        } else if (key == "BinaryDataByteOrderMSB") {
            if (value != "False") {
                header_error(header_path, line_no, "big-endian payloads are not supported");
            }
        } else if (key == "CompressedData") {
            if (value != "False") {
                header_error(header_path, line_no, "compressed payloads are not supported");
            }
        }
        // Offset is tolerated and ignored; grids are origin-anchored here.
    }
    if (!have_ndims || !have_dims || !have_spacing || !have_type || !have_file) {
        throw DataError(header_path.string() +
                        ": header is missing one of NDims/DimSize/ElementSpacing/"
                        "ElementType/ElementDataFile");
    }
    return hdr;
}

void write_volume(const Volume3& vol, const fs::path& header_path) {
    write_header(header_path, vol.dims, vol.spacing, 1, "MET_FLOAT");
    const fs::path raw = fs::path(header_path).replace_extension(".raw");
    std::ofstream os(raw, std::ios::binary);
    if (!os) throw DataError("cannot write raw payload: " + raw.string());
    write_raw_le(os, vol.data);
    if (!os) throw DataError("failed writing raw payload: " + raw.string());
}

Volume3 read_volume(const fs::path& header_path) {
    const VolumeHeader hdr = read_volume_header(header_path);
    if (hdr.element_type != "MET_FLOAT") {
        throw DataError(header_path.string() + ": expected MET_FLOAT scalar volume, got " +
                        hdr.element_type);
    }
    if (hdr.channels != 1) {
        throw DataError(header_path.string() +
                        ": expected a scalar volume but header declares " +
                        std::to_string(hdr.channels) + " channels");
    }
    Volume3 vol(hdr.dims, hdr.spacing);
    vol.data = read_payload<float>(header_path, hdr);
    for (const float v : vol.data) {
        if (!std::isfinite(v)) {
            throw DataError(header_path.string() + ": payload contains non-finite values");
        }
    }
    return vol;
}

void write_labels(const LabelMap& labels, const fs::path& header_path) {
    write_header(header_path, labels.dims, labels.spacing, 1, "MET_USHORT");
    const fs::path raw = fs::path(header_path).replace_extension(".raw");
    std::ofstream os(raw, std::ios::binary);
    if (!os) throw DataError("cannot write raw payload: " + raw.string());
    write_raw_le(os, labels.data);
    if (!os) throw DataError("failed writing raw payload: " + raw.string());
}

LabelMap read_labels(const fs::path& header_path) {
    const VolumeHeader hdr = read_volume_header(header_path);
    if (hdr.element_type != "MET_USHORT" || hdr.channels != 1) {
        throw DataError(header_path.string() + ": expected MET_USHORT scalar label map");
    }
    LabelMap labels(hdr.dims, hdr.spacing);
    labels.data = read_payload<std::uint16_t>(header_path, hdr);
    return labels;
}

namespace {

template <class Tag>
void write_field_impl(const Field3<Tag>& field, const fs::path& header_path) {
    write_header(header_path, field.dims, field.spacing, 3, "MET_FLOAT");
    const fs::path raw = fs::path(header_path).replace_extension(".raw");
    std::ofstream os(raw, std::ios::binary);
    if (!os) throw DataError("cannot write raw payload: " + raw.string());
    write_raw_le(os, field.data);
    if (!os) throw DataError("failed writing raw payload: " + raw.string());
}

}  // namespace

void write_field(const DisplacementField& field, const fs::path& header_path) {
    write_field_impl(field, header_path);
}

void write_field(const VelocityField& field, const fs::path& header_path) {
    write_field_impl(field, header_path);
}

DisplacementField read_field(const fs::path& header_path) {
    const VolumeHeader hdr = read_volume_header(header_path);
    if (hdr.element_type != "MET_FLOAT") {
        throw DataError(header_path.string() + ": expected MET_FLOAT field, got " +
                        hdr.element_type);
    }
    if (hdr.channels != 3) {
        throw DataError(header_path.string() + ": expected a 3-channel field but header declares " +
                        std::to_string(hdr.channels) + " channel(s)");
    }
    DisplacementField field(hdr.dims, hdr.spacing);
    field.data = read_payload<float>(header_path, hdr);
    for (const float v : field.data) {
        if (!std::isfinite(v)) {
            throw DataError(header_path.string() + ": field contains non-finite values");
        }
    }
    return field;
}

SeriesManifest read_manifest(const fs::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw DataError("cannot open manifest: " + path.string());
    }
    const fs::path base = path.parent_path();
    SeriesManifest mf;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            header_error(path, line_no, "expected 'key = path'");
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) header_error(path, line_no, "empty path for key '" + key + "'");
        if (key == "template") {
            mf.template_path = base / value;
        } else if (key == "labels") {
            mf.labels_path = base / value;
        } else if (key == "frame") {
            mf.frame_paths.push_back(base / value);
        } else if (key == "gt_forward") {
            mf.gt_forward_paths.push_back(base / value);
        } else if (key == "gt_inverse") {
            mf.gt_inverse_paths.push_back(base / value);
        } else {
            header_error(path, line_no, "unknown manifest key '" + key + "'");
        }
    }
    if (mf.template_path.empty()) {
        throw DataError(path.string() + ": manifest has no template entry");
    }
    if (mf.frame_paths.empty()) {
        throw DataError(path.string() + ": manifest lists no frames");
    }
    if (!mf.gt_forward_paths.empty() &&
        mf.gt_forward_paths.size() != mf.frame_paths.size()) {
        throw DataError(path.string() + ": gt_forward count does not match frame count");
    }
    if (!mf.gt_inverse_paths.empty() &&
        mf.gt_inverse_paths.size() != mf.frame_paths.size()) {
        throw DataError(path.string() + ": gt_inverse count does not match frame count");
    }
    return mf;
}

void write_manifest(const SeriesManifest& manifest, const fs::path& path) {
    std::ofstream os(path);
    if (!os) {
        throw DataError("cannot write manifest: " + path.string());
    }
    auto rel = [&](const fs::path& p) {
        return p.lexically_proximate(path.parent_path()).generic_string();
    };
    os << "template = " << rel(manifest.template_path) << '\n';
    if (manifest.labels_path) {
        os << "labels = " << rel(*manifest.labels_path) << '\n';
    }
    for (const auto& p : manifest.frame_paths) os << "frame = " << rel(p) << '\n';
    for (const auto& p : manifest.gt_forward_paths) os << "gt_forward = " << rel(p) << '\n';
    for (const auto& p : manifest.gt_inverse_paths) os << "gt_inverse = " << rel(p) << '\n';
    if (!os) {
        throw DataError("failed writing manifest: " + path.string());
    }
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw DataError("config: " + what); }

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        if (allowed.count(key) == 0) {
            config_error("unknown key '" + (scope.empty() ? key : scope + "." + key) + "'");
        }
    }
}

// Parses `key = value` lines into a flat json object; dotted keys nest one
// level and comma lists become arrays.
json flat_text_to_json(const std::string& text) {
    json j = json::object();
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        json parsed;
        if (value.find(',') != std::string::npos) {
            parsed = json::array();
            std::istringstream vs(value);
            std::string item;
            while (std::getline(vs, item, ',')) {
                json e = json::parse(trim(item), nullptr, false);
                parsed.push_back(e.is_discarded() ? json(trim(item)) : e);
            }
        } else if (value == "true" || value == "false") {
            parsed = json::parse(value);
        } else {
            parsed = json::parse(value, nullptr, false);
            if (parsed.is_discarded()) parsed = value;  // bare string
        }
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            j[key] = parsed;
        } else {
            j[key.substr(0, dot)][key.substr(dot + 1)] = parsed;
        }
    }
    return j;
}

json sniff_to_json(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) config_error("invalid JSON document");
        return j;
    }
    return flat_text_to_json(text);
}

std::string read_text_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open config: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

std::string reg_config_to_json(const RegConfig& cfg) {
    json j;
    j["lambda1"] = cfg.lambda1;
    j["lambda2"] = cfg.lambda2;
    j["sigma_fluid"] = cfg.sigma_fluid;
    j["sigma_elastic"] = cfg.sigma_elastic;
    j["step_size"] = cfg.step_size;
    j["pyramid_levels"] = cfg.pyramid_levels;
    j["iters_per_level"] = cfg.iters_per_level;
    j["converge_tol"] = cfg.converge_tol;
    j["symmetric_forces"] = cfg.symmetric_forces;
    j["cc"] = {{"radius", cfg.cc.radius}, {"epsilon", cfg.cc.epsilon}};
    return j.dump(2) + "\n";
}

RegConfig reg_config_from_text(const std::string& text) {
    const json j = sniff_to_json(text);
    reject_unknown(j, {"lambda1", "lambda2", "sigma_fluid", "sigma_elastic", "step_size",
                       "pyramid_levels", "iters_per_level", "converge_tol",
                       "symmetric_forces", "cc"},
                   "");
    RegConfig cfg;
    try {
        if (j.contains("lambda1")) cfg.lambda1 = j["lambda1"].get<double>();
        if (j.contains("lambda2")) cfg.lambda2 = j["lambda2"].get<double>();
        if (j.contains("sigma_fluid")) cfg.sigma_fluid = j["sigma_fluid"].get<double>();
        if (j.contains("sigma_elastic")) cfg.sigma_elastic = j["sigma_elastic"].get<double>();
        if (j.contains("step_size")) cfg.step_size = j["step_size"].get<double>();
        if (j.contains("pyramid_levels")) cfg.pyramid_levels = j["pyramid_levels"].get<int>();
        if (j.contains("iters_per_level")) {
            cfg.iters_per_level.clear();
            if (j["iters_per_level"].is_array()) {
                for (const auto& it : j["iters_per_level"]) {
                    cfg.iters_per_level.push_back(it.get<int>());
                }
            } else {
                cfg.iters_per_level.push_back(j["iters_per_level"].get<int>());
            }
        }
        if (j.contains("converge_tol")) cfg.converge_tol = j["converge_tol"].get<double>();
        if (j.contains("symmetric_forces")) {
            cfg.symmetric_forces = j["symmetric_forces"].get<bool>();
        }
        if (j.contains("cc")) {
            reject_unknown(j["cc"], {"radius", "epsilon"}, "cc");
            if (j["cc"].contains("radius")) cfg.cc.radius = j["cc"]["radius"].get<int>();
            if (j["cc"].contains("epsilon")) cfg.cc.epsilon = j["cc"]["epsilon"].get<double>();
        }
    } catch (const json::exception& e) {
        config_error(e.what());
    }
    cfg.validate();
    return cfg;
}

RegConfig load_reg_config(const fs::path& path) {
    return reg_config_from_text(read_text_file(path));
}

void save_reg_config(const RegConfig& cfg, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write config: " + path.string());
    os << reg_config_to_json(cfg);
}

std::string phantom_spec_to_json(const PhantomSpec& spec) {
    json j;
    j["dims"] = {spec.dims.nx, spec.dims.ny, spec.dims.nz};
    j["n_frames"] = spec.n_frames;
    j["seed"] = spec.seed;
    j["drift_amplitude"] = spec.drift_amplitude;
    j["drift_coherence"] = spec.drift_coherence;
    j["jump_probability"] = spec.jump_probability;
    j["jump_amplitude"] = spec.jump_amplitude;
    j["jump_frame"] = spec.jump_frame;
    j["velocity_smoothness_sigma"] = spec.velocity_smoothness_sigma;
    j["noise_sigma"] = spec.noise_sigma;
    j["intensity_drift_roi"] = spec.intensity_drift_roi;
    j["intensity_drift_fraction"] = spec.intensity_drift_fraction;
    j["background_mean"] = spec.background_mean;
    j["texture_amplitude"] = spec.texture_amplitude;
    j["rois"] = json::array();
    for (const PhantomRoi& roi : spec.rois) {
        json parts = json::array();
        for (const auto& part : roi.parts) {
            parts.push_back(
                {{"center", {part.center_frac.x, part.center_frac.y, part.center_frac.z}},
                 {"semi", {part.semi_frac.x, part.semi_frac.y, part.semi_frac.z}}});
        }
        j["rois"].push_back({{"label", roi.label},
                             {"name", roi.name},
                             {"intensity", roi.intensity},
                             {"parts", parts}});
    }
    return j.dump(2) + "\n";
}

PhantomSpec phantom_spec_from_text(const std::string& text) {
    const json j = sniff_to_json(text);
    reject_unknown(j,
                   {"dims", "n_frames", "seed", "drift_amplitude", "drift_coherence",
                    "jump_probability", "jump_amplitude", "jump_frame",
                    "velocity_smoothness_sigma", "noise_sigma", "intensity_drift_roi",
                    "intensity_drift_fraction", "background_mean", "texture_amplitude",
                    "rois"},
                   "");
    PhantomSpec spec;
    try {
        if (j.contains("dims")) {
            if (j["dims"].is_array()) {
                spec.dims = {j["dims"][0].get<int>(), j["dims"][1].get<int>(),
                             j["dims"][2].get<int>()};
            } else {
                const int n = j["dims"].get<int>();
                spec.dims = {n, n, n};
            }
        }
        if (j.contains("n_frames")) spec.n_frames = j["n_frames"].get<int>();
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("drift_amplitude")) {
            spec.drift_amplitude = j["drift_amplitude"].get<double>();
        }
        if (j.contains("drift_coherence")) {
            spec.drift_coherence = j["drift_coherence"].get<double>();
        }
        if (j.contains("jump_probability")) {
            spec.jump_probability = j["jump_probability"].get<double>();
        }
        if (j.contains("jump_amplitude")) {
            spec.jump_amplitude = j["jump_amplitude"].get<double>();
        }
        if (j.contains("jump_frame")) spec.jump_frame = j["jump_frame"].get<int>();
        if (j.contains("velocity_smoothness_sigma")) {
            spec.velocity_smoothness_sigma = j["velocity_smoothness_sigma"].get<double>();
        }
        if (j.contains("noise_sigma")) spec.noise_sigma = j["noise_sigma"].get<double>();
        if (j.contains("intensity_drift_roi")) {
            spec.intensity_drift_roi = j["intensity_drift_roi"].get<std::uint16_t>();
        }
        if (j.contains("intensity_drift_fraction")) {
            spec.intensity_drift_fraction = j["intensity_drift_fraction"].get<double>();
        }
        if (j.contains("background_mean")) {
            spec.background_mean = j["background_mean"].get<float>();
        }
        if (j.contains("texture_amplitude")) {
            spec.texture_amplitude = j["texture_amplitude"].get<float>();
        }
        if (j.contains("rois")) {
            spec.rois.clear();
            for (const auto& jr : j["rois"]) {
                reject_unknown(jr, {"label", "name", "intensity", "parts"}, "rois");
                PhantomRoi roi;
                roi.label = jr.at("label").get<std::uint16_t>();
                roi.name = jr.at("name").get<std::string>();
                roi.intensity = jr.at("intensity").get<float>();
                for (const auto& jp : jr.at("parts")) {
                    reject_unknown(jp, {"center", "semi"}, "rois.parts");
                    PhantomRoi::Ellipsoid e;
                    e.center_frac = {jp.at("center")[0].get<double>(),
                                     jp.at("center")[1].get<double>(),
                                     jp.at("center")[2].get<double>()};
                    e.semi_frac = {jp.at("semi")[0].get<double>(),
                                   jp.at("semi")[1].get<double>(),
                                   jp.at("semi")[2].get<double>()};
                    roi.parts.push_back(e);
                }
                spec.rois.push_back(std::move(roi));
            }
        }
    } catch (const json::exception& e) {
        config_error(e.what());
    }
    spec.validate();
    return spec;
}

PhantomSpec load_phantom_spec(const fs::path& path) {
    return phantom_spec_from_text(read_text_file(path));
}

void save_phantom_spec(const PhantomSpec& spec, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write phantom spec: " + path.string());
    os << phantom_spec_to_json(spec);
}

}  // namespace tempreg
