// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tempreg/field.hpp"
#include "tempreg/phantom.hpp"
#include "tempreg/registration.hpp"
#include "tempreg/volume.hpp"

namespace tempreg {

// MetaImage-style pair: text header (NDims/DimSize/ElementSpacing/
// ElementType/ElementDataFile) plus a little-endian raw file, x fastest.
// Intensities are MET_FLOAT, labels MET_USHORT, fields 3-channel MET_FLOAT.

struct VolumeHeader {
    Dims3 dims;
    Spacing3 spacing;
    int channels = 1;
    std::string element_type;  // MET_FLOAT or MET_USHORT
    std::string data_file;     // as written in the header
};

VolumeHeader read_volume_header(const std::filesystem::path& header_path);

void write_volume(const Volume3& vol, const std::filesystem::path& header_path);
Volume3 read_volume(const std::filesystem::path& header_path);

void write_labels(const LabelMap& labels, const std::filesystem::path& header_path);
LabelMap read_labels(const std::filesystem::path& header_path);

void write_field(const DisplacementField& field, const std::filesystem::path& header_path);
void write_field(const VelocityField& field, const std::filesystem::path& header_path);
DisplacementField read_field(const std::filesystem::path& header_path);

// Ordered series description: template, frames, optional labels and optional
// per-frame ground-truth fields. Paths inside the file are relative to the
// manifest's directory.
struct SeriesManifest {
    std::filesystem::path template_path;
    std::optional<std::filesystem::path> labels_path;
    std::vector<std::filesystem::path> frame_paths;
    std::vector<std::filesystem::path> gt_forward_paths;
    std::vector<std::filesystem::path> gt_inverse_paths;
};

SeriesManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const SeriesManifest& manifest, const std::filesystem::path& path);

// RegConfig round-trips through JSON or flat key=value text; unknown keys
// are rejected. The nested CC block uses keys cc.radius / cc.epsilon in the
// flat form.
std::string reg_config_to_json(const RegConfig& cfg);
RegConfig reg_config_from_text(const std::string& text);
RegConfig load_reg_config(const std::filesystem::path& path);
void save_reg_config(const RegConfig& cfg, const std::filesystem::path& path);

std::string phantom_spec_to_json(const PhantomSpec& spec);
PhantomSpec phantom_spec_from_text(const std::string& text);
PhantomSpec load_phantom_spec(const std::filesystem::path& path);
void save_phantom_spec(const PhantomSpec& spec, const std::filesystem::path& path);

}  // namespace tempreg
