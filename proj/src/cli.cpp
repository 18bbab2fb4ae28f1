// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include "tempreg/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tempreg/io.hpp"
#include "tempreg/metrics.hpp"
#include "tempreg/series.hpp"

namespace tempreg {

namespace fs = std::filesystem;

namespace {

std::string frame_tag(std::size_t idx) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03zu", idx + 1);
    return buf;
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw DataError("cannot create output directory: " + dir.string());
    }
}

// Resizes the default coarse->fine schedule when --levels overrides the
// config: the fine-end budgets are kept, extra coarse levels reuse the
// coarsest budget.
void adjust_levels(RegConfig& cfg, int levels) {
    if (levels == cfg.pyramid_levels) return;
    std::vector<int> iters = cfg.iters_per_level;
    if (levels < cfg.pyramid_levels) {
        iters.erase(iters.begin(), iters.begin() + (cfg.pyramid_levels - levels));
    } else {
        iters.insert(iters.begin(), levels - cfg.pyramid_levels, iters.front());
    }
    cfg.pyramid_levels = levels;
    cfg.iters_per_level = std::move(iters);
}

struct RegisterFlags {
    std::string manifest;
    std::string mode = "sequential";
    std::string out;
    std::string config;
    double lambda2 = -1.0;  // <0 means keep config value
    int cc_radius = 0;
    int levels = 0;
    int workers = 0;
    bool strict = false;
};

int cmd_register(const RegisterFlags& flags) {
    RegConfig cfg = flags.config.empty() ? RegConfig{} : load_reg_config(flags.config);
    if (flags.lambda2 >= 0.0) cfg.lambda2 = flags.lambda2;
    if (flags.cc_radius > 0) cfg.cc.radius = flags.cc_radius;
    if (flags.levels > 0) adjust_levels(cfg, flags.levels);
    cfg.validate();
    const FilterMode mode = parse_filter_mode(flags.mode);

    const SeriesManifest mf = read_manifest(flags.manifest);
    const Volume3 tmpl = read_volume(mf.template_path);
    ensure_out_dir(flags.out);
    const fs::path out_dir = flags.out;

    FrameProvider provider{mf.frame_paths.size(), [&mf](std::size_t i) {
                               return read_volume(mf.frame_paths[i]);
                           }};

    std::ostringstream csv;
    csv << "frame,mode,data_term,min_jacobian,iters,seconds\n";
    bool all_converged = true;
    std::size_t flagged = 0;
    filter_series_stream(
        tmpl, provider, cfg, mode,
        [&](std::size_t i, FrameResult&& fr) {
            write_field(fr.forward, out_dir / ("fwd_" + frame_tag(i) + ".mhd"));
            write_field(fr.inverse, out_dir / ("inv_" + frame_tag(i) + ".mhd"));
            csv << i + 1 << ',' << to_string(mode) << ',' << fr.data_term << ','
                << fr.min_jacobian << ',' << fr.iterations << ',' << fr.seconds << '\n';
            if (!fr.converged) {
                all_converged = false;
                ++flagged;
            }
        },
        flags.workers);

    std::ofstream os(out_dir / "metrics.csv");
    if (!os) throw DataError("cannot write metrics.csv under " + out_dir.string());
    os << csv.str();
    os.close();

    if (!all_converged) {
        std::cerr << "warning: " << flagged << " frame(s) did not converge\n";
        if (flags.strict) {
            throw ConvergenceError("registration did not converge on " +
                                       std::to_string(flagged) + " frame(s)",
                                   static_cast<double>(flagged));
        }
    }
    std::cout << "registered " << mf.frame_paths.size() << " frame(s) in mode "
              << to_string(mode) << " -> " << out_dir.string() << "\n";
    return 0;
}

struct PhantomFlags {
    std::string out;
    std::string config;
    std::uint64_t seed = 1;
    bool seed_set = false;
    int dims = 0;
    int frames = 0;
    double drift = -1.0;
    double jump = -1.0;
    int jump_frame = -2;
    double noise = -1.0;
};

int cmd_phantom(const PhantomFlags& flags) {
    PhantomSpec spec = flags.config.empty() ? PhantomSpec{} : load_phantom_spec(flags.config);
    if (flags.seed_set) spec.seed = flags.seed;
    if (flags.dims > 0) spec.dims = {flags.dims, flags.dims, flags.dims};
    if (flags.frames > 0) spec.n_frames = flags.frames;
    if (flags.drift >= 0.0) spec.drift_amplitude = flags.drift;
    if (flags.jump >= 0.0) spec.jump_amplitude = flags.jump;
    if (flags.jump_frame >= -1) spec.jump_frame = flags.jump_frame;
    if (flags.noise >= 0.0) spec.noise_sigma = flags.noise;
    spec.validate();

    ensure_out_dir(flags.out);
    const fs::path out_dir = flags.out;
    const PhantomSeries series = gen_phantom(spec);

    SeriesManifest mf;
    mf.template_path = out_dir / "template.mhd";
    mf.labels_path = out_dir / "labels.mhd";
    write_volume(series.template_vol, mf.template_path);
    write_labels(series.labels, *mf.labels_path);
    for (std::size_t i = 0; i < series.frames.size(); ++i) {
        const std::string tag = frame_tag(i);
        mf.frame_paths.push_back(out_dir / ("frame_" + tag + ".mhd"));
        mf.gt_forward_paths.push_back(out_dir / ("gt_fwd_" + tag + ".mhd"));
        mf.gt_inverse_paths.push_back(out_dir / ("gt_inv_" + tag + ".mhd"));
        write_volume(series.frames[i], mf.frame_paths.back());
        write_field(series.gt_forward[i], mf.gt_forward_paths.back());
        write_field(series.gt_inverse[i], mf.gt_inverse_paths.back());
    }
    write_manifest(mf, out_dir / "manifest.txt");
    save_phantom_spec(spec, out_dir / "phantom.json");
    std::cout << "phantom series with " << series.frames.size() << " frame(s) -> "
              << out_dir.string() << "\n";
    return 0;
}

std::vector<std::size_t> parse_frame_list(const std::string& text, std::size_t count) {
    std::vector<std::size_t> indices;
    if (text == "all") {
        for (std::size_t i = 0; i < count; ++i) indices.push_back(i);
        return indices;
    }
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        std::size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(item, &pos);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--frames", "not a frame number: '" + item + "'");
        }
        if (pos != item.size() || v < 1 || static_cast<std::size_t>(v) > count) {
            throw DataError("frame index out of range: " + item);
        }
        indices.push_back(static_cast<std::size_t>(v - 1));
    }
    if (indices.empty()) throw DataError("empty frame list");
    return indices;
}

int cmd_propagate(const std::string& manifest, const std::string& fields_dir,
                  const std::string& frames, const std::string& out) {
    const SeriesManifest mf = read_manifest(manifest);
    if (!mf.labels_path) {
        throw DataError("manifest has no labels entry; nothing to propagate");
    }
    const LabelMap labels = read_labels(*mf.labels_path);
    const std::vector<std::size_t> indices = parse_frame_list(frames, mf.frame_paths.size());
    ensure_out_dir(out);
    for (const std::size_t i : indices) {
        const fs::path inv = fs::path(fields_dir) / ("inv_" + frame_tag(i) + ".mhd");
        const DisplacementField field = read_field(inv);
        const LabelMap warped = warp_labels_nn(labels, field);
        write_labels(warped, fs::path(out) / ("labels_" + frame_tag(i) + ".mhd"));
    }
    std::cout << "propagated labels to " << indices.size() << " frame(s) -> " << out << "\n";
    return 0;
}

SeriesResult load_series_fields(const fs::path& dir, std::size_t count) {
    SeriesResult res;
    res.frames.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        FrameResult& fr = res.frames[i];
        fr.forward = read_field(dir / ("fwd_" + frame_tag(i) + ".mhd"));
        fr.inverse = read_field(dir / ("inv_" + frame_tag(i) + ".mhd"));
        fr.min_jacobian = min_jacobian_determinant(fr.forward);
    }
    return res;
}

int cmd_evaluate(const std::string& manifest, const std::map<std::string, std::string>& dirs,
                 const std::string& out, std::string case_id) {
    const SeriesManifest mf = read_manifest(manifest);
    if (!mf.labels_path) throw DataError("manifest has no labels entry");
    if (mf.gt_forward_paths.empty() || mf.gt_inverse_paths.empty()) {
        throw DataError(
            "manifest carries no ground-truth fields; evaluate requires a phantom series");
    }
    const LabelMap labels = read_labels(*mf.labels_path);
    GroundTruthFields gt;
    for (const auto& p : mf.gt_forward_paths) gt.forward.push_back(read_field(p));
    for (const auto& p : mf.gt_inverse_paths) gt.inverse.push_back(read_field(p));

    std::map<std::string, SeriesResult> loaded;
    std::map<std::string, const SeriesResult*> by_mode;
    for (const auto& [mode, dir] : dirs) {
        loaded.emplace(mode, load_series_fields(dir, mf.frame_paths.size()));
        by_mode[mode] = &loaded.at(mode);
    }
    if (case_id.empty()) {
        case_id = fs::path(manifest).parent_path().filename().string();
        if (case_id.empty()) case_id = "case";
    }
    const OverlapReport report = build_report(case_id, by_mode, labels, gt);

    std::string csv = report_csv_header();
    append_report_csv(csv, report);
    std::ofstream os(out);
    if (!os) throw DataError("cannot write report: " + out);
    os << csv;
    os.close();

    for (const auto& [mode, agg] : report.aggregates) {
        std::cout << mode << ": mean dice " << agg.mean_dice << ", min dice " << agg.min_dice
                  << "\n";
    }
    std::cout << "report -> " << out << "\n";
    return 0;
}

int cmd_info(const std::string& path) {
    const VolumeHeader hdr = read_volume_header(path);
    std::cout << "file: " << path << "\n"
              << "dims: " << hdr.dims.nx << " " << hdr.dims.ny << " " << hdr.dims.nz << "\n"
              << "spacing: " << hdr.spacing.sx << " " << hdr.spacing.sy << " " << hdr.spacing.sz
              << "\n"
              << "channels: " << hdr.channels << "\n"
              << "element_type: " << hdr.element_type << "\n"
              << "data_file: " << hdr.data_file << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Temporal registration of volumetric image time series"};
    app.require_subcommand(1);

    PhantomFlags ph;
    CLI::App* phantom = app.add_subcommand("phantom", "Generate a synthetic 4D series");
    phantom->add_option("--out", ph.out, "Output directory")->required();
    phantom->add_option("--seed", ph.seed, "Master seed")->each([&ph](const std::string&) {
        ph.seed_set = true;
    });
    phantom->add_option("--config", ph.config, "PhantomSpec JSON or key=value file");
    phantom->add_option("--dims", ph.dims, "Cubic volume extent");
    phantom->add_option("--frames", ph.frames, "Number of frames");
    phantom->add_option("--drift", ph.drift, "Drift amplitude, voxels/frame");
    phantom->add_option("--jump", ph.jump, "Jump amplitude, voxels");
    phantom->add_option("--jump-frame", ph.jump_frame, "Frame index of deterministic jump");
    phantom->add_option("--noise", ph.noise, "Intensity noise sigma");

    RegisterFlags rf;
    CLI::App* reg = app.add_subcommand("register", "Register a series to its template");
    reg->add_option("--manifest", rf.manifest, "Series manifest")->required();
    reg->add_option("--mode", rf.mode, "sequential | pairwise | concat")
        ->default_val("sequential");
    reg->add_option("--out", rf.out, "Output directory")->required();
    reg->add_option("--config", rf.config, "RegConfig JSON or key=value file");
    reg->add_option("--lambda2", rf.lambda2, "Temporal penalty weight override");
    reg->add_option("--cc-radius", rf.cc_radius, "CC window radius override");
    reg->add_option("--levels", rf.levels, "Pyramid level override");
    reg->add_option("--workers", rf.workers, "Worker threads for pairwise mode");
    reg->add_flag("--strict", rf.strict, "Exit 3 if any frame fails to converge");

    std::string pr_manifest, pr_fields, pr_frames = "all", pr_out;
    CLI::App* prop = app.add_subcommand("propagate", "Warp template labels to frames");
    prop->add_option("--manifest", pr_manifest, "Series manifest")->required();
    prop->add_option("--fields", pr_fields, "Directory with inv_###.mhd fields")->required();
    prop->add_option("--frames", pr_frames, "Comma-separated 1-based frames or 'all'");
    prop->add_option("--out", pr_out, "Output directory")->required();

    std::string ev_manifest, ev_out, ev_case;
    std::string ev_seq, ev_pw, ev_cc;
    CLI::App* ev = app.add_subcommand("evaluate", "Dice/endpoint-error report against gt");
    ev->add_option("--manifest", ev_manifest, "Phantom series manifest")->required();
    ev->add_option("--fields-sequential", ev_seq, "Field directory, sequential mode");
    ev->add_option("--fields-pairwise", ev_pw, "Field directory, pairwise mode");
    ev->add_option("--fields-concat", ev_cc, "Field directory, concat mode");
    ev->add_option("--out", ev_out, "Report CSV path")->required();
    ev->add_option("--case", ev_case, "Case id for the report");

    std::string info_path;
    CLI::App* info = app.add_subcommand("info", "Print volume/field header metadata");
    info->add_option("path", info_path, "Header file")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("tempreg");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (phantom->parsed()) return cmd_phantom(ph);
        if (reg->parsed()) return cmd_register(rf);
        if (prop->parsed()) return cmd_propagate(pr_manifest, pr_fields, pr_frames, pr_out);
        if (ev->parsed()) {
            std::map<std::string, std::string> dirs;
            if (!ev_seq.empty()) dirs["sequential"] = ev_seq;
            if (!ev_pw.empty()) dirs["pairwise"] = ev_pw;
            if (!ev_cc.empty()) dirs["concat"] = ev_cc;
            if (dirs.empty()) {
                std::cerr << "evaluate: at least one --fields-<mode> directory is required\n";
                return 1;
            }
            return cmd_evaluate(ev_manifest, dirs, ev_out, ev_case);
        }
        if (info->parsed()) return cmd_info(info_path);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? argc - 1 : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

}  // namespace tempreg
