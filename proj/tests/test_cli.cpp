// Copyright (c) 2026 tempreg contributors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "tempreg/cli.hpp"
#include "tempreg/io.hpp"

using namespace tempreg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tempreg_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

std::vector<char> slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::vector<char>(std::istreambuf_iterator<char>(is),
                             std::istreambuf_iterator<char>());
}

std::string s(const fs::path& p) { return p.string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli({"frobnicate"}) == 1);
    CHECK(run_cli({"register"}) == 1);  // missing required flags
    CHECK(run_cli({}) == 1);
    CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("missing files exit with code 2") {
    TempDir dir;
    CHECK(run_cli({"register", "--manifest", s(dir.path / "nope.txt"), "--out",
                   s(dir.path / "out")}) == 2);
    CHECK(run_cli({"info", s(dir.path / "nope.mhd")}) == 2);
}

TEST_CASE("phantom generation is byte-deterministic") {
    TempDir dir;
    const std::vector<std::string> base = {"phantom", "--seed", "7",    "--dims", "16",
                                           "--frames", "2",    "--drift", "0.3"};
    std::vector<std::string> a = base;
    a.push_back("--out");
    a.push_back(s(dir.path / "a"));
    std::vector<std::string> b = base;
    b.push_back("--out");
    b.push_back(s(dir.path / "b"));
    REQUIRE(run_cli(a) == 0);
    REQUIRE(run_cli(b) == 0);
    for (const char* name : {"template.raw", "labels.raw", "frame_002.raw",
                             "gt_fwd_002.raw", "manifest.txt", "phantom.json"}) {
        CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));
    }
    CHECK(run_cli({"info", s(dir.path / "a" / "template.mhd")}) == 0);
    CHECK(run_cli({"info", s(dir.path / "a" / "gt_fwd_001.mhd")}) == 0);
}

TEST_CASE("full pipeline: phantom, register, propagate, evaluate") {
    TempDir dir;
    const fs::path ph = dir.path / "phantom";
    REQUIRE(run_cli({"phantom", "--seed", "3", "--dims", "20", "--frames", "3", "--drift",
                     "0.3", "--noise", "1.0", "--out", s(ph)}) == 0);

    // quick config so the test stays fast
    const fs::path cfg = dir.path / "cfg.json";
    {
        std::ofstream os(cfg);
        os << "{\"pyramid_levels\": 2, \"iters_per_level\": [10, 8]}\n";
    }

    const fs::path seq = dir.path / "seq";
    REQUIRE(run_cli({"register", "--manifest", s(ph / "manifest.txt"), "--mode",
                     "sequential", "--config", s(cfg), "--out", s(seq)}) == 0);
    CHECK(fs::exists(seq / "fwd_001.mhd"));
    CHECK(fs::exists(seq / "inv_003.mhd"));
    CHECK(fs::exists(seq / "metrics.csv"));
    {
        std::ifstream is(seq / "metrics.csv");
        std::string header;
        std::getline(is, header);
        CHECK(header == "frame,mode,data_term,min_jacobian,iters,seconds");
        std::size_t rows = 0;
        std::string line;
        while (std::getline(is, line)) rows += !line.empty();
        CHECK(rows == 3);
    }

    const fs::path pw = dir.path / "pw";
    REQUIRE(run_cli({"register", "--manifest", s(ph / "manifest.txt"), "--mode", "pairwise",
                     "--config", s(cfg), "--lambda2", "0", "--out", s(pw)}) == 0);

    const fs::path labels_out = dir.path / "labels";
    REQUIRE(run_cli({"propagate", "--manifest", s(ph / "manifest.txt"), "--fields", s(seq),
                     "--frames", "1,3", "--out", s(labels_out)}) == 0);
    CHECK(fs::exists(labels_out / "labels_001.mhd"));
    CHECK(fs::exists(labels_out / "labels_003.mhd"));
    CHECK(!fs::exists(labels_out / "labels_002.mhd"));

    const fs::path report = dir.path / "report.csv";
    REQUIRE(run_cli({"evaluate", "--manifest", s(ph / "manifest.txt"),
                     "--fields-sequential", s(seq), "--fields-pairwise", s(pw), "--out",
                     s(report), "--case", "demo"}) == 0);
    {
        std::ifstream is(report);
        std::string header;
        std::getline(is, header);
        CHECK(header == "case,frame,roi,mode,dice,epe_mean,epe_p95,min_jacobian");
        std::size_t rows = 0;
        bool case_tagged = true;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            ++rows;
            if (line.find("demo") == std::string::npos) case_tagged = false;
        }
        CHECK(rows == 3u * 3u * 3u);  // frames x rois x (2 modes + none)
        CHECK(case_tagged);
    }
}

TEST_CASE("register honors overrides and strict mode") {
    TempDir dir;
    const fs::path ph = dir.path / "phantom";
    REQUIRE(run_cli({"phantom", "--seed", "5", "--dims", "16", "--frames", "2", "--drift",
                     "0.4", "--out", s(ph)}) == 0);

    // one-iteration budget cannot converge on a moving frame: strict exits 3
    const fs::path cfg = dir.path / "tight.json";
    {
        std::ofstream os(cfg);
        os << "{\"pyramid_levels\": 1, \"iters_per_level\": [1]}\n";
    }
    const int code = run_cli({"register", "--manifest", s(ph / "manifest.txt"), "--mode",
                              "pairwise", "--config", s(cfg), "--strict", "--out",
                              s(dir.path / "strict")});
    CHECK(code == 3);

    // same run without --strict succeeds and flags the frames
    CHECK(run_cli({"register", "--manifest", s(ph / "manifest.txt"), "--mode", "pairwise",
                   "--config", s(cfg), "--out", s(dir.path / "lax")}) == 0);

    // bad mode is a usage error
    CHECK(run_cli({"register", "--manifest", s(ph / "manifest.txt"), "--mode", "backward",
                   "--out", s(dir.path / "x")}) == 1);

    // --levels override adjusts the pyramid
    CHECK(run_cli({"register", "--manifest", s(ph / "manifest.txt"), "--mode", "pairwise",
                   "--levels", "1", "--cc-radius", "3", "--out",
                   s(dir.path / "lv")}) == 0);
}

}  // TEST_SUITE
